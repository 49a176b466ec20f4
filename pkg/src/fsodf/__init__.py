"""Decode-and-forward FSO relaying over Gamma-Gamma turbulence with BPSK-SIM."""

from .ber_analysis import (
    LinkBudget,
    df_ber,
    direct_ber,
    link_ber,
    m_function,
    perfect_relay_ber,
    pr_sum_negative,
    snr_to_budget,
)
from .gamma_gamma import MODERATE, STRONG, SeriesControl, TurbulenceParams
from .mixture_rv import MixtureParams, cdf_y, pdf_y

__all__ = [
    "LinkBudget",
    "MixtureParams",
    "MODERATE",
    "STRONG",
    "SeriesControl",
    "TurbulenceParams",
    "cdf_y",
    "df_ber",
    "direct_ber",
    "link_ber",
    "m_function",
    "pdf_y",
    "perfect_relay_ber",
    "pr_sum_negative",
    "snr_to_budget",
]
