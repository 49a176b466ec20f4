import ast
import pathlib

import pytest

from fsodf import ber_analysis as ba
from fsodf import oracle
from fsodf.errors import DomainError
from fsodf.gamma_gamma import MODERATE, STRONG
from fsodf.mixture_rv import MixtureParams
from fsodf.oracle import QuadratureControl

P = MixtureParams(0.5, 1.0, STRONG)


def test_cdf_limits():
    assert oracle.cdf_y_quadrature(-1e6, P) == pytest.approx(0.0, abs=1e-12)
    assert oracle.cdf_y_quadrature(1e6, P) == pytest.approx(1.0, abs=1e-12)


def test_cdf_zero_is_left_limit():
    assert oracle.cdf_y_quadrature(-1e-9, P) == pytest.approx(oracle.cdf_y_quadrature(0.0, P), rel=1e-8)


def test_j_unit_case():
    assert oracle.j_quadrature(1, 1, 1, 0) == pytest.approx(0.5, rel=1e-10)


def test_j_domain():
    with pytest.raises(DomainError):
        oracle.j_quadrature(1, 1, 0, 1)
    with pytest.raises(DomainError):
        oracle.j_quadrature(-1, 1, 1, 1)


def test_m_quadrature_positive():
    assert oracle.m_quadrature((1.0, 1.5, 2.0, 1.2), 0.9, 2.2) > 0


def test_m_quadrature_stress_orders():
    value, err = oracle.m_quadrature((2, 2, 2, 2), 4.0, 4.0, return_error=True)
    assert err <= 1e-9 * value


@pytest.mark.parametrize("turb", [STRONG, MODERATE])
def test_pr_sum_symmetric_and_in_range(turb):
    link = ba.snr_to_budget(8.0, turb)
    value = oracle.pr_sum_quadrature(link.mixture(), link.mixture())
    assert 0.0 < value < 0.5
    assert oracle.pr_sum_conditional_quadrature(link.mixture(), link.mixture()) == pytest.approx(value, rel=1e-8)


def test_pr_sum_swap_invariant_for_identical_links():
    link = ba.snr_to_budget(6.0, MODERATE)
    m = link.mixture()
    twin = MixtureParams(m.a, m.b, m.turb)
    assert oracle.pr_sum_quadrature(m, twin) == oracle.pr_sum_quadrature(twin, m)


SPOTS = [
    ("cdf", lambda qc, r: oracle.cdf_y_quadrature(-0.4, P, qc, return_error=r)),
    ("cdf+", lambda qc, r: oracle.cdf_y_quadrature(7.0, P, qc, return_error=r)),
    ("pdf", lambda qc, r: oracle.pdf_y_quadrature(1.3, P, qc, return_error=r)),
    ("j", lambda qc, r: oracle.j_quadrature(1, 1, 1.3, -2, qc, return_error=r)),
    ("m", lambda qc, r: oracle.m_quadrature((2, 2, 2, 2), 1.7, 0.8, qc, return_error=r)),
]


@pytest.mark.parametrize("name,fn", SPOTS, ids=[s[0] for s in SPOTS])
def test_error_estimate_shrinks_when_tightened(name, fn):
    base = QuadratureControl()
    v1, e1 = fn(base, True)
    v2, e2 = fn(base.tightened(10.0), True)
    assert e2 <= 0.5 * e1
    assert v2 == pytest.approx(v1, rel=1e-9)


def test_oracle_shares_no_series_code():
    src = pathlib.Path(oracle.__file__).read_text()
    imported = set()
    for node in ast.walk(ast.parse(src)):
        if isinstance(node, ast.ImportFrom):
            imported.add(node.module or "")
            imported.update(alias.name for alias in node.names)
        elif isinstance(node, ast.Import):
            imported.update(alias.name for alias in node.names)
    forbidden = {"specfun", "mixture_rv", "ber_analysis", "_series", "_extended", "gamma_gamma"}
    assert not imported & forbidden, imported & forbidden
