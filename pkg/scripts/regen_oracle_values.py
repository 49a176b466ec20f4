"""Recompute the frozen reference values in tests/oracle_values.py.

Everything here is computed at 40 digits with mpmath, or with exact rationals
for 2F1, from the defining integrals and series. Nothing calls the package's
series code. The one exception is Pr(U + V <= 0): it is a nested
integral and is taken from the package's quadrature oracle, cross-checked
against its independent 2-D conditional form.

    python scripts/regen_oracle_values.py > tests/oracle_values.py
"""

from fractions import Fraction

import mpmath as mp

mp.mp.dps = 40


def q(x):
    return mp.erfc(x / mp.sqrt(2)) / 2


def gg_pdf(z, al, be):
    return (
        2 * (al * be) ** ((al + be) / 2) / (mp.gamma(al) * mp.gamma(be))
        * z ** ((al + be) / 2 - 1) * mp.besselk(al - be, 2 * mp.sqrt(al * be * z))
    )


def gg_w_pdf(w, al, be):
    return gg_pdf(mp.sqrt(w), al, be) / (2 * mp.sqrt(w))


def j_int(a, b, m, y):
    f = lambda w: w ** (m - 1) * q((y + a * w) / (b * mp.sqrt(w)))  # noqa: E731
    pts = [0, abs(y / a) if y else 1, 10 * (abs(y / a) + (b / a) ** 2) + 10, mp.inf]
    return mp.quad(f, sorted(set(pts)))


def hyp2f1_rational(a, b, c, z, terms=500):
    a, b, c, z = map(Fraction, (a, b, c, z))
    total, term = Fraction(0), Fraction(1)
    for k in range(terms):
        total += term
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
    return total


def main():
    out = {}
    nu, x = mp.mpf("2.8"), mp.mpf(3)
    out["BESSEL_K_2_8_AT_3"] = mp.quad(lambda t: mp.exp(-x * mp.cosh(t)) * mp.cosh(nu * t), [0, 2, 4, 8])  # e^{-3 cosh 8} ~ e^{-4471}
    xl = mp.mpf(10) ** 6
    # K_{3/2}(x) e^x = sqrt(pi / 2x) (1 + 1/x) exactly
    out["BESSEL_K_SCALED_1_5_AT_1E6"] = mp.sqrt(mp.pi / (2 * xl)) * (1 + 1 / xl)
    out["LN_GAMMA_4_2"] = mp.loggamma(mp.mpf("4.2"))
    out["BETA_0_5_4_7"] = mp.beta(mp.mpf("0.5"), mp.mpf("4.7"))
    f = hyp2f1_rational(Fraction(33, 10), 2, Fraction(53, 10), Fraction(1, 10))
    out["HYP2F1_3_3_2_5_3_AT_0_1"] = mp.mpf(f.numerator) / f.denominator
    out["Q_1"] = q(mp.mpf(1))

    al, be = mp.mpf("4.2"), mp.mpf("1.4")
    out["GG_PDF_1_STRONG"] = gg_pdf(mp.mpf(1), al, be)
    p, qq = al, be
    out["D0_STRONG"] = mp.pi * (p * qq) ** p / (2 * mp.sinpi(qq - p) * mp.gamma(p) * mp.gamma(qq) * mp.gamma(p - qq + 1))

    # J(-1, 1, 0.7, 2) under the reflection J(-a, b, m, y) = J(a, b, m, -y)
    out["J_NEG1_1_0_7_AT_2"] = j_int(mp.mpf(1), mp.mpf(1), mp.mpf("0.7"), mp.mpf(-2))
    # D(-1, 1, 0.9, 1.5) = D(1, 1, 0.9, -1.5) = -dJ/dy at y = -1.5
    out["D_NEG1_1_0_9_AT_1_5"] = -mp.diff(lambda y: j_int(mp.mpf(1), mp.mpf(1), mp.mpf("0.9"), y), mp.mpf("-1.5"))

    # F_Y(0) for a = b = 2, strong: int Q(a sqrt(w) / b) f_W(w) dw
    out["CDF_Y0_STRONG_A2_B2"] = mp.quad(lambda w: q(mp.sqrt(w)) * gg_w_pdf(w, al, be), [0, 1, 10, 100, mp.inf])

    am, bm = mp.mpf("4.0"), mp.mpf("1.9")
    snr = mp.mpf(10)
    out["LINK_BER_10DB_MODERATE"] = mp.quad(lambda z: q(mp.sqrt(2 * snr) * z) * gg_pdf(z, am, bm), [0, 0.5, 1, 4, mp.inf])

    m1 = m2 = mp.mpf(1)
    a1 = b1 = a2 = b2 = mp.mpf(2)
    pref = 2 / (mp.pi * b1 * b2 * m2 * a1 ** (m1 - 0.5) * a2 ** (m2 - 0.5))
    out["M_2222_1_1"] = pref * mp.quad(
        lambda y: y ** (m1 + m2) * mp.besselk(m1 - 0.5, a1 * y / b1**2) * mp.besselk(m2 + 0.5, a2 * y / b2**2),
        [0, 1, 10, mp.inf],
    )

    from fsodf import ber_analysis, oracle
    from fsodf.gamma_gamma import STRONG

    link = ber_analysis.snr_to_budget(8.0, STRONG)
    nested = oracle.pr_sum_quadrature(link.mixture(), link.mixture())
    conditional = oracle.pr_sum_conditional_quadrature(link.mixture(), link.mixture())
    assert abs(nested / conditional - 1) < 1e-9, (nested, conditional)
    out["PR_SUM_8DB_STRONG"] = mp.mpf(nested)

    print('"""Frozen reference values; regenerate with scripts/regen_oracle_values.py."""')
    print()
    for key, value in out.items():
        print(f"{key} = {float(value)!r}")


if __name__ == "__main__":
    main()
