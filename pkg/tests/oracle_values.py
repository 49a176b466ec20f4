"""Frozen reference values; regenerate with scripts/regen_oracle_values.py."""

BESSEL_K_2_8_AT_3 = 0.10445050820664573
BESSEL_K_SCALED_1_5_AT_1E6 = 0.0012533153906296376
LN_GAMMA_4_2 = 2.04855563696059
BETA_0_5_4_7 = 0.8395660959792012
HYP2F1_3_3_2_5_3_AT_0_1 = 1.1386410824698898
Q_1 = 0.15865525393145705
GG_PDF_1_STRONG = 0.37300868107364926
D0_STRONG = -140.92809395357813
J_NEG1_1_0_7_AT_2 = 2.590512048579027
D_NEG1_1_0_9_AT_1_5 = 0.9378519540393915
CDF_Y0_STRONG_A2_B2 = 0.23974458249797717
LINK_BER_10DB_MODERATE = 0.052847842579227255
M_2222_1_1 = 0.75
PR_SUM_8DB_STRONG = 0.019143182435753293
