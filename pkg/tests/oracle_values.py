"""Reference values computed once with mpmath at 40 digits, then frozen.

make_oracle_values.py regenerates them; each constant notes its route.
"""

# log(2 pi) - Euler gamma; also reproduced by nsum of the per-interval integrals
A_ONE = 1.2606614015078126

# integral of {t}{t/2}/t^2 on (0, inf): closed-form pieces paired by parity, mpmath nsum
A_HALF = 0.7722092559908731

# (3/4) A(1) - A(1/2) + (1/4) log 2, which comes out as log(2)/2
F_HALF = 0.34657359027997264

# sum over residues r of B2(r p/q) zeta(2, r/q) / q^2 (Hurwitz zeta)
PHI2 = {
    (1, 3): -0.050769569964451433,
    (2, 7): -0.050844711269925202,
    (1, 2): -0.034269459726004717,
    (5, 12): -0.072795730945611020,
}

W_GOLDEN = 0.2974052636752033   # log(1/g)/(1+g)
W_SILVER = 0.6232252401402305   # log(1+sqrt 2)/sqrt 2
W_13_29 = 0.25867250603148134   # log(29/13) - (13/29) log(13/3) + (3/29) log 3

# -sum (m/b) cot(pi m r / b) at 40 digits
C0 = {
    (1, 3): 0.19245008972987526,
    (17, 101): 53.497199767880195,
    (3, 10): -0.56951482611132174,
    (123, 1000): 165.12117894297755,
}

# int_0^1 g^2 dx = (1/3) sum gcd(l,m)^2/(lm)^2 = zeta(2)^3 / (3 zeta(4))
M2 = 1.3707783890401887

TWO_EXP_MINUS_A = 0.56693295865554877

# int_0^1 log(1/x)^p dm(x) by mpmath quad
L_NORM = {1.25: 1.3832916720345775, 1.5: 1.6631443788851475, 2.0: 2.6013022995820374}

T1_L_7_10 = 0.59310850227104253  # (7/10) log(7/3)
M_HALF = 0.58496250072115618     # log(3/2)/log 2
