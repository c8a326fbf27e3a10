"""Bernoulli functions, phi2, A(lambda), the constant A = A(1) and F(x).

    B1(t) = {t} - 1/2,  B2(t) = {t}^2 - {t} + 1/6
    phi2(lam) = sum_{n>=1} B2(n lam) / n^2
    A(lam) = int_0^inf {t}{lam t} dt / t^2
    F(x) = (x+1)/2 A(1) - A(x) - (x/2) log x

A(lam) is evaluated through

    A(lam) = (lam/2) log(1/lam) + (1 + A(1))/2 lam + (lam^2/2) phi2(1/lam) - J(lam),
    J(lam) = int_{1/lam}^inf phi2(t) t^-3 dt,

and J through the interchange J(lam) = sum_n I(n/lam) with
I(X) = int_X^inf B2({s}) s^-3 ds, which has a closed form on each unit
interval.  Substituting into F the logarithms cancel:

    F(x) = A(1)/2 - x/2 - (x^2/2) phi2({1/x}) + J(x).

Every evaluator returns an :class:`EvalResult` whose bound covers
truncation and floating-point rounding.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Union

import gmpy2
import numpy as np
from scipy.special import polygamma
from scipy.special import zeta as hurwitz_zeta

from . import _kernels as K
from .errors import DomainError

# Constants to 40 digits (mpmath at 40 decimal digits).
EULER_GAMMA_STR = "0.5772156649015328606065120900824024310422"
LOG_2PI_STR = "1.837877066409345483560659472811235279723"
A_ONE_STR = "1.260661401507812622954147382728832848681"  # log(2 pi) - gamma
PI2_OVER_36_STR = "0.2741556778080377394120691944410041982032"  # zeta(2)/6

EULER_GAMMA = float(EULER_GAMMA_STR)
LOG_2PI = float(LOG_2PI_STR)
A_ONE_CLOSED = float(A_ONE_STR)
PI2_OVER_36 = float(PI2_OVER_36_STR)

F_MAX = K.F_MAX
"""Bound for |F| on (0, 1].

A grid scan of F over (0, 1] peaks at the x -> 0+ limit A(1)/2 = 0.6303...;
the stored constant carries a 10% margin on that value.
"""

EXACT_PHI2_MAX_DEN = 2_000_000
ORACLE_MAX_DEN = 10_000
EPS = K.EPS

Real = Union[float, int, Fraction]


@dataclass(frozen=True)
class EvalResult:
    value: float
    abs_error_bound: float
    terms_used: int
    terminated: bool = False

    def __post_init__(self):
        if not math.isfinite(self.abs_error_bound) or self.abs_error_bound < 0:
            raise ValueError("abs_error_bound must be finite and >= 0")
        if self.terms_used < 1:
            raise ValueError("terms_used must be >= 1")


def _is_exact(t) -> bool:
    return isinstance(t, _RationalABC)


ONE_MINUS_ULP = 1.0 - 2.0 ** -53


def _frac(t):
    # t - floor(t) rounds to 1.0 for tiny negative t; keep {t} < 1
    return np.minimum(t - np.floor(t), ONE_MINUS_ULP)


def bernoulli_b1(t):
    """B1(t) = t - floor(t) - 1/2 (exact for Fractions, elementwise for arrays)."""
    if _is_exact(t):
        return t - math.floor(t) - Fraction(1, 2)
    return _frac(t) - 0.5


def bernoulli_b2(t):
    """B2(t) = {t}^2 - {t} + 1/6."""
    if _is_exact(t):
        f = t - math.floor(t)
        return f * f - f + Fraction(1, 6)
    f = _frac(t)
    return f * f - f + 1.0 / 6


def _frac_float(t: Real):
    """({t} as float, bound on its representation error)."""
    if _is_exact(t):
        f = Fraction(t) - math.floor(t)
        v = float(f)
        return v, EPS * v
    t = float(t)
    return t - math.floor(t), 0.0


def phi2(lam: Real, tol: float = 1e-10) -> EvalResult:
    """phi2(lam) to absolute accuracy tol.

    Exact rationals with denominator up to EXACT_PHI2_MAX_DEN are summed in
    full (one Hurwitz-type series per residue class).  Otherwise the partial
    sum to N terms is used with the remainder bound 1/(6N).
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if _is_exact(lam):
        f = Fraction(lam) - math.floor(lam)
        if f == 0:
            return EvalResult(PI2_OVER_36, EPS, 1)
        if f.denominator <= EXACT_PHI2_MAX_DEN:
            v, err = K.phi2_rational(f.numerator, f.denominator)
            return EvalResult(v, err, f.denominator)
    y, dy = _frac_float(lam)
    if y == 0.0:
        return EvalResult(PI2_OVER_36, EPS, 1)
    n = int(min(4e12, math.ceil(1.0 / (3.0 * tol))))
    v, err = K.phi2_sum(y, n)
    bound = err + 1.0 / (6.0 * n) + dy * (math.log(n) + 1.0)
    return EvalResult(v, bound, n)


# ---------------------------------------------------------------------------
# A(1)
# ---------------------------------------------------------------------------

_A_ONE_LOCK = threading.Lock()
_A_ONE_CACHE: list = []
_A_ONE_TERMS = 1000


def a_one_summand(n: int) -> float:
    """int_0^1 u^2/(n+u)^2 du = 1 + n/(n+1) - 2n log(1 + 1/n)."""
    ctx = gmpy2.context(precision=128)
    return float(ctx.sub(ctx.add(1, ctx.div(n, n + 1)), ctx.mul(2 * n, ctx.log1p(ctx.div(1, n)))))


def _compute_a_one() -> EvalResult:
    ctx = gmpy2.context(precision=128)
    total = ctx.add(0, 1)  # int_0^1 t^2/t^2 dt
    for n in range(1, _A_ONE_TERMS + 1):
        s = ctx.sub(ctx.add(1, ctx.div(n, n + 1)), ctx.mul(2 * n, ctx.log1p(ctx.div(1, n))))
        total = ctx.add(total, s)
    # sum_{n>N} s_n = sum_{j>=2} (-1)^j (j-1)/(j+1) zeta(j, N+1), an alternating
    # series with decreasing terms once N >= 1
    tail = 0.0
    last = 0.0
    j = 2
    while True:
        term = (-1) ** j * (j - 1) / (j + 1) * float(hurwitz_zeta(j, _A_ONE_TERMS + 1))
        tail += term
        last = abs(term)
        if last < 1e-22:
            break
        j += 1
    value = float(ctx.add(total, tail))
    bound = last + 1e-15 * abs(tail) + 2 * EPS * abs(value)
    return EvalResult(value, bound, _A_ONE_TERMS + j)


def a_one() -> EvalResult:
    """A = A(1) = int_0^inf {t}^2 / t^2 dt, summed unit interval by unit interval."""
    if not _A_ONE_CACHE:
        with _A_ONE_LOCK:
            if not _A_ONE_CACHE:
                _A_ONE_CACHE.append(_compute_a_one())
    return _A_ONE_CACHE[0]


# ---------------------------------------------------------------------------
# A(lambda), F(x)
# ---------------------------------------------------------------------------


def _check_unit(lam: Real, name: str):
    if not (0 < lam <= 1):
        raise DomainError(f"{name} must lie in (0, 1], got {lam}")


# ---------------------------------------------------------------------------
# phi2 on a fine grid
# ---------------------------------------------------------------------------

NO_TABLE = np.zeros(1)
TABLE_MIN_TOL = 1e-7  # below this the table never meets its share; skip building it
_TABLE_LOCK = threading.Lock()
_TABLE: list = []


def _build_phi2_table() -> np.ndarray:
    q, g = K.TABLE_Q, K.TABLE_ROOT
    pw = K.powers_mod(g, q)  # pw[c] = g^c mod q
    frac = pw / q
    s_res = polygamma(1, frac) / float(q) ** 2  # sum over n = g^c (mod q) of n^-2
    b = frac * frac - frac + 1.0 / 6
    n = q - 1
    corr = np.fft.irfft(np.conj(np.fft.rfft(s_res)) * np.fft.rfft(b), n=n)
    table = np.empty(q + 1)
    table[pw] = corr + (PI2_OVER_36 * 6.0) / (6.0 * float(q) ** 2)
    table[0] = table[q] = PI2_OVER_36
    return table


def phi2_table() -> np.ndarray:
    """phi2(j/Q) for j = 0..Q, Q = TABLE_Q, built once per process (about 2 s)."""
    if not _TABLE:
        with _TABLE_LOCK:
            if not _TABLE:
                _TABLE.append(_build_phi2_table())
    return _TABLE[0]


def j_integral(lam: Real, tol: float) -> EvalResult:
    """J(lam) = int_{1/lam}^inf phi2(t) t^-3 dt to accuracy tol."""
    x = float(lam)
    n = K.j_terms_for(x, 0.5 * tol)
    v, err = K.j_sum(x, n)
    tail = K.J_TAIL_CONST * x ** 3 / (n * n)
    return EvalResult(v, err + tail, n)


def a_lambda(lam: Real, tol: float = 1e-10) -> EvalResult:
    """A(lam) = int_0^inf {t}{lam t} dt/t^2 for 0 < lam <= 1."""
    _check_unit(lam, "lambda")
    if tol <= 0:
        raise DomainError("tol must be positive")
    x = float(lam)
    inv = 1 / Fraction(lam) if _is_exact(lam) else 1.0 / x
    ph = phi2(inv, tol / (x * x))
    jj = j_integral(x, 0.25 * tol)
    a1 = a_one()
    head = 0.5 * x * math.log(1.0 / x) + 0.5 * (1.0 + a1.value) * x
    value = head + 0.5 * x * x * ph.value - jj.value
    bound = (0.5 * x * x * ph.abs_error_bound + jj.abs_error_bound
             + 0.5 * x * a1.abs_error_bound + 8 * EPS * (abs(head) + 1.0))
    return EvalResult(value, bound, ph.terms_used + jj.terms_used)


def f_func(x: Real, tol: float = 1e-10) -> EvalResult:
    """F(x) = (x+1)/2 A(1) - A(x) - (x/2) log x on (0, 1]."""
    _check_unit(x, "x")
    if tol <= 0:
        raise DomainError("tol must be positive")
    xf = float(x)
    inv = 1 / Fraction(x) if _is_exact(x) else 1.0 / xf
    x2 = 0.5 * xf * xf
    ph = phi2(inv, tol / max(x2, 1e-300) * 0.5)
    jj = j_integral(xf, 0.25 * tol)
    a1 = a_one()
    value = 0.5 * a1.value - 0.5 * xf - x2 * ph.value + jj.value
    bound = (x2 * ph.abs_error_bound + jj.abs_error_bound + 0.5 * a1.abs_error_bound
             + 4 * EPS * (0.5 * a1.value + 0.5 * xf + x2))
    if not _is_exact(x):
        bound += 1.05 * EPS * xf
    return EvalResult(value, bound, ph.terms_used + jj.terms_used)


# ---------------------------------------------------------------------------
# Independent oracle for A(lambda)
# ---------------------------------------------------------------------------


def direct_a_oracle(lam: Real, T: int = 10**6) -> EvalResult:
    """A(lam) by exact integration between breakpoints up to a cutoff.

    On an interval free of integers and of multiples of 1/lam the integrand
    {t}{lam t}/t^2 equals lam - (m + lam k)/t + k m/t^2 with k = floor(t),
    m = floor(lam t), so each piece integrates in closed form.  Beyond the
    cutoff T (rounded up to a multiple of q for lam = p/q) the integrand's
    mean 1/4 + 1/(12 p q) gives the correction c/T; the remainder is at
    most q/T^2 because the integrand minus its mean has zero average over
    each period q.
    """
    if isinstance(lam, float):
        lam = Fraction(repr(lam))  # the decimal the float prints as
    if not _is_exact(lam):
        raise DomainError("direct_a_oracle needs a rational lambda")
    lam = Fraction(lam)
    if lam <= 0 or lam > 1:
        raise DomainError(f"lambda must lie in (0, 1], got {lam}")
    p, q = lam.numerator, lam.denominator
    if q > ORACLE_MAX_DEN:
        raise DomainError(f"denominator of lambda exceeds {ORACLE_MAX_DEN}")
    T = max(int(T), q)
    T = -(-T // q) * q
    top = T * p
    # breakpoints t = N / p with N a multiple of p (integers) or of q (multiples of 1/lam)
    nums = np.union1d(np.arange(0, top + 1, p, dtype=np.int64),
                      np.arange(0, top + 1, q, dtype=np.int64))
    n0 = nums[1:-1]
    n1 = nums[2:]
    k = n0 // p
    m = n0 // q
    lf = p / q
    s0 = n0 / p
    dlt = (n1 - n0) / p
    a = (n0 - k * p) / p  # {t} at the left end
    b = (n0 - m * q) / q  # {lam t} at the left end
    ratio = dlt / s0
    near = ratio > 1.0 / 16
    # pieces close to the origin: closed form lam D - (m + lam k) log(s1/s0) + k m (1/s0 - 1/s1)
    kf, mf = k[near].astype(np.float64), m[near].astype(np.float64)
    t_lin = lf * dlt[near]
    t_log = (mf + lf * kf) * np.log1p(ratio[near])
    t_inv = kf * mf * ((n1[near] - n0[near]) / (n0[near].astype(np.float64) * n1[near])) * p
    closed = t_lin - t_log + t_inv
    # far pieces: expand 1/(s0 + h)^2 in h/s0; the integrand is (a + h)(b + lam h)/(s0 + h)^2
    af, bf, df, sf, rf = a[~near], b[~near], dlt[~near], s0[~near], ratio[~near]
    c0, c1, c2 = af * bf, af * lf + bf, lf
    series = np.zeros_like(df)
    power = df / (sf * sf)  # D^(j+1) / s0^(j+2) for j = 0
    for j in range(24):
        sign = 1.0 if j % 2 == 0 else -1.0
        series += sign * (j + 1) * power * (c0 / (j + 1) + c1 * df / (j + 2) + c2 * df * df / (j + 3))
        power = power * rf
    series_trunc = float(np.sum(25 * power * (c0 + c1 * df + c2 * df * df) / (1 - rf))) if len(df) else 0.0
    first = lf * float(nums[1]) / p
    value = first + math.fsum(closed) + math.fsum(series)
    c = 0.25 + 1.0 / (12 * p * q)
    value += c / T
    rounding = 8 * EPS * (float(np.sum(t_lin + np.abs(t_log) + np.abs(t_inv)))
                          + float(np.sum(np.abs(series))) + abs(first) + c / T)
    bound = q / T ** 2 + rounding + series_trunc
    return EvalResult(value, bound, int(len(n0) + 1))
