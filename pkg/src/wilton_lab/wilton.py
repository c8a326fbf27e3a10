"""Wilton's function W, its partial sums, the operator T and G, H = -2G.

    W(x)   = sum_{k>=0} (-1)^k gamma_k(x)
    L(x,n) = sum_{v<=n} (-1)^v (T^v l)(x),   (T f)(x) = x f(alpha(x)),  l = log(1/x)
    G(x)   = sum_{j>=0} (-1)^j beta_{j-1}(x) F(alpha_j(x))

T^v l = gamma_v, so L(x, n) is a partial sum of W.

Stopping rule.  Since alpha_m alpha_{m+1} <= 1/2, beta_{k+2} <= beta_k / 2 and
sum_{k>=J} beta_k <= 2 (beta_J + beta_{J+1}).  After the term of index J
the remainder of W is therefore at most 2 Lam (beta_J + beta_{J+1}), where
Lam bounds log(1/alpha_k) for k > J; it is read off the known orbit (finite
for rationals, periodic for periodic expansions), so a transiently small
gamma_k never stops the sum early.  The remainder of G after index J is at
most 2 F_MAX (beta_{J-1} + beta_J) with F_MAX bounding |F|.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

from . import _kernels as K
from .errors import CFTerminated, DomainError
from .gauss_cf import XP, orbit_source
from .realspec import RealSpec
from .special import EPS, F_MAX, NO_TABLE, TABLE_MIN_TOL, EvalResult, phi2_table


@dataclass(frozen=True)
class WiltonEval:
    value: float
    abs_error_bound: float
    depth: int
    terminated: bool = False


def _check_tol(tol: float):
    if not (tol > 0):
        raise DomainError("tol must be positive")


def wilton(x: RealSpec, tol: float = 1e-10) -> WiltonEval:
    """W(x) with |value - W(x)| <= abs_error_bound <= tol.

    For a rational x the orbit is finite; when it runs out before the
    remainder bound reaches tol the whole finite sum is returned with
    ``terminated=True``.
    """
    _check_tol(tol)
    src = orbit_source(x)
    total = XP.add(0, 0)
    k = 0
    while True:
        term = XP.mul(src.beta(k - 1), src.loginv(k))
        total = XP.add(total, term) if k % 2 == 0 else XP.sub(total, term)
        if src.exact and k + 1 >= src.length:
            value = float(total)
            return WiltonEval(value, EPS * abs(value) + 1e-30 * (k + 1), k, True)
        lam = src.suffix_max_loginv(k + 1)
        tail = 2.0 * lam * (src.beta_float(k) + src.beta_float(k + 1))
        value = float(total)
        rounding = EPS * abs(value) + 1e-30 * (k + 1)
        if tail + rounding <= tol:
            return WiltonEval(value, tail + rounding, k, False)
        k += 1


def partial_sum_L(x: RealSpec, n: int) -> float:
    """L(x, n) = sum_{v=0}^{n} (-1)^v gamma_v(x)."""
    if n < 0:
        raise DomainError("n must be >= 0")
    src = orbit_source(x)
    total = XP.add(0, 0)
    for v in range(n + 1):
        if src.exact and v >= src.length:
            raise CFTerminated(f"orbit ends at index {src.length - 1}", float(total))
        term = XP.mul(src.beta(v - 1), src.loginv(v))
        total = XP.add(total, term) if v % 2 == 0 else XP.sub(total, term)
    return float(total)


def transfer_apply_l(x: RealSpec, n: int) -> float:
    """(T^n l)(x) = beta_{n-1}(x) log(1/alpha_n(x)) = gamma_n(x)."""
    if n < 0:
        raise DomainError("n must be >= 0")
    src = orbit_source(x)
    if src.exact and n >= src.length:
        raise CFTerminated(f"alpha_{n} = 0: the orbit ends at index {src.length - 1}")
    return float(XP.mul(src.beta(n - 1), src.loginv(n)))


def _beta_sum_bound(src) -> float:
    """Upper bound for sum_{j>=0} beta_{j-1}."""
    return 1.0 + 2.0 * (src.beta_float(0) + (src.beta_float(1) if not src.exact or src.length > 1 else 0.0))


def g_big(x: RealSpec, tol: float = 1e-10) -> EvalResult:
    """G(x) = sum_j (-1)^j beta_{j-1}(x) F(alpha_j(x)) to accuracy tol.

    Half of tol goes to the remainder after the last term.  The other half
    is spread over the terms, term j receiving
    (tol/2) * (2^-(j+2) + beta_{j-1} / (2 S)) with S >= sum_j beta_{j-1}.
    """
    _check_tol(tol)
    src = orbit_source(x)
    tol_eval = 0.5 * tol
    s_bound = _beta_sum_bound(src)
    cache: Dict[int, Tuple[float, float]] = {}
    table = phi2_table() if tol >= TABLE_MIN_TOL else NO_TABLE
    total = 0.0
    bound = 0.0
    j = 0
    terminated = False
    while True:
        if src.exact and j >= src.length:
            terminated = True
            break
        weight = src.beta_float(j - 1)
        if j >= 1:
            nxt = src.beta_float(j) if (not src.exact or j < src.length) else 0.0
            tail = 2.0 * F_MAX * (weight + nxt)
            if tail <= 0.5 * tol:
                bound += tail
                break
        share = tol_eval * (0.5 ** (j + 2) + 0.5 * weight / s_bound)
        xj = src.alpha_float(j)
        if src.exact:
            yj = src.alpha_float(j + 1) if j + 1 < src.length else 0.0
            key = None
        else:
            yj = src.alpha_float(j + 1)
            key = (j - src.m) % src.p if j >= src.m else -1 - j
        hit = cache.get(key) if key is not None else None
        if hit is not None:
            fv, fb = hit
        else:
            if key is not None:
                # periodic orbits revisit each phase; evaluate once at the
                # accuracy the smallest share/weight ratio will demand
                fv, fb, _ = K.f_eval(xj, yj, 1.0, 0.5 * tol_eval / s_bound, table, EPS)
            else:
                fv, fb, _ = K.f_eval(xj, yj, weight, share, table, EPS)
            if key is not None:
                cache[key] = (fv, fb)
        t = weight * fv
        total = total + t if j % 2 == 0 else total - t
        bound += weight * fb + 2 * EPS * abs(total)
        j += 1
    return EvalResult(total, bound, max(j, 1), terminated)


def h_func(x: RealSpec, tol: float = 1e-10) -> EvalResult:
    """H(x) = -2 G(x)."""
    _check_tol(tol)
    g = g_big(x, 0.5 * tol)
    return EvalResult(-2.0 * g.value, 2.0 * g.abs_error_bound, g.terms_used, g.terminated)
