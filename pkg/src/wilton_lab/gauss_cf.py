"""Continued fractions, the Gauss map and the orbit quantities alpha/beta/gamma.

For a point x in (0, 1) with expansion x = [0; a1, a2, ...]:

    alpha_0 = x,  alpha_k = {1 / alpha_{k-1}}
    beta_k  = alpha_0 * ... * alpha_k          (beta_{-1} = 1)
    gamma_k = beta_{k-1} * log(1 / alpha_k)

The Gauss map is expanding, so nothing here iterates it in floating point.
Rational and dyadic inputs run Euclid's algorithm on integers: with
remainders r_0 = den, r_1 = num, r_{k+1} = r_{k-1} mod r_k one has
alpha_k = r_{k+1} / r_k and beta_k = r_{k+1} / r_0 exactly.  Periodic
expansions get their alpha values by backward recursion over the repeating
block in 128-bit binary floating point.  Logs are taken at that precision too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Union

import gmpy2

from .errors import CFTerminated, DomainError
from .realspec import CFCoeffs, Dyadic, Rational, RealSpec

XP = gmpy2.context(precision=128)
"""Extended-precision context (about 38 significant digits)."""

Number = Union[Fraction, float, int, "gmpy2.mpfr"]


def gauss_map(x):
    """alpha(x) = {1/x}.

    Fractions (and RealSpec values) are mapped exactly; an exact 0 comes back
    when 1/x is an integer, which is how a terminating expansion announces
    itself.  Floats and mpfr values are mapped in their own arithmetic.
    """
    if isinstance(x, (Rational, Dyadic, CFCoeffs)):
        return _gauss_map_spec(x)
    if isinstance(x, int):
        x = Fraction(x)
    if not (0 < x < 1):
        raise DomainError(f"gauss_map needs 0 < x < 1, got {x}")
    if isinstance(x, Fraction):
        return Fraction(x.denominator % x.numerator, x.numerator)
    if isinstance(x, float):
        y = 1.0 / x
        return y - math.floor(y)
    y = XP.div(1, x)
    return XP.sub(y, gmpy2.floor(y))


def _gauss_map_spec(x: RealSpec):
    if isinstance(x, (Rational, Dyadic)):
        y = gauss_map(x.to_fraction())
        return Rational(y.numerator, y.denominator) if y else Fraction(0)
    if x.prefix:
        rest = x.prefix[1:]
        if x.period is None and not rest:
            return Fraction(0)
        return CFCoeffs(rest, x.period)
    return CFCoeffs((), x.period[1:] + x.period[:1])


# ---------------------------------------------------------------------------
# Orbit sources: a uniform view of alpha_k / beta_k / log(1/alpha_k).
# ---------------------------------------------------------------------------


class _ExactSource:
    """Orbit of a rational p/q from the full Euclid remainder sequence."""

    exact = True

    def __init__(self, num: int, den: int):
        r = [den, num]
        while r[-1]:
            r.append(r[-2] % r[-1])
        self.r = r
        self.length = len(r) - 2  # alpha_k > 0 for k < length; alpha_length = 0
        self._loginv: List[Optional[object]] = [None] * self.length
        self._suffix: Optional[List[float]] = None

    def quotient(self, k: int) -> Optional[int]:
        if 1 <= k <= self.length:
            return self.r[k - 1] // self.r[k]
        return None

    def alpha(self, k: int) -> Fraction:
        return Fraction(self.r[k + 1], self.r[k])

    def alpha_float(self, k: int) -> float:
        return self.r[k + 1] / self.r[k]

    def beta(self, k: int):
        if k < 0:
            return XP.add(0, 1)
        return XP.div(self.r[k + 1], self.r[0])

    def beta_float(self, k: int) -> float:
        return 1.0 if k < 0 else self.r[k + 1] / self.r[0]

    def loginv(self, k: int):
        v = self._loginv[k]
        if v is None:
            v = XP.log(XP.div(self.r[k], self.r[k + 1]))
            self._loginv[k] = v
        return v

    def suffix_max_loginv(self, k: int) -> float:
        """max over j >= k of log(1/alpha_j), 0 if the orbit has ended."""
        if self._suffix is None:
            s = [0.0] * (self.length + 1)
            for j in range(self.length - 1, -1, -1):
                lj = math.log(self.r[j]) - math.log(self.r[j + 1])
                s[j] = max(s[j + 1], lj + 1e-12)
            self._suffix = s
        return self._suffix[min(k, self.length)]


class _PeriodicSource:
    """Orbit of [0; prefix, (period)] with alphas from backward recursion."""

    exact = False
    length = None

    def __init__(self, spec: CFCoeffs):
        self.spec = spec
        self.m = len(spec.prefix)
        self.p = len(spec.period)
        cyc = _cycle_alphas(spec.period)
        pre = [None] * self.m
        nxt = cyc[0]
        for k in range(self.m - 1, -1, -1):
            nxt = XP.div(1, XP.add(spec.prefix[k], nxt))
            pre[k] = nxt
        self.pre = pre
        self.cyc = cyc
        self._betas = [pre[0] if self.m else cyc[0]]
        logs = [XP.log(XP.div(1, a)) for a in pre + cyc]
        self.pre_logs = logs[: self.m]
        self.cyc_logs = logs[self.m:]
        cycmax = max(float(v) for v in self.cyc_logs)
        suf = [cycmax] * (self.m + 1)
        for k in range(self.m - 1, -1, -1):
            suf[k] = max(suf[k + 1], float(self.pre_logs[k]))
        self._suffix = [v * (1 + 1e-12) for v in suf]

    def quotient(self, k: int) -> int:
        return self.spec.quotient(k)

    def alpha(self, k: int):
        if k < self.m:
            return self.pre[k]
        return self.cyc[(k - self.m) % self.p]

    def alpha_float(self, k: int) -> float:
        return float(self.alpha(k))

    def beta(self, k: int):
        if k < 0:
            return XP.add(0, 1)
        while len(self._betas) <= k:
            j = len(self._betas)
            self._betas.append(XP.mul(self._betas[-1], self.alpha(j)))
        return self._betas[k]

    def beta_float(self, k: int) -> float:
        return float(self.beta(k))

    def loginv(self, k: int):
        if k < self.m:
            return self.pre_logs[k]
        return self.cyc_logs[(k - self.m) % self.p]

    def suffix_max_loginv(self, k: int) -> float:
        return self._suffix[min(k, self.m)]


@lru_cache(maxsize=256)
def _cycle_alphas(period: tuple):
    """alpha at every phase of a purely periodic expansion [0; (period)]."""
    p = len(period)
    y = XP.add(0, 0.5)
    # each full pass contracts the error by at least golden^(2p)
    for _ in range(max(4, 100 // p + 2)):
        for a in reversed(period):
            y = XP.div(1, XP.add(a, y))
    # y = [0; c1, c2, ...]; walk backwards to get the other phases
    out = [None] * p
    out[0] = y
    nxt = y
    for i in range(p - 1, 0, -1):
        nxt = XP.div(1, XP.add(period[i], nxt))
        out[i] = nxt
    # out[i] is alpha at phase i: [0; c_{i+1}, ...]
    return out


@lru_cache(maxsize=4096)
def orbit_source(x: RealSpec):
    if isinstance(x, (Rational, Dyadic)):
        f = x.to_fraction()
        return _ExactSource(f.numerator, f.denominator)
    if x.terminates:
        f = x.to_fraction()
        return _ExactSource(f.numerator, f.denominator)
    return _PeriodicSource(x)


def to_mpfr(x: RealSpec):
    """Value of x at extended precision."""
    src = orbit_source(x)
    return src.alpha(0) if not src.exact else XP.div(src.r[1], src.r[0])


def to_float(x: RealSpec) -> float:
    src = orbit_source(x)
    return src.alpha_float(0)


# ---------------------------------------------------------------------------
# Public orbit records
# ---------------------------------------------------------------------------


@dataclass
class Truncation:
    index: int
    reason: str  # "tolerance" | "terminated" | "q_limit" | "max_terms"


@dataclass
class CFOrbit:
    """Partial quotients, convergents and orbit quantities of one point.

    ``a[i]`` is a_{i+1}; ``p[k]/q[k]`` is the k-th convergent with
    ``p[0]/q[0] = 0/1``; ``alpha``, ``beta`` and ``gamma`` are indexed by k
    from 0 and have one entry per positive alpha_k.
    """

    a: List[int] = field(default_factory=list)
    p: List[int] = field(default_factory=lambda: [0])
    q: List[int] = field(default_factory=lambda: [1])
    alpha: List[Number] = field(default_factory=list)
    beta: List[Number] = field(default_factory=list)
    gamma: List[Number] = field(default_factory=list)
    truncated_at: Optional[Truncation] = None

    @property
    def convergents(self) -> List[Fraction]:
        return [Fraction(pk, qk) for pk, qk in zip(self.p[1:], self.q[1:])]

    def beta_at(self, k: int):
        return 1 if k < 0 else self.beta[k]


def cf_expand(x: RealSpec, max_terms: int = 64, q_limit: Optional[int] = None) -> CFOrbit:
    """Expand x into partial quotients and fill the orbit quantities.

    Expansion stops at the first of: ``max_terms`` quotients, a convergent
    denominator above ``q_limit``, the end of a terminating expansion, or
    (for Dyadic input) the first convergent with q_k**2 > 2**width, past
    which quotients describe the sampling grid rather than a typical real
    near the point.
    """
    if max_terms < 1:
        raise DomainError("max_terms must be >= 1")
    if q_limit is not None and q_limit < 1:
        raise DomainError("q_limit must be >= 1")
    src = orbit_source(x)
    grid = (1 << x.width) if isinstance(x, Dyadic) else None
    orb = CFOrbit()
    p_prev, q_prev, p_cur, q_cur = 1, 0, 0, 1
    k = 0
    while True:
        a = src.quotient(k + 1)
        if a is None:
            orb.truncated_at = Truncation(k, "terminated")
            break
        if k >= max_terms:
            orb.truncated_at = Truncation(k, "max_terms")
            break
        p_next, q_next = a * p_cur + p_prev, a * q_cur + q_prev
        if q_limit is not None and q_next > q_limit:
            orb.truncated_at = Truncation(k, "q_limit")
            break
        orb.a.append(a)
        orb.p.append(p_next)
        orb.q.append(q_next)
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_next, q_next
        k += 1
        if grid is not None and q_next * q_next > grid:
            # first convergent past the grid scale is kept, later ones describe the grid
            ends = src.quotient(k + 1) is None
            orb.truncated_at = Truncation(k, "terminated" if ends else "q_limit")
            break
    # orbit quantities for indices 0..k-1 (alpha_k with its quotient a_{k+1} known)
    for j in range(k):
        orb.alpha.append(src.alpha(j))
        if src.exact:
            orb.beta.append(Fraction(src.r[j + 1], src.r[0]))
        else:
            orb.beta.append(src.beta(j))
        orb.gamma.append(XP.mul(src.beta(j - 1), src.loginv(j)))
    return orb


def orbit_terms(x: RealSpec, n: int, allow_terminated: bool = False) -> CFOrbit:
    """Orbit with alpha/beta/gamma filled through index n.

    Raises :class:`CFTerminated` (carrying the partial orbit) when x is
    rational with fewer positive orbit points, unless ``allow_terminated``.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    orb = cf_expand(x, max_terms=n + 1)
    if len(orb.alpha) < n + 1:
        src = orbit_source(x)
        # cf_expand stops on Dyadic grid depth; fill from the exact orbit
        if src.exact:
            for j in range(len(orb.alpha), min(n + 1, src.length)):
                orb.alpha.append(src.alpha(j))
                orb.beta.append(Fraction(src.r[j + 1], src.r[0]))
                orb.gamma.append(XP.mul(src.beta(j - 1), src.loginv(j)))
        if len(orb.alpha) < n + 1:
            if not allow_terminated:
                raise CFTerminated(
                    f"continued fraction ends after {len(orb.alpha)} orbit points", orb)
            orb.truncated_at = Truncation(len(orb.alpha), "terminated")
    del orb.alpha[n + 1:], orb.beta[n + 1:], orb.gamma[n + 1:]
    return orb


def convergent_denominators(quotients: Sequence[int]) -> List[int]:
    """q_0 = 1, q_1 = a_1, q_{k+1} = a_{k+1} q_k + q_{k-1}."""
    q = [1]
    prev = 0
    for a in quotients:
        q.append(a * q[-1] + prev)
        prev = q[-2]
    return q
