"""Moments M_K = int_0^1 |g(x)|^K dx and the prediction 2 e^{-A} Gamma(K+1).

Since g(1 - x) = -g(x), M_K = 2 int_0^{1/2} |g|^K.  The default estimator
samples x in (0, 1/2) from an even mixture of

* u = log(1/x) ~ Gamma(K+1, 1) truncated to [log 2, 64 log 2], which puts
  points where l(x)^K carries its mass (x ~ e^{-K});
* x uniform on (0, 1/2).

Exactly half of the budget is drawn from each component and every sample
is weighted by the mixture density, an unbiased deterministic-mixture
estimator.  Samples are 64-bit dyadics, so g is evaluated over an exact
integer orbit; its per-point error bound feeds a separate bias bound.

The same engine integrates l(x)^L and x^a l(x)^L over (0, 1) for
calibration against Gamma(L+1) and Gamma(L+1)/(1+a)^(L+1).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy import special as sps

from . import _kernels as Kn
from . import streams
from .errors import DomainError
from .special import TABLE_MIN_TOL, a_one, phi2_table

METHODS = ("importance_mc", "stratified_mc", "oracle_quadrature")
K_MAX = 14
U_MAX = 64 * math.log(2.0)  # 64-bit dyadic samples reach down to x = 2^-64
DEFAULT_G_TOL = 1e-4
# |g(x) - log(1/x)| stays below this for x < 2^-60 (W = l - x W(alpha), |H| <= 2 F_MAX)
G_NEAR_ZERO_SLACK = 2.0


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentEstimate:
    K: int
    value: float
    std_error: float
    method: str
    samples: int
    seed: int
    ratio_to_prediction: float
    prediction: float
    bias_bound: float = 0.0
    value_over_pi_k: float = 0.0
    ratio_to_gamma: float = 0.0  # value / Gamma(K+1); tends to 2 e^{-A} = 0.56693...
    g_tol: float = DEFAULT_G_TOL

    def __post_init__(self):
        if self.K < 1:
            raise DomainError("K must be >= 1")
        if not (self.value > 0):
            raise DomainError("moment estimate must be positive")
        if self.std_error < 0:
            raise DomainError("std_error must be >= 0")
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class CalibrationResult:
    L: int
    alpha: float
    value: float
    std_error: float
    exact: float
    samples: int
    seed: int

    @property
    def rel_error(self) -> float:
        return abs(self.value - self.exact) / self.exact

    def to_dict(self) -> Dict:
        d = asdict(self)
        d["rel_error"] = self.rel_error
        return d


# ---------------------------------------------------------------------------
# streaming statistics
# ---------------------------------------------------------------------------


@dataclass
class _Stats:
    """Count, mean and centred sum of squares, merged in a fixed order."""

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0
    extra: float = 0.0  # plain sum of a side quantity (bias bound)

    @classmethod
    def of(cls, v: np.ndarray, extra: float = 0.0) -> "_Stats":
        if v.size == 0:
            return cls(0, 0.0, 0.0, extra)
        mu = float(np.mean(v))
        return cls(int(v.size), mu, float(np.sum((v - mu) ** 2)), extra)

    def merge(self, o: "_Stats") -> "_Stats":
        if o.n == 0:
            return _Stats(self.n, self.mean, self.m2, self.extra + o.extra)
        if self.n == 0:
            return _Stats(o.n, o.mean, o.m2, self.extra + o.extra)
        n = self.n + o.n
        d = o.mean - self.mean
        mean = self.mean + d * o.n / n
        m2 = self.m2 + o.m2 + d * d * self.n * o.n / n
        return _Stats(n, mean, m2, self.extra + o.extra)

    @property
    def var(self) -> float:
        return self.m2 / (self.n - 1) if self.n > 1 else math.inf


# ---------------------------------------------------------------------------
# integrands
# ---------------------------------------------------------------------------


def _g_values(bits: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    table = phi2_table() if tol >= TABLE_MIN_TOL else np.zeros(1)
    g = np.empty(bits.size)
    b = np.empty(bits.size)
    Kn.g_batch64(bits, tol, table, g, b)
    return g, b


def _log_l(bits: np.ndarray) -> np.ndarray:
    """log(1/x) at x = bits / 2^64, without rounding x first."""
    return 64 * math.log(2.0) - np.log(bits.astype(np.float64))


class _Integrand:
    """log f(x) and a per-point bias bound (absolute, before weighting)."""

    def __init__(self, kind: str, K: int, alpha: float = 0.0, g_tol: float = DEFAULT_G_TOL):
        self.kind = kind
        self.K = K
        self.alpha = alpha
        self.g_tol = g_tol

    def evaluate(self, bits: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        u = _log_l(bits)
        if self.kind == "l":
            with np.errstate(divide="ignore"):
                return self.K * np.log(u), np.zeros(bits.size)
        if self.kind == "xl":
            with np.errstate(divide="ignore"):
                logf = -self.alpha * u + (self.K * np.log(u) if self.K else 0.0)
            return logf, np.zeros(bits.size)
        g, bd = _g_values(bits, self.g_tol)
        a = np.abs(g)
        with np.errstate(divide="ignore"):
            logf = self.K * np.log(a)
        # ||g + e|^K - |g|^K| <= K (|g| + b)^(K-1) b
        bias = self.K * (a + bd) ** (self.K - 1) * bd
        return logf, bias


# ---------------------------------------------------------------------------
# proposals
# ---------------------------------------------------------------------------


class _GammaMixture:
    """Even mixture of truncated Gamma(shape, rate) in u = log(1/x) and uniform x."""

    def __init__(self, shape: float, rate: float, x_hi: float):
        self.shape = shape
        self.rate = rate
        self.x_hi = x_hi
        self.u_lo = -math.log(x_hi)
        self.p_lo = float(sps.gammainc(shape, rate * self.u_lo))
        self.p_hi = float(sps.gammainc(shape, rate * U_MAX))
        self.log_z = math.log(self.p_hi - self.p_lo)

    def draw_gamma(self, rng: np.random.Generator, n: int) -> np.ndarray:
        p = self.p_lo + rng.random(n) * (self.p_hi - self.p_lo)
        u = sps.gammaincinv(self.shape, p) / self.rate
        return np.exp(-np.clip(u, self.u_lo, U_MAX))

    def draw_uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.random(n) * self.x_hi

    def log_density(self, u: np.ndarray) -> np.ndarray:
        """log of the mixture density in x at x = e^{-u}."""
        s, r = self.shape, self.rate
        with np.errstate(divide="ignore"):
            log_gamma = (s * math.log(r) + (s - 1) * np.log(u) - r * u
                         - math.lgamma(s) - self.log_z + u)
        log_unif = -math.log(self.x_hi)
        inside = (u >= self.u_lo) & (u <= U_MAX)
        log_gamma = np.where(inside, log_gamma, -np.inf)
        return np.logaddexp(log_gamma, log_unif) - math.log(2.0)


def _importance_run(integrand: _Integrand, mix: _GammaMixture, budget: int, seed: int,
                    threads: int) -> Tuple[float, float, float]:
    """(estimate, std_error, bias bound) of int_0^{x_hi} f."""
    if budget < 4:
        raise DomainError("budget must be >= 4")
    parts = streams.chunks(budget)

    def work(part):
        c, s, e = part
        n = e - s
        n_g = (n + 1) // 2
        xg = mix.draw_gamma(streams.chunk_rng(seed, c, streams.GAMMA), n_g)
        xu = mix.draw_uniform(streams.chunk_rng(seed, c, streams.UNIFORM), n - n_g)
        low = streams.random_bits64(streams.chunk_rng(seed, c, streams.LOW_BITS), n)
        bits = streams.floats_to_dyadic64(np.concatenate([xg, xu]), low)
        logf, bias = integrand.evaluate(bits)
        logq = mix.log_density(_log_l(bits))
        w = np.exp(logf - logq)
        bw = bias * np.exp(-logq)
        return (_Stats.of(w[:n_g], float(np.sum(bw[:n_g]))),
                _Stats.of(w[n_g:], float(np.sum(bw[n_g:]))))

    res = streams.run_ordered(work, parts, threads)
    sg, su = _Stats(), _Stats()
    for a, b in res:
        sg = sg.merge(a)
        su = su.merge(b)
    est = 0.5 * sg.mean + 0.5 * su.mean
    se = 0.5 * math.sqrt(sg.var / sg.n + su.var / su.n)
    bias = 0.5 * sg.extra / sg.n + 0.5 * su.extra / su.n
    return est, se, bias


def _shells(x_hi_exp: int = 1, last: int = 64) -> List[Tuple[float, float]]:
    """Dyadic shells [2^-(j+1), 2^-j) for j = x_hi_exp .. last-1."""
    return [(2.0 ** -(j + 1), 2.0 ** -j) for j in range(x_hi_exp, last)]


def _stratified_run(integrand: _Integrand, budget: int, seed: int,
                    threads: int) -> Tuple[float, float, float]:
    """Dyadic shells in x with allocation proportional to width * l^K."""
    shells = _shells()
    K = integrand.K
    score = np.array([(hi - lo) * (-math.log(math.sqrt(lo * hi)) + 1.0) ** K for lo, hi in shells])
    if budget < 2 * len(shells):
        raise DomainError(f"stratified_mc needs budget >= {2 * len(shells)}")
    spare = budget - 2 * len(shells)
    alloc = 2 + np.floor(spare * score / score.sum()).astype(np.int64)
    alloc[0] += budget - int(alloc.sum())
    starts = np.concatenate([[0], np.cumsum(alloc)])
    parts = streams.chunks(budget)

    def work(part):
        c, s, e = part
        out = []
        rng = streams.chunk_rng(seed, c, streams.UNIFORM)
        low = streams.random_bits64(streams.chunk_rng(seed, c, streams.LOW_BITS), e - s)
        j0 = int(np.searchsorted(starts, s, side="right") - 1)
        pos = s
        while pos < e:
            j1 = starts[j0 + 1]
            stop = min(e, int(j1))
            lo, hi = shells[j0]
            x = lo + rng.random(stop - pos) * (hi - lo)
            bits = streams.floats_to_dyadic64(x, low[pos - s: stop - s])
            logf, bias = integrand.evaluate(bits)
            f = np.exp(logf)
            out.append((j0, _Stats.of(f, float(np.sum(bias)))))
            pos = stop
            j0 += 1
        return out

    res = streams.run_ordered(work, parts, threads)
    per = [_Stats() for _ in shells]
    for chunk_out in res:
        for j, st in chunk_out:
            per[j] = per[j].merge(st)
    est = 0.0
    var = 0.0
    bias = 0.0
    for (lo, hi), st in zip(shells, per):
        wdt = hi - lo
        est += wdt * st.mean
        var += wdt * wdt * st.var / st.n
        bias += wdt * st.extra / st.n
    return est, math.sqrt(var), bias


def _oracle_run(K: int, budget: int, seed: int, n_terms: int,
                threads: int) -> Tuple[float, float, float]:
    """Jittered midpoint rule on (0, 1/2) with g from the series.

    One point per cell; the variance is estimated from adjacent cell pairs.
    The bias column carries the mean window-spread proxy of the series.
    """
    from .gfun import series_window_batch

    if budget < 4 or budget % 2:
        raise DomainError("oracle_quadrature needs an even budget >= 4")
    h = 0.5 / budget
    parts = streams.chunks(budget)
    window = math.isqrt(n_terms)

    def work(part):
        c, s, e = part
        rng = streams.chunk_rng(seed, c, streams.UNIFORM)
        x = (np.arange(s, e) + rng.random(e - s)) * h
        low = streams.random_bits64(streams.chunk_rng(seed, c, streams.LOW_BITS), e - s)
        bits = streams.floats_to_dyadic64(x, low)
        g, spread = series_window_batch(bits, n_terms, window)
        a = np.abs(g)
        f = a ** K
        proxy = K * (a + spread) ** (K - 1) * spread
        return f, float(np.sum(proxy))

    res = streams.run_ordered(work, parts, threads)
    f = np.concatenate([r[0] for r in res])
    est = h * math.fsum(f)
    diffs = f[0::2] - f[1::2]
    var = float(np.sum(diffs * diffs)) * h * h
    bias = h * sum(r[1] for r in res)
    return est, math.sqrt(var), bias


def _near_zero_bound(K: int, u0: float = U_MAX) -> float:
    """int_0^{e^{-u0}} (l + c)^K dx = e^c Gamma(K+1, u0 + c), the part no sample reaches."""
    c = G_NEAR_ZERO_SLACK
    return math.exp(c) * float(sps.gammaincc(K + 1, u0 + c)) * math.gamma(K + 1)


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def prediction(K: int) -> float:
    """2 exp(-A(1)) Gamma(K+1), in log form."""
    if K < 1:
        raise DomainError("K must be >= 1")
    return math.exp(math.log(2.0) - a_one().value + math.lgamma(K + 1))


def calib_moment_l(L: int, budget: int = 4 * 10**6, seed: int = 0,
                   threads: Optional[int] = None) -> CalibrationResult:
    """int_0^1 l(x)^L dx by the moment engine; exact value Gamma(L+1)."""
    if not (1 <= L <= 20):
        raise DomainError("L must be in 1..20")
    threads = streams.resolve_threads(threads)
    mix = _GammaMixture(L + 1, 1.0, 1.0)
    est, se, _ = _importance_run(_Integrand("l", L), mix, budget, seed, threads)
    return CalibrationResult(L, 0.0, est, se, math.gamma(L + 1), budget, seed)


def upper_piece_weighted(alpha: float, L: int) -> float:
    """int_{1/2}^1 x^alpha l(x)^L dx (smooth integrand, adaptive quadrature)."""
    val, _ = integrate.quad(lambda x: x ** alpha * (-math.log(x)) ** L, 0.5, 1.0,
                            epsabs=1e-14, epsrel=1e-12)
    return val


def calib_weighted_moment(alpha: float, L: int, budget: int = 4 * 10**6, seed: int = 0,
                          threads: Optional[int] = None) -> CalibrationResult:
    """int_0^1 x^alpha l^L dx as engine(0, 1/2) plus the (1/2, 1) piece.

    Exact value Gamma(L+1) / (1+alpha)^(L+1).  The engine's Gamma component
    uses rate 1 + alpha, matching the integrand's decay in u.
    """
    if not (0 < alpha <= 4):
        raise DomainError("alpha must be in (0, 4]")
    if not (0 <= L <= 15):
        raise DomainError("L must be in 0..15")
    threads = streams.resolve_threads(threads)
    mix = _GammaMixture(L + 1, 1.0 + alpha, 0.5)
    est, se, _ = _importance_run(_Integrand("xl", L, alpha), mix, budget, seed, threads)
    value = est + upper_piece_weighted(alpha, L)
    exact = math.gamma(L + 1) / (1.0 + alpha) ** (L + 1)
    return CalibrationResult(L, alpha, value, se, exact, budget, seed)


def weighted_lower_half(alpha: float, L: int, budget: int = 10**6, seed: int = 0,
                        threads: Optional[int] = None) -> Tuple[float, float]:
    """Engine estimate of int_0^{1/2} x^alpha l^L dx and its standard error."""
    threads = streams.resolve_threads(threads)
    mix = _GammaMixture(L + 1, 1.0 + alpha, 0.5)
    est, se, _ = _importance_run(_Integrand("xl", L, alpha), mix, budget, seed, threads)
    return est, se


def moment_g(K: int, budget: int = 10**6, seed: int = 0, method: str = "importance_mc",
             g_tol: float = DEFAULT_G_TOL, threads: Optional[int] = None,
             oracle_terms: int = 10**4) -> MomentEstimate:
    """Estimate M_K = 2 int_0^{1/2} |g|^K dx.

    ``bias_bound`` collects the per-sample error bounds of g and the mass
    below x = 2^-64 that 64-bit samples cannot reach; ``std_error`` is the
    sampling error alone.
    """
    if not (1 <= K <= K_MAX):
        raise DomainError(f"K must be in 1..{K_MAX}")
    if method not in METHODS:
        raise DomainError(f"method must be one of {METHODS}")
    if not (g_tol > 0):
        raise DomainError("g_tol must be positive")
    threads = streams.resolve_threads(threads)
    integrand = _Integrand("g", K, g_tol=g_tol)
    if method == "importance_mc":
        est, se, bias = _importance_run(integrand, _GammaMixture(K + 1, 1.0, 0.5), budget, seed, threads)
    elif method == "stratified_mc":
        est, se, bias = _stratified_run(integrand, budget, seed, threads)
    else:
        est, se, bias = _oracle_run(K, budget, seed, oracle_terms, threads)
    bias += _near_zero_bound(K)
    value, se, bias = 2.0 * est, 2.0 * se, 2.0 * bias
    pred = prediction(K)
    return MomentEstimate(K, value, se, method, budget, seed, value / pred, pred, bias,
                          value / math.pi ** K, value / math.gamma(K + 1), g_tol)


def moment_table(K_list: Sequence[int], budget: int = 10**6, seed: int = 0,
                 method: str = "importance_mc", g_tol: float = DEFAULT_G_TOL,
                 threads: Optional[int] = None,
                 progress: Optional[Callable[[MomentEstimate], None]] = None) -> List[MomentEstimate]:
    out = []
    for K in K_list:
        est = moment_g(K, budget, seed, method, g_tol, threads)
        out.append(est)
        if progress is not None:
            progress(est)
    return out


SANDWICH_LO, SANDWICH_HI = 0.2, 2.0
SOFT_BAND = (0.45, 0.70)


def limit_constant() -> float:
    """2 e^{-A(1)} = 0.56693..., the limit of M_K / Gamma(K+1)."""
    return 2.0 * math.exp(-a_one().value)


def sandwich_check(table: Sequence[MomentEstimate]) -> Dict[int, bool]:
    """M_K / Gamma(K+1) in (0.2, 2.0) for every K >= 4 in the table."""
    return {e.K: SANDWICH_LO < e.ratio_to_gamma < SANDWICH_HI for e in table if e.K >= 4}


def trend_toward_constant(table: Sequence[MomentEstimate], target: Optional[float] = None) -> bool:
    """|M_K / Gamma(K+1) - 2 e^{-A}| decreasing along the table order."""
    target = limit_constant() if target is None else target
    gaps = [abs(e.ratio_to_gamma - target) for e in table]
    return all(b < a for a, b in zip(gaps, gaps[1:]))
