"""The function g(x) = sum_{l>=1} (1 - 2{l x}) / l and the cotangent sums c0(r/b).

Two independent routes to g:

* :func:`g_fast` -- g = W + H = W - 2G over the continued-fraction orbit,
  cost proportional to the orbit depth;
* :func:`g_series_oracle` -- the series itself, summed term by term with
  exact fractional parts and averaged over a final window of partial sums.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, TextIO

import gmpy2
import numba as nb
import numpy as np

from .errors import DomainError
from .gauss_cf import XP, orbit_source
from .realspec import CFCoeffs, Dyadic, Rational, RealSpec
from .special import EPS, EvalResult
from .wilton import h_func, wilton


# ---------------------------------------------------------------------------
# g by the orbit route
# ---------------------------------------------------------------------------


def g_fast(x: RealSpec, tol: float = 1e-10) -> EvalResult:
    """g(x) = W(x) + H(x); tol is split evenly between the two."""
    if not (tol > 0):
        raise DomainError("tol must be positive")
    w = wilton(x, 0.5 * tol)
    h = h_func(x, 0.5 * tol)
    return EvalResult(w.value + h.value, w.abs_error_bound + h.abs_error_bound,
                      max(w.depth + 1, h.terms_used), w.terminated or h.terminated)


# ---------------------------------------------------------------------------
# g by the series
# ---------------------------------------------------------------------------


@nb.njit(cache=True, nogil=True)
def _series_partial_sums(hi, lo, n):
    """S_N = sum_{l<=N} (1 - 2{l x}) / l for x = (hi 2^64 + lo) / 2^128, N = 1..n.

    {l x} is formed exactly from the 128-bit numerator (valid for l < 2^32);
    the running sum is compensated.
    """
    out = np.empty(n)
    s = 0.0
    c = 0.0
    two64 = 18446744073709551616.0
    mask32 = np.uint64(0xFFFFFFFF)
    lo_h = lo >> np.uint64(32)
    lo_l = lo & mask32
    for i in range(1, n + 1):
        l = np.uint64(i)
        a = l * lo_l  # < 2^64
        b = l * lo_h  # < 2^64
        # l * lo = b * 2^32 + a; split into a carry over 2^64 and a remainder
        low_sum = (b << np.uint64(32)) + a  # wraps mod 2^64
        carry = (b >> np.uint64(32)) + (((b & mask32) + (a >> np.uint64(32))) >> np.uint64(32))
        top = l * hi + carry  # wraps mod 2^64
        frac = (float(top) + float(low_sum) / two64) / two64
        if frac >= 1.0:
            frac = 1.0 - 1.1102230246251565e-16
        term = (1.0 - 2.0 * frac) / i
        y = term - c
        t = s + y
        c = (t - s) - y
        s = t
        out[i - 1] = s
    return out


@nb.njit(cache=True, nogil=True)
def _series_window_batch(bits, n, w, out_mean, out_spread):
    two64 = 18446744073709551616.0
    for j in range(bits.shape[0]):
        x = bits[j]
        s = 0.0
        c = 0.0
        acc = 0.0
        lo = np.inf
        hi = -np.inf
        for i in range(1, n + 1):
            frac = float(np.uint64(i) * x) / two64  # exact {i x} up to rounding
            if frac >= 1.0:
                frac = 1.0 - 1.1102230246251565e-16
            y = (1.0 - 2.0 * frac) / i - c
            t = s + y
            c = (t - s) - y
            s = t
            if i > n - w:
                acc += s
                lo = min(lo, s)
                hi = max(hi, s)
        out_mean[j] = acc / w
        out_spread[j] = hi - lo + 1.0 / n


def series_window_batch(bits: np.ndarray, n_terms: int, window: int):
    """Window-averaged partial sums at x = bits / 2^64 for a batch of points.

    Returns (estimates, spread + 1/N), the latter being the spread proxy only.
    """
    bits = np.ascontiguousarray(bits, dtype=np.uint64)
    mean = np.empty(bits.size)
    spread = np.empty(bits.size)
    _series_window_batch(bits, n_terms, window, mean, spread)
    return mean, spread


def _numerator128(x: RealSpec):
    """(hi, lo, error) with |x - (hi 2^64 + lo)/2^128| <= error."""
    if isinstance(x, Dyadic):
        if x.width > 128:
            raise DomainError("series oracle supports Dyadic width up to 128")
        num = x.bits << (128 - x.width)
        err = 0.0
    else:
        src = orbit_source(x)
        val = src.alpha(0)
        num = int(gmpy2.floor(XP.mul(val, 1 << 128)))
        err = 2.0 ** -126
    return np.uint64(num >> 64), np.uint64(num & ((1 << 64) - 1)), err


def _oracle_digits(x: RealSpec, q_stop: float) -> List[int]:
    """Partial quotients of a point whose first partial sums match x.

    For a Dyadic this is its own finite expansion followed by 2, 1, 1, ...,
    which describes an irrational within 2^-width-squared of x; its series
    partial sums coincide with those of x for every l below the dyadic
    denominator.
    """
    src = orbit_source(x)
    digits: List[int] = []
    q_prev, q = 0, 1
    k = 1
    while q <= q_stop:
        a = src.quotient(k)
        if a is None:
            break
        digits.append(a)
        q_prev, q = q, a * q + q_prev
        k += 1
    if src.exact and src.quotient(k) is None:
        digits.append(2)
        q_prev, q = q, 2 * q + q_prev
        while q <= q_stop:
            digits.append(1)
            q_prev, q = q, q + q_prev
    return digits


def koksma_tail_bound(digits: Sequence[int], m_start: int) -> float:
    """Bound on |sum_{l>M} (1 - 2{l x}) / l| from the expansion of x.

    A block of q_i consecutive terms sums to at most 5 in absolute value
    (the points sit within 1/q_{i+1} of a shifted grid of spacing 1/q_i),
    so by Ostrowski's expansion any block of L consecutive terms with
    q_m <= L < q_{m+1} sums to at most D_m = 5 (a_1 + ... + a_{m+1}).
    Abel summation then gives
    sum_m D_m (1/(M + q_m) - 1/(M + q_{m+1})).
    The digit list must run past the point where its contribution is
    negligible; the last convergent closes the sum with D/(M + q).
    """
    total = 0.0
    q_prev, q = 0, 1  # q_0 = 1
    acc = 0
    for i, a in enumerate(digits):
        acc += a
        q_next = a * q + q_prev
        d = 5.0 * acc
        total += d * (1.0 / (m_start + q) - 1.0 / (m_start + q_next))
        q_prev, q = q, q_next
    # beyond the listed digits: partial quotients at least 1 keep growing q,
    # and the block bound grows at most linearly in the digit count
    total += 5.0 * (acc + 200.0) / (m_start + q)
    return total


def ostrowski_block_bound(digits: Sequence[int], length: int) -> float:
    """D_m = 5 (a_1 + ... + a_{m+1}) for q_m <= length < q_{m+1}."""
    q_prev, q = 0, 1
    acc = 0
    for a in digits:
        acc += a
        q_next = a * q + q_prev
        if length < q_next:
            return 5.0 * acc
        q_prev, q = q, q_next
    return math.inf


def g_series_oracle(x: RealSpec, n_terms: int = 10**6,
                    averaging_window: Optional[int] = None) -> EvalResult:
    """g(x) from the series, averaged over the last partial sums.

    The reported bound is the larger of the window spread plus 1/N and a
    rigorous tail bound from the partial quotients of x (see
    :func:`koksma_tail_bound`), plus rounding.
    """
    if n_terms < 1000:
        raise DomainError("n_terms must be >= 1000")
    if n_terms >= 2 ** 32:
        raise DomainError("n_terms must be < 2^32")
    if isinstance(x, Rational) or (isinstance(x, CFCoeffs) and x.terminates):
        raise DomainError("the series diverges at rationals; pass an irrational or a Dyadic sample")
    if isinstance(x, Dyadic) and x.to_fraction().denominator <= n_terms:
        raise DomainError("Dyadic denominator too small: the series diverges within n_terms")
    w = averaging_window if averaging_window is not None else math.isqrt(n_terms)
    if not (1 <= w <= n_terms // 2):
        raise DomainError("averaging_window must be between 1 and n_terms/2")
    hi, lo, num_err = _numerator128(x)
    sums = _series_partial_sums(hi, lo, n_terms)
    window = sums[-w:]
    estimate = float(np.mean(window))
    spread = float(window.max() - window.min())
    proxy = spread + 1.0 / n_terms
    m0 = n_terms - w + 1
    digits = _oracle_digits(x, q_stop=1e30)
    rigorous = koksma_tail_bound(digits, m0)
    rounding = 4 * EPS * (float(np.max(np.abs(sums))) + math.log(n_terms) + 1) + 2 * num_err * n_terms
    return EvalResult(estimate, max(proxy, rigorous) + rounding, n_terms)


# ---------------------------------------------------------------------------
# cotangent sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRecord:
    r: int
    b: int
    value: float
    normalized: float

    def __post_init__(self):
        if not (1 <= self.r < self.b) or math.gcd(self.r, self.b) != 1:
            raise DomainError(f"ScanRecord needs 1 <= r < b coprime, got {self.r}/{self.b}")


def cotangent_sum(r: int, b: int) -> float:
    """c0(r/b) = -sum_{m=1}^{b-1} (m/b) cot(pi m r / b).

    The angle is reduced exactly to k = m r mod b and folded to k <= b/2
    (cot(pi - t) = -cot t), so mirrored arguments give bit-identical terms
    of opposite sign; the sum is correctly rounded (math.fsum).
    """
    if not (isinstance(r, (int, np.integer)) and isinstance(b, (int, np.integer))):
        raise DomainError("r and b must be integers")
    r, b = int(r), int(b)
    if b < 2 or not (1 <= r < b):
        raise DomainError(f"need 1 <= r < b, got r={r}, b={b}")
    if math.gcd(r, b) != 1:
        raise DomainError(f"gcd({r}, {b}) != 1: cot(pi m r / b) hits a pole")
    m = np.arange(1, b, dtype=np.int64)
    k = (m * r) % b
    flip = 2 * k > b
    kk = np.where(flip, b - k, k)
    cot = 1.0 / np.tan(np.pi * kk / b)
    cot[2 * kk == b] = 0.0
    cot = np.where(flip, -cot, cot)
    total = math.fsum((m / b) * cot)
    return -total if total else 0.0


def scan_cotangent(b: int, a0: float, a1: float, threads: int = 1) -> List[ScanRecord]:
    """c0(r/b) for every r coprime to b with a0 b <= r <= a1 b, ordered by r."""
    if b < 3:
        raise DomainError("b must be >= 3")
    if not (0 < a0 < a1 <= 1):
        raise DomainError("need 0 < a0 < a1 <= 1")
    # bounds are read as the decimals they print as, so 0.99 means 99/100
    f0, f1 = Fraction(repr(float(a0))), Fraction(repr(float(a1)))
    lo = max(1, math.ceil(f0 * b))
    hi = min(b - 1, math.floor(f1 * b))
    rs = [r for r in range(lo, hi + 1) if math.gcd(r, b) == 1]
    if threads > 1 and len(rs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            values = list(ex.map(lambda r: cotangent_sum(r, b), rs))
    else:
        values = [cotangent_sum(r, b) for r in rs]
    return [ScanRecord(r, b, v, v / b) for r, v in zip(rs, values)]


SCAN_HEADER = ("r", "b", "c0", "c0_over_b")


def write_scan_csv(records: Iterable[ScanRecord], fh: TextIO) -> None:
    """CSV with header r,b,c0,c0_over_b; floats in shortest round-trip form."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SCAN_HEADER)
    for rec in records:
        w.writerow([rec.r, rec.b, repr(rec.value), repr(rec.normalized)])


def scan_to_csv_text(records: Iterable[ScanRecord]) -> str:
    buf = io.StringIO()
    write_scan_csv(records, buf)
    return buf.getvalue()
