"""Compiled inner loops (numba, nopython, nogil).

Everything here works in float64 and returns a rounding-error estimate
beside each value; the Python layers add truncation bounds and decide
the truncation points.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

EPS = 2.220446049250313e-16
EULER_GAMMA = 0.5772156649015328606065120900824024
A_ONE = 1.2606614015078126229541473827288327  # log(2 pi) - gamma
# sup |F| on (0, 1]: a 10^6-point scan peaks at the x -> 0 end, 0.63033070 = A/2;
# stored with a 10% margin
F_MAX = 1.1 * A_ONE / 2

_jit = nb.njit(cache=True, nogil=True, fastmath=False)


# ---------------------------------------------------------------------------
# polygamma for positive real arguments
# ---------------------------------------------------------------------------


@_jit
def digamma(z):
    acc = 0.0
    while z < 10.0:
        acc -= 1.0 / z
        z += 1.0
    w = 1.0 / (z * z)
    s = w * (1.0 / 12 - w * (1.0 / 120 - w * (1.0 / 252 - w * (
        1.0 / 240 - w * (1.0 / 132 - w * (691.0 / 32760 - w / 12.0))))))
    return acc + math.log(z) - 0.5 / z - s


@_jit
def trigamma(z):
    acc = 0.0
    while z < 10.0:
        acc += 1.0 / (z * z)
        z += 1.0
    w = 1.0 / (z * z)
    s = 1.0 / 6 - w * (1.0 / 30 - w * (1.0 / 42 - w * (
        1.0 / 30 - w * (5.0 / 66 - w * (691.0 / 2730 - w * 7.0 / 6)))))
    return acc + 1.0 / z + 0.5 * w + s * w / z


# ---------------------------------------------------------------------------
# phi2(y) = sum_n B2(n y) / n^2, partial sums up to N
# ---------------------------------------------------------------------------


@_jit
def phi2_direct(y, n_terms):
    """Plain partial sum, smallest terms first.  Returns (sum, rounding)."""
    s = 0.0
    for n in range(n_terms, 0, -1):
        t = n * y
        f = t - np.floor(t)
        s += (f * f - f + 1.0 / 6) / (n * n)
    return s, EPS * (2.0 * math.log(n_terms + 1.0) + 4.0)


@_jit
def _two_prod_minus(y, q, p):
    """y*q - p with the product split so the result is nearly exact."""
    prod = y * q
    split = 134217729.0 * y
    yh = split - (split - y)
    yl = y - yh
    split = 134217729.0 * q
    qh = split - (split - q)
    ql = q - qh
    err = ((yh * qh - prod) + yh * ql + yl * qh) + yl * ql
    return (prod - p) + err


@_jit
def _pick_convergent(y, n_terms):
    """Convergent p/q of y minimising the block-sum segment count."""
    best_p, best_q = 0, 1
    best_cost = 1.0 + n_terms * y
    p0, q0, p1, q1 = 1, 0, 0, 1
    z = y
    for _ in range(80):
        if z == 0.0:
            break
        inv = 1.0 / z
        a = np.floor(inv)
        if a > n_terms:
            break
        ai = np.int64(a)
        p2 = ai * p1 + p0
        q2 = ai * q1 + q0
        if q2 > n_terms or q2 > 2 ** 31:
            break
        d = _two_prod_minus(y, float(q2), float(p2)) / q2
        cost = q2 * (1.0 + n_terms * abs(d))
        if cost < best_cost:
            best_cost, best_p, best_q = cost, p2, q2
        p0, q0, p1, q1 = p1, q1, p2, q2
        z = inv - a
    return best_p, best_q, best_cost


@_jit
def phi2_block(y, n_terms, p, q, infinite):
    """Partial sum to n_terms grouped by n mod q, with p/q close to y.

    Within one residue class n = r + m q one has {n y} = {s/q + n d} with
    s = r p mod q and d = y - p/q.  Between integer crossings of s/q + n d
    the summand is a quadratic in n over n^2, which sums in closed form
    through digamma and trigamma.  With ``infinite`` (requires y == p/q)
    each class is summed to infinity.  Returns (sum, rounding estimate).
    """
    d = 0.0 if infinite else _two_prod_minus(y, float(q), float(p)) / q
    qf = float(q)
    total = 0.0
    err = 0.0
    big = np.int64(2 ** 62)
    for r in range(q):
        s = (np.int64(r) * np.int64(p)) % np.int64(q)
        sq = s / qf
        rq = r / qf
        m = np.int64(1) if r == 0 else np.int64(0)
        mr = big if infinite else (np.int64(n_terms) - r) // q
        while m <= mr:
            n = r + m * qf
            u = sq + n * d
            k = np.floor(u)
            if d > 0.0:
                nstar = (k + 1.0 - sq) / d
                lim = np.ceil((nstar - r) / qf) - 1.0
            elif d < 0.0:
                nstar = (sq - k) / (-d)
                lim = np.floor((nstar - r) / qf)
            else:
                lim = 4.0e18
            if d == 0.0 or lim >= mr:
                me = mr
            elif lim < m:
                me = m
            else:
                me = np.int64(lim)
            c = sq - k
            c0 = c * c - c + 1.0 / 6
            c1 = d * (2.0 * c - 1.0)
            c2 = d * d
            cnt = me - m + 1
            if me == big:
                z0 = rq + m
                t0 = trigamma(z0)
                contrib = c0 * t0 / (qf * qf)
                total += contrib
                err += 8.0 * EPS * abs(contrib)
                break
            if cnt <= 16:
                part = 0.0
                for mm in range(m, me + 1):
                    nn = r + mm * qf
                    part += (c0 + nn * (c1 + nn * c2)) / (nn * nn)
                total += part
                err += EPS * (abs(part) * 8.0 + cnt * (abs(d) + 1.0 / (r + m * qf)) / (r + m * qf))
            else:
                z0 = rq + m
                z1 = rq + me + 1
                t0 = trigamma(z0)
                t1 = trigamma(z1)
                g0 = digamma(z0)
                g1 = digamma(z1)
                s2 = (t0 - t1) / (qf * qf)
                s1 = (g1 - g0) / qf
                total += c0 * s2 + c1 * s1 + c2 * cnt
                err += 8.0 * EPS * (abs(c0) * (t0 + t1) / (qf * qf)
                                    + abs(c1) * (abs(g0) + abs(g1)) / qf + c2 * cnt)
            m = me + 1
    return total, err + EPS * (abs(d) * math.log(n_terms + 1.0) + 4.0)


@_jit
def phi2_sum(y, n_terms):
    """Partial sum of phi2 to n_terms by whichever route is cheaper."""
    if n_terms <= 4096:
        return phi2_direct(y, n_terms)
    p, q, cost = _pick_convergent(y, n_terms)
    if 60.0 * cost < n_terms:
        return phi2_block(y, n_terms, p, q, False)
    return phi2_direct(y, n_terms)


@_jit
def phi2_rational(p, q):
    """phi2(p/q) exactly up to rounding (all terms summed)."""
    return phi2_block(p / q, 1, p, q, True)


# ---------------------------------------------------------------------------
# J(lam) = int_{1/lam}^inf phi2(t) t^-3 dt = sum_n I(n / lam),
# I(X) = int_X^inf B2({s}) s^-3 ds
# ---------------------------------------------------------------------------


@_jit
def i_int(m):
    """I(M) for an integer M >= 1: digamma(M) + 1/(2M) + 1/(12M^2) - log M."""
    if m >= 10.0:
        w = 1.0 / (m * m)
        return w * w * (1.0 / 120 - w * (1.0 / 252 - w * (1.0 / 240 - w * (
            1.0 / 132 - w * (691.0 / 32760 - w / 12.0)))))
    h = 0.0
    for j in range(1, int(m)):
        h += 1.0 / j
    return -EULER_GAMMA + h + 0.5 / m + 1.0 / (12.0 * m * m) - math.log(m)


@_jit
def i_x(x):
    """I(X) for real X >= 1, with a bound on its rounding error."""
    k = np.floor(x)
    if x == k:
        return i_int(k), 4.0 * EPS / (k * k * k)
    k1 = k + 1.0
    c = k * k + k + 1.0 / 6
    t = k1 - x  # exact
    a = math.log1p(t / x)
    b = -(2.0 * k + 1.0) * t / (k1 * x)
    e = -0.5 * c * t * (x + k1) / (k1 * k1 * x * x)
    piece = a + b - e
    return piece + i_int(k1), 4.0 * EPS * (abs(a) + abs(b) + abs(e)) + 4.0 * EPS / (k1 * k1 * k1)


@_jit
def j_sum(lam, n_terms):
    """sum_{n <= n_terms} I(n / lam); returns (sum, rounding)."""
    s = 0.0
    err = 0.0
    for n in range(n_terms, 0, -1):
        v, e = i_x(n / lam)
        s += v
        err += e + EPS * abs(s)
    return s, err


J_TAIL_CONST = 0.0161  # sum_{n>N} |I(n/lam)| <= J_TAIL_CONST lam^3 / N^2


@_jit
def j_terms_for(lam, share):
    n = math.sqrt(J_TAIL_CONST * lam ** 3 / share)
    return max(1, int(np.ceil(n)))


# ---------------------------------------------------------------------------
# phi2 on the grid j/Q, Q prime.  With n = s (mod Q),
#   phi2(j/Q) = sum_s S(s) B2({s j / Q}),  S(s) = sum_{n = s mod Q} n^-2,
# a convolution over the cyclic group (Z/Q)^*: index s = g^c, j = g^a.
# ---------------------------------------------------------------------------

TABLE_Q = 5767169  # 11 * 2^19 + 1, prime
TABLE_ROOT = 3  # primitive root mod TABLE_Q


@_jit
def powers_mod(g, q):
    out = np.empty(q - 1, dtype=np.int64)
    v = np.int64(1)
    for i in range(q - 1):
        out[i] = v
        v = (v * g) % q
    return out


@_jit
def phi2_modulus(d):
    """Bound on |phi2(y) - phi2(y')| for |y - y'| <= d <= 1/4.

    B2 is 1-Lipschitz with range of width 1/4, so the difference is at most
    d H_M + 1/(4M); M = 1/(4d) gives d (log(1/(4d)) + 2).
    """
    if d <= 0.0:
        return 0.0
    if d >= 0.25:
        return 0.25 * 1.644934066848226 + d
    return d * (math.log(0.25 / d) + 2.0)


TABLE_ENTRY_ERR = 1e-13


@_jit
def phi2_lookup(y, table):
    """Linear interpolation in a table of phi2(j/Q), j = 0..Q (table[Q] = table[0])."""
    q = table.shape[0] - 1
    pos = y * q
    i = int(np.floor(pos))
    if i >= q:
        i = q - 1
    t = pos - i
    v = (1.0 - t) * table[i] + t * table[i + 1]
    # (1-t) w(t h) + t w((1-t) h) <= w(2 t (1-t) h) by concavity of w
    d = 2.0 * t * (1.0 - t) / q + 4.0 * EPS
    return v, phi2_modulus(d) + TABLE_ENTRY_ERR


# ---------------------------------------------------------------------------
# F(x) = A/2 - x/2 - (x^2/2) phi2({1/x}) + J(x)
# ---------------------------------------------------------------------------


@_jit
def f_eval(x, y, weight, share, table, rel_arg):
    """F(x) with y = {1/x} supplied by the caller.

    Truncation is chosen so that weight * |error| <= share.  ``rel_arg`` is
    the relative rounding already present in x and y; the bound covers it
    together with truncation and rounding.  Returns (value, bound, terms).
    """
    share_phi = 0.5 * share / max(weight, 1e-300)
    share_j = share_phi
    x2 = 0.5 * x * x
    n_phi = 1
    if y == 0.0:
        ph = 0.2741556778080377
        ph_bound = EPS
        lip = 1.0
    else:
        done = False
        if table.shape[0] > 1:
            ph, ph_bound = phi2_lookup(y, table)
            lip = math.log(1.0 / (4.0 * EPS)) + 2.0
            done = x2 * ph_bound <= share_phi
        if not done:
            n_phi = int(min(4.0e12, np.ceil(x2 / (6.0 * share_phi)) + 1.0))
            ph, ph_err = phi2_sum(y, n_phi)
            ph_bound = ph_err + 1.0 / (6.0 * n_phi)
            lip = math.log(n_phi) + 1.0
    n_j = j_terms_for(x, share_j)
    jv, j_err = j_sum(x, n_j)
    j_tail = J_TAIL_CONST * x ** 3 / (n_j * n_j)
    val = 0.5 * A_ONE - 0.5 * x - x2 * ph + jv
    # |dF/dx| <= 1.05 at fixed {1/x}; phi2 partial sums are lip-Lipschitz in y
    arg = rel_arg * (1.05 * x + x2 * y * lip)
    bound = x2 * ph_bound + j_err + j_tail + 4.0 * EPS + arg
    return val, bound, n_phi + n_j


# ---------------------------------------------------------------------------
# batch g = W - 2 G for Dyadic points of width 64
# ---------------------------------------------------------------------------

TWO64 = 18446744073709551616.0


@_jit
def _euclid64(bits, rem):
    """Remainder sequence r_1 = bits, r_2, ... of Euclid on (2^64, bits)."""
    n = 0
    b = np.uint64(bits)
    full = np.uint64(0xFFFFFFFFFFFFFFFF)
    rem[0] = b
    r2 = full % b + np.uint64(1)
    if r2 == b:
        r2 = np.uint64(0)
    n = 1
    prev, cur = b, r2
    while cur != np.uint64(0):
        rem[n] = cur
        n += 1
        prev, cur = cur, prev % cur
    return n


@_jit
def g_point64(bits, tol, rem, alpha, beta, logs, table):
    """g = W - 2G at bits / 2^64 over the full exact orbit.

    Returns (g, W, G, bound, depth).
    """
    n = _euclid64(bits, rem)
    # alpha_k = r_{k+1}/r_k, with r_0 = 2^64
    prevf = TWO64
    for k in range(n):
        cur = float(rem[k])
        alpha[k] = cur / prevf
        beta[k] = cur / TWO64
        logs[k] = math.log(prevf) - math.log(cur)
        prevf = cur
    # rem[k] is r_{k+1}; alpha_k = r_{k+1}/r_k > 0 for k < n
    w = 0.0
    werr = 0.0
    bprev = 1.0
    for k in range(n):
        t = bprev * logs[k]
        w += t if k % 2 == 0 else -t
        werr += 4.0 * EPS * (abs(t) + abs(w)) + bprev * 2.0 * EPS * (abs(math.log(TWO64)))
        bprev = beta[k]
    # G to tolerance tol/4: half for the tail, half spread over the terms
    tol_g = 0.25 * tol
    s_bound = 1.0 + 2.0 * (beta[0] + (beta[1] if n > 1 else 0.0))
    g = 0.0
    gerr = 0.0
    bprev = 1.0
    depth = n
    for j in range(n):
        if j >= 1:
            bnext = beta[j] if j < n else 0.0
            tail = 2.0 * F_MAX * (beta[j - 1] + bnext)
            if tail <= 0.5 * tol_g:
                gerr += tail
                depth = j
                break
        x = alpha[j]
        y = alpha[j + 1] if j + 1 < n else 0.0
        share = 0.5 * tol_g * (0.5 ** (j + 2) + 0.5 * bprev / s_bound)
        fv, fb, _ = f_eval(x, y, bprev, share, table, 2.0 * EPS)
        t = bprev * fv
        g += t if j % 2 == 0 else -t
        gerr += bprev * fb + 4.0 * EPS * abs(g)
        bprev = beta[j]
    return w - 2.0 * g, w, g, werr + 2.0 * gerr, depth


@_jit
def g_batch64(bits, tol, table, out_g, out_bound):
    rem = np.zeros(96, dtype=np.uint64)
    alpha = np.zeros(97)
    beta = np.zeros(97)
    logs = np.zeros(97)
    for i in range(bits.shape[0]):
        gv, wv, gg, bd, dp = g_point64(bits[i], tol, rem, alpha, beta, logs, table)
        out_g[i] = gv
        out_bound[i] = bd


@_jit
def gamma_batch64(bits, n, out):
    """gamma_n(x) = beta_{n-1} log(1/alpha_n) at x = bits / 2^64.

    Returns the number of points whose orbit ends before index n; those
    get 0 (the orbit quantity does not exist there).
    """
    rem = np.zeros(96, dtype=np.uint64)
    ended = 0
    for i in range(bits.shape[0]):
        depth = _euclid64(bits[i], rem)
        if depth <= n:
            out[i] = 0.0
            ended += 1
            continue
        # r_n = rem[n-1] (r_0 = 2^64), r_{n+1} = rem[n]
        cur = rem[n]
        if n == 0:
            out[i] = math.log(TWO64) - math.log(float(cur))
        else:
            prev = rem[n - 1]
            out[i] = (float(prev) / TWO64) * math.log1p(float(prev - cur) / float(cur))
    return ended
