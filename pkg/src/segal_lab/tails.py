"""Analytic tail families for infinite discrete spectra.

A tail is a union of *branches*, each an explicit rule

    n  ->  (t_n, w_n),      n >= n0,

where both coordinates follow the fixed grammar  c * q**n * n**a * log(n)**b
(`PowerSeq`).  The grammar is deliberately rigid: every functional the lab
needs (trace, moments, entropy parts, clipped-log sums, band masses) is then
decidable, with certified remainder bounds for the convergent sums and exact
divergence verdicts for the rest.  Arbitrary callbacks are rejected by design;
divergence of a black-box sequence is not decidable numerically.

Internal series terms acquire an extra loglog(n) factor when entropy sums are
decomposed; the classifier and the summation helpers carry it as the flag
``ll`` (0 or 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import PrecisionError, ValidationError

# Certified remainder target for tail summation (headroom under the 1e-9
# the reported quantities promise).
SUM_TOL = 1e-10
# Default cap on the number of numerically summed tail terms.
DEFAULT_CUTOFF = 10**6
_CHUNK = 1 << 14

ENTROPY_CLASSES = ("finite", "plus_infinity", "minus_infinity", "undefined")


@dataclass(frozen=True)
class PowerSeq:
    """The sequence  n -> coef * geo**n * n**pow * log(n)**logpow."""

    coef: float
    geo: float = 1.0
    pow: float = 0.0
    logpow: float = 0.0

    def __post_init__(self):
        if not (self.coef > 0.0) or not (self.geo > 0.0):
            raise ValidationError("bad_tail_params", "coef and geo must be positive")

    def value(self, n: int) -> float:
        x = self.coef * self.geo**n * float(n) ** self.pow
        if self.logpow:
            x *= math.log(n) ** self.logpow
        return x

    def values(self, ns: np.ndarray) -> np.ndarray:
        x = self.coef * np.power(float(self.geo), ns) * np.power(ns, self.pow)
        if self.logpow:
            x = x * np.power(np.log(ns), self.logpow)
        return x

    @property
    def is_const(self) -> bool:
        return self.geo == 1.0 and self.pow == 0.0 and self.logpow == 0.0

    def limit_kind(self) -> str:
        """'zero', 'inf' or 'const' as n -> infinity."""
        if self.geo < 1.0:
            return "zero"
        if self.geo > 1.0:
            return "inf"
        if self.pow < 0.0:
            return "zero"
        if self.pow > 0.0:
            return "inf"
        if self.logpow < 0.0:
            return "zero"
        if self.logpow > 0.0:
            return "inf"
        return "const"

    def monotone_start(self) -> int:
        """Index from which the sequence is certified monotone (toward its limit).

        Sufficient condition on the sign of (log f)'(x) = log(geo) + pow/x
        + logpow/(x log x), valid for every x beyond the returned index.
        """
        if self.is_const:
            return 3
        if self.geo != 1.0:
            x = 2.0 * (abs(self.pow) + abs(self.logpow) / math.log(3.0))
            x /= abs(math.log(self.geo))
            return max(3, int(math.ceil(x)) + 1)
        if self.pow != 0.0:
            x = math.exp(min(2.0 * abs(self.logpow / self.pow), 60.0))
            return max(3, int(math.ceil(x)) + 1)
        return 3


@dataclass(frozen=True)
class TailBranch:
    """One explicit spectral rule n -> (t_n, w_n) for n >= n0."""

    t: PowerSeq
    w: PowerSeq
    n0: int = 1

    def __post_init__(self):
        if self.n0 < 1:
            raise ValidationError("bad_tail_params", "n0 must be >= 1")
        if self.n0 < 2 and (self.t.logpow != 0.0 or self.w.logpow != 0.0):
            raise ValidationError(
                "bad_tail_params", "log-power rules need n0 >= 2 (log 1 = 0)"
            )

    def pair(self, n: int) -> tuple[float, float]:
        return self.t.value(n), self.w.value(n)


# --------------------------------------------------------------------------
# generalized term  c * q**n * n**a * log(n)**b * loglog(n)**e  (e in {0,1})
# --------------------------------------------------------------------------

def series_converges(geo: float, pw: float, lg: float) -> bool:
    """Convergence of sum c*q**n*n**a*log(n)**b (a loglog factor never flips it)."""
    if geo < 1.0:
        return True
    if geo > 1.0:
        return False
    if pw < -1.0:
        return True
    if pw > -1.0:
        return False
    return lg < -1.0


def _eval_terms(coef, geo, pw, lg, ll, ns: np.ndarray) -> np.ndarray:
    x = coef * np.power(ns, pw)
    if geo != 1.0:
        x = x * np.power(float(geo), ns)
    if lg:
        x = x * np.power(np.log(ns), lg)
    if ll:
        x = x * np.log(np.log(ns))
    return x


def _term(coef, geo, pw, lg, ll, n: float) -> float:
    x = coef * n**pw
    if geo != 1.0:
        x *= geo**n
    if lg:
        x *= math.log(n) ** lg
    if ll:
        x *= math.log(math.log(n))
    return x


def _integral_tail(coef, pw, lg, ll, a: float) -> tuple[float, float]:
    """(value, abserr) of  integral_a^inf coef x**pw log(x)**lg loglog(x)**ll dx."""
    if lg == 0.0 and ll == 0:
        # plain power tail, pw < -1
        v = coef * a ** (pw + 1.0) / (-(pw + 1.0))
        return v, abs(v) * 1e-15
    u0 = math.log(a)
    if pw == -1.0 and ll == 0:
        # integral u**lg du with lg < -1
        v = coef * u0 ** (lg + 1.0) / (-(lg + 1.0))
        return v, abs(v) * 1e-15
    if ll:
        f = lambda u: coef * math.exp((pw + 1.0) * u) * u**lg * math.log(u)
    else:
        f = lambda u: coef * math.exp((pw + 1.0) * u) * u**lg
    val, err = integrate.quad(f, u0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val, err


def _decreasing_start(pw, lg, ll, start: int) -> int:
    """Index from which the term is certified strictly decreasing (geo == 1)."""
    if lg <= 0.0 and ll == 0:
        return max(start, 3)
    if pw >= 0.0:
        raise PrecisionError("remainder_unreachable", "term does not decay")
    x = math.exp(min(2.0 * (max(lg, 0.0) + max(ll, 0.0)) / abs(pw), 60.0))
    n = max(start, 3, int(math.ceil(x)) + 1)
    if ll:
        n = max(n, 16)  # loglog factor must be past e**e and settled
    return n


def _sum_chunks(coef, geo, pw, lg, ll, lo: int, hi: int) -> float:
    total = 0.0
    n = lo
    while n <= hi:
        top = min(hi, n + _CHUNK - 1)
        ns = np.arange(n, top + 1, dtype=float)
        total += float(_eval_terms(coef, geo, pw, lg, ll, ns).sum())
        n = top + 1
    return total


def sum_tail(coef, geo, pw, lg, ll, start, tol=SUM_TOL, cutoff=DEFAULT_CUTOFF):
    """Certified sum of a positive generalized term from ``start`` to infinity.

    Returns (value, err_bound, nterms).  Raises PrecisionError when the
    certified bound cannot be pushed below ``tol`` within ``cutoff`` terms.
    """
    if coef == 0.0:
        return 0.0, 0.0, 0
    if coef < 0.0:
        v, e, k = sum_tail(-coef, geo, pw, lg, ll, start, tol, cutoff)
        return -v, e, k
    start = max(start, 3)
    if not series_converges(geo, pw, lg):
        raise PrecisionError("divergent_series", "sum_tail called on divergent term")

    if geo < 1.0:
        total, n = 0.0, start
        while n <= start + cutoff:
            top = n + _CHUNK - 1
            ns = np.arange(n, top + 1, dtype=float)
            total += float(_eval_terms(coef, geo, pw, lg, ll, ns).sum())
            nxt = _term(coef, geo, pw, lg, ll, top + 1.0)
            qbar = geo * ((top + 1.0) / top) ** max(pw, 0.0)
            if lg > 0.0:
                qbar *= (math.log(top + 1.0) / math.log(top)) ** lg
            if ll:
                qbar *= math.log(math.log(top + 1.0)) / math.log(math.log(top))
            if qbar < 1.0 and nxt / (1.0 - qbar) <= tol:
                return total, nxt / (1.0 - qbar), top + 1 - start
            n = top + 1
        raise PrecisionError("remainder_unreachable", "geometric tail: cutoff hit")

    # geo == 1, convergent by the classifier
    ndec = _decreasing_start(pw, lg, ll, start)
    sharp = pw <= -1.0 and lg <= 0.0 and ll == 0
    n_cut = max(start, ndec) + 8
    while True:
        if n_cut > start + cutoff:
            raise PrecisionError("remainder_unreachable", "partial-sum cutoff hit")
        f_n = _term(coef, geo, pw, lg, ll, float(n_cut))
        i_n, e_n = _integral_tail(coef, pw, lg, ll, float(n_cut))
        if sharp:
            # convex decreasing: R in [I(n) + f(n)/2, I(n - 1/2)]
            i_h, e_h = _integral_tail(coef, pw, lg, ll, n_cut - 0.5)
            lo_b = i_n + 0.5 * f_n
            hi_b = i_h
            rem = 0.5 * (lo_b + hi_b)
            err = 0.5 * (hi_b - lo_b) + e_n + e_h
        else:
            # decreasing: R in [I(n), I(n) + f(n)]
            rem = i_n + 0.5 * f_n
            err = 0.5 * f_n + e_n
        if err <= tol:
            head = _sum_chunks(coef, geo, pw, lg, ll, start, n_cut - 1)
            return head + rem, err, n_cut - start
        n_cut = min(2 * n_cut, start + cutoff)
        if n_cut == start + cutoff:
            f_n = _term(coef, geo, pw, lg, ll, float(n_cut))
            i_n, e_n = _integral_tail(coef, pw, lg, ll, float(n_cut))
            rem, err = i_n + 0.5 * f_n, 0.5 * f_n + e_n
            if err <= tol:
                head = _sum_chunks(coef, geo, pw, lg, ll, start, n_cut - 1)
                return head + rem, err, n_cut - start
            raise PrecisionError(
                "remainder_unreachable",
                f"remainder {err:.3e} > tol {tol:.1e} at cutoff {cutoff}",
            )


# --------------------------------------------------------------------------
# branch functionals
# --------------------------------------------------------------------------

def _prod_params(t: PowerSeq, w: PowerSeq, p: float = 1.0):
    """Parameters of w_n * t_n**p as a generalized term."""
    return (
        w.coef * t.coef**p,
        w.geo * t.geo**p,
        w.pow + p * t.pow,
        w.logpow + p * t.logpow,
    )


def _total(coef, geo, pw, lg, n0, tol=SUM_TOL, cutoff=DEFAULT_CUTOFF):
    """Certified (value, err) of the full sum from n0, or (inf, 0) if divergent."""
    if not series_converges(geo, pw, lg):
        return math.inf, 0.0
    start = max(n0, 3)
    head = 0.0
    if n0 < start:
        ns = np.arange(n0, start, dtype=float)
        head = float(_eval_terms(coef, geo, pw, lg, 0, ns).sum())
    val, err, _ = sum_tail(coef, geo, pw, lg, 0, start, tol, cutoff)
    return head + val, err


@lru_cache(maxsize=4096)
def branch_weight(branch: TailBranch) -> tuple[float, float]:
    w = branch.w
    return _total(w.coef, w.geo, w.pow, w.logpow, branch.n0)


@lru_cache(maxsize=4096)
def branch_trace(branch: TailBranch) -> tuple[float, float]:
    return _total(*_prod_params(branch.t, branch.w), branch.n0)


@lru_cache(maxsize=4096)
def branch_moment(branch: TailBranch, p: float) -> tuple[float, float]:
    return _total(*_prod_params(branch.t, branch.w, p), branch.n0)


def _tail_from(coef, geo, pw, lg, n_start, tol=SUM_TOL):
    """(value, err) of the sum from n_start on; inf if divergent."""
    if not series_converges(geo, pw, lg):
        return math.inf, 0.0
    start = max(n_start, 3)
    head = 0.0
    if n_start < start:
        ns = np.arange(n_start, start, dtype=float)
        head = float(_eval_terms(coef, geo, pw, lg, 0, ns).sum())
    val, err, _ = sum_tail(coef, geo, pw, lg, 0, start, tol)
    return head + val, err


@lru_cache(maxsize=1024)
def side_start(branch: TailBranch) -> tuple[int, str]:
    """(index, side): from the index on, t_n is certified on one side of 1.

    side is 'above', 'below' or 'one'.
    """
    t = branch.t
    kind = t.limit_kind()
    if kind == "const":
        c = t.coef
        if c == 1.0:
            return branch.n0, "one"
        return branch.n0, ("above" if c > 1.0 else "below")
    n = max(t.monotone_start(), branch.n0)
    target = "above" if kind == "inf" else "below"
    guard = 0
    while True:
        v = t.value(n)
        if (kind == "inf" and v > 1.0) or (kind == "zero" and v < 1.0):
            return n, target
        n += 1
        guard += 1
        if guard > 10**6:
            raise PrecisionError("side_unresolved", "t_n crosses 1 too slowly")


@lru_cache(maxsize=2048)
def branch_entropy_parts(branch: TailBranch) -> tuple[float, float, float, int]:
    """(positive_part, negative_part, err, terms) of  sum w_n t_n log t_n.

    The verdict is analytic first: a divergent side is reported as the
    matching infinity and never decided by numeric summation.
    """
    t, w = branch.t, branch.w
    n_side, side = side_start(branch)
    start = max(n_side, 3)

    pos = neg = 0.0
    head_n = np.arange(branch.n0, start, dtype=float)
    terms_used = int(head_n.size)
    if head_n.size:
        tv = t.values(head_n)
        wv = w.values(head_n)
        hterm = np.where(tv > 0.0, wv * tv * np.log(np.maximum(tv, 1e-300)), 0.0)
        pos += float(hterm[hterm > 0.0].sum())
        neg += float(hterm[hterm < 0.0].sum())

    if side == "one" and t.is_const:
        return pos, neg, 0.0, terms_used

    # log t_n = log Ct + n log Qt + At log n + Bt loglog n, multiplied by the
    # trace term; each component is a generalized term.
    c1, q1, a1, b1 = _prod_params(t, w)
    comps = []
    if t.geo != 1.0:
        comps.append((math.log(t.geo), (c1, q1, a1 + 1.0, b1, 0)))
    if t.pow != 0.0:
        comps.append((t.pow, (c1, q1, a1, b1 + 1.0, 0)))
    if t.logpow != 0.0:
        comps.append((t.logpow, (c1, q1, a1, b1, 1)))
    if t.coef != 1.0:
        comps.append((math.log(t.coef), (c1, q1, a1, b1, 0)))

    convergent = all(series_converges(q, a, b) for _, (c, q, a, b, e) in comps)
    if not convergent:
        if side == "above":
            return math.inf, neg, 0.0, terms_used
        return pos, -math.inf, 0.0, terms_used

    total = err = 0.0
    nterms = 0
    for coeff, (c, q, a, b, e) in comps:
        v, er, k = sum_tail(c, q, a, b, e, start)
        total += coeff * v
        err += abs(coeff) * er
        nterms = max(nterms, k)
    if side == "above":
        pos += total
    elif side == "below":
        neg += total
    return pos, neg, err, terms_used + nterms


def _scan_stop(branch: TailBranch, predicate, stop_when) -> list[tuple[int, float, float]]:
    """Collect (n, t_n, w_n) with predicate(t_n) true, scanning until the
    certified-monotone regime makes stop_when(t_n) permanent."""
    t = branch.t
    mono = max(t.monotone_start(), branch.n0)
    out = []
    n = branch.n0
    guard = 0
    while True:
        tv = t.value(n)
        if n >= mono and stop_when(tv):
            break
        if predicate(tv):
            out.append((n, tv, branch.w.value(n)))
        n += 1
        guard += 1
        if guard > 10**6:
            raise PrecisionError("scan_unbounded", "band scan exceeded 1e6 points")
    return out


def branch_points_between(branch: TailBranch, lo: float, hi: float):
    """All (t_n, w_n) with lo <= t_n <= hi; finite by construction."""
    t = branch.t
    kind = t.limit_kind()
    if kind == "const":
        c = t.coef
        if lo <= c <= hi:
            wtot, _ = branch_weight(branch)
            if math.isinf(wtot):
                raise PrecisionError("infinite_band_mass", "constant tail in band")
            return [(c, wtot)]
        return []
    if kind == "zero":
        pts = _scan_stop(branch, lambda v: lo <= v <= hi, lambda v: v < lo)
    else:
        pts = _scan_stop(branch, lambda v: lo <= v <= hi, lambda v: v > hi)
    return [(tv, wv) for _, tv, wv in pts]


def branch_mass_at_least(branch: TailBranch, a: float) -> float:
    """tau(e([a, inf))) restricted to the branch, a > 0."""
    t = branch.t
    kind = t.limit_kind()
    if kind == "const":
        if t.coef >= a:
            return branch_weight(branch)[0]
        return 0.0
    if kind == "zero":
        pts = _scan_stop(branch, lambda v: v >= a, lambda v: v < a)
        return float(sum(wv for _, _, wv in pts))
    below = _scan_stop(branch, lambda v: v < a, lambda v: v > a)
    wtot, _ = branch_weight(branch)
    return wtot - float(sum(wv for _, _, wv in below))


def branch_trace_outside(branch: TailBranch, m: float, M: float) -> tuple[float, float]:
    """(below, above): trace mass of the branch strictly below m / above M."""
    t = branch.t
    kind = t.limit_kind()
    tr, _ = branch_trace(branch)
    if kind == "const":
        c = t.coef
        if c < m:
            return tr, 0.0
        if c > M:
            return 0.0, tr
        return 0.0, 0.0
    if kind == "zero":
        kept = _scan_stop(branch, lambda v: v >= m, lambda v: v < m)
        head = float(sum(tv * wv for _, tv, wv in kept))
        above = float(sum(tv * wv for _, tv, wv in kept if tv > M))
        return tr - head, above
    kept = _scan_stop(branch, lambda v: v <= M, lambda v: v > M)
    head = float(sum(tv * wv for _, tv, wv in kept))
    below = float(sum(tv * wv for _, tv, wv in kept if tv < m))
    return below, tr - head


def branch_values_prefix(branch: TailBranch, count: int) -> list[float]:
    ns = np.arange(branch.n0, branch.n0 + count, dtype=float)
    return [float(v) for v in branch.t.values(ns)]


def branch_clipped_log_sum(branch: TailBranch, g, g_zero: float, g_inf: float,
                           lip_zero: float, lip_inf: float,
                           tol: float = 1e-10) -> tuple[float, float]:
    """Certified  sum w_n t_n g(t_n)  for a bounded g with known limits.

    ``g_zero``/``g_inf`` are the limits of g at 0 and infinity;
    ``lip_zero`` bounds |g(t)-g(0)| <= lip_zero * t near zero, and
    ``lip_inf`` bounds |g(t)-g(inf)| <= lip_inf / t for large t.
    """
    t, w = branch.t, branch.w
    kind = t.limit_kind()
    if kind == "const":
        c = t.coef
        wtot, werr = branch_weight(branch)
        v = c * g(c)
        return v * wtot, abs(v) * werr

    c1, q1, a1, b1 = _prod_params(t, w)
    n = max(branch.n0, t.monotone_start()) + 8
    guard = 0
    while True:
        if kind == "zero":
            t_cap = t.value(n)
            tr_rem, tr_err = _tail_from(c1, q1, a1, b1, n)
            err = abs(g_zero) * tr_err + lip_zero * t_cap * (tr_rem + tr_err)
            rem = g_zero * tr_rem
        else:
            tr_rem, tr_err = _tail_from(c1, q1, a1, b1, n)
            w_rem, w_err = _tail_from(w.coef, w.geo, w.pow, w.logpow, n)
            err = abs(g_inf) * tr_err + lip_inf * (w_rem + w_err)
            rem = g_inf * tr_rem
        if err <= tol or guard > 40:
            if err > tol:
                raise PrecisionError("remainder_unreachable", "clipped-log tail sum")
            ns = np.arange(branch.n0, n, dtype=float)
            tv, wv = t.values(ns), w.values(ns)
            head = float((wv * tv * g(tv)).sum()) if ns.size else 0.0
            return head + rem, err
        n *= 2
        guard += 1


def branch_shifted_entropy(branch: TailBranch, tol: float = 1e-10):
    """(pos, neg, err) of  sum w_n (t_n + 1) log(t_n + 1)  (all terms >= 0).

    Finite iff the positive entropy part of the branch is finite; the
    negative-side mass shifts into [1, 2) where (t+1)log(t+1) ~ t_n.
    """
    pos_t, _, _, _ = branch_entropy_parts(branch)
    if math.isinf(pos_t):
        return math.inf, 0.0, 0.0
    t, w = branch.t, branch.w
    if t.is_const:
        c = t.coef
        wtot, werr = branch_weight(branch)
        v = (c + 1.0) * math.log(c + 1.0)
        return v * wtot, 0.0, v * werr

    n_side, side = side_start(branch)
    c1, q1, a1, b1 = _prod_params(t, w)
    n = max(n_side, branch.t.monotone_start()) + 8
    guard = 0
    while True:
        tr_rem, tr_err = _tail_from(c1, q1, a1, b1, n)
        if side == "below":
            t_cap = t.value(n)
            # (1+t)log(1+t) in [t, t(1 + t/2)] for 0 <= t < 1
            est = tr_rem * (1.0 + 0.25 * t_cap)
            err = tr_rem * 0.25 * t_cap + 2.0 * tr_err
        else:
            # t >= 1:  t log t <= (1+t)log(1+t) <= 2 t log t + 2 log 2 * t
            e_rem = _entropy_tail_from(branch, n)
            lo = e_rem
            hi = 2.0 * e_rem + 2.0 * math.log(2.0) * tr_rem
            est = 0.5 * (lo + hi)
            err = 0.5 * (hi - lo) + 2.0 * tr_err
        if err <= tol:
            ns = np.arange(branch.n0, n, dtype=float)
            if ns.size:
                tv, wv = t.values(ns), w.values(ns)
                head = float((wv * (tv + 1.0) * np.log(tv + 1.0)).sum())
            else:
                head = 0.0
            return head + est, 0.0, err
        if guard > 40:
            raise PrecisionError("remainder_unreachable", "shifted entropy tail")
        n *= 2
        guard += 1


def _entropy_tail_from(branch: TailBranch, n_start: int) -> float:
    """Upper estimate of  sum_{n >= n_start} w t |log t|  on the settled side."""
    t = branch.t
    c1, q1, a1, b1 = _prod_params(t, branch.w)
    total = 0.0
    comps = []
    if t.geo != 1.0:
        comps.append((abs(math.log(t.geo)), (c1, q1, a1 + 1.0, b1, 0)))
    if t.pow != 0.0:
        comps.append((abs(t.pow), (c1, q1, a1, b1 + 1.0, 0)))
    if t.logpow != 0.0:
        comps.append((abs(t.logpow), (c1, q1, a1, b1, 1)))
    if t.coef != 1.0:
        comps.append((abs(math.log(t.coef)), (c1, q1, a1, b1, 0)))
    for coeff, (c, q, a, b, e) in comps:
        v, er = _tail_from_ll(c, q, a, b, e, n_start)
        total += coeff * (v + er)
    return total


def _tail_from_ll(coef, geo, pw, lg, ll, n_start, tol=SUM_TOL):
    if not series_converges(geo, pw, lg):
        return math.inf, 0.0
    start = max(n_start, 3)
    head = 0.0
    if n_start < start:
        ns = np.arange(n_start, start, dtype=float)
        head = float(_eval_terms(coef, geo, pw, lg, ll, ns).sum()) if ns.size else 0.0
    val, err, _ = sum_tail(coef, geo, pw, lg, ll, start, tol)
    return head + val, err


# --------------------------------------------------------------------------
# families
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TailFamily:
    """A named analytic tail with validated declared verdicts."""

    kind: str
    branches: tuple[TailBranch, ...]
    declared_trace: float | None
    declared_entropy_class: str | None
    params: tuple[tuple[str, float], ...] = ()

    @property
    def is_none(self) -> bool:
        return self.kind == "none"


NONE = TailFamily("none", (), None, None, ())


def tail_trace(family: TailFamily) -> float:
    if family.is_none:
        return 0.0
    total = 0.0
    for b in family.branches:
        v, _ = branch_trace(b)
        total += v
    return total


def tail_weight(family: TailFamily) -> float:
    if family.is_none:
        return 0.0
    return sum(branch_weight(b)[0] for b in family.branches)


def tail_moment(family: TailFamily, p: float) -> float:
    if family.is_none:
        return 0.0
    return sum(branch_moment(b, p)[0] for b in family.branches)


def tail_entropy_parts(family: TailFamily) -> tuple[float, float, int]:
    """(positive_part, negative_part, terms_used) over all branches."""
    if family.is_none:
        return 0.0, 0.0, 0
    pos = neg = 0.0
    terms = 0
    for b in family.branches:
        p, n, _, k = branch_entropy_parts(b)
        pos += p
        neg += n
        terms = max(terms, k)
    return pos, neg, terms


def entropy_class_of_parts(pos: float, neg: float) -> str:
    pos_inf = math.isinf(pos)
    neg_inf = math.isinf(neg)
    if pos_inf and neg_inf:
        return "undefined"
    if pos_inf:
        return "plus_infinity"
    if neg_inf:
        return "minus_infinity"
    return "finite"


def tail_entropy_class(family: TailFamily) -> str:
    pos, neg, _ = tail_entropy_parts(family)
    return entropy_class_of_parts(pos, neg)


def tail_points_between(family: TailFamily, lo: float, hi: float):
    pts = []
    for b in family.branches:
        pts.extend(branch_points_between(b, lo, hi))
    return pts


def tail_mass_at_least(family: TailFamily, a: float) -> float:
    return sum(branch_mass_at_least(b, a) for b in family.branches)


def tail_trace_outside(family: TailFamily, m: float, M: float) -> tuple[float, float]:
    below = above = 0.0
    for b in family.branches:
        lo, hi = branch_trace_outside(b, m, M)
        below += lo
        above += hi
    return below, above


def tail_values_prefix(family: TailFamily, count: int = 64) -> list[float]:
    vals = []
    for b in family.branches:
        vals.extend(branch_values_prefix(b, count))
    return vals


def validate_family(family: TailFamily) -> None:
    """Recompute the declared trace and entropy class; raise on mismatch."""
    if family.is_none:
        if family.declared_trace is not None or family.declared_entropy_class is not None:
            raise ValidationError("declaration_mismatch", "empty tail declares verdicts")
        return
    if family.declared_entropy_class not in ENTROPY_CLASSES:
        raise ValidationError(
            "declaration_mismatch",
            f"unknown entropy class {family.declared_entropy_class!r}",
        )
    tr = tail_trace(family)
    dt = family.declared_trace
    if dt is None:
        raise ValidationError("declaration_mismatch", "declared trace missing")
    if math.isinf(dt) != math.isinf(tr):
        raise ValidationError(
            "declaration_mismatch", f"declared trace {dt!r}, computed {tr!r}"
        )
    if not math.isinf(tr) and abs(tr - dt) > 1e-6 * max(1.0, abs(dt)):
        raise ValidationError(
            "declaration_mismatch", f"declared trace {dt!r}, computed {tr!r}"
        )
    cls = tail_entropy_class(family)
    if cls != family.declared_entropy_class:
        raise ValidationError(
            "declaration_mismatch",
            f"declared entropy class {family.declared_entropy_class!r}, computed {cls!r}",
        )


def _finalize(kind, branches, params, declared_trace, declared_entropy_class):
    branches = tuple(branches)
    if declared_trace is None:
        declared_trace = tail_trace(TailFamily(kind, branches, None, None, ()))
    if declared_entropy_class is None:
        declared_entropy_class = tail_entropy_class(
            TailFamily(kind, branches, None, None, ())
        )
    fam = TailFamily(kind, branches, declared_trace, declared_entropy_class, tuple(params))
    validate_family(fam)
    return fam


def geometric_over_square(beta: float, gamma: float, n0: int = 1,
                          declared_trace: float | None = None,
                          declared_entropy_class: str | None = None) -> TailFamily:
    """t_n = 1/(beta gamma**n n**2), w_n = beta gamma**n  (gamma < 1).

    The trace terms collapse to 1/n**2; the entropy diverges upward.
    """
    if not (0.0 < gamma < 1.0):
        raise ValidationError("bad_tail_params", "geometric_over_square needs 0 < gamma < 1")
    if beta <= 0.0:
        raise ValidationError("bad_tail_params", "beta must be positive")
    branch = TailBranch(
        t=PowerSeq(1.0 / beta, 1.0 / gamma, -2.0, 0.0),
        w=PowerSeq(beta, gamma, 0.0, 0.0),
        n0=n0,
    )
    params = (("beta", beta), ("gamma", gamma), ("n0", n0))
    return _finalize("geometric_over_square", (branch,), params,
                     declared_trace, declared_entropy_class)


def inverse_log_square(weight: float = 1.0, n0: int = 2,
                       declared_trace: float | None = None,
                       declared_entropy_class: str | None = None) -> TailFamily:
    """t_n = 1/(n log(n)**2), w_n = weight, n >= n0 >= 2.

    Summable values, constant weights; the entropy diverges downward
    (comparison with sum 1/(n log n)).
    """
    if weight <= 0.0:
        raise ValidationError("bad_tail_params", "weight must be positive")
    if n0 < 2:
        raise ValidationError("bad_tail_params", "inverse_log_square needs n0 >= 2")
    branch = TailBranch(
        t=PowerSeq(1.0, 1.0, -1.0, -2.0),
        w=PowerSeq(weight, 1.0, 0.0, 0.0),
        n0=n0,
    )
    params = (("w", weight), ("n0", n0))
    return _finalize("inverse_log_square", (branch,), params,
                     declared_trace, declared_entropy_class)


def custom_pair_sequence(branches, declared_trace=None,
                         declared_entropy_class=None) -> TailFamily:
    """Explicit grammar branches; at most two."""
    branches = tuple(branches)
    if not 1 <= len(branches) <= 2:
        raise ValidationError("bad_tail_params", "custom tail takes 1 or 2 branches")
    params = []
    for i, b in enumerate(branches):
        sfx = "" if i == 0 else "2"
        params.append((f"t{sfx}", (b.t.coef, b.t.geo, b.t.pow, b.t.logpow)))
        params.append((f"w{sfx}", (b.w.coef, b.w.geo, b.w.pow, b.w.logpow)))
        params.append((f"n0{sfx}", b.n0))
    return _finalize("custom_pair_sequence", branches, params,
                     declared_trace, declared_entropy_class)


def scaled_family(family: TailFamily, alpha: float) -> TailFamily:
    """The tail of alpha * h: every spectral value is multiplied by alpha."""
    if family.is_none:
        return NONE
    if alpha <= 0.0:
        raise ValidationError("bad_scale", "alpha must be positive")
    if alpha == 1.0:
        return family
    new = []
    for b in family.branches:
        t = PowerSeq(b.t.coef * alpha, b.t.geo, b.t.pow, b.t.logpow)
        new.append(TailBranch(t=t, w=b.w, n0=b.n0))
    return custom_pair_sequence(new)
