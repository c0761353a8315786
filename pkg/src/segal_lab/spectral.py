"""Discrete spectral model of positive integrable elements.

A ``SpectralDensity`` stands in for a positive element h of L1 over a
semifinite algebra with trace tau: finitely many atoms (t, w) with
w = tau(e({t})), plus an optional analytic tail family for infinite spectra.
All operations are pure; instances are immutable and safe to share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import tails
from .errors import ValidationError
from .tails import NONE, TailFamily

# Module-wide absolute comparison tolerance.
ATOL = 1e-12


@dataclass(frozen=True)
class Atom:
    """Spectral point t carrying trace mass w = tau(e({t}))."""

    value: float
    weight: float


@dataclass(frozen=True)
class ExtendedEntropyValue:
    """Entropy split into its one-sided integrals over (1, inf) and (0, 1).

    verdict is 'finite' when both parts are, 'plus_infinity' /
    'minus_infinity' when exactly one diverges, 'undefined' when both do
    (the inf - inf case).
    """

    positive_part: float
    negative_part: float

    def __post_init__(self):
        if self.positive_part < 0.0 or math.isnan(self.positive_part):
            raise ValidationError("bad_entropy_parts", "positive part must be >= 0")
        if self.negative_part > 0.0 or math.isnan(self.negative_part):
            raise ValidationError("bad_entropy_parts", "negative part must be <= 0")

    @property
    def verdict(self) -> str:
        return tails.entropy_class_of_parts(self.positive_part, self.negative_part)

    @property
    def is_finite(self) -> bool:
        return self.verdict == "finite"

    def as_float(self) -> float:
        """finite -> the sum; one-sided divergence -> +-inf; undefined -> nan."""
        v = self.verdict
        if v == "finite":
            return self.positive_part + self.negative_part
        if v == "plus_infinity":
            return math.inf
        if v == "minus_infinity":
            return -math.inf
        return math.nan

    def negate(self) -> "ExtendedEntropyValue":
        return ExtendedEntropyValue(-self.negative_part, -self.positive_part)

    @staticmethod
    def from_value(v: float) -> "ExtendedEntropyValue":
        """Wrap a plain number; the split is by sign, not spectral."""
        if math.isnan(v):
            return ExtendedEntropyValue(math.inf, -math.inf)
        return ExtendedEntropyValue(max(v, 0.0), min(v, 0.0))


@dataclass(frozen=True)
class SpectralDensity:
    """Atoms in ascending value order plus an optional analytic tail.

    ``total_algebra_trace`` is tau(1) of the ambient algebra; defaults to
    +inf (semifinite, not finite).  Mass at spectral value 0 is implicit:
    tau(e({0})) = total_algebra_trace - sum of all weights.
    """

    atoms: tuple[Atom, ...] = ()
    tail: TailFamily = NONE
    total_algebra_trace: float = math.inf

    @staticmethod
    def from_pairs(pairs, tail: TailFamily = NONE,
                   total_algebra_trace: float = math.inf) -> "SpectralDensity":
        """Build from (value, weight) pairs; ties merge by weight addition."""
        merged: dict[float, float] = {}
        for t, w in pairs:
            t, w = float(t), float(w)
            merged[t] = merged.get(t, 0.0) + w
        atoms = tuple(Atom(t, merged[t]) for t in sorted(merged))
        d = SpectralDensity(atoms, tail, float(total_algebra_trace))
        validate(d)
        return d

    def atom_weight_sum(self) -> float:
        return float(sum(a.weight for a in self.atoms))

    def zero_mass(self) -> float:
        """tau(e({0})), infinite when the ambient algebra is."""
        if math.isinf(self.total_algebra_trace):
            return math.inf
        used = self.atom_weight_sum() + tails.tail_weight(self.tail)
        return self.total_algebra_trace - used


ZERO = SpectralDensity()


def validate(d: SpectralDensity) -> None:
    """Check every model invariant; raises ValidationError with a code."""
    seen = set()
    last = -math.inf
    for a in d.atoms:
        if not math.isfinite(a.value) or a.value < 0.0:
            raise ValidationError("negative_value", f"atom value {a.value!r}")
        if not math.isfinite(a.weight) or a.weight <= 0.0:
            raise ValidationError("nonpositive_weight", f"atom weight {a.weight!r}")
        if a.value in seen:
            raise ValidationError("duplicate_values", f"atom value {a.value!r} repeated")
        if a.value < last:
            raise ValidationError("unsorted_atoms", "atoms must ascend by value")
        seen.add(a.value)
        last = a.value

    tails.validate_family(d.tail)

    total = trace(d)
    if not math.isfinite(total):
        raise ValidationError("trace_divergence", "density is not integrable")

    T = d.total_algebra_trace
    if not (T > 0.0):
        raise ValidationError("bad_algebra_trace", "total_algebra_trace must be positive")
    if math.isfinite(T):
        used = d.atom_weight_sum() + tails.tail_weight(d.tail)
        if used > T + ATOL * max(1.0, T):
            raise ValidationError(
                "insufficient_algebra_trace",
                f"weights sum to {used!r} > tau(1) = {T!r}",
            )


def trace(d: SpectralDensity) -> float:
    """tau(h) = sum t_i w_i plus the tail trace; equals the L1 norm (h >= 0)."""
    return float(sum(a.value * a.weight for a in d.atoms)) + tails.tail_trace(d.tail)


def _expand_for_alignment(d: SpectralDensity, other: SpectralDensity):
    """Atoms of d with tail points near the other's atom range materialized.

    Returns (atom_list, residual_mass): residual_mass is the tail trace that
    stays unmatched no matter what (points far outside the other's range).
    """
    atoms = [(a.value, a.weight) for a in d.atoms]
    if d.tail.is_none:
        return atoms, 0.0
    if other.atoms:
        lo = min(a.value for a in other.atoms) / 2.0
        hi = max(a.value for a in other.atoms) * 2.0 + 1.0
        pts = tails.tail_points_between(d.tail, lo, hi)
    else:
        pts = []  # nothing can match; the whole tail stays residual
    residual = tails.tail_trace(d.tail) - sum(t * w for t, w in pts)
    atoms.extend(pts)
    atoms.sort()
    return atoms, max(residual, 0.0)


def l1_distance(d1: SpectralDensity, d2: SpectralDensity) -> float:
    """Trace-norm distance in the commuting model.

    Atoms align order-preservingly; a pair may match only when the weights
    agree, matched pairs cost |t1 - t2| w, unmatched atoms cost t w.  Among
    the alignments with the maximal number of matches the cheapest is taken.
    Identical tails cancel; a tail against a tail-free density contributes
    its mass except where its points match atoms exactly.
    """
    extra = 0.0
    if d1.tail == d2.tail:
        a1 = [(a.value, a.weight) for a in d1.atoms]
        a2 = [(a.value, a.weight) for a in d2.atoms]
    elif d2.tail.is_none:
        a1, r1 = _expand_for_alignment(d1, d2)
        a2 = [(a.value, a.weight) for a in d2.atoms]
        extra = r1
    elif d1.tail.is_none:
        return l1_distance(d2, d1)
    else:
        raise ValidationError(
            "weights_not_alignable", "densities carry different tail families"
        )
    return _align_cost(a1, a2) + extra


def _align_cost(a1, a2) -> float:
    n, m = len(a1), len(a2)
    # dp[j] = (matches, cost) for prefix alignment; maximize matches, then
    # minimize cost
    worse = (-1, math.inf)
    prev = [(0, 0.0)] + [worse] * m
    for j in range(1, m + 1):
        mts, cst = prev[j - 1]
        prev[j] = (mts, cst + a2[j - 1][0] * a2[j - 1][1])
    for i in range(1, n + 1):
        t1, w1 = a1[i - 1]
        cur = [worse] * (m + 1)
        mts, cst = prev[0]
        cur[0] = (mts, cst + t1 * w1)
        for j in range(1, m + 1):
            t2, w2 = a2[j - 1]
            # skip a1 atom
            mts, cst = prev[j]
            best = (mts, cst + t1 * w1)
            # skip a2 atom
            mts, cst = cur[j - 1]
            cand = (mts, cst + t2 * w2)
            if (cand[0], -cand[1]) > (best[0], -best[1]):
                best = cand
            if abs(w1 - w2) <= ATOL * max(1.0, abs(w1)):
                mts, cst = prev[j - 1]
                cand = (mts + 1, cst + abs(t1 - t2) * w1)
                if (cand[0], -cand[1]) > (best[0], -best[1]):
                    best = cand
            cur[j] = best
        prev = cur
    return prev[m][1]


def truncate(d: SpectralDensity, m: float, M: float) -> SpectralDensity:
    """Restriction of the spectrum to the band [m, M]; always finite entropy."""
    if not (0.0 < m < M):
        raise ValidationError("bad_band", "need 0 < m < M")
    pairs = [(a.value, a.weight) for a in d.atoms if m <= a.value <= M]
    pairs.extend(tails.tail_points_between(d.tail, m, M))
    return SpectralDensity.from_pairs(
        pairs, NONE, total_algebra_trace=d.total_algebra_trace
    )


def scale(d: SpectralDensity, alpha: float) -> SpectralDensity:
    """alpha * h: every spectral value is multiplied by alpha > 0."""
    if not (alpha > 0.0) or not math.isfinite(alpha):
        raise ValidationError("bad_scale", "alpha must be a positive real")
    pairs = [(a.value * alpha, a.weight) for a in d.atoms]
    return SpectralDensity.from_pairs(
        pairs, tails.scaled_family(d.tail, alpha),
        total_algebra_trace=d.total_algebra_trace,
    )


def shift_plus_identity(d: SpectralDensity) -> SpectralDensity:
    """h + 1 on a finite algebra: (t, w) -> (t+1, w) plus the zero-mass atom.

    Tail-carrying densities are rejected: t_n + 1 leaves the tail grammar.
    The entropy-side comparison for tails lives in the entropy module.
    """
    if math.isinf(d.total_algebra_trace):
        raise ValidationError("infinite_trace_algebra", "shift needs tau(1) < inf")
    if not d.tail.is_none:
        raise ValidationError(
            "shift_tail_unsupported", "shift of a tail density is not representable"
        )
    pairs = [(a.value + 1.0, a.weight) for a in d.atoms]
    w0 = d.total_algebra_trace - d.atom_weight_sum()
    if w0 > ATOL:
        pairs.append((1.0, w0))
    return SpectralDensity.from_pairs(
        pairs, NONE, total_algebra_trace=d.total_algebra_trace
    )


def with_algebra_trace(d: SpectralDensity, T: float) -> SpectralDensity:
    out = replace(d, total_algebra_trace=float(T))
    validate(out)
    return out
