"""Segal entropy H(h) = tau(h log h) with extended-value classification.

The sign convention keeps H nonnegative for normalized states on finite
algebras (t log t >= t - 1 pointwise); von Neumann entropy is exposed as the
negation helper.  Verdicts come from the analytic tail machinery first; no
numeric partial sum ever decides divergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import tails
from .errors import ContractViolation, ValidationError
from .spectral import ExtendedEntropyValue, SpectralDensity, scale, trace

LOWER_BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class EntropyReport:
    """Entropy of one density plus the finite-algebra diagnostics."""

    value: ExtendedEntropyValue
    trace: float
    lower_bound_check: float | None
    partial_sum_cutoff: int
    zero_mass: float = math.inf


def _atom_parts(d: SpectralDensity) -> tuple[float, float]:
    pos = neg = 0.0
    for a in d.atoms:
        if a.value <= 0.0 or a.value == 1.0:
            continue  # 0 log 0 = 0 by convention; 1 log 1 = 0
        term = a.value * math.log(a.value) * a.weight
        if term > 0.0:
            pos += term
        else:
            neg += term
    return pos, neg


def entropy(d: SpectralDensity) -> EntropyReport:
    """H(h) = integral of t log t against tau(e(dt)), extended-valued."""
    pos, neg = _atom_parts(d)
    tpos, tneg, terms = tails.tail_entropy_parts(d.tail)
    value = ExtendedEntropyValue(pos + tpos, neg + tneg)
    tau_h = trace(d)
    T = d.total_algebra_trace
    lower = None
    if math.isfinite(T):
        lower = tau_h - T
        if value.is_finite and value.as_float() < lower - LOWER_BOUND_SLACK:
            raise ContractViolation(
                "finite_algebra_bound",
                f"H = {value.as_float()!r} below tau(h) - tau(1) = {lower!r}",
            )
    return EntropyReport(
        value=value,
        trace=tau_h,
        lower_bound_check=lower,
        partial_sum_cutoff=terms,
        zero_mass=d.zero_mass(),
    )


def entropy_value(d: SpectralDensity) -> ExtendedEntropyValue:
    return entropy(d).value


def entropy_scale_law(d: SpectralDensity, alpha: float):
    """(lhs, rhs) for H(alpha h) = alpha log alpha tau(h) + alpha H(h).

    Requires finite H(h); the two sides must agree to 1e-9 relative.
    """
    h = entropy_value(d)
    if not h.is_finite:
        raise ValidationError("entropy_not_finite", "scale law needs finite entropy")
    lhs = entropy_value(scale(d, alpha))
    rhs_val = alpha * math.log(alpha) * trace(d) + alpha * h.as_float()
    rhs = ExtendedEntropyValue.from_value(rhs_val)
    if abs(lhs.as_float() - rhs_val) > 1e-9 * (1.0 + abs(rhs_val)):
        raise ContractViolation(
            "scale_law", f"lhs {lhs.as_float()!r} vs rhs {rhs_val!r}"
        )
    return lhs, rhs


def _shifted_entropy_value(d: SpectralDensity) -> ExtendedEntropyValue:
    """H(h + 1) computed spectrally: sum w (t+1) log(t+1), all terms >= 0."""
    pos = 0.0
    for a in d.atoms:
        pos += a.weight * (a.value + 1.0) * math.log(a.value + 1.0)
    for b in d.tail.branches:
        p, _, _ = tails.branch_shifted_entropy(b)
        pos += p
    # zero mass moves to spectral value 1 and contributes 1 log 1 = 0
    return ExtendedEntropyValue(pos, 0.0)


def shift_equivalence(d: SpectralDensity):
    """(H(h), H(h+1), verdicts agree) on a finite algebra.

    On finite algebras the negative side is always integrable, so both
    entropies are finite together; a False flag indicates a bug.
    """
    if math.isinf(d.total_algebra_trace):
        raise ValidationError("infinite_trace_algebra", "needs tau(1) < inf")
    h = entropy_value(d)
    h1 = _shifted_entropy_value(d)
    agree = h.is_finite == h1.is_finite
    return h, h1, agree


def von_neumann_entropy(d: SpectralDensity) -> ExtendedEntropyValue:
    """S(h) = -tau(h log h); verdicts swap the infinities."""
    return entropy_value(d).negate()


# rendering ---------------------------------------------------------------

CSV_HEADER = "verdict,value,positive_part,negative_part,trace,cutoff"


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def report_csv_row(r: EntropyReport) -> str:
    v = r.value
    return ",".join([
        v.verdict,
        _fmt(v.as_float()),
        _fmt(v.positive_part),
        _fmt(v.negative_part),
        _fmt(r.trace),
        str(r.partial_sum_cutoff),
    ])


def report_kv(r: EntropyReport) -> str:
    v = r.value
    lines = [
        f"verdict {v.verdict}",
        f"value {_fmt(v.as_float())}",
        f"positive_part {_fmt(v.positive_part)}",
        f"negative_part {_fmt(v.negative_part)}",
        f"trace {_fmt(r.trace)}",
        f"cutoff {r.partial_sum_cutoff}",
    ]
    if r.lower_bound_check is not None:
        lines.append(f"lower_bound {_fmt(r.lower_bound_check)}")
    if math.isinf(r.zero_mass):
        lines.append("zero_mass inf")
    else:
        lines.append(f"zero_mass {_fmt(r.zero_mass)}")
    return "\n".join(lines)
