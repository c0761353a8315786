import math

import numpy as np
import pytest

from segal_lab import tails as T
from segal_lab.errors import PrecisionError, ValidationError

PI2_6 = math.pi**2 / 6


def brute(fn, n0, N=10**6):
    ns = np.arange(n0, N + 1, dtype=float)
    return float(fn(ns).sum())


class TestSumTail:
    def test_zeta2(self):
        v, err, _ = T.sum_tail(1.0, 1.0, -2.0, 0.0, 0, 3)
        assert err <= 1e-10
        assert abs(v - (PI2_6 - 1.0 - 0.25)) <= 1e-9

    def test_geometric(self):
        v, err, _ = T.sum_tail(1.0, 0.5, 0.0, 0.0, 0, 3)
        assert abs(v - 0.25) <= 1e-10  # sum 2^-n from 3
        assert err <= 1e-10

    def test_inverse_log_square(self):
        v, err, _ = T.sum_tail(1.0, 1.0, -1.0, -2.0, 0, 3)
        oracle = brute(lambda n: 1.0 / (n * np.log(n) ** 2), 3, 4 * 10**6)
        oracle += 1.0 / math.log(4 * 10**6 + 0.5)  # integral tail estimate
        assert abs(v - oracle) <= 1e-7
        assert err <= 1e-10

    def test_log_weighted(self):
        v, err, _ = T.sum_tail(1.0, 1.0, -4.0, 1.0, 0, 3)
        oracle = brute(lambda n: np.log(n) / n**4, 3)
        assert abs(v - oracle) <= 1e-9

    def test_loglog_factor(self):
        v, err, _ = T.sum_tail(1.0, 1.0, -3.0, 0.0, 1, 3)
        oracle = brute(lambda n: np.log(np.log(n)) / n**3, 3)
        assert abs(v - oracle) <= 1e-8

    def test_divergent_raises(self):
        with pytest.raises(PrecisionError):
            T.sum_tail(1.0, 1.0, -1.0, 0.0, 0, 3)

    def test_classifier(self):
        assert T.series_converges(0.9, 5.0, 5.0)
        assert not T.series_converges(1.1, -5.0, -5.0)
        assert T.series_converges(1.0, -1.5, 0.0)
        assert not T.series_converges(1.0, -1.0, -1.0)
        assert T.series_converges(1.0, -1.0, -2.0)
        assert not T.series_converges(1.0, -0.5, -9.0)


class TestFamilies:
    def test_geometric_over_square_trace(self):
        fam = T.geometric_over_square(1.0, 0.5)
        assert abs(T.tail_trace(fam) - PI2_6) <= 1e-8
        assert fam.declared_entropy_class == "plus_infinity"

    def test_geometric_trace_beta_gamma_invariant(self):
        # w_n t_n = 1/n^2 regardless of beta, gamma
        for beta, gamma in [(2.0, 0.25), (0.1, 0.7)]:
            fam = T.geometric_over_square(beta, gamma)
            assert abs(T.tail_trace(fam) - PI2_6) <= 1e-8

    def test_geometric_start_offset(self):
        fam = T.geometric_over_square(1.0, 0.5, n0=5)
        assert abs(T.tail_trace(fam) - (PI2_6 - sum(1 / k**2 for k in (1, 2, 3, 4)))) <= 1e-8

    def test_inverse_log_square(self):
        fam = T.inverse_log_square(1.0, 2)
        oracle = 2.1097428012368944  # partial sum to 2e6 plus integral bracket
        assert abs(T.tail_trace(fam) - oracle) <= 1e-7
        assert fam.declared_entropy_class == "minus_infinity"

    def test_moments(self):
        geo = T.geometric_over_square(1.0, 0.5)
        assert math.isinf(T.tail_moment(geo, 2.0))
        assert math.isfinite(T.tail_moment(geo, 0.5))
        inv = T.inverse_log_square(1.0, 2)
        assert math.isfinite(T.tail_moment(inv, 1.5))
        assert math.isinf(T.tail_moment(inv, 0.5))

    def test_undefined_class(self):
        b1 = T.TailBranch(T.PowerSeq(1.0, 1.0, -1.0, -2.0), T.PowerSeq(1.0), n0=3)
        b2 = T.TailBranch(T.PowerSeq(1.0, 2.0, -2.0), T.PowerSeq(1.0, 0.5), n0=5)
        fam = T.custom_pair_sequence([b1, b2])
        assert fam.declared_entropy_class == "undefined"

    def test_finite_entropy_custom(self):
        b = T.TailBranch(T.PowerSeq(1.0, 1.0, -2.0), T.PowerSeq(1.0, 1.0, -2.0), n0=2)
        fam = T.custom_pair_sequence([b])
        pos, neg, _ = T.tail_entropy_parts(fam)
        oracle = brute(lambda n: -2.0 * np.log(n) / n**4, 2)
        assert abs((pos + neg) - oracle) <= 1e-9

    def test_declaration_mismatch(self):
        fam = T.geometric_over_square(1.0, 0.5)
        for cls in ("finite", "minus_infinity", "undefined"):
            bad = T.TailFamily(fam.kind, fam.branches, fam.declared_trace, cls, fam.params)
            with pytest.raises(ValidationError) as ei:
                T.validate_family(bad)
            assert ei.value.code == "declaration_mismatch"
        bad = T.TailFamily(fam.kind, fam.branches, 2.0, fam.declared_entropy_class, fam.params)
        with pytest.raises(ValidationError):
            T.validate_family(bad)

    def test_inverse_log_square_declared_finite_rejected(self):
        with pytest.raises(ValidationError) as ei:
            T.inverse_log_square(1.0, 2, declared_entropy_class="finite")
        assert ei.value.code == "declaration_mismatch"

    def test_band_points(self):
        inv = T.inverse_log_square(1.0, 2)
        pts = T.tail_points_between(inv, 0.5, 2.0)
        assert len(pts) == 1 and abs(pts[0][0] - 1.0406844905028039) < 1e-12
        geo = T.geometric_over_square(1.0, 0.5)
        pts = T.tail_points_between(geo, 0.9, 4.0)
        # t_n = 2^n/n^2 for n = 1..7: 2, 1, 8/9, 1, 1.28, 16/9, 128/49, 4
        assert len(pts) == 7

    def test_mass_at_least(self):
        inv = T.inverse_log_square(1.0, 2)
        assert T.tail_mass_at_least(inv, 0.2) == 2.0
        geo = T.geometric_over_square(1.0, 0.5)
        got = T.tail_mass_at_least(geo, 1.27)
        assert abs(got - (0.5 + 2.0 ** -4)) <= 1e-12  # n=1 plus n>=5

    def test_trace_outside(self):
        inv = T.inverse_log_square(1.0, 2)
        below, above = T.tail_trace_outside(inv, 0.5, 2.0)
        assert above == 0.0
        assert abs(below - (T.tail_trace(inv) - 1.0406844905028039)) <= 1e-9

    def test_scaled_family(self):
        geo = T.geometric_over_square(1.0, 0.5)
        sc = T.scaled_family(geo, 3.0)
        assert abs(T.tail_trace(sc) - 3.0 * PI2_6) <= 1e-8
        assert sc.declared_entropy_class == "plus_infinity"

    def test_bad_params(self):
        with pytest.raises(ValidationError):
            T.geometric_over_square(1.0, 1.5)
        with pytest.raises(ValidationError):
            T.geometric_over_square(-1.0, 0.5)
        with pytest.raises(ValidationError):
            T.inverse_log_square(1.0, 1)
