import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad as scipy_quad

import levyclt as lc
from levyclt.quadrature import adaptive_quad, semi_infinite_quad, tail_quad


class TestEngine:
    def test_polynomial_and_oscillatory_against_scipy(self):
        cases = [
            (lambda x: x ** 3 - 2 * x + 1, 0.0, 3.0),
            (lambda x: np.exp(-x * x), -2.0, 5.0),
            (lambda x: np.sin(7 * x) ** 2, 0.0, 4.0),
            (lambda x: 1.0 / (1.0 + x * x), -10.0, 10.0),
        ]
        for f, a, b in cases:
            ref, _ = scipy_quad(lambda x: float(f(np.asarray(x))), a, b,
                                epsabs=1e-13, epsrel=1e-13)
            got = adaptive_quad(f, a, b)
            assert got == pytest.approx(ref, rel=1e-10, abs=1e-12)

    def test_endpoint_singularity(self):
        # integrable u^(-1/2) singularity: Kronrod nodes never touch u = 0
        got = adaptive_quad(lambda u: 1.0 / np.sqrt(u), 0.0, 1.0)
        assert got == pytest.approx(2.0, rel=1e-8)

    def test_breakpoints_handle_kinks(self):
        f = lambda x: np.abs(x - 0.3)
        got = adaptive_quad(f, 0.0, 1.0, breakpoints=[0.3])
        exact = 0.3 ** 2 / 2 + 0.7 ** 2 / 2
        assert got == pytest.approx(exact, rel=1e-12)

    def test_tail_map_closed_forms(self):
        assert tail_quad(lambda x: x ** -3.0, 1.0) == pytest.approx(0.5, rel=1e-9)
        assert tail_quad(lambda x: np.exp(-x), 2.0) == pytest.approx(
            math.exp(-2.0), rel=1e-9)
        # slowly decaying power tail
        assert tail_quad(lambda x: x ** -1.5, 4.0) == pytest.approx(
            2.0 / math.sqrt(4.0), rel=1e-8)

    def test_semi_infinite_with_break(self):
        f = lambda x: np.where(x < 2.0, 0.0, x ** -2.0)
        got = semi_infinite_quad(f, 1.0, breakpoints=[2.0])
        assert got == pytest.approx(0.5, rel=1e-8)

    def test_divergent_integral_raises(self):
        with pytest.raises(lc.QuadratureError):
            adaptive_quad(lambda u: 1.0 / u, 0.0, 1.0)

    def test_empty_interval(self):
        assert adaptive_quad(lambda x: x, 1.0, 1.0) == 0.0


class TestTailIntegralRequest:
    def test_validation(self):
        with pytest.raises(ValueError):
            lc.TailIntegralRequest(4, 1.0, outside=True)
        with pytest.raises(ValueError):
            lc.TailIntegralRequest(2, 0.0, outside=True)


class TestTailMass:
    def test_power_tail_examples(self, pareto_model, brownian_model):
        assert lc.tail_mass(pareto_model, 2.0) == pytest.approx(0.125, rel=1e-14)
        # below the support cut the whole measure is in the tail
        assert lc.tail_mass(pareto_model, 0.5) == pytest.approx(1.0, rel=1e-14)
        assert lc.tail_mass(brownian_model, 3.0) == 0.0

    def test_nonincreasing_on_grid(self, all_models):
        ws = np.geomspace(0.05, 500.0, 60)
        for name, model in all_models.items():
            vals = [lc.tail_mass(model, w) for w in ws]
            diffs = np.diff(vals)
            assert np.all(diffs <= 1e-15), name

    @given(w1=st.floats(0.01, 50.0), w2=st.floats(0.01, 50.0))
    @settings(max_examples=60, deadline=None)
    def test_nonincreasing_property(self, w1, w2):
        measure = lc.PowerTail(3.0, 3.0, 1.0, "symmetric")
        lo, hi = min(w1, w2), max(w1, w2)
        assert measure.tail_mass(lo) >= measure.tail_mass(hi)

    def test_closed_vs_quadrature_20_windows(self, pareto_model, kou_model,
                                             mixture_model, logpert3_model):
        ws = np.geomspace(0.2, 200.0, 20)
        for model in (pareto_model, kou_model, mixture_model, logpert3_model):
            for w in ws:
                closed = lc.tail_mass(model, w)
                quad = lc.tail_mass(model, w, method="quadrature")
                assert quad == pytest.approx(closed, rel=1e-6, abs=1e-14)

    def test_x2_outside_closed_vs_quadrature(self, pareto_model, kou_model,
                                             mixture_model):
        # slow-log-tail families are excluded: their x^2 tail mass extends
        # beyond float range and is covered by the log-space identity checks
        ws = np.geomspace(0.2, 200.0, 20)
        for model in (pareto_model, kou_model, mixture_model):
            for w in ws:
                req = lc.TailIntegralRequest(2, float(w), outside=True)
                closed = lc.tail_moment(req, model)
                quad = lc.tail_moment(req, model, method="quadrature")
                assert quad == pytest.approx(closed, rel=1e-6)


class TestTailMoment:
    def test_truncated_third_moment_example(self, pareto_pure_jump):
        req = lc.TailIntegralRequest(3, 2.0, outside=False)
        # int_1^2 3/x dx = 3 ln 2
        assert lc.tail_moment(req, pareto_pure_jump) == pytest.approx(
            3.0 * math.log(2.0), rel=1e-12)

    def test_signed_outside_symmetric_is_zero(self):
        model = lc.build_model(0.0, lc.PowerTail(3.0, 3.0, 1.0, "symmetric"))
        req = lc.TailIntegralRequest(1, 2.0, outside=True, signed=True)
        assert lc.tail_moment(req, model) == 0.0
        # unsigned counterpart is twice one side
        req_abs = lc.TailIntegralRequest(1, 2.0, outside=True)
        assert lc.tail_moment(req_abs, model) == pytest.approx(2 * 3 / 8, rel=1e-12)

    def test_zero_measure(self, brownian_model):
        for outside in (True, False):
            req = lc.TailIntegralRequest(2, 1.0, outside=outside)
            assert lc.tail_moment(req, brownian_model) == 0.0

    def test_divergent_requests(self, pareto_model, logpert3_model):
        req = lc.TailIntegralRequest(3, 2.0, outside=True)
        with pytest.raises(lc.DivergentRequest):
            lc.tail_moment(req, pareto_model)  # int x^3 * 3 x^-4 diverges
        with pytest.raises(lc.DivergentRequest):
            lc.tail_moment(req, logpert3_model)

    def test_chebyshev_domination(self, all_models):
        # w^2 nubar(w) <= int_{|x|>=w} x^2 nu(dx)
        for name, model in all_models.items():
            for w in np.geomspace(0.1, 100.0, 25):
                lhs = w * w * lc.tail_mass(model, float(w))
                rhs = lc.tail_moment(
                    lc.TailIntegralRequest(2, float(w), outside=True), model)
                assert lhs <= rhs * (1 + 1e-12) + 1e-15, (name, w)

    def test_inside_k3_identity_asserted_on_every_evaluation(self, all_models):
        for name, model in all_models.items():
            for w in (1.0, 3.0, 17.0):
                req = lc.TailIntegralRequest(3, w, outside=False)
                lc.tail_moment(req, model)  # raises IdentityViolation if off

    def test_identity_violation_detected(self, pareto_model):
        # a measure whose nubar disagrees with its density must be caught
        class Broken(lc.PowerTail):
            def tail_mass(self, w):
                return 0.5 * super().tail_mass(w)

        model = lc.build_model(1.0, Broken(3.0, 3.0, 1.0, "positive"))
        req = lc.TailIntegralRequest(3, 4.0, outside=False)
        with pytest.raises(lc.IdentityViolation):
            lc.tail_moment(req, model)

    def test_quadrature_matches_closed_inside(self, kou_model, mixture_model):
        for model in (kou_model, mixture_model):
            for k in (0, 1, 2, 3):
                req = lc.TailIntegralRequest(k, 5.0, outside=False)
                closed = lc.tail_moment(req, model)
                quad = lc.tail_moment(req, model, method="quadrature")
                assert quad == pytest.approx(closed, rel=1e-7, abs=1e-12)


class TestEqIIdentities:
    def test_power_tail_all_three_equal_3(self, pareto_pure_jump):
        # e.g. int 2x nubar = int_0^1 2x dx + int_1^inf 2 x^-2 dx = 1 + 2 = 3
        rep = lc.check_I_identities(pareto_pure_jump, 1e-6)
        assert rep.passed
        for v in rep.values:
            assert v == pytest.approx(3.0, rel=1e-6)

    def test_zero_measure_all_zero(self, brownian_model):
        rep = lc.check_I_identities(brownian_model, 1e-6)
        assert rep.passed
        assert rep.values == (0.0, 0.0, 0.0)
        assert rep.max_rel_dev == 0.0

    def test_log_perturbed_self_consistent(self, logpert3_model,
                                           logpert15_model):
        for model, x2 in ((logpert3_model, 0.5), (logpert15_model, 2.0)):
            rep = lc.check_I_identities(model, 1e-6)
            assert rep.passed, rep
            assert rep.values[0] == pytest.approx(x2, rel=1e-12)

    def test_kou_and_mixture(self, kou_model, mixture_model):
        # 2 rate (q eta_p^2 + (1-q) eta_n^2) = 2*2*(0.6*0.64 + 0.4*0.25)
        rep = lc.check_I_identities(kou_model, 1e-6)
        assert rep.passed
        assert rep.values[0] == pytest.approx(1.936, rel=1e-12)
        rep = lc.check_I_identities(mixture_model, 1e-6)
        assert rep.passed

    def test_tolerance_semantics(self, pareto_model):
        rep = lc.check_I_identities(pareto_model, 1e-15)
        assert not rep.passed  # quadrature noise exceeds an absurd tolerance
        assert rep.max_rel_dev > 1e-15
