import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jitterscale.analysis import (PidParams, effective_case_b, lpv_realize, percent_changes,
                                  perceive_case_a, pid_transfer_function, pid_under_jitter,
                                  recover_perceived_from_data, scale_tf)
from jitterscale.errors import (AliasingWarning, AssumptionViolationError,
                                RangeViolationError)
from jitterscale.jitter import JitterSequence
from jitterscale.lti import (ContinuousStateSpace, RationalTransferFunction, c2d,
                             freq_response, ss2tf)
from jitterscale.matfun import discretize_pair, expm
from jitterscale.testing import compliant_ts, random_stable_system

from conftest import rel_fro


def first_order(a=2.0):
    return ContinuousStateSpace([[-a]], [[1.0]], [[1.0]], [[0.0]])


class TestCaseA:
    def test_first_order_pole(self):
        tv = perceive_case_a(first_order(2.0), [0.1])
        assert tv.As[0][0, 0] == pytest.approx(-2.2, rel=1e-15)
        assert tv.Bs[0][0, 0] == pytest.approx(1.1, rel=1e-15)

    def test_zero_jitter_identity(self, rng):
        sys = random_stable_system(rng, 3)
        tv = perceive_case_a(sys, JitterSequence([0.0, 0.0]))
        for k in range(2):
            np.testing.assert_array_equal(tv.As[k], sys.A)
            np.testing.assert_array_equal(tv.Bs[k], sys.B)

    def test_discretization_equality(self, rng):
        sys = random_stable_system(rng, 3, m=2)
        ts = 0.07
        tv = perceive_case_a(sys, [0.25] * 3)
        ref = c2d(sys, ts * 1.25)
        for k in range(3):
            d = c2d(tv[k], ts)
            assert rel_fro(d.A_d, ref.A_d) < 1e-11
            assert rel_fro(d.B_d, ref.B_d) < 1e-11

    def test_c_d_untouched(self, rng):
        sys = random_stable_system(rng, 2, p=2)
        tv = perceive_case_a(sys, [0.3])
        np.testing.assert_array_equal(tv.C, sys.C)
        np.testing.assert_array_equal(tv.D, sys.D)

    def test_rejects_invalid_jitter(self):
        with pytest.raises(AssumptionViolationError):
            perceive_case_a(first_order(), [0.1, -1.0])

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), eps=st.floats(-0.9, 2.0))
    def test_eigenvalues_scale(self, seed, eps):
        rng = np.random.default_rng(seed)
        sys = random_stable_system(rng, int(rng.integers(1, 7)))
        A_k = perceive_case_a(sys, [eps]).As[0]
        got = np.sort_complex(np.linalg.eigvals(A_k))
        want = np.sort_complex((1 + eps) * np.linalg.eigvals(sys.A))
        assert np.max(np.abs(got - want)) <= 1e-9 * np.max(np.abs(want))


class TestCaseB:
    def test_scalar(self):
        tv = effective_case_b(ContinuousStateSpace([[-1.0]], [[1.0]], [[1.0]], [[0.0]]), [0.1])
        assert tv.As[0][0, 0] == pytest.approx(-0.9090909090909091, rel=1e-15)

    def test_zero_identity(self, rng):
        sys = random_stable_system(rng, 3)
        np.testing.assert_array_equal(effective_case_b(sys, [0.0]).As[0], sys.A)

    def test_inverse_of_case_a(self, rng):
        sys = random_stable_system(rng, 4, m=2)
        eps = np.array([-0.5, -0.1, 0.0, 0.3, 1.7])
        eff = effective_case_b(sys, eps)
        for k, e in enumerate(eps):
            back = perceive_case_a(eff[k], [e])[0]
            assert rel_fro(back.A, sys.A) < 1e-12
            assert rel_fro(back.B, sys.B) < 1e-12


class TestDefiningIdentities:
    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), eps=st.floats(-0.9, 2.0))
    def test_case_a_scaled_matrices_match_jittered(self, seed, eps):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 7))
        A = rng.standard_normal((n, n))
        A *= rng.uniform(0.1, 10.0) / np.linalg.norm(A)
        ts = 0.1
        lhs = expm(A * (ts * (1 + eps)))
        rhs = expm(((1 + eps) * A) * ts)
        assert rel_fro(lhs, rhs) < 1e-11

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), eps=st.floats(-0.9, 2.0))
    def test_case_b_scaled_matrices_match_jittered(self, seed, eps):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 7))
        A = rng.standard_normal((n, n))
        A *= rng.uniform(0.1, 10.0) / np.linalg.norm(A)
        B = rng.standard_normal((n, 2))
        ts = 0.1
        _, lhs = discretize_pair(A, B, ts * (1 + eps))
        _, rhs = discretize_pair((1 + eps) * A, (1 + eps) * B, ts)
        assert rel_fro(lhs, rhs) < 1e-10


class TestScaleTf:
    def test_first_order_case_a(self):
        tf = scale_tf(RationalTransferFunction([1.0], [1.0, 2.0]), 0.1, "a")
        np.testing.assert_allclose(tf.num, [1.1], rtol=1e-15)
        np.testing.assert_allclose(tf.den, [1.0, 2.2], rtol=1e-15)

    def test_dc_gain_kept(self):
        tf = RationalTransferFunction([1.0], [1.0, 2.0])
        assert scale_tf(tf, 0.1).dc_gain() == pytest.approx(0.5, rel=1e-15)

    def test_zero_jitter(self, rng):
        tf = ss2tf(random_stable_system(rng, 4))
        out = scale_tf(tf, 0.0)
        np.testing.assert_array_equal(out.num, tf.num)
        np.testing.assert_array_equal(out.den, tf.den)

    def test_case_b_inverts_case_a(self, rng):
        tf = ss2tf(random_stable_system(rng, 5))
        back = scale_tf(scale_tf(tf, 0.3, "a"), 0.3, "b")
        np.testing.assert_allclose(back.num, tf.num, rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(back.den, tf.den, rtol=1e-12)

    def test_matches_scaled_state_space(self, rng):
        sys = random_stable_system(rng, 4)
        eps = 0.2
        direct = ss2tf(perceive_case_a(sys, [eps])[0])
        scaled = scale_tf(ss2tf(sys), eps)
        np.testing.assert_allclose(scaled.den, direct.den, rtol=1e-10)
        np.testing.assert_allclose(scaled.num, direct.num, rtol=1e-9, atol=1e-12)

    def test_rejects_sequences(self):
        with pytest.raises(TypeError):
            scale_tf(RationalTransferFunction([1], [1, 1]), [0.1, 0.2])

    def test_rejects_eps_below_minus_one(self):
        with pytest.raises(AssumptionViolationError):
            scale_tf(RationalTransferFunction([1], [1, 1]), -1.0)

    @pytest.mark.parametrize("seed", range(10))
    def test_pointwise_frequency(self, seed):
        rng = np.random.default_rng(seed)
        tf = ss2tf(random_stable_system(rng, int(rng.integers(1, 7))))
        eps = rng.uniform(-0.8, 2.0)
        w = np.logspace(-2, 2, 100)
        got = freq_response(scale_tf(tf, eps), w)
        want = freq_response(tf, w / (1 + eps))
        assert np.max(np.abs(got - want) / np.abs(want)) < 1e-10

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), eps=st.floats(-0.99, 50.0))
    def test_dc_invariance(self, seed, eps):
        tf = ss2tf(random_stable_system(np.random.default_rng(seed), 3))
        assert scale_tf(tf, eps).dc_gain() == pytest.approx(tf.dc_gain(), rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), e1=st.floats(-0.7, 1.5), e2=st.floats(-0.7, 1.5))
    def test_composition(self, seed, e1, e2):
        tf = ss2tf(random_stable_system(np.random.default_rng(seed), 3))
        twice = scale_tf(scale_tf(tf, e1), e2)
        once = scale_tf(tf, (1 + e1) * (1 + e2) - 1)
        np.testing.assert_allclose(twice.den, once.den, rtol=1e-10)
        np.testing.assert_allclose(twice.num, once.num, rtol=1e-10, atol=1e-10 * np.max(np.abs(once.num)))


class TestLpv:
    def test_zero_returns_base(self, rng):
        sys = random_stable_system(rng, 3)
        assert lpv_realize(sys).evaluate(0.0) is sys

    def test_affine_rule(self, rng):
        sys = random_stable_system(rng, 3)
        out = lpv_realize(sys)(0.5)
        np.testing.assert_array_equal(out.A, 1.5 * sys.A)
        np.testing.assert_array_equal(out.B, 1.5 * sys.B)
        np.testing.assert_array_equal(out.C, sys.C)

    def test_matches_case_a_exactly(self, rng):
        sys = random_stable_system(rng, 4, m=2)
        lpv = lpv_realize(sys)
        for eps in rng.uniform(-0.9, 0.9, size=100):
            a = lpv.evaluate(eps)
            b = perceive_case_a(sys, [eps])[0]
            np.testing.assert_array_equal(a.A, b.A)
            np.testing.assert_array_equal(a.B, b.B)

    def test_out_of_range(self, rng):
        lpv = lpv_realize(random_stable_system(rng, 2))
        with pytest.raises(RangeViolationError):
            lpv.evaluate(1.0)
        with pytest.raises(RangeViolationError):
            lpv.evaluate(-1.0)

    @pytest.mark.parametrize("rng_range", [(-1.5, 0.5), (0.2, 0.1), (0.1, 0.5)])
    def test_bad_range(self, rng_range):
        with pytest.raises(RangeViolationError):
            lpv_realize(first_order(), rng_range)

    def test_wide_range_allowed(self):
        lpv = lpv_realize(first_order(), (-0.5, 3.0))
        assert lpv.evaluate(2.0).A[0, 0] == -6.0

    def test_affine_terms(self):
        A0, A1, B0, B1 = lpv_realize(first_order()).affine_terms()
        assert A0[0, 0] + 0.5 * A1[0, 0] == -3.0


class TestPid:
    def test_substitution(self):
        out = pid_under_jitter(PidParams(2.0, 1.0, 0.5, 0.1), 0.1)
        assert out.kp == 2.0
        assert out.ki == pytest.approx(0.9090909090909091, rel=1e-15)
        assert out.kd == pytest.approx(0.55, rel=1e-15)
        assert out.tau_d == pytest.approx(0.11, rel=1e-15)

    def test_zero(self):
        pid = PidParams(2.0, 1.0, 0.5, 0.1)
        assert pid_under_jitter(pid, 0.0) == pid

    def test_ten_percent(self):
        ch = percent_changes(PidParams(1, 1, 1, 1), pid_under_jitter(PidParams(1, 1, 1, 1), 0.1))
        assert abs(ch["ki"]) == pytest.approx(9.0909, abs=1e-3)
        assert ch["kd"] == pytest.approx(10.0, abs=1e-9)
        assert ch["kp"] == 0.0

    def test_matches_frequency_substitution(self):
        # effective controller equals C((1 + eps) s)
        pid = PidParams(2.0, 1.0, 0.5, 0.1)
        eps = 0.15
        eff = pid_transfer_function(pid_under_jitter(pid, eps))
        sub = scale_tf(pid_transfer_function(pid), eps, "b")
        np.testing.assert_allclose(eff.num, sub.num, rtol=1e-14)
        np.testing.assert_allclose(eff.den, sub.den, rtol=1e-14, atol=1e-15)

    def test_tf_matches_formula(self):
        pid = PidParams(2.0, 1.0, 0.5, 0.1)
        s = 0.3 + 2.0j
        want = pid.kp + pid.ki / s + pid.kd * s / (pid.tau_d * s + 1)
        assert pid_transfer_function(pid)(s) == pytest.approx(want, rel=1e-14)

    def test_tau_positive(self):
        with pytest.raises(ValueError):
            PidParams(1, 1, 1, 0.0)


def wrap_oracle(omega, ts):
    # explicit +/- 2 pi folding of omega * ts into (-pi, pi]
    phase = omega * ts
    while phase > math.pi:
        phase -= 2 * math.pi
    while phase <= -math.pi:
        phase += 2 * math.pi
    return phase / ts


class TestRecoverFromData:
    def test_first_order_jitter(self):
        ts, eps = 0.1, 0.2
        d = c2d(ContinuousStateSpace([[-1.0]], [[1.0]], [[1.0]], [[0.0]]), ts * (1 + eps))
        A, B = recover_perceived_from_data(d.A_d, d.B_d, ts)
        assert A[0, 0] == pytest.approx(-1.2, abs=1e-10)
        assert B[0, 0] == pytest.approx(1.2, abs=1e-10)

    def test_no_jitter_round_trip(self, rng):
        sys = random_stable_system(rng, 4, m=2)
        ts = compliant_ts(sys, rng)
        d = c2d(sys, ts)
        A, B = recover_perceived_from_data(d.A_d, d.B_d, ts)
        assert rel_fro(A, sys.A) < 1e-9
        assert rel_fro(B, sys.B) < 1e-9

    def test_aliasing_folds_and_is_flagged(self):
        omega, ts, eps = 25.0, 0.1, 0.3
        assert omega * ts * (1 + eps) > math.pi
        A_true = np.array([[-0.5, omega], [-omega, -0.5]])
        d = c2d(ContinuousStateSpace(A_true, [[0.0], [1.0]], [[1.0, 0.0]], [[0.0]]),
                ts * (1 + eps))
        with pytest.warns(AliasingWarning):
            A, _ = recover_perceived_from_data(d.A_d, d.B_d, ts, omega_hint=(1 + eps) * omega)
        imag = np.sort(np.linalg.eigvals(A).imag)
        w = abs(wrap_oracle((1 + eps) * omega, ts))
        np.testing.assert_allclose(imag, [-w, w], rtol=1e-9)
        assert not np.isclose(w, (1 + eps) * omega)

    def test_no_warning_inside_branch(self):
        d = c2d(first_order(), 0.1)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            recover_perceived_from_data(d.A_d, d.B_d, 0.1, omega_hint=10.0)
