"""Jitter-scaled system models.

Sampling a system ``(A~, B~)`` with intervals ``ts * (1 + eps_k)`` yields the
same samples as sampling ``((1 + eps_k) A~, (1 + eps_k) B~)`` every ``ts``
(Case A, plant measurement).  Running a design ``(A, B)`` discretized for
``ts`` with jittered intervals behaves like ``(A, B) / (1 + eps_k)`` (Case B,
controller implementation).  For constant jitter the transfer functions are
related by the frequency substitution ``s -> s / (1 + eps)`` (Case A) or
``s -> (1 + eps) s`` (Case B).

``C`` and ``D`` are never touched by jitter.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import as_matrix, as_square, positive_scalar, scalar_fraction
from .errors import AliasingWarning, AssumptionViolationError, RangeViolationError
from .jitter import JitterSequence, validate
from .lti import (ContinuousStateSpace, RationalTransferFunction,
                  TimeVaryingStateSpace, _recover)

__all__ = [
    "PidParams", "LpvRealization",
    "perceive_case_a", "effective_case_b", "scale_tf", "lpv_realize",
    "pid_under_jitter", "pid_transfer_function", "percent_changes",
    "recover_perceived_from_data", "wrap_frequency",
]


def _epsilons(seq):
    if isinstance(seq, JitterSequence):
        return seq.epsilons
    eps = np.atleast_1d(np.asarray(seq, dtype=float))
    validate(eps, "permissive")
    return eps


def _check_fraction(eps):
    eps = scalar_fraction(eps)
    if not eps > -1.0:
        raise AssumptionViolationError(f"jitter fraction must be > -1, got {eps!r}")
    return eps


def perceive_case_a(true_sys, seq):
    """Perceived per-sample system ``A_k = (1 + eps_k) A~``, ``B_k = (1 + eps_k) B~``.

    Parameters
    ----------
    true_sys : ContinuousStateSpace
        The actual plant ``(A~, B~, C, D)``.
    seq : JitterSequence or array_like
        Jitter fractions, one per sample.

    Returns
    -------
    TimeVaryingStateSpace
        One ``(A_k, B_k)`` per sample; discretizing sample ``k`` at the nominal
        period reproduces the jittered discretization of ``true_sys``.
    """
    eps = _epsilons(seq)
    factors = 1.0 + eps
    return TimeVaryingStateSpace(
        tuple(f * true_sys.A for f in factors),
        tuple(f * true_sys.B for f in factors),
        true_sys.C, true_sys.D)


def effective_case_b(designed_sys, seq):
    """Effective per-sample system ``A / (1 + eps_k)``, ``B / (1 + eps_k)``."""
    eps = _epsilons(seq)
    factors = 1.0 + eps
    return TimeVaryingStateSpace(
        tuple(designed_sys.A / f for f in factors),
        tuple(designed_sys.B / f for f in factors),
        designed_sys.C, designed_sys.D)


def _substitute(coeffs, factor):
    # p(s) -> p(factor * s): coefficient of s^j gains factor^j.
    powers = np.arange(coeffs.size - 1, -1, -1)
    return coeffs * factor ** powers


def scale_tf(tf, eps, case="a"):
    """Frequency-scaled transfer function for constant jitter ``eps``.

    ``case="a"`` gives the perceived ``H(s) = H~(s / (1 + eps))``;
    ``case="b"`` gives the effective ``H~(s) = H((1 + eps) s)``.  The result
    is normalized to a monic denominator.  The DC value is unchanged.

    Only a scalar ``eps`` is accepted; there is no per-sample frequency
    interpretation of time-varying jitter.
    """
    eps = _check_fraction(eps)
    case = str(case).lower()
    if case == "a":
        factor = 1.0 / (1.0 + eps)
    elif case == "b":
        factor = 1.0 + eps
    else:
        raise ValueError(f"case must be 'a' or 'b', got {case!r}")
    return RationalTransferFunction(_substitute(tf.num, factor),
                                    _substitute(tf.den, factor)).monic()


@dataclass(frozen=True, eq=False)
class LpvRealization:
    """``A(eps) = (1 + eps) A``, ``B(eps) = (1 + eps) B`` with fixed ``C``, ``D``.

    ``eps`` is admitted on the open interval ``(lo, hi)``.
    """

    base: ContinuousStateSpace
    lo: float = -1.0
    hi: float = 1.0

    @property
    def range(self):
        return (self.lo, self.hi)

    def evaluate(self, eps):
        eps = scalar_fraction(eps)
        if eps == 0.0:
            return self.base
        if not self.lo < eps < self.hi:
            raise RangeViolationError(
                f"scheduling parameter {eps!r} outside ({self.lo}, {self.hi})")
        return self.base.scaled(1.0 + eps)

    __call__ = evaluate

    def matrices(self, eps):
        sys = self.evaluate(eps)
        return sys.A, sys.B, sys.C, sys.D

    def affine_terms(self):
        """``(A0, A1, B0, B1)`` with ``A(eps) = A0 + eps * A1`` (and likewise B)."""
        return self.base.A, self.base.A, self.base.B, self.base.B


def lpv_realize(sys, range=(-1.0, 1.0)):  # noqa: A002  (public keyword)
    """LPV model scheduled on the measured jitter fraction."""
    lo, hi = (float(v) for v in range)
    if not (lo >= -1.0 and hi > lo) or math.isnan(lo) or math.isnan(hi):
        raise RangeViolationError(
            f"LPV range must satisfy -1 <= lo < hi, got ({lo}, {hi})")
    if not lo < 0.0 < hi:
        # eps = 0 (no jitter) should always be representable
        raise RangeViolationError(f"LPV range ({lo}, {hi}) must contain 0")
    return LpvRealization(sys, lo, hi)


@dataclass(frozen=True)
class PidParams:
    """``C(s) = kp + ki / s + kd s / (tau_d s + 1)``."""

    kp: float
    ki: float
    kd: float
    tau_d: float

    def __post_init__(self):
        for name in ("kp", "ki", "kd", "tau_d"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if not self.tau_d > 0:
            raise ValueError(f"tau_d must be > 0, got {self.tau_d!r}")

    def as_dict(self):
        return {"kp": self.kp, "ki": self.ki, "kd": self.kd, "tau_d": self.tau_d}


def pid_under_jitter(pid, eps):
    """Effective PID parameters when the controller runs with constant jitter.

    ``kp`` is unchanged, ``ki -> ki / (1 + eps)``, ``kd -> kd (1 + eps)`` and
    ``tau_d -> tau_d (1 + eps)``.
    """
    eps = _check_fraction(eps)
    f = 1.0 + eps
    return PidParams(kp=pid.kp, ki=pid.ki / f, kd=pid.kd * f, tau_d=pid.tau_d * f)


def pid_transfer_function(pid):
    """PID law over the common denominator ``s (tau_d s + 1)``."""
    t = pid.tau_d
    num = [pid.kp * t + pid.kd, pid.kp + pid.ki * t, pid.ki]
    den = [t, 1.0, 0.0]
    return RationalTransferFunction(num, den).monic()


def percent_changes(nominal, effective):
    """Relative change of every PID parameter in percent (``nan`` for a zero gain)."""
    out = {}
    for name, before in nominal.as_dict().items():
        after = getattr(effective, name)
        out[name] = math.nan if before == 0 else 100.0 * (after - before) / before
    return out


def wrap_frequency(omega, dt):
    """Frequency that a pole at ``j omega`` appears at after principal-branch recovery."""
    dt = positive_scalar(dt, "dt")
    phase = omega * dt
    wrapped = phase - 2.0 * math.pi * math.floor((phase + math.pi) / (2.0 * math.pi))
    if wrapped == -math.pi:
        wrapped = math.pi
    return wrapped / dt


def recover_perceived_from_data(A_d_measured, B_d_measured, ts, omega_hint=None):
    """Continuous ``(A, B)`` perceived from a discretization recorded under jitter.

    Treats the measured ``(A_d, B_d)`` as if taken at the nominal ``ts``.  The
    result is the product ``(1 + eps) A~`` (and ``(1 + eps) B~``); ``eps`` and
    ``A~`` cannot be separated from one sample.

    Parameters
    ----------
    A_d_measured, B_d_measured : array_like
        Discrete matrices identified from data.
    ts : float
        Nominal sampling period.
    omega_hint : float, optional
        Known bound on the perceived oscillation frequency ``|Im(lambda)|``.  If
        ``omega_hint * ts > pi`` the recovered poles are folded into the
        principal branch and an :class:`AliasingWarning` is emitted.

    Raises
    ------
    AliasingRiskError
        Recovered poles sit on the branch boundary.
    """
    ts = positive_scalar(ts, "ts")
    A_d = as_square(A_d_measured, "A_d_measured")
    B_d = as_matrix(B_d_measured, "B_d_measured")
    A, B = _recover(A_d, B_d, ts)
    if omega_hint is not None and omega_hint * ts > math.pi:
        warnings.warn(
            f"omega_hint*ts = {omega_hint * ts:.6g} > pi: oscillation at {omega_hint:.6g} rad/s "
            f"is recovered at {abs(wrap_frequency(omega_hint, ts)):.6g} rad/s",
            AliasingWarning, stacklevel=2)
    return A, B
