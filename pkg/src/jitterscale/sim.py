"""Sample-by-sample simulation with zero-order-hold inputs.

Input signals are indexed by sample number, not by wall-clock time: the
sinusoid ``sin(2 pi f k ts)`` is evaluated on the nominal clock ``k * ts``.
This is what makes a jittered run and its nominal-period counterpart see the
same input sequence ``u_k``.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import matfun
from ._validation import as_vector, positive_scalar
from .analysis import perceive_case_a
from .errors import DimensionMismatchError, SamplingWarning
from .jitter import JitterSequence, effective_timesteps
from .lti import ContinuousStateSpace, TimeVaryingStateSpace

__all__ = [
    "InputSignal", "SampledTrajectory",
    "simulate_discrete", "simulate_jittered", "ode_oracle",
    "verify_equivalence", "relative_error", "DEFAULT_SUBSTEPS",
]

DEFAULT_SUBSTEPS = 200
_KINDS = ("step", "pulse", "sin", "explicit", "zero")


@dataclass(frozen=True, eq=False)
class InputSignal:
    """ZOH input description.

    kind : ``"step"`` (constant ``amplitude``), ``"pulse"`` (``amplitude`` on
    the first sample only), ``"sin"`` (``amplitude * sin(2 pi freq k ts)``),
    ``"zero"`` or ``"explicit"`` (``samples`` with shape ``(N,)`` or ``(N, m)``).
    """

    kind: str = "step"
    amplitude: float = 1.0
    freq: float = 1.0
    phase: float = 0.0
    samples: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown input kind {self.kind!r}; expected one of {_KINDS}")
        if self.kind == "explicit":
            if self.samples is None:
                raise ValueError("explicit input needs samples")
            arr = np.asarray(self.samples, dtype=float)
            if arr.ndim == 1:
                arr = arr[:, None]
            if arr.ndim != 2 or not np.all(np.isfinite(arr)):
                raise ValueError("explicit samples must be a finite (N,) or (N, m) array")
            object.__setattr__(self, "samples", arr)

    @classmethod
    def step(cls, amplitude=1.0):
        return cls("step", amplitude=amplitude)

    @classmethod
    def pulse(cls, amplitude=1.0):
        return cls("pulse", amplitude=amplitude)

    @classmethod
    def sinusoid(cls, freq, amplitude=1.0, phase=0.0):
        return cls("sin", amplitude=amplitude, freq=freq, phase=phase)

    @classmethod
    def explicit(cls, samples):
        return cls("explicit", samples=samples)

    def sample(self, n, m, ts):
        """Input samples ``u_0 .. u_{n-1}`` as an ``(n, m)`` array."""
        k = np.arange(n)
        if self.kind == "step":
            return np.full((n, m), float(self.amplitude))
        if self.kind == "zero":
            return np.zeros((n, m))
        if self.kind == "pulse":
            u = np.zeros((n, m))
            u[0] = self.amplitude
            return u
        if self.kind == "sin":
            col = self.amplitude * np.sin(2.0 * math.pi * self.freq * k * ts + self.phase)
            return np.repeat(col[:, None], m, axis=1)
        arr = self.samples
        if arr.shape[1] != m:
            raise DimensionMismatchError(
                f"explicit input has {arr.shape[1]} channels, system has {m} inputs")
        if arr.shape[0] > n:
            raise DimensionMismatchError(
                f"explicit input has {arr.shape[0]} samples, horizon is {n}")
        if arr.shape[0] < n:
            warnings.warn(f"input has {arr.shape[0]} samples, zero-padding to {n}",
                          SamplingWarning, stacklevel=3)
            arr = np.vstack([arr, np.zeros((n - arr.shape[0], m))])
        return arr.copy()


@dataclass(frozen=True, eq=False)
class SampledTrajectory:
    """Aligned samples ``(t_k, u_k, x_k, y_k)`` for ``k = 0 .. N-1``.

    ``final_state`` is ``x_N``, the state at the end of the last interval.
    """

    times: np.ndarray
    inputs: np.ndarray
    states: np.ndarray
    outputs: np.ndarray
    final_state: np.ndarray

    def __post_init__(self):
        lengths = {len(self.times), len(self.inputs), len(self.states), len(self.outputs)}
        if len(lengths) != 1:
            raise DimensionMismatchError("trajectory arrays must have equal length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("trajectory times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    def header(self):
        m, n, p = self.inputs.shape[1], self.states.shape[1], self.outputs.shape[1]
        return (["k", "t"] + [f"u{i}" for i in range(m)]
                + [f"x{i}" for i in range(n)] + [f"y{i}" for i in range(p)])

    def to_csv(self):
        """CSV text with every float written at 17 significant digits."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header())
        for k in range(len(self)):
            row = [str(k), format(self.times[k], ".17g")]
            row += [format(v, ".17g") for v in self.inputs[k]]
            row += [format(v, ".17g") for v in self.states[k]]
            row += [format(v, ".17g") for v in self.outputs[k]]
            writer.writerow(row)
        return buf.getvalue()

    def to_dict(self):
        return {"times": self.times.tolist(), "inputs": self.inputs.tolist(),
                "states": self.states.tolist(), "outputs": self.outputs.tolist(),
                "final_state": self.final_state.tolist()}


def _system_at(sys, k):
    if isinstance(sys, TimeVaryingStateSpace):
        return sys.As[k], sys.Bs[k]
    return sys.A, sys.B


def _prepare(sys, dts, u, x0, ts_nominal):
    dts = np.atleast_1d(np.asarray(dts, dtype=float))
    if dts.ndim != 1 or dts.size < 1:
        raise ValueError("dts must hold at least one timestep")
    if not np.all(np.isfinite(dts)) or np.any(dts <= 0):
        raise ValueError("every timestep must be finite and > 0")
    if isinstance(sys, TimeVaryingStateSpace) and len(sys) != dts.size:
        raise DimensionMismatchError(
            f"time-varying system has {len(sys)} samples but {dts.size} timesteps given")
    n, m = sys.n_states, sys.n_inputs
    N = dts.size
    if ts_nominal is None:
        ts_nominal = float(np.mean(dts))
    if isinstance(u, InputSignal):
        U = u.sample(N, m, ts_nominal)
    else:
        U = np.asarray(u, dtype=float)
        if U.ndim == 1:
            U = U[:, None]
        if U.shape != (N, m):
            raise DimensionMismatchError(f"input samples must have shape {(N, m)}, got {U.shape}")
    x0 = as_vector(np.zeros(n) if x0 is None else x0, n, "x0")
    return dts, U, x0


def simulate_discrete(sys, dts, u, x0=None, ts_nominal=None):
    """Exact ZOH recursion, rediscretizing ``(A_k, B_k)`` over ``dts[k]``.

    Parameters
    ----------
    sys : ContinuousStateSpace or TimeVaryingStateSpace
        A time-varying system needs one entry per timestep.
    dts : array_like
        Interval lengths; ``times`` are their cumulative sums from 0.
    u : InputSignal or array_like
        Input; an array must have shape ``(N,)`` or ``(N, m)``.
    x0 : array_like, optional
        Initial state (zeros by default).
    ts_nominal : float, optional
        Clock used to evaluate a sinusoidal ``InputSignal``; defaults to the
        mean timestep.
    """
    dts, U, x = _prepare(sys, dts, u, x0, ts_nominal)
    N = dts.size
    C, D = sys.C, sys.D
    X = np.empty((N, x.size))
    cache_key, Ad, Bd = None, None, None
    for k in range(N):
        A, B = _system_at(sys, k)
        key = (id(A), id(B), dts[k])
        if key != cache_key:
            Ad, Bd = matfun.discretize_pair(A, B, dts[k])
            cache_key = key
        X[k] = x
        x = Ad @ x + Bd @ U[k]
    Y = X @ C.T + U @ D.T
    times = np.concatenate([[0.0], np.cumsum(dts)[:-1]])
    return SampledTrajectory(times, U, X, Y, x)


def simulate_jittered(true_sys, ts, seq, u, x0=None):
    """Simulate ``true_sys`` with intervals ``ts * (1 + eps_k)``.

    The horizon is ``len(seq)``; ``times`` are the actual jittered instants.
    """
    ts = positive_scalar(ts, "ts")
    dts = effective_timesteps(seq, ts)
    return simulate_discrete(true_sys, dts, u, x0, ts_nominal=ts)


def _rk4_fixed(A, Bu, x, h, steps):
    for _ in range(steps):
        k1 = A @ x + Bu
        k2 = A @ (x + 0.5 * h * k1) + Bu
        k3 = A @ (x + 0.5 * h * k2) + Bu
        k4 = A @ (x + h * k3) + Bu
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x


def ode_oracle(sys, dts, u_samples, x0=None, substeps=DEFAULT_SUBSTEPS):
    """Classical RK4 reference with ``substeps`` fixed steps per sample.

    Independent of the matrix exponential; the input is held at ``u_k`` over
    each interval exactly as in the exact recursion.
    """
    if int(substeps) != substeps or substeps < 10:
        raise ValueError(f"substeps must be an integer >= 10, got {substeps!r}")
    substeps = int(substeps)
    dts, U, x = _prepare(sys, dts, u_samples, x0, None)
    N = dts.size
    X = np.empty((N, x.size))
    for k in range(N):
        A, B = _system_at(sys, k)
        X[k] = x
        x = _rk4_fixed(A, B @ U[k], x, dts[k] / substeps, substeps)
    Y = X @ sys.C.T + U @ sys.D.T
    times = np.concatenate([[0.0], np.cumsum(dts)[:-1]])
    return SampledTrajectory(times, U, X, Y, x)


def relative_error(a, b):
    """``max |a - b| / max(1, |a|, |b|)`` elementwise."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / scale))


def verify_equivalence(true_sys, ts, seq, u, x0=None, return_trajectories=False):
    """Max relative output mismatch between the jittered plant and its
    perceived system run at the nominal period.

    The two trajectories live on different time axes; they are compared
    sample by sample.
    """
    ts = positive_scalar(ts, "ts")
    jittered = simulate_jittered(true_sys, ts, seq, u, x0)
    perceived_sys = perceive_case_a(true_sys, seq)
    nominal = simulate_discrete(perceived_sys, np.full(len(perceived_sys), ts), u, x0,
                                ts_nominal=ts)
    err = relative_error(jittered.outputs, nominal.outputs)
    if return_trajectories:
        return err, jittered, nominal
    return err
