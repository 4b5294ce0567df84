"""State-space and transfer-function representations, c2d/d2c, sampling checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import matfun
from ._validation import as_matrix, as_square, positive_scalar
from .errors import (AliasingRiskError, DimensionMismatchError,
                     IllConditionedIntegralError, NotSisoError, PoleOnAxisError)

__all__ = [
    "ContinuousStateSpace", "TimeVaryingStateSpace", "DiscreteStateSpace",
    "SamplingSpec", "RationalTransferFunction",
    "c2d", "d2c", "ss2tf", "freq_response", "validate_sampling",
    "ALIASING_MARGIN", "INTEGRAL_COND_LIMIT", "FRAGILITY_FRACTION",
]

# |Im(lambda)| * dt beyond pi * (1 - ALIASING_MARGIN) is treated as ambiguous.
ALIASING_MARGIN = 1e-9
INTEGRAL_COND_LIMIT = 1e12
FRAGILITY_FRACTION = 0.99
# Round-off slack on the ts <= pi / omega_max comparison.
_COMPLIANCE_RTOL = 1e-12
FADDEEV_MAX_ORDER = 20


def _check_blocks(A, B, C, D):
    n = A.shape[0]
    if B.shape[0] != n:
        raise DimensionMismatchError(f"B must have {n} rows, got {B.shape[0]}")
    if C.shape[1] != n:
        raise DimensionMismatchError(f"C must have {n} columns, got {C.shape[1]}")
    if D.shape != (C.shape[0], B.shape[1]):
        raise DimensionMismatchError(
            f"D must have shape {(C.shape[0], B.shape[1])}, got {D.shape}")


@dataclass(frozen=True, eq=False)
class ContinuousStateSpace:
    """``x' = A x + B u``, ``y = C x + D u``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = as_square(self.A, "A")
        B = as_matrix(self.B, "B")
        C = as_matrix(self.C, "C")
        D = as_matrix(self.D, "D")
        _check_blocks(A, B, C, D)
        for name, val in zip("ABCD", (A, B, C, D)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def n_states(self):
        return self.A.shape[0]

    @property
    def n_inputs(self):
        return self.B.shape[1]

    @property
    def n_outputs(self):
        return self.C.shape[0]

    @property
    def is_siso(self):
        return self.n_inputs == 1 and self.n_outputs == 1

    def poles(self):
        return np.linalg.eigvals(self.A)

    def evaluate(self, s):
        """``C (sI - A)^{-1} B + D`` at one complex point."""
        n = self.n_states
        return self.C @ np.linalg.solve(s * np.eye(n) - self.A, self.B) + self.D

    def scaled(self, factor):
        """Copy with ``A`` and ``B`` multiplied by ``factor``; C, D shared."""
        factor = float(factor)
        return ContinuousStateSpace(factor * self.A, factor * self.B, self.C, self.D)

    def to_dict(self):
        return {"A": self.A.tolist(), "B": self.B.tolist(),
                "C": self.C.tolist(), "D": self.D.tolist()}

    def __repr__(self):
        return (f"ContinuousStateSpace(n_states={self.n_states}, "
                f"n_inputs={self.n_inputs}, n_outputs={self.n_outputs})")


@dataclass(frozen=True, eq=False)
class TimeVaryingStateSpace:
    """Per-sample ``(A_k, B_k)`` pairs sharing one ``C`` and ``D``."""

    As: tuple
    Bs: tuple
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        if len(self.As) < 1 or len(self.As) != len(self.Bs):
            raise DimensionMismatchError(
                "need at least one sample and equally many A_k and B_k")
        C = as_matrix(self.C, "C")
        D = as_matrix(self.D, "D")
        As, Bs = [], []
        for k, (A, B) in enumerate(zip(self.As, self.Bs)):
            A = as_square(A, f"A[{k}]")
            B = as_matrix(B, f"B[{k}]")
            _check_blocks(A, B, C, D)
            A.setflags(write=False)
            B.setflags(write=False)
            As.append(A)
            Bs.append(B)
        C.setflags(write=False)
        D.setflags(write=False)
        object.__setattr__(self, "As", tuple(As))
        object.__setattr__(self, "Bs", tuple(Bs))
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

    def __len__(self):
        return len(self.As)

    def __getitem__(self, k):
        return ContinuousStateSpace(self.As[k], self.Bs[k], self.C, self.D)

    def __iter__(self):
        return (self[k] for k in range(len(self)))

    @property
    def n_states(self):
        return self.C.shape[1]

    @property
    def n_inputs(self):
        return self.D.shape[1]

    @property
    def n_outputs(self):
        return self.C.shape[0]

    def to_dict(self):
        return {"systems": [{"A": A.tolist(), "B": B.tolist()}
                            for A, B in zip(self.As, self.Bs)],
                "C": self.C.tolist(), "D": self.D.tolist()}


@dataclass(frozen=True, eq=False)
class DiscreteStateSpace:
    """``x[k+1] = A_d x[k] + B_d u[k]``, ``y[k] = C x[k] + D u[k]``."""

    A_d: np.ndarray
    B_d: np.ndarray
    C: np.ndarray
    D: np.ndarray
    dt: float

    def __post_init__(self):
        A = as_square(self.A_d, "A_d")
        B = as_matrix(self.B_d, "B_d")
        C = as_matrix(self.C, "C")
        D = as_matrix(self.D, "D")
        _check_blocks(A, B, C, D)
        for name, val in zip(("A_d", "B_d", "C", "D"), (A, B, C, D)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "dt", positive_scalar(self.dt, "dt"))

    @property
    def n_states(self):
        return self.A_d.shape[0]

    def to_dict(self):
        return {"A_d": self.A_d.tolist(), "B_d": self.B_d.tolist(),
                "C": self.C.tolist(), "D": self.D.tolist(), "dt": self.dt}


@dataclass(frozen=True)
class SamplingSpec:
    """Result of checking ``ts <= pi / omega_max``.

    ``omega_max`` is the largest ``|Im(lambda)|`` of the system poles; a
    system without oscillatory poles is compliant for every ``ts``.
    """

    ts: float
    omega_max: float
    compliant: bool
    warnings: tuple = field(default=())

    @property
    def max_ts(self):
        """Largest compliant sampling period (``inf`` without oscillation)."""
        return math.inf if self.omega_max == 0 else math.pi / self.omega_max

    def report(self):
        lines = [f"ts = {self.ts:.6g} s, omega_max = {self.omega_max:.6g} rad/s, "
                 f"pi/omega_max = {self.max_ts:.6g} s"]
        if self.compliant:
            lines.append("compliant: ts <= pi/omega_max")
        else:
            lines.append("non-compliant: ts > pi/omega_max")
        lines.extend(f"warning: {w}" for w in self.warnings)
        return "\n".join(lines)


def _trim(coeffs):
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
    nz = np.flatnonzero(coeffs)
    if nz.size == 0:
        return np.zeros(1)
    return coeffs[nz[0]:]


@dataclass(frozen=True, eq=False)
class RationalTransferFunction:
    """``num(s) / den(s)``, coefficients in descending powers of ``s``."""

    num: np.ndarray
    den: np.ndarray

    def __post_init__(self):
        num = np.atleast_1d(np.asarray(self.num, dtype=float))
        den = np.atleast_1d(np.asarray(self.den, dtype=float))
        if num.ndim != 1 or den.ndim != 1 or num.size == 0 or den.size == 0:
            raise ValueError("num and den must be non-empty 1-D coefficient lists")
        if not (np.all(np.isfinite(num)) and np.all(np.isfinite(den))):
            raise ValueError("transfer-function coefficients must be finite")
        num, den = _trim(num), _trim(den)
        if den.size == 1 and den[0] == 0:
            raise ValueError("denominator is identically zero")
        if num.size > den.size:
            raise ValueError(
                f"improper transfer function: deg(num)={num.size - 1} > "
                f"deg(den)={den.size - 1}")
        num.setflags(write=False)
        den.setflags(write=False)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def order(self):
        return self.den.size - 1

    def monic(self):
        lead = self.den[0]
        return RationalTransferFunction(self.num / lead, self.den / lead)

    def poles(self):
        return np.roots(self.den)

    def zeros(self):
        return np.roots(self.num)

    def __call__(self, s):
        """Evaluate at complex ``s`` (scalar or array)."""
        return np.polyval(self.num, s) / np.polyval(self.den, s)

    def dc_gain(self):
        return self(0.0).real

    def to_dict(self):
        return {"num": self.num.tolist(), "den": self.den.tolist()}

    def __repr__(self):
        return f"RationalTransferFunction(num={self.num.tolist()}, den={self.den.tolist()})"


def c2d(sys, dt):
    """Exact zero-order-hold discretization; ``C`` and ``D`` are copied."""
    A_d, B_d = matfun.discretize_pair(sys.A, sys.B, dt)
    return DiscreteStateSpace(A_d, B_d, sys.C, sys.D, dt)


def _recover(A_d, B_d, dt):
    # Shared by d2c and the data-driven Case A recovery.
    L = matfun.logm_principal(A_d)
    edt = np.linalg.eigvals(L)
    limit = math.pi * (1.0 - ALIASING_MARGIN)
    risky = edt[np.abs(edt.imag) > limit]
    if risky.size:
        raise AliasingRiskError(
            "recovered poles at the principal-branch boundary |Im(lambda)|*dt = pi; "
            f"offending eigenvalues of A*dt: {np.round(risky, 12).tolist()}",
            eigenvalues=risky.tolist())
    A = L / dt
    Phi = matfun.integral_expm(A, dt)
    cond = np.linalg.cond(Phi)
    if not np.isfinite(cond) or cond > INTEGRAL_COND_LIMIT:
        raise IllConditionedIntegralError(
            f"integral of e^(A tau) is numerically singular (condition {cond:.3g})",
            condition=cond)
    B = np.linalg.solve(Phi, as_matrix(B_d, "B_d"))
    return A, B


def d2c(dsys):
    """Recover the continuous system from its exact discretization.

    ``A = log(A_d) / dt`` on the principal branch and ``B`` from a linear solve
    against ``int_0^dt e^{A tau} dtau``.  Only sampling periods that keep every
    pole inside ``|Im(lambda)| * dt < pi`` round-trip; beyond that the
    recovered oscillation is folded by multiples of ``2 pi / dt``.

    Raises
    ------
    BranchViolationError, SingularInputError
        ``A_d`` has no principal logarithm.
    AliasingRiskError
        A recovered pole has ``|Im(lambda)| * dt`` within ``1e-9`` (relative) of ``pi``.
    IllConditionedIntegralError
        The integral matrix has condition number above ``1e12``.
    """
    A, B = _recover(dsys.A_d, dsys.B_d, dsys.dt)
    return ContinuousStateSpace(A, B, dsys.C, dsys.D)


def _cancel_common_roots(num, den, rtol=1e-9):
    """Drop pole/zero pairs that coincide; returns inputs untouched otherwise."""
    if num.size < 2 or den.size < 2:
        return num, den
    zs = list(np.roots(num))
    ps = list(np.roots(den))
    kept_z = []
    matched = False
    for z in zs:
        hit = next((i for i, p in enumerate(ps)
                    if abs(z - p) <= rtol * max(1.0, abs(p))), None)
        if hit is None:
            kept_z.append(z)
        else:
            ps.pop(hit)
            matched = True
    if not matched:
        return num, den
    new_num = num[0] * np.real_if_close(np.poly(kept_z)) if kept_z else num[:1].copy()
    new_den = den[0] * np.real_if_close(np.poly(ps)) if ps else den[:1].copy()
    return np.real(np.atleast_1d(new_num)), np.real(np.atleast_1d(new_den))


def ss2tf(sys):
    """SISO transfer function through the Faddeev-LeVerrier recursion.

    The denominator is the (monic) characteristic polynomial of ``A``; the
    numerator is ``C adj(sI - A) B + D det(sI - A)``.  Coinciding pole/zero pairs
    are cancelled.  Intended for ``n <= 20``; beyond that the recursion loses
    accuracy.
    """
    if not sys.is_siso:
        raise NotSisoError(
            f"transfer functions are SISO only; system has {sys.n_inputs} inputs "
            f"and {sys.n_outputs} outputs")
    A = sys.A
    n = A.shape[0]
    if n > FADDEEV_MAX_ORDER:
        raise ValueError(f"ss2tf supports at most {FADDEEV_MAX_ORDER} states, got {n}")
    b = sys.B[:, 0]
    c = sys.C[0, :]
    d = sys.D[0, 0]
    den = np.zeros(n + 1)
    den[0] = 1.0
    adj_terms = np.zeros(n)
    M = np.eye(n)
    for k in range(1, n + 1):
        # M is the adjugate coefficient of s^(n-k); den[k] follows from its trace.
        adj_terms[k - 1] = c @ M @ b
        AM = A @ M
        den[k] = -np.trace(AM) / k
        M = AM + den[k] * np.eye(n)
    num = d * den
    num[1:] += adj_terms
    num, den = _cancel_common_roots(_trim(num), den)
    return RationalTransferFunction(num, den).monic()


def freq_response(tf, omegas):
    """``H(j omega)`` by Horner evaluation of numerator and denominator."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if not np.all(np.isfinite(omegas)):
        raise ValueError("omegas must be finite")
    s = 1j * omegas
    den = np.polyval(tf.den, s)
    bad = np.abs(den) < 1e-300
    if np.any(bad):
        w = float(omegas[np.argmax(bad)])
        raise PoleOnAxisError(f"pole on the imaginary axis at omega = {w:.6g} rad/s",
                              omega=w)
    return np.polyval(tf.num, s) / den


def validate_sampling(sys, ts):
    """Report whether ``ts`` satisfies ``ts <= pi / omega_max``; never raises
    for a finite positive ``ts``.

    A warning is attached when ``ts`` reaches 99 % of the limit, since
    round-off can push boundary poles off the principal branch.
    """
    ts = positive_scalar(ts, "ts")
    eigs = np.linalg.eigvals(sys.A)
    omega_max = float(np.max(np.abs(eigs.imag))) if eigs.size else 0.0
    warnings = []
    if omega_max == 0.0:
        compliant = True
    else:
        product = ts * omega_max
        compliant = product <= math.pi * (1.0 + _COMPLIANCE_RTOL)
        if product >= FRAGILITY_FRACTION * math.pi:
            warnings.append(
                f"ts*omega_max = {product:.6g} is within 1% of pi (or beyond); "
                "pole recovery is numerically fragile")
    return SamplingSpec(ts=ts, omega_max=omega_max, compliant=compliant,
                        warnings=tuple(warnings))
