"""Per-sample jitter fractions.

A sampling interval under jitter lasts ``ts * (1 + eps_k)`` with
``eps_k > -1``.  Sequences are either given explicitly or drawn from one of
three models; random draws use numpy's PCG64 bit generator seeded with the
recorded integer seed, so a serialized ``(model, seed, n)`` reproduces the
sequence exactly.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import positive_scalar
from .errors import (AssumptionViolationError, InvalidBoundsError,
                     JitterGenerationError, SystemParseError)

__all__ = [
    "JitterModel", "JitterSequence", "ValidationReport",
    "generate", "validate", "effective_timesteps", "policy_for_bounds",
    "parse_descriptor", "load_jitter", "GENERATOR_NAME", "MAX_REJECTIONS",
]

GENERATOR_NAME = "numpy.random.PCG64"
MAX_REJECTIONS = 1000
POLICIES = ("recommended", "permissive")
KINDS = ("constant", "uniform", "truncated-gaussian", "explicit")


def _check_bounds(lo, hi):
    if not (math.isfinite(lo) and lo > -1.0):
        raise InvalidBoundsError(f"lower jitter bound must be > -1, got {lo!r}")
    if math.isnan(hi) or lo > hi:
        raise InvalidBoundsError(f"lower bound {lo!r} exceeds upper bound {hi!r}")


@dataclass(frozen=True)
class JitterModel:
    """Distribution descriptor: ``kind`` plus the parameters it needs.

    Build instances with :meth:`constant`, :meth:`uniform` or
    :meth:`truncated_gaussian`.
    """

    kind: str
    lo: float
    hi: float
    value: float = 0.0
    mean: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown jitter model {self.kind!r}; expected one of {KINDS}")
        _check_bounds(float(self.lo), float(self.hi))
        if self.kind == "truncated-gaussian" and not self.sigma > 0:
            raise ValueError(f"truncated-gaussian needs sigma > 0, got {self.sigma!r}")

    @classmethod
    def constant(cls, c):
        return cls("constant", c, c, value=c)

    @classmethod
    def uniform(cls, lo, hi):
        return cls("uniform", lo, hi)

    @classmethod
    def truncated_gaussian(cls, sigma, lo, hi, mean=0.0):
        return cls("truncated-gaussian", lo, hi, mean=mean, sigma=sigma)

    @property
    def bounds(self):
        return (float(self.lo), float(self.hi))

    def params(self):
        if self.kind == "constant":
            return {"value": self.value}
        if self.kind == "truncated-gaussian":
            return {"mean": self.mean, "sigma": self.sigma}
        return {}


@dataclass(frozen=True, eq=False)
class JitterSequence:
    """Jitter fractions ``eps_k`` with the model that produced them."""

    epsilons: np.ndarray
    model: str = "explicit"
    seed: int | None = None
    bounds: tuple | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        eps = np.atleast_1d(np.asarray(self.epsilons, dtype=float)).copy()
        if eps.ndim != 1 or eps.size < 1:
            raise ValueError("a jitter sequence needs at least one sample")
        _raise_on_violations(eps)
        bounds = self.bounds
        if bounds is None:
            bounds = (float(eps.min()), float(eps.max()))
        lo, hi = float(bounds[0]), float(bounds[1])
        _check_bounds(lo, hi)
        outside = np.flatnonzero((eps < lo) | (eps > hi))
        if outside.size:
            raise AssumptionViolationError(
                f"jitter samples outside declared bounds [{lo}, {hi}] at indices "
                f"{outside[:20].tolist()}", indices=outside.tolist())
        eps.setflags(write=False)
        object.__setattr__(self, "epsilons", eps)
        object.__setattr__(self, "bounds", (lo, hi))

    def __len__(self):
        return self.epsilons.size

    @property
    def is_constant(self):
        return bool(np.all(self.epsilons == self.epsilons[0]))

    def to_dict(self):
        return {
            "model": self.model,
            "params": dict(self.params),
            "seed": self.seed,
            "generator": GENERATOR_NAME if self.seed is not None else None,
            "bounds": list(self.bounds),
            "epsilons": self.epsilons.tolist(),
        }

    def to_json(self, indent=None):
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or "epsilons" not in data:
            raise SystemParseError("jitter file needs an 'epsilons' array")
        bounds = data.get("bounds")
        if bounds is not None and (not isinstance(bounds, (list, tuple)) or len(bounds) != 2):
            raise SystemParseError("'bounds' must be a [lo, hi] pair")
        return cls(np.asarray(data["epsilons"], dtype=float),
                   model=data.get("model", "explicit"),
                   seed=data.get("seed"),
                   bounds=None if bounds is None else tuple(bounds),
                   params=data.get("params") or {})


def _raise_on_violations(eps):
    bad = np.flatnonzero(~(eps > -1.0) | np.isnan(eps))
    if bad.size:
        raise AssumptionViolationError(
            f"jitter fractions must satisfy eps_k > -1; violated at indices "
            f"{bad[:20].tolist()} (values {eps[bad[:5]].tolist()})",
            indices=bad.tolist())


def generate(model, n, seed):
    """Draw ``n`` jitter fractions from ``model``; deterministic in ``seed``.

    Truncated-gaussian draws are rejection-sampled with at most 1000 attempts
    per sample.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    lo, hi = model.bounds
    _check_bounds(lo, hi)
    rng = np.random.Generator(np.random.PCG64(seed))
    if model.kind == "constant":
        eps = np.full(n, float(model.value))
    elif model.kind == "uniform":
        eps = rng.uniform(lo, hi, size=n)
    elif model.kind == "truncated-gaussian":
        eps = np.empty(n)
        pending = np.arange(n)
        for _ in range(MAX_REJECTIONS):
            draw = rng.normal(model.mean, model.sigma, size=pending.size)
            ok = (draw >= lo) & (draw <= hi)
            eps[pending[ok]] = draw[ok]
            pending = pending[~ok]
            if pending.size == 0:
                break
        else:
            raise JitterGenerationError(
                f"{pending.size} samples still outside [{lo}, {hi}] after "
                f"{MAX_REJECTIONS} attempts; check mean/sigma against the bounds")
    else:
        raise ValueError("explicit sequences are constructed directly, not generated")
    return JitterSequence(eps, model=model.kind, seed=seed, bounds=(lo, hi),
                          params=model.params())


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    policy: str
    warnings: tuple = ()

    @property
    def warning_indices(self):
        return tuple(i for i, _ in self.warnings)


def policy_for_bounds(bounds):
    """The strictest policy a sequence with these bounds can pass cleanly."""
    return "recommended" if bounds[1] < 1.0 else "permissive"


def validate(seq, policy="recommended"):
    """Check ``eps_k > -1`` for every sample.

    The ``"recommended"`` policy also warns about ``eps_k >= 1`` (a whole
    sample period missed); ``"permissive"`` allows any ``eps_k > -1``.

    Raises
    ------
    AssumptionViolationError
        Some ``eps_k <= -1``; ``indices`` lists them.
    """
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}, got {policy!r}")
    eps = seq.epsilons if isinstance(seq, JitterSequence) else \
        np.atleast_1d(np.asarray(seq, dtype=float))
    _raise_on_violations(eps)
    warnings = []
    if policy == "recommended":
        for i in np.flatnonzero(eps >= 1.0):
            warnings.append((int(i), f"eps[{i}] = {eps[i]:.6g} >= 1: a full sample "
                                     "is missed; consider modelling it as a delay"))
    return ValidationReport(valid=True, policy=policy, warnings=tuple(warnings))


def effective_timesteps(seq, ts):
    """Actual interval lengths ``ts * (1 + eps_k)``."""
    ts = positive_scalar(ts, "ts")
    eps = seq.epsilons if isinstance(seq, JitterSequence) else \
        np.atleast_1d(np.asarray(seq, dtype=float))
    _raise_on_violations(eps)
    return ts * (1.0 + eps)


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_GAUSS_RE = re.compile(
    rf"^gauss:(?P<sigma>{_NUM})(?:,mean=(?P<mean>{_NUM}))?"
    rf"(?:,bounds=(?P<lo>{_NUM}),(?P<hi>{_NUM}))?$")


def parse_descriptor(text):
    """Parse the shorthand ``constant:c``, ``uniform:w`` (symmetric ``[-w, w]``),
    ``uniform:lo,hi`` or ``gauss:sigma[,mean=m][,bounds=lo,hi]``.

    Gaussian bounds default to ``mean +/- 3 sigma``.
    """
    text = text.strip().replace(" ", "")
    kind, _, rest = text.partition(":")
    try:
        if kind == "constant":
            return JitterModel.constant(float(rest))
        if kind == "uniform":
            parts = [float(p) for p in rest.split(",")]
            if len(parts) == 1:
                w = abs(parts[0])
                return JitterModel.uniform(-w, w)
            if len(parts) == 2:
                return JitterModel.uniform(*parts)
        if kind == "gauss":
            m = _GAUSS_RE.match(text)
            if m:
                sigma = float(m["sigma"])
                mean = float(m["mean"]) if m["mean"] else 0.0
                if m["lo"] is not None:
                    lo, hi = float(m["lo"]), float(m["hi"])
                else:
                    lo, hi = mean - 3 * sigma, mean + 3 * sigma
                return JitterModel.truncated_gaussian(sigma, lo, hi, mean=mean)
    except ValueError as exc:
        if isinstance(exc, AssumptionViolationError):
            raise
        raise SystemParseError(f"bad jitter descriptor {text!r}: {exc}") from None
    raise SystemParseError(
        f"bad jitter descriptor {text!r}; expected constant:c, uniform:w, "
        "uniform:lo,hi or gauss:sigma[,bounds=lo,hi]")


def load_jitter(path):
    """Read a jitter JSON file."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    return JitterSequence.from_dict(data)
