"""Random stable systems for property checks and Monte-Carlo runs."""
import math

import numpy as np

from .lti import ContinuousStateSpace

__all__ = ["random_stable_system", "compliant_ts"]


def _random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_stable_system(rng, n, m=1, p=1, decay=(0.1, 3.0), omega=(0.5, 10.0),
                         cond=3.0, with_feedthrough=True):
    """Stable ``n``-state system with known spectrum.

    Poles are ``-sigma (+/- j omega)`` with ``sigma`` drawn from ``decay`` and
    ``omega`` from ``omega``; a random number of conjugate pairs is used.  The
    modal basis has 2-norm condition number at most ``cond``.
    """
    J = np.zeros((n, n))
    n_pairs = int(rng.integers(0, n // 2 + 1))
    i = 0
    for _ in range(n_pairs):
        s = rng.uniform(*decay)
        w = rng.uniform(*omega)
        J[i:i + 2, i:i + 2] = [[-s, w], [-w, -s]]
        i += 2
    while i < n:
        J[i, i] = -rng.uniform(*decay)
        i += 1
    sv = np.exp(rng.uniform(0.0, math.log(cond), n))
    sv[0], sv[-1] = 1.0, cond
    T = _random_orthogonal(rng, n) @ np.diag(sv) @ _random_orthogonal(rng, n)
    A = T @ J @ np.linalg.inv(T)
    B = rng.standard_normal((n, m))
    C = rng.standard_normal((p, n))
    D = rng.standard_normal((p, m)) if with_feedthrough else np.zeros((p, m))
    return ContinuousStateSpace(A, B, C, D)


def compliant_ts(sys, rng, fraction=(0.2, 0.95), max_decay_product=2.0):
    """Sampling time inside ``ts <= fraction * pi / omega_max``.

    ``ts`` is also capped so that ``|Re(lambda)| ts <= max_decay_product``;
    very strongly damped discrete poles make the logarithm ill-conditioned.
    """
    eigs = np.linalg.eigvals(sys.A)
    omega_max = float(np.max(np.abs(eigs.imag)))
    decay_max = float(np.max(np.abs(eigs.real)))
    limit = math.inf if omega_max == 0 else math.pi / omega_max
    if decay_max > 0:
        limit = min(limit, max_decay_product / decay_max)
    if not math.isfinite(limit):
        limit = 1.0
    return rng.uniform(*fraction) * limit
