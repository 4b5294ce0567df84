"""Matrix exponential, principal logarithm and the zero-order-hold integral.

``expm`` is scaling and squaring on top of a diagonal Padé approximant whose
degree is picked from the 1-norm of the argument (Higham 2005).  ``logm_principal``
reduces to complex Schur form, takes repeated triangular square roots until the
factor is close to the identity, and evaluates a Padé approximant of
``log(I + X)`` through its Gauss-Legendre partial-fraction form (Al-Mohy and
Higham 2012).  ``discretize_pair`` and ``integral_expm`` exponentiate the
augmented block matrix ``[[A, B], [0, 0]] * dt`` so that a singular ``A``
needs no inversion.
"""
import cmath
import math

import numpy as np
from scipy.linalg import schur, solve_triangular

from ._validation import as_matrix, as_square, positive_scalar
from .errors import (BranchViolationError, DimensionMismatchError,
                     ExpmOverflowError, NumericalError, SingularInputError)

__all__ = ["expm", "logm_principal", "discretize_pair", "integral_expm"]

# Degree -> numerator coefficients b_0..b_m of the [m/m] Padé approximant.
_PADE_COEFFS = {
    3: (120., 60., 12., 1.),
    5: (30240., 15120., 3360., 420., 30., 1.),
    7: (17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.),
    9: (17643225600., 8821612800., 2075673600., 302702400., 30270240.,
        2162160., 110880., 3960., 90., 1.),
    13: (64764752532480000., 32382376266240000., 7771770303897600.,
         1187353796428800., 129060195264000., 10559470521600.,
         670442572800., 33522128640., 1323241920., 40840800., 960960.,
         16380., 182., 1.),
}

# Largest 1-norm for which degree m meets unit-roundoff backward error.
_EXPM_THETA = (
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
)

# Same idea for the log(I + X) Padé approximant of degree m = index.
_LOGM_THETA = (None,
               1.59e-5, 2.31e-3, 1.94e-2, 6.21e-2,
               1.28e-1, 2.06e-1, 2.88e-1)
_LOGM_MAX_DEGREE = 7
_MAX_SQRTS = 100

# Relative distance below which an eigenvalue counts as zero / negative real.
BRANCH_RTOL = 1e-12


def _pade(A, m):
    b = _PADE_COEFFS[m]
    n = A.shape[0]
    ident = np.eye(n, dtype=A.dtype)
    A2 = A @ A
    if m == 13:
        A4 = A2 @ A2
        A6 = A2 @ A4
        U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
                 + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
        V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
             + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    else:
        powers = [ident, A2]
        for _ in range(2, m // 2 + 1):
            powers.append(powers[-1] @ A2)
        U = sum(b[2 * j + 1] * powers[j] for j in range(m // 2 + 1))
        U = A @ U
        V = sum(b[2 * j] * powers[j] for j in range(m // 2 + 1))
    return np.linalg.solve(V - U, V + U)


def expm(M):
    """Matrix exponential ``e^M``.

    Parameters
    ----------
    M : (n, n) array_like
        Finite square matrix.

    Returns
    -------
    ndarray
        ``e^M`` with the same shape as ``M``.

    Raises
    ------
    ExpmOverflowError
        If the result (or an intermediate square) leaves the float range.
    """
    A = as_square(M, "M")
    norm1 = np.linalg.norm(A, 1)
    with np.errstate(over="ignore", invalid="ignore"):
        for m, theta in _EXPM_THETA[:-1]:
            if norm1 <= theta:
                F = _pade(A, m)
                break
        else:
            theta13 = _EXPM_THETA[-1][1]
            s = max(0, int(math.ceil(math.log2(norm1 / theta13)))) if norm1 > 0 else 0
            F = _pade(A / 2.0 ** s, 13)
            for _ in range(s):
                F = F @ F
                if not np.all(np.isfinite(F)):
                    break
    if not np.all(np.isfinite(F)):
        raise ExpmOverflowError(
            f"matrix exponential overflows (1-norm of argument {norm1:.6g})")
    return F


def _sqrtm_triu(T):
    """Principal square root of an upper-triangular complex matrix."""
    n = T.shape[0]
    R = np.zeros_like(T)
    diag = np.sqrt(np.diag(T))
    R[np.diag_indices(n)] = diag
    for j in range(1, n):
        for i in range(j - 1, -1, -1):
            s = R[i, i + 1:j] @ R[i + 1:j, j]
            R[i, j] = (T[i, j] - s) / (diag[i] + diag[j])
    return R


def _unwind(z):
    return math.ceil((z.imag - math.pi) / (2 * math.pi))


def _logm_superdiag(l1, l2, t12):
    # Accurate (1, 2) entry of log of a 2x2 upper-triangular block.
    if l1 == l2:
        return t12 / l1
    if abs(l2 - l1) > abs(l1 + l2) / 2:
        return t12 * (cmath.log(l2) - cmath.log(l1)) / (l2 - l1)
    z = (l2 - l1) / (l2 + l1)
    u = _unwind(cmath.log(l2) - cmath.log(l1))
    return t12 * 2.0 * (cmath.atanh(z) + math.pi * 1j * u) / (l2 - l1)


def _check_log_domain(eigs, scale):
    for lam in eigs:
        if abs(lam) <= BRANCH_RTOL * scale:
            raise SingularInputError(
                f"matrix is singular to working tolerance (eigenvalue {lam:.6g})",
                eigenvalue=complex(lam))
    for lam in eigs:
        if lam.real < 0 and abs(lam.imag) <= BRANCH_RTOL * abs(lam):
            raise BranchViolationError(
                f"eigenvalue {lam:.6g} lies on the negative real axis; "
                "principal logarithm undefined",
                eigenvalue=complex(lam))


def _logm_triu(T0):
    n = T0.shape[0]
    ident = np.eye(n, dtype=complex)
    diag0 = np.diag(T0).copy()
    T = T0
    # Product of (1 + t_ii^(1/2^j)) lets t_ii^(1/2^s) - 1 avoid cancellation.
    denom = np.ones(n, dtype=complex)
    s = 0
    theta = _LOGM_THETA[_LOGM_MAX_DEGREE]
    while np.linalg.norm(T - ident, 1) > theta:
        if s >= _MAX_SQRTS:
            raise NumericalError("logarithm: square-root phase did not converge")
        T = _sqrtm_triu(T)
        denom *= 1.0 + np.diag(T)
        s += 1
    X = T - ident
    X[np.diag_indices(n)] = (diag0 - 1.0) / denom
    normX = np.linalg.norm(X, 1)
    m = next(k for k in range(1, _LOGM_MAX_DEGREE + 1) if normX <= _LOGM_THETA[k])
    nodes, weights = np.polynomial.legendre.leggauss(m)
    nodes = 0.5 + 0.5 * nodes
    weights = 0.5 * weights
    L = np.zeros_like(X)
    for w, x in zip(weights, nodes):
        L += solve_triangular(ident + x * X, w * X)
    L *= 2.0 ** s
    L[np.diag_indices(n)] = np.log(diag0)
    for i in range(n - 1):
        L[i, i + 1] = _logm_superdiag(diag0[i], diag0[i + 1], T0[i, i + 1])
    return L


def logm_principal(M):
    """Principal matrix logarithm.

    Returns ``X`` with ``expm(X) == M`` whose eigenvalues all have imaginary
    part in ``(-pi, pi)``.  Real input yields real output.

    Raises
    ------
    SingularInputError
        An eigenvalue is zero relative to ``||M||_F`` (tolerance ``1e-12``).
    BranchViolationError
        An eigenvalue lies within relative distance ``1e-12`` of the negative
        real axis.
    """
    A = as_square(M, "M")
    is_real = not np.iscomplexobj(A)
    T, Z = schur(A.astype(complex), output="complex")
    _check_log_domain(np.diag(T), np.linalg.norm(A))
    L = _logm_triu(T)
    X = Z @ L @ Z.conj().T
    if is_real:
        X = X.real
    if not np.all(np.isfinite(X)):
        raise NumericalError("logarithm produced non-finite entries")
    return X


def discretize_pair(A, B, dt):
    """Zero-order-hold pair ``(e^{A dt}, int_0^dt e^{A tau} dtau B)``.

    Both blocks come from a single exponential of the augmented matrix
    ``[[A, B], [0, 0]] * dt``.
    """
    A = as_square(A, "A")
    B = as_matrix(B, "B", allow_empty=True)
    dt = positive_scalar(dt, "dt")
    n = A.shape[0]
    if B.shape[0] != n:
        raise DimensionMismatchError(f"B must have {n} rows, got {B.shape[0]}")
    m = B.shape[1]
    dtype = np.result_type(A, B)
    aug = np.zeros((n + m, n + m), dtype=dtype)
    aug[:n, :n] = A * dt
    aug[:n, n:] = B * dt
    E = expm(aug)
    return E[:n, :n].copy(), E[:n, n:].copy()


def integral_expm(A, dt):
    """``int_0^dt e^{A tau} dtau`` (the ``B = I`` case of :func:`discretize_pair`)."""
    A = as_square(A, "A")
    return discretize_pair(A, np.eye(A.shape[0], dtype=A.dtype), dt)[1]
