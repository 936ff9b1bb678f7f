"""Dense matrix kernels: operator norms, eigenvalues, spectral abscissa and
Perron data for nonnegative matrices.

Matrices are plain ``numpy.ndarray`` objects (real or complex, 2-D, finite
entries). All functions are pure; nothing here mutates its arguments. The
heavy lifting is delegated to LAPACK through ``numpy.linalg``; the contract
of every routine is a residual bound, not a particular algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputError

#: Default relative tolerance for residual checks.
DEFAULT_TOL = 1e-9


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D array (real or complex) or raise InputError."""
    a = np.asarray(m)
    if a.dtype == object:
        raise InputError(f"{name}: entries must be numeric")
    if a.ndim != 2:
        raise InputError(f"{name}: expected a 2-D array, got ndim={a.ndim}")
    if a.size == 0:
        raise InputError(f"{name}: must have at least one row and column")
    if not np.issubdtype(a.dtype, np.number):
        a = a.astype(float)
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name}: entries must be finite (no NaN/Inf)")
    return a


def _require_square(a: np.ndarray, name: str) -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise InputError(f"{name}: expected a square matrix, got shape {a.shape}")
    return a


def operator_norm(m) -> float:
    """Largest singular value of ``m`` (the l2-induced operator norm)."""
    a = as_matrix(m)
    return float(np.linalg.svd(a, compute_uv=False)[0])


def eigenvalues(m) -> np.ndarray:
    """All eigenvalues of a square matrix, with multiplicity, unordered."""
    a = _require_square(as_matrix(m), "eigenvalues")
    return np.linalg.eigvals(a)


def spectral_abscissa(m) -> float:
    """Maximum real part over the eigenvalues of a square matrix."""
    return float(np.max(eigenvalues(m).real))


def hadamard_square(e) -> np.ndarray:
    """Entrywise square of a nonnegative real matrix."""
    a = _require_nonneg(e, "hadamard_square")
    return a * a


def _require_nonneg(m, name: str) -> np.ndarray:
    a = as_matrix(m, name)
    if np.iscomplexobj(a):
        if np.any(a.imag != 0.0):
            raise InputError(f"{name}: matrix must be real")
        a = a.real
    a = a.astype(float, copy=False)
    if np.any(a < 0.0):
        i, j = np.argwhere(a < 0.0)[0]
        raise InputError(f"{name}: entry ({i},{j}) = {a[i, j]} is negative; "
                         "matrix must be entrywise nonnegative")
    return a


@dataclass(frozen=True)
class PerronData:
    """Spectral radius of a nonnegative matrix with a nonnegative eigenvector.

    Attributes
    ----------
    radius : float
        The spectral radius ``rho(M) = max |lambda|``.
    vector : ndarray
        A nonnegative eigenvector for ``radius``, normalized to unit l1 norm.
        For reducible matrices the eigenvector need not be unique; any valid
        one is returned.
    """

    radius: float
    vector: np.ndarray

    def residual(self, m) -> float:
        """l2 residual ``||M v - radius v||`` for the source matrix ``m``."""
        a = as_matrix(m)
        return float(np.linalg.norm(a @ self.vector - self.radius * self.vector))


def _nonneg_projection(v: np.ndarray) -> np.ndarray | None:
    """Rotate/realify an eigenvector candidate into the nonnegative orthant.

    Returns the l1-normalized vector, or None if the candidate has entries
    of genuinely mixed sign (beyond roundoff).
    """
    k = int(np.argmax(np.abs(v)))
    pivot = v[k]
    if pivot == 0:
        return None
    w = np.real(v * np.conj(pivot) / abs(pivot))
    if w.sum() < 0:
        w = -w
    top = float(np.max(w))
    if top <= 0:
        return None
    if float(np.min(w)) < -1e-6 * top:
        return None
    w = np.clip(w, 0.0, None)
    s = w.sum()
    if s == 0:
        return None
    return w / s


def _nilpotent_kernel_vector(a: np.ndarray) -> np.ndarray | None:
    """Nonnegative kernel vector of a (numerically) nilpotent nonnegative matrix.

    ``A^k @ ones`` is nonnegative and, for the largest k with a nonzero
    result, lies in the kernel of A.
    """
    n = a.shape[0]
    w = np.ones(n)
    best = w / n
    for _ in range(n):
        nxt = a @ w
        if np.max(nxt) <= 0:
            s = w.sum()
            return w / s if s > 0 else None
        best = nxt / nxt.sum()
        w = nxt
    return best


def spectral_radius_nonneg(m, tol: float = DEFAULT_TOL) -> PerronData:
    """Spectral radius and Perron vector of a nonnegative real matrix.

    Computed by full eigendecomposition (robust for reducible matrices at
    the small sizes used here), selecting the eigenvalue of maximal modulus
    and projecting its eigenvector onto the nonnegative orthant. A shifted
    power iteration is the fallback when the projected eigenvector fails
    the residual bound ``||M v - rho v|| <= tol * ||M||``.

    Raises
    ------
    InputError
        If ``m`` has negative or complex entries.
    ConvergenceError
        If no candidate satisfies the residual bound.
    """
    a = _require_square(_require_nonneg(m, "spectral_radius_nonneg"),
                        "spectral_radius_nonneg")
    scale = float(np.linalg.norm(a, 2))
    if scale == 0.0:
        n = a.shape[0]
        return PerronData(0.0, np.full(n, 1.0 / n))
    w, vecs = np.linalg.eig(a)
    rho = float(np.max(np.abs(w)))
    limit = tol * max(scale, 1.0)

    # Candidates near the real value rho, best (closest) first.
    order = np.argsort(np.abs(w - rho))
    best_vec, best_res = None, np.inf
    for idx in order:
        if abs(w[idx] - rho) > 1e-6 * max(rho, 1.0):
            break
        v = _nonneg_projection(vecs[:, idx])
        if v is None:
            continue
        res = float(np.linalg.norm(a @ v - rho * v))
        if res < best_res:
            best_vec, best_res = v, res
        if res <= limit:
            return PerronData(rho, v)

    if rho <= 1e-12 * scale:
        v = _nilpotent_kernel_vector(a)
        if v is not None:
            res = float(np.linalg.norm(a @ v - rho * v))
            if res <= limit or res < best_res:
                best_vec, best_res = v, res

    if best_res > limit:
        v = _power_iteration_shifted(a, rho)
        if v is not None:
            res = float(np.linalg.norm(a @ v - rho * v))
            if res < best_res:
                best_vec, best_res = v, res

    if best_vec is None or best_res > limit:
        raise ConvergenceError(
            f"Perron vector residual {best_res:.3e} exceeds {limit:.3e}")
    return PerronData(rho, best_vec)


def _power_iteration_shifted(a: np.ndarray, rho: float,
                             max_iter: int = 20000) -> np.ndarray | None:
    """Power iteration on ``A + rho*I``; the shift separates rho from other
    eigenvalues of equal modulus (cycles) while keeping iterates nonnegative."""
    n = a.shape[0]
    v = np.full(n, 1.0 / n)
    target = 1e-12 * max(rho, 1.0)
    for _ in range(max_iter):
        nxt = a @ v + rho * v
        s = nxt.sum()
        if s <= 0:
            return None
        nxt /= s
        if np.linalg.norm(a @ nxt - rho * nxt) <= target:
            return nxt
        if np.linalg.norm(nxt - v, 1) < 1e-16:
            return nxt
        v = nxt
    return v
