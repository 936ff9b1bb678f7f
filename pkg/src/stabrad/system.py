"""Single LTI subsystem (A, B, C) with zero feedthrough.

Provides transfer-function evaluation, exponential-stability testing, the
peak frequency-response gain (H-infinity norm via Hamiltonian bisection)
and a certified frequency beyond which the gain is below any given level.
The feedthrough term is structurally zero: there is no D field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConvergenceError, InputError, SingularityError
from .linalg import as_matrix, operator_norm

#: Relative threshold below which a Hamiltonian eigenvalue counts as
#: lying on the imaginary axis.
_IMAG_AXIS_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class StateSpaceBlock:
    """One subsystem ``x' = A x + B u``, ``y = C x`` (no feedthrough).

    Parameters
    ----------
    A : (n, n) array_like
        State matrix. Must be square.
    B : (n, m) array_like
        Input matrix.
    C : (p, n) array_like
        Output matrix.
    label : str, optional
        Name used in reports and error messages.

    Exponential stability (spectral abscissa of A strictly negative) is not
    enforced at construction; radius computations check it via ``validate``.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = as_matrix(self.A, f"{self._name}.A")
        b = as_matrix(self.B, f"{self._name}.B")
        c = as_matrix(self.C, f"{self._name}.C")
        n = a.shape[0]
        if a.shape[1] != n:
            raise InputError(f"{self._name}.A must be square, got {a.shape}")
        if b.shape[0] != n:
            raise InputError(
                f"{self._name}.B has {b.shape[0]} rows, expected {n}")
        if c.shape[1] != n:
            raise InputError(
                f"{self._name}.C has {c.shape[1]} columns, expected {n}")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "C", c)

    @property
    def _name(self) -> str:
        return self.label or "block"

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.B.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.C.shape[0]

    @cached_property
    def poles(self) -> np.ndarray:
        return np.linalg.eigvals(self.A)

    @cached_property
    def a_norm(self) -> float:
        return operator_norm(self.A)

    @cached_property
    def gain_scale(self) -> float:
        """``||B|| * ||C||``, the high-frequency roll-off coefficient."""
        return operator_norm(self.B) * operator_norm(self.C)

    @cached_property
    def is_real(self) -> bool:
        """True when all matrices have exactly zero imaginary part."""
        return all(not np.iscomplexobj(m) or not np.any(m.imag != 0.0)
                   for m in (self.A, self.B, self.C))


def is_exp_stable(block: StateSpaceBlock) -> bool:
    """True iff the spectral abscissa of A is strictly negative."""
    return float(np.max(block.poles.real)) < 0.0


def transfer_eval(block: StateSpaceBlock, s: complex) -> np.ndarray:
    """Evaluate the transfer function ``G(s) = C (sI - A)^{-1} B``.

    One LU factorization solves for all columns of B; no explicit inverse
    is formed.

    Raises
    ------
    SingularityError
        If ``s`` is within ``1e-12 * max(1, ||A||)`` of an eigenvalue of A.
        The error carries ``dist(s, sigma(A))``.
    """
    s = complex(s)
    dist = float(np.min(np.abs(block.poles - s)))
    if dist <= 1e-12 * max(1.0, block.a_norm):
        raise SingularityError(
            f"{block._name}: s={s} is within {dist:.3e} of the spectrum of A",
            distance=dist)
    n = block.n_states
    x = np.linalg.solve(s * np.eye(n) - block.A, block.B)
    return np.asarray(block.C @ x)


def block_gain(block: StateSpaceBlock, omega: float) -> float:
    """Frequency-response gain ``||G(i omega)||`` (largest singular value)."""
    return operator_norm(transfer_eval(block, 1j * omega))


def tail_bound_frequency(block: StateSpaceBlock, eps: float) -> float:
    """Frequency beyond which the gain is certified to stay below ``eps``.

    Uses ``||(i w I - A)^{-1}|| <= 1/(|w| - ||A||)`` for ``|w| > ||A||``,
    giving ``omega_max = ||A|| + ||B|| ||C|| / eps``. When the gain is
    identically zero (B = 0 or C = 0) any frequency works and ``||A||``
    is returned.
    """
    if not eps > 0.0:
        raise InputError(f"tail_bound_frequency: eps must be positive, got {eps}")
    if block.gain_scale == 0.0:
        return block.a_norm
    return block.a_norm + block.gain_scale / eps


def _hamiltonian(block: StateSpaceBlock, gamma: float) -> np.ndarray:
    """Balanced Hamiltonian whose imaginary-axis eigenvalues mark frequencies
    where gamma is a singular value of G(i omega) (zero feedthrough case)."""
    a = block.A
    bbh = block.B @ block.B.conj().T
    chc = block.C.conj().T @ block.C
    top = np.hstack([a, bbh / gamma])
    bot = np.hstack([-chc / gamma, -a.conj().T])
    return np.vstack([top, bot])


def _imag_axis_frequencies(h: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvals(h)
    scale = float(np.linalg.norm(h, "fro"))
    om = np.sort(w[np.abs(w.real) <= _IMAG_AXIS_TOL * scale].imag)
    if om.size <= 1:
        return om
    # merge near-duplicates
    keep = [om[0]]
    for x in om[1:]:
        if x - keep[-1] > 1e-9 * max(1.0, abs(x)):
            keep.append(x)
    return np.asarray(keep)


def hinf_norm(block: StateSpaceBlock, tol: float = 1e-8) -> tuple[float, float]:
    """Peak gain ``sup_w ||G(i w)||`` and a frequency attaining it.

    Standard bisection on the Hamiltonian test: ``gamma > ||G||_inf`` iff
    the Hamiltonian matrix for ``gamma`` has no purely imaginary
    eigenvalues. The lower bound is pushed up by evaluating the gain at the
    midpoints of consecutive imaginary-axis crossings until the bracket is
    relatively smaller than ``2 * tol``.

    Returns
    -------
    gamma : float
        The peak gain, within relative ``tol``.
    omega_peak : float
        A frequency achieving ``gamma`` within tolerance.

    Raises
    ------
    InputError
        If the block is not exponentially stable.
    """
    if not is_exp_stable(block):
        raise InputError(f"{block._name}: hinf_norm requires an exponentially "
                         "stable block (spectral abscissa < 0)")
    if block.gain_scale == 0.0:
        return 0.0, 0.0

    candidates = {0.0}
    for lam in block.poles:
        candidates.add(abs(lam.imag))
        candidates.add(abs(lam))
    if not block.is_real:
        candidates.update(-w for w in tuple(candidates))

    best_g, best_w = 0.0, 0.0
    for w in candidates:
        g = block_gain(block, w)
        if g > best_g:
            best_g, best_w = g, w
    if best_g == 0.0:
        # Pole-derived probes all sit on transfer-function zeros; scan decades.
        for w in np.geomspace(1e-4, 1e4, 33) * max(block.a_norm, 1.0):
            for sgn in (1.0,) if block.is_real else (1.0, -1.0):
                g = block_gain(block, sgn * w)
                if g > best_g:
                    best_g, best_w = g, sgn * w
        if best_g == 0.0:
            return 0.0, 0.0

    stagnant = 0
    for _ in range(60):
        gamma_test = best_g * (1.0 + 2.0 * tol)
        freqs = _imag_axis_frequencies(_hamiltonian(block, gamma_test))
        if block.is_real:
            freqs = np.unique(np.abs(freqs))
        if freqs.size == 0:
            return best_g * (1.0 + tol), best_w
        if freqs.size == 1:
            probes = freqs
        else:
            probes = 0.5 * (freqs[:-1] + freqs[1:])
        improved = False
        for w in probes:
            g = block_gain(block, float(w))
            if g > best_g:
                best_g, best_w = g, float(w)
                improved = True
        if not improved:
            stagnant += 1
            # Tangency: spurious axis crossings at the peak; bracket is tight.
            if stagnant >= 2:
                return best_g * (1.0 + tol), best_w
        else:
            stagnant = 0
    raise ConvergenceError(
        f"{block._name}: Hamiltonian bisection did not converge")
