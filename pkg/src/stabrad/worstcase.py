"""Construction of the marginally destabilizing perturbation.

At a frequency ``w0`` where the coupled objective ``mu(w0)`` is positive,
a rank-one-per-block perturbation is built from the Perron pair of
``diag(g_k^2) E^{o2}``: each active block receives an input along its
maximizing right-singular vector, scaled so the squared output norms
reproduce the Perron vector, and the blocks are

    Delta_kl = u_k e_kl <., y_l> / sum_j e_kj^2 ||y_j||^2

(zero rows where the denominator vanishes). By construction the closed
loop has the eigenvalue ``i w0`` exactly, with predicted eigenvector
``x_k = (i w0 I - A_k)^{-1} B_k u_k``, and the 2,inf-norm of the
perturbation equals ``1/sqrt(mu(w0))``; at the peak frequency this is the
stability radius, which makes the bound tight.

Since the operator norm of a finite-dimensional block is attained by a
singular vector, no approximation factor is needed and the construction is
exact up to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError
from .interconnect import (BlockPerturbation, CompositeSystem, closed_loop_matrix,
                           delta_norm_2inf, delta_opnorm, validate)
from .linalg import hadamard_square, operator_norm, spectral_radius_nonneg
from .radius import _pattern_has_cycle
from .system import transfer_eval

#: Relative threshold below which a Perron-vector entry counts as zero.
_Z_ZERO_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class WorstCaseCertificate:
    """Constructed perturbation plus numerical evidence of marginality.

    ``certified`` is True when the closed loop has an eigenvalue within
    ``eig_tol`` of ``i omega0`` and the eigenvector residual is below
    ``residual_tol * ||A_cl||``. ``eigvec`` is the predicted eigenvector
    when the certificate comes from the construction, otherwise the
    computed eigenvector of the nearest eigenvalue.
    """

    delta: BlockPerturbation
    omega0: float
    norm_2inf: float
    norm_opnorm: float
    target_radius: float
    closed_loop_eig: complex
    eig_residual: float
    eigvec: np.ndarray
    closed_loop_abscissa: float
    certified: bool


def perron_data_at(sys: CompositeSystem, omega0: float) -> tuple[float, np.ndarray]:
    """Perron pair of ``diag(g_k(w0)^2) E^{o2}``: ``(mu(w0), z)`` with z
    l1-normalized.

    Raises
    ------
    DegenerateError
        When the matrix is structurally nilpotent at ``omega0`` (no cycle
        through nonzero gains), in which case no destabilizing
        construction exists at this frequency.
    """
    validate(sys).raise_if_invalid()
    gains = np.array([operator_norm(transfer_eval(b, 1j * omega0))
                      for b in sys.blocks])
    m = (gains ** 2)[:, None] * hadamard_square(sys.E)
    if not _pattern_has_cycle(m != 0.0):
        raise DegenerateError(
            "no destabilizing construction exists at this frequency "
            f"(coupled spectral radius is zero at omega = {omega0})")
    data = spectral_radius_nonneg(m)
    return data.radius, data.vector


def _build_delta(sys: CompositeSystem, omega0: float,
                 z: np.ndarray) -> tuple[BlockPerturbation, np.ndarray]:
    """Assemble the perturbation and predicted eigenvector from a Perron
    vector ``z``; invariant under positive rescaling of ``z``."""
    n = sys.n_blocks
    e = sys.E
    z = np.asarray(z, dtype=float)
    active = z > _Z_ZERO_TOL * float(np.max(z))

    us: list[np.ndarray] = []
    ys: list[np.ndarray] = []
    for k, blk in enumerate(sys.blocks):
        if not active[k]:
            us.append(np.zeros(blk.n_inputs, dtype=complex))
            ys.append(np.zeros(blk.n_outputs, dtype=complex))
            continue
        g = transfer_eval(blk, 1j * omega0)
        _, s, vh = np.linalg.svd(g)
        sigma = float(s[0])
        if sigma == 0.0:
            raise DegenerateError(
                f"block {k} has zero gain at omega = {omega0} but a nonzero "
                "Perron entry; the eigen-equation is inconsistent")
        # ||y_k||^2 = z_k with y_k = G_k u_k along the top singular pair.
        u = (np.sqrt(z[k]) / sigma) * vh[0].conj()
        us.append(u)
        ys.append(g @ u)

    y_sq = np.array([float(np.vdot(y, y).real) for y in ys])
    rows = []
    for k in range(n):
        denom = float((e[k] ** 2) @ y_sq)
        row = []
        for l in range(n):
            if denom == 0.0:
                row.append(np.zeros((sys.input_dims[k], sys.output_dims[l]),
                                    dtype=complex))
            else:
                row.append(np.outer(us[k], np.conj(ys[l])) * (e[k, l] / denom))
        rows.append(tuple(row))
    delta = BlockPerturbation(tuple(rows))

    parts = []
    for k, blk in enumerate(sys.blocks):
        ident = np.eye(blk.n_states)
        parts.append(np.linalg.solve(1j * omega0 * ident - blk.A,
                                     blk.B @ us[k]))
    x = np.concatenate(parts)
    nx = np.linalg.norm(x)
    if nx > 0:
        x = x / nx
    return delta, x


def certify(sys: CompositeSystem, delta: BlockPerturbation, omega0: float,
            predicted_x: np.ndarray | None = None,
            eig_tol: float = 1e-7,
            residual_tol: float = 1e-9,
            target_radius: float | None = None) -> WorstCaseCertificate:
    """Assemble the closed loop and check for an eigenvalue at ``i omega0``.

    Finds the eigenvalue nearest ``i omega0``, computes the residual of the
    eigen-equation at ``i omega0`` (with the predicted eigenvector when
    given, otherwise with the computed one) and records both perturbation
    norms and the closed-loop spectral abscissa. Failures are recorded in
    the certificate, never raised.
    """
    delta.check_compatible(sys)
    a_cl = closed_loop_matrix(sys, delta)
    a_scale = operator_norm(a_cl)
    w, vecs = np.linalg.eig(a_cl)
    near = int(np.argmin(np.abs(w - 1j * omega0)))
    eig = complex(w[near])

    if predicted_x is not None:
        v = np.asarray(predicted_x, dtype=complex)
    else:
        v = vecs[:, near]
    nv = np.linalg.norm(v)
    residual = float(np.linalg.norm(a_cl @ v - 1j * omega0 * v) / nv) if nv > 0 else np.inf

    if target_radius is None:
        try:
            mu0, _ = perron_data_at(sys, omega0)
            target_radius = 1.0 / np.sqrt(mu0) if mu0 > 0 else np.inf
        except DegenerateError:
            target_radius = np.inf

    certified = (abs(eig - 1j * omega0) <= eig_tol * max(1.0, a_scale)
                 and residual <= residual_tol * max(1.0, a_scale))
    return WorstCaseCertificate(
        delta=delta, omega0=float(omega0),
        norm_2inf=delta_norm_2inf(delta),
        norm_opnorm=delta_opnorm(delta),
        target_radius=float(target_radius),
        closed_loop_eig=eig, eig_residual=residual, eigvec=v,
        closed_loop_abscissa=float(np.max(w.real)),
        certified=bool(certified))


def construct_delta(sys: CompositeSystem, omega0: float,
                    eig_tol: float = 1e-7,
                    residual_tol: float = 1e-9) -> WorstCaseCertificate:
    """Build the marginally destabilizing perturbation at ``omega0``.

    The returned certificate carries the perturbation, its norms, the
    target ``1/sqrt(mu(w0))`` the 2,inf-norm should match, the closed-loop
    eigenvalue nearest ``i w0`` and the eigen-residual of the predicted
    eigenvector. A failed certification is reported through the
    ``certified`` flag, not raised.

    Raises
    ------
    DegenerateError
        If ``mu(omega0) = 0`` structurally (no construction exists).
    """
    lam, z = perron_data_at(sys, omega0)
    delta, x = _build_delta(sys, omega0, z)
    return certify(sys, delta, omega0, predicted_x=x,
                   eig_tol=eig_tol, residual_tol=residual_tol,
                   target_radius=1.0 / float(np.sqrt(lam)))
