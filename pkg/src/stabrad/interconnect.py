"""Composite system: a diagonal of subsystem blocks coupled through a
nonnegative strength matrix E, plus block-structured static perturbations.

The coupling convention: entry ``e_ij`` scales the connection from the
output of block j to the input of block i, so the feedback law is
``u_i = sum_j e_ij * Delta_ij @ y_j`` and the closed-loop state matrix is
``A + B (Delta o E) C`` with block-diagonal A, B, C.

Two perturbation norms are used throughout:

* ``delta_opnorm``: max over block rows of the operator norm of the
  horizontally concatenated row (the norm induced by an l2-sum output
  space and a max-norm input space);
* ``delta_norm_2inf``: max over block rows of the l2 combination of the
  per-block operator norms. The first never exceeds the second.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .linalg import as_matrix, operator_norm
from .system import StateSpaceBlock, is_exp_stable


@dataclass(frozen=True, eq=False)
class InterconnectionMatrix:
    """Nonnegative N x N coupling-strength matrix, validated on construction."""

    matrix: np.ndarray

    def __post_init__(self):
        e = as_matrix(self.matrix, "E")
        if e.shape[0] != e.shape[1]:
            raise InputError(f"E must be square, got shape {e.shape}")
        if np.iscomplexobj(e):
            if np.any(e.imag != 0.0):
                raise InputError("E must be real")
            e = e.real
        e = e.astype(float, copy=False)
        bad = np.argwhere(e < 0.0)
        if bad.size:
            i, j = bad[0]
            raise InputError(
                f"E must be nonnegative: entry ({i},{j}) = {e[i, j]}")
        object.__setattr__(self, "matrix", e)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class CompositeSystem:
    """An ordered list of subsystem blocks plus the coupling matrix E.

    ``E`` may be given as an :class:`InterconnectionMatrix` (already
    validated) or as a raw array; value-level checks on raw arrays
    (nonnegativity, block stability) are performed by :func:`validate`
    so that a report can itemize every violation.
    """

    blocks: tuple[StateSpaceBlock, ...]
    E: np.ndarray

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if len(blocks) < 1:
            raise InputError("CompositeSystem: N >= 1 required (empty blocks list)")
        for k, b in enumerate(blocks):
            if not isinstance(b, StateSpaceBlock):
                raise InputError(f"blocks[{k}]: expected a StateSpaceBlock")
        e = self.E
        if isinstance(e, InterconnectionMatrix):
            e = e.matrix
        else:
            e = as_matrix(e, "E")
            if np.iscomplexobj(e):
                if np.any(e.imag != 0.0):
                    raise InputError("E must be real")
                e = e.real
            e = e.astype(float, copy=False)
        if e.shape != (len(blocks), len(blocks)):
            raise InputError(
                f"E has shape {e.shape}, expected ({len(blocks)}, {len(blocks)})")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "E", e)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    @property
    def state_dims(self) -> tuple[int, ...]:
        return tuple(b.n_states for b in self.blocks)

    @property
    def input_dims(self) -> tuple[int, ...]:
        return tuple(b.n_inputs for b in self.blocks)

    @property
    def output_dims(self) -> tuple[int, ...]:
        return tuple(b.n_outputs for b in self.blocks)

    @property
    def is_real(self) -> bool:
        return all(b.is_real for b in self.blocks)

    def with_coupling(self, e) -> "CompositeSystem":
        """Same blocks, different coupling matrix."""
        return CompositeSystem(self.blocks, e)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def is_valid(self) -> bool:
        return not self.violations

    def raise_if_invalid(self):
        if self.violations:
            raise InputError("invalid composite system:\n  - "
                             + "\n  - ".join(self.violations))


def validate(sys: CompositeSystem) -> ValidationReport:
    """Check E nonnegativity, per-block exponential stability and dimension
    consistency; failures are listed, not raised."""
    problems: list[str] = []
    e = sys.E
    for i, j in np.argwhere(e < 0.0):
        problems.append(f"E must be nonnegative: entry ({i},{j}) = {e[i, j]}")
    for k, b in enumerate(sys.blocks):
        if not is_exp_stable(b):
            problems.append(f"block {k} ({b._name}) not exponentially stable")
    return ValidationReport(tuple(problems))


@dataclass(frozen=True, eq=False)
class BlockPerturbation:
    """N x N grid of complex matrices; block (i, j) maps output j to input i,
    so it has shape (m_i, p_j) for input dims m and output dims p."""

    blocks: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        rows = []
        n = len(self.blocks)
        if n < 1:
            raise InputError("BlockPerturbation: N >= 1 required")
        for i, row in enumerate(self.blocks):
            if len(row) != n:
                raise InputError(
                    f"BlockPerturbation row {i} has {len(row)} blocks, expected {n}")
            coerced = []
            for j, blk in enumerate(row):
                a = as_matrix(blk, f"Delta[{i}][{j}]").astype(complex, copy=False)
                coerced.append(a)
            rows.append(tuple(coerced))
        for i in range(n):
            m_i = rows[i][0].shape[0]
            if any(rows[i][j].shape[0] != m_i for j in range(n)):
                raise InputError(f"BlockPerturbation row {i}: inconsistent row heights")
        for j in range(n):
            p_j = rows[0][j].shape[1]
            if any(rows[i][j].shape[1] != p_j for i in range(n)):
                raise InputError(f"BlockPerturbation column {j}: inconsistent widths")
        object.__setattr__(self, "blocks", tuple(rows))

    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def input_dims(self) -> tuple[int, ...]:
        return tuple(row[0].shape[0] for row in self.blocks)

    @property
    def output_dims(self) -> tuple[int, ...]:
        return tuple(blk.shape[1] for blk in self.blocks[0])

    @classmethod
    def zeros(cls, sys: CompositeSystem) -> "BlockPerturbation":
        m, p = sys.input_dims, sys.output_dims
        return cls(tuple(tuple(np.zeros((m[i], p[j]), dtype=complex)
                               for j in range(sys.n_blocks))
                         for i in range(sys.n_blocks)))

    def scaled(self, factor: complex) -> "BlockPerturbation":
        return BlockPerturbation(tuple(tuple(factor * blk for blk in row)
                                       for row in self.blocks))

    def as_full_matrix(self) -> np.ndarray:
        """The assembled (sum m_i) x (sum p_j) matrix."""
        return np.block([[np.asarray(blk) for blk in row] for row in self.blocks])

    def check_compatible(self, sys: CompositeSystem):
        if self.n != sys.n_blocks:
            raise InputError(f"perturbation has {self.n} block rows, "
                             f"system has {sys.n_blocks}")
        if self.input_dims != sys.input_dims or self.output_dims != sys.output_dims:
            raise InputError(
                f"perturbation block dims {self.input_dims} x {self.output_dims} "
                f"do not match system dims {sys.input_dims} x {sys.output_dims}")


def apply_hadamard(delta: BlockPerturbation, e) -> BlockPerturbation:
    """Scale block (i, j) by ``e_ij`` (block-operator Hadamard product)."""
    if isinstance(e, InterconnectionMatrix):
        e = e.matrix
    e = as_matrix(e, "E")
    n = delta.n
    if e.shape != (n, n):
        raise InputError(f"E has shape {e.shape}, expected ({n}, {n})")
    return BlockPerturbation(tuple(tuple(e[i, j] * delta.blocks[i][j]
                                         for j in range(n))
                                   for i in range(n)))


def block_diag(mats) -> np.ndarray:
    mats = [np.asarray(m) for m in mats]
    dtype = complex if any(np.iscomplexobj(m) for m in mats) else float
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=dtype)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def closed_loop_matrix(sys: CompositeSystem, delta: BlockPerturbation) -> np.ndarray:
    """State matrix ``A + B (Delta o E) C`` of the interconnected system.

    Block (i, j) is ``A_i delta_ij + B_i e_ij Delta_ij C_j`` (Kronecker
    delta on the first term); the result is square of size ``sum n_i``.
    """
    delta.check_compatible(sys)
    a0 = block_diag([b.A for b in sys.blocks])
    bblk = block_diag([b.B for b in sys.blocks])
    cblk = block_diag([b.C for b in sys.blocks])
    k = apply_hadamard(delta, sys.E).as_full_matrix()
    return a0 + bblk @ k @ cblk


def delta_norm_2inf(delta: BlockPerturbation) -> float:
    """Max over block rows of ``sqrt(sum_j ||Delta_ij||^2)``."""
    worst = 0.0
    for row in delta.blocks:
        s = sum(operator_norm(blk) ** 2 for blk in row)
        worst = max(worst, float(np.sqrt(s)))
    return worst


def delta_opnorm(delta: BlockPerturbation) -> float:
    """Max over block rows of the operator norm of ``[Delta_i1 ... Delta_iN]``."""
    worst = 0.0
    for row in delta.blocks:
        worst = max(worst, operator_norm(np.hstack(row)))
    return worst
