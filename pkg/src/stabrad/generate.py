"""Desk-scale example system generators.

``heat_chain`` builds identical heat-rod blocks (semi-discretized 1-D
Dirichlet Laplacian, input at the first grid node, output at the last)
coupled in a ring, line or dense pattern. ``random_stable`` builds random
blocks shifted to a prescribed stability margin with a random nonnegative
coupling matrix. Both are deterministic given their parameters.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .interconnect import CompositeSystem
from .system import StateSpaceBlock

PATTERNS = ("ring", "line", "dense")


def coupling_pattern(n_blocks: int, pattern: str) -> np.ndarray:
    """Unit-strength coupling matrix: symmetric ring/line neighbours or
    all-ones dense coupling."""
    if pattern not in PATTERNS:
        raise InputError(f"unknown coupling pattern {pattern!r}; "
                         f"expected one of {PATTERNS}")
    if pattern == "dense":
        return np.ones((n_blocks, n_blocks))
    e = np.zeros((n_blocks, n_blocks))
    for k in range(n_blocks):
        if pattern == "ring" or k + 1 < n_blocks:
            i, j = k, (k + 1) % n_blocks
            e[i, j] = 1.0
            e[j, i] = 1.0
    return e


def heat_rod_block(n_interior: int, label: str = "rod") -> StateSpaceBlock:
    """Heat rod on (0, 1): A = (n+1)^2 tridiag(1, -2, 1), B = e_1, C = e_n^T."""
    if n_interior < 2:
        raise InputError(f"heat_chain needs n >= 2 interior points, got {n_interior}")
    n = n_interior
    a = (np.diag(-2.0 * np.ones(n)) + np.diag(np.ones(n - 1), 1)
         + np.diag(np.ones(n - 1), -1)) * float((n + 1) ** 2)
    b = np.zeros((n, 1))
    b[0, 0] = 1.0
    c = np.zeros((1, n))
    c[0, -1] = 1.0
    return StateSpaceBlock(a, b, c, label=label)


def heat_chain(n_interior: int, n_blocks: int, pattern: str = "ring") -> CompositeSystem:
    """N identical heat-rod blocks coupled per ``pattern``."""
    if n_blocks < 2:
        raise InputError(f"heat_chain needs N >= 2 blocks, got {n_blocks}")
    blocks = tuple(heat_rod_block(n_interior, label=f"rod_{k}")
                   for k in range(n_blocks))
    return CompositeSystem(blocks, coupling_pattern(n_blocks, pattern))


def _dims(value, n_blocks: int, name: str) -> list[int]:
    if np.isscalar(value):
        dims = [int(value)] * n_blocks
    else:
        dims = [int(v) for v in value]
        if len(dims) != n_blocks:
            raise InputError(f"{name}: expected {n_blocks} values, got {len(dims)}")
    if any(d < 1 for d in dims):
        raise InputError(f"{name}: dimensions must be >= 1")
    return dims


def random_stable(n_blocks: int, state_dim, in_dim=1, out_dim=1,
                  margin: float = 0.5, seed: int = 0,
                  rng: np.random.Generator | None = None) -> CompositeSystem:
    """Random exponentially stable composite system.

    Each block gets ``A = M - (abscissa(M) + margin) I`` for Gaussian M
    (so the spectral abscissa is exactly ``-margin``), Gaussian B and C,
    and the coupling matrix is uniform on [0, 1). Dimensions may be scalars
    or per-block sequences.
    """
    if n_blocks < 1:
        raise InputError(f"random_stable needs N >= 1 blocks, got {n_blocks}")
    if not margin > 0.0:
        raise InputError(f"stability margin must be positive, got {margin}")
    if rng is None:
        rng = np.random.default_rng(seed)
    ns = _dims(state_dim, n_blocks, "state_dim")
    ms = _dims(in_dim, n_blocks, "in_dim")
    ps = _dims(out_dim, n_blocks, "out_dim")

    blocks = []
    for k in range(n_blocks):
        m = rng.standard_normal((ns[k], ns[k]))
        shift = float(np.max(np.linalg.eigvals(m).real)) + margin
        a = m - shift * np.eye(ns[k])
        b = rng.standard_normal((ns[k], ms[k]))
        c = rng.standard_normal((ps[k], ns[k]))
        blk = StateSpaceBlock(a, b, c, label=f"rand_{k}")
        if float(np.max(blk.poles.real)) >= 0.0:
            raise InputError(f"generated block {k} failed the stability check")
        blocks.append(blk)
    e = rng.uniform(0.0, 1.0, (n_blocks, n_blocks))
    return CompositeSystem(tuple(blocks), e)
