"""Dark-state counting and construction on the dressed coupling matrix.

Within each degenerate block of dressed lower states the dark states span the
right null space of the ``N_u x l`` coupling slice; the number of bright
states is the slice's rank. The SVD route is the production path.
:func:`recursive_bright_dark` builds the same subspace by the explicit
bright/dark recursion when every column is a multiple of one reference
column, and is kept as an independent cross-check.

Vector sets are 2-D arrays with one vector per row.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray

from .dressing import DressedSystem, Tolerances, fix_phase
from .errors import DimensionMismatch, NotProportional

SIGMA_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class BlockAnalysis:
    index: int
    columns: range
    eigenvalue: float
    rank: int
    singular_values: NDArray[np.float64]
    bright_states: NDArray[np.complex128]
    dark_states: NDArray[np.complex128]
    zero_columns: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.columns)

    @property
    def n_dark(self) -> int:
        return self.dark_states.shape[0]


@dataclass(frozen=True, eq=False)
class DarkStateReport:
    """Result of :func:`analyze`.

    ``dark_dressed`` holds every dark state over all ``N_l`` dressed lower
    states (zero outside its block), ``dark_lower`` the same states over the
    bare lower levels (``lower_order``), and ``dark_full`` over all levels in
    descending label order with zeros on the upper levels. The bare forms are
    empty until :func:`to_bare_basis` runs; :func:`analyze` does that.
    """

    n_upper: int
    n_lower: int
    upper_order: tuple[int, ...]
    lower_order: tuple[int, ...]
    blocks: tuple[BlockAnalysis, ...]
    sigma_max: float
    tolerances: Tolerances
    dark_dressed: NDArray[np.complex128]
    dark_lower: NDArray[np.complex128] | None = None
    dark_full: NDArray[np.complex128] | None = None
    dark_eigenvalues: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))

    @property
    def total_dark(self) -> int:
        return self.dark_dressed.shape[0]

    @property
    def total_rank(self) -> int:
        return sum(b.rank for b in self.blocks)

    @property
    def basis_order(self) -> tuple[int, ...]:
        return tuple(sorted(self.upper_order + self.lower_order, reverse=True))


def _empty(dim: int) -> NDArray[np.complex128]:
    return np.zeros((0, dim), dtype=np.complex128)


def null_space(c_block, tol_rank: float, sigma_ref: float | None = None) -> NDArray[np.complex128]:
    """Orthonormal basis (rows) of ``{x : c_block @ x = 0}``.

    Singular values at or below ``tol_rank * sigma_ref`` count as zero;
    ``sigma_ref`` defaults to the largest singular value of ``c_block``.
    """
    c = np.atleast_2d(np.asarray(c_block, dtype=np.complex128))
    cols = c.shape[1]
    _, s, vh = np.linalg.svd(c, full_matrices=True)
    ref = (s[0] if s.size else 0.0) if sigma_ref is None else sigma_ref
    cut = tol_rank * max(ref, SIGMA_FLOOR)
    rank = int(np.count_nonzero(s > cut))
    # trailing right-singular vectors, ascending singular value
    null = vh[rank:].conj()[::-1]
    return np.array([fix_phase(v) for v in null]).reshape(-1, cols)


def subspace_distance(a, b) -> float:
    """Spectral norm of the difference of the orthogonal projectors onto span(a), span(b)."""
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    b = np.atleast_2d(np.asarray(b, dtype=np.complex128))
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"ambient dimensions differ: {a.shape[1]} vs {b.shape[1]}")
    pa = a.T @ a.conj()
    pb = b.T @ b.conj()
    return float(np.linalg.norm(pa - pb, 2))


@dataclass(frozen=True)
class ProportionalColumns:
    """Columns of a block written as ``column_j = ratios[j] * column_reference``.

    ``ratios[reference] == 1``. ``order`` lists the columns with the
    reference first; the recursion runs in that order.
    """

    reference: int
    ratios: tuple[complex, ...]

    @property
    def order(self) -> tuple[int, ...]:
        rest = [j for j in range(len(self.ratios)) if j != self.reference]
        return (self.reference, *rest)

    @property
    def norms(self) -> tuple[float, ...]:
        """Running norms ``sqrt(1 + sum |lambda|^2)`` starting from 1."""
        out = [1.0]
        acc = 1.0
        for j in self.order[1:]:
            acc += abs(self.ratios[j]) ** 2
            out.append(float(np.sqrt(acc)))
        return tuple(out)

    @classmethod
    def from_block(cls, c_block, tol_rank: float = 1e-10, reference: int | None = None):
        c = np.atleast_2d(np.asarray(c_block, dtype=np.complex128))
        norms = np.linalg.norm(c, axis=0)
        if norms.max(initial=0.0) == 0:
            raise NotProportional("all columns vanish; there is no reference column")
        if reference is None:
            reference = int(np.argmax(norms > tol_rank * norms.max()))
        ref = c[:, reference]
        rn = np.vdot(ref, ref).real
        if rn == 0:
            raise NotProportional(f"reference column {reference} is zero")
        ratios = []
        for j in range(c.shape[1]):
            lam = np.vdot(ref, c[:, j]) / rn
            resid = np.linalg.norm(c[:, j] - lam * ref)
            if resid > tol_rank * norms.max():
                raise NotProportional(
                    f"column {j} is not a multiple of column {reference} (residual {resid:.3g})"
                )
            ratios.append(complex(lam))
        ratios[reference] = 1.0 + 0j
        return cls(reference, tuple(ratios))


def recursive_bright_dark(ratios: ProportionalColumns):
    """One bright state and ``l - 1`` dark states for a rank-one block.

    Starting from the reference state, each further column ``L`` with ratio
    ``lam`` updates ``B' = (n B + conj(lam) L) / n'`` and emits
    ``D = (lam B - n L) / n'`` with ``n' = sqrt(n**2 + |lam|**2)``.
    Returns ``(bright, darks)`` over the block's columns in their original order.
    """
    l = len(ratios.ratios)
    order = ratios.order
    norms = ratios.norms
    basis = np.eye(l, dtype=np.complex128)
    bright = basis[order[0]].copy()
    darks = []
    for step, j in enumerate(order[1:], start=1):
        lam = ratios.ratios[j]
        prev, new = norms[step - 1], norms[step]
        dark = (lam * bright - prev * basis[j]) / new
        bright = (prev * bright + np.conj(lam) * basis[j]) / new
        darks.append(dark)
    return bright, np.array(darks, dtype=np.complex128).reshape(-1, l)


def analyze(dressed: DressedSystem, tol: Tolerances | None = None) -> DarkStateReport:
    """Count and construct the dark states of a dressed system, block by block."""
    tol = tol or Tolerances()
    c = dressed.coupling
    nu, nl = c.shape
    sigma_max = float(np.linalg.norm(c, 2)) if c.size else 0.0
    cut = tol.tol_rank * max(sigma_max, SIGMA_FLOOR)

    blocks = []
    dressed_darks = []
    dark_values = []
    for k, cols in enumerate(dressed.blocks):
        sub = c[:, cols.start:cols.stop]
        _, s, vh = np.linalg.svd(sub, full_matrices=True)
        rank = int(np.count_nonzero(s > cut))
        bright = np.array([fix_phase(v) for v in vh[:rank].conj()]).reshape(-1, len(cols))
        dark = np.array([fix_phase(v) for v in vh[rank:].conj()[::-1]]).reshape(-1, len(cols))
        zero_cols = tuple(
            cols.start + j for j in range(len(cols)) if np.abs(sub[:, j]).max(initial=0.0) <= cut
        )
        value = float(np.mean(dressed.omega[cols.start:cols.stop]))
        s.setflags(write=False)
        blocks.append(BlockAnalysis(k, cols, value, rank, s, bright, dark, zero_cols))
        for v in dark:
            padded = np.zeros(nl, dtype=np.complex128)
            padded[cols.start:cols.stop] = v
            dressed_darks.append(padded)
            dark_values.append(value)

    report = DarkStateReport(
        n_upper=nu,
        n_lower=nl,
        upper_order=dressed.upper_order,
        lower_order=dressed.lower_order,
        blocks=tuple(blocks),
        sigma_max=sigma_max,
        tolerances=tol,
        dark_dressed=np.array(dressed_darks, dtype=np.complex128).reshape(-1, nl),
        dark_eigenvalues=np.array(dark_values, dtype=float),
    )
    return to_bare_basis(report, dressed.s_lower)


def to_bare_basis(report: DarkStateReport, s_lower) -> DarkStateReport:
    """Express the dressed dark states over bare levels via ``S_l^dagger``."""
    s_lower = np.asarray(s_lower, dtype=np.complex128)
    # rows are states: x_bare = S_l^dagger x_dressed  <=>  X_bare = X_dressed @ conj(S_l)
    lower = report.dark_dressed @ s_lower.conj()
    order = report.basis_order
    full = np.zeros((lower.shape[0], len(order)), dtype=np.complex128)
    for i, lvl in enumerate(report.lower_order):
        full[:, order.index(lvl)] = lower[:, i]
    return replace(report, dark_lower=lower, dark_full=full)
