"""Dressing: diagonalise the upper and lower blocks to reach the thick arrowhead form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import ConvergenceFailure, NonHermitianInput, ValidationError
from .partition import BlockHamiltonian


@dataclass(frozen=True)
class Tolerances:
    tol_degeneracy: float = 1e-8
    tol_rank: float = 1e-10
    tol_residual: float = 1e-9

    def __post_init__(self):
        for name in ("tol_degeneracy", "tol_rank", "tol_residual"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")

    def as_dict(self) -> dict[str, float]:
        return {
            "tol_degeneracy": self.tol_degeneracy,
            "tol_rank": self.tol_rank,
            "tol_residual": self.tol_residual,
        }


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Ascending eigenvalues and a unitary whose k-th row is the k-th eigen-bra.

    ``unitary @ m @ unitary.conj().T == diag(values)``.
    """

    values: NDArray[np.float64]
    unitary: NDArray[np.complex128]


def fix_phase(v: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """Rotate ``v`` so its largest-magnitude entry is real and positive.

    Near-ties (within 1e-12 relative) go to the lowest index so that the
    choice does not flicker with rounding noise.
    """
    mags = np.abs(v)
    top = mags.max()
    if top == 0:
        return v
    k = int(np.flatnonzero(mags >= top * (1 - 1e-12))[0])
    return v * (np.conj(v[k]) / mags[k])


def hermitian_eigendecompose(m: NDArray) -> EigenDecomposition:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    scale = np.abs(m).max() if m.size else 0.0
    asym = np.abs(m - m.conj().T).max() if m.size else 0.0
    if asym > 1e-12 * scale:
        raise NonHermitianInput(f"matrix is not Hermitian (asymmetry {asym:.3g})")
    sym = 0.5 * (m + m.conj().T)
    try:
        values, vecs = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    for k in range(vecs.shape[1]):
        vecs[:, k] = fix_phase(vecs[:, k])
    unitary = vecs.conj().T.copy()
    values = values.copy()
    values.setflags(write=False)
    unitary.setflags(write=False)
    return EigenDecomposition(values, unitary)


def group_degenerate(values, tol_degeneracy: float) -> list[range]:
    """Split ascending ``values`` into maximal runs of near-equal entries.

    Consecutive values join a run when their gap is at most
    ``tol_degeneracy * max(1, |median|)`` (single linkage, so chains merge).
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return []
    if np.any(np.diff(values) < 0):
        raise ValidationError("values must be sorted ascending")
    thresh = tol_degeneracy * max(1.0, abs(float(np.median(values))))
    blocks = []
    start = 0
    for i in range(1, len(values)):
        if values[i] - values[i - 1] > thresh:
            blocks.append(range(start, i))
            start = i
    blocks.append(range(start, len(values)))
    return blocks


@dataclass(frozen=True, eq=False)
class DressedSystem:
    s_upper: NDArray[np.complex128]
    s_lower: NDArray[np.complex128]
    delta: NDArray[np.float64]
    omega: NDArray[np.float64]
    coupling: NDArray[np.complex128]
    blocks: tuple[range, ...]
    upper_order: tuple[int, ...]
    lower_order: tuple[int, ...]

    @property
    def block_dims(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def arrowhead(self) -> NDArray[np.complex128]:
        nu, nl = len(self.delta), len(self.omega)
        h = np.zeros((nu + nl, nu + nl), dtype=np.complex128)
        h[:nu, :nu] = np.diag(self.delta)
        h[nu:, nu:] = np.diag(self.omega)
        h[:nu, nu:] = self.coupling
        h[nu:, :nu] = self.coupling.conj().T
        return h


def dress(block: BlockHamiltonian, tol: Tolerances | None = None) -> DressedSystem:
    tol = tol or Tolerances()
    up = hermitian_eigendecompose(block.h_upper)
    lo = hermitian_eigendecompose(block.h_lower)
    c = up.unitary @ block.coupling @ lo.unitary.conj().T
    c.setflags(write=False)
    blocks = tuple(group_degenerate(lo.values, tol.tol_degeneracy))
    return DressedSystem(
        up.unitary, lo.unitary, up.values, lo.values, c, blocks,
        block.upper_order, block.lower_order,
    )
