"""Upper/lower partition of a rotating-frame Hamiltonian."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from numpy.typing import NDArray

from .errors import EmptyUpper, LowerTooSmall, UnknownLevel
from .system_model import RotatingHamiltonian


@dataclass(frozen=True)
class Partition:
    upper: tuple[int, ...]
    lower: tuple[int, ...]

    @classmethod
    def from_upper(cls, levels: Iterable[int], upper_ids: Iterable[int]) -> "Partition":
        levels = set(levels)
        upper = set(upper_ids)
        unknown = sorted(upper - levels)
        if unknown:
            raise UnknownLevel(f"upper levels {unknown} are not part of the system")
        if not upper:
            raise EmptyUpper("the upper (target) subspace must contain at least one level")
        lower = levels - upper
        if len(lower) < 2:
            raise LowerTooSmall(
                f"the lower subspace needs at least two levels, got {len(lower)}"
            )
        return cls(tuple(sorted(upper, reverse=True)), tuple(sorted(lower, reverse=True)))


@dataclass(frozen=True, eq=False)
class BlockHamiltonian:
    """``[[h_upper, coupling], [coupling^dagger, h_lower]]`` over upper then lower levels."""

    h_upper: NDArray[np.complex128]
    h_lower: NDArray[np.complex128]
    coupling: NDArray[np.complex128]
    upper_order: tuple[int, ...]
    lower_order: tuple[int, ...]

    @property
    def n_upper(self) -> int:
        return len(self.upper_order)

    @property
    def n_lower(self) -> int:
        return len(self.lower_order)

    @property
    def order(self) -> tuple[int, ...]:
        return self.upper_order + self.lower_order


def permutation(ham: RotatingHamiltonian, block: BlockHamiltonian) -> NDArray[np.intp]:
    """Indices ``p`` with ``assemble_full(block) == ham.matrix[np.ix_(p, p)]``."""
    return np.array([ham.index(lvl) for lvl in block.order], dtype=np.intp)


def partition(ham: RotatingHamiltonian, upper_ids: Iterable[int]) -> BlockHamiltonian:
    part = Partition.from_upper(ham.basis_order, upper_ids)
    iu = [ham.index(lvl) for lvl in part.upper]
    il = [ham.index(lvl) for lvl in part.lower]
    m = ham.matrix
    blocks = (
        m[np.ix_(iu, iu)].copy(),
        m[np.ix_(il, il)].copy(),
        m[np.ix_(iu, il)].copy(),
    )
    for b in blocks:
        b.setflags(write=False)
    return BlockHamiltonian(*blocks, part.upper, part.lower)


def assemble_full(block: BlockHamiltonian) -> NDArray[np.complex128]:
    nu, nl = block.n_upper, block.n_lower
    h = np.zeros((nu + nl, nu + nl), dtype=np.complex128)
    h[:nu, :nu] = block.h_upper
    h[nu:, nu:] = block.h_lower
    h[:nu, nu:] = block.coupling
    h[nu:, :nu] = block.coupling.conj().T
    return h
