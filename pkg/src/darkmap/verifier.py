"""Independent checks on reported dark states.

Two kinds of evidence are collected for each state: static residuals (the
state's coupling into the upper levels, and how far it is from an eigenstate)
and dynamics (the upper-level population reached under exact unitary
evolution with the full Hamiltonian).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import ConvergenceFailure, DimensionMismatch, ValidationError


@dataclass(frozen=True, eq=False)
class EvolutionSample:
    t: float
    state: NDArray[np.complex128]
    upper_population: float


@dataclass(frozen=True)
class VerificationResult:
    """Per-state metrics and the thresholds they were held to.

    A state passes when its decoupling residual is at most
    ``tol * ||H||_max``, its eigen-residual at most ``tol * (1 + ||H||_max)``
    and its largest sampled upper population at most ``tol``.
    """

    residuals: tuple[float, ...]
    eigen_residuals: tuple[float, ...]
    max_leakage: tuple[float, ...]
    thresholds: tuple[float, float, float]
    passed: bool

    def failures(self) -> list[int]:
        r_tol, e_tol, l_tol = self.thresholds
        return [
            k
            for k in range(len(self.residuals))
            if self.residuals[k] > r_tol
            or self.eigen_residuals[k] > e_tol
            or self.max_leakage[k] > l_tol
        ]

    def as_dict(self) -> dict:
        return {
            "residuals": list(self.residuals),
            "eigen_residuals": list(self.eigen_residuals),
            "max_leakage": list(self.max_leakage),
            "thresholds": {
                "decoupling": self.thresholds[0],
                "eigen": self.thresholds[1],
                "leakage": self.thresholds[2],
            },
            "pass": self.passed,
        }


def _square(h) -> NDArray[np.complex128]:
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {h.shape}")
    return h


def _vector(state, dim: int) -> NDArray[np.complex128]:
    v = np.asarray(state, dtype=np.complex128).reshape(-1)
    if v.shape[0] != dim:
        raise DimensionMismatch(f"state has {v.shape[0]} entries, matrix has dimension {dim}")
    return v


def decoupling_residual(h, state, upper_indices: Sequence[int]) -> float:
    """Largest coupling ``|(H state)_j|`` into any upper index ``j``."""
    h = _square(h)
    v = _vector(state, h.shape[0])
    idx = np.asarray(list(upper_indices), dtype=np.intp)
    if idx.size == 0:
        return 0.0
    if idx.min() < 0 or idx.max() >= h.shape[0]:
        raise DimensionMismatch("upper index out of range")
    return float(np.abs((h @ v)[idx]).max())


def eigen_residual(h, state, value: float | None = None) -> float:
    """``||H s - E s||``; ``E`` defaults to the Rayleigh quotient."""
    h = _square(h)
    v = _vector(state, h.shape[0])
    hv = h @ v
    if value is None:
        value = float(np.vdot(v, hv).real / np.vdot(v, v).real)
    return float(np.linalg.norm(hv - value * v))


class Propagator:
    """Exact propagator ``exp(-i H t)`` via one Hermitian eigendecomposition."""

    def __init__(self, h):
        h = _square(h)
        sym = 0.5 * (h + h.conj().T)
        try:
            self.energies, self.vectors = np.linalg.eigh(sym)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailure(str(exc)) from exc

    def __call__(self, state, t: float) -> NDArray[np.complex128]:
        v = _vector(state, len(self.energies))
        amps = self.vectors.conj().T @ v
        return self.vectors @ (np.exp(-1j * self.energies * t) * amps)

    def many(self, state, times) -> NDArray[np.complex128]:
        """States at each time, one per row."""
        v = _vector(state, len(self.energies))
        amps = self.vectors.conj().T @ v
        phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), self.energies))
        return (phases * amps) @ self.vectors.T


def evolve(h, state0, t: float) -> NDArray[np.complex128]:
    return Propagator(h)(state0, t)


def upper_population(state, upper_indices: Sequence[int]) -> float:
    v = np.asarray(state)
    idx = list(upper_indices)
    return float(np.sum(np.abs(v[idx]) ** 2)) if idx else 0.0


def sample(h, state0, times, upper_indices) -> list[EvolutionSample]:
    prop = Propagator(h)
    states = prop.many(state0, times)
    return [
        EvolutionSample(float(t), s, upper_population(s, upper_indices))
        for t, s in zip(times, states)
    ]


def default_times(h, count: int = 64, periods: float = 20.0) -> NDArray[np.float64]:
    """``count`` points over ``[0, periods * 2 pi / w]`` with ``w`` the largest ``|H|`` entry."""
    scale = max(float(np.abs(np.asarray(h)).max(initial=0.0)), 1e-12)
    return np.linspace(0.0, periods * 2 * np.pi / scale, count)


def leakage_scan(
    h,
    dark_states,
    times,
    upper_indices: Sequence[int],
    tol_residual: float = 1e-9,
    eigenvalues: Sequence[float] | None = None,
) -> VerificationResult:
    """Evolve each state with ``h`` and record residuals and peak upper population.

    ``dark_states`` holds one state per row over the same basis as ``h``.
    """
    h = _square(h)
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise ValidationError("leakage_scan needs at least one time")
    states = np.atleast_2d(np.asarray(dark_states, dtype=np.complex128))
    if states.size == 0:
        states = states.reshape(0, h.shape[0])
    if states.shape[1] != h.shape[0]:
        raise DimensionMismatch(
            f"states have {states.shape[1]} entries, matrix has dimension {h.shape[0]}"
        )
    scale = float(np.abs(h).max(initial=0.0))
    thresholds = (tol_residual * scale, tol_residual * (1 + scale), tol_residual)
    prop = Propagator(h)
    idx = list(upper_indices)
    residuals, eig_res, leak = [], [], []
    for k, s in enumerate(states):
        residuals.append(decoupling_residual(h, s, idx))
        value = None if eigenvalues is None else float(eigenvalues[k])
        eig_res.append(eigen_residual(h, s, value))
        evolved = prop.many(s, times)
        pops = np.sum(np.abs(evolved[:, idx]) ** 2, axis=1) if idx else np.zeros(len(times))
        leak.append(float(pops.max()))
    passed = all(r <= thresholds[0] for r in residuals) and all(
        e <= thresholds[1] for e in eig_res
    ) and all(p <= thresholds[2] for p in leak)
    return VerificationResult(tuple(residuals), tuple(eig_res), tuple(leak), thresholds, passed)


def verify(report, ham, times=None) -> VerificationResult:
    """Run :func:`leakage_scan` on the dark states of an analysis report.

    ``ham`` is the :class:`RotatingHamiltonian` the report was computed from.
    """
    h = ham.matrix
    upper_idx = [ham.index(lvl) for lvl in report.upper_order]
    # dark_full is over descending labels, which is also the Hamiltonian's order
    assert tuple(ham.basis_order) == report.basis_order
    if times is None:
        times = default_times(h)
    return leakage_scan(
        h,
        report.dark_full,
        times,
        upper_idx,
        report.tolerances.tol_residual,
        eigenvalues=report.dark_eigenvalues,
    )
