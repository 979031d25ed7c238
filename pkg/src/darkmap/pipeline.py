"""End-to-end runs: system description to dark-state report."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .catalog import CatalogEntry
from .darkstate import DarkStateReport, analyze, subspace_distance
from .dressing import DressedSystem, Tolerances, dress
from .errors import EmptyUpper
from .partition import BlockHamiltonian, partition
from .system_model import RotatingHamiltonian, SystemSpec, to_rotating_frame

# acceptance distance between a computed and an expected dark subspace
EXPECTED_DISTANCE = 1e-8


@dataclass(frozen=True, eq=False)
class Analysis:
    spec: SystemSpec
    hamiltonian: RotatingHamiltonian
    block: BlockHamiltonian
    dressed: DressedSystem
    report: DarkStateReport


def run(spec: SystemSpec, upper: Iterable[int] | None = None, tol: Tolerances | None = None) -> Analysis:
    """``upper`` falls back to the partition carried by ``spec``."""
    tol = tol or Tolerances()
    if upper is None:
        upper = spec.upper
    if upper is None:
        raise EmptyUpper("no upper subspace given (use --upper or an \"upper\" field)")
    ham = to_rotating_frame(spec)
    block = partition(ham, upper)
    dressed = dress(block, tol)
    return Analysis(spec, ham, block, dressed, analyze(dressed, tol))


@dataclass(frozen=True)
class EntryCheck:
    expected_count: int | None
    actual_count: int
    distance: float | None
    passed: bool

    def as_dict(self) -> dict:
        return {
            "expected_count": self.expected_count,
            "actual_count": self.actual_count,
            "distance": self.distance,
            "pass": self.passed,
        }


def check_entry(entry: CatalogEntry, report: DarkStateReport) -> EntryCheck:
    """Compare a report with the entry's expectation (exact count, span within 1e-8)."""
    actual = report.total_dark
    if entry.expected is None:
        return EntryCheck(None, actual, None, True)
    ok = actual == entry.expected.count
    dist = None
    vecs = entry.expected.vectors
    if vecs is not None and ok:
        if actual == 0:
            dist = 0.0
        else:
            q, _ = np.linalg.qr(np.asarray(vecs).T)
            dist = subspace_distance(q.T, report.dark_lower)
            ok = dist <= EXPECTED_DISTANCE
    return EntryCheck(entry.expected.count, actual, dist, ok)


def run_entry(entry: CatalogEntry, tol: Tolerances | None = None) -> tuple[Analysis, EntryCheck]:
    analysis = run(entry.spec, entry.partition.upper, tol)
    return analysis, check_entry(entry, analysis.report)
