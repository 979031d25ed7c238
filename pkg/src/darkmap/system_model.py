"""System descriptions and their reduction to a rotating-frame Hamiltonian.

Units: hbar = 1 and every frequency is angular. Nothing is converted.

Basis convention used everywhere in the package: levels are ordered by
descending label, so index 0 is the top level ``|N>`` and index ``N-1`` is
``|1>``. A transition ``(j, j')`` with ``j < j'`` and amplitude ``Omega``
contributes ``Omega |j'><j| + h.c.``, i.e. it sits in the upper triangle of
the matrix at row ``idx(j')``, column ``idx(j)``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

import jsonschema
import numpy as np
from numpy.typing import NDArray

from .errors import (
    InconsistentDetunings,
    MissingDetuning,
    SchemaError,
    ValidationError,
)

_COMPLEX = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}

_UPPER = {"type": "array", "items": {"type": "integer"}}

_LAB_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["mode", "levels", "transitions"],
    "properties": {
        "mode": {"const": "lab"},
        "levels": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "energy"],
                "properties": {"id": {"type": "integer"}, "energy": {"type": "number"}},
            },
        },
        "transitions": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["from", "to", "amplitude"],
                "properties": {
                    "from": {"type": "integer"},
                    "to": {"type": "integer"},
                    "amplitude": _COMPLEX,
                    "drive_frequency": {"type": "number"},
                },
            },
        },
        "upper": _UPPER,
    },
}

_ROTATING_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["mode", "detunings", "transitions"],
    "properties": {
        "mode": {"const": "rotating"},
        "detunings": {
            "type": "object",
            "patternProperties": {"^[0-9]+$": {"type": "number"}},
            "additionalProperties": False,
        },
        "transitions": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["from", "to", "amplitude"],
                "properties": {
                    "from": {"type": "integer"},
                    "to": {"type": "integer"},
                    "amplitude": _COMPLEX,
                },
            },
        },
        "upper": _UPPER,
    },
}


@dataclass(frozen=True)
class Transition:
    """Coupling between levels ``source < target``."""

    source: int
    target: int
    amplitude: complex
    drive_frequency: float | None = None

    def __post_init__(self):
        if self.source >= self.target:
            raise ValidationError(
                f"transition ({self.source},{self.target}) must satisfy from < to"
            )


@dataclass(frozen=True)
class SystemSpec:
    """Validated system description.

    ``energies`` is indexed by ``level - 1`` and only set in lab mode;
    ``detunings`` maps each level ``r < N`` to its detuning from level ``N``
    and is only set in rotating mode. ``upper`` is the optional partition
    carried by the document.
    """

    mode: str
    n_levels: int
    transitions: tuple[Transition, ...]
    energies: tuple[float, ...] | None = None
    detunings: Mapping[int, float] | None = None
    upper: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.mode not in ("lab", "rotating"):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if self.n_levels < 2:
            raise ValidationError("a system needs at least two levels")
        if self.mode == "lab":
            if self.energies is None or len(self.energies) != self.n_levels:
                raise ValidationError("lab mode needs one energy per level")
            if not all(np.isfinite(self.energies)):
                raise ValidationError("level energies must be finite")
        seen = set()
        for t in self.transitions:
            if not (1 <= t.source <= self.n_levels and 1 <= t.target <= self.n_levels):
                raise ValidationError(
                    f"transition ({t.source},{t.target}) references an unknown level"
                )
            pair = (t.source, t.target)
            if pair in seen:
                raise ValidationError(f"duplicate transition {pair}")
            seen.add(pair)
        if self.upper is not None:
            for u in self.upper:
                if not 1 <= u <= self.n_levels:
                    raise ValidationError(f"upper level {u} is not a level of the system")

    @property
    def levels(self) -> tuple[int, ...]:
        return tuple(range(1, self.n_levels + 1))

    def amplitude(self, j: int, jp: int) -> complex:
        for t in self.transitions:
            if (t.source, t.target) == (j, jp):
                return t.amplitude
        return 0j

    def transition(self, j: int, jp: int) -> Transition | None:
        for t in self.transitions:
            if (t.source, t.target) == (j, jp):
                return t
        return None


@dataclass(frozen=True)
class ResonanceViolation:
    """A loop ``r -> r' -> N`` whose detunings do not close."""

    r: int
    r_prime: int
    n: int
    residual: float


@dataclass(frozen=True, eq=False)
class RotatingHamiltonian:
    matrix: NDArray[np.complex128]
    basis_order: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis_order)

    def index(self, level: int) -> int:
        return self.basis_order.index(level)

    def detunings(self) -> dict[int, float]:
        """Read the detunings back off the diagonal."""
        n = self.dim
        return {lvl: float(-self.matrix[self.index(lvl), self.index(lvl)].real)
                for lvl in range(1, n)}


def _decode_complex(pair) -> complex:
    return complex(float(pair[0]), float(pair[1]))


def parse_system(document: str | bytes) -> SystemSpec:
    """Parse a JSON system description into a validated :class:`SystemSpec`."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("mode") not in ("lab", "rotating"):
        raise SchemaError('document must be an object with "mode" of "lab" or "rotating"')
    schema = _LAB_SCHEMA if doc["mode"] == "lab" else _ROTATING_SCHEMA
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise SchemaError(exc.message) from exc

    upper = tuple(doc["upper"]) if "upper" in doc else None

    if doc["mode"] == "lab":
        ids = [lv["id"] for lv in doc["levels"]]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate level id")
        n = len(ids)
        if sorted(ids) != list(range(1, n + 1)):
            raise ValidationError(f"level ids must be exactly 1..{n}")
        energies = [0.0] * n
        for lv in doc["levels"]:
            energies[lv["id"] - 1] = float(lv["energy"])
        transitions = []
        for t in doc["transitions"]:
            if t["from"] == t["to"]:
                raise ValidationError(f"self-transition on level {t['from']}")
            if not (1 <= t["from"] <= n and 1 <= t["to"] <= n):
                raise ValidationError(f"transition ({t['from']},{t['to']}) references an unknown level")
            amp = _decode_complex(t["amplitude"])
            freq = t.get("drive_frequency")
            if amp != 0 and freq is None:
                raise ValidationError(
                    f"transition ({t['from']},{t['to']}) has nonzero amplitude but no drive_frequency"
                )
            transitions.append(
                Transition(t["from"], t["to"], amp, None if freq is None else float(freq))
            )
        return SystemSpec("lab", n, tuple(transitions), energies=tuple(energies), upper=upper)

    det = {int(k): float(v) for k, v in doc["detunings"].items()}
    n = len(det) + 1
    if sorted(det) != list(range(1, n)):
        raise ValidationError(
            f"rotating mode needs a detuning for every level 1..{n - 1} and none for level {n}"
        )
    transitions = []
    for t in doc["transitions"]:
        if t["from"] == t["to"]:
            raise ValidationError(f"self-transition on level {t['from']}")
        transitions.append(Transition(t["from"], t["to"], _decode_complex(t["amplitude"])))
    return SystemSpec("rotating", n, tuple(transitions), detunings=det, upper=upper)


def spec_to_document(spec: SystemSpec) -> dict:
    """Inverse of :func:`parse_system` (as a JSON-ready dict)."""
    doc: dict = {"mode": spec.mode}
    if spec.mode == "lab":
        doc["levels"] = [{"id": i + 1, "energy": e} for i, e in enumerate(spec.energies)]
    else:
        doc["detunings"] = {str(k): spec.detunings[k] for k in sorted(spec.detunings)}
    trans = []
    for t in spec.transitions:
        item = {"from": t.source, "to": t.target,
                "amplitude": [t.amplitude.real, t.amplitude.imag]}
        if spec.mode == "lab" and t.drive_frequency is not None:
            item["drive_frequency"] = t.drive_frequency
        trans.append(item)
    doc["transitions"] = trans
    if spec.upper is not None:
        doc["upper"] = list(spec.upper)
    return doc


def default_consistency_tol(spec: SystemSpec) -> float:
    emax = max((abs(e) for e in spec.energies), default=0.0) if spec.energies else 0.0
    return 1e-9 * max(1.0, emax)


def _detuning(spec: SystemSpec, j: int, jp: int) -> float:
    t = spec.transition(j, jp)
    return spec.energies[jp - 1] - spec.energies[j - 1] - t.drive_frequency


def _active(spec: SystemSpec, j: int, jp: int) -> bool:
    t = spec.transition(j, jp)
    return t is not None and t.amplitude != 0


def validate_loop_resonance(
    spec: SystemSpec, tol_consistency: float | None = None
) -> list[ResonanceViolation]:
    """Check ``D_rN - D_r'N == D_rr'`` on every fully driven triangle through ``N``.

    Triangles with any zero-amplitude leg impose no constraint.
    """
    if spec.mode != "lab":
        raise ValidationError("loop resonance is only defined for lab-mode systems")
    tol = default_consistency_tol(spec) if tol_consistency is None else tol_consistency
    n = spec.n_levels
    out = []
    for r, rp in combinations(range(1, n), 2):
        if not (_active(spec, r, rp) and _active(spec, r, n) and _active(spec, rp, n)):
            continue
        residual = _detuning(spec, r, n) - _detuning(spec, rp, n) - _detuning(spec, r, rp)
        if abs(residual) > tol:
            out.append(ResonanceViolation(r, rp, n, residual))
    return out


def _frame_offsets(spec: SystemSpec, tol: float) -> dict[int, float]:
    """Solve ``x_j' - x_j = w_jj'`` over the driven-transition graph.

    ``x_N = E_N``; components that do not reach ``N`` are anchored at their
    highest level with zero detuning.
    """
    n = spec.n_levels
    adj: dict[int, list[tuple[int, float]]] = {lvl: [] for lvl in spec.levels}
    for t in spec.transitions:
        if t.amplitude == 0:
            continue
        adj[t.source].append((t.target, -t.drive_frequency))
        adj[t.target].append((t.source, t.drive_frequency))
    x: dict[int, float] = {}
    bad = []
    for root in sorted(spec.levels, reverse=True):
        if root in x:
            continue
        x[root] = spec.energies[root - 1]
        queue = deque([root])
        while queue:
            a = queue.popleft()
            for b, w in adj[a]:
                # for edge a->b, x_b = x_a - w_ab where w_ab is signed so that
                # x_target - x_source = drive frequency
                xb = x[a] - w
                if b not in x:
                    x[b] = xb
                    queue.append(b)
                elif abs(x[b] - xb) > tol:
                    lo, hi = sorted((a, b))
                    bad.append(ResonanceViolation(lo, hi, root, x[b] - xb))
    if bad:
        # deduplicate: each edge is seen from both ends
        uniq = {(v.r, v.r_prime): v for v in bad}
        raise InconsistentDetunings(sorted(uniq.values(), key=lambda v: (v.r, v.r_prime)))
    assert n in x
    return x


def _assemble(n: int, diag: Sequence[float], transitions: Sequence[Transition]) -> RotatingHamiltonian:
    order = tuple(range(n, 0, -1))
    h = np.zeros((n, n), dtype=np.complex128)
    for lvl in range(1, n + 1):
        h[n - lvl, n - lvl] = diag[lvl - 1]
    for t in transitions:
        row, col = n - t.target, n - t.source
        h[row, col] = t.amplitude
        h[col, row] = np.conj(t.amplitude)
    assert np.array_equal(h, h.conj().T)
    h.setflags(write=False)
    return RotatingHamiltonian(h, order)


def to_rotating_frame(spec: SystemSpec, tol_consistency: float | None = None) -> RotatingHamiltonian:
    """Build the time-independent Hamiltonian in the frame co-rotating with the drives."""
    n = spec.n_levels
    if spec.mode == "rotating":
        missing = [r for r in range(1, n) if r not in spec.detunings]
        if missing:
            raise MissingDetuning(f"no detuning given for levels {missing}")
        diag = [-spec.detunings[r] for r in range(1, n)] + [0.0]
        return _assemble(n, diag, spec.transitions)

    tol = default_consistency_tol(spec) if tol_consistency is None else tol_consistency
    violations = validate_loop_resonance(spec, tol)
    if violations:
        raise InconsistentDetunings(violations)
    x = _frame_offsets(spec, tol)
    diag = []
    for r in range(1, n):
        if _active(spec, r, n):
            # same operation order as the detuning definition, so lab and
            # rotating descriptions agree bit for bit
            diag.append(-_detuning(spec, r, n))
        else:
            diag.append(-(x[r] - spec.energies[r - 1]))
    diag.append(0.0)
    return _assemble(n, diag, spec.transitions)


def rotating_equivalent(spec: SystemSpec, tol_consistency: float | None = None) -> SystemSpec:
    """Rotating-mode spec with the detunings implied by a lab-mode spec."""
    ham = to_rotating_frame(spec, tol_consistency)
    trans = tuple(Transition(t.source, t.target, t.amplitude) for t in spec.transitions)
    return SystemSpec("rotating", spec.n_levels, trans, detunings=ham.detunings(), upper=spec.upper)
