"""JSON form of a :class:`DarkStateReport`.

Complex numbers are written as ``[re, im]`` pairs. Floats go through
``repr`` in :mod:`json`, so ``parse(emit(r))`` rebuilds every field bit for
bit. Output is deterministic: fixed key order and indentation.
"""

from __future__ import annotations

import json
from dataclasses import replace
from typing import Any

import numpy as np

from .darkstate import BlockAnalysis, DarkStateReport
from .dressing import Tolerances
from .errors import SchemaError


def _cvec(v) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=np.complex128)]


def _cmat(m) -> list[list[list[float]]]:
    return [_cvec(row) for row in np.asarray(m, dtype=np.complex128)]


def _read_cmat(rows, width: int) -> np.ndarray:
    out = np.array(
        [[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128
    )
    return out.reshape(-1, width)


def to_dict(report: DarkStateReport, verify: dict | None = None) -> dict[str, Any]:
    blocks = []
    dark_row = 0
    for b in report.blocks:
        bare = report.dark_lower[dark_row:dark_row + b.n_dark]
        dark_row += b.n_dark
        blocks.append({
            "index": b.index,
            "start": b.columns.start,
            "dim": b.dim,
            "omega": b.eigenvalue,
            "rank": b.rank,
            "singular_values": [float(s) for s in b.singular_values],
            "zero_columns": list(b.zero_columns),
            "bright_states_dressed": _cmat(b.bright_states),
            "dark_states_dressed": _cmat(b.dark_states),
            "dark_states_bare": _cmat(bare),
        })
    out: dict[str, Any] = {
        "n_upper": report.n_upper,
        "n_lower": report.n_lower,
        "upper_order": list(report.upper_order),
        "lower_order": list(report.lower_order),
        "basis_order": list(report.basis_order),
        "sigma_max": report.sigma_max,
        "blocks": blocks,
        "total_dark": report.total_dark,
        "total_rank": report.total_rank,
        "tolerances": report.tolerances.as_dict(),
    }
    if verify is not None:
        out["verify"] = verify
    return out


def emit(report: DarkStateReport, verify: dict | None = None, **extra) -> str:
    doc = to_dict(report, verify)
    doc.update(extra)
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def from_dict(doc: dict) -> DarkStateReport:
    try:
        nu, nl = int(doc["n_upper"]), int(doc["n_lower"])
        upper = tuple(int(x) for x in doc["upper_order"])
        lower = tuple(int(x) for x in doc["lower_order"])
        blocks, dressed, bare, values = [], [], [], []
        for raw in doc["blocks"]:
            cols = range(int(raw["start"]), int(raw["start"]) + int(raw["dim"]))
            dark = _read_cmat(raw["dark_states_dressed"], len(cols))
            block = BlockAnalysis(
                index=int(raw["index"]),
                columns=cols,
                eigenvalue=float(raw["omega"]),
                rank=int(raw["rank"]),
                singular_values=np.array(raw["singular_values"], dtype=float),
                bright_states=_read_cmat(raw["bright_states_dressed"], len(cols)),
                dark_states=dark,
                zero_columns=tuple(int(c) for c in raw["zero_columns"]),
            )
            block.singular_values.setflags(write=False)
            blocks.append(block)
            for v in dark:
                padded = np.zeros(nl, dtype=np.complex128)
                padded[cols.start:cols.stop] = v
                dressed.append(padded)
                values.append(block.eigenvalue)
            bare.append(_read_cmat(raw["dark_states_bare"], nl))
        tol = Tolerances(**{k: float(v) for k, v in doc["tolerances"].items()})
        sigma_max = float(doc["sigma_max"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed report: {exc!r}") from exc

    lower_bare = np.concatenate(bare) if bare else np.zeros((0, nl), dtype=np.complex128)
    report = DarkStateReport(
        n_upper=nu,
        n_lower=nl,
        upper_order=upper,
        lower_order=lower,
        blocks=tuple(blocks),
        sigma_max=sigma_max,
        tolerances=tol,
        dark_dressed=np.array(dressed, dtype=np.complex128).reshape(-1, nl),
        dark_lower=lower_bare,
        dark_eigenvalues=np.array(values, dtype=float),
    )
    order = report.basis_order
    full = np.zeros((lower_bare.shape[0], len(order)), dtype=np.complex128)
    for i, lvl in enumerate(lower):
        full[:, order.index(lvl)] = lower_bare[:, i]
    return replace(report, dark_full=full)


def parse(text: str) -> DarkStateReport:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid report JSON: {exc}") from exc
    return from_dict(doc)


def _same(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and np.array_equal(a, b)


def reports_equal(a: DarkStateReport, b: DarkStateReport) -> bool:
    """Field-by-field exact equality."""
    scalars = ("n_upper", "n_lower", "upper_order", "lower_order", "sigma_max", "tolerances")
    if any(getattr(a, f) != getattr(b, f) for f in scalars):
        return False
    arrays = ("dark_dressed", "dark_lower", "dark_full", "dark_eigenvalues")
    if not all(_same(getattr(a, f), getattr(b, f)) for f in arrays):
        return False
    if len(a.blocks) != len(b.blocks):
        return False
    for x, y in zip(a.blocks, b.blocks):
        if (x.index, x.columns, x.eigenvalue, x.rank, x.zero_columns) != (
            y.index, y.columns, y.eigenvalue, y.rank, y.zero_columns
        ):
            return False
        if not all(
            _same(getattr(x, f), getattr(y, f))
            for f in ("singular_values", "bright_states", "dark_states")
        ):
            return False
    return True
