"""Parameterized generators for the standard coupling configurations.

Every generator returns a rotating-mode :class:`SystemSpec` together with the
partition it is meant to be analyzed under and, where a closed form is
known, the expected dark subspace. Expected vectors are built from analytic
dressed states and coupling columns written out by hand for each
configuration; they never go through the numerical pipeline, so they act as
an oracle for it.

Level conventions follow :mod:`darkmap.system_model`: lower and upper states
are listed in descending label order, and expected vectors are coefficient
rows over ``partition.lower``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from numpy.typing import NDArray

from .darkstate import ProportionalColumns, recursive_bright_dark
from .errors import (
    BadKindParameters,
    ExcitationExceedsAtoms,
    NotProportional,
    ValidationError,
    ZeroDenominatorCoupling,
)
from .partition import Partition
from .system_model import SystemSpec, Transition

# relative threshold used when evaluating closed forms (zero columns,
# equal eigenvalues, proportional columns)
ORACLE_TOL = 1e-9
MAX_EXCITATIONS = 64

SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)
SQ6 = math.sqrt(6.0)


@dataclass(frozen=True, eq=False)
class ExpectedDark:
    """Expected dark count and, if known, vectors spanning the dark subspace."""

    count: int
    vectors: NDArray[np.complex128] | None = None


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    params: dict
    spec: SystemSpec
    partition: Partition
    expected: ExpectedDark | None
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------- helpers


def _as_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise BadKindParameters(f"complex values are [re, im] pairs, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def _pair(key) -> tuple[int, int]:
    if isinstance(key, tuple):
        j, jp = key
    else:
        s = str(key).replace(",", "").replace(" ", "")
        if len(s) != 2 or not s.isdigit():
            raise BadKindParameters(f"cannot read transition key {key!r}")
        j, jp = int(s[0]), int(s[1])
    j, jp = int(j), int(jp)
    if j == jp:
        raise BadKindParameters(f"transition key {key!r} is a self-transition")
    return (j, jp) if j < jp else (jp, j)


def _amplitudes(raw: Mapping | None, n: int) -> dict[tuple[int, int], complex]:
    out: dict[tuple[int, int], complex] = {}
    for key, value in (raw or {}).items():
        j, jp = _pair(key)
        if jp > n:
            raise BadKindParameters(f"transition ({j},{jp}) is outside a {n}-level system")
        out[(j, jp)] = _as_complex(value)
    return out


def _close(a: complex, b: complex, scale: float = 1.0) -> bool:
    return abs(a - b) <= ORACLE_TOL * max(1.0, scale)


def _build_spec(
    n: int,
    amps: Mapping[tuple[int, int], complex],
    detunings: Mapping[int, float],
    upper: Sequence[int],
) -> tuple[SystemSpec, Partition]:
    trans = tuple(
        Transition(j, jp, complex(a)) for (j, jp), a in sorted(amps.items()) if a != 0
    )
    det = {r: float(detunings.get(r, 0.0)) for r in range(1, n)}
    spec = SystemSpec("rotating", n, trans, detunings=det, upper=tuple(sorted(upper, reverse=True)))
    return spec, Partition.from_upper(spec.levels, upper)


def _groups(values: Sequence[float]) -> list[list[int]]:
    """Indices with equal closed-form eigenvalues, in ascending order of value."""
    order = sorted(range(len(values)), key=lambda k: values[k])
    out: list[list[int]] = []
    for k in order:
        if out and abs(values[k] - values[out[-1][-1]]) <= ORACLE_TOL * max(1.0, abs(values[k])):
            out[-1].append(k)
        else:
            out.append([k])
    return out


def expected_from_dressed(kets, values, columns) -> ExpectedDark | None:
    """Dark subspace predicted from closed-form dressed quantities.

    ``kets`` are the dressed lower states as rows over the bare lower basis,
    ``values`` their eigenvalues and ``columns`` the ``N_u x N_l`` dressed
    coupling matrix. Within each degenerate group: a zero column is dark; a
    set of mutually proportional columns yields all but one state via the
    bright/dark recursion; two independent columns leave nothing; three
    columns of rank two over two upper states leave the cross-product
    combination. Anything else returns ``None``.
    """
    kets = np.asarray(kets, dtype=np.complex128)
    columns = np.atleast_2d(np.asarray(columns, dtype=np.complex128))
    n_upper = columns.shape[0]
    scale = float(np.abs(columns).max(initial=0.0))
    darks: list[NDArray] = []
    for group in _groups(list(values)):
        zero = [k for k in group if np.linalg.norm(columns[:, k]) <= ORACLE_TOL * max(scale, 1e-300)]
        darks.extend(kets[k] for k in zero)
        live = [k for k in group if k not in zero]
        if len(live) < 2:
            continue
        sub = columns[:, live]
        try:
            ratios = ProportionalColumns.from_block(sub, tol_rank=ORACLE_TOL, reference=0)
        except NotProportional:
            ratios = None
        if ratios is not None:
            _, coeffs = recursive_bright_dark(ratios)
            darks.extend(c @ kets[live] for c in coeffs)
        elif len(live) == 2:
            continue
        elif n_upper == 2 and len(live) == 3:
            v = np.cross(sub[0], sub[1])
            darks.append((v / np.linalg.norm(v)) @ kets[live])
        else:
            return None
    vecs = np.array(darks, dtype=np.complex128).reshape(-1, kets.shape[1])
    return ExpectedDark(len(darks), vecs)


def _two_level_dressing(omega12: complex, delta: float):
    """Closed-form dressed pair of two lower levels with equal detuning ``delta``.

    Returns kets over ``(l_1, l_2)``, eigenvalues and ``exp(-i theta)``.
    """
    mag = abs(omega12)
    phase = np.exp(-1j * np.angle(omega12)) if mag else 1.0
    kets = np.array([[-1, phase], [1, phase]], dtype=np.complex128) / SQ2
    return kets, [-delta - mag, -delta + mag], phase


# symmetric three-level dressing (all couplings equal): rows over (l_1, l_2, l_3)
_SYM3 = np.array(
    [[-1 / SQ2, 0, 1 / SQ2], [-1 / SQ6, 2 / SQ6, -1 / SQ6], [1 / SQ3, 1 / SQ3, 1 / SQ3]],
    dtype=np.complex128,
)


# ---------------------------------------------------------------- three levels

_THREE_KINDS = {
    # kind: (upper level, amplitude that must vanish)
    "delta": (3, None),
    "lambda": (3, (1, 2)),
    "xi": (2, (1, 3)),
    "vee": (1, (2, 3)),
}


def gen_three_level(kind: str, amplitudes: Mapping, detunings: Mapping[int, float]) -> CatalogEntry:
    """Three-level system; ``detunings`` maps level 1 and 2 to their detuning from level 3."""
    if kind not in _THREE_KINDS:
        raise BadKindParameters(f"unknown three-level kind {kind!r}")
    upper, forbidden = _THREE_KINDS[kind]
    amps = _amplitudes(amplitudes, 3)
    if forbidden is not None and amps.get(forbidden, 0) != 0:
        raise BadKindParameters(
            f"{kind} systems need Omega{forbidden[0]}{forbidden[1]} = 0"
        )
    d13 = float(detunings.get(1, 0.0))
    d23 = float(detunings.get(2, 0.0))
    spec, part = _build_spec(3, amps, {1: d13, 2: d23}, [upper])
    o12, o13, o23 = (amps.get(p, 0j) for p in ((1, 2), (1, 3), (2, 3)))

    expected: ExpectedDark | None
    if kind in ("lambda", "delta") and o12 == 0:
        if _close(d13, d23):
            norm = math.sqrt(abs(o13) ** 2 + abs(o23) ** 2)
            if norm == 0:
                expected = ExpectedDark(2, np.eye(2, dtype=np.complex128))
            else:
                # over (l_1, l_2) = (|2>, |1>): Omega23 |l_2> - Omega13 |l_1>
                expected = ExpectedDark(1, np.array([[-o13, o23]]) / norm)
        else:
            expected = expected_from_dressed(np.eye(2), [-d23, -d13], [[o23, o13]])
    elif kind == "delta":
        if _close(d13, d23):
            kets, values, phase = _two_level_dressing(o12, d13)
            cols = [[(-o23 + phase * o13) / SQ2, (o23 + phase * o13) / SQ2]]
            expected = expected_from_dressed(kets, values, cols)
        else:
            expected = None
    elif kind == "xi":
        # lower (|3>, |1>) with diagonal (0, -D13); coupling row of |2>
        expected = expected_from_dressed(np.eye(2), [0.0, -d13], [[np.conj(o23), o12]])
    else:
        # lower (|3>, |2>) with diagonal (0, -D23); coupling row of |1>
        expected = expected_from_dressed(np.eye(2), [0.0, -d23], [[np.conj(o13), np.conj(o12)]])
    params = {"kind": kind, "amplitudes": amps, "detunings": {1: d13, 2: d23}}
    return CatalogEntry(f"three_level_{kind}", params, spec, part, expected)


# ---------------------------------------------------------------- four levels


def gen_four_level(config: int, amplitudes: Mapping, detunings: Mapping[int, float]) -> CatalogEntry:
    """Four-level configurations.

    Config 1: upper ``{4}``; the lower couplings ``Omega12 = Omega13 =
    Omega23`` must be one real value and ``D14 = D24 = D34``.
    Config 2: upper ``{4, 3}``; ``Omega34 = 0`` and ``D14 = D24``.
    """
    amps = _amplitudes(amplitudes, 4)
    det = {r: float(detunings.get(r, 0.0)) for r in (1, 2, 3)}
    a = lambda j, jp: amps.get((j, jp), 0j)  # noqa: E731

    if config == 1:
        om = a(1, 2)
        if not (a(1, 3) == om and a(2, 3) == om and om.imag == 0):
            raise BadKindParameters("config 1 needs Omega12 = Omega13 = Omega23 real")
        if not (det[1] == det[2] == det[3]):
            raise BadKindParameters("config 1 needs D14 = D24 = D34")
        spec, part = _build_spec(4, amps, det, [4])
        d, om = det[1], om.real
        o14, o24, o34 = a(1, 4), a(2, 4), a(3, 4)
        cols = [[(o14 - o34) / SQ2, (2 * o24 - o34 - o14) / SQ6, (o34 + o14 + o24) / SQ3]]
        expected = expected_from_dressed(_SYM3, [-d - om, -d - om, -d + 2 * om], cols)
    elif config == 2:
        if a(3, 4) != 0:
            raise BadKindParameters("config 2 needs Omega34 = 0")
        if det[1] != det[2]:
            raise BadKindParameters("config 2 needs D14 = D24")
        spec, part = _build_spec(4, amps, det, [4, 3])
        kets, values, ph = _two_level_dressing(a(1, 2), det[1])
        cols = [
            [(-a(2, 4) + ph * a(1, 4)) / SQ2, (a(2, 4) + ph * a(1, 4)) / SQ2],
            [(-a(2, 3) + ph * a(1, 3)) / SQ2, (a(2, 3) + ph * a(1, 3)) / SQ2],
        ]
        expected = expected_from_dressed(kets, values, cols)
    else:
        raise BadKindParameters(f"four-level config must be 1 or 2, got {config!r}")
    return CatalogEntry(
        f"four_level_{config}", {"config": config, "amplitudes": amps, "detunings": det},
        spec, part, expected,
    )


# ---------------------------------------------------------------- five levels

# four-fold symmetric dressing: rows over (l_1, ..., l_4)
_SYM4 = np.array(
    [[-SQ2, 0, 0, SQ2], [0, -SQ2, SQ2, 0], [1, -1, -1, 1], [1, 1, 1, 1]], dtype=np.complex128
) / 2


def gen_five_level(config: int, amplitudes: Mapping, detunings: Mapping[int, float]) -> CatalogEntry:
    """Five-level configurations.

    Config 1: upper ``{5}``; ``Omega34 = Omega24 = Omega12 = Omega13`` and
    ``Omega23 = Omega14`` real, all ``D_r5`` equal.
    Config 2: upper ``{5, 4}``; ``Omega23 = Omega12 = Omega13`` real,
    ``Omega45 = 0``, ``D35 = D25 = D15``.
    Config 3: upper ``{5, 4, 3}``; ``Omega45 = Omega35 = Omega34`` real,
    ``D45 = D35 = 0``, ``D25 = D15``.
    """
    amps = _amplitudes(amplitudes, 5)
    det = {r: float(detunings.get(r, 0.0)) for r in (1, 2, 3, 4)}
    a = lambda j, jp: amps.get((j, jp), 0j)  # noqa: E731

    def same_real(pairs) -> complex:
        vals = [a(*p) for p in pairs]
        if any(v != vals[0] for v in vals) or vals[0].imag != 0:
            names = ", ".join(f"Omega{j}{jp}" for j, jp in pairs)
            raise BadKindParameters(f"config {config} needs {names} equal and real")
        return vals[0].real

    if config == 1:
        o1 = same_real([(3, 4), (2, 4), (1, 2), (1, 3)])
        o2 = same_real([(2, 3), (1, 4)])
        if len(set(det.values())) != 1:
            raise BadKindParameters("config 1 needs D45 = D35 = D25 = D15")
        spec, part = _build_spec(5, amps, det, [5])
        d = det[1]
        o15, o25, o35, o45 = a(1, 5), a(2, 5), a(3, 5), a(4, 5)
        cols = [[
            (o15 - o45) / SQ2,
            (o25 - o35) / SQ2,
            (o45 - o35 - o25 + o15) / 2,
            (o45 + o35 + o25 + o15) / 2,
        ]]
        values = [-d - o2, -d - o2, -d - 2 * o1 + o2, -d + 2 * o1 + o2]
        expected = expected_from_dressed(_SYM4, values, cols)
    elif config == 2:
        om = same_real([(2, 3), (1, 2), (1, 3)])
        if a(4, 5) != 0:
            raise BadKindParameters("config 2 needs Omega45 = 0")
        if not (det[1] == det[2] == det[3]):
            raise BadKindParameters("config 2 needs D35 = D25 = D15")
        spec, part = _build_spec(5, amps, det, [5, 4])
        d = det[1]
        cols = [
            [(a(1, u) - a(3, u)) / SQ2,
             (2 * a(2, u) - a(3, u) - a(1, u)) / SQ6,
             (a(3, u) + a(2, u) + a(1, u)) / SQ3]
            for u in (5, 4)
        ]
        expected = expected_from_dressed(_SYM3, [-d - om, -d - om, -d + 2 * om], cols)
    elif config == 3:
        same_real([(4, 5), (3, 5), (3, 4)])
        if det[4] != 0 or det[3] != 0:
            raise BadKindParameters("config 3 needs D45 = D35 = 0")
        if det[1] != det[2]:
            raise BadKindParameters("config 3 needs D25 = D15")
        spec, part = _build_spec(5, amps, det, [5, 4, 3])
        kets, values, ph = _two_level_dressing(a(1, 2), det[1])
        minus = {u: -a(2, u) + ph * a(1, u) for u in (3, 4, 5)}
        plus = {u: a(2, u) + ph * a(1, u) for u in (3, 4, 5)}

        def column(x):
            return [
                (x[3] - x[5]) / 2,
                (2 * x[4] - x[5] - x[3]) / (2 * SQ3),
                (x[5] + x[4] + x[3]) / SQ6,
            ]

        cols = np.array([column(minus), column(plus)]).T
        expected = expected_from_dressed(kets, values, cols)
    else:
        raise BadKindParameters(f"five-level config must be 1, 2 or 3, got {config!r}")
    return CatalogEntry(
        f"five_level_{config}", {"config": config, "amplitudes": amps, "detunings": det},
        spec, part, expected,
    )


# ---------------------------------------------------------------- N levels

NLEVEL_CONFIGS = ("multipod", "multi_lambda", "lambda_chain", "n_chain", "v_chain")


def chain_edges(config: str, n: int) -> tuple[list[tuple[int, int]], list[int], list[int]]:
    """Zigzag edges ``(upper, lower)`` in order, plus upper and lower labels.

    Uppers ``u_1 = N, u_2 = N-1, ...``; lowers ``l_1, l_2, ...`` continue
    downward to level 1.
    """
    if config == "lambda_chain":
        if n < 3 or n % 2 == 0:
            raise BadKindParameters("lambda_chain needs an odd N >= 3")
        nu = (n - 1) // 2
    elif config == "n_chain":
        if n < 4 or n % 2:
            raise BadKindParameters("n_chain needs an even N >= 4")
        nu = n // 2
    elif config == "v_chain":
        if n < 5 or n % 2 == 0:
            raise BadKindParameters("v_chain needs an odd N >= 5")
        nu = (n + 1) // 2
    else:
        raise BadKindParameters(f"{config!r} is not a chain configuration")
    nl = n - nu
    ups = [n - k for k in range(nu)]
    lows = [nl - k for k in range(nl)]
    edges = []
    if config == "lambda_chain":
        for k in range(nu):
            edges += [(ups[k], lows[k]), (ups[k], lows[k + 1])]
    else:
        for k in range(nu):
            if k > 0:
                edges.append((ups[k], lows[k - 1]))
            if k < nl:
                edges.append((ups[k], lows[k]))
    assert len(edges) == n - 1
    return edges, ups, lows


def _zigzag(config: str, n: int, amplitudes) -> list[complex]:
    edges, _, _ = chain_edges(config, n)
    if isinstance(amplitudes, Mapping):
        amps = _amplitudes(amplitudes, n)
        extra = set(amps) - {(lo, up) for up, lo in edges}
        if extra:
            raise BadKindParameters(f"{config} has no transitions {sorted(extra)}")
        return [amps.get((lo, up), 0j) for up, lo in edges]
    zz = [_as_complex(z) for z in amplitudes]
    if len(zz) != n - 1:
        raise BadKindParameters(f"{config} with N={n} needs {n - 1} zigzag amplitudes, got {len(zz)}")
    return zz


def _lower_detunings(lows: Sequence[int], detunings) -> dict[int, float]:
    if detunings is None:
        return {}
    if isinstance(detunings, Mapping):
        return {int(k): float(v) for k, v in detunings.items()}
    vals = [float(v) for v in detunings]
    if len(vals) != len(lows):
        raise BadKindParameters(f"expected {len(lows)} lower detunings, got {len(vals)}")
    return dict(zip(lows, vals))


def analytic_lambda_chain_dark(n: int, amplitudes) -> NDArray[np.complex128]:
    """Closed-form dark state of a lambda chain over ``l_1 .. l_{(N+1)/2}``.

    With ``den_j`` and ``num_j`` the two couplings of upper ``u_{j+1}``
    (to ``l_{j+1}`` and ``l_{j+2}``), the coefficients are
    ``x_i = (-1)^(m-i) prod_{j=i}^{m-1} num_j / den_j`` with ``m = (N-1)/2``.
    """
    zz = _zigzag("lambda_chain", n, amplitudes)
    m = (n - 1) // 2
    den, num = zz[0::2], zz[1::2]
    for j, d in enumerate(den):
        if d == 0:
            raise ZeroDenominatorCoupling(f"the coupling of u_{j + 1} to l_{j + 1} is zero")
    x = np.zeros(m + 1, dtype=np.complex128)
    for i in range(m + 1):
        prod = 1.0 + 0j
        for j in range(i, m):
            prod *= num[j] / den[j]
        x[i] = (-1) ** (m - i) * prod
    return x / np.linalg.norm(x)


def _chain_entry(config, n, zz, detunings, name, params, check_pivots=True) -> CatalogEntry:
    edges, ups, lows = chain_edges(config, n)
    if check_pivots:
        # the first coupling of every upper (lambda) / every lower (n, v) is the pivot
        pivots = zz[0::2]
        if any(z == 0 for z in pivots):
            raise BadKindParameters(f"{config} needs nonzero couplings at even zigzag positions")
    amps = {(lo, up): z for (up, lo), z in zip(edges, zz)}
    det = _lower_detunings(lows, detunings)
    spec, part = _build_spec(n, amps, det, ups)
    values = [-det.get(lo, 0.0) for lo in lows]
    c = np.zeros((len(ups), len(lows)), dtype=np.complex128)
    for (up, lo), z in zip(edges, zz):
        c[ups.index(up), lows.index(lo)] = z
    degenerate = len(_groups(values)) == 1
    if degenerate and config == "lambda_chain" and all(z != 0 for z in zz[0::2]):
        expected = ExpectedDark(1, analytic_lambda_chain_dark(n, zz)[None, :])
    elif degenerate and config in ("n_chain", "v_chain") and all(z != 0 for z in zz[0::2]):
        expected = ExpectedDark(0, np.zeros((0, len(lows)), dtype=np.complex128))
    else:
        expected = expected_from_dressed(np.eye(len(lows)), values, c)
    return CatalogEntry(name, params, spec, part, expected)


def gen_nlevel(config: str, n: int, amplitudes, detunings=None) -> CatalogEntry:
    """N-level configurations without couplings inside either subspace.

    ``multipod``: ``amplitudes`` lists ``Omega_{jN}`` for ``l_1 = N-1`` down
    to ``l_{N-1} = 1``. ``multi_lambda``: ``amplitudes`` is a pair of lists
    (couplings of ``|2>`` and of ``|1>`` to uppers ``N .. 3``). Chains take
    the ``N - 1`` zigzag amplitudes in edge order or a transition mapping.
    ``detunings`` lists the lower detunings in ``l_1, l_2, ...`` order (or
    maps level to detuning); uppers sit at zero.
    """
    params = {"config": config, "N": n, "amplitudes": amplitudes, "detunings": detunings}
    if config == "multipod":
        if n < 3:
            raise BadKindParameters("multipod needs N >= 3")
        amp = [_as_complex(z) for z in amplitudes]
        if len(amp) != n - 1 or any(z == 0 for z in amp):
            raise BadKindParameters(f"multipod with N={n} needs {n - 1} nonzero amplitudes")
        lows = list(range(n - 1, 0, -1))
        det = _lower_detunings(lows, detunings)
        spec, part = _build_spec(n, {(lo, n): z for lo, z in zip(lows, amp)}, det, [n])
        values = [-det.get(lo, 0.0) for lo in lows]
        expected = expected_from_dressed(np.eye(n - 1), values, [amp])
        return CatalogEntry(f"multipod_{n}", params, spec, part, expected)
    if config == "multi_lambda":
        if n < 3:
            raise BadKindParameters("multi_lambda needs N >= 3")
        col2, col1 = ([_as_complex(z) for z in col] for col in amplitudes)
        if len(col2) != n - 2 or len(col1) != n - 2:
            raise BadKindParameters(f"multi_lambda with N={n} needs two lists of {n - 2} amplitudes")
        ups = list(range(n, 2, -1))
        amps = {}
        for up, z2, z1 in zip(ups, col2, col1):
            amps[(2, up)] = z2
            amps[(1, up)] = z1
        det = _lower_detunings([2, 1], detunings)
        spec, part = _build_spec(n, amps, det, ups)
        expected = expected_from_dressed(
            np.eye(2), [-det.get(2, 0.0), -det.get(1, 0.0)], np.array([col2, col1]).T
        )
        return CatalogEntry(f"multi_lambda_{n}", params, spec, part, expected)
    if config in ("lambda_chain", "n_chain", "v_chain"):
        zz = _zigzag(config, n, amplitudes)
        return _chain_entry(config, n, zz, detunings, f"{config}_{n}", params)
    raise BadKindParameters(f"unknown N-level configuration {config!r}")


# ---------------------------------------------------------------- polaritons


@dataclass(frozen=True)
class DspParams:
    """Atomic-ensemble parameters at one instant of the control field."""

    g: float
    n_atoms: int
    omega_control: float
    n_excitations: int

    def __post_init__(self):
        if self.n_atoms < 1:
            raise BadKindParameters("n_atoms must be positive")
        if not 1 <= self.n_excitations <= MAX_EXCITATIONS:
            raise BadKindParameters(f"n_excitations must be in 1..{MAX_EXCITATIONS}")

    @property
    def theta(self) -> float:
        return math.atan2(self.g * math.sqrt(self.n_atoms), self.omega_control)

    @property
    def omega_tilde(self) -> float:
        return math.sqrt(self.g ** 2 * self.n_atoms + self.omega_control ** 2)

    @classmethod
    def from_angle(cls, theta: float, n_excitations: int, n_atoms: int = 10**6,
                   omega_tilde: float = 1.0) -> "DspParams":
        return cls(
            omega_tilde * math.sin(theta) / math.sqrt(n_atoms),
            n_atoms,
            omega_tilde * math.cos(theta),
            n_excitations,
        )


def dsp_labels(n: int) -> tuple[list[str], list[str]]:
    uppers = [f"|ac^{m - 1},{n - m}>" for m in range(1, n + 1)]
    lowers = [f"|c^{m},{n - m}>" for m in range(0, n + 1)]
    return uppers, lowers


def dsp_coupling_matrix(p: DspParams, large_n: bool = False):
    """``n x (n+1)`` coupling matrix of the ``n``-excitation ensemble.

    Row ``m`` (1-based) couples ``|ac^{m-1}, n-m>`` to ``|c^{m-1}, n-m+1>``
    with ``g sqrt(N-m+1) sqrt(n-m+1)`` (``g sqrt(N) sqrt(n-m+1)`` when
    ``large_n``) and to ``|c^m, n-m>`` with ``sqrt(m) Omega``.
    """
    n = p.n_excitations
    if n > p.n_atoms:
        raise ExcitationExceedsAtoms(f"{n} excitations exceed {p.n_atoms} atoms")
    c = np.zeros((n, n + 1))
    for m in range(1, n + 1):
        atoms = p.n_atoms if large_n else p.n_atoms - m + 1
        c[m - 1, m - 1] = p.g * math.sqrt(atoms) * math.sqrt(n - m + 1)
        c[m - 1, m] = math.sqrt(m) * p.omega_control
    return c, dsp_labels(n)


def dsp_dark_polariton(n: int, theta: float) -> NDArray[np.float64]:
    """Coefficients over ``|c^i, n-i>``, ``i = 0..n``."""
    if n < 1:
        raise BadKindParameters("n must be at least 1")
    cos, sin = math.cos(theta), math.sin(theta)
    return np.array(
        [math.sqrt(math.comb(n, i)) * (-cos) ** (n - i) * sin ** i for i in range(n + 1)]
    )


def gen_dsp(p: DspParams, large_n: bool = False) -> CatalogEntry:
    """The reduced ``n``-excitation ensemble as a lambda chain of ``2n + 1`` levels."""
    c, _ = dsp_coupling_matrix(p, large_n)
    n = p.n_excitations
    zz = []
    for m in range(n):
        zz += [complex(c[m, m]), complex(c[m, m + 1])]
    params = {"g": p.g, "n_atoms": p.n_atoms, "omega_control": p.omega_control,
              "n_excitations": n, "large_n": large_n, "theta": p.theta}
    entry = _chain_entry("lambda_chain", 2 * n + 1, zz, None, "dsp", params, check_pivots=False)
    x = dsp_dark_polariton(n, p.theta)
    diagnostics = {"binomial_residual": float(np.linalg.norm(c @ x))}
    rank = int(np.linalg.matrix_rank(c)) if np.any(c) else 0
    if large_n:
        expected = ExpectedDark(1, x[None, :].astype(np.complex128))
    else:
        # the binomial state is exact only for n << N; only the count is asserted
        expected = ExpectedDark(n + 1 - rank)
    return CatalogEntry("dsp", params, entry.spec, entry.partition, expected, diagnostics)


# ---------------------------------------------------------------- registry


def _rand_amp(rng: np.random.Generator) -> complex:
    return complex(rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0, 2 * np.pi)))


def _get(params: Mapping, key: str, default):
    return params[key] if key in params else default


def _three(kind):
    def build(params, rng):
        amps = {k: params[k] for k in ("O12", "O13", "O23") if k in params}
        defaults = {"lambda": {"O13": 1.0, "O23": 2.0}, "delta": {"O12": 1.0, "O13": 1.0, "O23": 1.0},
                    "xi": {"O12": 1.0, "O23": 2.0}, "vee": {"O12": 1.0, "O13": 2.0}}[kind]
        merged = {**defaults, **amps}
        return gen_three_level(
            kind,
            {k[1:]: v for k, v in merged.items()},
            {1: _get(params, "D13", 0.3), 2: _get(params, "D23", 0.3 if kind in ("lambda", "delta") else 0.0)},
        )
    return build


def _four(config):
    def build(params, rng):
        if config == 1:
            om = _get(params, "O", 0.5)
            amps = {"12": om, "13": om, "23": om,
                    "14": _get(params, "O14", 1.0), "24": _get(params, "O24", 2.0),
                    "34": _get(params, "O34", 1.0)}
            d = _get(params, "D", 0.2)
            return gen_four_level(1, amps, {1: d, 2: d, 3: d})
        amps = {"12": _get(params, "O12", 0.0), "13": _get(params, "O13", 1.0),
                "14": _get(params, "O14", 0.7), "23": _get(params, "O23", 2.0),
                "24": _get(params, "O24", 1.4)}
        d = _get(params, "D", 0.2)
        return gen_four_level(2, amps, {1: d, 2: d, 3: _get(params, "D34", 0.5)})
    return build


def _five(config):
    def build(params, rng):
        d = _get(params, "D", 0.0)
        if config == 1:
            o1, o2 = _get(params, "O1", 0.6), _get(params, "O2", 0.25)
            amps = {"34": o1, "24": o1, "12": o1, "13": o1, "23": o2, "14": o2,
                    "15": _get(params, "O15", 1.3), "25": _get(params, "O25", [-0.4, 0.3]),
                    "35": _get(params, "O35", 0.7), "45": _get(params, "O45", 1.0)}
            return gen_five_level(1, amps, {r: d for r in (1, 2, 3, 4)})
        if config == 2:
            om = _get(params, "O", 0.0)
            amps = {"23": om, "12": om, "13": om,
                    "15": _get(params, "O15", 1.0), "25": _get(params, "O25", 0.0),
                    "35": _get(params, "O35", 1.0), "14": _get(params, "O14", 1.0),
                    "24": _get(params, "O24", 1.0), "34": _get(params, "O34", 0.0)}
            return gen_five_level(2, amps, {1: d, 2: d, 3: d, 4: _get(params, "D45", 0.4)})
        om = _get(params, "O", 0.8)
        amps = {"45": om, "35": om, "34": om, "12": _get(params, "O12", 0.0),
                "13": _get(params, "O13", 0.5), "14": _get(params, "O14", 0.9),
                "15": _get(params, "O15", 1.2)}
        for u in (3, 4, 5):
            amps[f"2{u}"] = _get(params, f"O2{u}", 2 * _as_complex(amps[f"1{u}"]))
        return gen_five_level(3, amps, {1: d, 2: d, 3: 0.0, 4: 0.0})
    return build


def _nlevel(config):
    def build(params, rng):
        n = int(_get(params, "N", {"multipod": 6, "multi_lambda": 5, "lambda_chain": 7,
                                    "n_chain": 8, "v_chain": 7}[config]))
        det = _get(params, "detunings", None)
        if config == "multipod":
            amps = _get(params, "amplitudes", None) or [_rand_amp(rng) for _ in range(n - 1)]
            if det is None:
                r = int(_get(params, "degenerate", n - 1))
                det = [0.0] * r + [0.5 * (k + 1) for k in range(n - 1 - r)]
            return gen_nlevel("multipod", n, amps, det)
        if config == "multi_lambda":
            col2 = _get(params, "col2", None) or [_rand_amp(rng) for _ in range(n - 2)]
            gamma = _get(params, "gamma", None)
            if gamma is not None:
                col1 = [_as_complex(gamma) * _as_complex(z) for z in col2]
            else:
                col1 = _get(params, "col1", None) or [_rand_amp(rng) for _ in range(n - 2)]
            return gen_nlevel("multi_lambda", n, (col2, col1), det)
        zz = _get(params, "zigzag", None) or [_rand_amp(rng) for _ in range(n - 1)]
        return gen_nlevel(config, n, zz, det)
    return build


def _dsp(params, rng):
    n = int(_get(params, "n", 3))
    large_n = bool(_get(params, "large_n", False))
    if "theta" in params:
        p = DspParams.from_angle(float(params["theta"]), n, int(_get(params, "N_atoms", 10**6)))
    else:
        p = DspParams(float(_get(params, "g", 0.001)), int(_get(params, "N_atoms", 10**6)),
                      float(_get(params, "Omega", 1.0)), n)
    return gen_dsp(p, large_n)


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    build: Callable[[Mapping, np.random.Generator], CatalogEntry]


PRESETS: dict[str, Preset] = {
    p.name: p
    for p in [
        Preset("lambda", "three levels, upper {3}, Omega12 = 0 (O13, O23, D13, D23)", _three("lambda")),
        Preset("delta", "three levels, all couplings, upper {3} (O12, O13, O23, D13, D23)", _three("delta")),
        Preset("xi", "three-level ladder, upper {2}, Omega13 = 0 (O12, O23, D13)", _three("xi")),
        Preset("vee", "three levels, upper {1}, Omega23 = 0 (O12, O13, D23)", _three("vee")),
        Preset("four_level_1", "one upper, three symmetric lowers (O, O14, O24, O34, D)", _four(1)),
        Preset("four_level_2", "two uppers, two lowers, Omega34 = 0 (O12..O24, D, D34)", _four(2)),
        Preset("five_level_1", "one upper, four lowers (O1, O2, O15..O45, D)", _five(1)),
        Preset("five_level_2", "two uppers, three lowers, Omega45 = 0 (O, O15..O34, D, D45)", _five(2)),
        Preset("five_level_3", "three symmetric uppers, two lowers (O, O12..O25, D)", _five(3)),
        Preset("multipod", "one upper, N-1 lowers (N, amplitudes, detunings | degenerate)", _nlevel("multipod")),
        Preset("multi_lambda", "N-2 uppers sharing two lowers (N, col2, col1 | gamma, detunings)", _nlevel("multi_lambda")),
        Preset("lambda_chain", "zigzag chain with N_l = N_u + 1, N odd (N, zigzag, detunings)", _nlevel("lambda_chain")),
        Preset("n_chain", "zigzag chain with N_l = N_u, N even (N, zigzag, detunings)", _nlevel("n_chain")),
        Preset("v_chain", "zigzag chain with N_l = N_u - 1, N odd (N, zigzag, detunings)", _nlevel("v_chain")),
        Preset("dsp", "n-excitation atomic ensemble (n, theta | g, N_atoms, Omega; large_n)", _dsp),
    ]
}


def parse_params(items: Sequence[str]) -> dict:
    """``key=value`` strings; values are read as JSON when possible."""
    out = {}
    for item in items:
        if "=" not in item:
            raise ValidationError(f"parameter {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        try:
            out[key.strip()] = json.loads(raw)
        except json.JSONDecodeError:
            out[key.strip()] = raw
    return out


def build(name: str, params: Mapping | None = None, seed: int | None = None) -> CatalogEntry:
    key = name.replace("-", "_")
    if key not in PRESETS:
        raise ValidationError(f"unknown catalog entry {name!r}; try 'catalog list'")
    rng = np.random.default_rng(seed)
    try:
        return PRESETS[key].build(dict(params or {}), rng)
    except (TypeError, ValueError, KeyError) as exc:
        raise BadKindParameters(f"bad parameters for {key}: {exc}") from exc
