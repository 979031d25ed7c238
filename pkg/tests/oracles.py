"""Reference implementations that share no code path with the package.

The null space here comes from complex Gaussian elimination with partial
pivoting (reduced row echelon form), never from an SVD or eigensolver, and
dark subspaces are found directly from ``H_l x = E x`` and ``c x = 0`` on the
bare lower block, without dressing.
"""

from __future__ import annotations

import numpy as np

from darkmap.system_model import SystemSpec, Transition


def rref(a, tol: float):
    """Reduced row echelon form and pivot columns; entries below ``tol`` count as zero."""
    m = np.array(a, dtype=np.complex128)
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(m[r:, c])))
        if abs(m[p, c]) <= tol:
            m[r:, c] = 0
            continue
        m[[r, p]] = m[[p, r]]
        m[r] /= m[r, c]
        for i in range(rows):
            if i != r:
                m[i] -= m[i, c] * m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def gauss_null_space(a, rel_tol: float = 1e-9):
    """Orthonormal rows spanning ``{x : a @ x = 0}``."""
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    cols = a.shape[1]
    scale = max(float(np.abs(a).max(initial=0.0)), 1e-300)
    m, pivots = rref(a, rel_tol * scale)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        x = np.zeros(cols, dtype=np.complex128)
        x[f] = 1
        for row, p in enumerate(pivots):
            x[p] = -m[row, f]
        basis.append(x)
    if not basis:
        return np.zeros((0, cols), dtype=np.complex128)
    q, _ = np.linalg.qr(np.array(basis).T)
    return q.T


def gauss_dark_subspace(h_lower, coupling, values, tol_deg: float = 1e-8):
    """Dark subspace (rows over the bare lower basis) from the stacked system
    ``[[H_l - E], [c]] x = 0`` at each distinct eigenvalue ``E`` in ``values``."""
    h_lower = np.asarray(h_lower, dtype=np.complex128)
    coupling = np.atleast_2d(np.asarray(coupling, dtype=np.complex128))
    values = sorted(float(v) for v in values)
    groups: list[list[float]] = []
    for v in values:
        if groups and v - groups[-1][-1] <= tol_deg * max(1.0, abs(v)):
            groups[-1].append(v)
        else:
            groups.append([v])
    n = h_lower.shape[0]
    out = []
    for g in groups:
        e = float(np.mean(g))
        stacked = np.vstack([h_lower - e * np.eye(n), coupling])
        out.extend(gauss_null_space(stacked))
    return np.array(out, dtype=np.complex128).reshape(-1, n)


def random_unitary(rng, n: int):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, n: int, scale: float = 1.0):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (z + z.conj().T)


def spec_from_matrix(h, upper) -> SystemSpec:
    """Rotating-mode spec whose Hamiltonian is ``h`` (descending-label basis, ``h[0,0] = 0``)."""
    h = np.asarray(h, dtype=np.complex128)
    n = h.shape[0]
    idx = lambda lvl: n - lvl  # noqa: E731
    trans = []
    for j in range(1, n + 1):
        for jp in range(j + 1, n + 1):
            a = complex(h[idx(jp), idx(j)])
            if a != 0:
                trans.append(Transition(j, jp, a))
    det = {r: float(-h[idx(r), idx(r)].real) for r in range(1, n)}
    return SystemSpec("rotating", n, tuple(trans), detunings=det, upper=tuple(sorted(upper, reverse=True)))


def assemble(n, upper, h_upper, h_lower, coupling):
    """Full matrix over descending labels from blocks over descending upper/lower labels."""
    upper = sorted(upper, reverse=True)
    lower = sorted(set(range(1, n + 1)) - set(upper), reverse=True)
    iu = [n - u for u in upper]
    il = [n - l for l in lower]
    h = np.zeros((n, n), dtype=np.complex128)
    h[np.ix_(iu, iu)] = h_upper
    h[np.ix_(il, il)] = h_lower
    h[np.ix_(iu, il)] = coupling
    h[np.ix_(il, iu)] = np.asarray(coupling).conj().T
    h = 0.5 * (h + h.conj().T)
    shift = h[0, 0].real
    return h - shift * np.eye(n), lower


def random_system(rng, n_max: int = 6, degenerate: bool = True):
    """Random Hamiltonian with a controlled lower spectrum.

    Returns ``(spec, upper, lower_values)``. With ``degenerate`` the lower
    spectrum has repeated values and the coupling is sometimes rank-deficient
    or has zero columns; otherwise all lower values are distinct (gaps >= 0.1)
    and every coupling column is a dense random vector.
    """
    n = int(rng.integers(3, n_max + 1))
    nu = int(rng.integers(1, n - 1))
    nl = n - nu
    upper = sorted(int(u) for u in rng.choice(np.arange(1, n + 1), nu, replace=False))
    grid = np.linspace(-2.0, 2.0, 41)
    if degenerate:
        k = int(rng.integers(1, nl + 1))
        distinct = rng.choice(grid, k, replace=False)
        vals = np.concatenate([distinct, rng.choice(distinct, nl - k)])
    else:
        vals = rng.choice(grid, nl, replace=False)
    u = random_unitary(rng, nl)
    h_lower = u @ np.diag(vals) @ u.conj().T
    h_upper = random_hermitian(rng, nu)
    c = rng.normal(size=(nu, nl)) + 1j * rng.normal(size=(nu, nl))
    if degenerate:
        roll = rng.random()
        if roll < 0.3:
            c = np.outer(c[:, 0], rng.normal(size=nl) + 1j * rng.normal(size=nl))
        elif roll < 0.5:
            # a zero column in the eigenbasis of H_l
            c = c - np.outer(c @ u[:, 0], u[:, 0].conj())
    h, _ = assemble(n, upper, h_upper, h_lower, c)
    return spec_from_matrix(h, upper), upper, vals


def projector(rows):
    rows = np.atleast_2d(np.asarray(rows, dtype=np.complex128))
    return rows.T @ rows.conj()
