import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darkmap.dressing import Tolerances, dress, fix_phase, group_degenerate, hermitian_eigendecompose
from darkmap.errors import NonHermitianInput, ValidationError
from darkmap.partition import partition
from darkmap.system_model import SystemSpec, Transition, to_rotating_frame
from oracles import random_hermitian


def test_eigendecompose_two_level_pair():
    # equal detunings with Omega12 = |O| e^{i theta}: eigenvalues -D -/+ |O|
    o = 0.5 * np.exp(0.7j)
    m = np.array([[-0.2, o], [np.conj(o), -0.2]])
    eig = hermitian_eigendecompose(m)
    np.testing.assert_allclose(eig.values, [-0.7, 0.3], atol=1e-14)
    u = eig.unitary
    np.testing.assert_allclose(u @ m @ u.conj().T, np.diag(eig.values), atol=1e-14)
    # rows are bras: conj of the kets (-1, e^{-i theta})/sqrt2, (1, e^{-i theta})/sqrt2 up to phase
    ket = u[0].conj()
    ref = np.array([-1, np.exp(-0.7j)]) / np.sqrt(2)
    assert abs(np.vdot(ref, ket)) == pytest.approx(1.0)


def test_non_hermitian_rejected():
    with pytest.raises(NonHermitianInput):
        hermitian_eigendecompose(np.array([[0, 1], [2, 0]]))
    with pytest.raises(ValidationError):
        hermitian_eigendecompose(np.zeros((2, 3)))


def test_fix_phase_rules():
    v = np.array([0.1, -2j, 0.5])
    w = fix_phase(v)
    assert w[1] == pytest.approx(2.0)
    assert abs(np.vdot(w, v)) == pytest.approx(np.vdot(v, v).real)
    # near-tie: lowest index wins
    t = fix_phase(np.array([1j, -1.0]) / np.sqrt(2))
    assert t[0].imag == 0 and t[0].real > 0
    np.testing.assert_array_equal(fix_phase(np.zeros(3)), np.zeros(3))


@pytest.mark.parametrize(
    "values, tol, expected",
    [
        ([-1.0, -1.0, 2.0], 1e-8, [(0, 2), (2, 3)]),
        ([0.0, 1e-9, 2e-9, 1.0], 1e-8, [(0, 3), (3, 4)]),  # chained merge
        ([0.0, 0.5, 1.0], 1e-8, [(0, 1), (1, 2), (2, 3)]),
        ([0.0, 0.5, 1.0], 1.0, [(0, 3)]),
        ([1e6, 1e6 + 1e-3], 1e-8, [(0, 2)]),  # relative to the median
    ],
)
def test_group_degenerate(values, tol, expected):
    assert [(b.start, b.stop) for b in group_degenerate(values, tol)] == expected


def test_group_degenerate_requires_sorted():
    with pytest.raises(ValidationError):
        group_degenerate([1.0, 0.0], 1e-8)
    assert group_degenerate([], 1e-8) == []


def test_tolerances_positive():
    with pytest.raises(ValidationError):
        Tolerances(tol_rank=0)


def random_spec(n, rng):
    trans = tuple(
        Transition(j, jp, complex(rng.normal(), rng.normal()))
        for j in range(1, n + 1)
        for jp in range(j + 1, n + 1)
        if rng.random() < 0.7
    )
    return SystemSpec("rotating", n, trans, detunings={r: float(rng.normal()) for r in range(1, n)})


@settings(max_examples=60, deadline=None)
@given(n=st.integers(3, 7), seed=st.integers(0, 2**32 - 1))
def test_dressing_is_a_unitary_change_of_basis(n, seed):
    rng = np.random.default_rng(seed)
    ham = to_rotating_frame(random_spec(n, rng))
    upper = list(rng.choice(np.arange(1, n + 1), int(rng.integers(1, n - 1)), replace=False))
    block = partition(ham, upper)
    d = dress(block)
    nu = block.n_upper
    s = np.zeros((n, n), dtype=complex)
    s[:nu, :nu] = d.s_upper
    s[nu:, nu:] = d.s_lower
    from darkmap.partition import assemble_full

    np.testing.assert_allclose(s @ assemble_full(block) @ s.conj().T, d.arrowhead(), atol=1e-12)
    np.testing.assert_allclose(d.s_lower @ d.s_lower.conj().T, np.eye(n - nu), atol=1e-12)
    assert sum(d.block_dims) == n - nu
    assert np.all(np.diff(d.omega) >= 0)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_eigendecompose_random(n, seed):
    m = random_hermitian(np.random.default_rng(seed), n)
    eig = hermitian_eigendecompose(m)
    np.testing.assert_allclose(eig.unitary @ m @ eig.unitary.conj().T, np.diag(eig.values), atol=1e-12)
    for row in eig.unitary:
        k = int(np.argmax(np.abs(row)))
        assert abs(row[k].imag) <= 1e-12
