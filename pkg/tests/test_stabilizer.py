import numpy as np
import pytest

from freqgate.quantum_core import JointState, apply
from freqgate.stabilizer import PauliString, StabilizerTableau, gf2_rank, gf2_solve

from oracles import (H, S, apply_1q, apply_cnot, apply_cz, pauli_matrix)


def random_clifford_pair(n, depth, rng):
    """The same random circuit on a tableau and on an oracle state vector."""
    tab = StabilizerTableau.zero_state(n)
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = 1
    for _ in range(depth):
        kind = rng.integers(4)
        if kind == 0 or n == 1:
            q = int(rng.integers(n))
            tab.h(q)
            psi = apply_1q(psi, H, q, n)
        elif kind == 1:
            q = int(rng.integers(n))
            tab.s(q)
            psi = apply_1q(psi, S, q, n)
        else:
            a, b = (int(x) for x in rng.choice(n, 2, replace=False))
            if kind == 2:
                tab.cnot(a, b)
                psi = apply_cnot(psi, a, b, n)
            else:
                tab.cz(a, b)
                psi = apply_cz(psi, a, b, n)
    return tab, psi


def stabilizes(gens, psi):
    return all(np.allclose(pauli_matrix(str(g).replace("i", "")) @ psi, psi, atol=1e-10)
               for g in gens)


def test_pauli_parse_and_print():
    p = PauliString.from_str("-XZIY")
    assert str(p) == "-XZIY"
    assert p.sign == -1
    np.testing.assert_allclose(p.to_matrix(), pauli_matrix("-XZIY"), atol=1e-15)


def test_pauli_products_match_matrices(rng):
    letters = "IXYZ"
    for _ in range(200):
        a = "".join(rng.choice(list(letters), 3))
        b = "".join(rng.choice(list(letters), 3))
        prod = PauliString.from_str(a) * PauliString.from_str(b)
        np.testing.assert_allclose(prod.to_matrix(), pauli_matrix(a) @ pauli_matrix(b),
                                   atol=1e-14)
        assert PauliString.from_str(a).commutes(PauliString.from_str(b)) == np.allclose(
            pauli_matrix(a) @ pauli_matrix(b), pauli_matrix(b) @ pauli_matrix(a))


def test_gf2_helpers():
    a = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]], dtype=np.uint8)
    assert gf2_rank(a) == 2
    # row-vector convention: s @ m = b
    b = np.array([1, 0, 1], dtype=np.uint8)
    s = gf2_solve(a, b)
    assert s is not None
    assert np.array_equal((s.astype(int) @ a) % 2, b)
    assert gf2_solve(a, np.array([1, 0, 0], dtype=np.uint8)) is None


def test_zz_on_two_plus_states():
    tab = StabilizerTableau.plus_state(2)
    value, random = tab.measure_zz(0, 1, outcome=-1)
    assert (value, random) == (-1, True)
    assert [str(g) for g in tab.generators()] == ["-ZZ", "+XX"]


def test_zz_on_eigenstate_is_deterministic():
    tab = StabilizerTableau.from_paulis(["-ZZ", "XX"])
    before = tab.copy()
    value, random = tab.measure_zz(0, 1, outcome=None)
    assert (value, random) == (-1, False)
    assert np.array_equal(tab.x, before.x) and np.array_equal(tab.z, before.z)
    assert np.array_equal(tab.r, before.r)
    with pytest.raises(ValueError):
        tab.measure_zz(0, 1, outcome=+1)


def test_tableau_matches_circuit_oracle(rng):
    for _ in range(50):
        n = int(rng.integers(1, 7))
        tab, psi = random_clifford_pair(n, 30, rng)
        assert tab.is_valid()
        assert stabilizes(tab.generators(), psi)


def test_measure_zz_matches_projection_six_qubits(rng):
    n = 6
    for _ in range(100):
        tab, psi = random_clifford_pair(n, 40, rng)
        a, b = (int(x) for x in rng.choice(n, 2, replace=False))
        state = JointState(tuple((f"q{i}", 2) for i in range(n)), psi)
        zz = np.diag([1.0, -1, -1, 1])
        branch = {s: apply(state, [f"q{a}", f"q{b}"], (np.eye(4) + s * zz) / 2) for s in (1, -1)}
        value, random = tab.measure_zz(a, b, outcome=None, rng=rng)
        if random:
            assert branch[1].norm2 == pytest.approx(0.5, abs=1e-12)
        else:
            assert branch[-value].norm2 == pytest.approx(0.0, abs=1e-12)
        post = branch[value].normalized().amplitudes
        assert tab.is_valid()
        assert stabilizes(tab.generators(), post)
        assert abs(np.vdot(tab.to_statevector(), post)) ** 2 == pytest.approx(1.0, abs=1e-10)


def test_measure_rejects_non_hermitian():
    tab = StabilizerTableau.zero_state(1)
    with pytest.raises(ValueError):
        tab.measure(PauliString.from_str("+iZ"))


def test_random_measurement_needs_rng_or_outcome():
    with pytest.raises(ValueError):
        StabilizerTableau.plus_state(2).measure_zz(0, 1, outcome=None)
