"""Pauli algebra against dense-matrix oracles."""

from __future__ import annotations

import itertools
import random

import numpy as np
import pytest

from stabbench.matrices import pauli_dense
from stabbench.pauli import PauliString, commutes, multiply, product


def all_paulis(n):
    for x in range(1 << n):
        for z in range(1 << n):
            yield PauliString(n, x, z)


def test_label_round_trip():
    p = PauliString.from_label("XIZY")
    assert p.label() == "XIZY"
    assert p.weight() == 3
    assert p.support() == frozenset({0, 2, 3})


def test_commutes_examples():
    x12 = PauliString.from_label("XXI")
    z23 = PauliString.from_label("IZZ")
    assert not commutes(x12, z23)
    assert commutes(x12, x12)
    with pytest.raises(ValueError):
        commutes(x12, PauliString.from_label("XX"))


def test_commutes_matches_dense_commutator_small():
    for n in (1, 2):
        for p, q in itertools.product(all_paulis(n), repeat=2):
            mp, mq = pauli_dense(p), pauli_dense(q)
            dense = np.allclose(mp @ mq, mq @ mp)
            assert commutes(p, q) == dense


def test_multiply_identity_and_involution():
    p = PauliString.from_label("XZY")
    ident = PauliString.identity(3)
    assert multiply(p, ident) == p
    sq = multiply(p, p)
    assert sq.is_identity() and sq.sign == 1


def test_multiply_sign_convention():
    xx = PauliString.from_label("XX")
    zz = PauliString.from_label("ZZ")
    prod = multiply(xx, zz)
    assert prod.label() == "YY" and prod.sign == -1
    assert np.allclose(pauli_dense(prod), pauli_dense(xx) @ pauli_dense(zz))


def test_multiply_rejects_anticommuting():
    with pytest.raises(ValueError):
        multiply(PauliString.from_label("X"), PauliString.from_label("Z"))


def test_multiply_matches_dense_for_random_commuting_pairs():
    rng = random.Random(2)
    n = 4
    count = 0
    while count < 60:
        p = PauliString(n, rng.getrandbits(n), rng.getrandbits(n),
                        rng.choice([1, -1]))
        q = PauliString(n, rng.getrandbits(n), rng.getrandbits(n),
                        rng.choice([1, -1]))
        if not commutes(p, q):
            continue
        count += 1
        assert np.allclose(
            pauli_dense(multiply(p, q)), pauli_dense(p) @ pauli_dense(q)
        )


def test_empty_product_needs_n():
    assert product([], n=3).is_identity()
    with pytest.raises(ValueError):
        product([])


def test_pauli_dense_is_hermitian_and_involutory():
    rng = random.Random(7)
    for _ in range(20):
        n = rng.randint(1, 4)
        p = PauliString(n, rng.getrandbits(n), rng.getrandbits(n),
                        rng.choice([1, -1]))
        m = pauli_dense(p)
        assert np.allclose(m, m.conj().T)
        assert np.allclose(m @ m, np.eye(1 << n))


from hypothesis import given, settings
from hypothesis import strategies as st


@settings(max_examples=120, deadline=None)
@given(st.integers(1, 5), st.data())
def test_property_symplectic_form_matches_dense(n, data):
    p = PauliString(n, data.draw(st.integers(0, (1 << n) - 1)),
                    data.draw(st.integers(0, (1 << n) - 1)))
    q = PauliString(n, data.draw(st.integers(0, (1 << n) - 1)),
                    data.draw(st.integers(0, (1 << n) - 1)))
    mp, mq = pauli_dense(p), pauli_dense(q)
    assert commutes(p, q) == np.allclose(mp @ mq, mq @ mp)
