import itertools

import numpy as np
import pytest

from qmvsvp.encoding import (EncodingError, QuditLayout, all_energies, coefficient_table,
                             decode_bitstring, encode_coefficients, energy_of_bitstring,
                             index_to_bits, qudit_value, spectrum_enumerate)
from qmvsvp.lattice import vector_norm_sq

from conftest import random_gram


def test_layout_counts_and_round_trip():
    layout = QuditLayout(3, 2)
    assert layout.qubits_per_qudit == 3 and layout.total_qubits == 9
    for g in range(layout.total_qubits):
        assert layout.index(*layout.position(g)) == g
    with pytest.raises(EncodingError):
        layout.index(3, 0)


def test_qudit_value_extremes():
    layout = QuditLayout(1, 1)
    assert qudit_value(layout, [1, 1]) == 2
    assert qudit_value(layout, [-1, -1]) == -1


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_qudit_value_bijection(k):
    layout = QuditLayout(1, k)
    values = sorted(qudit_value(layout, s) for s in itertools.product((1, -1), repeat=k + 1))
    assert values == list(range(-2**k + 1, 2**k + 1))


def test_qudit_value_wrong_count():
    with pytest.raises(EncodingError):
        qudit_value(QuditLayout(1, 1), [1, 1, 1])


def test_decode_examples():
    layout = QuditLayout(2, 1)
    assert decode_bitstring(layout, [0, 0, 0, 0]).tolist() == [2, 2]
    assert decode_bitstring(layout, [1, 1, 1, 1]).tolist() == [-1, -1]
    with pytest.raises(EncodingError):
        decode_bitstring(layout, [0, 0, 0])


def test_encode_decode_round_trip():
    layout = QuditLayout(2, 2)
    lo, hi = layout.value_range
    for x in itertools.product(range(lo, hi + 1), repeat=2):
        assert decode_bitstring(layout, encode_coefficients(layout, x)).tolist() == list(x)


def test_energy_examples():
    layout = QuditLayout(2, 1)
    G = np.eye(2, dtype=int)
    assert energy_of_bitstring(G, layout, encode_coefficients(layout, [0, 0])) == 0
    assert energy_of_bitstring(G, layout, encode_coefficients(layout, [1, 0])) == 1


def test_energies_exhaustive_cross_check():
    layout = QuditLayout(2, 1)
    G = random_gram(2, 5)
    table = all_energies(G, layout)
    for z in range(2 ** layout.total_qubits):
        bits = index_to_bits(layout, z)
        x = decode_bitstring(layout, bits)
        assert table[z] == energy_of_bitstring(G, layout, bits) == vector_norm_sq(G, x)
    assert np.array_equal(coefficient_table(layout)[5], decode_bitstring(layout, index_to_bits(layout, 5)))


def test_energy_zero_only_at_origin():
    layout = QuditLayout(2, 2)
    G = random_gram(2, 8)
    e = all_energies(G, layout)
    assert (e >= 0).all()
    assert np.count_nonzero(e == 0) == 1


@pytest.mark.parametrize("N, k", [(1, 2), (2, 1), (2, 2), (3, 1)])
def test_uniform_energy_mean_identity(N, k):
    layout = QuditLayout(N, k)
    G = random_gram(N, 17 + N + k)
    eq, eq2 = 0.5, 0.25 + (4 ** (k + 1) - 1) / 12
    off = G.sum() - np.trace(G)
    assert all_energies(G, layout).mean() == pytest.approx(np.trace(G) * eq2 + off * eq ** 2, abs=1e-12)


def test_spectrum_examples():
    layout = QuditLayout(2, 1)
    rows = spectrum_enumerate(np.eye(2, dtype=int), layout)
    assert len(rows) == 16
    assert rows[0] == ((0, 0), 0)
    assert min(e for x, e in rows if any(x)) == 1
    rows = spectrum_enumerate(np.array([[2, 1], [1, 2]]), layout)
    brute = min(2 * a * a + 2 * a * b + 2 * b * b
                for a in range(-1, 3) for b in range(-1, 3) if (a, b) != (0, 0))
    assert brute == 2
    assert min(e for x, e in rows if any(x)) == brute
    energies = [e for _, e in rows]
    assert energies == sorted(energies)


def test_spectrum_ties_lexicographic():
    rows = spectrum_enumerate(np.eye(2, dtype=int), QuditLayout(2, 1))
    ones = [x for x, e in rows if e == 1]
    assert ones == sorted(ones)


def test_spectrum_guard():
    with pytest.raises(EncodingError):
        spectrum_enumerate(np.eye(2, dtype=int), QuditLayout(2, 4), guard=8)
