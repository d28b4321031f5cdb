import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmvsvp.lattice import (LatticeBasis, LatticeError, exact_det, generate_random_lattice,
                            gram_from_basis, load_lattice, save_lattice, validate_gram, vector_norm_sq)


def test_one_dimensional_unit_bound():
    basis = generate_random_lattice(1, 1, seed=3)
    assert basis.rows.tolist() in ([[1]], [[-1]])


def test_generation_is_deterministic():
    a = generate_random_lattice(2, 5, seed=42)
    b = generate_random_lattice(2, 5, seed=42)
    assert np.array_equal(a.rows, b.rows)
    assert np.abs(a.rows).max() <= 5


def test_generated_bases_are_independent():
    for seed in range(1000):
        basis = generate_random_lattice(2, 5, seed)
        r = basis.rows
        assert r[0, 0] * r[1, 1] - r[0, 1] * r[1, 0] != 0


def test_degenerate_bound_fails():
    with pytest.raises(LatticeError):
        generate_random_lattice(2, 0, seed=1, max_tries=10)
    with pytest.raises(LatticeError):
        generate_random_lattice(0, 3, seed=1)


def test_dependent_basis_rejected():
    with pytest.raises(LatticeError):
        LatticeBasis(np.array([[1, 2], [2, 4]]))


@pytest.mark.parametrize("rows, gram", [
    ([[1, 0], [0, 1]], [[1, 0], [0, 1]]),
    ([[1, 0], [1, 1]], [[1, 1], [1, 2]]),
])
def test_gram_examples(rows, gram):
    assert gram_from_basis(LatticeBasis(np.array(rows))).tolist() == gram


def test_random_gram_is_symmetric_positive_definite():
    for seed in range(50):
        G = gram_from_basis(generate_random_lattice(3, 10, seed))
        validate_gram(G)
        assert np.all(np.linalg.eigvalsh(G) > 0)


def test_validate_gram_rejects():
    with pytest.raises(LatticeError):
        validate_gram(np.array([[1, 2], [0, 1]]))
    with pytest.raises(LatticeError):
        validate_gram(np.array([[1, 2], [2, 1]]))


@pytest.mark.parametrize("G, x, expected", [
    ([[1, 0], [0, 1]], (3, 4), 25),
    ([[2, 1], [1, 2]], (1, -1), 2),
    ([[2, 1], [1, 2]], (0, 0), 0),
])
def test_vector_norm_sq_examples(G, x, expected):
    assert vector_norm_sq(np.array(G), np.array(x)) == expected


def test_vector_norm_sq_dimension_mismatch():
    with pytest.raises(LatticeError):
        vector_norm_sq(np.eye(2, dtype=int), np.array([1, 2, 3]))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.lists(st.integers(-50, 50), min_size=3, max_size=3))
def test_norm_matches_coordinates(seed, x):
    basis = generate_random_lattice(3, 10, seed)
    x = np.array(x)
    direct = x @ basis.rows
    assert vector_norm_sq(gram_from_basis(basis), x) == int(direct @ direct)
    if x.any():
        assert vector_norm_sq(gram_from_basis(basis), x) > 0


def test_gram_recomputation_identical():
    basis = generate_random_lattice(4, 10, 9)
    assert gram_from_basis(basis).tobytes() == gram_from_basis(basis).tobytes()


def test_exact_det_matches_numpy():
    rng = np.random.default_rng(0)
    for _ in range(100):
        m = rng.integers(-5, 6, size=(4, 4))
        assert exact_det(m) == round(np.linalg.det(m))
    assert exact_det([[0, 1], [1, 0]]) == -1


def test_json_round_trip(tmp_path):
    basis = generate_random_lattice(3, 4, seed=11)
    path = save_lattice(basis, tmp_path / "l.json")
    doc = json.loads(path.read_text())
    assert set(doc) == {"dim", "basis", "gram", "seed", "entry_bound"}
    back = load_lattice(path)
    assert np.array_equal(back.rows, basis.rows)
    assert back.seed == 11 and back.entry_bound == 4


def test_json_inconsistent_gram(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dim": 2, "basis": [[1, 0], [0, 1]], "gram": [[2, 0], [0, 1]]}))
    with pytest.raises(LatticeError):
        load_lattice(path)
