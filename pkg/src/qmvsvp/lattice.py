"""Integer lattice bases, Gram matrices and their JSON persistence."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DEFAULT_ENTRY_BOUND = 2
DEFAULT_MAX_TRIES = 1000


class LatticeError(ValueError):
    pass


def exact_det(matrix) -> int:
    """Determinant of an integer matrix via fraction-free (Bareiss) elimination."""
    a = [[int(v) for v in row] for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for c in range(n - 1):
        if a[c][c] == 0:
            swap = next((r for r in range(c + 1, n) if a[r][c] != 0), None)
            if swap is None:
                return 0
            a[c], a[swap] = a[swap], a[c]
            sign = -sign
        for r in range(c + 1, n):
            for j in range(c + 1, n):
                a[r][j] = (a[r][j] * a[c][c] - a[r][c] * a[c][j]) // prev
        prev = a[c][c]
    return sign * a[n - 1][n - 1]


@dataclass
class LatticeBasis:
    rows: np.ndarray
    seed: int | None = None
    entry_bound: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        rows = np.asarray(self.rows)
        if rows.ndim != 2 or rows.shape[0] != rows.shape[1] or rows.shape[0] < 1:
            raise LatticeError(f"basis must be a non-empty square matrix, got shape {rows.shape}")
        if not np.all(np.equal(np.mod(rows, 1), 0)):
            raise LatticeError("basis entries must be integers")
        self.rows = rows.astype(np.int64)
        if self.entry_bound is not None and np.abs(self.rows).max() > self.entry_bound:
            raise LatticeError("basis entry exceeds entry_bound")
        if exact_det(self.rows) == 0:
            raise LatticeError("basis rows are linearly dependent")

    @property
    def dim(self) -> int:
        return self.rows.shape[0]


def generate_random_lattice(dim: int, entry_bound: int = DEFAULT_ENTRY_BOUND, seed: int = 0,
                            max_tries: int = DEFAULT_MAX_TRIES) -> LatticeBasis:
    """Draw a basis with entries uniform in [-entry_bound, entry_bound].

    Degenerate draws are rejected and redrawn from the same generator, so the
    result depends only on ``(dim, entry_bound, seed)``.
    """
    if dim < 1:
        raise LatticeError("dim must be >= 1")
    if entry_bound < 0:
        raise LatticeError("entry_bound must be >= 0")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        rows = rng.integers(-entry_bound, entry_bound, size=(dim, dim), endpoint=True)
        if exact_det(rows) != 0:
            return LatticeBasis(rows, seed=int(seed), entry_bound=int(entry_bound))
    raise LatticeError(f"no independent basis found after {max_tries} draws "
                       f"(dim={dim}, entry_bound={entry_bound})")


def gram_from_basis(basis: LatticeBasis | np.ndarray) -> np.ndarray:
    rows = basis.rows if isinstance(basis, LatticeBasis) else LatticeBasis(basis).rows
    return rows @ rows.T


def validate_gram(G) -> np.ndarray:
    """Return ``G`` as an array after checking symmetry and positive definiteness."""
    G = np.asarray(G)
    if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] < 1:
        raise LatticeError(f"Gram matrix must be square, got shape {G.shape}")
    if not np.array_equal(G, G.T):
        raise LatticeError("Gram matrix is not symmetric")
    n = G.shape[0]
    if np.issubdtype(G.dtype, np.integer):
        minors = [exact_det(G[:r, :r]) for r in range(1, n + 1)]
    else:
        minors = [np.linalg.det(G[:r, :r]) for r in range(1, n + 1)]
    if min(minors) <= 0:
        raise LatticeError("Gram matrix is not positive definite")
    return G


def vector_norm_sq(G, x):
    """Squared length ``x^T G x`` of the lattice vector with coefficients ``x``."""
    G = np.asarray(G)
    x = np.asarray(x)
    if x.shape != (G.shape[0],):
        raise LatticeError(f"coefficient vector has shape {x.shape}, expected ({G.shape[0]},)")
    if np.issubdtype(G.dtype, np.integer) and np.issubdtype(x.dtype, np.integer):
        xs = [int(v) for v in x]
        return sum(int(G[i, j]) * xs[i] * xs[j] for i in range(len(xs)) for j in range(len(xs)))
    return float(x @ G @ x)


def lattice_to_dict(basis: LatticeBasis) -> dict:
    doc = {
        "dim": basis.dim,
        "basis": basis.rows.tolist(),
        "gram": gram_from_basis(basis).tolist(),
        "seed": basis.seed,
        "entry_bound": basis.entry_bound,
    }
    doc.update(basis.meta)
    return doc


def lattice_from_dict(doc: dict) -> LatticeBasis:
    try:
        rows = np.array(doc["basis"])
        dim = int(doc["dim"])
    except KeyError as exc:
        raise LatticeError(f"lattice document missing field {exc}") from None
    basis = LatticeBasis(rows, seed=doc.get("seed"), entry_bound=doc.get("entry_bound"))
    if basis.dim != dim:
        raise LatticeError(f"dim field {dim} disagrees with basis size {basis.dim}")
    if "gram" in doc and not np.array_equal(np.array(doc["gram"]), gram_from_basis(basis)):
        raise LatticeError("stored gram does not match basis")
    return basis


def save_lattice(basis: LatticeBasis, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(lattice_to_dict(basis), indent=2) + "\n")
    return path


def load_lattice(path) -> LatticeBasis:
    return lattice_from_dict(json.loads(Path(path).read_text()))
