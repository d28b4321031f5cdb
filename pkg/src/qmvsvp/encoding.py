"""Binary qudit encoding: bitstrings <-> coefficient vectors <-> energies.

Each qudit i is realised by ``m = k + 1`` qubits with spins ``s_p = 1 - 2 b_p``
and value ``Q_i = 1/2 + sum_p 2**(p-1) s_p``, which covers the integers
``[-2**k + 1, 2**k]``.  Global qubit ``g = i*m + p`` (0-based, qudit-major).
A bitstring ``bits[0..T-1]`` maps to the state index ``sum_g bits[g] << (T-1-g)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import vector_norm_sq

DEFAULT_ENUMERATION_GUARD = 26


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class QuditLayout:
    num_qudits: int
    k: int

    def __post_init__(self):
        if self.num_qudits < 1:
            raise EncodingError("num_qudits must be >= 1")
        if self.k < 0:
            raise EncodingError("k must be >= 0")

    @property
    def qubits_per_qudit(self) -> int:
        return self.k + 1

    @property
    def total_qubits(self) -> int:
        return self.num_qudits * (self.k + 1)

    def index(self, i: int, p: int) -> int:
        if not (0 <= i < self.num_qudits and 0 <= p <= self.k):
            raise EncodingError(f"qubit ({i}, {p}) outside layout")
        return i * self.qubits_per_qudit + p

    def position(self, g: int) -> tuple[int, int]:
        if not 0 <= g < self.total_qubits:
            raise EncodingError(f"global qubit {g} outside layout")
        return divmod(g, self.qubits_per_qudit)

    @property
    def qudit_of(self) -> np.ndarray:
        return np.repeat(np.arange(self.num_qudits), self.qubits_per_qudit)

    @property
    def significance_of(self) -> np.ndarray:
        return np.tile(np.arange(self.qubits_per_qudit), self.num_qudits)

    @property
    def value_range(self) -> tuple[int, int]:
        return -(2 ** self.k) + 1, 2 ** self.k


def bits_to_spins(bits) -> np.ndarray:
    bits = np.asarray(bits)
    if not np.isin(bits, (0, 1)).all():
        raise EncodingError("bits must be 0 or 1")
    return 1 - 2 * bits.astype(np.int64)


def qudit_value(layout: QuditLayout, spins) -> int:
    spins = np.asarray(spins, dtype=np.int64)
    if spins.shape != (layout.qubits_per_qudit,):
        raise EncodingError(f"expected {layout.qubits_per_qudit} spins, got {spins.shape}")
    if not np.isin(spins, (-1, 1)).all():
        raise EncodingError("spins must be +1 or -1")
    # 1/2 + sum 2^(p-1) s_p == (1 + sum 2^p s_p) / 2, and the numerator is always even
    return (1 + int(np.dot(2 ** np.arange(layout.qubits_per_qudit), spins))) // 2


def decode_bitstring(layout: QuditLayout, bits) -> np.ndarray:
    bits = np.asarray(bits)
    if bits.shape != (layout.total_qubits,):
        raise EncodingError(f"expected {layout.total_qubits} bits, got {bits.shape}")
    spins = bits_to_spins(bits).reshape(layout.num_qudits, layout.qubits_per_qudit)
    return np.array([qudit_value(layout, row) for row in spins], dtype=np.int64)


def encode_coefficients(layout: QuditLayout, x) -> np.ndarray:
    """Inverse of :func:`decode_bitstring`."""
    x = np.asarray(x, dtype=np.int64)
    lo, hi = layout.value_range
    if x.shape != (layout.num_qudits,) or (x < lo).any() or (x > hi).any():
        raise EncodingError(f"coefficients must be {layout.num_qudits} integers in [{lo}, {hi}]")
    # Q = (1 + sum 2^p s_p)/2 with s_p = 1 - 2 b_p  =>  sum 2^p b_p = 2^k - Q
    code = 2 ** layout.k - x
    p = np.arange(layout.qubits_per_qudit)
    return ((code[:, None] >> p[None, :]) & 1).reshape(-1)


def energy_of_bitstring(G, layout: QuditLayout, bits):
    G = np.asarray(G)
    if G.shape != (layout.num_qudits, layout.num_qudits):
        raise EncodingError(f"Gram matrix shape {G.shape} does not match {layout.num_qudits} qudits")
    return vector_norm_sq(G, decode_bitstring(layout, bits))


def index_to_bits(layout: QuditLayout, index: int) -> np.ndarray:
    T = layout.total_qubits
    return (int(index) >> np.arange(T - 1, -1, -1)) & 1


def spin_table(layout: QuditLayout) -> np.ndarray:
    """Spins of every computational basis state, shape ``(2**T, T)``."""
    T = layout.total_qubits
    z = np.arange(2 ** T, dtype=np.int64)
    shifts = np.arange(T - 1, -1, -1)
    return (1 - 2 * ((z[:, None] >> shifts[None, :]) & 1)).astype(np.int8)


def coefficient_table(layout: QuditLayout) -> np.ndarray:
    """Decoded coefficient vectors of every basis state, shape ``(2**T, N)``."""
    spins = spin_table(layout).astype(np.int64)
    weights = np.tile(2 ** np.arange(layout.qubits_per_qudit), layout.num_qudits)
    contrib = (spins * weights).reshape(-1, layout.num_qudits, layout.qubits_per_qudit)
    return (1 + contrib.sum(axis=2)) // 2


def all_energies(G, layout: QuditLayout, guard: int = DEFAULT_ENUMERATION_GUARD) -> np.ndarray:
    """Energy of every basis state in state-index order."""
    G = np.asarray(G)
    if G.shape != (layout.num_qudits, layout.num_qudits):
        raise EncodingError(f"Gram matrix shape {G.shape} does not match {layout.num_qudits} qudits")
    if layout.total_qubits > guard:
        raise EncodingError(f"{layout.total_qubits} qubits exceeds enumeration guard {guard}")
    x = coefficient_table(layout)
    if np.issubdtype(G.dtype, np.integer):
        return np.einsum("zi,ij,zj->z", x, G.astype(np.int64), x)
    return np.einsum("zi,ij,zj->z", x.astype(float), G, x.astype(float))


def spectrum_enumerate(G, layout: QuditLayout, guard: int = DEFAULT_ENUMERATION_GUARD):
    """All ``(x, energy)`` pairs sorted by energy, ties by lexicographic ``x``."""
    x = coefficient_table(layout) if layout.total_qubits <= guard else None
    energies = all_energies(G, layout, guard)
    keys = [x[:, c] for c in range(layout.num_qudits - 1, -1, -1)] + [energies]
    order = np.lexsort(keys)
    return [(tuple(int(v) for v in x[z]), energies[z].item()) for z in order]
