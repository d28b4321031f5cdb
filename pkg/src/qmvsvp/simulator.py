"""Brute-force statevector oracle for the depth-1 QAOA state.

|psi> = exp(-i beta H_D) exp(-i gamma H_P) |+>^T with H_D = sum_j X_j.  H_P is
diagonal, so it is applied as a phase mask built from the encoding's energies;
the driver is T independent 2x2 rotations.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analytic import approx_band
from .encoding import (DEFAULT_ENUMERATION_GUARD, QuditLayout, all_energies,
                       coefficient_table, index_to_bits, spin_table)

MEMORY_GUARD = DEFAULT_ENUMERATION_GUARD
_DUMP_MAGIC = b"QMVSTATE"


class SimulatorError(ValueError):
    pass


@dataclass(frozen=True)
class AngleParams:
    gamma: float
    beta: float = math.pi / 4

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and math.isfinite(self.beta)):
            raise SimulatorError("angles must be finite")


@dataclass(frozen=True)
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (2 ** self.num_qubits,):
            raise SimulatorError("amplitude count does not match qubit count")
        self.amplitudes.setflags(write=False)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def apply_x_rotation(amplitudes: np.ndarray, qubit: int, num_qubits: int, beta: float) -> np.ndarray:
    """exp(-i beta X) on one qubit (qubit 0 is the most significant index bit)."""
    psi = amplitudes.reshape(2 ** qubit, 2, 2 ** (num_qubits - qubit - 1))
    c, s = math.cos(beta), -1j * math.sin(beta)
    out = np.empty_like(psi)
    out[:, 0, :] = c * psi[:, 0, :] + s * psi[:, 1, :]
    out[:, 1, :] = s * psi[:, 0, :] + c * psi[:, 1, :]
    return out.reshape(-1)


def build_state(G, layout: QuditLayout, angles: AngleParams, guard: int = MEMORY_GUARD,
                energies: np.ndarray | None = None) -> StateVector:
    T = layout.total_qubits
    if T > guard:
        raise SimulatorError(f"{T} qubits exceeds statevector guard {guard}")
    if energies is None:
        energies = all_energies(G, layout, guard)
    psi = np.full(2 ** T, 2.0 ** (-T / 2), dtype=complex)
    psi = psi * np.exp(-1j * angles.gamma * energies)
    for qubit in range(T):
        psi = apply_x_rotation(psi, qubit, T, angles.beta)
    return StateVector(T, psi)


def _check_dim(state: StateVector, layout: QuditLayout):
    if state.num_qubits != layout.total_qubits:
        raise SimulatorError(f"state has {state.num_qubits} qubits, layout needs {layout.total_qubits}")


def expectation_hp(state: StateVector, G, layout: QuditLayout) -> float:
    _check_dim(state, layout)
    return float(state.probabilities @ all_energies(G, layout, state.num_qubits))


def truncated_energies(G, layout: QuditLayout, order: int) -> np.ndarray:
    """Diagonal of the truncated Hamiltonian keeping the top-``order`` qubits' ZZ terms."""
    band = list(approx_band(layout, order))
    spins = spin_table(layout).reshape(-1, layout.num_qudits, layout.qubits_per_qudit)
    weighted = (spins[:, :, band] * (2.0 ** np.array(band))).sum(axis=2)
    return 0.25 * np.einsum("zi,ij,zj->z", weighted, np.asarray(G, dtype=float), weighted)


def expectation_ha(state: StateVector, G, layout: QuditLayout, order: int) -> float:
    _check_dim(state, layout)
    return float(state.probabilities @ truncated_energies(G, layout, order))


def expectation_z(state: StateVector) -> np.ndarray:
    """<Z_g> for every qubit."""
    T = state.num_qubits
    probs = state.probabilities.reshape([2] * T)
    out = np.empty(T)
    for g in range(T):
        marg = probs.sum(axis=tuple(h for h in range(T) if h != g))
        out[g] = marg[0] - marg[1]
    return out


def expectation_zz(state: StateVector) -> np.ndarray:
    """<Z_a Z_b> for every qubit pair."""
    layout_spins = spin_table(QuditLayout(1, state.num_qubits - 1)).astype(float)
    p = state.probabilities
    return np.einsum("z,za,zb->ab", p, layout_spins, layout_spins)


@dataclass
class Samples:
    indices: np.ndarray
    bits: np.ndarray
    coefficients: np.ndarray
    energies: np.ndarray

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        for b, x, e in zip(self.bits, self.coefficients, self.energies):
            yield b, x, e


def sample_bitstrings(state: StateVector, G, layout: QuditLayout, count: int, seed=None) -> Samples:
    """Draw ``count`` i.i.d. basis states from |psi|^2, decorated with x and energy."""
    _check_dim(state, layout)
    if count < 1:
        raise SimulatorError("count must be >= 1")
    rng = np.random.default_rng(seed)
    p = state.probabilities
    idx = rng.choice(len(p), size=count, p=p / p.sum())
    energies = all_energies(G, layout, state.num_qubits)
    shifts = np.arange(layout.total_qubits - 1, -1, -1)
    bits = ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int8)
    return Samples(idx, bits, coefficient_table(layout)[idx], energies[idx])


def dump_state(state: StateVector, path) -> Path:
    """Write ``magic(8) | T as uint64 LE | interleaved re/im float64 LE``."""
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(_DUMP_MAGIC + struct.pack("<Q", state.num_qubits))
        fh.write(state.amplitudes.astype("<c16").tobytes())
    return path


def load_state(path) -> StateVector:
    raw = Path(path).read_bytes()
    if raw[:8] != _DUMP_MAGIC:
        raise SimulatorError("not a state dump")
    (T,) = struct.unpack("<Q", raw[8:16])
    return StateVector(T, np.frombuffer(raw[16:], dtype="<c16").astype(complex))




def oracle_curve(G, layout: QuditLayout, gammas, order: int | None = None,
                 beta: float = math.pi / 4, guard: int = MEMORY_GUARD) -> np.ndarray:
    """Statevector <H_P> (or <H_A> for ``order``) at each gamma."""
    energies = all_energies(G, layout, guard)
    observable = energies if order is None else truncated_energies(G, layout, order)
    out = np.empty(len(gammas))
    for t, g in enumerate(gammas):
        state = build_state(G, layout, AngleParams(float(g), beta), guard, energies)
        out[t] = state.probabilities @ observable
    return out
