"""Closed-form depth-1 QAOA expectations for Gram-matrix Hamiltonians at beta = pi/4.

For a qubit ``a = (i, p)`` write ``S_a = sin(2^p g r_i)`` and ``C_a = cos(2^p g r_i)``
with ``r_i`` the i-th row sum of ``G``, and define the coupling angle
``theta[a, b] = 2^(p+q) g G_ij`` between qubits ``a = (i, p)`` and ``b = (j, q)``.
Then

    <Z_a>     = S_a * prod_{h != a} cos(theta[a, h])
    <Z_a Z_b> = S_a S_b (P- + P+)/2 + C_a C_b (P- - P+)/2
    P(+/-)    = prod_{h != a, b} cos(theta[a, h] +/- theta[h, b])

The pair formula is the parity resummation of the subset expansion implemented
(for validation only) in :func:`gamma_pair_literal`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .encoding import QuditLayout

# Fixed by comparison against the statevector of exp(-i b H_D) exp(-i g H_P)|+>:
# for N=1, k=0, G=[[1]] the oracle gives <Z> = +sin(g), so <H_P> = (1 + sin g)/2.
SIGN_CONVENTION = 1.0

LITERAL_GUARD = 20
SINGULARITY_TOL = 1e-8
_BATCH = 64


class AnalyticError(ValueError):
    pass


def _check(G, layout: QuditLayout) -> np.ndarray:
    G = np.asarray(G)
    if G.shape != (layout.num_qudits, layout.num_qudits):
        raise AnalyticError(f"Gram matrix shape {G.shape} does not match {layout.num_qudits} qudits")
    return G


def coupling_coefficients(G, layout: QuditLayout) -> np.ndarray:
    """``2^(p+q) G_ij`` for every qubit pair; multiply by gamma to get angles."""
    G = _check(G, layout)
    w = 2.0 ** layout.significance_of
    qi = layout.qudit_of
    return np.outer(w, w) * G[np.ix_(qi, qi)].astype(float)


def field_coefficients(G, layout: QuditLayout) -> np.ndarray:
    """``2^p sum_v G_iv`` for every qubit."""
    G = _check(G, layout)
    return 2.0 ** layout.significance_of * G.sum(axis=1).astype(float)[layout.qudit_of]


class TrigCache:
    """Single-qubit sines/cosines and coupling angles at one or many gamma values.

    ``gamma`` may be a scalar or a 1-D array; arrays gain a leading axis.
    """

    def __init__(self, G, layout: QuditLayout, gamma):
        self.layout = layout
        self.G = _check(G, layout)
        self.row_sums = self.G.sum(axis=1)
        self.gamma = np.asarray(gamma, dtype=float)
        g = self.gamma[..., None]
        fields = field_coefficients(self.G, layout) * g
        self.S = np.sin(fields)
        self.C = np.cos(fields)
        self.angles = coupling_coefficients(self.G, layout) * g[..., None]
        for arr in (self.S, self.C, self.angles):
            arr.setflags(write=False)


def _omega_from_cache(cache: TrigCache) -> np.ndarray:
    cosines = np.cos(cache.angles)
    T = cache.layout.total_qubits
    cosines[..., np.arange(T), np.arange(T)] = 1.0
    return SIGN_CONVENTION * cache.S * cosines.prod(axis=-1)


def _pairs_from_cache(cache: TrigCache, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """<Z_a Z_b> for index arrays ``a``, ``b`` (identity pairs give 1)."""
    T = cache.layout.total_qubits
    h = np.arange(T)
    ta = cache.angles[..., a, :]
    tb = cache.angles[..., b, :]
    excluded = (h[None, :] == a[:, None]) | (h[None, :] == b[:, None])
    p_minus = np.where(excluded, 1.0, np.cos(ta - tb)).prod(axis=-1)
    p_plus = np.where(excluded, 1.0, np.cos(ta + tb)).prod(axis=-1)
    ss = cache.S[..., a] * cache.S[..., b]
    cc = cache.C[..., a] * cache.C[..., b]
    out = 0.5 * (ss * (p_minus + p_plus) + cc * (p_minus - p_plus))
    return np.where(a == b, 1.0, out)


def omega(G, layout: QuditLayout, gamma: float, i: int, p: int) -> float:
    """<Z_ip> in the depth-1 state."""
    a = layout.index(i, p)
    return float(_omega_from_cache(TrigCache(G, layout, gamma))[a])


def gamma_pair_factorized(G, layout: QuditLayout, gamma: float, i: int, p: int, j: int, q: int) -> float:
    """<Z_ip Z_jq> in the depth-1 state, O(T) per pair."""
    a, b = layout.index(i, p), layout.index(j, q)
    if a == b:
        raise AnalyticError("identity pair (i, p) == (j, q) has expectation 1 by definition")
    cache = TrigCache(G, layout, gamma)
    return float(_pairs_from_cache(cache, np.array([a]), np.array([b]))[0])


def _near_cos_zero(coeff: float, gamma: float, tol: float) -> bool:
    if coeff == 0.0:
        return False
    arg = coeff * gamma
    dist = abs(math.remainder(arg - math.pi / 2, math.pi))
    return dist / abs(coeff) < tol


def gamma_pair_literal(G, layout: QuditLayout, gamma: float, i: int, p: int, j: int, q: int,
                       tol: float = SINGULARITY_TOL, guard: int = LITERAL_GUARD) -> float:
    """<Z_ip Z_jq> from the stem cosine product and an explicit sum over flip subsets.

    The stem is the full product of cosines over every qubit divided by the
    cosines of the self and mutual couplings; each subset ``S`` of the other
    qubits contributes ``prod_{h in S} tan(theta[a, h]) tan(theta[h, b])``.
    Even subsets (including the empty one) carry ``S_a S_b``, odd subsets
    ``C_a C_b``.  Exponential in ``T``; only for validation.
    """
    a, b = layout.index(i, p), layout.index(j, q)
    if a == b:
        raise AnalyticError("identity pair (i, p) == (j, q) has expectation 1 by definition")
    T = layout.total_qubits
    if T - 2 > guard:
        raise AnalyticError(f"{T - 2} remaining qubits exceeds literal-sum guard {guard}")
    coeff = coupling_coefficients(G, layout)
    for c in list(coeff[a]) + list(coeff[b]):
        if _near_cos_zero(float(c), gamma, tol):
            raise AnalyticError(f"gamma={gamma!r} is within {tol} of a cosine zero; "
                                "use gamma_pair_factorized")
    theta = coeff * gamma
    numerator = np.prod(np.cos(theta[a, :])) * np.prod(np.cos(theta[:, b]))
    denominator = np.cos(theta[a, a]) * np.cos(theta[b, b]) * np.cos(theta[a, b]) ** 2
    stem = numerator / denominator

    rest = [h for h in range(T) if h not in (a, b)]
    flips = {h: math.tan(theta[a, h]) * math.tan(theta[h, b]) for h in rest}
    even = odd = 0.0
    for size in range(len(rest) + 1):
        total = 0.0
        for subset in itertools.combinations(rest, size):
            chi = 1.0
            for h in subset:
                chi *= flips[h]
            total += chi
        if size % 2 == 0:
            even += total
        else:
            odd += total

    fields = field_coefficients(G, layout) * gamma
    s_a, s_b = math.sin(fields[a]), math.sin(fields[b])
    c_a, c_b = math.cos(fields[a]), math.cos(fields[b])
    return float(stem * (s_a * s_b * even + c_a * c_b * odd))


def approx_band(layout: QuditLayout, order: int) -> range:
    """Significance levels kept by the order-``order`` approximator (the top ``order``)."""
    if not 1 <= order <= layout.qubits_per_qudit:
        raise AnalyticError(f"approximation order must be in [1, {layout.qubits_per_qudit}], got {order}")
    return range(layout.k - order + 1, layout.k + 1)


def two_qubit_terms(layout: QuditLayout, order: int | None = None):
    """Global qubit pairs ``(a, b)`` of every ``(i, j, p, q)`` two-qubit summand.

    ``order=None`` gives the full expectation's summands, otherwise those of the
    truncated approximator.
    """
    band = range(layout.qubits_per_qudit) if order is None else approx_band(layout, order)
    a, b = [], []
    for i in range(layout.num_qudits):
        for j in range(layout.num_qudits):
            for p in band:
                for q in band:
                    a.append(layout.index(i, p))
                    b.append(layout.index(j, q))
    return np.array(a, dtype=np.intp), np.array(b, dtype=np.intp)


@dataclass
class ExpectationResult:
    gamma: float
    mu: float
    mu_approx: dict = field(default_factory=dict)
    omega_table: np.ndarray | None = None
    gamma_table: np.ndarray | None = None
    n_two_qubit_terms: int = 0

    def reconstruct(self, G, layout: QuditLayout) -> float:
        """Rebuild mu from the stored tables."""
        if self.omega_table is None or self.gamma_table is None:
            raise AnalyticError("tables not stored")
        return _assemble_mu(np.asarray(G, dtype=float), layout, self.omega_table, self.gamma_table)


def _assemble_mu(G, layout, omegas, gammas):
    N, m = layout.num_qudits, layout.qubits_per_qudit
    w = 2.0 ** np.arange(m)
    om = omegas.reshape(*omegas.shape[:-1], N, m) @ w
    pair = np.einsum("...ipjq,p,q->...ij", gammas.reshape(*gammas.shape[:-2], N, m, N, m), w, w)
    single = om[..., :, None] + om[..., None, :]
    return 0.25 * (G * (1.0 + pair + single)).sum(axis=(-1, -2))


def _term_weights(G, layout, a, b):
    qi, qp = layout.qudit_of, layout.significance_of
    return 0.25 * np.asarray(G, dtype=float)[qi[a], qi[b]] * 2.0 ** (qp[a] + qp[b])


def _single_part(G, layout, omegas):
    N, m = layout.num_qudits, layout.qubits_per_qudit
    om = omegas.reshape(*omegas.shape[:-1], N, m) @ (2.0 ** np.arange(m))
    Gf = np.asarray(G, dtype=float)
    return 0.25 * (Gf.sum() + 2.0 * np.einsum("ij,...i->...", Gf, om))


def mean_value(G, layout: QuditLayout, gamma: float, orders=(), tables: bool = False) -> ExpectationResult:
    """Exact <H_P> in the depth-1 state at ``gamma`` (beta = pi/4).

    ``orders`` optionally adds truncated approximators to ``mu_approx``; they
    reuse the pair values already computed.
    """
    G = _check(G, layout)
    cache = TrigCache(G, layout, float(gamma))
    a, b = two_qubit_terms(layout)
    pairs = _pairs_from_cache(cache, a, b)
    omegas = _omega_from_cache(cache)
    mu = float(_single_part(G, layout, omegas) + _term_weights(G, layout, a, b) @ pairs)
    T = layout.total_qubits
    table = np.empty((T, T))
    table[a, b] = pairs
    approx = {}
    for order in orders:
        band = np.isin(layout.significance_of, list(approx_band(layout, order)))
        sel = band[a] & band[b]
        approx[int(order)] = float(_term_weights(G, layout, a[sel], b[sel]) @ pairs[sel])
    return ExpectationResult(
        gamma=float(gamma), mu=mu, mu_approx=approx,
        omega_table=omegas if tables else None,
        gamma_table=table if tables else None,
        n_two_qubit_terms=len(a),
    )


def mean_value_approx(G, layout: QuditLayout, gamma: float, order: int) -> float:
    """Truncated approximator keeping only two-qubit terms among the top ``order`` qubits."""
    return float(approx_curve(G, layout, np.array([gamma]), order)[0])


def approx_term_count(layout: QuditLayout, order: int | None = None) -> int:
    return len(two_qubit_terms(layout, order)[0])


def _batched(gammas):
    gammas = np.asarray(gammas, dtype=float).reshape(-1)
    for start in range(0, len(gammas), _BATCH):
        yield gammas[start:start + _BATCH]


def mean_value_curve(G, layout: QuditLayout, gammas) -> np.ndarray:
    """Vectorised exact expectation over a 1-D array of gamma values."""
    G = _check(G, layout)
    a, b = two_qubit_terms(layout)
    weights = _term_weights(G, layout, a, b)
    out = []
    for chunk in _batched(gammas):
        cache = TrigCache(G, layout, chunk)
        single = _single_part(G, layout, _omega_from_cache(cache))
        out.append(single + _pairs_from_cache(cache, a, b) @ weights)
    return np.concatenate(out) if out else np.empty(0)


def approx_curve(G, layout: QuditLayout, gammas, order: int) -> np.ndarray:
    """Vectorised truncated approximator; only the band's pairs are evaluated."""
    G = _check(G, layout)
    a, b = two_qubit_terms(layout, order)
    weights = _term_weights(G, layout, a, b)
    out = [_pairs_from_cache(TrigCache(G, layout, chunk), a, b) @ weights for chunk in _batched(gammas)]
    return np.concatenate(out) if out else np.empty(0)
