"""
Dense state-vector simulator.

Qubit ``j`` is bit ``j`` of the basis index (little-endian). Gates act in place
on a ``(2,) * n`` tensor view of the amplitude array: qubit ``j`` is tensor
axis ``n - 1 - j``. No gate matrices are built.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np

from orbitqaoa.graph import Graph, bits_to_index, index_to_bits
from orbitqaoa.utils import InvalidArgumentError, SizeLimitError

MAX_QUBITS = 28
# Largest (edges x amplitudes) ZZ table kept in memory for the fused cost layer.
_ZZ_TABLE_LIMIT = 1 << 23


@dataclass(eq=False)
class StateVector:
    n_qubits: int
    amp: np.ndarray

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amp.copy())

    def norm(self) -> float:
        return float(np.vdot(self.amp, self.amp).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amp) ** 2

    def dump(self) -> str:
        """Amplitude listing for debugging small registers."""
        if self.n_qubits > 6:
            raise SizeLimitError("amplitude dump is limited to 6 qubits")
        return "\n".join(
            f"{index_to_bits(i, self.n_qubits)} {a.real:+.12f} {a.imag:+.12f}"
            for i, a in enumerate(self.amp)
        )


@dataclass(frozen=True, eq=False)
class SampleCounts:
    """Measurement outcomes: ``hits[k]`` shots landed on basis index ``indices[k]``."""

    shots: int
    n_qubits: int
    indices: np.ndarray
    hits: np.ndarray

    @property
    def counts(self) -> Dict[str, int]:
        return {
            index_to_bits(int(i), self.n_qubits): int(h)
            for i, h in zip(self.indices, self.hits)
        }


def _check_size(n: int, max_qubits: int) -> None:
    if n < 1:
        raise InvalidArgumentError(f"need at least one qubit, got {n}")
    if n > max_qubits:
        raise SizeLimitError(f"state vector limited to {max_qubits} qubits, requested {n}")


def init_plus(n: int, max_qubits: int = MAX_QUBITS) -> StateVector:
    """Uniform superposition ``H^n |0...0>``."""
    _check_size(n, max_qubits)
    dim = 1 << n
    return StateVector(n, np.full(dim, 1.0 / np.sqrt(dim), dtype=complex))


def basis_state(bits: str, max_qubits: int = MAX_QUBITS) -> StateVector:
    """
    Computational basis state.

    Args:
        bits: Bitstring, character ``j`` is qubit ``j``
        max_qubits: Register size guard

    Returns:
        State with amplitude 1 on ``bits``
    """
    n = len(bits)
    _check_size(n, max_qubits)
    amp = np.zeros(1 << n, dtype=complex)
    amp[bits_to_index(bits)] = 1.0
    return StateVector(n, amp)


def from_amplitudes(amp: np.ndarray) -> StateVector:
    """Wrap a copy of a length-2^n amplitude array; the array is not renormalized."""
    amp = np.ascontiguousarray(amp, dtype=complex)
    n = int(amp.size).bit_length() - 1
    if amp.ndim != 1 or amp.size != 1 << n:
        raise InvalidArgumentError("amplitude count must be a power of two")
    return StateVector(n, amp)


def _tensor(s: StateVector) -> np.ndarray:
    return s.amp.reshape((2,) * s.n_qubits)


def _sel(n: int, fixed: Dict[int, int]) -> Tuple:
    index = [slice(None)] * n
    for qubit, bit in fixed.items():
        index[n - 1 - qubit] = bit
    return tuple(index)


def _check_qubit(s: StateVector, q: int) -> None:
    if not 0 <= q < s.n_qubits:
        raise InvalidArgumentError(f"qubit {q} out of range for {s.n_qubits} qubits")


def _check_pair(s: StateVector, i: int, j: int) -> None:
    _check_qubit(s, i)
    _check_qubit(s, j)
    if i == j:
        raise InvalidArgumentError(f"two-qubit gate needs distinct qubits, got {i} twice")


def apply_zz_phase(s: StateVector, i: int, j: int, theta: float) -> None:
    """exp(+i theta Z_i Z_j): phase e^{+i theta} where bits agree, e^{-i theta} where they differ."""
    _check_pair(s, i, j)
    t = _tensor(s)
    n = s.n_qubits
    agree, differ = np.exp(1j * theta), np.exp(-1j * theta)
    t[_sel(n, {i: 0, j: 0})] *= agree
    t[_sel(n, {i: 1, j: 1})] *= agree
    t[_sel(n, {i: 0, j: 1})] *= differ
    t[_sel(n, {i: 1, j: 0})] *= differ


def apply_rx(s: StateVector, j: int, beta: float) -> None:
    """exp(-i beta X_j)."""
    _check_qubit(s, j)
    t = _tensor(s)
    sel0, sel1 = _sel(s.n_qubits, {j: 0}), _sel(s.n_qubits, {j: 1})
    a0, a1 = t[sel0].copy(), t[sel1].copy()
    c, sn = np.cos(beta), np.sin(beta)
    t[sel0] = c * a0 - 1j * sn * a1
    t[sel1] = c * a1 - 1j * sn * a0


def apply_y_rot(s: StateVector, j: int, beta: float) -> None:
    """exp(-i beta Y_j)."""
    _check_qubit(s, j)
    t = _tensor(s)
    sel0, sel1 = _sel(s.n_qubits, {j: 0}), _sel(s.n_qubits, {j: 1})
    a0, a1 = t[sel0].copy(), t[sel1].copy()
    c, sn = np.cos(beta), np.sin(beta)
    t[sel0] = c * a0 - sn * a1
    t[sel1] = sn * a0 + c * a1


def apply_xy(s: StateVector, i: int, j: int, beta: float) -> None:
    """exp(-i beta (X_i X_j + Y_i Y_j) / 2): rotates the |01>,|10> subspace, fixes |00>,|11>."""
    _check_pair(s, i, j)
    t = _tensor(s)
    n = s.n_qubits
    sel_a, sel_b = _sel(n, {i: 1, j: 0}), _sel(n, {i: 0, j: 1})
    # indexing with every axis fixed yields a scalar, so write back through t
    a, b = t[sel_a].copy(), t[sel_b].copy()
    c, sn = np.cos(beta), np.sin(beta)
    t[sel_a] = c * a - 1j * sn * b
    t[sel_b] = c * b - 1j * sn * a


@lru_cache(maxsize=32)
def zz_table(g: Graph) -> np.ndarray:
    """(m, 2^n) table of Z_u Z_v eigenvalues (+1 agree, -1 differ) per edge."""
    idx = np.arange(1 << g.n, dtype=np.int64)
    table = np.empty((g.m, idx.size), dtype=float)
    for e, (u, v, _) in enumerate(g.edges):
        table[e] = 1.0 - 2.0 * (((idx >> u) ^ (idx >> v)) & 1)
    return table


@lru_cache(maxsize=32)
def cut_diagonal(g: Graph) -> np.ndarray:
    """Cut value of every basis state: sum_e w_e (1 - Z_u Z_v) / 2."""
    idx = np.arange(1 << g.n, dtype=np.int64)
    diag = np.zeros(idx.size, dtype=float)
    for u, v, w in g.edges:
        diag += w * (((idx >> u) ^ (idx >> v)) & 1)
    return diag


def _check_graph(s: StateVector, g: Graph) -> None:
    if s.n_qubits != g.n:
        raise InvalidArgumentError(f"state has {s.n_qubits} qubits, graph has {g.n} nodes")


def apply_cost_layer(s: StateVector, g: Graph, thetas: np.ndarray) -> None:
    """All edge phases of one layer; ``thetas[e]`` drives edge ``e`` in canonical order."""
    _check_graph(s, g)
    if g.m * (1 << g.n) <= _ZZ_TABLE_LIMIT:
        s.amp *= np.exp(1j * (thetas @ zz_table(g)))
        return
    for (u, v, _), theta in zip(g.edges, thetas):
        apply_zz_phase(s, u, v, float(theta))


def expectation_cut(s: StateVector, g: Graph) -> float:
    """Exact <C> = sum_z |amp_z|^2 cut(z)."""
    _check_graph(s, g)
    return float(s.probabilities() @ cut_diagonal(g))


def sample(s: StateVector, shots: int, rng: np.random.Generator) -> SampleCounts:
    """Multinomial draw of ``shots`` measurements in the computational basis."""
    if shots < 1:
        raise InvalidArgumentError(f"shots must be at least 1, got {shots}")
    probs = s.probabilities()
    probs /= probs.sum()
    hits = rng.multinomial(shots, probs)
    indices = np.flatnonzero(hits)
    return SampleCounts(shots, s.n_qubits, indices, hits[indices])


def estimate_cut(counts: SampleCounts, g: Graph) -> float:
    """(1/S) sum_z counts(z) cut(z)."""
    if counts.n_qubits != g.n:
        raise InvalidArgumentError(f"samples have {counts.n_qubits} qubits, graph has {g.n} nodes")
    total = float(cut_diagonal(g)[counts.indices] @ counts.hits)
    return total / counts.shots
