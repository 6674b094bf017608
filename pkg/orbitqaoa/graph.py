"""Max-Cut graph instances, random graph models and the exact Max-Cut oracle."""

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from orbitqaoa.utils import (
    GenerationError,
    InvalidArgumentError,
    SizeLimitError,
)

Edge = Tuple[int, int, float]
Bits = Union[str, Sequence[int]]

MAX_BRUTEFORCE_NODES = 30
MAX_ATTEMPTS = 1000
_CHUNK = 1 << 18


@dataclass(frozen=True)
class Graph:
    """
    Undirected weighted graph with canonical edge order.

    Edges are stored as ``(u, v, w)`` with ``u < v``, sorted lexicographically,
    so two graphs with the same edge set compare (and serialize) equal.
    """

    n: int
    edges: Tuple[Edge, ...]

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvalidArgumentError(f"graph needs at least 2 nodes, got {self.n}")

        canonical: Dict[Tuple[int, int], float] = {}
        for edge in self.edges:
            if len(edge) == 2:
                u, v = edge  # type: ignore[misc]
                w = 1.0
            else:
                u, v, w = edge
            u, v = int(u), int(v)
            if u == v:
                raise InvalidArgumentError(f"self-loop on node {u}")
            if u > v:
                u, v = v, u
            if u < 0 or v >= self.n:
                raise InvalidArgumentError(f"edge ({u}, {v}) out of range for n={self.n}")
            if (u, v) in canonical:
                raise InvalidArgumentError(f"duplicate edge ({u}, {v})")
            canonical[(u, v)] = float(w)

        edges = tuple((u, v, w) for (u, v), w in sorted(canonical.items()))
        object.__setattr__(self, "edges", edges)

    @property
    def m(self) -> int:
        """Number of edges."""
        return len(self.edges)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([w for _, _, w in self.edges], dtype=float)

    @property
    def is_unit_weight(self) -> bool:
        return bool(np.all(self.weights == 1.0))

    def to_networkx(self) -> nx.Graph:
        """Build the equivalent networkx graph, edge weights under ``weight``."""
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_weighted_edges_from(self.edges)
        return g

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())

    def validate_connected(self) -> None:
        """Raise if some node is unreachable from node 0."""
        if not self.is_connected():
            raise InvalidArgumentError("graph is not connected")

    def to_text(self) -> str:
        """Serialize as ``n m`` followed by one ``u v w`` line per edge."""
        lines = [f"{self.n} {self.m}"]
        lines.extend(f"{u} {v} {w!r}" for u, v, w in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Graph":
        """
        Parse the text format written by :meth:`to_text`.

        Args:
            text: ``n m`` header, then ``u v [w]`` lines (weight defaults to 1)

        Returns:
            Graph with canonical edge order

        Raises:
            InvalidArgumentError: malformed lines or an edge count that disagrees with the header
        """
        rows = [line.split() for line in text.splitlines() if line.strip()]
        if not rows or len(rows[0]) != 2:
            raise InvalidArgumentError("graph text must start with 'n m'")
        try:
            n, m = int(rows[0][0]), int(rows[0][1])
            edges = []
            for row in rows[1:]:
                if len(row) not in (2, 3):
                    raise InvalidArgumentError(f"malformed edge line: {' '.join(row)}")
                w = float(row[2]) if len(row) == 3 else 1.0
                edges.append((int(row[0]), int(row[1]), w))
        except ValueError as e:
            raise InvalidArgumentError(f"malformed graph text: {e}")
        if len(edges) != m:
            raise InvalidArgumentError(f"header declares {m} edges, found {len(edges)}")
        return cls(n, tuple(edges))

    def save(self, path: Path) -> None:
        """Write the graph to ``path`` in the text format."""
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path: Path) -> "Graph":
        """
        Read a graph file.

        Args:
            path: File in the ``n m`` / ``u v w`` text format

        Returns:
            Parsed graph
        """
        try:
            return cls.from_text(Path(path).read_text())
        except OSError as e:
            raise InvalidArgumentError(f"cannot read graph file {path}: {e}")


@dataclass(frozen=True)
class CutResult:
    """Exact Max-Cut value and every assignment attaining it."""

    max_value: float
    optimal_assignments: FrozenSet[str]


def index_to_bits(index: int, n: int) -> str:
    """Basis index → bitstring; character ``j`` is the bit of node ``j``."""
    return "".join("1" if (index >> j) & 1 else "0" for j in range(n))


def bits_to_index(bits: str) -> int:
    """Inverse of :func:`index_to_bits`."""
    return sum(1 << j for j, c in enumerate(bits) if c == "1")


def _as_bits(z: Bits, n: int) -> List[int]:
    if isinstance(z, str):
        if any(c not in "01" for c in z):
            raise InvalidArgumentError(f"bitstring may only contain 0/1: {z!r}")
        bits = [int(c) for c in z]
    else:
        bits = [int(b) for b in z]
    if len(bits) != n:
        raise InvalidArgumentError(f"assignment has length {len(bits)}, graph has {n} nodes")
    return bits


def cut_value(g: Graph, z: Bits) -> float:
    """Total weight of edges whose endpoints fall on different sides of ``z``."""
    bits = _as_bits(z, g.n)
    return float(sum(w for u, v, w in g.edges if bits[u] != bits[v]))


def brute_force_maxcut(g: Graph, max_nodes: int = MAX_BRUTEFORCE_NODES) -> CutResult:
    """
    Exact Max-Cut by enumeration.

    Node ``n-1`` is pinned to side 0 so only ``2^(n-1)`` assignments are scanned;
    complements of the optimal ones are added back afterwards.
    """
    if g.n > max_nodes:
        raise SizeLimitError(f"brute force limited to {max_nodes} nodes, graph has {g.n}")

    total = 1 << (g.n - 1)
    best = -np.inf
    winners: List[np.ndarray] = []

    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        values = np.zeros(idx.shape, dtype=float)
        for u, v, w in g.edges:
            values += w * (((idx >> u) ^ (idx >> v)) & 1)

        chunk_best = float(values.max())
        if chunk_best > best + 1e-9:
            best = chunk_best
            winners = []
        if chunk_best >= best - 1e-9:
            winners.append(idx[np.abs(values - best) <= 1e-9])

    full = (1 << g.n) - 1
    assignments = set()
    for block in winners:
        for index in block.tolist():
            assignments.add(index_to_bits(index, g.n))
            assignments.add(index_to_bits(index ^ full, g.n))

    return CutResult(max_value=float(best), optimal_assignments=frozenset(assignments))


def _from_networkx(nxg: nx.Graph, weights: Optional[Iterable[float]] = None) -> Graph:
    pairs = sorted((min(u, v), max(u, v)) for u, v in nxg.edges())
    ws = list(weights) if weights is not None else [1.0] * len(pairs)
    return Graph(nxg.number_of_nodes(), tuple((u, v, w) for (u, v), w in zip(pairs, ws)))


def _attempt_seeds(seed: int) -> Iterable[int]:
    rng = np.random.default_rng(seed)
    for _ in range(MAX_ATTEMPTS):
        yield int(rng.integers(0, 2**63 - 1))


def _check_n(n: int) -> None:
    if n < 2:
        raise InvalidArgumentError(f"n must be at least 2, got {n}")


def gen_path(n: int, seed: int = 0) -> Graph:
    """Path 0-1-...-(n-1) with unit weights; ``seed`` is accepted for a uniform generator signature."""
    _check_n(n)
    return _from_networkx(nx.path_graph(n))


def gen_er(n: int, prob: float, seed: int) -> Graph:
    """Erdős–Rényi G(n, prob), resampled until connected."""
    _check_n(n)
    if not 0.0 <= prob <= 1.0:
        raise InvalidArgumentError(f"prob must lie in [0, 1], got {prob}")
    for attempt_seed in _attempt_seeds(seed):
        nxg = nx.erdos_renyi_graph(n, prob, seed=attempt_seed)
        if nx.is_connected(nxg):
            return _from_networkx(nxg)
    raise GenerationError(f"no connected ER({n}, {prob}) graph after {MAX_ATTEMPTS} attempts")


def gen_ra(n: int, r: float, seed: int) -> Graph:
    """Randomly connected model: each pair joined with probability ``r``; whole edge set resampled until connected."""
    _check_n(n)
    if not 0.0 <= r <= 1.0:
        raise InvalidArgumentError(f"r must lie in [0, 1], got {r}")
    rng = np.random.default_rng(seed)
    us, vs = np.triu_indices(n, k=1)
    for _ in range(MAX_ATTEMPTS):
        keep = rng.random(us.size) < r
        g = Graph(n, tuple((int(u), int(v), 1.0) for u, v in zip(us[keep], vs[keep])))
        if g.m >= n - 1 and g.is_connected():
            return g
    raise GenerationError(f"no connected RA({n}, {r}) graph after {MAX_ATTEMPTS} attempts")


def gen_ba(n: int, m_attach: int, seed: int) -> Graph:
    """Barabási–Albert preferential attachment."""
    _check_n(n)
    if not 1 <= m_attach < n:
        raise InvalidArgumentError(f"m_attach must satisfy 1 <= m_attach < n, got {m_attach}")
    return _from_networkx(nx.barabasi_albert_graph(n, m_attach, seed=seed))


def gen_bb(n: int, m_attach: int, seed: int) -> Graph:
    """
    Bianconi–Barabási fitness model.

    Growth starts from a star on ``m_attach + 1`` nodes; each new node links to
    ``m_attach`` distinct nodes chosen with probability proportional to
    fitness times degree. Fitness is uniform on (0, 1].
    """
    _check_n(n)
    if not 1 <= m_attach < n:
        raise InvalidArgumentError(f"m_attach must satisfy 1 <= m_attach < n, got {m_attach}")
    rng = np.random.default_rng(seed)
    fitness = 1.0 - rng.random(n)
    degree = np.zeros(n)
    edges = []

    for leaf in range(1, m_attach + 1):
        edges.append((0, leaf, 1.0))
        degree[0] += 1
        degree[leaf] += 1

    for node in range(m_attach + 1, n):
        weights = fitness[:node] * degree[:node]
        targets = rng.choice(node, size=m_attach, replace=False, p=weights / weights.sum())
        for t in targets.tolist():
            edges.append((t, node, 1.0))
            degree[t] += 1
            degree[node] += 1

    return Graph(n, tuple(edges))


def gen_ws(n: int, k_ring: int, p_rewire: float, seed: int) -> Graph:
    """Watts–Strogatz small world, retried until connected."""
    _check_n(n)
    if not 2 <= k_ring < n:
        raise InvalidArgumentError(f"k_ring must satisfy 2 <= k_ring < n, got {k_ring}")
    if not 0.0 <= p_rewire <= 1.0:
        raise InvalidArgumentError(f"p_rewire must lie in [0, 1], got {p_rewire}")
    try:
        nxg = nx.connected_watts_strogatz_graph(n, k_ring, p_rewire, tries=MAX_ATTEMPTS, seed=seed)
    except nx.NetworkXError as e:
        raise GenerationError(f"WS({n}, {k_ring}, {p_rewire}): {e}")
    return _from_networkx(nxg)


def gen_pl(n: int, seed: int) -> Graph:
    """Power-law tree: each new node attaches to one node picked proportionally to degree."""
    _check_n(n)
    rng = np.random.default_rng(seed)
    degree = np.zeros(n)
    degree[0] = degree[1] = 1
    edges = [(0, 1, 1.0)]
    for node in range(2, n):
        target = int(rng.choice(node, p=degree[:node] / degree[:node].sum()))
        edges.append((target, node, 1.0))
        degree[target] += 1
        degree[node] += 1
    return Graph(n, tuple(edges))


def gen_sk(n: int, seed: int = 0, weights: str = "unit") -> Graph:
    """Complete graph; ``weights='pm1'`` draws ±1 couplings from the seed."""
    _check_n(n)
    nxg = nx.complete_graph(n)
    if weights == "unit":
        return _from_networkx(nxg)
    if weights == "pm1":
        rng = np.random.default_rng(seed)
        signs = rng.choice([-1.0, 1.0], size=nxg.number_of_edges())
        return _from_networkx(nxg, signs.tolist())
    raise InvalidArgumentError(f"unknown SK weight mode {weights!r}")


GraphModel = Callable[..., Graph]

MODELS: Dict[str, GraphModel] = {
    "path": gen_path,
    "er": gen_er,
    "ra": gen_ra,
    "ba": gen_ba,
    "bb": gen_bb,
    "ws": gen_ws,
    "pl": gen_pl,
    "sk": gen_sk,
}

# Parameters each model accepts, with the defaults used when a config omits them.
MODEL_DEFAULTS: Dict[str, Dict[str, object]] = {
    "path": {},
    "er": {"prob": 0.5},
    "ra": {"r": 0.5},
    "ba": {"m_attach": 2},
    "bb": {"m_attach": 2},
    "ws": {"k_ring": 4, "p_rewire": 0.3},
    "pl": {},
    "sk": {"weights": "unit"},
}


def generate(
    model: str,
    n: int,
    seed: int = 0,
    extra_models: Optional[Dict[str, GraphModel]] = None,
    **params: object,
) -> Graph:
    """
    Build a graph from a model name.

    Unknown keyword parameters are rejected; missing ones take ``MODEL_DEFAULTS``.
    ``extra_models`` come from plugins and receive ``(n, seed, **params)`` as-is.
    """
    key = model.lower()
    if extra_models and key in extra_models:
        return extra_models[key](n, seed, **params)
    if key not in MODELS:
        raise InvalidArgumentError(f"unknown graph model {model!r}")

    defaults = MODEL_DEFAULTS[key]
    unknown = set(params) - set(defaults)
    if unknown:
        raise InvalidArgumentError(f"model {key!r} does not take {', '.join(sorted(unknown))}")
    kwargs = {**defaults, **params}
    return MODELS[key](n, seed=seed, **kwargs)
