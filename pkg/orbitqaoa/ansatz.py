"""QAOA circuits: parameter layouts, mixer choice and the cut objective."""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from orbitqaoa.graph import Graph
from orbitqaoa.statevec import (
    MAX_QUBITS,
    StateVector,
    apply_cost_layer,
    apply_rx,
    apply_xy,
    apply_y_rot,
    estimate_cut,
    expectation_cut,
    init_plus,
    sample,
)
from orbitqaoa.utils import InvalidArgumentError

INIT_SCALE = 0.1

# (field, index) addressing one trainable angle; index is (layer,) or (layer, slot).
Entry = Tuple[str, Tuple[int, ...]]
# (kind, layer, slot, coefficient): one gate occurrence fed by an entry.
GateSlot = Tuple[str, int, int, float]


class Layout(str, Enum):
    MULTI_ANGLE = "ma"
    SINGLE_ANGLE = "sa"


class Mixer(str, Enum):
    X = "x"
    XY = "xy"
    Y = "y"


@dataclass(frozen=True)
class EvalMode:
    """Analytic when ``shots`` is None, otherwise ``shots`` samples per evaluation."""

    shots: Optional[int] = None

    def __post_init__(self) -> None:
        if self.shots is not None and self.shots < 1:
            raise InvalidArgumentError(f"shots must be at least 1, got {self.shots}")

    @property
    def analytic(self) -> bool:
        return self.shots is None

    @classmethod
    def Analytic(cls) -> "EvalMode":
        return cls(None)

    @classmethod
    def Shots(cls, shots: int) -> "EvalMode":
        return cls(shots)

    def __str__(self) -> str:
        return "analytic" if self.analytic else f"shots={self.shots}"


def mixer_width(n: int, m: int, mixer: Mixer) -> int:
    """Mixer angles per layer in the multi-angle layout: one per edge for XY, per qubit otherwise."""
    return m if mixer is Mixer.XY else n


@dataclass(eq=False)
class ParamSet:
    """
    Layered variational angles plus a trainable-entry mask.

    Multi-angle: ``gamma`` is (p, m), ``beta`` is (p, n), or (p, m) for the XY
    mixer. Single-angle: both are length-p vectors.
    """

    p: int
    layout: Layout
    mixer: Mixer
    n: int
    m: int
    gamma: np.ndarray
    beta: np.ndarray
    gamma_mask: np.ndarray
    beta_mask: np.ndarray

    def __post_init__(self) -> None:
        self.gamma = np.asarray(self.gamma, dtype=float)
        self.beta = np.asarray(self.beta, dtype=float)
        self.gamma_mask = np.asarray(self.gamma_mask, dtype=bool)
        self.beta_mask = np.asarray(self.beta_mask, dtype=bool)
        expected = self.shapes(self.p, self.layout, self.mixer, self.n, self.m)
        actual = (self.gamma.shape, self.beta.shape)
        if actual != expected:
            raise InvalidArgumentError(f"parameter shapes {actual} do not match {expected}")
        if (self.gamma_mask.shape, self.beta_mask.shape) != expected:
            raise InvalidArgumentError("mask shape is not congruent to the parameters")
        if not (np.all(np.isfinite(self.gamma)) and np.all(np.isfinite(self.beta))):
            raise InvalidArgumentError("angles must be finite")

    @staticmethod
    def shapes(p: int, layout: Layout, mixer: Mixer, n: int, m: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        if layout is Layout.SINGLE_ANGLE:
            return (p,), (p,)
        return (p, m), (p, mixer_width(n, m, mixer))

    @property
    def size(self) -> int:
        return self.gamma.size + self.beta.size

    def copy(self) -> "ParamSet":
        """Deep copy of angles and masks."""
        return ParamSet(
            self.p, self.layout, self.mixer, self.n, self.m,
            self.gamma.copy(), self.beta.copy(),
            self.gamma_mask.copy(), self.beta_mask.copy(),
        )

    def field(self, name: str) -> np.ndarray:
        """The ``gamma`` or ``beta`` array itself, for in-place updates."""
        return self.gamma if name == "gamma" else self.beta

    def mask_of(self, name: str) -> np.ndarray:
        return self.gamma_mask if name == "gamma" else self.beta_mask

    def check_bound(self, g: Graph) -> None:
        """
        Check that these parameters were built for ``g``.

        Raises:
            InvalidArgumentError: node or edge counts differ from the graph
        """
        if (self.n, self.m) != (g.n, g.m):
            raise InvalidArgumentError(
                f"parameters bound to n={self.n}, m={self.m}; graph has n={g.n}, m={g.m}"
            )

    def layer_entries(self, layer: int) -> List[Entry]:
        """Entries of one layer: gamma entries (edge order) then beta entries."""
        if not 0 <= layer < self.p:
            raise InvalidArgumentError(f"layer {layer} out of range for p={self.p}")
        if self.layout is Layout.SINGLE_ANGLE:
            return [("gamma", (layer,)), ("beta", (layer,))]
        return (
            [("gamma", (layer, e)) for e in range(self.gamma.shape[1])]
            + [("beta", (layer, j)) for j in range(self.beta.shape[1])]
        )

    def all_entries(self) -> List[Entry]:
        """Every entry, layer by layer."""
        return [entry for layer in range(self.p) for entry in self.layer_entries(layer)]

    def set_mask(self, entries: Iterable[Entry]) -> None:
        """Make exactly ``entries`` trainable."""
        self.gamma_mask[...] = False
        self.beta_mask[...] = False
        for name, index in entries:
            self.mask_of(name)[index] = True

    def masked_entries(self) -> List[Entry]:
        out: List[Entry] = []
        for name in ("gamma", "beta"):
            for index in zip(*np.nonzero(self.mask_of(name))):
                out.append((name, tuple(int(i) for i in index)))
        return out

    def gate_slots(self, entry: Entry) -> List[GateSlot]:
        """
        Gate occurrences driven by one entry, with chain-rule coefficients.

        A single-angle gamma feeds every edge phase of its layer at half
        strength; a single-angle beta feeds every mixer term of its layer.
        """
        name, index = entry
        layer = index[0]
        kind = "cost" if name == "gamma" else "mixer"
        if self.layout is Layout.MULTI_ANGLE:
            return [(kind, layer, index[1], 1.0)]
        if name == "gamma":
            return [("cost", layer, e, 0.5) for e in range(self.m)]
        width = mixer_width(self.n, self.m, self.mixer)
        return [("mixer", layer, j, 1.0) for j in range(width)]

    def gate_angles(self) -> Tuple[np.ndarray, np.ndarray]:
        """Per-layer cost angles (p, m) and mixer angles (p, width) actually applied."""
        if self.layout is Layout.MULTI_ANGLE:
            return self.gamma.copy(), self.beta.copy()
        width = mixer_width(self.n, self.m, self.mixer)
        cost = np.repeat((self.gamma / 2.0)[:, None], self.m, axis=1)
        mix = np.repeat(self.beta[:, None], width, axis=1)
        return cost, mix

    def to_multi_angle(self) -> "ParamSet":
        """Tied multi-angle parameters producing the same circuit."""
        if self.layout is Layout.MULTI_ANGLE:
            return self.copy()
        cost, mix = self.gate_angles()
        return ParamSet(
            self.p, Layout.MULTI_ANGLE, self.mixer, self.n, self.m,
            cost, mix, np.ones_like(cost, dtype=bool), np.ones_like(mix, dtype=bool),
        )

    def to_mapping(self) -> Dict[str, Any]:
        """Layer-major structure for YAML checkpoints."""
        return {
            "p": self.p,
            "layout": self.layout.value,
            "mixer": self.mixer.value,
            "n": self.n,
            "m": self.m,
            "layers": [
                {
                    "gamma": np.atleast_1d(self.gamma[layer]).tolist(),
                    "beta": np.atleast_1d(self.beta[layer]).tolist(),
                }
                for layer in range(self.p)
            ],
        }

    @classmethod
    def from_mapping(cls, data: Dict[str, Any]) -> "ParamSet":
        try:
            layout = Layout(data["layout"])
            mixer = Mixer(data["mixer"])
            p, n, m = int(data["p"]), int(data["n"]), int(data["m"])
            layers = data["layers"]
            gamma = np.array([layer["gamma"] for layer in layers], dtype=float)
            beta = np.array([layer["beta"] for layer in layers], dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidArgumentError(f"malformed parameter mapping: {e}")
        if layout is Layout.SINGLE_ANGLE:
            gamma, beta = gamma.reshape(-1), beta.reshape(-1)
        return cls(
            p, layout, mixer, n, m, gamma, beta,
            np.ones_like(gamma, dtype=bool), np.ones_like(beta, dtype=bool),
        )


def init_params(
    g: Graph,
    p: int,
    layout: Layout = Layout.MULTI_ANGLE,
    seed: int = 0,
    mixer: Mixer = Mixer.X,
) -> ParamSet:
    """Angles drawn i.i.d. uniform on [-0.1, 0.1]; everything trainable."""
    if p < 1:
        raise InvalidArgumentError(f"p must be at least 1, got {p}")
    layout, mixer = Layout(layout), Mixer(mixer)
    rng = np.random.default_rng(seed)
    gamma_shape, beta_shape = ParamSet.shapes(p, layout, mixer, g.n, g.m)
    gamma = rng.uniform(-INIT_SCALE, INIT_SCALE, size=gamma_shape)
    beta = rng.uniform(-INIT_SCALE, INIT_SCALE, size=beta_shape)
    return ParamSet(
        p, layout, mixer, g.n, g.m, gamma, beta,
        np.ones(gamma_shape, dtype=bool), np.ones(beta_shape, dtype=bool),
    )


def apply_mixer_layer(s: StateVector, g: Graph, mixer: Mixer, angles: np.ndarray) -> None:
    """Mixer terms of one layer: qubits ascending, or edges in canonical order for XY."""
    if mixer is Mixer.X:
        for j in range(g.n):
            apply_rx(s, j, float(angles[j]))
    elif mixer is Mixer.Y:
        for j in range(g.n):
            apply_y_rot(s, j, float(angles[j]))
    else:
        for (u, v, _), beta in zip(g.edges, angles):
            apply_xy(s, u, v, float(beta))


def run_layers(
    s: StateVector,
    g: Graph,
    mixer: Mixer,
    cost: np.ndarray,
    mix: np.ndarray,
    start: int,
    stop: int,
) -> StateVector:
    """Apply layers ``start..stop-1`` to ``s`` in place."""
    for layer in range(start, stop):
        apply_cost_layer(s, g, cost[layer])
        apply_mixer_layer(s, g, mixer, mix[layer])
    return s


def resolve_depth(params: ParamSet, depth: Optional[int]) -> int:
    if depth is None:
        return params.p
    if not 1 <= depth <= params.p:
        raise InvalidArgumentError(f"depth {depth} out of range for p={params.p}")
    return depth


def evaluate(
    g: Graph,
    params: ParamSet,
    depth: Optional[int] = None,
    max_qubits: int = MAX_QUBITS,
) -> StateVector:
    """
    Prepare the QAOA state.

    ``depth`` truncates the circuit to its first layers (used while a layerwise
    strategy is still growing the circuit).
    """
    params.check_bound(g)
    cost, mix = params.gate_angles()
    state = init_plus(g.n, max_qubits)
    return run_layers(state, g, params.mixer, cost, mix, 0, resolve_depth(params, depth))


def measure_objective(
    s: StateVector,
    g: Graph,
    mode: EvalMode,
    rng: Optional[np.random.Generator],
) -> float:
    """Negated cut expectation (analytic) or negated shot estimate."""
    if mode.analytic:
        return -expectation_cut(s, g)
    if rng is None:
        raise InvalidArgumentError("shot evaluation needs an RNG stream")
    return -estimate_cut(sample(s, mode.shots, rng), g)


def objective(
    g: Graph,
    params: ParamSet,
    mode: EvalMode,
    rng: Optional[np.random.Generator] = None,
    depth: Optional[int] = None,
) -> float:
    """
    Quantity minimized by training; the reported cut value is its negation.

    Args:
        g: Problem graph the parameters are bound to
        params: Angles to evaluate
        mode: Exact expectation or a shot estimate
        rng: Shot stream, required in shot mode and advanced by one sample draw
        depth: Evaluate only the first ``depth`` layers

    Returns:
        Negated cut value
    """
    return measure_objective(evaluate(g, params, depth), g, mode, rng)
