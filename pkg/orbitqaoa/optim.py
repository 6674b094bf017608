"""Gradient estimators and the masked AdaGrad optimizer."""

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np

from orbitqaoa.ansatz import (
    EvalMode,
    GateSlot,
    Mixer,
    ParamSet,
    objective,
    resolve_depth,
    measure_objective,
    run_layers,
)
from orbitqaoa.graph import Graph
from orbitqaoa.statevec import StateVector, init_plus
from orbitqaoa.utils import InvalidArgumentError, NumericalError

SHIFT = math.pi / 4
# Four-term rule for generators with spectrum {-1, 0, +1} (the XY mixer term).
XY_C1 = (1.0 + 1.0 / math.sqrt(2.0)) / 2.0
XY_C2 = (1.0 / math.sqrt(2.0) - 1.0) / 2.0

DEFAULT_LR = 0.1
DEFAULT_EPS = 1e-8


@dataclass(eq=False)
class Gradient:
    """Partial derivatives of the objective; zero outside the mask."""

    gamma: np.ndarray
    beta: np.ndarray

    def field(self, name: str) -> np.ndarray:
        return self.gamma if name == "gamma" else self.beta

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.gamma)) and np.all(np.isfinite(self.beta)))

    @classmethod
    def zeros_like(cls, params: ParamSet) -> "Gradient":
        return cls(np.zeros_like(params.gamma), np.zeros_like(params.beta))


class _ShiftEvaluator:
    """
    Evaluates the objective with one gate angle displaced.

    States entering each layer are cached, so a displaced gate in layer ``l``
    only re-simulates layers ``l..depth-1``.
    """

    def __init__(
        self,
        g: Graph,
        params: ParamSet,
        mode: EvalMode,
        rng: Optional[np.random.Generator],
        depth: int,
    ):
        self.g = g
        self.mixer = params.mixer
        self.mode = mode
        self.rng = rng
        self.depth = depth
        self.cost, self.mix = params.gate_angles()
        self._prefix: Dict[int, StateVector] = {}

    def _entering(self, layer: int) -> StateVector:
        if layer not in self._prefix:
            if layer == 0:
                state = init_plus(self.g.n)
            else:
                state = self._entering(layer - 1).copy()
                run_layers(state, self.g, self.mixer, self.cost, self.mix, layer - 1, layer)
            self._prefix[layer] = state
        return self._prefix[layer]

    def shifted(self, kind: str, layer: int, slot: int, delta: float) -> float:
        angles = self.cost if kind == "cost" else self.mix
        original = angles[layer, slot]
        angles[layer, slot] = original + delta
        try:
            state = self._entering(layer).copy()
            run_layers(state, self.g, self.mixer, self.cost, self.mix, layer, self.depth)
        finally:
            angles[layer, slot] = original
        return measure_objective(state, self.g, self.mode, self.rng)

    def derivative(self, slot: GateSlot) -> float:
        kind, layer, index, _ = slot
        first = self.shifted(kind, layer, index, SHIFT) - self.shifted(kind, layer, index, -SHIFT)
        if kind == "mixer" and self.mixer is Mixer.XY:
            second = self.shifted(kind, layer, index, 3 * SHIFT) - self.shifted(
                kind, layer, index, -3 * SHIFT
            )
            return XY_C1 * first + XY_C2 * second
        return first


def grad_param_shift(
    g: Graph,
    params: ParamSet,
    mode: EvalMode,
    rng: Optional[np.random.Generator] = None,
    depth: Optional[int] = None,
) -> Gradient:
    """
    Parameter-shift gradient over the masked entries.

    Every gate fed by an entry is shifted on its own and the per-gate
    derivatives are combined with the chain rule. ZZ, X and Y rotations use
    the two-term rule at +/- pi/4; XY terms use the exact four-term rule. In
    shot mode each shifted circuit is sampled afresh from ``rng``. Entries in
    layers at or beyond ``depth`` are not in the circuit and stay zero.
    """
    params.check_bound(g)
    depth = resolve_depth(params, depth)
    grad = Gradient.zeros_like(params)
    evaluator = _ShiftEvaluator(g, params, mode, rng, depth)
    for name, index in params.masked_entries():
        if index[0] >= depth:
            continue
        total = 0.0
        for slot in params.gate_slots((name, index)):
            total += slot[3] * evaluator.derivative(slot)
        grad.field(name)[index] = total
    return grad


def grad_finite_diff(
    g: Graph,
    params: ParamSet,
    h: float = 1e-5,
    depth: Optional[int] = None,
) -> Gradient:
    """Central differences of the analytic objective, for validating the shift rules."""
    if h <= 0:
        raise InvalidArgumentError(f"step h must be positive, got {h}")
    depth = resolve_depth(params, depth)
    analytic = EvalMode.Analytic()
    grad = Gradient.zeros_like(params)
    for name, index in params.masked_entries():
        if index[0] >= depth:
            continue
        plus, minus = params.copy(), params.copy()
        plus.field(name)[index] += h
        minus.field(name)[index] -= h
        grad.field(name)[index] = (
            objective(g, plus, analytic, depth=depth) - objective(g, minus, analytic, depth=depth)
        ) / (2.0 * h)
    return grad


@dataclass(eq=False)
class AdaGrad:
    """
    AdaGrad state with one squared-gradient accumulator per parameter entry.

    Only masked entries move: their accumulator grows by ``grad**2`` and the
    parameter steps by ``-lr * grad / (sqrt(accum) + eps)``.
    """

    accum_gamma: np.ndarray
    accum_beta: np.ndarray
    lr: float = DEFAULT_LR
    eps: float = DEFAULT_EPS

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise InvalidArgumentError(f"learning rate must be positive, got {self.lr}")
        if self.eps <= 0:
            raise InvalidArgumentError(f"eps must be positive, got {self.eps}")

    @classmethod
    def for_params(cls, params: ParamSet, lr: float = DEFAULT_LR, eps: float = DEFAULT_EPS) -> "AdaGrad":
        return cls(np.zeros_like(params.gamma), np.zeros_like(params.beta), lr, eps)

    def accum(self, name: str) -> np.ndarray:
        return self.accum_gamma if name == "gamma" else self.accum_beta

    def copy(self) -> "AdaGrad":
        return AdaGrad(self.accum_gamma.copy(), self.accum_beta.copy(), self.lr, self.eps)

    def _check_shapes(self, params: ParamSet, grad: Gradient) -> None:
        expected: Tuple = (params.gamma.shape, params.beta.shape)
        if (self.accum_gamma.shape, self.accum_beta.shape) != expected:
            raise InvalidArgumentError("optimizer state is not congruent to the parameters")
        if (grad.gamma.shape, grad.beta.shape) != expected:
            raise InvalidArgumentError("gradient is not congruent to the parameters")

    def step(self, params: ParamSet, grad: Gradient) -> None:
        """Update masked entries of ``params`` in place."""
        self._check_shapes(params, grad)
        if not grad.is_finite():
            raise NumericalError("gradient contains non-finite values")
        for name in ("gamma", "beta"):
            mask = params.mask_of(name)
            if not mask.any():
                continue
            g = grad.field(name)[mask]
            acc = self.accum(name)
            acc[mask] += g * g
            params.field(name)[mask] -= self.lr * g / (np.sqrt(acc[mask]) + self.eps)

    def reset_accum(self, scope: Union[str, int] = "all") -> None:
        """Zero the accumulator for every entry (``"all"``) or for one layer."""
        if scope == "all":
            self.accum_gamma[...] = 0.0
            self.accum_beta[...] = 0.0
            return
        if isinstance(scope, bool) or not isinstance(scope, int):
            raise InvalidArgumentError(f"reset scope must be 'all' or a layer index, got {scope!r}")
        if not 0 <= scope < self.accum_gamma.shape[0]:
            raise InvalidArgumentError(f"layer {scope} out of range")
        self.accum_gamma[scope] = 0.0
        self.accum_beta[scope] = 0.0
