"""
Training strategies.

Every strategy is a schedule over *units*: groups of parameter entries that
are unmasked together for one optimizer step. Multi-angle training uses the
whole circuit as one unit, round-robin strategies cycle over layers (or
sublayer blocks), and layerwise strategies grow the circuit one layer at a
time. A step always evaluates the cost before, takes one AdaGrad step on the
unit, and evaluates the cost again with fresh samples.
"""

import time
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from orbitqaoa.ansatz import (
    EvalMode,
    Entry,
    Layout,
    Mixer,
    ParamSet,
    init_params,
    objective,
)
from orbitqaoa.graph import Graph, brute_force_maxcut
from orbitqaoa.history import BUDGET_EXHAUSTED, CONVERGED, History, StepRecord
from orbitqaoa.optim import AdaGrad, grad_param_shift
from orbitqaoa.utils import InvalidArgumentError

DEFAULT_EPSILON = 1e-3
DEFAULT_LMA_STEPS = 50
DEFAULT_MAX_STEPS = 2000
DEFAULT_SHOTS = 1024
EXACT_SHADOW_MAX_NODES = 16
SUBLAYER_K = (0.5, 1.0, 2.0, 3.0)


class Strategy(str, Enum):
    MA = "ma"
    LMA = "lma"
    LMA_PLUS = "lma+"
    RR = "rr"
    ORBIT = "orbit"
    SUBLAYER = "sublayer"
    SA = "sa"
    LSA = "lsa"
    LSA_PLUS = "lsa+"


class Order(str, Enum):
    SEQUENTIAL = "sequential"
    RANDOM = "random"


SINGLE_ANGLE_STRATEGIES = (Strategy.SA, Strategy.LSA, Strategy.LSA_PLUS)
LAYERWISE_STRATEGIES = (Strategy.LMA, Strategy.LMA_PLUS, Strategy.LSA, Strategy.LSA_PLUS)


@dataclass(frozen=True)
class TrainerConfig:
    strategy: Strategy = Strategy.ORBIT
    p: int = 5
    epsilon: float = DEFAULT_EPSILON
    order: Order = Order.SEQUENTIAL
    order_seed: int = 0
    lma_fixed_steps: int = DEFAULT_LMA_STEPS
    max_steps: int = DEFAULT_MAX_STEPS
    eval: EvalMode = field(default_factory=lambda: EvalMode.Shots(DEFAULT_SHOTS))
    mixer: Mixer = Mixer.X
    layout: Layout = Layout.MULTI_ANGLE
    k: float = 1.0
    parallel: bool = False
    param_seed: int = 0
    shot_seed: int = 0
    lr: float = 0.1

    def __post_init__(self) -> None:
        for name, kind in (("strategy", Strategy), ("order", Order), ("mixer", Mixer), ("layout", Layout)):
            try:
                object.__setattr__(self, name, kind(getattr(self, name)))
            except ValueError:
                raise InvalidArgumentError(f"unknown {name} {getattr(self, name)!r}")
        object.__setattr__(self, "k", float(self.k))
        if not self.epsilon > 0:
            raise InvalidArgumentError(f"epsilon must be positive, got {self.epsilon}")
        if self.p < 1:
            raise InvalidArgumentError(f"p must be at least 1, got {self.p}")
        if self.max_steps < 1:
            raise InvalidArgumentError(f"max_steps must be at least 1, got {self.max_steps}")
        if self.lma_fixed_steps < 1:
            raise InvalidArgumentError(f"lma_fixed_steps must be at least 1, got {self.lma_fixed_steps}")
        if self.k not in SUBLAYER_K:
            raise InvalidArgumentError(f"k must be one of {SUBLAYER_K}, got {self.k}")
        if self.parallel and self.k != 2.0:
            raise InvalidArgumentError("parallel sublayer updates need k = 2")

    @property
    def effective_layout(self) -> Layout:
        if self.strategy in SINGLE_ANGLE_STRATEGIES:
            return Layout.SINGLE_ANGLE
        return self.layout

    def to_dict(self) -> Dict[str, Any]:
        """Plain-data echo for run files; every seed is included."""
        data = asdict(self)
        for name in ("strategy", "order", "mixer", "layout"):
            data[name] = getattr(self, name).value
        data["layout"] = self.effective_layout.value
        data["eval"] = str(self.eval)
        data["shots"] = self.eval.shots
        return data


@dataclass(frozen=True)
class Unit:
    """Entries updated together, and the layers they belong to."""

    label: str
    entries: Tuple[Entry, ...]
    layers: Tuple[int, ...]


StepCallback = Callable[[StepRecord], None]


def _take_other_layers(replica: ParamSet, shared: ParamSet, layers: Sequence[int]) -> None:
    """Copy every layer except ``layers`` from ``shared`` into ``replica``."""
    own = list(layers)
    for name in ("gamma", "beta"):
        target = replica.field(name)
        kept = target[own].copy()
        target[...] = shared.field(name)
        target[own] = kept


class Trainer:
    """
    Runs one strategy on one graph.

    The three RNG streams are independent numpy generators: parameters are
    drawn from ``param_seed``, every shot sample (cost and gradient
    evaluations, in call order) from ``shot_seed``, and random cycle orders
    from ``order_seed``.
    """

    def __init__(
        self,
        g: Graph,
        cfg: TrainerConfig,
        maxcut: Optional[float] = None,
        on_step: Optional[StepCallback] = None,
    ):
        g.validate_connected()
        self.graph = g
        self.cfg = cfg
        self.maxcut = brute_force_maxcut(g).max_value if maxcut is None else float(maxcut)
        if self.maxcut <= 0:
            raise InvalidArgumentError(f"maxcut must be positive, got {self.maxcut}")
        self.on_step = on_step
        self.params = init_params(g, cfg.p, cfg.effective_layout, cfg.param_seed, cfg.mixer)
        self.opt = AdaGrad.for_params(self.params, lr=cfg.lr)
        self.shot_rng = np.random.default_rng(cfg.shot_seed)
        self.order_rng = np.random.default_rng(cfg.order_seed)
        self.depth = 1 if cfg.strategy in LAYERWISE_STRATEGIES else cfg.p
        self.track_exact = not cfg.eval.analytic and g.n <= EXACT_SHADOW_MAX_NODES
        self.records: List[StepRecord] = []
        self._replicas: Optional[List[Tuple[ParamSet, AdaGrad]]] = None
        self.status = CONVERGED

    # evaluation

    def cost(self) -> float:
        return objective(self.graph, self.params, self.cfg.eval, self.shot_rng, self.depth)

    def _exact_acr(self) -> Optional[float]:
        if not self.track_exact:
            return None
        exact = objective(self.graph, self.params, EvalMode.Analytic(), depth=self.depth)
        return -exact / self.maxcut

    def _budget_left(self) -> bool:
        if len(self.records) >= self.cfg.max_steps:
            self.status = BUDGET_EXHAUSTED
            return False
        return True

    def _record(
        self,
        unit: Unit,
        epoch: int,
        before: float,
        after: float,
        started: int,
        active: Sequence[int],
        frozen: int,
    ) -> StepRecord:
        wall = time.perf_counter_ns() - started
        record = StepRecord(
            step=len(self.records) + 1,
            epoch=epoch,
            unit=unit.label,
            cost_before=before,
            cost_after=after,
            delta=after - before,
            acr=-after / self.maxcut,
            active=tuple(active),
            frozen=frozen,
            wall_ns=wall,
            acr_exact=self._exact_acr(),
        )
        self.records.append(record)
        if self.on_step is not None:
            self.on_step(record)
        return record

    # single updates

    def _update(self, unit: Unit) -> Tuple[float, float, int, bool]:
        started = time.perf_counter_ns()
        self.params.set_mask(unit.entries)
        before = self.cost()
        grad = grad_param_shift(self.graph, self.params, self.cfg.eval, self.shot_rng, self.depth)
        self.opt.step(self.params, grad)
        after = self.cost()
        return before, after, started, abs(after - before) < self.cfg.epsilon

    def _update_parallel(self, unit: Unit) -> Tuple[float, float, int, bool]:
        """
        Update the two halves of a layer as two concurrent executions.

        Each execution owns a replica of the parameters and an AdaGrad state
        for the whole run. Before its step a replica takes every other layer
        from the shared circuit, but inside the current layer it only ever
        sees its own half move; the other half stays where that replica last
        had it. Each execution judges its step on its own cost evaluations,
        and the shared circuit takes each half's new entries as they are.
        The layer is quiet once both executions moved less than epsilon.
        """
        started = time.perf_counter_ns()
        if self._replicas is None:
            self._replicas = [(self.params.copy(), self.opt.copy()) for _ in range(2)]
        self.params.set_mask(unit.entries)
        before = self.cost()
        quiet = True
        halves = np.array_split(np.arange(len(unit.entries)), 2)
        for (replica, opt), half in zip(self._replicas, halves):
            entries = [unit.entries[i] for i in half]
            _take_other_layers(replica, self.params, unit.layers)
            replica.set_mask(entries)
            own_before = objective(self.graph, replica, self.cfg.eval, self.shot_rng, self.depth)
            grad = grad_param_shift(self.graph, replica, self.cfg.eval, self.shot_rng, self.depth)
            opt.step(replica, grad)
            own_after = objective(self.graph, replica, self.cfg.eval, self.shot_rng, self.depth)
            quiet = quiet and abs(own_after - own_before) < self.cfg.epsilon
            for name, index in entries:
                self.params.field(name)[index] = replica.field(name)[index]
        after = self.cost()
        return before, after, started, quiet

    # schedules

    def _units(self) -> List[Unit]:
        cfg, params = self.cfg, self.params
        strategy = cfg.strategy
        if strategy in (Strategy.MA, Strategy.SA):
            return [Unit("all", tuple(params.all_entries()), tuple(range(cfg.p)))]
        if strategy is Strategy.SUBLAYER and cfg.k == 0.5:
            units = []
            for first in range(0, cfg.p, 2):
                layers = tuple(range(first, min(first + 2, cfg.p)))
                entries = tuple(e for layer in layers for e in params.layer_entries(layer))
                label = "layers:" + ",".join(str(layer) for layer in layers)
                units.append(Unit(label, entries, layers))
            return units
        if strategy is Strategy.SUBLAYER and cfg.k > 1 and not cfg.parallel:
            units = []
            blocks = int(cfg.k)
            for layer in range(cfg.p):
                entries = params.layer_entries(layer)
                if len(entries) < blocks:
                    raise InvalidArgumentError(
                        f"layer {layer} has {len(entries)} parameters, cannot split into {blocks} blocks"
                    )
                for b, block in enumerate(np.array_split(np.arange(len(entries)), blocks)):
                    units.append(
                        Unit(f"layer:{layer}/block:{b}", tuple(entries[i] for i in block), (layer,))
                    )
            return units
        return [
            Unit(f"layer:{layer}", tuple(params.layer_entries(layer)), (layer,))
            for layer in range(cfg.p)
        ]

    def _cycle_order(self, active: List[int]) -> List[int]:
        ordered = sorted(active)
        if self.cfg.order is Order.RANDOM:
            return [ordered[i] for i in self.order_rng.permutation(len(ordered))]
        return ordered

    def _round_robin(self, units: List[Unit], freeze: bool) -> None:
        """
        Cycle over units in the configured order.

        With ``freeze`` a unit whose step changes the cost by less than epsilon
        leaves the active set for good, and training ends when none remain.
        Without it, training ends after a full cycle in which every step fell
        below epsilon.
        """
        parallel = self.cfg.strategy is Strategy.SUBLAYER and self.cfg.parallel
        update = self._update_parallel if parallel else self._update
        active = list(range(len(units)))
        epoch = 0
        while active:
            epoch += 1
            quiet = 0
            order = self._cycle_order(active)
            for u in order:
                if not self._budget_left():
                    return
                before, after, started, below = update(units[u])
                if below:
                    quiet += 1
                    if freeze:
                        active.remove(u)
                layers = sorted({layer for i in active for layer in units[i].layers})
                self._record(units[u], epoch, before, after, started, layers, self.cfg.p - len(layers))
            if not freeze and quiet == len(order):
                return

    def _layerwise(self, fixed_steps: Optional[int]) -> None:
        """
        Grow the circuit one layer per stage, training only the newest layer.

        A stage lasts ``fixed_steps`` steps, or until a step changes the cost
        by less than epsilon when ``fixed_steps`` is None.
        """
        for stage in range(self.cfg.p):
            self.depth = stage + 1
            self.opt.reset_accum("all")
            unit = Unit(f"layer:{stage}", tuple(self.params.layer_entries(stage)), (stage,))
            taken = 0
            while True:
                if not self._budget_left():
                    return
                before, after, started, below = self._update(unit)
                taken += 1
                done = taken >= fixed_steps if fixed_steps is not None else below
                last = done and stage == self.cfg.p - 1
                active = () if last else (stage,)
                self._record(unit, stage + 1, before, after, started, active, stage + int(last))
                if done:
                    break

    def run(self) -> History:
        cfg = self.cfg
        initial_cost = self.cost()
        strategy = cfg.strategy
        if strategy in (Strategy.MA, Strategy.SA, Strategy.ORBIT, Strategy.SUBLAYER):
            self._round_robin(self._units(), freeze=True)
        elif strategy is Strategy.RR:
            self._round_robin(self._units(), freeze=False)
        elif strategy in (Strategy.LMA, Strategy.LSA):
            self._layerwise(cfg.lma_fixed_steps)
        else:
            self._layerwise(None)
        return History(
            strategy=strategy.value,
            p=cfg.p,
            maxcut=self.maxcut,
            initial_cost=initial_cost,
            records=self.records,
            status=self.status,
            params=self.params,
            meta={"config": cfg.to_dict(), "n": self.graph.n, "m": self.graph.m},
        )


def _run(
    expected: Tuple[Strategy, ...],
    g: Graph,
    cfg: TrainerConfig,
    maxcut: Optional[float],
    on_step: Optional[StepCallback],
) -> History:
    if cfg.strategy not in expected:
        names = ", ".join(s.value for s in expected)
        raise InvalidArgumentError(f"strategy {cfg.strategy.value!r} given, expected {names}")
    return Trainer(g, cfg, maxcut, on_step).run()


def train_orbit(
    g: Graph, cfg: TrainerConfig, maxcut: Optional[float] = None, on_step: Optional[StepCallback] = None
) -> History:
    """Round-robin over active layers; a layer freezes once its step moves the cost by less than epsilon."""
    return _run((Strategy.ORBIT,), g, cfg, maxcut, on_step)


def train_rr(
    g: Graph, cfg: TrainerConfig, maxcut: Optional[float] = None, on_step: Optional[StepCallback] = None
) -> History:
    return _run((Strategy.RR,), g, cfg, maxcut, on_step)


def train_ma(
    g: Graph, cfg: TrainerConfig, maxcut: Optional[float] = None, on_step: Optional[StepCallback] = None
) -> History:
    return _run((Strategy.MA,), g, cfg, maxcut, on_step)


def train_lma(
    g: Graph, cfg: TrainerConfig, maxcut: Optional[float] = None, on_step: Optional[StepCallback] = None
) -> History:
    return _run((Strategy.LMA,), g, cfg, maxcut, on_step)


def train_lma_plus(
    g: Graph, cfg: TrainerConfig, maxcut: Optional[float] = None, on_step: Optional[StepCallback] = None
) -> History:
    return _run((Strategy.LMA_PLUS,), g, cfg, maxcut, on_step)


def train_sublayer(
    g: Graph, cfg: TrainerConfig, maxcut: Optional[float] = None, on_step: Optional[StepCallback] = None
) -> History:
    return _run((Strategy.SUBLAYER,), g, cfg, maxcut, on_step)


def train_sa(
    g: Graph, cfg: TrainerConfig, maxcut: Optional[float] = None, on_step: Optional[StepCallback] = None
) -> History:
    return _run((Strategy.SA,), g, cfg, maxcut, on_step)


def train_lsa(
    g: Graph, cfg: TrainerConfig, maxcut: Optional[float] = None, on_step: Optional[StepCallback] = None
) -> History:
    return _run((Strategy.LSA,), g, cfg, maxcut, on_step)


def train_lsa_plus(
    g: Graph, cfg: TrainerConfig, maxcut: Optional[float] = None, on_step: Optional[StepCallback] = None
) -> History:
    return _run((Strategy.LSA_PLUS,), g, cfg, maxcut, on_step)


def train(
    g: Graph,
    cfg: TrainerConfig,
    maxcut: Optional[float] = None,
    on_step: Optional[StepCallback] = None,
) -> History:
    """Run whichever strategy ``cfg`` names."""
    return Trainer(g, cfg, maxcut, on_step).run()
