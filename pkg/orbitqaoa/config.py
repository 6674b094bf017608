"""Configuration management for orbitqaoa."""

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import yaml

from orbitqaoa.ansatz import EvalMode, Layout, Mixer
from orbitqaoa.graph import MAX_BRUTEFORCE_NODES, MODEL_DEFAULTS, Graph, generate
from orbitqaoa.statevec import MAX_QUBITS
from orbitqaoa.trainer import DEFAULT_SHOTS, Order, Strategy, TrainerConfig
from orbitqaoa.utils import (
    PROJECT_FILES,
    ConfigError,
    InvalidArgumentError,
    SizeLimitError,
    deep_merge,
    find_project_root,
    get_env_var,
)

CONFIG_ENV_VAR = "ORBITQAOA_CONFIG"
EXPERIMENT_SUFFIXES = (".yaml", ".yml")

_SHOTS = "shots"
RUN_SCHEMA: Dict[str, Any] = {
    "name": str,
    "description": str,
    "model": str,
    "n": int,
    "seed": int,
    "graph_seed": int,
    "graph_file": str,
    "prob": float,
    "r": float,
    "m_attach": int,
    "k_ring": int,
    "p_rewire": float,
    "weights": str,
    "strategy": str,
    "p": int,
    "epsilon": float,
    "epsilon_per_shot": float,
    "shots": _SHOTS,
    "mixer": str,
    "layout": str,
    "order": str,
    "order_seed": int,
    "lma_steps": int,
    "max_steps": int,
    "k": float,
    "parallel": bool,
    "param_seed": int,
    "shot_seed": int,
    "lr": float,
}
CHOICES: Dict[str, Tuple[str, ...]] = {
    "strategy": tuple(s.value for s in Strategy),
    "mixer": tuple(m.value for m in Mixer),
    "layout": tuple(layout.value for layout in Layout),
    "order": tuple(o.value for o in Order),
    "weights": ("unit", "pm1"),
}
# Keys of the nested ``graph:`` section that map to differently named flat keys.
GRAPH_ALIASES = {"seed": "graph_seed", "file": "graph_file"}
GRAPH_PARAM_KEYS = ("prob", "r", "m_attach", "k_ring", "p_rewire", "weights")
SEEDED_KEYS = ("graph_seed", "param_seed", "shot_seed", "order_seed")
SWEEP_KEYS = ("name", "description", "base", "grid", "workers")

Lines = Dict[str, int]


def _collect_lines(node: yaml.Node, prefix: str, lines: Lines) -> None:
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            path = f"{prefix}{key_node.value}"
            lines[path] = key_node.start_mark.line + 1
            _collect_lines(value_node, path + ".", lines)
    elif isinstance(node, yaml.SequenceNode):
        base = prefix.rstrip(".")
        for i, item in enumerate(node.value):
            lines[f"{base}[{i}]"] = item.start_mark.line + 1
            _collect_lines(item, f"{base}[{i}].", lines)


def load_yaml(path: Path) -> Tuple[Dict[str, Any], Lines]:
    """
    Parse a YAML mapping and record the line of every key.

    Args:
        path: YAML file

    Returns:
        Parsed mapping and a dotted-key to 1-based line table
    """
    try:
        text = path.read_text()
    except IOError as e:
        raise ConfigError(f"Failed to read {path}: {e}")
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"{path}:{mark.line + 1}" if mark is not None else str(path)
        problem = getattr(e, "problem", None) or str(e)
        raise ConfigError(f"{where}: {problem}")
    if data is None:
        return {}, {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}:1: expected a mapping at the top level")
    lines: Lines = {}
    _collect_lines(node, "", lines)
    return data, lines


def _fail(source: str, lines: Lines, key: str, message: str) -> ConfigError:
    line = lines.get(key)
    where = f"{source}:{line}" if line is not None else source
    return ConfigError(f"{where}: {message}")


def _coerce(key: str, value: Any) -> Any:
    """Check one value against the schema; returns it normalized or raises ValueError."""
    kind = RUN_SCHEMA[key]
    if kind is _SHOTS:
        if value is None or value == 0:
            return None
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ValueError(f"'{key}' must be a positive integer or null, got {value!r}")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ValueError(f"'{key}' must be true or false, got {value!r}")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"'{key}' must be an integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"'{key}' must be a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ValueError(f"'{key}' must be a string, got {value!r}")
    choices = CHOICES.get(key)
    if choices and value not in choices:
        raise ValueError(f"unknown {key} '{value}' (expected one of: {', '.join(choices)})")
    return value


def flatten_run(data: Dict[str, Any], lines: Lines, source: str) -> Tuple[Dict[str, Any], Lines]:
    """Fold an optional nested ``graph:`` section into flat keys."""
    flat: Dict[str, Any] = {}
    flat_lines: Lines = dict(lines)
    for key, value in data.items():
        if key != "graph":
            flat[key] = value
            continue
        if not isinstance(value, dict):
            raise _fail(source, lines, key, "'graph' must be a mapping")
        for sub, sub_value in value.items():
            if sub == "params" and isinstance(sub_value, dict):
                for param, param_value in sub_value.items():
                    flat[param] = param_value
                    flat_lines[param] = lines.get(f"graph.params.{param}", lines.get(key, 0))
                continue
            target = GRAPH_ALIASES.get(sub, sub)
            flat[target] = sub_value
            flat_lines[target] = lines.get(f"graph.{sub}", lines.get(key, 0))
    return flat, flat_lines


def validate_run(data: Dict[str, Any], lines: Lines, source: str) -> Dict[str, Any]:
    """Type-check every key of a flat run mapping."""
    checked = {}
    for key, value in data.items():
        if key not in RUN_SCHEMA:
            raise _fail(source, lines, key, f"unknown key '{key}'")
        try:
            checked[key] = _coerce(key, value)
        except ValueError as e:
            raise _fail(source, lines, key, str(e))
    return checked


@dataclass
class RunSpec:
    """A fully resolved training run: the graph, the trainer settings and their echo."""

    name: str
    graph: Graph
    trainer: TrainerConfig
    echo: Dict[str, Any] = field(default_factory=dict)


GraphModels = Dict[str, Callable[..., Graph]]


def build_run(
    data: Dict[str, Any],
    lines: Optional[Lines] = None,
    source: str = "<config>",
    extra_models: Optional[GraphModels] = None,
    max_qubits: int = MAX_QUBITS,
    base_dir: Optional[Path] = None,
) -> RunSpec:
    """
    Resolve a run mapping into a graph and a trainer configuration.

    ``seed`` is the default for every more specific seed. ``epsilon_per_shot``
    sets epsilon to that multiple of 1/shots.
    """
    lines = lines or {}
    flat, lines = flatten_run(data, lines, source)
    cfg = validate_run(flat, lines, source)

    seed = cfg.get("seed", 0)
    for key in SEEDED_KEYS:
        cfg.setdefault(key, seed)

    shots = cfg.get("shots", DEFAULT_SHOTS)
    mode = EvalMode(shots)
    epsilon = cfg.get("epsilon")
    if "epsilon_per_shot" in cfg:
        if "epsilon" in cfg:
            raise _fail(source, lines, "epsilon_per_shot", "give either 'epsilon' or 'epsilon_per_shot', not both")
        if mode.analytic:
            raise _fail(source, lines, "epsilon_per_shot", "'epsilon_per_shot' needs a shot count")
        epsilon = cfg["epsilon_per_shot"] / shots

    graph = _build_graph(cfg, lines, source, extra_models, base_dir)
    if graph.n > max_qubits:
        raise SizeLimitError(f"{source}: graph has {graph.n} nodes, limit is {max_qubits} qubits")

    options: Dict[str, Any] = {
        "mixer": cfg.get("mixer", Mixer.X.value),
        "layout": cfg.get("layout", Layout.MULTI_ANGLE.value),
        "order": cfg.get("order", Order.SEQUENTIAL.value),
        "eval": mode,
        "order_seed": cfg["order_seed"],
        "param_seed": cfg["param_seed"],
        "shot_seed": cfg["shot_seed"],
    }
    for key, option in (
        ("strategy", "strategy"),
        ("p", "p"),
        ("lma_steps", "lma_fixed_steps"),
        ("max_steps", "max_steps"),
        ("k", "k"),
        ("parallel", "parallel"),
        ("lr", "lr"),
    ):
        if key in cfg:
            options[option] = cfg[key]
    if epsilon is not None:
        options["epsilon"] = epsilon
    try:
        trainer = TrainerConfig(**options)
    except InvalidArgumentError as e:
        raise ConfigError(f"{source}: {e}")

    name = cfg.get("name") or _default_name(cfg, trainer)
    echo = {"name": name, "source": source, **cfg, "n": graph.n, "m": graph.m, "epsilon": trainer.epsilon}
    return RunSpec(name=name, graph=graph, trainer=trainer, echo=echo)


def _default_name(cfg: Dict[str, Any], trainer: TrainerConfig) -> str:
    graph = cfg.get("model") or Path(cfg.get("graph_file", "graph")).stem
    return f"{trainer.strategy.value}-{graph}{cfg.get('n', '')}-p{trainer.p}-s{cfg['param_seed']}"


def _build_graph(
    cfg: Dict[str, Any],
    lines: Lines,
    source: str,
    extra_models: Optional[GraphModels],
    base_dir: Optional[Path],
) -> Graph:
    if "graph_file" in cfg:
        path = Path(cfg["graph_file"])
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        if not path.exists():
            raise _fail(source, lines, "graph_file", f"graph file not found: {path}")
        return Graph.load(path)
    if "model" not in cfg or "n" not in cfg:
        raise ConfigError(f"{source}: a run needs 'model' and 'n', or 'graph_file'")
    model = cfg["model"]
    known = set(MODEL_DEFAULTS) | set(extra_models or {})
    if model not in known:
        raise _fail(source, lines, "model", f"unknown model '{model}' (expected one of: {', '.join(sorted(known))})")
    if model in MODEL_DEFAULTS:
        params = {k: cfg[k] for k in MODEL_DEFAULTS[model] if k in cfg}
    else:
        params = {k: cfg[k] for k in GRAPH_PARAM_KEYS if k in cfg}
    return generate(model, cfg["n"], seed=cfg["graph_seed"], extra_models=extra_models, **params)


@dataclass
class SweepSpec:
    name: str
    base: Dict[str, Any]
    axes: List[Tuple[str, List[Any]]]
    workers: int = 1
    source: str = "<sweep>"
    description: str = ""

    def cells(self) -> List[Dict[str, Any]]:
        """Cartesian product of the axes over the base mapping; no axes means no cells."""
        if not self.axes or any(not values for _, values in self.axes):
            return []
        names = [name for name, _ in self.axes]
        cells = []
        for combo in itertools.product(*(values for _, values in self.axes)):
            cell = dict(self.base)
            cell.update(zip(names, combo))
            cells.append(cell)
        return cells


def parse_sweep(data: Dict[str, Any], lines: Lines, source: str) -> SweepSpec:
    for key in data:
        if key not in SWEEP_KEYS:
            raise _fail(source, lines, key, f"unknown sweep key '{key}'")
    base = data.get("base") or {}
    grid = data.get("grid") or {}
    if not isinstance(base, dict):
        raise _fail(source, lines, "base", "'base' must be a mapping")
    if not isinstance(grid, dict):
        raise _fail(source, lines, "grid", "'grid' must be a mapping of axis to list")
    base_lines = {k[len("base."):]: v for k, v in lines.items() if k.startswith("base.")}
    base, base_lines = flatten_run(base, base_lines, source)
    base = validate_run(base, base_lines, source)

    axes = []
    for axis, values in grid.items():
        key = f"grid.{axis}"
        if axis not in RUN_SCHEMA:
            raise _fail(source, lines, key, f"unknown grid axis '{axis}'")
        if not isinstance(values, list):
            raise _fail(source, lines, key, f"grid axis '{axis}' must be a list")
        checked = []
        for i, value in enumerate(values):
            try:
                checked.append(_coerce(axis, value))
            except ValueError as e:
                raise _fail(source, lines, f"{key}[{i}]", str(e))
        axes.append((axis, checked))

    workers = data.get("workers", 1)
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
        raise _fail(source, lines, "workers", f"'workers' must be a positive integer, got {workers!r}")
    return SweepSpec(
        name=data.get("name") or Path(source).stem,
        base=base,
        axes=axes,
        workers=workers,
        source=source,
        description=data.get("description", ""),
    )


@dataclass
class ExperimentFile:
    path: Path
    data: Dict[str, Any]
    lines: Lines

    @property
    def is_sweep(self) -> bool:
        return "grid" in self.data

    @property
    def description(self) -> str:
        return str(self.data.get("description", "")).strip()


class Config:
    """Project configuration (``orbitqaoa.yaml``) and experiment lookup."""

    def __init__(self, config_path: Optional[Path] = None):
        """
        Initialize configuration.

        Args:
            config_path: Path to orbitqaoa.yaml (string or Path); found
                automatically when omitted
        """
        if config_path and not isinstance(config_path, Path):
            config_path = Path(config_path)
        self.config_path = config_path or self._find_config()
        self.root_dir = self.config_path.parent if self.config_path else Path.cwd()
        self._config: Dict[str, Any] = {}
        self._load_config()

    def _find_config(self) -> Optional[Path]:
        """Find orbitqaoa.yaml: the environment override first, then the project root."""
        override = get_env_var(CONFIG_ENV_VAR)
        if override:
            return Path(override)
        project_root = find_project_root()
        if project_root:
            for name in PROJECT_FILES:
                config_file = project_root / name
                if config_file.exists():
                    return config_file
        return None

    def _load_config(self) -> None:
        if not self.config_path:
            return
        if not self.config_path.exists():
            raise ConfigError(f"Config file not found: {self.config_path}")
        self._config, _ = load_yaml(self.config_path)

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value by dot-notation key.

        Args:
            key: Configuration key (supports dot notation)
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        value: Any = self._config
        for k in key.split("."):
            if isinstance(value, dict):
                value = value.get(k)
                if value is None:
                    return default
            else:
                return default
        return value

    def _resolve(self, key: str, default: str) -> Path:
        path = Path(self.get(key) or default)
        if not path.is_absolute():
            path = self.root_dir / path
        return path

    def get_experiments_dir(self) -> Path:
        """Get experiments directory path. Default: experiments/"""
        return self._resolve("experiments_dir", "experiments")

    def get_output_dir(self) -> Path:
        """Get output directory path. Default: runs/"""
        return self._resolve("output_dir", "runs")

    def get_defaults(self) -> Dict[str, Any]:
        defaults = self.get("defaults", {})
        if not isinstance(defaults, dict):
            raise ConfigError(f"{self.config_path}: 'defaults' must be a mapping")
        return defaults

    @property
    def max_qubits(self) -> int:
        return int(self.get("limits.max_qubits", MAX_QUBITS))

    @property
    def max_bruteforce_nodes(self) -> int:
        return int(self.get("limits.max_bruteforce_nodes", MAX_BRUTEFORCE_NODES))

    def list_experiments(self) -> List[str]:
        """
        List available experiment configs.

        Returns:
            Experiment names (file stems), sorted
        """
        experiments_dir = self.get_experiments_dir()
        if not experiments_dir.exists():
            return []
        return sorted(
            path.stem
            for path in experiments_dir.iterdir()
            if path.is_file() and path.suffix in EXPERIMENT_SUFFIXES
        )

    def resolve_experiment(self, name_or_path: str) -> Path:
        candidate = Path(name_or_path)
        if candidate.exists():
            return candidate
        for suffix in EXPERIMENT_SUFFIXES:
            path = self.get_experiments_dir() / f"{name_or_path}{suffix}"
            if path.exists():
                return path
        raise ConfigError(f"Experiment not found: {name_or_path}")

    def load_experiment(self, name_or_path: str) -> ExperimentFile:
        """Load an experiment file with the project defaults merged underneath."""
        path = self.resolve_experiment(name_or_path)
        data, lines = load_yaml(path)
        defaults = self.get_defaults()
        if defaults:
            if "grid" in data:
                data = dict(data)
                data["base"] = deep_merge(defaults, data.get("base") or {})
            else:
                data = deep_merge(defaults, data)
        return ExperimentFile(path, data, lines)

    def to_dict(self) -> Dict[str, Any]:
        return self._config.copy()
