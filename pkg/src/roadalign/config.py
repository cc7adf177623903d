"""Run configuration read from a YAML file.

Top-level blocks and their keys::

    terrain:
      path: ground.asc          # ASCII lattice, relative to the config file
      # or, instead of path:
      synthetic: {kind: sinusoidal, width: 500, height: 1000, cell_size: 10,
                  amplitude: 30, wavelength: 300, slope_y: 0.03, seed: 1}
    start: [100, 10]            # x, y (ground elevation used) or x, y, z
    end: [400, 990]
    alignment: {n_ips: 6, m: 5} # m is one count or a list of n_ips + 1 counts
    costs: {C_c: 4, C_f: 2, C_w: 8, C_u: 1.2, W: 5, kappa: 1, C_b: null, gamma_shrink: 1}
    constraints:
      r_min: 20
      G_max: 0.15
      z_bar: 20
      r_max: 500
      boxes: [[xl, xu, yl, yu], ...]   # or
      box_half_width: [100, 50]        # boxes around evenly spaced points
    solver:
      name: dms                 # ws | dms | ea
      budget: 51000
      ws: {n_weights: 51, per_run_budget: 1000}
      dms: {initial_step: 0.1}
      ea: {population_size: 120}
    seed: 0
    output: {dir: out, units: m}   # units m or dam (plot data only)

Every error carries the offending field and, when known, its line.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import yaml

from .constraints import ConstraintConfig
from .costing import CostParameters
from .exceptions import ConfigError

__all__ = ["RunConfig", "load_config", "parse_config", "SOLVER_NAMES", "solver_params"]

SOLVER_NAMES = ("ws", "dms", "ea")

_SOLVER_KEYS = {
    "ws": {"n_weights", "per_run_budget", "initial_step", "min_step", "penalty_weight"},
    "dms": {"initial_step", "min_step"},
    "ea": {"population_size", "crossover_rate", "mutation_rate", "eta_c", "mutation_scale", "init_scale"},
}
_COST_KEYS = ("C_c", "C_f", "C_w", "C_u", "W", "kappa", "C_b", "gamma_shrink")
_SYNTH_KEYS = {"kind", "width", "height", "cell_size", "base", "slope_x", "slope_y", "amplitude", "wavelength",
               "n_waves", "seed", "origin_x", "origin_y"}


@dataclass(frozen=True)
class RunConfig:
    terrain_path: Optional[str]
    synthetic: Optional[dict]
    start: tuple
    end: tuple
    n_ips: int
    m: tuple
    costs: CostParameters
    constraints: ConstraintConfig
    r_max: float
    solver: str
    budget: Optional[int]
    solver_options: dict = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "out"
    units: str = "m"

    def with_overrides(self, solver=None, budget=None, seed=None, output_dir=None) -> "RunConfig":
        changes = {}
        if solver is not None:
            if solver not in SOLVER_NAMES:
                raise ConfigError(f"unknown solver {solver!r}", "solver.name")
            changes["solver"] = solver
        if budget is not None:
            if budget < 0:
                raise ConfigError("budget must be non-negative", "solver.budget")
            changes["budget"] = int(budget)
        if seed is not None:
            if seed < 0:
                raise ConfigError("seed must be non-negative", "seed")
            changes["seed"] = int(seed)
        if output_dir is not None:
            changes["output_dir"] = output_dir
        return replace(self, **changes)


class _Node:
    """Mapping view that remembers where each key was written."""

    def __init__(self, value, lines, path):
        self.value = value
        self.lines = lines
        self.path = path

    def line(self, key=None):
        return self.lines.get(self._join(key))

    def _join(self, key):
        if key is None:
            return self.path
        return f"{self.path}.{key}" if self.path else str(key)

    def error(self, message, key=None):
        return ConfigError(message, self._join(key), self.line(key))

    def keys(self):
        return self.value.keys()

    def has(self, key):
        return key in self.value and self.value[key] is not None

    def sub(self, key, required=False):
        if key not in self.value or self.value[key] is None:
            if required:
                raise self.error("missing block", key)
            return _Node({}, self.lines, self._join(key))
        v = self.value[key]
        if not isinstance(v, dict):
            raise self.error("expected a mapping", key)
        return _Node(v, self.lines, self._join(key))

    def check_keys(self, allowed):
        for k in self.value:
            if k not in allowed:
                raise self.error("unknown key", k)

    def get(self, key, kind, default=None, required=False):
        if key not in self.value or self.value[key] is None:
            if required:
                raise self.error("missing value", key)
            return default
        v = self.value[key]
        if kind is float:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise self.error(f"expected a number, got {v!r}", key)
            return float(v)
        if kind is int:
            if isinstance(v, bool) or not isinstance(v, int):
                raise self.error(f"expected an integer, got {v!r}", key)
            return v
        if kind is str:
            if not isinstance(v, str):
                raise self.error(f"expected a string, got {v!r}", key)
            return v
        return v

    def numbers(self, key, length=None, required=False):
        v = self.get(key, list, required=required)
        if v is None:
            return None
        if not isinstance(v, list) or any(isinstance(a, bool) or not isinstance(a, (int, float)) for a in v):
            raise self.error("expected a list of numbers", key)
        if length is not None and len(v) not in length:
            raise self.error(f"expected {' or '.join(map(str, length))} numbers, got {len(v)}", key)
        return tuple(float(a) for a in v)


def _compose(text):
    """YAML text to plain Python data plus a ``dotted.path -> line`` map."""
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"YAML syntax error: {getattr(exc, 'problem', exc)}",
                          line=mark.line + 1 if mark else None) from None
    lines = {}
    constructor = yaml.SafeLoader("")

    def walk(node, path):
        lines[path] = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            out = {}
            for k, v in node.value:
                key = constructor.construct_object(k)
                sub = f"{path}.{key}" if path else str(key)
                out[key] = walk(v, sub)
                lines[sub] = k.start_mark.line + 1
            return out
        if isinstance(node, yaml.SequenceNode):
            return [walk(v, f"{path}[{i}]") for i, v in enumerate(node.value)]
        return constructor.construct_object(node)

    if root is None:
        raise ConfigError("configuration file is empty", line=1)
    data = walk(root, "")
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", line=1)
    return data, lines


def _auto_boxes(start, end, n, half):
    frac = np.arange(1, n + 1) / (n + 1)
    cx = start[0] + frac * (end[0] - start[0])
    cy = start[1] + frac * (end[1] - start[1])
    return np.column_stack([cx - half[0], cx + half[0], cy - half[1], cy + half[1]])


def parse_config(text, base_dir=".") -> RunConfig:
    """Validate YAML ``text``; relative paths resolve against ``base_dir``."""
    data, lines = _compose(text)
    root = _Node(data, lines, "")
    root.check_keys({"terrain", "start", "end", "alignment", "costs", "constraints", "solver", "seed", "output"})

    terrain = root.sub("terrain", required=True)
    terrain.check_keys({"path", "synthetic"})
    path = terrain.get("path", str)
    synthetic = None
    if path is not None:
        if terrain.has("synthetic"):
            raise terrain.error("give either path or synthetic, not both", "synthetic")
        path = os.path.normpath(os.path.join(base_dir, path))
    elif terrain.has("synthetic"):
        syn = terrain.sub("synthetic")
        syn.check_keys(_SYNTH_KEYS)
        synthetic = {"kind": syn.get("kind", str, required=True)}
        for key in ("width", "height", "cell_size"):
            synthetic[key] = syn.get(key, float, required=True)
        for key in ("base", "slope_x", "slope_y", "amplitude", "wavelength", "origin_x", "origin_y"):
            if syn.has(key):
                synthetic[key] = syn.get(key, float)
        for key in ("n_waves", "seed"):
            if syn.has(key):
                synthetic[key] = syn.get(key, int)
    else:
        raise terrain.error("needs path or synthetic")

    start = root.numbers("start", (2, 3), required=True)
    end = root.numbers("end", (2, 3), required=True)

    align = root.sub("alignment", required=True)
    align.check_keys({"n_ips", "m"})
    n_ips = align.get("n_ips", int, required=True)
    if n_ips < 1:
        raise align.error("need at least one intersection point", "n_ips")
    m_raw = align.get("m", object, default=5)
    if isinstance(m_raw, list):
        if len(m_raw) != n_ips + 1 or any(isinstance(v, bool) or not isinstance(v, int) for v in m_raw):
            raise align.error(f"expected {n_ips + 1} integer counts", "m")
        m = tuple(m_raw)
    elif isinstance(m_raw, int) and not isinstance(m_raw, bool):
        m = (m_raw,) * (n_ips + 1)
    else:
        raise align.error(f"expected an integer or a list, got {m_raw!r}", "m")
    if min(m) < 1:
        raise align.error("subdivision counts must be at least 1", "m")

    cost_node = root.sub("costs")
    cost_node.check_keys(set(_COST_KEYS))
    kwargs = {k: cost_node.get(k, float) for k in _COST_KEYS if cost_node.has(k)}
    try:
        costs = CostParameters(**kwargs)
    except ValueError as exc:
        bad = next((k for k in kwargs if k in str(exc)), None)
        raise cost_node.error(str(exc), bad) from None

    cons = root.sub("constraints", required=True)
    cons.check_keys({"r_min", "G_max", "z_bar", "r_max", "boxes", "box_half_width"})
    if cons.has("boxes"):
        raw = cons.get("boxes", list)
        try:
            boxes = np.array(raw, dtype=float)
        except (TypeError, ValueError):
            raise cons.error("boxes must be a list of [x_l, x_u, y_l, y_u] rows", "boxes") from None
        if boxes.shape != (n_ips, 4):
            raise cons.error(f"expected {n_ips} rows of 4 numbers", "boxes")
    elif cons.has("box_half_width"):
        half = cons.numbers("box_half_width", (2,))
        if min(half) < 0:
            raise cons.error("half widths must be non-negative", "box_half_width")
        boxes = _auto_boxes(start, end, n_ips, half)
    else:
        raise cons.error("needs boxes or box_half_width")
    ckw = {k: cons.get(k, float) for k in ("r_min", "G_max", "z_bar") if cons.has(k)}
    try:
        constraints = ConstraintConfig(boxes, **ckw)
    except ValueError as exc:
        bad = next((k for k in ("r_min", "G_max", "z_bar", "boxes") if k in str(exc)), None)
        raise cons.error(str(exc), bad) from None
    r_max = cons.get("r_max", float, default=500.0)
    if r_max < constraints.r_min:
        raise cons.error("r_max must be at least r_min", "r_max")

    sol = root.sub("solver")
    sol.check_keys({"name", "budget"} | set(SOLVER_NAMES))
    name = sol.get("name", str, default="dms")
    if name not in SOLVER_NAMES:
        raise sol.error(f"unknown solver {name!r}; choose from {', '.join(SOLVER_NAMES)}", "name")
    budget = sol.get("budget", int)
    if budget is not None and budget < 0:
        raise sol.error("budget must be non-negative", "budget")
    options = {}
    for sname in SOLVER_NAMES:
        block = sol.sub(sname)
        block.check_keys(_SOLVER_KEYS[sname])
        opts = {}
        for key in block.keys():
            kind = int if key in ("n_weights", "per_run_budget", "population_size") else float
            opts[key] = block.get(key, kind)
        options[sname] = opts

    seed = root.get("seed", int, default=0)
    if seed < 0:
        raise root.error("seed must be non-negative", "seed")

    out = root.sub("output")
    out.check_keys({"dir", "units"})
    output_dir = os.path.normpath(os.path.join(base_dir, out.get("dir", str, default="out")))
    units = out.get("units", str, default="m")
    if units not in ("m", "dam"):
        raise out.error("units must be 'm' or 'dam'", "units")

    return RunConfig(
        terrain_path=path,
        synthetic=synthetic,
        start=start,
        end=end,
        n_ips=n_ips,
        m=m,
        costs=costs,
        constraints=constraints,
        r_max=r_max,
        solver=name,
        budget=budget,
        solver_options=options,
        seed=seed,
        output_dir=output_dir,
        units=units,
    )


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc.strerror}", "config") from None
    return parse_config(text, os.path.dirname(os.path.abspath(path)))


def solver_params(config: RunConfig) -> dict:
    """Keyword arguments for the configured solver class.

    A top-level budget is split evenly over the weights for ``ws``.
    """
    opts = dict(config.solver_options.get(config.solver, {}))
    if config.solver == "ws":
        if config.budget is not None:
            n = opts.get("n_weights", 51)
            opts["per_run_budget"] = config.budget // max(int(n), 1)
    else:
        if config.budget is not None:
            opts["budget"] = config.budget
        if config.solver == "ea":
            opts["random_state"] = config.seed
    return opts
