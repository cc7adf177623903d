"""Command-line driver: ``roadalign run | eval | gen-terrain``.

Exit codes: 0 success, 2 configuration or input file error, 3 terrain error,
4 seeding error, 5 solver error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import shutil
import sys
import tempfile
import time

import numpy as np

from .alignment import AlignmentDesign, build_horizontal, build_segments, centerline_point, geometry_report
from .config import SOLVER_NAMES, RunConfig, load_config, solver_params
from .exceptions import ConfigError, RoadAlignError, SeedingError, SolverError, TerrainError
from .moo import SOLVERS, RoadAlignmentProblem, seed_alignment
from .terrain import TERRAIN_KINDS, load_ascii_terrain, load_terrain, synthetic_raster, write_ascii_grid

log = logging.getLogger("roadalign")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TERRAIN = 3
EXIT_SEEDING = 4
EXIT_SOLVER = 5

FRONT_COLUMNS = ("cost_e", "cost_u", "evaluation_index")


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, TerrainError):
        return EXIT_TERRAIN
    if isinstance(exc, SeedingError):
        return EXIT_SEEDING
    if isinstance(exc, SolverError):
        return EXIT_SOLVER
    return EXIT_CONFIG


def build_terrain(config: RunConfig):
    if config.terrain_path is not None:
        if not os.path.isfile(config.terrain_path):
            raise TerrainError(f"terrain file not found: {config.terrain_path}")
        return load_ascii_terrain(config.terrain_path)
    syn = dict(config.synthetic)
    kind = syn.pop("kind")
    width, height, cs = syn.pop("width"), syn.pop("height"), syn.pop("cell_size")
    ox, oy = syn.pop("origin_x", 0.0), syn.pop("origin_y", 0.0)
    try:
        raster = synthetic_raster(kind, width, height, cs, **syn)
    except ValueError as exc:
        raise ConfigError(str(exc), "terrain.synthetic") from None
    return load_terrain(raster, cs, ox, oy)


def _endpoint(terrain, p, name):
    if len(p) == 3:
        return np.array(p)
    if not terrain.contains(*p):
        raise TerrainError(f"{name} point {p} lies outside the terrain footprint")
    return np.array([p[0], p[1], terrain.ground_elevation(*p)])


def build_problem(config: RunConfig, terrain=None):
    """Terrain, problem and seed design for ``config``."""
    if terrain is None:
        terrain = build_terrain(config)
    start = _endpoint(terrain, config.start, "start")
    end = _endpoint(terrain, config.end, "end")
    try:
        problem = RoadAlignmentProblem(
            terrain, config.constraints, config.costs, start, end, config.m, r_max=config.r_max
        )
    except ValueError as exc:
        raise ConfigError(str(exc), "constraints") from None
    return terrain, problem, start, end


def make_solver(config: RunConfig):
    try:
        return SOLVERS[config.solver](**solver_params(config))
    except TypeError as exc:
        raise SolverError(f"bad solver options: {exc}") from None


def _fmt(v) -> str:
    return repr(float(v))


def _centerline_rows(design, scale, step=5.0):
    """Sampled 3-D centreline, about one row per ``step`` meters of plan length."""
    geom = build_horizontal(design)
    rows = []
    dist = 0.0
    for seg in build_segments(design, geom):
        lo, hi = seg.s_range
        n = max(1, int(np.ceil(seg.horizontal_length / step)))
        first = 0 if not rows else 1
        for i in range(first, n + 1):
            p = centerline_point(seg, lo + (i / n) * (hi - lo))
            d = dist + (i / n) * seg.horizontal_length
            rows.append((seg.kind, d * scale, p[0] * scale, p[1] * scale, p[2]))
        dist += seg.horizontal_length
    return rows


def write_outputs(out_dir, config, problem, solver, seed_design, wall_time):
    """Write every artifact into a scratch folder, then move it into place."""
    parent = os.path.dirname(os.path.abspath(out_dir)) or "."
    os.makedirs(parent, exist_ok=True)
    scratch = tempfile.mkdtemp(prefix=".roadalign-", dir=parent)
    try:
        front = solver.front_
        with open(os.path.join(scratch, "front.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(FRONT_COLUMNS)
            for p in front:
                w.writerow([_fmt(p.f[0]), _fmt(p.f[1]), p.index])
        designs = os.path.join(scratch, "designs")
        os.makedirs(designs)
        scale = 0.1 if config.units == "dam" else 1.0
        all_feasible = True
        for i, p in enumerate(front):
            design, costs, report = problem.assess(p.x)
            all_feasible &= report.feasible
            stem = os.path.join(designs, f"design_{i:03d}")
            with open(stem + ".json", "w") as fh:
                json.dump(design.to_record(), fh, indent=1)
            with open(stem + "_geometry.txt", "w") as fh:
                fh.write(geometry_report(design))
                fh.write(f"# cost_e {_fmt(costs.Cost_e)} cost_u {_fmt(costs.Cost_u)}\n")
                fh.write(f"# V_c {_fmt(costs.V_c)} V_f {_fmt(costs.V_f)} L {_fmt(costs.L)}\n")
            with open(stem + "_constraints.json", "w") as fh:
                json.dump(report.to_dict(), fh, indent=1)
            with open(stem + "_centerline.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(("kind", "distance", "x", "y", "z"))
                for kind, d, x, y, z in _centerline_rows(design, scale):
                    w.writerow((kind, f"{d:.6f}", f"{x:.6f}", f"{y:.6f}", f"{z:.6f}"))
        with open(os.path.join(scratch, "seed_design.json"), "w") as fh:
            json.dump(seed_design.to_record(), fh, indent=1)
        manifest = {
            "solver": config.solver,
            "solver_params": solver.get_params(),
            "seed": config.seed,
            "budget": config.budget,
            "evaluations": problem.n_evaluations,
            "solver_evaluations": solver.n_evaluations_,
            "iterations": solver.n_iterations_,
            "front_size": len(front),
            "all_feasible": bool(all_feasible),
            "wall_time_s": wall_time,
            "units": config.units,
        }
        if hasattr(solver, "run_evaluations_"):
            manifest["run_evaluations"] = list(solver.run_evaluations_)
        with open(os.path.join(scratch, "manifest.json"), "w") as fh:
            json.dump(manifest, fh, indent=1, default=str)
        os.makedirs(out_dir, exist_ok=True)
        for name in os.listdir(scratch):
            target = os.path.join(out_dir, name)
            if os.path.isdir(target):
                shutil.rmtree(target)
            os.replace(os.path.join(scratch, name), target)
    finally:
        shutil.rmtree(scratch, ignore_errors=True)
    return manifest


def run_experiment(config: RunConfig):
    """Seed, solve and write outputs. Returns the manifest dict."""
    t0 = time.perf_counter()
    terrain, problem, start, end = build_problem(config)
    seed_design = seed_alignment(terrain, config.constraints, start, end, config.m)
    solver = make_solver(config)
    log.info("solver %s with %s", config.solver, solver.get_params())
    try:
        solver.fit(problem, seed_design.to_vector())
    except (ValueError, TypeError) as exc:
        raise SolverError(str(exc)) from None
    wall = time.perf_counter() - t0
    return write_outputs(config.output_dir, config, problem, solver, seed_design, wall)


def read_design(path) -> AlignmentDesign:
    try:
        with open(path) as fh:
            record = json.load(fh)
        return AlignmentDesign.from_record(record)
    except OSError as exc:
        raise ConfigError(f"cannot read design file: {exc.strerror}", "design") from None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed design file: {exc}", "design") from None


def evaluate_one(config: RunConfig, design: AlignmentDesign) -> dict:
    terrain = build_terrain(config)
    problem = RoadAlignmentProblem(
        terrain, config.constraints, config.costs, design.start, design.end, design.m, r_max=config.r_max
    )
    if design.n_variables != problem.dim:
        raise ConfigError(f"design has {design.n_variables} variables, configuration expects {problem.dim}", "design")
    _, costs, report = problem.assess(design.to_vector())
    out = {"constraints": report.to_dict(), "violated": sorted(report.violated())}
    if costs is None:
        out.update(cost_e=None, cost_u=None, buildable=False)
    else:
        out.update(costs.as_row(), cost_e=costs.Cost_e, cost_u=costs.Cost_u, buildable=True)
    return out


def _parser():
    p = argparse.ArgumentParser(prog="roadalign", description="Bi-objective 3-D road alignment design.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="optimise and write a Pareto front")
    run.add_argument("--config", required=True)
    run.add_argument("--out")
    run.add_argument("--seed", type=int)
    run.add_argument("--solver", choices=SOLVER_NAMES)
    run.add_argument("--budget", type=int)

    ev = sub.add_parser("eval", help="cost and constraint report of one design")
    ev.add_argument("--config", required=True)
    ev.add_argument("--design", required=True, help="design JSON as written by 'run'")

    gen = sub.add_parser("gen-terrain", help="write a synthetic ASCII lattice")
    gen.add_argument("--kind", choices=TERRAIN_KINDS, default="sinusoidal")
    gen.add_argument("--width", type=float, default=500.0)
    gen.add_argument("--height", type=float, default=1000.0)
    gen.add_argument("--cell-size", type=float, default=10.0)
    gen.add_argument("--base", type=float, default=100.0)
    gen.add_argument("--slope-x", type=float, default=0.0)
    gen.add_argument("--slope-y", type=float, default=0.0)
    gen.add_argument("--amplitude", type=float, default=10.0)
    gen.add_argument("--wavelength", type=float, default=200.0)
    gen.add_argument("--n-waves", type=int, default=4)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output file")
    return p


def _gen_terrain(args):
    try:
        raster = synthetic_raster(
            args.kind, args.width, args.height, args.cell_size,
            base=args.base, slope_x=args.slope_x, slope_y=args.slope_y, amplitude=args.amplitude,
            wavelength=args.wavelength, n_waves=args.n_waves, seed=args.seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc), "gen-terrain") from None
    write_ascii_grid(args.out, raster, args.cell_size)
    print(f"wrote {args.out}: {raster.shape[1] - 1} x {raster.shape[0] - 1} cells")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "gen-terrain":
            _gen_terrain(args)
        elif args.command == "run":
            config = load_config(args.config).with_overrides(args.solver, args.budget, args.seed, args.out)
            manifest = run_experiment(config)
            print(
                f"{manifest['solver']}: {manifest['front_size']} front points, "
                f"{manifest['evaluations']} evaluations, {manifest['wall_time_s']:.1f} s -> {config.output_dir}"
            )
        else:
            config = load_config(args.config)
            result = evaluate_one(config, read_design(args.design))
            json.dump(result, sys.stdout, indent=1)
            sys.stdout.write("\n")
    except RoadAlignError as exc:
        code = exit_code(exc)
        print(f"error: {exc}", file=sys.stderr)
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
