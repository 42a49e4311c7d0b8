"""Batch command-line front end.

Exit codes: 0 success, 1 scientific failure, 2 configuration/domain error,
3 numerical divergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
import warnings
from pathlib import Path

import numpy as np

from . import equations, painleve, solutions, transforms
from .config import BUILTINS, RunConfig, load_config
from .errors import (
    AccuracyWarning,
    ConfigurationError,
    DivergenceError,
    DomainError,
    NlsError,
    NumericalError,
    ParameterError,
)
from .field import ComplexField, Grid1D, read_field_csv, write_field_csv
from .solver import SolverConfig, evolve, observed_order
from .verification import compare_fields, residual_of_family

log = logging.getLogger("nlsconf")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2, 3


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _clean(obj):
    """JSON-safe copy: NaN/inf become null, numpy scalars become Python floats."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


class OutputDir:
    """Writes files atomically (temp file + rename), refusing paths outside ``root``."""

    def __init__(self, root):
        self.root = Path(root).resolve()
        self.root.mkdir(parents=True, exist_ok=True)
        self.written: list[str] = []

    def path(self, rel: str) -> Path:
        p = (self.root / rel).resolve()
        if not p.is_relative_to(self.root):
            raise ConfigurationError(f"output path {rel!r} escapes {self.root}")
        return p

    def write_text(self, rel: str, text: str) -> Path:
        p = self.path(rel)
        p.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=".tmp-", suffix=p.suffix)
        try:
            with os.fdopen(fd, "w", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, p)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.written.append(rel)
        return p

    def write_json(self, rel: str, obj) -> Path:
        return self.write_text(rel, json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n")


def build_grid(cfg) -> Grid1D:
    return Grid1D(cfg.x_min, cfg.x_max, cfg.n_points)


def build_equation(cfg) -> equations.EquationSpec:
    return equations.by_name(cfg.name, **cfg.params)


def build_transform(cfg) -> transforms.SpacetimeTransform:
    return transforms.by_name(cfg.name, **cfg.params)


def build_family(cfg) -> solutions.SolutionFamily:
    try:
        s = solutions.by_name(cfg.name, **dict(cfg.params))
    except TypeError as exc:
        raise ParameterError(f"bad parameters for family {cfg.name!r}: {exc}") from None
    for tcfg in cfg.transforms:
        s = transforms.pull_back_solution(build_transform(tcfg), s)
    return s


def _initial_field(cfg: RunConfig, base: Path, grid: Grid1D, t: float):
    init = cfg.initial
    if init.family is not None:
        fam = build_family(init.family)
        return solutions.evaluate_on_grid(fam, grid, t), fam
    path = Path(init.field_csv)
    if not path.is_absolute():
        path = base / path
    f = read_field_csv(path)
    return f, None


def _density_block(snapshots) -> str:
    lines = []
    for f in snapshots:
        for xi, v in zip(f.x, f.values):
            lines.append(f"{_fmt(f.time)} {_fmt(xi)} {_fmt(abs(v) ** 2)}")
        lines.append("")
    return "\n".join(lines) + "\n"


PLOT_SCRIPT = """\
# |u(t,x)|^2 from density.dat (columns: t x |u|^2, one block per snapshot)
set xlabel 'x'
set ylabel 't'
set title '{title}'
set pm3d map
splot 'density.dat' using 2:1:3 with pm3d notitle
"""


def cmd_simulate(cfg: RunConfig, out: OutputDir, base: Path, args) -> int:
    grid = build_grid(cfg.grid)
    eq = build_equation(cfg.equation)
    s = cfg.solver
    sc = SolverConfig(s.dt, s.t_start, s.t_end, grid, eq, s.record_every)
    u0, fam = _initial_field(cfg, base, grid, s.t_start)
    if fam is None and u0.grid != grid:
        raise ConfigurationError("initial field grid differs from configured grid")
    u0 = ComplexField(grid, s.t_start, u0.values)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AccuracyWarning)
        traj = evolve(sc, u0)
    files = []
    for i, f in enumerate(traj.snapshots):
        rel = f"snapshots/snapshot_{i:05d}.csv"
        out.write_text(rel, write_field_csv(f))
        files.append(rel)
    manifest = {
        "command": "simulate",
        "config": cfg.model_dump(),
        "solver": sc.describe(),
        "times": traj.times,
        "mass": traj.mass,
        "energy": traj.energy,
        "mass_drift": traj.mass_drift(),
        "energy_drift": traj.energy_drift(),
        "snapshots": files,
        "warnings": [str(w.message) for w in caught],
    }
    if fam is not None and fam.equation.label == eq.label:
        ref_err = [float(np.max(np.abs(f.values - fam.evaluate(f.time, grid.x))))
                   for f in traj.snapshots]
        manifest["reference_error"] = ref_err
    out.write_text("density.dat", _density_block(traj.snapshots))
    out.write_text("plot.gp", PLOT_SCRIPT.format(title=eq.label))
    out.write_json("manifest.json", manifest)
    log.info("simulate: %d snapshots, mass drift %.3e", len(files), traj.mass_drift())
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out: OutputDir, base: Path, args) -> int:
    if cfg.initial.family is None:
        raise ConfigurationError("verify needs a closed-form family, not a field file")
    fam = build_family(cfg.initial.family)
    eq = build_equation(cfg.equation)
    threshold = args.tolerance if args.tolerance is not None else cfg.threshold
    rep = residual_of_family(fam, eq, build_grid(cfg.grid), cfg.times, threshold=threshold)
    d = rep.to_dict()
    d["family"] = fam.describe()
    out.write_json("residual_report.json", d)
    log.info("verify: relative residual %.3e (threshold %.1e)", rep.relative_residual, threshold)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _painleve_items(cfg: RunConfig, seed: int):
    pc = cfg.painleve
    items = []
    for c in pc.coefficients:
        params = dict(c.params)
        items.append((painleve.by_name(c.family, **params), c.expect))
    if pc.random_reciprocal:
        times = pc.times if pc.times is not None else painleve.DEFAULT_TIMES
        rng = np.random.default_rng(seed)
        for a, b in painleve.sample_reciprocal_params(rng, pc.random_reciprocal, times):
            items.append((painleve.reciprocal_linear(a, b), "passes"))
    return items


def cmd_painleve(cfg: RunConfig, out: OutputDir, base: Path, args) -> int:
    pc = cfg.painleve
    tol = args.tolerance if args.tolerance is not None else 1e-8
    m = painleve.polynomial_manifold(*pc.manifold) if pc.manifold else None
    u0v = complex(*pc.u0) if isinstance(pc.u0, list) else complex(pc.u0)
    items = _painleve_items(cfg, args.seed)
    if not items:
        raise ConfigurationError("painleve config lists no coefficient families")
    reports, ok = [], True
    for F, expect in items:
        rep = painleve.run_wtc_test(F, m, painleve.constant_u0(u0v), pc.times, tol)
        d = rep.to_dict()
        d["expect"] = expect
        d["as_expected"] = (rep.verdict == expect) if expect else rep.passes
        ok &= d["as_expected"]
        reports.append(d)
    summary = {"command": "painleve", "seed": args.seed, "tolerance": tol,
               "all_as_expected": ok, "reports": reports}
    out.write_json("wtc_report.json", reports[0] if len(reports) == 1 and not pc.random_reciprocal
                   else summary)
    log.info("painleve: %d families, all as expected: %s", len(reports), ok)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_transform(cfg: RunConfig, out: OutputDir, base: Path, args) -> int:
    tr = build_transform(cfg.transform)
    grid = build_grid(cfg.grid)
    src_grid = build_grid(cfg.source_grid) if cfg.source_grid else grid
    inv = tr.inverse()
    tol = args.tolerance if args.tolerance is not None else 1e-8
    rows, files = [], []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AccuracyWarning)
        if cfg.initial.family is not None:
            source = build_family(cfg.initial.family)
            fam = transforms.pull_back_solution(tr, source, check_equation=False)
            for i, t in enumerate(cfg.times):
                tr.check(t)
                u = solutions.evaluate_on_grid(fam, grid, t)
                T = tr.time_map(t)
                back = transforms.push_field(inv, u, src_grid, outside=cfg.outside)
                exact = solutions.evaluate_on_grid(source, src_grid, T)
                rows.append({"t": t, "T": T, "round_trip_error": compare_fields(back, exact)})
                rel = f"transformed_{i:03d}.csv"
                out.write_text(rel, write_field_csv(u))
                files.append(rel)
        else:
            f, _ = _initial_field(cfg, base, grid, 0.0)
            u = transforms.push_field(tr, f, grid, outside=cfg.outside)
            back = transforms.push_field(inv, u, f.grid, outside=cfg.outside)
            rows.append({"t": u.time, "T": f.time, "round_trip_error": compare_fields(back, f)})
            out.write_text("transformed_000.csv", write_field_csv(u))
            files.append("transformed_000.csv")
    worst = max(r["round_trip_error"] for r in rows)
    out.write_json("transform.json", {
        "command": "transform",
        "transform": tr.describe(),
        "samples": rows,
        "max_round_trip_error": worst,
        "tolerance": tol,
        "files": files,
        "warnings": [str(w.message) for w in caught],
    })
    log.info("transform: max round-trip error %.3e", worst)
    return EXIT_OK if worst <= tol else EXIT_FAIL


def cmd_convergence(cfg: RunConfig, out: OutputDir, base: Path, args) -> int:
    grid = build_grid(cfg.grid)
    eq = build_equation(cfg.equation)
    s = cfg.solver
    sc = SolverConfig(s.dt, s.t_start, s.t_end, grid, eq, s.record_every)
    u0, fam = _initial_field(cfg, base, grid, s.t_start)
    u0 = ComplexField(grid, s.t_start, u0.values)
    ref = fam if (cfg.convergence.analytic_reference and fam is not None
                  and fam.equation.label == eq.label) else None
    res = observed_order(sc, u0, reference=ref)
    cc = cfg.convergence
    ok = res.within(cc.target_order, cc.band)
    table = "dt,error\n" + "".join(
        f"{_fmt(dt)},{_fmt(e)}\n" for dt, e in zip(res.dts[len(res.dts) - len(res.errors):], res.errors)
    )
    out.write_text("convergence.csv", table)
    out.write_json("convergence.json", {
        "command": "convergence",
        **res.describe(),
        "target_order": cc.target_order,
        "band": cc.band,
        "within_band": ok,
    })
    if res.saturated:
        log.info("convergence: error below floor, scheme saturated")
    else:
        log.info("convergence: observed order %.4f", res.order)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "painleve": cmd_painleve,
    "transform": cmd_transform,
    "convergence": cmd_convergence,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlsconf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True,
                        help=f"JSON config path or built-in name ({', '.join(BUILTINS)})")
        sp.add_argument("--out", default=None, help="output directory (overrides config)")
        sp.add_argument("--tolerance", type=float, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("-v", "--verbose", action="store_true")
    sub.add_parser("list", help="list built-in configs")
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if args.command == "list":
        for name, data in BUILTINS.items():
            print(f"{name:26s} {data['command']:12s} {data.get('description', '')}")
        return EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg, base = load_config(args.config)
        if cfg.command != args.command:
            raise ConfigurationError(
                f"config is for {cfg.command!r}, but subcommand is {args.command!r}"
            )
        out = OutputDir(args.out if args.out is not None else base / cfg.output_dir)
        return COMMANDS[args.command](cfg, out, base, args)
    except (DivergenceError, NumericalError) as exc:
        log.error("numerical failure: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ConfigurationError, ParameterError, DomainError, NlsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # exit-code contract is total
        log.exception("internal error")
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
