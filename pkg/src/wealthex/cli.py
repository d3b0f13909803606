"""Command line entry point: ``wealthex {iterate,simulate,compare,probe}``.

Exit codes: 0 success, 1 usage or validation error, 2 iteration hit max-iter.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import _accel, io
from .agents import InitialWealth, SimConfig, equilibrium_report, histogram, make_population, sweep
from .analysis import fit_exponential, kl_divergence, l1_distance
from .errors import WealthExError
from .fixed_point import MODES, IterationConfig, iterate, probe_stability
from .grid import DEFAULT_N, DEFAULT_XMAX, make_grid, normalize
from .operator import BACKENDS, OperatorConfig
from . import shapes

log = logging.getLogger("wealthex")

EXIT_OK, EXIT_ERROR, EXIT_STALLED = 0, 1, 2

DEFAULTS = {
    "iterate": {
        "initial": "exp",
        "xmax": DEFAULT_XMAX,
        "n": DEFAULT_N,
        "backend": "direct",
        "eps": 1e-10,
        "max_iter": 200,
    },
    "simulate": {
        "agents": 100_000,
        "sweeps": 1000,
        "seed": 0,
        "initial": "equal:1",
        "xmax": DEFAULT_XMAX,
        "n": DEFAULT_N,
        "save_population": False,
    },
    "probe": {
        "amplitude": 0.05,
        "mode": "laguerre2",
        "xmax": DEFAULT_XMAX,
        "n": DEFAULT_N,
        "backend": "direct",
        "steps": 10,
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wealthex", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    it = sub.add_parser("iterate", help="iterate the exchange operator to its fixed point")
    it.add_argument("--initial", help="exp[:m] | uniform:a,b | custom:PATH")
    it.add_argument("--xmax", type=float)
    it.add_argument("--n", type=int)
    it.add_argument("--backend", choices=BACKENDS)
    it.add_argument("--eps", type=float)
    it.add_argument("--max-iter", dest="max_iter", type=int)
    it.add_argument("--out", required=True)
    it.add_argument("--manifest", help="replay the configuration stored in a manifest")

    sim = sub.add_parser("simulate", help="run the agent-based exchange model")
    sim.add_argument("--agents", type=int)
    sim.add_argument("--sweeps", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--initial", help="equal:m | uniform:0,b | exp:m")
    sim.add_argument("--xmax", type=float, help="histogram grid upper end")
    sim.add_argument("--n", type=int, help="histogram grid points")
    sim.add_argument("--save-population", dest="save_population", action="store_const", const=True)
    sim.add_argument("--out", required=True)
    sim.add_argument("--manifest")

    cmp_ = sub.add_parser("compare", help="compare two density CSVs on the same grid")
    cmp_.add_argument("first")
    cmp_.add_argument("second")

    pr = sub.add_parser("probe", help="perturb the exponential and measure contraction")
    pr.add_argument("--amplitude", type=float)
    pr.add_argument("--mode", choices=sorted(MODES))
    pr.add_argument("--xmax", type=float)
    pr.add_argument("--n", type=int)
    pr.add_argument("--backend", choices=BACKENDS)
    pr.add_argument("--steps", type=int)
    pr.add_argument("--out", required=True)
    pr.add_argument("--manifest")
    return p


def _settings(args) -> dict:
    cfg = dict(DEFAULTS[args.command])
    if getattr(args, "manifest", None):
        m = io.read_manifest(args.manifest)
        if m.command != args.command:
            raise UsageError(f"manifest was written by '{m.command}', not '{args.command}'")
        cfg.update({k: v for k, v in m.config.items() if k in cfg})
    cfg.update({k: v for k, v in vars(args).items() if k in cfg and v is not None})
    return cfg


def _initial_field(spec: str, grid):
    kind, _, arg = spec.partition(":")
    try:
        if kind == "exp":
            return shapes.exponential_field(grid, float(arg) if arg else 1.0)
        if kind == "uniform":
            a, b = (float(v) for v in arg.split(","))
            if b > grid.x_max:
                raise WealthExError(f"uniform support [{a}, {b}] exceeds x_max={grid.x_max}")
            return shapes.field(grid, shapes.uniform(a, b))
    except ValueError as exc:
        if isinstance(exc, WealthExError):
            raise
        raise WealthExError(f"cannot parse --initial {spec!r}") from None
    if kind == "custom":
        f = io.read_density_csv(arg)
        if f.grid != grid:
            raise WealthExError(f"custom field grid {f.grid} does not match --xmax/--n grid {grid}")
        return f
    raise WealthExError(f"unknown --initial {spec!r}; use exp, uniform:a,b or custom:PATH")


def _prepare_out(path: str) -> Path:
    out = Path(path)
    if out.exists() and not out.is_dir():
        raise WealthExError(f"--out {path} exists and is not a directory")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_iterate(args) -> int:
    cfg = _settings(args)
    grid = make_grid(cfg["xmax"], cfg["n"])
    op_cfg = OperatorConfig(backend=cfg["backend"])
    it_cfg = IterationConfig(max_iter=cfg["max_iter"], eps=cfg["eps"])
    f0 = _initial_field(cfg["initial"], grid)
    if not f0.is_normalized(op_cfg.mass_tol):
        f0 = normalize(f0)

    started = _now()
    final, trace = iterate(f0, op_cfg, it_cfg)
    out = _prepare_out(args.out)
    io.write_density_csv(final, out / "final.csv")
    io.write_trace(trace, out / "trace.csv")
    manifest = io.RunManifest(
        command="iterate",
        config=cfg,
        status=trace.status,
        started=started,
        finished=_now(),
        fit=fit_exponential(final),
        extra={"iterations": trace.iterations, "kernels": _accel.backend_name()},
    )
    io.write_manifest(manifest, out / "manifest.json")
    print(f"status={trace.status} iterations={trace.iterations}")
    return EXIT_OK if trace.converged else EXIT_STALLED


def cmd_simulate(args) -> int:
    cfg = _settings(args)
    sim = SimConfig(
        n_agents=cfg["agents"],
        initial=InitialWealth.parse(cfg["initial"]),
        seed=cfg["seed"],
        sweeps=cfg["sweeps"],
    )
    grid = make_grid(cfg["xmax"], cfg["n"])

    started = _now()
    pop = make_population(sim)
    total0 = pop.total()
    for _ in range(sim.sweeps):
        sweep(pop)
    report = equilibrium_report(pop, total0)
    hist = histogram(pop, grid)
    fit = fit_exponential(pop.wealths, grid)

    out = _prepare_out(args.out)
    io.write_density_csv(hist.field, out / "histogram.csv")
    report_dict = report.to_dict() | {"clipped": hist.clipped, "conserved": report.conserved}
    (out / "report.json").write_text(json.dumps(report_dict, indent=2, sort_keys=True) + "\n")
    if cfg["save_population"]:
        io.write_population_csv(pop.wealths, out / "population.csv")
    manifest = io.RunManifest(
        command="simulate",
        config=cfg,
        status="completed",
        started=started,
        finished=_now(),
        seed=sim.seed,
        fit=fit,
        extra={"rng": "numpy.random.PCG64", "quantum": pop.quantum, "kernels": _accel.backend_name()},
    )
    io.write_manifest(manifest, out / "manifest.json")
    print(f"ks={report.ks:.6g} gini={report.gini:.6g} mean={report.mean:.17g}")
    return EXIT_OK


def cmd_compare(args) -> int:
    a = io.read_density_csv(args.first)
    b = io.read_density_csv(args.second)
    if a.grid != b.grid:
        raise WealthExError(f"grids differ: {a.grid} vs {b.grid}")
    lines = []
    for tag, f in (("a", a), ("b", b)):
        for k, v in fit_exponential(f).to_dict().items():
            lines.append(f"{tag}.{k}={v:.10g}")
    lines.append(f"l1={l1_distance(a, b):.10g}")
    lines.append(f"kl_ab={kl_divergence(a, b):.10g}")
    lines.append(f"kl_ba={kl_divergence(b, a):.10g}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_probe(args) -> int:
    cfg = _settings(args)
    grid = make_grid(cfg["xmax"], cfg["n"])
    op_cfg = OperatorConfig(backend=cfg["backend"])
    if not (isinstance(cfg["steps"], int) and cfg["steps"] >= 1):
        raise WealthExError("--steps must be a positive integer")
    started = _now()
    rep = probe_stability(cfg["amplitude"], cfg["mode"], op_cfg, grid=grid, steps=cfg["steps"])
    out = _prepare_out(args.out)
    rows = ["n,l1_fixed,ratio"]
    for n, d in enumerate(rep.distances):
        r = "" if n == 0 else io.fmt(rep.ratios[n - 1])
        rows.append(f"{n},{io.fmt(d)},{r}")
    (out / "probe.csv").write_text("\n".join(rows) + "\n")
    manifest = io.RunManifest(
        command="probe",
        config=cfg,
        status="contracting" if rep.contracting else "not_contracting",
        started=started,
        finished=_now(),
        extra={"geometric_mean_ratio": rep.geometric_mean, "kernels": _accel.backend_name()},
    )
    io.write_manifest(manifest, out / "manifest.json")
    print(f"geometric_mean_ratio={rep.geometric_mean:.6g} contracting={rep.contracting}")
    return EXIT_OK


COMMANDS = {"iterate": cmd_iterate, "simulate": cmd_simulate, "compare": cmd_compare, "probe": cmd_probe}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"wealthex: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (WealthExError, UsageError, OSError) as exc:
        print(f"wealthex {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
