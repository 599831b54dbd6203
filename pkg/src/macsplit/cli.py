"""Command-line front end: ``macsplit run|compare|converge|check``.

Exit codes: 0 success, 1 invariant violation, 2 usage error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import checks
from .config import (
    PRESETS,
    RunConfig,
    build_config,
    load_config,
    serialize_config,
    write_series_csv,
    write_timeline_csv,
)
from .errors import InvariantViolation, NumericalFailure, UsageError
from .field import det_sign_image, write_pgm, write_snapshot
from .sim import Timeline, compare_methods, convergence_study, run
from .spectral import SpectralPlan

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
ORDER_BAND = (1.8, 2.2)
ENERGY_SLACK = 1e-10

FLAG_KEYS = (
    "n", "tau", "eps", "tmax", "seed", "out", "record_every", "snapshot_every",
    "samples", "levels", "mode", "scheme", "ic", "ic_path",
)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--preset", choices=sorted(PRESETS))
    common.add_argument("--n", type=int)
    common.add_argument("--tau", type=float)
    common.add_argument("--eps", type=float)
    common.add_argument("--tmax", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--record-every", dest="record_every", type=int)
    common.add_argument("--snapshot-every", dest="snapshot_every", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--levels", type=int)
    common.add_argument("--mode", choices=("physical", "rescaled"))
    common.add_argument("--scheme", choices=("strang", "threshold"))
    common.add_argument("--ic", choices=("random", "admissible", "structured", "rotation", "snapshot"))
    common.add_argument("--ic-path", dest="ic_path")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="macsplit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="run one simulation and write diagnostics")
    sub.add_parser("compare", parents=[common], help="Strang vs thresholding from the same data")
    sub.add_parser("converge", parents=[common], help="temporal convergence order table")
    sub.add_parser("check", parents=[common], help="randomised inequality suites")
    return parser


def _resolve(args, default_preset: str | None) -> RunConfig:
    file_values = load_config(args.config) if args.config else None
    overrides = {key: getattr(args, key) for key in FLAG_KEYS}
    preset = args.preset if args.preset else (None if args.config else default_preset)
    return build_config(preset, file_values, overrides)


def _prepare_out(cfg: RunConfig, extra: dict | None = None) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    text = serialize_config(cfg)
    for key, value in (extra or {}).items():
        text += f"# {key}: {value}\n"
    (out / "run_meta.txt").write_text(text, encoding="utf-8")
    return out


def _snapshot_writer(out: Path, every: int, label: str = ""):
    if every <= 0:
        return None
    snapdir = out / "snapshots"
    snapdir.mkdir(exist_ok=True)

    def write(step: int, t: float, u):
        if step % every:
            return
        stem = f"{label}{step:06d}"
        write_snapshot(u, snapdir / f"field_{stem}.macfield", t)
        if u.grid.d == 2:
            write_pgm(det_sign_image(u), snapdir / f"det_{stem}.pgm")

    return write


def _energy_increases(tl: Timeline) -> list[int]:
    e = tl.column("modified_energy")
    return [i for i in range(1, len(e)) if e[i] > e[i - 1] + ENERGY_SLACK * (1 + abs(e[i - 1]))]


def cmd_run(args) -> int:
    cfg = _resolve(args, "ex-random")
    out = _prepare_out(cfg)
    u0 = cfg.initial_field()
    plan = SpectralPlan(u0.grid)
    writer = _snapshot_writer(out, cfg.snapshot_every)
    _, tl = run(u0, cfg.params(), cfg.tmax, cfg.record_every, plan, callback=writer)
    write_timeline_csv(tl, out / "timeline.csv")
    last = tl.records[-1]
    print(
        f"steps={tl.meta['steps']} t={last.t:.6g} energy={last.energy:.10g} "
        f"modified_energy={last.modified_energy:.10g} max|det|={max(tl.column('max_abs_det')):.12g} "
        f"max|U|_F={max(tl.column('max_frobenius')):.12g}"
    )
    if cfg.scheme == "strang":
        bad = _energy_increases(tl)
        if bad:
            t = tl.records[bad[0]].t
            raise InvariantViolation(f"modified energy increased at t={t} ({len(bad)} records)")
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _resolve(args, "ex-compare")
    cfg = replace(cfg, mode="rescaled", scheme="strang").validate()
    out = _prepare_out(cfg, {"modified_energy_eps": cfg.eps})
    u0 = cfg.initial_field()
    plan = SpectralPlan(u0.grid)
    comp, us, ut = compare_methods(u0, cfg.params(), cfg.tmax, cfg.record_every, plan)
    write_timeline_csv(comp.strang, out / "strang.csv")
    write_timeline_csv(comp.threshold, out / "threshold.csv")
    write_series_csv(out / "difference.csv", ("t", "difference"), zip(comp.times, comp.difference))
    if u0.grid.d == 2:
        write_pgm(det_sign_image(u0), out / "det_initial.pgm")
        write_pgm(det_sign_image(us), out / "det_strang_final.pgm")
        write_pgm(det_sign_image(ut), out / "det_threshold_final.pgm")
    print(f"final difference={comp.difference[-1]:.10g} near_singular_nodes={comp.threshold.meta['near_singular_nodes']}")
    bad = _energy_increases(comp.strang)
    if bad:
        raise InvariantViolation(f"Strang modified energy increased at record {bad[0]}")
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = _resolve(args, "converge-default")
    u0 = cfg.initial_field()
    plan = SpectralPlan(u0.grid)
    rows = convergence_study(u0, cfg.params(), cfg.tmax, cfg.levels, plan)
    print(f"{'tau':>12} {'error':>14} {'order':>8}")
    for r in rows:
        order = "" if math.isnan(r.order) else f"{r.order:8.4f}"
        print(f"{r.tau:12.6g} {r.error:14.6e} {order:>8}")
    orders = [r.order for r in rows if not math.isnan(r.order)]
    if not all(ORDER_BAND[0] <= p <= ORDER_BAND[1] for p in orders):
        raise InvariantViolation(f"observed orders {orders} outside {ORDER_BAND}")
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _resolve(args, None)
    results = checks.run_all(cfg.samples, cfg.seed if cfg.seed is not None else 0)
    failed = False
    for res in results:
        print(res.summary())
        if not res.ok:
            failed = True
            print(f"  violated: {res.statement}")
            for v in res.violations:
                print(f"  inputs={v}")
    if failed:
        raise InvariantViolation("one or more inequality suites failed")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "converge": cmd_converge, "check": cmd_check}


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
