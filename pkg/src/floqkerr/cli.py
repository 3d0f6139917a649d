"""Command-line front end.

Commands: classical-bifurcation, quantum-sweep, wigner-map, verify,
convergence. Every output CSV is paired with a .meta.json sidecar carrying
the complete resolved configuration (reruns are byte-identical except the
sidecar timestamp). Long quantum sweeps append one row per completed point,
so an interrupted sweep resumes by skipping rows already present.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__
from .classical import bifurcation_sweep, initial_conditions_disk, integrate_orbit
from .config import RunConfig, load_config_file
from .errors import ConfigInvalid, ToolkitError
from .fock import DriveProtocol
from .observables import convergence_certify, steady_observables
from .sweeps import quantum_point, run_quantum_sweep
from .wigner import (
    PhaseGrid,
    attractor_overlap,
    distribution_distance,
    negativity,
    wigner,
    write_csv as write_wigner_csv,
)

log = logging.getLogger(__name__)

OBSERVABLE_EXTRACTORS = {
    "na": lambda obs: obs.occupation,
    "variance": lambda obs: obs.number_variance,
    "fano": lambda obs: obs.fano,
    "entropy": lambda obs: obs.entropy,
    "ratio": lambda obs: obs.entropy_ratio,
}

SWEEP_HEADER = [
    "eps0", "U", "D", "Na", "variance", "fano", "Sv", "S0v", "ratio",
    "gapP", "gapT", "period_doubled", "flag",
]


def _fmt(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return "%.12g" % value
    return str(value)


def _write_sidecar(csv_path: str, command: str, config: RunConfig, extra: dict | None = None):
    meta = {
        "command": command,
        "config": config.echo(),
        "toolkit_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
    }
    if extra:
        meta.update(extra)
    with open(csv_path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_config(args, overrides: dict) -> RunConfig:
    entries = load_config_file(args.config) if args.config else None
    return RunConfig.resolve(entries, overrides)


def _common_overrides(args) -> dict:
    over = {}
    if getattr(args, "seed", None) is not None:
        over["run.seed"] = args.seed
    if getattr(args, "workers", None) is not None:
        over["run.workers"] = args.workers
    if getattr(args, "cutoff", None) is not None:
        over["run.cutoff"] = args.cutoff
    if getattr(args, "eps0", None) is not None:
        over["sweep.eps0_values"] = [args.eps0]
    return over


def _outdir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def cmd_classical_bifurcation(args) -> int:
    cfg = _load_config(args, _common_overrides(args))
    params = cfg.protocol_params()
    axis, values = cfg.sweep_values()
    if axis != "eps0":
        raise ConfigInvalid("classical-bifurcation sweeps eps0 only", key="sweep.axis")
    template = DriveProtocol.symmetric(eps0=0.0, **params)
    diagram = bifurcation_sweep(
        template,
        values,
        n_initial_conditions=cfg.get_int("run.n_initial_conditions"),
        seed=cfg.get_int("run.seed"),
        periods=cfg.get_int("run.record_periods"),
        steps_per_half=cfg.get_int("run.steps_per_half"),
        transient=cfg.get_int("run.transient_periods"),
    )
    out = _outdir(args)
    path = os.path.join(out, "bifurcation.csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eps0", "re_alpha", "classification", "lyapunov"])
        for eps0, re_alpha, label, lyap in diagram.rows():
            writer.writerow([_fmt(eps0), _fmt(re_alpha), label, _fmt(lyap)])
    _write_sidecar(
        path,
        "classical-bifurcation",
        cfg,
        {"eps0_values": [float(v) for v in values]},
    )
    print(f"wrote {path} ({sum(len(s) for s in diagram.samples)} samples)")
    return 0


def _completed_keys(path: str) -> set:
    keys = set()
    if not os.path.exists(path):
        return keys
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            try:
                keys.add((round(float(row["eps0"]), 9), round(float(row["U"]), 9), int(row["D"])))
            except (KeyError, ValueError):
                continue
    return keys


def _sweep_row(point) -> list:
    obs, gap = point.observables, point.gap_report
    return [
        _fmt(point.eps0),
        _fmt(point.kerr),
        str(point.cutoff),
        _fmt(obs.occupation if obs else None),
        _fmt(obs.number_variance if obs else None),
        _fmt(obs.fano if obs else None),
        _fmt(obs.entropy if obs else None),
        _fmt(obs.thermal_baseline if obs else None),
        _fmt(obs.entropy_ratio if obs else None),
        _fmt(gap.gap_p if gap else None),
        _fmt(gap.gap_t if gap else None),
        _fmt(gap.period_doubled) if gap else "nan",
        point.flag,
    ]


def cmd_quantum_sweep(args) -> int:
    cfg = _load_config(args, _common_overrides(args))
    params = cfg.protocol_params()
    if params["kappa"] <= 0:
        raise ConfigInvalid(
            "quantum-sweep requires kappa > 0 (dissipative spectral method)",
            key="protocol.kappa",
        )
    axis, values = cfg.sweep_values()
    cutoffs = cfg.cutoffs()
    if axis == "eps0":
        kerr_values, eps0_values = [params["kerr"]], values
    else:
        kerr_values, eps0_values = values, [cfg.require_float("sweep.eps0")]

    out = _outdir(args)
    path = os.path.join(out, "observables.csv")
    done = _completed_keys(path)
    new_file = not os.path.exists(path)
    points = run_quantum_sweep(
        params["detuning"],
        kerr_values,
        eps0_values,
        params["kappa"],
        params["period"],
        cutoffs,
        method=str(cfg.get("run.expm_method")),
        workers=cfg.get_int("run.workers"),
        skip=done,
    )
    with open(path, "a", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(SWEEP_HEADER)
        for point in points:
            writer.writerow(_sweep_row(point))
            fh.flush()
    _write_sidecar(
        path,
        "quantum-sweep",
        cfg,
        {
            "axis": axis,
            "values": [float(v) for v in values],
            "cutoffs": cutoffs,
            "resumed_rows_skipped": len(done),
        },
    )
    flagged = sum(1 for p in points if p.flag)
    print(f"wrote {path} (+{len(points)} rows, {len(done)} resumed, {flagged} flagged)")
    return 0


def cmd_wigner_map(args) -> int:
    cfg = _load_config(args, _common_overrides(args))
    params = cfg.protocol_params()
    if params["kappa"] <= 0:
        raise ConfigInvalid("wigner-map requires kappa > 0", key="protocol.kappa")
    eps0_values = cfg.get("sweep.eps0_values")
    if not eps0_values:
        raise ConfigInvalid("wigner-map needs --eps0 (or sweep.eps0_values)", key="sweep.eps0_values")
    eps0 = float(eps0_values[0])
    cutoff = cfg.cutoffs()[0]
    protocol = DriveProtocol.symmetric(eps0=eps0, **params)

    point = quantum_point(protocol, cutoff, method=str(cfg.get("run.expm_method")), keep_state=True)
    if point.steady is None or point.observables is None:
        raise ToolkitError(f"steady state unavailable: {point.flag}")
    grid = PhaseGrid.for_occupation(
        point.observables.occupation, cfg.get_int("run.grid_points")
    )
    wmap = wigner(point.steady, grid)

    rng = np.random.default_rng(cfg.get_int("run.seed"))
    alpha0 = initial_conditions_disk(eps0, params["kerr"], 1, rng)[0]
    orbit = integrate_orbit(
        protocol,
        alpha0,
        periods=cfg.get_int("run.record_periods"),
        steps_per_half=cfg.get_int("run.steps_per_half"),
        transient=cfg.get_int("run.transient_periods"),
    )
    spacing = max(grid.dx, grid.dp)
    radius = float(cfg.get("run.overlap_radius_factor")) * spacing
    bandwidth = float(cfg.get("run.smoothing_factor")) * spacing
    overlap = attractor_overlap(wmap, orbit, radius)
    bhatta = distribution_distance(wmap, orbit, bandwidth)

    out = _outdir(args)
    wigner_path = os.path.join(out, f"wigner_eps{eps0:g}_D{cutoff}.csv")
    write_wigner_csv(wmap, wigner_path)
    _write_sidecar(
        wigner_path,
        "wigner-map",
        cfg,
        {
            "eps0": eps0,
            "cutoff": cutoff,
            "grid": {
                "x_min": grid.x_min, "x_max": grid.x_max,
                "p_min": grid.p_min, "p_max": grid.p_max,
                "n_x": grid.n_x, "n_p": grid.n_p,
            },
            "integral": wmap.integral,
            "contains_support": wmap.contains_support,
        },
    )
    report = {
        "eps0": eps0,
        "cutoff": cutoff,
        "occupation": point.observables.occupation,
        "attractor_overlap": overlap,
        "overlap_radius": radius,
        "bhattacharyya": bhatta,
        "smoothing_bandwidth": bandwidth,
        "wigner_negativity": negativity(wmap),
        "wigner_integral": wmap.integral,
        "grid_contains_support": wmap.contains_support,
        "orbit_classification": orbit.classification.label,
        "orbit_lyapunov": orbit.lyapunov,
        "flag": point.flag,
    }
    report_path = os.path.join(out, f"wigner_eps{eps0:g}_D{cutoff}_report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not wmap.contains_support:
        log.warning("grid boundary carries Wigner mass; integral %.4f", wmap.integral)
    print(f"wrote {wigner_path} and {report_path} (overlap {overlap:.4f}, B {bhatta:.4f})")
    return 0


def cmd_verify(args) -> int:
    from .verification import run_all

    results = run_all(include_slow=not args.quick)
    for res in results:
        print(res.line())
    n_fail = sum(1 for r in results if not r.passed)
    if args.out:
        out = _outdir(args)
        path = os.path.join(out, "verify_report.json")
        payload = [
            {
                "name": r.name, "passed": r.passed,
                "measured": r.measured, "threshold": r.threshold, "detail": r.detail,
            }
            for r in results
        ]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(
                {"results": payload, "all_passed": n_fail == 0, "toolkit_version": __version__},
                fh, indent=2, sort_keys=True,
            )
            fh.write("\n")
        print(f"wrote {path}")
    print(f"{len(results) - n_fail}/{len(results)} oracles passed")
    return 1 if n_fail else 0


def cmd_convergence(args) -> int:
    cfg = _load_config(args, _common_overrides(args))
    params = cfg.protocol_params()
    if params["kappa"] <= 0:
        raise ConfigInvalid("convergence requires kappa > 0", key="protocol.kappa")
    eps0_values = cfg.get("sweep.eps0_values")
    if not eps0_values:
        raise ConfigInvalid("convergence needs --eps0 (or sweep.eps0_values)", key="sweep.eps0_values")
    eps0 = float(eps0_values[0])
    cutoffs = args.cutoffs or cfg.cutoffs()
    if isinstance(cutoffs, str):
        cutoffs = [int(tok) for tok in cutoffs.split(",") if tok.strip()]
    name = args.observable
    if name not in OBSERVABLE_EXTRACTORS:
        raise ConfigInvalid(
            f"unknown observable {name!r}; choose from {sorted(OBSERVABLE_EXTRACTORS)}"
        )
    extractor = OBSERVABLE_EXTRACTORS[name]
    protocol = DriveProtocol.symmetric(eps0=eps0, **params)
    report = convergence_certify(
        protocol, lambda rho: extractor(steady_observables(rho)), cutoffs
    )
    out = _outdir(args)
    path = os.path.join(out, f"convergence_{name}_eps{eps0:g}.csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["D", name, "rel_change"])
        for i, (d, v) in enumerate(zip(report.cutoffs, report.values)):
            rel = report.rel_changes[i - 1] if i else float("nan")
            writer.writerow([d, _fmt(v), _fmt(rel)])
    _write_sidecar(
        path, "convergence", cfg,
        {"eps0": eps0, "observable": name, "converged": report.converged},
    )
    print(f"wrote {path} (converged={report.converged})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floqkerr",
        description="Driven-dissipative Kerr oscillator toolkit",
    )
    parser.add_argument("--version", action="version", version=f"floqkerr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, eps0=True, cutoff=True):
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--out", help="output directory (default: current)")
        p.add_argument("--seed", type=int, help="override run.seed")
        p.add_argument("--workers", type=int, help="override run.workers")
        if eps0:
            p.add_argument("--eps0", type=float, help="override the drive strength")
        if cutoff:
            p.add_argument("--cutoff", type=int, help="override the Fock cutoff")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("classical-bifurcation", help="stroboscopic attractor sweep")
    add_common(p, eps0=False, cutoff=False)
    p.set_defaults(func=cmd_classical_bifurcation)

    p = sub.add_parser("quantum-sweep", help="observables and gaps per sweep point")
    add_common(p)
    p.set_defaults(func=cmd_quantum_sweep)

    p = sub.add_parser("wigner-map", help="steady-state Wigner map and attractor overlap")
    add_common(p)
    p.set_defaults(func=cmd_wigner_map)

    p = sub.add_parser("verify", help="run the oracle suite")
    p.add_argument("--out", help="write verify_report.json here")
    p.add_argument("--quick", action="store_true", help="skip the slow cross-checks")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("convergence", help="certify cutoff convergence of an observable")
    add_common(p)
    p.add_argument("--cutoffs", help="comma-separated increasing cutoffs, e.g. 30,40,50")
    p.add_argument("--observable", default="na", help="na|variance|fano|entropy|ratio")
    p.set_defaults(func=cmd_convergence)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
