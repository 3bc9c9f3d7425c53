"""Command line front end.

Subcommands: layout, uplink-map, downlink-map, coverage-curve,
interference-cdf, validate.  Every CSV starts with a comment line
recording the config hash so outputs can be traced back to the exact
parameter set that produced them.

Exit codes: 0 success, 1 validation/runtime failure, 2 config or usage
error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .channel import build_link_table
from .config import ConfigError, ScenarioConfig, load_config
from .coverage import (
    LinkDirection,
    association_pmf,
    conditional_interference_spec,
    coverage_at_altitude,
    coverage_over_altitudes,
    downlink_snr_cdf,
    uplink_snr_pmf,
)
from .geometry import write_layout_csv
from .gpm import (
    SteppedCdf,
    enumerate_cdf,
    gaussian_cdf,
    kolmogorov_distance,
    la_cdf,
    mc_cdf,
    write_cdf_csv,
)
from .oracles import downlink_cdf_enumeration, uplink_pmf_enumeration

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

VALIDATE_MODES = (
    "la-vs-enum",
    "la-vs-mc",
    "ga-vs-enum",
    "uplink-vs-bruteforce",
    "downlink-vs-joint-enum",
)
DEFAULT_TOLERANCE = {
    "la-vs-enum": 0.01,
    "la-vs-mc": 0.005,
    "uplink-vs-bruteforce": 1e-12,
    "downlink-vs-joint-enum": 0.01,
}


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _out_path(args, name: str) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


def _write_csv(path: Path, header, rows, cfg: ScenarioConfig) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# config_sha256={cfg.config_hash}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _coverage_kwargs(cfg: ScenarioConfig, link: LinkDirection, threshold: float, args) -> dict:
    return dict(
        gbs_height=cfg.gbs_height,
        region=cfg.build_region(),
        link=link,
        threshold=threshold,
        beta0=cfg.beta0,
        alpha0=cfg.alpha0,
        omega=cfg.omega(),
        eps=cfg.association_epsilon,
        c0=cfg.lattice_target_c0,
        workers=args.workers,
    )


def cmd_layout(cfg: ScenarioConfig, args) -> int:
    layout = cfg.build_layout()
    path = _out_path(args, "layout.csv")
    write_layout_csv(layout, path, comment=f"config_sha256={cfg.config_hash}")
    bands = layout.bands()
    counts = {b: int(np.sum(bands == b)) for b in sorted(set(bands.tolist()))}
    print(f"wrote {path}: {len(layout.sites)} sites, band sizes {counts}")
    return EXIT_OK


def _map_command(cfg: ScenarioConfig, args, link: LinkDirection) -> int:
    threshold = cfg.uplink_threshold if link is LinkDirection.UPLINK else cfg.downlink_threshold
    altitude = args.altitude if args.altitude is not None else cfg.uav_altitude
    result = coverage_at_altitude(
        cfg.build_layout(),
        cfg.build_gbs_pattern(),
        cfg.build_uav_antenna(),
        cfg.build_channel(),
        altitude=altitude,
        **_coverage_kwargs(cfg, link, threshold, args),
    )
    name = "uplink_map.csv" if link is LinkDirection.UPLINK else "downlink_map.csv"
    path = _out_path(args, name)
    rows = [
        (float(x), float(y), float(p))
        for (x, y), p in zip(result.points, result.non_outage)
    ]
    _write_csv(path, ("x_m", "y_m", "non_outage_prob"), rows, cfg)
    print(f"wrote {path}: {len(rows)} points at H_u={_fmt(float(altitude))} m, "
          f"coverage={_fmt(result.coverage)}")
    return EXIT_OK


def cmd_uplink_map(cfg: ScenarioConfig, args) -> int:
    return _map_command(cfg, args, LinkDirection.UPLINK)


def cmd_downlink_map(cfg: ScenarioConfig, args) -> int:
    return _map_command(cfg, args, LinkDirection.DOWNLINK)


def cmd_coverage_curve(cfg: ScenarioConfig, args) -> int:
    link = LinkDirection(args.link)
    threshold = cfg.uplink_threshold if link is LinkDirection.UPLINK else cfg.downlink_threshold
    layout = cfg.build_layout()
    pattern = cfg.build_gbs_pattern()
    uav_ant = cfg.build_uav_antenna()
    chan = cfg.build_channel()
    path = _out_path(args, "coverage_curve.csv")

    if args.sweep == "altitude":
        altitudes = np.linspace(cfg.altitude_min, cfg.altitude_max, cfg.altitude_points)
        results, aggregate = coverage_over_altitudes(
            layout, pattern, uav_ant, chan,
            altitudes=altitudes,
            **_coverage_kwargs(cfg, link, threshold, args),
        )
        rows = [(float(h), r.coverage) for h, r in zip(altitudes, results)]
        _write_csv(path, ("altitude_m", "coverage"), rows, cfg)
        print(f"wrote {path}: {len(rows)} altitudes, altitude-averaged "
              f"coverage={_fmt(aggregate)}")
        return EXIT_OK

    altitude = args.altitude if args.altitude is not None else cfg.uav_altitude
    thresholds_db = np.linspace(args.min_db, args.max_db, args.points)
    rows = []
    for t_db in thresholds_db:
        result = coverage_at_altitude(
            layout, pattern, uav_ant, chan,
            altitude=altitude,
            **_coverage_kwargs(cfg, link, 10.0 ** (float(t_db) / 10.0), args),
        )
        rows.append((float(t_db), result.coverage))
    _write_csv(path, ("threshold_db", "coverage"), rows, cfg)
    print(f"wrote {path}: {len(rows)} thresholds at H_u={_fmt(float(altitude))} m")
    return EXIT_OK


def _conditioned_spec(cfg: ScenarioConfig, event_index: int):
    """Link table at the configured UAV position plus the interference
    spec conditioned on one association event."""
    layout = cfg.build_layout()
    table = build_link_table(
        layout, cfg.build_gbs_pattern(), cfg.build_uav_antenna(), cfg.build_channel(),
        (cfg.uav_x, cfg.uav_y, cfg.uav_altitude), cfg.gbs_height,
    )
    events = association_pmf(table, cfg.association_epsilon)
    if not 0 <= event_index < len(events):
        raise ConfigError(
            f"--event {event_index} out of range; {len(events)} association events"
        )
    event = events[event_index]
    if event.serving_id is None:
        raise ConfigError(
            "selected association event has no serving GBS (zero-gain case); "
            "no interference law is defined for it"
        )
    band = table.row_for(event.serving_id).band
    co_ids = table.band_members(band) - {event.serving_id}
    spec = conditional_interference_spec(event, table, co_ids, cfg.omega())
    return table, event, co_ids, spec


def cmd_interference_cdf(cfg: ScenarioConfig, args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    known = ("la", "enum", "mc", "ga")
    for m in methods:
        if m not in known:
            raise ConfigError(f"unknown method {m!r}; choose from {known}")
    if "mc" in methods and args.seed is None:
        raise ConfigError("--seed is required for the mc method")

    table, event, co_ids, spec = _conditioned_spec(cfg, args.event)
    print(f"event {args.event}: serving GBS {event.serving_id} ({event.state.name}), "
          f"P={_fmt(event.probability)}, {len(co_ids)} co-channel GBSs, "
          f"interference mean={_fmt(spec.mean())}")

    comment = f"config_sha256={cfg.config_hash}"
    lattice, la = la_cdf(spec, cfg.lattice_target_c0)
    for method in methods:
        path = _out_path(args, f"interference_cdf_{method}.csv")
        if method == "la":
            write_cdf_csv(la, path, comment=comment)
        elif method == "enum":
            write_cdf_csv(enumerate_cdf(spec), path, comment=comment)
        elif method == "mc":
            write_cdf_csv(mc_cdf(spec, args.samples, args.seed), path, comment=comment)
        else:
            ga = gaussian_cdf(spec)
            rows = [(float(x), float(ga(x))) for x in la.xs]
            _write_csv(path, ("x", "cdf"), rows, cfg)
        print(f"wrote {path}")
    return EXIT_OK


def cmd_validate(cfg: ScenarioConfig, args) -> int:
    mode = args.mode
    tolerance = args.tolerance
    if tolerance is None:
        tolerance = DEFAULT_TOLERANCE.get(mode)

    if mode == "uplink-vs-bruteforce":
        layout = cfg.build_layout()
        table = build_link_table(
            layout, cfg.build_gbs_pattern(), cfg.build_uav_antenna(), cfg.build_channel(),
            (cfg.uav_x, cfg.uav_y, cfg.uav_altitude), cfg.gbs_height,
        )
        pmf = uplink_snr_pmf(table, cfg.beta0)
        oracle = uplink_pmf_enumeration(table, cfg.beta0)
        if list(pmf.values) != list(oracle.values):
            print("FAIL uplink-vs-bruteforce: atom value sets differ")
            return EXIT_FAIL
        err = float(np.max(np.abs(np.asarray(pmf.probs) - np.asarray(oracle.probs))))
        ok = err <= tolerance
        print(f"{'PASS' if ok else 'FAIL'} uplink-vs-bruteforce: "
              f"max pmf error={err:.3e} tolerance={tolerance:.3e}")
        return EXIT_OK if ok else EXIT_FAIL

    if mode == "downlink-vs-joint-enum":
        layout = cfg.build_layout()
        table = build_link_table(
            layout, cfg.build_gbs_pattern(), cfg.build_uav_antenna(), cfg.build_channel(),
            (cfg.uav_x, cfg.uav_y, cfg.uav_altitude), cfg.gbs_height,
        )
        approx = downlink_snr_cdf(table, cfg.omega(), cfg.alpha0, c0=cfg.lattice_target_c0)
        oracle = downlink_cdf_enumeration(table, cfg.omega(), cfg.alpha0)
        dist = kolmogorov_distance(oracle, approx)
        ok = dist <= tolerance
        print(f"{'PASS' if ok else 'FAIL'} downlink-vs-joint-enum: "
              f"Kolmogorov distance={dist:.3e} tolerance={tolerance:.3e}")
        return EXIT_OK if ok else EXIT_FAIL

    # The remaining modes compare interference-cdf approximations on the
    # spec conditioned on one association event at the configured position.
    table, event, co_ids, spec = _conditioned_spec(cfg, args.event)
    print(f"conditioning on event {args.event}: serving GBS {event.serving_id}, "
          f"{len(co_ids)} co-channel GBSs")
    _, la = la_cdf(spec, cfg.lattice_target_c0)

    if mode == "la-vs-enum":
        dist = kolmogorov_distance(enumerate_cdf(spec), la)
        ok = dist <= tolerance
        print(f"{'PASS' if ok else 'FAIL'} la-vs-enum: "
              f"Kolmogorov distance={dist:.3e} tolerance={tolerance:.3e}")
        return EXIT_OK if ok else EXIT_FAIL

    if mode == "la-vs-mc":
        if args.seed is None:
            raise ConfigError("--seed is required for la-vs-mc")
        dist = kolmogorov_distance(mc_cdf(spec, args.samples, args.seed), la)
        ok = dist <= tolerance
        print(f"{'PASS' if ok else 'FAIL'} la-vs-mc: "
              f"Kolmogorov distance={dist:.3e} tolerance={tolerance:.3e} "
              f"(n={args.samples}, seed={args.seed})")
        return EXIT_OK if ok else EXIT_FAIL

    # ga-vs-enum: the Gaussian baseline is expected to be the weaker
    # approximation; pass means LA beats GA against the same oracle.
    oracle = enumerate_cdf(spec)
    ga_dist = kolmogorov_distance(oracle, gaussian_cdf(spec))
    la_dist = kolmogorov_distance(oracle, la)
    ok = la_dist < ga_dist
    print(f"{'PASS' if ok else 'FAIL'} ga-vs-enum: GA distance={ga_dist:.3e}, "
          f"LA distance={la_dist:.3e} (pass means LA < GA)")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavcov",
        description="Coverage analysis for cellular-connected UAVs",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="INI config file (defaults used if absent)")
    common.add_argument("--out", default=".", help="output directory for CSVs")
    common.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    common.add_argument("--seed", type=int, default=None, help="RNG seed (required for MC)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("layout", parents=[common], help="emit the site/band layout CSV")
    p.set_defaults(func=cmd_layout)

    for name, func in (("uplink-map", cmd_uplink_map), ("downlink-map", cmd_downlink_map)):
        p = sub.add_parser(name, parents=[common], help=f"{name.split('-')[0]} non-outage raster")
        p.add_argument("--altitude", type=float, default=None, help="UAV altitude in m")
        p.set_defaults(func=func)

    p = sub.add_parser("coverage-curve", parents=[common], help="coverage vs altitude or threshold")
    p.add_argument("--link", choices=("uplink", "downlink"), default="uplink")
    p.add_argument("--sweep", choices=("altitude", "threshold"), default="altitude")
    p.add_argument("--altitude", type=float, default=None, help="altitude for threshold sweeps")
    p.add_argument("--min-db", type=float, default=0.0, help="threshold sweep start (dB)")
    p.add_argument("--max-db", type=float, default=20.0, help="threshold sweep end (dB)")
    p.add_argument("--points", type=int, default=10, help="threshold sweep length")
    p.set_defaults(func=cmd_coverage_curve)

    p = sub.add_parser("interference-cdf", parents=[common],
                       help="conditional interference cdf at the configured UAV position")
    p.add_argument("--event", type=int, default=0, help="association event index")
    p.add_argument("--methods", default="la", help="comma list from la,enum,mc,ga")
    p.add_argument("--samples", type=int, default=1_000_000, help="MC sample count")
    p.set_defaults(func=cmd_interference_cdf)

    p = sub.add_parser("validate", parents=[common], help="cross-check against oracles")
    p.add_argument("--mode", choices=VALIDATE_MODES, required=True)
    p.add_argument("--event", type=int, default=0, help="association event index")
    p.add_argument("--samples", type=int, default=1_000_000, help="MC sample count")
    p.add_argument("--tolerance", type=float, default=None,
                   help="pass/fail bound (mode-specific default)")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
