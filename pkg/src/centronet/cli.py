"""Command line entry points.

Subcommands: sample (run an ensemble and write CSV/JSON), theory (evaluate
the closed forms at given parameters), dos (bulk-spectrum cusp experiment),
fit (threshold-vs-coupling protocol), scaling (efficient-fraction table),
plotdata (histogram plus overlay curve for external plotting).

Ensemble settings come from an optional JSON config file whose keys mirror
EnsembleConfig; every field can be overridden by a long-form flag.  The
seed must always be given explicitly, either in the file or with --seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from typing import Optional

import numpy as np

from . import harness, theory
from .ensemble import MODES, EnsembleConfig

_CONFIG_FIELDS = tuple(f.name for f in dataclasses.fields(EnsembleConfig))

_PLOT_KINDS = ("ratio_spectral", "ratio_dynamical", "direct_coupling",
               "delta_s", "splitting", "alpha_min",
               "p_h_window", "p_h_restricted", "p_h_avg")


def _add_ensemble_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE",
                        help="JSON file with ensemble settings")
    parser.add_argument("--n", type=int, help="network size (even)")
    parser.add_argument("--xi", type=float, help="coupling scale")
    parser.add_argument("--alpha", type=float, help="doublet weight threshold")
    parser.add_argument("--seed", type=int, dest="master_seed",
                        help="master seed (required; no wall-clock default)")
    parser.add_argument("--window-factor", type=float, dest="window_factor",
                        help="search window in Rabi times")
    parser.add_argument("--n-target", type=int, dest="n_target",
                        help="realizations to keep")
    parser.add_argument("--mode", choices=MODES, help="ensemble variant")
    parser.add_argument("--fixed-e-plus-v", type=float, dest="fixed_e_plus_v",
                        help="pin the upper doublet level E+V")
    parser.add_argument("--fixed-v-star", type=float, dest="fixed_v_star",
                        help="pin the direct coupling V")


def _build_config(args: argparse.Namespace) -> EnsembleConfig:
    data: dict = {}
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ValueError(f"{args.config}: expected a JSON object")
        unknown = sorted(set(loaded) - set(_CONFIG_FIELDS))
        if unknown:
            raise ValueError(f"{args.config}: unknown config keys {unknown}")
        data.update(loaded)
    for name in _CONFIG_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    if "master_seed" not in data:
        raise ValueError("a seed is required: pass --seed or put "
                         "master_seed in the config file")
    for name in ("n", "xi"):
        if name not in data:
            raise ValueError(f"missing required setting '{name}' "
                             "(flag or config file)")
    return EnsembleConfig(**data)


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ValueError(f"{flag}: could not parse '{text}'") from exc
    if not values:
        raise ValueError(f"{flag}: empty list")
    return values


def _parse_int_list(text: str, flag: str) -> list[int]:
    return [int(v) for v in _parse_float_list(text, flag)]


def _print_json(payload: dict, out: Optional[str]) -> None:
    rendered = json.dumps(payload, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(rendered + "\n")
    else:
        print(rendered)


def _cmd_sample(args: argparse.Namespace) -> int:
    config = _build_config(args)
    records, summary = harness.run_ensemble(config, budget=args.budget,
                                            n_workers=args.workers)
    harness.emit(records, summary, args.out_prefix + ".csv",
                 args.out_prefix + ".json")
    print(f"kept {summary.n_accepted} of {summary.n_sampled} draws "
          f"(rate {summary.acceptance_rate:.3e}) in {summary.elapsed:.1f}s; "
          f"wrote {args.out_prefix}.csv and {args.out_prefix}.json")
    return 0


def _cmd_theory(args: argparse.Namespace) -> int:
    n, xi = args.n, args.xi
    alpha = args.alpha
    cns = args.coupling_norm_sq
    if cns is None and alpha is not None:
        cns = theory.coupling_from_alpha(alpha, xi)
    if alpha is None and cns is not None:
        alpha = theory.alpha_from_coupling(cns, xi)
    v = args.v
    out: dict = {"n": n, "xi": xi}
    out["delta_loc"] = theory.delta_loc(n, xi)
    out["d_min"] = theory.d_min(n, xi)
    out["v_bar_exact"] = theory.vbar_exact(n, xi)
    out["v_bar_asymptotic"] = theory.vbar_asymptotic(n, xi)
    out["avg_return_population"] = theory.avg_return_population(n)
    out["sector_bulk_radius"] = theory.sector_bulk_radius(n, xi)
    if alpha is not None:
        out["alpha"] = alpha
        out["coupling_norm_sq"] = cns
        out["d_min_constrained"] = theory.d_min_constrained(cns, alpha, n)
        out["efficiency_lower_bound"] = theory.efficiency_lower_bound(alpha)
        if n > 2:
            out["doublet_probability"] = theory.doublet_probability(n, alpha)
    if cns is not None:
        out["s0_width"] = theory.s0_width(n, xi, cns)
        out["x0_shift"] = theory.x0_shift(xi, cns)
        out["prob_faster"] = theory.prob_faster_than_rabi(n, xi, cns)
        out["prob_faster_exact"] = theory.prob_faster_than_rabi_exact(n, xi, cns)
        out["prob_faster_asymptotic"] = (
            theory.prob_faster_than_rabi_asymptotic(n, xi, cns))
        v_eff = v if v is not None else out["v_bar_asymptotic"]
        params = theory.delta_s_params(n, xi, cns, v_eff)
        out["shift_difference_v"] = v_eff
        out["shift_difference_location"] = params.location
        out["shift_difference_scale"] = params.scale
        if v is not None:
            out["prob_faster_fixedv"] = (
                theory.prob_faster_than_rabi_fixedv(v, n, xi, cns))
            out["prob_faster_fixedv_asymptotic"] = (
                theory.prob_faster_than_rabi_fixedv_asymptotic(v, n, xi, cns))
    _print_json(out, args.out)
    return 0


def _cmd_dos(args: argparse.Namespace) -> int:
    config = _build_config(args)
    if config.fixed_e_plus_v is None:
        config = dataclasses.replace(config, fixed_e_plus_v=1.0)
    result = harness.dos_cusp_experiment(config, budget=args.budget)
    hist = result.histogram
    with open(args.out_prefix + ".csv", "w") as fh:
        fh.write("bin_left,bin_right,count,density\n")
        dens = hist.density
        for i in range(len(hist.counts)):
            fh.write(f"{hist.edges[i]:.17g},{hist.edges[i + 1]:.17g},"
                     f"{int(hist.counts[i])},{dens[i]:.17g}\n")
    _print_json({
        "target": result.target,
        "density_at_target": result.density_at_target,
        "reference_density": result.reference_density,
        "cusp_width": result.cusp_width,
        "n_accepted": result.n_accepted,
        "n_sampled": result.n_sampled,
    }, args.out_prefix + ".json")
    print(f"density at {result.target:g}: {result.density_at_target:.4f} "
          f"(reference {result.reference_density:.4f}); "
          f"cusp width {result.cusp_width:.4f}; "
          f"wrote {args.out_prefix}.csv and {args.out_prefix}.json")
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    alphas = _parse_float_list(args.alphas, "--alphas")
    points: list[tuple[float, float]] = []
    for path in args.records:
        records = harness.read_records(path)
        if not records:
            raise ValueError(f"{path}: no records")
        xi = records[0].xi
        if any(abs(r.xi - xi) > 1e-12 for r in records):
            raise ValueError(f"{path}: mixed xi values")
        points.extend(harness.alpha_coupling_scan(records, alphas, xi))
    fit = harness.fit_alpha_vs_coupling(points)
    payload = {"c": fit.c, "b": fit.b, "stderr_c": fit.stderr_c,
               "stderr_b": fit.stderr_b,
               "points": [[r, a] for r, a in points]}
    _print_json(payload, args.out)
    print(f"C = {fit.c:.4f} +/- {fit.stderr_c:.4f}, "
          f"b = {fit.b:.4f} +/- {fit.stderr_b:.4f} "
          f"({len(points)} points)", file=sys.stderr)
    return 0


def _cmd_scaling(args: argparse.Namespace) -> int:
    n_values = _parse_int_list(args.n_values, "--n-values")
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    for mode in modes:
        if mode not in MODES:
            raise ValueError(f"unknown mode '{mode}'")
    if args.n is None:
        args.n = n_values[0]
    template = _build_config(args)
    cells = harness.scaling_experiment(template, n_values, modes,
                                       budget=args.budget)
    payload = {"cells": [dataclasses.asdict(c) for c in cells]}
    _print_json(payload, args.out)
    for cell in cells:
        print(f"N={cell.n:3d} {cell.mode:>17s}: "
              f"{cell.fraction_efficient:.4f} +/- {cell.stderr:.4f} "
              f"({cell.n_accepted} kept; bound {cell.theory_lower_bound:.4f})",
              file=sys.stderr)
    return 0


def _cmd_plotdata(args: argparse.Namespace) -> int:
    records = harness.read_records(args.records)
    if not records:
        raise ValueError(f"{args.records}: no records")
    n = records[0].n
    xi = records[0].xi
    kind = args.kind
    field = {"alpha_min": "alpha_eff"}.get(kind, kind)
    values = np.array([getattr(r, field) for r in records], dtype=float)
    values = values[np.isfinite(values)]
    if kind == "ratio_dynamical":
        lo, hi = 1.0 / args.window_factor, 20.0
        values = values[(values >= lo) & (values <= hi)]
    if values.size == 0:
        raise ValueError(f"no finite values for kind '{kind}'")
    bins: object = args.bins
    if isinstance(bins, str) and bins.isdigit():
        bins = int(bins)
    hist = harness.Histogram.from_samples(values, bins=bins)
    centers = 0.5 * (hist.edges[:-1] + hist.edges[1:])
    model = np.full_like(centers, math.nan)
    cns_all = np.array([0.5 * (r.coupling_norm_sq_plus
                               + r.coupling_norm_sq_minus) for r in records])
    cns = float(np.nanmean(cns_all)) if np.any(np.isfinite(cns_all)) else math.nan
    if kind in ("ratio_spectral", "ratio_dynamical") and math.isfinite(cns):
        v_col = np.array([r.direct_coupling for r in records])
        if np.ptp(v_col) < 1e-12:
            model = theory.transfer_time_pdf_fixedv(centers, float(v_col[0]),
                                                    n, xi, cns)
        else:
            model = theory.transfer_time_pdf(centers, n, xi, cns)
    elif kind == "direct_coupling":
        model = theory.min_coupling_pdf(centers, n, xi)
    elif kind == "delta_s" and math.isfinite(cns):
        v_med = float(np.median([r.direct_coupling for r in records]))
        params = theory.delta_s_params(n, xi, cns, v_med)
        model = theory.cauchy_pdf(centers, params)
    dens = hist.density
    with open(args.out, "w") as fh:
        fh.write("bin_left,bin_right,count,density,model\n")
        for i in range(len(hist.counts)):
            fh.write(f"{hist.edges[i]:.17g},{hist.edges[i + 1]:.17g},"
                     f"{int(hist.counts[i])},{dens[i]:.17g},"
                     f"{model[i]:.17g}\n")
    print(f"wrote {len(hist.counts)} bins for {kind} "
          f"({values.size} values) to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="centronet",
        description="Excitation transport across mirror-symmetric random "
                    "networks: sampling, dynamics, and closed-form checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="run an ensemble, write CSV and JSON")
    _add_ensemble_flags(p)
    p.add_argument("--budget", type=int, help="raw-draw cap")
    p.add_argument("--workers", type=int, default=1,
                   help="kernel threads (results are unaffected)")
    p.add_argument("--out-prefix", required=True,
                   help="writes PREFIX.csv and PREFIX.json")
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("theory", help="evaluate the closed forms")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--alpha", type=float,
                   help="doublet threshold; sets the mean coupling")
    p.add_argument("--coupling-norm-sq", type=float, dest="coupling_norm_sq",
                   help="mean squared coupling norm, overrides --alpha")
    p.add_argument("--v", type=float,
                   help="direct coupling for the fixed-V quantities")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(handler=_cmd_theory)

    p = sub.add_parser("dos", help="bulk-level histogram around a pinned level")
    _add_ensemble_flags(p)
    p.add_argument("--budget", type=int, help="raw-draw cap")
    p.add_argument("--out-prefix", required=True,
                   help="writes PREFIX.csv and PREFIX.json")
    p.set_defaults(handler=_cmd_dos)

    p = sub.add_parser("fit", help="fit the threshold-coupling relation")
    p.add_argument("--records", nargs="+", required=True,
                   help="record CSVs from sample runs")
    p.add_argument("--alphas", required=True,
                   help="comma-separated thresholds to scan")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(handler=_cmd_fit)

    p = sub.add_parser("scaling", help="efficient fraction per size and mode")
    _add_ensemble_flags(p)
    p.add_argument("--n-values", required=True, dest="n_values",
                   help="comma-separated even sizes")
    p.add_argument("--modes", default=",".join(MODES),
                   help="comma-separated ensemble variants")
    p.add_argument("--budget", type=int, help="raw-draw cap per cell")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(handler=_cmd_scaling)

    p = sub.add_parser("plotdata", help="histogram a record column with an "
                                        "overlay curve")
    p.add_argument("--records", required=True, help="record CSV")
    p.add_argument("--kind", required=True, choices=_PLOT_KINDS)
    p.add_argument("--bins", default="fd",
                   help="bin count or a numpy binning rule (default fd)")
    p.add_argument("--window-factor", type=float, default=1.7,
                   dest="window_factor",
                   help="lower axis clip for ratio_dynamical")
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(handler=_cmd_plotdata)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
