"""Command-line entry point: ``heraldpdc <subcommand> --config FILE --out DIR``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, load_config
from .counting import (
    conditional_efficiency,
    heralding_efficiency,
    predicted_conditional_efficiency,
    simulate_counts,
)
from .errors import HeraldError
from .interference import (
    calibrate_mode_overlap,
    coherent_mode,
    fit_gaussian_dip,
    hom_dip,
    rt_dip,
)
from .io import write_csv, write_json
from .optics import acceptance_angle, back_propagate_mode
from .phasematch import accepted_photon_set, raw_trigger_bandwidth, tuning_curve
from .spectrum import build_joint_spectrum, fwhm, heralded_density_op, heralded_marginal, spectrometer_scan


def _meta(cfg: ExperimentConfig, **extra) -> dict:
    return {"tool_version": __version__, "config": cfg.to_dict(), **extra}


def _fit_dict(fit) -> dict:
    return {
        "visibility": fit.visibility,
        "center": fit.center,
        "width_sigma": fit.width,
        "baseline": fit.baseline,
        "residual_norm": fit.residual_norm,
        "width_identified": fit.width_identified,
    }


def run_tuning_curve(cfg: ExperimentConfig, out: Path) -> dict:
    sset, cut, win = cfg.sellmeier(), cfg.cut(), cfg.window
    t = cfg.tuning
    rows, omitted = [], {}
    for lp in t.pump_wavelengths:
        curve = tuning_curve(lp, cut, t.signal_range, t.n_samples, sset)
        omitted[format(lp, "g")] = curve.metadata["n_omitted"]
        rows += [(lp, s, e, i) for s, e, i in curve.points]
    write_csv(out / "tuning_curves.csv", "tuning_curve", ["pump_nm", "signal_nm", "external_deg", "internal_deg"], rows)
    raw = raw_trigger_bandwidth(cfg.pump.center_wavelength, cut, win, sset)
    accepted = {}
    for name in ("F1_wide", "F1"):
        for strict in (False, True):
            a = accepted_photon_set(t.pump_range, cfg.filters[name], win, cut, sset, require_heralded_in_window=strict)
            accepted[f"{name}{'_both_windows' if strict else ''}"] = {
                "heralded_interval_nm": a.heralded_interval,
                "heralded_width_nm": a.heralded_width,
                "heralded_angle_interval_deg": a.heralded_angle_interval,
                "heralded_in_window_fraction": a.heralded_in_window_fraction,
            }
    summary = {
        "cut_angle_deg": cut.cut_angle,
        "sellmeier_set": sset.id,
        "n_omitted": omitted,
        "raw_trigger_interval_nm": raw,
        "raw_trigger_bandwidth_nm": raw[1] - raw[0],
        "accepted_sets": accepted,
    }
    write_json(out / "tuning_curves.json", "tuning_curve_meta", {**summary, **_meta(cfg)})
    return summary


def run_acceptance(cfg: ExperimentConfig, out: Path) -> dict:
    mode = back_propagate_mode(cfg.geometry)
    summary = {
        "acceptance_full_width_deg": acceptance_angle(cfg.geometry),
        "mode_waist_at_crystal_um": mode.waist_radius,
        "fiber_to_lens_mm": mode.fiber_to_lens * 1e-3,
        "criterion": "1/e^2 of peak power overlap",
    }
    write_json(out / "acceptance.json", "acceptance", {**summary, **_meta(cfg)})
    return summary


def _grid(cfg: ExperimentConfig):
    return build_joint_spectrum(cfg.pump, cfg.cut(), cfg.window, cfg.sellmeier(), cfg.grid, cfg.geometry)


def budget_numbers(cfg: ExperimentConfig) -> dict:
    r = cfg.rates
    eta_matched = conditional_efficiency(r.coincidence_matched_hz, r.trigger_hz)
    eta_wide = conditional_efficiency(r.coincidence_wide_hz, r.trigger_hz)
    return {
        "eta_d_matched": eta_matched,
        "eta_d_wide": eta_wide,
        "budget_product": cfg.budget.product,
        "heralding_efficiency": heralding_efficiency(eta_wide, cfg.budget),
        "budget": [[label, t] for label, t in cfg.budget.entries],
    }


def run_budget(cfg: ExperimentConfig, out: Path) -> dict:
    summary = budget_numbers(cfg)
    write_json(out / "budget.json", "budget", {**summary, **_meta(cfg)})
    return summary


def run_spectrum(cfg: ExperimentConfig, out: Path) -> dict:
    grid = _grid(cfg)
    lt, lh = np.meshgrid(grid.trigger_axis, grid.heralded_axis, indexing="ij")
    write_csv(
        out / "joint_spectrum.csv",
        "joint_spectrum",
        ["trigger_nm", "heralded_nm", "amplitude"],
        zip(lt.ravel(), lh.ravel(), grid.amplitude.real.ravel()),
    )
    summary = {"grid": grid.metadata, "marginals": {}}
    for name in ("F1_wide", "F1"):
        filt = cfg.filters[name]
        tag = f"F1_{format(filt.fwhm_bandwidth, 'g')}nm"
        marg = heralded_marginal(grid, filt)
        write_csv(out / f"marginal_{tag}.csv", "marginal", ["heralded_nm", "density"], zip(marg.axis, marg.values))
        s = cfg.spectrometer
        trace = spectrometer_scan(marg, cfg.filters["F2_scan"], s.tilt_range, s.n_steps)
        write_csv(out / f"spectrometer_{tag}.csv", "spectrometer", ["center_nm", "rate"], zip(trace.center, trace.rate))
        rho = heralded_density_op(grid, filt)
        summary["marginals"][tag] = {
            "fwhm_nm": marg.fwhm(),
            "spectrometer_mirrored_fwhm_nm": fwhm(trace.center, trace.rate, mirrored=True),
            "purity": rho.purity,
        }
    h = budget_numbers(cfg)["heralding_efficiency"]
    nonfilter = cfg.budget.without("F2 transmission")
    marg = heralded_marginal(grid, cfg.filters["F1"])
    narrow = predicted_conditional_efficiency(marg, cfg.filters["F2_narrow"], nonfilter, h)
    wide = predicted_conditional_efficiency(marg, cfg.filters["F2"], nonfilter, h)
    summary["predicted_eta_d"] = {
        "F2_narrow": narrow.value,
        "F2": wide.value,
        "ratio": narrow.value / wide.value,
        "formula": wide.formula,
    }
    write_json(out / "spectrum.json", "spectrum", {**summary, **_meta(cfg)})
    return summary


def _delays(cfg: ExperimentConfig):
    i = cfg.interference
    return np.linspace(i.delay_range_fs[0], i.delay_range_fs[1], i.n_delays)


def run_hom(cfg: ExperimentConfig, out: Path, grid=None) -> dict:
    grid = grid if grid is not None else _grid(cfg)
    i = cfg.interference
    pair_rate = i.hom_wing_counts / (0.5 * i.hom_bin_s)
    trace = hom_dip(grid, cfg.interference_filter("F2"), cfg.interference_filter("F3"), _delays(cfg), pair_rate, i.hom_bin_s)
    fit = fit_gaussian_dip(trace)
    write_csv(out / "hom_dip.csv", "dip_trace", ["delay_fs", "counts"], zip(trace.delays, trace.counts))
    summary = {"kind": trace.kind, "bin_duration_s": i.hom_bin_s, "fit": _fit_dict(fit),
               "center_counts": float(trace.counts[np.argmin(trace.counts)]), "pair_rate_hz": pair_rate}
    write_json(out / "hom_dip.json", "dip_trace_meta", {**summary, **_meta(cfg)})
    return summary


def rt_state(cfg: ExperimentConfig, grid):
    i = cfg.interference
    rho = heralded_density_op(grid, cfg.filters["F1"]).filtered(cfg.interference_filter("F2"))
    mode = coherent_mode(rho.axis, i.coherent_center_nm, i.coherent_duration_fs, cfg.interference_filter("F3"))
    return rho, mode


def run_rt(cfg: ExperimentConfig, out: Path, grid=None) -> dict:
    grid = grid if grid is not None else _grid(cfg)
    i = cfg.interference
    rho, mode = rt_state(cfg, grid)
    factor = calibrate_mode_overlap(rho, mode, i.rt_target_visibility)
    trace = rt_dip(rho, mode, i.rt_mean_photon_number, factor, _delays(cfg), i.rt_wing_counts / i.rt_bin_s, i.rt_bin_s)
    fit = fit_gaussian_dip(trace)
    write_csv(out / "rt_dip.csv", "dip_trace", ["delay_fs", "counts"], zip(trace.delays, trace.counts))
    summary = {"kind": trace.kind, "bin_duration_s": i.rt_bin_s, "mode_overlap_factor": factor,
               "visibility_at_zero": trace.metadata["visibility_at_zero"], "heralded_purity": rho.purity,
               "fit": _fit_dict(fit)}
    write_json(out / "rt_dip.json", "dip_trace_meta", {**summary, **_meta(cfg)})
    return summary


def run_simulate(cfg: ExperimentConfig, out: Path) -> dict:
    rec = simulate_counts(cfg.source, cfg.simulate.duration_s, cfg.seed)
    summary = rec.to_dict()
    write_json(out / "counts.json", "count_record", {**summary, **_meta(cfg)})
    return summary


COMMANDS = {
    "tuning-curve": run_tuning_curve,
    "acceptance": run_acceptance,
    "spectrum": run_spectrum,
    "budget": run_budget,
    "hom": run_hom,
    "rt": run_rt,
    "simulate": run_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heraldpdc", description="Heralded single photons from pulsed type-I PDC in BBO.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("subcommand", choices=sorted(COMMANDS) + ["all"])
    p.add_argument("--config", default=None, help="YAML/JSON experiment file (default: shipped reference setup)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--grid-scale", type=float, default=None, help="multiply joint-grid resolution")
    return p


def run(subcommand: str, config: str | None, out: str | Path, seed=None, grid_scale=None) -> dict:
    cfg = load_config(config).with_overrides(seed=seed, grid_scale=grid_scale)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    if subcommand == "all":
        return {name: fn(cfg, out) for name, fn in COMMANDS.items()}
    return COMMANDS[subcommand](cfg, out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        summary = run(args.subcommand, args.config, args.out, args.seed, args.grid_scale)
    except (HeraldError, ValueError, KeyError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "subcommand": args.subcommand}
        print(json.dumps(err), file=sys.stderr)
        return 2
    print(json.dumps({"subcommand": args.subcommand, "out": str(args.out)}, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
