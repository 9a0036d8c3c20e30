"""Run every CLI subcommand on a config and print the headline numbers.

    python scripts/reproduce_all.py [--config FILE] [--out DIR]
"""

import argparse
import json

from heraldpdc.cli import run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default=None)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    s = run("all", args.config, args.out)
    tc, sp = s["tuning-curve"], s["spectrum"]
    headline = {
        "cut_angle_deg": tc["cut_angle_deg"],
        "raw_trigger_bandwidth_nm": tc["raw_trigger_bandwidth_nm"],
        "accepted_heralded_width_nm": {k: v["heralded_width_nm"] for k, v in tc["accepted_sets"].items()},
        "acceptance_full_width_deg": s["acceptance"]["acceptance_full_width_deg"],
        "marginal_fwhm_nm": {k: v["fwhm_nm"] for k, v in sp["marginals"].items()},
        "purity": {k: v["purity"] for k, v in sp["marginals"].items()},
        "predicted_eta_d": sp["predicted_eta_d"],
        "heralding_efficiency": s["budget"]["heralding_efficiency"],
        "hom_visibility": s["hom"]["fit"]["visibility"],
        "rt_visibility_at_zero": s["rt"]["visibility_at_zero"],
        "simulated_trigger_rate_hz": s["simulate"]["trigger_rate_hz"],
        "simulated_eta_d": s["simulate"]["coincidences"] / s["simulate"]["trigger_counts"],
    }
    print(json.dumps(headline, indent=2, default=float))


if __name__ == "__main__":
    main()
