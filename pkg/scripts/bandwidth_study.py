"""Heralded bandwidth under the two gating rules, for each coefficient set.

Trigger-only gating keeps every pair whose trigger is filtered and lands in
the angular window.  Both-window gating also demands the heralded photon's
angle lie in the window.  Prints interval widths and the Gaussian-pump
marginal FWHM for comparison.
"""

import dataclasses

from heraldpdc import dispersion as disp
from heraldpdc.config import reference_config
from heraldpdc.phasematch import accepted_photon_set, calibrated_cut, raw_trigger_bandwidth
from heraldpdc.spectrum import build_joint_spectrum, heralded_marginal


def main():
    cfg = reference_config()
    print(f"{'set':<12}{'cut':>9}{'raw':>8}  {'F1':<8}{'trigger-only':>13}{'both':>8}{'marginal':>10}")
    for sset in disp.BUILTIN_SETS.values():
        cut = calibrated_cut(cfg.pump.center_wavelength, cfg.crystal.calibration_cone_angle_deg, sset)
        lo, hi = raw_trigger_bandwidth(cfg.pump.center_wavelength, cut, cfg.window, sset)
        grid = build_joint_spectrum(cfg.pump, cut, cfg.window, sset, cfg.grid, cfg.geometry)
        for name in ("F1_wide", "F1"):
            f = cfg.filters[name]
            loose = accepted_photon_set(cfg.tuning.pump_range, f, cfg.window, cut, sset)
            strict = accepted_photon_set(cfg.tuning.pump_range, f, cfg.window, cut, sset,
                                         require_heralded_in_window=True)
            marg = heralded_marginal(grid, f).fwhm()
            print(f"{sset.id:<12}{cut.cut_angle:>9.4f}{hi - lo:>8.1f}  {f.fwhm_bandwidth:<8g}"
                  f"{loose.heralded_width:>13.2f}{strict.heralded_width:>8.2f}{marg:>10.2f}")
    mono = dataclasses.replace(cfg.pump, duration_fwhm=float("inf"))
    grid = build_joint_spectrum(mono, cfg.cut(), cfg.window, cfg.sellmeier(), cfg.grid, cfg.geometry)
    print("monochromatic pump marginal FWHM:",
          {n: round(heralded_marginal(grid, cfg.filters[n]).fwhm(), 3) for n in ("F1_wide", "F1")})


if __name__ == "__main__":
    main()
