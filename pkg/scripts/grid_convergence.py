"""Reported FWHMs and purities as the joint grid is refined."""

from heraldpdc.config import reference_config
from heraldpdc.spectrum import build_joint_spectrum, fwhm, heralded_density_op, heralded_marginal, spectrometer_scan


def main(scales=(0.5, 1.0, 2.0)):
    cfg = reference_config()
    s = cfg.spectrometer
    print(f"{'scale':>6}{'points':>8}  {'F1':<5}{'marginal':>10}{'trace':>9}{'purity':>9}")
    for k in scales:
        spec = cfg.grid.scaled(k)
        grid = build_joint_spectrum(cfg.pump, cfg.cut(), cfg.window, cfg.sellmeier(), spec, cfg.geometry)
        for name in ("F1_wide", "F1"):
            f = cfg.filters[name]
            m = heralded_marginal(grid, f)
            tr = spectrometer_scan(m, cfg.filters["F2_scan"], s.tilt_range, s.n_steps)
            p = heralded_density_op(grid, f).purity
            print(f"{k:>6g}{spec.n_points:>8}  {f.fwhm_bandwidth:<5g}{m.fwhm():>10.3f}"
                  f"{fwhm(tr.center, tr.rate, mirrored=True):>9.3f}{p:>9.4f}")


if __name__ == "__main__":
    main()
