"""Type-I (e -> o + o) phase matching in BBO: emission angles and tuning curves.

Geometry: the pump is a plane wave normal to the crystal faces, making
``cut_angle`` with the optic axis.  Trigger and heralded photons leave on
opposite sides of the pump axis.  Energy conservation fixes the heralded
wavelength, and the wave-vector triangle k_p = k_t + k_h fixes both
internal angles.  External angles follow from refraction at the exit face
with the ordinary index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect

from . import dispersion as disp
from .errors import EmptyResultError, NotPhaseMatchableError
from .optics import FilterSpec, tilt_tuned_center


@dataclass(frozen=True)
class CrystalCut:
    cut_angle: float  # degrees between optic axis and pump direction
    thickness: float = 0.7  # mm
    interaction: str = "type-I e->oo"

    def __post_init__(self):
        if not 0 < self.cut_angle < 90:
            raise ValueError("cut_angle must lie in (0, 90) degrees")
        if self.thickness <= 0:
            raise ValueError("thickness must be positive")
        if self.interaction != "type-I e->oo":
            raise ValueError(f"unsupported interaction {self.interaction!r}")


@dataclass(frozen=True)
class AcceptanceWindow:
    center_angle: float = 4.5  # external, degrees
    half_width: float = 0.15

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.center_angle <= self.half_width:
            raise ValueError("center_angle must exceed half_width")

    def contains(self, angle_deg):
        return np.abs(np.asarray(angle_deg) - self.center_angle) <= self.half_width


@dataclass
class TuningCurve:
    pump_wavelength: float
    signal: np.ndarray  # nm
    external: np.ndarray  # degrees
    internal: np.ndarray  # degrees
    metadata: dict = field(default_factory=dict)

    @property
    def points(self):
        return list(zip(self.signal.tolist(), self.external.tolist(), self.internal.tolist()))


class EmissionAngles(NamedTuple):
    trigger_external: float
    heralded_external: float
    trigger_internal: float
    heralded_internal: float


def conjugate_wavelength(pump_nm, trigger_nm):
    """Heralded wavelength from energy conservation 1/l_p = 1/l_t + 1/l_h."""
    lp = np.asarray(pump_nm, dtype=float)
    lt = np.asarray(trigger_nm, dtype=float)
    if np.any(lt <= lp):
        raise ValueError("trigger wavelength must exceed pump wavelength")
    lh = lp * lt / (lt - lp)
    return float(lh) if lh.ndim == 0 else lh


def pump_wavevector(pump_nm, cut: CrystalCut, sset: disp.SellmeierSet):
    """Extraordinary pump wavenumber in rad/um."""
    n = disp.index_extraordinary(sset, pump_nm, math.radians(cut.cut_angle))
    return 2e3 * np.pi * n / np.asarray(pump_nm)


def ordinary_wavevector(wavelength_nm, sset: disp.SellmeierSet):
    return 2e3 * np.pi * disp.index_ordinary(sset, wavelength_nm) / np.asarray(wavelength_nm)


def external_angle(internal_rad, wavelength_nm, sset: disp.SellmeierSet):
    """Refract an ordinary ray out of the crystal face; returns radians."""
    s = disp.index_ordinary(sset, wavelength_nm) * np.sin(internal_rad)
    return np.arcsin(np.clip(s, -1.0, 1.0))


def internal_angle(external_rad, wavelength_nm, sset: disp.SellmeierSet):
    return np.arcsin(np.sin(external_rad) / disp.index_ordinary(sset, wavelength_nm))


def _triangle(kp, kt, kh):
    cos_t = (kp**2 + kt**2 - kh**2) / (2 * kp * kt)
    cos_h = (kp**2 + kh**2 - kt**2) / (2 * kp * kh)
    return cos_t, cos_h


def emission_angle_grid(pump_nm, trigger_nm, cut: CrystalCut, sset: disp.SellmeierSet):
    """Vectorized emission angles (degrees), NaN where not phase-matchable.

    Returns ``(trigger_ext, heralded_ext, trigger_int, heralded_int, heralded_nm)``.
    A point is not phase-matchable when the conjugate wavelength leaves the
    dispersion range or the wave-vector triangle cannot close.
    """
    lp, lt = np.broadcast_arrays(np.asarray(pump_nm, float), np.asarray(trigger_nm, float))
    lo, hi = sset.valid_range
    ok = lt > lp
    lh = np.where(ok, lp * lt / np.where(ok, lt - lp, 1.0), np.nan)
    ok &= (lh >= lo) & (lh <= hi)
    lh_eval = np.where(ok, lh, lt)
    kp = pump_wavevector(lp, cut, sset)
    kt = ordinary_wavevector(lt, sset)
    kh = ordinary_wavevector(lh_eval, sset)
    cos_t, cos_h = _triangle(kp, kt, kh)
    ok &= (np.abs(cos_t) <= 1) & (np.abs(cos_h) <= 1)
    th_t = np.arccos(np.clip(cos_t, -1, 1))
    th_h = np.arccos(np.clip(cos_h, -1, 1))
    ext_t = external_angle(th_t, lt, sset)
    ext_h = external_angle(th_h, lh_eval, sset)
    nan = np.nan
    return (
        np.where(ok, np.degrees(ext_t), nan),
        np.where(ok, np.degrees(ext_h), nan),
        np.where(ok, np.degrees(th_t), nan),
        np.where(ok, np.degrees(th_h), nan),
        np.where(ok, lh, nan),
    )


def longitudinal_mismatch(pump_nm, trigger_nm, theta_t_rad, theta_h_rad, cut, sset):
    """k_p - k_t cos(theta_t) - k_h cos(theta_h), rad/um."""
    lh = conjugate_wavelength(pump_nm, trigger_nm)
    kp = pump_wavevector(pump_nm, cut, sset)
    kt = ordinary_wavevector(trigger_nm, sset)
    kh = ordinary_wavevector(lh, sset)
    return kp - kt * np.cos(theta_t_rad) - kh * np.cos(theta_h_rad)


def solve_emission_angles(pump_nm: float, trigger_nm: float, cut: CrystalCut,
                          sset: disp.SellmeierSet = disp.DEFAULT_SET) -> EmissionAngles:
    """External and internal emission angles (degrees) of a trigger/heralded pair."""
    disp.index_ordinary(sset, trigger_nm)
    disp.index_ordinary(sset, pump_nm)
    if trigger_nm <= pump_nm:
        raise ValueError("trigger wavelength must exceed pump wavelength")
    lh = conjugate_wavelength(pump_nm, trigger_nm)
    lo, hi = sset.valid_range
    if not lo <= lh <= hi:
        raise NotPhaseMatchableError(
            f"conjugate of {trigger_nm} nm at pump {pump_nm} nm is {lh:.6g} nm, outside the dispersion range"
        )
    ext_t, ext_h, int_t, int_h, _ = emission_angle_grid(pump_nm, trigger_nm, cut, sset)
    if not np.isfinite(ext_t):
        raise NotPhaseMatchableError(
            f"pump {pump_nm} nm, trigger {trigger_nm} nm cannot be phase matched at cut {cut.cut_angle} deg"
        )
    return EmissionAngles(float(ext_t), float(ext_h), float(int_t), float(int_h))


def solve_degenerate_cut_angle(pump_nm: float, target_external_angle: float,
                               sset: disp.SellmeierSet = disp.DEFAULT_SET,
                               bracket=(20.0, 40.0)) -> float:
    """Cut angle (degrees) putting degenerate pairs at the requested external cone angle.

    Bisection on the longitudinal mismatch over ``bracket``; n_e(theta) falls
    monotonically with the cut angle so the residual has one sign change.
    """
    if not 0 < target_external_angle < 20:
        raise ValueError("target angle must lie in (0, 20) degrees")
    ls = 2.0 * pump_nm
    k_s = ordinary_wavevector(ls, sset)
    th_int = internal_angle(math.radians(target_external_angle), ls, sset)

    def residual(cut_deg):
        kp = 2e3 * math.pi * disp.index_extraordinary(sset, pump_nm, math.radians(cut_deg)) / pump_nm
        return kp - 2 * k_s * math.cos(th_int)

    a, b = bracket
    ra, rb = residual(a), residual(b)
    if ra * rb > 0:
        raise EmptyResultError(f"no cut angle in [{a}, {b}] deg reaches {target_external_angle} deg")
    return bisect(residual, a, b, xtol=1e-12, rtol=4 * np.finfo(float).eps, maxiter=200)


def calibrated_cut(pump_nm=390.0, target_external_angle=4.5, sset=disp.DEFAULT_SET, thickness=0.7) -> CrystalCut:
    return CrystalCut(solve_degenerate_cut_angle(pump_nm, target_external_angle, sset), thickness)


def tuning_curve(pump_nm: float, cut: CrystalCut, wavelength_range=(680.0, 880.0), n_samples: int = 201,
                 sset: disp.SellmeierSet = disp.DEFAULT_SET) -> TuningCurve:
    """Trigger emission angle versus trigger wavelength at one pump wavelength."""
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    lt = np.linspace(wavelength_range[0], wavelength_range[1], n_samples)
    disp.index_ordinary(sset, lt)
    ext, _, internal, _, _ = emission_angle_grid(pump_nm, lt, cut, sset)
    keep = np.isfinite(ext)
    if not keep.any():
        raise EmptyResultError(f"no phase-matchable sample for pump {pump_nm} nm")
    meta = {
        "cut_angle_deg": cut.cut_angle,
        "sellmeier_set": sset.id,
        "n_requested": int(n_samples),
        "n_omitted": int((~keep).sum()),
    }
    return TuningCurve(float(pump_nm), lt[keep], ext[keep], internal[keep], meta)


@dataclass(frozen=True)
class AcceptedSet:
    heralded_interval: tuple[float, float]
    heralded_angle_interval: tuple[float, float]
    trigger_interval: tuple[float, float]
    n_accepted: int
    heralded_in_window_fraction: float

    @property
    def heralded_width(self) -> float:
        return self.heralded_interval[1] - self.heralded_interval[0]


def passband_interval(filt: FilterSpec) -> tuple[float, float]:
    c = tilt_tuned_center(filt)
    return c - filt.fwhm_bandwidth / 2, c + filt.fwhm_bandwidth / 2


def accepted_photon_set(pump_range, trigger_filter: FilterSpec, window: AcceptanceWindow, cut: CrystalCut,
                        sset: disp.SellmeierSet = disp.DEFAULT_SET, n_pump: int = 201, n_trigger: int = 201,
                        require_heralded_in_window: bool = False) -> AcceptedSet:
    """Heralded wavelengths conjugate to triggers passing the filter and the trigger window.

    A trigger counts when its wavelength lies in the filter passband and its
    external angle lies inside ``window``.  With
    ``require_heralded_in_window`` the heralded photon's own angle must also
    fall in the window (a stricter, fiber-B-coupled subset).  The fraction of
    accepted heralds inside the window is reported either way.
    """
    p_lo, p_hi = pump_range
    if p_hi < p_lo:
        raise ValueError("empty pump range")
    lp = np.linspace(p_lo, p_hi, n_pump if p_hi > p_lo else 1)
    t_lo, t_hi = passband_interval(trigger_filter)
    lt = np.linspace(t_lo, t_hi, n_trigger)
    P, T = np.meshgrid(lp, lt, indexing="ij")
    ext_t, ext_h, _, _, lh = emission_angle_grid(P, T, cut, sset)
    with np.errstate(invalid="ignore"):
        trig_ok = np.isfinite(ext_t) & window.contains(ext_t)
        her_ok = trig_ok & window.contains(ext_h)
    mask = her_ok if require_heralded_in_window else trig_ok
    if not mask.any():
        raise EmptyResultError("no accepted photon pairs")
    sel_l, sel_a = lh[mask], ext_h[mask]
    return AcceptedSet(
        heralded_interval=(float(sel_l.min()), float(sel_l.max())),
        heralded_angle_interval=(float(sel_a.min()), float(sel_a.max())),
        trigger_interval=(float(T[mask].min()), float(T[mask].max())),
        n_accepted=int(mask.sum()),
        heralded_in_window_fraction=float(her_ok.sum() / trig_ok.sum()),
    )


def raw_trigger_bandwidth(pump_nm: float, cut: CrystalCut, window: AcceptanceWindow,
                          sset: disp.SellmeierSet = disp.DEFAULT_SET, wavelength_range=(600.0, 1000.0),
                          n_samples: int = 4001) -> tuple[float, float]:
    """Extent of trigger wavelengths emitted inside ``window`` with no filter."""
    curve = tuning_curve(pump_nm, cut, wavelength_range, n_samples, sset)
    inside = window.contains(curve.external)
    if not inside.any():
        raise EmptyResultError("tuning curve never enters the acceptance window")
    return float(curve.signal[inside].min()), float(curve.signal[inside].max())
