"""Fiber-coupling acceptance geometry and interference-filter models."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import erf

from .errors import GeometryError

FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))


@dataclass(frozen=True)
class FilterSpec:
    """Interference filter passband.

    ``tilt_angle`` (degrees) shifts the passband toward shorter wavelengths
    through :func:`tilt_tuned_center`.
    """

    center_wavelength: float
    fwhm_bandwidth: float
    peak_transmission: float = 1.0
    shape: str = "top-hat"
    tilt_angle: float = 0.0
    effective_index: float = 2.0

    def __post_init__(self):
        if self.fwhm_bandwidth <= 0:
            raise ValueError("filter bandwidth must be positive")
        if not 0 < self.peak_transmission <= 1:
            raise ValueError("peak_transmission must lie in (0, 1]")
        if self.shape not in ("top-hat", "gaussian"):
            raise ValueError(f"unknown filter shape {self.shape!r}")
        if not 0 <= self.tilt_angle <= 45:
            raise ValueError("tilt_angle must lie in [0, 45] degrees")
        if self.effective_index <= 1:
            raise ValueError("effective_index must exceed 1")

    def with_tilt(self, tilt_deg: float) -> "FilterSpec":
        return FilterSpec(
            self.center_wavelength,
            self.fwhm_bandwidth,
            self.peak_transmission,
            self.shape,
            tilt_deg,
            self.effective_index,
        )


def tilt_tuned_center(filt: FilterSpec) -> float:
    """Passband center after tilting the filter away from normal incidence."""
    s = math.sin(math.radians(filt.tilt_angle))
    return filt.center_wavelength * math.sqrt(1.0 - s * s / filt.effective_index**2)


def filter_transmission(filt: FilterSpec, wavelength_nm):
    """Power transmission at the given wavelength(s)."""
    lam = np.asarray(wavelength_nm, dtype=float)
    center = tilt_tuned_center(filt)
    if filt.shape == "top-hat":
        inside = np.abs(lam - center) <= filt.fwhm_bandwidth / 2
        out = np.where(inside, filt.peak_transmission, 0.0)
    else:
        out = filt.peak_transmission * np.exp(-4 * math.log(2) * (lam - center) ** 2 / filt.fwhm_bandwidth**2)
    return float(out) if out.ndim == 0 else out


def cell_averaged_transmission(filt: FilterSpec, axis) -> np.ndarray:
    """Transmission averaged over the cells of a uniform wavelength axis.

    Summing the result times the step integrates the passband exactly for a
    top-hat, independent of where its edges fall relative to the samples.
    """
    axis = np.asarray(axis, dtype=float)
    step = axis[1] - axis[0]
    center = tilt_tuned_center(filt)
    lo, hi = axis - step / 2, axis + step / 2
    if filt.shape == "top-hat":
        a, b = center - filt.fwhm_bandwidth / 2, center + filt.fwhm_bandwidth / 2
        overlap = np.clip(np.minimum(hi, b) - np.maximum(lo, a), 0.0, None)
        return filt.peak_transmission * overlap / step
    s2 = filt.fwhm_bandwidth * FWHM_TO_SIGMA * math.sqrt(2)
    area = erf((hi - center) / s2) - erf((lo - center) / s2)
    return filt.peak_transmission * s2 * math.sqrt(math.pi) / 2 * area / step


@dataclass(frozen=True)
class CollectionGeometry:
    """Single-lens imaging of the pumped crystal region into a fiber."""

    lens_focal_length: float = 18.4  # mm
    crystal_to_lens_distance: float = 69.4  # cm
    fiber_mode_field_diameter: float = 5.0  # um
    pump_spot_diameter_at_crystal: float = 0.6  # mm
    wavelength: float = 780.0  # nm

    def __post_init__(self):
        for name in (
            "lens_focal_length",
            "crystal_to_lens_distance",
            "fiber_mode_field_diameter",
            "pump_spot_diameter_at_crystal",
            "wavelength",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class CrystalPlaneMode:
    """Fiber mode back-propagated to the crystal plane (lengths in um)."""

    q: complex  # complex beam parameter at the crystal
    waist_radius: float  # 1/e^2 intensity radius at the crystal
    fiber_to_lens: float  # fiber face to lens distance, um
    wavenumber: float  # rad/um


def back_propagate_mode(geom: CollectionGeometry) -> CrystalPlaneMode:
    """Place the fiber so its mode waist is imaged onto the crystal.

    The fiber-to-lens distance is found on the geometric-imaging branch
    (fiber offset from the focal plane larger than the fiber Rayleigh range).
    """
    lam = geom.wavelength * 1e-3
    f = geom.lens_focal_length * 1e3
    L = geom.crystal_to_lens_distance * 1e4
    w_f = geom.fiber_mode_field_diameter / 2
    z_r = math.pi * w_f**2 / lam
    if L <= f:
        raise GeometryError("crystal must sit beyond the lens focal length")

    def waist_distance(d):
        q1 = complex(d, z_r)
        q2 = 1.0 / (1.0 / q1 - 1.0 / f)
        return -q2.real

    lo, hi = f + z_r, 2 * f
    if not waist_distance(lo) > L > waist_distance(hi):
        raise GeometryError(
            f"no real back-propagated waist at {geom.crystal_to_lens_distance} cm "
            f"(reachable range {waist_distance(hi) / 1e4:.3g}-{waist_distance(lo) / 1e4:.3g} cm)"
        )
    d = brentq(lambda x: waist_distance(x) - L, lo, hi, xtol=1e-12, rtol=1e-15)
    q1 = complex(d, z_r)
    q2 = 1.0 / (1.0 / q1 - 1.0 / f)
    q_c = q2 + L
    w0 = math.sqrt(q_c.imag * lam / math.pi)
    return CrystalPlaneMode(q=q_c, waist_radius=w0, fiber_to_lens=d, wavenumber=2 * math.pi / lam)


def _overlap_exponent(geom: CollectionGeometry, mode: CrystalPlaneMode) -> float:
    # emitter exp(-x^2/w_p^2 + i kappa x) against conj of exp(-i k x^2 / (2 q))
    w_p = geom.pump_spot_diameter_at_crystal * 1e3 / 2
    a = 1.0 / w_p**2 + (1j * mode.wavenumber / (2 * mode.q)).conjugate()
    return (1.0 / a).real


def coupling_profile(geom: CollectionGeometry, angle_offset_deg):
    """Relative power overlap (unit peak) of a tilted plane-wave emitter.

    The emitter is the pump-spot envelope carrying a plane wave tilted by
    ``angle_offset_deg`` from the fiber-mode axis.
    """
    mode = back_propagate_mode(geom)
    kappa = mode.wavenumber * np.sin(np.radians(angle_offset_deg))
    out = np.exp(-(kappa**2) * _overlap_exponent(geom, mode) / 2)
    return float(out) if np.ndim(out) == 0 else out


def overlap_efficiency(geom: CollectionGeometry, angle_offset_deg: float) -> float:
    """Absolute normalized power overlap between emitter and back-propagated mode."""
    mode = back_propagate_mode(geom)
    w_p = geom.pump_spot_diameter_at_crystal * 1e3 / 2
    k = mode.wavenumber
    a = 1.0 / w_p**2 + (1j * k / (2 * mode.q)).conjugate()
    w_m2 = mode.waist_radius**2 * (1 + (mode.q.real / mode.q.imag) ** 2)
    # |int E M*|^2 / (int|E|^2 int|M|^2) for separable Gaussians, per transverse axis
    norm_e = math.pi * w_p**2 / 2
    norm_m = math.pi * w_m2 / 2
    peak = (math.pi / abs(a)) ** 2 / (norm_e * norm_m)
    return peak * coupling_profile(geom, angle_offset_deg)


def acceptance_angle(geom: CollectionGeometry) -> float:
    """Full angular width (degrees) where the coupling stays above 1/e^2 of peak."""
    mode = back_propagate_mode(geom)
    kappa = 2.0 / math.sqrt(_overlap_exponent(geom, mode))
    s = kappa / mode.wavenumber
    if s >= 1:
        raise GeometryError("acceptance exceeds the forward hemisphere")
    return 2 * math.degrees(math.asin(s))
