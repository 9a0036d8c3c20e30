"""Two-photon joint spectrum and the heralded photon's spectral state.

The joint amplitude is

    f(l_t, l_h) = alpha(l_p) * sum_q sinc(dk_z L / 2) A(theta_t) A(theta_h) dq

with l_p fixed by energy conservation, q the transverse wavenumber shared
(with opposite sign) by the two photons, and A the amplitude coupling
profile of the collection fibers.  Summing over q projects the emission
onto the single-mode fibers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.special import erf

from . import dispersion as disp
from .errors import EmptyResultError
from .optics import (
    CollectionGeometry,
    FilterSpec,
    acceptance_angle,
    cell_averaged_transmission,
    coupling_profile,
    tilt_tuned_center,
)
from .phasematch import AcceptanceWindow, CrystalCut, ordinary_wavevector, pump_wavevector

TIME_BANDWIDTH_GAUSSIAN = 0.441


@dataclass(frozen=True)
class PumpPulse:
    center_wavelength: float = 390.0  # nm
    duration_fwhm: float = 150.0  # fs; math.inf gives a monochromatic pump
    repetition_rate: float = 76.0  # MHz
    average_power: float = 79.0  # mW
    chirp: str = "transform-limited"

    def __post_init__(self):
        for name in ("center_wavelength", "duration_fwhm", "repetition_rate", "average_power"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.chirp != "transform-limited":
            raise ValueError("only transform-limited pulses are modeled")

    @property
    def spectral_fwhm(self) -> float:
        """Intensity FWHM in nm of a transform-limited Gaussian pulse."""
        dt = self.duration_fwhm * 1e-15
        return TIME_BANDWIDTH_GAUSSIAN * (self.center_wavelength * 1e-9) ** 2 / (SPEED_OF_LIGHT * dt) * 1e9


def pump_spectral_amplitude(pulse: PumpPulse, wavelength_nm):
    """Unit-peak Gaussian field amplitude of the pump spectrum."""
    lam = np.asarray(wavelength_nm, dtype=float)
    if np.any(np.abs(lam - pulse.center_wavelength) > 10):
        raise ValueError("pump amplitude only defined within 10 nm of the center")
    w = pulse.spectral_fwhm
    if w == 0:
        out = (lam == pulse.center_wavelength).astype(float)
    else:
        out = np.exp(-2 * math.log(2) * (lam - pulse.center_wavelength) ** 2 / w**2)
    return float(out) if out.ndim == 0 else out


def _cell_averaged_pump_intensity(pulse: PumpPulse, lam_p, footprint):
    # average of the pump intensity over the pump-wavelength span of each grid cell;
    # keeps the monochromatic limit finite on a discrete grid
    x = lam_p - pulse.center_wavelength
    w = pulse.spectral_fwhm
    if w == 0:
        return np.where(np.abs(x) <= footprint / 2, 1.0 / footprint, 0.0)
    sigma = w / (2 * math.sqrt(2 * math.log(2)))
    s2 = sigma * math.sqrt(2)
    return sigma * math.sqrt(math.pi / 2) / footprint * (erf((x + footprint / 2) / s2) - erf((x - footprint / 2) / s2))


@dataclass(frozen=True)
class GridSpec:
    trigger_range: tuple[float, float] = (762.0, 798.0)
    heralded_range: tuple[float, float] = (762.0, 798.0)
    n_points: int = 361
    n_transverse: int = 61
    transverse_span: float = 3.5  # in units of the coupling half-width

    def scaled(self, factor: float) -> "GridSpec":
        return replace(
            self,
            n_points=int(round((self.n_points - 1) * factor)) + 1,
            n_transverse=int(round((self.n_transverse - 1) * factor)) + 1,
        )


@dataclass
class SpectralGrid:
    trigger_axis: np.ndarray
    heralded_axis: np.ndarray
    amplitude: np.ndarray  # indexed [trigger, heralded]
    norm: float  # integrated |f|^2 before normalization
    metadata: dict = field(default_factory=dict)

    @property
    def d_trigger(self) -> float:
        return float(self.trigger_axis[1] - self.trigger_axis[0])

    @property
    def d_heralded(self) -> float:
        return float(self.heralded_axis[1] - self.heralded_axis[0])

    def integrated_intensity(self) -> float:
        return float(np.sum(np.abs(self.amplitude) ** 2) * self.d_trigger * self.d_heralded)


@dataclass
class Spectrum:
    axis: np.ndarray
    values: np.ndarray

    @property
    def step(self) -> float:
        return float(self.axis[1] - self.axis[0])

    def integral(self) -> float:
        return float(np.sum(self.values) * self.step)

    def fwhm(self) -> float:
        return fwhm(self.axis, self.values)


@dataclass(frozen=True)
class SpectrometerTrace:
    tilt: np.ndarray  # degrees
    center: np.ndarray  # nm, tilt-tuned passband center
    rate: np.ndarray


@dataclass
class SpectralDensityOp:
    """Heralded-photon spectral state on a uniform axis.

    ``matrix`` is the discretized operator rho(l, l') * dl, so its plain
    matrix trace is one and its eigenvalues are occupation probabilities.
    """

    axis: np.ndarray
    matrix: np.ndarray
    purity: float

    @property
    def step(self) -> float:
        return float(self.axis[1] - self.axis[0])

    def diagonal_density(self) -> np.ndarray:
        return np.real(np.diag(self.matrix)) / self.step

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def filtered(self, filt: FilterSpec) -> "SpectralDensityOp":
        """State after a spectral filter, renormalized (post-selected on transmission)."""
        amp = np.sqrt(cell_averaged_transmission(filt, self.axis))
        rho = amp[:, None] * self.matrix * amp[None, :]
        tr = np.trace(rho).real
        if not tr > 0:
            raise EmptyResultError("filter blocks the heralded state")
        rho = rho / tr
        return SpectralDensityOp(self.axis.copy(), rho, float(np.real(np.sum(rho * rho.T))))


def _uniform_axis(lo, hi, n):
    if n < 3 or not hi > lo:
        raise ValueError(f"degenerate grid axis ({lo}, {hi}, {n})")
    return np.linspace(lo, hi, n)


def fwhm(x, y, mirrored: bool = False) -> float:
    """Full width at half maximum with linear interpolation of the crossings.

    Uses the outermost half-maximum crossings.  With ``mirrored`` the trace
    is one-sided, peaking at its last sample, and the width is twice the
    half width on the measured side.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i_pk = int(np.argmax(y))
    half = y[i_pk] / 2
    if half <= 0:
        raise EmptyResultError("trace has no positive peak")
    above = np.nonzero(y >= half)[0]
    i_lo, i_hi = above[0], above[-1]

    def cross(i0, i1):
        y0, y1 = y[i0], y[i1]
        return x[i0] + (half - y0) * (x[i1] - x[i0]) / (y1 - y0)

    left = cross(i_lo - 1, i_lo) if i_lo > 0 else x[0]
    if mirrored:
        return 2 * (x[i_pk] - left)
    right = cross(i_hi, i_hi + 1) if i_hi < len(x) - 1 else x[-1]
    return float(right - left)


def build_joint_spectrum(pulse: PumpPulse, cut: CrystalCut, window: AcceptanceWindow,
                         sset: disp.SellmeierSet = disp.DEFAULT_SET, grid_spec: GridSpec = GridSpec(),
                         geometry: CollectionGeometry = CollectionGeometry()) -> SpectralGrid:
    """Normalized joint spectral amplitude over (trigger, heralded) wavelengths."""
    lt = _uniform_axis(*grid_spec.trigger_range, grid_spec.n_points)
    lh = _uniform_axis(*grid_spec.heralded_range, grid_spec.n_points)
    d_t, d_h = lt[1] - lt[0], lh[1] - lh[0]
    length_um = cut.thickness * 1e3
    theta_c = math.radians(window.center_angle)

    # transverse wavenumber grid (rad/um) spanning the coupling profile at every wavelength
    half_acc = math.radians(acceptance_angle(geometry) / 2)
    span = grid_spec.transverse_span * half_acc
    lam_all = np.concatenate([lt, lh]) * 1e-3
    q_lo = np.min(2 * np.pi / lam_all * np.sin(theta_c - span))
    q_hi = np.max(2 * np.pi / lam_all * np.sin(theta_c + span))
    q = np.linspace(q_lo, q_hi, grid_spec.n_transverse)
    dq = q[1] - q[0]

    kt_all = ordinary_wavevector(lt, sset)
    kh_all = ordinary_wavevector(lh, sset)
    # amplitude coupling weight of each (wavelength, q) pair, unit peak
    ext_h = np.degrees(np.arcsin(np.outer(lh * 1e-3, q) / (2 * np.pi)))
    amp_h = np.sqrt(coupling_profile(geometry, ext_h - window.center_angle))
    ext_t = np.degrees(np.arcsin(np.outer(lt * 1e-3, q) / (2 * np.pi)))
    amp_t = np.sqrt(coupling_profile(geometry, ext_t - window.center_angle))
    kz_h = np.sqrt(kh_all[:, None] ** 2 - q[None, :] ** 2)

    amp = np.empty((lt.size, lh.size))
    for i, lam_t in enumerate(lt):
        lam_p = 1.0 / (1.0 / lam_t + 1.0 / lh)
        footprint = lam_p**2 * (d_t / lam_t**2 + d_h / lh**2)
        pump = np.sqrt(np.clip(_cell_averaged_pump_intensity(pulse, lam_p, footprint), 0, None))
        kp = pump_wavevector(lam_p, cut, sset)
        kz_t = np.sqrt(kt_all[i] ** 2 - q**2)
        dkz = kp[:, None] - kz_t[None, :] - kz_h
        pm = np.sinc(dkz * length_um / (2 * np.pi))
        amp[i] = pump * np.sum(pm * amp_t[i][None, :] * amp_h, axis=1) * dq

    norm = float(np.sum(amp**2) * d_t * d_h)
    if not norm > 0:
        raise EmptyResultError("joint spectrum vanishes on this grid")
    amp = amp / math.sqrt(norm)
    meta = {
        "sellmeier_set": sset.id,
        "cut_angle_deg": cut.cut_angle,
        "pump_fwhm_nm": pulse.spectral_fwhm,
        "n_points": grid_spec.n_points,
        "n_transverse": grid_spec.n_transverse,
    }
    return SpectralGrid(lt, lh, amp.astype(complex), norm, meta)


def _filtered_weights(grid: SpectralGrid, trigger_filter: FilterSpec | None):
    if trigger_filter is None:  # unfiltered trigger
        return np.ones_like(grid.trigger_axis)
    w = cell_averaged_transmission(trigger_filter, grid.trigger_axis)
    if not np.any(w > 0):
        raise EmptyResultError("trigger filter does not overlap the grid")
    return w


def heralded_marginal(grid: SpectralGrid, trigger_filter: FilterSpec | None) -> Spectrum:
    """Heralded spectrum given a trigger passing ``trigger_filter``; unit integral."""
    w = _filtered_weights(grid, trigger_filter)
    s = np.einsum("t,th->h", w, np.abs(grid.amplitude) ** 2) * grid.d_trigger
    total = np.sum(s) * grid.d_heralded
    if not total > 0:
        raise EmptyResultError("trigger filter misses the joint-spectrum support")
    return Spectrum(grid.heralded_axis.copy(), s / total)


def spectrometer_scan(marginal: Spectrum, scan_filter: FilterSpec, tilt_range=(0.0, 30.0),
                      n_steps: int = 61) -> SpectrometerTrace:
    """Transmitted rate through a tilt-tuned filter at each tilt step."""
    if n_steps < 1:
        raise EmptyResultError("empty spectrometer scan")
    tilts = np.linspace(tilt_range[0], tilt_range[1], n_steps)
    centers, rates = [], []
    for tilt in tilts:
        f = scan_filter.with_tilt(float(tilt))
        centers.append(tilt_tuned_center(f))
        rates.append(np.sum(marginal.values * cell_averaged_transmission(f, marginal.axis)) * marginal.step)
    order = np.argsort(centers)
    return SpectrometerTrace(tilts[order], np.asarray(centers)[order], np.asarray(rates)[order])


def heralded_density_op(grid: SpectralGrid, trigger_filter: FilterSpec | None) -> SpectralDensityOp:
    """Reduced spectral density operator of the heralded photon."""
    w = _filtered_weights(grid, trigger_filter)
    f = grid.amplitude
    rho = (f.T * w) @ f.conj() * grid.d_trigger * grid.d_heralded
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if not tr > 0:
        raise EmptyResultError("heralded state has zero trace")
    rho = rho / tr
    purity = float(np.real(np.sum(rho * rho.T)))
    return SpectralDensityOp(grid.heralded_axis.copy(), rho, purity)
