"""Two-photon interference dips and their Gaussian fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.optimize import least_squares

from .errors import EmptyResultError, FitError
from .optics import FilterSpec, cell_averaged_transmission
from .spectrum import SpectralDensityOp, SpectralGrid, Spectrum

# rad/fs per 1/nm
_OMEGA_PER_INV_NM = 2 * math.pi * SPEED_OF_LIGHT * 1e9 * 1e-15


@dataclass
class DipTrace:
    delays: np.ndarray
    counts: np.ndarray
    bin_duration: float  # s
    kind: str  # "hom-twofold" or "rt-threefold"
    unit: str = "fs"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.delays = np.asarray(self.delays, dtype=float)
        self.counts = np.asarray(self.counts, dtype=float)
        if self.delays.shape != self.counts.shape:
            raise ValueError("delays and counts differ in length")
        if np.any(np.diff(self.delays) <= 0):
            raise ValueError("delays must be strictly increasing")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")
        if self.kind not in ("hom-twofold", "rt-threefold"):
            raise ValueError(f"unknown dip kind {self.kind!r}")

    def in_micrometers(self) -> "DipTrace":
        if self.unit == "um":
            return self
        scale = SPEED_OF_LIGHT * 1e-15 * 1e6
        return DipTrace(self.delays * scale, self.counts.copy(), self.bin_duration, self.kind, "um", dict(self.metadata))


@dataclass(frozen=True)
class DipFit:
    visibility: float
    center: float
    width: float  # Gaussian sigma
    baseline: float
    residual_norm: float
    width_identified: bool = True


def _angular_frequency(axis_nm):
    return _OMEGA_PER_INV_NM / np.asarray(axis_nm, dtype=float)


def hom_coincidence_probability(grid: SpectralGrid, f2: FilterSpec, f3: FilterSpec, delays_fs) -> np.ndarray:
    """Coincidence probability behind a lossless 50/50 splitter versus delay."""
    if not np.allclose(grid.trigger_axis, grid.heralded_axis):
        raise ValueError("HOM needs identical trigger and heralded axes")
    t2 = cell_averaged_transmission(f2, grid.trigger_axis)
    t3 = cell_averaged_transmission(f3, grid.heralded_axis)
    g = grid.amplitude * np.sqrt(np.outer(t2, t3))
    norm = np.sum(np.abs(g) ** 2)
    if not norm > 0:
        raise EmptyResultError("filtered two-photon amplitude vanishes")
    w = _angular_frequency(grid.trigger_axis)
    kernel = (g * g.T.conj()).ravel()
    dw = (w[:, None] - w[None, :]).ravel()
    keep = kernel != 0
    kernel, dw = kernel[keep], dw[keep]
    delays = np.atleast_1d(np.asarray(delays_fs, dtype=float))
    out = np.empty(delays.size)
    for i, tau in enumerate(delays):
        out[i] = 0.5 * (1.0 - np.real(np.sum(kernel * np.exp(1j * dw * tau))) / norm)
    return np.clip(out, 0.0, None)  # rounding can leave -1e-16 at a perfect dip


def hom_dip(grid: SpectralGrid, f2: FilterSpec, f3: FilterSpec, delays_fs, pair_rate: float = 1.0,
            bin_duration: float = 1.0) -> DipTrace:
    """Expected two-fold coincidence counts per bin versus relative delay (fs)."""
    p = hom_coincidence_probability(grid, f2, f3, delays_fs)
    meta = {"pair_rate_hz": pair_rate, "f2": f2.fwhm_bandwidth, "f3": f3.fwhm_bandwidth}
    return DipTrace(np.asarray(delays_fs, float), pair_rate * bin_duration * p, bin_duration, "hom-twofold", "fs", meta)


def coherent_mode(axis_nm, center_nm: float = 780.0, duration_fs: float = 150.0,
                  f3: FilterSpec | None = None) -> Spectrum:
    """Unit-norm spectral amplitude of a transform-limited weak pulse after F3.

    Returned values are amplitudes phi(l) with sum |phi|^2 dl = 1.
    """
    axis = np.asarray(axis_nm, dtype=float)
    fwhm_nm = 0.441 * (center_nm * 1e-9) ** 2 / (SPEED_OF_LIGHT * duration_fs * 1e-15) * 1e9
    amp = np.exp(-2 * math.log(2) * (axis - center_nm) ** 2 / fwhm_nm**2)
    if f3 is not None:
        amp = amp * np.sqrt(cell_averaged_transmission(f3, axis))
    step = axis[1] - axis[0]
    norm = math.sqrt(np.sum(np.abs(amp) ** 2) * step)
    if not norm > 0:
        raise EmptyResultError("coherent mode vanishes on this axis")
    return Spectrum(axis, (amp / norm).astype(complex))


def spectral_overlap(rho: SpectralDensityOp, mode: Spectrum, delays_fs=(0.0,)) -> np.ndarray:
    """<phi_tau| rho |phi_tau> for the delayed mode phi_tau = phi * exp(i w tau)."""
    if not np.allclose(rho.axis, mode.axis):
        raise ValueError("mode and density operator use different axes")
    vec = mode.values * math.sqrt(rho.step)
    w = _angular_frequency(rho.axis)
    out = []
    for tau in np.atleast_1d(np.asarray(delays_fs, dtype=float)):
        v = vec * np.exp(1j * w * tau)
        out.append(np.real(v.conj() @ rho.matrix @ v))
    return np.asarray(out)


def calibrate_mode_overlap(rho: SpectralDensityOp, mode: Spectrum, target_visibility: float) -> float:
    """Residual overlap factor that makes the zero-delay RT visibility hit the target."""
    s = float(spectral_overlap(rho, mode, [0.0])[0])
    return target_visibility / s


def rt_dip(rho: SpectralDensityOp, mode: Spectrum, mean_photon_number: float, mode_overlap_factor: float,
           delays_fs, baseline_rate: float = 1.0, bin_duration: float = 1.0) -> DipTrace:
    """Three-fold counts of a heralded photon meeting a weak coherent pulse.

    Counts are ``baseline_rate * bin_duration * (1 - V(tau))`` with
    V(tau) = mode_overlap_factor * <phi_tau|rho|phi_tau>; two-photon terms of
    the coherent pulse are dropped.
    """
    if not 0 < mean_photon_number <= 0.1:
        raise ValueError("mean photon number outside the weak-field bound (0, 0.1]")
    vis = mode_overlap_factor * spectral_overlap(rho, mode, delays_fs)
    meta = {"mean_photon_number": mean_photon_number, "mode_overlap_factor": mode_overlap_factor,
            "visibility_at_zero": float(mode_overlap_factor * spectral_overlap(rho, mode, [0.0])[0])}
    counts = baseline_rate * bin_duration * np.clip(1.0 - vis, 0.0, None)
    return DipTrace(np.asarray(delays_fs, float), counts, bin_duration, "rt-threefold", "fs", meta)


def gaussian_dip(tau, baseline, visibility, center, sigma):
    return baseline * (1.0 - visibility * np.exp(-((tau - center) ** 2) / (2 * sigma**2)))


def _dip_jacobian(tau, p):
    base, vis, center, sigma = p
    g = np.exp(-((tau - center) ** 2) / (2 * sigma**2))
    u = tau - center
    return np.column_stack([1 - vis * g, -base * g, -base * vis * g * u / sigma**2, -base * vis * g * u**2 / sigma**3])


def _gauss_newton_polish(tau, y, p, lower, upper, steps=6):
    # the cost is flat to rounding near the optimum; Newton steps on the gradient
    # pin the minimizer down far below the trust-region stopping point
    for _ in range(steps):
        r = gaussian_dip(tau, *p) - y
        step = np.linalg.lstsq(_dip_jacobian(tau, p), -r, rcond=None)[0]
        trial = p + step
        if np.any(trial <= lower) or np.any(trial >= upper):
            break
        p = trial
        if np.max(np.abs(step) / np.maximum(np.abs(p), 1e-300)) < 1e-14:
            break
    return p


def _initial_guess(x, y):
    n = x.size
    dec = max(1, n // 10)
    base = 0.5 * (y[:dec].mean() + y[-dec:].mean())
    i_min = int(np.argmin(y))
    vis = min(max(1.0 - y[i_min] / base, 0.0), 1.0)
    # half-width at half-depth
    level = base * (1.0 - vis / 2)
    below = np.nonzero(y <= level)[0]
    hw = 0.5 * (x[below[-1]] - x[below[0]]) if below.size > 1 else (x[1] - x[0])
    hw = max(hw, x[1] - x[0])
    return base, vis, x[i_min], hw / math.sqrt(2 * math.log(2))


def fit_gaussian_dip(trace: DipTrace, max_nfev: int = 2000) -> DipFit:
    """Least-squares fit of B * (1 - V exp(-(tau - tau0)^2 / (2 sigma^2)))."""
    x, y = trace.delays, trace.counts
    if x.size < 7:
        raise FitError("need at least 7 delay samples")
    dec = max(1, x.size // 10)
    head, tail = y[:dec].mean(), y[-dec:].mean()
    if max(head, tail) <= 0 or abs(head - tail) > 0.1 * max(head, tail):
        raise FitError("dip wings missing or unbalanced")
    b0, v0, c0, s0 = _initial_guess(x, y)
    # fit the baseline-normalized trace so the result is invariant under count rescaling
    yn = y / b0
    span = x[-1] - x[0]
    lower = np.array([0.0, 0.0, x[0], 1e-6 * span])
    upper = np.array([np.inf, 1.0, x[-1], span])
    res = least_squares(
        lambda p: gaussian_dip(x, p[0], p[1], p[2], p[3]) - yn,
        x0=[1.0, v0, c0, s0],
        jac=lambda p: _dip_jacobian(x, p),
        bounds=(lower, upper),
        xtol=1e-12,
        ftol=1e-12,
        gtol=1e-12,
        max_nfev=max_nfev,
    )
    if res.status <= 0:
        raise FitError(f"dip fit did not converge: {res.message}")
    p = _gauss_newton_polish(x, yn, res.x, lower, upper)
    base, vis, center, sigma = p
    fun = gaussian_dip(x, *p) - yn
    resid = float(np.linalg.norm(fun) / np.linalg.norm(yn))
    noise = float(np.std(fun)) / base if base > 0 else math.inf
    identified = vis > 3 * noise and vis > 1e-3
    return DipFit(float(vis), float(center), float(sigma), float(base * b0), resid, bool(identified))
