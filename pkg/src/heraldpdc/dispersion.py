"""Sellmeier dispersion for negative uniaxial BBO.

All public functions take vacuum wavelengths in nm; the Sellmeier
polynomials themselves are written for micrometers.

    n^2 = A + B / (lambda^2 - C) - D * lambda^2
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfRangeError


@dataclass(frozen=True)
class SellmeierSet:
    """Named pair of four-term Sellmeier coefficient tuples (A, B, C, D)."""

    id: str
    coeffs_ordinary: tuple[float, float, float, float]
    coeffs_extraordinary: tuple[float, float, float, float]
    valid_range: tuple[float, float] = (200.0, 1100.0)

    def __post_init__(self):
        object.__setattr__(self, "coeffs_ordinary", tuple(float(c) for c in self.coeffs_ordinary))
        object.__setattr__(self, "coeffs_extraordinary", tuple(float(c) for c in self.coeffs_extraordinary))
        object.__setattr__(self, "valid_range", tuple(float(v) for v in self.valid_range))
        if len(self.coeffs_ordinary) != 4 or len(self.coeffs_extraordinary) != 4:
            raise ValueError("Sellmeier sets need exactly four coefficients per axis")
        lo, hi = self.valid_range
        if not 0 < lo < hi:
            raise ValueError(f"bad valid_range {self.valid_range}")


# D. Eimerl et al., J. Appl. Phys. 62, 1968 (1987)
EIMERL_1987 = SellmeierSet(
    id="eimerl1987",
    coeffs_ordinary=(2.7405, 0.0184, 0.0179, 0.0155),
    coeffs_extraordinary=(2.3730, 0.0128, 0.0156, 0.0044),
)

# K. Kato, IEEE J. Quantum Electron. 22, 1013 (1986)
KATO_1986 = SellmeierSet(
    id="kato1986",
    coeffs_ordinary=(2.7359, 0.01878, 0.01822, 0.01354),
    coeffs_extraordinary=(2.3753, 0.01224, 0.01667, 0.01516),
)

BUILTIN_SETS = {s.id: s for s in (EIMERL_1987, KATO_1986)}
DEFAULT_SET = EIMERL_1987


def get_set(set_id: str) -> SellmeierSet:
    try:
        return BUILTIN_SETS[set_id]
    except KeyError:
        raise KeyError(f"unknown Sellmeier set {set_id!r}; known: {sorted(BUILTIN_SETS)}") from None


def _check_range(sset: SellmeierSet, wavelength_nm):
    lam = np.asarray(wavelength_nm, dtype=float)
    lo, hi = sset.valid_range
    if np.any(~np.isfinite(lam)) or np.any(lam < lo) or np.any(lam > hi):
        raise OutOfRangeError(
            f"wavelength {wavelength_nm} nm outside valid range [{lo}, {hi}] nm of set {sset.id!r}"
        )
    return lam


def _sellmeier(coeffs, lam_nm):
    a, b, c, d = coeffs
    l2 = (lam_nm * 1e-3) ** 2
    return np.sqrt(a + b / (l2 - c) - d * l2)


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def index_ordinary(sset: SellmeierSet, wavelength_nm):
    """Ordinary index n_o at the given vacuum wavelength(s) in nm."""
    lam = _check_range(sset, wavelength_nm)
    return _scalar_or_array(_sellmeier(sset.coeffs_ordinary, lam))


def principal_extraordinary(sset: SellmeierSet, wavelength_nm):
    """Principal extraordinary index n_e (propagation normal to the optic axis)."""
    lam = _check_range(sset, wavelength_nm)
    return _scalar_or_array(_sellmeier(sset.coeffs_extraordinary, lam))


def index_extraordinary(sset: SellmeierSet, wavelength_nm, theta_rad):
    """Extraordinary-wave index at angle ``theta_rad`` from the optic axis.

    Uses the index ellipse 1/n^2 = cos^2/n_o^2 + sin^2/n_e^2, so theta = 0
    returns n_o and theta = pi/2 returns n_e.
    """
    theta = np.asarray(theta_rad, dtype=float)
    if np.any(theta < 0) or np.any(theta > np.pi / 2 + 1e-15):
        raise ValueError(f"propagation angle {theta_rad} rad outside [0, pi/2]")
    lam = _check_range(sset, wavelength_nm)
    no = _sellmeier(sset.coeffs_ordinary, lam)
    ne = _sellmeier(sset.coeffs_extraordinary, lam)
    inv2 = np.cos(theta) ** 2 / no**2 + np.sin(theta) ** 2 / ne**2
    return _scalar_or_array(1.0 / np.sqrt(inv2))
