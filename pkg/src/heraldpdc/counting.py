"""Heralding-efficiency arithmetic and Monte Carlo trigger/coincidence counting."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import SuperUnityHeraldingError
from .optics import FilterSpec, cell_averaged_transmission
from .spectrum import Spectrum


@dataclass(frozen=True)
class LossBudget:
    """Ordered (label, transmission) pairs of the heralded-photon analysis zone."""

    entries: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        entries = tuple((str(label), float(t)) for label, t in self.entries)
        for label, t in entries:
            if not 0 < t <= 1:
                raise ValueError(f"transmission of {label!r} must lie in (0, 1], got {t}")
        object.__setattr__(self, "entries", entries)

    @property
    def product(self) -> float:
        return math.prod(t for _, t in self.entries)

    def without(self, *labels: str) -> "LossBudget":
        return LossBudget(tuple(e for e in self.entries if e[0] not in labels))


REFERENCE_BUDGET = LossBudget(
    (
        ("D2 quantum efficiency", 0.63),
        ("F2 transmission", 0.63),
        ("fiber B exit reflection", 0.96),
        ("L2' and L2'' AR surfaces", 0.98),
    )
)


def conditional_efficiency(coincidence_rate: float, trigger_rate: float) -> float:
    """eta_D = R_c / R_1."""
    if trigger_rate <= 0:
        raise ValueError("trigger rate must be positive")
    if coincidence_rate < 0 or coincidence_rate > trigger_rate:
        raise ValueError("coincidence rate must lie in [0, trigger rate]")
    return coincidence_rate / trigger_rate


def heralding_efficiency(eta_d: float, budget: LossBudget) -> float:
    """Correct a conditional detection efficiency for analysis-zone losses."""
    total = budget.product
    if eta_d > total:
        raise SuperUnityHeraldingError(
            f"eta_D = {eta_d} exceeds the budget transmission {total:.4g}; heralding efficiency would exceed 1"
        )
    return eta_d / total


@dataclass(frozen=True)
class EfficiencyPrediction:
    value: float
    spectral_acceptance: float  # fraction of the marginal passed by F2, peak-normalized
    formula: str = "coupling * F2.peak * integral(S * T_F2 / F2.peak) * prod(budget_nonfilter)"


def predicted_conditional_efficiency(marginal: Spectrum, f2: FilterSpec, budget_nonfilter: LossBudget,
                                     coupling: float, include_peak_transmission: bool = True) -> EfficiencyPrediction:
    """Conditional detection efficiency expected from a heralded spectrum.

    ``coupling`` is the probability the heralded photon is in fiber B (the
    heralding efficiency).  With ``include_peak_transmission`` the filter's
    peak loss multiplies in; otherwise only its spectral shape matters.
    """
    t = cell_averaged_transmission(f2, marginal.axis)
    acceptance = float(np.sum(marginal.values * t) * marginal.step / f2.peak_transmission)
    peak = f2.peak_transmission if include_peak_transmission else 1.0
    return EfficiencyPrediction(coupling * peak * acceptance * budget_nonfilter.product, acceptance)


@dataclass(frozen=True)
class SourceModel:
    repetition_rate: float = 76.0  # MHz
    pair_probability_per_pulse: float = 1.616e-4
    trigger_path_transmission: float = 0.25
    heralded_path_transmission: float = 0.3093
    dark_rate_per_detector: float = 0.0  # Hz
    coincidence_window: float = 5.0  # ns

    def __post_init__(self):
        for name in ("pair_probability_per_pulse", "trigger_path_transmission", "heralded_path_transmission"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.repetition_rate <= 0:
            raise ValueError("repetition_rate must be positive")
        if self.dark_rate_per_detector < 0:
            raise ValueError("dark rate must be non-negative")
        if self.coincidence_window <= 0:
            raise ValueError("coincidence_window must be positive")

    @property
    def pulse_period_ns(self) -> float:
        return 1e3 / self.repetition_rate


@dataclass(frozen=True)
class CountRecord:
    duration: float
    trigger_counts: int
    heralded_counts: int
    coincidences: int
    accidental_estimate: int
    seed: int
    n_pulses: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def trigger_rate(self) -> float:
        return self.trigger_counts / self.duration

    @property
    def coincidence_rate(self) -> float:
        return self.coincidences / self.duration

    def to_dict(self) -> dict:
        d = asdict(self)
        d["trigger_rate_hz"] = self.trigger_rate
        d["heralded_rate_hz"] = self.heralded_counts / self.duration
        d["coincidence_rate_hz"] = self.coincidence_rate
        return d


def _bernoulli_slots(rng: np.random.Generator, p: float, n: int) -> np.ndarray:
    """Indices of successes in n Bernoulli(p) trials, drawn via geometric gaps."""
    if p <= 0 or n <= 0:
        return np.empty(0, dtype=np.int64)
    chunks, last = [], -1
    expected = int(p * n + 6 * math.sqrt(p * n) + 16)
    while True:
        slots = last + np.cumsum(rng.geometric(p, size=expected))
        if slots[-1] >= n:
            chunks.append(slots[slots < n])
            break
        chunks.append(slots)
        last = int(slots[-1])
    return np.concatenate(chunks)


def _has_partner(x: np.ndarray, y: np.ndarray, half_window: float) -> np.ndarray:
    lo = np.searchsorted(y, x - half_window, side="left")
    hi = np.searchsorted(y, x + half_window, side="right")
    return hi > lo


def _match_count(a: np.ndarray, b: np.ndarray, half_window: float) -> int:
    # greedy one-to-one matching of two sorted time lists within +/- half_window;
    # events with nobody in reach cannot change the greedy pairing, so drop them first
    a, b = a[_has_partner(a, b, half_window)], b[_has_partner(b, a, half_window)]
    i = j = n = 0
    while i < a.size and j < b.size:
        d = a[i] - b[j]
        if d < -half_window:
            i += 1
        elif d > half_window:
            j += 1
        else:
            n += 1
            i += 1
            j += 1
    return n


def simulate_counts(model: SourceModel, duration: float, seed: int, accidental_shift_pulses: int = 10) -> CountRecord:
    """Monte Carlo count record for ``duration`` seconds of pulsed operation.

    Pairs are created per pulse with probability ``pair_probability_per_pulse``
    (at most one pair per pulse) and each photon survives its path
    independently.  Dark counts are homogeneous Poisson processes.  Times are
    in ns; photon clicks sit on the pulse grid.  Accidentals are estimated by
    repeating the coincidence count with the heralded detector delayed by
    ``accidental_shift_pulses`` pulse periods.
    """
    if duration <= 0:
        raise ValueError("duration must be positive")
    rng = np.random.default_rng(seed)
    period = model.pulse_period_ns
    n_pulses = int(round(duration * model.repetition_rate * 1e6))
    pairs = _bernoulli_slots(rng, model.pair_probability_per_pulse, n_pulses)
    trig = pairs[rng.random(pairs.size) < model.trigger_path_transmission]
    herald = pairs[rng.random(pairs.size) < model.heralded_path_transmission]

    span_ns = n_pulses * period

    def darks():
        k = rng.poisson(model.dark_rate_per_detector * duration)
        return rng.uniform(0.0, span_ns, size=k)

    t1 = np.sort(np.concatenate([trig * period, darks()]))
    t2 = np.sort(np.concatenate([herald * period, darks()]))
    half = model.coincidence_window / 2
    coinc = _match_count(t1, t2, half)
    accidental = _match_count(t1, t2 + accidental_shift_pulses * period, half)
    return CountRecord(
        duration=float(duration),
        trigger_counts=int(t1.size),
        heralded_counts=int(t2.size),
        coincidences=int(coinc),
        accidental_estimate=int(accidental),
        seed=int(seed),
        n_pulses=n_pulses,
    )
