"""Coherent pulse-train optics on a sampled complex envelope.

Units and conventions
---------------------
Time is in picoseconds, wavelengths in micrometers, and "energy" means
``sum(|A|^2) * dt`` in envelope units.  The physical field is
``Re{A(t) exp(i w0 t)}`` for a carrier frequency ``w0``; the envelope
``A(t)`` is what we sample.  Delaying the physical field by ``tau``
therefore maps the envelope as

    A(t) -> A(t - tau) * exp(-i w0 tau)

which is how sub-wavelength delay changes flip a combination between
constructive and destructive without the grid ever resolving the carrier.

The carrier is snapped to an exact harmonic of the repetition period
(``w0 = 2 pi m / period`` with ``m = round(c * period / wavelength)``), i.e.
a zero carrier-envelope-offset comb.  With that choice a delay of exactly
``2**(k-1) * period`` at stage ``k`` is phase-neutral, so the nominal
stacking delays are true optima rather than merely near-optimal.

Pairwise combination is modeled per stage as a delay line plus a 50/50
combiner: the earlier pulse of each adjacent pair is routed into the delayed
arm, the later pulse into the direct arm, and the two arms are summed with a
``1/sqrt(2)`` combiner amplitude.  Energy is conserved for disjoint arms and
at most doubled per stage for perfectly overlapping ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, DelayRangeError

__all__ = [
    "C_UM_PER_PS",
    "StackConfig",
    "FieldGrid",
    "make_pulse_train",
    "apply_delay",
    "stack_stage",
    "stack_all",
    "pulse_energy",
    "energy_in_window",
    "optimal_delays",
    "single_pulse_energy",
    "reference_energies",
]

# Vacuum speed of light in micrometers per picosecond.
C_UM_PER_PS = 299.792458

# Energy fraction (per side) ignored when locating the occupied part of a
# grid.  A quantile, not an amplitude cut: it stays meaningful for nearly
# extinguished fields whose peak is comparable to FFT round-off ripple.
_SUPPORT_ENERGY_EPS = 1e-10


@dataclass(frozen=True)
class StackConfig:
    """Geometry and optics of an n-stage pulse stacker.

    Parameters
    ----------
    n_stages:
        Number of pairwise combination stages; the input train holds
        ``2**n_stages`` pulses.
    period:
        Pulse repetition period in ps.
    pulse_fwhm:
        Intensity FWHM of the Gaussian input pulses in ps.
    carrier_wavelength:
        Nominal carrier wavelength in um.  The actual carrier is the
        closest exact harmonic of ``1/period`` (zero-offset comb).
    grid_dt:
        Envelope sample spacing in ps.
    grid_len:
        Number of grid samples, or None to auto-size to the next power of
        two that fits the train plus guard bands.
    combiner_loss:
        Fractional amplitude loss per combination stage, in [0, 1).
    """

    n_stages: int
    period: float = 10.0
    pulse_fwhm: float = 0.5
    carrier_wavelength: float = 1.03
    grid_dt: float = 0.05
    grid_len: int | None = None
    combiner_loss: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.n_stages, int) or self.n_stages < 1:
            raise ConfigurationError(
                f"n_stages must be a positive integer, got {self.n_stages!r}"
            )
        for name in ("period", "pulse_fwhm", "carrier_wavelength", "grid_dt"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be a positive number, got {value!r}")
        if not 0.0 <= self.combiner_loss < 1.0:
            raise ConfigurationError(
                f"combiner_loss must lie in [0, 1), got {self.combiner_loss!r}"
            )
        if self.grid_dt >= self.pulse_fwhm / 4:
            raise ConfigurationError(
                f"grid_dt={self.grid_dt} undersamples pulses of fwhm={self.pulse_fwhm};"
                f" need grid_dt < fwhm/4"
            )
        if self.carrier_cycles_per_period < 1:
            raise ConfigurationError(
                "period shorter than one carrier cycle; increase period or wavelength"
            )
        if self.grid_len is None:
            object.__setattr__(self, "grid_len", _next_pow2(self.min_grid_len))
        elif not isinstance(self.grid_len, int) or self.grid_len < self.min_grid_len:
            raise ConfigurationError(
                f"grid_len={self.grid_len!r} cannot hold the pulse train with guard"
                f" bands; need at least {self.min_grid_len} samples"
            )

    # -- derived carrier quantities -------------------------------------

    @property
    def carrier_cycles_per_period(self) -> int:
        """Integer number of carrier cycles per repetition period."""
        return round(C_UM_PER_PS * self.period / self.carrier_wavelength)

    @property
    def carrier_freq(self) -> float:
        """Angular carrier frequency in rad/ps, snapped to the period comb."""
        return 2.0 * math.pi * self.carrier_cycles_per_period / self.period

    @property
    def fringe_delay(self) -> float:
        """Delay change per full interference fringe (one carrier cycle), ps."""
        return self.period / self.carrier_cycles_per_period

    # -- window geometry --------------------------------------------------

    @property
    def n_pulses(self) -> int:
        return 2 ** self.n_stages

    @property
    def guard(self) -> float:
        """Width of the empty guard band kept at each window edge, ps."""
        return 4.0 * self.pulse_fwhm

    @property
    def slack(self) -> float:
        """Extra interior room beyond the nominal train for off-nominal delays."""
        return self.period * (1.0 + self.n_stages / 2.0)

    @property
    def window_start(self) -> float:
        return -(self.guard + self.slack)

    @property
    def min_grid_len(self) -> int:
        span = (self.n_pulses - 1) * self.period + 2.0 * (self.guard + self.slack)
        return int(math.ceil(span / self.grid_dt)) + 1

    def times(self) -> np.ndarray:
        """Sample times of the grid, ps."""
        return self.window_start + self.grid_dt * np.arange(self.grid_len)


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1)).bit_length()


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """A complex envelope sampled on a uniform time grid.

    Attributes
    ----------
    samples:
        Complex envelope values, shape (grid_len,).
    t0:
        Time of the first sample, ps.
    dt:
        Sample spacing, ps.
    carrier_freq:
        Angular carrier frequency in rad/ps used for delay phase.
    guard:
        Width of the guard band at each window edge that must stay empty, ps.
    """

    samples: np.ndarray
    t0: float
    dt: float
    carrier_freq: float
    guard: float

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 1 or samples.size == 0:
            raise ConfigurationError("samples must be a non-empty 1-d array")
        object.__setattr__(self, "samples", samples)
        if not (self.dt > 0 and math.isfinite(self.dt) and math.isfinite(self.t0)):
            raise ConfigurationError("t0 must be finite and dt positive")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)

    @property
    def t_end(self) -> float:
        """Time just past the last sample (each sample owns one dt of width)."""
        return self.t0 + self.dt * self.samples.size


def make_pulse_train(config: StackConfig) -> FieldGrid:
    """Build the input train of ``2**n_stages`` unit-amplitude Gaussian pulses.

    Pulse ``i`` is centered at ``i * period``.  All pulses are mutually
    coherent with zero relative carrier phase (zero-offset comb), so the
    envelope of each is the same real Gaussian.
    """
    t = config.times()
    w = config.pulse_fwhm
    envelope = np.zeros(t.size, dtype=np.complex128)
    for i in range(config.n_pulses):
        envelope += np.exp(-2.0 * math.log(2.0) * ((t - i * config.period) / w) ** 2)
    return FieldGrid(
        samples=envelope,
        t0=config.window_start,
        dt=config.grid_dt,
        carrier_freq=config.carrier_freq,
        guard=config.guard,
    )


def _support_bounds(field: FieldGrid) -> tuple[float, float] | None:
    """Time span holding all but a 1e-10 energy fraction per side.

    Returns None for an identically zero field.
    """
    absq = np.abs(field.samples) ** 2
    cum = np.cumsum(absq)
    total = cum[-1]
    if total == 0.0:
        return None
    eps = _SUPPORT_ENERGY_EPS * total
    lo_idx = int(np.searchsorted(cum, eps, side="right"))
    hi_idx = int(np.searchsorted(cum, total - eps, side="left"))
    return field.t0 + field.dt * lo_idx, field.t0 + field.dt * hi_idx


def apply_delay(field: FieldGrid, tau: float) -> FieldGrid:
    """Delay a field by ``tau`` ps: envelope shift plus carrier phase.

    The shift is applied in the spectral domain (exact linear phase), so
    ``tau`` is not restricted to grid multiples.  Raises
    :class:`DelayRangeError` if the shifted content would leave the interior
    of the window, i.e. enter a guard band or wrap circularly.
    """
    if not math.isfinite(tau):
        raise DelayRangeError(f"delay must be finite, got {tau!r}")
    if tau == 0.0:
        return field
    bounds = _support_bounds(field)
    if bounds is not None:
        lo, hi = bounds
        interior_lo = field.t0 + field.guard
        interior_hi = field.t_end - field.guard
        # half-sample tolerance: support indices are quantized to the grid
        tol = 0.5 * field.dt
        if lo + tau < interior_lo - tol or hi + tau > interior_hi + tol:
            max_neg = lo - interior_lo
            max_pos = interior_hi - hi
            raise DelayRangeError(
                f"delay {tau:+.6g} ps moves energy outside the sampled window;"
                f" this field admits delays in [{-max_neg:.6g}, {max_pos:.6g}] ps"
            )
    freqs = np.fft.fftfreq(field.samples.size, d=field.dt)
    spectrum = np.fft.fft(field.samples)
    shifted = np.fft.ifft(spectrum * np.exp(-2j * math.pi * freqs * tau))
    shifted *= np.exp(-1j * field.carrier_freq * tau)
    return replace(field, samples=shifted)


def _pair_masks(config: StackConfig, times: np.ndarray, stage: int) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks selecting the earlier/later member of each stage pair.

    Before stage ``k`` the (nominal) surviving pulses sit on a grid of
    pitch ``2**(k-1) * period``; each sample is attributed to the nearest
    nominal slot and slots alternate earlier/later within their pair.
    """
    pitch = 2 ** (stage - 1) * config.period
    # nominal survivors before stage k sit at (j + 1) * pitch - period,
    # j = 0, 1, ...; recover j by rounding and pair them up by parity
    slot = np.floor((times + config.period) / pitch - 0.5).astype(np.int64)
    early = slot % 2 == 0
    return early, ~early


def stack_stage(field: FieldGrid, config: StackConfig, stage: int, tau: float) -> FieldGrid:
    """Apply one combination stage: delay the earlier half of each pair by
    ``tau`` and sum it with the later half through a 50/50 combiner.

    ``stage`` is 1-based.  The nominal (phase-neutral, fully overlapping)
    delay for stage ``k`` is ``2**(k-1) * period``.
    """
    if not 1 <= stage <= config.n_stages:
        raise ConfigurationError(
            f"stage must be in 1..{config.n_stages}, got {stage}"
        )
    early, late = _pair_masks(config, field.times, stage)
    early_arm = replace(field, samples=np.where(early, field.samples, 0.0))
    late_arm = np.where(late, field.samples, 0.0)
    delayed = apply_delay(early_arm, tau)
    gain = (1.0 - config.combiner_loss) / math.sqrt(2.0)
    return replace(field, samples=(delayed.samples + late_arm) * gain)


def stack_all(field: FieldGrid, config: StackConfig, taus: np.ndarray) -> FieldGrid:
    """Run all ``n_stages`` combination stages with per-stage delays ``taus``."""
    taus = np.asarray(taus, dtype=np.float64)
    if taus.shape != (config.n_stages,):
        raise ConfigurationError(
            f"taus must have shape ({config.n_stages},), got {taus.shape}"
        )
    out = field
    for k in range(1, config.n_stages + 1):
        out = stack_stage(out, config, k, float(taus[k - 1]))
    return out


def pulse_energy(field: FieldGrid) -> float:
    """Total envelope energy ``sum(|A|^2) * dt``."""
    return float(np.sum(np.abs(field.samples) ** 2) * field.dt)


def energy_in_window(field: FieldGrid, lo: float, hi: float) -> float:
    """Envelope energy carried by samples with ``lo <= t < hi``."""
    t = field.times
    mask = (t >= lo) & (t < hi)
    return float(np.sum(np.abs(field.samples[mask]) ** 2) * field.dt)


def optimal_delays(config: StackConfig) -> np.ndarray:
    """Nominal stacking delays ``[period, 2*period, ..., 2**(n-1)*period]``."""
    return config.period * 2.0 ** np.arange(config.n_stages)


def single_pulse_energy(config: StackConfig) -> float:
    """Energy of one input pulse, integrated on the configured grid."""
    t = config.times()
    pulse = np.exp(-2.0 * math.log(2.0) * (t / config.pulse_fwhm) ** 2)
    return float(np.sum(pulse**2) * config.grid_dt)


def reference_energies(config: StackConfig) -> tuple[float, float]:
    """Return ``(p_max, p_min)`` for reward normalization.

    ``p_max`` is measured by actually stacking at the nominal delays rather
    than assumed from the ideal ``2**n`` multiplication, so combiner loss
    and finite sampling are automatically accounted for.  ``p_min`` is zero:
    output energy in the stacked slot can be fully extinguished.
    """
    stacked = stack_all(make_pulse_train(config), config, optimal_delays(config))
    return pulse_energy(stacked), 0.0
