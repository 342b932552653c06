"""Synthetic oscillatory signals with known ground truth.

Components have smoothed-Brownian instantaneous frequency and amplitude
(a Brownian path convolved with a Gaussian kernel, then normalized so
the per-sample rate stays within fixed algebraic bounds), optional
activity masks, a zero-mean trend built the same way as the amplitude,
and white noise scaled to a target SNR.  Everything is deterministic
given a seed and the truth series are retained for testing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .stats import snr_db

__all__ = [
    "Component",
    "SyntheticSignal",
    "smoothed_brownian",
    "phase_from",
    "amplitude_from",
    "compose",
    "two_component_signal",
]

# kernel widths (s) for the phase and amplitude paths; chosen so the
# instantaneous frequency wanders slowly over tens of seconds
SIGMA_PHASE = 1.5
SIGMA_AM = 3.0


def smoothed_brownian(num, dt, sigma, seed):
    """Brownian path convolved with a Gaussian kernel of std ``sigma`` (s).

    The kernel is truncated at +-4 sigma; the path is extended before
    convolution so all ``num`` output samples use full kernel support.
    Deterministic under ``seed`` (an int or a Generator).
    """
    if num <= 1 or sigma <= 0.0 or dt <= 0.0:
        raise ValueError("need num > 1, sigma > 0, dt > 0")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pad = int(math.ceil(4.0 * sigma / dt))
    steps = rng.normal(0.0, math.sqrt(dt), num + 2 * pad)
    path = np.cumsum(steps)
    tau = (np.arange(-pad, pad + 1)) * dt
    kernel = np.exp(-0.5 * (tau / sigma) ** 2)
    kernel /= kernel.sum()
    sm = np.convolve(path, kernel, mode="valid")
    return sm[:num]


def _normalized_rate(raw):
    """Per-sample rate 2(x + 2 max|x|)/(max x + 2 max|x|), in [2/3, 2].

    An identically zero path gets the limit rate 4/3.
    """
    raw = np.asarray(raw, dtype=float)
    amax = float(np.max(np.abs(raw)))
    if amax == 0.0:
        return np.full(raw.shape, 4.0 / 3.0)
    return 2.0 * (raw + 2.0 * amax) / (float(np.max(raw)) + 2.0 * amax)


def phase_from(phitilde, dt):
    """Strictly increasing phase from a smoothed path.

    Returns (phase, rate); the rate is the stored instantaneous
    frequency in Hz (phase increments are rate * dt).
    """
    rate = _normalized_rate(phitilde)
    return dt * np.cumsum(rate), rate


def amplitude_from(atilde, dt):
    """Positive amplitude ramp built by the same accumulation as the phase."""
    rate = _normalized_rate(atilde)
    return dt * np.cumsum(rate)


@dataclass(frozen=True)
class Component:
    """One oscillatory component with its ground truth."""

    amplitude: np.ndarray
    phase: np.ndarray
    instantaneous_frequency: np.ndarray
    mask: np.ndarray

    def waveform(self):
        return self.mask * self.amplitude * np.cos(2.0 * math.pi * self.phase)


@dataclass(frozen=True)
class SyntheticSignal:
    """Composite observation plus every ingredient used to build it."""

    dt: float
    components: tuple
    trend: np.ndarray
    noise: np.ndarray
    values: np.ndarray
    snr_target_db: float | None = None

    @property
    def times(self):
        return (1 + np.arange(len(self.values))) * self.dt

    @property
    def oscillatory(self):
        return sum(c.waveform() for c in self.components)

    def measured_snr_db(self):
        if not np.any(self.noise):
            return math.inf
        return snr_db(self.oscillatory, self.noise)


def compose(components, trend=None, noise_seed=0, target_snr_db=None, dt=1.0 / 32.0):
    """Assemble components + trend + noise at a target SNR.

    Noise is white Gaussian scaled so that
    20 log10(std(oscillatory)/std(noise)) equals the target exactly;
    target None means no noise.
    """
    components = tuple(components)
    if not components:
        raise ValueError("need at least one component")
    num = len(components[0].amplitude)
    osc = sum(c.waveform() for c in components)
    if trend is None:
        trend = np.zeros(num)
    if target_snr_db is None:
        noise = np.zeros(num)
    else:
        sd = float(np.std(osc))
        if sd == 0.0:
            raise ValueError("oscillatory part has zero variance, SNR undefined")
        rng = np.random.default_rng(noise_seed)
        raw = rng.standard_normal(num)
        noise = raw * (sd / float(np.std(raw)) / 10.0 ** (target_snr_db / 20.0))
    return SyntheticSignal(
        dt=dt,
        components=components,
        trend=np.asarray(trend, dtype=float),
        noise=noise,
        values=osc + trend + noise,
        snr_target_db=target_snr_db,
    )


def _component(num, dt, seed, sigma_phase, sigma_am, mask):
    rng = np.random.default_rng(seed)
    phase, rate = phase_from(smoothed_brownian(num, dt, sigma_phase, rng), dt)
    amp = amplitude_from(smoothed_brownian(num, dt, sigma_am, rng), dt)
    return Component(amplitude=amp, phase=phase, instantaneous_frequency=rate, mask=mask)


def two_component_signal(
    seed,
    dt=1.0 / 32.0,
    duration=25.0,
    target_snr_db=None,
    first_stop=18.75,
    second_start=6.25,
    sigma_phase=SIGMA_PHASE,
    sigma_am=SIGMA_AM,
):
    """Two-component test layout: the first component dies at
    ``first_stop`` seconds and the second is born at ``second_start``;
    the trend is an amplitude-style ramp with its mean removed."""
    num = int(round(duration / dt))
    t = (1 + np.arange(num)) * dt
    comp1 = _component(num, dt, seed, sigma_phase, sigma_am, (t <= first_stop).astype(float))
    comp2 = _component(num, dt, seed + 7919, sigma_phase, sigma_am, (t >= second_start).astype(float))
    trend = amplitude_from(
        smoothed_brownian(num, dt, sigma_am, np.random.default_rng(seed + 104729)), dt
    )
    trend = trend - trend.mean()
    return compose(
        (comp1, comp2), trend=trend, noise_seed=seed + 65537, target_snr_db=target_snr_db, dt=dt
    )
