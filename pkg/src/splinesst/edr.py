"""ECG-derived respiration via blending interpolation of peak amplitudes.

Pipeline: running-median baseline removal, R (or S) peak detection with
an adaptive threshold, optional premature-beat exclusion, then blending
interpolation of the peak amplitude series resampled to a uniform rate.
The peak amplitudes are irregular samples of the respiratory waveform;
the interpolated result is the EDR signal.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import percentile_filter
from scipy.signal import find_peaks

from .blending import BlendingStream, blend_interpolate
from .bsplines import eval_spline_curve

__all__ = [
    "ECGRecord",
    "PeakList",
    "EDRWaveform",
    "remove_baseline",
    "detect_peaks",
    "exclude_pvc",
    "build_edr",
]


@dataclass(frozen=True)
class ECGRecord:
    """Uniformly sampled single-lead ECG."""

    fs: float
    samples: np.ndarray
    lead: str = "II"

    def __post_init__(self):
        if self.fs <= 100.0:
            raise ValueError("sampling rate must exceed 100 Hz")
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))

    @property
    def times(self):
        return np.arange(len(self.samples)) / self.fs


@dataclass(frozen=True)
class PeakList:
    """Detected beat landmarks: strictly increasing times and amplitudes."""

    times: np.ndarray
    amplitudes: np.ndarray
    polarity: str = "R"
    compensatory: np.ndarray = field(default_factory=lambda: np.array([], dtype=int))

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        a = np.asarray(self.amplitudes, dtype=float)
        if t.shape != a.shape:
            raise ValueError("times and amplitudes must match")
        if len(t) > 1 and np.any(np.diff(t) <= 0.0):
            raise ValueError("peak times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "amplitudes", a)

    def __len__(self):
        return len(self.times)


def remove_baseline(record, window_ms=100.0):
    """Subtract the running median over a centered window.

    Interior samples use the full window; near the edges the window
    shrinks to what is available.
    """
    x = record.samples
    half = int(round(window_ms / 2000.0 * record.fs))
    if len(x) < 2 * half + 1:
        raise ValueError("record shorter than the median window")
    if half == 0:
        return ECGRecord(fs=record.fs, samples=np.zeros_like(x), lead=record.lead)
    med = np.empty_like(x)
    interior = np.lib.stride_tricks.sliding_window_view(x, 2 * half + 1)
    med[half : len(x) - half] = np.median(interior, axis=1)
    for i in range(half):
        med[i] = np.median(x[: i + half + 1])
        med[len(x) - 1 - i] = np.median(x[len(x) - 1 - i - half :])
    return ECGRecord(fs=record.fs, samples=x - med, lead=record.lead)


def detect_peaks(
    record,
    polarity="R",
    refractory_ms=250.0,
    rel_threshold=0.5,
    percentile_window_s=2.0,
    percentile=95.0,
):
    """Local extrema above an adaptive threshold, refractory-separated.

    The threshold is rel_threshold times the rolling 95th percentile of
    the rectified signal; polarity "S" detects troughs.  Amplitudes are
    the signed sample values at the detected extrema.
    """
    if polarity not in ("R", "S"):
        raise ValueError("polarity must be 'R' or 'S'")
    x = record.samples if polarity == "R" else -record.samples
    size = max(int(round(percentile_window_s * record.fs)), 3)
    envelope = percentile_filter(np.abs(x), percentile, size=size, mode="nearest")
    height = rel_threshold * envelope
    distance = max(int(round(refractory_ms / 1000.0 * record.fs)), 1)
    idx, _ = find_peaks(x, height=height, distance=distance)
    amplitudes = record.samples[idx]
    return PeakList(times=idx / record.fs, amplitudes=amplitudes, polarity=polarity)


def exclude_pvc(peaks, prematurity_ratio=0.7, history=8):
    """Drop premature beats by the RR-interval heuristic.

    A beat whose interval to the previous kept beat falls below
    prematurity_ratio times the running median RR is removed; the beat
    after a removal is flagged as compensatory (kept).  A ratio of 0
    disables the filter.
    """
    if prematurity_ratio <= 0.0 or len(peaks) < 3:
        return PeakList(
            times=peaks.times, amplitudes=peaks.amplitudes, polarity=peaks.polarity
        )
    keep = [0]
    compensatory = []
    rr_hist = deque(maxlen=history)
    removed_last = False
    for i in range(1, len(peaks)):
        rr = peaks.times[i] - peaks.times[keep[-1]]
        med = float(np.median(rr_hist)) if len(rr_hist) >= 2 else None
        if med is not None and rr < prematurity_ratio * med:
            removed_last = True
            continue
        if removed_last:
            compensatory.append(len(keep))
            removed_last = False
        keep.append(i)
        rr_hist.append(rr)
    keep = np.asarray(keep, dtype=int)
    return PeakList(
        times=peaks.times[keep],
        amplitudes=peaks.amplitudes[keep],
        polarity=peaks.polarity,
        compensatory=np.asarray(compensatory, dtype=int),
    )


@dataclass(frozen=True)
class EDRWaveform:
    """Respiratory waveform resampled uniformly from peak amplitudes."""

    rate: float
    times: np.ndarray
    values: np.ndarray
    curve: object
    peaks: PeakList


def build_edr(peaks, order=4, rate=4.0):
    """Blending-interpolate peak amplitudes into a uniform EDR waveform.

    The spline interpolates every retained peak amplitude at its time;
    needs at least 2 * order peaks.  ``rate`` is the output rate in Hz.
    """
    if len(peaks) < 2 * order:
        raise ValueError(f"need at least {2 * order} peaks for order {order}")
    curve = blend_interpolate(peaks.times, peaks.amplitudes, order)
    t0 = math.ceil(peaks.times[0] * rate) / rate
    t1 = math.floor(peaks.times[-1] * rate) / rate
    times = t0 + np.arange(int(round((t1 - t0) * rate)) + 1) / rate
    return EDRWaveform(
        rate=rate,
        times=times,
        values=eval_spline_curve(curve, times),
        curve=curve,
        peaks=peaks,
    )
