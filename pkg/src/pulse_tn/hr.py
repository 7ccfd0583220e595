"""Heart-rate pipeline: bandpass filtering, Welch spectra, peak picking, metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .core import Waveform, segment_waveform

HR_LOW_HZ = 0.5
HR_HIGH_HZ = 3.0
WELCH_WINDOW_LEN = 256
WELCH_OVERLAP = 0.5
WELCH_NFFT = 3300
SEGMENT_SECONDS = 15.0
DEGENERATE_POWER = 1e-12


class DegenerateSignalError(ValueError):
    """Raised when a signal carries no usable in-band power."""


@dataclass(frozen=True)
class BandpassSpec:
    """Butterworth bandpass; zero_phase applies it forward and backward.

    `order` is the overall filter order (even; order 4 realizes two
    second-order sections). Zero-phase filtering squares the magnitude
    response and removes phase distortion.
    """

    low_hz: float = HR_LOW_HZ
    high_hz: float = HR_HIGH_HZ
    order: int = 4
    zero_phase: bool = True

    def __post_init__(self):
        if not 0 < self.low_hz < self.high_hz:
            raise ValueError(f"need 0 < low_hz < high_hz, got {self.low_hz}, {self.high_hz}")
        if self.order < 2 or self.order % 2:
            raise ValueError(f"order must be even and >= 2, got {self.order}")


@dataclass(frozen=True)
class PowerSpectrum:
    """One-sided power spectral density on a uniform frequency grid."""

    freqs: np.ndarray
    power: np.ndarray

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=np.float64)
        power = np.asarray(self.power, dtype=np.float64)
        if freqs.shape != power.shape or freqs.ndim != 1:
            raise ValueError("freqs and power must be 1-D and equally long")
        if np.any(np.diff(freqs) <= 0):
            raise ValueError("freqs must be strictly increasing")
        if np.any(power < 0):
            raise ValueError("power must be nonnegative")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "power", power)


@dataclass(frozen=True)
class MetricsReport:
    """Prediction/label agreement: MAE, RMSE and Pearson correlation.

    When either vector has zero variance (or there are fewer than two pairs)
    the correlation is undefined: `pearson` is NaN and `pearson_defined` is
    False.
    """

    pairs: tuple
    mae: float
    rmse: float
    pearson: float
    pearson_defined: bool


def bandpass(w: Waveform, spec: BandpassSpec = BandpassSpec()) -> Waveform:
    """Apply the Butterworth bandpass to a waveform, preserving its length."""
    if w.fps <= 2.0 * spec.high_hz:
        raise ValueError(
            f"sampling rate {w.fps} Hz too low for a {spec.high_hz} Hz passband edge"
        )
    if len(w) < 3 * spec.order:
        raise ValueError(f"waveform too short to filter: {len(w)} < {3 * spec.order}")
    sos = sps.butter(
        spec.order // 2, [spec.low_hz, spec.high_hz], btype="bandpass", fs=w.fps, output="sos"
    )
    if spec.zero_phase:
        y = sps.sosfiltfilt(sos, w.samples, padlen=min(3 * spec.order, len(w) - 1))
    else:
        y = sps.sosfilt(sos, w.samples)
    return Waveform(y, w.fps)


def welch_psd(
    w: Waveform,
    window_len: int = WELCH_WINDOW_LEN,
    overlap: float = WELCH_OVERLAP,
    nfft: int = WELCH_NFFT,
) -> PowerSpectrum:
    """Averaged periodogram over Hann-windowed, zero-padded segments.

    Frequencies are k * fps / nfft for k = 0..nfft/2. Density scaling with
    per-segment window-power compensation, so summing power times the bin
    width approximates the time-domain mean square.
    """
    if window_len < 2:
        raise ValueError(f"window_len must be >= 2, got {window_len}")
    if len(w) < window_len:
        raise ValueError(f"waveform length {len(w)} < window_len {window_len}; segment accordingly")
    if nfft < window_len:
        raise ValueError(f"nfft {nfft} must be >= window_len {window_len}")
    if not 0 <= overlap < 1:
        raise ValueError(f"overlap must lie in [0, 1), got {overlap}")
    freqs, power = sps.welch(
        w.samples,
        fs=w.fps,
        window="hann",
        nperseg=window_len,
        noverlap=int(window_len * overlap),
        nfft=nfft,
        detrend=False,
        scaling="density",
    )
    return PowerSpectrum(freqs, power)


def hr_from_psd(
    spectrum: PowerSpectrum, low_hz: float = HR_LOW_HZ, high_hz: float = HR_HIGH_HZ
) -> float:
    """Heart rate in BPM from the spectral peak inside [low_hz, high_hz].

    Ties break toward the lower frequency.
    """
    mask = (spectrum.freqs >= low_hz) & (spectrum.freqs <= high_hz)
    if not np.any(mask):
        raise ValueError(f"spectrum has no bins inside [{low_hz}, {high_hz}] Hz")
    freqs = spectrum.freqs[mask]
    power = spectrum.power[mask]
    return 60.0 * float(freqs[int(np.argmax(power))])


def segment_heart_rates(
    w: Waveform,
    segment_s: float = SEGMENT_SECONDS,
    band: BandpassSpec = BandpassSpec(),
    window_len: int = WELCH_WINDOW_LEN,
    overlap: float = WELCH_OVERLAP,
    nfft: int = WELCH_NFFT,
) -> tuple[list[float], int]:
    """Per-segment heart rates plus the count of degenerate segments dropped.

    Each full segment is bandpassed and run through the Welch estimator;
    segments shorter than the Welch window use the whole segment as a single
    Welch segment. Segments whose in-band peak power falls below
    DEGENERATE_POWER carry no usable pulse and are dropped.
    """
    segments = segment_waveform(w, segment_s)
    if not segments:
        raise ValueError(
            f"waveform of {w.duration_s:.2f} s has no full {segment_s} s segment"
        )
    rates: list[float] = []
    dropped = 0
    for seg in segments:
        filtered = bandpass(seg, band)
        win = min(window_len, len(seg))
        spectrum = welch_psd(filtered, window_len=win, overlap=overlap, nfft=max(nfft, win))
        mask = (spectrum.freqs >= band.low_hz) & (spectrum.freqs <= band.high_hz)
        if float(spectrum.power[mask].max(initial=0.0)) < DEGENERATE_POWER:
            dropped += 1
            continue
        rates.append(hr_from_psd(spectrum, band.low_hz, band.high_hz))
    return rates, dropped


def video_hr(
    w: Waveform,
    segment_s: float = SEGMENT_SECONDS,
    band: BandpassSpec = BandpassSpec(),
    window_len: int = WELCH_WINDOW_LEN,
    overlap: float = WELCH_OVERLAP,
    nfft: int = WELCH_NFFT,
) -> float:
    """Mean of the per-segment heart rates of a waveform, in BPM."""
    rates, dropped = segment_heart_rates(w, segment_s, band, window_len, overlap, nfft)
    if not rates:
        raise DegenerateSignalError(
            f"all {dropped} segments are spectrally degenerate (in-band power < {DEGENERATE_POWER})"
        )
    return float(np.mean(rates))


def compute_metrics(preds, labels, ids=None) -> MetricsReport:
    """MAE, RMSE and Pearson correlation between predictions and labels."""
    preds = np.asarray(preds, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if preds.shape != labels.shape or preds.ndim != 1:
        raise ValueError("preds and labels must be 1-D and equally long")
    if preds.size < 1:
        raise ValueError("need at least one prediction/label pair")
    err = preds - labels
    mae = float(np.mean(np.abs(err)))
    rmse = float(np.sqrt(np.mean(err * err)))
    defined = preds.size >= 2 and float(np.std(preds)) > 0 and float(np.std(labels)) > 0
    if defined:
        pearson = float(np.corrcoef(preds, labels)[0, 1])
    else:
        pearson = float("nan")
    if ids is None:
        ids = [None] * preds.size
    pairs = tuple(zip(preds.tolist(), labels.tolist(), ids))
    return MetricsReport(pairs=pairs, mae=mae, rmse=rmse, pearson=pearson, pearson_defined=defined)
