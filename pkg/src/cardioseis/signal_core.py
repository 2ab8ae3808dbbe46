"""Sampled-signal container and the DSP primitives the pipeline is built on.

Everything here is a pure function of its inputs. Channels are treated as
immutable once built; operations return new arrays/channels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import signal as sps
from scipy.fft import next_fast_len

from .errors import DegenerateAnalysisError, InputError, InternalError


@dataclass(frozen=True)
class Channel:
    """A uniformly sampled real-valued waveform.

    samples: the data (m/s^2, L/s, L, or dimensionless)
    fs: sampling rate in Hz, > 0
    label: free-text channel name
    """

    samples: np.ndarray
    fs: float
    label: str = ""

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", arr)
        if self.fs <= 0:
            raise InputError(f"channel {self.label!r}: fs must be > 0, got {self.fs}")
        if arr.ndim != 1:
            raise InputError(f"channel {self.label!r}: samples must be 1-D")
        if arr.size and not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise InputError(f"channel {self.label!r}: non-finite sample at index {bad}")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.fs

    def with_samples(self, samples, fs=None) -> "Channel":
        return Channel(np.asarray(samples, dtype=float), self.fs if fs is None else fs, self.label)


@dataclass(frozen=True)
class Recording:
    """A bundle of synchronized channels of equal duration."""

    channels: dict[str, Channel]
    recording_id: str = "recording"
    meta: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> Channel:
        try:
            return self.channels[name]
        except KeyError:
            raise InputError(f"missing channel: {name}") from None


def rms(x) -> float:
    """Root-mean-square of a waveform. Errors on empty input."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise InputError("empty waveform")
    return float(np.sqrt(np.mean(np.square(x))))


@lru_cache(maxsize=32)
def _lowpass_taps(cutoff_hz: float, fs: float) -> np.ndarray:
    """Smallest odd-length Hamming windowed-sinc kernel meeting the band specs.

    Passband: within +/-0.5 dB below 0.8*cutoff.  Stopband: >= 40 dB above
    1.5*cutoff.  Grown in steps until a frequency-response probe passes.
    """
    pass_edge = 0.8 * cutoff_hz
    stop_edge = 1.5 * cutoff_hz
    for numtaps in range(11, 4097, 2):
        taps = sps.firwin(numtaps, cutoff_hz, window="hamming", fs=fs)
        w, h = sps.freqz(taps, worN=2048, fs=fs)
        mag = np.abs(h)
        pb = mag[w <= pass_edge]
        sb = mag[w >= min(stop_edge, 0.999 * fs / 2)]
        pb_ok = pb.size == 0 or (np.all(pb >= 10 ** (-0.5 / 20)) and np.all(pb <= 10 ** (0.5 / 20)))
        sb_ok = sb.size == 0 or np.all(sb <= 10 ** (-40 / 20))
        if pb_ok and sb_ok:
            return taps
    raise InternalError("lowpass design did not converge")  # pragma: no cover


def lowpass(ch: Channel, cutoff_hz: float) -> Channel:
    """Zero-phase FIR low-pass. Same length and fs as the input.

    Linear-phase odd-length kernel applied after reflect-padding by half the
    kernel length, so edges carry no startup transient and there is no group
    delay in the output.
    """
    if cutoff_hz <= 0 or cutoff_hz >= ch.fs / 2:
        raise InputError("cutoff above Nyquist")
    taps = _lowpass_taps(float(cutoff_hz), float(ch.fs))
    half = len(taps) // 2
    x = ch.samples
    if x.size == 0:
        return ch.with_samples(x)
    pad = min(half, x.size - 1)
    padded = np.pad(x, pad, mode="reflect")
    y = np.convolve(padded, taps, mode="same")
    return ch.with_samples(y[pad:pad + x.size] if pad else y)


def resample(ch: Channel, target_fs: float) -> Channel:
    """Rational polyphase resampling with anti-aliasing.

    The anti-alias cutoff sits at 0.9x the limiting Nyquist (10% guard band),
    so tones below 0.4x the target Nyquist pass essentially untouched.
    Output length is round(n * target_fs / fs).
    """
    if target_fs <= 0:
        raise InputError("target_fs must be > 0")
    if target_fs == ch.fs:
        return ch.with_samples(ch.samples.copy())
    frac = Fraction(target_fs / ch.fs).limit_denominator(10000)
    up, down = frac.numerator, frac.denominator
    m = max(up, down)
    taps = sps.firwin(20 * m + 1, 0.9 / m, window="hamming")
    y = sps.resample_poly(ch.samples, up, down, window=taps)
    n_out = int(round(len(ch.samples) * target_fs / ch.fs))
    if len(y) > n_out:
        y = y[:n_out]
    elif len(y) < n_out:  # pragma: no cover - resample_poly uses ceil
        y = np.pad(y, (0, n_out - len(y)), mode="edge")
    return Channel(y, float(target_fs), ch.label)


def hilbert_envelope(x) -> np.ndarray:
    """Magnitude of the analytic signal, same length as the input.

    FFT length is padded to a fast size internally; accuracy guarantees hold
    on the interior of the signal (edges show the usual Hilbert roll-off).
    """
    x = np.asarray(x, dtype=float)
    if x.size < 4:
        raise InputError("waveform too short for envelope")
    n = next_fast_len(x.size)
    analytic = sps.hilbert(x, N=n)[: x.size]
    return np.abs(analytic)


def best_lag(x, y, max_lag: int) -> int:
    """Lag maximizing Pearson-normalized cross-correlation of x against y.

    A positive result means y is a delayed copy of x: y[i + lag] lines up
    with x[i]. Ties break toward smaller |lag|, then toward negative lag.
    Each waveform is mean-subtracted and the correlation is normalized by
    the product of the full-segment norms, so amplitude differences do not
    bias the alignment and shrinking the overlap cannot inflate the score
    (which would let alignment lock onto a neighboring carrier cycle).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if max_lag < 0:
        raise InputError("max_lag must be >= 0")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise DegenerateCorrelation()
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.linalg.norm(xc) * np.linalg.norm(yc)
    if denom == 0:
        raise DegenerateCorrelation()
    best = None
    for lag in sorted(range(-max_lag, max_lag + 1), key=lambda l: (abs(l), l)):
        if lag >= 0:
            n = min(len(x), len(y) - lag)
            xs, ys = xc[:n], yc[lag:lag + n]
        else:
            n = min(len(x) + lag, len(y))
            xs, ys = xc[-lag:-lag + n], yc[:n]
        if n < 2:
            continue
        r = float(np.dot(xs, ys) / denom)
        if best is None or r > best[0] + 1e-15:
            best = (r, lag)
    if best is None:
        raise DegenerateCorrelation()
    return best[1]


class DegenerateCorrelation(DegenerateAnalysisError):
    def __init__(self):
        super().__init__("degenerate correlation")
