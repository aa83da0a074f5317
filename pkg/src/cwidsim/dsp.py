"""Sampled-signal type and the numeric primitives shared by every stage.

Every signal carries an ``origin``: the index of the sample that sits at
time zero. Correlation and convolution outputs get their origin from their
inputs, so a chain of operations never needs ad-hoc offset bookkeeping.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import signal as sps

from . import kernels


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Uniformly sampled real waveform.

    Parameters
    ----------
    samples : array_like
        Real amplitudes. Stored as a read-only float64 array.
    sample_rate : float
        Samples per second.
    origin : int
        Index of the sample at time zero. Sample ``i`` sits at
        ``(i - origin) / sample_rate`` seconds.
    """

    samples: np.ndarray
    sample_rate: float
    origin: int = 0

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.float64, copy=True).reshape(-1)
        if not self.sample_rate > 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        object.__setattr__(self, "origin", int(self.origin))

    def __len__(self):
        return self.samples.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SampledSignal):
            return NotImplemented
        return (self.sample_rate == other.sample_rate and self.origin == other.origin
                and np.array_equal(self.samples, other.samples))

    __hash__ = None

    @property
    def duration(self):
        return len(self) / self.sample_rate

    @property
    def times(self):
        return (np.arange(len(self)) - self.origin) / self.sample_rate

    def with_samples(self, samples, origin=None):
        """New signal at the same rate (and origin unless given)."""
        return SampledSignal(samples, self.sample_rate, self.origin if origin is None else origin)

    def at_lag(self, lag, length):
        """``length`` samples starting at integer time index ``lag`` (zero outside)."""
        start = self.origin + int(lag)
        out = np.zeros(int(length))
        lo = max(start, 0)
        hi = min(start + int(length), len(self))
        if hi > lo:
            out[lo - start:hi - start] = self.samples[lo:hi]
        return out

    def scaled(self, factor):
        return self.with_samples(self.samples * factor)


@dataclass(frozen=True)
class RngStream:
    """Reproducible, splittable random stream.

    The same ``(seed, stream_id, path)`` always yields the same draws, and
    streams that differ in any key are statistically independent (they map to
    distinct ``numpy.random.SeedSequence`` spawn keys).
    """

    seed: int
    stream_id: int = 0
    path: tuple = field(default=())

    def generator(self):
        """Fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(int(self.seed) & (2**64 - 1),
                                     spawn_key=(int(self.stream_id), *map(int, self.path)))
        return np.random.Generator(np.random.PCG64(seq))

    def child(self, *keys):
        return RngStream(self.seed, self.stream_id, self.path + tuple(int(k) for k in keys))


def _check_rates(a, b):
    if a.sample_rate != b.sample_rate:
        raise ValueError(f"sample rate mismatch: {a.sample_rate} Hz vs {b.sample_rate} Hz")


def zero_lag_index(a, b):
    """Index of lag zero in ``cross_correlate(a, b)``."""
    return a.origin + len(b) - 1 - b.origin


def cross_correlate(a, b):
    """Full cross-correlation ``r[k] = sum_n a[n] b[n - k]``.

    Output length is ``len(a) + len(b) - 1``. For signals with origin 0 the
    lag-zero sample sits at index ``len(b) - 1``; in general see
    :func:`zero_lag_index`, which is also stored as the output ``origin``.
    """
    _check_rates(a, b)
    out = sps.correlate(a.samples, b.samples, mode="full")
    return SampledSignal(out, a.sample_rate, zero_lag_index(a, b))


def convolve(a, b):
    """Linear convolution; output origin is ``a.origin + b.origin``."""
    _check_rates(a, b)
    out = sps.convolve(a.samples, b.samples, mode="full")
    return SampledSignal(out, a.sample_rate, a.origin + b.origin)


def time_reverse(a):
    """Mirror ``a`` about time zero: sample at ``t`` moves to ``-t``."""
    return SampledSignal(a.samples[::-1], a.sample_rate, len(a) - 1 - a.origin)


def fractional_delay(a, delay_s):
    """Delay ``a`` by ``delay_s`` seconds, keeping its length.

    Integer-sample delays are exact shifts with a zero-filled head. Other
    delays use 64-tap Kaiser-windowed sinc interpolation.
    """
    if delay_s < 0:
        raise ValueError(f"delay must be non-negative, got {delay_s}")
    d = delay_s * a.sample_rate
    n = np.arange(len(a), dtype=np.float64)
    if d == round(d):
        shift = int(round(d))
        out = np.zeros(len(a))
        if shift < len(a):
            out[shift:] = a.samples[:len(a) - shift]
        return a.with_samples(out)
    return a.with_samples(kernels.interp(a.samples, n - d))


def noise_std(snr_db, reference_power):
    if not reference_power > 0:
        raise ValueError(f"reference power must be positive, got {reference_power}")
    return float(np.sqrt(reference_power / 10.0 ** (snr_db / 10.0)))


def add_awgn(a, snr_db, reference_power, rng):
    """Add white Gaussian noise of variance ``reference_power / 10**(snr_db/10)``."""
    std = noise_std(snr_db, reference_power)
    noise = rng.generator().standard_normal(len(a)) * std
    return a.with_samples(a.samples + noise)


def measure_power(a, window=None):
    """Mean squared amplitude over ``window`` (a ``slice`` or ``(start, stop)``)."""
    if window is None:
        window = slice(0, len(a))
    elif not isinstance(window, slice):
        window = slice(*window)
    start, stop, step = window.indices(len(a))
    if window.start is not None and (window.start < 0 or window.start > len(a)):
        raise ValueError(f"window start {window.start} outside signal of length {len(a)}")
    if window.stop is not None and window.stop > len(a):
        raise ValueError(f"window stop {window.stop} outside signal of length {len(a)}")
    seg = a.samples[start:stop:step]
    if seg.size == 0:
        raise ValueError("empty power window")
    return float(np.mean(seg * seg))
