"""Frame assembly, symbol mapping and matched-filter demodulation."""

import csv
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .dsp import SampledSignal
from .waveforms import LfmSpec, lfm, symbol_samples

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrameLayout:
    """Probe, guard, data and guard durations (seconds) plus the symbol period.

    Sample positions use round-half-up of the cumulative time, so the frame
    is always ``round(Tp + T1 + Ts + T2)`` samples long.
    """

    Tp: float = 0.348e-3
    T1: float = 0.1
    Ts: float = 0.25
    T2: float = 0.1
    T: float = 0.348e-3

    def __post_init__(self):
        for name in ("Tp", "T1", "Ts", "T2", "T"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not math.isclose(self.T1, self.T2, rel_tol=1e-12):
            raise ValueError(f"guard after data ({self.T2}) must equal guard after probe ({self.T1})")
        if self.symbols_per_frame < 1:
            raise ValueError("data segment shorter than one symbol")

    @property
    def symbols_per_frame(self):
        return int(math.floor(self.Ts / self.T + 1e-9))

    @property
    def frame_duration(self):
        return self.Tp + self.T1 + self.Ts + self.T2

    def probe_samples(self, fs):
        return symbol_samples(self.Tp, fs)

    def data_start(self, fs):
        return symbol_samples(self.Tp + self.T1, fs)

    def data_samples(self, fs):
        return symbol_samples(self.Tp + self.T1 + self.Ts, fs) - self.data_start(fs)

    def frame_samples(self, fs):
        return symbol_samples(self.frame_duration, fs)


@dataclass(frozen=True)
class Frame:
    layout: FrameLayout
    probe: SampledSignal
    payload_bits: np.ndarray
    symbols: np.ndarray
    waveform: SampledSignal
    padding: int = 0


@dataclass(frozen=True)
class DemodDecision:
    symbol_index: int
    chosen_symbol: str
    correlation_peaks: tuple
    low_confidence: bool = False


def default_probe(layout, sample_rate=96000.0, f_start=5000.0, f_end=18000.0):
    """Zero-phase full-band LFM lasting ``Tp``."""
    return lfm(LfmSpec(f_start, f_end, layout.Tp, 0.0, sample_rate))


def bits_to_symbols(bits, alphabet):
    """Group bits into symbol indices; returns ``(symbols, padding)``."""
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
    if bits.size == 0:
        raise ValueError("no bits to send")
    if np.any(bits > 1):
        raise ValueError("bits must be 0 or 1")
    k = alphabet.bits_per_symbol
    padding = (-bits.size) % k
    if padding:
        logger.info("padding %d zero bits to complete the last %d-bit symbol", padding, k)
        bits = np.concatenate([bits, np.zeros(padding, dtype=np.uint8)])
    lookup = {pattern: i for i, pattern in enumerate(alphabet.bit_map)}
    groups = bits.reshape(-1, k)
    symbols = np.array([lookup["".join(map(str, g))] for g in groups], dtype=np.int64)
    return symbols, padding


def symbols_to_bits(symbols, alphabet):
    patterns = [alphabet.bit_map[s] for s in symbols]
    return np.array([int(c) for p in patterns for c in p], dtype=np.uint8)


def modulate(bits, alphabet, layout, probe):
    """Split ``bits`` into frames of probe, guard, data and guard.

    The data segment of each frame holds up to ``layout.symbols_per_frame``
    back-to-back carriers; the last frame carries whatever remains.
    """
    fs = alphabet.sample_rate
    if probe.sample_rate != fs:
        raise ValueError("probe and alphabet sample rates differ")
    if len(probe) != layout.probe_samples(fs):
        raise ValueError(f"probe has {len(probe)} samples, layout expects {layout.probe_samples(fs)}")
    symbols, padding = bits_to_symbols(bits, alphabet)
    n_sym = alphabet.symbol_length
    per_frame = layout.symbols_per_frame
    if per_frame * n_sym > layout.data_samples(fs):
        raise ValueError("symbols do not fit in the data segment at this sample rate")
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
    k = alphabet.bits_per_symbol

    frames = []
    for lo in range(0, symbols.size, per_frame):
        chunk = symbols[lo:lo + per_frame]
        wave = np.zeros(layout.frame_samples(fs))
        wave[:len(probe)] = probe.samples
        start = layout.data_start(fs)
        wave[start:start + chunk.size * n_sym] = alphabet.carriers[chunk].reshape(-1)
        last = lo + per_frame >= symbols.size
        payload = symbols_to_bits(chunk, alphabet)
        frames.append(Frame(layout, probe, payload, chunk, SampledSignal(wave, fs),
                            padding if last else 0))
    return frames


def effective_bit_rate(alphabet, layout):
    """Payload bits per second of frame time."""
    k = alphabet if isinstance(alphabet, int) else alphabet.bits_per_symbol
    return layout.symbols_per_frame * k / layout.frame_duration


@dataclass(frozen=True)
class EqualizedStream:
    """Equalized data stream with symbol slot indexing.

    Slot ``k`` starts at ``symbol_start_index + round(k * symbol_spacing)``.
    """

    signal: SampledSignal
    symbol_start_index: int
    symbol_length: int
    n_symbols: int
    symbol_spacing: float = None

    def slot_starts(self):
        spacing = self.symbol_spacing or self.symbol_length
        k = np.arange(self.n_symbols)
        return self.symbol_start_index + np.floor(k * spacing + 0.5).astype(np.int64)


def lag_window(symbol_length):
    """Half-width of the lag search around each slot, in samples.

    Ideal synchronization leaves only sub-sample misalignment, so one sample
    either side is enough. Wider windows let a rotated-phase reference find a
    matching peak one carrier cycle away, which is fatal for phase-coded
    alphabets.
    """
    return 1


def correlate_slots(eq, alphabet, max_lag=None):
    """Signed correlation of every slot against every reference, all lags."""
    if eq.symbol_length != alphabet.symbol_length:
        raise ValueError("stream and alphabet disagree on the symbol length")
    max_lag = lag_window(eq.symbol_length) if max_lag is None else max_lag
    starts = eq.slot_starts()
    n = len(eq.signal)
    for k, s in enumerate(starts):
        if s < 0 or s + eq.symbol_length > n:
            raise ValueError(f"symbol slot {k} ([{s}, {s + eq.symbol_length})) lies outside "
                             f"the equalized stream of {n} samples")
    return kernels.slot_correlate(eq.signal.samples, starts, alphabet.carriers, max_lag)


def demodulate(eq, alphabet, max_lag=None, trace=False):
    """Matched-filter decisions: highest signed correlation peak wins.

    Ties go to the lowest symbol index. Returns ``(bits, decisions)``;
    ``decisions`` is empty unless ``trace`` is set.
    """
    corr = correlate_slots(eq, alphabet, max_lag)
    peaks = corr.max(axis=1)
    choice = np.argmax(peaks, axis=1)
    bits = symbols_to_bits(choice, alphabet)
    decisions = []
    if trace:
        scale = np.max(np.abs(peaks)) if peaks.size else 0.0
        for k in range(peaks.shape[0]):
            row = peaks[k]
            flat = scale == 0.0 or np.count_nonzero(row == row[choice[k]]) > 1
            decisions.append(DemodDecision(k, alphabet.bit_map[choice[k]],
                                           tuple(float(v) for v in row), bool(flat)))
    return bits, decisions


def decisions_to_csv(decisions, alphabet, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["symbol_index", *(f"peak_{b}" for b in alphabet.bit_map),
                         "choice", "low_confidence"])
        for d in decisions:
            writer.writerow([d.symbol_index, *(repr(v) for v in d.correlation_peaks),
                             d.chosen_symbol, int(d.low_confidence)])


def waveform_to_csv(signal, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample"])
        for v in signal.samples:
            writer.writerow([repr(float(v))])
