"""Carrier generation: cosine and LFM carriers, peak splitting, alphabets.

CWID carriers are built in continuous time. A base chirp is cut at the
instants where its phase has advanced by a whole number of turns (for a
zero-phase chirp these are its amplitude peaks), the resulting one-cycle
pieces are re-ordered per symbol, and the re-ordered waveform is then
sampled. Every piece starts and ends at the same amplitude, so the joins
are continuous whatever the order.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .dsp import SampledSignal, cross_correlate

QPSK_PHASES = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)
QPSK_BITS = ("00", "01", "11", "10")

# Rows: symbols 00, 01, 10, 11. Entry j is the (1-based) piece in place j.
REORGANIZATION_TABLE = (
    (1, 2, 3, 4),
    (2, 4, 1, 3),
    (3, 1, 4, 2),
    (4, 3, 2, 1),
)
ROW_BITS = ("00", "01", "10", "11")


def symbol_samples(duration, sample_rate):
    """Samples per symbol: ``duration * sample_rate`` rounded half-up."""
    return int(math.floor(duration * sample_rate + 0.5))


@dataclass(frozen=True)
class LfmSpec:
    f_start: float = 5000.0
    f_end: float = 18000.0
    duration: float = 0.348e-3
    initial_phase: float = 0.0
    sample_rate: float = 96000.0

    def __post_init__(self):
        if not 0 < self.f_start < self.f_end < self.sample_rate / 2:
            raise ValueError(
                f"need 0 < f_start < f_end < sample_rate/2, got "
                f"{self.f_start}, {self.f_end}, {self.sample_rate}")
        if not self.duration > 0:
            raise ValueError(f"duration must be positive, got {self.duration}")

    @property
    def sweep_rate(self):
        return (self.f_end - self.f_start) / self.duration

    @property
    def center_frequency(self):
        return 0.5 * (self.f_start + self.f_end)

    def with_phase(self, phase):
        return LfmSpec(self.f_start, self.f_end, self.duration, phase, self.sample_rate)

    def cycles(self, t):
        """Phase advance since ``t = 0`` in turns."""
        t = np.asarray(t, dtype=np.float64)
        return self.f_start * t + 0.5 * self.sweep_rate * t * t

    def phase(self, t):
        return self.initial_phase + 2 * np.pi * self.cycles(t)

    def value(self, t):
        return np.cos(self.phase(t))

    def cycle_time(self, m):
        """Instant at which the phase has advanced by exactly ``m`` turns."""
        k = self.sweep_rate
        return (-self.f_start + math.sqrt(self.f_start ** 2 + 2 * k * m)) / k


def cosine_carrier(freq, initial_phase, duration, sample_rate):
    if not 0 < freq < sample_rate / 2:
        raise ValueError(f"carrier {freq} Hz aliases at sample rate {sample_rate} Hz")
    n = symbol_samples(duration, sample_rate)
    t = np.arange(n) / sample_rate
    return SampledSignal(np.cos(2 * np.pi * freq * t + initial_phase), sample_rate)


def lfm(spec):
    n = symbol_samples(spec.duration, spec.sample_rate)
    t = np.arange(n) / spec.sample_rate
    return SampledSignal(spec.value(t), spec.sample_rate)


@dataclass(frozen=True)
class SubWaveformSplit:
    """Partition of a carrier into sub-waveforms.

    ``boundaries`` holds ``len(segments) + 1`` instants; sub-waveform ``i``
    spans ``[boundaries[i], boundaries[i + 1])``. Anything after the last
    boundary is the ``tail``, which is never moved.
    """

    boundaries: tuple
    segments: tuple
    boundary_values: tuple
    tail: tuple
    duration: float

    @property
    def piece_durations(self):
        b = self.boundaries
        return tuple(b[i + 1] - b[i] for i in range(len(b) - 1))


def split_at_peaks(spec, target_segments=4):
    """Split an LFM carrier into ``target_segments`` one-cycle pieces.

    Split instants are where the phase has advanced by a whole number of
    turns (the peaks of the zero-phase chirp). The first
    ``target_segments - 1`` of them are the interior split points; the next
    one closes the last piece. When the carrier ends before that closing
    instant the last piece runs to the carrier end instead.
    """
    if target_segments < 2:
        raise ValueError("need at least two segments")
    total = float(spec.cycles(spec.duration))
    interior = [spec.cycle_time(m) for m in range(1, math.ceil(total))
                if spec.cycle_time(m) < spec.duration]
    if len(interior) < target_segments - 1:
        raise ValueError(
            f"carrier has {len(interior)} interior peaks, "
            f"need {target_segments - 1} for {target_segments} segments")
    if len(interior) >= target_segments:
        end = interior[target_segments - 1]
    else:
        end = spec.duration
    bounds = (0.0, *interior[:target_segments - 1], end)

    fs = spec.sample_rate
    n = symbol_samples(spec.duration, fs)
    index = [min(n, math.ceil(b * fs - 1e-9)) for b in bounds]
    segments = tuple((index[i], index[i + 1]) for i in range(target_segments))
    values = tuple(float(spec.value(b)) for b in bounds)
    return SubWaveformSplit(bounds, segments, values, (index[-1], n), spec.duration)


def reorganized_value(spec, split, order, t):
    """Value at times ``t`` of the carrier whose place ``j`` holds piece ``order[j]``.

    ``order`` is 0-based.
    """
    t = np.asarray(t, dtype=np.float64)
    if tuple(order) == tuple(range(len(order))):
        return spec.value(t)
    b = split.boundaries
    lengths = split.piece_durations
    src = t.copy()
    place_start = 0.0
    for piece in order:
        place_end = place_start + lengths[piece]
        sel = (t >= place_start) & (t < place_end)
        src[sel] = t[sel] - place_start + b[piece]
        place_start = place_end
    return spec.value(src)


def join_gaps(spec, split, order):
    """Jump in amplitude at each internal join of a reorganized carrier."""
    b = split.boundaries
    gaps = []
    for left, right in zip(order[:-1], order[1:]):
        gaps.append(abs(float(spec.value(b[left + 1])) - float(spec.value(b[right]))))
    if b[-1] < split.duration:
        gaps.append(abs(float(spec.value(b[order[-1] + 1])) - float(spec.value(b[-1]))))
    return gaps


@dataclass(frozen=True)
class CarrierAlphabet:
    """Ordered carrier set with its symbol-to-bits map.

    For CWID alphabets ``bases`` holds the base chirps, ``placements`` holds
    ``(base_index, order)`` per symbol and ``split`` the shared partition.
    """

    scheme_name: str
    carriers: np.ndarray
    sample_rate: float
    bit_map: tuple
    center_frequency: float
    bases: tuple = ()
    placements: tuple = ()
    split: SubWaveformSplit = None

    def __post_init__(self):
        arr = np.array(self.carriers, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("carriers must be a 2-D array (symbols x samples)")
        width = {len(b) for b in self.bit_map}
        if len(self.bit_map) != arr.shape[0] or len(width) != 1:
            raise ValueError("bit_map must give one pattern per carrier, all the same width")
        if len(set(self.bit_map)) != len(self.bit_map) or 2 ** width.pop() != arr.shape[0]:
            raise ValueError("bit_map must be a bijection onto all patterns of its width")
        arr.setflags(write=False)
        object.__setattr__(self, "carriers", arr)
        object.__setattr__(self, "bit_map", tuple(self.bit_map))

    @property
    def order(self):
        return self.carriers.shape[0]

    @property
    def bits_per_symbol(self):
        return len(self.bit_map[0])

    @property
    def symbol_length(self):
        return self.carriers.shape[1]

    def carrier(self, index):
        return SampledSignal(self.carriers[index], self.sample_rate)

    def symbol_for_bits(self, bits):
        return self.bit_map.index(bits)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.bit_map)
            for row in self.carriers.T:
                writer.writerow([repr(float(v)) for v in row])


def build_qpsk_alphabet(kind="cosine", freq=11500.0, lfm_spec=None,
                        duration=0.348e-3, sample_rate=96000.0):
    """Four-phase alphabet with the Gray map 0 -> 00, pi/2 -> 01, pi -> 11, 3pi/2 -> 10."""
    if kind == "cosine":
        carriers = [cosine_carrier(freq, ph, duration, sample_rate).samples for ph in QPSK_PHASES]
        name, center = "cosine-QPSK", freq
    elif kind == "lfm":
        spec = lfm_spec or LfmSpec(duration=duration, sample_rate=sample_rate)
        carriers = [lfm(spec.with_phase(ph)).samples for ph in QPSK_PHASES]
        name, center = "LFM-QPSK", spec.center_frequency
        sample_rate = spec.sample_rate
    else:
        raise ValueError(f"unknown QPSK carrier kind {kind!r}")
    return CarrierAlphabet(name, np.vstack(carriers), sample_rate, QPSK_BITS, center)


def is_latin_square(table):
    size = len(table)
    cells = set(range(1, size + 1))
    rows_ok = all(set(row) == cells for row in table)
    cols_ok = all({row[j] for row in table} == cells for j in range(size))
    return rows_ok and cols_ok


CWID_PHASES = {
    4: ((0.0, ""),),
    8: ((0.0, "0"), (math.pi, "1")),
    16: tuple(zip(QPSK_PHASES, QPSK_BITS)),
}


def build_cwid_alphabet(order, base=None, table=REORGANIZATION_TABLE):
    """4-, 8- or 16-ary CWID alphabet.

    Each base phase contributes one carrier per row of ``table``; the symbol
    bits are the phase bits (Gray-coded for 16-ary) followed by the row bits.
    """
    if order not in CWID_PHASES:
        raise ValueError(f"unsupported CWID order {order}; choose 4, 8 or 16")
    if not is_latin_square(table):
        raise ValueError("reorganization table must be a Latin square")
    base = base or LfmSpec()
    n = symbol_samples(base.duration, base.sample_rate)
    t = np.arange(n) / base.sample_rate
    split = split_at_peaks(base, len(table[0]))

    carriers, bits, bases, placements = [], [], [], []
    for b_index, (phase, phase_bits) in enumerate(CWID_PHASES[order]):
        spec = base.with_phase(phase)
        bases.append(spec)
        for row, row_bits in zip(table, ROW_BITS):
            perm = tuple(p - 1 for p in row)
            carriers.append(reorganized_value(spec, split, perm, t))
            bits.append(phase_bits + row_bits)
            placements.append((b_index, perm))
    return CarrierAlphabet(f"CWID-{order}", np.vstack(carriers), base.sample_rate, tuple(bits),
                           base.center_frequency, tuple(bases), tuple(placements), split)


def alphabet_join_gaps(alphabet):
    """All join discontinuities of a CWID alphabet (empty for QPSK)."""
    gaps = []
    for b_index, perm in alphabet.placements:
        gaps.extend(join_gaps(alphabet.bases[b_index], alphabet.split, perm))
    return gaps


def carrier_separation(alphabet):
    """Peak normalized cross-correlation magnitude between every carrier pair."""
    k = alphabet.order
    energy = np.sum(alphabet.carriers ** 2, axis=1)
    out = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            r = cross_correlate(alphabet.carrier(i), alphabet.carrier(j)).samples
            out[i, j] = out[j, i] = np.max(np.abs(r)) / math.sqrt(energy[i] * energy[j])
    return out


def build_alphabet(scheme, base=None, cosine_freq=11500.0):
    """Alphabet for a scheme label as used in experiment configs."""
    base = base or LfmSpec()
    if scheme == "cosine-QPSK":
        return build_qpsk_alphabet("cosine", freq=cosine_freq, duration=base.duration,
                                   sample_rate=base.sample_rate)
    if scheme == "LFM-QPSK":
        return build_qpsk_alphabet("lfm", lfm_spec=base)
    if scheme.startswith("CWID-"):
        return build_cwid_alphabet(int(scheme.split("-")[1]), base)
    raise ValueError(f"unknown scheme {scheme!r}")


SCHEMES = ("cosine-QPSK", "LFM-QPSK", "CWID-4", "CWID-8", "CWID-16")
