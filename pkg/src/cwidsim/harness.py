"""Monte-Carlo link runner: bit-error tables, SNR sweeps and text round-trips.

Every random draw comes from an :class:`~cwidsim.dsp.RngStream` keyed by
what it is for, so results do not depend on evaluation order or on how many
worker processes are used:

* ``(point,)``: one SNR point of one run;
* ``(point, 0)``: payload bits;
* ``(point, 1, frame, hydrophone)``: channel realization;
* ``(point, 2, frame, hydrophone)``: receiver noise;
* ``(point, 3, frame, hydrophone)``: probe-window noise (when not ideal).

All schemes share the same streams, so a table compares them over the same
channel draws.
"""

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import channel as ch
from .dsp import RngStream, add_awgn, measure_power
from .modem import FrameLayout, default_probe, demodulate, effective_bit_rate, modulate
from .ptrm import DEFAULT_REGULARIZATION, HydrophoneCapture, equalize
from .waveforms import SCHEMES, build_alphabet

logger = logging.getLogger(__name__)

STUDY_MESSAGE = "New modulation method for wireless acoustic communication"
NOISE_REFERENCE = "per-hydrophone, noiseless data-window power"


def array_depths(first=8.2, spacing=1.7, count=9):
    return tuple(round(first + spacing * i, 9) for i in range(count))


@dataclass(frozen=True)
class ReceiverConfig:
    """Receiver-side knobs.

    Parameters
    ----------
    probe_snr_db : float or None
        SNR of the probe window. ``None`` treats channel probing as ideal
        (the probe window is captured without noise).
    probe_window : float or None
        Length of the probe window in seconds; ``None`` means ``Tp + T1``.
    regularization : float or None
        Final-pass inverse-filter regularization; ``None`` uses a plain
        probe pass.
    max_lag : int
        Lag search half-width in samples for the matched filter.
    """

    probe_snr_db: float = None
    probe_window: float = None
    regularization: float = DEFAULT_REGULARIZATION
    max_lag: int = 1

    def __post_init__(self):
        if self.probe_window is not None and not self.probe_window > 0:
            raise ValueError(f"probe_window must be positive, got {self.probe_window}")
        if self.regularization is not None and not self.regularization > 0:
            raise ValueError(f"regularization must be positive, got {self.regularization}")
        if self.max_lag < 0:
            raise ValueError(f"max_lag must be non-negative, got {self.max_lag}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one scheme's run depends on."""

    scheme: str = "CWID-4"
    env: ch.ChannelEnvironment = field(default_factory=ch.ChannelEnvironment)
    fading: ch.FadingConfig = field(default_factory=ch.FadingConfig)
    layout: FrameLayout = field(default_factory=FrameLayout)
    hydrophone_depths: tuple = field(default_factory=array_depths)
    snr_points: tuple = (8.0,)
    n_bits: int = 4000
    seed: int = 1
    receiver: ReceiverConfig = field(default_factory=ReceiverConfig)
    identity_channel: bool = False

    def __post_init__(self):
        object.__setattr__(self, "hydrophone_depths", tuple(float(d) for d in self.hydrophone_depths))
        object.__setattr__(self, "snr_points", tuple(float(s) for s in self.snr_points))
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not self.n_bits > 0:
            raise ValueError(f"n_bits must be positive, got {self.n_bits}")
        if not self.snr_points:
            raise ValueError("snr_points must not be empty")
        if not self.hydrophone_depths:
            raise ValueError("at least one hydrophone is required")
        for d in self.hydrophone_depths:
            if not 0 < d < self.env.h:
                raise ValueError(f"hydrophone depth {d} m outside the water column (0, {self.env.h})")

    def with_scheme(self, scheme):
        return replace(self, scheme=scheme)


@dataclass(frozen=True)
class BerRecord:
    snr_db: float
    bits_sent: int
    bit_errors: int
    ber: float
    effective_bit_rate: float


@dataclass(frozen=True)
class BerReport:
    scheme: str
    records: tuple
    config_echo: dict
    seed: int
    noise_reference: str = NOISE_REFERENCE

    def __post_init__(self):
        for r in self.records:
            if not 0.0 <= r.ber <= 1.0 or r.bit_errors > r.bits_sent:
                raise ValueError(f"inconsistent record {r}")

    def ber_at(self, snr_db):
        for r in self.records:
            if r.snr_db == snr_db:
                return r.ber
        raise KeyError(snr_db)


class LinkError(RuntimeError):
    """A submodule failure, tagged with where in the link it happened."""


def _probe_and_alphabet(config):
    alphabet = build_alphabet(config.scheme)
    probe = default_probe(config.layout, alphabet.sample_rate)
    return alphabet, probe


def _receive(frame, fi, hi, depth, config, alphabet, snr_db, rng, rays):
    """One hydrophone's capture of one frame."""
    fs = alphabet.sample_rate
    if config.identity_channel:
        real = ch.identity_realization(fi)
    else:
        env = config.env.at_depth(depth)
        real = ch.draw_realization(env, config.fading, rays, rng.child(1, fi, hi), fi)
    clean = ch.apply_channel(frame.waveform, real)
    probe_rx = None
    rx = clean
    if snr_db is not None:
        start = (int(math.floor(real.first_arrival * fs + 0.5))
                 + int(math.floor(config.layout.data_start(fs) / real.doppler_factor + 0.5)))
        stop = start + int(math.ceil(len(frame.symbols) * alphabet.symbol_length / real.doppler_factor))
        ref = measure_power(clean, (start, stop))
        rx = add_awgn(clean, snr_db, ref, rng.child(2, fi, hi))
        if config.receiver.probe_snr_db is None:
            probe_rx = clean
        else:
            probe_rx = add_awgn(clean, config.receiver.probe_snr_db, ref, rng.child(3, fi, hi))
    return HydrophoneCapture(hi, depth, rx, real.first_arrival, real.doppler_factor, probe_rx)


def run_link_once(config, snr_db, rng, trace=False):
    """Send ``config.n_bits`` random bits over the full link once.

    Parameters
    ----------
    config : ExperimentConfig
    snr_db : float or None
        Per-hydrophone SNR; ``None`` disables noise.
    rng : RngStream
        Stream owning every draw of this run.
    trace : bool
        Also return per-frame demodulator decisions.

    Returns
    -------
    sent, received : ndarray of uint8
        ``received`` is trimmed to ``len(sent)``.
    """
    bits = rng.child(0).generator().integers(0, 2, config.n_bits, dtype=np.uint8)
    received, decisions = transmit_bits(bits, config, snr_db, rng, trace)
    if trace:
        return bits, received, decisions
    return bits, received


def transmit_bits(bits, config, snr_db, rng, trace=False):
    """Push a given bit vector through the link; returns ``(received, decisions)``."""
    alphabet, probe = _probe_and_alphabet(config)
    frames = modulate(bits, alphabet, config.layout, probe)
    rays = {}
    if not config.identity_channel:
        for d in config.hydrophone_depths:
            rays[d] = ch.compute_eigenrays(config.env.at_depth(d), alphabet.center_frequency)
    rcv = config.receiver
    out, decisions = [], []
    for fi, frame in enumerate(frames):
        captures = []
        for hi, depth in enumerate(config.hydrophone_depths):
            try:
                captures.append(_receive(frame, fi, hi, depth, config, alphabet, snr_db, rng,
                                         rays.get(depth)))
            except ValueError as exc:
                raise LinkError(f"frame {fi}, hydrophone {hi} ({depth} m): {exc}") from exc
        try:
            eq = equalize(captures, config.layout, probe, alphabet.symbol_length,
                          len(frame.symbols), rcv.probe_window, rcv.regularization)
            got, dec = demodulate(eq, alphabet, rcv.max_lag, trace)
        except ValueError as exc:
            raise LinkError(f"frame {fi}: {exc}") from exc
        out.append(got)
        decisions.extend(dec)
    received = np.concatenate(out)[:len(bits)]
    return received, decisions


def _run_point(args):
    config, index, snr_db = args
    rng = RngStream(config.seed).child(index)
    sent, got = run_link_once(config, snr_db, rng)
    errors = int(np.count_nonzero(sent != got))
    logger.info("%s at %s dB: %d/%d errors", config.scheme, snr_db, errors, sent.size)
    return errors


def _map(units, workers):
    if workers is None or workers <= 1 or len(units) <= 1:
        return [_run_point(u) for u in units]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_point, units))


def _report(config, errors, echo):
    alphabet = build_alphabet(config.scheme)
    rate = effective_bit_rate(alphabet, config.layout)
    records = tuple(BerRecord(snr, config.n_bits, e, e / config.n_bits, rate)
                    for snr, e in zip(config.snr_points, errors))
    return BerReport(config.scheme, records, echo or {}, config.seed)


def run_snr_sweep(config, workers=1, echo=None):
    """BER at every point of ``config.snr_points`` (which must be sorted)."""
    pts = list(config.snr_points)
    if pts != sorted(pts):
        raise ValueError(f"snr_points must be sorted ascending, got {pts}")
    return run_many([config], workers, echo)[0]


def run_many(configs, workers=1, echo=None):
    """Run every SNR point of every config; one report per config, in order."""
    units = [(c, i, snr) for c in configs for i, snr in enumerate(c.snr_points)]
    errors = _map(units, workers)
    reports, k = [], 0
    for c in configs:
        n = len(c.snr_points)
        reports.append(_report(c, errors[k:k + n], echo))
        k += n
    return reports


def run_ber_table(configs, workers=1, echo=None):
    """One report per scheme at each config's SNR points (8 dB in the study)."""
    configs = list(configs)
    if not configs:
        return []
    base = configs[0]
    for c in configs[1:]:
        if c.env != base.env or c.layout != base.layout:
            raise ValueError("table configs must share the environment and frame layout")
    return run_many(configs, workers, echo)


def text_to_bits(message):
    try:
        raw = message.encode("ascii")
    except UnicodeEncodeError as exc:
        raise ValueError(f"message is not ASCII: {exc}") from None
    if not raw:
        raise ValueError("message is empty")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))


def bits_to_text(bits):
    raw = np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()
    return raw.decode("ascii", errors="replace")


def ascii_roundtrip(message, config, snr_db=None, rng=None):
    """Send ``message`` as 8-bit ASCII; returns ``(decoded, ber)``."""
    bits = text_to_bits(message)
    rng = RngStream(config.seed) if rng is None else rng
    received, _ = transmit_bits(bits, config, snr_db, rng)
    ber = float(np.count_nonzero(received != bits)) / bits.size
    return bits_to_text(received), ber


REPORT_FIELDS = ("scheme", "snr_db", "bits", "errors", "ber", "bitrate")


def reports_to_csv(reports, fields=REPORT_FIELDS):
    """CSV text for a list of reports (one row per scheme and SNR point)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for rep in reports:
        for r in rep.records:
            row = {"scheme": rep.scheme, "snr_db": repr(r.snr_db), "bits": r.bits_sent,
                   "errors": r.bit_errors, "ber": repr(r.ber),
                   "bitrate": repr(r.effective_bit_rate)}
            writer.writerow([row[f] for f in fields])
    return buf.getvalue()


def reports_summary(reports):
    """Plain-data summary (for YAML output) including the config echo."""
    return {
        "noise_reference": NOISE_REFERENCE,
        "reports": [{
            "scheme": rep.scheme,
            "seed": rep.seed,
            "points": [{"snr_db": r.snr_db, "bits": r.bits_sent, "errors": r.bit_errors,
                        "ber": r.ber, "bitrate": r.effective_bit_rate} for r in rep.records],
        } for rep in reports],
        "config": reports[0].config_echo if reports else {},
    }
