"""Passive time-reversal equalization.

The received probe ``P`` carries the channel response. Filtering the
received data ``S`` with the time-reversed probe collapses the multipath
into its autocorrelation, which peaks at lag zero; summing that over the
array sharpens the peak, and a final pass through the clean probe turns
the probe autocorrelation back into (approximately) the data waveform.

All outputs keep their ``origin`` so that lag zero of the equalized stream
is the start of the first data symbol.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .dsp import SampledSignal, cross_correlate
from .modem import EqualizedStream

DEFAULT_REGULARIZATION = 0.001


@dataclass(frozen=True)
class HydrophoneCapture:
    """One array element's received frame.

    ``arrival_time`` and ``time_scale`` are the ideal-synchronization
    values: when the probe starts arriving, and the Doppler compression of
    frame time. ``probe_received`` optionally supplies a separate capture
    for the probe window (for example a noise-free one when channel probing
    is treated as ideal); ``received`` is used when it is absent.
    """

    hydrophone_index: int
    depth: float
    received: SampledSignal
    arrival_time: float = 0.0
    time_scale: float = 1.0
    probe_received: SampledSignal = None


def segment_starts(capture, layout):
    """Sample indices where the probe and data windows open."""
    fs = capture.received.sample_rate
    probe_start = int(np.floor(capture.arrival_time * fs + 0.5)) + capture.received.origin
    gap = int(np.floor(layout.data_start(fs) / capture.time_scale + 0.5))
    return probe_start, probe_start + gap


def extract_segments(capture, layout, probe_window=None):
    """Cut the received probe window ``P`` and data window ``S``.

    ``P`` spans ``Tp + T1`` (or ``probe_window`` seconds when given) from the
    probe arrival; ``S`` spans ``Ts + T2`` from the data arrival. Both are
    returned with origin 0 at their window start.
    """
    rx = capture.received
    prx = rx if capture.probe_received is None else capture.probe_received
    fs = rx.sample_rate
    p_len = layout.data_start(fs) if probe_window is None else int(np.floor(probe_window * fs + 0.5))
    s_len = layout.frame_samples(fs) - layout.data_start(fs)
    p0, s0 = segment_starts(capture, layout)
    if prx.sample_rate != fs or prx.origin != rx.origin:
        raise ValueError("probe capture and data capture are not aligned")
    if p0 < 0 or p0 + p_len > len(prx) or s0 + s_len > len(rx):
        raise ValueError(
            f"capture of {len(rx)} samples too short for windows "
            f"[{p0}, {p0 + p_len}) and [{s0}, {s0 + s_len})")
    P = SampledSignal(prx.samples[p0:p0 + p_len], fs)
    S = SampledSignal(rx.samples[s0:s0 + s_len], fs)
    return P, S


def equalize_single(P, S):
    """Filter ``S`` with the time-reversed received probe.

    Convolving with ``P(-t)`` is the same as correlating against ``P``.
    """
    return cross_correlate(S, P)


def combine_hydrophones(streams):
    """Element-wise sum of per-hydrophone outputs (uniform weights)."""
    streams = list(streams)
    if not streams:
        raise ValueError("no streams to combine")
    first = streams[0]
    for s in streams[1:]:
        if len(s) != len(first) or s.origin != first.origin or s.sample_rate != first.sample_rate:
            raise ValueError(
                f"stream mismatch: {len(s)} samples/origin {s.origin} vs "
                f"{len(first)} samples/origin {first.origin}")
    total = np.sum(np.vstack([s.samples for s in streams]), axis=0)
    return first.with_samples(total)


def probe_inverse(probe_replica, n_fft, regularization=DEFAULT_REGULARIZATION):
    """Frequency response of the final-pass filter.

    ``P / (|P|^2 + eps * max|P|^2)``: the clean probe's matched response
    divided by its (regularized) power spectrum, so that the pair of probe
    passes composes to a flat in-band response instead of the probe
    autocorrelation. ``regularization=None`` gives the plain probe pass.
    """
    spec = np.fft.rfft(probe_replica.samples, n_fft)
    if regularization is None:
        return spec
    power = np.abs(spec) ** 2
    return spec / (power + regularization * power.max())


def finalize(R_combined, probe_replica, symbol_length=None, n_symbols=0, time_scale=1.0,
             regularization=DEFAULT_REGULARIZATION):
    """Pass the combined stream through the clean probe and index the symbols.

    The output has the same length and origin as ``convolve(R, probe)``.
    """
    if R_combined.sample_rate != probe_replica.sample_rate:
        raise ValueError("sample rate mismatch between stream and probe replica")
    n_out = len(R_combined) + len(probe_replica) - 1
    n_fft = int(2 ** np.ceil(np.log2(n_out)))
    filt = probe_inverse(probe_replica, n_fft, regularization)
    out = np.fft.irfft(np.fft.rfft(R_combined.samples, n_fft) * filt, n_fft)[:n_out]
    r = SampledSignal(out, R_combined.sample_rate, R_combined.origin + probe_replica.origin)
    n = symbol_length if symbol_length is not None else len(probe_replica)
    return EqualizedStream(r, r.origin, n, n_symbols, n / time_scale)


def equalize(captures, layout, probe_replica, symbol_length, n_symbols, probe_window=None,
             regularization=DEFAULT_REGULARIZATION, debug_dir=None):
    """Full array equalizer: per-element windows, correlation, overlay, final pass."""
    partial = []
    scale = captures[0].time_scale
    for cap in captures:
        P, S = extract_segments(cap, layout, probe_window)
        R = equalize_single(P, S)
        partial.append(R)
        if debug_dir is not None:
            dump_debug(debug_dir, cap.hydrophone_index, P, R)
    combined = combine_hydrophones(partial)
    eq = finalize(combined, probe_replica, symbol_length, n_symbols, scale, regularization)
    if debug_dir is not None:
        dump_debug(debug_dir, "combined", None, eq.signal)
    return eq


def dump_debug(directory, tag, P, R):
    names = {"P": P, "R": R}
    for key, sig in names.items():
        if sig is None:
            continue
        with open(f"{directory}/{key}_{tag}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time_s", key])
            for t, v in zip(sig.times, sig.samples):
                writer.writerow([repr(float(t)), repr(float(v))])
