"""Passband simulation of CWID, QPSK and LFM-QPSK links over a multipath
underwater channel with passive time-reversal equalization."""

from .channel import ChannelEnvironment, FadingConfig, apply_channel, compute_eigenrays
from .dsp import RngStream, SampledSignal, convolve, cross_correlate, time_reverse
from .harness import (BerReport, ExperimentConfig, ReceiverConfig, ascii_roundtrip,
                      run_ber_table, run_link_once, run_snr_sweep)
from .modem import FrameLayout, demodulate, effective_bit_rate, modulate
from .ptrm import equalize
from .waveforms import SCHEMES, build_alphabet

__version__ = "0.1.0"

__all__ = [
    "BerReport", "ChannelEnvironment", "ExperimentConfig", "FadingConfig", "FrameLayout",
    "ReceiverConfig", "RngStream", "SCHEMES", "SampledSignal", "apply_channel",
    "ascii_roundtrip", "build_alphabet", "compute_eigenrays", "convolve", "cross_correlate",
    "demodulate", "effective_bit_rate", "equalize", "modulate", "run_ber_table",
    "run_link_once", "run_snr_sweep", "time_reverse",
]
