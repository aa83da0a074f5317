import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from cwidsim.dsp import (RngStream, SampledSignal, add_awgn, convolve, cross_correlate,
                         fractional_delay, measure_power, time_reverse, zero_lag_index)

FS = 96000.0

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
vectors = st.lists(finite, min_size=1, max_size=12)


def sig(x, origin=0, fs=FS):
    return SampledSignal(np.asarray(x, dtype=float), fs, origin)


def test_signal_rejects_bad_input():
    with pytest.raises(ValueError):
        SampledSignal([1.0, np.nan], FS)
    with pytest.raises(ValueError):
        SampledSignal([1.0], 0.0)


def test_signal_is_read_only():
    s = sig([1.0, 2.0])
    with pytest.raises(ValueError):
        s.samples[0] = 5.0


def test_rng_reproducible_and_independent():
    a = RngStream(5, 1).generator().standard_normal(1000)
    b = RngStream(5, 1).generator().standard_normal(1000)
    c = RngStream(5, 2).generator().standard_normal(1000)
    assert np.array_equal(a, b)
    assert abs(np.corrcoef(a, c)[0, 1]) < 0.1
    assert not np.array_equal(RngStream(5).child(1).generator().random(4),
                              RngStream(5).child(2).generator().random(4))


def test_correlate_impulse_gives_reversed_copy():
    b = [1.0, 2.0, 3.0]
    r = cross_correlate(sig([1.0]), sig(b))
    assert np.array_equal(r.samples, b[::-1])


def test_correlate_hand_value():
    r = cross_correlate(sig([1, 2, 1]), sig([1, 2, 1]))
    assert r.samples[zero_lag_index(sig([1, 2, 1]), sig([1, 2, 1]))] == 6.0
    assert r.samples[r.origin] == 6.0


@given(vectors, vectors)
@settings(max_examples=60, deadline=None)
def test_correlate_matches_direct_sum(a, b):
    r = cross_correlate(sig(a), sig(b))
    assert np.allclose(r.samples, oracles.correlate(a, b), atol=1e-9)


@given(vectors.filter(lambda v: any(abs(x) > 1e-3 for x in v)))
@settings(max_examples=40, deadline=None)
def test_autocorrelation_peaks_at_zero_lag(a):
    r = cross_correlate(sig(a), sig(a))
    assert r.samples[r.origin] >= np.max(r.samples) - 1e-9


def test_rate_mismatch_rejected():
    with pytest.raises(ValueError, match="sample rate"):
        cross_correlate(sig([1.0]), sig([1.0], fs=48000.0))
    with pytest.raises(ValueError, match="sample rate"):
        convolve(sig([1.0]), sig([1.0], fs=48000.0))


def test_time_reverse():
    assert np.array_equal(time_reverse(sig([1, 2, 3])).samples, [3, 2, 1])
    s = sig([1, 2, 3, 4], origin=1)
    rr = time_reverse(time_reverse(s))
    assert np.array_equal(rr.samples, s.samples) and rr.origin == s.origin


def test_correlate_with_reversed_is_convolution():
    a, b = sig([1.0, 1.0]), sig([1.0, -1.0])
    via_corr = cross_correlate(a, time_reverse(b))
    conv = convolve(a, b)
    assert np.allclose(via_corr.samples, [1.0, 0.0, -1.0])
    assert np.allclose(via_corr.samples, conv.samples)
    assert via_corr.origin == conv.origin


@given(vectors, vectors)
@settings(max_examples=40, deadline=None)
def test_convolve_matches_direct_sum(a, b):
    assert np.allclose(convolve(sig(a), sig(b)).samples, oracles.convolve(a, b), atol=1e-9)


def test_fractional_delay_integer_and_zero():
    x = sig(np.arange(1.0, 9.0))
    assert np.array_equal(fractional_delay(x, 0.0).samples, x.samples)
    shifted = fractional_delay(x, 3 / FS).samples
    assert np.array_equal(shifted, [0, 0, 0, 1, 2, 3, 4, 5])
    with pytest.raises(ValueError):
        fractional_delay(x, -1.0)


def test_fractional_delay_half_sample_tone():
    n = np.arange(2000)
    f = 1000.0
    x = sig(np.cos(2 * np.pi * f * n / FS))
    y = fractional_delay(x, 0.5 / FS).samples
    want = np.cos(2 * np.pi * f * (n - 0.5) / FS)
    interior = slice(100, 1900)
    err = np.max(np.abs(y[interior] - want[interior])) / np.max(np.abs(want))
    assert err < 1e-3


def test_awgn_variance_and_limits():
    zeros = sig(np.zeros(1_000_000))
    noisy = add_awgn(zeros, 0.0, 1.0, RngStream(11))
    assert abs(np.var(noisy.samples) - 1.0) < 0.02
    again = add_awgn(zeros, 0.0, 1.0, RngStream(11))
    assert np.array_equal(noisy.samples, again.samples)
    x = sig(np.ones(100))
    assert np.allclose(add_awgn(x, 300.0, 1.0, RngStream(1)).samples, 1.0, atol=1e-12)


def test_measure_power():
    n = np.arange(96)
    assert measure_power(sig(np.cos(2 * np.pi * n / 96))) == pytest.approx(0.5)
    assert measure_power(sig(np.zeros(10))) == 0.0
    assert measure_power(sig([3.0, 4.0])) == 12.5
    assert measure_power(sig([1.0, 2.0, 3.0]), (1, 3)) == 6.5
    with pytest.raises(ValueError):
        measure_power(sig([1.0]), (0, 5))
    with pytest.raises(ValueError):
        measure_power(sig([1.0, 2.0]), (1, 1))
