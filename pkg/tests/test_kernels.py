import numpy as np
import pytest

import oracles
from cwidsim import channel as ch
from cwidsim import kernels
from cwidsim.dsp import SampledSignal

FS = 96000.0


@pytest.fixture
def restore_backend():
    name = kernels.backend_name()
    yield
    kernels.use_backend(name)


def test_table_matches_direct_kernel():
    u = np.array([0.0, 0.25, 1.5, 17.3, 31.9])
    idx = np.floor(u * kernels.OVERSAMPLE).astype(int)
    frac = u * kernels.OVERSAMPLE - idx
    approx = kernels.TABLE[idx] * (1 - frac) + kernels.TABLE[idx + 1] * frac
    assert np.allclose(approx, kernels.sinc_kernel(u), atol=1e-7)
    assert kernels.sinc_kernel(0.0) == 1.0
    assert kernels.sinc_kernel(32.0) == 0.0


def test_integer_positions_are_exact(restore_backend):
    x = np.random.default_rng(0).standard_normal(50)
    for name in kernels.available_backends():
        kernels.use_backend(name)
        assert np.array_equal(kernels.interp(x, np.arange(50.0)), x)
        assert np.array_equal(kernels.interp(x, np.array([-1.0, 50.0, 80.0])), np.zeros(3))


def test_unknown_backend(restore_backend):
    with pytest.raises(ValueError, match="not available"):
        kernels.use_backend("gpu")


@pytest.mark.skipif("compiled" not in kernels.available_backends(), reason="extension not built")
def test_backends_agree(restore_backend):
    rng = np.random.default_rng(3)
    x = rng.standard_normal(3000)
    pos = np.sort(rng.uniform(-40, 3040, 5000))
    refs = rng.standard_normal((16, 33))
    starts = np.arange(10, 2800, 33)
    out = {}
    for name in ("python", "compiled"):
        kernels.use_backend(name)
        out[name] = (kernels.interp(x, pos), kernels.slot_correlate(x, starts, refs, 3))
    assert np.allclose(out["python"][0], out["compiled"][0], rtol=1e-12, atol=1e-12)
    assert np.allclose(out["python"][1], out["compiled"][1], rtol=1e-12, atol=1e-12)


def test_slot_correlate_definition():
    rng = np.random.default_rng(4)
    r = rng.standard_normal(200)
    refs = rng.standard_normal((3, 10))
    starts = np.array([20, 50])
    got = kernels.slot_correlate(r, starts, refs, 2)
    assert got.shape == (2, 5, 3)
    for s, start in enumerate(starts):
        for li, lag in enumerate(range(-2, 3)):
            for k in range(3):
                want = sum(r[start + lag + m] * refs[k, m] for m in range(10))
                assert got[s, li, k] == pytest.approx(want, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("backend", ["python", "compiled"])
def test_channel_matches_oracle(backend, restore_backend):
    if backend not in kernels.available_backends():
        pytest.skip("extension not built")
    kernels.use_backend(backend)
    rng = np.random.default_rng(17)
    x = rng.standard_normal(128)
    taps = ((0.9, 0.0), (-0.5, 3.3 / FS), (0.25, 11.71 / FS))
    real = ch.ChannelRealization(tuple(ch.Tap(g, d) for g, d in taps), doppler_factor=1.0004)
    y = ch.apply_channel(SampledSignal(x, FS), real).samples
    want = oracles.channel(x, taps, FS, len(y), scale=1.0004)
    assert np.max(np.abs(y - want)) <= 1e-4 * np.max(np.abs(want))
