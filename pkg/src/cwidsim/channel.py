"""Three-eigenray underwater acoustic channel.

Geometry and losses are closed-form; each frame draws Rayleigh tap
amplitudes and Gaussian delay jitter that stay fixed for that frame. The
signal transformation is a tapped delay line with band-limited fractional
delays, optionally preceded by a uniform Doppler time-scaling.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .dsp import SampledSignal, add_awgn, measure_power

DEFAULT_RAYS = ((0, 0), (1, 0), (1, 1))


@dataclass(frozen=True)
class ChannelEnvironment:
    """Static physical description of the link.

    Lengths in metres, speeds in m/s, densities in kg/m^3, salinity in ppt,
    temperature in degrees Celsius.
    """

    R: float = 650.0
    d1: float = 15.0
    d2: float = 15.0
    h: float = 30.0
    c: float = 1480.0
    c1: float = 1650.0
    rho: float = 1025.0
    rho1: float = 1900.0
    S: float = 35.0
    T_water: float = 10.0
    A: float = 2.34e-6
    B: float = 3.38e-6

    def __post_init__(self):
        for name in ("R", "d1", "d2", "h", "c", "c1", "rho", "rho1"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not (self.d1 < self.h and self.d2 < self.h):
            raise ValueError(f"depths d1={self.d1}, d2={self.d2} must lie above the bottom h={self.h}")

    def at_depth(self, d2):
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values["d2"] = d2
        return ChannelEnvironment(**values)


@dataclass(frozen=True)
class Eigenray:
    s: int
    b: int
    distance: float
    delay: float
    grazing_angle: float
    loss_product: float


@dataclass(frozen=True)
class FadingConfig:
    """Per-frame randomness.

    ``sigma_jitter`` is a standard deviation in seconds. ``doppler_shift`` is
    the frequency offset in Hz seen at ``reference_frequency``.
    """

    sigma_rayleigh: tuple = (0.5, 1.0, 2.0)
    sigma_jitter: float = 1e-4
    doppler_shift: float = 10.0
    reference_frequency: float = 11500.0

    def __post_init__(self):
        object.__setattr__(self, "sigma_rayleigh", tuple(float(s) for s in self.sigma_rayleigh))
        if any(s <= 0 for s in self.sigma_rayleigh):
            raise ValueError("Rayleigh scales must be positive")
        if self.sigma_jitter < 0:
            raise ValueError("jitter deviation must be non-negative")

    def velocity(self, c):
        """Radial speed producing ``doppler_shift`` at the reference frequency."""
        return self.doppler_shift * c / self.reference_frequency


@dataclass(frozen=True)
class Tap:
    gain: float
    delay: float


@dataclass(frozen=True)
class ChannelRealization:
    taps: tuple
    doppler_factor: float = 1.0
    frame_id: int = 0

    @property
    def first_arrival(self):
        return min(t.delay for t in self.taps)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["tap", "gain", "delay_s"])
            for i, tap in enumerate(self.taps):
                writer.writerow([i, repr(tap.gain), repr(tap.delay)])


def eigenray_distances(env):
    """Direct, surface-reflected and surface-bottom-reflected path lengths."""
    d1 = math.sqrt(env.R ** 2 + (env.d1 - env.d2) ** 2)
    d2 = math.sqrt(env.R ** 2 + (env.d1 + env.d2) ** 2)
    d3 = math.sqrt(env.R ** 2 + (2 * env.h + env.d1 - env.d2) ** 2)
    return d1, d2, d3


def vertical_offset(env, s, b):
    return 2 * b * env.h + env.d1 - (-1) ** (s - b) * env.d2


def eigenray_distance(env, s, b):
    """Path length of the image-source ray with ``s`` surface and ``b`` bottom bounces."""
    return math.hypot(env.R, vertical_offset(env, s, b))


def spreading_loss(D):
    if not D > 0:
        raise ValueError(f"path length must be positive, got {D}")
    return 1.0 / D


def relaxation_frequency(T_water):
    """Relaxation frequency in Hz (the closed form yields kHz)."""
    return 1e3 * 2.19 * 10.0 ** (6.0 - 1520.0 / (T_water + 273.0))


def absorption_loss(D, env, f):
    """Amplitude factor for ``D`` metres at ``f`` Hz.

    The absorption constants ``A`` and ``B`` are calibrated for frequencies
    in kHz and give a rate in nepers per metre.
    """
    f_k = f / 1e3
    ft_k = relaxation_frequency(env.T_water) / 1e3
    rate = env.S * env.A * ft_k * f_k * f_k / (ft_k * ft_k + f_k * f_k) + env.B * f_k * f_k / ft_k
    return math.exp(-0.998 * D * rate)


def surface_loss():
    return -1.0


def grazing_angle(env, s, b):
    den = vertical_offset(env, s, b)
    if den == 0:
        raise ValueError(
            f"grazing angle undefined for s={s}, b={b}: vertical offset "
            f"2*b*h + d1 - (-1)^(s-b)*d2 is zero (d1={env.d1}, d2={env.d2}, h={env.h})")
    return math.atan(env.R / den)


def bottom_loss(env, theta):
    """Magnitude of the fluid-fluid reflection coefficient.

    Past the critical angle the square root is imaginary and the coefficient
    has unit modulus.
    """
    m = env.rho1 / env.rho
    n = env.c / env.c1
    inner = n * n - math.sin(theta) ** 2
    if inner < 0:
        return 1.0
    root = math.sqrt(inner)
    mc = m * math.cos(theta)
    return abs((mc - root) / (mc + root))


def arrival_times(distances, c):
    if not c > 0:
        raise ValueError(f"sound speed must be positive, got {c}")
    return tuple(d / c for d in distances)


def compute_eigenrays(env, frequency, rays=DEFAULT_RAYS):
    """Eigenrays with their loss products at carrier ``frequency``."""
    out = []
    for s, b in rays:
        dist = eigenray_distance(env, s, b)
        loss = spreading_loss(dist) * absorption_loss(dist, env, frequency) * surface_loss() ** s
        theta = float("nan")
        if b > 0:
            theta = grazing_angle(env, s, b)
            loss *= bottom_loss(env, theta) ** b
        out.append(Eigenray(s, b, dist, dist / env.c, theta, loss))
    return out


def doppler_factor(velocity, c):
    if abs(velocity) >= c:
        raise ValueError(f"|velocity| {velocity} must be below the sound speed {c}")
    return 1.0 + velocity / c


def draw_realization(env, fading, rays, rng, frame_id=0, doppler=True):
    """One frame's channel: Rayleigh amplitudes and Gaussian jitter per ray."""
    if len(fading.sigma_rayleigh) != len(rays):
        raise ValueError(
            f"{len(fading.sigma_rayleigh)} Rayleigh scales given for {len(rays)} eigenrays")
    gen = rng.generator()
    amps = gen.rayleigh(np.asarray(fading.sigma_rayleigh))
    if fading.sigma_jitter > 0:
        jitter = gen.normal(0.0, fading.sigma_jitter, len(rays))
    else:
        jitter = np.zeros(len(rays))
    taps = tuple(Tap(float(a * ray.loss_product), float(ray.delay + j))
                 for a, ray, j in zip(amps, rays, jitter))
    factor = doppler_factor(fading.velocity(env.c), env.c) if doppler else 1.0
    return ChannelRealization(taps, factor, frame_id)


def identity_realization(frame_id=0):
    return ChannelRealization((Tap(1.0, 0.0),), 1.0, frame_id)


def channel_output_length(n_in, realization, sample_rate):
    max_delay = max(0.0, max(t.delay for t in realization.taps))
    return n_in + int(math.ceil(max_delay * sample_rate)) + kernels.HALF_WIDTH


def apply_channel(x, realization, snr_db=None, rng=None, reference_window=None):
    """Pass ``x`` through the tapped delay line and optionally add noise.

    Output sample ``n`` is ``sum_i g_i * x(a * (n/fs - tau_i))`` where ``a``
    is the Doppler time-scale factor. Noise power is referenced to the mean
    power of the noiseless output over ``reference_window`` (whole output if
    omitted).
    """
    fs = x.sample_rate
    n_out = channel_output_length(len(x), realization, fs)
    n = np.arange(n_out, dtype=np.float64)
    a = realization.doppler_factor
    y = np.zeros(n_out)
    for tap in realization.taps:
        if tap.gain == 0.0 or tap.delay < 0:
            if tap.delay < 0:
                raise ValueError(f"negative tap delay {tap.delay}")
            continue
        d = tap.delay * fs
        if abs(d - round(d)) < 1e-9:
            d = float(round(d))
        pos = (n - d) * a + x.origin
        y += tap.gain * kernels.interp(x.samples, pos)
    out = SampledSignal(y, fs, 0)
    if snr_db is None:
        return out
    if rng is None:
        raise ValueError("an RngStream is required when adding noise")
    ref = measure_power(out, reference_window)
    return add_awgn(out, snr_db, ref, rng)


def apply_doppler(x, velocity, env):
    """Uniformly time-scale ``x`` by ``1 + velocity / c``."""
    factor = doppler_factor(velocity, env.c)
    if factor == 1.0:
        return x
    n_out = int(math.floor((len(x) - 1) / factor)) + 1
    pos = np.arange(n_out, dtype=np.float64) * factor
    return x.with_samples(kernels.interp(x.samples, pos))
