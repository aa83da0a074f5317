"""Pure numpy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` exactly and are used whenever the compiled
extension is not importable.
"""

import numpy as np

_CHUNK = 8192


def interp(x, positions, table, oversample, half_width):
    """Windowed-sinc interpolation of ``x`` at fractional sample ``positions``.

    Samples outside ``x`` are treated as zero. Integral positions return the
    stored sample exactly.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    positions = np.ascontiguousarray(positions, dtype=np.float64)
    n_x = x.shape[0]
    out = np.zeros(positions.shape[0], dtype=np.float64)
    offsets = np.arange(-half_width + 1, half_width + 1)
    # rows kept below reach up to 2 * half_width past either end of x
    pad = 2 * half_width
    x_pad = np.concatenate([np.zeros(pad), x, np.zeros(pad)])
    limit = half_width * oversample

    for lo in range(0, positions.shape[0], _CHUNK):
        p = positions[lo:lo + _CHUNK]
        base = np.floor(p)
        frac = p - base
        base = base.astype(np.int64)

        exact = frac == 0.0
        inside = (base >= 0) & (base < n_x)
        chunk = np.zeros(p.shape[0])
        hit = exact & inside
        chunk[hit] = x[base[hit]]

        frac_rows = ~exact
        if np.any(frac_rows):
            b = base[frac_rows]
            f = frac[frac_rows]
            # clip rows that cannot touch x at all; they stay zero
            keep = (b + half_width >= 0) & (b - half_width + 1 < n_x)
            b = b[keep]
            f = f[keep]
            idx = b[:, None] + offsets[None, :]
            u = np.abs(f[:, None] - offsets[None, :]) * oversample
            j = np.minimum(u.astype(np.int64), limit)
            w = u - j
            h = table[j] * (1.0 - w) + table[j + 1] * w
            vals = x_pad[idx + pad]
            rows = np.flatnonzero(frac_rows)[keep]
            chunk[rows] = np.einsum("ij,ij->i", vals, h)
        out[lo:lo + _CHUNK] = chunk
    return out


def slot_correlate(r, starts, refs, max_lag):
    """Correlate each symbol slot against every reference over ``±max_lag``.

    Returns an array of shape ``(n_slots, 2*max_lag + 1, n_refs)`` whose entry
    ``[s, l, k]`` is ``sum_m r[starts[s] + l - max_lag + m] * refs[k, m]``.
    """
    r = np.ascontiguousarray(r, dtype=np.float64)
    refs = np.ascontiguousarray(refs, dtype=np.float64)
    starts = np.asarray(starts, dtype=np.int64)
    n_len = refs.shape[1]
    pad = max_lag + n_len
    r_pad = np.concatenate([np.zeros(pad), r, np.zeros(pad)])
    windows = np.lib.stride_tricks.sliding_window_view(r_pad, n_len)
    lags = np.arange(-max_lag, max_lag + 1)
    idx = starts[:, None] + lags[None, :] + pad
    return np.einsum("slm,km->slk", windows[idx], refs)
