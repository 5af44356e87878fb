"""Pure-Python versions of the hot loops; same signatures and arithmetic as ``_kernels.pyx``."""

import math

import numpy as np

_WEIGHTS = (64, 32, 16, 8, 4, 2)


def convert_block(volts, gains, offsets, taus, lo_shift, hi_shift, flash_shift,
                  vref, t_half, k_share, state):
    """
    Convert ``volts`` sample by sample, carrying settling memory in ``state``.

    ``gains``, ``offsets`` and ``taus`` have 7 entries (SHA first, then the six
    stages). ``state`` holds the 7 previous-cycle outputs in volts and is
    updated in place. Returns ``(codes, clipped)`` as uint8 arrays.
    """
    n = len(volts)
    codes = np.empty(n, dtype=np.uint8)
    clipped = np.zeros(n, dtype=np.uint8)
    decay = [math.exp(-t_half / t) if t > 0.0 else 0.0 for t in taus]
    prev = [float(s) for s in state]
    for k in range(n):
        v = float(volts[k])
        if v > vref:
            v = vref
            clipped[k] = 1
        elif v < -vref:
            v = -vref
            clipped[k] = 1
        target = v * (1.0 + gains[0]) + offsets[0]
        out = [0.0] * 7
        out[0] = target - (target - prev[0]) * decay[0]
        code = 128
        for i in range(6):
            x = out[i] / vref
            if x > 0.25 + hi_shift[i]:
                d = 1
            elif x < -0.25 + lo_shift[i]:
                d = -1
            else:
                d = 0
            code += d * _WEIGHTS[i]
            r = (1.0 + gains[i + 1]) * (2.0 * x - d) + offsets[i + 1] / vref
            target = r * vref
            start = prev[i + 1] + k_share * prev[(i ^ 1) + 1]
            out[i + 1] = target - (target - start) * decay[i + 1]
        x = out[6] / vref
        f = 0
        if x >= -0.5 + flash_shift[0]:
            f += 1
        if x >= flash_shift[1]:
            f += 1
        if x >= 0.5 + flash_shift[2]:
            f += 1
        code += f - 2
        codes[k] = 0 if code < 0 else (255 if code > 255 else code)
        prev = out
    for i in range(7):
        state[i] = prev[i]
    return codes, clipped


def sd_modulate(x):
    """First-order single-bit loop: y[n] = y[n-1] + x[n] - q[n-1], q = sign(y) with sign(0) = +1."""
    n = len(x)
    out = np.empty(n, dtype=np.int8)
    y = 0.0
    q = 0.0
    for k in range(n):
        y = y + float(x[k]) - q
        q = 1.0 if y >= 0.0 else -1.0
        out[k] = 1 if q > 0 else -1
    return out
