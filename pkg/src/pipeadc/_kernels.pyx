# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Arithmetic mirrors ``_pykernels`` operation for operation."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()

cdef int[6] WEIGHTS = [64, 32, 16, 8, 4, 2]


def convert_block(const double[::1] volts, const double[::1] gains,
                  const double[::1] offsets, const double[::1] taus,
                  const double[::1] lo_shift, const double[::1] hi_shift,
                  const double[::1] flash_shift, double vref, double t_half,
                  double k_share, double[::1] state):
    cdef Py_ssize_t n = volts.shape[0]
    cdef Py_ssize_t k
    cdef int i, d, f, code
    cdef double v, x, r, target, start
    cdef double decay[7]
    cdef double prev[7]
    cdef double out[7]

    codes_arr = np.empty(n, dtype=np.uint8)
    clipped_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] codes = codes_arr
    cdef unsigned char[::1] clipped = clipped_arr

    for i in range(7):
        decay[i] = exp(-t_half / taus[i]) if taus[i] > 0.0 else 0.0
        prev[i] = state[i]

    for k in range(n):
        v = volts[k]
        if v > vref:
            v = vref
            clipped[k] = 1
        elif v < -vref:
            v = -vref
            clipped[k] = 1
        target = v * (1.0 + gains[0]) + offsets[0]
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
            code += d * WEIGHTS[i]
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
        if code < 0:
            code = 0
        elif code > 255:
            code = 255
        codes[k] = <unsigned char>code
        for i in range(7):
            prev[i] = out[i]

    for i in range(7):
        state[i] = prev[i]
    return codes_arr, clipped_arr


def sd_modulate(const double[::1] x):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t k
    cdef double y = 0.0
    cdef double q = 0.0
    out_arr = np.empty(n, dtype=np.int8)
    cdef signed char[::1] out = out_arr
    for k in range(n):
        y = y + x[k] - q
        q = 1.0 if y >= 0.0 else -1.0
        out[k] = 1 if q > 0 else -1
    return out_arr
