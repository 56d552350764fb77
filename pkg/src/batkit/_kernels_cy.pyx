# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: GRU sequence recurrence (forward + BPTT) and
windowed-sinc tap accumulation for the image-source simulator.

Mirrors batkit._kernels_py; batkit.kernels picks whichever is available.
"""

import numpy as np

cimport cython
from libc.math cimport ceil, cos, exp, sin, tanh

cdef double M_PI = 3.141592653589793238462643383279502884

BACKEND = "compiled"

ctypedef fused floating:
    float
    double


cdef inline floating _sigmoid(floating x) noexcept nogil:
    return <floating>(1.0 / (1.0 + exp(-<double>x)))


def gru_forward(floating[:, ::1] x_gates, floating[:, ::1] u_zr,
                floating[:, ::1] u_h, floating[::1] h0):
    """See batkit._kernels_py.gru_forward."""
    cdef Py_ssize_t length = x_gates.shape[0]
    cdef Py_ssize_t hidden = x_gates.shape[1] // 3
    if floating is float:
        dtype = np.float32
    else:
        dtype = np.float64
    h_np = np.empty((length, hidden), dtype=dtype)
    z_np = np.empty((length, hidden), dtype=dtype)
    r_np = np.empty((length, hidden), dtype=dtype)
    n_np = np.empty((length, hidden), dtype=dtype)
    prev_np = np.array(h0, dtype=dtype, copy=True)
    cdef floating[:, ::1] h_seq = h_np
    cdef floating[:, ::1] z_seq = z_np
    cdef floating[:, ::1] r_seq = r_np
    cdef floating[:, ::1] n_seq = n_np
    cdef floating[::1] h_prev = prev_np
    cdef Py_ssize_t t, i, j
    cdef floating acc_z, acc_r, acc_n, z, r, n, hp
    with nogil:
        for t in range(length):
            for i in range(hidden):
                acc_z = x_gates[t, i]
                acc_r = x_gates[t, hidden + i]
                for j in range(hidden):
                    hp = h_prev[j]
                    acc_z = acc_z + hp * u_zr[j, i]
                    acc_r = acc_r + hp * u_zr[j, hidden + i]
                z_seq[t, i] = _sigmoid(acc_z)
                r_seq[t, i] = _sigmoid(acc_r)
            for i in range(hidden):
                acc_n = x_gates[t, 2 * hidden + i]
                for j in range(hidden):
                    acc_n = acc_n + r_seq[t, j] * h_prev[j] * u_h[j, i]
                n_seq[t, i] = <floating>tanh(<double>acc_n)
            for i in range(hidden):
                z = z_seq[t, i]
                n = n_seq[t, i]
                h_prev[i] = (<floating>1.0 - z) * h_prev[i] + z * n
                h_seq[t, i] = h_prev[i]
    return h_np, z_np, r_np, n_np


def gru_backward(floating[:, ::1] dh_seq, floating[:, ::1] x_gates,
                 floating[:, ::1] u_zr, floating[:, ::1] u_h,
                 floating[::1] h0, floating[:, ::1] h_seq,
                 floating[:, ::1] z_seq, floating[:, ::1] r_seq,
                 floating[:, ::1] n_seq):
    """See batkit._kernels_py.gru_backward."""
    cdef Py_ssize_t length = h_seq.shape[0]
    cdef Py_ssize_t hidden = h_seq.shape[1]
    if floating is float:
        dtype = np.float32
    else:
        dtype = np.float64
    dx_np = np.empty((length, 3 * hidden), dtype=dtype)
    du_zr_np = np.zeros((hidden, 2 * hidden), dtype=dtype)
    du_h_np = np.zeros((hidden, hidden), dtype=dtype)
    dh_np = np.zeros(hidden, dtype=dtype)
    work_np = np.zeros(3 * hidden, dtype=dtype)
    cdef floating[:, ::1] dx_gates = dx_np
    cdef floating[:, ::1] du_zr = du_zr_np
    cdef floating[:, ::1] du_h = du_h_np
    cdef floating[::1] dh = dh_np
    # work holds [dh_prev | drh | unused] scratch per frame
    cdef floating[::1] work = work_np
    cdef Py_ssize_t t, i, j
    cdef floating z, r, n, hp, dht, dz, dn, dgn, dr, dgz, dgr, acc
    with nogil:
        for t in range(length - 1, -1, -1):
            for i in range(hidden):
                work[i] = 0.0
                work[hidden + i] = 0.0
            for i in range(hidden):
                hp = h_seq[t - 1, i] if t > 0 else h0[i]
                z = z_seq[t, i]
                n = n_seq[t, i]
                dht = dh_seq[t, i] + dh[i]
                dz = dht * (n - hp)
                dn = dht * z
                work[i] = dht * (<floating>1.0 - z)
                dgn = dn * (<floating>1.0 - n * n)
                dx_gates[t, 2 * hidden + i] = dgn
                dgz = dz * z * (<floating>1.0 - z)
                dx_gates[t, i] = dgz
            # drh = dgn @ u_h.T ; du_h += outer(r*h_prev, dgn)
            for i in range(hidden):
                hp = h_seq[t - 1, i] if t > 0 else h0[i]
                r = r_seq[t, i]
                acc = 0.0
                for j in range(hidden):
                    dgn = dx_gates[t, 2 * hidden + j]
                    acc = acc + dgn * u_h[i, j]
                    du_h[i, j] = du_h[i, j] + r * hp * dgn
                work[hidden + i] = acc
            for i in range(hidden):
                hp = h_seq[t - 1, i] if t > 0 else h0[i]
                r = r_seq[t, i]
                dr = work[hidden + i] * hp
                work[i] = work[i] + work[hidden + i] * r
                dgr = dr * r * (<floating>1.0 - r)
                dx_gates[t, hidden + i] = dgr
            # dh_prev += dgzr @ u_zr.T ; du_zr += outer(h_prev, dgzr)
            for i in range(hidden):
                hp = h_seq[t - 1, i] if t > 0 else h0[i]
                acc = 0.0
                for j in range(2 * hidden):
                    dgz = dx_gates[t, j]
                    acc = acc + dgz * u_zr[i, j]
                    du_zr[i, j] = du_zr[i, j] + hp * dgz
                dh[i] = work[i] + acc
    return dx_np, du_zr_np, du_h_np, dh_np


def accumulate_taps(double[::1] out, double[::1] delays, double[::1] amps,
                    int half_width=8):
    """See batkit._kernels_py.accumulate_taps."""
    cdef Py_ssize_t n = out.shape[0]
    cdef Py_ssize_t count = delays.shape[0]
    cdef Py_ssize_t i, k, k0
    cdef double d, a, t, w, s
    with nogil:
        for i in range(count):
            d = delays[i]
            a = amps[i]
            k0 = <Py_ssize_t>ceil(d) - half_width
            for k in range(k0, k0 + 2 * half_width):
                if k < 0 or k >= n:
                    continue
                t = k - d
                w = 0.5 * (1.0 + cos(M_PI * t / half_width))
                if t == 0.0:
                    s = 1.0
                else:
                    s = sin(M_PI * t) / (M_PI * t)
                out[k] += a * s * w
    return np.asarray(out)
