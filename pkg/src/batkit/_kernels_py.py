"""Pure numpy implementations of the hot kernels.

Reference implementations for batkit._kernels_cy; same signatures, same
results (up to float rounding of the underlying BLAS calls). Selected by
batkit.kernels when the compiled extension is unavailable or when
BATKIT_KERNELS=pure.
"""

import numpy as np

BACKEND = "pure"


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def gru_forward(x_gates, u_zr, u_h, h0):
    """Run a GRU over a sequence given precomputed input projections.

    x_gates: (L, 3H) input projections plus bias, gate order [z, r, n].
    u_zr:    (H, 2H) recurrent weights for the z and r gates.
    u_h:     (H, H) recurrent weights for the candidate.
    h0:      (H,) initial state.

    Returns (h_seq, z_seq, r_seq, n_seq), each (L, H); h_seq[t] is the
    state after frame t. The caches feed gru_backward.
    """
    length, three_h = x_gates.shape
    hidden = three_h // 3
    dtype = x_gates.dtype
    h_seq = np.empty((length, hidden), dtype=dtype)
    z_seq = np.empty((length, hidden), dtype=dtype)
    r_seq = np.empty((length, hidden), dtype=dtype)
    n_seq = np.empty((length, hidden), dtype=dtype)
    h_prev = h0
    for t in range(length):
        gzr = x_gates[t, : 2 * hidden] + h_prev @ u_zr
        z = _sigmoid(gzr[:hidden])
        r = _sigmoid(gzr[hidden:])
        n = np.tanh(x_gates[t, 2 * hidden :] + (r * h_prev) @ u_h)
        h_prev = (1.0 - z) * h_prev + z * n
        h_seq[t] = h_prev
        z_seq[t] = z
        r_seq[t] = r
        n_seq[t] = n
    return h_seq, z_seq, r_seq, n_seq


def gru_backward(dh_seq, x_gates, u_zr, u_h, h0, h_seq, z_seq, r_seq, n_seq):
    """Backpropagate through gru_forward.

    dh_seq is dL/dh_seq. Returns (dx_gates, du_zr, du_h, dh0).
    """
    length, hidden = h_seq.shape
    dtype = x_gates.dtype
    dx_gates = np.empty((length, 3 * hidden), dtype=dtype)
    du_zr = np.zeros_like(u_zr)
    du_h = np.zeros_like(u_h)
    dh = np.zeros(hidden, dtype=dtype)
    for t in range(length - 1, -1, -1):
        h_prev = h_seq[t - 1] if t > 0 else h0
        z = z_seq[t]
        r = r_seq[t]
        n = n_seq[t]
        dht = dh_seq[t] + dh
        dz = dht * (n - h_prev)
        dn = dht * z
        dh_prev = dht * (1.0 - z)
        dgn = dn * (1.0 - n * n)
        dx_gates[t, 2 * hidden :] = dgn
        rh = r * h_prev
        du_h += np.outer(rh, dgn)
        drh = dgn @ u_h.T
        dr = drh * h_prev
        dh_prev += drh * r
        dgz = dz * z * (1.0 - z)
        dgr = dr * r * (1.0 - r)
        dx_gates[t, :hidden] = dgz
        dx_gates[t, hidden : 2 * hidden] = dgr
        dgzr = dx_gates[t, : 2 * hidden]
        du_zr += np.outer(h_prev, dgzr)
        dh_prev += dgzr @ u_zr.T
        dh = dh_prev
    return dx_gates, du_zr, du_h, dh


def accumulate_taps(out, delays, amps, half_width=8):
    """Scatter-add windowed-sinc impulses into a tap buffer.

    For each (delay, amp) pair, adds amp * sinc(k - delay) * hann(k - delay)
    at the 2*half_width integer positions k around the fractional delay.
    Taps falling outside the buffer are dropped.
    """
    n = len(out)
    k0 = np.ceil(delays).astype(np.int64) - half_width
    offsets = np.arange(2 * half_width)
    idx = k0[:, None] + offsets[None, :]
    t = idx - delays[:, None]
    win = 0.5 * (1.0 + np.cos(np.pi * t / half_width))
    vals = amps[:, None] * np.sinc(t) * win
    mask = (idx >= 0) & (idx < n)
    np.add.at(out, idx[mask], vals[mask])
    return out
