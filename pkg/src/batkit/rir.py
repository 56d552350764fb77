"""Shoebox room impulse responses via the image-source method.

Uniform wall absorption is derived from the requested T60 by Sabine
inversion; reflections are kept until their amplitude falls 60 dB below
the direct path. Fractional delays use a 16-tap windowed sinc.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels

SPEED_OF_SOUND = 343.0
SINC_HALF_WIDTH = 8
_T60_MAX = 1.5


@dataclass(frozen=True)
class RoomSpec:
    dimensions: tuple  # (lx, ly, lz) meters
    t60: float         # seconds
    array_center: tuple = (0.0, 0.0, 0.0)
    array_yaw: float = 0.0  # radians

    def __post_init__(self):
        dims = np.asarray(self.dimensions, dtype=np.float64)
        if dims.shape != (3,) or np.any(dims <= 0):
            raise ValueError(f"room dimensions must be 3 positive lengths, got {self.dimensions}")
        if not 0.0 <= self.t60 <= _T60_MAX:
            raise ValueError(f"t60 must lie in [0, {_T60_MAX}] s, got {self.t60}")


@dataclass(frozen=True)
class Rir:
    taps: np.ndarray
    sample_rate: int
    direct_delay: int  # samples, rounded direct-path delay


@dataclass(frozen=True)
class RirSplit:
    clean: Rir
    late: Rir


def _inside(pos, dims):
    return np.all(pos > 0.0) and np.all(pos < dims)


def sabine_absorption(dimensions, t60: float) -> float:
    """Uniform absorption a = 0.161 V / (S t60), clamped to (0, 1]."""
    lx, ly, lz = dimensions
    volume = lx * ly * lz
    surface = 2.0 * (lx * ly + ly * lz + lx * lz)
    return min(1.0, 0.161 * volume / (surface * t60))


def _axis_images(length, src, mic, beta, r_direct, amp_floor):
    """Per-axis image coordinates and wall-reflection counts.

    Keeps every (m, p) image that can still pass the amplitude cutoff once
    the other axes add their (nonnegative) reflections and distance:
    beta^n / (4 pi max(r_direct, |coord - mic|)) >= amp_floor. The bound
    decays monotonically with |m|, so enumeration stops at the first |m|
    level that keeps nothing.
    """
    coords, counts = [src], [0]
    m_abs = 1
    while True:
        kept = False
        candidates = [(m, p) for m in (m_abs, -m_abs) for p in (0, 1)]
        if m_abs == 1:
            candidates.append((0, 1))  # single reflection through the near wall
        for m, p in candidates:
            n_refl = abs(m - p) + abs(m)
            coord = (1 - 2 * p) * src + 2 * m * length
            dist = max(r_direct, abs(coord - mic))
            if beta**n_refl / (4.0 * np.pi * dist) >= amp_floor:
                coords.append(coord)
                counts.append(n_refl)
                kept = True
        if not kept:
            break
        m_abs += 1
    return np.array(coords), np.array(counts, dtype=np.int64)


def simulate_rir(
    room: RoomSpec,
    source_pos,
    mic_pos,
    rng_seed: int = 0,
    sample_rate: int = 16000,
) -> Rir:
    """Image-source RIR between one source and one microphone.

    Image positions beyond the direct path get a deterministic 5 mm
    jitter (seeded by rng_seed) to break up sweeping-echo artifacts.
    """
    dims = np.asarray(room.dimensions, dtype=np.float64)
    src = np.asarray(source_pos, dtype=np.float64)
    mic = np.asarray(mic_pos, dtype=np.float64)
    if not _inside(src, dims):
        raise ValueError(f"source {source_pos} not strictly inside room {room.dimensions}")
    if not _inside(mic, dims):
        raise ValueError(f"microphone {mic_pos} not strictly inside room {room.dimensions}")

    fs = sample_rate
    d_direct = float(np.linalg.norm(src - mic))
    amp_direct = 1.0 / (4.0 * np.pi * d_direct)
    direct_delay = int(round(d_direct / SPEED_OF_SOUND * fs))

    beta = 0.0
    if room.t60 > 0.0:
        beta = np.sqrt(1.0 - sabine_absorption(dims, room.t60))

    if beta == 0.0:
        delays = np.array([d_direct / SPEED_OF_SOUND * fs])
        amps = np.array([amp_direct])
    else:
        amp_min = amp_direct * 1e-3  # -60 dB below the direct-path amplitude
        per_axis = [
            _axis_images(dims[i], src[i], mic[i], beta, d_direct, amp_min)
            for i in range(3)
        ]
        cx, nx = per_axis[0]
        cy, ny = per_axis[1]
        cz, nz = per_axis[2]
        n_refl = (
            nx[:, None, None] + ny[None, :, None] + nz[None, None, :]
        ).ravel()
        beta_pow = beta ** n_refl.astype(np.float64)
        pos = np.empty((n_refl.size, 3))
        shape = (len(cx), len(cy), len(cz))
        pos[:, 0] = np.broadcast_to(cx[:, None, None], shape).ravel()
        pos[:, 1] = np.broadcast_to(cy[None, :, None], shape).ravel()
        pos[:, 2] = np.broadcast_to(cz[None, None, :], shape).ravel()
        rng = np.random.default_rng(np.random.SeedSequence([rng_seed & 0xFFFFFFFF, 0x5151]))
        jitter = rng.normal(0.0, 0.005, size=pos.shape)
        jitter[n_refl == 0] = 0.0
        pos += jitter
        r = np.linalg.norm(pos - mic[None, :], axis=1)
        r = np.maximum(r, 1e-3)
        amps = beta_pow / (4.0 * np.pi * r)
        keep = (amps >= amp_min) | (n_refl == 0)
        amps = amps[keep]
        delays = r[keep] / SPEED_OF_SOUND * fs

    n_taps = int(np.ceil(delays.max())) + SINC_HALF_WIDTH + 2
    taps = np.zeros(n_taps)
    kernels.accumulate_taps(taps, np.ascontiguousarray(delays), np.ascontiguousarray(amps), SINC_HALF_WIDTH)
    return Rir(taps, fs, direct_delay)


def split_clean_late(rir: Rir, early_ms: float = 20.0, target_t60: float = 0.2) -> RirSplit:
    """Split an RIR into a decay-limited clean part and the exact residual.

    The clean part keeps everything up to early_ms past the direct tap and
    afterwards is capped to a 60 dB / target_t60 decay envelope; the late
    part is rir - clean, so the split reassembles exactly.
    """
    if len(rir.taps) == 0:
        raise ValueError("empty RIR")
    if early_ms < 0:
        raise ValueError(f"early_ms must be nonnegative, got {early_ms}")
    if target_t60 <= 0:
        raise ValueError(f"target_t60 must be positive, got {target_t60}")
    fs = rir.sample_rate
    t = np.arange(len(rir.taps), dtype=np.float64)
    t_edge = rir.direct_delay + early_ms * fs / 1000.0
    env = np.minimum(1.0, 10.0 ** (-3.0 * ((t - t_edge) / fs) / target_t60))
    clean_taps = rir.taps * env
    late_taps = rir.taps - clean_taps
    return RirSplit(
        clean=Rir(clean_taps, fs, rir.direct_delay),
        late=Rir(late_taps, fs, rir.direct_delay),
    )


def schroeder_curve(taps: np.ndarray) -> np.ndarray:
    """Backward-integrated energy decay in dB, normalized to 0 at the start."""
    energy = np.cumsum((taps**2)[::-1])[::-1]
    total = energy[0]
    if total <= 0:
        raise ValueError("RIR has no energy")
    return 10.0 * np.log10(np.maximum(energy / total, 1e-300))


def estimate_t60(rir: Rir) -> float:
    """T60 from a linear fit of the Schroeder curve.

    Fits from -5 dB down to -30 dB, but never into the region where the
    -60 dB image truncation has thinned the response: individual taps at
    time t sit 20 log10(t / t_direct) dB above the collective envelope,
    so the truncation starts to bite near
    -60 + 20 log10(n_taps / direct_delay) dB.
    """
    curve = schroeder_curve(rir.taps)
    cliff = -60.0 + 20.0 * np.log10(len(rir.taps) / max(rir.direct_delay, 1))
    stop = min(max(-30.0, cliff + 4.0), -13.0)
    sel = (curve <= -5.0) & (curve >= stop)
    if np.count_nonzero(sel) < 8:
        return 0.0
    t = np.arange(len(curve))[sel] / rir.sample_rate
    slope, _ = np.polyfit(t, curve[sel], 1)
    if slope >= 0:
        return float("inf")
    return -60.0 / slope
