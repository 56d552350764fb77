"""Frame-based spectral analysis/synthesis and the ERB filterbank.

All arithmetic here is 64-bit. Frames are laid out (frame, bin) with a
one-sided spectrum of frame_size // 2 + 1 bins. Analysis uses an
unnormalized forward FFT; synthesis relies on numpy's 1/N inverse.
"""

from dataclasses import dataclass

import numpy as np

SAMPLE_RATE = 16000
FRAME_SIZE = 512
HOP = 256


@dataclass(frozen=True)
class Spectrogram:
    """One channel's complex time-frequency representation."""

    data: np.ndarray  # (frames, bins) complex
    frame_size: int = FRAME_SIZE
    hop: int = HOP
    sample_rate: int = SAMPLE_RATE

    @property
    def frames(self) -> int:
        return self.data.shape[0]

    @property
    def bins(self) -> int:
        return self.data.shape[1]

    def same_geometry(self, other: "Spectrogram") -> bool:
        return (
            self.frame_size == other.frame_size
            and self.hop == other.hop
            and self.sample_rate == other.sample_rate
        )


def make_window(frame_size: int) -> np.ndarray:
    """Square-root Hann analysis/synthesis window.

    The squared window satisfies constant overlap-add at 50% hop, so an
    stft/istft round trip is exact on interior samples.
    """
    if frame_size <= 0 or frame_size % 2 != 0:
        raise ValueError(f"frame_size must be positive and even, got {frame_size}")
    n = np.arange(frame_size)
    hann = 0.5 * (1.0 - np.cos(2.0 * np.pi * n / frame_size))  # periodic variant
    return np.sqrt(hann)


def frame_count(n_samples: int, frame_size: int = FRAME_SIZE, hop: int = HOP) -> int:
    """Number of full frames; no padding, trailing remainder dropped."""
    if n_samples < frame_size:
        return 0
    return (n_samples - frame_size) // hop + 1


def stft(
    signal: np.ndarray,
    frame_size: int = FRAME_SIZE,
    hop: int = HOP,
    sample_rate: int = SAMPLE_RATE,
) -> Spectrogram:
    """Windowed one-sided STFT of a real signal."""
    signal = np.asarray(signal, dtype=np.float64)
    if signal.ndim != 1:
        raise ValueError("stft expects a 1-D signal")
    if len(signal) < frame_size:
        raise ValueError(
            f"signal too short: {len(signal)} samples < one frame of {frame_size}"
        )
    window = make_window(frame_size)
    n_frames = frame_count(len(signal), frame_size, hop)
    idx = np.arange(frame_size)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = signal[idx] * window[None, :]
    return Spectrogram(np.fft.rfft(frames, axis=1), frame_size, hop, sample_rate)


def istft(spec: Spectrogram) -> np.ndarray:
    """Overlap-add synthesis; inverse of stft up to edge taper."""
    if spec.bins != spec.frame_size // 2 + 1:
        raise ValueError(
            f"bin count {spec.bins} does not match frame_size {spec.frame_size}"
        )
    window = make_window(spec.frame_size)
    frames = np.fft.irfft(spec.data, n=spec.frame_size, axis=1) * window[None, :]
    n_out = (spec.frames - 1) * spec.hop + spec.frame_size
    out = np.zeros(n_out)
    wsum = np.zeros(n_out)
    w2 = window * window
    for i in range(spec.frames):
        start = i * spec.hop
        out[start : start + spec.frame_size] += frames[i]
        wsum[start : start + spec.frame_size] += w2
    # normalize where the squared-window overlap is defined; COLA makes
    # this a no-op on interior samples
    nz = wsum > 1e-8
    out[nz] /= wsum[nz]
    return out


# ---------------------------------------------------------------------------
# ERB filterbank
# ---------------------------------------------------------------------------


def erb_rate(freq_hz):
    """Map frequency in Hz onto the ERB-rate scale."""
    return 21.4 * np.log10(1.0 + 0.00437 * np.asarray(freq_hz, dtype=np.float64))


@dataclass(frozen=True)
class ErbFilterbank:
    weights: np.ndarray      # (bands, bins), nonnegative
    normalizers: np.ndarray  # (bands,), exact row sums of weights
    centers_hz: np.ndarray   # (bands,), strictly increasing
    sample_rate: int

    @property
    def bands(self) -> int:
        return self.weights.shape[0]

    @property
    def bins(self) -> int:
        return self.weights.shape[1]


def build_erb_filterbank(
    bands: int = 32, bins: int = 257, sample_rate: int = SAMPLE_RATE
) -> ErbFilterbank:
    """Triangular bands with 50% overlap, centers uniform on the ERB-rate scale.

    Band 0's triangle starts at 0 Hz and band bands-1's ends at Nyquist;
    the two edge bands are held at weight 1 outside their center so DC and
    Nyquist bins are always covered.
    """
    if bands < 2:
        raise ValueError(f"need at least 2 bands, got {bands}")
    if bands > bins:
        raise ValueError(f"bands ({bands}) must not exceed bins ({bins})")
    nyquist = sample_rate / 2.0
    freqs = np.arange(bins) * nyquist / (bins - 1)
    e = erb_rate(freqs)
    e_max = erb_rate(nyquist)
    step = e_max / (bands + 1)
    nodes = step * np.arange(bands + 2)  # triangle b spans nodes[b:b+3]
    weights = np.zeros((bands, bins))
    for b in range(bands):
        lo, mid, hi = nodes[b], nodes[b + 1], nodes[b + 2]
        rising = (e - lo) / step
        falling = (hi - e) / step
        w = np.minimum(rising, falling)
        if b == 0:
            w = np.where(e <= mid, 1.0, falling)
        elif b == bands - 1:
            w = np.where(e >= mid, 1.0, rising)
        weights[b] = np.clip(w, 0.0, 1.0)
    normalizers = weights.sum(axis=1)
    centers_hz = (10.0 ** (nodes[1 : bands + 1] / 21.4) - 1.0) / 0.00437
    return ErbFilterbank(weights, normalizers, centers_hz, sample_rate)


def erb_compress(values: np.ndarray, fb: ErbFilterbank) -> np.ndarray:
    """Per-band weighted means: out[l, b] = sum_f w_b(f) in[l, f] / pi_b."""
    values = np.asarray(values)
    if values.shape[-1] != fb.bins:
        raise ValueError(
            f"last axis {values.shape[-1]} does not match filterbank bins {fb.bins}"
        )
    return (values @ fb.weights.T) / fb.normalizers


def erb_expand(band_values: np.ndarray, fb: ErbFilterbank) -> np.ndarray:
    """Interpolate band gains back to per-bin gains.

    out[l, f] = sum_b w_b(f) g[l, b] / sum_b w_b(f); constant band gains
    expand to the same constant.
    """
    band_values = np.asarray(band_values)
    if band_values.shape[-1] != fb.bands:
        raise ValueError(
            f"last axis {band_values.shape[-1]} does not match band count {fb.bands}"
        )
    flat = band_values.reshape(-1, fb.bands)
    # run the normalizing column sums through the same matmul so constant
    # gains expand to exactly that constant
    ones = np.ones((1, fb.bands), dtype=flat.dtype)
    prod = np.concatenate([flat, ones]) @ fb.weights
    out = prod[:-1] / prod[-1]
    return out.reshape(band_values.shape[:-1] + (fb.bins,))
