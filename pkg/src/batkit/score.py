"""Array-configuration-robust spatial coherence feature.

Per time-frequency bin: short-term relative transfer functions against
the reference microphone, magnitude-whitened, projected onto free-field
plane-wave steering vectors for a fixed azimuth grid, then compressed to
ERB bands. The result is a (frames, bands, directions) tensor bounded in
[-1, 1] regardless of microphone count, plus the reference channel's
standardized log spectrum.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .dsp import ErbFilterbank, Spectrogram, erb_compress, stft
from .errors import FormatError
from .scenes import ArrayGeometry

EPS = 1e-12
SOUND_SPEED = 343.0
DEFAULT_RADIUS = 2
DEFAULT_DIRECTIONS = 12


@dataclass(frozen=True)
class RtfFrame:
    values: np.ndarray  # (M-1, bins) complex, non-reference mics in index order
    radius: int


@dataclass(frozen=True)
class SteeringMatrix:
    values: np.ndarray          # (bins, M-1, Q) complex, unit modulus
    look_directions: np.ndarray  # (Q,) degrees
    sound_speed: float = SOUND_SPEED

    @property
    def directions(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True)
class ScoreFeature:
    score: np.ndarray        # (frames, bands, Q) in [-1, 1]
    ref_logspec: np.ndarray  # (frames, bands), standardized

    @property
    def frames(self) -> int:
        return self.score.shape[0]

    @property
    def band_count(self) -> int:
        return self.score.shape[1]

    @property
    def directions(self) -> int:
        return self.score.shape[2]


def build_steering(
    geometry: ArrayGeometry,
    directions: int = DEFAULT_DIRECTIONS,
    bins: int = 257,
    sample_rate: int = 16000,
) -> SteeringMatrix:
    """Free-field plane-wave steering entries for non-reference mics.

    Entry (f, m, q) is exp(-2j pi f_hz dtau) with
    dtau = u(theta_q) . (x_ref - x_m) / c and u pointing from the array
    toward azimuth theta_q, matching the phase a far-field wave from that
    azimuth imprints on the relative transfer function.
    """
    if directions < 1:
        raise ValueError("need at least one look direction")
    pos = geometry.positions()
    ref = pos[geometry.reference_index]
    others = np.delete(pos, geometry.reference_index, axis=0)
    theta = np.deg2rad(360.0 * np.arange(directions) / directions)
    u = np.stack([np.cos(theta), np.sin(theta), np.zeros_like(theta)], axis=1)  # (Q, 3)
    dtau = (ref[None, :] - others) @ u.T / SOUND_SPEED  # (M-1, Q)
    freqs = np.arange(bins) * sample_rate / (2.0 * (bins - 1))
    phase = -2j * np.pi * freqs[:, None, None] * dtau[None, :, :]
    return SteeringMatrix(np.exp(phase), 360.0 * np.arange(directions) / directions)


def _as_arrays(specs) -> list:
    out = []
    for s in specs:
        out.append(s.data if isinstance(s, Spectrogram) else np.asarray(s))
    return out


def short_term_rtf(specs, frame: int, radius: int = DEFAULT_RADIUS, ref_index: int = 0) -> RtfFrame:
    """Relative transfer functions for one frame, averaged over 2R+1 frames.

    The averaging window is clipped at the signal edges; an eps in the
    denominator keeps silent reference bins finite.
    """
    arrays = _as_arrays(specs)
    if len(arrays) < 2:
        raise ValueError("need at least two channels")
    length = arrays[0].shape[0]
    lo = max(0, frame - radius)
    hi = min(length, frame + radius + 1)
    ref = arrays[ref_index]
    den = np.sum(ref[lo:hi] * np.conj(ref[lo:hi]), axis=0).real + EPS
    rows = [
        np.sum(arrays[m][lo:hi] * np.conj(ref[lo:hi]), axis=0) / den
        for m in range(len(arrays))
        if m != ref_index
    ]
    return RtfFrame(np.stack(rows), radius)


def whiten_delete(rtf: RtfFrame) -> np.ndarray:
    """Unit-modulus RTF entries; dead bins get the neutral phase 1+0j."""
    return _whiten(rtf.values)


def _whiten(values: np.ndarray) -> np.ndarray:
    mod = np.abs(values)
    dead = mod < EPS
    out = values / np.where(dead, 1.0, mod)
    out[dead] = 1.0 + 0.0j
    return out


def score_vector(whitened: np.ndarray, steering_f: np.ndarray) -> np.ndarray:
    """Eq. of the coherence projection for one bin: Re{A^H r} / (M-1)."""
    whitened = np.asarray(whitened)
    if steering_f.shape[0] != whitened.shape[0]:
        raise ValueError(
            f"steering rows {steering_f.shape[0]} != whitened length {whitened.shape[0]}"
        )
    return np.real(np.conj(steering_f).T @ whitened) / whitened.shape[0]


def _rtf_sequence(arrays: list, radius: int, ref_index: int) -> np.ndarray:
    """(frames, M-1, bins) stack of short-term RTFs."""
    length = arrays[0].shape[0]
    ref = arrays[ref_index]
    cross = np.stack(
        [arrays[m] * np.conj(ref) for m in range(len(arrays)) if m != ref_index],
        axis=1,
    )  # (L, M-1, F)
    auto = (ref * np.conj(ref)).real  # (L, F)
    out = np.empty_like(cross)
    for l in range(length):
        lo = max(0, l - radius)
        hi = min(length, l + radius + 1)
        den = np.sum(auto[lo:hi], axis=0) + EPS
        out[l] = np.sum(cross[lo:hi], axis=0) / den
    return out


def score_from_spectrograms(
    specs,
    steering: SteeringMatrix,
    fb: ErbFilterbank,
    radius: int = DEFAULT_RADIUS,
    ref_index: int = 0,
) -> ScoreFeature:
    """Full feature pipeline from per-channel spectrograms."""
    arrays = _as_arrays(specs)
    if len(arrays) < 2:
        raise ValueError("need at least two channels")
    if steering.values.shape[1] != len(arrays) - 1:
        raise ValueError(
            f"steering built for {steering.values.shape[1] + 1} mics, got {len(arrays)}"
        )
    whitened = _whiten(_rtf_sequence(arrays, radius, ref_index))  # (L, M-1, F)
    zeta = np.einsum("fmq,lmf->lfq", np.conj(steering.values), whitened).real
    zeta /= len(arrays) - 1  # (L, F, Q)

    frames, bins, q = zeta.shape
    per_dir = zeta.transpose(0, 2, 1).reshape(frames * q, bins)
    banded = erb_compress(per_dir, fb).reshape(frames, q, fb.bands).transpose(0, 2, 1)

    power = (arrays[ref_index] * np.conj(arrays[ref_index])).real
    logspec = np.log10(EPS + erb_compress(power, fb))
    std = logspec.std()
    ref_logspec = (logspec - logspec.mean()) / (std if std > EPS else 1.0)
    return ScoreFeature(banded, ref_logspec)


def extract_score(
    signals,
    geometry: ArrayGeometry,
    fb: ErbFilterbank,
    radius: int = DEFAULT_RADIUS,
    directions: int = DEFAULT_DIRECTIONS,
) -> ScoreFeature:
    """Feature extraction from multichannel time-domain signals.

    signals: (samples, M) array matching the geometry's mic count/order.
    """
    signals = np.asarray(signals, dtype=np.float64)
    if signals.ndim != 2:
        raise ValueError("signals must be (samples, channels)")
    if signals.shape[1] != geometry.count:
        raise ValueError(
            f"{signals.shape[1]} channels do not match geometry of {geometry.count} mics"
        )
    specs = [stft(signals[:, m]) for m in range(signals.shape[1])]
    steering = build_steering(geometry, directions, specs[0].bins, specs[0].sample_rate)
    return score_from_spectrograms(
        specs, steering, fb, radius, ref_index=geometry.reference_index
    )


# ---------------------------------------------------------------------------
# Feature container format (magic "SCRF")
# ---------------------------------------------------------------------------

_MAGIC = b"SCRF"
_VERSION = 1


def write_feature(path, feat: ScoreFeature):
    frames, bands, q = feat.score.shape
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<HIII", _VERSION, frames, bands, q))
        fh.write(np.ascontiguousarray(feat.score, dtype="<f4").tobytes())
        fh.write(np.ascontiguousarray(feat.ref_logspec, dtype="<f4").tobytes())


def read_feature(path) -> ScoreFeature:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {_MAGIC!r}")
        header = fh.read(struct.calcsize("<HIII"))
        version, frames, bands, q = struct.unpack("<HIII", header)
        if version != _VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        score = np.frombuffer(fh.read(frames * bands * q * 4), dtype="<f4")
        ref = np.frombuffer(fh.read(frames * bands * 4), dtype="<f4")
        if score.size != frames * bands * q or ref.size != frames * bands:
            raise FormatError(f"{path}: truncated feature data")
        return ScoreFeature(
            score.reshape(frames, bands, q).astype(np.float64),
            ref.reshape(frames, bands).astype(np.float64),
        )
