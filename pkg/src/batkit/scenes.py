"""Acoustic scene description, sampling and rendering.

A scene places speakers and interferers on a ring around a microphone
array inside a shoebox room, mixes their room responses into the array
channels at prescribed SIR/SNR, and builds the binaural target as
clean speech plus an alpha-weighted ambience term (late speech
reverberation, interferers).

Source azimuths are in the array's local frame (counterclockwise from
local +x); the binaural listener faces local +x from the array center.
"""

import json
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve

from .hrtf import HrirSet
from .rir import RoomSpec, simulate_rir, split_clean_late

SAMPLE_RATE = 16000
MIN_GAP_DEG = 30.0
_MAX_SAMPLING_TRIES = 10000


@dataclass(frozen=True)
class ArrayGeometry:
    mic_positions: tuple  # ((x, y, z), ...) meters, array-local frame
    reference_index: int = 0

    def __post_init__(self):
        pos = np.asarray(self.mic_positions, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 2:
            raise ValueError("need at least 2 microphones with 3-D positions")
        if not 0 <= self.reference_index < pos.shape[0]:
            raise ValueError(f"reference_index {self.reference_index} out of range")
        for i in range(pos.shape[0]):
            for j in range(i + 1, pos.shape[0]):
                if np.allclose(pos[i], pos[j]):
                    raise ValueError(f"microphones {i} and {j} coincide")

    @property
    def count(self) -> int:
        return len(self.mic_positions)

    def positions(self) -> np.ndarray:
        return np.asarray(self.mic_positions, dtype=np.float64)


def circular_geometry(count: int, radius: float = 0.05, reference_index: int = 0) -> ArrayGeometry:
    angles = 2 * np.pi * np.arange(count) / count
    mics = tuple(
        (radius * np.cos(a), radius * np.sin(a), 0.0) for a in angles
    )
    return ArrayGeometry(mics, reference_index)


def linear_geometry(count: int, spacing: float = 0.04, reference_index: int = 0) -> ArrayGeometry:
    offset = (count - 1) * spacing / 2.0
    mics = tuple((i * spacing - offset, 0.0, 0.0) for i in range(count))
    return ArrayGeometry(mics, reference_index)


def load_geometry(path) -> ArrayGeometry:
    data = json.loads(Path(path).read_text())
    return ArrayGeometry(
        tuple(tuple(p) for p in data["mics"]),
        int(data.get("reference_index", 0)),
    )


def save_geometry(path, geometry: ArrayGeometry):
    Path(path).write_text(
        json.dumps(
            {"mics": [list(p) for p in geometry.mic_positions],
             "reference_index": geometry.reference_index},
            indent=1,
        )
    )


@dataclass(frozen=True)
class SourceSpec:
    azimuth: float   # degrees, array-local
    distance: float  # meters from array center
    signal_id: str


@dataclass(frozen=True)
class SceneSpec:
    room: RoomSpec
    speakers: tuple       # of SourceSpec, D >= 1
    interferers: tuple    # of SourceSpec
    sir: float            # dB
    snr: float            # dB
    alpha: float          # ambience factor in [0, 1]
    seed: int
    duration: float = 5.0

    def __post_init__(self):
        if len(self.speakers) < 1:
            raise ValueError("a scene needs at least one speaker")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        az = [s.azimuth for s in self.speakers + self.interferers]
        for i in range(len(az)):
            for j in range(i + 1, len(az)):
                if _circular_gap(az[i], az[j]) < MIN_GAP_DEG - 1e-9:
                    raise ValueError(
                        f"sources {i} and {j} are {_circular_gap(az[i], az[j]):.1f} deg "
                        f"apart; minimum is {MIN_GAP_DEG}"
                    )

    def all_sources(self) -> tuple:
        return self.speakers + self.interferers

    def to_dict(self) -> dict:
        return asdict(self)


def scene_from_dict(data: dict) -> SceneSpec:
    room = RoomSpec(
        tuple(data["room"]["dimensions"]),
        data["room"]["t60"],
        tuple(data["room"]["array_center"]),
        data["room"]["array_yaw"],
    )
    mk = lambda d: SourceSpec(d["azimuth"], d["distance"], d["signal_id"])
    return SceneSpec(
        room=room,
        speakers=tuple(mk(s) for s in data["speakers"]),
        interferers=tuple(mk(s) for s in data["interferers"]),
        sir=data["sir"],
        snr=data["snr"],
        alpha=data["alpha"],
        seed=data["seed"],
        duration=data["duration"],
    )


def _circular_gap(a: float, b: float) -> float:
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


@dataclass(frozen=True)
class SceneRanges:
    """Sampling ranges for random scenes; defaults follow the ring-sector setup."""

    azimuth: tuple = (0.0, 360.0)       # degrees
    distance: tuple = (1.0, 2.0)        # meters
    room_x: tuple = (4.5, 7.0)
    room_y: tuple = (3.5, 5.5)
    room_z: tuple = (2.6, 3.2)
    array_height: tuple = (1.2, 1.6)
    sir_choices: tuple = (5.0, 10.0, 15.0)
    snr_choices: tuple = (20.0, 25.0, 30.0)
    t60_choices: tuple = (0.3, 0.4, 0.5, 0.6)
    alpha_choices: tuple = (0.0, 0.3, 0.5, 0.7, 1.0)
    speaker_count: int = 2
    interferer_count: int = 1
    min_gap_deg: float = MIN_GAP_DEG
    duration: float = 5.0


def sample_scene(rng_seed: int, ranges: SceneRanges | None = None) -> SceneSpec:
    """Draw one reproducible SceneSpec from the given ranges."""
    ranges = ranges or SceneRanges()
    total = ranges.speaker_count + ranges.interferer_count
    if total < 1:
        raise ValueError("ranges select no sources")
    rng = np.random.default_rng(np.random.SeedSequence([int(rng_seed) & 0xFFFFFFFFFFFF, 0xA11CE]))

    dims = (
        rng.uniform(*ranges.room_x),
        rng.uniform(*ranges.room_y),
        rng.uniform(*ranges.room_z),
    )
    center = np.array([dims[0] / 2.0, dims[1] / 2.0, rng.uniform(*ranges.array_height)])
    yaw = rng.uniform(0.0, 2 * np.pi)
    room = RoomSpec(dims, float(rng.choice(ranges.t60_choices)), tuple(center), yaw)

    margin = 0.3
    for attempt in range(_MAX_SAMPLING_TRIES):
        azimuths = rng.uniform(*ranges.azimuth, size=total)
        ok = all(
            _circular_gap(azimuths[i], azimuths[j]) >= ranges.min_gap_deg
            for i in range(total)
            for j in range(i + 1, total)
        )
        if not ok:
            continue
        distances = rng.uniform(*ranges.distance, size=total)
        world = np.deg2rad(azimuths) + yaw
        pos = center[None, :] + distances[:, None] * np.stack(
            [np.cos(world), np.sin(world), np.zeros(total)], axis=1
        )
        if np.all(pos > margin) and np.all(pos < np.asarray(dims) - margin):
            break
    else:
        raise ValueError(
            f"could not place {total} sources with {ranges.min_gap_deg} degree "
            f"separation in {_MAX_SAMPLING_TRIES} tries"
        )

    speakers = tuple(
        SourceSpec(float(azimuths[i]), float(distances[i]), f"speech:{rng.integers(1 << 30)}")
        for i in range(ranges.speaker_count)
    )
    interferers = tuple(
        SourceSpec(
            float(azimuths[ranges.speaker_count + i]),
            float(distances[ranges.speaker_count + i]),
            f"music:{rng.integers(1 << 30)}",
        )
        for i in range(ranges.interferer_count)
    )
    return SceneSpec(
        room=room,
        speakers=speakers,
        interferers=interferers,
        sir=float(rng.choice(ranges.sir_choices)),
        snr=float(rng.choice(ranges.snr_choices)),
        alpha=float(rng.choice(ranges.alpha_choices)),
        seed=int(rng.integers(1 << 48)),
        duration=ranges.duration,
    )


@dataclass(frozen=True)
class SceneMix:
    mics: np.ndarray       # (samples, M)
    target: np.ndarray     # (samples, 2), clean + alpha * ambience
    ambience: np.ndarray   # (samples, 2), unblended
    clean: np.ndarray      # (samples, 2), the alpha = 0 target
    ref_stems: tuple       # per-source scaled reference-mic stems, speakers first
    speaker_count: int

    def measured_sir(self) -> float:
        """Reference-mic SIR recomputed from the per-source stems."""
        d = self.speaker_count
        p_speech = sum(np.mean(s**2) for s in self.ref_stems[:d])
        p_interf = sum(np.mean(s**2) for s in self.ref_stems[d:])
        return 10.0 * np.log10(p_speech / p_interf)


def _rir_seed(scene_seed: int, source_index: int, mic_index: int) -> int:
    ss = np.random.SeedSequence(
        [int(scene_seed) & 0xFFFFFFFFFFFF, 0x5C3, source_index, mic_index]
    )
    return int(ss.generate_state(1)[0])


def _world_positions(spec: SceneSpec, geometry: ArrayGeometry):
    center = np.asarray(spec.room.array_center, dtype=np.float64)
    yaw = spec.room.array_yaw
    rot = np.array(
        [[np.cos(yaw), -np.sin(yaw), 0.0], [np.sin(yaw), np.cos(yaw), 0.0], [0.0, 0.0, 1.0]]
    )
    mics = center[None, :] + geometry.positions() @ rot.T
    sources = []
    for src in spec.all_sources():
        a = np.deg2rad(src.azimuth) + yaw
        sources.append(center + src.distance * np.array([np.cos(a), np.sin(a), 0.0]))
    return mics, np.array(sources)


def _conv_trim(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    return fftconvolve(a, b)[:n]


def _source_gains(spec: SceneSpec, ref_stems: list) -> np.ndarray:
    """Per-source gains: equal speaker levels, then interferers set by SIR."""
    d = len(spec.speakers)
    powers = np.array([np.mean(s**2) for s in ref_stems])
    if np.any(powers[:d] <= 0.0):
        raise ValueError("a speaker has zero power at the reference microphone")
    gains = np.ones(len(ref_stems))
    gains[:d] = np.sqrt(powers[0] / powers[:d])  # equal pressure level
    if len(ref_stems) > d:
        if np.any(powers[d:] <= 0.0):
            raise ValueError("an interferer has zero power at the reference microphone")
        p_speech = float(np.sum(gains[:d] ** 2 * powers[:d]))
        p_interf = float(np.sum(powers[d:]))
        gains[d:] = np.sqrt(p_speech / (p_interf * 10.0 ** (spec.sir / 10.0)))
    return gains


def scene_targets(spec: SceneSpec, geometry: ArrayGeometry, hrirs: HrirSet, signals: dict):
    """Binaural clean/ambience stems only (no array channels, no noise).

    Returns (clean, ambience), each (samples, 2). Bit-identical to the
    stems inside mix_scene for the same inputs.
    """
    _, clean, ambience, _ = _render_reference(spec, geometry, hrirs, signals)
    return clean, ambience


def _render_reference(spec: SceneSpec, geometry: ArrayGeometry, hrirs: HrirSet, signals: dict):
    """Reference-mic stems, gains, and the binaural clean/ambience pair."""
    n = int(round(spec.duration * SAMPLE_RATE))
    sources = spec.all_sources()
    for src in sources:
        if src.signal_id not in signals:
            raise KeyError(f"signal id {src.signal_id!r} not resolvable")
        if len(signals[src.signal_id]) < n:
            raise ValueError(f"signal {src.signal_id!r} shorter than {spec.duration}s")

    mics, source_pos = _world_positions(spec, geometry)
    dims = np.asarray(spec.room.dimensions)
    if np.any(mics <= 0.0) or np.any(mics >= dims[None, :]):
        raise ValueError("array does not fit inside the room")

    ref = geometry.reference_index
    ref_rirs = [
        simulate_rir(spec.room, source_pos[i], mics[ref], _rir_seed(spec.seed, i, ref))
        for i in range(len(sources))
    ]
    raw = [signals[src.signal_id][:n] for src in sources]
    ref_stems = [_conv_trim(ref_rirs[i].taps, raw[i], n) for i in range(len(sources))]
    gains = _source_gains(spec, ref_stems)

    d = len(spec.speakers)
    clean = np.zeros((n, 2))
    ambience = np.zeros((n, 2))
    for i, src in enumerate(sources):
        left, right = hrirs.nearest(src.azimuth)
        scaled = gains[i] * raw[i]
        if i < d:
            split = split_clean_late(ref_rirs[i])
            clean_sig = _conv_trim(split.clean.taps, scaled, n)
            late_sig = _conv_trim(split.late.taps, scaled, n)
            clean[:, 0] += _conv_trim(left, clean_sig, n)
            clean[:, 1] += _conv_trim(right, clean_sig, n)
            ambience[:, 0] += _conv_trim(left, late_sig, n)
            ambience[:, 1] += _conv_trim(right, late_sig, n)
        else:
            full = _conv_trim(ref_rirs[i].taps, scaled, n)
            ambience[:, 0] += _conv_trim(left, full, n)
            ambience[:, 1] += _conv_trim(right, full, n)

    scaled_stems = tuple(gains[i] * ref_stems[i] for i in range(len(sources)))
    return gains, clean, ambience, scaled_stems


def mix_scene(spec: SceneSpec, geometry: ArrayGeometry, hrirs: HrirSet, signals: dict) -> SceneMix:
    """Render array channels, binaural target and ambience for one scene."""
    gains, clean, ambience, ref_stems = _render_reference(spec, geometry, hrirs, signals)
    n = int(round(spec.duration * SAMPLE_RATE))
    sources = spec.all_sources()
    mics_pos, source_pos = _world_positions(spec, geometry)
    m = geometry.count
    ref = geometry.reference_index

    mics = np.zeros((n, m))
    raw = [signals[src.signal_id][:n] for src in sources]
    for i in range(len(sources)):
        scaled = gains[i] * raw[i]
        for mic in range(m):
            h = simulate_rir(spec.room, source_pos[i], mics_pos[mic], _rir_seed(spec.seed, i, mic))
            mics[:, mic] += _conv_trim(h.taps, scaled, n)

    # sensor noise: per-channel white Gaussian at the prescribed SNR
    # against the noise-free reference-mic power
    p_ref = float(np.mean(mics[:, ref] ** 2))
    if p_ref <= 0.0:
        raise ValueError("noise-free reference channel has zero power")
    sigma = np.sqrt(p_ref / 10.0 ** (spec.snr / 10.0))
    rng = np.random.default_rng(
        np.random.SeedSequence([int(spec.seed) & 0xFFFFFFFFFFFF, 0x4015E])
    )
    noise = rng.standard_normal((n, m))
    noise *= sigma / np.sqrt(np.mean(noise**2, axis=0))[None, :]
    mics += noise

    target = clean + spec.alpha * ambience
    return SceneMix(
        mics=mics,
        target=target,
        ambience=ambience,
        clean=clean,
        ref_stems=ref_stems,
        speaker_count=len(spec.speakers),
    )
