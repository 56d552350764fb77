"""Head-related impulse responses: spherical-head synthesis and file sets.

Azimuth convention: degrees counterclockwise from straight ahead (+x),
so 90 degrees is the listener's left. The synthetic model combines a
Woodworth interaural time difference with a one-pole head-shadow lowpass
on the far ear.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .errors import FormatError
from .wavio import read_wav, write_wav

HEAD_RADIUS = 0.0875  # meters
_SOUND_SPEED = 343.0
_HRIR_TAPS = 96
_BASE_DELAY = 16.0  # samples, leaves room for the sinc tails
_MIN_AZIMUTHS = 12
_MAX_GAP_DEG = 60.0


def _frac_impulse(delay: float, n: int, half_width: int = 8) -> np.ndarray:
    out = np.zeros(n)
    k = np.arange(int(np.ceil(delay)) - half_width, int(np.ceil(delay)) + half_width)
    k = k[(k >= 0) & (k < n)]
    t = k - delay
    out[k] = np.sinc(t) * 0.5 * (1.0 + np.cos(np.pi * t / half_width))
    return out


def synth_hrir(azimuth: float, radius: float = HEAD_RADIUS, sample_rate: int = 16000):
    """Spherical-head HRIR pair (left, right) for a horizontal-plane source."""
    theta = np.deg2rad(azimuth % 360.0)
    lateral = np.arcsin(np.sin(theta))  # >0 means source on the left
    lat = abs(lateral)
    itd = radius / _SOUND_SPEED * (lat + np.sin(lat))  # Woodworth, far ear
    near = _frac_impulse(_BASE_DELAY, _HRIR_TAPS)
    far = _frac_impulse(_BASE_DELAY + itd * sample_rate, _HRIR_TAPS)
    pole = 0.85 * np.sin(lat)  # head shadow strength; unity DC gain
    far = lfilter([1.0 - pole], [1.0, -pole], far)
    if lateral >= 0:
        return near, far
    return far, near


@dataclass(frozen=True)
class HrirSet:
    entries: dict  # azimuth degrees -> (left taps, right taps)
    sample_rate: int

    def __post_init__(self):
        if len(self.entries) < _MIN_AZIMUTHS:
            raise FormatError(
                f"HRIR set needs at least {_MIN_AZIMUTHS} azimuths, got {len(self.entries)}"
            )
        az = np.sort(np.array(list(self.entries), dtype=np.float64) % 360.0)
        gaps = np.diff(np.concatenate([az, [az[0] + 360.0]]))
        if np.max(gaps) > _MAX_GAP_DEG:
            raise FormatError(
                f"HRIR azimuths leave a {np.max(gaps):.0f} degree gap; "
                "set does not cover 360 degrees"
            )
        lengths = {len(l) for l, _ in self.entries.values()}
        lengths |= {len(r) for _, r in self.entries.values()}
        if len(lengths) != 1:
            raise FormatError("HRIRs differ in length")

    def nearest(self, azimuth: float):
        """HRIR pair for the entry closest to azimuth (circular distance)."""
        azimuth = azimuth % 360.0
        best = min(
            self.entries,
            key=lambda a: min(abs(a % 360.0 - azimuth), 360.0 - abs(a % 360.0 - azimuth)),
        )
        return self.entries[best]


def synth_hrir_set(step_deg: float = 5.0, sample_rate: int = 16000) -> HrirSet:
    """Synthetic spherical-head set on a uniform azimuth grid."""
    entries = {
        float(az): synth_hrir(float(az), sample_rate=sample_rate)
        for az in np.arange(0.0, 360.0, step_deg)
    }
    return HrirSet(entries, sample_rate)


def load_hrir_set(index_path, expect_rate: int = 16000) -> HrirSet:
    """Load an HRIR set from a JSON index mapping azimuth -> wav paths."""
    index_path = Path(index_path)
    if not index_path.exists():
        raise FileNotFoundError(str(index_path))
    try:
        index = json.loads(index_path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{index_path}: invalid JSON ({exc})") from exc
    if not isinstance(index, dict):
        raise FormatError(f"{index_path}: index must map azimuth to left/right paths")
    entries = {}
    for key, item in index.items():
        try:
            azimuth = float(key)
        except ValueError:
            raise FormatError(f"{index_path}: azimuth key {key!r} is not a number")
        if not isinstance(item, dict) or "left" not in item or "right" not in item:
            raise FormatError(f"{index_path}: entry {key!r} lacks left/right paths")
        pair = []
        for ear in ("left", "right"):
            wav_path = index_path.parent / item[ear]
            if not wav_path.exists():
                raise FormatError(f"HRIR file missing: {wav_path}")
            data, _ = read_wav(wav_path, expect_rate=expect_rate)
            pair.append(data[:, 0])
        entries[azimuth] = (pair[0], pair[1])
    return HrirSet(entries, expect_rate)


def save_hrir_set(directory, hrirs: HrirSet):
    """Write an HrirSet as WAV pairs plus the JSON index; returns index path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    index = {}
    for azimuth in sorted(hrirs.entries):
        left, right = hrirs.entries[azimuth]
        names = {}
        for ear, taps in (("left", left), ("right", right)):
            name = f"az{azimuth:07.2f}_{ear}.wav"
            write_wav(directory / name, taps, hrirs.sample_rate, fmt="float32")
            names[ear] = name
        index[f"{azimuth:g}"] = names
    index_path = directory / "index.json"
    index_path.write_text(json.dumps(index, indent=1, sort_keys=True))
    return index_path
