"""Bundled deterministic signal corpus.

Desk-scale stand-ins for speech and music corpora so the pipeline runs
with zero downloads: speech-like signals are glottal pulse trains shaped
by drifting formant resonators, music-like interferers are chord-tone
mixtures. Real recordings plug in through plain file paths in signal ids.
"""

import zlib
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .wavio import read_wav

_RMS = 0.05


def _stable_seed(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


def _normalize(x: np.ndarray) -> np.ndarray:
    rms = np.sqrt(np.mean(x**2))
    return x * (_RMS / rms) if rms > 0 else x


def _resonator(freq: float, bandwidth: float, fs: int):
    r = np.exp(-np.pi * bandwidth / fs)
    theta = 2.0 * np.pi * freq / fs
    a = [1.0, -2.0 * r * np.cos(theta), r * r]
    return [1.0 - r], a


def speech_like(seed: int, duration: float, sample_rate: int = 16000) -> np.ndarray:
    """Voiced pulse train with drifting pitch, formants and syllable gating."""
    rng = np.random.default_rng(seed)
    n = int(round(duration * sample_rate))
    # pitch contour: per-signal base pitch plus a smooth reflected walk,
    # so two signals rarely share sustained harmonics
    base = np.exp(rng.uniform(np.log(95.0), np.log(220.0)))
    n_ctrl = max(4, int(duration * 6) + 2)
    walk = np.cumsum(rng.normal(0.0, 0.08, size=n_ctrl))
    walk = np.abs((walk + 0.25) % 1.0 - 0.5) - 0.25  # reflect within +-0.25
    f0 = np.clip(base * np.exp(walk), 85.0, 240.0)
    f0 = np.interp(np.linspace(0, n_ctrl - 1, n), np.arange(n_ctrl), f0)
    phase = np.cumsum(f0 / sample_rate)
    excitation = np.zeros(n)
    excitation[np.nonzero(np.diff(np.floor(phase)))[0]] = 1.0
    excitation += 0.015 * rng.standard_normal(n)

    # formant cascade refreshed every ~250 ms with short crossfades
    seg = int(0.25 * sample_rate)
    fade = int(0.01 * sample_rate)
    out = np.zeros(n)
    start = 0
    while start < n:
        stop = min(n, start + seg)
        lo = max(0, start - fade)
        piece = excitation[lo:stop]
        for freq, bw in (
            (rng.uniform(300, 850), 80.0),
            (rng.uniform(900, 2200), 120.0),
            (rng.uniform(2300, 3200), 180.0),
        ):
            b, a = _resonator(freq, bw, sample_rate)
            piece = lfilter(b, a, piece)
        ramp = np.ones(stop - lo)
        if lo < start:
            ramp[: start - lo] = np.linspace(0.0, 1.0, start - lo)
            out[lo:start] *= ramp[: start - lo][::-1]
        out[lo:stop] += piece * ramp
        start = stop

    # syllabic gating around 4 Hz with pauses
    n_gate = max(4, int(duration * 4) + 2)
    gate = (rng.uniform(size=n_gate) > 0.25).astype(np.float64)
    gate = np.interp(np.linspace(0, n_gate - 1, n), np.arange(n_gate), gate)
    out *= 0.15 + 0.85 * gate
    return _normalize(out)


def music_like(seed: int, duration: float, sample_rate: int = 16000) -> np.ndarray:
    """Chord-tone mixture with harmonics, vibrato and per-chord envelopes."""
    rng = np.random.default_rng(seed)
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate
    out = np.zeros(n)
    pos = 0
    scale = np.array([0, 2, 4, 7, 9])  # pentatonic offsets
    while pos < n:
        length = int(rng.uniform(0.8, 1.2) * sample_rate)
        stop = min(n, pos + length)
        root = 110.0 * 2.0 ** ((rng.choice(scale) + 12 * rng.integers(0, 2)) / 12.0)
        third = rng.choice([3, 4])
        seg_t = t[pos:stop]
        env = np.ones(stop - pos)
        attack = min(480, len(env))
        env[:attack] = np.linspace(0.0, 1.0, attack)
        release = min(1600, len(env))
        env[-release:] *= np.linspace(1.0, 0.1, release)
        for semitones in (0, third, 7):
            freq = root * 2.0 ** (semitones / 12.0)
            vibrato = 1.0 + 0.003 * np.sin(2 * np.pi * 5.0 * seg_t + rng.uniform(0, 2 * np.pi))
            for harmonic in (1, 2, 3):
                if freq * harmonic >= sample_rate / 2:
                    continue
                out[pos:stop] += (
                    env
                    / harmonic
                    * np.sin(2 * np.pi * freq * harmonic * vibrato * seg_t + rng.uniform(0, 2 * np.pi))
                )
        pos = stop
    return _normalize(out)


def resolve_signal(
    signal_id: str, duration: float, sample_rate: int = 16000, corpus_root=None
) -> np.ndarray:
    """Materialize a signal id into a waveform of at least `duration` seconds.

    Ids of the form speech:<tag> and music:<tag> synthesize deterministic
    signals; anything else is read as a WAV path (relative to corpus_root
    when given), first channel.
    """
    n = int(round(duration * sample_rate))
    if signal_id.startswith("speech:"):
        return speech_like(_stable_seed(signal_id), duration, sample_rate)
    if signal_id.startswith("music:"):
        return music_like(_stable_seed(signal_id), duration, sample_rate)
    path = Path(corpus_root) / signal_id if corpus_root else Path(signal_id)
    if not path.exists():
        raise FileNotFoundError(f"signal {signal_id!r}: no such file {path}")
    data, _ = read_wav(path, expect_rate=sample_rate)
    if data.shape[0] < n:
        raise ValueError(
            f"signal {signal_id!r} is {data.shape[0] / sample_rate:.2f}s, "
            f"need at least {duration}s"
        )
    return data[:, 0]


def resolve_signals(signal_ids, duration: float, sample_rate: int = 16000, corpus_root=None):
    """Resolve a collection of ids into {id: waveform}."""
    return {
        sid: resolve_signal(sid, duration, sample_rate, corpus_root)
        for sid in set(signal_ids)
    }
