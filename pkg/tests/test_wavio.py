"""WAV round-trip and format-contract tests."""

import numpy as np
import pytest

from batkit import wavio
from batkit.errors import FormatError


def test_float32_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, size=(1000, 3)).astype(np.float32).astype(np.float64)
    p = tmp_path / "a.wav"
    wavio.write_wav(p, x, 16000, fmt="float32")
    y, rate = wavio.read_wav(p)
    assert rate == 16000
    assert y.shape == (1000, 3)
    assert np.array_equal(y, x)


def test_pcm16_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    x = rng.uniform(-0.9, 0.9, size=(500, 2))
    p = tmp_path / "b.wav"
    wavio.write_wav(p, x, 16000, fmt="pcm16")
    y, rate = wavio.read_wav(p)
    assert y.shape == x.shape
    assert np.max(np.abs(y - x)) < 1.0 / 32000


def test_mono_shape(tmp_path):
    p = tmp_path / "m.wav"
    wavio.write_wav(p, np.zeros(64), 16000)
    y, _ = wavio.read_wav(p)
    assert y.shape == (64, 1)


def test_sixteen_channels(tmp_path):
    p = tmp_path / "c16.wav"
    wavio.write_wav(p, np.zeros((64, 16)), 16000)
    y, _ = wavio.read_wav(p)
    assert y.shape == (64, 16)


def test_too_many_channels(tmp_path):
    with pytest.raises(ValueError):
        wavio.write_wav(tmp_path / "x.wav", np.zeros((10, 17)), 16000)


def test_rate_check(tmp_path):
    p = tmp_path / "r.wav"
    wavio.write_wav(p, np.zeros(64), 48000)
    with pytest.raises(FormatError, match="sample-rate mismatch"):
        wavio.read_wav(p, expect_rate=16000)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        wavio.read_wav(tmp_path / "nope.wav")


def test_garbage_file(tmp_path):
    p = tmp_path / "g.wav"
    p.write_bytes(b"not a wav at all")
    with pytest.raises(FormatError):
        wavio.read_wav(p)


def test_bad_fmt(tmp_path):
    with pytest.raises(ValueError):
        wavio.write_wav(tmp_path / "x.wav", np.zeros(10), 16000, fmt="pcm24")
