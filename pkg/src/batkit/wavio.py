"""Multichannel WAV reading/writing: 16 kHz, 16-bit PCM or 32-bit float.

Thin contract layer over scipy.io.wavfile. Samples are exchanged as
float64 arrays shaped (samples, channels); PCM data is scaled to roughly
[-1, 1) on read.
"""

import numpy as np
from scipy.io import wavfile

from .errors import FormatError

MAX_CHANNELS = 16


def read_wav(path, expect_rate: int | None = None):
    """Read a WAV file into ((samples, channels) float64, sample_rate)."""
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise FormatError(f"{path}: not a readable WAV file ({exc})") from exc
    if data.dtype == np.int16:
        out = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        out = data.astype(np.float64)
    elif data.dtype == np.float64:
        out = data.copy()
    else:
        raise FormatError(
            f"{path}: unsupported sample format {data.dtype}; "
            "expected 16-bit PCM or 32-bit float"
        )
    if out.ndim == 1:
        out = out[:, None]
    if out.shape[1] > MAX_CHANNELS:
        raise FormatError(f"{path}: {out.shape[1]} channels exceeds {MAX_CHANNELS}")
    if expect_rate is not None and rate != expect_rate:
        raise FormatError(
            f"{path}: sample-rate mismatch, file is {rate} Hz, expected {expect_rate} Hz"
        )
    return out, rate


def write_wav(path, data, sample_rate: int, fmt: str = "float32"):
    """Write (samples,) or (samples, channels) data as PCM16 or float32."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim == 1:
        data = data[:, None]
    if data.ndim != 2:
        raise ValueError("data must be 1-D or (samples, channels)")
    if not 1 <= data.shape[1] <= MAX_CHANNELS:
        raise ValueError(f"channel count {data.shape[1]} outside 1..{MAX_CHANNELS}")
    if fmt == "float32":
        wavfile.write(path, sample_rate, np.ascontiguousarray(data, dtype=np.float32))
    elif fmt == "pcm16":
        scaled = np.clip(np.round(data * 32768.0), -32768, 32767)
        wavfile.write(path, sample_rate, scaled.astype(np.int16))
    else:
        raise ValueError(f"fmt must be 'float32' or 'pcm16', got {fmt!r}")
