"""Mel-frequency cepstral coefficients, one row per video frame.

The hop is locked to the video frame period so that MFCC row k describes
the audio around frame k: each row is computed over a 25 ms Hamming window
centered at time (k + 0.5) / fps.  Coefficients are the first 13 terms of
an orthonormal DCT-II over log mel filterbank energies (26 HTK-mel
triangular filters, log floored at 1e-10 so silence yields a constant row
rather than NaN).  No pre-emphasis or liftering is applied.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import dct

from .errors import ValidationError

N_COEFFS = 13
N_MELS = 26
WINDOW_SEC = 0.025
LOG_FLOOR = 1e-10


def hz_to_mel(hz):
    return 2595.0 * np.log10(1.0 + np.asarray(hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, nfft: int, rate: int) -> np.ndarray:
    """Triangular mel filterbank, shape (n_mels, nfft // 2 + 1)."""
    mel_points = np.linspace(hz_to_mel(0.0), hz_to_mel(rate / 2.0), n_mels + 2)
    bins = np.floor((nfft + 1) * mel_to_hz(mel_points) / rate).astype(int)
    fb = np.zeros((n_mels, nfft // 2 + 1), dtype=np.float64)
    for j in range(n_mels):
        lo, mid, hi = bins[j], bins[j + 1], bins[j + 2]
        for i in range(lo, mid):
            fb[j, i] = (i - lo) / (mid - lo)
        for i in range(mid, hi):
            fb[j, i] = (hi - i) / (hi - mid)
    return fb


def extract_mfcc(
    audio: np.ndarray,
    rate: int,
    fps: float,
    n_frames: int,
    n_coeffs: int = N_COEFFS,
) -> np.ndarray:
    """Compute one MFCC row per video frame.

    Args:
        audio: mono waveform, float values.
        rate: sample rate in Hz.
        fps: video frame rate the rows are aligned to.
        n_frames: number of rows to produce.

    Returns:
        Array of shape (n_frames, n_coeffs), float64, always finite.

    Raises:
        ValidationError: if the audio does not cover n_frames / fps seconds.
    """
    audio = np.asarray(audio, dtype=np.float64)
    if audio.ndim != 1:
        raise ValidationError(f"audio must be mono 1-D, got shape {audio.shape}")
    if n_frames < 0:
        raise ValidationError("n_frames must be >= 0")
    if n_frames == 0:
        return np.zeros((0, n_coeffs), dtype=np.float64)
    needed = n_frames / fps
    if len(audio) / rate < needed - 1e-9:
        raise ValidationError(
            f"audio covers {len(audio) / rate:.3f}s but {needed:.3f}s of frames "
            "were requested"
        )

    win = int(round(WINDOW_SEC * rate))
    nfft = 1
    while nfft < win:
        nfft *= 2
    window = np.hamming(win)
    fb = mel_filterbank(N_MELS, nfft, rate)

    frames = np.zeros((n_frames, win), dtype=np.float64)
    for k in range(n_frames):
        center = int(round((k + 0.5) / fps * rate))
        start = center - win // 2
        lo, hi = max(start, 0), min(start + win, len(audio))
        if hi > lo:
            frames[k, lo - start : hi - start] = audio[lo:hi]
    frames *= window

    spectrum = np.fft.rfft(frames, nfft, axis=1)
    power = (spectrum.real**2 + spectrum.imag**2) / nfft
    energies = power @ fb.T
    logged = np.log(np.maximum(energies, LOG_FLOOR))
    coeffs = dct(logged, type=2, axis=1, norm="ortho")[:, :n_coeffs]
    return np.ascontiguousarray(coeffs)


def log_floor_row(rate: int, n_coeffs: int = N_COEFFS) -> np.ndarray:
    """The row emitted for a zero-energy window at this sample rate."""
    return extract_mfcc(np.zeros(rate, dtype=np.float64), rate, 1.0, 1, n_coeffs)[0]
