"""Single-frame MFCC features: log-mel spectrum followed by an orthonormal DCT.

Dimensionless synthetic signals get a declared nominal sample rate (default
22050 Hz) for the mel spacing; the rate is echoed in exports.  Coefficients
1..n_mfcc-1 are invariant to global gain, which makes the representation a
pure spectral-shape baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dct

LOG_FLOOR = 1e-10


@dataclass(frozen=True)
class MfccConfig:
    n_mels: int = 40
    n_mfcc: int = 12
    fmin: float = 0.0  # cycles/sample
    fmax: float = 0.5
    sample_rate: float = 22050.0  # nominal, for mel spacing only

    def __post_init__(self) -> None:
        if self.n_mfcc > self.n_mels:
            raise ValueError(f"n_mfcc={self.n_mfcc} exceeds n_mels={self.n_mels}")
        if not 0.0 <= self.fmin < self.fmax <= 0.5:
            raise ValueError("need 0 <= fmin < fmax <= 0.5")


def hz_to_mel(f_hz):
    return 2595.0 * np.log10(1.0 + np.asarray(f_hz, dtype=float) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=float) / 2595.0) - 1.0)


def mel_filterbank(cfg: MfccConfig, n_fft_bins: int) -> np.ndarray:
    """Triangular filters on the one-sided FFT grid, rows L1-normalized.

    ``n_fft_bins`` is the number of nonnegative-frequency bins (n//2 + 1 for
    an n-point frame).  Centers are equally spaced on the mel scale between
    fmin and fmax (converted to Hz at the nominal rate).
    """
    if n_fft_bins < 2:
        raise ValueError("need at least two FFT bins")
    sr = cfg.sample_rate
    mel_lo = hz_to_mel(cfg.fmin * sr)
    mel_hi = hz_to_mel(cfg.fmax * sr)
    mel_pts = np.linspace(mel_lo, mel_hi, cfg.n_mels + 2)
    hz_pts = mel_to_hz(mel_pts)

    # one-sided bin frequencies in Hz: bin k of an n-point frame at k*sr/n
    n_frame = 2 * (n_fft_bins - 1)
    bin_hz = np.arange(n_fft_bins) * sr / n_frame

    center_bins = np.round(hz_pts[1:-1] / (sr / n_frame)).astype(int)
    if len(np.unique(center_bins)) < cfg.n_mels:
        raise ValueError(
            f"degenerate mel band: {cfg.n_mels} filter centers collide on {n_fft_bins} bins"
        )

    weights = np.zeros((cfg.n_mels, n_fft_bins))
    for m in range(cfg.n_mels):
        lo, center, hi = hz_pts[m], hz_pts[m + 1], hz_pts[m + 2]
        rising = (bin_hz - lo) / (center - lo)
        falling = (hi - bin_hz) / (hi - center)
        weights[m] = np.clip(np.minimum(rising, falling), 0.0, None)
        total = weights[m].sum()
        if total <= 0.0:
            raise ValueError(f"degenerate mel band {m}: no FFT bin falls inside it")
        weights[m] /= total
    return weights


def mfcc(signal: np.ndarray, cfg: MfccConfig | None = None) -> np.ndarray:
    """Whole-signal MFCC vector of length ``cfg.n_mfcc``.

    Pipeline: one-sided power spectrum -> mel energies -> log with floor
    1e-10 -> orthonormal type-II DCT over the mel axis -> first coefficients.
    """
    if cfg is None:
        cfg = MfccConfig()
    y = np.asarray(signal, dtype=float)
    spectrum = np.fft.rfft(y)
    power = spectrum.real**2 + spectrum.imag**2
    weights = mel_filterbank(cfg, power.shape[0])
    mel_energy = weights @ power
    log_mel = np.log(np.maximum(mel_energy, LOG_FLOOR))
    return dct(log_mel, type=2, norm="ortho")[: cfg.n_mfcc]
