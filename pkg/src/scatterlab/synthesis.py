"""Test-signal generators: two-tone mixtures, windowed additive tones, harmonic stacks.

All frequencies are in cycles/sample except where a parameter is documented
as "cycles per window" (an integer DFT bin count for the given frame).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TwoToneSpec:
    """A pair of sampled cosines a*cos(2*pi*nu*t + phi), summed."""

    a1: float
    a2: float
    nu1: float
    nu2: float
    phi1: float = 0.0
    phi2: float = 0.0
    signal_len: int = 4096

    def __post_init__(self) -> None:
        if self.a1 < 0 or self.a2 < 0:
            raise ValueError("amplitudes must be nonnegative")
        for name, nu in (("nu1", self.nu1), ("nu2", self.nu2)):
            if not 0.0 < nu < 0.5:
                raise ValueError(f"{name}={nu} outside (0, 0.5): would alias")
        if self.signal_len < 1:
            raise ValueError("signal_len must be positive")


def two_tone(spec: TwoToneSpec) -> np.ndarray:
    t = np.arange(spec.signal_len)
    return spec.a1 * np.cos(2.0 * np.pi * spec.nu1 * t + spec.phi1) + spec.a2 * np.cos(
        2.0 * np.pi * spec.nu2 * t + spec.phi2
    )


def hann_window(T: int) -> np.ndarray:
    """Periodic Hann window of length T (DFT-exact: three nonzero bins)."""
    t = np.arange(T)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * t / T)


@dataclass(frozen=True)
class AdditiveToneSpec:
    """Hann-windowed harmonic tone with amplitude law (1 + (-1)**n * r) / n**alpha.

    ``alpha`` controls spectral decay, ``r`` the odd-to-even amplitude
    difference, ``f1`` is the fundamental as an integer number of cycles per
    window of ``T`` samples.
    """

    alpha: float
    r: float
    f1: int
    N: int = 32
    T: int = 1024

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"r={self.r} outside [0, 1]")
        if self.f1 < 1 or self.N < 1 or self.T < 2:
            raise ValueError("f1, N must be >= 1 and T >= 2")
        if self.f1 >= self.T / 2:
            raise ValueError(f"fundamental f1={self.f1} at or above Nyquist for T={self.T}")


def additive_tone(spec: AdditiveToneSpec) -> np.ndarray:
    """Synthesize the windowed tone; harmonics at or above Nyquist are dropped."""
    t = np.arange(spec.T)
    y = np.zeros(spec.T)
    for n in range(1, spec.N + 1):
        if n * spec.f1 >= spec.T / 2:
            break  # aliasing would corrupt the spectral envelope
        amp = (1.0 + (-1.0) ** n * spec.r) / n**spec.alpha
        y += amp * np.cos(2.0 * np.pi * n * spec.f1 * t / spec.T)
    return y * hann_window(spec.T)


@dataclass(frozen=True)
class HarmonicStackSpec:
    """Unwindowed stack of N equal-amplitude, equal-phase harmonics on exact bins."""

    N: int
    f1: int
    a1: float = 1.0
    phi1: float = 0.0
    signal_len: int = 4096

    def __post_init__(self) -> None:
        if self.N < 1 or self.f1 < 1:
            raise ValueError("N and f1 must be >= 1")
        if self.a1 < 0:
            raise ValueError("a1 must be nonnegative")
        if self.N * self.f1 >= self.signal_len / 2:
            raise ValueError(
                f"highest harmonic N*f1={self.N * self.f1} at or above Nyquist "
                f"for signal_len={self.signal_len}"
            )

    @property
    def bandwidth_octaves(self) -> float:
        return float(np.log2(self.N))


def harmonic_stack(spec: HarmonicStackSpec) -> np.ndarray:
    """Periodic-on-the-frame stack: every harmonic sits on an exact DFT bin."""
    t = np.arange(spec.signal_len)
    n = np.arange(1, spec.N + 1)
    phases = 2.0 * np.pi * np.outer(n, t) * spec.f1 / spec.signal_len + spec.phi1
    return spec.a1 * np.cos(phases).sum(axis=0)


DATASET_ALPHA_STEPS = 50
DATASET_R_STEPS = 50
DATASET_F1_RANGE = (12, 24)  # inclusive
DATASET_T = 1024
DATASET_N = 32


def dataset_generate(seed: int) -> list[tuple[AdditiveToneSpec, np.ndarray]]:
    """2500-signal additive-synthesis corpus: a 50x50 (alpha, r) grid over
    [0, 2] x [0, 1], fundamental drawn uniformly from integers 12..24.

    Pure function of the seed; same seed gives a byte-identical dataset.
    """
    rng = np.random.default_rng(seed)
    alphas = np.linspace(0.0, 2.0, DATASET_ALPHA_STEPS)
    rs = np.linspace(0.0, 1.0, DATASET_R_STEPS)
    out: list[tuple[AdditiveToneSpec, np.ndarray]] = []
    lo, hi = DATASET_F1_RANGE
    for alpha in alphas:
        for r in rs:
            f1 = int(rng.integers(lo, hi + 1))
            spec = AdditiveToneSpec(alpha=float(alpha), r=float(r), f1=f1, N=DATASET_N, T=DATASET_T)
            out.append((spec, additive_tone(spec)))
    return out
