"""Constant-Q analytic wavelet filterbanks built directly in the frequency domain.

Three mother wavelets are supported, all with unit center frequency and an
equivalent rectangular bandwidth (ERB) of 1/Q:

``morlet``
    Gaussian bump at omega = 1 minus a DC-cancelling Gaussian, so the
    transfer function vanishes at omega = 0.  The width is calibrated
    numerically so the ERB equals 1/Q.
``gammatone``
    Order-4 one-pole-style profile ``(1 + i*B*(omega - 1))**-4`` with B
    calibrated so the ERB equals 1/Q.  Peak value at omega = 1 is exactly 1.
``shannon``
    Brick-wall indicator of the band ``(1, 2**(1/Q)]``.  Adjacent filters on
    the grid tile the spectrum with no overlap; at Q = 1 the support is one
    full octave ``(1, 2]``.

Frequencies are in cycles/sample throughout (DFT bin k of an n-point frame
sits at nu = k/n).  Filters are sampled on the DFT grid of the analysis
frame, and every bin with nu > 0.5 (the negative frequencies of a real DFT)
is zero, which makes each filter Hilbert-analytic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

MORLET = "morlet"
GAMMATONE = "gammatone"
SHANNON = "shannon"
FAMILIES = (MORLET, GAMMATONE, SHANNON)

_GAMMATONE_ORDER = 4


def _check_family(family: str) -> str:
    if family not in FAMILIES:
        raise ValueError(f"unknown wavelet family {family!r}; expected one of {FAMILIES}")
    return family


def build_frequency_grid(lambda_max: float, Q: int, J: int) -> np.ndarray:
    """Geometric grid of Q*J center frequencies descending from ``lambda_max``.

    Consecutive frequencies have ratio 2**(-1/Q), so the grid spans J octaves
    with Q filters per octave.

    Parameters
    ----------
    lambda_max : float
        Highest center frequency, cycles/sample, in (0, 0.5].
    Q : int
        Filters per octave (quality factor), >= 1.
    J : int
        Number of octaves, >= 1.
    """
    if not 0.0 < lambda_max <= 0.5:
        raise ValueError(f"lambda_max={lambda_max} outside (0, 0.5]: would alias")
    if Q < 1 or J < 1:
        raise ValueError(f"need Q >= 1 and J >= 1, got Q={Q}, J={J}")
    j = np.arange(Q * J)
    return lambda_max * 2.0 ** (-j / Q)


def _morlet_raw(omega: np.ndarray, sigma: float) -> np.ndarray:
    """Un-normalized Morlet transfer function, zero at omega = 0."""
    bump = np.exp(-((omega - 1.0) ** 2) / (2.0 * sigma**2))
    correction = np.exp(-1.0 / (2.0 * sigma**2)) * np.exp(-(omega**2) / (2.0 * sigma**2))
    return bump - correction


def _erb_of(magnitude: np.ndarray, domega: float) -> float:
    power = magnitude**2
    return float(trapezoid(power, dx=domega) / power.max())


_CAL_GRID = np.linspace(1e-6, 8.0, 160_001)
_CAL_STEP = float(_CAL_GRID[1] - _CAL_GRID[0])


@lru_cache(maxsize=None)
def _morlet_sigma(Q: int) -> float:
    """Gaussian width giving ERB = 1/Q for the DC-corrected Morlet."""
    target = 1.0 / Q

    def mismatch(sigma: float) -> float:
        mag = np.abs(_morlet_raw(_CAL_GRID, sigma))
        return _erb_of(mag, _CAL_STEP) - target

    guess = 1.0 / (Q * np.sqrt(np.pi))
    return float(brentq(mismatch, 0.2 * guess, 4.0 * guess, xtol=1e-12))


@lru_cache(maxsize=None)
def _gammatone_bandwidth(Q: int) -> float:
    """Slope parameter B giving ERB = 1/Q for the order-4 profile on omega > 0."""
    target = 1.0 / Q

    def mismatch(B: float) -> float:
        mag = (1.0 + (B * (_CAL_GRID - 1.0)) ** 2) ** (-_GAMMATONE_ORDER / 2.0)
        return _erb_of(mag, _CAL_STEP) - target

    guess = 5.0 * np.pi * Q / 16.0
    return float(brentq(mismatch, 0.3 * guess, 3.0 * guess, xtol=1e-12))


def evaluate_wavelet_hat(family: str, Q: int, omega) -> np.ndarray | complex:
    """Transfer function of the mother wavelet at normalized frequency ``omega``.

    Total function: omega <= 0 yields 0 (analytic, null average).  The return
    value is complex for ``gammatone`` and real-valued for the other families;
    scalars in give scalars out.
    """
    _check_family(family)
    if Q < 1:
        raise ValueError(f"need Q >= 1, got {Q}")
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    positive = w > 0.0

    if family == SHANNON:
        hi = 2.0 ** (1.0 / Q)
        out = np.where((w > 1.0) & (w <= hi), 1.0, 0.0)
    elif family == MORLET:
        sigma = _morlet_sigma(Q)
        peak = 1.0 - np.exp(-1.0 / sigma**2)
        out = np.where(positive, _morlet_raw(w, sigma) / peak, 0.0)
    else:
        B = _gammatone_bandwidth(Q)
        out = np.where(positive, (1.0 + 1j * B * (w - 1.0)) ** (-_GAMMATONE_ORDER), 0.0)

    return out[0] if scalar else out


@dataclass(frozen=True)
class FilterbankSpec:
    """Parameters of a constant-Q filterbank on a fixed analysis frame.

    ``T`` is the averaging scale in samples of the low-pass window used for
    invariant coefficients; ``signal_len`` must be a power of two.
    """

    family: str
    Q: int
    J: int
    signal_len: int
    T: int
    lambda_max: float = 0.25

    def __post_init__(self) -> None:
        _check_family(self.family)
        if self.Q < 1 or self.J < 1:
            raise ValueError(f"need Q >= 1 and J >= 1, got Q={self.Q}, J={self.J}")
        n = self.signal_len
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError(f"signal_len={n} is not a power of two")
        if not 0.0 < self.lambda_max <= 0.5:
            raise ValueError(f"lambda_max={self.lambda_max} outside (0, 0.5]")
        if not 1 <= self.T <= n:
            raise ValueError(f"T={self.T} outside [1, signal_len={n}]")
        if self.lambda_max * 2.0 ** (-self.J) * n < 1.0:
            raise ValueError(
                f"lowest wavelet has under one cycle in the window: "
                f"lambda_max*2**-J*signal_len = {self.lambda_max * 2.0 ** (-self.J) * n:.3g} < 1"
            )

    @property
    def grid(self) -> np.ndarray:
        return build_frequency_grid(self.lambda_max, self.Q, self.J)


def _lowpass_hat(T: int, signal_len: int) -> np.ndarray:
    """Real spectrum of a Hann window of duration T, unit DC gain.

    The window is centered at t = 0 (circularly), so its DFT is real.
    """
    n = signal_len
    t = np.arange(n)
    d = np.minimum(t, n - t)  # circular distance from the origin
    w = np.where(d <= T // 2, 0.5 * (1.0 + np.cos(2.0 * np.pi * d / T)), 0.0)
    hat = np.fft.fft(w).real / w.sum()
    hat[0] = 1.0
    return hat


@dataclass(frozen=True)
class Filterbank:
    """Frequency-sampled filters plus the low-pass spectrum for one frame size.

    Immutable after construction (arrays are write-protected), so instances
    can be shared freely across workers.
    """

    spec: FilterbankSpec
    grid: np.ndarray = field(repr=False)
    filters: np.ndarray = field(repr=False)  # (Q*J, signal_len) complex
    lowpass_hat: np.ndarray = field(repr=False)  # (signal_len,) real

    @property
    def n_filters(self) -> int:
        return self.filters.shape[0]

    def nearest_index(self, nu: float) -> int:
        """Grid index whose center frequency is log-nearest to ``nu``."""
        if nu <= 0:
            raise ValueError(f"nu={nu} must be positive")
        return int(np.argmin(np.abs(np.log2(self.grid) - np.log2(nu))))


def build_filterbank(spec: FilterbankSpec) -> Filterbank:
    """Sample every wavelet of the grid on the DFT bins of the frame.

    filters[j][k] = psi_hat(nu_k / lambda_j) with nu_k = k/signal_len, and
    zero for bins past Nyquist so that each filter stays analytic.
    """
    n = spec.signal_len
    grid = spec.grid
    nu = np.arange(n) / n
    analytic = nu <= 0.5  # bins above Nyquist are negative frequencies
    omega = nu[None, :] / grid[:, None]
    filters = np.asarray(evaluate_wavelet_hat(spec.family, spec.Q, omega), dtype=complex)
    filters[:, ~analytic] = 0.0

    lowpass = _lowpass_hat(spec.T, n)

    for arr in (grid, filters, lowpass):
        arr.flags.writeable = False
    return Filterbank(spec=spec, grid=grid, filters=filters, lowpass_hat=lowpass)
