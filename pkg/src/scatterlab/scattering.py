"""Scattering cascade with squared-modulus activation.

Layer m holds one nonnegative time series per scattering path
(lambda_1 > lambda_2 > ... > lambda_m).  Each layer is the per-band power
of the previous one: U_{m+1}[p + lambda] = |U_m[p] * psi_lambda|**2, with
all convolutions circular (DFT multiplication).  Invariant coefficients
S_m are the global time averages of the layers smoothed by the low-pass
window phi_T; with unit DC gain the global average of the smoothed
trajectory equals the global average of the raw one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .filterbank import Filterbank

POWER = "power"
MODULUS = "modulus"

# Layers whose squared-l2 energy falls below this are provably-noise; the
# cascade stops rather than allocating deeper all-zero tensors.
TERMINATION_ENERGY = 1e-30


def _activate(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == POWER:
        return z.real**2 + z.imag**2
    if activation == MODULUS:
        return np.abs(z)
    raise ValueError(f"unknown activation {activation!r}")


@dataclass(frozen=True, order=True)
class ScatteringPath:
    """Strictly descending chain of grid indices; index 0 is the highest band."""

    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.indices) == 0:
            raise ValueError("path must have at least one band")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError(f"path indices {self.indices} are not strictly ascending "
                             "(center frequencies must strictly decrease)")

    @property
    def depth(self) -> int:
        return len(self.indices)

    def lambdas(self, fb: Filterbank) -> tuple[float, ...]:
        return tuple(float(fb.grid[i]) for i in self.indices)

    def extended(self, index: int) -> "ScatteringPath":
        return ScatteringPath(self.indices + (index,))

    def label(self, fb: Filterbank) -> str:
        """Column name ``S{m}:lambda1[:lambda2...]`` with 6 significant digits."""
        lams = ":".join(f"{lam:.6g}" for lam in self.lambdas(fb))
        return f"S{self.depth}:{lams}"


@dataclass(frozen=True)
class ScatteringLayer:
    """All order-``depth`` trajectories of one signal, shape (paths, time)."""

    depth: int
    paths: tuple[ScatteringPath, ...]
    data: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.data.shape[0] != len(self.paths):
            raise ValueError("one data row per path required")
        if any(p.depth != self.depth for p in self.paths):
            raise ValueError("path depth mismatch")

    @property
    def is_empty(self) -> bool:
        return len(self.paths) == 0


def layer_energy(layer: ScatteringLayer) -> float:
    """Squared l2 norm of the layer tensor (fixed row-major summation order)."""
    if layer.is_empty:
        return 0.0
    return float(np.sum(layer.data**2))


def scalogram_power(signal: np.ndarray, fb: Filterbank, activation: str = POWER) -> ScatteringLayer:
    """First layer: per-band squared modulus of the constant-Q transform."""
    y = np.asarray(signal, dtype=float)
    n = fb.spec.signal_len
    if y.shape != (n,):
        raise ValueError(f"signal shape {y.shape} does not match frame length {n}")
    spectrum = np.fft.fft(y)
    rows = np.fft.ifft(spectrum[None, :] * fb.filters, axis=1)
    data = _activate(rows, activation)
    paths = tuple(ScatteringPath((j,)) for j in range(fb.n_filters))
    return ScatteringLayer(depth=1, paths=paths, data=data)


def propagate_layer(prev: ScatteringLayer, fb: Filterbank, activation: str = POWER) -> ScatteringLayer:
    """Scatter every trajectory of ``prev`` into all strictly lower bands.

    Returns an empty layer when no admissible lower band exists, which
    terminates the cascade naturally.
    """
    n = fb.spec.signal_len
    if not prev.is_empty and prev.data.shape[1] != n:
        raise ValueError("layer frame length does not match filterbank")
    blocks: list[np.ndarray] = []
    paths: list[ScatteringPath] = []
    for row, parent in zip(prev.data, prev.paths):
        first_child = parent.indices[-1] + 1
        if first_child >= fb.n_filters:
            continue
        spectrum = np.fft.fft(row)
        children = np.fft.ifft(spectrum[None, :] * fb.filters[first_child:], axis=1)
        blocks.append(_activate(children, activation))
        paths.extend(parent.extended(j) for j in range(first_child, fb.n_filters))
    if not blocks:
        data = np.empty((0, n))
    else:
        data = np.concatenate(blocks, axis=0)
    return ScatteringLayer(depth=prev.depth + 1, paths=tuple(paths), data=data)


def _smoothed_means(rows: np.ndarray, fb: Filterbank) -> np.ndarray:
    """Global time averages of rows convolved with the low-pass window.

    The window has unit DC gain, so the full-frame average of the smoothed
    trajectory equals the raw average exactly (the mean of a circular
    convolution is the product of the DC gains); computed directly.
    """
    if rows.shape[0] == 0:
        return np.empty(0)
    return rows.mean(axis=1) * float(fb.lowpass_hat[0])


@dataclass(frozen=True)
class ScatteringFeature:
    """Time-averaged invariant coefficients of one signal.

    ``order0`` is the averaged low-passed signal itself; ``coeffs`` maps each
    scattering path to its averaged smoothed trajectory.  ``meta`` echoes the
    transform configuration.
    """

    order0: float
    coeffs: dict[ScatteringPath, float]
    meta: dict

    def order(self, m: int) -> dict[ScatteringPath, float]:
        return {p: v for p, v in self.coeffs.items() if p.depth == m}

    @property
    def dimension(self) -> int:
        return 1 + len(self.coeffs)


def feature_names(feature: ScatteringFeature, fb: Filterbank) -> list[str]:
    return ["S0"] + [p.label(fb) for p in feature.coeffs]


def feature_vector(feature: ScatteringFeature) -> np.ndarray:
    return np.array([feature.order0] + list(feature.coeffs.values()))


def scatter(
    signal: np.ndarray,
    fb: Filterbank,
    max_order: int,
    activation: str = POWER,
) -> tuple[ScatteringFeature, list[ScatteringLayer]]:
    """Run the cascade to ``max_order`` (or natural termination) and average.

    Returns the invariant feature plus the raw layers U_1..U_m.  Coefficients
    are ordered by depth, then lexicographically on the path (highest first
    band first), so exports are byte-stable.
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    y = np.asarray(signal, dtype=float)
    layers = [scalogram_power(y, fb, activation)]
    while layers[-1].depth < max_order:
        nxt = propagate_layer(layers[-1], fb, activation)
        if nxt.is_empty:
            break
        layers.append(nxt)
        if layer_energy(nxt) < TERMINATION_ENERGY:
            break

    order0 = float(_smoothed_means(y[None, :], fb)[0])
    coeffs: dict[ScatteringPath, float] = {}
    for layer in layers:
        means = _smoothed_means(layer.data, fb)
        for path, value in zip(layer.paths, means):
            coeffs[path] = float(value)

    meta = {
        "family": fb.spec.family,
        "Q": fb.spec.Q,
        "J": fb.spec.J,
        "T": fb.spec.T,
        "signal_len": fb.spec.signal_len,
        "lambda_max": fb.spec.lambda_max,
        "max_order": max_order,
        "activation": activation,
    }
    return ScatteringFeature(order0=order0, coeffs=coeffs, meta=meta), layers


def renormalize_second_order(
    feature: ScatteringFeature, eps: float | None = None
) -> dict[ScatteringPath, float]:
    """Masking coefficients: each order-2 value divided by its order-1 parent.

    ``eps`` guards the division; by default it is 1e-12 relative to the
    largest first-order coefficient.  Paths whose parent is at or below the
    guard report 0.
    """
    s1 = feature.order(1)
    s2 = feature.order(2)
    if not s1:
        raise ValueError("feature lacks first-order coefficients")
    if eps is None:
        peak = max(s1.values(), default=0.0)
        eps = 1e-12 * peak if peak > 0 else 1e-12
    out: dict[ScatteringPath, float] = {}
    for path, value in s2.items():
        parent = s1[ScatteringPath(path.indices[:1])]
        out[path] = 0.0 if parent <= eps else value / (parent + eps)
    return out
