"""Physical link parameters and Rician fast-fading channel generation.

Each of K user pairs communicates through an L-element reflecting
surface.  A pair's channel splits into a fixed large-scale gain (applied
by the rate computations) and a unit-power Rician fast-fading vector
whose line-of-sight component is a half-wavelength steering vector.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, SeedSequence, default_rng

__all__ = [
    "TWO_PI",
    "PairParams",
    "SystemParams",
    "ChannelRealization",
    "substream",
    "los_steering",
    "sample_rician",
    "sample_realization",
    "sample_fading_batch",
]

TWO_PI = 2.0 * np.pi


def substream(seed: int, *path: int) -> Generator:
    """Deterministic child generator for a master seed and an integer path.

    Identical (seed, path) always yields an identical stream; distinct
    paths give statistically independent streams that are safe to consume
    in parallel.
    """
    if int(seed) < 0:
        raise ValueError("seed must be a non-negative integer")
    return default_rng(SeedSequence([int(seed), *(int(p) for p in path)]))


def los_steering(angle: float, L: int) -> np.ndarray:
    """Line-of-sight steering vector for half-wavelength element spacing.

    Entry l (0-based) equals exp(j*l*pi*sin(angle)); every entry has unit
    modulus.
    """
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    return np.exp(1j * (np.pi * np.sin(angle)) * np.arange(L))


def sample_rician(
    los: np.ndarray,
    kappa: float,
    rng: Generator,
    size: int | None = None,
) -> np.ndarray:
    """Draw Rician-faded vectors around a unit-modulus LoS vector.

    Returns sqrt(kappa/(kappa+1))*los + sqrt(1/(kappa+1))*w where the
    scatter w has i.i.d. entries with independent N(0, 1/2) real and
    imaginary parts, so every entry has unit total power.

    Parameters
    ----------
    los : complex array, shape (L,)
        Line-of-sight vector (unit-modulus entries).
    kappa : float
        Rician factor, finite and >= 0 (0 gives Rayleigh fading).
    rng : numpy.random.Generator
    size : int, optional
        If given, return `size` stacked independent draws, shape (size, L).
    """
    los = np.asarray(los, dtype=np.complex128)
    if los.ndim != 1:
        raise ValueError("los must be one-dimensional")
    if not (np.isfinite(kappa) and kappa >= 0.0):
        raise ValueError(f"kappa must be finite and >= 0, got {kappa}")
    shape = los.shape if size is None else (int(size), los.shape[0])
    scatter = np.sqrt(0.5) * (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    )
    return np.sqrt(kappa / (kappa + 1.0)) * los + np.sqrt(1.0 / (kappa + 1.0)) * scatter


@dataclass(frozen=True)
class PairParams:
    """Physical parameters of one transmitter/receiver pair.

    Angles are wrapped into [0, 2*pi); gains, powers and noise are linear
    (not dB) quantities.
    """

    alpha_a: float    # large-scale gain, transmitter -> surface
    alpha_b: float    # large-scale gain, surface -> receiver
    kappa_tx: float   # Rician factor of the transmitter-side fading
    kappa_rx: float   # Rician factor of the receiver-side fading
    aoa: float        # receiver-side LoS angle (rad)
    aod: float        # transmitter-side LoS angle (rad)
    power: float      # transmit power
    noise_var: float  # receiver noise variance

    def __post_init__(self):
        for name in ("alpha_a", "alpha_b"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v}")
        for name in ("kappa_tx", "kappa_rx"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if not (np.isfinite(self.power) and self.power >= 0):
            raise ValueError(f"power must be finite and >= 0, got {self.power}")
        if not (np.isfinite(self.noise_var) and self.noise_var > 0):
            raise ValueError(f"noise_var must be finite and > 0, got {self.noise_var}")
        for name in ("aoa", "aod"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, float(np.mod(v, TWO_PI)))


@dataclass(frozen=True)
class SystemParams:
    """K user pairs sharing an L-element surface with lambda/2 spacing."""

    K: int
    L: int
    pairs: tuple[PairParams, ...]
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if len(self.pairs) != self.K:
            raise ValueError(f"expected K={self.K} pairs, got {len(self.pairs)}")
        if self.spacing_ratio != 0.5:
            raise ValueError("only half-wavelength spacing (spacing_ratio=0.5) is supported")

    def _vec(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.pairs], dtype=np.float64)

    @property
    def powers(self) -> np.ndarray:
        return self._vec("power")

    @property
    def noise_vars(self) -> np.ndarray:
        return self._vec("noise_var")

    @property
    def alphas_a(self) -> np.ndarray:
        return self._vec("alpha_a")

    @property
    def alphas_b(self) -> np.ndarray:
        return self._vec("alpha_b")

    @property
    def kappas_tx(self) -> np.ndarray:
        return self._vec("kappa_tx")

    @property
    def kappas_rx(self) -> np.ndarray:
        return self._vec("kappa_rx")

    @property
    def aoas(self) -> np.ndarray:
        return self._vec("aoa")

    @property
    def aods(self) -> np.ndarray:
        return self._vec("aod")


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One fast-fading draw; rows index pairs, columns surface elements."""

    h_a: np.ndarray  # (K, L) transmitter-side vectors
    h_b: np.ndarray  # (K, L) receiver-side vectors

    def __post_init__(self):
        h_a = np.asarray(self.h_a, dtype=np.complex128)
        h_b = np.asarray(self.h_b, dtype=np.complex128)
        if h_a.ndim != 2 or h_a.shape != h_b.shape:
            raise ValueError("h_a and h_b must be 2-D arrays of equal shape")
        if not (np.all(np.isfinite(h_a)) and np.all(np.isfinite(h_b))):
            raise ValueError("channel entries must be finite")
        object.__setattr__(self, "h_a", h_a)
        object.__setattr__(self, "h_b", h_b)


def sample_realization(params: SystemParams, rng: Generator) -> ChannelRealization:
    """Draw one independent fast-fading realization of all 2K vectors.

    Draw order is fixed: pair by pair, transmitter side then receiver
    side, so identical seeds reproduce identical realization streams.
    """
    K, L = params.K, params.L
    h_a = np.empty((K, L), dtype=np.complex128)
    h_b = np.empty((K, L), dtype=np.complex128)
    for i, pair in enumerate(params.pairs):
        h_a[i] = sample_rician(los_steering(pair.aod, L), pair.kappa_tx, rng)
        h_b[i] = sample_rician(los_steering(pair.aoa, L), pair.kappa_rx, rng)
    return ChannelRealization(h_a, h_b)


def sample_fading_batch(
    params: SystemParams, rng: Generator, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """n stacked fading realizations, shape (n, K, L) per side.

    Consumes the generator exactly like n successive sample_realization
    calls: batch row t is bit-identical to the t-th sequential draw.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    K, L = params.K, params.L
    # layout (trial, pair, side a/b, re/im, element) matches the scalar draw order
    z = rng.standard_normal((n, K, 2, 2, L))
    w_a = np.sqrt(0.5) * (z[:, :, 0, 0, :] + 1j * z[:, :, 0, 1, :])
    w_b = np.sqrt(0.5) * (z[:, :, 1, 0, :] + 1j * z[:, :, 1, 1, :])
    steer_a = np.stack([los_steering(p.aod, L) for p in params.pairs])
    steer_b = np.stack([los_steering(p.aoa, L) for p in params.pairs])
    ka = params.kappas_tx[:, None]
    kb = params.kappas_rx[:, None]
    h_a = np.sqrt(ka / (ka + 1.0)) * steer_a + np.sqrt(1.0 / (ka + 1.0)) * w_a
    h_b = np.sqrt(kb / (kb + 1.0)) * steer_b + np.sqrt(1.0 / (kb + 1.0)) * w_b
    return h_a, h_b
