"""Instantaneous SINR, Monte-Carlo ergodic rates, and the closed-form
statistical-CSI rate approximation.

The closed form replaces the expectation of log2(1 + SINR) by the log of
the SINR built from second moments of the cascaded channels.  Each second
moment reduces to a phase-alignment kernel Omega that depends only on the
phase vector and on sin(aoa) + sin(aod) of the involved pair sides.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import cos, pi, sin

import numpy as np
from numpy.random import Generator

from .channel import TWO_PI, ChannelRealization, SystemParams, sample_fading_batch

__all__ = [
    "PhaseConfig",
    "RateReport",
    "RateModel",
    "rate_model",
    "effective_channel_power",
    "instantaneous_sinr",
    "monte_carlo_rates",
    "omega",
    "omega_double_sum",
    "second_moment",
    "approx_rates",
]

_MC_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class PhaseConfig:
    """A length-L vector of surface phase shifts.

    Continuous configurations hold free angles, wrapped into [0, 2*pi).
    Discrete configurations encode each element with `bits` bits: angles
    lie exactly on the uniform 2**bits-point grid 2*pi*k/2**bits and the
    integer levels are kept alongside (`theta` is recomputed from them).
    """

    theta: np.ndarray
    bits: int | None = None
    levels: np.ndarray | None = None

    def __post_init__(self):
        if self.bits is None:
            if self.levels is not None:
                raise ValueError("levels require bits")
            theta = np.atleast_1d(np.asarray(self.theta, dtype=np.float64)).copy()
            if theta.ndim != 1 or theta.size == 0:
                raise ValueError("theta must be a non-empty 1-D array")
            if not np.all(np.isfinite(theta)):
                raise ValueError("theta must be finite")
            theta = np.mod(theta, TWO_PI)
            theta.setflags(write=False)
            object.__setattr__(self, "theta", theta)
        else:
            bits = int(self.bits)
            if not 1 <= bits <= 16:
                raise ValueError(f"bits must be in [1, 16], got {bits}")
            if self.levels is None:
                raise ValueError("a discrete configuration requires levels")
            levels = np.atleast_1d(np.asarray(self.levels))
            if levels.ndim != 1 or levels.size == 0:
                raise ValueError("levels must be a non-empty 1-D array")
            if not np.issubdtype(levels.dtype, np.integer):
                raise ValueError("levels must be integers")
            levels = levels.astype(np.int64)
            if np.any((levels < 0) | (levels >= (1 << bits))):
                raise ValueError(f"levels must lie in [0, {(1 << bits) - 1}]")
            theta = levels * (TWO_PI / (1 << bits))
            levels.setflags(write=False)
            theta.setflags(write=False)
            object.__setattr__(self, "bits", bits)
            object.__setattr__(self, "levels", levels)
            object.__setattr__(self, "theta", theta)

    @classmethod
    def continuous(cls, theta) -> "PhaseConfig":
        """Free phase angles; wrapped into [0, 2*pi)."""
        return cls(theta=theta)

    @classmethod
    def from_levels(cls, levels, bits: int) -> "PhaseConfig":
        """Exact grid angles 2*pi*k/2**bits from integer levels k."""
        return cls(theta=None, bits=bits, levels=levels)

    @property
    def L(self) -> int:
        return self.theta.shape[0]

    @property
    def is_discrete(self) -> bool:
        return self.bits is not None


@dataclass(frozen=True, eq=False)
class RateReport:
    """Per-pair and sum achievable rates in bits/s/Hz.

    `sum` always equals the exact total of `per_pair`.  Standard errors
    are present for Monte-Carlo reports only; `sum_std_error` is the
    standard error of the per-trial sum-rate samples.
    """

    per_pair: np.ndarray
    sum: float
    method: str  # "closed_form" | "monte_carlo"
    trials: int = 0
    std_error: np.ndarray | None = None
    sum_std_error: float | None = None


def _angles_of(theta) -> np.ndarray:
    if isinstance(theta, PhaseConfig):
        return theta.theta
    arr = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    if arr.ndim != 1:
        raise ValueError("theta must be one-dimensional")
    return arr


def effective_channel_power(h_b, theta, h_a) -> float:
    """|sum_l h_b[l] * exp(j*theta_l) * h_a[l]|**2 for one vector pair."""
    h_b = np.asarray(h_b, dtype=np.complex128)
    h_a = np.asarray(h_a, dtype=np.complex128)
    ang = _angles_of(theta)
    if not (h_b.shape == h_a.shape == ang.shape):
        raise ValueError(
            f"length mismatch: h_b {h_b.shape}, theta {ang.shape}, h_a {h_a.shape}"
        )
    amp = np.sum(h_b * np.exp(1j * ang) * h_a)
    return float(np.abs(amp) ** 2)


def instantaneous_sinr(
    realization: ChannelRealization,
    theta,
    params: SystemParams,
    i: int,
) -> float:
    """SINR of pair i (0-based) for one fading draw and phase vector.

    The interference from transmitter j combines receiver i's vector and
    large-scale gain with transmitter j's vector, gain and power.
    """
    if not 0 <= i < params.K:
        raise ValueError(f"pair index {i} out of range for K={params.K}")
    ang = _angles_of(theta)
    if realization.h_a.shape != (params.K, params.L) or ang.shape[0] != params.L:
        raise ValueError("realization/theta dimensions do not match params")
    cross = realization.h_b[i] * np.exp(1j * ang)
    amps = realization.h_a @ cross  # entry j = sum_l h_a[j,l] e^{j theta_l} h_b[i,l]
    p2 = np.abs(amps) ** 2
    rx = params.pairs[i]
    signal = rx.power * rx.alpha_b * rx.alpha_a * p2[i]
    interference = 0.0
    for j, tx in enumerate(params.pairs):
        if j != i:
            interference += tx.power * rx.alpha_b * tx.alpha_a * p2[j]
    return float(signal / (interference + rx.noise_var))


def omega(theta, aoa: float, aod: float) -> float:
    """Phase-alignment kernel |sum_l exp(j(theta_l + l*pi*(sin aoa + sin aod)))|**2.

    Equals the pairwise-cosine double sum (see omega_double_sum) and lies
    in [0, L**2].
    """
    ang = _angles_of(theta)
    s = np.sin(aoa) + np.sin(aod)
    z = np.exp(1j * (ang + np.pi * s * np.arange(ang.shape[0])))
    return float(np.abs(z.sum()) ** 2)


def omega_double_sum(theta, aoa: float, aod: float) -> float:
    """Literal O(L^2) pairwise-cosine form of the kernel.

    L + 2 * sum_{m<n} cos(theta_n - theta_m + (n-m)*pi*(sin aoa + sin aod)).
    Kept as an independent reference for validating `omega`.
    """
    ang = _angles_of(theta)
    L = ang.shape[0]
    s = sin(aoa) + sin(aod)
    total = float(L)
    for m in range(L - 1):
        for n in range(m + 1, L):
            total += 2.0 * cos(ang[n] - ang[m] + (n - m) * pi * s)
    return total


def second_moment(kappa_rx: float, kappa_tx: float, omega_val: float, L: int) -> float:
    """Mean squared cascaded-channel amplitude for one (receiver, transmitter) side pair.

    (kappa_rx*kappa_tx*Omega + L*(kappa_rx + kappa_tx) + L)
    / ((kappa_rx + 1) * (kappa_tx + 1)).
    """
    if kappa_rx < 0 or kappa_tx < 0:
        raise ValueError("Rician factors must be >= 0")
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    # small slack tolerates fp overshoot of the magnitude-squared identity
    slack = 1e-9 * L * L
    if not -slack <= omega_val <= L * L + slack:
        raise ValueError(f"omega_val {omega_val} outside [0, L^2] for L={L}")
    return (kappa_rx * kappa_tx * omega_val + L * (kappa_rx + kappa_tx) + L) / (
        (kappa_rx + 1.0) * (kappa_tx + 1.0)
    )


class RateModel:
    """Precomputed closed-form rate evaluator for one system configuration.

    Vectorizes the approximate per-pair rates over batches of phase
    vectors; the optimizer uses it for population fitness evaluation.
    Entry (i, j) of every internal matrix pairs receiver i with
    transmitter j.
    """

    def __init__(self, params: SystemParams):
        self.params = params
        K, L = params.K, params.L
        sin_sum = np.sin(params.aoas)[:, None] + np.sin(params.aods)[None, :]
        self._steer = np.exp(
            1j * np.pi * np.outer(np.arange(L), sin_sum.ravel())
        )  # (L, K*K)
        kb = params.kappas_rx[:, None]
        ka = params.kappas_tx[None, :]
        denom = (kb + 1.0) * (ka + 1.0)
        self._m_omega = kb * ka / denom
        self._m_const = (L * (kb + ka) + L) / denom
        self._sig_coef = params.powers * params.alphas_b * params.alphas_a
        inter = params.powers[None, :] * params.alphas_b[:, None] * params.alphas_a[None, :]
        np.fill_diagonal(inter, 0.0)
        self._inter_coef = inter
        self._noise = params.noise_vars

    def second_moments(self, thetas: np.ndarray) -> np.ndarray:
        """(N, K, K) matrix of cascaded second moments for N phase vectors."""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
        n = thetas.shape[0]
        K = self.params.K
        om = np.abs(np.exp(1j * thetas) @ self._steer) ** 2
        return self._m_omega * om.reshape(n, K, K) + self._m_const

    def per_pair_rates(self, thetas: np.ndarray) -> np.ndarray:
        """(N, K) approximate rates for N stacked phase vectors."""
        m = self.second_moments(thetas)
        signal = self._sig_coef * np.diagonal(m, axis1=1, axis2=2)
        interference = np.einsum("ij,nij->ni", self._inter_coef, m)
        return np.log2(1.0 + signal / (interference + self._noise))

    def sum_rates(self, thetas: np.ndarray) -> np.ndarray:
        """(N,) approximate sum rates for N stacked phase vectors."""
        return self.per_pair_rates(thetas).sum(axis=1)


@lru_cache(maxsize=64)
def rate_model(params: SystemParams) -> RateModel:
    """Cached closed-form evaluator for a system configuration."""
    return RateModel(params)


def approx_rates(params: SystemParams, theta) -> RateReport:
    """Closed-form approximate per-pair and sum rates for a phase vector."""
    ang = _angles_of(theta)
    if ang.shape[0] != params.L:
        raise ValueError(f"theta has length {ang.shape[0]}, system has L={params.L}")
    per = rate_model(params).per_pair_rates(ang[None, :])[0]
    per.setflags(write=False)
    return RateReport(per_pair=per, sum=float(per.sum()), method="closed_form", trials=0)


def monte_carlo_rates(
    params: SystemParams,
    theta,
    trials: int,
    rng: Generator,
) -> RateReport:
    """Ergodic per-pair and sum rates averaged over independent fading draws.

    per_pair[i] is the mean of log2(1 + SINR_i) over `trials`
    realizations; standard errors come from the sample variance.  Trials
    are processed in fixed-size chunks accumulated in a fixed order, so a
    given seed always produces bit-identical results.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    ang = _angles_of(theta)
    if ang.shape[0] != params.L:
        raise ValueError(f"theta has length {ang.shape[0]}, system has L={params.L}")
    model = rate_model(params)
    phasor = np.exp(1j * ang)
    K = params.K
    pair_sum = np.zeros(K)
    pair_sumsq = np.zeros(K)
    tot_sum = 0.0
    tot_sumsq = 0.0
    done = 0
    while done < trials:
        c = min(_MC_CHUNK, trials - done)
        h_a, h_b = sample_fading_batch(params, rng, c)
        amps = np.einsum("til,l,tjl->tij", h_b, phasor, h_a)
        p2 = np.abs(amps) ** 2
        signal = model._sig_coef * np.diagonal(p2, axis1=1, axis2=2)
        interference = np.einsum("ij,tij->ti", model._inter_coef, p2)
        rates = np.log2(1.0 + signal / (interference + model._noise))
        pair_sum += rates.sum(axis=0)
        pair_sumsq += (rates**2).sum(axis=0)
        row = rates.sum(axis=1)
        tot_sum += row.sum()
        tot_sumsq += (row**2).sum()
        done += c
    per = pair_sum / trials
    if trials > 1:
        pair_var = np.maximum(pair_sumsq - trials * per**2, 0.0) / (trials - 1)
        se = np.sqrt(pair_var / trials)
        tot_mean = tot_sum / trials
        tot_var = max(tot_sumsq - trials * tot_mean**2, 0.0) / (trials - 1)
        sum_se = float(np.sqrt(tot_var / trials))
    else:
        se = np.full(K, np.nan)
        sum_se = float("nan")
    per.setflags(write=False)
    se.setflags(write=False)
    return RateReport(
        per_pair=per,
        sum=float(per.sum()),
        method="monte_carlo",
        trials=int(trials),
        std_error=se,
        sum_std_error=sum_se,
    )
