"""Shared builders for the test suite."""
import numpy as np

from rispair import PairParams, SystemParams


def make_pair(
    aoa=1.0,
    aod=2.0,
    alpha_a=0.01,
    alpha_b=0.01,
    kappa_tx=10.0,
    kappa_rx=10.0,
    power=100.0,
    noise_var=1.0,
):
    return PairParams(
        alpha_a=alpha_a,
        alpha_b=alpha_b,
        kappa_tx=kappa_tx,
        kappa_rx=kappa_rx,
        aoa=aoa,
        aod=aod,
        power=power,
        noise_var=noise_var,
    )


def make_system(K=2, L=8, **overrides):
    """K pairs with distinct angles; keyword overrides apply to every pair."""
    rng = np.random.default_rng(12345)
    angles = rng.uniform(0.0, 2.0 * np.pi, size=(K, 2))
    pairs = tuple(
        make_pair(aoa=angles[i, 0], aod=angles[i, 1], **overrides) for i in range(K)
    )
    return SystemParams(K=K, L=L, pairs=pairs)
