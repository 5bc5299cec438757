"""Brute-force outage estimate by sampling fading gains and activity.

Independent of the closed form: it draws the SINR itself and counts
threshold crossings.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import streams
from .channel import NormalizedPowers
from .outage import OutageParams

CHUNK = 100_000


@dataclass(frozen=True)
class OracleConfig:
    samples: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")


def sample_sinr(omegas: NormalizedPowers, params: OutageParams, n, rng):
    """Draw ``n`` SINR values for a single network."""
    omega = np.asarray(omegas.omega, dtype=float)
    m = np.asarray(omegas.m, dtype=float)
    p = np.asarray(omegas.p, dtype=float)
    m0 = params.m0
    g0 = rng.gamma(m0, 1.0 / m0, size=n)
    if omega.size:
        g = rng.gamma(m, 1.0 / m, size=(n, omega.size))
        on = rng.random((n, omega.size)) < p
        interference = (on * g * omega).sum(axis=1)
    else:
        interference = np.zeros(n)
    with np.errstate(divide="ignore"):   # no noise, no active interferer: infinite SINR
        return g0 * float(omegas.omega0) / (params.z + interference)


def empirical_outage(omegas: NormalizedPowers, params: OutageParams,
                     cfg: OracleConfig = OracleConfig()):
    """Monte Carlo outage estimate and its binomial standard error.

    Returns
    -------
    (float, float)
        Fraction of samples with SINR <= beta, and
        ``sqrt(eps * (1 - eps) / samples)``.
    """
    hits = 0
    for c, start, stop in streams.blocks(cfg.samples, CHUNK):
        rng = streams.block_rng(cfg.seed, streams.FADING, c)
        hits += int(np.count_nonzero(sample_sinr(omegas, params, stop - start, rng) <= params.beta))
    est = hits / cfg.samples
    return est, float(np.sqrt(est * (1 - est) / cfg.samples))
