"""Despreading, path loss, shadowing and normalized received powers.

Only dimensionless combinations are represented: interferer powers are
relative to the reference transmitter, and noise enters later through the
normalized SNR.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import streams

SPREADING_MODES = ("fixed", "random_chip")


def path_loss(d, alpha, d0):
    """Power-law attenuation ``(d / d0) ** -alpha``, clamped to 1 below ``d0``."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("path_loss: distance must be positive")
    if not d0 > 0:
        raise ValueError("path_loss: reference distance must be positive")
    out = (np.maximum(d, d0) / d0) ** (-alpha)
    return out[()] if out.ndim == 0 else out


def _distance_power(d, alpha, d0):
    # d ** -alpha with the far-field floor at d0 (no floor when d0 == 0)
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("normalized_powers: distance must be positive")
    return np.maximum(d, d0) ** (-alpha)


def chip_function(tau, Tc=1.0):
    """Despreading factor h(tau) for a rectangular chip waveform.

    Equals ``(tau**2 + (Tc - tau)**2) / Tc**2``; ranges over (1/2, 1].
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0) or np.any(tau >= Tc):
        raise ValueError("chip_function: tau must lie in [0, Tc)")
    out = (tau**2 + (Tc - tau) ** 2) / Tc**2
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class ChannelConfig:
    """Propagation and access parameters.

    Attributes
    ----------
    alpha : float
        Path-loss exponent, at least 2.
    sigma_s : float
        Log-normal shadowing standard deviation in dB (0 disables it).
    d0 : float
        Reference distance; 0 means no far-field floor.
    spreading : {"fixed", "random_chip"}
        ``"fixed"`` uses ``G_e`` for every interferer; ``"random_chip"`` draws
        a chip offset per interferer and uses ``G / h(tau)``.
    G_e, G : float
        Effective and nominal processing gains.
    power_ratio, p, m : float or array
        ``P_i / P_0``, duty factors and Nakagami parameters of the
        interferers.
    """

    alpha: float = 3.5
    sigma_s: float = 8.0
    d0: float = 0.0
    spreading: str = "fixed"
    G_e: float = 1.0
    G: float = 32.0
    power_ratio: float = 1.0
    p: float = 0.5
    m: float = 1.0

    def __post_init__(self):
        if self.alpha < 2:
            raise ValueError(f"alpha must be >= 2, got {self.alpha}")
        if self.sigma_s < 0:
            raise ValueError("sigma_s must be nonnegative")
        if self.d0 < 0:
            raise ValueError("d0 must be nonnegative")
        if self.spreading not in SPREADING_MODES:
            raise ValueError(f"spreading must be one of {SPREADING_MODES}")
        if not (self.G_e > 0 and self.G > 0):
            raise ValueError("processing gains must be positive")
        p = np.asarray(self.p, dtype=float)
        if np.any(p < 0) or np.any(p > 1):
            raise ValueError("duty factors must lie in [0, 1]")
        if np.any(np.asarray(self.m, dtype=float) <= 0):
            raise ValueError("Nakagami parameters must be positive")
        if np.any(np.asarray(self.power_ratio, dtype=float) < 0):
            raise ValueError("power ratios must be nonnegative")

    def with_(self, **changes) -> "ChannelConfig":
        return replace(self, **changes)


@dataclass
class NormalizedPowers:
    """Normalized desired power, interferer powers and their parameters.

    ``omega0`` has shape ``batch``; ``omega``, ``p`` and ``m`` have shape
    ``batch + (M,)``.  A single network has ``batch == ()``.
    """

    omega0: np.ndarray
    omega: np.ndarray
    p: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        self.omega0 = np.asarray(self.omega0, dtype=float)
        self.omega = np.asarray(self.omega, dtype=float)
        shape = self.omega.shape
        self.p = np.broadcast_to(np.asarray(self.p, dtype=float), shape)
        self.m = np.broadcast_to(np.asarray(self.m, dtype=float), shape)
        if np.any(self.omega0 <= 0):
            raise ValueError("omega0 must be positive")
        if np.any(self.omega < 0):
            raise ValueError("interferer powers must be nonnegative")

    @property
    def M(self):
        return self.omega.shape[-1]

    def without(self, idx) -> "NormalizedPowers":
        """Drop interferers ``idx`` (single network only)."""
        keep = np.setdiff1d(np.arange(self.M), np.atleast_1d(idx))
        return NormalizedPowers(self.omega0, self.omega[keep], self.p[keep], self.m[keep])

    def __getitem__(self, k) -> "NormalizedPowers":
        return NormalizedPowers(self.omega0[k], self.omega[k], self.p[k], self.m[k])


def effective_gain(config: ChannelConfig, rng, size=None):
    """Per-interferer processing gain ``G_i``."""
    if config.spreading == "fixed":
        return np.full(size if size is not None else (), float(config.G_e))
    rng = np.random.default_rng(rng)
    tau = rng.random(size)
    return config.G / chip_function(tau)


def _gains_from_offsets(config, chip):
    if config.spreading == "fixed":
        return float(config.G_e)
    return config.G / chip_function(chip)


def _omegas(config, tx_dist, int_dist, active, shadow, chip):
    alpha = config.alpha
    xi = config.sigma_s * shadow
    omega0 = 10 ** (xi[..., 0] / 10) * _distance_power(tx_dist, alpha, config.d0)
    gains = _gains_from_offsets(config, chip)
    omega = (np.asarray(config.power_ratio, dtype=float) / gains
             * 10 ** (xi[..., 1:] / 10) * _distance_power(int_dist, alpha, config.d0))
    p = np.where(active, np.asarray(config.p, dtype=float), 0.0)
    return NormalizedPowers(omega0, omega, p, np.broadcast_to(config.m, omega.shape))


def normalized_powers(net, config: ChannelConfig, rng) -> NormalizedPowers:
    """Normalized powers for one placed network with a fresh shadowing draw.

    Deactivated interferers keep their power but get duty factor 0.
    """
    rng = np.random.default_rng(rng)
    M = net.M
    shadow = rng.standard_normal(M + 1) if config.sigma_s > 0 else np.zeros(M + 1)
    chip = rng.random(M) if config.spreading == "random_chip" else None
    return _omegas(config, net.tx_distance(), net.interferer_distances(),
                   net.active, shadow, chip)


@dataclass
class ChannelSample:
    """Standardized random channel state for an ensemble.

    ``shadow`` holds standard normals (column 0 for the desired link) that
    are scaled by ``sigma_s`` at evaluation time, so one sample serves
    every shadowing level and spreading gain (common random numbers).
    ``chip`` holds chip offsets as fractions of a chip.
    """

    shadow: np.ndarray
    chip: np.ndarray


def draw_channel_sample(n, M, seed) -> ChannelSample:
    shadow = np.empty((n, M + 1))
    chip = np.empty((n, M))
    for b, start, stop in streams.blocks(n):
        shadow[start:stop] = streams.block_rng(seed, streams.SHADOWING, b).standard_normal(
            (stop - start, M + 1))
        chip[start:stop] = streams.block_rng(seed, streams.CHIP_OFFSET, b).random(
            (stop - start, M))
    return ChannelSample(shadow, chip)


def ensemble_powers(ensemble, config: ChannelConfig, sample: ChannelSample) -> NormalizedPowers:
    """Normalized powers for every realization of a :class:`NetworkEnsemble`."""
    return _omegas(config, ensemble.tx_distances(), ensemble.interferer_distances(),
                   ensemble.active, sample.shadow, sample.chip)
