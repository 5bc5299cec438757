"""Exact conditional outage probability for Nakagami fading with integer m0.

Given normalized powers, the SINR outage probability is

    eps = 1 - exp(-u) * sum_{s<m0} sum_{t<=s} u**(s-t) / (s-t)! * b0**t * H_t

with ``b0 = beta * m0 / omega0``, ``u = b0 / Gamma`` and ``H_t`` the
degree-``t`` coefficient of the product over interferers of the
polynomials ``sum_l G_l(psi_i) x**l``.  Internally the scaled
coefficients ``b0**t * H_t`` are built directly, which keeps every term
bounded when the desired signal is weak or the noise vanishes.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .channel import NormalizedPowers

CONSISTENCY_TOL = 1e-12


class NumericalConsistencyError(ArithmeticError):
    """A computed probability left [0, 1] by more than rounding error."""


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


@dataclass(frozen=True)
class OutageParams:
    """SINR threshold ``beta`` and normalized SNR ``gamma_snr`` (both linear),
    and the integer Nakagami parameter ``m0`` of the desired link."""

    beta: float = 1.0
    gamma_snr: float = 10.0
    m0: int = 3

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not self.gamma_snr > 0:
            raise ValueError("gamma_snr must be positive (may be inf)")
        if int(self.m0) != self.m0 or self.m0 < 1:
            raise ValueError(f"m0 must be a positive integer, got {self.m0}")
        object.__setattr__(self, "m0", int(self.m0))

    @classmethod
    def from_db(cls, beta_db=0.0, gamma_db=10.0, m0=3):
        return cls(float(db_to_linear(beta_db)), float(db_to_linear(gamma_db)), m0)

    @property
    def z(self):
        """Noise term of the SINR denominator (``1 / gamma_snr``)."""
        return 1.0 / self.gamma_snr


def _rising_ratio(ell, m):
    # Gamma(ell + m) / (ell! Gamma(m)) as a running product
    m = np.asarray(m, dtype=float)
    out = np.ones_like(m)
    for k in range(ell):
        out = out * (m + k) / (k + 1)
    return out


def psi(omegas: NormalizedPowers, params: OutageParams):
    """``Psi_i = 1 / (b0 * omega_i / m_i + 1)`` with ``b0 = beta * m0 / omega0``."""
    b0 = params.beta * params.m0 / omegas.omega0
    return 1.0 / (b0[..., None] * omegas.omega / omegas.m + 1.0)


def g_ell(ell, psi_i, omega_i, m_i, p_i):
    """Factor ``G_ell(Psi_i)`` of the ``H_t`` product (vectorized)."""
    psi_i, omega_i, m_i, p_i = (np.asarray(a, dtype=float) for a in (psi_i, omega_i, m_i, p_i))
    if ell == 0:
        return 1.0 - p_i * (1.0 - psi_i**m_i)
    return p_i * _rising_ratio(ell, m_i) * (omega_i / m_i) ** ell * psi_i ** (m_i + ell)


def truncated_product(rows):
    """Coefficients of the product of polynomials, truncated to their length.

    ``rows`` has shape ``batch + (M, K)``: row ``i`` holds the coefficients
    of degree ``0..K-1`` of interferer ``i``.  Returns ``batch + (K,)``.
    Costs ``O(M K**2)``.
    """
    rows = np.asarray(rows, dtype=float)
    *batch, M, K = rows.shape
    c = np.zeros((*batch, K))
    c[..., 0] = 1.0
    for i in range(M):
        g = rows[..., i, :]
        new = np.zeros_like(c)
        for t in range(K):
            for ell in range(t + 1):
                new[..., t] += c[..., t - ell] * g[..., ell]
        c = new
    return c


def g_rows(omegas: NormalizedPowers, params: OutageParams):
    """``G_ell(Psi_i)`` for ``ell < m0`` stacked as ``batch + (M, m0)``."""
    ps = psi(omegas, params)
    return np.stack([g_ell(ell, ps, omegas.omega, omegas.m, omegas.p)
                     for ell in range(params.m0)], axis=-1)


def h_coefficients(omegas: NormalizedPowers, params: OutageParams):
    """``H_0 .. H_{m0-1}`` along the last axis."""
    return truncated_product(g_rows(omegas, params))


def h_t(t, omegas: NormalizedPowers, params: OutageParams):
    """Single coefficient ``H_t``; requires ``0 <= t <= m0 - 1``."""
    if not 0 <= t < params.m0:
        raise ValueError(f"t must lie in [0, {params.m0 - 1}], got {t}")
    return h_coefficients(omegas, params)[..., t]


def _scaled_rows(omegas, params):
    # b0**ell * G_ell; uses b0 * omega / m * psi == 1 - psi
    m0 = params.m0
    b0 = params.beta * m0 / omegas.omega0
    x = b0[..., None] * omegas.omega / omegas.m
    log_psi = -np.log1p(x)
    psi_m = np.exp(omegas.m * log_psi)
    one_minus_psi = x / (1.0 + x)
    rows = [1.0 - omegas.p * (1.0 - psi_m)]
    for ell in range(1, m0):
        rows.append(omegas.p * _rising_ratio(ell, omegas.m) * one_minus_psi**ell * psi_m)
    return np.stack(rows, axis=-1)


def _neumaier_sum(terms):
    total = np.zeros_like(terms[0])
    comp = np.zeros_like(terms[0])
    for x in terms:
        t = total + x
        comp += np.where(np.abs(total) >= np.abs(x), (total - t) + x, (x - t) + total)
        total = t
    return total + comp


def conditional_outage(omegas: NormalizedPowers, params: OutageParams):
    """Outage probability ``P[SINR <= beta | omegas]``.

    Vectorized over any leading batch shape of ``omegas``.  An infinite
    ``gamma_snr`` (no noise) is handled exactly.

    Raises
    ------
    NumericalConsistencyError
        If the evaluated probability falls outside ``[-1e-12, 1 + 1e-12]``.
    """
    m0 = params.m0
    b0 = params.beta * m0 / omegas.omega0
    u = b0 * params.z
    if omegas.M:
        k = truncated_product(_scaled_rows(omegas, params))
    else:
        k = np.zeros(np.shape(b0) + (m0,))
        k[..., 0] = 1.0
    # u**k / k! for k < m0
    powers = [np.ones_like(u)]
    for j in range(1, m0):
        powers.append(powers[-1] * u / j)
    terms = [powers[s - t] * k[..., t] for s in range(m0) for t in range(s + 1)]
    eps = 1.0 - np.exp(-u) * _neumaier_sum(terms)
    if np.any(eps < -CONSISTENCY_TOL) or np.any(eps > 1 + CONSISTENCY_TOL):
        raise NumericalConsistencyError(
            f"outage evaluated outside [0, 1]: range [{np.min(eps)}, {np.max(eps)}]")
    eps = np.clip(eps, 0.0, 1.0)
    return eps[()] if np.ndim(eps) == 0 else eps


def outage_curve(omegas: NormalizedPowers, beta, gamma_snr_grid, m0):
    """Conditional outage of one network over a grid of normalized SNRs."""
    return np.array([conditional_outage(omegas, OutageParams(beta, g, m0))
                     for g in np.atleast_1d(gamma_snr_grid)])
