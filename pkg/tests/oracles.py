"""Independent brute-force references used by the unit and acceptance tests.

Deliberately naive: plain loops, scipy's gamma function, no shared code
with the package beyond its input types.
"""
import itertools
import math

import numpy as np
from scipy.special import gamma as gamma_fn


def brute_force_scan(x0, interferers, r_g):
    """Straight-line re-implementation of the guard-zone scan."""
    placed = [(tuple(x0), True)]
    flags = []
    for pt in interferers:
        pt = tuple(pt)
        silenced = any(act and math.dist(q, pt) < r_g for q, act in placed)
        placed.append((pt, not silenced))
        flags.append(not silenced)
    return np.array(flags, dtype=bool)


def brute_g(ell, psi_i, omega_i, m_i, p_i):
    if ell == 0:
        return 1 - p_i * (1 - psi_i**m_i)
    return (p_i * gamma_fn(ell + m_i) / (math.factorial(ell) * gamma_fn(m_i))
            * (omega_i / m_i) ** ell * psi_i ** (m_i + ell))


def brute_h(t, omega0, omega, m, p, beta, m0):
    """Sum over every index tuple (l_1..l_M) with l_1 + ... + l_M = t."""
    b0 = beta * m0 / omega0
    ps = [1 / (b0 * o / mi + 1) for o, mi in zip(omega, m)]
    total = 0.0
    for idx in itertools.product(range(t + 1), repeat=len(omega)):
        if sum(idx) != t:
            continue
        total += math.prod(brute_g(l, ps[i], omega[i], m[i], p[i]) for i, l in enumerate(idx))
    return total


def brute_eps(omega0, omega, m, p, beta, gamma_snr, m0):
    b0 = beta * m0 / omega0
    z = 1 / gamma_snr
    acc = 0.0
    for s in range(m0):
        for t in range(s + 1):
            acc += (b0 * z) ** (s - t) / math.factorial(s - t) * b0**t * brute_h(
                t, omega0, omega, m, p, beta, m0)
    return 1 - math.exp(-b0 * z) * acc
