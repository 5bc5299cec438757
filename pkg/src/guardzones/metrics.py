"""Spatially averaged outage, transmission capacity, latency and the two
design searches built on them.

A :class:`MonteCarloEnsemble` holds one placement plus one standardized
channel draw.  Sweeps over guard radius, spreading gain, SNR or shadowing
reuse the same ensemble, so neighbouring sweep points are compared with
common random numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import ChannelConfig, ChannelSample, draw_channel_sample, ensemble_powers
from .outage import OutageParams, conditional_outage
from .spatial import NetworkEnsemble, NetworkGeometry, place_ensemble

LATENCY_FORMULAS = ("printed", "renewal")
TC_ESTIMATORS = ("ensemble", "per_realization")


class TargetUnachievableError(ValueError):
    """No point of the search interval meets the requested target."""


@dataclass(frozen=True)
class MonteCarloSpec:
    num_networks: int = 10_000
    geometry: NetworkGeometry = field(default_factory=NetworkGeometry)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    outage: OutageParams = field(default_factory=OutageParams)
    thinning: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.num_networks < 1:
            raise ValueError("num_networks must be >= 1")
        d0, r_ex = self.channel.d0, self.geometry.r_ex
        if d0 > 0 and 0 < r_ex < d0:
            raise ValueError(f"r_ex ({r_ex}) must be >= d0 ({d0})")

    def with_(self, **changes) -> "MonteCarloSpec":
        return replace(self, **changes)


@dataclass
class ExperimentResult:
    """Ensemble averages for one parameter point.

    ``tc_over_b`` is in transmissions per unit area and ``latency_slots``
    in ARQ slots.  ``eps`` and ``active_counts`` are per-realization
    records, kept only on request.
    """

    eps_bar: float
    eps_std_err: float
    tc_over_b: float
    latency_slots: float
    mean_active: float
    num_networks: int
    eps: np.ndarray = field(default=None, repr=False)
    active_counts: np.ndarray = field(default=None, repr=False)


@dataclass
class MonteCarloEnsemble:
    placement: NetworkEnsemble
    sample: ChannelSample
    _thinned: dict = field(default_factory=dict, repr=False)

    @classmethod
    def draw(cls, geometry: NetworkGeometry, n: int, seed: int, workers: int = 1):
        placement = place_ensemble(geometry, n, seed, workers=workers)
        return cls(placement, draw_channel_sample(n, geometry.M, seed))

    @property
    def geometry(self):
        return self.placement.geometry

    def __len__(self):
        return len(self.placement)

    def networks(self, r_g=None, thinning=True) -> NetworkEnsemble:
        if not thinning:
            return self.placement
        r_g = self.geometry.r_g if r_g is None else float(r_g)
        if r_g not in self._thinned:
            self._thinned[r_g] = self.placement.thinned(r_g)
        return self._thinned[r_g]


def evaluate(ensemble: MonteCarloEnsemble, channel: ChannelConfig, params: OutageParams,
             r_g=None, thinning=True, keep_records=False, n_arq=6) -> ExperimentResult:
    """Average the conditional outage over a fixed ensemble."""
    nets = ensemble.networks(r_g, thinning)
    eps = conditional_outage(ensemble_powers(nets, channel, ensemble.sample), params)
    eps = np.atleast_1d(eps)
    counts = nets.active.sum(axis=1)
    n = len(eps)
    eps_bar = float(eps.mean())
    std_err = float(eps.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    mean_active = float(counts.mean())
    result = ExperimentResult(
        eps_bar=eps_bar,
        eps_std_err=std_err,
        tc_over_b=0.0,
        latency_slots=latency(eps_bar, 1.0, n_arq) if eps_bar < 1 else math.inf,
        mean_active=mean_active,
        num_networks=n,
        eps=eps if keep_records else None,
        active_counts=counts if keep_records else None,
    )
    result.tc_over_b = transmission_capacity(result, nets.geometry)
    return result


def average_outage(spec: MonteCarloSpec, workers=1, keep_records=False,
                   ensemble: MonteCarloEnsemble = None) -> ExperimentResult:
    """Spatially averaged outage over ``spec.num_networks`` realizations.

    Each realization is placed, optionally thinned by guard zones, given a
    fresh shadowing draw and passed through :func:`conditional_outage`.
    Pass ``ensemble`` to reuse an existing placement.
    """
    if ensemble is None:
        ensemble = MonteCarloEnsemble.draw(spec.geometry, spec.num_networks, spec.seed, workers)
    return evaluate(ensemble, spec.channel, spec.outage, r_g=spec.geometry.r_g,
                    thinning=spec.thinning, keep_records=keep_records)


def network_density(mean_active, r_net):
    # active interferers plus the reference transmitter, per unit area
    return (mean_active + 1.0) / (math.pi * r_net**2)


def transmission_capacity(result: ExperimentResult, geometry: NetworkGeometry, b=1.0,
                          estimator="ensemble"):
    """``(1 - eps_bar) * lambda * b``.

    ``estimator="ensemble"`` multiplies ensemble means;
    ``"per_realization"`` averages the per-network product and needs the
    records kept by :func:`evaluate`.
    """
    if estimator == "ensemble":
        return (1.0 - result.eps_bar) * network_density(result.mean_active, geometry.r_net) * b
    if estimator == "per_realization":
        if result.eps is None or result.active_counts is None:
            raise ValueError("per_realization estimator needs keep_records=True")
        dens = (result.active_counts + 1.0) / (math.pi * geometry.r_net**2)
        return float(np.mean((1.0 - result.eps) * dens)) * b
    raise ValueError(f"estimator must be one of {TC_ESTIMATORS}")


def latency(eps_bar, Ts=1.0, n_arq=6, formula="printed"):
    """Average hybrid-ARQ latency.

    ``"printed"``: ``Ts * (n_arq / (1 - eps) - (1 - eps) * (n_arq - 1))``.
    ``"renewal"``: ``Ts * (1 + n_arq * eps / (1 - eps))``, the mean of the
    geometric retransmission count.
    """
    if not 0 <= eps_bar < 1:
        raise ValueError(f"latency diverges or is undefined for eps_bar={eps_bar}")
    if n_arq < 1:
        raise ValueError("n_arq must be >= 1")
    q = 1.0 - eps_bar
    if formula == "printed":
        return Ts * (n_arq / q - q * (n_arq - 1))
    if formula == "renewal":
        return Ts * (1.0 + n_arq * eps_bar / q)
    raise ValueError(f"formula must be one of {LATENCY_FORMULAS}")


def _in_band(value, target, band):
    return band is not None and band[0] * target <= value <= band[1] * target


def _first_on_grid(grid, ok, what):
    for value in sorted(grid):
        if ok(value):
            return float(value)
    raise TargetUnachievableError(f"no {what} on the grid meets the target")


def min_guard_radius(spec: MonteCarloSpec, target_eps=0.1, resolution=1e-3,
                     band=(0.999, 1.010), ensemble=None, workers=1, grid=None):
    """Smallest guard radius whose averaged outage is at most ``target_eps``.

    Bisection on ``[r_ex, r_net]`` over a fixed ensemble, assuming the
    averaged outage does not increase with the radius.  The search stops
    early at a radius whose outage falls inside ``band`` (relative to the
    target).  With ``grid`` the radii are scanned in ascending order
    instead and the first one meeting the target is returned, which needs
    no monotonicity.

    Raises
    ------
    TargetUnachievableError
        If even ``r_g = r_net`` misses the target.
    """
    geom = spec.geometry
    if ensemble is None:
        ensemble = MonteCarloEnsemble.draw(geom, spec.num_networks, spec.seed, workers)

    def eps_at(r_g):
        return evaluate(ensemble, spec.channel, spec.outage, r_g=r_g).eps_bar

    if grid is not None:
        return _first_on_grid(grid, lambda r: eps_at(r) <= target_eps, "guard radius")
    lo, hi = geom.r_ex, geom.r_net
    if eps_at(lo) <= target_eps:
        return lo
    e_hi = eps_at(hi)
    if e_hi > target_eps and not _in_band(e_hi, target_eps, band):
        raise TargetUnachievableError(
            f"eps_bar={e_hi:.4g} at r_g=r_net exceeds target {target_eps}")
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        e = eps_at(mid)
        if _in_band(e, target_eps, band):
            return mid
        if e <= target_eps:
            hi = mid
        else:
            lo = mid
    return hi


def min_spreading_gain(spec: MonteCarloSpec, target_tc_over_b, r_g=None, resolution=1e-3,
                       g_max=1e4, ensemble=None, workers=1, grid=None):
    """Smallest effective spreading gain reaching ``tau / b >= target``.

    Bisection on ``log(G_e)`` over ``[1, g_max]`` with a fixed ensemble
    thinned at ``r_g`` (default: the geometry's own).  ``grid`` switches to an
    ascending scan as in :func:`min_guard_radius`.
    """
    geom = spec.geometry if r_g is None else spec.geometry.with_(r_g=r_g)
    if ensemble is None:
        ensemble = MonteCarloEnsemble.draw(geom, spec.num_networks, spec.seed, workers)
    r_g = geom.r_g

    def tc_at(g):
        ch = spec.channel.with_(G_e=float(g), spreading="fixed")
        return evaluate(ensemble, ch, spec.outage, r_g=r_g, thinning=spec.thinning).tc_over_b

    if grid is not None:
        return _first_on_grid(grid, lambda g: tc_at(g) >= target_tc_over_b, "spreading gain")
    if target_tc_over_b <= 0 or tc_at(1.0) >= target_tc_over_b:
        return 1.0
    mean_active = ensemble.networks(r_g, spec.thinning).active.sum(axis=1).mean()
    ceiling = network_density(mean_active, geom.r_net)
    if target_tc_over_b > ceiling:
        raise TargetUnachievableError(
            f"target {target_tc_over_b} exceeds the density ceiling {ceiling:.4g}")
    if tc_at(g_max) < target_tc_over_b:
        raise TargetUnachievableError(f"target {target_tc_over_b} not reached at G_e={g_max}")
    lo, hi = 0.0, math.log(g_max)
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if tc_at(math.exp(mid)) >= target_tc_over_b:
            hi = mid
        else:
            lo = mid
    return math.exp(hi)
