"""Network placement under uniform clustering, and CSMA guard-zone thinning.

Positions are stored as numpy arrays of shape ``(..., 2)``.  The network is
a disk of radius ``r_net`` centred at the origin; distances to "the
receiver" are measured from ``geometry.receiver``.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from . import streams

MAX_RETRIES = 10_000


class PlacementInfeasibleError(RuntimeError):
    """Raised when a mobile cannot be placed outside all exclusion zones."""


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class NetworkGeometry:
    """Static description of a network disk and its zones.

    ``receiver`` may be a :class:`Point` or one of the strings ``"center"``
    and ``"perimeter"`` (the latter places it at ``(r_net, 0)``).
    """

    r_net: float = 1.0
    r_ex: float = 1 / 12
    r_g: float = 1 / 12
    tx_distance: float = 1 / 6
    M: int = 30
    receiver: Point = Point(0.0, 0.0)

    def __post_init__(self):
        rx = self.receiver
        if isinstance(rx, str):
            if rx == "center":
                rx = Point(0.0, 0.0)
            elif rx == "perimeter":
                rx = Point(float(self.r_net), 0.0)
            else:
                raise ValueError(f"receiver: unknown placement {rx!r}")
        object.__setattr__(self, "receiver", Point(float(rx[0]), float(rx[1])))
        self.validate()

    def validate(self):
        if not self.r_net > 0:
            raise ValueError(f"r_net must be positive, got {self.r_net}")
        if self.r_ex < 0:
            raise ValueError(f"r_ex must be nonnegative, got {self.r_ex}")
        if self.r_g < self.r_ex:
            raise ValueError(f"r_g ({self.r_g}) must be >= r_ex ({self.r_ex})")
        if self.tx_distance < self.r_ex or not self.tx_distance > 0:
            raise ValueError(
                f"tx_distance ({self.tx_distance}) must be positive and >= r_ex ({self.r_ex})")
        if int(self.M) != self.M or self.M < 0:
            raise ValueError(f"M must be a nonnegative integer, got {self.M}")
        if np.hypot(*self.receiver) > self.r_net * (1 + 1e-12):
            raise ValueError("receiver lies outside the network disk")
        if self.tx_distance > 2 * self.r_net:
            raise ValueError("tx_distance exceeds the network diameter")

    @property
    def receiver_on_perimeter(self) -> bool:
        return bool(np.hypot(*self.receiver) >= self.r_net * (1 - 1e-12))

    def with_(self, **changes) -> "NetworkGeometry":
        return replace(self, **changes)


@dataclass
class NetworkRealization:
    """One placed network.

    ``interferers`` is in placement order; that order drives thinning.
    """

    geometry: NetworkGeometry
    x0: np.ndarray
    interferers: np.ndarray
    active: np.ndarray = None

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float).reshape(2)
        self.interferers = np.asarray(self.interferers, dtype=float).reshape(-1, 2)
        if self.active is None:
            self.active = np.ones(len(self.interferers), dtype=bool)
        else:
            self.active = np.asarray(self.active, dtype=bool).copy()

    @property
    def M(self):
        return len(self.interferers)

    @property
    def receiver(self):
        return np.asarray(self.geometry.receiver, dtype=float)

    def interferer_distances(self):
        return np.linalg.norm(self.interferers - self.receiver, axis=-1)

    def tx_distance(self):
        return float(np.linalg.norm(self.x0 - self.receiver))

    def mobiles(self):
        """Receiver, x0 and interferers stacked as ``(M + 2, 2)``."""
        return np.vstack([self.receiver, self.x0, self.interferers])


@dataclass
class NetworkEnsemble:
    """``N`` realizations of the same geometry held as stacked arrays.

    Attributes
    ----------
    x0 : ndarray, shape (N, 2)
    interferers : ndarray, shape (N, M, 2)
    active : ndarray of bool, shape (N, M)
    seed : int
        Master seed the placement was drawn from.
    """

    geometry: NetworkGeometry
    x0: np.ndarray
    interferers: np.ndarray
    active: np.ndarray = None
    seed: int = 0
    _distances: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.active is None:
            self.active = np.ones(self.interferers.shape[:2], dtype=bool)

    def __len__(self):
        return len(self.x0)

    @property
    def M(self):
        return self.interferers.shape[1]

    def interferer_distances(self):
        if self._distances is None:
            rx = np.asarray(self.geometry.receiver, dtype=float)
            self._distances = np.linalg.norm(self.interferers - rx, axis=-1)
        return self._distances

    def tx_distances(self):
        rx = np.asarray(self.geometry.receiver, dtype=float)
        return np.linalg.norm(self.x0 - rx, axis=-1)

    def realization(self, k) -> NetworkRealization:
        return NetworkRealization(self.geometry, self.x0[k].copy(),
                                  self.interferers[k].copy(), self.active[k].copy())

    def thinned(self, r_g=None) -> "NetworkEnsemble":
        """Apply guard zones of radius ``r_g`` (default: the geometry's)
        to the *unthinned* placement.  The placement arrays are shared."""
        geometry = self.geometry if r_g is None else self.geometry.with_(r_g=r_g)
        active = guard_zone_flags(self.x0, self.interferers, geometry.r_g)
        return NetworkEnsemble(geometry, self.x0, self.interferers, active,
                               self.seed, self._distances)

    def unthinned(self) -> "NetworkEnsemble":
        return NetworkEnsemble(self.geometry, self.x0, self.interferers, None,
                               self.seed, self._distances)


def _uniform_disk(rng, n, r_net):
    r = r_net * np.sqrt(rng.random(n))
    theta = 2 * np.pi * rng.random(n)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)


def _place_x0(geometry, n, rng):
    rx = np.asarray(geometry.receiver, dtype=float)
    d = geometry.tx_distance
    norm = np.hypot(*rx)
    if geometry.receiver_on_perimeter:
        # toward the network center
        return np.broadcast_to(rx - d * rx / norm, (n, 2)).copy()
    x0 = np.empty((n, 2))
    todo = np.arange(n)
    for _ in range(MAX_RETRIES):
        theta = 2 * np.pi * rng.random(todo.size)
        cand = rx + d * np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        ok = np.hypot(cand[:, 0], cand[:, 1]) <= geometry.r_net
        x0[todo[ok]] = cand[ok]
        todo = todo[~ok]
        if todo.size == 0:
            return x0
    raise PlacementInfeasibleError("reference transmitter cannot be placed inside the disk")


def _place_batch(geometry, n, rng, max_retries=MAX_RETRIES):
    """Place ``n`` independent realizations, vectorized over realizations."""
    M = int(geometry.M)
    rx = np.asarray(geometry.receiver, dtype=float)
    x0 = _place_x0(geometry, n, rng)
    # slot 0: receiver, slot 1: x0, slots 2..: interferers
    mobiles = np.empty((n, M + 2, 2))
    mobiles[:, 0] = rx
    mobiles[:, 1] = x0
    r_ex = geometry.r_ex
    for i in range(M):
        todo = np.arange(n)
        tries = 0
        while todo.size:
            cand = _uniform_disk(rng, todo.size, geometry.r_net)
            if r_ex > 0:
                d = np.linalg.norm(mobiles[todo, : i + 2] - cand[:, None, :], axis=-1)
                ok = (d >= r_ex).all(axis=1)
            else:
                ok = np.ones(todo.size, dtype=bool)
            mobiles[todo[ok], i + 2] = cand[ok]
            todo = todo[~ok]
            tries += 1
            if todo.size and tries > max_retries:
                raise PlacementInfeasibleError(
                    f"interferer {i + 1} could not be placed after {max_retries} redraws "
                    f"(M={M}, r_ex={r_ex}, r_net={geometry.r_net})")
    return x0, mobiles[:, 2:]


def place_network(geometry: NetworkGeometry, rng, max_retries=MAX_RETRIES) -> NetworkRealization:
    """Place one network by uniform clustering.

    Each interferer is drawn uniformly on the disk and redrawn until it lies
    at least ``r_ex`` from the receiver, ``x0`` and every earlier interferer.

    Parameters
    ----------
    geometry : NetworkGeometry
    rng : numpy.random.Generator or int
        Random stream (an int is used as a seed).
    max_retries : int
        Redraw cap per mobile before :class:`PlacementInfeasibleError`.
    """
    rng = np.random.default_rng(rng)
    x0, interferers = _place_batch(geometry, 1, rng, max_retries)
    return NetworkRealization(geometry, x0[0], interferers[0])


def _place_block(args):
    geometry, seed, block, size, max_retries = args
    rng = streams.block_rng(seed, streams.PLACEMENT, block)
    return _place_batch(geometry, size, rng, max_retries)


def place_ensemble(geometry: NetworkGeometry, n: int, seed: int, workers: int = 1,
                   max_retries=MAX_RETRIES) -> NetworkEnsemble:
    """Place ``n`` networks; realization ``k`` depends only on ``(seed, k)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    jobs = [(geometry, seed, b, stop - start, max_retries)
            for b, start, stop in streams.blocks(n)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_place_block, jobs))
    else:
        parts = [_place_block(job) for job in jobs]
    x0 = np.concatenate([p[0] for p in parts])
    interferers = np.concatenate([p[1] for p in parts])
    return NetworkEnsemble(geometry, x0, interferers, seed=seed)


def guard_zone_flags(x0, interferers, r_g):
    """Activity flags after order-of-placement guard-zone thinning.

    ``x0`` is active first; interferer ``i`` is silenced iff it lies
    strictly within ``r_g`` of an active mobile placed before it.  Works on
    a single realization (``x0`` shape ``(2,)``) or a stack ``(N, 2)``.
    """
    x0 = np.asarray(x0, dtype=float)
    interferers = np.asarray(interferers, dtype=float)
    single = x0.ndim == 1
    if single:
        x0, interferers = x0[None], interferers[None]
    n, M = interferers.shape[:2]
    mob = np.concatenate([x0[:, None, :], interferers], axis=1)
    active = np.ones((n, M + 1), dtype=bool)
    for i in range(1, M + 1):
        d = np.linalg.norm(mob[:, :i] - mob[:, i : i + 1], axis=-1)
        active[:, i] = ~((d < r_g) & active[:, :i]).any(axis=1)
    active = active[:, 1:]
    return active[0] if single else active


def apply_guard_zones(net: NetworkRealization) -> NetworkRealization:
    """Return a copy of ``net`` with CSMA guard-zone activity flags.

    The receiver carries no guard zone.  Flags are recomputed from the
    placement, so applying this twice gives the same result.
    """
    active = guard_zone_flags(net.x0, net.interferers, net.geometry.r_g)
    return NetworkRealization(net.geometry, net.x0.copy(), net.interferers.copy(), active)
