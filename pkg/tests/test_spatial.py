import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from guardzones import (NetworkGeometry, PlacementInfeasibleError, apply_guard_zones,
                        guard_zone_flags, place_ensemble, place_network)
from guardzones.spatial import NetworkRealization
from oracles import brute_force_scan


def min_pairwise(points):
    d = np.linalg.norm(points[:, None] - points[None], axis=-1)
    d[np.diag_indices(len(points))] = np.inf
    return d.min()


FIG1 = NetworkGeometry(r_net=1.0, r_ex=1 / 12, r_g=1 / 4, tx_distance=1 / 6, M=30)


def test_geometry_validation():
    with pytest.raises(ValueError, match="r_g"):
        NetworkGeometry(r_ex=0.2, r_g=0.1)
    with pytest.raises(ValueError, match="tx_distance"):
        NetworkGeometry(r_ex=0.2, r_g=0.2, tx_distance=0.1)
    with pytest.raises(ValueError):
        NetworkGeometry(r_net=0)
    with pytest.raises(ValueError):
        NetworkGeometry(receiver="nowhere")
    assert NetworkGeometry(receiver="perimeter").receiver == (1.0, 0.0)


def test_empty_network():
    net = place_network(NetworkGeometry(M=0), 1)
    assert net.interferers.shape == (0, 2)
    assert net.active.shape == (0,)
    assert apply_guard_zones(net).M == 0


def test_x0_at_tx_distance_center():
    ens = place_ensemble(FIG1, 200, seed=3)
    np.testing.assert_allclose(ens.tx_distances(), 1 / 6)
    angles = np.arctan2(ens.x0[:, 1], ens.x0[:, 0])
    # random direction, not a fixed one
    assert np.ptp(angles) > np.pi


def test_x0_toward_center_on_perimeter():
    geom = FIG1.with_(receiver="perimeter")
    net = place_network(geom, 0)
    np.testing.assert_allclose(net.x0, [1 - 1 / 6, 0.0])


def test_hard_core_spacing_10k_draws():
    ens = place_ensemble(FIG1, 10_000, seed=11)
    rx = np.broadcast_to(np.asarray(FIG1.receiver), (len(ens), 1, 2))
    pts = np.concatenate([rx, ens.x0[:, None], ens.interferers], axis=1)
    d = np.linalg.norm(pts[:, :, None] - pts[:, None], axis=-1)
    idx = np.arange(pts.shape[1])
    d[:, idx, idx] = np.inf
    assert d.min() >= 1 / 12
    assert ens.interferers.shape == (10_000, 30, 2)
    assert np.all(np.hypot(ens.interferers[..., 0], ens.interferers[..., 1]) <= 1.0)


def test_infeasible_packing_raises():
    geom = NetworkGeometry(r_net=1.0, r_ex=0.5, r_g=0.5, tx_distance=0.5, M=40)
    with pytest.raises(PlacementInfeasibleError):
        place_network(geom, 0, max_retries=50)


def test_uniformity_without_exclusion():
    """Chi-square on annular-sector counts at r_ex = 0."""
    geom = NetworkGeometry(r_net=1.0, r_ex=0.0, r_g=0.0, tx_distance=1 / 6, M=30)
    pts = place_ensemble(geom, 2000, seed=5).interferers.reshape(-1, 2)
    r = np.hypot(pts[:, 0], pts[:, 1])
    theta = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * np.pi)
    ring = np.minimum((r**2 * 4).astype(int), 3)        # equal-area annuli
    sector = np.minimum((theta / (np.pi / 4)).astype(int), 7)
    counts = np.bincount(ring * 8 + sector, minlength=32)
    _, pvalue = stats.chisquare(counts)
    assert pvalue > 0.01


def test_guard_zone_trivial_cases():
    geom = NetworkGeometry(r_net=10, r_ex=0.1, r_g=1.0, tx_distance=0.5, M=3)
    far = NetworkRealization(geom, [0.5, 0], [[5, 0], [0, 5], [-5, 0]])
    assert apply_guard_zones(far).active.all()
    near = NetworkRealization(geom, [0.5, 0], [[0.9, 0], [0.5, 0.5], [0.2, 0.3]])
    assert not apply_guard_zones(near).active.any()


def test_deactivated_mobiles_do_not_silence():
    geom = NetworkGeometry(r_net=10, r_ex=0.1, r_g=1.0, tx_distance=0.5, M=2)
    # x1 silenced by x0; x2 is near x1 only, so it stays active
    net = NetworkRealization(geom, [0, 0], [[0.8, 0], [1.6, 0]])
    np.testing.assert_array_equal(apply_guard_zones(net).active, [False, True])


def test_receiver_has_no_guard_zone():
    geom = NetworkGeometry(r_net=10, r_ex=0.0, r_g=1.0, tx_distance=5.0, M=1)
    net = NetworkRealization(geom, [5.0, 0], [[0.1, 0]])
    assert apply_guard_zones(net).active.all()


def test_vectorized_scan_matches_brute_force():
    ens = place_ensemble(FIG1, 300, seed=2)
    flags = guard_zone_flags(ens.x0, ens.interferers, FIG1.r_g)
    for k in range(len(ens)):
        np.testing.assert_array_equal(flags[k], brute_force_scan(ens.x0[k], ens.interferers[k], 1 / 4))


def test_fig1_mean_active_count_against_oracle():
    ens = place_ensemble(FIG1, 10_000, seed=21)
    fast = ens.thinned().active.sum(axis=1)
    slow = np.array([brute_force_scan(ens.x0[k], ens.interferers[k], 1 / 4).sum()
                     for k in range(len(ens))])
    np.testing.assert_array_equal(fast, slow)
    # a typical realization keeps about half of the 30 active
    assert 12 <= fast.mean() <= 18


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), r_ex=st.sampled_from([0.0, 0.05, 1 / 12]),
       extra=st.floats(0.0, 0.4), M=st.integers(0, 40))
def test_thinning_properties(seed, r_ex, extra, M):
    geom = NetworkGeometry(r_net=1.0, r_ex=r_ex, r_g=r_ex + extra, tx_distance=1 / 6, M=M)
    net = place_network(geom, seed)
    thinned = apply_guard_zones(net)
    mob = np.vstack([thinned.x0, thinned.interferers])
    act = np.concatenate([[True], thinned.active])
    # soundness: active mobiles pairwise >= r_g apart
    if act.sum() > 1:
        assert min_pairwise(mob[act]) >= geom.r_g
    # maximality in order: each silenced mobile has an earlier active one within r_g
    for i in np.flatnonzero(~act):
        d = np.linalg.norm(mob[:i] - mob[i], axis=-1)
        assert np.any((d < geom.r_g) & act[:i])
    # idempotence
    np.testing.assert_array_equal(apply_guard_zones(thinned).active, thinned.active)
    # hard-core
    if M:
        assert min_pairwise(net.mobiles()) >= r_ex


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_rg_equal_rex_keeps_everyone(seed):
    geom = NetworkGeometry(r_net=1.0, r_ex=1 / 12, r_g=1 / 12, tx_distance=1 / 6, M=30)
    assert apply_guard_zones(place_network(geom, seed)).active.all()


def test_ensemble_independent_of_workers():
    a = place_ensemble(FIG1, 1200, seed=9, workers=1)
    b = place_ensemble(FIG1, 1200, seed=9, workers=2)
    np.testing.assert_array_equal(a.interferers, b.interferers)
    np.testing.assert_array_equal(a.x0, b.x0)


def test_ensemble_prefix_stable_at_block_boundaries():
    from guardzones.streams import BLOCK_SIZE
    a = place_ensemble(FIG1, BLOCK_SIZE, seed=4)
    b = place_ensemble(FIG1, 2 * BLOCK_SIZE + 7, seed=4)
    np.testing.assert_array_equal(a.interferers, b.interferers[:BLOCK_SIZE])
