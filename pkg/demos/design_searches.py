"""
Smallest guard radius and smallest spreading gain
=================================================

Both searches bisect over one fixed ensemble.
"""
from guardzones import (ChannelConfig, MonteCarloEnsemble, MonteCarloSpec, NetworkGeometry,
                        OutageParams, TargetUnachievableError, min_guard_radius,
                        min_spreading_gain)

params = OutageParams.from_db(0, 10, 3)
N = 2000

geom = NetworkGeometry(r_net=1.0, r_ex=1 / 12, r_g=1 / 12, tx_distance=1 / 6, M=30)
ens = MonteCarloEnsemble.draw(geom, N, seed=5)
print("smallest r_g with average outage <= 0.1")
for G_e in (1, 4, 16, 48):
    spec = MonteCarloSpec(N, geom, ChannelConfig(G_e=G_e), params, seed=5)
    print(f"  G_e = {G_e:2d}: r_g = {min_guard_radius(spec, 0.1, ensemble=ens):.3f}")

geom60 = geom.with_(M=60)
ens60 = MonteCarloEnsemble.draw(geom60, N, seed=6)
print("smallest G_e with TC/b >= 10 (M = 60)")
for r_g in (1 / 12, 1 / 8, 1 / 6, 1 / 4):
    spec = MonteCarloSpec(N, geom60.with_(r_g=r_g), ChannelConfig(), params, seed=6)
    try:
        print(f"  r_g = {r_g:.3f}: G_e = {min_spreading_gain(spec, 10.0, ensemble=ens60):.1f}")
    except TargetUnachievableError as exc:
        print(f"  r_g = {r_g:.3f}: {exc}")
