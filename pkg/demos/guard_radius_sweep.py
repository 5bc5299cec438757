"""
Average outage, capacity and latency against the guard radius
=============================================================

Distances in units of the link length |X0| = 1/6, network radius 6 |X0|.
One ensemble per exclusion radius is reused across the sweep, so
neighbouring points share random numbers.
"""
import numpy as np

from guardzones import ChannelConfig, MonteCarloEnsemble, NetworkGeometry, OutageParams, evaluate
from _plot import plt, save

TX = 1 / 6
params = OutageParams.from_db(beta_db=0, gamma_db=10, m0=3)
r_g_rel = np.arange(0.5, 3.01, 0.25)

results = {}
for G_e in (1, 48):
    geom = NetworkGeometry(r_net=1.0, r_ex=0.5 * TX, r_g=0.5 * TX, tx_distance=TX, M=30)
    ens = MonteCarloEnsemble.draw(geom, 2000, seed=1)
    results[G_e] = [evaluate(ens, ChannelConfig(G_e=G_e), params, r_g=r * TX) for r in r_g_rel]

print("r_g/|X0|  " + "  ".join(f"eps(G={g}) TC(G={g}) D(G={g})" for g in results))
for k, r in enumerate(r_g_rel):
    cells = [f"{res[k].eps_bar:9.4f} {res[k].tc_over_b:7.3f} {res[k].latency_slots:6.3f}"
             for res in results.values()]
    print(f"{r:8.2f}  " + "   ".join(cells))

if plt is not None:
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    for G_e, res in results.items():
        axes[0].plot(r_g_rel, [x.eps_bar for x in res], label=f"G_e={G_e}")
        axes[1].plot(r_g_rel, [x.tc_over_b for x in res], label=f"G_e={G_e}")
    axes[0].set_ylabel("average outage")
    axes[1].set_ylabel("TC / b")
    for ax in axes:
        ax.set_xlabel("r_g / |X0|")
        ax.legend()
    save(fig, "guard_radius_sweep.png")
