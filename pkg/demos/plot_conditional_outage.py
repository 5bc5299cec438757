"""
Outage of one fixed network as a function of SNR
================================================

No shadowing, one placement.  The closed form is evaluated over a grid
of SNRs, and one point is checked against brute-force sampling.
"""
import numpy as np

from guardzones import (ChannelConfig, NetworkGeometry, OracleConfig, OutageParams,
                        apply_guard_zones, empirical_outage, normalized_powers, place_network)
from guardzones.outage import db_to_linear, outage_curve
from _plot import plt, save

geom = NetworkGeometry(r_net=1.0, r_ex=1 / 12, r_g=1 / 4, tx_distance=1 / 6, M=30)
net = place_network(geom, rng=4)
gamma_db = np.arange(0, 55, 5)

curves = {}
for label, thinned in (("no guard zone", net), ("guard zone", apply_guard_zones(net))):
    for G_e in (1, 48):
        om = normalized_powers(thinned, ChannelConfig(sigma_s=0, G_e=G_e), rng=0)
        curves[f"{label}, G_e={G_e}"] = outage_curve(om, 1.0, db_to_linear(gamma_db), m0=3)

for name, eps in curves.items():
    print(f"{name:28s}", " ".join(f"{e:.3g}" for e in eps))

# %%
# Cross-check one point by sampling the fading directly.
om = normalized_powers(net, ChannelConfig(sigma_s=0), rng=0)
params = OutageParams.from_db(0, 10, 3)
est, se = empirical_outage(om, params, OracleConfig(200_000, seed=1))
print(f"Gamma = 10 dB: closed form {curves['no guard zone, G_e=1'][2]:.4f}, "
      f"sampled {est:.4f} +- {se:.4f}")

if plt is not None:
    fig, ax = plt.subplots()
    for name, eps in curves.items():
        ax.semilogy(gamma_db, eps, label=name)
    ax.set_xlabel("Gamma [dB]")
    ax.set_ylabel("outage probability")
    ax.legend(fontsize=8)
    save(fig, "conditional_outage.png")
