"""
Transmission capacity against M and against the link length
============================================================
"""
import numpy as np

from guardzones import ChannelConfig, MonteCarloEnsemble, NetworkGeometry, OutageParams, evaluate

params = OutageParams.from_db(0, 10, 3)
TX = 1 / 6

# %%
# Capacity grows about linearly with M for spread links without a guard
# zone, and saturates once a guard zone silences the crowd.
print("M    no guard zone   r_g = 3/2 |X0|   (G_e = 48)")
for M in (10, 20, 30, 40, 50, 60):
    geom = NetworkGeometry(1.0, 0.5 * TX, 0.5 * TX, TX, M)
    ens = MonteCarloEnsemble.draw(geom, 2000, seed=2)
    tc = [evaluate(ens, ChannelConfig(G_e=48), params, r_g=r * TX).tc_over_b for r in (0.5, 1.5)]
    print(f"{M:2d}   {tc[0]:12.3f}   {tc[1]:12.3f}")

# %%
# For long links the CSMA network wins over the unthinned one.
print("\n|X0|   unthinned   CSMA r_g=1/4   (G_e = 1)")
for tx in np.arange(0.1, 0.51, 0.1):
    geom = NetworkGeometry(1.0, 1 / 12, 1 / 12, tx, 30)
    ens = MonteCarloEnsemble.draw(geom, 2000, seed=3)
    plain, csma = (evaluate(ens, ChannelConfig(), params, r_g=r).tc_over_b for r in (1 / 12, 1 / 4))
    print(f"{tx:.2f}   {plain:9.3f}   {csma:12.3f}")
