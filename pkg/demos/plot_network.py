"""
One network realization with exclusion and guard zones
======================================================

Thirty potential interferers in a unit disk, receiver at the center,
reference transmitter at distance 1/6, exclusion radius 1/12 and a CSMA
guard radius of 1/4.
"""
import numpy as np

from guardzones import NetworkGeometry, apply_guard_zones, place_network
from _plot import plt, save

geom = NetworkGeometry(r_net=1.0, r_ex=1 / 12, r_g=1 / 4, tx_distance=1 / 6, M=30)
net = apply_guard_zones(place_network(geom, rng=4))

print(f"{net.active.sum()} of {net.M} interferers stay active")
print("nearest active interferer:", net.interferer_distances()[net.active].min().round(3))

# %%
# Active mobiles draw their guard zone; silenced ones are hollow.
if plt is not None:
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.add_patch(plt.Circle((0, 0), geom.r_net, fill=False))
    ax.plot(*net.receiver, "k^", label="receiver")
    ax.plot(*net.x0, "rs", label="reference transmitter")
    for (x, y), on in zip(net.interferers, net.active):
        ax.plot(x, y, "bo", mfc="b" if on else "none", ms=4)
        if on:
            ax.add_patch(plt.Circle((x, y), geom.r_g, fill=False, ls=":", lw=0.6))
    ax.set_aspect("equal")
    ax.legend(loc="lower left", fontsize=8)
    save(fig, "network.png")
