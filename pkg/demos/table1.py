"""
Center versus perimeter receiver
================================

The sixteen-row outage table, produced through the same code path as
``guardzones run --study table1``.  Pass ``--n`` for a smaller ensemble.
"""
import argparse

from guardzones import config
from guardzones.cli import run_study

ap = argparse.ArgumentParser()
ap.add_argument("--n", type=int, default=10_000)
args = ap.parse_args()

cfg = config.build({"study": "table1", "seed": "1", "num_networks": str(args.n)})
print(" G_e alpha r_ex/|X0| r_g/|X0|   eps_c   eps_p")
for row in run_study(cfg):
    print(f"{row['G_e']:4.0f} {row['alpha']:5.0f} {row['r_ex_over_tx']:9.2f} "
          f"{row['r_g_over_tx']:8.2f} {row['eps_c']:7.4f} {row['eps_p']:7.4f}")
