"""Experiment runner.

    guardzones run --config study.cfg --seed 7 --out results/
    guardzones validate --config study.cfg

Each run writes ``<out>/<study>.csv`` (one row per sweep point, units in
the header) and ``<out>/<study>.manifest.json``.  A manifest can be passed
back as ``--config`` to reproduce the CSV byte for byte.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import logging
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, config as cfgmod
from .channel import ChannelConfig, ensemble_powers
from .config import ConfigError
from .metrics import (MonteCarloEnsemble, MonteCarloSpec, TargetUnachievableError, evaluate,
                      latency, min_guard_radius, min_spreading_gain, transmission_capacity)
from .outage import OutageParams, conditional_outage
from .spatial import NetworkGeometry, PlacementInfeasibleError

log = logging.getLogger("guardzones")


class RunError(RuntimeError):
    pass


UNITS = {
    "G_e": "1", "alpha": "1", "r_ex_over_tx": "x tx_distance", "r_g_over_tx": "x tx_distance",
    "r_net_over_tx": "x tx_distance", "r_net": "len", "tx_distance": "len", "r_ex": "len",
    "r_g": "len", "M": "count", "receiver": "-", "sigma_s_db": "dB", "spreading": "-",
    "p": "1", "m": "1", "m0": "1", "beta_db": "dB", "gamma_db": "dB", "thinning": "-",
    "num_networks": "count", "seed": "-", "eps_bar": "prob", "eps_std_err": "prob",
    "tc_over_b": "1/len^2", "latency_slots": "Ts", "mean_active": "count",
    "eps": "prob", "min_r_g": "len", "min_G_e": "1", "target_eps": "prob",
    "target_tc_over_b": "1/len^2", "status": "-",
}


def _unit(name):
    for suffix in ("_center", "_perimeter"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
    if name in ("eps_c", "eps_p"):
        return "prob"
    return UNITS[name]


# -- building specs from a typed config --------------------------------------

def geometry_for(cfg, **point):
    """Absolute-unit geometry for one sweep point."""
    c = {**cfg, **point}
    tx = c["tx_distance"]
    scale = tx if c["distance_units"] == "tx_distance" else 1.0
    return NetworkGeometry(r_net=c["r_net"] * scale, r_ex=c["r_ex"] * scale,
                           r_g=c["r_g"] * scale, tx_distance=tx, M=c["M"],
                           receiver=c["receiver"])


def channel_for(cfg, **point):
    c = {**cfg, **point}
    return ChannelConfig(alpha=c["alpha"], sigma_s=c["sigma_s_db"], d0=c["d0"],
                         spreading=c["spreading"], G_e=c["G_e"], G=c["G"],
                         power_ratio=c["power_ratio"], p=c["p"], m=c["m"])


def params_for(cfg, **point):
    c = {**cfg, **point}
    return OutageParams.from_db(c["beta_db"], c["gamma_db"], c["m0"])


def _grid_key(name):
    return name[: -len("_grid")]


def sweep_points(cfg):
    """Sweep points of the configured study, as dicts of overridden keys."""
    names = cfgmod.STUDY_GRIDS[cfg["study"]]
    for values in itertools.product(*(cfg[n] for n in names)):
        yield {_grid_key(n): v for n, v in zip(names, values)}


def validate(cfg):
    """Check every sweep point builds a valid geometry/channel without simulating."""
    for point in sweep_points(cfg):
        try:
            geometry_for(cfg, **point)
            channel_for(cfg, **point)
            params_for(cfg, **point)
        except ValueError as exc:
            raise ConfigError(_offending_key(str(exc)), f"{exc} at sweep point {point}") from None
    return "valid"


def _offending_key(message):
    first = message.split(" ", 1)[0].rstrip(":")
    known = set(cfgmod.SCALARS) | {"sigma_s"}
    return first if first in known else "config"


# -- rows -----------------------------------------------------------------------

def _inputs(cfg, geom: NetworkGeometry, **point):
    c = {**cfg, **point}
    tx = geom.tx_distance
    return {
        "G_e": c["G_e"], "alpha": c["alpha"],
        "r_ex_over_tx": geom.r_ex / tx, "r_g_over_tx": geom.r_g / tx,
        "r_net_over_tx": geom.r_net / tx,
        "r_net": geom.r_net, "tx_distance": tx, "r_ex": geom.r_ex, "r_g": geom.r_g,
        "M": geom.M, "receiver": c["receiver"], "sigma_s_db": c["sigma_s_db"],
        "spreading": c["spreading"], "p": c["p"], "m": c["m"], "m0": c["m0"],
        "beta_db": c["beta_db"], "gamma_db": c["gamma_db"], "thinning": c["thinning"],
        "num_networks": c["num_networks"], "seed": c["seed"],
    }


def _result_fields(cfg, result, geom):
    tc = transmission_capacity(result, geom, b=cfg["b"], estimator=cfg["tc_estimator"])
    lat = (latency(result.eps_bar, cfg["Ts"], cfg["n_arq"], cfg["latency_formula"])
           if result.eps_bar < 1 else math.inf)
    return {"eps_bar": result.eps_bar, "eps_std_err": result.eps_std_err,
            "tc_over_b": tc, "latency_slots": lat, "mean_active": result.mean_active}


class _Ensembles:
    """Placement cache keyed by geometry minus the guard radius."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.cache = {}

    def get(self, geom, n=None):
        key = (geom.r_net, geom.r_ex, geom.tx_distance, geom.M, geom.receiver)
        if key not in self.cache:
            self.cache[key] = MonteCarloEnsemble.draw(
                geom, n or self.cfg["num_networks"], self.cfg["seed"], self.cfg["workers"])
        return self.cache[key]


def _guarded(point, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PlacementInfeasibleError as exc:
        raise RunError(f"sweep point {point}: {exc}") from None
    except ValueError as exc:
        if isinstance(exc, TargetUnachievableError):
            raise
        raise RunError(f"sweep point {point}: {exc}") from None


def _sweep_rows(cfg):
    ens = _Ensembles(cfg)
    keep = cfg["tc_estimator"] == "per_realization"
    for point in sweep_points(cfg):
        geom = _guarded(point, geometry_for, cfg, **point)
        ensemble = _guarded(point, ens.get, geom)
        result = _guarded(point, evaluate, ensemble, channel_for(cfg, **point),
                          params_for(cfg, **point), r_g=geom.r_g,
                          thinning=cfg["thinning"], keep_records=keep)
        yield {**_inputs(cfg, geom, **point), **_result_fields(cfg, result, geom)}


def _table1_rows(cfg):
    ens = _Ensembles(cfg)
    keep = cfg["tc_estimator"] == "per_realization"
    for G_e, alpha, r_ex, r_g in itertools.product(
            cfg["G_e_grid"], cfg["alpha_grid"], cfg["r_ex_grid"], cfg["r_g_grid"]):
        point = {"G_e": G_e, "alpha": alpha, "r_ex": r_ex, "r_g": r_g}
        per_rx = {}
        for rx in cfg["receiver_grid"]:
            geom = _guarded(point, geometry_for, cfg, receiver=rx, **point)
            result = _guarded(point, evaluate, ens.get(geom), channel_for(cfg, **point),
                              params_for(cfg, **point), r_g=geom.r_g,
                              thinning=cfg["thinning"], keep_records=keep)
            per_rx[rx] = (geom, result)
        geom = next(iter(per_rx.values()))[0]
        row = {"G_e": G_e, "alpha": alpha, "r_ex_over_tx": geom.r_ex / geom.tx_distance,
               "r_g_over_tx": geom.r_g / geom.tx_distance}
        short = {"center": "eps_c", "perimeter": "eps_p"}
        for rx, (g, res) in per_rx.items():
            row[short[rx]] = res.eps_bar
        inputs = _inputs(cfg, geom, **point)
        del inputs["receiver"]
        row.update({k: v for k, v in inputs.items() if k not in row})
        for rx, (g, res) in per_rx.items():
            for k, v in _result_fields(cfg, res, g).items():
                row[f"{k}_{rx}"] = v
        yield row


def _min_rg_rows(cfg):
    ens = _Ensembles(cfg)
    for point in sweep_points(cfg):
        geom = _guarded(point, geometry_for, cfg, **point)
        ensemble = _guarded(point, ens.get, geom)
        spec = _spec(cfg, geom, point)
        row = _inputs(cfg, geom, **point)
        row["target_eps"] = cfg["target_eps"]
        try:
            row["min_r_g"] = min_guard_radius(spec, cfg["target_eps"], ensemble=ensemble)
            row["status"] = "ok"
        except TargetUnachievableError as exc:
            log.warning("sweep point %s: %s", point, exc)
            row["min_r_g"] = math.nan
            row["status"] = "unachievable"
        yield row


def _min_ge_rows(cfg):
    ens = _Ensembles(cfg)
    for point in sweep_points(cfg):
        geom = _guarded(point, geometry_for, cfg, **point)
        ensemble = _guarded(point, ens.get, geom)
        spec = _spec(cfg, geom, point)
        row = _inputs(cfg, geom, **point)
        row["target_tc_over_b"] = cfg["target_tc"] / cfg["b"]
        try:
            row["min_G_e"] = min_spreading_gain(spec, cfg["target_tc"] / cfg["b"],
                                                ensemble=ensemble)
            row["status"] = "ok"
        except TargetUnachievableError as exc:
            log.warning("sweep point %s: %s", point, exc)
            row["min_G_e"] = math.nan
            row["status"] = "unachievable"
        yield row


def _single_network_rows(cfg):
    ens = _Ensembles(cfg)
    for point in sweep_points(cfg):
        geom = _guarded(point, geometry_for, cfg, **point)
        ensemble = _guarded(point, ens.get, geom, 1)
        nets = ensemble.networks(geom.r_g, cfg["thinning"])
        omegas = ensemble_powers(nets, channel_for(cfg, **point), ensemble.sample)[0]
        row = _inputs(cfg, geom, **point)
        row["num_networks"] = 1
        row["mean_active"] = float(nets.active[0].sum())
        row["eps"] = float(conditional_outage(omegas, params_for(cfg, **point)))
        yield row


def _spec(cfg, geom, point):
    return MonteCarloSpec(cfg["num_networks"], geom, channel_for(cfg, **point),
                          params_for(cfg, **point), cfg["thinning"], cfg["seed"])


RUNNERS = {
    "table1": _table1_rows,
    "outage_vs_rg": _sweep_rows,
    "tc_vs_rg": _sweep_rows,
    "latency_vs_rg": _sweep_rows,
    "tc_vs_M": _sweep_rows,
    "tc_vs_tx_distance": _sweep_rows,
    "min_rg_curve": _min_rg_rows,
    "min_ge_curve": _min_ge_rows,
    "single_network": _single_network_rows,
}


def run_study(cfg):
    """Run the configured study and return its rows (list of dicts)."""
    return list(RUNNERS[cfg["study"]](cfg))


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def csv_text(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    names = list(rows[0])
    writer.writerow([f"{n} [{_unit(n)}]" for n in names])
    for row in rows:
        writer.writerow([_fmt(row[n]) for n in names])
    return buf.getvalue()


def _geometry_forms(cfg):
    tx = cfg["tx_distance"]
    scale = tx if cfg["distance_units"] == "tx_distance" else 1.0
    absolute = {k: cfg[k] * scale for k in ("r_net", "r_ex", "r_g")}
    absolute["tx_distance"] = tx
    ratios = {f"{k}_over_tx": absolute[k] / tx for k in ("r_net", "r_ex", "r_g")}
    return {"absolute": absolute, "relative_to_tx_distance": ratios,
            "note": "grid values override the scalar radii at each sweep point"}


def execute(cfg, argv=None):
    """Run a study and write its CSV and manifest; returns the output paths."""
    start = time.perf_counter()
    rows = run_study(cfg)
    text = csv_text(rows)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{cfg['study']}.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    manifest = {
        "study": cfg["study"],
        "seed": cfg["seed"],
        "workers": cfg["workers"],
        "software": {"package": "guardzones", "version": __version__,
                     "numpy": np.__version__, "python": platform.python_version()},
        "runtime_seconds": time.perf_counter() - start,
        "command": list(argv) if argv is not None else None,
        "config": cfgmod.dump(cfg),
        "distance_forms": _geometry_forms(cfg),
        "outputs": {"csv": csv_path.name,
                    "csv_sha256": hashlib.sha256(text.encode()).hexdigest(),
                    "rows": len(rows)},
    }
    manifest_path = out / f"{cfg['study']}.manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return csv_path, manifest_path


def _overrides(args):
    over = {}
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(item, "--set expects key=value")
        key, value = item.split("=", 1)
        over[key.strip()] = value.strip()
    for key in ("seed", "workers", "out", "study"):
        value = getattr(args, key)
        if value is not None:
            over[key] = str(value)
    return over


def _parser():
    ap = argparse.ArgumentParser(prog="guardzones", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("run", "validate"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value config file or run manifest (.json)")
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--out")
        p.add_argument("--study", choices=cfgmod.STUDIES)
        p.add_argument("--set", action="append", metavar="KEY=VALUE")
    return ap


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        raw = cfgmod.load_raw(args.config) if args.config else {}
        cfg = cfgmod.build(raw, _overrides(args))
        validate(cfg)
    except (ConfigError, OSError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.command == "validate":
        print("valid")
        return 0
    try:
        csv_path, manifest_path = execute(cfg, argv)
    except RunError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {csv_path} and {manifest_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
