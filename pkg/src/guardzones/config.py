"""Flat ``key = value`` experiment configuration.

Lines are ``key = value``; ``#`` starts a comment.  Numbers may be written
as fractions (``1/12``).  Grids are comma-separated lists.  dB quantities
(``beta_db``, ``gamma_db``, ``sigma_s_db``) stay in dB here and are
converted when the run objects are built.

With ``distance_units = tx_distance`` the keys ``r_net``, ``r_ex``, ``r_g``
and their grids are multiples of ``tx_distance``; otherwise they are in
absolute units.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

STUDIES = ("table1", "outage_vs_rg", "tc_vs_rg", "latency_vs_rg", "tc_vs_M",
           "tc_vs_tx_distance", "min_rg_curve", "min_ge_curve", "single_network")


class ConfigError(ValueError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


def _num(text):
    text = str(text).strip()
    if text.lower() in ("inf", "+inf", "infinity"):
        return float("inf")
    return float(Fraction(text)) if "/" in text else float(text)


def _int(text):
    value = _num(text)
    if value != int(value):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _choice(*options):
    def parse(text):
        t = str(text).strip()
        if t not in options:
            raise ValueError(f"expected one of {options}, got {t!r}")
        return t
    return parse


def _grid(item):
    def parse(text):
        if isinstance(text, (list, tuple)):
            parts = list(text)
        else:
            parts = [p for p in str(text).split(",") if p.strip()]
        return [item(p) for p in parts]
    return parse


def _m0(text):
    value = _num(text)
    if value != int(value) or value < 1:
        raise ValueError(f"m0 must be a positive integer, got {text!r}")
    return int(value)


SCALARS = {
    "study": _choice(*STUDIES),
    "seed": _int,
    "workers": _int,
    "out": str,
    "num_networks": _int,
    "distance_units": _choice("r_net", "tx_distance"),
    "r_net": _num,
    "tx_distance": _num,
    "r_ex": _num,
    "r_g": _num,
    "M": _int,
    "receiver": _choice("center", "perimeter"),
    "alpha": _num,
    "sigma_s_db": _num,
    "d0": _num,
    "spreading": _choice("fixed", "random_chip"),
    "G_e": _num,
    "G": _num,
    "power_ratio": _num,
    "p": _num,
    "m": _num,
    "m0": _m0,
    "beta_db": _num,
    "gamma_db": _num,
    "thinning": _bool,
    "n_arq": _int,
    "Ts": _num,
    "b": _num,
    "latency_formula": _choice("printed", "renewal"),
    "tc_estimator": _choice("ensemble", "per_realization"),
    "target_eps": _num,
    "target_tc": _num,
}

GRIDS = {
    "r_g_grid": _grid(_num),
    "r_ex_grid": _grid(_num),
    "G_e_grid": _grid(_num),
    "alpha_grid": _grid(_num),
    "M_grid": _grid(_int),
    "tx_distance_grid": _grid(_num),
    "gamma_db_grid": _grid(_num),
    "receiver_grid": _grid(_choice("center", "perimeter")),
}

BASE_DEFAULTS = {
    "workers": 1,
    "out": "results",
    "num_networks": 10_000,
    "distance_units": "r_net",
    "r_net": 1.0,
    "tx_distance": 1 / 6,
    "r_ex": 1 / 12,
    "r_g": 1 / 12,
    "M": 30,
    "receiver": "center",
    "alpha": 3.5,
    "sigma_s_db": 8.0,
    "d0": 0.0,
    "spreading": "fixed",
    "G_e": 1.0,
    "G": 32.0,
    "power_ratio": 1.0,
    "p": 0.5,
    "m": 1.0,
    "m0": 3,
    "beta_db": 0.0,
    "gamma_db": 10.0,
    "thinning": True,
    "n_arq": 6,
    "Ts": 1.0,
    "b": 1.0,
    "latency_formula": "printed",
    "tc_estimator": "ensemble",
    "target_eps": 0.1,
    "target_tc": 15.0,
}

_RG_SWEEP = {
    "distance_units": "tx_distance",
    "r_net": 6.0,
    "r_ex_grid": [0.25, 0.5, 0.75],
    "r_g_grid": [0.5 + 0.25 * k for k in range(11)],
    "G_e_grid": [1.0, 48.0],
}

STUDY_DEFAULTS = {
    "table1": {
        "distance_units": "tx_distance",
        "r_net": 6.0,
        "G_e_grid": [1.0, 48.0],
        "alpha_grid": [3.0, 4.0],
        "r_ex_grid": [0.0, 0.5],
        "r_g_grid": [0.5, 1.5],
        "receiver_grid": ["center", "perimeter"],
    },
    "outage_vs_rg": _RG_SWEEP,
    "tc_vs_rg": _RG_SWEEP,
    "latency_vs_rg": _RG_SWEEP,
    "tc_vs_M": {
        "distance_units": "tx_distance",
        "r_net": 6.0,
        "r_ex": 0.5,
        "r_g_grid": [0.5, 1.5],
        "G_e_grid": [1.0, 48.0],
        "M_grid": list(range(2, 61, 2)),
    },
    "tc_vs_tx_distance": {
        "r_ex": 1 / 12,
        "r_g_grid": [1 / 12, 1 / 4],
        "G_e_grid": [1.0, 48.0],
        "tx_distance_grid": [0.1 + 0.05 * k for k in range(9)],
    },
    "min_rg_curve": {
        "r_ex": 1 / 12,
        "tx_distance_grid": [1 / 6, 1 / 4, 1 / 3, 1 / 2],
        "M_grid": [30, 60],
        "G_e_grid": [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0],
    },
    "min_ge_curve": {
        "r_ex": 1 / 12,
        "tx_distance_grid": [1 / 6, 1 / 4, 1 / 3, 1 / 2],
        "M_grid": [30, 60],
        "r_g_grid": [1 / 12, 1 / 8, 1 / 6, 1 / 4],
    },
    "single_network": {
        "num_networks": 1,
        "sigma_s_db": 0.0,
        "r_g_grid": [1 / 12, 1 / 4],
        "G_e_grid": [1.0, 48.0],
        "gamma_db_grid": [5.0 * k for k in range(11)],
    },
}

# grids each study sweeps over
STUDY_GRIDS = {
    "table1": ("G_e_grid", "alpha_grid", "r_ex_grid", "r_g_grid", "receiver_grid"),
    "outage_vs_rg": ("r_ex_grid", "G_e_grid", "r_g_grid"),
    "tc_vs_rg": ("r_ex_grid", "G_e_grid", "r_g_grid"),
    "latency_vs_rg": ("r_ex_grid", "G_e_grid", "r_g_grid"),
    "tc_vs_M": ("M_grid", "G_e_grid", "r_g_grid"),
    "tc_vs_tx_distance": ("tx_distance_grid", "G_e_grid", "r_g_grid"),
    "min_rg_curve": ("tx_distance_grid", "M_grid", "G_e_grid"),
    "min_ge_curve": ("tx_distance_grid", "M_grid", "r_g_grid"),
    "single_network": ("G_e_grid", "r_g_grid", "gamma_db_grid"),
}


def parse_text(text):
    """Parse ``key = value`` lines into a raw string dict."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        raw[key] = value
    return raw


def load_raw(path):
    """Read a config file, or the ``config`` block of a JSON run manifest."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return dict(json.loads(text)["config"])
    return parse_text(text)


def build(raw, overrides=None):
    """Merge defaults, file values and overrides into a typed config dict.

    Raises :class:`ConfigError` naming the offending key.
    """
    merged = dict(raw)
    merged.update(overrides or {})
    if "study" not in merged:
        raise ConfigError("study", "missing (one of " + ", ".join(STUDIES) + ")")
    study = _parse("study", merged["study"])
    cfg = dict(BASE_DEFAULTS)
    cfg.update(STUDY_DEFAULTS[study])
    for key, value in merged.items():
        cfg[key] = _parse(key, value)
    if "seed" not in merged:
        raise ConfigError("seed", "missing; a master seed is mandatory")
    check(cfg)
    return cfg


def _parse(key, value):
    parser = SCALARS.get(key) or GRIDS.get(key)
    if parser is None:
        raise ConfigError(key, "unknown key")
    if parser is str:
        return str(value)
    try:
        return parser(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(key, str(exc)) from None


def dump(cfg):
    """Canonical string form of a typed config; :func:`build` reads it back exactly."""
    out = {}
    for key, value in cfg.items():
        if isinstance(value, list):
            out[key] = ", ".join(_fmt(v) for v in value)
        else:
            out[key] = _fmt(value)
    return out


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def check(cfg):
    """Dry-run validation of a typed config; raises :class:`ConfigError`."""
    for key in STUDY_GRIDS[cfg["study"]]:
        grid = cfg.get(key)
        if not grid:
            raise ConfigError(key, "sweep grid is empty")
        if key != "receiver_grid" and list(grid) != sorted(grid):
            raise ConfigError(key, "grid must be sorted ascending")
    if cfg["seed"] < 0:
        raise ConfigError("seed", "must be nonnegative")
    if cfg["workers"] < 1:
        raise ConfigError("workers", "must be >= 1")
    if cfg["num_networks"] < 1:
        raise ConfigError("num_networks", "must be >= 1")
    if cfg["alpha"] < 2 or any(a < 2 for a in cfg.get("alpha_grid", [])):
        raise ConfigError("alpha", "path-loss exponent must be >= 2")
    if not 0 <= cfg["p"] <= 1:
        raise ConfigError("p", "duty factor must lie in [0, 1]")
    if cfg["m"] <= 0:
        raise ConfigError("m", "must be positive")
    if cfg["sigma_s_db"] < 0:
        raise ConfigError("sigma_s_db", "must be nonnegative")
    if cfg["n_arq"] < 1:
        raise ConfigError("n_arq", "must be >= 1")
    if not 0 < cfg["target_eps"] <= 1:
        raise ConfigError("target_eps", "must lie in (0, 1]")
    study = cfg["study"]
    grids = STUDY_GRIDS[study]
    r_ex_values = cfg["r_ex_grid"] if "r_ex_grid" in grids else [cfg["r_ex"]]
    r_g_values = cfg["r_g_grid"] if "r_g_grid" in grids else [cfg["r_g"]]
    if min(r_ex_values) < 0:
        raise ConfigError("r_ex", "must be nonnegative")
    for r_ex in r_ex_values:
        for r_g in r_g_values:
            if r_g < r_ex:
                key = "r_g_grid" if "r_g_grid" in grids else "r_g"
                raise ConfigError(key, f"r_g={r_g} is smaller than r_ex={r_ex}")
