"""Command-line interface emitting header-commented CSV or a single JSON document.

Every run echoes (tool version, effective config, seed) in its output
header, so an emitted artifact identifies the exact run that produced it and
rerunning the same command yields byte-identical output.

Exit codes: 0 success, 2 invalid configuration, 3 resource cap exceeded,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from typing import Optional

from . import __version__, combinatorics, experiments, landscape
from .errors import ResourceLimitError
from .landscape import (AlphaHoC, HoC, Percolation, RMF, eta_from_json,
                        generate, spec_to_json)
from .pathcount import count_accessible

_MODELS = ("hoc", "alpha-hoc", "rmf", "percolation")


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from None


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise ValueError(f"expected comma-separated numbers, got {text!r}") from None


def _parse_eta(text: str) -> landscape.EtaSpec:
    kind, _, rest = text.partition(":")
    params = _parse_float_list(rest) if rest else []
    if kind == "uniform" and len(params) == 2:
        return landscape.Uniform(params[0], params[1])
    if kind == "normal" and len(params) == 2:
        return landscape.Normal(params[0], params[1])
    if kind == "exponential" and len(params) == 1:
        return landscape.Exponential(params[0])
    raise ValueError(
        f"bad noise spec {text!r}; use uniform:LO,HI | normal:MEAN,SD | exponential:RATE")


def _build_spec(cfg: dict) -> landscape.ModelSpec:
    model = cfg.get("model")
    if model == "hoc":
        return HoC()
    if model == "alpha-hoc":
        if cfg.get("alpha") is None:
            raise ValueError("alpha-hoc requires --alpha")
        return AlphaHoC(cfg["alpha"])
    if model == "rmf":
        if cfg.get("theta") is None:
            raise ValueError("rmf requires --theta")
        eta = cfg.get("eta")
        return RMF(cfg["theta"], _parse_eta(eta) if isinstance(eta, str) else eta)
    if model == "percolation":
        if cfg.get("epsilon") is None:
            raise ValueError("percolation requires --epsilon")
        return Percolation(cfg["epsilon"])
    raise ValueError(f"--model must be one of {', '.join(_MODELS)}")


# Hard defaults applied after flags and any --json-config file.
_DEFAULTS = {
    "seed": 0,
    "replicates": 10_000,
    "confidence": 0.95,
    "format": "csv",
    "output": "-",
    "eta": "uniform:0,1",
    "n_max": 40,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="landscape-paths",
        description="Accessible paths in hypercube fitness landscapes: exact "
                    "counting, combinatorics, and Monte Carlo estimation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--output", default=None, metavar="PATH",
                       help="output file; '-' for stdout (default)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None,
                       help="worker hint; never changes results "
                            "(fallback: env LANDSCAPE_PATHS_THREADS)")
        p.add_argument("--json-config", default=None, metavar="FILE",
                       help="JSON object of option values; explicit flags win")

    def add_model(p):
        p.add_argument("--model", choices=_MODELS, default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--theta", type=float, default=None)
        p.add_argument("--eta", default=None,
                       help="uniform:LO,HI | normal:MEAN,SD | exponential:RATE")
        p.add_argument("--epsilon", type=float, default=None)

    p = sub.add_parser("count", help="generate one landscape and count accessible paths")
    add_common(p)
    add_model(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--dump", default=None, metavar="FILE",
                   help="also write the landscape dump")

    p = sub.add_parser("tnk", help="emit the permutation-component triangle T(n, k)")
    add_common(p)
    p.add_argument("--n-max", type=int, default=None)

    p = sub.add_parser("moments", help="Monte Carlo first and second moments of the count")
    add_common(p)
    add_model(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--confidence", type=float, default=None)

    p = sub.add_parser("estimate", help="Monte Carlo accessibility probability")
    add_common(p)
    add_model(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--confidence", type=float, default=None)

    p = sub.add_parser("sweep-alpha", help="coupled sweep of the bottom-node pin")
    add_common(p)
    p.add_argument("--n-list", default=None, help="comma-separated dimensions")
    p.add_argument("--alpha-list", default=None, help="comma-separated ascending pins")
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--confidence", type=float, default=None)

    p = sub.add_parser("choc-curve", help="constrained-model probability per dimension")
    add_common(p)
    p.add_argument("--n-list", default=None)
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--confidence", type=float, default=None)

    p = sub.add_parser("rmf-coupling", help="drift sweep on shared noise draws")
    add_common(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--theta-list", default=None, help="comma-separated ascending drifts")
    p.add_argument("--eta", default=None)
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--confidence", type=float, default=None)

    p = sub.add_parser("diagnostics", help="empirical bound constants for the triangle")
    add_common(p)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--s1-n-list", default=None,
                   help="also report the leading second-moment ratio on these n")
    p.add_argument("--s1-alpha", type=float, default=None)
    p.add_argument("--s1-delta", type=float, default=None)

    return parser


def _effective_config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "json_config"}
    if args.json_config is not None:
        with open(args.json_config, "r", encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        if not isinstance(file_cfg, dict):
            raise ValueError("--json-config must contain a JSON object")
        for key, val in file_cfg.items():
            dest = key.replace("-", "_")
            if dest not in cfg:
                raise ValueError(f"unknown config key {key!r}")
            if cfg[dest] is None:
                cfg[dest] = val
    for key, val in _DEFAULTS.items():
        if key in cfg and cfg[key] is None:
            cfg[key] = val
    if cfg.get("threads") is None:
        env = os.environ.get("LANDSCAPE_PATHS_THREADS")
        cfg["threads"] = int(env) if env else None
    return cfg


def _config_echo(cfg: dict) -> dict:
    echo = {}
    for key, val in sorted(cfg.items()):
        echo[key] = val
    return echo


def _format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _emit(cfg: dict, columns: list[str], rows: list[dict],
          extra: Optional[dict] = None) -> str:
    if cfg["format"] == "json":
        doc = {
            "tool": "landscape-paths",
            "version": __version__,
            "command": cfg["command"],
            "config": _config_echo(cfg),
            "columns": columns,
            "rows": rows,
        }
        if extra:
            doc["extra"] = extra
        return json.dumps(doc, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# tool=landscape-paths version={__version__}\n")
    buf.write("# config=" + json.dumps(_config_echo(cfg), sort_keys=True) + "\n")
    for key, val in sorted((extra or {}).items()):
        buf.write(f"# {key}={json.dumps(val, sort_keys=True)}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_format_cell(row.get(c)) for c in columns) + "\n")
    return buf.getvalue()


def _write(text: str, output: str) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _estimate_row(res: experiments.EstimateResult) -> dict:
    return {
        "estimate": res.estimate,
        "std_error": res.std_error,
        "ci_low": res.ci_low,
        "ci_high": res.ci_high,
    }


def _run_count(cfg: dict) -> tuple[list[str], list[dict], Optional[dict]]:
    spec = _build_spec(cfg)
    if cfg.get("n") is None:
        raise ValueError("count requires --n")
    land = generate(spec, cfg["n"], cfg["seed"])
    if cfg.get("dump"):
        with open(cfg["dump"], "w", encoding="utf-8") as fh:
            landscape.dump(land, fh)
    rows = [{"model": cfg["model"], "n": cfg["n"], "seed": cfg["seed"],
             "count": count_accessible(land)}]
    return ["model", "n", "seed", "count"], rows, None


def _run_tnk(cfg: dict) -> tuple[list[str], list[dict], Optional[dict]]:
    if cfg.get("n_max") is None or cfg["n_max"] < 1:
        raise ValueError("tnk requires --n-max >= 1")
    table = combinatorics.t_table(cfg["n_max"])
    rows = [{"n": n, "k": k, "t": v} for n, k, v in table.entries()]
    return ["n", "k", "t"], rows, None


def _theory_first_moment(cfg: dict, spec) -> Optional[float]:
    if isinstance(spec, AlphaHoC):
        return float(combinatorics.expected_paths(cfg["n"], spec.alpha))
    if isinstance(spec, HoC):
        return 1.0
    if isinstance(spec, Percolation):
        return float(combinatorics.percolation_expected(cfg["n"], spec.epsilon))
    return None


def _run_moments(cfg: dict) -> tuple[list[str], list[dict], Optional[dict]]:
    spec = _build_spec(cfg)
    if cfg.get("n") is None:
        raise ValueError("moments requires --n")
    first, second = experiments.estimate_moments(
        spec, cfg["n"], cfg["replicates"], cfg["seed"], cfg["confidence"])
    theory2 = None
    if isinstance(spec, AlphaHoC):
        theory2 = float(combinatorics.second_moment_bound(
            cfg["n"], spec.alpha, combinatorics.t_table(cfg["n"])))
    base = {"model": cfg["model"], "n": cfg["n"], "replicates": cfg["replicates"],
            "seed": cfg["seed"], "confidence": cfg["confidence"]}
    rows = [
        {**base, "moment": "x", **_estimate_row(first),
         "theory": _theory_first_moment(cfg, spec)},
        {**base, "moment": "x2", **_estimate_row(second), "theory": theory2},
    ]
    columns = ["model", "n", "replicates", "seed", "confidence", "moment",
               "estimate", "std_error", "ci_low", "ci_high", "theory"]
    return columns, rows, None


def _run_estimate(cfg: dict) -> tuple[list[str], list[dict], Optional[dict]]:
    spec = _build_spec(cfg)
    if cfg.get("n") is None:
        raise ValueError("estimate requires --n")
    res = experiments.estimate_p(spec, cfg["n"], cfg["replicates"], cfg["seed"],
                                 cfg["confidence"])
    rows = [{"model": cfg["model"], "n": cfg["n"], "replicates": cfg["replicates"],
             "seed": cfg["seed"], "confidence": cfg["confidence"],
             **_estimate_row(res)}]
    columns = ["model", "n", "replicates", "seed", "confidence",
               "estimate", "std_error", "ci_low", "ci_high"]
    return columns, rows, None


def _sweep_columns() -> list[str]:
    return ["n", "parameter", "estimate", "std_error", "ci_low", "ci_high",
            "confidence", "replicates", "seed"]


def _sweep_row_dict(row: experiments.SweepRow) -> dict:
    return {"n": row.n, "parameter": row.parameter, "estimate": row.estimate,
            "std_error": row.std_error, "ci_low": row.ci_low,
            "ci_high": row.ci_high, "confidence": row.confidence,
            "replicates": row.replicates, "seed": row.seed}


def _run_sweep_alpha(cfg: dict) -> tuple[list[str], list[dict], Optional[dict]]:
    if not cfg.get("n_list") or not cfg.get("alpha_list"):
        raise ValueError("sweep-alpha requires --n-list and --alpha-list")
    result = experiments.sweep_alpha(
        _parse_int_list(cfg["n_list"]), _parse_float_list(cfg["alpha_list"]),
        cfg["replicates"], cfg["seed"], cfg["confidence"])
    rows = [_sweep_row_dict(r) for r in result.rows]
    crossings = {str(n): a for n, a in sorted(result.half_crossings.items())}
    return _sweep_columns(), rows, {"half_crossings": crossings}


def _run_choc_curve(cfg: dict) -> tuple[list[str], list[dict], Optional[dict]]:
    if not cfg.get("n_list"):
        raise ValueError("choc-curve requires --n-list")
    rows = experiments.choc_curve(_parse_int_list(cfg["n_list"]),
                                  cfg["replicates"], cfg["seed"], cfg["confidence"])
    return _sweep_columns(), [_sweep_row_dict(r) for r in rows], None


def _run_rmf_coupling(cfg: dict) -> tuple[list[str], list[dict], Optional[dict]]:
    if cfg.get("n") is None or not cfg.get("theta_list"):
        raise ValueError("rmf-coupling requires --n and --theta-list")
    eta = _parse_eta(cfg["eta"]) if isinstance(cfg["eta"], str) else cfg["eta"]
    result = experiments.rmf_theta_coupling(
        cfg["n"], _parse_float_list(cfg["theta_list"]), eta,
        cfg["replicates"], cfg["seed"], cfg["confidence"])
    rows = []
    for r in result.rows:
        d = _sweep_row_dict(r)
        d["mean_x"] = r.mean_x
        d["mean_x_se"] = r.mean_x_se
        rows.append(d)
    columns = _sweep_columns() + ["mean_x", "mean_x_se"]
    return columns, rows, {"monotonicity_violations": result.monotonicity_violations}


def _run_diagnostics(cfg: dict) -> tuple[list[str], list[dict], Optional[dict]]:
    diag = combinatorics.bound_diagnostics(cfg["n_max"])
    rows = [
        {"name": "few_components_c", "n": None, "value": diag.few_components_c},
        {"name": "many_components_c", "n": None, "value": diag.many_components_c},
        {"name": "near_top_ratio", "n": None, "value": diag.near_top_ratio},
        {"name": "single_component_deficit", "n": None,
         "value": diag.single_component_deficit},
    ]
    if cfg.get("s1_n_list"):
        alpha = cfg.get("s1_alpha")
        delta = cfg.get("s1_delta")
        if alpha is None or delta is None:
            raise ValueError("--s1-n-list requires --s1-alpha and --s1-delta")
        ns = _parse_int_list(cfg["s1_n_list"])
        table = combinatorics.t_table(max(ns))
        for n in sorted(ns):
            s1, _ = combinatorics.s1_s2_split(n, alpha, delta, table)
            target = 4 * n * n * (1.0 - alpha) ** (2 * n)
            rows.append({"name": "s1_over_target", "n": n,
                         "value": float(s1) / target})
    return ["name", "n", "value"], rows, None


_RUNNERS = {
    "count": _run_count,
    "tnk": _run_tnk,
    "moments": _run_moments,
    "estimate": _run_estimate,
    "sweep-alpha": _run_sweep_alpha,
    "choc-curve": _run_choc_curve,
    "rmf-coupling": _run_rmf_coupling,
    "diagnostics": _run_diagnostics,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _effective_config(args)
        if isinstance(cfg.get("eta"), str):
            # validate early so bad noise specs are a config error
            _parse_eta(cfg["eta"])
        columns, rows, extra = _RUNNERS[cfg["command"]](cfg)
        _write(_emit(cfg, columns, rows, extra), cfg["output"])
        return 0
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"landscape-paths: error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"landscape-paths: resource limit: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # invariant violation
        print(f"landscape-paths: internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
