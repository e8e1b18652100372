"""Command-line front end: figure datasets and single-shot scheme runs.

    carburettor figure prob --out prob.csv
    carburettor figure eta_curves --eta 0.9,0.5 --out eta.json --format json
    carburettor run --alpha 2 --r-sq opt --eta 1
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .fock import fidelity, make_coherent, photon_distribution
from .operators import bare_raise, std_raise
from .optimize import optimize_single_bs
from .schemes import (
    characterization_curve,
    do_nothing_fidelity,
    failed_branch,
    optimal_R,
    run_cascade,
    run_single_bs,
)

FIXED_R_INEFFICIENT = 0.869


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# figure datasets
# ---------------------------------------------------------------------------

Table = tuple[list[str], list[list[Any]]]


def _alpha_grid(p: dict) -> np.ndarray:
    n = int(round(p["alpha_max"] / p["alpha_step"]))
    return np.round(np.arange(n + 1) * p["alpha_step"], 12)


def _fig_pncompare(p: dict) -> Table:
    size = int(p["n_max"]) + 1
    coh = make_coherent(p["alpha"])
    dists = []
    for s in (coh, std_raise(coh).normalized(), bare_raise(coh)):
        d = photon_distribution(s)[:size]
        dists.append(np.pad(d, (0, size - d.size)))
    rows = [[n, *(d[n] for d in dists)] for n in range(size)]
    return ["n", "coherent", "std_raise", "bare_raise"], rows


def _fig_prob(p: dict) -> Table:
    rows = []
    for a in _alpha_grid(p):
        R = optimal_R(a * a)
        rows.append([a, R, run_single_bs(a, R).p_success])
    return ["alpha", "r_opt_sq", "p_success"], rows


def _fig_fid(p: dict) -> Table:
    rows = []
    for a in _alpha_grid(p):
        R, out = optimize_single_bs(a, 1.0, "fidelity")
        coh = make_coherent(a)
        f_std = fidelity(std_raise(coh), bare_raise(coh))
        rows.append([a, out.fidelity_vs_bare, f_std, R])
    return ["alpha", "fid_bare_impl", "fid_std_raise", "r_opt_sq"], rows


def _fig_eta_curves(p: dict) -> Table:
    rows = []
    for eta in p["eta"]:
        for a in _alpha_grid(p):
            rows.append([a, p["r_sq"], eta, run_single_bs(a, p["r_sq"], eta).p_success])
    return ["alpha", "r_sq", "eta", "p_success"], rows


def _fig_basefid(p: dict) -> Table:
    rows = []
    for eta in p["eta"]:
        for a in _alpha_grid(p):
            out = run_single_bs(a, p["r_sq"], eta)
            rows.append([a, p["r_sq"], eta, do_nothing_fidelity(a), out.fidelity_vs_bare])
    return ["alpha", "r_sq", "eta", "fid_do_nothing", "fid_scheme"], rows


def _fig_cascade_scatter(p: dict) -> Table:
    grid = np.linspace(0.01, 0.99, int(p["grid"]))
    rows = []
    for a in p["alpha"]:
        for R1 in grid:
            for R2 in grid:
                c = run_cascade(a, R1, R2, p["eta"])
                rows.append([a, R1, R2, c.p_total, c.F_mean])
    return ["alpha", "r1_sq", "r2_sq", "p_total", "f_mean"], rows


def _fig_characbs(p: dict) -> Table:
    rows = []
    for R in p["r_sq"]:
        for pt in characterization_curve(R, _alpha_grid(p), p["eta"]):
            rows.append([pt.R, pt.alpha, pt.p_zero_counts])
    return ["r_sq", "alpha", "p_zero_counts"], rows


def _fig_pnfail(p: dict) -> Table:
    a = p["alpha"]
    R = optimal_R(a * a) if p["r_sq"] is None else p["r_sq"]
    herald = failed_branch(a, R)
    if not herald.heralded:
        raise UsageError(f"one count is impossible at alpha={a}, r_sq={R}")
    dist = photon_distribution(herald.state)
    return ["n", "probability"], [[n, x] for n, x in enumerate(dist)]


@dataclass(frozen=True)
class Figure:
    compute: Callable[[dict], Table]
    defaults: dict


FIGURES: dict[str, Figure] = {
    "pncompare": Figure(_fig_pncompare, {"alpha": 1.0, "n_max": 8}),
    "prob": Figure(_fig_prob, {"alpha_max": 10.0, "alpha_step": 0.1}),
    "fid": Figure(_fig_fid, {"alpha_max": 7.0, "alpha_step": 0.1}),
    "eta_curves": Figure(
        _fig_eta_curves,
        {"r_sq": FIXED_R_INEFFICIENT, "eta": [1.0, 0.8, 0.6, 0.4], "alpha_max": 4.0, "alpha_step": 0.05},
    ),
    "basefid": Figure(
        _fig_basefid,
        {"r_sq": FIXED_R_INEFFICIENT, "eta": [0.8, 0.6, 0.4], "alpha_max": 2.0, "alpha_step": 0.05},
    ),
    "cascade_scatter": Figure(
        _fig_cascade_scatter, {"alpha": [1.0, math.sqrt(2.0), 2.0, 3.0], "grid": 50, "eta": 1.0}
    ),
    "characbs": Figure(
        _fig_characbs,
        {"r_sq": [0.9, 0.95, 0.99, 0.999], "alpha_max": 40.0, "alpha_step": 0.01, "eta": 1.0},
    ),
    "pnfail": Figure(_fig_pnfail, {"alpha": 2.0, "r_sq": None}),
}


@dataclass
class FigureRequest:
    figure: str
    out_path: Path
    params: dict[str, str] = field(default_factory=dict)
    format: str = "csv"


def _coerce(key: str, raw: str, default: Any) -> Any:
    try:
        if isinstance(default, list):
            values = [float(v) for v in raw.split(",") if v.strip()]
            if not values:
                raise ValueError
            return values
        if isinstance(default, int) and not isinstance(default, bool):
            return int(raw)
        return float(raw)
    except ValueError:
        raise UsageError(f"bad value for {key}: {raw!r}") from None


def resolve_params(req: FigureRequest) -> dict:
    """Merge overrides into the figure defaults, rejecting unknown keys."""
    if req.figure not in FIGURES:
        raise UsageError(f"unknown figure {req.figure!r}; choose from {', '.join(FIGURES)}")
    if req.format not in ("csv", "json"):
        raise UsageError(f"unknown format {req.format!r}")
    defaults = FIGURES[req.figure].defaults
    unknown = sorted(set(req.params) - set(defaults))
    if unknown:
        raise UsageError(f"figure {req.figure} does not take: {', '.join(unknown)}")
    params = dict(defaults)
    for key, raw in req.params.items():
        params[key] = _coerce(key, raw, defaults[key])
    for key in ("alpha_max", "alpha_step"):
        if key in params and not params[key] > 0:
            raise UsageError(f"{key} must be positive")
    if "grid" in params and params["grid"] < 2:
        raise UsageError("grid must be at least 2")
    for key in ("eta", "r_sq"):
        vals = params.get(key)
        vals = vals if isinstance(vals, list) else [vals]
        if any(v is not None and not 0.0 <= v <= 1.0 for v in vals):
            raise UsageError(f"{key} must lie in [0, 1]")
    return params


def _fmt(x: Any) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def render(columns: list[str], rows: list[list[Any]], fmt: str, meta: dict) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows([_fmt(v) for v in row] for row in rows)
        return buf.getvalue()
    doc = {
        **meta,
        "columns": columns,
        "rows": [[int(v) if isinstance(v, (int, np.integer)) else float(v) for v in row] for row in rows],
    }
    return json.dumps(doc, indent=1) + "\n"


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_figure(req: FigureRequest) -> int:
    params = resolve_params(req)
    parent = Path(req.out_path).parent
    if not parent.is_dir():
        raise UsageError(f"output directory does not exist: {parent}")
    columns, rows = FIGURES[req.figure].compute(params)
    meta = {"figure": req.figure, "params": params}
    atomic_write(req.out_path, render(columns, rows, req.format, meta))
    return 0


# ---------------------------------------------------------------------------
# single-shot runs
# ---------------------------------------------------------------------------


def _trimmed(dist: np.ndarray) -> list[float]:
    nz = np.flatnonzero(dist > 1e-16)
    return [float(x) for x in dist[: nz[-1] + 1]] if nz.size else []


def cmd_run(alpha: float, r_sq: float | str, eta: float, stages: int = 1, r2_sq: float | None = None) -> dict:
    """Evaluate one configuration and return a JSON-ready record."""
    if not 0.0 <= eta <= 1.0:
        raise UsageError("eta must lie in [0, 1]")
    if stages not in (1, 2):
        raise UsageError("stages must be 1 or 2")
    if stages == 2 and r2_sq is None:
        raise UsageError("--r2-sq is required with --stages 2")
    if r_sq == "opt":
        R, _ = optimize_single_bs(alpha, eta, "probability")
    else:
        R = float(r_sq)
    for name, v in (("r_sq", R), ("r2_sq", r2_sq)):
        if v is not None and not 0.0 <= v <= 1.0:
            raise UsageError(f"{name} must lie in [0, 1]")

    if stages == 1:
        out = run_single_bs(alpha, R, eta)
        record = {
            "alpha": alpha,
            "r_sq": R,
            "eta": eta,
            "p_success": out.p_success,
            "fidelity_vs_bare": out.fidelity_vs_bare,
        }
        ens = out.output
    else:
        c = run_cascade(alpha, R, r2_sq, eta)
        record = {
            "alpha": alpha,
            "r_sq": R,
            "r2_sq": r2_sq,
            "eta": eta,
            "p1_0": c.P1_0,
            "f1": c.F1,
            "p1_1": c.P1_1,
            "p2_0": c.P2_0,
            "f2": c.F2,
            "f_mean": c.F_mean,
            "p_total": c.p_total,
        }
        ens = c.output
    record["photon_distribution"] = [] if ens is None else _trimmed(ens.photon_distribution())
    return record


def _r_sq_arg(raw: str) -> float | str:
    if raw == "opt":
        return raw
    try:
        return float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'opt', got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="carburettor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("figure", help="write a figure dataset")
    fig.add_argument("name", help=f"one of: {', '.join(FIGURES)}")
    fig.add_argument("--out", required=True, type=Path)
    fig.add_argument("--format", default="csv", choices=["csv", "json"])
    fig.add_argument("--alpha-max", dest="alpha_max")
    fig.add_argument("--alpha-step", dest="alpha_step")
    fig.add_argument("--alpha")
    fig.add_argument("--eta")
    fig.add_argument("--r-sq", dest="r_sq")
    fig.add_argument("--grid")
    fig.add_argument("--n-max", dest="n_max")
    fig.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE", help="any other figure parameter"
    )

    run = sub.add_parser("run", help="evaluate one scheme configuration, print JSON")
    run.add_argument("--alpha", type=float, required=True)
    run.add_argument("--r-sq", dest="r_sq", type=_r_sq_arg, required=True)
    run.add_argument("--eta", type=float, default=1.0)
    run.add_argument("--stages", type=int, choices=[1, 2], default=1)
    run.add_argument("--r2-sq", dest="r2_sq", type=float)
    return parser


FLAG_KEYS = ("alpha_max", "alpha_step", "alpha", "eta", "r_sq", "grid", "n_max")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "figure":
            params = {k: getattr(args, k) for k in FLAG_KEYS if getattr(args, k) is not None}
            for item in args.set:
                key, sep, value = item.partition("=")
                if not sep:
                    raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
                params[key.strip().replace("-", "_")] = value
            return cmd_figure(FigureRequest(args.name, args.out, params, args.format))
        record = cmd_run(args.alpha, args.r_sq, args.eta, args.stages, args.r2_sq)
        print(json.dumps(record))
        return 0
    except (UsageError, ValueError, OSError) as exc:
        print(f"carburettor: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
