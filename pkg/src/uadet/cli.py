"""Command line interface.

Subcommands run sweeps from config files, evaluate the closed-form
budgets, merge result files, and start the HTTP service. Every command
that computes something accepts --server URL to delegate the computation
to a running service instead of doing it in-process; file handling stays
local either way, so the output contract is identical.

Exit codes: 0 success, 2 configuration problem, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .asymptotics import biawgn_capacity, csa_required_slots, csa_required_symbols, density_evolution_threshold, noisy_csa_required_symbols
from .cs import empirical_m_estimate, required_m_bound
from .csa import DEFAULT_DISTRIBUTION, DegreeDistribution, IdCodec
from .errors import ConfigError, RuntimeFailure, UadetError
from .experiments import ExperimentSpec, ResultRow, load_config
from .output import compare_rows, compare_to_csv, read_rows_csv, rows_to_csv, rows_to_jsonl, write_rows
from .runner import run as run_sweep

_DIST_HELP = 'degree distribution as "deg:prob,deg:prob,..."'


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _post(server: str, path: str, payload: dict) -> dict:
    import httpx

    try:
        r = httpx.post(server.rstrip("/") + path, json=payload, timeout=None)
    except httpx.HTTPError as e:
        raise RuntimeFailure(f"cannot reach server {server}: {e}") from None
    if r.status_code != 200:
        raise RuntimeFailure(f"server returned {r.status_code}: {r.text}")
    return r.json()


def _cmd_run(args, framework: str) -> int:
    spec = load_config(args.config)
    if spec.framework != framework:
        raise ConfigError(
            f"{args.config}: config is for framework {spec.framework!r}, "
            f"this subcommand runs {framework!r}")
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if overrides:
        spec = spec.model_copy(update=overrides)

    if args.server:
        data = _post(args.server, "/run", {"spec": spec.model_dump(), "threads": args.threads})
        rows = [ResultRow.model_validate(r) for r in data["rows"]]
    else:
        rows = run_sweep(spec, threads=args.threads)

    if args.out is None:
        _emit(rows_to_csv(rows) if args.format == "csv" else rows_to_jsonl(rows), None)
    else:
        write_rows(rows, args.out, args.format)
    return 0


def _cmd_threshold(args) -> int:
    if args.server:
        data = _post(args.server, "/threshold",
                     {"degree_distribution": _dist_payload(args.dist), "tol": args.tol})
        g_star, mean = data["g_star"], data["mean_degree"]
    else:
        dist = DegreeDistribution.from_string(args.dist) if args.dist else DEFAULT_DISTRIBUTION
        g_star = density_evolution_threshold(dist, tol=args.tol).g_star
        mean = dist.mean
    print(f"g_star = {g_star:.6f}")
    print(f"mean_degree = {mean:.6f}")
    return 0


def _dist_payload(text: str | None) -> dict | None:
    if text is None:
        return None
    return {d: p for d, p in DegreeDistribution.from_string(text).terms}


def _cmd_bounds(args) -> int:
    if args.server:
        payload = {"N": args.N, "k": args.k, "delta": args.delta,
                   "constant_c": args.constant_c,
                   "degree_distribution": _dist_payload(args.dist),
                   "sigma": args.sigma}
        data = _post(args.server, "/bounds", payload)
    else:
        dist = DegreeDistribution.from_string(args.dist) if args.dist else DEFAULT_DISTRIBUTION
        g_star = density_evolution_threshold(dist).g_star
        id_bits = IdCodec(args.N).id_bits
        data = {
            "id_bits": id_bits,
            "g_star": g_star,
            "cs_m_sufficient": required_m_bound(args.N, args.k, args.delta, args.constant_c),
            "cs_m_empirical": empirical_m_estimate(args.N, args.k),
            "csa_slots": csa_required_slots(args.k, g_star),
            "csa_symbols": csa_required_symbols(args.k, g_star, id_bits),
        }
        if args.sigma is not None:
            coded = IdCodec(args.N, coded=True)
            data["capacity"] = biawgn_capacity(args.sigma)
            data["csa_symbols_noisy"] = noisy_csa_required_symbols(
                args.k, g_star, coded.slot_symbols, args.sigma)
    for key in ("id_bits", "g_star", "cs_m_sufficient", "cs_m_empirical",
                "csa_slots", "csa_symbols", "capacity", "csa_symbols_noisy"):
        if key in data and data[key] is not None:
            val = data[key]
            print(f"{key} = {val:.6f}" if isinstance(val, float) else f"{key} = {val}")
    return 0


def _cmd_compare(args) -> int:
    cs_rows = read_rows_csv(args.cs)
    csa_rows = read_rows_csv(args.csa)
    if args.server:
        data = _post(args.server, "/compare", {
            "cs_rows": [r.model_dump() for r in cs_rows],
            "csa_rows": [r.model_dump() for r in csa_rows]})
        table = data["rows"]
    else:
        table = compare_rows(cs_rows, csa_rows)
    _emit(compare_to_csv(table), args.out)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _add_run_parser(sub, name: str, framework: str, help_text: str):
    p = sub.add_parser(name, help=help_text)
    p.add_argument("--config", required=True, help="experiment config (JSON)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--trials", type=int, default=None, help="override the trial count")
    p.add_argument("--threads", type=int, default=1, help="worker threads (results identical)")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--server", default=None, help="delegate to a running service at URL")
    p.set_defaults(func=lambda a: _cmd_run(a, framework))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="uadet",
        description="Simulate and compare sparse-recovery and slotted-replica user activity detection.")
    sub = ap.add_subparsers(dest="command", required=True)

    _add_run_parser(sub, "run-cs", "cs", "sweep the unslotted detector over frame lengths")
    _add_run_parser(sub, "run-csa", "csa", "sweep the slotted detector over slot counts")

    p = sub.add_parser("threshold", help="peeling threshold of a degree distribution")
    p.add_argument("--dist", default=None, help=_DIST_HELP)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--server", default=None)
    p.set_defaults(func=_cmd_threshold)

    p = sub.add_parser("bounds", help="closed-form symbol budgets for both frameworks")
    p.add_argument("--N", type=int, required=True, help="user population")
    p.add_argument("--k", type=int, required=True, help="active users")
    p.add_argument("--delta", type=float, default=0.01, help="recovery failure budget")
    p.add_argument("--constant-c", type=float, default=4.0, dest="constant_c")
    p.add_argument("--dist", default=None, help=_DIST_HELP)
    p.add_argument("--sigma", type=float, default=None, help="also report noisy budgets at this noise level")
    p.add_argument("--server", default=None)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("compare", help="join cs and csa result files on frame symbols")
    p.add_argument("--cs", required=True, help="csv produced by run-cs")
    p.add_argument("--csa", required=True, help="csv produced by run-csa")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--server", default=None)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except UadetError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except Exception as e:  # unexpected failure inside a valid run
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
