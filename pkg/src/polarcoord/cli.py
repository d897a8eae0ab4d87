"""Command-line front end.

Every report is JSON with sorted keys, embeds the resolved configuration and
the package version, and depends only on the configuration (seed included).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from . import oracle
from .channels import ChannelSpec, load_channel, parse_preset
from .construction import ConstructionParams, build_code, synthesize_for
from .coordination import RandomnessLedger, single_letter_target, tally_sessions
from .errors import CapExceeded, ConfigError, InvariantViolation
from .oracle import DistTable
from .polar import PolarParams
from .regions import (example1_channels, polar_region_example1, polar_region_example2,
                      polar_region_general, reference_discrepancy, reference_region_example1)
from .resolvability import (build_resolvability_code, per_symbol_tv, resolvability_bound,
                            resolve_encode_batch, sequence_counts)
from .seeding import role_stream, session_streams
from .synthesis import QuantizationBudget

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_CAP = 0, 2, 3, 4


def channel_arg(text: str) -> ChannelSpec:
    """Preset string, or a path to a JSON channel document."""
    if text.endswith(".json") or os.path.isfile(text):
        return load_channel(text)
    return parse_preset(text)


def _budget(args):
    if args.exact:
        return None
    return QuantizationBudget(args.mu, upgrade=not args.no_upgrade)


def _construction(args):
    return ConstructionParams(beta=args.beta, mode=args.mode)


def _empirical_tv(counts: np.ndarray, table: DistTable) -> float:
    return float(np.abs(counts / counts.sum() - table.array().ravel()).sum())


def cmd_construct(args) -> dict:
    wx, wy = channel_arg(args.wx), channel_arg(args.wy)
    code = build_code(PolarParams(args.m), wx, wy, _construction(args), _budget(args), args.exact)
    return {"code": code.to_dict()}


def cmd_resolve(args) -> dict:
    ch = channel_arg(args.spec or args.channel)
    code, profile = build_resolvability_code(ch, args.m, args.beta, _budget(args), args.exact)
    kl_bound, tv_bound = resolvability_bound(profile, code.good)
    report = {"rate": code.rate, "good": list(code.good), "kl_bound_bits": kl_bound,
              "tv_l1_bound": tv_bound}
    try:
        p = oracle.induced_resolvability_dist(code, args.cap)
        q = oracle.target_output_dist(ch, code.n)
        report["exact_tv_l1"] = oracle.tv(p, q)
        report["exact_kl_bits"] = oracle.kl(p, q)
    except CapExceeded:
        p = None
        report["exact_tv_l1"] = "bounded, not computed"
    if args.trials > 0:
        s = resolve_encode_batch(code, args.trials, role_stream(args.seed, "resolve"))
        emp = {"trials": args.trials, "max_per_symbol_tv_l1": per_symbol_tv(code, s.y)}
        if p is not None:
            emp["block_tv_l1_vs_exact"] = _empirical_tv(sequence_counts(code, s.y), p)
        report["empirical"] = emp
    return report


def cmd_coordinate(args) -> dict:
    wx, wy = channel_arg(args.wx), channel_arg(args.wy)
    budget = _budget(args)
    code = build_code(PolarParams(args.m), wx, wy, _construction(args), budget, args.exact)
    prof_yx = synthesize_for(code.wyx, args.m, budget, args.exact)
    prof_x = synthesize_for(wx, args.m, budget, args.exact)
    kl_f1 = sum(b.capacity_upper for b in prof_yx if b.index in set(code.partition.f1))
    bad_x = set(code.partition.f1) | set(code.partition.f2)
    enc = sum(math.sqrt(2 * math.log(2) * b.capacity_upper) for b in prof_x if b.index in bad_x)
    report = {
        "rates": {"r": code.rate_r, "r0": code.rate_r0},
        "partition": code.partition.to_dict(),
        "bounds": {"ensemble_kl_bits": kl_f1,
                   "ensemble_tv_l1": math.sqrt(2 * math.log(2) * kl_f1),
                   "encoder_tv_l1": enc},
    }
    exact = None
    try:
        exact = oracle.induced_coordination_joint(code, args.cap)
        report["exact_tv_l1"] = oracle.tv(exact, oracle.target_joint(wx, wy, code.n))
    except CapExceeded:
        report["exact_tv_l1"] = "bounded, not computed"
    if args.trials > 0:
        ledger = RandomnessLedger()
        tally = tally_sessions(code, args.trials, session_streams(args.seed), ledger=ledger,
                               block_cap=args.cap)
        pair = tally["pair_counts"]
        emp = {"sessions": args.trials,
               "per_symbol_tv_l1": float(np.abs(pair / pair.sum() - single_letter_target(code)).sum())}
        if exact is not None and tally["block_counts"] is not None:
            emp["block_tv_l1_vs_exact"] = _empirical_tv(tally["block_counts"], exact)
        report["empirical"] = emp
        report["randomness_ledger"] = ledger.to_dict()
    return report


def cmd_region(args) -> dict:
    if args.case == "example1":
        polar = polar_region_example1(args.p, args.eps, _grid(args, min(0.5, args.p)))
        ref = reference_region_example1(args.p, args.eps, _grid(args, min(1.0, args.eps)))
        if args.out:
            polar.write_csv(args.out)
            polar.write_sidecar(args.out + ".json")
            base, ext = os.path.splitext(args.out)
            ref.write_csv(base + "_reference" + (ext or ".csv"))
            ref.write_sidecar(base + "_reference" + (ext or ".csv") + ".json")
        return {"polar": polar.sidecar(), "polar_rows": polar.rows(),
                "reference": ref.sidecar(), "reference_rows": ref.rows(),
                "reference_check": reference_discrepancy(args.p, args.eps, ref.grid)}
    if args.case == "example2":
        doc = polar_region_example2(args.eps)
        return {"region": doc["region"], "corner": list(doc["corner"]),
                "corner_from_capacities": list(doc["corner_from_capacities"]), "eps": args.eps}
    if args.wx and args.wy:
        wx, wy = channel_arg(args.wx), channel_arg(args.wy)
    elif args.q is not None:
        wx, wy = example1_channels(args.p, args.eps, args.q)
    else:
        raise ConfigError("region general needs --wx/--wy or --q with --p/--eps")
    pt = polar_region_general(wx, wy)
    return {"corner": {"r": pt.r, "r0": pt.r0, "sum": pt.total}}


def _grid(args, hi):
    return None if args.points is None else np.linspace(0.0, hi, args.points)


def cmd_oracle(args) -> dict:
    if args.op == "capacities":
        ch = channel_arg(args.spec or args.channel)
        return {"capacities": oracle.brute_force_capacities(ch, args.m, args.cap).tolist()}
    if args.op == "bit-channel":
        ch = channel_arg(args.spec or args.channel)
        t = oracle.brute_force_bit_channel(ch, args.m, args.index, args.cap)
        return {"index": t.index, "capacity": t.capacity, "shape": list(t.table.shape)}
    if args.op == "resolvability":
        ch = channel_arg(args.spec or args.channel)
        code, _ = build_resolvability_code(ch, args.m, args.beta, None, True)
        p = oracle.induced_resolvability_dist(code, args.cap)
        q = oracle.target_output_dist(ch, code.n)
        return {"good": list(code.good), "tv_l1": oracle.tv(p, q), "kl_bits": oracle.kl(p, q),
                "composite_capacity": oracle.composite_channel_capacity(code, args.cap),
                "table": p.array().ravel().tolist()}
    wx, wy = channel_arg(args.wx), channel_arg(args.wy)
    code = build_code(PolarParams(args.m), wx, wy, _construction(args), None, True)
    p = oracle.induced_coordination_joint(code, args.cap)
    q = oracle.target_joint(wx, wy, code.n)
    ens = oracle.ensemble_joint(code, args.cap)
    return {"partition": code.partition.to_dict(), "tv_l1": oracle.tv(p, q),
            "ensemble_tv_l1": oracle.tv(ens.xy, q),
            "encoder_tv_l1": float(np.abs(ens.ux_tilde - ens.ux_hat).sum()),
            "table": p.array().ravel().tolist()}


COMMANDS = {"construct": cmd_construct, "resolve": cmd_resolve, "coordinate": cmd_coordinate,
            "region": cmd_region, "oracle": cmd_oracle}


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file of option defaults")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="report path (stdout when omitted)")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--beta", type=float, default=0.25)
    p.add_argument("--mu", type=int, default=64)
    p.add_argument("--no-upgrade", action="store_true", help="skip upper-bound synthesis")
    p.add_argument("--exact", action="store_true", help="unquantized synthesis")
    p.add_argument("--mode", choices=("threshold", "rate-target"), default="threshold")
    p.add_argument("--trials", type=int, default=0, help="Monte Carlo trials or sessions")
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP, help="exact-oracle table cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polarcoord",
                                     description="Polar codes for resolvability and coordination")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a coordination code")
    _common(p)
    p.add_argument("--wx", default="bsc:0.1")
    p.add_argument("--wy", default="bsc:0.2")

    p = sub.add_parser("resolve", help="resolvability code and diagnostics")
    _common(p)
    p.add_argument("--channel", default="bsc:0.3")
    p.add_argument("--spec", help="channel JSON document")

    p = sub.add_parser("coordinate", help="simulate coordination sessions")
    _common(p)
    p.add_argument("--wx", default="bsc:0.1")
    p.add_argument("--wy", default="bsc:0.2")

    p = sub.add_parser("region", help="rate-region corners")
    _common(p)
    p.add_argument("case", choices=("example1", "example2", "general"))
    p.add_argument("--p", type=float, default=0.15)
    p.add_argument("--eps", type=float, default=0.4)
    p.add_argument("--q", type=float)
    p.add_argument("--points", type=int, help="grid size (default 201)")
    p.add_argument("--wx")
    p.add_argument("--wy")

    p = sub.add_parser("oracle", help="exact small-n computations")
    _common(p)
    p.add_argument("op", choices=("capacities", "bit-channel", "resolvability", "coordination"))
    p.add_argument("--channel", default="bsc:0.3")
    p.add_argument("--spec", help="channel JSON document")
    p.add_argument("--index", type=int, default=1)
    p.add_argument("--wx", default="bsc:0.1")
    p.add_argument("--wy", default="bsc:0.2")
    return parser


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return parser.parse_args(argv)
    try:
        with open(known.config) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    args = parser.parse_args(argv)
    defaults = {k.replace("-", "_"): v for k, v in doc.items()}
    unknown = set(defaults) - set(vars(args))
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    # flags given on the command line win over the file
    given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for k, v in defaults.items():
        if k not in given:
            setattr(args, k, v)
    return args


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def render(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=1) + "\n"


def run(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
        body = COMMANDS[args.command](args)
        config = {k: v for k, v in vars(args).items() if k != "config"}
        report = {"command": args.command, "config": config, "version": __version__, **body}
        text = render(report)
        if args.out and args.command != "region":
            with open(args.out, "w") as fh:
                fh.write(text)
        elif args.out:
            with open(args.out + ".report.json", "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main():
    sys.exit(run())
