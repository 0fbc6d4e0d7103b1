"""Command-line entry point: ``predmatch <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .core import (RESIDENTS, SIDES, InstanceError, read_instance, read_matching, verify_stability,
                   write_instance, write_matching)
from .da import run_da
from .experiment import ExperimentConfig, run_experiment
from .gadget import (DisjointnessInstance, GadgetError, build_gadget, average_error, max_error,
                     read_pairs, repair_matching, total_error)
from .generators import MODELS, RatingTable, TierParams, make_sampler
from .oracle import MAX_ORACLE_N, enumerate_stable
from .predictions import learn_windows, read_predictions, train, write_predictions
from .truncation import run_pda_adaptive, run_pda_once, run_wda


def _sampler_from_args(args):
    tiers = TierParams()
    if getattr(args, "tiers", None):
        doc = json.loads(Path(args.tiers).read_text())
        tiers = TierParams(tuple(doc["fractions"]), tuple(doc["weights"]))
    table = RatingTable.load(args.table) if getattr(args, "table", None) else None
    return make_sampler(args.model, args.n, args.phi, tiers, table)


def _print(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def cmd_gen(args) -> int:
    inst = _sampler_from_args(args)(args.seed)
    write_instance(inst, args.out)
    print(f"wrote {args.model} instance n={inst.n} to {args.out}")
    return 0


def _report_run(inst, mu, stats, out, extra=None) -> None:
    v = verify_stability(inst, mu)
    rec = {"proposals": stats.proposals, "matched": mu.size, "instance_size": stats.instance_size,
           "iterations": stats.iterations, "verdict": v.describe(), "perfect": v.perfect,
           "matching": mu.to_list()}
    rec.update(extra or {})
    if out:
        write_matching(mu, out)
    _print(rec)


def cmd_da(args) -> int:
    inst = read_instance(args.instance)
    mu, stats = run_da(inst, args.proposer)
    _report_run(inst, mu, stats, args.out)
    return 0


def cmd_wda(args) -> int:
    inst = read_instance(args.instance)
    pred = read_predictions(args.predictions)
    mu, stats, _ = run_wda(inst, pred, args.proposer)
    _report_run(inst, mu, stats, args.out)
    return 0


def cmd_pda(args) -> int:
    inst = read_instance(args.instance)
    rho = read_predictions(args.predictions).hi
    if args.once:
        mu, stats, unmatched = run_pda_once(inst, rho)
        _report_run(inst, mu, stats, args.out, {"unmatched_hospitals": sorted(unmatched)})
    else:
        mu, stats, rounds = run_pda_adaptive(inst, rho, args.extension, args.growth)
        _report_run(inst, mu, stats, args.out, {"rounds": rounds})
    return 0


def cmd_train(args) -> int:
    log = train(_sampler_from_args(args), args.k_train, args.proposer, args.seed)
    pred = learn_windows(log)
    write_predictions(pred, args.out, {"model": args.model, "n": args.n, "phi": args.phi,
                                       "k_train": args.k_train, "seed": args.seed,
                                       "proposer": args.proposer})
    print(f"wrote {len(pred)} windows to {args.out}")
    return 0


def _parse_sweep(text: str) -> tuple:
    vals = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok:
            v = float(tok)
            vals.append(int(v) if v.is_integer() and "." not in tok else v)
    return tuple(vals)


def cmd_experiment(args) -> int:
    overrides = {"k_train": args.k_train, "k_eval": args.k_eval, "proposer": args.proposer,
                 "seed": args.seed, "out": args.out, "workers": args.workers, "plots": not args.no_plots}
    if args.n is not None:
        overrides["n"] = args.n
    if args.phi is not None:
        overrides["phi"] = args.phi
    if args.sweep_param:
        overrides["sweep_param"] = args.sweep_param
    if args.sweep:
        overrides["sweep"] = _parse_sweep(args.sweep)
    if args.table:
        overrides["table"] = RatingTable.load(args.table).to_dict()
    if args.tiers:
        doc = json.loads(Path(args.tiers).read_text())
        overrides["tiers"] = TierParams(tuple(doc["fractions"]), tuple(doc["weights"]))
    cfg = ExperimentConfig.preset(args.model, **overrides)
    result = run_experiment(cfg)
    for row in result["summary"]:
        print(f"{cfg.sweep_param}={row['sweep']} {row['algo']:>3}: proposals {row['proposals_mean']:.1f} "
              f"(sd {row['proposals_std']:.1f}), size {row['size_mean']:.0f}, stable {row['stable_pct']:.0f}%")
    print(f"results in {cfg.out}")
    return 0


def cmd_verify(args) -> int:
    inst = read_instance(args.instance)
    mu = read_matching(args.matching, inst.n)
    v = verify_stability(inst, mu)
    line = v.describe()
    if inst.n <= MAX_ORACLE_N:
        s = enumerate_stable(inst)
        line += "; unique stable matching" if len(s) == 1 else f"; {len(s)} stable matchings"
    print(line)
    return 0 if v.stable else 1


def cmd_gadget(args) -> int:
    A = read_pairs(args.A) if args.A else frozenset()
    B = read_pairs(args.B) if args.B else frozenset()
    d = DisjointnessInstance(args.m, args.eta, A, B)
    g = build_gadget(d, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_instance(g.inst, out / "instance.json")
    write_matching(g.mu_hat, out / "predicted.json")

    v = verify_stability(g.inst, g.mu_hat)
    report = {"n": g.n, "m": d.m, "eta": d.eta, "disjoint": d.disjoint, "predicted_stable": v.stable}
    if v.stable:
        nearest, how = g.mu_hat, "predicted"
    elif g.n <= MAX_ORACLE_N:
        nearest = min(enumerate_stable(g.inst), key=lambda m: max_error(g, m))
        how = "oracle"
    else:
        nearest, how = repair_matching(g), "repair"
    report.update({"reference": how, "max_error": max_error(g, nearest),
                   "total_error": total_error(g, nearest), "average_error": average_error(g, nearest)})
    if not d.disjoint:
        rep = repair_matching(g)
        write_matching(rep, out / "repaired.json")
        report["repair_changed_agents"] = rep.changed_agents(g.mu_hat)
        report["repair_stable"] = verify_stability(g.inst, rep).stable
        report["repair_average_error"] = average_error(g, rep)
    (out / "report.json").write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")

    if v.stable:
        print(f"μ̂ stable; max error {report['max_error']}")
    else:
        r, h = v.witness
        print(f"μ̂ unstable; repaired matching changes {report['repair_changed_agents']} agents; "
              f"average error {report['repair_average_error']:.3f} ≤ 4; "
              f"witness (r{r + 1},h{h + 1}); max error vs {how} {report['max_error']} > eta={d.eta}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="predmatch", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    def market(sp):
        sp.add_argument("--model", choices=MODELS, default="mallows")
        sp.add_argument("--n", type=int, default=100)
        sp.add_argument("--phi", type=float, default=0.5)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tiers", help="JSON file with 'fractions' and 'weights'")
        sp.add_argument("--table", help="JSON rating-table config")

    sp = sub.add_parser("gen", help="sample a market into an instance file")
    market(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_gen)

    for name, func in (("da", cmd_da), ("wda", cmd_wda), ("pda", cmd_pda)):
        sp = sub.add_parser(name, help=f"run {name.upper()} on an instance file")
        sp.add_argument("instance")
        if name != "da":
            sp.add_argument("predictions", help="prediction file (lo/hi per hospital)")
        if name != "pda":
            sp.add_argument("--proposer", choices=SIDES, default=RESIDENTS)
        else:
            sp.add_argument("--once", action="store_true", help="single round, no list extension")
            sp.add_argument("--extension", type=int, default=None, help="initial extension (default n//8)")
            sp.add_argument("--growth", type=float, default=2.0)
        sp.add_argument("--out", help="write the matching here")
        sp.set_defaults(func=func)

    sp = sub.add_parser("train", help="learn rank windows from sampled markets")
    market(sp)
    sp.add_argument("--k-train", type=int, default=50)
    sp.add_argument("--proposer", choices=SIDES, default=RESIDENTS)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("experiment", help="train/evaluate sweep; writes CSV and SVG plots")
    sp.add_argument("--model", choices=MODELS, default="mallows")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--phi", type=float, default=None)
    sp.add_argument("--sweep", help="comma-separated sweep values (default: model preset)")
    sp.add_argument("--sweep-param", choices=("phi", "n"))
    sp.add_argument("--k-train", type=int, default=50)
    sp.add_argument("--k-eval", type=int, default=50)
    sp.add_argument("--proposer", choices=SIDES, default=RESIDENTS)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--tiers")
    sp.add_argument("--table")
    sp.add_argument("--no-plots", action="store_true")
    sp.add_argument("--out", default="results")
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("gadget", help="build the set-disjointness gadget market")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--eta", type=int, required=True)
    sp.add_argument("--A", help="file of 'i j' pairs (1-based)")
    sp.add_argument("--B", help="file of 'i j' pairs (1-based)")
    sp.add_argument("--seed", type=int, default=None, help="shuffle free-order list segments")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_gadget)

    sp = sub.add_parser("verify", help="check a matching for stability")
    sp.add_argument("instance")
    sp.add_argument("matching")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InstanceError, GadgetError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
