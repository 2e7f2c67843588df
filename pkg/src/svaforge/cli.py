"""Command-line driver.

Subcommands: ``synthesize`` (run the data pipeline), ``check`` (bounded
verifier), ``eval`` (functional pass-rate), ``stats`` (corpus metrics).

Exit codes: 0 success / positive verdict, 1 negative verdict,
2 usage or configuration error, 3 aborted run. With ``--json`` a single
JSON document goes to stdout and all logging to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ENV_VAR, load_config, resolve_config_path
from .errors import (CheckpointCorrupt, ConfigError, ParseError,
                     SvaForgeError)
from .gateway import LlmClient, NlProperty, AuditLog
from .metrics import (count_e2e, decontaminate, evaluate, func_at_k,
                      tfidf_diversity)
from .pipeline import STAGES, run
from .rtl.analyze import curate as curate_designs
from .rtl.parser import parse_design
from .sva.parser import parse_assertion
from .verify import Bound, CheckReport, Outcome, equivalent, free_tautology, \
    holds_on_design

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_ABORTED = 3


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="svaforge",
        description="Generate, verify, and score NL-SVA training data.")
    top.add_argument("--config", "-c",
                     help=f"config file (or ${ENV_VAR})")
    top.add_argument("--json", action="store_true",
                     help="emit one JSON document on stdout")
    top.add_argument("--verbose", "-v", action="count", default=0)
    top.add_argument("--seed", type=int, default=None,
                     help="override the config seed")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="run the synthesis pipeline")
    p.add_argument("manifest", nargs="?",
                   help="design manifest (JSONL); default from config")
    p.add_argument("--workdir", required=True)
    p.add_argument("--from", dest="from_stage", default=STAGES[0],
                   choices=STAGES)
    p.add_argument("--to", dest="to_stage", default=STAGES[-1],
                   choices=STAGES)

    p = sub.add_parser("check", help="bounded verification checks")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--equiv", nargs=2, metavar=("A.sva", "B.sva"))
    group.add_argument("--holds", nargs=2, metavar=("A.sva", "DESIGN.v"))
    group.add_argument("--tautology", metavar="A.sva")
    p.add_argument("--bound", type=int, default=6, help="max trace length")
    p.add_argument("--max-states", type=int, default=1 << 22)
    p.add_argument("--widths", default="",
                   help="free-mode widths, e.g. a=1,term=4")
    p.add_argument("--reset-ticks", type=int, default=1)

    p = sub.add_parser("eval", help="sample translations and score Func.@k")
    p.add_argument("problems", help="JSONL: id, design_path, nl, "
                                    "ground_truth_sva")
    p.add_argument("--role", default="generator",
                   help="backend role from the config to sample with")
    p.add_argument("-n", type=int, default=32, help="samples per problem")
    p.add_argument("--k", default="1,16,32")
    p.add_argument("--bound", type=int, default=6)
    p.add_argument("--out", help="write the JSON report here")

    p = sub.add_parser("stats", help="corpus analytics")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--diversity", metavar="CORPUS")
    group.add_argument("--decontam", nargs=2, metavar=("TRAIN", "BENCH"))
    group.add_argument("--counts", nargs=2, metavar=("RESPONSES", "DESIGN.v"))
    p.add_argument("--ngram", type=int, default=3)
    p.add_argument("--pair-cap", type=int, default=10000)
    p.add_argument("--curve", default="",
                   help="comma-separated sizes for a size-vs-diversity CSV")
    p.add_argument("--bound", type=int, default=6)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        handler = {"synthesize": _cmd_synthesize, "check": _cmd_check,
                   "eval": _cmd_eval, "stats": _cmd_stats}[args.command]
        return handler(args)
    except (ConfigError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CheckpointCorrupt as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_ABORTED
    except SvaForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _load_run_config(args):
    path = resolve_config_path(args.config)
    if path is None:
        raise ConfigError(f"no config given (use --config or ${ENV_VAR})")
    cfg = load_config(path)
    if args.seed is not None:
        cfg.stage.seed = args.seed
    return cfg


def _emit(args, payload: dict, human: str):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(human)


# -- synthesize -------------------------------------------------------------

def _cmd_synthesize(args) -> int:
    cfg = _load_run_config(args)
    manifest = args.manifest or cfg.manifest
    if not manifest:
        raise ConfigError("no manifest given (argument or config key)")
    workdir = Path(args.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    client = LlmClient(template_dir=cfg.template_dir,
                       audit=AuditLog(workdir / "audit.log"))
    summary = run(manifest, cfg.stage, workdir, client,
                  from_stage=args.from_stage, to_stage=args.to_stage)
    lines = [f"{'stage':<16} {'alive':>6}  drops"]
    for stage, info in summary.items():
        if stage == "export":
            lines.append(f"{stage:<16} {info['exported']:>6}  "
                         f"decontaminated={info['decontaminated']}")
        else:
            drops = ", ".join(f"{k}={v}" for k, v in
                              sorted(info["dropped"].items())) or "-"
            skip = " (skipped)" if info.get("skipped") else ""
            lines.append(f"{stage:<16} {info['alive']:>6}  {drops}{skip}")
    _emit(args, {"summary": summary}, "\n".join(lines))
    return EXIT_OK


# -- check ------------------------------------------------------------------

def _parse_widths(spec: str):
    widths = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, w = part.partition("=")
        if not w:
            raise ConfigError(f"bad width entry {part!r}; want name=bits")
        widths[name.strip()] = int(w)
    return widths


def _witness_table(report: CheckReport) -> str:
    trace = report.witness
    names = [n for n, _ in trace.signals]
    head = "tick  " + "  ".join(f"{n:>8}" for n in names)
    rows = [head]
    for t in range(trace.length):
        rows.append(f"{t:>4}  " + "  ".join(
            f"{trace.value(n, t):>8}" for n in names))
    return "\n".join(rows)


def _cmd_check(args) -> int:
    bound = Bound(max_len=args.bound, max_states=args.max_states)
    widths = _parse_widths(args.widths)
    if args.tautology:
        a = parse_assertion(Path(args.tautology).read_text())
        flag = free_tautology(a, bound, widths)
        _emit(args, {"tautology": flag},
              f"tautology: {'yes' if flag else 'no'}")
        return EXIT_OK if flag else EXIT_NEGATIVE
    if args.equiv:
        a = parse_assertion(Path(args.equiv[0]).read_text())
        b = parse_assertion(Path(args.equiv[1]).read_text())
        report = equivalent(a, b, bound, widths=widths)
    else:
        a = parse_assertion(Path(args.holds[0]).read_text())
        design = _load_design(args.holds[1])
        report = holds_on_design(a, design, bound,
                                 reset_ticks=args.reset_ticks)
    human = f"{report.outcome.value} (enumerated {report.enumerated} traces)"
    if report.witness is not None:
        human += "\n" + _witness_table(report)
        if report.witness_verdicts:
            human += "\nverdicts: " + " vs ".join(report.witness_verdicts)
    if report.outcome is Outcome.HOLDS and report.tautology_flag:
        human += "\nwarning: holds on every free trace (tautology)"
    _emit(args, report.to_dict(), human)
    positive = report.outcome in (Outcome.HOLDS, Outcome.EQUIVALENT)
    return EXIT_OK if positive else EXIT_NEGATIVE


def _load_design(path):
    d = parse_design(Path(path).read_text(), name=Path(path).stem)
    result = curate_designs([d])
    if not result.kept:
        raise ConfigError(
            f"design {path} unusable: {result.rejected[0][1]}")
    return result.kept[0]


# -- eval -------------------------------------------------------------------

def _cmd_eval(args) -> int:
    cfg = _load_run_config(args)
    profile = cfg.stage.backend(args.role)
    ks = [int(k) for k in args.k.split(",") if k.strip()]
    problems = []
    base = Path(args.problems).parent
    for line in Path(args.problems).read_text().splitlines():
        if not line.strip():
            continue
        row = json.loads(line)
        dp = Path(row["design_path"])
        if not dp.is_absolute():
            dp = base / dp
        design = _load_design(dp)
        problems.append((design, NlProperty(row["nl"], "manual"),
                         parse_assertion(row["ground_truth_sva"]),
                         row.get("id", row["design_path"])))
    client = LlmClient(template_dir=cfg.template_dir)
    bound = Bound(max_len=args.bound)
    results = evaluate(problems, client, profile, args.n, bound,
                       reset_ticks=cfg.stage.reset_ticks)
    table = {f"func@{k}": func_at_k(results, k) for k in ks}
    payload = {
        "n": args.n, "seed": cfg.stage.seed,
        "per_problem": [{"id": r.problem_id, "n": r.n, "c": r.c}
                        for r in results],
        "func_at_k": table,
    }
    if args.out:
        Path(args.out).write_text(json.dumps(payload, sort_keys=True,
                                             indent=2) + "\n")
    human = ["problem            n    c"]
    human += [f"{r.problem_id:<16} {r.n:>4} {r.c:>4}" for r in results]
    human.append("  ".join(f"{k}={v:.6f}" for k, v in table.items()))
    _emit(args, payload, "\n".join(human))
    return EXIT_OK


# -- stats ------------------------------------------------------------------

def _read_lines(path) -> list:
    return [ln for ln in Path(path).read_text().splitlines() if ln.strip()]


def _cmd_stats(args) -> int:
    if args.diversity:
        corpus = _read_lines(args.diversity)
        value = tfidf_diversity(corpus, n_gram=args.ngram,
                                pair_cap=args.pair_cap,
                                seed=args.seed or 0)
        payload = {"diversity": value, "n_docs": len(corpus),
                   "seed": args.seed or 0}
        human = f"diversity: {value:.6f}"
        if args.curve:
            import random as _random

            sizes = [int(s) for s in args.curve.split(",") if s.strip()]
            rng = _random.Random(args.seed or 0)
            csv_lines = ["size,diversity"]
            curve = []
            for size in sizes:
                size = min(size, len(corpus))
                subset = rng.sample(corpus, size)
                v = tfidf_diversity(subset, n_gram=args.ngram,
                                    pair_cap=args.pair_cap,
                                    seed=args.seed or 0)
                curve.append({"size": size, "diversity": v})
                csv_lines.append(f"{size},{v:.6f}")
            payload["curve"] = curve
            human += "\n" + "\n".join(csv_lines)
        _emit(args, payload, human)
        return EXIT_OK
    if args.decontam:
        train = _read_lines(args.decontam[0])
        bench = _read_lines(args.decontam[1])
        report = decontaminate(train, bench, n=13)
        payload = {"kept": len(report.kept), "dropped": len(report.dropped),
                   "overlaps": [{"index": i, "ngram": g}
                                for i, g in report.overlaps]}
        _emit(args, payload,
              f"kept {len(report.kept)}, dropped {len(report.dropped)}")
        return EXIT_OK
    responses = _read_lines(args.counts[0])
    design = _load_design(args.counts[1])
    report = count_e2e(responses, design, Bound(max_len=args.bound))
    payload = {"sva": report.sva, "syn_correct": report.syn_correct,
               "proven": report.proven,
               "tautology_flags": report.tautology_flags}
    _emit(args, payload,
          f"{report.sva} {report.syn_correct} {report.proven}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
