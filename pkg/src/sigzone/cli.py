"""Command-line driver: parse model files, compose, explore, exemplify,
and write trace/plot files plus a summary."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from .automata import ComposeError, compose, is_strongly_deterministic
from .exemplify import NEG_PARAM, NEG_VAR, POSITIVE, exemplify
from .io import ModelError, emit_plot, emit_trace, parse_model
from .semantics import Budget

log = logging.getLogger("sigzone")

_TAG_STEM = {POSITIVE: "pos", NEG_PARAM: "neg_param", NEG_VAR: "neg_var"}
_TAG_DEADLOCK = {NEG_PARAM: "parametric", NEG_VAR: "variable"}


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sigzone", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    ex = sub.add_parser("exemplify", help="produce positive and negative example runs")
    ex.add_argument("models", nargs="+", help="model files, merged in order (first ptas block is the spec)")
    ex.add_argument("-o", "--out", default="out", help="output directory (default: out)")
    ex.add_argument("--attempts", type=int, default=6, help="symbolic runs to try (default: 6)")
    ex.add_argument("--max-depth", type=int, default=50, help="exploration depth budget (default: 50)")
    ex.add_argument("--max-states", type=int, default=10000, help="stored-state budget (default: 10000)")
    ex.add_argument("--formats", default="json,csv,svg", help="comma-separated subset of json,csv,svg")
    ex.add_argument("-v", "--verbose", action="store_true")
    return ap


def run_cli(argv: list[str] | None = None) -> int:
    ns = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING, stream=sys.stderr)

    formats = [f.strip() for f in ns.formats.split(",") if f.strip()]
    bad = [f for f in formats if f not in ("json", "csv", "svg")]
    if bad or not formats:
        print(f"sigzone: unknown output formats {bad}", file=sys.stderr)
        return 2
    if ns.attempts < 1 or ns.max_depth < 1 or ns.max_states < 1:
        print("sigzone: attempts and budgets must be at least 1", file=sys.stderr)
        return 2

    try:
        texts = [Path(p).read_text(encoding="utf-8") for p in ns.models]
    except OSError as exc:
        print(f"sigzone: {exc}", file=sys.stderr)
        return 2
    merged = "\n".join(texts)
    model_hash = hashlib.sha256(merged.encode("utf-8")).hexdigest()

    try:
        net = parse_model(merged)
        if not net.targets:
            raise ModelError("no target declaration; add `target <loc>;`")
        plma = compose(net)
    except (ModelError, ComposeError) as exc:
        print(f"sigzone: {exc}", file=sys.stderr)
        return 2

    for comp in [net.spec] + net.bounders:
        if not is_strongly_deterministic(comp):
            log.warning("component %s is not strongly deterministic; negative runs may be incomplete", comp.name)

    if plma is net.spec:
        targets = set(net.targets)
    else:
        targets = {loc for loc in plma.locations if loc[0] in net.targets}

    budget = Budget(max_depth=ns.max_depth, max_states=ns.max_states)
    results = exemplify(plma, targets, budget, attempts=ns.attempts)

    outdir = Path(ns.out)
    outdir.mkdir(parents=True, exist_ok=True)
    summary: dict[str, object] = {
        "model": model_hash,
        "attempts": ns.attempts,
        "budget": {"max_depth": ns.max_depth, "max_states": ns.max_states},
        "results": [],
    }
    any_positive = False
    for k, res in enumerate(results, start=1):
        entry = {"attempt": k, "actions": [plma.edges[e].action for e in res.symbolic_run.edge_ids], "runs": []}
        for tagged in res.runs:
            stem = f"run_{k}_{_TAG_STEM[tagged.tag]}"
            deadlock = None
            if tagged.tag in _TAG_DEADLOCK:
                deadlock = {"kind": _TAG_DEADLOCK[tagged.tag], "index": tagged.deadlock_index}
            verdict = "positive" if tagged.verdict.positive else "negative"
            any_positive = any_positive or (tagged.tag == POSITIVE and tagged.verdict.positive)
            files = []
            if "json" in formats:
                files.append(f"{stem}.json")
                (outdir / f"{stem}.json").write_text(
                    emit_trace(tagged.run, verdict=verdict, model_hash=model_hash, deadlock=deadlock, a=plma),
                    encoding="utf-8", newline="\n")
            if "csv" in formats:
                files.append(f"{stem}.csv")
                (outdir / f"{stem}.csv").write_text(emit_plot(plma, tagged.run, "csv"), encoding="utf-8", newline="\n")
            if "svg" in formats:
                files.append(f"{stem}.svg")
                (outdir / f"{stem}.svg").write_text(emit_plot(plma, tagged.run, "svg"), encoding="utf-8", newline="\n")
            run_entry = {
                "tag": _TAG_STEM[tagged.tag],
                "pval": {p: str(v) for p, v in sorted(tagged.run.pval.items())},
                "verdict": verdict,
                "files": files,
            }
            if deadlock is not None:
                run_entry["deadlock"] = deadlock
            if not tagged.verdict.positive:
                run_entry["fail_index"] = tagged.verdict.fail_index
                run_entry["reason"] = tagged.verdict.reason
            entry["runs"].append(run_entry)
        summary["results"].append(entry)

    (outdir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8", newline="\n")
    if not results:
        print("sigzone: no target state reached within budget", file=sys.stderr)
        return 1
    print(f"wrote {sum(len(r['runs']) for r in summary['results'])} runs to {outdir}")
    return 0 if any_positive else 1


def main() -> int:
    return run_cli()


if __name__ == "__main__":
    sys.exit(main())
