"""Run every curated scenario end to end and print a summary table.

Usage: python3 scripts/run_corpus.py [--json] [--filter SUBSTRING]
"""

import argparse
import json
import sys
import tempfile
import time
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from retype import engine  # noqa: E402
from retype.cli import resolve_root  # noqa: E402
from retype.jparse import line_col  # noqa: E402
from retype.refgraph import Project, flow_sites, make_scope  # noqa: E402
from tests.corpus import SCENARIOS  # noqa: E402
from tests.helpers import read_tree, write_tree  # noqa: E402


def run(sc) -> dict:
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        write_tree(root, sc.files)
        started = time.perf_counter()
        project = Project.load(root)
        element = resolve_root(project, sc.root)
        pattern = sc.load_catalog().by_id(sc.pattern)
        plan = engine.plan_migration(project, element, pattern, make_scope(project, element, sc.scope), retyped=sc.retyped)
        planned = time.perf_counter()
        failed = []
        for usage, reason in plan.failed:
            text = project.files[usage.path].text
            line, col = line_col(text, usage.site.start)
            failed.append((f"{usage.path}:{line}:{col}", text[usage.site.start : usage.site.end], reason))
        found = sum(len(flow_sites(project, e, plan.scope)) for e in plan.elements)
        journal = engine.apply_plan(project, plan)
        exact = read_tree(root) == sc.after()
        engine.undo(journal)
        restored = read_tree(root) == sc.files
    counts = Counter(o.status for o in plan.outcomes)
    return {
        "name": sc.name,
        "scope": sc.scope,
        "elements": len(plan.elements),
        "rewritten": counts["rewritten"],
        "covered": counts["covered"],
        "failed": counts["failed"],
        "found": found,
        "exact_output": exact,
        "exact_failures": failed == sc.failed,
        "undo_restores": restored,
        "plan_ms": round((planned - started) * 1000, 2),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="emit one JSON object per scenario")
    ap.add_argument("--filter", default="", help="only scenarios whose name contains this")
    args = ap.parse_args(argv)

    rows = [run(sc) for sc in SCENARIOS if args.filter in sc.name]
    if args.json:
        for r in rows:
            print(json.dumps(r))
    else:
        head = f"{'scenario':34} {'scope':7} {'elem':>4} {'rw':>3} {'cov':>3} {'fail':>4} {'found':>5}  ok   ms"
        print(head)
        print("-" * len(head))
        for r in rows:
            ok = r["exact_output"] and r["exact_failures"] and r["undo_restores"] and \
                r["rewritten"] + r["covered"] + r["failed"] == r["found"]
            print(f"{r['name']:34} {r['scope']:7} {r['elements']:>4} {r['rewritten']:>3} {r['covered']:>3} "
                  f"{r['failed']:>4} {r['found']:>5}  {'yes' if ok else 'NO ':3} {r['plan_ms']:>5}")
    bad = [r["name"] for r in rows if not (r["exact_output"] and r["exact_failures"] and r["undo_restores"])]
    print(f"\n{len(rows) - len(bad)}/{len(rows)} scenarios exact", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
