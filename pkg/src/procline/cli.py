"""Command-line surface. All subcommands emit JSON; exit codes: 0 ok, 1 domain error, 2 usage."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analytics, interfaces, serialize
from .line import build_process_line, cut_at_abstraction, diff_to_core
from .model import ProcessError, validate_model
from .reflection import (
    compute_delta,
    discover_process,
    export_log_xml,
    parse_event_log,
    refine_process,
    suggest_additions,
)
from .selection import select_top_k
from .tailoring import estimate_roi


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_json(path: str):
    return json.loads(_read(path))


def _load_model(path: str):
    return serialize.model_from_dict(_load_json(path), path)


def _emit(data) -> None:
    sys.stdout.write(serialize.dumps(data))


def _cmd_base(args) -> None:
    base = serialize.load_base(args.path)
    if args.base_command == "validate":
        report = {
            v.id: [
                {"code": viol.code, "message": viol.message, "object_id": viol.object_id}
                for viol in validate_model(v)
            ]
            for v in base.variants
        }
        _emit({"variants": len(base.variants), "violations": report})
    else:  # show
        _emit(serialize.base_to_dict(base))


def _cmd_line(args) -> None:
    if args.line_command == "build":
        base = serialize.load_base(args.base)
        variants = base.variants
        if args.variants:
            wanted = args.variants.split(",")
            variants = tuple(base.get(vid) for vid in wanted)
        line = build_process_line(variants)
        data = serialize.line_to_dict(line)
        if args.out:
            Path(args.out).write_text(serialize.dumps(data), encoding="utf-8")
        _emit(data)
        return
    line = serialize.line_from_dict(_load_json(args.line), args.line)
    if args.line_command == "cut":
        cut = cut_at_abstraction(line, args.level)
        _emit(serialize.cut_to_dict(cut))
    else:  # diff
        delta = diff_to_core(line, args.variant)
        _emit(serialize.process_delta_to_dict(delta))


def _cmd_select(args) -> None:
    base = serialize.load_base(args.base)
    query = serialize.characteristics_from_list(_load_json(args.characteristics))
    scores = select_top_k(base.variants, query, args.k)
    _emit(
        {
            "ranking": [
                {
                    "variant_id": s.variant_id,
                    "score": s.score,
                    "contributions": [{"name": n, "match": m} for n, m in s.contributions],
                }
                for s in scores
            ]
        }
    )


def _cmd_tailor(args) -> None:
    session = interfaces.session_from_dict(_load_json(args.session))
    action_payload = json.loads(args.action) if args.action else _load_json(args.action_file)
    action = interfaces.SessionAction(type="tailor", payload={"action": action_payload})
    session = interfaces.session_apply(session, action)
    Path(args.session).write_text(
        serialize.dumps(interfaces.session_to_dict(session)), encoding="utf-8"
    )
    _emit(interfaces.session_view(session))


def _cmd_roi(args) -> None:
    estimate = estimate_roi(_load_model(args.selected), _load_model(args.target))
    _emit(
        {
            "adapt_effort": estimate.adapt_effort,
            "build_effort": estimate.build_effort,
            "roi": estimate.roi if estimate.roi != float("inf") else "inf",
            "decision": estimate.decision.value,
        }
    )


def _cmd_log(args) -> None:
    log = parse_event_log(_read(args.path))
    if args.log_command == "parse":
        _emit(
            {
                "events": [
                    {
                        "timestamp": e.timestamp.isoformat(),
                        "case": e.case_id,
                        "activity": e.activity,
                        "status": e.status.value,
                        "performer": e.performer,
                        "group": e.group,
                    }
                    for e in log.events
                ],
                "warnings": log.unmatched_warnings(),
            }
        )
    else:  # export-xml
        document = export_log_xml(log)
        if args.out:
            Path(args.out).write_text(document, encoding="utf-8")
            _emit({"written": args.out, "events": len(log.events)})
        else:
            sys.stdout.write(document + "\n")


def _cmd_discover(args) -> None:
    log = parse_event_log(_read(args.log))
    model = discover_process(log)
    data = serialize.model_to_dict(model)
    if args.out:
        Path(args.out).write_text(serialize.dumps(data), encoding="utf-8")
    _emit(data)


def _cmd_delta(args) -> None:
    prescriptive = _load_model(args.prescriptive)
    log = parse_event_log(_read(args.log))
    performed = discover_process(log)
    delta = compute_delta(prescriptive, performed, log)
    data = serialize.process_delta_to_dict(delta)
    data["suggestions"] = sorted(str(k) for k in suggest_additions(delta, args.theta))
    _emit(data)


def _cmd_refine(args) -> None:
    prescriptive = _load_model(args.prescriptive)
    log = parse_event_log(_read(args.log))
    performed = discover_process(log)
    delta = compute_delta(prescriptive, performed, log)
    decisions = [
        serialize.decision_from_dict(d, f"decisions[{i}]")
        for i, d in enumerate(_load_json(args.decisions))
    ]
    refined, ledger = refine_process(prescriptive, delta, decisions, threshold=args.theta)
    _emit(
        {
            "model": serialize.model_to_dict(refined),
            "ledger": serialize.ledger_to_dict(ledger),
        }
    )


def _effort_tables(args):
    records = analytics.parse_effort_csv(_read(args.records))
    taxonomy, buckets = analytics.taxonomy_and_buckets(records)
    return analytics.aggregate_effort(records, taxonomy, buckets), taxonomy, buckets


def _cmd_effort(args) -> None:
    tables, taxonomy, buckets = _effort_tables(args)
    if args.effort_command == "aggregate":
        out = {
            group: {
                "cells": {
                    activity: {bucket: table.cell(activity, bucket) for bucket in buckets}
                    for activity in taxonomy
                },
                "row_totals": {activity: table.row_total(activity) for activity in taxonomy},
                "column_totals": {bucket: table.column_total(bucket) for bucket in buckets},
                "grand_total": table.grand_total(),
            }
            for group, table in tables.items()
        }
        result = {"groups": out}
        if args.printed_totals:
            printed = analytics.parse_printed_totals_csv(_read(args.printed_totals))
            result["mismatches"] = [
                {
                    "group": m.group,
                    "activity": m.activity,
                    "printed": m.printed,
                    "recomputed": m.recomputed,
                }
                for m in analytics.verify_printed_totals(tables, printed)
            ]
        _emit(result)
    else:  # compare
        comparison = analytics.compare_groups(tables)
        _emit(
            {
                "grand_totals": comparison.grand_totals,
                "differences": [
                    {"groups": [g1, g2], "difference": d}
                    for (g1, g2), d in sorted(comparison.differences.items())
                ],
            }
        )


def _cmd_serve(args) -> None:
    from .service import serve

    serve(base_path=args.base, snapshot_path=args.snapshot)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="procline")
    sub = parser.add_subparsers(dest="command", required=True)

    p_base = sub.add_parser("base", help="inspect a process base file")
    base_sub = p_base.add_subparsers(dest="base_command", required=True)
    for name in ("validate", "show"):
        p = base_sub.add_parser(name)
        p.add_argument("path")
        p.set_defaults(func=_cmd_base)

    p_line = sub.add_parser("line", help="build, cut, and diff process lines")
    line_sub = p_line.add_subparsers(dest="line_command", required=True)
    p = line_sub.add_parser("build")
    p.add_argument("--base", required=True)
    p.add_argument("--variants", help="comma-separated variant ids (default: all)")
    p.add_argument("-o", "--out")
    p.set_defaults(func=_cmd_line)
    p = line_sub.add_parser("cut")
    p.add_argument("--line", required=True)
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(func=_cmd_line)
    p = line_sub.add_parser("diff")
    p.add_argument("--line", required=True)
    p.add_argument("--variant", required=True)
    p.set_defaults(func=_cmd_line)

    p = sub.add_parser("select", help="rank base variants against project characteristics")
    p.add_argument("--base", required=True)
    p.add_argument("--characteristics", required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("tailor", help="apply one tailoring action to a persisted session")
    p.add_argument("--session", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--action", help="tailoring action as inline JSON")
    group.add_argument("--action-file", help="tailoring action as a JSON file")
    p.set_defaults(func=_cmd_tailor)

    p = sub.add_parser("roi", help="adapt-versus-build estimate for two models")
    p.add_argument("--selected", required=True)
    p.add_argument("--target", required=True)
    p.set_defaults(func=_cmd_roi)

    p_log = sub.add_parser("log", help="parse or convert activity logs")
    log_sub = p_log.add_subparsers(dest="log_command", required=True)
    p = log_sub.add_parser("parse")
    p.add_argument("path")
    p.set_defaults(func=_cmd_log)
    p = log_sub.add_parser("export-xml")
    p.add_argument("path")
    p.add_argument("-o", "--out")
    p.set_defaults(func=_cmd_log)

    p = sub.add_parser("discover", help="mine the performed process from a log")
    p.add_argument("--log", required=True)
    p.add_argument("-o", "--out")
    p.set_defaults(func=_cmd_discover)

    p = sub.add_parser("delta", help="prescriptive-versus-performed delta analysis")
    p.add_argument("--prescriptive", required=True)
    p.add_argument("--log", required=True)
    p.add_argument("--theta", type=float, default=0.5)
    p.set_defaults(func=_cmd_delta)

    p = sub.add_parser("refine", help="apply refinement decisions to a prescriptive model")
    p.add_argument("--prescriptive", required=True)
    p.add_argument("--log", required=True)
    p.add_argument("--decisions", required=True)
    p.add_argument("--theta", type=float, default=0.5)
    p.set_defaults(func=_cmd_refine)

    p_effort = sub.add_parser("effort", help="aggregate or compare effort records")
    effort_sub = p_effort.add_subparsers(dest="effort_command", required=True)
    p = effort_sub.add_parser("aggregate")
    p.add_argument("--records", required=True)
    p.add_argument("--printed-totals")
    p.set_defaults(func=_cmd_effort)
    p = effort_sub.add_parser("compare")
    p.add_argument("--records", required=True)
    p.set_defaults(func=_cmd_effort)

    p = sub.add_parser("serve", help="run the HTTP service over a process base")
    p.add_argument("--base", required=True)
    p.add_argument("--snapshot", help="write session snapshots to this file after each action")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ProcessError as exc:
        json.dump({"error": {"code": exc.code, "message": str(exc)}}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    except FileNotFoundError as exc:
        json.dump({"error": {"code": "not-found", "message": str(exc)}}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
