"""Command-line front end.

Subcommands render the analysis views (analyze, peel, segments, endpoints),
the planning views (plan, compare), and the supporting catalogs (registry,
fixtures). Two output formats: "table" for humans and "machine" for
scripts, the latter one JSON object per line with sorted keys so identical
inputs produce byte-identical output.

Exit codes are a contract for CI gating:
    0  success; for analyze, chain confidentiality is Q-Safe
    2  analyze ran fine but chain confidentiality is not Q-Safe
    1  any error (bad input, unknown scenario, missing data)
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path as FsPath
from typing import Any, Sequence, TextIO

from .chain import Chain, KexSource, PreSharedSource, SignatureAuth
from .compose import PostureReport, compose
from .errors import PostureError
from .paths import endpoint_posture, segment_posture, trust_boundary_report
from .planner import (
    RiskWeights,
    Variant,
    detect_inversion,
    plan_ordering,
    state_risk,
)
from .registry import Registry, load_registry, serialize_entry
from .scenario import (
    EXTRAPOLATION_NAMES,
    FIXTURE_NAMES,
    ScenarioDoc,
    load_fixture,
    parse_scenario,
    resolve_fixture_name,
)
from .status import PqcLevel, PqcStatus

TABLE = "table"
MACHINE = "machine"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSAFE = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # Argument mistakes must exit 1, not argparse's default 2, because 2
    # is reserved for the not-Q-Safe posture signal.
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(f"{self.prog}: error: {message}")


def _status_fields(prefix: str, status: PqcStatus | None) -> dict[str, Any]:
    if status is None:
        return {f"{prefix}_level": None, f"{prefix}_mechanism": None}
    return {
        f"{prefix}_level": status.level.render,
        f"{prefix}_mechanism": status.mechanism.render,
    }


def _emit(records: list[dict[str, Any]], out: TextIO) -> None:
    for record in records:
        out.write(json.dumps(record, sort_keys=True, ensure_ascii=True))
        out.write("\n")


def _render_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)).rstrip())
    return "\n".join(lines)


def _cell(status: PqcStatus | None) -> str:
    return status.render if status is not None else "-"


def _key_summary(layer) -> str:
    root = layer.key_chain.root

    def describe(source) -> str:
        if isinstance(source, KexSource):
            return source.entry.name
        if isinstance(source, PreSharedSource):
            return f"psk:{source.label}"
        return "hybrid(" + "+".join(describe(c) for c in source.components) + ")"

    return describe(root)


def _auth_summary(layer) -> str:
    if layer.auth_op is None:
        return "-"
    if isinstance(layer.auth_op, SignatureAuth):
        return layer.auth_op.entry.name
    return f"mac:{layer.auth_op.entry.name}"


def _load_scenario(args: argparse.Namespace, ref: str) -> ScenarioDoc:
    registry = _base_registry(args)
    canonical = resolve_fixture_name(ref)
    if canonical is not None:
        return load_fixture(canonical, registry)
    path = FsPath(ref)
    if not path.exists():
        raise PostureError(
            f"{ref!r} is neither a bundled fixture nor an existing file"
        )
    return parse_scenario(path.read_text(), registry)


def _base_registry(args: argparse.Namespace) -> Registry:
    if getattr(args, "registry", None):
        return load_registry(FsPath(args.registry).read_text())
    return Registry.builtin()


def _layer_records(report: PostureReport) -> list[dict[str, Any]]:
    records = []
    for posture in report.per_layer:
        layer = posture.layer
        records.append(
            {
                "record": "layer",
                "id": layer.layer_id,
                "label": layer.label,
                "osi": layer.osi_index,
                "protocol": layer.protocol,
                **_status_fields("conf", posture.conf),
                **_status_fields("auth", posture.auth),
            }
        )
    return records


def _chain_record(report: PostureReport) -> dict[str, Any]:
    return {
        "record": "chain",
        "layers": len(report.per_layer),
        **_status_fields("conf", report.chain_conf),
        **_status_fields("auth", report.chain_auth),
        **_status_fields("meta", report.chain_meta),
        "exposure_depth": report.exposure_depth,
        "notes": list(report.notes),
    }


def cmd_analyze(args: argparse.Namespace, out: TextIO) -> int:
    doc = _load_scenario(args, args.scenario)
    report = compose(doc.chain)
    if args.format == MACHINE:
        records = [
            {"record": "scenario", "name": doc.name, "description": doc.description},
            *_layer_records(report),
            _chain_record(report),
        ]
        _emit(records, out)
    else:
        out.write(f"Scenario: {doc.name}\n")
        if doc.description:
            out.write(f"  {doc.description}\n")
        out.write("\n")
        rows = [
            [
                p.layer.label,
                p.layer.protocol,
                _key_summary(p.layer),
                _auth_summary(p.layer),
                _cell(p.conf),
                _cell(p.auth),
            ]
            for p in report.per_layer
        ]
        if rows:
            out.write(
                _render_table(
                    ["Layer", "Protocol", "Key source", "Auth scheme", "Conf", "Auth"],
                    rows,
                )
            )
            out.write("\n\n")
        confs = ", ".join(_cell(p.conf) for p in report.per_layer) or "-"
        auths = ", ".join(_cell(p.auth) for p in report.per_layer) or "-"
        outermost = report.per_layer[0].layer.label if report.per_layer else "none"
        out.write("Chain composition:\n")
        out.write(f"  conf = max({confs}) = {report.chain_conf.render}\n")
        out.write(f"  auth = min({auths}) = {report.chain_auth.render}\n")
        out.write(f"  meta = outermost({outermost}) = {report.chain_meta.render}\n")
        out.write(
            f"  d*   = {report.exposure_depth} of {len(report.per_layer)} layers\n"
        )
        for note in report.notes:
            out.write(f"  note: {note}\n")
        out.write(
            f"\nposture: conf = {report.chain_conf.render}, "
            f"auth = {report.chain_auth.render}, "
            f"meta = {report.chain_meta.render}, "
            f"d* = {report.exposure_depth}\n"
        )
    return EXIT_OK if report.chain_conf.level is PqcLevel.Q_SAFE else EXIT_UNSAFE


def cmd_peel(args: argparse.Namespace, out: TextIO) -> int:
    doc = _load_scenario(args, args.scenario)
    report = compose(doc.chain)
    if args.format == MACHINE:
        records = [
            {"record": "scenario", "name": doc.name, "description": doc.description}
        ]
        for step in report.peel_trace:
            records.append(
                {
                    "record": "peel",
                    "depth": step.depth,
                    "layer": step.layer.label if step.layer else None,
                    **_status_fields("status", step.status),
                    "harvestable": step.harvestable,
                    "revealed": list(step.revealed),
                }
            )
        records.append(_chain_record(report))
        _emit(records, out)
    else:
        out.write(f"Peel trace: {doc.name} (d* = {report.exposure_depth})\n\n")
        rows = []
        for step in report.peel_trace:
            if step.depth == 0:
                what = "; ".join(step.revealed) or "-"
                rows.append(["0", "wire", "-", "observed", what])
                continue
            if step.harvestable:
                flag = "yes"
                what = "; ".join(step.revealed) or "-"
            else:
                flag = "no"
                what = "BLOCKED"
            rows.append(
                [
                    str(step.depth),
                    step.layer.label if step.layer else "-",
                    _cell(step.status),
                    flag,
                    what,
                ]
            )
        out.write(
            _render_table(["d", "Layer", "Conf", "Harvestable", "Newly revealed"], rows)
        )
        out.write("\n")
    return EXIT_OK


def cmd_segments(args: argparse.Namespace, out: TextIO) -> int:
    doc = _load_scenario(args, args.scenario)
    records: list[dict[str, Any]] = []
    rows = []
    node_by_name = {node.name: node for node in doc.path.nodes}
    for segment in doc.path.segments:
        conf, auth = segment_posture(segment)
        exposed = node_by_name[segment.dst].classical_exposure
        records.append(
            {
                "record": "segment",
                "from": segment.src,
                "to": segment.dst,
                "layers": [l.label for l in segment.active_layers],
                **_status_fields("conf", conf),
                **_status_fields("auth", auth),
                "exposed_at_receiving_node": list(exposed),
            }
        )
        rows.append(
            [
                f"{segment.src} -> {segment.dst}",
                "+".join(l.label for l in segment.active_layers) or "(plaintext)",
                conf.render,
                auth.render,
                "; ".join(exposed),
            ]
        )
    if args.format == MACHINE:
        _emit(
            [
                {"record": "scenario", "name": doc.name, "description": doc.description},
                *records,
            ],
            out,
        )
    else:
        out.write(f"Segments: {doc.name}\n\n")
        out.write(
            _render_table(
                ["Segment", "Active layers", "Conf", "Auth", "Exposed at receiving node"],
                rows,
            )
        )
        out.write("\n")
    return EXIT_OK


def cmd_endpoints(args: argparse.Namespace, out: TextIO) -> int:
    doc = _load_scenario(args, args.scenario)
    records: list[dict[str, Any]] = []
    rows = []
    boundary = {
        row.node.name: row for row in trust_boundary_report(doc.path, doc.chain)
    }
    for node in doc.path.nodes:
        report = endpoint_posture(node.name, doc.chain, doc.path)
        if not node.on_data_path:
            hndl_text = "n/a (not on the data path)"
        elif not report.hndl_applicable:
            hndl_text = (
                "n/a (not yet transmitted)"
                if node.role.value == "sender"
                else "n/a (endpoint)"
            )
        elif report.content_reachable:
            hndl_text = "; ".join(report.hndl_exposure) or "(nothing further)"
            hndl_text += " [content reachable: no Q-Safe layer remains]"
        else:
            revealed = "; ".join(report.hndl_exposure) or "no additional recovery"
            hndl_text = f"{revealed} [blocked by {report.blocked_by}]"
        if node.role.value == "sender":
            resistant = "all (pre-transmission)"
        elif report.quantum_resistant:
            resistant = ", ".join(l.label for l in report.quantum_resistant)
        else:
            resistant = "None" if report.hndl_applicable else "-"
        remaining = (
            "+".join(l.label for l in report.layers_remaining)
            if report.layers_remaining
            else ("(off data path)" if not node.on_data_path else "None")
        )
        if node.role.value == "sender":
            remaining += " (pre-tx)"
        records.append(
            {
                "record": "endpoint",
                "node": node.name,
                "role": node.role.value,
                "on_data_path": node.on_data_path,
                "layers_remaining": [l.label for l in report.layers_remaining],
                "classical_exposure": list(report.classical_exposure),
                "hndl_applicable": report.hndl_applicable,
                "hndl_exposure": list(report.hndl_exposure),
                "blocked_by": report.blocked_by,
                "content_reachable": report.content_reachable,
                "quantum_resistant": [l.label for l in report.quantum_resistant],
                "hndl_only_tags": (
                    list(boundary[node.name].hndl_only_tags)
                    if node.name in boundary
                    else None
                ),
            }
        )
        rows.append(
            [
                node.name,
                remaining,
                "; ".join(report.classical_exposure),
                hndl_text,
                resistant,
            ]
        )
    if args.format == MACHINE:
        _emit(
            [
                {"record": "scenario", "name": doc.name, "description": doc.description},
                *records,
            ],
            out,
        )
    else:
        out.write(f"Endpoints: {doc.name}\n\n")
        out.write(
            _render_table(
                ["Endpoint", "Layers remaining", "Classical exposure",
                 "HNDL exposure (quantum)", "Quantum-resistant"],
                rows,
            )
        )
        out.write("\n")
        for row in boundary.values():
            verdict = (
                "coincides with classical exposure"
                if row.coincides
                else "extends beyond classical exposure: "
                + "; ".join(row.hndl_only_tags)
            )
            out.write(f"trust boundary at {row.node.name}: HNDL {verdict}\n")
    return EXIT_OK


def _parse_weights(text: str) -> RiskWeights:
    parts = text.split(",")
    if len(parts) != 3:
        raise PostureError("--weights expects three comma-separated numbers: conf,auth,meta")
    try:
        conf, auth, meta = (float(p) for p in parts)
    except ValueError:
        raise PostureError(f"--weights values must be numbers, got {text!r}") from None
    return RiskWeights(conf=conf, auth=auth, meta=meta)


def cmd_plan(args: argparse.Namespace, out: TextIO) -> int:
    doc = _load_scenario(args, args.scenario)
    weights = _parse_weights(args.weights)
    plan = plan_ordering(doc.chain, weights, split_facets=args.split_facets)
    if args.format == MACHINE:
        records: list[dict[str, Any]] = [
            {"record": "scenario", "name": doc.name, "description": doc.description}
        ]
        for step, (action, snapshot) in enumerate(
            zip(plan.ordering, plan.snapshots[1:]), start=1
        ):
            records.append(
                {
                    "record": "plan_step",
                    "step": step,
                    "layer": action.layer_id,
                    "facets": sorted(action.facets),
                    **_status_fields("conf", snapshot.chain_conf),
                    **_status_fields("auth", snapshot.chain_auth),
                    **_status_fields("meta", snapshot.chain_meta),
                    "risk": state_risk(snapshot, weights),
                }
            )
        records.append(
            {
                "record": "plan",
                "cumulative_risk": plan.cumulative_risk,
                "ordering": [a.layer_id for a in plan.ordering],
                "notes": list(plan.notes),
            }
        )
        _emit(records, out)
    else:
        out.write(f"Migration plan: {doc.name}\n")
        out.write(
            f"  weights: conf={weights.conf:g} auth={weights.auth:g} "
            f"meta={weights.meta:g}\n\n"
        )
        initial = plan.snapshots[0]
        rows = [
            [
                "0",
                "(initial)",
                "-",
                initial.chain_conf.render,
                initial.chain_auth.render,
                initial.chain_meta.render,
                f"{state_risk(initial, weights):g}",
            ]
        ]
        for step, (action, snapshot) in enumerate(
            zip(plan.ordering, plan.snapshots[1:]), start=1
        ):
            rows.append(
                [
                    str(step),
                    action.layer_id,
                    "+".join(sorted(action.facets)),
                    snapshot.chain_conf.render,
                    snapshot.chain_auth.render,
                    snapshot.chain_meta.render,
                    f"{state_risk(snapshot, weights):g}",
                ]
            )
        out.write(
            _render_table(
                ["Step", "Migrate", "Facets", "Conf", "Auth", "Meta", "Risk"], rows
            )
        )
        out.write(f"\n\ncumulative risk: {plan.cumulative_risk:g}\n")
        for note in plan.notes:
            out.write(f"note: {note}\n")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace, out: TextIO) -> int:
    doc_a = _load_scenario(args, args.scenario_a)
    doc_b = _load_scenario(args, args.scenario_b)
    variant_a = Variant(doc_a.name, doc_a.chain, doc_a.classical_rank)
    variant_b = Variant(doc_b.name, doc_b.chain, doc_b.classical_rank)
    chain_report = detect_inversion(variant_a, variant_b)

    # Per-layer comparisons at matching stack positions reproduce the
    # layer-scope verdicts that chain folds can mask.
    layer_reports = []
    by_osi_a = {l.osi_index: l for l in doc_a.chain.layers}
    by_osi_b = {l.osi_index: l for l in doc_b.chain.layers}
    for osi in sorted(set(by_osi_a) & set(by_osi_b)):
        sub_a = Variant(
            f"{doc_a.name}:{by_osi_a[osi].label}",
            Chain(layers=(by_osi_a[osi],)),
            doc_a.classical_rank,
        )
        sub_b = Variant(
            f"{doc_b.name}:{by_osi_b[osi].label}",
            Chain(layers=(by_osi_b[osi],)),
            doc_b.classical_rank,
        )
        layer_reports.append((osi, by_osi_a[osi].label, detect_inversion(sub_a, sub_b)))

    inverted = chain_report.inversion or any(r.inversion for _, _, r in layer_reports)
    if args.format == MACHINE:
        records: list[dict[str, Any]] = []
        for scope, osi, report in (
            [("chain", None, chain_report)]
            + [("layer", osi, rep) for osi, _, rep in layer_reports]
        ):
            for facet in report.facets:
                records.append(
                    {
                        "record": "comparison",
                        "scope": scope,
                        "osi": osi,
                        "facet": facet.facet,
                        "a": report.a.name,
                        "b": report.b.name,
                        **_status_fields("a", facet.a_status),
                        **_status_fields("b", facet.b_status),
                        "quantum_delta": facet.quantum_delta,
                        "inverted": facet.facet in report.inverted_facets,
                    }
                )
        records.append(
            {
                "record": "inversion",
                "detected": inverted,
                "classically_stronger": chain_report.classically_stronger,
                "a": doc_a.name,
                "b": doc_b.name,
                "a_rank": doc_a.classical_rank,
                "b_rank": doc_b.classical_rank,
            }
        )
        _emit(records, out)
    else:
        out.write(f"Compare: {doc_a.name} vs {doc_b.name}\n")
        out.write(
            f"  classical ranks: {doc_a.name} = {doc_a.classical_rank}, "
            f"{doc_b.name} = {doc_b.classical_rank} "
            f"(stronger: {chain_report.classically_stronger})\n\n"
        )
        rows = []
        for scope_label, report in [("chain", chain_report)] + [
            (f"layer {label}", rep) for osi, label, rep in layer_reports
        ]:
            for facet in report.facets:
                marker = "INVERSION" if facet.facet in report.inverted_facets else ""
                mechanisms = (
                    f"{facet.a_status.mechanism.render} -> "
                    f"{facet.b_status.mechanism.render}"
                )
                rows.append(
                    [
                        scope_label,
                        facet.facet,
                        facet.a_status.render,
                        facet.b_status.render,
                        mechanisms,
                        marker,
                    ]
                )
        out.write(
            _render_table(
                ["Scope", "Facet", doc_a.name, doc_b.name, "Mechanism", ""], rows
            )
        )
        out.write("\n")
        if inverted:
            out.write(
                "\ninversion detected: the classically stronger variant is "
                "quantum-weaker on the marked facets\n"
            )
        else:
            out.write("\nno inversion detected\n")
    return EXIT_OK


def cmd_registry(args: argparse.Namespace, out: TextIO) -> int:
    if args.registry_action == "validate":
        registry = load_registry(FsPath(args.file).read_text())
        builtin = len(Registry.builtin())
        out.write(
            f"OK: {len(registry)} entries ({len(registry) - builtin} beyond built-ins)\n"
        )
        return EXIT_OK
    registry = _base_registry(args)
    if args.format == MACHINE:
        _emit(
            [
                {"record": "registry_entry", **serialize_entry(e)}
                for e in registry.entries()
            ],
            out,
        )
    else:
        rows = [
            [
                e.name,
                e.role.value,
                e.status.render,
                str(e.classical_bits),
                str(e.post_quantum_bits),
                e.note,
            ]
            for e in registry.entries()
        ]
        out.write(
            _render_table(
                ["Algorithm", "Role", "Status", "Classical bits", "PQ bits", "Note"],
                rows,
            )
        )
        out.write("\n")
    return EXIT_OK


def cmd_fixtures(args: argparse.Namespace, out: TextIO) -> int:
    registry = _base_registry(args)
    entries = [(name, False) for name in FIXTURE_NAMES] + [
        (name, True) for name in EXTRAPOLATION_NAMES
    ]
    if args.format == MACHINE:
        records = []
        for name, extrapolation in entries:
            doc = load_fixture(name, registry)
            records.append(
                {
                    "record": "fixture",
                    "name": name,
                    "layers": len(doc.chain.layers),
                    "description": doc.description,
                    "extrapolation": extrapolation,
                }
            )
        _emit(records, out)
    else:
        rows = []
        for name, extrapolation in entries:
            doc = load_fixture(name, registry)
            rows.append(
                [
                    name,
                    str(len(doc.chain.layers)),
                    "extrapolation" if extrapolation else "case study",
                    doc.description,
                ]
            )
        out.write(_render_table(["Fixture", "Layers", "Kind", "Description"], rows))
        out.write("\n")
    return EXIT_OK


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    # SUPPRESS keeps a subparser from clobbering a value given before the
    # subcommand with its own default.
    common.add_argument(
        "--format",
        choices=(TABLE, MACHINE),
        default=argparse.SUPPRESS,
        help="output format (default: table)",
    )
    common.add_argument(
        "--registry",
        metavar="FILE",
        default=argparse.SUPPRESS,
        help="registry JSON file applied over the built-in catalog",
    )
    parser = _Parser(
        prog="pqposture",
        parents=[common],
        description=(
            "Post-quantum security posture of layered network communications: "
            "per-layer classification, chain composition, exposure analysis, "
            "and migration planning."
        ),
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def scenario_cmd(name: str, help_text: str) -> _Parser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("scenario", help="fixture name (or alias like cs1) or scenario file")
        return p

    scenario_cmd("analyze", "per-layer statuses and chain-level verdicts")
    scenario_cmd("peel", "depth-by-depth exposure trace")
    scenario_cmd("segments", "per-link posture along the physical path")
    scenario_cmd("endpoints", "per-node classical/HNDL exposure and backstops")
    plan = scenario_cmd("plan", "minimum-risk migration ordering")
    plan.add_argument(
        "--weights",
        default="0.4,0.4,0.2",
        metavar="CONF,AUTH,META",
        help="facet priorities summing to 1 (default: 0.4,0.4,0.2)",
    )
    plan.add_argument(
        "--split-facets",
        action="store_true",
        help="migrate confidentiality and authentication as separate actions",
    )
    cmp_parser = sub.add_parser(
        "compare", parents=[common], help="classical-vs-quantum inversion check"
    )
    cmp_parser.add_argument("scenario_a")
    cmp_parser.add_argument("scenario_b")
    reg = sub.add_parser(
        "registry", parents=[common], help="list or validate algorithm catalogs"
    )
    reg_sub = reg.add_subparsers(dest="registry_action", metavar="ACTION")
    reg_sub.add_parser("list", parents=[common], help="print the effective catalog")
    validate = reg_sub.add_parser(
        "validate", parents=[common], help="check a registry file"
    )
    validate.add_argument("file")
    fixtures = sub.add_parser(
        "fixtures", parents=[common], help="list bundled scenarios"
    )
    fixtures_sub = fixtures.add_subparsers(dest="fixtures_action", metavar="ACTION")
    fixtures_sub.add_parser("list", parents=[common], help="list bundled scenarios")
    return parser


_COMMANDS = {
    "analyze": cmd_analyze,
    "peel": cmd_peel,
    "segments": cmd_segments,
    "endpoints": cmd_endpoints,
    "plan": cmd_plan,
    "compare": cmd_compare,
    "registry": cmd_registry,
    "fixtures": cmd_fixtures,
}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    if getattr(args, "command", None) is None:
        parser.print_help(sys.stderr)
        return EXIT_ERROR
    args.format = getattr(args, "format", None) or TABLE
    if args.command == "registry" and not getattr(args, "registry_action", None):
        args.registry_action = "list"
    try:
        return _COMMANDS[args.command](args, out)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except (PostureError, OSError) as exc:
        print(f"pqposture: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
