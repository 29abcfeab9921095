"""Renderers: UCA worksheets, context-table CSV, traceability matrices, DOT graphs, JSON.

Every renderer is a pure function of the model and byte-deterministic, so
all outputs are golden-file testable.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict

from .analysis import ContextTable, ModelStats, stats
from .causal import ChecklistItem
from .model import (
    EdgeKind,
    EntityKind,
    GuideCategory,
    StpaModel,
)

SCHEMA_VERSION = 1

WORKSHEET_COLUMNS = [
    (GuideCategory.NOT_PROVIDED, "Not providing causes hazards"),
    (GuideCategory.PROVIDED_UNSAFE, "Providing causes hazards"),
    (GuideCategory.WRONG_TIMING, "Too early, too late, out of order"),
    (GuideCategory.WRONG_DURATION, "Stopped too soon, applied too long"),
]


def _md_row(cells: list[str]) -> str:
    return "| " + " | ".join(cells) + " |"


def _md_escape(text: str) -> str:
    return text.replace("|", "\\|").replace("\n", " ")


def render_worksheet(model: StpaModel, action: str) -> str:
    """Four-column guide-word worksheet for one control action, Markdown."""
    edge = model.edge_ids().get(action)
    title = edge.label if edge is not None else action
    columns: dict[GuideCategory, list[str]] = {cat: [] for cat, _ in WORKSHEET_COLUMNS}
    for uca in model.ucas_on(action):
        hazard_list = "[" + ", ".join(uca.hazards) + "]"
        columns[uca.guide.category].append(
            _md_escape(f"{uca.id}: {uca.description} {hazard_list}")
        )
    lines = [f"# Unsafe control actions: {title} ({action})", ""]
    if not any(columns.values()):
        lines.append("_No unsafe control actions declared for this action._")
        lines.append("")
        depth = 0
    else:
        depth = max(len(cells) for cells in columns.values())
    if depth:
        lines.append(_md_row([header for _, header in WORKSHEET_COLUMNS]))
        lines.append(_md_row(["---"] * len(WORKSHEET_COLUMNS)))
        for i in range(depth):
            row = []
            for cat, _ in WORKSHEET_COLUMNS:
                cells = columns[cat]
                row.append(cells[i] if i < len(cells) else "")
            lines.append(_md_row(row))
        lines.append("")
    return "\n".join(lines)


def render_context_csv(table: ContextTable) -> str:
    """Context table as CSV: variable columns, then one column per guide category."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = [v.label for v in table.variables] + [cat.value for cat, _ in WORKSHEET_COLUMNS]
    writer.writerow(header)
    for row in table.rows:
        record = [row.context.assignments[v.id] for v in table.variables]
        for cat, _ in WORKSHEET_COLUMNS:
            record.append(" ".join(row.ucas_for(cat)))
        writer.writerow(record)
    return buf.getvalue()


def _matrix(title: str, row_ids: list[str], col_ids: list[str], linked) -> list[str]:
    lines = [f"## {title}", ""]
    lines.append(_md_row([""] + col_ids))
    lines.append(_md_row(["---"] * (len(col_ids) + 1)))
    for row_id in row_ids:
        cells = ["x" if linked(row_id, col_id) else "" for col_id in col_ids]
        lines.append(_md_row([row_id] + cells))
    lines.append("")
    return lines


def render_trace_matrix(model: StpaModel) -> str:
    """Markdown traceability matrices across all four analysis steps."""
    hazards = {hz.id: hz for hz in model.hazards}
    lines = ["# Traceability", ""]
    lines += _matrix(
        "Hazards to losses",
        [hz.id for hz in model.hazards],
        [loss.id for loss in model.losses],
        lambda h, l: l in hazards[h].leads_to,
    )
    uca_hazards = {u.id: u.hazards for u in model.ucas}
    lines += _matrix(
        "Hazards to unsafe control actions",
        [hz.id for hz in model.hazards],
        [u.id for u in model.ucas],
        lambda h, u: h in uca_hazards[u],
    )
    cf_ucas = {cf.id: cf.ucas for cf in model.causal_factors}
    lines += _matrix(
        "Unsafe control actions to causal factors",
        [u.id for u in model.ucas],
        [cf.id for cf in model.causal_factors],
        lambda u, c: u in cf_ucas[c],
    )
    constraint_hazards = {sc.id: sc.mitigates for sc in model.constraints}
    lines += _matrix(
        "Hazards to constraints",
        [hz.id for hz in model.hazards],
        [sc.id for sc in model.constraints],
        lambda h, s: h in constraint_hazards[s],
    )
    return "\n".join(lines)


_NODE_STYLE = {
    EntityKind.CONTROLLER: 'shape=box',
    EntityKind.SENSOR: 'shape=box, style=rounded',
    EntityKind.ACTUATOR: 'shape=box, style=rounded',
    EntityKind.CONTROLLED_PROCESS: 'shape=box',
    EntityKind.ENVIRONMENT: 'shape=box, style=dashed',
}


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_graph(model: StpaModel) -> str:
    """Control structure as a DOT digraph; via elements become nodes on split edges."""
    lines = ["digraph control_structure {", "  rankdir=TB;"]
    for ent in model.entities:
        style = _NODE_STYLE[ent.kind]
        lines.append(f"  {_dot_quote(ent.id)} [label={_dot_quote(ent.label)}, {style}];")
    for edge in model.edges:
        style = "solid" if edge.kind is EdgeKind.CONTROL_ACTION else "dashed"
        chain = edge.chain()
        for i, (a, b) in enumerate(zip(chain, chain[1:])):
            attrs = [f"style={style}"]
            if i == 0 and edge.signals:
                attrs.append(f"label={_dot_quote(', '.join(edge.signals))}")
            lines.append(f"  {_dot_quote(a)} -> {_dot_quote(b)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def check_dot(text: str) -> list[str]:
    """Minimal DOT well-formedness check: balanced braces, edges over declared nodes.

    Returns a list of problems; empty means well-formed enough to hand to dot.
    """
    problems = []
    if text.count("{") != text.count("}"):
        problems.append("unbalanced braces")
    declared: set[str] = set()
    for raw in text.splitlines():
        line = raw.strip()
        if not line.startswith('"'):
            continue
        parts = line.split('"')
        if "->" in line:
            ids = [parts[1], parts[3]] if len(parts) > 3 else []
            for node in ids:
                if node not in declared:
                    problems.append(f"edge references undeclared node {node!r}")
        elif len(parts) > 1:
            declared.add(parts[1])
    return problems


def model_to_dict(model: StpaModel) -> dict:
    """JSON-ready mirror of the model, field names one to one."""

    def ctx(context):
        return dict(context.assignments)

    return {
        "stpa_schema": SCHEMA_VERSION,
        "losses": [{"id": d.id, "description": d.description} for d in model.losses],
        "hazards": [
            {"id": d.id, "description": d.description, "leads_to": list(d.leads_to)}
            for d in model.hazards
        ],
        "constraints": [
            {"id": d.id, "description": d.description, "mitigates": list(d.mitigates)}
            for d in model.constraints
        ],
        "entities": [
            {
                "id": d.id,
                "kind": d.kind.value,
                "label": d.label,
                "in_system_boundary": d.in_system_boundary,
            }
            for d in model.entities
        ],
        "edges": [
            {
                "id": d.id,
                "kind": d.kind.value,
                "label": d.label,
                "source": d.source,
                "target": d.target,
                "via": list(d.via),
                "signals": list(d.signals),
            }
            for d in model.edges
        ],
        "variables": [
            {"id": d.id, "owner": d.owner, "label": d.label, "values": list(d.values)}
            for d in model.variables
        ],
        "ucas": [
            {
                "id": d.id,
                "action": d.action,
                "source_controller": d.source_controller,
                "guide": {
                    "category": d.guide.category.value,
                    "qualifier": d.guide.qualifier.value if d.guide.qualifier else None,
                },
                "context": ctx(d.context),
                "hazards": list(d.hazards),
                "description": d.description,
            }
            for d in model.ucas
        ],
        "causal_factors": [
            {
                "id": d.id,
                "category": d.category.value,
                "located_at": d.located_at,
                "ucas": list(d.ucas),
                "description": d.description,
            }
            for d in model.causal_factors
        ],
        "controller_constraints": [
            {"id": d.id, "derived_from": d.derived_from, "description": d.description}
            for d in model.controller_constraints
        ],
    }


def render_json(model: StpaModel) -> str:
    return json.dumps(model_to_dict(model), ensure_ascii=False, indent=2) + "\n"


def render_checklist(items: list[ChecklistItem], uca_id: str) -> str:
    lines = [f"# Causal-factor checklist for {uca_id}", ""]
    for item in items:
        lines.append(f"- **{item.category.value}** at `{item.located_at}`: {item.prompt}")
    lines.append("")
    return "\n".join(lines)


def render_stats(model: StpaModel) -> str:
    s = stats(model)
    lines = ["# Model summary", ""]
    lines.append(f"- losses: {s.losses}")
    lines.append(f"- hazards: {s.hazards}")
    lines.append(f"- constraints: {s.constraints}")
    lines.append(f"- edges: {s.edges}")
    lines.append(f"- variables: {s.variables}")
    lines.append(f"- unsafe control actions: {s.ucas}")
    lines.append(f"- causal factors: {s.causal_factors}")
    lines.append(f"- controller constraints: {s.controller_constraints}")
    if s.entities_by_kind:
        lines.append("")
        lines.append("## Entities by kind")
        lines.append("")
        for kind, count in s.entities_by_kind.items():
            lines.append(f"- {kind}: {count}")
    if s.ucas_by_action_guide:
        lines.append("")
        lines.append("## Unsafe control actions by action and guide category")
        lines.append("")
        for action, per_guide in s.ucas_by_action_guide.items():
            counts = ", ".join(f"{k}={v}" for k, v in per_guide.items())
            lines.append(f"- {action}: {counts}")
    if s.ucas_per_hazard:
        lines.append("")
        lines.append("## Unsafe control actions per hazard")
        lines.append("")
        for hazard, count in s.ucas_per_hazard.items():
            lines.append(f"- {hazard}: {count}")
    if s.cfs_by_category:
        lines.append("")
        lines.append("## Causal factors by category")
        lines.append("")
        for category, count in s.cfs_by_category.items():
            lines.append(f"- {category}: {count}")
    lines.append("")
    return "\n".join(lines)


def stats_to_dict(s: ModelStats) -> dict:
    payload = asdict(s)
    return {"stpa_schema": SCHEMA_VERSION, **payload}
