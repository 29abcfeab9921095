"""Path walks through the control structure and causal-factor checklists.

A safety constraint can be broken in two ways: the controller issues the
unsafe action itself (analyze the feedback path feeding its beliefs), or a
correct action is issued but not followed (analyze the control path down to
the process). Both walks drive the per-UCA checklist and validate where
declared causal factors may sit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import (
    CausalFactor,
    CfCategory,
    Diagnostic,
    EdgeKind,
    Entity,
    EntityKind,
    GuideCategory,
    Severity,
    StpaModel,
    UnsafeControlAction,
    FALLBACK_SPAN,
)


class PathDirection(Enum):
    FEEDBACK_PATH = "feedback"
    CONTROL_PATH = "control"


@dataclass
class PathWalk:
    uca: str
    direction: PathDirection
    elements: list[str]  # entity ids, origin first


@dataclass
class ChecklistItem:
    category: CfCategory
    located_at: str
    prompt: str


_PROMPTS: dict[CfCategory, str] = {
    CfCategory.MENTAL_MODEL_CONTENT: (
        "Does the process model of {label} contain missing or wrong beliefs about "
        "the controlled process, the environment, or the actuation chain?"
    ),
    CfCategory.MENTAL_MODEL_UPDATE: (
        "Is the process model of {label} updated too slowly, incompletely, or from "
        "an inadequate representation of the feedback?"
    ),
    CfCategory.CONTROL_ALGORITHM: (
        "Could the control algorithm of {label} (training, routine, stored rules) "
        "produce a wrong or missing action in this context?"
    ),
    CfCategory.SENSING_LIMITATION: (
        "Can {label} fail to capture the relevant state (field of view, occlusion, "
        "lighting, measurement range)?"
    ),
    CfCategory.SENSOR_OPERATION: (
        "Can {label} operate inadequately (hardware or power failure, connection "
        "errors, discretization or calibration inaccuracies)?"
    ),
    CfCategory.TRANSMISSION_LOSS: (
        "Can {label} drop, corrupt, or reorder the transmitted information?"
    ),
    CfCategory.PRE_PROCESSING: (
        "Can {label} distort the information while pre-processing it (wrong "
        "parameters, wrong internal beliefs, hardware failure)?"
    ),
    CfCategory.PRESENTATION: (
        "Can {label} mask or degrade the presented information (failure, dropped "
        "frames, low resolution, reflections)?"
    ),
    CfCategory.ACTUATION_FAILURE: (
        "Can {label} fail to execute or distort the commanded action?"
    ),
    CfCategory.CONTROL_PATH_TRANSMISSION: (
        "Can {label} delay, drop, or corrupt the command on its way to the process?"
    ),
    CfCategory.PROCESS_DISTURBANCE: (
        "Can disturbances at {label} change the outcome despite a correct command?"
    ),
    CfCategory.TIMING_DELAY: (
        "Can processing or transmission delays at {label} make the action come too "
        "early or too late?"
    ),
}


def _is_network(entity: Entity) -> bool:
    # Network legs are ordinary sensors/actuators structurally; recognized by name.
    return "network" in entity.id.lower() or "network" in entity.label.lower()


def _feedback_predecessors(model: StpaModel) -> dict[str, list[str]]:
    preds: dict[str, list[str]] = {}
    for edge in model.edges:
        if edge.kind is not EdgeKind.FEEDBACK:
            continue
        chain = edge.chain()
        for a, b in zip(chain, chain[1:]):
            bucket = preds.setdefault(b, [])
            if a not in bucket:
                bucket.append(a)
    return preds


def _control_successors(model: StpaModel) -> dict[str, list[str]]:
    succs: dict[str, list[str]] = {}
    for edge in model.edges:
        if edge.kind is not EdgeKind.CONTROL_ACTION:
            continue
        chain = edge.chain()
        for a, b in zip(chain, chain[1:]):
            bucket = succs.setdefault(a, [])
            if b not in bucket:
                bucket.append(b)
    return succs


def walk_paths(
    model: StpaModel, uca: UnsafeControlAction
) -> tuple[list[PathWalk], list[Diagnostic]]:
    """Feedback walks into the UCA's controller and control walks along its action.

    Feedback walks run origin-first (an environment entity is a legal origin);
    control walks start at the controller, follow the UCA's own action edge,
    and continue until a controlled process or a dead end. Cycles are cut with
    a per-path visited set.
    """
    diags: list[Diagnostic] = []
    entities = model.entity_ids()
    controller = uca.source_controller

    preds = _feedback_predecessors(model)
    feedback_walks: list[list[str]] = []

    def extend_back(path: list[str]) -> None:
        # path is reversed: controller first
        node = path[-1]
        incoming = [p for p in preds.get(node, []) if p not in path]
        if not incoming:
            feedback_walks.append(list(reversed(path)))
            return
        for pred in incoming:
            extend_back(path + [pred])

    if controller in preds:
        extend_back([controller])
    else:
        span = uca.span if uca.span is not None else FALLBACK_SPAN
        diags.append(
            Diagnostic(
                Severity.WARNING,
                "causal/open-loop",
                f"controller {controller} is open-loop: no feedback reaches it",
                span,
            )
        )

    succs = _control_successors(model)
    control_walks: list[list[str]] = []
    action_edge = model.edge_ids().get(uca.action)

    def extend_forward(path: list[str]) -> None:
        node = path[-1]
        ent = entities.get(node)
        if ent is not None and ent.kind is EntityKind.CONTROLLED_PROCESS:
            control_walks.append(path)
            return
        outgoing = [s for s in succs.get(node, []) if s not in path]
        if not outgoing:
            control_walks.append(path)
            return
        for succ in outgoing:
            extend_forward(path + [succ])

    if action_edge is not None:
        chain = action_edge.chain()
        # walk the action's own chain first, then continue from its target
        ent = entities.get(chain[-1])
        if ent is not None and ent.kind is EntityKind.CONTROLLED_PROCESS:
            control_walks.append(chain)
        else:
            for succ in [s for s in succs.get(chain[-1], []) if s not in chain]:
                extend_forward(chain + [succ])
            if not control_walks:
                control_walks.append(chain)

    walks = [PathWalk(uca.id, PathDirection.FEEDBACK_PATH, w) for w in feedback_walks]
    walks.extend(PathWalk(uca.id, PathDirection.CONTROL_PATH, w) for w in control_walks)
    return walks, diags


def checklist(model: StpaModel, uca: UnsafeControlAction) -> list[ChecklistItem]:
    """Deterministic causal-factor prompts covering every walk element.

    Order: controller beliefs first, then the feedback walks element by
    element, the controller's algorithm, timing prompts for wrong-timing
    UCAs, and finally the control walks.
    """
    walks, _ = walk_paths(model, uca)
    entities = model.entity_ids()
    controller = uca.source_controller
    controller_label = entities[controller].label if controller in entities else controller

    items: list[ChecklistItem] = []
    emitted: set[tuple[CfCategory, str]] = set()

    def emit(category: CfCategory, entity_id: str) -> None:
        if (category, entity_id) in emitted:
            return
        emitted.add((category, entity_id))
        label = entities[entity_id].label if entity_id in entities else entity_id
        items.append(ChecklistItem(category, entity_id, _PROMPTS[category].format(label=label)))

    emit(CfCategory.MENTAL_MODEL_CONTENT, controller)
    emit(CfCategory.MENTAL_MODEL_UPDATE, controller)

    feedback_walks = [w for w in walks if w.direction is PathDirection.FEEDBACK_PATH]
    control_walks = [w for w in walks if w.direction is PathDirection.CONTROL_PATH]

    for walk in feedback_walks:
        for idx, entity_id in enumerate(walk.elements):
            if entity_id == controller:
                continue
            ent = entities.get(entity_id)
            if ent is None:
                continue
            if ent.kind in (EntityKind.ENVIRONMENT, EntityKind.CONTROLLED_PROCESS):
                emit(CfCategory.PROCESS_DISTURBANCE, entity_id)
            elif ent.kind is EntityKind.CONTROLLER:
                emit(CfCategory.PRE_PROCESSING, entity_id)
            elif _is_network(ent):
                emit(CfCategory.TRANSMISSION_LOSS, entity_id)
            elif idx + 1 < len(walk.elements) and walk.elements[idx + 1] == controller:
                # the element presenting directly to the controller
                emit(CfCategory.PRESENTATION, entity_id)
            else:
                emit(CfCategory.SENSING_LIMITATION, entity_id)
                emit(CfCategory.SENSOR_OPERATION, entity_id)

    emit(CfCategory.CONTROL_ALGORITHM, controller)

    if uca.guide.category is GuideCategory.WRONG_TIMING:
        for walk in feedback_walks:
            for entity_id in walk.elements:
                ent = entities.get(entity_id)
                if ent is not None and ent.kind is EntityKind.ENVIRONMENT:
                    continue  # reality itself carries no processing delay
                emit(CfCategory.TIMING_DELAY, entity_id)

    for walk in control_walks:
        for entity_id in walk.elements:
            if entity_id == controller:
                continue
            ent = entities.get(entity_id)
            if ent is None:
                continue
            if ent.kind in (EntityKind.ENVIRONMENT, EntityKind.CONTROLLED_PROCESS):
                emit(CfCategory.PROCESS_DISTURBANCE, entity_id)
            elif ent.kind is EntityKind.CONTROLLER:
                emit(CfCategory.PRE_PROCESSING, entity_id)
            elif _is_network(ent):
                emit(CfCategory.CONTROL_PATH_TRANSMISSION, entity_id)
            else:
                emit(CfCategory.ACTUATION_FAILURE, entity_id)

    return items


def _on_path_ids(model: StpaModel, uca: UnsafeControlAction) -> set[str]:
    walks, _ = walk_paths(model, uca)
    ids = {uca.source_controller}
    for walk in walks:
        ids.update(walk.elements)
    return ids


def _normalize(text: str) -> str:
    return " ".join("".join(ch for ch in text.lower() if ch.isalnum() or ch.isspace()).split())


def validate_cfs(model: StpaModel) -> list[Diagnostic]:
    """Check declared causal factors against the walk structure.

    Errors for factors located off every walk of their UCAs, warnings for
    likely duplicates, and one info per checklist category a UCA leaves
    unaddressed.
    """
    diags: list[Diagnostic] = []
    ucas_by_id = model.uca_ids()
    edges = model.edge_ids()

    def span(decl):
        return decl.span if decl.span is not None else FALLBACK_SPAN

    on_path_cache: dict[str, set[str]] = {}

    def on_path(uca_id: str) -> set[str]:
        if uca_id not in on_path_cache:
            on_path_cache[uca_id] = _on_path_ids(model, ucas_by_id[uca_id])
        return on_path_cache[uca_id]

    for cf in model.causal_factors:
        cited = [ref for ref in cf.ucas if ref in ucas_by_id]
        if not cited:
            continue
        reachable: set[str] = set()
        for ref in cited:
            reachable.update(on_path(ref))
        located = cf.located_at
        edge = edges.get(located)
        ok = located in reachable or (
            edge is not None and edge.source in reachable and edge.target in reachable
        )
        if not ok:
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    "cf/off-path",
                    f"causal factor off-path: {cf.id} is located at {located}, "
                    f"which is on no walk of its ucas",
                    span(cf),
                )
            )

    groups: dict[tuple[CfCategory, str, str], list[CausalFactor]] = {}
    for cf in model.causal_factors:
        groups.setdefault((cf.category, cf.located_at, _normalize(cf.description)), []).append(cf)
    for (_, located, _), members in groups.items():
        for dup in members[1:]:
            first = members[0]
            diags.append(
                Diagnostic(
                    Severity.WARNING,
                    "cf/possible-duplicate",
                    f"causal factor {dup.id} duplicates {first.id} "
                    f"(same category, location {located}, near-identical description)",
                    span(dup),
                    [("first declared here", span(first))],
                )
            )

    declared: dict[str, set[CfCategory]] = {}
    for cf in model.causal_factors:
        for ref in cf.ucas:
            declared.setdefault(ref, set()).add(cf.category)
    for uca in model.ucas:
        expected = []
        for item in checklist(model, uca):
            if item.category not in expected:
                expected.append(item.category)
        missing = [c for c in expected if c not in declared.get(uca.id, set())]
        for category in missing:
            diags.append(
                Diagnostic(
                    Severity.INFO,
                    "cf/unaddressed-category",
                    f"uca {uca.id} has no causal factor in category {category.value}",
                    span(uca),
                )
            )
    return diags
