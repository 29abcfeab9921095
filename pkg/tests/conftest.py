from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stpalint import (
    Context,
    Edge,
    EdgeKind,
    Entity,
    EntityKind,
    GuideCategory,
    GuideWord,
    Hazard,
    Loss,
    ProcessModelVariable,
    StpaModel,
    UnsafeControlAction,
    load_corpus,
)

REPO_ROOT = Path(__file__).resolve().parents[1]
GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def corpus():
    model, diags = load_corpus()
    assert not diags, [d.format() for d in diags]
    return model


def tiny_model() -> StpaModel:
    """Minimal resolvable model: one loop, one variable, one UCA."""
    m = StpaModel()
    m.losses.append(Loss("L-1", "loss of life"))
    m.hazards.append(Hazard("H-1", "unsafe distance", ["L-1"]))
    m.entities.append(Entity("C-1", EntityKind.CONTROLLER, "Controller"))
    m.entities.append(Entity("P-1", EntityKind.CONTROLLED_PROCESS, "Process"))
    m.entities.append(Entity("S-1", EntityKind.SENSOR, "Sensor"))
    m.entities.append(Entity("A-1", EntityKind.ACTUATOR, "Actuator"))
    m.edges.append(Edge("AC-1", EdgeKind.CONTROL_ACTION, "Act", "C-1", "P-1", ["A-1"]))
    m.edges.append(Edge("FB-1", EdgeKind.FEEDBACK, "Sense", "P-1", "C-1", ["S-1"]))
    m.variables.append(ProcessModelVariable("V-1", "C-1", "State", ["on", "off"]))
    m.ucas.append(
        UnsafeControlAction(
            "UCA-1",
            "AC-1",
            "C-1",
            GuideWord(GuideCategory.NOT_PROVIDED),
            Context({"V-1": "on"}),
            ["H-1"],
            "controller does not act while on",
        )
    )
    return m
