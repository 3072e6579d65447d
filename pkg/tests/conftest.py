import json

import pytest
from fastapi.testclient import TestClient

from app.main import app
from app.models.scenario import Scenario


@pytest.fixture
def client():
    """Create a test client"""
    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture
def four_player() -> Scenario:
    """Two aligned holders, one opponent, one apathetic player"""
    return Scenario(
        players=("u1", "u2", "u3", "u4"),
        tokens={"u1": 4.0, "u2": 2.0, "u3": 1.0, "u4": 1.0},
        elections=("e1", "e2"),
        utilities={
            "u1": {"e1": 5.0, "e2": -2.0},
            "u2": {"e1": 1.0, "e2": -0.3},
            "u3": {"e1": -4.0, "e2": 2.0},
            "u4": {"e1": 0.05, "e2": 0.01},
        },
        epsilon=0.1,
    )


@pytest.fixture
def apathy_instance() -> Scenario:
    """Blocs {u1,u2}=3, {u3}=1 and an apathy bloc {u4}=4"""
    return Scenario(
        players=("u1", "u2", "u3", "u4"),
        tokens={"u1": 2.0, "u2": 1.0, "u3": 1.0, "u4": 4.0},
        elections=("e1",),
        utilities={
            "u1": {"e1": 1.0},
            "u2": {"e1": 2.0},
            "u3": {"e1": -1.0},
            "u4": {"e1": 0.0},
        },
        epsilon=0.0,
    )


@pytest.fixture
def delegation_instance() -> Scenario:
    """Inactive holders w1, w2 with 6 of 8 tokens and two small delegates with opposing views"""
    return Scenario(
        players=("d1", "d2", "w1", "w2"),
        tokens={"d1": 1.0, "d2": 1.0, "w1": 3.0, "w2": 3.0},
        elections=("e1",),
        utilities={
            "d1": {"e1": 1.0},
            "d2": {"e1": -1.0},
            "w1": {"e1": 0.0},
            "w2": {"e1": 0.0},
        },
        epsilon=0.0,
    )


def scenario_document(s: Scenario) -> dict:
    return {
        "players": [{"id": p, "tokens": s.tokens[p]} for p in s.players],
        "elections": list(s.elections),
        "utilities": {p: dict(row) for p, row in s.utilities.items()},
        "epsilon": s.epsilon,
        "q": s.q,
    }


@pytest.fixture
def write_json(tmp_path):
    """Write a JSON document into tmp_path and return its path as a string"""
    def _write(name: str, document) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)
    return _write
