import pytest

from tests.conftest import scenario_document
from tests.test_simulation import basic_script


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "healthy", "service": "vbe-lab"}


def test_compute_vbe(client, four_player):
    response = client.post("/vbe/compute", json={"scenario": scenario_document(four_player)})
    assert response.status_code == 200
    data = response.json()
    assert data["bits"] == pytest.approx(0.415, abs=1e-3)
    assert data["partition"]["apathy_bloc"] == ["u4"]


def test_neg_sum_sq_needs_solo_clustering(client, four_player):
    response = client.post(
        "/vbe/compute",
        json={"scenario": scenario_document(four_player), "entropy": "neg_sum_sq"},
    )
    assert response.status_code == 422
    assert response.json()["code"] == "entropy-requires-solo"


def test_inconsistent_scenario_is_rejected(client):
    document = {
        "players": [{"id": "a", "tokens": 1.0}, {"id": "b", "tokens": 1.0}],
        "elections": ["e1"],
        "utilities": {"a": {"e1": 1}},
    }
    response = client.post("/vbe/compute", json={"scenario": document})
    assert response.status_code == 422
    assert response.json()["code"] == "invalid-input"


def test_unknown_field_is_a_validation_error(client, four_player):
    response = client.post("/vbe/compute", json={"scenario": scenario_document(four_player), "colour": "red"})
    assert response.status_code == 422
    assert response.json()["detail"] == "Validation error"


def test_estimate(client):
    payload = {
        "votes": [
            {"voter": "A", "election": "e1", "vote": "true"},
            {"voter": "B", "election": "e1", "vote": "true"},
            {"voter": "C", "election": "e1", "vote": "false"},
        ],
        "balances": {"A": 4, "B": 2, "C": 2},
    }
    response = client.post("/vbe/estimate", json=payload)
    assert response.status_code == 200
    assert response.json()["bits"] == pytest.approx(0.415, abs=1e-3)


def test_whale_example(client):
    assert client.get("/vbe/example/whale", params={"whale_share": 0.124}).json()["passed"] is True


def test_flip_cost(client):
    response = client.post("/bribery/flip-cost", json={"utility": -3, "epsilon": 0.1})
    assert response.status_code == 200
    assert response.json()["cost"] == pytest.approx(6.1)


def test_pivotal_requires_odd_electorate(client):
    response = client.post("/bribery/pivotal", json={"n": 4, "utility": 1, "epsilon": 0.1})
    assert response.status_code == 422


def test_theorem_check(client, apathy_instance):
    payload = {
        "scenario": scenario_document(apathy_instance),
        "transform": {"kind": "apathy", "players": ["u1"]},
        "theorem": "3",
    }
    data = client.post("/transforms/check", json=payload).json()
    assert data["precondition_held"] and data["claim_held"]
    assert data["counterexample"] is False


def test_theorem_sweep(client):
    data = client.get("/transforms/sweep/2", params={"count": 20}).json()
    assert data["failures"] == 0


def test_darkdao_run(client):
    response = client.post("/darkdao/run", params={"seed": 3}, json=basic_script())
    assert response.status_code == 200
    data = response.json()
    assert data["report"]["passed"]
    assert data["public"]
    assert any(e.get("type") == "enrolled" for e in data["confidential"])


def test_enumerate(client):
    response = client.get("/darkdao/enumerate", params={"policy": "fifo", "budget": 3, "victims": 4, "lockup": 20})
    assert response.status_code == 200
    assert response.json()["identified_count"] == 0


def test_duplicate_player_ids_are_a_validation_error(client):
    document = {
        "players": [{"id": "a", "tokens": 1.0}, {"id": "a", "tokens": 2.0}],
        "elections": ["e1"],
        "utilities": {"a": {"e1": 1}},
    }
    response = client.post("/vbe/compute", json={"scenario": document})
    assert response.status_code == 422
    assert response.json()["detail"] == "Validation error"


def test_applied_transformation_round_trips_as_a_scenario(client, delegation_instance):
    payload = {
        "scenario": scenario_document(delegation_instance),
        "transform": {"kind": "delegation", "assignment": {"w1": "d1", "w2": "d2"}},
    }
    applied = client.post("/transforms/apply", json=payload).json()["scenario"]
    response = client.post("/vbe/compute", json={"scenario": applied})
    assert response.status_code == 200
    assert response.json()["bits"] == pytest.approx(1.0)
