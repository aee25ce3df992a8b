import pytest

from .conftest import TWO_PATH


@pytest.fixture()
def network_name(app, grid_file):
    # grid_file vive en tmp_path, que es el NETWORKS_DIR de la app de prueba.
    return grid_file.name


def test_healthcheck(client):
    response = client.get("/health/")
    assert response.status_code == 200
    assert response.get_json() == {"status": "ok", "database": "ok"}


def test_validate_network(client):
    response = client.post("/networks/validate", data=TWO_PATH.read_text(encoding="utf-8"))
    assert response.status_code == 200
    assert response.get_json() == {"nodes": 6, "edges": 6, "commodities": 11, "max_path_edges": 5}


def test_validate_rejects_bad_input(client):
    assert client.post("/networks/validate", data="").status_code == 400
    response = client.post("/networks/validate", data="<NUMBER OF NODES> 2\n1 2\n")
    assert response.status_code == 400
    assert "linea 2" in response.get_json()["error"]


def test_example_trace(client):
    response = client.get("/networks/example")
    assert response.status_code == 200
    body = response.get_json()
    assert body["steps"][0]["regret"] == 5.0
    assert body["steps"][0]["strategy_after"] == {"1": 1.0, "2": 0.0}
    assert body["realized_total_time"] == 83.0


def test_experiment_lifecycle(client, network_name):
    payload = {
        "network": network_name,
        "reps": 2,
        "algos": "tacts,sc,oracle",
        "modalities": "2:3",
        "max-path-edges": 4,
    }
    response = client.post("/experiments/", json=payload)
    assert response.status_code == 201, response.get_json()
    experiment = response.get_json()
    assert experiment["record_count"] == 6
    assert experiment["config"]["algorithms"] == ["tacts", "sc", "oracle"]

    listed = client.get("/experiments/").get_json()
    assert [e["id"] for e in listed] == [experiment["id"]]

    records = client.get(f"/experiments/{experiment['id']}/records").get_json()
    assert len(records) == 6
    assert {r["algorithm"] for r in records} == {"tacts", "sc", "oracle"}
    assert {r["network"] for r in records} == {"grid_net"}
    assert all(r["realized_vehicle_time"] > 0 for r in records if not r["failed"])

    summary = client.get(f"/experiments/{experiment['id']}/summary").get_json()
    assert [row["algorithm"] for row in summary] == ["tacts", "sc", "oracle"]
    assert all(row["mean_ratio"] >= 1.0 for row in summary)

    assert client.delete(f"/experiments/{experiment['id']}").status_code == 204
    assert client.get(f"/experiments/{experiment['id']}").status_code == 404


def test_experiment_rejects_bad_payloads(client, network_name):
    assert client.post("/experiments/", json={}).status_code == 400
    too_many = {"network": network_name, "reps": 10}
    assert client.post("/experiments/", json=too_many).status_code == 400
    outside = {"network": "../secret.tntp", "reps": 1}
    assert client.post("/experiments/", json=outside).status_code == 400
    bad_algo = {"network": network_name, "algos": "magic"}
    assert client.post("/experiments/", json=bad_algo).status_code == 400


@pytest.mark.parametrize(
    "payload",
    [{"network": None}, {"network": ""}, {"network_path": None}, {"network": 7}, {"reps": 1}],
)
def test_experiment_requires_network_name(client, payload):
    response = client.post("/experiments/", json=payload)
    assert response.status_code == 400
    assert "network" in response.get_json()["error"]


def test_missing_experiment(client):
    assert client.get("/experiments/99").status_code == 404
    assert client.get("/experiments/99/records").status_code == 404
    assert client.get("/experiments/99/summary").status_code == 404
    assert client.delete("/experiments/99").status_code == 404
