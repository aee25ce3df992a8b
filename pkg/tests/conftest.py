"""Fixtures compartidas: app de Flask en memoria y redes chicas."""

from __future__ import annotations

from pathlib import Path

import pytest

from src import create_app
from src.config import TestingConfig
from src.extensions import db
from src.simulation.fixtures import load_two_path_example
from src.simulation.network import TrafficNetwork, serialize_tntp

ROOT = Path(__file__).resolve().parent.parent
SIOUX_FALLS = ROOT / "data" / "SiouxFalls_net.tntp"
TWO_PATH = ROOT / "src" / "simulation" / "data" / "two_path_net.tntp"


def make_grid(side: int = 3) -> TrafficNetwork:
    """Grilla bidireccional con tiempos y capacidades variados pero deterministas."""
    rows = []
    for r in range(side):
        for c in range(side):
            node = r * side + c + 1
            for dr, dc in ((0, 1), (1, 0), (0, -1), (-1, 0)):
                rr, cc = r + dr, c + dc
                if 0 <= rr < side and 0 <= cc < side:
                    other = rr * side + cc + 1
                    free_flow = 1.0 + (node * 7 + other * 3) % 5
                    capacity = 10.0 + ((node * 5 + other) % 4) * 5.0
                    rows.append((node, other, free_flow, capacity))
    return TrafficNetwork.from_edges(rows, node_count=side * side)


@pytest.fixture()
def app(tmp_path):
    class Config(TestingConfig):
        NETWORKS_DIR = str(tmp_path)

    app = create_app(Config)
    yield app
    with app.app_context():
        db.session.remove()
        db.drop_all()


@pytest.fixture()
def client(app):
    return app.test_client()


@pytest.fixture()
def two_path():
    return load_two_path_example()


@pytest.fixture(scope="session")
def grid_net() -> TrafficNetwork:
    return make_grid()


@pytest.fixture()
def grid_file(tmp_path, grid_net) -> Path:
    path = tmp_path / "grid_net.tntp"
    path.write_text(serialize_tntp(grid_net), encoding="utf-8")
    return path


@pytest.fixture()
def diamond() -> TrafficNetwork:
    # 1 -> 2 -> 4 y 1 -> 3 -> 4, todo igual.
    return TrafficNetwork.from_edges(
        [(1, 2, 1.0, 10.0), (2, 4, 1.0, 10.0), (1, 3, 1.0, 10.0), (3, 4, 1.0, 10.0)]
    )
