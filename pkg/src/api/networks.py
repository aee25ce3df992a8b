"""Endpoints para validar redes TNTP y consultar el ejemplo de dos caminos."""

from __future__ import annotations

from flask import Blueprint, jsonify, request

from src.simulation.fixtures import run_two_path_example
from src.simulation.network import DEFAULT_MAX_PATH_EDGES, enumerate_commodities, parse_tntp

bp = Blueprint("networks", __name__, url_prefix="/networks")


class NetworkService:
    """Lectura y resumen de redes enviadas como texto TNTP."""

    def describe(self, text: str, max_path_edges: int = DEFAULT_MAX_PATH_EDGES) -> dict:
        if not text.strip():
            raise ValueError("El cuerpo debe contener una red TNTP.")
        net = parse_tntp(text)
        return {
            "nodes": len(net.nodes),
            "edges": net.edge_count,
            "commodities": len(enumerate_commodities(net, max_path_edges)),
            "max_path_edges": max_path_edges,
        }

    def example_trace(self) -> dict:
        return run_two_path_example().to_dict()


service = NetworkService()


@bp.post("/validate")
def validate_network():
    """Valida una red TNTP enviada en el cuerpo del request."""
    text = request.get_data(as_text=True)
    max_path_edges = request.args.get("max_path_edges", DEFAULT_MAX_PATH_EDGES, type=int)
    try:
        return jsonify(service.describe(text, max_path_edges)), 200
    except ValueError as ve:
        return jsonify({"error": str(ve)}), 400
    except Exception as e:
        return jsonify({"error": f"Error interno: {e}"}), 500


@bp.get("/example")
def example_trace():
    """Traza paso a paso del ejemplo de dos caminos."""
    try:
        return jsonify(service.example_trace()), 200
    except Exception as e:
        return jsonify({"error": f"Error interno: {e}"}), 500
