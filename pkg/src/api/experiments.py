"""Endpoints para lanzar experimentos y consultar sus resultados."""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

from flask import Blueprint, current_app, jsonify, request
from sqlalchemy.exc import IntegrityError

from src.extensions import db
from src.models.experiment import Experiment
from src.models.experiment_record import ExperimentRecord
from src.simulation.harness import ExperimentConfig, ResultRecord, aggregate, run_experiment

bp = Blueprint("experiments", __name__, url_prefix="/experiments")


class ExperimentService:
    """Orquesta la logica de negocio para el recurso Experiment."""

    def __init__(self):
        self.db_session = db.session
        self.model = Experiment

    def list_experiments(self) -> list[dict]:
        """Retorna todos los experimentos, el mas reciente primero."""
        experiments = self.model.query.order_by(self.model.id.desc()).all()
        return [experiment.to_dict() for experiment in experiments]

    def _resolve_network(self, name: str) -> str:
        # Solo se leen redes dentro del directorio configurado.
        base = Path(current_app.config["NETWORKS_DIR"]).resolve()
        path = (base / name).resolve()
        if not path.is_relative_to(base) or not path.is_file():
            raise ValueError(f"Red desconocida: {name!r}.")
        return str(path)

    def create_experiment(self, payload: dict) -> dict:
        """Corre un experimento de forma sincronica y lo guarda."""
        payload = dict(payload)
        name = payload.pop("network", None) or payload.pop("network_path", None)
        if not isinstance(name, str) or not name:
            raise ValueError("El campo 'network' es obligatorio.")
        payload["network_path"] = self._resolve_network(name)
        payload["workers"] = 1
        cfg = ExperimentConfig.from_mapping(payload)
        limit = current_app.config["API_MAX_REPETITIONS"]
        if cfg.repetitions > limit:
            raise ValueError(f"Maximo {limit} repeticiones por request; use la CLI.")
        current_app.logger.info(
            "experiment requested network=%s reps=%d", cfg.network_path, cfg.repetitions
        )
        return self.save_experiment(cfg, run_experiment(cfg))

    def save_experiment(self, cfg: ExperimentConfig, records: list[ResultRecord]) -> dict:
        """Persiste la configuracion y sus registros en una sola transaccion."""
        experiment = self.model(
            network_path=cfg.network_path,
            congestion_level=cfg.congestion_level,
            f_c=cfg.f_c,
            repetitions=cfg.repetitions,
            base_seed=cfg.base_seed,
            config_json=json.dumps(cfg.to_dict()),
        )
        experiment.records = [ExperimentRecord.from_result(record) for record in records]
        self.db_session.add(experiment)
        try:
            self.db_session.commit()
            return experiment.to_dict()
        except IntegrityError:
            self.db_session.rollback()
            raise ValueError("Registros duplicados en el experimento.")
        except Exception:
            self.db_session.rollback()
            raise

    def get_experiment(self, experiment_id: int) -> Experiment | None:
        return self.db_session.get(self.model, experiment_id)

    def list_records(self, experiment_id: int) -> list[dict] | None:
        experiment = self.get_experiment(experiment_id)
        if not experiment:
            return None
        return [record.to_dict() for record in experiment.records]

    def summarize(self, experiment_id: int) -> list[dict] | None:
        """Agrega los registros guardados por celda (algoritmo, congestion, f_c)."""
        experiment = self.get_experiment(experiment_id)
        if not experiment:
            return None
        if not experiment.records:
            return []
        rows = aggregate([record.to_result() for record in experiment.records])
        return [dict(dataclasses.asdict(row), missing=row.missing) for row in rows]

    def delete_experiment(self, experiment_id: int) -> bool:
        experiment = self.get_experiment(experiment_id)
        if not experiment:
            return False
        try:
            self.db_session.delete(experiment)
            self.db_session.commit()
            return True
        except Exception:
            self.db_session.rollback()
            raise


service = ExperimentService()


@bp.get("/")
def list_experiments():
    """Lista los experimentos guardados."""
    try:
        return jsonify(service.list_experiments()), 200
    except Exception as e:
        return jsonify({"error": f"Error al listar experimentos: {e}"}), 500


@bp.post("/")
def create_experiment():
    """Corre un experimento con los parametros enviados."""
    payload = request.get_json(silent=True) or {}
    try:
        experiment = service.create_experiment(payload)
        return jsonify(experiment), 201
    except ValueError as ve:
        return jsonify({"error": str(ve)}), 400
    except Exception as e:
        current_app.logger.exception("experiment failed")
        return jsonify({"error": f"Error interno: {e}"}), 500


@bp.get("/<int:experiment_id>")
def retrieve_experiment(experiment_id: int):
    experiment = service.get_experiment(experiment_id)
    if not experiment:
        return jsonify({"error": "Experimento no encontrado"}), 404
    return jsonify(experiment.to_dict()), 200


@bp.get("/<int:experiment_id>/records")
def list_records(experiment_id: int):
    records = service.list_records(experiment_id)
    if records is None:
        return jsonify({"error": "Experimento no encontrado"}), 404
    return jsonify(records), 200


@bp.get("/<int:experiment_id>/summary")
def summarize_experiment(experiment_id: int):
    """Devuelve la tabla agregada de razones de desempeno."""
    summary = service.summarize(experiment_id)
    if summary is None:
        return jsonify({"error": "Experimento no encontrado"}), 404
    return jsonify(summary), 200


@bp.delete("/<int:experiment_id>")
def delete_experiment(experiment_id: int):
    try:
        if not service.delete_experiment(experiment_id):
            return jsonify({"error": "Experimento no encontrado"}), 404
        return "", 204
    except Exception as e:
        return jsonify({"error": f"Error interno: {e}"}), 500
