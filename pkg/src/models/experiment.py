"""Modelo de un experimento ejecutado (una corrida o un barrido)."""

from __future__ import annotations

import json
from datetime import datetime

from src.extensions import db


class Experiment(db.Model):
    """Guarda la configuracion serializada y agrupa los registros del experimento."""

    __tablename__ = "experiments"

    id = db.Column(db.Integer, primary_key=True)
    network_path = db.Column(db.String(255), nullable=False)
    congestion_level = db.Column(db.String(20), nullable=False)
    f_c = db.Column(db.Float, nullable=False)
    repetitions = db.Column(db.Integer, nullable=False)
    base_seed = db.Column(db.Integer, nullable=False, default=0)
    # ExperimentConfig.to_dict() en JSON
    config_json = db.Column(db.Text, nullable=False)
    created_at = db.Column(db.DateTime, default=datetime.utcnow)

    records = db.relationship(
        "ExperimentRecord",
        back_populates="experiment",
        cascade="all, delete-orphan",
        order_by="ExperimentRecord.id",
    )

    def __repr__(self) -> str:
        """Devuelve una representacion legible del modelo."""
        return f"<Experiment id={self.id} network={self.network_path}>"

    @property
    def config(self) -> dict:
        return json.loads(self.config_json)

    def to_dict(self) -> dict:
        """Serializa la instancia para respuestas JSON."""
        return {
            "id": self.id,
            "network_path": self.network_path,
            "congestion_level": self.congestion_level,
            "f_c": self.f_c,
            "repetitions": self.repetitions,
            "base_seed": self.base_seed,
            "config": self.config,
            "record_count": len(self.records),
            "created_at": self.created_at.isoformat() if self.created_at else None,
        }
