"""Modelo de un ResultRecord persistido."""

from __future__ import annotations

import dataclasses

from src.extensions import db
from src.simulation.harness import ResultRecord


class ExperimentRecord(db.Model):
    """Un episodio (algoritmo x repeticion) de un experimento."""

    __tablename__ = "experiment_records"
    __table_args__ = (
        db.UniqueConstraint(
            "experiment_id",
            "repetition",
            "algorithm",
            "network",
            "congestion",
            "f_c",
            name="uq_experiment_episode",
        ),
    )

    id = db.Column(db.Integer, primary_key=True)
    experiment_id = db.Column(
        db.Integer, db.ForeignKey("experiments.id"), nullable=False, index=True
    )
    algorithm = db.Column(db.String(20), nullable=False)
    repetition = db.Column(db.Integer, nullable=False)
    network = db.Column(db.String(255), nullable=False)
    origin = db.Column(db.Integer, nullable=True)
    destination = db.Column(db.Integer, nullable=True)
    congestion = db.Column(db.String(20), nullable=False)
    f_c = db.Column(db.Float, nullable=False)
    modality_count = db.Column(db.Integer, nullable=False)
    performance_ratio = db.Column(db.Float, nullable=True)
    realized_total_time = db.Column(db.Float, nullable=True)
    realized_vehicle_time = db.Column(db.Float, nullable=True)
    oracle_time = db.Column(db.Float, nullable=True)
    regret_sum = db.Column(db.Float, nullable=True)
    wall_clock_micros = db.Column(db.BigInteger, nullable=False, default=0)
    failed = db.Column(db.Boolean, nullable=False, default=False)
    # Semilla de la instancia: entero sin signo de 32 bits
    seed = db.Column(db.BigInteger, nullable=False)
    failure_reason = db.Column(db.Text, nullable=True)

    experiment = db.relationship("Experiment", back_populates="records")

    def __repr__(self) -> str:
        return (
            f"<ExperimentRecord experiment={self.experiment_id} "
            f"rep={self.repetition} algorithm={self.algorithm}>"
        )

    @classmethod
    def from_result(cls, record: ResultRecord, experiment_id: int | None = None) -> ExperimentRecord:
        return cls(experiment_id=experiment_id, **dataclasses.asdict(record))

    def to_result(self) -> ResultRecord:
        return ResultRecord(
            **{field.name: getattr(self, field.name) for field in dataclasses.fields(ResultRecord)}
        )

    def to_dict(self) -> dict:
        """Serializa la instancia para respuestas JSON."""
        data = {"id": self.id, "experiment_id": self.experiment_id}
        data.update(dataclasses.asdict(self.to_result()))
        return data
