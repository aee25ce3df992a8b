"""Creencias de flujo por agente, actualizacion del sistema y generador de creencias."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping

import numpy as np

from src.errors import ValidationError
from src.simulation.costmodel import (
    PROBABILITY_TOLERANCE,
    BprParams,
    CostTable,
    FlowState,
    build_cost_table,
)
from src.simulation.network import TrafficNetwork

logger = logging.getLogger(__name__)

# Semiancho de la perturbacion: 1.5 veces la capacidad (flujo de congestion alta).
NOISE_CAPACITY_FACTOR = 1.5
NOISE_EXPONENT = 0.5


@dataclass(frozen=True)
class FlowBelief:
    """Distribucion discreta finita sobre el flujo existente de un arco."""

    support: tuple[float, ...]
    probs: tuple[float, ...]

    @classmethod
    def point_mass(cls, value: float) -> FlowBelief:
        return cls((float(value),), (1.0,))

    @property
    def is_point_mass(self) -> bool:
        return len(self.support) == 1 and self.probs == (1.0,)

    def validate(self, edge_id: int | None = None) -> None:
        where = "" if edge_id is None else f"Arco {edge_id}: "
        if len(self.support) != len(self.probs) or not self.support:
            raise ValidationError(f"{where}soporte y probabilidades de distinto largo.")
        if any(value < 0 or not math.isfinite(value) for value in self.support):
            raise ValidationError(f"{where}el soporte contiene flujos negativos.")
        if len(set(self.support)) != len(self.support):
            raise ValidationError(f"{where}el soporte tiene valores repetidos.")
        if any(prob < 0 for prob in self.probs):
            raise ValidationError(f"{where}probabilidad negativa.")
        if abs(math.fsum(self.probs) - 1.0) > PROBABILITY_TOLERANCE:
            raise ValidationError(
                f"{where}las probabilidades suman {math.fsum(self.probs)}, no 1."
            )

    def mean(self) -> float:
        return math.fsum(v * p for v, p in zip(self.support, self.probs))


@dataclass(frozen=True)
class BeliefVector:
    """Una creencia por arco, indexada por identificador de arco."""

    beliefs: tuple[FlowBelief, ...]
    _tables: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    @classmethod
    def point_masses(cls, flows: FlowState | np.ndarray) -> BeliefVector:
        values = flows.flows if isinstance(flows, FlowState) else np.asarray(flows, dtype=float)
        return cls(tuple(FlowBelief.point_mass(value) for value in values.tolist()))

    @property
    def per_edge(self) -> Mapping[int, FlowBelief]:
        return MappingProxyType(dict(enumerate(self.beliefs)))

    @property
    def is_point_mass(self) -> bool:
        return all(belief.is_point_mass for belief in self.beliefs)

    def point_values(self) -> np.ndarray:
        return np.array([belief.support[0] for belief in self.beliefs], dtype=float)

    def check_covers(self, net: TrafficNetwork) -> None:
        if len(self.beliefs) < net.edge_count:
            raise ValidationError(
                f"Falta la creencia del arco {len(self.beliefs)}: el vector cubre "
                f"{len(self.beliefs)} de {net.edge_count} arcos."
            )
        if len(self.beliefs) > net.edge_count:
            raise ValidationError(
                f"Creencia para el arco inexistente {net.edge_count}."
            )

    def cost_table(self, net: TrafficNetwork, f_c: float, p: BprParams) -> CostTable:
        """Tabla de costos memorizada por (red, f_c, parametros)."""
        key = (net, float(f_c), p)
        table = self._tables.get(key)
        if table is None:
            table = build_cost_table(net, self, f_c, p)
            self._tables[key] = table
        return table

    def to_dict(self) -> dict[str, Any]:
        return {
            "edges": [
                {"edge_id": edge_id, "support": list(b.support), "probs": list(b.probs)}
                for edge_id, b in enumerate(self.beliefs)
            ]
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> BeliefVector:
        rows = sorted(data["edges"], key=lambda row: int(row["edge_id"]))
        for position, row in enumerate(rows):
            if int(row["edge_id"]) != position:
                raise ValidationError(f"Falta la creencia del arco {position}.")
        return cls(
            tuple(
                FlowBelief(
                    tuple(float(v) for v in row["support"]),
                    tuple(float(p) for p in row["probs"]),
                )
                for row in rows
            )
        )


@dataclass(frozen=True)
class ModalityProfile:
    """Modalidad operativa: confiabilidad real y creencias privadas."""

    modality_id: int
    true_trust: float
    beliefs: BeliefVector

    def __post_init__(self) -> None:
        if not 0.0 <= self.true_trust <= 1.0:
            raise ValidationError(
                f"Modalidad {self.modality_id}: confiabilidad fuera de [0, 1]."
            )


def system_belief_update(current: BeliefVector | None, true_flows: FlowState) -> BeliefVector:
    """Creencias del sistema observadas por las RSU: masa puntual en el flujo real."""
    updated = BeliefVector.point_masses(true_flows)
    if current is not None and current == updated:
        # Se conserva la instancia para reutilizar sus tablas de costo.
        return current
    return updated


def generate_modality_belief(
    true_flows: FlowState,
    net: TrafficNetwork,
    true_trust: float,
    rng: np.random.Generator,
) -> BeliefVector:
    """Creencia de una modalidad segun su confiabilidad real.

    Con probabilidad ``true_trust`` el arco se estima exacto; si no, se sortea
    uniforme en [max(0, f - d), f + d] con d = 1.5 * c * (1 - t) ** 0.5.
    """
    if not 0.0 <= true_trust <= 1.0:
        raise ValidationError("La confiabilidad real debe estar en [0, 1].")
    true_flows.check_covers(net)
    flows = true_flows.flows
    half_width = NOISE_CAPACITY_FACTOR * net.capacity * (1.0 - true_trust) ** NOISE_EXPONENT
    exact = rng.random(len(flows)) < true_trust
    perturbed = rng.uniform(np.maximum(0.0, flows - half_width), flows + half_width)
    values = np.where(exact, flows, perturbed)
    return BeliefVector.point_masses(values)


def validate_belief_vector(bv: BeliefVector, net: TrafficNetwork) -> None:
    """Verifica cobertura y validez de cada creencia; nombra el arco culpable."""
    bv.check_covers(net)
    for edge_id, belief in enumerate(bv.beliefs):
        belief.validate(edge_id)


def dump_beliefs(bv: BeliefVector, path: str | Path) -> None:
    Path(path).write_text(json.dumps(bv.to_dict(), indent=2) + "\n", encoding="utf-8")


def load_beliefs(path: str | Path) -> BeliefVector:
    return BeliefVector.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
