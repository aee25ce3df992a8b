"""Funcion BPR, tiempos esperados bajo creencias y agregados de tiempo de red."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Sequence

import numpy as np

from src.errors import DomainError, ValidationError
from src.simulation.network import EdgeRecord, TrafficNetwork, path_nodes

if TYPE_CHECKING:
    from src.simulation.beliefs import BeliefVector, FlowBelief

PROBABILITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class BprParams:
    """Coeficientes de forma de la funcion BPR."""

    lam: float = 0.15
    beta: float = 4.0

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise DomainError("lambda debe ser no negativo.")
        if self.beta < 1:
            raise DomainError("beta debe ser al menos 1.")


@dataclass(frozen=True, eq=False)
class FlowState:
    """Flujo existente f_e por arco, indexado por identificador de arco."""

    flows: np.ndarray

    def __post_init__(self) -> None:
        flows = np.array(self.flows, dtype=float)
        if flows.ndim != 1:
            raise ValidationError("El vector de flujos debe ser unidimensional.")
        if np.any(flows < 0) or not np.all(np.isfinite(flows)):
            raise ValidationError("Los flujos deben ser finitos y no negativos.")
        flows.setflags(write=False)
        object.__setattr__(self, "flows", flows)

    @classmethod
    def scaled_capacity(cls, net: TrafficNetwork, multiplier: float) -> FlowState:
        """Flujo igual a la capacidad escalada (niveles de congestion)."""
        return cls(net.capacity * multiplier)

    def __getitem__(self, edge_id: int) -> float:
        return float(self.flows[edge_id])

    def __len__(self) -> int:
        return len(self.flows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FlowState):
            return NotImplemented
        return np.array_equal(self.flows, other.flows)

    def __hash__(self) -> int:
        return hash(self.flows.tobytes())

    def check_covers(self, net: TrafficNetwork) -> None:
        if len(self.flows) != net.edge_count:
            raise ValidationError(
                f"El estado de flujo tiene {len(self.flows)} entradas; la red tiene "
                f"{net.edge_count} arcos."
            )


def bpr_time(t_ff, flow, capacity, p: BprParams = BprParams()):
    """t_ff * (1 + lambda * (flow / capacity) ** beta); acepta escalares o arreglos."""
    if np.any(np.asarray(capacity) <= 0):
        raise DomainError("La capacidad debe ser positiva.")
    result = t_ff * (1.0 + p.lam * (np.asarray(flow, dtype=float) / capacity) ** p.beta)
    return float(result) if np.ndim(result) == 0 else result


def expected_edge_time(
    belief: FlowBelief,
    edge: EdgeRecord,
    added_flow: float = 0.0,
    p: BprParams = BprParams(),
) -> float:
    """Tiempo esperado del arco bajo una creencia (f_c sumado al flujo creido)."""
    belief.validate(edge.edge_id)
    if added_flow < 0:
        raise DomainError("El flujo agregado debe ser no negativo.")
    support = np.asarray(belief.support, dtype=float)
    times = bpr_time(edge.free_flow_time, support + added_flow, edge.capacity, p)
    return float(np.dot(np.atleast_1d(times), np.asarray(belief.probs, dtype=float)))


@dataclass(frozen=True, eq=False)
class CostTable:
    """Tiempos por arco bajo un vector de creencias, con y sin el flujo del vehiculo.

    ``loaded[e]`` es el tiempo esperado si el vehiculo recorre ``e`` y ``unloaded[e]``
    el tiempo esperado del arco sin el vehiculo.
    """

    loaded: np.ndarray
    unloaded: np.ndarray

    @cached_property
    def total_unloaded(self) -> float:
        return float(self.unloaded.sum())

    @cached_property
    def step(self) -> np.ndarray:
        """Tiempo instantaneo de red al elegir cada arco."""
        return self.loaded + (self.total_unloaded - self.unloaded)

    def network_time(self, path: Sequence[int]) -> float:
        if not path:
            return 0.0
        return float(self.step[list(path)].sum())

    def vehicle_time(self, path: Sequence[int]) -> float:
        if not path:
            return 0.0
        return float(self.loaded[list(path)].sum())


def build_cost_table(
    net: TrafficNetwork,
    beliefs: BeliefVector,
    f_c: float,
    p: BprParams = BprParams(),
) -> CostTable:
    """Evalua la ecuacion BPR esperada en todos los arcos a la vez."""
    if f_c < 0:
        raise DomainError("f_c debe ser no negativo.")
    beliefs.check_covers(net)
    if beliefs.is_point_mass:
        flows = beliefs.point_values()
        loaded = bpr_time(net.free_flow, flows + f_c, net.capacity, p)
        unloaded = bpr_time(net.free_flow, flows, net.capacity, p)
    else:
        loaded = np.array(
            [expected_edge_time(b, e, f_c, p) for b, e in zip(beliefs.beliefs, net.edges)]
        )
        unloaded = np.array(
            [expected_edge_time(b, e, 0.0, p) for b, e in zip(beliefs.beliefs, net.edges)]
        )
    loaded.setflags(write=False)
    unloaded.setflags(write=False)
    return CostTable(loaded=loaded, unloaded=unloaded)


def realized_cost_table(
    net: TrafficNetwork,
    true_flows: FlowState,
    f_c: float,
    p: BprParams = BprParams(),
) -> CostTable:
    """Tabla de costos deterministas a partir de los flujos reales."""
    true_flows.check_covers(net)
    loaded = bpr_time(net.free_flow, true_flows.flows + f_c, net.capacity, p)
    unloaded = bpr_time(net.free_flow, true_flows.flows, net.capacity, p)
    loaded.setflags(write=False)
    unloaded.setflags(write=False)
    return CostTable(loaded=loaded, unloaded=unloaded)


def instantaneous_network_time(
    net: TrafficNetwork,
    beliefs: BeliefVector,
    chosen_edge: int,
    f_c: float,
    p: BprParams = BprParams(),
) -> float:
    """Tiempo de red en un paso: arco elegido con f_c mas el resto sin el vehiculo."""
    if not 0 <= chosen_edge < net.edge_count:
        raise ValidationError(f"Arco desconocido {chosen_edge}.")
    table = beliefs.cost_table(net, f_c, p)
    return float(table.step[chosen_edge])


def path_network_time(
    net: TrafficNetwork,
    beliefs: BeliefVector | Sequence[BeliefVector],
    path: Sequence[int],
    f_c: float,
    p: BprParams = BprParams(),
) -> float:
    """Suma de tiempos instantaneos de red a lo largo del camino.

    ``beliefs`` puede ser un solo vector (fijo en todos los pasos) o uno por paso.
    """
    path_nodes(net, path)
    if isinstance(beliefs, Sequence):
        if len(beliefs) != len(path):
            raise ValidationError("Se requiere un vector de creencias por paso.")
        return float(
            sum(
                step_beliefs.cost_table(net, f_c, p).step[edge_id]
                for step_beliefs, edge_id in zip(beliefs, path)
            )
        )
    return beliefs.cost_table(net, f_c, p).network_time(path)


def path_vehicle_time(
    net: TrafficNetwork,
    beliefs: BeliefVector,
    path: Sequence[int],
    f_c: float,
    p: BprParams = BprParams(),
) -> float:
    """Tiempo individual esperado del vehiculo: solo los arcos recorridos."""
    path_nodes(net, path)
    return beliefs.cost_table(net, f_c, p).vehicle_time(path)


def realized_network_time(
    net: TrafficNetwork,
    true_flows: FlowState,
    path: Sequence[int],
    f_c: float,
    p: BprParams = BprParams(),
) -> float:
    """Tiempo total de red realizado por la trayectoria, sin creencias."""
    path_nodes(net, path)
    return realized_cost_table(net, true_flows, f_c, p).network_time(path)
