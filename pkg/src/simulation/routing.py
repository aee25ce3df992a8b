"""Busqueda de caminos bajo vectores de creencias arbitrarios.

Los caminos candidatos se enumeran de forma exhaustiva: todos los caminos simples
desde el nodo actual al destino que evitan los nodos ya recorridos y respetan el
presupuesto de arcos restante. Los empates se resuelven por la secuencia de
identificadores de arco lexicograficamente menor.
"""

from __future__ import annotations

from dataclasses import dataclass

from src.errors import NoPathError, ValidationError
from src.simulation.beliefs import BeliefVector
from src.simulation.costmodel import BprParams
from src.simulation.network import (
    DEFAULT_MAX_PATH_EDGES,
    EdgePath,
    TrafficNetwork,
    path_nodes,
    simple_paths,
)


@dataclass(frozen=True)
class PathQuery:
    """Estado de decision del vehiculo en el paso k."""

    current_vertex: int
    destination: int
    traversed_prefix: EdgePath = ()
    f_c: float = 1.0
    max_edges: int | None = DEFAULT_MAX_PATH_EDGES

    @property
    def step(self) -> int:
        return len(self.traversed_prefix)

    @property
    def remaining_edges(self) -> int | None:
        if self.max_edges is None:
            return None
        return self.max_edges - len(self.traversed_prefix)

    def blocked(self, net: TrafficNetwork) -> frozenset[int]:
        """Nodos del prefijo que la continuacion no puede volver a visitar."""
        if not self.traversed_prefix:
            return frozenset()
        nodes = path_nodes(net, self.traversed_prefix)
        if nodes[-1] != self.current_vertex:
            raise ValidationError("El prefijo no termina en el nodo actual.")
        if len(set(nodes)) != len(nodes):
            raise ValidationError("El prefijo repite nodos.")
        return frozenset(nodes[:-1])

    def advance(self, edge_id: int, net: TrafficNetwork) -> PathQuery:
        return PathQuery(
            current_vertex=net.head(edge_id),
            destination=self.destination,
            traversed_prefix=self.traversed_prefix + (edge_id,),
            f_c=self.f_c,
            max_edges=self.max_edges,
        )


@dataclass(frozen=True)
class ScoredPath:
    """Continuacion con el valor del objetivo bajo el que fue elegida."""

    edges: EdgePath
    score: float

    @property
    def first_edge(self) -> int | None:
        return self.edges[0] if self.edges else None


def continuations(q: PathQuery, net: TrafficNetwork) -> tuple[EdgePath, ...]:
    """Caminos admisibles desde ``q.current_vertex``, en orden lexicografico."""
    if q.current_vertex not in net.adjacency:
        raise KeyError(q.current_vertex)
    return simple_paths(
        net, q.current_vertex, q.destination, q.remaining_edges, q.blocked(net)
    )


def _candidates(q: PathQuery, net: TrafficNetwork) -> tuple[EdgePath, ...]:
    paths = continuations(q, net)
    if not paths:
        raise NoPathError(
            f"Sin camino de {q.current_vertex} a {q.destination} "
            f"(restan {q.remaining_edges} arcos)."
        )
    return paths


def selfish_best_path(
    q: PathQuery,
    modality_beliefs: BeliefVector,
    net: TrafficNetwork,
    p: BprParams = BprParams(),
) -> ScoredPath:
    """Camino que minimiza el tiempo individual del vehiculo segun la modalidad."""
    table = modality_beliefs.cost_table(net, q.f_c, p)
    scored = [(table.vehicle_time(path), path) for path in _candidates(q, net)]
    score, path = min(scored)
    return ScoredPath(path, score)


def system_best_path(
    q: PathQuery,
    system_beliefs: BeliefVector,
    net: TrafficNetwork,
    p: BprParams = BprParams(),
) -> ScoredPath:
    """Continuacion de menor tiempo total de red esperado."""
    table = system_beliefs.cost_table(net, q.f_c, p)
    scored = [(table.network_time(path), path) for path in _candidates(q, net)]
    score, path = min(scored)
    return ScoredPath(path, score)


def system_worst_path(
    q: PathQuery,
    system_beliefs: BeliefVector,
    net: TrafficNetwork,
    p: BprParams = BprParams(),
) -> ScoredPath:
    """Continuacion de mayor tiempo total de red esperado."""
    table = system_beliefs.cost_table(net, q.f_c, p)
    scored = [(-table.network_time(path), path) for path in _candidates(q, net)]
    negated, path = min(scored)
    return ScoredPath(path, -negated)


def projected_path(
    committed_edge: int,
    q: PathQuery,
    system_beliefs: BeliefVector,
    net: TrafficNetwork,
    p: BprParams = BprParams(),
) -> ScoredPath:
    """Mejor continuacion del sistema dado que ya se comprometio ``committed_edge``."""
    if committed_edge not in net.adjacency.get(q.current_vertex, ()):
        raise ValidationError(
            f"El arco {committed_edge} no sale del nodo {q.current_vertex}."
        )
    head = net.head(committed_edge)
    if head in q.blocked(net):
        raise NoPathError(f"El arco {committed_edge} vuelve a un nodo ya visitado.")
    if q.remaining_edges is not None and q.remaining_edges < 1:
        raise NoPathError("No quedan arcos en el presupuesto del camino.")
    rest = system_best_path(q.advance(committed_edge, net), system_beliefs, net, p)
    edges = (committed_edge,) + rest.edges
    table = system_beliefs.cost_table(net, q.f_c, p)
    return ScoredPath(edges, table.network_time(edges))
