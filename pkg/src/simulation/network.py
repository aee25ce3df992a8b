"""Red de trafico dirigida, lectura de archivos TNTP y enumeracion de commodities."""

from __future__ import annotations

import logging
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, TextIO

import networkx as nx
import numpy as np

from src.errors import ParseError, PreconditionError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_MAX_PATH_EDGES = 5

EdgePath = tuple[int, ...]

_METADATA_LINE = re.compile(r"^<(?P<key>[A-Z ]+)>\s*(?P<value>.*)$")
_LINK_COLUMNS = (
    "init_node term_node capacity length free_flow_time b power speed toll link_type"
)


@dataclass(frozen=True, slots=True)
class EdgeRecord:
    """Arco de la red con su tiempo a flujo libre y su capacidad."""

    edge_id: int
    tail: int
    head: int
    free_flow_time: float
    capacity: float
    # Columnas TNTP restantes: se conservan pero el modelo de costo no las usa.
    length: float = 0.0
    b: float = 0.15
    power: float = 4.0
    speed: float = 0.0
    toll: float = 0.0
    link_type: int = 1

    def __post_init__(self) -> None:
        if self.free_flow_time < 0:
            raise ValidationError(f"Arco {self.edge_id}: tiempo a flujo libre negativo.")
        if self.capacity <= 0:
            raise ValidationError(f"Arco {self.edge_id}: la capacidad debe ser positiva.")
        if self.tail == self.head:
            raise ValidationError(f"Arco {self.edge_id}: no se permiten lazos ({self.tail}).")


@dataclass(frozen=True, eq=False)
class TrafficNetwork:
    """Grafo dirigido G=(V,E) inmutable.

    Los identificadores de arco son enteros densos en el orden del archivo, de modo
    que ``edges[i].edge_id == i`` y los arreglos ``free_flow`` y ``capacity`` se
    indexan directamente con el identificador.
    """

    nodes: tuple[int, ...]
    edges: tuple[EdgeRecord, ...]
    first_thru_node: int = 1
    zones: int = 0
    adjacency: Mapping[int, tuple[int, ...]] = field(init=False, repr=False)
    graph: nx.MultiDiGraph = field(init=False, repr=False)
    free_flow: np.ndarray = field(init=False, repr=False)
    capacity: np.ndarray = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        node_set = set(self.nodes)
        outgoing: dict[int, list[int]] = {node: [] for node in self.nodes}
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.nodes)
        for position, edge in enumerate(self.edges):
            if edge.edge_id != position:
                raise ValidationError(
                    f"Identificador de arco {edge.edge_id} fuera de orden (posicion {position})."
                )
            for endpoint in (edge.tail, edge.head):
                if endpoint not in node_set:
                    raise ValidationError(
                        f"Arco {edge.edge_id} referencia el nodo inexistente {endpoint}."
                    )
            outgoing[edge.tail].append(edge.edge_id)
            graph.add_edge(edge.tail, edge.head, key=edge.edge_id)

        free_flow = np.array([edge.free_flow_time for edge in self.edges], dtype=float)
        capacity = np.array([edge.capacity for edge in self.edges], dtype=float)
        free_flow.setflags(write=False)
        capacity.setflags(write=False)

        object.__setattr__(
            self,
            "adjacency",
            MappingProxyType({node: tuple(ids) for node, ids in outgoing.items()}),
        )
        object.__setattr__(self, "graph", nx.freeze(graph))
        object.__setattr__(self, "free_flow", free_flow)
        object.__setattr__(self, "capacity", capacity)
        object.__setattr__(self, "_hash", hash((self.nodes, self.edges)))

    @classmethod
    def from_edges(
        cls,
        rows: Iterable[Sequence[float]],
        node_count: int | None = None,
    ) -> TrafficNetwork:
        """Construye una red a partir de filas ``(tail, head, free_flow_time, capacity)``."""
        rows = list(rows)
        edges = tuple(
            EdgeRecord(
                edge_id=index,
                tail=int(tail),
                head=int(head),
                free_flow_time=float(free_flow_time),
                capacity=float(capacity),
            )
            for index, (tail, head, free_flow_time, capacity) in enumerate(rows)
        )
        if node_count is None:
            node_count = max((max(e.tail, e.head) for e in edges), default=0)
        return cls(nodes=tuple(range(1, node_count + 1)), edges=edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TrafficNetwork):
            return NotImplemented
        return (self.nodes, self.edges, self.first_thru_node) == (
            other.nodes,
            other.edges,
            other.first_thru_node,
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"<TrafficNetwork nodes={len(self.nodes)} edges={len(self.edges)}>"

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def head(self, edge_id: int) -> int:
        return self.edges[edge_id].head

    def tail(self, edge_id: int) -> int:
        return self.edges[edge_id].tail


@dataclass(frozen=True)
class Commodity:
    """Par origen-destino con su conjunto de caminos simples candidatos."""

    origin: int
    destination: int
    candidate_paths: tuple[EdgePath, ...] = ()

    @property
    def label(self) -> str:
        return f"{self.origin}->{self.destination}"


def parse_tntp(text: str | TextIO) -> TrafficNetwork:
    """Lee un archivo de red TNTP (metadatos, luego una fila por arco)."""
    if not isinstance(text, str):
        text = text.read()
    lines = text.splitlines()

    metadata: dict[str, str] = {}
    body_start: int | None = None
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("~"):
            continue
        match = _METADATA_LINE.match(line)
        if match is None:
            raise ParseError(f"se esperaba una linea de metadatos <...>: {line!r}", number)
        key = match["key"].strip()
        if key == "END OF METADATA":
            body_start = number
            break
        metadata[key] = match["value"].strip()
    if body_start is None:
        raise ParseError("falta la marca <END OF METADATA>", len(lines))

    node_count = _metadata_int(metadata, "NUMBER OF NODES", body_start)
    link_count = _metadata_int(metadata, "NUMBER OF LINKS", body_start)
    first_thru_node = int(metadata.get("FIRST THRU NODE", "1") or 1)
    zones = int(metadata.get("NUMBER OF ZONES", "0") or 0)

    edges: list[EdgeRecord] = []
    for number, raw in enumerate(lines[body_start:], start=body_start + 1):
        line = raw.split("~", 1)[0].strip()
        if not line:
            continue
        tokens = line.rstrip(";").split()
        if len(tokens) < 5:
            raise ParseError(f"fila de arco incompleta ({len(tokens)} columnas)", number)
        try:
            tail, head = int(tokens[0]), int(tokens[1])
            values = [float(token) for token in tokens[2:10]]
        except ValueError:
            raise ParseError(f"valor no numerico en la fila {line!r}", number) from None
        values += [0.0] * (8 - len(values))
        capacity, length, free_flow_time, b, power, speed, toll, link_type = values

        if capacity <= 0:
            raise ValidationError(f"linea {number}: capacidad no positiva ({capacity}).")
        for endpoint in (tail, head):
            if not 1 <= endpoint <= node_count:
                raise ValidationError(
                    f"linea {number}: el nodo {endpoint} no existe "
                    f"(la red declara {node_count} nodos)."
                )
        edges.append(
            EdgeRecord(
                edge_id=len(edges),
                tail=tail,
                head=head,
                free_flow_time=free_flow_time,
                capacity=capacity,
                length=length,
                b=b,
                power=power,
                speed=speed,
                toll=toll,
                link_type=int(link_type),
            )
        )

    if len(edges) != link_count:
        raise ValidationError(
            f"La red declara {link_count} arcos pero contiene {len(edges)} filas."
        )
    network = TrafficNetwork(
        nodes=tuple(range(1, node_count + 1)),
        edges=tuple(edges),
        first_thru_node=first_thru_node,
        zones=zones,
    )
    logger.debug("tntp parsed nodes=%d edges=%d", len(network.nodes), len(network.edges))
    return network


def _metadata_int(metadata: Mapping[str, str], key: str, line_number: int) -> int:
    try:
        return int(metadata[key])
    except KeyError:
        raise ParseError(f"falta el metadato <{key}>", line_number) from None
    except ValueError:
        raise ParseError(f"metadato <{key}> no entero: {metadata[key]!r}", line_number) from None


def serialize_tntp(net: TrafficNetwork) -> str:
    """Escribe la red en formato TNTP; ``parse_tntp`` la reconstruye identica."""
    if net.nodes != tuple(range(1, len(net.nodes) + 1)):
        raise ValidationError("TNTP requiere nodos numerados 1..n.")
    lines = [
        f"<NUMBER OF ZONES> {net.zones}",
        f"<NUMBER OF NODES> {len(net.nodes)}",
        f"<FIRST THRU NODE> {net.first_thru_node}",
        f"<NUMBER OF LINKS> {len(net.edges)}",
        "<END OF METADATA>",
        "",
        "",
        f"~ {_LINK_COLUMNS} ;",
    ]
    for edge in net.edges:
        columns = (
            edge.tail,
            edge.head,
            repr(edge.capacity),
            repr(edge.length),
            repr(edge.free_flow_time),
            repr(edge.b),
            repr(edge.power),
            repr(edge.speed),
            repr(edge.toll),
            edge.link_type,
        )
        lines.append("\t" + "\t".join(str(column) for column in columns) + "\t;")
    return "\n".join(lines) + "\n"


def load_network(path: str | Path) -> TrafficNetwork:
    """Lee un archivo ``*_net.tntp`` desde disco."""
    return parse_tntp(Path(path).read_text(encoding="utf-8"))


def outgoing_edges(net: TrafficNetwork, v: int) -> list[int]:
    """Arcos salientes E_k del nodo ``v`` en orden del archivo."""
    if v not in net.adjacency:
        raise KeyError(v)
    return list(net.adjacency[v])


@lru_cache(maxsize=65536)
def simple_paths(
    net: TrafficNetwork,
    origin: int,
    destination: int,
    max_edges: int | None = DEFAULT_MAX_PATH_EDGES,
    blocked: frozenset[int] = frozenset(),
) -> tuple[EdgePath, ...]:
    """Caminos simples de ``origin`` a ``destination`` que evitan ``blocked``.

    El resultado esta ordenado lexicograficamente por secuencia de arcos. Si el
    origen coincide con el destino devuelve el camino vacio.
    """
    if origin == destination:
        return ((),)
    if destination in blocked or (max_edges is not None and max_edges < 1):
        return ()
    graph = nx.restricted_view(net.graph, blocked, []) if blocked else net.graph
    found = nx.all_simple_edge_paths(graph, origin, destination, cutoff=max_edges)
    return tuple(sorted(tuple(key for _, _, key in path) for path in found))


def enumerate_commodities(
    net: TrafficNetwork,
    max_edges: int | None = DEFAULT_MAX_PATH_EDGES,
) -> list[Commodity]:
    """Todos los pares origen-destino con caminos simples de a lo sumo ``max_edges`` arcos."""
    if max_edges is not None and max_edges < 1:
        raise PreconditionError("max_edges debe ser al menos 1.")
    commodities: list[Commodity] = []
    for origin in net.nodes:
        # BFS acotado: solo se enumeran destinos alcanzables dentro del limite.
        reachable = nx.single_source_shortest_path_length(net.graph, origin, cutoff=max_edges)
        for destination in sorted(reachable):
            if destination == origin:
                continue
            paths = simple_paths(net, origin, destination, max_edges)
            if paths:
                commodities.append(Commodity(origin, destination, paths))
    logger.debug("commodities enumerated count=%d max_edges=%s", len(commodities), max_edges)
    return commodities


def path_nodes(net: TrafficNetwork, path: Sequence[int], start: int | None = None) -> list[int]:
    """Secuencia de nodos visitados por ``path``; valida que sea conexo."""
    if not path:
        return [] if start is None else [start]
    nodes = [net.tail(path[0]) if start is None else start]
    for edge_id in path:
        if not 0 <= edge_id < net.edge_count:
            raise ValidationError(f"Arco desconocido {edge_id}.")
        edge = net.edges[edge_id]
        if edge.tail != nodes[-1]:
            raise ValidationError(
                f"Camino desconectado: el arco {edge_id} sale de {edge.tail}, no de {nodes[-1]}."
            )
        nodes.append(edge.head)
    return nodes


def is_simple_path(net: TrafficNetwork, path: Sequence[int]) -> bool:
    nodes = path_nodes(net, path)
    return len(nodes) == len(set(nodes))
