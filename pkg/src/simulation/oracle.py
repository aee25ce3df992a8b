"""Oraculo de control compartido optimo para el sistema (busqueda exhaustiva)."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from src.errors import NoPathError, OracleTooLargeError, PreconditionError
from src.simulation.beliefs import ModalityProfile
from src.simulation.costmodel import BprParams, FlowState, realized_cost_table
from src.simulation.network import Commodity, EdgePath, TrafficNetwork
from src.simulation.routing import PathQuery, selfish_best_path
from src.simulation.tacts import TactsConfig

logger = logging.getLogger(__name__)

MAX_ORACLE_BRANCHES = 10**7


@dataclass(frozen=True)
class OracleResult:
    best_sequence: tuple[int, ...]
    tau_star: float
    path: EdgePath
    vehicle_time: float


def compute_oracle(
    net: TrafficNetwork,
    commodity: Commodity,
    true_flows: FlowState,
    modalities: Sequence[ModalityProfile],
    cfg: TactsConfig,
    p: BprParams = BprParams(),
) -> OracleResult:
    """Minimo tiempo total de red sobre todas las secuencias de asignacion de control.

    En cada estado (nodo, nodos visitados) se ramifica por la modalidad que controla
    el paso y se sigue su arco egoista. Modalidades que eligen el mismo arco se
    funden en la de menor identificador.
    """
    if not modalities:
        raise PreconditionError("Se requiere al menos una modalidad.")
    depth = cfg.max_path_edges if cfg.max_path_edges is not None else len(net.nodes) - 1
    branches = len(modalities) ** depth
    if branches > MAX_ORACLE_BRANCHES:
        logger.warning("oracle guard exceeded modalities=%d depth=%d", len(modalities), depth)
        raise OracleTooLargeError(
            f"{len(modalities)}^{depth} secuencias superan el limite de {MAX_ORACLE_BRANCHES}."
        )

    profiles = sorted(modalities, key=lambda m: m.modality_id)
    realized = realized_cost_table(net, true_flows, cfg.f_c, p)
    step_cost = realized.step
    memo: dict[tuple[int, frozenset[int]], tuple[float, tuple[int, ...], EdgePath] | None] = {}

    def search(q: PathQuery, visited: frozenset[int]):
        if q.current_vertex == q.destination:
            return 0.0, (), ()
        key = (q.current_vertex, visited)
        if key in memo:
            return memo[key]
        best = None
        tried: set[int] = set()
        for profile in profiles:
            try:
                edge = selfish_best_path(q, profile.beliefs, net, p).edges[0]
            except NoPathError:
                continue
            if edge in tried:
                continue
            tried.add(edge)
            rest = search(q.advance(edge, net), visited | {q.current_vertex})
            if rest is None:
                continue
            cost = float(step_cost[edge]) + rest[0]
            if best is None or cost < best[0]:
                best = (cost, (profile.modality_id,) + rest[1], (edge,) + rest[2])
        memo[key] = best
        return best

    start = PathQuery(
        current_vertex=commodity.origin,
        destination=commodity.destination,
        f_c=cfg.f_c,
        max_edges=cfg.max_path_edges,
    )
    found = search(start, frozenset())
    if found is None:
        raise NoPathError(f"Ninguna secuencia de control llega al destino de {commodity.label}.")
    _, sequence, path = found
    # Se reevalua a lo largo del camino para que coincida bit a bit con los episodios.
    tau_star = float(step_cost[list(path)].sum()) if path else 0.0
    logger.debug("oracle commodity=%s states=%d tau_star=%.6f", commodity.label, len(memo), tau_star)
    return OracleResult(
        best_sequence=sequence,
        tau_star=tau_star,
        path=path,
        vehicle_time=realized.vehicle_time(path),
    )
