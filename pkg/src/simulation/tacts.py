"""Arbitraje TACTS: regret, confianza, estrategia mixta y ejecucion de episodios.

El ciclo de episodio (``run_episode``) es comun a TACTS y a todas las lineas base:
cada estrategia solo decide que modalidad controla el paso y como reacciona a la
evaluacion del paso.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Protocol, Sequence

import numpy as np

from src.errors import InternalError, NoPathError, PreconditionError, ValidationError
from src.simulation.beliefs import ModalityProfile, system_belief_update
from src.simulation.costmodel import BprParams, FlowState, realized_cost_table
from src.simulation.network import (
    DEFAULT_MAX_PATH_EDGES,
    Commodity,
    EdgePath,
    TrafficNetwork,
)
from src.simulation.routing import (
    PathQuery,
    ScoredPath,
    continuations,
    projected_path,
    selfish_best_path,
    system_best_path,
    system_worst_path,
)

logger = logging.getLogger(__name__)

REGRET_TOLERANCE = 1e-9
TRUST_SUM_FLOOR = 1e-12
RATIO_TOLERANCE = 1e-9


@dataclass(frozen=True)
class TactsConfig:
    """Parametros de un episodio (N, epsilon, limite de pasos, semilla, f_c)."""

    history_window: int = 2
    memory_decay: float = 0.01
    max_steps: int | None = None
    rng_seed: int = 0
    f_c: float = 1.0
    max_path_edges: int | None = DEFAULT_MAX_PATH_EDGES

    def __post_init__(self) -> None:
        if self.history_window < 1:
            raise ValidationError("N debe ser al menos 1.")
        if not 0.0 < self.memory_decay < 1.0:
            raise ValidationError("epsilon debe estar en (0, 1).")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValidationError("max_steps debe ser positivo.")
        if self.f_c < 0:
            raise ValidationError("f_c debe ser no negativo.")

    def step_limit(self, net: TrafficNetwork) -> int:
        return self.max_steps if self.max_steps is not None else 2 * len(net.nodes)


@dataclass
class ArbitrationState:
    """Confianza, historial de regrets normalizados y estrategia mixta del sistema."""

    trust: dict[int, float]
    regret_history: dict[int, list[float]]
    strategy: dict[int, float]
    step: int = 0

    @classmethod
    def initial(cls, modality_ids: Iterable[int]) -> ArbitrationState:
        ids = sorted(modality_ids)
        if not ids:
            raise PreconditionError("Se requiere al menos una modalidad.")
        uniform = {m: 1.0 / len(ids) for m in ids}
        return cls(trust=dict(uniform), regret_history={m: [] for m in ids}, strategy=uniform)

    def close_step(self, modality_id: int, normalized_regret: float, cfg: TactsConfig) -> None:
        """Actualiza solo la modalidad activa y luego iguala confianza a estrategia."""
        history = self.regret_history[modality_id]
        history.append(normalized_regret)
        self.trust[modality_id] = update_trust(history, cfg.history_window, cfg.memory_decay)
        self.strategy = update_strategy(self.trust)
        self.trust = dict(self.strategy)
        self.step += 1


@dataclass(frozen=True)
class StepEvaluation:
    step: int
    active_modality: int
    best: ScoredPath
    chosen_edge: int
    projected: ScoredPath
    worst: ScoredPath
    regret: float
    normalized_regret: float

    @property
    def system_preferred_edge(self) -> int:
        return self.best.edges[0]


@dataclass(frozen=True)
class StepRecord:
    step: int
    active_modality: int
    chosen_edge: int
    system_preferred_edge: int
    regret: float
    normalized_regret: float
    strategy_after: Mapping[int, float]
    realized_step_time: float

    def to_dict(self) -> dict[str, Any]:
        data = dataclasses.asdict(self)
        data["strategy_after"] = {str(m): p for m, p in self.strategy_after.items()}
        return data


@dataclass(frozen=True)
class EpisodeResult:
    """Traza de pasos y totales realizados de un episodio."""

    algorithm: str
    steps: tuple[StepRecord, ...]
    path: EdgePath
    realized_total_time: float
    realized_vehicle_time: float
    regret_sum: float
    failed: bool = False
    failure_reason: str | None = None
    oracle_total_time: float | None = None
    performance_ratio: float | None = None
    # Latencia de cada decision de arbitraje; no entra en la comparacion ni en to_dict.
    step_micros: tuple[int, ...] = field(default=(), compare=False, repr=False)

    def with_oracle(self, tau_star: float | None) -> EpisodeResult:
        """Agrega el optimo del oraculo y la razon de desempeno."""
        if tau_star is None or self.failed or tau_star <= 0:
            return dataclasses.replace(self, oracle_total_time=tau_star)
        ratio = self.realized_total_time / tau_star
        if ratio < 1.0:
            if ratio < 1.0 - RATIO_TOLERANCE:
                logger.warning(
                    "realized below oracle algorithm=%s realized=%.9f oracle=%.9f",
                    self.algorithm,
                    self.realized_total_time,
                    tau_star,
                )
            else:
                ratio = 1.0
        return dataclasses.replace(self, oracle_total_time=tau_star, performance_ratio=ratio)

    def to_dict(self) -> dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "path": list(self.path),
            "realized_total_time": self.realized_total_time,
            "realized_vehicle_time": self.realized_vehicle_time,
            "oracle_total_time": self.oracle_total_time,
            "performance_ratio": self.performance_ratio,
            "regret_sum": self.regret_sum,
            "failed": self.failed,
            "failure_reason": self.failure_reason,
            "steps": [step.to_dict() for step in self.steps],
        }

    def to_jsonl(self) -> str:
        """Un registro JSON por paso, seguido del resumen del episodio."""
        lines = [json.dumps(step.to_dict(), sort_keys=True) for step in self.steps]
        summary = self.to_dict()
        summary.pop("steps")
        lines.append(json.dumps(summary, sort_keys=True))
        return "\n".join(lines) + "\n"


class Controller(Protocol):
    """Estrategia de asignacion de control usada por ``run_episode``."""

    name: str

    def choose(self, step: int, rng: np.random.Generator) -> int: ...

    def observe(
        self, evaluation: StepEvaluation, rng: np.random.Generator
    ) -> Mapping[int, float]: ...


def instantaneous_regret(projected: ScoredPath, system_best_committed: ScoredPath) -> float:
    """Costo extra de la continuacion proyectada frente a la mejor del sistema."""
    regret = projected.score - system_best_committed.score
    if regret < -REGRET_TOLERANCE:
        raise InternalError(
            f"Regret negativo ({regret}): la proyeccion supera al optimo del sistema."
        )
    return max(regret, 0.0)


def normalize_regret(regret: float, worst: ScoredPath, best: ScoredPath) -> float:
    """Regret dividido por el peor regret posible, recortado a [0, 1]."""
    span = worst.score - best.score
    if span <= REGRET_TOLERANCE:
        return 0.0
    return min(1.0, max(0.0, regret / span))


def update_trust(history: Sequence[float], N: int, epsilon: float) -> float:
    """Promedio con decaimiento exponencial de (1 - regret normalizado).

    Se usan los ``min(N, len(history) - 1) + 1`` valores mas recientes.
    """
    if not history:
        raise PreconditionError("El historial de regrets esta vacio.")
    terms = min(N, len(history) - 1) + 1
    recent = list(reversed(history))[:terms]
    weights = [epsilon**i for i in range(terms)]
    numerator = math.fsum(w * (1.0 - r) for w, r in zip(weights, recent))
    trust = numerator / math.fsum(weights)
    return min(1.0, max(0.0, trust))


def update_strategy(trust: Mapping[int, float]) -> dict[int, float]:
    """Reparte la probabilidad en proporcion a la confianza; uniforme si todo es cero."""
    if any(value < 0 for value in trust.values()):
        raise PreconditionError("La confianza no puede ser negativa.")
    total = math.fsum(trust.values())
    if total <= TRUST_SUM_FLOOR:
        return {m: 1.0 / len(trust) for m in sorted(trust)}
    return {m: trust[m] / total for m in sorted(trust)}


def sample_modality(strategy: Mapping[int, float], rng: np.random.Generator) -> int:
    """Muestreo por CDF inversa en orden de identificador, con un solo sorteo."""
    ids = sorted(strategy)
    probs = np.array([strategy[m] for m in ids], dtype=float)
    cdf = np.cumsum(probs)
    index = int(np.searchsorted(cdf, rng.random(), side="right"))
    if index >= len(ids) or probs[index] == 0.0:
        # Redondeo en la cola de la CDF: la ultima modalidad con probabilidad positiva.
        index = int(np.flatnonzero(probs > 0.0)[-1])
    return ids[index]


class TactsController:
    """Estrategia mixta guiada por confianza (regret matching con informacion parcial)."""

    name = "tacts"

    def __init__(
        self,
        modality_ids: Iterable[int],
        cfg: TactsConfig,
        forced: Mapping[int, int] | None = None,
    ):
        self.cfg = cfg
        self.state = ArbitrationState.initial(modality_ids)
        self.forced = dict(forced or {})

    def choose(self, step: int, rng: np.random.Generator) -> int:
        sampled = sample_modality(self.state.strategy, rng)
        return self.forced.get(step, sampled)

    def observe(self, evaluation: StepEvaluation, rng: np.random.Generator) -> Mapping[int, float]:
        self.state.close_step(evaluation.active_modality, evaluation.normalized_regret, self.cfg)
        return dict(self.state.strategy)


def run_episode(
    net: TrafficNetwork,
    commodity: Commodity,
    true_flows: FlowState,
    modalities: Sequence[ModalityProfile],
    controller: Controller,
    cfg: TactsConfig,
    p: BprParams = BprParams(),
    rng: np.random.Generator | None = None,
) -> EpisodeResult:
    """Recorre el commodity paso a paso con la estrategia ``controller``."""
    if not modalities:
        raise PreconditionError("Se requiere al menos una modalidad.")
    rng = rng if rng is not None else np.random.default_rng(cfg.rng_seed)
    profiles = {m.modality_id: m for m in modalities}
    step_limit = cfg.step_limit(net)
    realized = realized_cost_table(net, true_flows, cfg.f_c, p)

    q = PathQuery(
        current_vertex=commodity.origin,
        destination=commodity.destination,
        f_c=cfg.f_c,
        max_edges=cfg.max_path_edges,
    )
    system_beliefs = None
    steps: list[StepRecord] = []
    step_micros: list[int] = []
    regret_sum = 0.0
    failure: str | None = None
    try:
        while q.current_vertex != q.destination:
            if q.step >= step_limit:
                failure = f"se excedio el limite de {step_limit} pasos"
                break
            started = time.perf_counter_ns()
            system_beliefs = system_belief_update(system_beliefs, true_flows)
            best = system_best_path(q, system_beliefs, net, p)
            modality_id = controller.choose(q.step, rng)
            chosen = selfish_best_path(q, profiles[modality_id].beliefs, net, p).edges[0]
            projected = projected_path(chosen, q, system_beliefs, net, p)
            if len(continuations(q, net)) == 1:
                worst = best
            else:
                worst = system_worst_path(q, system_beliefs, net, p)
            regret = instantaneous_regret(projected, best)
            evaluation = StepEvaluation(
                step=q.step,
                active_modality=modality_id,
                best=best,
                chosen_edge=chosen,
                projected=projected,
                worst=worst,
                regret=regret,
                normalized_regret=normalize_regret(regret, worst, best),
            )
            strategy = controller.observe(evaluation, rng)
            step_micros.append((time.perf_counter_ns() - started) // 1000)
            steps.append(
                StepRecord(
                    step=q.step,
                    active_modality=modality_id,
                    chosen_edge=chosen,
                    system_preferred_edge=evaluation.system_preferred_edge,
                    regret=regret,
                    normalized_regret=evaluation.normalized_regret,
                    strategy_after=strategy,
                    realized_step_time=float(realized.step[chosen]),
                )
            )
            regret_sum += regret
            logger.debug(
                "step algorithm=%s k=%d modality=%d edge=%d preferred=%d regret=%.6f",
                controller.name,
                q.step,
                modality_id,
                chosen,
                evaluation.system_preferred_edge,
                regret,
            )
            q = q.advance(chosen, net)
    except NoPathError as exc:
        failure = str(exc)

    if failure is not None:
        logger.warning(
            "episode failed algorithm=%s commodity=%s reason=%s",
            controller.name,
            commodity.label,
            failure,
        )
    return EpisodeResult(
        algorithm=controller.name,
        steps=tuple(steps),
        path=q.traversed_prefix,
        realized_total_time=realized.network_time(q.traversed_prefix),
        realized_vehicle_time=realized.vehicle_time(q.traversed_prefix),
        regret_sum=regret_sum,
        failed=failure is not None,
        failure_reason=failure,
        step_micros=tuple(step_micros),
    )


def run_tacts_episode(
    net: TrafficNetwork,
    commodity: Commodity,
    true_flows: FlowState,
    modalities: Sequence[ModalityProfile],
    cfg: TactsConfig,
    p: BprParams = BprParams(),
    *,
    forced: Mapping[int, int] | None = None,
    rng: np.random.Generator | None = None,
) -> EpisodeResult:
    """Ejecuta TACTS; ``forced`` fija la modalidad de pasos concretos (paso -> id)."""
    controller = TactsController([m.modality_id for m in modalities], cfg, forced)
    return run_episode(net, commodity, true_flows, modalities, controller, cfg, p, rng)
