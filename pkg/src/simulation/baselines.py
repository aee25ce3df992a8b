"""Estrategias de comparacion: DOC, TASR degenerado, RCS y SC."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from src.errors import PreconditionError, ValidationError
from src.simulation.beliefs import ModalityProfile
from src.simulation.costmodel import BprParams, FlowState
from src.simulation.network import Commodity, TrafficNetwork
from src.simulation.tacts import EpisodeResult, StepEvaluation, TactsConfig, run_episode

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DocConfig:
    """Ventana deslizante y umbral gamma del conteo de desacuerdos."""

    window: int = 2
    threshold: int = 1
    initial_modality: int | None = None

    def __post_init__(self) -> None:
        if self.threshold < 1:
            raise ValidationError("gamma debe ser al menos 1.")
        if self.window < self.threshold:
            raise ValidationError("La ventana DOC debe ser al menos gamma.")


def _point_mass(ids: Iterable[int], active: int) -> dict[int, float]:
    return {m: 1.0 if m == active else 0.0 for m in ids}


class FixedController:
    """Una sola modalidad decide todos los pasos (SC y TASR)."""

    def __init__(self, modality_ids: Sequence[int], modality_id: int, name: str):
        if modality_id not in modality_ids:
            raise PreconditionError(f"Modalidad desconocida {modality_id}.")
        self.name = name
        self.ids = sorted(modality_ids)
        self.modality_id = modality_id

    def choose(self, step: int, rng: np.random.Generator) -> int:
        return self.modality_id

    def observe(self, evaluation: StepEvaluation, rng: np.random.Generator) -> Mapping[int, float]:
        return _point_mass(self.ids, self.modality_id)


class RandomController:
    """Sorteo uniforme sobre todas las modalidades en cada paso."""

    name = "rcs"

    def __init__(self, modality_ids: Sequence[int]):
        self.ids = sorted(modality_ids)

    def choose(self, step: int, rng: np.random.Generator) -> int:
        return self.ids[int(rng.integers(len(self.ids)))]

    def observe(self, evaluation: StepEvaluation, rng: np.random.Generator) -> Mapping[int, float]:
        return {m: 1.0 / len(self.ids) for m in self.ids}


class DocController:
    """Cambia de operador cuando los desacuerdos en la ventana superan gamma."""

    name = "doc"

    def __init__(self, modality_ids: Sequence[int], doc: DocConfig):
        self.ids = sorted(modality_ids)
        self.doc = doc
        self.active = doc.initial_modality if doc.initial_modality is not None else self.ids[0]
        if self.active not in self.ids:
            raise PreconditionError(f"Modalidad inicial desconocida {self.active}.")
        self.conflicts: deque[int] = deque(maxlen=doc.window)
        self.switches = 0

    @property
    def score(self) -> int:
        return sum(self.conflicts)

    def choose(self, step: int, rng: np.random.Generator) -> int:
        return self.active

    def observe(self, evaluation: StepEvaluation, rng: np.random.Generator) -> Mapping[int, float]:
        self.conflicts.append(int(evaluation.chosen_edge != evaluation.system_preferred_edge))
        if self.score > self.doc.threshold:
            others = [m for m in self.ids if m != self.active]
            if others:
                self.active = others[int(rng.integers(len(others)))]
                self.switches += 1
                logger.debug("doc switch step=%d to=%d", evaluation.step, self.active)
            else:
                logger.warning("doc switch skipped step=%d reason=single_modality", evaluation.step)
            self.conflicts.clear()
        return _point_mass(self.ids, self.active)


def _ids(modalities: Sequence[ModalityProfile]) -> list[int]:
    """Identificadores ordenados; falla si no hay modalidades."""
    if not modalities:
        raise PreconditionError("Se requiere al menos una modalidad.")
    return sorted(m.modality_id for m in modalities)


def run_doc_episode(
    net: TrafficNetwork,
    commodity: Commodity,
    true_flows: FlowState,
    modalities: Sequence[ModalityProfile],
    doc: DocConfig,
    cfg: TactsConfig,
    p: BprParams = BprParams(),
    rng: np.random.Generator | None = None,
) -> EpisodeResult:
    """Episodio con cambio de operador por conteo de desacuerdos."""
    controller = DocController(_ids(modalities), doc)
    return run_episode(net, commodity, true_flows, modalities, controller, cfg, p, rng)


def tasr_choice(prior_trust: Mapping[int, float]) -> int:
    """Modalidad de mayor confianza predicha; empates por menor identificador."""
    if not prior_trust:
        raise PreconditionError("La confianza predicha esta vacia.")
    return min(prior_trust, key=lambda m: (-prior_trust[m], m))


def run_tasr_episode(
    net: TrafficNetwork,
    commodity: Commodity,
    true_flows: FlowState,
    modalities: Sequence[ModalityProfile],
    prior_trust: Mapping[int, float] | None,
    cfg: TactsConfig,
    p: BprParams = BprParams(),
    rng: np.random.Generator | None = None,
) -> EpisodeResult:
    """Asigna el control una sola vez al inicio; ``None`` equivale a un prior uniforme."""
    ids = _ids(modalities)
    prior = prior_trust if prior_trust is not None else {m: 1.0 / len(ids) for m in ids}
    controller = FixedController(ids, tasr_choice(prior), "tasr")
    return run_episode(net, commodity, true_flows, modalities, controller, cfg, p, rng)


def run_rcs_episode(
    net: TrafficNetwork,
    commodity: Commodity,
    true_flows: FlowState,
    modalities: Sequence[ModalityProfile],
    cfg: TactsConfig,
    p: BprParams = BprParams(),
    rng: np.random.Generator | None = None,
) -> EpisodeResult:
    """Episodio con sorteo uniforme de la modalidad en cada paso."""
    controller = RandomController(_ids(modalities))
    return run_episode(net, commodity, true_flows, modalities, controller, cfg, p, rng)


def run_sc_episode(
    net: TrafficNetwork,
    commodity: Commodity,
    true_flows: FlowState,
    modalities: Sequence[ModalityProfile],
    modality: int,
    cfg: TactsConfig,
    p: BprParams = BprParams(),
    rng: np.random.Generator | None = None,
) -> EpisodeResult:
    """Control unico de ``modality`` durante todo el episodio."""
    controller = FixedController(_ids(modalities), modality, "sc")
    return run_episode(net, commodity, true_flows, modalities, controller, cfg, p, rng)
