"""Ejemplo de dos caminos incluido como datos del paquete.

Nodos a..f = 1..6. Camino P1 = a-b-c-d (arcos 0, 1, 2) y P2 = a-e-f-d (arcos 3, 4, 5).
Bajo los flujos reales P1 cuesta 78 y P2 83 de tiempo total de red; la modalidad 2
cree que P1 tarda 30 y P2 24, asi que elige (a, e).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Mapping

from src.simulation.beliefs import BeliefVector, ModalityProfile
from src.simulation.costmodel import BprParams, FlowState
from src.simulation.network import Commodity, TrafficNetwork, parse_tntp, simple_paths
from src.simulation.tacts import EpisodeResult, TactsConfig, run_tacts_episode

DATA = resources.files("src.simulation") / "data"

TWO_PATH_TRUE_FLOWS = (0.0, 0.0, 0.0, 40.0, 20.0, 0.0)
TWO_PATH_TRUST = {1: 1.0, 2: 0.5}


@dataclass(frozen=True)
class TwoPathExample:
    net: TrafficNetwork
    commodity: Commodity
    true_flows: FlowState
    modalities: tuple[ModalityProfile, ...]
    cfg: TactsConfig
    p: BprParams
    forced: Mapping[int, int]


def _beliefs(modality_id: int) -> BeliefVector:
    text = (DATA / f"modality_{modality_id}_beliefs.json").read_text(encoding="utf-8")
    return BeliefVector.from_dict(json.loads(text))


def load_two_path_example() -> TwoPathExample:
    net = parse_tntp((DATA / "two_path_net.tntp").read_text(encoding="utf-8"))
    cfg = TactsConfig(history_window=1, memory_decay=0.1, f_c=10.0)
    return TwoPathExample(
        net=net,
        commodity=Commodity(1, 4, simple_paths(net, 1, 4, cfg.max_path_edges)),
        true_flows=FlowState(TWO_PATH_TRUE_FLOWS),
        modalities=tuple(
            ModalityProfile(m, trust, _beliefs(m)) for m, trust in TWO_PATH_TRUST.items()
        ),
        cfg=cfg,
        p=BprParams(lam=1.0, beta=1.0),
        forced={0: 2},
    )


def run_two_path_example() -> EpisodeResult:
    """TACTS con la modalidad 2 forzada en el primer paso."""
    example = load_two_path_example()
    return run_tacts_episode(
        example.net,
        example.commodity,
        example.true_flows,
        example.modalities,
        example.cfg,
        example.p,
        forced=example.forced,
    )
