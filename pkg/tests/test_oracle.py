import dataclasses
import itertools

import numpy as np
import pytest

from src.errors import OracleTooLargeError
from src.simulation.baselines import run_sc_episode
from src.simulation.beliefs import BeliefVector, ModalityProfile
from src.simulation.costmodel import realized_network_time
from src.simulation.harness import ExperimentConfig, build_instance
from src.simulation.oracle import compute_oracle
from src.simulation.tacts import TactsConfig, run_tacts_episode


def test_two_path_oracle(two_path):
    result = compute_oracle(
        two_path.net,
        two_path.commodity,
        two_path.true_flows,
        two_path.modalities,
        two_path.cfg,
        two_path.p,
    )
    assert result.tau_star == 78.0
    assert result.path == (0, 1, 2)
    # Los pasos 2 y 3 no tienen alternativa: se acreditan a la menor modalidad.
    assert result.best_sequence == (1, 1, 1)
    assert result.tau_star == realized_network_time(
        two_path.net, two_path.true_flows, result.path, 10.0, two_path.p
    )


def test_single_modality_oracle_equals_sc(two_path):
    only = two_path.modalities[1:]
    args = (two_path.net, two_path.commodity, two_path.true_flows, only)
    oracle = compute_oracle(*args, two_path.cfg, two_path.p)
    sc = run_sc_episode(*args, 2, two_path.cfg, two_path.p)
    assert oracle.tau_star == sc.realized_total_time == 83.0


def test_shared_beliefs_make_sequence_irrelevant(two_path):
    shared = tuple(
        ModalityProfile(m, 0.5, two_path.modalities[1].beliefs) for m in (1, 2, 3)
    )
    oracle = compute_oracle(
        two_path.net, two_path.commodity, two_path.true_flows, shared, two_path.cfg, two_path.p
    )
    assert oracle.tau_star == 83.0
    assert oracle.best_sequence == (1, 1, 1)


def test_guard_rejects_large_searches(two_path):
    modalities = tuple(
        ModalityProfile(m, 1.0, two_path.modalities[0].beliefs) for m in range(1, 7)
    )
    cfg = TactsConfig(f_c=10.0, max_path_edges=10)
    with pytest.raises(OracleTooLargeError):
        compute_oracle(
            two_path.net, two_path.commodity, two_path.true_flows, modalities, cfg, two_path.p
        )


def test_oracle_matches_brute_force_over_sequences(grid_net):
    cfg = ExperimentConfig(
        network_path="grid", modality_count_range=(2, 3), max_path_edges=4, f_c=10.0
    )
    tacts_cfg = cfg.tacts_config()
    for rep in range(8):
        inst = build_instance(cfg, rep, grid_net)
        oracle = compute_oracle(
            inst.net, inst.commodity, inst.true_flows, inst.modalities, tacts_cfg, cfg.bpr()
        )
        ids = [m.modality_id for m in inst.modalities]
        totals = []
        for sequence in itertools.product(ids, repeat=cfg.max_path_edges):
            episode = run_tacts_episode(
                inst.net,
                inst.commodity,
                inst.true_flows,
                inst.modalities,
                tacts_cfg,
                cfg.bpr(),
                forced=dict(enumerate(sequence)),
            )
            totals.append(episode.realized_total_time)
        assert oracle.tau_star == pytest.approx(min(totals), rel=1e-12)


def test_oracle_lower_bounds_tacts(grid_net):
    cfg = ExperimentConfig(network_path="grid", max_path_edges=4, f_c=1.0)
    for rep in range(10):
        inst = build_instance(cfg, rep, grid_net)
        args = (inst.net, inst.commodity, inst.true_flows, inst.modalities)
        oracle = compute_oracle(*args, cfg.tacts_config(), cfg.bpr())
        episode = run_tacts_episode(*args, cfg.tacts_config(), cfg.bpr(), rng=np.random.default_rng(rep))
        assert episode.realized_total_time >= oracle.tau_star - 1e-9
        ratio = episode.with_oracle(oracle.tau_star).performance_ratio
        assert ratio >= 1.0


def test_truthful_modalities_reach_the_optimum(grid_net):
    cfg = ExperimentConfig(network_path="grid", max_path_edges=4)
    inst = build_instance(cfg, 3, grid_net)
    truthful = tuple(
        dataclasses.replace(m, beliefs=BeliefVector.point_masses(inst.true_flows))
        for m in inst.modalities
    )
    args = (inst.net, inst.commodity, inst.true_flows, truthful)
    oracle = compute_oracle(*args, cfg.tacts_config(), cfg.bpr())
    episode = run_tacts_episode(*args, cfg.tacts_config(), cfg.bpr())
    assert episode.with_oracle(oracle.tau_star).performance_ratio == 1.0
