import dataclasses

import numpy as np
import pytest

from src.errors import ConfigError, PreconditionError
from src.simulation.harness import (
    ExperimentConfig,
    ResultRecord,
    aggregate,
    build_instance,
    run_experiment,
    run_sweep,
)


def record(
    algorithm, ratio, *, wall=100, failed=False, rep=0, congestion="medium", f_c=10.0, network="grid"
):
    return ResultRecord(
        algorithm=algorithm,
        repetition=rep,
        network=network,
        origin=1,
        destination=4,
        congestion=congestion,
        f_c=f_c,
        modality_count=2,
        performance_ratio=None if failed else ratio,
        realized_total_time=None if failed else 100.0 * ratio,
        realized_vehicle_time=None if failed else 20.0 * ratio,
        oracle_time=None if failed else 100.0,
        regret_sum=0.0,
        wall_clock_micros=wall,
        failed=failed,
        seed=7,
    )


@pytest.mark.parametrize(
    "overrides",
    [
        {"congestion_level": "extreme"},
        {"repetitions": 0},
        {"f_c": 0.0},
        {"modality_count_range": "3:2"},
        {"algorithms": "tacts,magic"},
        {"N": 0},
        {"epsilon": 1.5},
        {"doc_window": 1, "doc_gamma": 2},
        {"tasr_prior": "oracle"},
    ],
)
def test_config_validation(overrides):
    with pytest.raises(ConfigError):
        ExperimentConfig(network_path="net.tntp", **overrides)


def test_config_from_mapping_accepts_flag_names():
    cfg = ExperimentConfig.from_mapping(
        {
            "network": "net.tntp",
            "reps": 4,
            "algos": "tacts, oracle",
            "modalities": "2:3",
            "max-path-edges": 4,
            "seed": 9,
            "fc": 30,
        }
    )
    assert cfg.repetitions == 4
    assert cfg.algorithms == ("tacts", "oracle")
    assert cfg.modality_count_range == (2, 3)
    assert cfg.max_path_edges == 4
    assert cfg.base_seed == 9
    assert cfg.f_c == 30
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping({"network": "net.tntp", "colour": "red"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping({"reps": 2})


def test_build_instance_low_congestion(grid_net):
    cfg = ExperimentConfig(network_path="grid", congestion_level="low", modality_count_range=(2, 2))
    inst = build_instance(cfg, 0, grid_net)
    assert np.array_equal(inst.true_flows.flows, grid_net.capacity * 0.25)
    assert inst.true_flows[0] == grid_net.capacity[0] * 0.25
    assert [m.modality_id for m in inst.modalities] == [1, 2]
    assert all(0.0 <= m.true_trust <= 1.0 for m in inst.modalities)


def test_build_instance_is_deterministic(grid_net):
    cfg = ExperimentConfig(network_path="grid", base_seed=5)
    a, b = build_instance(cfg, 3, grid_net), build_instance(cfg, 3, grid_net)
    assert a.commodity == b.commodity
    assert a.modalities == b.modalities
    assert a.seed == b.seed
    assert build_instance(cfg, 4, grid_net).seed != a.seed


def test_build_instance_without_commodities():
    from src.simulation.network import TrafficNetwork

    isolated = TrafficNetwork.from_edges([], node_count=2)
    with pytest.raises(ConfigError):
        build_instance(ExperimentConfig(network_path="x"), 0, isolated)


def test_run_experiment_pairs_instances(grid_file):
    cfg = ExperimentConfig(network_path=str(grid_file), repetitions=3, max_path_edges=4)
    records = run_experiment(cfg)
    assert len(records) == 3 * 6
    assert [(r.repetition, r.algorithm) for r in records[:6]] == [
        (0, name) for name in ("tacts", "doc", "tasr", "rcs", "sc", "oracle")
    ]
    for rep in range(3):
        group = [r for r in records if r.repetition == rep]
        assert len({(r.origin, r.destination, r.seed, r.modality_count) for r in group}) == 1
        oracle = next(r for r in group if r.algorithm == "oracle")
        assert oracle.performance_ratio == 1.0
        for r in group:
            assert not r.failed
            assert r.performance_ratio >= 1.0
            assert r.oracle_time == oracle.oracle_time


def test_single_modality_sc_matches_oracle(grid_file):
    cfg = ExperimentConfig(
        network_path=str(grid_file),
        repetitions=4,
        algorithms=("sc", "oracle"),
        modality_count_range=(1, 1),
        max_path_edges=4,
    )
    ratios = [r.performance_ratio for r in run_experiment(cfg) if r.algorithm == "sc"]
    assert ratios == [1.0] * 4


def test_adding_an_algorithm_keeps_other_episodes(grid_file):
    base = ExperimentConfig(
        network_path=str(grid_file), repetitions=2, algorithms=("tacts",), max_path_edges=4
    )
    more = dataclasses.replace(base, algorithms=("tacts", "rcs", "doc"))
    first = [r for r in run_experiment(base)]
    second = [r for r in run_experiment(more) if r.algorithm == "tacts"]
    strip = lambda rs: [dataclasses.replace(r, wall_clock_micros=0) for r in rs]  # noqa: E731
    assert strip(first) == strip(second)


def test_runs_are_reproducible(grid_file):
    cfg = ExperimentConfig(network_path=str(grid_file), repetitions=2, max_path_edges=4)
    strip = lambda rs: [dataclasses.replace(r, wall_clock_micros=0) for r in rs]  # noqa: E731
    assert strip(run_experiment(cfg)) == strip(run_experiment(cfg))


def test_sweep_covers_requested_cells(grid_file):
    cfg = ExperimentConfig(
        network_path=str(grid_file), algorithms=("tacts", "oracle"), max_path_edges=4
    )
    records = run_sweep(cfg, ["low", "high"], [1.0, 30.0])
    cells = {(r.congestion, r.f_c) for r in records}
    assert cells == {("low", 1.0), ("low", 30.0), ("high", 1.0), ("high", 30.0)}


def test_aggregate_examples():
    rows = aggregate([record("tacts", 1.0, wall=100), record("tacts", 1.1, wall=300, rep=1)])
    assert len(rows) == 1
    assert rows[0].mean_ratio == pytest.approx(1.05)
    assert rows[0].std_ratio == pytest.approx(0.05)
    assert rows[0].mean_wall_clock_micros == 200.0
    assert rows[0].exec_time_ratio == 1.0
    assert rows[0].improvement_vs_tacts_pct == 0.0
    assert rows[0].mean_vehicle_time == pytest.approx(21.0)


def test_aggregate_relative_to_tacts():
    rows = aggregate(
        [record("tacts", 1.0, wall=100), record("doc", 1.1, wall=50), record("sc", 1.2, failed=True)]
    )
    by_algorithm = {row.algorithm: row for row in rows}
    assert by_algorithm["doc"].exec_time_ratio == 0.5
    assert by_algorithm["doc"].improvement_vs_tacts_pct == pytest.approx(10.0)
    missing = by_algorithm["sc"]
    assert missing.failures == 1
    assert missing.mean_ratio is None
    assert missing.missing


def test_aggregate_needs_records():
    with pytest.raises(PreconditionError):
        aggregate([])


def test_aggregate_keeps_networks_apart():
    rows = aggregate(
        [
            record("tacts", 1.0, network="grid"),
            record("tacts", 1.2, network="SiouxFalls_net"),
            record("oracle", 1.0, network="grid"),
            record("oracle", 1.0, network="SiouxFalls_net"),
        ]
    )
    by_cell = {(row.network, row.algorithm): row for row in rows}
    assert len(rows) == 4
    assert by_cell[("grid", "tacts")].mean_ratio == 1.0
    assert by_cell[("SiouxFalls_net", "tacts")].mean_ratio == pytest.approx(1.2)
    assert by_cell[("SiouxFalls_net", "tacts")].episodes == 1


def test_records_carry_network_and_vehicle_time(grid_file):
    cfg = ExperimentConfig(
        network_path=str(grid_file), repetitions=2, algorithms=("tacts", "oracle"), max_path_edges=4
    )
    records = run_experiment(cfg)
    assert {r.network for r in records} == {"grid_net"}
    for r in records:
        assert 0 < r.realized_vehicle_time <= r.realized_total_time
