import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import ValidationError
from src.simulation.beliefs import (
    BeliefVector,
    FlowBelief,
    ModalityProfile,
    dump_beliefs,
    generate_modality_belief,
    load_beliefs,
    system_belief_update,
    validate_belief_vector,
)
from src.simulation.costmodel import FlowState
from src.simulation.network import TrafficNetwork


def test_system_belief_update_reuses_equal_vector(two_path):
    first = system_belief_update(None, two_path.true_flows)
    assert first.is_point_mass
    assert list(first.point_values()) == [0.0, 0.0, 0.0, 40.0, 20.0, 0.0]
    assert system_belief_update(first, two_path.true_flows) is first
    changed = system_belief_update(first, FlowState([1.0] * 6))
    assert changed is not first


def test_full_trust_reproduces_true_flows(grid_net):
    flows = FlowState.scaled_capacity(grid_net, 0.75)
    belief = generate_modality_belief(flows, grid_net, 1.0, np.random.default_rng(3))
    assert np.array_equal(belief.point_values(), flows.flows)


def test_zero_trust_stays_in_noise_band(grid_net):
    flows = FlowState.scaled_capacity(grid_net, 0.25)
    values = generate_modality_belief(flows, grid_net, 0.0, np.random.default_rng(5)).point_values()
    half_width = 1.5 * grid_net.capacity
    assert np.all(values >= np.maximum(0.0, flows.flows - half_width))
    assert np.all(values <= flows.flows + half_width)


def test_generation_is_deterministic(grid_net):
    flows = FlowState.scaled_capacity(grid_net, 1.5)
    a = generate_modality_belief(flows, grid_net, 0.4, np.random.default_rng(11))
    b = generate_modality_belief(flows, grid_net, 0.4, np.random.default_rng(11))
    assert a == b


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0), st.integers(min_value=0, max_value=2**32 - 1))
def test_generated_beliefs_are_valid(grid_net, trust, seed):
    flows = FlowState.scaled_capacity(grid_net, 0.75)
    belief = generate_modality_belief(flows, grid_net, trust, np.random.default_rng(seed))
    validate_belief_vector(belief, grid_net)


def test_generation_rejects_bad_trust(grid_net):
    flows = FlowState.scaled_capacity(grid_net, 0.75)
    with pytest.raises(ValidationError):
        generate_modality_belief(flows, grid_net, 1.5, np.random.default_rng(0))
    with pytest.raises(ValidationError):
        ModalityProfile(1, -0.1, BeliefVector.point_masses(flows))


def test_validate_names_offending_edge(two_path):
    short = BeliefVector(two_path.modalities[0].beliefs.beliefs[:5])
    with pytest.raises(ValidationError, match="arco 5"):
        validate_belief_vector(short, two_path.net)
    beliefs = list(two_path.modalities[0].beliefs.beliefs)
    beliefs[2] = FlowBelief((1.0, 1.0), (0.5, 0.5))
    with pytest.raises(ValidationError, match="Arco 2"):
        validate_belief_vector(BeliefVector(tuple(beliefs)), two_path.net)


def test_dump_and_load(tmp_path, two_path):
    mixed = BeliefVector(
        (FlowBelief((0.0, 10.0), (0.25, 0.75)),) + two_path.modalities[1].beliefs.beliefs[1:]
    )
    path = tmp_path / "beliefs.json"
    dump_beliefs(mixed, path)
    loaded = load_beliefs(path)
    assert loaded == mixed
    assert loaded.per_edge[0].mean() == 7.5


@pytest.fixture(scope="module")
def long_chain():
    # 1000 arcos iguales: c=10 y flujo real 5.
    net = TrafficNetwork.from_edges([(n, n + 1, 1.0, 10.0) for n in range(1, 1001)])
    return net, FlowState([5.0] * 1000)


def draws(long_chain, trust, rounds, seed):
    net, flows = long_chain
    rng = np.random.default_rng(seed)
    return np.concatenate(
        [generate_modality_belief(flows, net, trust, rng).point_values() for _ in range(rounds)]
    )


def ks_uniform(values, low, high):
    values = np.sort(values)
    n = len(values)
    cdf = (values - low) / (high - low)
    above = np.arange(1, n + 1) / n - cdf
    below = cdf - np.arange(n) / n
    return float(max(above.max(), below.max()))


@pytest.mark.parametrize("trust", [0.1, 0.3, 0.8])
def test_exact_estimates_appear_at_trust_rate(long_chain, trust):
    values = draws(long_chain, trust, rounds=100, seed=61)
    n = len(values)
    exact = int(np.count_nonzero(values == 5.0))
    assert abs(exact - n * trust) <= 3 * np.sqrt(n * trust * (1 - trust))


def test_zero_trust_estimates_are_uniform_on_clipped_band(long_chain):
    values = draws(long_chain, 0.0, rounds=100, seed=67)
    assert values.min() >= 0.0 and values.max() <= 20.0
    assert ks_uniform(values, 0.0, 20.0) < 1.95 / np.sqrt(len(values))


def test_noisy_estimates_are_uniform_on_their_band(long_chain):
    values = draws(long_chain, 0.3, rounds=100, seed=71)
    noisy = values[values != 5.0]
    high = 5.0 + 1.5 * 10.0 * 0.7**0.5
    assert noisy.min() >= 0.0 and noisy.max() <= high
    assert ks_uniform(noisy, 0.0, high) < 1.95 / np.sqrt(len(noisy))
