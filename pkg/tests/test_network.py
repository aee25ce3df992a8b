import pytest

from src.errors import ParseError, PreconditionError, ValidationError
from src.simulation.network import (
    TrafficNetwork,
    enumerate_commodities,
    is_simple_path,
    load_network,
    outgoing_edges,
    parse_tntp,
    path_nodes,
    serialize_tntp,
    simple_paths,
)

from .conftest import SIOUX_FALLS, TWO_PATH

HEADER = "<NUMBER OF NODES> 3\n<NUMBER OF LINKS> {links}\n<END OF METADATA>\n"


def test_parse_two_path_file():
    net = load_network(TWO_PATH)
    assert net.nodes == (1, 2, 3, 4, 5, 6)
    assert net.edge_count == 6
    assert (net.tail(3), net.head(3)) == (1, 5)
    assert list(net.free_flow) == [1.0, 1.0, 1.0, 2.0, 3.0, 3.0]
    assert list(net.capacity) == [10.0] * 6


def test_sioux_falls_dimensions():
    net = load_network(SIOUX_FALLS)
    assert len(net.nodes) == 24
    assert net.edge_count == 76
    assert all(edge.edge_id == index for index, edge in enumerate(net.edges))


def test_serialize_round_trip(grid_net):
    assert parse_tntp(serialize_tntp(grid_net)) == grid_net
    sioux = load_network(SIOUX_FALLS)
    assert parse_tntp(serialize_tntp(sioux)) == sioux


def test_parse_error_reports_line_number():
    text = HEADER.format(links=1) + "1 2 abc 1 1 ;\n"
    with pytest.raises(ParseError) as info:
        parse_tntp(text)
    assert info.value.line_number == 4
    assert "linea 4" in str(info.value)


def test_missing_end_of_metadata():
    with pytest.raises(ParseError):
        parse_tntp("<NUMBER OF NODES> 3\n1 2 10 1 1\n")


def test_nonpositive_capacity_rejected():
    with pytest.raises(ValidationError):
        parse_tntp(HEADER.format(links=1) + "1 2 0 1 1 ;\n")


def test_link_count_mismatch():
    with pytest.raises(ValidationError):
        parse_tntp(HEADER.format(links=2) + "1 2 10 1 1 ;\n")


def test_dangling_node_rejected():
    with pytest.raises(ValidationError):
        parse_tntp(HEADER.format(links=1) + "1 7 10 1 1 ;\n")


def test_self_loop_rejected():
    with pytest.raises(ValidationError):
        TrafficNetwork.from_edges([(1, 1, 1.0, 10.0)])


def test_simple_paths_sorted_and_capped():
    net = load_network(TWO_PATH)
    assert simple_paths(net, 1, 4, 5) == ((0, 1, 2), (3, 4, 5))
    assert simple_paths(net, 1, 4, 2) == ()
    assert simple_paths(net, 1, 4, 5, frozenset({5})) == ((0, 1, 2),)
    assert simple_paths(net, 4, 4, 5) == ((),)


def test_enumerate_commodities(grid_net):
    net = load_network(TWO_PATH)
    commodities = enumerate_commodities(net, 5)
    assert len(commodities) == 11
    by_pair = {(c.origin, c.destination): c for c in commodities}
    assert by_pair[(1, 4)].candidate_paths == ((0, 1, 2), (3, 4, 5))
    assert (4, 1) not in by_pair
    assert all(len(p) <= 2 for c in enumerate_commodities(grid_net, 2) for p in c.candidate_paths)
    with pytest.raises(PreconditionError):
        enumerate_commodities(net, 0)


def test_outgoing_edges_in_file_order():
    net = load_network(TWO_PATH)
    assert outgoing_edges(net, 1) == [0, 3]
    assert outgoing_edges(net, 4) == []
    with pytest.raises(KeyError):
        outgoing_edges(net, 99)


def test_path_nodes_validates_connectivity():
    net = load_network(TWO_PATH)
    assert path_nodes(net, (3, 4, 5)) == [1, 5, 6, 4]
    assert is_simple_path(net, (0, 1, 2))
    with pytest.raises(ValidationError):
        path_nodes(net, (0, 4))
