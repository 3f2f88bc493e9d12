"""
Tests for instance parsing, simplification and graph construction
"""

import json

import pytest

from msic.models import (
    GraphPair,
    InstanceError,
    PreconditionError,
    ProblemInstance,
    build_graphs,
    parse_instance,
    simplify,
)
from tests.conftest import seeded_instance


def test_parse_ex_a(ex_a):
    assert ex_a.num_messages == 6
    assert ex_a.num_senders == 4
    assert ex_a.senders[0] == frozenset({1, 3, 5})
    assert ex_a.wants[2] == frozenset({4})
    assert not ex_a.simplified


def test_parse_accepts_text_and_round_trips(ex_a):
    text = json.dumps(ex_a.to_document())
    assert parse_instance(text) == ex_a


@pytest.mark.parametrize(
    "document, path",
    [
        ({"num_messages": 2, "senders": [[1, 2]], "wants": [[1], []]}, "wants[0][0]"),
        ({"num_messages": 2, "senders": [[1, 2]], "wants": [[2]]}, "wants"),
        ({"num_messages": 2, "senders": [[1, 3]], "wants": [[2], [1]]}, "senders[0][1]"),
        ({"num_messages": 2, "senders": [[1]], "wants": [[2], [1]]}, "senders"),
        ({"num_messages": 2, "senders": [[1, 2], []], "wants": [[2], [1]]}, "senders[1]"),
        ({"num_messages": "2", "senders": [[1, 2]], "wants": [[2], [1]]}, "num_messages"),
        ({"senders": [[1, 2]], "wants": [[2], [1]]}, "num_messages"),
        ({"schema": 2, "num_messages": 2, "senders": [[1, 2]], "wants": [[2], [1]]}, "schema"),
    ],
)
def test_parse_rejects_invalid_documents(document, path):
    """Each violation is reported with the path of the offending field"""
    with pytest.raises(InstanceError) as e:
        parse_instance(document)
    assert e.value.path == path


def test_parse_rejects_bad_json():
    with pytest.raises(InstanceError):
        parse_instance("{not json")


def test_self_want_path_points_at_entry():
    with pytest.raises(InstanceError, match="self-want"):
        parse_instance({"num_messages": 3, "senders": [[1, 2, 3]], "wants": [[2, 1], [], []]})


def test_simplify_keeps_ex_a_unchanged(ex_a):
    simplified, removed = simplify(ex_a)
    assert removed == frozenset()
    assert simplified.senders == ex_a.senders
    assert simplified.simplified


def test_simplify_removes_unwanted_messages():
    inst = parse_instance({"num_messages": 3, "senders": [[1, 2], [3]], "wants": [[], [1], []]})
    simplified, removed = simplify(inst)
    assert removed == frozenset({2, 3})
    assert simplified.senders == (frozenset({1}), frozenset())
    # The emptied sender keeps its id and adds no edges
    assert build_graphs(simplified).edges == frozenset()


def test_build_graphs_requires_simplified(ex_a):
    with pytest.raises(PreconditionError):
        build_graphs(ex_a)


def test_build_graphs_ex_a(ex_a):
    g = build_graphs(simplify(ex_a)[0])
    assert g.arcs == {(1, 2), (2, 1), (3, 4), (4, 3), (5, 6), (6, 5)}
    assert g.edges == {(1, 3), (1, 5), (3, 5), (2, 3), (2, 5), (2, 4), (4, 5), (2, 6), (4, 6)}


def test_build_graphs_ex_b_and_ex_c(ex_b, ex_c):
    b = build_graphs(simplify(ex_b)[0])
    assert b.arcs == {(1, 2), (2, 3), (3, 1)}
    assert b.edges == {(1, 2), (1, 3), (2, 3)}
    c = build_graphs(simplify(ex_c)[0])
    assert c.arcs == {(1, 2), (2, 1)}
    assert c.edges == frozenset()


def test_message_graph_cannot_tell_one_sender_from_three_pairs():
    """A sender of three messages and three senders of the pairs give the same U"""
    wants = [[2], [3], [1]]
    one = parse_instance({"num_messages": 3, "senders": [[1, 2, 3]], "wants": wants})
    pairs = parse_instance({"num_messages": 3, "senders": [[1, 2], [1, 3], [2, 3]], "wants": wants})
    assert build_graphs(simplify(one)[0]) == build_graphs(simplify(pairs)[0])


def test_instance_helpers(ex_a):
    assert ex_a.message_owners(5) == (1, 2, 3)
    assert not ex_a.is_partitioned()
    assert ex_a.summary() == {"num_messages": 6, "num_senders": 4, "simplified": False, "partitioned": False}


def test_instance_rejects_self_want_directly():
    with pytest.raises(InstanceError):
        ProblemInstance(num_messages=1, senders=(frozenset({1}),), wants=(frozenset({1}),))


def test_graph_pair_mutation_guards():
    g = GraphPair(3)
    with pytest.raises(PreconditionError):
        g.add_arc(1, 1)
    with pytest.raises(PreconditionError):
        g.add_edge(1, 4)
    dummy = g.add_dummy()
    assert dummy == 4
    g.add_arc(1, dummy)
    assert g.v_out() == 1
    assert g.copy() == g
    assert g.remove_out_arcs(1) == [(1, 4)]
    assert g.v_out() == 0


@pytest.mark.parametrize("seed", range(20))
def test_random_instances_are_valid(seed):
    inst = seeded_instance(seed, 5)
    assert parse_instance(inst.to_document()) == inst


@pytest.mark.parametrize("seed", range(20))
def test_random_partitioned_instances(seed):
    inst = seeded_instance(seed, 5, partitioned=True)
    assert inst.is_partitioned()
    assert inst.owned_messages() == frozenset(range(1, 6))
