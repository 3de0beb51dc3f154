import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from socialbotnet.graph import ActionGraphError, BotnetInstance, UserRole, build_action_graph
from socialbotnet.io import (
    read_edge_list,
    read_follower_sets,
    read_roles,
    write_edge_list,
    write_follower_sets,
    write_roles,
)

records = st.lists(
    st.tuples(st.integers(0, 20), st.integers(0, 20), st.integers(1, 9)).filter(lambda r: r[0] != r[1]),
    max_size=60,
)


def test_duplicate_records_are_summed():
    g = build_action_graph([(1, 2, 3), (1, 2, 2)])
    assert g.arcs == {(1, 2): 5}
    assert g.num_arcs == 1


def test_empty_graph():
    g = build_action_graph([])
    assert g.num_arcs == 0
    assert g.vertices == frozenset()


def test_isolated_users_are_vertices():
    g = build_action_graph([(1, 2, 1)], isolated=[7])
    assert 7 in g.vertices
    assert g.out_weight(7) == 0
    assert g.in_weight(7) == 0


def test_self_loops_rejected_with_every_offending_record():
    with pytest.raises(ActionGraphError) as exc:
        build_action_graph([(1, 1, 1), (1, 2, 1), (3, 3, 2), (4, 5, 0)])
    errs = exc.value.errors
    assert len(errs) == 3
    assert errs[0].startswith("record 0")
    assert errs[1].startswith("record 2")
    assert "positive" in errs[2]


def test_out_weight():
    g = build_action_graph([(1, 2, 5), (1, 3, 2)])
    assert g.out_weight(1) == 7
    assert g.out_weight(2) == 0
    with pytest.raises(KeyError):
        g.out_weight(99)


def test_out_weight_matches_adjacency_scan():
    rng = random.Random(5)
    recs = []
    while len(recs) < 50:
        s, d = rng.randrange(15), rng.randrange(15)
        if s != d:
            recs.append((s, d, rng.randint(1, 6)))
    g = build_action_graph(recs)
    for v in g.vertices:
        expected = sum(c for s, _, c in recs if s == v)
        assert g.out_weight(v) == expected


@given(records)
def test_out_weights_sum_to_total_weight(recs):
    g = build_action_graph(recs)
    assert sum(g.out_weight(v) for v in g.vertices) == g.total_weight == sum(r[2] for r in recs)


@given(records, st.randoms())
def test_build_is_order_independent(recs, rnd):
    shuffled = list(recs)
    rnd.shuffle(shuffled)
    assert build_action_graph(recs) == build_action_graph(shuffled)


def test_botnet_union_and_checks():
    bn = BotnetInstance((11, 10), {10: {1, 2}, 11: {2, 3}})
    assert bn.bots == (10, 11)
    assert bn.follower_union == frozenset({1, 2, 3})
    assert frozenset().union(*bn.followers.values()) == bn.follower_union
    with pytest.raises(ValueError):
        BotnetInstance((10, 11), {10: {11}})
    with pytest.raises(ValueError):
        BotnetInstance((10,), {10: {1}}, follower_union=frozenset({1, 2}))


def test_seed_is_legit():
    assert UserRole.SEED.is_legit and UserRole.LEGIT.is_legit
    assert not UserRole.BOT.is_legit


def test_edge_list_roundtrip(tmp_path):
    g = build_action_graph([(1, 2, 3), (2, 1, 1), (3, 1, 4)])
    write_edge_list(g, tmp_path / "e.tsv")
    assert read_edge_list(tmp_path / "e.tsv") == g


def test_edge_list_reports_line_numbers(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("# header\n1\t2\t1\n5\t5\t1\n")
    with pytest.raises(ActionGraphError) as exc:
        read_edge_list(p)
    assert exc.value.errors[0].startswith(f"{p}:3:")
    p.write_text("1\t2\n")
    with pytest.raises(ValueError, match=":1:"):
        read_edge_list(p)


def test_table_scale_edge_list_totals(tmp_path):
    # a file shaped like the smallest crawled city: 162,333 arcs, total weight 669,006
    n_arcs, total = 162_333, 669_006
    rng = random.Random(0)
    weights = [1] * n_arcs
    for _ in range(total - n_arcs):
        weights[rng.randrange(n_arcs)] += 1
    p = tmp_path / "ts.tsv"
    with p.open("w") as fh:
        for i, w in enumerate(weights):
            fh.write(f"{i // 28_000}\t{10 + i % 28_000}\t{w}\n")
    g = read_edge_list(p)
    assert g.num_arcs == n_arcs
    assert g.total_weight == total


def test_follower_and_role_roundtrip(tmp_path):
    bn = BotnetInstance((10, 11, 12), {10: {1, 2}, 11: {3}, 12: set()})
    write_follower_sets(bn, tmp_path / "f.tsv")
    assert read_follower_sets(tmp_path / "f.tsv", bots=bn.bots) == bn
    roles = {1: UserRole.LEGIT, 2: UserRole.SEED, 10: UserRole.BOT}
    write_roles(roles, tmp_path / "r.tsv")
    assert read_roles(tmp_path / "r.tsv") == roles
    (tmp_path / "bad.tsv").write_text("1\tmartian\n")
    with pytest.raises(ValueError, match="unknown role"):
        read_roles(tmp_path / "bad.tsv")
