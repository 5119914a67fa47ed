import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import (
    all_small_tilesets,
    brute_compose_edges,
    brute_power_edges,
    brute_trim_edges,
    rectangle_exists,
)
from wangtrans import catalog
from wangtrans.core import (
    BudgetExceeded,
    Edge,
    LazyPower,
    MetaTransducer,
    Tile,
    WangTileset,
    compose,
    compose_paths,
    find_path,
    from_tileset,
    path_accepts,
    power,
    set_threads,
    submodels,
    to_tileset,
    trim,
    union,
)
from wangtrans.loops import find_loop

H = ("a", "b", "c")
V = ("0", "1", "2")


@st.composite
def tilesets(draw, colors=3, max_tiles=6):
    hs, vs = H[:colors], V[:colors]
    tile = st.tuples(st.sampled_from(hs), st.sampled_from(hs), st.sampled_from(vs), st.sampled_from(vs))
    tiles = draw(st.sets(tile, min_size=1, max_size=max_tiles))
    return WangTileset.build("h", tiles)


@st.composite
def plain_transducers(draw, states=4, max_edges=10):
    qs = [f"s{i}" for i in range(states)]
    edge = st.tuples(st.sampled_from(qs), st.sampled_from(qs), st.sampled_from(V[:2]), st.sampled_from(V[:2]))
    es = draw(st.sets(edge, min_size=1, max_size=max_edges))
    return MetaTransducer.make(((s,), (d,), (b,), (t,)) for s, d, b, t in es)


EXAMPLE_BIG = MetaTransducer.make(
    [
        (("R",), ("B",), ("R", "R"), ("R", "V")),
        (("B",), ("V",), ("R",), ("V",)),
        (("V",), ("R",), ("R",), ("R",)),
        (("R",), ("V",), ("V",), ("R",)),
    ]
)
EXAMPLE_SMALL = MetaTransducer.make([(("V",), ("R",), ("R",), ("R",)), (("R",), ("V",), ("V",), ("R",))])


# --------------------------------------------------------------------------
# types


def test_tileset_rejects_duplicates_and_undeclared_colors():
    t = Tile("a", "b", "0", "1")
    with pytest.raises(ValueError):
        WangTileset("x", frozenset("ab"), frozenset("01"), (t, t))
    with pytest.raises(ValueError):
        WangTileset("x", frozenset("a"), frozenset("01"), (t,))


def test_transducer_rejects_empty_labels():
    with pytest.raises(ValueError):
        MetaTransducer.make([(("a",), ("b",), (), ("0",))])


def test_canonical_equality_ignores_construction_order():
    es = list(EXAMPLE_BIG.edges)
    assert MetaTransducer.make(es) == MetaTransducer.make(reversed(es))
    assert hash(MetaTransducer.make(es)) == hash(MetaTransducer.make(reversed(es)))


def test_tileset_round_trip_through_transducer():
    ts = catalog.example1()
    assert to_tileset(from_tileset(ts), ts.name).tiles == ts.tiles


# --------------------------------------------------------------------------
# composition


def _compose_or_error(x, y):
    try:
        return compose(x, y)
    except ValueError as exc:
        return str(exc)


def _associative(a, b, c) -> bool:
    ab, bc = _compose_or_error(a, b), _compose_or_error(b, c)
    if isinstance(ab, str) or isinstance(bc, str):
        return True  # the disjoint-alphabet error is checked separately
    left, right = _compose_or_error(ab, c), _compose_or_error(a, bc)
    if isinstance(left, str) or isinstance(right, str):
        # one side hit an alphabet mismatch, so the other side must be empty or fail too
        return all(isinstance(x, str) or not x.edges for x in (left, right))
    return left == right


@settings(max_examples=60, deadline=None)
@given(tilesets(), tilesets())
def test_compose_matches_definition(a, b):
    assume(a.vcolors & b.vcolors)
    ta, tb = from_tileset(a), from_tileset(b)
    c = compose(ta, tb)
    assert set(c.edges) == brute_compose_edges(ta, tb)
    assert c.height == ta.height + tb.height


@settings(max_examples=60, deadline=None)
@given(tilesets(max_tiles=5), st.integers(1, 4))
def test_power_matches_columns(ts, k):
    assert set(power(from_tileset(ts), k).edges) == brute_power_edges(list(ts.tiles), k)


def test_composition_is_associative_on_small_sweep():
    pool = [from_tileset(WangTileset.build("s", t)) for t in all_small_tilesets(("a", "b"), ("0", "1"), 2)]
    rng = random.Random(1)
    for _ in range(400):
        a, b, c = (rng.choice(pool) for _ in range(3))
        assert _associative(a, b, c)


@settings(max_examples=40, deadline=None)
@given(tilesets(max_tiles=4), tilesets(max_tiles=4), tilesets(max_tiles=4))
def test_composition_is_associative_three_colors(a, b, c):
    a, b, c = map(from_tileset, (a, b, c))
    assert _associative(a, b, c)


def test_compose_rejects_disjoint_alphabets():
    t1 = MetaTransducer.make([(("a",), ("a",), ("0",), ("0",))])
    t2 = MetaTransducer.make([(("a",), ("a",), ("x",), ("x",))])
    with pytest.raises(ValueError):
        compose(t1, t2)


def test_example1_square_matches_figure():
    t2 = power(from_tileset(catalog.example1()), 2, do_trim=True)
    assert (len(t2.states), len(t2.edges)) == (7, 8)
    raw = power(from_tileset(catalog.example1()), 2)
    assert (len(raw.states), len(raw.edges)) == (9, 10)
    assert trim(raw) == t2


def test_threads_do_not_change_the_result():
    t = from_tileset(catalog.jeandel_rao())
    ref = power(t, 12, do_trim=True)
    try:
        set_threads(4)
        assert power(t, 12, do_trim=True) == ref
    finally:
        set_threads(1)


def test_power_budget():
    with pytest.raises(BudgetExceeded) as exc:
        power(from_tileset(catalog.jeandel_rao()), 10, max_edges=50)
    assert exc.value.k >= 1


def test_union_merges_edge_sets():
    u = union(EXAMPLE_SMALL, EXAMPLE_BIG)
    assert set(u.edges) == set(EXAMPLE_BIG.edges)


# --------------------------------------------------------------------------
# trimming


def test_trim_keeps_self_loop_and_drops_dead_edge():
    loop = MetaTransducer.make([(("a",), ("a",), ("0",), ("0",))])
    assert trim(loop) == loop
    dead = MetaTransducer.make([(("a",), ("b",), ("0",), ("0",))])
    assert trim(dead).edges == ()


@settings(max_examples=100, deadline=None)
@given(plain_transducers())
def test_trim_matches_long_walk_oracle(t):
    assert set(trim(t).edges) == brute_trim_edges(t.edges)


def test_trim_preserves_loop_existence():
    rng = random.Random(3)
    for _ in range(50):
        tiles = {tuple(rng.choice(x) for x in (H, H, V, V)) for _ in range(4)}
        t = from_tileset(WangTileset.build("r", tiles))
        for k in (1, 2, 3):
            p = power(t, k)
            assert (find_loop(p) is None) == (find_loop(trim(p)) is None)


# --------------------------------------------------------------------------
# paths and |=


def test_path_accepts_single_edge_and_mismatch():
    t = MetaTransducer.make([(("q",), ("r",), ("a", "b"), ("c", "d"))])
    assert path_accepts(t, "q", "r", "ab", "cd")
    assert not path_accepts(t, "q", "r", "ab", "c")
    assert not path_accepts(t, "r", "q", "ab", "cd")


def test_example1_two_tile_loop_at_vertical_state():
    t = from_tileset(catalog.example1())
    assert path_accepts(t, "V", "V", ("R", "V"), ("R", "R"))
    path = find_path(t, "V", "V", ("R", "V"), ("R", "R"))
    assert [e.dst for e in path] == [("R",), ("V",)]


@settings(max_examples=40, deadline=None)
@given(tilesets(max_tiles=6), st.integers(1, 3), st.data())
def test_power_paths_are_rectangles(ts, n, data):
    t = power(from_tileset(ts), n)
    cols = [tuple(x) for x in t.states] or [("a",) * n]
    p = data.draw(st.integers(1, 3))
    src = data.draw(st.sampled_from(cols))
    dst = data.draw(st.sampled_from(cols))
    letters = st.sampled_from(V)
    bottom = tuple(data.draw(st.lists(letters, min_size=p, max_size=p)))
    top = tuple(data.draw(st.lists(letters, min_size=p, max_size=p)))
    assert path_accepts(t, src, dst, bottom, top) == rectangle_exists(list(ts.tiles), n, bottom, top, src, dst)


def test_cut_example_pair():
    assert submodels(EXAMPLE_BIG, EXAMPLE_SMALL)
    assert not submodels(EXAMPLE_SMALL, EXAMPLE_BIG)
    assert submodels(EXAMPLE_BIG, EXAMPLE_BIG)


@settings(max_examples=60, deadline=None)
@given(plain_transducers(max_edges=8), st.data())
def test_cut_is_a_preorder(a, data):
    b_edges = data.draw(st.sets(st.sampled_from(a.edges), min_size=1))
    b = MetaTransducer.make(b_edges)
    c = MetaTransducer.make(data.draw(st.sets(st.sampled_from(sorted(b_edges)), min_size=1)))
    assert submodels(a, a)
    assert submodels(a, b) and submodels(b, c) and submodels(a, c)


def test_cut_reports_first_missing_edge():
    v = submodels(EXAMPLE_SMALL, EXAMPLE_BIG)
    assert not v.ok and v.missing == EXAMPLE_BIG.edges[0]


def test_robinson_meta_relation_at_one():
    h1, h2 = catalog.robinson_H(1), catalog.robinson_H(2)
    assert submodels(compose_paths(h1, catalog.robinson(), h1), h2)


# --------------------------------------------------------------------------
# lazy powers


@settings(max_examples=40, deadline=None)
@given(tilesets(max_tiles=6), st.integers(1, 4))
def test_lazy_power_matches_power(ts, k):
    t = from_tileset(ts)
    full = power(t, k)
    lazy = LazyPower(t, k)
    for s in full.states:
        assert set(lazy.out_edges(s)) == set(full.out_edges(s))


def test_lazy_power_rejects_meta_transducers():
    with pytest.raises(ValueError):
        LazyPower(catalog.robinson_H(2), 2)
