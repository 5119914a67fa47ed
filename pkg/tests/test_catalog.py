import pytest

from oracles import loop_realised
from wangtrans import catalog
from wangtrans.core import from_tileset, power, restrict, trim
from wangtrans.formats import parse_transducer
from wangtrans.loops import find_loop, find_periodic_loop


def test_example1_shape():
    ts = catalog.example1()
    assert len(ts.tiles) == 4
    assert ts.hcolors == {"B", "R", "V"}
    assert ts.vcolors == {"R", "V"}
    assert len(from_tileset(ts).edges) == 4


def test_example1_square():
    t2 = power(from_tileset(catalog.example1()), 2, do_trim=True)
    assert {".".join(s) for s in t2.states} == {"R.V", "B.R", "V.V", "V.R", "R.B", "V.B", "R.R"}
    assert len(t2.edges) == 8


def test_example1_cube_contains_the_five_cycle():
    t3 = power(from_tileset(catalog.example1()), 3)
    cycle = ["RVV", "BRR", "VVB", "RRV", "VBR"]
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        assert any(e.src == tuple(a) and e.dst == tuple(b) for e in t3.edges)


# --------------------------------------------------------------------------
# Robinson


def test_robinson_fixture_is_frozen():
    t = catalog.robinson()
    assert (len(t.states), len(t.edges)) == (6, 28)
    assert t == catalog.robinson_from_model()
    assert len(catalog.fixture_checksum("robinson.transducer")) == 64


def test_robinson_fixture_matches_figure_transcription():
    rows = catalog.robinson_figure_edges()
    assert {(src, dst) for _, src, dst, _, _ in rows} == {(e.src[0], e.dst[0]) for e in catalog.robinson().edges}


def test_robinson_is_trim_and_has_a_line_loop():
    t = catalog.robinson()
    assert trim(t) == t
    loop = find_loop(t)
    assert loop is not None and loop.height == 1
    assert loop_realised([e for e in _tiles(t)], loop)


def _tiles(t):
    from wangtrans.core import Tile

    return [Tile(e.src[0], e.dst[0], e.bottom[0], e.top[0]) for e in t.edges]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_robinson_H_heights_and_labels(n):
    h = catalog.robinson_H(n)
    assert h.height == catalog.g_robinson(n) == 2**n - 1
    assert len(h.states) == 6
    for e in h.edges:
        assert len(e.bottom) == len(e.top)
        assert all(len(s) == h.height for s in (e.src, e.dst))
        if catalog.robinson_H_edge_name(e) in ("e1", "e-1", "e3", "e-3"):
            # supertile edges are as wide as they are tall
            assert len(e.bottom) == h.height


def test_robinson_H_two_side_line_pattern():
    h2 = catalog.robinson_H(2)
    e2 = [e for e in h2.edges if catalog.robinson_H_edge_name(e) == "e2"]
    assert {e.src for e in e2} == {("r", "rb", "r")}
    assert {e.dst for e in e2} == {("l", "lb", "l")}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_robinson_H_loop_in_low_edges(n):
    h = catalog.robinson_H(n)
    low = restrict(h, lambda e: catalog.robinson_H_edge_name(e) in ("e0", "e1", "e2", "e3"))
    assert find_loop(low) is not None


def test_robinson_H_rejects_zero():
    with pytest.raises(ValueError):
        catalog.robinson_H(0)


def test_robinson_H_meets_the_cube():
    from wangtrans.core import submodels

    assert submodels(power(catalog.robinson(), 3, do_trim=True), catalog.robinson_H(2))
    assert submodels(catalog.robinson(), catalog.robinson_H(1))


# --------------------------------------------------------------------------
# Jeandel-Rao


def test_jeandel_rao_tiles():
    ts = catalog.jeandel_rao()
    assert len(ts.tiles) == 11
    assert len(ts.hcolors) == 5 and len(ts.vcolors) == 4


def test_jeandel_rao_compatible_but_no_short_period():
    t = from_tileset(catalog.jeandel_rao())
    assert find_loop(t) is not None
    for k in range(1, 7):
        assert find_periodic_loop(power(t, k, do_trim=True), 16) is None


def test_jr_heights_are_fibonacci():
    g = [catalog.g_jr(n) for n in range(22)]
    assert g[:2] == [1, 2]
    assert all(g[n + 2] == g[n + 1] + g[n] for n in range(20))


def test_jr_alpha_zero_is_empty_and_collapses():
    a0 = catalog.jr_words(0)["alpha"]
    assert len(a0[2]) == len(a0[3]) == catalog.g_jr(2) - 3 == 0
    t0 = catalog.jr_T(0)
    assert t0.states == (("a",),) and len(t0.edges) == 5


@pytest.mark.parametrize("n", range(0, 9))
def test_jr_T_shape(n):
    words = catalog.jr_words(n)
    for name, (_, _, b, t) in words.items():
        assert len(b) == len(t), name
    t = catalog.jr_T(n)
    assert t.height == catalog.g_jr(n)
    assert find_loop(t) is not None


def test_jr_T_rejects_negative():
    with pytest.raises(ValueError):
        catalog.jr_T(-1)


# --------------------------------------------------------------------------
# Appendix loops


def test_appendix_loops():
    fx = catalog.appendix_fixtures()
    assert fx.loops[0].states[0] == ("R", "V", "V")
    assert all(l.height == 3 and l.order == 5 for l in fx.loops)
    # t_i = b_sigma(i): b1 = t4, b2 = t5, b3 = t1, b4 = t2, b5 = t3
    b = [l.bottom for l in fx.loops]
    t = [l.top for l in fx.loops]
    assert (b[0], b[1], b[2], b[3], b[4]) == (t[3], t[4], t[0], t[1], t[2])
    orbit = [0]
    while fx.sigma[orbit[-1]] != 0:
        orbit.append(fx.sigma[orbit[-1]])
    assert len(orbit) == 5


def test_generators_are_deterministic():
    assert catalog.robinson_H(3) == catalog.robinson_H(3)
    assert catalog.jr_T(5) == catalog.jr_T(5)
    assert catalog.example1() == catalog.example1()
    assert parse_transducer(catalog._data("robinson.transducer")) == catalog.robinson()
