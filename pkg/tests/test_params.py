import pytest
from hypothesis import given
from hypothesis import strategies as st

from d2dmot.errors import SizeUnsupported
from d2dmot.params import TopoParams, params_for


def test_mesh_4x4():
    p = params_for("mesh", (4, 4))
    assert (p.diameter, p.bisection_width, p.router_count, p.link_count) == (6, 4, 16, 24)
    assert p.node_degree == {"corner": 3, "boundary": 4, "central": 5}


def test_torus_4x4():
    p = params_for("torus", (4, 4))
    assert (p.diameter, p.bisection_width) == (4, 8)


def test_folded_torus_matches_torus():
    assert params_for("folded_torus", (5, 7)) == params_for("torus", (5, 7))


def test_bintree():
    p = params_for("bintree", 8)
    assert (p.diameter, p.bisection_width, p.router_count) == (3, 1, 7)
    assert p.node_degree == {"leaf": 5, "stem": 3, "root": 2}


@pytest.mark.parametrize("n, diameter, bisection, routers", [(8, 2, 6, 8), (4, 0, 6, 8), (16, 4, 18, 24), (64, 16, 54, 72)])
def test_octagon(n, diameter, bisection, routers):
    p = params_for("octagon", n)
    assert (p.diameter, p.bisection_width, p.router_count) == (diameter, bisection, routers)


def test_spin():
    p = params_for("spin", 64)
    assert (p.diameter, p.bisection_width, p.router_count) == (6, 32, 192)
    with pytest.raises(SizeUnsupported):
        params_for("spin", 4)


def test_bft():
    p = params_for("bft", 64)
    assert (p.diameter, p.bisection_width, p.router_count) == (6, 8, 32)


def test_mot():
    p = params_for("mot", (4, 4))
    assert (p.diameter, p.bisection_width, p.router_count, p.link_count, p.ip_count) == (8, 4, 40, 48, 16)


def test_d2dmot_table():
    p = params_for("d2dmot", (4, 4))
    assert (p.router_count, p.link_count, p.ip_count) == (40, 58, 32)
    assert p.node_degree == {"leaf": 5, "stem": 3, "internal_root": 3, "external_root": 2}
    assert p.diameter is None


def test_d2dmesh_links():
    assert params_for("d2dmesh", (4, 4)).link_count == 32


@pytest.mark.parametrize("family, size", [("mot", (3, 4)), ("bft", 12), ("bintree", 6), ("mesh", (0, 3))])
def test_unsupported(family, size):
    with pytest.raises(SizeUnsupported):
        params_for(family, size)


def test_custom_has_no_formula():
    with pytest.raises(SizeUnsupported):
        params_for("custom", 4)


def test_negative_fields_rejected():
    with pytest.raises(ValueError):
        TopoParams(diameter=-1, bisection_width=0, router_count=1)


@given(st.integers(1, 40), st.integers(1, 40))
def test_grid_params_non_negative(m, n):
    for fam in ("mesh", "torus", "folded_torus", "d2dmesh"):
        p = params_for(fam, (m, n))
        assert p.router_count == m * n
        assert p.diameter is None or p.diameter >= 0


@given(st.integers(0, 8), st.integers(0, 8))
def test_mot_diameter_is_four_log(a, b):
    p = params_for("mot", (2**a, 2**b))
    assert p.diameter == 2 * a + 2 * b
