"""Tests for bounded cohomology on finite 2-complexes.

Loop-sum oracles are computed from the rectangle family in closed form:
a rectangle of sides w and h has loop sum w * h against the column-weight
cochain and perimeter 2 * (w + h), so the best ratio at even length L is
floor(L/4) * ceil(L/4) / L, attained by the squarest rectangle.
"""

import random
from fractions import Fraction

import pytest

from coarsebundle import (
    RatMatrix,
    classes_equivalent_via,
    coboundary_of_potential,
    d1,
    grid_complex,
    heisenberg_cochain,
    is_trivial,
    linear_bound_scan,
    primitive,
    solve_coboundary,
    tau_from_gluing,
)
from coarsebundle.errors import NotCoboundary, PositiveCycle, SingularMatrix
from coarsebundle.linf_cohomology import BaseComplex, Cochain1, Cochain2


def square_complex():
    """One square carried by two faces with the same boundary loop."""
    loop = (((0,), (1,)), ((1,), (2,)), ((2,), (3,)), ((3,), (0,)))
    return BaseComplex(vertices=((0,), (1,), (2,), (3,)), edges=loop,
                       faces=(loop, loop), basepoint=(0,))


def residual(complex_, a, f):
    df = coboundary_of_potential(complex_, f, a.dim)
    return {e: tuple(p + q for p, q in zip(a.value(e), df.value(e)))
            for e in complex_.edges}


# ---------------------------------------------------------------------------
# grid complexes


@pytest.mark.parametrize("width,height", [(2, 2), (5, 4), (9, 9), (3, 7)])
def test_grid_complex_counts(width, height):
    cx = grid_complex(width, height)
    assert len(cx.vertices) == width * height
    assert len(cx.edges) == 2 * width * height - width - height
    assert len(cx.faces) == (width - 1) * (height - 1)
    assert cx.grid_shape == (width, height)


def test_grid_complex_rejects_degenerate_sizes():
    with pytest.raises(ValueError):
        grid_complex(1, 5)
    with pytest.raises(ValueError):
        grid_complex(4, 0)


def test_grid_faces_are_closed_unit_squares():
    cx = grid_complex(4, 3)
    for face in cx.faces:
        assert len(face) == 4
        for i, (u, v) in enumerate(face):
            assert face[(i + 1) % 4][0] == v
        xs = {p[0] for e in face for p in e}
        ys = {p[1] for e in face for p in e}
        assert len(xs) == 2 and len(ys) == 2


# ---------------------------------------------------------------------------
# cochains and coboundaries


def test_cochain_defaults_to_zero_and_tracks_exactness():
    a = Cochain1(dim=2)
    assert a.value(((0,), (9,))) == (Fraction(0), Fraction(0))
    assert a.exact
    a.values[((0,), (1,))] = (0.5, 1.0)
    assert not a.exact


def test_column_weight_cochain_values():
    cx = grid_complex(5, 4)
    a = heisenberg_cochain(cx)
    assert a.value(((2, 1), (2, 2))) == (Fraction(2),)
    assert a.value(((0, 0), (0, 1))) == (Fraction(0),)
    assert a.value(((0, 0), (1, 0))) == (Fraction(0),)
    assert a.value(((2, 2), (2, 1))) == (Fraction(-2),)


def test_column_weight_cochain_needs_a_grid():
    with pytest.raises(ValueError):
        heisenberg_cochain(square_complex())


def test_area_form_is_one_on_every_cell():
    cx = grid_complex(6, 5)
    tau = d1(cx, heisenberg_cochain(cx))
    assert all(tau.value(i) == (Fraction(1),) for i in range(len(cx.faces)))


def test_gluing_defect_is_the_coboundary():
    cx = grid_complex(4, 4)
    a = heisenberg_cochain(cx)
    lhs = tau_from_gluing(cx, a)
    rhs = d1(cx, a)
    assert all(lhs.value(i) == rhs.value(i) for i in range(len(cx.faces)))


def test_coboundary_of_coboundary_vanishes():
    rng = random.Random(31)
    cx = grid_complex(5, 5)
    for _ in range(20):
        f = {v: (Fraction(rng.randint(-9, 9), rng.choice([1, 2, 3])),
                 Fraction(rng.randint(-9, 9), rng.choice([1, 2, 3])))
             for v in cx.vertices}
        ddf = d1(cx, coboundary_of_potential(cx, f, 2))
        assert all(ddf.value(i) == (Fraction(0), Fraction(0))
                   for i in range(len(cx.faces)))


# ---------------------------------------------------------------------------
# loop scanning


def test_scan_matches_rectangle_closed_form():
    cx = grid_complex(9, 9)
    table = linear_bound_scan(cx, heisenberg_cochain(cx))
    assert table.exact
    by_length = {row.length: row for row in table.rows}
    assert sorted(by_length) == list(range(4, 33, 2))
    for length, row in by_length.items():
        best = Fraction((length // 4) * (length - length // 4 * 2) // 2,
                        1)
        assert row.max_abs == (length // 4) * ((length + 2) // 4)
        assert row.ratio == Fraction(row.max_abs, length)
    assert table.max_ratio == Fraction(2)


def test_scan_witness_is_a_closed_loop_achieving_the_bound():
    cx = grid_complex(9, 9)
    a = heisenberg_cochain(cx)
    table = linear_bound_scan(cx, a)
    loop = table.witnesses[32]
    assert len(loop) == 32
    for i, (u, v) in enumerate(loop):
        assert loop[(i + 1) % len(loop)][0] == v
    total = sum(a.value(e)[0] for e in loop)
    assert abs(total) == 64


def test_scan_on_general_complex_uses_face_loops():
    cx = square_complex()
    a = Cochain1(dim=1)
    for e in cx.edges:
        a.values[e] = (Fraction(1),)
    table = linear_bound_scan(cx, a)
    by_length = {row.length: row for row in table.rows}
    assert by_length[4].max_abs == 4
    assert by_length[4].ratio == Fraction(1)


def test_scan_respects_length_cap():
    cx = grid_complex(9, 9)
    table = linear_bound_scan(cx, heisenberg_cochain(cx), length_cap=12)
    assert max(row.length for row in table.rows) <= 12
    assert table.max_ratio == Fraction(3, 4)


# ---------------------------------------------------------------------------
# bounded primitives


def test_primitive_succeeds_at_the_loop_ratio_threshold():
    cx = grid_complex(9, 9)
    a = heisenberg_cochain(cx)
    bound_c = Fraction(2)
    f = primitive(cx, a, bound_c)
    worst = max(max(abs(x) for x in t) for t in residual(cx, a, f).values())
    assert worst <= 4 * bound_c
    da = d1(cx, a)
    shifted = d1(cx, coboundary_of_potential(cx, f, 1))
    assert all(shifted.value(i) == (Fraction(0),)
               for i in range(len(cx.faces)))
    assert all(d1(cx, a).value(i) == da.value(i)
               for i in range(len(cx.faces)))


def test_primitive_reports_a_checkable_positive_cycle():
    cx = grid_complex(5, 4)
    a = heisenberg_cochain(cx)
    bound_c = Fraction(1, 10)
    with pytest.raises(PositiveCycle) as info:
        primitive(cx, a, bound_c)
    cycle = info.value.cycle
    assert f"length {len(cycle)}" in str(info.value)
    for i, (u, v) in enumerate(cycle):
        assert cycle[(i + 1) % len(cycle)][0] == v
    assert sum(a.value(e)[0] for e in cycle) > bound_c * len(cycle)


def test_primitive_fails_just_below_the_threshold():
    cx = grid_complex(5, 4)
    a = heisenberg_cochain(cx)
    max_ratio = Fraction(4 * 3, 2 * (4 + 3))
    assert max_ratio == linear_bound_scan(cx, a).max_ratio
    threshold = max_ratio / 2
    with pytest.raises(PositiveCycle):
        primitive(cx, a, threshold - Fraction(1, 100))
    f = primitive(cx, a, threshold)
    worst = max(max(abs(x) for x in t) for t in residual(cx, a, f).values())
    assert worst <= 4 * threshold


# ---------------------------------------------------------------------------
# solving da = c


def test_solve_coboundary_grid_closed_form():
    rng = random.Random(5)
    cx = grid_complex(6, 5)
    c = Cochain2(dim=1)
    for i in range(len(cx.faces)):
        c.values[i] = (Fraction(rng.randint(-4, 4), rng.choice([1, 2, 3])),)
    a = solve_coboundary(cx, c)
    da = d1(cx, a)
    assert all(da.value(i) == c.value(i) for i in range(len(cx.faces)))
    horizontal = [e for e in cx.edges if e[0][1] == e[1][1]]
    assert all(a.value(e) == (Fraction(0),) for e in horizontal)


def test_solve_coboundary_general_complex_round_trip():
    cx = square_complex()
    c = Cochain2(dim=2)
    c.values[0] = (Fraction(3), Fraction(-1))
    c.values[1] = (Fraction(3), Fraction(-1))
    a = solve_coboundary(cx, c)
    da = d1(cx, a)
    assert all(da.value(i) == c.value(i) for i in range(2))


def test_solve_coboundary_detects_inconsistent_face_equations():
    cx = square_complex()
    c = Cochain2(dim=1)
    c.values[0] = (Fraction(1),)
    c.values[1] = (Fraction(0),)
    with pytest.raises(NotCoboundary):
        solve_coboundary(cx, c)


# ---------------------------------------------------------------------------
# triviality verdicts


def test_is_trivial_certifies_bounded_classes():
    cx = grid_complex(9, 9)
    f = {v: (Fraction((v[0] * 7 + v[1] * 3) % 5, 2),) for v in cx.vertices}
    c = d1(cx, coboundary_of_potential(cx, f, 1))
    verdict = is_trivial(cx, c)
    assert verdict.kind == "Trivial"
    assert verdict.primitive_f is not None
    assert set(verdict.primitive_f) == set(cx.vertices)
    assert verdict.bound_achieved <= 4 * verdict.bound_budget


def test_is_trivial_rejects_the_area_form():
    cx = grid_complex(9, 9)
    tau = d1(cx, heisenberg_cochain(cx))
    verdict = is_trivial(cx, tau)
    assert verdict.kind == "Nontrivial"
    assert "doubling scales" in verdict.note
    assert verdict.scan is not None
    assert verdict.scan.max_ratio == Fraction(2)


def test_classes_equivalent_under_coefficient_scaling():
    cx = grid_complex(5, 4)
    tau = d1(cx, heisenberg_cochain(cx))
    doubled = Cochain2(dim=1)
    for i in range(len(cx.faces)):
        doubled.values[i] = tuple(2 * x for x in tau.value(i))
    same = classes_equivalent_via(cx, doubled, tau, RatMatrix([[2]]))
    assert same.kind == "Trivial"
    identity = classes_equivalent_via(cx, tau, tau, RatMatrix([[1]]))
    assert identity.kind == "Trivial"


def test_classes_differ_without_the_right_transform():
    cx = grid_complex(9, 9)
    tau = d1(cx, heisenberg_cochain(cx))
    zero = Cochain2(dim=1)
    verdict = classes_equivalent_via(cx, tau, zero, RatMatrix([[1]]))
    assert verdict.kind == "Nontrivial"


def test_classes_equivalent_input_validation():
    cx = grid_complex(4, 4)
    tau = d1(cx, heisenberg_cochain(cx))
    other = Cochain2(dim=2)
    with pytest.raises(ValueError):
        classes_equivalent_via(cx, tau, other, RatMatrix([[1]]))
    with pytest.raises(SingularMatrix):
        classes_equivalent_via(cx, tau, tau, RatMatrix([[0]]))
    with pytest.raises(ValueError):
        classes_equivalent_via(cx, tau, tau, RatMatrix([[1, 0], [0, 1]]))
