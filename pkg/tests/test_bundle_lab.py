"""Tests for windowed total spaces, growth series, and drift seminorms.

Ball-count oracles are independent: closed forms for lattice balls in the
taxicab metric and a direct brute-force distance count for the rank-3 case.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from coarsebundle import (
    GluingSpec,
    IntMatrix,
    Linear,
    RatMatrix,
    Translation,
    ball_growth,
    build_total_space,
    drift_seminorm,
    foliation_kernel,
    growth_class,
    phi_example_spec,
)
from coarsebundle.bundle_lab import (
    Affine,
    FiniteBase,
    NonBijectiveTabulated,
    Tabulated,
    TooFewRadii,
    WindowTooLarge,
)
from coarsebundle.errors import SingularMatrix


def line_spec(shift=(0,)):
    return GluingSpec(base="line", fiber_dim=1, edge_map=Translation(shift))


def taxicab_ball_z2(r):
    return 2 * r * r + 2 * r + 1


def taxicab_ball_z3(r):
    return sum(1 for x in range(-r, r + 1) for y in range(-r, r + 1)
               for z in range(-r, r + 1) if abs(x) + abs(y) + abs(z) <= r)


# ---------------------------------------------------------------------------
# gluing maps


def test_translation_apply_and_preimage_invert():
    tr = Translation((4, -1))
    assert tr.dim == 2
    assert tr.apply(None, (0, 0)) == (4, -1)
    assert tr.preimage(None, (4, -1)) == (0, 0)


def test_linear_map_applies_the_matrix_exactly():
    lin = Linear(IntMatrix([[2, 1], [1, 1]]))
    assert lin.apply(0, (1, 0)) == (2, 1)
    assert lin.preimage(0, (2, 1)) == (1, 0)


def test_linear_map_rejects_singular_matrices():
    with pytest.raises(SingularMatrix):
        Linear(IntMatrix([[1, 1], [1, 1]]))


def test_affine_preimage_returns_none_off_the_lattice():
    aff = Affine(IntMatrix([[2]]), (1,))
    assert aff.apply(0, (3,)) == (7,)
    assert aff.preimage(0, (7,)) == (3,)
    assert aff.preimage(0, (8,)) is None


def test_spec_validates_base_and_map_dimensions():
    with pytest.raises(ValueError):
        GluingSpec(base="circle", fiber_dim=1, edge_map=Translation((0,)))
    with pytest.raises(ValueError):
        GluingSpec(base="line", fiber_dim=2, edge_map=Translation((0,)))
    with pytest.raises(ValueError):
        GluingSpec(base="line", fiber_dim=1)


def test_per_edge_maps_override_the_default():
    spec = GluingSpec(base="line", fiber_dim=1, edge_map=Translation((0,)),
                      edge_maps={(0, 1): Translation((5,))})
    assert spec.map_for((0, 1)).apply(0, (0,)) == (5,)
    assert spec.map_for((1, 2)).apply(1, (0,)) == (0,)


# ---------------------------------------------------------------------------
# total space construction


def test_trivial_line_bundle_counts_match_taxicab_balls():
    ball = build_total_space(line_spec(), 10, 10, ((0,), 0))
    series = ball_growth(ball, 8)
    for r in series.valid_radii():
        assert series.counts[r] == taxicab_ball_z2(r)
    assert 8 in series.valid_radii()


def test_grid_base_counts_match_brute_force_rank_three_balls():
    spec = GluingSpec(base="grid", fiber_dim=1, edge_map=Translation((0,)))
    ball = build_total_space(spec, 9, 9, ((0,), (0, 0)))
    series = ball_growth(ball, 8)
    assert list(series.counts) == [taxicab_ball_z3(r) for r in range(9)]
    assert all(series.flags)


def test_translation_shift_does_not_change_growth():
    plain = ball_growth(build_total_space(line_spec(), 10, 10, ((0,), 0)), 7)
    shifted = ball_growth(
        build_total_space(line_spec((1,)), 10, 14, ((0,), 0)), 7)
    for r in range(8):
        if plain.flags[r] and shifted.flags[r]:
            assert plain.counts[r] == shifted.counts[r]
    assert plain.flags[7] and shifted.flags[7]


def test_off_center_base_window_carves_a_distant_ball():
    centered = build_total_space(line_spec(), 6, 6, ((0,), 0))
    offset = build_total_space(line_spec(), (94, 106), 6, ((0,), 100))
    a = ball_growth(centered, 5)
    b = ball_growth(offset, 5)
    assert a.counts == b.counts
    assert a.flags == b.flags


def test_finite_base_balls_stay_within_the_window():
    fb = FiniteBase(vertices=("p", "q"), edges=(("p", "q"),))
    spec = GluingSpec(base=fb, fiber_dim=1, edge_map=Linear(IntMatrix([[1]])))
    ball = build_total_space(spec, None, 5, ((0,), "p"))
    assert ball.size == 22
    series = ball_growth(ball, 3)
    assert series.counts[0] == 1
    assert series.counts[1] == 4
    for v in ball.adjacency:
        assert ball.degree(v) == len(ball.adjacency[v])
        assert ball.degree(v) <= 4


def test_clipping_marks_exactly_the_untrusted_radii():
    ball = build_total_space(line_spec(), 4, 4, ((0,), 0))
    series = ball_growth(ball, 6)
    assert series.flags == (True, True, True, True, False, False, False)
    assert list(series.valid_radii()) == [0, 1, 2, 3]


def test_clipped_origin_is_rejected():
    ball = build_total_space(line_spec(), 3, 3, ((3,), 0))
    with pytest.raises(ValueError, match="clipped"):
        ball_growth(ball, 2)


def test_window_volume_cap():
    spec = GluingSpec(base="grid", fiber_dim=1, edge_map=Translation((0,)))
    with pytest.raises(WindowTooLarge):
        build_total_space(spec, 100, 100, ((0,), (0, 0)), cap=1000)


def test_origin_outside_the_windows_is_rejected():
    with pytest.raises(ValueError, match="origin"):
        build_total_space(line_spec(), 3, 3, ((9,), 0))


def test_tabulated_maps_must_be_injective_on_the_window():
    spec = GluingSpec(base="line", fiber_dim=1,
                      edge_map=Tabulated(fn=lambda b, x: abs(x)))
    with pytest.raises(NonBijectiveTabulated):
        build_total_space(spec, 3, 3, ((0,), 0))


def test_doubling_wedge_formula():
    phi = phi_example_spec().edge_map.fn
    assert phi(3, 2) == 4
    assert phi(3, -3) == -6
    assert phi(3, 5) == 8
    assert phi(3, -7) == -10
    assert phi(0, 4) == 4
    assert phi(-2, 1) == 2


# ---------------------------------------------------------------------------
# growth classification


def test_growth_class_reads_polynomial_degree():
    counts = [taxicab_ball_z2(r) for r in range(26)]
    flags = [True] * 26
    got = growth_class(counts, flags)
    assert got.kind == "Polynomial"
    assert 1.7 < got.parameter < 2.1
    assert got.r2_poly > got.r2_exp or got.r2_poly > 0.999


def test_growth_class_reads_exponential_rate():
    counts = [2 ** r for r in range(20)]
    flags = [True] * 20
    got = growth_class(counts, flags)
    assert got.kind == "Exponential"
    assert abs(got.parameter - math.log(2)) < 1e-6
    assert got.r2_exp - got.r2_poly >= 0.02


def test_growth_class_ignores_invalid_radii():
    counts = [taxicab_ball_z2(r) for r in range(15)] + [99999] * 10
    flags = [True] * 15 + [False] * 10
    got = growth_class(counts, flags)
    assert got.kind == "Polynomial"


def test_growth_class_needs_eight_valid_radii():
    with pytest.raises(TooFewRadii, match="need at least 8 valid radii"):
        growth_class([1, 3, 5, 7, 9], [True] * 5)


def test_doubling_wedge_bundle_grows_exponentially():
    ball = build_total_space(phi_example_spec(), (1005, 1043), 8500,
                             ((0,), 1024))
    series = ball_growth(ball, 18)
    valid = series.valid_radii()
    assert len(valid) >= 9
    got = growth_class(series.counts, series.flags)
    assert got.kind == "Exponential"
    assert got.parameter > 0.09


# ---------------------------------------------------------------------------
# drift seminorms


def diag_two():
    return RatMatrix([[2, 0], [0, Fraction(1, 2)]])


def test_drift_along_the_expanding_axis():
    est = drift_seminorm([diag_two()], (1, 0))
    assert est.closed_form == pytest.approx(1.0, abs=1e-12)
    assert est.diagonalizable
    assert est.period == 1
    assert est.value == pytest.approx(1.0, rel=1e-2)


def test_drift_vanishes_along_the_contracting_axis():
    est = drift_seminorm([diag_two()], (0, 1))
    assert est.closed_form == pytest.approx(0.0, abs=1e-12)
    assert est.value == pytest.approx(0.0, abs=1e-9)


def test_drift_scales_with_the_expanding_component():
    lam = (3 + math.sqrt(5)) / 2
    v = np.array([lam - 1, 1.0])
    v /= np.linalg.norm(v)
    est = drift_seminorm([RatMatrix([[2, 1], [1, 1]])], v.tolist())
    assert est.closed_form == pytest.approx(lam - 1, abs=1e-9)
    proj = float(np.dot((1.0, 0.0), v))
    skew = drift_seminorm([RatMatrix([[2, 1], [1, 1]])], (1, 0))
    assert skew.closed_form == pytest.approx((lam - 1) * proj, abs=1e-9)


def test_drift_estimates_are_nondecreasing_lower_bounds():
    est = drift_seminorm([RatMatrix([[2, 1], [1, 1]])], (1, 0))
    assert all(b >= a - 1e-12
               for a, b in zip(est.estimates, est.estimates[1:]))
    assert est.estimates[-1] <= est.closed_form + 1e-9
    assert abs(est.estimates[-1] - est.closed_form) <= 0.01 * est.closed_form


def test_drift_closed_form_for_rank_three_diagonal():
    word = [RatMatrix([[3, 0, 0], [0, 1, 0],
                       [0, 0, Fraction(1, 3)]])]
    est = drift_seminorm(word, (1, 1, 1))
    assert est.closed_form == pytest.approx(2.0, abs=1e-9)


def test_shear_word_has_no_eigen_closed_form():
    est = drift_seminorm([IntMatrix([[1, 1], [0, 1]])], (0, 1))
    assert est.closed_form is None
    assert not est.diagonalizable
    assert est.value > 0


def test_repeated_letter_matches_the_single_letter_rate():
    single = drift_seminorm([diag_two()], (1, 0))
    double = drift_seminorm([diag_two(), diag_two()], (1, 0))
    assert double.period == 2
    assert double.closed_form == pytest.approx(single.closed_form, rel=1e-9)


def test_drift_input_validation():
    with pytest.raises(ValueError):
        drift_seminorm([], (1, 0))
    with pytest.raises(ValueError):
        drift_seminorm([IntMatrix([[1, 1], [0, 1]])], (1, 0, 0))


# ---------------------------------------------------------------------------
# foliation kernels


def line_distance(v, w):
    a = np.array(v, dtype=float)
    b = np.array(w, dtype=float)
    a /= np.linalg.norm(a)
    b /= np.linalg.norm(b)
    return min(np.linalg.norm(a - b), np.linalg.norm(a + b))


def test_kernel_of_a_diagonal_word_is_the_contracting_axis():
    report = foliation_kernel([diag_two()])
    assert report.dimension == 1
    assert line_distance(report.basis[0], (0, 1)) < 1e-9


def test_kernel_of_a_shear_excludes_polynomial_growth():
    report = foliation_kernel([IntMatrix([[1, 1], [0, 1]])])
    assert report.dimension == 1
    assert line_distance(report.basis[0], (1, 0)) < 1e-9


def test_kernel_of_a_rotation_is_everything():
    report = foliation_kernel([IntMatrix([[0, -1], [1, 0]])])
    assert report.dimension == 2


def test_kernel_of_a_rank_three_diagonal_word():
    report = foliation_kernel(
        [RatMatrix([[3, 0, 0], [0, 1, 0], [0, 0, Fraction(1, 3)]])])
    assert report.dimension == 2
    for vec in report.basis:
        assert abs(vec[0]) < 1e-9
