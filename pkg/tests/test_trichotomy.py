"""Trichotomy classification and quasi-isometry comparison."""

import pytest

from coarsebundle.core_algebra import IntMatrix
from coarsebundle.errors import BallTooLarge
from coarsebundle.graph_of_groups import Edge, GraphOfGroups, bs, semidirect
from coarsebundle.trichotomy import classify, qi_compare


# ---------------------------------------------------------------------------
# rule attribution


def test_trivial_holonomy_is_folded_by_finite_image():
    for m in (1, 2, 5):
        v = classify(bs(m, m))
        assert v.kind == "Folded"
        assert v.evidence.rule == "finite-image"
        assert v.decided


def test_finite_order_holonomy_is_folded():
    rotation = IntMatrix([[0, -1], [1, 0]])
    v = classify(semidirect(2, [rotation]))
    assert v.kind == "Folded"
    assert v.evidence.rule == "finite-image"


def test_strict_ascent_is_parabolic_with_endomorphism():
    for n in (2, 3, 6):
        v = classify(bs(1, n))
        assert v.kind == "Parabolic"
        assert v.evidence.rule == "ascending-hnn"
        assert v.hnn is not None and v.hnn.strict
        assert v.hnn.endomorphism == IntMatrix([[n]])


def test_unimodular_free_holonomy_is_proper():
    shear = IntMatrix([[1, 1], [0, 1]])
    v = classify(semidirect(2, [shear]))
    assert v.kind == "Proper"
    assert v.evidence.rule == "free-discrete"
    assert v.evidence.freeness is not None
    assert v.evidence.freeness.kind == "PingPong"

    hyperbolic = IntMatrix([[2, 1], [1, 1]])
    v = classify(semidirect(2, [hyperbolic]))
    assert v.kind == "Proper"


def test_incommensurable_scales_are_folded_by_coverage():
    for m, n in ((2, 3), (3, 4), (2, 5)):
        v = classify(bs(m, n))
        assert v.kind == "Folded"
        assert v.evidence.rule == "ball-coverage"
        for row in v.evidence.coverage:
            assert row.iota_side.covered_fraction == 1
            assert row.tau_side.covered_fraction == 1


def test_depth_shrinks_under_the_vertex_cap():
    v = classify(bs(4, 9))
    assert v.kind == "Folded"
    assert v.evidence.depth == 5  # the depth-6 tree ball would exceed the cap


def test_too_small_cap_gives_undetermined_not_folded():
    v = classify(bs(2, 3), cap=30)
    assert v.kind == "Undetermined"
    assert not v.decided
    assert "cap" in v.evidence.note


def test_cap_below_one_sphere_raises():
    with pytest.raises(BallTooLarge):
        classify(bs(2, 3), cap=3)


def test_verdict_exclusivity_fields():
    cases = [bs(1, 2), bs(2, 2), bs(2, 3),
             semidirect(2, [IntMatrix([[1, 1], [0, 1]])])]
    for g in cases:
        v = classify(g)
        assert v.kind in ("Parabolic", "Folded", "Proper", "Undetermined")
        assert v.decided == (v.kind != "Undetermined")
        assert (v.hnn is not None) == (v.kind == "Parabolic")


# ---------------------------------------------------------------------------
# comparison


def test_same_group_is_same_class():
    c = qi_compare(bs(2, 3), bs(2, 3))
    assert c.verdict == "SameQiClass"


def test_distinct_holonomy_classes_differ():
    c = qi_compare(bs(2, 3), bs(4, 9))
    assert c.verdict == "DifferentQiClass"
    assert "3/2" in c.reason and "9/4" in c.reason


def test_folded_same_class_across_presentations():
    f2_z = GraphOfGroups(rank=1, vertices=("v",), edges=(
        Edge("e1", "v", "v", IntMatrix([[1]]), IntMatrix([[1]])),
        Edge("e2", "v", "v", IntMatrix([[1]]), IntMatrix([[1]])),
    ))
    c = qi_compare(bs(2, 2), f2_z)
    assert c.verdict == "SameQiClass"


def test_parabolic_pairs_stay_undetermined():
    c = qi_compare(bs(1, 2), bs(1, 3))
    assert c.verdict == "Undetermined"
    assert c.left.kind == "Parabolic" and c.right.kind == "Parabolic"


def test_different_kinds_differ():
    c = qi_compare(bs(1, 2), bs(2, 3))
    assert c.verdict == "DifferentQiClass"
    shear = semidirect(2, [IntMatrix([[1, 1], [0, 1]])])
    rot = semidirect(2, [IntMatrix([[0, -1], [1, 0]])])
    assert qi_compare(shear, rot).verdict == "DifferentQiClass"


def test_same_kind_different_rank_is_undetermined():
    flat2 = semidirect(2, [IntMatrix.identity(2)])
    c = qi_compare(bs(2, 2), flat2)
    assert c.verdict == "Undetermined"
    assert "rank" in c.reason
