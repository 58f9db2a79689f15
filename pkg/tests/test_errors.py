"""The exception hierarchy: one catchable base, structured payloads."""

import inspect

import pytest

from coarsebundle import bs, errors, grid_complex, heisenberg_cochain
from coarsebundle.errors import BallTooLarge, CoarseBundleError, PositiveCycle
from coarsebundle.linf_cohomology import primitive
from coarsebundle.trichotomy import classify


def test_every_toolkit_error_shares_the_base_class():
    classes = [obj for _, obj in inspect.getmembers(errors, inspect.isclass)
               if issubclass(obj, Exception)]
    assert CoarseBundleError in classes
    for cls in classes:
        assert issubclass(cls, CoarseBundleError) or cls is CoarseBundleError


def test_positive_cycle_carries_its_witness():
    exc = PositiveCycle([("a", "b"), ("b", "a")])
    assert str(exc) == "positive cycle of length 2 detected"
    assert exc.cycle == [("a", "b"), ("b", "a")]


def test_cap_errors_format_the_cap_once():
    exc = BallTooLarge(3)
    assert str(exc) == "ball would exceed the vertex cap (3)"
    assert exc.cap == 3
    with pytest.raises(BallTooLarge,
                       match=r"^ball would exceed the vertex cap \(3\)$"):
        classify(bs(2, 3), cap=3)


def test_library_raises_are_catchable_at_the_base():
    cx = grid_complex(5, 4)
    with pytest.raises(CoarseBundleError):
        primitive(cx, heisenberg_cochain(cx), 0)
