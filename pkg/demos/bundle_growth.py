"""Ball growth separates flat bundles from wedge-folded ones.

A line of fibers glued by the zero translation is just a plane: balls grow
quadratically.  The doubling-wedge gluing instead doubles fiber points with
small coordinates at every step away from the base origin, and balls around
a deep interior point pick up exponential growth.  Drift seminorms and
foliation kernels then read the same distinction off single gluing words.
"""

import math
from fractions import Fraction

from coarsebundle import (
    GluingSpec,
    IntMatrix,
    RatMatrix,
    Translation,
    ball_growth,
    build_total_space,
    drift_seminorm,
    foliation_kernel,
    growth_class,
    phi_example_spec,
)


def show_series(name, series):
    valid = series.valid_radii()
    shown = [f"{r}:{series.counts[r]}" for r in valid[:8]]
    print(f"  {name}: " + " ".join(shown) + " ...")
    cls = growth_class(series.counts, series.flags)
    print(f"  class: {cls.kind}, parameter {cls.parameter:.4f} "
          f"(r2 poly {cls.r2_poly:.4f}, exp {cls.r2_exp:.4f})")


def main():
    flat = GluingSpec(base="line", fiber_dim=1, edge_map=Translation((0,)))
    ball = build_total_space(flat, 30, 30, ((0,), 0))
    print("flat bundle over the line:")
    show_series("counts", ball_growth(ball, 25))
    print()

    wedge = phi_example_spec()
    deep = build_total_space(wedge, (1005, 1043), 8500, ((0,), 1024))
    print("doubling wedge, origin deep inside:")
    series = ball_growth(deep, 18)
    show_series("counts", series)
    r = series.valid_radii()[-1]
    print(f"  at r = {r}: {series.counts[r]} vertices, "
          f"1.1^r = {1.1 ** r:.1f}")
    print()

    print("drift seminorms of single gluing words (truncation 64):")
    words = [
        ("diag(2, 1/2)", [RatMatrix([[2, 0], [0, Fraction(1, 2)]])], (1, 0)),
        ("fibonacci", [IntMatrix([[2, 1], [1, 1]])], (1, 0)),
        ("shear", [IntMatrix([[1, 1], [0, 1]])], (0, 1)),
    ]
    for name, word, u in words:
        est = drift_seminorm(word, u)
        closed = ("none (not diagonalizable)" if est.closed_form is None
                  else f"{est.closed_form:.6f}")
        print(f"  {name} at u = {u}: estimate {est.value:.6f}, "
              f"closed form {closed}")
        kernel = foliation_kernel(word)
        basis = ", ".join("(" + ", ".join(f"{x:+.3f}" for x in v) + ")"
                          for v in kernel.basis)
        print(f"      zero-drift directions: dimension "
              f"{kernel.dimension} {('[' + basis + ']') if basis else ''}")


if __name__ == "__main__":
    main()
