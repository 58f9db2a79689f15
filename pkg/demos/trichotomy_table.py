"""Classify every two-parameter loop group with 1 <= m <= n <= 6.

Builds the one-loop graph of groups with inclusions m and n, runs the
trichotomy classifier on each, and prints a table of verdicts next to the
modular holonomy of the loop.  The diagonal (m = n) folds onto a product,
m = 1 < n ascends into a parabolic wedge, and everything else folds with
nontrivial holonomy.  A few pairwise comparisons close the demo.
"""

import time

from coarsebundle import bs, modular_holonomy
from coarsebundle.trichotomy import classify, qi_compare


def holonomy_value(g):
    rep = modular_holonomy(g)
    (_, mat), = rep.generators
    return mat.rows[0][0]


def main():
    start = time.monotonic()
    print("verdicts for the (m, n) loop groups, depth 6")
    print()
    print("m\\n |" + "".join(f" {n:>16}" for n in range(1, 7)))
    print("----+" + "-" * (17 * 6))
    for m in range(1, 7):
        row = [f"{m:>3} |"]
        for n in range(1, 7):
            if n < m:
                row.append(f" {'':>16}")
                continue
            g = bs(m, n)
            verdict = classify(g, depth=6)
            cell = f"{verdict.kind}({holonomy_value(g)})"
            row.append(f" {cell:>16}")
        print("".join(row))
    print()
    print(f"table finished in {time.monotonic() - start:.2f} s")
    print()

    print("pairwise comparisons:")
    pairs = [((2, 3), (4, 9)), ((2, 3), (4, 6)), ((1, 2), (1, 3)),
             ((2, 2), (3, 3))]
    for (a, b) in pairs:
        cmp_ = qi_compare(bs(*a), bs(*b), depth=6)
        print(f"  {a} vs {b}: {cmp_.verdict}")
        print(f"      {cmp_.reason}")


if __name__ == "__main__":
    main()
