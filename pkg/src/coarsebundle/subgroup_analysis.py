"""Coarse classification of finitely generated rational matrix groups.

Three toolkits live here.  First, multiplicative subgroups of the nonzero
rationals are classified exactly (trivial, discrete with a canonical
generator, or dense) through integer linear algebra on prime exponent
vectors.  Second, subgroups of GL2(Q) are sorted into the coarse classes
that matter for holonomy comparison: bounded, parabolic or hyperbolic
elementary, lattice (finite index in the modular group, decided by coset
enumeration), free Schottky-type with a ping-pong certificate, or honest
Unknown.  Third, a greedy integer-matrix orbit reduction drives the
rational-line test for vectors.

Rational inputs are decided exactly; float reasoning is certificate-based
or returns Unknown.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core_algebra import IntMatrix, Letter, RatMatrix
from .errors import DimensionTooSmall, NotInLattice, ZeroValue

TODD_COXETER_BUDGET = 100_000
_HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# rank-one classes: subgroups of the nonzero rationals


def _prime_exponents(q: Fraction) -> dict[int, int]:
    """Exponent vector of a positive rational over its support primes."""
    out: dict[int, int] = {}

    def account(n: int, sign: int) -> None:
        p = 2
        while p * p <= n:
            while n % p == 0:
                out[p] = out.get(p, 0) + sign
                n //= p
            p += 1 if p == 2 else 2
        if n > 1:
            out[n] = out.get(n, 0) + sign

    account(q.numerator, 1)
    account(q.denominator, -1)
    return {p: e for p, e in out.items() if e != 0}


@dataclass(frozen=True)
class Gl1Class:
    """Hausdorff class of a subgroup of the positive rationals.

    ``exponent_vector`` lists (prime, exponent) pairs of the canonical
    generator in the discrete case, chosen so the generator is > 1.  Two
    discrete classes agree only when the generated subgroups are equal,
    so generator and squared generator land in different classes.
    """

    kind: str  # Trivial | Discrete | Dense
    generator: Optional[Fraction] = None
    exponent_vector: tuple[tuple[int, int], ...] = ()

    @property
    def log_generator(self) -> Optional[float]:
        if self.generator is None:
            return None
        return math.log(self.generator)


def hausdorff_class_gl1(values: Sequence) -> Gl1Class:
    """Classify the subgroup of the positive rationals generated by |values|.

    The subgroup is a lattice inside the prime exponent space.  Rank zero is
    trivial, rank one is discrete with an exact canonical generator, and rank
    two or more has non-commensurable logarithms (two rationals have
    commensurable logs only when their exponent vectors are parallel), hence
    is dense in the positive reals.
    """
    vectors: list[dict[int, int]] = []
    for v in values:
        q = Fraction(v)
        if q == 0:
            raise ZeroValue("zero is not a unit of the rationals")
        exps = _prime_exponents(abs(q))
        if exps:
            vectors.append(exps)
    if not vectors:
        return Gl1Class(kind="Trivial")

    primes = sorted({p for vec in vectors for p in vec})
    rows = [tuple(vec.get(p, 0) for p in primes) for vec in vectors]

    base = rows[0]
    g = 0
    for x in base:
        g = math.gcd(g, abs(x))
    prim = tuple(x // g for x in base)

    multiples: list[int] = []
    for row in rows:
        for a, b in zip(row, prim):
            for c, d in zip(row, prim):
                if a * d != b * c:
                    return Gl1Class(kind="Dense")
        k = next(r // p for r, p in zip(row, prim) if p != 0)
        multiples.append(k)

    d = 0
    for k in multiples:
        d = math.gcd(d, abs(k))
    gen_vec = tuple(d * x for x in prim)
    gen = Fraction(1)
    for p, e in zip(primes, gen_vec):
        gen *= Fraction(p) ** e
    if gen < 1:
        gen = 1 / gen
        gen_vec = tuple(-x for x in gen_vec)
    pairs = tuple((p, e) for p, e in zip(primes, gen_vec) if e != 0)
    return Gl1Class(kind="Discrete", generator=gen, exponent_vector=pairs)


# ---------------------------------------------------------------------------
# GL2 subgroups: basic handles


@dataclass(frozen=True)
class Gl2Subgroup:
    """Finitely generated subgroup of GL2(Q), given by its generators."""

    generators: tuple[RatMatrix, ...]

    def __init__(self, generators: Sequence[RatMatrix]):
        gens = tuple(generators)
        for g in gens:
            if g.n != 2:
                raise ValueError("generators must be 2x2")
            if g.determinant() == 0:
                raise ValueError("generators must be invertible")
        object.__setattr__(self, "generators", gens)


def split_det(group: Gl2Subgroup) -> tuple[list[np.ndarray], list[Fraction]]:
    """Factor each generator as |det|^(1/2) times a norm-one part.

    The norm-one parts are numeric (the square root is irrational in
    general); the determinant values stay exact so the scalar direction can
    be classified with hausdorff_class_gl1.
    """
    normalized: list[np.ndarray] = []
    dets: list[Fraction] = []
    for g in group.generators:
        d = abs(g.determinant())
        dets.append(d)
        normalized.append(g.to_float() / math.sqrt(float(d)))
    return normalized, dets


def _is_scalar(g: RatMatrix) -> bool:
    return g[0, 1] == 0 and g[1, 0] == 0 and g[0, 0] == g[1, 1]


def _projective_character(g: RatMatrix) -> Fraction:
    """tr(g)^2 / det(g), the conjugation- and scaling-invariant type number.

    For det > 0: below 4 elliptic, exactly 4 parabolic (or scalar), above 4
    hyperbolic.  Negative values mean det < 0 (real eigenvalue pair of mixed
    sign; infinite order unless the trace vanishes).
    """
    return g.trace() ** 2 / g.determinant()


def _torsion_power(g: RatMatrix) -> Optional[int]:
    """Least n in {1,2,3,4,6} with g^n = 1, if any.

    Rational 2x2 matrices of finite order have order dividing 12 with
    rational trace, which forces order 1, 2, 3, 4, or 6.
    """
    for n in (1, 2, 3, 4, 6):
        if g.pow(n).is_identity():
            return n
    return None


# ---------------------------------------------------------------------------
# invariant positive forms and boundedness


def _symmetric_basis(n: int) -> list[RatMatrix]:
    basis = []
    for i in range(n):
        for j in range(i, n):
            rows = [[Fraction(0)] * n for _ in range(n)]
            rows[i][j] = Fraction(1)
            rows[j][i] = Fraction(1)
            basis.append(RatMatrix(rows))
    return basis


def _is_positive_definite(q: RatMatrix) -> bool:
    """Leading principal minors, exact."""
    n = q.n
    for k in range(1, n + 1):
        sub = RatMatrix([[q[i, j] for j in range(k)] for i in range(k)])
        if sub.determinant() <= 0:
            return False
    return True


def _rational_nullspace(rows: list[list[Fraction]], width: int) -> list[list[Fraction]]:
    """Basis of the exact nullspace of the given row system."""
    mat = [row[:] for row in rows]
    pivots: list[int] = []
    r = 0
    for c in range(width):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * width
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -mat[i][fc]
        basis.append(vec)
    return basis


def invariant_positive_form(gens: Sequence[RatMatrix]) -> Optional[RatMatrix]:
    """Rational positive definite Q with g^T Q g = |det g| Q for every generator.

    Such a form exists exactly when the group, normalized to determinant one,
    is bounded.  The search first tries to close the group by multiplication
    (a finite closure yields the averaged form exactly); otherwise it solves
    the invariance equations and looks for a positive definite point in the
    small solution space.  For 2x2 inputs an infinite bounded group pins the
    solution space to one line, so checking a handful of candidate
    combinations is complete there.
    """
    originals = list(gens)
    gens = [g for g in originals if not g.is_identity()]
    if not gens:
        return RatMatrix.identity(originals[0].n if originals else 2)
    n = gens[0].n

    closure: dict[RatMatrix, None] = {RatMatrix.identity(n): None}
    frontier = [RatMatrix.identity(n)]
    overflow = False
    while frontier and not overflow:
        nxt = []
        for m in frontier:
            for g in gens:
                p = m @ g
                if p not in closure:
                    closure[p] = None
                    nxt.append(p)
                    if len(closure) > 256:
                        overflow = True
                        break
            if overflow:
                break
        frontier = nxt
    if not overflow:
        total = None
        for m in closure:
            term = m.transpose() @ m
            total = term if total is None else total + term
        if _is_positive_definite(total):
            return total
        return None

    basis = _symmetric_basis(n)
    rows: list[list[Fraction]] = []
    for g in gens:
        scale = abs(g.determinant())
        gt = g.transpose()
        images = [gt @ b @ g - b * scale for b in basis]
        for i in range(n):
            for j in range(i, n):
                rows.append([img[i, j] for img in images])
    null = _rational_nullspace(rows, len(basis))
    if not null:
        return None

    def assemble(coeffs: Sequence[Fraction]) -> RatMatrix:
        total = None
        for c, b in zip(coeffs, basis):
            term = b * c
            total = term if total is None else total + term
        return total

    candidates = []
    for vec in null:
        candidates.append(vec)
        candidates.append([-x for x in vec])
    for i in range(len(null)):
        for j in range(i + 1, len(null)):
            for si in (1, -1):
                for sj in (1, -1):
                    candidates.append([si * a + sj * b
                                       for a, b in zip(null[i], null[j])])
    for coeffs in candidates:
        q = assemble([Fraction(c) for c in coeffs])
        if _is_positive_definite(q):
            return q
    return None


# ---------------------------------------------------------------------------
# elementary types


@dataclass(frozen=True)
class ElementaryType:
    """Coarse dynamical type of a GL2(Q) subgroup acting projectively."""

    kind: str  # Finite | ParabolicElementary | HyperbolicElementary | NonElementary
    invariant_form: Optional[RatMatrix] = None
    fixed_direction: Optional[tuple[int, int]] = None
    translation_length: Optional[float] = None
    pilot: Optional[RatMatrix] = None
    note: str = ""


def _primitive_direction(x: Fraction, y: Fraction) -> tuple[int, int]:
    den = x.denominator * y.denominator // math.gcd(x.denominator, y.denominator)
    a, b = int(x * den), int(y * den)
    g = math.gcd(abs(a), abs(b))
    if g:
        a, b = a // g, b // g
    if a < 0 or (a == 0 and b < 0):
        a, b = -a, -b
    return a, b


def _parabolic_fixed_direction(g: RatMatrix) -> tuple[int, int]:
    """The unique eigendirection of a nonscalar matrix with tr^2 = 4 det."""
    lam = g.trace() / 2
    a = g[0, 0] - lam
    b = g[0, 1]
    if a == 0 and b == 0:
        a, b = g[1, 0], g[1, 1] - lam
    return _primitive_direction(b, -a)


def _fixes_direction(g: RatMatrix, v: tuple[int, int]) -> bool:
    x = g[0, 0] * v[0] + g[0, 1] * v[1]
    y = g[1, 0] * v[0] + g[1, 1] * v[1]
    return x * v[1] == y * v[0]


def _translation_length(character: Fraction) -> float:
    """Axis translation length from tr^2/det > 4 (determinant positive)."""
    half = math.sqrt(float(character)) / 2.0
    return 2.0 * math.acosh(half)


def _infinite_order_pilot(gens: Sequence[RatMatrix], depth: int
                          ) -> Optional[RatMatrix]:
    """Short product with tr^2/det >= 4 (and not scalar), squared if det < 0."""
    seen: dict[RatMatrix, None] = {}
    frontier = [RatMatrix.identity(gens[0].n)]
    for _ in range(depth):
        nxt = []
        for m in frontier:
            for g in gens:
                p = m @ g
                if p in seen:
                    continue
                seen[p] = None
                nxt.append(p)
                cand = p if p.determinant() > 0 else p @ p
                if _is_scalar(cand):
                    continue
                if _projective_character(cand) >= 4:
                    return cand
        frontier = nxt
    return None


def elementary_type(group: Gl2Subgroup, product_depth: int = 4) -> ElementaryType:
    """Sort a GL2(Q) subgroup by its projective fixed-point behavior.

    Exact tests throughout: boundedness via an invariant positive form,
    parabolic sharing via rational eigendirections, hyperbolic sharing via
    the conjugation test g a g^{-1} in {a, a^{-1}} (preserving the axis
    pointwise or swapping its ends).  When no generator has infinite order,
    short products are searched; an unbounded group always contains an
    infinite-order element, so at reasonable depth this is decisive in
    practice, and the fallback answer is NonElementary.
    """
    gens = [g for g in group.generators if not _is_scalar(g)]
    if not gens:
        return ElementaryType(kind="Finite",
                              invariant_form=RatMatrix.identity(2),
                              note="all generators scalar")

    form = invariant_positive_form(group.generators)
    if form is not None:
        return ElementaryType(kind="Finite", invariant_form=form)

    pilot = _infinite_order_pilot(gens, product_depth)
    if pilot is None:
        return ElementaryType(
            kind="NonElementary",
            note=f"no invariant form; no infinite-order pilot at depth {product_depth}")

    character = _projective_character(pilot)
    if character == 4:
        v = _parabolic_fixed_direction(pilot)
        if all(_fixes_direction(g, v) for g in gens):
            if all(abs(_direction_multiplier(g, v)) == 1 for g in gens):
                return ElementaryType(kind="ParabolicElementary",
                                      fixed_direction=v, pilot=pilot)
            return ElementaryType(
                kind="NonElementary", pilot=pilot,
                note="shared fixed direction with nontrivial stretch")
        return ElementaryType(kind="NonElementary", pilot=pilot,
                              note="parabolic pilot direction not shared")

    pilot_inv = pilot.inverse()
    if all((g @ pilot @ g.inverse()) in (pilot, pilot_inv) for g in gens):
        return ElementaryType(kind="HyperbolicElementary",
                              translation_length=_translation_length(character),
                              pilot=pilot)
    return ElementaryType(kind="NonElementary", pilot=pilot,
                          note="hyperbolic pilot axis not shared")


# ---------------------------------------------------------------------------
# the modular group: rewriting and coset enumeration

MOD_S = RatMatrix([[0, -1], [1, 0]])
MOD_T_GEN = RatMatrix([[0, -1], [1, -1]])  # order three
_L_S, _L_T, _L_TI = 0, 1, 2
_INV = {_L_S: _L_S, _L_T: _L_TI, _L_TI: _L_T}
_LETTER_MATRICES = {
    _L_S: MOD_S,
    _L_T: MOD_T_GEN,
    _L_TI: MOD_T_GEN.inverse(),
}


def modular_word(m: RatMatrix) -> list[int]:
    """Rewrite an integer matrix of determinant one as a word in the modular
    generators s (order two) and t (order three).

    Column reduction by nearest-integer quotients peels off translation
    powers; the translation itself expands as t t s.  The result is verified
    to multiply back to the input up to sign.
    """
    if not m.is_integral() or m.determinant() != 1:
        raise NotInLattice(
            "only integer matrices of determinant one have modular words")
    a, b = int(m[0, 0]), int(m[0, 1])
    c, d = int(m[1, 0]), int(m[1, 1])

    parts: list[tuple[str, int]] = []
    while c != 0:
        q = math.floor(Fraction(a, c) + _HALF)
        parts.append(("T", q))
        a, b = a - q * c, b - q * d
        parts.append(("S", 1))
        a, b, c, d = c, d, -a, -b
    parts.append(("T", a * b))

    letters: list[int] = []
    for name, q in parts:
        if name == "S":
            letters.append(_L_S)
        elif q > 0:
            letters.extend([_L_T, _L_T, _L_S] * q)
        elif q < 0:
            letters.extend([_L_S, _L_TI, _L_TI] * (-q))

    prod = RatMatrix.identity(2)
    for letter in letters:
        prod = prod @ _LETTER_MATRICES[letter]
    if prod != m and prod != m * Fraction(-1):
        raise AssertionError("modular rewriting failed to verify")
    return letters


class _BudgetExceeded(Exception):
    pass


class _CosetTable:
    """Coset enumeration over <s, t | s^2, t^3> with a node budget.

    Relator scanning in fixed order with immediate filling; coincidences
    processed through union-find merges.  Deterministic for fixed input.
    """

    RELATORS = ((_L_S, _L_S), (_L_T, _L_T, _L_T))

    def __init__(self, budget: int):
        self.budget = budget
        self.table: list[list[Optional[int]]] = [[None, None, None]]
        self.rep = [0]
        self.queue: list[tuple[int, int]] = []
        self.defined = 1

    def find(self, x: int) -> int:
        while self.rep[x] != x:
            self.rep[x] = self.rep[self.rep[x]]
            x = self.rep[x]
        return x

    def _define(self, c: int, a: int) -> int:
        if self.defined >= self.budget:
            raise _BudgetExceeded()
        d = len(self.table)
        self.table.append([None, None, None])
        self.rep.append(d)
        self.defined += 1
        self._deduce(c, a, d)
        return d

    def _deduce(self, c: int, a: int, d: int) -> None:
        for (x, letter, y) in ((c, a, d), (d, _INV[a], c)):
            cur = self.table[x][letter]
            if cur is None:
                self.table[x][letter] = y
            elif self.find(cur) != self.find(y):
                self.queue.append((cur, y))
        self._merge_pending()

    def _merge_pending(self) -> None:
        while self.queue:
            u, v = self.queue.pop()
            u, v = self.find(u), self.find(v)
            if u == v:
                continue
            if v < u:
                u, v = v, u
            self.rep[v] = u
            for letter in range(3):
                w = self.table[v][letter]
                if w is None:
                    continue
                cur = self.table[u][letter]
                if cur is None:
                    self.table[u][letter] = w
                    back = self.table[self.find(w)][_INV[letter]]
                    if back is None:
                        self.table[self.find(w)][_INV[letter]] = u
                    elif self.find(back) != self.find(u):
                        self.queue.append((back, u))
                elif self.find(cur) != self.find(w):
                    self.queue.append((cur, w))

    def scan_and_fill(self, c: int, word: Sequence[int]) -> None:
        c = self.find(c)
        f, fi = c, 0
        b, bi = c, len(word)
        while True:
            while fi < bi:
                nxt = self.table[self.find(f)][word[fi]]
                if nxt is None:
                    break
                f, fi = self.find(nxt), fi + 1
            if fi == bi:
                if self.find(f) != self.find(b):
                    self.queue.append((f, b))
                    self._merge_pending()
                return
            while bi > fi:
                prev = self.table[self.find(b)][_INV[word[bi - 1]]]
                if prev is None:
                    break
                b, bi = self.find(prev), bi - 1
            if fi == bi:
                if self.find(f) != self.find(b):
                    self.queue.append((f, b))
                    self._merge_pending()
                return
            if bi - fi == 1:
                self._deduce(self.find(f), word[fi], self.find(b))
                return
            self._define(self.find(f), word[fi])

    def live_count(self) -> int:
        return sum(1 for i in range(len(self.table)) if self.find(i) == i)


@dataclass(frozen=True)
class PslIndexResult:
    """Outcome of coset enumeration: exact index, or a spent budget."""

    kind: str  # FiniteIndex | InfiniteIndexOrUnknown
    index: Optional[int]
    budget: int

    @property
    def finite(self) -> bool:
        return self.kind == "FiniteIndex"


def classify_psl2z_subgroup(group: Gl2Subgroup,
                            budget: int = TODD_COXETER_BUDGET) -> PslIndexResult:
    """Index of the subgroup generated by integer determinant-one matrices
    inside the modular group, by deterministic coset enumeration.

    Completion certifies the exact finite index.  Hitting the node budget is
    reported as such and never as a finite answer.
    """
    words = [modular_word(g) for g in group.generators]
    ct = _CosetTable(budget)
    try:
        for w in words:
            ct.scan_and_fill(0, w)
        scanned = 0
        while True:
            cosets = [i for i in range(len(ct.table)) if ct.find(i) == i]
            if scanned >= len(cosets):
                break
            progress = False
            for c in cosets[scanned:]:
                if ct.find(c) != c:
                    continue
                for rel in _CosetTable.RELATORS:
                    ct.scan_and_fill(c, rel)
                for w in words:
                    ct.scan_and_fill(0, w)
                progress = True
            scanned = len(cosets)
            if not progress:
                break
        complete = all(
            ct.table[i][a] is not None
            for i in range(len(ct.table)) if ct.find(i) == i
            for a in range(3))
        if complete:
            return PslIndexResult(kind="FiniteIndex", index=ct.live_count(),
                                  budget=budget)
        return PslIndexResult(kind="InfiniteIndexOrUnknown", index=None,
                              budget=budget)
    except _BudgetExceeded:
        return PslIndexResult(kind="InfiniteIndexOrUnknown", index=None,
                              budget=budget)


# ---------------------------------------------------------------------------
# freeness certificates


@dataclass(frozen=True)
class ConeEntry:
    """Per-generator sets on the projective circle (angles mod pi)."""

    attracting: tuple[float, float]  # (center, radius)
    repelling: tuple[float, float]


@dataclass(frozen=True)
class ConeTable:
    variant: str  # axis-quadrants | schottky
    entries: tuple = ()
    margin: float = 0.0
    description: str = ""

    def canonical_hash(self) -> str:
        def entry_key(e):
            if isinstance(e, ConeEntry):
                return tuple(round(x, 9)
                             for pair in (e.attracting, e.repelling)
                             for x in pair)
            return e
        payload = repr((self.variant, self.description,
                        tuple(entry_key(e) for e in self.entries)))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class FreenessCertificate:
    kind: str  # PingPong | RelationFound | Unknown
    depth: int
    word: Optional[tuple[Letter, ...]] = None
    cones: Optional[ConeTable] = None
    note: str = ""


def _relation_search(gens: Sequence[RatMatrix], depth: int
                     ) -> Optional[tuple[Letter, ...]]:
    """Shortest reduced word over the generators evaluating to the identity."""
    k = len(gens)
    identity = RatMatrix.identity(gens[0].n)
    inverses = [g.inverse() for g in gens]

    def letter_matrix(letter: Letter) -> RatMatrix:
        i, e = letter
        return gens[i] if e > 0 else inverses[i]

    frontier: list[tuple[RatMatrix, tuple[Letter, ...]]] = [(identity, ())]
    for _ in range(depth):
        nxt = []
        for m, word in frontier:
            for i in range(k):
                for e in (1, -1):
                    if word and word[-1] == (i, -e):
                        continue
                    letter = (i, e)
                    p = m @ letter_matrix(letter)
                    w = word + (letter,)
                    if p.is_identity():
                        return w
                    nxt.append((p, w))
        nxt.sort(key=lambda item: item[1])
        frontier = nxt
    return None


def _axis_pair_certificate(gens: Sequence[RatMatrix]) -> Optional[ConeTable]:
    """Exact quadrant ping-pong for one upper and one lower unitriangular
    generator with off-diagonal entry at least two in absolute value.

    With U = [[1,b],[0,1]] and |mb| >= 2, any (x, y) with |x| < |y| maps to
    (x + mby, y) with |x + mby| >= (|mb| - 1)|y| > |y|, so every nonzero
    power throws the vertical quadrant strictly into the horizontal one; the
    lower generator does the opposite.  The two cyclic factors are infinite,
    so the group is their free product.
    """
    if len(gens) != 2 or any(g.n != 2 for g in gens):
        return None

    def upper_entry(g: RatMatrix) -> Optional[Fraction]:
        if g[0, 0] == 1 and g[1, 1] == 1 and g[1, 0] == 0 and abs(g[0, 1]) >= 2:
            return g[0, 1]
        return None

    def lower_entry(g: RatMatrix) -> Optional[Fraction]:
        if g[0, 0] == 1 and g[1, 1] == 1 and g[0, 1] == 0 and abs(g[1, 0]) >= 2:
            return g[1, 0]
        return None

    for a, b in ((0, 1), (1, 0)):
        up, low = upper_entry(gens[a]), lower_entry(gens[b])
        if up is not None and low is not None:
            return ConeTable(
                variant="axis-quadrants",
                entries=(("generator", a, "target", "abs(x) > abs(y)", str(up)),
                         ("generator", b, "target", "abs(x) < abs(y)", str(low))),
                margin=float("inf"),
                description="exact inequality certificate on coordinate quadrants",
            )
    return None


def _proj_angle(x: float, y: float) -> float:
    a = math.atan2(y, x) % math.pi
    return a if a < math.pi else a - math.pi


def _proj_dist(a: float, b: float) -> float:
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


def _signed_offset(angle: float, center: float) -> float:
    d = (angle - center + math.pi / 2) % math.pi - math.pi / 2
    return d


def _apply_angle(gf: np.ndarray, theta: float) -> float:
    x, y = math.cos(theta), math.sin(theta)
    u = gf @ np.array([x, y])
    return _proj_angle(float(u[0]), float(u[1]))


def _arc_maps_into(gf: np.ndarray, source: tuple[float, float],
                   target: tuple[float, float], margin: float) -> bool:
    """Whether the homeomorphism image of the source arc lies in the target.

    The image of an arc under a projective map is the arc between the endpoint
    images that contains the image of the center; containment reduces to
    signed-offset checks around the target center.
    """
    sc, sr = source
    tc, tr = target
    f1 = _apply_angle(gf, sc - sr)
    f2 = _apply_angle(gf, sc + sr)
    fc = _apply_angle(gf, sc)
    d1 = _signed_offset(f1, tc)
    d2 = _signed_offset(f2, tc)
    dc = _signed_offset(fc, tc)
    if abs(d1) > tr - margin or abs(d2) > tr - margin:
        return False
    return min(d1, d2) - 1e-12 <= dc <= max(d1, d2) + 1e-12


def _complement_arc(arc: tuple[float, float]) -> tuple[float, float]:
    c, r = arc
    return ((c + math.pi / 2) % math.pi, math.pi / 2 - r)


def _fixed_angles(g: RatMatrix) -> Optional[tuple[float, float]]:
    """(attracting, repelling) projective fixed directions, by eigenvectors."""
    w, v = np.linalg.eig(g.to_float())
    if np.iscomplexobj(w) and abs(w[0].imag) > 1e-12:
        return None
    w = w.real
    v = v.real
    order = np.argsort(-np.abs(w))
    if abs(abs(w[order[0]]) - abs(w[order[1]])) < 1e-12:
        return None
    att = _proj_angle(float(v[0, order[0]]), float(v[1, order[0]]))
    rep = _proj_angle(float(v[0, order[1]]), float(v[1, order[1]]))
    return att, rep


def _schottky_certificate(gens: Sequence[RatMatrix]) -> Optional[ConeTable]:
    """Paired-arc certificate for hyperbolic-type generators.

    Conditions checked per radius: all 2k arcs pairwise disjoint; each
    generator maps the complement of its repelling arc into its attracting
    arc, and its inverse does the reverse.  These imply freeness by the
    standard ping-pong word argument, with no power conditions needed.
    """
    data = []
    for g in gens:
        if g.n != 2:
            return None
        cand = g if g.determinant() > 0 else g @ g
        if _is_scalar(cand) or _projective_character(cand) <= 4:
            return None
        angles = _fixed_angles(g)
        if angles is None:
            return None
        data.append((g.to_float(), np.linalg.inv(g.to_float()), angles))

    for delta in (0.5, 0.35, 0.25, 0.18, 0.12, 0.08, 0.05, 0.03,
                  0.02, 0.012, 0.008, 0.004, 0.002, 0.001):
        margin = max(1e-7, delta * 1e-3)
        arcs = []
        for _, _, (att, rep) in data:
            arcs.append((att, delta))
            arcs.append((rep, delta))
        ok = all(
            _proj_dist(arcs[i][0], arcs[j][0]) >= arcs[i][1] + arcs[j][1] + margin
            for i in range(len(arcs)) for j in range(i + 1, len(arcs)))
        if not ok:
            continue
        for gf, gfi, (att, rep) in data:
            att_arc, rep_arc = (att, delta), (rep, delta)
            if not _arc_maps_into(gf, _complement_arc(rep_arc), att_arc, margin):
                ok = False
                break
            if not _arc_maps_into(gfi, _complement_arc(att_arc), rep_arc, margin):
                ok = False
                break
        if ok:
            entries = tuple(
                ConeEntry(attracting=(att, delta), repelling=(rep, delta))
                for _, _, (att, rep) in data)
            return ConeTable(variant="schottky", entries=entries, margin=margin,
                             description="paired attracting/repelling arcs")
    return None


def free_injectivity(gens: Sequence[RatMatrix], depth: int = 6
                     ) -> FreenessCertificate:
    """Freeness certificate for the group generated by the given matrices.

    Exact word search up to the given depth first (a hit is a definite
    relation); then ping-pong table construction.  A PingPong result implies
    the word search found nothing, so the two certificate kinds are mutually
    exclusive by construction.
    """
    gens = list(gens)
    if not gens:
        return FreenessCertificate(kind="Unknown", depth=0, note="no generators")

    word = _relation_search(gens, depth)
    if word is not None:
        return FreenessCertificate(kind="RelationFound", depth=depth, word=word)

    if len(gens) == 1:
        g = gens[0]
        if _torsion_power(g) is None:
            cand = g if g.determinant() > 0 else g @ g
            cones = None
            if (g.n == 2 and not _is_scalar(cand)
                    and _projective_character(cand) >= 4):
                angles = _fixed_angles(g)
                if angles is not None:
                    cones = ConeTable(
                        variant="schottky",
                        entries=(ConeEntry(attracting=(angles[0], 0.1),
                                           repelling=(angles[1], 0.1)),),
                        margin=0.0,
                        description="single infinite-order generator")
            return FreenessCertificate(
                kind="PingPong", depth=depth, cones=cones,
                note="infinite cyclic: exact finite-order test excluded torsion")
        return FreenessCertificate(kind="Unknown", depth=depth)

    table = _axis_pair_certificate(gens)
    if table is None:
        table = _schottky_certificate(gens)
    if table is not None:
        return FreenessCertificate(kind="PingPong", depth=depth, cones=table)
    return FreenessCertificate(kind="Unknown", depth=depth)


# ---------------------------------------------------------------------------
# Hausdorff classes of GL2 subgroups


@dataclass(frozen=True)
class Sl2Part:
    """Norm-one leg of the classification.

    kind is one of Trivial, EllipticBounded, ParabolicElementary,
    HyperbolicElementary, Lattice, NonElementaryCantor, FullGroup, Unknown.
    A cofinite non-arithmetic lattice cannot arise from rational matrices;
    the marker string exists so callers can represent that case distinctly
    rather than conflate it with a finite modular index.
    """

    kind: str
    index: Optional[int] = None
    index_marker: str = ""
    translation_length: Optional[float] = None
    certificate_hash: Optional[str] = None


@dataclass(frozen=True)
class HausdorffClass:
    sl2_part: Sl2Part
    det_part: Gl1Class
    hom_graph: Optional[tuple] = None


def _primitive_integer_form(g: RatMatrix) -> tuple[IntMatrix, int]:
    """Clear denominators and content: the primitive integer matrix on the
    same projective ray, plus its determinant."""
    den = 1
    for i in range(2):
        for j in range(2):
            den = den * g[i, j].denominator // math.gcd(den, g[i, j].denominator)
    ints = [[int(g[i, j] * den) for j in range(2)] for i in range(2)]
    content = 0
    for row in ints:
        for x in row:
            content = math.gcd(content, abs(x))
    if content > 1:
        ints = [[x // content for x in row] for row in ints]
    m = IntMatrix(ints)
    return m, m.determinant()


def _common_fixed_direction(gens: Sequence[RatMatrix]
                            ) -> Optional[tuple[int, int]]:
    """A rational projective direction fixed by every generator, if one exists."""
    candidates: list[tuple[int, int]] = []
    for g in gens:
        disc = g.trace() ** 2 - 4 * g.determinant()
        if disc < 0:
            return None
        if disc == 0:
            candidates.append(_parabolic_fixed_direction(g))
        else:
            root = _rational_sqrt(disc)
            if root is None:
                continue
            for lam in ((g.trace() + root) / 2, (g.trace() - root) / 2):
                a = g[0, 0] - lam
                b = g[0, 1]
                if a == 0 and b == 0:
                    a, b = g[1, 0], g[1, 1] - lam
                candidates.append(_primitive_direction(b, -a))
        break
    for v in candidates:
        if all(_fixes_direction(g, v) for g in gens):
            return v
    return None


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    num = math.isqrt(q.numerator)
    den = math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


def _direction_multiplier(g: RatMatrix, v: tuple[int, int]) -> Fraction:
    """lambda^2/det for the eigenvalue lambda of g along direction v."""
    x = g[0, 0] * v[0] + g[0, 1] * v[1]
    y = g[1, 0] * v[0] + g[1, 1] * v[1]
    lam = Fraction(x, v[0]) if v[0] != 0 else Fraction(y, v[1])
    return lam * lam / g.determinant()


def hausdorff_class(group: Gl2Subgroup,
                    budget: int = TODD_COXETER_BUDGET,
                    pingpong_depth: int = 6) -> HausdorffClass:
    """Full coarse class: determinant leg plus norm-one leg.

    The norm-one leg runs: scalar check, boundedness, elementary types,
    shared-fixed-direction triangular analysis (an unbounded mixed group
    fixing one rational direction closes up to the full upper triangular
    block, which acts cocompactly), then lattice detection by coset
    enumeration, then a ping-pong Cantor certificate, and otherwise Unknown.
    """
    dets = [abs(g.determinant()) for g in group.generators]
    det_part = hausdorff_class_gl1(dets if dets else [1])

    nonscalar = [g for g in group.generators if not _is_scalar(g)]
    sl2: Sl2Part
    if not nonscalar:
        sl2 = Sl2Part(kind="Trivial")
    else:
        et = elementary_type(group)
        if et.kind == "Finite":
            sl2 = Sl2Part(kind="EllipticBounded")
        elif et.kind == "ParabolicElementary":
            sl2 = Sl2Part(kind="ParabolicElementary")
        elif et.kind == "HyperbolicElementary":
            sl2 = Sl2Part(kind="HyperbolicElementary",
                          translation_length=et.translation_length)
        else:
            sl2 = _classify_nonelementary(nonscalar, budget, pingpong_depth)

    hom_graph = None
    if det_part.kind != "Trivial":
        hom_graph = tuple(
            (str(abs(g.determinant())), "scalar" if _is_scalar(g) else "nonscalar")
            for g in group.generators if abs(g.determinant()) != 1)
    return HausdorffClass(sl2_part=sl2, det_part=det_part, hom_graph=hom_graph)


def _classify_nonelementary(gens: list[RatMatrix], budget: int,
                            pingpong_depth: int) -> Sl2Part:
    v = _common_fixed_direction(gens)
    if v is not None:
        multipliers = [_direction_multiplier(g, v) for g in gens]
        if all(abs(m) == 1 for m in multipliers):
            return Sl2Part(kind="ParabolicElementary")
        return Sl2Part(kind="FullGroup")

    primitive = []
    for g in gens:
        m, det = _primitive_integer_form(g)
        primitive.append((m, det))
    if all(det == 1 for _, det in primitive):
        try:
            proj = Gl2Subgroup([m.to_rat() for m, _ in primitive])
            res = classify_psl2z_subgroup(proj, budget=budget)
            if res.finite:
                return Sl2Part(kind="Lattice", index=res.index)
        except NotInLattice:
            pass

    cert = free_injectivity(gens, depth=pingpong_depth)
    if cert.kind == "PingPong" and cert.cones is not None:
        return Sl2Part(kind="NonElementaryCantor",
                       certificate_hash=cert.cones.canonical_hash())
    return Sl2Part(kind="Unknown")


@dataclass(frozen=True)
class EquivalenceVerdict:
    kind: str  # Equivalent | NotEquivalent | Unknown
    reason: str
    witness: Optional[object] = None


def hausdorff_equivalent(g1: Gl2Subgroup, g2: Gl2Subgroup,
                         conjugator: Optional[RatMatrix] = None,
                         search_depth: int = 5) -> EquivalenceVerdict:
    """Compare the coarse classes of two GL2(Q) subgroups.

    Distinct class fields decide inequivalence; matching elementary or
    lattice classes decide equivalence (two finite-index subgroups of the
    modular group are commensurable, and elementary classes of the same kind
    are conjugate up to bounded distance).  Matching Cantor-type classes stay
    Unknown unless a conjugator is supplied that verifiably carries one
    generator set into the group generated by the other.
    """
    c1 = hausdorff_class(g1)
    c2 = hausdorff_class(g2)

    if c1.det_part.kind != c2.det_part.kind:
        return EquivalenceVerdict(kind="NotEquivalent", reason="det_part kind")
    if (c1.det_part.kind == "Discrete"
            and c1.det_part.exponent_vector != c2.det_part.exponent_vector):
        return EquivalenceVerdict(kind="NotEquivalent",
                                  reason="det_part generator lattice")

    k1, k2 = c1.sl2_part.kind, c2.sl2_part.kind
    if "Unknown" in (k1, k2):
        return EquivalenceVerdict(kind="Unknown", reason="undecided sl2 part")
    if k1 != k2:
        return EquivalenceVerdict(kind="NotEquivalent", reason="sl2_part kind")

    if k1 in ("Trivial", "EllipticBounded", "ParabolicElementary",
              "HyperbolicElementary", "FullGroup"):
        return EquivalenceVerdict(kind="Equivalent",
                                  reason=f"matching {k1} classes")
    if k1 == "Lattice":
        if c1.hom_graph != c2.hom_graph:
            return EquivalenceVerdict(kind="Unknown",
                                      reason="scalar coupling differs")
        return EquivalenceVerdict(
            kind="Equivalent",
            reason="both of finite index in the modular group, hence commensurable")

    if conjugator is not None:
        if _conjugates_into(g1, g2, conjugator, search_depth):
            return EquivalenceVerdict(kind="Equivalent",
                                      reason="user conjugator verified",
                                      witness=conjugator)
    return EquivalenceVerdict(
        kind="Unknown",
        reason="Cantor-type classes need a conjugator to compare")


def _conjugates_into(g1: Gl2Subgroup, g2: Gl2Subgroup,
                     conjugator: RatMatrix, depth: int) -> bool:
    inv = conjugator.inverse()
    words: dict[RatMatrix, None] = {RatMatrix.identity(2): None}
    frontier = [RatMatrix.identity(2)]
    mats = list(g2.generators) + [g.inverse() for g in g2.generators]
    for _ in range(depth):
        nxt = []
        for m in frontier:
            for g in mats:
                p = m @ g
                if p not in words:
                    words[p] = None
                    nxt.append(p)
        frontier = nxt
    return all(conjugator @ a @ inv in words for a in g1.generators)


# ---------------------------------------------------------------------------
# integer-orbit reduction of vectors


@dataclass(frozen=True)
class ReductionStep:
    pivot: int
    other: int
    quotient: int
    norm: float


@dataclass(frozen=True)
class ReductionTrace:
    start: tuple
    final: tuple
    norms: tuple[float, ...]
    steps: tuple[ReductionStep, ...]
    matrices: tuple[IntMatrix, ...]
    transform: IntMatrix
    exact: bool
    stagnated: bool

    @property
    def step_count(self) -> int:
        return len(self.steps)


def _euclid_norm(vec: Sequence) -> float:
    return math.sqrt(sum(float(x) * float(x) for x in vec))


def orbit_reduce(v: Sequence, max_steps: int = 200,
                 stop_below: float = 0.0) -> ReductionTrace:
    """Greedy norm reduction along the integer-matrix orbit of a vector.

    Each step picks the largest coordinate and subtracts the best
    nearest-integer multiple of another nonzero coordinate, which is an
    elementary unimodular move.  Exact inputs (ints and Fractions) reduce
    until at most one coordinate is nonzero, reaching the gcd; float inputs
    reduce until stagnation, the step limit, or the stop threshold.
    """
    vec = list(v)
    n = len(vec)
    if n < 2:
        raise DimensionTooSmall("need at least two coordinates")
    exact = all(isinstance(x, (int, Fraction)) for x in vec)
    if exact:
        vec = [Fraction(x) for x in vec]
    else:
        vec = [float(x) for x in vec]

    start = tuple(vec)
    transform = IntMatrix.identity(n)
    norms = [_euclid_norm(vec)]
    steps: list[ReductionStep] = []
    matrices: list[IntMatrix] = []

    for _ in range(max_steps):
        nonzero = [idx for idx in range(n) if vec[idx] != 0]
        if len(nonzero) <= 1:
            break
        if norms[-1] < stop_below:
            break
        i = max(range(n), key=lambda idx: (abs(vec[idx]), -idx))
        best = None
        for j in range(n):
            if j == i or vec[j] == 0:
                continue
            if exact:
                q = math.floor(vec[i] / vec[j] + _HALF)
            else:
                q = math.floor(vec[i] / vec[j] + 0.5)
            if q == 0:
                continue
            new = vec[i] - q * vec[j]
            if best is None or abs(new) < best[0]:
                best = (abs(new), j, q, new)
        if best is None or best[0] >= abs(vec[i]):
            return ReductionTrace(
                start=start, final=tuple(vec), norms=tuple(norms),
                steps=tuple(steps), matrices=tuple(matrices),
                transform=transform, exact=exact, stagnated=True)
        _, j, q, new = best
        vec[i] = new
        rows = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        rows[i][j] = -q
        e = IntMatrix(rows)
        matrices.append(e)
        transform = e @ transform
        norms.append(_euclid_norm(vec))
        steps.append(ReductionStep(pivot=i, other=j, quotient=q,
                                   norm=norms[-1]))
    nonzero = [idx for idx in range(n) if vec[idx] != 0]
    if exact and len(nonzero) == 1 and (nonzero[0] != 0 or vec[0] < 0):
        k = nonzero[0]
        sign = 1 if vec[k] > 0 else -1
        rows = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        rows[0][0] = rows[k][k] = 0
        rows[0][k] = sign
        rows[k][0] = sign
        perm = IntMatrix(rows)
        vec[0], vec[k] = sign * vec[k], sign * vec[0]
        matrices.append(perm)
        transform = perm @ transform
    return ReductionTrace(
        start=start, final=tuple(vec), norms=tuple(norms), steps=tuple(steps),
        matrices=tuple(matrices), transform=transform, exact=exact,
        stagnated=False)


@dataclass(frozen=True)
class LineVerdict:
    kind: str  # OnRationalLine | NotOnRationalLine | Unknown
    direction: Optional[tuple[int, ...]] = None
    trace: Optional[ReductionTrace] = None


def _primitive_tuple(vec: Sequence[Fraction]) -> Optional[tuple[int, ...]]:
    if all(x == 0 for x in vec):
        return None
    den = 1
    for x in vec:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def rational_line_test(v: Sequence, tol: float = 1e-10,
                       max_steps: int = 200) -> LineVerdict:
    """Decide whether a vector lies on a line through integer points.

    Exact rational input is always decided, with the primitive integer
    direction.  Float input is judged by orbit reduction: clean cancellation
    to one coordinate reconstructs a direction; decay of the norm below the
    declared tolerance is negative evidence; anything at the float noise
    floor stays Unknown.
    """
    vec = list(v)
    if len(vec) < 2:
        raise DimensionTooSmall("need at least two coordinates")
    if all(isinstance(x, (int, Fraction)) for x in vec):
        fracs = [Fraction(x) for x in vec]
        return LineVerdict(kind="OnRationalLine",
                           direction=_primitive_tuple(fracs))

    floats = [float(x) for x in vec]
    noise = 1e-13 * max(_euclid_norm(floats), 1e-30)
    trace = orbit_reduce(floats, max_steps=max_steps,
                         stop_below=max(tol, noise))
    final = trace.final
    nonzero = [idx for idx in range(len(final)) if final[idx] != 0.0]
    if len(nonzero) <= 1 and (not nonzero or abs(final[nonzero[0]]) > noise):
        direction = None
        if nonzero:
            idx = nonzero[0]
            inv = trace.transform.to_rat().inverse()
            col = [inv[r, idx] for r in range(inv.n)]
            direction = _primitive_tuple(col)
        return LineVerdict(kind="OnRationalLine", direction=direction,
                           trace=trace)
    if trace.norms[-1] < tol:
        return LineVerdict(kind="NotOnRationalLine", trace=trace)
    return LineVerdict(kind="Unknown", trace=trace)
