"""Bounded complexes of finite modules and the sign conventions between them.

Conventions
-----------
* Differentials raise degree: ``d^i: X^i -> X^{i+1}``.
* Translation: ``X[n]^i = X^{n+i}`` with ``d_{X[n]} = (-1)^n d_X``.
* Cone: ``Cone(f)^i = Y^i ⊕ X^{i+1}`` with ``d = [[d_Y, f], [0, -d_X]]``.
* Shifted cone (compact support shape): ``E^i = A^i ⊕ B^{i-1}`` with
  ``d(a, b) = (d a, -f a - d b)``.
* Tensor: ``d(m ⊗ l) = dm ⊗ l + (-1)^|m| m ⊗ dl``, blocks (p, q) ordered by p.
* Hom: ``(d f) = d ∘ f - (-1)^n f ∘ d`` for f of degree n, blocks ordered by
  source degree; degree-0 cycles are exactly the chain maps.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .errors import (IncompatiblePairings, MalformedTriangle, NotAChainMap,
                     NotAHomotopy, NotExact, ValidationError)
from .groups import FiniteGroup
from .linalg import (INT, RingSpec, Subquotient, check_map, image_order,
                     induced_matrix, kernel, solve)
from .modules import (GModule, ModuleMap, direct_sum, hom_matrix, hom_mod,
                      matrix_to_hom, hom_to_matrix, tensor_mod)

logger = logging.getLogger(__name__)


def zero_module(ring: RingSpec, group: FiniteGroup) -> GModule:
    return GModule(ring, (), group, check=False)


def _zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=INT)


class Complex:
    """A complex X^lo -> ... -> X^hi of modules over one group.

    ``layout[i]`` optionally records how term i splits into named blocks as
    ``[(key, offset, size), ...]``.
    """

    def __init__(self, ring: RingSpec, lo: int, hi: int, terms: Dict[int, GModule],
                 diffs: Dict[int, np.ndarray] = None, group: FiniteGroup = None,
                 layout: Dict[int, list] = None, check: bool = True, label: str = None):
        if hi < lo:
            hi = lo - 1
        self.ring = ring
        self.lo, self.hi = lo, hi
        if group is None:
            group = next(iter(terms.values())).group if terms else None
        if group is None:
            from .groups import trivial
            group = trivial()
        self.group = group
        self._terms = {i: terms[i] for i in range(lo, hi + 1) if i in terms and terms[i].rank}
        self._diffs = {}
        self.layout = layout or {}
        self.label = label
        self._cohomology = {}
        diffs = diffs or {}
        for i in range(lo, hi):
            src, tgt = self.term(i), self.term(i + 1)
            if i not in diffs or not src.rank or not tgt.rank:
                continue
            mat = np.asarray(diffs[i], dtype=INT).reshape(tgt.rank, src.rank)
            if check:
                mat = ModuleMap(src, tgt, mat).matrix
            else:
                mat = mat % tgt.orders[:, None]
            if mat.any():
                self._diffs[i] = mat
        if check:
            self.check()

    def check(self):
        for i in range(self.lo, self.hi - 1):
            dd = self.diff(i + 1) @ self.diff(i) % self.term(i + 2).orders[:, None]
            if dd.any():
                j, k = (int(x) for x in np.argwhere(dd)[0])
                raise ValidationError("d^%d d^%d != 0: entry (%d, %d) is %d" % (i + 1, i, j, k, dd[j, k]))

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def term(self, i: int) -> GModule:
        mod = self._terms.get(i)
        return mod if mod is not None else zero_module(self.ring, self.group)

    def rank(self, i: int) -> int:
        mod = self._terms.get(i)
        return mod.rank if mod is not None else 0

    def exps(self, i: int) -> Tuple[int, ...]:
        mod = self._terms.get(i)
        return mod.exps if mod is not None else ()

    def diff(self, i: int) -> np.ndarray:
        mat = self._diffs.get(i)
        return mat if mat is not None else _zeros(self.rank(i + 1), self.rank(i))

    def block(self, i: int, key):
        """(offset, size) of a named block of term i, or None."""
        for k, off, size in self.layout.get(i, ()):
            if k == key:
                return off, size
        return None

    def cohomology(self, i: int) -> Subquotient:
        """H^i as a subquotient of X^i (cached so coordinates stay fixed)."""
        if i not in self._cohomology:
            exps = self.exps(i)
            cycles = kernel(self.diff(i), exps, self.exps(i + 1), self.ring)
            boundaries = self.diff(i - 1).T
            self._cohomology[i] = Subquotient(cycles, exps, boundaries, self.ring)
            logger.debug("H^%d: %d cycle generators, invariants %s", i, len(cycles),
                         self._cohomology[i].invariants)
        return self._cohomology[i]

    def cohomology_groups(self, degrees=None) -> Dict[int, "FinAb"]:
        degrees = self.degrees() if degrees is None else degrees
        return {i: self.cohomology(i).invariants for i in degrees}

    def is_acyclic(self, degrees=None) -> bool:
        return all(h.is_zero() for h in self.cohomology_groups(degrees).values())

    def __repr__(self):
        return "Complex(%s, [%d, %d], ranks=%s)" % (
            self.ring, self.lo, self.hi, [self.rank(i) for i in self.degrees()])


def complex_from_modules(modules: Dict[int, GModule], diffs: Dict[int, np.ndarray] = None,
                         label: str = None) -> Complex:
    degs = sorted(modules)
    first = modules[degs[0]]
    return Complex(first.ring, degs[0], degs[-1], modules, diffs or {}, group=first.group, label=label)


def concentrated(m: GModule, degree: int = 0) -> Complex:
    return Complex(m.ring, degree, degree, {degree: m}, {}, group=m.group)


class GradedMap:
    """Components f^i: X^i -> Y^{i+degree}, with no compatibility required."""

    def __init__(self, source: Complex, target: Complex, comps: Dict[int, np.ndarray], degree: int = 0):
        self.source = source
        self.target = target
        self.degree = degree
        self._comps = {}
        for i, mat in comps.items():
            rows, cols = target.rank(i + degree), source.rank(i)
            if not rows or not cols:
                continue
            mat = check_map(np.asarray(mat, dtype=INT).reshape(rows, cols),
                            source.exps(i), target.exps(i + degree), source.ring)
            if mat.any():
                self._comps[i] = mat

    def comp(self, i: int) -> np.ndarray:
        mat = self._comps.get(i)
        return mat if mat is not None else _zeros(self.target.rank(i + self.degree), self.source.rank(i))

    def degrees(self):
        lo = min(self.source.lo, self.target.lo - self.degree)
        hi = max(self.source.hi, self.target.hi - self.degree)
        return range(lo, hi + 1)

    def __add__(self, other):
        return type(self)._raw(self.source, self.target, {
            i: self.comp(i) + other.comp(i) for i in self.degrees()}, self.degree)

    def __neg__(self):
        return type(self)._raw(self.source, self.target, {i: -self.comp(i) for i in self.degrees()},
                               self.degree)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int):
        return type(self)._raw(self.source, self.target, {i: c * self.comp(i) for i in self.degrees()},
                               self.degree)

    @classmethod
    def _raw(cls, source, target, comps, degree):
        out = GradedMap.__new__(cls)
        GradedMap.__init__(out, source, target, comps, degree)
        return out

    def equals(self, other: "GradedMap") -> bool:
        for i in self.degrees():
            orders = self.target.term(i + self.degree).orders[:, None]
            if ((self.comp(i) - other.comp(i)) % orders).any():
                return False
        return True

    def differential(self) -> "GradedMap":
        """d ∘ f - (-1)^n f ∘ d."""
        n = self.degree
        sign = -1 if n % 2 else 1
        return GradedMap(self.source, self.target, {
            i: self.target.diff(i + n) @ self.comp(i) - sign * self.comp(i + 1) @ self.source.diff(i)
            for i in self.degrees()}, n + 1)


class ChainMap(GradedMap):
    """A degree-0 graded map commuting with the differentials."""

    def __init__(self, source: Complex, target: Complex, comps: Dict[int, np.ndarray], check: bool = True):
        super().__init__(source, target, comps, 0)
        if check:
            self.check()

    @classmethod
    def _raw(cls, source, target, comps, degree):
        return cls(source, target, comps, check=False)

    def check(self):
        for i in self.degrees():
            lhs = self.target.diff(i) @ self.comp(i)
            rhs = self.comp(i + 1) @ self.source.diff(i)
            bad = (lhs - rhs) % self.target.term(i + 1).orders[:, None]
            if bad.any():
                j, k = (int(x) for x in np.argwhere(bad)[0])
                raise NotAChainMap("d f^%d != f^%d d at entry (%d, %d)" % (i, i + 1, j, k))

    def induced(self, i: int) -> np.ndarray:
        """Matrix of H^i(f)."""
        return induced_matrix(self.comp(i), self.source.cohomology(i), self.target.cohomology(i))

    def is_zero(self) -> bool:
        return not self._comps


def compose(g: GradedMap, f: GradedMap) -> GradedMap:
    """g after f; a ChainMap when both are."""
    comps = {i: g.comp(i + f.degree) @ f.comp(i) for i in f.degrees()}
    if isinstance(f, ChainMap) and isinstance(g, ChainMap):
        return ChainMap(f.source, g.target, comps, check=False)
    return GradedMap(f.source, g.target, comps, f.degree + g.degree)


def identity(x: Complex) -> ChainMap:
    return ChainMap(x, x, {i: np.eye(x.rank(i), dtype=INT) for i in x.degrees()}, check=False)


def zero_chain_map(x: Complex, y: Complex) -> ChainMap:
    return ChainMap(x, y, {}, check=False)


class Homotopy:
    """s with target_map - source_map = d s + s d, checked on construction."""

    def __init__(self, source_map: ChainMap, target_map: ChainMap, comps: Dict[int, np.ndarray],
                 check: bool = True):
        self.source_map = source_map
        self.target_map = target_map
        self.s = GradedMap(source_map.source, source_map.target, comps, -1)
        if check:
            self.check()

    def comp(self, i: int) -> np.ndarray:
        return self.s.comp(i)

    def check(self):
        x, y = self.source_map.source, self.source_map.target
        for i in self.s.degrees():
            lhs = self.target_map.comp(i) - self.source_map.comp(i)
            rhs = y.diff(i - 1) @ self.s.comp(i) + self.s.comp(i + 1) @ x.diff(i)
            bad = (lhs - rhs) % y.term(i).orders[:, None]
            if bad.any():
                j, k = (int(v) for v in np.argwhere(bad)[0])
                raise NotAHomotopy("target - source != d s + s d in degree %d at entry (%d, %d)" % (i, j, k))


def strict_homotopy(f: ChainMap, g: ChainMap) -> Homotopy:
    """The zero homotopy, witnessing f = g."""
    return Homotopy(f, g, {})


# translation and truncation

def shift(x: Complex, n: int) -> Complex:
    sign = -1 if n % 2 else 1
    return Complex(x.ring, x.lo - n, x.hi - n, {i - n: x.term(i) for i in x.degrees()},
                   {i - n: sign * x.diff(i) for i in x.degrees()}, group=x.group,
                   layout={i - n: v for i, v in x.layout.items()}, check=False)


def shift_map(f: GradedMap, n: int, source: Complex = None, target: Complex = None):
    source = source or shift(f.source, n)
    target = target or shift(f.target, n)
    comps = {i - n: f.comp(i) for i in f.degrees()}
    if isinstance(f, ChainMap):
        return ChainMap(source, target, comps, check=False)
    return GradedMap(source, target, comps, f.degree)


def submodule(m: GModule, gens):
    """A G-stable subgroup spanned by gens, in its own cyclic coordinates.

    Returns the module, the inclusion matrix and the Subquotient used for coordinates.
    """
    sq = Subquotient(gens, m.exps, np.zeros((0, m.rank), dtype=INT), m.ring)
    basis = sq.lift(np.eye(len(sq.exps), dtype=INT)).reshape(len(sq.exps), m.rank)
    incl = basis.T.copy()
    action = None if m.lazy_trivial or not len(sq.exps) else np.stack(
        [sq.coords(basis @ m.action[g].T).reshape(len(sq.exps), len(sq.exps)).T for g in range(m.group.order)])
    sub = GModule(m.ring, sq.exps, m.group, action, check=False)
    return sub, incl, sq


def quotient_module(m: GModule, gens):
    """M / span(gens) with the projection matrix and the Subquotient used for coordinates."""
    sq = Subquotient(np.eye(m.rank, dtype=INT), m.exps, gens, m.ring)
    proj = sq.coords(np.eye(m.rank, dtype=INT)).reshape(m.rank, len(sq.exps)).T.copy()
    reps = sq.lift(np.eye(len(sq.exps), dtype=INT)).reshape(len(sq.exps), m.rank)
    action = None if m.lazy_trivial or not len(sq.exps) else np.stack(
        [sq.coords(reps @ m.action[g].T).reshape(len(sq.exps), len(sq.exps)).T for g in range(m.group.order)])
    quo = GModule(m.ring, sq.exps, m.group, action, check=False)
    return quo, proj, reps.T.copy()


TRUNCATIONS = ("sigma_le", "sigma_ge", "tau_le", "tau_ge")


def truncation(x: Complex, kind: str, i: int):
    """The truncated complex with its canonical map.

    sigma_le / tau_ge come with the projection X -> trunc; sigma_ge / tau_le
    with the inclusion trunc -> X.
    """
    if kind not in TRUNCATIONS:
        raise ValidationError("unknown truncation %r" % kind)
    ring, group = x.ring, x.group
    if kind == "sigma_le":
        hi = min(x.hi, i)
        t = Complex(ring, x.lo, hi, {j: x.term(j) for j in range(x.lo, hi + 1)},
                    {j: x.diff(j) for j in range(x.lo, hi)}, group=group, check=False)
        return t, ChainMap(x, t, {j: np.eye(x.rank(j), dtype=INT) for j in range(x.lo, hi + 1)}, check=False)
    if kind == "sigma_ge":
        lo = max(x.lo, i)
        t = Complex(ring, lo, x.hi, {j: x.term(j) for j in range(lo, x.hi + 1)},
                    {j: x.diff(j) for j in range(lo, x.hi)}, group=group, check=False)
        return t, ChainMap(t, x, {j: np.eye(x.rank(j), dtype=INT) for j in range(lo, x.hi + 1)}, check=False)
    if kind == "tau_le":
        if i >= x.hi:
            return x, identity(x)
        if i < x.lo:
            t = Complex(ring, x.lo, x.lo - 1, {}, {}, group=group)
            return t, zero_chain_map(t, x)
        sub, incl, sq = submodule(x.term(i), kernel(x.diff(i), x.exps(i), x.exps(i + 1), ring))
        terms = {j: x.term(j) for j in range(x.lo, i)}
        terms[i] = sub
        diffs = {j: x.diff(j) for j in range(x.lo, i - 1)}
        if i - 1 >= x.lo and sub.rank:
            last = x.diff(i - 1)
            diffs[i - 1] = sq.coords(last.T).reshape(x.rank(i - 1), sub.rank).T
        t = Complex(ring, x.lo, i, terms, diffs, group=group)
        comps = {j: np.eye(x.rank(j), dtype=INT) for j in range(x.lo, i)}
        comps[i] = incl
        return t, ChainMap(t, x, comps)
    # tau_ge
    if i <= x.lo:
        return x, identity(x)
    if i > x.hi:
        t = Complex(ring, x.hi + 1, x.hi, {}, {}, group=group)
        return t, zero_chain_map(x, t)
    quo, proj, reps = quotient_module(x.term(i), x.diff(i - 1).T)
    terms = {j: x.term(j) for j in range(i + 1, x.hi + 1)}
    terms[i] = quo
    diffs = {j: x.diff(j) for j in range(i + 1, x.hi)}
    if quo.rank and i + 1 <= x.hi:
        diffs[i] = x.diff(i) @ reps
    t = Complex(ring, i, x.hi, terms, diffs, group=group)
    comps = {j: np.eye(x.rank(j), dtype=INT) for j in range(i + 1, x.hi + 1)}
    comps[i] = proj
    return t, ChainMap(x, t, comps)


def truncate(x: Complex, kind: str, i: int) -> Complex:
    return truncation(x, kind, i)[0]


# sums, cones

def _sum_terms(parts: List[Tuple[object, GModule]], ring, group):
    mods = [m for _, m in parts if m.rank]
    layout, off = [], 0
    for key, m in parts:
        layout.append((key, off, m.rank))
        off += m.rank
    if not mods:
        return zero_module(ring, group), layout
    return direct_sum(*mods)[0], layout


def _place(mat: np.ndarray, rows: Tuple[int, int], cols: Tuple[int, int], block: np.ndarray):
    r0, nr = rows
    c0, nc = cols
    if nr and nc:
        mat[r0:r0 + nr, c0:c0 + nc] += np.asarray(block, dtype=INT).reshape(nr, nc)


def direct_sum_complex(*xs: Complex) -> Complex:
    ring, group = xs[0].ring, xs[0].group
    lo, hi = min(x.lo for x in xs), max(x.hi for x in xs)
    terms, layout, diffs = {}, {}, {}
    for i in range(lo, hi + 1):
        terms[i], layout[i] = _sum_terms([(k, x.term(i)) for k, x in enumerate(xs)], ring, group)
    for i in range(lo, hi):
        d = _zeros(terms[i + 1].rank, terms[i].rank)
        for k, x in enumerate(xs):
            _place(d, layout[i + 1][k][1:], layout[i][k][1:], x.diff(i))
        diffs[i] = d
    return Complex(ring, lo, hi, terms, diffs, group=group, layout=layout, check=False)


def total_complex(columns: Dict[int, Complex], horizontals: Dict[int, ChainMap], ring: RingSpec,
                  group: FiniteGroup, check: bool = True) -> Complex:
    """Total complex of a double complex given by its columns.

    Column i is a complex in the vertical degree j, ``horizontals[i]`` is a
    chain map column i -> column i+1.  Term n is the sum of the (i, j) with
    i + j = n, ordered by i; the differential is h + (-1)^i d_column.
    """
    keys = sorted(columns)
    lo = min(i + columns[i].lo for i in keys)
    hi = max(i + columns[i].hi for i in keys)
    terms, layout, diffs = {}, {}, {}
    for n in range(lo, hi + 1):
        parts = [((i, n - i), columns[i].term(n - i)) for i in keys
                 if columns[i].lo <= n - i <= columns[i].hi]
        terms[n], layout[n] = _sum_terms(parts, ring, group)
    for n in range(lo, hi):
        d = _zeros(terms[n + 1].rank, terms[n].rank)
        targets = {key: (off, size) for key, off, size in layout[n + 1]}
        for (i, j), off, size in layout[n]:
            if not size:
                continue
            if (i, j + 1) in targets:
                sign = -1 if i % 2 else 1
                _place(d, targets[i, j + 1], (off, size), sign * columns[i].diff(j))
            if (i + 1, j) in targets and i in horizontals:
                _place(d, targets[i + 1, j], (off, size), horizontals[i].comp(j))
        diffs[n] = d
    x = Complex(ring, lo, hi, terms, diffs, group=group, layout=layout, check=False)
    if check:
        x.check()
    return x


def blockwise_map(source: Complex, target: Complex, rule: Callable, degree: int = 0):
    """Assemble a map from per-block pieces.

    ``rule(key, n)`` returns ``(target_key, matrix)`` or None for a source block
    ``key`` of term n; the matrix goes into the target block of term n + degree.
    """
    comps = {}
    for n in source.degrees():
        mat = _zeros(target.rank(n + degree), source.rank(n))
        for key, off, size in source.layout.get(n, ()):
            if not size:
                continue
            got = rule(key, n)
            if got is None:
                continue
            tkey, block = got
            tgt = target.block(n + degree, tkey)
            if tgt and tgt[1]:
                _place(mat, tgt, (off, size), block)
        comps[n] = mat
    if degree == 0:
        return ChainMap(source, target, comps)
    return GradedMap(source, target, comps, degree)


def direct_sum_map(fs: List[ChainMap], source: Complex, target: Complex) -> ChainMap:
    """Blockwise map between two direct sums built with direct_sum_complex."""
    comps = {}
    for i in source.degrees():
        mat = _zeros(target.rank(i), source.rank(i))
        for k, f in enumerate(fs):
            _place(mat, target.layout[i][k][1:], source.layout[i][k][1:], f.comp(i))
        comps[i] = mat
    return ChainMap(source, target, comps)


@dataclass
class Cone:
    complex: Complex
    inclusion: ChainMap
    projection: ChainMap
    shifted_source: Complex


def cone(f: ChainMap) -> Cone:
    """Cone(f) = Y ⊕ X[1] with d = [[d_Y, f], [0, -d_X]] and the maps Y -> Cone -> X[1]."""
    x, y = f.source, f.target
    ring, group = x.ring, x.group
    lo, hi = min(y.lo, x.lo - 1), max(y.hi, x.hi - 1)
    terms, layout, diffs = {}, {}, {}
    for i in range(lo, hi + 1):
        terms[i], layout[i] = _sum_terms([("Y", y.term(i)), ("X", x.term(i + 1))], ring, group)
    for i in range(lo, hi):
        d = _zeros(terms[i + 1].rank, terms[i].rank)
        (_, yo, yn), (_, xo, xn) = layout[i]
        (_, yo1, yn1), (_, xo1, xn1) = layout[i + 1]
        _place(d, (yo1, yn1), (yo, yn), y.diff(i))
        _place(d, (yo1, yn1), (xo, xn), f.comp(i + 1))
        _place(d, (xo1, xn1), (xo, xn), -x.diff(i + 1))
        diffs[i] = d
    c = Complex(ring, lo, hi, terms, diffs, group=group, layout=layout)
    x1 = shift(x, 1)
    inc, proj = {}, {}
    for i in range(lo, hi + 1):
        (_, yo, yn), (_, xo, xn) = layout[i]
        m = _zeros(terms[i].rank, yn)
        _place(m, (yo, yn), (0, yn), np.eye(yn, dtype=INT))
        inc[i] = m
        q = _zeros(xn, terms[i].rank)
        _place(q, (0, xn), (xo, xn), np.eye(xn, dtype=INT))
        proj[i] = q
    return Cone(c, ChainMap(y, c, inc), ChainMap(c, x1, proj), x1)


@dataclass
class ShiftedCone:
    """E = Cone(f)[-1] written as A ⊕ B[-1], with 0 -> B[-1] -> E -> A -> 0."""
    complex: Complex
    f: ChainMap
    inclusion: ChainMap
    projection: ChainMap
    shifted_target: Complex

    def split(self, i: int):
        return self.complex.block(i, "A"), self.complex.block(i, "B")


def cone_shifted(f: ChainMap) -> ShiftedCone:
    a, b = f.source, f.target
    ring, group = a.ring, a.group
    lo, hi = min(a.lo, b.lo + 1), max(a.hi, b.hi + 1)
    terms, layout, diffs = {}, {}, {}
    for i in range(lo, hi + 1):
        terms[i], layout[i] = _sum_terms([("A", a.term(i)), ("B", b.term(i - 1))], ring, group)
    for i in range(lo, hi):
        d = _zeros(terms[i + 1].rank, terms[i].rank)
        (_, ao, an), (_, bo, bn) = layout[i]
        (_, ao1, an1), (_, bo1, bn1) = layout[i + 1]
        _place(d, (ao1, an1), (ao, an), a.diff(i))
        _place(d, (bo1, bn1), (ao, an), -f.comp(i))
        _place(d, (bo1, bn1), (bo, bn), -b.diff(i - 1))
        diffs[i] = d
    e = Complex(ring, lo, hi, terms, diffs, group=group, layout=layout)
    bm1 = shift(b, -1)
    inc, proj = {}, {}
    for i in range(lo, hi + 1):
        (_, ao, an), (_, bo, bn) = layout[i]
        m = _zeros(terms[i].rank, bn)
        _place(m, (bo, bn), (0, bn), np.eye(bn, dtype=INT))
        inc[i] = m
        q = _zeros(an, terms[i].rank)
        _place(q, (0, an), (ao, an), np.eye(an, dtype=INT))
        proj[i] = q
    return ShiftedCone(e, f, ChainMap(bm1, e, inc), ChainMap(e, a, proj), bm1)


def map_of_shifted_cones(source: ShiftedCone, target: ShiftedCone, alpha: ChainMap, beta: ChainMap,
                         h: Optional[GradedMap] = None, check: bool = True) -> ChainMap:
    """(a, b) -> (alpha a, beta b + h a), for beta f - f' alpha = d h + h d."""
    e, e2 = source.complex, target.complex
    comps = {}
    for i in e.degrees():
        mat = _zeros(e2.rank(i), e.rank(i))
        (_, ao, an), (_, bo, bn) = e.layout[i]
        (_, ao2, an2), (_, bo2, bn2) = e2.layout.get(i, [("A", 0, 0), ("B", 0, 0)])
        _place(mat, (ao2, an2), (ao, an), alpha.comp(i))
        _place(mat, (bo2, bn2), (bo, bn), beta.comp(i - 1))
        if h is not None:
            _place(mat, (bo2, bn2), (ao, an), h.comp(i))
        comps[i] = mat
    return ChainMap(e, e2, comps, check=check)


# tensor and Hom complexes

def tensor_complex(m: Complex, l: Complex) -> Complex:
    ring, group = m.ring, m.group
    lo, hi = m.lo + l.lo, m.hi + l.hi
    terms, layout, diffs = {}, {}, {}
    for n in range(lo, hi + 1):
        parts = [((p, n - p), tensor_mod(m.term(p), l.term(n - p)))
                 for p in range(m.lo, m.hi + 1) if l.lo <= n - p <= l.hi]
        terms[n], layout[n] = _sum_terms(parts, ring, group)
    for n in range(lo, hi):
        d = _zeros(terms[n + 1].rank, terms[n].rank)
        targets = {key: (off, size) for key, off, size in layout[n + 1]}
        for (p, q), off, size in layout[n]:
            if not size:
                continue
            sign = -1 if p % 2 else 1
            if (p + 1, q) in targets:
                _place(d, targets[p + 1, q], (off, size), np.kron(m.diff(p), np.eye(l.rank(q), dtype=INT)))
            if (p, q + 1) in targets:
                _place(d, targets[p, q + 1], (off, size),
                       sign * np.kron(np.eye(m.rank(p), dtype=INT), l.diff(q)))
        diffs[n] = d
    return Complex(ring, lo, hi, terms, diffs, group=group, layout=layout, check=False)


def tensor_chain_map(f: ChainMap, g: ChainMap, source: Complex = None, target: Complex = None) -> ChainMap:
    source = source or tensor_complex(f.source, g.source)
    target = target or tensor_complex(f.target, g.target)
    comps = {}
    for n in source.degrees():
        mat = _zeros(target.rank(n), source.rank(n))
        for (p, q), off, size in source.layout.get(n, ()):
            tgt = target.block(n, (p, q))
            if size and tgt:
                _place(mat, tgt, (off, size), np.kron(f.comp(p), g.comp(q)))
        comps[n] = mat
    return ChainMap(source, target, comps)


def hom_complex(m: Complex, n: Complex) -> Complex:
    """Hom(M, N)^k = prod_i Hom(M^i, N^{i+k}) with d f = d f - (-1)^k f d."""
    ring, group = m.ring, m.group
    lo, hi = n.lo - m.hi, n.hi - m.lo
    terms, layout, diffs = {}, {}, {}
    for k in range(lo, hi + 1):
        parts = [(i, hom_mod(m.term(i), n.term(i + k)))
                 for i in range(m.lo, m.hi + 1) if n.lo <= i + k <= n.hi]
        terms[k], layout[k] = _sum_terms(parts, ring, group)
    for k in range(lo, hi):
        d = _zeros(terms[k + 1].rank, terms[k].rank)
        sign = -1 if k % 2 else 1
        targets = {key: (off, size) for key, off, size in layout[k + 1]}
        for i, off, size in layout[k]:
            if not size:
                continue
            # f^i contributes d_N f^i to block i ...
            if i in targets:
                _place(d, targets[i], (off, size),
                       hom_matrix(np.eye(m.rank(i), dtype=INT), n.diff(i + k),
                                  m.exps(i), m.exps(i), n.exps(i + k), n.exps(i + k + 1), ring))
            # ... and -(-1)^k f^i d_M to block i - 1
            if i - 1 in targets:
                _place(d, targets[i - 1], (off, size),
                       -sign * hom_matrix(m.diff(i - 1), np.eye(n.rank(i + k), dtype=INT),
                                          m.exps(i - 1), m.exps(i), n.exps(i + k), n.exps(i + k), ring))
        diffs[k] = d
    return Complex(ring, lo, hi, terms, diffs, group=group, layout=layout, check=False)


def hom_element(f: GradedMap, hom: Complex = None) -> np.ndarray:
    """Coordinates of a graded map in Hom(M, N)^degree."""
    hom = hom or hom_complex(f.source, f.target)
    k = f.degree
    out = np.zeros(hom.rank(k), dtype=INT)
    for i, off, size in hom.layout.get(k, ()):
        if size:
            out[off:off + size] = matrix_to_hom(f.comp(i), f.source.exps(i), f.target.exps(i + k), f.source.ring)
    return out


def graded_map_from_element(x, m: Complex, n: Complex, k: int, hom: Complex = None) -> GradedMap:
    hom = hom or hom_complex(m, n)
    x = np.asarray(x, dtype=INT)
    comps = {}
    for i, off, size in hom.layout.get(k, ()):
        if size:
            comps[i] = hom_to_matrix(x[off:off + size], m.exps(i), n.exps(i + k), m.ring)
    return GradedMap(m, n, comps, k)


def hom_chain_map(f: ChainMap, g: ChainMap, source: Complex = None, target: Complex = None) -> ChainMap:
    """Hom(f, g): Hom(X, Y) -> Hom(X', Y'), phi -> g phi f, for f: X' -> X and g: Y -> Y'."""
    source = source or hom_complex(f.target, g.source)
    target = target or hom_complex(f.source, g.target)
    ring = source.ring
    comps = {}
    for k in source.degrees():
        mat = _zeros(target.rank(k), source.rank(k))
        for i, off, size in source.layout.get(k, ()):
            tgt = target.block(k, i)
            if size and tgt:
                _place(mat, tgt, (off, size),
                       hom_matrix(f.comp(i), g.comp(i + k), f.source.exps(i), f.target.exps(i),
                                  g.source.exps(i + k), g.target.exps(i + k), ring))
        comps[k] = mat
    return ChainMap(source, target, comps)


def translation_isos(m: Complex, n: Complex, shift_by: int):
    """The three translation isomorphisms as chain maps:

    Hom(M, N)[k] -> Hom(M, N[k]);  (M[k]) ⊗ N -> (M ⊗ N)[k];
    M ⊗ (N[k]) -> (M ⊗ N)[k], the last with sign (-1)^(k |m|).
    """
    k = shift_by

    def blockwise(source, target, rule):
        comps = {}
        for deg in source.degrees():
            mat = _zeros(target.rank(deg), source.rank(deg))
            for key, off, size in source.layout.get(deg, ()):
                tkey, sign = rule(key)
                tgt = target.block(deg, tkey)
                if size and tgt:
                    _place(mat, tgt, (off, size), sign * np.eye(size, dtype=INT))
            comps[deg] = mat
        return ChainMap(source, target, comps)

    hom_iso = blockwise(shift(hom_complex(m, n), k), hom_complex(m, shift(n, k)), lambda i: (i, 1))
    left_iso = blockwise(tensor_complex(shift(m, k), n), shift(tensor_complex(m, n), k),
                         lambda key: ((key[0] + k, key[1]), 1))
    right_iso = blockwise(tensor_complex(m, shift(n, k)), shift(tensor_complex(m, n), k),
                          lambda key: ((key[0], key[1] + k), -1 if (k * key[0]) % 2 else 1))
    return hom_iso, left_iso, right_iso


# adjunction

def _block_columns(f: GradedMap, p: int, q: int) -> Optional[np.ndarray]:
    """Columns of f on the (p, q) block of its tensor-complex source."""
    blk = f.source.block(p + q, (p, q))
    if blk is None or not blk[1]:
        return None
    off, size = blk
    return f.comp(p + q)[:, off:off + size]


def adjunction(f: GradedMap, m: Complex, l: Complex):
    """Curry f: M ⊗ L -> N of degree d into both adjoints.

    Returns (Phi, Psi) with Phi(f)(m)(l) = f(m ⊗ l) in Hom(M, Hom(L, N)) and
    Psi(f)(l)(m) = (-1)^(|m| |l|) f(m ⊗ l) in Hom(L, Hom(M, N)).
    """
    n = f.target
    d = f.degree
    ring = m.ring
    hom_ln, hom_mn = hom_complex(l, n), hom_complex(m, n)
    phi, psi = {}, {}
    for p in m.degrees():
        mat = _zeros(hom_ln.rank(p + d), m.rank(p))
        for q, off, size in hom_ln.layout.get(p + d, ()):
            cols = _block_columns(f, p, q)
            if cols is None or not size:
                continue
            nl = l.rank(q)
            blocks = cols.reshape(n.rank(p + q + d), m.rank(p), nl).transpose(1, 0, 2)
            mat[off:off + size] = matrix_to_hom(blocks, l.exps(q), n.exps(p + q + d), ring).T
        phi[p] = mat
    for q in l.degrees():
        mat = _zeros(hom_mn.rank(q + d), l.rank(q))
        for p, off, size in hom_mn.layout.get(q + d, ()):
            cols = _block_columns(f, p, q)
            if cols is None or not size:
                continue
            sign = -1 if (p * q) % 2 else 1
            nm = m.rank(p)
            blocks = cols.reshape(n.rank(p + q + d), nm, l.rank(q)).transpose(2, 0, 1)
            mat[off:off + size] = sign * matrix_to_hom(blocks, m.exps(p), n.exps(p + q + d), ring).T
        psi[q] = mat
    return GradedMap(m, hom_ln, phi, d), GradedMap(l, hom_mn, psi, d)


def uncurry(g: GradedMap, m: Complex, l: Complex, n: Complex, tensor: Complex = None) -> GradedMap:
    """Inverse of the first adjoint: g: M -> Hom(L, N) back to M ⊗ L -> N."""
    tensor = tensor or tensor_complex(m, l)
    d = g.degree
    ring = m.ring
    comps = {}
    for k in tensor.degrees():
        mat = _zeros(n.rank(k + d), tensor.rank(k))
        for (p, q), off, size in tensor.layout.get(k, ()):
            blk = g.target.block(p + d, q)
            if not size or blk is None:
                continue
            hoff, hsize = blk
            coords = g.comp(p)[hoff:hoff + hsize].T
            maps = hom_to_matrix(coords, l.exps(q), n.exps(k + d), ring)
            mat[:, off:off + size] = maps.transpose(1, 0, 2).reshape(n.rank(k + d), size)
        comps[k] = mat
    return GradedMap(tensor, n, comps, d)


def as_chain_map(g: GradedMap) -> ChainMap:
    if g.degree:
        raise ValidationError("a chain map must have degree 0, got %d" % g.degree)
    return ChainMap(g.source, g.target, {i: g.comp(i) for i in g.degrees()})


# cup products on shifted cones

@dataclass
class ConeCups:
    cup0: ChainMap
    cup1: ChainMap
    homotopy: Homotopy
    cones: Tuple[ShiftedCone, ShiftedCone, ShiftedCone]
    tensor: Complex


def check_pairing_square(cup_a: ChainMap, cup_b: ChainMap, f1: ChainMap, f2: ChainMap, f3: ChainMap):
    left = compose(f3, cup_a)
    right = compose(cup_b, tensor_chain_map(f1, f2, cup_a.source, cup_b.source))
    for i in left.degrees():
        bad = (left.comp(i) - right.comp(i)) % f3.target.term(i).orders[:, None]
        if bad.any():
            j, k = (int(v) for v in np.argwhere(bad)[0])
            raise IncompatiblePairings("f3 ∪_A != ∪_B (f1 ⊗ f2) in degree %d at entry (%d, %d)" % (i, j, k))


def cone_cup(cup_a: ChainMap, cup_b: ChainMap, f1: ChainMap, f2: ChainMap, f3: ChainMap) -> ConeCups:
    """Cup products on E_j = Cone(f_j)[-1] and the homotopy between them.

    cup0((a1, b1) ⊗ (a2, b2)) = (a1 ∪ a2, (-1)^|a1| f1(a1) ∪ b2)
    cup1((a1, b1) ⊗ (a2, b2)) = (a1 ∪ a2, b1 ∪ f2(a2))
    s((a1, b1) ⊗ (a2, b2))    = (0, (-1)^|a1| b1 ∪ b2)
    with cup0 - cup1 = d s + s d.  The returned homotopy runs from cup1 to cup0
    (``homotopy.source_map is cup1``), so callers wanting cup1 - cup0 negate s.
    """
    check_pairing_square(cup_a, cup_b, f1, f2, f3)
    e1, e2, e3 = cone_shifted(f1), cone_shifted(f2), cone_shifted(f3)
    ten = tensor_complex(e1.complex, e2.complex)
    x1, x2, x3 = e1.complex, e2.complex, e3.complex

    def proj(x, i, key):
        blk = x.block(i, key)
        out = _zeros(blk[1], x.rank(i))
        out[:, blk[0]:blk[0] + blk[1]] = np.eye(blk[1], dtype=INT)
        return out

    def cup_block(cup, p, q):
        src = cup.source
        blk = src.block(p + q, (p, q))
        if blk is None or not blk[1]:
            return None
        return cup.comp(p + q)[:, blk[0]:blk[0] + blk[1]]

    c0, c1, s = {}, {}, {}
    for n in ten.degrees():
        c0[n] = _zeros(x3.rank(n), ten.rank(n))
        c1[n] = _zeros(x3.rank(n), ten.rank(n))
        s[n] = _zeros(x3.rank(n - 1), ten.rank(n))
        a3, b3 = x3.block(n, "A"), x3.block(n, "B")
        a3m, b3m = x3.block(n - 1, "A"), x3.block(n - 1, "B")
        for (p, q), off, size in ten.layout.get(n, ()):
            if not size:
                continue
            sign = -1 if p % 2 else 1
            pa1, pb1 = proj(x1, p, "A"), proj(x1, p, "B")
            pa2, pb2 = proj(x2, q, "A"), proj(x2, q, "B")
            cols = (off, size)
            blk = cup_block(cup_a, p, q)
            if blk is not None and a3:
                both = blk @ np.kron(pa1, pa2)
                _place(c0[n], a3, cols, both)
                _place(c1[n], a3, cols, both)
            blk = cup_block(cup_b, p, q - 1)
            if blk is not None and b3:
                _place(c0[n], b3, cols, sign * blk @ np.kron(f1.comp(p) @ pa1, pb2))
            blk = cup_block(cup_b, p - 1, q)
            if blk is not None and b3:
                _place(c1[n], b3, cols, blk @ np.kron(pb1, f2.comp(q) @ pa2))
            blk = cup_block(cup_b, p - 1, q - 1)
            if blk is not None and b3m:
                _place(s[n], b3m, cols, sign * blk @ np.kron(pb1, pb2))
    cup0 = ChainMap(ten, x3, c0)
    cup1 = ChainMap(ten, x3, c1)
    return ConeCups(cup0, cup1, Homotopy(cup1, cup0, s), (e1, e2, e3), ten)


# exact sequences

@dataclass
class QuasiIsoReport:
    ok: bool
    maps: Dict[int, np.ndarray] = field(default_factory=dict)
    bijective: Dict[int, bool] = field(default_factory=dict)


def is_iso_matrix(mat, source: Subquotient, target: Subquotient) -> bool:
    if source.order != target.order:
        return False
    if not len(source.exps):
        return True
    return image_order(mat, source.exps, target.exps, source.ring) == target.order


def is_quasi_iso(f: ChainMap, degrees=None) -> QuasiIsoReport:
    degrees = f.degrees() if degrees is None else degrees
    report = QuasiIsoReport(True)
    for i in degrees:
        mat = f.induced(i)
        ok = is_iso_matrix(mat, f.source.cohomology(i), f.target.cohomology(i))
        report.maps[i] = mat
        report.bijective[i] = ok
        report.ok = report.ok and ok
    return report


class ShortExactSequence:
    """0 -> A -i-> B -p-> C -> 0, checked degreewise."""

    def __init__(self, i: ChainMap, p: ChainMap, check: bool = True):
        self.i, self.p = i, p
        self.a, self.b, self.c = i.source, i.target, p.target
        if check:
            self.check()

    def check(self):
        ring = self.b.ring
        for n in range(min(self.a.lo, self.b.lo, self.c.lo), max(self.a.hi, self.b.hi, self.c.hi) + 1):
            a, b, c = self.a.exps(n), self.b.exps(n), self.c.exps(n)
            pi = self.p.comp(n) @ self.i.comp(n) % self.c.term(n).orders[:, None]
            if pi.any():
                raise NotExact("p i != 0 in degree %d" % n)
            im_i = image_order(self.i.comp(n), a, b, ring)
            if im_i != ring.p ** sum(a):
                raise NotExact("i is not injective in degree %d" % n)
            im_p = image_order(self.p.comp(n), b, c, ring)
            if im_p != ring.p ** sum(c):
                raise NotExact("p is not surjective in degree %d" % n)
            if ring.p ** sum(b) // im_p != im_i:
                raise NotExact("image of i differs from kernel of p in degree %d" % n)

    def connecting(self, n: int) -> np.ndarray:
        """Matrix of the snake map H^n(C) -> H^{n+1}(A)."""
        ring = self.b.ring
        hc, ha = self.c.cohomology(n), self.a.cohomology(n + 1)
        cols = []
        for z in hc.lift(np.eye(len(hc.exps), dtype=INT)).reshape(len(hc.exps), self.c.rank(n)):
            b = solve(self.p.comp(n), z, self.b.exps(n), self.c.exps(n), ring)
            if b is None:
                raise NotExact("cocycle of C in degree %d has no preimage in B" % n)
            db = self.b.diff(n) @ b % self.b.term(n + 1).orders
            a = solve(self.i.comp(n + 1), db, self.a.exps(n + 1), self.b.exps(n + 1), ring)
            if a is None:
                raise NotExact("d of a lift does not come from A in degree %d" % (n + 1))
            cols.append(ha.coords(a))
        return np.array(cols, dtype=INT).reshape(len(hc.exps), len(ha.exps)).T.copy()


def check_exact_at(f_in, f_out, middle: Subquotient, left: Subquotient, right: Subquotient, where: str):
    """Exactness of left -f_in-> middle -f_out-> right in quotient coordinates."""
    ring = middle.ring
    comp = np.asarray(f_out, dtype=INT) @ np.asarray(f_in, dtype=INT)
    if len(right.exps) and len(left.exps) and (comp % ring.orders(right.exps)[:, None]).any():
        raise NotExact("composite of consecutive maps is non-zero at %s" % where)
    im_in = image_order(f_in, left.exps, middle.exps, ring) if len(middle.exps) else 1
    im_out = image_order(f_out, middle.exps, right.exps, ring) if len(right.exps) else 1
    if im_in * im_out != middle.order:
        raise NotExact("image of the incoming map has order %d but the kernel has order %d at %s"
                       % (im_in, middle.order // im_out, where))


@dataclass
class LongExactSequence:
    """Terms H^n(A), H^n(B), H^n(C) for lo <= n <= hi with their maps."""
    lo: int
    hi: int
    labels: Tuple[str, str, str]
    groups: Dict[Tuple[str, int], "FinAb"]
    maps: Dict[Tuple[str, int], np.ndarray]

    def rows(self):
        out = []
        for n in range(self.lo, self.hi + 1):
            for label in self.labels:
                out.append(("%s^%d" % (label, n), self.groups[label, n]))
        return out


def long_exact_sequence(ses: ShortExactSequence, lo: int, hi: int,
                        labels=("A", "B", "C")) -> LongExactSequence:
    """The cohomology sequence of ses in degrees lo..hi, verified exact at every inner term."""
    la, lb, lc = labels
    h = {}
    for n in range(lo, hi + 1):
        h[la, n] = ses.a.cohomology(n)
        h[lb, n] = ses.b.cohomology(n)
        h[lc, n] = ses.c.cohomology(n)
    maps = {}
    for n in range(lo, hi + 1):
        maps["i", n] = ses.i.induced(n)
        maps["p", n] = ses.p.induced(n)
        if n < hi:
            maps["delta", n] = ses.connecting(n)
    for n in range(lo, hi + 1):
        check_exact_at(maps["i", n], maps["p", n], h[lb, n], h[la, n], h[lc, n], "%s^%d" % (lb, n))
        if n < hi:
            check_exact_at(maps["p", n], maps["delta", n], h[lc, n], h[lb, n], h[la, n + 1], "%s^%d" % (lc, n))
            check_exact_at(maps["delta", n], maps["i", n + 1], h[la, n + 1], h[lc, n], h[lb, n + 1],
                           "%s^%d" % (la, n + 1))
    logger.info("long exact sequence verified in degrees %d..%d", lo, hi)
    return LongExactSequence(lo, hi, labels, {k: v.invariants for k, v in h.items()}, maps)


# triangles

class ExactTriangle:
    """X -> Y -> Z -> X[1] known through its cohomology sequence.

    Each vertex is a complex read with a degree offset: vertex^i = H^{i+k}.
    ``maps(i)`` returns the matrices H^i(X) -> H^i(Y), H^i(Y) -> H^i(Z) and
    H^i(Z) -> H^{i+1}(X).
    """

    def __init__(self, vertices, u: Callable, v: Callable, w: Callable, label: str = ""):
        self.vertices = vertices
        self._u, self._v, self._w = u, v, w
        self.label = label

    def h(self, k: int, i: int) -> Subquotient:
        cx, off = self.vertices[k]
        return cx.cohomology(i + off)

    def maps(self, i: int):
        return self._u(i), self._v(i), self._w(i)

    @classmethod
    def from_ses(cls, ses: ShortExactSequence, orientation: str = "sub_first", label: str = ""):
        if orientation == "sub_first":
            return cls([(ses.a, 0), (ses.b, 0), (ses.c, 0)], ses.i.induced, ses.p.induced,
                       ses.connecting, label)
        if orientation == "rotated":
            return cls([(ses.b, 0), (ses.c, 0), (ses.a, 1)], ses.p.induced, ses.connecting,
                       lambda i: -ses.i.induced(i + 1), label)
        raise ValidationError("unknown triangle orientation %r" % orientation)

    @classmethod
    def from_cone(cls, f: ChainMap, label: str = ""):
        c = cone(f)
        x = f.source

        def w(i):
            return induced_matrix(c.projection.comp(i), c.complex.cohomology(i), x.cohomology(i + 1))
        return cls([(x, 0), (f.target, 0), (c.complex, 0)], f.induced, c.inclusion.induced, w, label)

    def check_exact(self, lo: int, hi: int):
        for i in range(lo, hi + 1):
            u, v, w = self.maps(i)
            hx, hy, hz = self.h(0, i), self.h(1, i), self.h(2, i)
            check_exact_at(u, v, hy, hx, hz, "%s vertex Y^%d" % (self.label, i))
            if i < hi:
                u1 = self.maps(i + 1)[0]
                check_exact_at(v, w, hz, hy, self.h(0, i + 1), "%s vertex Z^%d" % (self.label, i))
                check_exact_at(w, u1, self.h(0, i + 1), hz, self.h(1, i + 1), "%s vertex X^%d" % (self.label, i + 1))


@dataclass
class TriangleReport:
    rows: Dict[str, bool]
    degreewise: Dict[str, Dict[int, bool]]
    proved: Dict[str, List[int]]
    window: Tuple[int, int]


class TrianglePair:
    """Vertical chain maps a: X -> X', b: Y -> Y', c: Z -> Z' between two triangles."""

    ROWS = ("X", "Y", "Z")

    def __init__(self, top: ExactTriangle, bottom: ExactTriangle, verticals: Tuple[ChainMap, ChainMap, ChainMap],
                 window: Tuple[int, int]):
        self.top, self.bottom = top, bottom
        self.verticals = verticals
        self.window = window

    def vertical(self, k: int, i: int) -> np.ndarray:
        f = self.verticals[k]
        _, off = self.top.vertices[k]
        return induced_matrix(f.comp(i + off), self.top.h(k, i), self.bottom.h(k, i))

    def iso_flags(self) -> Dict[str, Dict[int, bool]]:
        lo, hi = self.window
        return {name: {i: is_iso_matrix(self.vertical(k, i), self.top.h(k, i), self.bottom.h(k, i))
                       for i in range(lo, hi + 1)}
                for k, name in enumerate(self.ROWS)}

    def check_squares(self):
        """Every square commutes on cohomology up to sign."""
        lo, hi = self.window
        for i in range(lo, hi + 1):
            top, bot = self.top.maps(i), self.bottom.maps(i)
            for k in range(3):
                if k == 2 and i == hi:
                    continue
                nxt = (k + 1) % 3
                j = i + 1 if k == 2 else i
                left = self.vertical(nxt, j) @ top[k]
                right = bot[k] @ self.vertical(k, i)
                tgt = self.bottom.h(nxt, j)
                if not len(tgt.exps):
                    continue
                orders = tgt.ring.orders(tgt.exps)[:, None]
                if ((left - right) % orders).any() and ((left + right) % orders).any():
                    raise MalformedTriangle("square %d does not commute on H^%d" % (k + 1, i))

    def two_out_of_three(self) -> TriangleReport:
        self.check_squares()
        flags = self.iso_flags()
        lo, hi = self.window
        x, y, z = flags["X"], flags["Y"], flags["Z"]

        def known(row, i):
            return row.get(i)

        premises = {
            "Z": lambda i: [known(x, i), known(y, i), known(x, i + 1), known(y, i + 1)],
            "X": lambda i: [known(y, i - 1), known(z, i - 1), known(y, i), known(z, i)],
            "Y": lambda i: [known(z, i - 1), known(x, i), known(z, i), known(x, i + 1)],
        }
        proved = {name: [] for name in self.ROWS}
        for name in self.ROWS:
            for i in range(lo, hi + 1):
                if all(premises[name](i)):
                    proved[name].append(i)
                    if not flags[name][i]:
                        raise MalformedTriangle(
                            "row %s: the other rows are isomorphisms around degree %d but H^%d is not"
                            % (name, i, i))
        rows = {name: all(flags[name].values()) for name in self.ROWS}
        logger.info("triangle rows quasi-iso: %s", rows)
        return TriangleReport(rows, flags, proved, self.window)


def two_out_of_three(tp: TrianglePair) -> TriangleReport:
    return tp.two_out_of_three()
