"""Tate cohomology from the complete bar resolution, and the period-2 model of cyclic groups.

Degree k >= 0 holds functions G^k -> M as in :mod:`iwacoh.cochains`; degree
-1-n holds functions G^n -> M, read through the dual bar symbols.  The
differential from degree -1 to 0 is the norm.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from .cochains import Coefficients, as_complex, cochain_differential, tuple_index, tuples
from .complexes import ChainMap, Complex, is_iso_matrix, total_complex
from .config import DEFAULT_CONFIG
from .errors import CapExceeded, ValidationError
from .groups import FiniteGroup, trivial
from .linalg import INT, FinAb, induced_matrix, kernel_order
from .modules import GModule, dual_module, evaluation_pairing, unit_module

logger = logging.getLogger(__name__)


def norm_matrix(m: GModule) -> np.ndarray:
    return m.action.sum(axis=0) % m.orders[:, None]


def functions_count(g: FiniteGroup, degree: int) -> int:
    """Number of group tuples indexing the Tate term of the given degree."""
    return g.order ** (degree if degree >= 0 else -1 - degree)


def negative_differential(g: FiniteGroup, m: GModule, n: int) -> np.ndarray:
    """d: functions on G^{n+1} (degree -2-n) -> functions on G^n (degree -1-n).

    (d c)(s) = sum_x x^-1 c(x, s) + sum_i (-1)^i sum_{merge_i(x) = s} c(x) + (-1)^{n+1} sum_x c(s, x)
    """
    order, r = g.order, m.rank
    x = tuples(order, n + 1)
    cols = np.arange(len(x))
    d = np.zeros((order ** n, len(x), r, r), dtype=INT)
    np.add.at(d, (tuple_index(x[:, 1:], order), cols), m.action[g.inverse[x[:, 0]]])
    eye = np.eye(r, dtype=INT)
    for i in range(1, n + 1):
        merged = np.column_stack([x[:, :i - 1], g.table[x[:, i - 1], x[:, i]], x[:, i + 1:]])
        np.add.at(d, (tuple_index(merged, order), cols), (-1) ** i * eye)
    np.add.at(d, (tuple_index(x[:, :n], order), cols), (-1) ** (n + 1) * eye)
    mat = d.transpose(0, 2, 1, 3).reshape(order ** n * r, len(x) * r)
    return mat % np.tile(m.orders, order ** n)[:, None]


def tate_differential(g: FiniteGroup, m: GModule, k: int) -> np.ndarray:
    """Differential of the complete cochain complex from degree k to k + 1."""
    if k >= 0:
        return cochain_differential(g, m, k)
    if k == -1:
        return norm_matrix(m)
    return negative_differential(g, m, -2 - k)


def _check_range(lo: int, hi: int, cfg):
    if hi > cfg.degree_cap + 1:
        raise CapExceeded("Tate degree %d exceeds the cap %d" % (hi - 1, cfg.degree_cap))
    if lo < -cfg.tate_depth - 1:
        raise CapExceeded("Tate degree %d is below the depth %d" % (lo + 1, -cfg.tate_depth))


def _module_tate(g: FiniteGroup, m: GModule, lo: int, hi: int) -> Complex:
    plain = lambda k: GModule(m.ring, m.exps * functions_count(g, k), trivial(), check=False)
    terms = {k: plain(k) for k in range(lo, hi + 1)}
    diffs = {k: tate_differential(g, m, k) for k in range(lo, hi)}
    return Complex(m.ring, lo, hi, terms, diffs, group=trivial(), check=False)


class TateComplex(Complex):
    """The complete cochain complex of G with coefficients in a module or bounded complex.

    Cohomology is exact in degrees lo..hi; the stored terms run from lo - 1 to hi + 1.
    """

    def __init__(self, group: FiniteGroup, coefficients: Coefficients, lo: int, hi: int, cfg=None):
        cfg = cfg or DEFAULT_CONFIG
        x = as_complex(coefficients)
        if x.group != group:
            raise ValidationError("coefficients are modules for %s, not %s" % (x.group.label, group.label))
        self.tate_group = self.cochain_group = group
        self.coefficients = x
        self.range = (lo, hi)
        ring = x.ring
        columns, horizontals = {}, {}
        for i in x.degrees():
            _check_range(lo - 1 - i, hi + 1 - i, cfg)
            columns[i] = _module_tate(group, x.term(i), lo - 1 - i, hi + 1 - i)
        for i in x.degrees():
            if i + 1 in columns:
                comps = {j: np.kron(np.eye(functions_count(group, j), dtype=INT), x.diff(i))
                         for j in range(lo - 1 - i - 1, hi + 2 - i)}
                horizontals[i] = ChainMap(columns[i], columns[i + 1], comps, check=False)
        tot = total_complex(columns, horizontals, ring, trivial())
        Complex.__init__(self, ring, tot.lo, tot.hi, {n: tot.term(n) for n in tot.degrees()},
                         {n: tot.diff(n) for n in tot.degrees()}, group=trivial(),
                         layout=tot.layout, check=False)
        logger.debug("Tate complex of %s in degrees %d..%d: ranks %s", group.label, lo, hi,
                     [self.rank(n) for n in self.degrees()])


def tate_complex(g: FiniteGroup, m: Coefficients, lo: int, hi: int, cfg=None) -> TateComplex:
    return TateComplex(g, m, lo, hi, cfg)


def tate_cohomology(g: FiniteGroup, m: Coefficients, i: int, cfg=None) -> FinAb:
    cfg = cfg or DEFAULT_CONFIG
    if i > cfg.degree_cap or i < -cfg.tate_depth:
        raise CapExceeded("Tate degree %d lies outside %d..%d" % (i, -cfg.tate_depth, cfg.degree_cap))
    h = TateComplex(g, m, i, i, cfg).cohomology(i).invariants
    logger.info("Tate H^%d(%s, -) = %s", i, g.label, h)
    return h


def tate_table(g: FiniteGroup, m: Coefficients, lo: int, hi: int, cfg=None) -> Dict[int, FinAb]:
    """Tate cohomology in every degree of lo..hi from one complex."""
    cfg = cfg or DEFAULT_CONFIG
    if hi > cfg.degree_cap or lo < -cfg.tate_depth:
        raise CapExceeded("Tate degrees %d..%d lie outside %d..%d" % (lo, hi, -cfg.tate_depth, cfg.degree_cap))
    cx = TateComplex(g, m, lo, hi, cfg)
    return {i: cx.cohomology(i).invariants for i in range(lo, hi + 1)}


# cyclic groups

def _generator(g: FiniteGroup) -> int:
    gen = g.generator()
    if gen is None:
        raise ValidationError("%s is not cyclic" % g.label)
    return gen


def periodic_complex(g: FiniteGroup, m: GModule, lo: int, hi: int) -> Complex:
    """Every term is M; d = t - 1 out of even degrees and the norm out of odd ones, t the generator."""
    t = _generator(g)
    minus = (m.action[t] - np.eye(m.rank, dtype=INT)) % m.orders[:, None]
    norm = norm_matrix(m)
    plain = GModule(m.ring, m.exps, trivial(), check=False)
    terms = {k: plain for k in range(lo - 1, hi + 2)}
    diffs = {k: minus if k % 2 == 0 else norm for k in range(lo - 1, hi + 1)}
    return Complex(m.ring, lo - 1, hi + 1, terms, diffs, group=trivial())


def periodic_cohomology(g: FiniteGroup, m: GModule, i: int) -> FinAb:
    return periodic_complex(g, m, i, i).cohomology(i).invariants


def _powers(g: FiniteGroup, t: int) -> np.ndarray:
    out = np.zeros(g.order, dtype=INT)
    for k in range(1, g.order):
        out[k] = g.table[out[k - 1], t]
    return out


def periodic_to_bar(g: FiniteGroup, m: GModule, degree: int) -> np.ndarray:
    """Comparison map from the periodic model to bar cochains in degree 0, 1 or 2.

    Degree 0 is the identity of M, landing in the degree 0 term shared with the
    complete complex (so it compares Tate H^0, not M^G).  Degree 1 sends a to
    c(t^k) = sum_{j<k} t^j a; degree 2 sends a to the carry cocycle
    c(t^i, t^j) = a if i + j >= |G| and 0 otherwise.
    """
    t = _generator(g)
    n, r = g.order, m.rank
    powers = _powers(g, t)
    if degree == 0:
        return np.eye(r, dtype=INT)
    if degree == 1:
        out = np.zeros((n, r, r), dtype=INT)
        acc = np.zeros((r, r), dtype=INT)
        step = np.eye(r, dtype=INT)
        for k in range(n):
            out[powers[k]] = acc
            acc = (acc + step) % m.ring.modulus
            step = step @ m.action[t] % m.ring.modulus
        return out.reshape(n * r, r) % np.tile(m.orders, n)[:, None]
    if degree == 2:
        out = np.zeros((n, n, r, r), dtype=INT)
        i, j = np.nonzero(np.add.outer(np.arange(n), np.arange(n)) >= n)
        out[powers[i], powers[j]] = np.eye(r, dtype=INT)
        return out.reshape(n * n * r, r)
    raise ValidationError("comparison maps exist in degrees 0, 1 and 2, not %d" % degree)


@dataclass
class ComparisonReport:
    degrees: Dict[int, bool]

    @property
    def ok(self) -> bool:
        return all(self.degrees.values())


def check_periodic_to_bar(g: FiniteGroup, m: GModule, cfg=None) -> ComparisonReport:
    """The comparison maps commute with the differentials and induce isomorphisms on H^0..H^2.

    Degree 0 of the periodic model is Tate H^0 = M^G / N M, so it is compared with the
    complete complex; degrees 1 and 2 are compared with bar cochains.
    """
    from .cochains import CochainComplex
    per = periodic_complex(g, m, 0, 2)
    bar = CochainComplex(g, m, 3, cfg)
    complete = TateComplex(g, m, 0, 0, cfg)
    if ((complete.diff(-1) - per.diff(-1)) % m.orders[:, None]).any():
        raise ValidationError("comparison map does not commute with the norm")
    maps = {k: periodic_to_bar(g, m, k) for k in range(3)}
    for k in range(2):
        lhs = bar.diff(k) @ maps[k]
        rhs = maps[k + 1] @ per.diff(k)
        if ((lhs - rhs) % bar.term(k + 1).orders[:, None]).any():
            raise ValidationError("comparison map does not commute with the differential in degree %d" % k)
    out = {}
    for k in range(3):
        src = per.cohomology(k)
        tgt = complete.cohomology(0) if k == 0 else bar.cohomology(k)
        out[k] = bool(is_iso_matrix(induced_matrix(maps[k], src, tgt), src, tgt))
    logger.info("periodic comparison for %s: %s", g.label, out)
    return ComparisonReport(out)


# duality

@dataclass
class DualityReport:
    n: int
    left: FinAb
    right: FinAb
    orders_equal: bool
    pairing_perfect: Optional[bool] = None

    @property
    def ok(self) -> bool:
        return self.orders_equal and self.pairing_perfect is not False


def periodic_pairing(g: FiniteGroup, m: GModule, n: int) -> np.ndarray:
    """Matrix of a -> <a, -> from Tate H^n(M) to Hom(H^{-n-1}(M^∨), H^{-1}(R)).

    Classes are taken in the periodic model and paired value by value; row
    block t holds the values against the t-th generator on the right.
    """
    dual = dual_module(m)
    unit = unit_module(m.ring, g)
    left = periodic_complex(g, m, n, n).cohomology(n)
    right = periodic_complex(g, dual, -n - 1, -n - 1).cohomology(-n - 1)
    target = periodic_complex(g, unit, -1, -1).cohomology(-1)
    ev = evaluation_pairing(m).matrix
    a_reps = left.lift(np.eye(len(left), dtype=INT)).reshape(len(left), m.rank)
    b_reps = right.lift(np.eye(len(right), dtype=INT)).reshape(len(right), dual.rank)
    blocks = []
    for b in b_reps:
        values = np.array([ev @ np.kron(b, a) for a in a_reps], dtype=INT).reshape(len(a_reps), 1)
        blocks.append(target.coords(values % m.ring.modulus).reshape(len(a_reps), len(target)).T)
    if not blocks:
        return np.zeros((0, len(left)), dtype=INT)
    return np.vstack(blocks)


def finite_duality_check(g: FiniteGroup, m: GModule, n: int, cfg=None) -> DualityReport:
    """Compare Tate H^n(G, M) with Tate H^{-n-1}(G, M^∨); for cyclic G also test the cup pairing."""
    cfg = cfg or DEFAULT_CONFIG
    if abs(n) + 1 > cfg.degree_cap:
        raise CapExceeded("duality in degree %d needs |n| + 1 <= %d" % (n, cfg.degree_cap))
    left = tate_cohomology(g, m, n, cfg)
    right = tate_cohomology(g, dual_module(m), -n - 1, cfg)
    report = DualityReport(n, left, right, left.order == right.order)
    if g.is_cyclic():
        pairing = periodic_pairing(g, m, n)
        target = periodic_complex(g, unit_module(m.ring, g), -1, -1).cohomology(-1)
        left_sq = periodic_complex(g, m, n, n).cohomology(n)
        right_sq = periodic_complex(g, dual_module(m), -n - 1, -n - 1).cohomology(-n - 1)
        tgt_exps = target.exps * len(right_sq)
        left_kernel = kernel_order(pairing, left_sq.exps, tgt_exps, m.ring) if len(left_sq) else 1
        transposed = _transpose_pairing(pairing, len(left_sq), len(right_sq), len(target))
        right_kernel = kernel_order(transposed, right_sq.exps, target.exps * len(left_sq), m.ring) \
            if len(right_sq) else 1
        report.pairing_perfect = report.orders_equal and left_kernel == 1 and right_kernel == 1
    logger.info("duality in degree %d for %s: %s vs %s, perfect=%s", n, g.label, left, right,
                report.pairing_perfect)
    return report


def _transpose_pairing(pairing: np.ndarray, n_left: int, n_right: int, n_target: int) -> np.ndarray:
    """Reorder the pairing so that it reads b -> <-, b>."""
    cube = pairing.reshape(n_right, n_target, n_left)
    return cube.transpose(2, 1, 0).reshape(n_left * n_target, n_right)
