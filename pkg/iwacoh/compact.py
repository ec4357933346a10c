"""Cohomology with compact support relative to a finite set of local places.

A local datum is a group G with places (H_v, phi_v: H_v -> G).  The compact
complex is the shifted cone of the restriction

    res_S: C(G, X) -> ⊕_v C(H_v, phi_v^* X),

E^i = C^i(G, X) ⊕ (⊕_v C^{i-1}(H_v, X)) with d(a, b) = (da, -res(a) - db),
so that L[-1] -> C_c -> C -> L is a triangle.  Places flagged ``tate`` use
the complete cochain complex of H_v instead.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cochains import (Coefficients, CochainComplex, MatrixFamily, as_complex, compatible_pair_map,
                       conjugation_homotopy, corestriction, induce_coefficients, restrict_coefficients, total_cup)
from .complexes import (ChainMap, Complex, ConeCups, ExactTriangle, GradedMap, Homotopy, LongExactSequence,
                        QuasiIsoReport, ShiftedCone, ShortExactSequence, TrianglePair, TriangleReport,
                        adjunction, compose, concentrated, cone_cup, cone_shifted, direct_sum_complex,
                        hom_chain_map, identity, is_quasi_iso, long_exact_sequence, map_of_shifted_cones,
                        shift_map, tensor_complex, translation_isos, truncation, _place, _zeros)
from .config import DEFAULT_CONFIG
from .errors import MalformedDatum, NotAHomotopy, TraceNotQuasiIso, ValidationError
from .groups import FiniteGroup, trivial
from .linalg import INT, FinAb, induced_matrix, solve
from .modules import (GModule, ModuleMap, dual_module, evaluation_pairing, hom_exps, hom_to_matrix,
                      identity_coset_projection, unit_module)
from .tate import TateComplex

logger = logging.getLogger(__name__)


@dataclass
class Place:
    group: FiniteGroup
    images: np.ndarray
    tate: bool = False
    label: Optional[str] = None


class LocalDatum:
    """A group with its local places; every phi_v is checked to be a homomorphism."""

    def __init__(self, group: FiniteGroup, places: Sequence[Place] = ()):
        self.group = group
        self.places = []
        for k, place in enumerate(places):
            images = group.check_homomorphism(place.group, place.images)
            self.places.append(Place(place.group, images, place.tate, place.label or "v%d" % k))

    @property
    def has_tate(self) -> bool:
        return any(p.tate for p in self.places)

    def __repr__(self):
        return "LocalDatum(%s, places=%s)" % (self.group.label, [p.label for p in self.places])


def _no_tate(d: LocalDatum, what: str):
    if d.has_tate:
        raise MalformedDatum("%s is not available for data with Tate places" % what)


def _zero_complex(ring) -> Complex:
    return Complex(ring, 0, -1, {}, {}, group=trivial())


def _stack_map(source: Complex, target: Complex, parts: Dict[int, GradedMap], degree: int = 0):
    """A map into a direct sum from maps into its summands, keyed by summand."""
    comps = {}
    for n in source.degrees():
        mat = _zeros(target.rank(n + degree), source.rank(n))
        for k, f in parts.items():
            blk = target.block(n + degree, k)
            if blk:
                _place(mat, blk, (0, source.rank(n)), f.comp(n))
        comps[n] = mat
    if degree:
        return GradedMap(source, target, comps, degree)
    return ChainMap(source, target, comps)


def _block_map(source: Complex, target: Complex, entries: List[Tuple[int, int, GradedMap]]) -> ChainMap:
    """A degree-0 map between direct sums given by (source summand, target summand, map) entries."""
    comps = {}
    for n in source.degrees():
        mat = _zeros(target.rank(n), source.rank(n))
        for k, l, f in entries:
            src, tgt = source.block(n, k), target.block(n, l)
            if src and tgt:
                _place(mat, tgt, src, f.comp(n))
        comps[n] = mat
    return ChainMap(source, target, comps)


# the compact complex

@dataclass
class CompactComplex:
    datum: LocalDatum
    coefficients: Complex
    top: int
    global_complex: CochainComplex
    local_complexes: List[Complex]
    local_sum: Complex
    res: ChainMap
    cone: ShiftedCone

    @property
    def complex(self) -> Complex:
        return self.cone.complex

    @property
    def reliable_top(self) -> int:
        return self.coefficients.lo + self.top - 1

    def cohomology(self, i: int) -> FinAb:
        return self.complex.cohomology(i).invariants

    def truncated(self) -> Complex:
        """sigma_{<= lo + top}: the range where maps built from conjugation homotopies are chain maps."""
        return truncation(self.complex, "sigma_le", self.coefficients.lo + self.top)[0]


def local_complex(place: Place, x: Complex, top: int, cfg=None) -> Complex:
    coeff = restrict_coefficients(x, place.group, place.images)
    if place.tate:
        return TateComplex(place.group, coeff, x.lo - 1, x.lo + top - 1, cfg)
    return CochainComplex(place.group, coeff, top, cfg)


def compact_complex(d: LocalDatum, m: Coefficients, top: int = None, cfg=None) -> CompactComplex:
    cfg = cfg or DEFAULT_CONFIG
    top = cfg.degree_cap if top is None else top
    x = as_complex(m)
    if x.group != d.group:
        raise ValidationError("coefficients are modules for %s, not %s" % (x.group.label, d.group.label))
    glob = CochainComplex(d.group, x, top, cfg)
    locs = [local_complex(place, x, top, cfg) for place in d.places]
    if locs:
        local_sum = direct_sum_complex(*locs)
        parts = {k: compatible_pair_map(glob, loc, place.images, identity(glob.coefficients))
                 for k, (place, loc) in enumerate(zip(d.places, locs))}
        res = _stack_map(glob, local_sum, parts)
    else:
        local_sum = _zero_complex(x.ring)
        res = ChainMap(glob, local_sum, {}, check=False)
    cc = CompactComplex(d, x, top, glob, locs, local_sum, res, cone_shifted(res))
    logger.debug("compact complex of %s over %d places: ranks %s", d.group.label, len(locs),
                 [cc.complex.rank(n) for n in cc.complex.degrees()])
    return cc


def compact_cohomology(d: LocalDatum, m: Coefficients, i: int, cfg=None) -> FinAb:
    cfg = cfg or DEFAULT_CONFIG
    x = as_complex(m)
    cc = compact_complex(d, x, max(i - x.lo + 1, 1), cfg)
    h = cc.cohomology(i)
    logger.info("H^%d_c(%s, -) = %s", i, d.group.label, h)
    return h


def compact_les(d: LocalDatum, m: Coefficients, top: int = None, cfg=None) -> LongExactSequence:
    """... -> H^{i-1}(loc) -> H^i_c -> H^i(G) -> H^i(loc) -> ..., verified exact.

    The local terms appear shifted: the first label of degree i is H^{i-1} of the local sum.
    """
    cc = compact_complex(d, m, top, cfg)
    ses = ShortExactSequence(cc.cone.inclusion, cc.cone.projection)
    return long_exact_sequence(ses, cc.coefficients.lo, cc.reliable_top, labels=("loc[-1]", "c", "glob"))


# cup products

@dataclass
class CompactCups:
    """cup_c: C(N) ⊗ C_c(M) -> C_c(A) and c_cup: C_c(N) ⊗ C(M) -> C_c(A)."""
    cups: ConeCups
    cup_global: ChainMap
    cup_local: ChainMap
    cup_c: ChainMap
    c_cup: ChainMap
    compact: Tuple[CompactComplex, CompactComplex, CompactComplex]

    @property
    def homotopy(self) -> Homotopy:
        return self.cups.homotopy


def _local_cup(d: LocalDatum, n: CompactComplex, m: CompactComplex, a: CompactComplex, pairing, top, cfg):
    """The diagonal cup on the local sums; distinct places do not pair."""
    per_place = [total_cup(place.group, n.local_complexes[k].coefficients, m.local_complexes[k].coefficients,
                           a.local_complexes[k].coefficients, pairing, top, cfg, check=False)
                 for k, place in enumerate(d.places)]
    ten = tensor_complex(n.local_sum, m.local_sum)
    comps = {}
    for deg in ten.degrees():
        out = _zeros(a.local_sum.rank(deg), ten.rank(deg))
        for (p, q), off, size in ten.layout.get(deg, ()):
            if not size:
                continue
            dim_q = m.local_sum.rank(q)
            for k, cup_k in enumerate(per_place):
                bx, by = n.local_sum.block(p, k), m.local_sum.block(q, k)
                tgt = a.local_sum.block(deg, k)
                blk = cup_k.source.block(deg, (p, q))
                if not (bx and by and tgt and blk and blk[1]):
                    continue
                cols = off + ((bx[0] + np.arange(bx[1]))[:, None] * dim_q
                              + by[0] + np.arange(by[1])[None, :]).reshape(-1)
                out[tgt[0]:tgt[0] + tgt[1], cols] += cup_k.comp(deg)[:, blk[0]:blk[0] + blk[1]]
        comps[deg] = out
    return ChainMap(ten, a.local_sum, comps)


def _restrict_factor(cup: ChainMap, first: Complex, second: Complex, which: int) -> ChainMap:
    """cup on the tensor of two cones, read on the summands where one factor has no local part."""
    big = cup.source
    ten = tensor_complex(first, second)
    comps = {}
    for deg in ten.degrees():
        out = _zeros(cup.target.rank(deg), ten.rank(deg))
        for (p, q), off, size in ten.layout.get(deg, ()):
            blk = big.block(deg, (p, q))
            if not size or not blk:
                continue
            if which == 0:
                cols = blk[0] + np.arange(size)
            else:
                dim_q = size // first.rank(p)
                wide = blk[1] // first.rank(p)
                cols = blk[0] + (np.arange(first.rank(p))[:, None] * wide + np.arange(dim_q)[None, :]).reshape(-1)
            out[:, off:off + size] = cup.comp(deg)[:, cols]
        comps[deg] = out
    return ChainMap(ten, cup.target, comps)


def compact_cups(d: LocalDatum, m: GModule, top: int = None, pairing: ModuleMap = None, n: GModule = None,
                 a: GModule = None, cfg=None) -> CompactCups:
    """Both compact cups for a pairing N ⊗ M -> A, by default M^∨ ⊗ M -> R(0)."""
    cfg = cfg or DEFAULT_CONFIG
    _no_tate(d, "cup products")
    top = cfg.degree_cap if top is None else top
    if pairing is None:
        n, a = dual_module(m), unit_module(m.ring, m.group)
        pairing = evaluation_pairing(m)
    elif n is None or a is None:
        raise ValidationError("a custom pairing needs its modules N and A")
    g = d.group
    cn, cm, ca = (compact_complex(d, x, top, cfg) for x in (n, m, a))
    cup_g = total_cup(g, n, m, a, pairing, top, cfg)
    cup_s = _local_cup(d, cn, cm, ca, pairing, top, cfg)
    cups = cone_cup(cup_g, cup_s, cn.res, cm.res, ca.res)
    e1, e2, _ = cups.cones
    cup_c = _restrict_factor(cups.cup0, cn.global_complex, e2.complex, 0)
    c_cup = _restrict_factor(cups.cup1, e1.complex, cm.global_complex, 1)
    logger.info("compact cups built over %d places up to degree %d", len(d.places), top)
    return CompactCups(cups, cup_g, cup_s, cup_c, c_cup, (cn, cm, ca))


# trace and the duality triangle

@dataclass
class TraceDatum:
    """A chain map tau_{>=k} C_c(G, A) -> A'[-k], stored by its degree-k matrix."""
    degree: int
    target: GModule
    matrix: np.ndarray


def cohomology_trace(cx: Complex, k: int) -> TraceDatum:
    """A trace onto A' = H^k(cx) as a plain module, when the identification extends to the truncation."""
    t, _ = truncation(cx, "tau_ge", k)
    h = t.cohomology(k)
    ring = cx.ring
    target = GModule(ring, h.exps, trivial(), check=False)
    src = t.exps(k)
    lifts = h.lift(np.eye(len(h.exps), dtype=INT)).reshape(len(h.exps), t.rank(k))
    rows = []
    for c, a in enumerate(h.exps):
        tgt = (a,)
        coords_exps = hom_exps(src, tgt)
        basis = np.eye(len(coords_exps), dtype=INT)
        evals = np.stack([hom_to_matrix(b, src, tgt, ring)[0] @ lifts.T for b in basis]).T if len(basis) else \
            np.zeros((len(h.exps), 0), dtype=INT)
        want = np.zeros(len(h.exps), dtype=INT)
        want[c] = 1
        x = solve(evals, want, coords_exps, tuple(a for _ in h.exps), ring)
        if x is None:
            raise TraceNotQuasiIso("H^%d does not split off degree %d of the truncation" % (k, k))
        rows.append(hom_to_matrix(x, src, tgt, ring)[0])
    matrix = np.array(rows, dtype=INT).reshape(len(h.exps), t.rank(k))
    logger.debug("trace in degree %d onto %s", k, h.invariants)
    return TraceDatum(k, target, matrix)


def trace_map(cx: Complex, trace: TraceDatum, degrees) -> ChainMap:
    """theta = r o pi_tau: cx -> A'[-k], with r checked to be a quasi-isomorphism on ``degrees``."""
    k = trace.degree
    t, pi = truncation(cx, "tau_ge", k)
    r = ChainMap(t, concentrated(trace.target, k), {k: trace.matrix})
    report = is_quasi_iso(r, [i for i in degrees if i >= k])
    if not report.ok:
        bad = [i for i, ok in report.bijective.items() if not ok]
        raise TraceNotQuasiIso("trace is not a quasi-isomorphism in degrees %s" % bad)
    return compose(r, pi)


@dataclass
class DualityTriangle:
    pair: TrianglePair
    report: TriangleReport
    square_homotopy: Homotopy
    trace: TraceDatum


def duality_triangle(d: LocalDatum, m: GModule, k: int, top: int = None, trace: TraceDatum = None,
                     cfg=None) -> DualityTriangle:
    """The map from C_c(M) -> C(M) -> ⊕_v C(H_v, M) to the dual of the triangle of M^∨.

    Rows are quasi-isomorphisms where the 2-out-of-3 argument applies in the
    window [max(0, k - D), D] with D the last reliable degree.
    """
    cfg = cfg or DEFAULT_CONFIG
    _no_tate(d, "the duality triangle")
    top = cfg.degree_cap if top is None else top
    cups = compact_cups(d, m, top, cfg=cfg)
    cn, cm, ca = cups.compact
    e1, e2, e3 = cups.cups.cones
    big_d = cm.reliable_top
    window = (max(0, k - big_d), big_d)
    trace = trace or cohomology_trace(e3.complex, k)
    theta = trace_map(e3.complex, trace, range(k, big_d + 1))
    t_cx = theta.target

    # top: C_c(M) -> C(M) -> L(M) -> C_c(M)[1]
    top_row = ExactTriangle.from_ses(ShortExactSequence(e2.inclusion, e2.projection), "rotated", "M")
    # bottom: Hom(C(N), T) -> Hom(C_c(N), T) -> Hom(L(N)[-1], T)
    id_t = identity(t_cx)
    hom_proj = hom_chain_map(e1.projection, id_t)
    hom_inc = hom_chain_map(e1.inclusion, id_t, source=hom_proj.target)
    bottom_row = ExactTriangle.from_ses(ShortExactSequence(hom_proj, hom_inc), "sub_first", "dual")

    _, vert_x = adjunction(compose(theta, cups.cup_c), cn.global_complex, e2.complex)
    _, vert_y = adjunction(compose(theta, cups.c_cup), e1.complex, cm.global_complex)
    _, left_iso, _ = translation_isos(cn.local_sum, cm.local_sum, -1)
    shifted_cup = shift_map(cups.cup_local, -1, left_iso.target, e3.shifted_target)
    local_pairing = compose(theta, compose(e3.inclusion, compose(shifted_cup, left_iso)))
    _, psi_z = adjunction(local_pairing, e1.shifted_target, cm.local_sum)
    vert_z = GradedMap(e2.shifted_target, psi_z.target,
                       {i + 1: psi_z.comp(i) for i in psi_z.degrees()}, -1)

    left = compose(vert_y, e2.projection)
    right = compose(hom_proj, vert_x)
    _, s = adjunction(compose(theta, cups.homotopy.s), e1.complex, e2.complex)
    try:
        square = Homotopy(left, right, {i: s.comp(i) for i in s.degrees()})
    except NotAHomotopy as exc:
        raise NotAHomotopy("first square of the duality triangle: %s" % exc)

    pair = TrianglePair(top_row, bottom_row, (vert_x, vert_y, vert_z), window)
    report = pair.two_out_of_three()
    logger.info("duality triangle in degrees %d..%d: %s", window[0], window[1], report.rows)
    return DualityTriangle(pair, report, square, trace)


# change of group

@dataclass
class InducedPlace:
    """Place (v, i) of U: H_v ∩ phi_v^-1(U) -> U through h -> sigma_i^-1 phi_v(h) sigma_i."""
    parent: int
    sigma: int
    inclusion: np.ndarray
    place: Place


def induced_datum(d: LocalDatum, u: Sequence[int]):
    """The places of a normal subgroup U, one per right coset of phi_v(H_v) U, with least representatives."""
    g = d.group
    u = g.check_normal(u)
    sub, incl = g.subgroup(u)
    to_u = np.full(g.order, -1, dtype=INT)
    to_u[incl] = np.arange(len(incl))
    induced = []
    for v, place in enumerate(d.places):
        h, phi = place.group, place.images
        k_elems = g.closure(list(set(int(x) for x in phi)) + list(u))
        hu_elems = [x for x in range(h.order) if to_u[phi[x]] >= 0]
        hu, hu_incl = h.subgroup(hu_elems, label="%s∩U" % h.label)
        for i, coset in enumerate(g.right_cosets(k_elems)):
            sigma = coset[0]
            inv = g.inverse[sigma]
            images = to_u[g.table[g.table[inv, phi[hu_incl]], sigma]]
            induced.append(InducedPlace(v, sigma, hu_incl,
                                        Place(hu, images, place.tate, "%s.%d" % (place.label, i))))
    return LocalDatum(sub, [p.place for p in induced]), induced, incl


def _twist_family(x: Complex, sigma: int) -> MatrixFamily:
    return MatrixFamily({i: x.term(i).action[sigma] for i in x.degrees()})


@dataclass
class CompactChange:
    """A map of compact complexes built as a map of shifted cones, with its local homotopy."""
    source: CompactComplex
    target: CompactComplex
    full: ChainMap
    map: ChainMap
    local: ChainMap
    homotopy: Optional[GradedMap] = None


def _truncated_map(f: ChainMap, source: CompactComplex, target: CompactComplex) -> ChainMap:
    s, t = source.truncated(), target.truncated()
    return ChainMap(s, t, {n: f.comp(n) for n in s.degrees()})


def compact_restriction(d: LocalDatum, u: Sequence[int], m: Coefficients, top: int = None, cfg=None):
    """res_c: C_c(G, S; X) -> C_c(U, S_U; X).

    Place (v, i) takes c on H_v to sigma_i^-1 c restricted to H_v ∩ phi^-1(U);
    the local square commutes up to the conjugation homotopy of sigma_i^-1.
    """
    cfg = cfg or DEFAULT_CONFIG
    _no_tate(d, "compact restriction")
    top = cfg.degree_cap if top is None else top
    g = d.group
    x = as_complex(m)
    du, induced, incl = induced_datum(d, u)
    source = compact_complex(d, x, top, cfg)
    target = compact_complex(du, restrict_coefficients(x, du.group, incl), top, cfg)
    entries, homs = [], {}
    for j, ip in enumerate(induced):
        inv = int(g.inverse[ip.sigma])
        twist = _twist_family(x, inv)
        loc_v = source.local_complexes[ip.parent]
        loc_j = target.local_complexes[j]
        entries.append((ip.parent, j, compatible_pair_map(loc_v, loc_j, ip.inclusion, twist)))
        if ip.sigma == 0:
            continue
        phi = d.places[ip.parent].images[ip.inclusion]
        pj = compatible_pair_map(source.global_complex, loc_j, phi, twist)
        h = conjugation_homotopy(g, x, inv, top, cfg, source.global_complex, check=False)
        homs[j] = -compose(pj, h.s)
    beta = _block_map(source.local_sum, target.local_sum, entries) if induced else \
        ChainMap(source.local_sum, target.local_sum, {}, check=False)
    alpha = compatible_pair_map(source.global_complex, target.global_complex, incl,
                                identity(source.coefficients))
    h = _stack_map(source.global_complex, target.local_sum, homs, degree=-1) if homs else None
    full = map_of_shifted_cones(source.cone, target.cone, alpha, beta, h, check=False)
    return CompactChange(source, target, full, _truncated_map(full, source, target), beta, h)


def compact_corestriction(d: LocalDatum, u: Sequence[int], m: Coefficients, top: int = None,
                          cfg=None) -> CompactChange:
    """cor_c: C_c(U, S_U; X) -> C_c(G, S; X) for at most one place.

    The global corestriction uses the representatives sigma_i^-1 phi(t), t
    running over least representatives of (H_v ∩ phi^-1 U) in H_v, so the
    local square sum_i cor(sigma_i c_i) commutes on the nose.
    """
    cfg = cfg or DEFAULT_CONFIG
    _no_tate(d, "compact corestriction")
    if len(d.places) > 1:
        raise MalformedDatum("compact corestriction is built for at most one place, got %d" % len(d.places))
    top = cfg.degree_cap if top is None else top
    g = d.group
    x = as_complex(m)
    u = g.check_normal(u)
    du, induced, incl = induced_datum(d, u)
    source = compact_complex(du, restrict_coefficients(x, du.group, incl), top, cfg)
    target = compact_complex(d, x, top, cfg)
    reps = None
    entries = []
    if induced:
        place = d.places[0]
        h = place.group
        hu_elems = [int(e) for e in induced[0].inclusion]
        transversal = [c[0] for c in h.right_cosets(hu_elems)]
        reps = [int(g.table[g.inverse[ip.sigma], place.images[t]]) for ip in induced for t in transversal]
        loc_v = target.local_complexes[0]
        cor_h = corestriction(h, hu_elems, loc_v.coefficients, top, reps=transversal, cfg=cfg)
        for j, ip in enumerate(induced):
            tw = compatible_pair_map(source.local_complexes[j], cor_h.source, np.arange(ip.place.group.order),
                                     _twist_family(x, ip.sigma))
            entries.append((j, 0, compose(cor_h, tw)))
    alpha = corestriction(g, u, x, top, reps=reps, cfg=cfg)
    beta = _block_map(source.local_sum, target.local_sum, entries) if entries else \
        ChainMap(source.local_sum, target.local_sum, {}, check=False)
    full = map_of_shifted_cones(source.cone, target.cone, alpha, beta)
    return CompactChange(source, target, full, _truncated_map(full, source, target), beta)


@dataclass
class CompactShapiro:
    sh: ChainMap
    res: CompactChange
    cor: Optional[CompactChange]
    datum: LocalDatum
    report: QuasiIsoReport
    local_reports: List[QuasiIsoReport]
    cor_res: Dict[int, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.report.ok and all(r.ok for r in self.local_reports) and all(self.cor_res.values())


def _evaluation(x: Complex, u: Sequence[int]):
    return MatrixFamily({i: identity_coset_projection(x.term(i), u) for i in x.degrees()})


def shapiro_compact(d: LocalDatum, u: Sequence[int], m: Coefficients, top: int = None,
                    cfg=None) -> CompactShapiro:
    """sh_c: C_c(G, S; X_U) -> C_c(U, S_U; X), res_c on X_U followed by evaluation at U.

    Also checks cor_c res_c = [G:U] on H_c for data with at most one place.
    """
    cfg = cfg or DEFAULT_CONFIG
    _no_tate(d, "compact Shapiro")
    top = cfg.degree_cap if top is None else top
    g = d.group
    x = as_complex(m)
    u = g.check_normal(u)
    induced_x = induce_coefficients(x, u)
    res = compact_restriction(d, u, induced_x, top, cfg)
    du = res.target.datum
    plain = compact_complex(du, restrict_coefficients(x, du.group, g.subgroup(u)[1]), top, cfg)
    ev = _evaluation(x, u)
    alpha = compatible_pair_map(res.target.global_complex, plain.global_complex, np.arange(du.group.order), ev)
    entries = [(j, j, compatible_pair_map(res.target.local_complexes[j], plain.local_complexes[j],
                                          np.arange(place.group.order), ev))
               for j, place in enumerate(du.places)]
    beta = _block_map(res.target.local_sum, plain.local_sum, entries) if entries else \
        ChainMap(res.target.local_sum, plain.local_sum, {}, check=False)
    ev_c = _truncated_map(map_of_shifted_cones(res.target.cone, plain.cone, alpha, beta), res.target, plain)
    sh = compose(ev_c, res.map)
    degrees = range(x.lo, res.source.reliable_top + 1)
    report = is_quasi_iso(sh, degrees)

    local_reports = []
    _, induced, _ = induced_datum(d, u)
    for v in range(len(d.places)):
        parts = [j for j, ip in enumerate(induced) if ip.parent == v]
        target = direct_sum_complex(*[plain.local_complexes[j] for j in parts])
        comps_v = {pos: compose(entries[j][2], _summand(res.local, v, j, res.source, res.target))
                   for pos, j in enumerate(parts)}
        loc = _stack_map(res.source.local_complexes[v], target, comps_v)
        local_reports.append(is_quasi_iso(loc, range(x.lo, res.source.reliable_top + 1)))

    cor_res = {}
    if len(d.places) <= 1:
        cor = compact_corestriction(d, u, induced_x, top, cfg)
        both = compose(cor.map, res.map)
        index = g.order // len(u)
        for i in degrees:
            hc = both.source.cohomology(i)
            mat = induced_matrix(both.comp(i), hc, both.target.cohomology(i))
            cor_res[i] = not ((mat - index * np.eye(len(hc.exps), dtype=INT))
                              % hc.ring.orders(hc.exps)[:, None]).any()
    else:
        cor = None
    logger.info("compact Shapiro over %s: quasi-iso %s", du.group.label, report.ok)
    return CompactShapiro(sh, res, cor, du, report, local_reports, cor_res)


def _summand(beta: ChainMap, v: int, j: int, source: CompactComplex, target: CompactComplex) -> ChainMap:
    """The (v -> j) component of a map between local sums."""
    s, t = source.local_complexes[v], target.local_complexes[j]
    comps = {}
    for n in s.degrees():
        src, tgt = source.local_sum.block(n, v), target.local_sum.block(n, j)
        if src and tgt:
            comps[n] = beta.comp(n)[tgt[0]:tgt[0] + tgt[1], src[0]:src[0] + src[1]]
    return ChainMap(s, t, comps)
