"""Randomized verification suites.

Each suite draws ``cfg.random_cases[name]`` cases from a generator seeded
by (seed, suite) and checks one family of identities exactly.  A case
fails when it raises; the failure message is kept for the report.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np
from tqdm import tqdm

from .cochains import (Cochain, CochainComplex, check_cup_naturality, cochain_cohomology, cochain_differential,
                       cochain_map, cup, shapiro_map, total_cup)
from .compact import LocalDatum, Place, compact_complex, compact_cups, compact_les
from .complexes import (TRUNCATIONS, ChainMap, Complex, ExactTriangle, TrianglePair, cone, cone_shifted,
                        hom_complex, is_quasi_iso, quotient_module, shift, tensor_complex, truncate)
from .errors import CheckFailed, IwacohError
from .groups import FiniteGroup, all_small_groups, cyclic, from_name
from .induction import (QuotientDatum, check_dfm_naturality, cyclic_module_tower, cyclic_p_tower, dfm_duality,
                        tower_colim_cohomology, tower_lim_cohomology)
from .linalg import INT, FinAb, RingSpec, image_order
from .modules import (Character, GModule, ModuleMap, dual_map, dual_module, evaluation_pairing, hom_mod,
                      hom_to_matrix, induced_module, trivial_module, twist_by_character, unit_module)
from .oracles import cohomology_oracle, tate_oracle
from .tate import TateComplex, finite_duality_check, periodic_cohomology, tate_cohomology, tate_table
from .workspace import Report, TaskResult, Workspace

logger = logging.getLogger(__name__)

COCHAIN_GROUPS = ("trivial", "cyclic:2", "cyclic:3", "cyclic:4", "cyclic:2 x cyclic:2", "s3")
SMALL_GROUPS = ("trivial", "cyclic:2", "cyclic:3", "cyclic:2 x cyclic:2")
CUP_GROUPS = ("cyclic:2", "cyclic:3", "cyclic:4", "s3")
SHAPIRO_PAIRS = (("cyclic:4", (0, 2)), ("cyclic:9", (0, 3, 6)), ("s3", (0, 3, 4)))
TATE_ORDERS = (2, 3, 4, 8, 9)


# random data

def random_ring(rng, max_e: int = 3) -> RingSpec:
    return RingSpec(int(rng.choice([2, 3])), int(rng.integers(1, max_e + 1)))


def random_group(rng, names=COCHAIN_GROUPS, cfg=None) -> FiniteGroup:
    return from_name(names[int(rng.integers(len(names)))], cfg)


def random_subgroup(rng, g: FiniteGroup):
    return g.closure([int(rng.integers(g.order))])


def sign_characters(g: FiniteGroup, ring: RingSpec) -> List[np.ndarray]:
    """Every character of g with values in {1, -1}."""
    out = {}
    for bits in itertools.product((1, -1), repeat=g.order - 1):
        values = np.array((1,) + bits, dtype=INT) % ring.modulus
        if not ((values[g.table] - np.outer(values, values)) % ring.modulus).any():
            out[tuple(values)] = values
    return list(out.values())


def random_module(rng, ring: RingSpec, g: FiniteGroup, max_rank: int = 2, max_order: int = None) -> GModule:
    """Trivial, permutation, sign-twisted or dual modules of small rank."""
    while True:
        exps = tuple(int(a) for a in rng.integers(1, ring.e + 1, size=int(rng.integers(1, max_rank + 1))))
        kind = int(rng.integers(4))
        m = trivial_module(ring, exps, g)
        if kind == 1 and g.order > 1:
            m = induced_module(trivial_module(ring, exps[:1], g), random_subgroup(rng, g))
        elif kind == 2:
            chars = sign_characters(g, ring)
            m = twist_by_character(m, Character(g, chars[int(rng.integers(len(chars)))], ring))
        if kind == 3 or rng.integers(4) == 0:
            m = dual_module(m)
        if m.rank <= max_rank and (max_order is None or m.order <= max_order):
            return m


def random_map(rng, m: GModule, n: GModule) -> ModuleMap:
    """A random element of Hom_G(M, N)."""
    ring = m.ring
    h = hom_mod(m, n)
    gens = h.fixed_points()
    coeffs = rng.integers(0, ring.modulus, size=len(gens))
    coords = coeffs @ gens % h.orders if len(gens) else np.zeros(h.rank, dtype=INT)
    return ModuleMap(m, n, hom_to_matrix(coords, m.exps, n.exps, ring))


def random_complex(rng, ring: RingSpec, g: FiniteGroup, lo: int = 0) -> Complex:
    """M -f-> N -> N / f(M), or M -> N when the cokernel vanishes."""
    m, n = random_module(rng, ring, g), random_module(rng, ring, g)
    f = random_map(rng, m, n)
    quo, proj, _ = quotient_module(n, f.matrix.T)
    terms, diffs = {lo: m, lo + 1: n}, {lo: f.matrix}
    if quo.rank:
        terms[lo + 2] = quo
        diffs[lo + 1] = proj
    return Complex(ring, lo, max(terms), terms, diffs, group=g)


def random_cochain(rng, g: FiniteGroup, m: GModule, degree: int) -> Cochain:
    table = rng.integers(0, m.ring.modulus, size=(g.order ** degree, m.rank))
    return Cochain(g, m, degree, table)


def random_datum(rng, g: FiniteGroup, tate: bool = False, max_places: int = 2) -> LocalDatum:
    places = []
    for _ in range(int(rng.integers(0, max_places + 1))):
        h, incl = g.subgroup(random_subgroup(rng, g))
        places.append(Place(h, incl, tate and bool(rng.integers(2))))
    return LocalDatum(g, places)


def scalar_map(x: Complex, y: Complex, c: int) -> ChainMap:
    return ChainMap(x, y, {i: c * np.eye(x.rank(i), dtype=INT) for i in x.degrees()})


def _expect(condition: bool, message: str, *args):
    if not condition:
        raise CheckFailed(message % args)


# suites

def _delta(c: Cochain) -> Cochain:
    d = cochain_differential(c.group, c.module, c.degree)
    return Cochain(c.group, c.module, c.degree + 1, d @ c.vector)


def signs_case(rng, cfg, k: int):
    """d o d = 0 for every construction of complexes."""
    constructs = ("shift", "truncation", "cone", "shifted_cone", "hom", "tensor", "cochain", "tate", "compact")
    construct = constructs[k % len(constructs)]
    ring = random_ring(rng)
    g = random_group(rng, COCHAIN_GROUPS if construct not in ("tate", "compact") else SMALL_GROUPS, cfg)
    x = random_complex(rng, ring, g, lo=int(rng.integers(-1, 2)))
    c = int(rng.integers(ring.modulus))
    if construct == "shift":
        built = [shift(x, int(rng.integers(-2, 3)))]
    elif construct == "truncation":
        i = int(rng.integers(x.lo - 1, x.hi + 2))
        built = [truncate(x, kind, i) for kind in TRUNCATIONS]
    elif construct == "cone":
        built = [cone(scalar_map(x, x, c)).complex]
    elif construct == "shifted_cone":
        built = [cone_shifted(scalar_map(x, x, c)).complex]
    elif construct == "hom":
        built = [hom_complex(x, random_complex(rng, ring, g))]
    elif construct == "tensor":
        built = [tensor_complex(x, random_complex(rng, ring, g))]
    elif construct == "cochain":
        built = [CochainComplex(g, x, 1 if g.order > 4 else 2, cfg)]
    elif construct == "tate":
        built = [TateComplex(g, random_module(rng, ring, g), -1, 1, cfg)]
    else:
        built = [compact_complex(random_datum(rng, g, tate=True), random_module(rng, ring, g), 2, cfg).complex]
    for y in built:
        y.check()


def cones_case(rng, cfg, k: int):
    """cup0 - cup1 = d s + s d on the compact cones of a random local datum."""
    g = random_group(rng, SMALL_GROUPS, cfg)
    m = random_module(rng, random_ring(rng, 2), g, max_rank=1)
    cups = compact_cups(random_datum(rng, g), m, top=2, cfg=cfg)
    cups.homotopy.check()


def cups_case(rng, cfg, k: int):
    """Leibniz rule for the cochain cup product, and naturality in the pairing."""
    ring = random_ring(rng, 2)
    if k % 4 == 3:
        g = random_group(rng, ("cyclic:2", "cyclic:3"), cfg)
        m, m2 = random_module(rng, ring, g, 1), random_module(rng, ring, g, 1)
        gmap = random_map(rng, m, m2)
        a = unit_module(ring, g)
        top = 2
        cup_m = total_cup(g, dual_module(m), m, a, evaluation_pairing(m), top, cfg)
        cup_m2 = total_cup(g, dual_module(m2), m2, a, evaluation_pairing(m2), top, cfg)
        f = dual_map(gmap)
        f_star = cochain_map(f, CochainComplex(g, f.source, top, cfg), CochainComplex(g, f.target, top, cfg))
        g_star = cochain_map(gmap, CochainComplex(g, m, top, cfg), CochainComplex(g, m2, top, cfg))
        check_cup_naturality(cup_m, cup_m2, f_star, g_star)
        return
    g = random_group(rng, CUP_GROUPS, cfg)
    m = random_module(rng, ring, g, max_rank=2)
    pairing = evaluation_pairing(m)
    i = int(rng.integers(0, 3))
    j = int(rng.integers(0, 3 - i))
    alpha, beta = random_cochain(rng, g, dual_module(m), i), random_cochain(rng, g, m, j)
    lhs = _delta(cup(alpha, beta, pairing)).table
    rhs = cup(_delta(alpha), beta, pairing).table + (-1) ** i * cup(alpha, _delta(beta), pairing).table
    bad = (lhs - rhs) % ring.modulus
    _expect(not bad.any(), "d(a ∪ b) != da ∪ b + (-1)^%d a ∪ db for degrees (%d, %d) on %s at tuple %d",
            i, i, j, g.label, int(np.argwhere(bad)[0][0]) if bad.any() else -1)


def _tate_expected(n: int, m: int) -> FinAb:
    p = 2 if m % 2 == 0 else 3
    gcd = int(np.gcd(n, m))
    return FinAb.from_exps(p, [int(round(np.log(gcd) / np.log(p)))] if gcd > 1 else [])


def tate_case(rng, cfg, k: int):
    """Known Tate values, the period-2 model and the enumeration oracles."""
    mode = k % 4
    if mode == 0:
        n, q = (int(x) for x in rng.choice(TATE_ORDERS, size=2))
        p = 2 if q % 2 == 0 else 3
        ring = RingSpec(p, int(round(np.log(q) / np.log(p))))
        m = trivial_module(ring, (ring.e,), cyclic(n, cfg))
        want = _tate_expected(n, q)
        for i in (0, -1):
            got = tate_cohomology(m.group, m, i, cfg)
            _expect(got == want, "Ĥ^%d(Z/%d, Z/%d) = %s, expected %s", i, n, q, got, want)
            _expect(tate_oracle(m, i, cfg) == got, "Ĥ^%d(Z/%d, Z/%d) disagrees with enumeration", i, n, q)
    elif mode == 1:
        m = trivial_module(RingSpec(3, 2), (2,), cyclic(2, cfg))
        for i, h in tate_table(m.group, m, -3, 3, cfg).items():
            _expect(h.is_zero(), "Ĥ^%d(Z/2, Z/9) = %s, expected 0", i, h)
    elif mode == 2:
        g = random_group(rng, ("cyclic:2", "cyclic:3", "cyclic:4"), cfg)
        m = random_module(rng, random_ring(rng, 2), g)
        for i in range(-2, 3):
            bar, per = tate_cohomology(g, m, i, cfg), periodic_cohomology(g, m, i)
            _expect(bar == per, "Ĥ^%d(%s) is %s in the bar model but %s in the periodic one", i, g.label, bar, per)
        for i in (0, -1):
            _expect(tate_oracle(m, i, cfg) == tate_cohomology(g, m, i, cfg),
                    "Ĥ^%d(%s) disagrees with enumeration", i, g.label)
    else:
        g = random_group(rng, SMALL_GROUPS, cfg)
        m = random_module(rng, random_ring(rng, 2), g)
        degrees = [i for i in range(3) if m.order ** (g.order ** i) <= cfg.enumeration_limit]
        for i in degrees:
            got = cochain_cohomology(g, m, i, cfg)
            oracle = cohomology_oracle(g, m, i, cfg)
            _expect(got == oracle, "H^%d(%s) is %s but enumeration gives %s", i, g.label, got, oracle)


def shapiro_case(rng, cfg, k: int):
    """H^j(G, M_U) -> H^j(U, M) is bijective for j <= 2."""
    name, u = SHAPIRO_PAIRS[k % len(SHAPIRO_PAIRS)]
    g = from_name(name, cfg)
    m = random_module(rng, random_ring(rng, 2), g, max_rank=1 if g.order > 4 else 2)
    report = is_quasi_iso(shapiro_map(g, u, m, 3, cfg), range(3))
    bad = [j for j, ok in report.bijective.items() if not ok]
    _expect(report.ok, "Shapiro map for (%s, %s) is not bijective on H^j, j in %s", name, u, bad)


def duality_case(rng, cfg, k: int):
    """|Ĥ^n(G, M)| = |Ĥ^{-n-1}(G, M^∨)|, with a perfect pairing for cyclic G."""
    groups = all_small_groups(8)
    g = groups[int(rng.integers(len(groups)))]
    m = random_module(rng, random_ring(rng, 2), g, max_rank=2, max_order=81)
    n = int(rng.integers(-2, 3))
    rep = finite_duality_check(g, m, n, cfg)
    _expect(rep.ok, "duality in degree %d for %s: %s vs %s (perfect=%s)", n, g.label, rep.left, rep.right,
            rep.pairing_perfect)


def towers_case(rng, cfg, k: int):
    """Stabilized limits of the cyclic towers."""
    mode = k % 4
    if mode in (0, 1, 3):
        t = cyclic_p_tower(2, 4, 2 if mode == 3 else 1, cfg)
        m = trivial_module(RingSpec(2, 1), (1,), t.group)
        degree = 2 if mode == 1 else 1
        want = FinAb(2) if degree == 2 else FinAb(2, (1,))
        rep = tower_colim_cohomology(t, m, degree, cfg)
        _expect(rep.value == want, "colim H^%d over the 2-tower with window %d is %s, expected %s",
                degree, t.window, rep.value, want)
    else:
        p = int(rng.choice([2, 3]))
        ring = RingSpec(p, 3)
        g = cyclic(p, cfg)
        modules, transitions = cyclic_module_tower(ring, g, 3)
        rep = tower_lim_cohomology(g, modules, transitions, 2, 1, cfg)
        _expect(rep.value == FinAb(p, (1,)), "lim H^2(Z/%d, Z/%d^k) is %s", p, p, rep.value)


def compact_case(rng, cfg, k: int):
    """Exact compact-support sequence, with the empty and identity-place extremes."""
    g = random_group(rng, SMALL_GROUPS, cfg)
    m = random_module(rng, random_ring(rng, 2), g)
    top = 2
    mode = k % 4
    if mode == 0:
        cc = compact_complex(LocalDatum(g), m, top, cfg)
        glob = CochainComplex(g, m, top, cfg)
        for i in range(top):
            _expect(cc.cohomology(i) == glob.cohomology(i).invariants,
                    "H^%d_c with no places is %s but H^%d is %s", i, cc.cohomology(i), i,
                    glob.cohomology(i).invariants)
        d = LocalDatum(g)
    elif mode == 1:
        d = LocalDatum(g, [Place(g, np.arange(g.order))])
        cc = compact_complex(d, m, top, cfg)
        bad = [i for i in range(top + 1) if not cc.cohomology(i).is_zero()]
        _expect(not bad, "compact complex of the identity place is not acyclic in degrees %s", bad)
    else:
        d = random_datum(rng, g, tate=True)
    compact_les(d, m, top, cfg)


def triangles_case(rng, cfg, k: int):
    """Scalar maps between cone triangles: when two rows are isomorphisms so is the third."""
    ring = random_ring(rng)
    g = random_group(rng, ("trivial", "cyclic:2", "cyclic:3"), cfg)
    x = random_complex(rng, ring, g)
    f = scalar_map(x, x, int(rng.integers(ring.modulus)))
    tri = ExactTriangle.from_cone(f, "cone")
    units = [c for c in range(1, ring.modulus) if ring.is_unit(c)]
    s = int(rng.choice(units)) if k % 3 else ring.p
    vertices = [cx for cx, _ in tri.vertices]
    pair = TrianglePair(tri, tri, tuple(scalar_map(v, v, s) for v in vertices), (x.lo - 1, x.hi))
    report = pair.two_out_of_three()
    if ring.is_unit(s):
        _expect(all(report.rows.values()), "unit scalars should give quasi-isomorphisms, got %s", report.rows)
    for name, degrees in report.proved.items():
        _expect(all(report.degreewise[name][i] for i in degrees), "row %s proved but not bijective", name)


def dfm_case(rng, cfg, k: int):
    """(M_U)^∨ -> (_U M^∨)^iota is a bijection natural in M."""
    g = random_group(rng, ("cyclic:2", "cyclic:4", "cyclic:2 x cyclic:2", "s3"), cfg)
    if g.is_abelian():
        u = random_subgroup(rng, g)
    else:
        u = [(0,), (0, 3, 4), tuple(range(g.order))][int(rng.integers(3))]
    datum = QuotientDatum(g, u)
    ring = random_ring(rng, 2)
    m, n = random_module(rng, ring, g), random_module(rng, ring, g)
    iso = dfm_duality(datum, m)
    src, tgt = iso.source, iso.target
    _expect(src.order == tgt.order and image_order(iso.matrix, src.exps, tgt.exps, ring) == tgt.order,
            "duality map over %s / %s is not bijective", g.label, u)
    _expect(check_dfm_naturality(datum, random_map(rng, m, n)), "duality map over %s / %s is not natural",
            g.label, u)


SUITES: Dict[str, Callable] = {
    "signs": signs_case,
    "cones": cones_case,
    "cups": cups_case,
    "tate": tate_case,
    "shapiro": shapiro_case,
    "duality": duality_case,
    "towers": towers_case,
    "compact": compact_case,
    "triangles": triangles_case,
    "dfm": dfm_case,
}


@dataclass
class SuiteOutcome:
    name: str
    cases: int
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def run_suites(cfg, names, seed: int = 0) -> List[SuiteOutcome]:
    out = []
    for name in names:
        rng = np.random.default_rng([seed, list(SUITES).index(name)])
        count = cfg.random_cases[name]
        outcome = SuiteOutcome(name, count)
        for k in tqdm(range(count), desc=name, disable=None, leave=False):
            try:
                SUITES[name](rng, cfg, k)
            except IwacohError as exc:
                outcome.failures.append("case %d: %s: %s" % (k, type(exc).__name__, exc))
        logger.info("suite %s: %d/%d cases exact", name, count - len(outcome.failures), count)
        out.append(outcome)
    return out


def verify_suite(w: Workspace, names, seed: int = 0) -> Report:
    """One report entry per suite; an empty list of names gives an empty passing report."""
    report = Report(seed)
    for outcome in run_suites(w.config, names, seed):
        result = TaskResult("verify", {"suite": outcome.name, "cases": outcome.cases})
        result.results[outcome.name] = "%d/%d exact" % (outcome.cases - len(outcome.failures), outcome.cases)
        if not outcome.ok:
            result.witnesses["failures"] = outcome.failures[:5]
            result.fail("%d of %d cases failed" % (len(outcome.failures), outcome.cases))
        report.tasks.append(result)
    return report
