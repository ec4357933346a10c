"""Induced modules at a finite level and towers of cohomology groups.

For a normal subgroup U of G with quotient Q = G/U:

* ``induce_hom``: _U M = Hom_R(R[Q], M), f stored by its values f(beta_b)
  at coordinates b * rank(M) + k, with (sigma f)(beta) = sigma f(sigma^-1 beta),
  (lambda f)(x) = f(x lambda) and (f lambda)(x) = f(lambda x).
* ``induce_tensor``: M_U = R[Q]^iota ⊗ M, beta_b ⊗ x at the same coordinates,
  with sigma(beta ⊗ x) = sigma beta ⊗ sigma x, lambda.beta = beta lambda^-1 and
  beta.lambda = lambda^-1 beta.

Cosets are ordered by their least element, so Q's element b is the coset
whose least member is ``reps[b]``.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .cochains import CochainComplex, _fixed_submodule, cochain_map, compatible_pair_map, shapiro_map
from .complexes import is_quasi_iso
from .config import DEFAULT_CONFIG
from .errors import LevelOutOfRange, NotNested, NotStabilized, ValidationError
from .groups import FiniteGroup, cyclic, quotient
from .linalg import INT, FinAb, RingSpec, Subquotient, image_order
from .modules import (GModule, ModuleMap, compose, dual_map, dual_module, iota_twist, tensor_mod,
                      trivial_module)

logger = logging.getLogger(__name__)


class QuotientDatum:
    """G with a normal subgroup U, the quotient Q = G/U and least coset representatives."""

    def __init__(self, group: FiniteGroup, normal: Sequence[int]):
        self.group = group
        self.normal = group.check_normal(normal)
        self.quotient, self.projection, self.reps = quotient(group, self.normal)

    @property
    def index(self) -> int:
        return self.quotient.order

    def contains(self, other: "QuotientDatum") -> bool:
        return set(other.normal) <= set(self.normal)

    def __repr__(self):
        return "QuotientDatum(%s / %s)" % (self.group.label, list(self.normal))


def _left_perm(q: FiniteGroup) -> np.ndarray:
    """perm[a][c, b] = 1 iff beta_c = a beta_b."""
    n = q.order
    out = np.zeros((n, n, n), dtype=INT)
    out[np.arange(n)[:, None], q.table, np.arange(n)[None, :]] = 1
    return out


def _right_perm(q: FiniteGroup) -> np.ndarray:
    """perm[a][c, b] = 1 iff beta_c = beta_b a."""
    n = q.order
    out = np.zeros((n, n, n), dtype=INT)
    out[np.arange(n)[:, None], q.table.T, np.arange(n)[None, :]] = 1
    return out


def _kron_stack(perms: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """Stack of kron(perms[g], inner[g])."""
    count, q, _ = perms.shape
    r = inner.shape[-1]
    return np.einsum("gcb,gij->gcibj", perms, inner).reshape(count, q * r, q * r)


@dataclass
class LambdaLevel:
    """The group algebra R[Q] with G acting through Q by left multiplication."""
    ring: RingSpec
    datum: QuotientDatum
    module: GModule = field(init=False)

    def __post_init__(self):
        q = self.datum.quotient
        g_action = _left_perm(q)[self.datum.projection]
        left = _left_perm(q)
        # x.lambda = x lambda: the column for beta_b goes to beta_b lambda
        right = _right_perm(q)
        self.module = GModule(self.ring, (self.ring.e,) * q.order, self.datum.group, g_action,
                              lambda_group=q, lambda_left=left, lambda_right=right, label="R[Q]")

    @property
    def rank(self) -> int:
        return self.datum.index


def _group_action(datum: QuotientDatum, m: GModule) -> np.ndarray:
    return _kron_stack(_left_perm(datum.quotient)[datum.projection], m.action)


def _check_datum(datum: QuotientDatum, m: GModule):
    if datum.group != m.group:
        raise ValidationError("module is over %s but the quotient datum over %s"
                              % (m.group.label, datum.group.label))


def induce_hom(datum: QuotientDatum, m: GModule) -> GModule:
    """_U M = Hom_R(R[G/U], M)."""
    _check_datum(datum, m)
    q = datum.quotient
    eye = np.broadcast_to(np.eye(m.rank, dtype=INT), (q.order, m.rank, m.rank))
    # (lambda f)(beta_c) = f(beta_c lambda)
    left = _kron_stack(_right_perm(q).transpose(0, 2, 1), eye)
    # (f lambda)(beta_c) = f(lambda beta_c)
    right = _kron_stack(_left_perm(q).transpose(0, 2, 1), eye)
    return GModule(m.ring, m.exps * datum.index, m.group, _group_action(datum, m),
                   lambda_group=q, lambda_left=left, lambda_right=right,
                   label="_U%s" % (m.label or "M"), check=False)


def induce_tensor(datum: QuotientDatum, m: GModule) -> GModule:
    """M_U = R[G/U]^iota ⊗ M, G acting diagonally and Lambda on the algebra factor."""
    _check_datum(datum, m)
    algebra = iota_twist(LambdaLevel(m.ring, datum).module)
    ten = tensor_mod(algebra, m)
    eye = np.broadcast_to(np.eye(m.rank, dtype=INT), (datum.index, m.rank, m.rank))
    return GModule(m.ring, ten.exps, m.group, ten.action, lambda_group=datum.quotient,
                   lambda_left=_kron_stack(algebra.lambda_left, eye),
                   lambda_right=_kron_stack(algebra.lambda_right, eye),
                   label="%s_U" % (m.label or "M"), check=False)


def induced_map(datum: QuotientDatum, f: ModuleMap, kind: str = "tensor") -> ModuleMap:
    """f_U: M_U -> N_U (or _U f for kind "hom"), acting value by value."""
    build = induce_tensor if kind == "tensor" else induce_hom
    mat = np.kron(np.eye(datum.index, dtype=INT), f.matrix)
    return ModuleMap(build(datum, f.source), build(datum, f.target), mat)


def kronecker_matrix(datum: QuotientDatum, m: GModule) -> np.ndarray:
    """sum beta ⊗ x_beta -> sum x_beta delta_beta as a 0/1 matrix.

    beta_b ⊗ e_k sits at b * rank + k of the tensor product; the function with
    value e_k at beta_b and 0 elsewhere sits at slot b * rank + k of _U M.
    """
    r, n = m.rank, datum.index * m.rank
    # tensor coordinate j holds beta_b ⊗ e_k
    b, k = np.divmod(np.arange(n), r)
    out = np.zeros((n, n), dtype=INT)
    out[b * r + k, np.arange(n)] = 1
    return out


def kronecker_iso(datum: QuotientDatum, m: GModule) -> ModuleMap:
    """The Kronecker map M_U -> _U M, checked against both group and Lambda actions."""
    source, target = induce_tensor(datum, m), induce_hom(datum, m)
    iso = ModuleMap(source, target, kronecker_matrix(datum, m))
    if not iso.commutes_with_lambda():
        raise ValidationError("Kronecker map does not respect the Lambda actions")
    return iso


def coset_projection(fine: QuotientDatum, coarse: QuotientDatum) -> np.ndarray:
    """P[c, b] = 1 iff the U-coset b lies in the V-coset c."""
    if fine.group != coarse.group or not coarse.contains(fine):
        raise NotNested("%s is not contained in %s" % (list(fine.normal), list(coarse.normal)))
    out = np.zeros((coarse.index, fine.index), dtype=INT)
    out[coarse.projection[fine.reps], np.arange(fine.index)] = 1
    return out


@dataclass
class TransitionMaps:
    pr_star_hom: ModuleMap
    tr_star_hom: ModuleMap
    pr_star_ten: ModuleMap
    tr_star_ten: ModuleMap
    index: int


def transition_maps(fine: QuotientDatum, coarse: QuotientDatum, m: GModule) -> TransitionMaps:
    """pr^*: _V M -> _U M, Tr^*: _U M -> _V M, pr_*: M_U -> M_V and Tr_*: M_V -> M_U for U ⊆ V."""
    p = coset_projection(fine, coarse)
    index = fine.index // coarse.index
    if ((p @ p.T) - index * np.eye(coarse.index, dtype=INT)).any():
        raise NotNested("pr o Tr is not multiplication by %d" % index)
    down = np.kron(p, np.eye(m.rank, dtype=INT))
    up = np.kron(p.T, np.eye(m.rank, dtype=INT))
    hom_u, hom_v = induce_hom(fine, m), induce_hom(coarse, m)
    ten_u, ten_v = induce_tensor(fine, m), induce_tensor(coarse, m)
    maps = TransitionMaps(ModuleMap(hom_v, hom_u, up), ModuleMap(hom_u, hom_v, down),
                          ModuleMap(ten_u, ten_v, down), ModuleMap(ten_v, ten_u, up), index)
    logger.debug("transition maps of index %d between levels of order %d and %d", index,
                 fine.index, coarse.index)
    return maps


def dfm_duality(datum: QuotientDatum, m: GModule) -> ModuleMap:
    """(M_U)^∨ -> (_U (M^∨))^iota, F -> (beta -> F(beta ⊗ -)); the identity in these coordinates."""
    source = dual_module(induce_tensor(datum, m))
    target = iota_twist(induce_hom(datum, dual_module(m)))
    iso = ModuleMap(source, target, np.eye(source.rank, dtype=INT))
    if not iso.commutes_with_lambda():
        raise ValidationError("duality map does not respect the Lambda actions")
    return iso


def check_dfm_naturality(datum: QuotientDatum, f: ModuleMap) -> bool:
    """duality_M o (f_U)^∨ = (_U f^∨)^iota o duality_N for f: M -> N."""
    left = compose(dfm_duality(datum, f.source), dual_map(induced_map(datum, f, "tensor")))
    hom_part = induced_map(datum, dual_map(f), "hom")
    right = compose(hom_part, dfm_duality(datum, f.target))
    return left.equals(right)


# towers

@dataclass
class TowerSpec:
    """Normal subgroups U_1 ⊇ U_2 ⊇ ... of one group; level k has the quotient G/U_k."""
    group: FiniteGroup
    levels: List[QuotientDatum]
    window: int = 1
    kind: str = "explicit"

    def __post_init__(self):
        if not self.levels:
            raise ValidationError("a tower needs at least one level")
        if self.window < 1:
            raise ValidationError("stabilization window must be positive, got %d" % self.window)
        for k in range(len(self.levels) - 1):
            coarse, fine = self.levels[k], self.levels[k + 1]
            if not coarse.contains(fine):
                raise NotNested("level %d subgroup is not inside level %d" % (k + 2, k + 1))

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, k: int) -> QuotientDatum:
        if not 1 <= k <= self.depth:
            raise LevelOutOfRange("level %d outside 1..%d" % (k, self.depth))
        return self.levels[k - 1]

    def surjection(self, k: int) -> np.ndarray:
        """G/U_{k+1} -> G/U_k as an array of images."""
        fine, coarse = self.level(k + 1), self.level(k)
        return coarse.projection[fine.reps]


def tower_from_subgroups(group: FiniteGroup, subgroups, window: int = 1) -> TowerSpec:
    return TowerSpec(group, [QuotientDatum(group, u) for u in subgroups], window)


def cyclic_p_tower(p: int, depth: int, window: int = 1, cfg=None) -> TowerSpec:
    """G = Z/p^depth with U_k = p^k Z/p^depth, so that level k is Z/p^k."""
    g = cyclic(p ** depth, cfg)
    subs = [tuple(range(0, p ** depth, p ** k)) for k in range(1, depth + 1)]
    t = TowerSpec(g, [QuotientDatum(g, u) for u in subs], window, kind="cyclic_p_tower")
    return t


@dataclass
class LevelValue:
    level: int
    module: GModule
    transition: Optional[ModuleMap]


def f_gamma_level(t: TowerSpec, m: GModule, k: int) -> LevelValue:
    """_U_k M with the colimit transition pr^*: _U_k M -> _U_{k+1} M (None at the top)."""
    datum = t.level(k)
    transition = None
    if k < t.depth:
        transition = transition_maps(t.level(k + 1), datum, m).pr_star_hom
    return LevelValue(k, induce_hom(datum, m), transition)


def ff_gamma_level(t: TowerSpec, m: GModule, k: int) -> LevelValue:
    """M_U_k with the limit transition pr_*: M_U_{k+1} -> M_U_k (None at the top)."""
    datum = t.level(k)
    transition = None
    if k < t.depth:
        transition = transition_maps(t.level(k + 1), datum, m).pr_star_ten
    return LevelValue(k, induce_tensor(datum, m), transition)


@dataclass
class TowerReport:
    kind: str
    degree: int
    window: int
    levels: List[FinAb] = field(default_factory=list)
    image_orders: List[int] = field(default_factory=list)
    stabilized_at: Optional[int] = None
    value: Optional[FinAb] = None
    cofinality_assumed: bool = True
    checks: dict = field(default_factory=dict)

    @property
    def stabilized(self) -> bool:
        return self.stabilized_at is not None


def _image(mat: np.ndarray, source: Subquotient, target: Subquotient) -> Subquotient:
    gens = np.asarray(mat, dtype=INT).T.reshape(len(source.exps), len(target.exps))
    return Subquotient(gens, target.exps, np.zeros((0, len(target.exps)), dtype=INT), target.ring)


def _stabilize(report: TowerReport, groups: List[Subquotient], maps: List[np.ndarray], forward: bool):
    """Find the least k whose window of composable transitions has constant image orders.

    ``maps[j]`` joins levels j and j + 1 (0-based), pointing up when ``forward``.
    """
    w = report.window
    ring = groups[0].ring

    def order(j):
        src, tgt = (groups[j], groups[j + 1]) if forward else (groups[j + 1], groups[j])
        return image_order(maps[j], src.exps, tgt.exps, ring) if len(src.exps) and len(tgt.exps) else 1

    def pair_order(j):
        # t_{j+1} t_j (colimit) or s_j s_{j+1} (limit)
        if forward:
            src, tgt, mat = groups[j], groups[j + 2], maps[j + 1] @ maps[j]
        else:
            src, tgt, mat = groups[j + 2], groups[j], maps[j] @ maps[j + 1]
        return image_order(mat, src.exps, tgt.exps, ring) if len(src.exps) and len(tgt.exps) else 1

    report.image_orders = [order(j) for j in range(len(maps))]
    for k in range(len(maps) - w):
        if all(pair_order(j) == report.image_orders[j] == report.image_orders[j + 1] for j in range(k, k + w)):
            report.stabilized_at = k + 1
            src, tgt = (groups[k], groups[k + 1]) if forward else (groups[k + 1], groups[k])
            report.value = _image(maps[k], src, tgt).invariants
            logger.info("%s of H^%d stabilized at level %d: %s", report.kind, report.degree, k + 1, report.value)
            return report
    raise NotStabilized("no window of %d stable transitions among %d levels" % (w, len(groups)), report)


def _between_fixed_points(m: GModule, coarse: QuotientDatum, fine: QuotientDatum):
    """M^{U_k} and M^{U_{k+1}} as modules of their quotients, with the inclusion between them."""
    fixed_c, incl_c, _ = _fixed_submodule(m, coarse.normal)
    fixed_f, incl_f, sq_f = _fixed_submodule(m, fine.normal)
    mat = sq_f.coords(incl_c.T).reshape(fixed_c.rank, fixed_f.rank).T if fixed_c.rank else \
        np.zeros((fixed_f.rank, 0), dtype=INT)
    return fixed_c, fixed_f, mat


def _over_quotient(fixed: GModule, datum: QuotientDatum) -> GModule:
    action = None if fixed.lazy_trivial else fixed.action[datum.reps]
    return GModule(fixed.ring, fixed.exps, datum.quotient, action, check=False)


def tower_colim_cohomology(t: TowerSpec, m: GModule, i: int, cfg=None) -> TowerReport:
    """colim_k H^i(G/U_k, M^{U_k}) along inflation, read off by stabilization."""
    report = TowerReport("colim", i, t.window, cofinality_assumed=t.kind == "explicit")
    groups, maps, complexes = [], [], []
    for k in range(1, t.depth + 1):
        fixed, _, _ = _fixed_submodule(m, t.level(k).normal)
        cx = CochainComplex(t.level(k).quotient, _over_quotient(fixed, t.level(k)), i + 1, cfg)
        complexes.append(cx)
        groups.append(cx.cohomology(i))
        report.levels.append(groups[-1].invariants)
    for k in range(1, t.depth):
        fixed_c, fixed_f, incl = _between_fixed_points(m, t.level(k), t.level(k + 1))
        inf = compatible_pair_map(complexes[k - 1], complexes[k], t.surjection(k), incl)
        maps.append(inf.induced(i))
    logger.debug("colimit levels: %s", [str(h) for h in report.levels])
    return _stabilize(report, groups, maps, forward=True)


def tower_lim_cohomology(g: FiniteGroup, modules: List[GModule], transitions: List[ModuleMap], i: int,
                         window: int = 1, cfg=None) -> TowerReport:
    """lim_k H^i(G, M_k) for surjections transitions[k]: M_{k+1} -> M_k."""
    if len(transitions) != len(modules) - 1:
        raise ValidationError("%d modules need %d transitions, got %d"
                              % (len(modules), len(modules) - 1, len(transitions)))
    report = TowerReport("lim", i, window, cofinality_assumed=False)
    complexes = [CochainComplex(g, mod, i + 1, cfg) for mod in modules]
    groups = [cx.cohomology(i) for cx in complexes]
    report.levels = [h.invariants for h in groups]
    maps = []
    for k, f in enumerate(transitions):
        if image_order(f.matrix, f.source.exps, f.target.exps, f.source.ring) != f.target.order:
            raise ValidationError("transition %d of the module tower is not surjective" % (k + 1))
        maps.append(cochain_map(f, complexes[k + 1], complexes[k]).induced(i))
    return _stabilize(report, groups, maps, forward=False)


def cyclic_module_tower(ring: RingSpec, g: FiniteGroup, depth: int):
    """M_k = Z/p^k with trivial action and reduction maps, k = 1..depth."""
    if depth > ring.e:
        raise ValidationError("Z/p^%d does not fit in %s" % (depth, ring))
    modules = [trivial_module(ring, (k,), g) for k in range(1, depth + 1)]
    transitions = [ModuleMap(modules[k + 1], modules[k], [[1]]) for k in range(depth - 1)]
    return modules, transitions


def iwasawa_cohomology(t: TowerSpec, m: GModule, j: int, cfg=None) -> TowerReport:
    """lim_k H^j(G, M_{U_k}) along pr_*, each level checked against H^j(U_k, M) by Shapiro."""
    report = TowerReport("iwasawa", j, t.window, cofinality_assumed=t.kind == "explicit")
    complexes, groups, shapiro = [], [], {}
    for k in range(1, t.depth + 1):
        datum = t.level(k)
        cx = CochainComplex(t.group, induce_tensor(datum, m), j + 1, cfg)
        complexes.append(cx)
        groups.append(cx.cohomology(j))
        report.levels.append(groups[-1].invariants)
        sh = shapiro_map(t.group, datum.normal, m, j + 1, cfg)
        shapiro[k] = is_quasi_iso(sh, range(0, j + 1)).ok
    report.checks["shapiro"] = shapiro
    maps = []
    for k in range(1, t.depth):
        pr = transition_maps(t.level(k + 1), t.level(k), m).pr_star_ten
        maps.append(cochain_map(pr, complexes[k], complexes[k - 1]).induced(j))
    if not all(shapiro.values()):
        logger.warning("Shapiro comparison failed at levels %s", [k for k, ok in shapiro.items() if not ok])
    return _stabilize(report, groups, maps, forward=False)
