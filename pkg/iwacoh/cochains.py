"""Inhomogeneous cochains of finite groups.

C^j(G, M) is the group of functions G^j -> M.  A cochain is stored as a
flat vector: the value at the tuple (g_1, ..., g_j) occupies the
coordinates ``t * rank(M) .. t * rank(M) + rank(M) - 1`` where t is the
tuple read as a base-|G| number with g_1 most significant.

Complexes of coefficients are handled through the total complex of the
double complex C^j(G, X^i) with differential ``d_X + (-1)^i delta``.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Union

import numpy as np

from .complexes import (ChainMap, Complex, Homotopy, LongExactSequence,
                        ShortExactSequence, blockwise_map, concentrated,
                        identity, long_exact_sequence, tensor_complex,
                        total_complex, _place, _zeros)
from .config import DEFAULT_CONFIG
from .errors import (CapExceeded, IncompatiblePairings, NotAChainMap,
                     NotAHomotopy, ValidationError)
from .groups import FiniteGroup, trivial
from .linalg import INT, RingSpec
from .modules import (GModule, ModuleMap, check_pairing, identity_coset_projection,
                      induced_module, pullback_module, tensor_mod)

logger = logging.getLogger(__name__)

Coefficients = Union[GModule, Complex]


def as_complex(m: Coefficients) -> Complex:
    return concentrated(m, 0) if isinstance(m, GModule) else m


def tuples(n: int, j: int) -> np.ndarray:
    """All j-tuples of 0..n-1 in cochain order, one per row."""
    if j == 0:
        return np.zeros((1, 0), dtype=INT)
    grid = np.indices((n,) * j).reshape(j, -1).T
    return grid.astype(INT)


def tuple_index(arr: np.ndarray, n: int) -> np.ndarray:
    arr = np.asarray(arr, dtype=INT)
    out = np.zeros(arr.shape[0], dtype=INT)
    for col in range(arr.shape[1]):
        out = out * n + arr[:, col]
    return out


def tuple_products(g: FiniteGroup, arr: np.ndarray) -> np.ndarray:
    out = np.zeros(arr.shape[0], dtype=INT)
    for col in range(arr.shape[1]):
        out = g.table[out, arr[:, col]]
    return out


def _plain(ring: RingSpec, exps) -> GModule:
    return GModule(ring, tuple(exps), trivial(), check=False)


def _check_degree(i: int, cfg, what: str = "cochain degree"):
    if i > cfg.degree_cap + 1:
        raise CapExceeded("%s %d exceeds the cap %d" % (what, i, cfg.degree_cap))


@dataclass
class Cochain:
    """A single inhomogeneous cochain G^degree -> module."""
    group: FiniteGroup
    module: GModule
    degree: int
    table: np.ndarray

    def __post_init__(self):
        size = self.group.order ** self.degree
        self.table = np.asarray(self.table, dtype=INT).reshape(size, self.module.rank) % self.module.orders

    @classmethod
    def from_vector(cls, group, module, degree, vector):
        return cls(group, module, degree, np.asarray(vector, dtype=INT))

    @classmethod
    def from_function(cls, group, module, degree, fn):
        rows = [fn(*t) for t in itertools.product(range(group.order), repeat=degree)]
        return cls(group, module, degree, np.array(rows, dtype=INT))

    @property
    def vector(self) -> np.ndarray:
        return self.table.reshape(-1)

    def __call__(self, *elems) -> np.ndarray:
        if len(elems) != self.degree:
            raise ValidationError("cochain of degree %d evaluated at %d elements" % (self.degree, len(elems)))
        return self.table[int(tuple_index(np.array([elems], dtype=INT).reshape(1, -1), self.group.order)[0])]

    def __str__(self):
        return format_cochain(self)


def format_cochain(c: Cochain) -> str:
    """Nonzero values as ``(g1,g2)->[x1,x2]``, in tuple order; ``0`` for the zero cochain."""
    parts = []
    for t, row in zip(itertools.product(range(c.group.order), repeat=c.degree), c.table):
        if row.any():
            parts.append("(%s)->[%s]" % (",".join(str(x) for x in t), ",".join(str(int(v)) for v in row)))
    return " ".join(parts) if parts else "0"


# the bar resolution

@dataclass
class BarResolution:
    """Free Z[G]-modules X_k on symbols (g_1, ..., g_k) as integer matrices.

    The Z-basis element h.(g_1, ..., g_k) has index h * |G|^k + t with t the
    tuple index.  ``boundary[k]`` is X_k -> X_{k-1} (k >= 1), ``augmentation``
    is X_0 -> Z and ``homotopy[k]`` the contraction X_k -> X_{k+1},
    h.(g) -> (h, g).
    """
    group: FiniteGroup
    n_max: int
    boundary: Dict[int, np.ndarray]
    augmentation: np.ndarray

    def rank(self, k: int) -> int:
        return self.group.order ** (k + 1)

    def homotopy(self, k: int) -> np.ndarray:
        out = np.zeros((self.rank(k + 1), self.rank(k)), dtype=INT)
        idx = np.arange(self.rank(k))
        out[idx, idx] = 1
        return out

    def check(self):
        """d d = 0 and d s + s d = id, which makes the resolution exact over Z."""
        eps, one = self.augmentation, np.ones((1, 1), dtype=INT)
        s_minus = np.zeros((self.rank(0), 1), dtype=INT)
        s_minus[0, 0] = 1
        if not np.array_equal(eps @ s_minus, one):
            raise ValidationError("augmentation does not split")
        for k in range(self.n_max):
            d_next = self.boundary[k + 1]
            lower = s_minus @ eps if k == 0 else self.homotopy(k - 1) @ self.boundary[k]
            total = d_next @ self.homotopy(k) + lower
            if not np.array_equal(total, np.eye(self.rank(k), dtype=INT)):
                raise ValidationError("contracting homotopy fails on X_%d" % k)
            prev = eps if k == 0 else self.boundary[k]
            if (prev @ d_next).any():
                raise ValidationError("boundary squares to a non-zero map at X_%d" % (k + 1))
        return self


def bar_resolution(g: FiniteGroup, n_max: int, cfg=None) -> BarResolution:
    cfg = cfg or DEFAULT_CONFIG
    _check_degree(n_max, cfg, "resolution length")
    n = g.order
    boundary = {}
    for k in range(1, n_max + 1):
        rows, cols = n ** k, n ** (k + 1)
        d = np.zeros((rows, cols), dtype=INT)
        h = np.repeat(np.arange(n, dtype=INT), n ** k)
        sym = np.tile(tuples(n, k), (n, 1))
        col = np.arange(cols)
        # h g_1 . (g_2, ..., g_k)
        np.add.at(d, (g.table[h, sym[:, 0]] * n ** (k - 1) + tuple_index(sym[:, 1:], n), col), 1)
        for i in range(1, k):
            merged = np.column_stack([sym[:, :i - 1], g.table[sym[:, i - 1], sym[:, i]], sym[:, i + 1:]])
            np.add.at(d, (h * n ** (k - 1) + tuple_index(merged, n), col), (-1) ** i)
        np.add.at(d, (h * n ** (k - 1) + tuple_index(sym[:, :k - 1], n), col), (-1) ** k)
        boundary[k] = d
    eps = np.ones((1, n), dtype=INT)
    logger.debug("bar resolution of %s up to X_%d", g.label, n_max)
    return BarResolution(g, n_max, boundary, eps)


def resolution_differential(res: BarResolution, m: GModule, k: int) -> np.ndarray:
    """delta: C^k -> C^{k+1} read off Hom_G(X_*, M): (delta c)(t) = c(d t)."""
    n, r = res.group.order, m.rank
    d = res.boundary[k + 1][:, :n ** (k + 1)].reshape(n, n ** k, n ** (k + 1))
    out = np.einsum("hst,hab->tasb", d, m.action)
    return out.reshape(n ** (k + 1) * r, n ** k * r) % np.tile(m.orders, n ** (k + 1))[:, None]


# cochain complexes

def cochain_differential(g: FiniteGroup, m: GModule, j: int) -> np.ndarray:
    """delta^j: C^j(G, M) -> C^{j+1}(G, M)."""
    n, r = g.order, m.rank
    t = tuples(n, j + 1)
    rows = np.arange(n ** (j + 1))
    d = np.zeros((n ** (j + 1), n ** j, r, r), dtype=INT)
    np.add.at(d, (rows, tuple_index(t[:, 1:], n)), m.action[t[:, 0]])
    eye = np.eye(r, dtype=INT)
    for i in range(1, j + 1):
        merged = np.column_stack([t[:, :i - 1], g.table[t[:, i - 1], t[:, i]], t[:, i + 1:]])
        np.add.at(d, (rows, tuple_index(merged, n)), (-1) ** i * eye)
    np.add.at(d, (rows, tuple_index(t[:, :j], n)), (-1) ** (j + 1) * eye)
    mat = d.transpose(0, 2, 1, 3).reshape(n ** (j + 1) * r, n ** j * r)
    return mat % np.tile(m.orders, n ** (j + 1))[:, None]


def cochain_term(g: FiniteGroup, m: GModule, j: int) -> GModule:
    return _plain(m.ring, m.exps * g.order ** j)


def pointwise(g_order: int, j: int, f: np.ndarray) -> np.ndarray:
    """A module map applied value by value on C^j."""
    return np.kron(np.eye(g_order ** j, dtype=INT), np.asarray(f, dtype=INT))


class CochainComplex(Complex):
    """C(G, X) for a bounded complex X, cochain degrees 0..top.

    Term n is the sum of C^j(G, X^i) with i + j = n, blocks keyed (i, j).
    Cohomology is exact in degrees up to ``reliable_top``.
    """

    def __init__(self, group: FiniteGroup, coefficients: Coefficients, top: int, cfg=None):
        cfg = cfg or DEFAULT_CONFIG
        _check_degree(top, cfg)
        x = as_complex(coefficients)
        if x.group != group:
            raise ValidationError("coefficients are modules for %s, not %s" % (x.group.label, group.label))
        self.coefficients = x
        self.top = top
        self.cochain_group = group
        ring = x.ring
        columns, horizontals = {}, {}
        for i in x.degrees():
            mod = x.term(i)
            columns[i] = Complex(ring, 0, top, {j: cochain_term(group, mod, j) for j in range(top + 1)},
                                 {j: cochain_differential(group, mod, j) for j in range(top)},
                                 check=False)
        for i in x.degrees():
            if i + 1 in columns:
                horizontals[i] = ChainMap(columns[i], columns[i + 1], {
                    j: pointwise(group.order, j, x.diff(i)) for j in range(top + 1)}, check=False)
        tot = total_complex(columns, horizontals, ring, trivial())
        Complex.__init__(self, ring, tot.lo, tot.hi, {n: tot.term(n) for n in tot.degrees()},
                         {n: tot.diff(n) for n in tot.degrees()}, group=trivial(),
                         layout=tot.layout, check=False)
        logger.debug("cochain complex of %s: ranks %s", group.label, [self.rank(n) for n in self.degrees()])

    @property
    def reliable_top(self) -> int:
        return self.coefficients.lo + self.top - 1

    def module_block(self, n: int, i: int):
        return self.block(n, (i, n - i))


def cochain_complex(g: FiniteGroup, m: Coefficients, top: int, cfg=None) -> CochainComplex:
    return CochainComplex(g, m, top, cfg)


def hypercochain(g: FiniteGroup, x: Complex, top: int, cfg=None) -> CochainComplex:
    return CochainComplex(g, x, top, cfg)


def _complex_for_degree(g, m, i, cfg):
    x = as_complex(m)
    return CochainComplex(g, x, max(i - x.lo + 1, 1), cfg)


def cochain_cohomology(g: FiniteGroup, m: Coefficients, i: int, cfg=None):
    """H^i(G, M) as invariant factors."""
    cfg = cfg or DEFAULT_CONFIG
    if i > cfg.degree_cap:
        raise CapExceeded("degree %d exceeds the cap %d" % (i, cfg.degree_cap))
    cx = _complex_for_degree(g, m, i, cfg)
    h = cx.cohomology(i).invariants
    logger.info("H^%d(%s, -) = %s", i, g.label, h)
    return h


def representative_cocycles(g: FiniteGroup, m: GModule, i: int, cfg=None) -> List[Cochain]:
    """Canonical cocycles of the generators of H^i(G, M), least in lexicographic order."""
    cfg = cfg or DEFAULT_CONFIG
    if i > cfg.degree_cap:
        raise CapExceeded("degree %d exceeds the cap %d" % (i, cfg.degree_cap))
    cx = _complex_for_degree(g, m, i, cfg)
    return [Cochain.from_vector(g, m, i, v) for v in cx.cohomology(i).basis()]


def canonical_cocycle(cx: CochainComplex, n: int, vector) -> np.ndarray:
    return cx.cohomology(n).canonical(vector)


# maps of cochain complexes

def compatible_pair_map(source: CochainComplex, target: CochainComplex, images, f) -> ChainMap:
    """c -> f o c o phi^n for phi: H -> G (images) and f a map of coefficient complexes."""
    g, h = source.cochain_group, target.cochain_group
    images = g.check_homomorphism(h, images)
    x, y = source.coefficients, target.coefficients
    if hasattr(f, "comp"):
        comp = f.comp
    elif isinstance(f, ModuleMap):
        comp = lambda i: f.matrix
    else:
        mats = np.asarray(f, dtype=INT)
        comp = lambda i: mats

    def rule(key, n):
        i, j = key
        mat = comp(i)
        if not mat.size:
            return None
        t = tuples(h.order, j)
        src = tuple_index(images[t], g.order)
        r_out, r_in = y.rank(i), x.rank(i)
        out = np.zeros((h.order ** j, r_out, g.order ** j, r_in), dtype=INT)
        out[np.arange(h.order ** j), :, src, :] = mat
        return key, out.reshape(h.order ** j * r_out, g.order ** j * r_in)
    return blockwise_map(source, target, rule)


def cochain_map(f, source: CochainComplex, target: CochainComplex) -> ChainMap:
    """f_* for a map of coefficients over one group."""
    g = source.cochain_group
    return compatible_pair_map(source, target, np.arange(g.order), f)


def restrict_coefficients(x: Coefficients, group: FiniteGroup, images) -> Coefficients:
    if isinstance(x, GModule):
        return pullback_module(x, group, images)
    return Complex(x.ring, x.lo, x.hi, {i: pullback_module(x.term(i), group, images) for i in x.degrees()},
                   {i: x.diff(i) for i in x.degrees()}, group=group, check=False)


def pullback(g: FiniteGroup, h: FiniteGroup, images, m: Coefficients, top: int, cfg=None):
    """phi^*: C(G, M) -> C(H, phi^* M) with its source and target complexes."""
    source = CochainComplex(g, m, top, cfg)
    target = CochainComplex(h, restrict_coefficients(m, h, images), top, cfg)
    x = source.coefficients
    return compatible_pair_map(source, target, images,
                               identity(x) if isinstance(m, Complex) else np.eye(x.rank(0), dtype=INT))


def restriction(g: FiniteGroup, u: Sequence[int], m: Coefficients, top: int, cfg=None) -> ChainMap:
    sub, inclusion = g.subgroup(u)
    return pullback(g, sub, inclusion, m, top, cfg)


def _fixed_submodule(m: GModule, normal: Sequence[int]):
    from .complexes import submodule
    sub_group, inclusion = m.group.subgroup(normal)
    restricted = pullback_module(m, sub_group, inclusion)
    return submodule(m, restricted.fixed_points())


def inflation(g: FiniteGroup, normal: Sequence[int], m: GModule, top: int, cfg=None) -> ChainMap:
    """inf: C(G/N, M^N) -> C(G, M)."""
    from .groups import quotient
    q, projection, reps = quotient(g, normal)
    fixed, incl, _ = _fixed_submodule(m, normal)
    fixed_q = GModule(m.ring, fixed.exps, q, None if fixed.lazy_trivial else fixed.action[reps], check=False)
    source = CochainComplex(q, fixed_q, top, cfg)
    target = CochainComplex(g, m, top, cfg)
    return compatible_pair_map(source, target, projection, incl)


def _right_coset_reps(g: FiniteGroup, u: Sequence[int], reps=None) -> np.ndarray:
    cosets = g.right_cosets(u)
    if reps is None:
        return np.array([c[0] for c in cosets], dtype=INT)
    reps = np.asarray(reps, dtype=INT)
    found = sorted(next(k for k, c in enumerate(cosets) if r in c) for r in reps)
    if found != list(range(len(cosets))):
        raise ValidationError("%s is not a set of right coset representatives" % list(reps))
    return reps


def corestriction(g: FiniteGroup, u: Sequence[int], m: Coefficients, top: int, reps=None, cfg=None) -> ChainMap:
    """cor: C(U, M) -> C(G, M).

    With right coset representatives rho of U\\G and u(tau) = tau rep(U tau)^-1,
    (cor c)(g_1..g_n) = sum_rho rho^-1 c(u_1, u_1^-1 u_2, ..., u_{n-1}^-1 u_n)
    where u_k = u(rho g_1 ... g_k).
    """
    u = g.check_subgroup(u)
    sub, inclusion = g.subgroup(u)
    to_sub = np.full(g.order, -1, dtype=INT)
    to_sub[inclusion] = np.arange(len(inclusion))
    rho = _right_coset_reps(g, u, reps)
    rep_of = np.empty(g.order, dtype=INT)
    for r in rho:
        rep_of[[int(g.table[x, r]) for x in u]] = r
    source = CochainComplex(sub, restrict_coefficients(m, sub, inclusion), top, cfg)
    target = CochainComplex(g, m, top, cfg)
    x = target.coefficients
    ubar = lambda tau: g.table[tau, g.inverse[rep_of[tau]]]

    def rule(key, n):
        i, j = key
        r = x.rank(i)
        act = x.term(i).action
        t = tuples(g.order, j)
        rows = np.arange(g.order ** j)
        out = np.zeros((g.order ** j, sub.order ** j, r, r), dtype=INT)
        for r0 in rho:
            prev = np.zeros(len(t), dtype=INT)
            running = np.full(len(t), r0, dtype=INT)
            args = []
            for k in range(j):
                running = g.table[running, t[:, k]]
                cur = ubar(running)
                args.append(to_sub[g.table[g.inverse[prev], cur]])
                prev = cur
            src = tuple_index(np.column_stack(args) if args else np.zeros((len(t), 0), dtype=INT), sub.order)
            np.add.at(out, (rows, src), np.broadcast_to(act[g.inverse[r0]], (len(t), r, r)))
        return key, out.transpose(0, 2, 1, 3).reshape(g.order ** j * r, sub.order ** j * r)
    return blockwise_map(source, target, rule)


def induce_coefficients(x: Coefficients, sub: Sequence[int]) -> Coefficients:
    if isinstance(x, GModule):
        return induced_module(x, sub)
    q = len(x.group.left_cosets(sub))
    return Complex(x.ring, x.lo, x.hi, {i: induced_module(x.term(i), sub) for i in x.degrees()},
                   {i: np.kron(np.eye(q, dtype=INT), x.diff(i)) for i in x.degrees()}, group=x.group)


def shapiro_map(g: FiniteGroup, u: Sequence[int], m: Coefficients, top: int, cfg=None) -> ChainMap:
    """sh: C(G, M_U) -> C(U, M), restriction to U followed by evaluation at the coset U."""
    u = g.check_subgroup(u)
    sub, inclusion = g.subgroup(u)
    x = as_complex(m)
    induced = induce_coefficients(x, u)
    source = CochainComplex(g, induced, top, cfg)
    target = CochainComplex(sub, restrict_coefficients(x, sub, inclusion), top, cfg)
    ev = {i: identity_coset_projection(x.term(i), u) for i in x.degrees()}
    return compatible_pair_map(source, target, inclusion, MatrixFamily(ev))


class MatrixFamily:
    """Per-degree matrices standing in for a chain map of coefficients."""

    def __init__(self, mats):
        self.mats = mats

    def comp(self, i):
        return self.mats.get(i, np.zeros((0, 0), dtype=INT))


def conjugation_map(g: FiniteGroup, m: Coefficients, sigma: int, top: int, cfg=None,
                    cx: CochainComplex = None) -> ChainMap:
    """kappa_sigma c(x_1..x_n) = sigma^-1 c(sigma x_1 sigma^-1, ..., sigma x_n sigma^-1)."""
    cx = cx or CochainComplex(g, m, top, cfg)
    x = cx.coefficients
    conj = np.array([g.conjugate(sigma, a) for a in range(g.order)], dtype=INT)
    inv = g.inverse[sigma]

    def rule(key, n):
        i, j = key
        r = x.rank(i)
        t = tuples(g.order, j)
        out = np.zeros((g.order ** j, r, g.order ** j, r), dtype=INT)
        out[np.arange(g.order ** j), :, tuple_index(conj[t], g.order), :] = x.term(i).action[inv]
        return key, out.reshape(g.order ** j * r, g.order ** j * r)
    return blockwise_map(cx, cx, rule)


def conjugation_homotopy(g: FiniteGroup, m: Coefficients, sigma: int, top: int, cfg=None,
                         cx: CochainComplex = None, check: bool = True) -> Homotopy:
    """h with kappa_sigma - id = delta h + h delta.

    h c(x_1..x_{n-1}) = sum_i (-1)^i c(x_1..x_i, sigma^-1, sigma x_{i+1} sigma^-1, ...);
    on hypercochains the block of X^i carries an extra (-1)^i.  The identity
    is checked up to the last reliable degree of the truncated complex.
    """
    cx = cx or CochainComplex(g, m, top, cfg)
    x = cx.coefficients
    conj = np.array([g.conjugate(sigma, a) for a in range(g.order)], dtype=INT)
    inv = int(g.inverse[sigma])

    def rule(key, n):
        i, j = key
        if j == 0:
            return None
        r = x.rank(i)
        t = tuples(g.order, j - 1)
        rows = np.arange(g.order ** (j - 1))
        out = np.zeros((g.order ** (j - 1), g.order ** j), dtype=INT)
        for k in range(j):
            args = np.column_stack([t[:, :k], np.full(len(t), inv, dtype=INT), conj[t[:, k:]]])
            np.add.at(out, (rows, tuple_index(args, g.order)), (-1) ** k)
        sign = -1 if i % 2 else 1
        return (i, j - 1), sign * np.kron(out, np.eye(r, dtype=INT))
    s = blockwise_map(cx, cx, rule, degree=-1)
    kappa = conjugation_map(g, m, sigma, top, cfg, cx)
    h = Homotopy(identity(cx), kappa, {n: s.comp(n) for n in s.degrees()}, check=False)
    return check_homotopy_below(h, cx.reliable_top) if check else h


def check_homotopy_below(h: Homotopy, top: int):
    """Verify a homotopy in total degrees up to top."""
    x = h.source_map.source
    for n in x.degrees():
        if n > top:
            break
        lhs = h.target_map.comp(n) - h.source_map.comp(n)
        rhs = x.diff(n - 1) @ h.comp(n) + h.comp(n + 1) @ x.diff(n)
        if ((lhs - rhs) % x.term(n).orders[:, None]).any():
            raise NotAHomotopy("kappa - id != delta h + h delta in degree %d" % n)
    return h


# cup products

def cup_matrix(g: FiniteGroup, left: GModule, right: GModule, pairing, i: int, j: int) -> np.ndarray:
    """C^i(G, N) ⊗ C^j(G, M) -> C^{i+j}(G, A) for a pairing N ⊗ M -> A.

    (a ∪ b)(s, t) = <a(s), (s_1 ... s_i) b(t)>; the columns are tensor
    coordinates x * dim C^j(M) + y.
    """
    p = pairing.matrix if isinstance(pairing, ModuleMap) else np.asarray(pairing, dtype=INT)
    m_n, m_m = left.rank, right.rank
    m_a = p.shape[0]
    s_i, s_j = g.order ** i, g.order ** j
    p3 = p.reshape(m_a, m_n, m_m)
    prods = tuple_products(g, tuples(g.order, i))
    w = np.einsum("ckl,slm->sckm", p3, right.action[prods])
    out = np.zeros((s_i, s_j, m_a, s_i, m_n, s_j, m_m), dtype=INT)
    ss = np.arange(s_i)[:, None]
    tt = np.arange(s_j)[None, :]
    out[ss, tt, :, ss, :, tt, :] = w[:, None]
    return out.reshape(s_i * s_j * m_a, s_i * m_n * s_j * m_m)


def cup(alpha: Cochain, beta: Cochain, pairing: ModuleMap) -> Cochain:
    if alpha.group != beta.group:
        raise ValidationError("cochains live on different groups")
    check_pairing(pairing)
    g = alpha.group
    prods = tuple_products(g, tuples(g.order, alpha.degree))
    acted = np.einsum("slm,tm->stl", beta.module.action[prods], beta.table)
    p3 = pairing.matrix.reshape(pairing.target.rank, alpha.module.rank, beta.module.rank)
    out = np.einsum("ckl,sk,stl->stc", p3, alpha.table, acted)
    return Cochain(g, pairing.target, alpha.degree + beta.degree,
                   out.reshape(-1, pairing.target.rank))


def pairing_chain_map(n: Complex, m: Complex, a: Complex, pairings: Dict) -> ChainMap:
    """The pairings P^{ab}: N^a ⊗ M^b -> A^{a+b} as one map N ⊗ M -> A, checked to be a chain map."""
    ten = tensor_complex(n, m)
    for (i, j), mat in pairings.items():
        src = tensor_mod(n.term(i), m.term(j))
        check_pairing(ModuleMap(src, a.term(i + j), np.asarray(mat, dtype=INT).reshape(a.rank(i + j), src.rank),
                                check=False))

    comps = {}
    for deg in ten.degrees():
        out = _zeros(a.rank(deg), ten.rank(deg))
        for key, off, size in ten.layout.get(deg, ()):
            if size and key in pairings and a.rank(deg):
                _place(out, (0, a.rank(deg)), (off, size), pairings[key])
        comps[deg] = out
    try:
        return ChainMap(ten, a, comps)
    except NotAChainMap as exc:
        raise IncompatiblePairings("pairings do not satisfy d<y, x> = <dy, x> + (-1)^a <y, dx>: %s" % exc)


def total_cup(g: FiniteGroup, n: Coefficients, m: Coefficients, a: Coefficients, pairings,
              top: int, cfg=None, check: bool = True) -> ChainMap:
    """C(G, N) ⊗ C(G, M) -> C(G, A) with the (i, b)-block carrying (-1)^(i b).

    ``pairings`` maps module degrees (a, b) to matrices N^a ⊗ M^b -> A^{a+b}; a
    single matrix is accepted for modules.  The three cochain complexes share
    the truncation ``top``, under which the result is an honest chain map.
    """
    nx, mx, ax = as_complex(n), as_complex(m), as_complex(a)
    if not isinstance(pairings, dict):
        pairings = {(nx.lo, mx.lo): pairings.matrix if isinstance(pairings, ModuleMap) else pairings}
    pairings = {k: np.asarray(v, dtype=INT) for k, v in pairings.items()}
    if check:
        pairing_chain_map(nx, mx, ax, pairings)
    cn, cm, ca = (CochainComplex(g, x, top, cfg) for x in (nx, mx, ax))
    ten = tensor_complex(cn, cm)
    comps = {}
    for deg in ten.degrees():
        out = _zeros(ca.rank(deg), ten.rank(deg))
        for (p, q), off, size in ten.layout.get(deg, ()):
            if not size:
                continue
            dim_q = cm.rank(q)
            for (ma, i), off_x, size_x in cn.layout.get(p, ()):
                for (mb, j), off_y, size_y in cm.layout.get(q, ()):
                    mat = pairings.get((ma, mb))
                    blk = ca.block(deg, (ma + mb, i + j))
                    if mat is None or blk is None or not size_x or not size_y or not blk[1]:
                        continue
                    cm_ij = cup_matrix(g, nx.term(ma), mx.term(mb), mat, i, j)
                    sign = -1 if (i * mb) % 2 else 1
                    cols = off + ((off_x + np.arange(size_x))[:, None] * dim_q
                                  + off_y + np.arange(size_y)[None, :]).reshape(-1)
                    out[blk[0]:blk[0] + blk[1], cols] += sign * cm_ij
        comps[deg] = out
    return ChainMap(ten, ca, comps, check=check)


def check_cup_naturality(cup_map: ChainMap, cup_prime: ChainMap, f_star: ChainMap, g_star: ChainMap):
    """Check cup o (f_* ⊗ 1) = cup' o (1 ⊗ g_*) on C(N') ⊗ C(M).

    cup: C(N) ⊗ C(M) -> C(A); cup': C(N') ⊗ C(M') -> C(A); f_*: C(N') -> C(N);
    g_*: C(M) -> C(M').
    """
    from .complexes import compose, tensor_chain_map
    source = tensor_complex(f_star.source, g_star.source)
    left = compose(cup_map, tensor_chain_map(f_star, identity(g_star.source), source, cup_map.source))
    right = compose(cup_prime, tensor_chain_map(identity(f_star.source), g_star, source, cup_prime.source))
    for deg in left.degrees():
        orders = cup_map.target.term(deg).orders[:, None]
        if ((left.comp(deg) - right.comp(deg)) % orders).any():
            raise IncompatiblePairings("cup naturality square fails in degree %d" % deg)
    return True


# exact sequences of coefficients

def cochain_les(g: FiniteGroup, i_map, p_map, lo: int = 0, hi: int = None, cfg=None) -> LongExactSequence:
    """The long exact cohomology sequence of 0 -> A -> B -> C -> 0.

    The maps are ModuleMaps or ChainMaps of coefficient complexes.
    """
    cfg = cfg or DEFAULT_CONFIG
    hi = cfg.degree_cap if hi is None else hi
    if hi > cfg.degree_cap:
        raise CapExceeded("degree %d exceeds the cap %d" % (hi, cfg.degree_cap))
    a, b, c = i_map.source, i_map.target, p_map.target
    a0 = as_complex(a).lo
    top = hi - a0 + 1 if isinstance(a, Complex) else hi + 1
    ca, cb, cc = (CochainComplex(g, x, top, cfg) for x in (a, b, c))
    ses = ShortExactSequence(cochain_map(i_map, ca, cb), cochain_map(p_map, cb, cc))
    return long_exact_sequence(ses, lo, hi)
