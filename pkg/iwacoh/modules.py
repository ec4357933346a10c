"""Finite modules over Z/p^e with a group action, and their maps.

A GModule is a group in cyclic coordinates (``exps``) together with one
matrix per group element.  Modules that also carry the action of a finite
quotient Gamma/U of an Iwasawa algebra record it as separate left and right
actions (``lambda_left``, ``lambda_right``), with no balance assumption.
"""
import logging
from typing import Optional, Sequence

import numpy as np

from .errors import NoLambdaAction, NonEquivariantPairing, ValidationError
from .groups import CosetSpace, FiniteGroup, trivial
from .linalg import INT, RingSpec, check_map, kernel, reduce_vectors

logger = logging.getLogger(__name__)


def _check_action(ring, exps, group, mats, what, anti=False):
    n = len(exps)
    mats = np.asarray(mats, dtype=INT).reshape(group.order, n, n)
    mats = np.stack([check_map(mats[g], exps, exps, ring) for g in range(group.order)]) \
        if n else mats
    orders = ring.orders(exps)[None, None, :, None]
    if n and ((mats[0] - np.eye(n, dtype=INT)) % ring.orders(exps)[:, None]).any():
        raise ValidationError("%s of the identity element is not the identity matrix" % what)
    if n:
        prods = np.einsum("aij,bjk->abik", mats, mats) % orders
        expected = mats[group.table.T] if anti else mats[group.table]
        bad = (prods - expected) % orders
        if bad.any():
            a, b = (int(k) for k in np.argwhere(bad.any(axis=(2, 3)))[0])
            raise ValidationError(
                "%s is not compatible with the group law at (%d, %d): "
                "action(%d) action(%d) != action(%d)"
                % (what, a, b, a, b, group.table[b, a] if anti else group.table[a, b]))
    return mats


class GModule:
    """A finite Z/p^e-module in cyclic coordinates with a matrix action of ``group``."""

    def __init__(self, ring: RingSpec, exps: Sequence[int], group: FiniteGroup = None,
                 action=None, lambda_group: Optional[FiniteGroup] = None,
                 lambda_left=None, lambda_right=None, label: Optional[str] = None,
                 check: bool = True):
        self.ring = ring
        self.exps = tuple(int(a) for a in exps)
        if any(a < 1 or a > ring.e for a in self.exps):
            raise ValidationError("cyclic exponents %s must lie in 1..%d" % (self.exps, ring.e))
        self.group = group if group is not None else trivial()
        n = len(self.exps)
        if action is not None:
            if check:
                action = _check_action(ring, self.exps, self.group, action, "group action")
            action = np.array(action, dtype=INT).reshape(self.group.order, n, n)
        # None stands for the trivial action and is only materialized on request
        self._action = action
        self.lambda_group = lambda_group
        self.lambda_left = None
        self.lambda_right = None
        if lambda_left is not None or lambda_right is not None:
            if lambda_group is None:
                raise ValidationError("lambda actions need a lambda_group")
        if lambda_left is not None:
            self.lambda_left = np.array(
                _check_action(ring, self.exps, lambda_group, lambda_left, "left Lambda action")
                if check else lambda_left, dtype=INT).reshape(lambda_group.order, n, n)
        if lambda_right is not None:
            self.lambda_right = np.array(
                _check_action(ring, self.exps, lambda_group, lambda_right, "right Lambda action", anti=True)
                if check else lambda_right, dtype=INT).reshape(lambda_group.order, n, n)
        self.label = label

    @property
    def action(self) -> np.ndarray:
        if self._action is None:
            n = self.rank
            return np.broadcast_to(np.eye(n, dtype=INT), (self.group.order, n, n))
        return self._action

    @property
    def lazy_trivial(self) -> bool:
        return self._action is None

    @property
    def rank(self) -> int:
        return len(self.exps)

    @property
    def order(self) -> int:
        return self.ring.p ** sum(self.exps)

    @property
    def orders(self) -> np.ndarray:
        return self.ring.orders(self.exps)

    def __repr__(self):
        return "GModule(%s, exps=%s, group=%s)" % (self.ring, self.exps, self.group.label)

    def has_lambda(self) -> bool:
        return self.lambda_group is not None

    def same_as(self, other: "GModule") -> bool:
        """Equality of coordinates and of every recorded action."""
        def same(a, b):
            if a is None or b is None:
                return a is None and b is None
            return a.shape == b.shape and not ((a - b) % self.orders[:, None]).any()
        return (self.ring == other.ring and self.exps == other.exps
                and self.group == other.group and same(self.action, other.action)
                and self.lambda_group == other.lambda_group
                and same(self.lambda_left, other.lambda_left)
                and same(self.lambda_right, other.lambda_right))

    def is_trivial(self) -> bool:
        if self._action is None:
            return True
        return not ((self.action - np.eye(self.rank, dtype=INT)) % self.orders[:, None]).any()

    def is_balanced(self) -> bool:
        """True when the left and right Lambda actions agree."""
        if self.lambda_left is None or self.lambda_right is None:
            raise NoLambdaAction("module records no two-sided Lambda action")
        return not ((self.lambda_left - self.lambda_right) % self.orders[:, None]).any()

    def lambda_commutes_with_group(self) -> bool:
        for lam in (self.lambda_left, self.lambda_right):
            if lam is None:
                continue
            lhs = np.einsum("gij,ljk->glik", self.action, lam)
            rhs = np.einsum("lij,gjk->glik", lam, self.action)
            if ((lhs - rhs) % self.orders[:, None]).any():
                return False
        return True

    def fixed_points(self) -> np.ndarray:
        """Generators of M^G."""
        n = self.rank
        stacked = (self.action - np.eye(n, dtype=INT)[None]).reshape(self.group.order * n, n)
        return kernel(stacked, self.exps, self.exps * self.group.order, self.ring)

    def reduce(self, x) -> np.ndarray:
        return reduce_vectors(x, self.exps, self.ring)


def plain_module(ring: RingSpec, exps: Sequence[int], label=None) -> GModule:
    return GModule(ring, exps, trivial(), label=label)


def trivial_module(ring: RingSpec, exps: Sequence[int], group: FiniteGroup, label=None) -> GModule:
    return GModule(ring, exps, group, label=label)


def unit_module(ring: RingSpec, group: FiniteGroup = None) -> GModule:
    """Z/p^e with trivial action."""
    return GModule(ring, (ring.e,), group)


class ModuleMap:
    """A G-equivariant map, as a (target, source) matrix."""

    def __init__(self, source: GModule, target: GModule, matrix, check: bool = True):
        if source.ring != target.ring:
            raise ValidationError("maps must stay over one coefficient ring")
        self.source = source
        self.target = target
        matrix = np.asarray(matrix, dtype=INT).reshape(target.rank, source.rank)
        if check:
            if source.group != target.group:
                raise ValidationError("source and target carry different groups")
            matrix = check_map(matrix, source.exps, target.exps, source.ring)
        if check and not (source.lazy_trivial and target.lazy_trivial):
            lhs = np.einsum("ij,gjk->gik", matrix, source.action)
            rhs = np.einsum("gij,jk->gik", target.action, matrix)
            bad = (lhs - rhs) % target.orders[None, :, None]
            if bad.any():
                g = int(np.argwhere(bad.any(axis=(1, 2)))[0][0])
                raise ValidationError("map does not commute with the action of element %d" % g)
        self.matrix = matrix % target.orders[:, None]

    def __call__(self, x) -> np.ndarray:
        return np.asarray(x, dtype=INT) @ self.matrix.T % self.target.orders

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.matrix + other.matrix, check=False)

    def __neg__(self) -> "ModuleMap":
        return ModuleMap(self.source, self.target, -self.matrix, check=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "ModuleMap":
        return ModuleMap(self.source, self.target, c * self.matrix, check=False)

    def is_zero(self) -> bool:
        return not self.matrix.any()

    def equals(self, other: "ModuleMap") -> bool:
        return not ((self.matrix - other.matrix) % self.target.orders[:, None]).any()

    def commutes_with_lambda(self) -> bool:
        for side in ("lambda_left", "lambda_right"):
            a, b = getattr(self.source, side), getattr(self.target, side)
            if a is None or b is None:
                continue
            lhs = np.einsum("ij,gjk->gik", self.matrix, a)
            rhs = np.einsum("gij,jk->gik", b, self.matrix)
            if ((lhs - rhs) % self.target.orders[None, :, None]).any():
                return False
        return True


def compose(g: ModuleMap, f: ModuleMap) -> ModuleMap:
    """g after f."""
    return ModuleMap(f.source, g.target, g.matrix @ f.matrix, check=False)


def identity_map(m: GModule) -> ModuleMap:
    return ModuleMap(m, m, np.eye(m.rank, dtype=INT), check=False)


def zero_map(source: GModule, target: GModule) -> ModuleMap:
    return ModuleMap(source, target, np.zeros((target.rank, source.rank), dtype=INT), check=False)


def pullback_module(m: GModule, source: FiniteGroup, images) -> GModule:
    """phi^* M for a homomorphism phi: H -> G given by its images."""
    images = m.group.check_homomorphism(source, images)
    action = None if m.lazy_trivial else m.action[images]
    return GModule(m.ring, m.exps, source, action, check=False, label=m.label)


def restrict_module(m: GModule, sub: Sequence[int]) -> GModule:
    h, inclusion = m.group.subgroup(sub)
    return pullback_module(m, h, inclusion)


def with_group(m: GModule, group: FiniteGroup, action) -> GModule:
    return GModule(m.ring, m.exps, group, action, label=m.label)


def direct_sum(*mods: GModule):
    """M_1 ⊕ ... ⊕ M_k with the inclusion and projection maps."""
    if not mods:
        raise ValidationError("direct sum of no modules")
    ring, group = mods[0].ring, mods[0].group
    exps = sum((m.exps for m in mods), ())
    n = len(exps)
    offsets = np.cumsum([0] + [m.rank for m in mods])
    action = None
    if not all(m.lazy_trivial for m in mods):
        action = np.zeros((group.order, n, n), dtype=INT)
        for m, a in zip(mods, offsets):
            action[:, a:a + m.rank, a:a + m.rank] = m.action
    total = GModule(ring, exps, group, action, check=False)
    incs, projs = [], []
    for m, a in zip(mods, offsets):
        block = np.zeros((n, m.rank), dtype=INT)
        block[a:a + m.rank] = np.eye(m.rank, dtype=INT)
        incs.append(ModuleMap(m, total, block, check=False))
        projs.append(ModuleMap(total, m, block.T.copy(), check=False))
    return total, incs, projs


# tensor products

def tensor_exps(a_exps, b_exps):
    return tuple(min(a, b) for a in a_exps for b in b_exps)


def kron_reduce(f, g, src, tgt, ring):
    """Matrix of f ⊗ g between tensor coordinates."""
    return check_map(np.kron(f, g), src, tgt, ring)


def tensor_mod(m: GModule, n: GModule) -> GModule:
    """M ⊗ N with coordinate (i, j) at i * rank(N) + j and the diagonal action."""
    if m.group != n.group:
        raise ValidationError("tensor factors carry different groups")
    exps = tensor_exps(m.exps, n.exps)
    if m.lazy_trivial and n.lazy_trivial:
        return GModule(m.ring, exps, m.group, check=False)
    action = np.einsum("gij,gkl->gikjl", m.action, n.action).reshape(m.group.order, len(exps), len(exps))
    return GModule(m.ring, exps, m.group, action % m.ring.orders(exps)[:, None], check=False)


def tensor_map(f: ModuleMap, g: ModuleMap, source: GModule = None, target: GModule = None) -> ModuleMap:
    source = source or tensor_mod(f.source, g.source)
    target = target or tensor_mod(f.target, g.target)
    return ModuleMap(source, target, kron_reduce(f.matrix, g.matrix, source.exps, target.exps, source.ring),
                     check=False)


# Hom modules

def hom_exps(src_exps, tgt_exps):
    return tuple(min(a, b) for b in tgt_exps for a in src_exps)


def hom_scales(src_exps, tgt_exps, ring) -> np.ndarray:
    """scale[j, i] = p^max(0, b_j - a_i): the image of 1 under the generator of Hom(Z/p^a, Z/p^b)."""
    a = np.asarray(src_exps, dtype=INT)[None, :]
    b = np.asarray(tgt_exps, dtype=INT)[:, None]
    return ring.p ** np.maximum(0, b - a).astype(INT)


def hom_to_matrix(coords, src_exps, tgt_exps, ring) -> np.ndarray:
    """The (target, source) matrix of a Hom element given in Hom coordinates."""
    coords = np.asarray(coords, dtype=INT)
    shape = coords.shape[:-1] + (len(tgt_exps), len(src_exps))
    return coords.reshape(shape) * hom_scales(src_exps, tgt_exps, ring) % ring.orders(tgt_exps)[:, None]


def matrix_to_hom(matrix, src_exps, tgt_exps, ring) -> np.ndarray:
    """Hom coordinates of a valid map matrix (leading axes are batch axes)."""
    matrix = np.asarray(matrix, dtype=INT) % ring.orders(tgt_exps)[:, None]
    scales = hom_scales(src_exps, tgt_exps, ring)
    if (matrix % scales).any():
        raise ValidationError("matrix does not define a homomorphism of the given orders")
    coords = (matrix // scales) % ring.orders(hom_exps(src_exps, tgt_exps)).reshape(scales.shape)
    return coords.reshape(matrix.shape[:-2] + (len(src_exps) * len(tgt_exps),))


def hom_matrix(f, g, f_src, f_tgt, g_src, g_tgt, ring) -> np.ndarray:
    """Matrix of phi -> g phi f from Hom(f_tgt, g_src) to Hom(f_src, g_tgt).

    f: f_src -> f_tgt and g: g_src -> g_tgt are plain matrices.
    """
    f = np.asarray(f, dtype=INT).reshape(len(f_tgt), len(f_src))
    g = np.asarray(g, dtype=INT).reshape(len(g_tgt), len(g_src))
    scale = hom_scales(f_tgt, g_src, ring)
    # images[J, I, j, i] = g[J, j] * scale[j, i] * f[i, I]
    images = np.einsum("Jj,ji,iI->jiJI", g, scale, f)
    images = images.reshape(-1, len(g_tgt), len(f_src))
    out = matrix_to_hom(images, f_src, g_tgt, ring)
    return out.T.copy()


def hom_mod(m: GModule, n: GModule) -> GModule:
    """Hom(M, N) with (sigma phi) = N(sigma) phi M(sigma^-1); coordinate (j, i) at j * rank(M) + i."""
    if m.group != n.group:
        raise ValidationError("Hom arguments carry different groups")
    ring, group = m.ring, m.group
    exps = hom_exps(m.exps, n.exps)
    if m.lazy_trivial and n.lazy_trivial:
        return GModule(ring, exps, group, check=False)
    action = np.stack([
        hom_matrix(m.action[group.inverse[g]], n.action[g], m.exps, m.exps, n.exps, n.exps, ring)
        for g in range(group.order)
    ]) if exps else np.zeros((group.order, 0, 0), dtype=INT)
    return GModule(ring, exps, group, action, check=False)


def hom_map(f: ModuleMap, g: ModuleMap, source: GModule = None, target: GModule = None) -> ModuleMap:
    """Hom(f, g): Hom(M, N) -> Hom(M', N'), phi -> g phi f, for f: M' -> M and g: N -> N'."""
    source = source or hom_mod(f.target, g.source)
    target = target or hom_mod(f.source, g.target)
    mat = hom_matrix(f.matrix, g.matrix, f.source.exps, f.target.exps, g.source.exps, g.target.exps,
                     f.source.ring)
    return ModuleMap(source, target, mat, check=False)


def evaluation_pairing(m: GModule) -> ModuleMap:
    """<f, x> = f(x) as a map M^∨ ⊗ M -> Z/p^e."""
    ring = m.ring
    dual = dual_module(m)
    n = m.rank
    row = np.zeros((1, n * n), dtype=INT)
    for k, a in enumerate(m.exps):
        row[0, k * n + k] = ring.p ** (ring.e - a)
    return ModuleMap(tensor_mod(dual, m), unit_module(ring, m.group), row, check=False)


def dual_module(m: GModule) -> GModule:
    """Hom(M, Z/p^e) with (sigma f)(x) = f(sigma^-1 x)."""
    dual = hom_mod(m, unit_module(m.ring, m.group))
    dual.label = "%s^" % m.label if m.label else None
    if m.lambda_group is not None:
        # the dual of a left action is a right action and vice versa
        unit = (m.ring.e,)

        def transpose(mats):
            if mats is None:
                return None
            return np.stack([hom_matrix(a, np.eye(1, dtype=INT), m.exps, m.exps, unit, unit, m.ring)
                             for a in mats])
        dual = GModule(m.ring, dual.exps, m.group, dual._action, m.lambda_group,
                       lambda_left=transpose(m.lambda_right), lambda_right=transpose(m.lambda_left),
                       label=dual.label, check=False)
    return dual


def pontryagin_dual(m: GModule):
    """The dual module together with its evaluation pairing."""
    return dual_module(m), evaluation_pairing(m)


def dual_map(f: ModuleMap) -> ModuleMap:
    """f^∨: N^∨ -> M^∨ for f: M -> N."""
    unit = unit_module(f.source.ring, f.source.group)
    return hom_map(f, identity_map(unit), dual_module(f.target), dual_module(f.source))


def double_dual_map(m: GModule) -> ModuleMap:
    """The canonical M -> (M^∨)^∨; the identity in these coordinates."""
    return ModuleMap(m, dual_module(dual_module(m)), np.eye(m.rank, dtype=INT), check=False)


# Lambda-level structure

def iota_twist(m: GModule) -> GModule:
    """Precompose the Lambda-level actions with gamma -> gamma^-1, swapping sides."""
    if m.lambda_group is None:
        raise NoLambdaAction("module carries no Lambda-level action to twist")
    inv = m.lambda_group.inverse
    left = m.lambda_right[inv] if m.lambda_right is not None else None
    right = m.lambda_left[inv] if m.lambda_left is not None else None
    return GModule(m.ring, m.exps, m.group, m._action, m.lambda_group, left, right,
                   label=m.label, check=False)


class Character:
    """A homomorphism from a finite group to the units of Z/p^e."""

    def __init__(self, group: FiniteGroup, values, ring: RingSpec):
        values = np.asarray(values, dtype=INT) % ring.modulus
        if values.shape != (group.order,):
            raise ValidationError("character needs one value per group element")
        for g, v in enumerate(values):
            if not ring.is_unit(v):
                raise ValidationError("character value chi(%d) = %d is not a unit" % (g, v))
        bad = (values[group.table] - np.outer(values, values)) % ring.modulus
        if bad.any():
            a, b = (int(k) for k in np.argwhere(bad)[0])
            raise ValidationError("chi(%d * %d) != chi(%d) chi(%d)" % (a, b, a, b))
        self.group = group
        self.values = values
        self.ring = ring

    def __call__(self, g: int) -> int:
        return int(self.values[g])

    def inverse(self) -> "Character":
        return Character(self.group, [self.ring.unit_inverse(v) for v in self.values], self.ring)


def twist_by_character(m: GModule, chi: Character) -> GModule:
    if chi.group != m.group:
        raise ValidationError("character is defined on a different group")
    action = m.action * chi.values[:, None, None] % m.orders[None, :, None]
    return GModule(m.ring, m.exps, m.group, action, m.lambda_group, m.lambda_left, m.lambda_right,
                   label=m.label, check=False)


def check_pairing(pairing: ModuleMap) -> ModuleMap:
    """Verify sigma<a, b> = <sigma a, sigma b> for a pairing given on a tensor product."""
    src, tgt = pairing.source, pairing.target
    lhs = np.einsum("ij,gjk->gik", pairing.matrix, src.action)
    rhs = np.einsum("gij,jk->gik", tgt.action, pairing.matrix)
    bad = (lhs - rhs) % tgt.orders[None, :, None]
    if bad.any():
        g, i, k = (int(x) for x in np.argwhere(bad)[0])
        raise NonEquivariantPairing(
            "pairing is not equivariant for element %d (output %d, input tensor %d)" % (g, i, k))
    return pairing


def pairing_map(left: GModule, right: GModule, target: GModule, matrix) -> ModuleMap:
    """Build and check an equivariant pairing left ⊗ right -> target."""
    source = tensor_mod(left, right)
    return check_pairing(ModuleMap(source, target, check_map(matrix, source.exps, target.exps, left.ring),
                                   check=False))


# induced modules

def induced_module(m: GModule, sub: Sequence[int]) -> GModule:
    """R[G/U] ⊗ M over the left cosets of U, with sigma(beta ⊗ x) = sigma beta ⊗ sigma x.

    Coordinate (b, k) sits at b * rank(M) + k; coset 0 is U itself.
    """
    space = CosetSpace(m.group, sub)
    q, n, order = len(space), m.rank, m.group.order
    perm = np.zeros((order, q, q), dtype=INT)
    perm[np.arange(order)[:, None], space.action, np.arange(q)[None, :]] = 1
    action = np.einsum("gcb,gij->gcibj", perm, m.action).reshape(order, q * n, q * n)
    return GModule(m.ring, m.exps * q, m.group, action, check=False, label=m.label)


def identity_coset_projection(m: GModule, sub: Sequence[int]) -> np.ndarray:
    """Matrix of beta ⊗ x -> x if beta = U else 0, from R[G/U] ⊗ M to M."""
    q = len(m.group.left_cosets(sub))
    out = np.zeros((m.rank, q * m.rank), dtype=INT)
    out[:, :m.rank] = np.eye(m.rank, dtype=INT)
    return out
