"""Finite groups given by multiplication tables.

Elements are the integers 0..n-1 with 0 the identity; ``table[a, b]`` is
the product ``a * b``.
"""
import itertools
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_CONFIG
from .errors import CapExceeded, NotASubgroup, NotNormal, ValidationError

logger = logging.getLogger(__name__)


class FiniteGroup:
    def __init__(self, table, label: Optional[str] = None, cfg=None):
        cfg = cfg or DEFAULT_CONFIG
        table = np.asarray(table, dtype=np.int64)
        n = table.shape[0]
        if table.ndim != 2 or table.shape != (n, n) or n == 0:
            raise ValidationError("multiplication table must be a non-empty square array")
        if n > cfg.group_order_cap:
            raise CapExceeded("group of order %d exceeds the cap %d" % (n, cfg.group_order_cap))
        if table.min() < 0 or table.max() >= n:
            raise ValidationError("multiplication table has entries outside 0..%d" % (n - 1))
        elems = np.arange(n)
        if not (np.array_equal(table[0], elems) and np.array_equal(table[:, 0], elems)):
            raise ValidationError("element 0 is not a two-sided identity")
        for a in range(n):
            if len(set(table[a])) != n:
                raise ValidationError("row %d of the multiplication table is not a permutation" % a)
        left = table[table]
        right = table[elems[:, None, None], table[None, :, :]]
        if not np.array_equal(left, right):
            a, b, c = (int(k) for k in np.argwhere(left != right)[0])
            raise ValidationError(
                "multiplication table is not associative at (%d, %d, %d): (%d*%d)*%d = %d but %d*(%d*%d) = %d"
                % (a, b, c, a, b, c, left[a, b, c], a, b, c, right[a, b, c]))
        self.table = table
        self.table.setflags(write=False)
        self.inverse = np.argmin(table, axis=1)
        self.label = label or "G%d" % n

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self):
        return self.order

    def __repr__(self):
        return "FiniteGroup(%s, order=%d)" % (self.label, self.order)

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def product(self, elems: Sequence[int]) -> int:
        out = 0
        for g in elems:
            out = int(self.table[out, g])
        return out

    def conjugate(self, g: int, x: int) -> int:
        """g x g^-1"""
        return int(self.table[self.table[g, x], self.inverse[g]])

    def element_order(self, g: int) -> int:
        k, x = 1, int(g)
        while x != 0:
            x = int(self.table[x, g])
            k += 1
        return k

    def is_abelian(self) -> bool:
        return np.array_equal(self.table, self.table.T)

    def generator(self) -> Optional[int]:
        """Least element generating the whole group, if the group is cyclic."""
        for g in range(self.order):
            if self.element_order(g) == self.order:
                return g
        return None

    def is_cyclic(self) -> bool:
        return self.generator() is not None

    def closure(self, gens: Sequence[int]) -> Tuple[int, ...]:
        """Subgroup generated by gens, as a sorted tuple."""
        found = {0}
        frontier = [0]
        gens = [int(g) for g in gens]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = int(self.table[x, g])
                if y not in found:
                    found.add(y)
                    frontier.append(y)
        return tuple(sorted(found))

    def check_subgroup(self, elems: Sequence[int]) -> Tuple[int, ...]:
        elems = tuple(sorted(set(int(x) for x in elems)))
        if not elems or elems[0] != 0:
            raise NotASubgroup("subset %s does not contain the identity" % (elems,))
        members = set(elems)
        for a in elems:
            for b in elems:
                if int(self.table[a, self.inverse[b]]) not in members:
                    raise NotASubgroup("subset %s is not closed: %d * %d^-1 is missing" % (elems, a, b))
        return elems

    def is_normal(self, elems: Sequence[int]) -> bool:
        members = set(int(x) for x in elems)
        return all(self.conjugate(g, x) in members for g in range(self.order) for x in members)

    def check_normal(self, elems: Sequence[int]) -> Tuple[int, ...]:
        elems = self.check_subgroup(elems)
        members = set(elems)
        for g in range(self.order):
            for x in elems:
                if self.conjugate(g, x) not in members:
                    raise NotNormal("subgroup %s is not normal: %d * %d * %d^-1 is outside" % (elems, g, x, g))
        return elems

    def left_cosets(self, elems: Sequence[int]) -> List[Tuple[int, ...]]:
        """Cosets gU, sorted by their least element (so U comes first)."""
        elems = self.check_subgroup(elems)
        seen, cosets = set(), []
        for g in range(self.order):
            if g in seen:
                continue
            coset = tuple(sorted(int(self.table[g, u]) for u in elems))
            seen.update(coset)
            cosets.append(coset)
        return cosets

    def right_cosets(self, elems: Sequence[int]) -> List[Tuple[int, ...]]:
        elems = self.check_subgroup(elems)
        seen, cosets = set(), []
        for g in range(self.order):
            if g in seen:
                continue
            coset = tuple(sorted(int(self.table[u, g]) for u in elems))
            seen.update(coset)
            cosets.append(coset)
        return cosets

    def subgroup(self, elems: Sequence[int], label: Optional[str] = None):
        """The subgroup on ``elems`` as a FiniteGroup, with its inclusion map."""
        elems = self.check_subgroup(elems)
        index = {x: k for k, x in enumerate(elems)}
        table = [[index[int(self.table[a, b])] for b in elems] for a in elems]
        return FiniteGroup(table, label=label or "%s<%d>" % (self.label, len(elems))), np.array(elems)

    def is_homomorphism(self, source: "FiniteGroup", images) -> bool:
        images = np.asarray(images)
        if images.shape != (source.order,) or images.min() < 0 or images.max() >= self.order:
            return False
        return np.array_equal(images[source.table], self.table[images[:, None], images[None, :]])

    def check_homomorphism(self, source: "FiniteGroup", images) -> np.ndarray:
        images = np.asarray(images, dtype=np.int64)
        if images.shape != (source.order,):
            raise ValidationError("homomorphism needs %d images, got %d" % (source.order, images.size))
        if images.min() < 0 or images.max() >= self.order:
            raise ValidationError("homomorphism images must lie in 0..%d" % (self.order - 1))
        bad = images[source.table] != self.table[images[:, None], images[None, :]]
        if bad.any():
            a, b = (int(k) for k in np.argwhere(bad)[0])
            raise ValidationError("phi(%d * %d) != phi(%d) * phi(%d)" % (a, b, a, b))
        return images


class CosetSpace:
    """Left cosets G/U with representatives and the left multiplication action."""

    def __init__(self, group: FiniteGroup, sub: Sequence[int]):
        self.group = group
        self.sub = group.check_subgroup(sub)
        self.cosets = group.left_cosets(self.sub)
        self.reps = np.array([c[0] for c in self.cosets])
        self.index_of = np.empty(group.order, dtype=np.int64)
        for k, coset in enumerate(self.cosets):
            self.index_of[list(coset)] = k
        # action[g, b] = coset of g * rep_b
        self.action = self.index_of[group.table[:, self.reps]]

    def __len__(self):
        return len(self.cosets)


def quotient(group: FiniteGroup, normal: Sequence[int], label: Optional[str] = None):
    """G/U for normal U: the quotient group, the projection array and coset representatives."""
    normal = group.check_normal(normal)
    space = CosetSpace(group, normal)
    reps = space.reps
    table = space.index_of[group.table[reps[:, None], reps[None, :]]]
    q = FiniteGroup(table, label=label or "%s/%d" % (group.label, len(normal)))
    return q, space.index_of.copy(), reps


def cyclic(n: int, cfg=None) -> FiniteGroup:
    elems = np.arange(n)
    return FiniteGroup((elems[:, None] + elems[None, :]) % n, label="Z/%d" % n, cfg=cfg)


def trivial() -> FiniteGroup:
    return FiniteGroup([[0]], label="1")


def symmetric3() -> FiniteGroup:
    perms = list(itertools.permutations(range(3)))
    index = {p: k for k, p in enumerate(perms)}
    table = [[index[tuple(a[b[x]] for x in range(3))] for b in perms] for a in perms]
    return FiniteGroup(table, label="S3")


def dihedral4() -> FiniteGroup:
    """D4 with element k + 4j standing for r^k s^j."""
    table = np.zeros((8, 8), dtype=np.int64)
    for a, i, b, j in itertools.product(range(4), range(2), range(4), range(2)):
        k = (a + (-1) ** i * b) % 4
        table[a + 4 * i, b + 4 * j] = k + 4 * ((i + j) % 2)
    return FiniteGroup(table, label="D4")


def quaternion8() -> FiniteGroup:
    """Q8 with element 4s + u for (-1)^s times the unit u in (1, i, j, k)."""
    # unit products: (sign, unit) of u * v
    prods = {
        (0, 0): (0, 0), (0, 1): (0, 1), (0, 2): (0, 2), (0, 3): (0, 3),
        (1, 0): (0, 1), (1, 1): (1, 0), (1, 2): (0, 3), (1, 3): (1, 2),
        (2, 0): (0, 2), (2, 1): (1, 3), (2, 2): (1, 0), (2, 3): (0, 1),
        (3, 0): (0, 3), (3, 1): (0, 2), (3, 2): (1, 1), (3, 3): (1, 0),
    }
    table = np.zeros((8, 8), dtype=np.int64)
    for s, u, t, v in itertools.product(range(2), range(4), range(2), range(4)):
        sign, w = prods[u, v]
        table[4 * s + u, 4 * t + v] = 4 * ((s + t + sign) % 2) + w
    return FiniteGroup(table, label="Q8")


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """G x H with (a, b) stored as a * |H| + b."""
    m = h.order
    table = (g.table[:, None, :, None] * m + h.table[None, :, None, :]).reshape(g.order * m, g.order * m)
    return FiniteGroup(table, label="%sx%s" % (g.label, h.label))


BUILTINS = {
    "s3": symmetric3,
    "d4": dihedral4,
    "q8": quaternion8,
    "trivial": trivial,
}


def from_name(name: str, cfg=None) -> FiniteGroup:
    """Builtin groups: ``cyclic:n``, ``s3``, ``d4``, ``q8``, ``trivial``, or ``A x B`` products."""
    name = name.strip()
    if " x " in name:
        left, right = name.split(" x ", 1)
        return direct_product(from_name(left, cfg), from_name(right, cfg))
    if name.startswith("cyclic:"):
        try:
            n = int(name.split(":", 1)[1])
        except ValueError:
            raise ValidationError("bad cyclic group name %r" % name)
        if n < 1:
            raise ValidationError("cyclic group order must be positive, got %d" % n)
        return cyclic(n, cfg=cfg)
    if name not in BUILTINS:
        raise ValidationError("unknown builtin group %r" % name)
    return BUILTINS[name]()


def all_small_groups(max_order: int = 8) -> List[FiniteGroup]:
    """Every group of order <= 8 up to isomorphism."""
    z = cyclic
    groups = [trivial()] + [z(n) for n in range(2, max_order + 1)]
    if max_order >= 4:
        groups.append(direct_product(z(2), z(2)))
    if max_order >= 6:
        groups.append(symmetric3())
    if max_order >= 8:
        groups += [direct_product(z(2), z(4)), direct_product(direct_product(z(2), z(2)), z(2)),
                   dihedral4(), quaternion8()]
    return sorted(groups, key=lambda grp: grp.order)
