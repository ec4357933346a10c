"""Exact linear algebra over Z/p^e.

Finite abelian p-groups are stored in cyclic coordinates: a tuple of
exponents ``exps`` such that coordinate ``i`` lives in Z/p^exps[i].  All
span, kernel and membership questions are answered after embedding such a
group into the free module (Z/p^e)^n through ``x_i -> x_i * p^(e - exps[i])``,
where the Howell form gives canonical row spans.

A map between two such groups is an integer matrix of shape
(target, source) whose columns respect the orders:
``F[j, i] * p^a_i == 0 mod p^b_j``.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import NotASubgroup, OrderMismatch

logger = logging.getLogger(__name__)

INT = np.int64


@dataclass(frozen=True)
class RingSpec:
    """The ring Z/p^e."""
    p: int
    e: int

    def __post_init__(self):
        if self.p < 2 or any(self.p % k == 0 for k in range(2, int(self.p ** 0.5) + 1)):
            raise ValueError("p = %d is not prime" % self.p)
        if self.e < 1:
            raise ValueError("exponent e must be at least 1, got %d" % self.e)

    @property
    def modulus(self) -> int:
        return self.p ** self.e

    @cached_property
    def valuations(self) -> np.ndarray:
        """``valuations[x]`` is the p-adic valuation of x in Z/p^e (e for 0)."""
        table = np.zeros(self.modulus, dtype=INT)
        table[0] = self.e
        for k in range(1, self.e):
            table[self.p ** k::self.p ** k] += 1
        return table

    def valuation(self, x: int) -> int:
        return int(self.valuations[int(x) % self.modulus])

    def unit_inverse(self, u: int) -> int:
        return pow(int(u), -1, self.modulus)

    def is_unit(self, u: int) -> bool:
        return int(u) % self.p != 0

    def scales(self, exps: Sequence[int]) -> np.ndarray:
        """Embedding factors p^(e - a) for cyclic coordinates of exponents a."""
        return np.array([self.p ** (self.e - a) for a in exps], dtype=INT)

    def orders(self, exps: Sequence[int]) -> np.ndarray:
        return np.array([self.p ** a for a in exps], dtype=INT)

    def __str__(self):
        return "Z/%d" % self.modulus


@dataclass(frozen=True)
class FinAb:
    """Isomorphism class of a finite abelian p-group, as invariant factors."""
    p: int
    exps: Tuple[int, ...] = ()

    @classmethod
    def from_exps(cls, p: int, exps) -> "FinAb":
        return cls(p, tuple(sorted(int(a) for a in exps if a > 0)))

    @property
    def order(self) -> int:
        return self.p ** sum(self.exps)

    @property
    def cyclic_orders(self) -> Tuple[int, ...]:
        return tuple(self.p ** a for a in self.exps)

    def is_zero(self) -> bool:
        return not self.exps

    def __str__(self):
        if not self.exps:
            return "0"
        return " ⊕ ".join("Z/%d" % q for q in self.cyclic_orders)


def as_rows(x, n: int) -> np.ndarray:
    """View x as a stack of length-n rows; a flat length-n vector is one row."""
    arr = np.asarray(x, dtype=INT)
    if arr.ndim == 1:
        return arr.reshape(1, n) if arr.size == n else arr.reshape(0, n)
    return arr.reshape(arr.shape[0], n)


def reduce_vectors(x, exps, ring: RingSpec) -> np.ndarray:
    """Reduce the rows of x coordinatewise into [0, p^a)."""
    return np.asarray(x, dtype=INT) % ring.orders(exps)


def embed(x, exps, ring: RingSpec) -> np.ndarray:
    return (np.asarray(x, dtype=INT) % ring.orders(exps)) * ring.scales(exps) % ring.modulus


def check_map(f, src, tgt, ring: RingSpec) -> np.ndarray:
    """Validate the order congruences of f and return it reduced into the target."""
    f = np.asarray(f, dtype=INT).reshape(len(tgt), len(src))
    bad = (f * ring.orders(src)[None, :]) % ring.orders(tgt)[:, None]
    if bad.any():
        j, i = (int(k) for k in np.argwhere(bad)[0])
        raise OrderMismatch(
            "entry (%d, %d) = %d sends an element of order %d into Z/%d non-trivially"
            % (j, i, f[j, i], ring.p ** src[i], ring.p ** tgt[j]))
    return f % ring.orders(tgt)[:, None]


def lifted_map(f, src, tgt, ring: RingSpec) -> np.ndarray:
    """Matrix of the lift (Z/p^e)^n -> (Z/p^e)^m of f composed with the target embedding."""
    f = check_map(f, src, tgt, ring)
    return f * ring.scales(tgt)[:, None] % ring.modulus


class Span:
    """A row span in (Z/p^e)^n held in Howell normal form.

    ``rows`` has one row per pivot; pivot ``k`` sits in column ``cols[k]``
    with value p^``vals[k]`` and every entry above a pivot lies in
    [0, p^vals[k]).
    """

    def __init__(self, m, ring: RingSpec, ncols: Optional[int] = None):
        self.ring = ring
        m = np.asarray(m, dtype=INT)
        if ncols is None:
            ncols = m.shape[1]
        self.ncols = ncols
        self.rows, self.cols, self.vals = _howell(as_rows(m, ncols), ring)

    @property
    def log_order(self) -> int:
        return int(sum(self.ring.e - v for v in self.vals))

    @property
    def order(self) -> int:
        return self.ring.p ** self.log_order

    def reduce(self, x, upto: Optional[int] = None) -> np.ndarray:
        """Reduce the rows of x against the span, using pivots in columns < upto."""
        N = self.ring.modulus
        x = np.array(x, dtype=INT) % N
        single = x.ndim == 1
        x = as_rows(x, self.ncols)
        for row, c, v in zip(self.rows, self.cols, self.vals):
            if upto is not None and c >= upto:
                break
            q = x[:, c] // self.ring.p ** v
            if q.any():
                x = (x - q[:, None] * row[None, :]) % N
        return x[0] if single else x

    def contains(self, x) -> bool:
        return not self.reduce(x).any()

    def contains_span(self, other: "Span") -> bool:
        return not len(other.rows) or self.contains(other.rows)

    def __eq__(self, other):
        return (isinstance(other, Span) and self.ncols == other.ncols
                and np.array_equal(self.rows, other.rows))

    def __len__(self):
        return len(self.cols)


def _howell(m: np.ndarray, ring: RingSpec):
    p, e, N = ring.p, ring.e, ring.modulus
    ncols = m.shape[1]
    work = m % N
    work = work[work.any(axis=1)]
    rows, cols, vals = [], [], []
    for c in range(ncols):
        if not len(work):
            break
        col = work[:, c]
        nz = np.flatnonzero(col)
        if not len(nz):
            continue
        v_all = ring.valuations[col[nz]]
        r = int(nz[np.argmin(v_all)])
        v = int(v_all.min())
        pv = p ** v
        row = work[r] * ring.unit_inverse(col[r] // pv) % N
        work = np.delete(work, r, axis=0)
        if len(work):
            work = (work - np.outer(work[:, c] // pv, row)) % N
        annihilated = row * p ** (e - v) % N
        if annihilated.any():
            work = np.vstack([work, annihilated[None, :]])
        work = work[work.any(axis=1)]
        rows.append(row)
        cols.append(c)
        vals.append(v)
    h = np.array(rows, dtype=INT).reshape(len(rows), ncols)
    for i, (c, v) in enumerate(zip(cols, vals)):
        if i:
            q = h[:i, c] // p ** v
            if q.any():
                h[:i] = (h[:i] - np.outer(q, h[i])) % N
    return h, cols, vals


def howell_form(m, ring: RingSpec) -> np.ndarray:
    """Howell normal form of the row span of m over Z/p^e."""
    m = np.asarray(m, dtype=INT)
    return Span(m.reshape(-1, m.shape[-1]), ring).rows


def span_of(gens, exps, ring: RingSpec) -> Span:
    """Span of module elements (rows, in cyclic coordinates)."""
    gens = as_rows(gens, len(exps))
    return Span(embed(gens, exps, ring), ring, ncols=len(exps))


def image_span(f, src, tgt, ring: RingSpec) -> Span:
    return Span(lifted_map(f, src, tgt, ring).T, ring, ncols=len(tgt))


def kernel(f, src, tgt, ring: RingSpec) -> np.ndarray:
    """Generators (rows) of the kernel of f: ⊕Z/p^src -> ⊕Z/p^tgt."""
    n, m = len(src), len(tgt)
    lifted = lifted_map(f, src, tgt, ring)
    aug = np.hstack([lifted.T, np.eye(n, dtype=INT)])
    span = Span(aug, ring, ncols=m + n)
    gens = span.rows[[c >= m for c in span.cols]][:, m:] if len(span.cols) else np.zeros((0, n), INT)
    gens = reduce_vectors(gens, src, ring)
    return gens[gens.any(axis=1)] if len(gens) else gens.reshape(0, n)


def solve(f, y, src, tgt, ring: RingSpec):
    """Some x with f(x) = y, or None when y is not in the image."""
    n, m = len(src), len(tgt)
    lifted = lifted_map(f, src, tgt, ring)
    span = Span(np.hstack([lifted.T, np.eye(n, dtype=INT)]), ring, ncols=m + n)
    target = np.concatenate([embed(y, tgt, ring), np.zeros(n, dtype=INT)])
    residue = span.reduce(target, upto=m)
    if residue[:m].any():
        return None
    return reduce_vectors(-residue[m:], src, ring)


def image_order(f, src, tgt, ring: RingSpec) -> int:
    return image_span(f, src, tgt, ring).order


def kernel_order(f, src, tgt, ring: RingSpec) -> int:
    return ring.p ** sum(src) // image_order(f, src, tgt, ring)


def smith_form(r, ring: RingSpec):
    """Diagonalise r over Z/p^e by row operations and tracked column operations.

    Returns ``(vals, q, q_inv)`` where the row span of ``r @ q`` is spanned by
    ``p^vals[t] * e_t`` (t < len(vals)); ``q_inv`` is the inverse of ``q``.
    """
    p, N = ring.p, ring.modulus
    a = np.array(r, dtype=INT) % N
    nrows, k = a.shape
    q = np.eye(k, dtype=INT)
    q_inv = np.eye(k, dtype=INT)
    vals = []
    for t in range(min(nrows, k)):
        block = a[t:, t:]
        if not block.any():
            break
        v_block = ring.valuations[block]
        i, j = np.unravel_index(int(np.argmin(v_block)), block.shape)
        i, j = i + t, j + t
        v = int(v_block.min())
        pv = p ** v
        a[[t, i]] = a[[i, t]]
        a[:, [t, j]] = a[:, [j, t]]
        q[:, [t, j]] = q[:, [j, t]]
        q_inv[[t, j]] = q_inv[[j, t]]
        a[t] = a[t] * ring.unit_inverse(a[t, t] // pv) % N
        below = a[t + 1:, t] // pv
        a[t + 1:] = (a[t + 1:] - np.outer(below, a[t])) % N
        right = a[t, t + 1:] // pv
        for c in np.flatnonzero(right):
            c_abs = t + 1 + int(c)
            coef = int(right[c])
            a[:, c_abs] = (a[:, c_abs] - coef * a[:, t]) % N
            q[:, c_abs] = (q[:, c_abs] - coef * q[:, t]) % N
            q_inv[t] = (q_inv[t] + coef * q_inv[c_abs]) % N
        vals.append(v)
    return vals, q, q_inv


class Subquotient:
    """span(gens) / span(sub_gens) inside a group with cyclic exponents ``exps``.

    The quotient is identified with ⊕ Z/p^exps_out (ascending) through
    ``coords`` and ``lift``.
    """

    def __init__(self, gens, exps, sub_gens, ring: RingSpec):
        self.ring = ring
        self.ambient = tuple(exps)
        n = len(self.ambient)
        self.gens = reduce_vectors(as_rows(gens, n), self.ambient, ring)
        self.sub_gens = reduce_vectors(as_rows(sub_gens, n), self.ambient, ring)
        self.span = span_of(self.gens, self.ambient, ring)
        self.sub_span = span_of(self.sub_gens, self.ambient, ring)
        if not self.span.contains_span(self.sub_span):
            bad = next(b for b in self.sub_gens if not self.span.contains(embed(b, self.ambient, ring)))
            raise NotASubgroup("element %s of the smaller span lies outside the larger one" % list(bad))
        k = len(self.gens)
        zg = embed(self.gens, self.ambient, ring)
        zb = embed(self.sub_gens, self.ambient, ring)
        stacked = np.vstack([np.hstack([zg, np.eye(k, dtype=INT)]),
                             np.hstack([zb, np.zeros((len(zb), k), dtype=INT)])])
        relations = Span(stacked, ring, ncols=n + k)
        rel = relations.rows[[c >= n for c in relations.cols]][:, n:] if len(relations.cols) else np.zeros((0, k), INT)
        vals, self._q, self._q_inv = smith_form(as_rows(rel, k), ring)
        full = list(vals) + [ring.e] * (k - len(vals))
        self._keep = [t for t, v in enumerate(full) if v > 0]
        self.exps = tuple(full[t] for t in self._keep)
        self._solver = Span(np.hstack([zg, np.eye(k, dtype=INT)]), ring, ncols=n + k) if k else None

    @property
    def invariants(self) -> FinAb:
        return FinAb.from_exps(self.ring.p, self.exps)

    @property
    def order(self) -> int:
        return self.ring.p ** sum(self.exps)

    def __len__(self):
        return len(self.exps)

    def coords(self, x) -> np.ndarray:
        """Coordinates of elements (rows) of span(gens) in the quotient."""
        x = np.asarray(x, dtype=INT)
        single = x.ndim == 1
        x = as_rows(x, len(self.ambient))
        n, k = len(self.ambient), len(self.gens)
        if not k:
            if reduce_vectors(x, self.ambient, self.ring).any():
                raise NotASubgroup("element outside the zero subgroup")
            out = np.zeros((len(x), 0), dtype=INT)
            return out[0] if single else out
        target = np.hstack([embed(x, self.ambient, self.ring), np.zeros((len(x), k), dtype=INT)])
        residue = self._solver.reduce(target, upto=n)
        if residue[:, :n].any():
            raise NotASubgroup("element %s is not in the span" % list(x[np.flatnonzero(residue[:, :n].any(axis=1))[0]]))
        c = -residue[:, n:] % self.ring.modulus
        y = (c @ self._q % self.ring.modulus)[:, self._keep] % self.ring.orders(self.exps)
        return y[0] if single else y

    def lift(self, y) -> np.ndarray:
        """A representative in the ambient group of quotient coordinates y."""
        y = np.asarray(y, dtype=INT)
        single = y.ndim == 1
        y = as_rows(y, len(self.exps))
        full = np.zeros((len(y), len(self.gens)), dtype=INT)
        full[:, self._keep] = y
        c = full @ self._q_inv % self.ring.modulus
        x = reduce_vectors(c @ self.gens, self.ambient, self.ring)
        return x[0] if single else x

    def canonical(self, x) -> np.ndarray:
        """Least representative of x + span(sub_gens) in lexicographic order."""
        reduced = self.sub_span.reduce(embed(x, self.ambient, self.ring))
        return reduced // self.ring.scales(self.ambient)

    def basis(self) -> np.ndarray:
        """Canonical representatives of the quotient generators."""
        lifted = self.lift(np.eye(len(self.exps), dtype=INT))
        return np.array([self.canonical(v) for v in lifted], dtype=INT).reshape(len(self.exps), len(self.ambient))


def subquotient_invariants(gens, ambient, sub_gens, ring: RingSpec) -> FinAb:
    exps = ambient.exps if isinstance(ambient, FinAb) else tuple(ambient)
    return Subquotient(gens, exps, sub_gens, ring).invariants


def induced_matrix(f, source: Subquotient, target: Subquotient) -> np.ndarray:
    """Matrix of the map induced by f (an ambient map) between two subquotients."""
    k = len(source.exps)
    if not k:
        return np.zeros((len(target.exps), 0), dtype=INT)
    reps = source.lift(np.eye(k, dtype=INT))
    images = reps @ np.asarray(f, dtype=INT).T
    return target.coords(images).reshape(k, len(target.exps)).T.copy()
