"""Brute-force answers by listing elements, for cross-checking the Howell machinery.

Everything here enumerates whole groups and refuses to run once the number
of elements exceeds ``cfg.enumeration_limit``.
"""
import itertools
import logging
from typing import Iterable, Set, Tuple

import numpy as np

from .cochains import cochain_differential
from .config import DEFAULT_CONFIG
from .errors import CapExceeded, ValidationError
from .linalg import INT, FinAb, RingSpec, reduce_vectors
from .modules import GModule

logger = logging.getLogger(__name__)


def _guard(count: int, cfg, what: str):
    if count > cfg.enumeration_limit:
        raise CapExceeded("%s has %d elements, above the enumeration limit %d"
                          % (what, count, cfg.enumeration_limit))


def elements(exps, ring: RingSpec, cfg=None) -> np.ndarray:
    """All elements of ⊕ Z/p^exps as rows, in lexicographic order."""
    cfg = cfg or DEFAULT_CONFIG
    orders = [ring.p ** a for a in exps]
    if not orders:
        return np.zeros((1, 0), dtype=INT)
    _guard(int(np.prod(orders, dtype=object)), cfg, "group %s" % (tuple(exps),))
    return np.array(list(itertools.product(*[range(o) for o in orders])), dtype=INT).reshape(-1, len(orders))


def span_set(gens, exps, ring: RingSpec, cfg=None) -> Set[Tuple[int, ...]]:
    """The subgroup generated by the rows of gens, grown one generator at a time."""
    cfg = cfg or DEFAULT_CONFIG
    exps = tuple(exps)
    if not exps:
        return {()}
    gens = reduce_vectors(np.asarray(gens, dtype=INT).reshape(-1, len(exps)), exps, ring)
    orders = ring.orders(exps)
    found = {tuple([0] * len(exps))}
    for g in gens:
        step = set(found)
        frontier = list(found)
        while frontier:
            x = frontier.pop()
            y = tuple(int(v) for v in (np.array(x, dtype=INT) + g) % orders)
            if y not in step:
                step.add(y)
                frontier.append(y)
                _guard(len(step), cfg, "span")
        found = step
    return found


def kernel_set(f, src, tgt, ring: RingSpec, cfg=None) -> Set[Tuple[int, ...]]:
    f = np.asarray(f, dtype=INT).reshape(len(tgt), len(src))
    xs = elements(src, ring, cfg)
    images = xs @ f.T % ring.orders(tgt) if len(tgt) else np.zeros((len(xs), 0), dtype=INT)
    return {tuple(int(v) for v in x) for x, y in zip(xs, images) if not y.any()}


def _scaled(x: Tuple[int, ...], k: int, orders) -> Tuple[int, ...]:
    return tuple(int(v) for v in (np.array(x, dtype=INT) * k) % orders)


def quotient_invariants(big: Set[Tuple[int, ...]], small: Set[Tuple[int, ...]], exps, ring: RingSpec) -> FinAb:
    """Invariant factors of big/small from the number of classes killed by each p^k.

    If c_k = log_p #{x in big/small : p^k x = 0} then the number of factors of
    exponent >= k is c_k - c_{k-1}.
    """
    orders = ring.orders(tuple(exps))
    quotient_order = len(big) // len(small)
    counts = [0]
    k = 1
    while ring.p ** counts[-1] < quotient_order:
        killed = sum(1 for x in big if _scaled(x, ring.p ** k, orders) in small) // len(small)
        counts.append(int(round(np.log(killed) / np.log(ring.p))))
        k += 1
    at_least = [counts[j] - counts[j - 1] for j in range(1, len(counts))]
    out = []
    for j, n in enumerate(at_least):
        nxt = at_least[j + 1] if j + 1 < len(at_least) else 0
        out.extend([j + 1] * (n - nxt))
    return FinAb.from_exps(ring.p, sorted(out))


def subquotient_oracle(gens, exps, sub_gens, ring: RingSpec, cfg=None) -> FinAb:
    return quotient_invariants(span_set(gens, exps, ring, cfg), span_set(sub_gens, exps, ring, cfg), exps, ring)


def _cochain_exps(g_order: int, m: GModule, j: int):
    return tuple(m.exps) * g_order ** j


def cohomology_oracle(g, m: GModule, i: int, cfg=None) -> FinAb:
    """H^i(G, M) as cocycles over coboundaries, both listed element by element."""
    cfg = cfg or DEFAULT_CONFIG
    ring = m.ring
    src = _cochain_exps(g.order, m, i)
    cocycles = kernel_set(cochain_differential(g, m, i), src, _cochain_exps(g.order, m, i + 1), ring, cfg)
    if i == 0:
        boundaries = {tuple([0] * len(src))}
    else:
        prev = _cochain_exps(g.order, m, i - 1)
        d = cochain_differential(g, m, i - 1)
        boundaries = {tuple(int(v) for v in x @ d.T % ring.orders(src)) for x in elements(prev, ring, cfg)}
    logger.debug("oracle H^%d(%s): %d cocycles, %d coboundaries", i, g.label, len(cocycles), len(boundaries))
    return quotient_invariants(cocycles, boundaries, src, ring)


def invariants_oracle(m: GModule, cfg=None) -> FinAb:
    """M^G by listing M."""
    xs = elements(m.exps, m.ring, cfg)
    orders = m.orders
    fixed = {tuple(int(v) for v in x) for x in xs
             if all(not ((a @ x - x) % orders).any() for a in m.action)}
    return quotient_invariants(fixed, {tuple([0] * m.rank)}, m.exps, m.ring)


def _apply_all(mat, xs: Iterable, orders) -> Set[Tuple[int, ...]]:
    return {tuple(int(v) for v in mat @ x % orders) for x in xs}


def tate_oracle(m: GModule, degree: int, cfg=None) -> FinAb:
    """Ĥ^0 = M^G / N M and Ĥ^-1 = ker N / I_G M by listing M."""
    xs = elements(m.exps, m.ring, cfg)
    orders = m.orders
    norm = m.action.sum(axis=0) % orders[:, None]
    zero = {tuple([0] * m.rank)}
    if degree == 0:
        fixed = {tuple(int(v) for v in x) for x in xs
                 if all(not ((a @ x - x) % orders).any() for a in m.action)}
        return quotient_invariants(fixed, _apply_all(norm, xs, orders) | zero, m.exps, m.ring)
    if degree == -1:
        killed = {tuple(int(v) for v in x) for x in xs if not (norm @ x % orders).any()}
        gens = np.array([(a @ x - x) % orders for a in m.action for x in np.eye(m.rank, dtype=INT)],
                        dtype=INT).reshape(-1, m.rank)
        return quotient_invariants(killed, span_set(gens, m.exps, m.ring, cfg), m.exps, m.ring)
    raise ValidationError("the oracle covers Tate degrees 0 and -1 only")
