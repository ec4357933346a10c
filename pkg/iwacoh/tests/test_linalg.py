import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iwacoh.errors import NotASubgroup, OrderMismatch
from iwacoh.linalg import (FinAb, RingSpec, Span, Subquotient, check_map, howell_form, image_order, kernel,
                           kernel_order, solve, subquotient_invariants)
from iwacoh.oracles import kernel_set, span_set, subquotient_oracle


@st.composite
def matrices(draw, max_rows=3, max_cols=3):
    p = draw(st.sampled_from([2, 3]))
    e = draw(st.integers(1, 3 if p == 2 else 2))
    ring = RingSpec(p, e)
    rows = draw(st.integers(1, max_rows))
    cols = draw(st.integers(1, max_cols))
    entries = draw(st.lists(st.integers(0, ring.modulus - 1), min_size=rows * cols, max_size=rows * cols))
    return ring, np.array(entries, dtype=np.int64).reshape(rows, cols)


class TestRingSpec:
    def test_modulus_and_valuations(self):
        ring = RingSpec(2, 3)
        assert ring.modulus == 8
        assert [ring.valuation(x) for x in range(8)] == [3, 0, 1, 0, 2, 0, 1, 0]
        assert ring.unit_inverse(3) == 3
        assert not ring.is_unit(6)

    @pytest.mark.parametrize("p, e", [(4, 1), (2, 0), (1, 2)])
    def test_rejects_bad_rings(self, p, e):
        with pytest.raises(ValueError):
            RingSpec(p, e)


class TestFinAb:
    def test_rendering(self):
        assert str(FinAb.from_exps(2, [2, 1])) == "Z/2 ⊕ Z/4"
        assert str(FinAb(3)) == "0"
        assert FinAb.from_exps(3, [0, 2]).order == 9

    def test_equality_ignores_order_of_input(self):
        assert FinAb.from_exps(2, [3, 1]) == FinAb.from_exps(2, [1, 3])


class TestHowell:
    def test_normal_form_is_unique_for_the_span(self):
        ring = RingSpec(2, 2)
        a = howell_form([[2, 0], [0, 1]], ring)
        b = howell_form([[2, 1], [0, 1], [2, 2]], ring)
        assert np.array_equal(a, b)

    def test_annihilator_rows_are_added(self):
        # span of (2, 1) over Z/4 also contains 2 * (2, 1) = (0, 2)
        span = Span([[2, 1]], RingSpec(2, 2))
        assert span.order == 4
        assert span.contains([0, 2])
        assert not span.contains([0, 1])

    @settings(max_examples=60, deadline=None)
    @given(matrices())
    def test_span_order_matches_enumeration(self, data):
        ring, m = data
        exps = (ring.e,) * m.shape[1]
        assert Span(m, ring).order == len(span_set(m, exps, ring))


class TestKernelAndSolve:
    def test_order_congruence(self):
        ring = RingSpec(2, 2)
        with pytest.raises(OrderMismatch):
            check_map([[1]], (1,), (2,), ring)
        # Z/4 -> Z/2 reduction and Z/2 -> Z/4 doubling are both maps
        assert check_map([[1]], (2,), (1,), ring).tolist() == [[1]]
        assert check_map([[3]], (2,), (1,), ring).tolist() == [[1]]
        assert check_map([[2]], (1,), (2,), ring).tolist() == [[2]]

    @settings(max_examples=60, deadline=None)
    @given(matrices())
    def test_kernel_matches_enumeration(self, data):
        ring, f = data
        src, tgt = (ring.e,) * f.shape[1], (ring.e,) * f.shape[0]
        gens = kernel(f, src, tgt, ring)
        assert span_set(gens, src, ring) == kernel_set(f, src, tgt, ring)
        assert kernel_order(f, src, tgt, ring) * image_order(f, src, tgt, ring) == ring.p ** sum(src)

    @settings(max_examples=60, deadline=None)
    @given(matrices(), st.data())
    def test_solve_recovers_images(self, data, draw):
        ring, f = data
        src, tgt = (ring.e,) * f.shape[1], (ring.e,) * f.shape[0]
        x = np.array(draw.draw(st.lists(st.integers(0, ring.modulus - 1), min_size=len(src), max_size=len(src))))
        y = f @ x % ring.modulus
        found = solve(f, y, src, tgt, ring)
        assert found is not None
        assert np.array_equal(f @ found % ring.modulus, y)

    def test_solve_reports_absence(self):
        ring = RingSpec(3, 1)
        assert solve([[1], [1]], [1, 0], (1,), (1, 1), ring) is None


class TestSubquotient:
    def test_cyclic_quotient(self):
        ring = RingSpec(2, 3)
        sq = Subquotient([[1]], (3,), [[4]], ring)
        assert sq.invariants == FinAb(2, (2,))
        assert sq.coords([5]).tolist() == [1]

    def test_mixed_exponents(self):
        ring = RingSpec(2, 2)
        assert subquotient_invariants(np.eye(2), (1, 2), [[1, 2]], ring) == FinAb(2, (2,))

    def test_coords_and_lift_are_inverse(self):
        ring = RingSpec(3, 2)
        sq = Subquotient(np.eye(2, dtype=np.int64), (2, 2), [[3, 0], [0, 1]], ring)
        for y in range(sq.order):
            assert sq.coords(sq.lift([y])).tolist() == [y]

    def test_smaller_span_must_be_inside(self):
        with pytest.raises(NotASubgroup):
            Subquotient([[2]], (2,), [[1]], RingSpec(2, 2))

    @settings(max_examples=40, deadline=None)
    @given(matrices(max_rows=2, max_cols=3), st.data())
    def test_invariants_match_enumeration(self, data, draw):
        ring, gens = data
        exps = (ring.e,) * gens.shape[1]
        k = draw.draw(st.integers(0, 2))
        n = k * len(gens)
        coeffs = draw.draw(st.lists(st.integers(0, ring.modulus - 1), min_size=n, max_size=n))
        sub = np.array(coeffs, dtype=np.int64).reshape(k, len(gens)) @ gens % ring.modulus
        assert subquotient_invariants(gens, exps, sub, ring) == subquotient_oracle(gens, exps, sub, ring)
