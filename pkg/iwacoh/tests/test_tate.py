import math

import pytest

from iwacoh.cochains import cochain_cohomology
from iwacoh.config import make_config
from iwacoh.errors import CapExceeded, ValidationError
from iwacoh.groups import cyclic, from_name, symmetric3
from iwacoh.linalg import FinAb, RingSpec
from iwacoh.modules import GModule, induced_module, trivial_module
from iwacoh.oracles import tate_oracle
from iwacoh.tate import (TateComplex, check_periodic_to_bar, finite_duality_check, periodic_cohomology,
                         periodic_to_bar, tate_cohomology, tate_table)


def gcd_group(n, p, e):
    k = 0
    while k < e and (math.gcd(n, p ** e) % p ** (k + 1)) == 0:
        k += 1
    return FinAb.from_exps(p, [k] if k else [])


class TestCyclicTrivial:
    @pytest.mark.parametrize("n, p, e", [
        (2, 2, 1), (4, 2, 1), (4, 2, 3), (8, 2, 2), (3, 3, 2), (9, 3, 1), (2, 3, 2), (3, 2, 2)])
    @pytest.mark.parametrize("degree", [0, -1])
    def test_low_degrees_are_gcds(self, n, p, e, degree):
        g = cyclic(n)
        m = trivial_module(RingSpec(p, e), (e,), g)
        assert tate_cohomology(g, m, degree) == gcd_group(n, p, e)
        assert tate_cohomology(g, m, degree) == tate_oracle(m, degree)

    def test_coprime_orders_give_zero(self):
        g = cyclic(2)
        m = trivial_module(RingSpec(3, 2), (2,), g)
        table = tate_table(g, m, -3, 3)
        assert sorted(table) == list(range(-3, 4))
        assert all(h == FinAb(3) for h in table.values())


class TestPeriodic:
    @pytest.mark.parametrize("module", [
        trivial_module(RingSpec(2, 2), (2,), cyclic(4)),
        GModule(RingSpec(2, 2), (2,), cyclic(2), [[[1]], [[3]]]),
        GModule(RingSpec(3, 1), (1, 1), cyclic(3), [[[1, 0], [0, 1]], [[1, 1], [0, 1]], [[1, 2], [0, 1]]])])
    def test_periodic_model_agrees_with_bar(self, module):
        g = module.group
        for i in range(-2, 3):
            assert periodic_cohomology(g, module, i) == tate_cohomology(g, module, i)
        assert periodic_cohomology(g, module, 1) == periodic_cohomology(g, module, 3)

    @pytest.mark.parametrize("module", [
        trivial_module(RingSpec(3, 2), (2,), cyclic(3)),
        trivial_module(RingSpec(2, 2), (2,), cyclic(4)),
        GModule(RingSpec(2, 2), (2,), cyclic(2), [[[1]], [[3]]]),
        GModule(RingSpec(3, 1), (1, 1), cyclic(3), [[[1, 0], [0, 1]], [[1, 1], [0, 1]], [[1, 2], [0, 1]]])])
    def test_comparison_maps(self, module):
        report = check_periodic_to_bar(module.group, module)
        assert report.degrees == {0: True, 1: True, 2: True}
        assert report.ok

    def test_degree_zero_is_tate_not_invariants(self):
        # M^G = Z/9 but the norm 3 cuts it down to Z/3
        g = cyclic(3)
        m = trivial_module(RingSpec(3, 2), (2,), g)
        assert periodic_cohomology(g, m, 0) == tate_cohomology(g, m, 0) == FinAb(3, (1,))
        assert cochain_cohomology(g, m, 0) == FinAb(3, (2,))

    def test_comparison_degrees(self):
        g = cyclic(2)
        with pytest.raises(ValidationError):
            periodic_to_bar(g, trivial_module(RingSpec(2, 1), (1,), g), 3)

    def test_needs_a_cyclic_group(self):
        g = from_name("cyclic:2 x cyclic:2")
        with pytest.raises(ValidationError, match="not cyclic"):
            periodic_cohomology(g, trivial_module(RingSpec(2, 1), (1,), g), 0)


class TestComplete:
    def test_norm_connects_negative_and_positive_degrees(self):
        g = symmetric3()
        m = induced_module(trivial_module(RingSpec(3, 1), (1,), g), (0, 1))
        assert tate_cohomology(g, m, 0) == tate_oracle(m, 0)
        assert tate_cohomology(g, m, -1) == tate_oracle(m, -1)

    def test_complex_stores_one_extra_term_each_side(self):
        g = cyclic(2)
        cx = TateComplex(g, trivial_module(RingSpec(2, 1), (1,), g), -1, 1)
        assert (cx.lo, cx.hi) == (-2, 2)
        cx.check()

    def test_depth_and_degree_caps(self):
        g = cyclic(2)
        m = trivial_module(RingSpec(2, 1), (1,), g)
        cfg = make_config(tate_depth=1)
        with pytest.raises(CapExceeded):
            tate_cohomology(g, m, -2, cfg)
        with pytest.raises(CapExceeded):
            tate_cohomology(g, m, 4)


class TestDuality:
    @pytest.mark.parametrize("n", [-2, -1, 0, 1, 2])
    def test_cyclic_pairing_is_perfect(self, n):
        g = cyclic(4)
        report = finite_duality_check(g, trivial_module(RingSpec(2, 3), (3,), g), n)
        assert report.ok
        assert report.pairing_perfect
        assert report.left == report.right

    def test_non_cyclic_group_compares_orders(self):
        g = from_name("cyclic:2 x cyclic:2")
        report = finite_duality_check(g, trivial_module(RingSpec(2, 1), (1,), g), 0)
        assert report.orders_equal
        assert report.pairing_perfect is None
        assert report.ok

    @pytest.mark.parametrize("n", [-2, -1, 0, 1, 2])
    def test_sign_module_of_s3(self, n):
        g = symmetric3()
        sign = GModule(RingSpec(3, 1), (1,), g, [[[1]], [[2]], [[2]], [[1]], [[1]], [[2]]])
        report = finite_duality_check(g, sign, n)
        assert report.orders_equal and report.ok

    @pytest.mark.parametrize("n", [-1, 0, 1])
    def test_coprime_coefficients_are_trivial_on_both_sides(self, n):
        g = cyclic(2)
        report = finite_duality_check(g, trivial_module(RingSpec(3, 2), (2,), g), n)
        assert report.left == report.right == FinAb(3)
        assert report.ok

    def test_degree_cap(self):
        g = cyclic(2)
        with pytest.raises(CapExceeded):
            finite_duality_check(g, trivial_module(RingSpec(2, 1), (1,), g), 3)
