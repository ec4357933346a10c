import numpy as np
import pytest

from iwacoh.cochains import (Cochain, CochainComplex, bar_resolution, cochain_cohomology, cochain_differential,
                             cochain_les, cochain_map, conjugation_homotopy, corestriction, cup, inflation,
                             representative_cocycles, resolution_differential, restriction, shapiro_map, total_cup,
                             check_cup_naturality)
from iwacoh.complexes import compose, is_quasi_iso
from iwacoh.config import make_config
from iwacoh.errors import CapExceeded, IncompatiblePairings, ValidationError
from iwacoh.groups import cyclic, from_name, symmetric3
from iwacoh.linalg import FinAb, RingSpec
from iwacoh.modules import GModule, ModuleMap, induced_module, tensor_mod, trivial_module
from iwacoh.oracles import cohomology_oracle


def product_pairing(m):
    """Multiplication Z/p^a ⊗ Z/p^a -> Z/p^a on a rank one trivial module."""
    return ModuleMap(tensor_mod(m, m), m, [[1]])


def _delta(c):
    d = cochain_differential(c.group, c.module, c.degree)
    return Cochain.from_vector(c.group, c.module, c.degree + 1, d @ c.vector)


class TestBar:
    @pytest.mark.parametrize("name", ["cyclic:2", "cyclic:3", "s3"])
    def test_resolution_is_contractible(self, name):
        bar_resolution(from_name(name), 2).check()

    def test_differential_matches_resolution(self):
        g = cyclic(3)
        m = GModule(RingSpec(3, 1), (1,), g, [[[1]], [[1]], [[1]]])
        res = bar_resolution(g, 3)
        for k in range(3):
            assert np.array_equal(resolution_differential(res, m, k), cochain_differential(g, m, k))

    def test_differential_squares_to_zero(self):
        g = symmetric3()
        m = induced_module(trivial_module(RingSpec(2, 2), (2,), g), (0, 3, 4))
        for j in range(2):
            prod = cochain_differential(g, m, j + 1) @ cochain_differential(g, m, j)
            assert not (prod % np.tile(m.orders, g.order ** (j + 2))[:, None]).any()


class TestCohomology:
    @pytest.mark.parametrize("i", [0, 1, 2])
    def test_cyclic_two_with_two(self, i):
        g = cyclic(2)
        m = trivial_module(RingSpec(2, 1), (1,), g)
        assert cochain_cohomology(g, m, i) == FinAb(2, (1,))

    def test_cyclic_three_in_degree_two(self):
        g = cyclic(3)
        assert cochain_cohomology(g, trivial_module(RingSpec(3, 1), (1,), g), 2) == FinAb(3, (1,))

    def test_sign_module(self):
        g = cyclic(2)
        sign = GModule(RingSpec(2, 2), (2,), g, [[[1]], [[3]]])
        assert cochain_cohomology(g, sign, 0) == FinAb(2, (1,))
        assert cochain_cohomology(g, sign, 1) == FinAb(2, (1,))

    def test_invariants_under_a_sign_action(self):
        g = cyclic(2)
        m = GModule(RingSpec(3, 1), (1,), g, [[[1]], [[2]]])
        assert cochain_cohomology(g, m, 0) == FinAb(3)

    @pytest.mark.parametrize("name, i", [("cyclic:2", 1), ("cyclic:3", 1), ("cyclic:2 x cyclic:2", 1), ("s3", 1)])
    def test_matches_enumeration(self, name, i):
        g = from_name(name)
        ring = RingSpec(2, 1) if g.order % 2 == 0 else RingSpec(3, 1)
        m = trivial_module(ring, (1,), g)
        assert cochain_cohomology(g, m, i) == cohomology_oracle(g, m, i)

    def test_degree_cap(self):
        g = cyclic(2)
        with pytest.raises(CapExceeded):
            cochain_cohomology(g, trivial_module(RingSpec(2, 1), (1,), g), 3, make_config(degree_cap=2))

    def test_representatives_are_cocycles(self):
        g = cyclic(4)
        m = trivial_module(RingSpec(2, 1), (1,), g)
        reps = representative_cocycles(g, m, 2)
        assert len(reps) == 1
        assert not _delta(reps[0]).table.any()

    def test_cochain_rendering(self):
        g = cyclic(2)
        m = trivial_module(RingSpec(2, 1), (1,), g)
        assert str(Cochain.from_function(g, m, 1, lambda a: [a])) == "(1)->[1]"
        assert str(Cochain.from_function(g, m, 2, lambda a, b: [0])) == "0"
        with pytest.raises(ValidationError):
            Cochain.from_function(g, m, 1, lambda a: [a])(0, 1)

    def test_coefficients_must_match_the_group(self):
        m = trivial_module(RingSpec(2, 1), (1,), cyclic(2))
        with pytest.raises(ValidationError):
            CochainComplex(cyclic(4), m, 2)


class TestCups:
    @classmethod
    def setup_class(cls):
        cls.rng = np.random.default_rng(3)
        cls.g = cyclic(3)
        cls.m = trivial_module(RingSpec(3, 2), (2,), cls.g)
        cls.pairing = product_pairing(cls.m)

    def _random(self, degree):
        size = self.g.order ** degree
        return Cochain(self.g, self.m, degree, self.rng.integers(0, 9, size=(size, 1)))

    @pytest.mark.parametrize("i, j", [(0, 1), (1, 1), (1, 2), (2, 0)])
    def test_leibniz(self, i, j):
        a, b = self._random(i), self._random(j)
        lhs = _delta(cup(a, b, self.pairing)).table
        rhs = cup(_delta(a), b, self.pairing).table + (-1) ** i * cup(a, _delta(b), self.pairing).table
        assert not ((lhs - rhs) % 9).any()

    def test_cup_of_degree_one_classes(self):
        # over Z/2 the square of the generator of H^1(Z/2, Z/2) generates H^2
        g = cyclic(2)
        m = trivial_module(RingSpec(2, 1), (1,), g)
        x = Cochain.from_function(g, m, 1, lambda a: [a])
        sq = cup(x, x, product_pairing(m))
        assert sq(1, 1).tolist() == [1]
        assert not _delta(sq).table.any()

    def test_total_cup_and_naturality(self):
        g = cyclic(2)
        ring = RingSpec(2, 2)
        m = trivial_module(ring, (2,), g)
        pairing = product_pairing(m)
        cup_map = total_cup(g, m, m, m, pairing, 2)
        cx = CochainComplex(g, m, 2)
        twice = cochain_map(ModuleMap(m, m, [[2]]), cx, cx)
        # <2x, y> = <x, 2y>
        check_cup_naturality(cup_map, cup_map, twice, twice)
        with pytest.raises(IncompatiblePairings):
            check_cup_naturality(cup_map, cup_map, twice, cochain_map(ModuleMap(m, m, [[1]]), cx, cx))


class TestFunctoriality:
    @classmethod
    def setup_class(cls):
        cls.g = cyclic(4)
        cls.m = trivial_module(RingSpec(2, 3), (3,), cls.g)

    def test_corestriction_after_restriction_is_the_index(self):
        res = restriction(self.g, (0, 2), self.m, 3)
        cor = corestriction(self.g, (0, 2), self.m, 3)
        both = compose(cor, res)
        for i in range(3):
            mat = both.induced(i)
            orders = 2 ** np.array(both.source.cohomology(i).exps)
            assert not ((mat - 2 * np.eye(len(orders), dtype=np.int64)) % orders[:, None]).any()

    def test_restriction_to_the_whole_group(self):
        res = restriction(self.g, (0, 1, 2, 3), self.m, 3)
        for i in range(3):
            n = len(res.source.cohomology(i).exps)
            orders = 2 ** np.array(res.source.cohomology(i).exps)
            assert not ((res.induced(i) - np.eye(n, dtype=np.int64)) % orders[:, None]).any()

    def test_bad_coset_representatives(self):
        with pytest.raises(ValidationError):
            corestriction(self.g, (0, 2), self.m, 2, reps=(0, 2))

    def test_inflation_in_degree_one(self):
        f = inflation(self.g, (0, 2), trivial_module(RingSpec(2, 1), (1,), self.g), 2)
        # Hom(Z/2, Z/2) -> Hom(Z/4, Z/2) is an isomorphism
        assert is_quasi_iso(f, [0, 1]).ok

    @pytest.mark.parametrize("name, sub", [("cyclic:4", (0, 2)), ("s3", (0, 3, 4)), ("s3", (0, 1))])
    def test_shapiro_is_a_quasi_isomorphism(self, name, sub):
        g = from_name(name)
        m = trivial_module(RingSpec(2, 1), (1,), g)
        assert is_quasi_iso(shapiro_map(g, sub, m, 3), range(3)).ok

    def test_shapiro_values_on_the_cyclic_group(self):
        g = cyclic(4)
        sh = shapiro_map(g, (0, 2), trivial_module(RingSpec(2, 1), (1,), g), 2)
        assert sh.source.cohomology(1).invariants == FinAb(2, (1,))
        assert sh.target.cohomology(1).invariants == FinAb(2, (1,))

    def test_conjugation_is_homotopic_to_identity(self):
        g = symmetric3()
        m = induced_module(trivial_module(RingSpec(3, 1), (1,), g), (0, 1))
        conjugation_homotopy(g, m, 1, 2)
        conjugation_homotopy(g, m, 3, 2)


class TestExactSequence:
    def test_multiplication_by_two_sequence(self):
        g = cyclic(2)
        ring = RingSpec(2, 2)
        a, b = trivial_module(ring, (1,), g), trivial_module(ring, (2,), g)
        les = cochain_les(g, ModuleMap(a, b, [[2]]), ModuleMap(b, a, [[1]]), 0, 1)
        groups = [str(h) for _, h in les.rows()]
        assert groups[:3] == ["Z/2", "Z/4", "Z/2"]
        assert groups[3:] == ["Z/2", "Z/2", "Z/2"]
