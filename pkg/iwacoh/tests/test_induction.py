import numpy as np
import pytest

from iwacoh.errors import LevelOutOfRange, NotNested, NotNormal, NotStabilized, ValidationError
from iwacoh.groups import cyclic, symmetric3
from iwacoh.induction import (LambdaLevel, QuotientDatum, TowerSpec, check_dfm_naturality, coset_projection,
                              cyclic_module_tower, cyclic_p_tower, dfm_duality, induce_hom, induce_tensor,
                              iwasawa_cohomology, kronecker_iso, kronecker_matrix, tower_colim_cohomology,
                              tower_from_subgroups, tower_lim_cohomology, transition_maps)
from iwacoh.linalg import FinAb, RingSpec, image_order
from iwacoh.modules import GModule, ModuleMap, trivial_module


@pytest.fixture(scope="module")
def c4():
    return cyclic(4)


class TestInducedModules:
    def test_datum_needs_a_normal_subgroup(self):
        with pytest.raises(NotNormal):
            QuotientDatum(symmetric3(), (0, 1))

    def test_ranks_and_lambda_actions(self, c4):
        datum = QuotientDatum(c4, (0, 2))
        m = trivial_module(RingSpec(2, 2), (2,), c4)
        for build in (induce_hom, induce_tensor):
            ind = build(datum, m)
            assert ind.rank == 2
            assert ind.order == m.order ** 2
            assert ind.has_lambda()
            assert ind.lambda_commutes_with_group()
        kronecker_iso(datum, m)

    def test_tensor_side_follows_its_formulas(self):
        s3 = symmetric3()
        datum = QuotientDatum(s3, (0,))
        q = datum.quotient
        ten = induce_tensor(datum, trivial_module(RingSpec(3, 1), (1,), s3))
        for b in range(q.order):
            for a in range(q.order):
                # lambda.beta = beta lambda^-1, beta.lambda = lambda^-1 beta, sigma(beta ⊗ x) = sigma beta ⊗ x
                assert np.flatnonzero(ten.lambda_left[a][:, b]).tolist() == [q.table[b, q.inverse[a]]]
                assert np.flatnonzero(ten.lambda_right[a][:, b]).tolist() == [q.table[q.inverse[a], b]]
            for s in range(s3.order):
                assert np.flatnonzero(ten.action[s][:, b]).tolist() == [q.table[datum.projection[s], b]]

    def test_kronecker_map_is_checked(self):
        s3 = symmetric3()
        datum = QuotientDatum(s3, (0,))
        m = GModule(RingSpec(3, 1), (1,), s3, [[[1]], [[2]], [[2]], [[1]], [[1]], [[2]]])
        iso = kronecker_iso(datum, m)
        assert np.array_equal(iso.matrix, kronecker_matrix(datum, m))
        q = datum.quotient
        inverted = np.zeros((q.order, q.order), dtype=np.int64)
        inverted[q.inverse, np.arange(q.order)] = 1
        # beta -> delta_(beta^-1) is not G-equivariant
        with pytest.raises(ValidationError):
            ModuleMap(induce_tensor(datum, m), induce_hom(datum, m), inverted)

    def test_balance(self, c4):
        m = trivial_module(RingSpec(2, 1), (1,), c4)
        assert induce_hom(QuotientDatum(c4, (0, 2)), m).is_balanced()
        s3 = symmetric3()
        ind = induce_hom(QuotientDatum(s3, (0,)), trivial_module(RingSpec(2, 1), (1,), s3))
        assert not ind.is_balanced()

    def test_whole_group_gives_the_module_back(self, c4):
        twist = GModule(RingSpec(2, 2), (2,), c4, [[[1]], [[3]], [[1]], [[3]]])
        datum = QuotientDatum(c4, (0, 1, 2, 3))
        for build in (induce_hom, induce_tensor):
            ind = build(datum, twist)
            assert ind.exps == twist.exps
            assert np.array_equal(ind.action % 4, twist.action % 4)

    def test_group_algebra_level(self, c4):
        level = LambdaLevel(RingSpec(2, 1), QuotientDatum(c4, (0, 2)))
        assert level.rank == 2
        assert level.module.lambda_group.order == 2

    def test_module_must_live_on_the_datum_group(self, c4):
        datum = QuotientDatum(c4, (0, 2))
        with pytest.raises(ValidationError):
            induce_tensor(datum, trivial_module(RingSpec(2, 1), (1,), cyclic(2)))


class TestTransitions:
    def test_projection_then_trace_is_the_index(self, c4):
        m = trivial_module(RingSpec(2, 2), (2,), c4)
        fine, coarse = QuotientDatum(c4, (0,)), QuotientDatum(c4, (0, 2))
        maps = transition_maps(fine, coarse, m)
        assert maps.index == 2
        both = maps.tr_star_hom.matrix @ maps.pr_star_hom.matrix
        assert np.array_equal(both % 4, 2 * np.eye(2 * m.rank, dtype=np.int64))

    def test_projection_needs_nested_subgroups(self, c4):
        with pytest.raises(NotNested):
            coset_projection(QuotientDatum(c4, (0, 2)), QuotientDatum(c4, (0,)))


class TestDuality:
    @pytest.mark.parametrize("normal", [(0,), (0, 2), (0, 1, 2, 3)])
    def test_duality_is_bijective_and_natural(self, c4, normal):
        ring = RingSpec(2, 2)
        datum = QuotientDatum(c4, normal)
        twist = GModule(ring, (2,), c4, [[[1]], [[3]], [[1]], [[3]]])
        iso = dfm_duality(datum, twist)
        assert image_order(iso.matrix, iso.source.exps, iso.target.exps, ring) == iso.target.order
        f = ModuleMap(trivial_module(ring, (1,), c4), twist, [[2]])
        assert check_dfm_naturality(datum, f)

    def test_non_abelian_quotient(self):
        g = symmetric3()
        ring = RingSpec(3, 1)
        sign = GModule(ring, (1,), g, [[[1]], [[2]], [[2]], [[1]], [[1]], [[2]]])
        datum = QuotientDatum(g, (0, 3, 4))
        assert check_dfm_naturality(datum, ModuleMap(sign, sign, [[2]]))


class TestTowers:
    def test_levels_are_nested(self, c4):
        with pytest.raises(NotNested):
            tower_from_subgroups(c4, [(0,), (0, 2)])
        with pytest.raises(ValidationError):
            TowerSpec(c4, [])
        with pytest.raises(ValidationError):
            tower_from_subgroups(c4, [(0, 2)], window=0)

    def test_level_range(self):
        t = cyclic_p_tower(2, 3)
        assert [t.level(k).index for k in (1, 2, 3)] == [2, 4, 8]
        with pytest.raises(LevelOutOfRange):
            t.level(4)
        with pytest.raises(LevelOutOfRange):
            t.level(0)
        assert t.surjection(1).tolist() == [0, 1, 0, 1]

    @pytest.mark.parametrize("window", [1, 2])
    @pytest.mark.parametrize("degree, expected", [(1, FinAb(2, (1,))), (2, FinAb(2))])
    def test_colimit_over_the_two_tower(self, window, degree, expected):
        t = cyclic_p_tower(2, 4, window)
        report = tower_colim_cohomology(t, trivial_module(RingSpec(2, 1), (1,), t.group), degree)
        assert report.value == expected
        assert report.stabilized
        assert not report.cofinality_assumed
        assert report.levels == [FinAb(2, (1,))] * 4

    @pytest.mark.parametrize("p", [2, 3])
    def test_limit_of_cyclic_coefficients(self, p):
        g = cyclic(p)
        modules, transitions = cyclic_module_tower(RingSpec(p, 3), g, 3)
        assert tower_lim_cohomology(g, modules, transitions, 2).value == FinAb(p, (1,))
        # reduction kills the p-torsion of Z/p^(k+1)
        assert tower_lim_cohomology(g, modules, transitions, 1).value == FinAb(p)

    def test_limit_rejects_bad_transitions(self):
        g = cyclic(2)
        modules, transitions = cyclic_module_tower(RingSpec(2, 2), g, 2)
        with pytest.raises(ValidationError):
            tower_lim_cohomology(g, modules, [], 0)
        with pytest.raises(ValidationError, match="not surjective"):
            tower_lim_cohomology(g, modules, [ModuleMap(modules[1], modules[0], [[0]])], 0)
        with pytest.raises(ValidationError):
            cyclic_module_tower(RingSpec(2, 2), g, 3)

    def test_short_tower_does_not_stabilize(self):
        t = cyclic_p_tower(2, 2, window=2)
        with pytest.raises(NotStabilized) as info:
            tower_colim_cohomology(t, trivial_module(RingSpec(2, 1), (1,), t.group), 1)
        assert len(info.value.report.levels) == 2

    def test_iwasawa_levels_match_shapiro(self):
        t = cyclic_p_tower(2, 3)
        report = iwasawa_cohomology(t, trivial_module(RingSpec(2, 1), (1,), t.group), 0)
        assert all(report.checks["shapiro"].values())
        assert report.value == FinAb(2)
