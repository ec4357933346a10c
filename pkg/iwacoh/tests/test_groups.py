import numpy as np
import pytest

from iwacoh.config import make_config
from iwacoh.errors import CapExceeded, NotASubgroup, NotNormal, ValidationError
from iwacoh.groups import (CosetSpace, FiniteGroup, all_small_groups, cyclic, dihedral4, from_name, quaternion8,
                           quotient, symmetric3)


@pytest.fixture(scope="module")
def s3():
    return symmetric3()


class TestFiniteGroup:
    def test_cyclic(self):
        g = cyclic(6)
        assert g.order == 6
        assert g.mul(4, 5) == 3
        assert g.inv(2) == 4
        assert g.generator() == 1
        assert g.is_abelian()

    def test_non_associative_table_names_the_triple(self):
        # a Latin square with identity 0 that is not a group
        table = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
        with pytest.raises(ValidationError, match="not associative at"):
            FiniteGroup(table)

    def test_identity_must_be_element_zero(self):
        with pytest.raises(ValidationError):
            FiniteGroup([[1, 0], [0, 1]])

    def test_order_cap(self):
        with pytest.raises(CapExceeded):
            cyclic(5, make_config(group_order_cap=4))

    def test_element_orders(self, s3):
        assert [s3.element_order(g) for g in range(6)] == [1, 2, 2, 3, 3, 2]
        assert not s3.is_abelian()
        assert not s3.is_cyclic()

    @pytest.mark.parametrize("group, order", [(dihedral4(), 8), (quaternion8(), 8)])
    def test_builtins_of_order_eight(self, group, order):
        assert group.order == order
        assert not group.is_abelian()

    def test_quaternion_has_one_involution(self):
        q8 = quaternion8()
        assert [g for g in range(8) if q8.element_order(g) == 2] == [4]


class TestSubgroups:
    def test_closure(self, s3):
        assert s3.closure([3]) == (0, 3, 4)
        assert s3.closure([1, 3]) == tuple(range(6))

    def test_subgroup_checks(self, s3):
        assert s3.check_subgroup([4, 0, 3]) == (0, 3, 4)
        with pytest.raises(NotASubgroup):
            s3.check_subgroup([0, 1, 2])
        with pytest.raises(NotASubgroup):
            s3.check_subgroup([1])

    def test_normality(self, s3):
        assert s3.check_normal([0, 3, 4]) == (0, 3, 4)
        with pytest.raises(NotNormal):
            s3.check_normal([0, 1])

    def test_cosets(self, s3):
        cosets = s3.left_cosets([0, 1])
        assert len(cosets) == 3
        assert cosets[0] == (0, 1)
        space = CosetSpace(s3, [0, 1])
        assert np.array_equal(space.action[0], np.arange(3))

    def test_quotient(self, s3):
        q, proj, reps = quotient(s3, [0, 3, 4])
        assert q.order == 2
        assert proj[1] == 1 and proj[3] == 0
        assert q.is_cyclic()

    def test_subgroup_and_homomorphism(self, s3):
        h, incl = s3.subgroup([0, 3, 4])
        assert h.order == 3 and h.is_cyclic()
        assert s3.is_homomorphism(h, incl)
        with pytest.raises(ValidationError):
            s3.check_homomorphism(cyclic(2), [0, 3])


class TestNames:
    @pytest.mark.parametrize("name, order", [
        ("cyclic:4", 4), ("s3", 6), ("d4", 8), ("q8", 8), ("trivial", 1), ("cyclic:2 x cyclic:2", 4)])
    def test_from_name(self, name, order):
        assert from_name(name).order == order

    @pytest.mark.parametrize("name", ["cyclic:x", "cyclic:0", "a5"])
    def test_bad_names(self, name):
        with pytest.raises(ValidationError):
            from_name(name)

    def test_all_small_groups(self):
        groups = all_small_groups(8)
        assert len(groups) == 14
        assert [g.order for g in groups] == sorted(g.order for g in groups)
        assert sum(1 for g in groups if g.order == 8) == 5
