import numpy as np
import pytest

from iwacoh.config import make_config
from iwacoh.errors import CapExceeded, ValidationError
from iwacoh.groups import cyclic
from iwacoh.linalg import FinAb, RingSpec
from iwacoh.modules import GModule, trivial_module
from iwacoh.oracles import (elements, invariants_oracle, kernel_set, quotient_invariants, span_set,
                            subquotient_oracle, tate_oracle)

R4 = RingSpec(2, 2)


class TestEnumeration:
    def test_elements_in_lexicographic_order(self):
        xs = elements((1, 2), R4)
        assert len(xs) == 8
        assert xs[:3].tolist() == [[0, 0], [0, 1], [0, 2]]
        assert elements((), R4).shape == (1, 0)

    def test_enumeration_limit(self):
        with pytest.raises(CapExceeded):
            elements((2, 2, 2), R4, make_config(enumeration_limit=32))

    def test_span_and_kernel(self):
        assert span_set([[2]], (2,), R4) == {(0,), (2,)}
        assert kernel_set([[2]], (2,), (2,), R4) == {(0,), (2,)}
        assert span_set(np.zeros((0, 0)), (), R4) == {()}

    def test_quotient_invariants(self):
        full = {tuple(int(v) for v in x) for x in elements((1, 2), R4)}
        assert quotient_invariants(full, {(0, 0)}, (1, 2), R4) == FinAb.from_exps(2, [1, 2])
        assert subquotient_oracle([[0, 1]], (1, 2), [[0, 2]], R4) == FinAb(2, (1,))


class TestModuleOracles:
    def test_invariants(self):
        sign = GModule(R4, (2,), cyclic(2), [[[1]], [[3]]])
        assert invariants_oracle(sign) == FinAb(2, (1,))

    @pytest.mark.parametrize("degree, expected", [(0, FinAb(2, (1,))), (-1, FinAb(2, (1,)))])
    def test_tate_of_trivial_module(self, degree, expected):
        assert tate_oracle(trivial_module(R4, (2,), cyclic(2)), degree) == expected

    def test_tate_degrees_covered(self):
        with pytest.raises(ValidationError):
            tate_oracle(trivial_module(R4, (2,), cyclic(2)), 1)
