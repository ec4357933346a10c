import numpy as np
import pytest

from iwacoh.cochains import CochainComplex
from iwacoh.compact import (LocalDatum, Place, compact_cohomology, compact_complex, compact_corestriction,
                            compact_cups, compact_les, compact_restriction, duality_triangle, induced_datum,
                            shapiro_compact)
from iwacoh.complexes import ChainMap
from iwacoh.errors import MalformedDatum, ValidationError
from iwacoh.groups import cyclic, from_name, trivial
from iwacoh.linalg import FinAb, RingSpec
from iwacoh.modules import GModule, trivial_module


def point_place():
    return Place(trivial(), [0])


class TestCompactComplex:
    @pytest.mark.parametrize("name", ["trivial", "cyclic:2", "cyclic:3", "cyclic:2 x cyclic:2"])
    def test_no_places_gives_global_cohomology(self, name):
        g = from_name(name)
        m = trivial_module(RingSpec(2, 2), (2,), g)
        cc = compact_complex(LocalDatum(g), m, 2)
        glob = CochainComplex(g, m, 2)
        for i in range(2):
            assert cc.cohomology(i) == glob.cohomology(i).invariants

    def test_identity_place_is_acyclic(self):
        g = cyclic(3)
        d = LocalDatum(g, [Place(g, np.arange(3))])
        cc = compact_complex(d, trivial_module(RingSpec(3, 1), (1,), g), 3)
        assert cc.complex.is_acyclic(range(0, cc.reliable_top + 1))

    def test_point_place(self):
        # H^0(Z/2) -> H^0(1) is an isomorphism and H^1(1) = 0, so H^1_c = H^1(Z/2)
        g = cyclic(2)
        d = LocalDatum(g, [point_place()])
        m = trivial_module(RingSpec(2, 1), (1,), g)
        assert compact_cohomology(d, m, 0) == FinAb(2)
        assert compact_cohomology(d, m, 1) == FinAb(2, (1,))

    def test_places_are_homomorphisms(self):
        with pytest.raises(ValidationError):
            LocalDatum(cyclic(3), [Place(cyclic(2), [0, 1])])

    def test_coefficients_must_match(self):
        with pytest.raises(ValidationError):
            compact_complex(LocalDatum(cyclic(2)), trivial_module(RingSpec(2, 1), (1,), cyclic(4)), 2)

    def test_tate_places(self):
        g = cyclic(2)
        d = LocalDatum(g, [Place(g, [0, 1], tate=True)])
        assert d.has_tate
        m = trivial_module(RingSpec(2, 1), (1,), g)
        compact_complex(d, m, 2).complex.check()
        with pytest.raises(MalformedDatum):
            compact_cups(d, m, 2)


class TestLongExactSequence:
    def test_labels_and_groups(self):
        g = cyclic(2)
        d = LocalDatum(g, [point_place(), Place(g, [0, 1], label="all")])
        assert [p.label for p in d.places] == ["v0", "all"]
        les = compact_les(d, trivial_module(RingSpec(2, 2), (2,), g), 2)
        labels = [label for label, _ in les.rows()]
        assert labels[:3] == ["loc[-1]^0", "c^0", "glob^0"]
        assert les.groups["glob", 0] == FinAb(2, (2,))


class TestCups:
    def test_cone_homotopy_and_restricted_cups(self):
        g = cyclic(2)
        d = LocalDatum(g, [point_place()])
        sign = GModule(RingSpec(2, 2), (2,), g, [[[1]], [[3]]])
        cups = compact_cups(d, sign, 2)
        assert isinstance(cups.cup_c, ChainMap)
        assert isinstance(cups.c_cup, ChainMap)
        # s runs from cup1 to cup0: cup0 - cup1 = d s + s d
        assert cups.homotopy.source_map is cups.cups.cup1
        assert cups.homotopy.target_map is cups.cups.cup0
        cups.homotopy.check()

    def test_custom_pairing_needs_modules(self):
        g = cyclic(2)
        m = trivial_module(RingSpec(2, 1), (1,), g)
        with pytest.raises(ValidationError):
            compact_cups(LocalDatum(g), m, 2, pairing=[[1]])


class TestDualityTriangle:
    def test_identity_place_first_row(self):
        g = cyclic(2)
        d = LocalDatum(g, [Place(g, [0, 1])])
        dt = duality_triangle(d, trivial_module(RingSpec(2, 1), (1,), g), 2, 3)
        assert dt.report.window == (0, 2)
        assert dt.report.rows["X"]
        assert dt.trace.target.rank == 0

    def test_tate_places_are_rejected(self):
        g = cyclic(2)
        d = LocalDatum(g, [Place(g, [0, 1], tate=True)])
        with pytest.raises(MalformedDatum):
            duality_triangle(d, trivial_module(RingSpec(2, 1), (1,), g), 2, 3)


class TestChangeOfGroup:
    @classmethod
    def setup_class(cls):
        cls.g = cyclic(4)
        cls.m = trivial_module(RingSpec(2, 1), (1,), cls.g)

    def test_induced_places_follow_cosets(self):
        d = LocalDatum(self.g, [point_place()])
        du, induced, incl = induced_datum(d, (0, 2))
        assert du.group.order == 2
        assert [ip.sigma for ip in induced] == [0, 1]
        assert incl.tolist() == [0, 2]

    def test_restriction_and_corestriction_are_chain_maps(self):
        d = LocalDatum(self.g, [point_place()])
        res = compact_restriction(d, (0, 2), self.m, 2)
        assert res.homotopy is not None
        res.map.check()
        compact_corestriction(d, (0, 2), self.m, 2).map.check()

    def test_corestriction_takes_one_place(self):
        d = LocalDatum(self.g, [point_place(), point_place()])
        with pytest.raises(MalformedDatum):
            compact_corestriction(d, (0, 2), self.m, 2)

    @pytest.mark.parametrize("places", [(), (Place(cyclic(2), [0, 2]),), (Place(trivial(), [0]),)])
    def test_shapiro(self, places):
        comparison = shapiro_compact(LocalDatum(self.g, places), (0, 2), self.m, 2)
        assert comparison.report.ok
        assert all(r.ok for r in comparison.local_reports)
        assert all(comparison.cor_res.values())
        assert comparison.ok
