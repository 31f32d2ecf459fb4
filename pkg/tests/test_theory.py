from fractions import Fraction as F

import numpy as np
import pytest

from awcd.detect import VariantTag
from awcd.theory import ak_bk, ak_bk_table, consistency_polygon, expected_counts_k1, polygon_area


class TestAkBk:
    def test_base(self):
        assert ak_bk(0.4, 0.1, 3, 1) == (0.4, 0.1)

    def test_one_step(self):
        assert ak_bk(0.5, 0.25, 2, 2) == (0.3125, 0.25)

    def test_difference_exact(self):
        th, rh = F(3, 7), F(1, 5)
        for K in range(2, 7):
            for k in range(1, 11):
                a, b = ak_bk(th, rh, K, k)
                assert a - b == (th - rh) ** k

    def test_bounds(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            rh, th = sorted(rng.random(2))
            K = int(rng.integers(2, 7))
            for k in range(1, 8):
                a, b = ak_bk(th, rh, K, k)
                assert -1e-12 <= b <= a * (1 + 1e-12)
                assert a <= K ** (k - 1) * (1 + 1e-12)

    def test_table(self):
        t = ak_bk_table(0.5, 0.25, 2, 3)
        assert [row[0] for row in t] == [1, 2, 3]
        for k, a, b in t:
            assert a - b == pytest.approx(0.25 ** k, abs=1e-15)

    def test_errors(self):
        with pytest.raises(ValueError):
            ak_bk(0.5, 0.1, 1, 2)
        with pytest.raises(ValueError):
            ak_bk(0.5, 0.1, 2, 0)


class TestConstants:
    def test_homogeneous(self):
        for K in range(2, 6):
            a, c, _ = expected_counts_k1(F(3, 10), F(3, 10), K, 50)
            assert a == c

    def test_substitution(self):
        n = 40
        assert expected_counts_k1(0.5, 0.0, 2, n) == (0.125 * n * n, 0.0, 0.25 * n * n)

    def test_k2_values(self):
        a, c, d = expected_counts_k1(F(3, 10), F(1, 10), 2, 300)
        assert a == 3240 and c == 2520 and d == 14400


class TestPolygons:
    def test_debiased_1(self):
        v = consistency_polygon(VariantTag.DEBIASED, 1).vertices
        assert v == ((0, 0), (0, F(-1, 6)), (F(-1, 2), F(-1, 12)), (F(-2, 3), 0))

    def test_circle_1(self):
        v = consistency_polygon("circle", 1).vertices
        assert v == ((0, 0), (0, F(-1, 6)), (F(-1, 3), F(-1, 9)), (F(-1, 2), 0))

    def test_circle_2(self):
        v = consistency_polygon("circle", 2).vertices
        assert v == ((F(-1, 2), 0), (F(-3, 5), F(-1, 25)), (F(-2, 3), 0))

    def test_k2_families(self):
        deb = consistency_polygon("debiased", 2).vertices
        assert deb == ((F(-1, 2), 0), (F(-3, 5), F(-1, 25)), (F(-2, 3), F(-1, 30)), (F(-5, 7), 0))
        plus = consistency_polygon("plus", 2).vertices
        assert plus == ((F(-1, 2), 0), (F(-3, 5), F(-1, 25)), (F(-3, 4), F(-1, 40)), (F(-4, 5), 0))

    def test_plus_k1_unsupported(self):
        with pytest.raises(ValueError):
            consistency_polygon("plus", 1)
        with pytest.raises(ValueError):
            consistency_polygon("debiased", 0)

    def test_areas_positive(self):
        for tag in ("circle", "debiased", "plus"):
            for k in range(1 if tag != "plus" else 2, 6):
                poly = consistency_polygon(tag, k)
                assert len(poly.vertices) >= 3
                assert polygon_area(poly) > 0

    def test_area_value(self):
        # shoelace on (0,0), (0,-1/6), (-1/2,-1/12), (-2/3,0)
        assert polygon_area(consistency_polygon("debiased", 1)) == F(1, 24) + F(1, 36)
