"""Closed-form quantities from the consistency analysis.

The functions are generic over the number type: pass :class:`fractions.Fraction`
for exact arithmetic, floats otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as F

from .detect import VariantTag


def ak_bk(theta, rho, K: int, k: int):
    """Expected ring-size coefficients ``(a_k, b_k)`` of the exact-``k`` ring.

    ``a_k n^k`` approximates how many ring members share the centre's block,
    ``b_k n^k`` how many lie in one particular other block.
    """
    if K < 2:
        raise ValueError("K must be >= 2")
    if k < 1:
        raise ValueError("k must be >= 1")
    a, b = theta, rho
    for _ in range(k - 1):
        a, b = theta * a + (K - 1) * rho * b, rho * a + theta * b + (K - 2) * rho * b
    return a, b


def ak_bk_table(theta, rho, K: int, k_max: int):
    return [(k,) + ak_bk(theta, rho, K, k) for k in range(1, k_max + 1)]


def expected_counts_k1(theta, rho, K: int, n):
    """Leading-order ``(a, c, d)`` for one-hop starting sets.

    ``a`` and ``c`` are the expected debiased edge counts between the
    neighbourhoods of a same-block pair and of a cross-block pair; ``d`` is
    the expected pair count.
    """
    if K < 2:
        raise ValueError("K must be >= 2")
    n2 = n * n
    a = n2 * (theta ** 3 + 3 * (K - 1) * theta * rho ** 2 + (K - 1) * (K - 2) * rho ** 3)
    c = n2 * (3 * theta ** 2 * rho + 3 * (K - 2) * theta * rho ** 2 + ((K - 1) * (K - 2) + 1) * rho ** 3)
    d = n2 * (theta ** 2 + 2 * (K - 1) * theta * rho + (K - 1) ** 2 * rho ** 2)
    return a, c, d


@dataclass(frozen=True)
class PolygonSpec:
    """Consistency region in the (log_n theta, log_n((theta - rho)/theta)) plane."""

    variant: VariantTag
    k: int
    vertices: tuple


def consistency_polygon(variant, k: int) -> PolygonSpec:
    tag = VariantTag(getattr(variant, "tag", variant))
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        if tag is VariantTag.DEBIASED:
            pts = [(F(0), F(0)), (F(0), F(-1, 6)), (F(-1, 2), F(-1, 12)), (F(-2, 3), F(0))]
        elif tag is VariantTag.CIRCLE:
            pts = [(F(0), F(0)), (F(0), F(-1, 6)), (F(-1, 3), F(-1, 9)), (F(-1, 2), F(0))]
        else:
            raise ValueError("the plus variant has no separate polygon for k = 1")
        return PolygonSpec(tag, k, tuple(pts))

    first = (F(-(k - 1), k), F(0))
    second = (F(-(2 * k - 1), 2 * k + 1), F(-1, (2 * k + 1) ** 2))
    if tag is VariantTag.DEBIASED:
        pts = [first, second,
               (F(-k, k + 1), F(-1, (4 * k + 2) * (k + 1))),
               (F(-(2 * k + 1), 2 * k + 3), F(0))]
    elif tag is VariantTag.PLUS:
        pts = [first, second,
               (F(-(2 * k - 1), 2 * k), F(-1, 2 * k * (4 * k + 2))),
               (F(-2 * k, 2 * k + 1), F(0))]
    else:
        pts = [first, second, (F(-k, k + 1), F(0))]
    return PolygonSpec(tag, k, tuple(pts))


def polygon_area(poly: PolygonSpec) -> F:
    """Shoelace area (exact for rational vertices)."""
    v = poly.vertices
    s = sum(v[i][0] * v[(i + 1) % len(v)][1] - v[(i + 1) % len(v)][0] * v[i][1] for i in range(len(v)))
    return abs(s) / 2
