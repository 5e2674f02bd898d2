"""Two-stage matrix powering: series extraction and remainder powering."""

import random

import pytest

from dynwalk.numerics import Rat, rat
from dynwalk.poly import UniPoly
from dynwalk.linalg import PolyMatrix, RatMatrix, det_poly
from dynwalk.matpow import (
    naive_power,
    power_large,
    power_sum,
    series_convolution_matrix,
    small_powers_via_series,
)
from dynwalk.oracle import det_bareiss
from dynwalk.graph import DynGraph, lazy_transition

from conftest import small_entry_matrix


def poly_from(*coeffs):
    return UniPoly([Rat(c) for c in coeffs])


def resolvent(a: RatMatrix) -> PolyMatrix:
    return PolyMatrix.identity(a.nrows).sub(
        PolyMatrix.from_rational(a).scale_poly(UniPoly.x())
    )


def admissible_poly_matrix(rng, size, deg):
    rows = []
    for _ in range(size):
        row = []
        for _ in range(size):
            q = rng.randint(2, 9)
            coeffs = [Rat(rng.choice((-1, 1)) * rng.randint(0, q - 1), 3 * size * q)]
            coeffs += [
                Rat(rng.randint(-4, 4), rng.randint(1, 6)) for _ in range(deg)
            ]
            row.append(UniPoly(coeffs))
        rows.append(row)
    return PolyMatrix(rows)


# -- small powers -----------------------------------------------------------


def test_small_powers_of_zero():
    t = small_powers_via_series(RatMatrix.zeros(2, 2), 2)
    assert t[0] == RatMatrix.identity(2)
    assert t[1] == RatMatrix.zeros(2, 2)
    assert t[2] == RatMatrix.zeros(2, 2)
    assert len(t) == 3


def test_small_powers_quarter_swap():
    a = RatMatrix([[rat(0), rat(1, 4)], [rat(1, 4), rat(0)]])
    t = small_powers_via_series(a, 2)
    assert [t[i][0, 0] for i in range(3)] == [1, 0, rat(1, 16)]
    assert [t[i][0, 1] for i in range(3)] == [0, rat(1, 4), 0]


def test_small_powers_validation():
    a = RatMatrix.zeros(2, 2)
    with pytest.raises(ValueError):
        small_powers_via_series(a, 3)
    with pytest.raises(ValueError):
        small_powers_via_series(a, -1)
    with pytest.raises(ValueError):
        small_powers_via_series(RatMatrix([]), 0)
    with pytest.raises(ValueError):
        small_powers_via_series(RatMatrix([[1, 2]]), 1)


def test_small_powers_reject_unit_row_sums():
    g = DynGraph(2, 1, frozenset({(0, 1)}))
    with pytest.raises(ValueError, match="rescale"):
        small_powers_via_series(lazy_transition(g), 1)


def test_small_powers_match_naive_4x4():
    rng = random.Random(601)
    for _ in range(10):
        a = small_entry_matrix(rng, 4)
        t = small_powers_via_series(a, 4)
        power = RatMatrix.identity(4)
        for i in range(5):
            assert t[i] == power
            power = power.mul(a)


def test_power_table_steps_by_one_multiplication():
    rng = random.Random(602)
    a = small_entry_matrix(rng, 3)
    t = small_powers_via_series(a, 3)
    for i in range(3):
        assert t[i].mul(a) == t[i + 1]


# -- the convolution structure -----------------------------------------------


def test_series_convolution_matrix_layout():
    d = poly_from(1, rat(-1, 2), rat(1, 3))
    m = series_convolution_matrix(d, 4)
    assert m == RatMatrix(
        [
            [1, 0, 0, 0],
            [rat(-1, 2), 1, 0, 0],
            [rat(1, 3), rat(-1, 2), 1, 0],
            [0, rat(1, 3), rat(-1, 2), 1],
        ]
    )
    assert det_bareiss(m) == 1
    with pytest.raises(ValueError):
        series_convolution_matrix(poly_from(2, 1), 3)


def test_convolution_identity_from_independent_routes():
    """sum_k A^k[s,t] * D[i-k] = signed minor determinant coefficient,
    with every quantity computed by a route that never touches the
    series solver: naive powers on one side, determinants of I - zA and
    its minors on the other."""
    rng = random.Random(603)
    for _ in range(6):
        size = rng.randint(2, 4)
        a = small_entry_matrix(rng, size)
        res = resolvent(a)
        d = det_poly(res)
        powers = [RatMatrix.identity(size)]
        for _ in range(size):
            powers.append(powers[-1].mul(a))
        for s in range(size):
            for t in range(size):
                cof = det_poly(res.minor(t, s))
                if (s + t) % 2 == 1:
                    cof = -cof
                for i in range(size + 1):
                    lhs = sum(
                        (powers[k][s, t] * d[i - k] for k in range(i + 1)),
                        Rat(0),
                    )
                    assert lhs == cof[i]


# -- large powers -------------------------------------------------------------


def test_power_large_examples():
    m = PolyMatrix([[poly_from(rat(1, 4))]])
    assert power_large(m, 3) == PolyMatrix([[poly_from(rat(1, 64))]])
    nil = PolyMatrix(
        [[UniPoly.zero(), poly_from(0, rat(1, 2))], [UniPoly.zero(), UniPoly.zero()]]
    )
    assert power_large(nil, 1) == nil
    assert power_large(nil, 2) == PolyMatrix.zeros(2, 2)


def test_power_large_validation():
    m = PolyMatrix([[poly_from(rat(1, 4))]])
    with pytest.raises(ValueError):
        power_large(m, 0)
    with pytest.raises(ValueError):
        power_large(PolyMatrix.zeros(0, 0), 1)
    with pytest.raises(ValueError):
        power_large(PolyMatrix([[poly_from(1), poly_from(0)]]), 2)
    fat = PolyMatrix([[poly_from(rat(1, 2))]])
    with pytest.raises(ValueError, match="admissible"):
        power_large(fat, 2)


def test_power_large_matches_naive_sweep():
    rng = random.Random(604)
    for _ in range(8):
        size = rng.randint(1, 3)
        deg = rng.randint(0, 1)
        k = rng.randint(1, 9)
        m = admissible_poly_matrix(rng, size, deg)
        assert power_large(m, k) == naive_power(m, k)


# -- power sums ----------------------------------------------------------------


def test_power_sum_of_zero_matrix():
    assert power_sum(PolyMatrix.zeros(3, 3), 5) == PolyMatrix.identity(3)


def test_power_sum_scalar_geometric():
    m = PolyMatrix([[UniPoly.one()]])
    got = power_sum(m, 4)
    assert got == PolyMatrix([[poly_from(1, 1, 1, 1, 1)]])


def test_power_sum_truncates_at_k():
    assert power_sum(PolyMatrix([[UniPoly.one()]]), 0) == PolyMatrix.identity(1)


def test_power_sum_matches_untruncated_horner():
    rng = random.Random(605)
    for _ in range(6):
        m = PolyMatrix(
            [
                [
                    UniPoly([Rat(rng.randint(-3, 3), rng.randint(1, 4)) for _ in range(2)])
                    for _ in range(3)
                ]
                for _ in range(3)
            ]
        )
        k = 6
        shifted = m.scale_poly(UniPoly.x())
        acc = PolyMatrix.identity(3)
        for i in range(1, k + 1):
            acc = acc.add(naive_power(shifted, i))
        assert power_sum(m, k) == acc.truncated(k)


def test_power_sum_charpoly_route_agrees():
    rng = random.Random(606)
    for _ in range(4):
        size = rng.randint(1, 3)
        m = admissible_poly_matrix(rng, size, 1)
        k = rng.randint(1, 6)
        assert power_sum(m, k, method="charpoly") == power_sum(m, k, method="direct")


def test_power_sum_validation():
    m = PolyMatrix.identity(2)
    with pytest.raises(ValueError):
        power_sum(m, -1)
    with pytest.raises(ValueError):
        power_sum(m, 3, method="bogus")
    with pytest.raises(ValueError):
        power_sum(PolyMatrix([[poly_from(1), poly_from(0)]]), 2)
