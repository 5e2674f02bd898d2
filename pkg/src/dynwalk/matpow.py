"""Matrix powers through determinants, remainders, and interpolation.

Three layers, each reused by the next:

* ``small_powers_via_series``: entries of A^0..A^m read off from the power
  series expansion of (I - zA)^{-1}.  Each entry series is a ratio of
  determinants (Cramer), and its coefficients come out of a unit lower
  triangular convolution solve, never an explicit inverse.
* ``power_large``: M(x)^k for a polynomial matrix by evaluating on a
  rational grid, reducing z^k modulo the characteristic polynomial at each
  point (so only powers below the dimension are ever formed), and
  interpolating the entries back.
* ``power_sum``: the truncated resolvent sum I + xM + (xM)^2 + ... used by
  the dynamic layer, computable either directly or through ``power_large``.

The magnitude preconditions (constant terms at most 1/(3n), entries at most
1/(3n) after evaluation) are enforced, not repaired: callers are expected to
produce admissible instances and a violation is a contract error.
"""

from __future__ import annotations

from dataclasses import dataclass

from .numerics import R1, Rat
from .poly import UniPoly, divide_monic, EvalGrid, interpolate
from .linalg import (
    PolyMatrix,
    RatMatrix,
    charpoly,
    det_poly,
    solve_unit_lower_triangular,
)

__all__ = [
    "PowerTable",
    "small_powers_via_series",
    "series_convolution_matrix",
    "power_large",
    "power_sum",
    "naive_power",
]


@dataclass
class PowerTable:
    """Matrix powers base^0 .. base^m, all exact."""

    base: RatMatrix
    powers: list

    def __getitem__(self, i: int) -> RatMatrix:
        return self.powers[i]

    def __len__(self) -> int:
        return len(self.powers)


def series_convolution_matrix(d_series: UniPoly, size: int) -> RatMatrix:
    """The unit lower triangular matrix M with M[i][k] = d_series[i-k].

    d_series must have constant term one (it is det(I - zA), whose constant
    term is det(I) = 1), which makes the matrix unit diagonal and its
    determinant one regardless of the entries of A.
    """
    if d_series[0] != 1:
        raise ValueError("series must have constant term one")
    rows = []
    for i in range(size):
        rows.append([d_series[i - k] if k <= i else Rat(0) for k in range(size)])
    return RatMatrix(rows)


def small_powers_via_series(mat: RatMatrix, max_power: int) -> PowerTable:
    """Entries of mat^0..mat^max_power via the resolvent series.

    Preconditions: the matrix is square, max_power <= n, and every absolute
    row sum is below one (strict contraction, so the resolvent series is
    honest; raw transition matrices sit exactly at one and must be rescaled
    or evaluated first).  For each entry (s, t) the series
    (I - zA)^{-1}[s, t] equals a signed minor determinant of I - zA divided
    by det(I - zA); matching coefficients of that identity gives a unit
    lower triangular system whose solution lists the walk sums A^i[s, t].
    """
    if not mat.is_square:
        raise ValueError("power table needs a square matrix")
    n = mat.nrows
    if n < 1:
        raise ValueError("empty matrix")
    if max_power > n:
        raise ValueError("max_power exceeds the dimension")
    if max_power < 0:
        raise ValueError("negative power")
    for row in mat.rows:
        if sum(abs(v) for v in row) >= 1:
            raise ValueError(
                "row sum reaches one; evaluate or rescale before powering"
            )
    # I - zA as a polynomial matrix in z
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            a = mat.rows[i][j]
            if i == j:
                row.append(UniPoly([R1, -a]))
            else:
                row.append(UniPoly([Rat(0), -a]))
        rows.append(row)
    resolvent = PolyMatrix(rows)
    d_series = det_poly(resolvent)
    if d_series[0] != 1:
        raise AssertionError("det(I - zA) lost its unit constant term")
    conv = series_convolution_matrix(d_series, max_power + 1)
    powers = [RatMatrix.zeros(n, n) for _ in range(max_power + 1)]
    for s in range(n):
        for t in range(n):
            minor_det = det_poly(resolvent.minor(t, s))
            if (s + t) % 2 == 1:
                minor_det = -minor_det
            rhs = [minor_det[i] for i in range(max_power + 1)]
            series = solve_unit_lower_triangular(conv, rhs)
            for i, v in enumerate(series):
                powers[i].rows[s][t] = v
    table = PowerTable(mat, powers)
    if table.powers[0] != RatMatrix.identity(n):
        raise AssertionError("zeroth power failed to come out as identity")
    return table


def naive_power(mat: PolyMatrix, k: int) -> PolyMatrix:
    """Plain repeated multiplication, used as the cross-checking route."""
    if not mat.is_square:
        raise ValueError("powering a non-square matrix")
    out = PolyMatrix.identity(mat.nrows)
    for _ in range(k):
        out = out.mul(mat)
    return out


def power_large(mat: PolyMatrix, k: int) -> PolyMatrix:
    """mat(x)^k for a polynomial matrix, without forming k products.

    Preconditions: entries have degree at most d with constant terms of
    magnitude at most 1/(3n), and k >= 1.  At each point x_i = i/(3dk)^2 of
    the evaluation grid the scalar matrix M_i is powered by reducing z^k
    modulo the characteristic polynomial of M_i (Cayley-Hamilton: the
    remainder r_i has degree below n, so r_i(M_i) needs only the small
    power table) and the degree <= dk entries of the result are recovered
    by exact interpolation.

    Contract errors from the inner layers propagate: if an evaluated matrix
    violates the small-power magnitude bound, that is the caller's instance
    to fix.
    """
    if not mat.is_square:
        raise ValueError("powering a non-square matrix")
    n = mat.nrows
    if n < 1:
        raise ValueError("empty matrix")
    if k < 1:
        raise ValueError("power must be at least one")
    d = max(mat.max_degree, 0)
    cap = Rat(1, 3 * n)
    for row in mat.rows:
        for e in row:
            if abs(e[0]) > cap:
                raise ValueError(
                    "constant term exceeds 1/(3n); not an admissible instance"
                )
    target = d * k
    grid = EvalGrid(target + 1, max(1, 3 * target))
    z_to_k = UniPoly.monomial(1, k)
    per_point = []
    for x in grid.points:
        m_x = mat.eval_at(x)
        chi = charpoly(m_x)
        if k < n:
            remainder = z_to_k
        else:
            _, remainder = divide_monic(z_to_k, chi)
        table = small_powers_via_series(m_x, max(remainder.degree, 0))
        acc = RatMatrix.zeros(n, n)
        for j in range(remainder.degree + 1):
            c = remainder[j]
            if c == 0:
                continue
            pj = table[j]
            for s in range(n):
                arow = acc.rows[s]
                prow = pj.rows[s]
                for t in range(n):
                    arow[t] += c * prow[t]
        per_point.append(acc)
    rows = []
    for s in range(n):
        row = []
        for t in range(n):
            row.append(interpolate(grid, [pp.rows[s][t] for pp in per_point]))
        rows.append(row)
    return PolyMatrix(rows)


def power_sum(mat: PolyMatrix, k: int, method: str = "direct") -> PolyMatrix:
    """I + (xM) + (xM)^2 + ... + (xM)^k with entries cut mod x^(k+1).

    ``method="direct"`` accumulates successive truncated products and stops
    early once a power vanishes under the truncation (each factor of xM
    raises the minimum degree, so termination is certain).
    ``method="charpoly"`` routes every power through ``power_large``; this is
    the cascade path, kept equivalent by cross-checking tests and selected
    by the dynamic layer for oversized instances.
    """
    if not mat.is_square:
        raise ValueError("power sum of a non-square matrix")
    n = mat.nrows
    if k < 0:
        raise ValueError("negative truncation")
    total = PolyMatrix.identity(n)
    if n == 0 or k == 0 or mat.is_zero():
        return total
    if method == "direct":
        shifted = mat.scale_poly(UniPoly.x(), trunc=k)
        term = shifted
        i = 1
        while i <= k and not term.is_zero():
            total = total.add(term)
            i += 1
            if i <= k:
                term = term.mul(shifted, trunc=k)
        return total
    if method == "charpoly":
        # x^i M^i contributes nothing once i exceeds k or once the minimum
        # entry degree pushes every coefficient past the truncation
        lows = [e.low_degree() for row in mat.rows for e in row if e]
        min_low = min(lows) if lows else 0
        for i in range(1, k + 1):
            if i * (1 + min_low) > k:
                break
            mk = power_large(mat, i)
            term = mk.scale_poly(UniPoly.monomial(1, i), trunc=k)
            total = total.add(term)
        return total
    raise ValueError(f"unknown power_sum method {method!r}")
