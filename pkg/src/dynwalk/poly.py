"""Dense univariate polynomials over exact rationals.

Everything here is exact.  Polynomials are immutable coefficient tuples in
ascending order with no trailing zeros; the zero polynomial is the empty
tuple and reports degree -1 (standing in for minus infinity).

The two nontrivial algorithms are:

* ``interpolate``: exact reconstruction of the unique degree <= m polynomial
  through the m+1 grid points, done as the triangular (Newton) solve of the
  grid's Vandermonde system.
* ``divide_monic``: division with remainder of monic polynomials through
  coefficient reversal and a truncated power-series inverse of the divisor,
  rather than long division.
"""

from __future__ import annotations

from dataclasses import dataclass

from .numerics import R0, R1, Rat

__all__ = ["UniPoly", "EvalGrid", "interpolate", "divide_monic", "mul_mod_deg"]


def _trim(coeffs):
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return coeffs[:n]


class UniPoly:
    """A univariate polynomial with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        self.coeffs = tuple(_trim([Rat(c) for c in coeffs]))

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "UniPoly":
        return _ZERO

    @staticmethod
    def one() -> "UniPoly":
        return _ONE

    @staticmethod
    def x() -> "UniPoly":
        return _X

    @staticmethod
    def monomial(coeff, power: int) -> "UniPoly":
        coeff = Rat(coeff)
        if coeff == 0:
            return _ZERO
        return UniPoly([R0] * power + [coeff])

    @staticmethod
    def constant(c) -> "UniPoly":
        return UniPoly([Rat(c)])

    # -- structure ----------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, i: int):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return R0

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "UniPoly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*x")
            else:
                terms.append(f"{c}*x^{i}")
        return "UniPoly(" + " + ".join(terms) + ")"

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "UniPoly") -> "UniPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return UniPoly(out)

    def __neg__(self) -> "UniPoly":
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return _ZERO
        out = [R0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                if bj != 0:
                    out[i + j] += ai * bj
        return UniPoly(out)

    def scale(self, c) -> "UniPoly":
        c = Rat(c)
        if c == 0:
            return _ZERO
        return UniPoly([c * a for a in self.coeffs])

    def mul_mod_deg(self, other: "UniPoly", k: int) -> "UniPoly":
        """Product truncated to degree k: self*other mod x^(k+1)."""
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return _ZERO
        top = min(len(a) + len(b) - 2, k)
        if top < 0:
            return _ZERO
        out = [R0] * (top + 1)
        for i, ai in enumerate(a):
            if ai == 0 or i > top:
                continue
            jmax = min(len(b) - 1, top - i)
            for j in range(jmax + 1):
                bj = b[j]
                if bj != 0:
                    out[i + j] += ai * bj
        return UniPoly(out)

    def truncated(self, k: int) -> "UniPoly":
        """Drop every term of degree above k."""
        if self.degree <= k:
            return self
        return UniPoly(self.coeffs[: k + 1])

    def eval(self, point):
        """Horner evaluation at an exact rational point."""
        point = Rat(point)
        acc = R0
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return acc

    def reversed_at(self, n: int) -> "UniPoly":
        """Coefficient reversal x^n * p(1/x); requires n >= degree."""
        if n < self.degree:
            raise ValueError("reversal order below degree")
        out = [R0] * (n + 1)
        for i, c in enumerate(self.coeffs):
            out[n - i] = c
        return UniPoly(out)

    def derivative(self) -> "UniPoly":
        return UniPoly([Rat(i) * c for i, c in enumerate(self.coeffs) if i > 0])

    def max_abs_coeff(self):
        return max((abs(c) for c in self.coeffs), default=R0)

    def low_degree(self) -> int:
        """Smallest exponent with a nonzero coefficient, -1 for zero."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return -1


_ZERO = UniPoly()
_ONE = UniPoly([R1])
_X = UniPoly([R0, R1])


def mul_mod_deg(a: UniPoly, b: UniPoly, k: int) -> UniPoly:
    return a.mul_mod_deg(b, k)


@dataclass(frozen=True)
class EvalGrid:
    """Rational evaluation points x_i = i / scale**2 for i in 0..count-1.

    The default scale for a grid supporting degree-m interpolation is 3*m,
    giving points i/(3m)^2 in [0, 1) that keep evaluated matrix entries
    small.  Interpolating perturbed values on this grid amplifies the
    perturbation by the Vandermonde inverse norm, which grows with the
    degree; the tests measure that norm exactly per grid and bound the
    coefficient error by norm * 2^-B rather than by 2^-B alone (a plain
    2^-B bound already fails at degree one: noise at the point 1/9 lands
    on the slope multiplied by nine).
    """

    count: int
    scale: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("grid needs at least one point")
        if self.scale == 0:
            object.__setattr__(self, "scale", max(1, 3 * (self.count - 1)))
        if self.scale < 1:
            raise ValueError("scale must be a positive integer")

    @property
    def points(self):
        s2 = self.scale * self.scale
        return [Rat(i, s2) for i in range(self.count)]

    def vandermonde(self):
        """The grid's Vandermonde matrix as rows of rationals."""
        return [[x**j for j in range(self.count)] for x in self.points]


def interpolate(grid: EvalGrid, values) -> UniPoly:
    """The unique polynomial of degree < grid.count through the grid values.

    Implemented as the exact triangular solve of the grid's Vandermonde
    system in Newton form: divided differences give the triangular factor's
    solution and the basis expansion recovers monomial coefficients.  Tests
    cross-check against a dense Gaussian solve of the same system.
    """
    values = [Rat(v) for v in values]
    if len(values) != grid.count:
        raise ValueError(
            f"expected {grid.count} values on the grid, got {len(values)}"
        )
    xs = grid.points
    # divided-difference coefficients, in place
    dd = list(values)
    m = len(xs)
    for order in range(1, m):
        for i in range(m - 1, order - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - order])
    # expand the Newton form to monomial coefficients
    acc = UniPoly.constant(dd[m - 1])
    for i in range(m - 2, -1, -1):
        factor = UniPoly([-xs[i], R1])
        acc = acc * factor + UniPoly.constant(dd[i])
    return acc


def divide_monic(g: UniPoly, f: UniPoly):
    """Quotient and remainder of monic g by monic f, with deg r < deg f.

    Both inputs must be monic and deg g >= deg f >= 1.  The quotient is
    found by reversing coefficients and inverting the reversed divisor as a
    truncated power series (its constant term is one, so the geometric sum
    of (1 - f_R) converges at the needed truncation order); the remainder
    falls out as g - q*f.
    """
    if not f.is_monic() or not g.is_monic():
        raise ValueError("divide_monic needs monic operands")
    n, m = g.degree, f.degree
    if m < 1:
        raise ValueError("divisor must have degree at least one")
    if n < m:
        raise ValueError("dividend degree below divisor degree")
    j = n - m
    f_rev = f.reversed_at(m)
    u = (_ONE - f_rev).truncated(j)  # zero constant term
    # series inverse of f_rev up to degree j: sum of u^i
    inv = _ONE
    for _ in range(j):
        inv = (_ONE + u.mul_mod_deg(inv, j)).truncated(j)
    g_rev = g.reversed_at(n)
    q_rev = inv.mul_mod_deg(g_rev, j)
    q = UniPoly([q_rev[j - i] for i in range(j + 1)])
    r = g - q * f
    if r.degree >= m:
        raise AssertionError("division produced an oversized remainder")
    return q, r
