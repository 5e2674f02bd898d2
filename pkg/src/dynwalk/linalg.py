"""Exact matrix kernels: rational, polynomial, and prime-field matrices.

Three determinant routes live here and everything downstream reuses them:

* ``det_mod_p``: Gaussian elimination over Z_p.
* ``det_rational_crt``: exact rational determinant by clearing denominators,
  taking residues modulo enough primes above 2**16 to cover twice the
  Hadamard bound, and CRT reconstruction.
* ``det_poly``: determinant of a polynomial matrix by evaluation on a
  rational grid, rational determinants per point, and exact interpolation.

``charpoly`` and the unit triangular solver round out what the power
machinery in :mod:`dynwalk.matpow` needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .numerics import R0, R1, Rat
from .poly import EvalGrid, UniPoly, interpolate

__all__ = [
    "RatMatrix",
    "PolyMatrix",
    "ModMatrix",
    "det_mod_p",
    "det_rational_crt",
    "det_poly",
    "charpoly",
    "solve_unit_lower_triangular",
    "primes_above",
]


class RatMatrix:
    """Dense matrix of exact rationals."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows):
        self.rows = [[Rat(v) for v in row] for row in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged matrix")

    @staticmethod
    def identity(n: int) -> "RatMatrix":
        return RatMatrix([[R1 if i == j else R0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(nrows: int, ncols: int) -> "RatMatrix":
        return RatMatrix([[R0] * ncols for _ in range(nrows)])

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if isinstance(other, RatMatrix):
            return self.rows == other.rows
        return NotImplemented

    def __hash__(self):
        return hash(tuple(tuple(r) for r in self.rows))

    def __repr__(self):
        return f"RatMatrix({self.rows!r})"

    def mul(self, other: "RatMatrix") -> "RatMatrix":
        if self.ncols != other.nrows:
            raise ValueError("inner dimensions disagree")
        out = [[R0] * other.ncols for _ in range(self.nrows)]
        for i in range(self.nrows):
            srow = self.rows[i]
            orow = out[i]
            for k in range(self.ncols):
                a = srow[k]
                if a == 0:
                    continue
                brow = other.rows[k]
                for j in range(other.ncols):
                    b = brow[j]
                    if b != 0:
                        orow[j] += a * b
        return RatMatrix(out)

    def add(self, other: "RatMatrix") -> "RatMatrix":
        self._same_shape(other)
        return RatMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ]
        )

    def sub(self, other: "RatMatrix") -> "RatMatrix":
        self._same_shape(other)
        return RatMatrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ]
        )

    def _same_shape(self, other):
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise ValueError("shape mismatch")

    def minor(self, drop_row: int, drop_col: int) -> "RatMatrix":
        rows = [
            [v for j, v in enumerate(row) if j != drop_col]
            for i, row in enumerate(self.rows)
            if i != drop_row
        ]
        return RatMatrix(rows)

    def max_abs_entry(self):
        best = R0
        for row in self.rows:
            for v in row:
                a = abs(v)
                if a > best:
                    best = a
        return best

    def max_denominator_bits(self) -> int:
        bits = 0
        for row in self.rows:
            for v in row:
                bits = max(bits, (int(v.denominator) - 1).bit_length())
        return bits


class PolyMatrix:
    """Dense matrix with UniPoly entries; may be rectangular."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows):
        self.rows = [
            [e if isinstance(e, UniPoly) else UniPoly.constant(e) for e in row]
            for row in rows
        ]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged matrix")

    @staticmethod
    def identity(n: int) -> "PolyMatrix":
        one, zero = UniPoly.one(), UniPoly.zero()
        return PolyMatrix(
            [[one if i == j else zero for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zeros(nrows: int, ncols: int) -> "PolyMatrix":
        zero = UniPoly.zero()
        return PolyMatrix([[zero] * ncols for _ in range(nrows)])

    @staticmethod
    def from_rational(m: RatMatrix) -> "PolyMatrix":
        return PolyMatrix(
            [[UniPoly.constant(v) for v in row] for row in m.rows]
        )

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    @property
    def max_degree(self) -> int:
        d = -1
        for row in self.rows:
            for e in row:
                if e.degree > d:
                    d = e.degree
        return d

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if isinstance(other, PolyMatrix):
            return self.rows == other.rows
        return NotImplemented

    def __repr__(self):
        return f"PolyMatrix({self.nrows}x{self.ncols})"

    def mul(self, other: "PolyMatrix", trunc: int | None = None) -> "PolyMatrix":
        """Matrix product; with ``trunc`` every entry is cut mod x^(trunc+1)."""
        if self.ncols != other.nrows:
            raise ValueError("inner dimensions disagree")
        zero = UniPoly.zero()
        out = [[zero] * other.ncols for _ in range(self.nrows)]
        for i in range(self.nrows):
            srow = self.rows[i]
            orow = out[i]
            for k in range(self.ncols):
                a = srow[k]
                if not a:
                    continue
                brow = other.rows[k]
                for j in range(other.ncols):
                    b = brow[j]
                    if b:
                        p = a.mul_mod_deg(b, trunc) if trunc is not None else a * b
                        orow[j] = orow[j] + p
        return PolyMatrix(out)

    def add(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise ValueError("shape mismatch")
        return PolyMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ]
        )

    def sub(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise ValueError("shape mismatch")
        return PolyMatrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ]
        )

    def scale_poly(self, p: UniPoly, trunc: int | None = None) -> "PolyMatrix":
        if trunc is not None:
            return PolyMatrix(
                [[p.mul_mod_deg(e, trunc) for e in row] for row in self.rows]
            )
        return PolyMatrix([[p * e for e in row] for row in self.rows])

    def truncated(self, k: int) -> "PolyMatrix":
        return PolyMatrix([[e.truncated(k) for e in row] for row in self.rows])

    def eval_at(self, point) -> RatMatrix:
        point = Rat(point)
        return RatMatrix([[e.eval(point) for e in row] for row in self.rows])

    def minor(self, drop_row: int, drop_col: int) -> "PolyMatrix":
        rows = [
            [e for j, e in enumerate(row) if j != drop_col]
            for i, row in enumerate(self.rows)
            if i != drop_row
        ]
        if not rows:
            return PolyMatrix.zeros(0, 0)
        return PolyMatrix(rows)

    def is_zero(self) -> bool:
        return all(not e for row in self.rows for e in row)


@dataclass(frozen=True)
class ModMatrix:
    """Square integer matrix with entries reduced modulo a prime."""

    rows: tuple
    p: int

    @staticmethod
    def make(rows, p: int) -> "ModMatrix":
        if not _is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        reduced = tuple(tuple(int(v) % p for v in row) for row in rows)
        n = len(reduced)
        if any(len(r) != n for r in reduced):
            raise ValueError("ModMatrix must be square")
        return ModMatrix(reduced, p)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def primes_above(floor: int):
    """Yield primes strictly above ``floor`` in increasing order."""
    candidate = floor + 1
    if candidate % 2 == 0:
        candidate += 1
    if floor < 2:
        yield 2
    while True:
        if _is_prime(candidate):
            yield candidate
        candidate += 2


# Residue moduli for CRT determinants: primes above 2**16 so that pivots
# stay invertible for the scaled integer matrices we feed in.  The pool is
# shared and grown on demand; determinants are called in inner loops.
_PRIME_POOL: list[int] = []
_PRIME_GEN = primes_above(1 << 16)


def _primes_with_product_exceeding(target: int):
    out = []
    prod = 1
    i = 0
    while prod <= target:
        if i == len(_PRIME_POOL):
            _PRIME_POOL.append(next(_PRIME_GEN))
        p = _PRIME_POOL[i]
        out.append(p)
        prod *= p
        i += 1
    return out


def det_mod_p(m: ModMatrix) -> int:
    """Determinant over Z_p by Gaussian elimination with row pivoting."""
    p = m.p
    n = len(m.rows)
    if n == 0:
        return 1 % p
    a = [list(row) for row in m.rows]
    det = 1
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if a[r][col] % p != 0:
                pivot = r
                break
        if pivot is None:
            return 0
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = (-det) % p
        pv = a[col][col] % p
        det = (det * pv) % p
        inv = pow(pv, p - 2, p)
        for r in range(col + 1, n):
            factor = (a[r][col] * inv) % p
            if factor == 0:
                continue
            arow = a[r]
            crow = a[col]
            for j in range(col, n):
                arow[j] = (arow[j] - factor * crow[j]) % p
    return det % p


def _hadamard_bound(int_rows) -> int:
    """Integer upper bound on |det| via row norms."""
    bound = 1
    for row in int_rows:
        s = sum(v * v for v in row)
        bound *= math.isqrt(s) + 1
    return bound


def det_rational_crt(m: RatMatrix, b: int) -> Rat:
    """Exact determinant of a rational matrix via residues and CRT.

    ``b`` declares the per-entry denominator budget: every entry must be
    representable with a denominator of at most b bits.  The matrix is
    scaled by the common denominator D, the integer determinant is
    recovered from its residues modulo fresh primes above 2**16 whose
    product exceeds twice the Hadamard bound, and the result is divided
    by D**n.
    """
    if not m.is_square:
        raise ValueError("determinant of a non-square matrix")
    n = m.nrows
    if n == 0:
        return R1
    cap = 1 << b
    d = 1
    for row in m.rows:
        for v in row:
            den = int(v.denominator)
            if den > cap:
                raise ValueError(
                    f"entry denominator {den} exceeds the declared {b}-bit budget"
                )
            d = d * den // math.gcd(d, den)
    int_rows = [[int(v * d) for v in row] for row in m.rows]
    bound = _hadamard_bound(int_rows)
    # enough primes that their product certifies the signed value
    primes = _primes_with_product_exceeding(2 * bound)
    # residues and incremental CRT
    det = 0
    modulus = 1
    for p in primes:
        rp = det_mod_p(ModMatrix.make(int_rows, p))
        if modulus == 1:
            det, modulus = rp, p
            continue
        # lift: det' = det + modulus * t with t = (rp - det)/modulus mod p
        t = ((rp - det) * pow(modulus % p, p - 2, p)) % p
        det = det + modulus * t
        modulus *= p
    if det > modulus // 2:
        det -= modulus
    if abs(det) > bound:
        raise AssertionError("reconstructed determinant exceeds its bound")
    return Rat(det, 1) / Rat(d, 1) ** n


def det_poly(m: PolyMatrix) -> UniPoly:
    """Determinant of a square polynomial matrix, exactly.

    Evaluates the matrix on the rational grid i/(3*n*d)^2 with n*d+1 points
    (n the dimension, d the maximum entry degree), takes exact rational
    determinants per point, and interpolates the degree <= n*d result.
    """
    if not m.is_square:
        raise ValueError("determinant of a non-square matrix")
    n = m.nrows
    if n == 0:
        return UniPoly.one()
    d = max(m.max_degree, 0)
    target = n * d
    grid = EvalGrid(target + 1, max(1, 3 * target))
    values = []
    for x in grid.points:
        mx = m.eval_at(x)
        values.append(det_rational_crt(mx, mx.max_denominator_bits()))
    return interpolate(grid, values)


def charpoly(m: RatMatrix) -> UniPoly:
    """Monic characteristic polynomial det(zI - M)."""
    if not m.is_square:
        raise ValueError("characteristic polynomial of a non-square matrix")
    n = m.nrows
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(UniPoly([-m.rows[i][j], R1]))
            else:
                row.append(UniPoly.constant(-m.rows[i][j]))
        rows.append(row)
    out = det_poly(PolyMatrix(rows)) if n else UniPoly.one()
    if not out.is_monic() or out.degree != n:
        raise AssertionError("characteristic polynomial came out non-monic")
    return out


def solve_unit_lower_triangular(m: RatMatrix, rhs):
    """Forward substitution for a unit lower triangular system.

    The matrix must have ones on the diagonal and zeros above it; both are
    checked because callers rely on the determinant-one guarantee.
    """
    if not m.is_square:
        raise ValueError("triangular solve needs a square matrix")
    n = m.nrows
    rhs = [Rat(v) for v in rhs]
    if len(rhs) != n:
        raise ValueError("right-hand side length mismatch")
    for i in range(n):
        if m.rows[i][i] != 1:
            raise ValueError("diagonal entry differs from one")
        for j in range(i + 1, n):
            if m.rows[i][j] != 0:
                raise ValueError("matrix is not lower triangular")
    out = []
    for i in range(n):
        acc = rhs[i]
        row = m.rows[i]
        for j in range(i):
            acc -= row[j] * out[j]
        out.append(acc)
    return out
