"""Exact rational kernel: polynomials, matrices, resultants, Sturm counts.

Everything in this module is exact. Rational is stdlib ``fractions.Fraction``
(already normalized with positive denominator); polynomials store ascending
coefficient tuples with no trailing zeros; matrices are immutable row tuples.

The resultant convention is fixed by ``resultant(f, x - c) == f(c)``:
``resultant(a, b)`` is the determinant of the Sylvester matrix of (b, a),
equivalently lc(b)^deg(a) times the product of a over the roots of b. With
this convention, for a monic defining polynomial f the norm of an algebraic
number g(alpha) is exactly ``resultant(g, f)``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb, lcm
from typing import Iterable, Sequence

Rational = Fraction

_SYLVESTER_DEGREE_LIMIT = 12  # above this, subresultant PRS beats the determinant


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected a rational value, got {type(x).__name__}")


class RationalPolynomial:
    """Univariate polynomial over Q, coefficients ascending by degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = [_to_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no degree; check is_zero first")
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1]

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalPolynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"RationalPolynomial({list(self.coeffs)})"

    def __add__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RationalPolynomial(out)

    def __neg__(self) -> "RationalPolynomial":
        return RationalPolynomial([-c for c in self.coeffs])

    def __sub__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        return self + (-other)

    def __mul__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        if self.is_zero or other.is_zero:
            return RationalPolynomial([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPolynomial(out)

    def scale(self, c) -> "RationalPolynomial":
        c = _to_fraction(c)
        return RationalPolynomial([c * a for a in self.coeffs])

    def monic(self) -> "RationalPolynomial":
        if self.is_zero:
            raise ValueError("cannot normalize the zero polynomial")
        return self.scale(1 / self.leading)

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x) -> Fraction:
        x = _to_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod(self, other: "RationalPolynomial"):
        """Euclidean division; other must be nonzero."""
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return RationalPolynomial([]), self
        quo = [Fraction(0)] * (dq + 1)
        inv_lead = 1 / other.leading
        for k in range(dq, -1, -1):
            c = rem[k + other.degree] * inv_lead
            quo[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return RationalPolynomial(quo), RationalPolynomial(rem[: other.degree])

    def integer_scaled(self) -> tuple[list[int], int]:
        """Return (integer coefficient list ascending, positive denominator d)
        with self == poly/d."""
        d = lcm(*(c.denominator for c in self.coeffs)) if self.coeffs else 1
        return [int(c * d) for c in self.coeffs], d


def poly_from_ints(coeffs: Sequence[int]) -> RationalPolynomial:
    return RationalPolynomial([Fraction(c) for c in coeffs])


def poly_gcd(a: RationalPolynomial, b: RationalPolynomial) -> RationalPolynomial:
    """Monic gcd over Q (Euclidean algorithm)."""
    while not b.is_zero:
        a, b = b, a.divmod(b)[1]
    if a.is_zero:
        return a
    return a.monic()


def _sylvester_det(p: RationalPolynomial, q: RationalPolynomial) -> Fraction:
    """det of the Sylvester matrix of (p, q): deg q rows of p, deg p rows of q,
    coefficients descending."""
    m, n = p.degree, q.degree
    if m == 0 and n == 0:
        return Fraction(1)
    N = m + n
    pc = [c for c in reversed(p.coeffs)]
    qc = [c for c in reversed(q.coeffs)]
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + pc + [Fraction(0)] * (N - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + qc + [Fraction(0)] * (N - n - 1 - i))
    return det_fraction_free(RationalMatrix(rows))


def _res_standard(p: RationalPolynomial, q: RationalPolynomial) -> Fraction:
    """Res(p, q) in the standard orientation, lc(p)^deg(q) * prod q over the
    roots of p, by a Euclidean remainder sequence with leading-coefficient
    bookkeeping: Res(p, q) = (-1)^(deg p * deg q) lc(q)^(deg p - deg r) Res(q, r)
    for r = p mod q."""
    if q.degree == 0:
        return q.leading**p.degree
    if p.degree == 0:
        return p.leading**q.degree
    if p.degree < q.degree:
        sign = -1 if (p.degree & 1) and (q.degree & 1) else 1
        return sign * _res_standard(q, p)
    r = p.divmod(q)[1]
    if r.is_zero:
        return Fraction(0)
    sign = -1 if (p.degree & 1) and (q.degree & 1) else 1
    return sign * q.leading ** (p.degree - r.degree) * _res_standard(q, r)


def resultant(a: RationalPolynomial, b: RationalPolynomial) -> Fraction:
    """Resultant with the convention resultant(f, x - c) == f(c).

    Equals lc(b)^deg(a) * product of a over the roots of b; computed as a
    fraction-free Sylvester determinant for small degrees and by a remainder
    sequence above that.
    """
    if a.is_zero or b.is_zero:
        raise ValueError("resultant requires nonzero polynomials")
    if a.degree == 0 and b.degree == 0:
        return Fraction(1)
    if max(a.degree, b.degree) <= _SYLVESTER_DEGREE_LIMIT:
        return _sylvester_det(b, a)
    return _res_standard(b, a)


def sturm_chain(f: RationalPolynomial) -> list[RationalPolynomial]:
    """Sturm sequence f, f', then negated Euclidean remainders."""
    if f.is_zero:
        raise ValueError("Sturm chain of the zero polynomial")
    chain = [f, f.derivative()]
    while not chain[-1].is_zero and chain[-1].degree > 0:
        rem = chain[-2].divmod(chain[-1])[1]
        if rem.is_zero:
            break
        chain.append(-rem)
    if chain[-1].is_zero:
        chain.pop()
    return chain


def _sign_changes(chain: Sequence[RationalPolynomial], x: Fraction) -> int:
    signs = []
    for p in chain:
        v = p(x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def sturm_count(
    f: RationalPolynomial,
    lo,
    hi,
    chain: Sequence[RationalPolynomial] | None = None,
) -> int:
    """Number of distinct real roots of squarefree f in the open interval
    (lo, hi). Endpoints must not be roots."""
    lo, hi = _to_fraction(lo), _to_fraction(hi)
    if lo >= hi:
        raise ValueError("empty interval")
    if f(lo) == 0 or f(hi) == 0:
        raise ValueError("interval endpoint is a root; perturb the endpoint")
    if chain is None:
        chain = sturm_chain(f)
    return _sign_changes(chain, lo) - _sign_changes(chain, hi)


class RationalMatrix:
    """Immutable dense matrix over Q."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable]):
        rs = tuple(tuple(_to_fraction(x) for x in row) for row in rows)
        if not rs:
            raise ValueError("matrix needs at least one row")
        w = len(rs[0])
        if any(len(r) != w for r in rs):
            raise ValueError("ragged rows")
        self.rows = rs
        self.nrows = len(rs)
        self.ncols = w

    @staticmethod
    def identity(n: int) -> "RationalMatrix":
        return RationalMatrix(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"RationalMatrix({[list(r) for r in self.rows]})"

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return RationalMatrix(
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.rows, other.rows)
            ]
        )

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return RationalMatrix(
            [
                [a - b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.rows, other.rows)
            ]
        )

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.rows))
        return RationalMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.rows]
        )

    def kronecker(self, other: "RationalMatrix") -> "RationalMatrix":
        """Tensor product; eigenvalues are the pairwise eigenvalue products."""
        out = []
        for r1 in self.rows:
            for r2 in other.rows:
                out.append([a * b for a in r1 for b in r2])
        return RationalMatrix(out)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix(
            [[self.rows[i][j] for j in cols] for i in rows]
        )


def _integer_rows(m: RationalMatrix) -> tuple[list[list[int]], Fraction]:
    """Scale each row to integers; return (rows, product of the row factors)."""
    rows, factor = [], Fraction(1)
    for r in m.rows:
        d = lcm(*(c.denominator for c in r)) if r else 1
        factor *= d
        rows.append([int(c * d) for c in r])
    return rows, factor


def det_fraction_free(m: RationalMatrix) -> Fraction:
    """Determinant via Bareiss fraction-free elimination (rows scaled to
    integers first, so all intermediate divisions are exact)."""
    if m.nrows != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    a, scale = _integer_rows(m)
    n = m.nrows
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = pivot
    return Fraction(sign * a[n - 1][n - 1]) / scale


def rank(m: RationalMatrix) -> int:
    """Rank via fraction-free elimination with full pivot search."""
    a, _ = _integer_rows(m)
    nr, nc = m.nrows, m.ncols
    r = 0
    prev = 1
    for col in range(nc):
        piv = next((i for i in range(r, nr) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pivot = a[r][col]
        for i in range(r + 1, nr):
            for j in range(col + 1, nc):
                a[i][j] = (a[i][j] * pivot - a[i][col] * a[r][j]) // prev
            a[i][col] = 0
        prev = pivot
        r += 1
        if r == nr:
            break
    return r


def exterior_power(m: RationalMatrix, k: int) -> RationalMatrix:
    """k-th compound matrix: entries are k x k minors, row/column index sets in
    lexicographic order. Eigenvalues are the k-fold products of eigenvalues of m
    (Cauchy-Binet), which is what makes subset-product conditions decidable by
    linear algebra."""
    if m.nrows != m.ncols:
        raise ValueError("exterior power of a non-square matrix")
    n = m.nrows
    if not 0 <= k <= n:
        raise ValueError(f"exterior power order must be in 0..{n}, got {k}")
    if k == 0:
        return RationalMatrix([[1]])
    subsets = list(itertools.combinations(range(n), k))
    return RationalMatrix(
        [
            [det_fraction_free(m.submatrix(S, T)) for T in subsets]
            for S in subsets
        ]
    )


def exterior_dimension(n: int, k: int) -> int:
    return comb(n, k)
