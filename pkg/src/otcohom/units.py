"""Elements of the order Z[alpha] and validated unit subgroups.

An AlgebraicNumber is a rational coordinate vector on the power basis
1, alpha, ..., alpha^(n-1). Ring operations reduce modulo the defining
polynomial; norms are exact resultants. ``validate_subgroup`` certifies the
admissibility conditions for the manifold construction: every generator a
unit of norm +1, strictly positive at all real embeddings, exactly s
generators, and a numerically nonsingular logarithm matrix.

Rank certification is numeric by necessity (deciding whether logarithms of
units satisfy a linear relation exactly is out of reach), so a failure is
reported as "not certified", never as a proof of inadmissibility.
"""

from __future__ import annotations

from fractions import Fraction

from .balls import BallComplex, RealInterval
from .embeddings import NumberField, eval_embedding, refine
from .errors import InputError
from .exactmath import RationalMatrix, RationalPolynomial, resultant

_POSITIVITY_BIT_CAP = 1 << 14
_DEFAULT_LOG_DET_TOLERANCE = 1e-30


class AlgebraicNumber:
    """Immutable element of Q[alpha] with exact rational coordinates."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs):
        vec = tuple(Fraction(c) for c in coeffs)
        if len(vec) != field.n:
            raise InputError(
                f"coefficient vector has length {len(vec)}, expected the degree {field.n}"
            )
        self.field = field
        self.coeffs = vec

    @classmethod
    def one(cls, field: NumberField) -> "AlgebraicNumber":
        return cls(field, (1,) + (0,) * (field.n - 1))

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @property
    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and all(c == 0 for c in self.coeffs[1:])

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgebraicNumber) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"AlgebraicNumber({list(self.coeffs)})"

    def _poly(self) -> RationalPolynomial:
        return RationalPolynomial(self.coeffs)

    def __mul__(self, other: "AlgebraicNumber") -> "AlgebraicNumber":
        prod = self._poly() * other._poly()
        _, rem = prod.divmod(self.field.defining_poly)
        return _from_poly(self.field, rem)

    def inverse(self) -> "AlgebraicNumber":
        if self.is_zero:
            raise InputError("zero element has no inverse")
        g, x = _half_ext_gcd(self._poly(), self.field.defining_poly)
        if g.degree != 0:
            # only possible when the defining polynomial is reducible
            raise InputError("element is a zero divisor, not invertible")
        inv = x.scale(Fraction(1) / g.coeffs[0])
        _, rem = inv.divmod(self.field.defining_poly)
        return _from_poly(self.field, rem)

    def power(self, k: int) -> "AlgebraicNumber":
        if k < 0:
            return self.inverse().power(-k)
        result = AlgebraicNumber.one(self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def embedding(self, i: int) -> BallComplex:
        return eval_embedding(self.field, self.coeffs, i)


def _from_poly(field: NumberField, p: RationalPolynomial) -> AlgebraicNumber:
    vec = list(p.coeffs) + [Fraction(0)] * (field.n - len(p.coeffs))
    return AlgebraicNumber(field, vec)


def _half_ext_gcd(a: RationalPolynomial, b: RationalPolynomial):
    """(g, x) with x*a = g mod b and g = gcd(a, b)."""
    zero = RationalPolynomial([0])
    one = RationalPolynomial([1])
    r0, r1 = a, b
    x0, x1 = one, zero
    while not r1.is_zero:
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        x0, x1 = x1, x0 - q * x1
    return r0, x0


def norm(field: NumberField, u: AlgebraicNumber) -> Fraction:
    """Product of all embedding values, computed exactly as a resultant."""
    if u.is_zero:
        raise InputError("norm of the zero element is not defined here")
    return resultant(u._poly(), field.defining_poly)


def multiplication_matrix(field: NumberField, u: AlgebraicNumber) -> RationalMatrix:
    """Matrix of multiplication by u on the power basis; det equals norm(u)
    and the eigenvalues are the embedding values."""
    n = field.n
    cols = []
    vec = list(u.coeffs)
    f = field.int_coeffs
    for _ in range(n):
        cols.append(tuple(vec))
        # multiply by alpha: shift up, reduce alpha^n = -(f_0 + ... + f_{n-1} alpha^{n-1})
        top = vec[-1]
        vec = [Fraction(0)] + vec[:-1]
        if top:
            vec = [c - top * fc for c, fc in zip(vec, f[:-1])]
    rows = tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))
    return RationalMatrix(rows)


class UnitSubgroup:
    """Validated generators plus the real-embedding logarithm matrix."""

    __slots__ = ("field", "generators", "log_matrix", "validated")

    def __init__(self, field, generators, log_matrix, validated):
        self.field = field
        self.generators = tuple(generators)
        self.log_matrix = log_matrix
        self.validated = validated

    @property
    def rank(self) -> int:
        return len(self.generators)

    def __repr__(self) -> str:
        return f"UnitSubgroup(rank={self.rank}, validated={self.validated})"


def _certify_positive(field: NumberField, u: AlgebraicNumber, k: int):
    """Refine until sigma_k(u) is certified positive; returns the refined field.
    Terminates: a nonzero algebraic number has nonzero embedding values."""
    F = field
    while True:
        ball = eval_embedding(F, u.coeffs, k)
        lo = Fraction(*ball.re.as_integer_ratio()) - Fraction(*ball.rad.as_integer_ratio())
        hi = Fraction(*ball.re.as_integer_ratio()) + Fraction(*ball.rad.as_integer_ratio())
        if lo > 0:
            return F
        if hi < 0:
            raise InputError(
                f"generator {list(u.coeffs)} is negative at real embedding {k}"
            )
        if F.precision_bits >= _POSITIVITY_BIT_CAP:
            raise InputError(
                f"positivity at real embedding {k} not certified at "
                f"{F.precision_bits} bits"
            )
        F = refine(F, F.precision_bits)


def _log_real_embedding(field: NumberField, u: AlgebraicNumber, k: int) -> RealInterval:
    """Certified interval for ln sigma_k(u), k <= s. Requires positivity."""
    ball = eval_embedding(field, u.coeffs, k)
    return ball.log_abs()


def _det_interval(rows: list[list[RealInterval]]) -> RealInterval:
    """Cofactor expansion; fine for the small ranks that occur here."""
    r = len(rows)
    if r == 1:
        return rows[0][0]
    total = None
    for j in range(r):
        minor = [row[:j] + row[j + 1 :] for row in rows[1:]]
        term = rows[0][j] * _det_interval(minor)
        if j % 2 == 1:
            term = -term
        total = term if total is None else total + term
    return total


def validate_subgroup(
    field: NumberField,
    gens,
    tolerance: float = _DEFAULT_LOG_DET_TOLERANCE,
) -> UnitSubgroup:
    """Certify the admissibility conditions and return a validated subgroup.

    Checks in order: each generator has |norm| = 1 with norm = +1 (a totally
    positive element has positive norm, so -1 is impossible); each generator
    is strictly positive at every real embedding (certified by ball
    refinement); the number of generators equals s; the log matrix determinant
    exceeds the tolerance in absolute value, retrying after two precision
    refinements before giving up.
    """
    generators = [
        g if isinstance(g, AlgebraicNumber) else AlgebraicNumber(field, g)
        for g in gens
    ]
    if not generators:
        raise InputError("at least one generator is required")

    for g in generators:
        if g.is_zero:
            raise InputError("the zero element is not a unit")
        nm = norm(field, g)
        if nm not in (1, -1):
            raise InputError(
                f"generator {list(g.coeffs)} has norm {nm}, not a unit"
            )
        if nm == -1:
            raise InputError(
                f"generator {list(g.coeffs)} has norm -1, so it cannot be "
                f"positive at every real embedding"
            )

    F = field
    for g in generators:
        for k in range(1, F.s + 1):
            F = _certify_positive(F, g, k)

    r, s = len(generators), field.s
    if r != s:
        raise InputError(f"{r} generators given, admissibility requires exactly s = {s}")

    tol = Fraction(tolerance if tolerance > 0 else _DEFAULT_LOG_DET_TOLERANCE)
    for attempt in range(3):
        rows = [
            [_log_real_embedding(F, g, k) for k in range(1, s + 1)]
            for g in generators
        ]
        det = _det_interval(rows)
        lo = Fraction(*det.lo.as_integer_ratio())
        hi = Fraction(*det.hi.as_integer_ratio())
        if lo > tol or hi < -tol:
            log_matrix = tuple(
                tuple(c.mid_rad()[0] for c in row) for row in rows
            )
            return UnitSubgroup(F, generators, log_matrix, True)
        if attempt < 2:
            F = refine(F, F.precision_bits)
    raise InputError(
        "admissibility not certified: |det| of the log matrix does not exceed "
        f"{float(tol)} after refinement (generators may be multiplicatively "
        "dependent, e.g. the identity)"
    )
