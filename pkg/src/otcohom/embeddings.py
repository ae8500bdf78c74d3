"""Number field construction with certified embeddings.

``build_field`` isolates all roots of the defining polynomial: real roots by
Sturm bisection on exact dyadic endpoints, complex roots by simultaneous
Aberth iteration followed by an a-posteriori Krawczyk disk certification
(each disk proven to contain exactly one simple root). The embedding order is
canonical: the s real roots ascending, then the t representatives with
positive imaginary part ordered by (real part, imaginary part), then their
conjugates mirrored bit-exactly. Embedding indices are 1-based throughout the
public API.

Irreducibility of the defining polynomial is checked by a mod-p test
(Rabin's criterion at several small primes): a single irreducible modular
image proves irreducibility over Q; if every prime fails the status stays
``unverified`` and downstream reports surface it, since the invariants are
only meaningful for a field.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import gmpy2
from gmpy2 import mpfr

from .balls import BallComplex, RealInterval, _ctx, poly_eval_ball
from .errors import InputError
from .exactmath import RationalPolynomial, poly_gcd, sturm_chain, sturm_count

_RAD = gmpy2.context(precision=64, round=gmpy2.RoundUp)

_IRRED_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class NumberField:
    """Defining polynomial plus ordered, certified root balls."""

    __slots__ = (
        "defining_poly",
        "int_coeffs",
        "n",
        "s",
        "t",
        "precision_bits",
        "roots",
        "irreducibility_status",
        "_real_intervals",
        "_sturm",
    )

    def __init__(
        self,
        defining_poly: RationalPolynomial,
        int_coeffs: tuple[int, ...],
        s: int,
        t: int,
        precision_bits: int,
        roots: tuple[BallComplex, ...],
        irreducibility_status: str,
        real_intervals: tuple[tuple[Fraction, Fraction], ...],
        sturm: tuple,
    ):
        self.defining_poly = defining_poly
        self.int_coeffs = int_coeffs
        self.n = len(int_coeffs) - 1
        self.s = s
        self.t = t
        self.precision_bits = precision_bits
        self.roots = roots
        self.irreducibility_status = irreducibility_status
        self._real_intervals = real_intervals
        self._sturm = sturm

    @property
    def m(self) -> int:
        return self.s + self.t

    def __repr__(self) -> str:
        return (
            f"NumberField(degree={self.n}, signature=({self.s},{self.t}), "
            f"precision={self.precision_bits}, irreducibility={self.irreducibility_status})"
        )


# --- exact sign evaluation on dyadic points ---------------------------------


def _dyadic(x: Fraction) -> tuple[int, int]:
    """(numerator, k) with x = num / 2^k; requires a power-of-two denominator."""
    den = x.denominator
    k = den.bit_length() - 1
    if 1 << k != den:
        raise ValueError("endpoint is not dyadic")
    return x.numerator, k


def _sign_at_dyadic(int_coeffs: tuple[int, ...], x: Fraction) -> int:
    """Exact sign of f(x) for integer f and dyadic rational x."""
    num, k = _dyadic(x)
    pow2k = 1 << k
    acc = int_coeffs[-1]
    p = 1
    for c in reversed(int_coeffs[:-1]):
        p *= pow2k
        acc = acc * num + c * p
    return (acc > 0) - (acc < 0)


# --- real root isolation ------------------------------------------------------


def _isolate_real_roots(
    f: RationalPolynomial, chain, bound: int
) -> list[tuple[Fraction, Fraction]]:
    """Disjoint open dyadic intervals, each containing exactly one real root,
    ordered ascending."""
    int_coeffs = tuple(int(c) for c in f.coeffs)

    def count(lo: Fraction, hi: Fraction) -> int:
        return sturm_count(f, lo, hi, chain)

    def split(lo: Fraction, hi: Fraction, k: int) -> list[tuple[Fraction, Fraction]]:
        if k == 0:
            return []
        if k == 1:
            return [(lo, hi)]
        mid = (lo + hi) / 2
        # nudge off a root while keeping the point dyadic and inside (lo, hi)
        shrink = 8
        while _sign_at_dyadic(int_coeffs, mid) == 0:
            mid = mid + (hi - lo) / shrink
            shrink *= 2
        left = count(lo, mid)
        return split(lo, mid, left) + split(mid, hi, k - left)

    lo, hi = Fraction(-bound), Fraction(bound)
    return split(lo, hi, count(lo, hi))


def _tighten_real(
    int_coeffs: tuple[int, ...],
    dint_coeffs: tuple[int, ...],
    lo: Fraction,
    hi: Fraction,
    target_log2: int,
) -> tuple[Fraction, Fraction]:
    """Shrink a bracketing interval of a simple root to width <= 2^target_log2.

    A few bisection steps establish a good Newton start; the Newton candidate
    then jumps straight to a tight certified bracket (two exact sign tests),
    with pure bisection as the always-correct fallback.
    """
    if hi - lo <= Fraction(1, 2) ** (-target_log2):
        return lo, hi
    s_lo = _sign_at_dyadic(int_coeffs, lo)

    def width_ok(a: Fraction, b: Fraction) -> bool:
        return b - a <= Fraction(1, 2) ** (-target_log2)

    # bisect to a stable neighborhood first
    for _ in range(16):
        if width_ok(lo, hi):
            return lo, hi
        mid = (lo + hi) / 2
        sm = _sign_at_dyadic(int_coeffs, mid)
        if sm == 0:
            eps = (hi - lo) / 16
            return mid - eps, mid + eps
        if sm == s_lo:
            lo = mid
        else:
            hi = mid

    work = -target_log2 + 48
    ctx = _ctx(work)
    mid0 = (lo + hi) / 2
    x = mpfr(gmpy2.mpq(mid0.numerator, mid0.denominator), precision=work)

    def horner(coeffs, z):
        acc = mpfr(0, precision=work)
        for c in reversed(coeffs):
            acc = ctx.add(ctx.mul(acc, z), c)
        return acc

    for _ in range(200):
        fv = horner(int_coeffs, x)
        dv = horner(dint_coeffs, x)
        if dv == 0:
            break
        step = ctx.div(fv, dv)
        x = ctx.sub(x, step)
        if abs(step) < mpfr(2, precision=64) ** (target_log2 - 8):
            # certified dyadic bracket around the Newton limit
            xf = Fraction(*x.as_integer_ratio())
            half = Fraction(1, 2) ** (-target_log2 + 1)
            a, b = max(lo, xf - half), min(hi, xf + half)
            if a < b:
                sa, sb = _sign_at_dyadic(int_coeffs, a), _sign_at_dyadic(int_coeffs, b)
                if sa != 0 and sb != 0 and sa != sb:
                    return a, b
            break

    # fallback: plain bisection all the way down
    while not width_ok(lo, hi):
        mid = (lo + hi) / 2
        sm = _sign_at_dyadic(int_coeffs, mid)
        if sm == 0:
            eps = Fraction(1, 2) ** (-target_log2 + 2)
            return mid - eps, mid + eps
        if sm == s_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _real_ball(lo: Fraction, hi: Fraction, prec: int) -> BallComplex:
    # store at prec+64 so the midpoint representation slack stays well below
    # the interval half-width (the complex disks are built the same way)
    work = prec + 64
    iv = RealInterval(
        RealInterval.from_fraction(lo, work).lo,
        RealInterval.from_fraction(hi, work).hi,
        work,
    )
    return BallComplex.from_real_interval(iv, work)


# --- complex root isolation ---------------------------------------------------


def _initial_guesses(int_coeffs: tuple[int, ...], bound: int) -> list[complex]:
    import numpy as np

    try:
        rs = np.roots([float(c) for c in reversed(int_coeffs)])
        if len(rs) == len(int_coeffs) - 1 and all(
            np.isfinite(r.real) and np.isfinite(r.imag) for r in rs
        ):
            return [complex(r) for r in rs]
    except Exception:
        pass
    n = len(int_coeffs) - 1
    import cmath

    return [
        0.7 * bound * cmath.exp(2j * cmath.pi * (k + 0.25) / n) for k in range(n)
    ]


def _aberth(int_coeffs, dint_coeffs, guesses, work: int, tol_log2: int):
    """Simultaneous Newton correction; returns mpc-like (re, im) mpfr pairs or
    None if convergence stalls."""
    ctx = gmpy2.context(precision=work)
    zs = [gmpy2.mpc(g, precision=work) for g in guesses]

    def horner(coeffs, z):
        acc = gmpy2.mpc(0, precision=work)
        for c in reversed(coeffs):
            acc = ctx.add(ctx.mul(acc, z), c)
        return acc

    tol = mpfr(2, precision=64) ** tol_log2
    for _ in range(400):
        max_step = mpfr(0, precision=64)
        new_zs = list(zs)
        for i, z in enumerate(zs):
            fv = horner(int_coeffs, z)
            dv = horner(dint_coeffs, z)
            if dv == 0:
                dv = gmpy2.mpc(tol, precision=work)
            newton = ctx.div(fv, dv)
            corr = gmpy2.mpc(0, precision=work)
            for j, w in enumerate(zs):
                if j != i:
                    dz = ctx.sub(z, w)
                    if dz == 0:
                        dz = gmpy2.mpc(tol, precision=work)
                    corr = ctx.add(corr, ctx.div(1, dz))
            denom = ctx.sub(1, ctx.mul(newton, corr))
            if denom == 0:
                step = newton
            else:
                step = ctx.div(newton, denom)
            new_zs[i] = ctx.sub(z, step)
            step_mag = _RAD.add(abs(step.real), abs(step.imag))
            if step_mag > max_step:
                max_step = step_mag
        zs = new_zs
        if max_step < tol:
            return zs
    return None


def _certify_disk(int_coeffs, dint_coeffs, mid_re, mid_im, rad, prec) -> bool:
    """Krawczyk test: the disk contains exactly one simple root of f.

    With Y an approximate inverse of f'(mid): if |Y f(mid)| + |1 - Y f'(D)| * rad
    < rad then the Newton-like map contracts D into itself, giving existence
    and uniqueness of a zero in D.
    """
    D = BallComplex(mid_re, mid_im, rad, prec)
    mid_pt = BallComplex(mid_re, mid_im, mpfr(0), prec)
    fp_D = poly_eval_ball(dint_coeffs, D)
    fp_mid = poly_eval_ball(dint_coeffs, mid_pt)
    ctx = _ctx(prec)
    d2 = ctx.add(ctx.mul(fp_mid.re, fp_mid.re), ctx.mul(fp_mid.im, fp_mid.im))
    if d2 == 0:
        return False
    y = BallComplex(ctx.div(fp_mid.re, d2), ctx.div(-fp_mid.im, d2), mpfr(0), prec)
    e = BallComplex.exact_int(1, prec) - y * fp_D
    u = e.abs_interval().hi
    if not u < 1:
        return False
    w = (y * poly_eval_ball(int_coeffs, mid_pt)).abs_interval().hi
    return _RAD.add(w, _RAD.mul(u, rad)) < rad


def _isolate_complex_roots(
    int_coeffs, dint_coeffs, t: int, target: int, bound: int
) -> list[BallComplex]:
    """t certified disks with strictly positive imaginary part, unordered."""
    guesses = _initial_guesses(int_coeffs, bound)
    work = target + 64
    for _ in range(5):
        zs = _aberth(int_coeffs, dint_coeffs, guesses, work, -(target + 16))
        if zs is not None:
            disks = []
            base_rad = mpfr(2, precision=64) ** (-(target + 4))
            for z in zs:
                if not z.imag > 0:
                    continue
                ball = None
                rad = base_rad
                for _ in range(10):
                    if _certify_disk(
                        int_coeffs, dint_coeffs,
                        mpfr(z.real, precision=work),
                        mpfr(z.imag, precision=work),
                        rad, work,
                    ):
                        ball = BallComplex(
                            mpfr(z.real, precision=work),
                            mpfr(z.imag, precision=work),
                            rad, work,
                        )
                        break
                    rad = _RAD.mul(rad, 16)
                if ball is not None and ball.im - ball.rad > 0:
                    disks.append(ball)
            if len(disks) == t and all(
                disks[i].separated_from(disks[j])
                for i in range(t)
                for j in range(i + 1, t)
            ):
                return disks
        work *= 2
        guesses = _initial_guesses(int_coeffs, bound)
    raise InputError(
        "complex root isolation did not converge; is the polynomial squarefree "
        "with moderate coefficients?"
    )


def _order_complex(disks: list[BallComplex]) -> list[BallComplex]:
    """Sort by (re, im) ascending using certified interval comparisons."""

    def key_cmp(a: BallComplex, b: BallComplex) -> int:
        a_re_hi = _RAD.add(a.re, a.rad)
        a_re_lo = gmpy2.context(precision=64, round=gmpy2.RoundDown).sub(a.re, a.rad)
        b_re_hi = _RAD.add(b.re, b.rad)
        b_re_lo = gmpy2.context(precision=64, round=gmpy2.RoundDown).sub(b.re, b.rad)
        if a_re_hi < b_re_lo:
            return -1
        if b_re_hi < a_re_lo:
            return 1
        a_im_hi = _RAD.add(a.im, a.rad)
        a_im_lo = gmpy2.context(precision=64, round=gmpy2.RoundDown).sub(a.im, a.rad)
        b_im_hi = _RAD.add(b.im, b.rad)
        b_im_lo = gmpy2.context(precision=64, round=gmpy2.RoundDown).sub(b.im, b.rad)
        if a_im_hi < b_im_lo:
            return -1
        if b_im_hi < a_im_lo:
            return 1
        raise InputError(
            "embedding order ambiguous at this precision; rebuild at higher precision"
        )

    import functools

    return sorted(disks, key=functools.cmp_to_key(key_cmp))


# --- irreducibility mod p -----------------------------------------------------


def _mod_poly(coeffs, p):
    out = [c % p for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return out


def _pm_mul(a, b, f, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pm_rem(out, f, p)


def _pm_rem(a, f, p):
    a = [c % p for c in a]
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    while True:
        while a and a[-1] == 0:
            a.pop()
        if not a or len(a) - 1 < df:
            return a
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - df
        for j, fc in enumerate(f):
            a[shift + j] = (a[shift + j] - c * fc) % p


def _pm_pow(base, e, f, p):
    result = [1]
    while e:
        if e & 1:
            result = _pm_mul(result, base, f, p)
        base = _pm_mul(base, base, f, p)
        e >>= 1
    return result


def _pm_gcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a, b = b, _pm_rem(a, b, p)
    return a


def _irreducible_mod_p(int_coeffs, p) -> bool:
    """Rabin's test: f mod p irreducible iff x^(p^n) = x mod (f, p) and
    gcd(x^(p^(n/l)) - x, f) = 1 for every prime l dividing n."""
    f = _mod_poly(int_coeffs, p)
    n = len(int_coeffs) - 1
    if len(f) - 1 != n:
        return False

    def frob_power(k):
        g = [0, 1]
        for _ in range(k):
            g = _pm_pow(g, p, f, p)
        return g

    h = frob_power(n)
    x = _pm_rem([0, 1], f, p)
    if h != x:
        return False
    for ell in _prime_divisors(n):
        g = frob_power(n // ell)
        diff = [(a - b) % p for a, b in _zip_pad(g, x)]
        while diff and diff[-1] == 0:
            diff.pop()
        if not diff:
            return False
        if len(_pm_gcd(f, diff, p)) - 1 > 0:
            return False
    return True


def _zip_pad(a, b):
    la, lb = len(a), len(b)
    n = max(la, lb)
    return zip(a + [0] * (n - la), b + [0] * (n - lb))


def _prime_divisors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def irreducibility_status(int_coeffs) -> str:
    for p in _IRRED_PRIMES:
        if _irreducible_mod_p(int_coeffs, p):
            return "verified"
    return "unverified"


# --- public API ---------------------------------------------------------------


def build_field(f, target_precision: int = 128) -> NumberField:
    """Construct the field data for a defining polynomial.

    f may be a RationalPolynomial or a coefficient sequence (ascending). The
    polynomial is normalized by its leading coefficient and must then have
    integer coefficients; it must be squarefree of degree >= 3 with at least
    one real and at least one complex root pair.
    """
    if not isinstance(f, RationalPolynomial):
        f = RationalPolynomial(f)
    if f.is_zero:
        raise InputError("defining polynomial is zero")
    if f.degree < 3:
        raise InputError(f"degree {f.degree} < 3: no manifold of this type exists")
    f = f.monic()
    if any(c.denominator != 1 for c in f.coeffs):
        raise InputError(
            "defining polynomial must be monic with integer coefficients "
            "(after dividing by the leading coefficient)"
        )
    int_coeffs = tuple(int(c) for c in f.coeffs)
    deriv = f.derivative()
    if poly_gcd(f, deriv).degree != 0:
        raise InputError("defining polynomial is not squarefree")

    n = f.degree
    bound = 1 + max(abs(c) for c in int_coeffs[:-1])
    chain = tuple(sturm_chain(f))
    s = sturm_count(f, -bound, bound, chain)
    if (n - s) % 2 != 0:
        raise InputError("internal signature inconsistency")
    t = (n - s) // 2
    if t == 0:
        raise InputError(
            f"signature ({s},0): totally real field admits no manifold of this type"
        )
    if s == 0:
        raise InputError(
            f"signature (0,{t}): no real embedding, the required unit rank is zero"
        )

    status = irreducibility_status(int_coeffs)
    dint = tuple(int(c) for c in deriv.coeffs)

    intervals = _isolate_real_roots(f, chain, bound)
    assert len(intervals) == s
    target_log2 = -(target_precision + 4)
    tight = [
        _tighten_real(int_coeffs, dint, lo, hi, target_log2) for lo, hi in intervals
    ]
    real_balls = [_real_ball(lo, hi, target_precision) for lo, hi in tight]

    pos_disks = _order_complex(
        _isolate_complex_roots(int_coeffs, dint, t, target_precision, bound)
    )
    roots = tuple(
        real_balls + pos_disks + [d.conjugate() for d in pos_disks]
    )
    field = NumberField(
        f, int_coeffs, s, t, target_precision, roots, status, tuple(tight), chain
    )
    _check_isolation(field)
    return field


def _check_isolation(field: NumberField) -> None:
    rs = field.roots
    for i in range(len(rs)):
        for j in range(i + 1, len(rs)):
            if not rs[i].separated_from(rs[j]):
                raise InputError(
                    "root balls overlap; increase the build precision"
                )


def refine(field: NumberField, extra_bits: int) -> NumberField:
    """Return a field with root radii at scale 2^-(precision_bits + extra_bits).
    Ordering and pairing of embeddings are preserved."""
    if extra_bits <= 0:
        return field
    new_bits = field.precision_bits + extra_bits
    int_coeffs = field.int_coeffs
    dint = tuple(int(c) for c in field.defining_poly.derivative().coeffs)
    target_log2 = -(new_bits + 4)

    tight = [
        _tighten_real(int_coeffs, dint, lo, hi, target_log2)
        for lo, hi in field._real_intervals
    ]
    real_balls = [_real_ball(lo, hi, new_bits) for lo, hi in tight]

    work = new_bits + 64
    ctx = gmpy2.context(precision=work)

    def polish(ball: BallComplex) -> BallComplex:
        z = gmpy2.mpc(mpfr(ball.re, precision=work), mpfr(ball.im, precision=work))

        def horner(coeffs, zz):
            acc = gmpy2.mpc(0, precision=work)
            for c in reversed(coeffs):
                acc = ctx.add(ctx.mul(acc, zz), c)
            return acc

        for _ in range(200):
            fv = horner(int_coeffs, z)
            dv = horner(dint, z)
            if dv == 0:
                break
            step = ctx.div(fv, dv)
            z = ctx.sub(z, step)
            if abs(step.real) + abs(step.imag) < mpfr(2) ** (-(new_bits + 16)):
                break
        rad = mpfr(2, precision=64) ** (-(new_bits + 4))
        for _ in range(10):
            if _certify_disk(
                int_coeffs, dint,
                mpfr(z.real, precision=work), mpfr(z.imag, precision=work),
                rad, work,
            ):
                newb = BallComplex(
                    mpfr(z.real, precision=work), mpfr(z.imag, precision=work),
                    rad, work,
                )
                # must still certify the same root: new disk inside the old,
                # i.e. dist(midpoints) + new rad <= old rad
                mid_new = BallComplex(newb.re, newb.im, mpfr(0), work)
                mid_old = BallComplex(ball.re, ball.im, mpfr(0), ball.prec)
                shift = mid_new.distance_interval(mid_old).hi
                if _RAD.add(shift, newb.rad) <= ball.rad:
                    return newb
            rad = _RAD.mul(rad, 16)
        raise InputError("refinement lost a complex root; inputs look degenerate")

    pos = [polish(field.roots[field.s + j]) for j in range(field.t)]
    roots = tuple(real_balls + pos + [d.conjugate() for d in pos])
    out = NumberField(
        field.defining_poly,
        int_coeffs,
        field.s,
        field.t,
        new_bits,
        roots,
        field.irreducibility_status,
        tuple(tight),
        field._sturm,
    )
    _check_isolation(out)
    return out


def eval_embedding(field: NumberField, u, i: int) -> BallComplex:
    """Value of the i-th embedding (1-based) on u.

    u is anything with a coefficient vector (an AlgebraicNumber or a plain
    sequence, ascending powers of the generator, length <= n). Conjugate
    embeddings are mirrored from their partner bit-exactly.
    """
    coeffs = list(getattr(u, "coeffs", u))
    if len(coeffs) > field.n:
        raise InputError(f"coefficient vector longer than the degree {field.n}")
    if not 1 <= i <= field.n:
        raise InputError(f"embedding index {i} out of range 1..{field.n}")
    if i > field.s + field.t:
        return eval_embedding(field, coeffs, i - field.t).conjugate()
    return poly_eval_ball(coeffs, field.roots[i - 1])
