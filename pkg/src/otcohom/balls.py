"""Certified ball arithmetic over MPFR.

``BallComplex`` is a midpoint-radius complex ball: two MPFR midpoint
components at the working precision plus one upward-rounded radius, with the
guarantee that the represented value lies within ``rad`` of ``mid``. Every
operation rounds the midpoint to nearest and accounts for that rounding in
the radius, computed in a fixed 64-bit upward-rounding context, so enclosures
are rigorous regardless of working precision. ``RealInterval`` is the
endpoint form for real quantities (log-magnitudes, argument apertures) where
directed endpoints are more convenient than midpoint-radius.

MPFR guarantees correct directed rounding for the transcendental functions
used here (log, exp, expm1, atan2, asin, hypot, sin, cos), which is what
makes the enclosures trustworthy.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr

_RAD = gmpy2.context(precision=64, round=gmpy2.RoundUp)
_RAD_DOWN = gmpy2.context(precision=64, round=gmpy2.RoundDown)


@lru_cache(maxsize=None)
def _ctx(prec: int):
    return gmpy2.context(precision=prec)


@lru_cache(maxsize=None)
def _ctx_down(prec: int):
    return gmpy2.context(precision=prec, round=gmpy2.RoundDown)


@lru_cache(maxsize=None)
def _ctx_up(prec: int):
    return gmpy2.context(precision=prec, round=gmpy2.RoundUp)


@lru_cache(maxsize=None)
def _eps(prec: int) -> mpfr:
    """2^(1-prec), an upper bound for the relative midpoint rounding step."""
    return _RAD.exp2(1 - prec)


_ZERO = mpfr(0)


def _neg(x: mpfr) -> mpfr:
    """Exact sign flip. Bare unary minus would round to the thread context."""
    return _ctx(max(x.precision, 2)).minus(x)


def _abs_sum_up(a: mpfr, b: mpfr) -> mpfr:
    """Upper bound for |a| + |b| (itself an upper bound for hypot(a, b))."""
    return _RAD.add(abs(a), abs(b))


def float_up(x) -> float:
    """Smallest double >= x."""
    f = float(mpfr(x, precision=64) if not isinstance(x, mpfr) else x)
    if mpfr(f, precision=64) < x:
        return math.nextafter(f, math.inf)
    return f


def float_down(x) -> float:
    """Largest double <= x."""
    f = float(mpfr(x, precision=64) if not isinstance(x, mpfr) else x)
    if mpfr(f, precision=64) > x:
        return math.nextafter(f, -math.inf)
    return f


class RealInterval:
    """Closed real interval [lo, hi] with outward-rounded endpoints."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi, prec: int = 64):
        self.lo = mpfr(lo, precision=prec) if not isinstance(lo, mpfr) else lo
        self.hi = mpfr(hi, precision=prec) if not isinstance(hi, mpfr) else hi
        self.prec = prec
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @staticmethod
    def from_fraction(q: Fraction, prec: int) -> "RealInterval":
        q = gmpy2.mpq(q.numerator, q.denominator)
        return RealInterval(
            _ctx_down(prec).add(_ZERO, q), _ctx_up(prec).add(_ZERO, q), prec
        )

    @staticmethod
    def exact(x, prec: int = 64) -> "RealInterval":
        v = mpfr(x, precision=prec)
        return RealInterval(v, v, prec)

    def __repr__(self) -> str:
        return f"RealInterval({self.lo}, {self.hi})"

    def __add__(self, other: "RealInterval") -> "RealInterval":
        p = max(self.prec, other.prec)
        return RealInterval(
            _ctx_down(p).add(self.lo, other.lo),
            _ctx_up(p).add(self.hi, other.hi),
            p,
        )

    def __neg__(self) -> "RealInterval":
        return RealInterval(_neg(self.hi), _neg(self.lo), self.prec)

    def __sub__(self, other: "RealInterval") -> "RealInterval":
        return self + (-other)

    def __mul__(self, other: "RealInterval") -> "RealInterval":
        p = max(self.prec, other.prec)
        dn, up = _ctx_down(p), _ctx_up(p)
        cands_lo = [
            dn.mul(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)
        ]
        cands_hi = [
            up.mul(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)
        ]
        return RealInterval(min(cands_lo), max(cands_hi), p)

    def scale_fraction(self, q: Fraction) -> "RealInterval":
        return self * RealInterval.from_fraction(q, self.prec)

    def exp(self) -> "RealInterval":
        return RealInterval(
            _ctx_down(self.prec).exp(self.lo), _ctx_up(self.prec).exp(self.hi), self.prec
        )

    def log(self) -> "RealInterval":
        if not self.lo > 0:
            raise ValueError("log of an interval not strictly positive")
        return RealInterval(
            _ctx_down(self.prec).log(self.lo), _ctx_up(self.prec).log(self.hi), self.prec
        )

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def abs_max(self) -> mpfr:
        return max(abs(self.lo), abs(self.hi))

    def width(self) -> mpfr:
        return _RAD.sub(self.hi, self.lo)

    def mid_rad(self) -> tuple[mpfr, mpfr]:
        mid = _ctx(self.prec).div(_ctx(self.prec).add(self.lo, self.hi), 2)
        rad = max(_RAD.sub(self.hi, mid), _RAD.sub(mid, self.lo))
        return mid, rad


class BallComplex:
    """Complex ball: value z satisfies |z - (re + i*im)| <= rad."""

    __slots__ = ("re", "im", "rad", "prec")

    def __init__(self, re: mpfr, im: mpfr, rad: mpfr, prec: int):
        self.re = re
        self.im = im
        self.rad = rad
        self.prec = prec

    # --- constructors ---------------------------------------------------

    @staticmethod
    def exact_int(k: int, prec: int) -> "BallComplex":
        return BallComplex(mpfr(k, precision=prec), mpfr(0, precision=prec), _ZERO, prec)

    @staticmethod
    def from_fractions(re: Fraction, im: Fraction, prec: int) -> "BallComplex":
        ctx = _ctx(prec)
        qre = gmpy2.mpq(re.numerator, re.denominator)
        qim = gmpy2.mpq(im.numerator, im.denominator)
        a = ctx.add(_ZERO, qre)
        b = ctx.add(_ZERO, qim)
        if gmpy2.mpq(a) == qre and gmpy2.mpq(b) == qim:
            rad = _ZERO
        else:
            rad = _RAD.mul(_abs_sum_up(a, b), _eps(prec))
        return BallComplex(a, b, rad, prec)

    @staticmethod
    def from_real_interval(iv: RealInterval, prec: int) -> "BallComplex":
        mid, rad = iv.mid_rad()
        a = mpfr(mid, precision=prec)
        # re-rounding mid to the ball precision must be absorbed by the radius
        rad = _RAD.add(rad, _RAD.mul(abs(a), _eps(prec)))
        return BallComplex(a, mpfr(0, precision=prec), rad, prec)

    @staticmethod
    def from_box(re_iv: RealInterval, im_iv: RealInterval, prec: int) -> "BallComplex":
        rm, rr = re_iv.mid_rad()
        im, ir = im_iv.mid_rad()
        a = mpfr(rm, precision=prec)
        b = mpfr(im, precision=prec)
        rad = _RAD.add(_RAD.add(rr, ir), _RAD.mul(_abs_sum_up(a, b), _eps(prec)))
        return BallComplex(a, b, rad, prec)

    # --- ring operations ------------------------------------------------

    def __repr__(self) -> str:
        return f"BallComplex({self.re}, {self.im}, rad={self.rad})"

    def conjugate(self) -> "BallComplex":
        return BallComplex(self.re, _neg(self.im), self.rad, self.prec)

    def __neg__(self) -> "BallComplex":
        return BallComplex(_neg(self.re), _neg(self.im), self.rad, self.prec)

    def __add__(self, other: "BallComplex") -> "BallComplex":
        p = max(self.prec, other.prec)
        ctx = _ctx(p)
        a = ctx.add(self.re, other.re)
        b = ctx.add(self.im, other.im)
        if self.rad == 0 and other.rad == 0:
            # exact operands: keep radius 0 whenever the sum is representable
            if (
                gmpy2.mpq(a) == gmpy2.mpq(self.re) + gmpy2.mpq(other.re)
                and gmpy2.mpq(b) == gmpy2.mpq(self.im) + gmpy2.mpq(other.im)
            ):
                return BallComplex(a, b, _ZERO, p)
        rad = _RAD.add(
            _RAD.add(self.rad, other.rad), _RAD.mul(_abs_sum_up(a, b), _eps(p))
        )
        return BallComplex(a, b, rad, p)

    def __sub__(self, other: "BallComplex") -> "BallComplex":
        return self + (-other)

    def __mul__(self, other: "BallComplex") -> "BallComplex":
        p = max(self.prec, other.prec)
        hi = _ctx(2 * p + 8)
        a = hi.sub(hi.mul(self.re, other.re), hi.mul(self.im, other.im))
        b = hi.add(hi.mul(self.re, other.im), hi.mul(self.im, other.re))
        ctx = _ctx(p)
        a_p = ctx.add(a, 0)
        b_p = ctx.add(b, 0)
        if self.rad == 0 and other.rad == 0:
            sre, sim = gmpy2.mpq(self.re), gmpy2.mpq(self.im)
            ore, oim = gmpy2.mpq(other.re), gmpy2.mpq(other.im)
            if (
                gmpy2.mpq(a_p) == sre * ore - sim * oim
                and gmpy2.mpq(b_p) == sre * oim + sim * ore
            ):
                return BallComplex(a_p, b_p, _ZERO, p)
        m_self = _RAD.add(_abs_sum_up(self.re, self.im), self.rad)
        m_other = _RAD.add(_abs_sum_up(other.re, other.im), other.rad)
        # |x||dy| + |y||dx| + |dx||dy| <= m_self*o.rad + m_other*s.rad (one
        # of the cross bounds already absorbs the quadratic term via the +rad
        # in m_self), plus midpoint rounding
        rad = _RAD.add(
            _RAD.add(_RAD.mul(m_self, other.rad), _RAD.mul(m_other, self.rad)),
            _RAD.mul(_abs_sum_up(a_p, b_p), _eps(p)),
        )
        return BallComplex(a_p, b_p, rad, p)

    def pow_int(self, k: int) -> "BallComplex":
        if k < 0:
            raise ValueError("negative powers are handled at the element level")
        result = BallComplex.exact_int(1, self.prec)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # --- bounds and predicates -------------------------------------------

    def mid_abs_interval(self) -> RealInterval:
        """Enclosure of |midpoint| at working precision."""
        p = max(self.prec, 64)
        return RealInterval(
            _ctx_down(p).hypot(self.re, self.im), _ctx_up(p).hypot(self.re, self.im), p
        )

    def abs_interval(self) -> RealInterval:
        """Enclosure of |z| over the whole ball."""
        p = max(self.prec, 64)
        m = self.mid_abs_interval()
        lo = _ctx_down(p).sub(m.lo, self.rad)
        if lo < 0:
            lo = _ZERO
        return RealInterval(lo, _ctx_up(p).add(m.hi, self.rad), p)

    def log_abs(self) -> RealInterval:
        """Enclosure of ln|z|; requires the ball to exclude 0."""
        iv = self.abs_interval()
        if not iv.lo > 0:
            raise ValueError("ball contains 0; refine before taking log-magnitude")
        p = max(self.prec, 64)
        return RealInterval(
            _ctx_down(p).log(iv.lo), _ctx_up(p).log(iv.hi), p
        )

    def arg_mid_rad(self) -> tuple[mpfr, mpfr]:
        """(principal-argument midpoint, rigorous aperture radius).

        Requires the ball to exclude 0. Aperture asin(rad/|mid|_lo) covers
        every point of the disk; one extra eps covers atan2 rounding.
        """
        mid_lo = self.mid_abs_interval().lo
        safe = _RAD_DOWN.sub(mid_lo, self.rad)
        if not safe > 0:
            raise ValueError("ball contains 0; refine before taking argument")
        p = max(self.prec, 64)
        theta = _ctx(p).atan2(self.im, self.re)
        ratio = _RAD.div(self.rad, mid_lo)
        aperture = _RAD.asin(ratio) if ratio < 1 else _RAD.add(_ZERO, 4)
        aperture = _RAD.add(aperture, _RAD.mul(_RAD.add(abs(theta), 4), _eps(p)))
        return theta, aperture

    def distance_interval(self, other: "BallComplex") -> RealInterval:
        """Enclosure of |z - w| for z in self, w in other."""
        p = max(self.prec, other.prec, 64)
        dn, up = _ctx_down(p), _ctx_up(p)
        dre_lo, dre_hi = dn.sub(self.re, other.re), up.sub(self.re, other.re)
        dim_lo, dim_hi = dn.sub(self.im, other.im), up.sub(self.im, other.im)

        def abs_bounds(lo, hi):
            if lo > 0:
                return lo, hi
            if hi < 0:
                return _neg(hi), _neg(lo)
            return _ZERO, max(_neg(lo), hi)

        are = abs_bounds(dre_lo, dre_hi)
        aim = abs_bounds(dim_lo, dim_hi)
        center_lo = dn.hypot(are[0], aim[0])
        center_hi = up.hypot(are[1], aim[1])
        rads = _RAD.add(self.rad, other.rad)
        lo = dn.sub(center_lo, rads)
        if lo < 0:
            lo = _ZERO
        return RealInterval(lo, up.add(center_hi, rads), p)

    def dist_one_bounds(self) -> tuple[mpfr, mpfr]:
        """Rigorous (lower, upper) bounds for |mid - 1|."""
        one = BallComplex.exact_int(1, 64)
        iv = BallComplex(self.re, self.im, _ZERO, self.prec).distance_interval(one)
        return iv.lo, iv.hi

    def contains_one(self) -> bool:
        """Certified: every value within rad of mid includes 1 in the ball."""
        _, hi = self.dist_one_bounds()
        return hi <= self.rad

    def excludes_one(self) -> bool:
        """Certified: 1 lies strictly outside the ball, so the value is not 1."""
        lo, _ = self.dist_one_bounds()
        return lo > self.rad

    def separated_from(self, other: "BallComplex") -> bool:
        """Certified: the two balls are disjoint (values differ)."""
        return self.distance_interval(other).lo > 0

    def exp(self) -> "BallComplex":
        """Ball exp: |e^(w+d) - e^w| <= e^(Re w + |d|) * |d| for |d| <= rad."""
        p = self.prec
        hi = _ctx(p + 16)
        ea = hi.exp(self.re)
        a = _ctx(p).add(_ZERO, hi.mul(ea, hi.cos(self.im)))
        b = _ctx(p).add(_ZERO, hi.mul(ea, hi.sin(self.im)))
        growth = _RAD.exp(_RAD.add(self.re, self.rad))
        rad = _RAD.add(
            _RAD.mul(growth, self.rad),
            _RAD.mul(_abs_sum_up(a, b), _RAD.mul(_eps(p), mpfr(4))),
        )
        return BallComplex(a, b, rad, p)


def roots_of_unity(t: int, prec: int) -> list[BallComplex]:
    """Balls around the t-th roots of unity, index k for exp(2*pi*i*k/t)."""
    out = []
    ctx = _ctx(prec + 16)
    two_pi = ctx.mul(ctx.const_pi(), 2)
    for k in range(t):
        if k == 0:
            out.append(BallComplex.exact_int(1, prec))
            continue
        angle = ctx.div(ctx.mul(two_pi, k), t)
        a = _ctx(prec).add(_ZERO, ctx.cos(angle))
        b = _ctx(prec).add(_ZERO, ctx.sin(angle))
        rad = _RAD.mul(mpfr(8), _eps(prec))
        out.append(BallComplex(a, b, rad, prec))
    return out


def poly_eval_ball(coeffs, z: BallComplex) -> BallComplex:
    """Horner evaluation of a polynomial with Fraction/int coefficients
    (ascending) at a complex ball."""
    prec = z.prec
    acc = BallComplex.exact_int(0, prec)
    for c in reversed(list(coeffs)):
        acc = acc * z
        if c:
            q = Fraction(c)
            acc = acc + BallComplex.from_fractions(q, Fraction(0), prec)
    return acc
