"""Cohomological invariants built on the triviality spectrum.

De Rham Betti numbers come from the binomial convolution of the spectrum;
twisted Betti numbers re-run the subset decision against a character offset
exp(sum_k a_k ln sigma_k(u)). Conformally Kaehler admissibility, the unique
candidate Lee class, the closed-form shortcut vectors, and the vanishing
range of real Chern classes are computed alongside, and a consistency suite
cross-checks every identity that must hold between them.

Twist decisions: when every coefficient is a rational c_k/t the condition is
raised to the t-th power, where it becomes an algebraic subset-product
statement decided exactly by the tensor determinant route; the unraised ball
then isolates the value among the t-th roots of unity, so accepts and
rejects are both exact. Any other theta is decided numerically at the
configured certification resolution and tagged accordingly.
"""

import itertools
from array import array
from dataclasses import dataclass
from fractions import Fraction
from math import comb, prod

import gmpy2
from gmpy2 import mpfr

from .balls import BallComplex, RealInterval, float_up, roots_of_unity
from .characters import (
    EXACT_CERTIFIED,
    KERNEL,
    NUMERIC_CERTIFIED,
    UNDECIDED,
    IndexSet,
    SpectrumConfig,
    TrivialitySpectrum,
    _FieldLadder,
    _exterior_minus_identity,
    _run_screen,
    _screen_arrays,
    _subset_products,
    decide_value_is_one,
    enumerate_spectrum,
    sigma_value,
)
from .embeddings import NumberField, eval_embedding, refine
from .errors import ConsistencyError, InputError
from .exactmath import RationalMatrix, det_fraction_free, rank
from .units import UnitSubgroup

_UP64 = gmpy2.context(precision=64, round=gmpy2.RoundUp)


def _pair(value):
    if isinstance(value, tuple):
        re, im = value
        return Fraction(re), Fraction(im)
    return Fraction(value), Fraction(0)


class ThetaClass:
    """Twist-direction class with one complex coefficient per real embedding.

    Coefficients are exact (re, im) rational pairs; transcendental targets
    enter as high-precision rational approximations and are decided at the
    numeric certification resolution.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients):
        self.coefficients = tuple(_pair(c) for c in coefficients)

    @classmethod
    def zero(cls, s: int) -> "ThetaClass":
        return cls([Fraction(0)] * s)

    @property
    def is_zero(self) -> bool:
        return all(re == 0 and im == 0 for re, im in self.coefficients)

    def negated(self) -> "ThetaClass":
        return ThetaClass([(-re, -im) for re, im in self.coefficients])

    def t_scaled_integers(self, t: int):
        """The integers (t*a_1, ..., t*a_s) when every coefficient is real
        rational with denominator dividing t, else None."""
        out = []
        for re, im in self.coefficients:
            scaled = re * t
            if im != 0 or scaled.denominator != 1:
                return None
            out.append(int(scaled))
        return tuple(out)

    def __len__(self) -> int:
        return len(self.coefficients)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ThetaClass)
            and self.coefficients == other.coefficients
        )

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __repr__(self) -> str:
        return f"ThetaClass({list(self.coefficients)})"


def lee_class(field: NumberField) -> ThetaClass:
    """The unique candidate Lee class: every coefficient 1/t. Whether it IS
    a Lee class is exactly the admissibility question; this candidate exists
    regardless."""
    return ThetaClass([Fraction(1, field.t)] * field.s)


@dataclass(frozen=True)
class BettiVector:
    """Per-degree dimensions with an explicit generating set.

    generators[l] lists pairs (P, I): P the selected unit-direction indices
    (subset of 1..s) and I the embedding index set, with |P| + |I| = l.
    When lower_bound_only is set, undecided index sets were excluded and
    every value is only a certified lower bound.
    """

    values: tuple[int, ...]
    generators: tuple[tuple[tuple[tuple[int, ...], tuple[int, ...]], ...], ...]
    lower_bound_only: bool = False

    def __post_init__(self):
        if len(self.values) != len(self.generators):
            raise ConsistencyError("betti values and generators length mismatch")
        for l, row in enumerate(self.generators):
            if self.values[l] != len(row):
                raise ConsistencyError(
                    f"betti value at degree {l} is {self.values[l]} but "
                    f"{len(row)} generators are listed"
                )


@dataclass(frozen=True)
class LckReport:
    admissible: bool
    status: str  # "admissible" | "not_admissible" | "undecided"
    failing_generator: int | None
    r_values: tuple[RealInterval, ...]
    lee_class: ThetaClass | None
    chern_vanishing: int | None = None

    def __post_init__(self):
        if (self.lee_class is not None) != self.admissible:
            raise ConsistencyError(
                "lee_class must be attached exactly when admissible"
            )


def _signature_from(spectrum_len: int, s: int) -> tuple[int, int]:
    n = spectrum_len - 1
    t2 = n - s
    if s < 1 or t2 < 2 or t2 % 2:
        raise InputError(
            f"spectrum of degree {n} is incompatible with {s} real embeddings"
        )
    return n, t2 // 2


def _assemble_betti(spectrum: TrivialitySpectrum, s: int) -> BettiVector:
    n, t = _signature_from(len(spectrum.rho), s)
    m = s + t
    gens = []
    for l in range(2 * m + 1):
        row = []
        for p in range(0, min(s, l) + 1):
            q = l - p
            if q > n:
                continue
            for P in itertools.combinations(range(1, s + 1), p):
                for I in spectrum.trivial_sets[q]:
                    row.append((P, I))
        gens.append(tuple(row))
    return BettiVector(
        values=tuple(len(row) for row in gens),
        generators=tuple(gens),
        lower_bound_only=bool(spectrum.undecided_sets),
    )


def betti_numbers(spectrum: TrivialitySpectrum, s: int) -> BettiVector:
    """De Rham Betti numbers: b_l = sum over p+q=l of C(s,p) * rho_q, with
    the generating wedges listed per degree."""
    return _assemble_betti(spectrum, s)


def lck_betti_shortcut(s: int, t: int) -> BettiVector:
    """Closed-form Betti vector valid for admissible inputs: binomial C(s,l)
    up to degree s, mirror image at the top, zero between."""
    n = s + 2 * t
    m = s + t
    full = tuple(range(1, n + 1))
    gens = []
    for l in range(2 * m + 1):
        row = []
        if l <= s:
            row += [(P, ()) for P in itertools.combinations(range(1, s + 1), l)]
        if n <= l <= n + s:
            row += [
                (P, full) for P in itertools.combinations(range(1, s + 1), l - n)
            ]
        gens.append(tuple(row))
    return BettiVector(tuple(len(r) for r in gens), tuple(gens))


def lee_pairs(s: int, t: int) -> tuple[tuple[int, int], ...]:
    """The degree-2 embedding pairs (s+j, s+t+j) coupling each complex place
    with its conjugate."""
    return tuple((s + j, s + t + j) for j in range(1, t + 1))


def lee_twisted_shortcut(s: int, t: int) -> BettiVector:
    """Closed-form Lee-twisted Betti vector for admissible inputs:
    values[l] = t * C(s, l-2)."""
    m = s + t
    pairs = lee_pairs(s, t)
    gens = []
    for l in range(2 * m + 1):
        row = []
        if 2 <= l <= s + 2:
            row = [
                (P, J)
                for P in itertools.combinations(range(1, s + 1), l - 2)
                for J in pairs
            ]
        gens.append(tuple(row))
    return BettiVector(tuple(len(r) for r in gens), tuple(gens))


def chern_vanishing_range(spectrum: TrivialitySpectrum, n: int) -> int:
    """Number of leading real Chern classes guaranteed to vanish:
    floor((n-1)/2) when no intermediate index set is trivial, else 0 (the
    hypothesis fails and nothing is asserted). Undecided intermediate sets
    also return 0: vanishing is only claimed on proof."""
    if len(spectrum.rho) != n + 1:
        raise InputError("spectrum length does not match the degree")
    if any(spectrum.rho[q] for q in range(1, n)):
        return 0
    if any(0 < len(ix) < n for ix in spectrum.undecided_sets):
        return 0
    return (n - 1) // 2


# --- admissibility ----------------------------------------------------------


def _pair_mask(s: int, t: int, i: int) -> int:
    return (1 << (s + i - 1)) | (1 << (s + t + i - 1))


def is_lck_admissible(
    field: NumberField,
    subgroup: UnitSubgroup,
    config: SpectrumConfig | None = None,
) -> LckReport:
    """Check the metric admissibility equalities: all complex places carry
    the same absolute value on every generator (norm one makes the remaining
    defining equality automatic). t = 1 is automatic for the same reason.

    Accepts and rejects are exact; a cheap ball exclusion handles rejections
    before the tensor route is attempted.
    """
    if not subgroup.validated:
        raise InputError("admissibility requires a validated unit subgroup")
    config = config or SpectrumConfig()
    s, t = field.s, field.t
    r_values = tuple(
        eval_embedding(field, g.coeffs, s + 1).abs_interval()
        for g in subgroup.generators
    )

    def report(admissible, status, failing=None):
        return LckReport(
            admissible=admissible,
            status=status,
            failing_generator=failing,
            r_values=r_values,
            lee_class=lee_class(field) if admissible else None,
        )

    if t == 1:
        return report(True, "admissible")
    ladder = _FieldLadder(subgroup.field)
    undecided = False
    for j, g in enumerate(subgroup.generators, start=1):
        ginv = g.inverse()
        base = _pair_mask(s, t, 1)
        for i in range(2, t + 1):
            parts = [(g, base), (ginv, _pair_mask(s, t, i))]
            decision, _, _ = decide_value_is_one(
                subgroup.field, parts, config, ladder, dim_cap=0
            )
            if decision is None or decision is True:
                decision, _, _ = decide_value_is_one(
                    subgroup.field, parts, config, ladder
                )
            if decision is False:
                return report(False, "not_admissible", j)
            if decision is None:
                undecided = True
    if undecided:
        return report(False, "undecided")
    return report(True, "admissible")


# --- twisted spectrum --------------------------------------------------------


def _twist_offset(F: NumberField, g, theta: ThetaClass) -> BallComplex:
    """Ball for sum_k a_k * ln sigma_k(g) at F's precision. Real embeddings
    of validated generators are certified positive, so the logs are real."""
    prec = F.precision_bits
    zero = mpfr(0, precision=prec)
    acc = BallComplex(zero, zero, zero, prec)
    for k, (are, aim) in enumerate(theta.coefficients, start=1):
        if are == 0 and aim == 0:
            continue
        L = eval_embedding(F, g.coeffs, k).log_abs()
        lmid, lrad = L.mid_rad()
        lball = BallComplex(lmid, zero, lrad, prec)
        acc = acc + lball * BallComplex.from_fractions(are, aim, prec)
    return acc


def _shift_arrays(offsets):
    msm, msr = array("d"), array("d")
    asm, asr = array("d"), array("d")
    for E in offsets:
        rad = float_up(E.rad) * 1.0000001 + 5e-324
        for mids, rads, mid in ((msm, msr, E.re), (asm, asr, E.im)):
            mf = float(mid)
            mids.append(mf)
            rads.append(rad + abs(mf) * 1e-15 + 5e-324)
    return msm, msr, asm, asr


def _sin_pi_over_lower(t: int) -> mpfr:
    down = gmpy2.context(precision=96, round=gmpy2.RoundDown)
    return down.sin(down.div(down.const_pi(), t))


def _raised_degree_table(field, fixed_parts, var_elem, q, config, ladder):
    """Size-q masks I with (product over fixed parts) * sigma_I(var_elem)
    equal to 1, exactly. Returns a frozenset, None if isolation hit the
    precision ceiling, or "cap" if the tensor dimension exceeds the exact
    cap. Counting the unit eigenvalues of the tensor matrix makes the accept
    side exact: exactly k combined products equal 1, so once k balls contain
    1 and the rest exclude it, the containing ones are certified."""
    n = field.n
    qs_fixed = [m.bit_count() for _, m in fixed_parts]
    dimq = comb(n, q)
    total = prod(comb(n, qq) for qq in qs_fixed) * dimq
    if total > config.exact_dim_cap:
        return "cap"
    T = None
    for (elem, _), qq in zip(fixed_parts, qs_fixed):
        E, dim = _exterior_minus_identity(field, elem, qq)
        piece = E + RationalMatrix.identity(dim)
        T = piece if T is None else T.kronecker(piece)
    Eq, _ = _exterior_minus_identity(field, var_elem, q)
    piece = Eq + RationalMatrix.identity(dimq)
    T = piece if T is None else T.kronecker(piece)
    TmI = T - RationalMatrix.identity(total)
    if det_fraction_free(TmI) != 0:
        return frozenset()
    k = total - rank(TmI)
    target_fixed = tuple(m for _, m in fixed_parts)
    for F in ladder.steps(config.max_precision_bits):
        tables = [
            sorted(_subset_products(F, e.coeffs, qq).items())
            for (e, _), qq in zip(fixed_parts, qs_fixed)
        ]
        tables.append(sorted(_subset_products(F, var_elem.coeffs, q).items()))
        contains = 0
        excludes = 0
        ones = set()
        for combo in itertools.product(*tables):
            ball = combo[0][1]
            for _, b in combo[1:]:
                ball = ball * b
            if ball.contains_one():
                contains += 1
                if tuple(m for m, _ in combo[:-1]) == target_fixed:
                    ones.add(combo[-1][0])
            elif ball.excludes_one():
                excludes += 1
        if contains == k and excludes == total - k:
            return frozenset(ones)
    return None


def twisted_spectrum(
    field: NumberField,
    subgroup: UnitSubgroup,
    theta: ThetaClass,
    config: SpectrumConfig | None = None,
) -> TrivialitySpectrum:
    """Triviality spectrum for the twisted condition
    exp(sum_k a_k ln sigma_k(u)) * sigma_I(u) = 1 on all generators u."""
    config = config or SpectrumConfig()
    s, t, n = field.s, field.t, field.n
    if len(theta) != s:
        raise InputError(
            f"theta has {len(theta)} coefficients; the field has {s} "
            f"real embeddings"
        )
    if not subgroup.validated:
        raise InputError("twisted cohomology requires a validated unit subgroup")
    if theta.is_zero:
        return enumerate_spectrum(field, subgroup, config)
    if n > config.enumeration_cap:
        raise InputError(
            f"degree {n} exceeds the enumeration cap {config.enumeration_cap}; "
            f"raise enumeration_cap explicitly if the cost is acceptable"
        )

    gens = subgroup.generators
    r = len(gens)
    arrays, Fs = _screen_arrays(subgroup, config)
    shifts = _shift_arrays([_twist_offset(Fs, g, theta) for g in gens])
    survivors = _run_screen(
        n, r, config.screen_tolerance, arrays, config.workers, shifts
    )

    by_q: dict[int, list[int]] = {}
    for m in survivors:
        by_q.setdefault(m.bit_count(), []).append(m)

    ladder = _FieldLadder(subgroup.field)
    cs = theta.t_scaled_integers(t)
    delta = mpfr(2, precision=64) ** (-config.certification_bits)
    trivial_by_q: dict[int, list[int]] = {q: [] for q in range(n + 1)}
    undecided: list[int] = []
    exact_cap_hit = False

    twist_cache: dict[tuple[int, int], BallComplex] = {}

    def w_ball(j: int, mask: int, F: NumberField) -> BallComplex:
        key = (j, F.precision_bits)
        if key not in twist_cache:
            twist_cache[key] = _twist_offset(F, gens[j], theta).exp()
        return twist_cache[key] * sigma_value(
            F, gens[j], IndexSet.from_mask(mask).indices
        )

    def numeric_vote(j: int, mask: int):
        for F in ladder.steps(config.max_precision_bits):
            ball = w_ball(j, mask, F)
            if ball.excludes_one():
                return False
            if ball.contains_one() and ball.rad < delta:
                return True
        return None

    def collect(masks, votes_for):
        for m in masks:
            votes = votes_for(m)
            if any(v is False for v in votes):
                continue
            if any(v is None for v in votes):
                undecided.append(m)
                continue
            trivial_by_q[m.bit_count()].append(m)

    if cs is None:
        # transcendental twist direction: numeric decisions only
        for q in sorted(by_q):
            collect(by_q[q], lambda m: [numeric_vote(j, m) for j in range(r)])
    else:
        sin_lo = _sin_pi_over_lower(t) if t >= 2 else None
        roots_cache: dict[int, list[BallComplex]] = {}

        def fixed_parts(j: int):
            g = gens[j]
            nonzero = [(k, c) for k, c in enumerate(cs, start=1) if c != 0]
            if len(nonzero) == s and len({c for _, c in nonzero}) == 1:
                # uniform coefficients compress to one exterior block
                return [(g.power(nonzero[0][1]), (1 << s) - 1)]
            return [(g.power(c), 1 << (k - 1)) for k, c in nonzero]

        def root_vote(j: int, mask: int):
            # raised condition certified: the value is SOME t-th root of 1;
            # isolate which among the roots the unraised ball pins down
            for F in ladder.steps(config.max_precision_bits):
                ball = w_ball(j, mask, F)
                if ball.excludes_one():
                    return False
                _, hi = ball.dist_one_bounds()
                reach = _UP64.add(hi, ball.rad)
                if reach < sin_lo:
                    bits = F.precision_bits
                    if bits not in roots_cache:
                        roots_cache[bits] = roots_of_unity(t, bits)
                    if all(
                        ball.separated_from(w) for w in roots_cache[bits][1:]
                    ):
                        return True
            return None

        for q in sorted(by_q):
            masks = by_q[q]
            tables = []
            capped = False
            for j in range(r):
                tab = _raised_degree_table(
                    field, fixed_parts(j), gens[j].power(t), q, config, ladder
                )
                if tab == "cap":
                    capped = True
                    break
                tables.append(tab)
            if capped:
                exact_cap_hit = True
                collect(masks, lambda m: [numeric_vote(j, m) for j in range(r)])
                continue

            def raised_votes(m):
                votes = []
                for j, tab in enumerate(tables):
                    if tab is None:
                        votes.append(None)
                    elif m not in tab:
                        votes.append(False)
                    elif t == 1:
                        votes.append(True)
                    else:
                        votes.append(root_vote(j, m))
                return votes

            collect(masks, raised_votes)

    rho = tuple(len(trivial_by_q[q]) for q in range(n + 1))
    return TrivialitySpectrum(
        rho=rho,
        trivial_sets=tuple(
            tuple(sorted(IndexSet.from_mask(m).indices for m in trivial_by_q[q]))
            for q in range(n + 1)
        ),
        undecided_sets=tuple(
            sorted(IndexSet.from_mask(m).indices for m in undecided)
        ),
        exact_cap_hit=exact_cap_hit,
        kernel=KERNEL,
    )


def twisted_betti(
    field: NumberField,
    subgroup: UnitSubgroup,
    theta: ThetaClass,
    config: SpectrumConfig | None = None,
) -> BettiVector:
    """Twisted Betti numbers: the binomial convolution applied to the
    twisted triviality spectrum."""
    return _assemble_betti(twisted_spectrum(field, subgroup, theta, config), field.s)


def trivializing_twist(
    field: NumberField,
    subgroup: UnitSubgroup,
    j: int = 1,
    bits: int = 512,
) -> ThetaClass:
    """Purely imaginary theta whose character is 1 on every generator at the
    working resolution: coefficients i*y with y solving
    log_matrix @ y = 2*pi*e_j. The twisted run with this theta reproduces
    the untwisted spectrum."""
    s = field.s
    if not 1 <= j <= s:
        raise InputError(f"generator index {j} outside 1..{s}")
    if not subgroup.validated:
        raise InputError("the twist construction needs a validated subgroup")
    F = subgroup.field
    if F.precision_bits < bits:
        F = refine(F, bits - F.precision_bits)
    rows = []
    for g in subgroup.generators:
        row = []
        for k in range(1, s + 1):
            mid, _ = eval_embedding(F, g.coeffs, k).log_abs().mid_rad()
            row.append(Fraction(*mid.as_integer_ratio()))
        rows.append(row)
    pi = gmpy2.context(precision=bits).const_pi()
    rhs = [Fraction(0)] * s
    rhs[j - 1] = 2 * Fraction(*pi.as_integer_ratio())
    # exact Gaussian elimination on the s x s rational system
    for col in range(s):
        piv = next(
            (i for i in range(col, s) if rows[i][col] != 0), None
        )
        if piv is None:
            raise InputError("log matrix is numerically singular")
        rows[col], rows[piv] = rows[piv], rows[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        for i in range(s):
            if i != col and rows[i][col] != 0:
                f = rows[i][col] / rows[col][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[col])]
                rhs[i] = rhs[i] - f * rhs[col]
    y = [rhs[i] / rows[i][i] for i in range(s)]
    return ThetaClass([(Fraction(0), yk) for yk in y])


# --- consistency -------------------------------------------------------------


def consistency_suite(
    field: NumberField,
    subgroup: UnitSubgroup,
    spectrum: TrivialitySpectrum | None = None,
    betti: BettiVector | None = None,
    lck: LckReport | None = None,
    config: SpectrumConfig | None = None,
) -> dict[str, str]:
    """Cross-check every identity the outputs must satisfy; any violation is
    a ConsistencyError naming the identity. Pass precomputed pieces to audit
    them; omitted ones are computed here."""
    config = config or SpectrumConfig()
    if spectrum is None:
        spectrum = enumerate_spectrum(field, subgroup, config)
    if betti is None:
        betti = betti_numbers(spectrum, field.s)
    if lck is None:
        lck = is_lck_admissible(field, subgroup, config)
    s, t = field.s, field.t
    m = s + t
    b = betti.values
    report: dict[str, str] = {}

    if len(b) != 2 * m + 1:
        raise ConsistencyError(
            f"betti vector has length {len(b)}, expected {2 * m + 1}"
        )
    if betti.lower_bound_only:
        report["poincare_symmetry"] = "skipped: undecided sets present"
        report["euler_characteristic"] = "skipped: undecided sets present"
        report["binomial_lower_bound"] = "skipped: undecided sets present"
        report["binomial_convolution"] = "skipped: undecided sets present"
    else:
        for l in range(2 * m + 1):
            if b[l] != b[2 * m - l]:
                raise ConsistencyError(
                    f"poincare symmetry violated: b_{l} = {b[l]} but "
                    f"b_{2 * m - l} = {b[2 * m - l]}"
                )
        report["poincare_symmetry"] = "ok"
        euler = sum((-1) ** l * bl for l, bl in enumerate(b))
        if euler != 0:
            raise ConsistencyError(
                f"euler characteristic is {euler}, expected 0"
            )
        report["euler_characteristic"] = "ok"
        for l in range(s + 1):
            if b[l] < comb(s, l):
                raise ConsistencyError(
                    f"betti lower bound violated: b_{l} = {b[l]} < C({s},{l})"
                )
        report["binomial_lower_bound"] = "ok"
        if sum(b) != (1 << s) * sum(spectrum.rho):
            raise ConsistencyError(
                "binomial convolution identity violated: sum of betti "
                "numbers is not 2^s times the spectrum total"
            )
        report["binomial_convolution"] = "ok"

    theta = lee_class(field)
    ts = twisted_spectrum(field, subgroup, theta, config)
    bt = _assemble_betti(ts, s)
    bn = twisted_betti(field, subgroup, theta.negated(), config)
    if bt.lower_bound_only or bn.lower_bound_only:
        report["twisted_duality"] = "skipped: undecided sets present"
    else:
        for l in range(2 * m + 1):
            if bt.values[l] != bn.values[2 * m - l]:
                raise ConsistencyError(
                    f"twisted duality violated: b^theta_{l} = {bt.values[l]} "
                    f"but b^(-theta)_{2 * m - l} = {bn.values[2 * m - l]}"
                )
        report["twisted_duality"] = "ok"

    if lck.admissible:
        if b != lck_betti_shortcut(s, t).values:
            raise ConsistencyError(
                "admissible input disagrees with the closed-form betti vector"
            )
        if bt.values != lee_twisted_shortcut(s, t).values:
            raise ConsistencyError(
                "admissible input disagrees with the closed-form Lee-twisted "
                "betti vector"
            )
        if ts.trivial_sets[2] != lee_pairs(s, t):
            raise ConsistencyError(
                "Lee-twist degree-2 trivial sets are not exactly the "
                "conjugate-place pairs"
            )
        report["lck_shortcuts"] = "ok"
    else:
        report["lck_shortcuts"] = f"skipped: {lck.status}"
    return report
