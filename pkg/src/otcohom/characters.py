"""Triviality spectrum of subset characters.

For an index set I, the character sends a unit u to the product of its
embedding values over I. The spectrum rho_q counts the size-q index sets whose
character is identically 1 on the whole subgroup; every cohomology formula
downstream consumes these counts.

Decisions are two-tier. A fast interval screen over all 2^n bitmasks rejects
index sets whose log-magnitude or argument sums certifiably miss 0 (mod 2pi);
the screen can pass a non-trivial set, never the reverse. Survivors are then
settled per degree by exact linear algebra: the size-q subset products of a
generator's embedding values are exactly the eigenvalues of the q-th exterior
power of its multiplication matrix, so det(E - Id) != 0 refutes every size-q
set at once, and when the determinant vanishes the eigenvalue-1 multiplicity
k = dim - rank(E - Id) tells how many subset products are exactly 1. Balls are
then refined until exactly k of them contain 1 and the rest exclude it, which
pins the trivial subsets rigorously. Degrees whose exterior dimension exceeds
the configured cap fall back to a per-set numeric criterion (ball contains 1
with radius below 2^-bits), reported as numeric rather than exact.

The screen kernel has a compiled lane and a pure-Python lane with identical
operation order; results are bit-identical, and mask ranges can be spread
over worker threads without changing any output byte.
"""

from __future__ import annotations

import itertools
from array import array
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import gmpy2
from gmpy2 import mpfr

from .balls import BallComplex, float_up
from .embeddings import NumberField, eval_embedding, refine
from .errors import ConsistencyError, InputError
from .exactmath import (
    RationalMatrix,
    det_fraction_free,
    exterior_power,
    rank,
)
from .units import AlgebraicNumber, UnitSubgroup, multiplication_matrix

try:
    from ._screen_c import screen_range as _screen_range

    KERNEL = "compiled"
except ImportError:
    from ._screen_py import screen_range as _screen_range

    KERNEL = "pure-python"

_RAD = gmpy2.context(precision=64, round=gmpy2.RoundUp)

SCREEN_REJECTED = "screen_rejected"
EXACT_CERTIFIED = "exact_certified"
NUMERIC_CERTIFIED = "numeric_certified"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class SpectrumConfig:
    screen_tolerance: float = 2.0**-30
    screen_precision_bits: int = 128
    certification_bits: int = 64
    max_precision_bits: int = 1 << 14
    exact_dim_cap: int = 3003
    enumeration_cap: int = 24
    workers: int = 1
    paranoid: bool = False


class IndexSet:
    """Strictly increasing embedding indices in 1..n; empty is allowed."""

    __slots__ = ("indices",)

    def __init__(self, indices, n: int | None = None):
        t = tuple(int(i) for i in indices)
        for a, b in zip(t, t[1:]):
            if a >= b:
                raise InputError(f"index set {list(t)} is not strictly increasing")
        if t and t[0] < 1:
            raise InputError(f"index set {list(t)} has an entry below 1")
        if n is not None and t and t[-1] > n:
            raise InputError(f"index set {list(t)} exceeds the degree {n}")
        self.indices = t

    @classmethod
    def from_mask(cls, mask: int) -> "IndexSet":
        return cls(tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1))

    @property
    def mask(self) -> int:
        m = 0
        for i in self.indices:
            m |= 1 << (i - 1)
        return m

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __eq__(self, other) -> bool:
        return isinstance(other, IndexSet) and self.indices == other.indices

    def __hash__(self) -> int:
        return hash(self.indices)

    def __repr__(self) -> str:
        return f"IndexSet({list(self.indices)})"


@dataclass(frozen=True)
class TrivialityVerdict:
    index_set: tuple[int, ...]
    trivial: bool
    certificate: str
    precision_bits: int | None = None
    witness_generator: int | None = None  # 1-based, set on rejections


@dataclass(frozen=True)
class TrivialitySpectrum:
    rho: tuple[int, ...]
    trivial_sets: tuple[tuple[tuple[int, ...], ...], ...]
    undecided_sets: tuple[tuple[int, ...], ...]
    exact_cap_hit: bool
    kernel: str


def _conj_mask(mask: int, s: int, t: int) -> int:
    low = mask & ((1 << s) - 1)
    a = (mask >> s) & ((1 << t) - 1)
    b = (mask >> (s + t)) & ((1 << t) - 1)
    return low | (b << s) | (a << (s + t))


def sigma_value(field: NumberField, u, indices) -> BallComplex:
    """Product of embedding balls over the index set; empty product is the
    exact 1."""
    coeffs = list(getattr(u, "coeffs", u))
    result = BallComplex.exact_int(1, field.precision_bits)
    for i in indices:
        result = result * eval_embedding(field, coeffs, i)
    return result


# --- screen ---------------------------------------------------------------


class _FieldLadder:
    """Shared escalation ladder: precision doubles from the base field, and a
    level is built once no matter which decision loop requests it first."""

    def __init__(self, field: NumberField):
        self.base = field
        self.levels = {field.precision_bits: field}

    def at(self, bits: int) -> NumberField:
        if bits in self.levels:
            return self.levels[bits]
        below = max(b for b in self.levels if b < bits)
        out = refine(self.levels[below], bits - below)
        self.levels[bits] = out
        return out

    def steps(self, cap: int):
        bits = self.base.precision_bits
        while bits <= cap:
            yield self.at(bits)
            bits *= 2


def _zero_free(ball: BallComplex) -> bool:
    return float(ball.abs_interval().lo) > 0


def _screen_arrays(subgroup: UnitSubgroup, config: SpectrumConfig):
    """Per-generator, per-embedding (mid, rad) doubles for log-magnitude and
    argument. Conversion slack is folded into the radii so the kernel's
    rejections stay certified; the certification stage is the authority on
    accepts either way."""
    F = subgroup.field
    if F.precision_bits < config.screen_precision_bits:
        F = refine(F, config.screen_precision_bits - F.precision_bits)
    n = F.n
    gens = subgroup.generators
    while True:
        balls = [
            [eval_embedding(F, g.coeffs, i + 1) for i in range(n)] for g in gens
        ]
        if all(_zero_free(b) for row in balls for b in row):
            break
        if F.precision_bits >= config.max_precision_bits:
            raise InputError("embedding values too close to 0 to screen")
        F = refine(F, F.precision_bits)

    mag_mid, mag_rad = array("d"), array("d")
    arg_mid, arg_rad = array("d"), array("d")
    for row in balls:
        for b in row:
            lm, lr = b.log_abs().mid_rad()
            am, ar = b.arg_mid_rad()
            for mids, rads, m, r in (
                (mag_mid, mag_rad, lm, lr),
                (arg_mid, arg_rad, am, ar),
            ):
                mf = float(m)
                rf = float_up(r) * 1.0000001 + abs(mf) * 1e-15 + 5e-324
                mids.append(mf)
                rads.append(rf)
    return (mag_mid, mag_rad, arg_mid, arg_rad), F


def _zero_shifts(r):
    z = array("d", [0.0] * r)
    return z, z, z, z


def _run_screen(n, r, tol, arrays, workers, shifts=None):
    shifts = _zero_shifts(r) if shifts is None else shifts
    total = 1 << n
    if workers <= 1:
        return list(_screen_range(n, r, tol, *arrays, *shifts, 0, total))
    bounds = [(total * w) // workers for w in range(workers + 1)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_screen_range, n, r, tol, *arrays, *shifts, lo, hi)
            for lo, hi in zip(bounds, bounds[1:])
            if lo < hi
        ]
        out = []
        for f in futures:
            out.extend(f.result())
    return out


def screen_trivial(
    subgroup: UnitSubgroup, indices, tolerance: float | None = None
) -> bool:
    """Interval necessary-condition filter for a single index set."""
    config = SpectrumConfig()
    if tolerance is not None:
        config = SpectrumConfig(screen_tolerance=tolerance)
    arrays, F = _screen_arrays(subgroup, config)
    r = len(subgroup.generators)
    mask = IndexSet(indices, subgroup.field.n).mask
    hits = _screen_range(
        F.n, r, config.screen_tolerance, *arrays, *_zero_shifts(r), mask, mask + 1
    )
    return len(hits) == 1


# --- exact certification ----------------------------------------------------


def _subset_products(field: NumberField, coeffs, q: int) -> dict[int, BallComplex]:
    """Ball for every size-q subset product, keyed by mask; prefix products
    are shared along the lexicographic tree."""
    n = field.n
    emb = [eval_embedding(field, coeffs, i + 1) for i in range(n)]
    out: dict[int, BallComplex] = {}

    def walk(start: int, mask: int, count: int, acc: BallComplex):
        if count == q:
            out[mask] = acc
            return
        for i in range(start, n - (q - count) + 1):
            walk(i + 1, mask | (1 << i), count + 1, acc * emb[i])

    walk(0, 0, 0, BallComplex.exact_int(1, field.precision_bits))
    return out


def _exterior_minus_identity(field, element: AlgebraicNumber, q: int):
    M = multiplication_matrix(field, element)
    E = exterior_power(M, q)
    dim = comb(field.n, q)
    return E - RationalMatrix.identity(dim), dim


def decide_value_is_one(
    field: NumberField,
    parts,
    config: SpectrumConfig,
    ladder: _FieldLadder | None = None,
    dim_cap: int | None = None,
):
    """Decide whether a product of subset characters equals 1 exactly.

    parts: nonempty sequence of (element, mask) with element an
    AlgebraicNumber; the value is the product over parts of the mask's subset
    product of the element's embedding values. Returns (decision, certificate,
    precision_bits) with decision in {True, False, None}.

    The exact route tensors the exterior powers of the parts' multiplication
    matrices: the value is an eigenvalue of this product matrix, so a nonzero
    det(T - Id) refutes it, and otherwise ball refinement isolates the
    eigenvalue-1 slots among all combined subset products.
    """
    cap = config.exact_dim_cap if dim_cap is None else dim_cap
    if ladder is None:
        ladder = _FieldLadder(field)
    qs = [m.bit_count() for _, m in parts]
    dims = [comb(field.n, q) for q in qs]
    total = 1
    for d in dims:
        total *= d

    if total <= cap:
        TmI = None
        for (elem, _), q in zip(parts, qs):
            E, _ = _exterior_minus_identity(field, elem, q)
            dim = E.nrows
            T_e = E + RationalMatrix.identity(dim)
            TmI = T_e if TmI is None else TmI.kronecker(T_e)
        TmI = TmI - RationalMatrix.identity(total)
        if det_fraction_free(TmI) != 0:
            return False, EXACT_CERTIFIED, field.precision_bits
        k = total - rank(TmI)
        delta = mpfr(2, precision=64) ** (-config.certification_bits)
        for F in ladder.steps(config.max_precision_bits):
            tables = [_subset_products(F, elem.coeffs, q) for (elem, _), q in zip(parts, qs)]
            target_key = tuple(m for _, m in parts)
            contains = 0
            excludes = 0
            ours = None
            for combo in itertools.product(*[sorted(t.items()) for t in tables]):
                ball = combo[0][1]
                for _, b in combo[1:]:
                    ball = ball * b
                key = tuple(mask for mask, _ in combo)
                if ball.contains_one():
                    contains += 1
                    if key == target_key:
                        ours = (True, ball)
                elif ball.excludes_one():
                    excludes += 1
                    if key == target_key:
                        ours = (False, ball)
            if contains == k and excludes == total - k and ours is not None:
                decided, ball = ours
                if decided and not ball.rad < delta:
                    continue
                return decided, EXACT_CERTIFIED, F.precision_bits
        return None, UNDECIDED, config.max_precision_bits

    # dimension too large for the exact route: numeric criterion on the value
    delta = mpfr(2, precision=64) ** (-config.certification_bits)
    for F in ladder.steps(config.max_precision_bits):
        ball = None
        for elem, mask in parts:
            piece = sigma_value(F, elem, IndexSet.from_mask(mask).indices)
            ball = piece if ball is None else ball * piece
        if ball.excludes_one():
            return False, EXACT_CERTIFIED, F.precision_bits
        if ball.contains_one() and ball.rad < delta:
            return True, NUMERIC_CERTIFIED, F.precision_bits
    return None, UNDECIDED, config.max_precision_bits


def certify_trivial(
    field: NumberField,
    subgroup: UnitSubgroup,
    indices,
    mode: str = "exact",
    config: SpectrumConfig | None = None,
) -> TrivialityVerdict:
    """Settle one index set. mode "exact" runs the exterior-power route with
    numeric fallback above the dimension cap; mode "numeric" skips the exact
    route entirely."""
    config = config or SpectrumConfig()
    iset = indices if isinstance(indices, IndexSet) else IndexSet(indices, field.n)
    mask = iset.mask
    if mask == 0:
        return TrivialityVerdict(iset.indices, True, EXACT_CERTIFIED, field.precision_bits)
    ladder = _FieldLadder(subgroup.field)
    cap = 0 if mode == "numeric" else None
    best_cert = EXACT_CERTIFIED
    best_bits = field.precision_bits
    for j, g in enumerate(subgroup.generators, start=1):
        decision, cert, bits = decide_value_is_one(
            subgroup.field, [(g, mask)], config, ladder, dim_cap=cap
        )
        best_bits = max(best_bits, bits)
        if decision is False:
            return TrivialityVerdict(iset.indices, False, cert, bits, j)
        if decision is None:
            return TrivialityVerdict(iset.indices, False, UNDECIDED, bits, j)
        if cert == NUMERIC_CERTIFIED:
            best_cert = NUMERIC_CERTIFIED
    return TrivialityVerdict(iset.indices, True, best_cert, best_bits)


# --- spectrum enumeration -----------------------------------------------------


def _exact_degree_tables(subgroup, q, config, ladder):
    """For each generator, the exact set of size-q masks whose subset product
    is 1, or None if that generator's isolation did not finish."""
    field = subgroup.field
    n = field.n
    tables = []
    for g in subgroup.generators:
        TmI, dim = _exterior_minus_identity(field, g, q)
        if det_fraction_free(TmI) != 0:
            tables.append(frozenset())
            continue
        k = dim - rank(TmI)
        resolved = None
        for F in ladder.steps(config.max_precision_bits):
            prods = _subset_products(F, g.coeffs, q)
            ones = {m for m, b in prods.items() if b.contains_one()}
            excluded = sum(1 for b in prods.values() if b.excludes_one())
            if len(ones) == k and excluded == dim - k:
                resolved = frozenset(ones)
                break
        tables.append(resolved)
    return tables


def enumerate_spectrum(
    field: NumberField,
    subgroup: UnitSubgroup,
    config: SpectrumConfig | None = None,
) -> TrivialitySpectrum:
    """Screen all 2^n bitmasks, certify the survivors, and assemble rho.

    Results are deterministic: survivors are produced in ascending mask order
    regardless of worker count, certification walks degrees in order, and
    trivial sets are reported lexicographically within each degree.
    """
    config = config or SpectrumConfig()
    n = field.n
    if n > config.enumeration_cap:
        raise InputError(
            f"degree {n} exceeds the enumeration cap {config.enumeration_cap}; "
            f"2^{n} subsets is beyond this tool's exhaustive mode. Query "
            f"individual index sets with certify_trivial instead, or raise "
            f"enumeration_cap explicitly if the cost is acceptable"
        )
    r = len(subgroup.generators)
    arrays, _ = _screen_arrays(subgroup, config)
    survivors = _run_screen(n, r, config.screen_tolerance, arrays, config.workers)
    survivor_set = set(survivors)

    by_q: dict[int, list[int]] = {}
    for m in survivors:
        by_q.setdefault(m.bit_count(), []).append(m)

    ladder = _FieldLadder(subgroup.field)
    dim_small = {q: comb(n, q) <= config.exact_dim_cap for q in range(n + 1)}
    trivial_by_q: dict[int, list[int]] = {q: [] for q in range(n + 1)}
    undecided: list[int] = []
    exact_cap_hit = False
    numeric_used = False

    numeric_memo: dict[tuple[int, int], bool | None] = {}

    def numeric_decide(j: int, g, mask: int):
        key = (j, mask)
        if not config.paranoid:
            # a conjugate-mirrored mask has the conjugate value, and 1 is real
            alt = (j, _conj_mask(mask, field.s, field.t))
            if alt in numeric_memo:
                numeric_memo[key] = numeric_memo[alt]
                return numeric_memo[alt]
        decision, _, _ = decide_value_is_one(
            subgroup.field, [(g, mask)], config, ladder, dim_cap=0
        )
        numeric_memo[key] = decision
        return decision

    for q in sorted(by_q):
        masks = by_q[q]
        if q == 0:
            # the empty product is exactly 1, no arithmetic needed
            trivial_by_q[0] = masks
            continue
        if dim_small[q]:
            tables = _exact_degree_tables(subgroup, q, config, ladder)
            if all(tab is not None for tab in tables):
                # screen soundness: a mask trivial for every generator must
                # have survived the screen
                proven = set.intersection(*(set(tab) for tab in tables))
                for m in proven - survivor_set:
                    raise ConsistencyError(
                        f"screen rejected index set {IndexSet.from_mask(m).indices} "
                        f"of degree {q} that exact certification proves trivial"
                    )
            for m in masks:
                votes = [tab if tab is None else (m in tab) for tab in tables]
                if any(v is False for v in votes):
                    continue
                if any(v is None for v in votes):
                    undecided.append(m)
                    continue
                trivial_by_q[q].append(m)
        else:
            exact_cap_hit = True
            numeric_used = True
            for m in masks:
                votes = [
                    numeric_decide(j, g, m)
                    for j, g in enumerate(subgroup.generators, start=1)
                ]
                if any(v is False for v in votes):
                    continue
                if any(v is None for v in votes):
                    undecided.append(m)
                    continue
                trivial_by_q[q].append(m)

    if config.paranoid:
        _paranoid_audit(field, subgroup, config, ladder, trivial_by_q, undecided)

    rho = tuple(len(trivial_by_q[q]) for q in range(n + 1))
    trivial_sets = tuple(
        tuple(sorted(IndexSet.from_mask(m).indices for m in trivial_by_q[q]))
        for q in range(n + 1)
    )
    spectrum = TrivialitySpectrum(
        rho=rho,
        trivial_sets=trivial_sets,
        undecided_sets=tuple(
            sorted(IndexSet.from_mask(m).indices for m in undecided)
        ),
        exact_cap_hit=exact_cap_hit,
        kernel=KERNEL,
    )
    _consistency_checks(spectrum, field, bool(undecided))
    return spectrum


def _paranoid_audit(field, subgroup, config, ladder, trivial_by_q, undecided):
    """Re-verify every trivial set and its conjugate mirror independently."""
    for q, masks in trivial_by_q.items():
        for m in masks:
            for probe in {m, _conj_mask(m, field.s, field.t)}:
                for g in subgroup.generators:
                    decision, _, _ = decide_value_is_one(
                        subgroup.field, [(g, probe)], config, ladder
                    )
                    if decision is not True:
                        raise ConsistencyError(
                            f"paranoid re-verification failed for "
                            f"{IndexSet.from_mask(probe).indices}"
                        )


def _consistency_checks(spectrum: TrivialitySpectrum, field, has_undecided: bool):
    n = field.n
    if spectrum.rho[0] != 1:
        raise ConsistencyError("empty index set must be trivial (rho_0 = 1)")
    if not has_undecided:
        if spectrum.rho[n] != 1:
            raise ConsistencyError(
                "full index set must be trivial for norm-one positive units"
            )
        for q in range(n + 1):
            if spectrum.rho[q] != spectrum.rho[n - q]:
                raise ConsistencyError(
                    f"complement symmetry violated: rho_{q} != rho_{n - q}"
                )
        trivial_masks = {
            IndexSet(ix).mask for sets in spectrum.trivial_sets for ix in sets
        }
        for m in trivial_masks:
            if _conj_mask(m, field.s, field.t) not in trivial_masks:
                raise ConsistencyError(
                    "conjugation symmetry violated in the trivial sets"
                )


# --- reference evaluator -------------------------------------------------------


def oracle_spectrum(
    field: NumberField, subgroup: UnitSubgroup, bits: int = 512
) -> TrivialitySpectrum:
    """Straight-line reference evaluator: every subset decided purely by one
    high-precision ball product against the threshold 2^(-bits/2). Usable for
    cross-checks at small degree; disagreement with enumerate_spectrum on any
    subset is a bug in one of them."""
    n = field.n
    if n > 8:
        raise InputError("the oracle is exhaustive and limited to degree <= 8")
    F = subgroup.field
    if F.precision_bits < bits:
        F = refine(F, bits - F.precision_bits)
    threshold = Fraction(1, 2) ** (bits // 2)
    trivial_by_q: dict[int, list[int]] = {q: [] for q in range(n + 1)}
    for mask in range(1 << n):
        verdictd = True
        for g in subgroup.generators:
            ball = sigma_value(F, g, IndexSet.from_mask(mask).indices)
            lo, hi = ball.dist_one_bounds()
            lof = Fraction(*lo.as_integer_ratio())
            hif = Fraction(*hi.as_integer_ratio())
            if hif < threshold:
                continue
            if lof > threshold:
                verdictd = False
                break
            raise InputError(
                f"oracle ambiguous for {IndexSet.from_mask(mask).indices}: "
                f"distance to 1 straddles the threshold"
            )
        if verdictd:
            trivial_by_q[mask.bit_count()].append(mask)
    rho = tuple(len(trivial_by_q[q]) for q in range(n + 1))
    return TrivialitySpectrum(
        rho=rho,
        trivial_sets=tuple(
            tuple(sorted(IndexSet.from_mask(m).indices for m in trivial_by_q[q]))
            for q in range(n + 1)
        ),
        undecided_sets=(),
        exact_cap_hit=False,
        kernel="oracle",
    )
