"""Command line front end: parse a field/unit/twist description from JSON,
run the full pipeline, and emit a deterministic report.

Determinism is part of the interface: report keys are sorted, index sets
are ascending, every non-integer numeric is a decimal string, and nothing
run-dependent (wall time, worker count) enters the report body. Timing goes
to stderr only. Exit codes: 0 success, 1 invalid input or failed check,
2 success with undecided verdicts (reported values are lower bounds).
"""

import argparse
import json
import sys
import time
from dataclasses import replace
from fractions import Fraction

from .characters import (
    KERNEL,
    SpectrumConfig,
    certify_trivial,
    enumerate_spectrum,
    oracle_spectrum,
)
from .cohomology import (
    ThetaClass,
    betti_numbers,
    chern_vanishing_range,
    consistency_suite,
    is_lck_admissible,
    lee_class,
    twisted_spectrum,
)
from .embeddings import build_field
from .errors import ConsistencyError, InputError
from .units import AlgebraicNumber, validate_subgroup

_TOP_FIELDS = {"schema_version", "polynomial", "units", "theta", "options", "expected"}
_OPTION_FIELDS = {
    "precision_bits",
    "certify_mode",
    "tolerance",
    "enumeration_cap",
    "workers",
}
_EXPECTED_FIELDS = {"betti", "rho"}


def _rational(value, where):
    if isinstance(value, bool):
        raise InputError(f"{where}: expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"{where}: not a rational: {value!r}") from None
    raise InputError(f"{where}: expected an integer or a 'num/den' string")


def _int_list(value, where):
    if not isinstance(value, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in value
    ):
        raise InputError(f"{where}: expected a list of integers")
    return value


def load_input(path: str) -> dict:
    """Parse and shape-check an input file; every complaint names the
    offending field."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise InputError(f"{path}: {e.strerror or e}") from None
    except json.JSONDecodeError as e:
        raise InputError(
            f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be an object")
    unknown = set(data) - _TOP_FIELDS
    if unknown:
        raise InputError(f"{path}: unknown fields {sorted(unknown)}")
    if data.get("schema_version") != 1:
        raise InputError(f"{path}: schema_version must be 1")

    spec = {"polynomial": _int_list(data.get("polynomial"), f"{path}: polynomial")}

    units = data.get("units")
    if not isinstance(units, list) or not units:
        raise InputError(f"{path}: units must be a non-empty list of vectors")
    parsed_units = []
    for i, vec in enumerate(units):
        if not isinstance(vec, list):
            raise InputError(f"{path}: units[{i}]: expected a coefficient vector")
        parsed_units.append(
            [_rational(c, f"{path}: units[{i}][{k}]") for k, c in enumerate(vec)]
        )
    spec["units"] = parsed_units

    theta = data.get("theta")
    if theta is not None:
        if not isinstance(theta, list):
            raise InputError(f"{path}: theta must be a list of [re, im] pairs")
        pairs = []
        for i, entry in enumerate(theta):
            if not isinstance(entry, list) or len(entry) != 2:
                raise InputError(f"{path}: theta[{i}]: expected an [re, im] pair")
            pairs.append(
                (
                    _rational(entry[0], f"{path}: theta[{i}][0]"),
                    _rational(entry[1], f"{path}: theta[{i}][1]"),
                )
            )
        spec["theta"] = pairs

    options = data.get("options", {})
    if not isinstance(options, dict):
        raise InputError(f"{path}: options must be an object")
    unknown = set(options) - _OPTION_FIELDS
    if unknown:
        raise InputError(f"{path}: unknown options {sorted(unknown)}")
    spec["options"] = options

    expected = data.get("expected")
    if expected is not None:
        if not isinstance(expected, dict):
            raise InputError(f"{path}: expected must be an object")
        unknown = set(expected) - _EXPECTED_FIELDS
        if unknown:
            raise InputError(f"{path}: unknown expected fields {sorted(unknown)}")
        for key in expected:
            _int_list(expected[key], f"{path}: expected.{key}")
        spec["expected"] = expected
    return spec


def _settings(spec, args):
    opts = spec["options"]
    precision = getattr(args, "precision", None) or opts.get("precision_bits", 128)
    mode = getattr(args, "certify", None) or opts.get("certify_mode", "exact")
    if mode not in ("exact", "numeric"):
        raise InputError(f"certify_mode must be 'exact' or 'numeric', got {mode!r}")
    kw = {}
    if "tolerance" in opts:
        kw["screen_tolerance"] = float(opts["tolerance"])
    if "enumeration_cap" in opts:
        kw["enumeration_cap"] = int(opts["enumeration_cap"])
    workers = getattr(args, "workers", None) or opts.get("workers")
    if workers:
        kw["workers"] = int(workers)
    if getattr(args, "paranoid", False):
        kw["paranoid"] = True
    if mode == "numeric":
        kw["exact_dim_cap"] = 0
    return int(precision), mode, SpectrumConfig(**kw)


def _run_pipeline(spec, precision, cfg):
    field = build_field(spec["polynomial"], precision)
    gens = [AlgebraicNumber(field, vec) for vec in spec["units"]]
    subgroup = validate_subgroup(field, gens)
    theta = None
    if "theta" in spec:
        if len(spec["theta"]) != field.s:
            raise InputError(
                f"theta length {len(spec['theta'])} does not match s = {field.s}"
            )
        theta = ThetaClass(spec["theta"])
    spectrum = enumerate_spectrum(field, subgroup, cfg)
    betti = betti_numbers(spectrum, field.s)
    lck = is_lck_admissible(field, subgroup, cfg)
    lck = replace(lck, chern_vanishing=chern_vanishing_range(spectrum, field.n))
    return field, subgroup, theta, spectrum, betti, lck


# --- serialization helpers ---------------------------------------------------


def _ix_key(indices) -> str:
    return ",".join(str(i) for i in indices)


def _sets_json(rows):
    return [[list(ix) for ix in row] for row in rows]


def _theta_json(theta: ThetaClass):
    return [[str(re), str(im)] for re, im in theta.coefficients]


def _betti_json(betti, generators=True):
    block = {
        "values": list(betti.values),
        "lower_bound_only": betti.lower_bound_only,
    }
    if generators:
        block["generators"] = [
            [[list(P), list(I)] for P, I in row] for row in betti.generators
        ]
    return block


def _lck_json(lck):
    return {
        "admissible": lck.admissible,
        "status": lck.status,
        "failing_generator": lck.failing_generator,
        "r_values": [[str(iv.lo), str(iv.hi)] for iv in lck.r_values],
        "lee_class": _theta_json(lck.lee_class) if lck.lee_class else None,
        "chern_vanishing": lck.chern_vanishing,
    }


def _spectrum_json(spectrum, certificates=None):
    block = {
        "values": list(spectrum.rho),
        "trivial_sets": _sets_json(spectrum.trivial_sets),
        "undecided_sets": [list(ix) for ix in spectrum.undecided_sets],
        "exact_cap_hit": spectrum.exact_cap_hit,
    }
    if certificates is not None:
        block["certificates"] = certificates
    return block


def _twist_block(theta, ts, tb, t):
    return {
        "theta": _theta_json(theta),
        "route": "algebraic" if theta.t_scaled_integers(t) is not None else "numeric",
        "rho": _spectrum_json(ts),
        "betti": _betti_json(tb, generators=False),
    }


def _has_undecided(spectrum, lck, twisted) -> bool:
    if spectrum.undecided_sets or lck.status == "undecided":
        return True
    return any(block["betti"]["lower_bound_only"] for block in twisted.values())


# --- subcommands -------------------------------------------------------------


def cmd_compute(args) -> int:
    start = time.perf_counter()
    spec = load_input(args.input)
    precision, mode, cfg = _settings(spec, args)
    field, subgroup, theta, spectrum, betti, lck = _run_pipeline(spec, precision, cfg)

    certificates = {}
    for row in spectrum.trivial_sets:
        for ix in row:
            verdict = certify_trivial(field, subgroup, ix, mode=mode, config=cfg)
            certificates[_ix_key(ix)] = verdict.certificate
    for ix in spectrum.undecided_sets:
        certificates[_ix_key(ix)] = "undecided"

    twisted = {}
    lee = lee_class(field)
    ts = twisted_spectrum(field, subgroup, lee, cfg)
    twisted["lee"] = _twist_block(lee, ts, betti_numbers(ts, field.s), field.t)
    if theta is not None:
        if args.theta_from_input:
            ti = twisted_spectrum(field, subgroup, theta, cfg)
            twisted["input"] = _twist_block(
                theta, ti, betti_numbers(ti, field.s), field.t
            )
        elif not args.quiet:
            print(
                "note: input theta ignored; pass --theta-from-input to use it",
                file=sys.stderr,
            )

    consistency = consistency_suite(field, subgroup, spectrum, betti, lck, cfg)

    report = {
        "schema_version": 1,
        "signature": {
            "n": field.n,
            "s": field.s,
            "t": field.t,
            "m": field.s + field.t,
        },
        "irreducibility_status": field.irreducibility_status,
        "admissibility": lck.status,
        "rho": _spectrum_json(spectrum, certificates),
        "betti": _betti_json(betti),
        "twisted": twisted,
        "lck": _lck_json(lck),
        "chern_vanishing_range": lck.chern_vanishing,
        "consistency": consistency,
    }
    if not args.quiet:
        report["telemetry"] = {
            "kernel": KERNEL,
            "field_precision_bits": field.precision_bits,
            "certify_mode": mode,
            "certification_bits": cfg.certification_bits,
            "exact_cap_hit": spectrum.exact_cap_hit,
        }

    payload = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    if not args.quiet:
        print(f"[timing] compute {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return 2 if _has_undecided(spectrum, lck, twisted) else 0


def _audit_claims(expected, spectrum, betti):
    """Check the identities on a recorded claim before trusting it, then
    match it against the recomputation."""
    eb = expected.get("betti")
    if eb is not None:
        top = len(eb) - 1
        for l in range(len(eb)):
            if eb[l] != eb[top - l]:
                raise ConsistencyError(
                    f"poincare symmetry violated in the recorded betti vector: "
                    f"b_{l} = {eb[l]} but b_{top - l} = {eb[top - l]}"
                )
        euler = sum((-1) ** l * v for l, v in enumerate(eb))
        if euler != 0:
            raise ConsistencyError(
                f"euler characteristic of the recorded betti vector is "
                f"{euler}, expected 0"
            )
        if tuple(eb) != betti.values:
            raise ConsistencyError(
                f"recorded betti vector {eb} does not match the computed "
                f"{list(betti.values)}"
            )
    er = expected.get("rho")
    if er is not None and tuple(er) != spectrum.rho:
        raise ConsistencyError(
            f"recorded spectrum {er} does not match the computed "
            f"{list(spectrum.rho)}"
        )


def cmd_verify(args) -> int:
    start = time.perf_counter()
    spec = load_input(args.input)
    precision, _, cfg = _settings(spec, args)
    field, subgroup, _, spectrum, betti, lck = _run_pipeline(spec, precision, cfg)
    if "expected" in spec:
        _audit_claims(spec["expected"], spectrum, betti)
    report = consistency_suite(field, subgroup, spectrum, betti, lck, cfg)
    for key in sorted(report):
        print(f"{key}: {report[key]}")
    print(f"[timing] verify {time.perf_counter() - start:.3f}s", file=sys.stderr)
    if any(v.startswith("skipped: undecided") for v in report.values()):
        print("PASS (lower bounds only: undecided sets present)")
        return 2
    print("PASS")
    return 0


def cmd_oracle(args) -> int:
    start = time.perf_counter()
    spec = load_input(args.input)
    precision, _, cfg = _settings(spec, args)
    field = build_field(spec["polynomial"], precision)
    gens = [AlgebraicNumber(field, vec) for vec in spec["units"]]
    subgroup = validate_subgroup(field, gens)
    reference = oracle_spectrum(field, subgroup, args.bits)
    main_spec = enumerate_spectrum(field, subgroup, cfg)
    print(f"[timing] oracle {time.perf_counter() - start:.3f}s", file=sys.stderr)
    if main_spec.undecided_sets:
        print(
            f"INCOMPARABLE: pipeline left {len(main_spec.undecided_sets)} "
            f"subsets undecided"
        )
        return 2
    disagreements = []
    for q in range(field.n + 1):
        ref_row, main_row = reference.trivial_sets[q], main_spec.trivial_sets[q]
        if ref_row != main_row:
            disagreements.append(
                f"degree {q}: oracle {_sets_json([ref_row])[0]} vs "
                f"pipeline {_sets_json([main_row])[0]}"
            )
    if disagreements:
        print(f"DISAGREE at {args.bits} bits:")
        for line in disagreements:
            print("  " + line)
        return 1
    print(f"rho: {list(main_spec.rho)}")
    print(f"AGREE: all {1 << field.n} subsets match at {args.bits} bits")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otc",
        description=(
            "Certified cohomology invariants of the compact complex manifold "
            "attached to a number field and a unit subgroup"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("compute", help="run the full pipeline, emit a JSON report")
    pc.add_argument("input", help="input JSON path")
    pc.add_argument("--precision", type=int, help="field precision in bits")
    pc.add_argument("--certify", choices=("exact", "numeric"))
    pc.add_argument("--paranoid", action="store_true", help="recheck with the fallback kernel")
    pc.add_argument("--theta-from-input", action="store_true", help="also twist by the input theta")
    pc.add_argument("--workers", type=int, help="screen worker count")
    pc.add_argument("--out", help="write the report here instead of stdout")
    pc.add_argument("--quiet", action="store_true", help="strip telemetry and notes")
    pc.set_defaults(func=cmd_compute)

    pv = sub.add_parser("verify", help="recompute and run every consistency check")
    pv.add_argument("input", help="input JSON path")
    pv.add_argument("--precision", type=int)
    pv.add_argument("--workers", type=int)
    pv.set_defaults(func=cmd_verify)

    po = sub.add_parser("oracle", help="brute-force cross-check of the spectrum")
    po.add_argument("input", help="input JSON path")
    po.add_argument("--bits", type=int, default=512, help="oracle ball precision")
    po.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ConsistencyError as e:
        print(f"FAIL: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
