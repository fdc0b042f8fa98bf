"""Command-line front end.

Subcommands chain the library layers: sequence materialization,
coefficient tables, series evaluation, the congruence-ladder build and
its verifier, window/norm reports, relation probes, and a `reproduce`
run of the whole acceptance suite.

Conventions shared by every subcommand:

  * exit codes: 0 success, 2 invalid configuration or domain,
    3 precision exhausted (after one automatic doubling), 4 failed
    construction or verification;
  * default working precision comes from the LAMBERTSEQ_PREC
    environment variable when --prec is absent (fallback 256);
  * artifacts are JSON with sorted keys and a "config" echo of every
    resolved option, so identical configs give byte-identical bytes;
  * --out may be a single .json path or a directory; a directory gets
    one file per artifact plus manifest.json with sha256 digests.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import gmpy2

from . import __version__
from .construction import Mode, build, check_invariants, verify_c1_c2
from .construction import CongruenceConstruction
from .coefficients import build_table
from .errors import (
    ConfigError,
    ConstructionError,
    DomainError,
    PrecisionError,
    SupplyError,
)
from .numerics import BallReal
from .numerics.algebraic import AlgebraicNumber
from .numerics.balls import decimal_bound
from .relations import find_relation
from .sequences import PrimePower, from_spec, generate
from .series import (
    LucasPair,
    eval_f,
    eval_h,
    eval_lambert,
    eval_reciprocal_lucas,
)
from .theoremlab import (
    compute_P,
    default_denominator,
    theta_norm,
    verify_denominator,
)

ENV_PREC = "LAMBERTSEQ_PREC"
FALLBACK_PREC = 256

_ALPHA_NAMES = {
    "golden": (-1, -1, 1),
    "plastic": (-1, -1, 0, 1),
}


# --- option parsing helpers ------------------------------------------


def _default_prec() -> int:
    raw = os.environ.get(ENV_PREC)
    if raw is None:
        return FALLBACK_PREC
    try:
        val = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{ENV_PREC} must be an integer, got {raw!r}") from exc
    if val < 8:
        raise ConfigError(f"{ENV_PREC} must be >= 8, got {val}")
    return val


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse {text!r} as a rational") from exc


def _parse_alpha(text: str, prec: int) -> AlgebraicNumber:
    """golden | plastic | an integer t >= 2 | comma-separated monic
    integer coefficients, constant first."""
    if text in _ALPHA_NAMES:
        return AlgebraicNumber(_ALPHA_NAMES[text], prec=prec)
    if "," in text:
        try:
            coeffs = tuple(int(p) for p in text.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad alpha coefficients {text!r}") from exc
        return AlgebraicNumber(coeffs, prec=prec)
    try:
        t = int(text)
    except ValueError as exc:
        raise ConfigError(f"unknown alpha spec {text!r}") from exc
    return AlgebraicNumber((-t, 1), prec=prec)


def _parse_mode(text: str) -> Mode:
    squeezed = text.replace("_", "-").lower()
    if squeezed in ("oneclass", "one-class"):
        return Mode.ONE_CLASS
    if squeezed in ("twoclass", "two-class"):
        return Mode.TWO_CLASS
    raise ConfigError(f"unknown mode {text!r}")


def _parse_int_list(text: str) -> tuple:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}") from exc


def _mpfr_decimal_up(x) -> str:
    """Upper decimal rendering of a nonnegative mpfr (tail bounds)."""
    if x == 0:
        return "0"
    q = gmpy2.mpq(x)
    return decimal_bound(Fraction(int(q.numerator), int(q.denominator)), 12, "ceil")


# --- artifact sink ----------------------------------------------------


def _dump(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


class _Sink:
    """Routes artifacts to stdout, a single file, or a directory."""

    def __init__(self, out):
        self.single = None
        self.directory = None
        self.entries = {}
        if out is not None:
            p = Path(out)
            if p.suffix == ".json":
                self.single = p
            else:
                self.directory = p

    @property
    def materialized(self) -> bool:
        return self.single is not None or self.directory is not None

    def add(self, name: str, text: str):
        data = text.encode()
        if self.single is not None:
            self.single.parent.mkdir(parents=True, exist_ok=True)
            self.single.write_bytes(data)
            print(f"wrote {self.single}")
        elif self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
            path = self.directory / name
            path.write_bytes(data)
            self.entries[name] = hashlib.sha256(data).hexdigest()
            print(f"wrote {path}")
        else:
            sys.stdout.write(text)

    def finish(self):
        if self.directory is not None and self.entries:
            manifest = {
                "artifacts": dict(sorted(self.entries.items())),
                "tool": {"name": "lambertseq", "version": __version__},
            }
            path = self.directory / "manifest.json"
            path.write_text(_dump(manifest))
            print(f"wrote {path}")


def _retry(fn, prec: int):
    """Run fn(prec); on PrecisionError retry once at doubled precision."""
    try:
        return fn(prec), prec, False
    except PrecisionError:
        doubled = 2 * prec
        return fn(doubled), doubled, True


# --- subcommand handlers ---------------------------------------------


def _cmd_sequences(args, sink: _Sink) -> int:
    tb = _parse_fraction(args.tail_bound) if args.tail_bound else None
    seq = from_spec(args.sequence, tail_bound=tb)
    report = seq.validate()
    payload = {
        "config": {
            "subcommand": "sequences",
            "sequence": args.sequence,
            "tail_bound": None if tb is None else str(tb),
            "version": __version__,
        },
        "spec": seq.spec_string(),
        "count": seq.count_materialized(),
        "terms": list(seq.terms),
        "validation": {
            "ok": report.ok,
            "failures": [list(f) for f in report.failures],
            "terms_checked": report.terms_checked,
        },
    }
    sink.add("sequences.json", _dump(payload))
    return 0 if report.ok else 4


def _cmd_coeffs(args, sink: _Sink) -> int:
    if args.limit < 1:
        raise ConfigError("--limit must be >= 1")
    seq = from_spec(args.sequence)
    table = build_table(seq, args.limit)
    config = {
        "subcommand": "coeffs",
        "sequence": seq.spec_string(),
        "limit": args.limit,
        "version": __version__,
    }
    header = "# config: " + json.dumps(config, sort_keys=True) + "\n"
    sink.add("coeffs.csv", header + table.to_csv_text())
    return 0


_SERIES_KINDS = (
    "f",
    "h",
    "lambert-minus",
    "lambert-plus",
    "lambert-minus-squared",
    "lambert-plus-squared",
    "lucas-u",
    "lucas-v",
)


def _cmd_eval(args, sink: _Sink) -> int:
    kind = args.series
    seq = from_spec(args.sequence)

    def run(prec):
        if kind in ("f", "h"):
            if args.j is None:
                raise ConfigError(f"--series {kind} needs --j")
            if args.z is None:
                raise ConfigError(f"--series {kind} needs --z")
            z = _parse_fraction(args.z)
            fn = eval_f if kind == "f" else eval_h
            return fn(args.j, z, seq, prec, min_terms=args.min_terms)
        if kind.startswith("lambert-"):
            if args.z is None:
                raise ConfigError(f"--series {kind} needs --z")
            z = _parse_fraction(args.z)
            sign = -1 if kind.startswith("lambert-minus") else 1
            squared = kind.endswith("-squared")
            return eval_lambert(seq, z, sign, squared, prec, min_terms=args.min_terms)
        alpha = _parse_alpha(args.alpha, prec)
        pair = LucasPair(alpha, args.beta_sign, prec=prec)
        which = "U" if kind == "lucas-u" else "V"
        return eval_reciprocal_lucas(seq, pair, which, prec, min_terms=args.min_terms)

    sv, prec_used, doubled = _retry(run, args.prec or FALLBACK_PREC)
    payload = {
        "config": {
            "subcommand": "eval",
            "series": kind,
            "sequence": seq.spec_string(),
            "z": args.z,
            "j": args.j,
            "alpha": args.alpha if kind.startswith("lucas") else None,
            "beta_sign": args.beta_sign if kind.startswith("lucas") else None,
            "min_terms": args.min_terms,
            "prec": args.prec,
            "prec_used": prec_used,
            "precision_doubled": doubled,
            "digits": args.digits,
            "version": __version__,
        },
        "value": sv.value.to_json(),
        "decimal": sv.value.decimal_interval(args.digits),
        "terms_used": sv.terms_used,
        "tail_bound": _mpfr_decimal_up(sv.tail_bound),
    }
    sink.add("eval.json", _dump(payload))
    return 0


def _cmd_construct(args, sink: _Sink) -> int:
    mode = _parse_mode(args.mode)
    seq = from_spec(args.sequence)

    def run(prec):
        c = build(args.k, seq, mode, prec=prec, scan_limit=args.scan_limit)
        check_invariants(c)
        return c

    c, prec_used, doubled = _retry(run, args.prec or 96)
    payload = {
        "config": {
            "subcommand": "construct",
            "k": args.k,
            "mode": str(mode),
            "sequence": seq.spec_string(),
            "scan_limit": args.scan_limit,
            "prec": args.prec,
            "prec_used": prec_used,
            "precision_doubled": doubled,
            "version": __version__,
        },
        "construction": c.to_json(),
        "invariants_checked": True,
    }
    sink.add("construct.json", _dump(payload))
    return 0


def _cmd_verify(args, sink: _Sink) -> int:
    try:
        obj = json.loads(Path(args.infile).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {args.infile}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.infile} is not valid JSON: {exc}") from exc
    if "construction" in obj:
        obj = obj["construction"]
    c = CongruenceConstruction.from_json(obj)
    check_invariants(c)
    gammas = None
    if args.gammas:
        gammas = tuple(_parse_int_list(args.gammas))
    report = verify_c1_c2(c, gammas)
    payload = {
        "config": {
            "subcommand": "verify",
            "in": str(args.infile),
            "gammas": None if args.gammas is None else list(_parse_int_list(args.gammas)),
            "version": __version__,
        },
        "passed": bool(report.ok),
        "k": report.k,
        "mode": str(report.mode),
        "gammas": [str(g) for g in report.gammas],
        "positions_checked": report.positions_checked,
    }
    sink.add("verify.json", _dump(payload))
    return 0 if report.ok else 4


def _cmd_theoremlab(args, sink: _Sink) -> int:
    mode = _parse_mode(args.mode)
    js = _parse_int_list(args.j)
    if not js or any(j not in (1, 2, 3, 4) for j in js):
        raise ConfigError("--j must list indices from 1..4")
    rho = _parse_int_list(args.rho)
    if len(rho) != 4:
        raise ConfigError("--rho needs exactly four integers")

    def run(prec):
        alpha = _parse_alpha(args.alpha, prec)
        seq = None
        construction = None
        if args.sequence:
            seq = from_spec(args.sequence)
            construction = build(
                args.k, seq, mode, scan_limit=args.scan_limit
            )
        results = {
            j: compute_P(
                j,
                args.k,
                alpha,
                prec,
                mode=mode,
                construction=construction,
                seq=seq,
                max_translates=args.max_translates,
            )
            for j in js
        }
        if args.d is not None:
            if not verify_denominator(alpha, args.d):
                raise ConfigError(
                    f"supplied denominator {args.d} fails the integrality check"
                )
            d = args.d
        else:
            d = default_denominator(alpha)
        norm_state = None
        if set(js) == {1, 2, 3, 4}:
            norm_state = theta_norm(
                tuple((r,) for r in rho),
                d,
                [results[j].value for j in (1, 2, 3, 4)],
                alpha,
                prec,
            )
        return alpha, results, d, norm_state

    (alpha, results, d, norm_state), prec_used, doubled = _retry(
        run, args.prec or FALLBACK_PREC
    )
    cert = next(iter(results.values())).certificate
    payload = {
        "config": {
            "subcommand": "theoremlab",
            "alpha": args.alpha,
            "k": args.k,
            "mode": str(mode),
            "j": list(js),
            "rho": list(rho),
            "sequence": args.sequence,
            "d": args.d,
            "scan_limit": args.scan_limit,
            "max_translates": args.max_translates,
            "prec": args.prec,
            "prec_used": prec_used,
            "precision_doubled": doubled,
            "version": __version__,
        },
        "alpha_classification": str(alpha.classification),
        "synthetic": args.sequence is None,
        "P": {str(j): results[j].to_json() for j in js},
        "certificate": None if cert is None else cert.to_json(),
        "denominator": {
            "d": str(d),
            "supplied": args.d is not None,
            "verified": bool(verify_denominator(alpha, d)),
        },
        "theta": None if norm_state is None else norm_state.theta_k.to_json(),
        "norm": None if norm_state is None else norm_state.norm.to_json(),
        "embeddings": None if norm_state is None else norm_state.embeddings,
    }
    sink.add("theoremlab.json", _dump(payload))
    return 0


def fib_lucas_prime_square_values(prec: int) -> list:
    """{1, sqrt5, S_F, S_L, sqrt5 S_F, sqrt5 S_L} with S_F, S_L the
    reciprocal sums over squares of the odd primes, all at `prec`."""
    alg = AlgebraicNumber(_ALPHA_NAMES["golden"], prec=prec)
    seq = generate(PrimePower(2), 12)
    pair = LucasPair(alg, -1, prec=prec)
    one = BallReal.exact(1, prec)
    sqrt5 = alg.alpha_real * 2 - 1
    sf = eval_reciprocal_lucas(seq, pair, "U", prec).value
    sl = eval_reciprocal_lucas(seq, pair, "V", prec).value
    return [one, sqrt5, sf, sl, sqrt5 * sf, sqrt5 * sl]


_VALUE_SOURCES = {"fib-lucas-p2": fib_lucas_prime_square_values}


def _cmd_relations(args, sink: _Sink) -> int:
    if args.action != "probe":
        raise ConfigError(f"unknown relations action {args.action!r}")
    if (args.values is None) == (args.values_from is None):
        raise ConfigError("give exactly one of --values / --values-from")
    delta = _parse_fraction(args.delta)
    prec = args.prec or (args.scale_bits + 88)

    if args.values is not None:
        fracs = [_parse_fraction(p) for p in args.values.split(",") if p.strip()]

        def make_values(bits):
            return [BallReal.exact(f, bits) for f in fracs]

    else:
        try:
            make_values = _VALUE_SOURCES[args.values_from]
        except KeyError as exc:
            raise ConfigError(
                f"unknown --values-from source {args.values_from!r}"
            ) from exc

    def run(p):
        vals = make_values(p)
        return find_relation(
            vals,
            args.scale_bits,
            args.max_coeff,
            delta=delta,
            values_provider=make_values,
        )

    probe, prec_used, doubled = _retry(run, prec)
    payload = {
        "config": {
            "subcommand": "relations",
            "action": "probe",
            "values": args.values,
            "values_from": args.values_from,
            "scale_bits": args.scale_bits,
            "max_coeff": args.max_coeff,
            "delta": str(delta),
            "prec": prec,
            "prec_used": prec_used,
            "precision_doubled": doubled,
            "version": __version__,
        },
        "found": probe.found,
        "probe": probe.to_json(),
    }
    sink.add("relations.json", _dump(payload))
    return 0


def _cmd_reproduce(args, sink: _Sink) -> int:
    from .acceptance import run_suite

    results = run_suite()
    all_passed = True
    for res in results:
        line = f"ACCEPTANCE {res.number}: {'PASS' if res.passed else 'FAIL'} - {res.name}"
        print(line)
        all_passed = all_passed and res.passed
        if sink.materialized:
            sink.add(f"criterion_{res.number:02d}.json", _dump(res.to_json()))
    if sink.materialized:
        summary = {
            "config": {"subcommand": "reproduce", "version": __version__},
            "passed": all_passed,
            "table": [[r.number, r.name, r.passed] for r in results],
        }
        sink.add("summary.json", _dump(summary))
    return 0 if all_passed else 4


# --- parser and dispatch ---------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lambertseq",
        description="Verified Lambert-type series, congruence ladders, "
        "and integer relation probes.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add_common(p, prec=True):
        p.add_argument("--out", default=None, help="artifact file (.json) or directory")
        if prec:
            p.add_argument(
                "--prec",
                type=int,
                default=None,
                help=f"working precision in bits (default ${ENV_PREC} or {FALLBACK_PREC})",
            )

    p = sub.add_parser("sequences", help="materialize and validate a sequence")
    p.add_argument("--sequence", required=True)
    p.add_argument("--tail-bound", default=None, help="for file:/explicit specs")
    add_common(p, prec=False)

    p = sub.add_parser("coeffs", help="sieved coefficient table as CSV")
    p.add_argument("--sequence", required=True)
    p.add_argument("--limit", type=int, required=True)
    add_common(p, prec=False)

    p = sub.add_parser("eval", help="evaluate a series with certified tails")
    p.add_argument("--sequence", required=True)
    p.add_argument("--series", required=True, choices=_SERIES_KINDS)
    p.add_argument("--z", default=None, help="rational argument, e.g. 1/2")
    p.add_argument("--j", type=int, default=None, help="projection index for f/h")
    p.add_argument("--alpha", default="golden", help="for lucas-u/lucas-v")
    p.add_argument("--beta-sign", type=int, default=-1, choices=(1, -1))
    p.add_argument("--min-terms", type=int, default=None)
    p.add_argument("--digits", type=int, default=50)
    add_common(p)

    p = sub.add_parser("construct", help="build a congruence ladder")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", required=True)
    p.add_argument("--sequence", required=True)
    p.add_argument("--scan-limit", type=int, default=20000)
    add_common(p)

    p = sub.add_parser("verify", help="re-verify a stored construction")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--gammas", default=None, help="comma-separated translates")
    add_common(p, prec=False)

    p = sub.add_parser("theoremlab", help="window sums, main terms, norm report")
    p.add_argument("--alpha", default="golden")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", required=True)
    p.add_argument("--j", default="1,2,3,4")
    p.add_argument("--rho", default="1,1,1,1", help="integer weights rho_1..rho_4")
    p.add_argument("--sequence", default=None, help="pipeline mode when given")
    p.add_argument("--d", type=int, default=None, help="caller-supplied denominator")
    p.add_argument("--scan-limit", type=int, default=20000)
    p.add_argument("--max-translates", type=int, default=64)
    add_common(p)

    p = sub.add_parser("relations", help="integer relation probe")
    p.add_argument("action", choices=("probe",))
    p.add_argument("--values", default=None, help="comma-separated rationals")
    p.add_argument("--values-from", default=None, choices=tuple(_VALUE_SOURCES))
    p.add_argument("--scale-bits", type=int, required=True)
    p.add_argument("--max-coeff", type=int, required=True)
    p.add_argument("--delta", default="3/4")
    add_common(p)

    p = sub.add_parser("reproduce", help="run the acceptance suite")
    add_common(p, prec=False)

    return parser


_HANDLERS = {
    "sequences": _cmd_sequences,
    "coeffs": _cmd_coeffs,
    "eval": _cmd_eval,
    "construct": _cmd_construct,
    "verify": _cmd_verify,
    "theoremlab": _cmd_theoremlab,
    "relations": _cmd_relations,
    "reproduce": _cmd_reproduce,
}


def _structured_error(kind: str, exc: Exception):
    blob = {"error": {"type": kind, "message": str(exc)}}
    print(json.dumps(blob, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 2
    if (
        "prec" in vars(args)
        and args.prec is None
        and os.environ.get(ENV_PREC) is not None
    ):
        try:
            args.prec = _default_prec()
        except ConfigError as exc:
            _structured_error("config", exc)
            return 2
    try:
        sink = _Sink(getattr(args, "out", None))
        code = _HANDLERS[args.cmd](args, sink)
        sink.finish()
        return code
    except (ConfigError, DomainError) as exc:
        _structured_error("config", exc)
        return 2
    except PrecisionError as exc:
        _structured_error("precision", exc)
        return 3
    except (ConstructionError, SupplyError) as exc:
        _structured_error("construction", exc)
        return 4


if __name__ == "__main__":
    sys.exit(main())
