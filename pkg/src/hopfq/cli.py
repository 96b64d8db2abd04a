"""Command-line interface.

Every command prints a single JSON document (the ``corpus`` command prints
one JSON record per input line).  All numeric values in the output are exact:
integers stay JSON integers and non-integer rationals are encoded as
``"p/q"`` strings, so a document survives a JSON round trip losslessly.
``encode_number``/``decode_number`` are the two halves of that contract.

Exit codes: 0 on success, 2 when the input fails validation, 3 when a
computed result contradicts an independent ground-truth check.  The log
level is taken from the ``HOPFQ_LOG`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .errors import InternalInconsistencyError, ValidationError
from .fields import canonicalize_biquadratic, validate_cyclic
from .freeness import (
    FREE,
    FieldSummary,
    StructureSummary,
    brute_force_generator,
    summary,
)
from .hopf import (
    action_matrix,
    generator_determinant,
    parse_gram_text,
    reduction_report,
    test_generator,
)
from .pell import QuadForm, find_with_divisibility, form_cycle, reduce_form, represents_one, solve_all

SCHEMA_VERSION = 1
DEFAULT_ORACLE_BOUND = 12

log = logging.getLogger(__name__)


# ---- exact JSON number encoding ----

def encode_number(value: Any) -> int | str:
    """Encode an exact rational for JSON: int when integral, else ``"p/q"``."""
    f = value if isinstance(value, Fraction) else Fraction(value)
    if f.denominator == 1:
        return int(f)
    return f"{f.numerator}/{f.denominator}"


def decode_number(value: Any) -> Fraction:
    """Inverse of :func:`encode_number`; raises ValidationError on junk."""
    if isinstance(value, bool):
        raise ValidationError(f"not a rational value: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        num, sep, den = value.partition("/")
        try:
            if sep:
                return Fraction(int(num), int(den))
            return Fraction(int(num))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational value: {value!r}") from exc
    raise ValidationError(f"not a rational value: {value!r}")


def _encode_matrix(rows: Sequence[Sequence[Any]]) -> list:
    return [[encode_number(entry) for entry in row] for row in rows]


def _encode_gram(gram: Sequence[Sequence[Sequence[Any]]]) -> list:
    return [[[encode_number(c) for c in vec] for vec in row] for row in gram]


def _print_document(doc: dict) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


# ---- report documents ----

def _structure_payload(entry: StructureSummary) -> dict:
    report = entry.report
    return {
        "family": entry.structure.family,
        "subfield": entry.structure.subfield_tag,
        "origin": entry.origin,
        "gram": _encode_gram(entry.gram),
        "hermite_form": _encode_matrix(entry.hnf),
        "index": encode_number(entry.index),
        "order_basis": _encode_matrix(entry.order_basis),
        "prescreen": {"outcome": entry.prescreen.outcome, "reason": entry.prescreen.reason},
        "freeness": {
            "decision": report.decision,
            "method": report.method,
            "witness": list(report.witness) if report.witness is not None else None,
            "witness_target": report.witness_target,
            "generator": list(report.generator) if report.generator is not None else None,
            "index": encode_number(report.index),
        },
    }


def _field_document(input_payload: dict, parameters: dict, field_summary: FieldSummary) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "input": input_payload,
        "field": {
            "family": field_summary.family,
            "classification": field_summary.classification,
            "parameters": parameters,
            "integral_basis": _encode_matrix(field_summary.descriptor),
        },
        "structures": [_structure_payload(entry) for entry in field_summary.structures],
    }


def _attach_oracle(doc: dict, field_summary: FieldSummary, bound: int) -> None:
    """Re-derive each freeness decision by exhaustive generator search.

    A generator found by the search while the decision says "not free" is an
    outright contradiction and aborts the run.  The converse (decision free,
    search empty) only means the true generator lies outside the box, so it
    is recorded but not treated as an error.
    """
    for entry, payload in zip(field_summary.structures, doc["structures"]):
        action = action_matrix(entry.gram)
        report = reduction_report(action)
        found = brute_force_generator(report, action, bound)
        payload["oracle"] = {
            "bound": bound,
            "generator": list(found) if found is not None else None,
        }
        if found is not None and entry.report.decision != FREE:
            raise InternalInconsistencyError(
                f"exhaustive search found generator {found} for {entry.structure.subfield_tag} "
                f"but the decision is {entry.report.decision!r}"
            )


def _cyclic_document(a: int, b: int, c: int) -> tuple[dict, FieldSummary]:
    p = validate_cyclic(a, b, c)
    fs = summary(p)
    parameters = {"a": p.a, "b": p.b, "c": p.c, "d": p.d}
    doc = _field_document({"command": "cyclic", "a": a, "b": b, "c": c}, parameters, fs)
    return doc, fs


def _biquadratic_document(m: int, n: int) -> tuple[dict, FieldSummary]:
    p = canonicalize_biquadratic(m, n)
    fs = summary(p)
    parameters = {"m": p.m, "n": p.n, "k": p.k, "d": p.d}
    doc = _field_document({"command": "biquadratic", "m": m, "n": n}, parameters, fs)
    return doc, fs


# ---- command handlers ----

def _run_cyclic(args: argparse.Namespace) -> int:
    doc, fs = _cyclic_document(args.a, args.b, args.c)
    if args.verify_oracle:
        _attach_oracle(doc, fs, args.oracle_bound)
    _print_document(doc)
    return 0


def _run_biquadratic(args: argparse.Namespace) -> int:
    doc, fs = _biquadratic_document(args.m, args.n)
    if args.verify_oracle:
        _attach_oracle(doc, fs, args.oracle_bound)
    _print_document(doc)
    return 0


def _run_pell(args: argparse.Namespace) -> int:
    solutions = solve_all(args.D, args.N)
    doc: dict = {
        "schema_version": SCHEMA_VERSION,
        "input": {"command": "pell", "D": args.D, "N": args.N},
        "kind": solutions.kind,
        "solutions": [[s.x, s.y] for s in solutions.solutions],
        "fundamental_unit": list(solutions.unit) if solutions.unit is not None else None,
    }
    if args.cross is not None:
        divisor = args.divisor if args.divisor is not None else args.N
        witness = find_with_divisibility(args.D, divisor, args.cross)
        doc["divisibility"] = {
            "target": divisor,
            "cross": args.cross,
            "witness": [witness.x, witness.y] if witness is not None else None,
        }
    _print_document(doc)
    return 0


def _run_form_cycle(args: argparse.Namespace) -> int:
    form = QuadForm(args.A, args.B, args.C)
    reduced = reduce_form(form)
    cycle = form_cycle(reduced)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "input": {"command": "form-cycle", "A": args.A, "B": args.B, "C": args.C},
        "discriminant": form.disc,
        "reduced": [reduced.a, reduced.b, reduced.c],
        "cycle": [[f.a, f.b, f.c] for f in cycle],
        "represents_one": represents_one(form),
    }
    _print_document(doc)
    return 0


def _parse_beta(text: str) -> tuple[int, int, int, int]:
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 4:
        raise ValidationError(f"--beta needs four comma-separated integers, got {text!r}")
    try:
        b1, b2, b3, b4 = (int(part) for part in parts)
    except ValueError as exc:
        raise ValidationError(f"--beta needs four comma-separated integers, got {text!r}") from exc
    return (b1, b2, b3, b4)


def _run_gram_file(args: argparse.Namespace) -> int:
    text = Path(args.gram).read_text(encoding="utf-8")
    gram = parse_gram_text(text)
    action = action_matrix(gram)
    report = reduction_report(action)
    doc: dict = {
        "schema_version": SCHEMA_VERSION,
        "input": {"command": "gram-file", "path": args.gram},
        "hermite_form": _encode_matrix(report.hnf),
        "index": encode_number(report.index),
        "order_basis": _encode_matrix(report.order_basis),
    }
    if args.beta is not None:
        beta = _parse_beta(args.beta)
        determinant = generator_determinant(action, beta)
        doc["beta"] = {
            "coordinates": list(beta),
            "determinant": encode_number(determinant),
            "is_generator": test_generator(report, action, beta),
        }
    _print_document(doc)
    return 0


# ---- corpus processing ----

def _corpus_record(lineno: int, line: str, verify_oracle: bool, oracle_bound: int) -> dict:
    """One JSON record per corpus line; validation problems become error records."""
    try:
        tokens = line.split()
        verb, raw_params = tokens[0], tokens[1:]
        try:
            params = [int(token) for token in raw_params]
        except ValueError as exc:
            raise ValidationError(f"parameters must be integers, got {line!r}") from exc
        if verb == "cyclic":
            if len(params) != 3:
                raise ValidationError(f"cyclic takes three parameters, got {line!r}")
            doc, fs = _cyclic_document(*params)
        elif verb == "biquadratic":
            if len(params) != 2:
                raise ValidationError(f"biquadratic takes two parameters, got {line!r}")
            doc, fs = _biquadratic_document(*params)
        else:
            raise ValidationError(f"unknown corpus verb {verb!r} on line {lineno}")
        if verify_oracle:
            _attach_oracle(doc, fs, oracle_bound)
        doc["line"] = lineno
        return doc
    except ValidationError as exc:
        return {
            "schema_version": SCHEMA_VERSION,
            "line": lineno,
            "input": line,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }


def _run_corpus(args: argparse.Namespace) -> int:
    if args.parallel < 1:
        raise ValidationError(f"--parallel needs a positive worker count, got {args.parallel}")
    text = Path(args.path).read_text(encoding="utf-8")
    jobs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            jobs.append((lineno, line))

    def worker(job: tuple[int, str]) -> dict:
        return _corpus_record(job[0], job[1], args.verify_oracle, args.oracle_bound)

    if args.parallel > 1:
        with ThreadPoolExecutor(max_workers=args.parallel) as pool:
            records = list(pool.map(worker, jobs))
    else:
        records = [worker(job) for job in jobs]

    had_error = False
    for record in records:
        print(json.dumps(record))
        if "error" in record:
            had_error = True
    return 2 if had_error else 0


# ---- argument parsing ----

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hopfq",
        description="Freeness of rings of integers over associated orders "
        "in the non-classical Hopf-Galois structures of quartic fields.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument(
        "--json", action="store_true", default=True,
        help="emit JSON (the default and only output format)",
    )

    oracle = argparse.ArgumentParser(add_help=False)
    oracle.add_argument(
        "--verify-oracle", action="store_true",
        help="re-derive each decision by exhaustive generator search and record the result",
    )
    oracle.add_argument(
        "--oracle-bound", type=int, default=DEFAULT_ORACLE_BOUND, metavar="K",
        help="coordinate box half-width for --verify-oracle (default %(default)s)",
    )

    cyclic = subparsers.add_parser(
        "cyclic", parents=[output, oracle],
        help="analyze the cyclic quartic field with parameters a, b, c",
    )
    cyclic.add_argument("-a", type=int, required=True, help="odd squarefree twist parameter")
    cyclic.add_argument("-b", type=int, required=True, help="positive part of d = b^2 + c^2")
    cyclic.add_argument("-c", type=int, required=True, help="positive part of d = b^2 + c^2")
    cyclic.set_defaults(handler=_run_cyclic)

    biquadratic = subparsers.add_parser(
        "biquadratic", parents=[output, oracle],
        help="analyze the biquadratic field generated by sqrt(m) and sqrt(n)",
    )
    biquadratic.add_argument("-m", type=int, required=True, help="first squarefree radicand")
    biquadratic.add_argument("-n", type=int, required=True, help="second squarefree radicand")
    biquadratic.set_defaults(handler=_run_biquadratic)

    pell = subparsers.add_parser(
        "pell", parents=[output],
        help="solve x^2 - D*y^2 = N exactly",
    )
    pell.add_argument("-D", type=int, required=True, help="coefficient D")
    pell.add_argument("-N", type=int, required=True, help="target value N")
    pell.add_argument(
        "-c", dest="cross", type=int, default=None,
        help="also report the first solution with target | x - c*y",
    )
    pell.add_argument(
        "-b", dest="divisor", type=int, default=None,
        help="divisibility target for -c (defaults to N)",
    )
    pell.set_defaults(handler=_run_pell)

    form = subparsers.add_parser(
        "form-cycle", parents=[output],
        help="reduction cycle of an indefinite binary quadratic form A*x^2 + B*x*y + C*y^2",
    )
    form.add_argument("A", type=int)
    form.add_argument("B", type=int)
    form.add_argument("C", type=int)
    form.set_defaults(handler=_run_form_cycle)

    corpus = subparsers.add_parser(
        "corpus", parents=[output, oracle],
        help="analyze every field listed in a text file, one JSON record per line",
    )
    corpus.add_argument("path", help="file of lines 'cyclic a b c' or 'biquadratic m n'")
    corpus.add_argument(
        "--parallel", type=int, default=1, metavar="N",
        help="number of worker threads (default %(default)s)",
    )
    corpus.set_defaults(handler=_run_corpus)

    gram = subparsers.add_parser(
        "gram-file", parents=[output],
        help="reduce a structure Gram matrix read from a text file",
    )
    gram.add_argument("--gram", required=True, metavar="PATH", help="Gram matrix file")
    gram.add_argument(
        "--beta", default=None, metavar="B1,B2,B3,B4",
        help="candidate generator coordinates to test against the index",
    )
    gram.set_defaults(handler=_run_gram_file)

    return parser


def _configure_logging() -> None:
    name = os.environ.get("HOPFQ_LOG", "WARNING").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _emit_error(exc: Exception, exit_code: int) -> None:
    _print_document({
        "schema_version": SCHEMA_VERSION,
        "error": {"type": type(exc).__name__, "message": str(exc), "exit_code": exit_code},
    })


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    log.debug("dispatching %s", args.command)
    try:
        return args.handler(args)
    except ValidationError as exc:
        log.info("validation error: %s", exc)
        _emit_error(exc, 2)
        return 2
    except OSError as exc:
        log.info("i/o error: %s", exc)
        _emit_error(exc, 2)
        return 2
    except InternalInconsistencyError as exc:
        log.error("internal inconsistency: %s", exc)
        _emit_error(exc, 3)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
