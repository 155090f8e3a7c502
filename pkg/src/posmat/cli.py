"""Command-line front end.

Exit codes: 0 success, 1 mathematical failure or rejection, 2 usage error.
All output is JSON with sorted keys, so identical arguments give
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from .automorphisms import description_from_json, description_to_json, obfuscated_oracle, random_parts
from .decompose import DecomposeConfig, decompose
from .errors import InvalidTriple, NotMonomial, UnsupportedRing
from .matrices import Matrix, monomial_recognize
from .rings import RingId
from .suites import SUITES, RunConfig, run_suite
from .words import factor_monomial, random_word

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(obj, output: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {path}: {exc}") from None


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("POSMAT_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"POSMAT_SEED must be an integer, got {env!r}") from None


def _config(args) -> RunConfig:
    cfg = RunConfig(
        ring=RingId(args.ring),
        n=args.n,
        trials=args.trials,
        seed=_seed(args),
        word_count=args.words,
        output=args.output,
    )
    try:
        cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def cmd_verify(args) -> int:
    cfg = _config(args)
    try:
        result = run_suite(args.suite, cfg)
    except UnsupportedRing as exc:
        _emit({"error": "UnsupportedRing", "message": str(exc), "suite": args.suite,
               "ring": cfg.ring.value}, cfg.output)
        return EXIT_USAGE
    _emit(result.to_json(), cfg.output)
    return EXIT_OK if result.ok else EXIT_FAIL


def cmd_decompose(args) -> int:
    cfg = _config(args)
    obj = _read_json(args.input)
    try:
        n, ring, parts = description_from_json(obj)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"bad automorphism description: {exc}") from None
    if args.n_given and n != cfg.n:
        raise UsageError(f"description has n={n} but --n {cfg.n} was given")
    if args.ring_given and ring is not cfg.ring:
        raise UsageError(f"description is over {ring.value} but --ring {cfg.ring.value} was given")
    if n < 3:
        raise UsageError("n must be at least 3")
    try:
        oracle, _ = obfuscated_oracle(parts, n, ring, seed=cfg.seed)
    except InvalidTriple as exc:
        raise UsageError(f"invalid automorphism part: {exc}") from None
    report = decompose(oracle, n, ring, DecomposeConfig(word_count=cfg.word_count, seed=cfg.seed))
    _emit(report.to_json(), cfg.output)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_factor(args) -> int:
    obj = _read_json(args.input)
    try:
        A = Matrix.from_json(obj)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"bad matrix: {exc}") from None
    try:
        M = monomial_recognize(A)
    except NotMonomial as exc:
        _emit({"error": "NotMonomial", "message": str(exc)}, args.output)
        return EXIT_FAIL
    _emit(factor_monomial(M).to_json(), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    cfg = _config(args)
    rng = random.Random(cfg.seed)
    if args.kind == "word":
        if args.length < 0:
            raise UsageError("--length must be nonnegative")
        w = random_word(cfg.n, cfg.ring, args.length, rng=rng)
        _emit(w.to_json(), cfg.output)
    else:
        parts = random_parts(cfg.n, cfg.ring, rng)
        _emit(description_to_json(parts, cfg.n, cfg.ring), cfg.output)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ring", choices=[r.value for r in RingId], default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=None, help="falls back to $POSMAT_SEED, then 0")
    p.add_argument("--words", type=int, default=50, help="random words in the residual check")
    p.add_argument("--output", default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="posmat", description="Automorphisms of nonnegative matrix semigroups.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("verify", help="run a numbered property suite")
    p.add_argument("suite", choices=SUITES)
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose", help="decompose an automorphism description")
    p.add_argument("input", help="automorphism description JSON file, or - for stdin")
    _common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("factor", help="factor a monomial matrix as [Diag, Perm]")
    p.add_argument("input", help="matrix JSON file, or - for stdin")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("gen", help="generate a random word or automorphism description")
    p.add_argument("kind", choices=["word", "oracle"])
    p.add_argument("--length", type=int, default=8)
    _common(p)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "ring"):
        args.ring_given = args.ring is not None
        args.n_given = args.n is not None
        args.ring = args.ring or "Q"
        args.n = args.n if args.n is not None else 3
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"posmat: error: {exc}\n")
        return EXIT_USAGE
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
