"""Command-line entry point: ``sdmu <command> ...``.

stdout carries machine-readable results, stderr carries diagnostics.
Exit codes: 0 success, 1 negative answer, 2 not orchard, 3 verification
failed, 4 refused (non-orchard input to ``iso``), 64 parse error,
65 precondition violated, 66 input file missing.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .cherry import CherryError, find_cherries_net
from .dist import multiset_sym_diff, mu_distance, rep_distance
from .mu import MuParseError, MuRepresentation, canonical_serialize, format_entry, mu_representation, parse_mu
from .net import Network, NetworkError, validate
from .orchard import (
    NotOrchardError,
    VerificationFailed,
    is_orchard,
    random_orchard,
    reconstruct,
    reduce_completely,
)
from .sdnet import ParseError, format_sdnet, parse_sdnet

EXIT_OK = 0
EXIT_NO = 1
EXIT_NOT_ORCHARD = 2
EXIT_VERIFY = 3
EXIT_REFUSED = 4
EXIT_PARSE = 64
EXIT_PRECONDITION = 65
EXIT_NOINPUT = 66


class CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CliError(f"{path}: no such file", EXIT_NOINPUT) from None
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}", EXIT_NOINPUT) from None


def _is_murep(text: str) -> bool:
    for line in text.splitlines():
        s = line.strip()
        if s and not s.startswith("#"):
            return s.split()[0] == "taxa"
    return False


def _load_network(path: str, allow_nonbinary: bool = False) -> Network:
    text = _read_text(path)
    try:
        net = parse_sdnet(text)
    except ParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
    report = validate(net, allow_nonbinary=allow_nonbinary)
    if not report.ok:
        raise CliError(f"{path}: {report.format()}", EXIT_PRECONDITION)
    return net


def _load_rep(path: str) -> MuRepresentation:
    try:
        return parse_mu(_read_text(path))
    except MuParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
    except ValueError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None


def _load_either(path: str, allow_nonbinary: bool) -> Network | MuRepresentation:
    text = _read_text(path)
    if _is_murep(text):
        try:
            return parse_mu(text)
        except ValueError as exc:
            raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
    try:
        net = parse_sdnet(text)
    except ParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
    report = validate(net, allow_nonbinary=allow_nonbinary)
    if not report.ok:
        raise CliError(f"{path}: {report.format()}", EXIT_PRECONDITION)
    return net


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        net = parse_sdnet(_read_text(args.file))
    except ParseError as exc:
        raise CliError(f"{args.file}: {exc}", EXIT_PARSE) from None
    report = validate(net, allow_nonbinary=args.allow_nonbinary)
    print(report.format())
    return EXIT_OK if report.ok else EXIT_NO


def cmd_mu(args: argparse.Namespace) -> int:
    net = _load_network(args.file, args.allow_nonbinary)
    _emit(canonical_serialize(mu_representation(net)), args.output)
    return EXIT_OK


def cmd_cherries(args: argparse.Namespace) -> int:
    net = _load_network(args.file)
    for c in find_cherries_net(net):
        print(c)
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    net = _load_network(args.file)
    trace = reduce_completely(mu_representation(net), shuffle_seed=args.shuffle_seed)
    for step in trace.steps:
        print(step)
    print("complete" if trace.complete else "stuck")
    sys.stdout.write(canonical_serialize(trace.final))
    return EXIT_OK if trace.complete else EXIT_NO


def cmd_orchard(args: argparse.Namespace) -> int:
    net = _load_network(args.file)
    ok = is_orchard(net)
    print("orchard" if ok else "not-orchard")
    return EXIT_OK if ok else EXIT_NO


def cmd_reconstruct(args: argparse.Namespace) -> int:
    rep = _load_rep(args.file)
    try:
        net = reconstruct(rep)
    except NotOrchardError as exc:
        raise CliError(f"{args.file}: {exc}", EXIT_NOT_ORCHARD) from None
    except VerificationFailed as exc:
        raise CliError(f"{args.file}: verification failed: {exc}", EXIT_VERIFY) from None
    _emit(format_sdnet(net), args.output)
    return EXIT_OK


def cmd_distance(args: argparse.Namespace) -> int:
    x = _load_either(args.file1, args.allow_nonbinary)
    y = _load_either(args.file2, args.allow_nonbinary)
    try:
        if isinstance(x, Network) and isinstance(y, Network):
            res = mu_distance(x, y)
        else:
            rx = x if isinstance(x, MuRepresentation) else mu_representation(x)
            ry = y if isinstance(y, MuRepresentation) else mu_representation(y)
            res = rep_distance(rx, ry) if rx.taxa == ry.taxa else multiset_sym_diff(rx.entries, ry.entries)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PRECONDITION) from None
    print(res.value)
    if args.witness:
        for e in res.only_in_first:
            print("- " + format_entry(e))
        for e in res.only_in_second:
            print("+ " + format_entry(e))
    return EXIT_OK


def cmd_iso(args: argparse.Namespace) -> int:
    n1 = _load_network(args.file1)
    n2 = _load_network(args.file2)
    for path, net in ((args.file1, n1), (args.file2, n2)):
        if not is_orchard(net):
            raise CliError(f"{path}: not orchard, mu-equality does not decide isomorphism", EXIT_REFUSED)
    same = mu_distance(n1, n2).value == 0
    print("isomorphic" if same else "not-isomorphic")
    return EXIT_OK if same else EXIT_NO


def cmd_random_orchard(args: argparse.Namespace) -> int:
    try:
        net = random_orchard(args.taxa, args.reticulations, seed=args.seed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PRECONDITION) from None
    _emit(format_sdnet(net), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sdmu", description="mu-representations of semidirected networks")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a network file")
    s.add_argument("file")
    s.add_argument("--allow-nonbinary", action="store_true")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("mu", help="print the canonical mu-representation")
    s.add_argument("file")
    s.add_argument("-o", "--output")
    s.add_argument("--allow-nonbinary", action="store_true")
    s.set_defaults(func=cmd_mu)

    s = sub.add_parser("cherries", help="list cherries as 'a b TYPE'")
    s.add_argument("file")
    s.set_defaults(func=cmd_cherries)

    s = sub.add_parser("reduce", help="reduce cherries until none is left")
    s.add_argument("file")
    s.add_argument("--shuffle-seed", type=int)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("orchard", help="decide whether a network is orchard")
    s.add_argument("file")
    s.set_defaults(func=cmd_orchard)

    s = sub.add_parser("reconstruct", help="rebuild a network from a .murep file")
    s.add_argument("file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("distance", help="mu-distance of two networks or .murep files")
    s.add_argument("file1")
    s.add_argument("file2")
    s.add_argument("--witness", action="store_true", help="list the differing entries")
    s.add_argument("--allow-nonbinary", action="store_true")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("iso", help="decide isomorphism of two orchard networks")
    s.add_argument("file1")
    s.add_argument("file2")
    s.set_defaults(func=cmd_iso)

    s = sub.add_parser("random-orchard", help="generate a seeded random orchard network")
    s.add_argument("--taxa", type=int, required=True)
    s.add_argument("--reticulations", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_random_orchard)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"sdmu: {exc}", file=sys.stderr)
        return exc.code
    except (NetworkError, CherryError) as exc:
        print(f"sdmu: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
