"""Command-line frontend.

Exit codes: 0 success, 1 a verification case failed, 2 usage, parse or
semantic error.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .calculus import PLAIN, TRANSFER, ClosureVerdict, derive_identity, differentiate, hierarchy, is_closed, saturate_conditions
from .errors import McdeError
from .scalars import GaussianRational, Scalar, gauss
from .search import Catalog, CatalogEntry, SearchBounds, search_closed
from .specdsl import SpecSource, parse_expr, parse_monomial, parse_spec
from .terms import Expression, Factor, Monomial, OperatorWord

CATALOG_VERSION = 1

_BOUND_KEYS = {
    "factors": "max_distinct_factors",
    "word": "max_word_length",
    "order": "max_order_per_letter",
    "mult": "max_multiplicity",
}


# --- JSON encoding -------------------------------------------------------

def scalar_to_json(c: Scalar):
    if isinstance(c, GaussianRational):
        return {"re": [c.re.numerator, c.re.denominator], "im": [c.im.numerator, c.im.denominator]}
    return [c.numerator, c.denominator]


def scalar_from_json(v) -> Scalar:
    if isinstance(v, dict):
        return gauss(Fraction(*v["re"]), Fraction(*v["im"]))
    return Fraction(*v)


def monomial_to_json(m: Monomial) -> dict:
    return {
        "coeff": scalar_to_json(m.coeff),
        "factors": [{"atom": f.atom, "word": [[lab, r] for lab, r in f.word], "mult": k}
                    for f, k in m.factors],
    }


def monomial_from_json(d: dict) -> Monomial:
    counts = {Factor(f["atom"], OperatorWord(tuple((lab, r) for lab, r in f["word"]))): f["mult"]
              for f in d["factors"]}
    return Monomial.of(counts, scalar_from_json(d["coeff"]))


def expression_to_json(e: Expression) -> dict:
    return {"text": str(e), "terms": [monomial_to_json(m) for m in e]}


def catalog_to_json(catalog: Catalog) -> dict:
    entries = []
    for e in catalog.entries:
        witness = {lab: {"closed": v.closed, "mode": v.mode, "terms": [monomial_to_json(m) for m in v.witness]}
                   for lab, v in e.verdicts.items()}
        entries.append({
            "monomial": monomial_to_json(e.monomial),
            "closed_under": list(e.closed_under),
            "witness": witness,
        })
    return {
        "version": CATALOG_VERSION,
        "ruleset_fingerprint": catalog.ruleset_fingerprint,
        "bounds": catalog.bounds.as_dict(),
        "mode": catalog.mode,
        "entries": entries,
    }


def catalog_from_json(doc: dict) -> Catalog:
    if doc.get("version") != CATALOG_VERSION:
        raise ValueError(f"unsupported catalog version {doc.get('version')!r}")
    b = doc["bounds"]
    bounds = SearchBounds(b["max_distinct_factors"], b["max_word_length"], b["max_order_per_letter"],
                          b["max_multiplicity"], tuple(b["atoms"]), tuple(b["labels"]))
    entries = []
    for e in doc["entries"]:
        verdicts = {lab: ClosureVerdict(w["closed"], w["mode"], Expression(monomial_from_json(t) for t in w["terms"]))
                    for lab, w in e["witness"].items()}
        entries.append(CatalogEntry(monomial_from_json(e["monomial"]), verdicts, tuple(e["closed_under"])))
    return Catalog(tuple(entries), bounds, doc["ruleset_fingerprint"], doc.get("mode", PLAIN))


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_catalog(catalog: Catalog, path: str | Path) -> None:
    Path(path).write_text(dumps(catalog_to_json(catalog)), encoding="utf-8")


def read_catalog(path: str | Path) -> Catalog:
    return catalog_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


# --- argument handling ---------------------------------------------------

def parse_bounds(text: str) -> dict:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        key, sep, value = part.partition("=")
        if not sep or key.strip() not in _BOUND_KEYS:
            raise argparse.ArgumentTypeError(
                f"bad bound {part!r}; expected key=value with key in {', '.join(_BOUND_KEYS)}")
        try:
            out[_BOUND_KEYS[key.strip()]] = int(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bound {key.strip()!r} needs an integer, got {value!r}")
    return out


def _names(text: str) -> tuple[str, ...]:
    return tuple(n.strip() for n in text.split(",") if n.strip())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mcde", description="Exact calculus of distributed products.")
    p.add_argument("--format", choices=("text", "json"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, help_text, spec=True):
        sp = sub.add_parser(name, help=help_text)
        if spec:
            sp.add_argument("--spec", required=True, help="specification file")
        sp.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
        return sp

    sp = cmd("expand", "apply one differential with the Leibniz rule")
    sp.add_argument("--label", required=True)
    sp.add_argument("--expr", required=True)

    sp = cmd("identity", "derive the identity from a vanishing seed")
    sp.add_argument("--label", required=True)
    sp.add_argument("--seed", required=True)

    sp = cmd("hierarchy", "breadth-first identities up to a depth")
    sp.add_argument("--seed", required=True)
    sp.add_argument("--labels", required=True, type=_names)
    sp.add_argument("--depth", required=True, type=int)

    sp = cmd("closed", "check whether a product is closed under a differential")
    sp.add_argument("--label", required=True)
    sp.add_argument("--expr", required=True)
    sp.add_argument("--transfer", action="store_true", help="allow pairwise transfer cancellation")

    sp = cmd("search", "enumerate closed products within bounds")
    sp.add_argument("--bounds", type=parse_bounds, default={},
                    help="comma list of factors=N, word=N, order=N, mult=N")
    sp.add_argument("--atoms", type=_names)
    sp.add_argument("--labels", type=_names, help="labels to use in words (default: all)")
    sp.add_argument("--check", type=_names, help="labels to test closure under (default: --labels)")
    sp.add_argument("--transfer", action="store_true")
    sp.add_argument("--no-dedup", action="store_true", help="keep atom-renamed duplicates")
    sp.add_argument("--workers", type=int)
    sp.add_argument("--out", required=True)

    sp = cmd("saturate", "differentiate declared conditions up to a depth")
    sp.add_argument("--depth", required=True, type=int)
    sp.add_argument("--labels", type=_names)

    sp = cmd("verify-paper", "run the pinned example suite and the oracle check", spec=False)
    sp.add_argument("--samples", type=int, default=200, help="random monomials for the oracle check")
    sp.add_argument("--seed", type=int, default=0)
    return p


class _Out:
    def __init__(self, fmt: str, stream):
        self.fmt, self.stream = fmt, stream

    def emit(self, text: str, doc) -> None:
        self.stream.write(dumps(doc) if self.fmt == "json" else text + "\n")


def _load(path: str):
    text = Path(path).read_text(encoding="utf-8")
    return parse_spec(SpecSource(text, path))


def _positive(name: str, v: int) -> None:
    if v < 1:
        raise McdeError(f"--{name} must be a positive integer, got {v}")


def _run(args, out: _Out) -> int:
    if args.command == "verify-paper":
        from .suite import run_suite
        results = run_suite(args.samples, args.seed)
        text = "\n".join(r.line() for r in results)
        failed = [r for r in results if not r.passed]
        text += f"\n{len(results) - len(failed)}/{len(results)} passed"
        out.emit(text, {"cases": [{"tag": r.tag, "passed": r.passed, "detail": r.detail} for r in results]})
        return 1 if failed else 0

    rules = _load(args.spec)

    if args.command == "expand":
        e = differentiate(rules, args.label, parse_expr(rules, args.expr))
        out.emit(str(e), expression_to_json(e))
    elif args.command == "identity":
        ident = derive_identity(rules, args.label, parse_monomial(rules, args.seed))
        if ident is None:
            out.emit("0 = 0  (trivial)", {"identity": None})
        else:
            out.emit(str(ident), {"identity": expression_to_json(ident.expression),
                                  "coherent": ident.coherent})
    elif args.command == "hierarchy":
        _positive("depth", args.depth)
        idents = hierarchy(rules, parse_monomial(rules, args.seed), args.labels, args.depth)
        lines = [f"depth {i.depth} [{' '.join(i.applied)}]: {i}" for i in idents]
        out.emit("\n".join(lines) if lines else "no identities",
                 {"identities": [{"depth": i.depth, "applied": list(i.applied),
                                  "expression": expression_to_json(i.expression)} for i in idents]})
    elif args.command == "closed":
        m = parse_monomial(rules, args.expr)
        v = is_closed(rules, args.label, m, TRANSFER if args.transfer else PLAIN)
        text = str(v) if v.closed else f"{v}\nresidue: {v.witness}"
        out.emit(text, {"closed": v.closed, "mode": v.mode, "witness": expression_to_json(v.witness)})
    elif args.command == "search":
        kw = dict(args.bounds)
        if args.atoms:
            kw["atoms"] = args.atoms
        if args.labels:
            kw["labels"] = args.labels
        bounds = SearchBounds.for_rules(rules, **kw)
        if args.workers is not None:
            _positive("workers", args.workers)
        cat = search_closed(rules, bounds, args.check, TRANSFER if args.transfer else PLAIN,
                            workers=args.workers, dedup=not args.no_dedup)
        write_catalog(cat, args.out)
        lines = [f"{e.monomial.body()}  closed under {', '.join(e.closed_under)}" for e in cat.entries]
        lines.append(f"{len(cat.entries)} closed products written to {args.out}")
        out.emit("\n".join(lines), {"entries": len(cat.entries), "out": args.out})
    elif args.command == "saturate":
        _positive("depth", args.depth)
        rels = saturate_conditions(rules, args.depth, args.labels)
        lines = [f"[{' '.join(r.applied)}] {r}" + ("" if r.coherent else "  (index-incoherent)") for r in rels]
        out.emit("\n".join(lines) if lines else "no relations",
                 {"relations": [{"applied": list(r.applied), "coherent": r.coherent,
                                 "expression": expression_to_json(r.expression)} for r in rels]})
    return 0


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args, _Out(args.format, stdout))
    except (McdeError, OSError, ValueError) as exc:
        stderr.write(f"mcde: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
