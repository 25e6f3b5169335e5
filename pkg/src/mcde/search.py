"""Bounded enumeration of candidate products and closed-product catalogs."""
from __future__ import annotations

import hashlib
import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .calculus import PLAIN, is_closed
from .errors import InvalidBounds
from .rules import RuleSet, rules_symmetric_under, vanishes, word_vanishes
from .terms import Factor, Monomial, OperatorWord, normalize_word


@dataclass(frozen=True)
class SearchBounds:
    max_distinct_factors: int = 2
    max_word_length: int = 1
    max_order_per_letter: int = 1
    max_multiplicity: int = 2
    atoms: tuple[str, ...] = ()
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("max_distinct_factors", "max_word_length",
                     "max_order_per_letter", "max_multiplicity"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise InvalidBounds(f"{name} must be a positive integer, got {v!r}")
        if not self.atoms:
            raise InvalidBounds("atom subset must be nonempty")
        if not self.labels:
            raise InvalidBounds("label subset must be nonempty")
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def for_rules(cls, rules: RuleSet, **kw) -> SearchBounds:
        kw.setdefault("atoms", rules.atom_names)
        kw.setdefault("labels", rules.label_names)
        return cls(**kw)

    def as_dict(self) -> dict:
        return {
            "max_distinct_factors": self.max_distinct_factors,
            "max_word_length": self.max_word_length,
            "max_order_per_letter": self.max_order_per_letter,
            "max_multiplicity": self.max_multiplicity,
            "atoms": list(self.atoms),
            "labels": list(self.labels),
        }


@dataclass(frozen=True)
class CatalogEntry:
    monomial: Monomial
    verdicts: dict            # label -> ClosureVerdict
    closed_under: tuple[str, ...]


@dataclass(frozen=True)
class Catalog:
    entries: tuple[CatalogEntry, ...]
    bounds: SearchBounds
    ruleset_fingerprint: str
    mode: str = PLAIN


def fingerprint(rules: RuleSet) -> str:
    from .specdsl import render_spec
    return hashlib.sha256(render_spec(rules).encode()).hexdigest()


def candidate_words(rules: RuleSet, bounds: SearchBounds) -> list[OperatorWord]:
    words = [OperatorWord()]
    letters = [(lab, r) for lab in bounds.labels for r in range(1, bounds.max_order_per_letter + 1)]
    for n in range(1, bounds.max_word_length + 1):
        for seq in itertools.product(letters, repeat=n):
            if any(a[0] == b[0] for a, b in zip(seq, seq[1:])):
                continue
            w = OperatorWord(tuple(seq))
            scalar, norm = normalize_word(w, rules)
            # only words already in normal form (with trivial scalar) represent a class
            if scalar == 1 and norm == w:
                words.append(w)
    return words


def candidate_factors(rules: RuleSet, bounds: SearchBounds) -> list[Factor]:
    out = []
    for atom in bounds.atoms:
        rules.atom(atom)
        for w in candidate_words(rules, bounds):
            f = Factor(atom, w)
            if not word_vanishes(rules, f):
                out.append(f)
    return sorted(out)


def enumerate_candidates(rules: RuleSet, bounds: SearchBounds) -> Iterator[Monomial]:
    """Nonvanishing unit-coefficient monomials within bounds, in canonical order."""
    factors = candidate_factors(rules, bounds)
    mults = range(1, bounds.max_multiplicity + 1)
    for k in range(1, min(bounds.max_distinct_factors, len(factors)) + 1):
        for combo in itertools.combinations(factors, k):
            for ms in itertools.product(mults, repeat=k):
                m = Monomial(Fraction(1), tuple(zip(combo, ms)))
                if not vanishes(rules, m):
                    yield m


def _check(args) -> list[tuple[int, dict]]:
    rules, chunk, labels, mode = args
    out = []
    for idx, m in chunk:
        verdicts = {lab: is_closed(rules, lab, m, mode) for lab in labels}
        if any(v.closed for v in verdicts.values()):
            out.append((idx, verdicts))
    return out


def default_workers() -> int:
    env = os.environ.get("MCDE_WORKERS")
    if env:
        return max(1, int(env))
    return 1


def search_closed(rules: RuleSet, bounds: SearchBounds, labels: Sequence[str] | None = None,
                  mode: str = PLAIN, workers: int | None = None, dedup: bool = True) -> Catalog:
    """Catalog every candidate closed under at least one label.

    Candidates are split round-robin across workers; results are merged by
    candidate index so the output does not depend on the worker count.
    """
    labels = tuple(labels) if labels else bounds.labels
    for lab in labels:
        rules.label(lab)
    workers = workers or default_workers()
    cands = list(enumerate(enumerate_candidates(rules, bounds)))
    if workers <= 1 or len(cands) < 2:
        hits = _check((rules, cands, labels, mode))
    else:
        chunks = [cands[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_check, [(rules, c, labels, mode) for c in chunks])
            hits = [h for part in parts for h in part]
    hits.sort(key=lambda h: h[0])
    entries = tuple(
        CatalogEntry(cands[idx][1], verdicts, tuple(l for l in labels if verdicts[l].closed))
        for idx, verdicts in hits
    )
    cat = Catalog(entries, bounds, fingerprint(rules), mode)
    return dedup_by_symmetry(rules, cat) if dedup else cat


def atom_symmetries(rules: RuleSet, limit: int = 5040) -> list[dict[str, str]]:
    """Atom permutations that preserve base indices and every declared rule."""
    classes: dict = {}
    for a in rules.atoms:
        classes.setdefault(a.base_index, []).append(a.name)
    groups = [names for names in classes.values() if len(names) > 1]
    per_class = []
    total = 1
    for names in groups:
        perms = list(itertools.permutations(names))
        total *= len(perms)
        per_class.append([dict(zip(names, p)) for p in perms])
    if total > limit:
        # too many to enumerate; fall back to transpositions
        per_class = [[{}] + [{a: b, b: a} for a, b in itertools.combinations(names, 2)]
                     for names in groups]
    out = []
    for choice in itertools.product(*per_class):
        mapping = {}
        for part in choice:
            mapping.update(part)
        mapping = {a: b for a, b in mapping.items() if a != b}
        if mapping and rules_symmetric_under(rules, mapping):
            out.append(mapping)
    return out


def rename_monomial(m: Monomial, mapping: dict[str, str]) -> Monomial:
    return Monomial.of({Factor(mapping.get(f.atom, f.atom), f.word): k for f, k in m.factors}, m.coeff)


def dedup_by_symmetry(rules: RuleSet, catalog: Catalog) -> Catalog:
    """Merge entries related by a rule-preserving renaming of atoms."""
    syms = atom_symmetries(rules)
    if not syms:
        return catalog
    best: dict = {}
    order: list = []
    for e in catalog.entries:
        orbit = [e.monomial.factors] + [rename_monomial(e.monomial, s).factors for s in syms]
        canon = min(orbit)
        if canon not in best:
            order.append(canon)
            best[canon] = e
        elif e.monomial.factors < best[canon].monomial.factors:
            best[canon] = e
    return Catalog(tuple(best[c] for c in order), catalog.bounds,
                   catalog.ruleset_fingerprint, catalog.mode)
