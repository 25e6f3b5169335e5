"""Leibniz differentiation, identity hierarchies, closure checks, saturation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NoConditions, SeedNotVanishing, SeedVanishes
from .rules import (
    RuleSet,
    apply_conditions,
    match_ideal,
    reduce,
    vanishes,
    word_vanishes,
)
from .terms import (
    Expression,
    Factor,
    Monomial,
    MultiIndex,
    OperatorWord,
    multi_index,
    normalize_word,
)

PLAIN = "plain"
TRANSFER = "transfer"


@dataclass(frozen=True)
class Identity:
    """A reduced, nonzero expression asserted to equal zero."""

    expression: Expression
    seed: Monomial | None
    applied: tuple[str, ...]
    depth: int
    coherent: bool = True
    index: MultiIndex | None = None

    def __str__(self):
        return f"{self.expression} = 0"


@dataclass(frozen=True)
class ClosureVerdict:
    closed: bool
    mode: str
    witness: Expression

    def __str__(self):
        return "CLOSED" if self.closed else "NOT CLOSED"


def apply_label(rules: RuleSet, label: str, f: Factor) -> tuple[object, Factor | None]:
    """d_label f as (scalar, factor); factor is None when the result is zero."""
    scalar, word = normalize_word(f.word.prepend(label), rules)
    if not scalar:
        return scalar, None
    g = Factor(f.atom, word)
    if word_vanishes(rules, g):
        return 0, None
    return scalar, g


def _expand(rules: RuleSet, label: str, e: Expression) -> Expression:
    out = []
    for m in e:
        for f, mult in m.factors:
            scalar, g = apply_label(rules, label, f)
            if g is None:
                continue
            t = m.replace_one(f, g)
            out.append(t.with_coeff(m.coeff * mult * scalar))
    return Expression(out)


def differentiate(rules: RuleSet, label: str, e: Expression | Monomial) -> Expression:
    """Leibniz rule over multisets, reduced under the declared rules.

    A factor of multiplicity m contributes m copies of the summand where one
    of its entries is differentiated; the extra letter goes in front.
    """
    rules.label(label)
    if isinstance(e, Monomial):
        e = Expression.of(e)
    return reduce(rules, _expand(rules, label, e))


def derive_identity(rules: RuleSet, label: str, seed: Monomial) -> Identity | None:
    """Formal d_label of a vanishing seed; the seed's own vanishing is ignored once."""
    if not vanishes(rules, seed):
        raise SeedNotVanishing(f"{seed} does not vanish under the declared rules")
    expr = differentiate(rules, label, seed)
    if not expr:
        return None
    return _identity(rules, expr, seed, (label,), 1)


def _identity(rules, expr, seed, applied, depth) -> Identity:
    indices = {multi_index(rules, m) for m in expr}
    index = next(iter(indices)) if len(indices) == 1 else None
    return Identity(expr, seed, tuple(applied), depth, len(indices) == 1, index)


def hierarchy(rules: RuleSet, seed: Monomial, labels: Sequence[str], depth: int) -> list[Identity]:
    """Breadth-first tree of identities obtained by repeatedly differentiating a zero seed.

    Identities that coincide up to an overall scalar are stored once.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if not vanishes(rules, seed):
        raise SeedNotVanishing(f"{seed} does not vanish under the declared rules")
    seen: set[Expression] = set()
    result: list[Identity] = []
    frontier: list[tuple[Expression, tuple[str, ...]]] = [(Expression.of(seed), ())]
    for level in range(1, depth + 1):
        nxt = []
        for expr, applied in frontier:
            for lab in labels:
                out = differentiate(rules, lab, expr)
                if not out:
                    continue
                key = out.primitive()
                if key in seen:
                    continue
                seen.add(key)
                ident = _identity(rules, out, seed, applied + (lab,), level)
                result.append(ident)
                nxt.append((out, ident.applied))
        if not nxt:
            break
        frontier = nxt
    return result


def is_closed(rules: RuleSet, label: str, m: Monomial, mode: str = PLAIN) -> ClosureVerdict:
    if vanishes(rules, m):
        raise SeedVanishes(f"{m} already vanishes; closed products are nonzero")
    witness = differentiate(rules, label, m)
    if mode == TRANSFER and witness:
        witness = transfer_cancel(rules, witness)
    elif mode not in (PLAIN, TRANSFER):
        raise ValueError(f"unknown closure mode {mode!r}")
    return ClosureVerdict(not witness, mode, witness)


def _strip_leading(f: Factor) -> tuple[str, Factor]:
    (lab, r), rest = f.word.letters[0], f.word.letters[1:]
    word = OperatorWord(((lab, r - 1),) + rest) if r > 1 else OperatorWord(rest)
    return lab, Factor(f.atom, word)


def _pair_ideal_vanishes(rules: RuleSet, m: Monomial) -> bool:
    counts = m.counts()
    return any(i.arity == 2 and match_ideal(i.members, counts) for i in rules.ideals)


def transfer_identities(rules: RuleSet, m: Monomial, max_moves: int = 2) -> Iterable[Expression]:
    """Identities that contain `m`, got by moving outer letters off its factors.

    Stripping leading letters from up to `max_moves` factor copies gives a
    product killed by a pair ideal; differentiating it back along the stripped
    letters is an identity (= 0) in which `m` reappears.
    """
    start = m.with_coeff(1)
    stack = [(start, ())]
    while stack:
        cur, stripped = stack.pop()
        if len(stripped) == max_moves:
            continue
        for f, _ in cur.factors:
            if not f.word:
                continue
            lab, g = _strip_leading(f)
            seed = cur.replace_one(f, g)
            labels = stripped + (lab,)
            if _pair_ideal_vanishes(rules, seed):
                expr = Expression.of(seed)
                for l2 in reversed(labels):
                    expr = differentiate(rules, l2, expr)
                if expr.coefficient(start):
                    yield expr
            stack.append((seed, labels))


def transfer_cancel(rules: RuleSet, e: Expression, max_moves: int = 2) -> Expression:
    """Use pairwise transfer identities to cancel terms until no rewrite helps.

    A rewrite eliminates one monomial with a transfer identity and is kept
    only when the number of surviving terms drops.
    """
    current = reduce(rules, e)
    seen = {current}
    progress = True
    while progress and current:
        progress = False
        for m in current:
            for ident in transfer_identities(rules, m, max_moves):
                c = ident.coefficient(m.factors)
                cand = current - ident.scale(m.coeff / c)
                if len(cand) < len(current) and cand not in seen:
                    seen.add(cand)
                    current = cand
                    progress = True
                    break
            if progress:
                break
    return current


def saturate_conditions(rules: RuleSet, depth: int, labels: Sequence[str] | None = None) -> list[Identity]:
    """Differentiate every declared condition along all label sequences up to `depth`.

    After each step the conditions are substituted back and the result reduced;
    every nonzero relation is recorded once (up to scaling) together with its
    multi-index coherence.
    """
    if not rules.conditions:
        raise NoConditions("the rule set declares no conditions")
    labels = tuple(labels) if labels is not None else rules.label_names
    seen: set[Expression] = set()
    out: list[Identity] = []
    for c in rules.conditions:
        frontier = [(c.residual(), ())]
        for level in range(1, depth + 1):
            nxt = []
            for expr, applied in frontier:
                for lab in labels:
                    rel = apply_conditions(rules, differentiate(rules, lab, expr))
                    if not rel:
                        continue
                    key = rel.primitive()
                    if key in seen:
                        continue
                    seen.add(key)
                    nxt.append((rel, applied + (lab,)))
                    out.append(_identity(rules, rel, None, applied + (lab,), level))
            frontier = nxt
    return out
