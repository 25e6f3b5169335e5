"""Positional brute-force model of the product, used to check the multiset engine.

Products are explicit sequences of factor occurrences and the Leibniz rule is
a literal sum over positions.  Word normalization is redone here from
elementary letters (inversion counting) instead of reusing the engine.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import SlotCapExceeded
from .rules import RuleSet, max_order_of, reduce
from .terms import Expression, Factor, Monomial, OperatorWord

SLOT_CAP = 8


@dataclass(frozen=True)
class PositionedProduct:
    slots: tuple[Factor, ...]
    coeff: object = Fraction(1)
    cap: int = SLOT_CAP

    def __post_init__(self):
        if len(self.slots) > self.cap:
            raise SlotCapExceeded(f"{len(self.slots)} slots exceed the cap of {self.cap}")


def _letters_to_word(elems: list[str]) -> OperatorWord:
    out: list[tuple[str, int]] = []
    for lab in elems:
        if out and out[-1][0] == lab:
            out[-1] = (lab, out[-1][1] + 1)
        else:
            out.append((lab, 1))
    return OperatorWord(tuple(out))


def _zero_pair(elems: list[str], rules: RuleSet) -> bool:
    for a, b in zip(elems, elems[1:]):
        if a != b:
            A = rules.commutator(a, b)
            if A is not None and A == 0:
                return True
    return False


def _apply(rules: RuleSet, label: str, f: Factor):
    """(scalar, factor) for d_label f, or None if it is zero."""
    elems = [label] + [lab for lab, r in f.word.letters for _ in range(r)]
    if _zero_pair(elems, rules):
        return None
    rank = {lab: rules.label_rank(lab) for lab in set(elems)}
    inversions = [(elems[i], elems[j]) for i in range(len(elems))
                  for j in range(i + 1, len(elems)) if rank[elems[i]] > rank[elems[j]]]
    factors = [rules.commutator(a, b) for a, b in inversions]
    if any(A is None for A in factors):
        scalar = None
    else:
        scalar = Fraction(1)
        for A in factors:
            scalar = scalar * A
    if scalar is None:
        word = _letters_to_word(elems)
        scalar = Fraction(1)
    else:
        if scalar == 0:
            return None
        ordered = sorted(elems, key=lambda lab: rank[lab])
        if _zero_pair(ordered, rules):
            return None
        word = _letters_to_word(ordered)
    # recurrence bounds, innermost group first
    groups = word.letters
    for i in range(len(groups)):
        lab, r = groups[i]
        inner = Factor(f.atom, OperatorWord(groups[i + 1:]))
        bound = max_order_of(rules, lab, inner)
        if bound is not None and r >= bound:
            return None
    return scalar, Factor(f.atom, word)


def positional_expand(rules: RuleSet, label: str, p: PositionedProduct) -> list[PositionedProduct]:
    """One term per slot with that slot differentiated; dead slots are dropped."""
    out = []
    for i, f in enumerate(p.slots):
        hit = _apply(rules, label, f)
        if hit is None:
            continue
        scalar, g = hit
        out.append(PositionedProduct(p.slots[:i] + (g,) + p.slots[i + 1:], p.coeff * scalar, p.cap))
    return out


def collapse(rules: RuleSet, terms: list[PositionedProduct]) -> Expression:
    """Forget positions, collect like multisets, then reduce."""
    acc: dict = {}
    for t in terms:
        key = tuple(sorted(t.slots))
        acc[key] = acc.get(key, 0) + t.coeff
    monos = [Monomial.of(list(k), c) for k, c in acc.items() if c]
    return reduce(rules, Expression(monos))


def arrange(m: Monomial, order: list[int] | None = None, cap: int = SLOT_CAP) -> PositionedProduct:
    """Lay a monomial out in slots, optionally permuted by `order`."""
    slots = m.units()
    if order is not None:
        slots = [slots[i] for i in order]
    return PositionedProduct(tuple(slots), m.coeff, cap)
