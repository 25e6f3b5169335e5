"""Declared rule system of a complex and the monomial vanishing decision."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import UnknownAtom, UnknownLabel
from .scalars import Scalar
from .terms import (
    Atom,
    DifferentialLabel,
    Expression,
    Factor,
    Monomial,
    OperatorWord,
    ZERO,
)


@dataclass(frozen=True)
class FactorPattern:
    """Matches factors; `None` in either field is a wildcard."""

    atom: str | None = None
    word: OperatorWord | None = None

    def matches(self, f: Factor) -> bool:
        return (self.atom is None or self.atom == f.atom) and (self.word is None or self.word == f.word)

    @property
    def specificity(self) -> int:
        # exact atom+word > exact atom > exact word > full wildcard
        return 2 * (self.atom is not None) + (self.word is not None)

    def sort_key(self):
        return (self.atom is None, self.atom or "", self.word is None, self.word or OperatorWord())

    @classmethod
    def exact(cls, f: Factor) -> FactorPattern:
        return cls(f.atom, f.word)

    def __str__(self):
        atom = self.atom if self.atom is not None else "*"
        if self.word is None:
            return f"[*]{atom}"
        if self.word:
            return f"[{self.word}]{atom}"
        return atom


@dataclass(frozen=True)
class Ideal:
    """A multiset of patterns; any product containing a simultaneous match vanishes."""

    members: tuple[FactorPattern, ...]

    def __post_init__(self):
        if len(self.members) < 2:
            raise ValueError("an ideal needs at least two members")
        object.__setattr__(self, "members", tuple(sorted(self.members, key=FactorPattern.sort_key)))

    @property
    def arity(self) -> int:
        return len(self.members)

    def matches(self, m: Monomial) -> bool:
        return match_ideal(self.members, m.counts())

    def __str__(self):
        parts, i = [], 0
        while i < len(self.members):
            j = i
            while j < len(self.members) and self.members[j] == self.members[i]:
                j += 1
            parts.append(str(self.members[i]) + (f"^{j - i}" if j - i > 1 else ""))
            i = j
        return "{ " + ", ".join(parts) + " }"


def match_ideal(members: tuple[FactorPattern, ...], counts: dict[Factor, int]) -> bool:
    """Assign every member to a distinct factor copy (backtracking)."""
    remaining = dict(counts)
    order = sorted(members, key=lambda p: -p.specificity)

    def go(i: int) -> bool:
        if i == len(order):
            return True
        p = order[i]
        for f, left in remaining.items():
            if left and p.matches(f):
                remaining[f] = left - 1
                if go(i + 1):
                    return True
                remaining[f] = left
        return False

    return go(0)


@dataclass(frozen=True)
class Condition:
    """D_J gamma = rhs; an empty rhs makes it an orthogonality condition."""

    lhs: Factor
    rhs: Expression = ZERO

    @property
    def kind(self) -> str:
        return "orthogonality" if not self.rhs else "differential"

    def residual(self) -> Expression:
        return Expression.of(Monomial.of([self.lhs])) - self.rhs


@dataclass(frozen=True)
class VanishVerdict:
    vanishes: bool
    reason: str | None = None   # max-order | max-power | ideal | zero-coefficient
    detail: object = None

    def __bool__(self):
        return self.vanishes


UNBOUNDED = None


@dataclass(frozen=True)
class RuleSet:
    slot_count: int
    labels: tuple[DifferentialLabel, ...]
    atoms: tuple[Atom, ...]
    max_order: dict = field(default_factory=dict)      # (label, FactorPattern) -> int
    max_power: dict = field(default_factory=dict)      # FactorPattern -> int
    ideals: tuple[Ideal, ...] = ()
    commutation: dict = field(default_factory=dict)    # (a, b) -> Scalar, as declared
    conditions: tuple[Condition, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "_labels", {d.name: d for d in self.labels})
        object.__setattr__(self, "_rank", {d.name: i for i, d in enumerate(self.labels)})
        object.__setattr__(self, "_atoms", {a.name: a for a in self.atoms})

    @property
    def label_names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.labels)

    @property
    def atom_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.atoms)

    def label(self, name: str) -> DifferentialLabel:
        try:
            return self._labels[name]
        except KeyError:
            raise UnknownLabel(name) from None

    def atom(self, name: str) -> Atom:
        try:
            return self._atoms[name]
        except KeyError:
            raise UnknownAtom(name) from None

    def label_rank(self, name: str) -> int:
        try:
            return self._rank[name]
        except KeyError:
            raise UnknownLabel(name) from None

    def commutator(self, a: str, b: str) -> Scalar | None:
        """A_ab in d_a d_b = A_ab d_b d_a; the reverse of a nonzero entry is 1/A."""
        if (a, b) in self.commutation:
            return self.commutation[(a, b)]
        rev = self.commutation.get((b, a))
        if rev:
            return 1 / rev
        return None

    def check_factor(self, f: Factor) -> None:
        self.atom(f.atom)
        for lab, _ in f.word:
            self.label(lab)

    def without(self, **changes) -> RuleSet:
        return replace(self, **changes)


def _lookup(table_items, test) -> int | None:
    best, best_spec = None, -1
    for pattern, bound in table_items:
        if test(pattern) and pattern.specificity > best_spec:
            best, best_spec = bound, pattern.specificity
    return best


def max_order_of(rules: RuleSet, label: str, inner: Factor) -> int | None:
    """Bound p with d_label^p(inner) = 0; None means unbounded."""
    rules.label(label)
    return _lookup(((p, b) for (lab, p), b in rules.max_order.items() if lab == label),
                   lambda p: p.matches(inner))


def max_power_of(rules: RuleSet, f: Factor) -> int | None:
    return _lookup(rules.max_power.items(), lambda p: p.matches(f))


def word_vanishes(rules: RuleSet, f: Factor) -> bool:
    """True when some letter's order reaches the maximal order for what it acts on."""
    letters = f.word.letters
    for i in range(len(letters) - 1, -1, -1):
        lab, r = letters[i]
        inner = Factor(f.atom, OperatorWord(letters[i + 1:]))
        bound = max_order_of(rules, lab, inner)
        if bound is not None and r >= bound:
            return True
    return False


def vanishes(rules: RuleSet, m: Monomial) -> VanishVerdict:
    if not m.coeff:
        return VanishVerdict(True, "zero-coefficient")
    for f, mult in m.factors:
        if word_vanishes(rules, f):
            return VanishVerdict(True, "max-order", f)
        q = max_power_of(rules, f)
        if q is not None and mult >= q:
            return VanishVerdict(True, "max-power", f)
    counts = m.counts()
    for i, ideal in enumerate(rules.ideals):
        if match_ideal(ideal.members, counts):
            return VanishVerdict(True, "ideal", i)
    return VanishVerdict(False)


def reduce(rules: RuleSet, e: Expression) -> Expression:
    return Expression(m for m in e if not vanishes(rules, m))


def apply_condition(rules: RuleSet, e: Expression, c: Condition) -> Expression:
    """Replace every copy of c.lhs by c.rhs (orthogonality kills the monomial)."""
    out = []
    for m in e:
        k = m.multiplicity(c.lhs)
        if not k:
            out.append(m)
            continue
        if not c.rhs:
            continue
        rest = m
        for _ in range(k):
            rest = rest.replace_one(c.lhs, None)
        piece = Expression.of(rest)
        for _ in range(k):
            piece = piece * c.rhs
        out.extend(piece)
    return reduce(rules, Expression(out))


def apply_conditions(rules: RuleSet, e: Expression) -> Expression:
    for c in rules.conditions:
        e = apply_condition(rules, e, c)
    return e


def rename_atoms(rules: RuleSet, mapping: dict[str, str]) -> RuleSet:
    """Rules with atoms renamed by `mapping` (atom declarations untouched)."""

    def rf(f: Factor) -> Factor:
        return Factor(mapping.get(f.atom, f.atom), f.word)

    def rp(p: FactorPattern) -> FactorPattern:
        return FactorPattern(mapping.get(p.atom, p.atom) if p.atom is not None else None, p.word)

    def re(e: Expression) -> Expression:
        return Expression(Monomial.of({rf(f): k for f, k in m.factors}, m.coeff) for m in e)

    return replace(
        rules,
        max_order={(lab, rp(p)): b for (lab, p), b in rules.max_order.items()},
        max_power={rp(p): b for p, b in rules.max_power.items()},
        ideals=tuple(Ideal(tuple(rp(p) for p in i.members)) for i in rules.ideals),
        conditions=tuple(Condition(rf(c.lhs), re(c.rhs)) for c in rules.conditions),
    )


def rules_symmetric_under(rules: RuleSet, mapping: dict[str, str]) -> bool:
    """Whether renaming atoms leaves every rule (as a set) unchanged."""
    for a, b in mapping.items():
        if rules.atom(a).base_index != rules.atom(b).base_index:
            return False
    other = rename_atoms(rules, mapping)
    return (other.max_order == rules.max_order
            and other.max_power == rules.max_power
            and sorted(map(str, other.ideals)) == sorted(map(str, rules.ideals))
            and set(other.conditions) == set(rules.conditions))
