from fractions import Fraction

import pytest

from mcde.errors import NonPositiveOrder, UnknownLabel
from mcde.terms import (
    EMPTY_WORD,
    Factor,
    Monomial,
    MultiIndex,
    OperatorWord,
    ZERO,
    expr_add,
    expr_collect,
    expr_scale,
    factor,
    make_word,
    multi_index,
    normalize_word,
)

from conftest import E, M, spec


def W(*letters):
    return OperatorWord(tuple(letters))


class TestMakeWord:
    def test_merges_adjacent_same_label(self):
        assert make_word([("d", 1), ("d", 1)]) == W(("d", 2))

    def test_distinct_labels_unchanged(self):
        assert make_word([("d", 2), ("e", 1)]) == W(("d", 2), ("e", 1))

    def test_merge_at_tail(self):
        assert make_word([("d", 1), ("e", 3), ("e", 2)]) == W(("d", 1), ("e", 5))

    def test_bad_order(self):
        with pytest.raises(NonPositiveOrder):
            make_word([("d", 0)])

    def test_unknown_label(self):
        with pytest.raises(UnknownLabel):
            make_word([("x", 1)], labels=["d"])


class TestNormalizeWord:
    def test_zero_commutation_annihilates(self):
        rules = spec("commute d e = 0;")
        assert normalize_word(W(("d", 1), ("e", 1)), rules) == (0, EMPTY_WORD)

    def test_single_swap(self):
        rules = spec("order e d;", "commute d e = 1;")
        assert normalize_word(W(("d", 1), ("e", 1)), rules) == (1, W(("e", 1), ("d", 1)))

    def test_signed_swap_of_powers(self):
        rules = spec("order e d;", "commute d e = -1;")
        assert normalize_word(W(("d", 2), ("e", 3)), rules) == (1, W(("e", 3), ("d", 2)))

    def test_odd_sign(self):
        rules = spec("order e d;", "commute d e = -1;")
        assert normalize_word(W(("d", 1), ("e", 3)), rules) == (-1, W(("e", 3), ("d", 1)))

    def test_undefined_swap_leaves_word(self):
        rules = spec("order e d;")
        w = W(("d", 1), ("e", 1))
        assert normalize_word(w, rules) == (1, w)

    def test_inverse_direction_derived(self):
        # declared e d -> 2 d e, so d e -> 1/2 e d
        rules = spec("order e d;", "commute e d = 2;")
        assert normalize_word(W(("d", 1), ("e", 1)), rules) == (Fraction(1, 2), W(("e", 1), ("d", 1)))

    def test_swap_merges_letters(self):
        rules = spec("order e d;", "commute d e = 3;")
        # e d e -> e e d with one swap of (d, e)
        assert normalize_word(W(("e", 1), ("d", 1), ("e", 1)), rules) == (3, W(("e", 2), ("d", 1)))

    def test_brute_force_swapper(self):
        """Elementary swaps one letter at a time must agree with grouped swaps."""
        rules = spec("order e d;", "commute d e = (0+1i);")
        A = rules.commutator("d", "e")
        for r in range(1, 4):
            for s in range(1, 4):
                elems = ["d"] * r + ["e"] * s
                scalar = Fraction(1)
                changed = True
                while changed:
                    changed = False
                    for i in range(len(elems) - 1):
                        if elems[i] == "d" and elems[i + 1] == "e":
                            elems[i], elems[i + 1] = "e", "d"
                            scalar = scalar * A
                            changed = True
                got = normalize_word(W(("d", r), ("e", s)), rules)
                assert got == (scalar, W(("e", s), ("d", r)))


class TestMultiIndex:
    def test_single_letter(self, base):
        assert multi_index(base, factor("phi", ("d", 1))) == MultiIndex((1, 0), (-1, 0))

    def test_empty_word(self):
        rules = spec("atom gamma n [2, -1] m [0, 3];")
        assert multi_index(rules, Factor("gamma")) == MultiIndex((2, -1), (0, 3))

    def test_monomial_weighted(self, base):
        assert multi_index(base, M(base, "{[d]phi^2}")) == MultiIndex((2, 0), (-2, 0))

    def test_second_label(self, base):
        assert multi_index(base, factor("phi", ("e", 2), ("d", 1))) == MultiIndex((1, 2), (-1, -2))


class TestExpression:
    def test_cancellation(self, base):
        e = E(base, "{phi, psi}")
        assert expr_add(e, expr_scale(e, -1)) == ZERO
        assert str(ZERO) == "0"

    def test_collection(self, base):
        assert expr_collect(list(E(base, "2*{phi} + 3*{phi}"))) == E(base, "5*{phi}")
        assert E(base, "2*{phi} + 3*{phi}") == E(base, "5*{phi}")

    def test_zero_scale(self, base):
        assert expr_scale(E(base, "{phi}"), 0) == ZERO

    def test_render(self, base):
        assert str(E(base, "{[d]phi, psi} + {phi, [d]psi}")) == "{[d]phi, psi} + {phi, [d]psi}"
        assert str(E(base, "3*{[d]phi, phi^2}")) == "3*{phi^2, [d]phi}"
        # terms are listed in descending key order, so the negative one leads here
        assert str(E(base, "{phi} - 1/2*{psi}")) == "-1/2*{psi} + {phi}"

    def test_render_word(self, base):
        assert str(factor("phi", ("d", 2), ("e", 1))) == "[d^2 e]phi"

    def test_product(self, base):
        got = E(base, "{phi} + {psi}") * E(base, "{phi} - {psi}")
        assert got == E(base, "{phi^2} - {psi^2}")

    def test_primitive(self, base):
        e = E(base, "4*{phi} + 2*{psi}")
        assert e.primitive().coefficient(next(iter(e)).factors) == 1


class TestMonomial:
    def test_multiset_order_irrelevant(self, base):
        assert M(base, "{phi, [d]phi, phi}") == M(base, "{[d]phi, phi^2}")

    def test_replace_one(self, base):
        m = M(base, "{phi^3}")
        assert m.replace_one(Factor("phi"), factor("phi", ("d", 1))) == M(base, "{phi^2, [d]phi}")

    def test_nonpositive_multiplicity(self):
        with pytest.raises(ValueError):
            Monomial.of({Factor("phi"): 0})
