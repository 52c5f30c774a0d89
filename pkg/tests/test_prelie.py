import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mirp.multiindex import MultiIndex, enumerate_populated, t_instance, t_prelie
from mirp.prelie import (
    GO_UNIT,
    Character,
    Endo,
    GOIndex,
    PreLieInstance,
    bch_compose,
    character_inverse,
    coaction,
    convolve,
    module_go_apply,
    prelie_identity_defect,
    table_to_json,
    word_coproduct,
)
from mirp.series import Series

L = "l"
BIG = 10**9


@pytest.fixture(scope="module")
def tinst():
    return t_instance([L], 5)


def unit_index(inst, key, mult=1):
    return GOIndex(((inst.id_of(key), mult),))


def rational_series(inst, grade, rng, count=3):
    keys = inst.basis_keys(grade)
    picks = rng.sample(keys, k=min(count, len(keys)))
    return Series(
        (k, Fraction(rng.randint(-3, 3), rng.randint(1, 4))) for k in picks
    )


# -- instance validation -------------------------------------------------------


def test_unknown_basis_id_rejected(tinst):
    with pytest.raises(KeyError):
        tinst.id_of(MultiIndex.unit("other"))


def test_product_grading_is_validated():
    bad = PreLieInstance(
        "bad",
        ["a", "b"],
        product=lambda x, y: Series.unit("a"),  # grade 1, should be 2
        grade=lambda k: 1,
    )
    with pytest.raises(ValueError, match="not graded"):
        bad.product("a", "b")


def test_prelie_defect_zero_on_derivation_algebra(tinst):
    e0 = MultiIndex.unit(L, 0)
    b2 = e0 + MultiIndex.unit(L, 1)
    assert prelie_identity_defect(tinst, e0, e0, e0).is_zero
    assert prelie_identity_defect(tinst, e0, b2, e0).is_zero


def test_prelie_defect_detects_broken_oracle():
    # a*a=b, a*b=c, c*a=d, b*b=0 violates the pre-Lie identity at (a, b, a)
    table = {("a", "a"): "b", ("a", "b"): "c", ("c", "a"): "d"}
    inst = PreLieInstance(
        "broken",
        ["a", "b", "c", "d"],
        product=lambda x, y: Series(
            {table[(x, y)]: 1} if (x, y) in table else {}
        ),
        grade=lambda k: {"a": 1, "b": 2, "c": 3, "d": 4}[k],
    )
    assert not prelie_identity_defect(inst, "a", "b", "a").is_zero


# -- word machinery ---------------------------------------------------------------


def test_go_to_words_trivial_cases(tinst):
    e0 = MultiIndex.unit(L, 0)
    assert tinst.go_to_words(GO_UNIT) == Series.unit(())
    single = tinst.go_to_words(unit_index(tinst, e0))
    assert single == Series.unit((tinst.id_of(e0),))


def test_go_to_words_hand_expansion(tinst):
    # A_I for I = one node-symbol plus one two-node symbol:
    # the ordered word minus the correction from one product application
    e0 = MultiIndex.unit(L, 0)
    b2 = e0 + MultiIndex.unit(L, 1)
    index = tinst.go_index({e0: 1, b2: 1})
    words = tinst.go_to_words(index)
    lead = (tinst.id_of(e0), tinst.id_of(b2))
    assert words[lead] == 1
    correction = t_prelie(e0, b2)
    for key, coeff in correction.items():
        assert words[(tinst.id_of(key),)] == -coeff
    assert len(words) == 1 + len(correction)


def test_leading_word_coefficient_is_inverse_factorial(tinst):
    e0 = MultiIndex.unit(L, 0)
    index = tinst.go_index({e0: 3})
    words = tinst.go_to_words(index)
    assert words[(tinst.id_of(e0),) * 3] == Fraction(1, 6)


@settings(deadline=None, max_examples=30)
@given(st.data())
def test_words_to_go_round_trip(data):
    inst = t_instance([L], 5)
    indices = inst.go_indices(5)
    index = data.draw(st.sampled_from(indices))
    assert inst.words_to_go(inst.go_to_words(index)) == Series.unit(index)


def test_words_to_go_trivial(tinst):
    e0 = MultiIndex.unit(L, 0)
    assert tinst.words_to_go(Series.unit(())) == Series.unit(GO_UNIT)
    assert tinst.words_to_go(Series.unit((tinst.id_of(e0),))) == Series.unit(
        unit_index(tinst, e0)
    )


@settings(deadline=None, max_examples=25)
@given(st.data())
def test_right_symmetry_of_diamond(data):
    inst = t_instance([L], 5)
    basis = inst.basis_keys(2)
    word = tuple(
        inst.id_of(k) for k in data.draw(st.lists(st.sampled_from(basis), max_size=3))
    )
    a = data.draw(st.sampled_from(basis))
    b = data.draw(st.sampled_from(basis))
    u = Series.unit(word)
    assert inst.diamond(inst.diamond(u, a), b) == inst.diamond(inst.diamond(u, b), a)


# -- envelope product ----------------------------------------------------------------


def test_go_product_unit(tinst):
    index = tinst.go_indices(3)[-1]
    assert tinst.go_product(index, GO_UNIT) == Series.unit(index)
    assert tinst.go_product(GO_UNIT, index) == Series.unit(index)


def test_go_product_antisymmetrization_is_bracket(tinst):
    e0 = MultiIndex.unit(L, 0)
    b2 = e0 + MultiIndex.unit(L, 1)
    i, j = unit_index(tinst, e0), unit_index(tinst, b2)
    got = tinst.go_product(i, j) - tinst.go_product(j, i)
    bracket = t_prelie(e0, b2) - t_prelie(b2, e0)
    expect = Series((unit_index(tinst, k), c) for k, c in bracket.items())
    assert got == expect


def test_projection_formula(tinst):
    # length-one part of A_I * A_{e_j} is the canonical action applied to a_j
    for index in tinst.go_indices(3):
        if not index.pairs():
            continue
        for j in tinst.basis_ids(2):
            product = tinst.go_product(index, GOIndex.single(j))
            lhs = Series((k, c) for k, c in product.items() if k.length == 1)
            image = tinst.rho_go_apply(index, Series.unit(j), BIG)  # id-keyed
            rhs = Series((GOIndex.single(k), c) for k, c in image.items())
            assert lhs == rhs


def test_envelope_coproduct_splits_binomially(tinst):
    # the deconcatenation coproduct of A_I recombines to the splittings of I
    for index in tinst.go_indices(3):
        got: dict = {}
        for word, coeff in tinst.go_to_words(index).items():
            for w1, w2 in word_coproduct(word):
                left = tinst.words_to_go(Series.unit(w1))
                right = tinst.words_to_go(Series.unit(w2))
                for j1, c1 in left.items():
                    for j2, c2 in right.items():
                        key = (j1, j2)
                        got[key] = got.get(key, 0) + coeff * c1 * c2
        got = {k: v for k, v in got.items() if v}
        assert got == {pair: Fraction(1) for pair in index.splittings()}


def test_generalized_leibniz(tinst):
    # U a = sum U_(2) <> (rho(U_(1)) a), exact on symmetric-basis words
    for index in tinst.go_indices(3):
        for j in tinst.basis_ids(2):
            words = tinst.go_to_words(index)
            lhs = tinst.words_to_go(words.map_keys(lambda w: w + (j,)))
            rhs_words = Series.zero()
            for word, coeff in words.items():
                for w1, w2 in word_coproduct(word):
                    acted = tinst.rho_word_apply(w1, Series.unit(j), BIG)
                    for k, ck in acted.items():
                        rhs_words = rhs_words + Series.unit(w2).bind(
                            lambda u, k=k: tinst._diamond_word(u, k)
                        ) * (coeff * ck)
            assert lhs == tinst.words_to_go(rhs_words)


# -- canonical action -----------------------------------------------------------------


def test_rho_unit_is_identity(tinst):
    assert tinst.rho_go(GO_UNIT) == Endo.identity(tinst.basis_keys())


def test_rho_single_is_the_product(tinst):
    e0 = MultiIndex.unit(L, 0)
    endo = tinst.rho_go(unit_index(tinst, e0), 5)
    for key in tinst.basis_keys(4):
        assert endo.apply_key(key) == t_prelie(e0, key)


def test_rho_is_algebra_morphism(tinst):
    small = [i for i in tinst.go_indices(2)]
    for i1, i2 in itertools.product(small, repeat=2):
        total = None
        for index, coeff in tinst.go_product(i1, i2).items():
            term = tinst.rho_go(index).scale(coeff)
            total = term if total is None else total.add(term)
        assert total == tinst.rho_go(i1).compose(tinst.rho_go(i2))


def test_rho_entries_respect_grading(tinst):
    for index in tinst.go_indices(3):
        shift = tinst.go_degree(index)
        endo = tinst.rho_go(index)
        for col, series in endo.columns.items():
            for row, _ in series.items():
                assert row.length == shift + col.length


# -- tables, coproduct, antipode --------------------------------------------------------


def test_coproduct_unit_row(tinst):
    assert tinst.coproduct_table(GO_UNIT, 3) == [(GO_UNIT, GO_UNIT, Fraction(1))]


def test_coproduct_single_rows_shape(tinst):
    # rows at a single letter: the (e_k, 0) term plus terms with single right leg
    for k in tinst.basis_ids(3):
        rows = tinst.coproduct_table(GOIndex.single(k), 3)
        assert (GOIndex.single(k), GO_UNIT, Fraction(1)) in rows
        for left, right, coeff in rows:
            assert right.length <= 1
            if right.length == 1:
                j = right.letters()[0]
                assert tinst.rho_go(left).entry(
                    tinst.key_of(k), tinst.key_of(j)
                ) == coeff


def test_counit_property(tinst):
    for index in tinst.go_indices(4):
        left = [(r, c) for l, r, c in tinst.coproduct_table(index, 4) if not l.pairs()]
        right = [(l, c) for l, r, c in tinst.coproduct_table(index, 4) if not r.pairs()]
        assert left == [(index, Fraction(1))]
        assert right == [(index, Fraction(1))]


def test_coassociativity(tinst):
    degree = 4
    for index in tinst.go_indices(degree):
        lhs: dict = {}
        rhs: dict = {}
        for i1, i2, c in tinst.coproduct_table(index, degree):
            for a, b, c2 in tinst.coproduct_table(i1, degree):
                lhs[(a, b, i2)] = lhs.get((a, b, i2), 0) + c * c2
            for a, b, c2 in tinst.coproduct_table(i2, degree):
                rhs[(i1, a, b)] = rhs.get((i1, a, b), 0) + c * c2
        assert {k: v for k, v in lhs.items() if v} == {k: v for k, v in rhs.items() if v}


def test_antipode_axiom_both_sides(tinst):
    degree = 4
    for index in tinst.go_indices(degree):
        left = Series.zero()
        right = Series.zero()
        for i1, i2, c in tinst.coproduct_table(index, degree):
            left = left + tinst.antipode(i1, degree).map_keys(lambda J, i2=i2: J.add(i2)) * c
            right = right + tinst.antipode(i2, degree).map_keys(lambda J, i1=i1: i1.add(J)) * c
        expect = Series.unit(GO_UNIT) if not index.pairs() else Series.zero()
        assert left == expect
        assert right == expect


def test_table_export_is_exact_integers(tinst):
    rows = table_to_json(tinst, 2, lambda beta: beta.to_json())
    assert rows
    for row in rows:
        assert isinstance(row["num"], int) and isinstance(row["den"], int)
        assert row["den"] > 0


# -- characters --------------------------------------------------------------------------


def test_character_power_is_multiplicative(tinst):
    rng = random.Random(1)
    f = rational_series(tinst, 3, rng)
    char = Character.exp(tinst, f, 4)
    for i1 in tinst.go_indices(2):
        for i2 in tinst.go_indices(2):
            assert char.power(i1.add(i2)) == char.power(i1) * char.power(i2)
    assert char.power(GO_UNIT) == 1


def test_bch_trivial_arguments(tinst):
    rng = random.Random(2)
    f = rational_series(tinst, 4, rng)
    assert bch_compose(tinst, f, Series.zero(), 4) == f
    assert bch_compose(tinst, Series.zero(), f, 4) == f


def test_bch_trivial_prelie_is_additive():
    trivial = PreLieInstance(
        "commuting", ["a", "b", "c"], lambda x, y: Series.zero(), lambda k: 1
    )
    f = Series({"a": Fraction(2), "b": Fraction(1, 3)})
    g = Series({"b": 1, "c": -2})
    assert bch_compose(trivial, f, g, 4) == f + g


@settings(deadline=None, max_examples=10)
@given(st.integers(0, 2**30))
def test_bch_matches_convolution(seed):
    inst = t_instance([L], 4)
    rng = random.Random(seed)
    f = rational_series(inst, 4, rng)
    g = rational_series(inst, 4, rng)
    lhs = convolve(Character.exp(inst, f, 4), Character.exp(inst, g, 4))
    rhs = Character.exp(inst, bch_compose(inst, f, g, 4), 4)
    assert lhs == rhs


def test_convolution_truncation_mismatch(tinst):
    f = Character.counit(tinst, 3)
    g = Character.counit(tinst, 4)
    with pytest.raises(ValueError, match="truncation"):
        convolve(f, g)


def test_character_inverse_group_axioms(tinst):
    rng = random.Random(7)
    f = rational_series(tinst, 4, rng)
    char = Character.exp(tinst, f, 4)
    inverse = character_inverse(char)
    counit = Character.counit(tinst, 4)
    assert convolve(char, inverse) == counit
    assert convolve(inverse, char) == counit
    assert character_inverse(inverse) == char
    assert character_inverse(counit) == counit


def test_character_inverse_agrees_with_antipode(tinst):
    rng = random.Random(8)
    char = Character.exp(tinst, rational_series(tinst, 4, rng), 4)
    inverse = character_inverse(char)
    for k in tinst.basis_ids(4):
        via_antipode = sum(
            (coeff * char.power(index) for index, coeff in tinst.antipode(GOIndex.single(k), 4).items()),
            start=Fraction(0),
        )
        assert via_antipode == inverse.coefficients.get(tinst.key_of(k), Fraction(0))


def test_bch_solves_inverse(tinst):
    # the inverse exponent solves f + rho(exp f) g = 0
    rng = random.Random(9)
    f = rational_series(tinst, 4, rng)
    char = Character.exp(tinst, f, 4)
    g = character_inverse(char).primitive_series()
    assert bch_compose(tinst, f, g, 4).is_zero


# -- coaction -----------------------------------------------------------------------------


def oracle(a, b):
    return t_prelie(a, b)


def test_coaction_counit_is_identity(tinst):
    counit = Character.counit(tinst, 4)
    endo = coaction(
        tinst, oracle, counit, tinst.basis_keys(4),
        module_grade=lambda b: b.length, max_module_grade=4,
    )
    assert endo == Endo.identity(tinst.basis_keys(4))


def test_coaction_matches_rho_summation(tinst):
    rng = random.Random(11)
    f = rational_series(tinst, 3, rng)
    char = Character.exp(tinst, f, 5)
    endo = coaction(
        tinst, oracle, char, tinst.basis_keys(5),
        module_grade=lambda b: b.length, max_module_grade=5,
    )
    direct = None
    for index in tinst.go_indices(4):
        weight = char.power(index)
        if weight:
            term = tinst.rho_go(index, 5).scale(weight)
            direct = term if direct is None else direct.add(term)
    assert endo == direct


def test_coaction_is_multiplicative(tinst_level=4):
    inst = t_instance([L], tinst_level)
    rng = random.Random(12)
    keys = inst.basis_keys(tinst_level)
    kwargs = dict(module_grade=lambda b: b.length, max_module_grade=tinst_level)
    f = rational_series(inst, 2, rng)
    g = rational_series(inst, 2, rng)
    F = Character.exp(inst, f, tinst_level)
    G = Character.exp(inst, g, tinst_level)
    lhs = coaction(inst, oracle, convolve(F, G), keys, **kwargs)
    rhs = coaction(inst, oracle, F, keys, **kwargs).compose(
        coaction(inst, oracle, G, keys, **kwargs)
    )
    assert lhs == rhs


def test_module_go_apply_unit(tinst):
    beta = MultiIndex.unit(L, 0)
    assert module_go_apply(tinst, oracle, GO_UNIT, beta) == Series.unit(beta)
