import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from mirp.multiindex import (
    Flavor,
    MultiIndex,
    Nonlinearity,
    PolynomialFn,
    RSymbol,
    enumerate_populated,
    insert_prelie,
    t_instance,
    t_prelie,
    z_functional,
)
from mirp.prelie import prelie_identity_defect
from mirp.roughpath import named_driver
from mirp.series import Series
from mirp.trees import (
    Tree,
    branched_signature,
    dictionary_check,
    elementary_differential,
    enumerate_trees,
    expansion_check,
    fertility_class,
    graft,
    grafting_instance,
    insertion,
    insertion_bruteforce,
    insertion_instance,
    leaf,
    psi,
    psi_series,
    simultaneous_graft,
    tree_translate,
)

L = "l"
LEAF = leaf(L)
CHAIN2 = Tree(L, [LEAF])
CHAIN3 = Tree(L, [CHAIN2])
CHERRY = Tree(L, [LEAF, LEAF])


# -- the carrier type ------------------------------------------------------------


def test_canonical_form_ignores_child_order():
    assert Tree(L, [CHAIN2, LEAF]) == Tree(L, [LEAF, CHAIN2])
    assert hash(Tree(L, [CHAIN2, LEAF])) == hash(Tree(L, [LEAF, CHAIN2]))
    assert Tree(L, [CHAIN2]) != Tree(L, [LEAF])


def test_node_count_and_sigma():
    assert CHERRY.node_count == 3 and CHERRY.sigma == 2
    assert CHAIN3.sigma == 1
    assert Tree(L, [LEAF, LEAF, LEAF]).sigma == 6
    assert Tree(L, [CHERRY, CHERRY]).sigma == 2 * 2 * 2
    assert Tree(L, [CHERRY, CHAIN3]).sigma == 2


def test_serialize_round_trip():
    for tree in enumerate_trees(["a", "b"], 4):
        assert Tree.parse(tree.serialize()) == tree
    assert LEAF.serialize() == "l"
    assert CHERRY.serialize() == "l[l,l]"


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        Tree.parse("l[l")
    with pytest.raises(ValueError):
        Tree.parse("l[l,]")


def test_fertility_signature():
    assert LEAF.fertility() == MultiIndex.unit(L, 0)
    e0 = MultiIndex.unit(L, 0)
    assert CHERRY.fertility() == MultiIndex.unit(L, 2) + e0 + e0
    assert CHAIN3.fertility() == MultiIndex.unit(L, 1) + MultiIndex.unit(L, 1) + e0


# -- enumeration -------------------------------------------------------------------


def _rooted_tree_counts(n_max):
    # independent oracle: the standard divisor-sum recurrence for unlabeled
    # rooted trees, a(n+1) = (1/n) * sum_{k=1..n} (sum_{d|k} d*a(d)) a(n-k+1)
    a = [0, 1]
    for n in range(1, n_max):
        total = 0
        for k in range(1, n + 1):
            divsum = sum(d * a[d] for d in range(1, k + 1) if k % d == 0)
            total += divsum * a[n - k + 1]
        a.append(total // n)
    return a[1:]


def test_tree_counts_match_recurrence():
    trees = enumerate_trees([L], 8)
    counts = [len([t for t in trees if t.node_count == n]) for n in range(1, 9)]
    assert counts == _rooted_tree_counts(8)
    assert counts == [1, 1, 2, 4, 9, 20, 48, 115]


def test_tree_counts_two_labels():
    trees = enumerate_trees(["a", "b"], 2)
    assert len([t for t in trees if t.node_count == 1]) == 2
    assert len([t for t in trees if t.node_count == 2]) == 4


def test_enumeration_bad_bound():
    with pytest.raises(ValueError):
        enumerate_trees([L], 0)


# -- grafting -----------------------------------------------------------------------


def test_graft_examples():
    assert graft(LEAF, LEAF) == Series.unit(CHAIN2)
    assert graft(LEAF, CHAIN2) == Series({CHERRY: 1, CHAIN3: 1})


def test_graft_mass_is_node_count():
    for target in enumerate_trees([L], 5):
        total = sum(c for _, c in graft(LEAF, target).items())
        assert total == target.node_count


def test_simultaneous_graft_empty_is_identity():
    assert simultaneous_graft([], CHERRY) == Series.unit(CHERRY)


def test_simultaneous_graft_counts_assignments():
    # two leaves onto a leaf: one assignment only
    assert simultaneous_graft([LEAF, LEAF], LEAF) == Series.unit(Tree(L, [LEAF, LEAF]))
    # one leaf onto a chain: either node
    assert simultaneous_graft([LEAF], CHAIN2) == Series({CHERRY: 1, CHAIN3: 1})
    # two leaves onto a chain: 2x2 assignments, the mixed one counted twice
    out = simultaneous_graft([LEAF, LEAF], CHAIN2)
    assert sum(c for _, c in out.items()) == 4
    assert out[Tree(L, [LEAF, Tree(L, [LEAF])])] == 2


def test_grafting_is_prelie():
    inst = grafting_instance([L], 4)
    trees = enumerate_trees([L], 4)
    for a, b, c in itertools.islice(itertools.product(trees, repeat=3), 0, None, 7):
        assert prelie_identity_defect(inst, a, b, c).is_zero


# -- insertion ----------------------------------------------------------------------


def test_insertion_base_cases():
    assert insertion(L, CHAIN2, LEAF) == Series.unit(CHAIN2)
    assert insertion("other", CHAIN2, LEAF).is_zero


def test_insertion_two_chains():
    assert insertion(L, CHAIN2, CHAIN2) == Series({CHAIN3: 2, CHERRY: 1})


def test_insertion_matches_bruteforce():
    trees = enumerate_trees([L], 4)
    for a, b in itertools.product(trees, repeat=2):
        if a.node_count + b.node_count > 6:
            continue
        assert insertion(L, a, b) == insertion_bruteforce(L, a, b)


def test_insertion_matches_bruteforce_two_labels():
    trees = enumerate_trees(["a", "b"], 3)
    for a, b in itertools.product(trees, repeat=2):
        if a.node_count + b.node_count > 5:
            continue
        for lab in ("a", "b"):
            assert insertion(lab, a, b) == insertion_bruteforce(lab, a, b)


def test_insertion_is_prelie():
    inst = insertion_instance(L, 4)
    trees = enumerate_trees([L], 4)
    for a, b, c in itertools.islice(itertools.product(trees, repeat=3), 0, None, 7):
        assert prelie_identity_defect(inst, a, b, c).is_zero


# -- the dictionary -------------------------------------------------------------------


def test_psi_examples():
    e0 = MultiIndex.unit(L, 0)
    assert psi(LEAF) == (1, e0)
    assert psi(CHERRY) == (2, MultiIndex.unit(L, 2) + e0 + e0)
    assert psi(CHAIN3) == (1, MultiIndex.unit(L, 1) + MultiIndex.unit(L, 1) + e0)


def test_psi_coefficient_is_class_symmetry():
    for tree in enumerate_trees([L], 6):
        coeff, beta = psi(tree)
        assert coeff == beta.sigma
        assert beta == tree.fertility()
        assert beta.length == tree.node_count


def test_psi_is_grafting_morphism():
    trees = enumerate_trees(["a", "b"], 3)
    for a, b in itertools.product(trees, repeat=2):
        if a.node_count + b.node_count > 5:
            continue
        ca,ba = psi(a)
        cb, bb = psi(b)
        assert psi_series(graft(a, b)) == t_prelie(ba, bb) * (ca * cb)


def test_psi_is_insertion_morphism():
    trees = enumerate_trees([L], 4)
    for a, b in itertools.product(trees, repeat=2):
        if a.node_count + b.node_count > 6:
            continue
        ca, ba = psi(a)
        cb, bb = psi(b)
        assert psi_series(insertion(L, a, b)) == insert_prelie(L, ba, bb) * (ca * cb)


def test_simultaneous_graft_matches_envelope_actions():
    # psi(simultaneous grafting) equals the envelope action of the images
    tinst = t_instance([L], 10)
    big = 10**9
    trees = enumerate_trees([L], 3)
    for k in (2, 3):
        for combo in itertools.combinations_with_replacement(trees, k):
            if sum(t.node_count for t in combo) > 4:
                continue
            for target in trees:
                lhs = psi_series(simultaneous_graft(list(combo), target))
                coeff = 1
                images = []
                for t in combo:
                    c, b = psi(t)
                    coeff *= c
                    images.append(b)
                ct, bt = psi(target)
                index = tinst.go_index(
                    {b: images.count(b) for b in set(images)}
                )
                acted = tinst.rho_go_apply(
                    index, Series.unit(tinst.id_of(bt)), big
                ) * (index.factorial * coeff * ct)
                assert lhs == acted.map_keys(tinst.key_of)


# -- fertility classes -------------------------------------------------------------


def test_fertility_class_examples():
    e0 = MultiIndex.unit(L, 0)
    assert fertility_class(e0) == [LEAF]
    assert fertility_class(MultiIndex.unit(L, 2) + e0 + e0) == [CHERRY]
    assert fertility_class(MultiIndex.unit(L, 1) + MultiIndex.unit(L, 1) + e0) == [CHAIN3]


def test_fertility_class_requires_populated():
    with pytest.raises(ValueError):
        fertility_class(MultiIndex.unit(L, 1))


@pytest.mark.parametrize("labels", [(L,), ("a", "b")])
def test_fertility_class_matches_enumeration_filter(labels):
    bound = 6 if len(labels) == 1 else 4
    trees = enumerate_trees(list(labels), bound)
    for beta in enumerate_populated(list(labels), bound):
        direct = set(fertility_class(beta))
        oracle = {
            t for t in trees if t.node_count == beta.length and t.fertility() == beta
        }
        assert direct == oracle
        for tau in direct:
            assert psi(tau) == (beta.sigma, beta)


def test_fertility_classes_partition_trees():
    trees = enumerate_trees([L], 6)
    total = sum(
        len(fertility_class(beta)) for beta in enumerate_populated([L], 6)
    )
    assert total == len(trees)


# -- translations -------------------------------------------------------------------


def test_tree_translate_identity():
    for tree in enumerate_trees([L], 4):
        assert tree_translate({}, tree) == Series.unit(tree)


def test_tree_translate_leaf_shift():
    shift = Series.unit(CHAIN2)
    assert tree_translate({L: shift}, LEAF) == Series.unit(LEAF) + shift


def test_tree_translate_intertwines_with_multiindex_translation():
    # the dictionary conjugates the tree translation into the monomial one
    shifts = {L: Series({CHAIN2: Fraction(1, 2), CHERRY: Fraction(-1, 3)})}
    coeffs = Series.zero()
    for label, series in shifts.items():
        for tau, c in series.items():
            coeff, beta = psi(tau)
            coeffs = coeffs + Series.unit(RSymbol(beta, label), c * coeff)
    from mirp.multiindex import rho_tilde_exp

    endo = rho_tilde_exp(coeffs, Flavor("r2"), [L], 5)
    for tau in enumerate_trees([L], 5):
        coeff, beta = psi(tau)
        assert psi_series(tree_translate(shifts, tau)) == endo.apply_key(beta) * coeff


def test_insertion_envelope_morphism_on_edge_trees():
    # products of symmetric-basis elements map consistently through the
    # dictionary, on the edge-bearing single-label subalgebra
    iinst = insertion_instance(L, 4, at_least_two=True)
    minst = None
    from mirp.prelie import PreLieInstance

    basis = [b for b in enumerate_populated([L], 4) if b.length >= 2]
    minst = PreLieInstance(
        "tmulti>=2",
        basis,
        product=lambda x, y: insert_prelie(L, x, y),
        grade=lambda b: b.length - 1,
        kappa_min=1,
    )

    def push_index(index):
        # image of a tree multiset: scale and the multiset of fertility images
        scale = Fraction(1, index.factorial)
        counts = {}
        for tree_id, mult in index.pairs():
            coeff, beta = psi(iinst.key_of(tree_id))
            scale *= Fraction(coeff) ** mult
            counts[beta] = counts.get(beta, 0) + mult
        target = minst.go_index(counts)
        return scale * target.factorial, target

    for i1 in iinst.go_indices(3):
        for i2 in iinst.go_indices(3):
            if iinst.go_degree(i1) + iinst.go_degree(i2) > 3:
                continue
            s1, t1 = push_index(i1)
            s2, t2 = push_index(i2)
            lhs = Series.zero()
            for index, coeff in iinst.go_product(i1, i2).items():
                s3, t3 = push_index(index)
                lhs = lhs + Series.unit(t3, coeff * s3)
            rhs = minst.go_product(t1, t2) * (s1 * s2)
            assert lhs == rhs


# -- numerics ----------------------------------------------------------------------


@pytest.fixture(scope="module")
def line_driver():
    return named_driver({L: {"form": "identity"}}, 512)


def test_branched_signature_closed_forms(line_driver):
    values = branched_signature(line_driver, 3, "trapezoid", [0])[0]
    t = 384
    dt = line_driver.times[t]
    assert values[LEAF][t] == pytest.approx(dt, abs=0)
    assert values[CHERRY][t] == pytest.approx(dt**3 / 6, abs=1e-5)
    assert values[CHAIN3][t] == pytest.approx(dt**3 / 6, abs=1e-5)


def test_dictionary_check_line(line_driver):
    assert dictionary_check(line_driver, 3) <= 1e-12


def test_dictionary_check_trig():
    driver = named_driver(
        {"a": {"form": "identity"}, "b": {"form": "sin", "frequency": 1.0}}, 512
    )
    assert dictionary_check(driver, 4) <= 1e-12


def test_elementary_differential_examples():
    a = Nonlinearity({L: PolynomialFn([0.2, 1.0, 0.5])})
    y = 0.3
    assert elementary_differential(LEAF, a, y) == pytest.approx(a.value(L, y))
    # matches the symmetry-weighted monomial functional on every small tree
    for tau in enumerate_trees([L], 5):
        coeff, beta = psi(tau)
        assert elementary_differential(tau, a, y) == pytest.approx(
            beta.sigma * z_functional(beta, a, y), rel=1e-12
        )


def test_expansion_orders_linear_equation():
    driver = named_driver({L: {"form": "identity"}}, 4096)
    a = Nonlinearity({L: PolynomialFn([0.0, 1.0])})
    report = expansion_check(driver, a, 1.0, 3)
    assert all(o >= 3.5 for o in report["tree_orders"])
    assert all(o >= 3.5 for o in report["index_orders"])
    # tree and index expansions agree by the dictionary
    for row in report["rows"]:
        assert row["tree_remainder"] == pytest.approx(row["index_remainder"], rel=1e-6, abs=1e-14)


def test_expansion_needs_rates():
    from mirp.roughpath import Driver
    import numpy as np

    times = np.linspace(0, 1, 9)
    driver = Driver(labels=(L,), times=times, samples={L: times.copy()})
    a = Nonlinearity({L: PolynomialFn([0.0, 1.0])})
    with pytest.raises(ValueError, match="derivative"):
        expansion_check(driver, a, 1.0, 2, widths=(1 / 4,))
