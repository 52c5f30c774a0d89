"""Decorated rooted trees: grafting, insertion, branched signatures, and the
fertility dictionary onto multi-indices.

Trees are stored in canonical form (children sorted by a structural key), so
equality is isomorphism of decorated rooted trees.  The dictionary map sends
a tree to its fertility signature times the matching symmetry factor, and is
a morphism for both the grafting and the insertion products; those identities
are the main cross-checks between this module and the multi-index side.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .multiindex import (
    EMPTY,
    MultiIndex,
    Nonlinearity,
    enumerate_populated,
    z_functional,
)
from .prelie import PreLieInstance
from .quadrature import cumulative_stieltjes
from .roughpath import Driver, SignatureGrid, build_signature
from .series import Series

Label = Any


class Tree:
    """Rooted tree with decorated nodes; children form a canonical multiset."""

    __slots__ = ("label", "children", "_key", "_hash", "_nodes")

    def __init__(self, label: Label, children: Iterable["Tree"] = ()):
        kids = tuple(sorted(children, key=lambda c: c._key))
        self.label = label
        self.children = kids
        self._nodes = 1 + sum(c._nodes for c in kids)
        self._key = (self._nodes, label, tuple(c._key for c in kids))
        self._hash = hash(self._key)

    @property
    def node_count(self) -> int:
        return self._nodes

    @property
    def sigma(self) -> int:
        """Order of the automorphism group: repeats factorial times child factors."""
        out = 1
        for child, repeats in _grouped(self.children):
            out *= math.factorial(repeats) * child.sigma**repeats
        return out

    def fertility(self) -> MultiIndex:
        """Node-type counts: one (label, outgoing edges) entry per node."""
        beta = MultiIndex.unit(self.label, len(self.children))
        for child in self.children:
            beta = beta + child.fertility()
        return beta

    def serialize(self) -> str:
        if not self.children:
            return str(self.label)
        return f"{self.label}[{','.join(c.serialize() for c in self.children)}]"

    @classmethod
    def parse(cls, text: str) -> "Tree":
        tree, rest = _parse_tree(text.strip())
        if rest:
            raise ValueError(f"trailing input {rest!r} after tree")
        return tree

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Tree) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Tree") -> bool:
        return self._key < other._key

    def __repr__(self) -> str:
        return self.serialize()


def leaf(label: Label) -> Tree:
    return Tree(label)


def _grouped(children: Sequence[Tree]) -> list[tuple[Tree, int]]:
    out: list[tuple[Tree, int]] = []
    for child in children:  # children are sorted, equal subtrees adjacent
        if out and out[-1][0] == child:
            out[-1] = (child, out[-1][1] + 1)
        else:
            out.append((child, 1))
    return out


def _parse_tree(text: str) -> tuple[Tree, str]:
    stop = len(text)
    for i, ch in enumerate(text):
        if ch in "[,]":
            stop = i
            break
    label, rest = text[:stop], text[stop:]
    if not label:
        raise ValueError("empty label in tree literal")
    if not rest.startswith("["):
        return Tree(label), rest
    children = []
    rest = rest[1:]
    while True:
        child, rest = _parse_tree(rest)
        children.append(child)
        if rest.startswith(","):
            rest = rest[1:]
            continue
        if rest.startswith("]"):
            return Tree(label, children), rest[1:]
        raise ValueError("unterminated child list in tree literal")


# -- enumeration ---------------------------------------------------------------


def enumerate_trees(labels: Sequence[Label], max_nodes: int) -> list[Tree]:
    """All decorated rooted trees with at most ``max_nodes`` nodes, canonically ordered."""
    if max_nodes < 1:
        raise ValueError("max_nodes must be >= 1")
    labels = sorted(labels)
    grown: list[Tree] = []
    by_count: dict[int, list[Tree]] = {}
    for n in range(1, max_nodes + 1):
        trees_n = []
        for label in labels:
            for kids in _tree_multisets(grown, n - 1):
                trees_n.append(Tree(label, kids))
        by_count[n] = sorted(trees_n)
        grown.extend(by_count[n])
    return sorted(grown)


def _tree_multisets(pool: Sequence[Tree], total: int):
    """Multisets from ``pool`` with node counts summing to ``total`` (each once)."""
    results: list[tuple[Tree, ...]] = []

    def rec(start: int, budget: int, acc: list):
        if budget == 0:
            results.append(tuple(acc))
            return
        for i in range(start, len(pool)):
            if pool[i].node_count > budget:
                continue
            rec(i, budget - pool[i].node_count, acc + [pool[i]])

    rec(0, total, [])
    return results


# -- node surgery ---------------------------------------------------------------

Path = tuple[int, ...]


def tree_paths(tree: Tree) -> list[Path]:
    out: list[Path] = [()]
    for j, child in enumerate(tree.children):
        out.extend((j,) + p for p in tree_paths(child))
    return out


def subtree_at(tree: Tree, path: Path) -> Tree:
    for j in path:
        tree = tree.children[j]
    return tree


def replace_at(tree: Tree, path: Path, new: Tree) -> Tree:
    if not path:
        return new
    j = path[0]
    kids = list(tree.children)
    kids[j] = replace_at(kids[j], path[1:], new)
    return Tree(tree.label, kids)


def _attach(tree: Tree, alloc: Mapping[Path, Sequence[Tree]], prefix: Path = ()) -> Tree:
    extra = tuple(alloc.get(prefix, ()))
    kids = tuple(
        _attach(c, alloc, prefix + (j,)) for j, c in enumerate(tree.children)
    ) + extra
    return Tree(tree.label, kids)


# -- grafting --------------------------------------------------------------------


def graft(scion: Tree, target: Tree) -> Series:
    """Sum over nodes of ``target`` of attaching ``scion`` below that node."""
    out = Series.unit(Tree(target.label, target.children + (scion,)))
    for j, child in enumerate(target.children):
        sub = graft(scion, child)
        kids = target.children
        out = out + sub.map_keys(
            lambda s, j=j: Tree(target.label, kids[:j] + (s,) + kids[j + 1 :])
        )
    return out


def simultaneous_graft(scions: Sequence[Tree], target: Tree) -> Series:
    """Attach every scion directly at a node of ``target``, summed over assignments.

    This is the action of the (unnormalized) symmetrized product of the scions
    under grafting; repeated scions contribute once per ordered assignment.
    """
    paths = tree_paths(target)
    counts: dict[Tree, int] = {}
    for assign in itertools.product(paths, repeat=len(scions)):
        alloc: dict[Path, list[Tree]] = {}
        for scion, path in zip(scions, assign):
            alloc.setdefault(path, []).append(scion)
        built = _attach(target, alloc)
        counts[built] = counts.get(built, 0) + 1
    return Series(counts)


def simultaneous_graft_series(scions: Sequence[Series], target: Series) -> Series:
    """Multilinear extension of simultaneous grafting to tree series."""
    out = Series.zero()
    for combo in itertools.product(*(list(s.items()) for s in scions)):
        coeff = Fraction(1)
        picked = []
        for tree, c in combo:
            coeff *= c
            picked.append(tree)
        for tgt, c in target.items():
            out = out + simultaneous_graft(picked, tgt) * (coeff * c)
    return out


# -- insertion --------------------------------------------------------------------

_INSERTION_CACHE: dict[tuple[Label, Tree, Tree], Series] = {}


def insertion(label: Label, scion: Tree, target: Tree) -> Series:
    """Insert ``scion`` at the ``label`` nodes of ``target``.

    Recursive form: replacing the root (when its decoration matches) grafts
    the root's children simultaneously onto the scion; otherwise the insertion
    distributes over the child subtrees.
    """
    key = (label, scion, target)
    cached = _INSERTION_CACHE.get(key)
    if cached is not None:
        return cached
    out = Series.zero()
    if target.label == label:
        out = out + simultaneous_graft(target.children, scion)
    kids = target.children
    for j, child in enumerate(kids):
        sub = insertion(label, scion, child)
        out = out + sub.map_keys(
            lambda s, j=j: Tree(target.label, kids[:j] + (s,) + kids[j + 1 :])
        )
    _INSERTION_CACHE[key] = out
    return out


def insertion_bruteforce(label: Label, scion: Tree, target: Tree) -> Series:
    """Replace each matching node of ``target`` by ``scion``, redistributing the
    node's children over the scion's nodes in all possible ways."""
    out = Series.zero()
    scion_paths = tree_paths(scion)
    for path in tree_paths(target):
        node = subtree_at(target, path)
        if node.label != label:
            continue
        for assign in itertools.product(scion_paths, repeat=len(node.children)):
            alloc: dict[Path, list[Tree]] = {}
            for child, where in zip(node.children, assign):
                alloc.setdefault(where, []).append(child)
            out = out + Series.unit(replace_at(target, path, _attach(scion, alloc)))
    return out


# -- the dictionary ----------------------------------------------------------------


def psi(tree: Tree) -> tuple[int, MultiIndex]:
    """Dictionary image of a tree: (symmetry coefficient, fertility signature).

    The coefficient is the product of child-count factorials over all nodes,
    which equals the symmetry factor of the fertility class.
    """
    coeff = math.factorial(len(tree.children))
    beta = MultiIndex.unit(tree.label, len(tree.children))
    for child in tree.children:
        c, b = psi(child)
        coeff *= c
        beta = beta + b
    return coeff, beta


def psi_series(trees: Series) -> Series:
    """Linear extension of the dictionary to tree series, over monomial keys."""
    out = Series.zero()
    for tree, c in trees.items():
        coeff, beta = psi(tree)
        out = out + Series.unit(beta, c * coeff)
    return out


def fertility_class(beta: MultiIndex) -> list[Tree]:
    """All trees whose node-type counts match ``beta`` (constructively)."""
    if not beta.is_populated:
        raise ValueError("fertility classes exist for populated indices only")
    return sorted(_class_of(beta))


def _class_of(beta: MultiIndex) -> set[Tree]:
    candidates = [
        b for b in enumerate_populated(sorted({l for (l, _), _ in beta.pairs()}), beta.length)
        if b.length < beta.length and _contained(b, beta)
    ]
    out: set[Tree] = set()
    for (label, k), _m in beta.pairs():
        rest = beta - MultiIndex.unit(label, k)
        if k == 0:
            if rest == EMPTY:
                out.add(Tree(label))
            continue
        for split in _index_multisets(rest, k, candidates):
            groups = [(part, repeats) for part, repeats in split]
            choices = [
                list(itertools.combinations_with_replacement(_class_of(part), repeats))
                for part, repeats in groups
            ]
            for picks in itertools.product(*choices):
                kids = tuple(itertools.chain.from_iterable(picks))
                out.add(Tree(label, kids))
    return out


def _contained(small: MultiIndex, big: MultiIndex) -> bool:
    try:
        big - small
        return True
    except ValueError:
        return False


def _index_multisets(total: MultiIndex, k: int, candidates: Sequence[MultiIndex]):
    """Multisets of k populated indices summing to ``total``, as (part, repeats)."""
    results = []

    def rec(start: int, remaining: MultiIndex, slots: int, acc: list):
        if slots == 0:
            if remaining == EMPTY:
                results.append(tuple(acc))
            return
        for i in range(start, len(candidates)):
            cand = candidates[i]
            if cand.length > remaining.length - (slots - 1):
                continue
            if not _contained(cand, remaining):
                continue
            rec(i, remaining - cand, slots - 1, acc + [cand])

    rec(0, total, k, [])
    grouped = []
    for parts in results:
        counts: dict[MultiIndex, int] = {}
        for p in parts:
            counts[p] = counts.get(p, 0) + 1
        grouped.append(tuple(sorted(counts.items())))
    return grouped


# -- translations on trees ----------------------------------------------------------


def tree_translate(shifts: Mapping[Label, Series], tree: Tree) -> Series:
    """Unique grafting-morphism extension of ``leaf -> leaf + shift`` applied to a tree.

    Root first: the translated children are grafted simultaneously onto the
    translated root symbol.
    """
    base = Series.unit(leaf(tree.label)) + shifts.get(tree.label, Series.zero())
    if not tree.children:
        return base
    kids = [tree_translate(shifts, c) for c in tree.children]
    return simultaneous_graft_series(kids, base)


def tree_translate_series(shifts: Mapping[Label, Series], trees: Series) -> Series:
    return trees.bind(lambda t: tree_translate(shifts, t))


# -- pre-Lie instances ----------------------------------------------------------------


def grafting_instance(labels: Sequence[Label], max_nodes: int) -> PreLieInstance:
    """Grafting as a pre-Lie oracle, graded by node count."""
    return PreLieInstance(
        name=f"graft({','.join(map(str, labels))};{max_nodes})",
        basis=enumerate_trees(labels, max_nodes),
        product=graft,
        grade=lambda t: t.node_count,
        kappa_min=1,
    )


def insertion_instance(label: Label, max_nodes: int, at_least_two: bool = False) -> PreLieInstance:
    """One insertion product as a pre-Lie oracle on single-label trees.

    With ``at_least_two`` the basis is restricted to trees with an edge, where
    node count minus one is a 1-connected grading.
    """
    basis = [t for t in enumerate_trees([label], max_nodes) if not at_least_two or t.node_count >= 2]
    return PreLieInstance(
        name=f"insert({label};{max_nodes};{'>=2' if at_least_two else 'all'})",
        basis=basis,
        product=lambda a, b: insertion(label, a, b),
        grade=lambda t: t.node_count - 1,
        kappa_min=1 if at_least_two else 0,
    )


# -- numerics: branched signatures and expansions ---------------------------------------


def branched_signature(
    driver: Driver,
    max_nodes: int,
    quadrature: str = "trapezoid",
    base_indices: Sequence[int] | None = None,
) -> dict[int, dict[Tree, np.ndarray]]:
    """Symmetry-normalized branched integrals for all trees up to ``max_nodes``.

    Returns per stored base point the arrays over grid nodes; the value for a
    tree integrates the product of its children's values against the root
    channel and divides by the tree's symmetry factor.
    """
    bases = tuple(sorted(set(base_indices if base_indices is not None else (0,))))
    trees = enumerate_trees(driver.labels, max_nodes)
    out: dict[int, dict[Tree, np.ndarray]] = {}
    for s in bases:
        raw: dict[Tree, np.ndarray] = {}
        for tree in trees:  # canonical order puts children before parents
            x = driver.samples[tree.label]
            if not tree.children:
                raw[tree] = x - x[s]
                continue
            integrand = np.ones(driver.grid_size + 1)
            for child in tree.children:
                integrand = integrand * raw[child]
            cum = cumulative_stieltjes(integrand, x, quadrature)
            raw[tree] = cum - cum[s]
        out[s] = {tree: raw[tree] / tree.sigma for tree in trees}
    return out


def dictionary_check(
    driver: Driver,
    levels: int,
    quadrature: str = "trapezoid",
    base_indices: Sequence[int] | None = None,
    pairs: Sequence[tuple[int, int]] | None = None,
) -> float:
    """Max relative gap between multi-index values and symmetry-weighted tree sums."""
    bases = tuple(sorted(set(base_indices if base_indices is not None else (0,))))
    sig = build_signature(driver, levels, quadrature, bases)
    branched = branched_signature(driver, levels, quadrature, bases)
    classes = {beta: fertility_class(beta) for beta in sig.basis}
    if pairs is None:
        step = max(1, driver.grid_size // 8)
        pairs = [(s, t) for s in bases for t in range(0, driver.grid_size + 1, step) if t != s]
    pairs = [(s, t) for s, t in pairs if s in bases]
    # relative to the per-component scale over the sampled pairs, so components
    # passing through zero do not inflate the ratio
    scales = {
        beta: max((abs(sig.values[s][beta][t]) for s, t in pairs), default=0.0)
        for beta in sig.basis
    }
    worst = 0.0
    for s, t in pairs:
        for beta in sig.basis:
            lhs = sig.values[s][beta][t]
            rhs = beta.sigma * sum(branched[s][tau][t] for tau in classes[beta])
            worst = max(worst, abs(lhs - rhs) / max(scales[beta], 1e-12))
    return worst


def elementary_differential(tree: Tree, a: Nonlinearity, y: float) -> float:
    """Value of the tree's vector-field derivative functional at y."""
    k = len(tree.children)
    out = a.taylor(tree.label, k, y) * math.factorial(k)
    for child in tree.children:
        out *= elementary_differential(child, a, y)
    return out


def _solve_rde(driver: Driver, a: Nonlinearity, y0: float):
    """High-order ODE oracle for dY = sum_l a_l(Y) dX^l with smooth drivers."""
    from scipy.integrate import solve_ivp

    if not driver.rates:
        raise ValueError("the ODE oracle needs driver time derivatives")

    def rhs(t, y):
        return sum(a.value(l, y[0]) * driver.rates[l](t) for l in driver.labels)

    sol = solve_ivp(
        rhs,
        (0.0, 1.0),
        [y0],
        method="DOP853",
        rtol=1e-12,
        atol=1e-12,
        dense_output=True,
    )
    if not sol.success:
        raise RuntimeError(f"ODE oracle failed: {sol.message}")
    return lambda t: float(sol.sol(t)[0])


def expansion_check(
    driver: Driver,
    a: Nonlinearity,
    y0: float,
    levels: int,
    widths: Sequence[float] = (1 / 4, 1 / 8, 1 / 16, 1 / 32, 1 / 64),
    quadrature: str = "trapezoid",
) -> dict:
    """Truncation-remainder study of the local expansions against an ODE oracle.

    For each interval [0, h] the solution increment is compared with both the
    tree-indexed sum and the multi-index sum truncated at ``levels``; the
    report carries the remainders and their empirical orders under halving.
    """
    grid = driver.grid_size
    solution = _solve_rde(driver, a, y0)
    sig = build_signature(driver, levels, quadrature, [0])
    branched = branched_signature(driver, levels, quadrature, [0])
    trees = enumerate_trees(driver.labels, levels)
    tree_values = {tau: elementary_differential(tau, a, y0) for tau in trees}
    index_values = {beta: z_functional(beta, a, y0) for beta in sig.basis}
    rows = []
    for h in widths:
        node = round(h * grid)
        if abs(node - h * grid) > 1e-9 or node < 1:
            raise ValueError(f"width {h} is not resolved by the grid")
        increment = solution(driver.times[node]) - y0
        tree_sum = sum(branched[0][tau][node] * tree_values[tau] for tau in trees)
        index_sum = sum(
            sig.values[0][beta][node] * index_values[beta] for beta in sig.basis
        )
        rows.append(
            {
                "width": h,
                "increment": increment,
                "tree_remainder": abs(increment - tree_sum),
                "index_remainder": abs(increment - index_sum),
            }
        )
    report = {"rows": rows, "levels": levels}
    for kind in ("tree_remainder", "index_remainder"):
        orders = []
        for prev, cur in zip(rows, rows[1:]):
            ratio_h = prev["width"] / cur["width"]
            if cur[kind] > 0 and prev[kind] > 0:
                orders.append(math.log(prev[kind] / cur[kind]) / math.log(ratio_h))
        report[kind.replace("remainder", "orders")] = orders
    return report
