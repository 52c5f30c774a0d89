"""Multi-indices over (label, fertility) pairs and their pre-Lie structures.

A multi-index counts nodes by decoration and number of outgoing edges.  The
populated ones (weight one) carry two families of products: the derivation
product behind signature hierarchies, and the per-label insertion products
behind translation (renormalization) groups.  Both are exposed directly and
as :class:`~mirp.prelie.PreLieInstance` oracles.
"""
from __future__ import annotations

import functools
import math
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from .prelie import Character, Endo, PreLieInstance, coaction
from .series import Series

Label = Hashable


class MultiIndex:
    """Finitely supported map (label, fertility) -> multiplicity."""

    __slots__ = ("_pairs", "_hash")

    def __init__(self, pairs: Iterable[tuple[tuple[Label, int], int]] = ()):
        counts: dict[tuple[Label, int], int] = {}
        for (label, k), m in pairs:
            if k < 0 or int(k) != k:
                raise ValueError("fertility must be a nonnegative integer")
            if m < 0:
                raise ValueError("multiplicities must be nonnegative")
            if m:
                counts[(label, int(k))] = counts.get((label, int(k)), 0) + m
        self._pairs = tuple(sorted(counts.items()))
        self._hash = hash(self._pairs)

    @classmethod
    def _from_counts(cls, counts: dict) -> "MultiIndex":
        # internal fast path: entries already validated, zeros allowed
        out = cls.__new__(cls)
        out._pairs = tuple(sorted((s, m) for s, m in counts.items() if m))
        out._hash = hash(out._pairs)
        return out

    @classmethod
    def unit(cls, label: Label, k: int = 0) -> "MultiIndex":
        key = (label, k)
        cached = _UNITS.get(key)
        if cached is None:
            cached = cls(((key, 1),))
            _UNITS[key] = cached
        return cached

    def pairs(self) -> tuple[tuple[tuple[Label, int], int], ...]:
        return self._pairs

    def get(self, label: Label, k: int) -> int:
        return dict(self._pairs).get((label, k), 0)

    @property
    def length(self) -> int:
        return sum(m for _, m in self._pairs)

    @property
    def weight(self) -> int:
        """Node count minus edge count: sum of (1 - fertility) multiplicities."""
        return sum((1 - k) * m for (_, k), m in self._pairs)

    @property
    def is_populated(self) -> bool:
        return self.weight == 1

    @property
    def sigma(self) -> int:
        """Product of fertility factorials, the node-permutation symmetry factor."""
        out = 1
        for (_, k), m in self._pairs:
            out *= math.factorial(k) ** m
        return out

    @property
    def factorial(self) -> int:
        out = 1
        for _, m in self._pairs:
            out *= math.factorial(m)
        return out

    def label_count(self, label: Label) -> int:
        return sum(m for (l, _), m in self._pairs if l == label)

    def count_outside(self, labels: frozenset) -> int:
        """Number of nodes whose decoration is not in ``labels``."""
        return sum(m for (l, _), m in self._pairs if l not in labels)

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        counts = dict(self._pairs)
        for slot, m in other._pairs:
            counts[slot] = counts.get(slot, 0) + m
        return MultiIndex._from_counts(counts)

    def __sub__(self, other: "MultiIndex") -> "MultiIndex":
        counts = dict(self._pairs)
        for slot, m in other._pairs:
            c = counts.get(slot, 0) - m
            if c < 0:
                raise ValueError(f"cannot remove {slot} from {self}")
            counts[slot] = c
        return MultiIndex._from_counts(counts)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MultiIndex) and self._pairs == other._pairs

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "MultiIndex") -> bool:
        return (self.length, self._pairs) < (other.length, other._pairs)

    def to_json(self) -> list:
        return [[label, k, m] for (label, k), m in self._pairs]

    @classmethod
    def from_json(cls, data: Sequence) -> "MultiIndex":
        return cls((((label, int(k)), int(m)) for label, k, m in data))

    def __repr__(self) -> str:
        if not self._pairs:
            return "1"
        return "".join(
            f"z({label},{k})" + (f"^{m}" if m > 1 else "")
            for (label, k), m in self._pairs
        )


_UNITS: dict[tuple, "MultiIndex"] = {}
EMPTY = MultiIndex()


def enumerate_populated(labels: Sequence[Label], max_length: int) -> list[MultiIndex]:
    """All populated multi-indices of length <= max_length, in canonical order.

    A populated index of length n has total fertility n - 1, so fertilities
    are bounded by max_length - 1 and the search space is finite.
    """
    if max_length < 1:
        raise ValueError("max_length must be >= 1")
    slots = sorted((label, k) for label in labels for k in range(max_length))
    found: list[MultiIndex] = []

    def rec(pos: int, budget: int, weight: int, acc: list):
        if weight == 1 and acc:
            found.append(MultiIndex(acc))
        if pos == len(slots) or budget == 0:
            return
        if weight + budget < 1:  # remaining nodes cannot lift the weight to one
            return
        label, k = slots[pos]
        rec(pos + 1, budget, weight, acc)
        for m in range(1, budget + 1):
            rec(pos + 1, budget - m, weight + (1 - k) * m, acc + [((label, k), m)])

    rec(0, max_length, 0, [])
    return sorted(set(found))


# -- the derivation product --------------------------------------------------


@functools.lru_cache(maxsize=None)
def d_monomial(beta: MultiIndex) -> Series:
    """Image of one monomial under the fertility-raising derivation."""
    out = []
    for (label, k), m in beta.pairs():
        shifted = beta - MultiIndex.unit(label, k) + MultiIndex.unit(label, k + 1)
        out.append((shifted, (k + 1) * m))
    return Series(out)


def d_derivation(s: Series) -> Series:
    return s.bind(d_monomial)


@functools.lru_cache(maxsize=None)
def d_power_monomial(beta: MultiIndex, k: int) -> Series:
    if k == 0:
        return Series.unit(beta)
    return d_power_monomial(beta, k - 1).bind(d_monomial)


def t_prelie(beta: MultiIndex, gamma: MultiIndex) -> Series:
    """z^beta (D z^gamma): the vector-field product on populated indices."""
    if not (beta.is_populated and gamma.is_populated):
        raise ValueError("t_prelie requires populated multi-indices")
    return d_monomial(gamma).map_keys(lambda g: beta + g)


@functools.lru_cache(maxsize=None)
def insert_generator(label: Label, beta: MultiIndex, gamma: MultiIndex) -> Series:
    """The insertion derivation applied to an arbitrary monomial.

    Each fertility-k node of gamma decorated by ``label`` is replaced by the
    k-th derivative jet of z^beta, normalized by k!.
    """
    out = Series.zero()
    for (l, k), m in gamma.pairs():
        if l != label:
            continue
        rest = gamma - MultiIndex.unit(label, k)
        jet = d_power_monomial(beta, k) * Fraction(m, math.factorial(k))
        out = out + jet.map_keys(lambda b: b + rest)
    return out


def insert_prelie(label: Label, beta: MultiIndex, gamma: MultiIndex) -> Series:
    """Insertion of z^beta into the ``label`` nodes of z^gamma (populated inputs)."""
    if not (beta.is_populated and gamma.is_populated):
        raise ValueError("insert_prelie requires populated multi-indices")
    return insert_generator(label, beta, gamma)


# -- insertion symbols and their flavors --------------------------------------


class RSymbol:
    """Generator of a translation direction: a populated index and a target label."""

    __slots__ = ("gamma", "label", "_hash")

    def __init__(self, gamma: MultiIndex, label: Label):
        if not gamma.is_populated:
            raise ValueError("RSymbol requires a populated multi-index")
        self.gamma = gamma
        self.label = label
        self._hash = hash((gamma, label))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, RSymbol)
            and self.gamma == other.gamma
            and self.label == other.label
        )

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "RSymbol") -> bool:
        return (self.gamma, self.label) < (other.gamma, other.label)

    def to_json(self) -> dict:
        return {"gamma": self.gamma.to_json(), "label": self.label}

    @classmethod
    def from_json(cls, data: Mapping) -> "RSymbol":
        return cls(MultiIndex.from_json(data["gamma"]), data["label"])

    def __repr__(self) -> str:
        return f"r({self.gamma!r},{self.label})"


def r_prelie(a: RSymbol, b: RSymbol) -> Series:
    """Pre-Lie product on translation symbols, read off the insertion product."""
    inserted = insert_prelie(a.label, a.gamma, b.gamma)
    return inserted.map_keys(lambda beta: RSymbol(beta, b.label))


class Flavor:
    """A subfamily of translation symbols on which the grading is 1-connected.

    kinds:
      - ``r2``: indices with at least two nodes, graded by length - 1;
      - ``rl``: target label inside ``hat`` and at least one node decorated
        outside ``hat``, graded by the outside node count;
      - ``rl_hat``: additionally every node decorated outside ``hat`` (the
        product vanishes identically, so the group is additive).
    """

    KINDS = ("r2", "rl", "rl_hat")

    def __init__(self, kind: str, hat: Iterable[Label] = ()):
        if kind not in self.KINDS:
            raise ValueError(f"unknown flavor kind {kind!r}")
        self.kind = kind
        self.hat = frozenset(hat)
        if kind != "r2" and not self.hat:
            raise ValueError(f"flavor {kind!r} needs a nonempty label subset")

    def admits(self, r: RSymbol) -> bool:
        if self.kind == "r2":
            return r.gamma.length >= 2
        outside = r.gamma.count_outside(self.hat)
        if r.label not in self.hat or outside == 0:
            return False
        if self.kind == "rl_hat":
            return r.gamma.length == outside
        return True

    def grade(self, r: RSymbol) -> int:
        if self.kind == "r2":
            return r.gamma.length - 1
        return r.gamma.count_outside(self.hat)

    def module_grade(self, beta: MultiIndex) -> int:
        if self.kind == "r2":
            return beta.length
        return beta.count_outside(self.hat)

    def validate_support(self, coefficients: Series) -> None:
        for r, _ in coefficients.items():
            if not self.admits(r):
                raise ValueError(f"{r!r} is not admissible for flavor {self.kind}")

    def __repr__(self) -> str:
        extra = f", hat={sorted(self.hat)}" if self.hat else ""
        return f"Flavor({self.kind}{extra})"


# -- pre-Lie instances ---------------------------------------------------------

_T_INSTANCES: dict[tuple, PreLieInstance] = {}


def t_instance(labels: Sequence[Label], max_length: int) -> PreLieInstance:
    """The derivation pre-Lie algebra on populated indices, graded by length."""
    key = (tuple(labels), max_length)
    inst = _T_INSTANCES.get(key)
    if inst is None:
        inst = PreLieInstance(
            name=f"T({','.join(map(str, labels))};{max_length})",
            basis=enumerate_populated(labels, max_length),
            product=t_prelie,
            grade=lambda beta: beta.length,
            kappa_min=1,
        )
        _T_INSTANCES[key] = inst
    return inst


def insertion_instance(labels: Sequence[Label], label: Label, max_length: int) -> PreLieInstance:
    """One insertion product as a pre-Lie oracle (graded by length - 1; not 1-connected)."""
    return PreLieInstance(
        name=f"insert({label};{max_length})",
        basis=enumerate_populated(labels, max_length),
        product=lambda b, g: insert_prelie(label, b, g),
        grade=lambda beta: beta.length - 1,
        kappa_min=0,
    )


def flavor_symbols(labels: Sequence[Label], flavor: Flavor, max_gamma_length: int) -> list[RSymbol]:
    out = [
        RSymbol(gamma, label)
        for gamma in enumerate_populated(labels, max_gamma_length)
        for label in labels
    ]
    return sorted(r for r in out if flavor.admits(r))


def flavor_instance(
    labels: Sequence[Label],
    flavor: Flavor,
    max_gamma_length: int,
    complete: bool = False,
) -> PreLieInstance:
    """Translation symbols of one flavor as a pre-Lie oracle.

    ``complete=True`` asserts that the listed basis is closed through its
    grade bound, which holds for the r2 flavor (grade determines length) and
    enables the table-based operations.
    """
    return PreLieInstance(
        name=f"R[{flavor.kind};{max_gamma_length}]",
        basis=flavor_symbols(labels, flavor, max_gamma_length),
        product=r_prelie,
        grade=flavor.grade,
        kappa_min=1,
        complete=complete,
    )


def support_instance(flavor: Flavor, coefficients: Series) -> PreLieInstance:
    """Minimal pre-Lie oracle carrying just the support of a coefficient series."""
    flavor.validate_support(coefficients)
    return PreLieInstance(
        name=f"R[{flavor.kind};supp]",
        basis=list(coefficients.keys()),
        product=r_prelie,
        grade=flavor.grade,
        kappa_min=1,
        complete=False,
    )


def rho_tilde_exp(
    coefficients: Series,
    flavor: Flavor,
    labels: Sequence[Label],
    max_length: int,
    inst: PreLieInstance | None = None,
) -> Endo:
    """The translation endomorphism on monomials of length <= ``max_length``.

    Column keys are the populated indices within the bound; image series may
    contain longer monomials (columns are finite, rows are not truncated).
    """
    if inst is None:
        inst = support_instance(flavor, coefficients)
    else:
        flavor.validate_support(coefficients)
    char = Character.exp(
        inst,
        coefficients,
        truncation=max((flavor.grade(r) for r, _ in coefficients.items()), default=1),
    )
    module = enumerate_populated(labels, max_length)
    oracle = lambda r, beta: insert_prelie(r.label, r.gamma, beta)  # noqa: E731
    return coaction(inst, oracle, char, module, max_letters=max_length)


# -- nonlinearities ------------------------------------------------------------


class PolynomialFn:
    """Polynomial in y given by its coefficient list (constant term first)."""

    def __init__(self, coefficients: Sequence[float]):
        self.coefficients = tuple(float(c) for c in coefficients)

    def taylor(self, k: int, y: float) -> float:
        """(1/k!) times the k-th derivative at y."""
        out = 0.0
        for j in range(k, len(self.coefficients)):
            out += self.coefficients[j] * math.comb(j, k) * y ** (j - k)
        return out

    def __call__(self, y: float) -> float:
        return self.taylor(0, y)


class SinusoidFn:
    """amplitude * sin(rate * y + phase); use phase=pi/2 for a cosine."""

    def __init__(self, amplitude: float = 1.0, rate: float = 1.0, phase: float = 0.0):
        self.amplitude = float(amplitude)
        self.rate = float(rate)
        self.phase = float(phase)

    def taylor(self, k: int, y: float) -> float:
        value = self.amplitude * self.rate**k * math.sin(
            self.rate * y + self.phase + k * math.pi / 2.0
        )
        return value / math.factorial(k)

    def __call__(self, y: float) -> float:
        return self.taylor(0, y)


class ExponentialFn:
    """amplitude * exp(rate * y)."""

    def __init__(self, amplitude: float = 1.0, rate: float = 1.0):
        self.amplitude = float(amplitude)
        self.rate = float(rate)

    def taylor(self, k: int, y: float) -> float:
        return self.amplitude * self.rate**k * math.exp(self.rate * y) / math.factorial(k)

    def __call__(self, y: float) -> float:
        return self.taylor(0, y)


class Nonlinearity:
    """One scalar coefficient function per label, with exact derivative jets."""

    def __init__(self, functions: Mapping[Label, Any]):
        self.functions = dict(functions)

    @property
    def labels(self) -> list[Label]:
        return sorted(self.functions)

    def taylor(self, label: Label, k: int, y: float) -> float:
        fn = self.functions.get(label)
        if fn is None:
            raise KeyError(f"no nonlinearity for label {label!r}")
        return fn.taylor(k, y)

    def value(self, label: Label, y: float) -> float:
        return self.taylor(label, 0, y)


def z_functional(beta: MultiIndex, a: Nonlinearity, y: float) -> float:
    """Product over nodes of the normalized derivative jets of the nonlinearity."""
    out = 1.0
    for (label, k), m in beta.pairs():
        out *= a.taylor(label, k, y) ** m
    return out
