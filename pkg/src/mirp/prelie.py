"""Generic engine for graded connected pre-Lie algebras.

Given a pre-Lie algebra through a structure-constant oracle, this module
builds the symmetric basis ``A_I`` of the universal envelope (indexed by
multisets of basis elements), converts between that basis and ordered
concatenation words, transposes the envelope product into a coproduct on the
free commutative algebra over the basis, and realizes the resulting character
group through exponentials, convolution, inverses and comodule coactions.

Everything here is exact: coefficients are ``fractions.Fraction`` and every
operation takes (explicitly or through the instance) a truncation grade below
which results are exact; no infinite sum is ever materialized.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

from .series import Series

Key = Any
ONE = Fraction(1)


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


class GOIndex:
    """Multiset of basis ids, indexing one symmetric-basis element of the envelope."""

    __slots__ = ("_pairs", "_hash")

    def __init__(self, pairs: Iterable[tuple[int, int]] = ()):
        counts: dict[int, int] = {}
        for i, m in pairs:
            if m < 0:
                raise ValueError("multiplicities must be nonnegative")
            if m:
                counts[i] = counts.get(i, 0) + m
        self._pairs = tuple(sorted(counts.items()))
        self._hash = hash(self._pairs)

    @classmethod
    def single(cls, i: int) -> "GOIndex":
        return cls(((i, 1),))

    def pairs(self) -> tuple[tuple[int, int], ...]:
        return self._pairs

    def counts(self) -> dict[int, int]:
        return dict(self._pairs)

    def letters(self) -> tuple[int, ...]:
        out: list[int] = []
        for i, m in self._pairs:
            out.extend([i] * m)
        return tuple(out)

    @property
    def length(self) -> int:
        return sum(m for _, m in self._pairs)

    @property
    def factorial(self) -> int:
        out = 1
        for _, m in self._pairs:
            out *= _factorial(m)
        return out

    def get(self, i: int) -> int:
        for j, m in self._pairs:
            if j == i:
                return m
        return 0

    def add(self, other: "GOIndex") -> "GOIndex":
        return GOIndex(self._pairs + other._pairs)

    def splittings(self):
        """All ordered pairs (I1, I2) with I1 + I2 = self."""
        ids = [i for i, _ in self._pairs]
        ranges = [range(m + 1) for _, m in self._pairs]
        for choice in itertools.product(*ranges):
            left = GOIndex((i, c) for i, c in zip(ids, choice))
            right = GOIndex((i, m - c) for (i, m), c in zip(self._pairs, choice))
            yield left, right

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GOIndex) and self._pairs == other._pairs

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "GOIndex") -> bool:
        return (self.length, self._pairs) < (other.length, other._pairs)

    def __repr__(self) -> str:
        if not self._pairs:
            return "GO[]"
        return "GO[" + ",".join(f"{i}^{m}" if m > 1 else f"{i}" for i, m in self._pairs) + "]"


GO_UNIT = GOIndex()


class Endo:
    """Sparse linear map stored column-wise: ``columns[j]`` is the image series of j."""

    __slots__ = ("columns",)

    def __init__(self, columns: Mapping[Key, Series]):
        self.columns = dict(columns)

    @classmethod
    def identity(cls, keys: Iterable[Key]) -> "Endo":
        return cls({k: Series.unit(k) for k in keys})

    def apply(self, s: Series) -> Series:
        out = Series.zero()
        for key, coeff in s.items():
            out = out + self.columns[key] * coeff
        return out

    def apply_key(self, key: Key) -> Series:
        return self.columns[key]

    def compose(self, other: "Endo") -> "Endo":
        """self after other; requires self to cover every row key other produces."""
        return Endo({j: self.apply(col) for j, col in other.columns.items()})

    def add(self, other: "Endo") -> "Endo":
        keys = set(self.columns) | set(other.columns)
        zero = Series.zero()
        return Endo({
            j: self.columns.get(j, zero) + other.columns.get(j, zero) for j in keys
        })

    def scale(self, c) -> "Endo":
        return Endo({j: col * c for j, col in self.columns.items()})

    def entry(self, row: Key, col: Key) -> Fraction:
        return self.columns[col].get(row)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Endo):
            return NotImplemented
        keys = set(self.columns) | set(other.columns)
        zero = Series.zero()
        return all(self.columns.get(k, zero) == other.columns.get(k, zero) for k in keys)

    def __repr__(self) -> str:
        return f"Endo({len(self.columns)} columns)"


class PreLieInstance:
    """A graded pre-Lie algebra presented by basis enumeration and a product oracle.

    ``basis`` must list every basis key of grade <= ``max_grade`` when
    ``complete=True`` (required by table/enumeration operations); the product
    oracle may produce keys of higher grade, which are interned on demand.
    The fixed total order behind all word representations is
    ``(grade, key)``, so basis keys must be mutually comparable.
    """

    def __init__(
        self,
        name: str,
        basis: Iterable[Key],
        product: Callable[[Key, Key], Series],
        grade: Callable[[Key], int],
        kappa_min: int = 1,
        complete: bool = True,
    ):
        self.name = name
        self._product_fn = product
        self._grade_fn = grade
        self.kappa_min = kappa_min
        self.complete = complete
        self._keys: list[Key] = []
        self._ids: dict[Key, int] = {}
        self._grades: list[int] = []
        ordered = sorted(basis, key=lambda k: (grade(k), k))
        for key in ordered:
            self._intern(key)
        self.enumerated = len(self._keys)
        self.max_grade = max(self._grades[: self.enumerated], default=0)
        if any(g < kappa_min for g in self._grades):
            raise ValueError(f"basis grade below kappa_min={kappa_min}")
        # engine caches; built once, then reused (deterministic, call-order independent)
        self._product_cache: dict[tuple[int, int], Series] = {}
        self._diamond_cache: dict[tuple[tuple[int, ...], int], Series] = {}
        self._straighten_cache: dict[tuple[int, ...], Series] = {}
        self._go_words_cache: dict[GOIndex, Series] = {}
        self._go_product_cache: dict[tuple[GOIndex, GOIndex], Series] = {}
        self._rho_cache: dict[tuple[GOIndex, int], Endo] = {}
        self._mult_table_cache: dict[int, dict[GOIndex, list[tuple[GOIndex, GOIndex, Fraction]]]] = {}
        self._antipode_cache: dict[GOIndex, Series] = {}
        self._index_cache: dict[int, tuple[GOIndex, ...]] = {}

    # -- basis bookkeeping ---------------------------------------------------

    def _intern(self, key: Key) -> int:
        i = self._ids.get(key)
        if i is None:
            grade = self._grade_fn(key)  # may raise; never leave partial state
            i = len(self._keys)
            self._ids[key] = i
            self._keys.append(key)
            self._grades.append(grade)
        return i

    def id_of(self, key: Key) -> int:
        i = self._ids.get(key)
        if i is None:
            raise KeyError(f"unknown basis element {key!r} in {self.name}")
        return i

    def key_of(self, i: int) -> Key:
        return self._keys[i]

    def grade_of(self, i: int) -> int:
        return self._grades[i]

    def basis_ids(self, max_grade: int | None = None) -> list[int]:
        if not self.complete:
            raise ValueError(f"{self.name} was not enumerated completely")
        g = self.max_grade if max_grade is None else max_grade
        if g > self.max_grade:
            raise ValueError("requested grade beyond enumeration bound")
        return [i for i in range(self.enumerated) if self._grades[i] <= g]

    def basis_keys(self, max_grade: int | None = None) -> list[Key]:
        return [self._keys[i] for i in self.basis_ids(max_grade)]

    def _order(self, i: int):
        return (self._grades[i], self._keys[i])

    # -- product -----------------------------------------------------------

    def product_ids(self, i: int, j: int) -> Series:
        """a_i > a_j as a Series over ids."""
        cached = self._product_cache.get((i, j))
        if cached is None:
            raw = self._product_fn(self._keys[i], self._keys[j])
            expect = self._grades[i] + self._grades[j]
            terms = []
            for key, coeff in raw.items():
                k = self._intern(key)
                if self._grades[k] != expect:
                    raise ValueError(
                        f"{self.name}: product not graded at ({self._keys[i]!r}, {self._keys[j]!r})"
                    )
                terms.append((k, coeff))
            cached = Series(terms)
            self._product_cache[(i, j)] = cached
        return cached

    def product(self, a: Key, b: Key) -> Series:
        """a > b as a Series over keys."""
        return self.product_ids(self.id_of(a), self.id_of(b)).map_keys(self.key_of)

    def product_series(self, a: Series, b: Series) -> Series:
        """Bilinear extension of the product to key-series."""
        return a.bind(lambda x: b.bind(lambda y: self.product(x, y)))

    # -- right action on words (the envelope machinery) ---------------------

    def _diamond_word(self, word: tuple[int, ...], a: int) -> Series:
        """word <> a_a per the defining recursion; output over unsorted words."""
        cached = self._diamond_cache.get((word, a))
        if cached is not None:
            return cached
        if not word:
            out = Series.unit((a,))
        else:
            head, rest = word[0], word[1:]
            out = self._diamond_word(rest, a).map_keys(lambda w: (head,) + w)
            for k, coeff in self.product_ids(head, a).items():
                out = out - self._diamond_word(rest, k) * coeff
        self._diamond_cache[(word, a)] = out
        return out

    def diamond(self, words: Series, key: Key) -> Series:
        """Right symmetric action of a basis element on a word series (PBW output)."""
        a = self.id_of(key)
        return self._straighten_series(words.bind(lambda w: self._diamond_word(w, a)))

    def _straighten(self, word: tuple[int, ...]) -> Series:
        """Rewrite a word in the ordered (PBW) word basis using the Lie bracket."""
        cached = self._straighten_cache.get(word)
        if cached is not None:
            return cached
        out = None
        for pos in range(len(word) - 1):
            i, j = word[pos], word[pos + 1]
            if self._order(i) > self._order(j):
                swapped = word[:pos] + (j, i) + word[pos + 2 :]
                out = self._straighten(swapped)
                bracket = self.product_ids(i, j) - self.product_ids(j, i)
                for k, coeff in bracket.items():
                    shorter = word[:pos] + (k,) + word[pos + 2 :]
                    out = out + self._straighten(shorter) * coeff
                break
        if out is None:  # already sorted
            out = Series.unit(word)
        self._straighten_cache[word] = out
        return out

    def _straighten_series(self, s: Series) -> Series:
        return s.bind(self._straighten)

    # -- symmetric basis <-> words ------------------------------------------

    def go_index(self, counts: Mapping[Key, int]) -> GOIndex:
        return GOIndex((self.id_of(k), m) for k, m in counts.items())

    def go_index_counts(self, index: GOIndex) -> dict[Key, int]:
        return {self._keys[i]: m for i, m in index.pairs()}

    def go_degree(self, index: GOIndex) -> int:
        return sum(self._grades[i] * m for i, m in index.pairs())

    def go_to_words(self, index: GOIndex) -> Series:
        """A_I in the PBW word basis: leading sorted word with coefficient 1/I!."""
        cached = self._go_words_cache.get(index)
        if cached is not None:
            return cached
        s = Series.unit(())
        for a in sorted(index.letters(), key=self._order):
            s = s.bind(lambda w, a=a: self._diamond_word(w, a))
        out = self._straighten_series(s) / index.factorial
        self._go_words_cache[index] = out
        return out

    def words_to_go(self, words: Series) -> Series:
        """Exact inverse of :meth:`go_to_words` by back-substitution on word length."""
        work = self._straighten_series(words)
        out = Series.zero()
        while work:
            word = max(work.keys(), key=lambda w: (len(w), tuple(map(self._order, w))))
            index = GOIndex((i, 1) for i in word)
            coeff = work[word] * index.factorial
            out = out + Series.unit(index, coeff)
            work = work - self.go_to_words(index) * coeff
        return out

    def go_product(self, left: GOIndex, right: GOIndex) -> Series:
        """A_I' A_I'' expanded in the symmetric basis (Series over GOIndex)."""
        cached = self._go_product_cache.get((left, right))
        if cached is not None:
            return cached
        lw, rw = self.go_to_words(left), self.go_to_words(right)
        concat = Series(
            ((u + v, cu * cv) for u, cu in lw.items() for v, cv in rw.items())
        )
        out = self.words_to_go(concat)
        self._go_product_cache[(left, right)] = out
        return out

    # -- canonical action on the algebra itself ------------------------------

    def _rho_letter_apply(self, i: int, s: Series, max_grade: int) -> Series:
        gi = self._grades[i]
        out = Series.zero()
        for j, coeff in s.items():
            if gi + self._grades[j] > max_grade:
                continue
            out = out + self.product_ids(i, j) * coeff
        return out

    def rho_word_apply(self, word: tuple[int, ...], s: Series, max_grade: int) -> Series:
        for i in reversed(word):
            s = self._rho_letter_apply(i, s, max_grade)
            if not s:
                break
        return s

    def rho_go_apply(self, index: GOIndex, s: Series, max_grade: int) -> Series:
        out = Series.zero()
        for word, coeff in self.go_to_words(index).items():
            out = out + self.rho_word_apply(word, s, max_grade) * coeff
        return out

    def rho_go(self, index: GOIndex, max_grade: int | None = None) -> Endo:
        """rho(A_I) as a sparse matrix over basis keys, rows pruned above ``max_grade``."""
        g = self.max_grade if max_grade is None else max_grade
        cached = self._rho_cache.get((index, g))
        if cached is None:
            cols = {}
            for j in self.basis_ids(g):
                image = self.rho_go_apply(index, Series.unit(j), g)
                cols[self._keys[j]] = image.map_keys(self.key_of)
            cached = Endo(cols)
            self._rho_cache[(index, g)] = cached
        return cached

    # -- enumeration and tables ----------------------------------------------

    def go_indices(self, max_degree: int) -> tuple[GOIndex, ...]:
        """All multisets over the enumerated basis with degree <= ``max_degree``."""
        if self.kappa_min < 1:
            raise ValueError("degree enumeration requires a 1-connected grading")
        cached = self._index_cache.get(max_degree)
        if cached is not None:
            return cached
        ids = self.basis_ids(max_degree)
        found: list[GOIndex] = []

        def rec(pos: int, budget: int, acc: list[tuple[int, int]]):
            found.append(GOIndex(acc))
            for p in range(pos, len(ids)):
                g = self._grades[ids[p]]
                if g > budget:
                    continue
                for m in range(1, budget // g + 1):
                    rec(p + 1, budget - m * g, acc + [(ids[p], m)])

        rec(0, max_degree, [])
        out = tuple(sorted(found, key=lambda I: (self.go_degree(I), I.pairs())))
        self._index_cache[max_degree] = out
        return out

    def multiplication_table(self, max_degree: int):
        """All structure constants of the envelope product up to total degree."""
        cached = self._mult_table_cache.get(max_degree)
        if cached is not None:
            return cached
        table: dict[GOIndex, list[tuple[GOIndex, GOIndex, Fraction]]] = {}
        indices = self.go_indices(max_degree)
        for left in indices:
            dl = self.go_degree(left)
            for right in indices:
                if dl + self.go_degree(right) > max_degree:
                    continue
                for target, coeff in self.go_product(left, right).items():
                    table.setdefault(target, []).append((left, right, coeff))
        for rows in table.values():
            rows.sort(key=lambda t: (t[0].pairs(), t[1].pairs()))
        self._mult_table_cache[max_degree] = table
        return table

    def coproduct_table(self, index: GOIndex, max_degree: int) -> list[tuple[GOIndex, GOIndex, Fraction]]:
        """All (I', I'', c) with the dual coproduct coefficient c nonzero at ``index``."""
        if self.go_degree(index) > max_degree:
            raise ValueError("index beyond truncation")
        return list(self.multiplication_table(max_degree).get(index, []))

    def antipode(self, index: GOIndex, max_degree: int) -> Series:
        """Antipode of the monomial a^I on the commutative side, over GOIndex keys."""
        cached = self._antipode_cache.get(index)
        if cached is not None:
            return cached
        if not index.pairs():
            out = Series.unit(GO_UNIT)
        else:
            out = Series.zero()
            for left, right, coeff in self.coproduct_table(index, self.go_degree(index)):
                if left == index:
                    continue
                out = out - self.antipode(left, max_degree).map_keys(
                    lambda J, right=right: J.add(right)
                ) * coeff
        self._antipode_cache[index] = out
        return out


def prelie_identity_defect(inst: PreLieInstance, a: Key, b: Key, c: Key) -> Series:
    """a>(b>c) - (a>b)>c - b>(a>c) + (b>a)>c; zero for any pre-Lie oracle."""
    sa, sb, sc = Series.unit(a), Series.unit(b), Series.unit(c)
    p = inst.product_series
    return p(sa, p(sb, sc)) - p(p(sa, sb), sc) - p(sb, p(sa, sc)) + p(p(sb, sa), sc)


def word_coproduct(word: tuple[int, ...]) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Deconcatenation-type coproduct of the envelope on a word: subsequence splits."""
    n = len(word)
    out = []
    for mask in range(1 << n):
        left = tuple(word[i] for i in range(n) if mask >> i & 1)
        right = tuple(word[i] for i in range(n) if not mask >> i & 1)
        out.append((left, right))
    return out


# -- characters -------------------------------------------------------------


class Character:
    """Multiplicative functional of the dual Hopf algebra, truncated at a grade.

    Stored through its values on primitives; the value on a symmetric-basis
    index I is the product of primitive values, so multiplicativity holds by
    construction and the counit value at the empty index is 1.
    """

    def __init__(self, inst: PreLieInstance, truncation: int, coefficients: Mapping[Key, Any]):
        self.inst = inst
        self.truncation = truncation
        coeffs = {}
        for key, value in coefficients.items():
            c = Fraction(value) if not isinstance(value, Fraction) else value
            if not c:
                continue
            if inst._grade_fn(key) > truncation:
                raise ValueError("character coefficient beyond truncation")
            coeffs[key] = c
        self.coefficients = coeffs

    @classmethod
    def exp(cls, inst: PreLieInstance, primitives: Series, truncation: int) -> "Character":
        return cls(inst, truncation, dict(primitives.items()))

    @classmethod
    def counit(cls, inst: PreLieInstance, truncation: int) -> "Character":
        return cls(inst, truncation, {})

    def primitive_series(self) -> Series:
        return Series(self.coefficients)

    def power(self, index: GOIndex) -> Fraction:
        """f^I, the product of primitive coefficients with multiplicities."""
        out = ONE
        for i, m in index.pairs():
            c = self.coefficients.get(self.inst.key_of(i))
            if not c:
                return Fraction(0)
            out *= c**m
        return out

    def support_ids(self) -> list[int]:
        return sorted(self.inst.id_of(k) for k in self.coefficients)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Character)
            and self.inst is other.inst
            and self.truncation == other.truncation
            and self.coefficients == other.coefficients
        )


def convolve(left: Character, right: Character) -> Character:
    """Convolution product of characters, computed from the coproduct tables."""
    inst = left.inst
    if inst is not right.inst or left.truncation != right.truncation:
        raise ValueError("characters live on different truncations")
    n = left.truncation
    out: dict[Key, Fraction] = {}
    for k in inst.basis_ids(n):
        total = Fraction(0)
        for l_index, r_index, coeff in inst.coproduct_table(GOIndex.single(k), n):
            total += coeff * left.power(l_index) * right.power(r_index)
        if total:
            out[inst.key_of(k)] = total
    return Character(inst, n, out)


def _supported_indices(inst: PreLieInstance, support: Sequence[int], max_degree: int):
    """Multisets over a fixed support with degree <= max_degree (includes empty)."""
    found: list[GOIndex] = []

    def rec(pos: int, budget: int, acc: list[tuple[int, int]]):
        found.append(GOIndex(acc))
        for p in range(pos, len(support)):
            g = inst.grade_of(support[p])
            if g <= 0 or g > budget:
                continue
            for m in range(1, budget // g + 1):
                rec(p + 1, budget - m * g, acc + [(support[p], m)])

    rec(0, max_degree, [])
    return found


def bch_compose(inst: PreLieInstance, f: Series, g: Series, truncation: int) -> Series:
    """Argument of the exponential for exp(f)*exp(g): f + rho(exp f) g."""
    f_ids = Series((inst.id_of(k), c) for k, c in f.items())
    g_ids = Series(
        (inst.id_of(k), c) for k, c in g.items() if inst._grade_fn(k) <= truncation
    )
    char = Character.exp(inst, f, truncation)
    out = Series((k, c) for k, c in f_ids.items() if inst.grade_of(k) <= truncation)
    for index in _supported_indices(inst, char.support_ids(), truncation - inst.kappa_min):
        weight = char.power(index)
        if weight:
            out = out + inst.rho_go_apply(index, g_ids, truncation) * weight
    return out.map_keys(inst.key_of)


def character_inverse(char: Character) -> Character:
    """Convolution inverse, by graded recursion on the reduced coproduct."""
    inst, n = char.inst, char.truncation
    inverse: dict[Key, Fraction] = {}
    half = Character(inst, n, {})
    for k in inst.basis_ids(n):  # basis_ids is sorted by grade
        key = inst.key_of(k)
        total = char.coefficients.get(key, Fraction(0))
        for l_index, r_index, coeff in inst.coproduct_table(GOIndex.single(k), n):
            if not l_index.pairs() or not r_index.pairs():
                continue
            total += coeff * char.power(l_index) * half.power(r_index)
        if total:
            inverse[key] = -total
            half = Character(inst, n, inverse)
    return Character(inst, n, inverse)


# -- modules and coactions ---------------------------------------------------

ModuleOracle = Callable[[Key, Key], Series]
"""Action of a primitive basis element on a module basis element."""


def module_word_apply(
    inst: PreLieInstance,
    oracle: ModuleOracle,
    word: tuple[int, ...],
    v: Key,
    prune: Callable[[Key], bool] | None = None,
) -> Series:
    s = Series.unit(v)
    for i in reversed(word):
        key = inst.key_of(i)
        s = s.bind(lambda m, key=key: oracle(key, m))
        if prune is not None and s:
            s = Series((m, c) for m, c in s.items() if not prune(m))
        if not s:
            break
    return s


def module_go_apply(
    inst: PreLieInstance,
    oracle: ModuleOracle,
    index: GOIndex,
    v: Key,
    prune: Callable[[Key], bool] | None = None,
) -> Series:
    """psi(A_I) applied to a module element, through the word expansion."""
    out = Series.zero()
    for word, coeff in inst.go_to_words(index).items():
        out = out + module_word_apply(inst, oracle, word, v, prune) * coeff
    return out


def coaction(
    inst: PreLieInstance,
    oracle: ModuleOracle,
    char: Character,
    module_keys: Sequence[Key],
    *,
    max_letters: int | None = None,
    module_grade: Callable[[Key], int] | None = None,
    max_module_grade: int | None = None,
) -> Endo:
    """(F x id) applied to the comodule map: the endomorphism sum_I f^I psi(A_I).

    The sum over indices must be cut off in one of two ways, depending on the
    bookkeeping that makes the oracle columnwise finite:

    - ``max_letters``: indices with more letters act as zero on the listed
      module elements (each letter consumes at least one module node, as for
      insertion-type actions).  Rows are not pruned.
    - ``module_grade``/``max_module_grade``: the oracle is grade-compatible
      and each letter raises the module grade by its own grade, so only
      indices with degree <= max_module_grade - grade(column) contribute to
      rows within the bound; rows above the bound are pruned.
    """
    support = char.support_ids()
    if module_grade is not None:
        if max_module_grade is None:
            raise ValueError("module_grade requires max_module_grade")
        prune = lambda m: module_grade(m) > max_module_grade  # noqa: E731
        indices = _supported_indices(inst, support, max_module_grade - min(
            (module_grade(v) for v in module_keys), default=0
        ))
        bound = lambda v: max_module_grade - module_grade(v)  # noqa: E731
        weight_of = inst.go_degree
    elif max_letters is not None:
        max_deg = max((inst.grade_of(i) for i in support), default=0) * max_letters
        indices = [
            index for index in _supported_indices(inst, support, max_deg)
            if index.length <= max_letters
        ]
        prune = None
        bound = lambda v: max_letters  # noqa: E731
        weight_of = lambda index: index.length  # noqa: E731
    else:
        raise ValueError("need max_letters or a module grading")
    columns: dict[Key, Series] = {}
    for v in module_keys:
        col = Series.zero()
        cut = bound(v)
        for index in indices:
            if weight_of(index) > cut:
                continue
            weight = char.power(index)
            if weight:
                col = col + module_go_apply(inst, oracle, index, v, prune) * weight
        columns[v] = col
    return Endo(columns)


# -- JSON export -------------------------------------------------------------


def index_to_json(inst: PreLieInstance, index: GOIndex, key_json: Callable[[Key], Any]):
    return [[key_json(inst.key_of(i)), m] for i, m in index.pairs()]


def table_to_json(inst: PreLieInstance, max_degree: int, key_json: Callable[[Key], Any]) -> list[dict]:
    """Coproduct/product structure constants as exact-integer JSON rows."""
    rows = []
    table = inst.multiplication_table(max_degree)
    for target in sorted(table, key=lambda I: (inst.go_degree(I), I.pairs())):
        for left, right, coeff in table[target]:
            rows.append(
                {
                    "I": index_to_json(inst, target, key_json),
                    "I1": index_to_json(inst, left, key_json),
                    "I2": index_to_json(inst, right, key_json),
                    "num": coeff.numerator,
                    "den": coeff.denominator,
                }
            )
    return rows
