"""Sparse linear combinations over an arbitrary basis, with exact rational coefficients."""
from __future__ import annotations

from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Mapping, Tuple

Key = Any
Coefficient = Fraction


def _as_coefficient(value):
    # ints are exact rationals and far cheaper than Fraction; anything else
    # (floats included) is converted exactly
    if isinstance(value, (int, Fraction)):
        return value
    return Fraction(value)


class Series:
    """Finitely supported map ``key -> exact rational`` (int or Fraction).

    Zero coefficients are never stored, so two series are equal iff their
    term dictionaries are equal.  Keys only need to be hashable; sorting for
    display assumes keys of one series are mutually comparable.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Key, Any] | Iterable[Tuple[Key, Any]] | None = None):
        data: dict[Key, Any] = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for key, value in items:
                c = data.get(key, 0) + _as_coefficient(value)
                if c:
                    data[key] = c
                elif key in data:
                    del data[key]
        self._terms = data

    @classmethod
    def unit(cls, key: Key, coefficient=1) -> "Series":
        return cls(((key, coefficient),))

    @classmethod
    def zero(cls) -> "Series":
        return cls()

    # -- inspection ---------------------------------------------------------

    def items(self) -> Iterator[Tuple[Key, Any]]:
        return iter(self._terms.items())

    def sorted_items(self) -> list[Tuple[Key, Any]]:
        return sorted(self._terms.items(), key=lambda kv: _order_token(kv[0]))

    def keys(self):
        return self._terms.keys()

    def get(self, key: Key):
        return self._terms.get(key, 0)

    def __getitem__(self, key: Key):
        return self._terms.get(key, 0)

    def __contains__(self, key: Key) -> bool:
        return key in self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    # -- linear structure ---------------------------------------------------

    def __add__(self, other: "Series") -> "Series":
        if not isinstance(other, Series):
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        data = dict(self._terms)
        for key, value in other._terms.items():
            c = data.get(key, 0) + value
            if c:
                data[key] = c
            elif key in data:
                del data[key]
        out = Series.__new__(Series)
        out._terms = data
        return out

    def __sub__(self, other: "Series") -> "Series":
        if not isinstance(other, Series):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "Series":
        out = Series.__new__(Series)
        out._terms = {k: -v for k, v in self._terms.items()}
        return out

    def __mul__(self, scalar) -> "Series":
        c = _as_coefficient(scalar)
        out = Series.__new__(Series)
        out._terms = {} if not c else {k: v * c for k, v in self._terms.items()}
        return out

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Series":
        return self * (Fraction(1) / _as_coefficient(scalar))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Series) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # -- linear extension ---------------------------------------------------

    def bind(self, fn: Callable[[Key], "Series"]) -> "Series":
        """Linear extension of ``fn``: sum of ``coeff * fn(key)`` over all terms."""
        data: dict = {}
        for key, coeff in self._terms.items():
            for k, v in fn(key)._terms.items():
                c = data.get(k, 0) + v * coeff
                if c:
                    data[k] = c
                elif k in data:
                    del data[k]
        out = Series.__new__(Series)
        out._terms = data
        return out

    def map_keys(self, fn: Callable[[Key], Key]) -> "Series":
        data: dict = {}
        for k, v in self._terms.items():
            key = fn(k)
            c = data.get(key, 0) + v
            if c:
                data[key] = c
            elif key in data:
                del data[key]
        out = Series.__new__(Series)
        out._terms = data
        return out

    def __repr__(self) -> str:
        if not self._terms:
            return "Series(0)"
        parts = [f"{v}*{k}" for k, v in self.sorted_items()]
        return "Series(" + " + ".join(parts) + ")"


def _order_token(key):
    # keys within one series are homogeneous in practice; fall back to repr
    # so that heterogeneous displays never raise
    return (type(key).__name__, key) if _comparable(key) else (type(key).__name__, repr(key))


def _comparable(key) -> bool:
    try:
        key < key  # noqa: B015
        return True
    except TypeError:
        return False


