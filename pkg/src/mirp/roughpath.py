"""Numerical signatures of smooth drivers over populated multi-indices.

The signature values X_{s,t,beta} are built level by level from the integral
hierarchy: a length-n component integrates products of shorter components
against one driver channel.  The same exact algebra that proves Chen's
identity supplies the matrices used here to verify it numerically, to
translate signatures, and to rebuild higher levels by dyadic sewing.

Exact rational matrices are assembled first and converted to binary64 once;
all remaining arithmetic is floating point with fixed summation order.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .multiindex import (
    EMPTY,
    Flavor,
    MultiIndex,
    RSymbol,
    enumerate_populated,
    rho_tilde_exp,
    t_instance,
)
from .prelie import Endo, GOIndex, bch_compose
from .quadrature import RULES, cumulative_stieltjes
from .series import Series

Label = Any


# -- drivers ------------------------------------------------------------------


@dataclass(frozen=True)
class Driver:
    """Per-label samples of a smooth path on a uniform grid over [0, 1].

    ``rates`` optionally carries the time derivatives (needed only by the
    expansion ODE oracle); sampled-only drivers leave it empty.
    """

    labels: tuple[Label, ...]
    times: np.ndarray
    samples: dict[Label, np.ndarray]
    rates: dict[Label, Callable[[float], float]] = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if len(t) < 2 or t[0] != 0.0 or t[-1] != 1.0:
            raise ValueError("time grid must run from 0 to 1")
        h = 1.0 / (len(t) - 1)
        if not np.allclose(np.diff(t), h, rtol=0, atol=1e-12):
            raise ValueError("time grid must be uniform")
        for label in self.labels:
            if label not in self.samples or len(self.samples[label]) != len(t):
                raise ValueError(f"samples for label {label!r} missing or wrong length")

    @property
    def grid_size(self) -> int:
        return len(self.times) - 1

    @classmethod
    def from_functions(
        cls,
        functions: Mapping[Label, Callable[[float], float]],
        grid_size: int,
        rates: Mapping[Label, Callable[[float], float]] | None = None,
    ) -> "Driver":
        times = np.linspace(0.0, 1.0, grid_size + 1)
        samples = {
            label: np.array([fn(t) for t in times]) for label, fn in functions.items()
        }
        return cls(
            labels=tuple(sorted(functions)),
            times=times,
            samples=samples,
            rates=dict(rates or {}),
        )

    @classmethod
    def from_csv(cls, text: str) -> "Driver":
        """Parse ``t,X_a,X_b,...`` rows; labels come from the column headers."""
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0][0].strip() != "t":
            raise ValueError("driver CSV must start with a 't' column")
        labels = []
        for name in rows[0][1:]:
            name = name.strip()
            labels.append(name[2:] if name.startswith("X_") else name)
        data = np.array([[float(x) for x in row] for row in rows[1:] if row])
        samples = {label: data[:, j + 1] for j, label in enumerate(labels)}
        return cls(labels=tuple(labels), times=data[:, 0], samples=samples)


_FORMS = {
    "identity": lambda p: (lambda t: t, lambda t: 1.0),
    "linear": lambda p: (
        lambda t: p.get("slope", 1.0) * t + p.get("offset", 0.0),
        lambda t: p.get("slope", 1.0),
    ),
    "poly": lambda p: (
        lambda t: sum(c * t**j for j, c in enumerate(p["coefficients"])),
        lambda t: sum(j * c * t ** (j - 1) for j, c in enumerate(p["coefficients"]) if j),
    ),
    "sin": lambda p: (
        lambda t: p.get("amplitude", 1.0)
        * math.sin(2.0 * math.pi * p.get("frequency", 1.0) * t + p.get("phase", 0.0)),
        lambda t: p.get("amplitude", 1.0)
        * 2.0
        * math.pi
        * p.get("frequency", 1.0)
        * math.cos(2.0 * math.pi * p.get("frequency", 1.0) * t + p.get("phase", 0.0)),
    ),
    "cos": lambda p: (
        lambda t: p.get("amplitude", 1.0)
        * math.cos(2.0 * math.pi * p.get("frequency", 1.0) * t + p.get("phase", 0.0)),
        lambda t: -p.get("amplitude", 1.0)
        * 2.0
        * math.pi
        * p.get("frequency", 1.0)
        * math.sin(2.0 * math.pi * p.get("frequency", 1.0) * t + p.get("phase", 0.0)),
    ),
    "constant": lambda p: (lambda t: p.get("value", 0.0), lambda t: 0.0),
}


def named_driver(config: Mapping[Label, Mapping], grid_size: int) -> Driver:
    """Build a driver from per-label closed forms, e.g. {"a": {"form": "sin", ...}}."""
    functions, rates = {}, {}
    for label, spec in config.items():
        form = spec.get("form")
        if form not in _FORMS:
            raise ValueError(f"unknown driver form {form!r}")
        fn, rate = _FORMS[form](dict(spec))
        functions[label], rates[label] = fn, rate
    return Driver.from_functions(functions, grid_size, rates)


# -- exact-to-float matrix plumbing -------------------------------------------


def endo_to_matrix(endo: Endo, basis: Sequence[MultiIndex]) -> np.ndarray:
    """Dense float matrix of an exact endomorphism, rows/columns in basis order."""
    pos = {b: i for i, b in enumerate(basis)}
    out = np.zeros((len(basis), len(basis)))
    for col, series in endo.columns.items():
        j = pos.get(col)
        if j is None:
            continue
        for row, coeff in series.items():
            i = pos.get(row)
            if i is not None:
                out[i, j] = float(coeff)
    return out


class SignatureScheme:
    """Shared combinatorics for one (labels, level bound) pair.

    Holds the populated basis, the integral-hierarchy decompositions, and the
    exact action matrices converted once to binary64.  Built lazily and then
    immutable, so instances can be shared freely.
    """

    def __init__(self, labels: Sequence[Label], levels: int):
        self.labels = tuple(sorted(labels))
        self.levels = levels
        self.basis: tuple[MultiIndex, ...] = tuple(enumerate_populated(self.labels, levels))
        self.pos = {b: i for i, b in enumerate(self.basis)}
        self.level_one = {label: self.pos[MultiIndex.unit(label)] for label in self.labels}
        self._decomp: dict[MultiIndex, list] = {}
        self._matrices: dict[GOIndex, np.ndarray] | None = None
        self._go_list: tuple[GOIndex, ...] | None = None

    @property
    def instance(self):
        return t_instance(self.labels, self.levels)

    def go_indices(self) -> tuple[GOIndex, ...]:
        if self._go_list is None:
            self._go_list = self.instance.go_indices(self.levels - 1)
        return self._go_list

    def matrices(self) -> dict[GOIndex, np.ndarray]:
        if self._matrices is None:
            inst = self.instance
            self._matrices = {
                index: endo_to_matrix(inst.rho_go(index, self.levels), self.basis)
                for index in self.go_indices()
            }
        return self._matrices

    def rho_exp_matrix(self, values: np.ndarray) -> np.ndarray:
        """Matrix of rho(exp(f)) for the float coefficient vector ``values``.

        The instance interns the enumerated basis in canonical order, so the
        ids inside the index pairs coincide with basis positions.
        """
        out = np.zeros((len(self.basis), len(self.basis)))
        for index, mat in self.matrices().items():
            weight = 1.0
            for i, m in index.pairs():
                weight *= values[i] ** m
            if weight:
                out += weight * mat
        return out

    def decompositions(self, beta: MultiIndex) -> list:
        """Splittings beta = e_(label,k) + beta_1 + ... + beta_k, with multiplicity.

        Returns tuples (label, components, count) where components is the
        unordered tuple of populated parts and count the number of ordered
        arrangements.
        """
        cached = self._decomp.get(beta)
        if cached is not None:
            return cached
        out = []
        for (label, k), _m in beta.pairs():
            rest = beta - MultiIndex.unit(label, k)
            for parts in _part_multisets(rest, k, self.basis):
                counts: dict[MultiIndex, int] = {}
                for p in parts:
                    counts[p] = counts.get(p, 0) + 1
                arrangements = math.factorial(k)
                for c in counts.values():
                    arrangements //= math.factorial(c)
                out.append((label, parts, arrangements))
        self._decomp[beta] = out
        return out


def _part_multisets(total: MultiIndex, k: int, candidates: Sequence[MultiIndex]):
    """Multisets of k populated indices summing to ``total`` (nondecreasing order)."""
    results: list[tuple[MultiIndex, ...]] = []
    usable = [c for c in candidates if c.length <= total.length]

    def rec(start: int, remaining: MultiIndex, slots: int, acc: list):
        if slots == 0:
            if remaining == EMPTY:
                results.append(tuple(acc))
            return
        if remaining.length < slots:
            return
        for i in range(start, len(usable)):
            cand = usable[i]
            if cand.length > remaining.length - (slots - 1):
                continue
            try:
                rest = remaining - cand
            except ValueError:
                continue
            rec(i, rest, slots - 1, acc + [cand])

    rec(0, total, k, [])
    return results


_SCHEMES: dict[tuple, SignatureScheme] = {}


def signature_scheme(labels: Sequence[Label], levels: int) -> SignatureScheme:
    key = (tuple(sorted(labels)), levels)
    scheme = _SCHEMES.get(key)
    if scheme is None:
        scheme = SignatureScheme(labels, levels)
        _SCHEMES[key] = scheme
    return scheme


# -- signatures ----------------------------------------------------------------


@dataclass
class SignatureGrid:
    """Signature values over a grid: per stored base point, arrays over all nodes."""

    driver: Driver
    levels: int
    quadrature: str
    base_indices: tuple[int, ...]
    values: dict[int, dict[MultiIndex, np.ndarray]]

    @property
    def scheme(self) -> SignatureScheme:
        return signature_scheme(self.driver.labels, self.levels)

    @property
    def basis(self) -> tuple[MultiIndex, ...]:
        return self.scheme.basis

    def value(self, s: int, t: int, beta: MultiIndex) -> float:
        return float(self.values_at(s, t)[self.scheme.pos[beta]])

    def vector(self, s: int, t: int) -> np.ndarray:
        """Stored-base values X_{s,t,.} as a vector in basis order."""
        per_beta = self.values[s]
        return np.array([per_beta[b][t] for b in self.basis])

    def values_at(self, s: int, t: int) -> np.ndarray:
        """X_{s,t,.}; reconstructed through Chen from base 0 when s is not stored.

        Reconstruction inverts the group element at X_{0,s} (the matrix is
        unitriangular in the grading, hence exactly invertible) and applies it
        to the increment X_{0,t} - X_{0,s}.
        """
        if s in self.values:
            return self.vector(s, t)
        if 0 not in self.values:
            raise KeyError(f"base point {s} not stored and no origin to rebuild from")
        x0s = self.vector(0, s)
        x0t = self.vector(0, t)
        mat = self.scheme.rho_exp_matrix(x0s)
        return np.linalg.solve(mat, x0t - x0s)

    def copy_with(self, values: dict[int, dict[MultiIndex, np.ndarray]]) -> "SignatureGrid":
        return SignatureGrid(
            driver=self.driver,
            levels=self.levels,
            quadrature=self.quadrature,
            base_indices=self.base_indices,
            values=values,
        )


def build_signature(
    driver: Driver,
    levels: int,
    quadrature: str = "trapezoid",
    base_indices: Sequence[int] | None = None,
) -> SignatureGrid:
    """Solve the integral hierarchy level by level over the sample grid.

    For each stored base point s, the component at beta integrates, channel by
    channel, the ordered products of shorter components against the driver
    increments; level one is exact from the samples.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if quadrature not in RULES:
        raise ValueError(f"quadrature must be one of {RULES}")
    scheme = signature_scheme(driver.labels, levels)
    bases = tuple(sorted(set(base_indices if base_indices is not None else (0,))))
    if any(b < 0 or b > driver.grid_size for b in bases):
        raise ValueError("base index outside the grid")
    values: dict[int, dict[MultiIndex, np.ndarray]] = {}
    for s in bases:
        per_beta: dict[MultiIndex, np.ndarray] = {}
        for beta in scheme.basis:  # canonical order is by length, so levels build up
            if beta.length == 1:
                ((label, _), _m), = beta.pairs()
                x = driver.samples[label]
                per_beta[beta] = x - x[s]
                continue
            integral = np.zeros(driver.grid_size + 1)
            for label, parts, count in scheme.decompositions(beta):
                integrand = np.full(driver.grid_size + 1, float(count))
                for part in parts:
                    integrand = integrand * per_beta[part]
                cum = cumulative_stieltjes(integrand, driver.samples[label], quadrature)
                integral = integral + (cum - cum[s])
            per_beta[beta] = integral
        values[s] = per_beta
    return SignatureGrid(
        driver=driver,
        levels=levels,
        quadrature=quadrature,
        base_indices=bases,
        values=values,
    )


def chen_defect(sig: SignatureGrid, s: int, u: int, t: int) -> dict[MultiIndex, float]:
    """Per-component defect of Chen's identity across the split s < u < t."""
    scheme = sig.scheme
    x_su = sig.values_at(s, u)
    x_ut = sig.values_at(u, t)
    x_st = sig.values_at(s, t)
    corr = scheme.rho_exp_matrix(x_su) @ x_ut
    defect = x_st - x_su - corr
    return {beta: float(defect[i]) for i, beta in enumerate(scheme.basis)}


def holder_report(
    sig: SignatureGrid,
    alpha: float,
    pairs: Sequence[tuple[int, int]],
    alpha_labels: Mapping[Label, float] | None = None,
    hat: Iterable[Label] = (),
) -> dict[MultiIndex, float]:
    """Supremum of |X_{s,t,beta}| / |t-s|^e over the sampled pairs.

    The exponent is alpha * length by default; with per-label exponents on the
    ``hat`` subset it becomes the mixed node-count combination.
    """
    hat = frozenset(hat)
    exps = {}
    for beta in sig.basis:
        if alpha_labels:
            e = sum(
                (alpha_labels[l] if l in hat else alpha) * beta.label_count(l)
                for l in sig.driver.labels
            )
        else:
            e = alpha * beta.length
        exps[beta] = e
    sup = {beta: 0.0 for beta in sig.basis}
    times = sig.driver.times
    for s, t in pairs:
        if s == t:
            continue
        dt = abs(times[t] - times[s])
        vec = sig.values_at(s, t)
        for i, beta in enumerate(sig.basis):
            ratio = abs(vec[i]) / dt ** exps[beta]
            if ratio > sup[beta]:
                sup[beta] = ratio
    return sup


# -- translations ----------------------------------------------------------------


@dataclass(frozen=True)
class TranslationSpec:
    """Flavor-tagged translation coefficients c_{(gamma, label)}."""

    flavor: Flavor
    coefficients: Series  # over RSymbol, exact rationals
    bound: int

    def __post_init__(self):
        self.flavor.validate_support(self.coefficients)
        for r, _ in self.coefficients.items():
            if r.gamma.length > self.bound:
                raise ValueError("translation coefficient beyond the declared bound")

    def c_vector(self, label: Label, basis: Sequence[MultiIndex]) -> np.ndarray:
        pos = {b: i for i, b in enumerate(basis)}
        out = np.zeros(len(basis))
        for r, coeff in self.coefficients.items():
            if r.label == label and r.gamma in pos:
                out[pos[r.gamma]] = float(coeff)
        return out

    def to_json(self) -> dict:
        return {
            "flavor": self.flavor.kind,
            "hat": sorted(self.flavor.hat),
            "bound": self.bound,
            "coefficients": [
                {
                    "gamma": r.gamma.to_json(),
                    "label": r.label,
                    "num": c.numerator,
                    "den": c.denominator,
                }
                for r, c in self.coefficients.sorted_items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TranslationSpec":
        flavor = Flavor(data["flavor"], data.get("hat", ()))
        coeffs = Series(
            (
                RSymbol(MultiIndex.from_json(row["gamma"]), row["label"]),
                Fraction(int(row["num"]), int(row.get("den", 1))),
            )
            for row in data["coefficients"]
        )
        return cls(flavor=flavor, coefficients=coeffs, bound=int(data["bound"]))


def translation_matrix(spec: TranslationSpec, labels: Sequence[Label], levels: int) -> np.ndarray:
    """Float matrix of the translation on components of length <= levels."""
    scheme = signature_scheme(labels, levels)
    endo = rho_tilde_exp(spec.coefficients, spec.flavor, scheme.labels, levels)
    return endo_to_matrix(endo, scheme.basis)


def translate(sig: SignatureGrid, spec: TranslationSpec) -> SignatureGrid:
    """Apply the translation group element to every stored signature vector."""
    scheme = sig.scheme
    mat = translation_matrix(spec, scheme.labels, sig.levels)
    out: dict[int, dict[MultiIndex, np.ndarray]] = {}
    for s, per_beta in sig.values.items():
        stack = np.stack([per_beta[b] for b in scheme.basis])
        new = mat @ stack
        out[s] = {beta: new[i] for i, beta in enumerate(scheme.basis)}
    return sig.copy_with(out)


def compose_specs(first: TranslationSpec, second: TranslationSpec, levels: int) -> TranslationSpec:
    """Spec whose translation equals applying ``first`` then ``second`` on T^(levels).

    Translations act on value vectors, so the combination is the group log of
    exp(second) * exp(first).  The series is truncated at flavor grade
    ``levels``: symbols beyond it cannot touch components of length <= levels.
    """
    if first.flavor.kind != second.flavor.kind or first.flavor.hat != second.flavor.hat:
        raise ValueError("cannot compose translations of different flavors")
    flavor = first.flavor
    if flavor.kind == "rl_hat":
        combined = first.coefficients + second.coefficients
    else:
        from .multiindex import support_instance

        carrier = support_instance(flavor, first.coefficients + second.coefficients)
        combined = bch_compose(carrier, second.coefficients, first.coefficients, levels)
    return TranslationSpec(
        flavor=flavor,
        coefficients=combined,
        bound=levels + 1,
    )


def translated_hierarchy(
    driver: Driver,
    spec: TranslationSpec,
    levels: int,
    quadrature: str = "trapezoid",
    base_indices: Sequence[int] | None = None,
) -> SignatureGrid:
    """Solve the counterterm hierarchy directly by quadrature.

    Each channel integrates the group action of the running solution applied
    to the shifted direction (unit vector plus the channel counterterm); for
    a zero spec this reduces to the plain hierarchy.
    """
    if quadrature not in RULES:
        raise ValueError(f"quadrature must be one of {RULES}")
    scheme = signature_scheme(driver.labels, levels)
    bases = tuple(sorted(set(base_indices if base_indices is not None else (0,))))
    basis = scheme.basis
    vectors = {}
    for label in scheme.labels:
        v = spec.c_vector(label, basis)
        v[scheme.level_one[label]] += 1.0
        vectors[label] = v
    # per (beta, label): polynomial terms sum_I coeff * prod X^I of the integrand
    matrices = scheme.matrices()
    terms: dict[tuple[int, Label], list[tuple[GOIndex, float]]] = {}
    for label in scheme.labels:
        v = vectors[label]
        for index, mat in matrices.items():
            row_weights = mat @ v
            for i, w in enumerate(row_weights):
                if w:
                    terms.setdefault((i, label), []).append((index, float(w)))
    n_nodes = driver.grid_size + 1
    values: dict[int, dict[MultiIndex, np.ndarray]] = {}
    for s in bases:
        arrays: list[np.ndarray | None] = [None] * len(basis)
        for i, beta in enumerate(basis):  # basis order is by length
            total = np.zeros(n_nodes)
            for label in scheme.labels:
                entry = terms.get((i, label))
                if not entry:
                    continue
                integrand = np.zeros(n_nodes)
                for index, coeff in entry:
                    prod = np.full(n_nodes, coeff)
                    for j, m in index.pairs():
                        prod = prod * arrays[j] ** m
                    integrand = integrand + prod
                cum = cumulative_stieltjes(integrand, driver.samples[label], quadrature)
                total = total + (cum - cum[s])
            arrays[i] = total
        values[s] = {beta: arrays[i] for i, beta in enumerate(basis)}
    return SignatureGrid(
        driver=driver,
        levels=levels,
        quadrature=quadrature,
        base_indices=bases,
        values=values,
    )


def translated_hierarchy_check(
    driver: Driver,
    spec: TranslationSpec,
    levels: int,
    quadrature: str = "trapezoid",
    base_indices: Sequence[int] | None = None,
    pairs: Sequence[tuple[int, int]] | None = None,
) -> float:
    """Max discrepancy between re-integrated counterterm hierarchy and translation."""
    bases = tuple(sorted(set(base_indices if base_indices is not None else (0,))))
    direct = translated_hierarchy(driver, spec, levels, quadrature, bases)
    pushed = translate(build_signature(driver, levels, quadrature, bases), spec)
    if pairs is None:
        step = max(1, driver.grid_size // 16)
        pairs = [(s, t) for s in bases for t in range(0, driver.grid_size + 1, step)]
    worst = 0.0
    for s, t in pairs:
        diff = np.abs(direct.values_at(s, t) - pushed.values_at(s, t))
        worst = max(worst, float(diff.max()))
    return worst


# -- extension by sewing -----------------------------------------------------------


class ExtensionError(RuntimeError):
    """Raised when dyadic refinement fails to stabilize within the depth budget."""


def extend_level(
    sig: SignatureGrid,
    beta: MultiIndex,
    pairs: Sequence[tuple[int, int]],
    max_depth: int = 12,
    tol: float = 1e-9,
) -> dict[tuple[int, int], float]:
    """Rebuild the component at ``beta`` (one level above the grid) by sewing.

    The two-parameter germ refines through midpoints: the value over (s, t)
    is the sum over both halves plus the Chen correction of the split, with
    the correction computed from the known lower levels.  Refinement stops
    once one more dyadic level moves the result by less than ``tol``;
    exhausting the depth budget without stabilizing raises ExtensionError.
    """
    if beta.length != sig.levels + 1:
        raise ValueError("extension expects a component one level above the grid")
    scheme = signature_scheme(sig.driver.labels, beta.length)
    row = scheme.pos[beta]
    low = signature_scheme(sig.driver.labels, sig.levels)

    def padded(s: int, t: int) -> np.ndarray:
        vec = np.zeros(len(scheme.basis))
        vals = sig.values_at(s, t)
        for i, b in enumerate(low.basis):
            vec[scheme.pos[b]] = vals[i]
        return vec

    corr_cache: dict[tuple[int, int, int], float] = {}

    def correction(s: int, u: int, t: int) -> float:
        cache_key = (s, u, t)
        value = corr_cache.get(cache_key)
        if value is None:
            x_su = padded(s, u)
            x_ut = padded(u, t)
            mat = scheme.rho_exp_matrix(x_su)
            value = float(mat[row] @ x_ut) - x_ut[row]  # strip the identity part
            corr_cache[cache_key] = value
        return value

    def refine(s: int, t: int, depth: int) -> float:
        if depth == 0 or t - s <= 1:
            return 0.0
        u = (s + t) // 2
        return refine(s, u, depth - 1) + refine(u, t, depth - 1) + correction(s, u, t)

    out: dict[tuple[int, int], float] = {}
    for s, t in pairs:
        if s == t:
            out[(s, t)] = 0.0
            continue
        prev = 0.0
        converged = False
        for depth in range(1, max_depth + 1):
            value = refine(s, t, depth)
            moved = abs(value - prev)
            # fully resolved once every dyadic piece is a single grid interval
            if moved <= tol or (1 << depth) >= t - s:
                converged = True
                break
            prev = value
        if not converged:
            raise ExtensionError(
                f"extension over ({s},{t}) still moved {moved:.3e} "
                f"at depth {max_depth}, above tol={tol:.3e}"
            )
        out[(s, t)] = value
    return out


# -- pair selection -----------------------------------------------------------


def dyadic_pairs(grid_size: int, depth: int = 4) -> list[tuple[int, int]]:
    """All ordered pairs of dyadic nodes down to ``depth`` levels of the grid."""
    nodes = sorted(
        {grid_size * k // (1 << d) for d in range(depth + 1) for k in range((1 << d) + 1)}
    )
    return [(s, t) for s in nodes for t in nodes if s < t]


def select_pairs(
    grid_size: int,
    policy: str,
    seed: int = 0,
    count: int = 64,
    bases: Sequence[int] = (0,),
) -> list[tuple[int, int]]:
    if policy == "dyadic":
        return dyadic_pairs(grid_size)
    if policy == "all":
        return [(s, t) for s in bases for t in range(grid_size + 1) if t != s]
    if policy.startswith("random"):
        rng = np.random.default_rng(seed)
        out = set()
        while len(out) < count:
            s, t = sorted(rng.integers(0, grid_size + 1, size=2))
            if s != t:
                out.add((int(s), int(t)))
        return sorted(out)
    raise ValueError(f"unknown pair policy {policy!r}")
