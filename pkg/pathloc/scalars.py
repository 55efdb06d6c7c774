from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, override

from sympy import QQ
from sympy.polys.fields import FracElement, FracField
from sympy.polys.fields import field as frac_field
from sympy.polys.orderings import grlex

from pathloc.errors import DivisionByZero, IncomparableHomes, MembershipError, NotASubfield

if TYPE_CHECKING:
    from sympy.polys.rings import PolyElement

    from pathloc.quiver import ComponentPoset

type Frac = FracElement


def variable_name(cls: str) -> str:
    return f"x_{cls}"


@dataclass(frozen=True, eq=False)
class FieldTower:
    """
    The poset of fields `K = {K_i}` over a tree `I`.

    `K_i` is the field of rational functions over the rationals in the variables `x_j` for
    `j` in `[i, i_0]`, so `K_i ⊆ K_j` whenever `j ≤ i`. Every value lives in one ambient
    sympy field over all variables (ordered by class order, graded lexicographic), and a
    value belongs to `K_i` when the variables it uses are among those of `K_i`.

    A constant tower assigns the whole ambient field to every class.
    """

    poset: ComponentPoset
    is_constant: bool = False

    @cached_property
    def field(self) -> FracField:
        names = [variable_name(c) for c in self.poset.classes]
        return frac_field(names, QQ, grlex)[0]

    @cached_property
    def _index(self) -> dict[str, int]:
        return {c: k for k, c in enumerate(self.poset.classes)}

    @cached_property
    def _chain_vars(self) -> dict[str, frozenset[int]]:
        everything = frozenset(range(len(self.poset.classes)))
        if self.is_constant:
            return dict.fromkeys(self.poset.classes, everything)
        return {
            c: frozenset(self._index[j] for j in self.poset.classes if self.poset.le(c, j))
            for c in self.poset.classes
        }

    @property
    def root(self) -> str:
        return self.poset.root

    def constant(self) -> FieldTower:
        "The constant system over the same poset, every field being the ambient one."
        return FieldTower(self.poset, is_constant=True)

    def chain_vars(self, i: str) -> frozenset[int]:
        return self._chain_vars[i]

    def used_vars(self, value: Frac) -> frozenset[int]:
        if not value:
            return frozenset()
        numer, denom = value.numer.degrees(), value.denom.degrees()
        return frozenset(k for k, (a, b) in enumerate(zip(numer, denom, strict=True)) if a or b)

    def fits(self, value: Frac, i: str) -> bool:
        "Whether `value` lies in `K_i`."
        return self.used_vars(value) <= self._chain_vars[i]

    def home_of(self, value: Frac) -> str:
        "The largest class whose field contains `value`."
        if self.is_constant:
            return self.root
        used = [self.poset.classes[k] for k in self.used_vars(value)]
        if not used:
            return self.root

        deepest = used[0]
        for c in used[1:]:
            deepest = self.meet(deepest, c)
        return deepest

    def meet(self, i: str, j: str) -> str:
        "The deeper of two comparable classes."
        if self.poset.le(i, j):
            return i
        if self.poset.le(j, i):
            return j
        msg = f"Classes {i} and {j} are incomparable"
        raise IncomparableHomes(msg)

    def of(self, value: Frac | int, home: str | None = None) -> FieldScalar:
        v = self.field(value) if isinstance(value, int) else value
        return FieldScalar(v, self.home_of(v) if home is None else home, self)

    def const(self, n: int) -> FieldScalar:
        return FieldScalar(self.field(n), self.root, self)

    def var(self, cls: str) -> FieldScalar:
        if cls not in self._index:
            msg = f"No variable for unknown class {cls}"
            raise MembershipError(msg)
        return FieldScalar(self.field.gens[self._index[cls]], cls, self)

    def subfield(self, i: str) -> FracField:
        "`K_i` as a field of its own."
        names = [variable_name(self.poset.classes[k]) for k in sorted(self._chain_vars[i])]
        return frac_field(names, QQ, grlex)[0]


@dataclass(frozen=True)
class FieldScalar:
    """An element of `K_{home}`, the smallest field it is asserted to live in."""

    value: Frac
    home: str
    tower: FieldTower = field(compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.tower.fits(self.value, self.home):
            msg = f"{self.value} does not lie in K_{self.home}"
            raise MembershipError(msg)

    @property
    def is_zero(self) -> bool:
        return not self.value

    def __add__(self, other: FieldScalar) -> FieldScalar:
        return add(self, other)

    def __sub__(self, other: FieldScalar) -> FieldScalar:
        return add(self, neg(other))

    def __mul__(self, other: FieldScalar) -> FieldScalar:
        return mul(self, other)

    def __truediv__(self, other: FieldScalar) -> FieldScalar:
        return mul(self, inv(other))

    def __neg__(self) -> FieldScalar:
        return neg(self)

    @override
    def __str__(self) -> str:
        return str(self.value)


def add(a: FieldScalar, b: FieldScalar) -> FieldScalar:
    return FieldScalar(a.value + b.value, a.tower.meet(a.home, b.home), a.tower)


def mul(a: FieldScalar, b: FieldScalar) -> FieldScalar:
    return FieldScalar(a.value * b.value, a.tower.meet(a.home, b.home), a.tower)


def neg(a: FieldScalar) -> FieldScalar:
    return FieldScalar(-a.value, a.home, a.tower)


def inv(a: FieldScalar) -> FieldScalar:
    if a.is_zero:
        msg = "Division by zero"
        raise DivisionByZero(msg)
    return FieldScalar(1 / a.value, a.home, a.tower)


def coerce(s: FieldScalar, i: str) -> FieldScalar:
    "View `s` in `K_i`; needs `K_{home(s)} ⊆ K_i`, i.e. `i ≤ home(s)`."
    if not s.tower.poset.le(i, s.home):
        msg = f"K_{s.home} is not a subfield of K_{i}"
        raise NotASubfield(msg)
    return FieldScalar(s.value, i, s.tower)


@dataclass(frozen=True)
class Amalgamation:
    """
    An embedding of the poset of fields into a constant system.

    The common field `K` is the ambient field of the tower. Each `K_i` is its own sympy
    field; `φ_i` and the inclusions send every generator `x_j` to the generator of the same
    name and extend as field homomorphisms.
    """

    tower: FieldTower

    @property
    def field(self) -> FracField:
        return self.tower.field

    def embed(self, i: str, value: Frac) -> Frac:
        "`φ_i`, from an element of `subfield(i)` into `K`."
        return _transport(value, self.tower.subfield(i), self.field)

    def include(self, j: str, i: str, value: Frac) -> Frac:
        "The inclusion `K_j ⊆ K_i` for `i ≤ j`."
        if not self.tower.poset.le(i, j):
            msg = f"K_{j} is not a subfield of K_{i}"
            raise NotASubfield(msg)
        return _transport(value, self.tower.subfield(j), self.tower.subfield(i))

    def square_commutes(self, i: str, j: str, value: Frac) -> bool:
        "`φ_i` restricted to `K_j` agrees with `φ_j` on `value ∈ K_j`."
        return self.embed(i, self.include(j, i, value)) == self.embed(j, value)


def _transport(value: Frac, source: FracField, target: FracField) -> Frac:
    if value.field != source:
        msg = f"{value} is not an element of {source}"
        raise MembershipError(msg)

    by_name = {str(g): g for g in target.gens}
    missing = [str(g) for g in source.gens if str(g) not in by_name]
    if missing:
        msg = f"{target} has no generator {', '.join(missing)}"
        raise NotASubfield(msg)
    images = [by_name[str(g)] for g in source.gens]

    def image(p: PolyElement) -> Frac:
        total = target.zero
        for monomial, coefficient in p.terms():
            term = target.ground_new(coefficient)
            for g, k in zip(images, monomial, strict=True):
                term *= g**k
            total += term
        return total

    return image(value.numer) / image(value.denom)


def amalgamate(tower: FieldTower) -> Amalgamation:
    return Amalgamation(tower)
