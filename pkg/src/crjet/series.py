"""Exact truncated multivariate power series over the Gaussian rationals.

A :class:`TruncatedSeries` is either an *exact* polynomial (``trunc is None``)
or a series known only up to total degree ``trunc``; coefficients above the
truncation are unknown, not zero.  All values are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

Monomial = tuple[int, ...]


class SeriesError(ValueError):
    """Invalid series operation (variable mismatch, bad assignment, ...)."""


class TruncationError(SeriesError):
    """A requested coefficient lies beyond the known truncation."""


def _fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"non-rational coefficient {x!r}")


def _scalar(x):
    """Coerce a plain scalar operand; None for anything else (e.g. a series)."""
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return GaussianRational._make(Fraction(x), Fraction(0))
    return None


class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _fraction(re))
        object.__setattr__(self, "im", _fraction(im))

    @classmethod
    def _make(cls, re: Fraction, im: Fraction) -> GaussianRational:
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    @classmethod
    def coerce(cls, x) -> GaussianRational:
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex values are not Gaussian rationals")
        return cls(x)

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __reduce__(self):
        return (GaussianRational, (self.re, self.im))

    def __add__(self, other):
        other = _scalar(other)
        if other is None:
            return NotImplemented
        return GaussianRational._make(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _scalar(other)
        if other is None:
            return NotImplemented
        return GaussianRational._make(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _scalar(other)
        return NotImplemented if other is None else other - self

    def __neg__(self):
        return GaussianRational._make(-self.re, -self.im)

    def __mul__(self, other):
        other = _scalar(other)
        if other is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational._make(a * c, b)
        return GaussianRational._make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _scalar(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _scalar(other)
        return NotImplemented if other is None else other * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = GaussianRational._make(Fraction(1), Fraction(0))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> GaussianRational:
        norm = self.re * self.re + self.im * self.im
        if not norm:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational._make(self.re / norm, -self.im / norm)

    def conjugate(self) -> GaussianRational:
        return GaussianRational._make(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return format_coefficient(self)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)

Scalar = Union[GaussianRational, int, Fraction]


def format_coefficient(c: GaussianRational) -> str:
    """Render a coefficient in the expression grammar (``3/2``, ``-i``, ``(1 + 2*i)``)."""
    re, im = c.re, c.im
    if not im:
        return str(re)
    if im == 1:
        ims = "i"
    elif im == -1:
        ims = "-i"
    else:
        ims = f"{im}*i"
    if not re:
        return ims
    sign = "-" if im < 0 else "+"
    mag = ims[1:] if im < 0 else ims
    return f"({re} {sign} {mag})"


@dataclass(frozen=True, order=False)
class OrderValue:
    """Order of a series: ``exact`` m, ``infinite`` (zero polynomial) or ``at_least`` m."""

    kind: str
    m: int | None = None

    @classmethod
    def exact(cls, m: int) -> OrderValue:
        return cls("exact", m)

    @classmethod
    def infinite(cls) -> OrderValue:
        return cls("infinite", None)

    @classmethod
    def at_least(cls, m: int) -> OrderValue:
        return cls("at_least", m)

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"

    @property
    def is_infinite(self) -> bool:
        return self.kind == "infinite"

    @property
    def is_at_least(self) -> bool:
        return self.kind == "at_least"

    @property
    def decided(self) -> bool:
        return self.kind != "at_least"

    def bounds(self) -> tuple[float, float]:
        """Interval ``(lo, hi)`` containing the true order (``inf`` for +infinity)."""
        if self.kind == "exact":
            return (self.m, self.m)
        if self.kind == "infinite":
            return (float("inf"), float("inf"))
        return (self.m, float("inf"))

    def __str__(self):
        if self.kind == "exact":
            return str(self.m)
        if self.kind == "infinite":
            return "inf"
        return f">={self.m}"


def _mul_terms(a: Mapping, b: Mapping, cap: int | None) -> dict:
    out: dict = {}
    if not a or not b:
        return out
    bl = [(eb, cb, sum(eb)) for eb, cb in b.items()]
    for ea, ca in a.items():
        da = sum(ea)
        for eb, cb, db in bl:
            if cap is not None and da + db > cap:
                continue
            e = tuple([x + y for x, y in zip(ea, eb)])
            c = out.get(e)
            out[e] = ca * cb if c is None else c + ca * cb
    return {e: c for e, c in out.items() if c}


def _min_trunc(*truncs: int | None) -> int | None:
    known = [t for t in truncs if t is not None]
    return min(known) if known else None


class TruncatedSeries:
    """Sparse multivariate series over named, ordered variables.

    ``trunc=None`` marks an exact polynomial; otherwise every stored monomial
    has total degree at most ``trunc`` and higher coefficients are unknown.
    """

    __slots__ = ("variables", "_terms", "trunc", "_hash")

    def __init__(
        self,
        variables: Sequence[str],
        terms: Mapping[Monomial, Scalar] | None = None,
        trunc: int | None = None,
    ):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise SeriesError(f"duplicate variable names in {variables}")
        if trunc is not None and trunc < 0:
            raise TruncationError("truncation degree must be nonnegative")
        clean = {}
        nv = len(variables)
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nv or any(x < 0 for x in e):
                raise SeriesError(f"bad monomial {e} for variables {variables}")
            c = GaussianRational.coerce(c)
            if not c:
                continue
            if trunc is not None and sum(e) > trunc:
                continue
            clean[e] = c
        self._init(variables, clean, trunc)

    def _init(self, variables, terms, trunc):
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "_terms", terms)
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, variables, terms, trunc) -> TruncatedSeries:
        # trusted constructor: terms already clean and within trunc
        obj = object.__new__(cls)
        obj._init(variables, terms, trunc)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("TruncatedSeries is immutable")

    # construction helpers

    @classmethod
    def zero(cls, variables: Sequence[str]) -> TruncatedSeries:
        return cls._raw(tuple(variables), {}, None)

    @classmethod
    def constant(cls, c: Scalar, variables: Sequence[str]) -> TruncatedSeries:
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def one(cls, variables: Sequence[str]) -> TruncatedSeries:
        return cls.constant(1, variables)

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> TruncatedSeries:
        variables = tuple(variables)
        if name not in variables:
            raise SeriesError(f"unknown variable {name!r}")
        e = tuple(1 if v == name else 0 for v in variables)
        return cls._raw(variables, {e: ONE}, None)

    @classmethod
    def monomial(cls, exponents: Monomial, variables: Sequence[str], c: Scalar = 1) -> TruncatedSeries:
        return cls(variables, {tuple(exponents): c})

    # basic properties

    @property
    def exact(self) -> bool:
        return self.trunc is None

    @property
    def terms(self) -> Mapping[Monomial, GaussianRational]:
        return MappingProxyType(self._terms)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def is_zero(self) -> bool:
        """True when no known coefficient is nonzero (identically zero if exact)."""
        return not self._terms

    def degree(self) -> int | None:
        """Highest total degree of a stored term, None for the zero series."""
        if not self._terms:
            return None
        return max(sum(e) for e in self._terms)

    def degree_in(self, names: Iterable[str]) -> int:
        idx = [self._index(v) for v in names]
        return max((sum(e[i] for i in idx) for e in self._terms), default=0)

    def _index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise SeriesError(f"variable {name!r} not in {self.variables}") from None

    def _check_same(self, other: TruncatedSeries):
        if self.variables != other.variables:
            raise SeriesError(
                f"variable lists differ: {self.variables} vs {other.variables}"
            )

    def _lift(self, other) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            self._check_same(other)
            return other
        return TruncatedSeries.constant(GaussianRational.coerce(other), self.variables)

    # ring operations

    def __add__(self, other):
        other = self._lift(other)
        trunc = _min_trunc(self.trunc, other.trunc)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e)
            out[e] = c if s is None else s + c
        if trunc is None:
            terms = {e: c for e, c in out.items() if c}
        else:
            terms = {e: c for e, c in out.items() if c and sum(e) <= trunc}
        return TruncatedSeries._raw(self.variables, terms, trunc)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries._raw(
            self.variables, {e: -c for e, c in self._terms.items()}, self.trunc
        )

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check_same(other)
        trunc = _min_trunc(self.trunc, other.trunc)
        return TruncatedSeries._raw(
            self.variables, _mul_terms(self._terms, other._terms, trunc), trunc
        )

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c: Scalar) -> TruncatedSeries:
        c = GaussianRational.coerce(c)
        if not c:
            return TruncatedSeries._raw(self.variables, {}, self.trunc)
        return TruncatedSeries._raw(
            self.variables, {e: v * c for e, v in self._terms.items()}, self.trunc
        )

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            raise SeriesError("series division is not supported; divide by a scalar")
        return self.scale(GaussianRational.coerce(other).inverse())

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise SeriesError("only nonnegative integer powers are supported")
        out = TruncatedSeries.one(self.variables)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    # calculus and structure

    def differentiate(self, var: str, times: int = 1) -> TruncatedSeries:
        if times < 1:
            raise SeriesError("times must be a positive integer")
        i = self._index(var)
        trunc = None
        if self.trunc is not None:
            trunc = self.trunc - times
            if trunc < 0:
                raise TruncationError(
                    f"differentiating {times}x exhausts truncation degree {self.trunc}"
                )
        out = {}
        for e, c in self._terms.items():
            k = e[i]
            if k < times:
                continue
            f = factorial(k) // factorial(k - times)
            ne = e[:i] + (k - times,) + e[i + 1 :]
            out[ne] = c * f
        return TruncatedSeries._raw(self.variables, out, trunc)

    def conjugate(self) -> TruncatedSeries:
        return TruncatedSeries._raw(
            self.variables,
            {e: c.conjugate() for e, c in self._terms.items()},
            self.trunc,
        )

    def order(self) -> OrderValue:
        if self._terms:
            return OrderValue.exact(min(sum(e) for e in self._terms))
        if self.trunc is None:
            return OrderValue.infinite()
        return OrderValue.at_least(self.trunc + 1)

    def coefficient(self, m: Monomial) -> GaussianRational:
        m = tuple(m)
        if len(m) != self.nvars:
            raise SeriesError(f"monomial {m} has wrong length for {self.variables}")
        if self.trunc is not None and sum(m) > self.trunc:
            raise TruncationError(
                f"coefficient of degree {sum(m)} unknown beyond truncation {self.trunc}"
            )
        return self._terms.get(m, ZERO)

    def constant_term(self) -> GaussianRational:
        return self._terms.get((0,) * self.nvars, ZERO)

    def truncate(self, degree: int) -> TruncatedSeries:
        """Forget every coefficient above ``degree`` (result is not exact)."""
        trunc = degree if self.trunc is None else min(degree, self.trunc)
        return TruncatedSeries._raw(
            self.variables,
            {e: c for e, c in self._terms.items() if sum(e) <= trunc},
            trunc,
        )

    def homogeneous_part(self, degree: int) -> TruncatedSeries:
        return TruncatedSeries._raw(
            self.variables,
            {e: c for e, c in self._terms.items() if sum(e) == degree},
            None,
        )

    def set_zero(self, names: Iterable[str]) -> TruncatedSeries:
        """Evaluate the named variables at 0 and drop them from the variable list."""
        names = set(names)
        for v in names:
            self._index(v)
        keep = [i for i, v in enumerate(self.variables) if v not in names]
        gone = [i for i, v in enumerate(self.variables) if v in names]
        out = {}
        for e, c in self._terms.items():
            if any(e[i] for i in gone):
                continue
            out[tuple(e[i] for i in keep)] = c
        return TruncatedSeries._raw(
            tuple(self.variables[i] for i in keep), out, self.trunc
        )

    def embed(self, variables: Sequence[str]) -> TruncatedSeries:
        """Explicitly view the series inside a larger ordered variable list."""
        variables = tuple(variables)
        pos = []
        for v in self.variables:
            if v not in variables:
                raise SeriesError(f"cannot embed: {v!r} missing from {variables}")
            pos.append(variables.index(v))
        nv = len(variables)
        out = {}
        for e, c in self._terms.items():
            ne = [0] * nv
            for p, k in zip(pos, e):
                ne[p] = k
            out[tuple(ne)] = c
        return TruncatedSeries._raw(variables, out, self.trunc)

    def rename(
        self, mapping: Mapping[str, str], variables: Sequence[str] | None = None
    ) -> TruncatedSeries:
        """Rename variables (a permutation is allowed), optionally re-ordering the result."""
        renamed = tuple(mapping.get(v, v) for v in self.variables)
        if len(set(renamed)) != len(renamed):
            raise SeriesError("rename would merge variables")
        s = TruncatedSeries._raw(renamed, self._terms, self.trunc)
        return s if variables is None else s.embed(variables)

    def substitute(
        self,
        assignment: Mapping[str, TruncatedSeries],
        variables: Sequence[str] | None = None,
    ) -> TruncatedSeries:
        """Formal composition: replace each variable by a series.

        Every variable must be assigned; all assigned series share one variable
        list (``variables`` must be given only when ``self`` has no variables).
        A truncated ``self`` requires assigned series without constant term.
        """
        missing = [v for v in self.variables if v not in assignment]
        if missing:
            raise SeriesError(f"missing assignment for {missing}")
        targets = [assignment[v] for v in self.variables]
        if targets:
            common = targets[0].variables
            for t in targets:
                if t.variables != common:
                    raise SeriesError("assigned series must share one variable list")
            if variables is not None and tuple(variables) != common:
                raise SeriesError("explicit variables disagree with assignment")
        elif variables is None:
            raise SeriesError("constant series needs an explicit target variable list")
        else:
            common = tuple(variables)

        used = sorted({i for e in self._terms for i, k in enumerate(e) if k})
        if self.trunc is not None:
            for i in used:
                if targets[i].constant_term():
                    raise SeriesError(
                        f"cannot substitute series with constant term for "
                        f"{self.variables[i]!r} into a truncated series"
                    )
        cap = _min_trunc(self.trunc, *(targets[i].trunc for i in used))

        powers: dict[int, list[dict]] = {
            i: [{(0,) * len(common): ONE}, dict(targets[i]._terms)] for i in used
        }

        def power(i, k):
            lst = powers[i]
            while len(lst) <= k:
                lst.append(_mul_terms(lst[-1], lst[1], cap))
            return lst[k]

        out: dict = {}
        for e in sorted(self._terms):
            c = self._terms[e]
            acc = {(0,) * len(common): c}
            for i, k in enumerate(e):
                if k:
                    acc = _mul_terms(acc, power(i, k), cap)
                    if not acc:
                        break
            for m, v in acc.items():
                s = out.get(m)
                out[m] = v if s is None else s + v
        terms = {
            m: v for m, v in out.items() if v and (cap is None or sum(m) <= cap)
        }
        return TruncatedSeries._raw(common, terms, cap)

    def evaluate(self, point: Mapping[str, Scalar]) -> GaussianRational:
        """Evaluate the known (stored) part at a point."""
        vals = [GaussianRational.coerce(point[v]) for v in self.variables]
        total = ZERO
        for e, c in self._terms.items():
            t = c
            for x, k in zip(vals, e):
                if k:
                    t = t * x**k
            total = total + t
        return total

    def first_nonzero_monomial(self) -> Monomial | None:
        """Deterministic witness: lowest-degree stored monomial, ties broken lexicographically."""
        if not self._terms:
            return None
        return min(self._terms, key=lambda e: (sum(e), tuple(-x for x in e)))

    # comparison and display

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.trunc == other.trunc
            and self._terms == other._terms
        )

    def equal_up_to(self, other: TruncatedSeries, degree: int | None = None) -> bool:
        """Coefficient equality on the common known range (optionally capped at ``degree``)."""
        self._check_same(other)
        cap = _min_trunc(self.trunc, other.trunc, degree)
        return (self - other).truncate(cap).is_zero() if cap is not None else (
            self - other
        ).is_zero()

    def __hash__(self):
        if self._hash is None:
            h = hash((self.variables, self.trunc, frozenset(self._terms.items())))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def sorted_terms(self) -> list[tuple[Monomial, GaussianRational]]:
        return sorted(
            self._terms.items(), key=lambda t: (sum(t[0]), tuple(-x for x in t[0]))
        )

    def to_expr(self) -> str:
        """Render in the expression grammar; parses back to the same polynomial."""
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}"
                for v, k in zip(self.variables, e)
                if k
            )
            neg = (not c.im and c.re < 0) or (not c.re and c.im < 0)
            mag = -c if neg else c
            if not mono:
                body = format_coefficient(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_coefficient(mag)}*{mono}"
            parts.append(("-" if neg else "+", body))
        head_sign, head = parts[0]
        text = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self):
        if self.trunc is None:
            return self.to_expr()
        return f"{self.to_expr()} + O({self.trunc + 1})"

    def __repr__(self):
        return f"TruncatedSeries({self.variables}, {str(self)!r})"

    def to_json(self) -> dict:
        return {"expr": self.to_expr(), "trunc": self.trunc}


def variable_series(variables: Sequence[str]) -> dict[str, TruncatedSeries]:
    """Map each name to the coordinate series on ``variables``."""
    return {v: TruncatedSeries.var(v, variables) for v in variables}


def order_of_vector(series: Iterable[TruncatedSeries]) -> OrderValue:
    """Order of a vector of series: the minimum componentwise order."""
    orders = [s.order() for s in series]
    return min_order(orders)


def min_order(orders: Iterable[OrderValue]) -> OrderValue:
    """Infimum of order values, keeping truncation uncertainty honest."""
    best = None
    at_least = None
    for o in orders:
        if o.is_exact:
            best = o.m if best is None else min(best, o.m)
        elif o.is_at_least:
            at_least = o.m if at_least is None else min(at_least, o.m)
    if best is not None and (at_least is None or at_least >= best):
        return OrderValue.exact(best)
    if at_least is not None:
        return OrderValue.at_least(at_least)
    return OrderValue.infinite()
