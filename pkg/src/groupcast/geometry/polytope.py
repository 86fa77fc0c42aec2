"""Rational linear inequalities and H-polytopes over named variables."""
from __future__ import annotations

import json
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence, Union

Number = Union[int, Fraction, str]


class GeometryError(ValueError):
    pass


def as_fraction(x) -> Fraction:
    """Exact conversion; floats are rejected to keep everything rational."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass a Fraction or 'p/q' string")
    # gmpy2.mpq and friends
    try:
        return Fraction(int(x.numerator), int(x.denominator))
    except AttributeError:
        raise TypeError(f"cannot convert {x!r} to a rational") from None


def fraction_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class LinearInequality:
    """``sum_v coeffs[v] * v <= bound``, stored in canonical form.

    Coefficients are scaled to coprime integers (a positive scaling, so the
    half-space is unchanged) and zero coefficients are dropped.  Two rows
    describing the same half-space therefore compare equal.  ``label`` is
    informational and ignored by ``==``.
    """

    __slots__ = ("coeffs", "bound", "label")

    def __init__(self, coeffs: Mapping[str, Number], bound: Number,
                 label: str = ""):
        items = [(v, as_fraction(c)) for v, c in coeffs.items()]
        items = [(v, c) for v, c in items if c != 0]
        b = as_fraction(bound)
        if items:
            den = lcm(*(c.denominator for _, c in items))
            ints = [(v, int(c * den)) for v, c in items]
            g = 0
            for _, c in ints:
                g = gcd(g, c)
            scale = Fraction(den, g)
            items = [(v, Fraction(c // g)) for v, c in ints]
            b = b * scale
        else:
            # 0 <= b: keep only the sign of b
            b = Fraction((b > 0) - (b < 0))
        self.coeffs: tuple[tuple[str, Fraction], ...] = tuple(sorted(items))
        self.bound: Fraction = b
        self.label = label

    # -- access -----------------------------------------------------------
    def coefficient(self, var: str) -> Fraction:
        for v, c in self.coeffs:
            if v == var:
                return c
        return Fraction(0)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    def lhs(self, point: Mapping[str, Fraction]) -> Fraction:
        return sum((c * point.get(v, 0) for v, c in self.coeffs), Fraction(0))

    def satisfied_by(self, point: Mapping[str, Fraction]) -> bool:
        return self.lhs(point) <= self.bound

    def is_trivial(self) -> bool:
        """``0 <= b`` with ``b >= 0``: satisfied everywhere."""
        return not self.coeffs and self.bound >= 0

    def is_contradiction(self) -> bool:
        return not self.coeffs and self.bound < 0

    def direction(self) -> tuple[tuple[str, Fraction], ...]:
        return self.coeffs

    def relabel(self, label: str) -> "LinearInequality":
        out = object.__new__(LinearInequality)
        out.coeffs, out.bound, out.label = self.coeffs, self.bound, label
        return out

    def rename(self, mapping: Mapping[str, str]) -> "LinearInequality":
        return LinearInequality({mapping.get(v, v): c for v, c in self.coeffs},
                                self.bound, self.label)

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, LinearInequality):
            return NotImplemented
        return self.coeffs == other.coeffs and self.bound == other.bound

    def __hash__(self):
        return hash((self.coeffs, self.bound))

    def __repr__(self):
        return f"LinearInequality({self})"

    def __str__(self):
        if not self.coeffs:
            lhs = "0"
        else:
            parts = []
            for v, c in self.coeffs:
                sign = "-" if c < 0 else "+"
                mag = abs(c)
                term = v if mag == 1 else f"{fraction_str(mag)}*{v}"
                parts.append(f"{sign} {term}")
            lhs = " ".join(parts)
            lhs = lhs[2:] if lhs.startswith("+ ") else "-" + lhs[2:]
        return f"{lhs} <= {fraction_str(self.bound)}"

    # -- JSON -------------------------------------------------------------
    def to_json(self) -> dict:
        out = {"coeffs": {v: fraction_str(c) for v, c in self.coeffs},
               "rhs": fraction_str(self.bound)}
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "LinearInequality":
        return cls({v: Fraction(str(c)) for v, c in obj["coeffs"].items()},
                   Fraction(str(obj["rhs"])), obj.get("label", ""))


def nonnegativity(variables: Iterable[str]) -> list[LinearInequality]:
    return [LinearInequality({v: -1}, 0, label=f"{v} >= 0") for v in variables]


class HPolytope:
    """Finite system of rational inequalities over ordered variables.

    Nonnegativity is never implicit: a variable is sign constrained only if
    a row says so.  An empty row list is the whole space.
    """

    __slots__ = ("variables", "rows")

    def __init__(self, variables: Sequence[str],
                 rows: Iterable[LinearInequality] = ()):
        self.variables: tuple[str, ...] = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise GeometryError("duplicate variable names")
        self.rows: tuple[LinearInequality, ...] = tuple(rows)
        declared = set(self.variables)
        for r in self.rows:
            extra = set(r.variables) - declared
            if extra:
                raise GeometryError(
                    f"row {r} uses undeclared variables {sorted(extra)}")

    @property
    def dim(self) -> int:
        return len(self.variables)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __repr__(self):
        return f"HPolytope({len(self.variables)} vars, {len(self.rows)} rows)"

    def __str__(self):
        return "\n".join(str(r) for r in self.rows)

    def with_rows(self, rows: Iterable[LinearInequality]) -> "HPolytope":
        return HPolytope(self.variables, rows)

    def add_rows(self, rows: Iterable[LinearInequality]) -> "HPolytope":
        return HPolytope(self.variables, self.rows + tuple(rows))

    def contains_point(self, point: Mapping[str, Fraction]) -> bool:
        return all(r.satisfied_by(point) for r in self.rows)

    def violated_rows(self, point: Mapping[str, Fraction]) -> list[LinearInequality]:
        return [r for r in self.rows if not r.satisfied_by(point)]

    def dedup(self) -> "HPolytope":
        """Drop trivial rows and keep the tightest bound per direction."""
        best: dict = {}
        order = []
        contradiction = None
        for r in self.rows:
            if r.is_trivial():
                continue
            if r.is_contradiction():
                contradiction = r
                continue
            key = r.coeffs
            if key not in best:
                best[key] = r
                order.append(key)
            elif r.bound < best[key].bound:
                best[key] = r
        rows = [best[k] for k in order]
        if contradiction is not None:
            rows.append(contradiction)
        return self.with_rows(rows)

    def substitute(self, values: Mapping[str, Number]) -> "HPolytope":
        """Fix some variables to constants and drop them."""
        fixed = {v: as_fraction(x) for v, x in values.items()}
        unknown = set(fixed) - set(self.variables)
        if unknown:
            raise GeometryError(f"unknown variables {sorted(unknown)}")
        rows = []
        for r in self.rows:
            shift = sum((c * fixed[v] for v, c in r.coeffs if v in fixed),
                        Fraction(0))
            rows.append(LinearInequality(
                {v: c for v, c in r.coeffs if v not in fixed},
                r.bound - shift, r.label))
        return HPolytope([v for v in self.variables if v not in fixed], rows)

    def rename(self, mapping: Mapping[str, str]) -> "HPolytope":
        return HPolytope([mapping.get(v, v) for v in self.variables],
                         [r.rename(mapping) for r in self.rows])

    def reorder(self, variables: Sequence[str]) -> "HPolytope":
        if set(variables) != set(self.variables):
            raise GeometryError("reorder needs the same variable set")
        return HPolytope(variables, self.rows)

    # -- JSON -------------------------------------------------------------
    def to_json(self) -> dict:
        return {"variables": list(self.variables),
                "rows": [r.to_json() for r in self.rows]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "HPolytope":
        try:
            return cls(obj["variables"],
                       [LinearInequality.from_json(r) for r in obj["rows"]])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise GeometryError(f"malformed H-representation: {exc}") from exc

    def dumps(self, **kw) -> str:
        return json.dumps(self.to_json(), **kw)

    @classmethod
    def loads(cls, text: str) -> "HPolytope":
        return cls.from_json(json.loads(text))


def vrep_to_json(points: Iterable[Sequence[Fraction]]) -> list[list[str]]:
    return [[fraction_str(x) for x in p] for p in points]


def vrep_from_json(obj) -> list[tuple[Fraction, ...]]:
    return [tuple(Fraction(str(x)) for x in p) for p in obj]
