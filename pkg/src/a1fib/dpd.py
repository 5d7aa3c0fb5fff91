"""DPD presentations of G_m-surfaces and their Makar-Limanov class."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import ToolkitError
from .formal_series import RATIONALS, format_scalar, parse_scalar

KINDS = ("elliptic", "parabolic", "hyperbolic")
CURVES = ("P1", "A1", "rational", "nonrational")


def _key(p) -> str:
    return format_scalar(p)


@dataclass(frozen=True)
class QDivisor:
    """Finite Q-linear combination of points; zero coefficients are dropped."""

    support: tuple[tuple[object, Fraction], ...] = ()

    def __post_init__(self):
        merged: dict = {}
        points: dict = {}
        for p, c in self.support:
            k = _key(p)
            points.setdefault(k, p)
            merged[k] = merged.get(k, Fraction(0)) + Fraction(c)
        items = tuple(sorted(((points[k], c) for k, c in merged.items() if c != 0), key=lambda pc: _key(pc[0])))
        object.__setattr__(self, "support", items)

    @classmethod
    def of(cls, pairs: Iterable) -> "QDivisor":
        return cls(tuple(pairs))

    def coefficient(self, p) -> Fraction:
        k = _key(p)
        return next((c for q, c in self.support if _key(q) == k), Fraction(0))

    def points(self) -> set[str]:
        return {_key(p) for p, _ in self.support}

    def degree(self) -> Fraction:
        return sum((c for _, c in self.support), Fraction(0))

    def floor(self) -> "QDivisor":
        return QDivisor(tuple((p, Fraction(math.floor(c))) for p, c in self.support))

    def fractional(self) -> "QDivisor":
        return QDivisor(tuple((p, c - math.floor(c)) for p, c in self.support))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for _, c in self.support)

    def __add__(self, other: "QDivisor") -> "QDivisor":
        return QDivisor(self.support + other.support)

    def __neg__(self) -> "QDivisor":
        return QDivisor(tuple((p, -c) for p, c in self.support))

    def __sub__(self, other: "QDivisor") -> "QDivisor":
        return self + (-other)

    def translate(self, shift) -> "QDivisor":
        return QDivisor(tuple((p + shift, c) for p, c in self.support))

    def to_json(self) -> list:
        return [[_key(p), format_scalar(c)] for p, c in self.support]

    @classmethod
    def from_json(cls, data, field=RATIONALS) -> "QDivisor":
        try:
            return cls(tuple((parse_scalar(str(p), field, allow_inf=True), Fraction(str(c))) for p, c in data))
        except (TypeError, ValueError) as exc:
            raise ToolkitError("bad_input", f"bad divisor {data!r}: {exc}") from exc


@dataclass(frozen=True)
class DpdPresentation:
    kind: str
    D: QDivisor = QDivisor()
    Dplus: QDivisor = QDivisor()
    Dminus: QDivisor = QDivisor()
    curve: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ToolkitError("bad_input", f"unknown kind {self.kind!r}")
        if not self.curve:
            object.__setattr__(self, "curve", "P1" if self.kind == "elliptic" else "A1")
        if self.curve not in CURVES:
            raise ToolkitError("bad_input", f"unknown curve {self.curve!r}")
        if self.kind == "elliptic":
            if self.curve == "A1":
                raise ToolkitError("bad_input", "elliptic presentations live on a projective curve")
            if self.D.degree() <= 0:
                raise ToolkitError("bad_input", "D must have positive degree")
        if self.kind == "hyperbolic":
            total = self.Dplus + self.Dminus
            if any(c > 0 for _, c in total.support):
                raise ToolkitError("bad_input", "D+ + D- must be nonpositive")

    def to_json(self) -> dict:
        out = {"kind": self.kind, "curve": self.curve}
        if self.kind == "hyperbolic":
            out.update(Dplus=self.Dplus.to_json(), Dminus=self.Dminus.to_json())
        else:
            out["D"] = self.D.to_json()
        return out

    @classmethod
    def from_json(cls, data: Mapping, field=RATIONALS) -> "DpdPresentation":
        kind = data.get("kind")
        divs = {k: QDivisor.from_json(data.get(k, []), field) for k in ("D", "Dplus", "Dminus")}
        return cls(kind, divs["D"], divs["Dplus"], divs["Dminus"], data.get("curve", ""))

    def translated(self, shift) -> "DpdPresentation":
        return DpdPresentation(self.kind, self.D.translate(shift), self.Dplus.translate(shift),
                               self.Dminus.translate(shift), self.curve)

    def swapped(self) -> "DpdPresentation":
        if self.kind != "hyperbolic":
            raise ToolkitError("wrong_kind", self.kind)
        return DpdPresentation(self.kind, self.D, self.Dminus, self.Dplus, self.curve)


def _frac_points(d: QDivisor) -> int:
    return len(d.fractional().points())


def classify_ml(p: DpdPresentation) -> str:
    if p.kind == "elliptic":
        return "ML0" if p.curve == "P1" and _frac_points(p.D) <= 2 else "ML2"
    if p.kind == "parabolic":
        if p.curve == "A1" and _frac_points(p.D) <= 1:
            return "ML0"
        if p.curve == "nonrational" or _frac_points(p.D) >= 2:
            return "ML1"
        return "ML2"
    if p.curve != "A1":
        return "ML2"
    small = [_frac_points(p.Dplus) <= 1, _frac_points(p.Dminus) <= 1]
    return "ML0" if all(small) else "ML1" if any(small) else "ML2"


def is_toric(p: DpdPresentation) -> bool:
    """Toric test for hyperbolic presentations over the affine line.

    After a principal gauge move the pair must read ``(D0 + {D+}, -D0 + {D-})``
    with everything supported at one point.  On the affine line this amounts
    to ``{D+}``, ``{D-}`` and ``floor(D+) + floor(D-)`` sharing one point.
    """
    if p.kind != "hyperbolic":
        raise ToolkitError("wrong_kind", p.kind)
    if p.curve != "A1":
        return False
    pts = p.Dplus.fractional().points() | p.Dminus.fractional().points()
    pts |= (p.Dplus.floor() + p.Dminus.floor()).points()
    return len(pts) <= 1


def _point(p, field=RATIONALS):
    return parse_scalar(p, field) if isinstance(p, str) else Fraction(p)


def danilov_gizatullin(d: int, r: int, p0=0, p1=1) -> DpdPresentation:
    if not (isinstance(d, int) and isinstance(r, int) and d >= 2 and 1 <= r <= d - 1):
        raise ToolkitError("bad_params", {"d": d, "r": r})
    p0, p1 = _point(p0), _point(p1)
    if p0 == p1:
        raise ToolkitError("bad_params", "p0 and p1 must differ")
    return DpdPresentation(
        "hyperbolic",
        Dplus=QDivisor.of([(p0, Fraction(-1, r))]),
        Dminus=QDivisor.of([(p1, Fraction(-1, d - r))]),
    )


def special_gizatullin(d: int, r: int, points, p_plus=0, p_minus=1) -> DpdPresentation:
    """Special Gizatullin presentation with reduced divisor ``sum [p_i]``."""
    if not (isinstance(d, int) and isinstance(r, int) and d >= 3 and 1 <= r <= d - 1):
        raise ToolkitError("bad_params", {"d": d, "r": r})
    pts = [_point(p) for p in points]
    if not pts or len(set(pts)) != len(pts):
        raise ToolkitError("bad_params", "need distinct extra points")
    pp, pm = _point(p_plus), _point(p_minus)
    used = set()
    if r != 1:
        used.add(pp)
    if r != d - 1:
        used.add(pm)
    if r != 1 and r != d - 1 and pp == pm:
        raise ToolkitError("bad_params", "p+ and p- must differ")
    if used & set(pts):
        raise ToolkitError("bad_params", "extra points must avoid p+ and p-")
    plus = [] if r == 1 else [(pp, Fraction(-1, r))]
    minus = [] if r == d - 1 else [(pm, Fraction(-1, d - r))]
    minus += [(p, Fraction(-1)) for p in pts]
    return DpdPresentation("hyperbolic", Dplus=QDivisor.of(plus), Dminus=QDivisor.of(minus))
