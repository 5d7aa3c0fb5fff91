"""Exact scalars and truncated power series.

Two field instances ship here.  ``RATIONALS`` works with plain
:class:`fractions.Fraction` values.  :class:`RadicalTower` grows on demand by
adjoining generators ``r`` with ``r**k == a`` where ``a`` lives in the part of
the tower built so far.  Tower elements are sparse polynomials in the
generators reduced by their defining relations, so equality is syntactic and
exact.

Series are pairs ``(coeffs, prec)``: the coefficients are known modulo
``t**prec``; ``prec is None`` marks an exact polynomial.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import ExtensionRequired, ToolkitError

INF = "inf"


def iroot(n: int, k: int) -> tuple[int, bool]:
    """Floor of the k-th root of ``n >= 0`` and whether it is exact."""
    if n < 2:
        return n, True
    r = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    return r, r**k == n


def _rational_root(c: Fraction, k: int) -> Fraction | None:
    if c < 0:
        if k % 2 == 0:
            return None
        r = _rational_root(-c, k)
        return None if r is None else -r
    p, ep = iroot(c.numerator, k)
    q, eq = iroot(c.denominator, k)
    return Fraction(p, q) if ep and eq else None


def _power_free(n: int, k: int) -> tuple[int, int]:
    """Split ``n > 0`` as ``m**k * rest`` by trial division."""
    m, rest, p = 1, n, 2
    while p**k <= rest and p < 100_000:
        while rest % p**k == 0:
            rest //= p**k
            m *= p
        p += 1 if p == 2 else 2
    r, exact = iroot(rest, k)
    if exact:
        return m * r, 1
    return m, rest


class Rationals:
    """The field Q."""

    name = "rational"

    def coerce(self, x):
        if isinstance(x, Rad):
            raise ToolkitError("bad_scalar", "radical element in rational field")
        return Fraction(x)

    def kth_root(self, c, k: int):
        c = Fraction(c)
        r = _rational_root(c, k)
        if r is None:
            raise ExtensionRequired(k, format_scalar(c))
        return r

    def roots_of_unity(self, n: int) -> list:
        return [Fraction(1), Fraction(-1)] if n % 2 == 0 else [Fraction(1)]


RATIONALS = Rationals()


@dataclass(frozen=True)
class _Gen:
    k: int
    radicand: dict  # sparse element in the generators created before this one
    label: str


def _trim_mono(m: tuple) -> tuple:
    end = len(m)
    while end and m[end - 1] == 0:
        end -= 1
    return m[:end]


def _add_mono(a: tuple, b: tuple) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    return tuple(x + b[i] if i < len(b) else x for i, x in enumerate(a))


class RadicalTower:
    """Q with radicals adjoined lazily, one generator per new root.

    Elements are sparse maps ``{exponent tuple: Fraction}``.  Position ``i`` of
    an exponent tuple belongs to generator ``i`` and stays below its degree;
    trailing zeros are dropped so the representation is canonical.
    """

    name = "radical"

    def __init__(self):
        self.gens: list[_Gen] = []
        self._cache: dict = {}

    # raw sparse arithmetic -------------------------------------------
    def _acc(self, out: dict, mono: tuple, c) -> None:
        """Add ``c * mono`` to ``out``, rewriting ``r_j**k`` by its radicand."""
        for j in range(len(mono) - 1, -1, -1):
            g = self.gens[j]
            if mono[j] >= g.k:
                low = mono[:j] + (mono[j] - g.k,) + mono[j + 1:]
                for mr, cr in g.radicand.items():
                    self._acc(out, _add_mono(low, mr), c * cr)
                return
        mono = _trim_mono(mono)
        v = out.get(mono, 0) + c
        if v:
            out[mono] = v
        else:
            out.pop(mono, None)

    def add(self, x: dict, y: dict) -> dict:
        out = dict(x)
        for m, c in y.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                del out[m]
        return out

    def neg(self, x: dict) -> dict:
        return {m: -c for m, c in x.items()}

    def mul(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for ma, ca in x.items():
            for mb, cb in y.items():
                self._acc(out, _add_mono(ma, mb), ca * cb)
        return out

    def inv(self, x: dict) -> dict:
        top = max((len(m) for m in x), default=0)
        if top == 0:
            if not x:
                raise ToolkitError("not_invertible", "zero")
            return {(): 1 / x[()]}
        # x = sum_i c_i r^i over the subfield generated by the earlier radicals
        j = top - 1
        k = self.gens[j].k
        one = {(): Fraction(1)}

        def power(i):
            return {(0,) * j + (i,): Fraction(1)} if i else one

        def split(e):
            parts = [{} for _ in range(k)]
            for m, c in e.items():
                parts[m[j] if len(m) > j else 0][_trim_mono(m[:j])] = c
            return parts

        cols = [split(self.mul(x, power(i))) for i in range(k)]
        rows = [[cols[c][i] for c in range(k)] + [one if i == 0 else {}] for i in range(k)]
        for c in range(k):
            piv = next((r for r in range(c, k) if rows[r][c]), None)
            if piv is None:
                raise ToolkitError("not_invertible", "zero divisor in radical tower")
            rows[c], rows[piv] = rows[piv], rows[c]
            ip = self.inv(rows[c][c])
            rows[c] = [self.mul(ip, v) for v in rows[c]]
            for r in range(k):
                if r != c and rows[r][c]:
                    f = self.neg(rows[r][c])
                    rows[r] = [self.add(a, self.mul(f, b)) for a, b in zip(rows[r], rows[c])]
        out: dict = {}
        for i in range(k):
            for m, c in rows[i][k].items():
                self._acc(out, m + (0,) * (j - len(m)) + (i,), c)
        return out

    def wrap(self, x: dict):
        if not x:
            return Fraction(0)
        if len(x) == 1 and () in x:
            return x[()]
        return Rad(self, x)

    def unwrap(self, v) -> dict:
        if isinstance(v, Rad):
            if v.tower is not self:
                raise ToolkitError("bad_scalar", "element of a different radical tower")
            return v.data
        v = Fraction(v)
        return {(): v} if v else {}

    # field interface --------------------------------------------------
    def coerce(self, x):
        if isinstance(x, Rad):
            self.unwrap(x)
            return x
        return Fraction(x)

    def generator(self, k: int, radicand) -> "Rad":
        data = self.unwrap(radicand)
        key = (k, frozenset(data.items()))
        if key not in self._cache:
            label = f"rt({k},{format_scalar(radicand)})"
            top = len(self.gens)
            self.gens.append(_Gen(k, data, label))
            self._cache[key] = Rad(self, {(0,) * top + (1,): Fraction(1)})
        return self._cache[key]

    def kth_root(self, c, k: int):
        if k == 1:
            return self.coerce(c)
        if isinstance(c, Rad):
            self.unwrap(c)
            return self.generator(k, c)
        data = Fraction(c)
        r = _rational_root(data, k)
        if r is not None:
            return r
        # rt(k, b^e) = rt(k/e, b); avoids reducible relations such as r^4 = 4
        for e in range(k - 1, 1, -1):
            if k % e == 0:
                b = _rational_root(data, e)
                if b is not None:
                    return self.kth_root(b, k // e)
        # rt(k, p/q) = rt(k, p*q^(k-1)) / q, then pull out k-th powers
        n = data.numerator * data.denominator ** (k - 1)
        sign = 1
        if n < 0 and k % 2 == 1:
            sign, n = -1, -n
        m, rest = _power_free(abs(n), k)
        rest = rest if n > 0 else -rest
        return Fraction(sign * m, data.denominator) * self.generator(k, rest)

    def roots_of_unity(self, n: int) -> list:
        return RATIONALS.roots_of_unity(n)


class Rad:
    """An element of a :class:`RadicalTower` that is not rational."""

    __slots__ = ("tower", "data")

    def __init__(self, tower: RadicalTower, data: dict):
        self.tower, self.data = tower, data

    def _binary(self, other, op):
        try:
            od = self.tower.unwrap(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.tower.wrap(op(self.data, od))

    def __add__(self, other):
        return self._binary(other, self.tower.add)

    __radd__ = __add__

    def __neg__(self):
        return Rad(self.tower, self.tower.neg(self.data))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return self._binary(other, self.tower.mul)

    __rmul__ = __mul__

    def inverse(self):
        return self.tower.wrap(self.tower.inv(self.data))

    def __truediv__(self, other):
        if isinstance(other, Rad):
            return self * other.inverse()
        return self * (1 / Fraction(other))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out, base = Fraction(1), self
        while e:
            if e & 1:
                out = base * out
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Rad):
            return self.tower is other.tower and self.data == other.data
        if isinstance(other, (int, Fraction)):
            return False  # rational values never stay wrapped
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.data.items()))

    def __repr__(self):
        return format_scalar(self)


Scalar = Union[Fraction, Rad]


def format_scalar(x) -> str:
    if isinstance(x, Rad):
        t = x.tower
        parts = []
        width = len(t.gens)
        for mono, c in sorted(x.data.items(), key=lambda mc: mc[0] + (0,) * (width - len(mc[0]))):
            factors = []
            for i, e in enumerate(mono):
                if e:
                    g = t.gens[i].label
                    factors.append(g if e == 1 else f"{g}^{e}")
            if not factors:
                parts.append(format_scalar(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append("*".join([format_scalar(c)] + factors))
        return "+".join(parts).replace("+-", "-")
    if isinstance(x, str):
        if x == INF:
            return INF
        raise ToolkitError("bad_scalar", x)
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


_TOKEN = re.compile(r"\s*(rt\(|[-+*^(),]|\d+(?:\.\d+)?(?:/\d+)?)")


def parse_scalar(s, field=RATIONALS, allow_inf: bool = False):
    """Parse ``"3/4"``, ``"0.5"``, ``"rt(2,5)"``, and sums or products of those."""
    if isinstance(s, bool):
        raise ToolkitError("bad_scalar", repr(s))
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if isinstance(s, Rad):
        return field.coerce(s)
    if not isinstance(s, str):
        raise ToolkitError("bad_scalar", repr(s))
    if s.strip() == INF:
        if not allow_inf:
            raise ToolkitError("bad_scalar", "inf is only legal as a node marker")
        return INF
    toks, pos = [], 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            if not s[pos:].strip():
                break
            raise ToolkitError("bad_scalar", s)
        toks.append(m.group(1))
        pos = m.end()
    i = 0

    def peek():
        return toks[i] if i < len(toks) else None

    def take(expected=None):
        nonlocal i
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise ToolkitError("bad_scalar", s)
        i += 1
        return tok

    def expr():
        val = term()
        while peek() in ("+", "-"):
            val = val + term() if take() == "+" else val - term()
        return val

    def term():
        val = factor()
        while peek() == "*":
            take()
            val = val * factor()
        return val

    def factor():
        tok = take()
        if tok == "-":
            return -factor()
        if tok == "rt(":
            k = int(take())
            take(",")
            radicand = expr()
            take(")")
            if k < 1:
                raise ToolkitError("bad_scalar", s)
            base = field.kth_root(radicand, k)
        elif tok == "(":
            base = expr()
            take(")")
        elif tok[0].isdigit():
            base = Fraction(tok)
        else:
            raise ToolkitError("bad_scalar", s)
        if peek() == "^":
            take()
            base = base ** int(take())
        return base

    val = expr()
    if i != len(toks):
        raise ToolkitError("bad_scalar", s)
    return val


def field_for(name: str):
    if name == "rational":
        return RATIONALS
    if name == "radical":
        return RadicalTower()
    raise ToolkitError("bad_field", name)


# ---------------------------------------------------------------------------
# truncated series


def _min_prec(*ps):
    ps = [p for p in ps if p is not None and p != float("inf")]
    return int(min(ps)) if ps else None


def _exact(c):
    if isinstance(c, (Fraction, Rad)):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise ToolkitError("bad_scalar", f"inexact coefficient {c!r}")


def _trim(coeffs: Iterable, prec: int | None) -> tuple:
    c = [_exact(x) for x in coeffs]
    if prec is not None:
        del c[prec:]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Series:
    """A power series in t known modulo ``t**prec`` (exact when prec is None)."""

    coeffs: tuple
    prec: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs, self.prec))

    @classmethod
    def poly(cls, coeffs: Sequence) -> "Series":
        return cls(tuple(coeffs), None)

    @classmethod
    def monomial(cls, i: int, c=1, prec: int | None = None) -> "Series":
        return cls((0,) * i + (c,), prec)

    def __getitem__(self, i: int):
        if self.prec is not None and i >= self.prec:
            raise ToolkitError("beyond_truncation", i)
        return self.coeffs[i] if i < len(self.coeffs) else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self):
        """Least index with a nonzero coefficient; ``prec`` (or inf) for zero."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return self.prec if self.prec is not None else float("inf")

    def truncate(self, m: int) -> "Series":
        return Series(self.coeffs, _min_prec(self.prec, m))

    def __add__(self, other: "Series") -> "Series":
        n = max(len(self.coeffs), len(other.coeffs))
        return Series(tuple(_get(self, i) + _get(other, i) for i in range(n)), _min_prec(self.prec, other.prec))

    def __neg__(self) -> "Series":
        return Series(tuple(-c for c in self.coeffs), self.prec)

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def scale(self, c) -> "Series":
        return Series(tuple(c * a for a in self.coeffs), self.prec)

    def shift(self, k: int) -> "Series":
        """Multiply by t**k."""
        return Series((0,) * k + self.coeffs, None if self.prec is None else self.prec + k)

    def divide_t(self, k: int) -> "Series":
        """Exact division by t**k."""
        if any(c != 0 for c in self.coeffs[:k]) or (self.prec is not None and self.prec < k):
            raise ToolkitError("not_divisible", k)
        return Series(self.coeffs[k:], None if self.prec is None else self.prec - k)

    def __mul__(self, other: "Series") -> "Series":
        prec = _min_prec(
            None if self.prec is None else self.prec + other.valuation(),
            None if other.prec is None else other.prec + self.valuation(),
        )
        n = len(self.coeffs) + len(other.coeffs) - 1
        if prec is not None:
            n = min(n, prec)
        out = [0] * max(n, 0)
        for i, a in enumerate(self.coeffs):
            if i >= n:
                break
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if i + j >= n:
                    break
                if b != 0:
                    out[i + j] = out[i + j] + a * b
        return Series(tuple(out), prec)

    def __pow__(self, e: int) -> "Series":
        out = Series.poly((1,))
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def compose(self, g: "Series") -> "Series":
        """``self(g)`` for ``g`` with zero constant term."""
        if _get(g, 0) != 0:
            raise ToolkitError("bad_composition", "inner series has a nonzero constant term")
        vg = g.valuation()
        lead = next((i for i, c in enumerate(self.coeffs) if i >= 1 and c != 0), None)
        prec = _min_prec(
            None if self.prec is None else self.prec * vg,
            None if g.prec is None or lead is None else g.prec + (lead - 1) * vg,
        )
        out = Series((), prec)
        power = Series((1,), prec)
        for i, c in enumerate(self.coeffs):
            if prec is not None and i * vg >= prec:
                break
            if c != 0:
                out = out + power.scale(c)
            power = power * g
            if prec is not None:
                power = power.truncate(prec)
        return out

    def __call__(self, g: "Series") -> "Series":
        return self.compose(g)

    def reciprocal(self, order: int | None = None) -> "Series":
        m = _min_prec(self.prec, order)
        if m is None:
            raise ToolkitError("bad_input", "reciprocal of an exact series needs an order")
        u0 = _get(self, 0)
        if u0 == 0:
            raise ToolkitError("bad_input", "reciprocal of a non-unit")
        inv0 = 1 / u0
        out = [inv0]
        for n in range(1, m):
            acc = 0
            for j in range(1, min(n, len(self.coeffs) - 1) + 1):
                if self.coeffs[j] != 0:
                    acc = acc + self.coeffs[j] * out[n - j]
            out.append(-acc * inv0)
        return Series(tuple(out), m)

    def to_json(self) -> dict:
        return {"coeffs": [format_scalar(c) for c in self.coeffs], "prec": self.prec}


def _get(s: Series, i: int):
    return s.coeffs[i] if i < len(s.coeffs) else 0


def unit_root(u: Series, k: int, field=RATIONALS, order: int | None = None) -> Series:
    """A series ``v`` with ``v**k == u``; ``v[0]`` is the field's chosen root."""
    m = _min_prec(u.prec, order)
    if m is None:
        raise ToolkitError("bad_input", "unit_root of an exact series needs an order")
    u0 = _get(u, 0)
    if u0 == 0:
        raise ToolkitError("bad_input", "unit_root of a non-unit")
    v0 = field.kth_root(u0, k)
    inv0 = 1 / u0
    w = [_get(u, j) * inv0 for j in range(m)]
    # (1 + z)^(1/k) by the recurrence p_n = (1/n) sum_j ((1/k + 1) j - n) w_j p_(n-j)
    alpha = Fraction(1, k)
    p = [Fraction(1)]
    for n in range(1, m):
        acc = 0
        for j in range(1, n + 1):
            if w[j] != 0:
                acc = acc + ((alpha + 1) * j - n) * w[j] * p[n - j]
        p.append(acc * Fraction(1, n))
    return Series(tuple(v0 * c for c in p), m)


def reversion(s: Series, order: int | None = None) -> Series:
    """Compositional inverse of a series with valuation exactly 1."""
    m = _min_prec(s.prec, order)
    if m is None:
        raise ToolkitError("bad_input", "reversion of an exact series needs an order")
    s1 = _get(s, 1)
    if _get(s, 0) != 0 or s1 == 0:
        raise ToolkitError("bad_input", "reversion needs valuation 1")
    # Newton on g -> s(g) - t, doubling the number of correct terms each pass
    ds = Series(tuple(i * c for i, c in enumerate(s.coeffs))[1:], m - 1)
    g = Series.monomial(1, 1 / s1, 2)
    p = 2
    while p < m:
        p = min(2 * p, m)
        g = Series(g.coeffs, p)
        err = s.truncate(p).compose(g) - Series.monomial(1, 1, p)
        g = (g - err * ds.truncate(p).compose(g).reciprocal(p)).truncate(p)
    return Series(g.coeffs, m)


def poly_order(psi: Sequence) -> int | None:
    return next((i for i, c in enumerate(psi) if c != 0), None)


def solve_substitution(psi: Sequence, n: int, field=RATIONALS, order: int = 8) -> tuple[Series, int]:
    """Find ``t(s)`` of order one with ``t(s)**n * psi(t(s)) == s**(n+m)``.

    ``m`` is the order of ``psi``.  The result is exact modulo ``s**order``.
    """
    m = poly_order(psi)
    if m is None:
        raise ToolkitError("bad_input", "psi must be nonzero")
    if m == 0:
        raise ToolkitError("bad_input", "psi must vanish at t = 0")
    unit = Series.poly(psi).divide_t(m)
    v = unit_root(unit, n + m, field, order)
    return reversion(v.shift(1), order), n + m
