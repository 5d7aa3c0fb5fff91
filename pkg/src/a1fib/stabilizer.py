"""Stabilizers of Puiseux arc spaces and the automorphism-group report.

An automorphism of the local ruling acts by ``(x, y) -> (a x, Q(x) y + P(x))``
with ``Q(x) = b0 + b1 x + ...`` and ``P(x) = c0 + c1 x + ...``.  The symbol
``alpha_k`` is an ``n_k``-th root of ``a`` attached to the k-th space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import ToolkitError
from .fiber_tower import FiberModel, is_rooted_chain, is_linear
from .formal_series import format_scalar
from .puiseux import PuiseuxSpace, pui_of_center, split_reg_sing

VERSION = "1"


# ---------------------------------------------------------------------------
# sparse multivariate polynomials


def _var_key(name: str):
    head = name.rstrip("0123456789")
    tail = name[len(head):]
    return ({"a": 0, "b": 1, "c": 2, "alpha": 3}.get(head, 4), head, int(tail) if tail else -1)


class Poly:
    """Polynomial as ``{monomial: coefficient}``; a monomial is a sorted tuple of (var, exp)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def var(cls, name: str, exp: int = 1, coeff=1) -> "Poly":
        return cls({((name, exp),) if exp else (): Fraction(coeff) if isinstance(coeff, int) else coeff})

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): Fraction(c) if isinstance(c, int) else c})

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly({m: c * other for m, c in self.terms.items()})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                exps = dict(m1)
                for v, e in m2:
                    exps[v] = exps.get(v, 0) + e
                m = tuple(sorted(exps.items(), key=lambda ve: _var_key(ve[0])))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> set[str]:
        return {v for m in self.terms for v, _ in m}

    def evaluate(self, values: Mapping[str, object]):
        total = 0
        for m, c in self.terms.items():
            term = c
            for v, e in m:
                term = term * values[v] ** e
            total = total + term
        return total

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (-sum(e for _, e in m), [_var_key(v) + (e,) for v, e in m])):
            c = self.terms[m]
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            cs = format_scalar(c)
            if "+" in cs[1:] or "-" in cs[1:]:
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def _b(j: int) -> Poly:
    return Poly.var(f"b{j}")


# ---------------------------------------------------------------------------
# constraint systems


@dataclass(frozen=True)
class ConstraintSystem:
    N: int
    equations: tuple[Poly, ...]  # each means poly == 0
    roots: tuple[tuple[str, int], ...] = ()  # (alpha name, n) with alpha^n = a

    def all_equations(self) -> list[Poly]:
        return list(self.equations) + [Poly.var(al, n) - Poly.var("a") for al, n in self.roots]

    def identity(self) -> dict:
        vals = {"a": Fraction(1)}
        vals.update({al: Fraction(1) for al, _ in self.roots})
        for j in range(self.N):
            vals[f"b{j}"] = Fraction(1 if j == 0 else 0)
            vals[f"c{j}"] = Fraction(0)
        return vals

    def satisfied_by(self, values: Mapping) -> bool:
        return all(eq.evaluate(values) == 0 for eq in self.all_equations())

    def strings(self) -> list[str]:
        return [f"{eq} = 0" for eq in self.all_equations()]

    def eliminated(self) -> list[str]:
        """Equations with every ``alpha`` removed where the shape allows.

        An equation ``s*b0 = r*alpha^e`` combined with ``alpha^n = a`` becomes
        the monomial relation obtained from the torus lattice.
        """
        free, tied = [], []
        for eq in self.equations:
            (tied if any(v.startswith("alpha") for v in eq.variables()) else free).append(eq)
        out = [_relation_string(eq) for eq in free]
        rows = []
        for eq in tied:
            mono = _binomial_b0(eq)
            if mono is None:
                out.append(f"{eq} = 0")
            else:
                rows.append(mono)
        if rows:
            names = [al for al, _ in self.roots]
            gens = [_exponent_row(r, names) for r in rows]
            gens += [_root_row(al, n, names) for al, n in self.roots]
            for u, v in _project(gens, len(names)):
                out.append(_monomial_relation(u, v))
        return out


def _relation_string(eq: Poly) -> str:
    lhs = Poly({m: c for m, c in eq.terms.items() if any(v.startswith("c") for v, _ in m)})
    if lhs.is_zero() or len(lhs.terms) != 1:
        return f"{eq} = 0"
    (m, c), = lhs.terms.items()
    rhs = (lhs - eq) * (1 / c)
    return f"{Poly({m: Fraction(1)})} = {rhs}"


def _binomial_b0(eq: Poly):
    """For ``s*b0 - r*alpha^e`` return ``{var: exp}`` of the relation b0 = alpha^e."""
    if len(eq.terms) != 2:
        return None
    (m1, c1), (m2, c2) = eq.terms.items()
    if m2 == (("b0", 1),):
        m1, c1, m2, c2 = m2, c2, m1, c1
    if m1 != (("b0", 1),) or c1 != -c2 or len(m2) != 1 or not m2[0][0].startswith("alpha"):
        return None
    return {"b": 1, m2[0][0]: -m2[0][1]}


def _exponent_row(mono: Mapping, names: Sequence[str]) -> list[int]:
    return [mono.get(al, 0) for al in names] + [mono.get("a", 0), mono.get("b", 0)]


def _root_row(alpha: str, n: int, names: Sequence[str]) -> list[int]:
    return [n if al == alpha else 0 for al in names] + [-1, 0]


def _monomial_relation(u: int, v: int) -> str:
    if v < 0 or (v == 0 and u < 0):
        u, v = -u, -v

    def side(parts):
        s = "*".join(p for p in parts if p)
        return s or "1"

    def power(name, e):
        return "" if e == 0 else name if e == 1 else f"{name}^{e}"

    left = [power("b0", v), power("a", u) if u > 0 else ""]
    right = [power("a", -u) if u < 0 else ""]
    return f"{side(left)} = {side(right)}"


# ---------------------------------------------------------------------------
# integer lattices


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def row_echelon(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Integer row echelon form (Hermite style) of the lattice spanned by ``rows``."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return []
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = [i for i in range(r, len(m)) if m[i][c] != 0]
        if not piv:
            continue
        for i in piv[1:]:
            a, b = m[piv[0]][c], m[i][c]
            g, x, y = _xgcd(a, b)
            top = [x * p + y * q for p, q in zip(m[piv[0]], m[i])]
            bot = [(b // g) * p - (a // g) * q for p, q in zip(m[piv[0]], m[i])]
            m[piv[0]], m[i] = top, bot
        m[r], m[piv[0]] = m[piv[0]], m[r]
        if m[r][c] < 0:
            m[r] = [-x for x in m[r]]
        for i in range(r):
            q = m[i][c] // m[r][c]
            if q:
                m[i] = [a - q * b for a, b in zip(m[i], m[r])]
        r += 1
    return [row for row in m[:r] if any(row)]


def smith_divisors(rows: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero elementary divisors of an integer matrix."""
    m = [list(r) for r in rows if any(r)]
    divs = []
    while m and any(any(r) for r in m):
        # bring the smallest nonzero entry to the corner
        _, i, j = min((abs(x), i, j) for i, r in enumerate(m) for j, x in enumerate(r) if x)
        m[0], m[i] = m[i], m[0]
        for r in m:
            r[0], r[j] = r[j], r[0]
        p = m[0][0]
        clean = True
        for i in range(1, len(m)):
            q = m[i][0] // p
            m[i] = [a - q * b for a, b in zip(m[i], m[0])]
            clean &= m[i][0] == 0
        for j in range(1, len(m[0])):
            q = m[0][j] // p
            for r in m:
                r[j] -= q * r[0]
            clean &= m[0][j] == 0
        if not clean:
            continue
        rest = [r[1:] for r in m[1:]]
        bad = next(((i, j) for i, r in enumerate(rest) for j, x in enumerate(r) if x % p), None)
        if bad is not None:
            m[0] = [a + b for a, b in zip(m[0], m[bad[0] + 1])]
            continue
        divs.append(abs(p))
        m = [r for r in rest if any(r)] if rest and rest[0] else []
    return divs


def _project(gens: Sequence[Sequence[int]], eliminate: int) -> list[tuple[int, int]]:
    """Rows of the sublattice with zero in the first ``eliminate`` columns, as (a, b) pairs."""
    ech = row_echelon(gens)
    out = [tuple(r[eliminate:]) for r in ech if not any(r[:eliminate])]
    return [tuple(r) for r in row_echelon(out)] if out else []


@dataclass(frozen=True)
class TorusPart:
    rank: int
    torsion: int
    relations: tuple[tuple[int, int], ...]  # a^u b^v = 1
    divisors: tuple[int, ...]
    slice_order: int  # 0 means the a = 1 slice is all of G_m

    @property
    def slice_is_gm(self) -> bool:
        return self.slice_order == 0

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "torsion": self.torsion,
            "relations": [list(r) for r in self.relations],
            "smith": list(self.divisors),
            "slice": {"rank": 1, "torsion": 1} if self.slice_is_gm else {"rank": 0, "torsion": self.slice_order},
        }


def _oriented(r: Sequence[int]) -> tuple[int, int]:
    u, v = r
    return (-u, -v) if v < 0 or (v == 0 and u < 0) else (u, v)


def torus_from_relations(relations: Iterable[Sequence[int]]) -> TorusPart:
    """Subgroup of the 2-torus cut out by ``a^u b^v = 1`` for each ``(u, v)``."""
    rel = [_oriented(r) for r in row_echelon([list(r) for r in relations])]
    divs = smith_divisors(rel)
    g = 0
    for _, v in rel:
        g = math.gcd(g, v)
    return TorusPart(2 - len(divs), math.prod(divs), tuple(rel), tuple(divs), g)


# ---------------------------------------------------------------------------
# stabilizer equations


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def stab_single(w: PuiseuxSpace, alpha: str = "alpha1") -> ConstraintSystem:
    reg, sing = split_reg_sing(w.psi, w.n)
    N = _ceil_div(w.d, w.n)
    eqs = []
    for i in range(N):
        rhs = Poly.var("a", i, reg[i]) if i < len(reg) else Poly()
        for j in range(min(i + 1, len(reg))):
            rhs = rhs - _b(i - j) * reg[j]
        eqs.append(Poly.var(f"c{i}") - rhs)
    roots = ()
    if w.n > 1:
        eqs += _stab_q(sing, w.n, w.d, alpha)
        roots = ((alpha, w.n),)
    return ConstraintSystem(N, tuple(e for e in eqs if not e.is_zero()), roots)


def _stab_q(sing: Sequence, n: int, d: int, alpha: str) -> list[Poly]:
    """``Q(s^n) sing(s) = sing(alpha s)`` coefficientwise below ``s^d``."""
    eqs = []
    for e in range(1, d):
        if e % n == 0:
            continue
        lhs = Poly()
        for l in range(e % n, min(e, len(sing) - 1) + 1, n):
            if sing[l] != 0:
                lhs = lhs + _b((e - l) // n) * sing[l]
        rhs = Poly.var(alpha, e, sing[e]) if e < len(sing) else Poly()
        eq = lhs - rhs
        if not eq.is_zero():
            eqs.append(eq)
    return eqs


@dataclass(frozen=True)
class StabilizerDescription:
    N: int
    h: tuple
    spaces: tuple[PuiseuxSpace, ...]
    system: ConstraintSystem
    solved_Q: tuple[tuple[str, str, str], ...]  # (name, free|determined|relation, expression)
    residual: tuple[Poly, ...]
    torus: TorusPart

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "h": [format_scalar(c) for c in self.h] or ["0"],
            "spaces": [w.to_json() for w in self.spaces],
            "equations": self.system.strings(),
            "constraints": self.system.eliminated(),
            "solved_Q": [{"coefficient": n, "status": s, "value": e} for n, s, e in self.solved_Q],
            "residual": [f"{p} = 0" for p in self.residual],
            "torus": self.torus.to_json(),
        }


def stab_intersect(ws: Sequence[PuiseuxSpace]) -> StabilizerDescription:
    """Merged stabilizer of several spaces over one base point."""
    if not ws:
        return StabilizerDescription(0, (), (), ConstraintSystem(0, ()), (), (), torus_from_relations([]))
    bases = {format_scalar(w.base_point) for w in ws if w.base_point is not None}
    if len(bases) > 1:
        raise ToolkitError("mixed_fibers", sorted(bases))
    order = sorted(range(len(ws)), key=lambda k: -Fraction(ws[k].d, ws[k].n))
    spaces = [ws[k] for k in order]
    first = spaces[0]
    N = _ceil_div(first.d, first.n)
    h, _ = split_reg_sing(first.psi, first.n)
    h = h[:N]
    eqs: list[Poly] = []
    rows: list[tuple[dict, Poly]] = []  # sum coeff_j b_j = rhs
    roots = []
    # P from the first space
    for i in range(N):
        rhs = Poly.var("a", i, h[i]) if i < len(h) else Poly()
        for j in range(min(i + 1, len(h))):
            rhs = rhs - _b(i - j) * h[j]
        eqs.append(Poly.var(f"c{i}") - rhs)
    lattice = []
    for k, w in enumerate(spaces, start=1):
        reg, sing = split_reg_sing(w.psi, w.n)
        delta = [(reg[i] if i < len(reg) else 0) - (h[i] if i < len(h) else 0) for i in range(max(len(reg), len(h)))]
        for i in range(_ceil_div(w.d, w.n)):
            coeffs = {i - j: delta[j] for j in range(min(i + 1, len(delta))) if delta[j] != 0}
            rhs = Poly.var("a", i, delta[i]) if i < len(delta) and delta[i] != 0 else Poly()
            if coeffs or not rhs.is_zero():
                rows.append((coeffs, rhs))
            if i < len(delta) and delta[i] != 0:
                lattice.append({"a": -i, "b": 1})
        if w.n > 1:
            alpha = f"alpha{k}"
            roots.append((alpha, w.n))
            for eq in _stab_q(sing, w.n, w.d, alpha):
                coeffs, rhs = _split_linear(eq)
                rows.append((coeffs, rhs))
            for e, c in enumerate(sing):
                if c != 0:
                    lattice.append({"b": 1, alpha: -e})
    for coeffs, rhs in rows:
        lhs = Poly()
        for j, c in coeffs.items():
            lhs = lhs + _b(j) * c
        eq = lhs - rhs
        if not eq.is_zero():
            eqs.append(eq)
    system = ConstraintSystem(N, tuple(eqs), tuple(roots))
    solved, residual = _solve_b(rows, N)
    for r in residual:
        if len(r.terms) > 2:
            raise ToolkitError("nonabelian_residual", str(r))
    names = [al for al, _ in roots]
    gens = [_exponent_row(m, names) for m in lattice] + [_root_row(al, n, names) for al, n in roots]
    torus = torus_from_relations(_project(gens, len(names)))
    return StabilizerDescription(N, tuple(h), tuple(spaces), system, tuple(solved), tuple(residual), torus)


def _split_linear(eq: Poly) -> tuple[dict, Poly]:
    coeffs, rest = {}, {}
    for m, c in eq.terms.items():
        if len(m) == 1 and m[0][0].startswith("b") and m[0][1] == 1:
            coeffs[int(m[0][0][1:])] = c
        else:
            rest[m] = -c
    return coeffs, Poly(rest)


def _solve_b(rows: Sequence[tuple[dict, Poly]], N: int):
    """Reduced echelon form of the b-linear rows, pivoting on high indices first."""
    work = [(dict(c), r) for c, r in rows]
    pivots: dict[int, int] = {}
    top = max([N - 1] + [j for c, _ in work for j in c])
    for j in range(top, -1, -1):
        p = next((i for i, (c, _) in enumerate(work) if i not in pivots.values() and c.get(j, 0) != 0), None)
        if p is None:
            continue
        c, r = work[p]
        inv = 1 / c[j]
        c = {k: v * inv for k, v in c.items()}
        r = r * inv
        work[p] = (c, r)
        for i, (ci, ri) in enumerate(work):
            f = ci.get(j, 0)
            if i != p and f != 0:
                merged = {k: ci.get(k, 0) - f * c.get(k, 0) for k in set(ci) | set(c)}
                work[i] = ({k: v for k, v in merged.items() if v != 0}, ri - r * f)
        pivots[j] = p
    solved = []
    for j in range(max(N, top + 1)):
        if j not in pivots:
            solved.append((f"b{j}", "free", f"b{j}"))
            continue
        c, r = work[pivots[j]]
        expr = r
        for k, v in c.items():
            if k != j:
                expr = expr - _b(k) * v
        status = "relation" if expr.variables() and all(v == "a" or v.startswith("alpha") for v in expr.variables()) else "determined"
        solved.append((f"b{j}", status, str(expr)))
    residual = [r for i, (c, r) in enumerate(work) if not c and i not in pivots.values() and not r.is_zero()]
    return solved, residual


def compose(g1: Mapping, g2: Mapping, N: int) -> dict:
    """``g1 o g2`` truncated at level ``N``.

    An element is ``{"a", "b": [..], "c": [..], "alpha": {name: value}}``.
    """
    a1, a2 = g1["a"], g2["a"]
    q1 = [c * a2**i for i, c in enumerate(g1["b"])]
    p1 = [c * a2**i for i, c in enumerate(g1["c"])]
    b = [sum(q1[j] * g2["b"][i - j] for j in range(i + 1)) for i in range(N)]
    c = [sum(q1[j] * g2["c"][i - j] for j in range(i + 1)) + p1[i] for i in range(N)]
    alpha = {k: g1["alpha"][k] * g2["alpha"][k] for k in g1["alpha"]}
    return {"a": a1 * a2, "b": b, "c": c, "alpha": alpha}


def element_values(g: Mapping) -> dict:
    vals = {"a": g["a"], **g["alpha"]}
    vals.update({f"b{i}": x for i, x in enumerate(g["b"])})
    vals.update({f"c{i}": x for i, x in enumerate(g["c"])})
    return vals


def fiber_stabilizer(model: FiberModel, truncation: int | None = None) -> StabilizerDescription:
    spaces = [pui_of_center(model, c.id, truncation) for c in model.components if c.kind == "outer"]
    return stab_intersect(spaces)


def torus_part(desc: StabilizerDescription | Iterable[Sequence[int]]) -> TorusPart:
    if isinstance(desc, StabilizerDescription):
        return desc.torus
    return torus_from_relations(desc)


# ---------------------------------------------------------------------------
# global report over the affine line


def _poly_mul(p: Sequence, q: Sequence) -> list:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def hermite_interpolate(conditions: Sequence[tuple[object, int, Sequence]]) -> list:
    """Polynomial H of degree < sum N with ``H(beta + x) = h(x) mod x^N`` for each (beta, N, h)."""
    size = sum(n for _, n, _ in conditions)
    if size == 0:
        return []
    rows = []
    for beta, n, h in conditions:
        for i in range(n):
            # i-th Taylor coefficient at beta of sum_k H_k t^k
            row = [Fraction(math.comb(k, i)) * beta ** (k - i) if k >= i else Fraction(0) for k in range(size)]
            rows.append(row + [h[i] if i < len(h) else Fraction(0)])
    for c in range(size):
        p = next(r for r in range(c, size) if rows[r][c] != 0)
        rows[c], rows[p] = rows[p], rows[c]
        inv = 1 / rows[c][c]
        rows[c] = [x * inv for x in rows[c]]
        for r in range(size):
            if r != c and rows[r][c] != 0:
                f = rows[r][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
    out = [rows[i][size] for i in range(size)]
    while out and out[-1] == 0:
        out.pop()
    return out


@dataclass(frozen=True)
class AutReport:
    fibers: tuple[StabilizerDescription, ...]
    base_points: tuple
    D0: tuple[tuple[object, int], ...]
    U_generator: tuple
    h: tuple
    upsilon: tuple[int, int]  # (rank, torsion)
    rooted: tuple[bool, ...]
    linear: tuple[bool, ...]

    @property
    def torus_summary(self) -> tuple[int, int]:
        """Lambda_mu for a single special fiber, Upsilon_mu otherwise."""
        if len(self.fibers) == 1:
            t = self.fibers[0].torus
            return (t.rank, t.torsion)
        return self.upsilon

    @property
    def parabolic(self) -> bool:
        return all(self.rooted)

    @property
    def toric(self) -> bool:
        return len(self.fibers) == 1 and self.fibers[0].torus.rank == 2

    def to_json(self) -> dict:
        fibers = []
        for beta, f, rooted, linear in zip(self.base_points, self.fibers, self.rooted, self.linear):
            fibers.append({
                "base_point": format_scalar(beta),
                "N": f.N,
                "h": [format_scalar(c) for c in f.h] or ["0"],
                "constraints": f.system.eliminated(),
                "torus": f.torus.to_json(),
                "rooted_chain": rooted,
                "linear_fiber": linear,
            })
        out = {
            "version": VERSION,
            "fibers": fibers,
            "D0": [[format_scalar(b), n] for b, n in self.D0],
            "U_mu_generator": [format_scalar(c) for c in self.U_generator],
            "h": [format_scalar(c) for c in self.h] or ["0"],
            "Upsilon": {"rank": self.torus_summary[0], "torsion": self.torus_summary[1]},
            "a1_slice": {"rank": self.upsilon[0], "torsion": self.upsilon[1]},
            "flags": {"parabolic": self.parabolic, "toric": self.toric},
            "finite_part_bound": {"symmetric_group_degree": len(self.fibers)},
        }
        if len(self.fibers) == 1:
            out["d"] = self.fibers[0].N
        return out


def aut_report(fibers: Sequence[FiberModel], base: str = "A1", truncation: int | None = None) -> AutReport:
    """Structure data of Aut(X, mu) for an A1-fibration over the affine line."""
    if base != "A1":
        raise ToolkitError("base_unsupported", base)
    if not fibers:
        raise ToolkitError("bad_input", "at least one special fiber is required")
    betas = [m.base_point for m in fibers]
    if len(set(map(format_scalar, betas))) != len(betas):
        raise ToolkitError("bad_input", "two fibers over the same base point")
    descs = [fiber_stabilizer(m, truncation) for m in fibers]
    d0 = tuple((b, d.N) for b, d in zip(betas, descs) if d.N > 0)
    gen = [Fraction(1)]
    for b, n in d0:
        for _ in range(n):
            gen = _poly_mul(gen, [-b, Fraction(1)])
    h = hermite_interpolate([(b, d.N, d.h) for b, d in zip(betas, descs)])
    g = 0
    for d in descs:
        g = math.gcd(g, d.torus.slice_order)
    upsilon = (1, 1) if g == 0 else (0, g)
    return AutReport(
        tuple(descs), tuple(betas), d0, tuple(gen), tuple(h), upsilon,
        tuple(is_rooted_chain(m) for m in fibers), tuple(is_linear(m) for m in fibers),
    )
