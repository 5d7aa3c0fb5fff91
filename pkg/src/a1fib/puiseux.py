"""Puiseux arc spaces and their descent to base coordinates.

``Pui(psi, n, d)`` is the class of arcs ``(t**n, psi(t) + O(t**d))`` up to
reparametrisation.  A space attached to a point ``T_i(q)`` is pushed one
level down by the coordinate change of the blowup that created ``T_i``:

* ``q`` finite: ``(x, y) -> (x, x*(y + q))``,
* ``q = inf``:  ``(x, y) -> (x*y, y)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from .errors import ToolkitError
from .fiber_tower import FiberModel
from .formal_series import (
    INF,
    RATIONALS,
    Series,
    format_scalar,
    parse_scalar,
    poly_order,
    reversion,
    solve_substitution,
    unit_root,
)


def _poly(coeffs: Sequence, d: int | None = None) -> tuple:
    c = [Fraction(x) if isinstance(x, int) else x for x in coeffs]
    if d is not None:
        c = c[:d]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class PuiseuxSpace:
    psi: tuple
    n: int
    d: int
    center: object = None  # T0 coordinate in base form, else a (component, q) pair
    base_point: object = field(default=None, compare=False)  # fiber location on the base curve

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ToolkitError("bad_input", "n and d must be positive")
        object.__setattr__(self, "psi", _poly(self.psi, self.d))
        g = self.n
        for i, c in enumerate(self.psi):
            if c != 0:
                g = gcd(g, i)
        if g != 1:
            raise ToolkitError("bad_input", f"gcd condition fails for {self}")

    @property
    def base_center(self):
        return self.psi[0] if self.psi else Fraction(0)

    def to_json(self) -> dict:
        center = self.base_center if self.center is None or not isinstance(self.center, tuple) else None
        out = {"psi": [format_scalar(c) for c in self.psi] or ["0"], "n": self.n, "d": self.d}
        out["center"] = format_scalar(center) if center is not None else [f"T{self.center[0]}", format_scalar(self.center[1])]
        return out

    @classmethod
    def from_json(cls, data: Mapping, field=RATIONALS) -> "PuiseuxSpace":
        try:
            psi = tuple(parse_scalar(c, field) for c in data["psi"])
            return cls(psi, int(data["n"]), int(data["d"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ToolkitError("bad_input", str(exc)) from exc


def working_order(spaces: Sequence[PuiseuxSpace], truncation: int | None = None) -> int:
    base = max(w.d + w.n for w in spaces) + 4
    return max(base, truncation or 0)


def descend_finite(w: PuiseuxSpace, q) -> PuiseuxSpace:
    """Space at ``T_i(q)`` to the space at the center of the blowup."""
    if q == INF:
        raise ToolkitError("wrong_case", "finite descent at a node marker")
    shifted = [Fraction(0)] * w.n + (list(w.psi) or [Fraction(0)])
    shifted[w.n] = shifted[w.n] + q
    return PuiseuxSpace(tuple(shifted), w.n, w.d + w.n)


def descend_infinite(w: PuiseuxSpace, field=RATIONALS, truncation: int | None = None) -> PuiseuxSpace:
    """Space at ``T_i(inf)`` to the space at the center of the blowup."""
    if not w.psi:
        raise ToolkitError("degenerate_at_node", "psi vanishes at a node")
    if w.psi[0] != 0:
        raise ToolkitError("bad_input", "psi must vanish at the point")
    order = working_order([w], truncation)
    t_of_s, new_n = solve_substitution(w.psi, w.n, field, order)
    psi_t = Series.poly(w.psi).compose(t_of_s)
    out = PuiseuxSpace(tuple(psi_t.coeffs[: w.d]), new_n, w.d)
    if poly_order(out.psi) != poly_order(w.psi):
        raise AssertionError("order of psi changed in descent")
    return out


def descend_chain(model: FiberModel, comp: int, q, seed: PuiseuxSpace,
                  stop: int = 0, truncation: int | None = None) -> tuple[PuiseuxSpace, tuple[int, object]]:
    """Push ``seed`` at ``T_comp(q)`` down until reaching a point on ``T_stop``'s level."""
    w = seed
    while comp > stop:
        w = descend_infinite(w, model.field, truncation) if q == INF else descend_finite(w, q)
        comp, q = model.components[comp].center
    return w, (comp, q)


def to_base(w: PuiseuxSpace, q0, base_point=None) -> PuiseuxSpace:
    psi = list(w.psi) or [Fraction(0)]
    psi[0] = psi[0] + q0
    return PuiseuxSpace(tuple(psi), w.n, w.d, q0, base_point)


def pui_of_point(model: FiberModel, comp: int, q, seed: PuiseuxSpace | None = None,
                 truncation: int | None = None) -> PuiseuxSpace:
    """The base-form space of the point ``T_comp(q)``.

    A point that was later blown up by an outer blowup is read at the level
    where it was that blowup's (smooth) center.
    """
    p = model.locate(comp, q)
    seed = seed or PuiseuxSpace((), 1, 1)
    if p.node is not None and seed == PuiseuxSpace((), 1, 1):
        for c in model.components:
            if c.kind == "outer" and c.center[0] == comp and c.center[1] == q:
                return pui_of_center(model, c.id, truncation)
    if p.node is not None and not seed.psi:
        raise ToolkitError("degenerate_at_node", f"T{p.comp}({format_scalar(p.q)}) is a node")
    w, (c0, q0) = descend_chain(model, p.comp, p.q, seed, truncation=truncation)
    return to_base(w, q0, model.base_point)


def pui_of_center(model: FiberModel, k: int, truncation: int | None = None) -> PuiseuxSpace:
    """``Pui(p_k)`` for the center of an outer blowup."""
    comp = model.component(k)
    if comp.kind != "outer":
        raise ToolkitError("wrong_case", f"T{k} is not an outer component")
    j, q = comp.center
    w, (c0, q0) = descend_chain(model, j, q, PuiseuxSpace((), 1, 1), truncation=truncation)
    return to_base(w, q0, model.base_point)


def multiplicity(w: PuiseuxSpace) -> int:
    return w.n


def arc_multiplicity(model: FiberModel, comp: int, q, x: Series, y: Series) -> int:
    """Multiplicity of an arc ``(x(t), y(t))`` centred at ``T_comp(q)``.

    The arc is given in the canonical chart of the point.
    """
    p = model.locate(comp, q)
    if (x.coeffs and x.coeffs[0] != 0) or (y.coeffs and y.coeffs[0] != 0):
        raise ToolkitError("bad_input", "arc is not centred at the point")
    if x.is_zero():
        raise ToolkitError("arc_in_fiber", "x vanishes identically")
    m_x = model.components[p.x_comp].multiplicity
    if p.node is None:
        return m_x * x.valuation()
    if y.is_zero():
        raise ToolkitError("arc_in_fiber", "y vanishes identically")
    return m_x * x.valuation() + model.components[p.y_comp].multiplicity * y.valuation()


def split_reg_sing(psi: Sequence, n: int) -> tuple[tuple, tuple]:
    """``psi = reg(t**n) + sing(t)``; ``reg`` is returned as a polynomial in ``s = t**n``."""
    reg, sing = [], []
    for i, c in enumerate(psi):
        if i % n == 0:
            reg.append(c)
        else:
            sing.extend([Fraction(0)] * (i - len(sing)))
            sing.append(c)
    return _poly(reg), _poly(sing)


def contains(space: PuiseuxSpace, x: Series, y: Series, field=RATIONALS) -> bool:
    """Whether the arc ``(x, y)`` lies in ``space`` (same chart)."""
    n, d = space.n, space.d
    if x.valuation() != n:
        return False
    order = d + 1
    if y.prec is not None and y.prec < d:
        raise ToolkitError("beyond_truncation", "arc known to lower order than d")
    unit = x.divide_t(n)
    v = unit_root(unit, n, field, order)
    tau = reversion(v.shift(1), order)  # t as a series in tau, with x(t(tau)) = tau**n
    c0 = y.coeffs[0] if y.coeffs else 0
    rest = Series((Fraction(0),) + y.coeffs[1:], y.prec)
    eta = (rest.compose(tau) + Series((c0,), None)).truncate(d)
    return twist_factor(space.psi, tuple(eta[i] for i in range(d)), n) is not None


def twist_factor(psi: Sequence, eta: Sequence, n: int):
    """The ``zeta`` with ``zeta**n == 1`` and ``eta_i * zeta**i == psi_i`` for all i, if any.

    Reparametrising ``t -> zeta t`` keeps ``x = t**n`` fixed, so two expansions
    describe the same arcs exactly when such a ``zeta`` exists.  The gcd
    condition on ``psi`` makes ``zeta`` a product of powers of the ratios,
    hence it always lives in the working field.
    """
    size = max(len(psi), len(eta))
    psi = list(psi) + [0] * (size - len(psi))
    eta = list(eta) + [0] * (size - len(eta))
    ratios = {}
    for i, (p, e) in enumerate(zip(psi, eta)):
        if (p == 0) != (e == 0):
            return None
        if p != 0:
            ratios[i] = p / e
    if ratios.get(0, 1) != 1:
        return None
    # extended gcd over n and the support: sum a_i * i = 1 (mod n)
    g, coeffs = n, {}
    for i in sorted(ratios):
        if i == 0:
            continue
        g2, u, v = _xgcd(g, i)
        coeffs = {k: u * c for k, c in coeffs.items()}
        coeffs[i] = coeffs.get(i, 0) + v
        g = g2
    if g != 1:
        return None
    zeta = Fraction(1)
    for i, a in coeffs.items():
        zeta = zeta * ratios[i] ** a
    if zeta**n != 1 or any(zeta**i != r for i, r in ratios.items()):
        return None
    return zeta


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """``(g, u, v)`` with ``u*a + v*b == g``."""
    if b == 0:
        return a, 1, 0
    g, u, v = _xgcd(b, a % b)
    return g, v, u - (a // b) * v
