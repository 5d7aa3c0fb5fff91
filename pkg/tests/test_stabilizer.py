import math
import random
from fractions import Fraction

import pytest

from a1fib.errors import ToolkitError
from a1fib.fiber_tower import build_tower, is_rooted_chain
from a1fib.formal_series import RadicalTower
from a1fib.puiseux import PuiseuxSpace
from a1fib.stabilizer import (
    Poly,
    aut_report,
    compose,
    element_values,
    fiber_stabilizer,
    hermite_interpolate,
    row_echelon,
    smith_divisors,
    stab_intersect,
    stab_single,
    torus_from_relations,
    torus_part,
)
from oracles import count_torus_points, predicted_count, random_tower

F = Fraction
SPEC_222 = {"base_point": "0", "blowups": [{"on": 0, "at": "0"}, {"on": 1, "at": "inf"}, {"on": 2, "at": "1"}]}


def P(psi, n, d, base=None):
    return PuiseuxSpace(tuple(F(c) for c in psi), n, d, base_point=base)


def one_outer(beta):
    return build_tower({"base_point": str(beta), "blowups": [{"on": 0, "at": "0"}]})


# -- polynomials ------------------------------------------------------------------------


def test_poly_arithmetic_and_printing():
    a, b0 = Poly.var("a"), Poly.var("b0")
    p = b0 * b0 - a
    assert str(p) == "b0^2 - a"
    assert p.evaluate({"a": F(4), "b0": F(2)}) == 0
    assert (p - p).is_zero()
    assert p.variables() == {"a", "b0"}
    assert str(Poly.const(F(3, 2)) * b0) == "3/2*b0"


# -- stab-P / stab-Q -----------------------------------------------------------------------


def test_single_222_space():
    sys = stab_single(P([0, 1], 2, 2))
    assert sys.N == 1
    assert sys.eliminated() == ["c0 = 0", "b0^2 = a"]
    assert sys.satisfied_by(sys.identity())


def test_single_trivial_space():
    sys = stab_single(P([], 1, 1))
    assert sys.eliminated() == ["c0 = 0"]


def test_single_shifted_center():
    # c0 = q(1 - b0) with q = 3
    sys = stab_single(P([3], 1, 1))
    (eq,) = sys.equations
    for b0 in (F(1), F(2), F(-5, 3)):
        assert eq.evaluate({"a": F(7), "b0": b0, "c0": 3 * (1 - b0)}) == 0
        assert eq.evaluate({"a": F(7), "b0": b0, "c0": 3 * (1 - b0) + 1}) != 0


def test_identity_satisfies_random_systems():
    rng = random.Random(3)
    for _ in range(80):
        m = random_tower(rng, 5, RadicalTower())
        sys = fiber_stabilizer(m).system
        assert sys.satisfied_by(sys.identity())


# -- intersections ---------------------------------------------------------------------------


def test_intersect_222():
    d = stab_intersect([P([], 1, 1), P([0, 1], 2, 2)])
    assert (d.N, d.h) == (1, ())
    assert d.torus.relations == ((-1, 2),)
    assert d.torus.rank == 1 and d.torus.slice_order == 2


def test_intersect_two_rational_centers():
    d = stab_intersect([P([2], 1, 1), P([5], 1, 1)])
    assert d.N == 1 and d.h == (2,)
    # b = a^0 = 1 on the torus
    assert d.torus.relations == ((0, 1),)
    assert d.torus.rank == 1 and d.torus.slice_order == 1


def test_intersect_orders_by_slope():
    d = stab_intersect([P([], 1, 1), P([0, 1], 2, 3)])
    assert d.spaces[0].d == 3
    assert d.N == 2


def test_intersect_mixed_fibers():
    with pytest.raises(ToolkitError) as e:
        stab_intersect([P([], 1, 1, F(0)), P([], 1, 1, F(1))])
    assert e.value.code == "mixed_fibers"


def test_intersect_empty_is_full_group():
    d = stab_intersect([])
    assert d.N == 0 and d.torus.rank == 2


def test_N_is_max_ceiling():
    rng = random.Random(17)
    for _ in range(60):
        m = random_tower(rng, 5, RadicalTower())
        d = fiber_stabilizer(m)
        want = max((-(-w.d // w.n) for w in d.spaces), default=0)
        assert d.N == want


def test_fiber_stabilizer_222():
    d = fiber_stabilizer(build_tower(SPEC_222))
    assert d.N == 1 and d.h == ()
    assert d.system.eliminated() == ["c0 = 0", "b0^2 = a"]
    assert torus_part(d).slice_order == 2


def test_outer_chain_keeps_full_torus():
    m = build_tower({"blowups": [{"on": 0, "at": "0"}, {"on": 1, "at": "1"}, {"on": 2, "at": "-1"}]})
    assert is_rooted_chain(m)
    assert fiber_stabilizer(m).torus.rank == 2


# -- group closure ---------------------------------------------------------------------------


def _sample(desc, rng, tries=20):
    """A random rational solution of the stabilizer system, or None."""
    sympy = pytest.importorskip("sympy")
    sys, N = desc.system, desc.N
    roots = dict(sys.roots)
    L = math.lcm(*roots.values()) if roots else 1
    names = [f"b{j}" for j in range(N)] + [f"c{j}" for j in range(N)]
    syms = sympy.symbols(names) if names else ()
    for _ in range(tries):
        s = F(rng.choice([1, 2, 3, -2, F(1, 2)]))
        vals = {"a": s**L}
        vals.update({al: s ** (L // n) * rng.choice([1, -1] if n % 2 == 0 else [1]) for al, n in roots.items()})
        exprs = []
        for eq in sys.all_equations():
            e = sympy.Integer(0)
            for mono, c in eq.terms.items():
                term = sympy.Rational(c.numerator, c.denominator)
                for v, k in mono:
                    term *= sympy.Rational(vals[v].numerator, vals[v].denominator) ** k if v in vals else syms[names.index(v)] ** k
                e += term
            exprs.append(e)
        exprs = [e for e in exprs if e != 0]
        if any(e.free_symbols == set() for e in exprs):
            continue
        sol = sympy.linsolve(exprs, syms) if exprs else {syms}
        if not sol:
            continue
        (point,) = sol
        free = set().union(*(sympy.sympify(x).free_symbols for x in point))
        pick = {f: sympy.Rational(rng.randint(-3, 3), rng.randint(1, 2)) for f in free}
        got = [F(str(sympy.sympify(x).subs(pick))) for x in point]
        b, c = got[:N], got[N:]
        if N and b[0] == 0:
            continue
        return {"a": vals["a"], "b": b, "c": c, "alpha": {al: vals[al] for al in roots}}
    return None


def test_solutions_closed_under_composition():
    rng = random.Random(23)
    checked = 0
    for _ in range(40):
        m = random_tower(rng, 4)
        try:
            desc = fiber_stabilizer(m)
        except ToolkitError:
            continue
        if desc.N == 0:
            continue
        g1, g2 = _sample(desc, rng), _sample(desc, rng)
        if g1 is None or g2 is None:
            continue
        assert desc.system.satisfied_by(element_values(g1))
        g = compose(g1, g2, desc.N)
        assert desc.system.satisfied_by(element_values(g))
        checked += 1
    assert checked >= 20


def test_compose_identity():
    e = {"a": F(1), "b": [F(1), F(0)], "c": [F(0), F(0)], "alpha": {}}
    g = {"a": F(2), "b": [F(3), F(1)], "c": [F(5), F(-1)], "alpha": {}}
    assert compose(e, g, 2) == g
    assert compose(g, e, 2) == g


# -- lattices and tori ----------------------------------------------------------------------------


def test_torus_examples():
    t = torus_from_relations([(-1, 2)])
    assert (t.rank, t.torsion, t.slice_order) == (1, 1, 2)
    t = torus_from_relations([])
    assert (t.rank, t.torsion, t.slice_is_gm) == (2, 1, True)
    t = torus_from_relations([(2, -1), (-1, 3)])
    assert t.rank == 0
    for M in (5, 10, 60):
        assert count_torus_points([(2, -1), (-1, 3)], M) == predicted_count(t.rank, t.divisors, M)


def test_torus_json():
    assert torus_from_relations([(-1, 2)]).to_json() == {
        "rank": 1, "torsion": 1, "relations": [[-1, 2]], "smith": [1], "slice": {"rank": 0, "torsion": 2},
    }


def _rand_rows(rng):
    return [[rng.randint(-6, 6), rng.randint(-6, 6)] for _ in range(rng.randint(0, 3))]


def test_snf_matches_enumeration():
    rng = random.Random(7)
    for _ in range(30):
        rows = _rand_rows(rng)
        t = torus_from_relations(rows)
        for M in (1, 2, 3, 4, 6, 12, 30, 60):
            assert count_torus_points(rows, M) == predicted_count(t.rank, t.divisors, M), rows


def test_smith_against_sympy():
    sympy = pytest.importorskip("sympy")
    from sympy.matrices.normalforms import smith_normal_form

    rng = random.Random(9)
    for _ in range(80):
        rows = [[rng.randint(-9, 9) for _ in range(3)] for _ in range(rng.randint(1, 3))]
        snf = smith_normal_form(sympy.Matrix(rows), domain=sympy.ZZ)
        want = sorted(abs(snf[i, i]) for i in range(min(snf.shape)) if snf[i, i] != 0)
        assert sorted(smith_divisors(rows)) == want


def test_row_echelon_spans_same_lattice():
    rng = random.Random(10)
    for _ in range(80):
        rows = [[rng.randint(-6, 6) for _ in range(3)] for _ in range(rng.randint(1, 4))]
        ech = row_echelon(rows)
        # adding the echelon rows must not enlarge the lattice
        assert sorted(smith_divisors(rows)) == sorted(smith_divisors(ech))
        assert sorted(smith_divisors(rows + ech)) == sorted(smith_divisors(rows))


# -- interpolation and report ---------------------------------------------------------------------


def test_hermite_interpolation():
    rng = random.Random(4)
    for _ in range(40):
        conds = []
        for beta in rng.sample(range(-4, 5), rng.randint(1, 3)):
            n = rng.randint(1, 3)
            conds.append((F(beta), n, [F(rng.randint(-3, 3)) for _ in range(n)]))
        H = hermite_interpolate(conds)
        assert len(H) <= sum(n for _, n, _ in conds)
        for beta, n, h in conds:
            for i in range(n):
                # i-th Taylor coefficient at beta
                got = sum(F(math.comb(k, i)) * c * beta ** (k - i) for k, c in enumerate(H) if k >= i)
                assert got == h[i]


def test_report_single_222():
    r = aut_report([build_tower(SPEC_222)])
    data = r.to_json()
    assert data["d"] == 1
    assert data["Upsilon"] == {"rank": 1, "torsion": 1}
    assert data["fibers"][0]["constraints"] == ["c0 = 0", "b0^2 = a"]
    assert data["a1_slice"] == {"rank": 0, "torsion": 2}
    assert not r.parabolic and not r.toric


def test_report_two_fibers():
    r = aut_report([one_outer(0), one_outer(1)])
    data = r.to_json()
    assert data["D0"] == [["0", 1], ["1", 1]]
    assert data["U_mu_generator"] == ["0", "-1", "1"]
    assert data["Upsilon"] == {"rank": 1, "torsion": 1}
    assert r.parabolic


def test_report_222_and_chain():
    m = build_tower(dict(SPEC_222, base_point="1"))
    r = aut_report([m, one_outer(0)])
    assert r.upsilon == (0, 2)
    assert r.to_json()["Upsilon"] == {"rank": 0, "torsion": 2}


def test_report_errors():
    with pytest.raises(ToolkitError) as e:
        aut_report([one_outer(0)], base="P1")
    assert e.value.code == "base_unsupported"
    with pytest.raises(ToolkitError) as e:
        aut_report([])
    assert e.value.code == "bad_input"
    with pytest.raises(ToolkitError) as e:
        aut_report([one_outer(0), one_outer(0)])
    assert e.value.code == "bad_input"


def test_slice_gm_iff_rooted_chain():
    rng = random.Random(13)
    for _ in range(200):
        m = random_tower(rng, 5, RadicalTower())
        assert fiber_stabilizer(m).torus.slice_is_gm == is_rooted_chain(m)
