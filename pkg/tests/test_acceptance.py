"""Acceptance criteria, one test each.

Every test appends a ``criterion N: PASS|FAIL ...`` line to the terminal
summary and prints it, then asserts.
"""

import random
import time
from contextlib import contextmanager
from fractions import Fraction

import conftest
from a1fib.amalgam import cyclic_amalgam
from a1fib.dpd import DpdPresentation, classify_ml, danilov_gizatullin, is_toric
from a1fib.fiber_tower import build_tower, extended_divisor, is_rooted_chain
from a1fib.formal_series import INF, RadicalTower, Series
from a1fib.puiseux import (
    PuiseuxSpace,
    arc_multiplicity,
    contains,
    descend_finite,
    descend_infinite,
    multiplicity,
    pui_of_center,
    pui_of_point,
    to_base,
)
from a1fib.stabilizer import aut_report, fiber_stabilizer, torus_from_relations
from a1fib.weighted_graphs import contraction_order, inertia, revert, standardize
from oracles import (
    LETTERS_SL2,
    all_words,
    arc_space,
    count_torus_points,
    generic_arc,
    predicted_count,
    push_arc,
    random_tower,
    same_up_to_twist,
    smooth_points,
    word_matrix,
)
from test_dpd import CASES, random_gauge, random_hyperbolic

F = Fraction
SPEC_222 = {"base_point": "0", "blowups": [{"on": 0, "at": "0"}, {"on": 1, "at": "inf"}, {"on": 2, "at": "1"}]}


@contextmanager
def criterion(n: int, limit: float | None = None):
    """Collect failures as strings; record one summary line on exit."""
    state = {"fails": [], "info": []}
    start = time.perf_counter()
    try:
        yield state
    except Exception as exc:  # an error counts as a failure of the criterion
        state["fails"].append(f"{type(exc).__name__}: {exc}")
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed >= limit:
        state["fails"].append(f"took {elapsed:.2f}s, limit {limit}s")
    ok = not state["fails"]
    parts = [f"{elapsed:.2f}s"] + state["info"] + state["fails"][:3]
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({'; '.join(parts)})"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def check(state, cond, msg):
    if not cond:
        state["fails"].append(msg)


# -- 1 --------------------------------------------------------------------------------------


def test_criterion_1_golden_222():
    with criterion(1, limit=1.0) as st:
        m = build_tower(SPEC_222)
        w = pui_of_center(m, 3)
        check(st, (w.psi, w.n, w.d) == ((0, 1), 2, 2), f"Pui(p3) = {w}")
        check(st, m.multiplicities == (1, 1, 2, 2), f"multiplicities {m.multiplicities}")
        d = fiber_stabilizer(m)
        check(st, set(d.system.eliminated()) == {"c0 = 0", "b0^2 = a"}, f"constraints {d.system.eliminated()}")
        check(st, d.N == 1, f"N = {d.N}")
        check(st, d.torus.rank == 1 and d.torus.relations == ((-1, 2),), f"torus {d.torus}")
        check(st, d.torus.slice_order == 2, f"slice order {d.torus.slice_order}")
        ext = extended_divisor(m, [0, -1, -2, -2, -2])
        check(st, ext.spine_weights() == [0, -1, -2, -2, -2], f"spine {ext.spine_weights()}")
        feathers = [(f.attached_to, [ext.tree.vertex(v).weight for v in f.vertices]) for f in ext.feathers]
        check(st, feathers == [(3, [-1])], f"feathers {feathers}")


# -- 2 --------------------------------------------------------------------------------------


def test_criterion_2_zigzag_standard_forms():
    with criterion(2, limit=10.0) as st:
        for d in range(2, 9):
            z, _ = standardize([d])
            check(st, list(z.weights) == [0, 0] + [-2] * (d - 1), f"standardize([{d}]) = {z.weights}")
        rng = random.Random(2024)
        standard = 0
        for _ in range(1000):
            w = [rng.randint(-6, 6) for _ in range(rng.randint(1, 8))]
            z, _ = standardize(w)
            again, _ = standardize(z.weights)
            check(st, again.weights == z.weights, f"not idempotent on {w}")
            # revert is defined on standard chains; the others have the wrong inertia
            pos, zero, _ = inertia(w)
            check(st, z.standard or (pos, zero) != (1, 0), f"{w} should standardize")
            if z.standard:
                check(st, revert(revert(z)).weights == z.weights, f"revert twice on {w}")
                standard += 1
        st["info"].append(f"1000 random chains, {standard} with a standard form")


# -- 3 --------------------------------------------------------------------------------------


def test_criterion_3_fiber_consistency():
    with criterion(3, limit=30.0) as st:
        rng = random.Random(3)
        literal = 0
        for _ in range(500):
            m = random_tower(rng, 5)
            mult, wts = m.multiplicities, m.weights
            pair = 2 * sum(mult[a] * mult[b] for a, b in m.edges)
            identity = sum(x * x * w for x, w in zip(mult, wts)) + pair
            check(st, identity == 0, f"F^2 = {identity} on {m.to_json()}")
            literal += sum(x * w for x, w in zip(mult, wts)) + pair != 0
            order = contraction_order(m.tree(), "T0", m.multiplicity_map())
            check(st, len(order) == len(wts) - 1, "contraction order incomplete")
        st["info"].append(f"500 towers; unsquared form fails on {literal}, reported only")


# -- 4 --------------------------------------------------------------------------------------


def test_criterion_4_descent_vs_oracle():
    with criterion(4, limit=60.0) as st:
        rng = random.Random(4)
        points = steps = 0
        for _ in range(200):
            field = RadicalTower()
            m = random_tower(rng, 4, field)
            for comp, q in smooth_points(m):
                w = pui_of_point(m, comp, q)
                n, d, c, eta = arc_space(m, comp, q, rng, w.d + 3)
                check(st, (w.n, w.d) == (n, d) and same_up_to_twist(w.psi, eta, n, c),
                      f"T{comp}({q}): {w} vs oracle {(eta, n, d)}")
                points += 1
                # a generic arc stays in the descended space at every level
                x, y = generic_arc(rng)
                space = PuiseuxSpace((), 1, 1)
                levels = push_arc(m, comp, q, x, y)
                for k, (ck, qk, xk, yk) in enumerate(levels):
                    if k:
                        above = levels[k - 1][1]
                        space = descend_infinite(space, field) if above == INF else descend_finite(space, above)
                    check(st, contains(space, xk, yk, field), f"arc left the space at T{ck}({qk})")
                    steps += 1
                check(st, to_base(space, levels[-1][1]) == w, "step-by-step descent differs from pui_of_point")
        st["info"].append(f"{points} points, {steps} membership checks")


# -- 5 --------------------------------------------------------------------------------------


def test_criterion_5_multiplicity():
    with criterion(5) as st:
        rng = random.Random(5)
        smooth = 0
        for _ in range(200):
            m = random_tower(rng, 4, RadicalTower())
            for comp, q in smooth_points(m):
                got = multiplicity(pui_of_point(m, comp, q))
                check(st, got == m.components[comp].multiplicity, f"mult at T{comp}({q})")
                smooth += 1
        arcs = 0
        while arcs < 100:
            m = random_tower(rng, 5)
            for nd in m.nodes:
                if arcs == 100:
                    break
                comp, q = nd.canonical
                x = Series.poly([0] * rng.randint(1, 4) + [rng.choice([1, 2, -1])])
                y = Series.poly([0] * rng.randint(1, 4) + [rng.choice([1, 3, -2])])
                bx = push_arc(m, comp, q, x, y)[-1][2]
                check(st, arc_multiplicity(m, comp, q, x, y) == bx.valuation(), f"node arc at T{comp}({q})")
                arcs += 1
        st["info"].append(f"{smooth} smooth points, {arcs} node arcs")


# -- 6 --------------------------------------------------------------------------------------


def test_criterion_6_linear_chain_cross_check():
    with criterion(6) as st:
        rng = random.Random(6)
        rooted = 0
        for _ in range(500):
            m = random_tower(rng, 5, RadicalTower())
            gm = fiber_stabilizer(m).torus.slice_is_gm
            rc = is_rooted_chain(m)
            check(st, gm == rc, f"slice G_m={gm}, rooted chain={rc} on {m.to_json()}")
            rooted += rc
        st["info"].append(f"500 towers, {rooted} rooted chains")


# -- 7 --------------------------------------------------------------------------------------


def test_criterion_7_torus_snf():
    with criterion(7) as st:
        rng = random.Random(7)
        for _ in range(50):
            rows = [(rng.randint(-6, 6), rng.randint(-6, 6)) for _ in range(rng.randint(1, 3))]
            t = torus_from_relations(rows)
            for M in range(1, 61):
                got = count_torus_points(rows, M)
                want = predicted_count(t.rank, t.divisors, M)
                check(st, got == want, f"{rows} at order {M}: {got} points, SNF says {want}")
        st["info"].append("50 systems, orders 1..60")


# -- 8 --------------------------------------------------------------------------------------


def _one_outer(beta):
    return build_tower({"base_point": str(beta), "blowups": [{"on": 0, "at": "0"}]})


def test_criterion_8_multi_fiber_report():
    with criterion(8) as st:
        r = aut_report([_one_outer(0), _one_outer(1)])
        check(st, r.D0 == ((0, 1), (1, 1)), f"D0 {r.D0}")
        check(st, r.U_generator == (0, -1, 1), f"generator {r.U_generator}")
        check(st, r.upsilon == (1, 1), f"Upsilon {r.upsilon}")
        r = aut_report([build_tower(dict(SPEC_222, base_point="1")), _one_outer(0)])
        check(st, r.upsilon == (0, 2), f"Upsilon {r.upsilon}")


# -- 9 --------------------------------------------------------------------------------------


def test_criterion_9_dpd():
    with criterion(9) as st:
        for label, pres, want in CASES:
            check(st, classify_ml(pres) == want, f"{label}: {classify_ml(pres)}")
        p = danilov_gizatullin(5, 2)
        check(st, classify_ml(p) == "ML0" and not is_toric(p), "DG(5,2)")
        rng = random.Random(9)
        for _ in range(200):
            p = random_hyperbolic(rng)
            cls, tor = classify_ml(p), is_toric(p)
            e = random_gauge(rng)
            g = DpdPresentation("hyperbolic", Dplus=p.Dplus + e, Dminus=p.Dminus - e)
            check(st, (classify_ml(g), is_toric(g)) == (cls, tor), f"gauge on {p.to_json()}")
            s = p.swapped()
            check(st, (classify_ml(s), is_toric(s)) == (cls, tor), f"swap on {p.to_json()}")
        st["info"].append(f"{len(CASES)} table rows, 200 random presentations")


# -- 10 -------------------------------------------------------------------------------------


def test_criterion_10_amalgam():
    with criterion(10, limit=30.0) as st:
        t = cyclic_amalgam(4, 6, 2)
        rng = random.Random(10)
        forms: dict = {}
        words = 0
        for w in all_words(LETTERS_SL2, 5):
            w = list(w)
            nf = t.normal_form(w)
            mat = word_matrix(w)
            check(st, word_matrix(nf) == mat, f"normal form changes the element: {w}")
            check(st, forms.setdefault(mat, tuple(nf)) == tuple(nf), f"two normal forms for {w}")
            k = rng.randint(0, len(w))
            check(st, t.multiply(w[:k], w[k:]) == t.normal_form(t.normal_form(w[:k]) + t.normal_form(w[k:])),
                  f"multiplication inconsistent on {w}")
            words += 1
        check(st, len(set(forms.values())) == len(forms), "one normal form for two elements")
        for _ in range(50):
            vertex = rng.choice(["P", "Q"])
            conj = t.normal_form([rng.choice(LETTERS_SL2) for _ in range(rng.randint(1, 4))])
            gens = [t.multiply(conj, [(vertex, a)], t.inverse(conj)) for a in (1, 2)]
            bound = max(len(h) for h in gens)
            g, v = t.bounded_fixed_vertex(gens, bound, bound + 2)
            check(st, t.vertex_key(g, v) == t.vertex_key(conj, vertex), f"planted {conj} at {vertex}, got {g} at {v}")
        st["info"].append(f"{words} words, 50 planted conjugators")
