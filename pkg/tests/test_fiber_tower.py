import json
import random

import pytest

from a1fib.errors import ToolkitError
from a1fib.fiber_tower import (
    BlowupSpec,
    ExtendedDivisor,
    Feather,
    build_tower,
    classify_star_components,
    extended_divisor,
    is_contractible,
    is_linear,
    is_rooted_chain,
)
from a1fib.formal_series import INF
from a1fib.weighted_graphs import Vertex, WeightedTree, blowdown_step, contraction_order
from oracles import random_tower

SPEC_222 = {"base_point": "0", "blowups": [{"on": 0, "at": "0"}, {"on": 1, "at": "inf"}, {"on": 2, "at": "1"}]}


def tower(*steps, base="0"):
    return build_tower({"base_point": base, "blowups": [{"on": j, "at": q} for j, q in steps]})


def fiber_sum(model):
    """F^2 for F = sum m_i T_i, expanded from the intersection matrix."""
    m = model.multiplicities
    return sum(mi * mi * w for mi, w in zip(m, model.weights)) + 2 * sum(m[a] * m[b] for a, b in model.edges)


# -- building ----------------------------------------------------------------------


def test_222_weights_and_kinds():
    m = build_tower(SPEC_222)
    assert m.weights == (-2, -2, -2, -1)
    assert m.multiplicities == (1, 1, 2, 2)
    assert [c.kind for c in m.components] == ["root", "outer", "inner", "outer"]
    assert set(m.edges) == {(0, 2), (1, 2), (2, 3)}
    assert m.section_attach == 0
    assert [c.parent for c in m.components] == [None, 0, 1, 2]


def test_trivial_towers():
    m = tower()
    assert (m.weights, m.multiplicities) == ((0,), (1,))
    m = tower((0, "0"))
    assert (m.weights, m.multiplicities) == ((-1, -1), (1, 1))
    assert is_rooted_chain(m)


def test_node_bookkeeping():
    m = tower((0, "0"))
    # outer blowup: the new node is named T1(inf)
    assert [n.canonical for n in m.nodes] == [(1, INF)]
    m = tower((0, "0"), (1, "inf"))
    assert {n.canonical for n in m.nodes} == {(2, 0), (2, INF)}
    # the old node is re-expressible from either side
    p = m.locate(1, INF)
    assert (p.comp, p.q) == (2, 0)


def test_build_errors():
    with pytest.raises(ToolkitError) as e:
        tower((0, "inf"))
    assert e.value.code == "center_on_section"
    with pytest.raises(ToolkitError) as e:
        tower((3, "1"))
    assert e.value.code == "bad_component"
    with pytest.raises(ToolkitError) as e:
        build_tower({"blowups": [{"on": 0, "at": "1"}, {"on": 0, "at": "1"}]}, strict=True)
    assert e.value.code == "stale_center"
    with pytest.raises(ToolkitError):
        build_tower({"blowups": [{"on": "0", "at": "1"}]})
    with pytest.raises(ToolkitError):
        build_tower({"blowups": [{"on": 0}]})


def test_non_strict_accepts_old_names():
    # T0(1) after blowing it up names the node, i.e. an inner blowup
    m = build_tower({"blowups": [{"on": 0, "at": "1"}, {"on": 0, "at": "1"}]})
    assert m.components[2].kind == "inner"
    assert m.multiplicities == (1, 1, 2)


def test_spec_json_round_trip():
    spec = BlowupSpec.from_json(SPEC_222)
    assert spec.to_json() == SPEC_222
    assert spec.blowups[1] == (1, INF)


def test_model_exports():
    m = build_tower(SPEC_222)
    data = m.to_json()
    json.dumps(data)
    assert [c["multiplicity"] for c in data["components"]] == [1, 1, 2, 2]
    dot = m.to_dot()
    assert '"T3" [label="T3:-1 m=2"]' in dot
    assert WeightedTree.from_json(m.tree().to_json()) == m.tree()


# -- invariants on random towers ------------------------------------------------------


def _random_models(n, depth, seed):
    rng = random.Random(seed)
    return [random_tower(rng, depth) for _ in range(n)]


def test_random_tower_invariants():
    for m in _random_models(150, 6, 1):
        assert fiber_sum(m) == 0
        assert m.components[0].multiplicity == 1
        for c in m.components[1:]:
            if c.kind == "outer":
                assert c.multiplicity == m.components[c.center_on[0]].multiplicity
            else:
                # at creation the two neighbours are the node's components
                assert c.multiplicity == sum(m.components[j].multiplicity for j in c.center_on)
        # every node is named on the newer component
        for nd in m.nodes:
            assert nd.canonical[0] == max(nd.x, nd.y)
        order = contraction_order(m.tree(), "T0", m.multiplicity_map())
        t = m.tree()
        for v in order:
            t = blowdown_step(t, v)
        assert [(v.id, v.weight) for v in t.vertices] == [("T0", 0)]


def test_multiplicity_one_iff_outer_ancestry():
    for m in _random_models(150, 6, 2):
        for c in m.components:
            chain, k = [], c.id
            while k:
                chain.append(m.components[k].kind)
                k = m.components[k].center_on[0] if m.components[k].kind == "outer" else m.components[k].parent
            outer_only = all(kind == "outer" for kind in chain)
            assert (c.multiplicity == 1) == outer_only, (m.to_json(), c)


# -- rooted chains ---------------------------------------------------------------------


def test_rooted_chain_examples():
    assert is_rooted_chain(tower((0, "0")))
    assert not is_rooted_chain(build_tower(SPEC_222))
    two = tower((0, "0"), (0, "1"))
    assert not is_rooted_chain(two)
    # abstract fiber graph is a path, S sits in its middle
    assert is_linear(two)


def test_rooted_chain_long_path():
    m = tower((0, "0"), (1, "1"), (2, "0"))
    assert is_rooted_chain(m)
    # inner blowup at T1(inf): S-T0-T2-T1 is still a path ending at S
    m = tower((0, "0"), (1, "inf"))
    assert is_rooted_chain(m)
    m = tower((0, "0"), (1, "inf"), (2, "1"))
    assert not is_rooted_chain(m)


# -- extended divisor --------------------------------------------------------------------


def test_extended_divisor_222():
    ext = extended_divisor(build_tower(SPEC_222), [0, -1, -2, -2, -2])
    assert ext.spine_weights() == [0, -1, -2, -2, -2]
    assert ext.spine == ("C0", "C1", "T0", "T2", "T1")
    assert len(ext.feathers) == 1
    f = ext.feathers[0]
    assert f.vertices == ("T3",) and f.attached_to == 3
    assert ext.tree.vertex("T3").weight == -1
    assert ext.tree.vertex("T3").role == "feather_bridge"


def test_extended_divisor_undegenerate():
    ext = extended_divisor(tower(), [0, -1, 0])
    assert ext.spine_weights() == [0, -1, 0]
    assert ext.feathers == ()


def test_extended_divisor_two_feathers():
    ext = extended_divisor(tower((0, "0"), (0, "1")), [0, -1, -2])
    assert ext.spine_weights() == [0, -1, -2]
    assert [(f.vertices, f.attached_to) for f in ext.feathers] == [(("T1",), 2), (("T2",), 2)]
    assert len(ext.tree.vertices) == 5


def test_extended_divisor_errors():
    with pytest.raises(ToolkitError) as e:
        extended_divisor(build_tower(SPEC_222), [0, -1])
    assert e.value.code == "bad_boundary"
    with pytest.raises(ToolkitError):
        extended_divisor(build_tower(SPEC_222), [0, -1, -2, -1])


# -- star components -----------------------------------------------------------------------


def _contractible_oracle(t: WeightedTree) -> bool:
    t = WeightedTree(tuple(Vertex(v.id, v.weight) for v in t.vertices), t.edges)
    if not t.vertices:
        return True
    for v in t.vertices:
        if v.weight == -1 and t.degree(v.id) <= 2:
            if _contractible_oracle(blowdown_step(t, v.id)):
                return True
    return False


def test_is_contractible_matches_oracle():
    rng = random.Random(4)
    for _ in range(200):
        n = rng.randint(1, 5)
        vs = tuple(Vertex(f"v{i}", rng.choice([-1, -1, -2, -2, -3])) for i in range(n))
        es = tuple((f"v{rng.randrange(i)}", f"v{i}") for i in range(1, n))
        t = WeightedTree(vs, es)
        assert is_contractible(t) == _contractible_oracle(t)


def test_star_components_222():
    ext = extended_divisor(build_tower(SPEC_222), [0, -1, -2, -2, -2])
    cls = classify_star_components(ext)
    assert cls == {"C0": "star", "C1": "star", "T0": "plus", "T2": "star", "T1": "plus"}
    # the last spine component has an empty tail
    assert cls[ext.spine[-1]] == "plus"


def _dg_extended(r: int, d: int) -> ExtendedDivisor:
    # C0..C_n = [0,-1,-2,...,-2] with a (1-r) feather and a -1 feather on the last component
    n = d + 1
    spine = [f"C{i}" for i in range(n + 1)]
    weights = [0, -1] + [-2] * (n - 1)
    verts = [Vertex(s, w) for s, w in zip(spine, weights)]
    verts += [Vertex("F0", 1 - r, "feather_bridge"), Vertex("F1", -1, "feather_bridge")]
    edges = list(zip(spine, spine[1:])) + [(spine[-1], "F0"), (spine[-1], "F1")]
    feathers = (Feather(("F0",), n, None), Feather(("F1",), n, None))
    return ExtendedDivisor(WeightedTree(tuple(verts), tuple(edges)), tuple(spine), feathers)


@pytest.mark.parametrize("r,d", [(2, 3), (2, 4), (3, 4)])
def test_star_components_feathered_examples(r, d):
    ext = _dg_extended(r, d)
    cls = classify_star_components(ext)
    for i, cid in enumerate(ext.spine):
        tail_ids = set(ext.spine[i + 1:]) | ({"F0", "F1"} if i + 1 <= len(ext.spine) - 1 else set())
        sub = WeightedTree(
            tuple(v for v in ext.tree.vertices if v.id in tail_ids),
            tuple(e for e in ext.tree.edges if e[0] in tail_ids and e[1] in tail_ids),
        )
        # no mothers recorded, so star means "tail not contractible"
        assert (cls[cid] == "star") == (not _contractible_oracle(sub))


def test_star_components_random_towers():
    for m in _random_models(60, 4, 9):
        # boundary must follow a fiber chain from T0; take T0 alone
        try:
            ext = extended_divisor(m, [0, -1, m.weights[0]])
        except ToolkitError:
            continue
        cls = classify_star_components(ext)
        assert cls[ext.spine[-1]] == "plus"
        for i, cid in enumerate(ext.spine):
            if cls[cid] == "plus":
                continue
            keep = set(ext.spine[i + 1:])
            for f in ext.feathers:
                if f.attached_to >= i + 1:
                    keep.update(f.vertices)
            sub = WeightedTree(
                tuple(Vertex(v.id, v.weight) for v in ext.tree.vertices if v.id in keep),
                tuple(e for e in ext.tree.edges if e[0] in keep and e[1] in keep),
            )
            assert not _contractible_oracle(sub)
