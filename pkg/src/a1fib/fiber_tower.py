"""Special fibers built from an ordered list of blowups.

The starting surface is the trivial ruling with section ``S`` and fiber
``T0``.  Points of a fiber component ``T_j`` carry the coordinate ``q`` of
the chart created with ``T_j``; the value ``inf`` is the point towards ``S``
(for ``T0``) or towards the component that was blown up (for later ones).

Each node of the fiber is stored once, on the newer of its two components,
together with its coordinate on both.  A blowup center may be named on
either component; :meth:`FiberModel.locate` resolves it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

from .errors import ToolkitError
from .formal_series import INF, RATIONALS, format_scalar, parse_scalar
from .weighted_graphs import Vertex, WeightedTree, Zigzag, fiber_defect


@dataclass(frozen=True)
class BlowupSpec:
    base_point: object
    blowups: tuple[tuple[int, object], ...] = ()

    @classmethod
    def from_json(cls, data: Mapping, field=RATIONALS) -> "BlowupSpec":
        if not isinstance(data, Mapping):
            raise ToolkitError("bad_input", "blowup spec must be an object")
        base = parse_scalar(data.get("base_point", "0"), field)
        steps = []
        for b in data.get("blowups", []):
            try:
                on = b["on"]
                at = b["at"]
            except (KeyError, TypeError) as exc:
                raise ToolkitError("bad_input", f"blowup entry {b!r}") from exc
            if not isinstance(on, int) or isinstance(on, bool):
                raise ToolkitError("bad_input", f"component index {on!r}")
            steps.append((on, parse_scalar(at, field, allow_inf=True)))
        return cls(base, tuple(steps))

    def to_json(self) -> dict:
        return {
            "base_point": format_scalar(self.base_point),
            "blowups": [{"on": j, "at": format_scalar(q)} for j, q in self.blowups],
        }


@dataclass(frozen=True)
class Component:
    id: int
    weight: int
    multiplicity: int
    kind: str  # root | outer | inner
    parent: int | None = None
    center: tuple[int, object] | None = None  # canonical point blown up, one level down
    center_on: tuple[int, ...] = ()  # components through that point

    @property
    def name(self) -> str:
        return f"T{self.id}"


@dataclass(frozen=True)
class Node:
    """Intersection of components ``x`` and ``y``.

    In the canonical chart at the node, ``T_x`` is ``{x = 0}`` and ``T_y`` is
    ``{y = 0}``.
    """

    x: int
    y: int
    coords: tuple[tuple[int, object], ...]
    canonical: tuple[int, object]

    def coord(self, comp: int):
        for c, q in self.coords:
            if c == comp:
                return q
        return None


@dataclass(frozen=True)
class Point:
    """A resolved point of the top fiber in canonical form ``T_comp(q)``."""

    comp: int
    q: object
    node: Node | None = None

    @property
    def x_comp(self) -> int:
        return self.node.x if self.node else self.comp

    @property
    def y_comp(self) -> int | None:
        return self.node.y if self.node else None


@dataclass(frozen=True)
class FiberModel:
    components: tuple[Component, ...]
    edges: tuple[tuple[int, int], ...]
    nodes: tuple[Node, ...]
    base_point: object = 0
    section_attach: int = 0
    spec: BlowupSpec | None = field(default=None, compare=False)
    field: object = field(default=RATIONALS, compare=False, repr=False)

    def component(self, i: int) -> Component:
        if not isinstance(i, int) or not 0 <= i < len(self.components):
            raise ToolkitError("bad_component", i)
        return self.components[i]

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(c.weight for c in self.components)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(c.multiplicity for c in self.components)

    def neighbors(self, i: int) -> list[int]:
        return sorted([b for a, b in self.edges if a == i] + [a for a, b in self.edges if b == i])

    def locate(self, j: int, q, strict: bool = False) -> Point:
        """Resolve ``T_j(q)`` to its canonical form on the current fiber."""
        self.component(j)
        if j == 0 and q == INF:
            raise ToolkitError("center_on_section", "T0(inf) lies on S")
        for nd in self.nodes:
            if nd.coord(j) is not None and nd.coord(j) == q:
                if strict and nd.canonical != (j, q):
                    raise ToolkitError("stale_center", f"T{j}({format_scalar(q)}) is named on T{nd.canonical[0]}")
                return Point(nd.canonical[0], nd.canonical[1], nd)
        if q == INF:
            raise ToolkitError("stale_center", f"T{j}(inf) is not a point of the current fiber")
        return Point(j, q)

    def tree(self) -> WeightedTree:
        vs = tuple(Vertex(c.name, c.weight) for c in self.components)
        es = tuple((f"T{a}", f"T{b}") for a, b in self.edges)
        return WeightedTree(vs, es)

    def multiplicity_map(self) -> dict[str, int]:
        return {c.name: c.multiplicity for c in self.components}

    def fiber_square(self) -> int:
        return fiber_defect(self.tree(), self.multiplicity_map())[0]

    def to_json(self) -> dict:
        return {
            "base_point": format_scalar(self.base_point),
            "components": [
                {
                    "id": c.name,
                    "weight": c.weight,
                    "multiplicity": c.multiplicity,
                    "kind": c.kind,
                    "parent": None if c.parent is None else f"T{c.parent}",
                }
                for c in self.components
            ],
            "edges": [[f"T{a}", f"T{b}"] for a, b in self.edges],
            "nodes": [
                {
                    "canonical": [f"T{n.canonical[0]}", format_scalar(n.canonical[1])],
                    "x": f"T{n.x}",
                    "y": f"T{n.y}",
                }
                for n in self.nodes
            ],
            "section_attach": f"T{self.section_attach}",
        }

    def to_dot(self) -> str:
        return self.tree().to_dot(self.multiplicity_map())


def _edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def build_tower(spec: BlowupSpec | Mapping, field=RATIONALS, strict: bool = False) -> FiberModel:
    """Replay the blowups of ``spec`` and return the resulting fiber.

    With ``strict`` set, every center must be named in canonical form;
    otherwise a point given on either of its components is accepted.
    """
    if isinstance(spec, Mapping):
        spec = BlowupSpec.from_json(spec, field)
    comps = [Component(0, 0, 1, "root")]
    edges: set[tuple[int, int]] = set()
    nodes: list[Node] = []
    for on, at in spec.blowups:
        model = FiberModel(tuple(comps), tuple(sorted(edges)), tuple(nodes), spec.base_point, field=field)
        if not isinstance(on, int) or not 0 <= on < len(comps):
            raise ToolkitError("bad_component", on)
        p = model.locate(on, at, strict)
        new = len(comps)
        if p.node is None:
            j, q = p.comp, p.q
            old = comps[j]
            comps[j] = _heavier(old)
            comps.append(Component(new, -1, old.multiplicity, "outer", j, (j, q), (j,)))
            edges.add(_edge(j, new))
            nodes.append(Node(j, new, ((new, INF), (j, q)), (new, INF)))
        else:
            nd = p.node
            a, b = nd.x, nd.y
            comps[a], comps[b] = _heavier(comps[a]), _heavier(comps[b])
            mult = comps[a].multiplicity + comps[b].multiplicity
            owner = nd.canonical[0]
            comps.append(Component(new, -1, mult, "inner", owner, nd.canonical, (owner, a + b - owner)))
            edges.discard(_edge(a, b))
            edges.add(_edge(a, new))
            edges.add(_edge(b, new))
            nodes.remove(nd)
            nodes.append(Node(a, new, ((new, INF), (a, nd.coord(a))), (new, INF)))
            nodes.append(Node(new, b, ((new, 0), (b, nd.coord(b))), (new, 0)))
    model = FiberModel(tuple(comps), tuple(sorted(edges)), tuple(nodes), spec.base_point, spec=spec, field=field)
    if model.fiber_square() != 0:
        raise AssertionError("fiber self-intersection is not zero")
    return model


def _heavier(c: Component) -> Component:
    return Component(c.id, c.weight - 1, c.multiplicity, c.kind, c.parent, c.center, c.center_on)


def is_rooted_chain(model: FiberModel) -> bool:
    """True when S + fiber is a path with S at one end."""
    if any(len(model.neighbors(c.id)) > 2 for c in model.components):
        return False
    return len(model.neighbors(model.section_attach)) <= 1


def is_linear(model: FiberModel) -> bool:
    """Whether the fiber graph alone is a path (the weaker reading)."""
    return all(len(model.neighbors(c.id)) <= 2 for c in model.components)


# ---------------------------------------------------------------------------
# extended divisor


@dataclass(frozen=True)
class Feather:
    vertices: tuple[str, ...]  # bridge first
    attached_to: int  # spine index
    mother: int | None  # spine index of the component carrying the tip's center

    @property
    def tip(self) -> str:
        return self.vertices[-1]


@dataclass(frozen=True)
class ExtendedDivisor:
    tree: WeightedTree
    spine: tuple[str, ...]
    feathers: tuple[Feather, ...]

    def spine_weights(self) -> list[int]:
        return [self.tree.vertex(v).weight for v in self.spine]

    def to_json(self) -> dict:
        return {
            **self.tree.to_json(),
            "spine": list(self.spine),
            "feathers": [
                {"vertices": list(f.vertices), "attached_to": f.attached_to, "mother": f.mother}
                for f in self.feathers
            ],
        }


def extended_divisor(model: FiberModel, boundary: Zigzag | Sequence[int]) -> ExtendedDivisor:
    """Boundary zigzag C0 + C1 + ... with the rest of the fiber as feathers.

    ``boundary`` lists the weights of C0 (fiber at infinity), C1 (section) and
    then the boundary components inside the special fiber, starting at T0.
    """
    w = list(boundary.weights if isinstance(boundary, Zigzag) else boundary)
    if len(w) < 3 or w[0] != 0:
        raise ToolkitError("bad_boundary", w)
    want = w[2:]
    paths = []

    def walk(path):
        if len(path) == len(want):
            paths.append(list(path))
            return
        for u in model.neighbors(path[-1]):
            if u not in path and model.components[u].weight == want[len(path)]:
                walk(path + [u])

    if model.components[0].weight == want[0]:
        walk([0])
    for path in sorted(paths):
        feathers = _feathers(model, path)
        if feathers is not None:
            break
    else:
        raise ToolkitError("bad_boundary", "boundary does not match a chain in the fiber with feathers")
    spine_ids = ["C0", "C1"] + [f"T{i}" for i in path]
    verts = [Vertex("C0", 0, "fiber_at_infinity"), Vertex("C1", w[1], "section")]
    verts += [Vertex(f"T{i}", model.components[i].weight) for i in path]
    edges = [("C0", "C1"), ("C1", "T0")] + [(f"T{a}", f"T{b}") for a, b in zip(path, path[1:])]
    out = []
    for chain, at in feathers:
        for k, c in enumerate(chain):
            role = "feather_bridge" if k == 0 else "plain"
            verts.append(Vertex(f"T{c}", model.components[c].weight, role))
        edges.append((f"T{path[at]}", f"T{chain[0]}"))
        edges += [(f"T{a}", f"T{b}") for a, b in zip(chain, chain[1:])]
        out.append(Feather(tuple(f"T{c}" for c in chain), at + 2, _mother(model, chain[-1], path)))
    return ExtendedDivisor(WeightedTree(tuple(verts), tuple(edges)), tuple(spine_ids), tuple(out))


def _feathers(model: FiberModel, path: list[int]):
    on_path = set(path)
    rest = [c.id for c in model.components if c.id not in on_path]
    seen: set[int] = set()
    out = []
    for start in rest:
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in model.neighbors(v):
                if u not in on_path and u not in seen:
                    seen.add(u)
                    stack.append(u)
        links = [(v, u) for v in comp for u in model.neighbors(v) if u in on_path]
        if len(links) != 1:
            return None
        bridge, anchor = links[0]
        sub = {v: [u for u in model.neighbors(v) if u in comp] for v in comp}
        if any(len(n) > 2 for n in sub.values()) or len(sub[bridge]) > 1:
            return None
        chain, prev = [bridge], None
        while True:
            nxt = [u for u in sub[chain[-1]] if u != prev]
            if not nxt:
                break
            prev = chain[-1]
            chain.append(nxt[0])
        if model.components[bridge].weight > -1 or any(model.components[c].weight > -2 for c in chain[1:]):
            return None
        out.append((chain, path.index(anchor)))
    return sorted(out, key=lambda f: (f[1], f[0]))


def _mother(model: FiberModel, tip: int, path: list[int]) -> int | None:
    for c in model.components[tip].center_on:
        if c in path:
            return path.index(c) + 2
    return None


def is_contractible(tree: WeightedTree) -> bool:
    """Can the whole (possibly disconnected) graph be blown down to nothing?"""
    ids = {v.id: i for i, v in enumerate(tree.vertices)}
    state = (
        tuple(sorted((ids[v.id], v.weight) for v in tree.vertices)),
        tuple(sorted(tuple(sorted((ids[a], ids[b]))) for a, b in tree.edges)),
    )
    return _contractible(state)


@lru_cache(maxsize=None)
def _contractible(state) -> bool:
    verts, edges = state
    if not verts:
        return True
    weights = dict(verts)
    nbrs = {v: [] for v in weights}
    for a, b in edges:
        nbrs[a].append(b)
        nbrs[b].append(a)
    for v, wv in verts:
        if wv != -1 or len(nbrs[v]) > 2:
            continue
        new_w = {u: x + (1 if u in nbrs[v] else 0) for u, x in weights.items() if u != v}
        new_e = {e for e in edges if v not in e}
        if len(nbrs[v]) == 2:
            new_e.add(tuple(sorted(nbrs[v])))
        if _contractible((tuple(sorted(new_w.items())), tuple(sorted(new_e)))):
            return True
    return False


def _sub_divisor(ext: ExtendedDivisor, start: int, drop: Feather | None = None) -> WeightedTree:
    keep = set(ext.spine[start:])
    for f in ext.feathers:
        if f.attached_to >= start and f is not drop:
            keep.update(f.vertices)
    vs = tuple(Vertex(v.id, v.weight) for v in ext.tree.vertices if v.id in keep)
    es = tuple(e for e in ext.tree.edges if e[0] in keep and e[1] in keep)
    return WeightedTree(vs, es)


def classify_star_components(ext: ExtendedDivisor) -> dict[str, str]:
    """Mark each spine component ``star`` or ``plus``."""
    out = {}
    for i, cid in enumerate(ext.spine):
        tail = _sub_divisor(ext, i + 1)
        star = not is_contractible(tail)
        if star:
            for f in ext.feathers:
                if f.attached_to >= i + 1 and f.mother is not None and f.mother < i:
                    if is_contractible(_sub_divisor(ext, i + 1, f)):
                        star = False
                        break
        out[cid] = "star" if star else "plus"
    return out
