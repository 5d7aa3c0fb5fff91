"""Trees of groups given by oracles: normal forms, fixed vertices, path reduction.

Elements of the fundamental group are closed paths at a base vertex.  A
path word is normalised left to right: each letter is replaced by the
caller's coset representative modulo the edge group it leaves through, and
the remainder is pushed across the edge.  Backtracks over a trivial letter
collapse.  Between two non-trivial letters the path is then a tree
geodesic, so the list of non-trivial ``(vertex, element)`` letters is a
canonical form.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .errors import ToolkitError

Letter = tuple[Hashable, Hashable]  # (vertex id, element)


class Group:
    """Group oracle.  Subclasses provide ``identity``, ``mul``, ``inv`` and ``contains``."""

    identity: Hashable

    def mul(self, x, y):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def contains(self, x) -> bool:
        return True

    def is_identity(self, x) -> bool:
        return x == self.identity

    def prod(self, xs: Iterable):
        out = self.identity
        for x in xs:
            out = self.mul(out, x)
        return out


class FiniteGroup(Group):
    """Group from a multiplication table over named elements."""

    def __init__(self, names: Sequence[str], table: Sequence[Sequence[str]]):
        self.names = list(names)
        index = {n: i for i, n in enumerate(self.names)}
        if len(index) != len(self.names) or len(table) != len(self.names):
            raise ToolkitError("bad_input", "table size mismatch")
        self.table = {(a, b): table[index[a]][j] for a in self.names for j, b in enumerate(self.names)}
        if any(v not in index for v in self.table.values()):
            raise ToolkitError("bad_input", "table is not closed")
        ident = [e for e in self.names if all(self.table[e, x] == x == self.table[x, e] for x in self.names)]
        if len(ident) != 1:
            raise ToolkitError("bad_input", "no identity element")
        self.identity = ident[0]
        self._inv = {}
        for a in self.names:
            b = next((b for b in self.names if self.table[a, b] == self.identity), None)
            if b is None:
                raise ToolkitError("bad_input", f"{a} has no inverse")
            self._inv[a] = b
        for a in self.names:
            for b in self.names:
                for c in self.names:
                    if self.table[self.table[a, b], c] != self.table[a, self.table[b, c]]:
                        raise ToolkitError("bad_input", "table is not associative")

    def mul(self, x, y):
        return self.table[x, y]

    def inv(self, x):
        return self._inv[x]

    def contains(self, x) -> bool:
        return x in self._inv

    def elements(self) -> list:
        return list(self.names)

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteGroup":
        return cls(data["elements"], data["table"])


class CyclicGroup(Group):
    def __init__(self, n: int):
        self.n = n
        self.identity = 0

    def mul(self, x, y):
        return (x + y) % self.n

    def inv(self, x):
        return -x % self.n

    def contains(self, x) -> bool:
        return isinstance(x, int) and 0 <= x < self.n

    def elements(self) -> list:
        return list(range(self.n))


class MatrixGroup(Group):
    """Integer 2x2 matrices as row-major 4-tuples, optionally modulo sign."""

    def __init__(self, projective: bool = False):
        self.projective = projective
        self.identity = (1, 0, 0, 1)

    def _norm(self, m):
        if self.projective and next(x for x in m if x != 0) < 0:
            return tuple(-x for x in m)
        return tuple(m)

    def mul(self, x, y):
        a, b, c, d = x
        e, f, g, h = y
        return self._norm((a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h))

    def inv(self, x):
        a, b, c, d = x
        return self._norm((d, -b, -c, a))

    def contains(self, x) -> bool:
        return len(x) == 4 and x[0] * x[3] - x[1] * x[2] == 1


@dataclass
class Edge:
    """Edge ``u - v`` with group ``A`` embedded in both ends.

    ``to_v`` maps elements of ``A`` inside ``G_u`` to their copies in ``G_v``;
    ``to_u`` is the inverse map.  ``rep_u(x)`` returns the chosen
    representative of the coset ``x A`` in ``G_u`` (and the identity on ``A``).
    """

    u: Hashable
    v: Hashable
    in_u: Callable
    in_v: Callable
    to_v: Callable
    to_u: Callable
    rep_u: Callable
    rep_v: Callable

    def member(self, side, x) -> bool:
        return self.in_u(x) if side == self.u else self.in_v(x)

    def across(self, side, x):
        return self.to_v(x) if side == self.u else self.to_u(x)

    def rep(self, side, x):
        return self.rep_u(x) if side == self.u else self.rep_v(x)

    def other(self, side):
        return self.v if side == self.u else self.u


def transversal(group: Group, members: Callable, reps: Sequence) -> Callable:
    """Coset chooser from an explicit list of left coset representatives."""
    reps = list(reps)
    if group.identity not in reps:
        raise ToolkitError("bad_input", "representatives must include the identity")

    def choose(x):
        for r in reps:
            if members(group.mul(group.inv(r), x)):
                return r
        raise ToolkitError("oracle_violation", f"no representative for {x!r}")

    return choose


class TreeOfGroups:
    def __init__(self, groups: Mapping[Hashable, Group], edges: Sequence[Edge], base=None):
        self.groups = dict(groups)
        self.edges = list(edges)
        self.base = base if base is not None else next(iter(self.groups))
        self.adj: dict = {v: {} for v in self.groups}
        for e in self.edges:
            if e.u not in self.groups or e.v not in self.groups or e.u == e.v:
                raise ToolkitError("bad_input", f"bad edge {e.u}-{e.v}")
            self.adj[e.u][e.v] = e
            self.adj[e.v][e.u] = e
        if len(self.edges) != len(self.groups) - 1 or len(self._reach(self.base)) != len(self.groups):
            raise ToolkitError("bad_input", "underlying graph is not a tree")

    def _reach(self, v) -> dict:
        """Parent pointers of the tree rooted at ``v``."""
        parent = {v: None}
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for y in self.adj[x]:
                if y not in parent:
                    parent[y] = x
                    queue.append(y)
        return parent

    def geodesic(self, a, b) -> list:
        parent = self._reach(a)
        path = [b]
        while path[-1] != a:
            path.append(parent[path[-1]])
        return path[::-1]

    def check(self, v, x):
        if v not in self.groups:
            raise ToolkitError("bad_input", f"unknown vertex {v!r}")
        if not self.groups[v].contains(x):
            raise ToolkitError("oracle_violation", f"{x!r} is not in G_{v}")

    # -- path words ---------------------------------------------------------

    def _path(self, word: Sequence[Letter], end=None) -> tuple[list, list]:
        """Vertex sequence and letters of the path spelled by ``word``."""
        end = self.base if end is None else end
        verts, elems = [self.base], [self.groups[self.base].identity]
        for v, x in word:
            self.check(v, x)
            for w in self.geodesic(verts[-1], v)[1:]:
                verts.append(w)
                elems.append(self.groups[w].identity)
            g = self.groups[v]
            elems[-1] = g.mul(elems[-1], x)
        for w in self.geodesic(verts[-1], end)[1:]:
            verts.append(w)
            elems.append(self.groups[w].identity)
        return verts, elems

    def _normalize(self, verts: list, elems: list) -> tuple[list, list]:
        verts, elems = list(verts), list(elems)
        i = 0
        while i < len(verts) - 1:
            v, w = verts[i], verts[i + 1]
            e = self.adj[v][w]
            g = self.groups[v]
            x = elems[i]
            r = e.rep(v, x)
            a = g.mul(g.inv(r), x)
            if not e.member(v, a):
                raise ToolkitError("oracle_violation", f"coset chooser failed on {x!r}")
            b = e.across(v, a)
            self.check(w, b)
            elems[i] = r
            elems[i + 1] = self.groups[w].mul(b, elems[i + 1])
            if i > 0 and g.is_identity(r) and verts[i - 1] == w:
                # backtrack over a trivial letter
                merged = self.groups[w].mul(elems[i - 1], elems[i + 1])
                verts[i - 1:i + 2] = [w]
                elems[i - 1:i + 2] = [merged]
                i -= 1
                continue
            i += 1
        return verts, elems

    def _letters(self, verts: list, elems: list) -> list:
        return [(v, x) for v, x in zip(verts, elems) if not self.groups[v].is_identity(x)]

    def normal_form(self, word: Sequence[Letter]) -> list:
        verts, elems = self._normalize(*self._path(word))
        return self._letters(verts, elems)

    def multiply(self, *words: Sequence[Letter]) -> list:
        return self.normal_form([l for w in words for l in w])

    def inverse(self, word: Sequence[Letter]) -> list:
        return [(v, self.groups[v].inv(x)) for v, x in reversed(word)]

    def length(self, word: Sequence[Letter]) -> int:
        return len(self.normal_form(word))

    def equal(self, u: Sequence[Letter], v: Sequence[Letter]) -> bool:
        return self.normal_form(u) == self.normal_form(v)

    # -- Bass-Serre tree ------------------------------------------------------

    def vertex_key(self, word: Sequence[Letter], v) -> tuple:
        """Canonical key of the coset ``g G_v`` of the Bass-Serre tree."""
        verts, elems = self._normalize(*self._path(word, v))
        return tuple(zip(verts[:-1], elems[:-1])) + ((verts[-1], None),)

    def key_word(self, key: tuple) -> list:
        return [(v, x) for v, x in key[:-1] if not self.groups[v].is_identity(x)]

    def act(self, word: Sequence[Letter], key: tuple) -> tuple:
        return self.vertex_key(list(word) + self.key_word(key), key[-1][0])

    @staticmethod
    def depth(key: tuple) -> int:
        return len(key) - 1

    @staticmethod
    def parent(key: tuple):
        if len(key) == 1:
            return None
        return key[:-2] + ((key[-2][0], None),)

    def stabilizes(self, word: Sequence[Letter], key: tuple) -> bool:
        return self.act(word, key) == key

    def bounded_fixed_vertex(self, gens: Sequence[Sequence[Letter]], length_bound: int,
                             horizon: int) -> tuple[list, Hashable]:
        """Vertex of the Bass-Serre tree fixed by the subgroup spanned by ``gens``.

        Returns ``(g, v)`` such that ``g^-1 h g`` lies in ``G_v`` for every
        generator ``h``.
        """
        gens = [self.normal_form(h) for h in gens]
        for h in gens:
            if len(h) > length_bound:
                raise ToolkitError("length_exceeded", {"length": len(h), "bound": length_bound})
        moves = gens + [self.inverse(h) for h in gens]
        seed = ((self.base, None),)
        orbit = {seed}
        queue = deque([seed])
        while queue:
            k = queue.popleft()
            for h in moves:
                k2 = self.act(h, k)
                if self.depth(k2) > horizon:
                    raise ToolkitError("no_fixed_vertex_within_horizon", horizon)
                if k2 not in orbit:
                    orbit.add(k2)
                    queue.append(k2)
        # subtree spanned by the orbit: geodesics back to the seed
        span = set()
        for k in orbit:
            while k is not None and k not in span:
                span.add(k)
                k = self.parent(k)
        nbrs: dict = {k: set() for k in span}
        for k in span:
            p = self.parent(k)
            if p is not None:
                nbrs[k].add(p)
                nbrs[p].add(k)
        # prune extremal vertices until a centre remains
        while len(span) > 2:
            leaves = {k for k in span if len(nbrs[k]) <= 1}
            for k in leaves:
                for m in nbrs.pop(k):
                    nbrs[m].discard(k)
            span -= leaves
        centre = min(span, key=lambda k: (self.depth(k), repr(k)))
        if not all(self.stabilizes(h, centre) for h in gens):
            raise ToolkitError("no_fixed_vertex_within_horizon", horizon)
        return self.key_word(centre), centre[-1][0]


# ---------------------------------------------------------------------------
# graphs of groups: path reduction


@dataclass
class GraphEdge:
    """Arrow ``s -> t`` with group ``G_sigma`` and monomorphisms kappa, lambda.

    ``kappa_pre(x)`` / ``lambda_pre(x)`` return the preimage of ``x`` in the
    edge group, or ``None`` when ``x`` is not in the image.  The optional
    ``rep_source(x)`` / ``rep_target(x)`` choose representatives of the cosets
    ``x kappa(G_sigma)`` and ``x lambda(G_sigma)``; with them reduced paths get
    a canonical form.
    """

    source: Hashable
    target: Hashable
    kappa: Callable
    lam: Callable
    kappa_pre: Callable
    lambda_pre: Callable
    rep_source: Callable | None = None
    rep_target: Callable | None = None


class GraphOfGroups:
    def __init__(self, groups: Mapping[Hashable, Group], edges: Mapping[Hashable, GraphEdge]):
        self.groups = dict(groups)
        self.edges = dict(edges)

    def ends(self, arrow) -> tuple:
        e = self.edges[arrow[0]]
        return (e.source, e.target) if arrow[1] == 1 else (e.target, e.source)

    def validate(self, path: Sequence) -> list:
        """Vertex sequence of a path ``[g0, arrow1, g1, ...]``; arrows are ``(edge, +-1)``."""
        if len(path) % 2 == 0:
            raise ToolkitError("bad_path", "a path has odd length")
        arrows = path[1::2]
        verts = []
        for arrow in arrows:
            if not isinstance(arrow, tuple) or arrow[0] not in self.edges or arrow[1] not in (1, -1):
                raise ToolkitError("bad_path", f"bad arrow {arrow!r}")
        if arrows:
            verts = [self.ends(arrows[0])[0]] + [self.ends(a)[1] for a in arrows]
            for a, b in zip(arrows, arrows[1:]):
                if self.ends(a)[1] != self.ends(b)[0]:
                    raise ToolkitError("bad_path", f"arrows {a!r} and {b!r} do not compose")
        return verts

    def _rewrite(self, path: list, i: int):
        """Apply a relation at arrow position ``i`` (index of sigma), or return None."""
        if i + 2 >= len(path):
            return None
        sigma, x, back = path[i], path[i + 1], path[i + 2]
        if back != (sigma[0], -sigma[1]):
            return None
        e = self.edges[sigma[0]]
        if sigma[1] == 1:
            h = e.lambda_pre(x)
            img = None if h is None else e.kappa(h)
            g = self.groups[e.source]
        else:
            h = e.kappa_pre(x)
            img = None if h is None else e.lam(h)
            g = self.groups[e.target]
        if img is None:
            return None
        merged = g.mul(g.mul(path[i - 1], img), path[i + 3])
        return path[:i - 1] + [merged] + path[i + 4:]

    def reduce(self, path: Sequence, choose: Callable[[list], int] | None = None) -> list:
        """Apply both relations until neither applies, then slide to coset representatives.

        ``choose`` picks among the applicable positions; by default the first.
        """
        path = list(path)
        verts = self.validate(path)
        if verts:
            for g, v in zip(path[0::2], verts):
                if not self.groups[v].contains(g):
                    raise ToolkitError("bad_path", f"{g!r} is not in G_{v}")
        while True:
            spots = [i for i in range(1, len(path), 2) if self._rewrite(path, i) is not None]
            if not spots:
                return self._slide(path)
            i = spots[0] if choose is None else choose(spots)
            path = self._rewrite(path, i)

    def _slide(self, path: list) -> list:
        """Move edge-group parts rightwards through each arrow, keeping coset representatives.

        Left unchanged unless every arrow on the path has representative choosers.
        """
        arrows = path[1::2]
        if any(self.edges[a[0]].rep_source is None or self.edges[a[0]].rep_target is None for a in arrows):
            return path
        path = list(path)
        for i in range(1, len(path), 2):
            e = self.edges[path[i][0]]
            start, end = self.ends(path[i])
            g, x = self.groups[start], path[i - 1]
            if path[i][1] == 1:
                r = e.rep_source(x)
                h = e.kappa_pre(g.mul(g.inv(r), x))
                img = None if h is None else e.lam(h)
            else:
                r = e.rep_target(x)
                h = e.lambda_pre(g.mul(g.inv(r), x))
                img = None if h is None else e.kappa(h)
            if img is None:
                raise ToolkitError("oracle_violation", f"coset chooser failed on {x!r}")
            path[i - 1] = r
            path[i + 1] = self.groups[end].mul(img, path[i + 1])
        return path


def gog_reduce(graph: GraphOfGroups, path: Sequence, choose=None) -> list:
    return graph.reduce(path, choose)


# ---------------------------------------------------------------------------
# shipped instances


def cyclic_amalgam(m: int, n: int, k: int) -> TreeOfGroups:
    """``Z/m *_{Z/k} Z/n`` with the edge group generated by ``m/k`` and ``n/k``."""
    if m % k or n % k or k in (m, n):
        raise ToolkitError("bad_params", {"m": m, "n": n, "k": k})
    gm, gn = CyclicGroup(m), CyclicGroup(n)
    sm, sn = m // k, n // k
    edge = Edge(
        "P", "Q",
        in_u=lambda x: x % sm == 0,
        in_v=lambda y: y % sn == 0,
        to_v=lambda x: (x // sm) * sn % n,
        to_u=lambda y: (y // sn) * sm % m,
        rep_u=lambda x: x % sm,
        rep_v=lambda y: y % sn,
    )
    return TreeOfGroups({"P": gm, "Q": gn}, [edge], base="P")


def tree_from_json(data: Mapping) -> TreeOfGroups:
    """Finite tree of groups from multiplication tables.

    Each edge gives ``pairs`` (matching elements of the edge group in both
    ends) and coset representatives ``reps_u`` / ``reps_v``.
    """
    try:
        groups = {v: FiniteGroup.from_json(g) for v, g in data["groups"].items()}
        edges = []
        for e in data["edges"]:
            u, v = e["u"], e["v"]
            fwd = {a: b for a, b in e["pairs"]}
            bwd = {b: a for a, b in e["pairs"]}
            edges.append(Edge(
                u, v,
                in_u=fwd.__contains__, in_v=bwd.__contains__,
                to_v=fwd.__getitem__, to_u=bwd.__getitem__,
                rep_u=transversal(groups[u], fwd.__contains__, e["reps_u"]),
                rep_v=transversal(groups[v], bwd.__contains__, e["reps_v"]),
            ))
        return TreeOfGroups(groups, edges, base=data.get("base"))
    except (KeyError, TypeError) as exc:
        raise ToolkitError("bad_input", f"tree of groups: {exc}") from exc


def word_to_json(word: Sequence[Letter]) -> list:
    return [[v, x] for v, x in word]


def word_from_json(data) -> list:
    return [(v, x) for v, x in data]
