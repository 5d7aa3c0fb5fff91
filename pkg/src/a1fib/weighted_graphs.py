"""Integer-weighted dual graphs: trees, zigzags and the moves between them.

A zigzag is a chain of rational curves recorded by its self-intersection
weights.  Every move on a chain is logged as a :class:`Move` so that a
standard form can be replayed from the original input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import ToolkitError

ROLES = ("plain", "section", "fiber_at_infinity", "feather_bridge")


@dataclass(frozen=True)
class Vertex:
    id: str
    weight: int
    role: str = "plain"


@dataclass(frozen=True)
class WeightedTree:
    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise ToolkitError("bad_input", "duplicate vertex ids")
        for v in self.vertices:
            if v.role not in ROLES:
                raise ToolkitError("bad_input", f"unknown role {v.role!r}")
        if sum(v.role == "section" for v in self.vertices) > 1:
            raise ToolkitError("bad_input", "more than one section vertex")
        known = set(ids)
        seen = set()
        for a, b in self.edges:
            if a not in known or b not in known or a == b:
                raise ToolkitError("bad_input", f"bad edge {(a, b)}")
            key = frozenset((a, b))
            if key in seen:
                raise ToolkitError("bad_input", f"repeated edge {(a, b)}")
            seen.add(key)
        if self.vertices and not _is_tree(ids, self.edges):
            raise ToolkitError("bad_input", "edges do not form a tree")
        for v in self.vertices:
            if v.role == "feather_bridge" and len(self.vertices) > 1 and not self.neighbors(v.id):
                raise ToolkitError("bad_input", "isolated feather bridge")

    @classmethod
    def chain(cls, weights: Sequence[int], prefix: str = "C") -> "WeightedTree":
        vs = tuple(Vertex(f"{prefix}{i}", int(w)) for i, w in enumerate(weights))
        es = tuple((vs[i].id, vs[i + 1].id) for i in range(len(vs) - 1))
        return cls(vs, es)

    def vertex(self, vid: str) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise ToolkitError("bad_index", vid)

    def neighbors(self, vid: str) -> list[str]:
        out = []
        for a, b in self.edges:
            if a == vid:
                out.append(b)
            elif b == vid:
                out.append(a)
        return out

    def degree(self, vid: str) -> int:
        return len(self.neighbors(vid))

    def is_path(self) -> bool:
        return all(self.degree(v.id) <= 2 for v in self.vertices)

    def path_order(self) -> list[str]:
        """Vertex ids from one end of a path to the other (first-listed end first)."""
        if not self.is_path():
            raise ToolkitError("bad_input", "not a chain")
        if not self.vertices:
            return []
        ends = [v.id for v in self.vertices if self.degree(v.id) <= 1]
        order, prev = [ends[0]], None
        while True:
            nxt = [u for u in self.neighbors(order[-1]) if u != prev]
            if not nxt:
                return order
            prev = order[-1]
            order.append(nxt[0])

    def replace(self, weights: Mapping[str, int] | None = None, drop: Iterable[str] = (),
                add_edges: Iterable[tuple[str, str]] = ()) -> "WeightedTree":
        weights = weights or {}
        drop = set(drop)
        vs = tuple(Vertex(v.id, weights.get(v.id, v.weight), v.role) for v in self.vertices if v.id not in drop)
        es = tuple(e for e in self.edges if e[0] not in drop and e[1] not in drop) + tuple(add_edges)
        return WeightedTree(vs, es)

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": v.id, "weight": v.weight, "role": v.role} for v in self.vertices],
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "WeightedTree":
        try:
            vs = tuple(Vertex(str(v["id"]), int(v["weight"]), v.get("role", "plain")) for v in data["vertices"])
            es = tuple((str(a), str(b)) for a, b in data.get("edges", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise ToolkitError("bad_input", str(exc)) from exc
        return cls(vs, es)

    def to_dot(self, multiplicities: Mapping[str, int] | None = None) -> str:
        lines = ["graph G {"]
        for v in self.vertices:
            label = f"{v.id}:{v.weight}"
            if multiplicities and v.id in multiplicities:
                label += f" m={multiplicities[v.id]}"
            shape = {"section": "box", "fiber_at_infinity": "diamond", "feather_bridge": "ellipse, style=dashed"}
            extra = f", shape={shape[v.role]}" if v.role in shape else ""
            lines.append(f'  "{v.id}" [label="{label}"{extra}];')
        for a, b in self.edges:
            lines.append(f'  "{a}" -- "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _is_tree(ids: Sequence[str], edges: Sequence[tuple[str, str]]) -> bool:
    if len(edges) != len(ids) - 1:
        return False
    parent = {i: i for i in ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


# ---------------------------------------------------------------------------
# zigzags


@dataclass(frozen=True)
class Zigzag:
    weights: tuple[int, ...]
    standard: bool = False
    reversed_form: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))

    def __len__(self):
        return len(self.weights)

    def to_tree(self) -> WeightedTree:
        return WeightedTree.chain(self.weights)

    def to_json(self) -> list[int]:
        return list(self.weights)


@dataclass(frozen=True)
class Move:
    """One logged step.

    kinds: ``elementary`` (index, direction), ``blowup_edge`` (edge between
    index and index+1), ``blowup_end`` (direction names the end),
    ``blowdown`` (index), ``flip`` (reverse the labelling).
    """

    kind: str
    index: int = 0
    direction: str = ""

    def to_json(self) -> dict:
        d = {"kind": self.kind}
        if self.kind in ("elementary", "blowup_edge", "blowdown"):
            d["index"] = self.index
        if self.direction:
            d["direction"] = self.direction
        return d


def is_standard_weights(w: Sequence[int]) -> bool:
    if all(x == 0 for x in w) and 1 <= len(w) <= 4:
        return True
    return len(w) >= 2 and w[0] == 0 and w[1] == 0 and all(x <= -2 for x in w[2:])


def _elementary(w: list[int], i: int, direction: str) -> None:
    if not 0 <= i < len(w):
        raise ToolkitError("bad_index", i)
    if direction not in ("left", "right"):
        raise ToolkitError("bad_input", f"direction {direction!r}")
    if w[i] != 0:
        raise ToolkitError("not_applicable", f"weight {w[i]} at vertex {i}")
    # blow up the edge on the named side, then contract the old vertex
    s = 1 if direction == "right" else -1
    if i - 1 >= 0:
        w[i - 1] += s
    if i + 1 < len(w):
        w[i + 1] -= s


def apply_move(w: list[int], mv: Move) -> None:
    """Apply one move to a weight list in place."""
    if mv.kind == "elementary":
        _elementary(w, mv.index, mv.direction)
    elif mv.kind == "blowup_edge":
        i = mv.index
        if not 0 <= i < len(w) - 1:
            raise ToolkitError("bad_index", i)
        w[i] -= 1
        w[i + 1] -= 1
        w.insert(i + 1, -1)
    elif mv.kind == "blowup_end":
        if not w:
            raise ToolkitError("bad_index", 0)
        if mv.direction == "right":
            w[-1] -= 1
            w.append(-1)
        else:
            w[0] -= 1
            w.insert(0, -1)
    elif mv.kind == "blowdown":
        i = mv.index
        if not 0 <= i < len(w):
            raise ToolkitError("bad_index", i)
        if w[i] != -1:
            raise ToolkitError("not_contractible_vertex", f"weight {w[i]}")
        if i - 1 >= 0:
            w[i - 1] += 1
        if i + 1 < len(w):
            w[i + 1] += 1
        del w[i]
    elif mv.kind == "flip":
        w.reverse()
    else:
        raise ToolkitError("bad_input", f"unknown move {mv.kind!r}")


def replay(z: Zigzag | Sequence[int], log: Iterable[Move]) -> tuple[int, ...]:
    w = list(z.weights if isinstance(z, Zigzag) else z)
    for mv in log:
        apply_move(w, mv)
    return tuple(w)


def elementary_transform(z: Zigzag, vertex_index: int, direction: str) -> Zigzag:
    """Elementary transformation at a weight-0 vertex.

    ``right`` blows up the edge towards the next vertex and contracts the old
    vertex: the left neighbour gains one, the right neighbour loses one.
    ``left`` is the mirror image, hence the inverse move.
    """
    w = list(z.weights)
    _elementary(w, vertex_index, direction)
    return Zigzag(tuple(w))


class _Recorder:
    def __init__(self, weights: Sequence[int]):
        self.w = list(weights)
        self.log: list[Move] = []

    def do(self, kind: str, index: int = 0, direction: str = "", times: int = 1) -> None:
        for _ in range(times):
            mv = Move(kind, index, direction)
            apply_move(self.w, mv)
            self.log.append(mv)

    def set_neighbor_zero(self, i: int, j: int) -> None:
        """Use elementary moves at the zero vertex i to make neighbour j zero."""
        target = self.w[j]
        if target == 0:
            return
        # right raises the left neighbour and lowers the right one
        raises = "right" if j < i else "left"
        lowers = "left" if j < i else "right"
        self.do("elementary", i, raises if target < 0 else lowers, abs(target))

    def minimize(self) -> None:
        while len(self.w) > 1 and -1 in self.w:
            self.do("blowdown", self.w.index(-1))


def _standard_tail_reversal(rec: _Recorder) -> None:
    """Carry the leading zero pair across the tail, then relabel."""
    n = len(rec.w)
    if all(x == 0 for x in rec.w):
        return
    for j in range(n - 2):
        # zeros sit at j, j+1; clear w[j+2] using moves at j+1
        rec.set_neighbor_zero(j + 1, j + 2)
    rec.do("flip")


def standardize(z: Zigzag | Sequence[int]) -> tuple[Zigzag, list[Move]]:
    """Bring a chain to the form [[0,0,w2,...]] with every w_i <= -2.

    Chains whose intersection form does not have exactly one positive
    eigenvalue admit no standard form; they come back minimized and tagged
    ``standard=False``.
    """
    weights = z.weights if isinstance(z, Zigzag) else tuple(z)
    if not weights:
        raise ToolkitError("bad_input", "empty zigzag")
    rec = _Recorder(weights)
    rec.minimize()
    w = rec.w
    if not is_standard_weights(w):
        k = next((i for i, x in enumerate(w) if x >= 0), None)
        if k is None:
            return Zigzag(tuple(w)), rec.log
        while w[k] > 0:
            if k == len(w) - 1:
                rec.do("blowup_end", direction="right")
            else:
                rec.do("blowup_edge", k)
        if len(w) == 1:
            return _finish(rec)
        if k > 0:
            rec.set_neighbor_zero(k, k - 1)
            left = k - 1
        else:
            rec.set_neighbor_zero(0, 1)
            left = 0
        # hop the zero pair to the front: [a, 0, 0] -> [0, 0, a]
        for j in range(left, 0, -1):
            rec.set_neighbor_zero(j, j - 1)
        while not is_standard_weights(w):
            j = next(i for i in range(2, len(w)) if w[i] >= -1)
            if w[j] >= 0:
                return Zigzag(tuple(w)), rec.log
            rec.do("blowdown", j)
            if j == 2:
                rec.set_neighbor_zero(0, 1)
    return _finish(rec)


def _finish(rec: _Recorder) -> tuple[Zigzag, list[Move]]:
    ahead = tuple(rec.w)
    other = _Recorder(ahead)
    _standard_tail_reversal(other)
    back = tuple(other.w)
    if back < ahead:
        return Zigzag(back, True, ahead), rec.log + other.log
    return Zigzag(ahead, True, back), rec.log


def revert(z: Zigzag | Sequence[int]) -> Zigzag:
    """[[0,0,w2,...,wn]] -> [[0,0,wn,...,w2]] via zero-pair moves."""
    z, _ = revert_with_log(z)
    return z


def revert_with_log(z: Zigzag | Sequence[int]) -> tuple[Zigzag, list[Move]]:
    weights = z.weights if isinstance(z, Zigzag) else tuple(z)
    if not is_standard_weights(weights):
        raise ToolkitError("not_standard", list(weights))
    rec = _Recorder(weights)
    _standard_tail_reversal(rec)
    return Zigzag(tuple(rec.w), True, tuple(weights)), rec.log


def inertia(weights: Sequence[int]) -> tuple[int, int, int]:
    """(positive, zero, negative) eigenvalue counts of the chain's intersection form.

    The characteristic polynomial of a real symmetric matrix has only real
    roots, so Descartes' sign rule counts the positive ones exactly.
    """
    # p_k(x) = (w_k - x) p_{k-1}(x) - p_{k-2}(x), coefficients low to high
    prev, cur = [1], [1]
    for i, wk in enumerate(weights):
        nxt = [0] * (len(cur) + 1)
        for d, c in enumerate(cur):
            nxt[d] += wk * c
            nxt[d + 1] -= c
        if i > 0:
            for d, c in enumerate(prev):
                nxt[d] -= c
        prev, cur = cur, nxt
    zeros = next(i for i, c in enumerate(cur) if c != 0)
    signs = [c > 0 for c in cur if c != 0]
    pos = sum(a != b for a, b in zip(signs, signs[1:]))
    return pos, zeros, len(weights) - pos - zeros


# ---------------------------------------------------------------------------
# trees: blowdowns, ML classification, fiber contraction


def blowdown_step(t: WeightedTree, vertex_id: str) -> WeightedTree:
    v = t.vertex(vertex_id)
    nbrs = t.neighbors(vertex_id)
    if v.weight != -1 or len(nbrs) > 2 or v.role != "plain":
        raise ToolkitError("not_contractible_vertex", vertex_id)
    weights = {u: t.vertex(u).weight + 1 for u in nbrs}
    join = [tuple(nbrs)] if len(nbrs) == 2 else []
    return t.replace(weights, drop=[vertex_id], add_edges=join)


def minimize_tree(t: WeightedTree) -> WeightedTree:
    while len(t.vertices) > 1:
        cand = [v.id for v in t.vertices if v.weight == -1 and v.role == "plain" and t.degree(v.id) <= 2]
        if not cand:
            break
        t = blowdown_step(t, cand[0])
    return t


def extremal_segments(t: WeightedTree) -> list[list[str]]:
    """Maximal linear branches hanging off branch vertices (the whole chain if linear)."""
    if t.is_path():
        return [t.path_order()]
    out = []
    for v in t.vertices:
        if t.degree(v.id) == 1:
            seg, prev = [v.id], None
            while True:
                nxt = [u for u in t.neighbors(seg[-1]) if u != prev]
                if len(nxt) != 1 or t.degree(nxt[0]) >= 3:
                    break
                prev = seg[-1]
                seg.append(nxt[0])
            out.append(seg)
    return out


def ml_class(g: WeightedTree | Zigzag | Sequence[int], minimal: bool = True) -> str:
    """Makar-Limanov class read off the boundary graph."""
    if isinstance(g, (Zigzag, list, tuple)):
        g = WeightedTree.chain(g.weights if isinstance(g, Zigzag) else g)
    if not g.vertices:
        raise ToolkitError("bad_input", "empty graph")
    if not minimal:
        g = minimize_tree(g)
    if all(all(g.vertex(u).weight <= -2 for u in seg) for seg in extremal_segments(g)):
        return "ML2"
    if not g.is_path():
        return "ML1"
    std, _ = standardize([g.vertex(u).weight for u in g.path_order()])
    if not std.standard:
        raise ToolkitError("bad_input", "chain is not the boundary of an affine surface")
    return "ML1" if std.weights == (0, 0, 0) else "ML0"


def fiber_null_vector(t: WeightedTree, anchor: str) -> dict[str, Fraction] | None:
    """Kernel vector of the intersection matrix normalised to 1 at ``anchor``."""
    ids = [v.id for v in t.vertices]
    idx = {v: i for i, v in enumerate(ids)}
    n = len(ids)
    m = [[Fraction(0)] * n for _ in range(n)]
    for v in t.vertices:
        m[idx[v.id]][idx[v.id]] = Fraction(v.weight)
    for a, b in t.edges:
        m[idx[a]][idx[b]] = m[idx[b]][idx[a]] = Fraction(1)
    # append the normalisation row x_anchor = 1
    rows = [r + [Fraction(0)] for r in m]
    norm = [Fraction(0)] * (n + 1)
    norm[idx[anchor]] = Fraction(1)
    norm[n] = Fraction(1)
    rows.append(norm)
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            return None
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(row[n] != 0 for row in rows[r:]):
        return None
    return {ids[c]: rows[i][n] for i, c in enumerate(piv_cols)}


def fiber_defect(t: WeightedTree, mult: Mapping[str, int]) -> tuple[int, dict[str, int]]:
    """F.F and the list of F.T_i for the divisor F = sum m_i T_i."""
    square = sum(mult[v.id] ** 2 * v.weight for v in t.vertices)
    square += 2 * sum(mult[a] * mult[b] for a, b in t.edges)
    dots = {v.id: mult[v.id] * v.weight + sum(mult[u] for u in t.neighbors(v.id)) for v in t.vertices}
    return square, dots


def contraction_order(fiber: WeightedTree, section_vertex: str,
                      multiplicities: Mapping[str, int] | None = None) -> list[str]:
    """Contract (-1)-components away from the section until one 0-curve remains."""
    if multiplicities is None:
        nv = fiber_null_vector(fiber, section_vertex)
        if nv is None or any(x <= 0 or x.denominator != 1 for x in nv.values()):
            raise ToolkitError("not_a_fiber", "no positive integral null vector")
        multiplicities = {k: int(x) for k, x in nv.items()}
    square, dots = fiber_defect(fiber, multiplicities)
    if square != 0 or any(dots.values()):
        raise ToolkitError("not_a_fiber", {"F.F": square})
    order = []
    t = fiber
    while len(t.vertices) > 1:
        cand = [v.id for v in t.vertices
                if v.weight == -1 and v.id != section_vertex and t.degree(v.id) <= 2]
        if not cand:
            raise ToolkitError("not_a_fiber", "no contractible component off the section")
        vid = cand[-1]
        order.append(vid)
        t = blowdown_step(t.replace() if t.vertex(vid).role == "plain" else _plain(t, vid), vid)
    if t.vertices[0].weight != 0:
        raise ToolkitError("not_a_fiber", "final component is not a 0-curve")
    return order


def _plain(t: WeightedTree, vid: str) -> WeightedTree:
    vs = tuple(Vertex(v.id, v.weight, "plain") if v.id == vid else v for v in t.vertices)
    return WeightedTree(vs, t.edges)
