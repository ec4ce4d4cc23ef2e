"""Combinatorial noded Riemann surfaces.

A surface is a decorated multigraph: domain components (vertices) carry a
genus, marked points sit on components, and nodal pairs {x, y} join two
points (possibly on the same component).  Points are opaque labels; only
their incidence matters.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

MAX_CANONICAL_COMPONENTS = 8


class SurfaceError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class SpecialPoint:
    component: str
    point: str


@dataclass(frozen=True)
class DomainComponent:
    id: str
    genus: int = 0


@dataclass(frozen=True)
class NodedSurface:
    components: tuple[DomainComponent, ...]
    marked: tuple[SpecialPoint, ...] = ()
    nodes: tuple[tuple[SpecialPoint, SpecialPoint], ...] = ()
    ordered: bool = True
    energy: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        comps = tuple(self.components)
        ids = [c.id for c in comps]
        if len(set(ids)) != len(ids):
            raise SurfaceError("component ids must be unique")
        for c in comps:
            if c.genus < 0:
                raise SurfaceError(f"negative genus on {c.id}")
        idset = set(ids)
        nodes = tuple(tuple(sorted(pair)) for pair in self.nodes)
        endpoints = [p for pair in nodes for p in pair]
        # distinct pairs must not share endpoints, and a pair has two ends
        if len(set(endpoints)) != len(endpoints):
            raise SurfaceError("nodal pairs must be disjoint")
        marked = tuple(self.marked)
        if len(set(marked)) != len(marked):
            raise SurfaceError("marked points must be distinct")
        if set(marked) & set(endpoints):
            raise SurfaceError("marked points and nodal points must be disjoint")
        for p in list(marked) + endpoints:
            if p.component not in idset:
                raise SurfaceError(f"point {p} on unknown component")
        if self.energy is not None:
            for k, v in self.energy.items():
                if k not in idset:
                    raise SurfaceError(f"energy given for unknown component {k}")
                if v < 0:
                    raise SurfaceError("energies must be non-negative")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "marked", marked)
        object.__setattr__(self, "nodes", tuple(sorted(nodes)))

    def component(self, cid: str) -> DomainComponent:
        for c in self.components:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def special_count(self) -> Counter:
        """Number of special points (marked + nodal) per component id."""
        cnt = Counter({c.id: 0 for c in self.components})
        for p in self.marked:
            cnt[p.component] += 1
        for pair in self.nodes:
            for p in pair:
                cnt[p.component] += 1
        return cnt


def is_connected(S: NodedSurface) -> bool:
    if not S.components:
        return False
    adj = defaultdict(set)
    for x, y in S.nodes:
        adj[x.component].add(y.component)
        adj[y.component].add(x.component)
    start = S.components[0].id
    seen = {start}
    stack = [start]
    while stack:
        c = stack.pop()
        for nb in adj[c]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(S.components)


def arithmetic_genus(S: NodedSurface) -> int:
    if not is_connected(S):
        raise SurfaceError("not connected")
    return 1 + len(S.nodes) + sum(c.genus - 1 for c in S.components)


def is_stable(S: NodedSurface) -> bool:
    """Domain stability, or stable-map stability when ``S.energy`` is set."""
    special = S.special_count()
    for c in S.components:
        if 2 * c.genus + special[c.id] >= 3:
            continue
        if S.energy is not None and S.energy.get(c.id, 0.0) > 0:
            continue
        return False
    return True


def _weed_once(S: NodedSurface, order: Sequence[str]) -> NodedSurface | None:
    """Apply one weeding step to the first unstable component in ``order``.

    Returns None when every component is stable.
    """
    special = S.special_count()
    for cid in order:
        comp = S.component(cid)
        if 2 * comp.genus + special[cid] >= 3:
            continue
        if comp.genus != 0:
            raise SurfaceError("no weeding rule applies")
        own_pairs = [pair for pair in S.nodes if any(p.component == cid for p in pair)]
        own_marked = [i for i, p in enumerate(S.marked) if p.component == cid]
        n_nodal = sum(1 for pair in own_pairs for p in pair if p.component == cid)
        self_node = any(pair[0].component == cid and pair[1].component == cid for pair in own_pairs)
        comps = tuple(c for c in S.components if c.id != cid)
        if self_node:
            raise SurfaceError("no weeding rule applies")
        if n_nodal == 1 and not own_marked:
            nodes = tuple(pair for pair in S.nodes if pair not in own_pairs)
            return NodedSurface(comps, S.marked, nodes, S.ordered)
        if n_nodal == 2 and not own_marked:
            (p1, p2) = own_pairs
            y = p1[1] if p1[0].component == cid else p1[0]
            y2 = p2[1] if p2[0].component == cid else p2[0]
            nodes = tuple(pair for pair in S.nodes if pair not in own_pairs) + ((y, y2),)
            return NodedSurface(comps, S.marked, nodes, S.ordered)
        if n_nodal == 1 and len(own_marked) == 1:
            (pair,) = own_pairs
            y = pair[1] if pair[0].component == cid else pair[0]
            marked = list(S.marked)
            marked[own_marked[0]] = y
            nodes = tuple(p for p in S.nodes if p != pair)
            return NodedSurface(comps, tuple(marked), nodes, S.ordered)
        raise SurfaceError("no weeding rule applies")
    return None


def stabilize(S: NodedSurface, order: Sequence[str] | None = None) -> NodedSurface:
    """Weed out unstable sphere components until the surface is stable.

    ``order`` fixes the priority in which unstable components are removed
    (default: ascending component id).  The energy decoration is dropped.
    """
    if not is_connected(S):
        raise SurfaceError("not connected")
    if 2 * arithmetic_genus(S) + len(S.marked) < 3:
        raise SurfaceError("unstabilizable")
    ids = [c.id for c in S.components]
    if order is None:
        order = sorted(ids)
    else:
        order = list(order) + sorted(set(ids) - set(order))
    cur = replace(S, energy=None)
    while True:
        alive = {c.id for c in cur.components}
        nxt = _weed_once(cur, [c for c in order if c in alive])
        if nxt is None:
            return cur
        cur = nxt


def forget_marked_point(S: NodedSurface, index: int) -> NodedSurface:
    """Drop marked point ``index`` (0-based) and re-stabilize."""
    if not S.ordered:
        raise SurfaceError("forgetting a point needs ordered marked points")
    if not (0 <= index < len(S.marked)):
        raise SurfaceError(f"invalid marked-point index {index}")
    marked = S.marked[:index] + S.marked[index + 1:]
    return stabilize(NodedSurface(S.components, marked, S.nodes, S.ordered))


def _refined_colors(S: NodedSurface, idx: dict[str, int]) -> list:
    n = len(S.components)
    marked_sig = [[] for _ in range(n)]
    for i, p in enumerate(S.marked):
        marked_sig[idx[p.component]].append(i if S.ordered else 0)
    selfn = [0] * n
    nbrs = [[] for _ in range(n)]
    for x, y in S.nodes:
        a, b = idx[x.component], idx[y.component]
        if a == b:
            selfn[a] += 1
        else:
            nbrs[a].append(b)
            nbrs[b].append(a)
    colors = [
        (S.components[i].genus, tuple(sorted(marked_sig[i])), selfn[i], len(nbrs[i]))
        for i in range(n)
    ]
    while True:
        sig = [(colors[i], tuple(sorted(colors[j] for j in nbrs[i]))) for i in range(n)]
        ranks = {s: r for r, s in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def canonical_form(S: NodedSurface) -> tuple:
    """Relabeling-invariant encoding (minimum over admissible relabelings)."""
    n = len(S.components)
    if n > MAX_CANONICAL_COMPONENTS:
        raise SurfaceError(f"canonical form supports at most {MAX_CANONICAL_COMPONENTS} components")
    ids = [c.id for c in S.components]
    idx = {cid: i for i, cid in enumerate(ids)}
    colors = _refined_colors(S, idx)
    classes = defaultdict(list)
    for i, col in enumerate(colors):
        classes[col].append(i)
    class_keys = sorted(classes)
    genus = [c.genus for c in S.components]
    marked_comp = [idx[p.component] for p in S.marked]
    node_comp = [(idx[x.component], idx[y.component]) for x, y in S.nodes]
    best = None
    for choice in itertools.product(*(itertools.permutations(classes[k]) for k in class_keys)):
        perm = [i for block in choice for i in block]
        label = [0] * n
        for new, old in enumerate(perm):
            label[old] = new
        marked = tuple(label[c] for c in marked_comp)
        if not S.ordered:
            marked = tuple(sorted(marked))
        nodes = tuple(sorted(tuple(sorted((label[a], label[b]))) for a, b in node_comp))
        enc = (n, tuple(genus[i] for i in perm), marked, nodes, S.ordered)
        if best is None or enc < best:
            best = enc
    return best


def from_canonical(enc: tuple) -> NodedSurface:
    """Rebuild a representative surface from a canonical encoding."""
    n, genera, marked, nodes, ordered = enc
    comps = tuple(DomainComponent(f"c{i}", g) for i, g in enumerate(genera))
    counter = Counter()

    def fresh(c):
        counter[c] += 1
        return SpecialPoint(f"c{c}", f"p{counter[c]}")

    mk = tuple(fresh(c) for c in marked)
    nd = tuple((fresh(a), fresh(b)) for a, b in nodes)
    return NodedSurface(comps, mk, nd, ordered)


# --- JSON -----------------------------------------------------------------

def to_json_dict(S: NodedSurface) -> dict:
    out = {
        "ordered": S.ordered,
        "components": [{"id": c.id, "genus": c.genus} for c in S.components],
        "marked": [{"component": p.component, "point": p.point} for p in S.marked],
        "nodes": [
            [{"component": x.component, "point": x.point}, {"component": y.component, "point": y.point}]
            for x, y in S.nodes
        ],
    }
    if S.energy is not None:
        out["energy"] = dict(S.energy)
    return out


def from_json_dict(d: dict) -> NodedSurface:
    try:
        comps = tuple(DomainComponent(str(c["id"]), int(c["genus"])) for c in d["components"])
        marked = tuple(SpecialPoint(str(p["component"]), str(p["point"])) for p in d.get("marked", []))
        nodes = []
        for pair in d.get("nodes", []):
            if len(pair) != 2:
                raise SurfaceError("a nodal pair needs exactly two points")
            x, y = (SpecialPoint(str(p["component"]), str(p["point"])) for p in pair)
            nodes.append((x, y))
        energy = d.get("energy")
        if energy is not None:
            energy = {str(k): float(v) for k, v in energy.items()}
        return NodedSurface(comps, marked, tuple(nodes), bool(d.get("ordered", True)), energy)
    except (KeyError, TypeError) as exc:
        raise SurfaceError(f"malformed surface JSON: {exc}") from exc


def dumps(S: NodedSurface) -> str:
    return json.dumps(to_json_dict(S), indent=1, sort_keys=True)


def loads(text: str) -> NodedSurface:
    return from_json_dict(json.loads(text))


# --- random surfaces ------------------------------------------------------

def random_connected_surface(rng: np.random.Generator, max_components: int = 8,
                             ordered: bool = True) -> NodedSurface:
    """A random connected surface with 2 g_a + #M >= 3.

    Mostly genus-0 components so that weeding has work to do.
    """
    while True:
        n = int(rng.integers(1, max_components + 1))
        genera = [int(rng.choice([0, 0, 0, 1, 2])) for _ in range(n)]
        comps = tuple(DomainComponent(f"v{i}", g) for i, g in enumerate(genera))
        counter = Counter()

        def fresh(i):
            counter[i] += 1
            return SpecialPoint(f"v{i}", f"q{counter[i]}")

        nodes = []
        for i in range(1, n):
            j = int(rng.integers(0, i))
            nodes.append((fresh(i), fresh(j)))
        for _ in range(int(rng.integers(0, 3))):
            i, j = (int(x) for x in rng.integers(0, n, size=2))
            nodes.append((fresh(i), fresh(j)))
        marked = tuple(fresh(int(rng.integers(0, n))) for _ in range(int(rng.integers(0, 5))))
        S = NodedSurface(comps, marked, tuple(nodes), ordered)
        if 2 * arithmetic_genus(S) + len(S.marked) >= 3:
            return S
