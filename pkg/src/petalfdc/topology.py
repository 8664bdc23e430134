"""Petal network construction and stratification.

A petal network is ``n`` identical leaves hanging off either a single hub
node or a complete core (one core node per leaf, all core nodes pairwise
adjacent).  Every leaf kind is lowered to a *profile*: a sequence of steps,
one per depth, each either expanding (every node at the previous depth has
``k`` children) or contracting (``k`` consecutive nodes at the previous depth
merge into one).  The depth of a node is its distance from the hub/core and
doubles as its stratum id.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence, Union

from .exceptions import SpecError

EXPAND = "expand"
CONTRACT = "contract"


@dataclass(frozen=True)
class Step:
    kind: str
    k: int

    def width_after(self, width: int) -> int:
        return width * self.k if self.kind == EXPAND else width // self.k


class CoreKind(str, enum.Enum):
    SINGLE_HUB = "hub"
    COMPLETE_CORE = "complete"

    @classmethod
    def parse(cls, value: "CoreKind | str") -> "CoreKind":
        if isinstance(value, cls):
            return value
        aliases = {"hub": cls.SINGLE_HUB, "single_hub": cls.SINGLE_HUB,
                   "singlehub": cls.SINGLE_HUB, "complete": cls.COMPLETE_CORE,
                   "complete_core": cls.COMPLETE_CORE, "ccs": cls.COMPLETE_CORE,
                   "completecore": cls.COMPLETE_CORE}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise SpecError(f"unknown core kind {value!r}") from None


def _check_int(name: str, value, lo: int) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecError(f"{name} must be an integer, got {value!r}")
    if value < lo:
        raise SpecError(f"{name} must be >= {lo}, got {value}")


@dataclass(frozen=True)
class PathBundle:
    """``k`` parallel paths of length ``m`` sharing both end nodes."""

    m: int
    k: int = 1

    def __post_init__(self):
        _check_int("PathBundle.m", self.m, 2)
        _check_int("PathBundle.k", self.k, 1)

    def steps(self) -> tuple[Step, ...]:
        middle = (Step(EXPAND, 1),) * (self.m - 2)
        return (Step(EXPAND, self.k),) + middle + (Step(CONTRACT, self.k),)


@dataclass(frozen=True)
class AsymmetricG:
    """Two trees glued at their leaves.

    ``expand[i]`` is the child count of every node at depth ``i`` of the
    first tree; ``contract[j]`` is how many nodes of the widest level merge
    into one node on the way back down to the terminal node.
    """

    expand: tuple[int, ...]
    contract: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "expand", tuple(self.expand))
        object.__setattr__(self, "contract", tuple(self.contract))
        if not self.expand or not self.contract:
            raise SpecError("AsymmetricG needs non-empty expand and contract lists")
        for i, k in enumerate(self.expand + self.contract):
            _check_int(f"AsymmetricG branching[{i}]", k, 1)
        if math.prod(self.expand) != math.prod(self.contract):
            raise SpecError(
                "AsymmetricG trees must have the same number of leaves: "
                f"prod{list(self.expand)} != prod{list(self.contract)}")

    def steps(self) -> tuple[Step, ...]:
        return (tuple(Step(EXPAND, k) for k in self.expand)
                + tuple(Step(CONTRACT, k) for k in self.contract))


@dataclass(frozen=True)
class SymmetricG:
    """Two balanced ``k``-ary trees of height ``m`` glued at their leaves."""

    m: int
    k: int

    def __post_init__(self):
        _check_int("SymmetricG.m", self.m, 1)
        _check_int("SymmetricG.k", self.k, 1)

    def as_asymmetric(self) -> AsymmetricG:
        return AsymmetricG((self.k,) * self.m, (self.k,) * self.m)

    def steps(self) -> tuple[Step, ...]:
        return self.as_asymmetric().steps()


@dataclass(frozen=True)
class Composite:
    """Leaves chained end to end; segment ``i+1`` hangs off the terminal node of segment ``i``."""

    segments: tuple["LeafKind", ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise SpecError("Composite leaf needs at least one segment")
        for seg in self.segments:
            if not isinstance(seg, (PathBundle, SymmetricG, AsymmetricG, Composite)):
                raise SpecError(f"unsupported composite segment {seg!r}")

    def steps(self) -> tuple[Step, ...]:
        return tuple(s for seg in self.segments for s in seg.steps())


LeafKind = Union[PathBundle, SymmetricG, AsymmetricG, Composite]


@dataclass(frozen=True)
class PetalSpec:
    core: CoreKind
    n: int
    leaf: LeafKind

    def __post_init__(self):
        object.__setattr__(self, "core", CoreKind.parse(self.core))
        _check_int("n", self.n, 2)
        if not isinstance(self.leaf, (PathBundle, SymmetricG, AsymmetricG, Composite)):
            raise SpecError(f"unsupported leaf kind {self.leaf!r}")

    @classmethod
    def path(cls, core, n: int, m: int, k: int) -> "PetalSpec":
        """Petal of order (n, m, k) with path-bundle leaves."""
        return cls(CoreKind.parse(core), n, PathBundle(m, k))

    @property
    def is_hub(self) -> bool:
        return self.core is CoreKind.SINGLE_HUB

    def steps(self) -> tuple[Step, ...]:
        return self.leaf.steps()

    def widths(self) -> tuple[int, ...]:
        """Per-leaf node count at each depth; depth 0 is the root (one per leaf)."""
        w = [1]
        for step in self.steps():
            w.append(step.width_after(w[-1]))
        return tuple(w)

    def label(self) -> str:
        if isinstance(self.leaf, PathBundle):
            return f"{self.core.value}({self.n},{self.leaf.m},{self.leaf.k})"
        return f"{self.core.value}(n={self.n},{leaf_to_dict(self.leaf)})"

    def to_dict(self) -> dict:
        return {"core": self.core.value, "n": self.n, "leaf": leaf_to_dict(self.leaf)}

    @classmethod
    def from_dict(cls, data: dict) -> "PetalSpec":
        try:
            return cls(CoreKind.parse(data["core"]), data["n"], leaf_from_dict(data["leaf"]))
        except (KeyError, TypeError) as exc:
            raise SpecError(f"malformed spec: {exc}") from None


def leaf_to_dict(leaf: LeafKind) -> dict:
    if isinstance(leaf, PathBundle):
        return {"kind": "path", "m": leaf.m, "k": leaf.k}
    if isinstance(leaf, SymmetricG):
        return {"kind": "symmetric_g", "m": leaf.m, "k": leaf.k}
    if isinstance(leaf, AsymmetricG):
        return {"kind": "asymmetric_g", "expand": list(leaf.expand),
                "contract": list(leaf.contract)}
    return {"kind": "composite", "segments": [leaf_to_dict(s) for s in leaf.segments]}


def leaf_from_dict(data: dict) -> LeafKind:
    kind = str(data.get("kind", "")).lower()
    if kind in ("path", "path_bundle", "pathbundle"):
        return PathBundle(data["m"], data.get("k", 1))
    if kind in ("symmetric_g", "g", "symmetricg"):
        return SymmetricG(data["m"], data["k"])
    if kind in ("asymmetric_g", "asym", "asymmetricg"):
        return AsymmetricG(tuple(data["expand"]), tuple(data["contract"]))
    if kind == "composite":
        return Composite(tuple(leaf_from_dict(s) for s in data["segments"]))
    raise SpecError(f"unknown leaf kind {data.get('kind')!r}")


@dataclass(frozen=True)
class Graph:
    """Explicit node/edge realization of a petal network.

    Edges are ``(u, v)`` pairs with ``u < v``.  ``edge_class`` holds the
    weight class of each edge: ``0`` for core clique edges, otherwise the
    depth of the deeper endpoint.  ``leaf_of`` is ``-1`` for the hub.
    """

    node_count: int
    edges: tuple[tuple[int, int], ...]
    stratum_of: tuple[int, ...]
    core_distance: tuple[int, ...]
    leaf_of: tuple[int, ...]
    edge_class: tuple[int, ...]
    spec: PetalSpec | None = field(default=None, compare=False)

    def degrees(self) -> list[int]:
        deg = [0] * self.node_count
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def leaf_nodes(self, leaf: int) -> list[int]:
        return [i for i, l in enumerate(self.leaf_of) if l == leaf]

    @property
    def stratum_count(self) -> int:
        return max(self.stratum_of) + 1

    def to_dict(self) -> dict:
        out = {
            "nodes": self.node_count,
            "edges": [list(e) for e in self.edges],
            "strata": list(self.stratum_of),
            "core_distance": list(self.core_distance),
        }
        if self.spec is not None:
            out["spec"] = self.spec.to_dict()
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def to_dot(self) -> str:
        lines = ["graph petal {"]
        for i, s in enumerate(self.stratum_of):
            lines.append(f'  {i} [label="{i}", stratum={s}];')
        for (u, v), c in zip(self.edges, self.edge_class):
            lines.append(f'  {u} -- {v} [class={c}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _leaf_edges(root: int, steps: Sequence[Step], first: int) -> Iterator[tuple[int, int, int]]:
    """Yield (u, v, depth_of_v) for one leaf; new nodes are numbered from ``first``."""
    prev = [root]
    nxt = first
    for depth, step in enumerate(steps, start=1):
        width = step.width_after(len(prev))
        cur = list(range(nxt, nxt + width))
        nxt += width
        if step.kind == EXPAND:
            for j, node in enumerate(cur):
                yield prev[j // step.k], node, depth
        else:
            for j, node in enumerate(prev):
                yield node, cur[j // step.k], depth
        prev = cur


@lru_cache(maxsize=256)
def build_graph(spec: PetalSpec) -> Graph:
    """Realize ``spec`` with hub/core first, then leaf-major, level-major, sibling-minor numbering."""
    steps = spec.steps()
    widths = spec.widths()
    per_leaf = sum(widths[1:])
    n = spec.n

    if spec.is_hub:
        n_core = 1
        roots = [0] * n
    else:
        n_core = n
        roots = list(range(n))
    node_count = n_core + n * per_leaf

    depth = [0] * node_count
    leaf_of = [-1 if spec.is_hub else i for i in range(n_core)] + [0] * (n * per_leaf)
    edges: list[tuple[int, int]] = []
    classes: list[int] = []

    if not spec.is_hub:
        for i in range(n):
            for j in range(i + 1, n):
                edges.append((i, j))
                classes.append(0)

    first = n_core
    for leaf in range(n):
        offset = first + leaf * per_leaf
        for u, v, d in _leaf_edges(roots[leaf], steps, offset):
            depth[v] = d
            leaf_of[v] = leaf
            edges.append((min(u, v), max(u, v)))
            classes.append(d)

    depth_t = tuple(depth)
    return Graph(node_count=node_count, edges=tuple(edges), stratum_of=depth_t,
                 core_distance=depth_t, leaf_of=tuple(leaf_of),
                 edge_class=tuple(classes), spec=spec)


def strata(graph: Graph) -> list[list[int]]:
    """Nodes grouped by stratum, strata in ascending id order."""
    groups: list[list[int]] = [[] for _ in range(graph.stratum_count)]
    for node, s in enumerate(graph.stratum_of):
        groups[s].append(node)
    return groups


def edge_class_count(spec: PetalSpec) -> int:
    return len(spec.steps()) + (0 if spec.is_hub else 1)


def class_strata(cls: int) -> tuple[int, int]:
    """(from_stratum, to_stratum) of an edge class."""
    return (0, 0) if cls == 0 else (cls - 1, cls)


def expected_counts(spec: PetalSpec) -> tuple[int, int]:
    """Node and edge counts from the level widths, without building the graph."""
    w = spec.widths()
    n = spec.n
    nodes = (1 if spec.is_hub else n) + n * sum(w[1:])
    edges = n * sum(max(a, b) for a, b in zip(w, w[1:]))
    if not spec.is_hub:
        edges += n * (n - 1) // 2
    return nodes, edges


def is_connected(graph: Graph) -> bool:
    adj = graph.neighbors()
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == graph.node_count


def graph_from_dict(data: dict) -> Graph:
    """Load an exported graph.  Strata are taken as given; edge classes are rebuilt from them."""
    try:
        count = int(data["nodes"])
        edges = tuple(tuple(sorted((int(u), int(v)))) for u, v in data["edges"])
        strat = tuple(int(s) for s in data.get("strata", [0] * count))
        dist = tuple(int(s) for s in data.get("core_distance", strat))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed graph: {exc}") from None
    if len(strat) != count or len(dist) != count:
        raise SpecError("strata/core_distance length does not match node count")
    for u, v in edges:
        if u == v or not (0 <= u < count and 0 <= v < count):
            raise SpecError(f"bad edge {(u, v)}")
    if len(set(edges)) != len(edges):
        raise SpecError("duplicate edges")
    classes = tuple(0 if strat[u] == strat[v] else max(strat[u], strat[v]) for u, v in edges)
    spec = PetalSpec.from_dict(data["spec"]) if "spec" in data else None
    return Graph(count, edges, strat, dist, (0,) * count, classes, spec)
