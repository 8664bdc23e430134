"""Edge weights and the consensus weight matrix.

Class weights are keyed by edge class (see ``topology.Graph.edge_class``):
``0`` is the complete-core clique, ``i >= 1`` the edges between depth
``i-1`` and depth ``i``.  The closed-form optimal weights are exact
rationals; conversion to floating point happens in ``assemble_matrix``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Mapping

import numpy as np
from scipy import sparse

from .exceptions import NotClassConstant, SpecError
from .topology import Graph, PetalSpec, class_strata

OPTIMAL = "optimal"
METROPOLIS_HASTINGS = "metropolis-hastings"
CUSTOM = "custom"

# Stated in JSON output so downstream users know which MH variant was used.
MH_RULE = "W_ij = 1/(1 + max(deg_i, deg_j))"


@dataclass(frozen=True)
class WeightAssignment:
    """Edge weights, either per class or per edge.

    ``per_edge`` overrides ``class_weights`` where both are given.
    """

    scheme: str
    class_weights: Mapping[int, Real] | None
    per_edge: Mapping[tuple[int, int], Real] | None = None

    def edge_weights(self, graph: Graph) -> list[Real]:
        out = []
        for edge, cls in zip(graph.edges, graph.edge_class):
            if self.per_edge is not None and edge in self.per_edge:
                out.append(self.per_edge[edge])
            elif self.class_weights is not None and cls in self.class_weights:
                out.append(self.class_weights[cls])
            else:
                raise SpecError(f"edge {edge} (class {cls}) has no weight")
        return out

    def is_class_constant(self, graph: Graph) -> bool:
        seen: dict[int, Real] = {}
        for w, cls in zip(self.edge_weights(graph), graph.edge_class):
            if seen.setdefault(cls, w) != w:
                return False
        return True

    def as_floats(self) -> dict[int, float]:
        if self.class_weights is None:
            raise NotClassConstant("assignment has no class weights")
        return {c: float(w) for c, w in sorted(self.class_weights.items())}

    def to_dict(self, graph: Graph | None = None, per_edge: bool = False) -> dict:
        out: dict = {"schema_version": 1, "scheme": self.scheme}
        if self.scheme == METROPOLIS_HASTINGS:
            out["rule"] = MH_RULE
        classes = []
        for cls, w in sorted((self.class_weights or {}).items()):
            frac = Fraction(w)
            lo, hi = class_strata(cls)
            classes.append({"class": cls, "from_stratum": lo, "to_stratum": hi,
                            "weight_num": frac.numerator, "weight_den": frac.denominator,
                            "weight": float(w)})
        out["classes"] = classes
        if per_edge and graph is not None:
            out["per_edge"] = [[u, v, float(w)]
                               for (u, v), w in zip(graph.edges, self.edge_weights(graph))]
        return out

    def to_json(self, graph: Graph | None = None, per_edge: bool = False, **kwargs) -> str:
        return json.dumps(self.to_dict(graph, per_edge), **kwargs)


def optimal_weights(spec: PetalSpec) -> WeightAssignment:
    """Closed-form optimal weights.

    Every depth-``i`` edge class gets ``1/(1 + k_i)`` where ``k_i`` is the
    branching factor of that step (``k_i = 1`` on path interiors, giving
    ``1/2``).  The hub edges of a single-hub petal get ``2/(2 + n k_1)`` and
    the core clique of a complete-core petal gets ``1/n``.
    """
    steps = spec.steps()
    weights: dict[int, Fraction] = {
        i: Fraction(1, 1 + step.k) for i, step in enumerate(steps, start=1)}
    if spec.is_hub:
        weights[1] = Fraction(2, 2 + spec.n * steps[0].k)
    else:
        weights[0] = Fraction(1, spec.n)
    return WeightAssignment(OPTIMAL, dict(sorted(weights.items())))


def metropolis_hastings_weights(graph: Graph) -> WeightAssignment:
    deg = graph.degrees()
    per_edge = {(u, v): Fraction(1, 1 + max(deg[u], deg[v])) for u, v in graph.edges}
    classes: dict[int, Fraction] = {}
    constant = True
    for (edge, w), cls in zip(per_edge.items(), graph.edge_class):
        if classes.setdefault(cls, w) != w:
            constant = False
    if constant:
        return WeightAssignment(METROPOLIS_HASTINGS, dict(sorted(classes.items())))
    return WeightAssignment(METROPOLIS_HASTINGS, None, per_edge)


def custom_weights(class_weights: Mapping[int, Real]) -> WeightAssignment:
    return WeightAssignment(CUSTOM, dict(sorted(class_weights.items())))


def perturb(assignment: WeightAssignment, cls: int, delta: Real) -> WeightAssignment:
    if assignment.class_weights is None or cls not in assignment.class_weights:
        raise SpecError(f"no weight class {cls} to perturb")
    new = dict(assignment.class_weights)
    new[cls] = new[cls] + delta
    return WeightAssignment(CUSTOM, new)


@dataclass(frozen=True)
class WeightMatrix:
    """Symmetric, row-stochastic weight matrix stored sparse (CSR)."""

    matrix: sparse.csr_array

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()


def assemble_matrix(graph: Graph, assignment: WeightAssignment) -> WeightMatrix:
    """Off-diagonals from the edge weights, diagonal ``1 - sum_j W_ij``."""
    weights = np.array([float(w) for w in assignment.edge_weights(graph)])
    if graph.edges:
        rows, cols = np.array(graph.edges, dtype=np.int64).T
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
    n = graph.node_count
    off = sparse.coo_array(
        (np.concatenate([weights, weights]),
         (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(n, n)).tocsr()
    diag = 1.0 - np.asarray(off.sum(axis=1)).ravel()
    return WeightMatrix((off + sparse.diags_array(diag)).tocsr())

