"""Spectra, SLEM and the stratified quotient matrices.

The weight matrix of a petal network splits into three kinds of invariant
subspaces:

* ``W1``: vectors constant on every stratum (leaves identical).  Carries
  the consensus eigenvalue one with Perron vector ``v``.
* ``W2``: vectors constant on each depth of each leaf, with leaf
  amplitudes summing to zero (the hub, if any, sits at zero).
* within-leaf modes orthogonal to depth-constant vectors.  For path
  bundles these reduce to the tridiagonal ``W3`` over the interior levels.

All quotients are written in the stratum-normalized basis, so they are
symmetric: ``W1 = I - sum_i w_i a_i a_i^T`` with ``a_i`` carrying square
roots of the per-stratum edge counts.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import MultipleUnitEigenvalues, NotClassConstant, NotSymmetric, NumericError
from .topology import CoreKind, PathBundle, PetalSpec, build_graph, edge_class_count
from .weights import WeightAssignment, WeightMatrix, assemble_matrix

UNIT_TOL = 1e-9


def eig_symmetric(a, vectors: bool = False, tol: float = 1e-13, max_sweeps: int = 64):
    """Eigen-decomposition of a dense symmetric matrix by cyclic Jacobi rotations.

    Returns eigenvalues in ascending order, and the matching orthonormal
    eigenvectors as columns when ``vectors`` is true.  Sweeps stop once every
    off-diagonal entry is below ``tol`` (relative to ``max(1, max|a|)``).
    """
    A = np.array(a, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    scale = max(1.0, float(np.abs(A).max())) if n else 1.0
    if n and float(np.abs(A - A.T).max()) > 1e-12 * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-12")
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    threshold = tol * scale

    for _ in range(max_sweeps):
        off = np.abs(A - np.diag(np.diag(A)))
        if n < 2 or off.max() < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < 0.01 * threshold:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = A[:, p].copy()
                col_q = A[:, q]
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :]
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
                if vectors:
                    vp = V[:, p].copy()
                    vq = V[:, q]
                    V[:, p] = c * vp - s * vq
                    V[:, q] = s * vp + c * vq
    else:
        off = np.abs(A - np.diag(np.diag(A)))
        if off.max() >= threshold:
            raise NumericError("Jacobi iteration did not converge")

    vals = np.diag(A).copy()
    order = np.argsort(vals, kind="stable")
    if vectors:
        return vals[order], V[:, order]
    return vals[order]


@dataclass(frozen=True)
class QuotientPair:
    """Stratified quotient matrices of a petal weight matrix.

    ``w1_terms``/``w2_terms`` map each edge class to the vector ``a`` with
    ``W = I - sum w a a^T``.  ``internal`` is
    the block whose spectrum covers the within-leaf modes: ``W3`` for path
    bundles with ``k > 1``, the explicit single-leaf block for other leaves,
    ``None`` when there are no such modes.
    """

    core: CoreKind
    w1: np.ndarray
    w2: np.ndarray
    v: np.ndarray
    w3: np.ndarray | None
    internal: np.ndarray | None
    weights: dict[int, float]
    w1_terms: dict[int, np.ndarray] = field(repr=False)
    w2_terms: dict[int, np.ndarray] = field(repr=False)


def _class_weights(spec: PetalSpec, assignment: WeightAssignment) -> dict[int, float]:
    if assignment.class_weights is None:
        raise NotClassConstant("quotients need class-constant weights")
    if assignment.per_edge:
        graph = build_graph(spec)
        if not assignment.is_class_constant(graph):
            raise NotClassConstant("per-edge weights vary within an edge class")
    weights = assignment.as_floats()
    first = 1 if spec.is_hub else 0
    expected = set(range(first, first + edge_class_count(spec)))
    if set(weights) != expected:
        raise NotClassConstant(
            f"weight classes {sorted(weights)} do not match {sorted(expected)}")
    return weights


def quotient_matrices(spec: PetalSpec, assignment: WeightAssignment) -> QuotientPair:
    weights = _class_weights(spec, assignment)
    steps = spec.steps()
    widths = spec.widths()
    n = spec.n
    depth_count = len(steps)
    size = depth_count + 1

    # stratum sizes: root stratum is the hub (1 node) or the core (n nodes)
    sizes = [1 if spec.is_hub else n] + [n * c for c in widths[1:]]
    w1_terms: dict[int, np.ndarray] = {}
    for i in range(1, size):
        edges = n * max(widths[i - 1], widths[i])
        a = np.zeros(size)
        a[i - 1] = math.sqrt(edges / sizes[i - 1])
        a[i] = -math.sqrt(edges / sizes[i])
        w1_terms[i] = a

    w1 = np.eye(size)
    for i, a in w1_terms.items():
        w1 -= weights[i] * np.outer(a, a)
    v = np.sqrt(np.array(sizes, dtype=float))
    v /= np.linalg.norm(v)

    if spec.is_hub:
        w2 = w1[1:, 1:].copy()
        w2_terms = {i: a[1:].copy() for i, a in w1_terms.items()}
        w3 = w2[:-1, :-1].copy() if depth_count >= 2 else None
    else:
        a0 = np.zeros(size)
        a0[0] = -math.sqrt(n)
        w2 = w1 - weights[0] * np.outer(a0, a0)
        w2_terms = {0: a0, **w1_terms}
        w3 = w2[1:-1, 1:-1].copy() if depth_count >= 2 else None

    if isinstance(spec.leaf, PathBundle):
        internal = w3 if spec.leaf.k > 1 else None
    else:
        internal = _leaf_block(spec, assignment, weights)

    return QuotientPair(spec.core, w1, w2, v, w3, internal, weights, w1_terms, w2_terms)


@lru_cache(maxsize=256)
def _leaf_structure(spec: PetalSpec):
    """Edges touching leaf 0, as (local index pairs, classes) inside and (local index, class) at the border."""
    graph = build_graph(spec)
    nodes = graph.leaf_nodes(0)
    local = {v: i for i, v in enumerate(nodes)}
    inner, inner_cls, incident, incident_cls = [], [], [], []
    for (u, v), c in zip(graph.edges, graph.edge_class):
        if u in local and v in local:
            inner.append((local[u], local[v]))
            inner_cls.append(c)
        for x in (u, v):
            if x in local:
                incident.append(local[x])
                incident_cls.append(c)
    return (len(nodes), np.array(inner, dtype=np.int64).reshape(-1, 2), tuple(inner_cls),
            np.array(incident, dtype=np.int64), tuple(incident_cls))


def _leaf_block(spec: PetalSpec, assignment: WeightAssignment, weights: dict[int, float]) -> np.ndarray:
    """W restricted to one leaf, in the leaf-antisymmetric sector."""
    size, inner, inner_cls, incident, incident_cls = _leaf_structure(spec)
    block = np.zeros((size, size))
    w_inner = np.array([weights[c] for c in inner_cls])
    block[inner[:, 0], inner[:, 1]] = w_inner
    block[inner[:, 1], inner[:, 0]] = w_inner
    diag = np.ones(size)
    np.subtract.at(diag, incident, [weights[c] for c in incident_cls])
    block[np.diag_indices(size)] = diag
    if not spec.is_hub:
        # nodes[0] is the core node of leaf 0; in this sector the other core
        # nodes carry minus its amplitude in total, hence -w0 on the diagonal
        block[0, 0] -= weights[0]
    return block


@dataclass(frozen=True)
class SpectralReport:
    slem: float
    theta: float | None
    source: str
    spectrum_w1: list[float] = field(default_factory=list)
    spectrum_w2: list[float] = field(default_factory=list)
    spectrum: list[float] = field(default_factory=list)
    convergence_factor: float | None = None
    spec: PetalSpec | None = None

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "spec": self.spec.to_dict() if self.spec else None,
            "slem": self.slem,
            "theta": self.theta,
            "source": self.source,
            "spectrum_w1": self.spectrum_w1,
            "spectrum_w2": self.spectrum_w2,
            "convergence_factor": self.convergence_factor,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _theta(slem: float) -> float | None:
    return math.acos(slem) if -1.0 <= slem <= 1.0 else None


def _drop_unit(vals: np.ndarray) -> np.ndarray:
    close = np.flatnonzero(np.abs(vals - 1.0) <= UNIT_TOL)
    if close.size > 1:
        raise MultipleUnitEigenvalues(
            f"eigenvalue 1 has multiplicity {close.size}; consensus is not reached")
    if close.size == 0:
        raise NumericError("matrix has no eigenvalue 1; it is not row-stochastic")
    return np.delete(vals, close[0])


def _slem_of(rest: np.ndarray) -> float:
    if rest.size == 0:
        return 0.0
    return float(max(rest.max(), -rest.min()))


def slem_full(W: WeightMatrix | np.ndarray, spec: PetalSpec | None = None) -> SpectralReport:
    """SLEM from the spectrum of the explicit weight matrix."""
    dense = W.dense() if isinstance(W, WeightMatrix) else np.asarray(W, dtype=float)
    vals = eig_symmetric(dense)
    rest = _drop_unit(vals)
    s = _slem_of(rest)
    return SpectralReport(s, _theta(s), "full", spectrum=vals.tolist(),
                          convergence_factor=convergence_factor(dense), spec=spec)


def slem_quotient(pair: QuotientPair, spec: PetalSpec | None = None) -> SpectralReport:
    """SLEM from the quotient spectra: W1 without its unit eigenvalue, W2 and the internal block."""
    e1 = eig_symmetric(pair.w1)
    e2 = eig_symmetric(pair.w2)
    parts = [_drop_unit(e1), e2]
    if pair.internal is not None:
        parts.append(eig_symmetric(pair.internal))
    s = _slem_of(np.concatenate(parts))
    return SpectralReport(s, _theta(s), "quotient", spectrum_w1=e1.tolist(),
                          spectrum_w2=e2.tolist(), convergence_factor=s, spec=spec)


def convergence_factor(W: WeightMatrix | np.ndarray) -> float:
    """Spectral norm of ``W - 11^T/n`` (largest singular value, via LAPACK SVD)."""
    dense = W.dense() if isinstance(W, WeightMatrix) else np.asarray(W, dtype=float)
    n = dense.shape[0]
    return float(np.linalg.norm(dense - 1.0 / n, 2))


def cauchy_violation(outer, inner) -> float:
    """Largest violation of ``l_j(A) <= l_j(B) <= l_{j+d}(A)`` for a compression B of A.

    Both spectra ascending; ``d = len(A) - len(B)``.  Zero means interlaced.
    """
    a = np.sort(np.asarray(outer, dtype=float))
    b = np.sort(np.asarray(inner, dtype=float))
    d = a.size - b.size
    if d < 0:
        raise ValueError("inner spectrum is larger than outer")
    worst = 0.0
    for j, lam in enumerate(b):
        worst = max(worst, a[j] - lam, lam - a[j + d])
    return worst


def rank_one_violation(upper, lower) -> float:
    """Interlacing violation for ``lower = upper - r e e^T`` with ``r >= 0`` (same size).

    Ascending spectra satisfy ``lower_j <= upper_j <= lower_{j+1}``.
    """
    u = np.sort(np.asarray(upper, dtype=float))
    lo = np.sort(np.asarray(lower, dtype=float))
    if u.size != lo.size:
        raise ValueError("spectra must have equal length")
    worst = 0.0
    for j in range(u.size):
        worst = max(worst, lo[j] - u[j])
        if j + 1 < u.size:
            worst = max(worst, u[j] - lo[j + 1])
    return worst


def interlacing_violations(pair: QuotientPair) -> dict[str, float]:
    """W2 against W1 and W3 against W2.

    For a hub, W2 is W1 with the hub row/column removed (a compression).  For
    a complete core, W2 is W1 minus the rank-one core term ``w0 n e1 e1^T``,
    so the rank-one interlacing applies instead.
    """
    e1 = eig_symmetric(pair.w1)
    e2 = eig_symmetric(pair.w2)
    out = {}
    if pair.core is CoreKind.SINGLE_HUB:
        out["w2_in_w1"] = cauchy_violation(e1, e2)
    else:
        out["w2_in_w1"] = rank_one_violation(e1, e2)
    if pair.w3 is not None and pair.w3.size:
        out["w3_in_w2"] = cauchy_violation(e2, eig_symmetric(pair.w3))
    return out


def extreme_gap(pair: QuotientPair) -> float:
    """``lambda_max(W2) + lambda_min(W1)``; zero when both extremes sit at the SLEM."""
    return float(eig_symmetric(pair.w2)[-1] + eig_symmetric(pair.w1)[0])
