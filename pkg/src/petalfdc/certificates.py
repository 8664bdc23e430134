"""Optimality evidence for closed-form weights.

Three independent lines:

* a rank-one dual certificate ``Z = [z1; z2][z1; z2]^T`` checked against the
  complementary slackness conditions of the SLEM semidefinite program,
* a derivative-free search over class weights that tries to beat the
  closed-form SLEM,
* an audit of the closed-form characteristic equations against the
  numerically computed SLEM.

For a single hub the SDP is ``min s`` subject to ``W2 <= sI`` and
``W1 - vv^T >= -sI``; for a complete core both bounds apply to ``W2``.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .closed_forms import ccs_characteristic_roots, hub_theta_roots
from .exceptions import DegenerateEquation, NoSuchEigenvalue, SpecError
from .spectral import QuotientPair, eig_symmetric, quotient_matrices, slem_quotient
from .topology import CoreKind, PathBundle, PetalSpec
from .weights import WeightAssignment, custom_weights, optimal_weights

EIGEN_TOL = 1e-9
SLACKNESS_TOL = 1e-8
ORACLE_TOL = 1e-4
AUDIT_TOL = 1e-6


@dataclass(frozen=True)
class DualCertificate:
    s: float
    z1: np.ndarray
    z2: np.ndarray
    classes: tuple[int, ...]
    a: np.ndarray
    a_prime: np.ndarray
    residual_primal: float
    residual_dual: float
    gap: float
    orthogonality: float
    feasibility: float
    eigen_offset: float


def _upper_lower(pair: QuotientPair):
    """Matrices bounding the spectrum from above and below, with their rank-one vectors."""
    if pair.core is CoreKind.SINGLE_HUB:
        return pair.w2, pair.w1, pair.w2_terms, pair.w1_terms
    return pair.w2, pair.w2, pair.w2_terms, pair.w2_terms


def build_certificate(pair: QuotientPair, s: float | None = None, strict: bool = True) -> DualCertificate:
    """Dual certificate for candidate SLEM ``s`` (default: the quotient SLEM).

    ``z1`` is the eigenvector of the upper matrix nearest ``s``, ``z2`` the
    eigenvector of the lower matrix nearest ``-s`` (for a hub, excluding the
    consensus direction ``v``).  Their relative scale is fitted to the dual
    feasibility equations ``(b_i^T z1)^2 = (a_i^T z2)^2`` with
    ``|z1|^2 + |z2|^2 = 1``; the gap then measures how far strong duality
    ``|z1|^2 - |z2|^2 = s`` is from holding.

    With ``strict`` set, raises ``NoSuchEigenvalue`` when ``s`` or ``-s`` is
    not in the corresponding spectrum.
    """
    if s is None:
        s = slem_quotient(pair).slem
    upper, lower, up_terms, lo_terms = _upper_lower(pair)
    hub = pair.core is CoreKind.SINGLE_HUB

    e_up, v_up = eig_symmetric(upper, vectors=True)
    i_up = int(np.argmin(np.abs(e_up - s)))
    z1 = v_up[:, i_up]

    e_lo, v_lo = eig_symmetric(lower, vectors=True)
    candidates = np.arange(e_lo.size)
    if hub:
        consensus = int(np.argmax(np.abs(v_lo.T @ pair.v)))
        candidates = candidates[candidates != consensus]
    i_lo = int(candidates[np.argmin(np.abs(e_lo[candidates] + s))])
    z2 = v_lo[:, i_lo]

    offset = max(abs(e_up[i_up] - s), abs(e_lo[i_lo] + s))
    if strict and offset > EIGEN_TOL:
        raise NoSuchEigenvalue(
            f"s={s:.12g} is not shared: nearest eigenvalues {e_up[i_up]:.12g} "
            f"and {-e_lo[i_lo]:.12g} (negated)")

    classes = tuple(sorted(up_terms))
    B = np.column_stack([up_terms[c] for c in classes])
    A = np.column_stack([lo_terms[c] for c in classes])
    p = (B.T @ z1) ** 2
    q = (A.T @ z2) ** 2
    denom = float((p + q) @ (p + q))
    t = float(q @ (p + q)) / denom if denom > 0 else 0.5 * (1 + s)
    t = min(max(t, 0.0), 1.0)
    z1 = math.sqrt(t) * z1
    z2 = math.sqrt(1.0 - t) * z2

    a = np.linalg.lstsq(B, z1, rcond=None)[0]
    a_prime = np.linalg.lstsq(A, z2, rcond=None)[0]

    eye = np.eye(lower.shape[0])
    if hub:
        dual_matrix = s * eye + lower - np.outer(pair.v, pair.v)
        orthogonality = abs(float(pair.v @ z2))
    else:
        dual_matrix = s * eye + lower
        orthogonality = 0.0
    residual_primal = float(np.linalg.norm((s * np.eye(upper.shape[0]) - upper) @ z1))
    residual_dual = float(np.linalg.norm(dual_matrix @ z2))
    gap = abs(float(z1 @ z1 - z2 @ z2) - s)
    feasibility = float(np.max(np.abs((B.T @ z1) ** 2 - (A.T @ z2) ** 2)))

    return DualCertificate(s, z1, z2, classes, a, a_prime, residual_primal, residual_dual,
                           gap, orthogonality, feasibility, float(offset))


@dataclass(frozen=True)
class SlacknessReport:
    passed: bool
    s: float
    residual_primal: float
    residual_dual: float
    gap: float
    orthogonality: float
    feasibility: float
    tol: float

    def to_dict(self) -> dict:
        return {"schema_version": 1, "passed": self.passed, "s": self.s,
                "residual_primal": self.residual_primal, "residual_dual": self.residual_dual,
                "gap": self.gap, "orthogonality": self.orthogonality,
                "feasibility": self.feasibility, "tol": self.tol}


def slackness_check(cert: DualCertificate, tol: float = SLACKNESS_TOL) -> SlacknessReport:
    """Pass iff both slackness residuals, the gap, ``|v^T z2|`` and dual feasibility are within ``tol``."""
    worst = max(cert.residual_primal, cert.residual_dual, cert.gap,
                cert.orthogonality, cert.feasibility)
    return SlacknessReport(bool(worst <= tol), cert.s, cert.residual_primal,
                           cert.residual_dual, cert.gap, cert.orthogonality,
                           cert.feasibility, tol)


def certify(spec: PetalSpec, assignment: WeightAssignment | None = None,
            tol: float = SLACKNESS_TOL) -> tuple[DualCertificate, SlacknessReport]:
    """Build the certificate at the weights' own SLEM and check it; never raises for bad weights."""
    assignment = assignment or optimal_weights(spec)
    pair = quotient_matrices(spec, assignment)
    cert = build_certificate(pair, strict=False)
    return cert, slackness_check(cert, tol)


def sine_coordinates(m: int, theta: float) -> np.ndarray:
    """``sin((m - i + 1) theta) / sin(theta)`` for ``i = 1..m``.

    For path bundles with ``k = 1`` these are the last ``m`` certificate
    coordinates ``a`` up to scale, on either core kind.
    """
    j = np.arange(m - 1, -1, -1)
    return np.sin((j + 1) * theta) / math.sin(theta)


@dataclass(frozen=True)
class OracleResult:
    best_weights: dict[int, float]
    best_slem: float
    analytic_slem: float
    iterations: int
    restarts: int
    improvement: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "improvement", self.analytic_slem - self.best_slem)

    def certifies(self, tol: float = ORACLE_TOL) -> bool:
        return self.improvement <= tol

    def to_dict(self) -> dict:
        return {"schema_version": 1,
                "best_weights": {str(k): v for k, v in self.best_weights.items()},
                "best_slem": self.best_slem, "analytic_slem": self.analytic_slem,
                "iterations": self.iterations, "restarts": self.restarts,
                "improvement": self.improvement}


def optimality_oracle(spec: PetalSpec, budget: int = 2000, *,
                      weights: WeightAssignment | None = None,
                      starts: list[WeightAssignment] | None = None,
                      restarts: int = 8, seed: int = 42, scale: float = 0.1) -> OracleResult:
    """Nelder-Mead over class weights, trying to get below the SLEM of ``weights``.

    Searches from ``weights`` (default: the closed-form optimum) and from
    ``restarts`` seeded random perturbations of it, or from ``starts`` when
    given.  ``budget`` caps iterations per restart.
    """
    weights = weights or optimal_weights(spec)
    base = weights.as_floats()
    keys = sorted(base)

    def objective(x: np.ndarray) -> float:
        pair = quotient_matrices(spec, custom_weights(dict(zip(keys, x.tolist()))))
        return slem_quotient(pair).slem

    x_ref = np.array([base[c] for c in keys])
    reference = objective(x_ref)

    if starts is not None:
        points = [np.array([s.as_floats()[c] for c in keys]) for s in starts]
    else:
        rng = np.random.default_rng(seed)
        points = [x_ref] + [x_ref + rng.uniform(-scale, scale, size=x_ref.size)
                            for _ in range(restarts)]

    best_x, best_f, iterations = x_ref, reference, 0
    for x0 in points:
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxiter": budget, "maxfev": 4 * budget,
                                "xatol": 1e-10, "fatol": np.inf, "adaptive": False})
        iterations += int(res.nit)
        if res.fun < best_f:
            best_x, best_f = res.x, float(res.fun)

    return OracleResult(dict(zip(keys, map(float, best_x))), best_f, reference,
                        iterations, len(points))


class Verdict(str, enum.Enum):
    MATCH = "Match"
    MISMATCH = "Mismatch"
    NO_ROOT_IN_RANGE = "NoRootInRange"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class AuditRecord:
    spec: PetalSpec
    slem_numeric: float
    candidates: tuple[float, ...]
    closed_form_value: float | None
    difference: float | None
    verdict: Verdict

    def to_dict(self) -> dict:
        return {"spec": self.spec.to_dict(), "label": self.spec.label(),
                "slem_numeric": self.slem_numeric, "candidates": list(self.candidates),
                "closed_form_value": self.closed_form_value,
                "difference": self.difference, "verdict": self.verdict.value}


@dataclass(frozen=True)
class AuditReport:
    records: tuple[AuditRecord, ...]

    def counts(self) -> dict[str, int]:
        out = {v.value: 0 for v in Verdict}
        for r in self.records:
            out[r.verdict.value] += 1
        return out

    def to_dict(self) -> dict:
        return {"schema_version": 1, "counts": self.counts(),
                "records": [r.to_dict() for r in self.records]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def to_markdown(self) -> str:
        lines = ["| spec | slem (numeric) | closed form | abs diff | verdict |",
                 "|---|---|---|---|---|"]
        for r in self.records:
            cf = "-" if r.closed_form_value is None else f"{round(r.closed_form_value, 6) + 0.0:.6f}"
            diff = "-" if r.difference is None else f"{r.difference:.2e}"
            lines.append(f"| {r.spec.label()} | {r.slem_numeric:.6f} | {cf} | {diff} | {r.verdict.value} |")
        return "\n".join(lines) + "\n"


def audit_closed_forms(specs, tol: float = AUDIT_TOL) -> AuditReport:
    """One verdict per spec: does any closed-form root reproduce the quotient SLEM?"""
    records = []
    for spec in specs:
        if not isinstance(spec.leaf, PathBundle):
            raise SpecError("closed forms exist only for path-bundle leaves")
        slem = slem_quotient(quotient_matrices(spec, optimal_weights(spec))).slem
        m, k = spec.leaf.m, spec.leaf.k
        try:
            if spec.is_hub:
                candidates = tuple(math.cos(t) for t in hub_theta_roots(spec.n, m, k))
            else:
                candidates = tuple(ccs_characteristic_roots(m, k))
        except DegenerateEquation:
            records.append(AuditRecord(spec, slem, (), None, None, Verdict.DEGENERATE))
            continue
        if not candidates:
            records.append(AuditRecord(spec, slem, (), None, None, Verdict.NO_ROOT_IN_RANGE))
            continue
        nearest = min(candidates, key=lambda c: abs(c - slem))
        diff = abs(nearest - slem)
        verdict = Verdict.MATCH if diff <= tol else Verdict.MISMATCH
        records.append(AuditRecord(spec, slem, candidates, nearest, diff, verdict))
    return AuditReport(tuple(records))
