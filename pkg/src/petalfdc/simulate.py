"""Synchronous consensus iteration ``x(t+1) = W x(t)`` and convergence measurement."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .exceptions import SpecError, Underflow
from .topology import Graph
from .weights import WeightMatrix

FLOOR = 1e-13  # per-step contraction below this means the signal is gone
TINY = 1e-280


@dataclass(frozen=True)
class Trajectory:
    """Normalized distances ``d(t) = |x(t) - xbar| / |x(0) - xbar|`` for ``t = 0..T``."""

    distances: np.ndarray
    mass: np.ndarray  # 1^T x(t) per step
    scheme: str = ""
    x0_label: str = ""

    @property
    def steps(self) -> int:
        return len(self.distances) - 1

    def max_mass_drift(self) -> float:
        return float(np.max(np.abs(self.mass - self.mass[0])))


def _as_sparse(W) -> sparse.csr_array:
    if isinstance(W, WeightMatrix):
        return W.matrix
    return sparse.csr_array(np.asarray(W, dtype=float))


def run_consensus(W, x0, steps: int, scheme: str = "", x0_label: str = "") -> Trajectory:
    """Iterate ``steps`` times with sparse mat-vecs, recording distance and mass each step."""
    A = _as_sparse(W)
    x = np.asarray(x0, dtype=float).copy()
    if x.ndim != 1 or x.size != A.shape[0]:
        raise SpecError(f"x0 has shape {x.shape}, matrix is {A.shape}")
    if steps < 1:
        raise SpecError("need at least one step")
    mean = x.mean()
    d0 = np.linalg.norm(x - mean)
    if d0 <= 1e-15 * max(1.0, np.abs(x).max()):
        raise SpecError("x0 is already at consensus; normalized distance undefined")
    # The deviation y = x - xbar obeys the same recursion.  Iterating it
    # directly (re-centred to strip rounding along 1) keeps full relative
    # precision; x - xbar computed from x(t) cancels down to ~1e-16.
    y = x - mean
    dist = np.empty(steps + 1)
    mass = np.empty(steps + 1)
    dist[0], mass[0] = 1.0, x.sum()
    for t in range(1, steps + 1):
        x = A @ x
        y = A @ y
        y -= y.mean()
        dist[t] = np.linalg.norm(y) / d0
        mass[t] = x.sum()
    return Trajectory(dist, mass, scheme, x0_label)


def default_x0(graph: Graph) -> np.ndarray:
    """Unit impulse at the last node of the first leaf."""
    x = np.zeros(graph.node_count)
    x[graph.leaf_nodes(0)[-1]] = 1.0
    return x


def random_x0(n: int, seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal(n)


def asymptotic_rate(traj: Trajectory, window: int = 50) -> float:
    """Geometric-mean per-step contraction over the last ``window`` steps."""
    if window < 1 or window > traj.steps:
        raise SpecError(f"window {window} outside 1..{traj.steps}")
    hit = underflow_step(traj)
    if hit is not None:
        raise Underflow(f"trajectory collapsed to rounding noise at t={hit}")
    tail = traj.distances[-window - 1:]
    return math.exp((math.log(tail[-1]) - math.log(tail[0])) / window)


def underflow_step(traj: Trajectory) -> int | None:
    """First step where the distance stops carrying signal, or None.

    Rounding error in the deviation iteration is relative to the current
    distance, so values stay meaningful however small they get, unless one
    step wipes out all but ``FLOOR`` of the signal (e.g. ``W = J/n``) or the
    distance nears the subnormal range.
    """
    d = traj.distances
    with np.errstate(divide="ignore", invalid="ignore"):
        collapsed = (d[1:] <= FLOOR * d[:-1]) | (d[1:] < TINY)
    idx = np.flatnonzero(collapsed)
    return int(idx[0]) + 1 if idx.size else None


def crossover_step(better: Trajectory, worse: Trajectory) -> int | None:
    """Smallest ``t*`` with ``better.d(t) < worse.d(t)`` for every ``t > t*``; None if never."""
    below = better.distances < worse.distances
    if not below[-1]:
        return None
    not_below = np.flatnonzero(~below)
    return int(not_below[-1]) if not_below.size else 0


def trajectories_csv(trajectories) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "distance", "scheme"])
    for traj in trajectories:
        for t, d in enumerate(traj.distances):
            writer.writerow([t, repr(float(d)), traj.scheme])
    return buf.getvalue()
