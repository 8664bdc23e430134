"""Published SLEM values for path-bundle petals and their numeric reproduction."""
from __future__ import annotations

import json
from dataclasses import dataclass

from .spectral import quotient_matrices, slem_quotient
from .topology import CoreKind, PetalSpec
from .weights import optimal_weights

TABLE_TOL = 5e-5

# (n, m, k) -> SLEM at optimal weights, as printed (5 decimals, truncated).
HUB_TABLE = {
    (2, 2, 1): 0.80901, (3, 2, 1): 0.83851,
    (2, 2, 2): 0.80473, (3, 2, 2): 0.84824,
    (2, 2, 3): 0.82569, (3, 2, 3): 0.87040,
    (2, 3, 1): 0.90096, (3, 3, 1): 0.91294,
    (2, 3, 2): 0.89987, (3, 3, 2): 0.91935,
    (2, 3, 3): 0.91143, (3, 3, 3): 0.93210,
    (2, 3, 4): 0.92278, (4, 3, 5): 0.96107,
}

CCS_TABLE = {
    (2, 2, 1): 0.86602, (3, 2, 1): 0.86602,
    (2, 2, 2): 0.88191, (3, 2, 2): 0.88191,
    (2, 2, 3): 0.90138, (3, 2, 3): 0.90138,
    (2, 3, 1): 0.92387, (3, 3, 1): 0.92387,
    (2, 3, 2): 0.93417, (3, 3, 2): 0.93417,
    (2, 3, 3): 0.94619, (3, 3, 3): 0.94619,
    (2, 3, 4): 0.95514, (4, 3, 5): 0.96172,
}

TABLES = {CoreKind.SINGLE_HUB: HUB_TABLE, CoreKind.COMPLETE_CORE: CCS_TABLE}


def table_specs(core: CoreKind | str | None = None) -> list[PetalSpec]:
    cores = list(TABLES) if core is None else [CoreKind.parse(core)]
    return [PetalSpec.path(c, *nmk) for c in cores for nmk in TABLES[c]]


def optimal_slem(spec: PetalSpec) -> float:
    return slem_quotient(quotient_matrices(spec, optimal_weights(spec))).slem


@dataclass(frozen=True)
class TableRow:
    core: CoreKind
    n: int
    m: int
    k: int
    computed: float
    published: float

    @property
    def delta(self) -> float:
        return abs(self.computed - self.published)

    def ok(self, tol: float = TABLE_TOL) -> bool:
        return self.delta <= tol

    def to_dict(self) -> dict:
        return {"core": self.core.value, "n": self.n, "m": self.m, "k": self.k,
                "computed": self.computed, "published": self.published, "delta": self.delta}


def reproduce(core: CoreKind | str | None = None) -> list[TableRow]:
    rows = []
    for spec in table_specs(core):
        n, m, k = spec.n, spec.leaf.m, spec.leaf.k
        rows.append(TableRow(spec.core, n, m, k, optimal_slem(spec), TABLES[spec.core][(n, m, k)]))
    return rows


def ccs_n_spread(m: int, k: int, ns=(2, 3, 4, 5)) -> float:
    """Largest SLEM difference across leaf counts for a complete-core path bundle."""
    vals = [optimal_slem(PetalSpec.path(CoreKind.COMPLETE_CORE, n, m, k)) for n in ns]
    return max(vals) - min(vals)


def rows_to_json(rows, tol: float = TABLE_TOL) -> str:
    return json.dumps({"schema_version": 1, "tol": tol,
                       "all_ok": all(r.ok(tol) for r in rows),
                       "rows": [r.to_dict() for r in rows]}, indent=2)


def rows_to_markdown(rows, tol: float = TABLE_TOL) -> str:
    lines = ["| core | (n,m,k) | computed | published | abs diff | ok |", "|---|---|---|---|---|---|"]
    for r in rows:
        lines.append(f"| {r.core.value} | ({r.n},{r.m},{r.k}) | {r.computed:.7f} | "
                     f"{r.published:.5f} | {r.delta:.1e} | {'yes' if r.ok(tol) else 'NO'} |")
    return "\n".join(lines) + "\n"


def rows_to_csv(rows) -> str:
    out = ["core,n,m,k,computed,published,delta"]
    for r in rows:
        out.append(f"{r.core.value},{r.n},{r.m},{r.k},{r.computed!r},{r.published},{r.delta!r}")
    return "\n".join(out) + "\n"
