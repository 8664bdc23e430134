import json
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from petalfdc.exceptions import MultipleUnitEigenvalues, NotClassConstant, NotSymmetric
from petalfdc.tables import HUB_TABLE
from petalfdc.spectral import (convergence_factor, eig_symmetric, extreme_gap,
                               interlacing_violations, quotient_matrices, slem_full, slem_quotient)
from petalfdc.topology import (AsymmetricG, Composite, CoreKind, PathBundle, PetalSpec, SymmetricG,
                               build_graph, graph_from_dict)
from petalfdc.weights import (WeightAssignment, assemble_matrix, custom_weights,
                              metropolis_hastings_weights, optimal_weights)

HUB, CCS = CoreKind.SINGLE_HUB, CoreKind.COMPLETE_CORE


def full_slem_oracle(spec, assignment):
    W = assemble_matrix(build_graph(spec), assignment).dense()
    ev = np.linalg.eigvalsh(W)
    return max(ev[-2], -ev[0])


def path5():
    g = graph_from_dict({"nodes": 5, "edges": [[i, i + 1] for i in range(4)],
                         "strata": [0, 1, 2, 1, 0]})
    return assemble_matrix(g, custom_weights({1: 0.5, 2: 0.5}))


# eig_symmetric ----------------------------------------------------------

def test_eig_examples():
    assert np.allclose(eig_symmetric([[0, .5], [.5, .5]]), [(1 - 5 ** .5) / 4, (1 + 5 ** .5) / 4],
                       atol=1e-10)
    assert np.array_equal(eig_symmetric(np.eye(4)), np.ones(4))
    A = [[-.5, .5, 0], [.5, 0, .5], [0, .5, .5]]
    assert np.allclose(eig_symmetric(A), [-3 ** .5 / 2, 0, 3 ** .5 / 2], atol=1e-10)


def test_eig_rejects_nonsymmetric():
    with pytest.raises(NotSymmetric):
        eig_symmetric([[0, 1], [0.5, 0]])


@settings(max_examples=80, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(-10, 10)))
def test_eig_matches_lapack(m):
    A = (m + m.T) / 2
    vals, vecs = eig_symmetric(A, vectors=True)
    assert np.all(np.diff(vals) >= 0)
    scale = max(1.0, np.abs(A).max())
    assert np.allclose(vals, np.linalg.eigvalsh(A), atol=1e-10 * scale)
    assert np.allclose(vecs.T @ vecs, np.eye(6), atol=1e-9)
    assert np.allclose(A @ vecs, vecs * vals, atol=1e-9 * scale)


# quotient matrices -------------------------------------------------------

def test_quotient_hub_example():
    spec = PetalSpec.path(HUB, 2, 2, 2)
    pair = quotient_matrices(spec, optimal_weights(spec))
    r = 2 ** .5 / 3
    assert np.allclose(pair.w1, [[-1 / 3, 2 / 3, 0], [2 / 3, 1 / 3, r], [0, r, 1 / 3]], atol=1e-15)
    assert np.allclose(pair.w2, [[1 / 3, r], [r, 1 / 3]], atol=1e-15)
    v = np.array([1, 2, 2 ** .5])
    assert np.allclose(pair.v, v / np.linalg.norm(v))
    assert np.allclose(pair.w1 @ pair.v, pair.v, atol=1e-12)


def test_quotient_ccs_example():
    spec = PetalSpec.path(CCS, 2, 2, 1)
    pair = quotient_matrices(spec, optimal_weights(spec))
    assert np.allclose(pair.w2, [[-.5, .5, 0], [.5, 0, .5], [0, .5, .5]], atol=1e-15)


def test_quotient_rejects_non_class_constant():
    spec = PetalSpec.path(HUB, 3, 3, 2)
    g = build_graph(spec)
    per_edge = {e: 0.1 + 0.001 * i for i, e in enumerate(g.edges)}
    with pytest.raises(NotClassConstant):
        quotient_matrices(spec, WeightAssignment("custom", None, per_edge))
    with pytest.raises(NotClassConstant):
        quotient_matrices(spec, custom_weights({1: 0.2, 2: 0.5}))


def test_quotient_spectra_are_in_full_spectrum(table_spec):
    pair = quotient_matrices(table_spec, optimal_weights(table_spec))
    full = np.linalg.eigvalsh(assemble_matrix(build_graph(table_spec),
                                              optimal_weights(table_spec)).dense())
    blocks = [pair.w1, pair.w2] + ([pair.internal] if pair.internal is not None else [])
    for block in blocks:
        for lam in np.linalg.eigvalsh(block):
            assert np.min(np.abs(full - lam)) <= 1e-9
    assert np.allclose(pair.w1, np.triu(np.tril(pair.w1, 1), -1))
    assert np.allclose(pair.w2, np.triu(np.tril(pair.w2, 1), -1))
    assert np.all(pair.v > 0)
    assert np.allclose(pair.w1 @ pair.v, pair.v, atol=1e-12)


# SLEM ------------------------------------------------------------------

def test_slem_full_examples():
    assert slem_full(path5()).slem == pytest.approx(math.cos(math.pi / 5), abs=1e-12)
    n = 4
    assert slem_full(np.full((n, n), 1 / n)).slem == pytest.approx(0, abs=1e-12)
    spec = PetalSpec.path(CCS, 2, 2, 2)
    W = assemble_matrix(build_graph(spec), optimal_weights(spec))
    assert slem_full(W).slem == pytest.approx(float(sp.sqrt(7) / 3), abs=1e-12)


def test_slem_full_rejects_disconnected():
    W = np.eye(4)
    W[:2, :2] = 0.5
    with pytest.raises(MultipleUnitEigenvalues):
        slem_full(W)


def test_slem_quotient_examples():
    cases = [(HUB, (2, 2, 2), (1 + 2 ** .5) / 3), (HUB, (2, 2, 3), 0.825694),
             (CCS, (3, 3, 1), math.cos(math.pi / 8))]
    for core, nmk, expected in cases:
        spec = PetalSpec.path(core, *nmk)
        s = slem_quotient(quotient_matrices(spec, optimal_weights(spec))).slem
        assert s == pytest.approx(expected, abs=1e-6)


def test_hub_222_exact_with_sympy():
    # characteristic polynomial of W2 = [[1/3, r], [r, 1/3]] has root 1/3 + sqrt(2)/3
    lam = sp.symbols("lam")
    r = sp.sqrt(2) / 3
    W2 = sp.Matrix([[sp.Rational(1, 3), r], [r, sp.Rational(1, 3)]])
    roots = sp.solve((W2 - lam * sp.eye(2)).det(), lam)
    spec = PetalSpec.path(HUB, 2, 2, 2)
    s = slem_quotient(quotient_matrices(spec, optimal_weights(spec))).slem
    assert s == pytest.approx(float(max(roots)), abs=1e-14)


def test_quotient_equals_full(table_spec):
    w = optimal_weights(table_spec)
    q = slem_quotient(quotient_matrices(table_spec, w)).slem
    f = slem_full(assemble_matrix(build_graph(table_spec), w)).slem
    assert abs(q - f) <= 1e-9
    assert abs(q - full_slem_oracle(table_spec, w)) <= 1e-9


leaf_kinds = st.one_of(
    st.builds(PathBundle, st.integers(2, 4), st.integers(1, 3)),
    st.builds(SymmetricG, st.integers(1, 2), st.integers(1, 3)),
    st.sampled_from([AsymmetricG((2, 3), (3, 2)), AsymmetricG((1, 2), (2,)),
                     Composite((PathBundle(2, 2), SymmetricG(1, 2)))]),
)
specs = st.builds(PetalSpec, st.sampled_from([HUB, CCS]), st.integers(2, 4), leaf_kinds)


@settings(max_examples=40, deadline=None)
@given(specs, st.floats(-0.05, 0.05), st.integers(0, 2))
def test_quotient_equals_full_property(spec, delta, which):
    w = dict(optimal_weights(spec).as_floats())
    key = sorted(w)[which % len(w)]
    w[key] += delta
    assignment = custom_weights(w)
    q = slem_quotient(quotient_matrices(spec, assignment)).slem
    assert abs(q - full_slem_oracle(spec, assignment)) <= 1e-9
    violations = interlacing_violations(quotient_matrices(spec, assignment))
    assert max(violations.values()) <= 1e-10


def test_mh_quotient_equals_full():
    spec = PetalSpec.path(HUB, 3, 4, 3)
    mh = metropolis_hastings_weights(build_graph(spec))
    q = slem_quotient(quotient_matrices(spec, mh)).slem
    assert abs(q - full_slem_oracle(spec, mh)) <= 1e-9


def test_interlacing(table_spec):
    v = interlacing_violations(quotient_matrices(table_spec, optimal_weights(table_spec)))
    assert max(v.values()) <= 1e-10


@pytest.mark.parametrize("nmk", list(HUB_TABLE))
def test_hub_extreme_identity(nmk):
    spec = PetalSpec.path(HUB, *nmk)
    pair = quotient_matrices(spec, optimal_weights(spec))
    s = slem_quotient(pair).slem
    assert abs(extreme_gap(pair)) <= 1e-9
    assert abs(np.linalg.eigvalsh(pair.w2)[-1] - s) <= 1e-9


@pytest.mark.parametrize("m,k", [(2, 1), (2, 2), (3, 2), (3, 4), (4, 3)])
def test_ccs_n_independence(m, k):
    vals = []
    for n in (2, 3, 4, 5):
        spec = PetalSpec.path(CCS, n, m, k)
        vals.append(slem_quotient(quotient_matrices(spec, optimal_weights(spec))).slem)
    assert max(vals) - min(vals) <= 1e-10


def test_convergence_factor():
    assert convergence_factor(np.full((3, 3), 1 / 3)) == pytest.approx(0, abs=1e-15)
    assert convergence_factor(path5()) == pytest.approx(math.cos(math.pi / 5), abs=1e-10)
    spec = PetalSpec.path(HUB, 3, 3, 3)
    W = assemble_matrix(build_graph(spec), optimal_weights(spec))
    assert convergence_factor(W) == pytest.approx(0.93210, abs=1e-5)
    assert abs(convergence_factor(W) - slem_full(W).slem) <= 1e-10


def test_report_json():
    spec = PetalSpec.path(HUB, 2, 2, 2)
    rep = slem_quotient(quotient_matrices(spec, optimal_weights(spec)), spec)
    data = json.loads(rep.to_json())
    assert data["schema_version"] == 1 and data["source"] == "quotient"
    assert set(data) >= {"spec", "slem", "theta", "spectrum_w1", "spectrum_w2", "convergence_factor"}
    assert data["theta"] == pytest.approx(math.acos(data["slem"]))
