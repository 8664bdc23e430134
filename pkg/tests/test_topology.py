import json
from collections import Counter, deque

import pytest
from hypothesis import given, settings, strategies as st

from petalfdc.exceptions import SpecError
from petalfdc.topology import (AsymmetricG, Composite, CoreKind, PathBundle, PetalSpec, SymmetricG,
                               build_graph, edge_class_count, expected_counts, graph_from_dict,
                               is_connected, strata)

HUB, CCS = CoreKind.SINGLE_HUB, CoreKind.COMPLETE_CORE


def enumerate_petal(core, n, widths):
    """Independent oracle: grow each leaf level by level, gluing on equal-width runs.

    ``widths`` are the node counts per depth of one leaf (depth 0 is the
    attachment point).  Adjacent levels are joined by splitting the wider
    level into equal consecutive blocks under each node of the narrower one.
    """
    nodes = 1 if core is HUB else n
    edges = set()
    if core is CCS:
        edges |= {(i, j) for i in range(n) for j in range(i + 1, n)}
    depth = {0: 0} if core is HUB else {i: 0 for i in range(n)}
    for leaf in range(n):
        prev = [0 if core is HUB else leaf]
        for d, w in enumerate(widths[1:], start=1):
            cur = list(range(nodes, nodes + w))
            nodes += w
            for v in cur:
                depth[v] = d
            big, small = (cur, prev) if len(cur) >= len(prev) else (prev, cur)
            block = len(big) // len(small)
            for j, u in enumerate(big):
                edges.add(tuple(sorted((u, small[j // block]))))
            prev = cur
    return nodes, edges, depth


def bfs_depth(graph, roots):
    adj = graph.neighbors()
    dist = {r: 0 for r in roots}
    q = deque(roots)
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


@pytest.mark.parametrize("core,n,m,k,nodes,edges", [
    (HUB, 2, 2, 1, 5, 4),
    (HUB, 3, 4, 3, 31, 36),
    (CCS, 3, 4, 3, 33, 39),
])
def test_build_examples(core, n, m, k, nodes, edges):
    g = build_graph(PetalSpec.path(core, n, m, k))
    assert g.node_count == nodes and len(g.edges) == edges
    o_nodes, o_edges, _ = enumerate_petal(core, n, PetalSpec.path(core, n, m, k).widths())
    assert (o_nodes, len(o_edges)) == (nodes, edges)


@pytest.mark.parametrize("core,n,m,k,sizes", [
    (HUB, 2, 2, 1, [1, 2, 2]),
    (HUB, 3, 4, 3, [1, 9, 9, 9, 3]),
    (CCS, 3, 4, 3, [3, 9, 9, 9, 3]),
])
def test_strata_examples(core, n, m, k, sizes):
    parts = strata(build_graph(PetalSpec.path(core, n, m, k)))
    assert [len(p) for p in parts] == sizes


def test_rejections():
    with pytest.raises(SpecError):
        PetalSpec.path(HUB, 1, 2, 1)
    with pytest.raises(SpecError):
        PathBundle(1, 2)
    with pytest.raises(SpecError):
        AsymmetricG((2, 3), (5,))
    with pytest.raises(SpecError):
        CoreKind.parse("ring")


def test_edge_classes_of_g_leaves():
    spec = PetalSpec(CCS, 3, AsymmetricG((2, 3), (3, 2)))
    g = build_graph(spec)
    assert len(set(g.edge_class)) == edge_class_count(spec) == 2 + 2 + 1
    assert g.stratum_count == 2 + 2 + 1


def test_hub_asymmetric_node_count():
    # 1 + n * (sum of the interior level widths + 1)
    spec = PetalSpec(HUB, 3, AsymmetricG((2, 3), (2, 3)))
    g = build_graph(spec)
    interior = [2, 6, 3]
    assert g.node_count == 1 + 3 * (sum(interior) + 1)
    assert g.stratum_count == 2 + 2 + 1


def test_symmetric_g_is_asymmetric_with_equal_lists():
    a = build_graph(PetalSpec(HUB, 2, SymmetricG(2, 3)))
    b = build_graph(PetalSpec(HUB, 2, AsymmetricG((3, 3), (3, 3))))
    assert a.edges == b.edges and a.stratum_of == b.stratum_of


def test_composite_chains_segments():
    leaf = Composite((PathBundle(2, 2), SymmetricG(1, 3)))
    spec = PetalSpec(HUB, 2, leaf)
    g = build_graph(spec)
    assert is_connected(g)
    assert (g.node_count, len(g.edges)) == expected_counts(spec)
    assert g.stratum_count == 1 + len(spec.steps())


def test_json_round_trip_and_dot():
    g = build_graph(PetalSpec.path(CCS, 3, 3, 2))
    data = json.loads(g.to_json())
    assert set(data) >= {"nodes", "edges", "strata", "core_distance"}
    again = graph_from_dict(data)
    assert again.edges == g.edges and again.edge_class == g.edge_class
    assert g.to_dot().startswith("graph petal {")


def test_spec_dict_round_trip():
    leaf = Composite((PathBundle(2, 2), AsymmetricG((2,), (2,))))
    spec = PetalSpec(CCS, 4, leaf)
    assert PetalSpec.from_dict(json.loads(json.dumps(spec.to_dict()))) == spec


leaf_kinds = st.one_of(
    st.builds(PathBundle, st.integers(2, 4), st.integers(1, 3)),
    st.builds(SymmetricG, st.integers(1, 2), st.integers(1, 3)),
    st.sampled_from([AsymmetricG((2, 3), (3, 2)), AsymmetricG((4,), (2, 2)),
                     AsymmetricG((1, 2), (2,))]),
)
specs = st.builds(PetalSpec, st.sampled_from([HUB, CCS]), st.integers(2, 4), leaf_kinds)


@settings(max_examples=60, deadline=None)
@given(specs)
def test_graph_invariants(spec):
    g = build_graph(spec)
    o_nodes, o_edges, o_depth = enumerate_petal(spec.core, spec.n, spec.widths())
    assert g.node_count == o_nodes
    assert set(g.edges) == o_edges
    assert all(u < v for u, v in g.edges) and len(set(g.edges)) == len(g.edges)
    assert is_connected(g)
    roots = [0] if spec.is_hub else list(range(spec.n))
    assert bfs_depth(g, roots) == {i: g.core_distance[i] for i in range(g.node_count)}
    assert o_depth == {i: g.core_distance[i] for i in range(g.node_count)}
    deg = g.degrees()
    for part in strata(g):
        assert len({deg[i] for i in part}) == 1
        assert len({g.core_distance[i] for i in part}) == 1
    assert len(set(g.edge_class)) == edge_class_count(spec)
    assert build_graph(PetalSpec.from_dict(spec.to_dict())) == g


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([HUB, CCS]), st.integers(2, 5), st.integers(2, 5), st.integers(1, 4))
def test_path_bundle_counts(core, n, m, k):
    g = build_graph(PetalSpec.path(core, n, m, k))
    if core is HUB:
        assert g.node_count == 1 + n * ((m - 1) * k + 1)
        assert len(g.edges) == n * m * k
    else:
        assert g.node_count == n * ((m - 1) * k + 2)
        assert len(g.edges) == n * (n - 1) // 2 + n * m * k
    assert g.stratum_count == m + 1
    sizes = Counter(g.stratum_of)
    assert sizes[m] == n
