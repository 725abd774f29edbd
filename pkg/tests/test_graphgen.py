"""Graph construction, induced permutations, automorphism verification."""

from itertools import product

import numpy as np
import pytest

from mshgnn.graphgen import (
    add_symmetry_breaking_edge,
    build_ms_graph,
    check_automorphism,
    export_graph,
    graph_permutation,
    graphs_equal,
    import_graph_json,
)
from mshgnn.learn import ablate_symmetry
from mshgnn.morphology import load_preset

PRESETS = ["mini_cheetah_k4", "a1_c2", "solo_k4"]


@pytest.fixture(scope="module")
def mc_graph():
    return build_ms_graph(load_preset("mini_cheetah_k4"))


def test_mini_cheetah_node_count(mc_graph):
    # 4 base + 4 legs x (3 joints + 1 foot); K4 orbit is already complete
    assert mc_graph.n_nodes == 20
    assert len(mc_graph.base_nodes) == 4
    assert len(mc_graph.nodes_of_class("joint")) == 12
    assert len(mc_graph.nodes_of_class("foot")) == 4
    assert len(mc_graph.orbit_infos) == 1


def test_a1_orbit_split():
    g = build_ms_graph(load_preset("a1_c2"))
    assert len(g.base_nodes) == 2
    assert [o.labels for o in g.orbit_infos] == [("LF", "RF"), ("LH", "RH")]
    # 2 base + 2 orbits x 2 elements x (3 joints + foot)
    assert g.n_nodes == 18


def test_trivial_group_is_kinematic_tree():
    morph = ablate_symmetry(load_preset("mini_cheetah_k4"))
    g = build_ms_graph(morph)
    assert len(g.base_nodes) == 1
    assert g.n_nodes == 1 + 4 * 4  # plain tree, one orbit per leg
    assert len(g.orbit_infos) == 4
    # a tree: undirected edge count = node count - 1
    assert len(g.edges) // 2 == g.n_nodes - 1


def test_chain_wiring(mc_graph):
    info = mc_graph.orbit_infos[0]
    for p in range(4):
        chain = mc_graph.instance_nodes(0, p)
        assert len(chain) == 4
        assert mc_graph.A[p, chain[0]] != 0          # base_p - joint_1
        for a, b in zip(chain, chain[1:]):
            assert mc_graph.A[a, b] != 0
        # no shortcut from base to deeper chain nodes
        assert mc_graph.A[p, chain[1]] == 0
        label = info.label_of_element[p]
        assert all(mc_graph.nodes[c].physical_label == label for c in chain)


def test_base_cayley_wiring(mc_graph):
    grp = mc_graph.group
    expect = {(g, grp.compose(g, a)) for g in grp.elements for a in grp.generators}
    have = {(u, v) for u, v, _ in mc_graph.edges if u < 4 and v < 4}
    assert have == expect


def test_edge_types_independent_of_element(mc_graph):
    # the multiset of (type, endpoint classes) per instance must not depend on p
    def chain_profile(p):
        chain = mc_graph.instance_nodes(0, p)
        prof = [int(mc_graph.A[p, chain[0]])]
        prof += [int(mc_graph.A[a, b]) for a, b in zip(chain, chain[1:])]
        return prof

    profiles = {tuple(chain_profile(p)) for p in range(4)}
    assert len(profiles) == 1


def test_undirected_symmetry(mc_graph):
    assert np.array_equal(mc_graph.A, mc_graph.A.T)
    directed = set((u, v, t) for u, v, t in mc_graph.edges)
    assert all((v, u, t) in directed for u, v, t in directed)


# ---------------------------------------------------------------------------
# induced permutations
# ---------------------------------------------------------------------------

def test_identity_permutation(mc_graph):
    perm = graph_permutation(mc_graph, 0)
    assert np.array_equal(perm.node_map, np.arange(mc_graph.n_nodes))
    assert np.array_equal(perm.perm, np.eye(mc_graph.n_nodes, dtype=int))


def test_sagittal_permutation_maps_lf_to_rf(mc_graph):
    grp = mc_graph.group
    s = grp.id_of("s")
    perm = graph_permutation(mc_graph, s)
    info = mc_graph.orbit_infos[0]
    p_lf = info.label_of_element.index("LF")
    p_rf = info.label_of_element.index("RF")
    lf_chain = mc_graph.instance_nodes(0, p_lf)
    rf_chain = mc_graph.instance_nodes(0, p_rf)
    assert [perm.node_map[u] for u in lf_chain] == list(rf_chain)
    # base nodes: p -> s o p
    for p in range(4):
        assert perm.node_map[p] == grp.compose(s, p)


@pytest.mark.parametrize("preset", PRESETS)
def test_involution_squares_to_identity(preset):
    graph = build_ms_graph(load_preset(preset))
    for g in graph.group.elements:
        if graph.group.inverse(g) != g:
            continue
        p = graph_permutation(graph, g).perm
        assert np.array_equal(p @ p, np.eye(graph.n_nodes, dtype=int))


@pytest.mark.parametrize("preset", PRESETS)
def test_permutation_homomorphism(preset):
    # node_map(g1 o g2) == node_map(g1) o node_map(g2), all pairs
    graph = build_ms_graph(load_preset(preset))
    grp = graph.group
    maps = {g: graph_permutation(graph, g).node_map for g in grp.elements}
    for g1, g2 in product(grp.elements, repeat=2):
        composed = maps[g1][maps[g2]]
        assert np.array_equal(composed, maps[grp.compose(g1, g2)])


def test_block_structure_matches_kron(mc_graph):
    """rho_b must be block diagonal: regular block + kron(orbit perm, chain I)."""
    grp = mc_graph.group
    for g in grp.elements:
        perm = graph_permutation(mc_graph, g).perm
        blocks = np.zeros_like(perm)
        # base block: pullback of the left regular action
        for p in grp.elements:
            blocks[p, grp.compose(g, p)] = 1
        # orbit block: instance-index pullback kron identity over chain slots
        q_perm = np.zeros((4, 4), dtype=int)
        for p in grp.elements:
            q_perm[p, grp.compose(g, p)] = 1
        blocks[4:, 4:] = np.kron(q_perm, np.eye(4, dtype=int))
        assert np.array_equal(perm, blocks)


# ---------------------------------------------------------------------------
# Theorem-1 verification
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("preset", PRESETS)
def test_every_element_is_automorphism(preset):
    graph = build_ms_graph(load_preset(preset))
    for g in graph.group.elements:
        ok, witness = check_automorphism(graph, graph_permutation(graph, g))
        assert ok, witness


def test_symmetry_breaking_edge_detected(mc_graph):
    # extra LF-joint1 -- LH-joint1 edge; sagittal reflection must now fail
    info = mc_graph.orbit_infos[0]
    p_lf = info.label_of_element.index("LF")
    p_lh = info.label_of_element.index("LH")
    broken = add_symmetry_breaking_edge(
        mc_graph,
        mc_graph.instance_nodes(0, p_lf)[0],
        mc_graph.instance_nodes(0, p_lh)[0],
    )
    s = broken.group.id_of("s")
    ok, witness = check_automorphism(broken, graph_permutation(broken, s))
    assert not ok
    assert witness["kind"] == "edge"
    # identity is still an automorphism of the broken graph
    ok, _ = check_automorphism(broken, graph_permutation(broken, 0))
    assert ok


def test_identity_always_automorphism(mc_graph):
    ok, _ = check_automorphism(mc_graph, graph_permutation(mc_graph, 0))
    assert ok


# ---------------------------------------------------------------------------
# export / import
# ---------------------------------------------------------------------------

def test_dot_export(mc_graph):
    dot = export_graph(mc_graph, "dot")
    assert dot.count("shape=") == 20
    assert "fillcolor=" in dot and "graph" in dot
    # stable output
    assert dot == export_graph(mc_graph, "dot")


def test_dot_export_tree():
    morph = ablate_symmetry(load_preset("mini_cheetah_k4"))
    dot = export_graph(build_ms_graph(morph), "dot")
    assert dot.count(" -- ") == 16  # tree with 17 nodes


@pytest.mark.parametrize("preset", PRESETS)
def test_json_round_trip(preset):
    graph = build_ms_graph(load_preset(preset))
    clone = import_graph_json(export_graph(graph, "json"))
    assert graphs_equal(graph, clone)


def test_unknown_format(mc_graph):
    with pytest.raises(ValueError):
        export_graph(mc_graph, "graphml")
