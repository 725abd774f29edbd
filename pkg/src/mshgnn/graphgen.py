"""Symmetry-completed heterogeneous graph construction.

From a validated morphology this builds the typed graph:

1. one base node per group element, wired by the group's Cayley graph;
2. one chain (joint_1 ... joint_ndof [, foot]) per branch instance;
3. instances grouped into orbits q of the group action, each orbit completed
   to exactly |G| instances indexed by group elements p (replicas are added
   when the physical robot has fewer instances than |G|);
4. chain p of orbit q hangs off base node p.

Edge types depend only on (orbit, depth in the chain) for branch edges and
on the generator for Cayley edges, never on the element p; this is what makes
every group element a graph automorphism, which `check_automorphism` verifies
against the integer adjacency matrix.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from mshgnn.groups import GroupSpec, cayley_edges, group_from_table
from mshgnn.morphology import RobotMorphology, validate_action

__all__ = [
    "MorphGraph",
    "NodeInfo",
    "OrbitInfo",
    "GraphPermutation",
    "GraphConstructionError",
    "build_ms_graph",
    "graph_permutation",
    "check_automorphism",
    "add_symmetry_breaking_edge",
    "export_graph",
    "import_graph_json",
    "graphs_equal",
]

BASE, JOINT, FOOT = "base", "joint", "foot"

_DOT_SHAPES = {BASE: "box", JOINT: "ellipse", FOOT: "diamond"}
_DOT_COLORS = ("lightblue", "salmon", "palegreen", "gold",
               "plum", "lightgray", "orange", "cyan")


class GraphConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class NodeInfo:
    node_id: int
    node_class: str            # base | joint | foot
    orbit: int | None          # q; None for base nodes
    element: int               # p
    chain_pos: int | None      # 0..ndof-1 for joints, ndof for the foot
    branch_id: str | None
    physical_label: str | None
    joint_name: str | None = None


@dataclass(frozen=True)
class OrbitInfo:
    q: int
    branch_id: str
    rep_label: str                     # orbit representative, assigned p = e
    labels: tuple[str, ...]            # physical labels in the orbit
    label_of_element: tuple[str, ...]  # element p -> physical label
    chain_len: int


@dataclass(frozen=True)
class GraphPermutation:
    """Node permutation rho_b induced by one group element.

    `node_map[u]` is the node u's features are sent to; `perm` is the matching
    permutation matrix, so applying the permutation to a node-indexed vector x
    is `perm @ x`, equivalently `x[source_map]`.
    """

    element: int
    node_map: np.ndarray
    perm: np.ndarray

    @property
    def source_map(self) -> np.ndarray:
        inv = np.empty_like(self.node_map)
        inv[self.node_map] = np.arange(len(self.node_map))
        return inv


@dataclass
class MorphGraph:
    """The typed graph; immutable after construction."""

    name: str
    group: GroupSpec
    nodes: tuple[NodeInfo, ...]
    orbit_infos: tuple[OrbitInfo, ...]
    edges: tuple[tuple[int, int, int], ...]   # directed, both directions present
    A: np.ndarray                             # typed integer adjacency
    x_type: np.ndarray                        # integer node-type vector
    edge_type_keys: tuple[tuple, ...]         # type id t -> edge_type_keys[t-1]
    node_type_keys: tuple[tuple, ...]

    def __post_init__(self):
        self.A.setflags(write=False)
        self.x_type.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def base_nodes(self) -> tuple[int, ...]:
        return tuple(range(self.group.order))

    def nodes_of_class(self, node_class: str) -> tuple[int, ...]:
        return tuple(n.node_id for n in self.nodes if n.node_class == node_class)

    def instance_nodes(self, q: int, p: int) -> tuple[int, ...]:
        """Chain node ids (joints in order, then foot) of instance (p, q)."""
        info = self.orbit_infos[q]
        start = self.group.order
        for prior in self.orbit_infos[:q]:
            start += self.group.order * prior.chain_len
        start += p * info.chain_len
        return tuple(range(start, start + info.chain_len))

    def summary(self) -> str:
        n_base = len(self.base_nodes)
        n_joint = len(self.nodes_of_class(JOINT))
        n_foot = len(self.nodes_of_class(FOOT))
        orbit_names = ", ".join(o.rep_label for o in self.orbit_infos)
        return (f"{self.n_nodes} nodes ({n_base} base, {n_joint} joint, {n_foot} foot), "
                f"{len(self.edges)} directed edges, group {self.group.name}, "
                f"{len(self.orbit_infos)} orbits [{orbit_names}]")


def _edge_type_key_cayley(group: GroupSpec, generator: int) -> tuple:
    # a generator and its inverse label the same undirected Cayley edge
    return ("cayley", min(generator, group.inverse(generator)))


def build_ms_graph(morphology: RobotMorphology) -> MorphGraph:
    """Run construction steps 1-5 and return the typed graph."""
    report = validate_action(morphology)
    if not report.ok:
        raise GraphConstructionError(f"morphology invalid:\n{report}")
    group = morphology.group
    n_g = group.order

    # orbits across all branch types, in declaration order
    orbit_infos: list[OrbitInfo] = []
    for bt in morphology.branch_types:
        chain_len = bt.ndof + (1 if bt.has_end_effector else 0)
        for orbit in morphology.orbits(bt.id):
            if n_g % len(orbit) != 0:
                raise GraphConstructionError(
                    f"orbit {orbit} of branch {bt.id!r} has size {len(orbit)}, "
                    f"which does not divide |G|={n_g}")
            rep_label = orbit[0]
            label_of_element = tuple(morphology.actions[bt.id][p][rep_label]
                                     for p in range(n_g))
            if len(orbit) < n_g:
                warnings.warn(
                    f"orbit {orbit} of branch {bt.id!r} has {len(orbit)} physical "
                    f"instances; completing to |G|={n_g} with replicas",
                    stacklevel=2)
            orbit_infos.append(OrbitInfo(
                q=len(orbit_infos), branch_id=bt.id, rep_label=rep_label,
                labels=orbit, label_of_element=label_of_element,
                chain_len=chain_len))

    # node table: bases first, then orbit-major / element-major chains
    nodes: list[NodeInfo] = []
    node_type_ids: dict[tuple, int] = {}
    x_type: list[int] = []

    def type_id_of(key: tuple) -> int:
        return node_type_ids.setdefault(key, len(node_type_ids))

    for p in range(n_g):
        nodes.append(NodeInfo(len(nodes), BASE, None, p, None, None, None))
        x_type.append(type_id_of((BASE,)))
    for info in orbit_infos:
        bt = morphology.branch(info.branch_id)
        for p in range(n_g):
            label = info.label_of_element[p]
            for j in range(bt.ndof):
                nodes.append(NodeInfo(len(nodes), JOINT, info.q, p, j, bt.id,
                                      label, bt.joint_names[j]))
                x_type.append(type_id_of((JOINT, info.q, j)))
            if bt.has_end_effector:
                nodes.append(NodeInfo(len(nodes), FOOT, info.q, p, bt.ndof, bt.id,
                                      label))
                x_type.append(type_id_of((FOOT, info.q)))

    # edge types: Cayley first (per generator class), then per (orbit, depth)
    edge_type_ids: dict[tuple, int] = {}

    def edge_type(key: tuple) -> int:
        return edge_type_ids.setdefault(key, len(edge_type_ids) + 1)  # 0 = no edge

    undirected: dict[tuple[int, int], int] = {}

    def put_edge(u: int, v: int, t: int) -> None:
        key = (min(u, v), max(u, v))
        if key in undirected and undirected[key] != t:
            raise GraphConstructionError(
                f"parallel edges with distinct types between nodes {u} and {v}")
        undirected[key] = t

    for g, h, a in cayley_edges(group):
        put_edge(g, h, edge_type(_edge_type_key_cayley(group, a)))

    offset = n_g
    for info in orbit_infos:
        for p in range(n_g):
            chain = list(range(offset, offset + info.chain_len))
            offset += info.chain_len
            prev = p  # base node of element p
            for depth, node in enumerate(chain):
                put_edge(prev, node, edge_type(("branch", info.q, depth)))
                prev = node

    n = len(nodes)
    a_mat = np.zeros((n, n), dtype=np.intp)
    edges: list[tuple[int, int, int]] = []
    for (u, v), t in undirected.items():
        a_mat[u, v] = t
        a_mat[v, u] = t
        edges.append((u, v, t))
        edges.append((v, u, t))

    type_keys = tuple(k for k, _ in sorted(edge_type_ids.items(), key=lambda kv: kv[1]))
    node_keys = tuple(k for k, _ in sorted(node_type_ids.items(), key=lambda kv: kv[1]))
    graph = MorphGraph(
        name=morphology.name, group=group, nodes=tuple(nodes),
        orbit_infos=tuple(orbit_infos), edges=tuple(edges),
        A=a_mat, x_type=np.asarray(x_type, dtype=np.intp),
        edge_type_keys=type_keys, node_type_keys=node_keys,
    )
    return graph


def graph_permutation(graph: MorphGraph, g: int) -> GraphPermutation:
    """The node permutation induced by group element g.

    Pullback convention throughout: the new value at base node p is read from
    base node g o p, so node u's features are *sent to* node g^-1 o u; chains
    move wholesale with their element index, preserving chain position.
    """
    group = graph.group
    if not 0 <= g < group.order:
        raise ValueError(f"unknown group element id {g}")
    g_inv = group.inverse(g)
    node_map = np.empty(graph.n_nodes, dtype=np.intp)
    for p in range(group.order):
        node_map[p] = group.compose(g_inv, p)
    for info in graph.orbit_infos:
        for p in range(group.order):
            src_chain = graph.instance_nodes(info.q, p)
            dst_chain = graph.instance_nodes(info.q, group.compose(g_inv, p))
            for u, v in zip(src_chain, dst_chain):
                node_map[u] = v
    perm = np.zeros((graph.n_nodes, graph.n_nodes), dtype=np.intp)
    perm[node_map, np.arange(graph.n_nodes)] = 1
    return GraphPermutation(element=g, node_map=node_map, perm=perm)


def check_automorphism(graph: MorphGraph, perm: GraphPermutation):
    """Verify rho_b A rho_b^T == A and rho_b x_type == x_type exactly.

    Returns (True, None) or (False, witness) where the witness names the first
    adjacency entry or node type that differs.
    """
    src = perm.source_map
    permuted_a = graph.A[np.ix_(src, src)]
    if not np.array_equal(permuted_a, graph.A):
        i, j = np.argwhere(permuted_a != graph.A)[0]
        return False, {
            "kind": "edge",
            "i": int(i), "j": int(j),
            "expected": int(graph.A[i, j]),
            "found": int(permuted_a[i, j]),
            "element": graph.group.name_of(perm.element),
        }
    permuted_t = graph.x_type[src]
    if not np.array_equal(permuted_t, graph.x_type):
        i = int(np.flatnonzero(permuted_t != graph.x_type)[0])
        return False, {
            "kind": "node_type",
            "i": i,
            "expected": int(graph.x_type[i]),
            "found": int(permuted_t[i]),
            "element": graph.group.name_of(perm.element),
        }
    return True, None


def add_symmetry_breaking_edge(graph: MorphGraph,
                               u: int | None = None,
                               v: int | None = None) -> MorphGraph:
    """Return a copy of the graph with one extra (fresh-typed) undirected edge.

    Defaults to joining the first joints of the first two instances of orbit 0,
    which breaks every non-identity automorphism of the shipped presets.
    """
    if u is None or v is None:
        if not graph.orbit_infos:
            raise GraphConstructionError("graph has no branch chains to perturb")
        u = graph.instance_nodes(0, 0)[0]
        v = graph.instance_nodes(0, 1 % graph.group.order)[0]
    if graph.A[u, v] != 0:
        raise GraphConstructionError(f"edge ({u}, {v}) already exists")
    new_type = int(graph.A.max()) + 1
    a_mat = graph.A.copy()
    a_mat[u, v] = new_type
    a_mat[v, u] = new_type
    return MorphGraph(
        name=graph.name + "+perturbed", group=graph.group, nodes=graph.nodes,
        orbit_infos=graph.orbit_infos,
        edges=graph.edges + ((u, v, new_type), (v, u, new_type)),
        A=a_mat, x_type=graph.x_type.copy(),
        edge_type_keys=graph.edge_type_keys + (("perturbation",),),
        node_type_keys=graph.node_type_keys,
    )


# ---------------------------------------------------------------------------
# export / import
# ---------------------------------------------------------------------------

def _graph_to_dict(graph: MorphGraph) -> dict:
    return {
        "format_version": 1,
        "name": graph.name,
        "group": {
            "name": graph.group.name,
            "compose_table": graph.group.compose_table.tolist(),
            "generators": list(graph.group.generators),
            "element_names": list(graph.group.element_names),
        },
        "nodes": [
            {
                "id": n.node_id, "class": n.node_class, "orbit": n.orbit,
                "element": n.element, "chain_pos": n.chain_pos,
                "branch": n.branch_id, "label": n.physical_label,
                "joint_name": n.joint_name,
            }
            for n in graph.nodes
        ],
        "orbits": [
            {
                "q": o.q, "branch": o.branch_id, "rep_label": o.rep_label,
                "labels": list(o.labels),
                "label_of_element": list(o.label_of_element),
                "chain_len": o.chain_len,
            }
            for o in graph.orbit_infos
        ],
        "edges": sorted((u, v, t) for u, v, t in graph.edges if u < v),
        "edge_type_keys": [list(k) for k in graph.edge_type_keys],
        "node_type_keys": [list(k) for k in graph.node_type_keys],
        "x_type": graph.x_type.tolist(),
    }


def export_graph(graph: MorphGraph, fmt: str) -> str:
    """Render the graph as 'dot' or 'json' text (deterministic node order)."""
    if fmt == "json":
        return json.dumps(_graph_to_dict(graph), indent=2, sort_keys=True)
    if fmt != "dot":
        raise ValueError(f"unknown export format {fmt!r} (use 'dot' or 'json')")
    lines = [f'graph "{graph.name}" {{', "  node [style=filled];"]
    for node in graph.nodes:
        shape = _DOT_SHAPES[node.node_class]
        color = _DOT_COLORS[node.element % len(_DOT_COLORS)]
        bits = [node.node_class, graph.group.name_of(node.element)]
        if node.physical_label:
            bits.append(node.physical_label)
        if node.joint_name:
            bits.append(node.joint_name)
        label = "/".join(bits)
        lines.append(f'  n{node.node_id} [shape={shape}, fillcolor={color}, '
                     f'label="{label}"];')
    for u, v, t in sorted((u, v, t) for u, v, t in graph.edges if u < v):
        lines.append(f'  n{u} -- n{v} [label="t{t}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def import_graph_json(text: str) -> MorphGraph:
    """Rebuild a MorphGraph from its JSON export."""
    doc = json.loads(text)
    if doc.get("format_version") != 1:
        raise ValueError("unsupported graph file version")
    gdoc = doc["group"]
    group = group_from_table(
        gdoc["name"], np.asarray(gdoc["compose_table"], dtype=np.intp),
        tuple(gdoc["generators"]), tuple(gdoc["element_names"]))
    nodes = tuple(
        NodeInfo(d["id"], d["class"], d["orbit"], d["element"], d["chain_pos"],
                 d["branch"], d["label"], d["joint_name"])
        for d in doc["nodes"]
    )
    orbit_infos = tuple(
        OrbitInfo(d["q"], d["branch"], d["rep_label"], tuple(d["labels"]),
                  tuple(d["label_of_element"]), d["chain_len"])
        for d in doc["orbits"]
    )
    n = len(nodes)
    a_mat = np.zeros((n, n), dtype=np.intp)
    edges = []
    for u, v, t in doc["edges"]:
        a_mat[u, v] = t
        a_mat[v, u] = t
        edges.append((u, v, t))
        edges.append((v, u, t))
    return MorphGraph(
        name=doc["name"], group=group, nodes=nodes, orbit_infos=orbit_infos,
        edges=tuple(sorted(edges)),
        A=a_mat, x_type=np.asarray(doc["x_type"], dtype=np.intp),
        edge_type_keys=tuple(tuple(k) for k in doc["edge_type_keys"]),
        node_type_keys=tuple(tuple(k) for k in doc["node_type_keys"]),
    )


def graphs_equal(g1: MorphGraph, g2: MorphGraph) -> bool:
    return (g1.name == g2.name and g1.group == g2.group and g1.nodes == g2.nodes
            and g1.orbit_infos == g2.orbit_infos
            and sorted(g1.edges) == sorted(g2.edges)
            and np.array_equal(g1.A, g2.A)
            and np.array_equal(g1.x_type, g2.x_type)
            and g1.edge_type_keys == g2.edge_type_keys
            and g1.node_type_keys == g2.node_type_keys)
