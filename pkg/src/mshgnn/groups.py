"""Finite group tables and representation matrices for robot symmetries.

Groups are stored extensionally: dense integer element ids (0 is always the
identity), a full composition table, and an inverse table. The groups that
occur as robot morphological symmetries are tiny (order <= 8 in practice), so
every algebraic law is checked exhaustively rather than assumed.

Permutation-matrix convention
-----------------------------
For a label action ``g(j)`` ("element g sends label j to label g(j)") the
permutation matrix of ``g`` is the *pullback* matrix

    (rho(g) x)[j] = x[g(j)],

i.e. the new entry at slot j is read from the slot j is mapped to. Together
with commuting group elements this makes every representation built here a
homomorphism and makes the encoder/decoder identities in `symlayer` hold for
cyclic groups of any order, not just involutions. Robot symmetry groups are
required to be abelian by `morphology` for exactly this reason.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

__all__ = [
    "GroupSpec",
    "Representation",
    "InvalidActionError",
    "make_cyclic_group",
    "make_klein_four",
    "group_from_table",
    "validate_group",
    "branch_permutation_representation",
    "joint_space_representation",
    "validate_representation",
    "cayley_edges",
]

ORTHO_TOL = 1e-12


class InvalidActionError(ValueError):
    """An orbit action violates the group-action axioms."""


@dataclass(frozen=True)
class GroupSpec:
    """A finite group given by its composition table.

    Element ids are dense integers with 0 = identity; `element_names` carries
    the human-readable labels used in robot config files ("e", "s", "t", ...).
    """

    name: str
    elements: tuple[int, ...]
    compose_table: np.ndarray  # (|G|, |G|) int
    inverse_table: np.ndarray  # (|G|,) int
    generators: tuple[int, ...]
    element_names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "compose_table",
                           np.ascontiguousarray(self.compose_table, dtype=np.intp))
        object.__setattr__(self, "inverse_table",
                           np.ascontiguousarray(self.inverse_table, dtype=np.intp))
        self.compose_table.setflags(write=False)
        self.inverse_table.setflags(write=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def compose(self, a: int, b: int) -> int:
        return int(self.compose_table[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inverse_table[a])

    def name_of(self, g: int) -> str:
        return self.element_names[g]

    def id_of(self, name: str) -> int:
        try:
            return self.element_names.index(name)
        except ValueError:
            raise KeyError(f"unknown group element {name!r} in group {self.name}") from None

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.compose_table, self.compose_table.T))

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupSpec):
            return NotImplemented
        return (self.name == other.name
                and self.elements == other.elements
                and np.array_equal(self.compose_table, other.compose_table)
                and np.array_equal(self.inverse_table, other.inverse_table)
                and self.generators == other.generators
                and self.element_names == other.element_names)

    def __hash__(self):
        return hash((self.name, self.elements, self.generators, self.element_names,
                     self.compose_table.tobytes()))


@dataclass(frozen=True)
class Representation:
    """A matrix representation: one dim x dim real matrix per group element."""

    dim: int
    mats: dict[int, np.ndarray] = field(repr=False)
    kind: str  # "permutation" | "signed-permutation" | "orthogonal"

    def __post_init__(self):
        frozen = {}
        for g, m in self.mats.items():
            m = np.ascontiguousarray(m, dtype=np.float64)
            m.setflags(write=False)
            frozen[int(g)] = m
        object.__setattr__(self, "mats", frozen)

    def mat(self, g: int) -> np.ndarray:
        return self.mats[g]


def _validate_spec_arrays(n: int, compose: np.ndarray) -> list[str]:
    issues = []
    if compose.shape != (n, n):
        issues.append(f"compose_table shape {compose.shape} != ({n}, {n})")
        return issues
    if compose.min() < 0 or compose.max() >= n:
        issues.append("closure violated: compose_table contains ids outside 0..|G|-1")
    return issues


def validate_group(spec: GroupSpec) -> list[str]:
    """Exhaustively check the group axioms; returns a list of violations."""
    n = spec.order
    compose = spec.compose_table
    issues = _validate_spec_arrays(n, compose)
    if issues:
        return issues
    if spec.elements != tuple(range(n)):
        issues.append("elements must be the dense range 0..|G|-1")
    for g in range(n):
        if compose[0, g] != g or compose[g, 0] != g:
            issues.append(f"identity violated at element {g}")
        if compose[g, spec.inverse_table[g]] != 0 or compose[spec.inverse_table[g], g] != 0:
            issues.append(f"inverse violated at element {g}")
    for a, b, c in product(range(n), repeat=3):
        if compose[compose[a, b], c] != compose[a, compose[b, c]]:
            issues.append(f"associativity violated at ({a}, {b}, {c})")
            break
    # generators must reach every element under closure
    reached = {0}
    frontier = [0]
    while frontier:
        g = frontier.pop()
        for a in spec.generators:
            for nxt in (spec.compose(g, a), spec.compose(a, g)):
                if nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
    if len(reached) != n:
        issues.append(f"generators {spec.generators} generate only {sorted(reached)}")
    return issues


def _finish_group(name, compose, generators, element_names) -> GroupSpec:
    n = compose.shape[0]
    inverse = np.empty(n, dtype=np.intp)
    for g in range(n):
        col = np.flatnonzero(compose[g] == 0)
        if col.size != 1:
            raise ValueError(f"element {g} has no unique inverse")
        inverse[g] = col[0]
    spec = GroupSpec(
        name=name,
        elements=tuple(range(n)),
        compose_table=compose,
        inverse_table=inverse,
        generators=tuple(generators),
        element_names=tuple(element_names),
    )
    issues = validate_group(spec)
    if issues:
        raise ValueError(f"invalid group {name!r}: " + "; ".join(issues))
    return spec


def make_cyclic_group(n: int) -> GroupSpec:
    """The cyclic group C_n with compose(i, j) = (i + j) mod n."""
    if n < 1:
        raise ValueError(f"cyclic group order must be >= 1, got {n}")
    i = np.arange(n)
    compose = (i[:, None] + i[None, :]) % n
    names = ["e"] + [f"r{k}" for k in range(1, n)]
    generators = (1,) if n > 1 else ()
    return _finish_group(f"C{n}", compose.astype(np.intp), generators, names)


def make_klein_four() -> GroupSpec:
    """The Klein four-group K4 = {e, s, t, st}; every element is an involution.

    Realized as C2 x C2 with the canonical element order [e, s, t, st], so
    composition is XOR on the 2-bit ids.
    """
    i = np.arange(4)
    compose = (i[:, None] ^ i[None, :]).astype(np.intp)
    return _finish_group("K4", compose, (1, 2), ["e", "s", "t", "st"])


def group_from_table(name: str, compose: np.ndarray, generators: tuple[int, ...],
                     element_names: tuple[str, ...] | None = None) -> GroupSpec:
    """Build (and exhaustively validate) a group from an explicit table."""
    compose = np.asarray(compose, dtype=np.intp)
    n = compose.shape[0]
    if element_names is None:
        element_names = tuple(["e"] + [f"g{k}" for k in range(1, n)])
    return _finish_group(name, compose, generators, element_names)


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------

def _check_action_axioms(group: GroupSpec, labels: tuple[str, ...],
                         action: dict[int, dict[str, str]]) -> None:
    label_set = set(labels)
    for g, mapping in action.items():
        if set(mapping) != label_set or set(mapping.values()) != label_set:
            raise InvalidActionError(
                f"element {group.name_of(g)} does not permute the labels {labels}: "
                f"{mapping}")
    ident = action[0]
    for lbl in labels:
        if ident[lbl] != lbl:
            raise InvalidActionError(
                f"identity must act trivially, maps {lbl!r} to {ident[lbl]!r}")
    for g1, g2 in product(range(group.order), repeat=2):
        g12 = group.compose(g1, g2)
        for lbl in labels:
            if action[g12][lbl] != action[g1][action[g2][lbl]]:
                raise InvalidActionError(
                    f"action incompatible with composition at "
                    f"(g1={group.name_of(g1)}, g2={group.name_of(g2)}, label={lbl!r}): "
                    f"{group.name_of(g12)} sends it to {action[g12][lbl]!r} but "
                    f"{group.name_of(g1)} o {group.name_of(g2)} sends it to "
                    f"{action[g1][action[g2][lbl]]!r}")


def branch_permutation_representation(group: GroupSpec, labels: tuple[str, ...],
                                      action: dict[int, dict[str, str]]) -> Representation:
    """Permutation representation of the group on branch instance labels.

    `action[g][label]` is the label `g` sends `label` to (a left action;
    the identity element 0 may be omitted). Matrices follow the pullback
    convention documented in the module docstring.
    """
    labels = tuple(labels)
    action = {int(g): dict(m) for g, m in action.items()}
    action.setdefault(0, {lbl: lbl for lbl in labels})
    missing = [g for g in range(group.order) if g not in action]
    if missing:
        raise InvalidActionError(
            f"orbit action missing elements {[group.name_of(g) for g in missing]}")
    _check_action_axioms(group, labels, action)

    n = len(labels)
    index = {lbl: k for k, lbl in enumerate(labels)}
    mats = {}
    for g in range(group.order):
        m = np.zeros((n, n))
        for j, lbl in enumerate(labels):
            m[j, index[action[g][lbl]]] = 1.0
        mats[g] = m
    rep = Representation(dim=n, mats=mats, kind="permutation")
    issues = validate_representation(group, rep)
    if issues:
        # with a left action this triggers exactly when the acting permutations
        # do not commute; the morphological construction needs abelian groups
        raise InvalidActionError(
            "orbit action does not yield a homomorphic permutation representation "
            "(non-commuting label permutations?): " + "; ".join(issues))
    return rep


def joint_space_representation(morphology) -> Representation:
    """The full joint-space representation of a robot.

    Direct sum over branch types of (instance permutation) kron (per-instance
    joint matrix); dimension is sum_i nrep_i * ndof_i. Signed-permutation
    per-branch matrices make the result a signed permutation as well.
    """
    group = morphology.group
    dims = []
    for bt in morphology.branch_types:
        if bt.id not in morphology.branch_perm_reps or bt.id not in morphology.joint_reps:
            raise ValueError(f"missing per-branch representation for branch {bt.id!r}")
        dims.append(bt.nrep * bt.ndof)
    total = int(sum(dims))
    mats = {}
    for g in range(group.order):
        blocks = []
        for bt in morphology.branch_types:
            perm = morphology.branch_perm_reps[bt.id].mat(g)
            joint = morphology.joint_reps[bt.id].mat(g)
            blocks.append(np.kron(perm, joint))
        m = np.zeros((total, total))
        off = 0
        for blk in blocks:
            d = blk.shape[0]
            m[off:off + d, off:off + d] = blk
            off += d
        mats[g] = m
    rep = Representation(dim=total, mats=mats, kind="signed-permutation")
    issues = validate_representation(morphology.group, rep)
    if issues:
        raise ValueError("joint-space representation invalid: " + "; ".join(issues))
    return rep


def validate_representation(group: GroupSpec, rep: Representation) -> list[str]:
    """Check identity / homomorphism / kind-specific matrix structure."""
    issues = []
    for g in range(group.order):
        if g not in rep.mats:
            issues.append(f"missing matrix for element {group.name_of(g)}")
    if issues:
        return issues
    if not np.array_equal(rep.mat(0), np.eye(rep.dim)):
        issues.append("rho(identity) != I")
    for g1, g2 in product(range(group.order), repeat=2):
        lhs = rep.mat(group.compose(g1, g2))
        rhs = rep.mat(g1) @ rep.mat(g2)
        tol = 0.0 if rep.kind == "permutation" else ORTHO_TOL
        if np.max(np.abs(lhs - rhs)) > tol:
            issues.append(
                f"homomorphism fails at ({group.name_of(g1)}, {group.name_of(g2)})")
    for g in range(group.order):
        m = rep.mat(g)
        if m.shape != (rep.dim, rep.dim):
            issues.append(f"matrix for {group.name_of(g)} has shape {m.shape}")
            continue
        if rep.kind == "permutation":
            ok = (np.isin(m, (0.0, 1.0)).all()
                  and (m.sum(axis=0) == 1).all() and (m.sum(axis=1) == 1).all())
            if not ok:
                issues.append(f"{group.name_of(g)} is not a permutation matrix")
        else:
            if np.max(np.abs(m @ m.T - np.eye(rep.dim))) > ORTHO_TOL:
                issues.append(f"{group.name_of(g)} is not orthogonal")
            if rep.kind == "signed-permutation" and not np.isin(m, (-1.0, 0.0, 1.0)).all():
                issues.append(f"{group.name_of(g)} is not a signed permutation")
    return issues


# ---------------------------------------------------------------------------
# Cayley graph
# ---------------------------------------------------------------------------

def cayley_edges(group: GroupSpec) -> list[tuple[int, int, int]]:
    """Directed Cayley edges (g, g o a, a) for every element g and generator a.

    The edge type is the generator id. For a generator set that generates the
    group (a GroupSpec invariant) the underlying undirected graph is connected;
    the trivial group yields no edges.
    """
    return [(g, group.compose(g, a), a)
            for g in range(group.order) for a in group.generators]
