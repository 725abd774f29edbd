"""Robot kinematic + symmetry descriptions loaded from flat config files.

A robot config is INI-style text with the sections

    [robot]                     name = ..., frame = body|world
    [group]                     preset = C2|C3|...|K4  (or an explicit table)
    [branch.<id>]               ndof, instances, end_effector, joint_names
    [action.<element>]          <branch> = OLD:NEW pairs (label permutation)
    [joint_rep.<branch>.<element>]   mat = ndof x ndof signed permutation
    [base_rep.<element>]        R = 3x3 orthogonal spatial action
    [output_rep.<task>.<element>]    mat = override for the derived output rep

Matrices are row-major literals, rows separated by ';' (or newlines).
Identity-element sections may be omitted; if present they must actually be
identities. Validation is collected, not fail-fast: `load_morphology` raises
one error listing everything wrong with the file.
"""

from __future__ import annotations

import configparser
import io
import warnings
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from mshgnn.groups import (
    GroupSpec,
    Representation,
    branch_permutation_representation,
    group_from_table,
    make_cyclic_group,
    make_klein_four,
    validate_group,
)

__all__ = [
    "BranchType",
    "RobotMorphology",
    "MorphologyError",
    "ValidationReport",
    "load_morphology",
    "parse_morphology",
    "load_preset",
    "preset_names",
    "validate_action",
    "serialize_morphology",
]

ORTHO_TOL = 1e-12

# tasks with derivable output representations; width per output node
TASK_OUTPUT_KINDS = {
    "contact": (("contact", "invariant", 1),),
    "grf-1d": (("fz", "invariant", 1),),
    "grf-3d": (("f", "vector", 3),),
    "momentum": (("l", "vector", 3), ("k", "pseudovector", 3)),
}


class MorphologyError(ValueError):
    """Config could not be parsed or failed validation."""


@dataclass(frozen=True)
class BranchType:
    """One unique kinematic branch, replicated nrep times."""

    id: str
    ndof: int
    nrep: int
    instance_labels: tuple[str, ...]
    has_end_effector: bool = True
    joint_names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.joint_names:
            object.__setattr__(self, "joint_names",
                               tuple(f"j{k}" for k in range(self.ndof)))


@dataclass
class ValidationReport:
    entries: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.entries

    def add(self, msg: str) -> None:
        self.entries.append(msg)

    def __str__(self) -> str:
        return "valid" if self.ok else "\n".join(f"- {e}" for e in self.entries)


@dataclass
class RobotMorphology:
    """Validated robot morphology; treat as immutable after load."""

    name: str
    group: GroupSpec
    branch_types: tuple[BranchType, ...]
    # actions[branch_id][g][label] -> label (identity element always present)
    actions: dict[str, dict[int, dict[str, str]]]
    # joint_mats[branch_id][g] -> (ndof, ndof) matrix (identity always present)
    joint_mats: dict[str, dict[int, np.ndarray]]
    # base_R[g] -> (3, 3) spatial orthogonal action
    base_R: dict[int, np.ndarray]
    output_overrides: dict[tuple[str, int], np.ndarray] = field(default_factory=dict)
    frame: str = "body"
    _rep_cache: dict = field(default_factory=dict, repr=False)

    def branch(self, branch_id: str) -> BranchType:
        for bt in self.branch_types:
            if bt.id == branch_id:
                return bt
        raise KeyError(branch_id)

    def action(self, branch_id: str, g: int) -> dict[str, str]:
        return self.actions[branch_id][g]

    @property
    def branch_perm_reps(self) -> dict[str, Representation]:
        if "perm" not in self._rep_cache:
            self._rep_cache["perm"] = {
                bt.id: branch_permutation_representation(
                    self.group, bt.instance_labels, self.actions[bt.id])
                for bt in self.branch_types
            }
        return self._rep_cache["perm"]

    @property
    def joint_reps(self) -> dict[str, Representation]:
        if "joint" not in self._rep_cache:
            self._rep_cache["joint"] = {
                bt.id: Representation(dim=bt.ndof, mats=dict(self.joint_mats[bt.id]),
                                      kind="signed-permutation")
                for bt in self.branch_types
            }
        return self._rep_cache["joint"]

    def base_channel_rep(self, g: int) -> np.ndarray:
        """6x6 action on base IMU channels: acceleration R, angular rate det(R)*R."""
        r = self.base_R[g]
        out = np.zeros((6, 6))
        out[:3, :3] = r
        out[3:, 3:] = np.linalg.det(r) * r
        return out

    def channel_matrix(self, kind: str, g: int, width: int) -> np.ndarray:
        """Transformation of one raw channel group under element g."""
        if kind == "invariant":
            return np.eye(width)
        r = self.base_R[g]
        if kind == "vector":
            return r
        if kind == "pseudovector":
            return np.linalg.det(r) * r
        raise ValueError(f"unknown channel kind {kind!r}")

    def output_rep(self, task_kind: str, g: int) -> np.ndarray:
        """Per-node output-space representation for a task."""
        if (task_kind, g) in self.output_overrides:
            return self.output_overrides[(task_kind, g)]
        if task_kind not in TASK_OUTPUT_KINDS:
            raise KeyError(f"no output representation defined for task {task_kind!r}")
        blocks = [self.channel_matrix(kind, g, width)
                  for _, kind, width in TASK_OUTPUT_KINDS[task_kind]]
        dim = sum(b.shape[0] for b in blocks)
        out = np.zeros((dim, dim))
        off = 0
        for b in blocks:
            d = b.shape[0]
            out[off:off + d, off:off + d] = b
            off += d
        return out

    def orbits(self, branch_id: str) -> tuple[tuple[str, ...], ...]:
        """Orbit decomposition of a branch's instance labels (stable order)."""
        bt = self.branch(branch_id)
        seen: set[str] = set()
        orbits = []
        for lbl in bt.instance_labels:
            if lbl in seen:
                continue
            orbit = []
            for g in range(self.group.order):
                img = self.actions[branch_id][g][lbl]
                if img not in orbit:
                    orbit.append(img)
            orbits.append(tuple(sorted(orbit, key=bt.instance_labels.index)))
            seen.update(orbit)
        return tuple(orbits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RobotMorphology):
            return NotImplemented
        if (self.name != other.name or self.group != other.group
                or self.branch_types != other.branch_types
                or self.actions != other.actions or self.frame != other.frame):
            return False
        for bid in self.joint_mats:
            for g in self.joint_mats[bid]:
                if not np.array_equal(self.joint_mats[bid][g], other.joint_mats[bid][g]):
                    return False
        for g in self.base_R:
            if not np.array_equal(self.base_R[g], other.base_R[g]):
                return False
        if set(self.output_overrides) != set(other.output_overrides):
            return False
        return all(np.array_equal(v, other.output_overrides[k])
                   for k, v in self.output_overrides.items())


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _parse_matrix(text: str, where: str) -> np.ndarray:
    rows = [r.strip() for r in text.replace("\n", ";").split(";") if r.strip()]
    try:
        mat = np.array([[float(v) for v in row.split()] for row in rows])
    except ValueError as exc:
        raise MorphologyError(f"{where}: bad matrix literal ({exc})") from None
    if mat.ndim != 2 or len({len(r.split()) for r in rows}) != 1:
        raise MorphologyError(f"{where}: ragged matrix literal")
    return mat


def _format_matrix(mat: np.ndarray) -> str:
    return " ; ".join(" ".join(_format_num(v) for v in row) for row in np.atleast_2d(mat))


def _format_num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def _build_group(cfg: configparser.ConfigParser, errors: list[str]) -> GroupSpec | None:
    if not cfg.has_section("group"):
        errors.append("missing [group] section")
        return None
    sec = cfg["group"]
    names_override = sec.get("elements", "").split() or None
    if "preset" in sec:
        preset = sec["preset"].strip().upper()
        if preset == "K4":
            g = make_klein_four()
        elif preset.startswith("C") and preset[1:].isdigit():
            g = make_cyclic_group(int(preset[1:]))
        else:
            errors.append(f"unknown group preset {preset!r}")
            return None
        if names_override:
            if len(names_override) != g.order:
                errors.append(
                    f"[group] elements lists {len(names_override)} names for a group "
                    f"of order {g.order}")
                return None
            g = GroupSpec(g.name, g.elements, g.compose_table, g.inverse_table,
                          g.generators, tuple(names_override))
        return g
    if "table" in sec:
        table = _parse_matrix(sec["table"], "[group] table").astype(np.intp)
        gens = tuple(int(v) for v in sec.get("generators", "").split())
        try:
            g = group_from_table(sec.get("name", "custom"), table, gens,
                                 tuple(names_override) if names_override else None)
        except ValueError as exc:
            errors.append(str(exc))
            return None
        return g
    errors.append("[group] needs either 'preset' or an explicit 'table'")
    return None


def _parse_action_pairs(value: str, where: str, errors: list[str]) -> dict[str, str]:
    mapping = {}
    for pair in value.split():
        if ":" not in pair:
            errors.append(f"{where}: expected OLD:NEW pairs, got {pair!r}")
            continue
        old, new = pair.split(":", 1)
        if old in mapping:
            errors.append(f"{where}: duplicate source label {old!r}")
        mapping[old] = new
    return mapping


def parse_morphology(text: str) -> RobotMorphology:
    """Parse config text into a validated RobotMorphology.

    All structural and semantic problems are gathered and raised together as
    one MorphologyError.
    """
    cfg = configparser.ConfigParser(interpolation=None)
    cfg.optionxform = str  # keep label case
    try:
        cfg.read_string(text)
    except configparser.Error as exc:
        raise MorphologyError(f"config parse error: {exc}") from None

    errors: list[str] = []
    group = _build_group(cfg, errors)
    name = cfg.get("robot", "name", fallback="robot")
    frame = cfg.get("robot", "frame", fallback="body")

    branch_types: list[BranchType] = []
    for section in cfg.sections():
        if not section.startswith("branch."):
            continue
        bid = section.split(".", 1)[1]
        sec = cfg[section]
        try:
            ndof = sec.getint("ndof")
        except ValueError:
            errors.append(f"[{section}]: ndof must be an integer")
            continue
        labels = tuple(sec.get("instances", "").split())
        nrep = sec.getint("nrep", fallback=len(labels))
        if ndof is None or ndof < 1:
            errors.append(f"[{section}]: ndof must be >= 1")
        if not labels:
            errors.append(f"[{section}]: instances must list at least one label")
        if len(set(labels)) != len(labels):
            errors.append(f"[{section}]: duplicate instance labels")
        if nrep != len(labels):
            errors.append(
                f"[{section}]: label mismatch, nrep={nrep} but "
                f"{len(labels)} instance labels given")
        joint_names = tuple(sec.get("joint_names", "").split())
        if joint_names and len(joint_names) != ndof:
            errors.append(f"[{section}]: joint_names must list ndof={ndof} names")
        branch_types.append(BranchType(
            id=bid, ndof=max(ndof or 1, 1), nrep=len(labels),
            instance_labels=labels,
            has_end_effector=sec.getboolean("end_effector", fallback=True),
            joint_names=joint_names,
        ))
    all_labels = [lbl for bt in branch_types for lbl in bt.instance_labels]
    if len(set(all_labels)) != len(all_labels):
        errors.append("instance labels must be unique across branch types")

    if group is None or not branch_types and not cfg.sections():
        raise MorphologyError("invalid morphology config:\n" +
                              "\n".join(f"- {e}" for e in errors))

    def elem_id(name_: str, where: str) -> int | None:
        try:
            return group.id_of(name_)
        except KeyError:
            errors.append(f"{where}: unknown group element {name_!r}")
            return None

    actions: dict[str, dict[int, dict[str, str]]] = {
        bt.id: {0: {lbl: lbl for lbl in bt.instance_labels}} for bt in branch_types
    }
    for section in cfg.sections():
        if not section.startswith("action."):
            continue
        g = elem_id(section.split(".", 1)[1], f"[{section}]")
        if g is None:
            continue
        for bid, value in cfg[section].items():
            if bid not in actions:
                errors.append(f"[{section}]: unknown branch {bid!r}")
                continue
            actions[bid][g] = _parse_action_pairs(value, f"[{section}] {bid}", errors)
    for bt in branch_types:
        for g in range(group.order):
            actions[bt.id].setdefault(
                g, {lbl: lbl for lbl in bt.instance_labels} if g == 0 else {})
            if g != 0 and not actions[bt.id][g]:
                errors.append(
                    f"branch {bt.id!r}: no [action.{group.name_of(g)}] mapping given")

    joint_mats: dict[str, dict[int, np.ndarray]] = {
        bt.id: {0: np.eye(bt.ndof)} for bt in branch_types
    }
    for section in cfg.sections():
        if not section.startswith("joint_rep."):
            continue
        parts = section.split(".")
        if len(parts) != 3:
            errors.append(f"[{section}]: expected joint_rep.<branch>.<element>")
            continue
        _, bid, gname = parts
        g = elem_id(gname, f"[{section}]")
        if g is None:
            continue
        if bid not in joint_mats:
            errors.append(f"[{section}]: unknown branch {bid!r}")
            continue
        mat = _parse_matrix(cfg[section].get("mat", ""), f"[{section}]")
        joint_mats[bid][g] = mat
    for bt in branch_types:
        for g in range(1, group.order):
            if g not in joint_mats[bt.id]:
                errors.append(
                    f"branch {bt.id!r}: missing [joint_rep.{bt.id}.{group.name_of(g)}]")
                joint_mats[bt.id][g] = np.eye(bt.ndof)

    base_R: dict[int, np.ndarray] = {0: np.eye(3)}
    for section in cfg.sections():
        if not section.startswith("base_rep."):
            continue
        g = elem_id(section.split(".", 1)[1], f"[{section}]")
        if g is None:
            continue
        base_R[g] = _parse_matrix(cfg[section].get("R", ""), f"[{section}]")
    for g in range(1, group.order):
        if g not in base_R:
            errors.append(f"missing [base_rep.{group.name_of(g)}]")
            base_R[g] = np.eye(3)

    output_overrides: dict[tuple[str, int], np.ndarray] = {}
    for section in cfg.sections():
        if not section.startswith("output_rep."):
            continue
        parts = section.split(".")
        if len(parts) != 3:
            errors.append(f"[{section}]: expected output_rep.<task>.<element>")
            continue
        _, task, gname = parts
        g = elem_id(gname, f"[{section}]")
        if g is None:
            continue
        output_overrides[(task, g)] = _parse_matrix(cfg[section].get("mat", ""),
                                                    f"[{section}]")

    morph = RobotMorphology(
        name=name, group=group, branch_types=tuple(branch_types),
        actions=actions, joint_mats=joint_mats, base_R=base_R,
        output_overrides=output_overrides, frame=frame,
    )
    report = validate_action(morph)
    errors.extend(report.entries)
    if errors:
        raise MorphologyError("invalid morphology config:\n" +
                              "\n".join(f"- {e}" for e in errors))
    # warm the representation caches now that everything checks out
    morph.branch_perm_reps  # noqa: B018
    morph.joint_reps  # noqa: B018
    return morph


def load_morphology(path) -> RobotMorphology:
    """Load and validate a robot config file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_morphology(fh.read())


def preset_names() -> tuple[str, ...]:
    from importlib import resources

    files = resources.files("mshgnn") / "presets"
    return tuple(sorted(p.name.removesuffix(".cfg")
                        for p in files.iterdir() if p.name.endswith(".cfg")))


def load_preset(name: str) -> RobotMorphology:
    """Load one of the shipped robot presets (see `preset_names`)."""
    from importlib import resources

    ref = resources.files("mshgnn") / "presets" / f"{name}.cfg"
    if not ref.is_file():
        raise MorphologyError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return parse_morphology(ref.read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate_action(morph: RobotMorphology) -> ValidationReport:
    """Check every group-action axiom and representation property.

    Violations become report entries (with the offending element/label); an
    empty report means the morphology satisfies all invariants.
    """
    report = ValidationReport()
    group = morph.group
    for issue in validate_group(group):
        report.add(f"group: {issue}")
    if not group.is_abelian():
        report.add(
            "group is not abelian: the encoder/decoder construction requires "
            "commuting symmetry elements")

    for bt in morph.branch_types:
        label_set = set(bt.instance_labels)
        acts = morph.actions[bt.id]
        well_formed = True
        for g in range(group.order):
            mapping = acts.get(g, {})
            if set(mapping) != label_set or set(mapping.values()) != label_set:
                report.add(
                    f"branch {bt.id!r}: element {group.name_of(g)} does not "
                    f"permute the instance labels (got {mapping})")
                well_formed = False
        if well_formed:
            for lbl in bt.instance_labels:
                if acts[0][lbl] != lbl:
                    report.add(f"branch {bt.id!r}: identity moves {lbl!r}")
            for g1, g2 in product(range(group.order), repeat=2):
                g12 = group.compose(g1, g2)
                for lbl in bt.instance_labels:
                    if acts[g12][lbl] != acts[g1][acts[g2][lbl]]:
                        report.add(
                            f"branch {bt.id!r}: action violates compatibility at "
                            f"(g={group.name_of(g1)}, h={group.name_of(g2)}, "
                            f"label={lbl!r})")

        mats = morph.joint_mats[bt.id]
        for g in range(group.order):
            m = mats.get(g)
            if m is None or m.shape != (bt.ndof, bt.ndof):
                report.add(f"branch {bt.id!r}: joint rep for {group.name_of(g)} "
                           f"has wrong shape")
                continue
            if np.max(np.abs(m @ m.T - np.eye(bt.ndof))) > ORTHO_TOL:
                report.add(f"branch {bt.id!r}: joint rep for {group.name_of(g)} "
                           f"is not orthogonal")
        if not np.array_equal(mats.get(0), np.eye(bt.ndof)):
            report.add(f"branch {bt.id!r}: joint rep for the identity is not I")
        for g1, g2 in product(range(group.order), repeat=2):
            m1, m2 = mats.get(g1), mats.get(g2)
            m12 = mats.get(group.compose(g1, g2))
            if m1 is None or m2 is None or m12 is None:
                continue
            if m1.shape == m2.shape == m12.shape and \
                    np.max(np.abs(m12 - m1 @ m2)) > ORTHO_TOL:
                report.add(
                    f"branch {bt.id!r}: joint reps not a homomorphism at "
                    f"({group.name_of(g1)}, {group.name_of(g2)})")

    for g in range(group.order):
        r = morph.base_R.get(g)
        if r is None or r.shape != (3, 3):
            report.add(f"base rep for {group.name_of(g)} missing or wrong shape")
            continue
        if np.max(np.abs(r @ r.T - np.eye(3))) > ORTHO_TOL:
            report.add(f"base rep for {group.name_of(g)} is not orthogonal")
    for g1, g2 in product(range(group.order), repeat=2):
        r1, r2 = morph.base_R.get(g1), morph.base_R.get(g2)
        r12 = morph.base_R.get(group.compose(g1, g2))
        if r1 is None or r2 is None or r12 is None:
            continue
        if np.max(np.abs(r12 - r1 @ r2)) > ORTHO_TOL:
            report.add(f"base reps not a homomorphism at "
                       f"({group.name_of(g1)}, {group.name_of(g2)})")

    # orbit sizes must divide the group order (orbit-stabilizer)
    if report.ok:
        for bt in morph.branch_types:
            for orbit in morph.orbits(bt.id):
                if group.order % len(orbit) != 0:
                    report.add(
                        f"branch {bt.id!r}: orbit {orbit} has size {len(orbit)} "
                        f"which does not divide |G|={group.order}")
    return report


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def serialize_morphology(morph: RobotMorphology) -> str:
    """Write a morphology back to config text (load o serialize o load stable)."""
    out = io.StringIO()
    g = morph.group

    def section(title: str, items: dict[str, str]) -> None:
        out.write(f"[{title}]\n")
        for k, v in items.items():
            out.write(f"{k} = {v}\n")
        out.write("\n")

    section("robot", {"name": morph.name, "frame": morph.frame})
    grp: dict[str, str] = {}
    if g.name == "K4" or (g.name.startswith("C") and g.name[1:].isdigit()):
        grp["preset"] = g.name
    else:
        grp["name"] = g.name
        grp["table"] = _format_matrix(g.compose_table.astype(float))
        grp["generators"] = " ".join(str(a) for a in g.generators)
    grp["elements"] = " ".join(g.element_names)
    section("group", grp)

    for bt in morph.branch_types:
        section(f"branch.{bt.id}", {
            "ndof": str(bt.ndof),
            "nrep": str(bt.nrep),
            "instances": " ".join(bt.instance_labels),
            "end_effector": "true" if bt.has_end_effector else "false",
            "joint_names": " ".join(bt.joint_names),
        })
    for e in range(1, g.order):
        items = {}
        for bt in morph.branch_types:
            mapping = morph.actions[bt.id][e]
            items[bt.id] = " ".join(f"{k}:{mapping[k]}" for k in bt.instance_labels)
        section(f"action.{g.name_of(e)}", items)
    for bt in morph.branch_types:
        for e in range(1, g.order):
            section(f"joint_rep.{bt.id}.{g.name_of(e)}",
                    {"mat": _format_matrix(morph.joint_mats[bt.id][e])})
    for e in range(1, g.order):
        section(f"base_rep.{g.name_of(e)}", {"R": _format_matrix(morph.base_R[e])})
    for (task, e), mat in sorted(morph.output_overrides.items(),
                                 key=lambda kv: (kv[0][0], kv[0][1])):
        section(f"output_rep.{task}.{g.name_of(e)}", {"mat": _format_matrix(mat)})
    return out.getvalue()
