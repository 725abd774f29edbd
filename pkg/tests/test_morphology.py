"""Config ingestion, preset validation, serialization round trips."""

import numpy as np
import pytest

from mshgnn.morphology import (
    MorphologyError,
    load_preset,
    parse_morphology,
    preset_names,
    serialize_morphology,
    validate_action,
)
from mshgnn.groups import joint_space_representation, validate_representation


def test_preset_names():
    assert set(preset_names()) == {"mini_cheetah_k4", "a1_c2", "solo_k4"}


def test_mini_cheetah_preset():
    m = load_preset("mini_cheetah_k4")
    assert m.group.name == "K4"
    assert len(m.branch_types) == 1
    leg = m.branch_types[0]
    assert leg.nrep == 4 and leg.ndof == 3
    assert leg.instance_labels == ("LF", "LH", "RF", "RH")
    # single K4 orbit over the four legs
    assert m.orbits("leg") == (("LF", "LH", "RF", "RH"),)


def test_a1_preset():
    m = load_preset("a1_c2")
    assert m.group.name == "C2"
    leg = m.branch_types[0]
    assert leg.nrep == 4 and leg.ndof == 3
    # sagittal C2 splits the legs into front and hind orbits
    assert m.orbits("leg") == (("LF", "RF"), ("LH", "RH"))


@pytest.mark.parametrize("name", ["mini_cheetah_k4", "a1_c2", "solo_k4"])
def test_presets_validate_clean(name):
    # derived: exhaustive axiom check over |G| x labels pairs
    report = validate_action(load_preset(name))
    assert report.ok, str(report)


@pytest.mark.parametrize("name", ["mini_cheetah_k4", "a1_c2", "solo_k4"])
def test_preset_joint_space_representation(name):
    m = load_preset(name)
    rep = joint_space_representation(m)
    assert rep.dim == 12  # nrep(leg)=4 replicated chains of 3 dof
    assert np.array_equal(rep.mat(0), np.eye(12))
    for g in m.group.elements:
        assert np.max(np.abs(rep.mat(g) @ rep.mat(g).T - np.eye(12))) < 1e-12
        if m.group.inverse(g) == g:
            assert np.array_equal(rep.mat(g) @ rep.mat(g), np.eye(12))
    assert validate_representation(m.group, rep) == []


def test_base_channel_rep_pseudovector_rule():
    m = load_preset("mini_cheetah_k4")
    s = m.group.id_of("s")
    rep = m.base_channel_rep(s)
    # acceleration block: reflection; angular velocity block: det(R) * R
    assert np.array_equal(rep[:3, :3], np.diag([1.0, -1.0, 1.0]))
    assert np.array_equal(rep[3:, 3:], np.diag([-1.0, 1.0, -1.0]))


def test_output_rep_momentum():
    m = load_preset("solo_k4")
    s = m.group.id_of("s")
    out = m.output_rep("momentum", s)
    assert np.array_equal(out[:3, :3], np.diag([1.0, -1.0, 1.0]))
    assert np.array_equal(out[3:, 3:], np.diag([-1.0, 1.0, -1.0]))
    assert np.array_equal(m.output_rep("contact", s), np.eye(1))
    assert np.array_equal(m.output_rep("grf-3d", s), np.diag([1.0, -1.0, 1.0]))


def test_label_mismatch_rejected():
    text = load_preset("a1_c2")  # build broken config from a valid one
    cfg = serialize_morphology(text).replace("nrep = 4", "nrep = 5")
    with pytest.raises(MorphologyError, match="label mismatch"):
        parse_morphology(cfg)


def test_broken_permutation_reported():
    cfg = serialize_morphology(load_preset("a1_c2")).replace(
        "leg = LF:RF LH:RH RF:LF RH:LH", "leg = LF:RF LH:RH RF:RH RH:LH")
    with pytest.raises(MorphologyError) as err:
        parse_morphology(cfg)
    assert "permute" in str(err.value)


def test_singular_joint_rep_reported():
    cfg = serialize_morphology(load_preset("a1_c2")).replace(
        "mat = -1 0 0 ; 0 1 0 ; 0 0 1", "mat = 0 0 0 ; 0 1 0 ; 0 0 1")
    with pytest.raises(MorphologyError, match="not orthogonal"):
        parse_morphology(cfg)


def test_errors_are_collected_together():
    cfg = serialize_morphology(load_preset("a1_c2"))
    cfg = cfg.replace("nrep = 4", "nrep = 5")
    cfg = cfg.replace("R = 1 0 0 ; 0 -1 0 ; 0 0 1", "R = 1 0 0 ; 0 -2 0 ; 0 0 1")
    with pytest.raises(MorphologyError) as err:
        parse_morphology(cfg)
    msg = str(err.value)
    assert "label mismatch" in msg and "not orthogonal" in msg


def test_nonabelian_group_rejected():
    # S3 given as an explicit table: valid group, but not abelian
    import itertools
    perms = list(itertools.permutations(range(3)))
    compose = np.array([[perms.index(tuple(p[q[i]] for i in range(3))) for q in perms]
                        for p in perms])
    rows = " ; ".join(" ".join(str(v) for v in row) for row in compose)
    text = f"""
[robot]
name = sym3

[group]
table = {rows}
generators = 1 3

[branch.arm]
ndof = 1
instances = A

[action.g1]
arm = A:A

[action.g2]
arm = A:A

[action.g3]
arm = A:A

[action.g4]
arm = A:A

[action.g5]
arm = A:A

[joint_rep.arm.g1]
mat = 1

[joint_rep.arm.g2]
mat = 1

[joint_rep.arm.g3]
mat = 1

[joint_rep.arm.g4]
mat = 1

[joint_rep.arm.g5]
mat = 1

[base_rep.g1]
R = 1 0 0 ; 0 1 0 ; 0 0 1

[base_rep.g2]
R = 1 0 0 ; 0 1 0 ; 0 0 1

[base_rep.g3]
R = 1 0 0 ; 0 1 0 ; 0 0 1

[base_rep.g4]
R = 1 0 0 ; 0 1 0 ; 0 0 1

[base_rep.g5]
R = 1 0 0 ; 0 1 0 ; 0 0 1
"""
    with pytest.raises(MorphologyError, match="abelian"):
        parse_morphology(text)


@pytest.mark.parametrize("name", ["mini_cheetah_k4", "a1_c2", "solo_k4"])
def test_serialize_round_trip(name):
    m1 = load_preset(name)
    m2 = parse_morphology(serialize_morphology(m1))
    assert m1 == m2
    # idempotent: serialize o load o serialize is stable
    assert serialize_morphology(m1) == serialize_morphology(m2)


def test_malformed_text_raises():
    with pytest.raises(MorphologyError):
        parse_morphology("this is not a config [")


def test_unknown_preset():
    with pytest.raises(MorphologyError, match="available"):
        load_preset("atlas_c3")
