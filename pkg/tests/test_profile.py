import json

import pytest

from clifford_cwt.profile import Profile, build_mother, load_profile, merge


def test_defaults_by_dimension():
    p2, p3 = Profile.default(2), Profile.default(3)
    assert p2.n == 2 and p2.samples == 64 and p2.scales == (0.5, 4.0, 16)
    assert p3.n == 3 and len(p3.mother["A"]) == 8
    with pytest.raises(ValueError):
        Profile.default(4)


def test_precedence_file_then_flags(tmp_path):
    cfg = tmp_path / "p.yaml"
    cfg.write_text("samples: 48\nrotations: 12\nmother:\n  sigma: [1.0, 1.0]\n")
    p = load_profile(str(cfg), {"rotations": 20, "seed": None})
    assert p.samples == 48 and p.rotations == 20 and p.seed == Profile().seed
    # partial mother overrides keep the remaining parameters
    assert p.mother["sigma"] == [1.0, 1.0] and p.mother["omega0"] == [4.0, 0.0]


def test_json_config_and_n_switch(tmp_path):
    cfg = tmp_path / "p.json"
    cfg.write_text(json.dumps({"n": 3, "scales": [1.0, 2.0, 2]}))
    p = load_profile(str(cfg))
    assert p.n == 3 and p.scales == (1.0, 2.0, 2)
    assert p.group_grid().shape == (2, p.rotations)


def test_unknown_keys_and_bad_values():
    with pytest.raises(ValueError, match="unknown"):
        merge(Profile(), {"smaples": 3})
    with pytest.raises(ValueError):
        merge(Profile(), {"scales": (2.0, 1.0, 4)}).validate()
    with pytest.raises(ValueError):
        merge(Profile(), {"mother": {"A": [1.0, 0.0]}}).validate()


def test_rng_streams_are_reproducible():
    p = Profile()
    assert p.rng(3).standard_normal() == p.rng(3).standard_normal()
    assert p.rng(3).standard_normal() != p.rng(4).standard_normal()


def test_build_mother_from_file(tmp_path):
    from clifford_cwt import clwf

    p = Profile()
    psi = build_mother(p.mother, 2)
    clwf.save(tmp_path / "m.clwf", psi.sample(p.spatial_grid()))
    sampled = build_mother({"kind": "file", "path": str(tmp_path / "m.clwf")}, 2)
    assert sampled.spectrum is None
    with pytest.raises(ValueError):
        build_mother({"kind": "file", "path": str(tmp_path / "m.clwf")}, 3)
    with pytest.raises(ValueError):
        build_mother({"kind": "morlet"}, 2)
