import numpy as np
import pytest

from clifford_cwt import clwf
from clifford_cwt.cli import main

SMALL = ["--grid", "32"]


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_gabor_command(tmp_path, capsys):
    rc, out, _ = run(capsys, "gabor", *SMALL, "--out", str(tmp_path / "m.clwf"))
    assert rc == 0 and "zero mean: yes" in out
    f, meta = clwf.load(tmp_path / "m.clwf")
    assert f.grid.shape == (32, 32) and meta["mother"]["kind"] == "gabor"


def test_amplitude_flag(tmp_path, capsys):
    rc, out, _ = run(capsys, "gabor", *SMALL, "--A", "e1", "--out", str(tmp_path / "m.clwf"))
    assert rc == 0 and "epsilon=-1" in out
    rc, _, err = run(capsys, "gabor", *SMALL, "--A", "1,1,0,0", "--out", str(tmp_path / "x.clwf"))
    assert rc == 2 and "even-graded or odd-graded" in err
    assert not (tmp_path / "x.clwf").exists()


def test_admissibility_command(capsys):
    rc, out, _ = run(capsys, "admissibility", *SMALL)
    assert rc == 0 and "+2.026428" in out and "invertible: yes" in out


def test_transform_invert_and_export(tmp_path, capsys):
    sig, W, rec, txt = (str(tmp_path / name) for name in ("s.clwf", "w.clwf", "r.clwf", "p.csv"))
    assert run(capsys, "signal", *SMALL, "--out", sig)[0] == 0
    rc, out, _ = run(capsys, "transform", "--signal", sig, "--scales", "0.5,4,16", "--rotations", "16", "--out", W)
    assert rc == 0 and "J=16, K=16" in out
    rc, out, _ = run(capsys, "invert", "--coeffs", W, "--out", rec, "--max-error", "0.05")
    assert rc == 0
    err = float(out.split("relative reconstruction error:")[1].split()[0])
    assert err < 0.05
    rc, _, _ = run(capsys, "invert", "--coeffs", W, "--out", rec, "--max-error", "1e-12")
    assert rc == 1
    rc, out, _ = run(capsys, "export-plot", "--coeffs", W, "--out", txt, "--node", "3", "2", "--stride", "4")
    assert rc == 0
    rows = open(txt).read().splitlines()
    assert rows[0] == "j,k,a,theta,b1,b2,modulus" and len(rows) == 1 + 32 * 32 // 4
    assert all(r.startswith("3,2,") for r in rows[1:])


def test_transform_is_deterministic(tmp_path, capsys):
    sig = str(tmp_path / "s.clwf")
    run(capsys, "signal", *SMALL, "--kind", "gaussian", "--out", sig)
    outs = []
    for name in ("a.clwf", "b.clwf"):
        run(capsys, "transform", "--signal", sig, "--scales", "0.5,4,4", "--rotations", "4", "--out", str(tmp_path / name))
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]


def test_direct_and_spectral_methods_agree(tmp_path, capsys):
    sig = str(tmp_path / "s.clwf")
    run(capsys, "signal", "--grid", "16", "--out", sig)
    for method in ("direct", "spectral"):
        rc, _, _ = run(capsys, "transform", "--signal", sig, "--scales", "0.5,1,2", "--rotations", "2",
                       "--method", method, "--out", str(tmp_path / f"{method}.clwf"))
        assert rc == 0
    Wd, _ = clwf.load(tmp_path / "direct.clwf")
    Ws, _ = clwf.load(tmp_path / "spectral.clwf")
    assert np.abs(Wd.data - Ws.data).max() <= 1e-8 * np.abs(Wd.data).max()


def test_verify_writes_report(tmp_path, capsys):
    cfg = tmp_path / "small.yaml"
    cfg.write_text("samples: 32\nscales: [0.5, 4.0, 8]\nrotations: 8\ninversion_grid: [8, 8]\nprobes: 3\nsuite_signals: 2\n")
    report = tmp_path / "report.txt"
    rc, out, _ = run(capsys, "verify", "--config", str(cfg), "--report", str(report))
    lines = [l for l in report.read_text().splitlines() if not l.startswith("#")]
    assert all(l.split()[-1] in ("PASS", "FAIL") for l in lines)
    # coarse grids cannot meet the convergence tolerances, and the exit code says so
    assert rc == (0 if all(l.endswith("PASS") for l in lines) else 1)
    assert "zero_mean" in out


def test_errors_map_to_exit_codes(tmp_path, capsys):
    rc, _, err = run(capsys, "transform", "--signal", str(tmp_path / "missing.clwf"), "--out", str(tmp_path / "w"))
    assert rc == 1 and "missing.clwf" in err
    bad = tmp_path / "bad.clwf"
    bad.write_bytes(b"CLWF" + bytes(40))
    rc, _, err = run(capsys, "invert", "--coeffs", str(bad), "--out", str(tmp_path / "r"))
    assert rc == 2
    cfg = tmp_path / "c.yaml"
    cfg.write_text("bogus: 1\n")
    rc, _, err = run(capsys, "admissibility", "--config", str(cfg))
    assert rc == 2 and "unknown profile keys" in err
    with pytest.raises(SystemExit):
        main(["transform"])
