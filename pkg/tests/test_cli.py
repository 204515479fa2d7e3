import subprocess
import sys
from pathlib import Path

import pytest

from fsiplate import cli

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

GOLDEN_RUNS = {
    "constants.txt": ["constants"],
    "table1.txt": ["table1"],
    "certify.txt": ["certify", str(DATA / "bump.txt"), "--zero-u0", "--kappa", "0.5"],
    "simulate.csv": ["simulate", str(DATA / "small.ini")],
}


def invoke(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_report(text):
    return dict(line.split("=", 1) for line in text.splitlines())


@pytest.mark.parametrize("name", sorted(GOLDEN_RUNS))
def test_matches_golden(capsys, name):
    code, out, _ = invoke(capsys, *GOLDEN_RUNS[name])
    assert code == 0
    assert out == (GOLDEN / name).read_text()


def test_repeated_subprocess_runs_are_identical(tmp_path):
    outs = []
    for k in range(2):
        target = tmp_path / f"c{k}.txt"
        subprocess.run([sys.executable, "-m", "fsiplate.cli", "-o", str(target), "constants"], check=True)
        outs.append(target.read_bytes())
    assert outs[0] == outs[1] == (GOLDEN / "constants.txt").read_bytes()


def test_constants_values(capsys):
    code, out, _ = invoke(capsys, "constants", "--kappa", "0.5")
    r = parse_report(out)
    assert code == 0
    assert float(r["curvature_threshold"]) == pytest.approx(64.65, abs=0.01)
    assert float(r["inv_c_s_sq"]) == pytest.approx(258.598, abs=0.01)
    assert float(r["lattice_sum"]) == pytest.approx(6.026812, abs=1e-6)
    assert all(v.count("e") == 1 for k, v in r.items())


@pytest.mark.parametrize("kappa", ["1.0", "0", "-0.2", "abc"])
def test_constants_rejects_bad_kappa(capsys, kappa):
    code, out, err = invoke(capsys, "constants", "--kappa", kappa)
    assert code == cli.EXIT_INPUT
    assert out == ""
    assert "kappa" in err or "invalid" in err


def test_certify_verdicts(capsys):
    code, out, _ = invoke(capsys, "certify", str(DATA / "flat.txt"), "--zero-u0", "--kappa", "0.9")
    assert code == 0 and parse_report(out)["holds"] == "true"
    code, out, _ = invoke(capsys, "certify", str(DATA / "big_bump.txt"), "--zero-u0", "--kappa", "0.5")
    assert code == cli.EXIT_CERT_FAILS and parse_report(out)["holds"] == "false"


def test_certify_poiseuille_option(capsys):
    code, out, _ = invoke(
        capsys, "certify", str(DATA / "flat_x2.txt"), "--u0-poiseuille", str(DATA / "shear.txt"),
        "--eps", "1", "--nz", "32", "--c-trace", "1",
    )
    r = parse_report(out)
    assert code == 0
    assert float(r["eta1_trace_bound"]) > 0
    assert float(r["e0"]) > 0


def test_certify_requires_velocity_source(capsys):
    code, _, _ = invoke(capsys, "certify", str(DATA / "flat.txt"))
    assert code == cli.EXIT_INPUT
    code, _, _ = invoke(capsys, "certify", str(DATA / "missing.txt"), "--zero-u0")
    assert code == cli.EXIT_INPUT


def test_nondim(capsys):
    code, out, _ = invoke(capsys, "nondim", str(DATA / "device.txt"))
    r = parse_report(out)
    assert code == 0
    assert float(r["re"]) == pytest.approx(10.0)
    assert float(r["bending"]) == pytest.approx(1.111e-7, rel=1e-3)
    assert r["thin_plate"] == "false"
    code, out, err = invoke(capsys, "nondim", str(DATA / "bad_device.txt"))
    assert code == cli.EXIT_INPUT and "mu" in err


def test_device_table_csv(capsys):
    code, out, _ = invoke(capsys, "table1")
    lines = out.splitlines()
    assert lines[0] == "reference,eps,re,beta,indicator"
    reference = [1.04e-12, 2.06e-14, 2.08e-13, 1.62e-5]
    for line, ref in zip(lines[1:], reference):
        assert float(line.split(",")[-1]) == pytest.approx(ref, rel=0.05)


def test_simulate_zero_config(capsys):
    code, out, _ = invoke(capsys, "simulate", str(DATA / "zero.ini"))
    lines = out.splitlines()
    assert code == 0
    assert lines[-1] == "# status=Completed"
    assert all(row.split(",")[1] == "0.00000000e+00" for row in lines[1:-1])


def test_simulate_unstable_exit(capsys):
    code, out, _ = invoke(capsys, "simulate", str(DATA / "blowup.ini"))
    assert code == cli.EXIT_UNSTABLE
    assert out.splitlines()[-1].startswith("# status=Unstable@")


def test_simulate_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[grid]\nnx = 16\n")
    assert invoke(capsys, "simulate", str(bad))[0] == cli.EXIT_INPUT
    bad.write_text(f"[init]\neta0_file = {DATA / 'profile.txt'}\n[extra]\nx = 1\n")
    assert invoke(capsys, "simulate", str(bad))[0] == cli.EXIT_INPUT
    bad.write_text(f"[init]\neta0_file = {DATA / 'profile.txt'}\nu0_mode = swirl\n")
    assert invoke(capsys, "simulate", str(bad))[0] == cli.EXIT_INPUT
    bad.write_text(f"[init]\neta0_file = {DATA / 'profile.txt'}\n[grid]\nnx = 12\n")
    assert invoke(capsys, "simulate", str(bad))[0] == cli.EXIT_INPUT


def test_load_sim_config_paths_are_relative_to_config():
    cfg = cli.load_sim_config(DATA / "small.ini")
    assert cfg.nx == 16 and cfg.nz == 8 and cfg.n_steps == 100
    assert cfg.initial.poiseuille_amplitude == pytest.approx(0.2)


def test_output_option(tmp_path, capsys):
    target = tmp_path / "t.csv"
    assert cli.main(["-o", str(target), "table1"]) == 0
    assert capsys.readouterr().out == ""
    assert target.read_text() == (GOLDEN / "table1.txt").read_text()
