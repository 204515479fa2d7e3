"""End-to-end acceptance checks, one test per criterion.

Each test reports a PASS/FAIL line (collected in the terminal summary) and
then asserts, so a failing criterion also fails the suite.
"""
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.special import zeta

from fsiplate import fields, lattice, nondim
from fsiplate.certificate import InitialData, certify, poiseuille_energy, poiseuille_velocity, subgraph_l2_sq
from fsiplate.fields import PeriodicField
from fsiplate.simulator import ChannelData, SimConfig, Simulator, certify_channel, contact_monitor, energy_audit
from oracles import beam_relative_error

GOLDEN = Path(__file__).parent / "golden"
DATA = Path(__file__).parent / "data"
CATALAN = 0.915965594177219015054603514932


def test_lattice_constants(criterion):
    t0 = time.perf_counter()
    s = lattice.epstein_sum(2.0, 2000.0)
    c_s = lattice.sobolev_constant(2000.0)
    elapsed = time.perf_counter() - t0
    oracle = 4 * float(zeta(2.0)) * CATALAN
    ok = abs(s.value - oracle) <= 1e-5 and abs(1 / c_s**2 - 258.598) <= 0.01 and elapsed < 1.0
    criterion(
        "lattice sum and Sobolev constant",
        ok,
        f"sum={s.value:.8f} oracle={oracle:.8f} 1/C_S^2={1 / c_s**2:.5f} (reference 258.598) time={elapsed:.3f}s",
    )
    assert ok


def test_device_indicator_table(criterion):
    t0 = time.perf_counter()
    rows = nondim.table1()
    elapsed = time.perf_counter() - t0
    got = sorted(r.indicator for r in rows)
    reference = sorted([2.06e-14, 1.04e-12, 2.08e-13, 1.62e-5])
    rel = [abs(g / p - 1) for g, p in zip(got, reference)]
    ok = max(rel) <= 0.05 and elapsed < 0.1
    criterion("device indicator table", ok, f"max relative deviation {max(rel):.2%}, time={elapsed * 1e3:.2f}ms")
    assert ok


def test_sobolev_property_suite(criterion):
    rng = np.random.default_rng(20261015)
    c_s = lattice.converged_sobolev_constant()
    t0 = time.perf_counter()
    failures, worst = 0, math.inf
    for _ in range(1000):
        f = fields.random_bandlimited(32, 8, rng, amplitude=rng.uniform(0.01, 10.0))
        gap = c_s * fields.l2_norm(fields.laplacian(f)) + 1e-9 - fields.linf_deviation(f)
        worst = min(worst, gap)
        failures += gap < 0
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 30
    criterion("Sobolev inequality on 1000 fields", ok, f"failures={failures} min gap={worst:.3e} time={elapsed:.2f}s")
    assert ok


def test_certificate_flip_point(criterion):
    kappa = 1e-12

    def holds(a):
        eta0 = PeriodicField.from_function(lambda x1, x2: 1 + a * np.sin(2 * np.pi * x1) + 0 * x2, 32)
        return certify(InitialData.at_rest(eta0), kappa=kappa).holds

    lo, hi = 0.0, 0.99
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if holds(mid) else (lo, mid)
    grid = np.linspace(0.0, 0.95, 96)
    verdicts = [holds(a) for a in grid]
    monotone = verdicts == sorted(verdicts, reverse=True)
    ok = abs(lo - 0.5762) <= 1e-3 and monotone
    criterion("certificate flip point", ok, f"a*={lo:.6f} (expected 0.5762 +- 1e-3), monotone={monotone}")
    assert ok


def test_poiseuille_closed_form(criterion):
    n, eps = 16, 0.5
    h0 = PeriodicField.from_function(lambda x1, x2: 1 + 0.3 * np.sin(2 * np.pi * x2) + 0 * x1, n)
    ut = PeriodicField.from_function(lambda x1, x2: 1 + 0.5 * np.cos(2 * np.pi * x1) * np.cos(2 * np.pi * x2), n)
    exact = poiseuille_energy(h0, ut, eps)
    eta0 = PeriodicField(eps * h0.values)
    errs = {nz: abs(subgraph_l2_sq(poiseuille_velocity(h0, ut, eps, nz), eta0) / exact - 1) for nz in (64, 128, 256)}
    rates = [math.log2(errs[64] / errs[128]), math.log2(errs[128] / errs[256])]
    ok = errs[256] <= 1e-6 and min(rates) >= 1.9
    criterion(
        "Poiseuille quadrature",
        ok,
        f"rel err at nz=256 {errs[256]:.2e}, observed orders {rates[0]:.2f}, {rates[1]:.2f}",
    )
    assert ok


def test_simulator_conservation(criterion, certified_default_run):
    cfg, cert, series, elapsed = certified_default_run
    drift = float(np.max(np.abs(series.mean_eta - series.mean_eta[0])))
    ok = series.status.kind == "Completed" and drift <= 1e-8 and elapsed < 300
    criterion(
        "mean height conservation",
        ok,
        f"status={series.status} steps={len(series) - 1} drift={drift:.2e} time={elapsed:.1f}s",
    )
    assert ok


def test_simulator_energy_audit(criterion, certified_default_run):
    cfg, cert, series, _ = certified_default_run
    rep = energy_audit(series, tol_per_step=1e-6)
    x = np.arange(32) / 32
    eta0, eta1 = 1 + 0.1 * np.cos(2 * np.pi * x), 0.05 * np.sin(2 * np.pi * x)
    beam = {}
    for nu in (0.02, 0.05, 0.1, 0.2):
        sim = Simulator(SimConfig(ChannelData(eta0, eta1), nx=32, nz=4, dt=1e-4, t_end=1.0, damping=nu, fluid=False))
        sim.run()
        s = sim.final_state
        beam[nu] = beam_relative_error(s.eta, s.eta_t, eta0, eta1, 1.0, 1.0, nu, s.time)[0]
    worst = max(beam.values())
    ok = cert.holds and not rep.flagged and worst <= 1e-4
    criterion(
        "energy audit and beam oracle",
        ok,
        f"certified={cert.holds} max defect={rep.max_defect:.2e} global excess={rep.global_excess:.2e} "
        f"beam rel err={worst:.2e}",
    )
    assert ok


FLOOR_RUNS = {
    0.3: dict(a=0.05, speed=0.03, amp=0.3),
    0.8: dict(a=0.02, speed=0.01, amp=0.1),
}


@pytest.mark.parametrize("kappa", [0.3, 0.5, 0.8])
def test_no_contact_floor(criterion, certified_default_run, kappa):
    if kappa == 0.5:
        cfg, cert, series, _ = certified_default_run
    else:
        p = FLOOR_RUNS[kappa]
        x = np.arange(64) / 64
        data = ChannelData(1 + p["a"] * np.cos(2 * np.pi * x), p["speed"] * np.sin(2 * np.pi * x), p["amp"])
        cfg = SimConfig(data, nx=64, nz=32, dt=2e-4, t_end=1.0, kappa=kappa)
        cert = certify_channel(cfg)
        series = Simulator(cfg).run()
    eta_bar0 = float(np.mean(cfg.eta0))
    grid_tol = 1.0 / cfg.nx
    mon = contact_monitor(series, kappa, eta_bar0)
    floor_ok = float(np.min(series.min_eta)) >= kappa * eta_bar0 - 2 * grid_tol
    ok = cert.holds and floor_ok and series.status.kind == "Completed"
    criterion(
        f"no-contact floor kappa={kappa}",
        ok,
        f"certified={cert.holds} min eta={np.min(series.min_eta):.5f} floor={kappa * eta_bar0:.3f} "
        f"slack={mon.min_slack:.4f} status={series.status}",
    )
    assert ok


def test_cli_determinism(criterion):
    runs = {
        "constants.txt": ["constants"],
        "table1.txt": ["table1"],
        "certify.txt": ["certify", str(DATA / "bump.txt"), "--zero-u0", "--kappa", "0.5"],
        "simulate.csv": ["simulate", str(DATA / "small.ini")],
    }
    mismatches = []
    for name, argv in runs.items():
        outs = [
            subprocess.run([sys.executable, "-m", "fsiplate.cli", *argv], capture_output=True).stdout
            for _ in range(2)
        ]
        if not (outs[0] == outs[1] == (GOLDEN / name).read_bytes()):
            mismatches.append(name)
    ok = not mismatches
    criterion("CLI determinism", ok, "byte-identical to golden files" if ok else f"mismatch: {mismatches}")
    assert ok
