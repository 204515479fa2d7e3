"""Command-line front end.

Commands: constants, certify, nondim, table1, simulate.  Exit codes:
0 success, 2 bad input, 3 certificate fails, 4 unstable run, 5 contact.
Numbers are printed as ``%.8e`` so repeated runs are byte-identical.
"""
from __future__ import annotations

import argparse
import configparser
import sys
import warnings
from pathlib import Path

import numpy as np

from . import fields, lattice, nondim
from .certificate import (
    CompatibilityWarning,
    EnergyWeights,
    InitialData,
    VelocitySample,
    certify,
    poiseuille_eta1_bound,
    poiseuille_velocity,
    read_velocity,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CERT_FAILS = 3
EXIT_UNSTABLE = 4
EXIT_CONTACT = 5


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    return f"{float(v):.8e}"


def _report(pairs) -> str:
    return "".join(f"{k}={fmt(v)}\n" for k, v in pairs)


def _kappa(text):
    k = float(text)
    if not 0.0 < k < 1.0:
        raise argparse.ArgumentTypeError(f"kappa must lie in (0, 1), got {text}")
    return k


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


# ---- commands ---------------------------------------------------------------

def cmd_constants(radius: float, kappa: float) -> str:
    s = lattice.epstein_sum(2.0, radius)
    c_s = lattice.sobolev_constant(radius)
    c_lo, c_hi = lattice.sobolev_constant_bounds(radius)
    inv_err = 0.5 * (1 / c_lo**2 - 1 / c_hi**2)
    return _report([
        ("radius", radius),
        ("lattice_sum", s.value),
        ("lattice_sum_error", s.error),
        ("lattice_identity", lattice.lattice_identity(2.0)),
        ("c_s", c_s),
        ("c_s_error", 0.5 * (c_hi - c_lo)),
        ("inv_c_s_sq", 1.0 / c_s**2),
        ("inv_c_s_sq_error", inv_err),
        ("kappa", kappa),
        ("c_kappa", lattice.certificate_constant(kappa, c_s)),
        ("curvature_threshold", lattice.curvature_threshold(kappa, c_s)),
        ("curvature_threshold_error", inv_err * (1 - kappa) ** 2),
        ("c_1d_reduced", lattice.sobolev_constant_1d(radius)),
    ])


def _load_initial(args) -> InitialData:
    eta0 = fields.read_field(args.eta0)
    if eta0.dimension != 2:
        raise InputError("eta0 must be a 2D field")
    eta1 = fields.read_field(args.eta1) if args.eta1 else _zeros_like(eta0)
    if args.zero_u0:
        u0 = VelocitySample.zeros(eta0, args.nz)
    elif args.u0:
        u0 = read_velocity(args.u0)
    else:
        ut = fields.read_field(args.u0_poiseuille)
        u0 = poiseuille_velocity(fields.PeriodicField(eta0.values / args.eps), ut, args.eps, args.nz)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CompatibilityWarning)
        return InitialData(eta0, eta1, u0)


def _zeros_like(like):
    return fields.PeriodicField(np.zeros_like(like.values))


def cmd_certify(args) -> tuple[str, int]:
    data = _load_initial(args)
    w = EnergyWeights(args.re, args.rho, args.beta)
    cert = certify(data, w, args.kappa)
    pairs = list(cert.as_dict().items())
    if args.u0_poiseuille and args.c_trace is not None:
        h0 = fields.PeriodicField(data.eta0.values / args.eps)
        ut = fields.read_field(args.u0_poiseuille)
        pairs.append(("eta1_trace_bound", poiseuille_eta1_bound(h0, ut, args.eps, args.re, args.beta, args.c_trace)))
    return _report(pairs), EXIT_OK if cert.holds else EXIT_CERT_FAILS


def cmd_nondim(path) -> str:
    p = nondim.read_params(path)
    g = nondim.nondimensionalize(p)
    pairs = list(g.as_dict().items())
    pairs += [
        ("bending", nondim.bending_coefficient(p.e_young, p.b_thick, p.nu_poisson)),
        ("indicator", nondim.smallness_indicator(g.re, g.eps, g.beta)),
        ("thin_plate", nondim.thin_plate_regime(p)),
    ]
    return _report(pairs)


def cmd_table1() -> str:
    lines = ["reference,eps,re,beta,indicator"]
    for r in nondim.table1():
        lines.append(",".join([r.reference] + [fmt(v) for v in r[1:]]))
    return "\n".join(lines) + "\n"


def load_sim_config(path):
    """Build a SimConfig from the INI-style simulate configuration."""
    from .simulator import ChannelData, SimConfig

    path = Path(path)
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise InputError(str(exc)) from exc
    known = {
        "grid": {"nx", "nz"},
        "time": {"dt", "t_end"},
        "plate": {"damping", "kappa", "contact_tol", "coupling_iters"},
        "weights": {"re", "rho", "beta"},
        "init": {"eta0_file", "eta1_file", "u0_mode"},
    }
    for sec in cp.sections():
        if sec not in known:
            raise InputError(f"unknown section [{sec}]")
        extra = set(cp[sec]) - known[sec]
        if extra:
            raise InputError(f"unknown keys in [{sec}]: {', '.join(sorted(extra))}")
    if not cp.has_option("init", "eta0_file"):
        raise InputError("[init] eta0_file is required")

    def get(sec, key, conv, default):
        if cp.has_option(sec, key):
            try:
                return conv(cp.get(sec, key))
            except ValueError as exc:
                raise InputError(f"[{sec}] {key}: {exc}") from exc
        return default

    base = path.parent
    eta0 = fields.read_field(base / cp.get("init", "eta0_file"))
    if eta0.dimension != 1:
        raise InputError("eta0_file must hold a 1D profile")
    eta1 = None
    if cp.has_option("init", "eta1_file"):
        eta1 = fields.read_field(base / cp.get("init", "eta1_file"))
    mode = cp.get("init", "u0_mode", fallback="zero").strip()
    amp = 0.0
    if mode.startswith("poiseuille:"):
        try:
            amp = float(mode.split(":", 1)[1])
        except ValueError as exc:
            raise InputError(f"bad u0_mode {mode!r}") from exc
    elif mode != "zero":
        raise InputError(f"u0_mode must be 'zero' or 'poiseuille:<amplitude>', got {mode!r}")
    weights = EnergyWeights(
        get("weights", "re", float, 1.0), get("weights", "rho", float, 1.0), get("weights", "beta", float, 1.0)
    )
    return SimConfig(
        initial=ChannelData(eta0, eta1, amp),
        nx=get("grid", "nx", int, 128),
        nz=get("grid", "nz", int, 64),
        dt=get("time", "dt", float, 1e-4),
        t_end=get("time", "t_end", float, 1.0),
        damping=get("plate", "damping", float, 0.0),
        weights=weights,
        kappa=get("plate", "kappa", float, 0.5),
        contact_tol=get("plate", "contact_tol", float, None),
        coupling_iters=get("plate", "coupling_iters", int, 2),
    )


def cmd_simulate(path) -> tuple[str, int]:
    from .simulator import run

    cfg = load_sim_config(path)
    series = run(cfg)
    code = {"Completed": EXIT_OK, "Unstable": EXIT_UNSTABLE, "ContactEvent": EXIT_CONTACT}[series.status.kind]
    return series.to_csv(), code


# ---- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fsiplate", description=__doc__.splitlines()[0])
    ap.add_argument("-o", "--output", help="write the report here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("constants", help="lattice sum, Sobolev constant and curvature threshold")
    c.add_argument("--radius", type=_positive, default=lattice.DEFAULT_RADIUS)
    c.add_argument("--kappa", type=_kappa, default=0.5)

    c = sub.add_parser("certify", help="evaluate the no-contact certificate for initial data")
    c.add_argument("eta0", help="2D height field file")
    c.add_argument("--eta1", help="2D plate speed file (default zero)")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--zero-u0", action="store_true")
    g.add_argument("--u0", help="velocity sample file")
    g.add_argument("--u0-poiseuille", metavar="UTILDE", help="2D amplitude field of a Poiseuille profile")
    c.add_argument("--eps", type=_positive, default=1.0, help="aspect ratio for --u0-poiseuille")
    c.add_argument("--nz", type=int, default=16, help="column samples for generated velocities")
    c.add_argument("--c-trace", type=_positive, default=None, help="trace constant for the eta1 bound")
    c.add_argument("--kappa", type=_kappa, default=0.5)
    c.add_argument("--re", type=_positive, default=1.0)
    c.add_argument("--rho", type=float, default=1.0)
    c.add_argument("--beta", type=_positive, default=1.0)

    c = sub.add_parser("nondim", help="dimensionless groups from a key=value parameter file")
    c.add_argument("params")

    sub.add_parser("table1", help="smallness indicator for three published devices")

    c = sub.add_parser("simulate", help="run the reduced channel solver from an INI config")
    c.add_argument("config")
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "constants":
            text, code = cmd_constants(args.radius, args.kappa), EXIT_OK
        elif args.command == "certify":
            text, code = cmd_certify(args)
        elif args.command == "nondim":
            text, code = cmd_nondim(args.params), EXIT_OK
        elif args.command == "table1":
            text, code = cmd_table1(), EXIT_OK
        else:
            text, code = cmd_simulate(args.config)
    except (InputError, ValueError, OSError) as exc:
        print(f"fsiplate: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
