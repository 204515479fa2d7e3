"""Dimensional analysis for a plate-covered microchannel.

Scales: length L, velocity U, time L/U, pressure mu U / L.  All inputs are SI.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields as dc_fields
from typing import NamedTuple

PARAM_KEYS = (
    "rho_f",
    "mu",
    "u_scale",
    "l_scale",
    "h_height",
    "b_thick",
    "e_young",
    "nu_poisson",
    "rho_s",
)


@dataclass(frozen=True)
class PhysicalParams:
    rho_f: float  # fluid density, kg/m^3
    mu: float  # dynamic viscosity, Pa s
    u_scale: float  # m/s
    l_scale: float  # lateral period, m
    h_height: float  # channel height, m
    b_thick: float  # plate thickness, m
    e_young: float  # Pa
    nu_poisson: float
    rho_s: float  # plate density, kg/m^3

    def __post_init__(self):
        for f in dc_fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ValueError(f"{f.name} must be finite")
            if f.name != "nu_poisson" and v <= 0:
                raise ValueError(f"{f.name} must be positive, got {v}")
        _check_poisson(self.nu_poisson)
        if self.b_thick >= self.l_scale:
            warnings.warn("plate thickness is not small compared with L", stacklevel=3)


@dataclass(frozen=True)
class DimensionlessGroups:
    re: float
    beta: float
    rho: float
    eps: float
    t_scale: float
    p_scale: float

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dc_fields(self)}


class Table1Row(NamedTuple):
    reference: str
    eps: float
    re: float
    beta: float
    indicator: float


# (reference key, eps, Re, beta values) for three published microchannels
_TABLE1 = (
    ("CJFY", 6.9e-3, 1.0, (15.0, 760.0)),
    ("TBM", 5e-3, 1.0, (15.0,)),
    ("HoMa04", 1.67e-1, 0.4, (3.2,)),
)


def _check_poisson(nu):
    # nu = 0.5 (incompressible plate material) is admissible; +-1 is singular
    if not (-1.0 < nu <= 0.5):
        raise ValueError(f"Poisson ratio must lie in (-1, 0.5], got {nu}")


def bending_coefficient(e_young: float, b_thick: float, nu_poisson: float) -> float:
    """Flexural rigidity B = E b^3 / (12 (1 - nu^2)), in Pa m^3."""
    if e_young <= 0 or b_thick <= 0:
        raise ValueError("Young's modulus and thickness must be positive")
    _check_poisson(nu_poisson)
    return e_young * b_thick**3 / (12.0 * (1.0 - nu_poisson**2))


def nondimensionalize(p: PhysicalParams) -> DimensionlessGroups:
    b = bending_coefficient(p.e_young, p.b_thick, p.nu_poisson)
    return DimensionlessGroups(
        re=p.rho_f * p.u_scale * p.l_scale / p.mu,
        beta=b / (p.mu * p.u_scale * p.l_scale**2),
        rho=p.rho_s * p.b_thick * p.u_scale / p.mu,
        eps=p.h_height / p.l_scale,
        t_scale=p.l_scale / p.u_scale,
        p_scale=p.mu * p.u_scale / p.l_scale,
    )


def recover_dimensional(g: DimensionlessGroups, mu: float, l_scale: float) -> dict:
    """Invert the scalings given mu and L.

    Returns U, rho_f, H, the rigidity B and the areal plate density rho_s * b.
    """
    u = l_scale / g.t_scale
    return {
        "u_scale": u,
        "rho_f": g.re * mu / (u * l_scale),
        "h_height": g.eps * l_scale,
        "bending": g.beta * mu * u * l_scale**2,
        "areal_density": g.rho * mu / u,
        "p_scale_check": mu * u / l_scale,
    }


def thin_plate_regime(p: PhysicalParams) -> bool:
    """True when the plate-inertia group satisfies rho <= Re * eps.

    Since rho / Re = (rho_s / rho_f) (b / L), this is rho_s b <= rho_f H.
    """
    g = nondimensionalize(p)
    return g.rho <= g.re * g.eps


def smallness_indicator(re: float, eps: float, beta: float) -> float:
    """Re eps^5 / beta, the weight of the velocity terms in the certificate."""
    return re * eps**5 / beta


def table1() -> list[Table1Row]:
    rows = []
    for ref, eps, re, betas in _TABLE1:
        for beta in betas:
            rows.append(Table1Row(ref, eps, re, beta, smallness_indicator(re, eps, beta)))
    return rows


def parse_params(text: str) -> PhysicalParams:
    """Parse ``key=value`` lines (``#`` comments allowed) into PhysicalParams."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in PARAM_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        values[key] = float(val)
    missing = [k for k in PARAM_KEYS if k not in values]
    if missing:
        raise ValueError(f"missing keys: {', '.join(missing)}")
    return PhysicalParams(**values)


def read_params(path) -> PhysicalParams:
    with open(path) as fh:
        return parse_params(fh.read())
