"""Initial-energy evaluation and the no-contact certificate.

The certificate checks

    Re ||u0||^2 + rho ||eta1||^2 + beta ||Lap eta0||^2  <=  beta * mean(eta0)^2 / C_kappa,

with ``C_kappa = C_S^2 / (1 - kappa)^2``.  When it holds, the plate is
guaranteed to stay above ``kappa * mean(eta0)`` for all time.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import fields, lattice
from .fields import PeriodicField

DIVERGENCE_TOL = 1e-8
COMPATIBILITY_TOL = 1e-6


class CompatibilityWarning(UserWarning):
    """The top trace of u0 does not match eta1 (kinematic coupling)."""


@dataclass
class VelocitySample:
    """Three velocity components on the column grid of the subgraph of ``eta0``.

    ``values[c, l, i, j]`` is component ``c`` at horizontal node ``(i, j)`` and
    height ``z = (l / nz) * eta0[i, j]``, ``l = 0..nz``.
    """

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 4 or self.values.shape[0] != 3:
            raise ValueError("velocity samples must have shape (3, nz+1, N, N)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("velocity samples must be finite")

    @property
    def nz(self) -> int:
        return self.values.shape[1] - 1

    @classmethod
    def zeros(cls, eta0: PeriodicField, nz: int = 16):
        n = eta0.resolution
        return cls(np.zeros((3, nz + 1, n, n)))

    @classmethod
    def from_function(cls, func, eta0: PeriodicField, nz: int):
        """Sample ``func(x1, x2, z) -> (u1, u2, u3)`` on the column grid."""
        n = eta0.resolution
        x = fields.grid_nodes(n)
        x1, x2 = np.meshgrid(x, x, indexing="ij")
        zeta = np.linspace(0.0, 1.0, nz + 1)[:, None, None]
        z = zeta * eta0.values[None]
        comps = func(x1[None], x2[None], z)
        return cls(np.stack([np.broadcast_to(c, z.shape) for c in comps]))


def column_quadrature(integrand: np.ndarray, height: np.ndarray) -> np.ndarray:
    """Trapezoid rule in z over (0, height) for samples on ``nz+1`` equispaced levels."""
    nz = integrand.shape[0] - 1
    w = np.full(nz + 1, 1.0 / nz)
    w[[0, -1]] *= 0.5
    return height * np.tensordot(w, integrand, axes=(0, 0))


def subgraph_l2_sq(u: VelocitySample, eta0: PeriodicField) -> float:
    """||u||^2 over {0 < z < eta0(x)}: column trapezoid, then torus average."""
    sq = np.sum(u.values**2, axis=0)
    return float(np.mean(column_quadrature(sq, eta0.values)))


def subgraph_divergence_l2(u: VelocitySample, eta0: PeriodicField) -> float:
    """L^2(Omega) norm of div u, differentiating in the column coordinate zeta = z/eta0."""
    eta = eta0.values
    nz = u.nz
    zeta = np.linspace(0.0, 1.0, nz + 1)[:, None, None]
    dzeta = [np.gradient(u.values[c], 1.0 / nz, axis=0, edge_order=2) for c in range(3)]
    deta = [g.values for g in fields.gradient(eta0)]
    div = dzeta[2] / eta
    for c in (0, 1):
        # d/dx_c at fixed z = d/dx_c at fixed zeta - zeta * d_c eta / eta * d/dzeta
        dx = _spectral_derivative(u.values[c], axis=c + 1)
        div = div + dx - zeta * deta[c] / eta * dzeta[c]
    return math.sqrt(max(float(np.mean(column_quadrature(div**2, eta))), 0.0))


def _spectral_derivative(a, axis):
    n = a.shape[axis]
    k = np.fft.fftfreq(n, d=1.0 / n)
    k[n // 2] = 0.0
    shape = [1] * a.ndim
    shape[axis] = n
    sym = (2j * np.pi * k).reshape(shape)
    return np.real(np.fft.ifft(np.fft.fft(a, axis=axis) * sym, axis=axis))


@dataclass
class InitialData:
    """Initial triple (u0, eta0, eta1) on T^2, dimensionless."""

    eta0: PeriodicField
    eta1: PeriodicField
    u0: VelocitySample

    def __post_init__(self):
        self.validate()

    @classmethod
    def at_rest(cls, eta0: PeriodicField, nz: int = 16):
        """Zero velocity and zero plate speed over the given height profile."""
        zero = PeriodicField(np.zeros_like(eta0.values))
        return cls(eta0, zero, VelocitySample.zeros(eta0, nz))

    def validate(self):
        for name in ("eta0", "eta1"):
            f = getattr(self, name)
            if f.dimension != 2:
                raise ValueError(f"{name} must be a 2D field")
        if self.eta1.resolution != self.eta0.resolution:
            raise ValueError("eta0 and eta1 must share a resolution")
        if self.u0.values.shape[2:] != self.eta0.values.shape:
            raise ValueError("u0 horizontal grid does not match eta0")
        if np.any(self.eta0.values <= 0):
            raise ValueError("eta0 must be positive at every node")
        if fields.mean(self.eta0) <= 0:
            raise ValueError("mean(eta0) must be positive")
        if np.any(self.u0.values):
            div = subgraph_divergence_l2(self.u0, self.eta0)
            if div > DIVERGENCE_TOL:
                raise ValueError(f"u0 is not divergence free: ||div u0|| = {div:.3e}")
        mismatch = np.max(np.abs(self.u0.values[2, -1] - self.eta1.values))
        if mismatch > COMPATIBILITY_TOL:
            warnings.warn(
                f"u0 . e3 at the plate differs from eta1 by {mismatch:.3e}",
                CompatibilityWarning,
                stacklevel=3,
            )

    def scaled(self, lam: float) -> "InitialData":
        """u0 -> lam u0, eta1 -> lam eta1, eta0 -> mean + lam (eta0 - mean)."""
        m = fields.mean(self.eta0)
        eta0 = PeriodicField(m + lam * (self.eta0.values - m))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CompatibilityWarning)
            return InitialData(eta0, lam * self.eta1, VelocitySample(lam * self.u0.values))


@dataclass(frozen=True)
class EnergyWeights:
    """Weights (Re, rho, beta) of the three energy terms; (1, 1, 1) is unscaled."""

    re: float = 1.0
    rho: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        vals = (self.re, self.rho, self.beta)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("energy weights must be finite")
        if self.re <= 0 or self.beta <= 0 or self.rho < 0:
            raise ValueError("need re > 0, beta > 0, rho >= 0")


@dataclass(frozen=True)
class Certificate:
    e0: float
    eta_bar0: float
    kappa: float
    c_kappa: float
    margin: float
    holds: bool
    floor: float

    def as_dict(self) -> dict:
        return {
            "e0": self.e0,
            "eta_bar0": self.eta_bar0,
            "kappa": self.kappa,
            "c_kappa": self.c_kappa,
            "margin": self.margin,
            "holds": self.holds,
            "floor": self.floor,
        }


@dataclass(frozen=True)
class ReducedVerdict:
    """Outcome of the curvature-only test ``||Lap h0||^2 <= (1-kappa)^2 / C_S^2``."""

    holds: bool
    curvature: float
    threshold: float
    slack: float
    indicator: float
    applicable: bool
    kappa: float


def energy_terms(data: InitialData) -> tuple[float, float, float]:
    """Unweighted (||u0||^2, ||eta1||^2, ||Lap eta0||^2)."""
    return (
        subgraph_l2_sq(data.u0, data.eta0),
        fields.l2_norm(data.eta1) ** 2,
        fields.l2_norm(fields.laplacian(data.eta0)) ** 2,
    )


def initial_energy(data: InitialData, w: EnergyWeights = EnergyWeights()) -> float:
    ku, k1, k0 = energy_terms(data)
    return 0.5 * (w.re * ku + w.rho * k1 + w.beta * k0)


def certify(
    data: InitialData,
    w: EnergyWeights = EnergyWeights(),
    kappa: float = 0.5,
    c_s: float | None = None,
) -> Certificate:
    """Evaluate ``2 E(0) / beta <= mean(eta0)^2 / C_kappa`` (non-strict)."""
    if c_s is None:
        c_s = lattice.converged_sobolev_constant()
    c_kappa = lattice.certificate_constant(kappa, c_s)
    eta_bar0 = fields.mean(data.eta0)
    if eta_bar0 <= 0:
        raise ValueError("mean height must be positive")
    e0 = initial_energy(data, w) / w.beta
    margin = eta_bar0**2 / c_kappa - 2.0 * e0
    return Certificate(
        e0=e0,
        eta_bar0=eta_bar0,
        kappa=kappa,
        c_kappa=c_kappa,
        margin=margin,
        holds=bool(margin >= 0.0),
        floor=kappa * eta_bar0,
    )


def _positive_field(f, name):
    if np.any(f.values <= 0):
        raise ValueError(f"{name} must be positive")


def poiseuille_energy(h0: PeriodicField, u_tilde0: PeriodicField, eps: float) -> float:
    """Exact ||z (z - eps h0) u~0||^2 over the subgraph of eps*h0.

    Uses int_0^h z^2 (z - h)^2 dz = h^5 / 30.
    """
    _positive_field(h0, "h0")
    if eps <= 0:
        raise ValueError("eps must be positive")
    return eps**5 / 30.0 * float(np.mean(h0.values**5 * u_tilde0.values**2))


def poiseuille_velocity(h0: PeriodicField, u_tilde0: PeriodicField, eps: float, nz: int) -> VelocitySample:
    """Samples of the profile ``(z (z - eps h0) u~0, 0, 0)`` on the column grid of eps*h0."""
    eta0 = PeriodicField(eps * h0.values)
    ut = u_tilde0.values
    return VelocitySample.from_function(
        lambda x1, x2, z: (z * (z - eta0.values) * ut, 0.0, 0.0), eta0, nz
    )


def poiseuille_eta1_bound(
    h0: PeriodicField,
    u_tilde0: PeriodicField,
    eps: float,
    re: float,
    beta: float,
    c: float = 1.0,
) -> float:
    """Trace-type bound for (rho/beta) ||eta1||^2 under near-Poiseuille data.

    ``c`` is the unspecified structural constant; it depends on h0 and is
    left to the caller.
    """
    _positive_field(h0, "h0")
    for name, v in (("eps", eps), ("re", re), ("beta", beta), ("c", c)):
        if not v > 0:
            raise ValueError(f"{name} must be positive")
    h = h0.values
    ut = u_tilde0.values
    grad_u = [g.values for g in fields.gradient(u_tilde0)]
    grad_h = [g.values for g in fields.gradient(h0)]
    total = (
        np.mean(h**5 * ut**2)
        + np.mean(h**3 * ut**2)
        + np.mean(h**5 * sum(g**2 for g in grad_u))
        + np.mean(sum(g**2 for g in grad_h) * ut**2)
    )
    return c * re * eps**5 / beta * float(total)


def certify_reduced(
    h0: PeriodicField,
    kappa: float,
    indicator: float = 0.0,
    c_s: float | None = None,
) -> ReducedVerdict:
    """Curvature-only certificate for a normalised height profile (mean(h0) = 1).

    ``indicator`` is the velocity-term weight Re eps^5 / beta; the reduced
    form is flagged applicable only when it is below 1% of the threshold.
    """
    if abs(fields.mean(h0) - 1.0) > 1e-10:
        raise ValueError("h0 must be normalised to mean 1")
    if indicator < 0:
        raise ValueError("indicator must be nonnegative")
    threshold = lattice.curvature_threshold(kappa, c_s)
    curv = fields.l2_norm(fields.laplacian(h0)) ** 2
    slack = threshold - curv
    return ReducedVerdict(
        holds=bool(slack >= 0.0),
        curvature=curv,
        threshold=threshold,
        slack=slack,
        indicator=indicator,
        applicable=bool(indicator <= 0.01 * threshold),
        kappa=kappa,
    )


def read_velocity(path) -> VelocitySample:
    """Read header ``velocity N nz`` followed by 3 (nz+1) N^2 values in C order."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[0] != "velocity":
            raise ValueError(f"{path}: expected header 'velocity N nz'")
        n, nz = int(header[1]), int(header[2])
        data = np.array(fh.read().split(), dtype=np.float64)
    expected = 3 * (nz + 1) * n * n
    if data.size != expected:
        raise ValueError(f"{path}: expected {expected} values, found {data.size}")
    return VelocitySample(data.reshape(3, nz + 1, n, n))


def write_velocity(path, u: VelocitySample) -> None:
    _, nzp, n, _ = u.values.shape
    with open(path, "w") as fh:
        fh.write(f"velocity {n} {nzp - 1}\n")
        for row in u.values.reshape(-1, n):
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
