"""Reduced (x, z) fluid-plate solver on T^1 x (0, eta(x, t)).

Dimensionless system, weights (Re, rho, beta) and plate damping nu:

    Re (u_t + u.grad u) - Lap u + grad p = 0,   div u = 0       in the channel
    rho eta_tt - nu eta_xxt + beta eta_xxxx = g                 on T^1
    u = 0 at z = 0,   u = (0, eta_t) at z = eta

with g the vertical traction of (-p I + grad u) on the plate.  One step of
the implicit midpoint rule:

1. explicit advection from the current state, mesh-motion terms included;
2. a viscous predictor for the midpoint velocity at the extrapolated
   geometry, solved once per step;
3. a monolithic pressure/plate solve: the midpoint projection and the
   midpoint plate equation are coupled through the top-cell pressure, and
   the new plate speed is read back from the column volume balance, so
   mean(eta) is conserved to roundoff.  This is repeated ``coupling_iters``
   times to refresh the geometry the constraint uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .. import lattice
from ..certificate import Certificate, EnergyWeights
from ..fields import PeriodicField
from ._grid import ColumnGrid
from ._linalg import LaggedFactor, SolverFailure

BLOWUP = 1e8
# runs are declared unstable beyond four times the advertised advective bound
CFL_HARD = 1.0


@dataclass
class ChannelData:
    """Initial data of the reduced problem, all functions of x in T^1.

    ``poiseuille_amplitude`` A seeds the horizontal profile A z (z - eta0),
    which is then projected onto discretely incompressible fields together
    with the plate speed ``eta1``.
    """

    eta0: np.ndarray
    eta1: Optional[np.ndarray] = None
    poiseuille_amplitude: float = 0.0

    def __post_init__(self):
        if isinstance(self.eta0, PeriodicField):
            self.eta0 = self.eta0.values
        self.eta0 = np.array(self.eta0, dtype=np.float64)
        if self.eta0.ndim != 1:
            raise ValueError("channel data are 1D profiles")
        if self.eta1 is None:
            self.eta1 = np.zeros_like(self.eta0)
        if isinstance(self.eta1, PeriodicField):
            self.eta1 = self.eta1.values
        self.eta1 = np.array(self.eta1, dtype=np.float64)
        if self.eta1.shape != self.eta0.shape:
            raise ValueError("eta0 and eta1 must share a grid")
        if np.any(self.eta0 <= 0):
            raise ValueError("eta0 must be positive")
        if abs(np.mean(self.eta1)) > 1e-12 * max(1.0, np.max(np.abs(self.eta1))):
            raise ValueError("eta1 must have zero mean (the fluid is incompressible)")


@dataclass
class SimConfig:
    initial: ChannelData
    nx: int = 128
    nz: int = 64
    dt: float = 1e-4
    t_end: float = 1.0
    damping: float = 0.0
    weights: EnergyWeights = field(default_factory=EnergyWeights)
    kappa: float = 0.5
    contact_tol: Optional[float] = None
    coupling_iters: int = 2
    fluid: bool = True
    refresh_after: int = 6

    def __post_init__(self):
        for name in ("nx", "nz"):
            n = getattr(self, name)
            if n < 4 or n & (n - 1):
                raise ValueError(f"{name} must be a power of two >= 4")
        if self.dt <= 0 or self.t_end < 0:
            raise ValueError("need dt > 0 and t_end >= 0")
        if self.damping < 0:
            raise ValueError("damping must be nonnegative")
        if self.weights.rho <= 0:
            raise ValueError("the simulator needs plate inertia rho > 0")
        if not 0 < self.kappa < 1:
            raise ValueError("kappa must lie in (0, 1)")
        if self.coupling_iters < 1:
            raise ValueError("coupling_iters must be positive")
        eta0 = self.eta0
        if eta0.size != self.nx:
            eta0 = _resample_profile(eta0, self.nx)
            self.initial = ChannelData(eta0, _resample_profile(self.initial.eta1, self.nx),
                                       self.initial.poiseuille_amplitude)
        if self.contact_tol is None:
            self.contact_tol = 1e-3 * float(np.mean(self.initial.eta0))
        if not 0 < self.contact_tol < self.kappa * float(np.mean(self.initial.eta0)):
            raise ValueError("contact_tol must lie in (0, kappa * mean(eta0))")

    @property
    def eta0(self):
        return self.initial.eta0

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def cfl_limit(self, umax: float) -> float:
        """Advertised explicit-advection bound 0.25 dx / |u|_inf (inf when at rest)."""
        return math.inf if umax == 0 else 0.25 / (self.nx * umax)


def _resample_profile(f, n):
    f = np.asarray(f, dtype=np.float64)
    if f.size == n:
        return f
    if f.size > n:
        raise ValueError("initial profiles may be refined, not coarsened")
    spec = np.fft.rfft(f) / f.size
    m = f.size
    big = np.zeros(n // 2 + 1, dtype=complex)
    big[: m // 2 + 1] = spec
    big[m // 2] *= 0.5 if m % 2 == 0 else 1.0
    return np.fft.irfft(big * n, n)


@dataclass
class SimState:
    time: float
    eta: np.ndarray
    eta_t: np.ndarray
    u: np.ndarray  # (nz, nx) horizontal velocity on vertical faces
    w: np.ndarray  # (nz-1, nx) vertical velocity on interior horizontal faces
    p: np.ndarray  # (nz, nx) pressure at cell centres
    divergence: float = 0.0
    krylov_its: int = 0

    def velocity(self) -> np.ndarray:
        return np.concatenate([self.u.ravel(), self.w.ravel()])

    def copy(self) -> "SimState":
        return replace(self, eta=self.eta.copy(), eta_t=self.eta_t.copy(), u=self.u.copy(),
                       w=self.w.copy(), p=self.p.copy())


@dataclass(frozen=True)
class Status:
    kind: str  # "Completed" | "ContactEvent" | "Unstable"
    time: Optional[float] = None
    reason: str = ""

    def __str__(self):
        return self.kind if self.time is None else f"{self.kind}@{self.time:.8e}"


class ContactEvent(Exception):
    def __init__(self, time, min_eta):
        super().__init__(f"plate reached contact tolerance at t={time:.6g} (min eta {min_eta:.3e})")
        self.time = time
        self.min_eta = min_eta


class Unstable(Exception):
    def __init__(self, time, reason):
        super().__init__(f"unstable at t={time:.6g}: {reason}")
        self.time = time
        self.reason = reason


class TimeSeries:
    """Per-step diagnostics; row 0 is the initial state."""

    COLUMNS = ("t", "E", "D", "mean_eta", "min_eta", "max_eta")

    def __init__(self, dt: float):
        self.dt = dt
        self._rows: list[tuple] = []
        self.divergence: list[float] = []
        self.status = Status("Completed")

    def record(self, t, e, d, eta, divergence=0.0):
        self._rows.append((t, e, d, float(np.mean(eta)), float(np.min(eta)), float(np.max(eta))))
        self.divergence.append(divergence)

    def __len__(self):
        return len(self._rows)

    def column(self, name) -> np.ndarray:
        idx = self.COLUMNS.index(name)
        return np.array([r[idx] for r in self._rows])

    def __getattr__(self, name):
        if name in TimeSeries.COLUMNS:
            return self.column(name)
        raise AttributeError(name)

    def rows(self):
        return list(self._rows)

    def to_csv(self) -> str:
        lines = [",".join(self.COLUMNS)]
        for row in self._rows:
            lines.append(",".join(f"{v:.8e}" for v in row))
        lines.append(f"# status={self.status}")
        return "\n".join(lines) + "\n"


class Simulator:
    """Implicit-midpoint stepper.

    Unknowns of a step are the midpoint velocity v~ = (v^n + v^{n+1}) / 2 and
    plate speed eta_t~; the pressure is the multiplier at the midpoint.  All
    exchange terms (pressure and viscous traction against plate speed) are
    paired at the same time level, so the coupled update inherits the
    energy identity of the midpoint rule up to the explicit advection and the
    geometry lag.
    """

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.grid = g = ColumnGrid(cfg.nx, cfg.nz)
        w = cfg.weights
        lam = (2 * np.pi * g.k) ** 2
        dt = cfg.dt
        # midpoint plate operator: 2 rho/dt + beta dt/2 lam^2 + nu lam
        self._plate_lhs = 2 * w.rho / dt + 0.5 * w.beta * dt * lam**2 + cfg.damping * lam
        self._plate_vel = 2 * w.rho / dt
        self._plate_pos = -w.beta * lam**2
        self._c = 0.5 * dt / w.re
        self._inertia = 2 * w.re / dt
        col = np.real(np.fft.ifft(1.0 / self._plate_lhs))
        idx = (np.arange(g.nx)[:, None] - np.arange(g.nx)[None, :]) % g.nx
        self._plate_inv_dense = col[idx]
        self._top = g.top_rows()
        self._pressure = LaggedFactor(self._assemble_pressure, cfg.refresh_after)
        self._visc_u = LaggedFactor(self._assemble_visc_u, cfg.refresh_after)
        self._visc_w = LaggedFactor(self._assemble_visc_w, cfg.refresh_after)
        # absolute PCG floors: divergence residual and momentum residual scales
        self._p_atol = 1e-11 * math.sqrt(g.dx * g.dz)
        self._v_rtol = 1e-10
        self._history = None

    # ---- plate ------------------------------------------------------------
    def plate_inv(self, f):
        return np.real(np.fft.ifft(np.fft.fft(f) / self._plate_lhs))

    def plate_rhs(self, eta, eta_t):
        """Midpoint right-hand side without the traction."""
        return self._plate_vel * eta_t + np.real(np.fft.ifft(self._plate_pos * np.fft.fft(eta)))

    # ---- assembled operators for preconditioning --------------------------
    def _assemble_pressure(self, geo):
        g = self.grid
        d = geo.div_matrix()
        lap = d @ sp.diags(1.0 / geo.mass) @ d.T
        top = self._top
        blk = sp.csr_matrix(
            (g.dx * self._plate_inv_dense.ravel(), (np.repeat(top, g.nx), np.tile(top, g.nx))),
            shape=(g.n_p, g.n_p),
        )
        return self._c * lap + blk

    def _assemble_visc_u(self, geo):
        return sp.diags(self._inertia * geo.mass[: self.grid.n_u]) + geo.vis_u.matrix()

    def _assemble_visc_w(self, geo):
        return sp.diags(self._inertia * geo.mass[self.grid.n_u:]) + geo.vis_w.matrix()

    def _apply_pressure(self, geo, p):
        g = self.grid
        out = self._c * geo.div(geo.div_t(p) / geo.mass)
        out[self._top] += g.dx * self.plate_inv(p[self._top])
        return out

    # ---- diagnostics ------------------------------------------------------
    def energy(self, s: SimState, geo=None) -> float:
        w = self.cfg.weights
        plate = 0.5 * w.rho * float(np.mean(s.eta_t**2))
        bending = 0.5 * w.beta * float(np.mean(self.grid.dxx(s.eta) ** 2))
        if not self.cfg.fluid:
            return plate + bending
        geo = geo or self.grid.geometry(s.eta)
        v = s.velocity()
        return 0.5 * w.re * float(v @ (geo.mass * v)) + plate + bending

    def dissipation(self, s: SimState, geo=None) -> float:
        """Re^{-1}-normalized viscous dissipation |grad u|^2 plus nu |d_x eta_t|^2."""
        g = self.grid
        d = self.cfg.damping * float(np.mean(g.dx_spec(s.eta_t) ** 2))
        if self.cfg.fluid:
            geo = geo or g.geometry(s.eta)
            z = np.zeros(g.nx)
            d += geo.vis_u.dissipation(np.concatenate([z, s.u.ravel(), z]))
            d += geo.vis_w.dissipation(np.concatenate([z, s.w.ravel(), s.eta_t]))
        return d

    def _residual(self, geo, v, eta_t):
        d = geo.div(v)
        d[self._top] += self.grid.dx * eta_t
        return d

    def divergence_norm(self, s: SimState, geo=None) -> float:
        """L^2 norm of the discrete divergence, plate flux included."""
        g = self.grid
        geo = geo or g.geometry(s.eta)
        d = self._residual(geo, s.velocity(), s.eta_t)
        vol = np.tile(geo.eta, g.nz) * g.dx * g.dz
        return float(np.sqrt(np.sum(d**2 / vol)))

    # ---- initial state ----------------------------------------------------
    def initial_state(self) -> SimState:
        cfg, g = self.cfg, self.grid
        eta = cfg.eta0.copy()
        eta_t = cfg.initial.eta1.copy()
        u = np.zeros((g.nz, g.nx))
        w = np.zeros((g.nz - 1, g.nx))
        s = SimState(0.0, eta, eta_t, u, w, np.zeros((g.nz, g.nx)))
        self._history = None
        if not cfg.fluid:
            return s
        amp = cfg.initial.poiseuille_amplitude
        if amp:
            ef = 0.5 * (eta + np.roll(eta, -1))
            z = g.zeta_c[:, None] * ef[None, :]
            u = amp * z * (z - ef[None, :])
        if amp or np.any(eta_t):
            u, w = self._project_initial(eta, eta_t, u, w)
        s.u, s.w = u, w
        s.divergence = self.divergence_norm(s)
        return s

    def _project_initial(self, eta, eta_t, u, w):
        g = self.grid
        geo = g.geometry(eta)
        v = np.concatenate([u.ravel(), w.ravel()])
        rhs = self._residual(geo, v, eta_t)
        d = geo.div_matrix()
        lap = (d @ sp.diags(1.0 / geo.mass) @ d.T).tolil()
        # pure Neumann problem: pin one pressure value
        lap[0, :] = 0.0
        lap[:, 0] = 0.0
        lap[0, 0] = 1.0
        rhs[0] = 0.0
        phi = spla.spsolve(lap.tocsc(), -rhs)
        v = v + geo.div_t(phi) / geo.mass
        uu, ww = g.split(v)
        return uu.copy(), ww.copy()

    # ---- time step --------------------------------------------------------
    def advection(self, s: SimState):
        """Explicit (u.grad) acceleration at the u and w nodes, mesh motion included."""
        g = self.grid
        nz = g.nz
        u, eta, eta_t = s.u, s.eta, s.eta_t
        ef = 0.5 * (eta + np.roll(eta, -1))
        w_full = np.vstack([np.zeros(g.nx), s.w, eta_t])
        u_ext = np.vstack([-u[:1], u, -u[-1:]])

        # u nodes (x_{i+1/2}, zeta_j)
        wbar = 0.25 * (w_full[:-1] + w_full[1:])
        wbar = wbar + np.roll(wbar, -1, axis=1)
        etax_f = (np.roll(eta, -1) - eta) / g.dx
        etat_f = 0.5 * (eta_t + np.roll(eta_t, -1))
        zc = g.zeta_c[:, None]
        om_u = (wbar - zc * (etax_f * u + etat_f)) / ef
        nu_ = u * (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2 * g.dx)
        nu_ += om_u * (u_ext[2:] - u_ext[:-2]) / (2 * g.dz)

        # w nodes (x_i, zeta_f), f = 1..nz-1
        ubar = 0.25 * (u[:-1] + u[1:])
        ubar = ubar + np.roll(ubar, 1, axis=1)
        etax_c = (ef - np.roll(ef, 1)) / g.dx
        zf = g.zeta_f[1:nz, None]
        w = s.w
        om_w = (w - zf * (etax_c * ubar + eta_t)) / eta
        nw = ubar * (np.roll(w, -1, axis=1) - np.roll(w, 1, axis=1)) / (2 * g.dx)
        nw += om_w * (w_full[2:] - w_full[:-2]) / (2 * g.dz)
        return nu_.ravel(), nw.ravel()

    def step(self, s: SimState) -> SimState:
        cfg, g = self.cfg, self.grid
        dt = cfg.dt
        if not cfg.fluid:
            return self._step_plate_only(s)
        re = cfg.weights.re
        zero = np.zeros(g.nx)
        top = self._top
        adv_u, adv_w = self.advection(s)
        u_n, w_n = s.u.ravel(), s.w.ravel()
        v_n = np.concatenate([u_n, w_n])
        r_base = self.plate_rhs(s.eta, s.eta_t)
        # second-order extrapolation of the midpoint unknowns from the last step
        hist = self._history
        if hist is not None and abs(hist[0] - s.time) < 0.5 * dt:
            _, p_old, v_old, tau_old = hist
            p = 2.0 * s.p.ravel() - p_old
            v_guess = 1.5 * v_n - 0.5 * v_old
            tau = 1.5 * s.eta_t - 0.5 * tau_old
        else:
            p = s.p.ravel().copy()
            v_guess = v_n
            tau = s.eta_t.copy()
        eta_next = s.eta + dt * tau
        if np.any(eta_next <= 0):
            raise ContactEvent(s.time + dt, float(np.min(eta_next)))
        its = 0

        # (ii) viscous predictor at the extrapolated geometry, incremental in p
        geo = g.geometry(eta_next)
        m_u, m_w = geo.mass[: g.n_u], geo.mass[g.n_u:]
        gp = geo.div_t(p)
        rhs_u = m_u * (self._inertia * u_n - re * adv_u) + gp[: g.n_u]
        u_t, k = self._visc_u.solve(
            lambda x: self._inertia * m_u * x + geo.vis_u.apply_interior(x), rhs_u, (geo,),
            x0=v_guess[: g.n_u], rtol=self._v_rtol,
        )
        its += k
        rhs_w = m_w * (self._inertia * w_n - re * adv_w) + gp[g.n_u:]
        rhs_w -= geo.vis_w.boundary_load(zero, tau)
        w_t, k = self._visc_w.solve(
            lambda x: self._inertia * m_w * x + geo.vis_w.apply_interior(x), rhs_w, (geo,),
            x0=v_guess[g.n_u:], rtol=self._v_rtol,
        )
        its += k
        g_visc = geo.vis_w.top_traction(np.concatenate([zero, w_t, tau]))
        v_mid = np.concatenate([u_t, w_t])

        # (iii)-(iv) pressure/plate exchange, re-solved on the updated geometry
        for sub in range(cfg.coupling_iters):
            if sub:
                geo = g.geometry(eta_next)
            e_n = self._residual(geo, v_n, s.eta_t)
            rhs = 0.5 * e_n - geo.div(v_mid)
            rhs[top] -= g.dx * self.plate_inv(r_base + g_visc + p[top])
            dp, k = self._pressure.solve(
                lambda x: self._apply_pressure(geo, x), rhs, (geo,), rtol=0.0, atol=self._p_atol
            )
            its += k
            p = p + dp
            v_mid = v_mid + self._c * geo.div_t(dp) / geo.mass
            v_new = 2 * v_mid - v_n
            eta_t_new = geo.column_speed(v_new)
            tau = 0.5 * (s.eta_t + eta_t_new)
            eta_next = s.eta + dt * tau
            if np.any(eta_next <= 0):
                raise ContactEvent(s.time + dt, float(np.min(eta_next)))

        if np.any(eta_next <= 0):
            raise ContactEvent(s.time + dt, float(np.min(eta_next)))
        self._history = (s.time + dt, s.p.ravel().copy(), v_n, s.eta_t.copy())
        u, w = g.split(v_new)
        new = SimState(s.time + dt, eta_next, eta_t_new, u.copy(), w.copy(), p.reshape(g.nz, g.nx))
        new.krylov_its = its
        d = self._residual(geo, v_new, eta_t_new)
        vol = np.tile(geo.eta, g.nz) * g.dx * g.dz
        new.divergence = float(np.sqrt(np.sum(d**2 / vol)))
        return new

    def _step_plate_only(self, s: SimState) -> SimState:
        dt = self.cfg.dt
        mid = self.plate_inv(self.plate_rhs(s.eta, s.eta_t))
        # keep the mean exact: the k = 0 mode of the midpoint solve is eta_t itself
        eta_t = 2 * mid - s.eta_t
        eta = s.eta + dt * mid
        return SimState(s.time + dt, eta, eta_t, s.u, s.w, s.p)

    def cfl_number(self, s: SimState) -> float:
        """dt max(|u| / dx, |w| / dz_phys); the advertised bound is 0.25."""
        g = self.grid
        if not self.cfg.fluid:
            return 0.0
        wmax = max(float(np.max(np.abs(s.w), initial=0.0)), float(np.max(np.abs(s.eta_t))))
        umax = float(np.max(np.abs(s.u), initial=0.0))
        return self.cfg.dt * max(umax / g.dx, wmax / (g.dz * float(np.min(s.eta))))

    # ---- driver -----------------------------------------------------------
    def _check(self, s: SimState):
        for name in ("eta", "eta_t", "u", "w", "p"):
            a = getattr(s, name)
            if not np.all(np.isfinite(a)):
                raise Unstable(s.time, f"non-finite {name}")
            if np.max(np.abs(a)) > BLOWUP:
                raise Unstable(s.time, f"{name} exceeded {BLOWUP:g}")
        m = float(np.min(s.eta))
        cfl = self.cfl_number(s)
        if cfl > CFL_HARD:
            raise Unstable(s.time, f"advective CFL number {cfl:.3g} exceeds {CFL_HARD:g}")
        if m <= self.cfg.contact_tol:
            raise ContactEvent(s.time, m)

    def run(self, callback=None) -> TimeSeries:
        cfg = self.cfg
        series = TimeSeries(cfg.dt)
        s = self.initial_state()
        series.record(s.time, self.energy(s), self.dissipation(s), s.eta, s.divergence)
        n = cfg.n_steps
        for k in range(1, n + 1):
            try:
                s = self.step(s)
                s.time = k * cfg.dt
                self._check(s)
                geo = self.grid.geometry(s.eta) if cfg.fluid else None
            except ContactEvent as ev:
                series.status = Status("ContactEvent", ev.time)
                break
            except (Unstable, SolverFailure, FloatingPointError, ValueError) as ev:
                series.status = Status("Unstable", k * cfg.dt, str(ev))
                break
            series.record(s.time, self.energy(s, geo), self.dissipation(s, geo), s.eta, s.divergence)
            if callback is not None:
                callback(s)
        self.final_state = s
        return series


def step(state: SimState, cfg: SimConfig) -> SimState:
    """Advance ``state`` by one ``cfg.dt`` (builds a fresh solver; use Simulator for loops)."""
    return Simulator(cfg).step(state)


def run(cfg: SimConfig, callback=None) -> TimeSeries:
    return Simulator(cfg).run(callback)


def certify_channel(cfg: SimConfig, c_s: float | None = None) -> Certificate:
    """Reduced-problem analogue of the no-contact certificate.

    Uses the discrete initial energy of the simulator and the T^1 Sobolev
    constant; holds iff 2 E(0) / beta <= mean(eta0)^2 (1 - kappa)^2 / C^2.
    """
    if c_s is None:
        c_s = lattice.converged_sobolev_constant_1d()
    sim = Simulator(cfg)
    e0 = sim.energy(sim.initial_state()) / cfg.weights.beta
    c_kappa = lattice.certificate_constant(cfg.kappa, c_s)
    eta_bar0 = float(np.mean(cfg.eta0))
    margin = eta_bar0**2 / c_kappa - 2.0 * e0
    return Certificate(e0, eta_bar0, cfg.kappa, c_kappa, margin, bool(margin >= 0), cfg.kappa * eta_bar0)


@dataclass(frozen=True)
class AuditReport:
    max_defect: float
    worst_step: int
    global_excess: float
    tol_per_step: float
    flagged: bool


def energy_audit(series: TimeSeries, tol_per_step: float = 1e-6) -> AuditReport:
    """Discrete energy inequality check.

    Per step: E_{n+1} + dt D_{n+1} - E_n.  Globally: E_n + sum dt D - E_0
    must stay below n * tol_per_step.
    """
    e, d, dt = series.E, series.D, series.dt
    if len(e) < 2:
        return AuditReport(0.0, -1, 0.0, tol_per_step, False)
    defect = e[1:] + dt * d[1:] - e[:-1]
    worst = int(np.argmax(defect))
    n = np.arange(1, len(e))
    excess = e[1:] + dt * np.cumsum(d[1:]) - e[0] - n * tol_per_step
    max_defect = float(max(defect[worst], 0.0))
    g = float(np.max(excess))
    return AuditReport(max_defect, worst + 1, g, tol_per_step, bool(max_defect > tol_per_step or g > 0))


@dataclass(frozen=True)
class ContactReport:
    min_slack: float
    first_violation: Optional[float]
    status: Status


def contact_monitor(series: TimeSeries, kappa: float, eta_bar0: float) -> ContactReport:
    """Slack min_eta - kappa eta_bar0 over the run and the first time it goes negative."""
    t = series.t
    slack = series.min_eta - kappa * eta_bar0
    bad = np.flatnonzero(slack < 0)
    first = float(t[bad[0]]) if bad.size else None
    if first is None and series.status.kind == "ContactEvent":
        first = series.status.time
    return ContactReport(float(np.min(slack)), first, series.status)
