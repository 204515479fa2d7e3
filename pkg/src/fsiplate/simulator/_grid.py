"""Staggered operators on the column-mapped channel {0 < z < eta(x)}, x in T^1.

The physical channel is pulled back to the rectangle T^1 x (0, 1) by
zeta = z / eta(x).  Unknowns live on a MAC layout in (x, zeta):

    p[j, i]    cell centres          (x_i,       zeta_j)       j = 0..nz-1
    u[j, i]    vertical cell faces   (x_{i+1/2}, zeta_j)
    w[f-1, i]  horizontal cell faces (x_i,       zeta_f)       f = 1..nz-1

with x_i = i/nx (plate nodes) and zeta_j = (j + 1/2)/nz.  Bottom and top
face values of w are boundary data (0 and the plate speed).  Arrays are
flattened row-major with shape (rows, nx).

The divergence is the exact volume balance of each physical cell, so its
column sums telescope: summing over a column leaves only the lateral flux
difference and the plate speed.  The pressure gradient is its negative
transpose and the viscous operator is a symmetric Dirichlet form, which is
what makes the discrete energy bookkeeping close.

Geometry enters only through diagonal scalings of fixed sparse stencils, so
operators are applied matrix-free; assembled matrices are built only to
refresh preconditioners.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp


def _periodic_shift(nx, rows, shift):
    """Matrix picking entry (r, (i + shift) mod nx) of a (rows, nx) array."""
    n = rows * nx
    r = np.repeat(np.arange(rows), nx)
    i = np.tile(np.arange(nx), rows)
    cols = r * nx + (i + shift) % nx
    return sp.csr_matrix((np.ones(n), (np.arange(n), cols)), shape=(n, n))


class ColumnGrid:
    def __init__(self, nx: int, nz: int):
        if nx < 4 or nz < 2:
            raise ValueError("need nx >= 4 and nz >= 2")
        self.nx, self.nz = nx, nz
        self.dx, self.dz = 1.0 / nx, 1.0 / nz
        self.n_p = nz * nx
        self.n_u = nz * nx
        self.n_w = (nz - 1) * nx
        self.n_v = self.n_u + self.n_w
        self.x = np.arange(nx) * self.dx
        self.zeta_c = (np.arange(nz) + 0.5) * self.dz
        self.zeta_f = np.arange(nz + 1) * self.dz
        self.k = np.fft.fftfreq(nx, d=1.0 / nx)
        self._build_fixed()

    def _build_fixed(self):
        nx, nz = self.nx, self.nz

        # lateral flux difference: cell (j,i) <- F(j,i) - F(j,i-1)
        self._sx = (sp.identity(self.n_u, format="csr") - _periodic_shift(nx, nz, -1)).tocsr()
        self._sx_t = self._sx.T.tocsr()

        # 4-point average of u onto interior w faces
        rows_f = nz - 1
        r = np.repeat(np.arange(rows_f), nx)
        i = np.tile(np.arange(nx), rows_f)
        out = np.arange(rows_f * nx)
        cols = [(r + dj) * nx + (i + di) % nx for dj in (0, 1) for di in (-1, 0)]
        self._avg_uw = sp.csr_matrix(
            (np.full(4 * out.size, 0.25), (np.tile(out, 4), np.concatenate(cols))),
            shape=(self.n_w, self.n_u),
        )
        self._avg_uw_t = self._avg_uw.T.tocsr()

        # vertical flux difference over interior faces: cell j <- Om(j+1) - Om(j)
        rows_c = np.repeat(np.arange(nz), nx)
        ic = np.tile(np.arange(nx), nz)
        cell = np.arange(self.n_p)
        up = rows_c <= nz - 2
        dn = rows_c >= 1
        self._dzf = sp.csr_matrix(
            (
                np.concatenate([np.ones(up.sum()), -np.ones(dn.sum())]),
                (
                    np.concatenate([cell[up], cell[dn]]),
                    np.concatenate([rows_c[up] * nx + ic[up], (rows_c[dn] - 1) * nx + ic[dn]]),
                ),
            ),
            shape=(self.n_p, self.n_w),
        )
        self._dzf_t = self._dzf.T.tocsr()

        self.vis_u = _DirichletStencil(nx, nz, staggered_x=True)
        self.vis_w = _DirichletStencil(nx, nz, staggered_x=False)

    def geometry(self, eta):
        return Geometry(self, np.asarray(eta, dtype=np.float64))

    def top_rows(self):
        return np.arange((self.nz - 1) * self.nx, self.nz * self.nx)

    def split(self, v):
        return v[: self.n_u].reshape(self.nz, self.nx), v[self.n_u:].reshape(self.nz - 1, self.nx)

    # spectral helpers on T^1
    def dxx(self, f):
        return np.real(np.fft.ifft(np.fft.fft(f) * -((2 * np.pi * self.k) ** 2)))

    def dx_spec(self, f):
        k = np.where(np.abs(self.k) == self.nx // 2, 0.0, self.k)
        return np.real(np.fft.ifft(np.fft.fft(f) * 2j * np.pi * k))


class Geometry:
    """Operators of a :class:`ColumnGrid` frozen at one plate height profile."""

    def __init__(self, grid: ColumnGrid, eta):
        if np.any(eta <= 0):
            raise ValueError("plate height must stay positive")
        self.grid = g = grid
        self.eta = eta
        self.eta_f = 0.5 * (eta + np.roll(eta, -1))
        etax = (self.eta_f - np.roll(self.eta_f, 1)) / g.dx
        self._flux_u = np.tile(self.eta_f, g.nz) * g.dz
        self._slope = (g.zeta_f[1 : g.nz, None] * etax[None, :]).ravel()
        cell = g.dx * g.dz
        self.mass = np.concatenate([np.tile(self.eta_f, g.nz) * cell, np.tile(eta, g.nz - 1) * cell])
        self.vis_u = g.vis_u.bind(eta)
        self.vis_w = g.vis_w.bind(eta)

    # ---- incompressibility ----------------------------------------------
    def div(self, v):
        """Net volume outflow per cell from interior unknowns (plate flux excluded)."""
        g = self.grid
        u, w = v[: g.n_u], v[g.n_u:]
        omega = w - self._slope * (g._avg_uw @ u)
        return g._sx @ (self._flux_u * u) + g.dx * (g._dzf @ omega)

    def div_t(self, p):
        g = self.grid
        q = g.dx * (g._dzf_t @ p)
        du = self._flux_u * (g._sx_t @ p) - g._avg_uw_t @ (self._slope * q)
        return np.concatenate([du, q])

    def div_matrix(self):
        g = self.grid
        omega = sp.hstack([-(sp.diags(self._slope) @ g._avg_uw), sp.identity(g.n_w)], format="csr")
        d_u = sp.hstack([g._sx @ sp.diags(self._flux_u), sp.csr_matrix((g.n_p, g.n_w))])
        return (d_u + g.dx * (g._dzf @ omega)).tocsr()

    def column_speed(self, v):
        """Plate speed forced by the lateral fluxes (exact column volume balance)."""
        g = self.grid
        fl = (self._flux_u * v[: g.n_u]).reshape(g.nz, g.nx).sum(axis=0)
        return -(fl - np.roll(fl, 1)) / g.dx


class _DirichletStencil:
    """Geometry-free pieces of the discrete ||grad c||^2 for one velocity component.

    ``staggered_x`` selects the u layout (x at faces, rows at cell centres,
    boundary rows at zeta = 0 and 1 half a cell away); otherwise the w layout
    (x at nodes, rows at zeta_f including both boundary rows).
    """

    def __init__(self, nx, nz, staggered_x):
        self.nx, self.nz = nx, nz
        self.staggered_x = staggered_x
        dz = 1.0 / nz
        if staggered_x:
            zeta = np.concatenate([[0.0], (np.arange(nz) + 0.5) * dz, [1.0]])
        else:
            zeta = np.arange(nz + 1) * dz
        self.zeta = zeta
        nrows = self.nrows = zeta.size
        self.h = np.diff(zeta)
        n = self.n = nrows * nx

        ne = (nrows - 1) * nx
        e = np.arange(ne)
        ez = sp.csr_matrix(
            (np.concatenate([np.ones(ne), -np.ones(ne)]), (np.concatenate([e, e]), np.concatenate([e + nx, e]))),
            shape=(ne, n),
        )
        self._dzeta = (sp.diags(np.repeat(1.0 / self.h, nx)) @ ez).tocsr()

        r = np.repeat(np.arange(nrows), nx)
        i = np.tile(np.arange(nx), nrows)
        xe = np.arange(n)
        if staggered_x:
            lo, hi = r * nx + (i - 1) % nx, r * nx + i
        else:
            lo, hi = r * nx + i, r * nx + (i + 1) % nx
        ex = sp.csr_matrix(
            (np.concatenate([np.ones(n), -np.ones(n)]), (np.concatenate([xe, xe]), np.concatenate([hi, lo]))),
            shape=(n, n),
        )
        rows, cols, data = [], [], []
        for row in range(nrows):
            nb = [k for k in (row - 1, row) if 0 <= k < nrows - 1]
            for k in nb:
                for off in ((-1, 0) if staggered_x else (0, 1)):
                    rows.append(row * nx + np.arange(nx))
                    cols.append(k * nx + (np.arange(nx) + off) % nx)
                    data.append(np.full(nx, 1.0 / (2 * len(nb))))
        avg = sp.csr_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(n, ne))

        # zeta extent of each row's control volume; rows with zero extent carry no x-edges
        wrow = np.full(nrows, dz)
        if staggered_x:
            wrow[[0, -1]] = 0.0
        else:
            wrow[0] = 0.0
            wrow[-1] = 0.5 * dz
        keep = np.repeat(wrow > 0, nx)
        self._wrow = np.repeat(wrow, nx)[keep]
        self._zeta_x = np.repeat(zeta, nx)[keep]
        self._ex = (ex[keep] * nx).tocsr()
        self._cross = (avg @ self._dzeta)[keep].tocsr()
        self._ex_t = self._ex.T.tocsr()
        self._cross_t = self._cross.T.tocsr()
        self._dzeta_t = self._dzeta.T.tocsr()
        self._hz = np.repeat(self.h, nx)
        self.interior = slice(nx, (nrows - 1) * nx)
        self.n_int = (nrows - 2) * nx

    def bind(self, eta):
        return DirichletForm(self, eta)


class DirichletForm:
    """Discrete Dirichlet energy sum_edges W (G c)^2 at a fixed plate profile."""

    def __init__(self, st: _DirichletStencil, eta):
        self.st = st
        nx = st.nx
        ef = 0.5 * (eta + np.roll(eta, -1))
        if st.staggered_x:
            h_col, h_edge = ef, eta
            etax = (ef - np.roll(ef, 1)) * nx
        else:
            h_col, h_edge = eta, ef
            etax = (np.roll(eta, -1) - eta) * nx
        nrx = st._wrow.size // nx
        h_edge_t = np.tile(h_edge, nrx)
        self._slope = st._zeta_x * np.tile(etax, nrx) / h_edge_t
        self._wx = st._wrow * h_edge_t / nx
        inv_hcol = np.tile(1.0 / h_col, st.nrows - 1)
        self._inv_hcol = inv_hcol
        self._wz = st._hz * np.tile(h_col, st.nrows - 1) / nx

    def grad(self, c_full):
        st = self.st
        dz = st._dzeta @ c_full
        gx = st._ex @ c_full - self._slope * (st._cross @ c_full)
        return gx, dz * self._inv_hcol

    def grad_t(self, ax, az):
        st = self.st
        return st._ex_t @ ax - st._cross_t @ (self._slope * ax) + st._dzeta_t @ (az * self._inv_hcol)

    def energy_gradient(self, c_full):
        """d/dc of the form (i.e. G^T W G c) on every row."""
        gx, gz = self.grad(c_full)
        return self.grad_t(self._wx * gx, self._wz * gz)

    def dissipation(self, c_full):
        gx, gz = self.grad(c_full)
        return float(gx @ (self._wx * gx) + gz @ (self._wz * gz))

    def embed(self, c_int, bottom, top):
        return np.concatenate([bottom, c_int, top])

    def apply_interior(self, c_int):
        st = self.st
        z = np.zeros(st.nx)
        return self.energy_gradient(self.embed(c_int, z, z))[st.interior]

    def boundary_load(self, bottom, top):
        """Interior part of G^T W G applied to the boundary rows alone."""
        st = self.st
        return self.energy_gradient(self.embed(np.zeros(st.n_int), bottom, top))[st.interior]

    def top_traction(self, c_full):
        """Force per unit plate length exerted on the top boundary values."""
        st = self.st
        return -self.energy_gradient(c_full)[-st.nx:] * st.nx

    def diagonal(self):
        """Diagonal of the interior operator, for Jacobi-type preconditioning."""
        return self.matrix().diagonal()

    def matrix(self):
        st = self.st
        g = sp.vstack(
            [st._ex - sp.diags(self._slope) @ st._cross, sp.diags(self._inv_hcol) @ st._dzeta],
            format="csr",
        )
        w = np.concatenate([self._wx, self._wz])
        gi = g[:, st.interior]
        return (gi.T @ sp.diags(w) @ gi).tocsr()
