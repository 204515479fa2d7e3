import numpy as np
import pytest

from fsiplate.simulator._grid import ColumnGrid


@pytest.fixture(scope="module")
def geo():
    g = ColumnGrid(32, 16)
    return g.geometry(1 + 0.2 * np.sin(2 * np.pi * g.x) + 0.05 * np.cos(6 * np.pi * g.x))


def face_height(form, eta):
    return 0.5 * (eta + np.roll(eta, -1)) if form.st.staggered_x else eta


def test_divergence_adjoint_and_matrix(geo):
    g = geo.grid
    rng = np.random.default_rng(0)
    v, p = rng.standard_normal(g.n_v), rng.standard_normal(g.n_p)
    assert geo.div(v) @ p == pytest.approx(v @ geo.div_t(p), rel=1e-13)
    assert np.allclose(geo.div_matrix() @ v, geo.div(v), atol=1e-14)


def test_column_sums_telescope(geo):
    g = geo.grid
    v = np.random.default_rng(1).standard_normal(g.n_v)
    cols = geo.div(v).reshape(g.nz, g.nx).sum(axis=0)
    assert np.allclose(cols, -g.dx * geo.column_speed(v), atol=1e-13)
    assert abs(np.sum(geo.column_speed(v))) < 1e-11


def test_constant_flux_is_solenoidal(geo):
    g = geo.grid
    u = np.tile(1.0 / geo.eta_f, g.nz)
    w = np.zeros(g.n_w)
    v = np.concatenate([u, w])
    # uniform volume flux per column gives no plate motion
    assert np.max(np.abs(geo.column_speed(v))) < 1e-12


def test_rejects_nonpositive_height():
    g = ColumnGrid(8, 4)
    with pytest.raises(ValueError):
        g.geometry(np.r_[np.ones(7), 0.0])
    with pytest.raises(ValueError):
        ColumnGrid(2, 4)


@pytest.mark.parametrize("which", ["vis_u", "vis_w"])
def test_dirichlet_form_symmetric_psd(geo, which):
    form = getattr(geo, which)
    a = form.matrix()
    assert abs(a - a.T).max() < 1e-12
    rng = np.random.default_rng(2)
    for _ in range(5):
        c = rng.standard_normal(form.st.n_int)
        assert np.allclose(a @ c, form.apply_interior(c), atol=1e-10)
        assert c @ (a @ c) > 0
    assert np.allclose(form.diagonal(), a.diagonal())


@pytest.mark.parametrize("which", ["vis_u", "vis_w"])
def test_dirichlet_form_exact_cases(geo, which):
    form = getattr(geo, which)
    st = form.st
    assert form.dissipation(np.ones(st.n)) == 0.0
    # c = z has unit gradient, so the energy is the channel area mean(eta)
    z = np.repeat(st.zeta, st.nx) * np.tile(face_height(form, geo.eta), st.nrows)
    assert form.dissipation(z) == pytest.approx(np.mean(geo.eta), rel=1e-5)


@pytest.mark.parametrize("which", ["vis_u", "vis_w"])
def test_dirichlet_energy_converges(which):
    # c = z sin(2 pi x) vanishes on the bed like every velocity component
    exact = (2 * np.pi) ** 2 / 6 + 0.5
    errs = []
    for n in (16, 32, 64):
        g = ColumnGrid(n, n // 2)
        form = getattr(g.geometry(np.ones(n)), which)
        xs = g.x + (0.5 * g.dx if form.st.staggered_x else 0.0)
        c = np.outer(form.st.zeta, np.sin(2 * np.pi * xs)).ravel()
        errs.append(abs(form.dissipation(c) - exact))
    assert errs[1] < 0.3 * errs[0] and errs[2] < 0.3 * errs[1]


def test_energy_gradient_matches_dissipation(geo):
    form = geo.vis_w
    c = np.random.default_rng(3).standard_normal(form.st.n)
    assert c @ form.energy_gradient(c) == pytest.approx(form.dissipation(c), rel=1e-12)
    top = np.random.default_rng(4).standard_normal(form.st.nx)
    full = form.embed(np.zeros(form.st.n_int), np.zeros(form.st.nx), top)
    assert np.allclose(form.boundary_load(np.zeros(form.st.nx), top), form.energy_gradient(full)[form.st.interior])
