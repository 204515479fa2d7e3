"""Independent reference solutions shared by the test modules."""
import numpy as np
from scipy.linalg import expm


def beam_modes(eta0, eta1, rho, beta, nu, t):
    """Exact solution of rho eta_tt - nu eta_xxt + beta eta_xxxx = 0 on T^1, mode by mode."""
    n = eta0.size
    lam = (2 * np.pi * np.fft.fftfreq(n, d=1.0 / n)) ** 2
    a0, a1 = np.fft.fft(eta0), np.fft.fft(eta1)
    b0, b1 = np.empty_like(a0), np.empty_like(a1)
    for k in range(n):
        m = np.array([[0.0, 1.0], [-beta * lam[k] ** 2 / rho, -nu * lam[k] / rho]])
        e = expm(m * t)
        b0[k] = e[0, 0] * a0[k] + e[0, 1] * a1[k]
        b1[k] = e[1, 0] * a0[k] + e[1, 1] * a1[k]
    return np.real(np.fft.ifft(b0)), np.real(np.fft.ifft(b1))


def beam_energy_norm(eta, eta_t, rho, beta):
    """sqrt(rho |eta_t|^2 + beta |eta_xx|^2), averaged over T^1."""
    n = eta.size
    lam = (2 * np.pi * np.fft.fftfreq(n, d=1.0 / n)) ** 2
    exx = np.real(np.fft.ifft(-lam * np.fft.fft(eta)))
    return float(np.sqrt(rho * np.mean(eta_t**2) + beta * np.mean(exx**2)))


def beam_relative_error(sim_eta, sim_eta_t, eta0, eta1, rho, beta, nu, t):
    ref_eta, ref_eta_t = beam_modes(eta0, eta1, rho, beta, nu, t)
    err = beam_energy_norm(sim_eta - ref_eta, sim_eta_t - ref_eta_t, rho, beta)
    return err / beam_energy_norm(eta0, eta1, rho, beta), abs(np.mean(sim_eta) - np.mean(ref_eta))
