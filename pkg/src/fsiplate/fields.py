"""Real scalar fields on the unit torus T^1 or T^2 sampled on a uniform grid.

Nodes sit at ``j/N`` along each axis.  Spectral coefficients use the
normalised DFT ``fft(values) / N**dim`` so that index ``k`` is the Fourier
coefficient of ``exp(2 pi i k.x)``.
"""
from __future__ import annotations

import numpy as np

from . import lattice


class PeriodicField:
    """Samples of a periodic real field on ``N`` (1D) or ``N x N`` (2D) nodes.

    ``values`` is stored read-only; assign a new array to mutate, which drops
    the cached spectrum.  Axis 0 of a 2D field is x1, axis 1 is x2.
    """

    def __init__(self, values):
        self.values = values

    @property
    def values(self) -> np.ndarray:
        return self._values

    @values.setter
    def values(self, values):
        arr = np.array(values, dtype=np.float64)
        if arr.ndim not in (1, 2):
            raise ValueError(f"field must be 1D or 2D, got shape {arr.shape}")
        n = arr.shape[0]
        if any(s != n for s in arr.shape):
            raise ValueError(f"2D fields must be square, got shape {arr.shape}")
        if n < 2 or n & (n - 1):
            raise ValueError(f"resolution must be a power of two >= 2, got {n}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite")
        arr.setflags(write=False)
        self._values = arr
        self._spectrum = None

    @property
    def dimension(self) -> int:
        return self._values.ndim

    @property
    def resolution(self) -> int:
        return self._values.shape[0]

    @property
    def spectrum(self) -> np.ndarray:
        if self._spectrum is None:
            spec = np.fft.fftn(self._values) / self._values.size
            spec.setflags(write=False)
            self._spectrum = spec
        return self._spectrum

    @classmethod
    def from_spectrum(cls, spec):
        spec = np.asarray(spec)
        return cls(np.real(np.fft.ifftn(spec * spec.size)))

    @classmethod
    def from_function(cls, func, n, dim=2):
        """Sample ``func(x)`` (1D) or ``func(x1, x2)`` (2D, ij indexing) on the grid."""
        x = grid_nodes(n)
        if dim == 1:
            return cls(func(x))
        x1, x2 = np.meshgrid(x, x, indexing="ij")
        return cls(np.broadcast_to(func(x1, x2), (n, n)))

    @classmethod
    def constant(cls, c, n, dim=2):
        return cls(np.full((n,) * dim, float(c)))

    def __array__(self, dtype=None, copy=None):
        return self._values if dtype is None else self._values.astype(dtype)

    def __repr__(self):
        return f"PeriodicField(dim={self.dimension}, N={self.resolution})"

    def _like(self, values):
        return PeriodicField(values)

    def __add__(self, other):
        return self._like(self._values + _raw(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._like(self._values - _raw(other))

    def __rsub__(self, other):
        return self._like(_raw(other) - self._values)

    def __mul__(self, other):
        return self._like(self._values * _raw(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self._like(-self._values)


def _raw(x):
    return x.values if isinstance(x, PeriodicField) else x


def grid_nodes(n):
    return np.arange(n) / n


def wavenumbers(n, dim):
    """Integer wavevector components, each shaped to broadcast against the spectrum."""
    k = np.fft.fftfreq(n, d=1.0 / n)
    if dim == 1:
        return (k,)
    return (k[:, None], k[None, :])


def mean(f: PeriodicField) -> float:
    """Grid average; exact for band-limited fields."""
    return float(np.mean(f.values))


def l2_norm(f: PeriodicField) -> float:
    return float(np.sqrt(np.mean(f.values**2)))


def laplacian(f: PeriodicField) -> PeriodicField:
    ks = wavenumbers(f.resolution, f.dimension)
    symbol = -sum((2 * np.pi * k) ** 2 for k in ks)
    return PeriodicField(np.real(np.fft.ifftn(np.fft.fftn(f.values) * symbol)))


def gradient(f: PeriodicField) -> list[PeriodicField]:
    """Spectral gradient; the Nyquist mode is dropped so the result stays real."""
    n = f.resolution
    fhat = np.fft.fftn(f.values)
    out = []
    for k in wavenumbers(n, f.dimension):
        sym = 2j * np.pi * np.where(np.abs(k) == n // 2, 0.0, k)
        out.append(PeriodicField(np.real(np.fft.ifftn(fhat * sym))))
    return out


def linf_deviation(f: PeriodicField) -> float:
    """max over grid nodes of |f - mean(f)|; a lower bound for the continuum sup."""
    v = f.values
    return float(np.max(np.abs(v - np.mean(v))))


def sobolev_gap(f: PeriodicField, c_s: float | None = None) -> float:
    """``c_s * ||Lap f|| - ||f - mean f||_inf``; nonnegative on T^2 for the sharp c_s."""
    if f.dimension != 2:
        raise ValueError("sobolev_gap uses the T^2 constant and needs a 2D field")
    if c_s is None:
        c_s = lattice.converged_sobolev_constant()
    return c_s * l2_norm(laplacian(f)) - linf_deviation(f)


def resample(f: PeriodicField, m: int) -> PeriodicField:
    """Trigonometric interpolation of a band-limited field onto an ``m``-point grid."""
    n = f.resolution
    if m < n:
        raise ValueError("resample only refines")
    spec = np.fft.fftshift(f.spectrum)
    pad = (m - n) // 2
    big = np.pad(spec, [(pad, m - n - pad)] * f.dimension)
    if n % 2 == 0:
        # split the Nyquist coefficient symmetrically so the result is real
        idx = pad
        sl = [slice(None)] * f.dimension
        for ax in range(f.dimension):
            s_lo = list(sl)
            s_hi = list(sl)
            s_lo[ax] = idx
            s_hi[ax] = idx + n
            big[tuple(s_lo)] *= 0.5
            big[tuple(s_hi)] = big[tuple(s_lo)]
    return PeriodicField.from_spectrum(np.fft.ifftshift(big))


def read_field(path) -> PeriodicField:
    """Read the plain-text grid format: header ``dim N`` then row-major values."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected header 'dim N'")
        dim, n = int(header[0]), int(header[1])
        if dim not in (1, 2):
            raise ValueError(f"{path}: dim must be 1 or 2")
        data = np.array(fh.read().split(), dtype=np.float64)
    if data.size != n**dim:
        raise ValueError(f"{path}: expected {n**dim} values, found {data.size}")
    return PeriodicField(data.reshape((n,) * dim))


def write_field(path, f: PeriodicField) -> None:
    n = f.resolution
    rows = f.values.reshape(-1, n) if f.dimension == 2 else f.values[None, :]
    with open(path, "w") as fh:
        fh.write(f"{f.dimension} {n}\n")
        for row in rows:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def random_bandlimited(n: int, kmax: float, rng=None, dim: int = 2, amplitude: float = 1.0) -> PeriodicField:
    """Random real field whose spectrum is supported in ``|k| <= kmax`` (requires kmax < n/2).

    Coefficients are complex Gaussians with Hermitian symmetry imposed by
    taking the real part of the synthesised field.
    """
    if not 0 <= kmax < n / 2:
        raise ValueError("kmax must be below the Nyquist index n/2")
    rng = np.random.default_rng(rng)
    ks = wavenumbers(n, dim)
    mask = sum(k**2 for k in ks) <= kmax**2
    shape = (n,) * dim
    coef = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * mask
    vals = np.real(np.fft.ifftn(coef)) * n**dim
    scale = np.max(np.abs(vals))
    return PeriodicField(amplitude * vals / scale if scale > 0 else vals)
