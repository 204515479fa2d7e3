"""Krylov solves preconditioned by a factorisation of a nearby operator.

The channel geometry moves by O(dt) per step, so an LU factorisation taken a
few hundred steps ago is still an excellent preconditioner; it is refreshed
only when the iteration count creeps up.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse.linalg as spla


class SolverFailure(RuntimeError):
    pass


def pcg(apply_a, b, precond, x0=None, rtol=1e-12, atol=0.0, maxiter=200):
    """Preconditioned conjugate gradients; returns (x, iterations)."""
    x = np.zeros_like(b) if x0 is None else x0.copy()
    r = b - apply_a(x) if x0 is not None else b.copy()
    bnorm = np.linalg.norm(b)
    stop = max(rtol * bnorm, atol)
    if np.linalg.norm(r) <= stop:
        return x, 0
    z = precond(r)
    d = z.copy()
    rz = r @ z
    for it in range(1, maxiter + 1):
        ad = apply_a(d)
        dad = d @ ad
        if not np.isfinite(dad) or dad <= 0:
            raise SolverFailure("operator lost positivity")
        alpha = rz / dad
        x += alpha * d
        r -= alpha * ad
        if np.linalg.norm(r) <= stop:
            return x, it
        z = precond(r)
        rz_new = r @ z
        d = z + (rz_new / rz) * d
        rz = rz_new
    raise SolverFailure(f"PCG did not converge in {maxiter} iterations")


class LaggedFactor:
    """LU of an assembled operator, rebuilt when the Krylov count exceeds ``refresh_after``."""

    def __init__(self, assemble, refresh_after=6):
        self._assemble = assemble
        self.refresh_after = refresh_after
        self._lu = None
        self.factorizations = 0

    def refresh(self, *args):
        mat = self._assemble(*args).tocsc()
        self._lu = spla.splu(mat, permc_spec="MMD_AT_PLUS_A", options={"SymmetricMode": True})
        self.factorizations += 1

    def solve(self, apply_a, b, args, x0=None, rtol=1e-12, atol=0.0):
        if self._lu is None:
            self.refresh(*args)
        x, its = pcg(apply_a, b, self._lu.solve, x0=x0, rtol=rtol, atol=atol)
        if its > self.refresh_after:
            self.refresh(*args)
        return x, its
