"""Brute-force reference dynamics on the full truncated density matrix.

Builds the complete weak-coupling generator

    dρ̂/dt = i[ρ̂, Ĥ] − ( [â†, Ĝ₁ â ρ̂] + [ρ̂ Ĝ₂ â, â†]
                        + [ρ̂ â† Ĝ₁†, â] + [â, â† Ĝ₂† ρ̂] )

with Ĝ₁ = F̂₊ + iR̂₋ and Ĝ₂ = F̂₋ + iR̂₊ diagonal in the Fock basis (the
last two terms are the Hermitian conjugates of the first two, written as
superoperators acting linearly on ρ̂).  Everything is dense and row-major
vectorized: vec(ρ)[(N+1)·r + c] = ρ[r, c], so vec(AρB) = (A ⊗ Bᵀ) vec(ρ).

This module exists to validate the reduced equations, not to scale; the
ladder operators are plain truncated matrices, which makes the generator's
diagonal sector coincide exactly with the reflecting-boundary birth-death
generator of `redfield`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericsError
from .redfield import RedfieldCoefficients

#: dense construction cost guard
ORACLE_N_MAX_LIMIT = 32

#: words accepted by regression_correlator
_LADDER_WORDS = ("identity", "a", "adag", "n")


def _ladder_ops(n_max):
    dim = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)
    return a, a.conj().T


def vectorize(rho):
    """Row-major stacking of a density matrix."""
    return np.asarray(rho).reshape(-1)


def unvectorize(vec, dim):
    return np.asarray(vec).reshape(dim, dim)


def _left(op, dim):
    return np.kron(op, np.eye(dim))


def _right(op, dim):
    return np.kron(np.eye(dim), op.T)


@dataclass(frozen=True)
class Liouvillian:
    """Dense generator acting on vectorized (n_max+1)² density matrices."""

    matrix: np.ndarray
    n_max: int
    coeffs: RedfieldCoefficients

    @property
    def dim(self):
        return self.n_max + 1

    def apply(self, rho):
        return unvectorize(self.matrix @ vectorize(rho), self.dim)

    def evolve(self, rho0, t_grid):
        """e^{Lt} ρ0 for every t in t_grid, via dense eigendecomposition."""
        t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
        lam, vecs = np.linalg.eig(self.matrix)
        cond = np.linalg.cond(vecs)
        if cond > 1e13:
            raise NumericsError(
                f"oracle eigenbasis ill-conditioned (cond {cond:.2e}); "
                "refusing to exponentiate")
        coeff = np.linalg.solve(vecs, vectorize(rho0).astype(complex))
        out = []
        for t in t_grid:
            v = vecs @ (np.exp(lam * t) * coeff)
            out.append(unvectorize(v, self.dim))
        return np.array(out)

    def steady_state(self):
        """Null vector of the generator, normalized to unit trace."""
        lam, vecs = np.linalg.eig(self.matrix)
        idx = int(np.argmin(np.abs(lam)))
        rho = unvectorize(vecs[:, idx], self.dim)
        rho = 0.5 * (rho + rho.conj().T)
        tr = np.trace(rho).real
        if abs(tr) < 1e-300:
            raise NumericsError("oracle steady state has vanishing trace")
        return np.real_if_close(rho / tr, tol=1e6).astype(complex)


def build_liouvillian(model, noise, n_max, include_shifts=True):
    """Assemble the dense generator at truncation n_max (guarded at 32)."""
    if n_max > ORACLE_N_MAX_LIMIT:
        raise ValueError(
            f"oracle truncation n_max={n_max} exceeds the dense-cost guard "
            f"of {ORACLE_N_MAX_LIMIT}")
    if n_max < 1:
        raise ValueError("oracle needs n_max >= 1")
    coeffs = RedfieldCoefficients.build(model, noise, n_max,
                                        include_shifts=include_shifts)
    dim = n_max + 1
    a, adag = _ladder_ops(n_max)
    energies = np.asarray(model.energy(np.arange(dim)), dtype=float)
    ham = np.diag(energies)
    g1 = np.diag(coeffs.f_plus + 1j * (coeffs.r_minus if coeffs.r_minus is not None
                                       else np.zeros(dim)))
    g2 = np.diag(coeffs.f_minus + 1j * (coeffs.r_plus if coeffs.r_plus is not None
                                        else np.zeros(dim)))
    g1c = g1.conj().T
    g2c = g2.conj().T

    lio = 1j * (_right(ham, dim) - _left(ham, dim))
    # [a†, G1 a ρ]
    lio -= _left(adag @ g1 @ a, dim) - np.kron(g1 @ a, adag.T)
    # [ρ G2 a, a†]
    lio -= _right(g2 @ a @ adag, dim) - np.kron(adag, (g2 @ a).T)
    # [ρ a† G1†, a]
    lio -= _right(adag @ g1c @ a, dim) - np.kron(a, (adag @ g1c).T)
    # [a, a† G2† ρ]
    lio -= _left(a @ adag @ g2c, dim) - np.kron(adag @ g2c, a.T)
    return Liouvillian(matrix=lio, n_max=n_max, coeffs=coeffs)


def diagonal_sector(liou):
    """Generator restricted to populations: matrix G with dρ_n/dt = G ρ."""
    dim = liou.dim
    idx = np.arange(dim) * dim + np.arange(dim)
    return np.real(liou.matrix[np.ix_(idx, idx)])


def coherence_band_generator(liou):
    """Restriction of the Liouvillian to P_n = √n ρ_{n,n−1}, as dP/dτ = −M P.

    Applies the generator to each band basis matrix and reads back the band
    components; used to pin down the index and sign conventions of the
    reduced tridiagonal system.
    """
    dim = liou.dim
    n_band = dim - 1
    m = np.zeros((n_band, n_band), dtype=complex)
    for j in range(1, dim):         # source element |j><j-1|, P_j basis
        basis = np.zeros((dim, dim), dtype=complex)
        basis[j, j - 1] = 1.0 / np.sqrt(j)
        image = liou.apply(basis)
        for i in range(1, dim):
            m[i - 1, j - 1] = -np.sqrt(i) * image[i, i - 1]
    return m


def _word_matrix(word, n_max):
    a, adag = _ladder_ops(n_max)
    if word == "identity":
        return np.eye(n_max + 1)
    if word == "a":
        return a
    if word == "adag":
        return adag
    if word == "n":
        return adag @ a
    raise ValueError(f"unknown ladder word {word!r}; expected one of {_LADDER_WORDS}")


def regression_correlator(liou, rho, dress_left, dress_right, observe,
                          tau_grid, leak_tol=1e-8):
    """Tr[Ô ρ̃(τ)] with ρ̃(0) = L̂ ρ̂ R̂ evolved by the full generator.

    `dress_left`, `dress_right` and `observe` are ladder words from
    {"identity", "a", "adag", "n"}.  Raises NumericsError when the dressed
    state accumulates weight at the truncation edge (leakage), since the
    correlator is then contaminated by the missing levels.
    """
    dim = liou.dim
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        diag = np.zeros((dim, dim), dtype=complex)
        np.fill_diagonal(diag, rho)
        rho = diag
    left = _word_matrix(dress_left, liou.n_max)
    right = _word_matrix(dress_right, liou.n_max)
    obs = _word_matrix(observe, liou.n_max)
    dressed = left @ rho @ right
    states = liou.evolve(dressed, tau_grid)
    top = np.max(np.abs(states[:, -1, :])) + np.max(np.abs(states[:, :, -1]))
    scale = max(np.max(np.abs(states)), 1e-300)
    if leak_tol is not None and top / scale > leak_tol:
        raise NumericsError(
            f"truncation leakage: relative weight {top / scale:.2e} at the "
            f"n_max={liou.n_max} band exceeds {leak_tol:g}",
            achieved=float(top / scale), requested=leak_tol)
    return np.array([np.trace(obs @ st) for st in states])
