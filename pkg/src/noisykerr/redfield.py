"""Weak-coupling ladder rates, steady state, currents and population flow.

All dynamics of the diagonal (photon-number) sector reduces to a
birth-death process with per-level rates

    C_n = (n+1) [W_S(Ω_n) − W_A(Ω_n)]          upward,   n -> n+1
    D_n = n     [W_S(Ω_{n−1}) + W_A(Ω_{n−1})]   downward, n -> n−1

whose unique steady state is the product distribution
ρ_n ∝ ∏_{p<n} (W_S − W_A)/(W_S + W_A) evaluated at Ω_p.  The frequency
renormalizations R_S, R_A (Cauchy principal values of the spectra) cancel
in this sector; they are computed here because the coherence dynamics in
`correlations` needs them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericsError, PhysicsError, TruncationWarning
from .oscillator import choose_truncation
from .quadrature import integrate_panels, log_refined_edges

#: minimum distance between a ladder frequency and a hard cutoff for which
#: the principal-value integral is still well defined numerically
CUTOFF_GUARD = 1e-9

#: eigenbasis condition number beyond which evolution falls back to an ODE
COND_LIMIT = 1e12


def principal_value_shift(noise, omega0, part, tol=1e-10, rtol=1e-9):
    """Cauchy principal value R_S(Ω0) or R_A(Ω0) over the noise support.

    R_S = (1/2π) P∫ W_S(ω) [1/(Ω0+ω) + 1/(Ω0−ω)] dω and R_A likewise with
    a minus sign between the kernels and W_A as weight.  The singular piece
    is handled by subtraction:

        P∫ f/(Ω0−ω) dω = ∫ [f(ω) − f(Ω0)]/(Ω0−ω) dω
                         + f(Ω0) ln|(Ω0−ω_min)/(Ω0−ω_max)|

    when Ω0 lies strictly inside the support, plain quadrature otherwise.
    """
    if part not in ("S", "A"):
        raise ValueError("part must be 'S' or 'A'")
    if not omega0 > 0:
        raise ValueError("principal-value shift needs omega0 > 0")
    a, b = noise.omega_min, noise.omega_max
    if abs(omega0 - a) < CUTOFF_GUARD or abs(omega0 - b) < CUTOFF_GUARD:
        raise NumericsError(
            f"singularity at cutoff: omega0={omega0:g} coincides with a hard "
            f"cutoff of the noise support [{a:g}, {b:g}]")
    weight = noise.total_w_s if part == "S" else noise.total_w_a
    sign = 1.0 if part == "S" else -1.0

    base = log_refined_edges(a, b, max_width=(b - a) / 64.0)
    regular = integrate_panels(lambda w: weight(w) / (omega0 + w), base,
                               tol=tol, rtol=rtol)

    if a < omega0 < b:
        f0 = float(weight(np.array([omega0]))[0])

        def subtracted(w):
            den = omega0 - w
            # quadrature nodes are panel-interior, so den only vanishes if a
            # caller-supplied edge duplicates omega0; keep the division safe
            return np.where(den != 0.0,
                            (weight(w) - f0) / np.where(den == 0.0, 1.0, den),
                            0.0)

        refine = omega0 + np.concatenate([-np.geomspace(1e-8, 1.0, 40), [0.0],
                                          np.geomspace(1e-8, 1.0, 40)])
        refine = refine[(refine > a) & (refine < b)]
        edges = np.unique(np.concatenate([base, refine]))
        pv = integrate_panels(subtracted, edges, tol=tol, rtol=rtol)
        pv += f0 * np.log(abs((omega0 - a) / (omega0 - b)))
    else:
        pv = integrate_panels(lambda w: weight(w) / (omega0 - w), base,
                              tol=tol, rtol=rtol)

    return float(regular + sign * pv) / (2.0 * np.pi)


@dataclass(frozen=True)
class RedfieldCoefficients:
    """Per-level rates and shifts evaluated on the ladder Ω_0 .. Ω_{n_max}.

    w_plus/w_minus are W_S ± W_A at the ladder frequencies; c and d are the
    birth/death rates defined above (d[0] = 0); r_plus/r_minus are the
    principal-value shifts R_S ± R_A, present only when built with
    include_shifts=True.
    """

    omega_n: np.ndarray
    w_plus: np.ndarray
    w_minus: np.ndarray
    c: np.ndarray
    d: np.ndarray
    r_plus: np.ndarray | None = None
    r_minus: np.ndarray | None = None

    @property
    def n_max(self):
        return len(self.omega_n) - 1

    @property
    def f_plus(self):
        return 0.5 * self.w_plus

    @property
    def f_minus(self):
        return 0.5 * self.w_minus

    @classmethod
    def build(cls, model, noise, n_max, include_shifts=False):
        freqs = model.ladder_frequencies(n_max)
        n = np.arange(n_max + 1)
        w_plus = noise.total_w_plus(freqs)
        w_minus = noise.total_w_minus(freqs)
        c = (n + 1) * w_minus
        d = np.zeros(n_max + 1)
        d[1:] = n[1:] * w_plus[:-1]
        r_plus = r_minus = None
        if include_shifts:
            r_s = np.array([principal_value_shift(noise, f, "S") for f in freqs])
            r_a = np.array([principal_value_shift(noise, f, "A") for f in freqs])
            r_plus = r_s + r_a
            r_minus = r_s - r_a
        return cls(freqs, w_plus, w_minus, c, d, r_plus, r_minus)


def _component_rates(model, noise, component, n_max):
    """(C_n, D_n) restricted to a single noise component.

    The top-level upward rate is zeroed to match the reflecting boundary of
    the truncated generator, so per-component currents balance exactly.
    """
    freqs = model.ladder_frequencies(n_max)
    inside = (freqs >= noise.omega_min) & (freqs <= noise.omega_max)
    safe = np.where(inside, freqs, 1.0)
    n = np.arange(n_max + 1)
    c = (n + 1) * np.where(inside, component.w_minus(safe), 0.0)
    d = np.zeros(n_max + 1)
    d[1:] = n[1:] * np.where(inside, component.w_plus(safe), 0.0)[:-1]
    c[n_max] = 0.0
    return c, d


def rate_matrix(model, noise, n_max=None, coeffs=None):
    """Generator L of the photon-number birth-death process.

    dρ/dt = L ρ with L[n, n] = −(C_n + D_n), L[n+1, n] = C_n and
    L[n−1, n] = D_n; the boundary is reflecting (C_{n_max} = 0) so columns
    sum to zero and probability is conserved on the truncated ladder.
    """
    if n_max is None:
        n_max = model.n_max
    if n_max is None:
        n_max = choose_truncation(model, noise)
    if coeffs is None:
        coeffs = RedfieldCoefficients.build(model, noise, n_max)
    c = coeffs.c.copy()
    d = coeffs.d
    c[n_max] = 0.0
    rung_dead = (c[:-1] == 0.0) & (d[1:] == 0.0)
    if rung_dead.any():
        first = int(np.argmax(rung_dead))
        if not rung_dead[first:].all():
            warnings.warn(
                f"disconnected ladder: no rates couple levels {first} and "
                f"{first + 1} but transitions exist above",
                TruncationWarning, stacklevel=2)
    gen = np.zeros((n_max + 1, n_max + 1))
    idx = np.arange(n_max + 1)
    gen[idx, idx] = -(c + d)
    gen[idx[1:], idx[:-1]] = c[:-1]
    gen[idx[:-1], idx[1:]] = d[1:]
    return gen


@dataclass(frozen=True)
class PopulationDistribution:
    """Normalized photon-number distribution with its log representation."""

    rho: np.ndarray
    log_rho: np.ndarray

    @property
    def n_max(self):
        return len(self.rho) - 1

    def mean_n(self):
        return float(np.arange(len(self.rho)) @ self.rho)

    def mean_n_n_minus_1(self):
        n = np.arange(len(self.rho))
        return float((n * (n - 1)) @ self.rho)


def _logsumexp(x):
    m = np.max(x[np.isfinite(x)]) if np.isfinite(x).any() else 0.0
    return m + np.log(np.sum(np.exp(x - m)))


def ness(model, noise, n_max=None, tail_tol=1e-12):
    """Analytic non-equilibrium steady state of the birth-death ladder.

    ρ_n = ρ_0 ∏_{p=1}^{n} (W_S − W_A)/(W_S + W_A) |_{Ω_{p−1}}, accumulated
    in log space.  Raises PhysicsError when the product does not decay
    (purely classical noise populates every level equally, which has no
    normalizable limit) or when the noise does not couple at all.
    """
    if noise.components and all(c.kind == "classical_1f" for c in noise.components):
        raise PhysicsError(
            "non-normalizable infinite-temperature state: purely classical "
            "noise populates every level equally")
    if n_max is None:
        n_max = model.n_max
    if n_max is None:
        n_max = choose_truncation(model, noise, tail_tol=tail_tol)
    freqs = model.ladder_frequencies(n_max)[:-1]  # Ω_0 .. Ω_{n_max−1}
    plus = noise.total_w_plus(freqs)
    minus = noise.total_w_minus(freqs)
    if plus.size == 0 or plus[0] <= 0.0:
        raise PhysicsError(
            "noise does not couple to the bottom of the ladder; "
            "no steady state is selected")
    live = plus > 0.0
    if np.all(minus[live] >= (1.0 - 1e-9) * plus[live]):
        raise PhysicsError(
            "non-normalizable infinite-temperature state: the steady-state "
            "ratios do not decay anywhere on the ladder")
    with np.errstate(divide="ignore"):
        log_factor = np.where(live & (minus > 0.0),
                              np.log(np.maximum(minus, 1e-300))
                              - np.log(np.maximum(plus, 1e-300)),
                              -np.inf)
    # a dead rung makes everything above unreachable
    unreachable = np.cumsum(~live | (minus <= 0.0)) > 0
    log_factor = np.where(unreachable, -np.inf, log_factor)
    log_w = np.concatenate([[0.0], np.cumsum(log_factor)])
    log_rho = log_w - _logsumexp(log_w)
    rho = np.exp(log_rho)
    rho = rho / rho.sum()
    return PopulationDistribution(rho=rho, log_rho=log_rho)


@dataclass(frozen=True)
class CurrentReport:
    """Per-component photon currents at a given population distribution.

    `into_bath` holds the raw continuity currents I_ℓ = Σ_n ρ_n (D_n − C_n)
    (positive means photons flow into that bath).  The named aggregates
    follow the source/sink convention: i_classical is the excitation rate
    supplied by classical noise (sign flipped), i_phonon and i_detector are
    the rates absorbed by super-Ohmic and flat components.  At steady state
    i_classical = i_phonon + i_detector + i_other.
    """

    into_bath: tuple
    i_classical: float
    i_phonon: float
    i_detector: float
    i_other: float
    detector_closed_form: float
    mean_n: float

    @property
    def conservation_residual(self):
        return self.i_classical - self.i_phonon - self.i_detector - self.i_other


def currents(model, noise, rho):
    """Photon currents into each noise component at distribution `rho`."""
    dist = rho.rho if isinstance(rho, PopulationDistribution) else np.asarray(rho, dtype=float)
    if not np.isclose(dist.sum(), 1.0, atol=1e-9):
        raise ValueError("currents expects a normalized distribution")
    n_max = len(dist) - 1
    per_comp = []
    agg = {"classical_1f": 0.0, "superohmic": 0.0, "flat": 0.0, "tabulated": 0.0}
    for comp in noise.components:
        c, d = _component_rates(model, noise, comp, n_max)
        flow = float(dist @ (d - c))
        per_comp.append(flow)
        agg[comp.kind] += flow
    mean_n = float(np.arange(n_max + 1) @ dist)
    gamma_flat = noise.gamma_by_kind("flat")
    return CurrentReport(
        into_bath=tuple(per_comp),
        i_classical=-agg["classical_1f"],
        i_phonon=agg["superohmic"],
        i_detector=agg["flat"],
        i_other=agg["tabulated"],
        detector_closed_form=2.0 * gamma_flat * mean_n,
        mean_n=mean_n,
    )


def evolve_populations(model, noise, rho0, t, n_max=None, coeffs=None,
                       rtol=1e-12, atol=1e-14):
    """Propagate populations: returns e^{Lt} ρ0 (ρ0 need not be normalized).

    Connected ladders are diagonalized through the detailed-balance
    similarity transform (symmetric tridiagonal eigenproblem, perfectly
    conditioned); otherwise a dense eigendecomposition is used, falling back
    to adaptive ODE integration when the eigenbasis is ill-conditioned.
    `t` may be a scalar or an array; an array returns one row per time.
    """
    rho0 = np.asarray(rho0, dtype=float)
    if np.any(rho0 < -1e-13 * max(rho0.max(initial=0.0), 1.0)):
        raise ValueError("initial populations must be entrywise >= 0")
    if n_max is None:
        n_max = len(rho0) - 1
    if len(rho0) != n_max + 1:
        raise ValueError("rho0 length must be n_max + 1")
    scalar_input = np.ndim(t) == 0
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("evolution time must be >= 0")
    gen = rate_matrix(model, noise, n_max=n_max, coeffs=coeffs)
    c = np.diag(gen, k=-1)   # C_0 .. C_{n_max-1}
    d = np.diag(gen, k=1)    # D_1 .. D_{n_max}

    if c.size and np.all(c > 0.0) and np.all(d > 0.0):
        log_pi = np.concatenate([[0.0], np.cumsum(np.log(c) - np.log(d))])
        log_pi -= log_pi.max()
        if log_pi.min() > -600.0:
            half = np.exp(0.5 * log_pi)
            lam, u = scipy.linalg.eigh_tridiagonal(np.diag(gen).copy(),
                                                   np.sqrt(c * d))
            y0 = u.T @ (rho0 / half)
            z = np.exp(np.minimum(lam[None, :] * t_arr[:, None], 0.0)) * y0[None, :]
            res = (z @ u.T) * half[None, :]
            return res[0] if scalar_input else res

    lam, vecs = np.linalg.eig(gen)
    cond = np.linalg.cond(vecs)
    if cond < COND_LIMIT:
        coeff = np.linalg.solve(vecs, rho0.astype(complex))
        z = np.exp(lam[None, :] * t_arr[:, None]) * coeff[None, :]
        res = np.real(z @ vecs.T)
        return res[0] if scalar_input else res

    from scipy.integrate import solve_ivp
    if t_arr.max() == 0.0:
        return rho0.copy() if scalar_input else np.tile(rho0, (t_arr.size, 1))
    ts, inv = np.unique(t_arr, return_inverse=True)
    sol = solve_ivp(lambda _, y: gen @ y, (0.0, float(ts.max())), rho0,
                    t_eval=ts, method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise NumericsError(f"population integrator failed: {sol.message}",
                            requested=rtol)
    res = sol.y.T[inv]
    return res[0] if scalar_input else res
