"""Composable noise spectral models.

Every noise source is described by the symmetric/antisymmetric parts
W_S(ω), W_A(ω) of its spectral function.  Built-in shapes, with ω in units
of the reference frequency ω* (fixed to 1) and dimensionless amplitudes Γ:

  classical 1/f     W_S = Γ/ω,                W_A = 0
  super-Ohmic bath  W_A = Γ ω^s,              W_S = W_A coth(βω/2)
  flat detector     W_A = Γ,                  W_S = W_A coth(βω/2)
  tabulated         (ω, W_S, W_A) samples, interpolated linearly in log ω

Thermal kinds satisfy the KMS condition W_A/W_S = tanh(βω/2) identically;
β = inf is allowed and means an effectively empty (zero temperature) bath
with W_S = W_A.  A model applies hard cutoffs: both totals vanish outside
[ω_min, ω_max].

For numerical work the more robust pair is (W_S − W_A, W_S + W_A).  For a
thermal component these are W_A·(coth(βω/2) ∓ 1) = 2 W_A/(e^{±βω} − 1)-type
expressions that stay accurate at βω ≫ 1 where the plain difference
W_S − W_A underflows; all steady-state formulas consume this pair.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericsError, PhysicsWarning
from .quadrature import (integrate_panels, kronrod_nodes_weights,
                         log_refined_edges)

KINDS = ("classical_1f", "superohmic", "flat", "tabulated")
THERMAL_KINDS = ("superohmic", "flat")
#: kinds whose W_A can be nonzero, i.e. genuinely quantum noise sources
QUANTUM_KINDS = ("superohmic", "flat", "tabulated")


def _coth_minus_one(x):
    """coth(x) − 1 = 2/(e^{2x} − 1), accurate for large x."""
    with np.errstate(over="ignore"):
        return 2.0 / np.expm1(2.0 * x)


def _coth_plus_one(x):
    """coth(x) + 1 = 2/(1 − e^{−2x})."""
    return 2.0 / (-np.expm1(-2.0 * x))


@dataclass(frozen=True)
class NoiseComponent:
    """One additive noise source.

    Parameters beyond `kind` and `gamma` apply only to some kinds:
    `s` (spectral exponent) to "superohmic", `beta` (inverse temperature,
    may be inf) to both thermal kinds, `table` to "tabulated".
    """

    kind: str
    gamma: float = 0.0
    s: float | None = None
    beta: float | None = None
    table: tuple | None = None  # (omega, w_s, w_a) arrays, tabulated only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind != "tabulated":
            if self.gamma < 0:
                raise ValueError("noise amplitude gamma must be >= 0")
        if self.kind in THERMAL_KINDS:
            if self.beta is None or not self.beta > 0:
                raise ValueError(f"{self.kind} noise needs beta > 0")
        if self.kind == "superohmic":
            if self.s is None or self.s <= 0:
                raise ValueError("superohmic noise needs exponent s > 0")
            if self.s <= 1:
                warnings.warn(
                    f"spectral exponent s={self.s} is not super-Ohmic (s <= 1)",
                    PhysicsWarning, stacklevel=2)
        if self.kind == "tabulated":
            if self.table is None:
                raise ValueError("tabulated noise needs a (omega, w_s, w_a) table")
            om, ws, wa = (np.asarray(c, dtype=float) for c in self.table)
            if om.ndim != 1 or om.size < 2 or ws.shape != om.shape or wa.shape != om.shape:
                raise ValueError("tabulated noise table must be three equal-length columns")
            if not np.all(np.diff(om) > 0) or om[0] <= 0:
                raise ValueError("tabulated frequencies must be positive and strictly increasing")
            if not np.all(ws >= np.abs(wa)):
                raise ValueError("tabulated table must satisfy W_S >= |W_A|")
            object.__setattr__(self, "table", (om, ws, wa))

    # -- classmethod constructors ------------------------------------------

    @classmethod
    def classical_1f(cls, gamma):
        return cls("classical_1f", gamma=gamma)

    @classmethod
    def superohmic(cls, gamma, s, beta):
        return cls("superohmic", gamma=gamma, s=s, beta=beta)

    @classmethod
    def flat(cls, gamma, beta):
        return cls("flat", gamma=gamma, beta=beta)

    @classmethod
    def tabulated(cls, omega, w_s, w_a):
        return cls("tabulated", table=(omega, w_s, w_a))

    # -- spectral evaluation (no cutoffs; the model applies those) ---------

    def _w_a_raw(self, omega):
        if self.kind == "classical_1f":
            return np.zeros_like(omega)
        if self.kind == "superohmic":
            return self.gamma * omega ** self.s
        if self.kind == "flat":
            return np.full_like(omega, self.gamma)
        return self._interp_column(omega, 2)

    def w_a(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self._w_a_raw(omega)

    def w_s(self, omega):
        omega = np.asarray(omega, dtype=float)
        if self.kind == "classical_1f":
            return self.gamma / omega
        if self.kind in THERMAL_KINDS:
            if np.isinf(self.beta):
                return self._w_a_raw(omega)
            return self._w_a_raw(omega) / np.tanh(self.beta * omega / 2.0)
        return self._interp_column(omega, 1)

    def w_minus(self, omega):
        """W_S − W_A, evaluated without cancellation for thermal kinds."""
        omega = np.asarray(omega, dtype=float)
        if self.kind == "classical_1f":
            return self.gamma / omega
        if self.kind in THERMAL_KINDS:
            if np.isinf(self.beta):
                return np.zeros_like(omega)
            return self._w_a_raw(omega) * _coth_minus_one(self.beta * omega / 2.0)
        return self._interp_column(omega, 1) - self._interp_column(omega, 2)

    def w_plus(self, omega):
        """W_S + W_A."""
        omega = np.asarray(omega, dtype=float)
        if self.kind == "classical_1f":
            return self.gamma / omega
        if self.kind in THERMAL_KINDS:
            if np.isinf(self.beta):
                return 2.0 * self._w_a_raw(omega)
            return self._w_a_raw(omega) * _coth_plus_one(self.beta * omega / 2.0)
        return self._interp_column(omega, 1) + self._interp_column(omega, 2)

    def _interp_column(self, omega, col):
        om, ws, wa = self.table
        y = ws if col == 1 else wa
        # linear in log ω, zero outside the sampled range (hard table edges)
        out = np.interp(np.log(np.maximum(omega, 1e-300)), np.log(om), y)
        return np.where((omega >= om[0]) & (omega <= om[-1]), out, 0.0)

    def kms_check(self, omega):
        """Ratio W_A/W_S for a thermal component; equals tanh(βω/2)."""
        if self.kind not in THERMAL_KINDS:
            raise ValueError(f"KMS ratio is defined only for thermal kinds, not {self.kind!r}")
        omega = np.asarray(omega, dtype=float)
        if np.isinf(self.beta):
            return np.ones_like(omega) if omega.ndim else 1.0
        ratio = np.tanh(self.beta * omega / 2.0)
        return ratio if ratio.ndim else float(ratio)

    @property
    def is_quantum(self):
        return self.kind in QUANTUM_KINDS


@dataclass(frozen=True)
class NoiseModel:
    """Additive combination of noise components with hard frequency cutoffs."""

    components: tuple
    omega_min: float = 0.01
    omega_max: float = 50.0

    def __post_init__(self):
        if not (0 < self.omega_min < self.omega_max):
            raise ValueError("cutoffs must satisfy 0 < omega_min < omega_max")
        object.__setattr__(self, "components", tuple(self.components))

    def _masked_sum(self, omega, attr):
        omega = np.asarray(omega, dtype=float)
        inside = (omega >= self.omega_min) & (omega <= self.omega_max)
        safe = np.where(inside, omega, 1.0)
        total = np.zeros_like(safe)
        for comp in self.components:
            total = total + getattr(comp, attr)(safe)
        return np.where(inside, total, 0.0)

    def total_w_s(self, omega):
        return self._masked_sum(omega, "w_s")

    def total_w_a(self, omega):
        return self._masked_sum(omega, "w_a")

    def total_w_minus(self, omega):
        return self._masked_sum(omega, "w_minus")

    def total_w_plus(self, omega):
        return self._masked_sum(omega, "w_plus")

    def eval_total(self, omega):
        """(W_S^tot, W_A^tot) at ω; both zero outside the cutoffs."""
        scalar = np.isscalar(omega) or np.ndim(omega) == 0
        ws = self.total_w_s(omega)
        wa = self.total_w_a(omega)
        if scalar:
            return float(ws), float(wa)
        return ws, wa

    # -- time domain --------------------------------------------------------

    def _correlation_edges(self, t):
        width = np.pi / (4.0 * max(abs(t), 1.0))
        return log_refined_edges(self.omega_min, self.omega_max, width)

    def correlation_function(self, t, tol=1e-10):
        """Bath correlation C(t) = (1/π)∫ [W_S cos(ωt) − i W_A sin(ωt)] dω.

        Adaptive panel quadrature; the initial panel width shrinks with t so
        the cos/sin oscillations stay resolved.  Raises NumericsError with
        the achieved error estimate if the requested tolerance is missed.
        """
        t = float(t)
        if t < 0:
            raise ValueError("correlation_function expects t >= 0; use C(-t) = C(t)*")
        edges = self._correlation_edges(t)

        def integrand(w):
            return (self.total_w_s(w) * np.cos(w * t)
                    - 1j * self.total_w_a(w) * np.sin(w * t))

        return integrate_panels(integrand, edges, tol=tol * np.pi) / np.pi

    def correlation_magnitude_scan(self, t_grid):
        """|C(t)| on a whole grid, sharing one quadrature node set.

        The node set is built for the largest time, which oversamples every
        smaller one.  One K15 panel per oscillation period keeps the
        quadrature error near 1e-9, far below the thresholds this scan is
        compared against, at a fraction of the single-point evaluation cost.
        """
        t_grid = np.asarray(t_grid, dtype=float)
        if t_grid.size == 0:
            return np.zeros(0)
        width = 2.0 * np.pi / max(t_grid.max(), 1.0)
        edges = log_refined_edges(self.omega_min, self.omega_max, width)
        x, w = kronrod_nodes_weights(edges)
        ws = self.total_w_s(x) * w
        wa = self.total_w_a(x) * w
        steps = np.diff(t_grid)
        uniform = steps.size > 32 and np.allclose(steps, steps[0], rtol=1e-12)
        out = np.empty(t_grid.size)
        if uniform:
            # z_k = e^{-i ω t_k} advanced by a fixed rotation per step;
            # cos(ωt) = Re z and sin(ωt) = −Im z
            z = np.exp(-1j * x * t_grid[0])
            rot = np.exp(-1j * x * steps[0])
            for k in range(t_grid.size):
                out[k] = np.hypot(ws @ z.real, wa @ z.imag) / np.pi
                z *= rot
            return out
        # chunked so the (nodes × times) trig tables stay modest in memory
        chunk = max(1, int(4e7) // max(x.size, 1))
        for i in range(0, t_grid.size, chunk):
            tt = t_grid[i:i + chunk]
            phase = x[:, None] * tt[None, :]
            re = ws @ np.cos(phase)
            im = wa @ np.sin(phase)
            out[i:i + chunk] = np.hypot(re, im) / np.pi
        return out

    def memory_time(self, threshold, step=0.01, horizon=50.0):
        """Smallest grid time beyond which |C(t)| stays below `threshold`.

        Scans t = 0, step, ..., horizon and requires the condition on the
        whole sampled tail.  Raises NumericsError if the correlation never
        settles below the threshold within the horizon.
        """
        if not threshold > 0:
            raise ValueError("threshold must be positive")
        t_grid = np.arange(0.0, horizon + 0.5 * step, step)
        mag = self.correlation_magnitude_scan(t_grid)
        below = mag < threshold
        # suffix condition: tail_ok[i] true iff below[j] for all j >= i
        tail_ok = np.logical_and.accumulate(below[::-1])[::-1]
        if not tail_ok[-1]:
            raise NumericsError(
                f"no memory time found: |C(t)| never stays below {threshold:g} "
                f"within horizon {horizon:g}",
                achieved=float(mag[-1]), requested=float(threshold))
        idx = int(np.argmax(tail_ok))
        return float(t_grid[idx])

    # -- bookkeeping ---------------------------------------------------------

    @property
    def quantum_components(self):
        return tuple(c for c in self.components if c.is_quantum)

    def gamma_by_kind(self, kind):
        return sum(c.gamma for c in self.components if c.kind == kind)
