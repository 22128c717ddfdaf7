"""Number-conserving nonlinear oscillator H = Ω n̂ + χ U(n̂).

Only the ladder of transition frequencies Ω_n = Ω + χ[U(n+1) − U(n)]
enters the weak-coupling dynamics.  The Kerr case U(n) = n(n−1) gives
Ω_n = Ω + 2χn.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import PhysicsError, TruncationWarning

#: hard ceiling for adaptive truncation
N_MAX_CAP = 512


@dataclass(frozen=True)
class OscillatorModel:
    """Oscillator parameters.

    `nonlinearity` is either the string "kerr" or an array U(0..N+1) of
    nonlinearity values; in the tabulated case ladder frequencies exist for
    n up to len(U) − 2.  `n_max` may be left None and chosen adaptively
    later from the steady-state tail.
    """

    omega: float
    chi: float = 0.0
    nonlinearity: object = "kerr"
    n_max: int | None = None

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("oscillator frequency omega must be > 0")
        if self.chi < 0:
            raise ValueError("nonlinearity strength chi must be >= 0")
        if isinstance(self.nonlinearity, str):
            if self.nonlinearity != "kerr":
                raise ValueError(f"unknown nonlinearity {self.nonlinearity!r}")
        else:
            table = np.asarray(self.nonlinearity, dtype=float)
            if table.ndim != 1 or table.size < 2:
                raise ValueError("nonlinearity table needs U(n) for at least n = 0, 1")
            object.__setattr__(self, "nonlinearity", table)
        if self.n_max is not None:
            if self.n_max < 1:
                raise ValueError("n_max must be >= 1")
            if self.table_limit is not None and self.n_max > self.table_limit:
                raise ValueError(
                    f"n_max={self.n_max} exceeds the nonlinearity table "
                    f"(usable up to {self.table_limit})")
            freqs = self.ladder_frequencies(self.n_max)
            if np.any(freqs <= 0):
                bad = int(np.argmax(freqs <= 0))
                raise ValueError(f"ladder frequency at n={bad} is not positive")

    @property
    def is_kerr(self):
        return isinstance(self.nonlinearity, str)

    @property
    def table_limit(self):
        """Largest n with a defined Ω_n, or None if unbounded (Kerr)."""
        if self.is_kerr:
            return None
        return len(self.nonlinearity) - 2

    def energy(self, n):
        """E_n = Ω n + χ U(n)."""
        n = np.asarray(n)
        if self.is_kerr:
            u = n * (n - 1)
        else:
            u = np.asarray(self.nonlinearity)[n]
        return self.omega * n + self.chi * u

    def ladder_frequency(self, n):
        """Transition frequency Ω_n = E_{n+1} − E_n."""
        limit = self.n_max if self.n_max is not None else self.table_limit
        if n < 0 or (limit is not None and n > limit):
            raise ValueError(f"level index n={n} outside [0, {limit}]")
        if self.is_kerr:
            return self.omega + 2.0 * self.chi * n
        u = self.nonlinearity
        return self.omega + self.chi * (u[n + 1] - u[n])

    def ladder_frequencies(self, n_max):
        """Ω_0 .. Ω_{n_max} as an array."""
        n = np.arange(n_max + 1)
        if self.is_kerr:
            return self.omega + 2.0 * self.chi * n
        u = np.asarray(self.nonlinearity)
        if n_max + 1 >= len(u):
            raise ValueError(f"nonlinearity table too short for n_max={n_max}")
        return self.omega + self.chi * (u[n + 1] - u[n])

    @property
    def chi_over_omega(self):
        return self.chi / self.omega


def choose_truncation(model, noise, tail_tol=1e-12, cap=N_MAX_CAP):
    """Smallest n_max whose steady-state weight has dropped below tail_tol.

    Walks the steady-state product formula level by level and stops once
    ρ_n / max_m ρ_m < tail_tol.  Levels whose ladder frequency falls outside
    the noise support terminate the ladder (nothing above is reachable).
    Hitting the cap means the noise keeps heating the oscillator faster than
    it can relax, i.e. no weak-coupling truncation exists.
    """
    if not (0 < tail_tol < 1):
        raise ValueError("tail_tol must be in (0, 1)")
    log_w = 0.0
    log_max = 0.0
    limit = cap if model.table_limit is None else min(cap, model.table_limit)
    for n in range(1, limit + 1):
        freq = model.ladder_frequency(n - 1)
        plus = float(noise.total_w_plus(freq))
        minus = float(noise.total_w_minus(freq))
        if plus <= 0.0:
            warnings.warn(
                f"ladder frequency {freq:g} at n={n - 1} is outside the noise "
                f"support; truncating at n_max={max(n - 1, 1)}",
                TruncationWarning, stacklevel=2)
            return max(n - 1, 1)
        if minus <= 0.0:
            return max(n - 1, 1)  # nothing is pumped above this level
        log_w += np.log(minus) - np.log(plus)
        log_max = max(log_max, log_w)
        if log_w - log_max < np.log(tail_tol):
            return n
    raise PhysicsError(
        f"state too hot for weak-coupling truncation: steady-state tail "
        f"still above {tail_tol:g} at the n_max cap of {limit}")
