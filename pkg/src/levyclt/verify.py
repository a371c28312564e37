"""Grid scans over t and the integrability diagnostics built on them.

A scan draws endpoints at log-spaced times, estimates the Kolmogorov
distance of X_t / sqrt(t) against both Gaussian normalizations (the
truncation-adjusted scale sigma_t and the full scale sigma), evaluates the
closed-form envelope at each time, and accumulates the decay integrals
int K(t) dt/t by the trapezoid rule in log t, with DKW slack propagated the
same way.

The sigma-deficit functional ties the two normalizations together:

  int_1^T (sigma^2 - sigma_t^2) dt/t
      = int_{|x| >= kappa} x^2 log(min(x^2, T kappa^2) / kappa^2) nu(dx)

exactly for every horizon T, by switching the order of integration.  Its
T -> inf limit is finite precisely when the x^2 log|x| tail moment is, which
is what the regime classifier reports.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import total_bound
from .distance import DistanceEstimate, ks_against_normal
from .levy_model import (MomentStatus, model_to_dict, sigma_t as sigma_t_of,
                         total_variance)
from .quadrature import adaptive_quad
from .sampler import SimPlan, sample_endpoint


@dataclass(frozen=True)
class ScanGrid:
    """Log-spaced evaluation times in [t_min, t_max], t_min >= 1."""
    t_min: float = 1.0
    t_max: float = 1e6
    points: int = 50

    def __post_init__(self):
        if not self.t_min >= 1.0:
            raise ValueError("t_min must be at least 1")
        if not self.t_max > self.t_min:
            raise ValueError("t_max must exceed t_min")
        if self.points < 2:
            raise ValueError("need at least 2 grid points")

    def values(self):
        return np.geomspace(self.t_min, self.t_max, self.points)


@dataclass(frozen=True)
class ScanConfig:
    """Sampling configuration shared by every grid point."""
    n: int = 100_000
    seed: int = 0
    alpha: float = 0.01
    chunk: int = 1 << 14
    workers: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")


@dataclass(frozen=True)
class ScanRow:
    t: float
    ks_sigma_t: DistanceEstimate
    ks_sigma: DistanceEstimate
    bound: object


@dataclass
class ScanReport:
    """Per-t rows plus running decay integrals (trapezoid in log t)."""
    model_doc: dict
    grid: ScanGrid
    config: ScanConfig
    rows: list = field(default_factory=list)
    integral_sigma_t: np.ndarray = None
    integral_sigma: np.ndarray = None
    integral_slack: np.ndarray = None

    CSV_HEADER = ("t,ks_sigma_t,slack,ks_sigma,p_big_jump,berry_esseen,"
                  "centering,bound_total,integral_sigma_t,integral_sigma")

    def csv_text(self):
        def g(v):
            return f"{v:.17g}"

        lines = [self.CSV_HEADER]
        for i, row in enumerate(self.rows):
            b = row.bound
            lines.append(",".join([
                g(row.t), g(row.ks_sigma_t.value), g(row.ks_sigma_t.dkw_slack),
                g(row.ks_sigma.value), g(b.p_big_jump), g(b.berry_esseen),
                g(b.centering), g(b.total), g(self.integral_sigma_t[i]),
                g(self.integral_sigma[i]),
            ]))
        return "\n".join(lines) + "\n"

    def json_dict(self):
        return {
            "model": self.model_doc,
            "grid": {"t_min": self.grid.t_min, "t_max": self.grid.t_max,
                     "points": self.grid.points},
            "config": {"n": self.config.n, "seed": self.config.seed,
                       "alpha": self.config.alpha, "chunk": self.config.chunk},
            "rows": [
                {
                    "t": row.t,
                    "ks_sigma_t": row.ks_sigma_t.value,
                    "ks_sigma": row.ks_sigma.value,
                    "slack": row.ks_sigma_t.dkw_slack,
                    "p_big_jump": row.bound.p_big_jump,
                    "berry_esseen": row.bound.berry_esseen,
                    "centering": row.bound.centering,
                    "bound_total": row.bound.total,
                    "integral_sigma_t": float(self.integral_sigma_t[i]),
                    "integral_sigma": float(self.integral_sigma[i]),
                    "integral_slack": float(self.integral_slack[i]),
                }
                for i, row in enumerate(self.rows)
            ],
            "decay": {
                "sigma_t": {"estimate": float(self.integral_sigma_t[-1]),
                            "slack": float(self.integral_slack[-1])},
                "sigma": {"estimate": float(self.integral_sigma[-1]),
                          "slack": float(self.integral_slack[-1])},
            },
        }

    def json_text(self):
        return json.dumps(self.json_dict(), indent=2) + "\n"


def _point_seed(seed, index):
    # stable per-point derivation; chunk streams then key off (this, chunk)
    return int(np.random.SeedSequence((seed, index)).generate_state(
        1, np.uint64)[0])


def _running_trapezoid(u, y):
    out = np.zeros_like(y)
    if len(y) > 1:
        steps = 0.5 * (y[1:] + y[:-1]) * np.diff(u)
        out[1:] = np.cumsum(steps)
    return out


def scan(model, grid=None, config=None):
    """Estimate distances, evaluate bounds and accumulate decay integrals on
    the grid.  Deterministic for fixed (model, grid, config)."""
    grid = grid or ScanGrid()
    config = config or ScanConfig()
    sigma = math.sqrt(total_variance(model))
    ts = grid.values()
    rows = []
    for i, t in enumerate(ts):
        plan = SimPlan(t=float(t), n=config.n, seed=_point_seed(config.seed, i),
                       chunk=config.chunk)
        normalized = sample_endpoint(model, plan, workers=config.workers)
        normalized /= math.sqrt(t)
        ks_t = ks_against_normal(normalized, sigma_t_of(model, t), config.alpha)
        ks_s = ks_against_normal(normalized, sigma, config.alpha)
        rows.append(ScanRow(t=float(t), ks_sigma_t=ks_t, ks_sigma=ks_s,
                            bound=total_bound(model, t)))

    u = np.log(ts)
    report = ScanReport(model_doc=model_to_dict(model), grid=grid,
                        config=config, rows=rows)
    report.integral_sigma_t = _running_trapezoid(
        u, np.array([r.ks_sigma_t.value for r in rows]))
    report.integral_sigma = _running_trapezoid(
        u, np.array([r.ks_sigma.value for r in rows]))
    report.integral_slack = _running_trapezoid(
        u, np.array([r.ks_sigma_t.dkw_slack for r in rows]))
    return report


@dataclass(frozen=True)
class DecayEstimate:
    estimate: float
    slack: float


def decay_integral(report, normalization="sigma_t"):
    """Trapezoid value of int K_hat(t) dt/t over the scanned grid, with the
    DKW slack integrated identically."""
    if not report.rows:
        raise ValueError("empty report")
    if normalization == "sigma_t":
        est = report.integral_sigma_t[-1]
    elif normalization == "sigma":
        est = report.integral_sigma[-1]
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return DecayEstimate(estimate=float(est),
                         slack=float(report.integral_slack[-1]))


@dataclass(frozen=True)
class SigmaDeficit:
    """Both sides of the finite-horizon deficit identity; they agree up to
    quadrature tolerance."""
    lhs: float
    rhs: float
    horizon: float


def sigma_deficit_integral(model, T):
    """Evaluate int_1^T (sigma^2 - sigma_t^2) dt/t and its closed Fubini form
    independently (time-side versus jump-side quadrature)."""
    if not T >= 1.0:
        raise ValueError("T must be at least 1")
    measure = model.measure
    kappa = float(model.kappa)
    L = math.log(T)
    if L == 0.0:
        return SigmaDeficit(lhs=0.0, rhs=0.0, horizon=float(T))

    # time side: the x^2 tail beyond kappa e^{u/2}, u = log t
    def integrand(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        return np.array([measure.moment_outside(kappa * math.exp(ui / 2.0), 2)
                         for ui in u])

    breaks = [2.0 * math.log(r / kappa) for r in measure.radial_breakpoints()
              if kappa < r < kappa * math.sqrt(T)]
    lhs = adaptive_quad(integrand, 0.0, L, breakpoints=breaks)

    # jump side: x^2 log(min(x^2, T kappa^2)/kappa^2) against the density,
    # which is x^2 * 2 log(|x|/kappa) below the horizon radius and saturates
    # at x^2 log(T) beyond it (closed tail moment)
    cap = kappa * math.sqrt(T)
    dens = measure.density

    def head(r):
        return r * r * 2.0 * np.log(r / kappa) * (dens(r) + dens(-r))

    r_breaks = [r for r in measure.radial_breakpoints() if kappa < r < cap]
    rhs = adaptive_quad(head, kappa, cap, breakpoints=r_breaks)
    rhs += L * measure.moment_outside(cap, 2)
    return SigmaDeficit(lhs=float(lhs), rhs=float(rhs), horizon=float(T))


class Regime(enum.Enum):
    BOTH_INTEGRALS_FINITE = "BothIntegralsFinite"
    ONLY_SIGMA_T_FINITE = "OnlySigmaTFinite"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class RegimeCall:
    condition: object
    prediction: Regime


def classify_regime(model):
    """Map the x^2 log|x| moment verdict to the integrability prediction:
    a finite log moment means the full-scale normalization is also
    integrable in dt/t; an infinite one means only the truncation-adjusted
    normalization is."""
    verdict = model.measure.log_moment()
    if verdict.status is MomentStatus.FINITE:
        pred = Regime.BOTH_INTEGRALS_FINITE
    elif verdict.status is MomentStatus.INFINITE:
        pred = Regime.ONLY_SIGMA_T_FINITE
    else:
        pred = Regime.UNKNOWN
    return RegimeCall(condition=verdict, prediction=pred)
