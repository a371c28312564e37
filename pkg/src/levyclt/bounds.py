"""The computable upper envelope for the Kolmogorov distance K(t).

K(t) <= P(large jump by time t) + Berry-Esseen term + centering term, with

  P(J_t^c)  = 1 - exp(-t nubar(kappa sqrt(t)))
  B(t)      = 4 c_BE t^(-1/2) sigma_1^(-3) int_(-w,w) |x|^3 nu(dx),  w = kappa sqrt(t)
  C(t)      = |mu_t| / (sigma_1 sqrt(t))

where sigma_1^2 is the variance-per-time of the process truncated at the
unit window kappa.  Each term vanishes as t grows, at rates dictated by the
jump measure's tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .levy_model import mu_t
from .quadrature import TailIntegralRequest, tail_moment

# best published universal Berry-Esseen constant for i.i.d. sums
BE_CONSTANT = 0.4748


@dataclass(frozen=True)
class BoundBreakdown:
    """The three envelope components at time t and their sum."""
    t: float
    p_big_jump: float
    berry_esseen: float
    centering: float
    total: float


def prob_big_jump(model, t):
    """Probability that some jump of magnitude >= kappa sqrt(t) occurs on
    [0, t]: 1 - exp(-t nubar(kappa sqrt(t)))."""
    if not t >= 1.0:
        raise ValueError("t must be at least 1")
    return -math.expm1(-big_jump_rate(model, t))


def big_jump_rate(model, t):
    """The linear upper bound t nubar(kappa sqrt(t)) >= prob_big_jump."""
    if not t >= 1.0:
        raise ValueError("t must be at least 1")
    return t * float(model.measure.tail_mass(model.kappa * math.sqrt(t)))


def berry_esseen_term(model, t, c_be=BE_CONSTANT):
    """4 c_BE t^(-1/2) sigma_1^(-3) times the truncated third absolute moment.

    Infinite when the unit-window variance sigma_1^2 vanishes (a valid but
    useless bound; fleet models keep sigma_1 > 0).
    """
    if not t >= 1.0:
        raise ValueError("t must be at least 1")
    w = model.kappa * math.sqrt(t)
    third = tail_moment(TailIntegralRequest(3, w, outside=False), model)
    if third == 0.0:
        return 0.0
    if model.sigma1_sq <= 0.0:
        return math.inf
    return 4.0 * c_be * third / (math.sqrt(t) * model.sigma1_sq ** 1.5)


def centering_term(model, t):
    """|mu_t| / (sigma_1 sqrt(t)): the shift cost of removing asymmetric
    large jumps from a mean-zero process."""
    if not t >= 1.0:
        raise ValueError("t must be at least 1")
    m = abs(mu_t(model, t))
    if m == 0.0:
        return 0.0
    if model.sigma1_sq <= 0.0:
        return math.inf
    return m / (math.sqrt(model.sigma1_sq) * math.sqrt(t))


def total_bound(model, t, c_be=BE_CONSTANT):
    """Assemble the three components; their sum dominates the true K(t)."""
    p = prob_big_jump(model, t)
    b = berry_esseen_term(model, t, c_be)
    c = centering_term(model, t)
    return BoundBreakdown(t=float(t), p_big_jump=p, berry_esseen=b,
                          centering=c, total=p + b + c)
