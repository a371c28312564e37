"""Mean-zero, finite-variance Levy process models.

A model is a generating triplet (gaussian variance, jump measure, drift)
relative to the cutoff 1_{|x|<1}, with the drift always chosen so that the
process has zero mean.  Each jump-measure family exposes its tail function,
truncated moments and a jump sampler; quantities without elementary
antiderivatives are reduced to well-conditioned one-dimensional integrals
evaluated at construction time.
"""

from __future__ import annotations

import abc
import enum
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (DegenerateModel, DivergentRequest, InfiniteVariance,
                     InvalidParameter, MalformedDocument, UnsupportedMeasure)
from .quadrature import adaptive_quad

_E = math.e

# Gauss-Laguerre rule for integrals of the form int_0^inf e^{-aq} g(q) dq;
# 60 nodes give ~1e-10 relative accuracy for the smooth tails used here.
_LAG_V, _LAG_W = np.polynomial.laguerre.laggauss(60)


def _exp_power_integral(a, s, gamma):
    """int_0^inf e^{-a q} (s + q)^{-gamma} dq for s >= 1, vectorized in s."""
    s_arr = np.asarray(s, dtype=float)
    vals = ((s_arr[..., None] + _LAG_V / a) ** (-gamma)) @ _LAG_W / a
    return float(vals) if s_arr.ndim == 0 else vals


class MomentStatus(enum.Enum):
    FINITE = "finite"
    INFINITE = "infinite"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class MomentVerdict:
    """Finiteness classification of the x^2 log|x| tail moment; ``value`` is
    set only when a closed form exists."""
    status: MomentStatus
    value: float | None = None


# ---------------------------------------------------------------------------
# one-sided building blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _PowerSide:
    """Density c |x|^(-(p+1)) on sgn * [s, inf)."""
    c: float
    p: float
    s: float
    sgn: int

    def mass(self):
        return self.c / self.p * self.s ** -self.p

    def tail(self, w):
        return self.c / self.p * np.maximum(w, self.s) ** -self.p

    def mom_out(self, w, k):
        # magnitude moment over the side's tail beyond w; requires k < p
        m = max(w, self.s)
        return self.c * m ** (k - self.p) / (self.p - k)

    def mom_in(self, w, k):
        if w <= self.s:
            return 0.0
        if k == self.p:
            return self.c * math.log(w / self.s)
        return self.c * (self.s ** (k - self.p) - w ** (k - self.p)) / (self.p - k)

    def log_moment(self):
        # int_{|x| >= 1} x^2 log|x| over this side, finite for p > 2
        lo = max(self.s, 1.0)
        d = self.p - 2.0
        return self.c * lo ** -d * (math.log(lo) / d + 1.0 / d ** 2)

    def density_mag(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        m = r >= self.s
        out[m] = self.c * r[m] ** -(self.p + 1.0)
        return out

    def sample_mag(self, rng, size):
        u = rng.random(size)
        if self.p == 3.0:
            return self.s / np.cbrt(u)
        return self.s * u ** (-1.0 / self.p)


@dataclass(frozen=True)
class _ExpSide:
    """Density a e^{-|x|/eta} / eta on sgn * (0, inf)."""
    a: float
    eta: float
    sgn: int

    def mass(self):
        return self.a

    def tail(self, w):
        return self.a * np.exp(-np.asarray(w, dtype=float) / self.eta)

    def _upper(self, z, k):
        # int_z^inf y^k e^{-y} dy = k! e^{-z} sum_{j<=k} z^j / j!
        acc, term = 1.0, 1.0
        for j in range(1, k + 1):
            term *= z / j
            acc += term
        return math.factorial(k) * math.exp(-z) * acc

    def mom_out(self, w, k):
        return self.a * self.eta ** k * self._upper(w / self.eta, k)

    def mom_in(self, w, k):
        return self.a * self.eta ** k * (math.factorial(k) - self._upper(w / self.eta, k))

    def density_mag(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        m = r > 0
        out[m] = self.a / self.eta * np.exp(-r[m] / self.eta)
        return out

    def sample_mag(self, rng, size):
        return self.eta * rng.standard_exponential(size)


# ---------------------------------------------------------------------------
# measure families
# ---------------------------------------------------------------------------

class MeasureSpec(abc.ABC):
    """A jump measure with computable tail functionals and a jump sampler."""

    family: str
    slow_log_tail: bool = False

    @abc.abstractmethod
    def to_params(self) -> dict: ...

    @abc.abstractmethod
    def density(self, x): ...

    @abc.abstractmethod
    def support_radius(self) -> float: ...

    @abc.abstractmethod
    def radial_breakpoints(self) -> list: ...

    @abc.abstractmethod
    def mass(self) -> float: ...

    @abc.abstractmethod
    def tail_mass(self, w): ...

    @abc.abstractmethod
    def outside_moment_finite(self, k: int) -> bool: ...

    @abc.abstractmethod
    def moment_outside(self, w: float, k: int, signed: bool = False) -> float: ...

    @abc.abstractmethod
    def moment_inside(self, w: float, k: int, signed: bool = False) -> float: ...

    @abc.abstractmethod
    def x2_total(self) -> float: ...

    @abc.abstractmethod
    def x1_total(self) -> float: ...

    @abc.abstractmethod
    def log_moment(self) -> MomentVerdict: ...

    @abc.abstractmethod
    def scaled_x2_tail_log(self, s): ...

    def sample_jumps(self, rng, size: int):
        raise UnsupportedMeasure(
            f"family '{self.family}' does not provide a jump sampler")


class _SidedMeasure(MeasureSpec):
    """Shared machinery for measures assembled from one-sided components."""

    def _sides(self):
        raise NotImplementedError

    def density(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.zeros_like(x)
        for side in self._sides():
            if side.sgn > 0:
                m = x > 0
                out[m] += side.density_mag(x[m])
            else:
                m = x < 0
                out[m] += side.density_mag(-x[m])
        return float(out[0]) if scalar else out

    def support_radius(self):
        return min(getattr(s, "s", 0.0) for s in self._sides())

    def radial_breakpoints(self):
        return sorted({s.s for s in self._sides() if isinstance(s, _PowerSide)})

    def mass(self):
        return sum(s.mass() for s in self._sides())

    def tail_mass(self, w):
        w = np.asarray(w, dtype=float)
        total = sum(s.tail(w) for s in self._sides())
        return float(total) if w.ndim == 0 else total

    def outside_moment_finite(self, k):
        return all(not isinstance(s, _PowerSide) or k < s.p for s in self._sides())

    def moment_outside(self, w, k, signed=False):
        total = 0.0
        for s in self._sides():
            sign = s.sgn ** k if signed else 1
            total += sign * s.mom_out(w, k)
        return total

    def moment_inside(self, w, k, signed=False):
        total = 0.0
        for s in self._sides():
            sign = s.sgn ** k if signed else 1
            total += sign * s.mom_in(w, k)
        return total

    def x2_total(self):
        # mom_out(0, k) covers the full side for both component kinds
        return sum(s.mom_out(0.0, 2) for s in self._sides())

    def x1_total(self):
        return sum(s.sgn * s.mom_out(0.0, 1) for s in self._sides())

    def scaled_x2_tail_log(self, s):
        # e^{2s} nubar(e^s); each side handled in the exponent to stay finite
        s = np.asarray(s, dtype=float)
        scalar = s.ndim == 0
        s = np.atleast_1d(s)
        total = np.zeros_like(s)
        for side in self._sides():
            if isinstance(side, _PowerSide):
                below = s < math.log(side.s)
                # the below-cut branch is only selected for small s; clip so
                # the discarded branch cannot overflow
                cut_part = np.exp(2.0 * np.minimum(s, 350.0)) * \
                    (side.c / side.p * side.s ** -side.p)
                tail_part = side.c / side.p * np.exp((2.0 - side.p) * s)
                total += np.where(below, cut_part, tail_part)
            else:
                expo = 2.0 * s - np.exp(np.minimum(s, 700.0)) / side.eta
                total += side.a * np.exp(expo)
        return float(total[0]) if scalar else total


class ZeroMeasure(MeasureSpec):
    """No jumps at all."""

    family = "Zero"

    def to_params(self):
        return {}

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return 0.0 if x.ndim == 0 else np.zeros_like(x)

    def support_radius(self):
        return math.inf

    def radial_breakpoints(self):
        return []

    def mass(self):
        return 0.0

    def tail_mass(self, w):
        w = np.asarray(w, dtype=float)
        return 0.0 if w.ndim == 0 else np.zeros_like(w)

    def outside_moment_finite(self, k):
        return True

    def moment_outside(self, w, k, signed=False):
        return 0.0

    def moment_inside(self, w, k, signed=False):
        return 0.0

    def x2_total(self):
        return 0.0

    def x1_total(self):
        return 0.0

    def log_moment(self):
        return MomentVerdict(MomentStatus.FINITE, 0.0)

    def scaled_x2_tail_log(self, s):
        s = np.asarray(s, dtype=float)
        return 0.0 if s.ndim == 0 else np.zeros_like(s)

    def sample_jumps(self, rng, size):
        return np.zeros(size)


class PowerTail(_SidedMeasure):
    """Density amplitude * |x|^(-(index+1)) beyond the cut, on the chosen side(s).

    index > 2 keeps the variance finite; the symmetric variant mirrors the
    one-sided density onto both half-lines.
    """

    family = "PowerTail"

    def __init__(self, amplitude, index, cut, side="positive"):
        if amplitude <= 0:
            raise InvalidParameter("PowerTail amplitude must be positive")
        if cut <= 0:
            raise InvalidParameter("PowerTail cut must be positive")
        if index <= 2:
            raise InfiniteVariance(
                f"PowerTail index must exceed 2 (got {index}); the x^2 tail "
                "integral diverges otherwise")
        if side not in ("positive", "negative", "symmetric"):
            raise InvalidParameter(f"unknown side {side!r}")
        self.amplitude = float(amplitude)
        self.index = float(index)
        self.cut = float(cut)
        self.side = side
        sides = []
        if side in ("positive", "symmetric"):
            sides.append(_PowerSide(self.amplitude, self.index, self.cut, +1))
        if side in ("negative", "symmetric"):
            sides.append(_PowerSide(self.amplitude, self.index, self.cut, -1))
        self._side_list = sides

    def _sides(self):
        return self._side_list

    def to_params(self):
        return {"amplitude": self.amplitude, "index": self.index,
                "cut": self.cut, "side": self.side}

    def log_moment(self):
        return MomentVerdict(MomentStatus.FINITE,
                             sum(s.log_moment() for s in self._side_list))

    def sample_jumps(self, rng, size):
        mags = self._side_list[0].sample_mag(rng, size)
        if self.side == "positive":
            return mags
        if self.side == "negative":
            return -mags
        signs = np.where(rng.random(size) < 0.5, 1.0, -1.0)
        return signs * mags


class CompoundPoissonParametric(_SidedMeasure):
    """Two-sided exponential jumps: rate * (prob_pos Exp(eta_pos) on x > 0,
    (1 - prob_pos) Exp(eta_neg) mirrored on x < 0)."""

    family = "CompoundPoissonParametric"

    def __init__(self, rate, eta_pos, eta_neg, prob_pos=0.5):
        if rate <= 0:
            raise InvalidParameter("rate must be positive")
        if eta_pos <= 0 or eta_neg <= 0:
            raise InvalidParameter("jump scales must be positive")
        if not 0.0 <= prob_pos <= 1.0:
            raise InvalidParameter("prob_pos must lie in [0, 1]")
        self.rate = float(rate)
        self.eta_pos = float(eta_pos)
        self.eta_neg = float(eta_neg)
        self.prob_pos = float(prob_pos)
        sides = []
        if prob_pos > 0:
            sides.append(_ExpSide(self.rate * self.prob_pos, self.eta_pos, +1))
        if prob_pos < 1:
            sides.append(_ExpSide(self.rate * (1.0 - self.prob_pos),
                                  self.eta_neg, -1))
        self._side_list = sides

    def _sides(self):
        return self._side_list

    def to_params(self):
        return {"rate": self.rate, "eta_pos": self.eta_pos,
                "eta_neg": self.eta_neg, "prob_pos": self.prob_pos}

    def log_moment(self):
        # finite (exponential tails dominate any logarithm); no closed form
        return MomentVerdict(MomentStatus.FINITE, None)

    def sample_jumps(self, rng, size):
        u = rng.random(size)
        mags = rng.standard_exponential(size)
        return np.where(u < self.prob_pos, self.eta_pos * mags,
                        -self.eta_neg * mags)


class TwoSidedMixture(_SidedMeasure):
    """Independent power tails on each side, allowing asymmetric heavy tails."""

    family = "TwoSidedMixture"

    def __init__(self, pos, neg):
        self._pos_params = self._check(pos, "pos")
        self._neg_params = self._check(neg, "neg")
        self._side_list = [
            _PowerSide(*self._pos_params, +1),
            _PowerSide(*self._neg_params, -1),
        ]

    @staticmethod
    def _check(params, name):
        c, p, s = (float(params["amplitude"]), float(params["index"]),
                   float(params["cut"]))
        if c <= 0 or s <= 0:
            raise InvalidParameter(f"{name} amplitude and cut must be positive")
        if p <= 2:
            raise InfiniteVariance(f"{name} index must exceed 2 (got {p})")
        return c, p, s

    def _sides(self):
        return self._side_list

    def to_params(self):
        keys = ("amplitude", "index", "cut")
        return {"pos": dict(zip(keys, self._pos_params)),
                "neg": dict(zip(keys, self._neg_params))}

    def log_moment(self):
        return MomentVerdict(MomentStatus.FINITE,
                             sum(s.log_moment() for s in self._side_list))

    def sample_jumps(self, rng, size):
        pos, neg = self._side_list
        total = pos.mass() + neg.mass()
        take_pos = rng.random(size) < pos.mass() / total
        u = rng.random(size)
        out = np.empty(size)
        out[take_pos] = pos.s * u[take_pos] ** (-1.0 / pos.p)
        out[~take_pos] = -neg.s * u[~take_pos] ** (-1.0 / neg.p)
        return out


class LogPerturbedPowerTail(MeasureSpec):
    """Density amplitude * x^-3 (log x)^(-gamma) on x >= e.

    The x^2 tail decays like (log w)^(1-gamma), so its mass extends to
    doubly-exponential scales; all tail functionals are therefore reduced to
    integrals over s = log x, which stay inside float range.
    """

    family = "LogPerturbedPowerTail"
    slow_log_tail = True

    def __init__(self, gamma, amplitude=1.0):
        if amplitude <= 0:
            raise InvalidParameter("amplitude must be positive")
        if gamma <= 1:
            raise InfiniteVariance(
                f"gamma must exceed 1 (got {gamma}); the x^2 integral "
                "diverges otherwise")
        self.gamma = float(gamma)
        self.amplitude = float(amplitude)
        # total intensity c int_1^inf e^{-2s} s^-gamma ds and the matching
        # first moment, both via the scaled Laguerre reduction
        self._mass = self.amplitude * math.exp(-2.0) * \
            _exp_power_integral(2.0, 1.0, self.gamma)
        self._m1 = self.amplitude * math.exp(-1.0) * \
            _exp_power_integral(1.0, 1.0, self.gamma)

    def to_params(self):
        return {"gamma": self.gamma, "amplitude": self.amplitude}

    def density(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.zeros_like(x)
        m = x >= _E
        out[m] = self.amplitude * x[m] ** -3.0 * np.log(x[m]) ** -self.gamma
        return float(out[0]) if scalar else out

    def support_radius(self):
        return _E

    def radial_breakpoints(self):
        return [_E]

    def mass(self):
        return self._mass

    def tail_mass(self, w):
        w = np.asarray(w, dtype=float)
        s = np.log(np.maximum(w, _E))
        val = self.amplitude * np.exp(-2.0 * s) * \
            _exp_power_integral(2.0, s, self.gamma)
        return float(val) if w.ndim == 0 else val

    def outside_moment_finite(self, k):
        return k <= 2

    def _inside_integral(self, w, k):
        if w <= _E:
            return 0.0
        g = self.gamma

        def f(r):
            return np.exp((k - 2.0) * r) * r ** -g

        return self.amplitude * adaptive_quad(f, 1.0, math.log(w))

    def moment_outside(self, w, k, signed=False):
        # support is positive, so signed and unsigned moments coincide
        s = math.log(max(w, _E))
        if k == 2:
            return self.amplitude * s ** (1.0 - self.gamma) / (self.gamma - 1.0)
        if k == 1:
            return self.amplitude * math.exp(-s) * \
                _exp_power_integral(1.0, s, self.gamma)
        if k == 0:
            return float(self.tail_mass(w))
        raise DivergentRequest(f"|x|^{k} tail integral diverges for "
                               "LogPerturbedPowerTail")

    def moment_inside(self, w, k, signed=False):
        if k == 2:
            full = self.x2_total()
            return full - self.moment_outside(w, 2) if w > _E else 0.0
        return self._inside_integral(w, k)

    def x2_total(self):
        return self.amplitude / (self.gamma - 1.0)

    def x1_total(self):
        return self._m1

    def log_moment(self):
        if self.gamma > 2.0:
            return MomentVerdict(MomentStatus.FINITE,
                                 self.amplitude / (self.gamma - 2.0))
        return MomentVerdict(MomentStatus.INFINITE)

    def scaled_x2_tail_log(self, s):
        s = np.asarray(s, dtype=float)
        low = s < 1.0
        base = self.amplitude * _exp_power_integral(2.0, np.maximum(s, 1.0),
                                                    self.gamma)
        out = np.where(low, np.exp(2.0 * np.minimum(s, 1.0)) * self._mass, base)
        return float(out) if s.ndim == 0 else out

    def sample_jumps(self, rng, size):
        # rejection from the p = 2 power envelope on [e, inf):
        # envelope magnitude law e U^{-1/2}, acceptance (log x)^(-gamma) <= 1
        out = np.empty(size)
        have = 0
        # 2 e^2 mass / amplitude is the acceptance rate; pad draws accordingly
        rate = 2.0 * math.exp(2.0) * self._mass / self.amplitude
        while have < size:
            need = size - have
            m = int(need / rate * 1.2) + 16
            x = _E / np.sqrt(rng.random(m))
            keep = rng.random(m) <= np.log(x) ** -self.gamma
            got = x[keep][:need]
            out[have:have + got.size] = got
            have += got.size
        return out


_FAMILIES = {
    "Zero": ZeroMeasure,
    "PowerTail": PowerTail,
    "CompoundPoissonParametric": CompoundPoissonParametric,
    "LogPerturbedPowerTail": LogPerturbedPowerTail,
    "TwoSidedMixture": TwoSidedMixture,
}


# ---------------------------------------------------------------------------
# the model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevyModel:
    """Immutable generating triplet with the truncation radius unit kappa.

    ``drift`` and ``kappa`` are derived quantities; use build_model rather
    than constructing directly.
    """
    gaussian_var: float
    measure: MeasureSpec
    drift: float
    kappa: int

    @cached_property
    def sigma2(self):
        return self.gaussian_var + self.measure.x2_total()

    @cached_property
    def sigma1_sq(self):
        # gaussian part plus jump variance inside the unit truncation window
        return self.gaussian_var + self.measure.moment_inside(float(self.kappa), 2)

    @cached_property
    def jump_mass(self):
        return self.measure.mass()

    @cached_property
    def jump_mean(self):
        return self.measure.x1_total()


def build_model(gaussian_var, measure):
    """Validate and assemble a mean-zero model.

    The drift is fixed to cancel the large-jump mean, making E[X_1] = 0
    unrepresentable to violate.  kappa is the smallest power of two that is
    at least the support radius of the jump measure (1 when there are no
    jumps), so every window (-w, w) with w > kappa carries jump mass.
    """
    gaussian_var = float(gaussian_var)
    if not gaussian_var >= 0.0:
        raise InvalidParameter("gaussian_var must be nonnegative")
    if not isinstance(measure, MeasureSpec):
        raise InvalidParameter("measure must be a MeasureSpec")
    sigma2 = gaussian_var + measure.x2_total()
    if not sigma2 > 0.0:
        raise DegenerateModel(
            "degenerate model: zero gaussian variance and no jump variance")
    if measure.mass() == 0.0 and measure.x2_total() == 0.0:
        kappa = 1
    else:
        kappa = 1
        radius = measure.support_radius()
        while kappa < radius:
            kappa *= 2
    drift = -measure.moment_outside(1.0, 1, signed=True)
    return LevyModel(gaussian_var=gaussian_var, measure=measure,
                     drift=float(drift), kappa=kappa)


def total_variance(model):
    """sigma^2 = gaussian variance + int x^2 nu(dx)."""
    return model.sigma2


def sigma_t(model, t):
    """Effective standard deviation after removing jumps of magnitude
    >= kappa sqrt(t): sigma_t^2 = sigma^2 - int_{|x| >= kappa sqrt(t)} x^2 nu."""
    if not t >= 1.0:
        raise ValueError("t must be at least 1")
    tail = model.measure.moment_outside(model.kappa * math.sqrt(t), 2)
    return math.sqrt(max(model.sigma2 - tail, 0.0))


def mu_t(model, t):
    """Mean of the truncated endpoint: -t int_{|x| >= kappa sqrt(t)} x nu(dx)."""
    if not t >= 1.0:
        raise ValueError("t must be at least 1")
    return -t * model.measure.moment_outside(model.kappa * math.sqrt(t), 1,
                                             signed=True)


def log_moment_finite(model):
    """Classify the x^2 log|x| moment of the jump measure over |x| >= 1."""
    return model.measure.log_moment()


# ---------------------------------------------------------------------------
# JSON ingestion
# ---------------------------------------------------------------------------

def _require_number(doc, key):
    v = doc.get(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise MalformedDocument(f"field '{key}' must be a number")
    return float(v)


def measure_from_dict(doc):
    if not isinstance(doc, dict):
        raise MalformedDocument("'measure' must be an object")
    unknown = set(doc) - {"family", "params"}
    if unknown:
        raise MalformedDocument(f"unknown measure keys: {sorted(unknown)}")
    family = doc.get("family")
    if family not in _FAMILIES:
        raise MalformedDocument(
            f"unknown family {family!r}; expected one of {sorted(_FAMILIES)}")
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise MalformedDocument("'params' must be an object")
    cls = _FAMILIES[family]
    try:
        return cls(**params)
    except TypeError as exc:
        raise MalformedDocument(f"bad parameters for {family}: {exc}") from None


def model_from_dict(doc):
    """Build a model from {"gaussian_var": number, "measure": {...}}.

    The truncation radius and drift are always computed, never read."""
    if not isinstance(doc, dict):
        raise MalformedDocument("model document must be a JSON object")
    unknown = set(doc) - {"gaussian_var", "measure"}
    if unknown:
        raise MalformedDocument(f"unknown model keys: {sorted(unknown)}")
    if "measure" not in doc:
        raise MalformedDocument("missing 'measure'")
    gaussian_var = _require_number(doc, "gaussian_var")
    measure = measure_from_dict(doc["measure"])
    return build_model(gaussian_var, measure)


def model_from_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from None
    return model_from_dict(doc)


def model_to_dict(model):
    return {
        "gaussian_var": model.gaussian_var,
        "measure": {"family": model.measure.family,
                    "params": model.measure.to_params()},
    }
