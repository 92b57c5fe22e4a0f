"""Model ingredients: particle motion, branching rate, offspring law, spine weight.

A model bundles four pluggable pieces:

* a motion (``NoMotion``, ``TwoStateChain``, ``BrownianMotion``),
* a branching rate (``ConstantRate`` or a per-state ``StateRate`` table),
* an offspring law (a pmf on {0, 1, 2, ...} with finite mean),
* a spine weight (``UnitWeight`` or a ``GirsanovWeight`` exponential tilt),
  paired with the motion law the marked line of descent follows under the
  tilted simulation measure.

State points are plain values: ``None`` motion has no state (we store 0),
chain states are integers in {0, ..., K-1}, diffusion positions are floats.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import InvalidModel, ModelWarning, PathDomainError

# Offspring pmfs are truncated here; tail mass beyond the cap must be
# negligible or the law is rejected.
PMF_TRUNCATION = 200
PMF_TAIL_TOL = 1e-14


@dataclass(frozen=True)
class NoMotion:
    """Single-point state space; particles carry no position."""

    kind: str = field(default="none", init=False)


@dataclass(frozen=True)
class TwoStateChain:
    """Continuous-time chain on {0, 1} with flip rates q01 (0->1) and q10 (1->0)."""

    q01: float
    q10: float
    start: int = 0
    kind: str = field(default="two_state_chain", init=False)

    def flip_rate(self, state):
        return np.where(np.asarray(state) == 0, self.q01, self.q10)

    def stationary(self) -> np.ndarray:
        total = self.q01 + self.q10
        return np.array([self.q10 / total, self.q01 / total])


@dataclass(frozen=True)
class BrownianMotion:
    """Driftless Brownian motion with diffusivity sigma; paths stored on a step-h grid."""

    sigma: float
    step: float = 0.01
    start: float = 0.0
    kind: str = field(default="brownian", init=False)


MotionModel = Union[NoMotion, TwoStateChain, BrownianMotion]


@dataclass(frozen=True)
class ConstantRate:
    beta: float
    kind: str = field(default="constant", init=False)

    @property
    def r_max(self) -> float:
        return self.beta

    def value(self, state):
        return np.full_like(np.asarray(state, dtype=float), self.beta, dtype=float)


@dataclass(frozen=True)
class StateRate:
    """Branching rate given by a table over chain states."""

    table: tuple
    kind: str = field(default="table", init=False)

    @property
    def r_max(self) -> float:
        return max(self.table)

    def value(self, state):
        return np.asarray(self.table, dtype=float)[np.asarray(state, dtype=int)]


RateFunction = Union[ConstantRate, StateRate]


@dataclass(frozen=True, eq=False)
class OffspringLaw:
    """Offspring-count distribution as a truncated pmf vector over 0..len-1."""

    kind: str
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0 or np.any(p < -1e-15):
            raise InvalidModel("offspring.probs: must be a nonnegative vector")
        if abs(p.sum() - 1.0) > 1e-12:
            raise InvalidModel(
                f"offspring.probs: pmf sums to {p.sum():.17g}, not 1 within 1e-12"
            )
        object.__setattr__(self, "probs", p)

    @property
    def mean(self) -> float:
        return float(np.arange(self.probs.size) @ self.probs)

    @property
    def max_count(self) -> int:
        return int(np.nonzero(self.probs > 0)[0][-1])

    def pmf(self, k: int) -> float:
        return float(self.probs[k]) if 0 <= k < self.probs.size else 0.0

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.probs)

    @staticmethod
    def deterministic(k: int) -> "OffspringLaw":
        if not (0 <= k <= PMF_TRUNCATION):
            raise InvalidModel(f"offspring.k: {k} outside 0..{PMF_TRUNCATION}")
        p = np.zeros(k + 1)
        p[k] = 1.0
        return OffspringLaw("deterministic", p)

    @staticmethod
    def two_point(p0: float) -> "OffspringLaw":
        """Mass p0 at 0 children and 1-p0 at 2 children."""
        if not (0.0 <= p0 <= 1.0):
            raise InvalidModel(f"offspring.p0: {p0} outside [0, 1]")
        return OffspringLaw("two_point", np.array([p0, 0.0, 1.0 - p0]))

    @staticmethod
    def geometric(p: float) -> "OffspringLaw":
        """P(A = k) = (1-p)^k p on k >= 0."""
        if not (0.0 < p <= 1.0):
            raise InvalidModel(f"offspring.p: {p} outside (0, 1]")
        k = np.arange(PMF_TRUNCATION + 1)
        probs = (1.0 - p) ** k * p
        return _fold_tail("geometric", probs)

    @staticmethod
    def poisson(mu: float) -> "OffspringLaw":
        if mu < 0:
            raise InvalidModel(f"offspring.mu: {mu} negative")
        k = np.arange(PMF_TRUNCATION + 1)
        with np.errstate(divide="ignore"):
            logp = k * math.log(mu) - mu - np.cumsum(np.log(np.maximum(k, 1))) if mu > 0 else None
        if mu == 0:
            return OffspringLaw("poisson", np.array([1.0]))
        return _fold_tail("poisson", np.exp(logp))


def _fold_tail(kind: str, probs: np.ndarray) -> OffspringLaw:
    tail = 1.0 - probs.sum()
    if tail > PMF_TAIL_TOL:
        raise InvalidModel(
            f"offspring.{kind}: tail mass {tail:.3g} beyond k={PMF_TRUNCATION} "
            f"exceeds {PMF_TAIL_TOL:g}; mean does not converge within truncation"
        )
    probs = probs.copy()
    probs[-1] += max(tail, 0.0)
    return OffspringLaw(kind, probs)


def offspring_mean(law: OffspringLaw) -> float:
    """Mean offspring count m; the net growth exponent is m - 1."""
    return law.mean


def size_bias(law: OffspringLaw) -> OffspringLaw:
    """The law reweighted by count: pmf'(k) = k pmf(k) / mean."""
    m = law.mean
    if m <= 0.0:
        raise InvalidModel("offspring: size bias undefined for zero-mean law")
    k = np.arange(law.probs.size)
    return OffspringLaw(f"size_bias({law.kind})", k * law.probs / m)


@dataclass(frozen=True)
class UnitWeight:
    """Trivial spine weight: every particle carries factor 1."""

    kind: str = field(default="one", init=False)


@dataclass(frozen=True)
class GirsanovWeight:
    """Exponential tilt exp(lam*X(t) - lam^2 sigma^2 t / 2) of a Brownian path.

    Under the tilted measure the marked particle's motion gains drift
    lam * sigma^2.
    """

    lam: float
    kind: str = field(default="girsanov", init=False)


SpineWeightSpec = Union[UnitWeight, GirsanovWeight]


@dataclass(frozen=True)
class ModelSpec:
    motion: MotionModel
    rate: RateFunction
    offspring: OffspringLaw
    zeta: SpineWeightSpec

    @property
    def mean_offspring(self) -> float:
        return self.offspring.mean

    def rate_value(self, state):
        return self.rate.value(state)

    def spine_drift(self) -> float:
        if isinstance(self.zeta, GirsanovWeight):
            return self.zeta.lam * self.motion.sigma**2
        return 0.0


def validate_spec(spec: ModelSpec) -> list[str]:
    """Check every ingredient invariant.

    Raises InvalidModel (message carries the offending field path) on any
    violation; returns the list of warning strings that were emitted.
    """
    motion, rate, law, zeta = spec.motion, spec.rate, spec.offspring, spec.zeta

    if isinstance(motion, TwoStateChain):
        if not (motion.q01 > 0 and motion.q10 > 0):
            raise InvalidModel("motion.q01/q10: chain flip rates must be positive")
        if motion.start not in (0, 1):
            raise InvalidModel("motion.start: chain start state must be 0 or 1")
    elif isinstance(motion, BrownianMotion):
        if not (motion.sigma > 0):
            raise InvalidModel("motion.sigma: diffusivity must be positive")
        if not (motion.step > 0):
            raise InvalidModel("motion.step: grid step must be positive")
        if not math.isfinite(motion.start):
            raise InvalidModel("motion.start: position must be finite")
    elif not isinstance(motion, NoMotion):
        raise InvalidModel(f"motion: unknown kind {motion!r}")

    if isinstance(rate, ConstantRate):
        if rate.beta < 0:
            raise InvalidModel(f"rate.beta: {rate.beta} negative")
    elif isinstance(rate, StateRate):
        if not isinstance(motion, TwoStateChain):
            raise InvalidModel("rate.table: state-dependent rate needs chain motion")
        if len(rate.table) != 2:
            raise InvalidModel("rate.table: need one entry per chain state")
        if any(r < 0 for r in rate.table):
            raise InvalidModel("rate.table: rates must be nonnegative")
    else:
        raise InvalidModel(f"rate: unknown kind {rate!r}")

    if not isinstance(law, OffspringLaw):
        raise InvalidModel("offspring: not an OffspringLaw")
    law.__post_init__()  # re-check pmf invariants

    warns: list[str] = []
    if isinstance(zeta, GirsanovWeight):
        if not isinstance(motion, BrownianMotion):
            raise InvalidModel("zeta: girsanov weight requires brownian motion")
        if not math.isfinite(zeta.lam):
            raise InvalidModel("zeta.lam: must be finite")
        if isinstance(rate, ConstantRate):
            growth = (law.mean - 1.0) * rate.beta
            tilt_cost = 0.5 * zeta.lam**2 * motion.sigma**2
            if tilt_cost >= growth:
                msg = (
                    f"tilt lam={zeta.lam:g}: lam^2 sigma^2/2 = {tilt_cost:g} >= "
                    f"(m-1) beta = {growth:g}; the weighted sum Z(t) is expected "
                    "to collapse to 0"
                )
                warnings.warn(msg, ModelWarning, stacklevel=2)
                warns.append(msg)
    elif not isinstance(zeta, UnitWeight):
        raise InvalidModel(f"zeta: unknown kind {zeta!r}")

    return warns


def log_zeta_terminal(spec: ModelSpec, terminal_value, t: float):
    """log of the spine-weight factor given the path's value at time t."""
    if isinstance(spec.zeta, UnitWeight):
        return np.zeros_like(np.asarray(terminal_value, dtype=float))
    lam = spec.zeta.lam
    sig2 = spec.motion.sigma**2
    return lam * np.asarray(terminal_value, dtype=float) - 0.5 * lam**2 * sig2 * t


def zeta_eval(spec: ModelSpec, path, t: float) -> float:
    """Spine-weight factor of one particle path at time t."""
    if t < path.t0 - 1e-12 or t > path.t1 + 1e-12:
        raise PathDomainError(f"path covers [{path.t0:g}, {path.t1:g}], not t={t:g}")
    if isinstance(spec.zeta, UnitWeight):
        return 1.0
    return float(np.exp(log_zeta_terminal(spec, path.value_at(t), t)))
