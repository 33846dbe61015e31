"""Estimation layer: reconstruct inaccuracies and spreads from statistics.

The X value of qubit 1 is estimated from the W outcome on qubit 2 through a
function ``f(w)``; the Y value of qubit 1 is estimated by the semiweak-slide
Y measurement itself (values +-1).  Everything here consumes outcome
statistics -- the same code path serves simulated tables and measured count
tables.

Root-mean-square inaccuracies are defined against Margenau-Hill (MH)
quasi-probabilities, ``p_MH(k, l) = <{K_k, L_l}> / 2``, reconstructed from
the observed joint table via the slide's contextual values:

    eps(X_est)^2 = sum_{x,w} (x - f(w))^2 p_MH(x, w),
    p_MH(x, w)   = sum_{m,y} (1 + x xi_m)/2 p(m, y, w).

Measured tables are used verbatim (their normalisation slack is kept, see the
distribution tolerances); spread computations normalise marginals by the
table's total mass since they are moments of a random variable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .qcore import (
    BlochObservable,
    DataQualityWarning,
    DensityMatrix,
    HermitianOperator,
    NumericalCorruptionError,
    pauli,
    projector_pair,
    tensor,
    expectation,
)
from .scenario import (
    OUTCOMES,
    JointDistribution,
    SemiweakSlide,
    effective_povm,
    joint_distribution,
)


class UndefinedEstimateError(ValueError):
    """An estimator branch conditions on a zero-probability outcome."""


@dataclass(frozen=True)
class Estimator:
    """An estimate of X from the W outcome: ``w -> f(w)``, with a kind tag.

    ``kind`` is ``"simple"`` (f(w) = w), ``"optimal"`` (state-dependent least
    squares) or ``"custom"``.
    """

    values: dict[int, float]
    kind: str = "custom"

    def __post_init__(self):
        if set(self.values) != {+1, -1}:
            raise ValueError("estimator needs values for w = +1 and w = -1")
        if not all(math.isfinite(v) for v in self.values.values()):
            raise ValueError("estimator values must be finite")
        if self.kind not in ("simple", "optimal", "custom"):
            raise ValueError(f"unknown estimator kind {self.kind!r}")
        if self.kind == "simple" and (self.values[+1] != 1.0 or self.values[-1] != -1.0):
            raise ValueError("simple estimator must map w -> w")

    def value(self, w: int) -> float:
        return self.values[w]

    @classmethod
    def simple(cls) -> "Estimator":
        return cls({+1: 1.0, -1: -1.0}, kind="simple")

    @classmethod
    def custom(cls, f_plus: float, f_minus: float) -> "Estimator":
        return cls({+1: float(f_plus), -1: float(f_minus)}, kind="custom")

    def as_operator(self, w: BlochObservable) -> HermitianOperator:
        """The estimate as a qubit-2 observable, ``f(W) = f(+1)W+ + f(-1)W-``."""
        w_plus, w_minus = projector_pair(w.as_operator())
        return HermitianOperator(self.values[+1] * w_plus.matrix
                                 + self.values[-1] * w_minus.matrix)


@dataclass(frozen=True)
class QuasiDistribution:
    """A (possibly negative) joint quasi-probability table over value pairs."""

    entries: dict[tuple[float, float], float]
    atol: float = 1e-9

    def __post_init__(self):
        total = self.total()
        if abs(total - 1.0) > self.atol:
            raise ValueError(f"quasi-probabilities sum to {total:.6f}, not 1")

    def total(self) -> float:
        return float(sum(self.entries.values()))

    def marginal(self, axis: int) -> dict[float, float]:
        out: dict[float, float] = {}
        for key, p in self.entries.items():
            out[key[axis]] = out.get(key[axis], 0.0) + p
        return out


def optimal_estimator(rho: DensityMatrix, w: BlochObservable) -> Estimator:
    """Least-squares optimal estimate of X (qubit 1) from the W outcome.

    ``f_opt(w) = <X (x) W_w> / <1 (x) W_w>`` -- the conditional mean of X
    given the W outcome, computed from the state.  Raises
    ``UndefinedEstimateError`` if an outcome has no probability mass.
    """
    x1 = tensor(pauli("X"), pauli("I"))
    w_projs = dict(zip(OUTCOMES, projector_pair(w.as_operator())))
    values = {}
    for s in OUTCOMES:
        proj = tensor(pauli("I"), w_projs[s])
        den = expectation(proj, rho)
        if den <= 1e-12:
            raise UndefinedEstimateError(f"W outcome {s:+d} has probability {den:.3e}")
        num = expectation(HermitianOperator(x1.matrix @ proj.matrix), rho)
        values[s] = num / den
    return Estimator(values, kind="optimal")


def mh_from_counts(dist: JointDistribution, slide: SemiweakSlide) -> QuasiDistribution:
    """Margenau-Hill quasi-table of (X, W) from the joint outcome table.

    Uses the contextual-value inversion; for simulated data the result equals
    the operator table ``<X_x (x) W_w>`` exactly.  The quasi-table inherits
    the source table's total mass, so the sum check follows the source
    provenance.
    """
    entries: dict[tuple[float, float], float] = {}
    for x in OUTCOMES:
        for w in OUTCOMES:
            acc = 0.0
            for m in OUTCOMES:
                weight = 0.5 * (1.0 + x * slide.xi(m))
                for y in OUTCOMES:
                    acc += weight * dist.prob(m, y, w)
            entries[(float(x), float(w))] = acc
    atol = (dist.tolerances.simulated_norm if dist.provenance == "simulated"
            else dist.tolerances.measured_norm)
    return QuasiDistribution(entries, atol=atol + 1e-12)


def inaccuracy_x(dist: JointDistribution, slide: SemiweakSlide,
                 est: Estimator) -> float:
    """RMS inaccuracy of the X estimate, reconstructed from the joint table.

    A squared value in [-1e-9, 0) is clamped to zero with a data-quality
    warning carrying the raw value; anything more negative marks the input
    data as inconsistent.
    """
    mh = mh_from_counts(dist, slide)
    eps_sq = 0.0
    for (x, w), p in mh.entries.items():
        diff = x - est.value(int(w))
        eps_sq += diff * diff * p
    if eps_sq < -1e-9:
        raise NumericalCorruptionError(
            f"reconstructed eps^2 = {eps_sq:.3e}: input data is inconsistent")
    if eps_sq < 0.0:
        warnings.warn(DataQualityWarning(
            f"clamping reconstructed eps^2 = {eps_sq:.3e} to 0"))
        eps_sq = 0.0
    return math.sqrt(eps_sq)


def inaccuracy_y(slide: SemiweakSlide) -> float:
    """RMS inaccuracy of the semiweak Y measurement: sqrt(2 kappa).

    Evaluated as the MH mean-square difference between the target Y and the
    effective POVM behind the slide, ``sum (y - y')^2 p_MH(y, y')``, and
    checked against 2 kappa.  The value is state independent, so a reference
    state drops out of the sum.
    """
    upsilon = dict(zip(OUTCOMES, effective_povm(slide)))
    y_projs = dict(zip(OUTCOMES, projector_pair(pauli("Y"))))
    tau = np.eye(2) / 2.0
    eps_sq = 0.0
    for y in OUTCOMES:
        for yp in OUTCOMES:
            anti = y_projs[y].matrix @ upsilon[yp].matrix + upsilon[yp].matrix @ y_projs[y].matrix
            p_mh = 0.5 * float(np.real(np.trace(tau @ anti)))
            eps_sq += (y - yp) ** 2 * p_mh
    if abs(eps_sq - 2.0 * slide.kappa) > 1e-12:
        raise NumericalCorruptionError(
            f"MH sum {eps_sq:.15f} deviates from 2 kappa = {2 * slide.kappa:.15f}")
    return math.sqrt(max(eps_sq, 0.0))


def estimator_spread(dist: JointDistribution, est: Estimator) -> float:
    """Standard deviation of the estimate f(W) under the table's w marginal."""
    marg = dist.marginal("w")
    total = sum(marg.values())
    mean = sum(est.value(w) * p for w, p in marg.items()) / total
    second = sum(est.value(w) ** 2 * p for w, p in marg.items()) / total
    var = second - mean * mean
    if var < -1e-12:
        raise NumericalCorruptionError(f"estimator variance {var:.3e} negative")
    return math.sqrt(max(var, 0.0))


def y_estimator_spread(dist: JointDistribution) -> float:
    """Standard deviation of the +-1-valued y outcome under the table."""
    marg = dist.marginal("y")
    total = sum(marg.values())
    mean = sum(y * p for y, p in marg.items()) / total
    var = 1.0 - mean * mean
    if var < -1e-12:
        raise NumericalCorruptionError(f"y-outcome variance {var:.3e} negative")
    return math.sqrt(max(var, 0.0))


@dataclass(frozen=True)
class DispersionCheck:
    """The three terms of eps^2 + (Delta X_est)^2 = (Delta X)^2."""

    eps_sq: float
    est_spread_sq: float
    x_spread_sq: float

    @property
    def residual(self) -> float:
        return self.eps_sq + self.est_spread_sq - self.x_spread_sq


def dispersion_check(rho: DensityMatrix, slide: SemiweakSlide,
                     w: BlochObservable, est: Estimator) -> DispersionCheck:
    """Evaluate the inaccuracy-dispersion identity on a simulated scenario.

    For the optimal estimator of the same state the identity
    ``eps^2 + (Delta X_est)^2 = (Delta X)^2`` is exact and is enforced to
    1e-9; for other estimators the three terms are returned unasserted.
    """
    from .qcore import spread  # local import keeps module top uncluttered

    dist = joint_distribution(rho, slide, w)
    eps = inaccuracy_x(dist, slide, est)
    d_est = estimator_spread(dist, est)
    d_x = spread(tensor(pauli("X"), pauli("I")), rho)
    check = DispersionCheck(eps * eps, d_est * d_est, d_x * d_x)
    if est.kind == "optimal" and abs(check.residual) > 1e-9:
        raise NumericalCorruptionError(
            f"dispersion identity broken for optimal estimator: "
            f"residual {check.residual:.3e}")
    return check
