"""Experiment construction: entangled source, glass-slide measurement, statistics.

The modelled experiment prepares two polarisation qubits in the entangled
state ``|psi(gamma)> = cos(gamma)|HV> - sin(gamma)|VH>`` and performs, per
run:

1. a *semiweak* measurement of X on qubit 1, realised by a glass slide that
   reflects the two X eigenstates with probabilities ``r_h`` and ``r_v``
   (outcome ``m``),
2. a projective measurement of Y on qubit 1 after the slide (outcome ``y``),
3. a projective measurement of a Bloch observable W on qubit 2 (outcome
   ``w``), whose result is used to *estimate* X of qubit 1.

Outcome labelling: every outcome is +-1.  For the slide, ``m = +1`` is the
TRANSMITTED branch and ``m = -1`` the REFLECTED one; transmission is the
high-probability branch for the reflectivities of interest, which is also how
published count tables for this experiment are oriented.

The slide admits *contextual values* ``xi_m``: state-independent weights with
``sum_m xi_m p(m) = <X>`` for every input state.  They exist whenever
``r_h != r_v`` and blow up as the two reflectivities approach each other
(the weak-measurement limit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qcore import (
    DEFAULT_TOLERANCES,
    BlochObservable,
    DensityMatrix,
    DimensionMismatchError,
    HermitianOperator,
    ToleranceProfile,
    matrices_close,
    pauli,
    projector_pair,
)

TRANSMITTED = +1
REFLECTED = -1

OUTCOMES = (+1, -1)


class DegenerateMeasurementError(ValueError):
    """The slide carries no X information (r_h == r_v); xi undefined."""


@dataclass(frozen=True)
class SemiweakSlide:
    """A two-outcome semiweak X measurement on one qubit.

    ``m_r`` / ``m_t`` are the Hermitian PSD Kraus operators of the reflected
    and transmitted branches, ``kappa = 1 - sqrt(r_h r_v) - sqrt(t_h t_v)``
    the decoherence strength, and ``xi_r`` / ``xi_t`` the contextual values
    (``None`` only for a polarisation-independent slide, which has no X
    information to invert).
    """

    r_h: float
    r_v: float
    m_r: HermitianOperator
    m_t: HermitianOperator
    kappa: float
    xi_r: float | None
    xi_t: float | None

    def __post_init__(self):
        if not (0.0 <= self.r_h <= 1.0 and 0.0 <= self.r_v <= 1.0):
            raise ValueError("reflectivities must lie in [0, 1]")
        x_plus, x_minus = projector_pair(pauli("X"))
        target_r = self.r_h * x_plus.matrix + self.r_v * x_minus.matrix
        target_t = (1 - self.r_h) * x_plus.matrix + (1 - self.r_v) * x_minus.matrix
        if not matrices_close(self.m_r.matrix @ self.m_r.matrix, target_r, 1e-12):
            raise ValueError("m_r^2 must equal r_h X+ + r_v X-")
        if not matrices_close(self.m_t.matrix @ self.m_t.matrix, target_t, 1e-12):
            raise ValueError("m_t^2 must equal t_h X+ + t_v X-")
        total = self.m_r.matrix @ self.m_r.matrix + self.m_t.matrix @ self.m_t.matrix
        if not matrices_close(total, np.eye(2), 1e-12):
            raise ValueError("Kraus operators must satisfy m_r^2 + m_t^2 = 1")
        expected_kappa = 1.0 - math.sqrt(self.r_h * self.r_v) - math.sqrt(
            (1 - self.r_h) * (1 - self.r_v))
        if abs(self.kappa - expected_kappa) > 1e-12:
            raise ValueError("kappa inconsistent with reflectivities")
        if (self.xi_r is None) != (self.xi_t is None):
            raise ValueError("xi_r and xi_t must be defined together")
        if self.xi_r is not None:
            # defining property on both X eigenstates
            for sign, proj in ((+1, x_plus), (-1, x_minus)):
                p_r = float(np.real(np.trace(proj.matrix @ self.m_r.matrix @ self.m_r.matrix)))
                p_t = float(np.real(np.trace(proj.matrix @ self.m_t.matrix @ self.m_t.matrix)))
                if abs(self.xi_r * p_r + self.xi_t * p_t - sign) > 1e-10:
                    raise ValueError("contextual values do not reproduce <X>")

    @property
    def has_contextual_values(self) -> bool:
        return self.xi_r is not None

    def xi(self, m: int) -> float:
        """Contextual value for outcome ``m`` (+1 transmitted, -1 reflected)."""
        if self.xi_r is None or self.xi_t is None:
            raise DegenerateMeasurementError(
                "slide has r_h == r_v; contextual values are undefined")
        if m == TRANSMITTED:
            return self.xi_t
        if m == REFLECTED:
            return self.xi_r
        raise ValueError(f"outcome must be +1 or -1, got {m}")

    def kraus(self, m: int) -> HermitianOperator:
        if m == TRANSMITTED:
            return self.m_t
        if m == REFLECTED:
            return self.m_r
        raise ValueError(f"outcome must be +1 or -1, got {m}")

    @classmethod
    def polarisation_independent(cls, r: float) -> "SemiweakSlide":
        """A slide with equal reflectivities: kappa = 0, no X information."""
        if not 0.0 <= r <= 1.0:
            raise ValueError("reflectivity must lie in [0, 1]")
        eye = np.eye(2)
        return cls(r_h=r, r_v=r,
                   m_r=HermitianOperator(math.sqrt(r) * eye),
                   m_t=HermitianOperator(math.sqrt(1 - r) * eye),
                   kappa=0.0, xi_r=None, xi_t=None)


def slide_model(r_h: float, r_v: float) -> SemiweakSlide:
    """Build the slide from its two reflectivities.

    Kraus operators are the Hermitian PSD square roots
    ``m_r = sqrt(r_h) X+ + sqrt(r_v) X-`` (and the transmitted analogue);
    contextual values are ``xi_r = (2 - r_h - r_v)/(r_h - r_v)`` and
    ``xi_t = -(r_h + r_v)/(r_h - r_v)``.

    Raises ``DegenerateMeasurementError`` when ``r_h == r_v`` within 1e-12:
    such a slide reveals nothing about X and the inversion does not exist
    (use :meth:`SemiweakSlide.polarisation_independent` to model it).
    """
    if not (0.0 <= r_h <= 1.0 and 0.0 <= r_v <= 1.0):
        raise ValueError("reflectivities must lie in [0, 1]")
    if abs(r_h - r_v) < 1e-12:
        raise DegenerateMeasurementError(
            f"r_h = r_v = {r_h:g}: contextual values are unbounded")
    x_plus, x_minus = projector_pair(pauli("X"))
    m_r = HermitianOperator(math.sqrt(r_h) * x_plus.matrix + math.sqrt(r_v) * x_minus.matrix)
    m_t = HermitianOperator(math.sqrt(1 - r_h) * x_plus.matrix
                            + math.sqrt(1 - r_v) * x_minus.matrix)
    kappa = 1.0 - math.sqrt(r_h * r_v) - math.sqrt((1 - r_h) * (1 - r_v))
    xi_r = (2.0 - r_h - r_v) / (r_h - r_v)
    xi_t = -(r_h + r_v) / (r_h - r_v)
    return SemiweakSlide(r_h=r_h, r_v=r_v, m_r=m_r, m_t=m_t,
                         kappa=kappa, xi_r=xi_r, xi_t=xi_t)


def epr_state(gamma: float) -> DensityMatrix:
    """The entangled source ``cos(gamma)|HV> - sin(gamma)|VH>``.

    ``gamma = pi/4`` gives the singlet-weight balance (maximal entanglement,
    ``<Z (x) I> = 0``); ``gamma = 0`` the product state ``|HV>``.
    """
    vec = np.zeros(4, dtype=complex)
    vec[1] = math.cos(gamma)
    vec[2] = -math.sin(gamma)
    return DensityMatrix.from_pure(vec)


@dataclass(frozen=True)
class JointDistribution:
    """Joint probabilities ``p(m, y, w)`` over the eight +-1 outcome triples.

    ``provenance`` is ``"simulated"`` (mass 1 within 1e-10) or ``"measured"``
    (mass within the measured tolerance, entries kept verbatim).  ``sigmas``
    optionally carries one-standard-deviation uncertainties per entry; they
    are stored and re-emitted but never propagated.
    """

    entries: dict[tuple[int, int, int], float]
    provenance: str = "simulated"
    w_observable: BlochObservable | None = None
    metadata: dict = field(default_factory=dict)
    sigmas: dict[tuple[int, int, int], float] | None = None
    tolerances: ToleranceProfile = DEFAULT_TOLERANCES

    def __post_init__(self):
        if self.provenance not in ("simulated", "measured"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        expected = {(m, y, w) for m in OUTCOMES for y in OUTCOMES for w in OUTCOMES}
        if set(self.entries) != expected:
            raise ValueError("distribution must cover exactly the 8 outcome triples")
        low = min(self.entries.values())
        if low < -1e-9:
            raise ValueError(f"negative probability {low:.3e} in distribution")
        tol = (self.tolerances.simulated_norm if self.provenance == "simulated"
               else self.tolerances.measured_norm)
        total = self.total()
        if abs(total - 1.0) > tol:
            raise ValueError(
                f"probabilities sum to {total:.4f}, outside 1 +- {tol:g} "
                f"for {self.provenance} data")

    def prob(self, m: int, y: int, w: int) -> float:
        return self.entries[(m, y, w)]

    def total(self) -> float:
        return float(sum(self.entries.values()))

    def marginal(self, axis: str) -> dict[int, float]:
        """Marginal over one outcome label, ``axis`` in {"m", "y", "w"}."""
        idx = {"m": 0, "y": 1, "w": 2}[axis]
        out = {+1: 0.0, -1: 0.0}
        for key, p in self.entries.items():
            out[key[idx]] += p
        return out


def joint_distribution(rho: DensityMatrix, slide: SemiweakSlide,
                       w: BlochObservable) -> JointDistribution:
    """Simulate ``p(m, y, w) = <M_m Y_y M_m (x) W_w>`` and normalise exactly.

    The slide acts on qubit 1, then Y is measured on the disturbed qubit 1
    while W is measured on qubit 2.
    """
    if rho.dim != 4:
        raise DimensionMismatchError("joint_distribution needs a two-qubit state")
    y_projs = dict(zip(OUTCOMES, projector_pair(pauli("Y"))))
    w_projs = dict(zip(OUTCOMES, projector_pair(w.as_operator())))
    entries: dict[tuple[int, int, int], float] = {}
    for m in OUTCOMES:
        km = slide.kraus(m).matrix
        for y in OUTCOMES:
            probe = km @ y_projs[y].matrix @ km
            for ww in OUTCOMES:
                op = np.kron(probe, w_projs[ww].matrix)
                val = complex(np.trace(rho.matrix @ op))
                entries[(m, y, ww)] = val.real
    total = sum(entries.values())
    entries = {k: v / total for k, v in entries.items()}
    meta = {"theta_deg": w.theta_deg, "phi_deg": w.phi_deg,
            "r_h": slide.r_h, "r_v": slide.r_v}
    return JointDistribution(entries=entries, provenance="simulated",
                             w_observable=w, metadata=meta)


def effective_povm(slide: SemiweakSlide) -> tuple[HermitianOperator, HermitianOperator]:
    """POVM of the Y measurement behind the slide: the Kraus sum
    ``Upsilon_y = sum_m M_m Y_y M_m``, which equals
    ``1/2 +- (1 - kappa)/2 Y``."""
    y_plus, y_minus = projector_pair(pauli("Y"))
    out = []
    for proj in (y_plus, y_minus):
        acc = np.zeros((2, 2), dtype=complex)
        for m in OUTCOMES:
            km = slide.kraus(m).matrix
            acc += km @ proj.matrix @ km
        out.append(HermitianOperator(acc))
    closed = 0.5 * np.eye(2) + 0.5 * (1 - slide.kappa) * pauli("Y").matrix
    if not matrices_close(out[0].matrix, closed, 1e-12):
        raise ValueError("Kraus sum deviates from (1 +- (1-kappa) Y)/2")
    return out[0], out[1]


def disturbed_observable(slide: SemiweakSlide, b: HermitianOperator) -> HermitianOperator:
    """Heisenberg picture of the slide channel: ``B' = M_r B M_r + M_t B M_t``.

    For B = Y this contracts to ``(1 - kappa) Y``; X and Z components are
    preserved or mixed according to the slide's Kraus operators.
    """
    if b.dim != 2:
        raise DimensionMismatchError("disturbed_observable acts on single-qubit operators")
    acc = np.zeros((2, 2), dtype=complex)
    for m in OUTCOMES:
        km = slide.kraus(m).matrix
        acc += km @ b.matrix @ km
    return HermitianOperator(acc)
