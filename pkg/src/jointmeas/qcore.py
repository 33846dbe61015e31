"""Quantum primitives on two- and four-dimensional Hilbert spaces.

Conventions used throughout the package:

* Single-qubit basis: ``|H>`` (horizontal) and ``|V>`` (vertical), the +1
  and -1 eigenstates of the Z polarisation operator.
* ``X |H> = |V>`` (diagonal / anti-diagonal basis) and ``Y |H> = i |V>``
  (right / left circular basis), so ``[X, Y] = 2i Z``.
* Two-qubit operators are Kronecker products with qubit 1 (the qubit whose
  observables get estimated) as the *left* factor; the product basis is
  ordered ``HH, HV, VH, VV``.
* Angles are radians everywhere inside the library.  Degrees appear only at
  the command-line boundary.

All container types are immutable values; operations are pure functions.
"""

from __future__ import annotations

import math
import numbers
import warnings
from dataclasses import dataclass

import numpy as np

SUPPORTED_DIMS = (2, 4)


class DimensionMismatchError(ValueError):
    """Operands live on different or unsupported Hilbert spaces."""


class NumericalCorruptionError(ArithmeticError):
    """A quantity that must be real/non-negative came out otherwise."""


class DataQualityWarning(UserWarning):
    """Measured data forced a clamp or floor; carries the raw value."""


@dataclass(frozen=True)
class ToleranceProfile:
    """Numerical tolerances shared across the package.

    ``psd`` is the magnitude of negative eigenvalue tolerated in a density
    matrix; ``tomographic_psd`` is the relaxed floor for states reconstructed
    from measured data.  ``measured_norm`` / ``simulated_norm`` bound how far
    a distribution's total mass may sit from 1.
    """

    hermiticity: float = 1e-12
    equality: float = 1e-10
    variance: float = 1e-12
    psd: float = 1e-10
    tomographic_psd: float = 1e-3
    measured_norm: float = 0.01
    simulated_norm: float = 1e-10


DEFAULT_TOLERANCES = ToleranceProfile()

# Named profiles selectable from the CLI.  "strict" treats measured data as
# simulation-quality; "relaxed" admits sloppier measured tables.
PROFILES: dict[str, ToleranceProfile] = {
    "default": DEFAULT_TOLERANCES,
    "strict": ToleranceProfile(measured_norm=1e-3, tomographic_psd=1e-10),
    "relaxed": ToleranceProfile(measured_norm=0.05),
}


def as_complex_matrix(values, dims: tuple[int, ...] = SUPPORTED_DIMS) -> np.ndarray:
    """Validate and copy a square complex matrix of supported dimension."""
    mat = np.array(values, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {mat.shape}")
    if mat.shape[0] not in dims:
        raise DimensionMismatchError(
            f"dimension {mat.shape[0]} unsupported (expected one of {dims})")
    if not np.all(np.isfinite(mat.view(float))):
        raise ValueError("matrix contains non-finite entries")
    mat.setflags(write=False)
    return mat


def matrices_close(a: np.ndarray, b: np.ndarray, atol: float = DEFAULT_TOLERANCES.equality) -> bool:
    """Entrywise equality within absolute tolerance."""
    return a.shape == b.shape and bool(np.max(np.abs(a - b)) <= atol)


class HermitianOperator:
    """An observable: square, Hermitian within tolerance, dim 2 or 4."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix, *, atol: float = DEFAULT_TOLERANCES.hermiticity):
        mat = as_complex_matrix(matrix)
        dev = float(np.max(np.abs(mat - mat.conj().T)))
        if dev > atol:
            raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
        object.__setattr__(self, "_matrix", mat)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @staticmethod
    def identity(dim: int) -> "HermitianOperator":
        return HermitianOperator(np.eye(dim))

    def isclose(self, other: "HermitianOperator", atol: float = DEFAULT_TOLERANCES.equality) -> bool:
        return matrices_close(self._matrix, other._matrix, atol)

    # Sums and real-scalar multiples of Hermitian operators stay Hermitian,
    # so those are the only algebra offered on the wrapper; products are
    # taken on .matrix where needed.
    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_dim(other)
        return HermitianOperator(self._matrix + other._matrix)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_dim(other)
        return HermitianOperator(self._matrix - other._matrix)

    def __mul__(self, scalar) -> "HermitianOperator":
        if not isinstance(scalar, numbers.Real):
            return NotImplemented
        return HermitianOperator(self._matrix * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator(-self._matrix)

    def _check_dim(self, other: "HermitianOperator") -> None:
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dimensions differ: {self.dim} vs {other.dim}")

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(which: str) -> HermitianOperator:
    """Pauli operator in the H/V basis: ``pauli("X")`` etc., plus ``"I"``."""
    key = which.upper()
    if key not in _PAULI:
        raise ValueError(f"unknown Pauli label {which!r} (use I, X, Y or Z)")
    return HermitianOperator(_PAULI[key])


def tensor(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    """Kronecker product ``a (x) b`` of two single-qubit operators."""
    if a.dim != 2 or b.dim != 2:
        raise DimensionMismatchError("tensor expects two single-qubit operators")
    return HermitianOperator(np.kron(a.matrix, b.matrix))


def projector_pair(op: HermitianOperator) -> tuple[HermitianOperator, HermitianOperator]:
    """Eigenprojectors ``(P_plus, P_minus)`` of a +-1-valued observable."""
    sq = op.matrix @ op.matrix
    if not matrices_close(sq, np.eye(op.dim), 1e-10):
        raise ValueError("projector_pair needs an operator squaring to the identity")
    eye = np.eye(op.dim)
    return (HermitianOperator((eye + op.matrix) / 2),
            HermitianOperator((eye - op.matrix) / 2))


class DensityMatrix:
    """A quantum state: Hermitian, unit trace, eigenvalues above a floor.

    ``psd_floor`` is the magnitude of negative eigenvalue accepted.  States
    reconstructed from tomography may carry small negative eigenvalues; those
    are accepted up to the relaxed floor and flagged via ``psd_warning`` with
    the smallest eigenvalue recorded.  The stored matrix is never altered.
    """

    __slots__ = ("_matrix", "min_eigenvalue", "psd_floor", "psd_warning")

    def __init__(self, matrix, *, psd_floor: float = DEFAULT_TOLERANCES.psd,
                 tolerances: ToleranceProfile = DEFAULT_TOLERANCES):
        mat = as_complex_matrix(matrix)
        dev = float(np.max(np.abs(mat - mat.conj().T)))
        if dev > tolerances.hermiticity:
            raise ValueError(f"density matrix not Hermitian (max deviation {dev:.3e})")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > tolerances.equality:
            raise ValueError(f"density matrix trace {tr:.12g} differs from 1")
        eigs = np.linalg.eigvalsh(mat)
        min_eig = float(eigs[0])
        if min_eig < -psd_floor:
            raise ValueError(
                f"density matrix has eigenvalue {min_eig:.3e} below floor -{psd_floor:g}")
        object.__setattr__(self, "_matrix", mat)
        object.__setattr__(self, "min_eigenvalue", min_eig)
        object.__setattr__(self, "psd_floor", psd_floor)
        object.__setattr__(self, "psd_warning", min_eig < -tolerances.psd)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @classmethod
    def from_pure(cls, statevector) -> "DensityMatrix":
        vec = np.asarray(statevector, dtype=complex).reshape(-1)
        if vec.shape[0] not in SUPPORTED_DIMS:
            raise DimensionMismatchError(f"state vector length {vec.shape[0]} unsupported")
        norm = float(np.linalg.norm(vec))
        if norm < 1e-12:
            raise ValueError("state vector has zero norm")
        vec = vec / norm
        return cls(np.outer(vec, vec.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)

    def isclose(self, other: "DensityMatrix", atol: float = DEFAULT_TOLERANCES.equality) -> bool:
        return matrices_close(self._matrix, other._matrix, atol)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim}, min_eig={self.min_eigenvalue:.2e})"


@dataclass(frozen=True)
class BlochObservable:
    """A +-1-valued qubit observable from Bloch angles (radians).

    ``W = sin(theta) cos(phi) X + sin(theta) sin(phi) Y + cos(theta) Z``.
    The Bloch vector is unit by construction, so W squares to the identity.
    """

    theta: float
    phi: float

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float) -> "BlochObservable":
        return cls(math.radians(theta_deg), math.radians(phi_deg))

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)

    @property
    def phi_deg(self) -> float:
        return math.degrees(self.phi)

    def as_operator(self) -> HermitianOperator:
        st, ct = math.sin(self.theta), math.cos(self.theta)
        mat = (st * math.cos(self.phi) * _PAULI["X"]
               + st * math.sin(self.phi) * _PAULI["Y"]
               + ct * _PAULI["Z"])
        return HermitianOperator(mat)


def expectation(op: HermitianOperator, rho: DensityMatrix) -> float:
    """``Tr(rho op)`` as a real number.

    A large imaginary residue means an argument was not actually Hermitian,
    which is reported as corruption rather than silently discarded.
    """
    if op.dim != rho.dim:
        raise DimensionMismatchError(f"operator dim {op.dim} vs state dim {rho.dim}")
    val = complex(np.trace(rho.matrix @ op.matrix))
    if abs(val.imag) > DEFAULT_TOLERANCES.equality:
        raise NumericalCorruptionError(f"expectation has imaginary part {val.imag:.3e}")
    return val.real


def spread(op: HermitianOperator, rho: DensityMatrix) -> float:
    """Standard deviation ``sqrt(<G^2> - <G>^2)`` of an observable."""
    if op.dim != rho.dim:
        raise DimensionMismatchError(f"operator dim {op.dim} vs state dim {rho.dim}")
    mean = expectation(op, rho)
    second = float(np.real(np.trace(rho.matrix @ op.matrix @ op.matrix)))
    var = second - mean * mean
    if var < -DEFAULT_TOLERANCES.variance:
        raise NumericalCorruptionError(f"variance {var:.3e} below -1e-12")
    return math.sqrt(max(var, 0.0))


def commutator_bound(a: HermitianOperator, b: HermitianOperator, rho: DensityMatrix) -> float:
    """``c = |<[A, B]>|``; the uncertainty-relation bound is ``c / 2``."""
    if a.dim != b.dim or a.dim != rho.dim:
        raise DimensionMismatchError("commutator_bound needs matching dimensions")
    comm = a.matrix @ b.matrix - b.matrix @ a.matrix
    return abs(complex(np.trace(rho.matrix @ comm)))


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``.

    For a pure ``sigma = |psi><psi|`` this reduces to ``<psi|rho|psi>``.
    """
    if rho.dim != sigma.dim:
        raise DimensionMismatchError("fidelity needs states of equal dimension")
    root = _psd_sqrt(rho.matrix)
    inner = _psd_sqrt(root @ sigma.matrix @ root)
    val = float(np.real(np.trace(inner))) ** 2
    return min(max(val, 0.0), 1.0 + 1e-9)
