"""Direct operator-algebra engine used to cross-check reconstructions.

Everything the estimation layer reconstructs from outcome statistics can be
computed directly as operator expectations on the full Hilbert space, once
POVM estimates are promoted to projective observables on a dilated space
(system tensor ancilla, Naimark construction).  This module does exactly
that, sharing nothing with the statistics path beyond the basic primitives,
so agreement between the two is a real check.

Tensor-factor layout: factors are listed in order, operators are registered
on slots (factor indices) and embedded by Kronecker products with identities
elsewhere; an ancilla is always appended as the last factor and the state is
extended with the ancilla in its first basis state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .estimate import QuasiDistribution
from .qcore import DensityMatrix, HermitianOperator, _psd_sqrt


def _as_array(op) -> np.ndarray:
    return np.asarray(getattr(op, "matrix", op), dtype=complex)


def embed(op: np.ndarray, slots: tuple[int, ...], dims: tuple[int, ...]) -> np.ndarray:
    """Embed an operator acting on the given factor slots into the full space."""
    slots = tuple(slots)
    if len(set(slots)) != len(slots):
        raise ValueError("slots must be distinct")
    if any(s < 0 or s >= len(dims) for s in slots):
        raise ValueError(f"slot out of range for {len(dims)} factors")
    op_dim = int(np.prod([dims[s] for s in slots]))
    if op.shape != (op_dim, op_dim):
        raise ValueError(f"operator shape {op.shape} does not match slots {slots}")
    n = len(dims)
    # reshape to one tensor index pair per slot factor, then kron in identities
    op_t = op.reshape([dims[s] for s in slots] * 2)
    # move into full tensor with identity on the remaining factors
    rest = [i for i in range(n) if i not in slots]
    if rest:
        eye = np.eye(int(np.prod([dims[i] for i in rest])), dtype=complex)
        eye_t = eye.reshape([dims[i] for i in rest] * 2)
        full = np.tensordot(op_t, eye_t, axes=0)
    else:
        full = op_t
    # axes: slots-row, slots-col, rest-row, rest-col -> interleave to row/col per factor
    k, r = len(slots), len(rest)
    row_axes = {s: i for i, s in enumerate(slots)}
    row_axes.update({s: 2 * k + i for i, s in enumerate(rest)})
    col_axes = {s: k + i for i, s in enumerate(slots)}
    col_axes.update({s: 2 * k + r + i for i, s in enumerate(rest)})
    perm = [row_axes[i] for i in range(n)] + [col_axes[i] for i in range(n)]
    full = np.transpose(full, perm)
    dim = int(np.prod(dims))
    return full.reshape(dim, dim)


def naimark_unitary(povm: tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    """Dilation unitary for a binary POVM on one qubit.

    With Hermitian PSD Kraus operators ``M_i = sqrt(E_i)``, the isometry
    ``|s> -> sum_i (M_i |s>) (x) |i>_anc`` is completed to a unitary on
    (system tensor ancilla); measuring the ancilla in its basis then realises
    the POVM when the ancilla starts in ``|0>``.
    """
    e_plus, e_minus = (np.asarray(e, dtype=complex) for e in povm)
    total = e_plus + e_minus
    if not np.allclose(total, np.eye(2), atol=1e-10):
        raise ValueError("POVM elements must sum to the identity")
    kraus = [_psd_sqrt(e_plus), _psd_sqrt(e_minus)]
    iso = np.zeros((4, 2), dtype=complex)
    for anc, km in enumerate(kraus):
        for s in range(2):
            for sp in range(2):
                iso[s * 2 + anc, sp] = km[s, sp]
    unitary = np.zeros((4, 4), dtype=complex)
    unitary[:, 0] = iso[:, 0]
    unitary[:, 2] = iso[:, 1]
    # complete the remaining columns by Gram-Schmidt over a fixed basis
    filled = [0, 2]
    for col in (1, 3):
        for seed in range(4):
            vec = np.zeros(4, dtype=complex)
            vec[seed] = 1.0
            for prev in filled:
                vec -= unitary[:, prev] * (unitary[:, prev].conj() @ vec)
            norm = np.linalg.norm(vec)
            if norm > 1e-7:
                unitary[:, col] = vec / norm
                filled.append(col)
                break
        else:
            raise ValueError("failed to complete dilation unitary")
    if not np.allclose(unitary.conj().T @ unitary, np.eye(4), atol=1e-12):
        raise ValueError("dilation completion is not unitary")
    return unitary


@dataclass
class DilatedSystem:
    """A full (possibly ancilla-extended) space with named operators.

    ``operators`` maps names to full-space matrices; ``families`` maps names
    to lists of (value, full-space projector) pairs for projective
    observables.
    """

    dims: tuple[int, ...]
    state: np.ndarray
    operators: dict[str, np.ndarray] = field(default_factory=dict)
    families: dict[str, list[tuple[float, np.ndarray]]] = field(default_factory=dict)

    @classmethod
    def two_qubit(cls, rho: DensityMatrix) -> "DilatedSystem":
        if rho.dim != 4:
            raise ValueError("two_qubit expects a 4-dimensional state")
        return cls(dims=(2, 2), state=np.array(rho.matrix))

    @classmethod
    def two_qubit_with_ancilla(cls, rho: DensityMatrix) -> "DilatedSystem":
        """Append a qubit ancilla in |0>, giving factor layout (q1, q2, anc)."""
        if rho.dim != 4:
            raise ValueError("two_qubit_with_ancilla expects a 4-dimensional state")
        anc = np.zeros((2, 2), dtype=complex)
        anc[0, 0] = 1.0
        return cls(dims=(2, 2, 2), state=np.kron(rho.matrix, anc))

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def register(self, name: str, op, slots: tuple[int, ...]) -> np.ndarray:
        mat = embed(_as_array(op), slots, self.dims)
        self.operators[name] = mat
        return mat

    def register_family(self, name: str, members: list[tuple[float, object]],
                        slots: tuple[int, ...]) -> None:
        """Register a projective family [(value, local projector), ...]."""
        embedded = [(float(v), embed(_as_array(p), slots, self.dims)) for v, p in members]
        total = sum(p for _, p in embedded)
        if not np.allclose(total, np.eye(self.dim), atol=1e-12):
            raise ValueError(f"family {name!r} is not complete")
        self.families[name] = embedded
        # the value-weighted sum is the observable itself
        self.operators[name] = sum(v * p for v, p in embedded)

    def register_naimark_estimator(self, name: str,
                                   povm: tuple[np.ndarray, np.ndarray],
                                   values: tuple[float, float],
                                   system_slot: int) -> None:
        """Promote a binary POVM on one factor to a projective family.

        The ancilla must be the last factor (see ``two_qubit_with_ancilla``).
        Measurement of the ancilla basis after the dilation unitary realises
        the POVM; the registered projectors are the back-rotated ancilla
        projectors on (system_slot, ancilla).
        """
        anc_slot = len(self.dims) - 1
        unitary = naimark_unitary(povm)
        members = []
        for idx, value in enumerate(values):
            anc_proj = np.zeros((2, 2), dtype=complex)
            anc_proj[idx, idx] = 1.0
            local = unitary.conj().T @ np.kron(np.eye(2), anc_proj) @ unitary
            members.append((value, local))
        # members live on (system_slot, anc_slot)
        embedded = [(v, embed(p, (system_slot, anc_slot), self.dims))
                    for v, p in members]
        total = sum(p for _, p in embedded)
        if not np.allclose(total, np.eye(self.dim), atol=1e-12):
            raise ValueError("dilated family is not complete")
        self.families[name] = embedded
        self.operators[name] = sum(v * p for v, p in embedded)

    def operator(self, name: str) -> np.ndarray:
        if name not in self.operators:
            raise KeyError(f"no operator registered under {name!r}")
        return self.operators[name]

    def expectation(self, name: str) -> float:
        val = complex(np.trace(self.state @ self.operator(name)))
        if abs(val.imag) > 1e-10:
            raise ValueError(f"expectation of {name!r} has imaginary part {val.imag:.3e}")
        return val.real


def direct_inaccuracy(system: DilatedSystem, target: str, estimator: str) -> float:
    """``sqrt(<(T - E)^2>)`` straight from the registered operators."""
    diff = system.operator(target) - system.operator(estimator)
    val = float(np.real(np.trace(system.state @ diff @ diff)))
    return math.sqrt(max(val, 0.0))


def direct_margenau_hill(system: DilatedSystem, k_family: str,
                         l_family: str) -> QuasiDistribution:
    """MH quasi-probabilities ``<{K_k, L_l}>/2`` of two projective families."""
    if k_family not in system.families:
        raise KeyError(f"no projective family registered under {k_family!r}")
    if l_family not in system.families:
        raise KeyError(f"no projective family registered under {l_family!r}")
    entries: dict[tuple[float, float], float] = {}
    for kv, kp in system.families[k_family]:
        for lv, lp in system.families[l_family]:
            anti = kp @ lp + lp @ kp
            val = 0.5 * float(np.real(np.trace(system.state @ anti)))
            entries[(kv, lv)] = entries.get((kv, lv), 0.0) + val
    return QuasiDistribution(entries, atol=1e-9)


def mh_mean_square(quasi: QuasiDistribution) -> float:
    """``sum (k - l)^2 p_MH(k, l)`` -- equals ``<(K - L)^2>`` exactly."""
    return float(sum((k - l) ** 2 * p for (k, l), p in quasi.entries.items()))
