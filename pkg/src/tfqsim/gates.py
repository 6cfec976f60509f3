"""Ideal generalized-Pauli, Weyl, and two-qudit gate constructors.

These matrices are the algebraic ground truth the photonic circuit simulation
is checked against, and the operator basis for process matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import GateMatrix, QuditDims


@dataclass(frozen=True)
class WeylIndex:
    """Exponents (a, b) of a Weyl operator Z^a X^b on a d-level system."""

    a: int
    b: int
    d: int

    def __post_init__(self):
        if not (0 <= self.a < self.d and 0 <= self.b < self.d):
            raise ValueError(f"Weyl exponents ({self.a}, {self.b}) out of range for d={self.d}")

    @property
    def flat(self) -> int:
        """Flat index k = a*d + b; enumerates I, X, X^2, Z, ZX, ... for d=3."""
        return self.a * self.d + self.b

    @classmethod
    def from_flat(cls, k: int, d: int) -> "WeylIndex":
        if not (0 <= k < d * d):
            raise ValueError(f"flat Weyl index {k} out of range [0, {d * d})")
        return cls(k // d, k % d, d)


def identity(d: int) -> GateMatrix:
    return GateMatrix(d, np.eye(d, dtype=complex))


def generalized_x(d: int) -> GateMatrix:
    """Cyclic shift X|n> = |n (+) 1>, addition modulo d."""
    if d < 2:
        raise ValueError(f"qudit dimension must be >= 2, got {d}")
    mat = np.zeros((d, d), dtype=complex)
    for n in range(d):
        mat[(n + 1) % d, n] = 1.0
    return GateMatrix(d, mat)


def generalized_z(d: int) -> GateMatrix:
    """Phase gate Z|n> = exp(2*pi*i*n/d)|n>."""
    if d < 2:
        raise ValueError(f"qudit dimension must be >= 2, got {d}")
    omega = np.exp(2j * np.pi / d)
    return GateMatrix(d, np.diag(omega ** np.arange(d)))


def weyl(a: int, b: int, d: int) -> GateMatrix:
    """Weyl operator Z^a X^b."""
    WeylIndex(a, b, d)  # range check
    z = generalized_z(d).entries
    x = generalized_x(d).entries
    mat = np.linalg.matrix_power(z, a) @ np.linalg.matrix_power(x, b)
    return GateMatrix(d, mat)


def weyl_operators(d: int) -> list[GateMatrix]:
    """All d^2 Weyl operators in flat-index order."""
    return [weyl(k // d, k % d, d) for k in range(d * d)]


def cinc(dims: QuditDims, control_value: int | None = None) -> GateMatrix:
    """Controlled increment: X on the time qudit iff the frequency qudit is |cv>.

    Defaults to control_value = d_f - 1, the highest frequency bin.
    """
    if control_value is None:
        control_value = dims.d_f - 1
    if not (0 <= control_value < dims.d_f):
        raise ValueError(f"control value {control_value} out of range [0, {dims.d_f})")
    blocks = []
    x_t = generalized_x(dims.d_t).entries
    i_t = np.eye(dims.d_t, dtype=complex)
    for m in range(dims.d_f):
        blocks.append(x_t if m == control_value else i_t)
    mat = np.zeros((dims.total, dims.total), dtype=complex)
    for m, blk in enumerate(blocks):
        lo = m * dims.d_t
        mat[lo : lo + dims.d_t, lo : lo + dims.d_t] = blk
    return GateMatrix(dims.total, mat)


def sum_gate(dims: QuditDims) -> GateMatrix:
    """SUM gate |m>_f |n>_t -> |m>_f |n (+) m>_t, the qudit CNOT generalization."""
    if dims.d_f != dims.d_t:
        raise ValueError(f"SUM requires equal qudit dimensions, got {dims}")
    d = dims.d_t
    x = generalized_x(d).entries
    mat = np.zeros((dims.total, dims.total), dtype=complex)
    for m in range(d):
        lo = m * d
        mat[lo : lo + d, lo : lo + d] = np.linalg.matrix_power(x, m)
    return GateMatrix(dims.total, mat)


def xor_gate(dims: QuditDims) -> GateMatrix:
    """XOR gate |m>_f |n>_t -> |m>_f |n (-) m>_t, the inverse of SUM."""
    if dims.d_f != dims.d_t:
        raise ValueError(f"XOR requires equal qudit dimensions, got {dims}")
    d = dims.d_t
    x = generalized_x(d).entries
    mat = np.zeros((dims.total, dims.total), dtype=complex)
    for m in range(d):
        lo = m * d
        mat[lo : lo + d, lo : lo + d] = np.linalg.matrix_power(x, (d - m) % d)
    return GateMatrix(dims.total, mat)


def swap_gate(dims: QuditDims) -> GateMatrix:
    """Exchange the two qudits: |m>_f |n>_t -> |n>_f |m>_t."""
    if dims.d_f != dims.d_t:
        raise ValueError(f"SWAP requires equal qudit dimensions, got {dims}")
    d = dims.d_t
    mat = np.zeros((dims.total, dims.total), dtype=complex)
    for m in range(d):
        for n in range(d):
            mat[n * d + m, m * d + n] = 1.0
    return GateMatrix(dims.total, mat)
