"""Core state and matrix types for a two-qudit (frequency x time) register.

Index convention is frequency-major throughout the package: the basis state
|m>_f |n>_t lives at flat index ``i = m * d_t + n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-10


@dataclass(frozen=True)
class QuditDims:
    """Dimensions of the frequency (control) and time (target) qudits."""

    d_f: int
    d_t: int

    def __post_init__(self):
        if self.d_f < 1 or self.d_t < 1:
            raise ValueError(f"qudit dimensions must be positive, got {self}")

    @property
    def total(self) -> int:
        return self.d_f * self.d_t

    def flat_index(self, m: int, n: int) -> int:
        """Flat index of |m>_f |n>_t."""
        if not (0 <= m < self.d_f):
            raise ValueError(f"frequency index {m} out of range [0, {self.d_f})")
        if not (0 <= n < self.d_t):
            raise ValueError(f"time index {n} out of range [0, {self.d_t})")
        return m * self.d_t + n

    def unflatten(self, i: int) -> tuple[int, int]:
        """Inverse of flat_index: i -> (m, n)."""
        if not (0 <= i < self.total):
            raise ValueError(f"flat index {i} out of range [0, {self.total})")
        return divmod(i, self.d_t)


@dataclass(frozen=True)
class PureState:
    """Normalized complex amplitude vector over the two-qudit basis."""

    dims: QuditDims
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amp)
        if amp.shape != (self.dims.total,):
            raise ValueError(
                f"amplitude vector has shape {amp.shape}, expected ({self.dims.total},)"
            )
        norm = float(np.sum(np.abs(amp) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |a|^2 = {norm!r}")

    def probability(self, m: int, n: int) -> float:
        return float(np.abs(self.amplitudes[self.dims.flat_index(m, n)]) ** 2)


@dataclass(frozen=True)
class GateMatrix:
    """Dense complex square matrix, optionally checked for unitarity."""

    dim: int
    entries: np.ndarray = field(repr=False)
    unitary: bool = True

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", mat)
        if mat.shape != (self.dim, self.dim):
            raise ValueError(f"matrix has shape {mat.shape}, expected ({self.dim}, {self.dim})")
        if self.unitary:
            dev = np.max(np.abs(mat.conj().T @ mat - np.eye(self.dim)))
            if dev > NORM_TOL:
                raise ValueError(f"matrix flagged unitary but ||U^H U - I||_max = {dev:.3e}")

    def dagger(self) -> "GateMatrix":
        return GateMatrix(self.dim, self.entries.conj().T, unitary=self.unitary)

    def __matmul__(self, other: "GateMatrix") -> "GateMatrix":
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return GateMatrix(
            self.dim, self.entries @ other.entries, unitary=self.unitary and other.unitary
        )


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix."""

    dim: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", mat)
        if mat.shape != (self.dim, self.dim):
            raise ValueError(f"matrix has shape {mat.shape}, expected ({self.dim}, {self.dim})")
        if np.max(np.abs(mat - mat.conj().T)) > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        eig = np.linalg.eigvalsh(mat)
        if eig.min() < -NORM_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {eig.min():.3e}")


def basis_state(m: int, n: int, dims: QuditDims) -> PureState:
    """Product basis state |m>_f |n>_t."""
    amp = np.zeros(dims.total, dtype=complex)
    amp[dims.flat_index(m, n)] = 1.0
    return PureState(dims, amp)


def pure_state(amplitudes, dims: QuditDims, normalize: bool = False) -> PureState:
    """Build a PureState from raw amplitudes, optionally normalizing first."""
    amp = np.asarray(amplitudes, dtype=complex)
    if normalize:
        norm = np.linalg.norm(amp)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        amp = amp / norm
    return PureState(dims, amp)


def tensor(u_f: GateMatrix, u_t: GateMatrix) -> GateMatrix:
    """Kronecker product U_f (x) U_t, consistent with frequency-major indexing."""
    return GateMatrix(
        u_f.dim * u_t.dim,
        np.kron(u_f.entries, u_t.entries),
        unitary=u_f.unitary and u_t.unitary,
    )


def apply(u: GateMatrix, s: PureState) -> PureState:
    """Apply a gate matrix to a state. No renormalization (unitaries preserve norm)."""
    if u.dim != s.dims.total:
        raise ValueError(f"gate dim {u.dim} does not match state dim {s.dims.total}")
    return PureState(s.dims, u.entries @ s.amplitudes)


def overlap_probability(a: PureState, b: PureState) -> float:
    """Projection probability |<a|b>|^2."""
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")
    return float(np.abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def density_from_pure(s: PureState) -> DensityMatrix:
    return DensityMatrix(s.dims.total, np.outer(s.amplitudes, s.amplitudes.conj()))


def format_complex(z: complex) -> str:
    """Render a complex number as 're+imj' text, round-trippable via complex()."""
    return f"{float(z.real)!r}{float(z.imag):+}j"


def save_complex_matrix_csv(path, mat: np.ndarray) -> None:
    """Write a complex matrix as CSV, one row per matrix row, entries as 're+imj'."""
    mat = np.asarray(mat, dtype=complex)
    with open(path, "w") as fh:
        for row in mat:
            fh.write(",".join(format_complex(z) for z in row) + "\n")


def load_complex_matrix_csv(path) -> np.ndarray:
    """Inverse of save_complex_matrix_csv."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([complex(tok) for tok in line.split(",")])
    return np.array(rows, dtype=complex)
