"""Truncated-Fock and spin operator algebra.

Every other module builds on the conventions fixed here. The composite
Hilbert space is an ordered tensor product

    spin(ion 1) (x) spin(ion 3) (x) fock(c.m. mode) (x) fock(wobbling mode)

and that factor order is used everywhere: kron products, reshapes and
partial traces all assume it. The central ion carries no spin degree of
freedom (it only enters through the motional modes), so two spin factors
suffice.

Matrices are dense complex numpy arrays. At the scale this package
targets (two modes, cutoff around 10-14 per mode, total dimension of a
few hundred) dense algebra is both simpler and faster than sparse
bookkeeping, and the dissipator densifies everything anyway.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "HilbertLayout",
    "Operator",
    "QuantumState",
    "fock_ladder",
    "embed",
    "partial_trace",
    "thermal_mix",
    "sigma_z",
    "sigma_ops",
    "basis_ket",
    "product_density",
]

HERMITICITY_TOL = 1e-12   # relative Frobenius, for constructor assertions
STATE_TRACE_TOL = 1e-9
STATE_HERM_TOL = 1e-9

sigma_z = np.diag([1.0 + 0.0j, -1.0 + 0.0j])


def sigma_ops() -> dict[str, np.ndarray]:
    """The 2x2 Pauli matrices keyed by '0', 'x', 'y', 'z'."""
    return {
        "0": np.eye(2, dtype=complex),
        "x": np.array([[0, 1], [1, 0]], dtype=complex),
        "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "z": sigma_z.copy(),
    }


@dataclass(frozen=True)
class HilbertLayout:
    """Factor structure of the composite Hilbert space.

    spin_dims lists the spin factors (each 2-dimensional; ions 1 and 3 in
    the standard layout), fock_dims the motional cutoffs, in mode order
    (c.m. first, then wobbling). Motion-only layouts (no spin factors)
    and single-mode layouts are allowed; they are used by reduced runs.
    """

    spin_dims: tuple[int, ...] = (2, 2)
    fock_dims: tuple[int, ...] = (10, 10)

    def __post_init__(self):
        if any(d != 2 for d in self.spin_dims):
            raise ConfigurationError("spin factors must be two-level")
        if any(n < 2 for n in self.fock_dims):
            raise ConfigurationError("Fock cutoffs must be >= 2")
        if not self.fock_dims:
            raise ConfigurationError("at least one motional mode is required")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.spin_dims + self.fock_dims

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    @property
    def n_spins(self) -> int:
        return len(self.spin_dims)

    @property
    def n_modes(self) -> int:
        return len(self.fock_dims)

    @property
    def total_dim(self) -> int:
        return prod(self.dims)

    @property
    def spin_dim(self) -> int:
        return prod(self.spin_dims) if self.spin_dims else 1

    @property
    def fock_dim(self) -> int:
        return prod(self.fock_dims)

    def fock_factor(self, mode: int) -> int:
        """Global factor index of motional mode `mode`."""
        return self.n_spins + mode

    def with_fock(self, fock_dims) -> "HilbertLayout":
        return HilbertLayout(self.spin_dims, tuple(fock_dims))


@dataclass
class Operator:
    """A dense operator tied to a layout.

    When `hermitian` (or `unitary`) is asserted at construction the
    matrix is verified to relative Frobenius tolerance 1e-12.
    """

    matrix: np.ndarray
    layout: HilbertLayout
    hermitian: bool = False
    unitary: bool = False

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        d = self.layout.total_dim
        if self.matrix.shape != (d, d):
            raise ConfigurationError(
                f"operator shape {self.matrix.shape} does not match layout dim {d}")
        scale = max(np.linalg.norm(self.matrix), 1.0)
        if self.hermitian:
            defect = np.linalg.norm(self.matrix - self.matrix.conj().T) / scale
            if defect > HERMITICITY_TOL:
                raise ConfigurationError(f"operator not Hermitian (defect {defect:.2e})")
        if self.unitary:
            d_ = self.matrix.shape[0]
            defect = np.linalg.norm(
                self.matrix @ self.matrix.conj().T - np.eye(d_)) / np.sqrt(d_)
            if defect > 1e-10:
                raise ConfigurationError(f"operator not unitary (defect {defect:.2e})")

    def dag(self) -> "Operator":
        return Operator(self.matrix.conj().T, self.layout,
                        hermitian=self.hermitian, unitary=self.unitary)

    def __matmul__(self, other):
        m = other.matrix if isinstance(other, Operator) else other
        return Operator(self.matrix @ m, self.layout)


@dataclass
class QuantumState:
    """Dense density matrix with layout and time stamp (seconds).

    Trace and Hermiticity are monitored (not silently repaired);
    positivity may be violated transiently by Redfield-type dynamics and
    is therefore only reported, never asserted.
    """

    rho: np.ndarray
    layout: HilbertLayout
    time: float = 0.0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=complex)
        d = self.layout.total_dim
        if self.rho.shape != (d, d):
            raise ConfigurationError(
                f"state shape {self.rho.shape} does not match layout dim {d}")

    def trace_defect(self) -> float:
        return abs(np.trace(self.rho) - 1.0)

    def herm_defect(self) -> float:
        return float(np.linalg.norm(self.rho - self.rho.conj().T))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))[0])

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    def validate(self):
        if self.trace_defect() > STATE_TRACE_TOL:
            raise ConfigurationError(f"state trace defect {self.trace_defect():.2e}")
        if self.herm_defect() > STATE_HERM_TOL:
            raise ConfigurationError(f"state Hermiticity defect {self.herm_defect():.2e}")
        return self


def fock_ladder(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation matrices at cutoff `n_max`.

    The annihilator has sqrt(n) on the first superdiagonal; the creator
    is its conjugate transpose. Truncation makes [a, a+] = 1 fail only
    in the highest Fock level, which is standard and accepted.
    """
    if n_max < 2:
        raise ConfigurationError(f"Fock cutoff must be >= 2, got {n_max}")
    a = np.diag(np.sqrt(np.arange(1, n_max, dtype=float)), k=1).astype(complex)
    return a, a.conj().T


def embed(factor_op: np.ndarray, position: int, layout: HilbertLayout) -> Operator:
    """Kronecker-embed a single-factor operator into the full space.

    Identities are placed on all other factors, respecting the fixed
    factor order spin1 (x) spin3 (x) cm (x) wb.
    """
    dims = layout.dims
    if not 0 <= position < len(dims):
        raise ConfigurationError(f"factor index {position} out of range for {dims}")
    op = np.asarray(factor_op, dtype=complex)
    if op.shape != (dims[position], dims[position]):
        raise ConfigurationError(
            f"factor operator shape {op.shape} does not match factor dim "
            f"{dims[position]} at position {position}")
    left = prod(dims[:position]) if position > 0 else 1
    right = prod(dims[position + 1:]) if position + 1 < len(dims) else 1
    full = np.kron(np.kron(np.eye(left), op), np.eye(right))
    return Operator(full, layout)


def partial_trace(state, keep) -> np.ndarray:
    """Trace out all factors not in `keep`; returns the reduced matrix.

    `state` may be a QuantumState or a bare matrix plus layout via
    partial_trace((rho, layout), keep). Factor indices in `keep` follow
    the fixed order; the result's factor order is the sorted `keep`.
    """
    if isinstance(state, QuantumState):
        rho, layout = state.rho, state.layout
    else:
        rho, layout = state
        rho = np.asarray(rho, dtype=complex)
    keep = sorted(set(int(k) for k in keep))
    dims = layout.dims
    if not keep:
        raise ConfigurationError("keep must name at least one factor")
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ConfigurationError(f"invalid factor indices {keep} for dims {dims}")

    n = len(dims)
    t = rho.reshape(dims + dims)
    # contract bra/ket index pairs of traced-out factors, highest first
    # so remaining axis numbers stay valid
    traced = [i for i in range(n) if i not in keep]
    for i in sorted(traced, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + (t.ndim // 2))
    d_keep = prod(dims[k] for k in keep)
    return t.reshape(d_keep, d_keep)


def thermal_mix(c0: float, c1: float, n_max: int) -> np.ndarray:
    """Two-level approximate thermal state diag(c0, c1, 0, ...) of one mode."""
    if not (0.0 <= c0 <= 1.0 and 0.0 <= c1 <= 1.0):
        raise ConfigurationError(f"populations must lie in [0, 1], got {c0}, {c1}")
    if abs(c0 + c1 - 1.0) > 1e-12:
        raise ConfigurationError(f"populations must sum to 1, got {c0 + c1!r}")
    rho = np.zeros((n_max, n_max), dtype=complex)
    rho[0, 0] = c0
    rho[1, 1] = c1
    return rho


def basis_ket(layout: HilbertLayout, spins: str = "", fock=()) -> np.ndarray:
    """Product basis ket |s1 s3, n_cm, n_wb>.

    `spins` uses 'u'/'d' per spin factor ('uu' = both up); `fock` lists
    one occupation number per mode.
    """
    if len(spins) != layout.n_spins:
        raise ConfigurationError(f"need {layout.n_spins} spin labels, got {spins!r}")
    fock = tuple(fock)
    if len(fock) != layout.n_modes:
        raise ConfigurationError(f"need {layout.n_modes} Fock labels, got {fock}")
    idx = []
    for ch in spins:
        if ch not in "ud":
            raise ConfigurationError(f"spin labels are 'u'/'d', got {ch!r}")
        idx.append(0 if ch == "u" else 1)
    for n, dim in zip(fock, layout.fock_dims):
        if not 0 <= n < dim:
            raise ConfigurationError(f"Fock label {n} outside cutoff {dim}")
        idx.append(n)
    flat = 0
    for i, d in zip(idx, layout.dims):
        flat = flat * d + i
    ket = np.zeros(layout.total_dim, dtype=complex)
    ket[flat] = 1.0
    return ket


def product_density(layout: HilbertLayout, spin_rho: np.ndarray | None,
                    mode_rhos) -> QuantumState:
    """Assemble rho_spin (x) rho_cm (x) rho_wb as a QuantumState at t=0."""
    parts = []
    if layout.n_spins:
        if spin_rho is None:
            raise ConfigurationError("layout has spin factors but no spin state given")
        spin_rho = np.asarray(spin_rho, dtype=complex)
        if spin_rho.shape != (layout.spin_dim, layout.spin_dim):
            raise ConfigurationError("spin state dimension mismatch")
        parts.append(spin_rho)
    mode_rhos = list(mode_rhos)
    if len(mode_rhos) != layout.n_modes:
        raise ConfigurationError(f"need {layout.n_modes} mode states")
    for m, dim in zip(mode_rhos, layout.fock_dims):
        m = np.asarray(m, dtype=complex)
        if m.shape != (dim, dim):
            raise ConfigurationError("mode state dimension mismatch")
        parts.append(m)
    rho = parts[0]
    for p in parts[1:]:
        rho = np.kron(rho, p)
    return QuantumState(rho, layout)
