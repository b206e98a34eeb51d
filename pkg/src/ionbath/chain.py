"""Closed-system physics of the driven three-ion chain.

Everything here lives in the frame co-rotating with the Raman beatnote
omega_R, where (after the rotating-wave approximation) the chain
Hamiltonian is time independent:

    H_chain = -hbar sum_mu delta_mu n_mu
              - (hbar/2) sum_{j=1,3} sum_mu Omega_mu b_{j,mu} (a_mu + a_mu+) sigma_j^z

with delta_mu = omega_R - omega_mu. The propagator generated by the
drive term (in the interaction picture of the phonon part) closes in
exact form -- its Magnus series terminates at second order -- and is
exposed as `analytic_propagator`. That closed form doubles as the
oracle against which the numerical integrators are validated.

Sign conventions: the c.m. detuning is taken positive
(omega_R = omega_cm + delta_cm). With this choice the closed-system
two-qubit gate at t_gate = 2*pi/delta_cm realizes the diagonal unitary
Diag{1, i, i, 1} (up to a global phase); see `gate_branch`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import HBAR, PI
from .errors import ConfigurationError, SingularDetuningError
from .hilbert import HilbertLayout, Operator, embed, fock_ladder, sigma_z

__all__ = [
    "ModeSpec",
    "ChainParams",
    "MODE_EIGENVECTORS",
    "MODE_EIGENVALUES",
    "default_modes",
    "build_H_chain",
    "phi",
    "spin_phase_J",
    "analytic_propagator",
    "rotating_frame_propagator",
    "x_R_operator",
    "x_R_shifted",
    "gate_branch",
    "ideal_gate_diagonal",
]

# Normal modes of three equal ions on a line. The structural eigenvalue
# lambda gives omega_mode = omega_cm * sqrt(lambda).
MODE_EIGENVECTORS = {
    "cm": np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0),
    "st": np.array([-1.0, 0.0, 1.0]) / np.sqrt(2.0),
    "wb": np.array([1.0, -2.0, 1.0]) / np.sqrt(6.0),
}
MODE_EIGENVALUES = {"cm": 1.0, "st": 3.0, "wb": 29.0 / 5.0}

QUBIT_IONS = (1, 3)  # the central ion (j=2) carries no spin


@dataclass(frozen=True)
class ModeSpec:
    """One normal mode: geometry, frequency, detuning and drive strength.

    `mode_length` is sqrt(hbar / (2 M omega)), the oscillator length of
    the mode; it is kept separate from the dimensionless structural
    eigenvalue to avoid overloading one symbol with two meanings.
    """

    name: str
    eigenvector: np.ndarray      # 3-vector, unit norm
    eigenvalue: float            # structural, dimensionless
    omega: float                 # rad/s
    detuning: float              # rad/s, omega_R - omega
    drive: float                 # rad/s, Omega_mu
    mode_length: float           # m

    def b(self, ion: int) -> float:
        """Amplitude of this mode at ion `ion` (1-based)."""
        return float(self.eigenvector[ion - 1])


@dataclass(frozen=True)
class ChainParams:
    """Chain, drive and timing parameters in SI units.

    `raman_k` only feeds the Lamb-Dicke/force report; the dynamics is
    fully determined by the per-mode drive strengths.
    """

    ion_mass: float              # kg
    omega_R: float               # rad/s
    modes: tuple[ModeSpec, ...]
    t_gate: float                # s
    raman_k: float | None = None  # 1/m

    def __post_init__(self):
        for m in self.modes:
            if abs(m.detuning - (self.omega_R - m.omega)) > 1e-6 * abs(self.omega_R):
                raise ConfigurationError(
                    f"mode {m.name}: detuning {m.detuning} != omega_R - omega")

    @property
    def omega_scale(self) -> float:
        """Internal frequency unit (the first mode's omega, i.e. c.m.)."""
        return self.modes[0].omega

    def mode(self, name: str) -> ModeSpec:
        for m in self.modes:
            if m.name == name:
                return m
        raise ConfigurationError(f"no mode named {name!r}")

    def lamb_dicke_report(self) -> dict:
        """eta_mu = k_R * l_mu and force magnitude, reporting only."""
        if self.raman_k is None:
            return {}
        out = {}
        for m in self.modes:
            eta = self.raman_k * m.mode_length
            out[m.name] = {"eta": eta, "force_N": HBAR * m.drive * self.raman_k / eta}
        return out


def default_modes(omega_cm: float, delta_cm: float, Omega_cm: float, M: float,
                  raman_k: float | None = None,
                  mode_names: tuple[str, ...] = ("cm", "wb")) -> ChainParams:
    """Build ChainParams from the c.m. numbers, deriving the wobbling mode.

    omega_wb = omega_cm*sqrt(29/5), Omega_wb = Omega_cm*sqrt(omega_cm/omega_wb)
    (drive scaling with the mode's Lamb-Dicke parameter), delta_wb =
    omega_R - omega_wb with omega_R = omega_cm + delta_cm. The stretching
    mode never couples to the central ion and is not simulated.
    """
    if omega_cm <= 0 or delta_cm <= 0 or Omega_cm <= 0 or M <= 0:
        raise ConfigurationError("omega_cm, delta_cm, Omega_cm and M must be positive")
    omega_R = omega_cm + delta_cm

    def length(omega):
        return np.sqrt(HBAR / (2.0 * M * omega))

    specs = []
    for name in mode_names:
        if name == "cm":
            omega, drive = omega_cm, Omega_cm
        elif name == "wb":
            omega = omega_cm * np.sqrt(MODE_EIGENVALUES["wb"])
            drive = Omega_cm * np.sqrt(omega_cm / omega)
        else:
            raise ConfigurationError(f"unsupported mode {name!r} (use 'cm' and/or 'wb')")
        specs.append(ModeSpec(
            name=name,
            eigenvector=MODE_EIGENVECTORS[name].copy(),
            eigenvalue=MODE_EIGENVALUES[name],
            omega=omega,
            detuning=omega_R - omega,
            drive=drive,
            mode_length=length(omega),
        ))
    if raman_k is None:
        # default reporting choice: eta_cm = 0.1
        raman_k = 0.1 / specs[0].mode_length
    return ChainParams(ion_mass=M, omega_R=omega_R, modes=tuple(specs),
                       t_gate=2.0 * PI / delta_cm, raman_k=raman_k)


def _check_layout(params: ChainParams, layout: HilbertLayout):
    if layout.n_modes != len(params.modes):
        raise ConfigurationError(
            f"layout has {layout.n_modes} modes, params have {len(params.modes)}")
    if layout.n_spins not in (0, 2):
        raise ConfigurationError("layout must carry two spins (or none for drive-off runs)")
    if layout.n_spins == 0 and any(m.drive != 0.0 for m in params.modes):
        raise ConfigurationError("motion-only layout requires zero drive")


def _mode_ladders(layout: HilbertLayout):
    """Embedded (a, a+) per mode, in layout order."""
    out = []
    for k, n in enumerate(layout.fock_dims):
        a, adag = fock_ladder(n)
        pos = layout.fock_factor(k)
        out.append((embed(a, pos, layout).matrix, embed(adag, pos, layout).matrix))
    return out


def _spin_z(layout: HilbertLayout):
    """Embedded sigma_j^z for j = 1, 3 (empty for motion-only layouts)."""
    if layout.n_spins == 0:
        return {}
    return {1: embed(sigma_z, 0, layout).matrix,
            3: embed(sigma_z, 1, layout).matrix}


def build_H_chain(params: ChainParams, layout: HilbertLayout) -> Operator:
    """The rotating-frame chain Hamiltonian, in joules."""
    _check_layout(params, layout)
    ladders = _mode_ladders(layout)
    sz = _spin_z(layout)
    H = np.zeros((layout.total_dim, layout.total_dim), dtype=complex)
    for (a, adag), m in zip(ladders, params.modes):
        H -= HBAR * m.detuning * (adag @ a)
        if m.drive and layout.n_spins:
            x = a + adag
            for j in QUBIT_IONS:
                H -= 0.5 * HBAR * m.drive * m.b(j) * (x @ sz[j])
    return Operator(H, layout, hermitian=True)


def phi(j: int, mode: ModeSpec, t: float) -> complex:
    """Spin-dependent displacement amplitude of ion j in one mode.

    phi_{j,mu}(t) = (Omega_mu / 2 delta_mu) b_{j,mu} (1 - exp(-i delta_mu t));
    vanishes whenever t is an integer multiple of 2*pi/delta_mu.
    """
    if mode.detuning == 0.0:
        raise SingularDetuningError(
            f"mode {mode.name}: resonant drive has no closed-form displacement")
    return (mode.drive / (2.0 * mode.detuning)) * mode.b(j) * (
        1.0 - np.exp(-1j * mode.detuning * t))


def spin_phase_J(i: int, j: int, t: float, params: ChainParams,
                 modes=None) -> float:
    """Accumulated spin-spin phase J_{i,j}(t), summed over the given modes.

    J_{i,j}(t) = (1/4) sum_mu Omega_mu^2 (b_{i,mu} b_{j,mu} / delta_mu^2)
                 (delta_mu t - sin(delta_mu t))
    """
    total = 0.0
    for m in (modes if modes is not None else params.modes):
        if m.detuning == 0.0:
            raise SingularDetuningError(f"mode {m.name}: resonant drive")
        x = m.detuning * t
        total += 0.25 * m.drive**2 * m.b(i) * m.b(j) / m.detuning**2 * (x - np.sin(x))
    return float(total)


def _expm_antihermitian(K: np.ndarray) -> np.ndarray:
    """exp(K) for anti-Hermitian K via eigendecomposition (exactly unitary)."""
    w, V = np.linalg.eigh(1j * K)
    return (V * np.exp(-1j * w)) @ V.conj().T


def analytic_propagator(t: float, params: ChainParams, layout: HilbertLayout) -> Operator:
    """Closed-form propagator U_I(t) = U_sp(t) U_ss(t) of the drive term.

    This is the interaction-picture propagator with respect to the
    phonon part; multiply by exp(-i H_p t / hbar) (see
    `rotating_frame_propagator`) to evolve rotating-frame states.
    """
    _check_layout(params, layout)
    d = layout.total_dim
    if layout.n_spins == 0:
        return Operator(np.eye(d, dtype=complex), layout, unitary=True)
    ladders = _mode_ladders(layout)
    sz = _spin_z(layout)

    K = np.zeros((d, d), dtype=complex)
    for (a, adag), m in zip(ladders, params.modes):
        for j in QUBIT_IONS:
            p = phi(j, m, t)
            K += (p * adag - np.conj(p) * a) @ sz[j]
    U_sp = _expm_antihermitian(K)

    # U_ss is diagonal: exp(-i sum_{i,j} J_ij s_i s_j) on each spin sector
    phase = np.zeros((d, d), dtype=complex)
    for i in QUBIT_IONS:
        for j in QUBIT_IONS:
            J = spin_phase_J(i, j, t, params)
            if i == j:
                phase -= 1j * J * np.eye(d)
            else:
                phase -= 1j * J * (sz[i] @ sz[j])
    U_ss = np.diag(np.exp(np.diag(phase)))
    return Operator(U_sp @ U_ss, layout, unitary=True)


def rotating_frame_propagator(t: float, params: ChainParams,
                              layout: HilbertLayout) -> Operator:
    """Full rotating-frame propagator exp(-i H_chain t / hbar).

    Assembled as exp(-i H_p t/hbar) * U_I(t), which is exact because the
    drive propagator is defined in the phonon interaction picture.
    """
    _check_layout(params, layout)
    ladders = _mode_ladders(layout)
    d = layout.total_dim
    diag = np.zeros(d, dtype=complex)
    for (a, adag), m in zip(ladders, params.modes):
        diag += -m.detuning * np.real(np.diag(adag @ a))
    U0 = np.diag(np.exp(-1j * diag * t))
    return Operator(U0 @ analytic_propagator(t, params, layout).matrix,
                    layout, unitary=True)


def x_R_operator(t: float, params: ChainParams, layout: HilbertLayout) -> Operator:
    """Position operator of the central ion in the rotating frame, in meters.

    x_R(t) = sum_mu b_{2,mu} l_mu (a_mu e^{-i omega_R t} + a_mu+ e^{+i omega_R t})
    """
    _check_layout(params, layout)
    ladders = _mode_ladders(layout)
    x = np.zeros((layout.total_dim,) * 2, dtype=complex)
    em = np.exp(-1j * params.omega_R * t)
    for (a, adag), m in zip(ladders, params.modes):
        x += m.b(2) * m.mode_length * (em * a + np.conj(em) * adag)
    return Operator(x, layout, hermitian=True)


def x_R_shifted(t: float, tau: float, params: ChainParams,
                layout: HilbertLayout) -> Operator:
    """Central-ion position conjugated backwards by the chain Hamiltonian.

    Closed form of exp(-i H_chain tau/hbar) x_R(t) exp(+i H_chain tau/hbar):
    each ladder operator picks up exp(-/+ i delta_mu tau) and the drive
    adds a spin-dependent c-number displacement. Falls back to
    x_R_operator at tau = 0.
    """
    _check_layout(params, layout)
    ladders = _mode_ladders(layout)
    sz = _spin_z(layout)
    d = layout.total_dim
    x = np.zeros((d, d), dtype=complex)
    em = np.exp(-1j * params.omega_R * t)
    ep = np.conj(em)
    for (a, adag), m in zip(ladders, params.modes):
        fm = np.exp(-1j * m.detuning * tau)
        fp = np.conj(fm)
        x += m.b(2) * m.mode_length * (fm * em * a + fp * ep * adag)
        if m.drive and layout.n_spins:
            c = fm * em + fp * ep - 2.0 * np.cos(params.omega_R * t)
            coef = m.b(2) * m.mode_length * m.drive / (2.0 * m.detuning)
            for j in QUBIT_IONS:
                x += coef * m.b(j) * c * sz[j]
    return Operator(x, layout, hermitian=True)


def ideal_gate_diagonal(branch: str) -> np.ndarray:
    """Diagonal of the target two-qubit unitary for the given branch."""
    if branch == "+i":
        return np.array([1.0, 1j, 1j, 1.0])
    if branch == "-i":
        return np.array([1.0, -1j, -1j, 1.0])
    raise ConfigurationError(f"unknown gate branch {branch!r}")


def gate_branch(params: ChainParams) -> str:
    """Which diagonal unitary the closed system realizes at t_gate.

    The detuning sign convention fixes the rotation sense of the
    geometric phase; both Diag{1,-i,-i,1} and its conjugate are locally
    equivalent gates, so the realized branch is determined numerically
    here and used consistently for the ideal channel. The returned flag
    is recorded in run manifests.
    """
    cm = params.mode("cm")
    phases = []
    for s1, s3 in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        J = 0.25 * cm.drive**2 * cm.b(1) * cm.b(3) / cm.detuning**2 * (
            cm.detuning * params.t_gate - np.sin(cm.detuning * params.t_gate))
        phases.append(np.exp(-2j * J * s1 * s3))
    u = np.array(phases) / phases[0]
    for branch in ("+i", "-i"):
        target = ideal_gate_diagonal(branch)
        if np.max(np.abs(u - target / target[0])) < 1e-9:
            return branch
    raise ConfigurationError("realized gate is not a quarter-phase diagonal; "
                             "check drive calibration (Omega_cm/delta_cm = sqrt(3)/2)")
