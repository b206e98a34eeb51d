"""Atom-ion scattering physics and dissipator coefficients.

The atom-ion interaction is the polarization potential -C4/r^4,
regularized at short range by two length parameters (b, c):

    V(r) = -C4 (r^2 - c^2) / [(r^2 + c^2) (b^2 + r^2)^2]

which is finite at the origin and has an analytic first-order Born
amplitude f(q). The scattering length of this potential is *defined*
here by the zero-energy radial solution (outward integration matched to
the exact -1/r^4 zero-energy tail); the Born limit -f(q->0) serves as a
weak-coupling cross-check only. `calibrate_potential` inverts the map,
root-finding the b that realizes a requested scattering length at fixed
c on a branch with a controlled number of two-body bound states.

All dissipator coefficients downstream of f(q) (the per-mode momenta
q_mu = sqrt(2 m omega_mu / hbar), Bose occupations, the h_mu couplings
and the damping prefactors) are pure functions of the bath and chain
parameters and are recomputable from any run manifest.

Internally lengths are measured in R* = sqrt(2 mu_red C4)/hbar and
energies in E* = hbar^2/(2 mu_red R*^2); the public API is SI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .chain import ChainParams
from .constants import E_CHARGE, EPS0, HBAR, KB, PI, AtomSpecies, IonSpecies
from .errors import CalibrationError, ConfigurationError, ResonanceError

__all__ = [
    "SpeciesParams",
    "PotentialParams",
    "BathParams",
    "DissipatorCoeffs",
    "make_species",
    "regularized_potential",
    "born_amplitude",
    "born_amplitude_q0",
    "scattering_length",
    "calibrate_potential",
    "bose_occupation",
    "dissipator_coeffs",
]

_RECOMPUTE_TOL = 1e-9


@dataclass(frozen=True)
class SpeciesParams:
    """Atom/ion pair with derived interaction scales (SI)."""

    atom_mass: float        # kg
    ion_mass: float         # kg
    reduced_mass: float     # kg
    polarizability: float   # C^2 m^2 / J
    C4: float               # J m^4
    R_star: float           # m
    E_star: float           # J
    statistics: str = "bose"

    def __post_init__(self):
        mu = self.atom_mass * self.ion_mass / (self.atom_mass + self.ion_mass)
        if abs(mu - self.reduced_mass) > _RECOMPUTE_TOL * mu:
            raise ConfigurationError("reduced mass inconsistent with atom/ion masses")
        r = math.sqrt(2.0 * self.reduced_mass * self.C4) / HBAR
        if abs(r - self.R_star) > _RECOMPUTE_TOL * r:
            raise ConfigurationError("R_star inconsistent with C4 and reduced mass")
        e = HBAR**2 / (2.0 * self.reduced_mass * self.R_star**2)
        if abs(e - self.E_star) > _RECOMPUTE_TOL * e:
            raise ConfigurationError("E_star inconsistent with R_star")


def make_species(atom: AtomSpecies, ion: IonSpecies) -> SpeciesParams:
    """Derive C4, R* and E* for an atom-ion pair.

    C4 = alpha e^2 / (2 (4 pi eps0)^2) with alpha the SI polarizability;
    equivalently (alpha_volume e^2 / 2) / (4 pi eps0).
    """
    mu = atom.mass * ion.mass / (atom.mass + ion.mass)
    C4 = atom.polarizability * E_CHARGE**2 / (2.0 * (4.0 * PI * EPS0) ** 2)
    R_star = math.sqrt(2.0 * mu * C4) / HBAR
    E_star = HBAR**2 / (2.0 * mu * R_star**2)
    return SpeciesParams(atom_mass=atom.mass, ion_mass=ion.mass, reduced_mass=mu,
                         polarizability=atom.polarizability, C4=C4,
                         R_star=R_star, E_star=E_star, statistics=atom.statistics)


@dataclass(frozen=True)
class PotentialParams:
    """Regularization lengths and the calibrated scattering length (SI).

    b and c must be positive and distinct (the Born amplitude carries a
    (b^2-c^2)^2 denominator). Both orderings are physical: b > c gives a
    weak short-range barrier, b < c a repulsive core out to ~c with the
    polarization well beyond; the default calibration family lives at
    b < c, which is where the gas-coupling tune-out can coexist with a
    scattering length of order -R*.
    """

    b: float                    # m
    c: float                    # m
    a_ai: float                 # m, zero-energy scattering length
    bound_state_count: int = -1  # diagnostic; -1 = not determined

    def __post_init__(self):
        if self.b <= 0.0 or self.c <= 0.0:
            raise ConfigurationError(f"need b, c > 0; got b={self.b}, c={self.c}")
        if abs(self.b - self.c) < 1e-9 * self.c:
            raise ConfigurationError(
                f"degenerate b = c rejected (Born amplitude singular); got {self.b}")


@dataclass(frozen=True)
class BathParams:
    """Gas parameters plus the global dissipator rate Gamma."""

    species: SpeciesParams
    potential: PotentialParams
    density: float            # 1/m^3
    temperature: float        # K
    chemical_potential: float  # J
    Gamma: float              # 1/(m s), 2 pi m hbar n0 / (3 mu_red^2)

    def __post_init__(self):
        g = gamma_rate(self.species, self.density)
        if abs(g - self.Gamma) > _RECOMPUTE_TOL * g:
            raise ConfigurationError("Gamma inconsistent with (m, n0, mu_red)")


def gamma_rate(species: SpeciesParams, density: float) -> float:
    return 2.0 * PI * species.atom_mass * HBAR * density / (3.0 * species.reduced_mass**2)


@dataclass(frozen=True)
class DissipatorCoeffs:
    """Precomputed mode-resolved couplings for the gas dissipator.

    Per mode (in chain-params order): the probe momentum q_mu, its Bose
    occupation n_q_mu, the spontaneous coupling g_mu = b2 l_mu |f(q_mu)|^2 q_mu^3
    (dimensionless), and the drive-induced couplings h_mu, h_mu_nq.
    Globally: q_R and its occupation. Everything is recomputable from
    (BathParams, ChainParams).
    """

    mode_names: tuple[str, ...]
    q_mu: tuple[float, ...]         # 1/m
    n_q_mu: tuple[float, ...]
    g_mu: tuple[float, ...]         # alpha-operator prefactor, dimensionless
    h_mu: tuple[float, ...]         # dimensionless
    h_mu_nq: tuple[float, ...]      # dimensionless
    q_R: float                      # 1/m
    n_q_R: float
    Gamma: float                    # 1/(m s)


# ---------------------------------------------------------------------------
# potential and Born amplitude


def regularized_potential(r, pot: PotentialParams, species: SpeciesParams):
    """V(r) in joules; finite (and repulsive, C4/b^4) at the origin."""
    r = np.asarray(r, dtype=float)
    r2 = r * r
    return -species.C4 * (r2 - pot.c**2) / ((r2 + pot.c**2) * (pot.b**2 + r2) ** 2)


def born_amplitude(q, pot: PotentialParams, species: SpeciesParams):
    """First-order Born scattering amplitude f(q) of the regularized
    potential, in meters (signed).

    f(q) = (c^2 pi R*^2 / ((b^2-c^2)^2 q)) *
           { e^{-bq} [1 + (b^4-c^4) q / (4 b c^2)] - e^{-cq} }

    The q -> 0 limit is `born_amplitude_q0`; q must be positive here.
    """
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0):
        raise ConfigurationError("born_amplitude needs q > 0; use born_amplitude_q0")
    b, c = pot.b, pot.c
    pref = c**2 * PI * species.R_star**2 / ((b**2 - c**2) ** 2 * q)
    val = pref * (np.exp(-b * q) * (1.0 + (b**4 - c**4) * q / (4.0 * b * c**2))
                  - np.exp(-c * q))
    return val if val.ndim else float(val)


def born_amplitude_q0(pot: PotentialParams, species: SpeciesParams) -> float:
    """Zero-momentum limit of f(q): pi R*^2 (b^2 + 2bc - c^2) / (4 b (b+c)^2)."""
    b, c = pot.b, pot.c
    return PI * species.R_star**2 * (b**2 + 2 * b * c - c**2) / (4.0 * b * (b + c) ** 2)


# ---------------------------------------------------------------------------
# zero-energy radial problem (lengths in R*, energies in E*)


def _v_tilde(x, beta, gamma):
    x2 = x * x
    return -(x2 - gamma**2) / ((x2 + gamma**2) * (beta**2 + x2) ** 2)


X_START = 1e-3
X_END = 50.0
X_MATCH = 30.0


try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is a hard dependency
    def _njit(*a, **k):
        def wrap(f):
            return f
        return wrap(a[0]) if a and callable(a[0]) else wrap


@_njit(cache=True)
def _integrate_radial(beta, gamma, strength, h, x_start, x_end, x_match):
    """Fixed-step RK4 for u'' = strength*Vt(x)*u; compiled hot loop.

    Returns (xs, us, nodes) with (xs, us) sampled on [x_match, x_end].
    Rescaling by positive factors keeps the growth inside double range
    without touching node counting or the tail-coefficient ratio.
    """
    n_steps = int(math.ceil((x_end - x_start) / h))
    h = (x_end - x_start) / n_steps
    x = x_start
    g2 = gamma * gamma
    b2 = beta * beta

    def _vt(x):
        x2 = x * x
        return -(x2 - g2) / ((x2 + g2) * (b2 + x2) ** 2)

    u0pp = strength * _vt(x_start)
    u = x_start * (1.0 + u0pp * x_start**2 / 6.0)
    du = 1.0 + u0pp * x_start**2 / 2.0
    nodes = 0
    prev_sign = 0
    cap = max(64, int(math.ceil((x_end - x_match) / h)) + 2)
    xs = np.empty(cap)
    us = np.empty(cap)
    m_count = 0
    for _ in range(n_steps):
        k1u = du
        k1v = strength * _vt(x) * u
        k2u = du + 0.5 * h * k1v
        k2v = strength * _vt(x + 0.5 * h) * (u + 0.5 * h * k1u)
        k3u = du + 0.5 * h * k2v
        k3v = strength * _vt(x + 0.5 * h) * (u + 0.5 * h * k2u)
        k4u = du + h * k3v
        k4v = strength * _vt(x + h) * (u + h * k3u)
        u += (h / 6.0) * (k1u + 2 * k2u + 2 * k3u + k4u)
        du += (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        x += h
        s = 0
        if u > 0:
            s = 1
        elif u < 0:
            s = -1
        if s != 0:
            if prev_sign != 0 and s != prev_sign:
                nodes += 1
            prev_sign = s
        m = max(abs(u), abs(du))
        if m > 1e200:
            u /= m
            du /= m
        if x >= x_match and m_count < cap:
            xs[m_count] = x
            us[m_count] = u
            m_count += 1
    return xs[:m_count], us[:m_count], nodes


def _radial_solution(beta: float, gamma: float, strength: float, h: float):
    """Integrate u'' = strength * Vt(x) u outward; series start at the origin.

    Starting with u = 0 at x > 0 would admix the irregular solution and
    bias the scattering length by O(X_START); the regular solution goes
    as u ~ x (1 + U x^2/6) near the origin (the potential is finite there).
    """
    return _integrate_radial(beta, gamma, strength, h, X_START, X_END, X_MATCH)


def _match_tail(xs, us, strength):
    """Fit u on [X_MATCH, X_END] to the exact zero-energy -s/x^4 tail basis.

    Basis: u1 = x cos(sqrt(s)/x) -> x, u2 = x sin(sqrt(s)/x)/sqrt(s) -> 1,
    so u ~ A (x - a) with a = -B/A. For s = 0 this degenerates to the
    free basis (x, 1).
    """
    rs = math.sqrt(strength)
    if rs > 0:
        u1 = xs * np.cos(rs / xs)
        u2 = xs * np.sin(rs / xs) / rs
    else:
        u1 = xs.astype(float)
        u2 = np.ones_like(xs)
    M = np.column_stack([u1, u2])
    coef, *_ = np.linalg.lstsq(M, us, rcond=None)
    A, B = coef
    if A == 0.0:
        raise ResonanceError("zero-energy solution has no linear tail "
                             "(scattering length diverges in this configuration)")
    return -B / A


def _grid_step(beta: float, gamma: float, strength: float) -> float:
    # resolve the fastest oscillation: sample the potential once for its peak
    xs = np.geomspace(X_START, X_END, 400)
    vmax = float(np.max(np.abs(_v_tilde(xs, beta, gamma))))
    kmax = math.sqrt(max(strength * vmax, 1.0))
    return min(2e-3, 0.15 / kmax)


def scattering_length(pot: PotentialParams, species: SpeciesParams,
                      c4_scale: float = 1.0, richardson: bool = False):
    """Zero-energy s-wave scattering length from the radial equation, in m.

    Returns (a, bound_state_count, born_a) where born_a = -f(q -> 0) is
    the weak-coupling estimate. With `richardson` the integration is
    repeated at half step and the difference reported as a third tuple
    element (a, nodes, born_a, delta_a).
    """
    beta = pot.b / species.R_star
    gamma = pot.c / species.R_star
    h = _grid_step(beta, gamma, c4_scale)
    xs, us, nodes = _radial_solution(beta, gamma, c4_scale, h)
    a = _match_tail(xs, us, c4_scale) * species.R_star
    if abs(a) > 0.45 * X_MATCH * species.R_star:
        raise ResonanceError(
            f"|a| = {a / species.R_star:.1f} R* approaches the matching radius; "
            "too close to a zero-energy resonance for a reliable value")
    born_a = -born_amplitude_q0(pot, species) * c4_scale
    if richardson:
        xs2, us2, _ = _radial_solution(beta, gamma, c4_scale, h / 2)
        a2 = _match_tail(xs2, us2, c4_scale) * species.R_star
        return a, nodes, born_a, abs(a - a2)
    return a, nodes, born_a


# ---------------------------------------------------------------------------
# calibration: b <-> a_ai at fixed c


def _branch_scan(c_fixed: float, species: SpeciesParams, b_grid):
    """a(b) and node count on a b grid; used to locate calibration branches."""
    rows = []
    for b in b_grid:
        try:
            a, nodes, _ = scattering_length(
                PotentialParams(b=b, c=c_fixed, a_ai=0.0), species)
        except ResonanceError:
            rows.append((b, math.nan, -1))
            continue
        rows.append((b, a, nodes))
    return rows


def calibrate_potential(a_target: float, c_fixed: float, species: SpeciesParams,
                        max_bound_states: int = 2,
                        b_range: tuple[float, float] = (0.05, 6.0),
                        n_scan: int = 160) -> PotentialParams:
    """Find b > c so the zero-energy scattering length equals `a_target`.

    Scans a(b) on a log grid over `b_range` (in units of R*), keeps
    branches whose bound-state count is at most `max_bound_states`,
    brackets the target on the branch with the fewest bound states and
    bisects. Raises CalibrationError listing the scanned branch when no
    bracket contains the target.
    """
    R = species.R_star
    lo = b_range[0] * R
    hi = b_range[1] * R
    if lo >= hi:
        raise CalibrationError(f"empty b range for c = {c_fixed / R:.4g} R*")
    b_grid = np.geomspace(hi, lo, n_scan)  # shallow -> deep
    b_grid = b_grid[np.abs(b_grid - c_fixed) > 1e-6 * c_fixed]
    rows = _branch_scan(c_fixed, species, b_grid)

    def a_of_b(b):
        a, _, _ = scattering_length(PotentialParams(b=b, c=c_fixed, a_ai=0.0), species)
        return a

    brackets = []
    for (b1, a1, n1), (b2, a2, n2) in zip(rows, rows[1:]):
        if math.isnan(a1) or math.isnan(a2):
            continue
        if n1 != n2 or n1 > max_bound_states:
            continue  # resonance crossed inside, or too deep
        if (a1 - a_target) * (a2 - a_target) <= 0.0:
            brackets.append((b1, b2, n1))
    if not brackets:
        seen = [(b / R, a / R if not math.isnan(a) else None, n) for b, a, n in rows]
        raise CalibrationError(
            f"a_target = {a_target / R:.3f} R* not reachable at c = {c_fixed / R:.3g} R* "
            f"with <= {max_bound_states} bound states; scanned branch: {seen[:8]}...")
    # prefer the branch with the fewest bound states (shallowest potential)
    b1, b2, nodes = min(brackets, key=lambda t: t[2])
    b_root = brentq(lambda b: a_of_b(b) - a_target, min(b1, b2), max(b1, b2),
                    xtol=1e-10 * R, rtol=8.9e-16)
    a_final, nodes_final, _ = scattering_length(
        PotentialParams(b=b_root, c=c_fixed, a_ai=0.0), species)
    return PotentialParams(b=b_root, c=c_fixed, a_ai=a_final,
                           bound_state_count=nodes_final)


def scale_family_potential(s: float, ratio: float) -> tuple[float, float]:
    """(b, c) on the fixed-ratio regularization family, b = ratio * c = ratio * s."""
    return ratio * s, s


def scattering_length_at_scale(s: float, ratio: float, species: SpeciesParams):
    b, c = scale_family_potential(s, ratio)
    return scattering_length(PotentialParams(b=b, c=c, a_ai=0.0), species)


def calibrate_scale(a_target: float, ratio: float, species: SpeciesParams,
                    s_bracket: tuple[float, float]) -> PotentialParams:
    """Calibrate on the fixed-ratio family: find the scale s with a(s) = a_target.

    `s_bracket` (in units of R*) must lie inside one branch (no zero-energy
    resonance inside); the branch of the default convention is recorded in
    `DEFAULT_CONVENTION`. The scattering length is monotone increasing in s
    on a branch (shrinking s deepens the well).
    """
    R = species.R_star
    s_lo, s_hi = s_bracket[0] * R, s_bracket[1] * R
    a_lo, n_lo, _ = scattering_length_at_scale(s_lo, ratio, species)
    a_hi, n_hi, _ = scattering_length_at_scale(s_hi, ratio, species)
    if n_lo != n_hi:
        raise CalibrationError(
            f"s bracket [{s_bracket[0]}, {s_bracket[1]}] R* spans a resonance "
            f"(bound states {n_lo} vs {n_hi})")
    if not min(a_lo, a_hi) <= a_target <= max(a_lo, a_hi):
        raise CalibrationError(
            f"a_target = {a_target / R:.3f} R* outside branch range "
            f"[{a_lo / R:.3f}, {a_hi / R:.3f}] R*")
    s_root = brentq(
        lambda s: scattering_length_at_scale(s, ratio, species)[0] - a_target,
        s_lo, s_hi, xtol=1e-12 * R, rtol=8.9e-16)
    a_fin, nodes, _ = scattering_length_at_scale(s_root, ratio, species)
    b, c = scale_family_potential(s_root, ratio)
    return PotentialParams(b=b, c=c, a_ai=a_fin, bound_state_count=nodes)


# ---------------------------------------------------------------------------
# thermal occupation and the coefficient table


def bose_occupation(q: float, T: float, mu_B: float, m: float) -> float:
    """Occupation of the particle-like branch at momentum q.

    n_q = 1 / (exp(beta (hbar^2 q^2 / 2m - mu_B)) - 1); requires the
    exponent argument to be positive.
    """
    eps = HBAR**2 * q**2 / (2.0 * m)
    if eps <= mu_B:
        raise ConfigurationError(
            f"mode energy {eps} J not above chemical potential {mu_B} J")
    if T <= 0.0:
        return 0.0
    x = (eps - mu_B) / (KB * T)
    if x > 700.0:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def dissipator_coeffs(bath: BathParams, params: ChainParams) -> DissipatorCoeffs:
    """Assemble the precomputed per-mode dissipator couplings.

    q_mu = sqrt(2 m omega_mu / hbar) probes the scattering amplitude at
    the momentum of a bath atom resonant with mode mu; q_R likewise for
    the drive frequency. The couplings

        g_mu   = b2_mu l_mu |f(q_mu)|^2 q_mu^3
        h_mu   = b2_mu l_mu (|f(q_mu)|^2 q_mu^3 - |f(q_R)|^2 q_R^3)
        h_mu^n = b2_mu l_mu (n_{q_mu} |f(q_mu)|^2 q_mu^3 - n_{q_R} |f(q_R)|^2 q_R^3)

    are dimensionless; combined with Gamma * x_R they give rates in 1/s.
    No ordering of q_R versus q_mu is assumed (the wobbling mode sits
    above the drive frequency at the default parameters).
    """
    sp = bath.species
    pot = bath.potential
    m = sp.atom_mass

    def momentum(omega):
        return math.sqrt(2.0 * m * omega / HBAR)

    q_R = momentum(params.omega_R)
    fq_R = born_amplitude(q_R, pot, sp)
    n_R = bose_occupation(q_R, bath.temperature, bath.chemical_potential, m)
    wR = fq_R**2 * q_R**3

    names, qs, ns, gs, hs, hnqs = [], [], [], [], [], []
    for mode in params.modes:
        q = momentum(mode.omega)
        fq = born_amplitude(q, pot, sp)
        n = bose_occupation(q, bath.temperature, bath.chemical_potential, m)
        w = fq**2 * q**3
        b2l = mode.b(2) * mode.mode_length
        names.append(mode.name)
        qs.append(q)
        ns.append(n)
        gs.append(b2l * w)
        hs.append(b2l * (w - wR))
        hnqs.append(b2l * (n * w - n_R * wR))
    return DissipatorCoeffs(
        mode_names=tuple(names), q_mu=tuple(qs), n_q_mu=tuple(ns),
        g_mu=tuple(gs), h_mu=tuple(hs), h_mu_nq=tuple(hnqs),
        q_R=q_R, n_q_R=n_R, Gamma=bath.Gamma)
