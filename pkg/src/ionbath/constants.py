"""Physical constants and atomic species data.

All values are SI. Fundamental constants come from scipy (CODATA); the
species table below holds the isotope masses and polarizabilities the
simulator needs, each annotated with its source. None of these numbers
are fitted -- they are standard reference data and can be overridden at
configuration time.
"""

from __future__ import annotations

from dataclasses import dataclass

from scipy import constants as _c

HBAR = _c.hbar                 # J s
KB = _c.k                      # J / K
E_CHARGE = _c.e                # C
EPS0 = _c.epsilon_0            # F / m
ATOMIC_MASS = _c.u             # kg
PI = _c.pi

# atomic unit of polarizability, e^2 a0^2 / E_h
AU_POLARIZABILITY = 1.64877727436e-41  # C^2 m^2 / J (CODATA 2018)


@dataclass(frozen=True)
class AtomSpecies:
    """A bath atom species: mass, statistics and static polarizability."""

    name: str
    mass: float                # kg
    polarizability: float      # C^2 m^2 / J (SI)
    statistics: str            # "bose" or "fermi"


@dataclass(frozen=True)
class IonSpecies:
    name: str
    mass: float                # kg


# Isotope masses from AME2020; Li static dipole polarizability 164.1125 a.u.
# (high-precision variational value, shared by the two isotopes to the
# accuracy relevant here).
_ALPHA_LI = 164.1125 * AU_POLARIZABILITY

ION_SPECIES = {
    "174Yb+": IonSpecies("174Yb+", 173.9388664 * ATOMIC_MASS),
}

ATOM_SPECIES = {
    "7Li": AtomSpecies("7Li", 7.0160034366 * ATOMIC_MASS, _ALPHA_LI, "bose"),
    "6Li": AtomSpecies("6Li", 6.0151228874 * ATOMIC_MASS, _ALPHA_LI, "fermi"),
}


def ion_species(name: str) -> IonSpecies:
    try:
        return ION_SPECIES[name]
    except KeyError:
        raise KeyError(f"unknown ion species {name!r}; known: {sorted(ION_SPECIES)}") from None


def atom_species(name: str) -> AtomSpecies:
    try:
        return ATOM_SPECIES[name]
    except KeyError:
        raise KeyError(f"unknown atom species {name!r}; known: {sorted(ATOM_SPECIES)}") from None
