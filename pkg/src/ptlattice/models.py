"""Lattice Hamiltonians with balanced gain and loss.

Sites are labelled 1..N in the public API (matching the usual physics
notation); arrays are of course indexed from 0.  Energies are in units of
the tunneling ``J`` and the gain-loss strength ``gamma`` is given in the
same units.
"""

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import SpecError
from .linalg import as_matrix


class Variant(str, enum.Enum):
    DIMER = "dimer"
    TRIMER = "trimer"
    CHAIN = "chain"
    SSH = "ssh"
    AAH = "aah"
    PST = "pst"
    RING = "ring"


# variants with a single +i*gamma / -i*gamma pair at m0 and its mirror site
PAIR_VARIANTS = (Variant.CHAIN, Variant.SSH, Variant.AAH, Variant.RING)


class AAHCommensurabilityWarning(UserWarning):
    pass


def _finite(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise SpecError(f"{name} must be a real number, got {value!r}", field=name) from None
    if not math.isfinite(value):
        raise SpecError(f"{name} must be finite, got {value}", field=name)
    return value


@dataclass(frozen=True)
class LatticeSpec:
    """Declarative description of one lattice model.

    Parameters
    ----------
    variant : Variant or str
        One of ``dimer, trimer, chain, ssh, aah, pst, ring``.
    N : int, optional
        Number of sites.  Fixed to 2 for the dimer and 3 for the trimer.
    J : float
        Tunneling energy, the unit of energy.
    gamma : float
        Gain-loss strength.  Must be non-negative except for ``pst``, where
        a negative value puts the gain on the first half of the chain.
    m0 : int
        Gain site (1-based) for ``chain``, ``ssh``, ``aah`` and ``ring``;
        the loss sits on the mirror site ``N + 1 - m0``.
    delta : float
        Tunneling differential of the ``ssh`` chain, in [0, 1].
    period_profile : tuple of float
        Repeating tunnelings ``(J1, ..., Jp)`` of the ``aah`` chain, in units
        of ``J``, with ``p >= 3``.
    jprime : float
        Tunneling outside the gain-to-loss arc of the ``ring``.
    """

    variant: Variant
    N: Optional[int] = None
    J: float = 1.0
    gamma: float = 0.0
    m0: int = 1
    delta: float = 0.0
    period_profile: Tuple[float, ...] = field(default_factory=tuple)
    jprime: float = 0.0

    def __post_init__(self):
        try:
            variant = Variant(self.variant)
        except ValueError:
            names = ", ".join(v.value for v in Variant)
            raise SpecError(f"unknown variant {self.variant!r}; expected one of {names}", field="variant") from None
        object.__setattr__(self, "variant", variant)

        fixed = {Variant.DIMER: 2, Variant.TRIMER: 3}.get(variant)
        N = self.N
        if N is None:
            if fixed is None:
                raise SpecError(f"{variant.value} requires a site count N", field="N")
            N = fixed
        if isinstance(N, bool) or int(N) != N:
            raise SpecError(f"N must be an integer, got {N!r}", field="N")
        N = int(N)
        if fixed is not None and N != fixed:
            raise SpecError(f"{variant.value} has exactly {fixed} sites, got N={N}", field="N")
        if N < 2:
            raise SpecError(f"N must be at least 2, got {N}", field="N")
        if variant is Variant.RING and N < 3:
            raise SpecError(f"ring needs N >= 3, got {N}", field="N")
        object.__setattr__(self, "N", N)

        J = _finite(self.J, "J")
        if J <= 0:
            raise SpecError(f"J must be positive, got {J}", field="J")
        object.__setattr__(self, "J", J)

        gamma = _finite(self.gamma, "gamma")
        if gamma < 0 and variant is not Variant.PST:
            raise SpecError(f"gamma must be non-negative for {variant.value}, got {gamma}", field="gamma")
        object.__setattr__(self, "gamma", gamma)

        if variant in PAIR_VARIANTS:
            m0 = self.m0
            if isinstance(m0, bool) or int(m0) != m0 or not 1 <= int(m0) <= N:
                raise SpecError(f"m0 must be an integer site in 1..{N}, got {m0!r}", field="m0")
            m0 = int(m0)
            if m0 == N + 1 - m0:
                raise SpecError(f"m0={m0} is the central site; gain and loss would coincide", field="m0")
            object.__setattr__(self, "m0", m0)

        delta = _finite(self.delta, "delta")
        if variant is Variant.SSH and not 0.0 <= delta <= 1.0:
            raise SpecError(f"delta must lie in [0, 1], got {delta}", field="delta")
        object.__setattr__(self, "delta", delta)

        profile = tuple(_finite(x, "period_profile") for x in self.period_profile)
        if variant is Variant.AAH:
            p = len(profile)
            if p < 3:
                raise SpecError(f"aah needs a period profile of length >= 3, got {p}", field="period_profile")
            if any(x <= 0 for x in profile):
                raise SpecError("aah tunnelings must be positive", field="period_profile")
            if (N + 1) % p != 0 or self.m0 % p != 0:
                warnings.warn(
                    f"aah with N={N}, m0={self.m0}, p={p}: the threshold is only guaranteed "
                    "finite when N+1 and m0 are multiples of p",
                    AAHCommensurabilityWarning,
                    stacklevel=3,
                )
        object.__setattr__(self, "period_profile", profile)

        jprime = _finite(self.jprime, "jprime")
        if variant is Variant.RING and jprime < 0:
            raise SpecError(f"jprime must be non-negative, got {jprime}", field="jprime")
        object.__setattr__(self, "jprime", jprime)

    @property
    def mirror_site(self):
        return self.N + 1 - self.m0

    def with_gamma(self, gamma):
        return LatticeSpec(
            self.variant, self.N, self.J, gamma, self.m0, self.delta, self.period_profile, self.jprime
        )

    def to_dict(self):
        return {
            "model": self.variant.value,
            "n": self.N,
            "J": self.J,
            "gamma": self.gamma,
            "gain_site": self.m0,
            "delta": self.delta,
            "profile": list(self.period_profile),
            "jprime": self.jprime,
        }


def bond_tunnelings(spec):
    """Open-chain tunnelings ``t_k`` between sites k and k+1, k = 1..N-1.

    The Hamiltonian carries ``-t_k`` on the off-diagonal.
    """
    N, J = spec.N, spec.J
    k = np.arange(1, N)
    v = spec.variant
    if v is Variant.CHAIN:
        return np.full(N - 1, J)
    if v is Variant.SSH:
        # bond 1 (sites 1-2) is the strong one
        return np.where(k % 2 == 1, J, J * (1.0 - spec.delta))
    if v is Variant.AAH:
        profile = np.asarray(spec.period_profile)
        return J * profile[(k - 1) % len(profile)]
    if v is Variant.PST:
        return J * np.sqrt(k * (N - k)) / 2.0
    if v is Variant.RING:
        inside = (k >= spec.m0) & (k < spec.mirror_site)
        return np.where(inside, J, spec.jprime)
    raise SpecError(f"{v.value} is not built from a bond list", field="variant")


def _spin_one():
    sx = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / np.sqrt(2.0)
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    return sx, sz


def build_hamiltonian(spec):
    """Hamiltonian matrix of ``spec`` in the site basis |1>, ..., |N>.

    Every model built here is complex symmetric and traceless.
    """
    v, J, g = spec.variant, spec.J, spec.gamma
    if v is Variant.DIMER:
        return np.array([[1j * g, -J], [-J, -1j * g]], dtype=complex)
    if v is Variant.TRIMER:
        sx, sz = _spin_one()
        return -J * sx + 1j * g * sz

    N = spec.N
    t = bond_tunnelings(spec)
    H = np.zeros((N, N), dtype=complex)
    idx = np.arange(N - 1)
    H[idx, idx + 1] = -t
    H[idx + 1, idx] = -t
    if v is Variant.PST:
        S = (N - 1) / 2.0
        H[np.arange(N), np.arange(N)] = 1j * g * (np.arange(N) - S)
        return H
    if v is Variant.RING:
        H[0, N - 1] = H[N - 1, 0] = -spec.jprime
    H[spec.m0 - 1, spec.m0 - 1] = 1j * g
    H[spec.mirror_site - 1, spec.mirror_site - 1] = -1j * g
    return H


def parity_matrix(N):
    """Site reflection k -> N + 1 - k as a real permutation matrix."""
    if isinstance(N, bool) or int(N) != N or N < 2:
        raise SpecError(f"N must be an integer >= 2, got {N!r}", field="N")
    return np.fliplr(np.eye(int(N)))


def check_pt_symmetry(H, P):
    """Frobenius norm of ``P conj(H) P - H``; zero for a PT-symmetric ``H``."""
    H = as_matrix(H, "H")
    P = np.asarray(P)
    if P.shape != H.shape:
        raise SpecError(f"parity has shape {P.shape} but H has shape {H.shape}", field="P")
    return float(np.linalg.norm(P @ H.conj() @ P - H))
