"""Array geometry, steering vectors and the two-hop composite channel.

The transmitter-to-RIS hop is a rank-one line-of-sight link; the
RIS-to-receiver hop is a sparse multipath sum over L scatterers with
CN(0,1) gains.  Retuning the RIS phases to a chosen scatterer makes the
composite channel carry exactly that scatterer's gain (up to beam
leakage between distinct arrival angles, quantified by
:func:`orthogonality_leakage`).

Angle convention: by default scatterer angles are drawn on
[-pi/2, pi/2] so that sin is injective and distinct scatterers stay
separable in beamspace.  ``domain="full"`` draws on [-pi, pi] instead;
there sin aliases, so two distinct scatterers can collide in beamspace
and the orthogonality premise can fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ArrayGeometry",
    "AngleSet",
    "ChannelRealization",
    "RisPhaseProfile",
    "ula_steering",
    "upa_steering",
    "los_channel",
    "sv_channel",
    "align_ris_phases",
    "composite_phase_factor",
    "composite_channel",
    "effective_branch_gain",
    "orthogonality_leakage",
    "sample_angles",
    "sample_channel",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ArrayGeometry:
    """Element counts and spacings (in carrier wavelengths) of the three arrays."""

    n_t: int = 64
    n_r: int = 64
    n_h: int = 16
    n_v: int = 16
    spacing_t: float = 0.5
    spacing_r: float = 0.5
    spacing_ris: float = 0.5

    def __post_init__(self) -> None:
        for name in ("n_t", "n_r", "n_h", "n_v"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("spacing_t", "spacing_r", "spacing_ris"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def n_ris(self) -> int:
        return self.n_h * self.n_v


@dataclass(frozen=True, eq=False)
class AngleSet:
    """Departure/arrival angles of one channel draw (radians).

    ``theta_t``: transmit departure angle toward the RIS.
    ``phi_r`` / ``varphi_r``: RIS elevation/azimuth of the incident beam.
    ``theta_r[l]``: receive arrival angle of scatterer l (pairwise distinct).
    ``phi_t[l]`` / ``varphi_t[l]``: RIS departure angles toward scatterer l.
    """

    theta_t: float
    phi_r: float
    varphi_r: float
    theta_r: np.ndarray
    phi_t: np.ndarray
    varphi_t: np.ndarray

    def __post_init__(self) -> None:
        theta_r = np.asarray(self.theta_r, dtype=float)
        phi_t = np.asarray(self.phi_t, dtype=float)
        varphi_t = np.asarray(self.varphi_t, dtype=float)
        object.__setattr__(self, "theta_r", theta_r)
        object.__setattr__(self, "phi_t", phi_t)
        object.__setattr__(self, "varphi_t", varphi_t)
        if not (len(theta_r) == len(phi_t) == len(varphi_t)):
            raise ValueError("per-scatterer angle arrays must have equal length")
        for value in (
            self.theta_t,
            self.phi_r,
            self.varphi_r,
            *theta_r,
            *phi_t,
            *varphi_t,
        ):
            if not -math.pi <= value <= math.pi:
                raise ValueError(f"angles must lie in [-pi, pi], got {value!r}")
        if len(np.unique(theta_r)) != len(theta_r):
            raise ValueError("receive arrival angles must be pairwise distinct")

    @property
    def l_total(self) -> int:
        return len(self.theta_r)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Complex scatterer gains sorted by descending magnitude, plus angles."""

    gains: np.ndarray
    angles: AngleSet

    def __post_init__(self) -> None:
        gains = np.asarray(self.gains, dtype=complex)
        object.__setattr__(self, "gains", gains)
        if len(gains) != self.angles.l_total:
            raise ValueError("one gain per scatterer is required")
        power = np.abs(gains) ** 2
        if np.any(np.diff(power) > 0):
            raise ValueError("gains must be sorted by descending magnitude")

    @property
    def gains_sq(self) -> np.ndarray:
        return np.abs(self.gains) ** 2

    @property
    def l_total(self) -> int:
        return len(self.gains)


@dataclass(frozen=True, eq=False)
class RisPhaseProfile:
    """Per-element RIS phases, with the steering phases they were built from.

    ``zeta_t[n]`` is the phase of the RIS departure steering vector for
    the targeted scatterer, ``zeta_r[n]`` the phase of the conjugated
    incident steering vector; the aligned profile is their elementwise
    sum mod 2 pi, which drives the composite phase factor to 1.
    """

    psi: np.ndarray
    zeta_r: np.ndarray
    zeta_t: np.ndarray
    target_path: int


def ula_steering(n: int, spacing: float, theta: float) -> np.ndarray:
    """Unit-norm uniform-linear-array response, entry k = exp(-j2pi*d*k*sin(theta))/sqrt(n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    k = np.arange(n)
    return np.exp(-1j * _TWO_PI * spacing * k * math.sin(theta)) / math.sqrt(n)


def upa_steering(n_h: int, n_v: int, spacing: float, phi: float, varphi: float) -> np.ndarray:
    """Unit-norm uniform-planar-array response, flattened row-major over (m_h, m_v).

    Element (m_h, m_v) sits at flat index m_h * n_v + m_v and has phase
    -2pi * d * (m_h sin(phi) cos(varphi) + m_v cos(phi)).
    """
    if n_h < 1 or n_v < 1:
        raise ValueError(f"array dimensions must be >= 1, got ({n_h}, {n_v})")
    m_h = np.repeat(np.arange(n_h), n_v)
    m_v = np.tile(np.arange(n_v), n_h)
    phase = -_TWO_PI * spacing * (m_h * math.sin(phi) * math.cos(varphi) + m_v * math.cos(phi))
    return np.exp(1j * phase) / math.sqrt(n_h * n_v)


def los_channel(geom: ArrayGeometry, angles: AngleSet) -> np.ndarray:
    """Rank-one line-of-sight link from the transmit ULA to the RIS (N x n_t)."""
    a_ris = upa_steering(geom.n_h, geom.n_v, geom.spacing_ris, angles.phi_r, angles.varphi_r)
    a_t = ula_steering(geom.n_t, geom.spacing_t, angles.theta_t)
    return np.outer(a_ris, a_t.conj())


def sv_channel(realization: ChannelRealization, geom: ArrayGeometry) -> np.ndarray:
    """Sparse multipath link from the RIS to the receive ULA (n_r x N)."""
    angles = realization.angles
    out = np.zeros((geom.n_r, geom.n_ris), dtype=complex)
    for h_l, theta, phi, varphi in zip(
        realization.gains, angles.theta_r, angles.phi_t, angles.varphi_t
    ):
        a_r = ula_steering(geom.n_r, geom.spacing_r, theta)
        a_ris = upa_steering(geom.n_h, geom.n_v, geom.spacing_ris, phi, varphi)
        out += h_l * np.outer(a_r, a_ris.conj())
    return out


def align_ris_phases(target_path: int, angles: AngleSet, geom: ArrayGeometry) -> RisPhaseProfile:
    """RIS phases steering the incident beam toward scatterer ``target_path`` (1-based)."""
    if not 1 <= target_path <= angles.l_total:
        raise IndexError(f"target_path must be in 1..{angles.l_total}, got {target_path}")
    a_in = upa_steering(geom.n_h, geom.n_v, geom.spacing_ris, angles.phi_r, angles.varphi_r)
    a_out = upa_steering(
        geom.n_h,
        geom.n_v,
        geom.spacing_ris,
        float(angles.phi_t[target_path - 1]),
        float(angles.varphi_t[target_path - 1]),
    )
    zeta_r = np.angle(a_in.conj())
    zeta_t = np.angle(a_out)
    psi = np.mod(zeta_t + zeta_r, _TWO_PI)
    return RisPhaseProfile(psi=psi, zeta_r=zeta_r, zeta_t=zeta_t, target_path=target_path)


def composite_phase_factor(profile: RisPhaseProfile) -> complex:
    """Mean residual rotation (1/N) sum_n exp(j(psi_n - zeta_t_n - zeta_r_n)).

    Exactly 1 for an aligned profile; magnitude <= 1 for any profile.
    """
    return complex(np.mean(np.exp(1j * (profile.psi - profile.zeta_t - profile.zeta_r))))


def composite_channel(
    realization: ChannelRealization, geom: ArrayGeometry, profile: RisPhaseProfile
) -> np.ndarray:
    """End-to-end channel F diag(exp(j psi)) B (n_r x n_t)."""
    if len(profile.psi) != geom.n_ris:
        raise ValueError(
            f"profile has {len(profile.psi)} phases but the RIS has {geom.n_ris} elements"
        )
    f = sv_channel(realization, geom)
    b = los_channel(geom, realization.angles)
    return f @ (np.exp(1j * profile.psi)[:, None] * b)


def effective_branch_gain(
    realization: ChannelRealization,
    geom: ArrayGeometry,
    h_composite: np.ndarray,
    path: int,
) -> complex:
    """Scalar gain seen on the receive branch matched to scatterer ``path``."""
    if not 1 <= path <= realization.l_total:
        raise IndexError(f"path must be in 1..{realization.l_total}, got {path}")
    a_r = ula_steering(geom.n_r, geom.spacing_r, float(realization.angles.theta_r[path - 1]))
    a_t = ula_steering(geom.n_t, geom.spacing_t, realization.angles.theta_t)
    return complex(a_r.conj() @ h_composite @ a_t)


def orthogonality_leakage(n: int, spacing: float, theta_a: float, theta_b: float) -> float:
    """|a(theta_a)^H a(theta_b)| for an n-element ULA.

    Closed form |sin(pi d_phi n) / (n sin(pi d_phi))| with
    d_phi = spacing * (sin(theta_b) - sin(theta_a)); equals 1 whenever
    the two sines coincide (mod 1/spacing) and decays like 1/n otherwise.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    d_phi = spacing * (math.sin(theta_b) - math.sin(theta_a))
    denom = math.sin(math.pi * d_phi)
    if abs(denom) < 1e-15:
        return 1.0
    return abs(math.sin(math.pi * d_phi * n) / (n * denom))


def sample_angles(
    l_total: int, rng: np.random.Generator, domain: str = "beam_separable"
) -> AngleSet:
    """Draw one angle set; ``domain`` is ``beam_separable`` ([-pi/2, pi/2]) or ``full``."""
    if domain == "beam_separable":
        lo, hi = -math.pi / 2.0, math.pi / 2.0
    elif domain == "full":
        lo, hi = -math.pi, math.pi
    else:
        raise ValueError(f"unknown angle domain {domain!r}")
    draw = lambda size=None: rng.uniform(lo, hi, size)
    return AngleSet(
        theta_t=float(draw()),
        phi_r=float(draw()),
        varphi_r=float(draw()),
        theta_r=draw(l_total),
        phi_t=draw(l_total),
        varphi_t=draw(l_total),
    )


def sample_channel(
    l_total: int, rng: np.random.Generator, domain: str = "beam_separable"
) -> ChannelRealization:
    """Draw one channel: CN(0,1) gains sorted descending, with fresh angles.

    The per-scatterer angles are permuted together with the gains so the
    strongest gain stays attached to its own geometry.
    """
    if l_total < 1:
        raise ValueError(f"l_total must be >= 1, got {l_total}")
    gains = (rng.standard_normal(l_total) + 1j * rng.standard_normal(l_total)) / math.sqrt(2.0)
    angles = sample_angles(l_total, rng, domain)
    order = np.argsort(-np.abs(gains) ** 2, kind="stable")
    sorted_angles = AngleSet(
        theta_t=angles.theta_t,
        phi_r=angles.phi_r,
        varphi_r=angles.varphi_r,
        theta_r=angles.theta_r[order],
        phi_t=angles.phi_t[order],
        varphi_t=angles.varphi_t[order],
    )
    return ChannelRealization(gains=gains[order], angles=sorted_angles)
