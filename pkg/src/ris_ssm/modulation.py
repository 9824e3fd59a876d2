"""Constellations and the bit-to-(scatterer, symbol) mapping.

A transmitted block of log2(L_s * M) bits splits into a spatial part
(which of the L_s candidate scatterers the RIS illuminates, natural
binary) and a symbol part (which PSK/QAM point is sent).  Symbol bits
are Gray-labeled by default, which is what the union-bound bit weights
assume; natural labeling is available for sensitivity checks.

Constellations are unit average energy.  QPSK is fixed to the rotated
orientation exp(j(2m+1)pi/4); rotation does not change any pairwise
distance |s_m - s_mhat|^2 for PSK, it just pins the point set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Constellation",
    "SsmConfig",
    "ErrorEvent",
    "build_constellation",
    "make_config",
    "map_bits",
    "demap_indices",
    "hamming_distance",
    "error_events",
]


class ConfigError(ValueError):
    """Invalid modulation or mapping configuration."""


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _gray(n: int) -> int:
    return n ^ (n >> 1)


@dataclass(frozen=True, eq=False)
class Constellation:
    """Unit-energy symbol set with per-point bit labels.

    ``points[i]`` is the i-th symbol in geometric order (around the
    circle for PSK, row-major over the grid for QAM) and ``labels[i]``
    is the bit pattern it carries.
    """

    scheme: str
    order: int
    symbol_mapping: str
    points: np.ndarray
    labels: np.ndarray
    # labels are a permutation of 0..M-1; index_of_label inverts it
    index_of_label: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        inverse = np.empty(self.order, dtype=np.int64)
        inverse[self.labels] = np.arange(self.order)
        object.__setattr__(self, "index_of_label", inverse)

    @property
    def bits_per_symbol(self) -> int:
        return self.order.bit_length() - 1

    @property
    def energies(self) -> np.ndarray:
        return np.abs(self.points) ** 2


def _psk_points(order: int) -> np.ndarray:
    m = np.arange(order)
    if order == 4:
        phases = (2 * m + 1) * math.pi / 4.0
    else:
        phases = 2.0 * math.pi * m / order
    points = np.exp(1j * phases)
    # snap tiny residuals so BPSK is exactly {+1, -1}
    points.real[np.abs(points.real) < 1e-15] = 0.0
    points.imag[np.abs(points.imag) < 1e-15] = 0.0
    return points


def _qam_points(order: int) -> tuple[np.ndarray, np.ndarray]:
    side = math.isqrt(order)
    if side * side != order:
        raise ConfigError(f"square QAM requires a square order, got {order}")
    levels = 2.0 * np.arange(side) - (side - 1)
    # geometric order: row-major over (row -> imag, col -> real)
    re = np.tile(levels, side)
    im = np.repeat(levels[::-1], side)
    points = (re + 1j * im) / math.sqrt(2.0 * (order - 1) / 3.0)
    rows = np.repeat(np.arange(side), side)
    cols = np.tile(np.arange(side), side)
    return points, (rows, cols)


def build_constellation(scheme: str, order: int, symbol_mapping: str = "gray") -> Constellation:
    """Build a unit-average-energy PSK or square-QAM constellation."""
    if symbol_mapping not in ("gray", "natural"):
        raise ConfigError(f"unknown symbol mapping {symbol_mapping!r}")
    if not _is_power_of_two(order) or order < 2:
        raise ConfigError(f"modulation order must be a power of two >= 2, got {order}")
    if scheme == "psk":
        points = _psk_points(order)
        if symbol_mapping == "gray":
            labels = np.array([_gray(i) for i in range(order)], dtype=np.int64)
        else:
            labels = np.arange(order, dtype=np.int64)
    elif scheme == "qam":
        points, (rows, cols) = _qam_points(order)
        half = (order.bit_length() - 1) // 2
        if symbol_mapping == "gray":
            labels = np.array(
                [(_gray(int(r)) << half) | _gray(int(c)) for r, c in zip(rows, cols)],
                dtype=np.int64,
            )
        else:
            labels = np.array(
                [(int(r) << half) | int(c) for r, c in zip(rows, cols)], dtype=np.int64
            )
    else:
        raise ConfigError(f"unknown constellation scheme {scheme!r}")
    return Constellation(scheme, order, symbol_mapping, points, labels)


@dataclass(frozen=True, eq=False)
class SsmConfig:
    """Modulation alphabet: L_s candidate scatterers x M symbols.

    ``l_total`` is the number of scatterers present in the channel;
    ``l_s`` of them (the strongest, under sorted selection) carry the
    spatial index.  Capacity evaluation accepts any 1 <= l_s <= l_total;
    everything that touches the bit mapping additionally needs
    l_s * M to be a power of two.
    """

    l_total: int
    l_s: int
    constellation: Constellation
    spatial_mapping: str = "natural"

    def __post_init__(self) -> None:
        if self.l_total < 1:
            raise ConfigError(f"l_total must be >= 1, got {self.l_total}")
        if not 1 <= self.l_s <= self.l_total:
            raise ConfigError(f"l_s must be in 1..{self.l_total}, got {self.l_s}")
        if self.spatial_mapping != "natural":
            raise ConfigError(f"unknown spatial mapping {self.spatial_mapping!r}")

    @property
    def order(self) -> int:
        return self.constellation.order

    @property
    def spatial_bits(self) -> int:
        if not _is_power_of_two(self.l_s):
            raise ConfigError(f"bit mapping requires a power-of-two l_s, got {self.l_s}")
        return self.l_s.bit_length() - 1

    @property
    def bits_per_use(self) -> int:
        return self.spatial_bits + self.constellation.bits_per_symbol

    def pair_label(self, l: int, m: int) -> int:
        """Concatenated bit label of the event (scatterer l, symbol m)."""
        self._check_indices(l, m)
        return ((l - 1) << self.constellation.bits_per_symbol) | int(
            self.constellation.labels[m - 1]
        )

    def _check_indices(self, l: int, m: int) -> None:
        if not 1 <= l <= self.l_s:
            raise ConfigError(f"scatterer index must be in 1..{self.l_s}, got {l}")
        if not 1 <= m <= self.order:
            raise ConfigError(f"symbol index must be in 1..{self.order}, got {m}")


def make_config(
    l_total: int,
    l_s: int,
    mod_scheme: str = "psk",
    mod_order: int = 2,
    symbol_mapping: str = "gray",
) -> SsmConfig:
    """Convenience constructor used by the sweep runner and tests."""
    return SsmConfig(l_total, l_s, build_constellation(mod_scheme, mod_order, symbol_mapping))


def map_bits(bits, cfg: SsmConfig) -> tuple[int, int]:
    """Map a block of bits to 1-based (scatterer, symbol) indices."""
    bits = list(bits)
    if len(bits) != cfg.bits_per_use:
        raise ConfigError(f"expected {cfg.bits_per_use} bits, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise ConfigError("bits must be 0 or 1")
    value = 0
    for b in bits:
        value = (value << 1) | b
    sym_bits = cfg.constellation.bits_per_symbol
    l = (value >> sym_bits) + 1
    m = int(cfg.constellation.index_of_label[value & ((1 << sym_bits) - 1)]) + 1
    return l, m


def demap_indices(l: int, m: int, cfg: SsmConfig) -> list[int]:
    """Inverse of :func:`map_bits`."""
    value = cfg.pair_label(l, m)
    width = cfg.bits_per_use
    return [(value >> (width - 1 - i)) & 1 for i in range(width)]


def hamming_distance(l: int, m: int, l_hat: int, m_hat: int, cfg: SsmConfig) -> int:
    """Number of bit positions differing between two (scatterer, symbol) pairs."""
    return (cfg.pair_label(l, m) ^ cfg.pair_label(l_hat, m_hat)).bit_count()


@dataclass(frozen=True)
class ErrorEvent:
    """One detection hypothesis pair (l, m) -> (l_hat, m_hat)."""

    l: int
    m: int
    l_hat: int
    m_hat: int
    delta_sq: float
    energy_hat: float
    hamming: int

    @classmethod
    def from_indices(cls, cfg: SsmConfig, l: int, m: int, l_hat: int, m_hat: int) -> "ErrorEvent":
        pts = cfg.constellation.points
        return cls(
            l=l,
            m=m,
            l_hat=l_hat,
            m_hat=m_hat,
            delta_sq=float(abs(pts[m - 1] - pts[m_hat - 1]) ** 2),
            energy_hat=float(abs(pts[m_hat - 1]) ** 2),
            hamming=hamming_distance(l, m, l_hat, m_hat, cfg),
        )


def error_events(cfg: SsmConfig):
    """All ordered hypothesis pairs of the alphabet, identity included."""
    for l in range(1, cfg.l_s + 1):
        for m in range(1, cfg.order + 1):
            for l_hat in range(1, cfg.l_s + 1):
                for m_hat in range(1, cfg.order + 1):
                    yield ErrorEvent.from_indices(cfg, l, m, l_hat, m_hat)
