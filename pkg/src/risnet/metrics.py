"""Phase-dispersion metrics and bandwidth extraction.

The dispersion of a state set's reflection phases is summarized by

    sigma = sqrt( sum_i(gap_i^3) / (12 * 360) )    [degrees]

over the gaps between adjacent phases on the unit circle (including the
wrap-around gap), and maps to an effective resolution

    n_bit_eff = log2( 360 / (sqrt(12) * sigma) ).

Usable bandwidth is the maximal contiguous interval around a center
frequency on which sigma stays at or below the per-resolution threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import FrequencyRangeError
from .touchstone import ReflectionProfile

# Maximum allowed sigma (degrees) per nominal resolution; used verbatim.
SIGMA_THRESHOLD_DEG = {1: 65.0, 2: 32.5, 3: 16.25}

# Reported bandwidths of comparable published designs, echoed in reports.
LITERATURE_BANDWIDTHS = (
    {"design": "varactor patch, 3.5 GHz", "resolution_bits": 1, "bandwidth_hz": 255e6},
    {"design": "pin-diode dipole, 3.5 GHz", "resolution_bits": 2, "bandwidth_hz": 109e6},
    {"design": "varactor ring FSS, 3.8 GHz", "resolution_bits": 2, "bandwidth_hz": 190e6},
    {"design": "varactor ring FSS, 4.2 GHz", "resolution_bits": 3, "bandwidth_hz": 85e6},
)


@dataclass(frozen=True)
class BandwidthReport:
    """Per-frequency dispersion plus the extracted contiguous band.

    ``band`` is (f_low, f_high) in Hz or None when sigma exceeds the
    threshold at the center frequency. ``min_mag_db`` reports the worst
    (smallest) per-frequency state magnitude; it does not enter the band
    decision, which is phase-only.
    """

    frequencies: np.ndarray
    sigma_deg: np.ndarray
    n_bit_eff: np.ndarray
    threshold_deg: float
    band: tuple | None
    bandwidth_hz: float
    min_mag_db: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "threshold_deg": self.threshold_deg,
            "band_hz": None if self.band is None else {
                "f_low_hz": self.band[0],
                "f_high_hz": self.band[1],
            },
            "bandwidth_hz": self.bandwidth_hz,
            "frequencies_hz": self.frequencies.tolist(),
            "sigma_deg": self.sigma_deg.tolist(),
            "nbit_eff": self.n_bit_eff.tolist(),
            "min_mag_db": self.min_mag_db.tolist(),
            "literature": list(LITERATURE_BANDWIDTHS),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        lines = ["freq_hz,sigma_deg,nbit_eff"]
        for f, s, n in zip(self.frequencies, self.sigma_deg, self.n_bit_eff):
            lines.append(f"{f:.12g},{s:.12g},{n:.12g}")
        return "\n".join(lines) + "\n"


def circular_gaps(phases_deg) -> np.ndarray:
    """Consecutive gaps between phases sorted on the circle, wrap included.

    Returns as many gaps as input phases; they sum to 360. Invariant under
    input ordering and under rotating every phase by a common offset.
    """
    phases = np.asarray(phases_deg, dtype=float)
    if phases.size < 2:
        raise ValueError("need at least 2 phases")
    if not np.all(np.isfinite(phases)):
        raise ValueError("phases must be finite")
    s = np.sort(np.mod(phases, 360.0))
    return np.append(np.diff(s), 360.0 - s[-1] + s[0])


def sigma_phase(gaps_deg) -> float:
    """Phase standard deviation (degrees) from a circular gap list."""
    gaps = np.asarray(gaps_deg, dtype=float)
    if np.any(gaps < 0):
        raise ValueError("gaps must be >= 0")
    if abs(float(np.sum(gaps)) - 360.0) > 1e-6:
        raise ValueError(f"gaps must sum to 360 degrees, got {np.sum(gaps)}")
    return float(np.sqrt(np.sum(gaps**3) / (12.0 * 360.0)))


def effective_bits(sigma_deg: float) -> float:
    """Effective resolution in bits for a given sigma (degrees)."""
    if sigma_deg <= 0:
        raise ValueError("sigma must be > 0")
    return float(np.log2(360.0 / (np.sqrt(12.0) * sigma_deg)))


def sigma_threshold(resolution_bits: int) -> float:
    """Maximum allowed sigma (degrees) for a 1-, 2- or 3-bit state set."""
    try:
        return SIGMA_THRESHOLD_DEG[resolution_bits]
    except KeyError:
        raise ValueError(
            f"unsupported resolution {resolution_bits} (expected 1, 2 or 3)"
        ) from None


def select_states(profile: ReflectionProfile, indices) -> ReflectionProfile:
    """Restrict a profile to a power-of-two subset of its states.

    Dropping every second state of an 8-state profile (indices 0, 2, 4, 6)
    produces the virtual 2-bit variant used for like-for-like comparisons.
    """
    wanted = [int(i) for i in indices]
    n = len(wanted)
    if n < 1 or (n & (n - 1)) != 0:
        raise ValueError(f"selected state count {n} is not a power of two")
    positions = []
    for i in sorted(set(wanted)):
        if i not in profile.states:
            raise ValueError(f"unknown state index {i}")
        positions.append(profile.states.index(i))
    if len(positions) != n:
        raise ValueError("duplicate state indices in selection")
    return ReflectionProfile(
        states=tuple(profile.states[p] for p in positions),
        frequencies=profile.frequencies,
        gamma=profile.gamma[positions, :],
    )


def _sigma_per_frequency(profile: ReflectionProfile) -> np.ndarray:
    phases = np.angle(profile.gamma, deg=True)
    return np.array([sigma_phase(circular_gaps(phases[:, k])) for k in range(phases.shape[1])])


def _crossing(f0, s0, f1, s1, threshold):
    return f0 + (s0 - threshold) * (f1 - f0) / (s0 - s1)


def bandwidth(profile: ReflectionProfile, resolution_bits: int, f_center: float) -> BandwidthReport:
    """Extract the contiguous band around ``f_center`` where sigma passes.

    Band edges are interpolated linearly in sigma between grid points. When
    sigma already exceeds the threshold at the center, the band is None and
    the bandwidth zero.
    """
    threshold = sigma_threshold(resolution_bits)
    if profile.n_states != 2**resolution_bits:
        raise ValueError(
            f"profile has {profile.n_states} states, expected {2**resolution_bits} "
            f"for {resolution_bits}-bit resolution"
        )
    f = profile.frequencies
    if not (f[0] <= f_center <= f[-1]):
        raise FrequencyRangeError(
            f"f_center {f_center} Hz outside profile grid [{f[0]}, {f[-1]}] Hz"
        )
    sigma = _sigma_per_frequency(profile)
    nbit = np.log2(360.0 / (np.sqrt(12.0) * sigma))
    min_mag_db = 20.0 * np.log10(np.maximum(np.min(np.abs(profile.gamma), axis=0), 1e-30))

    sigma_center = float(np.interp(f_center, f, sigma))
    if sigma_center > threshold:
        band = None
        bw = 0.0
    else:
        j0 = int(np.searchsorted(f, f_center, side="right") - 1)
        j0 = min(max(j0, 0), f.size - 1)
        # walk left from the last grid point at or below f_center
        j = j0
        if sigma[j] > threshold:
            # crossing lies between f[j] and f_center inside this interval
            f_low = _crossing(f[j], sigma[j], f[j + 1], sigma[j + 1], threshold)
        else:
            while j > 0 and sigma[j - 1] <= threshold:
                j -= 1
            if j == 0:
                f_low = float(f[0])
            else:
                f_low = float(_crossing(f[j - 1], sigma[j - 1], f[j], sigma[j], threshold))
        # walk right from the first grid point at or above f_center
        j = int(np.searchsorted(f, f_center, side="left"))
        j = min(max(j, 0), f.size - 1)
        if sigma[j] > threshold:
            f_high = _crossing(f[j - 1], sigma[j - 1], f[j], sigma[j], threshold)
        else:
            while j < f.size - 1 and sigma[j + 1] <= threshold:
                j += 1
            if j == f.size - 1:
                f_high = float(f[-1])
            else:
                f_high = float(_crossing(f[j], sigma[j], f[j + 1], sigma[j + 1], threshold))
        band = (float(f_low), float(f_high))
        bw = float(f_high - f_low)
    return BandwidthReport(
        frequencies=f,
        sigma_deg=sigma,
        n_bit_eff=nbit,
        threshold_deg=threshold,
        band=band,
        bandwidth_hz=bw,
        min_mag_db=min_mag_db,
    )
