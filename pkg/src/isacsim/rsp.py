"""Range-Doppler processing chain and its brute-force verification oracle.

The fast path works in the fast-time frequency domain: FFT each packet,
multiply by the conjugate reference spectrum, steer across slow time for each
Doppler hypothesis, sum over packets, and IFFT back to range. Steering uses
the conjugate of the echo's Doppler rotation, exp(+j 2 pi f_j p T_pri). When
the Doppler grid coincides with the slow-time FFT bins the steering collapses
to an IFFT across packets; otherwise the steering matrix is applied directly.

The oracle computes the same map by rolling time-domain references under each
packet, which is deliberately slow and shares no FFT code with the fast path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoDetectionError, OracleGuardError, ParameterError, ProcessingError
from .params import SPEED_OF_LIGHT_MPS, WaveformParams
from .scene import DataCube
from .waveform import FrameSchedule, ScheduleKind

# Largest Q*P*J the brute-force oracle will accept.
ORACLE_GUARD = 4_194_304


@dataclass(frozen=True)
class DopplerGrid:
    frequencies_hz: np.ndarray  # J hypotheses, uniform, monotone increasing
    spacing_hz: float
    fft_aligned: bool  # True when J == P and spacing == 1/(P*T_pri)

    def __post_init__(self):
        f = self.frequencies_hz
        if f.ndim != 1 or f.size < 1:
            raise ParameterError("Doppler grid must be a non-empty vector")
        if f.size > 1:
            steps = np.diff(f)
            if not np.allclose(steps, self.spacing_hz, rtol=1e-12, atol=0.0) or self.spacing_hz <= 0:
                raise ParameterError("Doppler grid must be uniform and increasing")

    def __len__(self) -> int:
        return self.frequencies_hz.size

    @property
    def zero_bin(self) -> int:
        """Index of the exact-zero Doppler hypothesis."""
        return int(self.frequencies_hz.size // 2)


def default_grid(params: WaveformParams) -> DopplerGrid:
    """FFT-equivalent grid: J = P bins at spacing 1/(P*T_pri), zero at J//2.

    Spans [-f_max, f_max - spacing] with f_max = 1/(2*T_pri).
    """
    p = params.packets_per_cpi
    spacing = 1.0 / (p * params.pri_s)
    freqs = (np.arange(p) - p // 2) * spacing
    return DopplerGrid(frequencies_hz=freqs, spacing_hz=spacing, fft_aligned=True)


def symmetric_grid(params: WaveformParams, bins: int) -> DopplerGrid:
    """Custom grid with an odd number of bins spanning [-f_max, +f_max]
    inclusive, zero at the center."""
    if bins < 3 or bins % 2 == 0:
        raise ParameterError("a custom Doppler grid needs an odd bin count >= 3")
    f_max = params.doppler_max_hz
    spacing = 2.0 * f_max / (bins - 1)
    freqs = (np.arange(bins) - bins // 2) * spacing
    aligned = bins == params.packets_per_cpi and math.isclose(
        spacing, 1.0 / (params.packets_per_cpi * params.pri_s)
    )
    return DopplerGrid(frequencies_hz=freqs, spacing_hz=spacing, fft_aligned=aligned)


@dataclass(frozen=True)
class ReferenceBank:
    """Conjugated reference spectra, one per distinct frame, plus the map
    telling which entry each packet correlates against."""

    spectra: np.ndarray     # U x Q complex, conj(FFT(frame))
    packet_map: np.ndarray  # P ints into spectra
    kind: ScheduleKind


def build_reference_bank(schedule: FrameSchedule) -> ReferenceBank:
    distinct, index = schedule.distinct_frames()
    spectra = np.stack([np.conj(np.fft.fft(f.samples)) for f in distinct], axis=0)
    return ReferenceBank(spectra=spectra, packet_map=index, kind=schedule.kind)


@dataclass(frozen=True)
class RangeDopplerMap:
    values: np.ndarray           # J x Q magnitudes
    range_axis_m: np.ndarray     # Q entries
    doppler_axis_mps: np.ndarray # J entries

    def __post_init__(self):
        j, q = self.values.shape
        if self.range_axis_m.shape != (q,) or self.doppler_axis_mps.shape != (j,):
            raise ParameterError("axis lengths must match the map dimensions")

    def range_cut(self, doppler_bin: int) -> np.ndarray:
        """Range profile at one Doppler hypothesis."""
        return self.values[doppler_bin]


@dataclass(frozen=True)
class Detection:
    range_m: float
    velocity_mps: float
    peak_magnitude: float
    range_bin: int
    doppler_bin: int


def fast_time_fft(cube: DataCube) -> np.ndarray:
    """Column-wise Q-point FFT of the cube (fast time to frequency)."""
    return np.fft.fft(cube.samples, axis=0)


def _axes(params: WaveformParams, grid: DopplerGrid) -> tuple[np.ndarray, np.ndarray]:
    range_axis = params.range_axis_m()
    doppler_axis = grid.frequencies_hz * params.wavelength_m / 2.0
    return range_axis, doppler_axis


def matched_filter_rd(cube: DataCube, bank: ReferenceBank, grid: DopplerGrid) -> RangeDopplerMap:
    """Frequency-domain matched filter with Doppler steering.

    For each hypothesis f_j the per-packet matched spectra are weighted by
    exp(+j 2 pi f_j p T_pri), summed over packets, and IFFT'd to a range
    profile; the map stores magnitudes as J x Q.
    """
    params = cube.params
    q_len, p_len = params.samples_per_pri, params.packets_per_cpi
    if bank.spectra.shape[1] != q_len or bank.packet_map.shape != (p_len,):
        raise ProcessingError(
            f"reference bank shaped {bank.spectra.shape} with {bank.packet_map.shape} packets "
            f"does not match a {q_len} x {p_len} cube"
        )
    spectra = fast_time_fft(cube)
    matched = spectra * bank.spectra[bank.packet_map].T  # Q x P
    j_len = len(grid)
    if grid.fft_aligned:
        # sum_p M[q,p] exp(+2 pi i p (j - J//2) / P) == P * ifft_p(M) reordered
        steered_all = np.fft.ifft(matched, axis=1) * p_len
        cols = (np.arange(j_len) - j_len // 2) % p_len
        steered = steered_all[:, cols]
    else:
        p_idx = np.arange(p_len) * params.pri_s
        w = np.exp(2j * np.pi * np.outer(p_idx, grid.frequencies_hz))  # P x J
        steered = matched @ w
    profiles = np.fft.ifft(steered, axis=0)  # Q x J
    range_axis, doppler_axis = _axes(params, grid)
    return RangeDopplerMap(
        values=np.abs(profiles).T.copy(),
        range_axis_m=range_axis,
        doppler_axis_mps=doppler_axis,
    )


def time_domain_oracle(
    cube: DataCube,
    schedule: FrameSchedule,
    grid: DopplerGrid,
    guard: int = ORACLE_GUARD,
) -> RangeDopplerMap:
    """Brute-force reference: circular time-domain correlation per packet,
    then a directly accumulated Doppler-steered sum. Refuses instances with
    Q*P*J beyond the guard."""
    params = cube.params
    q_len, p_len = params.samples_per_pri, params.packets_per_cpi
    j_len = len(grid)
    if q_len * p_len * j_len > guard:
        raise OracleGuardError(
            f"oracle instance Q*P*J = {q_len * p_len * j_len} exceeds the guard {guard}"
        )
    if len(schedule) != p_len:
        raise ProcessingError("schedule length does not match the cube")
    distinct, index = schedule.distinct_frames()
    corr = np.empty((q_len, p_len), dtype=np.complex128)
    for u, frame in enumerate(distinct):
        cols = np.nonzero(index == u)[0]
        sub = cube.samples[:, cols]
        ref = frame.samples
        for k in range(q_len):
            rolled = np.conj(np.roll(ref, k))
            corr[k, cols] = rolled @ sub
    p_idx = np.arange(p_len) * params.pri_s
    w = np.exp(2j * np.pi * np.outer(p_idx, grid.frequencies_hz))  # P x J
    steered = corr @ w  # Q x J
    range_axis, doppler_axis = _axes(params, grid)
    return RangeDopplerMap(
        values=np.abs(steered).T.copy(),
        range_axis_m=range_axis,
        doppler_axis_mps=doppler_axis,
    )


def detect_peak(rd_map: RangeDopplerMap) -> Detection:
    """Global maximum of the map; ties break toward the smallest range bin,
    then the smallest Doppler bin."""
    values = rd_map.values
    peak = values.max()
    if peak == 0.0:
        raise NoDetectionError("range-Doppler map is identically zero")
    js, qs = np.nonzero(values == peak)
    order = np.lexsort((js, qs))  # sort by range bin, then Doppler bin
    j, q = int(js[order[0]]), int(qs[order[0]])
    return Detection(
        range_m=float(rd_map.range_axis_m[q]),
        velocity_mps=float(rd_map.doppler_axis_mps[j]),
        peak_magnitude=float(peak),
        range_bin=q,
        doppler_bin=j,
    )


def pslr_db(profile: np.ndarray, mainlobe_halfwidth_bins: int = 2) -> float:
    """Peak-to-sidelobe ratio of a range cut, in dB.

    20*log10(peak / max outside +-halfwidth bins around the peak). Returns
    +inf when everything outside the mainlobe is exactly zero (no sidelobe).
    """
    profile = np.asarray(profile, dtype=np.float64)
    hw = mainlobe_halfwidth_bins
    if hw < 0:
        raise ParameterError("mainlobe halfwidth must be non-negative")
    if profile.size < 2 * hw + 1:
        raise ParameterError(
            f"profile of {profile.size} bins cannot hold a +-{hw} bin mainlobe"
        )
    peak_bin = int(np.argmax(profile))
    peak = profile[peak_bin]
    mask = np.ones(profile.size, dtype=bool)
    mask[max(0, peak_bin - hw) : peak_bin + hw + 1] = False
    if not mask.any():
        raise ParameterError("mainlobe exclusion covers the whole profile")
    side = profile[mask].max()
    if side == 0.0:
        return math.inf
    return float(20.0 * np.log10(peak / side))


def peak_cut_pslr_db(rd_map: RangeDopplerMap, mainlobe_halfwidth_bins: int = 2) -> float:
    """PSLR of the range cut through the map's detected peak."""
    det = detect_peak(rd_map)
    return pslr_db(rd_map.range_cut(det.doppler_bin), mainlobe_halfwidth_bins)


def map_relative_deviation(a: RangeDopplerMap, b: RangeDopplerMap) -> float:
    """max |a - b| / max |b|; the oracle-equivalence metric."""
    denom = b.values.max()
    if denom == 0.0:
        return float(np.abs(a.values).max())
    return float(np.abs(a.values - b.values).max() / denom)
