"""Fixed-point emulation of the matched-filter chain.

Signals are quantized to a two's-complement <word,integer> grid with
round-to-nearest-even and saturation. The quantized pipeline re-runs the
range-Doppler chain with quantization applied at the stage boundaries a
hardware implementation would expose: the input cube, the stored reference
spectra, the steering (twiddle) factors, and the outputs of the FFT, the
steering accumulation, and the final IFFT. Each quantization point uses
max-abs normalization (the block-floating-point scale a fixed-point design
would set per stage), with scales folded back so the quantized map stays in
the units of the double-precision map. The FFTs themselves run in double on
grid-quantized data; butterfly-internal effects are out of scope.

The steering stage always applies the dense quantized twiddle matrix, even on
FFT-aligned grids, because the point is to model quantized multipliers.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DataError, ParameterError
from .rsp import (
    DopplerGrid,
    RangeDopplerMap,
    ReferenceBank,
    detect_peak,
    matched_filter_rd,
    pslr_db,
)
from .scene import DataCube


class Scaling(Enum):
    MAX_ABS = "max_abs"  # normalize the cube's largest component to the format's top
    FIXED = "fixed"      # interpret values directly at a caller-supplied scale


class FxpMode(Enum):
    FULL_CHAIN = "full_chain"  # quantize every stage listed above
    CORE_ONLY = "core_only"    # quantize only the matched-filter core (reference,
    #                            its input spectra, twiddles, steering output)


@dataclass(frozen=True)
class FixedPointFormat:
    """<word_bits, integer_bits> two's complement; integer bits include sign."""

    word_bits: int
    integer_bits: int

    def __post_init__(self):
        if not 2 <= self.word_bits <= 64:
            raise ParameterError(f"word_bits must lie in [2, 64], got {self.word_bits}")
        if not 1 <= self.integer_bits <= self.word_bits:
            raise ParameterError(
                f"integer_bits must lie in [1, word_bits], got {self.integer_bits}"
            )

    @property
    def fraction_bits(self) -> int:
        return self.word_bits - self.integer_bits

    @property
    def step(self) -> float:
        return 2.0 ** (-self.fraction_bits)

    @property
    def max_value(self) -> float:
        return 2.0 ** (self.integer_bits - 1) - self.step

    @property
    def min_value(self) -> float:
        return -(2.0 ** (self.integer_bits - 1))

    def __str__(self) -> str:
        return f"<{self.word_bits},{self.integer_bits}>"


@dataclass(frozen=True)
class QuantizedCube:
    """Integer mantissas at step*scale units, plus bookkeeping."""

    re_mantissa: np.ndarray
    im_mantissa: np.ndarray
    format: FixedPointFormat
    saturation_count: int
    scale: float  # pre-quantization normalization factor (1.0 for fixed scaling)

    def dequantize(self) -> np.ndarray:
        unit = self.format.step * self.scale
        return (self.re_mantissa + 1j * self.im_mantissa) * unit


def _mantissa_limits(fmt: FixedPointFormat) -> tuple[float, float]:
    top = 2.0 ** (fmt.word_bits - 1) - 1.0
    if top >= 2.0 ** (fmt.word_bits - 1):  # rounded up past int64 territory (W > 53)
        top = np.nextafter(2.0 ** (fmt.word_bits - 1), 0.0)
    return -(2.0 ** (fmt.word_bits - 1)), top


def quantize(
    signal: np.ndarray,
    fmt: FixedPointFormat,
    scaling: Scaling = Scaling.MAX_ABS,
    scale: float = 1.0,
) -> QuantizedCube:
    """Round-to-nearest-even quantization onto the format grid.

    MAX_ABS scaling maps the largest |re|/|im| component onto the format's
    maximum value (so nothing saturates by construction); FIXED scaling uses
    the given scale and saturates anything beyond the representable range,
    counting clipped components.
    """
    x = np.asarray(signal, dtype=np.complex128)
    if not np.all(np.isfinite(x.real)) or not np.all(np.isfinite(x.imag)):
        raise DataError("quantizer input contains non-finite values")
    if scaling is Scaling.MAX_ABS:
        m = max(np.abs(x.real).max(initial=0.0), np.abs(x.imag).max(initial=0.0))
        scale = m / fmt.max_value if m > 0.0 else 1.0
    elif scale <= 0.0:
        raise ParameterError("fixed scaling needs a positive scale")
    bot, top = _mantissa_limits(fmt)
    unit = fmt.step * scale
    saturated = 0
    mants = []
    for comp in (x.real, x.imag):
        raw = np.rint(comp / unit)
        clipped = (raw > top) | (raw < bot)
        saturated += int(clipped.sum())
        mants.append(np.clip(raw, bot, top).astype(np.int64))
    return QuantizedCube(
        re_mantissa=mants[0],
        im_mantissa=mants[1],
        format=fmt,
        saturation_count=saturated,
        scale=scale,
    )


@dataclass(frozen=True)
class FxpReport:
    format: FixedPointFormat
    mode: FxpMode
    sqnr_db: float               # quantized map vs double map
    peak_bin_agree: bool         # range and Doppler bins both identical
    pslr_double_db: float
    pslr_fxp_db: float
    pslr_delta_db: float         # fxp - double; +inf when fxp has no sidelobes
    pslr_agree: bool             # |delta| <= 0.5 dB, or quantization improved
    saturation_counts: dict[str, int]
    saturation_fraction: float
    warning: str | None


def _stage(
    x: np.ndarray,
    fmt: FixedPointFormat,
    counts: dict[str, int],
    sizes: dict[str, int],
    name: str,
) -> np.ndarray:
    qc = quantize(x, fmt)
    counts[name] = qc.saturation_count
    sizes[name] = 2 * x.size  # re and im components
    return qc.dequantize()


def quantized_matched_filter(
    cube: DataCube,
    bank: ReferenceBank,
    grid: DopplerGrid,
    fmt: FixedPointFormat,
    mode: FxpMode = FxpMode.FULL_CHAIN,
) -> tuple[RangeDopplerMap, FxpReport]:
    """Range-Doppler map computed on the fixed-point grid plus an accuracy
    report against the double-precision map of the same inputs.

    PSLR agreement is one-sided around the 0.5 dB budget: a quantized PSLR
    that is *better* than double precision (including the no-sidelobe
    sentinel, which occurs when roundoff-level sidelobes fall below half an
    output LSB) counts as agreement; degradation beyond 0.5 dB does not.
    """
    params = cube.params
    double_map = matched_filter_rd(cube, bank, grid)
    counts: dict[str, int] = {}
    sizes: dict[str, int] = {}

    x = cube.samples
    if mode is FxpMode.FULL_CHAIN:
        x = _stage(x, fmt, counts, sizes, "input")
    ref = _stage(bank.spectra, fmt, counts, sizes, "reference")
    spectra = np.fft.fft(x, axis=0)
    spectra = _stage(spectra, fmt, counts, sizes, "post_fft")
    matched = spectra * ref[bank.packet_map].T
    p_idx = np.arange(params.packets_per_cpi) * params.pri_s
    twiddle = np.exp(2j * np.pi * np.outer(p_idx, grid.frequencies_hz))
    twiddle = _stage(twiddle, fmt, counts, sizes, "twiddle")
    steered = _stage(matched @ twiddle, fmt, counts, sizes, "post_steering")
    profiles = np.fft.ifft(steered, axis=0)
    if mode is FxpMode.FULL_CHAIN:
        profiles = _stage(profiles, fmt, counts, sizes, "post_ifft")
    fxp_map = RangeDopplerMap(
        values=np.abs(profiles).T.copy(),
        range_axis_m=double_map.range_axis_m,
        doppler_axis_mps=double_map.doppler_axis_mps,
    )

    err = double_map.values - fxp_map.values
    err_power = float(np.sum(err**2))
    sig_power = float(np.sum(double_map.values**2))
    sqnr = math.inf if err_power == 0.0 else 10.0 * math.log10(sig_power / err_power)
    det_d = detect_peak(double_map)
    det_f = detect_peak(fxp_map)
    agree = det_d.range_bin == det_f.range_bin and det_d.doppler_bin == det_f.doppler_bin
    pslr_d = pslr_db(double_map.range_cut(det_d.doppler_bin))
    pslr_f = pslr_db(fxp_map.range_cut(det_f.doppler_bin))
    delta = pslr_f - pslr_d
    pslr_ok = (math.isfinite(delta) and abs(delta) <= 0.5) or pslr_f >= pslr_d
    total = sum(counts.values())
    components = sum(sizes.values())
    frac = total / components if components else 0.0
    warning = (
        f"pervasive saturation: {frac:.2%} of quantized components clipped"
        if frac > 0.01
        else None
    )
    report = FxpReport(
        format=fmt,
        mode=mode,
        sqnr_db=sqnr,
        peak_bin_agree=agree,
        pslr_double_db=pslr_d,
        pslr_fxp_db=pslr_f,
        pslr_delta_db=delta,
        pslr_agree=pslr_ok,
        saturation_counts=counts,
        saturation_fraction=frac,
        warning=warning,
    )
    return fxp_map, report


@dataclass(frozen=True)
class SweepRow:
    format: FixedPointFormat
    report: FxpReport
    runtime_s: float

    @property
    def sqnr_db(self) -> float:
        return self.report.sqnr_db

    @property
    def peak_agree(self) -> bool:
        return self.report.peak_bin_agree

    @property
    def pslr_delta_db(self) -> float:
        return self.report.pslr_delta_db


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    monotone_sqnr: bool  # SQNR non-decreasing in word length for fixed integer
    #                      bits, within a 3 dB measurement allowance


def precision_sweep(
    cube: DataCube,
    bank: ReferenceBank,
    grid: DopplerGrid,
    formats,
    mode: FxpMode = FxpMode.FULL_CHAIN,
) -> SweepResult:
    """One quantized run per format, with timing, plus an SQNR monotonicity
    summary across word lengths."""
    formats = list(formats)
    if not formats:
        raise ParameterError("precision_sweep needs at least one format")
    rows = []
    for fmt in formats:
        start = time.perf_counter()
        _, report = quantized_matched_filter(cube, bank, grid, fmt, mode)
        elapsed = time.perf_counter() - start
        rows.append(SweepRow(format=fmt, report=report, runtime_s=elapsed))
    monotone = True
    by_int: dict[int, list[SweepRow]] = {}
    for row in rows:
        by_int.setdefault(row.format.integer_bits, []).append(row)
    for group in by_int.values():
        group = sorted(group, key=lambda r: r.format.word_bits)
        for prev, cur in zip(group, group[1:]):
            if cur.sqnr_db < prev.sqnr_db - 3.0:
                monotone = False
    return SweepResult(rows=tuple(rows), monotone_sqnr=monotone)
