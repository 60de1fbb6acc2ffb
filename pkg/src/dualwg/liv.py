"""Analysis of measured device data: light-current-voltage (LIV) curves and
current-resolved emission-spectrum maps.

File format for LIV data: delimited text (whitespace or comma), '#' comments.
The header carries metadata as '# key: value' lines; 'device_area_cm2' is
required so current density can be reported.  Columns are
current_ma, voltage_v, then one power column per detector channel (mW).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .comb import SpectralMap, classify_spectrum, comb_bandwidth


class DataError(ValueError):
    pass


@dataclass
class LIVCurve:
    current_ma: np.ndarray
    voltage_v: np.ndarray
    power_mw: np.ndarray          # (npoints, nchannels)
    device_area_cm2: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.current_ma = np.asarray(self.current_ma, dtype=float)
        self.voltage_v = np.asarray(self.voltage_v, dtype=float)
        self.power_mw = np.atleast_2d(np.asarray(self.power_mw, dtype=float))
        if self.power_mw.shape[0] != self.current_ma.size:
            self.power_mw = self.power_mw.T
        if self.device_area_cm2 <= 0:
            raise DataError("device_area_cm2 must be > 0")
        d = np.diff(self.current_ma)
        if np.any(d <= 0):
            bad = int(np.nonzero(d <= 0)[0][0]) + 2
            raise DataError(
                f"current axis not strictly increasing at data row {bad} "
                f"(I = {self.current_ma[bad - 1]:g} mA)")

    @property
    def current_density_ka_cm2(self) -> np.ndarray:
        return self.current_ma * 1e-3 / self.device_area_cm2 / 1e3

    def channel(self, k: int | None = 0) -> np.ndarray:
        """Power of one detector channel; k=None sums all channels, which is
        the right signal for threshold fits when the lasing direction
        switches between channels."""
        if k is None:
            return self.power_mw.sum(axis=1)
        return self.power_mw[:, k]


def load_liv(path_or_file) -> LIVCurve:
    """Read an LIV text file (see module docstring for the format)."""
    if hasattr(path_or_file, "read"):
        text = path_or_file.read()
    else:
        with open(path_or_file) as f:
            text = f.read()
    meta = {}
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            body = s.lstrip("#").strip()
            if ":" in body:
                k, v = body.split(":", 1)
                meta[k.strip()] = v.strip()
            continue
        try:
            rows.append([float(t) for t in s.replace(",", " ").split()])
        except ValueError:
            raise DataError(f"line {lineno}: non-numeric data {s!r}")
    if not rows:
        raise DataError("no data rows found")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DataError(f"inconsistent column counts {sorted(widths)}")
    ncol = widths.pop()
    if ncol < 3:
        raise DataError("need at least current, voltage and one power column")
    if "device_area_cm2" not in meta:
        raise DataError("header is missing '# device_area_cm2: <value>'")
    arr = np.array(rows)
    return LIVCurve(current_ma=arr[:, 0], voltage_v=arr[:, 1],
                    power_mw=arr[:, 2:],
                    device_area_cm2=float(meta["device_area_cm2"]),
                    meta=meta)


def save_liv(curve: LIVCurve, path_or_file):
    """Write an LIV curve in the format load_liv reads (round-trips)."""
    buf = io.StringIO()
    meta = dict(curve.meta)
    meta["device_area_cm2"] = repr(curve.device_area_cm2)
    for k, v in meta.items():
        buf.write(f"# {k}: {v}\n")
    buf.write("# columns: current_ma voltage_v power_mw...\n")
    data = np.column_stack([curve.current_ma, curve.voltage_v, curve.power_mw])
    for row in data:
        buf.write(" ".join(repr(float(v)) for v in row) + "\n")
    if hasattr(path_or_file, "write"):
        path_or_file.write(buf.getvalue())
    else:
        with open(path_or_file, "w") as f:
            f.write(buf.getvalue())


def threshold_and_slope(curve: LIVCurve, channel: int | None = 0):
    """(threshold_ma, slope_mw_per_ma) of the lasing turn-on.

    The lasing segment is the longest contiguous run of points whose local
    slope exceeds half the maximum local slope; the threshold is the
    x-intercept of a least-squares line through that segment.  Points below
    the noise gate - max(1% of peak power, 3x the RMS of the pre-run
    residual) - never count as lasing.
    """
    i_ma = curve.current_ma
    p = curve.channel(channel)
    if i_ma.size < 4:
        raise DataError("need at least 4 points")
    # local slopes come from a quadratic Savitzky-Golay fit: with
    # multiplicative detector noise a pointwise slope estimate can fluctuate
    # by more than the true slope and spoil the 50%-of-max segment rule
    if i_ma.size >= 9:
        from scipy.signal import savgol_filter
        win = min(max(9, (i_ma.size // 8) | 1), i_ma.size)
        dx = float(np.median(np.diff(i_ma)))
        slopes = savgol_filter(p, win, 2, deriv=1, delta=dx)
        # the edge windows extrapolate and can overshoot badly; hold the
        # last interior estimate instead
        w2 = win // 2
        slopes[:w2] = slopes[w2]
        slopes[-w2:] = slopes[-w2 - 1]
    else:
        slopes = np.gradient(p, i_ma)
    smax = slopes.max()
    if smax <= 0:
        raise DataError("no lasing detected: power never increases")
    active = slopes > 0.5 * smax

    # longest contiguous True run
    best = (0, 0)
    start = None
    for k, a in enumerate(np.append(active, False)):
        if a and start is None:
            start = k
        elif not a and start is not None:
            if k - start > best[1] - best[0]:
                best = (start, k)
            start = None
    lo, hi = best
    if hi - lo < 2:
        raise DataError("no lasing detected: no sustained power rise")

    below = p[:lo] if lo > 0 else p[:1]
    gate = max(0.01 * p.max(), 3.0 * float(np.sqrt(np.mean(below ** 2))))
    seg = slice(lo, hi)
    keep = p[seg] > gate
    if keep.sum() < 2:
        raise DataError("no lasing detected: rise never clears the noise gate")
    x = i_ma[seg][keep]
    y = p[seg][keep]
    # detector noise grows with power, so weight the fit by 1/P
    slope, intercept = np.polyfit(x, y, 1, w=1.0 / y)
    if slope <= 0:
        raise DataError("no lasing detected: fitted slope not positive")
    return float(-intercept / slope), float(slope)


def power_oscillation_metric(curve: LIVCurve, channel: int = 0,
                             above_ma: float | None = None) -> float:
    """Sign changes of dP/dI per 100 mA of swept current (above threshold).

    Large values mark the alternating power exchange between coupled
    waveguides as the supermode resonance is swept through."""
    i_ma = curve.current_ma
    p = curve.channel(channel)
    if above_ma is None:
        above_ma, _ = threshold_and_slope(curve, channel)
    m = i_ma > above_ma
    if m.sum() < 3:
        raise DataError("too few points above threshold")
    dp = np.diff(p[m])
    dp = dp[dp != 0]
    changes = int(np.sum(np.diff(np.sign(dp)) != 0))
    span = i_ma[m][-1] - i_ma[m][0]
    return changes / span * 100.0


def channel_anticorrelation(curve: LIVCurve, ch_a: int = 0, ch_b: int = 1,
                            above_ma: float | None = None) -> float:
    """Pearson correlation of the two channels' power increments above
    threshold; near -1 when the channels trade power back and forth."""
    if curve.power_mw.shape[1] < 2:
        raise DataError("need two power channels")
    if above_ma is None:
        above_ma, _ = threshold_and_slope(curve, ch_a)
    m = curve.current_ma > above_ma
    da = np.diff(curve.channel(ch_a)[m])
    db = np.diff(curve.channel(ch_b)[m])
    if da.size < 3:
        raise DataError("too few points above threshold")
    return float(np.corrcoef(da, db)[0, 1])


@dataclass
class MapAnalysis:
    states: list                    # per-sweep-value classification
    bandwidths_cm: np.ndarray       # per-sweep-value comb bandwidth
    best_index: int                 # slice with the widest comb
    best_bandwidth_cm: float
    monochromatic_ranges: list      # [(lo, hi)] sweep-value intervals


def analyze_map(smap: SpectralMap, line_spacing_cm: float | None = None,
                smsr_db: float = 20.0, floor_db: float = -30.0) -> MapAnalysis:
    """Classify every slice of a spectral map and locate the widest comb."""
    if line_spacing_cm is None:
        d = np.diff(smap.spectral_axis)
        line_spacing_cm = float(abs(d[0])) if d.size else 1.0
    states = []
    bw = np.zeros(len(smap.sweep_axis))
    for k, row in enumerate(smap.intensity):
        if row.max() <= 0:
            states.append("off")
            continue
        states.append(classify_spectrum(row, smsr_db=smsr_db))
        if states[-1] != "monochromatic":
            bw[k] = comb_bandwidth(row, line_spacing_cm, floor_db=floor_db)
    best = int(np.argmax(bw))
    mono = []
    start = None
    for k, s in enumerate(states + ["_end"]):
        if s == "monochromatic" and start is None:
            start = k
        elif s != "monochromatic" and start is not None:
            mono.append((float(smap.sweep_axis[start]),
                         float(smap.sweep_axis[k - 1])))
            start = None
    return MapAnalysis(states=states, bandwidths_cm=bw, best_index=best,
                       best_bandwidth_cm=float(bw[best]),
                       monochromatic_ranges=mono)


def save_map(smap: SpectralMap, path_or_file):
    """Delimited-text serialization of a spectral map (round-trips)."""
    buf = io.StringIO()
    buf.write(f"# sweep_label: {smap.sweep_label}\n")
    buf.write(f"# spectral_label: {smap.spectral_label}\n")
    if smap.flagged:
        buf.write("# flagged: " + " ".join(repr(v) for v in smap.flagged) + "\n")
    buf.write("# first row: spectral axis; later rows: sweep value, intensities\n")
    buf.write("nan " + " ".join(repr(float(v)) for v in smap.spectral_axis) + "\n")
    for s, row in zip(smap.sweep_axis, smap.intensity):
        buf.write(repr(float(s)) + " "
                  + " ".join(repr(float(v)) for v in row) + "\n")
    if hasattr(path_or_file, "write"):
        path_or_file.write(buf.getvalue())
    else:
        with open(path_or_file, "w") as f:
            f.write(buf.getvalue())


def load_map(path_or_file) -> SpectralMap:
    if hasattr(path_or_file, "read"):
        text = path_or_file.read()
    else:
        with open(path_or_file) as f:
            text = f.read()
    meta = {}
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            body = s.lstrip("#").strip()
            if ":" in body:
                k, v = body.split(":", 1)
                meta[k.strip()] = v.strip()
            continue
        try:
            rows.append([float(t) for t in s.split()])
        except ValueError:
            raise DataError(f"line {lineno}: non-numeric data {s!r}")
    if len(rows) < 2:
        raise DataError("map file needs an axis row and at least one slice")
    arr = np.array(rows)
    flagged = [float(v) for v in meta.get("flagged", "").split()] \
        if meta.get("flagged") else []
    return SpectralMap(sweep_axis=arr[1:, 0], spectral_axis=arr[0, 1:],
                       intensity=arr[1:, 1:],
                       sweep_label=meta.get("sweep_label", "sweep"),
                       spectral_label=meta.get("spectral_label", "spectral"),
                       flagged=flagged)
