"""Quantum-walk comb formation in a modulated ring laser, on a synthetic
lattice of cavity modes.

Both circulation directions are tracked: a_n (lasing direction) and b_n
(counter-propagating), coupled by backscattering r and facet feedback rho.
In the rotating frame of the modulation the modal amplitudes obey

  da_n/dt = F_n[(1 - i lef) g(theta) E(theta)] - [alpha + g2 n^2] a_n
            + i [2 pi n delta + D2 n^2/2 + D3 n^3/6] a_n
            + i (M/2) (a_{n+1} + a_{n-1}) + i r b_n (+ noise)

with delta = f_mod - f_rep.  The gain medium is fast: it saturates on the
instantaneous intensity around the ring, g(theta) = g0/(1 + I(theta)/P_sat)
with I = |E_a|^2 + |E_b|^2 and E(theta) = sum_n a_n exp(i n theta) the field
over the roundtrip coordinate (F_n projects back onto mode n).  This is the
mean-field fast-gain (Ginzburg-Landau-like) description: the saturation term
carries the four-wave mixing that locks the comb, and lef (the linewidth
enhancement factor) the accompanying index change.  g2 is the spectral gain
roll-off that limits the walk and selects a single line when the modulation
is off.  Gain competition in the ring strongly favors one circulation
direction, so b_n carries loss, dispersion and hop terms but no direct gain;
it is driven by the coupling i (r + rho) a_n and stays parasitic.

Integration is fixed-step RK4 in the interaction picture of the dispersive
phase (the stiff diagonal is integrated exactly; the hop carries the
time-dependent phase difference), with optional per-step complex noise
injection (seeded).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .constants import C_CM_S


class CombError(ValueError):
    pass


class InstabilityError(RuntimeError):
    def __init__(self, message, params=None):
        super().__init__(message)
        self.params = params


class TruncationError(RuntimeError):
    pass


@dataclass(frozen=True)
class CombParams:
    mode_count: int = 257          # odd lattice, sites -N..N
    f_rep_ghz: float = 15.691
    f_mod_ghz: float = 15.691
    mod_index: float = 0.0         # M, coupling rate [rad/ns]
    gain: float = 2.0              # g0 [1/ns]
    loss: float = 1.0              # alpha [1/ns]
    sat_power: float = 1.0         # P_sat [arb. intensity]
    gain_curvature: float = 2e-3   # g2 [1/ns per n^2], spectral gain roll-off
    lef: float = 1.5               # linewidth enhancement factor
    d2: float = 0.0                # D2 [rad/ns per n^2]
    d3: float = 0.0                # D3 [rad/ns per n^3]
    backscatter: float = 0.0       # r [1/ns]
    facet_feedback: float = 0.0    # rho [1/ns]
    noise_floor: float = 1e-12     # seed intensity per site
    noise_rate: float = 0.0        # per-step injected amplitude std
    dt_ns: float = 0.01

    def __post_init__(self):
        if self.mode_count < 3 or self.mode_count % 2 == 0:
            raise CombError("mode_count must be odd and >= 3")
        if self.gain <= 0 or self.loss <= 0 or self.sat_power <= 0:
            raise CombError("gain, loss and sat_power must be > 0")
        if self.mod_index < 0 or self.backscatter < 0 or self.facet_feedback < 0:
            raise CombError("M, r and rho must be >= 0")
        if self.dt_ns <= 0:
            raise CombError("dt must be > 0")

    @property
    def detuning_ghz(self) -> float:
        return self.f_mod_ghz - self.f_rep_ghz

    @property
    def sites(self) -> np.ndarray:
        n = self.mode_count // 2
        return np.arange(-n, n + 1)

    @property
    def line_spacing_cm(self) -> float:
        return self.f_rep_ghz * 1e9 / C_CM_S


@dataclass
class CombState:
    a: np.ndarray                  # complex amplitudes, lasing direction
    b: np.ndarray                  # counter-propagating direction
    time_ns: float
    converged: bool

    @property
    def power(self) -> float:
        return float(np.sum(np.abs(self.a) ** 2 + np.abs(self.b) ** 2))

    def spectrum(self) -> np.ndarray:
        """Per-site intensity of the lasing direction."""
        return np.abs(self.a) ** 2


def single_site_state(p: CombParams, power: float = 1e-3) -> CombState:
    """All power on the center site; the others exactly empty.  Useful as a
    clean initial condition for threshold and fixed-point studies."""
    a = np.zeros(p.mode_count, dtype=complex)
    a[p.mode_count // 2] = np.sqrt(power)
    b = np.zeros(p.mode_count, dtype=complex)
    return CombState(a=a, b=b, time_ns=0.0, converged=False)


def _ring_fields(ab, nf):
    """Modal amplitudes (rows; site 0 = center index) -> fields on nf ring
    samples."""
    c = ab.shape[1] // 2
    spec = np.zeros((ab.shape[0], nf), dtype=complex)
    spec[:, :c + 1] = ab[:, c:]
    spec[:, nf - c:] = ab[:, :c]
    return np.fft.ifft(spec, axis=1) * nf


def _ring_project(fields, count):
    """Fields on the ring -> modal amplitudes (inverse of _ring_fields)."""
    c = count // 2
    nf = fields.shape[1]
    spec = np.fft.fft(fields, axis=1) / nf
    return np.concatenate([spec[:, nf - c:], spec[:, :c + 1]], axis=1)


def _rhs(ab, p: CombParams, g_n, w, wc, nf):
    """Interaction-picture right-hand side for the stacked (a, b) rows.

    The diagonal phase (detuning + dispersion) is removed exactly by the
    rotating transform a_n -> a_n exp(i phi_n t); the hop then carries the
    time-dependent phase difference w_n = exp(i (phi_{n+1} - phi_n) t).
    This keeps the stiff dispersive phase out of the explicit integrator."""
    e = _ring_fields(ab, nf)
    # saturation by the total local intensity; gain feeds only the lasing
    # direction (direction competition suppresses the counter-propagating one)
    g = (1.0 - 1j * p.lef) * p.gain / (
        1.0 + (np.abs(e[0]) ** 2 + np.abs(e[1]) ** 2) / p.sat_power)
    out = np.zeros_like(ab)
    out[0] = _ring_project((g * e[0])[np.newaxis, :], p.mode_count)[0]
    out += g_n * ab
    half_m = 0.5j * p.mod_index
    out[:, :-1] += half_m * ab[:, 1:] * w      # from the n+1 neighbor
    out[:, 1:] += half_m * ab[:, :-1] * wc     # from the n-1 neighbor
    out[0] += 1j * p.backscatter * ab[1]
    out[1] += 1j * (p.backscatter + p.facet_feedback) * ab[0]
    return out


def simulate_comb(p: CombParams, t_end_ns: float = 100.0, seed: int = 0,
                  initial: CombState | None = None) -> CombState:
    """Integrate to t_end and return the final state.

    The convergence flag requires the relative total-power drift over the
    last 10% of the run to stay below 1e-6.
    """
    n = p.sites.astype(float)
    delta = p.detuning_ghz * 2.0 * np.pi  # rad/ns per site index
    phase = n * delta + 0.5 * p.d2 * n * n + p.d3 * n**3 / 6.0
    rng = np.random.default_rng(seed)
    if initial is not None:
        ab = np.vstack([initial.a, initial.b]).astype(complex)
    else:
        amp = np.sqrt(p.noise_floor)
        ab = amp * (rng.standard_normal((2, p.mode_count))
                    + 1j * rng.standard_normal((2, p.mode_count))) / np.sqrt(2)

    steps = max(1, int(round(t_end_ns / p.dt_ns)))
    dt = t_end_ns / steps
    tail_start = int(steps * 0.9)
    tail_powers = []
    blow_up = 1e12 * p.sat_power

    g_n = -p.gain_curvature * n * n - p.loss
    dphi = np.diff(phase)  # hop phase rates, length N-1
    # ring sampling fine enough that the saturated-gain product of the top
    # occupied modes does not alias back into the lattice
    nf = 1
    while nf < 2 * p.mode_count:
        nf *= 2

    for s in range(steps):
        t0 = s * dt
        w0 = np.exp(1j * dphi * t0)
        wh = np.exp(1j * dphi * (t0 + 0.5 * dt))
        w1 = np.exp(1j * dphi * (t0 + dt))
        k1 = _rhs(ab, p, g_n, w0, w0.conj(), nf)
        k2 = _rhs(ab + 0.5 * dt * k1, p, g_n, wh, wh.conj(), nf)
        k3 = _rhs(ab + 0.5 * dt * k2, p, g_n, wh, wh.conj(), nf)
        k4 = _rhs(ab + dt * k3, p, g_n, w1, w1.conj(), nf)
        ab = ab + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if p.noise_rate > 0:
            sig = p.noise_rate * np.sqrt(dt)
            ab = ab + sig * (rng.standard_normal((2, p.mode_count))
                             + 1j * rng.standard_normal((2, p.mode_count)))
        ptot = np.sum(np.abs(ab) ** 2)
        if not np.isfinite(ptot) or ptot > blow_up:
            raise InstabilityError(
                f"field diverged at t = {(s + 1) * dt:.3f} ns "
                f"(P = {ptot:.3e}); params: {p}", params=p)
        if s >= tail_start:
            tail_powers.append(ptot)

    a, b = ab[0], ab[1]
    spec = np.abs(a) ** 2 + np.abs(b) ** 2
    total = spec.sum()
    edge = spec[0] + spec[-1] + spec[1] + spec[-2]
    if total > 10.0 * p.mode_count * p.noise_floor and edge > 0.01 * total:
        raise TruncationError(
            f"edge sites hold {edge / total:.1%} of the power; "
            f"mode_count = {p.mode_count} too small")

    tail = np.array(tail_powers)
    converged = bool(
        tail.size >= 2 and tail.min() > 0
        and (tail.max() - tail.min()) / max(tail.max(), 1e-300) < 1e-6)
    return CombState(a=a, b=b, time_ns=t_end_ns, converged=converged)


@dataclass
class SpectralMap:
    sweep_axis: np.ndarray         # f_mod [GHz] or current [mA]
    spectral_axis: np.ndarray      # cm^-1 offsets or mode index
    intensity: np.ndarray          # (len(sweep), len(spectral)), >= 0
    sweep_label: str = "f_mod_ghz"
    spectral_label: str = "offset_cm1"
    flagged: list = field(default_factory=list)   # sweep values that failed

    def __post_init__(self):
        if np.any(self.intensity < 0):
            raise CombError("map intensities must be >= 0")
        for ax in (self.sweep_axis, self.spectral_axis):
            if len(ax) > 1 and not (np.all(np.diff(ax) > 0)
                                    or np.all(np.diff(ax) < 0)):
                raise CombError("map axes must be strictly monotone")


def rf_detuning_sweep(p: CombParams, f_mod_start_ghz: float,
                      f_mod_stop_ghz: float, steps: int,
                      t_end_ns: float = 100.0, seed: int = 0,
                      cold_start: bool = False) -> SpectralMap:
    """One steady-state spectrum per modulation frequency.

    The sweep reuses the previous steady state as the initial condition
    (hysteresis-faithful); ``cold_start`` re-seeds every point.  A start
    above the stop frequency sweeps downward, so up- and down-sweeps can be
    compared or averaged.  Unstable points are recorded as flagged columns
    and the sweep continues.
    """
    lo, hi = sorted((f_mod_start_ghz, f_mod_stop_ghz))
    if not (lo < p.f_rep_ghz < hi):
        raise CombError("sweep range must bracket f_rep")
    f_mods = np.linspace(f_mod_start_ghz, f_mod_stop_ghz, steps)
    spectra = np.zeros((steps, p.mode_count))
    flagged = []
    state = None
    for i, f in enumerate(f_mods):
        pi = replace(p, f_mod_ghz=float(f))
        try:
            state = simulate_comb(pi, t_end_ns=t_end_ns, seed=seed + i,
                                  initial=None if cold_start else state)
            spectra[i] = state.spectrum()
        except (InstabilityError, TruncationError):
            flagged.append(float(f))
            state = None
    peak = spectra.max()
    if peak > 0:
        spectra /= peak
    offsets = p.sites * p.line_spacing_cm
    return SpectralMap(sweep_axis=f_mods, spectral_axis=offsets,
                       intensity=spectra, flagged=flagged)


def comb_bandwidth(spectrum: np.ndarray, line_spacing_cm: float,
                   floor_db: float = -30.0) -> float:
    """Spectral span [cm^-1] of the lines above (max + floor_db)."""
    spectrum = np.asarray(spectrum, dtype=float)
    if spectrum.size == 0:
        raise CombError("empty spectrum")
    peak = spectrum.max()
    if peak <= 0:
        raise CombError("all-zero spectrum")
    if floor_db >= 0:
        raise CombError("floor_db must be < 0")
    above = np.nonzero(spectrum > peak * 10.0 ** (floor_db / 10.0))[0]
    return float((above[-1] - above[0]) * line_spacing_cm)


def classify_spectrum(spectrum: np.ndarray, smsr_db: float = 20.0) -> str:
    """'monochromatic' | 'comb' | 'irregular'.

    Monochromatic: second-strongest line at least smsr_db below the peak.
    Comb: at least 3 lines within 30 dB of the peak, contiguous, with an
    envelope that decays (within a small tolerance) away from a single
    maximum.  Multiple strong lines with gaps, or a non-decaying envelope,
    are irregular.
    """
    s = np.asarray(spectrum, dtype=float)
    if s.size == 0:
        raise CombError("empty spectrum")
    peak = s.max()
    if peak <= 0:
        return "monochromatic"
    order = np.sort(s)[::-1]
    second = order[1] if s.size > 1 else 0.0
    if second <= peak * 10.0 ** (-smsr_db / 10.0):
        return "monochromatic"
    idx = np.nonzero(s > peak * 1e-3)[0]  # within 30 dB
    if len(idx) >= 3 and np.all(np.diff(idx) == 1):
        lines = s[idx]
        imax = int(np.argmax(lines))
        tol = 0.05 * peak
        left_ok = np.all(np.diff(lines[:imax + 1]) >= -tol)
        right_ok = np.all(np.diff(lines[imax:]) <= tol)
        if left_ok and right_ok:
            return "comb"
    return "irregular"


DISPERSION_RATE_FORMULA = (
    "D2 = -(2 pi)^2 f_rep^3 L beta2, D3 = -(2 pi)^3 f_rep^4 L beta3 "
    "(leading order), beta2 = gvd * 1e-27 s^2/m, beta3 = tod * 1e-42 s^3/m")


def dispersion_rates(gvd_fs2_mm: float, tod_fs3_mm: float,
                     f_rep_ghz: float, roundtrip_mm: float):
    """(D2, D3) lattice phase rates [rad/ns] from waveguide dispersion.

    The cavity resonance offsets D_int(n) = omega_n - omega_0 - 2 pi f_rep n
    follow from the round-trip phase beta(omega) L = 2 pi n; to leading
    order in the dispersion, D2 = -(2 pi)^2 f_rep^3 L beta2 and
    D3 = -(2 pi)^3 f_rep^4 L beta3 with beta2/beta3 the second/third
    derivatives of the propagation constant (SI units)."""
    if f_rep_ghz <= 0 or roundtrip_mm <= 0:
        raise CombError("f_rep and roundtrip length must be > 0")
    f = f_rep_ghz * 1e9
    length = roundtrip_mm * 1e-3
    beta2 = gvd_fs2_mm * 1e-27
    beta3 = tod_fs3_mm * 1e-42
    d2 = -(2.0 * np.pi) ** 2 * f ** 3 * length * beta2 * 1e-9
    d3 = -(2.0 * np.pi) ** 3 * f ** 4 * length * beta3 * 1e-9
    return d2, d3
