"""Markovian dynamics of the network in the normal-mode frame.

The master equation is quadratic: a free rotation of every normal mode plus
thermal dissipators on the two leaking modes (the protected sector acquires
no dissipator at this order, and the secular approximation removes cross
terms between the well-separated leaking modes).  First and second moments
therefore close on themselves, and the whole evolution has a closed form:
means rotate and damp with e^{-gamma t / 2}, covariances relax toward the
thermal fixed point at rate gamma.  That closed form is the primary engine;
a truncated-Fock density-matrix integrator lives in ``fock`` as the oracle.

States are stored as quadrature means and covariances in dimensionless
units (vacuum covariance = I/2, ordering x_1, p_1, x_2, p_2, ...).
Trajectory exports convert to physical positions X_l = x_hat_l / sqrt(m w_l)
so that mean positions obey the familiar mode-sum formulas.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DiagnosticsError, DomainError, FrameError, ParameterError
from .model import NetworkParams, thermal_occupation
from .modes import ModeDecomposition
from .transform import CanonicalTransform

_UNCERTAINTY_TOL = -1e-9


def symplectic_form(n_modes: int) -> np.ndarray:
    """Standard symplectic form for interleaved (x, p) ordering."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for j in range(n_modes):
        omega[2 * j, 2 * j + 1] = 1.0
        omega[2 * j + 1, 2 * j] = -1.0
    return omega


@dataclass(frozen=True)
class GaussianState:
    """Gaussian state of all modes in a declared frame.

    ``frame`` is "physical" (modes = oscillators 1..n+1) or "normal"
    (modes = +, -, 0_1..0_{n-1}).  The validity requirement
    cov + (i/2) Omega >= 0 is checked on construction.
    """

    frame: str
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if self.frame not in ("physical", "normal"):
            raise ParameterError(f"unknown frame {self.frame!r}")
        if mean.ndim != 1 or mean.size % 2 != 0:
            raise ParameterError("mean must be a flat vector of length 2*(modes)")
        if cov.shape != (mean.size, mean.size):
            raise ParameterError("cov shape must match the mean vector")
        if not np.allclose(cov, cov.T, rtol=1e-8, atol=1e-9):
            raise ParameterError("covariance matrix must be symmetric")
        herm = cov + 0.5j * symplectic_form(mean.size // 2)
        min_eig = float(np.linalg.eigvalsh(herm)[0])
        if min_eig < _UNCERTAINTY_TOL:
            raise ParameterError(
                f"covariance violates the uncertainty relation (min eig {min_eig:.3e})"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def mode_mean(self, j: int) -> tuple[float, float]:
        return float(self.mean[2 * j]), float(self.mean[2 * j + 1])

    def mode_cov(self, j: int) -> np.ndarray:
        return self.cov[2 * j : 2 * j + 2, 2 * j : 2 * j + 2]

    def occupations(self) -> np.ndarray:
        """Mean quantum number per mode, (tr cov_j + |mean_j|^2) / 2 - 1/2."""
        occ = np.empty(self.n_modes)
        for j in range(self.n_modes):
            block = self.mode_cov(j)
            mx, mp = self.mode_mean(j)
            occ[j] = 0.5 * (block[0, 0] + block[1, 1] + mx * mx + mp * mp) - 0.5
        return occ


@dataclass(frozen=True)
class ModePrep:
    """Preparation of one mode: vacuum, coherent(alpha) or thermal(nbar)."""

    kind: str = "vacuum"
    alpha: complex = 0.0
    nbar: float = 0.0


@dataclass(frozen=True)
class DissipationSpec:
    """Decay rates and thermal occupations of the two leaking modes."""

    gamma_plus: float
    gamma_minus: float
    nbar_plus: float
    nbar_minus: float

    def __post_init__(self) -> None:
        for name in ("gamma_plus", "gamma_minus", "nbar_plus", "nbar_minus"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0")


@dataclass(frozen=True)
class Trajectory:
    """Time grid plus named expectation-value series."""

    times: np.ndarray
    series: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for label, values in self.series.items():
            if len(values) != len(self.times):
                raise ParameterError(
                    f"series {label!r} length {len(values)} != grid length "
                    f"{len(self.times)}"
                )


def make_dissipation(
    modes: ModeDecomposition,
    params: NetworkParams,
    gamma_plus: float | None = None,
    gamma_minus: float | None = None,
) -> DissipationSpec:
    """Split the bare hub rate between the leaking modes.

    The hub coordinate enters the leaking modes with weights cos(theta) and
    sin(theta), so the rates are gamma_0 cos^2 and gamma_0 sin^2; explicit
    overrides replace either rate.  Thermal occupations are evaluated at the
    corrected leaking frequencies.
    """
    if not modes.filled:
        raise ParameterError("mode corrections not filled; run perturb_corrections")
    c2 = math.cos(modes.theta_mix) ** 2
    gp = params.bath_rate * c2 if gamma_plus is None else float(gamma_plus)
    gm = params.bath_rate * (1.0 - c2) if gamma_minus is None else float(gamma_minus)
    w_plus, w_minus = float(modes.freqs[0]), float(modes.freqs[1])
    if params.bath_temp > 0:
        nbar_plus = thermal_occupation(w_plus, params.bath_temp)
        nbar_minus = thermal_occupation(w_minus, params.bath_temp)
    else:
        nbar_plus = nbar_minus = 0.0
    return DissipationSpec(
        gamma_plus=gp,
        gamma_minus=gm,
        nbar_plus=nbar_plus,
        nbar_minus=nbar_minus,
    )


def init_state(preps: list[ModePrep] | tuple[ModePrep, ...], frame: str) -> GaussianState:
    """Product Gaussian state from per-mode preparations.

    Vacuum and coherent modes have covariance I/2 (a coherent displacement
    alpha shifts the means to sqrt(2) (Re alpha, Im alpha)); a thermal mode
    has covariance (nbar + 1/2) I.
    """
    n = len(preps)
    mean = np.zeros(2 * n)
    cov = 0.5 * np.eye(2 * n)
    for j, prep in enumerate(preps):
        if prep.kind == "vacuum":
            continue
        if prep.kind == "coherent":
            alpha = complex(prep.alpha)
            if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
                raise DomainError("coherent amplitude must be finite")
            mean[2 * j] = math.sqrt(2.0) * alpha.real
            mean[2 * j + 1] = math.sqrt(2.0) * alpha.imag
        elif prep.kind == "thermal":
            if prep.nbar < 0:
                raise DomainError(f"thermal occupation must be >= 0, got {prep.nbar}")
            cov[2 * j, 2 * j] = cov[2 * j + 1, 2 * j + 1] = prep.nbar + 0.5
        else:
            raise ParameterError(f"unknown preparation kind {prep.kind!r}")
    return GaussianState(frame=frame, mean=mean, cov=cov)


def _mode_rates(diss: DissipationSpec, n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    gamma = np.zeros(n_modes)
    nbar = np.zeros(n_modes)
    gamma[0], gamma[1] = diss.gamma_plus, diss.gamma_minus
    nbar[0], nbar[1] = diss.nbar_plus, diss.nbar_minus
    return gamma, nbar


def _frame_blocks(
    transform: CanonicalTransform, direction: str
) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature mixing matrices between frames.

    The dimensionless quadratures absorb sqrt(m omega), so the coordinate map
    picks up frequency ratios; the momentum block is the inverse transpose of
    the coordinate block, which keeps the map symplectic.
    """
    wn = transform.freqs_normal
    wp = transform.freqs_physical
    if direction == "to_normal":
        tx = transform.b * np.sqrt(wn[:, None] / wp[None, :])
        tp = transform.c * np.sqrt(wp[None, :] / wn[:, None])
    elif direction == "to_physical":
        tx = transform.eps * np.sqrt(wp[:, None] / wn[None, :])
        tp = transform.eta * np.sqrt(wn[None, :] / wp[:, None])
    else:  # pragma: no cover
        raise ValueError(direction)
    return tx, tp


def _interleave(tx: np.ndarray, tp: np.ndarray) -> np.ndarray:
    n = tx.shape[0]
    s = np.zeros((2 * n, 2 * n))
    s[0::2, 0::2] = tx
    s[1::2, 1::2] = tp
    return s


def to_normal_frame(state: GaussianState, transform: CanonicalTransform) -> GaussianState:
    """Express a state in the normal-mode frame."""
    if state.frame == "normal":
        return state
    s = _interleave(*_frame_blocks(transform, "to_normal"))
    return GaussianState(frame="normal", mean=s @ state.mean, cov=s @ state.cov @ s.T)


def to_physical_frame(state: GaussianState, transform: CanonicalTransform) -> GaussianState:
    """Express a state in the physical-oscillator frame."""
    if state.frame == "physical":
        return state
    s = _interleave(*_frame_blocks(transform, "to_physical"))
    return GaussianState(frame="physical", mean=s @ state.mean, cov=s @ state.cov @ s.T)


def evolve_gaussian(
    state0: GaussianState,
    diss: DissipationSpec,
    modes: ModeDecomposition,
    t: float,
) -> GaussianState:
    """Closed-form evolution of a normal-frame Gaussian state by time t.

    Every mode rotates at its corrected frequency; the leaking pair damps
    with envelope e^{-gamma t / 2} on the means and relaxes its covariance
    block toward (nbar + 1/2) I at rate gamma.  Protected blocks (and
    protected-protected cross blocks) evolve unitarily; cross covariances
    with a leaking mode inherit the e^{-gamma t / 2} envelope.

    Raises ``FrameError`` unless the state is in the normal frame.
    """
    if state0.frame != "normal":
        raise FrameError("evolve_gaussian requires a state in the normal frame")
    if not modes.filled:
        raise ParameterError("mode corrections not filled; run perturb_corrections")
    n = state0.n_modes
    if n != modes.size:
        raise ParameterError("state size does not match the mode decomposition")

    w = modes.freqs
    gamma, nbar = _mode_rates(diss, n)
    phase = w * t
    damp = np.exp(-0.5 * gamma * t)
    cos, sin = np.cos(phase), np.sin(phase)

    m = np.zeros((2 * n, 2 * n))
    m[0::2, 0::2] = np.diag(damp * cos)
    m[0::2, 1::2] = np.diag(damp * sin)
    m[1::2, 0::2] = np.diag(-damp * sin)
    m[1::2, 1::2] = np.diag(damp * cos)

    relax = (nbar + 0.5) * (-np.expm1(-gamma * t))
    q = np.zeros((2 * n, 2 * n))
    q[0::2, 0::2] = np.diag(relax)
    q[1::2, 1::2] = np.diag(relax)

    mean = m @ state0.mean
    cov = m @ state0.cov @ m.T + q
    cov = 0.5 * (cov + cov.T)
    return GaussianState(frame="normal", mean=mean, cov=cov)


_LABEL_RE = re.compile(r"^(x|p)_(\d+)$")


def _parse_labels(labels: list[str] | tuple[str, ...], size: int) -> list[tuple[str, int]]:
    parsed = []
    for label in labels:
        match = _LABEL_RE.match(label)
        if not match:
            raise ParameterError(
                f"unknown observable label {label!r}; expected x_<l> or p_<l>"
            )
        idx = int(match.group(2))
        if not 1 <= idx <= size:
            raise ParameterError(
                f"label {label!r} refers to mode {idx}, valid range is 1..{size}"
            )
        parsed.append((match.group(1), idx - 1))
    return parsed


def position_trajectory(
    state0: GaussianState,
    transform: CanonicalTransform,
    diss: DissipationSpec,
    modes: ModeDecomposition,
    times: np.ndarray,
    labels: list[str] | tuple[str, ...],
) -> Trajectory:
    """Mean physical positions/momenta of selected oscillators over a grid.

    The state is mapped to the normal frame, each normal mean evolves in
    closed form (rotation at the corrected frequency, times the damping
    envelope for leaking modes, including the sin term fed by the initial
    momentum), and the physical means are recovered through the inverse
    coordinate map.  After the leaking transients decay, every position is a
    sum over protected modes only.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise ParameterError("time grid must not be empty")
    parsed = _parse_labels(labels, transform.size)

    state_n = to_normal_frame(state0, transform)
    n = state_n.n_modes
    w = modes.freqs
    gamma, _ = _mode_rates(diss, n)

    x0 = state_n.mean[0::2]
    p0 = state_n.mean[1::2]
    phase = np.outer(w, times)
    damp = np.exp(-0.5 * np.outer(gamma, times))
    # dimensionless normal means over the grid, shape (modes, times)
    xq = damp * (x0[:, None] * np.cos(phase) + p0[:, None] * np.sin(phase))
    pq = damp * (-x0[:, None] * np.sin(phase) + p0[:, None] * np.cos(phase))

    scale = np.sqrt(transform.mass * w)
    x_phys = transform.eps @ (xq / scale[:, None])
    p_phys = transform.eta @ (pq * scale[:, None])

    series: dict[str, np.ndarray] = {}
    for (kind, idx), label in zip(parsed, labels):
        series[label] = x_phys[idx].copy() if kind == "x" else p_phys[idx].copy()

    metadata = {
        "frame": "physical",
        "freqs_normal": list(map(float, w)),
        "gamma_plus": diss.gamma_plus,
        "gamma_minus": diss.gamma_minus,
    }
    return Trajectory(times=times, series=series, metadata=metadata)


def occupation_series(
    state0: GaussianState,
    transform: CanonicalTransform,
    diss: DissipationSpec,
    modes: ModeDecomposition,
    times: np.ndarray,
) -> dict[str, np.ndarray]:
    """Closed-form normal-mode occupations over a time grid.

    Leaking modes relax as nbar + (n0 - nbar) e^{-gamma t}; protected
    occupations are constants of motion at this order.
    """
    times = np.asarray(times, dtype=float)
    state_n = to_normal_frame(state0, transform)
    occ0 = state_n.occupations()
    gamma, nbar = _mode_rates(diss, state_n.n_modes)
    names = ["n_plus", "n_minus"] + [
        f"n_zero_{j + 1}" for j in range(state_n.n_modes - 2)
    ]
    out = {}
    for j, name in enumerate(names):
        decay = np.exp(-gamma[j] * times)
        out[name] = nbar[j] + (occ0[j] - nbar[j]) * decay
    return out


@dataclass(frozen=True)
class SyncMetrics:
    """Pairwise correlation and frequency diagnostics over a late window."""

    correlations: dict[str, float]
    dominant_freqs: dict[str, float]
    max_freq_diff: float
    window_start: float
    window_end: float


def _dominant_frequency(values: np.ndarray, dt: float) -> float:
    centered = values - values.mean()
    spectrum = np.abs(np.fft.rfft(centered))
    if spectrum.size < 2:
        return 0.0
    k = 1 + int(np.argmax(spectrum[1:]))
    return 2.0 * math.pi * k / (len(values) * dt)


def sync_metrics(traj: Trajectory, window: float = 0.25) -> SyncMetrics:
    """Late-window synchronization diagnostics of position trajectories.

    For every pair of position series the Pearson correlation over the final
    ``window`` fraction of the grid is computed, together with each signal's
    dominant angular frequency (peak of the discrete spectrum) and the
    largest pairwise dominant-frequency difference.

    Raises
    ------
    DiagnosticsError
        If fewer than two position series are present, a windowed signal has
        no variance, or the window spans fewer than four dominant periods.
    """
    if not 0.0 < window <= 1.0:
        raise ParameterError(f"window must lie in (0, 1], got {window}")
    labels = sorted(
        (label for label in traj.series if label.startswith("x_")),
        key=lambda s: int(s.split("_")[1]),
    )
    if len(labels) < 2:
        raise DiagnosticsError("need at least two position series for sync metrics")

    times = traj.times
    steps = np.diff(times)
    if steps.size == 0 or np.max(np.abs(steps - steps[0])) > 1e-9 * steps[0]:
        raise DiagnosticsError("sync metrics require a uniform, non-trivial time grid")
    t_start = times[-1] - window * (times[-1] - times[0])
    sel = times >= t_start - 1e-12
    dt = float(steps[0])

    windowed = {}
    dominant = {}
    for label in labels:
        values = np.asarray(traj.series[label], dtype=float)[sel]
        if np.allclose(values, values.mean(), atol=1e-300):
            raise DiagnosticsError(f"signal {label!r} has no variance in the window")
        windowed[label] = values
        dominant[label] = _dominant_frequency(values, dt)

    slowest = min(dominant.values())
    if slowest <= 0:
        raise DiagnosticsError("could not estimate a dominant frequency")
    span = times[-1] - max(times[0], t_start)
    if span < 4.0 * (2.0 * math.pi / slowest):
        raise DiagnosticsError(
            f"window spans {span / (2.0 * math.pi / slowest):.2f} dominant periods; "
            "at least 4 are required"
        )

    correlations = {}
    for i, a in enumerate(labels):
        for b in labels[i + 1 :]:
            va = windowed[a] - windowed[a].mean()
            vb = windowed[b] - windowed[b].mean()
            denom = math.sqrt(float(va @ va) * float(vb @ vb))
            correlations[f"{a}:{b}"] = float(va @ vb) / denom

    freqs = [dominant[label] for label in labels]
    max_diff = float(np.max(np.abs(np.subtract.outer(freqs, freqs))))
    return SyncMetrics(
        correlations=correlations,
        dominant_freqs=dominant,
        max_freq_diff=max_diff,
        window_start=float(max(times[0], t_start)),
        window_end=float(times[-1]),
    )
