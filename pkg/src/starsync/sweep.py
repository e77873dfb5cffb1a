"""Coupling-strength scans: frequency curves, spread and scaling fits.

A sweep replaces the couplings with g_i = g + offset_i on a (log-spaced)
grid of g values and records, per grid point, the perturbative and exact
frequencies of every mode together with the spread of the protected
frequencies.  Mode identity along the grid is tracked by eigenvector overlap
rather than by sorted order, so frequency curves keep their labels through
crossings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace as dc_replace

import numpy as np

from .errors import DegenerateFitError, InstabilityError, ParameterError
from .model import NetworkParams, build_potential
from .modes import classify_exact_modes, exact_diagonalize, g_eigensystem, perturb_corrections


@dataclass(frozen=True)
class FitResult:
    """Least-squares power-law fit of the spread versus (g + k_av)."""

    exponent: float
    stderr: float
    constant: float
    n_points: int


@dataclass(frozen=True)
class SweepResult:
    """Frequency table over a coupling grid.

    ``freq_pert`` and ``freq_exact`` have one row per grid point and one
    column per tracked mode; ``tags`` names the columns ("leaking+",
    "leaking-", "protected_1", ...).  ``spread`` is the exact
    protected-frequency spread per grid point and ``xi`` the relative
    detuning there.
    """

    g_grid: np.ndarray
    tags: tuple[str, ...]
    freq_pert: np.ndarray
    freq_exact: np.ndarray
    spread: np.ndarray
    xi: np.ndarray
    k_av: float
    fit: FitResult | None


def _greedy_match(overlap: np.ndarray) -> np.ndarray:
    """Column permutation maximizing |overlap| greedily.

    ``overlap[i, j]`` scores previous mode i against current mode j; returns
    ``perm`` with perm[i] = j.  Curves are well separated between adjacent
    grid points, so a greedy assignment is reliable here.
    """
    score = np.abs(overlap).copy()
    n = score.shape[0]
    perm = np.full(n, -1)
    for _ in range(n):
        i, j = np.unravel_index(np.argmax(score), score.shape)
        perm[i] = j
        score[i, :] = -1.0
        score[:, j] = -1.0
    return perm


def frequency_sweep(
    base: NetworkParams,
    g_min: float,
    g_max: float,
    steps: int,
    offsets: list[float] | tuple[float, ...],
    grid: str = "log",
) -> SweepResult:
    """Sweep the average coupling with fixed per-oscillator offsets.

    At each grid point the couplings are g_i = g + offset_i; the analytic
    modes (with corrections), the exact spectrum, the protected-frequency
    spread and the relative detuning are recorded.  A power-law fit of the
    spread against (g + k_av) is attempted over the whole grid.
    """
    if g_min <= 0:
        raise ParameterError(f"g_min must be positive, got {g_min}")
    if g_max <= g_min:
        raise ParameterError("g_max must exceed g_min")
    if steps < 2:
        raise ParameterError(f"steps must be >= 2, got {steps}")
    offsets = tuple(float(o) for o in offsets)
    if len(offsets) != base.n:
        raise ParameterError(
            f"offsets must have n = {base.n} entries, got {len(offsets)}"
        )
    if grid == "log":
        g_grid = np.geomspace(g_min, g_max, steps)
    elif grid == "linear":
        g_grid = np.linspace(g_min, g_max, steps)
    else:
        raise ParameterError(f"unknown grid kind {grid!r}")

    size = base.n + 1
    n_prot = base.n - 1
    tags = ("leaking+", "leaking-") + tuple(f"protected_{j + 1}" for j in range(n_prot))

    all_modes = []
    all_spectra = []
    xi = np.empty(steps)
    k_av = 0.0
    for i, g in enumerate(g_grid):
        params = dc_replace(base, couplings=tuple(g + o for o in offsets))
        decomp = build_potential(params)
        k_av = decomp.k_av
        modes = perturb_corrections(g_eigensystem(decomp), decomp)
        spectrum = exact_diagonalize(decomp)
        if spectrum.eigenvalues[0] <= 0:
            raise InstabilityError(
                f"negative Hooke eigenvalue {spectrum.eigenvalues[0]:.6g} at "
                f"grid point {i} (g = {g:.6g})"
            )
        all_modes.append(modes)
        all_spectra.append(spectrum)
        xi[i] = decomp.xi if decomp.xi is not None else math.inf

    # Mode identity: classify where the detuning is (relatively) smallest,
    # where leaking/protected labels are unambiguous, then propagate along
    # the grid by eigenvector continuity.
    anchor = int(np.argmin(xi))
    i_plus, i_minus, protected = classify_exact_modes(all_spectra[anchor], all_modes[anchor])
    orders = [np.empty(0, dtype=int)] * steps
    orders[anchor] = np.array([i_plus, i_minus, *protected])
    for i in range(anchor + 1, steps):
        prev = all_spectra[i - 1].eigenvectors[:, orders[i - 1]]
        orders[i] = _greedy_match(prev.T @ all_spectra[i].eigenvectors)
    for i in range(anchor - 1, -1, -1):
        nxt = all_spectra[i + 1].eigenvectors[:, orders[i + 1]]
        orders[i] = _greedy_match(nxt.T @ all_spectra[i].eigenvectors)

    freq_pert = np.empty((steps, size))
    freq_exact = np.empty((steps, size))
    spread = np.empty(steps)
    for i in range(steps):
        spectrum = all_spectra[i]
        modes = all_modes[i]
        tracked_vectors = spectrum.eigenvectors[:, orders[i]]
        freq_exact[i] = spectrum.freqs[orders[i]]
        # pair each tracked exact mode with its closest analytic mode
        modal = modes.modal_matrix()  # rows in (+, -, 0_j) order
        pert_perm = _greedy_match(tracked_vectors.T @ modal.T)
        freq_pert[i] = modes.freqs[pert_perm]
        prot = freq_exact[i, 2:]
        spread[i] = float(np.max(prot) - np.min(prot)) if n_prot >= 2 else 0.0

    result = SweepResult(
        g_grid=g_grid,
        tags=tags,
        freq_pert=freq_pert,
        freq_exact=freq_exact,
        spread=spread,
        xi=xi,
        k_av=k_av,
        fit=None,
    )
    try:
        fit = scaling_fit(result, g_threshold=None)
    except DegenerateFitError:
        fit = None
    return dc_replace(result, fit=fit)


def scaling_fit(result: SweepResult, g_threshold: float | None) -> FitResult:
    """Power-law exponent of the protected spread versus (g + k_av).

    Ordinary least squares on log(spread) against log(g + k_av), restricted
    to grid points with g >= g_threshold (all points when ``None``) and
    positive spread.  Returns the slope, its standard error, and the fitted
    prefactor.

    Raises
    ------
    DegenerateFitError
        If every selected spread vanishes or fewer than 5 points remain.
    """
    # spreads at rounding level count as zero
    floor = 1e-10 * max(1.0, float(np.max(result.freq_exact, initial=0.0)))
    mask = result.spread > floor
    if g_threshold is not None:
        mask &= result.g_grid >= g_threshold
    n_points = int(np.count_nonzero(mask))
    if not np.any(result.spread > floor):
        raise DegenerateFitError("all spreads vanish; nothing to fit")
    if n_points < 5:
        raise DegenerateFitError(
            f"need at least 5 usable grid points above the threshold, got {n_points}"
        )
    x = np.log(result.g_grid[mask] + result.k_av)
    y = np.log(result.spread[mask])
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = ym - slope * xm
    resid = y - (slope * x + intercept)
    dof = max(n_points - 2, 1)
    stderr = math.sqrt(float(resid @ resid) / dof / sxx)
    return FitResult(
        exponent=slope,
        stderr=stderr,
        constant=math.exp(intercept),
        n_points=n_points,
    )
