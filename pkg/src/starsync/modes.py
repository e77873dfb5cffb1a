"""Normal-mode analysis of the star network.

The coupling matrix G has two non-degenerate eigenvalues (the "leaking" pair,
carrying the hub coordinate) and an (n-1)-fold zero eigenvalue whose
eigenvectors never involve the hub ("protected" modes).  This module builds
that eigensystem in closed form, adds the first-order corrections induced by
the diagonal detuning matrix D, and provides an exact dense diagonalization
of the full potential matrix as an independent numerical oracle.

Mode ordering convention throughout the package: (+, -, 0_1 .. 0_{n-1}),
with the zero-sector entries sorted by ascending correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateNetworkError,
    DiagnosticsError,
    PerturbationError,
)
from .model import PotentialDecomposition

#: Relative detuning above which first-order corrections are flagged as
#: unreliable (the computation still proceeds; the exact oracle has no limit).
REGIME_THRESHOLD = 0.3


def _sign_fix(v: np.ndarray) -> np.ndarray:
    """Flip a vector's sign so its largest-magnitude component is positive."""
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


@dataclass(frozen=True)
class ModeDecomposition:
    """Analytic eigensystem of G, optionally with corrections from D.

    ``g_eigensystem`` fills the structural fields; ``perturb_corrections``
    returns a copy with the correction fields populated.

    Attributes
    ----------
    g_plus, g_minus : float
        The two non-zero eigenvalues of G (g_plus >= 0 >= g_minus for
        non-negative couplings).
    vec_plus, vec_minus : ndarray, shape (n+1,)
        Unit eigenvectors of the leaking pair, sign-fixed so the largest
        component is positive.
    zero_basis : ndarray, shape (n+1, n-1)
        Orthonormal basis of the zero eigenspace built from a chain of
        planar rotations; every column has vanishing hub component.
    theta_mix : float
        Hub mixing angle with tan(theta) = -g_minus / g_plus, used to split
        the bare bath rate between the leaking modes.
    xi : float or None
        Relative detuning copied from the potential decomposition.
    zero_rotation : ndarray, shape (n-1, n-1)
        Orthogonal matrix diagonalizing D restricted to the zero sector
        (identity-free until corrections are computed).
    dk_plus, dk_minus : float
        First-order corrections <v, D v> for the leaking pair.
    dk_zero : ndarray, shape (n-1,)
        Zero-sector corrections, sorted ascending.
    k_corr : ndarray, shape (n+1,)
        Corrected Hooke constants in mode order (+, -, 0_1..0_{n-1}).
    freqs : ndarray, shape (n+1,)
        sqrt(k_corr / mass), same ordering.
    regime_warning : bool
        True when xi exceeds ``REGIME_THRESHOLD``.
    """

    g_plus: float
    g_minus: float
    vec_plus: np.ndarray
    vec_minus: np.ndarray
    zero_basis: np.ndarray
    theta_mix: float
    xi: float | None
    zero_rotation: np.ndarray | None = None
    dk_plus: float | None = None
    dk_minus: float | None = None
    dk_zero: np.ndarray | None = None
    k_corr: np.ndarray | None = None
    freqs: np.ndarray | None = None
    regime_warning: bool = False

    @property
    def size(self) -> int:
        return self.vec_plus.shape[0]

    @property
    def n_protected(self) -> int:
        return self.zero_basis.shape[1]

    @property
    def filled(self) -> bool:
        """True once perturbative corrections have been computed."""
        return self.k_corr is not None

    def modal_matrix(self) -> np.ndarray:
        """Rows of the (n+1)x(n+1) modal matrix in (+, -, 0_j) order."""
        return np.vstack([self.vec_plus, self.vec_minus, self.zero_basis.T])


@dataclass(frozen=True)
class ExactSpectrum:
    """Dense symmetric eigendecomposition of V (numerical ground truth)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, ascending eigenvalue order
    freqs: np.ndarray

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]


def g_eigensystem(decomp: PotentialDecomposition) -> ModeDecomposition:
    """Closed-form eigensystem of the coupling matrix G.

    The leaking eigenvalues are (delta +- sqrt(delta^2 + 4*Lambda^2)) / 2 and
    their eigenvectors follow from the component ratio -g_j / G_pm on the
    outer oscillators.  The zero modes are generated by a chain of planar
    rotations whose angles are computed with the two-argument arctangent, so
    vanishing couplings never divide by zero.

    Raises
    ------
    DegenerateNetworkError
        If every coupling is zero (G has no leaking pair); use
        ``exact_diagonalize`` for that case.
    """
    n = decomp.n
    g = decomp.couplings()
    if not np.any(g > 0):
        raise DegenerateNetworkError(
            "all couplings vanish; the network is decoupled - "
            "use exact_diagonalize instead"
        )

    delta = decomp.delta
    lam2 = decomp.lambda_sq
    root = math.hypot(delta, 2.0 * math.sqrt(lam2))
    g_plus = 0.5 * (delta + root)
    g_minus = 0.5 * (delta - root)

    vec_plus = np.append(-g / g_plus, 1.0)
    vec_plus = _sign_fix(vec_plus / np.linalg.norm(vec_plus))
    vec_minus = np.append(-g / g_minus, 1.0)
    vec_minus = _sign_fix(vec_minus / np.linalg.norm(vec_minus))

    # Zero modes: each step rotates the running in-plane direction against
    # the next coordinate axis; t_run tracks |g_1..g_j| so the chain stays
    # orthogonal to the coupling vector.
    zero_basis = np.zeros((n + 1, max(n - 1, 0)))
    carrier = np.zeros(n + 1)
    carrier[0] = 1.0
    t_run = g[0]
    for j in range(n - 1):
        theta = math.atan2(-t_run, g[j + 1])
        axis = np.zeros(n + 1)
        axis[j + 1] = 1.0
        column = math.cos(theta) * carrier + math.sin(theta) * axis
        zero_basis[:, j] = _sign_fix(column)
        carrier = -math.sin(theta) * carrier + math.cos(theta) * axis
        t_run = math.hypot(t_run, g[j + 1])

    theta_mix = math.atan2(-g_minus, g_plus)

    xi = decomp.xi
    return ModeDecomposition(
        g_plus=g_plus,
        g_minus=g_minus,
        vec_plus=vec_plus,
        vec_minus=vec_minus,
        zero_basis=zero_basis,
        theta_mix=theta_mix,
        xi=xi,
        regime_warning=(xi is not None and xi > REGIME_THRESHOLD),
    )


def perturb_corrections(
    modes: ModeDecomposition, decomp: PotentialDecomposition
) -> ModeDecomposition:
    """First-order spectrum corrections induced by the detuning matrix D.

    The leaking corrections are the diagonal matrix elements <v, D v>; the
    zero sector requires diagonalizing the restriction of D to the protected
    subspace, which also rotates the zero basis.  Corrected Hooke constants
    are shift + G_pm + dk_pm for the leaking pair and shift + dk_0j for the
    protected modes.

    Raises
    ------
    PerturbationError
        If xi is undefined (zero average coupling).
    """
    if modes.xi is None:
        raise PerturbationError(
            "xi is undefined (g_av = 0); perturbative corrections do not apply"
        )

    d_diag = np.diag(decomp.d_matrix)
    dk_plus = float(modes.vec_plus @ (d_diag * modes.vec_plus))
    dk_minus = float(modes.vec_minus @ (d_diag * modes.vec_minus))

    n_zero = modes.n_protected
    if n_zero > 0:
        restriction = modes.zero_basis.T @ (d_diag[:, None] * modes.zero_basis)
        restriction = 0.5 * (restriction + restriction.T)
        dk_zero, rotation = np.linalg.eigh(restriction)  # ascending
        zero_basis = modes.zero_basis @ rotation
        zero_basis = np.column_stack(
            [_sign_fix(zero_basis[:, j]) for j in range(n_zero)]
        )
    else:
        dk_zero = np.zeros(0)
        rotation = np.zeros((0, 0))
        zero_basis = modes.zero_basis

    shift = decomp.shift
    k_corr = np.concatenate(
        [[shift + modes.g_plus + dk_plus, shift + modes.g_minus + dk_minus],
         shift + dk_zero]
    )
    freqs = np.sqrt(np.maximum(k_corr, 0.0) / decomp.mass)

    return replace(
        modes,
        zero_basis=zero_basis,
        zero_rotation=rotation,
        dk_plus=dk_plus,
        dk_minus=dk_minus,
        dk_zero=dk_zero,
        k_corr=k_corr,
        freqs=freqs,
    )


def exact_diagonalize(decomp: PotentialDecomposition) -> ExactSpectrum:
    """Full symmetric eigendecomposition of V (numerical oracle).

    Eigenvalues come back ascending with sign-fixed orthonormal eigenvectors;
    valid at any detuning, independent of the perturbative construction.
    """
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(decomp.v)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigh is robust
        raise DiagnosticsError(f"eigendecomposition failed to converge: {exc}")
    for j in range(eigenvectors.shape[1]):
        eigenvectors[:, j] = _sign_fix(eigenvectors[:, j])
    freqs = np.sqrt(np.maximum(eigenvalues, 0.0) / decomp.mass)
    return ExactSpectrum(
        eigenvalues=eigenvalues, eigenvectors=eigenvectors, freqs=freqs
    )


def classify_exact_modes(
    spectrum: ExactSpectrum, modes: ModeDecomposition
) -> tuple[int, int, tuple[int, ...]]:
    """Identify exact eigenvectors with the (+, -, 0_j) mode labels.

    Protected modes are the n-1 eigenvectors with the largest projection onto
    the zero-mode subspace; of the remaining pair, the larger eigenvalue is
    '+'.  Returns (index_plus, index_minus, protected_indices) into the
    ascending exact spectrum, with protected indices sorted by eigenvalue.
    """
    z = modes.zero_basis
    weights = np.sum((z.T @ spectrum.eigenvectors) ** 2, axis=0)
    order = np.argsort(weights)
    leak = sorted(order[:2], key=lambda i: spectrum.eigenvalues[i])
    i_minus, i_plus = int(leak[0]), int(leak[1])
    protected = tuple(int(i) for i in sorted(order[2:]))
    return i_plus, i_minus, protected


@dataclass(frozen=True)
class SqueezingEstimate:
    """Approximate protected-mode frequencies and their spread.

    ``spread_approx`` comes from the first-order expansion of
    sqrt((shift + dk) / m) around the common value; ``spread_exact`` is the
    same quantity measured on the exact spectrum for comparison.
    ``degenerate`` flags networks with fewer than two protected modes, where
    the spread is reported as zero.
    """

    freqs_approx: np.ndarray
    spread_approx: float
    spread_exact: float
    degenerate: bool


def squeezing_estimate(
    modes: ModeDecomposition, decomp: PotentialDecomposition
) -> SqueezingEstimate:
    """First-order protected-mode frequencies and the frequency spread.

    The expansion is omega_0j ~ sqrt(shift/m) * (1 + dk_0j / (2*shift)),
    accurate when the couplings are nearly uniform.  The exact spread is
    computed from ``exact_diagonalize`` with protected modes identified by
    their overlap with the zero-mode subspace.
    """
    if not modes.filled:
        raise PerturbationError("corrections not filled; run perturb_corrections first")
    spectrum = exact_diagonalize(decomp)
    _, _, protected = classify_exact_modes(spectrum, modes)

    base = math.sqrt(decomp.shift / decomp.mass)
    freqs_approx = base * (1.0 + modes.dk_zero / (2.0 * decomp.shift))

    if modes.n_protected < 2:
        exact_spread = 0.0
        approx_spread = 0.0
        degenerate = True
    else:
        exact_freqs = spectrum.freqs[list(protected)]
        exact_spread = float(np.max(exact_freqs) - np.min(exact_freqs))
        approx_spread = float(np.max(freqs_approx) - np.min(freqs_approx))
        degenerate = False

    return SqueezingEstimate(
        freqs_approx=freqs_approx,
        spread_approx=approx_spread,
        spread_exact=exact_spread,
        degenerate=degenerate,
    )
