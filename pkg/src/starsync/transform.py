"""Canonical transformation between physical and normal coordinates.

Coordinates transform with the modal matrix ``b`` (rows = normal modes) and
momenta with ``c``; we take the orthogonal point transformation c = b, which
satisfies the commutation-preserving conditions sum_l b_l^(j) c_l^(j') =
delta_jj' identically.  The induced map on ladder operators mixes
annihilation and creation parts whenever the normal frequencies differ from
the bare ones (a Bogoliubov transformation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InstabilityError, PerturbationError
from .model import NetworkParams
from .modes import ExactSpectrum, ModeDecomposition, classify_exact_modes


@dataclass(frozen=True)
class CanonicalTransform:
    """Linear maps between physical and normal coordinates/momenta.

    ``b`` and ``c`` map physical to normal (rows = modes, in (+, -, 0_j)
    order); ``eps`` and ``eta`` are their inverses.  ``freqs_physical`` are
    the bare frequencies sqrt(k_l / m); ``freqs_normal`` come from the
    corrected (or exact) Hooke constants.  ``frame`` records which mode basis
    the rows represent: "perturbative" or "exact".
    """

    b: np.ndarray
    c: np.ndarray
    eps: np.ndarray
    eta: np.ndarray
    freqs_physical: np.ndarray
    freqs_normal: np.ndarray
    mass: float
    frame: str = "perturbative"

    @property
    def size(self) -> int:
        return self.b.shape[0]


@dataclass(frozen=True)
class BogoliubovMap:
    """Coefficients of a_tilde_j = sum_k u_jk a_k + v_jk a_k^dagger."""

    u: np.ndarray
    v: np.ndarray


def _assemble(
    modal: np.ndarray,
    k_normal: np.ndarray,
    params: NetworkParams,
    frame: str,
) -> CanonicalTransform:
    if np.any(k_normal <= 0):
        bad = int(np.argmin(k_normal))
        raise InstabilityError(
            f"corrected Hooke constant {k_normal[bad]:.6g} at mode index {bad} "
            "is not positive; the network is unstable in this basis"
        )
    b = np.array(modal, dtype=float)
    c = b.copy()
    freqs_physical = np.sqrt(np.asarray(params.hooke, dtype=float) / params.mass)
    freqs_normal = np.sqrt(k_normal / params.mass)
    return CanonicalTransform(
        b=b,
        c=c,
        eps=b.T.copy(),
        eta=c.T.copy(),
        freqs_physical=freqs_physical,
        freqs_normal=freqs_normal,
        mass=float(params.mass),
        frame=frame,
    )


def build_canonical_transform(
    modes: ModeDecomposition, params: NetworkParams
) -> CanonicalTransform:
    """Canonical transform built from the perturbative mode basis.

    Requires filled corrections (the normal frequencies come from the
    corrected Hooke constants); raises ``InstabilityError`` if any corrected
    constant is non-positive.
    """
    if not modes.filled:
        raise PerturbationError(
            "mode corrections not filled; run perturb_corrections first"
        )
    return _assemble(modes.modal_matrix(), modes.k_corr, params, "perturbative")


def exact_canonical_transform(
    spectrum: ExactSpectrum,
    modes: ModeDecomposition,
    params: NetworkParams,
) -> CanonicalTransform:
    """Canonical transform from the exact eigenvectors of V.

    The exact modes are reordered to the package convention (+, -, 0_j) using
    their overlap with the analytic mode basis, so downstream dynamics can
    treat both frames interchangeably.
    """
    i_plus, i_minus, protected = classify_exact_modes(spectrum, modes)
    order = [i_plus, i_minus, *protected]
    modal = spectrum.eigenvectors[:, order].T
    k_normal = spectrum.eigenvalues[order]
    return _assemble(modal, k_normal, params, "exact")


def bogoliubov_map(t: CanonicalTransform) -> BogoliubovMap:
    """Ladder-operator mixing induced by the canonical transform.

    u_jk = (b_k^(j) sqrt(wn_j/wp_k) + c_k^(j) sqrt(wp_k/wn_j)) / 2 and
    v_jk the same with a minus sign, so that u = I, v = 0 when the
    transformation is trivial and u u^T - v v^T = I always.
    """
    if np.any(t.freqs_normal <= 0) or np.any(t.freqs_physical <= 0):
        raise DomainError("all frequencies must be positive for the ladder map")
    ratio = np.sqrt(t.freqs_normal[:, None] / t.freqs_physical[None, :])
    u = 0.5 * (t.b * ratio + t.c / ratio)
    v = 0.5 * (t.b * ratio - t.c / ratio)
    return BogoliubovMap(u=u, v=v)
