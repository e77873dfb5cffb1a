"""Star-network parameters and the potential quadratic form.

The network consists of ``n`` outer oscillators, each coupled only to one
central hub oscillator (index ``n+1``), all with a common mass.  Units are
chosen so that hbar = k_B = 1.  The potential energy is the quadratic form
(1/2) x^T V x; ``build_potential`` constructs V together with its exact split
into a scalar multiple of the identity, a coupling matrix G carried entirely
by the hub row/column, and a diagonal detuning matrix D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class NetworkParams:
    """Physical parameters of the star network.

    Attributes
    ----------
    n : int
        Number of outer oscillators (>= 1).
    mass : float
        Common oscillator mass (> 0, arbitrary units).
    hooke : tuple of float
        Hooke constants k_1..k_{n+1}; the last entry belongs to the hub.
        All must be positive.
    couplings : tuple of float
        Spring constants g_1..g_n tying each outer oscillator to the hub.
        Non-negative (attractive); repulsive couplings are out of scope.
    bath_rate : float
        Bare damping rate gamma_0 of the hub coordinate (>= 0).
    bath_temp : float
        Bath temperature T (>= 0, energy units).
    """

    n: int
    mass: float
    hooke: tuple[float, ...]
    couplings: tuple[float, ...]
    bath_rate: float = 0.0
    bath_temp: float = 0.0

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n must be an integer >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "hooke", tuple(float(k) for k in self.hooke))
        object.__setattr__(self, "couplings", tuple(float(g) for g in self.couplings))
        if self.mass <= 0:
            raise ParameterError(f"mass must be positive, got {self.mass}")
        if len(self.hooke) != self.n + 1:
            raise ParameterError(
                f"hooke must have n+1 = {self.n + 1} entries, got {len(self.hooke)}"
            )
        if len(self.couplings) != self.n:
            raise ParameterError(
                f"couplings must have n = {self.n} entries, got {len(self.couplings)}"
            )
        if any(k <= 0 for k in self.hooke):
            raise ParameterError("all Hooke constants must be positive")
        if any(g < 0 for g in self.couplings):
            raise ParameterError("all couplings must be non-negative")
        if self.bath_rate < 0:
            raise ParameterError(f"bath_rate must be >= 0, got {self.bath_rate}")
        if self.bath_temp < 0:
            raise ParameterError(f"bath_temp must be >= 0, got {self.bath_temp}")


@dataclass(frozen=True)
class PotentialDecomposition:
    """The potential matrix V and its exact decomposition.

    V = shift * I + G + D, where shift = k_av + g_av, G vanishes everywhere
    except the hub row/column (off-diagonal entries -g_i, corner entry
    ``delta``), and D is diagonal with entries dk_i + dg_i on the outer
    oscillators and 0 on the hub.

    ``xi`` is the dimensionless size of D relative to the average coupling,
    max_j(|dk_j| + |dg_j|) / g_av over the outer oscillators; it is ``None``
    (undefined) when g_av = 0, and perturbative operations reject that case.
    """

    n: int
    mass: float
    v: np.ndarray
    shift: float
    g_matrix: np.ndarray
    d_matrix: np.ndarray
    k_av: float
    g_av: float
    delta: float
    lambda_sq: float
    xi: float | None

    @property
    def size(self) -> int:
        """Total number of oscillators, n + 1."""
        return self.n + 1

    def couplings(self) -> np.ndarray:
        """Coupling constants g_1..g_n read back from the hub column of G."""
        return -self.g_matrix[: self.n, self.n]


def build_potential(params: NetworkParams) -> PotentialDecomposition:
    """Construct V and its shift/G/D decomposition for a star network.

    Parameters
    ----------
    params : NetworkParams
        Validated network parameters.

    Returns
    -------
    PotentialDecomposition
        Immutable container with V, the decomposition pieces and the derived
        scalars (k_av, g_av, delta, lambda_sq, xi).
    """
    n = params.n
    k = np.asarray(params.hooke, dtype=float)
    g = np.asarray(params.couplings, dtype=float)

    k_av = float(np.sum(k) / (n + 1))
    g_av = float(np.sum(g) / n)
    dk = k - k_av
    dg = g - g_av
    delta = float(dk[n] + (n - 1) * g_av)
    lambda_sq = float(np.dot(g, g))

    v = np.zeros((n + 1, n + 1))
    v[np.arange(n), np.arange(n)] = k[:n] + g
    v[:n, n] = -g
    v[n, :n] = -g
    v[n, n] = k[n] + n * g_av

    g_matrix = np.zeros_like(v)
    g_matrix[:n, n] = -g
    g_matrix[n, :n] = -g
    g_matrix[n, n] = delta

    d_matrix = np.zeros_like(v)
    d_matrix[np.arange(n), np.arange(n)] = dk[:n] + dg

    xi: float | None
    if g_av > 0:
        xi = float(np.max(np.abs(dk[:n]) + np.abs(dg)) / g_av)
    else:
        xi = None

    return PotentialDecomposition(
        n=n,
        mass=float(params.mass),
        v=_readonly(v),
        shift=k_av + g_av,
        g_matrix=_readonly(g_matrix),
        d_matrix=_readonly(d_matrix),
        k_av=k_av,
        g_av=g_av,
        delta=delta,
        lambda_sq=lambda_sq,
        xi=xi,
    )


def thermal_occupation(omega: float, temp: float) -> float:
    """Bose-Einstein mean occupation of a mode at frequency ``omega``.

    Returns 1 / (exp(omega/temp) - 1) for temp > 0 and exactly 0 at
    temp = 0.  ``omega`` must be positive.
    """
    if omega <= 0:
        raise DomainError(f"omega must be positive, got {omega}")
    if temp < 0:
        raise DomainError(f"temperature must be >= 0, got {temp}")
    if temp == 0:
        return 0.0
    x = omega / temp
    # expm1 keeps precision for small omega/temp
    return 1.0 / math.expm1(x)
