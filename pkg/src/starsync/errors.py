"""Exception hierarchy shared by all starsync modules.

Every error carries a short machine-readable ``code`` that is echoed in JSON
reports and used to map failures onto CLI exit statuses (1 for bad input,
2 for numeric/resource trouble).
"""

from __future__ import annotations


class StarsyncError(Exception):
    """Base class for all package-specific errors."""

    code = "error"


class ParameterError(StarsyncError):
    """Invalid or inconsistent input parameters."""

    code = "parameter_error"


class DomainError(StarsyncError):
    """Argument outside the mathematical domain of an operation."""

    code = "domain_error"


class DegenerateNetworkError(StarsyncError):
    """All couplings vanish; the analytic mode construction does not apply."""

    code = "degenerate_network"


class PerturbationError(StarsyncError):
    """Perturbative corrections requested where the small parameter is undefined."""

    code = "perturbation_inapplicable"


class FrameError(StarsyncError):
    """State supplied in the wrong coordinate frame."""

    code = "frame_mismatch"


class InstabilityError(StarsyncError):
    """A corrected or exact Hooke constant is non-positive (unstable network)."""

    code = "instability"


class ResourceLimitError(StarsyncError):
    """Requested computation exceeds a configured resource cap."""

    code = "resource_limit"


class IntegrationAccuracyError(StarsyncError):
    """A numerical integration failed its accuracy contract."""

    code = "integration_accuracy"


class DiagnosticsError(StarsyncError):
    """A diagnostic quantity could not be computed from the given data."""

    code = "diagnostics_error"


class DegenerateFitError(StarsyncError):
    """Fit requested on degenerate data (e.g. all spreads zero)."""

    code = "degenerate_fit"


#: Errors that indicate bad user input (CLI exit status 1).
INPUT_FAILURES = (
    ParameterError,
    DomainError,
    DegenerateNetworkError,
    PerturbationError,
    FrameError,
)

#: Errors raised by numerics or resource limits (CLI exit status 2).
NUMERIC_FAILURES = (
    InstabilityError,
    ResourceLimitError,
    IntegrationAccuracyError,
    DiagnosticsError,
    DegenerateFitError,
)


def exit_code_for(exc: BaseException) -> int:
    """Map an exception onto the CLI exit-status contract."""
    if isinstance(exc, INPUT_FAILURES):
        return 1
    if isinstance(exc, NUMERIC_FAILURES):
        return 2
    return 2
