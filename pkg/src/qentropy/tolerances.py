"""Numerical tolerances used by every validator and verdict in the package.

The defaults sit comfortably above double-precision eigensolver error at the
dimensions this toolkit targets (N <= 16) and far below any structural gap the
verdicts have to resolve.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import ValidationError

__all__ = ["ToleranceConfig", "DEFAULT_TOL"]


@dataclass(frozen=True)
class ToleranceConfig:
    """Tolerance bundle threaded through validation and verdict code.

    herm   -- max-abs deviation allowed between a matrix and its adjoint
    trace  -- allowed |trace - 1| for states
    psd    -- eigenvalues in [-psd, 0) count as numerical zeros; below is an error
    recon  -- spectral-reconstruction and isometry-orthonormality slack
    eq     -- equality slack for entropies and channel comparisons
    fix    -- residual threshold for fixed-point membership
    group  -- relative gap under which eigenvalues are grouped as degenerate
    """

    herm: float = 1e-9
    trace: float = 1e-9
    psd: float = 1e-10
    recon: float = 1e-10
    eq: float = 1e-8
    fix: float = 1e-7
    group: float = 1e-6

    def __post_init__(self) -> None:
        for name, value in self.as_dict().items():
            if not 0.0 <= value < 1.0:
                raise ValidationError(f"tolerance {name}={value!r} must lie in [0, 1)")

    def replace(self, **changes: float) -> "ToleranceConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


DEFAULT_TOL = ToleranceConfig()
