"""Geometry of warped half-plane metrics dr^2 + dt^2/h(r)^2."""

from ._core import (
    DomainError,
    Warp,
    chord_distance,
    classify,
    connect,
    distance_ds1,
    escape_length,
    integrate,
    run_cli,
    solve_riccati,
)

__all__ = [
    "DomainError",
    "Warp",
    "chord_distance",
    "classify",
    "connect",
    "distance_ds1",
    "escape_length",
    "integrate",
    "run_cli",
    "solve_riccati",
]
