"""Default numerical tolerances and run configuration.

All tolerances are exposed as explicit operation arguments; the values
here are the package-wide defaults.  ``Tolerances`` bundles them for the
pipeline entry points and the CLI.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

#: Relative eigenvalue threshold for the Gram rank decision.
RANK_TOL = 1e-9

#: Base factor for the moment-matrix PSD test: tol = PSD_TOL_BASE * (1 + max|s|).
PSD_TOL_BASE = 1e-10

#: Shared subspace tolerance for QR/SVD range and complement decisions.
SUBSPACE_TOL = 1e-9

#: Residual gate for shift actions, relative to the Gram norm.
RESIDUAL_GATE = 1e-8

#: A unitary eigenvalue within this distance of 1 counts as a fixed point.
FIXED_POINT_TOL = 1e-8

#: Eigenvalue clustering tolerance (commutant blocks, joint eigenspaces).
CLUSTER_TOL = 1e-8

#: Two atoms closer than this (max coordinate distance) are merged.
ATOM_MERGE_TOL = 1e-7

#: Recovered atoms with weight below this are dropped.
WEIGHT_DROP_TOL = 1e-12

#: Singular values may exceed 1 by at most this much in a contraction.
CONTRACTION_SLACK = 1e-12

#: Radius of the excluded disks around the points +/-i (and their Moebius
#: images) where resolvent formulas degenerate.
EXCLUDED_RADIUS = 1e-6

#: Carleman verdict heuristic: tail window length, lower bound epsilon,
#: and the log-log slope below which decay counts as a converging trend.
CARLEMAN_WINDOW = 5
CARLEMAN_EPS = 1e-3
CARLEMAN_SLOPE = -0.5

#: Generic residual tolerance for structural verification (unitarity,
#: invariance, Hermitian symmetry).
STRUCTURE_TOL = 1e-9


@dataclass(frozen=True)
class Tolerances:
    """Bundle of the numerical knobs used by pipeline entry points."""

    rank_tol: float = RANK_TOL
    psd_tol: float | None = None
    subspace_tol: float = SUBSPACE_TOL
    residual_gate: float = RESIDUAL_GATE
    fixed_point_tol: float = FIXED_POINT_TOL
    cluster_tol: float = CLUSTER_TOL
    atom_merge_tol: float = ATOM_MERGE_TOL
    weight_drop_tol: float = WEIGHT_DROP_TOL
    contraction_slack: float = CONTRACTION_SLACK
    excluded_radius: float = EXCLUDED_RADIUS
    structure_tol: float = STRUCTURE_TOL
    carleman_window: int = CARLEMAN_WINDOW
    carleman_eps: float = CARLEMAN_EPS
    carleman_slope: float = CARLEMAN_SLOPE

    def replace(self, **kwargs) -> "Tolerances":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(kwargs)
        return Tolerances(**values)


DEFAULT_TOLERANCES = Tolerances()
