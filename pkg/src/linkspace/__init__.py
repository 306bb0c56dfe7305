"""Collision-aware configuration spaces of spatial linkages.

Core surface: robust edge geometry and linking signs (`geom`), linkage
models and label vectors (`model`), path metrics and virtual
configurations (`virtual`), singularity classification with blow-up fiber
counts (`singular`), CW models of two- and three-line spaces (`lines`),
integer cellular homology (`cw`), and closed/open chain analysis
(`chains`).  The `linkspace` CLI fronts all of it.
"""

__version__ = "0.1.0"
