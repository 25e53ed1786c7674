"""Open book decompositions: stable Hamiltonian structures, holomorphic page
curves, and index arithmetic, backed by the C++ core."""

from ._core import (
    Profile,
    blend,
    build_profile,
    conley_zehnder_rotation,
    fredholm_index,
    kappa_catalogue,
    linearized_return_rotation,
    normal_chern,
    run_pipeline,
    solve_half_cylinder,
    __version__,
)

__all__ = [
    "Profile",
    "blend",
    "build_profile",
    "conley_zehnder_rotation",
    "fredholm_index",
    "kappa_catalogue",
    "linearized_return_rotation",
    "normal_chern",
    "run_pipeline",
    "solve_half_cylinder",
    "__version__",
]
