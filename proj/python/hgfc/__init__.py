"""Online job scheduling with general cost functions.

Thin wrapper around the C++ core: instance generation, the offline
flow/LP oracles, the online single- and unrelated-machine engines, and
the duality bookkeeping they produce.
"""

try:
    from ._hgfc import (  # noqa: F401
        HgfcError,
        curvature_K,
        gen_instance,
        hdf,
        hrdf,
        lp_lower_bound,
        oracle_duals,
        oracle_value,
        run_single,
        run_unrelated,
        stretch_theta,
    )
except ImportError:  # in-tree builds keep the module next to the package
    from _hgfc import (  # noqa: F401
        HgfcError,
        curvature_K,
        gen_instance,
        hdf,
        hrdf,
        lp_lower_bound,
        oracle_duals,
        oracle_value,
        run_single,
        run_unrelated,
        stretch_theta,
    )

__all__ = [
    "HgfcError",
    "curvature_K",
    "gen_instance",
    "hdf",
    "hrdf",
    "lp_lower_bound",
    "oracle_duals",
    "oracle_value",
    "run_single",
    "run_unrelated",
    "stretch_theta",
]
