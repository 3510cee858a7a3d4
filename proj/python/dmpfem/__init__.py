"""Spectral/hp Galerkin and least-squares diffusion-decay solver.

Typical use::

    import dmpfem
    sol = dmpfem.solve(dmpfem.config(problem="decay1d", p=10))
    sol.report["min_value"]
"""

from ._core import (
    Error,
    RunConfig,
    Solution,
    audit,
    list_problems,
    run_solve,
    run_sweep,
    solve,
    sweep,
    verify,
)

__all__ = [
    "Error",
    "RunConfig",
    "Solution",
    "audit",
    "config",
    "list_problems",
    "run_solve",
    "run_sweep",
    "solve",
    "sweep",
    "verify",
]


def config(**fields):
    """RunConfig with the given fields set, e.g. ``config(problem="hole", k2=1e4)``."""
    cfg = RunConfig()
    for name, value in fields.items():
        if not hasattr(cfg, name):
            raise TypeError(f"RunConfig has no field {name!r}")
        setattr(cfg, name, value)
    return cfg
