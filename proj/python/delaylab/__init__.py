"""Bifurcation delay in planar slow-fast systems x' = eps f, z' = g z."""

from ._delaylab import (
    DelaylabError,
    DomainFault,
    EntryExitSolution,
    IntegrationError,
    Model,
    NoExitInWindow,
    NumericsError,
    ParseError,
    PreconditionError,
    UnknownModel,
    __version__,
    builtin_model,
    builtin_model_names,
    check_hypotheses,
    derivative_probe,
    hausdorff_distance,
    max_zeta,
    model_from_text,
    simulate,
    slow_curves,
    solve_exit,
    sweep,
    transversality_det,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
