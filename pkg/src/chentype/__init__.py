"""Finite-type analysis of surfaces with respect to their first, second and third fundamental forms."""

from .beltrami import Form, beltrami_first, beltrami_grad, beltrami_second, identity_suite
from .errors import (
    ChentypeError,
    ConfigurationError,
    DomainError,
    InsufficientOrderError,
    NormalizationError,
    OrderMismatchError,
    ParabolicPointError,
    RegularityError,
    SingularCompositionError,
    SpecParseError,
)
from .finitetype import FiniteTypeVerdict, IterateTable, build_iterates, dependence_test, eigenvalue_extract
from .forms import ConnectionBundle, FormBundle, connections, fundamental_forms
from .jets import Jet, JetVec3, Series, compose
from .ruledsym import (
    HalfPowerField,
    HalfPowerVec3,
    RuledInvariants,
    degree_trace,
    delta2_ruled,
    p1_closed_form,
    ruled_invariants,
    vanishing_analysis,
)
from .surfaces import (
    SurfaceSpec,
    cylinder,
    evaluate_chart,
    graph,
    helicoid,
    load_spec,
    ruled,
    sample_grid,
    sphere,
    torus,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
