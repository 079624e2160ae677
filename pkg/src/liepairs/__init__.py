"""Numerical tools for Lie brackets paired with homomorphisms into a
semi-simple Lie algebra: moment map, energy, gradient flow, norm
minimization and the structure of critical pairs."""
from .algebra import (
    QuadraticLieAlgebra,
    Subspace,
    ValidationReport,
    adjoint,
    algebra_from_name,
    catalog,
    centralizer,
    gc_algebra,
    killing_form,
    validate_algebra,
)
from .errors import (
    CatalogError,
    LiePairsError,
    NumericalError,
    PreconditionError,
    ReconstructionError,
    ResidualGuardError,
    ValidationError,
)
from .flow import FlowOptions, FlowResult, MinimizeResult, flow_energy, kempf_ness_minimize
from .instances import catalog_pair, random_pair
from .moment import (
    MomentValue,
    derivation_orthogonality_check,
    energy_gradient,
    derivation_positivity_check,
    moment_definitional,
    moment_explicit,
)
from .pairs import (
    DerivationSpace,
    GroupElement,
    Pair,
    TangentElement,
    derivation_space,
    group_act,
    inf_act,
    pair_adjoint,
    residuals,
)

__version__ = "0.1.0"
