"""Structure of critical pairs."""
from .critical import (
    AdaptedBasis,
    CriticalityReport,
    Gradation,
    PsdReport,
    RationalSpectrum,
    adapted_basis,
    criticality_test,
    gradation,
    psd_check,
    rational_spectrum,
)
from .decompose import (
    DerivationAlgebra,
    ExtensionReport,
    LeviDecomposition,
    ReductiveReport,
    RestrictionReport,
    commutation_with_du,
    derivation_algebra,
    levi_decompose,
    reductive_part_pair,
    restrict_nilradical,
    semidirect_extend,
    theta_invariant_derivations,
    toral_extension,
)
from .minimal import (
    AbelianClassification,
    GaugeResult,
    MinimalDecomposition,
    MostowReport,
    abelian_classify,
    metric_constant,
    minimal_decompose,
    minimal_metric_gauge,
    mostow_involution,
    simple_ideals,
)

__all__ = [name for name in dir() if not name.startswith("_")]
