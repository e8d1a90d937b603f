"""Numerical toolkit for 2-inner-product spaces and reverse Cauchy-Schwarz bounds."""

from .integral import (
    PROP_IDS,
    QuadratureGrid,
    WeightedTriple,
    discrete_evaluator,
    moments,
    premise_check,
    prop_bounds,
    synchronous,
    two_inner_phi,
    two_norm_phi,
)
from .numeric import (
    DEFAULT_TOL,
    Field,
    InconsistencyError,
    InvalidDimension,
    InvalidInput,
    InvalidInstance,
    SeededGenerator,
    Tolerance,
    approx_equal,
    sample_vector,
    sample_vectors,
)
from .reverse import (
    INEQUALITY_IDS,
    BoundReport,
    ConditionReport,
    PositivePair,
    ScalarPair,
    additive_reverse,
    condition_check,
    extremal_instance,
    i_identity,
    orthonormal_pair,
    positive_reverse,
    product_step,
    quotient_reverse,
    sharpness_probe,
    triangle_identity,
    triangle_reverse,
)
from .space import (
    InnerSpace,
    TwoInnerEvaluator,
    axiom_suite,
    cbs_gap,
    inner,
    polarize,
    two_inner,
    two_norm,
)

__version__ = "0.1.0"
