"""Paving partitions and averaging certificates for finite-dimensional inclusions."""

from ._core import (  # noqa: F401
    AlgebraShape,
    Element,
    Inclusion,
    InclusionSpec,
    PavingError,
    d_ob,
    dixmier_average,
    dixmier_count_bound,
    kesten_bound,
    l2_norm,
    l2_pave,
    lemma24_lower_bound,
    make_problem,
    op_norm,
    pave_search,
    pp_index_estimate,
    pp_inequality_check,
    random_element,
    run_kesten,
    theorem_bound,
    trace,
    trivial_certificate,
)

__version__ = "0.1.0"
