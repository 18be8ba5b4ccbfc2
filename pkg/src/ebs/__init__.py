"""Exact computation of the Erdos-Burgess constant and related structure
invariants for finite direct products of cyclic semigroups."""

__version__ = "0.1.0"

from .config import Budget
from .errors import BudgetExceeded, PreconditionError, SeqFileError, SpecError
from .semigroup import (
    CyclicSpec,
    GroupSpec,
    ProductSpec,
    add,
    canonical_index,
    element_count,
    format_spec,
    group_of,
    idempotent,
    parse_spec,
)
from .sequences import (
    GroupSeq,
    ReachSet,
    Seq,
    idempotent_witness,
    is_idempotent_sum,
    is_idempotent_sum_free,
    is_minimal_idempotent_sum,
    is_minimal_zero_sum,
    is_zero_sum_free,
    psi,
    reach,
    read_seq_file,
    sigma,
)
from .constants import (
    ConstResult,
    davenport,
    eb_bounds,
    eb_bruteforce,
    eb_exact,
    erdos_burgess,
    explore_conjecture,
    invariant_factors,
    reduce_spec,
)
from .structure import (
    IntSeq,
    StructClass,
    behaving_bound_classify,
    classify_free_sequence,
    has_structure,
    is_behaving,
    l_const,
    lhat,
    savchev_chen,
    structure_gap_report,
    subset_sums,
)

__all__ = [
    "Budget",
    "BudgetExceeded",
    "ConstResult",
    "CyclicSpec",
    "GroupSeq",
    "GroupSpec",
    "IntSeq",
    "PreconditionError",
    "ProductSpec",
    "ReachSet",
    "Seq",
    "SeqFileError",
    "SpecError",
    "StructClass",
    "add",
    "behaving_bound_classify",
    "canonical_index",
    "classify_free_sequence",
    "davenport",
    "eb_bounds",
    "eb_bruteforce",
    "eb_exact",
    "element_count",
    "erdos_burgess",
    "explore_conjecture",
    "format_spec",
    "group_of",
    "has_structure",
    "idempotent",
    "idempotent_witness",
    "invariant_factors",
    "is_behaving",
    "is_idempotent_sum",
    "is_idempotent_sum_free",
    "is_minimal_idempotent_sum",
    "is_minimal_zero_sum",
    "is_zero_sum_free",
    "l_const",
    "lhat",
    "parse_spec",
    "psi",
    "reach",
    "read_seq_file",
    "reduce_spec",
    "savchev_chen",
    "sigma",
    "structure_gap_report",
    "subset_sums",
]
