"""Multigraded Betti tables of one-critical multifiltrations.

Betti tables are computed as homology of Koszul complexes assembled from
persistent homology modules, either directly or as iterated mapping cones;
discrete Morse reduction with a filtration-consistent matching gives a
smaller equivalent complex, and the critical module checks the support
theorems tying Betti supports to entrance grades of critical cells and to
homological critical grades.
"""

from .algebra import FpMatrix, PrimeField
from .complexes import (
    Cell,
    CellComplex,
    ChainComplexOfSpaces,
    HomologyBasis,
    homology_basis,
    induced_map,
    relative_homology_dim,
    simplicial_complex,
    validate_complex,
)
from .critical import (
    Claim,
    SupportReport,
    homological_critical_grades,
    verify_bifiltration_bounds,
    verify_local_maps,
    verify_ses_dims,
    verify_support_theorem,
)
from .docio import (
    FiltrationDocument,
    GeneratorParams,
    ParseError,
    document_from_filtration,
    generate_random,
    lower_star,
    parse_document,
    print_document,
)
from .filtration import (
    GradeVector,
    OneCriticalFiltration,
    box_grades,
    join,
    leq,
    lub_closure,
    meet,
    meet_intersection_check,
    validate_one_critical,
)
from .koszul import (
    BettiTable,
    ChainMap,
    KoszulComplex,
    ModuleSlice,
    barcode_1param,
    betti_tables,
    build_module_slice,
    hilbert_check,
    koszul_direct,
    koszul_via_cones,
    mapping_cone,
    rank_invariant,
)
from .morse import (
    DiscreteVectorField,
    MorseComplexResult,
    build_matching,
    check_consistency,
    morse_complex,
    validate_dvf,
)

__version__ = "0.1.0"

__all__ = [
    "BettiTable",
    "Cell",
    "CellComplex",
    "ChainComplexOfSpaces",
    "ChainMap",
    "Claim",
    "DiscreteVectorField",
    "FiltrationDocument",
    "FpMatrix",
    "GeneratorParams",
    "GradeVector",
    "HomologyBasis",
    "KoszulComplex",
    "ModuleSlice",
    "MorseComplexResult",
    "OneCriticalFiltration",
    "ParseError",
    "PrimeField",
    "SupportReport",
    "barcode_1param",
    "betti_tables",
    "box_grades",
    "build_matching",
    "build_module_slice",
    "check_consistency",
    "document_from_filtration",
    "generate_random",
    "hilbert_check",
    "homological_critical_grades",
    "homology_basis",
    "induced_map",
    "join",
    "koszul_direct",
    "koszul_via_cones",
    "leq",
    "lower_star",
    "lub_closure",
    "mapping_cone",
    "meet",
    "meet_intersection_check",
    "morse_complex",
    "parse_document",
    "print_document",
    "rank_invariant",
    "relative_homology_dim",
    "simplicial_complex",
    "validate_complex",
    "validate_dvf",
    "validate_one_critical",
    "verify_bifiltration_bounds",
    "verify_local_maps",
    "verify_ses_dims",
    "verify_support_theorem",
]
