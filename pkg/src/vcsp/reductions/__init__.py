from .hardness import (
    CnfFormula,
    MaxCutInstance,
    NaeFormula,
    chain_3sat_to_vcsp,
    max_cut,
    maxcut_decide,
    maxcut_to_vcsp,
    nae3_to_maxcut,
    nae4_to_nae3,
    sat3_to_nae4,
    validate_xor_function,
)
from .language import (
    ScaleMap,
    apply_scale_map,
    dominance_factor,
    expand_expressible,
    find_scaling,
    find_subdomain,
    lift_gammac,
    restrict_to_core_instance,
    verify_perm_instance,
)
