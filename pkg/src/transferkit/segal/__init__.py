from .xm import (AbelianGGroup, XMSpace, build_XM, cyclic_module_actions,
                 make_abelian_g_group, segal_bijection_check, transfer_map,
                 twisted_power_comparison, verify_semi_mackey)
from .permcat import (DiagramFailure, FinCategory, PermCat, SizeBoundExceeded,
                      discrete_monoid_seed, finite_sets_seed)
from .abar import AbarCategory, build_Abar, certify_equivalence

__all__ = [
    "AbelianGGroup", "XMSpace", "build_XM", "cyclic_module_actions",
    "make_abelian_g_group", "segal_bijection_check", "transfer_map",
    "twisted_power_comparison", "verify_semi_mackey",
    "DiagramFailure", "FinCategory", "PermCat", "SizeBoundExceeded",
    "discrete_monoid_seed", "finite_sets_seed",
    "AbarCategory", "build_Abar", "certify_equivalence",
]
