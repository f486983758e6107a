//! Gromov-Witten classes on moduli spaces of stable curves.

pub mod cycle_classes;
pub mod error;
pub mod gw_numbers;
pub mod moduli_comb;
pub mod nef_cone;
pub mod qh_ring;
pub mod verify;

pub use cycle_classes::{
    divisor_class, fcurve_degree, fcurve_degree_by_products, pushforward_divisor, stratum_degree,
    ClassVector,
};
pub use error::{Error, Result};
pub use gw_numbers::{
    big_gw_projective, fourpoint_divisor, fourpoint_divisor_with, npoint_codim0, GwSpec, Strategy,
};
pub use moduli_comb::{
    all_fcurves, fcurve_delta_pairing, nonadjacent_basis, pullback_fcurve, tcount,
    BoundaryDivisor, DualCurveSystem, FCurve, MarkSet, StratumTree,
};
pub use nef_cone::{
    contracted_fcurves_odd_quadric, decompose_in_rays, is_f_nef, ContractionRule, RayTable,
};
pub use qh_ring::{
    diagonal, parse_element, parse_element_list, poincare_pairing, star_product, BasisClass,
    QhElement, Rational, SpaceKind, TargetSpace,
};
