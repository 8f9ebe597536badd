//! Exact arithmetic for the Fourier-Mukai partners of elliptic ruled
//! surfaces `P(O_E ⊕ L)` with `L` an `m`-torsion line bundle.
//!
//! - [`modmath`]: factorization, `φ(m)`, `(Z/mZ)*`, CM congruence roots,
//!   subgroups and orbits.
//! - [`lattice`]: curve classes, unit actions, torsion points, rational
//!   lattices and dual-isogeny kernels.
//! - [`fm`]: the symmetry group `H`, the three-case classification, partner
//!   enumeration and the lattice-level transfer check.
//! - [`autoeq`]: membership in `{(c a; d b) ∈ Γ₀(m) : b ∈ H}`.

pub mod autoeq;
pub mod error;
pub mod fm;
pub mod lattice;
pub mod modmath;
pub mod normal_form;

pub use autoeq::{gamma0_member, lift_residue, subgroup_member, verify_closure, IntMatrix2};
pub use error::{Error, Result};
pub use fm::{
    classify_case, compute_h_bruteforce, fm_partners, is_isomorphic_quotients, is_isomorphic_ruled,
    lambda_for_case, verify_lemma_fe, Case, CaseReport, FmPartnerSet, HGroup, TransferReport,
};
pub use lattice::{
    act, cm_stable, discrete_log_cyclic, discrete_log_scan, dual_isogeny_kernel,
    overlattice_with_point, point_order, scalar_mul, unit_group, CurveClass, IsogenyData, QLattice,
    TorsionPoint, Unit, UnitAction,
};
pub use modmath::{
    euler_phi, factorize, orbits, roots_n2_plus_1, roots_n2_plus_n_plus_1, subgroup_closure, units,
    Factorization, Orbit, Subgroup, UnitGroup,
};
