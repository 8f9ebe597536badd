//! Fourier-Mukai partners of `S = P(O_E ⊕ L)` for an `m`-torsion `L`.
//!
//! The surface is never built. Everything factors through the pair
//! `(curve class, torsion point)`: the symmetry group
//!
//! ```text
//! H = { k ∈ (Z/mZ)* : φ(a) = k·a for some φ ∈ Aut₀ }
//! ```
//!
//! and the orbits of `(Z/mZ)*` under `H`, one per partner `P(O_E ⊕ L^i)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{
    act, cm_stable, discrete_log_cyclic, overlattice_with_point, scalar_mul, unit_by_label,
    unit_group, CurveClass, DualKernel, IsogenyData, QLattice, TorsionPoint, Unit, UnitAction,
};
use crate::modmath::{
    euler_phi, mod_inverse, mul_mod, orbits, roots_n2_plus_1, roots_n2_plus_n_plus_1,
    subgroup_closure, units, Subgroup,
};

/// Multiplier realised by one automorphism: `u(a) = k·a`, or `None` when
/// `u(a)` leaves the cyclic group `⟨a⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UnitWitness {
    pub unit: Unit,
    pub multiplier: Option<u64>,
}

/// A subgroup of `(Z/mZ)*` together with the automorphisms realising it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HGroup {
    pub subgroup: Subgroup,
    pub witnesses: Vec<UnitWitness>,
}

impl HGroup {
    pub fn elements(&self) -> &[u64] {
        self.subgroup.elements()
    }

    pub fn order(&self) -> usize {
        self.subgroup.order()
    }

    pub fn contains(&self, k: u64) -> bool {
        self.subgroup.contains(k)
    }
}

/// Brute-force `H` for a point of exact order `m`, trying every given
/// automorphism and locating its image in `⟨a⟩` by scanning multiples.
pub fn h_group_for_units(automorphisms: &[UnitAction], a: &TorsionPoint) -> Result<HGroup> {
    a.require_exact_order()?;
    let m = a.modulus();
    let mut found = BTreeSet::new();
    let mut witnesses = Vec::with_capacity(automorphisms.len());
    for u in automorphisms {
        let image = act(u, a)?;
        let multiplier = discrete_log_cyclic(&image, a)?;
        if let Some(k) = multiplier {
            found.insert(k % m);
        }
        witnesses.push(UnitWitness {
            unit: u.label(),
            multiplier,
        });
    }
    let seed: Vec<u64> = found.iter().copied().collect();
    let subgroup = subgroup_closure(m, &seed)?;
    debug_assert_eq!(
        subgroup.elements(),
        seed.as_slice(),
        "multipliers form a group"
    );
    Ok(HGroup {
        subgroup,
        witnesses,
    })
}

/// `H_F^a` by iterating `Aut₀ F` for the class.
pub fn compute_h_bruteforce(c: CurveClass, a: &TorsionPoint) -> Result<HGroup> {
    if a.class() != c {
        return Err(Error::ClassMismatch {
            expected: c,
            found: a.class(),
        });
    }
    h_group_for_units(&unit_group(c), a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Case {
    /// `H = {±1}`.
    I,
    /// Square lattice, `m | n² + 1`, `H = {±1, ±n}`.
    II,
    /// Hexagonal lattice, `m | n² + n + 1`, `H = {±1, ±n, ±n²}`.
    III,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
        })
    }
}

/// Why a point landed in case I.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseIReason {
    GenericClass,
    NoCongruenceRoot,
    OutsideCyclicSubgroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub case: Case,
    pub reason: Option<CaseIReason>,
    /// Roots of the class congruence mod `m` (empty for the generic class).
    pub roots: Vec<u64>,
    pub n: Option<u64>,
    /// `(n, 1)` in case II, `(n + 1, 1)` in case III.
    pub generator: Option<TorsionPoint>,
    /// `t` with `a = t · generator`.
    pub multiple: Option<u64>,
    pub h: Subgroup,
}

fn h_from_formula(m: u64, values: &[u64]) -> Result<Subgroup> {
    let mut elems: Vec<u64> = values
        .iter()
        .flat_map(|&v| [v % m, (m - v % m) % m])
        .collect();
    elems.sort_unstable();
    elems.dedup();
    Subgroup::try_from_elements(m, &elems)
}

/// Decides which of the three cases holds for a point of exact order
/// `m > 3`, and the `H` that case predicts.
pub fn classify_case(c: CurveClass, a: &TorsionPoint) -> Result<CaseReport> {
    if a.class() != c {
        return Err(Error::ClassMismatch {
            expected: c,
            found: a.class(),
        });
    }
    a.require_exact_order()?;
    let m = a.modulus();
    if m <= 3 {
        return Err(Error::ModulusTooSmall(m));
    }
    let case_one = |reason, roots| -> Result<CaseReport> {
        Ok(CaseReport {
            case: Case::I,
            reason: Some(reason),
            roots,
            n: None,
            generator: None,
            multiple: None,
            h: h_from_formula(m, &[1])?,
        })
    };

    let roots = match c {
        CurveClass::Generic => return case_one(CaseIReason::GenericClass, Vec::new()),
        CurveClass::Square => roots_n2_plus_1(m),
        CurveClass::Hexagonal => roots_n2_plus_n_plus_1(m),
    };
    if roots.is_empty() {
        return case_one(CaseIReason::NoCongruenceRoot, roots);
    }
    for &n in &roots {
        let (case, generator, h) = match c {
            CurveClass::Square => (
                Case::II,
                TorsionPoint::new(c, m, n as i64, 1)?,
                h_from_formula(m, &[1, n])?,
            ),
            _ => (
                Case::III,
                TorsionPoint::new(c, m, ((n + 1) % m) as i64, 1)?,
                h_from_formula(m, &[1, n, mul_mod(n, n, m)])?,
            ),
        };
        if let Some(t) = discrete_log_cyclic(a, &generator)? {
            return Ok(CaseReport {
                case,
                reason: None,
                roots,
                n: Some(n),
                generator: Some(generator),
                multiple: Some(t),
                h,
            });
        }
    }
    case_one(CaseIReason::OutsideCyclicSubgroup, roots)
}

/// One isomorphism class of partners, `P(O_E ⊕ L^i)` for every `i` in the
/// orbit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartnerClass {
    pub representative: u64,
    pub members: Vec<u64>,
    pub label: String,
}

pub fn partner_label(i: u64) -> String {
    format!("P(O_E+L^{i})")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FmPartnerSet {
    pub class: CurveClass,
    pub point: TorsionPoint,
    pub modulus: u64,
    pub phi: u64,
    pub h: HGroup,
    pub classes: Vec<PartnerClass>,
    /// Set when `m ≤ 4` and the partner set is known to be a singleton.
    pub small_m_guard: bool,
}

impl FmPartnerSet {
    pub fn cardinality(&self) -> usize {
        self.classes.len()
    }
}

/// `FM(S)` as the orbits of `(Z/mZ)*` under `H`.
pub fn fm_partners(c: CurveClass, a: &TorsionPoint) -> Result<FmPartnerSet> {
    let h = compute_h_bruteforce(c, a)?;
    let m = a.modulus();
    let small_m_guard = m <= 4;
    let classes = if small_m_guard {
        let all = units(m).elements().to_vec();
        vec![PartnerClass {
            representative: all[0],
            label: partner_label(all[0]),
            members: all,
        }]
    } else {
        orbits(m, &h.subgroup)
            .into_iter()
            .map(|o| PartnerClass {
                representative: o.representative,
                label: partner_label(o.representative),
                members: o.elements,
            })
            .collect()
    };
    Ok(FmPartnerSet {
        class: c,
        point: *a,
        modulus: m,
        phi: euler_phi(m),
        h,
        classes,
        small_m_guard,
    })
}

fn plus_minus_ratio_in(h: &HGroup, m: u64, i: u64, j: u64) -> Result<bool> {
    let inv = mod_inverse(i, m).ok_or(Error::NotCoprime {
        value: i,
        modulus: m,
    })?;
    if mod_inverse(j, m).is_none() {
        return Err(Error::NotCoprime {
            value: j,
            modulus: m,
        });
    }
    let k = mul_mod(inv, j % m, m);
    Ok(h.contains(k) || h.contains((m - k) % m))
}

/// `S_i ≅ S_j` iff some `φ ∈ Aut₀ F` has `φ(a) = (±i⁻¹j)·a`, tested by
/// applying every automorphism rather than through `H`.
pub fn is_isomorphic_quotients(c: CurveClass, a: &TorsionPoint, i: u64, j: u64) -> Result<bool> {
    if a.class() != c {
        return Err(Error::ClassMismatch {
            expected: c,
            found: a.class(),
        });
    }
    a.require_exact_order()?;
    let m = a.modulus();
    let inv = mod_inverse(i, m).ok_or(Error::NotCoprime {
        value: i,
        modulus: m,
    })?;
    if mod_inverse(j, m).is_none() {
        return Err(Error::NotCoprime {
            value: j,
            modulus: m,
        });
    }
    let k = mul_mod(inv, j % m, m) as i64;
    let targets = [scalar_mul(k, a), scalar_mul(-k, a)];
    for u in unit_group(c) {
        if targets.contains(&act(&u, a)?) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `P(O_E ⊕ L^i) ≅ P(O_E ⊕ L^j)` iff some `ψ ∈ Aut₀ E` has
/// `ψ*L ≅ L^{±i⁻¹j}`. `line_bundle` is the point of `Ê` representing `L`.
pub fn is_isomorphic_ruled(
    dual_class: CurveClass,
    line_bundle: &TorsionPoint,
    i: u64,
    j: u64,
) -> Result<bool> {
    let h = compute_h_bruteforce(dual_class, line_bundle)?;
    plus_minus_ratio_in(&h, line_bundle.modulus(), i, j)
}

/// One named assertion inside a [`TransferReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn rational_string<S: Serializer>(
    v: &[Rational64; 2],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    [v[0].to_string(), v[1].to_string()].serialize(s)
}

/// Outcome of checking `H_F^a = H_Ê^L` through explicit lattices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferReport {
    pub class: CurveClass,
    pub point: TorsionPoint,
    pub modulus: u64,
    /// `None` when `m ≤ 3`.
    pub case: Option<Case>,
    /// `Λ' = Z + Zτ + Za`, so that `E = F/⟨a⟩ = C/Λ'`.
    pub overlattice: QLattice,
    pub index: u64,
    pub cm_stable: bool,
    /// Generator of `ker q̂`, in the basis of `Λ'`.
    pub dual_kernel: DualKernel,
    /// The same generator as `(u + vτ)/m` in `{1, τ}` coordinates.
    #[serde(serialize_with = "rational_string")]
    pub dual_kernel_value: [Rational64; 2],
    pub h_source: HGroup,
    pub h_target: HGroup,
    pub checks: Vec<Check>,
}

impl TransferReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Rebuilds `E = C/Λ'`, the kernel generator of the dual isogeny, and `H`
/// on the dual side, then compares with `H_F^a`.
///
/// Only malformed input is an `Err`; a failed comparison is reported in
/// [`TransferReport::checks`].
pub fn verify_lemma_fe(c: CurveClass, a: &TorsionPoint) -> Result<TransferReport> {
    if !c.is_cm() {
        return Err(Error::GenericClass(c));
    }
    let m = a.modulus();
    let h_source = compute_h_bruteforce(c, a)?;
    let case = if m > 3 {
        Some(classify_case(c, a)?.case)
    } else {
        None
    };

    let source = QLattice::standard(c);
    let overlattice = overlattice_with_point(c, m, a)?;
    let tau = match c {
        CurveClass::Square => Unit::I,
        _ => Unit::Omega,
    };
    let tau = unit_by_label(c, tau).expect("CM class has τ");
    let stable = cm_stable(&overlattice, &tau)?;
    let iso = IsogenyData::new(source.clone(), overlattice.clone())?;
    let g = iso.dual_kernel.generator;
    let h_target = h_group_for_units(&overlattice.automorphisms(), &g);

    let mut checks = Vec::new();
    checks.push(Check {
        name: "sublattice",
        passed: overlattice.contains_lattice(&source),
        detail: format!("Z+Zτ ⊆ {overlattice}"),
    });
    checks.push(Check {
        name: "index",
        passed: iso.index == m
            && source.determinant() / overlattice.determinant()
                == Rational64::from_integer(m as i64),
        detail: format!("[Λ':Λ] = {}", iso.index),
    });
    if let Some(case) = case {
        let extra = matches!(case, Case::II | Case::III);
        checks.push(Check {
            name: "cm_stable",
            passed: stable == extra,
            detail: format!("τ·Λ' ⊆ Λ' is {stable}, case {case}"),
        });
    }
    checks.push(Check {
        name: "dual_kernel_order",
        passed: g.order() == m,
        detail: format!("ord(g) = {}", g.order()),
    });
    let [u, v] = iso.dual_kernel.preimage;
    // ⟨a, (u + vτ)/m⟩ = ker[m] iff det[(x, y), (u, v)] is a unit mod m
    let det = (a.x() as i128 * v as i128 - a.y() as i128 * u as i128).rem_euclid(m as i128) as u64;
    checks.push(Check {
        name: "kernel_composition",
        passed: scalar_mul(m as i64, &g).is_zero() && mod_inverse(det, m).is_some(),
        detail: format!("m·g = 0, det((x,y),(u,v)) = {det} mod {m}"),
    });
    let h_target = match h_target {
        Ok(h) => {
            checks.push(Check {
                name: "h_equal",
                passed: h.elements() == h_source.elements(),
                detail: format!("{:?} vs {:?}", h_source.elements(), h.elements()),
            });
            h
        }
        Err(e) => {
            checks.push(Check {
                name: "h_equal",
                passed: false,
                detail: e.to_string(),
            });
            HGroup {
                subgroup: Subgroup::trivial(m),
                witnesses: Vec::new(),
            }
        }
    };

    Ok(TransferReport {
        class: c,
        point: *a,
        modulus: m,
        case,
        dual_kernel_value: source.point_value(&TorsionPoint::new(c, m, u as i64, v as i64)?),
        overlattice,
        index: iso.index,
        cm_stable: stable,
        dual_kernel: iso.dual_kernel,
        h_source,
        h_target,
        checks,
    })
}

/// Rows of the fibration table for ruled surfaces over an elliptic curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FibrationCase {
    /// `O_E ⊕ O_E`, the product `E × P¹`.
    I1,
    /// `O_E ⊕ L` with `ord L = m > 1`.
    I2,
    /// `O_E ⊕ L` with `L` of infinite order.
    I3,
    /// Indecomposable, `e = 0`, characteristic 0.
    I4,
    /// Indecomposable, `e = 0`, positive characteristic.
    I5,
    /// `e = -1`.
    II,
}

impl FromStr for FibrationCase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i-1" => Ok(Self::I1),
            "i-2" => Ok(Self::I2),
            "i-3" => Ok(Self::I3),
            "i-4" => Ok(Self::I4),
            "i-5" => Ok(Self::I5),
            "ii" => Ok(Self::II),
            other => Err(format!("unknown fibration case '{other}'")),
        }
    }
}

/// Smallest fiber degree of a multisection, where defined in
/// characteristic 0.
pub fn lambda_for_case(case: FibrationCase, m: u64) -> Option<u64> {
    match case {
        FibrationCase::I1 => Some(1),
        FibrationCase::I2 => Some(m),
        FibrationCase::II => Some(2),
        FibrationCase::I3 | FibrationCase::I4 | FibrationCase::I5 => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: CurveClass, m: u64, x: i64, y: i64) -> TorsionPoint {
        TorsionPoint::new(c, m, x, y).unwrap()
    }

    #[test]
    fn h_examples() {
        let sq = pt(CurveClass::Square, 5, 2, 1);
        assert_eq!(
            compute_h_bruteforce(CurveClass::Square, &sq)
                .unwrap()
                .elements(),
            &[1, 2, 3, 4]
        );
        let hx = pt(CurveClass::Hexagonal, 7, 3, 1);
        assert_eq!(
            compute_h_bruteforce(CurveClass::Hexagonal, &hx)
                .unwrap()
                .elements(),
            &[1, 2, 3, 4, 5, 6]
        );
        let ge = pt(CurveClass::Generic, 5, 1, 0);
        assert_eq!(
            compute_h_bruteforce(CurveClass::Generic, &ge)
                .unwrap()
                .elements(),
            &[1, 4]
        );
    }

    #[test]
    fn h_witnesses() {
        let sq = pt(CurveClass::Square, 5, 2, 1);
        let h = compute_h_bruteforce(CurveClass::Square, &sq).unwrap();
        let i = h.witnesses.iter().find(|w| w.unit == Unit::I).unwrap();
        assert_eq!(i.multiplier, Some(2));
        let hx = pt(CurveClass::Hexagonal, 7, 3, 1);
        let h = compute_h_bruteforce(CurveClass::Hexagonal, &hx).unwrap();
        let w = h.witnesses.iter().find(|w| w.unit == Unit::Omega).unwrap();
        assert_eq!(w.multiplier, Some(2));
    }

    #[test]
    fn h_rejects_wrong_order() {
        let p = pt(CurveClass::Square, 6, 2, 4);
        assert!(matches!(
            compute_h_bruteforce(CurveClass::Square, &p),
            Err(Error::OrderMismatch { order: 3, .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let r = classify_case(CurveClass::Square, &pt(CurveClass::Square, 5, 2, 1)).unwrap();
        assert_eq!((r.case, r.n, r.multiple), (Case::II, Some(2), Some(1)));
        assert_eq!(r.h.elements(), &[1, 2, 3, 4]);

        let r = classify_case(CurveClass::Square, &pt(CurveClass::Square, 7, 1, 0)).unwrap();
        assert_eq!(r.case, Case::I);
        assert_eq!(r.reason, Some(CaseIReason::NoCongruenceRoot));
        assert_eq!(r.h.elements(), &[1, 6]);

        let r = classify_case(CurveClass::Hexagonal, &pt(CurveClass::Hexagonal, 7, 3, 1)).unwrap();
        assert_eq!((r.case, r.n), (Case::III, Some(2)));
        assert_eq!(r.h.elements(), &[1, 2, 3, 4, 5, 6]);

        let r = classify_case(CurveClass::Square, &pt(CurveClass::Square, 5, 1, 0)).unwrap();
        assert_eq!(r.reason, Some(CaseIReason::OutsideCyclicSubgroup));

        let r = classify_case(CurveClass::Generic, &pt(CurveClass::Generic, 9, 1, 0)).unwrap();
        assert_eq!(r.reason, Some(CaseIReason::GenericClass));

        assert_eq!(
            classify_case(CurveClass::Square, &pt(CurveClass::Square, 3, 1, 0)),
            Err(Error::ModulusTooSmall(3))
        );
    }

    #[test]
    fn partner_examples() {
        let g = fm_partners(CurveClass::Generic, &pt(CurveClass::Generic, 5, 1, 0)).unwrap();
        assert_eq!(g.cardinality(), 2);
        assert_eq!(g.classes[0].label, "P(O_E+L^1)");
        assert_eq!(g.classes[1].members, vec![2, 3]);

        let s = fm_partners(CurveClass::Square, &pt(CurveClass::Square, 5, 2, 1)).unwrap();
        assert_eq!(s.cardinality(), 1);

        for c in CurveClass::ALL {
            let p = fm_partners(c, &pt(c, 3, 1, 0)).unwrap();
            assert_eq!(p.cardinality(), 1);
            assert!(p.small_m_guard);
        }
    }

    #[test]
    fn isomorphism_examples() {
        let a = pt(CurveClass::Generic, 5, 1, 0);
        assert!(is_isomorphic_quotients(CurveClass::Generic, &a, 3, 3).unwrap());
        assert!(is_isomorphic_quotients(CurveClass::Generic, &a, 1, 4).unwrap());
        assert!(!is_isomorphic_quotients(CurveClass::Generic, &a, 1, 2).unwrap());
        assert!(is_isomorphic_ruled(CurveClass::Generic, &a, 2, 3).unwrap());

        let l = pt(CurveClass::Square, 13, 5, 1);
        assert!(is_isomorphic_ruled(CurveClass::Square, &l, 1, 5).unwrap());
        assert!(!is_isomorphic_ruled(CurveClass::Square, &l, 1, 2).unwrap());
        assert_eq!(
            is_isomorphic_ruled(CurveClass::Square, &l, 13, 1),
            Err(Error::NotCoprime {
                value: 13,
                modulus: 13
            })
        );
    }

    #[test]
    fn transfer_examples() {
        let r = verify_lemma_fe(CurveClass::Square, &pt(CurveClass::Square, 5, 2, 1)).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.h_target.elements(), &[1, 2, 3, 4]);
        assert_eq!(r.dual_kernel_value[0], Rational64::new(1, 5));
        let i = r
            .h_target
            .witnesses
            .iter()
            .find(|w| w.unit == Unit::I)
            .unwrap();
        assert_eq!(i.multiplier, Some(3));

        let r = verify_lemma_fe(CurveClass::Square, &pt(CurveClass::Square, 1, 0, 0)).unwrap();
        assert!(r.passed());
        assert_eq!(r.h_source, r.h_target);

        let r =
            verify_lemma_fe(CurveClass::Hexagonal, &pt(CurveClass::Hexagonal, 7, 3, 1)).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.h_target.order(), 6);

        assert!(matches!(
            verify_lemma_fe(CurveClass::Generic, &pt(CurveClass::Generic, 5, 1, 0)),
            Err(Error::GenericClass(_))
        ));
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_for_case(FibrationCase::I2, 7), Some(7));
        assert_eq!(lambda_for_case(FibrationCase::II, 7), Some(2));
        assert_eq!(lambda_for_case(FibrationCase::I1, 7), Some(1));
        assert_eq!(lambda_for_case("i-4".parse().unwrap(), 7), None);
    }
}
