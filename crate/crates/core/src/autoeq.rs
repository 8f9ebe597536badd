//! The discrete quotient of the autoequivalence group: matrices
//! `(c a; d b) ∈ Γ₀(m)` whose residue `b mod m` lies in `H`.
//!
//! Convention: `Γ₀(m)` constrains the lower-left entry, `d ≡ 0 (mod m)`,
//! which makes `b` a unit mod `m`. Reports carry [`GAMMA0_CONVENTION`] so the
//! choice is visible downstream.

use std::fmt;

use num_integer::Integer;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modmath::{mod_inverse, mul_mod, reduce, Subgroup};

pub const GAMMA0_CONVENTION: &str = "(c a; d b) with d = 0 mod m, residue b mod m";

/// The matrix `(c a; d b)`, entries labelled as in the exact sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct IntMatrix2 {
    pub c: i64,
    pub a: i64,
    pub d: i64,
    pub b: i64,
}

impl IntMatrix2 {
    pub const IDENTITY: IntMatrix2 = IntMatrix2 {
        c: 1,
        a: 0,
        d: 0,
        b: 1,
    };

    pub fn new(c: i64, a: i64, d: i64, b: i64) -> Self {
        IntMatrix2 { c, a, d, b }
    }

    pub fn det(&self) -> i128 {
        self.c as i128 * self.b as i128 - self.a as i128 * self.d as i128
    }

    /// Product in row-major layout `[[c, a], [d, b]]`.
    pub fn checked_mul(&self, rhs: &IntMatrix2) -> Result<IntMatrix2> {
        let entry = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            i64::try_from(x as i128 * y as i128 + z as i128 * w as i128)
                .map_err(|_| Error::Overflow)
        };
        Ok(IntMatrix2 {
            c: entry(self.c, rhs.c, self.a, rhs.d)?,
            a: entry(self.c, rhs.a, self.a, rhs.b)?,
            d: entry(self.d, rhs.c, self.b, rhs.d)?,
            b: entry(self.d, rhs.a, self.b, rhs.b)?,
        })
    }

    /// Inverse of a determinant-one matrix: `(b -a; -d c)`.
    pub fn inverse(&self) -> IntMatrix2 {
        IntMatrix2 {
            c: self.b,
            a: -self.a,
            d: -self.d,
            b: self.c,
        }
    }

    pub fn residue(&self, m: u64) -> u64 {
        reduce(self.b, m)
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.c, self.a, self.d, self.b)
    }
}

pub fn gamma0_member(mat: &IntMatrix2, m: u64) -> bool {
    assert!(m >= 1, "modulus must be positive");
    mat.det() == 1 && reduce(mat.d, m) == 0
}

pub fn subgroup_member(mat: &IntMatrix2, m: u64, h: &Subgroup) -> bool {
    assert_eq!(h.modulus(), m, "subgroup lives in a different unit group");
    gamma0_member(mat, m) && h.contains(mat.residue(m))
}

/// The lift `(c s; m b)` of a unit residue, with `c = b⁻¹ mod m` and
/// `s = (cb - 1)/m`.
pub fn lift_residue(b: u64, m: u64) -> Result<IntMatrix2> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    let b = b % m;
    let c = mod_inverse(b, m).ok_or(Error::NotCoprime {
        value: b,
        modulus: m,
    })?;
    let (c, b_i, m_i) = (c as i128, b as i128, m as i128);
    let s = (c * b_i - 1) / m_i;
    let to_i64 = |x: i128| i64::try_from(x).map_err(|_| Error::Overflow);
    Ok(IntMatrix2 {
        c: to_i64(c)?,
        a: to_i64(s)?,
        d: to_i64(m_i)?,
        b: to_i64(b_i)?,
    })
}

/// A uniformly-ish random member of `Γ₀(m)` with entries bounded by `bound`
/// in absolute value.
pub fn random_gamma0_member<R: Rng>(rng: &mut R, m: u64, bound: i64) -> IntMatrix2 {
    assert!(
        m >= 1 && bound >= 2 && (m as i64) <= bound,
        "need 1 <= m <= bound"
    );
    let m = m as i64;
    loop {
        let k = rng.gen_range(-(bound / m)..=bound / m);
        let d = k * m;
        let b = rng.gen_range(-bound..=bound);
        if d == 0 {
            if b.abs() != 1 {
                continue;
            }
            return IntMatrix2 {
                c: b,
                a: rng.gen_range(-bound..=bound),
                d: 0,
                b,
            };
        }
        let e = b.extended_gcd(&d);
        if e.gcd.abs() != 1 {
            continue;
        }
        // e.x b + e.y d = ±1, so c = ±e.x, a = ∓e.y gives c b - a d = 1
        let sign = e.gcd.signum();
        let mat = IntMatrix2 {
            c: sign * e.x,
            a: -sign * e.y,
            d,
            b,
        };
        debug_assert_eq!(mat.det(), 1);
        if [mat.c, mat.a].iter().all(|v| v.abs() <= bound) {
            return mat;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureFailure {
    pub left: IntMatrix2,
    pub right: IntMatrix2,
    pub product: Option<IntMatrix2>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub modulus: u64,
    pub h: Vec<u64>,
    pub convention: &'static str,
    pub products_checked: usize,
    pub inverses_checked: usize,
    pub failures: Vec<ClosureFailure>,
}

impl ClosureReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Multiplies random lifts of residues in `H` (perturbed off the canonical
/// lift) and checks that products and inverses stay in the subgroup with
/// residues multiplying as `b₁b₂ mod m`. Deterministic for a given `seed`.
pub fn verify_closure(m: u64, h: &Subgroup, sample_count: usize, seed: u64) -> ClosureReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elems = h.elements();
    let mut failures = Vec::new();
    let mut products_checked = 0;
    let mut inverses_checked = 0;

    let random_lift = |rng: &mut ChaCha8Rng| -> IntMatrix2 {
        let b = elems[rng.gen_range(0..elems.len())];
        let base = lift_residue(b, m).expect("subgroup elements are units");
        // (c + t d, s + t b; d, b) keeps det = 1 and the residue
        let t = rng.gen_range(-3i64..=3);
        IntMatrix2 {
            c: base.c + t * base.d,
            a: base.a + t * base.b,
            ..base
        }
    };

    for _ in 0..sample_count {
        let left = random_lift(&mut rng);
        let right = random_lift(&mut rng);
        products_checked += 1;
        match left.checked_mul(&right) {
            Ok(p) => {
                let expected = mul_mod(left.residue(m), right.residue(m), m);
                if !subgroup_member(&p, m, h) || p.residue(m) != expected {
                    failures.push(ClosureFailure {
                        left,
                        right,
                        product: Some(p),
                        reason: format!("residue {} expected {expected}", p.residue(m)),
                    });
                }
            }
            Err(e) => failures.push(ClosureFailure {
                left,
                right,
                product: None,
                reason: e.to_string(),
            }),
        }
        inverses_checked += 1;
        let inv = left.inverse();
        let id = left.checked_mul(&inv);
        let inv_residue = mod_inverse(left.residue(m), m);
        if !subgroup_member(&inv, m, h)
            || id != Ok(IntMatrix2::IDENTITY)
            || inv_residue != Some(inv.residue(m))
        {
            failures.push(ClosureFailure {
                left,
                right: inv,
                product: id.ok(),
                reason: "inverse".to_string(),
            });
        }
    }

    ClosureReport {
        modulus: m,
        h: elems.to_vec(),
        convention: GAMMA0_CONVENTION,
        products_checked,
        inverses_checked,
        failures,
    }
}
