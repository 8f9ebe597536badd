//! Modular arithmetic on `u64` residues.
//!
//! Factorization, Euler's totient, the unit group `(Z/mZ)*`, roots of the two
//! CM congruences `n^2 + 1 ≡ 0` and `n^2 + n + 1 ≡ 0 (mod m)`, and subgroup /
//! orbit computations inside `(Z/mZ)*`.
//!
//! Residues are always reduced into `[0, m)`. For `m = 1` the single residue
//! class is `0`, which is also the identity of `(Z/1Z)*`.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        return (a % m) * (b % m) % m;
    }
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduces a signed integer into `[0, m)`.
#[inline]
pub fn reduce(k: i64, m: u64) -> u64 {
    match i64::try_from(m) {
        Ok(mi) => k.rem_euclid(mi) as u64,
        Err(_) => (k as i128).rem_euclid(m as i128) as u64,
    }
}

pub fn is_unit(k: u64, m: u64) -> bool {
    m != 0 && (k % m).gcd(&m) == 1
}

/// Inverse of `a` modulo `m`, or `None` when `gcd(a, m) != 1`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 0 {
        return None;
    }
    let e = (a as i128 % m as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

// Deterministic for every n < 2^64.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization as `(prime, exponent)` pairs sorted by prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// The factored integer.
    pub fn value(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }
}

fn pollard_brent(n: u64) -> u64 {
    debug_assert!(n % 2 == 1 && !is_prime(n));
    let mut c = 1u64;
    loop {
        let f = |x: u64| add_mod(mul_mod(x, x, n), c, n);
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = y;
        let mut r = 1u64;
        let m = 128u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn collect_prime_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    collect_prime_factors(d, out);
    collect_prime_factors(n / d, out);
}

/// Factors `n >= 1`; `factorize(1)` is the empty product.
///
/// Trial division by small primes, then Pollard-Brent on the cofactor.
pub fn factorize(mut n: u64) -> Factorization {
    assert!(n >= 1, "factorize expects n >= 1");
    let mut primes = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n.is_multiple_of(p) {
            primes.push(p);
            n /= p;
        }
    }
    let mut p = 53u64;
    while p < 1000 && p * p <= n {
        while n.is_multiple_of(p) {
            primes.push(p);
            n /= p;
        }
        p += 2;
    }
    collect_prime_factors(n, &mut primes);
    primes.sort_unstable();

    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Factorization { factors }
}

/// Euler's totient. `euler_phi(1) = 1`.
pub fn euler_phi(m: u64) -> u64 {
    assert!(m >= 1, "euler_phi expects m >= 1");
    factorize(m)
        .factors()
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// The multiplicative group `(Z/mZ)*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitGroup {
    modulus: u64,
    elements: Vec<u64>,
}

impl UnitGroup {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, k: u64) -> bool {
        self.elements.binary_search(&(k % self.modulus)).is_ok()
    }

    /// The whole group viewed as a subgroup of itself.
    pub fn as_subgroup(&self) -> Subgroup {
        Subgroup {
            modulus: self.modulus,
            elements: self.elements.clone(),
            generators: Vec::new(),
        }
    }
}

/// Sorted residues coprime to `m`. For `m = 1` this is `{0}`.
pub fn units(m: u64) -> UnitGroup {
    assert!(m >= 1, "units expects m >= 1");
    let elements = if m == 1 {
        vec![0]
    } else if m <= 1 << 24 {
        let mut coprime = vec![true; m as usize];
        coprime[0] = false;
        for p in factorize(m).primes() {
            for k in (p..m).step_by(p as usize) {
                coprime[k as usize] = false;
            }
        }
        (1..m).filter(|&k| coprime[k as usize]).collect()
    } else {
        (1..m).filter(|k| k.gcd(&m) == 1).collect()
    };
    UnitGroup {
        modulus: m,
        elements,
    }
}

/// The two quadratic congruences attached to the CM curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmCongruence {
    /// `n^2 + 1 ≡ 0`, the square lattice (j = 1728).
    SquareLattice,
    /// `n^2 + n + 1 ≡ 0`, the hexagonal lattice (j = 0).
    HexagonalLattice,
}

impl CmCongruence {
    fn eval(self, n: u64, m: u64) -> u64 {
        let sq = mul_mod(n, n, m);
        match self {
            Self::SquareLattice => add_mod(sq, 1, m),
            Self::HexagonalLattice => add_mod(add_mod(sq, n, m), 1, m),
        }
    }

    fn derivative(self, n: u64, m: u64) -> u64 {
        match self {
            Self::SquareLattice => mul_mod(2, n, m),
            Self::HexagonalLattice => add_mod(mul_mod(2, n, m), 1, m),
        }
    }

    /// All roots in `[0, m)` by direct evaluation.
    pub fn roots_scan(self, m: u64) -> Vec<u64> {
        assert!(m >= 1, "modulus must be positive");
        (0..m).filter(|&n| self.eval(n, m) == 0).collect()
    }

    /// All roots in `[0, m)` via roots mod each prime, lifting to prime
    /// powers, and the Chinese remainder theorem.
    pub fn roots_lifted(self, m: u64) -> Vec<u64> {
        assert!(m >= 1, "modulus must be positive");
        let mut acc: Vec<u64> = vec![0];
        let mut acc_mod = 1u64;
        for &(p, e) in factorize(m).factors() {
            let local = self.prime_power_roots(p, e);
            if local.is_empty() {
                return Vec::new();
            }
            let pe = p.pow(e);
            let inv = mod_inverse(acc_mod % pe, pe).expect("coprime prime powers");
            let mut next = Vec::with_capacity(acc.len() * local.len());
            for &r1 in &acc {
                for &r2 in &local {
                    // x = r1 + acc_mod * ((r2 - r1) * inv mod pe)
                    let diff = (r2 as i128 - r1 as i128).rem_euclid(pe as i128) as u64;
                    let t = mul_mod(diff, inv, pe);
                    next.push((r1 as u128 + acc_mod as u128 * t as u128) as u64);
                }
            }
            acc = next;
            acc_mod *= pe;
        }
        acc.sort_unstable();
        acc
    }

    fn prime_roots(self, p: u64) -> Vec<u64> {
        if p < 64 {
            return self.roots_scan(p);
        }
        let mut roots = match self {
            Self::SquareLattice => match sqrt_mod_prime(p - 1, p) {
                Some(r) => vec![r, p - r],
                None => Vec::new(),
            },
            Self::HexagonalLattice => match sqrt_mod_prime(p - 3, p) {
                Some(r) => {
                    let half = mod_inverse(2, p).expect("odd prime");
                    vec![
                        mul_mod(add_mod(p - 1, r, p), half, p),
                        mul_mod(add_mod(p - 1, p - r, p), half, p),
                    ]
                }
                None => Vec::new(),
            },
        };
        roots.sort_unstable();
        roots.dedup();
        roots
    }

    fn prime_power_roots(self, p: u64, e: u32) -> Vec<u64> {
        let mut roots = self.prime_roots(p);
        let mut pk = p;
        for _ in 1..e {
            let next_pk = pk * p;
            let mut lifted = Vec::new();
            for &r in &roots {
                let d = self.derivative(r, p);
                if d != 0 {
                    // f(r) is divisible by p^k; solve f(r) + t p^k f'(r) ≡ 0 mod p^(k+1)
                    let fr = self.eval(r, next_pk) / pk;
                    let inv = mod_inverse(d, p).expect("nonzero mod prime");
                    let t = mul_mod((p - fr % p) % p, inv, p);
                    lifted.push(r + t * pk);
                } else {
                    lifted.extend(
                        (0..p)
                            .map(|t| r + t * pk)
                            .filter(|&c| self.eval(c, next_pk) == 0),
                    );
                }
            }
            lifted.sort_unstable();
            lifted.dedup();
            roots = lifted;
            pk = next_pk;
        }
        roots
    }

    /// The fast path: roots modulo each prime power, combined by CRT.
    /// [`Self::roots_scan`] is the exhaustive reference.
    pub fn roots(self, m: u64) -> Vec<u64> {
        self.roots_lifted(m)
    }
}

/// Tonelli-Shanks square root of `a` modulo an odd prime `p`.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Sorted `n ∈ [0, m)` with `n^2 + 1 ≡ 0 (mod m)`.
pub fn roots_n2_plus_1(m: u64) -> Vec<u64> {
    CmCongruence::SquareLattice.roots(m)
}

/// Sorted `n ∈ [0, m)` with `n^2 + n + 1 ≡ 0 (mod m)`.
pub fn roots_n2_plus_n_plus_1(m: u64) -> Vec<u64> {
    CmCongruence::HexagonalLattice.roots(m)
}

/// A subgroup of `(Z/mZ)*`, stored as its sorted element list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subgroup {
    modulus: u64,
    elements: Vec<u64>,
    generators: Vec<u64>,
}

impl Subgroup {
    /// `{1}` inside `(Z/mZ)*`.
    pub fn trivial(m: u64) -> Self {
        assert!(m >= 1, "modulus must be positive");
        Subgroup {
            modulus: m,
            elements: vec![1 % m],
            generators: Vec::new(),
        }
    }

    /// Validates an explicit element list: units mod `m`, containing 1,
    /// closed under multiplication.
    pub fn try_from_elements(m: u64, elements: &[u64]) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroModulus);
        }
        let mut set: Vec<u64> = elements.iter().map(|&k| k % m).collect();
        set.sort_unstable();
        set.dedup();
        for &k in &set {
            if !is_unit(k, m) {
                return Err(Error::NotCoprime {
                    value: k,
                    modulus: m,
                });
            }
        }
        let closed = subgroup_closure(m, &set)?;
        if closed.elements.len() != set.len() {
            // Not closed as given; report the first element that escapes.
            let escaped = closed
                .elements
                .iter()
                .copied()
                .find(|k| set.binary_search(k).is_err())
                .unwrap_or(0);
            return Err(Error::NotClosed {
                value: escaped,
                modulus: m,
            });
        }
        Ok(closed)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, k: u64) -> bool {
        self.elements.binary_search(&(k % self.modulus)).is_ok()
    }

    pub fn is_closed(&self) -> bool {
        let m = self.modulus;
        self.elements.iter().all(|&x| {
            self.elements
                .iter()
                .all(|&y| self.contains(mul_mod(x, y, m)))
        })
    }
}

/// Smallest multiplicatively closed subset of `(Z/mZ)*` containing `seed`
/// and 1.
pub fn subgroup_closure(m: u64, seed: &[u64]) -> Result<Subgroup> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    let mut generators: Vec<u64> = seed.iter().map(|&s| s % m).collect();
    generators.sort_unstable();
    generators.dedup();
    if let Some(&bad) = generators.iter().find(|&&g| !is_unit(g, m)) {
        return Err(Error::NotCoprime {
            value: bad,
            modulus: m,
        });
    }

    let mut members = vec![1 % m];
    let mut frontier = vec![1 % m];
    if m <= 1 << 16 {
        let mut seen = vec![false; m as usize];
        seen[(1 % m) as usize] = true;
        while let Some(x) = frontier.pop() {
            for &g in &generators {
                let y = mul_mod(x, g, m);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    members.push(y);
                    frontier.push(y);
                }
            }
        }
    } else {
        let mut seen = BTreeSet::from([1 % m]);
        while let Some(x) = frontier.pop() {
            for &g in &generators {
                let y = mul_mod(x, g, m);
                if seen.insert(y) {
                    members.push(y);
                    frontier.push(y);
                }
            }
        }
    }
    members.sort_unstable();
    Ok(Subgroup {
        modulus: m,
        elements: members,
        generators,
    })
}

/// A coset `i·H` of `(Z/mZ)*`, labelled by its minimal element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub representative: u64,
    pub elements: Vec<u64>,
}

/// Partition of `(Z/mZ)*` into `H`-orbits, sorted by representative.
pub fn orbits(m: u64, h: &Subgroup) -> Vec<Orbit> {
    assert_eq!(m, h.modulus(), "subgroup lives in a different unit group");
    let mut seen = vec![false; m as usize];
    let mut out = Vec::new();
    for &i in units(m).elements() {
        if seen[i as usize] {
            continue;
        }
        let mut elements: Vec<u64> = h.elements().iter().map(|&k| mul_mod(i, k, m)).collect();
        elements.sort_unstable();
        elements.dedup();
        for &e in &elements {
            seen[e as usize] = true;
        }
        out.push(Orbit {
            representative: elements[0],
            elements,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).factors().is_empty());
        assert_eq!(factorize(12).factors(), &[(2, 2), (3, 1)]);
        let expected = trial_division(720720);
        assert_eq!(
            expected,
            vec![(2, 4), (3, 2), (5, 1), (7, 1), (11, 1), (13, 1)]
        );
        assert_eq!(factorize(720720).factors(), expected.as_slice());
    }

    #[test]
    fn factorize_matches_trial_division() {
        for n in 1..5000u64 {
            assert_eq!(
                factorize(n).factors(),
                trial_division(n).as_slice(),
                "n={n}"
            );
        }
        // semiprimes past the trial-division window
        for n in [
            1_000_003u64 * 1_000_033,
            4_294_967_291 * 4_294_967_279,
            (1 << 61) - 1,
        ] {
            let f = factorize(n);
            assert_eq!(f.value(), n);
            assert!(f.primes().all(is_prime));
        }
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..100).filter(|&n| is_prime(n)).collect();
        assert_eq!(small.len(), 25);
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
        assert!(!is_prime(u64::MAX));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn phi_examples() {
        fn gcd_count(m: u64) -> u64 {
            (1..=m).filter(|k| k.gcd(&m) == 1).count() as u64
        }
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(5), gcd_count(5));
        assert_eq!(euler_phi(5), 4);
        assert_eq!(euler_phi(12), gcd_count(12));
        assert_eq!(euler_phi(12), 4);
    }

    #[test]
    fn units_examples() {
        assert_eq!(units(1).elements(), &[0]);
        assert_eq!(units(2).elements(), &[1]);
        assert_eq!(units(5).elements(), &[1, 2, 3, 4]);
        assert_eq!(units(8).elements(), &[1, 3, 5, 7]);
    }

    #[test]
    fn root_examples() {
        assert_eq!(roots_n2_plus_1(5), vec![2, 3]);
        assert!(roots_n2_plus_1(7).is_empty());
        assert_eq!(roots_n2_plus_1(13), vec![5, 8]);
        assert_eq!(roots_n2_plus_n_plus_1(7), vec![2, 4]);
        assert!(roots_n2_plus_n_plus_1(5).is_empty());
        assert_eq!(roots_n2_plus_n_plus_1(3), vec![1]);
        assert_eq!(roots_n2_plus_1(1), vec![0]);
    }

    #[test]
    fn lifted_roots_large_moduli() {
        // 1_000_037 ≡ 1 mod 12, so both congruences are solvable; square it too.
        for m in [1_000_037u64, 5 * 1_000_037, 13 * 13 * 7 * 1_000_039] {
            for c in [CmCongruence::SquareLattice, CmCongruence::HexagonalLattice] {
                for r in c.roots(m) {
                    assert_eq!(c.eval(r, m), 0, "{c:?} m={m} r={r}");
                }
            }
        }
        let p = 1_000_037u64;
        assert_eq!(p % 4, 1);
        assert_eq!(roots_n2_plus_1(p * p).len(), 2);
        assert_eq!(roots_n2_plus_1(p * 5).len(), 4);
        assert_eq!(roots_n2_plus_1(p * 5).len(), 4);
        assert!(roots_n2_plus_1(p * 4).is_empty());
        assert!(roots_n2_plus_n_plus_1(p * 9).is_empty());
        assert_eq!(
            roots_n2_plus_n_plus_1(p * 3).len(),
            if p % 3 == 1 { 2 } else { 0 }
        );
    }

    #[test]
    fn closure_examples() {
        assert_eq!(subgroup_closure(5, &[2]).unwrap().elements(), &[1, 2, 3, 4]);
        assert_eq!(subgroup_closure(7, &[6]).unwrap().elements(), &[1, 6]);
        assert_eq!(subgroup_closure(12, &[]).unwrap().elements(), &[1]);
        assert_eq!(
            subgroup_closure(12, &[4]),
            Err(Error::NotCoprime {
                value: 4,
                modulus: 12
            })
        );
    }

    #[test]
    fn orbit_examples() {
        let h = subgroup_closure(5, &[4]).unwrap();
        let o = orbits(5, &h);
        assert_eq!(o.len(), 2);
        assert_eq!(o[0].elements, vec![1, 4]);
        assert_eq!(o[1].elements, vec![2, 3]);

        let full = subgroup_closure(5, &[1, 2, 3, 4]).unwrap();
        assert_eq!(orbits(5, &full).len(), 1);

        let h13 = Subgroup::try_from_elements(13, &[1, 5, 8, 12]).unwrap();
        let o13: Vec<Vec<u64>> = orbits(13, &h13).into_iter().map(|o| o.elements).collect();
        assert_eq!(
            o13,
            vec![vec![1, 5, 8, 12], vec![2, 3, 10, 11], vec![4, 6, 7, 9]]
        );
    }

    #[test]
    fn explicit_subgroup_validation() {
        assert!(Subgroup::try_from_elements(5, &[1, 2]).is_err());
        assert!(Subgroup::try_from_elements(6, &[1, 3]).is_err());
        assert_eq!(
            Subgroup::try_from_elements(1, &[0]).unwrap().elements(),
            &[0]
        );
    }

    #[test]
    fn inverse_and_reduce() {
        assert_eq!(mod_inverse(2, 5), Some(3));
        assert_eq!(mod_inverse(4, 8), None);
        assert_eq!(mod_inverse(0, 1), Some(0));
        assert_eq!(reduce(-1, 5), 4);
        assert_eq!(reduce(-12, 5), 3);
    }
}
