//! Rank-2 lattices in `C` for the three curve classes.
//!
//! A curve `F = C/(Z + Zτ)` is handled through coordinates: a complex number
//! `x + yτ` is the pair `(x, y)`. For the square lattice `τ = i` with
//! `τ^2 = -1`; for the hexagonal lattice `τ = ω = (-1 + √-3)/2` with
//! `ω^2 = -1 - ω`. The generic class carries no `τ` arithmetic at all, only
//! the `±1` action on coordinates mod `m`.
//!
//! Torsion points `(x + yτ)/m` are stored as reduced pairs `(x, y) mod m`.
//! Via `x ↦ O(x - O)` the same type also stands for an `m`-torsion line
//! bundle on the dual curve.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::modmath::reduce;
use crate::normal_form::{hermite_normal_form, invariant_factors_two_columns};

/// A 2x2 integer matrix acting on coordinate columns `(x, y)`.
pub type Mat2 = [[i64; 2]; 2];

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

const IDENTITY: Mat2 = [[1, 0], [0, 1]];

/// Which group of origin-fixing automorphisms the curve carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveClass {
    /// `j ≠ 0, 1728`: automorphisms `{±1}`.
    Generic,
    /// `Z + Zi`, `j = 1728`: automorphisms `{±1, ±i}`.
    Square,
    /// `Z + Zω`, `j = 0`: automorphisms `{±1, ±ω, ±ω²}`.
    Hexagonal,
}

impl CurveClass {
    pub const ALL: [CurveClass; 3] = [Self::Generic, Self::Square, Self::Hexagonal];

    /// Order of the automorphism group fixing the origin.
    pub fn unit_count(self) -> u8 {
        match self {
            Self::Generic => 2,
            Self::Square => 4,
            Self::Hexagonal => 6,
        }
    }

    pub fn is_cm(self) -> bool {
        self != Self::Generic
    }

    pub fn j_invariant(self) -> Option<u32> {
        match self {
            Self::Generic => None,
            Self::Square => Some(1728),
            Self::Hexagonal => Some(0),
        }
    }

    /// Multiplication by `τ` on coordinates, `τ(x + yτ) = -N y + (x + T y)τ`
    /// where `τ^2 = Tτ - N`.
    pub fn tau_matrix(self) -> Option<Mat2> {
        match self {
            Self::Generic => None,
            Self::Square => Some([[0, -1], [1, 0]]),
            Self::Hexagonal => Some([[0, -1], [1, -1]]),
        }
    }

    // matrix of a primitive root of unity of order unit_count()
    fn primitive_unit_matrix(self) -> Mat2 {
        match self {
            Self::Generic => [[-1, 0], [0, -1]],
            Self::Square => [[0, -1], [1, 0]],
            // 1 + ω = -ω²
            Self::Hexagonal => [[1, -1], [1, 0]],
        }
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Generic => "generic",
            Self::Square => "square",
            Self::Hexagonal => "hexagonal",
        })
    }
}

impl FromStr for CurveClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "generic" => Ok(Self::Generic),
            "square" | "j1728" => Ok(Self::Square),
            "hexagonal" | "j0" => Ok(Self::Hexagonal),
            other => Err(format!(
                "unknown curve class '{other}' (expected generic, square or hexagonal)"
            )),
        }
    }
}

/// Names of the roots of unity that occur as automorphisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Unit {
    One,
    MinusOne,
    I,
    MinusI,
    Omega,
    MinusOmega,
    OmegaSquared,
    MinusOmegaSquared,
}

impl Unit {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::One => "1",
            Self::MinusOne => "-1",
            Self::I => "i",
            Self::MinusI => "-i",
            Self::Omega => "w",
            Self::MinusOmega => "-w",
            Self::OmegaSquared => "w^2",
            Self::MinusOmegaSquared => "-w^2",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Unit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// An automorphism `z ↦ ζ^power · z`, with `ζ` the primitive root of unity
/// of the class, together with its matrix on coordinates of some lattice
/// basis (by default `{1, τ}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UnitAction {
    class: CurveClass,
    power: u8,
    matrix: Mat2,
}

impl UnitAction {
    pub fn class(&self) -> CurveClass {
        self.class
    }

    /// Exponent of the primitive root of unity of the class.
    pub fn power(&self) -> u8 {
        self.power
    }

    pub fn matrix(&self) -> Mat2 {
        self.matrix
    }

    pub fn label(&self) -> Unit {
        use Unit::*;
        match (self.class, self.power) {
            (_, 0) => One,
            (CurveClass::Generic, _) => MinusOne,
            (CurveClass::Square, 1) => I,
            (CurveClass::Square, 2) => MinusOne,
            (CurveClass::Square, _) => MinusI,
            // ζ = -ω²
            (CurveClass::Hexagonal, 1) => MinusOmegaSquared,
            (CurveClass::Hexagonal, 2) => Omega,
            (CurveClass::Hexagonal, 3) => MinusOne,
            (CurveClass::Hexagonal, 4) => OmegaSquared,
            (CurveClass::Hexagonal, _) => MinusOmega,
        }
    }

    /// Multiplicative order of the unit.
    pub fn order(&self) -> u8 {
        let n = self.class.unit_count();
        n / self.power.gcd(&n)
    }

    /// `self ∘ other`, assuming both matrices are written in the same basis.
    pub fn compose(&self, other: &UnitAction) -> Result<UnitAction> {
        if self.class != other.class {
            return Err(Error::ClassMismatch {
                expected: self.class,
                found: other.class,
            });
        }
        Ok(UnitAction {
            class: self.class,
            power: (self.power + other.power) % self.class.unit_count(),
            matrix: mat2_mul(&self.matrix, &other.matrix),
        })
    }

    pub fn inverse(&self) -> UnitAction {
        let n = self.class.unit_count();
        let [[a, b], [c, d]] = self.matrix;
        // det = 1 for every root of unity acting on a rank-2 lattice
        UnitAction {
            class: self.class,
            power: (n - self.power) % n,
            matrix: [[d, -b], [-c, a]],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.power == 0
    }

    pub fn is_minus_one(&self) -> bool {
        2 * self.power == self.class.unit_count()
    }
}

/// All origin-fixing automorphisms of the class, ordered by power of the
/// primitive root: 2, 4 or 6 actions.
pub fn unit_group(c: CurveClass) -> Vec<UnitAction> {
    let zeta = c.primitive_unit_matrix();
    let mut matrix = IDENTITY;
    (0..c.unit_count())
        .map(|power| {
            let u = UnitAction {
                class: c,
                power,
                matrix,
            };
            matrix = mat2_mul(&zeta, &matrix);
            u
        })
        .collect()
}

/// The action of a named unit, if the class has it.
pub fn unit_by_label(c: CurveClass, label: Unit) -> Option<UnitAction> {
    unit_group(c).into_iter().find(|u| u.label() == label)
}

/// An `m`-torsion point `(x + yτ)/m`, coordinates reduced mod `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TorsionPoint {
    class: CurveClass,
    modulus: u64,
    x: u64,
    y: u64,
}

impl TorsionPoint {
    pub fn new(class: CurveClass, modulus: u64, x: i64, y: i64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        Ok(TorsionPoint {
            class,
            modulus,
            x: reduce(x, modulus),
            y: reduce(y, modulus),
        })
    }

    pub fn zero(class: CurveClass, modulus: u64) -> Result<Self> {
        Self::new(class, modulus, 0, 0)
    }

    pub fn class(&self) -> CurveClass {
        self.class
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn coords(&self) -> (u64, u64) {
        (self.x, self.y)
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// `m / gcd(x, y, m)`.
    pub fn order(&self) -> u64 {
        self.modulus / self.x.gcd(&self.y).gcd(&self.modulus)
    }

    pub fn add(&self, other: &TorsionPoint) -> Result<TorsionPoint> {
        self.check_compatible(other)?;
        let m = self.modulus;
        Ok(TorsionPoint {
            x: ((self.x as u128 + other.x as u128) % m as u128) as u64,
            y: ((self.y as u128 + other.y as u128) % m as u128) as u64,
            ..*self
        })
    }

    fn check_compatible(&self, other: &TorsionPoint) -> Result<()> {
        if self.class != other.class {
            return Err(Error::ClassMismatch {
                expected: self.class,
                found: other.class,
            });
        }
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(())
    }

    /// Errors unless the point has exact order equal to its modulus.
    pub fn require_exact_order(&self) -> Result<()> {
        let order = self.order();
        if order != self.modulus {
            return Err(Error::OrderMismatch {
                x: self.x,
                y: self.y,
                modulus: self.modulus,
                order,
            });
        }
        Ok(())
    }
}

impl fmt::Display for TorsionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}) mod {}", self.x, self.y, self.modulus)
    }
}

/// All points of exact order `m` on a curve of class `c`, sorted by `(x, y)`.
pub fn points_of_exact_order(c: CurveClass, m: u64) -> Vec<TorsionPoint> {
    let mut out = Vec::new();
    for x in 0..m {
        for y in 0..m {
            let p = TorsionPoint {
                class: c,
                modulus: m,
                x,
                y,
            };
            if p.order() == m {
                out.push(p);
            }
        }
    }
    out
}

fn apply(matrix: &Mat2, x: u64, y: u64, m: u64) -> (u64, u64) {
    let (x, y, m) = (x as i128, y as i128, m as i128);
    let nx = matrix[0][0] as i128 * x + matrix[0][1] as i128 * y;
    let ny = matrix[1][0] as i128 * x + matrix[1][1] as i128 * y;
    (nx.rem_euclid(m) as u64, ny.rem_euclid(m) as u64)
}

/// The image `u(p)`.
pub fn act(u: &UnitAction, p: &TorsionPoint) -> Result<TorsionPoint> {
    if u.class != p.class {
        return Err(Error::ClassMismatch {
            expected: u.class,
            found: p.class,
        });
    }
    let (x, y) = apply(&u.matrix, p.x, p.y, p.modulus);
    Ok(TorsionPoint { x, y, ..*p })
}

/// `k · p`.
pub fn scalar_mul(k: i64, p: &TorsionPoint) -> TorsionPoint {
    let m = p.modulus as i128;
    let k = k as i128;
    TorsionPoint {
        x: (k * p.x as i128).rem_euclid(m) as u64,
        y: (k * p.y as i128).rem_euclid(m) as u64,
        ..*p
    }
}

pub fn point_order(p: &TorsionPoint) -> u64 {
    p.order()
}

/// Smallest `k ∈ [0, ord g)` with `k · g = p`, or `None` when `p ∉ ⟨g⟩`.
///
/// Writes `g = e·g₁` with `e = gcd(x, y, m)`, picks `s, t` with
/// `s x₁ + t y₁ ≡ 1 (mod m/e)` and reads `k` off `p` directly; the answer is
/// checked before it is returned. [`discrete_log_scan`] is the naive walk.
pub fn discrete_log_cyclic(p: &TorsionPoint, g: &TorsionPoint) -> Result<Option<u64>> {
    p.check_compatible(g)?;
    if p.modulus <= i32::MAX as u64 {
        return Ok(solve_dlog::<i64>(p, g));
    }
    Ok(solve_dlog::<i128>(p, g))
}

fn solve_dlog<T>(p: &TorsionPoint, g: &TorsionPoint) -> Option<u64>
where
    T: Integer + Copy + From<u32> + TryFrom<u64> + TryInto<u64>,
{
    let of = |v: u64| -> T { T::try_from(v).ok().expect("fits the working width") };
    let m = of(p.modulus);
    let (gx, gy, px, py) = (of(g.x), of(g.y), of(p.x), of(p.y));
    let e = gx.gcd(&gy).gcd(&m);
    if !(px % e).is_zero() || !(py % e).is_zero() {
        return None;
    }
    let n = m / e;
    let (x1, y1) = (gx / e, gy / e);
    let first = x1.extended_gcd(&n);
    let second = first.gcd.extended_gcd(&y1);
    debug_assert!(second.gcd.is_one(), "g₁ has exact order m/e");
    let s = (second.x * first.x.mod_floor(&n)).mod_floor(&n);
    let t = second.y.mod_floor(&n);
    let k = (s * (px / e) % n + t * (py / e) % n) % n;
    let hit = k * gx % m == px && k * gy % m == py;
    hit.then(|| k.try_into().ok().expect("k is a residue"))
}

/// [`discrete_log_cyclic`] by walking the multiples of `g`, `O(ord g)`.
pub fn discrete_log_scan(p: &TorsionPoint, g: &TorsionPoint) -> Result<Option<u64>> {
    p.check_compatible(g)?;
    let m = p.modulus;
    let (mut cx, mut cy) = (0u64, 0u64);
    let mut k = 0u64;
    loop {
        if cx == p.x && cy == p.y {
            return Ok(Some(k));
        }
        cx += g.x;
        if cx >= m {
            cx -= m;
        }
        cy += g.y;
        if cy >= m {
            cy -= m;
        }
        k += 1;
        if cx == 0 && cy == 0 {
            return Ok(None);
        }
    }
}

/// A rational vector `x + yτ` stored as `[x, y]`.
pub type QVector = [Rational64; 2];

fn rat(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// A full-rank lattice in `Q(τ)`, given by a canonical basis (rows).
///
/// The basis is the Hermite normal form of the lattice, so equal lattices
/// compare equal and serialize identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QLattice {
    class: CurveClass,
    basis: [QVector; 2],
}

impl QLattice {
    /// The lattice spanned by `rows / denominator`. Any number of
    /// generating rows is accepted; they must span a rank-2 lattice.
    pub fn from_integer_rows(
        class: CurveClass,
        rows: &[[i64; 2]],
        denominator: i64,
    ) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::DegenerateLattice);
        }
        let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        let h = hermite_normal_form(&rows);
        if h.len() != 2 {
            return Err(Error::DegenerateLattice);
        }
        let d = rat(denominator.abs());
        Ok(QLattice {
            class,
            basis: [
                [rat(h[0][0]) / d, rat(h[0][1]) / d],
                [rat(h[1][0]) / d, rat(h[1][1]) / d],
            ],
        })
    }

    /// The lattice spanned by two rational vectors.
    pub fn from_basis(class: CurveClass, basis: [QVector; 2]) -> Result<Self> {
        let denom = basis
            .iter()
            .flatten()
            .fold(1i64, |acc, q| acc.lcm(q.denom()));
        let rows: Vec<[i64; 2]> = basis
            .iter()
            .map(|v| {
                [
                    (v[0] * rat(denom)).to_integer(),
                    (v[1] * rat(denom)).to_integer(),
                ]
            })
            .collect();
        Self::from_integer_rows(class, &rows, denom)
    }

    /// `Z + Zτ`.
    pub fn standard(class: CurveClass) -> Self {
        Self::from_integer_rows(class, &[[1, 0], [0, 1]], 1).expect("identity has full rank")
    }

    pub fn class(&self) -> CurveClass {
        self.class
    }

    pub fn basis(&self) -> &[QVector; 2] {
        &self.basis
    }

    /// Determinant of the basis in `{1, τ}` coordinates; always positive.
    pub fn determinant(&self) -> Rational64 {
        let [[a, b], [c, d]] = self.basis;
        a * d - b * c
    }

    /// Coordinates of `v` in this lattice's basis.
    pub fn coords_of(&self, v: &QVector) -> [Rational64; 2] {
        let [[a, b], [c, d]] = self.basis;
        let det = self.determinant();
        // v = s (a, b) + t (c, d)
        let s = (v[0] * d - v[1] * c) / det;
        let t = (a * v[1] - b * v[0]) / det;
        [s, t]
    }

    pub fn contains(&self, v: &QVector) -> bool {
        self.coords_of(v).iter().all(|q| q.is_integer())
    }

    pub fn contains_lattice(&self, other: &QLattice) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// `z ↦ u·z` applied to a vector in `{1, τ}` coordinates; `u` must carry
    /// its standard matrix.
    fn apply_unit(u: &UnitAction, v: &QVector) -> QVector {
        let m = u.matrix;
        [
            rat(m[0][0]) * v[0] + rat(m[0][1]) * v[1],
            rat(m[1][0]) * v[0] + rat(m[1][1]) * v[1],
        ]
    }

    /// The matrix of a standard unit action in this lattice's basis, or
    /// `None` when the unit does not preserve the lattice.
    pub fn unit_matrix_in_basis(&self, u: &UnitAction) -> Option<Mat2> {
        let mut cols = [[0i64; 2]; 2];
        for (j, b) in self.basis.iter().enumerate() {
            let c = self.coords_of(&Self::apply_unit(u, b));
            if !c.iter().all(|q| q.is_integer()) {
                return None;
            }
            cols[j] = [c[0].to_integer(), c[1].to_integer()];
        }
        Some([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]])
    }

    /// The automorphisms of `C/Λ` fixing the origin: the units of the class
    /// that preserve `Λ`, written in this lattice's basis.
    pub fn automorphisms(&self) -> Vec<UnitAction> {
        unit_group(self.class)
            .into_iter()
            .filter_map(|u| {
                self.unit_matrix_in_basis(&u)
                    .map(|matrix| UnitAction { matrix, ..u })
            })
            .collect()
    }

    /// The representative `(x b1 + y b2)/m` of a torsion point written in
    /// this basis.
    pub fn point_value(&self, p: &TorsionPoint) -> QVector {
        let m = rat(p.modulus as i64);
        let (x, y) = (rat(p.x as i64), rat(p.y as i64));
        [
            (x * self.basis[0][0] + y * self.basis[1][0]) / m,
            (x * self.basis[0][1] + y * self.basis[1][1]) / m,
        ]
    }
}

impl fmt::Display for QLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [u, v] = &self.basis;
        write!(
            f,
            "<{}, {}>",
            format_qvector(self.class, u),
            format_qvector(self.class, v)
        )
    }
}

/// Renders `x + yτ` with `i` or `w` for `τ`.
pub fn format_qvector(class: CurveClass, v: &QVector) -> String {
    let tau = match class {
        CurveClass::Hexagonal => "w",
        _ => "i",
    };
    match (v[0].is_zero(), v[1].is_zero()) {
        (true, true) => "0".to_string(),
        (false, true) => v[0].to_string(),
        (true, false) => format!("{}{tau}", coeff(v[1])),
        (false, false) => {
            let sign = if v[1] < Rational64::zero() { "-" } else { "+" };
            format!("{}{sign}{}{tau}", v[0], coeff(v[1].abs()))
        }
    }
}

fn coeff(q: Rational64) -> String {
    if q.is_one() {
        String::new()
    } else if q == -Rational64::one() {
        "-".to_string()
    } else if q.is_integer() {
        q.to_string()
    } else {
        format!("({q})")
    }
}

impl Serialize for QLattice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let strings: Vec<[String; 2]> = self
            .basis
            .iter()
            .map(|v| [v[0].to_string(), v[1].to_string()])
            .collect();
        let mut st = s.serialize_struct("QLattice", 3)?;
        st.serialize_field("class", &self.class)?;
        st.serialize_field("basis", &strings)?;
        st.serialize_field("determinant", &self.determinant().to_string())?;
        st.end()
    }
}

/// The overlattice `Z + Zτ + Z·p` of a point of exact order `m`.
///
/// Smith reduction of the generator rows `(m,0), (0,m), (x,y)` yields a
/// two-row basis, which is then put in canonical form.
pub fn overlattice_with_point(c: CurveClass, m: u64, p: &TorsionPoint) -> Result<QLattice> {
    if !c.is_cm() {
        return Err(Error::GenericClass(c));
    }
    if p.class != c {
        return Err(Error::ClassMismatch {
            expected: c,
            found: p.class,
        });
    }
    if p.modulus != m {
        return Err(Error::ModulusMismatch {
            left: m,
            right: p.modulus,
        });
    }
    p.require_exact_order()?;
    let mi = i64::try_from(m).map_err(|_| Error::Overflow)?;
    let gens = [[mi, 0], [0, mi], [p.x as i64, p.y as i64]];
    let factors = invariant_factors_two_columns(&gens.map(|r| r.to_vec()));
    if factors.iter().product::<i64>() != mi {
        return Err(Error::DegenerateLattice);
    }
    QLattice::from_integer_rows(c, &gens, mi)
}

/// Whether `u·Λ ⊆ Λ`, checked on both basis vectors by exact solve.
pub fn cm_stable(lattice: &QLattice, u: &UnitAction) -> Result<bool> {
    if !lattice.class.is_cm() {
        return Err(Error::GenericClass(lattice.class));
    }
    if u.class != lattice.class {
        return Err(Error::ClassMismatch {
            expected: lattice.class,
            found: u.class,
        });
    }
    Ok(lattice.unit_matrix_in_basis(u).is_some())
}

/// Kernel data of the dual of the isogeny `C/Λ → C/Λ'` induced by `Λ ⊆ Λ'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualKernel {
    /// Generator of `(1/n)Λ / Λ'` as an `n`-torsion point in the basis of `Λ'`.
    pub generator: TorsionPoint,
    /// Coefficients `(u, v)` with generator `= (u s1 + v s2)/n` for the basis
    /// `s1, s2` of `Λ`.
    pub preimage: [u64; 2],
    /// Invariant factors of `(1/n)Λ / Λ'`; cyclic iff the first is 1.
    pub invariant_factors: [u64; 2],
}

/// Index of `Λ` in `Λ'` and a generator of `ker q̂ = (1/n)Λ / Λ'` where
/// `n = [Λ' : Λ]` and `q̂ : C/Λ' → C/Λ` is `z ↦ n z`.
pub fn dual_isogeny_kernel(source: &QLattice, target: &QLattice) -> Result<(u64, DualKernel)> {
    if source.class != target.class {
        return Err(Error::ClassMismatch {
            expected: source.class,
            found: target.class,
        });
    }
    let mut s = [[0i64; 2]; 2];
    for (i, v) in source.basis.iter().enumerate() {
        let c = target.coords_of(v);
        if !c.iter().all(|q| q.is_integer()) {
            return Err(Error::NotSublattice);
        }
        s[i] = [c[0].to_integer(), c[1].to_integer()];
    }
    let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    let index = det.unsigned_abs();
    debug_assert_eq!(
        rat(det.abs()),
        source.determinant() / target.determinant(),
        "index equals the determinant ratio"
    );

    // Λ' in the basis s/n of (1/n)Λ is n S^-1 = ±adj(S)
    let adj = vec![vec![s[1][1], -s[0][1]], vec![-s[1][0], s[0][0]]];
    let factors = invariant_factors_two_columns(&adj);
    let invariant_factors = [factors[0].unsigned_abs(), factors[1].unsigned_abs()];
    if invariant_factors[0] != 1 {
        return Err(Error::NonCyclicQuotient(invariant_factors.to_vec()));
    }

    let candidate = |u: u64, v: u64| -> Result<TorsionPoint> {
        let (u, v) = (u as i64, v as i64);
        TorsionPoint::new(
            target.class,
            index,
            u * s[0][0] + v * s[1][0],
            u * s[0][1] + v * s[1][1],
        )
    };
    let preferred = [(1, 0), (0, 1)];
    let scan = (0..index).flat_map(|u| (0..index).map(move |v| (u, v)));
    for (u, v) in preferred.into_iter().chain(scan) {
        let g = candidate(u % index, v % index)?;
        if g.order() == index {
            return Ok((
                index,
                DualKernel {
                    generator: g,
                    preimage: [u % index, v % index],
                    invariant_factors,
                },
            ));
        }
    }
    // unreachable for a cyclic quotient of order `index`
    Err(Error::NonCyclicQuotient(invariant_factors.to_vec()))
}

/// An inclusion `Λ ⊆ Λ'` together with the kernel of the dual isogeny.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsogenyData {
    pub source: QLattice,
    pub target: QLattice,
    pub index: u64,
    pub dual_kernel: DualKernel,
}

impl IsogenyData {
    pub fn new(source: QLattice, target: QLattice) -> Result<Self> {
        let (index, dual_kernel) = dual_isogeny_kernel(&source, &target)?;
        Ok(IsogenyData {
            source,
            target,
            index,
            dual_kernel,
        })
    }

    pub fn dual_kernel_generator(&self) -> &TorsionPoint {
        &self.dual_kernel.generator
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn pt(c: CurveClass, m: u64, x: i64, y: i64) -> TorsionPoint {
        TorsionPoint::new(c, m, x, y).unwrap()
    }

    #[test]
    fn unit_group_sizes_and_generators() {
        assert_eq!(unit_group(CurveClass::Generic).len(), 2);
        assert_eq!(unit_group(CurveClass::Square).len(), 4);
        assert_eq!(unit_group(CurveClass::Hexagonal).len(), 6);

        let i = unit_by_label(CurveClass::Square, Unit::I).unwrap();
        assert_eq!(i.matrix(), [[0, -1], [1, 0]]);
        let w = unit_by_label(CurveClass::Hexagonal, Unit::Omega).unwrap();
        assert_eq!(w.matrix(), [[0, -1], [1, -1]]);
        assert_eq!(Some(w.matrix()), CurveClass::Hexagonal.tau_matrix());
        assert_eq!(i.order(), 4);
        assert_eq!(w.order(), 3);
        assert_eq!(
            unit_by_label(CurveClass::Hexagonal, Unit::MinusOmega)
                .unwrap()
                .order(),
            6
        );
    }

    #[test]
    fn unit_group_is_closed() {
        for c in CurveClass::ALL {
            let g = unit_group(c);
            for u in &g {
                for v in &g {
                    let uv = u.compose(v).unwrap();
                    assert!(g.contains(&uv), "{c}: {} * {}", u.label(), v.label());
                }
                assert!(u.compose(&u.inverse()).unwrap().is_identity());
                assert_eq!(u.compose(&u.inverse()).unwrap().matrix(), IDENTITY);
            }
        }
    }

    #[test]
    fn act_examples() {
        let i = unit_by_label(CurveClass::Square, Unit::I).unwrap();
        assert_eq!(
            act(&i, &pt(CurveClass::Square, 5, 2, 1)).unwrap(),
            pt(CurveClass::Square, 5, 4, 2)
        );
        let w = unit_by_label(CurveClass::Hexagonal, Unit::Omega).unwrap();
        assert_eq!(
            act(&w, &pt(CurveClass::Hexagonal, 7, 3, 1)).unwrap(),
            pt(CurveClass::Hexagonal, 7, 6, 2)
        );
        let neg = unit_by_label(CurveClass::Generic, Unit::MinusOne).unwrap();
        assert_eq!(
            act(&neg, &pt(CurveClass::Generic, 9, 2, 0)).unwrap(),
            pt(CurveClass::Generic, 9, 7, 0)
        );
        assert!(matches!(
            act(&i, &pt(CurveClass::Generic, 5, 1, 0)),
            Err(Error::ClassMismatch { .. })
        ));
    }

    #[test]
    fn scalar_and_order() {
        let p = pt(CurveClass::Square, 5, 2, 1);
        assert_eq!(scalar_mul(2, &p), pt(CurveClass::Square, 5, 4, 2));
        assert!(scalar_mul(5, &p).is_zero());
        assert!(scalar_mul(0, &p).is_zero());
        assert_eq!(point_order(&p), 5);
        assert_eq!(point_order(&pt(CurveClass::Square, 5, 0, 0)), 1);
        assert_eq!(point_order(&pt(CurveClass::Square, 6, 2, 4)), 3);
    }

    #[test]
    fn discrete_log_examples() {
        let g = pt(CurveClass::Square, 5, 2, 1);
        assert_eq!(
            discrete_log_cyclic(&pt(CurveClass::Square, 5, 4, 2), &g).unwrap(),
            Some(2)
        );
        assert_eq!(discrete_log_cyclic(&g, &g).unwrap(), Some(1));
        assert_eq!(
            discrete_log_cyclic(
                &pt(CurveClass::Square, 5, 1, 0),
                &pt(CurveClass::Square, 5, 0, 1)
            )
            .unwrap(),
            None
        );
        assert_eq!(
            discrete_log_cyclic(&pt(CurveClass::Square, 5, 0, 0), &g).unwrap(),
            Some(0)
        );
        // zero generator only reaches zero
        let z = pt(CurveClass::Square, 5, 0, 0);
        assert_eq!(discrete_log_cyclic(&g, &z).unwrap(), None);
    }

    #[test]
    fn overlattice_square_example() {
        let p = pt(CurveClass::Square, 5, 2, 1);
        let lp = overlattice_with_point(CurveClass::Square, 5, &p).unwrap();
        let expected = QLattice::from_basis(
            CurveClass::Square,
            [[q(2, 5), q(1, 5)], [q(1, 5), q(-2, 5)]],
        )
        .unwrap();
        assert_eq!(lp, expected);
        assert_eq!(lp.determinant(), q(1, 5));
        assert!(lp.contains_lattice(&QLattice::standard(CurveClass::Square)));
    }

    #[test]
    fn overlattice_trivial_and_errors() {
        let z = pt(CurveClass::Square, 1, 0, 0);
        let lp = overlattice_with_point(CurveClass::Square, 1, &z).unwrap();
        assert_eq!(lp, QLattice::standard(CurveClass::Square));

        let g = pt(CurveClass::Generic, 5, 1, 0);
        assert!(matches!(
            overlattice_with_point(CurveClass::Generic, 5, &g),
            Err(Error::GenericClass(_))
        ));
        let low = pt(CurveClass::Square, 6, 2, 4);
        assert!(matches!(
            overlattice_with_point(CurveClass::Square, 6, &low),
            Err(Error::OrderMismatch { .. })
        ));
    }

    #[test]
    fn overlattice_hexagonal_example() {
        let p = pt(CurveClass::Hexagonal, 7, 3, 1);
        let lp = overlattice_with_point(CurveClass::Hexagonal, 7, &p).unwrap();
        assert_eq!(lp.determinant(), q(1, 7));
        assert!(lp.contains(&[q(3, 7), q(1, 7)]));
        assert!(lp.contains_lattice(&QLattice::standard(CurveClass::Hexagonal)));
    }

    #[test]
    fn cm_stability_examples() {
        let i = unit_by_label(CurveClass::Square, Unit::I).unwrap();
        let lp = QLattice::from_basis(
            CurveClass::Square,
            [[q(2, 5), q(1, 5)], [q(1, 5), q(-2, 5)]],
        )
        .unwrap();
        assert!(cm_stable(&lp, &i).unwrap());
        assert!(cm_stable(&QLattice::standard(CurveClass::Square), &i).unwrap());
        let half =
            QLattice::from_basis(CurveClass::Square, [[q(1, 2), q(0, 1)], [q(0, 1), q(1, 1)]])
                .unwrap();
        assert!(!cm_stable(&half, &i).unwrap());
    }

    #[test]
    fn dual_kernel_square_example() {
        let lp = QLattice::from_basis(
            CurveClass::Square,
            [[q(2, 5), q(1, 5)], [q(1, 5), q(-2, 5)]],
        )
        .unwrap();
        let iso = IsogenyData::new(QLattice::standard(CurveClass::Square), lp.clone()).unwrap();
        assert_eq!(iso.index, 5);
        let g = iso.dual_kernel_generator();
        assert_eq!(g.order(), 5);
        assert_eq!(iso.dual_kernel.preimage, [1, 0]);
        // the generator is the class of 1/5
        let v = lp.point_value(g);
        let diff = [v[0] - q(1, 5), v[1]];
        assert!(lp.contains(&diff));
        // i·g = 3·g on C/Λ'
        let i = lp
            .automorphisms()
            .into_iter()
            .find(|u| u.label() == Unit::I)
            .unwrap();
        assert_eq!(act(&i, g).unwrap(), scalar_mul(3, g));
    }

    #[test]
    fn dual_kernel_trivial_and_noncyclic() {
        let l = QLattice::standard(CurveClass::Square);
        let iso = IsogenyData::new(l.clone(), l.clone()).unwrap();
        assert_eq!(iso.index, 1);
        assert!(iso.dual_kernel_generator().is_zero());

        let half = QLattice::from_integer_rows(CurveClass::Square, &[[1, 0], [0, 1]], 2).unwrap();
        assert!(matches!(
            dual_isogeny_kernel(&l, &half),
            Err(Error::NonCyclicQuotient(_))
        ));
        assert!(matches!(
            dual_isogeny_kernel(&half, &l),
            Err(Error::NotSublattice)
        ));
    }

    #[test]
    fn dual_kernel_hexagonal_example() {
        let p = pt(CurveClass::Hexagonal, 7, 3, 1);
        let lp = overlattice_with_point(CurveClass::Hexagonal, 7, &p).unwrap();
        let iso = IsogenyData::new(QLattice::standard(CurveClass::Hexagonal), lp).unwrap();
        assert_eq!(iso.index, 7);
        assert_eq!(iso.dual_kernel_generator().order(), 7);
    }

    #[test]
    fn formatting() {
        let lp = QLattice::from_basis(
            CurveClass::Square,
            [[q(2, 5), q(1, 5)], [q(1, 5), q(-2, 5)]],
        )
        .unwrap();
        assert_eq!(lp.to_string(), "<1/5+(3/5)i, i>");
        assert_eq!("Square".parse::<CurveClass>().unwrap(), CurveClass::Square);
        assert!("cubic".parse::<CurveClass>().is_err());
    }
}
