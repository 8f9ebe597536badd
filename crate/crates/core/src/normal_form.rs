//! Smith and Hermite normal forms of small integer matrices.
//!
//! Matrices are dense row-major `Vec<Vec<i64>>`. Entries stay at desk scale
//! here (lattice generators scaled by a fiber multiplicity), so no bignums.

pub type IntMatrix = Vec<Vec<i64>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "dimension mismatch");
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal, each diagonal
/// entry dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries of `D`, zeros included.
    pub fn invariant_factors(&self) -> Vec<i64> {
        let n = self.d.len().min(self.d.first().map_or(0, Vec::len));
        (0..n).map(|i| self.d[i][i]).collect()
    }
}

fn swap_cols(m: &mut IntMatrix, i: usize, j: usize) {
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

// row[dst] -= q * row[src]
fn row_axpy(m: &mut IntMatrix, dst: usize, src: usize, q: i64) {
    for k in 0..m[dst].len() {
        m[dst][k] -= q * m[src][k];
    }
}

/// `(g, s, r)` with `s·a + r·b = g = gcd(a, b) > 0`, for `a ≠ 0`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

// rows (p, q) <- (s p + r q, -b p + a q), a unimodular step
fn rows_mix(m: &mut IntMatrix, p: usize, q: usize, [s, r, b, a]: [i64; 4]) {
    for k in 0..m[p].len() {
        let (x, y) = (m[p][k], m[q][k]);
        m[p][k] = s * x + r * y;
        m[q][k] = -b * x + a * y;
    }
}

fn cols_mix(m: &mut IntMatrix, p: usize, q: usize, [s, r, b, a]: [i64; 4]) {
    for row in m.iter_mut() {
        let (x, y) = (row[p], row[q]);
        row[p] = s * x + r * y;
        row[q] = -b * x + a * y;
    }
}

fn gcd_step(pivot: i64, other: i64) -> [i64; 4] {
    let (g, s, r) = ext_gcd(pivot, other);
    [s, r, other / g, pivot / g]
}

pub fn smith_normal_form(a: &[Vec<i64>]) -> SmithForm {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut d: IntMatrix = a.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);

    for t in 0..rows.min(cols) {
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| d[i][j] != 0)
            .min_by_key(|&(i, j)| (d[i][j].unsigned_abs(), i, j));
        let Some((pi, pj)) = pivot else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        loop {
            for i in t + 1..rows {
                if d[i][t] != 0 {
                    let step = gcd_step(d[t][t], d[i][t]);
                    rows_mix(&mut d, t, i, step);
                    rows_mix(&mut u, t, i, step);
                }
            }
            for j in t + 1..cols {
                if d[t][j] != 0 {
                    let step = gcd_step(d[t][t], d[t][j]);
                    cols_mix(&mut d, t, j, step);
                    cols_mix(&mut v, t, j, step);
                }
            }
            if (t + 1..rows).any(|i| d[i][t] != 0) {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| d[i][j] % d[t][t] != 0));
            match offender {
                Some(i) => {
                    row_axpy(&mut d, t, i, -1);
                    row_axpy(&mut u, t, i, -1);
                }
                None => break,
            }
        }
        if d[t][t] < 0 {
            d[t].iter_mut().for_each(|x| *x = -*x);
            u[t].iter_mut().for_each(|x| *x = -*x);
        }
    }
    SmithForm { u, d, v }
}

/// Invariant factors of a matrix with two columns, from determinantal
/// divisors: `d1 = gcd(entries)`, `d1·d2 = gcd(2×2 minors)`. Entries only
/// ever get multiplied pairwise, so nothing grows.
pub fn invariant_factors_two_columns(a: &[Vec<i64>]) -> [i64; 2] {
    use num_integer::Integer;
    assert!(a.iter().all(|r| r.len() == 2), "expected two columns");
    let d1 = a.iter().flatten().fold(0i64, |g, &x| g.gcd(&x));
    let mut minors = 0i128;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let det = a[i][0] as i128 * a[j][1] as i128 - a[i][1] as i128 * a[j][0] as i128;
            minors = minors.gcd(&det);
        }
    }
    if d1 == 0 {
        return [0, 0];
    }
    let d2 = i64::try_from(minors / d1 as i128).expect("second invariant factor fits in i64");
    [d1, d2]
}

/// Row-style Hermite normal form: the nonzero rows of the unique echelon
/// basis of the row lattice, with positive pivots and entries above each
/// pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(rows: &[Vec<i64>]) -> IntMatrix {
    let mut h: IntMatrix = rows.to_vec();
    let cols = h.first().map_or(0, Vec::len);
    let mut r = 0;
    for j in 0..cols {
        if r == h.len() {
            break;
        }
        // Euclid down the column until one nonzero entry remains at row r
        loop {
            let nonzero: Vec<usize> = (r..h.len()).filter(|&i| h[i][j] != 0).collect();
            if nonzero.len() <= 1 {
                if let Some(&i) = nonzero.first() {
                    h.swap(r, i);
                }
                break;
            }
            let &p = nonzero
                .iter()
                .min_by_key(|&&i| h[i][j].unsigned_abs())
                .expect("nonempty");
            for &i in &nonzero {
                if i != p {
                    let q = h[i][j].div_euclid(h[p][j]);
                    row_axpy(&mut h, i, p, q);
                }
            }
        }
        if h[r][j] == 0 {
            continue;
        }
        if h[r][j] < 0 {
            for x in h[r].iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..r {
            let q = h[i][j].div_euclid(h[r][j]);
            row_axpy(&mut h, i, r, q);
        }
        r += 1;
    }
    h.truncate(r);
    h
}
