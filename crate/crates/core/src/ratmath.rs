//! Exact arbitrary-precision rational arithmetic and integer linear algebra.
//!
//! Everything downstream (cones, slices, counting, fitting) is built on the
//! types here. All results are exact; floating point never enters this module.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use std::fmt;

pub type Int = BigInt;
pub type Rat = BigRational;
pub type IntVec = Vec<Int>;
pub type RatVec = Vec<Rat>;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(int(n), int(d))
}

pub fn rat_int(n: &Int) -> Rat {
    Rat::from_integer(n.clone())
}

pub fn ivec(xs: &[i64]) -> IntVec {
    xs.iter().map(|&x| int(x)).collect()
}

pub fn rvec(v: &[Int]) -> RatVec {
    v.iter().map(rat_int).collect()
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_ri(a: &[Rat], b: &[Int]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * rat_int(y)).sum()
}

pub fn dot_rr(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// gcd of all entries; 0 for the zero vector.
pub fn content(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |g, x| g.gcd(x))
}

/// Divide out the content, keeping the direction. Zero vectors stay zero.
pub fn primitive(v: &[Int]) -> IntVec {
    let g = content(v);
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

pub fn is_primitive(v: &[Int]) -> bool {
    content(v).is_one()
}

pub fn lcm_int(a: &Int, b: &Int) -> Int {
    a.lcm(b)
}

/// Clear denominators of a rational vector, returning a primitive integer
/// vector with the same direction.
pub fn primitive_from_rat(v: &[Rat]) -> IntVec {
    let mut den = Int::one();
    for x in v {
        den = den.lcm(x.denom());
    }
    let ints: IntVec = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    primitive(&ints)
}

/// Render in lowest terms as "p/q", or "p" when integral.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: Int = p.trim().parse().ok()?;
            let q: Int = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rat::new(p, q))
        }
        None => {
            let p: Int = s.trim().parse().ok()?;
            Some(Rat::from_integer(p))
        }
    }
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Int>,
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Int::one();
        }
        m
    }

    pub fn from_rows(rows: &[IntVec]) -> Self {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMat {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().cloned()).collect(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> IntVec {
        self.row(i).to_vec()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.at(k, j);
                    *out.at_mut(i, j) += add;
                }
            }
        }
        out
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data
                .swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.at(i, j).clone();
            *self.at_mut(i, j) = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.at(i, j).clone();
            *self.at_mut(i, j) = v;
        }
    }

    /// row_i += c * row_k
    pub fn row_axpy(&mut self, i: usize, k: usize, c: &Int) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let add = c * self.at(k, j);
            *self.at_mut(i, j) += add;
        }
    }

    /// col_j += c * col_k
    pub fn col_axpy(&mut self, j: usize, k: usize, c: &Int) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let add = c * self.at(i, k);
            *self.at_mut(i, j) += add;
        }
    }

    /// Simultaneous unimodular update of two rows:
    /// (row_a, row_b) <- (p*row_a + q*row_b, r*row_a + s*row_b), ps - qr = ±1.
    pub fn combine_rows(&mut self, a: usize, b: usize, p: &Int, q: &Int, r: &Int, s: &Int) {
        for j in 0..self.cols {
            let va = self.at(a, j).clone();
            let vb = self.at(b, j).clone();
            *self.at_mut(a, j) = p * &va + q * &vb;
            *self.at_mut(b, j) = r * &va + s * &vb;
        }
    }

    pub fn combine_cols(&mut self, a: usize, b: usize, p: &Int, q: &Int, r: &Int, s: &Int) {
        for i in 0..self.rows {
            let va = self.at(i, a).clone();
            let vb = self.at(i, b).clone();
            *self.at_mut(i, a) = p * &va + q * &vb;
            *self.at_mut(i, b) = r * &va + s * &vb;
        }
    }

    /// Exact determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut m: Vec<IntVec> = (0..n).map(|i| self.row_vec(i)).collect();
        let mut sign = 1i32;
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                    return Int::zero();
                };
                m.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                    m[i][j] = v;
                }
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }
}

/// Row-style Hermite normal form. Returns (H, U) with U unimodular and
/// U*A = H. H is in lower-triangular echelon shape: the pivot is the last
/// nonzero entry of its row, pivot columns strictly increase down the rows,
/// pivots are positive, entries below each pivot are reduced into [0, pivot),
/// and zero rows (if any) sit at the bottom.
pub fn hnf(a: &IntMat) -> (IntMat, IntMat) {
    let m = a.rows;
    let n = a.cols;
    let mut h = a.clone();
    let mut u = IntMat::identity(m);
    let mut r: isize = m as isize - 1;
    for j in (0..n).rev() {
        if r < 0 {
            break;
        }
        let ru = r as usize;
        let Some(p) = (0..=ru).rev().find(|&i| !h.at(i, j).is_zero()) else {
            continue;
        };
        h.swap_rows(p, ru);
        u.swap_rows(p, ru);
        for i in 0..ru {
            if h.at(i, j).is_zero() {
                continue;
            }
            let aa = h.at(ru, j).clone();
            let bb = h.at(i, j).clone();
            let eg = aa.extended_gcd(&bb);
            let ca = &aa / &eg.gcd;
            let cb = &bb / &eg.gcd;
            // [[x, y], [-cb, ca]] has determinant (x*aa + y*bb)/g = 1
            h.combine_rows(ru, i, &eg.x, &eg.y, &(-cb.clone()), &ca);
            u.combine_rows(ru, i, &eg.x, &eg.y, &(-cb), &ca);
        }
        if h.at(ru, j).is_negative() {
            h.negate_row(ru);
            u.negate_row(ru);
        }
        for i in ru + 1..m {
            let q = h.at(i, j).div_floor(h.at(ru, j));
            if !q.is_zero() {
                h.row_axpy(i, ru, &-q.clone());
                u.row_axpy(i, ru, &-q);
            }
        }
        r -= 1;
    }
    let zero_cnt = (r + 1).max(0) as usize;
    if zero_cnt > 0 {
        let order: Vec<usize> = (zero_cnt..m).chain(0..zero_cnt).collect();
        h = permute_rows(&h, &order);
        u = permute_rows(&u, &order);
    }
    (h, u)
}

fn permute_rows(m: &IntMat, order: &[usize]) -> IntMat {
    let rows: Vec<IntVec> = order.iter().map(|&i| m.row_vec(i)).collect();
    IntMat::from_rows(&rows)
}

/// Basis of the left kernel {x : x*A = 0}, as rows. The basis is a saturated
/// lattice basis (it comes from the unimodular transform of the HNF).
pub fn left_kernel_basis(a: &IntMat) -> Vec<IntVec> {
    let (h, u) = hnf(a);
    let mut out = Vec::new();
    for i in 0..h.rows {
        if h.row(i).iter().all(|x| x.is_zero()) {
            out.push(u.row_vec(i));
        }
    }
    out
}

/// Smith normal form. Returns (S, U, V) with U, V unimodular and
/// U*A*V = S diagonal, diagonal entries nonnegative with d1 | d2 | ...
pub fn snf(a: &IntMat) -> (IntMat, IntMat, IntMat) {
    let m = a.rows;
    let n = a.cols;
    let mut s = a.clone();
    let mut u = IntMat::identity(m);
    let mut v = IntMat::identity(n);

    fn clear_cross(s: &mut IntMat, u: &mut IntMat, v: &mut IntMat, k: usize) {
        let (m, n) = (s.rows, s.cols);
        loop {
            for i in k + 1..m {
                if s.at(i, k).is_zero() {
                    continue;
                }
                let aa = s.at(k, k).clone();
                let bb = s.at(i, k).clone();
                if (&bb % &aa).is_zero() {
                    let q = &bb / &aa;
                    s.row_axpy(i, k, &-q.clone());
                    u.row_axpy(i, k, &-q);
                } else {
                    let eg = aa.extended_gcd(&bb);
                    let ca = &aa / &eg.gcd;
                    let cb = &bb / &eg.gcd;
                    s.combine_rows(k, i, &eg.x, &eg.y, &(-cb.clone()), &ca);
                    u.combine_rows(k, i, &eg.x, &eg.y, &(-cb), &ca);
                }
            }
            for j in k + 1..n {
                if s.at(k, j).is_zero() {
                    continue;
                }
                let aa = s.at(k, k).clone();
                let bb = s.at(k, j).clone();
                if (&bb % &aa).is_zero() {
                    let q = &bb / &aa;
                    s.col_axpy(j, k, &-q.clone());
                    v.col_axpy(j, k, &-q);
                } else {
                    let eg = aa.extended_gcd(&bb);
                    let ca = &aa / &eg.gcd;
                    let cb = &bb / &eg.gcd;
                    s.combine_cols(k, j, &eg.x, &eg.y, &(-cb.clone()), &ca);
                    v.combine_cols(k, j, &eg.x, &eg.y, &(-cb), &ca);
                }
            }
            let col_clear = (k + 1..m).all(|i| s.at(i, k).is_zero());
            let row_clear = (k + 1..n).all(|j| s.at(k, j).is_zero());
            if col_clear && row_clear {
                return;
            }
        }
    }

    for k in 0..m.min(n) {
        let mut pivot = None;
        'scan: for i in k..m {
            for j in k..n {
                if !s.at(i, j).is_zero() {
                    pivot = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        s.swap_rows(pi, k);
        u.swap_rows(pi, k);
        s.swap_cols(pj, k);
        v.swap_cols(pj, k);
        loop {
            clear_cross(&mut s, &mut u, &mut v, k);
            // pivot must divide the whole trailing block
            let offender = (k + 1..m)
                .flat_map(|i| (k + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !(s.at(i, j) % s.at(k, k)).is_zero());
            match offender {
                None => break,
                Some((i, _)) => {
                    s.row_axpy(k, i, &Int::one());
                    u.row_axpy(k, i, &Int::one());
                }
            }
        }
        if s.at(k, k).is_negative() {
            s.negate_row(k);
            u.negate_row(k);
        }
    }
    (s, u, v)
}

/// Rank over the rationals.
pub fn rank(a: &IntMat) -> usize {
    let mut m: Vec<RatVec> = (0..a.rows).map(|i| rvec(a.row(i))).collect();
    rank_rows(&mut m, a.cols)
}

fn rank_rows(m: &mut [RatVec], cols: usize) -> usize {
    let mut r = 0;
    for j in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][j].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][j].clone();
        for i in 0..m.len() {
            if i == r || m[i][j].is_zero() {
                continue;
            }
            let f = &m[i][j] / &pivot;
            for t in j..cols {
                let sub = &f * &m[r][t];
                m[i][t] -= sub;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

#[derive(Clone, Debug)]
pub struct LinearSolution {
    pub x: RatVec,
    pub unique: bool,
}

/// Solve A*x = b over the rationals. Returns None when the system is
/// inconsistent. When the solution space is positive-dimensional, the free
/// variables are set to zero and `unique` is false.
pub fn solve_rational(a: &IntMat, b: &[Rat]) -> Option<LinearSolution> {
    assert_eq!(a.rows, b.len());
    let n = a.cols;
    let mut aug: Vec<RatVec> = (0..a.rows)
        .map(|i| {
            let mut r = rvec(a.row(i));
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for j in 0..n {
        let Some(p) = (r..aug.len()).find(|&i| !aug[i][j].is_zero()) else {
            continue;
        };
        aug.swap(r, p);
        let pivot = aug[r][j].clone();
        for t in j..=n {
            let v = &aug[r][t] / &pivot;
            aug[r][t] = v;
        }
        for i in 0..aug.len() {
            if i == r || aug[i][j].is_zero() {
                continue;
            }
            let f = aug[i][j].clone();
            for t in j..=n {
                let sub = &f * &aug[r][t];
                aug[i][t] -= sub;
            }
        }
        pivot_cols.push(j);
        r += 1;
        if r == aug.len() {
            break;
        }
    }
    // inconsistency: a zero row with nonzero rhs
    for i in r..aug.len() {
        if !aug[i][n].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); n];
    for (row, &col) in pivot_cols.iter().enumerate() {
        x[col] = aug[row][n].clone();
    }
    Some(LinearSolution {
        x,
        unique: pivot_cols.len() == n,
    })
}

/// Find x with w·x = 1, which exists exactly when content(w) = 1.
pub fn bezout_one(w: &[Int]) -> Option<IntVec> {
    let mut g = Int::zero();
    let mut coeffs: IntVec = vec![Int::zero(); w.len()];
    for (i, wi) in w.iter().enumerate() {
        if wi.is_zero() {
            continue;
        }
        if g.is_zero() {
            // first nonzero entry: g = |wi|, coefficient ±1
            coeffs[i] = if wi.is_negative() {
                -Int::one()
            } else {
                Int::one()
            };
            g = wi.abs();
            continue;
        }
        let eg = g.extended_gcd(wi);
        for c in coeffs.iter_mut() {
            *c *= &eg.x;
        }
        coeffs[i] = eg.y;
        g = eg.gcd;
        if g.is_one() {
            break;
        }
    }
    if g.is_one() {
        debug_assert!(dot(w, &coeffs).is_one());
        Some(coeffs)
    } else {
        None
    }
}
