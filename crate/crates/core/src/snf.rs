//! Smith normal form over Z and over the truncated local rings Z/l^n Z,
//! with transform accumulators and the linear-system solvers built on it.
//!
//! The factorization convention is `a = u * s * v` (exactly over Z, as a
//! congruence mod l^n in local mode), with `u`, `v` square and invertible and
//! `s` diagonal satisfying the divisibility chain. In local mode each diagonal
//! entry is normalized to an exact power of l, with 0 standing for l^n.

use crate::matrix::IntMatrix;
use crate::ring::LocalRing;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SnfMode {
    Integer,
    Local { ring: LocalRing, level: u32 },
}

#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

struct Work {
    s: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
    mode: SnfMode,
}

impl Work {
    fn new(a: &IntMatrix, mode: SnfMode) -> Self {
        let s = match &mode {
            SnfMode::Integer => a.clone(),
            SnfMode::Local { ring, level } => a.reduce_mod(&ring.modulus(*level)),
        };
        Work {
            u: IntMatrix::identity(a.rows()),
            u_inv: IntMatrix::identity(a.rows()),
            v: IntMatrix::identity(a.cols()),
            v_inv: IntMatrix::identity(a.cols()),
            s,
            mode,
        }
    }

    fn canon(&self, x: BigInt) -> BigInt {
        match &self.mode {
            SnfMode::Integer => x,
            SnfMode::Local { ring, level } => {
                let m = ring.modulus_int(*level);
                let mut r = x % &m;
                if r.is_negative() {
                    r += &m;
                }
                r
            }
        }
    }

    // S <- E S with E = swap(i,j): U <- U E, Uinv <- E Uinv.
    fn row_swap(&mut self, i: usize, j: usize) {
        self.s.swap_rows(i, j);
        self.u.swap_cols(i, j);
        self.u_inv.swap_rows(i, j);
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        self.s.swap_cols(i, j);
        self.v.swap_rows(i, j);
        self.v_inv.swap_cols(i, j);
    }

    // row i += c * row j on S; U col j -= c * col i; Uinv row i += c * row j.
    fn row_addmul(&mut self, i: usize, j: usize, c: &BigInt) {
        debug_assert_ne!(i, j);
        for k in 0..self.s.cols() {
            let t = self.canon(&self.s[(i, k)] + c * &self.s[(j, k)]);
            self.s[(i, k)] = t;
        }
        for k in 0..self.u.rows() {
            let t = self.canon(&self.u[(k, j)] - c * &self.u[(k, i)]);
            self.u[(k, j)] = t;
        }
        for k in 0..self.u_inv.cols() {
            let t = self.canon(&self.u_inv[(i, k)] + c * &self.u_inv[(j, k)]);
            self.u_inv[(i, k)] = t;
        }
    }

    // col i += c * col j on S; V row j -= c * row i; Vinv col i += c * col j.
    fn col_addmul(&mut self, i: usize, j: usize, c: &BigInt) {
        debug_assert_ne!(i, j);
        for k in 0..self.s.rows() {
            let t = self.canon(&self.s[(k, i)] + c * &self.s[(k, j)]);
            self.s[(k, i)] = t;
        }
        for k in 0..self.v.cols() {
            let t = self.canon(&self.v[(j, k)] - c * &self.v[(i, k)]);
            self.v[(j, k)] = t;
        }
        for k in 0..self.v_inv.rows() {
            let t = self.canon(&self.v_inv[(k, i)] + c * &self.v_inv[(k, j)]);
            self.v_inv[(k, i)] = t;
        }
    }

    // row i *= c for a unit c (inverse ci); U col i *= ci; Uinv row i *= c.
    fn row_scale(&mut self, i: usize, c: &BigInt, ci: &BigInt) {
        for k in 0..self.s.cols() {
            let t = self.canon(&self.s[(i, k)] * c);
            self.s[(i, k)] = t;
        }
        for k in 0..self.u.rows() {
            let t = self.canon(&self.u[(k, i)] * ci);
            self.u[(k, i)] = t;
        }
        for k in 0..self.u_inv.cols() {
            let t = self.canon(&self.u_inv[(i, k)] * c);
            self.u_inv[(i, k)] = t;
        }
    }

    // rows (i, j) <- [[a11, a12], [a21, a22]] * rows (i, j), det = 1.
    fn row_combine(&mut self, i: usize, j: usize, m: [&BigInt; 4]) {
        let [a11, a12, a21, a22] = m;
        debug_assert!((a11 * a22 - a12 * a21).is_one());
        for k in 0..self.s.cols() {
            let ri = self.canon(a11 * &self.s[(i, k)] + a12 * &self.s[(j, k)]);
            let rj = self.canon(a21 * &self.s[(i, k)] + a22 * &self.s[(j, k)]);
            self.s[(i, k)] = ri;
            self.s[(j, k)] = rj;
        }
        // U <- U E^-1, E^-1 = [[a22, -a12], [-a21, a11]]
        for k in 0..self.u.rows() {
            let ci = self.canon(&self.u[(k, i)] * a22 - &self.u[(k, j)] * a21);
            let cj = self.canon(-(&self.u[(k, i)] * a12) + &self.u[(k, j)] * a11);
            self.u[(k, i)] = ci;
            self.u[(k, j)] = cj;
        }
        for k in 0..self.u_inv.cols() {
            let ri = self.canon(a11 * &self.u_inv[(i, k)] + a12 * &self.u_inv[(j, k)]);
            let rj = self.canon(a21 * &self.u_inv[(i, k)] + a22 * &self.u_inv[(j, k)]);
            self.u_inv[(i, k)] = ri;
            self.u_inv[(j, k)] = rj;
        }
    }

    // cols (i, j) <- cols (i, j) * [[b11, b12], [b21, b22]]^T-style: new col i
    // = b11 ci + b21 cj, new col j = b12 ci + b22 cj; det = 1.
    fn col_combine(&mut self, i: usize, j: usize, m: [&BigInt; 4]) {
        let [b11, b12, b21, b22] = m;
        debug_assert!((b11 * b22 - b12 * b21).is_one());
        for k in 0..self.s.rows() {
            let ci = self.canon(&self.s[(k, i)] * b11 + &self.s[(k, j)] * b21);
            let cj = self.canon(&self.s[(k, i)] * b12 + &self.s[(k, j)] * b22);
            self.s[(k, i)] = ci;
            self.s[(k, j)] = cj;
        }
        // V <- F^-1 V, F^-1 = [[b22, -b12], [-b21, b11]]
        for k in 0..self.v.cols() {
            let ri = self.canon(&self.v[(i, k)] * b22 - &self.v[(j, k)] * b12);
            let rj = self.canon(-(&self.v[(i, k)] * b21) + &self.v[(j, k)] * b11);
            self.v[(i, k)] = ri;
            self.v[(j, k)] = rj;
        }
        for k in 0..self.v_inv.rows() {
            let ci = self.canon(&self.v_inv[(k, i)] * b11 + &self.v_inv[(k, j)] * b21);
            let cj = self.canon(&self.v_inv[(k, i)] * b12 + &self.v_inv[(k, j)] * b22);
            self.v_inv[(k, i)] = ci;
            self.v_inv[(k, j)] = cj;
        }
    }
}

/// Smith normal form of `a` in the given mode.
pub fn snf(a: &IntMatrix, mode: &SnfMode) -> Snf {
    let mut w = Work::new(a, mode.clone());
    match mode {
        SnfMode::Integer => reduce_integer(&mut w),
        SnfMode::Local { ring, level } => reduce_local(&mut w, *ring, *level),
    }
    Snf {
        u: w.u,
        s: w.s,
        v: w.v,
        u_inv: w.u_inv,
        v_inv: w.v_inv,
    }
}

fn reduce_integer(w: &mut Work) {
    let (rows, cols) = (w.s.rows(), w.s.cols());
    let mut t = 0usize;
    while t < rows && t < cols {
        // pivot: minimal absolute value, topmost-then-leftmost
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !w.s[(i, j)].is_zero()
                    && pivot.is_none_or(|p| w.s[(i, j)].magnitude() < w.s[p].magnitude())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        w.row_swap(t, pi);
        w.col_swap(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !w.s[(i, t)].is_zero() {
                    gcd_row_step(w, t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if !w.s[(t, j)].is_zero() {
                    gcd_col_step(w, t, j);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        t += 1;
    }
    // nonnegative diagonal
    for i in 0..rows.min(cols) {
        if w.s[(i, i)].is_negative() {
            let m1 = BigInt::from(-1);
            w.row_scale(i, &m1, &m1);
        }
    }
    // divisibility chain
    let r = (0..rows.min(cols))
        .take_while(|&i| !w.s[(i, i)].is_zero())
        .count();
    loop {
        let mut fixed = true;
        for i in 0..r.saturating_sub(1) {
            let (a, b) = (w.s[(i, i)].clone(), w.s[(i + 1, i + 1)].clone());
            if (&b % &a).is_zero() {
                continue;
            }
            fixed = false;
            // bring the second entry into column i, then re-eliminate
            let one = BigInt::one();
            w.col_addmul(i, i + 1, &one);
            loop {
                let mut dirty = false;
                if !w.s[(i + 1, i)].is_zero() {
                    gcd_row_step(w, i, i + 1);
                    dirty = true;
                }
                if !w.s[(i, i + 1)].is_zero() {
                    gcd_col_step(w, i, i + 1);
                    dirty = true;
                }
                if !dirty {
                    break;
                }
            }
            if w.s[(i, i)].is_negative() {
                let m1 = BigInt::from(-1);
                w.row_scale(i, &m1, &m1);
            }
            if w.s[(i + 1, i + 1)].is_negative() {
                let m1 = BigInt::from(-1);
                w.row_scale(i + 1, &m1, &m1);
            }
        }
        if fixed {
            break;
        }
    }
}

// Bezout data with g > 0; when x already divides y the combination must
// leave the pivot row alone (coefficients (sgn x, 0)), otherwise clearing
// never terminates.
fn gcdx(x: &BigInt, y: &BigInt) -> (BigInt, BigInt, BigInt) {
    if !x.is_zero() && (y % x).is_zero() {
        let sign = BigInt::from(if x.is_negative() { -1 } else { 1 });
        return (x.abs(), sign, BigInt::zero());
    }
    let e = x.extended_gcd(y);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

// zero out s[i][t] against the pivot s[t][t] with a det-1 row combination
fn gcd_row_step(w: &mut Work, t: usize, i: usize) {
    let x = w.s[(t, t)].clone();
    let y = w.s[(i, t)].clone();
    let (g, cx, cy) = gcdx(&x, &y);
    let (a, b) = (&x / &g, &y / &g);
    w.row_combine(t, i, [&cx, &cy, &-b, &a]);
}

fn gcd_col_step(w: &mut Work, t: usize, j: usize) {
    let x = w.s[(t, t)].clone();
    let y = w.s[(t, j)].clone();
    let (g, cx, cy) = gcdx(&x, &y);
    let (a, b) = (&x / &g, &y / &g);
    w.col_combine(t, j, [&cx, &-b, &cy, &a]);
}

fn reduce_local(w: &mut Work, ring: LocalRing, level: u32) {
    let (rows, cols) = (w.s.rows(), w.s.cols());
    let prime = BigInt::from(ring.prime());
    let mut t = 0usize;
    while t < rows && t < cols {
        // pivot: minimal l-valuation, topmost-then-leftmost
        let mut pivot: Option<(usize, usize, u32)> = None;
        for i in t..rows {
            for j in t..cols {
                let val = ring.valuation_capped(&w.s[(i, j)], level);
                if val.exact && pivot.is_none_or(|p| val.value < p.2) {
                    pivot = Some((i, j, val.value));
                }
            }
        }
        let Some((pi, pj, e)) = pivot else { break };
        w.row_swap(t, pi);
        w.col_swap(t, pj);
        // normalize pivot to exactly l^e
        let shift = ring.modulus_int(e);
        let unit = &w.s[(t, t)] / &shift;
        let unit_inv = BigInt::from(ring.invert_mod(&unit, level).expect("unit cofactor"));
        w.row_scale(t, &unit_inv, &unit);
        debug_assert_eq!(w.s[(t, t)], shift);
        // the pivot divides every remaining entry: single-pass clearing
        for i in 0..rows {
            if i != t && !w.s[(i, t)].is_zero() {
                let q = -(&w.s[(i, t)] / &shift);
                w.row_addmul(i, t, &q);
            }
        }
        for j in 0..cols {
            if j != t && !w.s[(t, j)].is_zero() {
                let q = -(&w.s[(t, j)] / &shift);
                w.col_addmul(j, t, &q);
            }
        }
        let _ = &prime;
        t += 1;
    }
}

/// Basis of the integer kernel of `a` (columns).
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let f = snf(a, &SnfMode::Integer);
    let r = f.rank();
    let keep: Vec<usize> = (r..a.cols()).collect();
    f.v_inv.select_cols(&keep)
}

/// One solution of `a x = b` over Z for each column of `b`, if solvable.
pub fn solve(a: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(a.rows(), b.rows());
    let f = snf(a, &SnfMode::Integer);
    let y = f.u_inv.mul(b);
    let diag = f.diagonal();
    let mut wcols: Vec<Vec<BigInt>> = Vec::with_capacity(b.cols());
    for c in 0..b.cols() {
        let mut w = vec![BigInt::zero(); a.cols()];
        for i in 0..a.rows() {
            let yi = &y[(i, c)];
            let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
            if d.is_zero() {
                if !yi.is_zero() {
                    return None;
                }
            } else {
                if !(yi % &d).is_zero() {
                    return None;
                }
                w[i] = yi / &d;
            }
        }
        wcols.push(w);
    }
    let wm = IntMatrix::from_cols(a.cols(), wcols);
    Some(f.v_inv.mul(&wm))
}

/// One solution of `a x = b (mod l^level)` per column of `b`, if solvable.
pub fn solve_mod(a: &IntMatrix, b: &IntMatrix, ring: LocalRing, level: u32) -> Option<IntMatrix> {
    let m = ring.modulus_int(level);
    let pad = IntMatrix::from_fn(a.rows(), a.rows(), |i, j| {
        if i == j {
            m.clone()
        } else {
            BigInt::zero()
        }
    });
    let ext = a.hstack(&pad);
    let x = solve(&ext, b)?;
    Some(
        IntMatrix::from_fn(a.cols(), b.cols(), |i, j| x[(i, j)].clone())
            .reduce_mod(&ring.modulus(level)),
    )
}

/// Check `u * s * v = a`, exactly or as a congruence.
pub fn verify_factorization(a: &IntMatrix, f: &Snf, mode: &SnfMode) -> bool {
    let prod = f.u.mul(&f.s).mul(&f.v);
    match mode {
        SnfMode::Integer => prod == *a,
        SnfMode::Local { ring, level } => {
            let m = ring.modulus(*level);
            prod.reduce_mod(&m) == a.reduce_mod(&m)
        }
    }
}
