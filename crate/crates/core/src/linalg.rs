//! Small direct solvers: tridiagonal, cyclic tridiagonal, bordered
//! tridiagonal and general banded LU with partial pivoting.

use crate::error::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

const PIVOT_FLOOR: f64 = 1e-300;

/// Thomas algorithm. `sub[0]` and `sup[n-1]` are ignored; `rhs` is
/// overwritten with the solution.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if sub.len() != n || sup.len() != n || rhs.len() != n {
        return Err(Error::InvalidInput("tridiagonal band lengths differ".into()));
    }
    if n == 0 {
        return Ok(());
    }
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    if beta.abs() < PIVOT_FLOOR {
        return Err(Error::Singular("tridiagonal pivot"));
    }
    rhs[0] /= beta;
    for i in 1..n {
        c[i - 1] = sup[i - 1] / beta;
        beta = diag[i] - sub[i] * c[i - 1];
        if beta.abs() < PIVOT_FLOOR {
            return Err(Error::Singular("tridiagonal pivot"));
        }
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    Ok(())
}

/// Periodic tridiagonal system: row `i` couples `i-1`, `i`, `i+1` modulo `n`.
/// Uses a Sherman–Morrison correction of the Thomas solve.
pub fn solve_cyclic_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n < 3 {
        return Err(Error::InvalidInput("cyclic system needs n >= 3".into()));
    }
    let alpha = sup[n - 1];
    let beta = sub[0];
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;
    solve_tridiagonal(sub, &d, sup, rhs)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    solve_tridiagonal(sub, &d, sup, &mut u)?;
    let fact = (rhs[0] + beta * rhs[n - 1] / gamma) / (1.0 + u[0] + beta * u[n - 1] / gamma);
    for i in 0..n {
        rhs[i] -= fact * u[i];
    }
    Ok(())
}

/// Tridiagonal matrix bordered by one extra row and column:
///
/// ```text
/// [ T   u ] [x]   [f]
/// [ vᵀ  d ] [λ] = [g]
/// ```
#[derive(Debug, Clone)]
pub struct BorderedTridiagonal {
    /// Sub-diagonal of `T`.
    pub sub: Vec<f64>,
    /// Diagonal of `T`.
    pub diag: Vec<f64>,
    /// Super-diagonal of `T`.
    pub sup: Vec<f64>,
    /// Border column `u`.
    pub col: Vec<f64>,
    /// Border row `v`.
    pub row: Vec<f64>,
    /// Corner entry `d`.
    pub corner: f64,
}

impl BorderedTridiagonal {
    /// Solves for `(x, λ)` by block elimination.
    pub fn solve(&self, f: &[f64], g: f64) -> Result<(Vec<f64>, f64)> {
        let mut x0 = f.to_vec();
        solve_tridiagonal(&self.sub, &self.diag, &self.sup, &mut x0)?;
        let mut w = self.col.clone();
        solve_tridiagonal(&self.sub, &self.diag, &self.sup, &mut w)?;
        let schur = self.corner - dot(&self.row, &w);
        let scale = self.corner.abs() + dot_abs(&self.row, &w);
        if schur.abs() <= 1e-14 * scale.max(PIVOT_FLOOR) {
            return Err(Error::Singular("bordered Schur complement"));
        }
        let lambda = (g - dot(&self.row, &x0)) / schur;
        for (xi, wi) in x0.iter_mut().zip(&w) {
            *xi -= lambda * wi;
        }
        Ok((x0, lambda))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x * y).abs()).sum()
}

/// Square banded matrix with `kl` sub- and `ku` super-diagonals, stored
/// row-wise with room for pivoting fill-in.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    /// Zero matrix.
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Clears all entries.
    pub fn clear(&mut self) {
        self.data.iter_mut().for_each(|v| *v = 0.0);
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width + (j + self.kl - i)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku + self.kl {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Adds `v` to entry `(i, j)`, which must lie inside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i},{j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            *yi = (lo..=hi).map(|j| self.get(i, j) * x[j]).sum();
        }
        y
    }

    /// In-place LU factorisation with partial pivoting.
    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let last_col = (k + self.ku + self.kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last_row {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best < PIVOT_FLOOR {
                return Err(Error::Singular("band LU pivot"));
            }
            piv[k] = p;
            if p != k {
                for j in k..=last_col {
                    let a = self.idx(k, j);
                    let b = self.idx(p, j);
                    self.data.swap(a, b);
                }
            }
            let akk = self.data[self.idx(k, k)];
            for i in k + 1..=last_row {
                let ik = self.idx(i, k);
                let l = self.data[ik] / akk;
                self.data[ik] = l;
                if l != 0.0 {
                    for j in k + 1..=last_col {
                        let kj = self.data[self.idx(k, j)];
                        let ij = self.idx(i, j);
                        self.data[ij] -= l * kj;
                    }
                }
            }
        }
        Ok(BandLu { a: self, piv })
    }
}

/// Factorised band matrix.
#[derive(Debug, Clone)]
pub struct BandLu {
    a: BandMatrix,
    piv: Vec<usize>,
}

impl BandLu {
    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let a = &self.a;
        let n = a.n;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + a.kl).min(n - 1) {
                b[i] -= a.data[a.idx(i, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + a.ku + a.kl).min(n - 1) {
                s -= a.data[a.idx(k, j)] * b[j];
            }
            b[k] = s / a.data[a.idx(k, k)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    #[test]
    fn thomas_matches_dense() {
        let n = 40;
        let mut s = 7u64;
        let sub: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
        let sup: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
        let diag: Vec<f64> = (0..n).map(|_| 3.0 + lcg(&mut s)).collect();
        let f: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag[i];
            if i > 0 {
                m[(i, i - 1)] = sub[i];
            }
            if i + 1 < n {
                m[(i, i + 1)] = sup[i];
            }
        }
        let want = m.lu().solve(&DVector::from_vec(f.clone())).unwrap();
        let mut x = f;
        solve_tridiagonal(&sub, &diag, &sup, &mut x).unwrap();
        for i in 0..n {
            assert!((x[i] - want[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn cyclic_matches_dense() {
        let n = 17;
        let mut s = 3u64;
        let sub: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
        let sup: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
        let diag: Vec<f64> = (0..n).map(|_| 4.0 + lcg(&mut s)).collect();
        let f: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag[i];
            m[(i, (i + n - 1) % n)] = sub[i];
            m[(i, (i + 1) % n)] = sup[i];
        }
        let want = m.lu().solve(&DVector::from_vec(f.clone())).unwrap();
        let mut x = f;
        solve_cyclic_tridiagonal(&sub, &diag, &sup, &mut x).unwrap();
        for i in 0..n {
            assert!((x[i] - want[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn band_lu_matches_dense_with_pivoting() {
        let n = 30;
        let (kl, ku) = (3, 3);
        let mut s = 11u64;
        let mut band = BandMatrix::zeros(n, kl, ku);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                // weak diagonal forces row exchanges
                let v = lcg(&mut s) + if i == j { 0.01 } else { 0.0 };
                band.add(i, j, v);
                m[(i, j)] = v;
            }
        }
        let f: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
        let want = m.lu().solve(&DVector::from_vec(f.clone())).unwrap();
        let prod = band.mul_vec(&want.as_slice());
        let mut x = f.clone();
        band.factor().unwrap().solve(&mut x);
        for i in 0..n {
            assert!((x[i] - want[i]).abs() < 1e-9 * (1.0 + want[i].abs()));
            assert!((prod[i] - f[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn bordered_matches_dense() {
        let n = 25;
        let mut s = 5u64;
        let sub: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
        let sup: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
        let diag: Vec<f64> = (0..n).map(|_| 3.0 + lcg(&mut s)).collect();
        let col: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
        let row: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
        let sys = BorderedTridiagonal { sub, diag, sup, col, row, corner: 0.3 };
        let f: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
        let (x, lam) = sys.solve(&f, 0.7).unwrap();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            m[(i, i)] = sys.diag[i];
            if i > 0 {
                m[(i, i - 1)] = sys.sub[i];
            }
            if i + 1 < n {
                m[(i, i + 1)] = sys.sup[i];
            }
            m[(i, n)] = sys.col[i];
            m[(n, i)] = sys.row[i];
        }
        m[(n, n)] = 0.3;
        let mut rhs = f.clone();
        rhs.push(0.7);
        let want = m.lu().solve(&DVector::from_vec(rhs)).unwrap();
        for i in 0..n {
            assert!((x[i] - want[i]).abs() < 1e-11);
        }
        assert!((lam - want[n]).abs() < 1e-11);
    }
}
