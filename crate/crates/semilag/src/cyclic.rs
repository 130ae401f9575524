//! Linear solver for periodic banded systems.
//!
//! The spline builders produce cyclic banded matrices: a band of half-widths
//! `(kl, ku)` plus a handful of wrap-around entries in the first and last few
//! rows. The band is factored by Gaussian elimination with partial pivoting;
//! the wrap entries are folded back in through the Sherman-Morrison-Woodbury
//! identity, so a solve costs O(n) after an O(n) setup.

use crate::error::{Error, Result};

/// Banded LU factorization with partial pivoting.
///
/// Row `i` stores columns `i - kl ..= i + ku + kl`; the extra `kl` slots on
/// the right take the fill-in created by row interchanges.
pub(crate) struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    /// Factors the matrix whose entry (i, j) is `entry(i, j)` for
    /// `|i - j| <= kl/ku`; everything outside the band is taken as zero.
    pub fn factor(
        n: usize,
        kl: usize,
        ku: usize,
        entry: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        assert!(n > kl + ku, "band wider than matrix");
        let width = 2 * kl + ku + 1;
        let mut data = vec![0.0; n * width];
        let slot = |i: usize, j: usize| i * width + (j + kl - i);
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            for j in lo..=hi {
                data[slot(i, j)] = entry(i, j);
            }
        }
        let mut ipiv = vec![0usize; n];
        for k in 0..n {
            // pivot among rows k ..= k + kl
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = data[slot(k, k)].abs();
            for i in (k + 1)..=last {
                let v = data[slot(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Numerical(format!(
                    "singular banded matrix at column {k}"
                )));
            }
            ipiv[k] = p;
            let hi = (k + ku + kl).min(n - 1);
            if p != k {
                for j in k..=hi {
                    data.swap(slot(k, j), slot(p, j));
                }
            }
            let piv = data[slot(k, k)];
            for i in (k + 1)..=last {
                let m = data[slot(i, k)] / piv;
                data[slot(i, k)] = m;
                for j in (k + 1)..=hi {
                    data[slot(i, j)] -= m * data[slot(k, j)];
                }
            }
        }
        Ok(Self {
            n,
            kl,
            ku,
            width,
            data,
            ipiv,
        })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let slot = |i: usize, j: usize| i * self.width + (j + self.kl - i);
        for k in 0..self.n {
            b.swap(k, self.ipiv[k]);
            let last = (k + self.kl).min(self.n - 1);
            for i in (k + 1)..=last {
                b[i] -= self.data[slot(i, k)] * b[k];
            }
        }
        for k in (0..self.n).rev() {
            let hi = (k + self.ku + self.kl).min(self.n - 1);
            let mut sum = b[k];
            for j in (k + 1)..=hi {
                sum -= self.data[slot(k, j)] * b[j];
            }
            b[k] = sum / self.data[slot(k, k)];
        }
    }
}

/// Cyclic banded solver: band plus wrap-around corner entries handled by a
/// low-rank Sherman-Morrison-Woodbury correction.
pub(crate) struct CyclicBandedSolver {
    lu: BandedLu,
    /// One entry per corner row r: the sparse row vector of wrap entries.
    corners: Vec<(usize, Vec<(usize, f64)>)>,
    /// Columns `B^{-1} e_r`, one per corner row.
    z: Vec<Vec<f64>>,
    /// Dense LU of the capacitance matrix `I + V Z` (r <= 4).
    cap: SmallLu,
}

impl CyclicBandedSolver {
    /// `band(i, j)` gives the in-band entries; `corner_entries` lists the
    /// wrap entries `(row, col, value)` lying outside the band.
    pub fn new(
        n: usize,
        kl: usize,
        ku: usize,
        band: impl Fn(usize, usize) -> f64,
        corner_entries: &[(usize, usize, f64)],
    ) -> Result<Self> {
        for &(i, j, _) in corner_entries {
            let in_band = (j as isize - i as isize) >= -(kl as isize)
                && (j as isize - i as isize) <= ku as isize;
            assert!(!in_band, "corner entry ({i}, {j}) lies inside the band");
        }
        let lu = BandedLu::factor(n, kl, ku, band)?;
        let mut corners: Vec<(usize, Vec<(usize, f64)>)> = Vec::new();
        for &(i, j, v) in corner_entries {
            match corners.iter_mut().find(|(r, _)| *r == i) {
                Some((_, row)) => row.push((j, v)),
                None => corners.push((i, vec![(j, v)])),
            }
        }
        corners.sort_by_key(|(r, _)| *r);
        let r = corners.len();
        let mut z = Vec::with_capacity(r);
        for (row, _) in &corners {
            let mut col = vec![0.0; n];
            col[*row] = 1.0;
            lu.solve_in_place(&mut col);
            z.push(col);
        }
        // capacitance I + V Z, where row j of V is the sparse corner row j
        let mut cap = vec![0.0; r * r];
        for (jj, (_, row)) in corners.iter().enumerate() {
            for (ll, zcol) in z.iter().enumerate() {
                let mut dot = 0.0;
                for &(c, v) in row {
                    dot += v * zcol[c];
                }
                cap[jj * r + ll] = dot + if jj == ll { 1.0 } else { 0.0 };
            }
        }
        let cap = SmallLu::factor(r, cap)?;
        Ok(Self {
            lu,
            corners,
            z,
            cap,
        })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        self.lu.solve_in_place(b);
        let r = self.corners.len();
        if r == 0 {
            return;
        }
        let mut t = vec![0.0; r];
        for (jj, (_, row)) in self.corners.iter().enumerate() {
            let mut dot = 0.0;
            for &(c, v) in row {
                dot += v * b[c];
            }
            t[jj] = dot;
        }
        self.cap.solve_in_place(&mut t);
        for (ll, zcol) in self.z.iter().enumerate() {
            let s = t[ll];
            if s != 0.0 {
                for (bi, zi) in b.iter_mut().zip(zcol) {
                    *bi -= s * zi;
                }
            }
        }
    }
}

/// Dense LU with partial pivoting for the tiny capacitance systems.
pub(crate) struct SmallLu {
    n: usize,
    data: Vec<f64>,
    ipiv: Vec<usize>,
}

impl SmallLu {
    pub fn factor(n: usize, mut data: Vec<f64>) -> Result<Self> {
        assert_eq!(data.len(), n * n);
        let mut ipiv = vec![0usize; n];
        for k in 0..n {
            let mut p = k;
            let mut best = data[k * n + k].abs();
            for i in (k + 1)..n {
                let v = data[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Numerical(
                    "singular periodic correction matrix".into(),
                ));
            }
            ipiv[k] = p;
            if p != k {
                for j in 0..n {
                    data.swap(k * n + j, p * n + j);
                }
            }
            let piv = data[k * n + k];
            for i in (k + 1)..n {
                let m = data[i * n + k] / piv;
                data[i * n + k] = m;
                for j in (k + 1)..n {
                    data[i * n + j] -= m * data[k * n + j];
                }
            }
        }
        Ok(Self { n, data, ipiv })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for k in 0..n {
            b.swap(k, self.ipiv[k]);
            for i in (k + 1)..n {
                b[i] -= self.data[i * n + k] * b[k];
            }
        }
        for k in (0..n).rev() {
            let mut sum = b[k];
            for j in (k + 1)..n {
                sum -= self.data[k * n + j] * b[j];
            }
            b[k] = sum / self.data[k * n + k];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Dense Gaussian elimination oracle.
    fn dense_solve(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut m = a.to_vec();
        let mut x = b.to_vec();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| {
                    m[i * n + k]
                        .abs()
                        .partial_cmp(&m[j * n + k].abs())
                        .unwrap()
                })
                .unwrap();
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
            for i in (k + 1)..n {
                let f = m[i * n + k] / m[k * n + k];
                for j in k..n {
                    m[i * n + j] -= f * m[k * n + j];
                }
                x[i] -= f * x[k];
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in (k + 1)..n {
                s -= m[k * n + j] * x[j];
            }
            x[k] = s / m[k * n + k];
        }
        x
    }

    #[test]
    fn banded_lu_matches_dense_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(n, kl, ku) in &[(5usize, 1usize, 1usize), (9, 2, 1), (12, 3, 3), (30, 3, 3)] {
            let mut dense = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    let d = j as isize - i as isize;
                    if d >= -(kl as isize) && d <= ku as isize {
                        dense[i * n + j] = rng.gen_range(-1.0..1.0)
                            + if i == j { 4.0 } else { 0.0 };
                    }
                }
            }
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lu = BandedLu::factor(n, kl, ku, |i, j| dense[i * n + j]).unwrap();
            let mut x = b.clone();
            lu.solve_in_place(&mut x);
            let want = dense_solve(n, &dense, &b);
            for (xi, wi) in x.iter().zip(&want) {
                assert!((xi - wi).abs() < 1e-11, "banded vs dense: {xi} vs {wi}");
            }
        }
    }

    #[test]
    fn banded_lu_pivots_when_diagonal_vanishes() {
        // zero diagonal forces interchanges
        let n = 6;
        let entry = |i: usize, j: usize| -> f64 {
            match j as isize - i as isize {
                -1 => 2.0,
                0 => 0.0,
                1 => 1.0,
                _ => 0.0,
            }
        };
        let mut dense = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if (j as isize - i as isize).abs() <= 1 {
                    dense[i * n + j] = entry(i, j);
                }
            }
        }
        let b: Vec<f64> = (1..=n).map(|v| v as f64).collect();
        let lu = BandedLu::factor(n, 1, 1, entry).unwrap();
        let mut x = b.clone();
        lu.solve_in_place(&mut x);
        let want = dense_solve(n, &dense, &b);
        for (xi, wi) in x.iter().zip(&want) {
            assert!((xi - wi).abs() < 1e-12);
        }
    }

    #[test]
    fn cyclic_solver_matches_dense_on_random_periodic_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for &(n, kl, ku) in &[(6usize, 1usize, 1usize), (10, 1, 1), (14, 3, 3), (24, 3, 3)] {
            let mut dense = vec![0.0; n * n];
            let mut corners = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let d = j as isize - i as isize;
                    if d >= -(kl as isize) && d <= ku as isize {
                        dense[i * n + j] =
                            rng.gen_range(-1.0..1.0) + if i == j { 5.0 } else { 0.0 };
                    }
                }
            }
            // wrap entries mimicking periodic stencils
            for k in 0..kl {
                let v: f64 = rng.gen_range(0.5..1.5);
                dense[k * n + (n - 1 - k)] = v;
                corners.push((k, n - 1 - k, v));
                let w: f64 = rng.gen_range(0.5..1.5);
                dense[(n - 1 - k) * n + k] = w;
                corners.push((n - 1 - k, k, w));
            }
            let band = |i: usize, j: usize| {
                let d = j as isize - i as isize;
                if d >= -(kl as isize) && d <= ku as isize {
                    dense[i * n + j]
                } else {
                    0.0
                }
            };
            let solver = CyclicBandedSolver::new(n, kl, ku, band, &corners).unwrap();
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut x = b.clone();
            solver.solve_in_place(&mut x);
            let want = dense_solve(n, &dense, &b);
            for (xi, wi) in x.iter().zip(&want) {
                assert!((xi - wi).abs() < 1e-10, "cyclic vs dense: {xi} vs {wi}");
            }
        }
    }
}
