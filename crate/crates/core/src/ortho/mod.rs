//! Orthogonal-transform scheme: Haar-random rotations as the keyed
//! transform, its one-dimensional sign-change special case, and the
//! per-subchannel vector extension.

mod haar;
mod scheme;

pub use haar::{haar_invariance_test, HaarReport};
pub use scheme::{OrthogonalScheme, SignChangeScheme};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::codebook::{Codebook, CodebookError, EntrySampler, StorageMode, DEFAULT_MEMORY_BUDGET};
use crate::models::KeyedRng;
use crate::permute::Permutation;
use crate::tol;

/// Dense row-major n×n orthogonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalMatrix {
    n: usize,
    data: Vec<f64>,
}

impl OrthogonalMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        OrthogonalMatrix { n, data }
    }

    /// The 0/1 matrix with `(Ψs)_t = s[σ_t]`.
    pub fn from_permutation(p: &Permutation) -> Self {
        let n = p.len();
        let mut data = vec![0.0; n * n];
        for (t, &s) in p.forward().iter().enumerate() {
            data[t * n + s] = 1.0;
        }
        OrthogonalMatrix { n, data }
    }

    /// Haar-distributed draw: modified Gram–Schmidt (two passes) on the
    /// columns of an i.i.d. N(0, 1) matrix. Draws with a pivot below
    /// [`tol::PIVOT`] are discarded and redrawn.
    pub fn haar(n: usize, rng: &mut KeyedRng) -> Result<Self, CodebookError> {
        let mut cols = vec![0.0; n * n];
        'attempt: for _ in 0..tol::MAX_RESAMPLES {
            for x in cols.iter_mut() {
                *x = StandardNormal.sample(rng);
            }
            for j in 0..n {
                let (done, rest) = cols.split_at_mut(j * n);
                let v = &mut rest[..n];
                for _pass in 0..2 {
                    for i in 0..j {
                        let q = &done[i * n..(i + 1) * n];
                        let r: f64 = q.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                        v.iter_mut().zip(q).for_each(|(x, qi)| *x -= r * qi);
                    }
                }
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm < tol::PIVOT {
                    continue 'attempt;
                }
                v.iter_mut().for_each(|x| *x /= norm);
            }
            let mut data = vec![0.0; n * n];
            for c in 0..n {
                for r in 0..n {
                    data[r * n + c] = cols[c * n + r];
                }
            }
            return Ok(OrthogonalMatrix { n, data });
        }
        Err(CodebookError::Singular {
            attempts: tol::MAX_RESAMPLES,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n + c]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1))
    }

    /// Ψv.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, CodebookError> {
        self.check_len(v.len())?;
        Ok(self
            .rows()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Ψᵀv.
    pub fn apply_transpose(&self, v: &[f64]) -> Result<Vec<f64>, CodebookError> {
        self.check_len(v.len())?;
        let mut out = vec![0.0; self.n];
        for (row, &vr) in self.rows().zip(v) {
            out.iter_mut().zip(row).for_each(|(o, a)| *o += a * vr);
        }
        Ok(out)
    }

    /// max |ΨᵀΨ − I|.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.n;
        let mut t = vec![0.0; n * n];
        for r in 0..n {
            for c in 0..n {
                t[c * n + r] = self.data[r * n + c];
            }
        }
        let mut worst: f64 = 0.0;
        for a in 0..n {
            let ca = &t[a * n..(a + 1) * n];
            for b in a..n {
                let cb = &t[b * n..(b + 1) * n];
                let g: f64 = ca.iter().zip(cb).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .expect("nonempty range");
            if a[p * n + k] == 0.0 {
                return 0.0;
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                for c in k..n {
                    a[i * n + c] -= f * a[k * n + c];
                }
            }
        }
        det
    }

    fn check_len(&self, len: usize) -> Result<(), CodebookError> {
        if len != self.n {
            return Err(CodebookError::Mismatch(format!(
                "{0}x{0} matrix applied to length {len}",
                self.n
            )));
        }
        Ok(())
    }
}

/// Haar-random n×n matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrthoSampler {
    pub n: usize,
}

impl EntrySampler for OrthoSampler {
    type Entry = OrthogonalMatrix;

    fn sample(&self, rng: &mut KeyedRng) -> Result<OrthogonalMatrix, CodebookError> {
        OrthogonalMatrix::haar(self.n, rng)
    }

    fn identity(&self) -> OrthogonalMatrix {
        OrthogonalMatrix::identity(self.n)
    }

    fn entry_cost(&self) -> u64 {
        (self.n * self.n) as u64
    }
}

/// One independent Haar matrix per subchannel, all selected by the same key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BankSampler {
    pub n: usize,
    pub m: usize,
}

impl EntrySampler for BankSampler {
    type Entry = Vec<OrthogonalMatrix>;

    fn sample(&self, rng: &mut KeyedRng) -> Result<Vec<OrthogonalMatrix>, CodebookError> {
        (0..self.m)
            .map(|j| OrthogonalMatrix::haar(self.n, &mut rng.fork(j as u64)))
            .collect()
    }

    fn identity(&self) -> Vec<OrthogonalMatrix> {
        vec![OrthogonalMatrix::identity(self.n); self.m]
    }

    fn entry_cost(&self) -> u64 {
        (self.m * self.n * self.n) as u64
    }
}

pub type OrthogonalCodebook = Codebook<OrthoSampler>;
pub type OrthogonalBankCodebook = Codebook<BankSampler>;

pub fn gen_orthogonal_codebook(
    n: usize,
    key_bits: u64,
    seed: u64,
    mode: StorageMode,
) -> Result<OrthogonalCodebook, CodebookError> {
    Codebook::generate(OrthoSampler { n }, key_bits, seed, mode, DEFAULT_MEMORY_BUDGET)
}

pub fn gen_orthogonal_bank(
    n: usize,
    m: usize,
    key_bits: u64,
    seed: u64,
    mode: StorageMode,
) -> Result<OrthogonalBankCodebook, CodebookError> {
    Codebook::generate(BankSampler { n, m }, key_bits, seed, mode, DEFAULT_MEMORY_BUDGET)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::Key;

    #[test]
    fn scalar_entries_are_signs() {
        let book = gen_orthogonal_codebook(1, 4, 3, StorageMode::Auto).unwrap();
        let mut seen = [false; 2];
        for i in 0..16 {
            let m = book.entry(&Key::from_index(4, i).unwrap()).unwrap();
            let v = m.get(0, 0);
            assert_eq!(v.abs(), 1.0);
            seen[usize::from(v > 0.0)] = true;
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn orthogonality_and_determinant() {
        let book = gen_orthogonal_codebook(8, 3, 11, StorageMode::Auto).unwrap();
        for i in 0..8 {
            let m = book.entry(&Key::from_index(3, i).unwrap()).unwrap();
            assert!(m.orthogonality_residual() < tol::ORTHOGONALITY);
            assert!((m.determinant().abs() - 1.0).abs() < tol::DETERMINANT);
        }
    }

    #[test]
    fn transpose_inverts() {
        let m = OrthogonalMatrix::haar(10, &mut KeyedRng::new(1, 2)).unwrap();
        let v: Vec<f64> = (0..10).map(|i| i as f64 - 4.5).collect();
        let back = m.apply_transpose(&m.apply(&v).unwrap()).unwrap();
        for (a, b) in v.iter().zip(back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn permutation_embedding() {
        let p = Permutation::from_one_based(&[3, 1, 2]).unwrap();
        let m = OrthogonalMatrix::from_permutation(&p);
        let s = [1.0, 2.0, 3.0];
        assert_eq!(m.apply(&s).unwrap(), p.apply(&s).unwrap());
        assert_eq!(m.orthogonality_residual(), 0.0);
        assert_eq!(m.determinant().abs(), 1.0);
    }

    #[test]
    fn banks_are_independent() {
        let bank = gen_orthogonal_bank(4, 2, 1, 5, StorageMode::Auto).unwrap();
        let e = bank.entry(&Key::from_index(1, 0).unwrap()).unwrap();
        assert_ne!(e[0], e[1]);
    }
}
