//! Matrix lattices: vectorization, generator and Gram matrices, volume and
//! determinant-based figures of merit.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg;

pub use num_complex::Complex64 as C64;
pub type CMat = DMatrix<C64>;

/// Largest number of coefficient vectors any box search will enumerate.
pub const SEARCH_LIMIT: f64 = 67_108_864.0;

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_TOL: f64 = 1e-9;

/// Real vectorization: walks columns top to bottom, emitting (Re, Im) per entry.
pub fn vectorize(u: &CMat) -> DVector<f64> {
    let mut v = DVector::zeros(2 * u.nrows() * u.ncols());
    let mut p = 0;
    for c in 0..u.ncols() {
        for r in 0..u.nrows() {
            let z = u[(r, c)];
            v[p] = z.re;
            v[p + 1] = z.im;
            p += 2;
        }
    }
    v
}

/// Inverse of [`vectorize`] for a `rows`×`cols` shape.
pub fn devectorize(v: &DVector<f64>, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |r, c| {
        let p = 2 * (c * rows + r);
        C64::new(v[p], v[p + 1])
    })
}

/// Ordered list of complex weight matrices spanning a linear space-time code.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightBasis {
    pub name: String,
    pub nt: usize,
    pub t: usize,
    pub mats: Vec<CMat>,
}

#[derive(Serialize, Deserialize)]
struct BasisJson {
    name: String,
    nt: usize,
    #[serde(rename = "T")]
    t: usize,
    k: usize,
    mats: Vec<Vec<[f64; 2]>>,
}

impl WeightBasis {
    /// Shape and finiteness are checked here; linear independence is checked by [`WeightBasis::validate`].
    pub fn new(name: impl Into<String>, mats: Vec<CMat>) -> Result<Self> {
        let Some(first) = mats.first() else {
            return invalid("basis must contain at least one matrix");
        };
        let (nt, t) = first.shape();
        if nt == 0 || t == 0 {
            return invalid("weight matrices must be non-empty");
        }
        for (i, m) in mats.iter().enumerate() {
            if m.shape() != (nt, t) {
                return Err(Error::Dimension(format!("matrix {i} is {:?}, expected {:?}", m.shape(), (nt, t))));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return invalid(format!("matrix {i} has non-finite entries"));
            }
        }
        if mats.len() > 2 * nt * t {
            return invalid(format!("k = {} exceeds 2·nt·T = {}", mats.len(), 2 * nt * t));
        }
        Ok(WeightBasis { name: name.into(), nt, t, mats })
    }

    pub fn k(&self) -> usize {
        self.mats.len()
    }

    /// Real generator matrix, one vectorized weight matrix per column.
    pub fn generator(&self) -> DMatrix<f64> {
        let cols: Vec<_> = self.mats.iter().map(vectorize).collect();
        DMatrix::from_columns(&cols)
    }

    pub fn rank(&self) -> usize {
        linalg::rank_r(&self.generator(), RANK_TOL)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.rank();
        if r < self.k() {
            return Err(Error::RankDeficient { rank: r, expected: self.k() });
        }
        Ok(())
    }

    /// Codeword Σ s_i B_i.
    pub fn combine(&self, s: &[f64]) -> CMat {
        let mut x = CMat::zeros(self.nt, self.t);
        for (b, &c) in self.mats.iter().zip(s) {
            if c != 0.0 {
                x += b * C64::new(c, 0.0);
            }
        }
        x
    }

    pub fn to_json(&self) -> String {
        let j = BasisJson {
            name: self.name.clone(),
            nt: self.nt,
            t: self.t,
            k: self.k(),
            mats: self
                .mats
                .iter()
                .map(|m| {
                    let mut v = Vec::with_capacity(m.len());
                    for r in 0..m.nrows() {
                        for c in 0..m.ncols() {
                            v.push([m[(r, c)].re, m[(r, c)].im]);
                        }
                    }
                    v
                })
                .collect(),
        };
        serde_json::to_string_pretty(&j).expect("basis serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: BasisJson = serde_json::from_str(s)?;
        if j.mats.len() != j.k {
            return invalid(format!("k = {} but {} matrices given", j.k, j.mats.len()));
        }
        let mut mats = Vec::with_capacity(j.k);
        for (i, flat) in j.mats.iter().enumerate() {
            if flat.len() != j.nt * j.t {
                return Err(Error::Dimension(format!(
                    "matrix {i} has {} entries, expected {}",
                    flat.len(),
                    j.nt * j.t
                )));
            }
            mats.push(CMat::from_fn(j.nt, j.t, |r, c| {
                let [re, im] = flat[r * j.t + c];
                C64::new(re, im)
            }));
        }
        WeightBasis::new(j.name, mats)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeProfile {
    #[serde(serialize_with = "ser_mat")]
    pub gen: DMatrix<f64>,
    #[serde(serialize_with = "ser_mat")]
    pub gram: DMatrix<f64>,
    pub volume: f64,
    pub min_det_est: Option<f64>,
    pub delta: Option<f64>,
    pub eta: Option<f64>,
}

fn ser_mat<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().cloned().collect()).collect();
    serde::Serialize::serialize(&rows, s)
}

pub fn gram(gen: &DMatrix<f64>) -> DMatrix<f64> {
    gen.transpose() * gen
}

/// sqrt(det G); fails unless G is symmetric positive definite.
pub fn volume(gram: &DMatrix<f64>) -> Result<f64> {
    let chol = gram.clone().cholesky().ok_or_else(|| Error::Invalid("Gram matrix is not positive definite".into()))?;
    Ok(chol.l().diagonal().iter().product())
}

/// Determinant fields are absent for non-square codewords or a zero search bound.
pub fn lattice_profile(basis: &WeightBasis, det_search_bound: u32) -> Result<LatticeProfile> {
    basis.validate()?;
    let gen = basis.generator();
    let gram = gram(&gen);
    let volume = volume(&gram)?;
    let (min_det_est, delta, eta) = if basis.nt == basis.t && det_search_bound > 0 {
        let d = min_det(basis, det_search_bound)?;
        let n = basis.nt as f64;
        (Some(d), Some(d / volume.powf(1.0 / (2.0 * n))), Some(d.powf(2.0 * n) / volume))
    } else {
        (None, None, None)
    };
    Ok(LatticeProfile { gen, gram, volume, min_det_est, delta, eta })
}

fn box_size(k: usize, bound: u32) -> f64 {
    (2.0 * bound as f64 + 1.0).powi(k as i32)
}

/// Visits Σ z_i B_i for every nonzero z in the box ‖z‖_∞ ≤ bound, one of each ±z pair.
///
/// The odometer runs from (−b,…,−b) up to the vector just before zero; the
/// second half of the box is the negation of the first.
fn scan_box(basis: &WeightBasis, bound: u32, mut visit: impl FnMut(&[C64])) -> Result<()> {
    let k = basis.k();
    let size = box_size(k, bound);
    if size > SEARCH_LIMIT {
        return Err(Error::SearchTooLarge { size, limit: SEARCH_LIMIT });
    }
    if bound == 0 {
        return Ok(());
    }
    let flat: Vec<Vec<C64>> =
        basis.mats.iter().map(|m| (0..m.len()).map(|i| m[(i / m.ncols(), i % m.ncols())]).collect()).collect();
    let len = basis.nt * basis.t;
    let b = bound as i64;
    let mut z = vec![-b; k];
    let mut acc = vec![C64::new(0.0, 0.0); len];
    for m in &flat {
        for (a, v) in acc.iter_mut().zip(m) {
            *a -= v * b as f64;
        }
    }
    let half = (size as u64 - 1) / 2;
    for _ in 0..half {
        visit(&acc);
        for (i, zi) in z.iter_mut().enumerate() {
            if *zi < b {
                *zi += 1;
                for (a, v) in acc.iter_mut().zip(&flat[i]) {
                    *a += v;
                }
                break;
            }
            *zi = -b;
            let w = 2.0 * b as f64;
            for (a, v) in acc.iter_mut().zip(&flat[i]) {
                *a -= v * w;
            }
        }
    }
    Ok(())
}

/// Minimum of |det X|² over nonzero coefficient vectors in the box.
pub fn min_det(basis: &WeightBasis, bound: u32) -> Result<f64> {
    if basis.nt != basis.t {
        return invalid("determinant requires square codewords");
    }
    let n = basis.nt;
    let mut best = f64::INFINITY;
    let mut buf = vec![C64::new(0.0, 0.0); n * n];
    scan_box(basis, bound, |x| {
        buf.copy_from_slice(x);
        let d = linalg::det_in_place(&mut buf, n).norm_sqr();
        if d < best {
            best = d;
        }
    })?;
    Ok(best)
}

/// Smallest rank of a nonzero codeword difference with coefficients in the box.
pub fn min_rank_difference(basis: &WeightBasis, bound: u32) -> Result<usize> {
    let (rows, cols) = (basis.nt, basis.t);
    let full = rows.min(cols);
    let mut best = full;
    let mut buf = vec![C64::new(0.0, 0.0); rows * cols];
    scan_box(basis, bound, |x| {
        if best == 0 {
            return;
        }
        if rows == cols {
            // |det| ≥ tol·‖X‖_F^n forces σ_min > tol·σ_max, so the SVD is skipped.
            let f2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
            if f2 == 0.0 {
                best = 0;
                return;
            }
            buf.copy_from_slice(x);
            let d = linalg::det_in_place(&mut buf, rows).norm();
            if d > RANK_TOL * f2.sqrt().powi(rows as i32) {
                return;
            }
        }
        let m = CMat::from_row_slice(rows, cols, x);
        let r = linalg::rank_c(&m, RANK_TOL);
        if r < best {
            best = r;
        }
    })?;
    Ok(best)
}
