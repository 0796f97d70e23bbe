//! Cyclic algebras (L/K, σ, γ) over numerically embedded fields.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{is_squarefree, Aut, Field, Poly};
use crate::lattice::{CMat, C64};
use crate::linalg;

/// A degree-n cyclic algebra given by the images of a fixed ℚ-basis of L
/// under σ⁰, σ¹, …, σⁿ⁻¹.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicAlgebraSpec {
    pub n: usize,
    pub gamma: C64,
    pub l_basis_labels: Vec<String>,
    /// embeddings[j][b] = σ^j(basis_b)
    pub embeddings: Vec<Vec<C64>>,
}

/// x = Σ eⁱ x_i with each x_i a coefficient vector over the basis of L.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    pub coeffs: Vec<Vec<f64>>,
}

impl AlgebraElement {
    pub fn new(coeffs: Vec<Vec<f64>>) -> Self {
        AlgebraElement { coeffs }
    }

    /// Element whose i-th component is the single L-basis vector b.
    pub fn unit(n: usize, dim: usize, i: usize, b: usize) -> Self {
        let mut coeffs = vec![vec![0.0; dim]; n];
        coeffs[i][b] = 1.0;
        AlgebraElement { coeffs }
    }

    pub fn one(n: usize, dim: usize) -> Self {
        Self::unit(n, dim, 0, 0)
    }
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    n: usize,
    gamma: [f64; 2],
    #[serde(rename = "L_basis_labels")]
    l_basis_labels: Vec<String>,
    embeddings: Vec<Vec<[f64; 2]>>,
}

impl CyclicAlgebraSpec {
    pub fn new(n: usize, gamma: C64, l_basis_labels: Vec<String>, embeddings: Vec<Vec<C64>>) -> Result<Self> {
        if n == 0 {
            return invalid("degree must be positive");
        }
        if embeddings.len() != n {
            return Err(Error::Dimension(format!("{} embeddings for degree {n}", embeddings.len())));
        }
        let dim = l_basis_labels.len();
        if embeddings.iter().any(|e| e.len() != dim) {
            return Err(Error::Dimension("embedding length differs from basis size".into()));
        }
        if gamma.norm() == 0.0 {
            return invalid("γ must be nonzero");
        }
        Ok(CyclicAlgebraSpec { n, gamma, l_basis_labels, embeddings })
    }

    /// Builds the embedding table from a field presentation, viewed through `twist`
    /// (the identity gives the algebra itself; other automorphisms give its conjugates).
    pub fn from_field(
        field: &Field,
        basis: &[Poly],
        labels: Vec<String>,
        sigma: &Aut,
        n: usize,
        gamma: C64,
        twist: &Aut,
    ) -> Result<Self> {
        if basis.len() != labels.len() {
            return Err(Error::Dimension("basis and labels differ in length".into()));
        }
        if field.pow(sigma, n) != field.identity() {
            return invalid(format!("σ^{n} is not the identity"));
        }
        let embeddings = (0..n)
            .map(|j| {
                let g = field.compose(twist, &field.pow(sigma, j));
                basis.iter().map(|p| field.eval(p, &g)).collect()
            })
            .collect();
        Self::new(n, gamma, labels, embeddings)
    }

    pub fn dim(&self) -> usize {
        self.l_basis_labels.len()
    }

    /// σ^j applied to a coefficient vector.
    pub fn embed(&self, j: usize, x: &[f64]) -> C64 {
        self.embeddings[j % self.n].iter().zip(x).map(|(e, &c)| e * c).sum()
    }

    fn check(&self, x: &AlgebraElement) -> Result<()> {
        if x.coeffs.len() != self.n || x.coeffs.iter().any(|c| c.len() != self.dim()) {
            return Err(Error::Dimension(format!(
                "element shape does not match degree {} over a basis of size {}",
                self.n,
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let j = SpecJson {
            n: self.n,
            gamma: [self.gamma.re, self.gamma.im],
            l_basis_labels: self.l_basis_labels.clone(),
            embeddings: self.embeddings.iter().map(|e| e.iter().map(|z| [z.re, z.im]).collect()).collect(),
        };
        serde_json::to_string_pretty(&j).expect("descriptor serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: SpecJson = serde_json::from_str(s)?;
        let emb = j.embeddings.iter().map(|e| e.iter().map(|&[re, im]| C64::new(re, im)).collect()).collect();
        Self::new(j.n, C64::new(j.gamma[0], j.gamma[1]), j.l_basis_labels, emb)
    }
}

/// Left-regular representation: entry (r, c) is σ^c(x_{r−c}) on and below the
/// diagonal and γ·σ^c(x_{n+r−c}) above it.
pub fn left_regular(spec: &CyclicAlgebraSpec, x: &AlgebraElement) -> Result<CMat> {
    spec.check(x)?;
    let n = spec.n;
    Ok(CMat::from_fn(n, n, |r, c| {
        if r >= c {
            spec.embed(c, &x.coeffs[r - c])
        } else {
            spec.gamma * spec.embed(c, &x.coeffs[n + r - c])
        }
    }))
}

/// Degree-2 representation with γ spread evenly over the off-diagonal.
pub fn balanced_rep(spec: &CyclicAlgebraSpec, x: &AlgebraElement) -> Result<CMat> {
    if spec.n != 2 {
        return invalid(format!("balanced representation needs degree 2, got {}", spec.n));
    }
    spec.check(x)?;
    let s = (-spec.gamma).sqrt();
    let (x0, x1) = (&x.coeffs[0], &x.coeffs[1]);
    Ok(CMat::from_row_slice(
        2,
        2,
        &[spec.embed(0, x0), -s * spec.embed(1, x1), s * spec.embed(0, x1), spec.embed(1, x0)],
    ))
}

/// (det ρ(x), tr ρ(x)).
pub fn reduced_norm_trace(spec: &CyclicAlgebraSpec, x: &AlgebraElement) -> Result<(C64, C64)> {
    let m = left_regular(spec, x)?;
    Ok((linalg::det(&m), m.trace()))
}

/// Searches integer elements with coefficients in [−bound, bound] for a vanishing
/// reduced norm. Finding one disproves division; finding none proves nothing.
pub fn norm_zero_search(spec: &CyclicAlgebraSpec, bound: i32) -> Result<Option<AlgebraElement>> {
    let dim = spec.dim();
    let total = spec.n * dim;
    let width = (2 * bound + 1) as f64;
    let size = width.powi(total as i32);
    if size > crate::lattice::SEARCH_LIMIT {
        return Err(Error::SearchTooLarge { size, limit: crate::lattice::SEARCH_LIMIT });
    }
    let mut z = vec![-bound; total];
    loop {
        if z.iter().any(|&v| v != 0) {
            let coeffs = z.chunks(dim).map(|c| c.iter().map(|&v| v as f64).collect()).collect();
            let x = AlgebraElement::new(coeffs);
            let m = left_regular(spec, &x)?;
            let scale = linalg::frob2(&m).sqrt().powi(spec.n as i32);
            if linalg::det(&m).norm() <= 1e-9 * scale {
                return Ok(Some(x));
            }
        }
        let mut i = 0;
        loop {
            if i == total {
                return Ok(None);
            }
            if z[i] < bound {
                z[i] += 1;
                break;
            }
            z[i] = -bound;
            i += 1;
        }
    }
}

/// Quaternion algebra (a, γ) with i² = a, j² = γ, ij = −ji = k.
#[derive(Clone, Debug, PartialEq)]
pub struct QuaternionSpec {
    pub a: C64,
    pub gamma: C64,
    pub base_field_label: String,
}

impl QuaternionSpec {
    pub fn new(a: C64, gamma: C64, base_field_label: impl Into<String>) -> Result<Self> {
        if a.norm() == 0.0 || gamma.norm() == 0.0 {
            return invalid("quaternion parameters must be nonzero");
        }
        Ok(QuaternionSpec { a, gamma, base_field_label: base_field_label.into() })
    }

    pub fn mul(&self, x: &[C64; 4], y: &[C64; 4]) -> [C64; 4] {
        let (a, g) = (self.a, self.gamma);
        [
            x[0] * y[0] + a * x[1] * y[1] + g * x[2] * y[2] - a * g * x[3] * y[3],
            x[0] * y[1] + x[1] * y[0] - g * x[2] * y[3] + g * x[3] * y[2],
            x[0] * y[2] + x[2] * y[0] + a * x[1] * y[3] - a * x[3] * y[1],
            x[0] * y[3] + x[3] * y[0] + x[1] * y[2] - x[2] * y[1],
        ]
    }
}

/// nrm(x) = x₀² − a x₁² − γ x₂² + aγ x₃².
pub fn quaternion_norm(q: &QuaternionSpec, x: &[C64; 4]) -> C64 {
    x[0] * x[0] - q.a * x[1] * x[1] - q.gamma * x[2] * x[2] + q.a * q.gamma * x[3] * x[3]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadOracle {
    pub norm: i64,
    pub trace: i64,
    pub discriminant: i64,
}

/// Norm, trace of x₀ + x₁√d and the discriminant of ℚ(√d).
pub fn quad_field_oracle(d: i64, x: (i64, i64)) -> Result<QuadOracle> {
    if d == 1 || !is_squarefree(d) {
        return invalid(format!("{d} is not a squarefree integer ≠ 0, 1"));
    }
    let (x0, x1) = x;
    let discriminant = if d.rem_euclid(4) == 1 { d } else { 4 * d };
    Ok(QuadOracle { norm: x0 * x0 - d * x1 * x1, trace: 2 * x0, discriminant })
}
