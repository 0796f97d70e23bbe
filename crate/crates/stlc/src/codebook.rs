//! Named code constructors and the matrix maps used to assemble them.

use std::fmt;
use std::str::FromStr;

use crate::cda::{balanced_rep, left_regular, AlgebraElement, CyclicAlgebraSpec};
use crate::error::{invalid, Error, Result};
use crate::field::{Aut, Field, Generator, Poly};
use crate::lattice::{CMat, WeightBasis, C64};

/// Tolerance for the entrywise automorphism checks (τ² = id, η^M = id).
const AUT_TOL: f64 = 1e-9;

/// A matrix over a number field, stored as its numeric conjugates: `mats[g]` is
/// the matrix with every entry mapped through the automorphism `auts[g]`.
/// Index 0 is the identity, i.e. the matrix itself.
#[derive(Clone, Debug)]
pub struct GaloisMat {
    pub field: Field,
    pub auts: Vec<Aut>,
    pub mats: Vec<CMat>,
}

impl GaloisMat {
    pub fn from_fn(field: &Field, mut f: impl FnMut(&Aut) -> Result<CMat>) -> Result<Self> {
        let auts = field.automorphisms();
        let mats = auts.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        Ok(GaloisMat { field: field.clone(), auts, mats })
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        let auts = field.automorphisms();
        let mats = vec![CMat::zeros(rows, cols); auts.len()];
        GaloisMat { field: field.clone(), auts, mats }
    }

    pub fn value(&self) -> &CMat {
        &self.mats[0]
    }

    pub fn shape(&self) -> (usize, usize) {
        self.mats[0].shape()
    }

    pub fn at(&self, g: &Aut) -> &CMat {
        let i = self.auts.iter().position(|a| a == g).expect("automorphism of the same field");
        &self.mats[i]
    }

    /// Entrywise h: (h X)^g = X^{g∘h}.
    pub fn apply(&self, h: &Aut) -> GaloisMat {
        let mats = self.auts.iter().map(|g| self.at(&self.field.compose(g, h)).clone()).collect();
        GaloisMat { field: self.field.clone(), auts: self.auts.clone(), mats }
    }

    fn zip_with(&self, others: &[&GaloisMat], f: impl Fn(usize, &[&CMat]) -> CMat) -> GaloisMat {
        let mats = (0..self.mats.len())
            .map(|i| {
                let mut args = vec![&self.mats[i]];
                args.extend(others.iter().map(|o| &o.mats[i]));
                f(i, &args)
            })
            .collect();
        GaloisMat { field: self.field.clone(), auts: self.auts.clone(), mats }
    }

    pub fn max_diff(&self, other: &GaloisMat) -> f64 {
        self.mats.iter().zip(&other.mats).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

pub fn blocks2(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    let (n, m) = a.shape();
    let mut out = CMat::zeros(n + c.nrows(), m + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, m), b.shape()).copy_from(b);
    out.view_mut((n, 0), c.shape()).copy_from(c);
    out.view_mut((n, m), d.shape()).copy_from(d);
    out
}

pub fn block_diag(parts: &[&CMat]) -> CMat {
    let rows = parts.iter().map(|p| p.nrows()).sum();
    let cols = parts.iter().map(|p| p.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for p in parts {
        out.view_mut((r, c), p.shape()).copy_from(*p);
        r += p.nrows();
        c += p.ncols();
    }
    out
}

/// Parameters of α_{τ,θ} / α̃_{τ,θ} with θ = ζθ′.
#[derive(Clone, Debug)]
pub struct IteratedMapSpec {
    pub theta: C64,
    pub zeta: C64,
    pub theta_prime: f64,
    pub tau: Aut,
}

impl IteratedMapSpec {
    pub fn new(zeta: C64, theta_prime: f64, tau: Aut) -> Result<Self> {
        let units = [C64::new(1., 0.), C64::new(-1., 0.), C64::new(0., 1.), C64::new(0., -1.)];
        if !units.iter().any(|u| (u - zeta).norm() < 1e-12) {
            return invalid("ζ must be one of ±1, ±i");
        }
        if !(theta_prime > 0.0 && theta_prime.is_finite()) {
            return invalid("θ′ must be a positive real");
        }
        Ok(IteratedMapSpec { theta: zeta * theta_prime, zeta, theta_prime, tau })
    }

    /// τ² = id on the given entries, and τσ = στ when a σ is supplied.
    pub fn check_on(&self, x: &GaloisMat, sigma: Option<&Aut>) -> Result<()> {
        if x.apply(&self.tau).apply(&self.tau).max_diff(x) > AUT_TOL * (1.0 + x.value().norm()) {
            return invalid("τ² is not the identity on the entries");
        }
        if let Some(s) = sigma {
            let a = x.apply(&self.tau).apply(s);
            let b = x.apply(s).apply(&self.tau);
            if a.max_diff(&b) > AUT_TOL * (1.0 + x.value().norm()) {
                return invalid("τ does not commute with σ on the entries");
            }
        }
        Ok(())
    }
}

/// α: [[X, θτ(Y)], [Y, τ(X)]]; α̃: [[X, ζ√θ′τ(Y)], [√θ′Y, τ(X)]].
pub fn iterate(x: &GaloisMat, y: &GaloisMat, spec: &IteratedMapSpec, balanced: bool) -> Result<GaloisMat> {
    if x.shape() != y.shape() || x.shape().0 != x.shape().1 {
        return Err(Error::Dimension("iterate needs square X and Y of equal size".into()));
    }
    let tx = x.apply(&spec.tau);
    let ty = y.apply(&spec.tau);
    let (top, bottom) = if balanced {
        let r = spec.theta_prime.sqrt();
        (spec.zeta * r, C64::new(r, 0.0))
    } else {
        (spec.theta, C64::new(1.0, 0.0))
    };
    Ok(x.zip_with(&[y, &tx, &ty], |_, m| blocks2(m[0], &(m[3] * top), &(m[1] * bottom), m[2])))
}

/// Ψ_{η,M}(X) = diag(X, η(X), …, η^{M−1}(X)).
pub fn relay_blockdiag(x: &GaloisMat, eta: &Aut, m: usize) -> Result<GaloisMat> {
    if m == 0 {
        return invalid("relay count must be positive");
    }
    let mut pows = vec![x.clone()];
    for _ in 1..=m {
        let next = pows.last().unwrap().apply(eta);
        pows.push(next);
    }
    if pows[m].max_diff(x) > AUT_TOL * (1.0 + x.value().norm()) {
        return invalid(format!("η^{m} does not fix the entries"));
    }
    pows.truncate(m);
    let refs: Vec<&GaloisMat> = pows[1..].iter().collect();
    Ok(pows[0].zip_with(&refs, |_, parts| block_diag(parts)))
}

/// ψ(X) = BPX(BP)⁻¹ for a 4×4 X, with the interleaving permutation P and
/// B = diag(√|γ|, |γ|, √|γ|, |γ|).
pub fn quaternionic_embed(x: &CMat, gamma: C64) -> Result<CMat> {
    if x.shape() != (4, 4) {
        return Err(Error::Dimension(format!("ψ needs a 4×4 matrix, got {:?}", x.shape())));
    }
    let (s, bp_inv) = embed_similarity(gamma)?;
    Ok(&s * x * bp_inv)
}

fn embed_similarity(gamma: C64) -> Result<(CMat, CMat)> {
    let n = 4;
    let g = gamma.norm();
    if g == 0.0 {
        return invalid("γ must be nonzero");
    }
    let mut p = CMat::zeros(n, n);
    for i in 1..=n {
        let j = if i % 2 == 1 { i.div_ceil(2) } else { (i + n) / 2 };
        p[(i - 1, j - 1)] = C64::new(1.0, 0.0);
    }
    let b = CMat::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| {
        C64::new(if i % 2 == 0 { g.sqrt() } else { g }, 0.0)
    }));
    let bp = b * p;
    let inv = bp.clone().try_inverse().ok_or_else(|| Error::Internal("BP is singular".into()))?;
    Ok((bp, inv))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Alamouti,
    Golden,
    Silver,
    SrinathRajan,
    MidoA4,
    SimoRelay,
    MimoRelay,
    Iterated,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Alamouti,
        Family::Golden,
        Family::Silver,
        Family::SrinathRajan,
        Family::MidoA4,
        Family::SimoRelay,
        Family::MimoRelay,
        Family::Iterated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Alamouti => "alamouti",
            Family::Golden => "golden",
            Family::Silver => "silver",
            Family::SrinathRajan => "srinath_rajan",
            Family::MidoA4 => "mido_a4",
            Family::SimoRelay => "simo_relay",
            Family::MimoRelay => "mimo_relay",
            Family::Iterated => "iterated",
        }
    }

    /// Codes whose codewords come from a division algebra (full diversity expected).
    pub fn is_division(self) -> bool {
        !matches!(self, Family::Iterated)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::Invalid(format!("unknown family '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodeDescriptor {
    pub family: Family,
    /// Relay count M (mimo_relay: p = 2M + 1 must be prime; simo_relay, iterated: 2).
    pub relays: Option<usize>,
    /// γ override for golden.
    pub gamma: Option<C64>,
    /// Squarefree a < 0 with ω = √a for mimo_relay.
    pub a: Option<i64>,
}

impl CodeDescriptor {
    pub fn new(family: Family) -> Self {
        CodeDescriptor { family, relays: None, gamma: None, a: None }
    }

    pub fn with_relays(mut self, m: usize) -> Self {
        self.relays = Some(m);
        self
    }
}

pub fn build(desc: &CodeDescriptor) -> Result<WeightBasis> {
    if desc.gamma.is_some() && desc.family != Family::Golden {
        return invalid(format!("γ is not a parameter of {}", desc.family));
    }
    if desc.a.is_some() && desc.family != Family::MimoRelay {
        return invalid(format!("a is not a parameter of {}", desc.family));
    }
    if let Some(m) = desc.relays {
        match desc.family {
            Family::MimoRelay => {}
            Family::SimoRelay | Family::Iterated if m == 2 => {}
            f => return invalid(format!("relay count {m} is not supported by {f}")),
        }
    }
    let mats = match desc.family {
        Family::Alamouti => alamouti()?,
        Family::Golden => golden(desc.gamma.unwrap_or(C64::new(0.0, 1.0)))?,
        Family::Silver => silver(),
        Family::SrinathRajan => srinath_rajan()?,
        Family::MidoA4 => mido_a4()?,
        Family::SimoRelay => simo_relay()?.into_iter().map(|g| g.mats[0].clone()).collect(),
        Family::MimoRelay => {
            mimo_relay(desc.relays.unwrap_or(3), desc.a.unwrap_or(-5))?.into_iter().map(|g| g.mats[0].clone()).collect()
        }
        Family::Iterated => iterated()?.into_iter().map(|g| g.mats[0].clone()).collect(),
    };
    let basis = WeightBasis::new(desc.family.name(), mats)?;
    basis.validate()?;
    Ok(basis)
}

fn labels(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn hamilton_spec() -> Result<CyclicAlgebraSpec> {
    let f = Field::new(vec![Generator::Sqrt(-1)])?;
    CyclicAlgebraSpec::from_field(
        &f,
        &[f.one(), f.gen(0)],
        labels(&["1", "i"]),
        &f.conj(),
        2,
        C64::new(-1.0, 0.0),
        &f.identity(),
    )
}

/// ρ over the Hamiltonian quaternions (ℚ(i)/ℚ, conj, −1); coefficients Re/Im of x₀, x₁.
fn alamouti() -> Result<Vec<CMat>> {
    let s = hamilton_spec()?;
    (0..4).map(|k| left_regular(&s, &AlgebraElement::unit(2, 2, k / 2, k % 2))).collect()
}

/// ℚ(i, √5) with basis 1, i, θ, iθ where θ = (1+√5)/2.
fn golden_field() -> Result<(Field, Vec<Poly>)> {
    let f = Field::new(vec![Generator::Sqrt(-1), Generator::Sqrt(5)])?;
    let theta = f.one().scale(0.5).plus(f.gen(1).scale(0.5));
    let basis = vec![f.one(), f.gen(0), theta.clone(), f.gen(0).mul(&theta)];
    Ok((f, basis))
}

pub fn golden_spec(gamma: C64) -> Result<CyclicAlgebraSpec> {
    let (f, basis) = golden_field()?;
    let sigma = f.aut(&[1, -1])?;
    CyclicAlgebraSpec::from_field(&f, &basis, labels(&["1", "i", "θ", "iθ"]), &sigma, 2, gamma, &f.identity())
}

/// [[x₀+θx₁, γ(x₂+σ(θ)x₃)], [x₂+θx₃, x₀+σ(θ)x₁]] with x_j ∈ ℤ[i].
fn golden(gamma: C64) -> Result<Vec<CMat>> {
    let s = golden_spec(gamma)?;
    (0..8).map(|k| left_regular(&s, &AlgebraElement::unit(2, 4, k / 4, k % 4))).collect()
}

/// X_A(x₁,x₂) + T·X_B(x₃,x₄), T = diag(1, −1), normalized by 1/√7.
fn silver() -> Vec<CMat> {
    let r7 = 7f64.sqrt();
    let c = |re, im| C64::new(re, im);
    (0..8)
        .map(|k| {
            let mut x = [C64::new(0.0, 0.0); 4];
            x[k / 2] = if k % 2 == 0 { c(1.0, 0.0) } else { c(0.0, 1.0) };
            let [x1, x2, x3, x4] = x;
            let m = [
                x1 * r7 + c(1., 1.) * x3 + c(-1., 2.) * x4,
                -x2.conj() * r7 - c(1., -2.) * x3.conj() - c(1., 1.) * x4.conj(),
                x2 * r7 - c(1., 2.) * x3 - c(1., -1.) * x4,
                x1.conj() * r7 - c(1., -1.) * x3.conj() - c(-1., -2.) * x4.conj(),
            ];
            CMat::from_row_slice(2, 2, &m) / C64::new(r7, 0.0)
        })
        .collect()
}

/// x_i = x_{i1}θ₁ + x_{i2}θ₂ over ℚ(i, √5), σ: i ↦ −i, τ: √5 ↦ −√5.
fn srinath_rajan() -> Result<Vec<CMat>> {
    let f = Field::new(vec![Generator::Sqrt(-1), Generator::Sqrt(5)])?;
    let i = f.gen(0);
    let i_s5 = f.gen(0).mul(&f.gen(1));
    // θ₁ = 1 + i(1 − θ), θ₂ = θ₁θ = θ − i
    let th1 = f.one().plus(i.clone().scale(0.5)).plus(i_s5.scale(-0.5));
    let th2 = f.one().scale(0.5).plus(f.gen(1).scale(0.5)).plus(i.clone().scale(-1.0));
    let basis = [th1.clone(), i.mul(&th1), th2.clone(), i.mul(&th2)];
    let id = f.identity();
    let s = f.aut(&[-1, 1])?;
    let t = f.aut(&[1, -1])?;
    let ts = f.compose(&t, &s);
    let ci = C64::new(0.0, 1.0);
    Ok((0..16)
        .map(|k| {
            let which = k / 4;
            let p = &basis[k % 4];
            let x = |j: usize, g: &Aut| if j == which { f.eval(p, g) } else { C64::new(0.0, 0.0) };
            CMat::from_row_slice(
                4,
                4,
                &[
                    x(0, &id),
                    -x(1, &s),
                    ci * x(2, &t),
                    -ci * x(3, &ts),
                    x(1, &id),
                    x(0, &s),
                    ci * x(3, &t),
                    ci * x(2, &ts),
                    x(2, &id),
                    -x(3, &s),
                    x(0, &t),
                    -x(1, &ts),
                    x(3, &id),
                    x(2, &s),
                    x(1, &t),
                    x(0, &ts),
                ],
            )
        })
        .collect())
}

/// (ℚ(ζ₅)/ℚ, σ: ζ ↦ ζ³, γ = −8/9) over the ℤ-basis ζ^j − ζ^{j+1}.
pub fn mido_spec() -> Result<CyclicAlgebraSpec> {
    let f = Field::new(vec![Generator::RootOfUnity(5)])?;
    let z = |j: u32| Poly::monomial(1.0, vec![j]);
    let basis: Vec<Poly> = (0..4).map(|j| z(j).plus(z(j + 1).scale(-1.0))).collect();
    let sigma = f.aut(&[3])?;
    let names = labels(&["1−ζ", "ζ−ζ²", "ζ²−ζ³", "ζ³−ζ⁴"]);
    CyclicAlgebraSpec::from_field(&f, &basis, names, &sigma, 4, C64::new(-8.0 / 9.0, 0.0), &f.identity())
}

/// ρ of the ζ₅ algebra conjugated by ψ.
fn mido_a4() -> Result<Vec<CMat>> {
    let s = mido_spec()?;
    (0..16)
        .map(|k| quaternionic_embed(&left_regular(&s, &AlgebraElement::unit(4, 4, k / 4, k % 4))?, s.gamma))
        .collect()
}

/// ℚ(√5, i, √−3) with basis {1, φ} ⊗ {1, i} ⊗ {1, √−3}.
pub fn relay_tower() -> Result<(Field, Vec<Poly>, Vec<String>)> {
    let f = Field::new(vec![Generator::Sqrt(5), Generator::Sqrt(-1), Generator::Sqrt(-3)])?;
    let phi = f.one().scale(0.5).plus(f.gen(0).scale(0.5));
    let mut basis = Vec::new();
    let mut names = Vec::new();
    for r in 0..8 {
        let mut p = f.one();
        let mut name = String::new();
        if r & 4 != 0 {
            p = p.mul(&phi);
            name.push('φ');
        }
        if r & 2 != 0 {
            p = p.mul(&f.gen(1));
            name.push('i');
        }
        if r & 1 != 0 {
            p = p.mul(&f.gen(2));
            name.push_str("√−3");
        }
        basis.push(p);
        names.push(if name.is_empty() { "1".into() } else { name });
    }
    Ok((f, basis, names))
}

/// ρ̃ over (L/K, σ: √−3 ↦ −√−3, γ = −2/√5) as a matrix over L.
fn relay_component() -> Result<(Field, Vec<GaloisMat>)> {
    let (f, basis, names) = relay_tower()?;
    let sigma = f.aut(&[1, 1, -1])?;
    let gamma = C64::new(-2.0 / 5f64.sqrt(), 0.0);
    let mats = (0..16)
        .map(|k| {
            let x = AlgebraElement::unit(2, 8, k / 8, k % 8);
            GaloisMat::from_fn(&f, |g| {
                let spec = CyclicAlgebraSpec::from_field(&f, &basis, names.clone(), &sigma, 2, gamma, g)?;
                balanced_rep(&spec, &x)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((f, mats))
}

/// Ψ_{η,2}(ρ̃(x)) with η: √5 ↦ −√5.
pub fn simo_relay() -> Result<Vec<GaloisMat>> {
    let (f, comp) = relay_component()?;
    let eta = f.aut(&[-1, 1, 1])?;
    comp.iter().map(|x| relay_blockdiag(x, &eta, 2)).collect()
}

/// Ψ_{η,2}([[X₁, τX₁], [X₂, τX₂]]) with X_j = ρ̃(x_j), τ: i ↦ −i, η: √5 ↦ −√5.
pub fn iterated() -> Result<Vec<GaloisMat>> {
    let (f, comp) = relay_component()?;
    let tau = f.aut(&[1, -1, 1])?;
    let eta = f.aut(&[-1, 1, 1])?;
    let zero = GaloisMat::zeros(&f, 2, 2);
    let mut out = Vec::with_capacity(32);
    for row in 0..2 {
        for x in &comp {
            let tx = x.apply(&tau);
            let w = x.zip_with(&[&tx, &zero], |_, m| {
                if row == 0 {
                    blocks2(m[0], m[1], m[2], m[2])
                } else {
                    blocks2(m[2], m[2], m[0], m[1])
                }
            });
            out.push(relay_blockdiag(&w, &eta, 2)?);
        }
    }
    Ok(out)
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Smallest multiplier m whose class generates (ℤ/p)ˣ/{±1}.
fn relay_generator(p: usize, m_relays: usize) -> Option<i64> {
    (2..p as i64).find(|&m| {
        let mut x = 1i64;
        for e in 1..=m_relays {
            x = x * m % p as i64;
            if x == 1 || x == p as i64 - 1 {
                return e == m_relays;
            }
        }
        false
    })
}

/// Ψ_{η,M}(α̃_{τ,θ}(X, Y)) over L = ℚ(ξ_p, √a), p = 2M + 1,
/// γ = −2/(1+ξ), θ = 3(1−ξ), τ = σ: √a ↦ −√a, η: ξ ↦ conjugate generating Gal(ℚ(ξ)/ℚ).
pub fn mimo_relay(m_relays: usize, a: i64) -> Result<Vec<GaloisMat>> {
    let p = 2 * m_relays + 1;
    if m_relays < 2 || !is_prime(p) {
        return invalid(format!("M = {m_relays} needs p = 2M+1 ≥ 5 prime"));
    }
    if a >= 0 {
        return invalid("a must be negative so that ω = √a is imaginary");
    }
    let f = Field::new(vec![Generator::RealCyclotomic(p as u32), Generator::Sqrt(a)])?;
    let eta_m = relay_generator(p, m_relays).ok_or_else(|| Error::Internal("no generator found".into()))?;
    let eta = f.aut(&[eta_m, 1])?;
    let sigma = f.aut(&[1, -1])?;
    let xi = f.eval(&f.gen(0), &f.identity()).re;
    let gamma = C64::new(-2.0 / (1.0 + xi), 0.0);
    let theta = 3.0 * (1.0 - xi);
    let spec = IteratedMapSpec::new(C64::new(theta.signum(), 0.0), theta.abs(), sigma.clone())?;

    let m = m_relays;
    let mut basis = Vec::with_capacity(2 * m);
    let mut names = Vec::with_capacity(2 * m);
    for w in 0..2u32 {
        for r in 0..m as u32 {
            basis.push(Poly::monomial(1.0, vec![r, w]));
            names.push(format!("{}ξ^{r}", if w == 1 { "ω" } else { "" }));
        }
    }
    let zero = GaloisMat::zeros(&f, 2, 2);
    let mut out = Vec::with_capacity(8 * m);
    for half in 0..2 {
        for k in 0..4 * m {
            let (part, r) = (k / m, k % m);
            let x = AlgebraElement::unit(2, 2 * m, part / 2, (part % 2) * m + r);
            let comp = GaloisMat::from_fn(&f, |g| {
                let s = CyclicAlgebraSpec::from_field(&f, &basis, names.clone(), &sigma, 2, gamma, g)?;
                balanced_rep(&s, &x)
            })?;
            spec.check_on(&comp, Some(&sigma))?;
            let it = if half == 0 { iterate(&comp, &zero, &spec, true)? } else { iterate(&zero, &comp, &spec, true)? };
            out.push(relay_blockdiag(&it, &eta, m)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn alamouti_matrices() {
        let b = build(&CodeDescriptor::new(Family::Alamouti)).unwrap();
        let z = c(0., 0.);
        let want = [
            [c(1., 0.), z, z, c(1., 0.)],
            [c(0., 1.), z, z, c(0., -1.)],
            [z, c(-1., 0.), c(1., 0.), z],
            [z, c(0., 1.), c(0., 1.), z],
        ];
        for (m, w) in b.mats.iter().zip(want) {
            assert!((m - CMat::from_row_slice(2, 2, &w)).norm() < 1e-15);
        }
    }

    #[test]
    fn golden_display() {
        let b = build(&CodeDescriptor::new(Family::Golden)).unwrap();
        let th = (1.0 + 5f64.sqrt()) / 2.0;
        let sth = (1.0 - 5f64.sqrt()) / 2.0;
        // x₃ = 1: top-right i·σ(θ), bottom-left θ
        let m = &b.mats[6];
        assert!((m[(0, 1)] - c(0., sth)).norm() < 1e-12);
        assert!((m[(1, 0)] - c(th, 0.)).norm() < 1e-12);
        // x₁ = i: diagonal iθ, iσ(θ)
        let m = &b.mats[3];
        assert!((m[(0, 0)] - c(0., th)).norm() < 1e-12 && (m[(1, 1)] - c(0., sth)).norm() < 1e-12);
    }

    #[test]
    fn ranks() {
        for (f, k, n) in [
            (Family::Alamouti, 4, 2),
            (Family::Golden, 8, 2),
            (Family::Silver, 8, 2),
            (Family::SrinathRajan, 16, 4),
            (Family::MidoA4, 16, 4),
            (Family::SimoRelay, 16, 4),
            (Family::MimoRelay, 24, 12),
            (Family::Iterated, 32, 8),
        ] {
            let b = build(&CodeDescriptor::new(f)).unwrap();
            assert_eq!((b.k(), b.nt, b.t, b.rank()), (k, n, n, k), "{f}");
        }
    }

    #[test]
    fn relay_blocks() {
        let b = build(&CodeDescriptor::new(Family::MimoRelay)).unwrap();
        for m in &b.mats {
            for r in 0..12 {
                for col in 0..12 {
                    if r / 4 != col / 4 {
                        assert_eq!(m[(r, col)], c(0., 0.));
                    }
                }
            }
        }
    }

    #[test]
    fn relay_m1_is_identity_map() {
        let (_, comp) = relay_component().unwrap();
        let f = &comp[0].field;
        let eta = f.aut(&[-1, 1, 1]).unwrap();
        let r = relay_blockdiag(&comp[3], &eta, 1).unwrap();
        assert_eq!(r.value(), comp[3].value());
    }

    #[test]
    fn relay_needs_period() {
        let (_, comp) = relay_component().unwrap();
        let f = &comp[0].field;
        // η of order 2 does not satisfy η³ = id on generic entries
        let eta = f.aut(&[-1, 1, 1]).unwrap();
        let x = comp.iter().find(|x| x.apply(&eta).max_diff(x) > 1e-6).unwrap();
        assert!(relay_blockdiag(x, &eta, 3).is_err());
    }

    #[test]
    fn psi_of_identity() {
        let i4 = CMat::identity(4, 4);
        assert!((quaternionic_embed(&i4, c(-8. / 9., 0.)).unwrap() - &i4).norm() < 1e-14);
        assert!(quaternionic_embed(&CMat::identity(2, 2), c(1., 0.)).is_err());
    }

    #[test]
    fn iterate_shapes() {
        let f = Field::new(vec![Generator::Sqrt(-1)]).unwrap();
        let x = GaloisMat::from_fn(&f, |g| Ok(CMat::identity(2, 2) * f.eval(&f.gen(0), g))).unwrap();
        let zero = GaloisMat::zeros(&f, 2, 2);
        let spec = IteratedMapSpec::new(c(-1., 0.), 4.0, f.conj()).unwrap();
        let a = iterate(&x, &zero, &spec, false).unwrap();
        let want = block_diag(&[&(CMat::identity(2, 2) * c(0., 1.)), &(CMat::identity(2, 2) * c(0., -1.))]);
        assert!((a.value() - want).norm() < 1e-15);
        let b = iterate(&zero, &x, &spec, true).unwrap();
        assert!((b.value()[(0, 2)] - c(-2., 0.) * c(0., -1.)).norm() < 1e-15);
        assert!((b.value()[(2, 0)] - c(2., 0.) * c(0., 1.)).norm() < 1e-15);
        assert!(IteratedMapSpec::new(c(2., 0.), 1.0, f.conj()).is_err());
    }

    #[test]
    fn family_names_roundtrip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("nope".parse::<Family>().is_err());
    }

    #[test]
    fn mimo_relay_params() {
        assert!(mimo_relay(4, -5).is_err());
        assert!(mimo_relay(3, 5).is_err());
        assert_eq!(mimo_relay(2, -5).unwrap().len(), 16);
    }
}
