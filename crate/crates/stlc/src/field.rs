//! Number fields presented as composita of simple generators, with their
//! automorphisms acting on numeric conjugates.
//!
//! An element is a polynomial in the generators with rational coefficients.
//! An automorphism sends each generator to one of its conjugates, recorded as a
//! multiplier: a sign for square roots, a unit mod N for (real) cyclotomic
//! generators. Evaluating under an automorphism substitutes the conjugate values.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::lattice::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// √d for squarefree d (i√|d| when d < 0).
    Sqrt(i64),
    /// ζ_N = exp(2πi/N).
    RootOfUnity(u32),
    /// ξ_N = ζ_N + ζ_N⁻¹ = 2cos(2π/N).
    RealCyclotomic(u32),
}

impl Generator {
    fn value(self, m: i64) -> C64 {
        match self {
            Generator::Sqrt(d) => {
                let r = (d.unsigned_abs() as f64).sqrt() * m as f64;
                if d < 0 {
                    C64::new(0.0, r)
                } else {
                    C64::new(r, 0.0)
                }
            }
            Generator::RootOfUnity(n) => C64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64),
            Generator::RealCyclotomic(n) => C64::new(2.0 * (2.0 * PI * m as f64 / n as f64).cos(), 0.0),
        }
    }

    fn normalize(self, m: i64) -> i64 {
        match self {
            Generator::Sqrt(_) => m.signum(),
            Generator::RootOfUnity(n) => m.rem_euclid(n as i64),
            Generator::RealCyclotomic(n) => {
                let r = m.rem_euclid(n as i64);
                r.min(n as i64 - r)
            }
        }
    }

    fn compose(self, a: i64, b: i64) -> i64 {
        self.normalize(a * b)
    }

    fn units(self) -> Vec<i64> {
        match self {
            Generator::Sqrt(_) => vec![1, -1],
            Generator::RootOfUnity(n) => (1..n as i64).filter(|&m| gcd(m, n as i64) == 1).collect(),
            Generator::RealCyclotomic(n) => (1..=(n as i64) / 2).filter(|&m| gcd(m, n as i64) == 1).collect(),
        }
    }

    fn conj(self) -> i64 {
        match self {
            Generator::Sqrt(d) if d < 0 => -1,
            Generator::RootOfUnity(n) => n as i64 - 1,
            _ => 1,
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Automorphism as per-generator multipliers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Aut(pub Vec<i64>);

/// Σ c · Π g_j^{e_j}.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<(f64, Vec<u32>)>);

impl Poly {
    pub fn constant(c: f64, ngens: usize) -> Self {
        Poly(vec![(c, vec![0; ngens])])
    }

    pub fn monomial(c: f64, exps: Vec<u32>) -> Self {
        Poly(vec![(c, exps)])
    }

    pub fn plus(mut self, other: Poly) -> Self {
        self.0.extend(other.0);
        self
    }

    pub fn mul(&self, other: &Poly) -> Self {
        let mut out = Vec::with_capacity(self.0.len() * other.0.len());
        for (a, ea) in &self.0 {
            for (b, eb) in &other.0 {
                out.push((a * b, ea.iter().zip(eb).map(|(x, y)| x + y).collect()));
            }
        }
        Poly(out)
    }

    pub fn scale(mut self, c: f64) -> Self {
        for t in &mut self.0 {
            t.0 *= c;
        }
        self
    }
}

/// Compositum of linearly disjoint simple extensions of ℚ.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub gens: Vec<Generator>,
}

impl Field {
    pub fn new(gens: Vec<Generator>) -> Result<Self> {
        for g in &gens {
            match *g {
                Generator::Sqrt(d) => {
                    if d == 0 || d == 1 || !squarefree(d) {
                        return invalid(format!("√{d}: radicand must be squarefree and ≠ 0, 1"));
                    }
                }
                Generator::RootOfUnity(n) | Generator::RealCyclotomic(n) => {
                    if n < 3 {
                        return invalid(format!("cyclotomic order {n} < 3"));
                    }
                }
            }
        }
        Ok(Field { gens })
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn identity(&self) -> Aut {
        Aut(vec![1; self.gens.len()])
    }

    pub fn conj(&self) -> Aut {
        Aut(self.gens.iter().map(|g| g.conj()).collect())
    }

    /// Automorphism from raw multipliers, normalized and checked for invertibility.
    pub fn aut(&self, mults: &[i64]) -> Result<Aut> {
        if mults.len() != self.gens.len() {
            return invalid("multiplier count differs from generator count");
        }
        let a = Aut(self.gens.iter().zip(mults).map(|(g, &m)| g.normalize(m)).collect());
        for (g, &m) in self.gens.iter().zip(&a.0) {
            if !g.units().contains(&m) {
                return invalid(format!("multiplier {m} is not a unit for {g:?}"));
            }
        }
        Ok(a)
    }

    /// (a ∘ b)(x) = a(b(x)); multipliers commute, so the order is immaterial.
    pub fn compose(&self, a: &Aut, b: &Aut) -> Aut {
        Aut(self.gens.iter().zip(a.0.iter().zip(&b.0)).map(|(g, (&x, &y))| g.compose(x, y)).collect())
    }

    pub fn pow(&self, a: &Aut, e: usize) -> Aut {
        let mut r = self.identity();
        for _ in 0..e {
            r = self.compose(&r, a);
        }
        r
    }

    pub fn order(&self, a: &Aut) -> usize {
        let id = self.identity();
        let mut r = a.clone();
        let mut n = 1;
        while r != id {
            r = self.compose(&r, a);
            n += 1;
        }
        n
    }

    /// Every automorphism, identity first.
    pub fn automorphisms(&self) -> Vec<Aut> {
        let mut out = vec![Vec::new()];
        for g in &self.gens {
            let mut u = g.units();
            u.sort_by_key(|&m| (m != 1, m));
            out = out
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    u.iter().map(move |&m| {
                        let mut q = p.clone();
                        q.push(m);
                        q
                    })
                })
                .collect();
        }
        out.into_iter().map(Aut).collect()
    }

    pub fn degree(&self) -> usize {
        self.gens
            .iter()
            .map(|g| match *g {
                Generator::Sqrt(_) => 2,
                Generator::RootOfUnity(n) => euler_phi(n),
                Generator::RealCyclotomic(n) => euler_phi(n) / 2,
            })
            .product()
    }

    pub fn eval(&self, p: &Poly, a: &Aut) -> C64 {
        let vals: Vec<C64> = self.gens.iter().zip(&a.0).map(|(g, &m)| g.value(m)).collect();
        p.0.iter()
            .map(|(c, e)| {
                let mut t = C64::new(*c, 0.0);
                for (v, &k) in vals.iter().zip(e) {
                    t *= v.powu(k);
                }
                t
            })
            .sum()
    }

    pub fn gen(&self, j: usize) -> Poly {
        let mut e = vec![0; self.gens.len()];
        e[j] = 1;
        Poly::monomial(1.0, e)
    }

    pub fn one(&self) -> Poly {
        Poly::constant(1.0, self.gens.len())
    }
}

fn squarefree(d: i64) -> bool {
    let n = d.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

fn euler_phi(n: u32) -> usize {
    (1..=n).filter(|&m| gcd(m as i64, n as i64) == 1).count()
}

pub fn is_squarefree(d: i64) -> bool {
    d != 0 && squarefree(d)
}
