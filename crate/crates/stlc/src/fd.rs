//! Fast-decodability analysis: Hurwitz-Radon form, R-matrix structure and
//! family classification with complexity order.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::lattice::{vectorize, CMat, WeightBasis};
use crate::linalg;
use crate::sim::gaussian_matrix;

/// Relative zero threshold for δ_ij and r_ij.
pub const ZERO_TOL: f64 = 1e-9;

/// Above this many symbols the separator search is greedy and block-orthogonal detection is skipped.
pub const EXACT_LIMIT: usize = 16;

#[derive(Clone, Debug)]
pub struct HurwitzRadonProfile {
    pub delta: DMatrix<f64>,
    /// adj[i][j]: δ_ij above tolerance (i ≠ j)
    pub adj: Vec<Vec<bool>>,
}

impl HurwitzRadonProfile {
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.iter().filter(|&&e| e).count()).sum::<usize>() / 2
    }
}

/// δ_ij = ‖B_iB_j† + B_jB_i†‖_F², edges where δ_ij > tol·max δ.
pub fn hurwitz_radon(basis: &WeightBasis, tol: f64) -> HurwitzRadonProfile {
    let k = basis.k();
    let adjoints: Vec<CMat> = basis.mats.iter().map(|b| b.adjoint()).collect();
    let mut delta = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let a = &basis.mats[i] * &adjoints[j] + &basis.mats[j] * &adjoints[i];
            let d = linalg::frob2(&a);
            delta[(i, j)] = d;
            delta[(j, i)] = d;
        }
    }
    let max = linalg::max_abs(&delta);
    let adj = (0..k).map(|i| (0..k).map(|j| i != j && delta[(i, j)] > tol * max).collect()).collect();
    HurwitzRadonProfile { delta, adj }
}

/// B_H = [ι(HB_1) ⋯ ι(HB_k)].
pub fn b_h(basis: &WeightBasis, h: &CMat) -> Result<DMatrix<f64>> {
    if h.ncols() != basis.nt {
        return Err(Error::Dimension(format!("H has {} columns, basis has nt = {}", h.ncols(), basis.nt)));
    }
    let cols: Vec<_> = basis.mats.iter().map(|b| vectorize(&(h * b))).collect();
    Ok(DMatrix::from_columns(&cols))
}

#[derive(Clone, Debug)]
pub struct RMatrixProfile {
    /// Mean of |r_ij| over the sampled channels, in the requested ordering.
    pub r: DMatrix<f64>,
    /// true where |r_ij| ≤ tol·max|r| in every sample.
    pub zero_mask: Vec<Vec<bool>>,
    pub ordering: Vec<usize>,
}

fn check_ordering(ordering: &[usize], k: usize) -> Result<()> {
    let mut seen = vec![false; k];
    if ordering.len() != k || ordering.iter().any(|&i| i >= k || std::mem::replace(&mut seen[i], true)) {
        return invalid("ordering is not a permutation of the basis indices");
    }
    Ok(())
}

/// R of the QR decomposition of B_H with columns taken in `ordering`.
pub fn r_factor(basis: &WeightBasis, h: &CMat, ordering: &[usize]) -> Result<DMatrix<f64>> {
    check_ordering(ordering, basis.k())?;
    let bh = b_h(basis, h)?;
    if bh.nrows() < bh.ncols() {
        return Err(Error::RankDeficient { rank: bh.nrows(), expected: bh.ncols() });
    }
    let permuted = DMatrix::from_columns(&ordering.iter().map(|&i| bh.column(i).into_owned()).collect::<Vec<_>>());
    let (_, r) = linalg::qr_pos(&permuted);
    let diag_max = r.diagonal().iter().cloned().fold(0.0, f64::max);
    let rank = r.diagonal().iter().filter(|&&d| d > ZERO_TOL * diag_max).count();
    if rank < ordering.len() {
        return Err(Error::RankDeficient { rank, expected: ordering.len() });
    }
    Ok(r)
}

pub fn r_matrix(basis: &WeightBasis, h: &CMat, ordering: &[usize], tol: f64) -> Result<RMatrixProfile> {
    let r = r_factor(basis, h, ordering)?;
    let max = linalg::max_abs(&r);
    let k = r.ncols();
    let zero_mask = (0..k).map(|i| (0..k).map(|j| r[(i, j)].abs() <= tol * max).collect()).collect();
    Ok(RMatrixProfile { r: r.abs(), zero_mask, ordering: ordering.to_vec() })
}

/// AND of the zero masks (and mean |R|) over `trials` random channels with n_r = n_t.
pub fn r_matrix_sampled(
    basis: &WeightBasis,
    ordering: &[usize],
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<RMatrixProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = basis.k();
    let mut acc =
        RMatrixProfile { r: DMatrix::zeros(k, k), zero_mask: vec![vec![true; k]; k], ordering: ordering.to_vec() };
    for _ in 0..trials {
        let h = gaussian_matrix(basis.nt, basis.nt, std::f64::consts::FRAC_1_SQRT_2, &mut rng);
        let p = r_matrix(basis, &h, ordering, tol)?;
        acc.r += p.r / trials as f64;
        for (a, b) in acc.zero_mask.iter_mut().zip(&p.zero_mask) {
            for (x, &y) in a.iter_mut().zip(b) {
                *x &= y;
            }
        }
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeFamily {
    MultiGroup,
    ConditionalMultiGroup,
    FastGroup,
    BlockOrthogonal,
    None,
}

impl DecodeFamily {
    pub fn name(self) -> &'static str {
        match self {
            DecodeFamily::MultiGroup => "multi_group",
            DecodeFamily::ConditionalMultiGroup => "conditional_multi_group",
            DecodeFamily::FastGroup => "fast_group",
            DecodeFamily::BlockOrthogonal => "block_orthogonal",
            DecodeFamily::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecodabilityProfile {
    pub family: DecodeFamily,
    pub k: usize,
    pub groups: Vec<Vec<usize>>,
    pub conditioned: Vec<usize>,
    /// Largest pairwise-orthogonal subset of each group.
    pub levels: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bo_params: Option<(usize, usize, usize)>,
    pub k_prime: usize,
    pub reduction_pct: f64,
    pub fast_decodable: bool,
}

impl DecodabilityProfile {
    fn assemble(
        family: DecodeFamily,
        k: usize,
        groups: Vec<Vec<usize>>,
        conditioned: Vec<usize>,
        levels: Vec<usize>,
        k_prime: usize,
    ) -> Self {
        DecodabilityProfile {
            family,
            k,
            groups,
            conditioned,
            levels,
            bo_params: None,
            k_prime,
            reduction_pct: 100.0 * (1.0 - k_prime as f64 / k as f64),
            fast_decodable: k_prime + 2 < k,
        }
    }

    /// Column order that puts each group contiguously and Γ last (searched first).
    pub fn ordering(&self) -> Vec<usize> {
        self.groups.iter().flatten().chain(&self.conditioned).cloned().collect()
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }
}

/// Connected components of `adj` restricted to the vertices where `alive` is set.
pub fn components(adj: &[Vec<bool>], alive: &[bool]) -> Vec<Vec<usize>> {
    let k = adj.len();
    let mut seen = vec![false; k];
    let mut out = Vec::new();
    for s in 0..k {
        if !alive[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut comp = Vec::new();
        while let Some(u) = stack.pop() {
            comp.push(u);
            for v in 0..k {
                if alive[v] && !seen[v] && adj[u][v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

struct Split {
    k_prime: usize,
    conditioned: Vec<usize>,
    groups: Vec<Vec<usize>>,
}

fn split_of(adj: &[Vec<bool>], gamma: &[usize]) -> Option<Split> {
    let mut alive = vec![true; adj.len()];
    for &g in gamma {
        alive[g] = false;
    }
    let groups = components(adj, &alive);
    (groups.len() >= 2).then(|| Split {
        k_prime: gamma.len() + groups.iter().map(Vec::len).max().unwrap_or(0),
        conditioned: gamma.to_vec(),
        groups,
    })
}

/// Minimum |Γ| + max|Γ_i| over all separators, ties to the lexicographically smallest Γ.
fn exact_separator(adj: &[Vec<bool>]) -> Option<Split> {
    let k = adj.len();
    let mut best: Option<Split> = None;
    for r in 1..k {
        if best.as_ref().is_some_and(|b| r + 1 > b.k_prime) {
            break;
        }
        let mut comb: Vec<usize> = (0..r).collect();
        loop {
            if let Some(s) = split_of(adj, &comb) {
                let better = match &best {
                    None => true,
                    Some(b) => s.k_prime < b.k_prime || (s.k_prime == b.k_prime && s.conditioned < b.conditioned),
                };
                if better {
                    best = Some(s);
                }
            }
            // next combination in lexicographic order
            let mut i = r;
            while i > 0 && comb[i - 1] == k - r + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            comb[i - 1] += 1;
            for j in i..r {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    best
}

/// Removes highest-degree vertices one at a time, keeping the best split seen.
fn greedy_separator(adj: &[Vec<bool>]) -> Option<Split> {
    let k = adj.len();
    let mut alive = vec![true; k];
    let mut gamma = Vec::new();
    let mut best: Option<Split> = None;
    for _ in 0..k.saturating_sub(1) {
        let v = (0..k)
            .filter(|&v| alive[v])
            .max_by_key(|&v| ((0..k).filter(|&u| alive[u] && adj[v][u]).count(), std::cmp::Reverse(v)))
            .unwrap();
        alive[v] = false;
        gamma.push(v);
        let mut sorted = gamma.clone();
        sorted.sort_unstable();
        if let Some(s) = split_of(adj, &sorted) {
            if best.as_ref().is_none_or(|b| s.k_prime < b.k_prime) {
                best = Some(s);
            }
        }
    }
    best
}

/// Size of the largest pairwise-orthogonal subset of `group`.
fn orthogonal_levels(adj: &[Vec<bool>], group: &[usize]) -> usize {
    let n = group.len();
    if n <= 20 {
        let mut best = 0;
        for mask in 1u32..(1 << n) {
            let size = mask.count_ones() as usize;
            if size <= best {
                continue;
            }
            let ok = (0..n)
                .all(|a| mask & (1 << a) == 0 || (a + 1..n).all(|b| mask & (1 << b) == 0 || !adj[group[a]][group[b]]));
            if ok {
                best = size;
            }
        }
        best
    } else {
        let mut chosen: Vec<usize> = Vec::new();
        for &v in group {
            if chosen.iter().all(|&u| !adj[u][v]) {
                chosen.push(v);
            }
        }
        chosen.len()
    }
}

type Mask = Vec<Vec<bool>>;
type BoSplit = ((usize, usize, usize), Vec<Vec<usize>>, Vec<Vec<usize>>);

/// Masks of G = B_HᵀB_H and G⁻¹ that are zero for every sampled channel.
fn gram_masks(basis: &WeightBasis, trials: usize, seed: u64, tol: f64) -> Result<(Mask, Mask)> {
    let k = basis.k();
    let mut gz = vec![vec![true; k]; k];
    let mut giz = vec![vec![true; k]; k];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let h = gaussian_matrix(basis.nt, basis.nt, std::f64::consts::FRAC_1_SQRT_2, &mut rng);
        let bh = b_h(basis, &h)?;
        let g = bh.transpose() * bh;
        let gi = g.clone().try_inverse().ok_or(Error::RankDeficient { rank: 0, expected: k })?;
        let (m, mi) = (linalg::max_abs(&g), linalg::max_abs(&gi));
        for i in 0..k {
            for j in 0..k {
                gz[i][j] &= g[(i, j)].abs() <= tol * m;
                giz[i][j] &= gi[(i, j)].abs() <= tol * mi;
            }
        }
    }
    Ok((gz, giz))
}

/// Packs component sizes into `bins` bins of exactly `p`; returns the bin contents.
fn pack(comps: &[Vec<usize>], bins: usize, p: usize) -> Option<Vec<Vec<usize>>> {
    fn go(comps: &[Vec<usize>], i: usize, fill: &mut [Vec<usize>], p: usize) -> bool {
        if i == comps.len() {
            return fill.iter().all(|b| b.len() == p);
        }
        for b in 0..fill.len() {
            if fill[b].len() + comps[i].len() <= p {
                // identical empty bins are interchangeable
                if fill[b].is_empty() && fill[..b].iter().any(|x| x.is_empty()) {
                    continue;
                }
                let before = fill[b].len();
                fill[b].extend(&comps[i]);
                if go(comps, i + 1, fill, p) {
                    return true;
                }
                fill[b].truncate(before);
            }
        }
        false
    }
    if comps.iter().any(|c| c.len() > p) {
        return None;
    }
    let mut sorted = comps.to_vec();
    sorted.sort_by_key(|c| std::cmp::Reverse(c.len()));
    let mut fill = vec![Vec::new(); bins];
    go(&sorted, 0, &mut fill, p).then(|| {
        for b in &mut fill {
            b.sort_unstable();
        }
        fill.sort();
        fill
    })
}

/// Two-level block-orthogonal structure (g = 2): the symbols split into A and B of
/// k·p each, with G restricted to A and G⁻¹ restricted to B block diagonal in k blocks of p.
/// Returns ((2, k, p), blocks of A, blocks of B) for the smallest p.
fn detect_block_orthogonal(basis: &WeightBasis, trials: usize, seed: u64, tol: f64) -> Result<Option<BoSplit>> {
    let n = basis.k();
    if !n.is_multiple_of(2) || n < 4 {
        return Ok(None);
    }
    let (gz, giz) = gram_masks(basis, trials, seed, tol)?;
    let g_adj: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i != j && !gz[i][j]).collect()).collect();
    let gi_adj: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i != j && !giz[i][j]).collect()).collect();
    let half = n / 2;
    for p in 1..=half / 2 {
        if !half.is_multiple_of(p) {
            continue;
        }
        let bins = half / p;
        let mut comb: Vec<usize> = (0..half).collect();
        loop {
            let mut in_a = vec![false; n];
            for &a in &comb {
                in_a[a] = true;
            }
            let in_b: Vec<bool> = in_a.iter().map(|x| !x).collect();
            if let Some(ba) = pack(&components(&g_adj, &in_a), bins, p) {
                if let Some(bb) = pack(&components(&gi_adj, &in_b), bins, p) {
                    return Ok(Some(((2, bins, p), ba, bb)));
                }
            }
            let mut i = half;
            while i > 0 && comb[i - 1] == n - half + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            comb[i - 1] += 1;
            for j in i..half {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    Ok(None)
}

/// k′ of a (g, k, p) block-orthogonal code.
pub fn bo_complexity((g, k, p): (usize, usize, usize)) -> usize {
    (g - 1) * k * p + p
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { trials: 8, seed: 0x5eed, tol: ZERO_TOL }
    }
}

pub fn classify(basis: &WeightBasis, trials: usize) -> Result<DecodabilityProfile> {
    classify_with(basis, &ClassifyOptions { trials, ..Default::default() })
}

pub fn classify_with(basis: &WeightBasis, opts: &ClassifyOptions) -> Result<DecodabilityProfile> {
    basis.validate()?;
    let k = basis.k();
    let hr = hurwitz_radon(basis, opts.tol);
    let adj = &hr.adj;
    let comps = components(adj, &vec![true; k]);

    let levels_of = |groups: &[Vec<usize>]| groups.iter().map(|g| orthogonal_levels(adj, g)).collect::<Vec<_>>();

    let mut profile = if comps.len() >= 2 {
        let kp = comps.iter().map(Vec::len).max().unwrap();
        let levels = levels_of(&comps);
        DecodabilityProfile::assemble(DecodeFamily::MultiGroup, k, comps, vec![], levels, kp)
    } else {
        let split = if k <= EXACT_LIMIT { exact_separator(adj) } else { greedy_separator(adj) };
        let all: Vec<usize> = (0..k).collect();
        let fast_levels = orthogonal_levels(adj, &all);
        let fast_kp = k + 1 - fast_levels.max(1);
        match split {
            Some(s) if s.k_prime <= fast_kp => {
                let levels = levels_of(&s.groups);
                DecodabilityProfile::assemble(
                    DecodeFamily::ConditionalMultiGroup,
                    k,
                    s.groups,
                    s.conditioned,
                    levels,
                    s.k_prime,
                )
            }
            _ if fast_levels >= 2 => {
                DecodabilityProfile::assemble(DecodeFamily::FastGroup, k, vec![all], vec![], vec![fast_levels], fast_kp)
            }
            _ => DecodabilityProfile::assemble(
                DecodeFamily::None,
                k,
                vec![(0..k).collect()],
                vec![],
                vec![fast_levels.max(1)],
                k,
            ),
        }
    };

    if k <= EXACT_LIMIT && opts.trials > 0 {
        if let Some((params, a, b)) = detect_block_orthogonal(basis, opts.trials, opts.seed, opts.tol)? {
            let kp = bo_complexity(params);
            if profile.family == DecodeFamily::None && kp < k {
                let groups: Vec<Vec<usize>> = a.into_iter().chain(b).collect();
                let levels = levels_of(&groups);
                profile = DecodabilityProfile::assemble(DecodeFamily::BlockOrthogonal, k, groups, vec![], levels, kp);
            }
            if kp <= profile.k_prime {
                profile.bo_params = Some(params);
            }
        }
    }
    Ok(profile)
}

fn nu2(n: usize) -> u32 {
    n.trailing_zeros()
}

/// Named bound violations: "group bound" (g ≤ 2ν₂(n)+4) and, for full-rate codes, "full-rate bound" (k′ ≥ n²+1).
pub fn bounds_check(profile: &DecodabilityProfile, n: usize, full_rate: bool) -> Vec<String> {
    let mut out = Vec::new();
    let g = match profile.family {
        DecodeFamily::MultiGroup | DecodeFamily::ConditionalMultiGroup => profile.group_count(),
        _ => 1,
    };
    let gmax = 2 * nu2(n) as usize + 4;
    if g > gmax {
        out.push(format!("group bound: g = {g} > 2ν₂({n})+4 = {gmax}"));
    }
    if full_rate && profile.k_prime < n * n + 1 {
        out.push(format!("full-rate bound: k′ = {} < n²+1 = {}", profile.k_prime, n * n + 1));
    }
    out
}

/// Full rate for an n×n code means k = 2n².
pub fn is_full_rate(basis: &WeightBasis) -> bool {
    basis.nt == basis.t && basis.k() == 2 * basis.nt * basis.nt
}
