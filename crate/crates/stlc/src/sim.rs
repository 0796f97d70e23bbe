//! Rayleigh fading MIMO simulation with exhaustive and sphere ML decoding.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Error, Result};
use crate::fd::{b_h, DecodabilityProfile, DecodeFamily};
use crate::lattice::{vectorize, CMat, WeightBasis, C64};
use crate::linalg;

/// Largest |S|^k the exhaustive decoder accepts.
pub const ML_LIMIT: f64 = 16_777_216.0;

pub const CALIBRATION_SAMPLES: usize = 50_000;

/// Entries with independent N(0, σ²) real and imaginary parts.
pub fn gaussian_matrix(rows: usize, cols: usize, sigma: f64, rng: &mut impl Rng) -> CMat {
    if sigma == 0.0 {
        return CMat::zeros(rows, cols);
    }
    let n = Normal::new(0.0, sigma).expect("finite σ");
    CMat::from_fn(rows, cols, |_, _| C64::new(n.sample(rng), n.sample(rng)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelConfig {
    pub nt: usize,
    pub nr: usize,
    pub t: usize,
    pub sigma_h: f64,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn new(nt: usize, nr: usize, t: usize, snr_db: Vec<f64>, trials: usize, seed: u64) -> Result<Self> {
        if nt == 0 || nr == 0 {
            return invalid("antenna counts must be positive");
        }
        if t < nt {
            return invalid(format!("coherence time T = {t} must be at least nt = {nt}"));
        }
        Ok(ChannelConfig { nt, nr, t, sigma_h: std::f64::consts::FRAC_1_SQRT_2, snr_db, trials, seed })
    }

    /// Square channel matched to a basis: n_r = n_t.
    pub fn for_basis(basis: &WeightBasis, snr_db: Vec<f64>, trials: usize, seed: u64) -> Result<Self> {
        Self::new(basis.nt, basis.nt, basis.t, snr_db, trials, seed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Alphabet {
    pub values: Vec<i64>,
}

impl Alphabet {
    pub fn new(mut values: Vec<i64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("alphabet is empty");
        }
        values.sort_unstable();
        values.dedup();
        let mut neg: Vec<i64> = values.iter().map(|v| -v).collect();
        neg.sort_unstable();
        if neg != values {
            return invalid("alphabet must be symmetric around the origin");
        }
        Ok(Alphabet { values })
    }

    /// {±1, ±3, …, ±(m−1)} for even m.
    pub fn pam(m: usize) -> Result<Self> {
        if m == 0 || !m.is_multiple_of(2) {
            return invalid("PAM order must be even and positive");
        }
        Self::new((0..m as i64).map(|i| 2 * i - (m as i64 - 1)).collect())
    }

    /// Comma list ("-3,-1,1,3") or "pamM".
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(m) = s.strip_prefix("pam") {
            return Self::pam(m.parse().map_err(|_| Error::Invalid(format!("bad PAM order '{m}'")))?);
        }
        let vals = s
            .split(',')
            .map(|v| v.trim().parse::<i64>().map_err(|_| Error::Invalid(format!("bad alphabet value '{v}'"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vals)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Generator for one trial; the stream index keeps trials independent of scheduling.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn draw_channel(cfg: &ChannelConfig, trial: u64) -> CMat {
    gaussian_matrix(cfg.nr, cfg.nt, cfg.sigma_h, &mut trial_rng(cfg.seed, trial))
}

fn random_coeffs(alphabet: &Alphabet, k: usize, rng: &mut impl Rng) -> Vec<i64> {
    (0..k).map(|_| alphabet.values[rng.random_range(0..alphabet.len())]).collect()
}

fn as_f64(s: &[i64]) -> Vec<f64> {
    s.iter().map(|&v| v as f64).collect()
}

/// Mean ‖HX‖² over random channels and uniformly drawn codewords.
pub fn signal_power(basis: &WeightBasis, alphabet: &Alphabet, cfg: &ChannelConfig, samples: usize, stream: u64) -> f64 {
    let mut rng = trial_rng(cfg.seed ^ 0x9e37_79b9_7f4a_7c15, stream);
    let mut acc = 0.0;
    for _ in 0..samples {
        let h = gaussian_matrix(cfg.nr, cfg.nt, cfg.sigma_h, &mut rng);
        let x = basis.combine(&as_f64(&random_coeffs(alphabet, basis.k(), &mut rng)));
        acc += linalg::frob2(&(h * x));
    }
    acc / samples as f64
}

/// σ_n with E‖HX‖² / E‖N‖² = 10^{snr/10}, where N has N(0, σ_n²) real and imaginary parts.
pub fn calibrate_noise(basis: &WeightBasis, alphabet: &Alphabet, cfg: &ChannelConfig, snr_db: f64) -> Result<f64> {
    if basis.nt != cfg.nt || basis.t != cfg.t {
        return Err(Error::Dimension("channel configuration does not match the basis".into()));
    }
    let p = signal_power(basis, alphabet, cfg, CALIBRATION_SAMPLES, u64::MAX);
    if p <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let snr = 10f64.powf(snr_db / 10.0);
    Ok((p / (snr * 2.0 * (cfg.nr * cfg.t) as f64)).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub coeffs: Vec<i64>,
    pub metric: f64,
    pub nodes_visited: u64,
}

fn check_shapes(y: &CMat, h: &CMat, basis: &WeightBasis) -> Result<()> {
    if h.ncols() != basis.nt || y.nrows() != h.nrows() || y.ncols() != basis.t {
        return Err(Error::Dimension("Y, H and the basis are inconsistent".into()));
    }
    Ok(())
}

/// Global minimizer of ‖Y − HX‖² over S^k, ties to the lexicographically smallest vector.
pub fn ml_exhaustive(y: &CMat, h: &CMat, basis: &WeightBasis, alphabet: &Alphabet) -> Result<DecodeResult> {
    check_shapes(y, h, basis)?;
    let k = basis.k();
    let size = (alphabet.len() as f64).powi(k as i32);
    if size > ML_LIMIT {
        return Err(Error::SearchTooLarge { size, limit: ML_LIMIT });
    }
    let bh = b_h(basis, h)?;
    let yv = vectorize(y);
    let vals = &alphabet.values;
    let q = vals.len();
    let mut idx = vec![0usize; k];
    let s0: Vec<f64> = vec![vals[0] as f64; k];
    let mut resid = &yv - &bh * DVector::from_vec(s0);
    let mut best = DecodeResult { coeffs: vec![vals[0]; k], metric: resid.norm_squared(), nodes_visited: 0 };
    let mut count = 0u64;
    loop {
        count += 1;
        let m = resid.norm_squared();
        if m < best.metric {
            best.metric = m;
            best.coeffs = idx.iter().map(|&i| vals[i]).collect();
        }
        // last coordinate varies fastest: lexicographic order
        let mut p = k;
        loop {
            if p == 0 {
                best.nodes_visited = count;
                return Ok(best);
            }
            p -= 1;
            let old = vals[idx[p]] as f64;
            if idx[p] + 1 < q {
                idx[p] += 1;
                let step = vals[idx[p]] as f64 - old;
                resid.axpy(-step, &bh.column(p), 1.0);
                break;
            }
            idx[p] = 0;
            let step = vals[0] as f64 - old;
            resid.axpy(-step, &bh.column(p), 1.0);
        }
    }
}

/// Column order for the sphere decoder: groups contiguous, conditioned symbols last.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchPlan {
    pub order: Vec<usize>,
    pub group_sizes: Vec<usize>,
    pub conditioned: usize,
}

impl SearchPlan {
    pub fn from_profile(p: &DecodabilityProfile) -> Self {
        match p.family {
            DecodeFamily::MultiGroup | DecodeFamily::ConditionalMultiGroup => SearchPlan {
                order: p.ordering(),
                group_sizes: p.groups.iter().map(Vec::len).collect(),
                conditioned: p.conditioned.len(),
            },
            _ => Self::single(p.k),
        }
    }

    pub fn single(k: usize) -> Self {
        SearchPlan { order: (0..k).collect(), group_sizes: vec![k], conditioned: 0 }
    }
}

struct Tree<'a> {
    r: &'a DMatrix<f64>,
    vals: &'a [i64],
    nodes: u64,
}

impl Tree<'_> {
    /// Depth-first search of levels hi−1 … lo with targets b (already reduced by
    /// fixed columns outside the block). Returns the best block assignment with metric ≤ radius.
    fn block(&mut self, b: &[f64], lo: usize, hi: usize, radius: f64) -> Option<(Vec<i64>, f64)> {
        let mut s = vec![0i64; hi - lo];
        let mut best: Option<(Vec<i64>, f64)> = None;
        let mut radius = radius;
        self.descend(b, lo, hi, hi, 0.0, &mut s, &mut radius, &mut best);
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &mut self,
        b: &[f64],
        lo: usize,
        hi: usize,
        level: usize,
        partial: f64,
        s: &mut [i64],
        radius: &mut f64,
        best: &mut Option<(Vec<i64>, f64)>,
    ) {
        if level == lo {
            let better = match best {
                None => true,
                Some((bs, bm)) => partial < *bm || (partial == *bm && s[..] < bs[..]),
            };
            if better {
                *best = Some((s.to_vec(), partial));
                *radius = partial;
            }
            return;
        }
        let i = level - 1;
        let mut c = b[i];
        for j in level..hi {
            c -= self.r[(i, j)] * s[j - lo] as f64;
        }
        let rii = self.r[(i, i)];
        let mut kids: Vec<(f64, i64)> = self.vals.iter().map(|&v| ((c - rii * v as f64).powi(2), v)).collect();
        kids.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (m, v) in kids {
            let p = partial + m;
            if p > *radius {
                break;
            }
            self.nodes += 1;
            s[i - lo] = v;
            self.descend(b, lo, hi, i, p, s, radius, best);
        }
    }
}

/// Exact ML by depth-first search over the triangular system R s ≈ Qᵀι(Y).
///
/// With a plan whose groups are decoupled in R (checked per channel), Γ is searched
/// first and each group is searched independently below every Γ leaf.
pub fn sphere_decode(
    y: &CMat,
    h: &CMat,
    basis: &WeightBasis,
    alphabet: &Alphabet,
    plan: Option<&SearchPlan>,
) -> Result<DecodeResult> {
    check_shapes(y, h, basis)?;
    let k = basis.k();
    let single = SearchPlan::single(k);
    let mut plan = plan.unwrap_or(&single);
    if plan.order.len() != k || plan.group_sizes.iter().sum::<usize>() + plan.conditioned != k {
        return invalid("search plan does not cover the basis");
    }
    let bh = b_h(basis, h)?;
    if bh.nrows() < k {
        return Err(Error::RankDeficient { rank: bh.nrows(), expected: k });
    }
    let cols: Vec<_> = plan.order.iter().map(|&i| bh.column(i).into_owned()).collect();
    let (q, r) = linalg::qr_pos(&DMatrix::from_columns(&cols));
    let dmax = r.diagonal().iter().cloned().fold(0.0, f64::max);
    if r.diagonal().iter().any(|&d| d <= 1e-12 * dmax) {
        let rank = r.diagonal().iter().filter(|&&d| d > 1e-12 * dmax).count();
        return Err(Error::RankDeficient { rank, expected: k });
    }
    let yv = vectorize(y);
    let yp = q.transpose() * &yv;
    let offset = (yv.norm_squared() - yp.norm_squared()).max(0.0);

    let gs = k - plan.conditioned;
    let mut bounds = Vec::new();
    let mut lo = 0;
    for &g in &plan.group_sizes {
        bounds.push((lo, lo + g));
        lo += g;
    }
    let rmax = linalg::max_abs(&r);
    let decoupled = bounds.iter().all(|&(a, b)| (a..b).all(|i| (b..gs).all(|j| r[(i, j)].abs() <= 1e-9 * rmax)));
    if !decoupled {
        plan = &single;
        bounds = vec![(0, k)];
    }
    let gs = k - plan.conditioned;

    let mut tree = Tree { r: &r, vals: &alphabet.values, nodes: 0 };
    let mut best: Option<(Vec<i64>, f64)> = None;
    let mut gamma = vec![0i64; plan.conditioned];
    search_gamma(&mut tree, yp.as_slice(), &bounds, gs, k, k, 0.0, &mut gamma, &mut best);
    let (s_perm, metric) = best.ok_or_else(|| Error::Internal("sphere search found no leaf".into()))?;
    let mut coeffs = vec![0i64; k];
    for (pos, &orig) in plan.order.iter().enumerate() {
        coeffs[orig] = s_perm[pos];
    }
    Ok(DecodeResult { coeffs, metric: metric + offset, nodes_visited: tree.nodes })
}

#[allow(clippy::too_many_arguments)]
fn search_gamma(
    tree: &mut Tree,
    yp: &[f64],
    bounds: &[(usize, usize)],
    gs: usize,
    k: usize,
    level: usize,
    partial: f64,
    gamma: &mut [i64],
    best: &mut Option<(Vec<i64>, f64)>,
) {
    let radius = best.as_ref().map_or(f64::INFINITY, |b| b.1);
    if level == gs {
        // Γ fixed: groups are independent
        let mut total = partial;
        let mut s = vec![0i64; k];
        s[gs..].copy_from_slice(gamma);
        for &(lo, hi) in bounds {
            let b: Vec<f64> = (0..hi)
                .map(|i| {
                    if i < lo {
                        return 0.0;
                    }
                    yp[i] - (gs..k).map(|j| tree.r[(i, j)] * s[j] as f64).sum::<f64>()
                })
                .collect();
            match tree.block(&b, lo, hi, radius - total) {
                Some((blk, m)) => {
                    total += m;
                    s[lo..hi].copy_from_slice(&blk);
                }
                None => return,
            }
        }
        let better = match best {
            None => true,
            Some((bs, bm)) => total < *bm || (total == *bm && s < *bs),
        };
        if better {
            *best = Some((s, total));
        }
        return;
    }
    let i = level - 1;
    let mut c = yp[i];
    for j in level..k {
        c -= tree.r[(i, j)] * gamma[j - gs] as f64;
    }
    let rii = tree.r[(i, i)];
    let mut kids: Vec<(f64, i64)> = tree.vals.iter().map(|&v| ((c - rii * v as f64).powi(2), v)).collect();
    kids.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (m, v) in kids {
        let p = partial + m;
        if p > best.as_ref().map_or(f64::INFINITY, |b| b.1) {
            break;
        }
        tree.nodes += 1;
        gamma[i - gs] = v;
        search_gamma(tree, yp, bounds, gs, k, i, p, gamma, best);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decoder {
    Ml,
    Sphere,
    Both,
}

impl std::str::FromStr for Decoder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ml" => Ok(Decoder::Ml),
            "sphere" => Ok(Decoder::Sphere),
            "both" => Ok(Decoder::Both),
            _ => invalid(format!("unknown decoder '{s}' (ml, sphere, both)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignRow {
    pub snr_db: f64,
    pub trials: usize,
    pub cer_ml: Option<f64>,
    pub cer_sphere: Option<f64>,
    pub nodes_mean: f64,
    pub nodes_max: u64,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct CampaignOptions {
    pub decoder: Decoder,
    pub plan: Option<SearchPlan>,
    /// Wall-clock seconds are recorded only when set; otherwise the column is 0.
    pub timing: bool,
}

/// One row per SNR point. Trial j at point i draws from stream i·trials + j.
pub fn run_campaign(
    basis: &WeightBasis,
    alphabet: &Alphabet,
    cfg: &ChannelConfig,
    opts: &CampaignOptions,
) -> Result<Vec<CampaignRow>> {
    if cfg.trials == 0 {
        return Ok(Vec::new());
    }
    let mut rows = Vec::with_capacity(cfg.snr_db.len());
    for (pi, &snr) in cfg.snr_db.iter().enumerate() {
        let start = Instant::now();
        let sigma_n = calibrate_noise(basis, alphabet, cfg, snr)?;
        let (mut err_ml, mut err_sd) = (0usize, 0usize);
        let (mut nodes_sum, mut nodes_max) = (0u64, 0u64);
        for j in 0..cfg.trials {
            let mut rng = trial_rng(cfg.seed, (pi * cfg.trials + j) as u64);
            let h = gaussian_matrix(cfg.nr, cfg.nt, cfg.sigma_h, &mut rng);
            let s = random_coeffs(alphabet, basis.k(), &mut rng);
            let n = gaussian_matrix(cfg.nr, cfg.t, sigma_n, &mut rng);
            let y = &h * basis.combine(&as_f64(&s)) + n;
            let mut nodes = None;
            if matches!(opts.decoder, Decoder::Ml | Decoder::Both) {
                let d = ml_exhaustive(&y, &h, basis, alphabet)?;
                err_ml += (d.coeffs != s) as usize;
                nodes = Some(d.nodes_visited);
            }
            if matches!(opts.decoder, Decoder::Sphere | Decoder::Both) {
                let d = sphere_decode(&y, &h, basis, alphabet, opts.plan.as_ref())?;
                err_sd += (d.coeffs != s) as usize;
                nodes = Some(d.nodes_visited);
            }
            let nodes = nodes.unwrap_or(0);
            nodes_sum += nodes;
            nodes_max = nodes_max.max(nodes);
        }
        let t = cfg.trials as f64;
        rows.push(CampaignRow {
            snr_db: snr,
            trials: cfg.trials,
            cer_ml: matches!(opts.decoder, Decoder::Ml | Decoder::Both).then(|| err_ml as f64 / t),
            cer_sphere: matches!(opts.decoder, Decoder::Sphere | Decoder::Both).then(|| err_sd as f64 / t),
            nodes_mean: nodes_sum as f64 / t,
            nodes_max,
            seconds: if opts.timing { start.elapsed().as_secs_f64() } else { 0.0 },
        });
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "snr_db,trials,cer_ml,cer_sphere,nodes_mean,nodes_max,seconds";

pub fn to_csv(rows: &[CampaignRow]) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |x| x.to_string());
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.snr_db,
            r.trials,
            opt(r.cer_ml),
            opt(r.cer_sphere),
            r.nodes_mean,
            r.nodes_max,
            r.seconds
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{build, CodeDescriptor, Family};

    #[test]
    fn zero_fading() {
        let mut cfg = ChannelConfig::new(2, 2, 2, vec![0.0], 1, 7).unwrap();
        cfg.sigma_h = 0.0;
        assert_eq!(draw_channel(&cfg, 3), CMat::zeros(2, 2));
    }

    #[test]
    fn channel_determinism() {
        let cfg = ChannelConfig::new(2, 3, 2, vec![0.0], 1, 99).unwrap();
        assert_eq!(draw_channel(&cfg, 5), draw_channel(&cfg, 5));
        assert_ne!(draw_channel(&cfg, 5), draw_channel(&cfg, 6));
    }

    #[test]
    fn alphabet_rules() {
        assert_eq!(Alphabet::parse("pam4").unwrap().values, vec![-3, -1, 1, 3]);
        assert_eq!(Alphabet::parse("1,-1").unwrap().values, vec![-1, 1]);
        assert!(Alphabet::parse("0,1").is_err());
        assert!(Alphabet::parse("").is_err());
    }

    #[test]
    fn zero_power_rejected() {
        let b = build(&CodeDescriptor::new(Family::Alamouti)).unwrap();
        let cfg = ChannelConfig::for_basis(&b, vec![0.0], 1, 1).unwrap();
        let a = Alphabet::new(vec![0]).unwrap();
        assert!(matches!(calibrate_noise(&b, &a, &cfg, 0.0), Err(Error::ZeroPower)));
    }

    #[test]
    fn coherence_time_checked() {
        assert!(ChannelConfig::new(4, 1, 2, vec![], 1, 0).is_err());
    }

    #[test]
    fn empty_campaign() {
        let b = build(&CodeDescriptor::new(Family::Alamouti)).unwrap();
        let cfg = ChannelConfig::for_basis(&b, vec![0.0, 5.0], 0, 1).unwrap();
        let opts = CampaignOptions { decoder: Decoder::Both, plan: None, timing: false };
        assert!(run_campaign(&b, &Alphabet::pam(2).unwrap(), &cfg, &opts).unwrap().is_empty());
    }
}
