//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::codebook::{build, CodeDescriptor, Family};
use crate::error::{invalid, Error, Result};
use crate::fd::{
    bounds_check, classify_with, is_full_rate, ClassifyOptions, DecodabilityProfile, DecodeFamily, ZERO_TOL,
};
use crate::lattice::{lattice_profile, WeightBasis, C64};
use crate::sim::{run_campaign, to_csv, Alphabet, CampaignOptions, ChannelConfig, Decoder, SearchPlan, ML_LIMIT};

#[derive(Parser, Debug)]
#[command(name = "stlc", version, about = "Space-time lattice codes: construction, analysis, simulation")]
pub struct Cli {
    /// Write the result to this file instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Relative zero tolerance for orthogonality tests
    #[arg(long, global = true, default_value_t = ZERO_TOL)]
    pub tol: f64,
    /// Seed for every random draw
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit the weight-matrix basis of a named code as JSON
    Construct {
        family: String,
        /// Relay count
        #[arg(long = "M")]
        m: Option<usize>,
        /// γ for golden (e.g. i, -1, 0.5+2i)
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
        /// Radicand a of ω = √a for mimo_relay
        #[arg(long, allow_hyphen_values = true)]
        a: Option<i64>,
    },
    /// Generator, Gram matrix, volume and minimum determinant
    Lattice {
        /// Family name or basis JSON file
        input: String,
        #[arg(long, default_value_t = 2)]
        bound: u32,
    },
    /// Fast-decodability profile
    Analyze {
        input: String,
        /// Random channels for the R-matrix zero pattern
        #[arg(long, default_value_t = 8)]
        trials: usize,
    },
    /// Error-rate campaign as CSV
    Simulate {
        input: String,
        /// SNR points in dB, comma separated
        #[arg(long, default_value = "0,5,10,15,20", allow_hyphen_values = true)]
        snr: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Comma list of integers or pamM
        #[arg(long, default_value = "pam2", allow_hyphen_values = true)]
        alphabet: String,
        /// ml, sphere or both (default: both when exhaustive search fits, else sphere)
        #[arg(long)]
        decoder: Option<String>,
        /// Receive antennas (default n_t)
        #[arg(long)]
        nr: Option<usize>,
        /// Record zeros in the seconds column so output depends only on the seed
        #[arg(long)]
        no_timing: bool,
    },
    /// Every shipped code with its complexity order
    Zoo {
        #[arg(long, default_value_t = 8)]
        trials: usize,
    },
}

pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Invalid(format!("cannot parse complex number '{s}'"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not a leading sign or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && bytes[p - 1] != b'e');
    let (re, im) = match split {
        Some(p) => (&body[..p], &body[p..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(C64::new(re.parse::<f64>().map_err(|_| bad())?, im))
}

/// A registered family name (with default parameters) or a basis JSON file.
pub fn load_basis(input: &str) -> Result<WeightBasis> {
    if let Ok(f) = input.parse::<Family>() {
        return build(&CodeDescriptor::new(f));
    }
    let path = std::path::Path::new(input);
    if !path.exists() {
        return invalid(format!("'{input}' is neither a family name nor a file"));
    }
    let basis = WeightBasis::from_json(&std::fs::read_to_string(path)?)?;
    basis.validate()?;
    Ok(basis)
}

pub fn analyze_json(basis: &WeightBasis, profile: &DecodabilityProfile) -> serde_json::Value {
    let mut v = json!({
        "family": profile.family.name(),
        "k": profile.k,
        "groups": profile.groups,
        "conditioned": profile.conditioned,
        "levels": profile.levels,
        "k_prime": profile.k_prime,
        "reduction_pct": profile.reduction_pct,
        "fast_decodable": profile.fast_decodable,
        "bounds_violations": bounds_check(profile, basis.nt, is_full_rate(basis)),
    });
    if let Some(p) = profile.bo_params {
        v["bo_params"] = json!([p.0, p.1, p.2]);
    }
    v
}

fn family_label(p: &DecodabilityProfile) -> String {
    match p.family {
        DecodeFamily::MultiGroup | DecodeFamily::ConditionalMultiGroup => {
            format!("{}({})", p.family.name(), p.groups.len())
        }
        DecodeFamily::BlockOrthogonal => {
            let (g, k, q) = p.bo_params.unwrap_or((0, 0, 0));
            format!("block_orthogonal({g},{k},{q})")
        }
        _ => p.family.name().to_string(),
    }
}

/// One line per shipped code, recomputed from the constructors.
pub fn zoo(opts: &ClassifyOptions) -> Result<String> {
    let mut out = String::new();
    for f in Family::ALL {
        let basis = build(&CodeDescriptor::new(f))?;
        let p = classify_with(&basis, opts)?;
        let mut line = format!(
            "{}, n={}, k={}, k′={}, {}, reduction={:.1}%",
            f.name(),
            basis.nt,
            basis.k(),
            p.k_prime,
            family_label(&p),
            p.reduction_pct
        );
        if p.family != DecodeFamily::BlockOrthogonal {
            if let Some((g, k, q)) = p.bo_params {
                line.push_str(&format!(", block_orthogonal({g},{k},{q})"));
            }
        }
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("bad number '{v}'"))))
        .collect()
}

/// Runs one command and returns its textual output.
pub fn execute(cli: &Cli) -> Result<String> {
    let copts = |trials| ClassifyOptions { trials, seed: cli.seed, tol: cli.tol };
    match &cli.command {
        Command::Construct { family, m, gamma, a } => {
            let mut desc = CodeDescriptor::new(family.parse()?);
            desc.relays = *m;
            desc.gamma = gamma.as_deref().map(parse_complex).transpose()?;
            desc.a = *a;
            Ok(build(&desc)?.to_json())
        }
        Command::Lattice { input, bound } => {
            let basis = load_basis(input)?;
            Ok(serde_json::to_string_pretty(&lattice_profile(&basis, *bound)?)?)
        }
        Command::Analyze { input, trials } => {
            let basis = load_basis(input)?;
            let p = classify_with(&basis, &copts(*trials))?;
            Ok(serde_json::to_string_pretty(&analyze_json(&basis, &p))?)
        }
        Command::Simulate { input, snr, trials, alphabet, decoder, nr, no_timing } => {
            let basis = load_basis(input)?;
            let alphabet = Alphabet::parse(alphabet)?;
            let mut cfg = ChannelConfig::for_basis(&basis, parse_list(snr)?, *trials, cli.seed)?;
            if let Some(nr) = nr {
                cfg = ChannelConfig::new(basis.nt, *nr, basis.t, cfg.snr_db, cfg.trials, cli.seed)?;
            }
            let decoder = match decoder {
                Some(d) => d.parse()?,
                None if (alphabet.len() as f64).powi(basis.k() as i32) <= ML_LIMIT => Decoder::Both,
                None => Decoder::Sphere,
            };
            let profile = classify_with(&basis, &copts(0))?;
            let opts = CampaignOptions { decoder, plan: Some(SearchPlan::from_profile(&profile)), timing: !no_timing };
            Ok(to_csv(&run_campaign(&basis, &alphabet, &cfg, &opts)?))
        }
        Command::Zoo { trials } => zoo(&copts(*trials)),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let text = match execute(&cli) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let text = if text.ends_with('\n') { text } else { text + "\n" };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
