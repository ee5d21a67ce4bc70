use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use forge_core::artifact::{verify, ArtifactFile};
use forge_core::coded::SubexponentialSpec;
use forge_core::error::ForgeError;
use forge_core::rotation::{gap_spectrum, RotationNumber};
use forge_core::seed::{Mode, SeedConfig, DEFAULT_DEMO_FACTOR};
use forge_core::spectrum::{gap_report, DEFAULT_TOL};
use forge_core::sturmian;
use forge_core::tower::{run_induction, InductionConfig, SamplePoint};

const DEFAULT_ALPHA_DEPTH: usize = 11;

#[derive(Parser)]
#[command(name = "forge", version, about = "Build and check nested coded subshifts over a rotation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gap lengths of {iα mod 1 : i < n}.
    Threegap {
        /// Continued fraction "0;a1,a2,...". Defaults to [0;2,20,30,40,...].
        #[arg(long)]
        alpha_cf: Option<String>,
        #[arg(long, default_value_t = 500)]
        n: u64,
        /// Write the gap table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Coded prefix, complexity table and right-special words.
    Sturmian {
        #[arg(long)]
        alpha_cf: Option<String>,
        #[arg(long, default_value_t = 100)]
        len: u64,
        #[arg(long, default_value_t = 40)]
        complexity_max: u64,
    },
    /// Runs the induction and writes an artifact.
    Construct {
        #[arg(long)]
        alpha_cf: Option<String>,
        /// preset:poly:<d> | preset:stretch:<γ> | file:<path>
        #[arg(long, default_value = "preset:poly:2")]
        seq: String,
        #[arg(long, default_value_t = 1)]
        depth: u32,
        #[arg(long, default_value = "strict")]
        mode: String,
        #[arg(long)]
        out: PathBuf,
        /// Letters in the measured point prefix.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, default_value_t = 0x5eed)]
        rng_seed: u64,
    },
    /// Recomputes every check stored in an artifact.
    Verify { artifact: PathBuf },
    /// Eigenvalues of truncated Schrödinger operators with the point as potential.
    Spectrum {
        /// Artifact JSON, or a text file of 0/1 letters.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = vec![50usize, 100, 200])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        /// Path prefix for <prefix>_eigenvalues.csv and <prefix>_gaps.csv.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn rotation(spec: Option<&str>) -> Result<RotationNumber, ForgeError> {
    match spec {
        Some(s) => s.parse(),
        None => Ok(RotationNumber::default_alpha(DEFAULT_ALPHA_DEPTH)),
    }
}

fn cmd_threegap(alpha: Option<&str>, n: u64, csv: Option<&Path>) -> anyhow::Result<i32> {
    let rot = rotation(alpha)?;
    let spec = gap_spectrum(&rot, n)?;
    println!("alpha = {rot}, n = {n}, denominator = {}", spec.denominator);
    println!("{:>24}  {:>8}", "length", "count");
    for g in &spec.gaps {
        println!("{:>24}  {:>8}", g.length.to_string(), g.multiplicity);
    }
    let ok = spec.satisfies_three_gap();
    println!("distinct lengths: {}; three-gap: {}", spec.distinct_lengths(), if ok { "pass" } else { "FAIL" });
    if let Some(path) = csv {
        let mut out = String::from("length,count\n");
        for g in &spec.gaps {
            out.push_str(&format!("{},{}\n", g.length, g.multiplicity));
        }
        fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_sturmian(alpha: Option<&str>, len: u64, complexity_max: u64) -> anyhow::Result<i32> {
    let rot = rotation(alpha)?;
    let prefix = sturmian::code_origin(&rot, len)?;
    println!("alpha = {rot}");
    println!("prefix: {prefix}");
    let mut ok = true;
    println!("{:>5}  {:>6}  right-special", "n", "P(n)");
    for n in 1..=complexity_max {
        let p = sturmian::language(&rot, n)?.len() as u64;
        let rs = sturmian::right_special(&rot, n)?;
        ok &= p == n + 1;
        println!("{n:>5}  {p:>6}  {}", rs.word);
    }
    println!("P(n) = n + 1 for n <= {complexity_max}: {}", if ok { "pass" } else { "FAIL" });
    Ok(if ok { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_construct(
    alpha: Option<&str>,
    seq: &str,
    depth: u32,
    mode: &str,
    out: &Path,
    window: Option<usize>,
    rng_seed: u64,
) -> anyhow::Result<i32> {
    let rot = rotation(alpha)?;
    let sequence = SubexponentialSpec::parse(seq)?;
    let seed = match mode.parse::<Mode>()? {
        Mode::Strict => SeedConfig::strict(),
        Mode::Demo => SeedConfig::demo(DEFAULT_DEMO_FACTOR),
    };
    let mut cfg = InductionConfig::new(depth, seed, sequence);
    cfg.rng_seed = rng_seed;
    if let Some(w) = window {
        cfg.prefix_len = w;
    }
    let (tower, levels) = run_induction(&rot, &cfg)?;
    let art = ArtifactFile::new(&rot, &cfg, &tower, levels);
    art.save(out)?;
    for level in &art.levels {
        let failures = level.failures();
        println!(
            "level {}: n = {}, N = {}, |0| = {} bits, {} checks, {}",
            level.k,
            level.n_k,
            level.big_n_k,
            level.codeword_bits,
            level.checks.len() + level.ratio_measurements.len() + level.complexity_checks.len(),
            if failures.is_empty() { "pass".to_string() } else { format!("FAIL: {}", failures.join("; ")) }
        );
        for r in &level.ratio_measurements {
            println!("  ratio at {} ({}, {}): {:.4}", r.scale, r.role, r.method, r.ratio);
        }
        for s in &level.skipped {
            println!("  skipped: {s}");
        }
    }
    println!("artifact written to {}", out.display());
    Ok(if art.all_pass { 0 } else { 1 })
}

fn cmd_verify(path: &Path) -> anyhow::Result<i32> {
    let art = ArtifactFile::load(path)?;
    let report = verify(&art)?;
    for c in &report.checks {
        println!("{} {}{}", if c.pass { "ok  " } else { "FAIL" }, c.name, if c.pass { String::new() } else { format!(": {}", c.detail) });
    }
    println!("{}", if report.pass() { "verified" } else { "verification failed" });
    Ok(if report.pass() { 0 } else { 1 })
}

fn load_potential(path: &Path, len: usize) -> Result<Vec<u8>, ForgeError> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        let art: ArtifactFile = serde_json::from_str(&text)?;
        let tower = art.tower()?;
        let point = SamplePoint::for_seed(&tower, art.provenance.config.rng_seed);
        return point.units(&tower, 0, len);
    }
    let mut out = Vec::with_capacity(text.len());
    for (i, c) in text.chars().filter(|c| !c.is_whitespace()).enumerate() {
        match c {
            '0' => out.push(0),
            '1' => out.push(1),
            _ => return Err(ForgeError::InvalidInput(format!("character {c:?} at {i} is not 0 or 1"))),
        }
    }
    Ok(out)
}

fn cmd_spectrum(input: &Path, sizes: &[usize], tol: f64, resolution: f64, csv: Option<&Path>) -> anyhow::Result<i32> {
    let longest = sizes.iter().copied().max().unwrap_or(0);
    let prefix = load_potential(input, longest)?;
    let report = gap_report(&prefix, sizes, tol, resolution)?;
    println!("HEURISTIC: gaps of finite truncations, not of the infinite operator");
    for s in &report.spectra {
        println!("N = {}: eigenvalues in [{:.6}, {:.6}]", s.size, s.eigenvalues[0], s.eigenvalues[s.size - 1]);
    }
    for g in &report.gaps {
        println!("gap ({:.9}, {:.9}) width {:.9}", g.left, g.right, g.width);
    }
    if let Some(p) = csv {
        let base = p.to_string_lossy();
        fs::write(format!("{base}_eigenvalues.csv"), report.eigenvalue_csv())?;
        fs::write(format!("{base}_gaps.csv"), report.gap_csv())?;
    }
    Ok(0)
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Threegap { alpha_cf, n, csv } => cmd_threegap(alpha_cf.as_deref(), n, csv.as_deref()),
        Command::Sturmian { alpha_cf, len, complexity_max } => cmd_sturmian(alpha_cf.as_deref(), len, complexity_max),
        Command::Construct { alpha_cf, seq, depth, mode, out, window, rng_seed } => {
            cmd_construct(alpha_cf.as_deref(), &seq, depth, &mode, &out, window, rng_seed)
        }
        Command::Verify { artifact } => cmd_verify(&artifact),
        Command::Spectrum { input, sizes, tol, resolution, csv } => {
            cmd_spectrum(&input, &sizes, tol, resolution, csv.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<ForgeError>().map_or(1, ForgeError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
