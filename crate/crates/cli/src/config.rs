//! Experiment configuration: command-line flags layered over an optional
//! flat `key=value` file, then per-command defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rand::{rngs::StdRng, Rng, SeedableRng};
use sha2::{Digest, Sha256};

use layerpot::DomainSide;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideChoice {
    Plus,
    Minus,
    Both,
}

impl SideChoice {
    pub fn sides(self) -> Vec<DomainSide> {
        match self {
            SideChoice::Plus => vec![DomainSide::Plus],
            SideChoice::Minus => vec![DomainSide::Minus],
            SideChoice::Both => vec![DomainSide::Plus, DomainSide::Minus],
        }
    }

    fn name(self) -> &'static str {
        match self {
            SideChoice::Plus => "plus",
            SideChoice::Minus => "minus",
            SideChoice::Both => "both",
        }
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to the command's defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Curve spec, e.g. `circle:center=-1,radius=1`.
    #[arg(long)]
    pub curve: Option<String>,
    /// Density spec: `const:<v>`, `re`, `holder:t0=<z>,alpha=<a>`, `thm3:mu=<majorant>`.
    #[arg(long)]
    pub density: Option<String>,
    #[arg(long, value_enum)]
    pub side: Option<SideChoice>,
    /// Largest ε of the geometric grid (default: the top of the estimate range).
    #[arg(long)]
    pub eps_start: Option<f64>,
    #[arg(long)]
    pub eps_factor: Option<f64>,
    #[arg(long)]
    pub eps_count: Option<usize>,
    /// Number of curve samples.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Quadrature tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Seed for multiplicative jitter of the ε grid; no jitter when unset.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Ray directions for the Král integral.
    #[arg(long)]
    pub angles: Option<usize>,
    /// Base points used by `geometry` and `jump-test`.
    #[arg(long)]
    pub points: Option<usize>,
    /// Points per axis of the `potential-scan` lattice.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Flat `key=value` file; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Defaults that differ between subcommands.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub density: &'static str,
    pub eps_count: usize,
    pub samples: usize,
    pub side: SideChoice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: String,
    pub curve: String,
    pub density: String,
    pub side: SideChoice,
    pub eps_start: Option<f64>,
    pub eps_factor: f64,
    pub eps_count: usize,
    pub samples: usize,
    pub tol: f64,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
    pub angles: usize,
    pub points: usize,
    pub grid: usize,
}

const KEYS: [&str; 13] = [
    "curve",
    "density",
    "side",
    "eps_start",
    "eps_factor",
    "eps_count",
    "samples",
    "tol",
    "out_dir",
    "seed",
    "angles",
    "points",
    "grid",
];

/// Reads a flat `key=value` file. Blank lines and `#` comments are skipped;
/// `-` and `_` are interchangeable in keys.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| CliError::Config(format!("line {}: expected key=value", i + 1)))?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("line {}: unknown key `{}`", i + 1, k.trim())));
        }
        if out.insert(key, v.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("line {}: duplicate key `{}`", i + 1, k.trim())));
        }
    }
    Ok(out)
}

fn from_file<T: std::str::FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    file.get(key)
        .map(|v| v.parse::<T>().map_err(|_| CliError::Config(format!("bad value `{v}` for `{key}`"))))
        .transpose()
}

impl ExperimentConfig {
    pub fn resolve(command: &str, args: &ConfigArgs, defaults: Defaults) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        let side = match args.side {
            Some(s) => Some(s),
            None => file
                .get("side")
                .map(|v| SideChoice::from_str(v, true).map_err(|_| CliError::Config(format!("bad side `{v}`"))))
                .transpose()?,
        };
        let cfg = ExperimentConfig {
            command: command.to_string(),
            curve: args
                .curve
                .clone()
                .or(from_file(&file, "curve")?)
                .unwrap_or_else(|| "circle:center=-1,radius=1".into()),
            density: args.density.clone().or(from_file(&file, "density")?).unwrap_or_else(|| defaults.density.into()),
            side: side.unwrap_or(defaults.side),
            eps_start: args.eps_start.or(from_file(&file, "eps_start")?),
            eps_factor: args.eps_factor.or(from_file(&file, "eps_factor")?).unwrap_or(0.5),
            eps_count: args.eps_count.or(from_file(&file, "eps_count")?).unwrap_or(defaults.eps_count),
            samples: args.samples.or(from_file(&file, "samples")?).unwrap_or(defaults.samples),
            tol: args.tol.or(from_file(&file, "tol")?).unwrap_or(layerpot::potentials::DEFAULT_TOL),
            out_dir: args.out_dir.clone().or(from_file(&file, "out_dir")?).unwrap_or_else(|| PathBuf::from(".")),
            seed: args.seed.or(from_file(&file, "seed")?),
            angles: args.angles.or(from_file(&file, "angles")?).unwrap_or(720),
            points: args.points.or(from_file(&file, "points")?).unwrap_or(256),
            grid: args.grid.or(from_file(&file, "grid")?).unwrap_or(41),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if let Some(e) = self.eps_start {
            if !(e > 0.0 && e.is_finite()) {
                return bad("eps_start must be positive");
            }
        }
        if !(self.eps_factor > 0.0 && self.eps_factor < 1.0) {
            return bad("eps_factor must lie in (0, 1)");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if self.eps_count == 0 || self.samples == 0 || self.angles == 0 || self.points == 0 || self.grid < 2 {
            return bad("counts must be positive (grid at least 2)");
        }
        Ok(())
    }

    /// Canonical text of every setting that affects the results.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let opt = |v: Option<String>| v.unwrap_or_else(|| "auto".into());
        writeln!(s, "command={}", self.command).unwrap();
        writeln!(s, "curve={}", self.curve).unwrap();
        writeln!(s, "density={}", self.density).unwrap();
        writeln!(s, "side={}", self.side.name()).unwrap();
        writeln!(s, "eps_start={}", opt(self.eps_start.map(|e| e.to_string()))).unwrap();
        writeln!(s, "eps_factor={}", self.eps_factor).unwrap();
        writeln!(s, "eps_count={}", self.eps_count).unwrap();
        writeln!(s, "samples={}", self.samples).unwrap();
        writeln!(s, "tol={}", self.tol).unwrap();
        writeln!(s, "seed={}", opt(self.seed.map(|e| e.to_string()))).unwrap();
        writeln!(s, "angles={}", self.angles).unwrap();
        writeln!(s, "points={}", self.points).unwrap();
        writeln!(s, "grid={}", self.grid).unwrap();
        s
    }

    /// First 16 hex digits of the SHA-256 of [`canonical`](Self::canonical).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).fold(String::new(), |mut s, b| {
            write!(s, "{b:02x}").unwrap();
            s
        })
    }

    /// Decreasing geometric ε grid from `eps_start` (or `top` when unset).
    /// With a seed, each ε is scaled by a factor in `[0.9, 1.1)`.
    pub fn eps_grid(&self, top: f64) -> Vec<f64> {
        let start = self.eps_start.unwrap_or(top);
        let mut grid: Vec<f64> = (0..self.eps_count).map(|k| start * self.eps_factor.powi(k as i32)).collect();
        if let Some(seed) = self.seed {
            let mut rng = StdRng::seed_from_u64(seed);
            for e in &mut grid {
                *e *= rng.gen_range(0.9..1.1);
            }
            grid.sort_by(|a, b| b.total_cmp(a));
        }
        grid
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEFAULTS: Defaults = Defaults { density: "re", eps_count: 6, samples: 512, side: SideChoice::Plus };

    #[test]
    fn file_parsing() {
        let m = parse_config_text("# comment\ncurve = ellipse:a=2,b=1\neps-count=4\n\n").unwrap();
        assert_eq!(m["curve"], "ellipse:a=2,b=1");
        assert_eq!(m["eps_count"], "4");
        assert!(parse_config_text("nonsense").is_err());
        assert!(parse_config_text("colour=red").is_err());
        assert!(parse_config_text("tol=1\ntol=2").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("layerpot-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "samples=128\ndensity=const:2\nside=minus\n").unwrap();
        let args = ConfigArgs { samples: Some(256), config: Some(path), ..Default::default() };
        let cfg = ExperimentConfig::resolve("jump-test", &args, DEFAULTS).unwrap();
        assert_eq!(cfg.samples, 256);
        assert_eq!(cfg.density, "const:2");
        assert_eq!(cfg.side, SideChoice::Minus);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn hash_ignores_out_dir_only() {
        let a = ExperimentConfig::resolve("geometry", &ConfigArgs::default(), DEFAULTS).unwrap();
        let mut b = a.clone();
        b.out_dir = PathBuf::from("/elsewhere");
        assert_eq!(a.hash(), b.hash());
        b.samples += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn eps_grid_shape() {
        let args = ConfigArgs { eps_count: Some(3), ..Default::default() };
        let cfg = ExperimentConfig::resolve("zygmund-check", &args, DEFAULTS).unwrap();
        assert_eq!(cfg.eps_grid(0.25), vec![0.25, 0.125, 0.0625]);
        let seeded = ExperimentConfig { seed: Some(7), ..cfg };
        let g = seeded.eps_grid(0.25);
        assert_eq!(g, seeded.eps_grid(0.25));
        assert!(g.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn rejects_bad_numbers() {
        let args = ConfigArgs { eps_factor: Some(2.0), ..Default::default() };
        assert!(matches!(ExperimentConfig::resolve("x", &args, DEFAULTS), Err(CliError::Config(_))));
    }
}
