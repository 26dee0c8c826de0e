//! Experiment configuration: one declarative key=value file per
//! experiment. `#` starts a comment, blank lines are skipped, and relative
//! paths are resolved against the directory holding the config file.
//!
//! Recognized keys:
//!   label        short name stamped into output rows (default: file stem)
//!   fcidump      path to an FCIDUMP integral file
//!   model        builtin model instead of fcidump; currently `tfim`
//!   n, j, g      tfim parameters (sites, coupling, field)
//!   method       dmrg | cadmrg | both            (default both)
//!   chi          comma list, positive ascending  (default 20,40,60)
//!   out          output directory                (default out/<label>)
//!   seed         base RNG seed                   (default 0)
//!   restarts     independent restarts per cell   (default 5)
//!   max_sweeps, min_sweeps, energy_tol, chi_init,
//!   eig_tol, eig_max_iter, mpo_threshold         RunConfig overrides
//!   workers      concurrent (method, chi, restart) cells (default 1)
//!   point        curve point: `<label> <fcidump path>`, repeatable

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cadmrg_core::dmrg::RunConfig;

#[derive(Debug, Clone)]
pub enum Source {
    Fcidump(PathBuf),
    Tfim { n: usize, j: f64, g: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dmrg,
    Cadmrg,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Dmrg => "dmrg",
            Method::Cadmrg => "cadmrg",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub label: String,
    pub source: Source,
    pub methods: Vec<Method>,
    pub chis: Vec<usize>,
    pub out: PathBuf,
    pub seed: u64,
    pub n_restarts: usize,
    pub max_sweeps: usize,
    pub min_sweeps: usize,
    pub energy_tol: f64,
    pub chi_init: usize,
    pub eig_tol: f64,
    pub eig_max_iter: usize,
    pub mpo_threshold: f64,
    pub workers: usize,
    /// (bond length label, fcidump path) series for the curve subcommand
    pub points: Vec<(String, PathBuf)>,
}

impl ExperimentSpec {
    /// RunConfig for one chi cell; restarts are driven by the caller so
    /// per-restart sweep logs can be captured.
    pub fn run_config(&self, chi: usize) -> RunConfig {
        let mut cfg = RunConfig::new(chi);
        cfg.chi_init = self.chi_init;
        cfg.max_sweeps = self.max_sweeps;
        cfg.min_sweeps_before_stop = self.min_sweeps;
        cfg.energy_tol = self.energy_tol;
        cfg.seed = self.seed;
        cfg.eig_tol = self.eig_tol;
        cfg.eig_max_iter = self.eig_max_iter;
        cfg.mpo_threshold = self.mpo_threshold;
        cfg
    }
}

pub fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".into());
    parse_spec(&text, base, &stem)
}

fn parse_spec(text: &str, base: &Path, default_label: &str) -> Result<ExperimentSpec> {
    let defaults = RunConfig::new(0);
    let mut label = default_label.to_string();
    let mut fcidump: Option<PathBuf> = None;
    let mut model: Option<String> = None;
    let mut n = 16usize;
    let mut j = 1.0f64;
    let mut g = 1.0f64;
    let mut methods = vec![Method::Dmrg, Method::Cadmrg];
    let mut chis = vec![20, 40, 60];
    let mut out: Option<PathBuf> = None;
    let mut seed = 0u64;
    let mut n_restarts = defaults.n_restarts;
    let mut max_sweeps = defaults.max_sweeps;
    let mut min_sweeps = defaults.min_sweeps_before_stop;
    let mut energy_tol = defaults.energy_tol;
    let mut chi_init = defaults.chi_init;
    let mut eig_tol = defaults.eig_tol;
    let mut eig_max_iter = defaults.eig_max_iter;
    let mut mpo_threshold = defaults.mpo_threshold;
    let mut workers = 1usize;
    let mut points: Vec<(String, PathBuf)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("line {}: expected key = value", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let ctx = || format!("line {}: bad value for {key}", lineno + 1);
        match key {
            "label" => label = value.to_string(),
            "fcidump" => fcidump = Some(base.join(value)),
            "model" => model = Some(value.to_string()),
            "n" => n = value.parse().with_context(ctx)?,
            "j" => j = value.parse().with_context(ctx)?,
            "g" => g = value.parse().with_context(ctx)?,
            "method" => {
                methods = match value {
                    "dmrg" => vec![Method::Dmrg],
                    "cadmrg" => vec![Method::Cadmrg],
                    "both" => vec![Method::Dmrg, Method::Cadmrg],
                    other => bail!("line {}: unknown method `{other}`", lineno + 1),
                }
            }
            "chi" => {
                chis = value
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .with_context(ctx)?;
            }
            "out" => out = Some(base.join(value)),
            "seed" => seed = value.parse().with_context(ctx)?,
            "restarts" => n_restarts = value.parse().with_context(ctx)?,
            "max_sweeps" => max_sweeps = value.parse().with_context(ctx)?,
            "min_sweeps" => min_sweeps = value.parse().with_context(ctx)?,
            "energy_tol" => energy_tol = value.parse().with_context(ctx)?,
            "chi_init" => chi_init = value.parse().with_context(ctx)?,
            "eig_tol" => eig_tol = value.parse().with_context(ctx)?,
            "eig_max_iter" => eig_max_iter = value.parse().with_context(ctx)?,
            "mpo_threshold" => mpo_threshold = value.parse().with_context(ctx)?,
            "workers" => workers = value.parse().with_context(ctx)?,
            "point" => {
                let (pl, pp) = value
                    .split_once(char::is_whitespace)
                    .with_context(|| format!("line {}: point wants `<label> <path>`", lineno + 1))?;
                points.push((pl.trim().to_string(), base.join(pp.trim())));
            }
            other => bail!("line {}: unknown key `{other}`", lineno + 1),
        }
    }

    if chis.is_empty() || chis.iter().any(|&c| c == 0) || chis.windows(2).any(|w| w[0] >= w[1]) {
        bail!("chi list must be positive and strictly ascending: {chis:?}");
    }
    if n_restarts == 0 {
        bail!("restarts must be >= 1");
    }
    if workers == 0 {
        bail!("workers must be >= 1");
    }

    let source = match (fcidump, model.as_deref()) {
        (Some(p), None) => {
            if !p.exists() {
                bail!("fcidump not found: {}", p.display());
            }
            Source::Fcidump(p)
        }
        (None, Some("tfim")) => Source::Tfim { n, j, g },
        (None, Some(m)) => bail!("unknown model `{m}` (builtin models: tfim)"),
        (Some(_), Some(_)) => bail!("config sets both fcidump and model"),
        (None, None) => {
            if points.is_empty() {
                bail!("config needs fcidump=, model=, or point= lines");
            }
            // curve configs may omit a primary source
            Source::Fcidump(points[0].1.clone())
        }
    };
    for (pl, pp) in &points {
        if !pp.exists() {
            eprintln!("warning: curve point {pl}: missing file {}", pp.display());
        }
    }

    let out = out.unwrap_or_else(|| PathBuf::from("out").join(&label));
    Ok(ExperimentSpec {
        label,
        source,
        methods,
        chis,
        out,
        seed,
        n_restarts,
        max_sweeps,
        min_sweeps,
        energy_tol,
        chi_init,
        eig_tol,
        eig_max_iter,
        mpo_threshold,
        workers,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_minimal_model_config() {
        let s = parse_spec("model = tfim\nn = 16\nchi = 8,16,32\n", Path::new("."), "t").unwrap();
        assert_eq!(s.chis, vec![8, 16, 32]);
        assert!(matches!(s.source, Source::Tfim { n: 16, .. }));
        assert_eq!(s.methods.len(), 2);
        assert_eq!(s.out, PathBuf::from("out/t"));
    }

    #[test]
    fn rejects_descending_chi() {
        let e = parse_spec("model = tfim\nchi = 40,20\n", Path::new("."), "t");
        assert!(e.is_err());
    }

    #[test]
    fn rejects_missing_fcidump_path() {
        let e = parse_spec("fcidump = /nonexistent/x.fcidump\n", Path::new("."), "t");
        assert!(e.is_err());
    }

    #[test]
    fn comments_and_overrides() {
        let text = "model=tfim # inline\n# full line\nrestarts = 2\nmin_sweeps = 4\nmethod = cadmrg\n";
        let s = parse_spec(text, Path::new("."), "t").unwrap();
        assert_eq!(s.n_restarts, 2);
        assert_eq!(s.run_config(16).min_sweeps_before_stop, 4);
        assert_eq!(s.methods, vec![Method::Cadmrg]);
    }
}
