use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use dispersal_core::experiments::invariants::invariant_suite;
use dispersal_core::experiments::{
    closed_band, growth_experiment, positive_direction_experiment, random_band_function, rate_experiment,
    smoothing_experiment, transfer_experiment, ExperimentKind, ExperimentRecord, GrowthConfig, PositiveConfig,
    RateConfig, SmoothingConfig, TransferConfig,
};
use dispersal_core::propagator::{evolve, evolve_field, maximal_field, EvalPath, TimeGrid};
use dispersal_core::{l2_norm, Error, lp_ball_norm, BallQuadrature, FrequencyLattice, SpectralFunction, Symbol};

use crate::config::{Command, RunConfig};

pub const DEFAULT_OUT: &str = "dispersal-out";

fn symbol(cfg: &RunConfig) -> dispersal_core::Result<Option<Symbol>> {
    cfg.symbol().map_err(Error::InvalidArgument)
}

/// Random 64-mode datum on `cutoff/2 ≤ |ξ| ≤ cutoff` for the evolve/maximal commands.
fn band_datum(cfg: &RunConfig, p: &Symbol) -> dispersal_core::Result<SpectralFunction> {
    let dim = p.required_dim().unwrap_or(2);
    let cutoff = cfg.cutoff.unwrap_or(8.0);
    let lattice = FrequencyLattice::new(dim, cfg.h.unwrap_or(0.5), cutoff)?;
    random_band_function(&lattice, 64, cfg.seed.unwrap_or(0), closed_band(cutoff / 2.0, cutoff))
}

fn ball_for(cfg: &RunConfig, f: &SpectralFunction) -> dispersal_core::Result<BallQuadrature> {
    let lattice = f.lattice();
    let target = cfg.ball_spacing.unwrap_or_else(|| BallQuadrature::default_spacing(lattice));
    BallQuadrature::new(&vec![0.0; f.dim()], 1.0, BallQuadrature::commensurate_spacing(lattice, target))
}

fn params(cfg: &RunConfig) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for line in cfg.to_canonical().lines() {
        if let Some((k, v)) = line.split_once(" = ") {
            if !matches!(k, "command" | "out" | "threads") {
                out.insert(k.to_string(), v.to_string());
            }
        }
    }
    out
}

/// Series `(t, ‖e^{itP(D)}f‖_{L²(B)})`; passes when the lattice norm is conserved.
fn run_evolve(cfg: &RunConfig) -> dispersal_core::Result<ExperimentRecord> {
    let p = symbol(cfg)?.unwrap_or(Symbol::Elliptic);
    let f = band_datum(cfg, &p)?;
    let ball = ball_for(cfg, &f)?;
    let tg = TimeGrid::uniform(0.0, 1.0, cfg.t_count.unwrap_or(9))?;
    let norm = l2_norm(&f);
    let mut defect: f64 = 0.0;
    let mut series = Vec::new();
    for t in tg.times() {
        defect = defect.max((l2_norm(&evolve(&f, &p, t)) - norm).abs() / norm);
        let field = evolve_field(&f, &p, &ball, t, EvalPath::Auto)?;
        series.push((t, lp_ball_norm(&field, 2.0)?));
    }
    let metrics = BTreeMap::from([("l2_norm".to_string(), norm), ("unitarity_defect".to_string(), defect)]);
    ExperimentRecord::new(ExperimentKind::Evolve, p.to_string(), params(cfg), series, metrics, defect <= 1e-12)
}

/// Series `(time count, ‖sup_t |e^{itP(D)}f|‖_{L²(B)})` over nested refinements of
/// one time grid; passes when the norms never decrease.
fn run_maximal(cfg: &RunConfig) -> dispersal_core::Result<ExperimentRecord> {
    let p = symbol(cfg)?.unwrap_or(Symbol::Elliptic);
    let f = band_datum(cfg, &p)?;
    let ball = ball_for(cfg, &f)?;
    let base = match cfg.t_count {
        Some(n) => TimeGrid::with_count(0.0, 1.0, n, &p, &f)?,
        None => TimeGrid::resolving(0.0, 1.0, &p, &f)?,
    };
    let mut series = Vec::new();
    for factor in [1, 2, 4] {
        let tg = base.refined(factor);
        let field = maximal_field(&f, &p, &ball, &tg, EvalPath::Auto)?;
        series.push((tg.count() as f64, lp_ball_norm(&field, 2.0)?));
    }
    let monotone = series.windows(2).all(|w| w[1].1 >= w[0].1);
    let mut params = params(cfg);
    params.insert("t_overridden".into(), base.overridden().to_string());
    let metrics = BTreeMap::from([("l2_norm".to_string(), l2_norm(&f))]);
    ExperimentRecord::new(ExperimentKind::Maximal, p.to_string(), params, series, metrics, monotone)
}

fn run_check(cfg: &RunConfig) -> dispersal_core::Result<ExperimentRecord> {
    let outcomes = invariant_suite(cfg.seed.unwrap_or(0))?;
    let mut metrics = BTreeMap::new();
    let mut series = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        println!(
            "{:<24} {:>12.3e}  tol {:>8.1e}  {}",
            o.name,
            o.value,
            o.tolerance,
            if o.pass { "ok" } else { "FAIL" }
        );
        metrics.insert(o.name.to_string(), o.value);
        series.push(((i + 1) as f64, o.value));
    }
    let pass = outcomes.iter().all(|o| o.pass);
    ExperimentRecord::new(ExperimentKind::Check, "-", params(cfg), series, metrics, pass)
}

pub fn execute(cfg: &RunConfig) -> dispersal_core::Result<ExperimentRecord> {
    match cfg.command {
        Command::Evolve => run_evolve(cfg),
        Command::Maximal => run_maximal(cfg),
        Command::Counterexample => {
            let p = cfg.counterexample_symbol().map_err(Error::InvalidArgument)?;
            let mut g = GrowthConfig::default();
            if let Some(r) = &cfg.radii {
                g.radii = r.clone();
            }
            growth_experiment(&p, &g)
        }
        Command::Rate => {
            let p = symbol(cfg)?.unwrap_or(Symbol::Elliptic);
            let mut r = RateConfig::default();
            r.spacing = cfg.h.unwrap_or(r.spacing);
            r.cutoff = cfg.cutoff.unwrap_or(r.cutoff);
            r.ball_spacing = cfg.ball_spacing;
            rate_experiment(&p, cfg.delta.unwrap_or(1.0), cfg.s.unwrap_or(0.4), &r)
        }
        Command::Transfer => {
            let q = symbol(cfg)?.unwrap_or(Symbol::Boussinesq);
            let mut t = TransferConfig::default();
            t.spacing = cfg.h.unwrap_or(t.spacing);
            t.cutoff = cfg.cutoff.unwrap_or(t.cutoff);
            t.band = (t.cutoff / 2.0, t.cutoff);
            t.ball_spacing = cfg.ball_spacing;
            t.t_count = cfg.t_count;
            t.seed = cfg.seed.unwrap_or(0);
            transfer_experiment(&q, &Symbol::Elliptic, &t)
        }
        Command::Smoothing => {
            let mut s = SmoothingConfig::default();
            s.spacing = cfg.h.unwrap_or(s.spacing);
            s.ball_spacing = cfg.ball_spacing.unwrap_or(s.ball_spacing);
            s.t_count = cfg.t_count;
            s.base_seed = cfg.seed.unwrap_or(0);
            smoothing_experiment(cfg.m.unwrap_or(2.0), &s)
        }
        Command::Positive => {
            let mut p = PositiveConfig::default();
            if let Some(r) = &cfg.radii {
                p.scales = r.iter().map(|x| x.log2() as u32).collect();
            }
            p.spacing = cfg.h.unwrap_or(p.spacing);
            p.ball_spacing = cfg.ball_spacing;
            p.t_count = cfg.t_count;
            positive_direction_experiment(cfg.m.unwrap_or(2.0), &p)
        }
        Command::Check => run_check(cfg),
    }
}

pub fn output_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out
        .clone()
        .or_else(|| std::env::var_os("DISPERSAL_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn series_csv(rec: &ExperimentRecord) -> String {
    let mut s = String::from("abscissa,value\n");
    for (a, v) in &rec.series {
        s.push_str(&format!("{a:?},{v:?}\n"));
    }
    s
}

pub fn summary_csv(rec: &ExperimentRecord) -> String {
    let (slope, residual) = rec
        .fit
        .map_or((String::new(), String::new()), |f| (format!("{:?}", f.slope), format!("{:?}", f.residual)));
    format!("kind,slope,residual,pass\n{},{slope},{residual},{}\n", rec.kind, rec.pass)
}

/// Writes `record.txt`, `series.csv`, `summary.csv` and `config.txt` under `dir`.
pub fn write_outputs(dir: &Path, cfg: &RunConfig, rec: &ExperimentRecord) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    rec.save(dir.join("record.txt")).map_err(|e| match e {
        Error::Io(e) => e,
        other => io::Error::other(other.to_string()),
    })?;
    fs::write(dir.join("series.csv"), series_csv(rec))?;
    fs::write(dir.join("summary.csv"), summary_csv(rec))?;
    fs::write(dir.join("config.txt"), cfg.to_canonical())?;
    Ok(())
}
