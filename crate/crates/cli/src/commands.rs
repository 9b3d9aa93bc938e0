use std::fs;
use std::path::{Path, PathBuf};

use manrec::bounds::{self, BoundInputs, Family};
use manrec::geometry::{read_container, read_csv, write_container, write_csv, BallPolicy};
use manrec::harness::{
    self, rate_experiment, select_k, tradeoff_experiment_with, write_curve_files, write_report_csv,
    write_report_json, Algorithm, DataSource, Example1, ExperimentSpec, KGrid, PoolSource,
    Schedule,
};
use manrec::oracle::{global_kflats, global_kmeans, OracleSolution};
use manrec::{
    kflats, kmeans, load_mnist, Dataset, FitConfig, ManifoldKind, ManifoldSpec, RngSeed,
    TinyInstance,
};
use serde::Serialize;

use crate::args::*;
use crate::error::CliError;

/// Settings shared by every command.
pub struct Context {
    pub out: PathBuf,
    pub seed: RngSeed,
}

impl Context {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let text = serde_json::to_string_pretty(value)?;
        fs::write(&path, text + "\n")
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::missing(flag))
}

fn manifold(
    name: Option<ManifoldName>,
    d: Option<usize>,
    ambient: Option<usize>,
) -> Result<ManifoldSpec, CliError> {
    let spec = match required(name, "manifold")? {
        ManifoldName::Circle => ManifoldSpec::circle(ambient.unwrap_or(2))?,
        ManifoldName::Sphere => {
            let d = required(d, "d")?;
            ManifoldSpec::sphere(d, ambient.unwrap_or(d + 1))?
        }
        ManifoldName::Disk => {
            let d = required(d, "d")?;
            ManifoldSpec::flat_disk(d, ambient.unwrap_or(d))?
        }
    };
    Ok(spec)
}

fn load_data(path: Option<&PathBuf>, ball: Option<BallName>) -> Result<Dataset, CliError> {
    let path = required(path, "data")?;
    if !path.exists() {
        return Err(CliError::data(format!("{}: no such file", path.display())));
    }
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let data = if is_csv {
        let policy = match ball.unwrap_or(BallName::Require) {
            BallName::Require => BallPolicy::Require,
            BallName::Scale => BallPolicy::Scale,
            BallName::Ignore => BallPolicy::Ignore,
        };
        read_csv(path, policy).map_err(data_error)?
    } else {
        let data: Dataset = read_container(path).map_err(data_error)?;
        match ball.unwrap_or(BallName::Require) {
            BallName::Require if !data.in_unit_ball() => {
                return Err(CliError::data(format!(
                    "{}: points lie outside the unit ball (use --ball scale or --ball ignore)",
                    path.display()
                )))
            }
            BallName::Scale => {
                Dataset::scaled_into_unit_ball(data.points().to_vec(), data.ambient_dim())?.0
            }
            _ => data,
        }
    };
    Ok(data)
}

/// Anything wrong with an input file is a data error, whatever its cause.
fn data_error(e: manrec::Error) -> CliError {
    CliError::data(e.to_string())
}

fn fit_config(
    restarts: Option<usize>,
    max_iters: Option<usize>,
    rel_tol: Option<f64>,
) -> FitConfig {
    let mut cfg = FitConfig::default();
    if let Some(r) = restarts {
        cfg.restarts = r;
    }
    if let Some(m) = max_iters {
        cfg.max_iters = m;
    }
    if let Some(t) = rel_tol {
        cfg.rel_tol = t;
    }
    cfg
}

fn algorithm(name: Option<AlgorithmName>) -> Algorithm {
    match name.unwrap_or(AlgorithmName::Kmeans) {
        AlgorithmName::Kmeans => Algorithm::KMeans,
        AlgorithmName::KmeansPpSeeding => Algorithm::KMeansPpSeeding,
        AlgorithmName::Kflats => Algorithm::KFlats,
    }
}

/// Parses `auto`, `a..b` (inclusive) or `a,b,c`.
pub fn parse_ks(text: &str, allow_auto: bool) -> Result<KGrid, CliError> {
    let text = text.trim();
    let bad = || CliError::usage(format!("invalid k grid `{text}`"));
    if text.eq_ignore_ascii_case("auto") {
        return if allow_auto {
            Ok(KGrid::Auto)
        } else {
            Err(bad())
        };
    }
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| bad())?;
        if a == 0 || b < a {
            return Err(bad());
        }
        return Ok(KGrid::Values((a..=b).collect()));
    }
    text.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()
        .map(KGrid::Values)
}

pub fn sample(ctx: &Context, args: SampleArgs) -> Result<String, CliError> {
    let spec = manifold(args.manifold, args.d, args.ambient)?;
    let n = required(args.n, "n")?;
    let data: Dataset = spec.sample(n, ctx.seed)?;
    let path = ctx.path("data.mrc");
    write_container(&data, &path)?;
    if args.csv.unwrap_or(false) {
        write_csv(&data, ctx.path("data.csv"))?;
    }
    Ok(format!(
        "sample: wrote {n} points in R^{} to {}",
        data.ambient_dim(),
        path.display()
    ))
}

pub fn fit_kmeans(ctx: &Context, args: FitKmeansArgs) -> Result<String, CliError> {
    let data = load_data(args.data.as_ref(), args.ball)?;
    let k = required(args.k, "k")?;
    let cfg = fit_config(args.restarts, args.max_iters, args.rel_tol);
    let model = kmeans::fit(&data, k, &cfg, ctx.seed)?;
    let path = ctx.write_json("model.json", &model)?;
    Ok(format!(
        "fit-kmeans: k={k} objective={:.6e} iterations={} -> {}",
        model.objective(),
        model.iterations(),
        path.display()
    ))
}

pub fn fit_kflats(ctx: &Context, args: FitKflatsArgs) -> Result<String, CliError> {
    let data = load_data(args.data.as_ref(), args.ball)?;
    let k = required(args.k, "k")?;
    let d = required(args.d, "d")?;
    let cfg = fit_config(args.restarts, args.max_iters, args.rel_tol);
    let model = kflats::fit(&data, k, d, &cfg, ctx.seed)?;
    let path = ctx.write_json("model.json", &model)?;
    Ok(format!(
        "fit-kflats: k={k} d={d} objective={:.6e} iterations={} -> {}",
        model.objective(),
        model.iterations(),
        path.display()
    ))
}

pub fn bounds(ctx: &Context, args: BoundsArgs) -> Result<String, CliError> {
    let d = required(args.d, "d")?;
    let spec = manifold(Some(required(args.preset, "preset")?), Some(d), None)?;
    let family = match args.family.unwrap_or(FamilyName::Kmeans) {
        FamilyName::Kmeans => Family::KMeans,
        FamilyName::Kflats => Family::KFlats,
    };
    let inputs = BoundInputs::new(
        family,
        required(args.n, "n")?,
        required(args.k, "k")?,
        spec.intrinsic_dim(),
        args.delta.unwrap_or(0.05),
        spec.density_norm
            .unwrap_or_else(|| bounds::holder_density_bound(spec.intrinsic_dim())),
        spec.curvature.unwrap_or(0.0),
    )?;
    let report = bounds::decompose(
        family,
        args.empirical.unwrap_or(0.0),
        args.holdout.unwrap_or(0.0),
        &inputs,
    )?;
    let path = ctx.write_json("bounds.json", &report)?;
    Ok(format!(
        "bounds: statistical={:.6e} approximation={:.6e} total={:.6e} k_n={:.3} -> {}",
        report.statistical,
        report.approximation,
        report.total,
        report.k_n,
        path.display()
    ))
}

#[derive(Serialize)]
struct Example1Row {
    #[serde(flatten)]
    result: Example1,
    one_beats_two: bool,
}

pub fn example1(ctx: &Context, args: Example1Args) -> Result<String, CliError> {
    let runs = args.runs.unwrap_or(1);
    if runs == 0 {
        return Err(CliError::usage("--runs must be at least 1"));
    }
    let rows = (0..runs)
        .map(|i| {
            let result = harness::example1(RngSeed(ctx.seed.0.wrapping_add(i)))?;
            Ok(Example1Row {
                one_beats_two: result.one_beats_two(),
                result,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let path = if runs == 1 {
        ctx.write_json("example1.json", &rows[0])?
    } else {
        ctx.write_json("example1.json", &rows)?
    };
    let wins = rows.iter().filter(|r| r.one_beats_two).count();
    let first = &rows[0].result;
    Ok(format!(
        "example1: e_k1={:.4} e_k2={:.4}; one mean beats two in {wins}/{runs} runs -> {}",
        first.e_k1,
        first.e_k2,
        path.display()
    ))
}

pub fn tradeoff(ctx: &Context, args: TradeoffArgs) -> Result<String, CliError> {
    let (spec_manifold, pool) = match &args.mnist {
        Some(path) => {
            if !path.exists() {
                return Err(CliError::data(format!("{}: no such file", path.display())));
            }
            let images: Dataset = load_mnist(path, args.mnist_limit).map_err(data_error)?;
            let d = required(args.d, "d")?;
            let m = ManifoldSpec::new(ManifoldKind::Custom {
                d,
                ambient: images.ambient_dim(),
            })?;
            let pool = PoolSource::new(&images, args.mnist_holdout_fraction.unwrap_or(0.2))?;
            (m, Some(pool))
        }
        None => (manifold(args.manifold, args.d, args.ambient)?, None),
    };
    let ks = parse_ks(args.ks.as_deref().unwrap_or("2..40"), true)?;
    let mut spec = ExperimentSpec::new(
        spec_manifold,
        args.train_sizes
            .unwrap_or_else(|| vec![50, 200, 1000, 5000]),
        ks,
        algorithm(args.algorithm),
    );
    spec.base_seed = ctx.seed;
    if let Some(h) = args.holdout {
        spec.holdout_size = h;
    }
    if let Some(r) = args.repeats {
        spec.repeats = r;
    }
    if let Some(r) = args.restarts {
        spec.fit.restarts = r;
    }
    spec.flat_dim = args.flat_dim;
    spec.nested_warm_start = args.nested.unwrap_or(false);
    if let Some(delta) = args.delta {
        spec.delta = delta;
    }
    let source: &dyn DataSource = match &pool {
        Some(p) => p,
        None => &spec.manifold,
    };
    let report = tradeoff_experiment_with(&spec, source)?;
    write_report_csv(&report, ctx.path("report.csv"))?;
    write_report_json(&report, ctx.path("report.json"))?;
    if args.curves.unwrap_or(false) {
        write_curve_files(&report, &ctx.out)?;
    }
    Ok(format!(
        "tradeoff: {} cells, {} descent violations -> {}",
        report.rows.len(),
        report.descent_violations,
        ctx.path("report.csv").display()
    ))
}

pub fn rates(ctx: &Context, args: RatesArgs) -> Result<String, CliError> {
    let m = match args.manifold {
        None => ManifoldSpec::circle(2)?,
        name => manifold(name, args.d, args.ambient)?,
    };
    let mut spec = ExperimentSpec::new(
        m,
        args.train_sizes
            .unwrap_or_else(|| vec![100, 1000, 10_000, 100_000]),
        KGrid::Auto,
        Algorithm::KMeans,
    );
    spec.base_seed = ctx.seed;
    if let Some(h) = args.holdout {
        spec.holdout_size = h;
    }
    if let Some(r) = args.repeats {
        spec.repeats = r;
    }
    if let Some(r) = args.restarts {
        spec.fit.restarts = r;
    }
    let schedules: &[Schedule] = match args.schedule.unwrap_or(ScheduleName::Both) {
        ScheduleName::Kmeans => &[Schedule::KMeans],
        ScheduleName::Kflats => &[Schedule::KFlats],
        ScheduleName::Both => &[Schedule::KMeans, Schedule::KFlats],
    };
    let mut parts = Vec::new();
    for &schedule in schedules {
        let report = rate_experiment(&spec, schedule)?;
        let tag = match schedule {
            Schedule::KMeans => "kmeans",
            Schedule::KFlats => "kflats",
        };
        ctx.write_json(&format!("rates_{tag}.json"), &report)?;
        write_report_csv(&report.experiment, ctx.path(&format!("rates_{tag}.csv")))?;
        parts.push(format!(
            "{tag} slope={:.4} (predicted {:.4})",
            report.fit.slope, report.predicted_slope
        ));
    }
    Ok(format!(
        "rates: {} -> {}",
        parts.join(", "),
        ctx.out.display()
    ))
}

pub fn select_k_cmd(ctx: &Context, args: SelectKArgs) -> Result<String, CliError> {
    let data = load_data(args.data.as_ref(), args.ball)?;
    let KGrid::Values(ks) = parse_ks(&required(args.ks, "ks")?, false)? else {
        unreachable!("auto grids are rejected above")
    };
    let algo = algorithm(args.algorithm);
    let flat_dim = match algo {
        Algorithm::KFlats => required(args.flat_dim, "flat-dim")?,
        _ => args.flat_dim.unwrap_or(0),
    };
    let cfg = fit_config(args.restarts, None, None);
    let sel = select_k(
        algo,
        &data,
        &ks,
        args.validation_fraction.unwrap_or(0.2),
        flat_dim,
        &cfg,
        ctx.seed,
    )?;
    let path = ctx.write_json("selection.json", &sel)?;
    Ok(format!(
        "select-k: k*={} over {} candidates -> {}",
        sel.k,
        ks.len(),
        path.display()
    ))
}

#[derive(Serialize)]
struct OracleComparison {
    family: Family,
    k: usize,
    d: Option<usize>,
    oracle: OracleSolution<f64>,
    fitted_objective: f64,
    /// `fitted − oracle`; never below −1e-9 for a correct fit.
    excess: f64,
}

pub fn oracle_check(ctx: &Context, args: OracleCheckArgs) -> Result<String, CliError> {
    let data = load_data(args.data.as_ref(), args.ball)?;
    let k = required(args.k, "k")?;
    let cfg = fit_config(args.restarts, None, None);
    let inst = TinyInstance::new(data.clone(), k)?;
    let mut rows = Vec::new();
    let oracle = global_kmeans(&inst)?;
    let fitted = kmeans::fit(&data, k, &cfg, ctx.seed)?.objective();
    rows.push(OracleComparison {
        family: Family::KMeans,
        k,
        d: None,
        excess: fitted - oracle.objective,
        oracle,
        fitted_objective: fitted,
    });
    if let Some(d) = args.d {
        let oracle = global_kflats(&inst, d)?;
        let fitted = kflats::fit(&data, k, d, &cfg, ctx.seed)?.objective();
        rows.push(OracleComparison {
            family: Family::KFlats,
            k,
            d: Some(d),
            excess: fitted - oracle.objective,
            oracle,
            fitted_objective: fitted,
        });
    }
    let path = ctx.write_json("oracle.json", &rows)?;
    let summary: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{:?} oracle={:.6e} fitted={:.6e}",
                r.family, r.oracle.objective, r.fitted_objective
            )
        })
        .collect();
    Ok(format!(
        "oracle-check: {} -> {}",
        summary.join("; "),
        path.display()
    ))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::data(format!("{}: {e}", dir.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_grids() {
        assert_eq!(
            parse_ks("2..4", false).unwrap(),
            KGrid::Values(vec![2, 3, 4])
        );
        assert_eq!(parse_ks("2..=3", false).unwrap(), KGrid::Values(vec![2, 3]));
        assert_eq!(
            parse_ks("1, 5,9", false).unwrap(),
            KGrid::Values(vec![1, 5, 9])
        );
        assert_eq!(parse_ks("auto", true).unwrap(), KGrid::Auto);
        assert!(parse_ks("auto", false).is_err());
        assert!(parse_ks("4..2", false).is_err());
        assert!(parse_ks("x", false).is_err());
    }
}
