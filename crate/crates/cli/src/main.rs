//! `uptk`: evaluate uncertainty functionals, sweep and search families,
//! drive vanishing-ratio sequences and classify operators.

mod plot;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use uncertainty::classify::{classify, ClassifyOptions};
use uncertainty::explorer::{
    auto_grid, largest_exponent, linspace_grid, log_grid, minimize, probe, run_sequence, shapiro_growth, sweep,
    Proposition, SearchConfig, SequenceParams, SweepConfig, SweepResult,
};
use uncertainty::families::{random_fields, standard_family, Family};
use uncertainty::field::{Exponent, GridSpec, SampledField};
use uncertainty::inequalities::{evaluate, FunctionalSpec};
use uncertainty::operators::LinearOperator;

#[derive(Parser, Debug)]
#[command(name = "uptk", version, about = "Uncertainty-principle toolkit")]
struct Cli {
    /// Sampling grid as n,N,L (dimension, points per axis, half-width).
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    /// Output directory, or a `.json` file path for the main report.
    /// Without it the report is printed to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the optimizer and random test fields.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write an SVG log–log chart for every sweep.
    #[arg(long, global = true)]
    plot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one functional spec on one field.
    Verify {
        /// FunctionalSpec JSON file.
        #[arg(long)]
        spec: PathBuf,
        /// Binary field file.
        #[arg(long, conflicts_with = "family", required_unless_present = "family")]
        field: Option<PathBuf>,
        /// Family descriptor, e.g. `gc:c=0.25,n=2`.
        #[arg(long)]
        family: Option<Family>,
        /// Operator JSON file or inline JSON.
        #[arg(long)]
        operator: Option<String>,
    },
    /// Evaluate a spec over one family parameter.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        family: Family,
        /// Family parameter to vary (`c`, `alpha`, `lambda`).
        #[arg(long)]
        param: String,
        #[command(flatten)]
        values: Values,
        #[arg(long)]
        operator: Option<String>,
    },
    /// Drive a vanishing-ratio sequence and fit its decay slope.
    Sequence {
        /// one, two, three_hermite or three_gc.
        #[arg(long)]
        prop: Proposition,
        #[arg(long)]
        dim: usize,
        /// Norm exponent; `inf` allowed.
        #[arg(long)]
        q: Option<Exponent>,
        /// Exponent of G; defaults to the dilation-critical value.
        #[arg(long)]
        beta: Option<f64>,
        #[command(flatten)]
        values: Values,
        /// One-axis operator for the variance ratio (default Fourier).
        #[arg(long)]
        operator: Option<String>,
    },
    /// Derivative-free search for the smallest ratio over a family.
    Minimize {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        family: Family,
        /// Comma-separated parameter names (family parameters or `dilation`).
        #[arg(long, value_delimiter = ',', required = true)]
        params: Vec<String>,
        /// Search box per parameter as lo:hi, comma-separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_bound)]
        bounds: Option<Vec<(f64, f64)>>,
        #[arg(long, default_value_t = 200)]
        budget: usize,
        #[arg(long)]
        operator: Option<String>,
    },
    /// Image of F_{p,2} over g_c and Hermite functions, or Hermite
    /// mean-dispersion growth with `--shapiro`.
    Probe {
        /// Exponent p of F_{p,2}.
        #[arg(long, required_unless_present = "shapiro")]
        p: Option<Exponent>,
        /// c grid as lo,hi,count (log-spaced).
        #[arg(long, value_parser = parse_triple, default_value = "0.01,1,9")]
        c: (f64, f64, usize),
        /// Largest Hermite index.
        #[arg(long, default_value_t = 64)]
        max_k: usize,
        /// Exponent q ∈ [1, 2) for the growth of ‖h_k‖_q‖ĥ_k‖_q.
        #[arg(long, conflicts_with = "p")]
        shapiro: Option<Exponent>,
    },
    /// Classify an operator against a named test set.
    Classify {
        #[arg(long)]
        operator: String,
        /// `std64` or `random:COUNT` (seeded by --seed).
        #[arg(long, default_value = "std64")]
        testset: String,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        /// (p, q) pairs for the A_{p,q} ratio as p:q, comma-separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_pq)]
        pq: Option<Vec<(Exponent, Exponent)>>,
    },
}

/// Parameter values: an explicit list or a generated grid.
#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Values {
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    /// lo,hi,count log-spaced.
    #[arg(long, value_parser = parse_triple)]
    logspace: Option<(f64, f64, usize)>,
    /// lo,hi,count evenly spaced.
    #[arg(long, value_parser = parse_triple)]
    linspace: Option<(f64, f64, usize)>,
}

impl Values {
    fn resolve(&self) -> Vec<f64> {
        if let Some(v) = &self.values {
            v.clone()
        } else if let Some((a, b, n)) = self.logspace {
            log_grid(a, b, n)
        } else {
            let (a, b, n) = self.linspace.expect("clap group");
            linspace_grid(a, b, n)
        }
    }
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [n, points, l] = parts.as_slice() else {
        return Err(format!("expected n,N,L, got '{s}'"));
    };
    let n = n.parse().map_err(|_| format!("bad dimension '{n}'"))?;
    let points = points.parse().map_err(|_| format!("bad point count '{points}'"))?;
    let l = l.parse().map_err(|_| format!("bad half-width '{l}'"))?;
    GridSpec::new(n, l, points).map_err(|e| e.to_string())
}

fn parse_triple(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(format!("expected lo,hi,count, got '{s}'"));
    };
    Ok((
        a.parse().map_err(|_| format!("bad number '{a}'"))?,
        b.parse().map_err(|_| format!("bad number '{b}'"))?,
        n.parse().map_err(|_| format!("bad count '{n}'"))?,
    ))
}

fn parse_bound(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
    Ok((a.parse().map_err(|_| format!("bad number '{a}'"))?, b.parse().map_err(|_| format!("bad number '{b}'"))?))
}

fn parse_pq(s: &str) -> Result<(Exponent, Exponent), String> {
    let (p, q) = s.split_once(':').ok_or_else(|| format!("expected p:q, got '{s}'"))?;
    Ok((p.parse().map_err(|e: uncertainty::Error| e.to_string())?, q.parse().map_err(|e: uncertainty::Error| e.to_string())?))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
}

/// Operator from a JSON file, or inline JSON when no such file exists.
fn load_operator(arg: &str) -> Result<LinearOperator> {
    let path = Path::new(arg);
    let op: LinearOperator = if path.exists() {
        read_json(path)?
    } else {
        serde_json::from_str(arg).with_context(|| format!("'{arg}' is neither a file nor operator JSON"))?
    };
    op.validate()?;
    Ok(op)
}

fn load_operator_opt(arg: &Option<String>) -> Result<Option<LinearOperator>> {
    arg.as_deref().map(load_operator).transpose()
}

/// Where reports go: stdout, or files named after the command.
struct Sink {
    out: Option<PathBuf>,
    plot: bool,
}

impl Sink {
    /// Path for an artifact with extension `ext` (the main report is `json`).
    fn path(&self, stem: &str, ext: &str) -> Result<Option<PathBuf>> {
        let Some(out) = &self.out else { return Ok(None) };
        if out.extension().is_some_and(|e| e == "json") {
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            return Ok(Some(out.with_extension(ext)));
        }
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        Ok(Some(out.join(format!("{stem}.{ext}"))))
    }

    fn json<T: Serialize>(&self, stem: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        match self.path(stem, "json")? {
            Some(p) => {
                fs::write(&p, text + "\n").with_context(|| format!("writing {}", p.display()))?;
                eprintln!("wrote {}", p.display());
            }
            None => println!("{text}"),
        }
        Ok(())
    }

    /// CSV and optional chart for a sweep; skipped when printing to stdout.
    fn sweep_files(&self, stem: &str, results: &[&SweepResult]) -> Result<()> {
        for (i, r) in results.iter().enumerate() {
            let name = if results.len() == 1 { stem.to_string() } else { format!("{stem}-{i}") };
            if let Some(p) = self.path(&name, "csv")? {
                let mut w = BufWriter::new(File::create(&p)?);
                r.write_csv(&mut w)?;
                w.flush()?;
            }
        }
        if self.plot {
            match self.path(stem, "svg")? {
                Some(p) => fs::write(&p, plot::loglog_svg(stem, results))?,
                None => eprintln!("--plot needs --out; no chart written"),
            }
        }
        Ok(())
    }
}

fn summarize(r: &SweepResult) {
    let fit = r.fit.map(|f| format!("slope {:.4} ± {:.4}", f.slope, f.width)).unwrap_or_else(|| "no fit".into());
    let pred = r.predicted_slope.map(|p| format!(", predicted {p:.4}")).unwrap_or_default();
    eprintln!("{}: min {:.6e} at {} = {}, {fit}{pred}", r.label, r.min_value, r.parameter, r.argmin);
}

fn field_for(spec: &FunctionalSpec, field: &Option<PathBuf>, family: &Option<Family>, grid: Option<GridSpec>) -> Result<SampledField> {
    if let Some(path) = field {
        let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        return Ok(SampledField::read_binary(BufReader::new(file), label)?);
    }
    let family = family.as_ref().expect("clap requires --field or --family");
    let grid = match grid {
        Some(g) => g,
        None => auto_grid(family, largest_exponent(spec))?,
    };
    Ok(family.sample(grid)?.1)
}

fn run(cli: Cli) -> Result<()> {
    let sink = Sink { out: cli.out.clone(), plot: cli.plot };
    match cli.command {
        Command::Verify { spec, field, family, operator } => {
            let spec: FunctionalSpec = read_json(&spec)?;
            let f = field_for(&spec, &field, &family, cli.grid)?;
            let report = evaluate(&spec, &f, load_operator_opt(&operator)?.as_ref())?;
            sink.json("report", &report)
        }
        Command::Sweep { spec, family, param, values, operator } => {
            let cfg = SweepConfig {
                spec: read_json(&spec)?,
                family,
                parameter: param,
                grid: values.resolve(),
                operator: load_operator_opt(&operator)?,
                field_grid: cli.grid,
            };
            let r = sweep(&cfg)?;
            summarize(&r);
            #[derive(Serialize)]
            struct Out<'a> {
                config: &'a SweepConfig,
                result: &'a SweepResult,
            }
            sink.json("sweep", &Out { config: &cfg, result: &r })?;
            sink.sweep_files("sweep", &[&r])
        }
        Command::Sequence { prop, dim, q, beta, values, operator } => {
            let params = SequenceParams { dim, q, beta, operator: load_operator_opt(&operator)? };
            let r = run_sequence(prop, &params, &values.resolve())?;
            summarize(&r);
            sink.json("sequence", &r)?;
            sink.sweep_files("sequence", &[&r])
        }
        Command::Minimize { spec, family, params, bounds, budget, operator } => {
            let cfg = SearchConfig {
                spec: read_json(&spec)?,
                family,
                parameters: params,
                bounds,
                budget,
                seed: cli.seed,
                operator: load_operator_opt(&operator)?,
                field_grid: cli.grid,
            };
            let r = minimize(&cfg)?;
            eprintln!(
                "best {:.6e} at {:?} after {} evaluations ({} failed), converged: {}",
                r.best_value, r.best_params, r.evaluations, r.failed_evaluations, r.converged
            );
            if let Some(p) = sink.path("trace", "csv")? {
                let mut w = BufWriter::new(File::create(&p)?);
                writeln!(w, "{},value", r.parameters.join(","))?;
                for t in &r.trace {
                    let xs: Vec<String> = t.params.iter().map(|v| format!("{v:e}")).collect();
                    writeln!(w, "{},{:e}", xs.join(","), t.value)?;
                }
                w.flush()?;
            }
            sink.json("minimize", &r)
        }
        Command::Probe { p, c, max_k, shapiro } => {
            if let Some(q) = shapiro {
                let r = shapiro_growth(q, max_k)?;
                summarize(&r);
                sink.json("shapiro", &r)?;
                return sink.sweep_files("shapiro", &[&r]);
            }
            let p = p.expect("clap requires --p without --shapiro");
            let ks: Vec<f64> = (1..=max_k).map(|k| k as f64).collect();
            let r = probe(p, &log_grid(c.0, c.1, c.2), &ks)?;
            summarize(&r.gc);
            summarize(&r.hermite);
            eprintln!("attained [{:.6e}, {:.6e}]", r.attained.0, r.attained.1);
            sink.json("probe", &r)?;
            sink.sweep_files("probe", &[&r.gc, &r.hermite])
        }
        Command::Classify { operator, testset, tolerance, pq } => {
            let op = load_operator(&operator)?;
            let grid = match cli.grid {
                Some(g) => g,
                None => GridSpec::desk(1)?,
            };
            let fields = match testset.split_once(':') {
                None if testset == "std64" => standard_family(grid)?,
                Some(("random", n)) => {
                    let n: usize = n.parse().with_context(|| format!("bad count in '{testset}'"))?;
                    random_fields(grid, n, cli.seed, "random")?
                }
                _ => bail!("unknown test set '{testset}' (std64 or random:COUNT)"),
            };
            let mut options = ClassifyOptions { tolerance, ..Default::default() };
            if let Some(pq) = pq {
                options.a_pq = pq;
            }
            let report = classify(&op, &testset, &fields, &options)?;
            for v in &report.verdicts {
                eprintln!("{v:?}");
            }
            sink.json("classify", &report)
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
