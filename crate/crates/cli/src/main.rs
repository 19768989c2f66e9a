use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use carver_core::generate::{random_arrangement, spectrahedron_minors};
use carver_core::poly::Polynomial;
use carver_core::projective::DEFAULT_DELTA;
use carver_core::regions::RegionsOptions;
use region_carver::bench::{self, Family};
use region_carver::input::render_input;
use region_carver::{emit, load, load_document, membership, regions, CliError, RegionsJob, Source};

/// Regions of the complement of a real hypersurface arrangement.
#[derive(Parser, Debug)]
#[command(name = "region-carver", version)]
struct Cli {
    /// Seed for every random choice; fixes the output up to timing fields.
    #[arg(long, global = true, env = "REGION_CARVER_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// More log output on stderr; repeat for more.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute all regions and print the JSON result document.
    Regions(RegionsArgs),
    /// Find the region containing a point.
    Membership(MembershipArgs),
    /// Write k dense random polynomials of degree d in n variables.
    GenRandom {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: u32,
    },
    /// Write the principal minors of a random symmetric m×m pencil in n
    /// variables.
    GenSpectrahedron {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Region statistics over seeded random instances, as CSV.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Input file: a `vars:` line followed by one polynomial per line.
    input: Option<PathBuf>,
    /// Built-in arrangement: ellipsoids, hyperboloid, discriminant8,
    /// elliptope or paraboloids.
    #[arg(long, conflicts_with = "input")]
    example: Option<String>,
    /// Inline polynomial; repeat for each one. Needs --vars.
    #[arg(long = "poly", conflicts_with_all = ["input", "example"], requires = "vars")]
    polys: Vec<String>,
    /// Variable names for --poly, e.g. "x y" or "x,y".
    #[arg(long)]
    vars: Option<String>,
}

impl InputArgs {
    fn source(&self) -> Result<Source, CliError> {
        match (&self.input, &self.example, &self.vars) {
            (Some(p), _, _) => Ok(Source::File(p.clone())),
            (None, Some(e), _) => Ok(Source::Example(e.clone())),
            (None, None, Some(v)) => Ok(Source::Inline {
                vars: v.clone(),
                polys: self.polys.clone(),
            }),
            (None, None, None) => Err(CliError::Input(
                "no arrangement given: pass a file, --example or --poly with --vars".into(),
            )),
        }
    }
}

#[derive(Args, Debug)]
struct RegionsArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Classify regions as bounded, unbounded or undecided.
    #[arg(long)]
    bounded_check: bool,
    /// Fuse regions that meet at infinity.
    #[arg(long)]
    projective: bool,
    /// Slab distance 1/δ for the boundedness check.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Exponents s_1..s_k, comma separated (default all 1).
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<u32>>,
    /// Denominator exponent (default: the smallest valid one).
    #[arg(long)]
    t: Option<u32>,
}

#[derive(Args, Debug)]
struct MembershipArgs {
    /// Result document from an earlier `regions` run.
    #[arg(long, conflicts_with_all = ["input", "example", "polys"])]
    result: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    /// Coordinates, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    point: Vec<f64>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Random row `n,k,d`; repeatable.
    #[arg(long = "random", value_parser = Family::parse_random)]
    random: Vec<Family>,
    /// Spectrahedron row `n,m`; repeatable.
    #[arg(long = "spectrahedron", value_parser = Family::parse_spectrahedron)]
    spectrahedra: Vec<Family>,
    /// Instances per row.
    #[arg(long = "reps", short = 'N', default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
}

fn with_newline(mut s: String) -> String {
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<(), CliError> {
    let out = cli.output.as_deref();
    let parallel = cli.threads != Some(1);
    match cli.command {
        Command::Regions(a) => {
            let input = load(&a.input.source()?)?;
            let job = RegionsJob {
                bounded_check: a.bounded_check,
                projective: a.projective,
                delta: a.delta,
                s: a.s,
                t: a.t,
                parallel,
                ..RegionsJob::new(cli.seed)
            };
            let doc = regions(&input, &job)?;
            emit(&with_newline(doc.to_json()), out)
        }
        Command::Membership(a) => {
            let doc = match &a.result {
                Some(path) => load_document(path)?,
                None => {
                    let input = load(&a.input.source()?)?;
                    regions(&input, &RegionsJob { parallel, ..RegionsJob::new(cli.seed) })?
                }
            };
            let answer = membership(&doc, &a.point)?;
            let text = serde_json::to_string_pretty(&answer).expect("answer serialises");
            emit(&with_newline(text), out)
        }
        Command::GenRandom { n, k, d } => {
            if n == 0 || k == 0 || d == 0 {
                return Err(CliError::Input("n, k and d must be positive".into()));
            }
            let arr = random_arrangement(n, k, d, cli.seed);
            let names = Polynomial::default_var_names(n);
            let vars: Vec<&str> = names.iter().map(String::as_str).collect();
            let comment = format!("gen-random n={n} k={k} d={d} seed={}", cli.seed);
            emit(&render_input(&arr, &vars, Some(&comment)), out)
        }
        Command::GenSpectrahedron { n, m } => {
            if n == 0 || m == 0 {
                return Err(CliError::Input("n and m must be positive".into()));
            }
            let arr = spectrahedron_minors(n, m, cli.seed);
            let names = Polynomial::default_var_names(n);
            let vars: Vec<&str> = names.iter().map(String::as_str).collect();
            let comment = format!("gen-spectrahedron n={n} m={m} seed={}", cli.seed);
            emit(&render_input(&arr, &vars, Some(&comment)), out)
        }
        Command::Bench(a) => {
            let families: Vec<Family> = a.random.iter().chain(&a.spectrahedra).copied().collect();
            if families.is_empty() {
                return Err(CliError::Input("give at least one --random or --spectrahedron row".into()));
            }
            let opts = RegionsOptions {
                parallel,
                ..RegionsOptions::default()
            };
            let rows: Vec<_> = families
                .into_iter()
                .map(|f| bench::run_row(f, a.reps as usize, cli.seed, &opts))
                .collect();
            let mut buf = Vec::new();
            bench::write_csv(&rows, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
            emit(&String::from_utf8(buf).expect("csv is utf-8"), out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
