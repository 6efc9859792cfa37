mod search;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use gridtheta::config::OutputFormat;
use gridtheta::error::sizing_estimate;
use gridtheta::fl_complex::{homology_ranks_with, HomologyRanks, RankMethod};
use gridtheta::grid::{braid_to_grid, lookup_example, named_examples, Example};
use gridtheta::pentagon::{build_resolution_at, is_chain_map, phi_tilde, verify_theta_pentagon};
use gridtheta::perm::rank;
use gridtheta::report::{run_all, run_criterion, CRITERIA};
use gridtheta::transverse::{check_negative_stabilization, check_nonzero_propagation, theta_on_grid};
use gridtheta::{BraidWord, Error, GridDiagram, Result, RunConfig};

use search::{flype_search, SearchParams};

/// `println!` that ignores a closed stdout.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser, Debug)]
#[command(name = "gridtheta", version, about = "Grid homology and transverse braid invariants over GF(2)")]
struct Cli {
    /// key=value settings file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Lowers every grid-size cap to this value
    #[arg(long, global = true)]
    max_k: Option<usize>,
    #[arg(long, global = true)]
    format: Option<Format>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Auto,
    Sparse,
    Dense,
}

/// A braid word given inline or by registry name.
#[derive(clap::Args, Debug)]
struct WordArg {
    /// Braid word such as "2: 1 1 1"
    word: Option<String>,
    #[arg(long, conflicts_with = "word")]
    example: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Checks a grid in text format (file path, `-` for stdin, or inline text)
    Validate { input: String },
    /// Lays out a braid word as a grid
    Braid2grid {
        #[command(flatten)]
        word: WordArg,
        #[arg(long)]
        render: bool,
    },
    /// Reads the braid word of a grid
    Grid2braid { input: String },
    /// Self-linking number
    Sl {
        #[command(flatten)]
        word: WordArg,
    },
    /// Self-linking numbers of every sublink
    Sldata {
        #[command(flatten)]
        word: WordArg,
    },
    /// Tilde homology ranks by bigrading
    Rank {
        #[command(flatten)]
        word: WordArg,
        /// Grid input instead of a word
        #[arg(long, conflicts_with_all = ["word", "example"])]
        grid: Option<String>,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
    },
    /// θ certificate of a braid
    Theta {
        #[command(flatten)]
        word: WordArg,
        /// Also checks that θ vanishes after a negative stabilization
        #[arg(long)]
        check_negstab: bool,
        /// Checks nonvanishing of θ(hg) for words G and H
        #[arg(long, num_args = 2, value_names = ["G", "H"], conflicts_with_all = ["word", "example", "check_negstab"])]
        propagation: Option<Vec<String>>,
    },
    /// Pentagon map resolving one positive letter
    Pentagon {
        #[arg(long)]
        word: String,
        #[arg(long, conflicts_with = "position")]
        resolve_last: bool,
        /// 1-based letter position
        #[arg(long)]
        position: Option<usize>,
    },
    /// Searches negative flype families for θ-split pairs
    FlypeSearch {
        #[arg(long, short = 'n')]
        strands: usize,
        /// Longest fragment
        #[arg(long, default_value_t = 2)]
        max_len: usize,
        #[arg(long, short = 'm', default_value_t = 1)]
        m: usize,
        /// Grid-size cap for the θ computations
        #[arg(long, default_value_t = 10)]
        search_max_k: usize,
        /// Evaluates this many seeded random candidates
        #[arg(long)]
        sample: Option<usize>,
        /// Lists every candidate, not only split pairs
        #[arg(long)]
        all: bool,
    },
    /// Named examples
    Examples {
        #[arg(long)]
        name: Option<String>,
    },
    /// Batch acceptance checks
    Report {
        /// Runs only these criteria
        #[arg(long)]
        criterion: Vec<usize>,
    },
}

/// Failure carrying its exit code and an optional JSON body for stdout.
struct Failure {
    code: u8,
    message: String,
    body: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: e.exit_code() as u8,
            message: e.to_string(),
            body: None,
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

fn read_input(input: &str) -> Result<String> {
    if input == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        return Ok(s);
    }
    let path = std::path::Path::new(input);
    if path.is_file() {
        return std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{input}: {e}")));
    }
    Ok(input.to_string())
}

fn parse_grid(input: &str) -> Result<GridDiagram> {
    read_input(input)?.parse()
}

fn parse_word(text: &str) -> Result<BraidWord> {
    text.parse()
}

impl WordArg {
    fn resolve(&self) -> Result<BraidWord> {
        match (&self.word, &self.example) {
            (Some(w), None) => parse_word(w),
            (None, Some(name)) => lookup_example(name)?.word(),
            _ => Err(Error::Parse("give a braid word or --example".into())),
        }
    }
}

fn emit<T: Serialize>(value: &T) {
    out!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn ranks_table(r: &HomologyRanks) -> String {
    let mut out = format!("k={} components={} total={} hat_total={}\n", r.k, r.components, r.total, r.hat_total);
    out.push_str(&format!("{:>7}  {:<20} {:>8}\n", "maslov", "alexander", "rank"));
    for b in &r.buckets {
        let a: Vec<String> = b.alexander.iter().map(|h| h.to_string()).collect();
        out.push_str(&format!("{:>7}  {:<20} {:>8}\n", b.maslov, a.join(","), b.rank));
    }
    out
}

fn cap_body(word: &BraidWord, e: &Error) -> Option<Value> {
    match e {
        Error::ResourceCap { k, limit, estimate } => Some(json!({
            "error": e.to_string(),
            "k": k,
            "limit": limit,
            "estimate": estimate,
            "word": word.to_string(),
            "self_linking": word.self_linking(),
            "components": word.component_count(),
        })),
        _ => None,
    }
}

fn with_cap_body(word: &BraidWord, e: Error) -> Failure {
    let body = cap_body(word, &e);
    Failure {
        body,
        ..Failure::from(e)
    }
}

fn check_failed(what: &str, body: Value) -> Failure {
    Failure {
        code: 3,
        message: format!("{what} failed"),
        body: Some(body),
    }
}

fn run(cli: Cli) -> CliResult {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config.apply_env()?;
    if let Some(k) = cli.max_k {
        config.set("max_k", &k.to_string())?;
        config.limits = config.limits.capped_at(k);
    }
    if let Some(f) = cli.format {
        config.format = match f {
            Format::Json => OutputFormat::Json,
            Format::Table => OutputFormat::Table,
        };
    }
    if let Some(t) = cli.threads.or(config.threads) {
        // a second initialisation only happens in tests; the first pool stays
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let table = config.format == OutputFormat::Table;
    let limits = config.limits;

    match cli.command {
        Command::Validate { input } => {
            let g = parse_grid(&input)?;
            let word = g.to_braid()?;
            emit(&json!({
                "valid": true,
                "k": g.size(),
                "components": g.component_count(),
                "word": word.to_string(),
            }));
        }
        Command::Braid2grid { word, render } => {
            let g = braid_to_grid(&word.resolve()?);
            if render {
                out!("{}", g.render());
            } else {
                out!("{g}");
            }
        }
        Command::Grid2braid { input } => {
            out!("{}", parse_grid(&input)?.to_braid()?);
        }
        Command::Sl { word } => {
            let w = word.resolve()?;
            emit(&json!({
                "word": w.to_string(),
                "strands": w.strands(),
                "algebraic_length": w.algebraic_length(),
                "self_linking": w.self_linking(),
                "components": w.component_count(),
            }));
        }
        Command::Sldata { word } => {
            let w = word.resolve()?;
            let data = w.self_linking_data();
            let entries: Vec<Value> = data
                .entries()
                .iter()
                .map(|(labels, sl)| json!({"components": labels, "sl": sl}))
                .collect();
            emit(&json!({
                "word": w.to_string(),
                "components": data.component_count(),
                "partition": w.component_partition().cycles(),
                "entries": entries,
            }));
        }
        Command::Rank { word, grid, method } => {
            let g = match grid {
                Some(input) => parse_grid(&input)?,
                None => braid_to_grid(&word.resolve()?),
            };
            let method = match method {
                Method::Auto => RankMethod::Auto,
                Method::Sparse => RankMethod::Sparse,
                Method::Dense => RankMethod::Dense,
            };
            let r = homology_ranks_with(&g, &limits, method)?;
            if table {
                out!("{}", ranks_table(&r).trim_end());
            } else {
                emit(&r);
            }
        }
        Command::Theta {
            word,
            check_negstab,
            propagation,
        } => {
            if let Some(gh) = propagation {
                let (g, h) = (parse_word(&gh[0])?, parse_word(&gh[1])?);
                let r = check_nonzero_propagation(&g, &h, &limits)?;
                let body = serde_json::to_value(&r).expect("serializable");
                if !r.holds {
                    return Err(check_failed("propagation", body));
                }
                emit(&body);
                return Ok(());
            }
            let w = word.resolve()?;
            if check_negstab {
                let r = check_negative_stabilization(&w, &limits).map_err(|e| with_cap_body(&w, e))?;
                let body = serde_json::to_value(&r).expect("serializable");
                if !r.holds {
                    return Err(check_failed("negative stabilization", body));
                }
                emit(&body);
            } else {
                let g = braid_to_grid(&w);
                let cert = theta_on_grid(&w, &g, &limits).map_err(|e| with_cap_body(&w, e))?;
                emit(&cert);
            }
        }
        Command::Pentagon {
            word,
            resolve_last,
            position,
        } => {
            let w = parse_word(&word)?;
            let pos = match (resolve_last, position) {
                (_, Some(p)) => p,
                (true, None) => w.len(),
                (false, None) => return Err(Error::Parse("give --resolve-last or --position".into()).into()),
            };
            let pair = build_resolution_at(&w, pos)?;
            let gate = verify_theta_pentagon(&pair);
            let phi = phi_tilde(&pair, &limits)?;
            let chain_map = is_chain_map(&pair, &phi, &limits)?;
            let z_beta = rank(pair.g_beta.z_plus().rows());
            let z_gamma = rank(pair.g_gamma.z_plus().rows());
            let image: Vec<u32> = phi.apply(&[z_beta as u32]);
            let body = json!({
                "pair": pair,
                "theta_pentagons": gate,
                "chain_map": chain_map,
                "theta_rank_beta": z_beta,
                "theta_rank_gamma": z_gamma,
                "theta_image": image,
                "image_is_theta": image == vec![z_gamma as u32],
            });
            if !gate.pass || !chain_map {
                return Err(check_failed("pentagon checks", body));
            }
            emit(&body);
        }
        Command::FlypeSearch {
            strands,
            max_len,
            m,
            search_max_k,
            sample,
            all,
        } => {
            let params = SearchParams {
                strands,
                max_len,
                m,
                limits: limits.capped_at(search_max_k),
                sample,
                seed: config.seed,
                time_budget: config.time_budget_secs.map(Duration::from_secs),
            };
            let r = flype_search(&params, all)?;
            if table {
                out!(
                    "candidates={} computed={} skipped={} split={}",
                    r.candidates,
                    r.computed,
                    r.skipped,
                    r.split.len()
                );
                let rows = r.all.as_ref().unwrap_or(&r.split);
                for c in rows {
                    let v = |x: Option<bool>| x.map_or("-".to_string(), |b| if b { "0".into() } else { "nonzero".into() });
                    out!(
                        "{:>5}  [{}] [{}] [{}]  w1 {}  w2 {}  sl-data-equal={}  θ(w1)={} θ(w2)={}",
                        c.index,
                        c.a,
                        c.b,
                        c.c,
                        c.w1,
                        c.w2,
                        c.sl_data_equal,
                        v(c.w1_vanishes),
                        v(c.w2_vanishes)
                    );
                }
            } else {
                emit(&r);
            }
        }
        Command::Examples { name } => match name {
            Some(n) => emit(&lookup_example(&n)?),
            None => {
                let rows: Vec<Value> = named_examples()
                    .into_iter()
                    .map(|(n, e)| {
                        let kind = match e {
                            Example::Grid(_) => "grid",
                            Example::Word(_) => "word",
                        };
                        let w = e.word().ok();
                        let k = e.grid().size();
                        json!({
                            "name": n,
                            "kind": kind,
                            "word": w.as_ref().map(|w| w.to_string()),
                            "self_linking": w.as_ref().map(|w| w.self_linking()),
                            "grid_size": k,
                            "generators": sizing_estimate(k),
                        })
                    })
                    .collect();
                if table {
                    for r in &rows {
                        out!(
                            "{:<12} {:<5} k={:<4} sl={:<4} {}",
                            r["name"].as_str().unwrap_or(""),
                            r["kind"].as_str().unwrap_or(""),
                            r["grid_size"],
                            r["self_linking"],
                            r["word"].as_str().unwrap_or("")
                        );
                    }
                } else {
                    emit(&rows);
                }
            }
        },
        Command::Report { criterion } => {
            let results = if criterion.is_empty() {
                run_all(&config)
            } else {
                if let Some(bad) = criterion.iter().find(|&&c| c == 0 || c > CRITERIA) {
                    return Err(Error::Parse(format!("no criterion {bad}")).into());
                }
                criterion.iter().map(|&id| run_criterion(id, &config)).collect()
            };
            let failed = results
                .iter()
                .filter(|r| matches!(r.outcome, gridtheta::report::Outcome::Fail(_)))
                .count();
            if table {
                for r in &results {
                    out!("{r}");
                }
            } else {
                emit(&results);
            }
            if failed > 0 {
                return Err(Failure {
                    code: 3,
                    message: format!("{failed} criteria failed"),
                    body: None,
                });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Some(body) = f.body {
                emit(&body);
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
