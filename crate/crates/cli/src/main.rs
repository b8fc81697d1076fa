mod commands;
mod plan;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "retraction-lab", version, about = "Counting retractions, compactions and surjective homomorphisms")]
pub struct Cli {
    /// Omit the run metadata (timings, version) so identical runs produce identical bytes.
    #[arg(long, global = true)]
    pub no_meta: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Complexity class of #Ret(H) for a graph of girth at least 5.
    Classify {
        #[arg(short = 'H', long = "target")]
        target: PathBuf,
    },
    /// Exact counting.
    Count(CountArgs),
    /// Monte Carlo estimate of #Sur or #Comp from a retraction oracle.
    Approx(ApproxArgs),
    /// Gadget constructions.
    #[command(subcommand)]
    Gadget(GadgetCmd),
    /// Run a reduction plan against a counting oracle.
    #[command(subcommand)]
    Estimate(EstimateCmd),
    /// CSP translations.
    #[command(subcommand)]
    Csp(CspCmd),
    /// Homomorphism types into H_k.
    #[command(subcommand)]
    Types(TypesCmd),
    /// Run verification targets (a suite, a criterion name or number, or `all`).
    Verify {
        #[arg(default_value = "all")]
        target: String,
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = retraction_core::verify::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long, default_value = "hom")]
    pub mode: String,
    #[arg(short = 'G', long = "pattern")]
    pub pattern: PathBuf,
    #[arg(short = 'H', long = "target")]
    pub target: Option<PathBuf>,
    #[arg(short = 'L', long = "lists")]
    pub lists: Option<PathBuf>,
    /// bt | ie | enum | blocked
    #[arg(long, default_value = "bt")]
    pub method: String,
}

#[derive(Args, Debug)]
pub struct ApproxArgs {
    #[arg(long)]
    pub mode: String,
    #[arg(short = 'G', long = "pattern")]
    pub pattern: PathBuf,
    #[arg(short = 'H', long = "target")]
    pub target: Option<PathBuf>,
    #[arg(short = 'L', long = "lists")]
    pub lists: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// exact | noisy:<eps0>,<delta0>
    #[arg(long, default_value = "exact")]
    pub oracle: String,
    /// jvv | aggregate | auto
    #[arg(long, default_value = "auto")]
    pub sampler: String,
    /// Also compute the exact count and report the ratio.
    #[arg(long)]
    pub check: bool,
}

#[derive(Subcommand, Debug)]
pub enum GadgetCmd {
    /// Multiterminal-cut reduction instance.
    CutInstance {
        #[arg(short = 'G', long = "graph")]
        graph: PathBuf,
        /// Three distinct terminals, comma separated.
        #[arg(long)]
        terminals: String,
        #[arg(long)]
        budget: u64,
        #[arg(short = 'H', long = "target")]
        target: PathBuf,
        /// Dirichlet precision δ′ (defaults to the value implied by --epsilon).
        #[arg(long = "delta-prime")]
        delta_prime: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Write the plan file here.
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Write the blocked instance file here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Large-cut reduction instance into H_k.
    LargecutInstance {
        #[arg(short = 'G', long = "graph")]
        graph: PathBuf,
        #[arg(long = "cut-size")]
        cut_size: u64,
        #[arg(short = 'k', default_value_t = 1)]
        k: u64,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        t: Option<u64>,
        #[arg(long)]
        s: Option<u64>,
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// A named fixed graph: jq:<q>, wr:<q>, twrench, hk:<k>, hkp:<k>, pbrp:<Q>:<S>.
    Fixed {
        kind: String,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// The gadget J(p, q, t) as a blocked instance.
    JBlock {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        t: u64,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Simultaneous rational approximation with denominator at most N.
    Dirichlet {
        /// Comma separated reals.
        #[arg(long)]
        lambdas: String,
        #[arg(short = 'N', long = "bound")]
        n: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum EstimateCmd {
    Cuts {
        #[arg(long)]
        plan: PathBuf,
        /// exact | exact-blocked | noisy:<seed>
        #[arg(long, default_value = "exact-blocked")]
        oracle: String,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Also brute-force the true count.
        #[arg(long)]
        check: bool,
    },
    Largecut {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, default_value = "exact-blocked")]
        oracle: String,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long)]
        check: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum CspCmd {
    /// H_{Iv,Ie}, or the digraph H_{Iv,If,Ib} when --fwd/--bwd are given.
    BuildGraph {
        #[arg(long)]
        iv: PathBuf,
        #[arg(long)]
        ie: Option<PathBuf>,
        #[arg(long)]
        fwd: Option<PathBuf>,
        #[arg(long)]
        bwd: Option<PathBuf>,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Translate a retraction instance into #CSP({Imp, δ0, δ1}).
    Translate {
        #[arg(long)]
        iv: PathBuf,
        #[arg(long)]
        ie: PathBuf,
        #[arg(short = 'G', long = "pattern")]
        pattern: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// The CSP pair whose graph is PBRP(Q, S) plus isolated vertices.
    Pbrp {
        #[arg(short = 'Q')]
        q: usize,
        /// Comma separated subset of 1..Q (may be empty).
        #[arg(short = 'S', default_value = "")]
        s: String,
    },
    /// Exact solution count of a CSP file.
    Count { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum TypesCmd {
    /// The maximal types for H_k with their N̂ bases.
    Table {
        #[arg(short = 'k', default_value_t = 1)]
        k: usize,
    },
    /// Brute-force type counts against the closed form.
    Verify {
        #[arg(short = 'k', default_value_t = 1)]
        k: usize,
        /// Semicolon separated p,q,t triples.
        #[arg(long, default_value = "1,1,1;2,2,1;1,2,1;2,1,1")]
        grid: String,
    },
    /// Per-step ratios N̂(T)/N̂(T4) and the sandwich scan.
    Dominance {
        #[arg(short = 'k', default_value_t = 1)]
        k: usize,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value = "1,2,4,8")]
        ts: String,
        #[arg(long = "scan", default_value_t = 6)]
        scan: u64,
    },
}

/// Errors from the domain map to exit 1; clap handles usage errors with 2.
fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = commands::dispatch(&cli.command);
    let (mut doc, code) = match result {
        Ok(v) => (v, 0u8),
        Err(e) => (json!({ "error": format!("{e:#}") }), 1u8),
    };
    if cli.no_meta {
        strip_timings(&mut doc);
    } else if let Value::Object(m) = &mut doc {
        m.insert(
            "meta".into(),
            json!({
                "tool": env!("CARGO_PKG_NAME"),
                "version": env!("CARGO_PKG_VERSION"),
                "elapsed_seconds": start.elapsed().as_secs_f64(),
            }),
        );
    }
    let text = serde_json::to_string_pretty(&doc).expect("json") + "\n";
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("cannot write {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if code != 0 {
        if let Some(e) = doc.get("error") {
            eprintln!("error: {}", e.as_str().unwrap_or_default());
        }
    }
    ExitCode::from(code)
}

fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("seconds");
            m.values_mut().for_each(strip_timings);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timings),
        _ => {}
    }
}
