//! `kh`: Khovanov homology of diskular tangles, maps of movies, and the check suites.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kh_core::cobordism::{movie_map, Movie};
use kh_core::complex::{cone, minimal_map, ChainMap};
use kh_core::error::KhError;
use kh_core::io::{matrix_value, parse_movie, parse_tangle};
use kh_core::khcomplex::KhComplex;
use kh_core::matching::CrossinglessMatching;
use kh_core::verify::run_suite;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "kh", version, about = "Khovanov homology of diskular tangles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Homology table of a diagram, closed off by caps if it has boundary.
    Kh {
        file: PathBuf,
        /// A crossingless matching such as `1-4,2-3`, one per inner disk in order and
        /// then one for the outer boundary.
        #[arg(long, num_args = 1..)]
        caps: Vec<String>,
    },
    /// Bookkeeping, chain-map matrices and the induced map on homology of a movie.
    Map {
        file: PathBuf,
        /// Also print the homology of the mapping cone (closed movies only).
        #[arg(long)]
        cone: bool,
    },
    /// Run check suites and print their reports.
    Verify {
        /// movie-moves, rigidity, duality, gluing, euler, neckcut, ribbon or all.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_matching(n: usize, s: &str) -> Result<CrossinglessMatching, KhError> {
    let mut pairs = Vec::new();
    for p in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || KhError::Parse(format!("cap pair `{p}` is not of the form i-j"));
        let (i, j) = p.split_once('-').ok_or_else(bad)?;
        let i: usize = i.trim().parse().map_err(|_| bad())?;
        let j: usize = j.trim().parse().map_err(|_| bad())?;
        pairs.push((i.min(j), i.max(j)));
    }
    CrossinglessMatching::new(n, pairs)
}

fn read(path: &PathBuf) -> Result<String, KhError> {
    std::fs::read_to_string(path).map_err(|e| KhError::Parse(format!("{}: {e}", path.display())))
}

fn cmd_kh(file: &PathBuf, caps: &[String]) -> Result<String, KhError> {
    let t = parse_tangle(&read(file)?)?;
    let closed = if t.is_closed() {
        if !caps.is_empty() {
            return Err(KhError::Arity("a closed diagram takes no caps".into()));
        }
        t
    } else {
        if caps.len() != t.inner.len() + 1 {
            return Err(KhError::Arity(format!(
                "this tangle needs {} caps: one per inner disk and one for the outer boundary",
                t.inner.len() + 1
            )));
        }
        let inner = t
            .inner
            .iter()
            .zip(caps)
            .map(|(n, s)| parse_matching(*n, s))
            .collect::<Result<Vec<_>, _>>()?;
        let outer = parse_matching(t.n, caps.last().expect("checked above"))?;
        t.close(&inner, &outer)?
    };
    Ok(KhComplex::new(&closed, 0)?.homology().to_json())
}

fn cmd_map(file: &PathBuf, with_cone: bool) -> Result<Value, KhError> {
    let movie: Movie = parse_movie(&read(file)?)?;
    let (p, chi) = movie.bookkeeping()?;
    let q_degree = movie.q_degree();
    let eval = movie_map(&movie)?;
    let mut closures = Vec::new();
    for ((caps, b), f) in &eval.map.maps {
        let source = &eval.source.entry(caps, *b).kc.complex;
        let target = &eval.target.entry(caps, *b).kc.complex;
        closures.push(json!({
            "caps": caps,
            "outer": b,
            "source_grades": source.grades,
            "target_grades": target.grades,
            "matrix": matrix_value(f),
            "on_homology": minimal_map(f, (0, q_degree), source, target),
        }));
    }
    let mut out = json!({
        "P": p,
        "chi": chi,
        "dots": movie.dots(),
        "q_degree": q_degree,
        "closures": closures,
    });
    if with_cone {
        if !movie.start.is_closed() {
            return Err(KhError::Arity("the cone is only printed for closed movies".into()));
        }
        let f = eval.map.maps.values().next().expect("a closed module has one closure").clone();
        let source = eval.source.entry(&[], 0).kc.complex.shifted(0, q_degree);
        let target = &eval.target.entry(&[], 0).kc.complex;
        let c = cone(&ChainMap::new(f, (0, 0)), &source, target)?;
        out["cone"] = serde_json::to_value(c.homology().entries()).expect("entries serialize");
    }
    Ok(out)
}

fn init_threads() {
    if let Some(n) = std::env::var("KH_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // an already built pool is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Kh { file, caps } => cmd_kh(file, caps).map(|s| (s, true)),
        Command::Map { file, cone } => cmd_map(file, *cone).map(|v| (v.to_string(), true)),
        Command::Verify { suite, seed } => run_suite(suite, *seed).map(|reports| {
            let ok = reports.iter().all(|r| !r.failed());
            (serde_json::to_string_pretty(&reports).expect("reports serialize"), ok)
        }),
    };
    match result {
        Ok((out, ok)) => {
            println!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("kh: {e}");
            ExitCode::from(2)
        }
    }
}
