//! Scenario runner and object inspector for the qloop exact-algebra library.
//!
//! Exit codes: 0 all checks verified (or truncated-verified), 1 at least one
//! check refuted or inconclusive, 2 scenario schema/IO error, 3 internal
//! error.

mod scenario;

use clap::{Parser, Subcommand};
use qloop::relations::RelationReport;
use qloop::scalar::ScalarContext;
use scenario::{describe, RepSpec, ScenarioFile};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "qloop", about = "exact checks for braided defect algebra", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario file and write report.json / summary.csv.
    Run {
        /// Path to the scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory (env QLOOP_OUT overrides).
        #[arg(long, default_value = "qloop-out")]
        out: PathBuf,
        /// Seed override for randomized samples.
        #[arg(long)]
        seed: Option<u64>,
        /// Scalar mode override: "generic" or "root:N".
        #[arg(long)]
        mode: Option<String>,
        /// Number of checks to run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print a constructed object (weights and matrices in canonical text).
    Describe {
        /// Constructor spec: inline JSON, or @path to a JSON file.
        spec: String,
        /// Scalar mode: "generic" or "root:N".
        #[arg(long, default_value = "generic")]
        mode: String,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { scenario, out, seed, mode, jobs } => run(&scenario, &out, seed, mode, jobs),
        Command::Describe { spec, mode } => run_describe(&spec, &mode),
    };
    std::process::exit(code);
}

fn parse_mode(mode: &str) -> Result<ScalarContext, String> {
    if mode == "generic" {
        Ok(ScalarContext::generic(2))
    } else if let Some(n) = mode.strip_prefix("root:") {
        let n: u32 = n.parse().map_err(|_| format!("bad root order '{n}'"))?;
        ScalarContext::root_of_unity(n).map_err(|e| e.to_string())
    } else {
        Err(format!("unknown mode '{mode}' (expected generic or root:N)"))
    }
}

fn run_describe(spec: &str, mode: &str) -> i32 {
    let ctx = match parse_mode(mode) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let text = if let Some(path) = spec.strip_prefix('@') {
        match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {path}: {e}");
                return 2;
            }
        }
    } else {
        spec.to_string()
    };
    let parsed: RepSpec = match serde_json::from_str(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: bad constructor spec: {e}");
            return 2;
        }
    };
    match describe(&parsed, &ctx) {
        Ok(s) => {
            print!("{s}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run(
    scenario_path: &Path,
    out_flag: &Path,
    seed_flag: Option<u64>,
    mode_flag: Option<String>,
    jobs: usize,
) -> i32 {
    let bytes = match std::fs::read(scenario_path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read scenario: {e}");
            return 2;
        }
    };
    let scenario: ScenarioFile = match serde_json::from_slice(&bytes) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: scenario schema: {e}");
            return 2;
        }
    };
    let ctx = match mode_flag {
        Some(m) => match parse_mode(&m) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        },
        None => match scenario.context.build() {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: scenario context: {e}");
                return 2;
            }
        },
    };
    let seed = seed_flag.unwrap_or(scenario.seed);
    let hash = hex_digest(&bytes);

    let results = match run_checks(&scenario, &ctx, seed, jobs.max(1)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("internal error: {e}");
            return 3;
        }
    };

    let out_dir = std::env::var_os("QLOOP_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| out_flag.to_path_buf());
    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        eprintln!("error: cannot create output directory: {e}");
        return 3;
    }

    let all_ok = results.iter().all(|r| r.ok());
    for r in &results {
        println!(
            "{}: {}",
            r.name,
            serde_json::to_value(r.verdict).unwrap().as_str().unwrap()
        );
    }

    let report = serde_json::json!({
        "scenario_hash": hash,
        "seed": seed,
        "results": results,
    });
    let json = serde_json::to_string_pretty(&report).expect("serializable report");
    if let Err(e) = write_atomic(&out_dir.join("report.json"), json.as_bytes()) {
        eprintln!("error: cannot write report: {e}");
        return 3;
    }
    let mut csv = String::from("name,verdict,notes\n");
    for r in &results {
        let verdict = serde_json::to_value(r.verdict).unwrap();
        csv.push_str(&format!(
            "{},{},{}\n",
            csv_field(&r.name),
            verdict.as_str().unwrap(),
            csv_field(&r.notes.join("; ")),
        ));
    }
    if let Err(e) = write_atomic(&out_dir.join("summary.csv"), csv.as_bytes()) {
        eprintln!("error: cannot write summary: {e}");
        return 3;
    }

    if all_ok {
        0
    } else {
        1
    }
}

fn run_checks(
    scenario: &ScenarioFile,
    ctx: &ScalarContext,
    seed: u64,
    jobs: usize,
) -> Result<Vec<RelationReport>, String> {
    let n = scenario.checks.len();
    let mut results: Vec<Option<RelationReport>> = (0..n).map(|_| None).collect();
    if jobs <= 1 || n <= 1 {
        for (i, check) in scenario.checks.iter().enumerate() {
            results[i] = Some(check.run(ctx, seed.wrapping_add(i as u64), i));
        }
    } else {
        // independent checks run concurrently on a simple work queue
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots: Vec<std::sync::Mutex<Option<RelationReport>>> =
            (0..n).map(|_| std::sync::Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..jobs.min(n) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= n {
                        break;
                    }
                    let r = scenario.checks[i].run(ctx, seed.wrapping_add(i as u64), i);
                    *slots[i].lock().unwrap() = Some(r);
                });
            }
        });
        for (i, slot) in slots.into_iter().enumerate() {
            results[i] = slot.into_inner().unwrap();
        }
    }
    results
        .into_iter()
        .map(|r| r.ok_or_else(|| "missing check result".to_string()))
        .collect()
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
