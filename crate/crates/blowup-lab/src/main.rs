use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use blowup_lab::fixtures;
use blowup_lab::harness::{self, HarnessOptions};
use blowup_lab::replay::{replay, ReplayOptions};
use blowup_lab::report::{structured_report, text_report, write_analysis};
use blowup_lab::{parse_script, LabError};

/// Replays experiment scripts for blow-ups, flags of weak maximal contact and kangaroo phenomena.
#[derive(Parser)]
#[command(name = "blowup-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a script, print its report and check its expectations.
    Replay {
        /// Script to replay.
        file: PathBuf,
        /// Print the structured report as JSON instead of the text report.
        #[arg(long)]
        json: bool,
        /// Print the structured key=value report instead of the text report.
        #[arg(long, conflicts_with = "json")]
        structured: bool,
        /// Degree bound of the hypersurface search.
        #[arg(long = "degree-bound", value_name = "D")]
        degree_bound: Option<u64>,
    },
    /// Replay a script and print a diagnostic of its final state (expectations are not enforced).
    Analyze {
        /// Script to replay.
        file: PathBuf,
    },
    /// Enumerate a family of ideals and catalog the kangaroo phenomena found.
    Search {
        /// Family configuration file.
        config: PathBuf,
        /// Number of blow-ups explored along each branch.
        #[arg(long)]
        depth: usize,
        /// Flag evaluations, shared evenly by the members.
        #[arg(long)]
        budget: u64,
        /// Worker threads (the catalog does not depend on this).
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run the built-in fixture corpus.
    Fixtures {
        /// Replay every fixture and check its expectations.
        #[arg(long)]
        verify: bool,
        /// Print the named fixture's script.
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
}

fn read(path: &PathBuf) -> Result<String, LabError> {
    std::fs::read_to_string(path).map_err(|source| LabError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn run(cli: Cli) -> Result<ExitCode, LabError> {
    match cli.command {
        Command::Replay {
            file,
            json,
            structured,
            degree_bound,
        } => {
            let script = parse_script(&read(&file)?)?;
            let r = replay(&script, &ReplayOptions { degree_bound })?;
            if json {
                let value = structured_report(&r).to_json();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&value).expect("report serializes")
                );
            } else if structured {
                print!("{}", structured_report(&r).to_lines());
            } else {
                print!("{}", text_report(&r));
            }
            Ok(if r.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Analyze { file } => {
            let script = parse_script(&read(&file)?)?;
            let r = replay(&script, &ReplayOptions::default())?;
            let snap = r.last().expect("a replay settles at least once");
            let mut out = String::new();
            write_analysis(&mut out, snap, r.ring());
            print!("{out}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Search {
            config,
            depth,
            budget,
            jobs,
        } => {
            let family = harness::parse_family(&read(&config)?)?;
            let catalog = harness::search(
                &family,
                &HarnessOptions {
                    depth,
                    budget,
                    jobs,
                },
            );
            print!("{}", catalog.to_text());
            Ok(ExitCode::SUCCESS)
        }
        Command::Fixtures { verify, show } => {
            if let Some(name) = show {
                return match fixtures::find(&name) {
                    Some(f) => {
                        print!("{}", f.source);
                        Ok(ExitCode::SUCCESS)
                    }
                    None => {
                        eprintln!("unknown fixture `{name}`");
                        Ok(ExitCode::from(2))
                    }
                };
            }
            let mut ok = true;
            for f in fixtures::all() {
                if verify {
                    let r = f.replay()?;
                    println!(
                        "{:<12} {} ({} checks, {} failed)",
                        f.name,
                        if r.passed() { "ok" } else { "FAILED" },
                        r.checks,
                        r.failures.len()
                    );
                    for fail in &r.failures {
                        println!(
                            "    line {}: expect {}: expected {}, got {} (from {})",
                            fail.line, fail.key, fail.expected, fail.actual, fail.source
                        );
                    }
                    ok &= r.passed();
                } else {
                    println!("{:<12} {}", f.name, f.title);
                }
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
