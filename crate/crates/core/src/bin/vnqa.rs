use std::io::{BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};

use vnqa::mapping::{DisambiguationRequest, MappingStep};
use vnqa::service::{self, run_eval, Config, EvalMode, Service};
use vnqa::{Engine, Trace};

#[derive(Parser)]
#[command(name = "vnqa", version, about = "Answer Vietnamese questions over an ontology")]
struct Cli {
    /// service config (`key = value`); built-in resources when absent
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Answer one question
    Ask {
        text: String,
        /// take the top option instead of asking
        #[arg(long)]
        auto: bool,
        /// print the full response as JSON
        #[arg(long)]
        json: bool,
    },
    /// Ask questions interactively
    Repl,
    /// Evaluate a question corpus
    Eval {
        #[arg(long)]
        corpus: PathBuf,
        /// `question<TAB>i,j,...` per line; without it the top option is taken
        #[arg(long)]
        choices: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Serve the HTTP API
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
}

fn load_config(path: Option<&Path>) -> anyhow::Result<Config> {
    let mut c = match path {
        Some(p) => Config::load(p)?,
        None => Config::parse(vnqa::resources::DEFAULT_CONFIG, ".")?,
    };
    c.apply_env(|k| std::env::var(k).ok());
    Ok(c)
}

fn engine(c: &Config) -> anyhow::Result<Engine> {
    Ok(Engine::from_sources(&c.sources()?, c.mapping()?)?)
}

fn print_options(req: &DisambiguationRequest) {
    let what = req.slot.raw.as_deref().unwrap_or("(unstated relation)");
    println!("`{what}` ({}) could mean:", req.slot.slot);
    for (i, o) in req.options.iter().enumerate() {
        let dir = match o.orientation {
            Some(vnqa::ontology::Orientation::Inverse) => "⁻¹",
            _ => "",
        };
        println!("  [{i}] {}{dir}  {:.2}", o.id, o.score);
    }
}

fn prompt_choice(req: &DisambiguationRequest, input: &mut impl BufRead) -> anyhow::Result<usize> {
    print_options(req);
    loop {
        print!("choice> ");
        std::io::stdout().flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            anyhow::bail!("input closed while a choice was pending");
        }
        match line.trim().parse::<usize>() {
            Ok(i) if i < req.options.len() => return Ok(i),
            _ => println!("enter a number from 0 to {}", req.options.len() - 1),
        }
    }
}

enum Outcome {
    Answered,
    NeedsChoice,
    Failed,
}

/// Runs one question. `choose` returns `None` when no choice can be made.
fn answer_one(
    e: &Engine,
    question: &str,
    json: bool,
    mut choose: impl FnMut(&DisambiguationRequest) -> anyhow::Result<Option<usize>>,
) -> anyhow::Result<Outcome> {
    let fail = |err: &vnqa::EngineError| {
        if json {
            println!("{}", serde_json::json!({"status": "error", "error": {"stage": err.stage(), "message": err.to_string()}}));
        } else {
            eprintln!("error ({}): {err}", err.stage());
        }
        Ok(Outcome::Failed)
    };
    let analysis = match e.analyse(question) {
        Ok(a) => a,
        Err(err) => return fail(&err),
    };
    let mut step = e.map(&analysis.ir);
    let onto = loop {
        match step {
            MappingStep::Resolved(t) => break t,
            MappingStep::Failed(f) => return fail(&vnqa::EngineError::Mapping(f)),
            MappingStep::Suspended(s) => match choose(s.request())? {
                Some(i) => step = e.resume(&s, i)?,
                None => {
                    if json {
                        println!("{}", serde_json::json!({"status": "needs_disambiguation", "disambiguation": s.request()}));
                    } else {
                        print_options(s.request());
                    }
                    return Ok(Outcome::NeedsChoice);
                }
            },
        }
    };
    let answer = match e.extract(&analysis.ir, &onto) {
        Ok(a) => a,
        Err(err) => return fail(&err),
    };
    if json {
        let mut trace = Trace::from_annotations(&analysis.annotations);
        trace.ir = Some(analysis.ir.clone());
        trace.onto_tuples = onto.iter().map(|t| t.to_string()).collect();
        println!("{}", serde_json::json!({"status": "answered", "answer": answer, "trace": trace}));
    } else {
        println!("{}", answer.rendered_text);
    }
    Ok(Outcome::Answered)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Ask { text, auto, json } => {
            let e = engine(&config)?;
            let interactive = !auto && std::io::stdin().is_terminal();
            let stdin = std::io::stdin();
            let outcome = answer_one(&e, &text, json, |req| {
                if auto {
                    Ok(Some(0))
                } else if interactive {
                    prompt_choice(req, &mut stdin.lock()).map(Some)
                } else {
                    Ok(None)
                }
            })?;
            Ok(match outcome {
                Outcome::Answered => ExitCode::SUCCESS,
                Outcome::NeedsChoice => ExitCode::from(2),
                Outcome::Failed => ExitCode::FAILURE,
            })
        }
        Command::Repl => {
            let e = engine(&config)?;
            let stdin = std::io::stdin();
            let mut input = stdin.lock();
            loop {
                print!("câu hỏi> ");
                std::io::stdout().flush()?;
                let mut line = String::new();
                if input.read_line(&mut line)? == 0 {
                    break;
                }
                let q = line.trim();
                if q.is_empty() {
                    continue;
                }
                if q == ":q" {
                    break;
                }
                // a closed input mid-question ends the session quietly
                if let Err(err) = answer_one(&e, q, false, |req| prompt_choice(req, &mut input).map(Some)) {
                    eprintln!("{err}");
                    break;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { corpus, choices, json } => {
            let e = engine(&config)?;
            let text = std::fs::read_to_string(&corpus).with_context(|| format!("reading {}", corpus.display()))?;
            let mode = match choices {
                Some(p) => {
                    let c = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                    EvalMode::scripted(&c).map_err(anyhow::Error::msg)?
                }
                None => EvalMode::Auto,
            };
            let report = run_eval(&e, &text, &mode);
            if json {
                println!("{}", serde_json::to_string_pretty(&report.to_json())?);
            } else {
                print!("{report}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve { port, host } => {
            let svc = Arc::new(Service::from_config(&config)?);
            let addr = std::net::SocketAddr::new(host, port);
            let rt = tokio::runtime::Runtime::new()?;
            eprintln!("listening on http://{addr}");
            rt.block_on(service::http::serve(svc, config.static_dir(), addr))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
