//! `media`: verify, represent, convert and construct media from the shell.
//!
//! Exit status: 0 success or "yes", 1 a well-formed "no", 2 unreadable or
//! malformed input, 3 a resource cap was hit.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use media_core::arrangements::{
    arrangement_medium, enumerate_regions, mosaic_window, region_adjacency, regions_json,
    Arrangement, MosaicKind,
};
use media_core::lin_orders::{linear_medium_capped, DEFAULT_MAX_N};
use media_core::pcube::{
    is_partial_cube, media_isomorphic_capped, medium_graph, LabeledGraph, PartialCube,
    DEFAULT_ISO_CAP,
};
use media_core::representation::{
    decide_medium, orient_from_state, positive_content_family, MediumDecision,
};
use media_core::token_core::default_bound;
use media_core::{check_axioms, MediaError, TokenSystem};

const DEFAULT_MAX_STATES: usize = 2000;
const DEFAULT_MAX_LINES: usize = 64;
const DEFAULT_MAX_RADIUS: u32 = 8;

#[derive(Parser)]
#[command(
    name = "media",
    version,
    about = "Token systems, media and their set representations"
)]
struct Cli {
    /// Largest token system (state count) accepted as input.
    #[arg(long, global = true, env = "MEDIA_MAX_STATES", default_value_t = DEFAULT_MAX_STATES)]
    max_states: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check axioms M1-M4 and decide whether a token system is a medium.
    Check {
        /// Token system JSON, `-` for stdin.
        #[arg(default_value = "-")]
        input: String,
        /// Longest message examined for M3 and M4 [default: 2 x tokens].
        #[arg(long, env = "MEDIA_BOUND")]
        bound: Option<usize>,
    },
    /// Represent a medium by the positive contents of its states.
    Represent {
        #[arg(default_value = "-")]
        input: String,
        /// State whose content is taken as the negative tokens [default: first state].
        #[arg(long)]
        base: Option<String>,
    },
    /// Export the graph of a token system as JSON or DOT.
    Graph {
        #[arg(default_value = "-")]
        input: String,
        /// Write DOT instead of JSON, to PATH or to stdout when PATH is omitted.
        #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
        dot: Option<String>,
    },
    /// Decide whether a graph is a partial cube (JSON or `u v` edge list).
    Pcube {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Search for an isomorphism between two token systems.
    Iso {
        a: String,
        b: String,
        /// Largest state count searched.
        #[arg(long, env = "MEDIA_ISO_CAP", default_value_t = DEFAULT_ISO_CAP)]
        cap: usize,
    },
    /// The medium of linear orders on {1..N}.
    Linmedium {
        n: usize,
        /// Emit the family of encoded orders instead of the token system.
        #[arg(long)]
        family: bool,
        /// Largest N accepted.
        #[arg(long, env = "MEDIA_MAX_N", default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
    },
    /// Regions, region graph and medium of a line arrangement.
    Arrangement {
        #[arg(default_value = "-")]
        input: String,
        /// Also write the region graph as DOT.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
        /// Largest number of lines accepted.
        #[arg(long, env = "MEDIA_MAX_LINES", default_value_t = DEFAULT_MAX_LINES)]
        max_lines: usize,
    },
    /// A window of a periodic line mosaic, run through the arrangement pipeline.
    Mosaic {
        /// `triangular` or `truncated-square`.
        kind: String,
        #[arg(long, default_value_t = 2)]
        radius: u32,
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
        /// Largest radius accepted.
        #[arg(long, env = "MEDIA_MAX_RADIUS", default_value_t = DEFAULT_MAX_RADIUS)]
        max_radius: u32,
    },
}

enum Failure {
    Input(String),
    Cap(String),
    Internal(String),
}

impl From<MediaError> for Failure {
    fn from(e: MediaError) -> Self {
        match e {
            MediaError::CapExceeded { .. } => Failure::Cap(e.to_string()),
            MediaError::Defect(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn read_input(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    }
    Ok(text)
}

fn in_file<T>(path: &str, r: media_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{path}: {m}")),
        other => other,
    })
}

fn load_system(path: &str, max_states: usize) -> Result<TokenSystem, Failure> {
    let ts = in_file(path, TokenSystem::from_json_str(&read_input(path)?))?;
    if ts.n_states() > max_states {
        return Err(Failure::Cap(format!(
            "{path}: {} states exceed the state cap {max_states}",
            ts.n_states()
        )));
    }
    Ok(ts)
}

fn emit(v: &Value) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).expect("plain data serializes")
    );
}

fn write_text(path: &str, text: &str) -> Result<(), Failure> {
    if path == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text).map_err(|e| Failure::Input(format!("{path}: {e}")))
    }
}

fn check(input: &str, bound: Option<usize>, max_states: usize) -> Outcome {
    let ts = load_system(input, max_states)?;
    let bound = bound.unwrap_or_else(|| default_bound(&ts).max(1));
    let report = check_axioms(&ts, bound)?;
    let decision = decide_medium(&ts);
    if let MediumDecision::NotMedium(w) = &decision {
        eprintln!(
            "not a medium: {}",
            serde_json::to_string(w).expect("plain data serializes")
        );
    }
    emit(&json!({ "axioms": report, "decision": decision.to_json() }));
    Ok(decision.is_medium())
}

fn represent(input: &str, base: Option<&str>, max_states: usize) -> Outcome {
    let ts = load_system(input, max_states)?;
    let base = match base {
        Some(name) => ts.state_id(name)?,
        None => 0,
    };
    let m = match decide_medium(&ts) {
        MediumDecision::Medium(m) => m,
        MediumDecision::NotMedium(w) => {
            eprintln!("not a medium, no representation");
            emit(&json!({ "verdict": "not-medium", "witness": w }));
            return Ok(false);
        }
    };
    let o = orient_from_state(&m, base)?;
    let rep = positive_content_family(&m, &o)?;
    emit(&serde_json::to_value(rep.to_json(&ts)).expect("plain data serializes"));
    Ok(true)
}

fn graph(input: &str, dot: Option<&str>, max_states: usize) -> Outcome {
    let ts = load_system(input, max_states)?;
    let g = match decide_medium(&ts) {
        MediumDecision::Medium(m) => m.graph().clone(),
        MediumDecision::NotMedium(_) => medium_graph(&ts),
    };
    match dot {
        Some(path) => write_text(path, &g.to_dot())?,
        None => emit(&serde_json::to_value(g.to_json()).expect("plain data serializes")),
    }
    Ok(true)
}

fn pcube(input: &str, max_states: usize) -> Outcome {
    let text = read_input(input)?;
    let g = if text.trim_start().starts_with('{') {
        in_file(input, LabeledGraph::from_json_str(&text))?
    } else {
        in_file(input, LabeledGraph::parse_edge_list(&text))?
    };
    if g.n_vertices() > max_states {
        return Err(Failure::Cap(format!(
            "{input}: {} vertices exceed the state cap {max_states}",
            g.n_vertices()
        )));
    }
    match in_file(input, is_partial_cube(&g))? {
        PartialCube::Accept(lab) => {
            let labels: serde_json::Map<String, Value> = (0..g.n_vertices())
                .map(|v| {
                    let set: Vec<&str> = lab.labels.sets[v]
                        .iter()
                        .map(|i| lab.labels.ground[i].as_str())
                        .collect();
                    (g.vertex_name(v).to_string(), json!(set))
                })
                .collect();
            let classes: Vec<Vec<(&str, &str)>> = lab
                .classes
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|&e| {
                            let (u, v) = g.edges()[e];
                            (g.vertex_name(u), g.vertex_name(v))
                        })
                        .collect()
                })
                .collect();
            emit(&json!({
                "verdict": "partial-cube",
                "ground": lab.labels.ground,
                "labels": labels,
                "classes": classes,
            }));
            Ok(true)
        }
        PartialCube::Reject(w) => {
            eprintln!("not a partial cube");
            emit(&json!({ "verdict": "not-partial-cube", "witness": w }));
            Ok(false)
        }
    }
}

fn iso(a: &str, b: &str, cap: usize, max_states: usize) -> Outcome {
    let (ta, tb) = (load_system(a, max_states)?, load_system(b, max_states)?);
    match media_isomorphic_capped(&ta, &tb, cap)? {
        Some(iso) => {
            let (alpha, beta) = iso.named(&ta, &tb);
            emit(&json!({ "isomorphic": true, "alpha": alpha, "beta": beta }));
            Ok(true)
        }
        None => {
            eprintln!("not isomorphic");
            emit(&json!({ "isomorphic": false }));
            Ok(false)
        }
    }
}

fn linmedium(n: usize, family: bool, max_n: usize) -> Outcome {
    let lm = linear_medium_capped(n, max_n)?;
    let v = if family {
        serde_json::to_value(lm.family.to_json())
    } else {
        serde_json::to_value(lm.system.to_json())
    };
    emit(&v.expect("plain data serializes"));
    Ok(true)
}

fn arrangement_pipeline(arr: &Arrangement, dot: Option<&PathBuf>) -> Outcome {
    let regions = enumerate_regions(arr)?;
    let g = region_adjacency(arr, &regions)?;
    let ts = arrangement_medium(arr, &regions)?;
    let decision = decide_medium(&ts);
    let pc = is_partial_cube(&g)?.is_accept();
    if let Some(path) = dot {
        write_text(&path.to_string_lossy(), &g.to_dot())?;
    }
    emit(&json!({
        "lines": arr.to_json().lines,
        "regions": regions_json(&regions),
        "graph": g.to_json(),
        "partial_cube": pc,
        "medium": ts.to_json(),
        "verdict": if decision.is_medium() { "medium" } else { "not-medium" },
    }));
    Ok(decision.is_medium() && pc)
}

fn arrangement(input: &str, dot: Option<&PathBuf>, max_lines: usize) -> Outcome {
    let arr = in_file(input, Arrangement::from_json_str(&read_input(input)?))?;
    if arr.len() > max_lines {
        return Err(Failure::Cap(format!(
            "{input}: {} lines exceed the line cap {max_lines}",
            arr.len()
        )));
    }
    arrangement_pipeline(&arr, dot)
}

fn mosaic(kind: &str, radius: u32, dot: Option<&PathBuf>, max_radius: u32) -> Outcome {
    let kind: MosaicKind = kind.parse()?;
    if radius > max_radius {
        return Err(Failure::Cap(format!(
            "radius {radius} exceeds the radius cap {max_radius}"
        )));
    }
    arrangement_pipeline(&mosaic_window(kind, radius)?, dot)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let max_states = cli.max_states;
    let outcome = match &cli.command {
        Command::Check { input, bound } => check(input, *bound, max_states),
        Command::Represent { input, base } => represent(input, base.as_deref(), max_states),
        Command::Graph { input, dot } => graph(input, dot.as_deref(), max_states),
        Command::Pcube { input } => pcube(input, max_states),
        Command::Iso { a, b, cap } => iso(a, b, *cap, max_states),
        Command::Linmedium { n, family, max_n } => linmedium(*n, *family, *max_n),
        Command::Arrangement {
            input,
            dot,
            max_lines,
        } => arrangement(input, dot.as_ref(), *max_lines),
        Command::Mosaic {
            kind,
            radius,
            dot,
            max_radius,
        } => mosaic(kind, *radius, dot.as_ref(), *max_radius),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(m)) => {
            eprintln!("cap exceeded: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
    }
}
