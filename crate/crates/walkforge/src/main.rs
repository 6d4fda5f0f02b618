//! Command-line front end: parse a walk expression, synthesize or verify its
//! circuit, sweep scaling tables, evolve states, and export graphs.

use clap::{Args, Parser, Subcommand};
use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use walkforge::circuit::{self, Circuit, Gate, GateKind};
use walkforge::error::{Result, WalkError};
use walkforge::graph::WalkParams;
use walkforge::oracle::{self, StateVector};
use walkforge::parse::parse_expr;
use walkforge::synth::{graph_of, pair_of, synth};
use walkforge::verify::{self, Family};

const EXIT_CODES: &str = "EXIT CODES:
  0  success
  2  expression or circuit-format parse error
  3  precondition violated (argument ranges, degree regularity, commutativity)
  4  verification failed (some report row exceeded the tolerance)
  5  resource cap exceeded (wires/dimension over the desk-scale limit)
  6  i/o error
  7  internal consistency error

TIME VALUES:
  --t and --gamma accept decimal literals and pi multiples: 0.5pi, pi, -2pi.
  Lists are comma-separated: --t 0,1,0.5pi,7.3

ENVIRONMENT:
  WALKFORGE_CAP  overrides the unitary-extraction wire cap (default 12)";

#[derive(Parser)]
#[command(
    name = "walkforge",
    version,
    about = "Exact, fast-forwarded circuits for continuous-time quantum walks on composite graphs",
    after_help = EXIT_CODES
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Walk expression, e.g. "interdep_complete(hypercube(4),bipartite(2,2))"
    expr: String,

    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Wire cap for unitary extraction and oracle runs
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the walk circuit and export it
    Synth {
        #[command(flatten)]
        common: CommonOpts,

        /// Evolution time (single value)
        #[arg(long, default_value = "1.0")]
        t: String,

        /// Hopping rate (single value)
        #[arg(long, default_value = "1.0")]
        gamma: String,

        /// Export format: json | qasm
        #[arg(long, default_value = "json")]
        format: String,

        /// Reduce exported phase angles into (-pi, pi]
        #[arg(long)]
        reduce_angles: bool,
    },

    /// Verify circuits against the spectral oracle over a (t, gamma) grid
    Verify {
        #[command(flatten)]
        common: CommonOpts,

        /// Comma-separated evolution times
        #[arg(long, default_value = "1.0")]
        t: String,

        /// Comma-separated hopping rates
        #[arg(long, default_value = "1.0")]
        gamma: String,

        /// Max-entrywise pass tolerance
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },

    /// Gate-count scaling table across family sizes
    Scaling {
        /// Family name: path2 | complete | bipartite | star | hypercube | book
        family: String,

        /// Comma-separated sizes, e.g. 1,2,3,4
        #[arg(long)]
        sizes: String,

        /// Evolution time (single value)
        #[arg(long, default_value = "1.0")]
        t: String,

        /// Hopping rate (single value)
        #[arg(long, default_value = "1.0")]
        gamma: String,

        /// Max-entrywise pass tolerance
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,

        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,

        /// Wire cap for the verification column
        #[arg(long)]
        cap: Option<usize>,
    },

    /// Evolve a basis state and report probabilities from circuit and oracle
    Evolve {
        #[command(flatten)]
        common: CommonOpts,

        /// Comma-separated evolution times
        #[arg(long, default_value = "1.0")]
        t: String,

        /// Hopping rate (single value)
        #[arg(long, default_value = "1.0")]
        gamma: String,

        /// Initial basis-state index
        #[arg(long, default_value_t = 0)]
        init: usize,
    },

    /// Export the expression's graph as dot or JSON
    ExportGraph {
        #[command(flatten)]
        common: CommonOpts,

        /// Export format: dot | json
        #[arg(long, default_value = "dot")]
        format: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Synth {
            common,
            t,
            gamma,
            format,
            reduce_angles,
        } => {
            let expr = parse_expr(&common.expr)?;
            let params = WalkParams::new(parse_value(&gamma)?, parse_value(&t)?)?;
            let mut circuit = synth(&expr, params)?;
            if reduce_angles {
                circuit = reduced(&circuit)?;
            }
            let text = match format.as_str() {
                "json" => circuit::to_json(&circuit),
                "qasm" => circuit::to_qasm(&circuit),
                other => {
                    return Err(WalkError::InvalidArgument(format!(
                        "unknown circuit format `{other}`; expected json or qasm"
                    )))
                }
            };
            emit(&common.out, &text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify {
            common,
            t,
            gamma,
            tol,
        } => {
            let expr = parse_expr(&common.expr)?;
            let report = verify::verify(
                &expr,
                &parse_list(&t)?,
                &parse_list(&gamma)?,
                tol,
                wire_cap(common.cap),
            )?;
            emit(&common.out, &report.to_csv())?;
            for row in report.rows.iter().filter(|r| !r.pass) {
                match &row.error {
                    Some(reason) => {
                        eprintln!("fail: t = {}, gamma = {}: {reason}", row.t, row.gamma)
                    }
                    None => eprintln!(
                        "fail: t = {}, gamma = {}: distance {:e} over tolerance {:e}",
                        row.t, row.gamma, row.max_dist, tol
                    ),
                }
            }
            if !report.structural_t_independent {
                eprintln!("fail: gate structure varies with t");
            }
            if report.all_pass() && report.structural_t_independent {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(4))
            }
        }

        Command::Scaling {
            family,
            sizes,
            t,
            gamma,
            tol,
            out,
            cap,
        } => {
            let family: Family = family.parse()?;
            let sizes: Vec<u32> = sizes
                .split(',')
                .map(|s| {
                    s.trim().parse::<u32>().map_err(|_| {
                        WalkError::InvalidArgument(format!("bad size `{s}` in --sizes"))
                    })
                })
                .collect::<Result<_>>()?;
            let params = WalkParams::new(parse_value(&gamma)?, parse_value(&t)?)?;
            let table = verify::scaling(family, &sizes, params, tol, wire_cap(cap))?;
            emit(&out, &table.to_csv())?;
            let failed = table.rows.iter().any(|r| r.pass == Some(false));
            Ok(if failed {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            })
        }

        Command::Evolve {
            common,
            t,
            gamma,
            init,
        } => {
            let expr = parse_expr(&common.expr)?;
            let graph = graph_of(&expr)?;
            let cap = wire_cap(common.cap);
            if graph.wires() > cap {
                return Err(WalkError::ResourceLimit {
                    what: "evolution wires",
                    value: graph.wires(),
                    cap,
                });
            }
            let gamma = parse_value(&gamma)?;
            let psi0 = StateVector::basis(graph.dim(), init)?;
            let mut csv = String::from("t,state,p_circuit,p_oracle,abs_dev\n");
            let mut max_dev: f64 = 0.0;
            for t in parse_list(&t)? {
                let params = WalkParams::new(gamma, t)?;
                let circuit = synth(&expr, params)?;
                let from_circuit = circuit.apply_to_state(&psi0)?.probabilities();
                let from_oracle =
                    oracle::evolve_state(&graph.adjacency_f64(), params, &psi0)?.probabilities();
                for state in 0..graph.dim() {
                    let dev = (from_circuit[state] - from_oracle[state]).abs();
                    max_dev = max_dev.max(dev);
                    csv.push_str(&format!(
                        "{t},{state},{:e},{:e},{dev:e}\n",
                        from_circuit[state], from_oracle[state]
                    ));
                }
            }
            emit(&common.out, &csv)?;
            eprintln!("max probability deviation: {max_dev:e}");
            Ok(ExitCode::SUCCESS)
        }

        Command::ExportGraph { common, format } => {
            let expr = parse_expr(&common.expr)?;
            let text = match format.as_str() {
                "dot" => match pair_of(&expr)? {
                    Some(pair) => pair.to_dot(),
                    None => graph_of(&expr)?.to_dot(),
                },
                "json" => graph_of(&expr)?.to_json(),
                other => {
                    return Err(WalkError::InvalidArgument(format!(
                        "unknown graph format `{other}`; expected dot or json"
                    )))
                }
            };
            emit(&common.out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Wire cap: flag, then WALKFORGE_CAP, then the built-in default.
fn wire_cap(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("WALKFORGE_CAP")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(circuit::UNITARY_WIRE_CAP)
}

/// Parse a decimal literal or a pi multiple ("0.5pi", "pi", "-pi").
fn parse_value(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || WalkError::InvalidArgument(format!("bad numeric value `{s}`"));
    if let Some(prefix) = s.strip_suffix("pi") {
        let factor = match prefix.trim() {
            "" | "+" => 1.0,
            "-" => -1.0,
            p => p.parse::<f64>().map_err(|_| bad())?,
        };
        return Ok(factor * PI);
    }
    s.parse::<f64>().map_err(|_| bad())
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_value).collect()
}

/// Clone with every phase angle reduced into (-pi, pi].
fn reduced(c: &Circuit) -> Result<Circuit> {
    let reduce = |theta: f64| {
        let r = theta.rem_euclid(2.0 * PI);
        if r > PI {
            r - 2.0 * PI
        } else {
            r
        }
    };
    let mut out = Circuit::new(c.wires());
    for g in c.gates() {
        let kind = match g.kind {
            GateKind::Phase2 {
                wire,
                theta0,
                theta1,
            } => GateKind::Phase2 {
                wire,
                theta0: reduce(theta0),
                theta1: reduce(theta1),
            },
            GateKind::GlobalPhase { phi } => GateKind::GlobalPhase { phi: reduce(phi) },
            ref k => k.clone(),
        };
        out.push(Gate {
            kind,
            controls: g.controls.clone(),
        })?;
    }
    Ok(out)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
