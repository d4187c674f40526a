//! Command-line driver: catalog listing, anomaly tables, steady-state
//! solving, correlator evaluation, symbolic steady-state verification and the
//! claims-reproduction harness.

use clap::{Args, Parser, Subcommand};
use mixanom::anomaly;
use mixanom::claims::{self, ClaimOptions};
use mixanom::lattice::Boundary;
use mixanom::lindblad::{self, SectorSpec};
use mixanom::models::{self, ModelKind};
use mixanom::observables;
use mixanom::pauli::{OperatorSum, OperatorSumJson, PauliWord};
use mixanom::phasepoly::Region;
use mixanom::scalar::Scalar;
use num_rational::BigRational;
use num_traits::Zero;
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mixanom",
    version,
    about = "Anomaly indicators and steady states for strong/weak-symmetric Lindbladians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// catalog model id (see `mixanom catalog`)
    #[arg(long)]
    model: String,
    /// chain length
    #[arg(long, short = 'L')]
    l: Option<usize>,
    /// triangular width
    #[arg(long)]
    lx: Option<usize>,
    /// triangular height
    #[arg(long)]
    ly: Option<usize>,
    /// boundary conditions
    #[arg(long, default_value = "pbc")]
    bc: String,
    /// coupling/rate overrides as name=value pairs, e.g. --rates r=3 --rates j=2
    #[arg(long)]
    rates: Vec<String>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// output format
    #[arg(long, default_value = "json")]
    format: String,
    /// output path (stdout when omitted)
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// List the model catalog
    Catalog {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compute the obstruction cocycle table, indicators and triviality
    Anomaly {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve for steady states in a symmetry sector
    Steady {
        #[command(flatten)]
        model: ModelArgs,
        /// sector: "q=<rational>", "parity=even|odd" (diagonal unitary), "x=+1|-1"
        #[arg(long)]
        sector: Option<String>,
        /// also write the assembled model document to this path
        #[arg(long)]
        dump_model: Option<std::path::PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate observables on the closed-form steady state of a sector
    Observe {
        #[command(flatten)]
        model: ModelArgs,
        /// sector (as for `steady`)
        #[arg(long)]
        sector: Option<String>,
        /// observables as Pauli words, e.g. --obs "Z0 Z5" (repeatable)
        #[arg(long)]
        obs: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Apply the model generator symbolically to a state file
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// operator-sum JSON document
        #[arg(long)]
        state: std::path::PathBuf,
    },
    /// Run a named acceptance check (or "all")
    Reproduce {
        claim: String,
        #[arg(long, short = 'L')]
        l: Option<usize>,
        /// charge sector for the boundary-correlation claims
        #[arg(long)]
        q: Option<String>,
        /// seed for the randomized invariance checks
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn parse_bc(text: &str) -> Result<Boundary, String> {
    match text {
        "pbc" => Ok(Boundary::Periodic),
        "obc" => Ok(Boundary::Open),
        other => Err(format!("unknown boundary condition: {other} (use pbc or obc)")),
    }
}

fn parse_rational(text: &str) -> Result<BigRational, String> {
    let s = Scalar::parse(text).map_err(|e| e.to_string())?;
    if !s.is_real() {
        return Err(format!("expected a real rational, got {text}"));
    }
    Ok(s.re)
}

fn couplings_from(rates: &[String]) -> Result<models::Couplings, String> {
    let mut c = models::Couplings::default();
    for spec in rates {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| format!("bad --rates entry: {spec} (use name=value)"))?;
        let v = parse_rational(value)?;
        match name.trim() {
            "r" | "rate" => c.rate = v,
            "j" => c.j = v,
            "lambda" => c.lambda = v,
            "j1" => c.j1 = v,
            "j2" => c.j2 = v,
            other => return Err(format!("unknown coupling: {other}")),
        }
    }
    Ok(c)
}

fn build(args: &ModelArgs) -> Result<(ModelKind, lindblad::LindbladModel), String> {
    let kind = ModelKind::parse(&args.model).map_err(|e| e.to_string())?;
    let bc = parse_bc(&args.bc)?;
    let c = couplings_from(&args.rates)?;
    let model = match kind {
        ModelKind::Example1 => models::build_example1(args.l.unwrap_or(12), bc, &c),
        ModelKind::Example2 => models::build_example2(args.l.unwrap_or(12), bc, &c),
        ModelKind::Example3 => models::build_example3(args.l.unwrap_or(12), bc, &c),
        ModelKind::ClusterAspt => models::build_cluster(args.l.unwrap_or(12), bc),
        ModelKind::Aspt2dKA => {
            models::build_aspt2d(args.lx.unwrap_or(6), args.ly.unwrap_or(3), bc, true, true)
        }
        ModelKind::Aspt2dKBC => {
            models::build_aspt2d(args.lx.unwrap_or(6), args.ly.unwrap_or(3), bc, false, true)
        }
    }
    .map_err(|e| e.to_string())?;
    Ok((kind, model))
}

fn parse_sector(
    kind: ModelKind,
    model: &lindblad::LindbladModel,
    bc: Boundary,
    text: Option<&str>,
) -> Result<SectorSpec, String> {
    let l = model.n_sites();
    let default = match kind {
        ModelKind::Example1 => "q=0",
        ModelKind::Example2 => "parity=even",
        ModelKind::Example3 | ModelKind::ClusterAspt => "x=+1",
        _ => {
            return Err(
                "triangular models are verified symbolically, not solved per sector".into()
            )
        }
    };
    let text = text.unwrap_or(default);
    if let Some(q) = text.strip_prefix("q=") {
        let value = parse_rational(q)?;
        return Ok(SectorSpec::Charge { op: models::domain_wall_charge(l, bc), value });
    }
    if let Some(p) = text.strip_prefix("parity=") {
        let exponent = match p {
            "even" => 0,
            "odd" => 4,
            other => return Err(format!("unknown parity: {other}")),
        };
        return Ok(SectorSpec::DiagonalUnitary { u: models::cz_unitary(l, bc), exponent });
    }
    if let Some(s) = text.strip_prefix("x=") {
        let sign = match s {
            "+1" | "1" | "+" => 1,
            "-1" | "-" => -1,
            other => return Err(format!("unknown flip sign: {other}")),
        };
        let mask = match kind {
            ModelKind::ClusterAspt => models::cluster_masks(l).1,
            _ => (1u64 << l) - 1,
        };
        return Ok(SectorSpec::Flip { mask, sign });
    }
    Err(format!("unrecognized sector: {text}"))
}

fn emit(output: &OutputArgs, text: String) -> Result<(), String> {
    match &output.out {
        Some(path) => {
            let mut f = std::fs::File::create(path).map_err(|e| e.to_string())?;
            f.write_all(text.as_bytes()).map_err(|e| e.to_string())?;
            Ok(())
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn closed_form_for(
    kind: ModelKind,
    l: usize,
    bc: Boundary,
    sector: Option<&str>,
) -> Result<Vec<OperatorSum>, String> {
    match kind {
        ModelKind::Example1 => {
            let q = match sector.and_then(|s| s.strip_prefix("q=")) {
                Some(q) => parse_rational(q)?,
                None => BigRational::zero(),
            };
            models::example1_steady(l, bc, &q).map_err(|e| e.to_string())
        }
        ModelKind::Example2 => {
            let even = !matches!(sector, Some("parity=odd"));
            models::example2_steady(l, bc, even).map_err(|e| e.to_string())
        }
        ModelKind::Example3 => {
            let sign = if matches!(sector, Some("x=-1")) { -1 } else { 1 };
            models::example3_steady(l, bc, sign).map_err(|e| e.to_string())
        }
        ModelKind::ClusterAspt => models::cluster_steady(l, bc).map_err(|e| e.to_string()),
        _ => Err(
            "closed forms for the triangular models are stabilizer products; \
             use `reproduce symbolic-steady-zero`"
                .into(),
        ),
    }
}

fn run() -> Result<bool, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Catalog { output } => {
            let entries = models::catalog();
            let text = if output.format == "csv" {
                let mut s = String::from("id,lattice,parameters,strong,weak\n");
                for e in &entries {
                    s.push_str(&format!(
                        "{},{},\"{}\",{},{}\n",
                        e.id, e.lattice, e.parameters, e.strong, e.weak
                    ));
                }
                s
            } else {
                serde_json::to_string_pretty(&entries).map_err(|e| e.to_string())?
            };
            emit(&output, text)?;
            Ok(true)
        }
        Command::Anomaly { model, output } => {
            let (kind, built) = build(&model)?;
            if !kind.is_chain() {
                return Err("use `reproduce edge-restriction` for the triangular models".into());
            }
            let group = built
                .symmetry
                .ok_or_else(|| "model has no declared finite group".to_string())?;
            let l = built.lattice.n_sites();
            if l < 10 {
                return Err("anomaly tables need a chain of length >= 10".into());
            }
            let region =
                Region::chain_segment(l / 2 - 3, l / 2 + 2, 2).map_err(|e| e.to_string())?;
            let table = anomaly::cocycle(&group, &region).map_err(|e| e.to_string())?;
            let (a_label, b_label) = match kind {
                ModelKind::Example1 => ("X", "DW"),
                ModelKind::Example2 => ("X", "CZ"),
                ModelKind::Example3 => ("CZ", "X"),
                ModelKind::ClusterAspt => ("G", "K"),
                _ => unreachable!(),
            };
            let a = group.index_of(a_label).unwrap();
            let b = group.index_of(b_label).unwrap();
            let indicator = table.indicator_phase(a, b).map_err(|e| e.to_string())?;
            let verdict = table.is_trivial_class().map_err(|e| e.to_string())?;
            #[derive(serde::Serialize)]
            struct AnomalyOut {
                model: &'static str,
                indicator: String,
                indicator_pair: [String; 2],
                trivial_class: bool,
                table: anomaly::CocycleTableJson,
            }
            let doc = AnomalyOut {
                model: kind.name(),
                indicator: indicator.to_exact_string(),
                indicator_pair: [a_label.to_string(), b_label.to_string()],
                trivial_class: verdict.is_trivial(),
                table: table.to_json(),
            };
            emit(&output, serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?)?;
            Ok(true)
        }
        Command::Steady { model, sector, dump_model, output } => {
            let (kind, built) = build(&model)?;
            if let Some(path) = &dump_model {
                let doc = serde_json::to_string_pretty(&built.to_json())
                    .map_err(|e| e.to_string())?;
                std::fs::write(path, doc).map_err(|e| e.to_string())?;
            }
            let bc = parse_bc(&model.bc)?;
            let spec = parse_sector(kind, &built, bc, sector.as_deref())?;
            let result =
                lindblad::steady_states(&built, Some(&spec)).map_err(|e| e.to_string())?;
            #[derive(serde::Serialize)]
            struct SteadyOut {
                model: String,
                sector: String,
                degeneracy: usize,
                gap: f64,
                states: Vec<OperatorSumJson>,
            }
            let doc = SteadyOut {
                model: built.name.clone(),
                sector: spec.label(),
                degeneracy: result.degeneracy,
                gap: result.gap,
                states: result.states.iter().map(|s| s.to_json()).collect(),
            };
            emit(&output, serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?)?;
            Ok(true)
        }
        Command::Observe { model, sector, obs, output } => {
            let (kind, built) = build(&model)?;
            let bc = parse_bc(&model.bc)?;
            let l = built.n_sites();
            let states = closed_form_for(kind, l, bc, sector.as_deref())?;
            let mut rho = OperatorSum::zero(l);
            for s in &states {
                rho = rho.add(s).map_err(|e| e.to_string())?;
            }
            let mut reports = Vec::new();
            let mut parsed = Vec::new();
            for text in &obs {
                let word = PauliWord::parse(text).map_err(|e| e.to_string())?;
                let op = OperatorSum::from_word(l, word, Scalar::one());
                let v = observables::expectation(&rho, &op).map_err(|e| e.to_string())?;
                reports.push((text.clone(), v.clone(), Scalar::zero()));
                parsed.push(op);
            }
            if parsed.len() == 2 {
                let rep = observables::connected_correlator(&rho, &parsed[0], &parsed[1])
                    .map_err(|e| e.to_string())?;
                reports.push((
                    format!("connected({}, {})", obs[0], obs[1]),
                    rep.value,
                    rep.connected,
                ));
            }
            let text = if output.format == "csv" {
                let mut s = String::from("observable,value,connected\n");
                for (name, v, c) in &reports {
                    s.push_str(&format!(
                        "\"{}\",{},{}\n",
                        name,
                        v.to_exact_string(),
                        c.to_exact_string()
                    ));
                }
                s
            } else {
                #[derive(serde::Serialize)]
                struct Row {
                    observable: String,
                    value: String,
                    value_float: f64,
                    connected: String,
                }
                let rows: Vec<Row> = reports
                    .iter()
                    .map(|(name, v, c)| Row {
                        observable: name.clone(),
                        value: v.to_exact_string(),
                        value_float: v.to_complex64().re,
                        connected: c.to_exact_string(),
                    })
                    .collect();
                serde_json::to_string_pretty(&rows).map_err(|e| e.to_string())?
            };
            emit(&output, text)?;
            Ok(true)
        }
        Command::Verify { model, state } => {
            let (_, built) = build(&model)?;
            let text = std::fs::read_to_string(&state).map_err(|e| e.to_string())?;
            let doc: OperatorSumJson = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let rho = OperatorSum::from_json(&doc).map_err(|e| e.to_string())?;
            let residual = built.apply_symbolic(&rho).map_err(|e| e.to_string())?;
            if residual.is_zero() {
                println!("L[rho] = 0 exactly ({} state terms)", rho.num_terms());
                Ok(true)
            } else {
                println!(
                    "L[rho] != 0: {} residual terms, leading: {}",
                    residual.num_terms(),
                    residual
                        .terms()
                        .take(3)
                        .map(|(w, c)| format!("({}) {}", c.to_exact_string(), w))
                        .collect::<Vec<_>>()
                        .join(" + ")
                );
                Ok(false)
            }
        }
        Command::Reproduce { claim, l, q, seed } => {
            let q = match q {
                Some(text) => Some(parse_rational(&text)?),
                None => None,
            };
            let opts = ClaimOptions { l, q, seed };
            let ids: Vec<String> = if claim == "all" {
                claims::all_claim_ids().iter().map(|s| s.to_string()).collect()
            } else {
                if !claims::all_claim_ids().contains(&claim.as_str()) {
                    eprintln!("unknown claim id: {claim}");
                    eprintln!("known claims: all, {}", claims::all_claim_ids().join(", "));
                    std::process::exit(2);
                }
                vec![claim]
            };
            let mut all_pass = true;
            for id in ids {
                match claims::run_claim(&id, &opts) {
                    Ok(outcome) => {
                        print!("{}", outcome.render());
                        all_pass &= outcome.pass;
                    }
                    Err(e) => {
                        println!("{id}: ERROR {e}");
                        all_pass = false;
                    }
                }
            }
            Ok(all_pass)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
