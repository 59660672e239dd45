//! Command-line front end.

pub mod config;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{simulate, InitialState};
use crate::error::{Error, Result};
use crate::model::{ComplexSignal, Unit};
use crate::network::{self, TransferSpec, TwoNodeRun};
use crate::sensitivity::{
    build_table, default_sign, standard_errors, ErrorSpec, Parameter, PerturbationModel,
};
use crate::synthesis::{full_emission, synth_receive, synth_send};
use crate::wavepacket::{delay, scale_to_photon_number};

pub use config::{OutputFormat, RunConfig};

const SYNTH_HELP: &str = "\
Output files (in --out):
  <name>.json  synthesis result: omega, beta_e, beta_s (signals), phi_final,
               realizability_margin, norm
  <name>.csv   columns t,re_omega,im_omega,abs_beta_e,abs_beta_s
                 t           time, s
                 re_omega    real part of the control Rabi frequency, rad/s
                 im_omega    imaginary part of the control, rad/s
                 abs_beta_e  |beta_e|, excited-state amplitude
                 abs_beta_s  |beta_s|, storage-state amplitude";

const SIMULATE_HELP: &str = "\
Signal files are JSON documents {unit, t_start, dt, n, re, im}; --omega has
unit \"rate\", --e-in unit \"field\". Missing signals are zero on the packet grid.

Output files (in --out):
  trajectory.json  beta_e, beta_s, e_out, conservation_residual, loss_integral,
                   net_emission
  trajectory.csv   columns t,re_beta_e,im_beta_e,re_beta_s,im_beta_s,re_e_out,im_e_out
                     t          time, s
                     re/im_beta_e  excited-state amplitude
                     re/im_beta_s  storage-state amplitude
                     re/im_e_out   outgoing plasmon field, m^(-1/2)";

const NETWORK_HELP: &str = "\
Output files (in --out):
  <name>.json  a_gg, a_sg, a_gs as [re, im], loss_probability,
               residual_photon_norm, fidelity_overlap, fidelity_efficiency,
               fidelity_renormalized
  node1.csv, node2.csv  columns
               t,re_omega,im_omega,abs_beta_e,abs_beta_s,re_e_in,im_e_in,re_e_out,im_e_out
                 t              time, s
                 re/im_omega    control Rabi frequency, rad/s
                 abs_beta_e     |beta_e| of the conditional (alpha_s = 1) run
                 abs_beta_s     |beta_s| of the conditional run
                 re/im_e_in     incoming plasmon field, m^(-1/2)
                 re/im_e_out    outgoing plasmon field, m^(-1/2)";

const SWAP_HELP: &str = "\
Output files (in --out):
  swap.json  {forward, backward}, each with the fields of transfer.json";

const SENSITIVITY_HELP: &str = "\
--errors takes comma-separated entries PARAM[:NODE[:RELATIVE_ERROR]] with PARAM in
g, gamma_p, gamma_prime, omega. A missing node means both nodes; a missing error
means --error-size with the default sign (g and omega negative, gamma_p and
gamma_prime positive). An empty string runs the baseline only.

Output files (in --out):
  sensitivity.csv   columns node,parameter,relative_error,fidelity
                      node            perturbed node, 0 for the baseline row
                      parameter       perturbed parameter, none for the baseline
                      relative_error  relative parameter error
                      fidelity        overlap fidelity, NA when the row failed
  sensitivity.json  model, baseline, rows";

#[derive(Debug, Parser)]
#[command(
    name = "plasmon-qnet",
    version,
    about = "Pulse synthesis and simulation for emitter/plasmon quantum network nodes"
)]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Emitter–plasmon coupling g, m^(1/2)/s [default: 1.6e10]
    #[arg(long, global = true)]
    pub g: Option<f64>,
    /// Plasmon group velocity, m/s [default: 1.5e8]
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Purcell factor Γ_p/Γ′ [default: 100]
    #[arg(long = "P", global = true, conflicts_with = "gamma_prime")]
    pub purcell: Option<f64>,
    /// Non-plasmon decay rate Γ′, 1/s
    #[arg(long, global = true)]
    pub gamma_prime: Option<f64>,
    /// Gaussian packet width, m [default: 0.3]
    #[arg(long, global = true)]
    pub a: Option<f64>,
    /// Packet center, s [default: 0]
    #[arg(long, global = true)]
    pub center: Option<f64>,
    /// JSON field signal to use instead of the Gaussian packet
    #[arg(long, global = true)]
    pub packet: Option<PathBuf>,
    /// Photon number to emit (synth-send, transfer, entangle) or offered to
    /// the receiver (synth-receive)
    #[arg(long, global = true)]
    pub s: Option<f64>,
    /// Channel delay, s [default: 0]
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Qubit amplitude of |g⟩ [default: 1/√2]
    #[arg(long, global = true)]
    pub alpha_g: Option<f64>,
    /// Qubit amplitude of |s⟩ [default: 1/√2]
    #[arg(long, global = true)]
    pub alpha_s: Option<f64>,
    /// Grid half-span in packet widths [default: 6]
    #[arg(long, global = true)]
    pub grid_span: Option<f64>,
    /// Number of grid samples [default: 8192]
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory [default: .]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Which output files to write [default: both]
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Control pulse that makes a node in |s⟩ emit the packet
    #[command(after_help = SYNTH_HELP)]
    SynthSend,
    /// Control pulse that makes a node in |g⟩ absorb the packet
    #[command(after_help = SYNTH_HELP)]
    SynthReceive,
    /// Forward simulation of one node under given drives
    #[command(after_help = SIMULATE_HELP)]
    Simulate(SimulateArgs),
    /// Qubit transfer from node 1 to node 2
    #[command(after_help = NETWORK_HELP)]
    Transfer,
    /// Entangle two nodes with a partial emission (default s = 0.5)
    #[command(after_help = NETWORK_HELP)]
    Entangle,
    /// Exchange the qubits of two nodes over two channels
    #[command(after_help = SWAP_HELP)]
    Swap(SwapArgs),
    /// Transfer fidelity under parameter errors
    #[command(after_help = SENSITIVITY_HELP)]
    Sensitivity(SensitivityArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Control signal file (JSON, unit rate)
    #[arg(long)]
    pub omega: Option<PathBuf>,
    /// Incoming field file (JSON, unit field)
    #[arg(long)]
    pub e_in: Option<PathBuf>,
    /// Initial β_e as "re,im" [default: 0,0]
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub init_e: Option<[f64; 2]>,
    /// Initial β_s as "re,im" [default: 1,0]
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub init_s: Option<[f64; 2]>,
}

#[derive(Debug, Args)]
pub struct SwapArgs {
    /// Purcell factor of node 2 [default: same as node 1]
    #[arg(long = "P2")]
    pub purcell2: Option<f64>,
    /// Qubit amplitude of |g⟩ on node 2 [default: same as node 1]
    #[arg(long)]
    pub alpha_g2: Option<f64>,
    /// Qubit amplitude of |s⟩ on node 2 [default: same as node 1]
    #[arg(long)]
    pub alpha_s2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    /// Cells to evaluate [default: all four parameters on both nodes]
    #[arg(long)]
    pub errors: Option<String>,
    /// Magnitude of the default relative error [default: 0.1]
    #[arg(long)]
    pub error_size: Option<f64>,
    /// How g and Γ_p errors enter the simulated node [default: decoupled]
    #[arg(long, value_parser = parse_model)]
    pub model: Option<PerturbationModel>,
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected \"re,im\", got {s:?}"))?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok([num(re)?, num(im)?])
}

fn parse_model(s: &str) -> std::result::Result<PerturbationModel, String> {
    match s {
        "decoupled" => Ok(PerturbationModel::Decoupled),
        "consistent" => Ok(PerturbationModel::Consistent),
        _ => Err(format!("expected decoupled or consistent, got {s:?}")),
    }
}

/// Parses `PARAM[:NODE[:RELATIVE_ERROR]]` entries.
pub fn parse_errors(text: &str, size: f64) -> Result<Vec<ErrorSpec>> {
    let mut out = Vec::new();
    for entry in text.split(',').map(str::trim).filter(|e| !e.is_empty()) {
        let mut parts = entry.split(':');
        let param = Parameter::parse(parts.next().unwrap_or_default())?;
        let nodes: Vec<u8> = match parts.next() {
            None => vec![1, 2],
            Some(n) => vec![n
                .parse()
                .map_err(|_| Error::Config(format!("bad node in {entry:?}")))?],
        };
        let rel = match parts.next() {
            None => default_sign(param) * size,
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("bad error in {entry:?}")))?,
        };
        if parts.next().is_some() {
            return Err(Error::Config(format!("too many fields in {entry:?}")));
        }
        for node in nodes {
            out.push(ErrorSpec::new(param, rel, node).map_err(|e| Error::Config(e.to_string()))?);
        }
    }
    Ok(out)
}

impl Cli {
    fn flag_config(&self) -> RunConfig {
        let c = &self.common;
        let mut cfg = RunConfig {
            g: c.g,
            c: c.c,
            gamma_prime: c.gamma_prime,
            purcell: c.purcell,
            a: c.a,
            center: c.center,
            packet_file: c.packet.clone(),
            grid_span: c.grid_span,
            grid_n: c.grid_n,
            s: c.s,
            tau: c.tau,
            alpha_g: c.alpha_g,
            alpha_s: c.alpha_s,
            out: c.out.clone(),
            format: c.format,
            ..Default::default()
        };
        match &self.command {
            Command::Simulate(a) => {
                cfg.omega_file = a.omega.clone();
                cfg.e_in_file = a.e_in.clone();
                cfg.init_e = a.init_e;
                cfg.init_s = a.init_s;
            }
            Command::Swap(a) => {
                cfg.purcell2 = a.purcell2;
                cfg.alpha_g2 = a.alpha_g2;
                cfg.alpha_s2 = a.alpha_s2;
            }
            Command::Sensitivity(a) => {
                cfg.error_size = a.error_size;
                cfg.model = a.model;
            }
            _ => {}
        }
        cfg
    }
}

struct Outputs {
    dir: PathBuf,
    format: OutputFormat,
}

impl Outputs {
    fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<()> {
        if self.format.json() {
            output::write_json(&self.dir.join(name), value)?;
        }
        Ok(())
    }

    fn csv(&self, name: &str, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
        if self.format.csv() {
            write(&self.dir.join(name))?;
        }
        Ok(())
    }
}

/// Runs one command; the caller maps errors to exit codes.
pub fn run(cli: Cli) -> Result<()> {
    let flags = cli.flag_config();
    let cfg = match &cli.common.config {
        Some(path) => RunConfig::load(path)?.overlay(flags),
        None => flags,
    };
    cfg.check_files()?;
    let out = Outputs {
        dir: cfg.out_dir(),
        format: cfg.format(),
    };
    fs::create_dir_all(&out.dir)?;
    let params = cfg.params()?;

    match &cli.command {
        Command::SynthSend => {
            let target = cfg.packet()?.realize(&params, &cfg.grid(), 0.0)?;
            let s = cfg.s.unwrap_or_else(|| full_emission(&params));
            let r = synth_send(&params, &target, s)?;
            out.json("synth_send.json", &r)?;
            out.csv("synth_send.csv", |p| output::write_synthesis_csv(p, &r))?;
            println!("norm={}", output::num(r.emitted_or_absorbed_norm));
            println!("abs_beta_s_final={}", output::num(r.final_beta_s().norm()));
            println!(
                "realizability_margin={}",
                output::num(r.realizability_margin)
            );
        }
        Command::SynthReceive => {
            let packet = cfg.packet()?.realize(&params, &cfg.grid(), 0.0)?;
            let s = cfg.s.unwrap_or(1.0);
            let incoming = if s == 0.0 {
                ComplexSignal::zeros(*packet.grid(), Unit::Field)
            } else {
                scale_to_photon_number(&packet, s, params.c())?
            };
            let r = synth_receive(&params, &incoming)?;
            out.json("synth_receive.json", &r)?;
            out.csv("synth_receive.csv", |p| output::write_synthesis_csv(p, &r))?;
            println!("norm={}", output::num(r.emitted_or_absorbed_norm));
            println!("absorbed={}", output::num(r.final_beta_s().norm_sqr()));
            println!("phi_final={}", output::num(r.phi_final));
        }
        Command::Simulate(_) => {
            let omega = cfg
                .omega_file
                .as_deref()
                .map(|p| config::read_signal(p, Unit::Rate))
                .transpose()?;
            let e_in = cfg
                .e_in_file
                .as_deref()
                .map(|p| config::read_signal(p, Unit::Field))
                .transpose()?;
            let grid = match (&omega, &e_in) {
                (Some(o), _) => *o.grid(),
                (None, Some(e)) => *e.grid(),
                (None, None) => *cfg.packet()?.realize(&params, &cfg.grid(), 0.0)?.grid(),
            };
            let omega = omega.unwrap_or_else(|| ComplexSignal::zeros(grid, Unit::Rate));
            let e_in = e_in.unwrap_or_else(|| ComplexSignal::zeros(grid, Unit::Field));
            let zero = Complex64::new(0.0, 0.0);
            let (be0, bs0) = cfg.init((zero, Complex64::new(1.0, 0.0)));
            let tr = simulate(&params, &omega, &e_in, InitialState::new(be0, bs0)?)?;
            out.json("trajectory.json", &tr)?;
            out.csv("trajectory.csv", |p| output::write_trajectory_csv(p, &tr))?;
            println!("emitted={}", output::num(tr.net_emission));
            println!("abs_beta_s_final={}", output::num(tr.final_beta_s().norm()));
            println!(
                "conservation_residual={}",
                output::num(tr.conservation_residual)
            );
        }
        Command::Transfer => {
            let spec = transfer_spec(&cfg)?;
            let run = network::transfer_detailed(&spec)?;
            emit_two_node(&out, "transfer.json", &run, spec.tau)?;
            print_two_node(&run);
        }
        Command::Entangle => {
            let s = cfg.s.unwrap_or(0.5);
            let run = network::entangle(
                &params,
                &cfg.params2()?,
                &cfg.packet()?,
                &cfg.grid(),
                cfg.tau(),
                s,
            )?;
            emit_two_node(&out, "entangle.json", &run, cfg.tau())?;
            print_two_node(&run);
        }
        Command::Swap(_) => {
            let forward = transfer_spec(&cfg)?;
            let backward = TransferSpec {
                qubit: cfg.qubit2()?,
                node1: forward.node2,
                node2: forward.node1,
                ..forward.clone()
            };
            let (r1, r2) = network::swap(&forward, &backward)?;
            #[derive(Serialize)]
            struct SwapOut {
                forward: network::TwoNodeResult,
                backward: network::TwoNodeResult,
            }
            out.json(
                "swap.json",
                &SwapOut {
                    forward: r1,
                    backward: r2,
                },
            )?;
            println!("F1_overlap={}", output::num(r1.fidelity_overlap));
            println!("F1_efficiency={}", output::num(r1.fidelity_efficiency));
            println!("F2_overlap={}", output::num(r2.fidelity_overlap));
            println!("F2_efficiency={}", output::num(r2.fidelity_efficiency));
        }
        Command::Sensitivity(args) => {
            let size = cfg.error_size.unwrap_or(0.1);
            let errors = match &args.errors {
                Some(text) => parse_errors(text, size)?,
                None => match &cfg.errors {
                    Some(list) => list
                        .iter()
                        .map(|e| ErrorSpec::new(e.parameter, e.relative_error, e.node))
                        .collect::<Result<_>>()
                        .map_err(|e| Error::Config(e.to_string()))?,
                    None => standard_errors(size)?,
                },
            };
            let spec = transfer_spec(&cfg)?;
            let table = build_table(&spec, &errors, cfg.model())?;
            out.json("sensitivity.json", &table)?;
            out.csv("sensitivity.csv", |p| Ok(fs::write(p, table.to_csv())?))?;
            print!("{}", table.to_csv());
            for r in &table.rows {
                if let Some(msg) = &r.failure {
                    eprintln!(
                        "row {}:{}:{} failed: {msg}",
                        r.error.parameter.name(),
                        r.error.node,
                        r.error.relative_error
                    );
                }
            }
        }
    }
    Ok(())
}

fn transfer_spec(cfg: &RunConfig) -> Result<TransferSpec> {
    Ok(TransferSpec {
        qubit: cfg.qubit()?,
        packet: cfg.packet()?,
        grid: cfg.grid(),
        tau: cfg.tau(),
        node1: cfg.params()?,
        node2: cfg.params2()?,
        s: cfg.s,
    })
}

fn emit_two_node(out: &Outputs, name: &str, run: &TwoNodeRun, tau: f64) -> Result<()> {
    out.json(name, &run.result)?;
    let quiet = ComplexSignal::zeros(*run.node1.trajectory.e_out.grid(), Unit::Field);
    let arriving = delay(&run.node1.trajectory.e_out, tau)?;
    out.csv("node1.csv", |p| {
        output::write_node_csv(p, &run.node1, &quiet)
    })?;
    out.csv("node2.csv", |p| {
        output::write_node_csv(p, &run.node2, &arriving)
    })?;
    Ok(())
}

fn print_two_node(run: &TwoNodeRun) {
    let r = &run.result;
    println!("F_overlap={}", output::num(r.fidelity_overlap));
    println!("F_efficiency={}", output::num(r.fidelity_efficiency));
    println!("abs_a_sg={}", output::num(r.a_sg.norm()));
    println!("abs_a_gs={}", output::num(r.a_gs.norm()));
    println!("loss_probability={}", output::num(r.loss_probability));
    println!(
        "residual_photon_norm={}",
        output::num(r.residual_photon_norm)
    );
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main_exit_code() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
