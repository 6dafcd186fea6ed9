use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gzz_forge::chempass::{dynamics_circuit, givens_layer_compile, DynamicsSpec};
use gzz_forge::circuit::{gzz_phases, simulate_dense, simulate_diagonal, Unitary};
use gzz_forge::cliffordpass::{compile_clifford, compile_cx_layer, compile_cz_layer, BruhatLayers};
use gzz_forge::diagpass::{compile_diagonal, diagonal_action, phase_poly_from_table, DiagOptions, PhasePolynomial};
use gzz_forge::qftpass::{qft_census, qft_compile, qft_compile_gzz, qft_reference};
use gzz_forge::schedule::{emit_gzz_circuit, order_encodings, Heuristic};
use gzz_forge::solver::{hadamard_quotient, solve_lp, solve_mip};
use gzz_forge::trapmodel::coupling_matrix;
use gzz_forge::{
    BitMatrix, Circuit, CouplingMatrix, Decomposition, DiagonalPhases, Error, Gate, HollowSymmetric, SolveOptions,
    TrapParams,
};
use gzz_forge_cli::bench::{self, Mode};
use gzz_forge_cli::timing::circuit_report;
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "gzz-forge", version, about = "GZZ gate synthesis and circuit compilation")]
struct Cli {
    /// Seed for random instances.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Coupling matrix of an ion chain.
    Trap(TrapArgs),
    /// Decompose a target coupling into encodings and evolution times.
    Synth(SynthArgs),
    /// Order a decomposition into X layers and evolutions.
    Schedule(ScheduleArgs),
    /// Compile a layer or algorithm into GZZ gates.
    #[command(subcommand)]
    Compile(CompileCmd),
    /// Check a circuit against a reference by simulation.
    Verify(VerifyArgs),
    /// Random-instance benchmarks, written as CSV.
    #[command(subcommand)]
    Bench(BenchCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Yb171Paper,
}

#[derive(Args)]
struct TrapArgs {
    #[arg(long, conflicts_with = "params")]
    preset: Option<Preset>,
    /// Number of ions for the preset.
    #[arg(long, default_value_t = 10)]
    ions: usize,
    /// TrapParams JSON.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolverFlags {
    /// Smallest nonzero time, seconds.
    #[arg(long)]
    eps_l: Option<f64>,
    /// Largest time, seconds.
    #[arg(long)]
    eps_u: Option<f64>,
    /// Weight of total time against encoding count.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Relative optimality gap at which branch and bound stops.
    #[arg(long, default_value_t = 0.6)]
    gap: f64,
    /// Reconstruction tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Largest accepted qubit count.
    #[arg(long, default_value_t = gzz_forge::solver::DEFAULT_MAX_N)]
    max_n: usize,
}

impl SolverFlags {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            eps_l: self.eps_l,
            eps_u: self.eps_u,
            alpha: self.alpha,
            mip_rel_gap: self.gap,
            feas_tol: self.tol,
            max_n: self.max_n,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Evolution-time target M (HollowSymmetric JSON).
    #[arg(long, conflicts_with_all = ["a", "j"], required_unless_present = "a")]
    m: Option<PathBuf>,
    /// Target coupling A, used with --j.
    #[arg(long, requires = "j")]
    a: Option<PathBuf>,
    /// Device coupling J.
    #[arg(long)]
    j: Option<PathBuf>,
    /// Solve the binary program with time bounds instead of the LP.
    #[arg(long)]
    mip: bool,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Index,
    Nn,
    NnTwoOpt,
}

impl From<Order> for Heuristic {
    fn from(o: Order) -> Self {
        match o {
            Order::Index => Heuristic::IndexOrder,
            Order::Nn => Heuristic::NearestNeighbor,
            Order::NnTwoOpt => Heuristic::NnTwoOpt,
        }
    }
}

#[derive(Args)]
struct ScheduleArgs {
    /// Decomposition JSON.
    #[arg(long)]
    decomposition: PathBuf,
    #[arg(long, value_enum, default_value_t = Order::NnTwoOpt)]
    order: Order,
    /// Device coupling; with --circuit, writes the evolution circuit.
    #[arg(long, requires = "circuit")]
    j: Option<PathBuf>,
    #[arg(long, requires = "j")]
    circuit: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Emit {
    /// Circuit text destination; stdout if absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Report JSON destination. Defaults to stdout when --output is given,
    /// stderr otherwise.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Device coupling; adds the total evolution time to the report.
    #[arg(long)]
    j: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Ancillas {
    Auto,
    #[value(name = "0")]
    None,
}

#[derive(Subcommand)]
enum CompileCmd {
    /// Directed CX layer (0/1 rows, lower or upper unitriangular).
    Cx {
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        emit: Emit,
    },
    /// CZ layer (binary HollowSymmetric).
    Cz {
        #[arg(long)]
        a: PathBuf,
        #[command(flatten)]
        emit: Emit,
    },
    /// Clifford in layer form.
    Clifford {
        #[arg(long)]
        layers: PathBuf,
        #[command(flatten)]
        emit: Emit,
    },
    /// Quantum Fourier transform with bit-reversed output.
    Qft {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        with_swaps: bool,
        /// Lower each GCRZ to a GZZ and local RZ.
        #[arg(long)]
        lowered: bool,
        #[command(flatten)]
        emit: Emit,
    },
    /// One layer of Givens rotations on neighbour pairs.
    Givens {
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        emit: Emit,
    },
    /// Factorised molecular-dynamics circuit.
    Dynamics {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        emit: Emit,
    },
    /// Diagonal unitary e^{2πi f}: a table of 2ⁿ values or a parity expansion.
    Diagonal {
        #[arg(long)]
        phases: PathBuf,
        /// Treat two-qubit terms like larger ones.
        #[arg(long)]
        allow_size2: bool,
        #[arg(long, value_enum, default_value_t = Ancillas::Auto)]
        ancillas: Ancillas,
        #[command(flatten)]
        emit: Emit,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Reference {
    /// GZZ coupling (HollowSymmetric JSON).
    #[arg(long)]
    gzz: Option<PathBuf>,
    /// Bit-reversed QFT on this many qubits.
    #[arg(long)]
    qft: Option<usize>,
    /// GCX matrix (0/1 rows).
    #[arg(long)]
    gcx: Option<PathBuf>,
    /// Phase table or parity expansion, in turns.
    #[arg(long)]
    phases: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[command(flatten)]
    reference: Reference,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct Range {
    #[arg(long)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Total time and encoding cost of random binary targets.
    Gzz {
        #[command(flatten)]
        range: Range,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Mode::Lp)]
        mode: Mode,
        /// One row per n with mean, min and max.
        #[arg(long)]
        summary: bool,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Truncation error bound and exact error per n.
    Truncation {
        #[command(flatten)]
        range: Range,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = gzz_forge::solver::DEFAULT_EPS_L)]
        eps_l: f64,
    },
    /// Directed CX layers before and after compilation.
    Dircx {
        #[command(flatten)]
        range: Range,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// QFT census and encoding cost.
    Qft {
        #[command(flatten)]
        range: Range,
    },
}

/// Raised when a verification does not pass.
#[derive(Debug, thiserror::Error)]
#[error("verification failed: distance {distance:e} above tolerance {tol:e}")]
struct VerifyFailed {
    distance: f64,
    tol: f64,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(Error::from).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CouplingFile {
    Wrapped(CouplingMatrix),
    Bare(HollowSymmetric),
}

fn read_coupling(path: &Path) -> anyhow::Result<HollowSymmetric> {
    Ok(match read_json::<CouplingFile>(path)? {
        CouplingFile::Wrapped(c) => c.j,
        CouplingFile::Bare(j) => j,
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PhaseFile {
    Table(Vec<f64>),
    Poly(PhasePolynomial),
}

fn read_phases(path: &Path) -> anyhow::Result<PhasePolynomial> {
    Ok(match read_json::<PhaseFile>(path)? {
        PhaseFile::Table(f) => phase_poly_from_table(&f)?,
        PhaseFile::Poly(p) => p,
    })
}

fn write_out(path: Option<&Path>, body: &str) -> anyhow::Result<()> {
    let mut text = body.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            other => other?,
        },
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn write_emitted(c: &Circuit, report: &impl Serialize, e: &Emit) -> anyhow::Result<()> {
    write_out(e.output.as_deref(), &c.to_text())?;
    let body = to_json(report)?;
    match (&e.report, &e.output) {
        (Some(p), _) => write_out(Some(p), &body),
        (None, Some(_)) => write_out(None, &body),
        (None, None) => {
            eprintln!("{body}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Merged<A: Serialize, B: Serialize> {
    #[serde(flatten)]
    a: A,
    #[serde(flatten)]
    b: B,
}

fn emit_with_cost(c: &Circuit, extra: impl Serialize, e: &Emit) -> anyhow::Result<()> {
    let j = e.j.as_deref().map(read_coupling).transpose()?;
    let cost = circuit_report(c, j.as_ref(), &SolveOptions::default())?;
    write_emitted(c, &Merged { a: cost, b: extra }, e)
}

#[derive(Serialize)]
struct Nothing {}

fn run_compile(cmd: CompileCmd) -> anyhow::Result<()> {
    match cmd {
        CompileCmd::Cx { b, emit } => {
            let b: BitMatrix = read_json(&b)?;
            let g = compile_cx_layer(&b)?;
            #[derive(Serialize)]
            struct Extra {
                pooled: usize,
                layer_cost: usize,
            }
            emit_with_cost(&g.to_circuit(), Extra { pooled: g.pool_count(), layer_cost: g.encoding_cost() }, &emit)
        }
        CompileCmd::Cz { a, emit } => emit_with_cost(&compile_cz_layer(&read_json(&a)?)?, Nothing {}, &emit),
        CompileCmd::Clifford { layers, emit } => {
            let l: BruhatLayers = read_json(&layers)?;
            emit_with_cost(&compile_clifford(&l)?, Nothing {}, &emit)
        }
        CompileCmd::Qft { n, with_swaps, lowered, emit } => {
            let c = if lowered { qft_compile_gzz(n, with_swaps)? } else { qft_compile(n, with_swaps)? };
            emit_with_cost(&c, qft_census(n), &emit)
        }
        CompileCmd::Givens { phi, n, emit } => emit_with_cost(&givens_layer_compile(phi, n)?, Nothing {}, &emit),
        CompileCmd::Dynamics { spec, emit } => {
            let s: DynamicsSpec = read_json(&spec)?;
            emit_with_cost(&dynamics_circuit(&s)?, Nothing {}, &emit)
        }
        CompileCmd::Diagonal { phases, allow_size2, ancillas, emit } => {
            let p = read_phases(&phases)?;
            let opts = DiagOptions { pairs_as_hard: allow_size2, no_ancillas: ancillas == Ancillas::None };
            let out = compile_diagonal(&p, &opts)?;
            #[derive(Serialize)]
            struct Extra {
                cz_canceled: usize,
            }
            let report = Merged { a: Extra { cz_canceled: out.report.canceled_cz }, b: &out.report };
            write_emitted(&out.circuit, &report, &emit)
        }
    }
}

/// Largest entrywise deviation after aligning the phase on the largest
/// reference entry.
fn dense_distance(u: &Unitary, v: &Unitary) -> f64 {
    let dim = v.dim();
    let (mut br, mut bc) = (0, 0);
    for r in 0..dim {
        for c in 0..dim {
            if v.get(r, c).norm() > v.get(br, bc).norm() {
                (br, bc) = (r, c);
            }
        }
    }
    let ratio = u.get(br, bc) / v.get(br, bc);
    let phase = if ratio.norm() > 0.0 { ratio / ratio.norm() } else { ratio };
    let mut d = 0.0f64;
    for r in 0..dim {
        for c in 0..dim {
            d = d.max((u.get(r, c) - phase * v.get(r, c)).norm());
        }
    }
    d
}

fn circuit_phases(c: &Circuit, n: usize) -> anyhow::Result<DiagonalPhases> {
    if c.n() == n {
        match simulate_diagonal(c) {
            Ok(p) => return Ok(p),
            Err(Error::NonDiagonal(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(diagonal_action(c, n)?)
}

fn run_verify(a: VerifyArgs) -> anyhow::Result<()> {
    let text = fs::read_to_string(&a.circuit).with_context(|| format!("reading {}", a.circuit.display()))?;
    let c = Circuit::parse_with_base(&text, a.circuit.parent())?;
    let r = a.reference;
    let (kind, distance) = if let Some(p) = r.gzz {
        let m: HollowSymmetric = read_json(&p)?;
        ("gzz", circuit_phases(&c, m.n())?.distance(&gzz_phases(&m)))
    } else if let Some(n) = r.qft {
        if c.n() != n {
            bail!(Error::DimensionMismatch { expected: n, got: c.n() });
        }
        ("qft", dense_distance(&simulate_dense(&c)?, &qft_reference(n)?))
    } else if let Some(p) = r.gcx {
        let b: BitMatrix = read_json(&p)?;
        let reference = Circuit::from_gates(b.n(), vec![Gate::GCX(b)])?;
        ("gcx", dense_distance(&simulate_dense(&c)?, &simulate_dense(&reference)?))
    } else {
        let p = read_phases(r.phases.as_deref().expect("one reference is required"))?;
        ("phases", circuit_phases(&c, p.n())?.distance(&p.phases()))
    };
    let pass = distance <= a.tol;
    #[derive(Serialize)]
    struct Outcome<'a> {
        reference: &'a str,
        pass: bool,
        distance: f64,
        tol: f64,
    }
    write_out(None, &to_json(&Outcome { reference: kind, pass, distance, tol: a.tol })?)?;
    if !pass {
        return Err(VerifyFailed { distance, tol: a.tol }.into());
    }
    Ok(())
}

fn check_range(r: &Range) -> anyhow::Result<std::ops::RangeInclusive<usize>> {
    if r.n_min == 0 || r.n_min > r.n_max {
        bail!(Error::InvalidInput(format!("bad range {}..={}", r.n_min, r.n_max)));
    }
    Ok(r.n_min..=r.n_max)
}

fn csv_out<T: Serialize>(rows: &[T], path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => bench::write_csv(rows, fs::File::create(p)?),
        None => bench::write_csv(rows, std::io::stdout().lock()),
    }
}

fn run_bench(cmd: BenchCmd, seed: u64) -> anyhow::Result<()> {
    match cmd {
        BenchCmd::Gzz { range, samples, mode, summary, solver } => {
            let mut opts = solver.options();
            opts.max_n = opts.max_n.max(range.n_max);
            let rows = bench::bench_gzz(check_range(&range)?, samples, mode, seed, &opts)?;
            if summary {
                csv_out(&bench::summarize_gzz(&rows), range.output.as_deref())
            } else {
                csv_out(&rows, range.output.as_deref())
            }
        }
        BenchCmd::Truncation { range, samples, eps_l } => {
            let opts = SolveOptions { max_n: range.n_max.max(gzz_forge::solver::DEFAULT_MAX_N), ..Default::default() };
            let rows = bench::bench_truncation(check_range(&range)?, samples, eps_l, seed, &opts)?;
            csv_out(&rows, range.output.as_deref())
        }
        BenchCmd::Dircx { range, samples } => {
            csv_out(&bench::bench_dircx(check_range(&range)?, samples, seed)?, range.output.as_deref())
        }
        BenchCmd::Qft { range } => csv_out(&bench::bench_qft(check_range(&range)?)?, range.output.as_deref()),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.cmd {
        Cmd::Trap(t) => {
            let params = match (t.preset, &t.params) {
                (_, Some(p)) => read_json(p)?,
                (Some(Preset::Yb171Paper), None) | (None, None) => TrapParams::yb171_paper(t.ions),
            };
            write_out(t.output.as_deref(), &to_json(&coupling_matrix(&params)?)?)
        }
        Cmd::Synth(s) => {
            let target = match (&s.m, &s.a, &s.j) {
                (Some(m), _, _) => read_json(m)?,
                (None, Some(a), Some(j)) => hadamard_quotient(&read_json(a)?, &read_coupling(j)?)?,
                _ => bail!(Error::InvalidInput("give --m, or --a with --j".into())),
            };
            let opts = s.solver.options();
            let d: Decomposition =
                if s.mip { solve_mip(&target, &opts)?.decomposition } else { solve_lp(&target, &opts)? };
            write_out(s.output.as_deref(), &to_json(&d)?)
        }
        Cmd::Schedule(s) => {
            let d: Decomposition = read_json(&s.decomposition)?;
            let sched = order_encodings(&d, s.order.into());
            if let (Some(j), Some(path)) = (&s.j, &s.circuit) {
                let c = emit_gzz_circuit(&d, &read_coupling(j)?, s.order.into())?;
                write_out(Some(path), &c.to_text())?;
            }
            write_out(s.output.as_deref(), &to_json(&sched)?)
        }
        Cmd::Compile(c) => run_compile(c),
        Cmd::Verify(v) => run_verify(v),
        Cmd::Bench(b) => run_bench(b, cli.seed),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<VerifyFailed>().is_some() {
        return 1;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::Infeasible(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    if let Some(k) = std::env::var("GZZ_FORGE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
