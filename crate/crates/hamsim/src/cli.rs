//! Command-line definitions and subcommand drivers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hamsim_core::circuits::{
    compile_sequence, diagonal_circuit, one_sparse_circuit, pauli_exponential_circuit, Circuit,
};
use hamsim_core::decomposition::{decompose, validate};
use hamsim_core::formulas::{commutator_error, evaluate_unitary, sequence, Order};
use hamsim_core::hamiltonians::{
    build_model, chain_edges, pauli_to_dense, pauli_to_sparse, ring_edges, Edge, Link, ModelKind,
    ModelParams, PauliString, PauliSum, SparseHamiltonian,
};
use hamsim_core::hhl::{classical_solve, solve, HhlParams, LinearSystemProblem};
use hamsim_core::linalg::{exact_evolution, spectral_distance};

use crate::error::{AppError, AppResult};
use crate::formats;
use crate::random;
use crate::sweep::{parse_order, run_sweep, terms_from_pauli, terms_from_sparse, Split, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "hamsim", version, about = "Sparse-Hamiltonian simulation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a spin model and print it as a Pauli sum, sparse or dense matrix.
    Model(ModelCmd),
    /// Split a sparse Hamiltonian into one-sparse terms by edge colouring.
    Decompose(DecomposeCmd),
    /// Evaluate one product formula against the exact evolution.
    Evolve(EvolveCmd),
    /// Error sweep over product-formula orders and slice counts.
    Sweep(SweepCmd),
    /// Dump a synthesized gate-level circuit.
    Circuit(CircuitCmd),
    /// Simulated quantum linear-system solve against the classical answer.
    Hhl(HhlCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Graph {
    Chain,
    Ring,
}

/// Where the Hamiltonian comes from: a sparse file, a Pauli-sum file, a random
/// sparse matrix, or a model builder (in that order of precedence).
#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Sparse Hamiltonian file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Pauli-sum file.
    #[arg(long)]
    pub pauli: Option<PathBuf>,
    /// Generate a random sparse Hamiltonian of this sparsity on --n qubits (uses --seed).
    #[arg(long)]
    pub random_d: Option<usize>,
    /// ising, xy, heisenberg or honeycomb.
    #[arg(long, default_value = "ising")]
    pub model: String,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Graph::Chain)]
    pub graph: Graph,
    /// Edge-list file `<i> <j> [x|y|z]`, overriding --graph.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    #[arg(long = "J", default_value_t = 1.0, allow_negative_numbers = true)]
    pub j: f64,
    #[arg(long = "B", default_value_t = 0.5, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long = "Jx", default_value_t = 1.0, allow_negative_numbers = true)]
    pub jx: f64,
    #[arg(long = "Jy", default_value_t = 1.0, allow_negative_numbers = true)]
    pub jy: f64,
    #[arg(long = "Jz", default_value_t = 1.0, allow_negative_numbers = true)]
    pub jz: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub enum Hamiltonian {
    Pauli(PauliSum),
    Sparse(SparseHamiltonian),
}

fn read(path: &Path) -> AppResult<String> {
    fs::read_to_string(path).map_err(|source| AppError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> AppResult<()> {
    fs::write(path, text).map_err(|source| AppError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes to `--out` when given, otherwise to `stdout`.
fn emit(out: Option<&Path>, stdout: &mut dyn Write, text: &str) -> AppResult<()> {
    match out {
        Some(p) => write_file(p, text),
        None => stdout.write_all(text.as_bytes()).map_err(|source| AppError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

impl Source {
    fn edges(&self, kind: ModelKind) -> AppResult<Vec<Edge>> {
        if let Some(path) = &self.edges {
            return formats::parse_edges(&read(path)?, &path.display().to_string());
        }
        let edges = match self.graph {
            Graph::Chain => chain_edges(self.n),
            Graph::Ring => ring_edges(self.n),
        };
        if kind != ModelKind::Honeycomb {
            return Ok(edges);
        }
        // Without an edge file, honeycomb links are labelled x, y, z in turn.
        let labels = [Link::X, Link::Y, Link::Z];
        Ok(edges
            .into_iter()
            .enumerate()
            .map(|(k, e)| Edge::labeled(e.i, e.j, labels[k % 3]))
            .collect())
    }

    fn model_params(&self) -> AppResult<ModelParams> {
        let kind: ModelKind = self.model.parse()?;
        let mut p = ModelParams::new(kind, self.n, self.edges(kind)?);
        p.j = self.j;
        p.b = self.b;
        p.jx = self.jx;
        p.jy = self.jy;
        p.jz = self.jz;
        Ok(p)
    }

    pub fn load(&self) -> AppResult<Hamiltonian> {
        if let Some(path) = &self.input {
            let h = formats::parse_sparse(&read(path)?, &path.display().to_string())?;
            return Ok(Hamiltonian::Sparse(h));
        }
        if let Some(path) = &self.pauli {
            let sum = formats::parse_pauli_sum(&read(path)?, &path.display().to_string())?;
            return Ok(Hamiltonian::Pauli(sum));
        }
        if let Some(d) = self.random_d {
            let h = random::sparse_hamiltonian(&mut random::rng(self.seed), self.n, d)?;
            return Ok(Hamiltonian::Sparse(h));
        }
        Ok(Hamiltonian::Pauli(build_model(&self.model_params()?)?))
    }

    pub fn load_sparse(&self) -> AppResult<SparseHamiltonian> {
        match self.load()? {
            Hamiltonian::Sparse(h) => Ok(h),
            Hamiltonian::Pauli(sum) => Ok(pauli_to_sparse(&sum)?),
        }
    }

    fn describe(&self) -> String {
        if let Some(p) = &self.input {
            format!("input={}", p.display())
        } else if let Some(p) = &self.pauli {
            format!("pauli={}", p.display())
        } else if let Some(d) = self.random_d {
            format!("random n={} d={d}", self.n)
        } else {
            format!(
                "model={} n={} J={} B={} Jx={} Jy={} Jz={}",
                self.model, self.n, self.j, self.b, self.jx, self.jy, self.jz
            )
        }
    }
}

fn term_set(src: &Source, split: &str) -> AppResult<hamsim_core::formulas::TermSet> {
    let split: Split = split.parse()?;
    match src.load()? {
        Hamiltonian::Pauli(sum) => terms_from_pauli(&sum, split),
        Hamiltonian::Sparse(h) => terms_from_sparse(&h),
    }
}

fn order_from(order: u32, k: Option<u32>) -> AppResult<Order> {
    match k {
        Some(0) => Err(AppError::Usage("k must be at least 1".into())),
        Some(k) => Ok(Order::Suzuki(k)),
        None => parse_order(order),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelFormat {
    Pauli,
    Sparse,
    Dense,
}

#[derive(Debug, Args)]
pub struct ModelCmd {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value_t = ModelFormat::Pauli)]
    pub format: ModelFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeCmd {
    #[command(flatten)]
    pub source: Source,
    /// Prefix for the per-term files `<out>.term<k>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveCmd {
    #[command(flatten)]
    pub source: Source,
    /// pauli, grouped or decompose (Pauli-sum sources only).
    #[arg(long, default_value = "pauli")]
    pub split: String,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, default_value_t = 16)]
    pub r: usize,
    /// 1 for first order, 2k for Suzuki order 2k.
    #[arg(long, default_value_t = 1)]
    pub order: u32,
    /// Suzuki k; overrides --order.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepCmd {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value = "pauli")]
    pub split: String,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    /// Slice counts, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = SweepConfig::default_rs())]
    pub r: Vec<usize>,
    /// Orders (1 or 2k), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub order: Vec<u32>,
    /// Suzuki k values, comma separated; added to --order.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<u32>,
    /// Report the smallest r reaching this spectral error per order.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CircuitKind {
    Pauli,
    Diagonal,
    OneSparse,
    Sequence,
}

#[derive(Debug, Args)]
pub struct CircuitCmd {
    #[arg(long, value_enum, default_value_t = CircuitKind::Pauli)]
    pub kind: CircuitKind,
    /// Pauli word for --kind pauli.
    #[arg(long, default_value = "Z")]
    pub word: String,
    /// Rotation angle for --kind pauli: exp(-i theta P).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub theta: f64,
    /// Ancilla width of the random table for --kind diagonal.
    #[arg(long, default_value_t = 3)]
    pub bits: u32,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 1)]
    pub order: u32,
    #[arg(long)]
    pub k: Option<u32>,
    /// Also check the circuit against the exact evolution and report the distance.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HhlCmd {
    /// Sparse Hamiltonian file for A.
    #[arg(long)]
    pub a: PathBuf,
    /// One-line vector file for b.
    #[arg(long)]
    pub b: PathBuf,
    /// Observable M as a Pauli sum or dense matrix (identity when omitted).
    #[arg(long)]
    pub m: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    pub mbits: usize,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long = "C")]
    pub c: Option<f64>,
    /// Spectrum shift applied before phase estimation.
    #[arg(long, allow_negative_numbers = true)]
    pub shift: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> AppResult<()> {
    match cli.command {
        Command::Model(c) => run_model(&c, stdout),
        Command::Decompose(c) => run_decompose(&c, stdout),
        Command::Evolve(c) => run_evolve(&c, stdout),
        Command::Sweep(c) => run_sweep_cmd(&c, stdout),
        Command::Circuit(c) => run_circuit(&c, stdout),
        Command::Hhl(c) => run_hhl(&c, stdout),
    }
}

pub fn run_model(c: &ModelCmd, stdout: &mut dyn Write) -> AppResult<()> {
    let text = match (c.source.load()?, c.format) {
        (Hamiltonian::Pauli(sum), ModelFormat::Pauli) => formats::write_pauli_sum(&sum),
        (Hamiltonian::Pauli(sum), ModelFormat::Dense) => formats::write_dense(&pauli_to_dense(&sum)?),
        (Hamiltonian::Pauli(sum), ModelFormat::Sparse) => formats::write_sparse(&pauli_to_sparse(&sum)?),
        (Hamiltonian::Sparse(h), ModelFormat::Dense) => formats::write_dense(&h.to_dense()),
        (Hamiltonian::Sparse(h), ModelFormat::Sparse) => formats::write_sparse(&h),
        (Hamiltonian::Sparse(_), ModelFormat::Pauli) => {
            return Err(AppError::Usage("sparse input cannot be printed as a Pauli sum".into()))
        }
    };
    emit(c.out.as_deref(), stdout, &text)
}

pub fn run_decompose(c: &DecomposeCmd, stdout: &mut dyn Write) -> AppResult<()> {
    let h = c.source.load_sparse()?;
    let dec = decompose(&h)?;
    let report = validate(&dec, &h)?;
    if !report.passed(1e-12) {
        return Err(AppError::Core(hamsim_core::Error::InvalidParameter(format!(
            "decomposition failed validation: residual {:e}",
            report.max_residual
        ))));
    }
    let listing = formats::write_decomposition_listing(&dec);
    emit(None, stdout, &listing)?;
    if let Some(prefix) = &c.out {
        for (k, term) in dec.terms.iter().enumerate() {
            let path = PathBuf::from(format!("{}.term{k}", prefix.display()));
            write_file(&path, &formats::write_sparse(&term.to_sparse()))?;
        }
    }
    Ok(())
}

pub fn run_evolve(c: &EvolveCmd, stdout: &mut dyn Write) -> AppResult<()> {
    let ts = term_set(&c.source, &c.split)?;
    let order = order_from(c.order, c.k)?;
    let seq = sequence(&ts, order, c.t, c.r)?;
    let u = evaluate_unitary(&ts, &seq)?;
    let exact = exact_evolution(&ts.total_dense()?, c.t)?;
    let error = spectral_distance(&u, &exact)?;
    let bound = commutator_error(&ts, c.t, c.r)?.leading_bound;
    let text = format!(
        "order,k,r,t,error,bound\n{},{},{},{:.15e},{:.15e},{:.15e}\n",
        order.label(),
        order.k(),
        c.r,
        c.t,
        error,
        bound
    );
    emit(c.out.as_deref(), stdout, &text)
}

pub fn run_sweep_cmd(c: &SweepCmd, stdout: &mut dyn Write) -> AppResult<()> {
    let ts = term_set(&c.source, &c.split)?;
    let mut orders = c.order.iter().map(|&o| parse_order(o)).collect::<AppResult<Vec<_>>>()?;
    for &k in &c.k {
        orders.push(order_from(0, Some(k))?);
    }
    if c.order.is_empty() && c.k.is_empty() {
        orders = vec![Order::First, Order::Suzuki(1), Order::Suzuki(2)];
    }
    orders.dedup();
    if let Some(eps) = c.eps {
        if !(eps > 0.0) {
            return Err(AppError::Usage(format!("eps must be positive, got {eps}")));
        }
    }
    let cfg = SweepConfig {
        t: c.t,
        orders,
        rs: c.r.clone(),
        seed: c.source.seed,
        label: format!("{} split={}", c.source.describe(), c.split),
    };
    let res = run_sweep(&ts, &cfg)?;
    let mut csv = res.to_csv();
    if let Some(eps) = c.eps {
        for &order in &cfg.orders {
            let r_min = res
                .rows
                .iter()
                .filter(|row| row.order == order && row.error <= eps)
                .map(|row| row.r)
                .min();
            let r_min = r_min.map_or_else(|| "none".to_string(), |r| r.to_string());
            csv.push_str(&format!(
                "# eps={eps:e} order={} k={} r_min={r_min}\n",
                order.label(),
                order.k()
            ));
        }
    }
    emit(c.out.as_deref(), stdout, &csv)
}

pub fn build_circuit(c: &CircuitCmd) -> AppResult<(Circuit, Option<hamsim_core::linalg::ComplexMatrix>)> {
    let mut rng = random::rng(c.source.seed);
    Ok(match c.kind {
        CircuitKind::Pauli => {
            let p = PauliString::from_word(1.0, &c.word)?;
            let target = exact_evolution(&hamsim_core::hamiltonians::pauli_string_to_dense(&p)?, c.theta)?;
            (pauli_exponential_circuit(&p, c.theta)?, Some(target))
        }
        CircuitKind::Diagonal => {
            let table = random::diagonal_table(&mut rng, c.source.n, c.bits)?;
            let energies: Vec<f64> = (0..1usize << c.source.n).map(|a| table.energy(a)).collect();
            let h = hamsim_core::linalg::ComplexMatrix::from_real_diagonal(&energies);
            (diagonal_circuit(&table, c.t)?, Some(exact_evolution(&h, c.t)?))
        }
        CircuitKind::OneSparse => {
            let term = random::one_sparse_term(&mut rng, c.source.n)?;
            let target = exact_evolution(&term.to_dense(), c.t)?;
            (one_sparse_circuit(&term, c.t)?, Some(target))
        }
        CircuitKind::Sequence => {
            let ts = term_set(&c.source, "pauli")?;
            let seq = sequence(&ts, order_from(c.order, c.k)?, c.t, c.r)?;
            let target = evaluate_unitary(&ts, &seq)?;
            (compile_sequence(&ts, &seq)?, Some(target))
        }
    })
}

pub fn run_circuit(c: &CircuitCmd, stdout: &mut dyn Write) -> AppResult<()> {
    let (circuit, target) = build_circuit(c)?;
    let mut text = formats::write_circuit(&circuit);
    if c.verify {
        if let Some(target) = target {
            let u = hamsim_core::circuits::circuit_unitary(&circuit)?;
            let residual = hamsim_core::circuits::uncompute_residual(&circuit)?;
            text.push_str(&format!(
                "# verify distance={:e} ancilla_residual={:e}\n",
                spectral_distance(&u, &target)?,
                residual
            ));
        }
    }
    emit(c.out.as_deref(), stdout, &text)
}

pub fn run_hhl(c: &HhlCmd, stdout: &mut dyn Write) -> AppResult<()> {
    let a_path = c.a.display().to_string();
    let a = formats::parse_sparse(&read(&c.a)?, &a_path)?.to_dense();
    let b = formats::parse_vector(&read(&c.b)?, &c.b.display().to_string())?;
    let m = match &c.m {
        Some(path) => formats::parse_observable(&read(path)?, &path.display().to_string())?,
        None => hamsim_core::linalg::ComplexMatrix::identity(a.dim()),
    };
    let mut params = match c.t0 {
        Some(t0) => HhlParams {
            m_bits: c.mbits,
            t0,
            c: 1.0,
            shift: 0.0,
        },
        None => LinearSystemProblem::with_auto_params(a.clone(), b.clone(), m.clone(), c.mbits)?.params,
    };
    if let Some(shift) = c.shift {
        params.shift = shift;
    }
    params.c = c.c.unwrap_or(0.9 * params.smallest_decodable());
    let problem = LinearSystemProblem::new(a, b, m, params)?;
    let result = solve(&problem)?;
    let classical = classical_solve(problem.a(), problem.b(), problem.observable())?;
    let text = format!(
        "mbits,estimate,rescaled,success_prob,classical,abs_err\n{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}\n",
        result.m_bits,
        result.estimate,
        result.rescaled_estimate,
        result.success_probability,
        classical.normalized,
        (result.estimate - classical.normalized).abs()
    );
    emit(c.out.as_deref(), stdout, &text)
}
