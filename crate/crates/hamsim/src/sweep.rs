//! Product-formula error sweeps over `(order, r)` grids.

use std::fmt::Write as _;
use std::str::FromStr;

use hamsim_core::decomposition::decompose;
use hamsim_core::formulas::{commutator_error, evaluate_unitary, sequence, Order, Term, TermSet};
use hamsim_core::hamiltonians::{group_by_letters, pauli_to_sparse, PauliSum, SparseHamiltonian};
use hamsim_core::linalg::{exact_evolution, spectral_distance, ComplexMatrix};
use rayon::prelude::*;

use crate::error::{AppError, AppResult};

/// Errors at or below this are treated as round-off and left out of slope fits.
pub const SLOPE_FLOOR: f64 = 1e-11;

/// How a Pauli-sum Hamiltonian is cut into exponentiable terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    /// One term per Pauli string.
    Pauli,
    /// One dense term per group of strings sharing the same letters.
    Grouped,
    /// One-sparse terms from edge colouring.
    Decompose,
}

impl FromStr for Split {
    type Err = AppError;

    fn from_str(s: &str) -> AppResult<Self> {
        match s {
            "pauli" => Ok(Split::Pauli),
            "grouped" => Ok(Split::Grouped),
            "decompose" => Ok(Split::Decompose),
            other => Err(AppError::Usage(format!(
                "unknown split '{other}' (expected pauli, grouped or decompose)"
            ))),
        }
    }
}

pub fn terms_from_pauli(sum: &PauliSum, split: Split) -> AppResult<TermSet> {
    Ok(match split {
        Split::Pauli => TermSet::from_pauli_sum(sum)?,
        Split::Grouped => {
            let terms = group_by_letters(sum)
                .iter()
                .map(Term::pauli_group)
                .collect::<hamsim_core::Result<Vec<_>>>()?;
            TermSet::new(terms)?
        }
        Split::Decompose => terms_from_sparse(&pauli_to_sparse(sum)?)?,
    })
}

pub fn terms_from_sparse(h: &SparseHamiltonian) -> AppResult<TermSet> {
    Ok(TermSet::from_one_sparse(decompose(h)?.terms)?)
}

/// Parses `1`, `2`, `4`, ... into first order or Suzuki order `2k`.
pub fn parse_order(label: u32) -> AppResult<Order> {
    match label {
        1 => Ok(Order::First),
        l if l >= 2 && l % 2 == 0 => Ok(Order::Suzuki(l / 2)),
        l => Err(AppError::Usage(format!("order must be 1 or even, got {l}"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub t: f64,
    pub orders: Vec<Order>,
    pub rs: Vec<usize>,
    pub seed: u64,
    /// Free-form description written into the CSV header comment.
    pub label: String,
}

impl SweepConfig {
    /// `r = 16, 32, ..., 1024`.
    pub fn default_rs() -> Vec<usize> {
        (4..=10).map(|e| 1usize << e).collect()
    }

    fn validate(&self) -> AppResult<()> {
        if self.orders.is_empty() || self.rs.is_empty() {
            return Err(AppError::Usage("sweep grid is empty".into()));
        }
        if self.rs.contains(&0) {
            return Err(AppError::Usage("r must be at least 1".into()));
        }
        if !self.t.is_finite() {
            return Err(AppError::Usage("t must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub order: Order,
    pub r: usize,
    pub t: f64,
    /// Spectral distance between the product formula and the exact evolution.
    pub error: f64,
    /// First-order commutator estimate `|sum [H_j, H_j']| t^2 / (2r)`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Fitted log-log slope of error against `r`, per order.
    pub slopes: Vec<(Order, Option<f64>)>,
    pub seed: u64,
    pub label: String,
}

/// Least-squares slope of `ln y` against `ln x`; needs two distinct `x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Evaluates every grid point (in parallel) against one exact evolution.
/// Rows come back in grid order: orders outer, `r` inner.
pub fn run_sweep(ts: &TermSet, cfg: &SweepConfig) -> AppResult<SweepResult> {
    cfg.validate()?;
    let exact: ComplexMatrix = exact_evolution(&ts.total_dense()?, cfg.t)?;
    let grid: Vec<(Order, usize)> = cfg
        .orders
        .iter()
        .flat_map(|&o| cfg.rs.iter().map(move |&r| (o, r)))
        .collect();
    let rows = grid
        .par_iter()
        .map(|&(order, r)| -> AppResult<SweepRow> {
            let seq = sequence(ts, order, cfg.t, r)?;
            let u = evaluate_unitary(ts, &seq)?;
            Ok(SweepRow {
                order,
                r,
                t: cfg.t,
                error: spectral_distance(&u, &exact)?,
                bound: commutator_error(ts, cfg.t, r)?.leading_bound,
            })
        })
        .collect::<AppResult<Vec<_>>>()?;
    let slopes = cfg
        .orders
        .iter()
        .map(|&o| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|row| row.order == o && row.error > SLOPE_FLOOR)
                .map(|row| (row.r as f64, row.error))
                .collect();
            (o, loglog_slope(&pts))
        })
        .collect();
    Ok(SweepResult {
        rows,
        slopes,
        seed: cfg.seed,
        label: cfg.label.clone(),
    })
}

impl SweepResult {
    pub fn slope(&self, order: Order) -> Option<f64> {
        self.slopes.iter().find(|s| s.0 == order).and_then(|s| s.1)
    }

    /// CSV with a seed comment, the `order,k,r,t,error,bound` header, one row
    /// per grid point and a trailing `# slope` comment per order.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# hamsim sweep {} seed={}\n", self.label, self.seed);
        out.push_str("order,k,r,t,error,bound\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.15e},{:.15e},{:.15e}",
                row.order.label(),
                row.order.k(),
                row.r,
                row.t,
                row.error,
                row.bound
            );
        }
        for &(order, slope) in &self.slopes {
            let value = slope.map_or_else(|| "nan".to_string(), |s| format!("{s:.15e}"));
            let _ = writeln!(out, "# slope order={} k={} value={value}", order.label(), order.k());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hamsim_core::hamiltonians::PauliString;

    fn x_plus_z() -> PauliSum {
        PauliSum::new(
            1,
            vec![
                PauliString::from_word(1.0, "X").unwrap(),
                PauliString::from_word(1.0, "Z").unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = [16.0, 32.0, 64.0].iter().map(|&r: &f64| (r, 3.0 * r.powi(-2))).collect();
        assert!((loglog_slope(&pts).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&pts[..1]), None);
    }

    #[test]
    fn first_order_slope_and_csv_shape() {
        let ts = terms_from_pauli(&x_plus_z(), Split::Pauli).unwrap();
        let cfg = SweepConfig {
            t: 1.0,
            orders: vec![Order::First, Order::Suzuki(1)],
            rs: vec![16, 32, 64, 128],
            seed: 0,
            label: "x+z".into(),
        };
        let res = run_sweep(&ts, &cfg).unwrap();
        assert!((res.slope(Order::First).unwrap() + 1.0).abs() < 0.15);
        assert!((res.slope(Order::Suzuki(1)).unwrap() + 2.0).abs() < 0.2);
        let csv = res.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# hamsim sweep x+z seed=0");
        assert_eq!(lines[1], "order,k,r,t,error,bound");
        assert!(lines[2].starts_with("1,0,16,1.000000000000000e0,"));
        assert!(lines[6].starts_with("2,1,16,"));
        assert!(lines[10].starts_with("# slope order=1 k=0 value=-"));
        assert_eq!(lines.len(), 12);
    }

    #[test]
    fn empty_grid_rejected() {
        let ts = terms_from_pauli(&x_plus_z(), Split::Pauli).unwrap();
        let cfg = SweepConfig {
            t: 1.0,
            orders: vec![],
            rs: vec![1],
            seed: 0,
            label: String::new(),
        };
        assert!(matches!(run_sweep(&ts, &cfg), Err(AppError::Usage(_))));
    }

    #[test]
    fn splits_agree_on_total() {
        let sum = x_plus_z();
        let reference = hamsim_core::hamiltonians::pauli_to_dense(&sum).unwrap();
        for split in [Split::Pauli, Split::Grouped, Split::Decompose] {
            let total = terms_from_pauli(&sum, split).unwrap().total_dense().unwrap();
            assert!(spectral_distance(&total, &reference).unwrap() < 1e-14, "{split:?}");
        }
    }
}
