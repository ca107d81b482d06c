//! Text formats.
//!
//! * Sparse Hamiltonian: header `n=<int> d=<int>`, then `<row> <col> <re> <im>`
//!   per entry (0-based). Every off-diagonal entry needs its conjugate partner.
//! * Pauli sum: `<coeff> <word>` per line, e.g. `0.5 XIZ`.
//! * Vector: one line of entries, each `re` or `re,im`.
//! * Dense matrix: header `dense <dim>`, then `dim` rows of `dim` entries.
//! * Edge list: `<i> <j> [x|y|z]` per line.
//!
//! `#` starts a comment everywhere; blank lines are ignored.

use std::fmt::Write as _;

use hamsim_core::circuits::{Circuit, Gate};
use hamsim_core::decomposition::ColoredDecomposition;
use hamsim_core::hamiltonians::{pauli_to_dense, Edge, Link, PauliString, PauliSum, SparseHamiltonian};
use hamsim_core::linalg::{ComplexMatrix, C64};

use crate::error::{AppError, AppResult};

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_num<T: std::str::FromStr>(tok: &str, what: &str, path: &str, line: usize) -> AppResult<T> {
    tok.parse()
        .map_err(|_| AppError::parse(path, line, format!("invalid {what} '{tok}'")))
}

fn parse_complex(tok: &str, path: &str, line: usize) -> AppResult<C64> {
    match tok.split_once(',') {
        Some((re, im)) => Ok(C64::new(
            parse_num(re, "real part", path, line)?,
            parse_num(im, "imaginary part", path, line)?,
        )),
        None => Ok(C64::new(parse_num(tok, "real value", path, line)?, 0.0)),
    }
}

fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else {
        format!("{:?},{:?}", z.re, z.im)
    }
}

pub fn parse_sparse(text: &str, path: &str) -> AppResult<SparseHamiltonian> {
    let mut lines = content_lines(text);
    let Some((hline, header)) = lines.next() else {
        return Err(AppError::parse(path, 1, "missing header 'n=<int> d=<int>'"));
    };
    let (mut n, mut d) = (None, None);
    for tok in header.split_whitespace() {
        match tok.split_once('=') {
            Some(("n", v)) => n = Some(parse_num::<usize>(v, "qubit count", path, hline)?),
            Some(("d", v)) => d = Some(parse_num::<usize>(v, "sparsity", path, hline)?),
            _ => return Err(AppError::parse(path, hline, format!("unexpected header token '{tok}'"))),
        }
    }
    let (Some(n), Some(d)) = (n, d) else {
        return Err(AppError::parse(path, hline, "header must set both n and d"));
    };
    let mut entries = Vec::new();
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(AppError::parse(
                path,
                ln,
                format!("expected '<row> <col> <re> <im>', found {} fields", toks.len()),
            ));
        }
        let row: usize = parse_num(toks[0], "row index", path, ln)?;
        let col: usize = parse_num(toks[1], "column index", path, ln)?;
        let re: f64 = parse_num(toks[2], "real part", path, ln)?;
        let im: f64 = parse_num(toks[3], "imaginary part", path, ln)?;
        entries.push((row, col, C64::new(re, im)));
    }
    Ok(SparseHamiltonian::from_entries(n, d, entries)?)
}

/// Canonical text: rows ascending, columns ascending, shortest round-trip decimals.
pub fn write_sparse(h: &SparseHamiltonian) -> String {
    let mut out = format!("n={} d={}\n", h.n_qubits(), h.sparsity());
    for (r, c, v) in h.entries() {
        let _ = writeln!(out, "{r} {c} {:?} {:?}", v.re, v.im);
    }
    out
}

pub fn parse_pauli_sum(text: &str, path: &str) -> AppResult<PauliSum> {
    let mut terms = Vec::new();
    let mut n = None;
    for (ln, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(AppError::parse(path, ln, "expected '<coeff> <word>'"));
        }
        let coeff: f64 = parse_num(toks[0], "coefficient", path, ln)?;
        let p = PauliString::from_word(coeff, toks[1])
            .map_err(|e| AppError::parse(path, ln, e.to_string()))?;
        match n {
            None => n = Some(p.n_qubits()),
            Some(n) if n != p.n_qubits() => {
                return Err(AppError::parse(
                    path,
                    ln,
                    format!("word length {} differs from earlier terms ({n})", p.n_qubits()),
                ))
            }
            _ => {}
        }
        terms.push(p);
    }
    let Some(n) = n else {
        return Err(AppError::parse(path, 1, "no Pauli terms"));
    };
    Ok(PauliSum::new(n, terms)?)
}

pub fn write_pauli_sum(sum: &PauliSum) -> String {
    let mut out = String::new();
    for p in sum.terms() {
        let _ = writeln!(out, "{:?} {}", p.coefficient, p.word_string());
    }
    out
}

pub fn parse_vector(text: &str, path: &str) -> AppResult<Vec<C64>> {
    let mut lines = content_lines(text);
    let Some((ln, line)) = lines.next() else {
        return Err(AppError::parse(path, 1, "empty vector file"));
    };
    if let Some((extra, _)) = lines.next() {
        return Err(AppError::parse(path, extra, "vector file must hold a single line"));
    }
    line.split_whitespace().map(|tok| parse_complex(tok, path, ln)).collect()
}

pub fn write_vector(v: &[C64]) -> String {
    let toks: Vec<String> = v.iter().map(|&z| format_complex(z)).collect();
    format!("{}\n", toks.join(" "))
}

pub fn parse_dense(text: &str, path: &str) -> AppResult<ComplexMatrix> {
    let mut lines = content_lines(text);
    let Some((hline, header)) = lines.next() else {
        return Err(AppError::parse(path, 1, "missing header 'dense <dim>'"));
    };
    let dim: usize = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["dense", d] => parse_num(d, "dimension", path, hline)?,
        _ => return Err(AppError::parse(path, hline, "expected header 'dense <dim>'")),
    };
    let mut data = Vec::with_capacity(dim * dim);
    let mut rows = 0;
    let mut last = hline;
    for (ln, line) in lines {
        last = ln;
        let row: Vec<C64> = line
            .split_whitespace()
            .map(|tok| parse_complex(tok, path, ln))
            .collect::<AppResult<_>>()?;
        if row.len() != dim {
            return Err(AppError::parse(path, ln, format!("expected {dim} entries, found {}", row.len())));
        }
        if rows == dim {
            return Err(AppError::parse(path, ln, format!("more than {dim} rows")));
        }
        data.extend(row);
        rows += 1;
    }
    if rows != dim {
        return Err(AppError::parse(path, last, format!("expected {dim} rows, found {rows}")));
    }
    Ok(ComplexMatrix::from_row_major(dim, data)?)
}

pub fn write_dense(m: &ComplexMatrix) -> String {
    let mut out = format!("dense {}\n", m.dim());
    for r in 0..m.dim() {
        let toks: Vec<String> = m.row(r).iter().map(|&z| format_complex(z)).collect();
        let _ = writeln!(out, "{}", toks.join(" "));
    }
    out
}

/// Dense header selects the dense format; anything else is read as a Pauli sum.
pub fn parse_observable(text: &str, path: &str) -> AppResult<ComplexMatrix> {
    let dense = content_lines(text)
        .next()
        .is_some_and(|(_, l)| l.split_whitespace().next() == Some("dense"));
    if dense {
        parse_dense(text, path)
    } else {
        Ok(pauli_to_dense(&parse_pauli_sum(text, path)?)?)
    }
}

pub fn parse_edges(text: &str, path: &str) -> AppResult<Vec<Edge>> {
    let mut edges = Vec::new();
    for (ln, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&toks.len()) {
            return Err(AppError::parse(path, ln, "expected '<i> <j> [x|y|z]'"));
        }
        let i = parse_num(toks[0], "vertex", path, ln)?;
        let j = parse_num(toks[1], "vertex", path, ln)?;
        edges.push(match toks.get(2) {
            Some(label) => {
                let link: Link = label.parse().map_err(|e: hamsim_core::Error| AppError::parse(path, ln, e.to_string()))?;
                Edge::labeled(i, j, link)
            }
            None => Edge::new(i, j),
        });
    }
    Ok(edges)
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// One `GATE <kind> targets=<list> params=<list>` line per gate; oracle tables
/// follow their gate as `ORACLE k=<bits>` and `a -> f(a)` lines.
pub fn write_circuit(c: &Circuit) -> String {
    let mut out = format!("CIRCUIT system={} ancilla={}\n", c.n_system(), c.n_ancilla());
    for g in c.gates() {
        let params: Vec<String> = g.params().iter().map(|p| format!("{p:?}")).collect();
        let _ = writeln!(
            out,
            "GATE {} targets={} params={}",
            g.kind_name(),
            join(g.targets()),
            params.join(",")
        );
        if let Gate::Oracle { outputs, table, .. } = g {
            let _ = writeln!(out, "ORACLE k={}", outputs.len());
            for (a, f) in table.iter().enumerate() {
                let _ = writeln!(out, "{a} -> {f}");
            }
        }
    }
    out
}

/// Human-readable listing: `term <k> pairs=<c> fixed=<c>` followed by the entries.
pub fn write_decomposition_listing(dec: &ColoredDecomposition) -> String {
    let mut out = String::new();
    for (k, term) in dec.terms.iter().enumerate() {
        let _ = writeln!(
            out,
            "term {k} pairs={} fixed={}",
            term.pairs().len(),
            term.fixed_points().len()
        );
        for &(x, y, w) in term.pairs() {
            let _ = writeln!(out, "  pair {x} {y} {:?} {:?}", w.re, w.im);
        }
        for &(x, v) in term.fixed_points() {
            let _ = writeln!(out, "  fixed {x} {v:?}");
        }
    }
    out
}
