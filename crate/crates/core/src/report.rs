//! Experiment driver: builds the meshes of each study, assembles the
//! system, factors it under every ordering and writes the count and
//! percentage tables together with spy plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::json;

use crate::assembly::{assemble, ProblemParams};
use crate::error::{Error, Result};
use crate::lufact::{lu_numeric, symbolic_fill};
use crate::mesh::{build_annulus_square, build_graded_square, build_uniform_square, Mesh};
use crate::ordering::{bandwidth_profile, OrderingMethod, DEFAULT_LEAF};
use crate::sparse::{pattern_graph, permute_symmetric, spy_svg, SparseMatrix};

pub const DEFAULT_N: [usize; 4] = [5, 10, 15, 20];
pub const DEFAULT_K: f64 = 5.0;

/// Mesh family of an experiment, parametrised by the refinement `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshRecipe {
    /// `n x n` squares.
    Uniform,
    /// `factor * n` intervals horizontally, `n` vertically.
    Graded { factor: usize },
    /// `4n` cells around the scatterer and `max(min_layers, round(n * layers_per_n))`
    /// radial layers whose widths grow outward by `grading`.
    Annulus {
        layers_per_n: f64,
        min_layers: usize,
        grading: f64,
    },
}

impl MeshRecipe {
    pub fn radial_layers(layers_per_n: f64, min_layers: usize, n: usize) -> usize {
        ((n as f64 * layers_per_n).round() as usize).max(min_layers)
    }

    pub fn build(&self, n: usize) -> Result<Mesh> {
        match *self {
            MeshRecipe::Uniform => build_uniform_square(n),
            MeshRecipe::Graded { factor } => build_graded_square(n, factor),
            MeshRecipe::Annulus {
                layers_per_n,
                min_layers,
                grading,
            } => build_annulus_square(4 * n, Self::radial_layers(layers_per_n, min_layers, n), grading),
        }
    }

    pub fn describe(&self, n: usize) -> String {
        match *self {
            MeshRecipe::Uniform => format!("uniform square {n}x{n}"),
            MeshRecipe::Graded { factor } => format!("graded square {}x{n}", factor * n),
            MeshRecipe::Annulus {
                layers_per_n,
                min_layers,
                grading,
            } => format!(
                "annulus {}x{} grading {grading}",
                4 * n,
                Self::radial_layers(layers_per_n, min_layers, n)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub id: u8,
    pub n_values: Vec<usize>,
    pub k: f64,
    pub leaf: usize,
}

impl ExperimentSpec {
    pub fn new(id: u8) -> Result<Self> {
        Self::with_n(id, DEFAULT_N.to_vec())
    }

    pub fn with_n(id: u8, n_values: Vec<usize>) -> Result<Self> {
        let spec = ExperimentSpec {
            id,
            n_values,
            k: DEFAULT_K,
            leaf: DEFAULT_LEAF,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=5).contains(&self.id) {
            return Err(Error::invalid(format!("experiment id must be 1..5, got {}", self.id)));
        }
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(Error::invalid("n values must be a non-empty list of positive integers"));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::invalid("k must be positive and finite"));
        }
        if self.leaf == 0 {
            return Err(Error::invalid("leaf threshold must be at least 1"));
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        if self.id == 5 {
            2
        } else {
            1
        }
    }

    pub fn recipe(&self) -> MeshRecipe {
        match self.id {
            2 => MeshRecipe::Graded { factor: 10 },
            3 => MeshRecipe::Annulus {
                layers_per_n: 0.2,
                min_layers: 2,
                grading: 1.0,
            },
            4 => MeshRecipe::Annulus {
                layers_per_n: 1.0,
                min_layers: 2,
                grading: 3.0,
            },
            _ => MeshRecipe::Uniform,
        }
    }

    /// Whether the mesh only imitates the unstructured mesh of the study.
    pub fn analog_mesh(&self) -> bool {
        matches!(self.id, 2..=4)
    }

    pub fn methods(&self) -> [OrderingMethod; 4] {
        [
            OrderingMethod::Natural,
            OrderingMethod::Amd,
            OrderingMethod::NestedDissection { leaf: self.leaf },
            OrderingMethod::Rcm,
        ]
    }

    pub fn assemble(&self, n: usize) -> Result<SparseMatrix> {
        let mesh = self.recipe().build(n)?;
        assemble(&mesh, &ProblemParams::new(self.k, self.degree())?)
    }
}

/// Outcome of one ordering on one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingResult {
    pub method: OrderingMethod,
    /// Nonzeros of `L + U - I` from the numeric factorization.
    pub combined_nnz: usize,
    /// Prediction of the same count by graph elimination.
    pub symbolic_nnz: usize,
    /// Natural-order count divided by this count.
    pub reduction_factor: f64,
    /// `max|PAP^T - LU| / max|A|`.
    pub factorization_error: f64,
    /// `|A x - b|_inf / |b|_inf` for a manufactured solution.
    pub solve_residual: f64,
    pub bandwidth: usize,
    pub profile: usize,
}

/// Manufactured solution used for residual checks.
pub fn manufactured_solution(n: usize) -> Vec<Complex64> {
    (0..n).map(|j| Complex64::from_polar(1.0, 0.7 * j as f64)).collect()
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Orders, factors and solves `a` under each method. The natural order must
/// come first in `methods` for the reduction factors to be meaningful; when
/// it is absent they are relative to the first method.
pub fn evaluate_orderings(a: &SparseMatrix, methods: &[OrderingMethod]) -> Result<Vec<OrderingResult>> {
    let g = pattern_graph(a);
    let x_true = manufactured_solution(a.dim());
    let scale = a.max_abs();
    let mut out: Vec<OrderingResult> = Vec::with_capacity(methods.len());
    for &method in methods {
        let wrap = |e: Error| Error::Ordering {
            method: method.name().to_string(),
            source: Box::new(e),
        };
        let perm = method.compute(&g).map_err(wrap)?;
        let symbolic_nnz = symbolic_fill(&g, &perm)?;
        let pa = permute_symmetric(a, &perm)?;
        let (bandwidth, profile) = bandwidth_profile(&pa.pattern());
        let factors = lu_numeric(&pa).map_err(wrap)?;
        let factorization_error = factors.factorization_error(&pa)? / scale;
        let px: Vec<Complex64> = perm.order().iter().map(|&i| x_true[i]).collect();
        let b = pa.mat_vec(&px)?;
        let x = factors.solve(&b)?;
        let residual = pa.mat_vec(&x)?;
        let diff: Vec<Complex64> = residual.iter().zip(&b).map(|(r, b)| r - b).collect();
        let combined_nnz = factors.combined_nnz();
        let baseline = out.first().map_or(combined_nnz, |r| r.combined_nnz);
        out.push(OrderingResult {
            method,
            combined_nnz,
            symbolic_nnz,
            reduction_factor: baseline as f64 / combined_nnz as f64,
            factorization_error,
            solve_residual: inf_norm(&diff) / inf_norm(&b),
            bandwidth,
            profile,
        });
    }
    Ok(out)
}

/// Natural order and the three fill-reducing orderings, ranked by fill
/// (ties keep the natural, amd, nd, rcm order).
pub fn compare_orderings(a: &SparseMatrix) -> Result<Vec<OrderingResult>> {
    let mut results = evaluate_orderings(a, &OrderingMethod::STANDARD)?;
    results.sort_by_key(|r| r.combined_nnz);
    Ok(results)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    pub dim: usize,
    pub total_entries: u64,
    pub nnz_a: usize,
    pub mesh: String,
    /// Natural order first, then the experiment's methods.
    pub results: Vec<OrderingResult>,
}

impl ExperimentRow {
    pub fn result(&self, name: &str) -> Option<&OrderingResult> {
        self.results.iter().find(|r| r.method.name() == name)
    }

    pub fn natural(&self) -> &OrderingResult {
        &self.results[0]
    }

    /// Ordering with the least fill; ties go to the earlier method.
    pub fn best(&self) -> &OrderingResult {
        self.results
            .iter()
            .reduce(|best, r| if r.combined_nnz < best.combined_nnz { r } else { best })
            .expect("at least one ordering")
    }

    pub fn percent(&self, count: usize) -> f64 {
        100.0 * count as f64 / self.total_entries as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentReport {
    /// Whether the natural-order fill percentage strictly decreases with n.
    pub fn natural_fill_strictly_decreasing(&self) -> bool {
        let p: Vec<f64> = self.rows.iter().map(|r| r.percent(r.natural().combined_nnz)).collect();
        p.windows(2).all(|w| w[1] < w[0])
    }

    pub fn counts_csv(&self) -> String {
        let names: Vec<&str> = self.spec.methods().iter().map(|m| m.name()).collect();
        let mut s = String::from("n,N,total_entries,nnz_A");
        for name in &names {
            write!(s, ",nnz_LU_{name}").unwrap();
        }
        for name in &names[1..] {
            write!(s, ",factor_{name}").unwrap();
        }
        s.push_str(",best,analog_mesh\n");
        for row in &self.rows {
            write!(s, "{},{},{},{}", row.n, row.dim, row.total_entries, row.nnz_a).unwrap();
            for r in &row.results {
                write!(s, ",{}", r.combined_nnz).unwrap();
            }
            for r in &row.results[1..] {
                write!(s, ",{:.2}", r.reduction_factor).unwrap();
            }
            writeln!(s, ",{},{}", row.best().method.name(), self.spec.analog_mesh()).unwrap();
        }
        s
    }

    pub fn percent_csv(&self) -> String {
        let mut s = String::from("n,nnz_A");
        for m in self.spec.methods() {
            write!(s, ",LU_{}", m.name()).unwrap();
        }
        s.push_str(",analog_mesh\n");
        for row in &self.rows {
            write!(s, "{},{}", row.n, format_percent(row.percent(row.nnz_a))).unwrap();
            for r in &row.results {
                write!(s, ",{}", format_percent(row.percent(r.combined_nnz))).unwrap();
            }
            writeln!(s, ",{}", self.spec.analog_mesh()).unwrap();
        }
        s
    }

    pub fn counts_markdown(&self) -> String {
        let mut s = format!("# Experiment {} (p = {}, k = {})\n\n", self.spec.id, self.spec.degree(), self.spec.k);
        if self.spec.analog_mesh() {
            s.push_str("Structured analog mesh.\n\n");
        }
        s.push_str("| n | mesh | N | total entries | nnz(A) | LU | AMD | ND | RCM | best |\n");
        s.push_str("|---|---|---|---|---|---|---|---|---|---|\n");
        for row in &self.rows {
            write!(s, "| {} | {} | {} | {} | {} |", row.n, row.mesh, row.dim, row.total_entries, row.nnz_a).unwrap();
            for r in &row.results {
                write!(s, " {} |", r.combined_nnz).unwrap();
            }
            writeln!(s, " {} |", row.best().method.name()).unwrap();
        }
        s.push_str("\nReduction factors (natural / ordered):\n\n| n | AMD | ND | RCM |\n|---|---|---|---|\n");
        for row in &self.rows {
            write!(s, "| {} |", row.n).unwrap();
            for r in &row.results[1..] {
                write!(s, " {:.2} |", r.reduction_factor).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn percent_markdown(&self) -> String {
        let mut s = format!("# Experiment {}: percentage of nonzero entries\n\n", self.spec.id);
        s.push_str("| n | nnz(A) | LU | AMD | ND | RCM |\n|---|---|---|---|---|---|\n");
        for row in &self.rows {
            write!(s, "| {} | {} % |", row.n, format_percent(row.percent(row.nnz_a))).unwrap();
            for r in &row.results {
                write!(s, " {} % |", format_percent(row.percent(r.combined_nnz))).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn meta_json(&self) -> String {
        let winners: serde_json::Map<String, serde_json::Value> = self
            .rows
            .iter()
            .map(|r| (r.n.to_string(), json!(r.best().method.name())))
            .collect();
        let meta = json!({
            "experiment": self.spec.id,
            "n": self.spec.n_values,
            "k": self.spec.k,
            "degree": self.spec.degree(),
            "nd_leaf": self.spec.leaf,
            "meshes": self.rows.iter().map(|r| r.mesh.clone()).collect::<Vec<_>>(),
            "analog_mesh": self.spec.analog_mesh(),
            "natural_fill_strictly_decreasing": self.natural_fill_strictly_decreasing(),
            "best_ordering": winners,
            "version": env!("CARGO_PKG_VERSION"),
        });
        serde_json::to_string_pretty(&meta).expect("serializable") + "\n"
    }
}

/// Percentages at or above 10 keep one decimal; smaller ones keep two
/// significant digits (`7.2`, `0.86`).
pub fn format_percent(p: f64) -> String {
    if p == 0.0 || !p.is_finite() {
        return format!("{p}");
    }
    if p >= 10.0 {
        return format!("{p:.1}");
    }
    let decimals = (1 - p.log10().floor() as i32).max(0) as usize;
    let s = format!("{p:.decimals$}");
    // rounding can carry into a new leading digit, e.g. 9.96 -> 10.0
    if s.parse::<f64>().is_ok_and(|v| v >= 10.0) {
        format!("{p:.1}")
    } else {
        s
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp: PathBuf = path.to_path_buf();
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid(format!("{} has no file name", path.display())))?;
    tmp.set_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Runs every n of the experiment. With `out_dir`, also writes the tables,
/// `meta.json` and the spy plots for the smallest n.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: Option<&Path>) -> Result<ExperimentReport> {
    spec.validate()?;
    let mut n_values = spec.n_values.clone();
    n_values.sort_unstable();
    n_values.dedup();
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }

    let mut rows = Vec::with_capacity(n_values.len());
    for (idx, &n) in n_values.iter().enumerate() {
        let a = spec.assemble(n)?;
        let results = evaluate_orderings(&a, &spec.methods())?;
        if idx == 0 {
            if let Some(dir) = out_dir {
                write_spy_plots(spec, &a, dir)?;
            }
        }
        rows.push(ExperimentRow {
            n,
            dim: a.dim(),
            total_entries: (a.dim() as u64).pow(2),
            nnz_a: a.nnz(),
            mesh: spec.recipe().describe(n),
            results,
        });
    }
    let report = ExperimentReport {
        spec: ExperimentSpec {
            n_values,
            ..spec.clone()
        },
        rows,
    };
    if let Some(dir) = out_dir {
        write_atomic(&dir.join("counts.csv"), report.counts_csv().as_bytes())?;
        write_atomic(&dir.join("percent.csv"), report.percent_csv().as_bytes())?;
        write_atomic(&dir.join("counts.md"), report.counts_markdown().as_bytes())?;
        write_atomic(&dir.join("percent.md"), report.percent_markdown().as_bytes())?;
        write_atomic(&dir.join("meta.json"), report.meta_json().as_bytes())?;
    }
    Ok(report)
}

fn write_spy_plots(spec: &ExperimentSpec, a: &SparseMatrix, dir: &Path) -> Result<()> {
    let g = pattern_graph(a);
    for method in spec.methods() {
        let perm = method.compute(&g)?;
        let pa = permute_symmetric(a, &perm)?;
        let lu = lu_numeric(&pa).map_err(|e| Error::Ordering {
            method: method.name().to_string(),
            source: Box::new(e),
        })?;
        let name = method.name();
        let label = name.to_uppercase();
        spy_svg(&pa.pattern(), &format!("A, {label} order"), &dir.join(format!("spy_A_{name}.svg")))?;
        spy_svg(&lu.combined_pattern(), &format!("L+U-I, {label} order"), &dir.join(format!("spy_LU_{name}.svg")))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percent_formatting() {
        let cases = [
            (7.2, "7.2"),
            (1620.0 / 22500.0 * 100.0, "7.2"),
            (6840.0 / 360000.0 * 100.0, "1.9"),
            (15660.0 / 1822500.0 * 100.0, "0.86"),
            (28080.0 / 5760000.0 * 100.0, "0.49"),
            (20.8, "20.8"),
            (10.225, "10.2"),
            (9.96, "10.0"),
            (0.0, "0"),
            (100.0, "100.0"),
        ];
        for (p, want) in cases {
            assert_eq!(format_percent(p), want, "{p}");
        }
    }

    #[test]
    fn spec_bindings() {
        assert!(ExperimentSpec::new(0).is_err());
        assert!(ExperimentSpec::new(6).is_err());
        assert!(ExperimentSpec::with_n(1, vec![]).is_err());
        let degrees: Vec<usize> = (1..=5).map(|id| ExperimentSpec::new(id).unwrap().degree()).collect();
        assert_eq!(degrees, vec![1, 1, 1, 1, 2]);
        let analog: Vec<bool> = (1..=5).map(|id| ExperimentSpec::new(id).unwrap().analog_mesh()).collect();
        assert_eq!(analog, vec![false, true, true, true, false]);
        assert_eq!(MeshRecipe::radial_layers(0.2, 2, 5), 2);
        assert_eq!(MeshRecipe::radial_layers(0.2, 2, 15), 3);
        assert_eq!(MeshRecipe::radial_layers(0.2, 2, 20), 4);
    }

    #[test]
    fn identity_ties_everywhere() {
        let ranked = compare_orderings(&SparseMatrix::identity(7)).unwrap();
        assert_eq!(ranked.len(), 4);
        for r in &ranked {
            assert_eq!(r.combined_nnz, 7);
            assert_eq!(r.reduction_factor, 1.0);
        }
        assert_eq!(ranked[0].method, OrderingMethod::Natural);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
