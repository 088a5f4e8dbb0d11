//! `helmdg` command-line front end: build meshes, assemble IP-DG Helmholtz
//! matrices, reorder them, factor them and run the fill-in experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use helmdg::assembly::{assemble, ProblemParams};
use helmdg::lufact::{fill_report, lu_numeric};
use helmdg::mesh::{build_annulus_square, build_graded_square, build_uniform_square, Mesh};
use helmdg::ordering::{OrderingMethod, DEFAULT_LEAF};
use helmdg::report::{format_percent, run_experiment, write_atomic, ExperimentSpec, MeshRecipe, DEFAULT_K, DEFAULT_N};
use helmdg::sparse::{pattern_graph, permute_symmetric, read_matrix_market, spy_svg, write_matrix_market, Permutation};

#[derive(Parser)]
#[command(name = "helmdg", version, about = "IP-DG Helmholtz sparsity and fill-in toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Uniform,
    Graded,
    Annulus,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Robin data of the plane wave travelling along +x.
    Planewave,
}

#[derive(Subcommand)]
enum Command {
    /// Build a mesh and write it in the helmdg-mesh text format.
    Mesh {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Horizontal refinement factor of the graded square.
        #[arg(long, default_value_t = 10)]
        factor: usize,
        /// Outer-to-inner radial width ratio of the annulus.
        #[arg(long, default_value_t = 1.0)]
        grading: f64,
        /// Radial layers of the annulus (default max(2, round(0.2 n))).
        #[arg(long)]
        layers: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Assemble the system matrix of a mesh into a MatrixMarket file.
    Assemble {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        p: u8,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: f64,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render the sparsity pattern of a matrix as SVG.
    Spy {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply a symmetric permutation to a matrix.
    Permute {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        perm: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute a fill-reducing ordering of a matrix pattern.
    Order {
        #[arg(long = "in")]
        input: PathBuf,
        /// amd, nd, rcm or natural.
        #[arg(long)]
        method: OrderingMethod,
        /// Nested-dissection leaf size.
        #[arg(long, default_value_t = DEFAULT_LEAF)]
        leaf: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Factor a matrix (optionally permuted) and report its fill.
    Lu {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        perm: Option<PathBuf>,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        spy: Option<PathBuf>,
    },
    /// Run one of the five fill-in experiments.
    Experiment {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        id: u8,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_N)]
        n: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn build_mesh(family: Family, n: usize, factor: usize, grading: f64, layers: Option<usize>) -> Result<Mesh> {
    let mesh = match family {
        Family::Uniform => build_uniform_square(n)?,
        Family::Graded => build_graded_square(n, factor)?,
        Family::Annulus => {
            let layers = layers.unwrap_or_else(|| MeshRecipe::radial_layers(0.2, 2, n));
            build_annulus_square(4 * n, layers, grading)?
        }
    };
    Ok(mesh)
}

fn read_perm(path: &Path, dim: usize) -> Result<Permutation> {
    let p = Permutation::read(path)?;
    if p.len() != dim {
        bail!("permutation in {} has length {}, matrix has dimension {dim}", path.display(), p.len());
    }
    Ok(p)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Mesh {
            family,
            n,
            factor,
            grading,
            layers,
            out,
        } => {
            let mesh = build_mesh(family, n, factor, grading, layers)?;
            mesh.write(&out)?;
            println!("{} triangles -> {}", mesh.num_triangles(), out.display());
        }
        Command::Assemble {
            mesh,
            p,
            k,
            preset,
            out,
        } => {
            let m = Mesh::read(&mesh)?;
            let mut params = ProblemParams::new(k, p as usize)?;
            if let Some(Preset::Planewave) = preset {
                params = params.with_plane_wave([1.0, 0.0]);
            }
            let a = assemble(&m, &params)?;
            write_matrix_market(&a, &out)?;
            println!("N = {}, nnz = {} -> {}", a.dim(), a.nnz(), out.display());
        }
        Command::Spy { input, out } => {
            let a = read_matrix_market(&input)?;
            let title = format!("nnz = {}", a.nnz());
            spy_svg(&a.pattern(), &title, &out)?;
        }
        Command::Permute { input, perm, out } => {
            let a = read_matrix_market(&input)?;
            let p = read_perm(&perm, a.dim())?;
            write_matrix_market(&permute_symmetric(&a, &p)?, &out)?;
        }
        Command::Order {
            input,
            method,
            leaf,
            out,
        } => {
            let method = match method {
                OrderingMethod::NestedDissection { .. } => OrderingMethod::NestedDissection { leaf },
                m => m,
            };
            let a = read_matrix_market(&input)?;
            let p = method.compute(&pattern_graph(&a))?;
            p.write(&out)?;
        }
        Command::Lu {
            input,
            perm,
            report,
            spy,
        } => {
            let mut a = read_matrix_market(&input)?;
            if let Some(path) = perm {
                let p = read_perm(&path, a.dim())?;
                a = permute_symmetric(&a, &p)?;
            }
            let factors = lu_numeric(&a)?;
            let r = fill_report(&a, &factors);
            let csv = format!(
                "N,total_entries,nnz_A,nnz_LU,fill_percent\n{},{},{},{},{}\n",
                r.dim,
                r.total_entries,
                r.input_nnz,
                r.factor_nnz,
                format_percent(r.fill_percent)
            );
            write_atomic(&report, csv.as_bytes())?;
            if let Some(path) = spy {
                let title = format!("L+U, nnz = {}", r.factor_nnz);
                spy_svg(&factors.combined_pattern(), &title, &path)?;
            }
            println!("nnz(L+U) = {} ({}%)", r.factor_nnz, format_percent(r.fill_percent));
        }
        Command::Experiment { id, n, k, out } => {
            let mut spec = ExperimentSpec::with_n(id, n)?;
            spec.k = k;
            let report = run_experiment(&spec, Some(&out)).with_context(|| format!("experiment {id}"))?;
            print!("{}", report.counts_markdown());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
