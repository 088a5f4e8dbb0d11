//! Interior-penalty DG discretization of the Helmholtz problem.
//!
//! The global matrix holds `A[i][j] = a_h(phi_j, phi_i)` for the broken
//! Lagrange basis, where
//!
//! ```text
//! a_h(u, v) = b_h(u, v) - k^2 (u, v) + i k <u, v>_R + i (J0 + J1 + L1)(u, v)
//! b_h(u, v) = sum_K (grad u, grad v)_K
//!           - sum_{e in I+D} ( <{du/dn}, [v]>_e + <[u], {dv/dn}>_e )
//! ```
//!
//! and the penalties act on jumps of values (`gamma0 / h_e`, interior and
//! Dirichlet edges), normal derivatives (`gamma1 h_e`, interior edges only)
//! and tangential derivatives (`beta1 / h_e`, interior and Dirichlet edges).
//! DOFs are numbered element by element: triangle `t` owns rows
//! `t * n_basis .. (t + 1) * n_basis`.

pub mod basis;
pub mod quadrature;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use self::basis::{AffineMap, ReferenceElement, MAX_BASIS};
use self::quadrature::{edge_quadrature, element_quadrature, SegmentRule, TriangleRule};
use crate::error::{Error, Result};
use crate::mesh::{EdgeKind, Mesh, Point2, MIN_TRIANGLE_AREA};
use crate::sparse::{SparseMatrix, Triplets};

/// Volume source `f(x)`.
pub type SourceFn = Arc<dyn Fn(Point2) -> Complex64 + Send + Sync>;
/// Boundary source `g(x, nu)` on the Robin boundary; receives the outward
/// unit normal.
pub type BoundarySourceFn = Arc<dyn Fn(Point2, [f64; 2]) -> Complex64 + Send + Sync>;

/// How the value-jump penalty `gamma0` is chosen on each edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma0Rule {
    /// `gamma0 = (k^2 h_e)^(2/3) * gamma1^(1/3)`.
    WaveScaled,
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyParams {
    pub gamma1: f64,
    pub beta1: f64,
    pub gamma0: Gamma0Rule,
}

impl Default for PenaltyParams {
    fn default() -> Self {
        PenaltyParams {
            gamma1: 0.1,
            beta1: 1.0,
            gamma0: Gamma0Rule::WaveScaled,
        }
    }
}

impl PenaltyParams {
    pub fn gamma0(&self, k: f64, h_e: f64) -> f64 {
        match self.gamma0 {
            Gamma0Rule::WaveScaled => (k * k * h_e).powf(2.0 / 3.0) * self.gamma1.cbrt(),
            Gamma0Rule::Constant(g) => g,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.gamma1) || !ok(self.beta1) {
            return Err(Error::invalid("penalty parameters must be positive and finite"));
        }
        if let Gamma0Rule::Constant(g) = self.gamma0 {
            if !ok(g) {
                return Err(Error::invalid("gamma0 must be positive and finite"));
            }
        }
        Ok(())
    }
}

/// Default penalties `(gamma0, gamma1, beta1)` for wave number `k` on an
/// edge of length `h_e`.
pub fn penalty_defaults(k: f64, h_e: f64) -> Result<(f64, f64, f64)> {
    if !(k > 0.0 && k.is_finite() && h_e > 0.0 && h_e.is_finite()) {
        return Err(Error::invalid("k and h_e must be positive and finite"));
    }
    let p = PenaltyParams::default();
    Ok((p.gamma0(k, h_e), p.gamma1, p.beta1))
}

#[derive(Clone)]
pub struct ProblemParams {
    /// Wave number.
    pub k: f64,
    /// Polynomial degree, 1 or 2.
    pub degree: usize,
    pub penalties: PenaltyParams,
    pub source: Option<SourceFn>,
    pub boundary_source: Option<BoundarySourceFn>,
    /// Exactness of the quadrature rules; `2p + 2` when unset.
    pub quadrature_degree: Option<usize>,
}

impl fmt::Debug for ProblemParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemParams")
            .field("k", &self.k)
            .field("degree", &self.degree)
            .field("penalties", &self.penalties)
            .field("source", &self.source.is_some())
            .field("boundary_source", &self.boundary_source.is_some())
            .field("quadrature_degree", &self.quadrature_degree)
            .finish()
    }
}

impl ProblemParams {
    pub fn new(k: f64, degree: usize) -> Result<Self> {
        let params = ProblemParams {
            k,
            degree,
            penalties: PenaltyParams::default(),
            source: None,
            boundary_source: None,
            quadrature_degree: None,
        };
        params.validate()?;
        Ok(params)
    }

    /// Sources for the incident plane wave `u = exp(i k d.x)`: `f = 0` and
    /// `g = du/dnu + i k u` on the outer boundary. `d` must be a unit vector.
    pub fn with_plane_wave(mut self, d: [f64; 2]) -> Self {
        let k = self.k;
        self.source = None;
        self.boundary_source = Some(Arc::new(move |x: Point2, nu: [f64; 2]| {
            let u = plane_wave(k, d, x);
            Complex64::new(0.0, k * (d[0] * nu[0] + d[1] * nu[1] + 1.0)) * u
        }));
        self
    }

    pub fn validate(&self) -> Result<()> {
        // k = 0 is allowed so the pure stiffness part can be assembled
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::invalid("k must be finite and non-negative"));
        }
        ReferenceElement::new(self.degree)?;
        self.penalties.validate()
    }

    fn quadrature_degree(&self) -> usize {
        self.quadrature_degree.unwrap_or(2 * self.degree + 2)
    }
}

/// `exp(i k d.x)`
pub fn plane_wave(k: f64, d: [f64; 2], x: Point2) -> Complex64 {
    Complex64::from_polar(1.0, k * (d[0] * x.x + d[1] * x.y))
}

/// The separately assemblable pieces of the form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    /// `sum_K (grad u, grad v)_K`
    Stiffness,
    /// The symmetric consistency terms of `b_h`.
    Consistency,
    /// `(u, v)_D`
    Mass,
    /// `<u, v>` on the Robin boundary.
    Robin,
    /// `J0`: value jumps.
    JumpValue,
    /// `J1`: normal-derivative jumps.
    JumpNormal,
    /// `L1`: tangential-derivative jumps.
    JumpTangential,
}

impl Term {
    pub const ALL: [Term; 7] = [
        Term::Stiffness,
        Term::Consistency,
        Term::Mass,
        Term::Robin,
        Term::JumpValue,
        Term::JumpNormal,
        Term::JumpTangential,
    ];
}

/// Coefficients of the pieces; the first three go into the real part, the
/// rest into the imaginary part.
#[derive(Debug, Clone, Copy, Default)]
struct Weights {
    stiffness: f64,
    consistency: f64,
    mass: f64,
    robin: f64,
    j0: f64,
    j1: f64,
    l1: f64,
}

impl Weights {
    fn full(k: f64) -> Self {
        Weights {
            stiffness: 1.0,
            consistency: 1.0,
            mass: -k * k,
            robin: k,
            j0: 1.0,
            j1: 1.0,
            l1: 1.0,
        }
    }

    fn single(term: Term) -> Self {
        let mut w = Weights::default();
        match term {
            Term::Stiffness => w.stiffness = 1.0,
            Term::Consistency => w.consistency = 1.0,
            Term::Mass => w.mass = 1.0,
            Term::Robin => w.robin = 1.0,
            Term::JumpValue => w.j0 = 1.0,
            Term::JumpNormal => w.j1 = 1.0,
            Term::JumpTangential => w.l1 = 1.0,
        }
        w
    }

    fn edge_terms(&self) -> bool {
        self.consistency != 0.0 || self.robin != 0.0 || self.j0 != 0.0 || self.j1 != 0.0 || self.l1 != 0.0
    }
}

/// Global DOF index of local basis function `local` on triangle `t`.
pub fn dof(t: usize, local: usize, n_basis: usize) -> usize {
    t * n_basis + local
}

/// Number of unknowns for a mesh and degree.
pub fn num_dofs(mesh: &Mesh, degree: usize) -> Result<usize> {
    Ok(mesh.num_triangles() * ReferenceElement::new(degree)?.n_basis())
}

/// Assembles the full complex system matrix. Every coupling between DOFs on
/// the same or edge-adjacent triangles is stored, including couplings whose
/// value happens to vanish.
pub fn assemble(mesh: &Mesh, params: &ProblemParams) -> Result<SparseMatrix> {
    Assembler::new(mesh, params)?.run(Weights::full(params.k), true)
}

/// Assembles one real piece of the form (returned with zero imaginary part);
/// exact zeros are dropped.
pub fn assemble_term(mesh: &Mesh, params: &ProblemParams, term: Term) -> Result<SparseMatrix> {
    let m = Assembler::new(mesh, params)?.run(Weights::single(term), false)?;
    Ok(match term {
        Term::Stiffness | Term::Consistency | Term::Mass => m,
        _ => m.scaled(Complex64::new(0.0, -1.0)),
    })
}

/// Load vector `b_i = (f, phi_i)_D + <g, phi_i>_R`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadVector {
    pub values: Vec<Complex64>,
    /// Set when neither `f` nor `g` was supplied; the vector is then zero.
    pub sources_missing: bool,
}

pub fn assemble_rhs(mesh: &Mesh, params: &ProblemParams) -> Result<LoadVector> {
    let asm = Assembler::new(mesh, params)?;
    let nb = asm.element.n_basis();
    let mut values = vec![Complex64::new(0.0, 0.0); mesh.num_triangles() * nb];
    let sources_missing = params.source.is_none() && params.boundary_source.is_none();

    if let Some(f) = &params.source {
        for (t, map) in asm.maps.iter().enumerate() {
            let jac = map.det();
            for (p, w) in asm.tri_rule.iter() {
                let fx = f(map.to_physical(*p)) * (w * jac);
                let phi = asm.element.values(*p);
                for i in 0..nb {
                    values[dof(t, i, nb)] += fx * phi[i];
                }
            }
        }
    }
    if let Some(g) = &params.boundary_source {
        for e in mesh.edges_of_kind(EdgeKind::Robin) {
            let [pa, pb] = e.vertices.map(|v| mesh.vertices[v]);
            let map = &asm.maps[e.owner];
            for (s, w) in asm.seg_rule.iter() {
                let x = Point2::new(pa.x + s * (pb.x - pa.x), pa.y + s * (pb.y - pa.y));
                let gx = g(x, e.normal) * (w * e.length);
                let phi = asm.element.values(map.to_reference(x));
                for i in 0..nb {
                    values[dof(e.owner, i, nb)] += gx * phi[i];
                }
            }
        }
    }
    Ok(LoadVector {
        values,
        sources_missing,
    })
}

struct Assembler<'a> {
    mesh: &'a Mesh,
    params: &'a ProblemParams,
    element: ReferenceElement,
    tri_rule: TriangleRule,
    seg_rule: SegmentRule,
    maps: Vec<AffineMap>,
}

/// Traces of the local basis of one adjacent triangle at an edge
/// quadrature point.
#[derive(Clone, Copy)]
struct Trace {
    value: [f64; MAX_BASIS],
    dn: [f64; MAX_BASIS],
    dt: [f64; MAX_BASIS],
}

impl<'a> Assembler<'a> {
    fn new(mesh: &'a Mesh, params: &'a ProblemParams) -> Result<Self> {
        params.validate()?;
        let element = ReferenceElement::new(params.degree)?;
        let q = params.quadrature_degree();
        let tri_rule = element_quadrature(q)?;
        let seg_rule = edge_quadrature(q)?;
        let mut maps = Vec::with_capacity(mesh.num_triangles());
        for t in 0..mesh.num_triangles() {
            let map = AffineMap::new(mesh.corners(t));
            let area = 0.5 * map.det();
            if area < MIN_TRIANGLE_AREA {
                return Err(Error::DegenerateTriangle { label: t, area });
            }
            maps.push(map);
        }
        Ok(Assembler {
            mesh,
            params,
            element,
            tri_rule,
            seg_rule,
            maps,
        })
    }

    fn run(&self, w: Weights, structural: bool) -> Result<SparseMatrix> {
        let nb = self.element.n_basis();
        let n = self.mesh.num_triangles() * nb;
        let mut out = Triplets::with_capacity(n, nb * nb * (self.mesh.num_triangles() + 4 * self.mesh.edges.len()));
        for t in 0..self.mesh.num_triangles() {
            self.add_volume(t, w, &mut out);
        }
        if w.edge_terms() {
            for e in 0..self.mesh.edges.len() {
                self.add_edge(e, w, &mut out)?;
            }
        }
        if structural {
            // analytically vanishing couplings still belong to the pattern
            out.compress_structural()
        } else {
            out.compress()
        }
    }

    fn add_volume(&self, t: usize, w: Weights, out: &mut Triplets) {
        let nb = self.element.n_basis();
        let map = &self.maps[t];
        let jac = map.det(); // twice the area; reference weights sum to 1/2
        let mut stiff = [[0.0; MAX_BASIS]; MAX_BASIS];
        let mut mass = [[0.0; MAX_BASIS]; MAX_BASIS];
        for (p, wq) in self.tri_rule.iter() {
            let wq = wq * jac;
            let phi = self.element.values(*p);
            let grad = self.element.gradients(*p).map(|g| map.gradient(g));
            for i in 0..nb {
                for j in i..nb {
                    stiff[i][j] += wq * (grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1]);
                    mass[i][j] += wq * phi[i] * phi[j];
                }
            }
        }
        for i in 0..nb {
            for j in i..nb {
                let v = Complex64::new(w.stiffness * stiff[i][j] + w.mass * mass[i][j], 0.0);
                out.push(dof(t, i, nb), dof(t, j, nb), v);
                if i != j {
                    out.push(dof(t, j, nb), dof(t, i, nb), v);
                }
            }
        }
    }

    fn trace(&self, t: usize, x: Point2, normal: [f64; 2], tangent: [f64; 2]) -> Trace {
        let map = &self.maps[t];
        let r = map.to_reference(x);
        let value = self.element.values(r);
        let grads = self.element.gradients(r);
        let mut dn = [0.0; MAX_BASIS];
        let mut dt = [0.0; MAX_BASIS];
        for i in 0..self.element.n_basis() {
            let g = map.gradient(grads[i]);
            dn[i] = g[0] * normal[0] + g[1] * normal[1];
            dt[i] = g[0] * tangent[0] + g[1] * tangent[1];
        }
        Trace { value, dn, dt }
    }

    fn add_edge(&self, e: usize, w: Weights, out: &mut Triplets) -> Result<()> {
        let edge = &self.mesh.edges[e];
        let nb = self.element.n_basis();
        let h = edge.length;
        let interior = edge.kind == EdgeKind::Interior;
        let robin = edge.kind == EdgeKind::Robin;
        let k = self.params.k;

        let (gamma0, gamma1, beta1) = if robin {
            (0.0, 0.0, 0.0)
        } else {
            let p = &self.params.penalties;
            let g0 = p.gamma0(k, h);
            if !(g0 > 0.0 && g0.is_finite()) {
                return Err(Error::invalid(format!(
                    "gamma0 = {g0} on edge {:?} is not positive (k = {k})",
                    edge.vertices
                )));
            }
            (g0, p.gamma1, p.beta1)
        };
        let c0 = w.j0 * gamma0 / h;
        let c1 = if interior { w.j1 * gamma1 * h } else { 0.0 };
        let cl = w.l1 * beta1 / h;
        let cons = if robin { 0.0 } else { w.consistency };
        let cr = if robin { w.robin } else { 0.0 };
        // boundary averages are one-sided traces
        let avg = if interior { 0.5 } else { 1.0 };

        let sides: Vec<(usize, f64)> = match edge.neighbor {
            Some(nbr) => vec![(edge.owner, 1.0), (nbr, -1.0)],
            None => vec![(edge.owner, 1.0)],
        };

        // blocks[(row side, col side)]: (0,0), (0,1), (1,1)
        let mut re = [[[0.0; MAX_BASIS]; MAX_BASIS]; 3];
        let mut im = [[[0.0; MAX_BASIS]; MAX_BASIS]; 3];
        let block_sides: &[(usize, usize)] = if sides.len() == 2 {
            &[(0, 0), (0, 1), (1, 1)]
        } else {
            &[(0, 0)]
        };

        let [pa, pb] = edge.vertices.map(|v| self.mesh.vertices[v]);
        for (s, wq) in self.seg_rule.iter() {
            let wq = wq * h;
            let x = Point2::new(pa.x + s * (pb.x - pa.x), pa.y + s * (pb.y - pa.y));
            let traces: Vec<Trace> = sides
                .iter()
                .map(|&(t, _)| self.trace(t, x, edge.normal, edge.tangent))
                .collect();
            for (b, &(rs, cs)) in block_sides.iter().enumerate() {
                let (tr, sr) = (&traces[rs], sides[rs].1);
                let (tc, sc) = (&traces[cs], sides[cs].1);
                for i in 0..nb {
                    let j0 = if rs == cs { i } else { 0 };
                    for j in j0..nb {
                        // row = test function (rs, i), column = trial (cs, j)
                        let jump_v = (sr * tr.value[i]) * (sc * tc.value[j]);
                        let consistency = (avg * tc.dn[j]) * (sr * tr.value[i])
                            + (sc * tc.value[j]) * (avg * tr.dn[i]);
                        let jump_n = (sr * tr.dn[i]) * (sc * tc.dn[j]);
                        let jump_t = (sr * tr.dt[i]) * (sc * tc.dt[j]);
                        re[b][i][j] -= wq * cons * consistency;
                        im[b][i][j] += wq
                            * (c0 * jump_v + c1 * jump_n + cl * jump_t + cr * tr.value[i] * tc.value[j]);
                    }
                }
            }
        }

        for (b, &(rs, cs)) in block_sides.iter().enumerate() {
            let (rt, ct) = (sides[rs].0, sides[cs].0);
            for i in 0..nb {
                let j0 = if rs == cs { i } else { 0 };
                for j in j0..nb {
                    let v = Complex64::new(re[b][i][j], im[b][i][j]);
                    let (r, c) = (dof(rt, i, nb), dof(ct, j, nb));
                    out.push(r, c, v);
                    if r != c {
                        out.push(c, r, v);
                    }
                }
            }
        }
        Ok(())
    }
}
