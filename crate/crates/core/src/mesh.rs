//! Triangular partitions of the scattering domain and their edge sets.
//!
//! Every mesh carries its triangles in a fixed global enumeration (the
//! `label`), and every edge knows which adjacent triangle its normal points
//! out of. On interior edges that is the triangle with the larger label, so
//! the jump of a broken function is always `v|owner - v|neighbor`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Triangles with a smaller area than this are rejected as degenerate.
pub const MIN_TRIANGLE_AREA: f64 = 1e-14;

/// Radius of the circular scatterer, `x^2 + y^2 <= 1/5`.
pub fn scatterer_radius() -> f64 {
    (0.2f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dist(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    /// Counter-clockwise vertex indices.
    pub vertices: [usize; 3],
    /// Position in the element enumeration.
    pub label: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Interior,
    /// On the absorbing outer boundary.
    Robin,
    /// On the sound-soft scatterer.
    Dirichlet,
}

impl EdgeKind {
    fn code(self) -> char {
        match self {
            EdgeKind::Interior => 'I',
            EdgeKind::Robin => 'R',
            EdgeKind::Dirichlet => 'D',
        }
    }

    fn from_code(s: &str) -> Option<Self> {
        match s {
            "I" => Some(EdgeKind::Interior),
            "R" => Some(EdgeKind::Robin),
            "D" => Some(EdgeKind::Dirichlet),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints, smaller index first.
    pub vertices: [usize; 2],
    pub kind: EdgeKind,
    /// Triangle the normal points out of: the larger label of an interior
    /// edge, the only adjacent triangle of a boundary edge.
    pub owner: usize,
    /// Lower-labelled triangle of an interior edge.
    pub neighbor: Option<usize>,
    pub normal: [f64; 2],
    /// The normal rotated by +90 degrees.
    pub tangent: [f64; 2],
    pub length: f64,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.kind != EdgeKind::Interior
    }

    /// Member of the interior-or-Dirichlet set that carries the consistency
    /// and penalty terms.
    pub fn is_interior_or_dirichlet(&self) -> bool {
        matches!(self.kind, EdgeKind::Interior | EdgeKind::Dirichlet)
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point2>,
    pub triangles: Vec<Triangle>,
    pub edges: Vec<Edge>,
    /// Largest triangle diameter.
    pub h: f64,
}

impl Mesh {
    /// Builds a mesh from raw connectivity. Triangles are labelled in the
    /// order given and must be counter-clockwise; `boundary_kind` decides
    /// the kind of every edge that has a single adjacent triangle.
    pub fn from_parts<F>(
        vertices: Vec<Point2>,
        triangles: Vec<[usize; 3]>,
        boundary_kind: F,
    ) -> Result<Mesh>
    where
        F: Fn(usize, usize) -> EdgeKind,
    {
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::invalid("vertex coordinates must be finite"));
        }
        let triangles: Vec<Triangle> = triangles
            .into_iter()
            .enumerate()
            .map(|(label, vertices)| Triangle { vertices, label })
            .collect();
        for t in &triangles {
            if t.vertices.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::invalid(format!(
                    "triangle {} references a missing vertex",
                    t.label
                )));
            }
            let area = signed_area(&vertices, &t.vertices);
            if area < MIN_TRIANGLE_AREA {
                return Err(Error::DegenerateTriangle {
                    label: t.label,
                    area,
                });
            }
        }
        let edges = classify_edges(&vertices, &triangles, boundary_kind)?;
        let h = triangles
            .iter()
            .map(|t| triangle_diameter(&vertices, &t.vertices))
            .fold(0.0, f64::max);
        Ok(Mesh {
            vertices,
            triangles,
            edges,
            h,
        })
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn count_edges(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn edges_of_kind(&self, kind: EdgeKind) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    /// Interior and Dirichlet edges together.
    pub fn interior_or_dirichlet_edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(|e| e.is_interior_or_dirichlet())
    }

    pub fn corners(&self, t: usize) -> [Point2; 3] {
        self.triangles[t].vertices.map(|v| self.vertices[v])
    }

    pub fn area(&self, t: usize) -> f64 {
        signed_area(&self.vertices, &self.triangles[t].vertices)
    }

    pub fn centroid(&self, t: usize) -> Point2 {
        centroid(&self.vertices, &self.triangles[t].vertices)
    }

    /// `V - E + T`, which equals `1 - holes` for a connected planar mesh.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Writes the plain-text `helmdg-mesh v1` format.
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("helmdg-mesh v1\n");
        let _ = writeln!(
            s,
            "{} {} {}",
            self.vertices.len(),
            self.triangles.len(),
            self.edges.len()
        );
        s.push_str("vertices\n");
        for p in &self.vertices {
            let _ = writeln!(s, "{:e} {:e}", p.x, p.y);
        }
        s.push_str("triangles\n");
        for t in &self.triangles {
            let [a, b, c] = t.vertices;
            let _ = writeln!(s, "{a} {b} {c}");
        }
        s.push_str("edges\n");
        for e in &self.edges {
            let neighbor = e.neighbor.map_or(-1, |n| n as i64);
            let _ = writeln!(
                s,
                "{} {} {} {} {}",
                e.vertices[0],
                e.vertices[1],
                e.kind.code(),
                e.owner,
                neighbor
            );
        }
        s
    }

    pub fn read(path: &Path) -> Result<Mesh> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Mesh::parse(&text).map_err(|(line, msg)| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        })
    }

    /// Parses the text format. Normals, tangents and lengths are recomputed
    /// from the geometry; only the boundary kinds are taken from the file.
    pub fn parse(text: &str) -> std::result::Result<Mesh, (usize, String)> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| (0, format!("unexpected end of file, expected {what}")))
        };

        let (ln, header) = next("header")?;
        if header != "helmdg-mesh v1" {
            return Err((ln, format!("bad header {header:?}")));
        }
        let (ln, counts) = next("counts")?;
        let counts: Vec<usize> = parse_fields(ln, counts)?;
        let [nv, nt, ne] = counts[..] else {
            return Err((ln, "expected three counts".into()));
        };

        expect_section(next("vertices")?, "vertices")?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = next("vertex")?;
            let xy: Vec<f64> = parse_fields(ln, l)?;
            let [x, y] = xy[..] else {
                return Err((ln, "expected two coordinates".into()));
            };
            vertices.push(Point2::new(x, y));
        }

        expect_section(next("triangles")?, "triangles")?;
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (ln, l) = next("triangle")?;
            let ids: Vec<usize> = parse_fields(ln, l)?;
            let [a, b, c] = ids[..] else {
                return Err((ln, "expected three vertex indices".into()));
            };
            triangles.push([a, b, c]);
        }

        expect_section(next("edges")?, "edges")?;
        let mut kinds = BTreeMap::new();
        for _ in 0..ne {
            let (ln, l) = next("edge")?;
            let fields: Vec<&str> = l.split_whitespace().collect();
            if fields.len() != 5 {
                return Err((ln, "expected five edge fields".into()));
            }
            let a: usize = fields[0].parse().map_err(|_| (ln, "bad vertex index".to_string()))?;
            let b: usize = fields[1].parse().map_err(|_| (ln, "bad vertex index".to_string()))?;
            let kind = EdgeKind::from_code(fields[2])
                .ok_or_else(|| (ln, format!("bad edge kind {:?}", fields[2])))?;
            kinds.insert((a.min(b), a.max(b)), kind);
        }

        let mesh = Mesh::from_parts(vertices, triangles, |a, b| {
            kinds
                .get(&(a.min(b), a.max(b)))
                .copied()
                .unwrap_or(EdgeKind::Robin)
        })
        .map_err(|e| (0, e.to_string()))?;
        if mesh.edges.len() != ne {
            return Err((0, format!("edge count {} does not match header {ne}", mesh.edges.len())));
        }
        for e in &mesh.edges {
            if kinds.get(&(e.vertices[0], e.vertices[1])) != Some(&e.kind) {
                return Err((0, format!("edge {:?} kind disagrees with topology", e.vertices)));
            }
        }
        Ok(mesh)
    }
}

fn parse_fields<T: std::str::FromStr>(
    ln: usize,
    line: &str,
) -> std::result::Result<Vec<T>, (usize, String)> {
    line.split_whitespace()
        .map(|f| f.parse().map_err(|_| (ln, format!("bad field {f:?}"))))
        .collect()
}

fn expect_section(
    (ln, line): (usize, &str),
    name: &str,
) -> std::result::Result<(), (usize, String)> {
    if line == name {
        Ok(())
    } else {
        Err((ln, format!("expected section {name:?}, found {line:?}")))
    }
}

pub(crate) fn signed_area(vertices: &[Point2], tri: &[usize; 3]) -> f64 {
    let [a, b, c] = tri.map(|v| vertices[v]);
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}

fn centroid(vertices: &[Point2], tri: &[usize; 3]) -> Point2 {
    let [a, b, c] = tri.map(|v| vertices[v]);
    Point2::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
}

fn triangle_diameter(vertices: &[Point2], tri: &[usize; 3]) -> f64 {
    let [a, b, c] = tri.map(|v| vertices[v]);
    a.dist(&b).max(b.dist(&c)).max(c.dist(&a))
}

/// Collects the edges of a triangulation, classifies them and fixes their
/// orientation. Edges are returned sorted by their endpoint pair.
pub fn classify_edges<F>(
    vertices: &[Point2],
    triangles: &[Triangle],
    boundary_kind: F,
) -> Result<Vec<Edge>>
where
    F: Fn(usize, usize) -> EdgeKind,
{
    let mut incidence: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for t in triangles {
        let v = t.vertices;
        for k in 0..3 {
            let (a, b) = (v[k], v[(k + 1) % 3]);
            incidence.entry((a.min(b), a.max(b))).or_default().push(t.label);
        }
    }

    let mut edges = Vec::with_capacity(incidence.len());
    for ((a, b), adjacent) in incidence {
        let (kind, owner, neighbor) = match adjacent[..] {
            [t] => {
                let kind = boundary_kind(a, b);
                if kind == EdgeKind::Interior {
                    return Err(Error::invalid(format!(
                        "boundary edge ({a}, {b}) classified as interior"
                    )));
                }
                (kind, t, None)
            }
            [s, t] => {
                let shares = |label: usize| {
                    let tv = &triangles[label].vertices;
                    tv.contains(&a) && tv.contains(&b)
                };
                debug_assert!(shares(s) && shares(t));
                (EdgeKind::Interior, s.max(t), Some(s.min(t)))
            }
            _ => return Err(Error::NonManifoldEdge(a, b, adjacent.len())),
        };

        let (pa, pb) = (vertices[a], vertices[b]);
        let length = pa.dist(&pb);
        let (tx, ty) = ((pb.x - pa.x) / length, (pb.y - pa.y) / length);
        let mut normal = [ty, -tx];
        let c = centroid(vertices, &triangles[owner].vertices);
        let mid = Point2::new(0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y));
        if normal[0] * (mid.x - c.x) + normal[1] * (mid.y - c.y) < 0.0 {
            normal = [-normal[0], -normal[1]];
        }
        let tangent = [-normal[1], normal[0]];
        edges.push(Edge {
            vertices: [a, b],
            kind,
            owner,
            neighbor,
            normal,
            tangent,
            length,
        });
    }
    Ok(edges)
}

/// Uniform triangulation of `[-0.5, 0.5]^2` with `n` intervals per side.
///
/// Squares are enumerated row by row (x fastest); each square is cut by its
/// lower-left to upper-right diagonal into a lower triangle (labelled
/// first) and an upper triangle. All boundary edges are Robin edges.
pub fn build_uniform_square(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    structured_rectangle(n, n)
}

/// Anisotropic analog of the uniform square: `nx_factor * n` intervals
/// horizontally and `n` vertically, same diagonal and enumeration.
pub fn build_graded_square(n: usize, nx_factor: usize) -> Result<Mesh> {
    if n == 0 || nx_factor == 0 {
        return Err(Error::invalid("n and nx_factor must be at least 1"));
    }
    structured_rectangle(nx_factor * n, n)
}

fn structured_rectangle(nx: usize, ny: usize) -> Result<Mesh> {
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(Point2::new(
                -0.5 + i as f64 / nx as f64,
                -0.5 + j as f64 / ny as f64,
            ));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v01, v11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    Mesh::from_parts(vertices, triangles, |_, _| EdgeKind::Robin)
}

/// Ring mesh between the scatterer circle (Dirichlet) and the square outer
/// boundary (Robin).
///
/// Vertex `(i, j)` sits on angular line `i` and radial layer `j`, obtained by
/// linear interpolation between the circle point at angle
/// `pi/4 + 2 pi i / n_tangential` and the point at the same fraction of the
/// square's perimeter (starting from the corner `(0.5, 0.5)`). Radial layer
/// widths grow geometrically from the circle outward so that the outermost
/// layer is `grading` times as wide as the innermost one. Cells are
/// enumerated layer by layer, angular index fastest, lower triangle first.
pub fn build_annulus_square(n_tangential: usize, n_radial: usize, grading: f64) -> Result<Mesh> {
    if n_tangential < 8 {
        return Err(Error::invalid("n_tangential must be at least 8"));
    }
    if n_radial == 0 {
        return Err(Error::invalid("n_radial must be at least 1"));
    }
    if !grading.is_finite() || grading < 1.0 {
        return Err(Error::invalid("grading must be finite and at least 1"));
    }

    let fractions = radial_fractions(n_radial, grading);
    let radius = scatterer_radius();
    let nt = n_tangential;
    let mut vertices = Vec::with_capacity(nt * (n_radial + 1));
    for &t in &fractions {
        for i in 0..nt {
            let theta = std::f64::consts::FRAC_PI_4 + std::f64::consts::TAU * i as f64 / nt as f64;
            let inner = Point2::new(radius * theta.cos(), radius * theta.sin());
            let outer = square_perimeter_point(4.0 * i as f64 / nt as f64);
            vertices.push(Point2::new(
                (1.0 - t) * inner.x + t * outer.x,
                (1.0 - t) * inner.y + t * outer.y,
            ));
        }
    }

    let id = |i: usize, j: usize| j * nt + (i % nt);
    let mut triangles = Vec::with_capacity(2 * nt * n_radial);
    for j in 0..n_radial {
        for i in 0..nt {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            for mut tri in [[a, b, c], [a, c, d]] {
                if signed_area(&vertices, &tri) < 0.0 {
                    tri.swap(1, 2);
                }
                triangles.push(tri);
            }
        }
    }
    Mesh::from_parts(vertices, triangles, |a, b| {
        if a < nt && b < nt {
            EdgeKind::Dirichlet
        } else {
            EdgeKind::Robin
        }
    })
}

/// Cumulative radial positions in `[0, 1]` of the `n_radial + 1` layer
/// boundaries.
pub fn radial_fractions(n_radial: usize, grading: f64) -> Vec<f64> {
    let ratio = if n_radial > 1 {
        grading.powf(1.0 / (n_radial - 1) as f64)
    } else {
        1.0
    };
    let widths: Vec<f64> = (0..n_radial).map(|m| ratio.powi(m as i32)).collect();
    let total: f64 = widths.iter().sum();
    let mut fractions = Vec::with_capacity(n_radial + 1);
    let mut acc = 0.0;
    fractions.push(0.0);
    for w in &widths[..n_radial - 1] {
        acc += w;
        fractions.push(acc / total);
    }
    fractions.push(1.0);
    fractions
}

/// Point at arclength `s` in `[0, 4)` along the boundary of the unit
/// square, counter-clockwise from the corner `(0.5, 0.5)`.
fn square_perimeter_point(s: f64) -> Point2 {
    let side = (s.floor() as usize).min(3);
    let t = s - side as f64;
    match side {
        0 => Point2::new(0.5 - t, 0.5),
        1 => Point2::new(-0.5, 0.5 - t),
        2 => Point2::new(-0.5 + t, -0.5),
        _ => Point2::new(0.5, -0.5 + t),
    }
}
