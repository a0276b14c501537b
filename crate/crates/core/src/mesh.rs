//! Sampling of the punctured torus, triangulated meshes of the immersion,
//! symmetry completion, OBJ/PLY export, and the degree of the Gauss map.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptic::{EvaluationConfig, SquareLattice};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::symmetry::{apply, det, dihedral_group, Mat3};
use crate::weierstrass::{FamilyKind, ImmersionPoint, Surface, SurfaceFamily};

pub const MIN_RESOLUTION: usize = 8;
pub const DEFAULT_CUTOFF: f64 = 0.04;
pub const DEFAULT_CLIP: f64 = 50.0;
pub const WELD_TOLERANCE: f64 = 1e-7;

/// Part of the torus to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// The whole fundamental domain `[0,1) x [0,1)`.
    #[default]
    Torus,
    /// The triangle `1/2 <= x <= 1, 1/2 <= y <= x`, one eighth of the torus
    /// and a fundamental piece for the symmetry group of the three-end
    /// surface.
    SymmetryPiece,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    /// Grid subdivisions per unit length. Must be even so the half periods
    /// are grid nodes.
    pub resolution: usize,
    pub puncture_cutoff: f64,
    pub clip_norm: f64,
    #[serde(default)]
    pub region: Region,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            resolution: 100,
            puncture_cutoff: DEFAULT_CUTOFF,
            clip_norm: DEFAULT_CLIP,
            region: Region::Torus,
        }
    }
}

impl SamplingPlan {
    pub fn new(resolution: usize, puncture_cutoff: f64) -> Self {
        Self {
            resolution,
            puncture_cutoff,
            ..Self::default()
        }
    }

    pub fn validate(&self, config: &EvaluationConfig) -> Result<()> {
        if self.resolution < MIN_RESOLUTION {
            return Err(Error::InvalidConfig(format!(
                "resolution {} is below the minimum {MIN_RESOLUTION}",
                self.resolution
            )));
        }
        if !self.resolution.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "resolution {} is odd; the half periods must be grid nodes",
                self.resolution
            )));
        }
        if !(self.puncture_cutoff >= config.pole_exclusion_radius && self.puncture_cutoff.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "puncture cutoff {} is below the pole exclusion radius {}",
                self.puncture_cutoff, config.pole_exclusion_radius
            )));
        }
        if !(self.clip_norm > 0.0) {
            return Err(Error::InvalidConfig(format!("clip norm {} must be positive", self.clip_norm)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.resolution as f64
    }
}

/// Grid node `(i, j) <-> z = (i + j i) / resolution`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    i: usize,
    j: usize,
}

impl Node {
    fn z(self, n: usize) -> Complex64 {
        Complex64::new(self.i as f64 / n as f64, self.j as f64 / n as f64)
    }
}

/// Nodes of the region in row-major order, with their quadrature weights
/// relative to `h^2`.
fn region_nodes(plan: &SamplingPlan) -> Vec<(Node, f64)> {
    let n = plan.resolution;
    match plan.region {
        Region::Torus => (0..n)
            .flat_map(|j| (0..n).map(move |i| (Node { i, j }, 1.0)))
            .collect(),
        Region::SymmetryPiece => {
            let m = n / 2;
            let mut out = Vec::new();
            for j in m..=n {
                for i in j.max(m)..=n {
                    let on_bottom = j == m;
                    let on_right = i == n;
                    let on_diagonal = i == j;
                    let weight = match (on_bottom, on_right, on_diagonal) {
                        // w2: the interior angle is pi/4
                        (true, _, true) => 0.125,
                        // (1, 1/2): right angle
                        (true, true, false) => 0.25,
                        // (1, 1): pi/4, a puncture of every family anyway
                        (false, true, true) => 0.125,
                        (true, false, false) | (false, true, false) | (false, false, true) => 0.5,
                        _ => 1.0,
                    };
                    out.push((Node { i, j }, weight));
                }
            }
            out
        }
    }
}

/// Grid points of the region outside every puncture cutoff disk, in
/// row-major order.
pub fn sample_domain(plan: &SamplingPlan, family: &SurfaceFamily) -> Result<Vec<Complex64>> {
    let n = plan.resolution;
    let points: Vec<Complex64> = region_nodes(plan)
        .into_iter()
        .map(|(node, _)| node.z(n))
        .filter(|&z| family.puncture_distance(z) >= plan.puncture_cutoff)
        .collect();
    if points.is_empty() {
        return Err(Error::EmptySampling);
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub family: FamilyKind,
    pub plan: SamplingPlan,
    pub vertices: Vec<ImmersionPoint>,
    pub faces: Vec<[usize; 3]>,
    /// `∫ K dA` over the sampled region minus the cutoff disks, by the grid
    /// rule `Σ K λ² h²` over every sample including clipped ones. `None`
    /// after symmetry completion.
    pub curvature_integral: Option<f64>,
    /// Samples dropped for exceeding the clip norm.
    pub clipped: usize,
}

impl SurfaceMesh {
    pub fn total_curvature(&self) -> Option<f64> {
        self.curvature_integral
    }

    pub fn positions(&self) -> Vec<[f64; 3]> {
        self.vertices.iter().map(|v| v.x).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for f in &self.faces {
            if f.iter().any(|&k| k >= n) || f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::InvalidConfig(format!("invalid face {f:?} for {n} vertices")));
            }
        }
        Ok(())
    }
}

/// Splits the cell with lower-left node `(i, j)` along the diagonal through
/// `(i, j)` when `i + j` is even and along the other diagonal otherwise.
/// The resulting pattern is invariant under the quarter turn and the
/// reflections about `(1+i)/2`.
fn cell_triangles(i: usize, j: usize, ip: usize, jp: usize) -> [[Node; 3]; 2] {
    let a = Node { i, j };
    let b = Node { i: ip, j };
    let c = Node { i: ip, j: jp };
    let d = Node { i, j: jp };
    if (i + j).is_multiple_of(2) {
        [[a, b, c], [a, c, d]]
    } else {
        [[a, b, d], [b, c, d]]
    }
}

/// Evaluates the immersion on the sampled grid and triangulates the
/// surviving cells.
pub fn build_mesh(plan: &SamplingPlan, surface: &Surface) -> Result<SurfaceMesh> {
    plan.validate(surface.lattice().config())?;
    let n = plan.resolution;
    let h2 = plan.spacing() * plan.spacing();
    let family = surface.family();
    let candidates: Vec<(Node, f64)> = region_nodes(plan)
        .into_iter()
        .filter(|(node, _)| family.puncture_distance(node.z(n)) >= plan.puncture_cutoff)
        .collect();
    if candidates.is_empty() {
        return Err(Error::EmptySampling);
    }
    let evaluated: Vec<ImmersionPoint> = candidates
        .par_iter()
        .map(|(node, _)| surface.immersion_closed(node.z(n)))
        .collect::<Result<_>>()?;

    let mut index = HashMap::new();
    let mut vertices = Vec::new();
    let mut curvature_integral = 0.0;
    let mut clipped = 0;
    for ((node, w), p) in candidates.iter().zip(evaluated) {
        curvature_integral += p.curvature * p.conformal_factor * p.conformal_factor * w * h2;
        let norm = p.x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= plan.clip_norm {
            index.insert(*node, vertices.len());
            vertices.push(p);
        } else {
            clipped += 1;
        }
    }

    let mut faces = Vec::new();
    let lookup = |t: &[Node; 3]| -> Option<[usize; 3]> {
        Some([*index.get(&t[0])?, *index.get(&t[1])?, *index.get(&t[2])?])
    };
    match plan.region {
        Region::Torus => {
            for j in 0..n {
                for i in 0..n {
                    let tris = cell_triangles(i, j, (i + 1) % n, (j + 1) % n);
                    if let (Some(f0), Some(f1)) = (lookup(&tris[0]), lookup(&tris[1])) {
                        faces.push(f0);
                        faces.push(f1);
                    }
                }
            }
        }
        Region::SymmetryPiece => {
            for j in n / 2..n {
                for i in j..n {
                    for t in cell_triangles(i, j, i + 1, j + 1) {
                        if let Some(f) = lookup(&t) {
                            faces.push(f);
                        }
                    }
                }
            }
        }
    }

    Ok(SurfaceMesh {
        family: family.kind,
        plan: *plan,
        vertices,
        faces,
        curvature_integral: Some(curvature_integral),
        clipped,
    })
}

/// Unit normal from the Gauss map by inverse stereographic projection.
fn normal_from_gauss(g: Option<Complex64>) -> [f64; 3] {
    match g {
        None => [0.0, 0.0, 1.0],
        Some(g) => {
            let s = g.norm_sqr();
            [2.0 * g.re / (1.0 + s), 2.0 * g.im / (1.0 + s), (s - 1.0) / (s + 1.0)]
        }
    }
}

fn gauss_from_normal(n: [f64; 3]) -> Option<Complex64> {
    let denom = 1.0 - n[2];
    if denom < 1e-15 {
        None
    } else {
        Some(Complex64::new(n[0] / denom, n[1] / denom))
    }
}

struct Welder {
    cells: HashMap<[i64; 3], Vec<usize>>,
    tol: f64,
}

impl Welder {
    fn new(tol: f64) -> Self {
        Self {
            cells: HashMap::new(),
            tol,
        }
    }

    fn key(&self, x: [f64; 3]) -> [i64; 3] {
        x.map(|v| (v / self.tol).floor() as i64)
    }

    fn find(&self, x: [f64; 3], vertices: &[ImmersionPoint]) -> Option<usize> {
        let k = self.key(x);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = self.cells.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for &idx in list {
                            let y = vertices[idx].x;
                            if (0..3).all(|a| (x[a] - y[a]).abs() <= self.tol) {
                                return Some(idx);
                            }
                        }
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, x: [f64; 3], idx: usize) {
        self.cells.entry(self.key(x)).or_default().push(idx);
    }
}

/// Appends the images of the mesh under the non-identity elements of the
/// symmetry group, welding vertices closer than [`WELD_TOLERANCE`] and
/// dropping repeated faces. Orientation-reversing images get reversed
/// winding. Only the three-end surface carries the full group.
pub fn symmetry_complete(mesh: &SurfaceMesh) -> Result<SurfaceMesh> {
    if mesh.family != FamilyKind::Vilhena3 {
        return Err(Error::Unsupported(format!(
            "{} is not invariant under the eight-element symmetry group",
            mesh.family
        )));
    }
    let mut welder = Welder::new(WELD_TOLERANCE);
    let mut vertices: Vec<ImmersionPoint> = Vec::with_capacity(mesh.vertices.len() * 8);
    let mut faces = Vec::with_capacity(mesh.faces.len() * 8);
    let mut seen = HashSet::new();

    for g in dihedral_group() {
        let map: Vec<usize> = mesh
            .vertices
            .iter()
            .map(|v| {
                let x = apply(&g, v.x);
                match welder.find(x, &vertices) {
                    Some(idx) => idx,
                    None => {
                        let idx = vertices.len();
                        vertices.push(ImmersionPoint {
                            x,
                            gauss: gauss_from_normal(apply(&g, normal_from_gauss(v.gauss))),
                            ..*v
                        });
                        welder.insert(x, idx);
                        idx
                    }
                }
            })
            .collect();
        let flip = det(&g) < 0.0;
        for f in &mesh.faces {
            let mut t = [map[f[0]], map[f[1]], map[f[2]]];
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                continue;
            }
            if flip {
                t.swap(1, 2);
            }
            let mut key = t;
            key.sort_unstable();
            if seen.insert(key) {
                faces.push(t);
            }
        }
    }
    Ok(SurfaceMesh {
        family: mesh.family,
        plan: mesh.plan,
        vertices,
        faces,
        curvature_integral: None,
        clipped: mesh.clipped,
    })
}

/// Applies a matrix to every vertex position.
pub fn transform_positions(positions: &[[f64; 3]], a: &Mat3) -> Vec<[f64; 3]> {
    positions.iter().map(|&x| apply(a, x)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl MeshFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MeshFormat::Obj => "obj",
            MeshFormat::Ply => "ply",
        }
    }
}

fn fmt_real(v: f64) -> String {
    format!("{v:.8e}")
}

/// Serializes the mesh; coordinates carry nine significant digits.
pub fn mesh_to_string(mesh: &SurfaceMesh, format: MeshFormat) -> Result<String> {
    if mesh.vertices.is_empty() {
        return Err(Error::EmptySampling);
    }
    mesh.validate()?;
    let mut s = String::new();
    match format {
        MeshFormat::Obj => {
            for v in &mesh.vertices {
                let _ = writeln!(s, "v {} {} {}", fmt_real(v.x[0]), fmt_real(v.x[1]), fmt_real(v.x[2]));
            }
            for f in &mesh.faces {
                let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
            }
        }
        MeshFormat::Ply => {
            s.push_str("ply\nformat ascii 1.0\n");
            let _ = writeln!(s, "element vertex {}", mesh.vertices.len());
            s.push_str("property float x\nproperty float y\nproperty float z\nproperty float curvature\n");
            let _ = writeln!(s, "element face {}", mesh.faces.len());
            s.push_str("property list uchar int vertex_indices\nend_header\n");
            for v in &mesh.vertices {
                let _ = writeln!(
                    s,
                    "{} {} {} {}",
                    fmt_real(v.x[0]),
                    fmt_real(v.x[1]),
                    fmt_real(v.x[2]),
                    fmt_real(v.curvature)
                );
            }
            for f in &mesh.faces {
                let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
            }
        }
    }
    Ok(s)
}

/// Writes the mesh to `sink` and returns the byte count.
pub fn export_mesh<W: Write>(mesh: &SurfaceMesh, format: MeshFormat, sink: &mut W) -> Result<usize> {
    let s = mesh_to_string(mesh, format)?;
    sink.write_all(s.as_bytes())?;
    sink.flush()?;
    Ok(s.len())
}

/// Vertex positions, faces (0-based) and, for PLY, the curvature channel.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedMesh {
    pub positions: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    pub curvature: Vec<f64>,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn parse_f64(tok: Option<&str>) -> Result<f64> {
    tok.ok_or_else(|| parse_err("missing value"))?
        .parse()
        .map_err(|e| parse_err(format!("bad number: {e}")))
}

fn parse_index(tok: Option<&str>) -> Result<usize> {
    tok.ok_or_else(|| parse_err("missing index"))?
        .parse()
        .map_err(|e| parse_err(format!("bad index: {e}")))
}

fn check_indices(mesh: &ParsedMesh) -> Result<()> {
    let n = mesh.positions.len();
    match mesh.faces.iter().find(|f| f.iter().any(|&k| k >= n)) {
        Some(f) => Err(parse_err(format!("face {f:?} out of range for {n} vertices"))),
        None => Ok(()),
    }
}

pub fn parse_obj(text: &str) -> Result<ParsedMesh> {
    let mut out = ParsedMesh::default();
    for line in text.lines() {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("v") => out.positions.push([parse_f64(toks.next())?, parse_f64(toks.next())?, parse_f64(toks.next())?]),
            Some("f") => {
                let mut f = [0usize; 3];
                for slot in &mut f {
                    let k = parse_index(toks.next())?;
                    if k == 0 {
                        return Err(parse_err("OBJ indices are 1-based"));
                    }
                    *slot = k - 1;
                }
                out.faces.push(f);
            }
            _ => {}
        }
    }
    check_indices(&out)?;
    Ok(out)
}

pub fn parse_ply(text: &str) -> Result<ParsedMesh> {
    let mut lines = text.lines();
    if lines.next() != Some("ply") {
        return Err(parse_err("missing ply magic"));
    }
    let (mut nv, mut nf) = (0usize, 0usize);
    let mut vertex_props = Vec::new();
    let mut current = "";
    for line in lines.by_ref() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["end_header"] => break,
            ["format", fmt, _] if *fmt != "ascii" => return Err(parse_err("only ascii PLY is supported")),
            ["element", "vertex", n] => {
                nv = n.parse().map_err(|_| parse_err("bad vertex count"))?;
                current = "vertex";
            }
            ["element", "face", n] => {
                nf = n.parse().map_err(|_| parse_err("bad face count"))?;
                current = "face";
            }
            ["property", _, name] if current == "vertex" => vertex_props.push(name.to_string()),
            _ => {}
        }
    }
    let col = |name: &str| vertex_props.iter().position(|p| p == name);
    let (cx, cy, cz) = match (col("x"), col("y"), col("z")) {
        (Some(x), Some(y), Some(z)) => (x, y, z),
        _ => return Err(parse_err("PLY vertex element lacks x/y/z")),
    };
    let ck = col("curvature");
    let mut out = ParsedMesh::default();
    for _ in 0..nv {
        let line = lines.next().ok_or_else(|| parse_err("truncated vertex list"))?;
        let vals = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| parse_err(format!("bad number: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != vertex_props.len() {
            return Err(parse_err("vertex line has the wrong arity"));
        }
        out.positions.push([vals[cx], vals[cy], vals[cz]]);
        if let Some(k) = ck {
            out.curvature.push(vals[k]);
        }
    }
    for _ in 0..nf {
        let line = lines.next().ok_or_else(|| parse_err("truncated face list"))?;
        let mut toks = line.split_whitespace();
        if parse_index(toks.next())? != 3 {
            return Err(parse_err("only triangles are supported"));
        }
        out.faces.push([parse_index(toks.next())?, parse_index(toks.next())?, parse_index(toks.next())?]);
    }
    check_indices(&out)?;
    Ok(out)
}

const RING_NODES: usize = 128;

/// Curvature inside the cutoff disk around `puncture`, in polar
/// coordinates. The density `-4|g'|^2/(1+|g|^2)^2` is smooth through the
/// poles of `g`, so this needs an evaluator that may approach the lattice.
pub fn disk_curvature(surface: &Surface, puncture: Complex64, radius: f64) -> Result<f64> {
    let config = EvaluationConfig {
        pole_exclusion_radius: 1e-12,
        ..*surface.lattice().config()
    };
    let near = Surface::new(surface.family().clone(), SquareLattice::new(config)?)?;
    let value = integrate(
        |rho| {
            // periodic trapezoid rule in the angle
            let mut mean = 0.0;
            for k in 0..RING_NODES {
                let z = puncture + Complex64::from_polar(rho, 2.0 * PI * k as f64 / RING_NODES as f64);
                mean += near.curvature_density(z)?;
            }
            Ok(Complex64::new(mean / RING_NODES as f64 * 2.0 * PI * rho, 0.0))
        },
        0.0,
        radius,
        QuadratureOptions::with_tol(1e-8),
    )?;
    Ok(value.re)
}

/// Curvature of every cutoff disk, in puncture order.
pub fn excluded_end_curvature(surface: &Surface, radius: f64) -> Result<Vec<f64>> {
    surface
        .family()
        .punctures
        .iter()
        .map(|&p| disk_curvature(surface, p, radius))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub degree: i64,
    pub targets: Vec<[f64; 2]>,
    pub counts: Vec<i64>,
    pub retries: usize,
}

/// Cells per side for argument-principle counting. Cell edges sit at
/// `(k + 1/2) / n`, so half periods and lattice points are cell centres.
pub const DEGREE_CELLS: usize = 64;
const DEGREE_TARGETS: usize = 5;
const DEGREE_MAX_RETRIES: usize = 20;

/// Change of `arg f` along the segment `a -> b`, refined until successive
/// samples differ by less than 0.5 rad. `None` when `f` nearly vanishes on
/// the segment.
fn arg_change<F>(f: &F, a: Complex64, b: Complex64, fa: Complex64, fb: Complex64, depth: u32) -> Option<f64>
where
    F: Fn(Complex64) -> Option<Complex64>,
{
    let step = (fb / fa).arg();
    if step.abs() < 0.5 {
        return Some(step);
    }
    if depth == 0 {
        return None;
    }
    let m = (a + b) * 0.5;
    let fm = f(m)?;
    Some(arg_change(f, a, m, fa, fm, depth - 1)? + arg_change(f, m, b, fm, fb, depth - 1)?)
}

/// Winding numbers of `g - w0` around each grid cell, or `None` if the
/// contour passes too close to a zero.
fn cell_windings(surface: &Surface, w0: Complex64, n: usize) -> Option<Vec<i64>> {
    let h = 1.0 / n as f64;
    let f = |z: Complex64| -> Option<Complex64> {
        let v = surface.gauss_map(z).ok()? - w0;
        (v.norm() > 1e-8).then_some(v)
    };
    let corner = |i: usize, j: usize| Complex64::new((i as f64 - 0.5) * h, (j as f64 - 0.5) * h);
    // Values at the (n+1)^2 corners, then arg changes along horizontal and
    // vertical edges.
    let values: Vec<Option<Complex64>> = (0..=n)
        .into_par_iter()
        .flat_map_iter(|j| (0..=n).map(move |i| (i, j)))
        .map(|(i, j)| f(corner(i, j)))
        .collect();
    let at = |i: usize, j: usize| values[j * (n + 1) + i];
    let edge = |i0: usize, j0: usize, i1: usize, j1: usize| -> Option<f64> {
        arg_change(&f, corner(i0, j0), corner(i1, j1), at(i0, j0)?, at(i1, j1)?, 30)
    };
    let horizontal: Vec<Option<f64>> = (0..=n)
        .into_par_iter()
        .flat_map_iter(|j| (0..n).map(move |i| (i, j)))
        .map(|(i, j)| edge(i, j, i + 1, j))
        .collect();
    let vertical: Vec<Option<f64>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|j| (0..=n).map(move |i| (i, j)))
        .map(|(i, j)| edge(i, j, i, j + 1))
        .collect();
    let hor = |i: usize, j: usize| horizontal[j * n + i];
    let ver = |i: usize, j: usize| vertical[j * (n + 1) + i];
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let total = hor(i, j)? + ver(i + 1, j)? - hor(i, j + 1)? - ver(i, j)?;
            out.push((total / (2.0 * PI)).round() as i64);
        }
    }
    Some(out)
}

/// Preimage count of `w0` under `g` over the torus, or `None` when the
/// contour grid runs into a preimage.
pub fn preimage_count(surface: &Surface, w0: Complex64) -> Option<i64> {
    let windings = cell_windings(surface, w0, DEGREE_CELLS)?;
    let zeros: i64 = windings.iter().filter(|&&w| w > 0).sum();
    let poles: i64 = -windings.iter().filter(|&&w| w < 0).sum::<i64>();
    // Cells holding both a preimage and a pole would cancel; with
    // |w0| <= 2 and a pole of residue >= 0.03 at a cell centre this does
    // not happen, and the balance below catches it if it does.
    (zeros == poles).then_some(zeros)
}

/// Degree of `g` by the argument principle at five random targets
/// `|w0| in [0.5, 2]`, which must agree.
pub fn degree_of_gauss_map(surface: &Surface, seed: u64) -> Result<DegreeReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut targets = Vec::new();
    let mut counts = Vec::new();
    let mut retries = 0;
    while counts.len() < DEGREE_TARGETS {
        let w0 = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..2.0 * PI));
        match preimage_count(surface, w0) {
            Some(k) => {
                targets.push([w0.re, w0.im]);
                counts.push(k);
            }
            None => {
                retries += 1;
                if retries > DEGREE_MAX_RETRIES {
                    return Err(Error::BoundaryHitsZero { retries });
                }
            }
        }
    }
    if counts.iter().any(|&k| k != counts[0]) {
        return Err(Error::DegreeDisagreement(counts));
    }
    Ok(DegreeReport {
        degree: counts[0],
        targets,
        counts,
        retries,
    })
}
