//! Singular-contour extraction and mesh export.

use super::{field_dx, field_dy, SurfaceData};
use crate::algebra::Vec3;
use std::collections::HashMap;
use std::io::{BufWriter, Write};
use std::path::Path;

/// A polyline on the parameter grid: each vertex lies on a grid edge where
/// σ changes sign, carries the interpolated surface position, and the
/// null-direction field η = B ∂x − ε₁ A ∂y (ε₁ = sign cos φ).
#[derive(Debug, Clone)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    pub f: Vec<Vec3>,
    pub eta: Vec<(f64, f64)>,
    pub closed: bool,
}

/// A crossing lives on a unique grid edge: horizontal (between (ix, iy) and
/// (ix+1, iy)) or vertical (between (ix, iy) and (ix, iy+1)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeKey {
    H(usize, usize),
    V(usize, usize),
}

struct Crossing {
    xy: (f64, f64),
    f: Vec3,
    eta: (f64, f64),
}

fn interp(bias: f64, a: f64, b: f64) -> f64 {
    a + bias * (b - a)
}

/// Zero contour of σ by marching squares with linear interpolation, joined
/// into polylines. Cells touching failed or non-finite σ values are skipped.
pub fn singular_contour(s: &SurfaceData) -> Vec<Polyline> {
    let g = &s.grid;
    let (nx, ny) = (g.nx(), g.ny());
    let fx = field_dx(&s.f, g);
    let fy = field_dy(&s.f, g);
    let nxf = field_dx(&s.n, g);
    let nyf = field_dy(&s.n, g);

    // Crossing data per edge, interpolated between the edge's grid corners.
    let mut crossings: HashMap<EdgeKey, Crossing> = HashMap::new();
    let mut edge_crossing = |key: EdgeKey| -> Option<()> {
        let ((ix0, iy0), (ix1, iy1)) = match key {
            EdgeKey::H(ix, iy) => ((ix, iy), (ix + 1, iy)),
            EdgeKey::V(ix, iy) => ((ix, iy), (ix, iy + 1)),
        };
        let (i0, i1) = (g.index(ix0, iy0), g.index(ix1, iy1));
        let (s0, s1) = (s.sigma[i0], s.sigma[i1]);
        // The sign predicate must match the cell classification exactly
        // (σ = 0 counts as non-positive) or chains reference missing edges.
        if !(s0.is_finite() && s1.is_finite()) || (s0 > 0.0) == (s1 > 0.0) {
            return None;
        }
        let bias = s0 / (s0 - s1);
        let xy = (
            interp(bias, g.x()[ix0], g.x()[ix1]),
            interp(bias, g.y()[iy0], g.y()[iy1]),
        );
        let f = s.f[i0] + (s.f[i1] - s.f[i0]).scale(bias);
        let a = interp(bias, fx[i0].norm(), fx[i1].norm());
        let b = interp(bias, fy[i0].norm(), fy[i1].norm());
        let cos_phi = interp(bias, fx[i0].dot(fy[i0]), fx[i1].dot(fy[i1]));
        // Below the wave-front stratum |f_x| degenerates; fall back to |N_x|.
        let (a, b) = if a.max(b) > 1e-12 {
            (a, b)
        } else {
            (
                interp(bias, nxf[i0].norm(), nxf[i1].norm()),
                interp(bias, nyf[i0].norm(), nyf[i1].norm()),
            )
        };
        let eps1 = if cos_phi >= 0.0 { 1.0 } else { -1.0 };
        crossings.insert(
            key,
            Crossing {
                xy,
                f,
                eta: (b, -eps1 * a),
            },
        );
        Some(())
    };

    // Segments per cell; saddle ambiguity resolved by the centre average.
    let mut adjacency: HashMap<EdgeKey, Vec<EdgeKey>> = HashMap::new();
    let mut connect = |a: EdgeKey, b: EdgeKey| {
        adjacency.entry(a).or_default().push(b);
        adjacency.entry(b).or_default().push(a);
    };
    for iy in 0..ny - 1 {
        for ix in 0..nx - 1 {
            let corners = [
                s.sigma[g.index(ix, iy)],
                s.sigma[g.index(ix + 1, iy)],
                s.sigma[g.index(ix + 1, iy + 1)],
                s.sigma[g.index(ix, iy + 1)],
            ];
            if corners.iter().any(|c| !c.is_finite()) {
                continue;
            }
            let signs = [
                corners[0] > 0.0,
                corners[1] > 0.0,
                corners[2] > 0.0,
                corners[3] > 0.0,
            ];
            let bottom = EdgeKey::H(ix, iy);
            let top = EdgeKey::H(ix, iy + 1);
            let left = EdgeKey::V(ix, iy);
            let right = EdgeKey::V(ix + 1, iy);
            let mut cut: Vec<EdgeKey> = Vec::new();
            if signs[0] != signs[1] {
                cut.push(bottom);
            }
            if signs[1] != signs[2] {
                cut.push(right);
            }
            if signs[3] != signs[2] {
                cut.push(top);
            }
            if signs[0] != signs[3] {
                cut.push(left);
            }
            for &k in &cut {
                edge_crossing(k);
            }
            match cut.len() {
                0 => {}
                2 => connect(cut[0], cut[1]),
                4 => {
                    // Saddle: pair by the sign of the cell centre.
                    let centre_pos = corners.iter().sum::<f64>() > 0.0;
                    if signs[0] == centre_pos {
                        connect(bottom, right);
                        connect(top, left);
                    } else {
                        connect(bottom, left);
                        connect(top, right);
                    }
                }
                _ => unreachable!("marching squares cuts 0, 2, or 4 edges"),
            }
        }
    }

    // Walk chains: open curves first (degree-1 endpoints), then cycles.
    let mut visited: HashMap<EdgeKey, bool> =
        adjacency.keys().map(|&k| (k, false)).collect();
    let walk = |start: EdgeKey,
                    adjacency: &HashMap<EdgeKey, Vec<EdgeKey>>,
                    visited: &mut HashMap<EdgeKey, bool>| {
        let mut chain = vec![start];
        visited.insert(start, true);
        let mut here = start;
        loop {
            let next = adjacency[&here]
                .iter()
                .find(|&&n| !visited[&n])
                .copied();
            match next {
                Some(n) => {
                    visited.insert(n, true);
                    chain.push(n);
                    here = n;
                }
                None => break,
            }
        }
        chain
    };

    let mut keys: Vec<EdgeKey> = adjacency.keys().copied().collect();
    keys.sort_by_key(|k| match *k {
        EdgeKey::H(ix, iy) => (iy, ix, 0),
        EdgeKey::V(ix, iy) => (iy, ix, 1),
    });
    let mut polylines = Vec::new();
    for open_only in [true, false] {
        for &k in &keys {
            if visited[&k] || (adjacency[&k].len() != 1 && open_only) {
                continue;
            }
            let chain = walk(k, &adjacency, &mut visited);
            if chain.len() < 2 {
                continue;
            }
            let closed = !open_only
                && adjacency[chain.last().unwrap()].contains(&chain[0])
                && chain.len() > 2;
            let mut points = Vec::with_capacity(chain.len());
            let mut f = Vec::with_capacity(chain.len());
            let mut eta = Vec::with_capacity(chain.len());
            for key in &chain {
                let c = &crossings[key];
                points.push(c.xy);
                f.push(c.f);
                eta.push(c.eta);
            }
            polylines.push(Polyline {
                points,
                f,
                eta,
                closed,
            });
        }
    }
    polylines
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    PlyAscii,
    PlyBinary,
}

fn triangles(s: &SurfaceData) -> Vec<[u32; 3]> {
    let g = &s.grid;
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = Vec::new();
    for iy in 0..ny - 1 {
        for ix in 0..nx - 1 {
            let q = [
                g.index(ix, iy),
                g.index(ix + 1, iy),
                g.index(ix + 1, iy + 1),
                g.index(ix, iy + 1),
            ];
            if q.iter().any(|&i| !s.ok[i]) {
                continue;
            }
            out.push([q[0] as u32, q[1] as u32, q[2] as u32]);
            out.push([q[0] as u32, q[2] as u32, q[3] as u32]);
        }
    }
    out
}

fn orient_of(sigma: f64) -> i32 {
    if !sigma.is_finite() || sigma == 0.0 {
        0
    } else {
        sigma.signum() as i32
    }
}

/// Write the surface mesh and its singular polylines.
///
/// OBJ: `<path>` plus a per-vertex CSV sidecar `<stem>_vertices.csv`
/// (x, y, f, N, σ, orientation sign ⟨N, f_x×f_y⟩). PLY carries σ and the
/// orientation as vertex properties. In all cases the singular contour goes
/// to `<stem>_contours.csv` with the interpolated surface positions.
pub fn export_mesh(s: &SurfaceData, path: &Path, format: MeshFormat) -> std::io::Result<()> {
    let tris = triangles(s);
    match format {
        MeshFormat::Obj => {
            let mut w = BufWriter::new(std::fs::File::create(path)?);
            writeln!(w, "# pseudospherical frontal, {} vertices", s.f.len())?;
            for v in &s.f {
                writeln!(w, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z)?;
            }
            for n in &s.n {
                writeln!(w, "vn {:.16e} {:.16e} {:.16e}", n.x, n.y, n.z)?;
            }
            for t in &tris {
                writeln!(
                    w,
                    "f {}//{} {}//{} {}//{}",
                    t[0] + 1,
                    t[0] + 1,
                    t[1] + 1,
                    t[1] + 1,
                    t[2] + 1,
                    t[2] + 1
                )?;
            }
            w.flush()?;
            let side = sibling(path, "_vertices.csv");
            write_vertex_csv(s, &side)?;
        }
        MeshFormat::PlyAscii | MeshFormat::PlyBinary => {
            let mut w = BufWriter::new(std::fs::File::create(path)?);
            let binary = format == MeshFormat::PlyBinary;
            writeln!(w, "ply")?;
            writeln!(
                w,
                "format {} 1.0",
                if binary {
                    "binary_little_endian"
                } else {
                    "ascii"
                }
            )?;
            writeln!(w, "element vertex {}", s.f.len())?;
            for p in ["x", "y", "z", "nx", "ny", "nz", "sigma"] {
                writeln!(w, "property double {p}")?;
            }
            writeln!(w, "property int orient")?;
            writeln!(w, "element face {}", tris.len())?;
            writeln!(w, "property list uchar int vertex_indices")?;
            writeln!(w, "end_header")?;
            for i in 0..s.f.len() {
                let (v, n) = (s.f[i], s.n[i]);
                let vals = [v.x, v.y, v.z, n.x, n.y, n.z, s.sigma[i]];
                let orient = orient_of(s.sigma[i]);
                if binary {
                    for x in vals {
                        w.write_all(&x.to_le_bytes())?;
                    }
                    w.write_all(&orient.to_le_bytes())?;
                } else {
                    for x in vals {
                        write!(w, "{x:.16e} ")?;
                    }
                    writeln!(w, "{orient}")?;
                }
            }
            for t in &tris {
                if binary {
                    w.write_all(&3u8.to_le_bytes())?;
                    for &i in t {
                        w.write_all(&(i as i32).to_le_bytes())?;
                    }
                } else {
                    writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
                }
            }
            w.flush()?;
        }
    }
    let contours = singular_contour(s);
    write_contour_csv(&contours, &sibling(path, "_contours.csv"))?;
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> std::path::PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn write_vertex_csv(s: &SurfaceData, path: &Path) -> std::io::Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "x,y,fx,fy,fz,Nx,Ny,Nz,sigma,orient")?;
    let g = &s.grid;
    for iy in 0..g.ny() {
        for ix in 0..g.nx() {
            let i = g.index(ix, iy);
            let (v, n) = (s.f[i], s.n[i]);
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                g.x()[ix],
                g.y()[iy],
                v.x,
                v.y,
                v.z,
                n.x,
                n.y,
                n.z,
                s.sigma[i],
                orient_of(s.sigma[i])
            )?;
        }
    }
    w.flush()
}

pub fn write_contour_csv(contours: &[Polyline], path: &Path) -> std::io::Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "curve_id,x,y,fx,fy,fz")?;
    for (id, c) in contours.iter().enumerate() {
        for (p, f) in c.points.iter().zip(&c.f) {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                id, p.0, p.1, f.x, f.y, f.z
            )?;
        }
    }
    w.flush()
}
