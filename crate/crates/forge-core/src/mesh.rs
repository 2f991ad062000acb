//! Triangle meshes of surface patches: construction from frame grids,
//! watertight closure in the angular direction, self-intersection
//! detection, and OBJ/PLY emission.
//!
//! Meshes keep both the ambient 4-coordinates (verification-grade data)
//! and a stereographic 3-projection (for intersection tests and viewers).
//! The projection center is the antipode of the enclosing ball's center,
//! which the annulus never approaches, so the projection is injective on
//! the mesh and self-intersection in the projection is equivalent to
//! self-intersection on the quadric.

use crate::error::{Error, Result};
use crate::frame::SurfacePatch;
use crate::spaceform::{Ambient, Vec4};
use std::io::Write;

/// Indexed triangle mesh over a structured `(u, v)` grid.
#[derive(Clone, Debug)]
pub struct TriMesh {
    /// Ambient coordinates, row-major: `iu * cols + iv`.
    pub verts: Vec<Vec4>,
    /// Stereographic image used for intersection queries and OBJ output.
    pub verts3: Vec<[f64; 3]>,
    pub tris: Vec<[u32; 3]>,
    /// The two boundary rows (`u = -u0` and `u = +u0`) as vertex loops.
    pub boundary: [Vec<u32>; 2],
    pub rows: usize,
    pub cols: usize,
    /// Whether the last column wraps onto the first (closed annulus).
    pub closed_v: bool,
}

impl TriMesh {
    /// Build from a patch, optionally identifying `v = 0` with `v = v_max`.
    ///
    /// With `close_v` the final grid column is dropped and triangles wrap;
    /// the patch must actually close there (checked against `gap_tol`).
    pub fn from_patch(
        patch: &SurfacePatch,
        amb: &Ambient,
        close_v: bool,
        gap_tol: f64,
    ) -> Result<TriMesh> {
        let (nu, nv) = (patch.nu(), patch.nv());
        let cols = if close_v { nv - 1 } else { nv };
        if close_v {
            for iu in 0..nu {
                let gap = (patch.frame(iu, nv - 1).psi - patch.frame(iu, 0).psi).norm_euclid();
                if gap > gap_tol {
                    return Err(Error::Degenerate(format!(
                        "closure gap {gap:.3e} at grid row {iu} exceeds {gap_tol:.1e}"
                    )));
                }
            }
        }
        let mut verts = Vec::with_capacity(nu * cols);
        for iu in 0..nu {
            for iv in 0..cols {
                verts.push(patch.frame(iu, iv).psi);
            }
        }
        let mut tris = Vec::new();
        let vid = |iu: usize, iv: usize| (iu * cols + (iv % cols)) as u32;
        let v_cells = if close_v { cols } else { cols - 1 };
        for iu in 0..nu - 1 {
            for iv in 0..v_cells {
                let (p00, p01) = (vid(iu, iv), vid(iu, iv + 1));
                let (p10, p11) = (vid(iu + 1, iv), vid(iu + 1, iv + 1));
                tris.push([p00, p10, p11]);
                tris.push([p00, p11, p01]);
            }
        }
        let boundary = [
            (0..cols).map(|iv| vid(0, iv)).collect(),
            (0..cols).map(|iv| vid(nu - 1, iv)).collect(),
        ];
        let mut mesh = TriMesh {
            verts,
            verts3: Vec::new(),
            tris,
            boundary,
            rows: nu,
            cols,
            closed_v: close_v,
        };
        mesh.project(&Vec4::E4, amb)?;
        Ok(mesh)
    }

    /// Build from an explicit row-major vertex grid (used for rotational
    /// embeddings that bypass the frame pipeline).
    pub fn from_grid(
        verts: Vec<Vec4>,
        rows: usize,
        cols: usize,
        close_v: bool,
        amb: &Ambient,
    ) -> Result<TriMesh> {
        if verts.len() != rows * cols || rows < 2 || cols < 2 {
            return Err(Error::Domain("grid dimensions do not match vertex count".into()));
        }
        let mut tris = Vec::new();
        let vid = |iu: usize, iv: usize| (iu * cols + (iv % cols)) as u32;
        let v_cells = if close_v { cols } else { cols - 1 };
        for iu in 0..rows - 1 {
            for iv in 0..v_cells {
                let (p00, p01) = (vid(iu, iv), vid(iu, iv + 1));
                let (p10, p11) = (vid(iu + 1, iv), vid(iu + 1, iv + 1));
                tris.push([p00, p10, p11]);
                tris.push([p00, p11, p01]);
            }
        }
        let boundary = [
            (0..cols).map(|iv| vid(0, iv)).collect(),
            (0..cols).map(|iv| vid(rows - 1, iv)).collect(),
        ];
        let mut mesh = TriMesh {
            verts,
            verts3: Vec::new(),
            tris,
            boundary,
            rows,
            cols,
            closed_v: close_v,
        };
        mesh.project(&Vec4::E4, amb)?;
        Ok(mesh)
    }

    /// Recompute the stereographic image, projecting from `-center`.
    ///
    /// `center` must be a manifold point; vertices closer than `1e-6` to
    /// the projection pole are rejected.
    pub fn project(&mut self, center: &Vec4, amb: &Ambient) -> Result<()> {
        // the ambient reflection swapping `center` and e4 is an isometry
        // (orientation is irrelevant for intersection queries), so the
        // projection from -center is: swap, then project from -e4
        let diff = *center - Vec4::E4;
        let dd = amb.inner(&diff, &diff);
        let swap = |x: &Vec4| -> Vec4 {
            if dd.abs() < 1e-24 {
                *x
            } else {
                *x - diff * (2.0 * amb.inner(x, &diff) / dd)
            }
        };
        self.verts3 = self
            .verts
            .iter()
            .map(|p| {
                let q = swap(p);
                let den = 1.0 + q.x4();
                if den.abs() < 1e-6 {
                    return Err(Error::Degenerate(
                        "mesh vertex at the stereographic pole".into(),
                    ));
                }
                Ok([q.x1() / den, q.x2() / den, q.x3() / den])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(())
    }

    /// Exact-index adjacency: triangles sharing at least one vertex.
    fn share_vertex(a: &[u32; 3], b: &[u32; 3]) -> bool {
        a.iter().any(|x| b.contains(x))
    }

    /// Whether any two non-adjacent triangles intersect in the projected
    /// mesh. Uniform-grid pruning keeps the pair count near-linear.
    pub fn self_intersects(&self) -> bool {
        let nt = self.tris.len();
        // bounding boxes
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        let mut boxes = Vec::with_capacity(nt);
        for t in &self.tris {
            let mut bl = [f64::INFINITY; 3];
            let mut bh = [f64::NEG_INFINITY; 3];
            for &vi in t {
                let p = self.verts3[vi as usize];
                for k in 0..3 {
                    bl[k] = bl[k].min(p[k]);
                    bh[k] = bh[k].max(p[k]);
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
            boxes.push((bl, bh));
        }
        // uniform grid keyed by box centers
        let cells = ((nt as f64).powf(1.0 / 3.0).ceil() as usize).clamp(4, 64);
        let width = [
            ((hi[0] - lo[0]) / cells as f64).max(1e-12),
            ((hi[1] - lo[1]) / cells as f64).max(1e-12),
            ((hi[2] - lo[2]) / cells as f64).max(1e-12),
        ];
        let key = |p: f64, k: usize| (((p - lo[k]) / width[k]) as i64).clamp(0, cells as i64 - 1);
        let mut grid: std::collections::HashMap<(i64, i64, i64), Vec<u32>> =
            std::collections::HashMap::new();
        for (i, (bl, bh)) in boxes.iter().enumerate() {
            for gx in key(bl[0], 0)..=key(bh[0], 0) {
                for gy in key(bl[1], 1)..=key(bh[1], 1) {
                    for gz in key(bl[2], 2)..=key(bh[2], 2) {
                        grid.entry((gx, gy, gz)).or_default().push(i as u32);
                    }
                }
            }
        }
        let tri_pts = |i: usize| -> [[f64; 3]; 3] {
            let t = self.tris[i];
            [
                self.verts3[t[0] as usize],
                self.verts3[t[1] as usize],
                self.verts3[t[2] as usize],
            ]
        };
        let mut seen: std::collections::HashSet<(u32, u32)> = std::collections::HashSet::new();
        for bucket in grid.values() {
            for i in 0..bucket.len() {
                for j in i + 1..bucket.len() {
                    let (a, b) = (bucket[i].min(bucket[j]), bucket[i].max(bucket[j]));
                    if !seen.insert((a, b)) {
                        continue;
                    }
                    let (ai, bi) = (a as usize, b as usize);
                    if Self::share_vertex(&self.tris[ai], &self.tris[bi]) {
                        continue;
                    }
                    // box reject
                    let (al, ah) = &boxes[ai];
                    let (bl, bh) = &boxes[bi];
                    if (0..3).any(|k| ah[k] < bl[k] || bh[k] < al[k]) {
                        continue;
                    }
                    if tri_tri_intersect(&tri_pts(ai), &tri_pts(bi)) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Write the stereographic mesh as a Wavefront OBJ file.
    pub fn write_obj<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "# CMC annulus mesh ({} vertices, {} triangles)", self.verts3.len(), self.tris.len())?;
        for p in &self.verts3 {
            writeln!(out, "v {:.17} {:.17} {:.17}", p[0], p[1], p[2])?;
        }
        for t in &self.tris {
            writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }

    /// Write the ambient 4-coordinate mesh as binary little-endian PLY
    /// (properties `x y z w` as doubles).
    pub fn write_ply<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        write!(
            out,
            "ply\nformat binary_little_endian 1.0\ncomment ambient quadric coordinates\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\nproperty double w\nelement face {}\nproperty list uchar uint vertex_indices\nend_header\n",
            self.verts.len(),
            self.tris.len()
        )?;
        for p in &self.verts {
            for k in 0..4 {
                out.write_all(&p.0[k].to_le_bytes())?;
            }
        }
        for t in &self.tris {
            out.write_all(&[3u8])?;
            for &vi in t {
                out.write_all(&vi.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Read back a PLY produced by [`TriMesh::write_ply`].
    pub fn read_ply(data: &[u8]) -> Result<TriMesh> {
        let header_end = data
            .windows(11)
            .position(|w| w == b"end_header\n")
            .ok_or_else(|| Error::Domain("PLY header not terminated".into()))?
            + 11;
        let header = std::str::from_utf8(&data[..header_end])
            .map_err(|_| Error::Domain("PLY header not UTF-8".into()))?;
        let mut n_vert = 0usize;
        let mut n_face = 0usize;
        for line in header.lines() {
            let mut it = line.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some("element"), Some("vertex"), Some(n)) => {
                    n_vert = n.parse().map_err(|_| Error::Domain("bad vertex count".into()))?
                }
                (Some("element"), Some("face"), Some(n)) => {
                    n_face = n.parse().map_err(|_| Error::Domain("bad face count".into()))?
                }
                _ => {}
            }
        }
        let mut at = header_end;
        let take = |at: &mut usize, n: usize| -> Result<&[u8]> {
            if *at + n > data.len() {
                return Err(Error::Domain("PLY data truncated".into()));
            }
            let s = &data[*at..*at + n];
            *at += n;
            Ok(s)
        };
        let mut verts = Vec::with_capacity(n_vert);
        for _ in 0..n_vert {
            let mut c = [0.0; 4];
            for v in &mut c {
                *v = f64::from_le_bytes(take(&mut at, 8)?.try_into().unwrap());
            }
            verts.push(Vec4(c));
        }
        let mut tris = Vec::with_capacity(n_face);
        for _ in 0..n_face {
            let n = take(&mut at, 1)?[0];
            if n != 3 {
                return Err(Error::Domain("PLY faces must be triangles".into()));
            }
            let mut t = [0u32; 3];
            for v in &mut t {
                *v = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap());
            }
            tris.push(t);
        }
        Ok(TriMesh {
            verts,
            verts3: Vec::new(),
            tris,
            boundary: [Vec::new(), Vec::new()],
            rows: 0,
            cols: 0,
            closed_v: false,
        })
    }
}

// --- triangle-triangle intersection -----------------------------------------

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Segment `(a, b)` against triangle `t`, transversal crossings only.
fn segment_hits_triangle(a: &[f64; 3], b: &[f64; 3], t: &[[f64; 3]; 3], eps: f64) -> bool {
    let n = cross(&sub(&t[1], &t[0]), &sub(&t[2], &t[0]));
    let da = dot(&n, &sub(a, &t[0]));
    let db = dot(&n, &sub(b, &t[0]));
    if da * db >= -eps * eps {
        return false;
    }
    let s = da / (da - db);
    let p = [
        a[0] + s * (b[0] - a[0]),
        a[1] + s * (b[1] - a[1]),
        a[2] + s * (b[2] - a[2]),
    ];
    // inside test via consistent edge orientations
    let mut sign = 0.0;
    for k in 0..3 {
        let e = sub(&t[(k + 1) % 3], &t[k]);
        let w = sub(&p, &t[k]);
        let d = dot(&cross(&e, &w), &n);
        if d.abs() <= eps * eps {
            return false; // grazing an edge: not a transversal crossing
        }
        if sign == 0.0 {
            sign = d.signum();
        } else if d.signum() != sign {
            return false;
        }
    }
    true
}

/// Transversal intersection test for two triangles.
///
/// Adjacency (shared mesh vertices) must be excluded by the caller; only
/// genuine crossings count, grazing contacts within the tolerance do not.
pub fn tri_tri_intersect(t1: &[[f64; 3]; 3], t2: &[[f64; 3]; 3]) -> bool {
    let scale = t1
        .iter()
        .chain(t2.iter())
        .flat_map(|p| p.iter())
        .fold(0.0_f64, |m, &c| m.max(c.abs()))
        .max(1e-30);
    let eps = 1e-10 * scale;
    for k in 0..3 {
        if segment_hits_triangle(&t1[k], &t1[(k + 1) % 3], t2, eps)
            || segment_hits_triangle(&t2[k], &t2[(k + 1) % 3], t1, eps)
        {
            return true;
        }
    }
    false
}
