//! Eigenpair production: analytic catalogs for model domains and a
//! finite-difference Dirichlet/Neumann solver for masked planar grids.

mod analytic;
mod cache;
mod dense;
mod fd;
mod lanczos;
mod legendre;

pub use analytic::{
    analytic_spectrum, box_modes_below, rectangle_neumann_modes, sphere_sectoral_mode,
    sphere_zonal_mode, torus_sine_mode,
};
pub use cache::{cache_key, load_spectrum, save_spectrum};
pub use dense::symmetric_eigen;
pub use fd::{apply_discrete_laplacian, fd_spectrum};
pub use legendre::normalized_assoc_legendre;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Default sampling density, points per unit length, for planar domains.
pub const DEFAULT_RESOLUTION_2D: u32 = 256;
/// Default sampling density for 3-d boxes and tori.
pub const DEFAULT_RESOLUTION_3D: u32 = 64;
/// Default latitude count for the sphere grid (so dtheta = pi/256).
pub const DEFAULT_SPHERE_LAT: u32 = 256;

/// Boundary condition of a masked finite-difference grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// Shape of the active set of a masked planar grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MaskShape {
    /// (0, width) x (0, height)
    Rectangle { width: f64, height: f64 },
    /// (0, 2 arm)^2 with the closed square [arm, 2 arm]^2 removed
    LShape { arm: f64 },
    /// centered disk of the given radius
    Disk { radius: f64 },
    /// explicit bitmask over an nx-by-ny cell grid anchored at the origin
    Bitmap { nx: usize, ny: usize, bits: Vec<u8> },
}

/// A model domain together with its sampling resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DomainSpec {
    /// Dirichlet rectangle (0, width) x (0, height)
    Rectangle {
        width: f64,
        height: f64,
        resolution: u32,
    },
    /// Dirichlet box (0, a) x (0, b) x (0, c)
    Box3 { sides: [f64; 3], resolution: u32 },
    /// flat torus, product of circles of the given circumferences (2 or 3)
    FlatTorus { lengths: Vec<f64>, resolution: u32 },
    /// Dirichlet disk of the given radius, sampled on a masked square grid
    Disk { radius: f64, resolution: u32 },
    /// round unit sphere on a latitude-longitude grid
    SphereS2 { n_lat: u32 },
    /// masked planar grid with spacing h, solved by finite differences
    MaskedGrid {
        shape: MaskShape,
        h: f64,
        bc: BoundaryCondition,
    },
}

impl DomainSpec {
    pub fn rectangle(width: f64, height: f64) -> Self {
        DomainSpec::Rectangle {
            width,
            height,
            resolution: DEFAULT_RESOLUTION_2D,
        }
    }

    pub fn box3(a: f64, b: f64, c: f64) -> Self {
        DomainSpec::Box3 {
            sides: [a, b, c],
            resolution: DEFAULT_RESOLUTION_3D,
        }
    }

    pub fn torus2(lx: f64, ly: f64) -> Self {
        DomainSpec::FlatTorus {
            lengths: vec![lx, ly],
            resolution: DEFAULT_RESOLUTION_2D,
        }
    }

    pub fn disk(radius: f64) -> Self {
        DomainSpec::Disk {
            radius,
            resolution: DEFAULT_RESOLUTION_2D,
        }
    }

    pub fn sphere() -> Self {
        DomainSpec::SphereS2 {
            n_lat: DEFAULT_SPHERE_LAT,
        }
    }

    pub fn with_resolution(mut self, res: u32) -> Self {
        match &mut self {
            DomainSpec::Rectangle { resolution, .. }
            | DomainSpec::Box3 { resolution, .. }
            | DomainSpec::FlatTorus { resolution, .. }
            | DomainSpec::Disk { resolution, .. } => *resolution = res,
            DomainSpec::SphereS2 { n_lat } => *n_lat = res,
            DomainSpec::MaskedGrid { .. } => {}
        }
        self
    }

    /// Intrinsic dimension of the domain (the sphere counts as a 2-manifold).
    pub fn dimension(&self) -> u32 {
        match self {
            DomainSpec::Rectangle { .. }
            | DomainSpec::Disk { .. }
            | DomainSpec::SphereS2 { .. }
            | DomainSpec::MaskedGrid { .. } => 2,
            DomainSpec::Box3 { .. } => 3,
            DomainSpec::FlatTorus { lengths, .. } => lengths.len() as u32,
        }
    }

    /// Flat domains embedded in Euclidean space (where Faber-Krahn and the
    /// explicit reverse Hölder constants apply).
    pub fn is_euclidean(&self) -> bool {
        !matches!(
            self,
            DomainSpec::FlatTorus { .. } | DomainSpec::SphereS2 { .. }
        )
    }

    /// Closed manifolds (no boundary).
    pub fn is_closed(&self) -> bool {
        matches!(
            self,
            DomainSpec::FlatTorus { .. } | DomainSpec::SphereS2 { .. }
        )
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::domain("DomainSpec", msg));
        match self {
            DomainSpec::Rectangle {
                width,
                height,
                resolution,
            } => {
                if !(*width > 0.0 && *height > 0.0) {
                    return bad(format!("rectangle sides must be positive: {width} x {height}"));
                }
                if *resolution < 4 {
                    return bad("resolution must be >= 4 per unit length".into());
                }
            }
            DomainSpec::Box3 { sides, resolution } => {
                if sides.iter().any(|&s| !(s > 0.0)) {
                    return bad(format!("box sides must be positive: {sides:?}"));
                }
                if *resolution < 4 {
                    return bad("resolution must be >= 4 per unit length".into());
                }
            }
            DomainSpec::FlatTorus {
                lengths,
                resolution,
            } => {
                if lengths.len() != 2 && lengths.len() != 3 {
                    return bad(format!("torus must have 2 or 3 circumferences, got {}", lengths.len()));
                }
                if lengths.iter().any(|&l| !(l > 0.0)) {
                    return bad("torus circumferences must be positive".into());
                }
                if *resolution < 4 {
                    return bad("resolution must be >= 4 per unit length".into());
                }
            }
            DomainSpec::Disk { radius, resolution } => {
                if !(*radius > 0.0) {
                    return bad("disk radius must be positive".into());
                }
                if *resolution < 8 {
                    return bad("disk resolution must be >= 8 per unit length".into());
                }
            }
            DomainSpec::SphereS2 { n_lat } => {
                if *n_lat < 8 {
                    return bad("sphere needs at least 8 latitude rings".into());
                }
            }
            DomainSpec::MaskedGrid { shape, h, .. } => {
                if !(*h > 0.0) {
                    return bad("grid spacing must be positive".into());
                }
                match shape {
                    MaskShape::Rectangle { width, height } => {
                        if !(*width > 0.0 && *height > 0.0) {
                            return bad("mask rectangle sides must be positive".into());
                        }
                    }
                    MaskShape::LShape { arm } => {
                        if !(*arm > 0.0) {
                            return bad("L-shape arm must be positive".into());
                        }
                    }
                    MaskShape::Disk { radius } => {
                        if !(*radius > 0.0) {
                            return bad("mask disk radius must be positive".into());
                        }
                    }
                    MaskShape::Bitmap { nx, ny, bits } => {
                        if bits.len() != nx * ny {
                            return bad(format!(
                                "bitmap length {} does not match {nx} x {ny}",
                                bits.len()
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum WeightScheme {
    Uniform(f64),
    PerPoint(Vec<f64>),
}

#[derive(Debug, Clone)]
enum GridKind {
    Cart2 {
        nx: usize,
        ny: usize,
        hx: f64,
        hy: f64,
        periodic: bool,
    },
    Cart3 {
        n: [usize; 3],
        h: [f64; 3],
        periodic: bool,
    },
    /// regular latitude rings plus two pole points appended at the end
    Sphere { n_lat: usize, n_lon: usize },
    Masked {
        nx: usize,
        ny: usize,
        h: f64,
        origin: (f64, f64),
        /// lattice position of index 0 along each axis, in units of h:
        /// 0.5 for cell centers (quadrature grids), 1.0 for interior
        /// vertices (finite differences, second-order at the boundary)
        offset: f64,
        /// active id -> raw cell index
        cells: Vec<usize>,
        /// raw cell index -> active id (-1 when inactive)
        active_of_cell: Vec<i32>,
        bc: BoundaryCondition,
    },
}

/// Sampling lattice of a domain: active points, measure weights and the
/// neighbor relation (including periodic and spherical wraparound).
#[derive(Debug, Clone)]
pub struct Grid {
    domain: DomainSpec,
    kind: GridKind,
    weights: WeightScheme,
    total_measure: f64,
    len: usize,
}

impl Grid {
    pub fn build(domain: &DomainSpec) -> Result<Arc<Grid>> {
        domain.validate()?;
        let grid = match domain {
            DomainSpec::Rectangle {
                width,
                height,
                resolution,
            } => {
                let nx = cells_for(*width, *resolution);
                let ny = cells_for(*height, *resolution);
                let hx = width / nx as f64;
                let hy = height / ny as f64;
                Grid {
                    domain: domain.clone(),
                    kind: GridKind::Cart2 {
                        nx,
                        ny,
                        hx,
                        hy,
                        periodic: false,
                    },
                    weights: WeightScheme::Uniform(hx * hy),
                    total_measure: width * height,
                    len: nx * ny,
                }
            }
            DomainSpec::Box3 { sides, resolution } => {
                let n = [
                    cells_for(sides[0], *resolution),
                    cells_for(sides[1], *resolution),
                    cells_for(sides[2], *resolution),
                ];
                let h = [
                    sides[0] / n[0] as f64,
                    sides[1] / n[1] as f64,
                    sides[2] / n[2] as f64,
                ];
                Grid {
                    domain: domain.clone(),
                    kind: GridKind::Cart3 {
                        n,
                        h,
                        periodic: false,
                    },
                    weights: WeightScheme::Uniform(h[0] * h[1] * h[2]),
                    total_measure: sides.iter().product(),
                    len: n[0] * n[1] * n[2],
                }
            }
            DomainSpec::FlatTorus {
                lengths,
                resolution,
            } => {
                if lengths.len() == 2 {
                    let nx = cells_for(lengths[0], *resolution);
                    let ny = cells_for(lengths[1], *resolution);
                    let hx = lengths[0] / nx as f64;
                    let hy = lengths[1] / ny as f64;
                    Grid {
                        domain: domain.clone(),
                        kind: GridKind::Cart2 {
                            nx,
                            ny,
                            hx,
                            hy,
                            periodic: true,
                        },
                        weights: WeightScheme::Uniform(hx * hy),
                        total_measure: lengths[0] * lengths[1],
                        len: nx * ny,
                    }
                } else {
                    let n = [
                        cells_for(lengths[0], *resolution),
                        cells_for(lengths[1], *resolution),
                        cells_for(lengths[2], *resolution),
                    ];
                    let h = [
                        lengths[0] / n[0] as f64,
                        lengths[1] / n[1] as f64,
                        lengths[2] / n[2] as f64,
                    ];
                    Grid {
                        domain: domain.clone(),
                        kind: GridKind::Cart3 {
                            n,
                            h,
                            periodic: true,
                        },
                        weights: WeightScheme::Uniform(h[0] * h[1] * h[2]),
                        total_measure: lengths.iter().product(),
                        len: n[0] * n[1] * n[2],
                    }
                }
            }
            DomainSpec::Disk { radius, resolution } => {
                let nx = 2 * cells_for(*radius, *resolution);
                let h = 2.0 * radius / nx as f64;
                let r2 = radius * radius;
                build_masked(
                    domain.clone(),
                    nx,
                    nx,
                    h,
                    (-radius, -radius),
                    0.5,
                    BoundaryCondition::Dirichlet,
                    |x, y| x * x + y * y < r2,
                )?
            }
            DomainSpec::SphereS2 { n_lat } => {
                let n_lat = *n_lat as usize;
                let n_lon = 2 * n_lat;
                let dtheta = PI / n_lat as f64;
                let dphi = 2.0 * PI / n_lon as f64;
                let mut weights = Vec::with_capacity(n_lat * n_lon + 2);
                for j in 0..n_lat {
                    let theta = (j as f64 + 0.5) * dtheta;
                    let w = theta.sin() * dtheta * dphi;
                    weights.extend(std::iter::repeat(w).take(n_lon));
                }
                let pole_w = 2.0 * PI * (1.0 - (0.5 * dtheta).cos());
                weights.push(pole_w);
                weights.push(pole_w);
                let total = weights.iter().sum();
                Grid {
                    domain: domain.clone(),
                    kind: GridKind::Sphere { n_lat, n_lon },
                    weights: WeightScheme::PerPoint(weights),
                    total_measure: total,
                    len: n_lat * n_lon + 2,
                }
            }
            // Finite-difference lattices: Dirichlet grids live on interior
            // vertices (the zero boundary sits exactly on the lattice);
            // Neumann grids live on cell centers (the mirror plane sits
            // exactly on the boundary). Both are second-order on straight
            // boundaries.
            DomainSpec::MaskedGrid { shape, h, bc } => {
                let offset = match bc {
                    BoundaryCondition::Dirichlet => 1.0,
                    BoundaryCondition::Neumann => 0.5,
                };
                let counts = |len: f64| -> usize {
                    let cells = (len / h).round() as usize;
                    match bc {
                        BoundaryCondition::Dirichlet => cells.saturating_sub(1).max(1),
                        BoundaryCondition::Neumann => cells.max(1),
                    }
                };
                match shape {
                    MaskShape::Rectangle { width, height } => build_masked(
                        domain.clone(),
                        counts(*width),
                        counts(*height),
                        *h,
                        (0.0, 0.0),
                        offset,
                        *bc,
                        |_, _| true,
                    )?,
                    MaskShape::LShape { arm } => {
                        let n = counts(2.0 * arm);
                        let a = *arm;
                        let hh = *h;
                        build_masked(
                            domain.clone(),
                            n,
                            n,
                            *h,
                            (0.0, 0.0),
                            offset,
                            *bc,
                            move |x, y| !(x > a - 0.5 * hh && y > a - 0.5 * hh),
                        )?
                    }
                    MaskShape::Disk { radius } => {
                        let n = counts(2.0 * radius);
                        let r2 = radius * radius;
                        build_masked(
                            domain.clone(),
                            n,
                            n,
                            *h,
                            (-radius, -radius),
                            offset,
                            *bc,
                            |x, y| x * x + y * y < r2,
                        )?
                    }
                    MaskShape::Bitmap { nx, ny, bits } => {
                        let origin = (0.0, 0.0);
                        let bits = bits.clone();
                        let hh = *h;
                        let nxc = *nx;
                        build_masked(
                            domain.clone(),
                            *nx,
                            *ny,
                            *h,
                            origin,
                            offset,
                            *bc,
                            move |x, y| {
                                let i = ((x - origin.0) / hh - offset).round() as usize;
                                let j = ((y - origin.1) / hh - offset).round() as usize;
                                bits[j * nxc + i] != 0
                            },
                        )?
                    }
                }
            }
        };
        Ok(Arc::new(grid))
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    /// Number of active sample points.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Measure weight of one sample point.
    pub fn weight(&self, i: usize) -> f64 {
        match &self.weights {
            WeightScheme::Uniform(w) => *w,
            WeightScheme::PerPoint(w) => w[i],
        }
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    /// Representative grid spacing (dtheta on the sphere).
    pub fn spacing(&self) -> f64 {
        match &self.kind {
            GridKind::Cart2 { hx, .. } => *hx,
            GridKind::Cart3 { h, .. } => h[0],
            GridKind::Sphere { n_lat, .. } => PI / *n_lat as f64,
            GridKind::Masked { h, .. } => *h,
        }
    }

    /// Embedded position of a sample point (z = 0 for planar domains; unit
    /// sphere points in Cartesian coordinates).
    pub fn position(&self, i: usize) -> [f64; 3] {
        match &self.kind {
            GridKind::Cart2 { nx, hx, hy, .. } => {
                let (ix, iy) = (i % nx, i / nx);
                [(ix as f64 + 0.5) * hx, (iy as f64 + 0.5) * hy, 0.0]
            }
            GridKind::Cart3 { n, h, .. } => {
                let ix = i % n[0];
                let iy = (i / n[0]) % n[1];
                let iz = i / (n[0] * n[1]);
                [
                    (ix as f64 + 0.5) * h[0],
                    (iy as f64 + 0.5) * h[1],
                    (iz as f64 + 0.5) * h[2],
                ]
            }
            GridKind::Sphere { n_lat, n_lon } => {
                let (theta, phi) = self.sphere_angles(i, *n_lat, *n_lon);
                [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
            }
            GridKind::Masked {
                nx,
                h,
                origin,
                offset,
                cells,
                ..
            } => {
                let cell = cells[i];
                let (ix, iy) = (cell % nx, cell / nx);
                [
                    origin.0 + (ix as f64 + offset) * h,
                    origin.1 + (iy as f64 + offset) * h,
                    0.0,
                ]
            }
        }
    }

    fn sphere_angles(&self, i: usize, n_lat: usize, n_lon: usize) -> (f64, f64) {
        let dtheta = PI / n_lat as f64;
        let dphi = 2.0 * PI / n_lon as f64;
        let regular = n_lat * n_lon;
        if i == regular {
            (0.0, 0.0)
        } else if i == regular + 1 {
            (PI, 0.0)
        } else {
            let j = i / n_lon;
            let k = i % n_lon;
            ((j as f64 + 0.5) * dtheta, k as f64 * dphi)
        }
    }

    /// (theta, phi) of a sphere point; None for other grids.
    pub fn angles(&self, i: usize) -> Option<(f64, f64)> {
        match &self.kind {
            GridKind::Sphere { n_lat, n_lon } => Some(self.sphere_angles(i, *n_lat, *n_lon)),
            _ => None,
        }
    }

    /// Push the active neighbors of point `i` into `out` (cleared first).
    pub fn neighbors(&self, i: usize, out: &mut Vec<usize>) {
        out.clear();
        match &self.kind {
            GridKind::Cart2 {
                nx,
                ny,
                periodic,
                ..
            } => {
                let (ix, iy) = (i % nx, i / nx);
                push_lattice_neighbor(out, ix, iy, *nx, *ny, *periodic);
            }
            GridKind::Cart3 { n, periodic, .. } => {
                let ix = i % n[0];
                let iy = (i / n[0]) % n[1];
                let iz = i / (n[0] * n[1]);
                let idx = |x: usize, y: usize, z: usize| x + n[0] * (y + n[1] * z);
                let mut push_ax = |c: usize, max: usize, lo: &dyn Fn(usize) -> usize, hi: &dyn Fn(usize) -> usize| {
                    if c > 0 {
                        out.push(lo(c - 1));
                    } else if *periodic {
                        out.push(lo(max - 1));
                    }
                    if c + 1 < max {
                        out.push(hi(c + 1));
                    } else if *periodic {
                        out.push(hi(0));
                    }
                };
                push_ax(ix, n[0], &|x| idx(x, iy, iz), &|x| idx(x, iy, iz));
                push_ax(iy, n[1], &|y| idx(ix, y, iz), &|y| idx(ix, y, iz));
                push_ax(iz, n[2], &|z| idx(ix, iy, z), &|z| idx(ix, iy, z));
            }
            GridKind::Sphere { n_lat, n_lon } => {
                let regular = n_lat * n_lon;
                if i == regular {
                    out.extend(0..*n_lon);
                    return;
                }
                if i == regular + 1 {
                    out.extend((n_lat - 1) * n_lon..regular);
                    return;
                }
                let j = i / n_lon;
                let k = i % n_lon;
                out.push(j * n_lon + (k + 1) % n_lon);
                out.push(j * n_lon + (k + n_lon - 1) % n_lon);
                if j > 0 {
                    out.push((j - 1) * n_lon + k);
                } else {
                    out.push(regular);
                }
                if j + 1 < *n_lat {
                    out.push((j + 1) * n_lon + k);
                } else {
                    out.push(regular + 1);
                }
            }
            GridKind::Masked {
                nx,
                ny,
                cells,
                active_of_cell,
                ..
            } => {
                let cell = cells[i];
                let (ix, iy) = (cell % nx, cell / nx);
                let mut raw = Vec::with_capacity(4);
                push_lattice_neighbor(&mut raw, ix, iy, *nx, *ny, false);
                for r in raw {
                    let a = active_of_cell[r];
                    if a >= 0 {
                        out.push(a as usize);
                    }
                }
            }
        }
    }

    /// True when the point's cell touches the domain boundary (outer edge or
    /// masked-out neighbor). Always false on closed manifolds.
    pub fn is_boundary(&self, i: usize) -> bool {
        match &self.kind {
            GridKind::Cart2 {
                nx, ny, periodic, ..
            } => {
                if *periodic {
                    return false;
                }
                let (ix, iy) = (i % nx, i / nx);
                ix == 0 || iy == 0 || ix + 1 == *nx || iy + 1 == *ny
            }
            GridKind::Cart3 { n, periodic, .. } => {
                if *periodic {
                    return false;
                }
                let ix = i % n[0];
                let iy = (i / n[0]) % n[1];
                let iz = i / (n[0] * n[1]);
                ix == 0
                    || iy == 0
                    || iz == 0
                    || ix + 1 == n[0]
                    || iy + 1 == n[1]
                    || iz + 1 == n[2]
            }
            GridKind::Sphere { .. } => false,
            GridKind::Masked {
                nx,
                ny,
                cells,
                active_of_cell,
                ..
            } => {
                let cell = cells[i];
                let (ix, iy) = (cell % nx, cell / nx);
                if ix == 0 || iy == 0 || ix + 1 == *nx || iy + 1 == *ny {
                    return true;
                }
                let mut raw = Vec::with_capacity(4);
                push_lattice_neighbor(&mut raw, ix, iy, *nx, *ny, false);
                raw.len() < 4 || raw.iter().any(|&r| active_of_cell[r] < 0)
            }
        }
    }

    /// Whether this is a masked planar grid (sampled disk or FD domain).
    pub fn masked_kind(&self) -> bool {
        matches!(self.kind, GridKind::Masked { .. })
    }

    pub(crate) fn masked_parts(
        &self,
    ) -> Option<(usize, usize, f64, BoundaryCondition, &[usize], &[i32])> {
        match &self.kind {
            GridKind::Masked {
                nx,
                ny,
                h,
                bc,
                cells,
                active_of_cell,
                ..
            } => Some((*nx, *ny, *h, *bc, cells, active_of_cell)),
            _ => None,
        }
    }

    pub(crate) fn cart2_parts(&self) -> Option<(usize, usize, f64, f64, bool)> {
        match &self.kind {
            GridKind::Cart2 {
                nx,
                ny,
                hx,
                hy,
                periodic,
            } => Some((*nx, *ny, *hx, *hy, *periodic)),
            _ => None,
        }
    }

    pub(crate) fn cart3_parts(&self) -> Option<([usize; 3], [f64; 3], bool)> {
        match &self.kind {
            GridKind::Cart3 { n, h, periodic } => Some((*n, *h, *periodic)),
            _ => None,
        }
    }

}

fn cells_for(length: f64, resolution: u32) -> usize {
    ((length * resolution as f64).ceil() as usize).max(4)
}

fn push_lattice_neighbor(
    out: &mut Vec<usize>,
    ix: usize,
    iy: usize,
    nx: usize,
    ny: usize,
    periodic: bool,
) {
    let idx = |x: usize, y: usize| y * nx + x;
    if ix > 0 {
        out.push(idx(ix - 1, iy));
    } else if periodic {
        out.push(idx(nx - 1, iy));
    }
    if ix + 1 < nx {
        out.push(idx(ix + 1, iy));
    } else if periodic {
        out.push(idx(0, iy));
    }
    if iy > 0 {
        out.push(idx(ix, iy - 1));
    } else if periodic {
        out.push(idx(ix, ny - 1));
    }
    if iy + 1 < ny {
        out.push(idx(ix, iy + 1));
    } else if periodic {
        out.push(idx(ix, 0));
    }
}

#[allow(clippy::too_many_arguments)]
fn build_masked(
    domain: DomainSpec,
    nx: usize,
    ny: usize,
    h: f64,
    origin: (f64, f64),
    offset: f64,
    bc: BoundaryCondition,
    inside: impl Fn(f64, f64) -> bool,
) -> Result<Grid> {
    let mut cells = Vec::new();
    let mut active_of_cell = vec![-1i32; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let x = origin.0 + (ix as f64 + offset) * h;
            let y = origin.1 + (iy as f64 + offset) * h;
            if inside(x, y) {
                active_of_cell[iy * nx + ix] = cells.len() as i32;
                cells.push(iy * nx + ix);
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::domain("Grid::build", "mask has no active cells"));
    }
    let len = cells.len();
    let grid = Grid {
        domain,
        kind: GridKind::Masked {
            nx,
            ny,
            h,
            origin,
            offset,
            cells,
            active_of_cell,
            bc,
        },
        weights: WeightScheme::Uniform(h * h),
        total_measure: len as f64 * h * h,
        len,
    };
    // the active set must be one connected component
    let components = count_components(&grid);
    if components != 1 {
        return Err(Error::DisconnectedMask { components });
    }
    Ok(grid)
}

fn count_components(grid: &Grid) -> usize {
    let n = grid.len();
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    let mut nbrs = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(p) = stack.pop() {
            grid.neighbors(p, &mut nbrs);
            for &q in &nbrs {
                if !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    components
}

/// Samples of a function on a domain grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Arc<[f64]>,
}

impl ScalarField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LayoutMismatch {
                msg: format!(
                    "{} values for a grid of {} points",
                    values.len(),
                    grid.len()
                ),
            });
        }
        Ok(ScalarField {
            grid,
            values: values.into(),
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Weighted mean of the samples.
    pub fn mean(&self) -> f64 {
        let s: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| v * self.grid.weight(i))
            .sum();
        s / self.grid.total_measure()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ScalarField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Weighted L^p norm of a field; `p = f64::INFINITY` gives the max norm.
pub fn lp_norm(field: &ScalarField, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(field
            .values()
            .iter()
            .fold(0.0f64, |acc, &v| acc.max(v.abs())));
    }
    if !(p >= 1.0) {
        return Err(Error::domain(
            "lp_norm",
            format!("exponent must be >= 1 or infinity, got {p}"),
        ));
    }
    let grid = field.grid();
    let sum: f64 = field
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| v.abs().powf(p) * grid.weight(i))
        .sum();
    Ok(sum.powf(1.0 / p))
}

/// An eigenvalue with its sampled eigenfunction.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    /// 1-based position in the spectrum (counting multiplicities).
    pub index: usize,
    pub field: ScalarField,
    /// Discrete L^2 norm of `field` (1 after normalization).
    pub norm_l2: f64,
}

/// Rescale so the discrete L^2 norm is 1. Idempotent.
pub fn normalize(pair: &EigenPair) -> Result<EigenPair> {
    let norm = lp_norm(&pair.field, 2.0)?;
    if norm == 0.0 {
        return Err(Error::ZeroField("normalize"));
    }
    Ok(EigenPair {
        lambda: pair.lambda,
        index: pair.index,
        field: pair.field.scaled(1.0 / norm),
        norm_l2: 1.0,
    })
}

/// Compute a spectrum, dispatching between the analytic catalog and the
/// finite-difference solver on the domain kind.
pub fn spectrum(domain: &DomainSpec, count: usize) -> Result<Vec<EigenPair>> {
    match domain {
        DomainSpec::MaskedGrid { .. } => fd_spectrum(domain, count),
        _ => analytic_spectrum(domain, count),
    }
}
