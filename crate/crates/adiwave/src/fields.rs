//! Grids, field layout, material sampling, and snapshot export.
//!
//! Field matrices store y along rows and x along columns. The two schemes
//! lay their unknowns out differently:
//!
//! * Compact (nodal): pressure and both velocities live on the (N+1)^2 nodes.
//! * Mimetic (staggered): pressure lives on the (N+2)^2 tensor grid of cell
//!   centers plus the two boundary abscissae; the x-velocity on x-nodes and
//!   y-centers, (N+2) x (N+1); the y-velocity on x-centers and y-nodes,
//!   (N+1) x (N+2).
//!
//! Pressure boundary data always occupies the outermost ring of the pressure
//! matrix, because the boundary abscissae are members of both axes.

use crate::error::Error;
use crate::linalg::{DenseMatrix, MatrixView, MatrixViewMut};
use std::io::{self, Write};

/// Spatial discretization family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Nodal compact finite differences ("cfd").
    Compact,
    /// Staggered mimetic finite differences ("mfd").
    Mimetic,
}

impl Scheme {
    pub fn tag(self) -> &'static str {
        match self {
            Scheme::Compact => "cfd",
            Scheme::Mimetic => "mfd",
        }
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "cfd" => Ok(Scheme::Compact),
            "mfd" => Ok(Scheme::Mimetic),
            other => Err(Error::InvalidConfig(format!(
                "unknown scheme '{other}' (expected cfd or mfd)"
            ))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Uniform grid on the unit square with N cells per side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub h: f64,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self, Error> {
        if n < crate::operators::MIN_CELLS {
            return Err(Error::TooSmall {
                what: "grid cells",
                minimum: crate::operators::MIN_CELLS,
                got: n,
            });
        }
        Ok(GridSpec {
            n,
            h: 1.0 / n as f64,
        })
    }

    /// The N+1 node abscissae 0, h, 2h, ..., 1.
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| i as f64 * self.h).collect()
    }

    /// The N+2 abscissae 0, h/2, 3h/2, ..., 1-h/2, 1: every cell center plus
    /// both boundary points. Strictly increasing; first gap is h/2.
    pub fn centers_bounded(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n + 2);
        out.push(0.0);
        for i in 0..self.n {
            out.push((i as f64 + 0.5) * self.h);
        }
        out.push(1.0);
        out
    }
}

/// One snapshot of the three coupled fields.
#[derive(Debug, Clone)]
pub struct WaveState {
    pub scheme: Scheme,
    /// Pressure.
    pub u: DenseMatrix,
    /// x-velocity.
    pub v: DenseMatrix,
    /// y-velocity.
    pub w: DenseMatrix,
    pub time: f64,
}

/// Zero-initialized state with the scheme's shapes for an N-cell grid.
pub fn allocate_state(scheme: Scheme, n: usize) -> Result<WaveState, Error> {
    let _ = GridSpec::new(n)?;
    let (u, v, w) = match scheme {
        Scheme::Compact => (
            DenseMatrix::zeros(n + 1, n + 1),
            DenseMatrix::zeros(n + 1, n + 1),
            DenseMatrix::zeros(n + 1, n + 1),
        ),
        Scheme::Mimetic => (
            DenseMatrix::zeros(n + 2, n + 2),
            DenseMatrix::zeros(n + 2, n + 1),
            DenseMatrix::zeros(n + 1, n + 2),
        ),
    };
    Ok(WaveState {
        scheme,
        u,
        v,
        w,
        time: 0.0,
    })
}

impl WaveState {
    /// Number of grid cells per side, recovered from the pressure shape.
    pub fn n(&self) -> usize {
        match self.scheme {
            Scheme::Compact => self.u.rows() - 1,
            Scheme::Mimetic => self.u.rows() - 2,
        }
    }
}

// ---------------------------------------------------------------------------
// Write-through views
// ---------------------------------------------------------------------------

fn need(m: &DenseMatrix, rows: usize, cols: usize, what: &'static str) -> Result<(), Error> {
    if m.rows() < rows {
        return Err(Error::TooSmall {
            what,
            minimum: rows,
            got: m.rows(),
        });
    }
    if m.cols() < cols {
        return Err(Error::TooSmall {
            what,
            minimum: cols,
            got: m.cols(),
        });
    }
    Ok(())
}

/// All but the outermost ring.
pub fn interior_view(m: &DenseMatrix) -> Result<MatrixView<'_>, Error> {
    need(m, 3, 3, "interior view")?;
    Ok(MatrixView::new(m, 1..m.rows() - 1, 1..m.cols() - 1))
}

pub fn interior_view_mut(m: &mut DenseMatrix) -> Result<MatrixViewMut<'_>, Error> {
    need(m, 3, 3, "interior view")?;
    let (rows, cols) = m.shape();
    Ok(MatrixViewMut::new(m, 1..rows - 1, 1..cols - 1))
}

/// All but the first and last rows.
pub fn reduced_rows(m: &DenseMatrix) -> Result<MatrixView<'_>, Error> {
    need(m, 3, 1, "row-reduced view")?;
    Ok(MatrixView::new(m, 1..m.rows() - 1, 0..m.cols()))
}

pub fn reduced_rows_mut(m: &mut DenseMatrix) -> Result<MatrixViewMut<'_>, Error> {
    need(m, 3, 1, "row-reduced view")?;
    let (rows, cols) = m.shape();
    Ok(MatrixViewMut::new(m, 1..rows - 1, 0..cols))
}

/// All but the first and last columns.
pub fn reduced_cols(m: &DenseMatrix) -> Result<MatrixView<'_>, Error> {
    need(m, 1, 3, "column-reduced view")?;
    Ok(MatrixView::new(m, 0..m.rows(), 1..m.cols() - 1))
}

pub fn reduced_cols_mut(m: &mut DenseMatrix) -> Result<MatrixViewMut<'_>, Error> {
    need(m, 1, 3, "column-reduced view")?;
    let (rows, cols) = m.shape();
    Ok(MatrixViewMut::new(m, 0..rows, 1..cols - 1))
}

// ---------------------------------------------------------------------------
// Material fields
// ---------------------------------------------------------------------------

/// Material coefficients pre-sampled at every point where the solvers need
/// them, so heterogeneous media are supported by construction.
///
/// * `kappa_interior`: bulk modulus at the pressure update points (interior
///   nodes for the compact scheme, cell centers for the mimetic one).
/// * `r_v`: 1/rho at the x-velocity update points (all x-columns, interior
///   y-rows of the velocity matrix).
/// * `r_w`: 1/rho at the y-velocity update points (all y-rows, interior
///   x-columns).
#[derive(Debug, Clone)]
pub struct MaterialField {
    pub kappa_interior: DenseMatrix,
    pub r_v: DenseMatrix,
    pub r_w: DenseMatrix,
    /// Largest sqrt(kappa/rho) over all sampled points; sets the time step.
    pub c_max: f64,
}

impl MaterialField {
    /// Samples kappa(x, y) and rho(x, y) on the scheme's update points.
    pub fn from_fns(
        grid: &GridSpec,
        scheme: Scheme,
        kappa: impl Fn(f64, f64) -> f64,
        rho: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let nodes = grid.nodes();
        let cb = grid.centers_bounded();
        let mut c_max = 0.0_f64;
        let mut sample = |xs: &[f64], ys: &[f64], recip: bool| -> DenseMatrix {
            DenseMatrix::from_fn(ys.len(), xs.len(), |r, c| {
                let (x, y) = (xs[c], ys[r]);
                let (k, rh) = (kappa(x, y), rho(x, y));
                c_max = c_max.max((k / rh).sqrt());
                if recip {
                    1.0 / rh
                } else {
                    k
                }
            })
        };
        let (kappa_interior, r_v, r_w) = match scheme {
            Scheme::Compact => {
                let inner = &nodes[1..nodes.len() - 1];
                (
                    sample(inner, inner, false),
                    sample(&nodes, inner, true),
                    sample(inner, &nodes, true),
                )
            }
            Scheme::Mimetic => {
                let centers = &cb[1..cb.len() - 1];
                (
                    sample(centers, centers, false),
                    sample(&nodes, centers, true),
                    sample(centers, &nodes, true),
                )
            }
        };
        MaterialField {
            kappa_interior,
            r_v,
            r_w,
            c_max,
        }
    }

    /// Homogeneous medium.
    pub fn constant(grid: &GridSpec, scheme: Scheme, kappa: f64, rho: f64) -> Self {
        Self::from_fns(grid, scheme, |_, _| kappa, |_, _| rho)
    }
}

// ---------------------------------------------------------------------------
// Snapshot export
// ---------------------------------------------------------------------------

/// Writes the pressure field as CSV with a one-line header:
/// `# scheme=<cfd|mfd> n=<N> time=<t>`, then one comma-separated row of the
/// pressure matrix per line (y along rows, x along columns).
pub fn write_snapshot<W: Write>(state: &WaveState, out: &mut W) -> io::Result<()> {
    writeln!(
        out,
        "# scheme={} n={} time={:e}",
        state.scheme.tag(),
        state.n(),
        state.time
    )?;
    for r in 0..state.u.rows() {
        let row = state.u.row(r);
        let mut line = String::with_capacity(row.len() * 24);
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&format!("{v:e}"));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}
