//! 2D TM-mode Yee grid with a split-field absorbing boundary.
//!
//! Fields are `Ez` (at integer grid nodes and integer time steps) and
//! `Hx`, `Hy` (at edge midpoints and half-integer time steps), advanced in
//! the classic leapfrog pattern. The electric field is stored split as
//! `Ez = Ezx + Ezy`, which lets the absorbing layer damp the two curl
//! contributions with independent, polynomially graded conductivities;
//! outside the absorbing layer both conductivities are zero and the update
//! reduces exactly to the lossless leapfrog scheme.
//!
//! Units are SI: grid spacing in meters, time step in seconds, vacuum
//! light speed `C0`.

use ndarray::{azip, Array2};

use crate::error::VoxError;

/// Vacuum speed of light, m/s.
pub const C0: f64 = 299_792_458.0;
/// Vacuum permeability, H/m.
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;
/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 1.0 / (MU0 * C0 * C0);

/// Boundary condition along y. The x boundary is always a perfect electric
/// conductor (optionally behind an absorbing layer); periodic y is useful
/// for effectively one-dimensional test columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryY {
    Pec,
    Periodic,
}

/// Which sides carry an absorbing layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PmlSides {
    pub left: bool,
    pub right: bool,
    pub bottom: bool,
    pub top: bool,
}

impl PmlSides {
    pub const ALL: Self = Self {
        left: true,
        right: true,
        bottom: true,
        top: true,
    };
    pub const NONE: Self = Self {
        left: false,
        right: false,
        bottom: false,
        top: false,
    };
    pub const X_ONLY: Self = Self {
        left: true,
        right: true,
        bottom: false,
        top: false,
    };
}

/// Split-field absorbing layer parameters: conductivity rises from the
/// inner interface to the wall as `sigma_max * (depth/thickness)^order`,
/// with `sigma_max` chosen for a target normal-incidence reflection `r0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmlSpec {
    pub thickness: usize,
    pub order: f64,
    pub r0: f64,
    pub sides: PmlSides,
}

impl Default for PmlSpec {
    fn default() -> Self {
        Self {
            thickness: 12,
            order: 3.0,
            r0: 1e-6,
            sides: PmlSides::ALL,
        }
    }
}

/// The simulation grid: geometry, material, field state, and the
/// precomputed per-cell update coefficients.
#[derive(Debug, Clone)]
pub struct YeeGrid2D {
    nx: usize,
    ny: usize,
    dx: f64,
    dt: f64,
    boundary_y: BoundaryY,
    /// Split electric field, both (nx, ny), at Ez nodes.
    ezx: Array2<f64>,
    ezy: Array2<f64>,
    /// Hx lives at (i, j+1/2): (nx, ny-1) for PEC y, (nx, ny) periodic.
    hx: Array2<f64>,
    /// Hy lives at (i+1/2, j): (nx-1, ny).
    hy: Array2<f64>,
    /// Update coefficients: Ezx is damped by sigma_x, driven by dHy/dx;
    /// Ezy is damped by sigma_y, driven by -dHx/dy.
    ca_x: Array2<f64>,
    cb_x: Array2<f64>,
    ca_y: Array2<f64>,
    cb_y: Array2<f64>,
    /// Hy is damped by sigma*_x at (i+1/2, j); Hx by sigma*_y at (i, j+1/2).
    /// The magnetic coefficients see vacuum mu everywhere, so they only
    /// vary along the axis of their conductivity profile.
    da_x: Vec<f64>,
    db_x: Vec<f64>,
    da_y: Vec<f64>,
    db_y: Vec<f64>,
    eps_r: Array2<f64>,
    /// Scratch holding the total field ezx + ezy during the H update.
    ez_work: Array2<f64>,
}

/// Graded electric conductivity at position `pos` (in cells, measured on
/// the axis) for a layer of `thickness` cells on a domain of `extent`
/// cells. Returns 0 outside the layer.
fn sigma_profile(pos: f64, extent: usize, spec: &PmlSpec, low_side: bool, high_side: bool) -> f64 {
    let d = spec.thickness as f64;
    if d == 0.0 {
        return 0.0;
    }
    let depth = if low_side && pos < d {
        d - pos
    } else if high_side && pos > (extent - 1) as f64 - d {
        pos - ((extent - 1) as f64 - d)
    } else {
        return 0.0;
    };
    let sigma_max = -(spec.order + 1.0) * EPS0 * C0 * spec.r0.ln() / (2.0 * d);
    sigma_max * (depth / d).powf(spec.order)
}

impl YeeGrid2D {
    /// Builds a grid over `eps_r` (relative permittivity at Ez nodes,
    /// shape (nx, ny)) with time step `dt`. `dt` must satisfy the 2D CFL
    /// bound `dt <= dx / (C0 * sqrt(2))`. `sigma_max` from `pml` is in
    /// units of 1/dx, so the profile only depends on layer thickness in
    /// cells, not on the absolute grid spacing.
    pub fn new(
        eps_r: Array2<f64>,
        dx: f64,
        dt: f64,
        pml: &PmlSpec,
        boundary_y: BoundaryY,
    ) -> Result<Self, VoxError> {
        let (nx, ny) = eps_r.dim();
        if nx < 3 || ny < 2 {
            return Err(VoxError::Config(format!(
                "grid {nx}x{ny} too small for a Yee stencil"
            )));
        }
        if eps_r.iter().any(|&e| e < 1.0 || !e.is_finite()) {
            return Err(VoxError::Config(
                "relative permittivity must be finite and >= 1 everywhere".into(),
            ));
        }
        let cfl = dx / (C0 * std::f64::consts::SQRT_2);
        if dt <= 0.0 || dt > cfl * (1.0 + 1e-12) {
            return Err(VoxError::Config(format!(
                "time step {dt:.3e}s violates the CFL bound {cfl:.3e}s"
            )));
        }
        if pml.thickness > 0 {
            let needs = 2 * pml.thickness + 3;
            if ((pml.sides.left || pml.sides.right) && nx < needs)
                || ((pml.sides.bottom || pml.sides.top) && ny < needs)
            {
                return Err(VoxError::Config(format!(
                    "absorbing layer of {} cells does not fit the {nx}x{ny} grid",
                    pml.thickness
                )));
            }
        }

        let ny_h = match boundary_y {
            BoundaryY::Pec => ny - 1,
            BoundaryY::Periodic => ny,
        };
        // sigma profiles are expressed per meter: divide the per-cell
        // profile by dx so coefficients stay resolution-independent.
        let sig_x = |pos: f64| {
            sigma_profile(pos, nx, pml, pml.sides.left, pml.sides.right) / dx
        };
        let sig_y = |pos: f64| {
            sigma_profile(pos, ny, pml, pml.sides.bottom, pml.sides.top) / dx
        };

        // Electric coefficients at Ez nodes (i, j), material-aware.
        let mut ca_x = Array2::zeros((nx, ny));
        let mut cb_x = Array2::zeros((nx, ny));
        let mut ca_y = Array2::zeros((nx, ny));
        let mut cb_y = Array2::zeros((nx, ny));
        for i in 0..nx {
            for j in 0..ny {
                let eps = EPS0 * eps_r[(i, j)];
                let ax = sig_x(i as f64) * dt / (2.0 * eps);
                let ay = sig_y(j as f64) * dt / (2.0 * eps);
                ca_x[(i, j)] = (1.0 - ax) / (1.0 + ax);
                cb_x[(i, j)] = dt / (eps * dx) / (1.0 + ax);
                ca_y[(i, j)] = (1.0 - ay) / (1.0 + ay);
                cb_y[(i, j)] = dt / (eps * dx) / (1.0 + ay);
            }
        }
        // Magnetic coefficients at the staggered H positions, with the
        // matched magnetic conductivity sigma* = sigma * mu0/eps0, i.e.
        // sigma* dt / (2 mu0) = sigma dt / (2 eps0). They do not depend on
        // the material, so one value per profile position suffices.
        let mut da_y = vec![0.0; ny_h];
        let mut db_y = vec![0.0; ny_h];
        for (j, (da, db)) in da_y.iter_mut().zip(db_y.iter_mut()).enumerate() {
            let b = sig_y(j as f64 + 0.5) * dt / (2.0 * EPS0);
            *da = (1.0 - b) / (1.0 + b);
            *db = dt / (MU0 * dx) / (1.0 + b);
        }
        let mut da_x = vec![0.0; nx - 1];
        let mut db_x = vec![0.0; nx - 1];
        for (i, (da, db)) in da_x.iter_mut().zip(db_x.iter_mut()).enumerate() {
            let b = sig_x(i as f64 + 0.5) * dt / (2.0 * EPS0);
            *da = (1.0 - b) / (1.0 + b);
            *db = dt / (MU0 * dx) / (1.0 + b);
        }

        Ok(Self {
            nx,
            ny,
            dx,
            dt,
            boundary_y,
            ezx: Array2::zeros((nx, ny)),
            ezy: Array2::zeros((nx, ny)),
            hx: Array2::zeros((nx, ny_h)),
            hy: Array2::zeros((nx - 1, ny)),
            ca_x,
            cb_x,
            ca_y,
            cb_y,
            da_x,
            db_x,
            da_y,
            db_y,
            eps_r,
            ez_work: Array2::zeros((nx, ny)),
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Total electric field at node (i, j).
    pub fn ez(&self, i: usize, j: usize) -> f64 {
        self.ezx[(i, j)] + self.ezy[(i, j)]
    }

    /// Total electric field as one array.
    pub fn ez_field(&self) -> Array2<f64> {
        &self.ezx + &self.ezy
    }

    pub fn hx_field(&self) -> &Array2<f64> {
        &self.hx
    }

    pub fn hy_field(&self) -> &Array2<f64> {
        &self.hy
    }

    /// Hx interpolated to the Ez node (i, j): the mean of the two edge
    /// values straddling the node in y.
    pub fn hx_at_node(&self, i: usize, j: usize) -> f64 {
        let lower = match (self.boundary_y, j) {
            (BoundaryY::Pec, 0) => 0.0,
            (BoundaryY::Periodic, 0) => self.hx[(i, self.ny - 1)],
            (_, _) => self.hx[(i, j - 1)],
        };
        let upper = match (self.boundary_y, j) {
            (BoundaryY::Pec, j) if j == self.ny - 1 => 0.0,
            (_, j) => self.hx[(i, j % self.hx.dim().1)],
        };
        0.5 * (lower + upper)
    }

    /// Hy interpolated to the Ez node (i, j): the mean of the two edge
    /// values straddling the node in x (0 beyond the PEC wall).
    pub fn hy_at_node(&self, i: usize, j: usize) -> f64 {
        let left = if i == 0 { 0.0 } else { self.hy[(i - 1, j)] };
        let right = if i == self.nx - 1 {
            0.0
        } else {
            self.hy[(i, j)]
        };
        0.5 * (left + right)
    }

    /// Sets the initial electric field (assigned to the x-split component;
    /// only the total field is physical).
    pub fn set_ez(&mut self, ez: &Array2<f64>) {
        assert_eq!(ez.dim(), (self.nx, self.ny), "field shape mismatch");
        self.ezx.assign(ez);
        self.ezy.fill(0.0);
    }

    /// Adds a soft source: injects `amplitude` into Ez at node (i, j).
    pub fn inject_ez(&mut self, i: usize, j: usize, amplitude: f64) {
        self.ezx[(i, j)] += amplitude;
    }

    /// Advances H by one half step: H^{n-1/2} -> H^{n+1/2} from Ez^n.
    ///
    /// The hot loops run over contiguous row slices so the compiler can
    /// drop bounds checks and vectorize; this routine dominates the cost
    /// of every payoff evaluation together with [`Self::update_e`].
    pub fn update_h(&mut self) {
        let (nx, ny) = (self.nx, self.ny);
        let ny_h = self.hx.dim().1;
        // Total field once per step instead of once per curl read.
        azip!((t in &mut self.ez_work, &a in &self.ezx, &b in &self.ezy) *t = a + b);
        let ez = self.ez_work.as_slice().expect("standard layout");

        // Hx(i, j+1/2) -= db * (Ez(i, j+1) - Ez(i, j))
        let hx = self.hx.as_slice_mut().expect("standard layout");
        let inner = ny - 1;
        for i in 0..nx {
            let e = &ez[i * ny..(i + 1) * ny];
            let h = &mut hx[i * ny_h..(i + 1) * ny_h];
            for ((h, pair), (&da, &db)) in h[..inner]
                .iter_mut()
                .zip(e.windows(2))
                .zip(self.da_y.iter().zip(&self.db_y))
            {
                *h = da * *h - db * (pair[1] - pair[0]);
            }
            if ny_h == ny {
                // Periodic wrap row: the edge above the last node sees the
                // first node again.
                let curl = e[0] - e[inner];
                h[inner] = self.da_y[inner] * h[inner] - self.db_y[inner] * curl;
            }
        }

        // Hy(i+1/2, j) += db * (Ez(i+1, j) - Ez(i, j))
        let hy = self.hy.as_slice_mut().expect("standard layout");
        for i in 0..nx - 1 {
            let e_lo = &ez[i * ny..(i + 1) * ny];
            let e_hi = &ez[(i + 1) * ny..(i + 2) * ny];
            let h = &mut hy[i * ny..(i + 1) * ny];
            let (da, db) = (self.da_x[i], self.db_x[i]);
            for ((h, &a), &b) in h.iter_mut().zip(e_hi).zip(e_lo) {
                *h = da * *h + db * (a - b);
            }
        }
    }

    /// Advances Ez by one half step: Ez^n -> Ez^{n+1} from H^{n+1/2}.
    /// PEC walls (x always; y unless periodic) keep their Ez pinned at 0.
    pub fn update_e(&mut self) {
        let (nx, ny) = (self.nx, self.ny);
        let ny_h = self.hx.dim().1;
        let hx = self.hx.as_slice().expect("standard layout");
        let hy = self.hy.as_slice().expect("standard layout");
        let ezx = self.ezx.as_slice_mut().expect("standard layout");
        let ezy = self.ezy.as_slice_mut().expect("standard layout");
        let ca_x = self.ca_x.as_slice().expect("standard layout");
        let cb_x = self.cb_x.as_slice().expect("standard layout");
        let ca_y = self.ca_y.as_slice().expect("standard layout");
        let cb_y = self.cb_y.as_slice().expect("standard layout");

        for i in 1..nx - 1 {
            let row = i * ny;
            // Hy rows straddling column i; Hx row at i.
            let hy_hi = &hy[row..row + ny];
            let hy_lo = &hy[row - ny..row];
            let hxr = &hx[i * ny_h..(i + 1) * ny_h];

            // Interior nodes j in 1..ny-1 for both field splits.
            let span = row + 1..row + ny - 1;
            for ((ex, (&ca, &cb)), (&a, &b)) in ezx[span.clone()]
                .iter_mut()
                .zip(ca_x[span.clone()].iter().zip(&cb_x[span.clone()]))
                .zip(hy_hi[1..ny - 1].iter().zip(&hy_lo[1..ny - 1]))
            {
                *ex = ca * *ex + cb * (a - b);
            }
            for ((ey, (&ca, &cb)), pair) in ezy[span.clone()]
                .iter_mut()
                .zip(ca_y[span.clone()].iter().zip(&cb_y[span.clone()]))
                .zip(hxr.windows(2))
            {
                *ey = ca * *ey - cb * (pair[1] - pair[0]);
            }

            if self.boundary_y == BoundaryY::Periodic {
                // Wrap nodes j = 0 and j = ny-1 (both interior under
                // periodicity; dHx wraps through the seam).
                for &j in &[0, ny - 1] {
                    let k = row + j;
                    let j_minus = if j == 0 { ny - 1 } else { j - 1 };
                    let dhy = hy_hi[j] - hy_lo[j];
                    let dhx = hxr[j] - hxr[j_minus];
                    ezx[k] = ca_x[k] * ezx[k] + cb_x[k] * dhy;
                    ezy[k] = ca_y[k] * ezy[k] - cb_y[k] * dhx;
                }
            }
        }
    }

    /// Discrete electromagnetic energy of the leapfrog state, using the
    /// staggered product form: with Ez at step n and the caller-saved H at
    /// step n-1/2 alongside the current H at n+1/2,
    /// `U = 1/2 (eps Ez^2 + mu Hx- Hx+ + mu Hy- Hy+)` summed over the grid
    /// (times the constant cell area, omitted). This quantity is exactly
    /// conserved by the source-free lossless scheme.
    pub fn staggered_energy(&self, hx_prev: &Array2<f64>, hy_prev: &Array2<f64>) -> f64 {
        let mut u = 0.0;
        for i in 0..self.nx {
            for j in 0..self.ny {
                let e = self.ezx[(i, j)] + self.ezy[(i, j)];
                u += 0.5 * EPS0 * self.eps_r[(i, j)] * e * e;
            }
        }
        u += 0.5 * MU0 * (hx_prev * &self.hx).sum();
        u += 0.5 * MU0 * (hy_prev * &self.hy).sum();
        u
    }

    /// Largest |Ez| over the grid, for divergence guards.
    pub fn max_abs_ez(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (a, b) in self.ezx.iter().zip(self.ezy.iter()) {
            m = m.max((a + b).abs());
        }
        m
    }
}
