//! Orbital/spin split of the Poynting vector,
//! `(2/m) Im[E* x curl E] = (2/m) Im[E*_j grad E_j] + (1/m) curl Im[E* x E]`,
//! valid for divergence-free fields.

use crate::error::{Error, Result};
use crate::field::C64;
use crate::grid::Grid2D;
use crate::spectral::{DerivativeMethod, Differentiator};

#[derive(Debug, Clone, PartialEq)]
pub struct BerryDecomposition {
    pub orbital: [Vec<f64>; 3],
    pub spin: [Vec<f64>; 3],
    /// `orbital + spin`.
    pub total: [Vec<f64>; 3],
    /// `(2/m) Im[E* x curl E]`.
    pub curl_form: [Vec<f64>; 3],
    /// `||total - curl_form|| / ||curl_form||` (L2 over all components).
    pub residual: f64,
}

fn l2(v: &[Vec<f64>; 3]) -> f64 {
    v.iter().flat_map(|c| c.iter()).map(|x| x * x).sum::<f64>().sqrt()
}

/// Decompose the Poynting vector of a field slice `e` on `grid`.
/// `dz` supplies `dE/dz` on the slice; `None` means no z dependence.
pub fn berry_decompose(
    e: [&[C64]; 3],
    dz: Option<[&[C64]; 3]>,
    grid: &Grid2D,
    mass: f64,
    method: DerivativeMethod,
) -> Result<BerryDecomposition> {
    let n = grid.len();
    if e.iter().any(|c| c.len() != n) || dz.is_some_and(|d| d.iter().any(|c| c.len() != n)) {
        return Err(Error::GridMismatch("field components do not match grid".into()));
    }
    let d = Differentiator::new(grid, method)?;
    let zero = vec![C64::new(0.0, 0.0); n];
    let mut g: Vec<[Vec<C64>; 3]> = Vec::with_capacity(3);
    for (j, comp) in e.iter().enumerate() {
        let (gx, gy) = d.gradient(comp)?;
        let gz = dz.map_or_else(|| zero.clone(), |dzv| dzv[j].to_vec());
        g.push([gx, gy, gz]);
    }
    // grad[j][i] = d_i E_j
    let inv_m = 1.0 / mass;

    let mut orbital = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut curl_form = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut a = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut dz_a = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for p in 0..n {
        let ev = [e[0][p], e[1][p], e[2][p]];
        let ec = ev.map(|c| c.conj());
        for i in 0..3 {
            orbital[i][p] = 2.0 * inv_m * (0..3).map(|j| (ec[j] * g[j][i][p]).im).sum::<f64>();
        }
        let curl = [
            g[2][1][p] - g[1][2][p],
            g[0][2][p] - g[2][0][p],
            g[1][0][p] - g[0][1][p],
        ];
        let cr = cross(ec, curl);
        for i in 0..3 {
            curl_form[i][p] = 2.0 * inv_m * cr[i].im;
        }
        let ax = cross(ec, ev);
        let dzv = [g[0][2][p], g[1][2][p], g[2][2][p]];
        let dax = {
            let t1 = cross(dzv.map(|c| c.conj()), ev);
            let t2 = cross(ec, dzv);
            [t1[0] + t2[0], t1[1] + t2[1], t1[2] + t2[2]]
        };
        for i in 0..3 {
            a[i][p] = ax[i].im;
            dz_a[i][p] = dax[i].im;
        }
    }
    let (ax_y, az_x, az_y, ay_x) = (d.dy_real(&a[0])?, d.dx_real(&a[2])?, d.dy_real(&a[2])?, d.dx_real(&a[1])?);
    let mut spin = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for p in 0..n {
        spin[0][p] = inv_m * (az_y[p] - dz_a[1][p]);
        spin[1][p] = inv_m * (dz_a[0][p] - az_x[p]);
        spin[2][p] = inv_m * (ay_x[p] - ax_y[p]);
    }
    let total = [0, 1, 2].map(|i| orbital[i].iter().zip(&spin[i]).map(|(a, b)| a + b).collect::<Vec<f64>>());
    let diff = [0, 1, 2].map(|i| total[i].iter().zip(&curl_form[i]).map(|(a, b)| a - b).collect::<Vec<f64>>());
    let scale = l2(&curl_form).max(l2(&orbital));
    let residual = if scale == 0.0 { 0.0 } else { l2(&diff) / scale };
    Ok(BerryDecomposition { orbital, spin, total, curl_form, residual })
}

fn cross(a: [C64; 3], b: [C64; 3]) -> [C64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
