//! Static network model: admittance assembly, Newton-Raphson power flow and
//! Kron reduction.
//!
//! All quantities are per-unit on a common system MVA base. The off-diagonal
//! assembly convention is `Y[i][j] = -1/z_ij` for a unity-tap branch.

use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BusKind {
    Slack,
    Pv,
    Pq,
}

/// A network bus with its power-flow boundary conditions.
///
/// `p_inj`/`q_inj` are net injections (generation minus load) in per-unit.
/// `shunt` is a fixed shunt admittance (capacitor banks enter as `+jb`).
#[derive(Clone, Debug)]
pub struct Bus {
    pub id: usize,
    pub kind: BusKind,
    pub v_mag: f64,
    pub v_ang: f64,
    pub p_inj: f64,
    pub q_inj: f64,
    pub shunt: Complex64,
}

impl Bus {
    pub fn pq(id: usize) -> Self {
        Bus {
            id,
            kind: BusKind::Pq,
            v_mag: 1.0,
            v_ang: 0.0,
            p_inj: 0.0,
            q_inj: 0.0,
            shunt: Complex64::new(0.0, 0.0),
        }
    }
}

/// A series branch (line or transformer). `tap` is the off-nominal ratio on
/// the `from` side; 1.0 for plain lines. `charging_b` is the total line
/// charging susceptance, split half to each terminal.
#[derive(Clone, Debug)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    pub series_z: Complex64,
    pub charging_b: f64,
    pub tap: f64,
}

impl Branch {
    pub fn line(from: usize, to: usize, r: f64, x: f64, b: f64) -> Self {
        Branch { from, to, series_z: Complex64::new(r, x), charging_b: b, tap: 1.0 }
    }

    pub fn xfmr(from: usize, to: usize, r: f64, x: f64, tap: f64) -> Self {
        Branch { from, to, series_z: Complex64::new(r, x), charging_b: 0.0, tap }
    }
}

/// Dense nodal admittance matrix over the labelled nodes.
#[derive(Clone, Debug)]
pub struct AdmittanceMatrix {
    pub y: Array2<Complex64>,
    pub labels: Vec<usize>,
}

impl AdmittanceMatrix {
    pub fn index_of(&self, id: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == id)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }
}

/// Converged power-flow state. `v` is aligned with `labels`.
#[derive(Clone, Debug)]
pub struct PowerFlowSolution {
    pub v: Vec<Complex64>,
    pub labels: Vec<usize>,
    pub mismatch: f64,
    pub iterations: usize,
}

impl PowerFlowSolution {
    pub fn voltage(&self, id: usize) -> Option<Complex64> {
        self.labels.iter().position(|&l| l == id).map(|i| self.v[i])
    }

    /// Complex injections S = V o conj(Y V) at every node.
    pub fn injections(&self, ybus: &AdmittanceMatrix) -> Vec<Complex64> {
        let v = Array1::from_vec(self.v.clone());
        let i = ybus.y.dot(&v);
        self.v.iter().zip(i.iter()).map(|(vk, ik)| vk * ik.conj()).collect()
    }
}

/// Assemble the nodal admittance matrix, including bus shunts, line charging
/// and off-nominal taps.
pub fn build_ybus(buses: &[Bus], branches: &[Branch]) -> Result<AdmittanceMatrix> {
    let labels: Vec<usize> = buses.iter().map(|b| b.id).collect();
    for (k, b) in buses.iter().enumerate() {
        if labels[..k].contains(&b.id) {
            return Err(Error::DuplicateBusId(b.id));
        }
    }
    let n = buses.len();
    let idx = |id: usize, br: &Branch| -> Result<usize> {
        labels
            .iter()
            .position(|&l| l == id)
            .ok_or(Error::UnknownBus { from: br.from, to: br.to, unknown: id })
    };
    let mut y = Array2::<Complex64>::zeros((n, n));
    for br in branches {
        let f = idx(br.from, br)?;
        let t = idx(br.to, br)?;
        let ys = 1.0 / br.series_z;
        let tap = br.tap;
        let half_b = Complex64::new(0.0, br.charging_b / 2.0);
        y[[f, f]] += ys / (tap * tap) + half_b;
        y[[t, t]] += ys + half_b;
        y[[f, t]] -= ys / tap;
        y[[t, f]] -= ys / tap;
    }
    for (k, b) in buses.iter().enumerate() {
        y[[k, k]] += b.shunt;
    }
    Ok(AdmittanceMatrix { y, labels })
}

/// Newton-Raphson power flow in polar form with a flat start.
///
/// PV buses hold `v_mag` and `p_inj`; the slack bus holds `v_mag` and
/// `v_ang`. The returned mismatch is the largest |dP| or |dQ| residual.
pub fn solve_power_flow(
    buses: &[Bus],
    branches: &[Branch],
    tol: f64,
    max_iter: usize,
) -> Result<PowerFlowSolution> {
    let n_slack = buses.iter().filter(|b| b.kind == BusKind::Slack).count();
    if n_slack != 1 {
        return Err(Error::SlackCount(n_slack));
    }
    let ybus = build_ybus(buses, branches)?;
    let n = buses.len();
    let g = ybus.y.mapv(|c| c.re);
    let b = ybus.y.mapv(|c| c.im);

    // flat start; PV and slack magnitudes pinned, slack angle pinned
    let mut vm = vec![1.0_f64; n];
    let mut th = vec![0.0_f64; n];
    for (k, bus) in buses.iter().enumerate() {
        match bus.kind {
            BusKind::Slack => {
                vm[k] = bus.v_mag;
                th[k] = bus.v_ang;
            }
            BusKind::Pv => vm[k] = bus.v_mag,
            BusKind::Pq => {}
        }
    }

    let ang_idx: Vec<usize> =
        (0..n).filter(|&k| buses[k].kind != BusKind::Slack).collect();
    let mag_idx: Vec<usize> =
        (0..n).filter(|&k| buses[k].kind == BusKind::Pq).collect();
    let m = ang_idx.len() + mag_idx.len();

    let calc = |vm: &[f64], th: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let tij = th[i] - th[j];
                let (s, c) = tij.sin_cos();
                p[i] += vm[i] * vm[j] * (g[[i, j]] * c + b[[i, j]] * s);
                q[i] += vm[i] * vm[j] * (g[[i, j]] * s - b[[i, j]] * c);
            }
        }
        (p, q)
    };

    let mut mismatch = f64::INFINITY;
    for it in 0..=max_iter {
        let (p, q) = calc(&vm, &th);
        let mut rhs = Array1::<f64>::zeros(m);
        for (r, &i) in ang_idx.iter().enumerate() {
            rhs[r] = buses[i].p_inj - p[i];
        }
        for (r, &i) in mag_idx.iter().enumerate() {
            rhs[ang_idx.len() + r] = buses[i].q_inj - q[i];
        }
        mismatch = rhs.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        if mismatch <= tol {
            let v = vm
                .iter()
                .zip(th.iter())
                .map(|(&m, &a)| Complex64::from_polar(m, a))
                .collect();
            return Ok(PowerFlowSolution {
                v,
                labels: ybus.labels.clone(),
                mismatch,
                iterations: it,
            });
        }
        if it == max_iter {
            break;
        }

        // polar Jacobian
        let mut jac = Array2::<f64>::zeros((m, m));
        let na = ang_idx.len();
        for (r, &i) in ang_idx.iter().chain(mag_idx.iter()).enumerate() {
            let is_p = r < na;
            for (ccol, &j) in ang_idx.iter().enumerate() {
                let v = if i == j {
                    if is_p {
                        -q[i] - b[[i, i]] * vm[i] * vm[i]
                    } else {
                        p[i] - g[[i, i]] * vm[i] * vm[i]
                    }
                } else {
                    let tij = th[i] - th[j];
                    let (s, c) = tij.sin_cos();
                    if is_p {
                        vm[i] * vm[j] * (g[[i, j]] * s - b[[i, j]] * c)
                    } else {
                        -vm[i] * vm[j] * (g[[i, j]] * c + b[[i, j]] * s)
                    }
                };
                jac[[r, ccol]] = v;
            }
            for (ccol, &j) in mag_idx.iter().enumerate() {
                let v = if i == j {
                    if is_p {
                        p[i] / vm[i] + g[[i, i]] * vm[i]
                    } else {
                        q[i] / vm[i] - b[[i, i]] * vm[i]
                    }
                } else {
                    let tij = th[i] - th[j];
                    let (s, c) = tij.sin_cos();
                    if is_p {
                        vm[i] * (g[[i, j]] * c + b[[i, j]] * s)
                    } else {
                        vm[i] * (g[[i, j]] * s - b[[i, j]] * c)
                    }
                };
                jac[[r, na + ccol]] = v;
            }
        }
        let dx = jac
            .solve(&rhs)
            .map_err(|e| Error::LinearSolve(e.to_string()))?;
        for (r, &i) in ang_idx.iter().enumerate() {
            th[i] += dx[r];
        }
        for (r, &i) in mag_idx.iter().enumerate() {
            vm[i] += dx[na + r];
        }
    }
    Err(Error::PowerFlowDiverged { iterations: max_iter, mismatch })
}

/// Eliminate all nodes not in `keep`: `y_red = y_kk - y_ke y_ee^-1 y_ek`.
pub fn kron_reduce(y: &AdmittanceMatrix, keep: &[usize]) -> Result<AdmittanceMatrix> {
    let mut kidx = Vec::with_capacity(keep.len());
    for &id in keep {
        kidx.push(y.index_of(id).ok_or(Error::UnknownNode(id))?);
    }
    let eidx: Vec<usize> =
        (0..y.n()).filter(|i| !kidx.contains(i)).collect();
    let nk = kidx.len();
    if eidx.is_empty() {
        let mut yk = Array2::<Complex64>::zeros((nk, nk));
        for (a, &i) in kidx.iter().enumerate() {
            for (b, &j) in kidx.iter().enumerate() {
                yk[[a, b]] = y.y[[i, j]];
            }
        }
        return Ok(AdmittanceMatrix { y: yk, labels: keep.to_vec() });
    }
    let ne = eidx.len();
    let mut ykk = Array2::<Complex64>::zeros((nk, nk));
    let mut yke = Array2::<Complex64>::zeros((nk, ne));
    let mut yek = Array2::<Complex64>::zeros((ne, nk));
    let mut yee = Array2::<Complex64>::zeros((ne, ne));
    for (a, &i) in kidx.iter().enumerate() {
        for (b, &j) in kidx.iter().enumerate() {
            ykk[[a, b]] = y.y[[i, j]];
        }
        for (b, &j) in eidx.iter().enumerate() {
            yke[[a, b]] = y.y[[i, j]];
        }
    }
    for (a, &i) in eidx.iter().enumerate() {
        for (b, &j) in kidx.iter().enumerate() {
            yek[[a, b]] = y.y[[i, j]];
        }
        for (b, &j) in eidx.iter().enumerate() {
            yee[[a, b]] = y.y[[i, j]];
        }
    }
    // column-by-column solve of y_ee X = y_ek
    let mut x = Array2::<Complex64>::zeros((ne, nk));
    for c in 0..nk {
        let col = yek.column(c).to_owned();
        let sol = yee
            .solve(&col)
            .map_err(|_| Error::SingularEliminatedBlock)?;
        for r in 0..ne {
            x[[r, c]] = sol[r];
        }
    }
    let y_red = &ykk - &yke.dot(&x);
    Ok(AdmittanceMatrix { y: y_red, labels: keep.to_vec() })
}

/// Constant-impedance equivalent of a load `s` at operating voltage `v`:
/// `y = conj(s) / |v|^2`.
pub fn load_to_shunt(s: Complex64, v: Complex64) -> Complex64 {
    s.conj() / v.norm_sqr()
}
