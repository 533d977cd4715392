//! Built-in benchmark networks and the JSON network-file schema.
//!
//! Machine constants are stated on the 100 MVA system base. The two-area
//! system follows the classic four-machine data (900 MVA machines, 230 kV
//! lines at 0.0001 + j0.001 pu/km with 0.00175 pu/km charging); the 39-bus
//! system uses the standard New England line, load and machine tables.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{GeneratorParams, MachineSpec};
use crate::error::{Error, Result};
use crate::net::{Branch, Bus, BusKind};

pub const OMEGA0_60HZ: f64 = 2.0 * std::f64::consts::PI * 60.0;

/// A complete static dataset: buses, branches, loads and machine data.
#[derive(Clone, Debug)]
pub struct NetworkData {
    pub name: String,
    pub mva_base: f64,
    pub f_hz: f64,
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
    /// (bus, complex load) entries.
    pub loads: Vec<(usize, Complex64)>,
    pub machines: Vec<MachineSpec>,
}

impl NetworkData {
    pub fn machine_index(&self, label: &str) -> Option<usize> {
        self.machines.iter().position(|m| m.label == label)
    }

    pub fn set_load(&mut self, bus: usize, p: f64, q: f64) {
        if let Some(entry) = self.loads.iter_mut().find(|(b, _)| *b == bus) {
            entry.1 = Complex64::new(p, q);
        } else {
            self.loads.push((bus, Complex64::new(p, q)));
        }
    }
}

/// Named dataset lookup.
pub fn builtin_network(name: &str) -> Result<NetworkData> {
    match name {
        "kundur2area" => Ok(kundur_two_area()),
        "ieee39" => Ok(ieee39()),
        other => Err(Error::UnknownDataset(other.to_string())),
    }
}

pub fn builtin_network_names() -> Vec<&'static str> {
    vec!["kundur2area", "ieee39"]
}

/// Two-area four-machine system. Buses 1-4 carry G1-G4 (G3 slack); the
/// inter-area ties run 7-8-9 as double circuits. Loads sit at buses 7 and 9
/// with shunt capacitor support.
pub fn kundur_two_area() -> NetworkData {
    let mut buses = Vec::new();
    for id in 1..=11 {
        buses.push(Bus::pq(id));
    }
    let set = |buses: &mut Vec<Bus>, id: usize, kind: BusKind, v: f64| {
        let b = buses.iter_mut().find(|b| b.id == id).unwrap();
        b.kind = kind;
        b.v_mag = v;
    };
    set(&mut buses, 1, BusKind::Pv, 1.05);
    set(&mut buses, 2, BusKind::Pv, 1.03);
    set(&mut buses, 3, BusKind::Slack, 1.05);
    set(&mut buses, 4, BusKind::Pv, 1.03);
    // capacitor banks at the load buses
    buses.iter_mut().find(|b| b.id == 7).unwrap().shunt += Complex64::new(0.0, 2.0);
    buses.iter_mut().find(|b| b.id == 9).unwrap().shunt += Complex64::new(0.0, 3.5);

    let xt = 0.15 / 9.0; // 0.15 pu on 900 MVA
    let mut branches = vec![
        Branch::xfmr(1, 5, 0.0, xt, 1.0),
        Branch::xfmr(2, 6, 0.0, xt, 1.0),
        Branch::xfmr(3, 11, 0.0, xt, 1.0),
        Branch::xfmr(4, 10, 0.0, xt, 1.0),
    ];
    let mut line = |f: usize, t: usize, km: f64, circuits: f64| {
        branches.push(Branch::line(
            f,
            t,
            0.0001 * km / circuits,
            0.001 * km / circuits,
            0.00175 * km * circuits,
        ));
    };
    line(5, 6, 25.0, 1.0);
    line(6, 7, 10.0, 1.0);
    line(10, 11, 25.0, 1.0);
    line(9, 10, 10.0, 1.0);
    line(7, 8, 110.0, 2.0);
    line(8, 9, 110.0, 2.0);

    let loads = vec![
        (7, Complex64::new(9.67, 1.0)),
        (9, Complex64::new(13.67, 1.0)),
    ];

    // 900 MVA machines on the 100 MVA system base
    let s = 100.0 / 900.0;
    let mk = |label: &str, bus: usize, h_machine: f64, p_set: f64| MachineSpec {
        label: label.to_string(),
        bus,
        p_set,
        params: GeneratorParams {
            t_j: 2.0 * h_machine / s,
            d: 9.0 / s,
            t_d0p: 8.0,
            x_d: 1.8 * s,
            x_dp: 0.3 * s,
            x_q: 1.7 * s,
            k_a: 120.0,
            t_a: 0.04,
            omega0: OMEGA0_60HZ,
            p_m0: 0.0,
            u_ref: 1.0,
        },
    };
    let machines = vec![
        mk("G1", 1, 6.5, 7.0),
        mk("G2", 2, 6.5, 7.0),
        mk("G3", 3, 6.175, 0.0), // slack
        mk("G4", 4, 6.175, 7.0),
    ];

    NetworkData {
        name: "kundur2area".to_string(),
        mva_base: 100.0,
        f_hz: 60.0,
        buses,
        branches,
        loads,
        machines,
    }
}

/// New England 10-machine 39-bus system with the standard tables.
/// G2 (bus 31) is the slack machine.
pub fn ieee39() -> NetworkData {
    const LINES: [(usize, usize, f64, f64, f64); 34] = [
        (1, 2, 0.0035, 0.0411, 0.6987),
        (1, 39, 0.0010, 0.0250, 0.7500),
        (2, 3, 0.0013, 0.0151, 0.2572),
        (2, 25, 0.0070, 0.0086, 0.1460),
        (3, 4, 0.0013, 0.0213, 0.2214),
        (3, 18, 0.0011, 0.0133, 0.2138),
        (4, 5, 0.0008, 0.0128, 0.1342),
        (4, 14, 0.0008, 0.0129, 0.1382),
        (5, 6, 0.0002, 0.0026, 0.0434),
        (5, 8, 0.0008, 0.0112, 0.1476),
        (6, 7, 0.0006, 0.0092, 0.1130),
        (6, 11, 0.0007, 0.0082, 0.1389),
        (7, 8, 0.0004, 0.0046, 0.0780),
        (8, 9, 0.0023, 0.0363, 0.3804),
        (9, 39, 0.0010, 0.0250, 1.2000),
        (10, 11, 0.0004, 0.0043, 0.0729),
        (10, 13, 0.0004, 0.0043, 0.0729),
        (13, 14, 0.0009, 0.0101, 0.1723),
        (14, 15, 0.0018, 0.0217, 0.3660),
        (15, 16, 0.0009, 0.0094, 0.1710),
        (16, 17, 0.0007, 0.0089, 0.1342),
        (16, 19, 0.0016, 0.0195, 0.3040),
        (16, 21, 0.0008, 0.0135, 0.2548),
        (16, 24, 0.0003, 0.0059, 0.0680),
        (17, 18, 0.0007, 0.0082, 0.1319),
        (17, 27, 0.0013, 0.0173, 0.3216),
        (21, 22, 0.0008, 0.0140, 0.2565),
        (22, 23, 0.0006, 0.0096, 0.1846),
        (23, 24, 0.0022, 0.0350, 0.3610),
        (25, 26, 0.0032, 0.0323, 0.5130),
        (26, 27, 0.0014, 0.0147, 0.2396),
        (26, 28, 0.0043, 0.0474, 0.7802),
        (26, 29, 0.0057, 0.0625, 1.0290),
        (28, 29, 0.0014, 0.0151, 0.2490),
    ];
    const XFMRS: [(usize, usize, f64, f64, f64); 12] = [
        (12, 11, 0.0016, 0.0435, 1.006),
        (12, 13, 0.0016, 0.0435, 1.006),
        (6, 31, 0.0000, 0.0250, 1.070),
        (10, 32, 0.0000, 0.0200, 1.070),
        (19, 33, 0.0007, 0.0142, 1.070),
        (20, 34, 0.0009, 0.0180, 1.009),
        (22, 35, 0.0000, 0.0143, 1.025),
        (23, 36, 0.0005, 0.0272, 1.000),
        (25, 37, 0.0006, 0.0232, 1.025),
        (2, 30, 0.0000, 0.0181, 1.025),
        (29, 38, 0.0008, 0.0156, 1.025),
        (19, 20, 0.0007, 0.0138, 1.060),
    ];
    const LOADS: [(usize, f64, f64); 19] = [
        (3, 3.22, 0.024),
        (4, 5.00, 1.84),
        (7, 2.338, 0.84),
        (8, 5.22, 1.766),
        (12, 0.075, 0.88),
        (15, 3.20, 1.53),
        (16, 3.29, 0.323),
        (18, 1.58, 0.30),
        (20, 6.28, 1.03),
        (21, 2.74, 1.15),
        (23, 2.475, 0.846),
        (24, 3.086, -0.922),
        (25, 2.24, 0.472),
        (26, 1.39, 0.17),
        (27, 2.81, 0.755),
        (28, 2.06, 0.276),
        (29, 2.835, 0.269),
        (31, 0.092, 0.046),
        (39, 11.04, 2.50),
    ];
    // label, bus, P set (slack: NaN), V set, H, x_d, x'_d, x_q, T'_d0
    struct G(&'static str, usize, f64, f64, f64, f64, f64, f64, f64);
    let gens = [
        G("G1", 39, 10.00, 1.0300, 500.0, 0.020, 0.006, 0.019, 7.0),
        G("G2", 31, f64::NAN, 0.9820, 30.3, 0.295, 0.0697, 0.282, 6.56),
        G("G3", 32, 6.50, 0.9831, 35.8, 0.2495, 0.0531, 0.237, 5.7),
        G("G4", 33, 6.32, 0.9972, 28.6, 0.262, 0.0436, 0.258, 5.69),
        G("G5", 34, 5.08, 1.0123, 26.0, 0.670, 0.132, 0.620, 5.4),
        G("G6", 35, 6.50, 1.0493, 34.8, 0.254, 0.050, 0.241, 7.3),
        G("G7", 36, 5.60, 1.0635, 26.4, 0.295, 0.049, 0.292, 5.66),
        G("G8", 37, 5.40, 1.0278, 24.3, 0.290, 0.057, 0.280, 6.7),
        G("G9", 38, 8.30, 1.0265, 34.5, 0.2106, 0.057, 0.205, 4.79),
        G("G10", 30, 2.50, 1.0475, 42.0, 0.100, 0.031, 0.069, 10.2),
    ];

    let mut buses = Vec::new();
    for id in 1..=39 {
        buses.push(Bus::pq(id));
    }
    for g in &gens {
        let b = buses.iter_mut().find(|b| b.id == g.1).unwrap();
        b.kind = if g.2.is_nan() { BusKind::Slack } else { BusKind::Pv };
        b.v_mag = g.3;
    }
    let mut branches = Vec::new();
    for &(f, t, r, x, b) in &LINES {
        branches.push(Branch::line(f, t, r, x, b));
    }
    for &(f, t, r, x, tap) in &XFMRS {
        branches.push(Branch::xfmr(f, t, r, x, tap));
    }
    let loads = LOADS
        .iter()
        .map(|&(b, p, q)| (b, Complex64::new(p, q)))
        .collect();

    // speed damping scaled with machine size; the G2/G3 plants carry the
    // richer amortisseur contribution
    let machines = gens
        .iter()
        .map(|g| {
            let d_scale = if g.0 == "G2" || g.0 == "G3" { 3.0 } else { 1.2 };
            MachineSpec {
                label: g.0.to_string(),
                bus: g.1,
                p_set: if g.2.is_nan() { 0.0 } else { g.2 },
                params: GeneratorParams {
                    t_j: 2.0 * g.4,
                    d: d_scale * g.4,
                    t_d0p: g.8,
                    x_d: g.5,
                    x_dp: g.6,
                    x_q: g.7,
                    k_a: 300.0,
                    t_a: 0.01,
                    omega0: OMEGA0_60HZ,
                    p_m0: 0.0,
                    u_ref: 1.0,
                },
            }
        })
        .collect();

    NetworkData {
        name: "ieee39".to_string(),
        mva_base: 100.0,
        f_hz: 60.0,
        buses,
        branches,
        loads,
        machines,
    }
}

// ---------------------------------------------------------------------------
// JSON file schema for user-supplied networks
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub name: String,
    pub mva_base: f64,
    pub f_hz: f64,
    pub buses: Vec<BusEntry>,
    pub branches: Vec<BranchEntry>,
    #[serde(default)]
    pub loads: Vec<LoadEntry>,
    #[serde(default)]
    pub generators: Vec<GeneratorEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusEntry {
    pub id: usize,
    pub kind: BusKind,
    #[serde(default = "one")]
    pub v_mag: f64,
    #[serde(default)]
    pub v_ang: f64,
    #[serde(default)]
    pub shunt_g: f64,
    #[serde(default)]
    pub shunt_b: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchEntry {
    pub from: usize,
    pub to: usize,
    #[serde(default)]
    pub r: f64,
    pub x: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default = "one")]
    pub tap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadEntry {
    pub bus: usize,
    pub p: f64,
    #[serde(default)]
    pub q: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorEntry {
    pub label: String,
    pub bus: usize,
    #[serde(default)]
    pub p: f64,
    pub h: f64,
    pub d: f64,
    pub xd: f64,
    pub xdp: f64,
    pub xq: f64,
    pub td0p: f64,
    pub ka: f64,
    pub ta: f64,
}

impl NetworkFile {
    pub fn into_data(self) -> NetworkData {
        let omega0 = 2.0 * std::f64::consts::PI * self.f_hz;
        let buses = self
            .buses
            .iter()
            .map(|e| Bus {
                id: e.id,
                kind: e.kind,
                v_mag: e.v_mag,
                v_ang: e.v_ang,
                p_inj: 0.0,
                q_inj: 0.0,
                shunt: Complex64::new(e.shunt_g, e.shunt_b),
            })
            .collect();
        let branches = self
            .branches
            .iter()
            .map(|e| Branch {
                from: e.from,
                to: e.to,
                series_z: Complex64::new(e.r, e.x),
                charging_b: e.b,
                tap: e.tap,
            })
            .collect();
        let loads = self
            .loads
            .iter()
            .map(|e| (e.bus, Complex64::new(e.p, e.q)))
            .collect();
        let machines = self
            .generators
            .iter()
            .map(|e| MachineSpec {
                label: e.label.clone(),
                bus: e.bus,
                p_set: e.p,
                params: GeneratorParams {
                    t_j: 2.0 * e.h,
                    d: e.d,
                    t_d0p: e.td0p,
                    x_d: e.xd,
                    x_dp: e.xdp,
                    x_q: e.xq,
                    k_a: e.ka,
                    t_a: e.ta,
                    omega0,
                    p_m0: 0.0,
                    u_ref: 1.0,
                },
            })
            .collect();
        NetworkData {
            name: self.name,
            mva_base: self.mva_base,
            f_hz: self.f_hz,
            buses,
            branches,
            loads,
            machines,
        }
    }
}

fn one() -> f64 {
    1.0
}
