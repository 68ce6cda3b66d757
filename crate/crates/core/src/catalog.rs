//! Nets from the published examples, for tests, demos and the CLI.

use std::f64::consts::FRAC_PI_2;

use crate::angles::{NetAngles, VertexGermAngles};
use crate::kinematics::{theta_from_cot_parts, DihedralState};
use crate::qsnet::{build_qs_net, QsSeed, Sign};
use crate::Result;

/// Seed of the first quasi-symmetric example.
pub fn qs_first_seed() -> QsSeed {
    QsSeed::from_degrees(105.0, 15.0, 120.0)
}

/// Seed of the quasi-symmetric example with an isolated second realization.
pub fn qs_paradox_seed() -> QsSeed {
    QsSeed::from_degrees(15.0, 60.0, 75.0)
}

/// The rigid state sharing flat angles with [`qs_paradox_seed`]:
/// `cot(theta_1/2) = cot(theta_3/2) = 0`, `cot(theta_2/2) = sqrt(1 + sqrt 3)`,
/// `cot(theta_4/2) = sqrt(3/2) sqrt(1 + sqrt 3)`.
pub fn paradox_isolated_state() -> DihedralState {
    let w = (1.0 + 3f64.sqrt()).sqrt();
    DihedralState::new([
        std::f64::consts::PI,
        2.0 * 1f64.atan2(w),
        std::f64::consts::PI,
        2.0 * 1f64.atan2((1.5f64).sqrt() * w),
    ])
}

pub fn qs_first_net() -> Result<NetAngles> {
    build_qs_net(&qs_first_seed())
}

/// The right-angled non-quasi-symmetric example, built from its exact cosines.
pub fn right_angled_net() -> NetAngles {
    let s = f64::sqrt;
    let rows = [
        [1.0 / s(5.0), 7.0 / (5.0 * s(2.0)), -1.0 / s(10.0)],
        [1.0 / (4.0 * s(11.0)), 7.0 * s(7.0) / (4.0 * s(22.0)), -1.0 / (2.0 * s(2.0))],
        [1.0 / (4.0 * s(11.0)), 7.0 * s(7.0) / (4.0 * s(22.0)), 1.0 / (2.0 * s(2.0))],
        [1.0 / s(5.0), 7.0 / (5.0 * s(2.0)), 1.0 / s(10.0)],
    ];
    NetAngles::new(rows.map(|c| VertexGermAngles {
        alpha: c[0].acos(),
        beta: c[1].acos(),
        gamma: c[2].acos(),
        delta: FRAC_PI_2,
    }))
}

/// Range of `t = cot(theta_1/2)` for the right-angled example.
pub fn right_angled_range() -> (f64, f64) {
    (1.0 / 3f64.sqrt(), (2.0f64 / 3.0).sqrt())
}

/// Closed-form flexion of the right-angled example. `Sign::Minus` takes the
/// upper sign of every `-+`, i.e. subtracts the square root.
pub fn right_angled_state(t: f64, branch: Sign) -> Result<DihedralState> {
    let s = match branch {
        Sign::Minus => 1.0,
        Sign::Plus => -1.0,
    };
    let d = (3.0 * t * t - 1.0) * (2.0 - 3.0 * t * t);
    let th2 = theta_from_cot_parts(5.0 * 7f64.sqrt() * t - s * (10.0 * d).sqrt(), 4.0 + 9.0 * t * t)?;
    let th4 = theta_from_cot_parts(6.0 * t - s * (2.0 * d).sqrt(), 1.0 + 3.0 * t * t)?;
    Ok(DihedralState::new([theta_from_cot_parts(t, 1.0)?, th2, theta_from_cot_parts(1.0, t)?, th4]))
}

/// Design inputs and published two-decimal angle table of a numerical example.
#[derive(Debug, Clone, Copy)]
pub struct PublishedExample {
    pub deltas_deg: [f64; 4],
    pub thetas_deg: [f64; 4],
    /// Rows `(alpha, beta, gamma, delta)` per vertex, truncated to two decimals.
    pub table_deg: [[f64; 4]; 4],
    /// Leading digits of the published common modulus.
    pub modulus: f64,
}

/// First numerical example (`M < 1`).
pub const SEARCH_FIRST: PublishedExample = PublishedExample {
    deltas_deg: [120.0, 80.0, 85.0, 75.0],
    thetas_deg: [130.0, 140.0, 125.0, 135.0],
    table_deg: [
        [91.32, 27.53, 103.21, 120.0],
        [115.75, 29.33, 109.78, 80.0],
        [31.19, 113.66, 89.61, 85.0],
        [28.19, 107.67, 121.75, 75.0],
    ],
    modulus: 0.92,
};

/// Second numerical example (`M > 1`).
pub const SEARCH_SECOND: PublishedExample = PublishedExample {
    deltas_deg: [60.0, 115.0, 80.0, 105.0],
    thetas_deg: [120.0, 140.0, 110.0, 130.0],
    table_deg: [
        [26.20, 82.24, 21.94, 60.0],
        [16.16, 130.87, 18.85, 115.0],
        [134.65, 34.44, 145.36, 80.0],
        [117.95, 49.52, 149.02, 105.0],
    ],
    modulus: 1.22,
};

impl PublishedExample {
    pub fn net(&self) -> Result<NetAngles> {
        NetAngles::from_degrees(self.table_deg)
    }

    pub fn state(&self) -> DihedralState {
        DihedralState::from_degrees(self.thetas_deg)
    }

    /// Largest deviation in degrees between a net and the published table.
    pub fn max_deviation_deg(&self, net: &NetAngles) -> f64 {
        let d = net.to_degrees();
        let mut worst = 0.0f64;
        for i in 0..4 {
            for k in 0..4 {
                worst = worst.max((d[i][k] - self.table_deg[i][k]).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::state_closure;

    #[test]
    fn right_angled_flexion_closes() {
        let net = right_angled_net();
        assert!(net.delta_defect().abs() < 1e-12);
        for br in [Sign::Plus, Sign::Minus] {
            for t in [0.6, 0.7, 0.75, 0.8] {
                let s = right_angled_state(t, br).unwrap();
                assert!(state_closure(&net, &s) < 1e-12);
            }
        }
    }

    #[test]
    fn isolated_state_closes() {
        let net = build_qs_net(&qs_paradox_seed()).unwrap();
        assert!(state_closure(&net, &paradox_isolated_state()) < 1e-12);
    }
}
