use super::{FaultInstance, FaultModel};
use crate::geometry::Mat3;
use serde::{Deserialize, Serialize};

/// Deflection-of-the-vertical components, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeflectionParams {
    pub xi: f64,
    pub eta: f64,
}

impl DeflectionParams {
    pub fn from_instance(model: &FaultModel, inst: &FaultInstance) -> Self {
        Self {
            xi: inst.value(model, "xi"),
            eta: inst.value(model, "eta"),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.xi.abs() <= std::f64::consts::FRAC_PI_2 && self.eta.abs() <= std::f64::consts::FRAC_PI_2
    }
}

/// Proper rotation `Ry(eta) * Rx(xi)`: roll about the sensor x axis, then
/// pitch about its y axis.
pub fn deflection_rotation(p: DeflectionParams) -> Mat3 {
    Mat3::rot_y(p.eta).mul(&Mat3::rot_x(p.xi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_angles_give_identity() {
        let r = deflection_rotation(DeflectionParams { xi: 0.0, eta: 0.0 });
        assert_eq!(r, Mat3::IDENTITY);
    }

    #[test]
    fn closed_form_entries() {
        let (xi, eta) = (0.03_f64, -0.07_f64);
        let r = deflection_rotation(DeflectionParams { xi, eta }).0;
        let expect = [
            [eta.cos(), xi.sin() * eta.sin(), xi.cos() * eta.sin()],
            [0.0, xi.cos(), -xi.sin()],
            [-eta.sin(), xi.sin() * eta.cos(), xi.cos() * eta.cos()],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((r[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
    }
}
