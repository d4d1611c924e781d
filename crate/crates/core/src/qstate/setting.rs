//! Per-qubit measurement axes and local measurement settings.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{Ket1, QStateError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    /// Axis `cos θ x̂ + sin θ ẑ`.
    Xz,
    /// Axis `cos θ ŷ + sin θ ẑ`.
    Yz,
    /// Axis `cos θ x̂ + sin θ ŷ` (equatorial).
    Xy,
}

/// Measurement axis of one qubit. Outcome bit 0 is the `+1` eigenvector of
/// `n·σ`, bit 1 the `-1` eigenvector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
    Z,
    InPlane { plane: Plane, angle: f64 },
    /// Arbitrary unit Bloch vector.
    Direction { x: f64, y: f64, z: f64 },
}

impl Axis {
    pub fn bloch(&self) -> [f64; 3] {
        match *self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
            Axis::InPlane { plane, angle } => {
                let (c, s) = (angle.cos(), angle.sin());
                match plane {
                    Plane::Xz => [c, 0.0, s],
                    Plane::Yz => [0.0, c, s],
                    Plane::Xy => [c, s, 0.0],
                }
            }
            Axis::Direction { x, y, z } => [x, y, z],
        }
    }

    /// `(|+n⟩, |-n⟩)`. The Pauli axes use the textbook kets
    /// `|H/V⟩`, `|±⟩ = (|H⟩ ± |V⟩)/√2`, `|L/R⟩ = (|H⟩ ± i|V⟩)/√2`.
    pub fn eigenbasis(&self) -> (Ket1, Ket1) {
        let r = C64::new(FRAC_1_SQRT_2, 0.0);
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        match *self {
            Axis::Z => ([l, o], [o, l]),
            Axis::X => ([r, r], [r, -r]),
            Axis::Y => ([r, C64::new(0.0, FRAC_1_SQRT_2)], [r, C64::new(0.0, -FRAC_1_SQRT_2)]),
            _ => {
                let [x, y, z] = self.bloch();
                let norm = (x * x + y * y + z * z).sqrt();
                let polar = (z / norm).clamp(-1.0, 1.0).acos();
                let azimuth = y.atan2(x);
                let (c, s) = ((polar / 2.0).cos(), (polar / 2.0).sin());
                let e = C64::from_polar(1.0, azimuth);
                ([C64::new(c, 0.0), e * s], [C64::new(s, 0.0), -e * c])
            }
        }
    }

    /// `n·σ` as a 2×2 matrix.
    pub fn observable(&self) -> nalgebra::Matrix2<C64> {
        let [x, y, z] = self.bloch();
        nalgebra::Matrix2::new(
            C64::new(z, 0.0),
            C64::new(x, -y),
            C64::new(x, y),
            C64::new(-z, 0.0),
        )
    }

    /// The Pauli letter this axis coincides with, if any.
    pub fn pauli(&self) -> Option<super::Pauli> {
        match self {
            Axis::X => Some(super::Pauli::X),
            Axis::Y => Some(super::Pauli::Y),
            Axis::Z => Some(super::Pauli::Z),
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), QStateError> {
        let [x, y, z] = self.bloch();
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
            return Err(QStateError::InvalidSetting(format!("axis {self} is not a unit vector")));
        }
        Ok(())
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
            Axis::Z => write!(f, "z"),
            Axis::InPlane { plane, angle } => {
                let p = match plane {
                    Plane::Xz => "xz",
                    Plane::Yz => "yz",
                    Plane::Xy => "xy",
                };
                write!(f, "{p}({angle})")
            }
            Axis::Direction { x, y, z } => write!(f, "({x},{y},{z})"),
        }
    }
}

/// One measurement axis per qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeasurementSetting {
    axes: Vec<Axis>,
}

impl MeasurementSetting {
    pub fn new(axes: Vec<Axis>) -> Result<Self, QStateError> {
        if axes.is_empty() {
            return Err(QStateError::InvalidSetting("setting has no axes".into()));
        }
        for a in &axes {
            a.validate()?;
        }
        Ok(Self { axes })
    }

    pub fn uniform(axis: Axis, n: usize) -> Self {
        Self { axes: vec![axis; n] }
    }

    /// Parses `"xyzz"` style Pauli-axis settings.
    pub fn from_pauli_axes(s: &str) -> Result<Self, QStateError> {
        let axes = s
            .chars()
            .map(|c| match c.to_ascii_lowercase() {
                'x' => Ok(Axis::X),
                'y' => Ok(Axis::Y),
                'z' => Ok(Axis::Z),
                other => Err(QStateError::Parse(format!("not a Pauli axis: {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(axes)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    /// Basis change taking `|±n⟩` of each qubit to `|H/V⟩`: rows are `⟨+n|` and `⟨-n|`.
    pub(crate) fn rotations(&self) -> Vec<nalgebra::Matrix2<C64>> {
        self.axes
            .iter()
            .map(|a| {
                let (p, m) = a.eigenbasis();
                nalgebra::Matrix2::new(p[0].conj(), p[1].conj(), m[0].conj(), m[1].conj())
            })
            .collect()
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.axes.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}
