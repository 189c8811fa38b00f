//! SI-unit estimates for the electron: converts the dimensionless
//! spin-field term of the two-component rate into a shift per tesla, locates
//! the field strength where it stops being a small correction, and restores
//! the oscillation frequency floor hidden by the natural units used
//! everywhere else in the crate.

use crate::error::Error;
use crate::Result;

/// Exponents of (kg, m, s, C) carried by a quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dimension {
    pub kg: i32,
    pub m: i32,
    pub s: i32,
    pub coulomb: i32,
}

impl Dimension {
    pub const NONE: Dimension = Dimension {
        kg: 0,
        m: 0,
        s: 0,
        coulomb: 0,
    };
    pub const KILOGRAM: Dimension = Dimension {
        kg: 1,
        m: 0,
        s: 0,
        coulomb: 0,
    };
    pub const COULOMB: Dimension = Dimension {
        kg: 0,
        m: 0,
        s: 0,
        coulomb: 1,
    };
    /// J s = kg m^2 / s
    pub const ACTION: Dimension = Dimension {
        kg: 1,
        m: 2,
        s: -1,
        coulomb: 0,
    };
    pub const SPEED: Dimension = Dimension {
        kg: 0,
        m: 1,
        s: -1,
        coulomb: 0,
    };
    /// T = kg / (C s)
    pub const TESLA: Dimension = Dimension {
        kg: 1,
        m: 0,
        s: -1,
        coulomb: -1,
    };

    fn combine(self, other: Dimension, sign: i32) -> Dimension {
        Dimension {
            kg: self.kg + sign * other.kg,
            m: self.m + sign * other.m,
            s: self.s + sign * other.s,
            coulomb: self.coulomb + sign * other.coulomb,
        }
    }
}

/// A value tagged with its SI dimension; arithmetic composes the tags so a
/// final `expect_dim` call turns unit bookkeeping into a hard assertion.
#[derive(Clone, Copy, Debug)]
pub struct Quantity {
    pub value: f64,
    pub dim: Dimension,
}

impl Quantity {
    pub fn new(value: f64, dim: Dimension) -> Self {
        Quantity { value, dim }
    }

    pub fn powi(self, k: i32) -> Quantity {
        Quantity {
            value: self.value.powi(k),
            dim: Dimension {
                kg: self.dim.kg * k,
                m: self.dim.m * k,
                s: self.dim.s * k,
                coulomb: self.dim.coulomb * k,
            },
        }
    }

    pub fn scale(self, s: f64) -> Quantity {
        Quantity {
            value: self.value * s,
            dim: self.dim,
        }
    }

    /// Unwrap the value, asserting the accumulated dimension.
    pub fn expect_dim(self, dim: Dimension) -> f64 {
        assert_eq!(
            self.dim, dim,
            "dimension mismatch: have {:?}, want {:?}",
            self.dim, dim
        );
        self.value
    }
}

impl std::ops::Mul for Quantity {
    type Output = Quantity;
    fn mul(self, other: Quantity) -> Quantity {
        Quantity {
            value: self.value * other.value,
            dim: self.dim.combine(other.dim, 1),
        }
    }
}

impl std::ops::Div for Quantity {
    type Output = Quantity;
    fn div(self, other: Quantity) -> Quantity {
        Quantity {
            value: self.value / other.value,
            dim: self.dim.combine(other.dim, -1),
        }
    }
}

/// Electron-scale constants (CODATA 2018).
#[derive(Clone, Copy, Debug)]
pub struct PhysicalConstants {
    /// Electron mass in kg.
    pub electron_mass: f64,
    /// Elementary charge in C (exact).
    pub charge: f64,
    /// Reduced Planck constant in J s (exact).
    pub hbar: f64,
    /// Speed of light in m/s (exact).
    pub speed_of_light: f64,
}

impl PhysicalConstants {
    pub fn codata2018() -> Self {
        PhysicalConstants {
            electron_mass: 9.109_383_701_5e-31,
            charge: 1.602_176_634e-19,
            hbar: 1.054_571_817e-34,
            speed_of_light: 2.997_924_58e8,
        }
    }

    pub fn new(electron_mass: f64, charge: f64, hbar: f64, speed_of_light: f64) -> Result<Self> {
        for (name, v) in [
            ("electron_mass", electron_mass),
            ("charge", charge),
            ("hbar", hbar),
            ("speed_of_light", speed_of_light),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Validation(format!(
                    "constant {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(PhysicalConstants {
            electron_mass,
            charge,
            hbar,
            speed_of_light,
        })
    }

    fn mass_q(&self) -> Quantity {
        Quantity::new(self.electron_mass, Dimension::KILOGRAM)
    }
    fn charge_q(&self) -> Quantity {
        Quantity::new(self.charge, Dimension::COULOMB)
    }
    fn hbar_q(&self) -> Quantity {
        Quantity::new(self.hbar, Dimension::ACTION)
    }
    fn c_q(&self) -> Quantity {
        Quantity::new(self.speed_of_light, Dimension::SPEED)
    }
}

/// One row of a field sweep: the flux density, the dimensionless rate shift
/// magnitude it produces, and the sign-convention reminder.
#[derive(Clone, Debug)]
pub struct ShiftRow {
    pub b_tesla: f64,
    pub shift: f64,
    /// True where the shift exceeds the reach of the order-v^2 expansion.
    pub expansion_invalid: bool,
    pub note: &'static str,
}

/// Field sweep table; rows are strictly increasing in B, so the shift is
/// strictly monotone too.
#[derive(Clone, Debug)]
pub struct ShiftTable {
    pub rows: Vec<ShiftRow>,
}

const SIGN_NOTE: &str = "magnitude for |sigma.B| = |B|; sign follows the spin projection on B";

/// Threshold above which the quadratic-order treatment of the shift is no
/// longer self-consistent.
pub const EXPANSION_LIMIT: f64 = 0.1;

/// Dimensionless rate shift per tesla: e hbar / (2 m^2 c^2).
///
/// The unit tags are multiplied out against one tesla and asserted to cancel
/// exactly, so a wrong constant dimension fails loudly rather than silently
/// rescaling the estimate.
pub fn rate_shift_per_tesla(consts: &PhysicalConstants) -> f64 {
    let per_tesla = (consts.charge_q() * consts.hbar_q())
        / (consts.mass_q().powi(2) * consts.c_q().powi(2)).scale(2.0);
    (per_tesla * Quantity::new(1.0, Dimension::TESLA)).expect_dim(Dimension::NONE);
    per_tesla.value
}

/// Flux density at which the shift reaches 1/2: m^2 c^2 / (e hbar), in tesla.
pub fn critical_field(consts: &PhysicalConstants) -> f64 {
    ((consts.mass_q().powi(2) * consts.c_q().powi(2))
        / (consts.charge_q() * consts.hbar_q()))
    .expect_dim(Dimension::TESLA)
}

/// Lower bound of the interference angular frequency, m c^2 / hbar, returned
/// as (rad/s, Hz).
pub fn zitter_frequency_si(consts: &PhysicalConstants) -> (f64, f64) {
    let omega = (consts.mass_q() * consts.c_q().powi(2) / consts.hbar_q()).expect_dim(Dimension {
        kg: 0,
        m: 0,
        s: -1,
        coulomb: 0,
    });
    (omega, omega / (2.0 * std::f64::consts::PI))
}

/// Tabulate shift(B) over a strictly increasing list of flux densities,
/// flagging rows beyond the reach of the quadratic-order expansion.
pub fn magnetar_sweep(consts: &PhysicalConstants, b_values: &[f64]) -> Result<ShiftTable> {
    if b_values.is_empty() {
        return Err(Error::Validation("field sweep needs at least one B".into()));
    }
    if let Some(b) = b_values.iter().find(|b| !(**b > 0.0) || !b.is_finite()) {
        return Err(Error::Validation(format!(
            "flux densities must be positive and finite, got {b}"
        )));
    }
    if b_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation(
            "flux densities must be strictly increasing".into(),
        ));
    }
    let per_tesla = rate_shift_per_tesla(consts);
    Ok(ShiftTable {
        rows: b_values
            .iter()
            .map(|&b| {
                let shift = per_tesla * b;
                ShiftRow {
                    b_tesla: b,
                    shift,
                    expansion_invalid: shift > EXPANSION_LIMIT,
                    note: SIGN_NOTE,
                }
            })
            .collect(),
    })
}
