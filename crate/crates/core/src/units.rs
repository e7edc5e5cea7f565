// SPDX-License-Identifier: Apache-2.0

//! Physical constants in the active unit system.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnitSystem {
    #[default]
    Reduced,
    Si,
}

impl UnitSystem {
    pub fn name(self) -> &'static str {
        match self {
            UnitSystem::Reduced => "reduced",
            UnitSystem::Si => "SI",
        }
    }
}

/// `ħ`, `c` and `ε0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub hbar: f64,
    pub c: f64,
    pub eps0: f64,
}

pub const SI_HBAR: f64 = 1.054_571_817e-34;
pub const SI_C: f64 = 299_792_458.0;
pub const SI_EPS0: f64 = 8.854_187_812_8e-12;
pub const SI_ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const SI_ELECTRON_MASS: f64 = 9.109_383_701_5e-31;

impl Constants {
    pub fn reduced() -> Self {
        Self { hbar: 1.0, c: 1.0, eps0: 1.0 }
    }

    pub fn si() -> Self {
        Self { hbar: SI_HBAR, c: SI_C, eps0: SI_EPS0 }
    }

    pub fn for_units(units: UnitSystem) -> Self {
        match units {
            UnitSystem::Reduced => Self::reduced(),
            UnitSystem::Si => Self::si(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("hbar", self.hbar), ("c", self.c), ("eps0", self.eps0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvariantViolation(format!("constant {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::reduced()
    }
}
