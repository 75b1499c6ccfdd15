//! Deliberate sign errors, used to check that the verification suites notice
//! when a construction is wrong.

/// Which constructions to corrupt. The default corrupts nothing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Faults {
    /// Use `X' → Y'` plus (instead of minus) `Y → Y'` in induced butterflies.
    pub induced_projection_sign: bool,
    /// Push `ω` out along `-u` instead of `u`.
    pub cup_omega_sign: bool,
}

impl Faults {
    pub const NONE: Faults = Faults {
        induced_projection_sign: false,
        cup_omega_sign: false,
    };

    pub fn any(&self) -> bool {
        self.induced_projection_sign || self.cup_omega_sign
    }
}
