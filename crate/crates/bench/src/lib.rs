//! Fixtures shared by the criterion benches.

use chaplygin_core::fvm::Grid1D;
use chaplygin_core::{ModelParams, PrimitiveState, RiemannData};

pub const UNIT: ModelParams = ModelParams { c: 1.0 };

pub fn classical_data() -> RiemannData {
    RiemannData::new(PrimitiveState::new(1.0, 2.0, 0.5), PrimitiveState::new(1.0, 2.0, 0.0), UNIT)
        .expect("admissible")
}

pub fn delta_data() -> RiemannData {
    RiemannData::new(PrimitiveState::new(1.0, 2.0, 0.8), PrimitiveState::new(1.0, 2.0, -0.8), UNIT)
        .expect("admissible")
}

pub fn grid(ncells: usize) -> Grid1D {
    Grid1D::new(-1.0, 1.0, ncells).expect("valid grid")
}
