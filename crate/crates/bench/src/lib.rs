//! Shared fixtures for the criterion benches.

use ghostosc::params::{derive_aux, AuxParams, Branch, ModelParams, Sign};

pub fn flagship() -> (ModelParams, AuxParams) {
    let p = ModelParams::new(4.0, -2.0, 1.0).unwrap();
    let aux = derive_aux(&p, &Branch::new(Sign::Minus, Sign::Plus)).unwrap();
    (p, aux)
}
