//! Reference models shared by the benchmarks.

use spd_core::levy_model::{stable_unit_scale, JumpFamily, LevyModel};
use spd_core::ExponentSuite;

pub fn brownian() -> ExponentSuite {
    ExponentSuite::new(LevyModel::brownian(1.0, 0.0).unwrap()).unwrap()
}

pub fn stable(alpha: f64) -> ExponentSuite {
    ExponentSuite::new(LevyModel::unit_stable(alpha).unwrap()).unwrap()
}

pub fn tempered() -> ExponentSuite {
    let j = JumpFamily::tempered_stable(1.5, 1.0, 1.0).unwrap();
    ExponentSuite::new(LevyModel::centered(0.0, j).unwrap()).unwrap()
}

/// Half-and-half stable 1.5 and tempered stable {1.5, 1}.
pub fn mixture() -> ExponentSuite {
    let c = stable_unit_scale(1.5) / 2.0;
    let j = JumpFamily::mixture(vec![
        JumpFamily::stable(1.5, c).unwrap(),
        JumpFamily::tempered_stable(1.5, 1.0, c).unwrap(),
    ])
    .unwrap();
    ExponentSuite::new(LevyModel::centered(0.0, j).unwrap()).unwrap()
}

pub fn fixtures() -> Vec<(&'static str, ExponentSuite)> {
    vec![
        ("brownian", brownian()),
        ("stable1.2", stable(1.2)),
        ("stable1.5", stable(1.5)),
        ("stable1.8", stable(1.8)),
        ("tempered", tempered()),
        ("mixture", mixture()),
    ]
}
