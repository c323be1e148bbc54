//! Pulse area along an inhomogeneously broadened absorber: a weak pulse decays
//! as exp(−dz/2), a 2π sech pulse passes unchanged.
//!
//! cargo run --release --example area_theorem

use qmemsim::echo::{area_theorem_reference, ProtocolSequence};
use qmemsim::numcore::{DetuningDistribution, PulseShape, TimeGrid};
use qmemsim::twolevel::{propagate, pulse_area_profile, PropagationConfig};

fn main() -> qmemsim::Result<()> {
    let d = 2.0;
    let grid = TimeGrid::new(-20.0, 0.04, 2048)?;
    let dist = DetuningDistribution::flat(15.0, DetuningDistribution::classes_for_recurrence(15.0, 2.0 * 82.0));
    let cfg = PropagationConfig::new(d, 40);
    for (label, pulse) in [
        ("weak Gaussian", PulseShape::gaussian(0.0, 1.0, 0.01)),
        ("2π sech", PulseShape::sech(0.0, 1.0, 2.0 * std::f64::consts::PI, 0.0)),
        ("1.5π sech", PulseShape::sech(0.0, 1.0, 1.5 * std::f64::consts::PI, 0.0)),
    ] {
        let input = pulse.render(&grid)?;
        let res = propagate(&input, &cfg, &dist, &ProtocolSequence::default())?;
        let profile = pulse_area_profile(&res);
        let reference = area_theorem_reference(pulse.area, d, profile.len() - 1);
        println!("{label}:");
        for (k, (z, theta)) in profile.iter().enumerate().step_by(10) {
            println!("  z={z:.2}  θ={theta:.5}  area theorem {:.5}", reference[k].1);
        }
    }
    Ok(())
}
