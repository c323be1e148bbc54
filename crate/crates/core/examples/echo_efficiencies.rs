//! Closed-form echo efficiencies next to simulated CRIB and two-pulse echoes.
//!
//! cargo run --release --example echo_efficiencies

use qmemsim::echo::*;
use qmemsim::numcore::PulseShape;

fn main() -> qmemsim::Result<()> {
    println!("{:>5} {:>10} {:>10} {:>10}", "d", "2PE", "CRIB fwd", "CRIB bwd");
    for d in [0.5, 1.0, 2.0, 4.0, 6.0] {
        println!(
            "{d:>5.1} {:>10.4} {:>10.4} {:>10.4}",
            analytic_efficiency(EchoProtocol::TwoPulse, d),
            analytic_efficiency(EchoProtocol::CribFwd, d),
            analytic_efficiency(EchoProtocol::CribBwd, d),
        );
    }

    let signal = PulseShape::gaussian(0.0, 1.0, 0.01);
    let settings = EchoSettings::new(2.0);
    for dir in [CribDirection::Forward, CribDirection::Backward] {
        let r = run_crib(&settings, &signal, 10.0, dir)?;
        println!("CRIB {dir:?} at d=2: simulated {:.4}, closed form {:.4}, echo at t={:.2}", r.numeric, r.analytic, r.echo_time);
    }

    // a π-pulse half as long as the signal
    let signal = PulseShape::gaussian(0.0, 1.0, std::f64::consts::PI / 20.0);
    let pi = PulseShape::gaussian(0.0, 0.5, std::f64::consts::PI);
    let r = run_2pe(&settings, &signal, &pi, 10.0)?;
    println!("2PE at d=2, duration ratio 2: simulated {:.3}, closed form {:.3}", r.numeric, r.analytic);
    Ok(())
}
