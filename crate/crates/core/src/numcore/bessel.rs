use std::f64::consts::PI;

/// Bessel function of the first kind, order one.
///
/// Power series for `|x| < 12`, Hankel asymptotic expansion beyond.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < 12.0 { j1_series(ax) } else { j1_asymptotic(ax) };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn j1_series(x: f64) -> f64 {
    let h = 0.5 * x;
    let q = -h * h;
    let mut term = h;
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn j1_asymptotic(x: f64) -> f64 {
    // P and Q series for ν = 1, μ = 4ν² = 4.
    let mu = 4.0;
    let z = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut k = 1usize;
    let mut last = f64::INFINITY;
    loop {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * z);
        if term.abs() > last || k > 40 {
            break;
        }
        last = term.abs();
        if k % 2 == 1 {
            q += if (k / 2).is_multiple_of(2) { term } else { -term };
        } else {
            p += if (k / 2) % 2 == 1 { -term } else { term };
        }
        k += 1;
    }
    let chi = x - 0.75 * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
