//! Gamma and Bessel-J evaluation for the oscillatory dictionary columns.

/// Lanczos coefficients, g = 7, 9 terms (published values, kept verbatim).
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function by the Lanczos approximation, reflection for x < 1/2.
///
/// Poles at non-positive integers come out as huge values through the
/// reflection formula; callers that divide by the result get ~0, which is
/// the correct limit for reciprocal-gamma series terms.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Γ(x) Γ(1−x) = π / sin(πx).
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Bessel function of the first kind, real order, positive argument.
///
/// Power series up to z = 10 (no harmful cancellation there), Miller's
/// backward recurrence with the Gegenbauer normalization beyond. Orders below
/// zero are reached by stepping the three-term recurrence down from the
/// fractional base order.
pub fn bessel_j(nu: f64, z: f64) -> f64 {
    assert!(z >= 0.0, "bessel_j requires z >= 0");
    if z == 0.0 {
        return if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY // divergent for negative non-integer order
        };
    }
    if z <= 10.0 {
        series(nu, z)
    } else {
        miller(nu, z)
    }
}

const SERIES_MAX_TERMS: usize = 200;

fn series(nu: f64, z: f64) -> f64 {
    if nu < 0.0 && nu == nu.floor() {
        // J_{-n} = (-1)^n J_n; the direct series recurrence divides by zero.
        let n = (-nu) as i64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        return sign * series(-nu, z);
    }
    let half = 0.5 * z;
    let mut term = half.powf(nu) / gamma(nu + 1.0);
    let mut sum = term;
    let zz = half * half;
    for k in 1..=SERIES_MAX_TERMS {
        term *= -zz / (k as f64 * (nu + k as f64));
        sum += term;
        if term.abs() < 1e-14 * (sum.abs() + 1e-300) {
            break;
        }
    }
    sum
}

fn miller(nu: f64, z: f64) -> f64 {
    let base = nu.floor();
    let mu = nu - base; // fractional order in [0, 1)
    let m = (z + 2.0 * z.powf(2.0 / 3.0) + 40.0).ceil() as usize;
    let mut f = vec![0.0_f64; m + 2];
    f[m] = 1e-280;
    for j in (1..=m).rev() {
        f[j - 1] = 2.0 * (mu + j as f64) / z * f[j] - f[j + 1];
        if f[j - 1].abs() > 1e250 {
            for v in f[j - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    // Gegenbauer normalization: sum_k (mu+2k) Γ(mu+k)/k! · J_{mu+2k}(z) = (z/2)^mu.
    let g1 = gamma(mu + 1.0);
    let mut s = g1 * f[0];
    let mut ratio = g1; // Γ(mu+k)/k!
    let mut k = 1usize;
    while mu + 2.0 * k as f64 <= m as f64 {
        s += (mu + 2.0 * k as f64) * ratio * f[2 * k];
        k += 1;
        ratio *= (mu + k as f64 - 1.0) / k as f64;
    }
    let scale = (0.5 * z).powf(mu) / s;
    let steps_down = (-base) as i64;
    if steps_down <= 0 {
        return f[base as usize] * scale;
    }
    let mut jm = f[0] * scale;
    let mut jm1 = f[1] * scale;
    let mut order = mu;
    for _ in 0..steps_down {
        let prev = 2.0 * order / z * jm - jm1;
        jm1 = jm;
        jm = prev;
        order -= 1.0;
    }
    jm
}
