//! Bose-Einstein polylogarithms Li_{1/2} and Li_{-1/2} on z in [0, 1).
//!
//! Two regimes: the defining power series for small z, and for z near 1 the
//! expansion around the branch point,
//!   Li_s(e^{-eps}) = Gamma(1-s) eps^{s-1} + sum_j zeta(s-j) (-eps)^j / j!,
//! which converges rapidly for |eps| < 2 pi. The crossover at z = e^{-1}
//! keeps both sides at full f64 accuracy.

use std::f64::consts::PI;

/// zeta(1/2 - j) for j = 0..=28. zeta(-1/2 - j) is the same table shifted by
/// one, so a single table serves both orders.
const ZETA_HALF_MINUS: [f64; 29] = [
    -1.4603545088095868,     // j = 0
    -0.20788622497735457,    // j = 1
    -0.025485201889833036,   // j = 2
    0.0085169287778503305,   // j = 3
    0.0044410113354794320,   // j = 4
    -0.0030916692472158338,  // j = 5
    -0.0026714580198992246,  // j = 6
    0.0027467679395368688,   // j = 7
    0.0032690395726002200,   // j = 8
    -0.0044160328730048898,  // j = 9
    -0.0066721722964666408,  // j = 10
    0.011146122473942814,    // j = 11
    0.020396978715942792,    // j = 12
    -0.040574967481194578,   // j = 13
    -0.087175255906217251,   // j = 14
    0.20117404938422688,     // j = 15
    0.49627121991205761,     // j = 16
    -1.3032292507051140,     // j = 17
    -3.6297592997745741,     // j = 18
    10.687327069021994,      // j = 19
    33.168325785694608,      // j = 20
    -108.21747505877606,     // j = 21
    -370.30187837547860,     // j = 22
    1326.0458117490156,      // j = 23
    4959.5983150430436,      // j = 24
    -19338.941988374620,     // j = 25
    -78486.148569217687,     // j = 26
    331023.64874545032,      // j = 27
    1448811.3705827264,      // j = 28
];

const CROSSOVER: f64 = 0.36787944117144233; // e^{-1}

/// Li_{1/2}(z) = sum_{k>=1} z^k / sqrt(k), for 0 <= z <= 1.
/// Diverges at z = 1; returns +infinity there.
pub fn li_half(z: f64) -> f64 {
    assert!((0.0..=1.0).contains(&z), "Li_1/2 domain is [0, 1], got {z}");
    if z == 0.0 {
        return 0.0;
    }
    if z >= 1.0 {
        return f64::INFINITY;
    }
    if z < CROSSOVER {
        return direct_series(z, |k| (k as f64).sqrt().recip());
    }
    let eps = -z.ln();
    let mut sum = (PI / eps).sqrt();
    let mut power = 1.0; // (-eps)^j / j!
    for (j, zeta) in ZETA_HALF_MINUS.iter().enumerate() {
        sum += zeta * power;
        power *= -eps / (j + 1) as f64;
    }
    sum
}

/// Li_{-1/2}(z) = sum_{k>=1} sqrt(k) z^k, for 0 <= z <= 1.
pub fn li_minus_half(z: f64) -> f64 {
    assert!((0.0..=1.0).contains(&z), "Li_-1/2 domain is [0, 1], got {z}");
    if z == 0.0 {
        return 0.0;
    }
    if z >= 1.0 {
        return f64::INFINITY;
    }
    if z < CROSSOVER {
        return direct_series(z, |k| (k as f64).sqrt());
    }
    let eps = -z.ln();
    // Gamma(3/2) eps^{-3/2} plus the shifted zeta tail.
    let mut sum = 0.5 * PI.sqrt() * eps.powf(-1.5);
    let mut power = 1.0;
    for (j, zeta) in ZETA_HALF_MINUS[1..].iter().enumerate() {
        sum += zeta * power;
        power *= -eps / (j + 1) as f64;
    }
    sum
}

fn direct_series(z: f64, coeff: impl Fn(usize) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut zk = 1.0;
    for k in 1..=400 {
        zk *= z;
        let term = coeff(k) * zk;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Reference values computed with 30-digit arithmetic.
    const LI_HALF_REFS: [(f64, f64); 5] = [
        (0.1, 0.10770334016557236),
        (0.25, 0.30573493039929638),
        (0.5, 0.80612672304285226),
        (0.9, 4.0219504274733607),
        (0.99, 16.221830753428111),
    ];
    const LI_MINUS_HALF_REFS: [(f64, f64); 5] = [
        (0.1, 0.11609929281348037),
        (0.25, 0.37626599344847702),
        (0.5, 1.3472537527357507),
        (0.9, 25.708466702797580),
        (0.99, 879.36980347833996),
    ];

    #[test]
    fn li_half_matches_reference_values() {
        for (z, expected) in LI_HALF_REFS {
            assert_relative_eq!(li_half(z), expected, max_relative = 1e-14);
        }
    }

    #[test]
    fn li_minus_half_matches_reference_values() {
        for (z, expected) in LI_MINUS_HALF_REFS {
            assert_relative_eq!(li_minus_half(z), expected, max_relative = 1e-14);
        }
    }

    #[test]
    fn both_regimes_agree_at_the_crossover() {
        for z in [CROSSOVER * 0.999, CROSSOVER * 1.001] {
            let series = direct_series(z, |k| (k as f64).sqrt().recip());
            assert_relative_eq!(li_half(z), series, max_relative = 1e-13);
        }
    }

    #[test]
    fn edge_values() {
        assert_eq!(li_half(0.0), 0.0);
        assert_eq!(li_half(1.0), f64::INFINITY);
        assert_eq!(li_minus_half(1.0), f64::INFINITY);
    }

    #[test]
    fn near_one_asymptotics() {
        // Li_1/2(e^{-eps}) ~ sqrt(pi/eps) as eps -> 0.
        let eps = 1e-10;
        let z = (-eps as f64).exp();
        assert_relative_eq!(li_half(z), (PI / eps).sqrt(), max_relative = 1e-4);
    }
}
