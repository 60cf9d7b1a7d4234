//! Deterministic low-discrepancy sampling.
//!
//! Points come from the additive-recurrence sequence built on the generalized
//! golden ratio: `u_k[j] = frac(o_j + (k+1) * alpha_j)` with
//! `alpha_j = phi_n^-(j+1)` and `phi_n` the positive root of
//! `x^(n+1) = x + 1`. The per-dimension offsets `o_j` are derived from the
//! seed with splitmix64, so the whole sequence is a pure function of
//! `(n, seed)`.

/// Positive root of `x^(n+1) = x + 1`, by Newton iteration.
fn generalized_golden_ratio(n: usize) -> f64 {
    let p = (n + 1) as f64;
    let mut x = 2.0f64;
    for _ in 0..64 {
        let f = x.powf(p) - x - 1.0;
        let df = p * x.powf(p - 1.0) - 1.0;
        let next = x - f / df;
        if (next - x).abs() < 1e-16 {
            return next;
        }
        x = next;
    }
    x
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `count` low-discrepancy points in the unit cube `[0,1)^n`.
pub fn unit_cube(n: usize, seed: u64, count: usize) -> Vec<Vec<f64>> {
    let phi = generalized_golden_ratio(n);
    let mut alpha = Vec::with_capacity(n);
    let mut inv = 1.0;
    for _ in 0..n {
        inv /= phi;
        alpha.push(inv);
    }
    let mut state = seed;
    let offsets: Vec<f64> = (0..n)
        .map(|_| splitmix64(&mut state) as f64 / 2f64.powi(64))
        .collect();

    (0..count)
        .map(|k| {
            (0..n)
                .map(|j| (offsets[j] + (k + 1) as f64 * alpha[j]).fract())
                .collect()
        })
        .collect()
}

/// Scales a unit-cube sequence into the box `[lo, hi]` componentwise.
pub fn in_box(lo: &[f64], hi: &[f64], seed: u64, count: usize) -> Vec<Vec<f64>> {
    let n = lo.len();
    unit_cube(n, seed, count)
        .into_iter()
        .map(|u| {
            (0..n)
                .map(|j| lo[j] + u[j] * (hi[j] - lo[j]))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = unit_cube(3, 42, 50);
        let b = unit_cube(3, 42, 50);
        assert_eq!(a, b);
        let c = unit_cube(3, 43, 50);
        assert_ne!(a, c);
    }

    #[test]
    fn stays_in_bounds() {
        for p in in_box(&[-2.0, 0.5], &[1.0, 3.0], 7, 200) {
            assert!(p[0] >= -2.0 && p[0] < 1.0);
            assert!(p[1] >= 0.5 && p[1] < 3.0);
        }
    }

    #[test]
    fn golden_ratio_solves_defining_equation() {
        for n in 1..6 {
            let phi = generalized_golden_ratio(n);
            assert!((phi.powi(n as i32 + 1) - phi - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reasonably_uniform_in_one_dimension_projections() {
        // Crude equidistribution check: each half of each axis gets close to
        // half the points.
        let pts = unit_cube(2, 0, 1000);
        for j in 0..2 {
            let lower = pts.iter().filter(|p| p[j] < 0.5).count();
            assert!((400..600).contains(&lower), "axis {j}: {lower}");
        }
    }
}
