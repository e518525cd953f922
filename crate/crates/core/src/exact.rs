//! Exact left-to-right products of integer ratios.
//!
//! Survival probabilities are products of factors `(pool - kill) / pool`.
//! Accumulating the numerator and denominator as integers and dividing once
//! removes cumulative floating-point error. When the 128-bit accumulators
//! would overflow, the product degrades to per-factor `f64` multiplication,
//! which stays well within 1e-12 of the exact value for any realistic
//! horizon.

use num_integer::Integer;

/// Running product of nonnegative ratios, exact while it fits in `u128`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioProduct {
    Exact { num: u128, den: u128 },
    Float(f64),
}

impl RatioProduct {
    pub fn one() -> Self {
        RatioProduct::Exact { num: 1, den: 1 }
    }

    /// Multiply by `num/den`. `den` must be nonzero.
    pub fn mul_ratio(&mut self, num: u64, den: u64) {
        assert!(den != 0, "ratio denominator must be nonzero");
        match *self {
            RatioProduct::Exact { num: an, den: ad } => {
                let (mut bn, mut bd) = (num as u128, den as u128);
                // Cross-reduce before multiplying to keep the accumulators small.
                let g = bn.gcd(&bd);
                if g > 1 {
                    bn /= g;
                    bd /= g;
                }
                let g = an.gcd(&bd);
                let (an, bd) = (an / g, bd / g);
                let g = bn.gcd(&ad);
                let (bn, ad) = (bn / g, ad / g);
                match (an.checked_mul(bn), ad.checked_mul(bd)) {
                    (Some(n), Some(d)) => *self = RatioProduct::Exact { num: n, den: d },
                    _ => {
                        let cur = an as f64 / ad as f64;
                        *self = RatioProduct::Float(cur * (bn as f64 / bd as f64));
                    }
                }
            }
            RatioProduct::Float(v) => {
                *self = RatioProduct::Float(v * (num as f64 / den as f64));
            }
        }
    }

    /// Current value, with a single division in the exact case.
    pub fn value(&self) -> f64 {
        match *self {
            RatioProduct::Exact { num, den } => num as f64 / den as f64,
            RatioProduct::Float(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, RatioProduct::Exact { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_small_products() {
        // (1 - 5/20)(1 - 5/15)(1 - 5/10) = 15/20 * 10/15 * 5/10 = 1/4
        let mut p = RatioProduct::one();
        p.mul_ratio(15, 20);
        p.mul_ratio(10, 15);
        p.mul_ratio(5, 10);
        assert!(p.is_exact());
        assert_eq!(p, RatioProduct::Exact { num: 1, den: 4 });
        assert_eq!(p.value(), 0.25);
    }

    #[test]
    fn zero_factor_collapses_product() {
        let mut p = RatioProduct::one();
        p.mul_ratio(3, 4);
        p.mul_ratio(0, 7);
        assert_eq!(p.value(), 0.0);
        p.mul_ratio(2, 3);
        assert_eq!(p.value(), 0.0);
    }

    #[test]
    fn overflow_falls_back_to_float() {
        // Coprime near-max factors overflow u128 quickly.
        let big = (1u64 << 62) - 57; // odd, no small factors shared with big+2
        let mut p = RatioProduct::one();
        for _ in 0..4 {
            p.mul_ratio(big, big + 2);
        }
        assert!(!p.is_exact());
        let expected = (big as f64 / (big + 2) as f64).powi(4);
        assert!((p.value() - expected).abs() < 1e-12);
    }

    #[test]
    fn float_fallback_tracks_exact_within_tolerance() {
        // Same factor list evaluated exactly (fits) and via forced float path.
        let factors: Vec<(u64, u64)> = (1..=20).map(|k| (3 * k + 1, 3 * k + 2)).collect();
        let mut exact = RatioProduct::one();
        let mut float = RatioProduct::Float(1.0);
        for &(n, d) in &factors {
            exact.mul_ratio(n, d);
            float.mul_ratio(n, d);
        }
        assert!(exact.is_exact());
        assert!((exact.value() - float.value()).abs() < 1e-12);
    }
}
