use crate::error::{Error, Result};

fn check_range(value: f64, lo: f64, hi: f64, domain: &'static str) -> Result<()> {
    if !(lo..=hi).contains(&value) {
        return Err(Error::ProbabilityDomain { value, domain });
    }
    Ok(())
}

/// Binary entropy in bits, with `0 · log 0 = 0` at both endpoints.
pub fn binary_entropy(q: f64) -> Result<f64> {
    check_range(q, 0.0, 1.0, "[0, 1]")?;
    if q == 0.0 || q == 1.0 {
        return Ok(0.0);
    }
    Ok(-q * q.log2() - (1.0 - q) * (1.0 - q).log2())
}

/// Crossover of the cascade BSC(q) → BSC(p): `(1 − 2p) q + p`.
pub fn star(q: f64, p: f64) -> Result<f64> {
    check_range(q, 0.0, 0.5, "[0, 0.5]")?;
    check_range(p, 0.0, 0.5, "[0, 0.5]")?;
    Ok((1.0 - 2.0 * p) * q + p)
}

/// The `q` with `star(q, p) = r`: `(r − p) / (1 − 2p)`.
pub fn inverse_star(r: f64, p: f64) -> Result<f64> {
    check_range(p, 0.0, 0.5, "[0, 0.5)")?;
    if p == 0.5 {
        return Err(Error::ProbabilityDomain { value: p, domain: "[0, 0.5)" });
    }
    if r < p {
        return Err(Error::ProbabilityDomain { value: r, domain: "[p, 0.5]" });
    }
    check_range(r, p, 0.5, "[p, 0.5]")?;
    Ok((r - p) / (1.0 - 2.0 * p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        let h = binary_entropy(0.1988).unwrap();
        assert!(h > 0.71 && h < 0.73, "{h}");
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn star_examples() {
        assert!((star(0.0697, 0.15).unwrap() - 0.1988).abs() <= 5e-4);
        assert_eq!(star(0.3, 0.0).unwrap(), 0.3);
        assert!((star(0.5, 0.37).unwrap() - 0.5).abs() < 1e-15);
        assert!(star(0.6, 0.1).is_err());
        assert!(star(0.1, -0.1).is_err());
    }

    #[test]
    fn inverse_star_examples() {
        assert!((inverse_star(0.1988, 0.15).unwrap() - 0.0697).abs() <= 1e-4);
        assert!((inverse_star(0.2756, 0.15).unwrap() - 0.1795).abs() <= 1e-4);
        assert_eq!(inverse_star(0.2, 0.2).unwrap(), 0.0);
        assert!(inverse_star(0.5, 0.5).is_err());
        assert!(inverse_star(0.1, 0.15).is_err());
    }

    proptest! {
        #[test]
        fn star_roundtrip(p in 0.0f64..0.4999, t in 0.0f64..=1.0) {
            let r = p + t * (0.5 - p);
            let q = inverse_star(r, p).unwrap();
            prop_assert!((star(q.min(0.5), p).unwrap() - r).abs() <= 1e-12);
        }

        #[test]
        fn entropy_symmetric(q in 0.0f64..=1.0) {
            let a = binary_entropy(q).unwrap();
            let b = binary_entropy(1.0 - q).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn star_stays_in_range(q in 0.0f64..=0.5, p in 0.0f64..=0.5) {
            let r = star(q, p).unwrap();
            prop_assert!((0.0..=0.5 + 1e-15).contains(&r));
        }
    }
}
