use crate::error::{Error, Result};

/// Per-subchannel error probabilities of the polar transform over a BSC,
/// with the induced reliability order.
#[derive(Clone, Debug, PartialEq)]
pub struct ReliabilityProfile {
    n: usize,
    design_p: f64,
    p_err: Vec<f64>,
    /// Least reliable first; ties go to the smaller index.
    order: Vec<usize>,
}

impl ReliabilityProfile {
    pub fn from_error_rates(design_p: f64, p_err: Vec<f64>) -> Result<Self> {
        let n = p_err.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if let Some(&bad) = p_err.iter().find(|v| !(0.0..=0.5).contains(*v)) {
            return Err(Error::ProbabilityDomain { value: bad, domain: "[0, 0.5]" });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| p_err[b].total_cmp(&p_err[a]).then(a.cmp(&b)));
        Ok(Self { n, design_p, p_err, order })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn design_p(&self) -> f64 {
        self.design_p
    }

    pub fn p_err(&self) -> &[f64] {
        &self.p_err
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `rank[i]` is the position of subchannel `i` in [`Self::order`].
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.n];
        for (r, &i) in self.order.iter().enumerate() {
            rank[i] = r;
        }
        rank
    }

    /// Spearman correlation between the two reliability orders.
    pub fn spearman(&self, other: &ReliabilityProfile) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.n, right: other.n });
        }
        if self.n == 1 {
            return Ok(1.0);
        }
        let (a, b) = (self.ranks(), other.ranks());
        let d2: f64 = a
            .iter()
            .zip(&b)
            .map(|(&x, &y)| {
                let d = x as f64 - y as f64;
                d * d
            })
            .sum();
        let n = self.n as f64;
        Ok(1.0 - 6.0 * d2 / (n * (n * n - 1.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_sorted_descending_with_index_ties() {
        let p = ReliabilityProfile::from_error_rates(0.1, vec![0.1, 0.3, 0.1, 0.0]).unwrap();
        assert_eq!(p.order(), &[1, 0, 2, 3]);
        assert_eq!(p.ranks(), vec![1, 0, 2, 3]);
        assert_eq!(p.spearman(&p).unwrap(), 1.0);
        let rev = ReliabilityProfile::from_error_rates(0.1, vec![0.0, 0.1, 0.2, 0.3]).unwrap();
        let fwd = ReliabilityProfile::from_error_rates(0.1, vec![0.3, 0.2, 0.1, 0.0]).unwrap();
        assert_eq!(rev.spearman(&fwd).unwrap(), -1.0);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ReliabilityProfile::from_error_rates(0.1, vec![0.6, 0.1]).is_err());
        assert!(ReliabilityProfile::from_error_rates(0.1, vec![0.1; 3]).is_err());
    }
}
