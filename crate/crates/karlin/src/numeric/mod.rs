//! Shared numerical routines: gamma functions, incomplete-gamma based
//! special functions, adaptive quadrature, small dense linear algebra,
//! and compensated summation.

pub mod discrete;
pub mod gamma;
pub mod linalg;
pub mod quad;
pub mod special;

/// Neumaier compensated accumulator for long sums of f64 terms.
///
/// Sums over millions of urns enter quantities with relative targets near
/// 1e-10; plain left-to-right addition can lose exactly that much.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::KahanSum;

    #[test]
    fn compensated_sum_beats_naive_on_cancellation() {
        // 1 + 1e16·eps-scale noise terms that cancel pairwise.
        let mut k = KahanSum::new();
        k.add(1.0);
        for _ in 0..1000 {
            k.add(1e16);
            k.add(-1e16);
        }
        assert_eq!(k.value(), 1.0);
    }

    #[test]
    fn harmonic_partial_sum_matches_high_precision() {
        // Σ_{i=1}^{10^6} 1/i, reference from 128-bit evaluation.
        let mut k = KahanSum::new();
        for i in 1..=1_000_000u64 {
            k.add(1.0 / i as f64);
        }
        assert!((k.value() - 14.392726722865723631).abs() < 1e-12);
    }
}
