/// Absolute tolerance shared by every payoff, value and regime comparison.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance(1e-9);

    /// Returns `None` unless `eps` is finite and non-negative.
    pub fn new(eps: f64) -> Option<Self> {
        (eps.is_finite() && eps >= 0.0).then_some(Tolerance(eps))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn eq(self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.0
    }

    /// `a <= b` with slack.
    pub fn le(self, a: f64, b: f64) -> bool {
        a <= b + self.0
    }

    /// `a > b` beyond the dead zone.
    pub fn gt(self, a: f64, b: f64) -> bool {
        a > b + self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::DEFAULT
    }
}
