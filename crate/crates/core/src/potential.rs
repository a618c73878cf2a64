//! Quartic double-well potential.

/// `f(s) = β/4 (s² − 1)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleWell {
    /// Well depth `β > 0`.
    pub beta: f64,
}

impl Default for DoubleWell {
    fn default() -> Self {
        Self { beta: 1.0 }
    }
}

impl DoubleWell {
    /// Potential with depth `beta`.
    pub const fn new(beta: f64) -> Self {
        Self { beta }
    }

    /// `f(s)`.
    pub fn f(&self, s: f64) -> f64 {
        let q = s * s - 1.0;
        0.25 * self.beta * q * q
    }

    /// `f'(s)`.
    pub fn df(&self, s: f64) -> f64 {
        self.beta * (s * s - 1.0) * s
    }

    /// `f''(s)`.
    pub fn d2f(&self, s: f64) -> f64 {
        self.beta * (3.0 * s * s - 1.0)
    }

    /// `f'''(s)`.
    pub fn d3f(&self, s: f64) -> f64 {
        6.0 * self.beta * s
    }

    /// `f''''(s)`, constant.
    pub fn d4f(&self) -> f64 {
        6.0 * self.beta
    }

    /// Decay rate `√f''(±1)` of the heteroclinic tails.
    pub fn tail_rate(&self) -> f64 {
        #[allow(unused_imports)]
        use num_traits::Float;
        (2.0 * self.beta).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_differences() {
        let w = DoubleWell::new(1.7);
        let h = 1e-5;
        for &s in &[-1.3, -0.4, 0.0, 0.25, 1.1] {
            let fd = |g: &dyn Fn(f64) -> f64| (g(s + h) - g(s - h)) / (2.0 * h);
            assert!((fd(&|u| w.f(u)) - w.df(s)).abs() < 1e-8);
            assert!((fd(&|u| w.df(u)) - w.d2f(s)).abs() < 1e-8);
            assert!((fd(&|u| w.d2f(u)) - w.d3f(s)).abs() < 1e-8);
        }
        assert_eq!(w.d2f(1.0), 2.0 * 1.7);
    }
}
