//! Parameter model of an M-variate Fox-H function.
//!
//! The kernel follows the `H^{0,n : m_1,n_1; ...}_{p,q : p_1,q_1; ...}` layout:
//!
//! ```text
//! H = (2πj)^{-M} ∫…∫ Φ(s) Π_k z_k^{s_k} ds
//!
//! Φ(s) = Π_{j<n} Γ(1 - α_j + A_j·s)
//!        / [ Π_{j>=n} Γ(α_j - A_j·s) Π_j Γ(1 - β_j + B_j·s) ]
//!      × Π_k Π_{j<m_k} Γ(d_kj - D_kj s_k) Π_{j<n_k} Γ(1 - c_kj + C_kj s_k)
//!        / [ Π_{j>=n_k} Γ(c_kj - C_kj s_k) Π_{j>=m_k} Γ(1 - d_kj + D_kj s_k) ]
//! ```
//!
//! With this orientation `H^{1,0}_{0,1}[z | -; (0,1)] = e^{-z}` and the
//! contour of that kernel lies at `Re s < 0`.

use crate::scalar::Real;

/// Which role a gamma factor plays in the Mellin-Barnes integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `Γ(1 - offset + w·s)` in the numerator.
    NumeratorShifted,
    /// `Γ(offset - w·s)` in the numerator.
    NumeratorPlain,
    /// `1 / Γ(1 - offset + w·s)`.
    DenominatorShifted,
    /// `1 / Γ(offset - w·s)`.
    DenominatorPlain,
}

impl Side {
    pub fn is_numerator(self) -> bool {
        matches!(self, Side::NumeratorShifted | Side::NumeratorPlain)
    }
}

/// One gamma factor with its weights over all `M` integration variables.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaFactor<T> {
    pub offset: T,
    pub weights: Vec<T>,
    pub side: Side,
}

impl<T: Real> GammaFactor<T> {
    /// Rewrites the factor as `Γ(shift + coeffs·s)^{±1}`.
    pub fn linear(&self) -> LinearGamma<T> {
        let (shift, sign) = match self.side {
            Side::NumeratorShifted | Side::DenominatorShifted => (T::one() - self.offset, T::one()),
            Side::NumeratorPlain | Side::DenominatorPlain => (self.offset, -T::one()),
        };
        LinearGamma {
            shift,
            coeffs: self.weights.iter().map(|&w| sign * w).collect(),
            numerator: self.side.is_numerator(),
        }
    }
}

/// `Γ(shift + Σ coeffs_k s_k)` in the numerator, or its reciprocal.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGamma<T> {
    pub shift: T,
    pub coeffs: Vec<T>,
    pub numerator: bool,
}

impl<T: Real> LinearGamma<T> {
    pub fn involves(&self, k: usize) -> bool {
        self.coeffs[k] != T::zero()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| *c == T::zero())
    }

    /// Real part of the argument at real anchor `c`.
    pub fn real_arg(&self, c: &[f64]) -> f64 {
        self.shift.as_f64()
            + self
                .coeffs
                .iter()
                .zip(c)
                .map(|(w, x)| w.as_f64() * x)
                .sum::<f64>()
    }

    fn same_form(&self, other: &Self) -> bool {
        self.shift == other.shift && self.coeffs == other.coeffs
    }
}

/// `(offset : weights)` entry of the outer groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupled<T> {
    pub offset: T,
    pub weights: Vec<T>,
}

/// `(offset, weight)` entry of a per-variate group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair<T> {
    pub offset: T,
    pub weight: T,
}

impl<T> Pair<T> {
    pub fn new(offset: T, weight: T) -> Self {
        Pair { offset, weight }
    }
}

/// Outer (coupling) groups. The first `n` upper entries are numerator factors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OuterGroups<T> {
    pub upper: Vec<Coupled<T>>,
    pub n: usize,
    pub lower: Vec<Coupled<T>>,
}

/// Per-variate groups with split indices `m_k` (lower) and `n_k` (upper).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VariateGroup<T> {
    pub upper: Vec<Pair<T>>,
    pub n: usize,
    pub lower: Vec<Pair<T>>,
    pub m: usize,
}

impl<T: Copy> VariateGroup<T> {
    pub fn new() -> Self {
        VariateGroup {
            upper: Vec::new(),
            n: 0,
            lower: Vec::new(),
            m: 0,
        }
    }

    /// Adds `Γ(d - D s)` to the numerator.
    pub fn lower_numerator(mut self, d: T, big_d: T) -> Self {
        self.lower.insert(self.m, Pair::new(d, big_d));
        self.m += 1;
        self
    }

    /// Adds `1/Γ(1 - d + D s)`.
    pub fn lower_denominator(mut self, d: T, big_d: T) -> Self {
        self.lower.push(Pair::new(d, big_d));
        self
    }

    /// Adds `Γ(1 - c + C s)` to the numerator.
    pub fn upper_numerator(mut self, c: T, big_c: T) -> Self {
        self.upper.insert(self.n, Pair::new(c, big_c));
        self.n += 1;
        self
    }

    /// Adds `1/Γ(c - C s)`.
    pub fn upper_denominator(mut self, c: T, big_c: T) -> Self {
        self.upper.push(Pair::new(c, big_c));
        self
    }
}

/// Parameter set of an M-variate Fox-H function.
#[derive(Debug, Clone, PartialEq)]
pub struct FoxHKernel<T> {
    pub variates: usize,
    pub outer: OuterGroups<T>,
    pub per_variate: Vec<VariateGroup<T>>,
}

impl<T: Real> FoxHKernel<T> {
    /// Kernel with empty groups everywhere.
    pub fn new(variates: usize) -> Self {
        FoxHKernel {
            variates,
            outer: OuterGroups {
                upper: Vec::new(),
                n: 0,
                lower: Vec::new(),
            },
            per_variate: (0..variates).map(|_| VariateGroup::new()).collect(),
        }
    }

    /// Adds the outer numerator `Γ(1 - α + A·s)`.
    pub fn outer_numerator(mut self, alpha: T, weights: Vec<T>) -> Self {
        let n = self.outer.n;
        self.outer.upper.insert(
            n,
            Coupled {
                offset: alpha,
                weights,
            },
        );
        self.outer.n += 1;
        self
    }

    /// Adds the outer upper denominator `1/Γ(α - A·s)`.
    pub fn outer_upper_denominator(mut self, alpha: T, weights: Vec<T>) -> Self {
        self.outer.upper.push(Coupled {
            offset: alpha,
            weights,
        });
        self
    }

    /// Adds the outer lower factor `1/Γ(1 - β + B·s)`.
    pub fn outer_lower(mut self, beta: T, weights: Vec<T>) -> Self {
        self.outer.lower.push(Coupled {
            offset: beta,
            weights,
        });
        self
    }

    pub fn with_variate(mut self, k: usize, group: VariateGroup<T>) -> Self {
        self.per_variate[k] = group;
        self
    }

    /// All gamma factors with their sides, outer groups first.
    pub fn factors(&self) -> Vec<GammaFactor<T>> {
        let m = self.variates;
        let mut out = Vec::new();
        for (j, f) in self.outer.upper.iter().enumerate() {
            let side = if j < self.outer.n {
                Side::NumeratorShifted
            } else {
                Side::DenominatorPlain
            };
            out.push(GammaFactor {
                offset: f.offset,
                weights: f.weights.clone(),
                side,
            });
        }
        for f in &self.outer.lower {
            out.push(GammaFactor {
                offset: f.offset,
                weights: f.weights.clone(),
                side: Side::DenominatorShifted,
            });
        }
        for (k, g) in self.per_variate.iter().enumerate() {
            let unit = |w: T| {
                let mut v = vec![T::zero(); m];
                v[k] = w;
                v
            };
            for (j, p) in g.lower.iter().enumerate() {
                let side = if j < g.m {
                    Side::NumeratorPlain
                } else {
                    Side::DenominatorShifted
                };
                out.push(GammaFactor {
                    offset: p.offset,
                    weights: unit(p.weight),
                    side,
                });
            }
            for (j, p) in g.upper.iter().enumerate() {
                let side = if j < g.n {
                    Side::NumeratorShifted
                } else {
                    Side::DenominatorPlain
                };
                out.push(GammaFactor {
                    offset: p.offset,
                    weights: unit(p.weight),
                    side,
                });
            }
        }
        out
    }

    /// Linear-form factors with identical numerator/denominator pairs cancelled.
    pub fn linear_factors(&self) -> Vec<LinearGamma<T>> {
        cancel_pairs(self.factors().iter().map(GammaFactor::linear).collect())
    }

    /// Structural count violations; empty when the layout is consistent.
    pub fn count_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.variates == 0 {
            v.push("variate count must be at least 1".to_string());
        }
        if self.per_variate.len() != self.variates {
            v.push(format!(
                "{} per-variate groups for {} variates",
                self.per_variate.len(),
                self.variates
            ));
        }
        if self.outer.n > self.outer.upper.len() {
            v.push(format!(
                "outer split n = {} exceeds p = {}",
                self.outer.n,
                self.outer.upper.len()
            ));
        }
        for (j, f) in self.outer.upper.iter().chain(&self.outer.lower).enumerate() {
            if f.weights.len() != self.variates {
                v.push(format!(
                    "outer factor {j} has {} weights, expected {}",
                    f.weights.len(),
                    self.variates
                ));
            }
            if !f.offset.is_finite() || f.weights.iter().any(|w| !w.is_finite()) {
                v.push(format!("outer factor {j} has non-finite parameters"));
            }
        }
        for (k, g) in self.per_variate.iter().enumerate() {
            if g.m > g.lower.len() {
                v.push(format!(
                    "variate {k}: m = {} exceeds q = {}",
                    g.m,
                    g.lower.len()
                ));
            }
            if g.n > g.upper.len() {
                v.push(format!(
                    "variate {k}: n = {} exceeds p = {}",
                    g.n,
                    g.upper.len()
                ));
            }
            if g.upper
                .iter()
                .chain(&g.lower)
                .any(|p| !p.offset.is_finite() || !p.weight.is_finite())
            {
                v.push(format!("variate {k} has non-finite parameters"));
            }
        }
        v
    }
}

/// Drops numerator/denominator pairs with bitwise identical linear forms.
pub(crate) fn cancel_pairs<T: Real>(mut factors: Vec<LinearGamma<T>>) -> Vec<LinearGamma<T>> {
    let mut i = 0;
    while i < factors.len() {
        let hit = (0..factors.len()).find(|&j| {
            j != i
                && factors[j].numerator != factors[i].numerator
                && factors[j].same_form(&factors[i])
        });
        match hit {
            Some(j) => {
                let (a, b) = if i < j { (j, i) } else { (i, j) };
                factors.remove(a);
                factors.remove(b);
                i = 0;
            }
            None => i += 1,
        }
    }
    factors
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_kernel_has_single_plain_numerator() {
        let k = FoxHKernel::<f64>::new(1)
            .with_variate(0, VariateGroup::new().lower_numerator(0.0, 1.0));
        let f = k.linear_factors();
        assert_eq!(f.len(), 1);
        assert!(f[0].numerator);
        assert_eq!(f[0].shift, 0.0);
        assert_eq!(f[0].coeffs, vec![-1.0]);
    }

    #[test]
    fn split_indices_order_factors() {
        let g = VariateGroup::<f64>::new()
            .lower_denominator(0.0, 0.5)
            .lower_numerator(0.0, 0.5);
        assert_eq!(g.m, 1);
        assert_eq!(g.lower[0], Pair::new(0.0, 0.5));
        let k = FoxHKernel::new(1).with_variate(0, g);
        let sides: Vec<Side> = k.factors().iter().map(|f| f.side).collect();
        assert_eq!(sides, vec![Side::NumeratorPlain, Side::DenominatorShifted]);
    }

    #[test]
    fn count_violation_for_m_above_q() {
        let mut k = FoxHKernel::<f64>::new(1);
        k.per_variate[0].m = 2;
        k.per_variate[0].lower.push(Pair::new(0.0, 1.0));
        let v = k.count_violations();
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("m = 2"));
    }

    #[test]
    fn identical_pairs_cancel() {
        // Γ(a + Σ a_k s_k) over itself, as produced by single-term sum assembly
        let k = FoxHKernel::<f64>::new(1)
            .outer_numerator(2.0, vec![-1.0])
            .outer_lower(2.0, vec![-1.0])
            .with_variate(0, VariateGroup::new().lower_numerator(0.0, 1.0));
        assert_eq!(k.factors().len(), 3);
        assert_eq!(k.linear_factors().len(), 1);
    }
}
