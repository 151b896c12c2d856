//! Quadrature rules on the reference triangle, stated in barycentric
//! coordinates with weights summing to one; the physical triangle area
//! multiplies separately.

/// Symmetric quadrature rule on the reference triangle.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
    degree: u32,
}

impl QuadratureRule {
    /// Three-point mid-edge rule, exact for polynomials of degree 2.
    /// This is the assembly rule: it integrates products of P1 basis
    /// functions exactly, so mass and load identities hold to rounding.
    pub fn midpoint() -> Self {
        let h = 0.5;
        QuadratureRule {
            points: vec![[h, h, 0.0], [0.0, h, h], [h, 0.0, h]],
            weights: vec![1.0 / 3.0; 3],
            degree: 2,
        }
    }

    /// Seven-point rule, exact for polynomials of degree 5. Used for
    /// error integration against smooth reference solutions, where the
    /// assembly rule would pollute observed convergence orders.
    pub fn degree5() -> Self {
        let a1 = 0.059_715_871_789_77;
        let b1 = 0.470_142_064_105_115;
        let a2 = 0.797_426_985_353_087;
        let b2 = 0.101_286_507_323_456;
        let w0 = 0.225;
        let w1 = 0.132_394_152_788_506;
        let w2 = 0.125_939_180_544_827;
        QuadratureRule {
            points: vec![
                [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
                [a1, b1, b1],
                [b1, a1, b1],
                [b1, b1, a1],
                [a2, b2, b2],
                [b2, a2, b2],
                [b2, b2, a2],
            ],
            weights: vec![w0, w1, w1, w1, w2, w2, w2],
            degree: 5,
        }
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}
