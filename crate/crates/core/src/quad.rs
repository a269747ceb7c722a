//! Tanh-sinh (double exponential) quadrature nodes on (0, 1).
//!
//! The substitution u = (1 + tanh((π/2) sinh t))/2 clusters nodes at both
//! endpoints with exponentially decaying weights, which absorbs the
//! logarithmic endpoint singularities of the period integrands.

/// Nodes and weights for one axis.
#[derive(Debug, Clone)]
pub(crate) struct Rule {
    /// (u, w) pairs, ascending in u.
    pub nodes: Vec<(f64, f64)>,
}

/// Truncation of the double-exponential variable; beyond this the node
/// complement 1-u underflows.
const T_MAX: f64 = 3.15;

/// Rule of order `q`: step h = T_MAX / q, nodes at j*h for |j| <= q,
/// 2q + 1 nodes in total.
pub(crate) fn tanh_sinh(q: usize) -> Rule {
    let q = q.max(2);
    let h = T_MAX / q as f64;
    let mut nodes = Vec::with_capacity(2 * q + 1);
    for j in -(q as i64)..=(q as i64) {
        let t = j as f64 * h;
        let y = std::f64::consts::FRAC_PI_2 * t.sinh();
        // u = logistic(2y); complement computed directly for stability.
        let u = 1.0 / (1.0 + (-2.0 * y).exp());
        let comp = 1.0 / (1.0 + (2.0 * y).exp());
        if u <= 0.0 || comp <= 0.0 {
            continue;
        }
        let sech = 2.0 / (y.exp() + (-y).exp());
        let w = h * std::f64::consts::FRAC_PI_4 * t.cosh() * sech * sech;
        if w > 0.0 {
            nodes.push((u, w));
        }
    }
    Rule { nodes }
}
