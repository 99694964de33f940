//! Quadrature rules and special functions used by the integral operators.

use std::f64::consts::PI;

use statrs::function::erf::erfc;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(order, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule on `[a, b]` with `panels` equal panels.
pub struct CompositeRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = a + p as f64 * width;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * width * (xi + 1.0));
                weights.push(0.5 * width * wi);
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Bessel function of the first kind of order one.
pub fn bessel_j1(z: f64) -> f64 {
    if z < 0.0 {
        return -bessel_j1(-z);
    }
    if z < 25.0 {
        // trapezoid rule on Bessel's integral; exact up to J_{N±1}(z) aliasing terms
        const N: usize = 80;
        let sum: f64 = (0..N)
            .map(|q| {
                let tau = 2.0 * PI * q as f64 / N as f64;
                (tau - z * tau.sin()).cos()
            })
            .sum();
        return sum / N as f64;
    }
    let (p, q) = hankel_pq(z);
    let chi = z - 0.75 * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Hankel asymptotic series `P_1(z)`, `Q_1(z)` summed to the smallest term.
fn hankel_pq(z: f64) -> (f64, f64) {
    let mu = 4.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * z);
        if term.abs() >= prev || term.abs() < 1e-18 {
            break;
        }
        prev = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
    }
    (p, q)
}

/// Smooth radial cutoff: 1 near the origin, `erfc` roll-off centred at
/// `3/4 R`, identically 0 from `R` on (where the erfc tail is below 1e-17).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialWindow {
    pub outer: f64,
    center: f64,
    width: f64,
}

impl RadialWindow {
    pub fn new(outer: f64) -> Self {
        Self {
            outer,
            center: 0.75 * outer,
            width: outer / 24.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn inner(&self) -> f64 {
        self.center - 6.0 * self.width
    }

    pub fn value(&self, r: f64) -> f64 {
        if r >= self.outer {
            0.0
        } else if r <= self.inner() {
            1.0
        } else {
            0.5 * erfc((r - self.center) / self.width)
        }
    }
}

/// Double-exponential quadrature of `f` over `(0, inf)`, halving the step
/// until two successive levels agree to `rel_tol`.
pub fn integrate_half_line(f: impl Fn(f64) -> f64, rel_tol: f64) -> (f64, f64) {
    let node = |tau: f64| -> f64 {
        let r = (0.5 * PI * tau.sinh()).exp();
        if r == 0.0 || !r.is_finite() {
            return 0.0;
        }
        let v = f(r) * 0.5 * PI * tau.cosh() * r;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    const TAU_MAX: f64 = 6.5;
    let mut h = 0.5;
    let sum_level = |h: f64, offset: f64, stride: f64| -> f64 {
        let mut s = 0.0;
        let mut tau = offset;
        while tau <= TAU_MAX {
            s += node(tau);
            if tau != 0.0 {
                s += node(-tau);
            }
            tau += stride * h;
        }
        s
    };
    let mut raw = sum_level(h, 0.0, 1.0);
    let mut estimate = raw * h;
    let mut err = f64::INFINITY;
    for _ in 0..12 {
        h *= 0.5;
        raw += sum_level(h, h, 2.0);
        let next = raw * h;
        err = (next - estimate).abs();
        estimate = next;
        if err <= rel_tol * estimate.abs() {
            break;
        }
    }
    (estimate, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(10);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((q - 2.0 / 19.0).abs() < 1e-14);
        let (x7, w7) = gauss_legendre(7);
        let q: f64 = x7.iter().zip(&w7).map(|(x, w)| w * (x.powi(6) + x.powi(5))).sum();
        assert!((q - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn composite_rule_sine() {
        let rule = CompositeRule::new(0.0, PI, 8, 16);
        assert!((rule.integrate(f64::sin) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn bessel_reference_values() {
        // reference values from standard tables
        let table = [
            (0.0, 0.0),
            (1.0, 0.440_050_585_744_933_5),
            (2.0, 0.576_724_807_756_873_4),
            (10.0, 0.043_472_746_168_861_44),
        ];
        for (z, j) in table {
            assert!((bessel_j1(z) - j).abs() < 1e-15, "z = {z}");
        }
        assert!((bessel_j1(-1.0) + 0.440_050_585_744_933_5).abs() < 1e-15);
    }

    #[test]
    fn bessel_branches_agree() {
        // Bessel's integral with a large node count against the asymptotic branch
        for z in [25.0, 31.7, 60.0, 250.0] {
            let n = 2 * (z as usize) + 200;
            let direct: f64 = (0..n)
                .map(|q| {
                    let tau = 2.0 * PI * q as f64 / n as f64;
                    (tau - z * tau.sin()).cos()
                })
                .sum::<f64>()
                / n as f64;
            assert!((bessel_j1(z) - direct).abs() < 1e-14, "z = {z}");
        }
    }

    #[test]
    fn bessel_integral_identity() {
        // int_0^inf J1(r)/r dr = 1, tail beyond R ~ sqrt(2/pi) R^{-3/2} cos(...)
        let rule = CompositeRule::new(0.0, 400.0, 400, 20);
        let v = rule.integrate(|r| bessel_j1(r) / r);
        assert!((v - 1.0).abs() < 2e-4, "{v}");
    }

    #[test]
    fn window_shape() {
        let w = RadialWindow::new(8.0);
        assert_eq!(w.value(0.0), 1.0);
        assert_eq!(w.value(8.0), 0.0);
        assert!((w.value(6.0) - 0.5).abs() < 1e-15);
        assert!(w.value(7.999) < 1e-16);
        assert!(1.0 - w.value(w.inner() + 1e-9) < 1e-16);
    }

    #[test]
    fn half_line_gamma_integral() {
        let (v, _) = integrate_half_line(|r| r.powf(1.5) * (-2.0 * r).exp(), 1e-13);
        let exact = statrs::function::gamma::gamma(2.5) / 2f64.powf(2.5);
        assert!((v - exact).abs() < 1e-13 * exact);
        let (v, _) = integrate_half_line(|r| r.powf(-0.9) * (-r).exp(), 1e-12);
        let exact = statrs::function::gamma::gamma(0.1);
        assert!((v - exact).abs() < 1e-10 * exact, "{v} vs {exact}");
    }
}
