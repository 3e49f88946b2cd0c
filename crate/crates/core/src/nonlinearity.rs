//! The reaction term `f(v) = v − v²/(2(1+v))` of the rescaled flow, its
//! derivative, and its antiderivative with `F(0) = 0`.

use num_traits::Float;

pub fn f(v: f64) -> f64 {
    v - 0.5 * v * v / (1.0 + v)
}

pub fn f_prime(v: f64) -> f64 {
    let q = 1.0 + v;
    0.5 * (1.0 + 1.0 / (q * q))
}

pub fn f_antiderivative(v: f64) -> f64 {
    0.25 * v * v + 0.5 * v - 0.5 * (1.0 + v).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_and_antiderivative_match_f() {
        for i in 0..200 {
            let v = -0.9 + 0.02 * i as f64;
            let h = 1e-5;
            let df = (f(v + h) - f(v - h)) / (2.0 * h);
            assert!((df - f_prime(v)).abs() < 1e-6, "f' at {v}");
            let d_f = (f_antiderivative(v + h) - f_antiderivative(v - h)) / (2.0 * h);
            assert!((d_f - f(v)).abs() < 1e-6, "F' at {v}");
        }
        assert_eq!(f_antiderivative(0.0), 0.0);
        assert_eq!(f(0.0), 0.0);
        assert_eq!(f_prime(0.0), 1.0);
    }
}
