use statrs::function::gamma::ln_gamma;

/// Euler Beta function through log-Gamma differences.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Large-`tau` asymptote of the saddle-pair descriptor:
/// `λ^{p-1} / (p 2^{p-1}) (|A|^p + |B|^p) e^{p λ tau}`.
pub fn hyperbolic_asymptote(lambda: f64, p: f64, a: f64, b: f64, tau: f64) -> f64 {
    lambda.powf(p - 1.0) / (p * 2f64.powf(p - 1.0))
        * (a.abs().powf(p) + b.abs().powf(p))
        * (p * lambda * tau).exp()
}

/// Limit of `(1 / 2tau) M^{e,i}` for a bath mode of energy `h_mode`:
/// `(2/π) (ωR)^p B((p+1)/2, 1/2)` with `R = sqrt(2 h_mode / ω)`.
pub fn elliptic_average_limit(omega: f64, h_mode: f64, p: f64) -> f64 {
    let r = (2.0 * h_mode / omega).sqrt();
    2.0 / std::f64::consts::PI * (omega * r).powf(p) * beta(0.5 * (p + 1.0), 0.5)
}

/// Bath-mode descriptor at `p = 1` over `[-tau, tau]` in the arclength
/// form: `2 tau ω R`.
pub fn elliptic_arclength(omega: f64, radius: f64, tau: f64) -> f64 {
    2.0 * tau * omega * radius
}
