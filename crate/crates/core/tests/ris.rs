use foxh::expectation::moment_descriptor;
use foxh::mc::{empirical_moment, sample_rician, SimPlan};
use foxh::ris::{
    capacity_composed, capacity_direct, product_descriptor, ris_sum_descriptors, snr_moment,
    Element, LinkBudget, PhaseModel, RicianHop, RisConfig,
};
use foxh::{evaluate, plan_for_density, Density, PlanOptions};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `e^{-y} I₀(y)` from the power series.
fn scaled_bessel_i0(y: f64) -> f64 {
    let q = y * y / 4.0;
    let mut term = 1.0;
    let mut acc = 1.0;
    for k in 1..600 {
        term *= q / (k * k) as f64;
        acc += term;
        if term < 1e-18 * acc {
            break;
        }
    }
    acc * (-y).exp()
}

fn rician_pdf(hop: &RicianHop, r: f64) -> f64 {
    let (k, w) = (hop.k, hop.omega);
    let y = 2.0 * r * (k * (k + 1.0) / w).sqrt();
    2.0 * (k + 1.0) * r / w * (-k - (k + 1.0) * r * r / w + y).exp() * scaled_bessel_i0(y)
}

fn rician_cdf(hop: &RicianHop, r: f64) -> f64 {
    simpson(
        |t| rician_pdf(hop, t),
        0.0,
        r.min(10.0 * hop.omega.sqrt()),
        2000,
    )
}

/// Density of `R₁R₂` at `z` as `∫ f₁(r) f₂(z/r) dr/r`, with `r = eᵘ`.
fn product_pdf_oracle(h1: &RicianHop, h2: &RicianHop, z: f64) -> f64 {
    // both envelopes are negligible beyond 12
    simpson(
        |u| rician_pdf(h1, u.exp()) * rician_pdf(h2, z / u.exp()),
        (z / 12.0).ln(),
        12f64.ln(),
        6000,
    )
}

/// `K₀(x) = ∫₀^∞ e^{-x cosh t} dt`.
fn bessel_k0(x: f64) -> f64 {
    simpson(|t| (-x * t.cosh()).exp(), 0.0, 12.0, 6000)
}

fn eval_at(d: &Density, x: f64) -> f64 {
    let plan = plan_for_density(d, &PlanOptions::default()).unwrap();
    evaluate(d, x, &plan).unwrap().value
}

fn hop(k: f64, omega: f64) -> RicianHop {
    RicianHop::new(k, omega).unwrap()
}

#[test]
fn product_density_matches_numerical_convolution() {
    for (h1, h2) in [
        (hop(1.0, 1.0), hop(1.0, 1.0)),
        (hop(3.0, 2.0), hop(0.5, 0.7)),
        (hop(1.0, 1.0), hop(0.0, 2.0)),
    ] {
        let d = product_descriptor(&h1, &h2, PhaseModel::Ideal)
            .unwrap()
            .density;
        for z in [0.2, 0.8, 1.5, 3.0] {
            let want = product_pdf_oracle(&h1, &h2, z);
            let got = eval_at(&d, z);
            assert!(
                rel(got, want) < 1e-6,
                "K = ({}, {}), z = {z}: {got} vs {want}",
                h1.k,
                h2.k
            );
        }
    }
}

#[test]
fn double_rayleigh_is_a_bessel_density() {
    let (a, b) = (hop(0.0, 1.0), hop(0.0, 3.0));
    let d = product_descriptor(&a, &b, PhaseModel::Ideal)
        .unwrap()
        .density;
    assert_eq!(d.variates(), 1);
    let zeta: f64 = 3.0;
    for z in [0.1, 0.5, 1.0, 4.0] {
        let want = 4.0 * z / zeta * bessel_k0(2.0 * z / zeta.sqrt());
        assert!(rel(eval_at(&d, z), want) < 1e-8, "z = {z}");
    }
}

#[test]
fn cdf_differentiates_to_pdf() {
    let cfg = RisConfig::uniform(
        1,
        Element::new(hop(2.0, 1.5), hop(1.0, 1.0), PhaseModel::Ideal),
        LinkBudget::default(),
    );
    let sum = ris_sum_descriptors(&cfg).unwrap();
    let h = 1e-4;
    for z in [0.3, 1.0, 2.0] {
        let slope = (eval_at(&sum.cdf, z + h) - eval_at(&sum.cdf, z - h)) / (2.0 * h);
        assert!(rel(slope, eval_at(&sum.pdf, z)) < 1e-6, "z = {z}");
    }
}

#[test]
fn cdf_limits() {
    let cfg = RisConfig::uniform(
        1,
        Element::new(hop(1.0, 1.0), hop(1.0, 1.0), PhaseModel::Ideal),
        LinkBudget::default(),
    );
    let cdf = ris_sum_descriptors(&cfg).unwrap().cdf;
    let plan = plan_for_density(&cdf, &PlanOptions::default()).unwrap();
    let mut last = 0.0;
    for i in 1..=40 {
        let v = evaluate(&cdf, 0.25 * i as f64, &plan).unwrap().value;
        assert!(v >= last - 1e-12);
        last = v;
    }
    assert!(evaluate(&cdf, 1e-3, &plan).unwrap().value < 1e-5);
    assert!((last - 1.0).abs() < 1e-6, "{last}");
}

#[test]
fn quantized_phase_density_is_normalized() {
    for bits in [2, 3] {
        let c = product_descriptor(&hop(1.0, 1.0), &hop(1.0, 1.0), PhaseModel::from_bits(bits))
            .unwrap();
        let mass = c.total_mass(&PlanOptions::default()).unwrap().value;
        assert!((mass - 1.0).abs() < 1e-6, "L = {bits}: {mass}");
    }
}

#[test]
fn first_moment_is_product_of_rician_means() {
    let (a, b) = (hop(2.0, 1.5), hop(0.5, 1.0));
    let d = product_descriptor(&a, &b, PhaseModel::Ideal)
        .unwrap()
        .density;
    let m1 = moment_descriptor(&d, 1.0)
        .unwrap()
        .evaluate(&PlanOptions::default())
        .unwrap()
        .value;
    let mean = |h: &RicianHop| simpson(|r| r * rician_pdf(h, r), 0.0, 10.0, 4000);
    assert!(rel(m1, mean(&a) * mean(&b)) < 1e-8);
}

#[test]
fn snr_moments_scale_with_gamma0() {
    let cfg = RisConfig::uniform(
        1,
        Element::new(hop(1.0, 2.0), hop(3.0, 0.5), PhaseModel::Ideal),
        LinkBudget::default(),
    );
    let o = PlanOptions::default();
    for g0 in [0.5, 10.0, 1e3] {
        let m1 = snr_moment(&cfg, 1, g0, &o).unwrap().value;
        // Ω₁Ω₂ = 1
        assert!(rel(m1, g0) < 1e-8, "γ₀ = {g0}: {m1}");
    }
    let a = snr_moment(&cfg, 2, 1.0, &o).unwrap().value;
    let b = snr_moment(&cfg, 2, 7.0, &o).unwrap().value;
    assert!(rel(b, 49.0 * a) < 1e-8);
}

#[test]
fn capacity_routes_agree() {
    let o = PlanOptions::default();
    for (k1, k2) in [(1.0, 1.0), (4.0, 0.5), (0.0, 2.0)] {
        let cfg = RisConfig::uniform(
            1,
            Element::new(hop(k1, 1.0), hop(k2, 1.0), PhaseModel::Ideal),
            LinkBudget::default(),
        );
        for g0 in [1.0, 100.0] {
            let d = capacity_direct(&cfg, g0, &o, 1e-6).unwrap();
            let c = capacity_composed(&cfg, g0, &o, 1e-6).unwrap();
            assert!(
                (d.value - c.value).abs() <= 1e-8 * c.value,
                "K = ({k1}, {k2}), γ₀ = {g0}"
            );
            assert!(!d.warning && !c.warning);
        }
    }
}

#[test]
fn rician_sampler_fits_its_distribution() {
    let h = hop(2.0, 1.3);
    let n = 200_000;
    let mut draws: Vec<f64> = sample_rician(h, n, 5).collect();
    draws.sort_by(f64::total_cmp);
    let mut ks = 0.0f64;
    for (i, &r) in draws.iter().enumerate().step_by(997) {
        let f = rician_cdf(&h, r);
        ks = ks
            .max((f - i as f64 / n as f64).abs())
            .max((f - (i + 1) as f64 / n as f64).abs());
    }
    // 99.9% critical value 1.95/√n
    assert!(ks < 1.95 / (n as f64).sqrt(), "KS {ks}");
}

#[test]
fn standard_error_shrinks_as_root_n() {
    let cfg = RisConfig::uniform(
        3,
        Element::new(hop(1.0, 1.0), hop(1.0, 1.0), PhaseModel::Ideal),
        LinkBudget::default(),
    );
    let small = empirical_moment(&cfg, &SimPlan::new(40_000, 9).unwrap(), 1).unwrap();
    let large = empirical_moment(&cfg, &SimPlan::new(640_000, 9).unwrap(), 1).unwrap();
    assert!(rel(small.std_error / large.std_error, 4.0) < 0.05);
}

#[test]
#[ignore = "the one-bit phase model has no convergent contour and its second moment is zero; see README"]
fn one_bit_snr_moment_matches_simulation() {
    let cfg = RisConfig::uniform(
        1,
        Element::new(hop(1.0, 1.0), hop(1.0, 1.0), PhaseModel::from_bits(1)),
        LinkBudget::default(),
    );
    let exact = snr_moment(&cfg, 1, 1.0, &PlanOptions::default())
        .unwrap()
        .value;
    let mc = empirical_moment(&cfg, &SimPlan::new(1_000_000, 3).unwrap(), 2).unwrap();
    assert!((exact - mc.value).abs() <= 3.0 * mc.std_error);
}
