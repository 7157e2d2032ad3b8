//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use boatset::inference::special::regularized_incomplete_beta;
use boatset::inference::{beta_cdf, beta_quantile, delta_rectangle_closed_form, imprecision_delta, BetaShape};
use boatset::oracle::{grid_delta, grid_shadow, GridSpec};
use boatset::touchpoint::{
    agreement_thresholds, matched_rectangle, matched_segment, shadow, solve_posterior_touchpoints,
    solve_prior_upper_touchpoint, terminal_slopes, Clamp,
};
use boatset::{BinomialData, BoatshapeSpec, EtaSet, LineSegmentSpec, PriorShape, RectangleSpec};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn data(n: f64, s: f64) -> BinomialData {
    BinomialData::new(n, s).unwrap()
}

fn boat(spec: BoatshapeSpec) -> EtaSet {
    EtaSet::new(PriorShape::Boat(spec)).unwrap()
}

fn fig2() -> BoatshapeSpec {
    BoatshapeSpec::new(1.0, 6.0, 1.5, 0.9, 0.5).unwrap()
}

fn fig4() -> BoatshapeSpec {
    BoatshapeSpec::new(-1.0, 20.0, 1.0, 0.4, 0.5).unwrap()
}

fn e(err: boatset::Error) -> String {
    err.to_string()
}

fn segment_invariance() -> Check {
    let set = EtaSet::new(PriorShape::Segment(LineSegmentSpec::new(2.0, 0.4, 0.6).map_err(e)?)).map_err(e)?;
    let mut worst: f64 = 0.0;
    for s in 0..=10 {
        let delta = imprecision_delta(&set, &data(10.0, s as f64)).map_err(e)?;
        worst = worst.max((delta - 1.0 / 30.0).abs());
    }
    ensure(worst <= 1e-12, format!("max |delta - 1/30| = {worst:e}"))?;
    Ok(format!("max |delta - 1/30| = {worst:.1e}"))
}

fn rectangle_closed_form() -> Check {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let g = GridSpec::default();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n_lo = rng.gen_range(0.5..10.0);
        let n_hi = n_lo + rng.gen_range(0.0..20.0);
        let y_lo = rng.gen_range(0.02..0.9);
        let y_hi = y_lo + rng.gen_range(0.0..(0.98 - y_lo));
        let n = rng.gen_range(0.5..50.0);
        let s = rng.gen_range(0.0..=n);
        let r = RectangleSpec::new(n_lo, n_hi, y_lo, y_hi).map_err(e)?;
        let set = EtaSet::new(PriorShape::Rectangle(r)).map_err(e)?;
        let d = data(n, s);
        let closed = delta_rectangle_closed_form(&r, &d).map_err(e)?;
        let brute = grid_delta(&set, &d, &g).map_err(e)?;
        worst = worst.max((closed - brute).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst <= 1e-3, format!("max |closed - grid| = {worst:e}"))?;
    ensure(secs < 60.0, format!("took {secs:.1}s"))?;
    Ok(format!("max |closed - grid| = {worst:.1e} in {secs:.1}s"))
}

fn strong_agreement_shift() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let (mut specs, mut checked) = (0, 0);
    let mut min_gap = f64::INFINITY;
    while specs < 100 {
        let lo = rng.gen_range(-1.5..3.0);
        let spec = match BoatshapeSpec::new(
            lo,
            lo + rng.gen_range(1.0..25.0),
            rng.gen_range(0.2..3.0),
            rng.gen_range(0.1..2.0),
            0.5,
        ) {
            Ok(s) if EtaSet::new(PriorShape::Boat(s)).is_ok() => s,
            _ => continue,
        };
        specs += 1;
        let prior = solve_prior_upper_touchpoint(&spec).map_err(e)?;
        let prior_interior = prior > spec.eta0_lo() && prior < spec.eta0_hi();
        let n = rng.gen_range(1e-3..=20.0);
        let (lower, upper) = solve_posterior_touchpoints(&spec, &data(n, n / 2.0)).map_err(e)?;
        if !prior_interior || lower.clamp != Clamp::Interior || upper.clamp != Clamp::Interior {
            continue;
        }
        checked += 1;
        let gap = upper.eta0 - (prior + n);
        min_gap = min_gap.min(gap);
        ensure(gap > 0.0, format!("{spec:?}, n = {n}: gap {gap:e}"))?;
    }
    ensure(checked > 0, "no spec had interior touchpoints")?;
    Ok(format!("{checked}/100 unclamped cases, min gap {min_gap:.3e}"))
}

fn fig2_clamping() -> Check {
    let spec = fig2();
    let set = boat(spec);
    let prior = shadow(&set).map_err(e)?;
    let inside = |x: f64, lo: f64, hi: f64| x > lo && x < hi;
    ensure(
        inside(prior.tp_lo, 1.0, 6.0) && inside(prior.tp_hi, 1.0, 6.0),
        format!("prior touchpoints {} {}", prior.tp_lo, prior.tp_hi),
    )?;
    let mut notes = Vec::new();
    let mut problems = Vec::new();
    for n in [2.0, 4.0] {
        let (lower, _) = solve_posterior_touchpoints(&spec, &data(n, n)).map_err(e)?;
        if lower.clamp == Clamp::Right && lower.eta0 == 6.0 + n {
            notes.push(format!("n = {n}, s = n: lower touchpoint clamped at {}", lower.eta0));
        } else {
            problems.push(format!(
                "n = {n}, s = n: lower touchpoint {:?} at {:.6}, end is {}",
                lower.clamp,
                lower.eta0,
                6.0 + n
            ));
        }
        let (lower, upper) = solve_posterior_touchpoints(&spec, &data(n, n / 2.0)).map_err(e)?;
        if lower.clamp != Clamp::Interior || upper.clamp != Clamp::Interior {
            problems.push(format!("n = {n}, s = n/2: {lower:?} {upper:?}"));
        }
    }
    if !problems.is_empty() {
        problems.extend(notes);
        return Err(problems.join("; "));
    }
    Ok(format!("prior touchpoint {:.6}; {}", prior.tp_hi, notes.join("; ")))
}

fn fig4_happy_window() -> Check {
    let t = agreement_thresholds(&fig4(), 10.0).map_err(e)?;
    let (lo, hi) = t.happy_interval(10.0);
    ensure(
        (lo - 4.0).abs() <= 0.5 && (hi - 6.0).abs() <= 0.5,
        format!("happy interval [{lo}, {hi}]"),
    )?;
    Ok(format!("happy interval [{lo:.4}, {hi:.4}] (s_u = {:.4}, s_l = {:.4})", t.s_u, t.s_l))
}

fn fig4_ratio() -> Check {
    let spec = fig4();
    let rect = EtaSet::new(PriorShape::Rectangle(matched_rectangle(&spec).map_err(e)?)).map_err(e)?;
    let d = data(10.0, 5.0);
    let ratio = imprecision_delta(&boat(spec), &d).map_err(e)? / imprecision_delta(&rect, &d).map_err(e)?;
    ensure((0.4..=0.6).contains(&ratio), format!("ratio {ratio}"))?;
    Ok(format!("ratio {ratio:.4}"))
}

fn boat_dominance() -> Check {
    let spec = fig2();
    let b = boat(spec);
    let r = EtaSet::new(PriorShape::Rectangle(matched_rectangle(&spec).map_err(e)?)).map_err(e)?;
    let mut worst = f64::NEG_INFINITY;
    for n in [2, 4] {
        for s in 0..=n {
            let d = data(n as f64, s as f64);
            let excess = imprecision_delta(&b, &d).map_err(e)? - imprecision_delta(&r, &d).map_err(e)?;
            worst = worst.max(excess);
            ensure(excess <= 1e-9, format!("n = {n}, s = {s}: boat exceeds rectangle by {excess:e}"))?;
        }
    }
    Ok(format!("max delta(boat) - delta(rect) = {worst:.4}"))
}

fn terminal_slopes_check() -> Check {
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for (spec, n) in [(fig4(), 10.0), (fig4(), 25.0), (fig2(), 4.0)] {
        let t = agreement_thresholds(&spec, n).map_err(e)?;
        let beyond = t.s_u.max(t.s_l);
        if beyond >= n - 1e-3 {
            continue;
        }
        used += 1;
        let (up, down) = terminal_slopes(&spec, n);
        let step = 1e-4;
        let set = boat(spec);
        let sh = |s: f64| shadow(&set.updated(&data(n, s))).map_err(e);
        // past both thresholds, and the mirror image below both
        let s = 0.5 * (beyond + n) - step;
        let (a, b) = (sh(s)?, sh(s + step)?);
        let fd_up = (b.y_hi - a.y_hi) / step;
        let fd_down = (b.y_lo - a.y_lo) / step;
        let (a, b) = (sh(n - s - step)?, sh(n - s)?);
        let mirror_up = (b.y_hi - a.y_hi) / step;
        let mirror_down = (b.y_lo - a.y_lo) / step;
        for err in [fd_up - up, fd_down - down, mirror_down - up, mirror_up - down] {
            worst = worst.max(err.abs());
        }
    }
    ensure(used > 0, "no configuration passed both thresholds")?;
    ensure(worst <= 1e-6, format!("max slope error {worst:e}"))?;
    Ok(format!("max slope error {worst:.1e} over {used} configurations"))
}

fn oracle_convergence() -> Check {
    let set = boat(fig4());
    let exact = shadow(&set).map_err(e)?;
    let mut errs = Vec::new();
    for res in [250, 500, 1000, 2000] {
        let (lo, hi) = grid_shadow(&set, &GridSpec::new(res).map_err(e)?).map_err(e)?;
        errs.push((lo - exact.y_lo).abs().max((hi - exact.y_hi).abs()));
    }
    for w in errs.windows(2) {
        ensure(w[1] <= 1.5 * w[0], format!("disagreement {errs:?}"))?;
    }
    ensure(errs[3] < 1e-3, format!("disagreement at 2000: {:e}", errs[3]))?;
    let shown: Vec<String> = errs.iter().map(|x| format!("{x:.2e}")).collect();
    Ok(format!("disagreement {}", shown.join(" -> ")))
}

fn special_functions() -> Check {
    let params: Vec<f64> = (0..12).map(|k| 0.5 * 100f64.powf(k as f64 / 11.0)).collect();
    let mut round: f64 = 0.0;
    let mut reflect: f64 = 0.0;
    for &a in &params {
        for &b in &params {
            let shape = BetaShape::new(a, b).map_err(e)?;
            for q in [0.01, 0.25, 0.5, 0.75, 0.99] {
                let x = beta_quantile(&shape, q).map_err(e)?;
                round = round.max((beta_cdf(&shape, x) - q).abs());
            }
            for k in 1..20 {
                let x = k as f64 / 20.0;
                let lhs = regularized_incomplete_beta(a, b, x);
                let rhs = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);
                reflect = reflect.max((lhs - rhs).abs());
            }
        }
    }
    ensure(round <= 1e-9, format!("round trip error {round:e}"))?;
    ensure(reflect <= 1e-12, format!("reflection error {reflect:e}"))?;
    Ok(format!("round trip {round:.1e}, reflection {reflect:.1e}"))
}

fn fig5_lower_bounds() -> Check {
    let spec = fig4().with_center(0.75).map_err(e)?;
    let sets = [
        boat(spec),
        EtaSet::new(PriorShape::Rectangle(matched_rectangle(&spec).map_err(e)?)).map_err(e)?,
        EtaSet::new(PriorShape::Segment(matched_segment(&spec, 1.0).map_err(e)?)).map_err(e)?,
        EtaSet::new(PriorShape::Segment(matched_segment(&spec, 2.0).map_err(e)?)).map_err(e)?,
    ];
    let mut worst: (f64, f64) = (0.0, 0.0);
    for k in 0..500 {
        let s = k as f64 * 0.01;
        let d = data(10.0, s);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for set in &sets {
            let y = shadow(&set.updated(&d)).map_err(e)?.y_lo;
            lo = lo.min(y);
            hi = hi.max(y);
        }
        if hi - lo > worst.0 {
            worst = (hi - lo, s);
        }
    }
    ensure(worst.0 < 0.05, format!("spread {} at s = {}", worst.0, worst.1))?;
    Ok(format!("max spread {:.4} at s = {}", worst.0, worst.1))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("segment invariance", segment_invariance),
        ("rectangle closed form vs grid", rectangle_closed_form),
        ("strong-agreement touchpoint shift", strong_agreement_shift),
        ("fig 2 clamping", fig2_clamping),
        ("fig 4 happy-learning window", fig4_happy_window),
        ("fig 4 imprecision ratio", fig4_ratio),
        ("boatshape dominance", boat_dominance),
        ("terminal slopes", terminal_slopes_check),
        ("oracle convergence", oracle_convergence),
        ("special functions", special_functions),
        ("fig 5 lower bounds", fig5_lower_bounds),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
