//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::process::Command;
use std::time::{Duration, Instant};

use automorph::expr::{evaluate, parse, to_polynomial, Expr};
use automorph::roots::{critical_points, polynomial_roots, SearchBox};
use automorph::series::expand;
use automorph::symmetry::{
    candidates, check_intersection_translation, derivative_identity_residual, find_symmetries_at,
    fixed_point_derivative_check, orbit, relative_residual, verify, AffineMap, RationalAngle,
    SymmetryError, Tier, VerificationPolicy, VerificationStatus, NO_SYMMETRY_MESSAGE,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn f(text: &str) -> Expr {
    parse(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_automorph"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8"))
}

fn cli_json(args: &[&str]) -> Result<Value, String> {
    let (code, out) = cli(args);
    if code != 0 {
        return Err(format!("{args:?} exited {code}: {out}"));
    }
    serde_json::from_str(&out).map_err(|e| format!("{args:?}: bad JSON: {e}"))
}

fn complex_of(v: &Value) -> Complex64 {
    c(v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap())
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let t = start.elapsed();
    if t > limit {
        Err(format!("took {t:?}, limit {limit:?}"))
    } else {
        Ok(t)
    }
}

/// Verified maps of criteria 1–4, paired with their function.
fn corpus() -> Vec<(Expr, AffineMap)> {
    let policy = VerificationPolicy::default();
    let mut out = Vec::new();
    let mut add = |text: &str, z0: Complex64| {
        let g = f(text);
        let found = find_symmetries_at(&g, z0, &policy).expect("anchor search runs");
        for m in found.symmetries() {
            out.push((g.clone(), m));
        }
    };
    for n in 2..=8 {
        add(&format!("z^{n}"), c(0.0, 0.0));
    }
    add("z^4+z^2", c(0.0, 0.0));
    add("cos(z)", c(PI, 0.0));
    out
}

fn criterion_1() -> Check {
    let mut worst = 0.0f64;
    for n in 2..=8u32 {
        let start = Instant::now();
        let v = cli_json(&["symmetries", "--f", &format!("z^{n}")])?;
        within(Duration::from_secs(1), start)?;
        let anchors = v["anchors"].as_array().unwrap();
        let maps: Vec<&Value> = anchors
            .iter()
            .flat_map(|a| a["symmetries"].as_array().unwrap())
            .collect();
        ensure!(maps.len() == n as usize - 1, "z^{n}: {} maps", maps.len());
        let mut angles: Vec<String> = maps.iter().map(|m| m["angle"].as_str().unwrap().to_string()).collect();
        angles.sort();
        let mut want: Vec<String> = (1..n)
            .map(|k| RationalAngle::root_of_unity(k.into(), n.into()).unwrap().to_string())
            .collect();
        want.sort();
        ensure!(angles == want, "z^{n}: angles {angles:?}, want {want:?}");
        for m in &maps {
            ensure!(complex_of(&m["b"]) == c(0.0, 0.0), "z^{n}: nonzero b");
        }
        for r in anchors.iter().flat_map(|a| a["reports"].as_array().unwrap()) {
            match r["status"].as_str().unwrap() {
                "verified_exact" => {}
                "verified_numeric" if n != 2 && n != 4 => {
                    let res = r["max_residual"].as_f64().unwrap();
                    ensure!(res <= 1e-10, "z^{n}: residual {res}");
                    worst = worst.max(res);
                }
                s => return Err(format!("z^{n}: status {s}")),
            }
        }
        let size = v["closure"]["size"].as_u64().unwrap();
        ensure!(size == u64::from(n) && v["closure"]["truncated"] == false, "z^{n}: closure {size}");
    }
    Ok(format!("n = 2..8 all found, closures of order n, worst numeric residual {worst:.1e}"))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let g = f("z^4+z^2");
    let z0 = c(0.0, FRAC_1_SQRT_2);
    let phi = AffineMap::new(RationalAngle::HALF_TURN, c(0.0, SQRT_2));
    let report = verify(&g, &phi, &VerificationPolicy::default());
    ensure!(report.tier == Tier::Exact, "tier {:?}", report.tier);
    let VerificationStatus::Refuted { witness, residual } = report.status else {
        return Err(format!("status {:?}", report.status));
    };
    let recheck = relative_residual(&g, &phi, witness).unwrap_or(f64::INFINITY);
    ensure!(residual > 1e-6 && recheck > 1e-6, "witness residual {residual}, recheck {recheck}");

    let composed = f("(-z + 1.4142135623730951*i)^4 + (-z + 1.4142135623730951*i)^2");
    let s = expand(&composed, c(0.0, 0.0), 8).map_err(|e| e.to_string())?;
    let oracle = [c(2.0, 0.0), c(0.0, 6.0 * SQRT_2), c(-11.0, 0.0), c(0.0, -4.0 * SQRT_2), c(1.0, 0.0)];
    for (j, want) in oracle.iter().enumerate() {
        let got = s.coeffs()[j];
        ensure!((got - want).norm() <= 1e-12 * (1.0 + want.norm()), "oracle coefficient {j}: {got} vs {want}");
    }

    let found = find_symmetries_at(&g, z0, &VerificationPolicy::default()).map_err(|e| e.to_string())?;
    ensure!(found.symmetries().is_empty(), "library found a symmetry");
    let v = cli_json(&["symmetries", "--f", "z^4+z^2", "--at", "0.7071067811865476i"])?;
    let anchor = &v["anchors"][0];
    ensure!(anchor["symmetries"].as_array().unwrap().is_empty(), "CLI found a symmetry");
    ensure!(anchor["message"] == NO_SYMMETRY_MESSAGE, "message {}", anchor["message"]);
    let t = within(Duration::from_secs(1), start)?;
    Ok(format!("refuted by exact tier, witness residual {residual:.3}, message reported ({t:.0?})"))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let found = find_symmetries_at(&f("z^4+z^2"), c(0.0, 0.0), &VerificationPolicy::default())
        .map_err(|e| e.to_string())?;
    let verified: Vec<_> = found.reports.iter().filter(|r| r.is_verified()).collect();
    ensure!(verified.len() == 1, "{} verified maps", verified.len());
    let r = verified[0];
    ensure!(r.map.angle == RationalAngle::HALF_TURN && r.map.b == c(0.0, 0.0), "map {:?}", r.map);
    ensure!(r.status == VerificationStatus::VerifiedExact, "status {:?}", r.status);
    let t = within(Duration::from_secs(1), start)?;
    Ok(format!("Φ(z) = −z verified exactly ({t:.0?})"))
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let g = f("cos(z)");
    let policy = VerificationPolicy::default();
    ensure!(
        policy.series_order == 64 && policy.comparison_order == 32 && policy.samples == 32,
        "default policy changed"
    );
    let found = find_symmetries_at(&g, c(PI, 0.0), &policy).map_err(|e| e.to_string())?;
    ensure!(found.order == 2, "order {}", found.order);
    let [r] = &found.reports[..] else {
        return Err(format!("{} candidates", found.reports.len()));
    };
    ensure!(r.map.angle == RationalAngle::HALF_TURN, "angle {}", r.map.angle);
    ensure!((r.map.b - c(2.0 * PI, 0.0)).norm() <= 1e-12, "b {}", r.map.b);
    let VerificationStatus::VerifiedNumeric { max_residual, .. } = r.status else {
        return Err(format!("status {:?}", r.status));
    };
    ensure!(max_residual <= 1e-10, "residual {max_residual}");
    let t = within(Duration::from_secs(2), start)?;
    Ok(format!("n = 2, Φ(z) = −z + 2π verified numerically, residual {max_residual:.1e} ({t:.0?})"))
}

fn criterion_5() -> Check {
    let policy = VerificationPolicy::default();
    let maps = corpus();
    let mut worst = 0.0f64;
    for (g, m) in &maps {
        let (n, k) = fixed_point_derivative_check(g, m, 64, 1e-9).map_err(|e| format!("{g}: {e}"))?;
        let root = RationalAngle::root_of_unity(k as i64, n as i64).unwrap();
        ensure!((root.multiplier() - m.multiplier()).norm() <= 1e-10, "{g}: k = {k} does not match");
        let res = derivative_identity_residual(g, m, 50, &policy).map_err(|e| e.to_string())?;
        ensure!(res <= 1e-8, "{g}, θ = {}: derivative identity residual {res}", m.angle);
        worst = worst.max(res);
    }
    Ok(format!("{} verified maps, worst derivative-identity residual {worst:.1e}", maps.len()))
}

fn criterion_6() -> Check {
    let policy = VerificationPolicy::default();
    let neg = AffineMap::new(RationalAngle::HALF_TURN, c(0.0, 0.0));
    let sq = check_intersection_translation(&f("z^2"), &neg, &policy).map_err(|e| e.to_string())?;
    ensure!(sq.function.is_verified() && sq.derivative.is_refuted(), "z^2 pair {} / {}", sq.function.label(), sq.derivative.label());

    let period = AffineMap::translation(c(0.0, 2.0 * PI));
    let ex = check_intersection_translation(&f("exp(z)"), &period, &policy).map_err(|e| e.to_string())?;
    ensure!(ex.function.is_verified() && ex.derivative.is_verified() && ex.in_both, "exp pair {} / {}", ex.function.label(), ex.derivative.label());
    ensure!(ex.map.angle.is_zero(), "exp angle {}", ex.map.angle);

    let maps = corpus();
    for (g, m) in &maps {
        match check_intersection_translation(g, m, &policy) {
            Err(SymmetryError::PropositionViolation { angle }) => {
                return Err(format!("violation for {g} at θ = {angle}"));
            }
            Err(e) => return Err(e.to_string()),
            Ok(_) => {}
        }
    }
    Ok(format!("(z², −z) = (verified, refuted); (exp, z+2πi) both verified; no violation over {} maps", maps.len()))
}

fn criterion_7() -> Check {
    let policy = VerificationPolicy::default();
    let cos_box = SearchBox::new(c(-7.0, -1.0), c(7.0, 1.0), 40).unwrap();
    let mut cases: Vec<(String, Vec<AffineMap>)> = Vec::new();
    let mut texts: Vec<String> = (2..=8).map(|n| format!("z^{n}")).collect();
    texts.push("z^4+z^2".into());
    texts.push("cos(z)".into());
    for text in texts {
        let g = f(&text);
        let b = g.contains_primitive().then_some(&cos_box);
        let mut gens = Vec::new();
        for p in critical_points(&g, b).map_err(|e| e.to_string())? {
            let found = find_symmetries_at(&g, p.location, &policy).map_err(|e| e.to_string())?;
            gens.extend(found.symmetries());
        }
        cases.push((text, gens));
    }
    cases.push(("exp(z)".into(), vec![AffineMap::translation(c(0.0, 2.0 * PI))]));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::INFINITY;
    for (text, gens) in &cases {
        for _ in 0..10 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let o = orbit(z, gens, 6);
            ensure!(o.points.len() <= 500, "{text}: {} orbit points", o.points.len());
            ensure!(o.min_pairwise_distance > 1e-6, "{text} from {z}: min distance {}", o.min_pairwise_distance);
            worst = worst.min(o.min_pairwise_distance);
        }
    }
    let cube = &cases[1];
    let o = orbit(c(1.0, 0.0), &cube.1, 6);
    ensure!((o.min_pairwise_distance - 3f64.sqrt()).abs() <= 1e-9, "z^3 from 1: {}", o.min_pairwise_distance);
    Ok(format!("{} functions × 10 bases, smallest separation {worst:.3}; z³ orbit of 1 separated by √3", cases.len()))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut total = 0;
    for _ in 0..200 {
        let z0 = c(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let n: usize = rng.gen_range(2..=12);
        let maps = candidates(z0, n);
        ensure!(maps.len() == n - 1, "({z0}, {n}): {} candidates", maps.len());
        for m in &maps {
            ensure!((m.apply(z0) - z0).norm() <= 1e-12 * z0.norm().max(1.0), "({z0}, {n}): θ = {} moves z0", m.angle);
            let q = m.angle.denom() as usize;
            ensure!(n % q == 0, "({z0}, {n}): denominator {q}");
            let order = m.angle.multiplier_order() as usize;
            ensure!(n % order == 0 && m.angle.is_nth_root_of_unity(n as u64), "({z0}, {n}): multiplier order {order}");
            let lambda = m.multiplier();
            let power = (0..n).fold(c(1.0, 0.0), |acc, _| acc * lambda);
            ensure!((power - c(1.0, 0.0)).norm() <= 1e-12, "({z0}, {n}): λ^n = {power}");
            total += 1;
        }
    }
    Ok(format!("200 cases, {total} candidates checked"))
}

fn complex_literal(z: Complex64) -> String {
    format!("({:?} + {:?}*i)", z.re, z.im)
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let order = 16;
    let mut worst = 0.0f64;
    let unit = |rng: &mut ChaCha8Rng| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    for _ in 0..100 {
        let degree = rng.gen_range(1..=8);
        let coeffs: Vec<Complex64> = (0..=degree).map(|_| unit(&mut rng)).collect();
        let lambda = Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
        let b = unit(&mut rng);
        let center = unit(&mut rng);
        let poly = |arg: &str| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| format!("{}*({arg})^{k}", complex_literal(*a)))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        let g = f(&poly("z"));
        let inner = format!("{}*z + {}", complex_literal(lambda), complex_literal(b));
        let direct = expand(&f(&poly(&inner)), center, order).map_err(|e| e.to_string())?;
        let composed = expand(&g, lambda * center + b, order)
            .and_then(|s| s.compose_affine(lambda, b, center))
            .map_err(|e| e.to_string())?;
        for (x, y) in direct.coeffs().iter().zip(composed.coeffs()) {
            let d = (x - y).norm();
            ensure!(d <= 1e-10, "coefficient mismatch {d:.2e}");
            worst = worst.max(d);
        }
    }

    // Remainder of an order-N expansion scales like r^{N+1}, so halving the
    // radius must shrink the error by about 2^{N+1}.
    let n = 10;
    for (text, center) in [("exp(z)", c(0.3, -0.2)), ("sin(z)", c(0.5, 0.5)), ("cos(z)", c(-1.0, 0.25))] {
        let g = f(text);
        let s = expand(&g, center, n).map_err(|e| e.to_string())?;
        let err_at = |r: f64| {
            (0..16)
                .map(|k| {
                    let z = center + Complex64::from_polar(r, 2.0 * PI * k as f64 / 16.0);
                    (s.eval(z) - evaluate(&g, z).unwrap()).norm()
                })
                .fold(0.0f64, f64::max)
        };
        let mut prev = err_at(0.8);
        for r in [0.4, 0.2] {
            let e = err_at(r);
            let ratio = prev / e;
            ensure!(ratio >= 2f64.powi(n as i32), "{text}: halving radius to {r} shrank error only {ratio:.1}×");
            prev = e;
        }
        let full = expand(&g, center, 64).map_err(|e| e.to_string())?;
        let z = center + c(0.5, 0.5);
        ensure!((full.eval(z) - evaluate(&g, z).unwrap()).norm() <= 1e-14, "{text}: order-64 series inaccurate");
    }
    Ok(format!("100 polynomial cases agree to {worst:.1e}; truncation halving holds for exp, sin, cos"))
}

fn criterion_10() -> Check {
    let start = Instant::now();
    let p = to_polynomial(&f("4*z^3+2*z")).unwrap();
    let roots = polynomial_roots(&p, 1e-12, 1000).map_err(|e| e.to_string())?;
    let want = [c(0.0, -FRAC_1_SQRT_2), c(0.0, 0.0), c(0.0, FRAC_1_SQRT_2)];
    ensure!(roots.len() == 3, "{} roots", roots.len());
    for (r, w) in roots.iter().zip(&want) {
        ensure!((r - w).norm() <= 1e-10, "root {r} vs {w}");
    }
    let b = SearchBox::new(c(-7.0, -1.0), c(7.0, 1.0), 40).unwrap();
    let pts = critical_points(&f("cos(z)"), Some(&b)).map_err(|e| e.to_string())?;
    ensure!(pts.len() == 5, "{} critical points of cos", pts.len());
    for (p, k) in pts.iter().zip(-2..=2) {
        let w = c(k as f64 * PI, 0.0);
        ensure!((p.location - w).norm() <= 1e-9, "critical point {} vs {w}", p.location);
    }
    let t = within(Duration::from_secs(2), start)?;
    Ok(format!("4z³+2z roots and cos critical points {{−2π..2π}} recovered ({t:.0?})"))
}

fn criterion_11() -> Check {
    let runs: [&[&str]; 6] = [
        &["symmetries", "--f", "z^3"],
        &["symmetries", "--f", "cos(z)", "--box=-7,-1,7,1"],
        &["symmetries", "--f", "z^4+z^2", "--at", "0.7071067811865476i", "--seed", "11"],
        &["verify", "--f", "cos(z)", "--map", "1/1", "--b", "6.283185307179586"],
        &["orbit", "--f", "exp(z)", "--at", "0.5+0.5i", "--b", "6.283185307179586i"],
        &["roots", "--f", "z^4+z^2"],
    ];
    for args in runs {
        let (c1, a) = cli(args);
        let (c2, b) = cli(args);
        ensure!(c1 == 0 && c2 == 0, "{args:?} exit codes {c1}, {c2}");
        ensure!(a == b, "{args:?} output differs between runs");
    }
    Ok(format!("{} commands byte-identical across runs", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("monomial family z^n, n = 2..8", criterion_1),
        ("refutation at i/√2 for z⁴+z²", criterion_2),
        ("even function z⁴+z² at 0", criterion_3),
        ("cos z at π", criterion_4),
        ("fixed-point derivative roots of unity", criterion_5),
        ("Aut(f) ∩ Aut(f′) translations only", criterion_6),
        ("orbit discreteness", criterion_7),
        ("candidate arithmetic", criterion_8),
        ("series engine", criterion_9),
        ("roots", criterion_10),
        ("CLI determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {:>2} ({name}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2} ({name}): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
