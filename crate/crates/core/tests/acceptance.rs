//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always print.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hypmetric::dbar::{self, Coefficient, GridField, WitnessDomain};
use hypmetric::function::{AnalyticFunction, Codomain, Expr};
use hypmetric::inequalities::suites::{self, SuiteConfig};
use hypmetric::inequalities::{check_harnack, harnack_envelope, schottky_bound, CheckOptions};
use hypmetric::kobayashi::{check_grid_metric, GeodesicGrid};
use hypmetric::modular::covering;
use hypmetric::motions::{self, MotionSpec};
use hypmetric::rho01::{self, c01, c01_constant, C01Constant, DensityModel};
use hypmetric::{BaseDisk, MobiusMap};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const C01_PUBLISHED: f64 = 4.376_879_6;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn constant_reproduction() -> Outcome {
    let closed = c01_constant().value;
    ensure(rel(closed, C01_PUBLISHED) < 1e-4, || format!("closed form {closed}"))?;
    let t = Instant::now();
    let quad = C01Constant::agard(1e-5).map_err(e)?.rho;
    let secs = t.elapsed().as_secs_f64();
    ensure(rel(quad, C01_PUBLISHED) < 1e-4, || format!("area integral {quad}"))?;
    ensure(secs <= 60.0, || format!("quadrature took {secs:.1} s"))?;
    Ok(format!("gamma form {closed:.9}, area integral {quad:.9} in {secs:.2} s"))
}

fn dual_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 100 {
        // a third of the points within 0.5 of a puncture
        let z = if n % 3 == 0 {
            let p = if rng.gen::<bool>() { 0.0 } else { 1.0 };
            c(p, 0.0) + Complex64::from_polar(rng.gen_range(0.05..0.5), rng.gen_range(0.0..std::f64::consts::TAU))
        } else {
            Complex64::from_polar(10.0 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
        };
        if z.norm() > 10.0 || z.norm() < 0.05 || (z - 1.0).norm() < 0.05 {
            continue;
        }
        let a = rho01::rho01_agard(z, 1e-9).map_err(e)?.rho;
        let m = rho01::rho01_modular(z).map_err(e)?.rho;
        ensure(rel(a, m) < 1e-6, || format!("disagree at {z}: {a} vs {m}"))?;
        worst = worst.max(rel(a, m));
        n += 1;
    }
    Ok(format!("100 points, worst relative gap {worst:.2e}"))
}

fn density_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pts: Vec<Complex64> = (0..10_000)
        .map(|_| {
            let r = 10f64.powf(rng.gen_range(-4.0..4.0));
            Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .filter(|z| (z - 1.0).norm() > 1e-9)
        .collect();
    ensure(pts.len() == 10_000, || "sample collided with a puncture".into())?;
    let cert = rho01::check_density_bounds(&pts, 3, 1e-6).map_err(e)?;
    ensure(cert.pass, || format!("worst slack {:e} at {:?}", cert.worst_slack, cert.witness))?;
    Ok(format!("10⁴ points, worst slack {:.3e}", cert.worst_slack))
}

fn harnack_extremal() -> Outcome {
    let cayley = MobiusMap::new(c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)).map_err(e)?;
    let f = AnalyticFunction::new(Expr::mobius(cayley), Codomain::PositiveRealPart);
    let disk = BaseDisk::unit();
    let z0 = c(0.0, 0.0);
    let mut worst: f64 = 0.0;
    let mut pairs = Vec::new();
    for k in 1..100 {
        let r = 0.01 * k as f64;
        for (z, upper) in [(c(r, 0.0), true), (c(-r, 0.0), false)] {
            let ratio = f.eval(z).map_err(e)?.re / f.eval(z0).map_err(e)?.re;
            let (lo, hi) = harnack_envelope(disk.kobayashi(z, z0).map_err(e)?).map_err(e)?;
            let target = if upper { hi } else { lo };
            worst = worst.max(rel(ratio, target));
            pairs.push((z, z0));
        }
    }
    ensure(worst <= 1e-10, || format!("extremal misses the envelope by {worst:e}"))?;
    let cert = check_harnack(&f, &disk, &pairs, &CheckOptions::default().tolerance(1e-10)).map_err(e)?;
    ensure(cert.pass, || format!("certificate fails: {}", cert.worst_slack))?;
    Ok(format!("198 radial points, worst relative gap {worst:.2e}"))
}

fn landau_extremal() -> Outcome {
    let s = covering(c(0.0, 0.0)).map_err(e)?;
    ensure((s.value - c(-1.0, 0.0)).norm() < 1e-12, || format!("S(0) = {}", s.value))?;
    let d = s.derivative.norm();
    ensure(rel(d, 2.0 * c01()) < 1e-3, || format!("|S′(0)| = {d}"))?;
    Ok(format!("S(0) = {:.3e}{:+.3e}i, S′(0) = {d:.10} = 2C·(1{:+.1e})", s.value.re, s.value.im, d / (2.0 * c01()) - 1.0))
}

fn two_point_suite() -> Outcome {
    let t = Instant::now();
    let cert = suites::prop3_suite(&SuiteConfig::new(1000, 100, 6)).map_err(e)?;
    ensure(cert.pass, || format!("violation: slack {:e} at {:?}", cert.worst_slack, cert.witness))?;
    let ratios = suites::covering_envelope_ratios(&[1e-3, 1e-2, 0.05]).map_err(e)?;
    let best = ratios.iter().cloned().fold(0.0, f64::max);
    ensure(best >= 0.95, || format!("covering ratios {ratios:?}"))?;
    Ok(format!(
        "{} samples, worst slack {:.3e}; covering ratio {best:.4} near 0; {:.1} s",
        cert.samples,
        cert.worst_slack,
        t.elapsed().as_secs_f64()
    ))
}

fn schottky() -> Outcome {
    let mut lines = Vec::new();
    for (r, rp) in [(3f64.ln(), 1.0), (0.5, 2.0), (1.5, 0.5)] {
        let cert = suites::schottky_suite(&SuiteConfig::new(300, 40, 7), r, rp).map_err(e)?;
        let (sup, bound) = (cert.constants["empirical_sup"], cert.constants["bound"]);
        ensure(cert.pass && sup <= bound, || format!("R = {r}: sup {sup} > bound {bound}"))?;
        lines.push(format!("R={r:.3}: sup {sup:.3} ≤ {bound:.4e}"));
    }
    for r in [0.0, 0.1, 3f64.ln(), 1.0, 2.0] {
        let m = schottky_bound(r, 1.0).map_err(e)?;
        let direct = (c01() * (r.exp() - 1.0)).exp();
        ensure(rel(m, direct) <= 4.0 * f64::EPSILON, || format!("M({r}, 1) = {m} vs {direct}"))?;
    }
    Ok(lines.join("; ") + "; M(R,1) = e^{C(e^R−1)}")
}

fn motions() -> Outcome {
    let r = 3f64.ln();
    let opts = CheckOptions::with_seed(8).tolerance(1e-9);
    let m = motions::build_motion(MotionSpec::two_point_example(), r).map_err(e)?;
    let pairs = m.all_pairs();
    let pts = motions::ball_samples(&m, r, 1000 / pairs.len(), 8);
    let rep = motions::check_holder_spherical(&m, r, &pts, &pairs, &opts).map_err(e)?;
    let cert = &rep.certificate;
    ensure(cert.pass, || format!("violation: slack {:e} at {:?}", cert.worst_slack, cert.witness))?;
    ensure(cert.samples == 1000, || format!("{} samples", cert.samples))?;
    let fit = rep.fitted_exponent.ok_or("no exponent fit")?;
    ensure(fit >= (-r).exp() - 0.02, || format!("fitted exponent {fit}"))?;
    let disk = rep.disk_exponent;
    let rr = (r / 2.0).tanh();
    ensure((disk - (1.0 - rr) / (1.0 + rr)).abs() < 1e-15, || format!("disk exponent {disk}"))?;
    // the radial stretch attains the disk exponent
    // small labels keep the chordal metric linear in |φ|
    let labels: Vec<Complex64> = (2..=7).map(|k| c(10f64.powi(-3 * k), 0.0)).collect();
    let stretch = motions::build_motion(MotionSpec::radial_stretch(&labels), r).map_err(e)?;
    let edge = [c(-rr * (1.0 - 1e-12), 0.0)];
    let to_zero: Vec<(usize, usize)> = (3..3 + labels.len()).map(|k| (0, k)).collect();
    let srep = motions::check_holder_spherical(&stretch, r, &edge, &to_zero, &opts).map_err(e)?;
    let sfit = srep.fitted_exponent.ok_or("no stretch fit")?;
    ensure((sfit - disk).abs() < 1e-5, || format!("stretch exponent {sfit} vs {disk}"))?;
    Ok(format!(
        "1000 samples, worst log slack {:.3}; fitted exponent {fit:.4} ≥ e^-R − 0.02 = {:.4}; disk exponent {disk:.6}, attained {sfit:.6}",
        cert.worst_slack,
        (-r).exp() - 0.02
    ))
}

fn dbar_machinery() -> Outcome {
    let mut errs = Vec::new();
    for n in [97, 193] {
        let f = GridField::from_fn([-1.5, 1.5, -1.5, 1.5], n, n, |z| if z.norm() < 1.0 { c(1.0, 0.0) } else { c(0.0, 0.0) })
            .map_err(e)?;
        let t = dbar::cauchy_transform(&f, true).map_err(e)?;
        let h = f.step();
        let mut err: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let z = f.node(i, j);
                if z.norm() < 1.0 {
                    err = err.max((t.get(i, j) - z.conj()).norm());
                }
            }
        }
        ensure(err <= 5.0 * h, || format!("n = {n}: error {err} > 5h"))?;
        errs.push((h, err));
    }
    let halving = errs[1].1 / errs[0].1;
    ensure(halving <= 0.6, || format!("refinement ratio {halving}"))?;

    let indicator = |cv: f64| Coefficient::DiskIndicator {
        c: c(cv, 0.0),
        center: c(0.0, 0.0),
        radius: 1.0,
    };
    let w = dbar::make_witness(indicator(0.3), c(3.0, 0.0), 1.0, WitnessDomain::Plane, 4.0, 1.5).map_err(e)?;
    let pts: Vec<Complex64> = (0..=200)
        .flat_map(|i| (0..=200).map(move |j| c(-2.0 + 0.02 * i as f64, -2.0 + 0.02 * j as f64)))
        .filter(|z| z.norm() <= 2.0)
        .collect();
    let opts = CheckOptions::default().tolerance(1e-6);
    let cert = dbar::check_prop6(&w, &pts, &opts).map_err(e)?;
    let max_ratio = cert.constants["max_ratio"];
    ensure(cert.pass, || format!("two-sided bound fails: {}", cert.worst_slack))?;
    ensure((max_ratio - 0.3f64.exp()).abs() < 1e-3, || format!("max ratio {max_ratio}"))?;

    let mut witnesses = vec![
        w.clone(),
        w.shifted(c(3.0, -1.0)).map_err(e)?,
        dbar::make_witness(indicator(0.3), c(3.0, 0.5), 1f64.exp(), WitnessDomain::Plane, 4.0, 1.5).map_err(e)?,
        dbar::make_witness(Coefficient::Zero, c(2.0, 0.0), 1.0, WitnessDomain::Plane, 3.0, 1.0).map_err(e)?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..16 {
        let a = Coefficient::Gaussian {
            c: Complex64::from_polar(rng.gen_range(0.0..0.6), rng.gen_range(0.0..std::f64::consts::TAU)),
            center: c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            width: rng.gen_range(0.3..1.5),
        };
        let g0 = c(rng.gen_range(2.0..5.0), rng.gen_range(-0.5..0.5));
        witnesses.push(dbar::make_witness(a, g0, 1.0, WitnessDomain::Plane, 4.0, 1.5).map_err(e)?);
    }
    for (k, wk) in witnesses.iter().enumerate() {
        let cor = dbar::check_prop6_corollaries(wk, &CheckOptions::default()).map_err(e)?;
        ensure(cor.pass, || format!("witness {k}: corollaries fail at {:?}", cor.witness))?;
    }
    Ok(format!(
        "indicator errors {:.4} (h={:.4}) → {:.4} (h={:.4}), ratio {halving:.3}; max ratio {max_ratio:.6} vs e^0.3 = {:.6}; corollaries on {} witnesses",
        errs[0].1,
        errs[0].0,
        errs[1].1,
        errs[1].0,
        0.3f64.exp(),
        witnesses.len()
    ))
}

fn fast_marching() -> Outcome {
    let disk = DensityModel::unit_disk();
    let mut g = GeodesicGrid::new(&disk, [-1.0, 1.0, -1.0, 1.0], 1024, 1024).map_err(e)?;
    g.solve(c(0.0, 0.0)).map_err(e)?;
    let d = g.distance_at(c(0.5, 0.0)).map_err(e)?.value().ok_or("0.5 unreachable")?;
    ensure(rel(d, 3f64.ln()) < 0.02, || format!("distance {d}"))?;
    let mut lines = vec![format!("1024²: {d:.5} vs log 3 ({:+.2}%)", 100.0 * (d / 3f64.ln() - 1.0))];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let domains = [
        ("disk", disk, [-1.0, 1.0, -1.0, 1.0], c(0.0, 0.0), 0.7),
        ("punctured-disk", DensityModel::punctured_disk(), [-1.0, 1.0, -1.0, 1.0], c(0.0, 0.0), 0.7),
        ("twice-punctured", DensityModel::twice_punctured(), [-3.0, 4.0, -3.5, 3.5], c(0.5, 0.0), 2.5),
    ];
    for (name, model, bounds, centre, spread) in domains {
        let anchors: Vec<Complex64> = std::iter::repeat_with(|| {
            centre + Complex64::from_polar(spread * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .filter(|z| model.punctures().iter().all(|p| (z - p).norm() > 0.25))
        .take(12)
        .collect();
        let triples: Vec<(usize, usize, usize)> = (0..100)
            .map(|_| loop {
                let t = (rng.gen_range(0..12), rng.gen_range(0..12), rng.gen_range(0..12));
                if t.0 != t.1 && t.1 != t.2 && t.0 != t.2 {
                    break t;
                }
            })
            .collect();
        let cert = check_grid_metric(&model, bounds, 129, &anchors, &triples, 10).map_err(e)?;
        ensure(cert.pass, || format!("{name}: slack {:e} at {:?}", cert.worst_slack, cert.witness))?;
        lines.push(format!(
            "{name}: worst slack {:.2e} ≥ −2·{:.2e}",
            cert.worst_slack, cert.constants["grid_tolerance"]
        ));
    }
    Ok(lines.join("; "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("constant C₀,₁ reproduced", constant_reproduction),
        ("area integral vs modular covering", dual_oracle),
        ("density sandwich and floor", density_bounds),
        ("Harnack extremal equality", harnack_extremal),
        ("Landau extremal S′(0) = 2C₀,₁", landau_extremal),
        ("two-point envelopes on random families", two_point_suite),
        ("Schottky bound", schottky),
        ("holomorphic motions Hölder estimate", motions),
        ("∂̄ transform and witnesses", dbar_machinery),
        ("fast-marching distances", fast_marching),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{secs:.1} s]: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.1} s]: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
