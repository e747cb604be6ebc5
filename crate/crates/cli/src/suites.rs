//! One runner per suite. Each returns a report whose failure list decides
//! the exit status.

use crate::args::{Mode, Params, Suite};
use crate::report::{Cell, Report};
use adelic_core::hecke::{
    coset_reps_tp, crux_histogram, family_size, gl_order, gl_order_brute_force, group_orders, hecke_degree,
    local_zeta_identity, stabilizer_order, stabilizer_order_brute_force, tamagawa_inversion_check, DegreeMode,
};
use adelic_core::heights::{
    column_deletion_holds, global_height, hadamard_holds, ideal_generator, quadratic_ideals, shortest_vector_bound,
    ArchMatrix,
};
use adelic_core::lattices::Region;
use adelic_core::meanvalue::{
    degree_one_prime, echelon_decomposition_check, primitive_density, rogers_pair_average, second_moment_prediction,
    siegel_convergence, AdelicTestFunction, EchelonForm, FiniteFunction, PairMode,
};
use adelic_core::numberfield::parse_field_spec;
use adelic_core::schanuel::{
    annulus_overlap_check, count_projective_points, schanuel_constant, ProjectiveCountConfig,     asymptotic_unit_count, unit_count, Annulus, UnitCountQuery,
};
use adelic_core::{Error, FieldElement, NumberField, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use num_bigint::BigInt;
use std::collections::HashSet;

const GENERIC: &[&str] = &["check", "case", "value", "expected", "pass"];

pub fn field(p: &Params, default: &str) -> Result<NumberField> {
    if let Some(path) = &p.spec {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read field spec {}: {e}", path.display())))?;
        return parse_field_spec(&text);
    }
    NumberField::from_label(p.field.as_deref().unwrap_or(default))
}

/// Fields named by --field/--spec, or the given defaults.
fn fields(p: &Params, defaults: &[&str]) -> Result<Vec<NumberField>> {
    if p.field.is_some() || p.spec.is_some() {
        Ok(vec![field(p, "Q")?])
    } else {
        defaults.iter().map(|l| NumberField::from_label(l)).collect()
    }
}

fn generic_row(r: &mut Report, check: &str, case: String, value: Cell, expected: Cell, pass: bool) {
    r.expect(pass, || format!("{check} {case}"));
    r.row(vec![check.into(), case.into(), value, expected, pass.into()]);
}

pub fn run(suite: Suite, p: &Params) -> Result<Report> {
    let mut r = match suite {
        Suite::Hecke => hecke(p),
        Suite::ZetaIdentities => zeta_identities(p),
        Suite::Inversion => inversion(p),
        Suite::Orders => orders(p),
        Suite::Crux => crux(p),
        Suite::Siegel => siegel(p),
        Suite::Rogers => rogers(p),
        Suite::SecondMoment => second_moment(p),
        Suite::PrimitiveDensity => primitive(p),
        Suite::Echelon => echelon(p),
        Suite::Heights => heights(p),
        Suite::Units => units(p),
        Suite::Overlap => overlap(p),
        Suite::Schanuel => schanuel(p),
    }?;
    r.set("seed", p.seed);
    Ok(r)
}

fn hecke(p: &Params) -> Result<Report> {
    let mut r = Report::new("hecke", GENERIC);
    let qs = if p.q.is_empty() { vec![2, 3, 5] } else { p.q.clone() };
    let m_max = p.m_max.unwrap_or(3);
    let k_max = p.k_max.unwrap_or(3);
    r.set("q", format!("{qs:?}")).set("m_max", m_max).set("k_max", k_max);
    for &q in &qs {
        for m in 1..=m_max {
            for k in 0..=k_max {
                let closed = hecke_degree(m, q, k, DegreeMode::ClosedForm)?;
                let brute = hecke_degree(m, q, k, DegreeMode::BruteForce)?;
                let ok = closed == brute;
                generic_row(&mut r, "degree", format!("q={q} m={m} k={k}"), brute.into(), closed.into(), ok);
            }
        }
        for n in 2..=m_max + 1 {
            let reps = coset_reps_tp(n, q)?;
            let labels: HashSet<Vec<Vec<i64>>> = reps.iter().map(|c| c.canonical()).collect();
            let want = family_size(n, q);
            generic_row(&mut r, "cosets", format!("q={q} n={n}"), (labels.len() as u64).into(), want.into(), labels.len() as u64 == want && reps.len() as u64 == want);
        }
        if adelic_core::special::is_prime(q) {
            for (m, n, e) in [(1, 2, 2), (2, 3, 1)] {
                let rep = tamagawa_inversion_check(m, n, q, e, p.seed)?;
                let bad = rep.backward_failures + rep.forward_failures;
                generic_row(&mut r, "inversion", format!("m={m} n={n} q={q} e={e}"), bad.into(), 0u64.into(), rep.passed());
            }
        }
    }
    Ok(r)
}

fn zeta_identities(p: &Params) -> Result<Report> {
    let mut r = Report::new("zeta-identities", &["m", "n", "q", "K", "partial_sum", "target", "gap", "tail_bound", "gaps_decrease", "pass"]);
    let tol = p.tolerance.unwrap_or(1e-6);
    let big_k = p.big_k.unwrap_or(25);
    let cases: Vec<(usize, usize, u64)> = match (p.m, p.n, p.q.first()) {
        (Some(m), Some(n), Some(&q)) => vec![(m, n, q)],
        _ => vec![(1, 2, 2), (2, 3, 2), (2, 4, 3)],
    };
    r.set("tolerance", tol).set("K", big_k);
    for (m, n, q) in cases {
        let z = local_zeta_identity(m, n, q, big_k)?;
        let ok = z.gap < tol && z.gaps_decrease();
        r.expect(ok, || format!("m={m} n={n} q={q}: gap {}", z.gap));
        r.row(vec![
            m.into(),
            n.into(),
            q.into(),
            big_k.into(),
            num_traits::ToPrimitive::to_f64(&z.partial_sum).unwrap_or(f64::NAN).into(),
            num_traits::ToPrimitive::to_f64(&z.target).unwrap_or(f64::NAN).into(),
            z.gap.into(),
            z.tail_bound.into(),
            z.gaps_decrease().into(),
            ok.into(),
        ]);
    }
    Ok(r)
}

fn inversion(p: &Params) -> Result<Report> {
    let mut r = Report::new("inversion", &["m", "n", "q", "e", "classes", "exhaustive", "backward_failures", "forward_failures", "pass"]);
    let cases: Vec<(usize, usize, u64, u32)> = match (p.m, p.n, p.q.first(), p.e) {
        (Some(m), Some(n), Some(&q), Some(e)) => vec![(m, n, q, e)],
        _ => vec![(1, 2, 2, 2), (2, 3, 2, 2), (2, 3, 3, 1)],
    };
    for (m, n, q, e) in cases {
        let rep = tamagawa_inversion_check(m, n, q, e, p.seed)?;
        r.expect(rep.passed(), || format!("m={m} n={n} q={q} e={e}: first failure {:?}", rep.first_failure));
        if !rep.exhaustive {
            r.notes.push(format!("m={m} n={n} q={q} e={e} was sampled"));
        }
        r.row(vec![
            m.into(),
            n.into(),
            q.into(),
            e.into(),
            rep.classes.into(),
            rep.exhaustive.into(),
            rep.backward_failures.into(),
            rep.forward_failures.into(),
            rep.passed().into(),
        ]);
    }
    Ok(r)
}

/// Non-increasing level tuples l_1 ≥ … ≥ l_{m'} ≥ 1 with l_1 = l.
fn level_tuples(l: u32, len: usize) -> Vec<Vec<u32>> {
    if len == 1 {
        return vec![vec![l]];
    }
    let mut out = Vec::new();
    for tail in 1..=l {
        for mut t in level_tuples(tail, len - 1) {
            t.insert(0, l);
            out.push(t);
        }
    }
    out
}

fn orders(p: &Params) -> Result<Report> {
    let mut r = Report::new("orders", GENERIC);
    let n_max = p.n.unwrap_or(3);
    let qs = if p.q.is_empty() { vec![2, 3] } else { p.q.clone() };
    let l_max = p.k.unwrap_or(2);
    r.set("n_max", n_max).set("q", format!("{qs:?}")).set("l_max", l_max);
    for &q in &qs {
        for n in 1..=n_max {
            for l in 1..=l_max {
                let f = gl_order(n, q, l);
                let b = gl_order_brute_force(n, q, l);
                generic_row(&mut r, "gl", format!("n={n} q={q} l={l}"), b.into(), f.clone().into(), f == BigInt::from(b));
                for mp in 1..n {
                    for ls in level_tuples(l, mp) {
                        let f = stabilizer_order(n, q, &ls)?;
                        let b = stabilizer_order_brute_force(n, q, &ls)?;
                        generic_row(&mut r, "stabilizer", format!("n={n} q={q} l={ls:?}"), b.into(), f.clone().into(), f == BigInt::from(b));
                    }
                }
            }
        }
    }
    // volume ratio identity over a sweep of (n, q, m, levels)
    let mut cases = 0;
    'sweep: for n in 2..=5usize {
        for q in [2u64, 3, 5] {
            for m in 1..n {
                for mp in 1..=m {
                    for ls in level_tuples(if mp == 1 { 1 + (n % 2) as u32 } else { 2 }, mp) {
                        let g = group_orders(n, q, m, &ls)?;
                        generic_row(
                            &mut r,
                            "volume-ratio",
                            format!("n={n} q={q} m={m} l={ls:?}"),
                            g.ratio.to_string().into(),
                            g.expected_ratio.to_string().into(),
                            g.ratio_holds(),
                        );
                        cases += 1;
                        if cases == p.cases.unwrap_or(20) {
                            break 'sweep;
                        }
                    }
                }
            }
        }
    }
    Ok(r)
}

fn crux(p: &Params) -> Result<Report> {
    let mut r = Report::new("crux", &["p", "n", "m", "matrices", "targets", "expected_count", "pass"]);
    let ps = if p.primes.is_empty() { vec![2, 3, 5] } else { p.primes.clone() };
    let n_max = p.n.unwrap_or(4);
    let m_max = p.m.unwrap_or(2);
    for &q in &ps {
        for n in 2..=n_max {
            for m in 1..=m_max.min(n - 1) {
                let expected = q.pow((n - 1 - m) as u32);
                let cols = n - 1;
                let mut matrices = 0u64;
                let mut ok = true;
                let total = (q as usize).pow((m * cols) as u32);
                for idx in 0..total {
                    let mut v = idx;
                    let x: Vec<Vec<i64>> = (0..m)
                        .map(|_| {
                            (0..cols)
                                .map(|_| {
                                    let d = (v % q as usize) as i64;
                                    v /= q as usize;
                                    d
                                })
                                .collect()
                        })
                        .collect();
                    match crux_histogram(&x, q) {
                        Ok(h) => {
                            matrices += 1;
                            ok &= h.iter().all(|&c| c == expected);
                        }
                        Err(Error::Precondition(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
                r.expect(ok, || format!("p={q} n={n} m={m}"));
                r.row(vec![q.into(), n.into(), m.into(), matrices.into(), q.pow(m as u32).into(), expected.into(), ok.into()]);
            }
        }
    }
    Ok(r)
}

fn region(p: &Params, default: &str, dim: usize) -> Result<Region> {
    Region::parse(p.region.as_deref().unwrap_or(default), dim)
}

fn siegel(p: &Params) -> Result<Report> {
    let f = field(p, "Q")?;
    let n = p.n.unwrap_or(3);
    let primes = if p.primes.is_empty() { vec![11, 101] } else { p.primes.clone() };
    let reg = region(p, "ball:3.5", n * f.degree())?;
    let tol = p.tolerance.unwrap_or(0.05);
    let mut r = Report::new("siegel", &["field", "n", "q", "average", "target", "gap", "relative_gap", "seconds"]);
    r.set("field", f.label()).set("n", n).set("tolerance", tol).set("region", format!("{reg:?}"));
    let ideals: Vec<_> = primes.iter().map(|&q| degree_one_prime(&f, q)).collect::<Result<_>>()?;
    let test = AdelicTestFunction::level_one(n, reg);
    let rep = siegel_convergence(&f, n, &test, &ideals)?;
    for row in &rep.rows {
        r.row(vec![
            row.field.clone().into(),
            row.n.into(),
            row.q.into(),
            row.average.into(),
            row.target.into(),
            row.gap.into(),
            row.relative_gap().into(),
            row.seconds.into(),
        ]);
    }
    if let Some(last) = rep.rows.last() {
        r.expect(last.relative_gap() <= tol, || format!("relative gap {} at q={} exceeds {tol}", last.relative_gap(), last.q));
    }
    r.expect(rep.gaps_decrease(), || "gap does not decrease with q".into());
    Ok(r)
}

fn rogers(p: &Params) -> Result<Report> {
    let f = field(p, "Q")?;
    let n = p.n.unwrap_or(3);
    let primes = if p.primes.is_empty() { vec![101] } else { p.primes.clone() };
    let reg = region(p, "ball:2", n * f.degree())?;
    let tol = p.tolerance.unwrap_or(0.1);
    let mode = p.mode.unwrap_or(Mode::Both);
    let mut r = Report::new("rogers", &["field", "n", "q", "mode", "average", "target", "relative_gap", "pass"]);
    r.set("field", f.label()).set("n", n).set("tolerance", tol).set("region", format!("{reg:?}"));
    let test = AdelicTestFunction::level_one(n, reg.clone());
    let v = test.volume(&f)?;
    for &q in &primes {
        let ideal = degree_one_prime(&f, q)?;
        let mut modes = Vec::new();
        if mode != Mode::Full {
            modes.push((PairMode::IndependentPairs, "independent", v * v));
        }
        if mode != Mode::Independent {
            let radius = match reg {
                Region::Ball { radius } if f.degree() == 1 => radius,
                _ => return Err(Error::Config("full-square targets exist for balls over Q only".into())),
            };
            modes.push((PairMode::FullSquare, "full", second_moment_prediction(n, radius, 1e-6)?.value));
        }
        for (pm, name, target) in modes {
            let a = rogers_pair_average(&f, n, &test, &test, &ideal, pm)?;
            let rel = (a - target).abs() / target;
            r.expect(rel <= tol, || format!("{name} q={q}: relative gap {rel}"));
            r.row(vec![f.label().into(), n.into(), q.into(), name.into(), a.into(), target.into(), rel.into(), (rel <= tol).into()]);
        }
    }
    Ok(r)
}

fn second_moment(p: &Params) -> Result<Report> {
    let n = p.n.unwrap_or(3);
    let reg = region(p, "ball:2", n)?;
    let radius = match reg {
        Region::Ball { radius } => radius,
        _ => return Err(Error::Config("the second moment series is for balls".into())),
    };
    let tol = p.tolerance.unwrap_or(1e-6);
    let s = second_moment_prediction(n, radius, tol)?;
    let mut r = Report::new("second-moment", &["n", "radius", "volume", "c_one_term", "series", "value", "truncation", "tail_bound", "pass"]);
    r.set("tolerance", tol);
    let ok = s.tail_bound < tol * s.value && s.c_one_term() == s.volume;
    r.expect(ok, || format!("tail {} not below {tol} of {}", s.tail_bound, s.value));
    r.row(vec![
        n.into(),
        radius.into(),
        s.volume.into(),
        s.c_one_term().into(),
        s.series.into(),
        s.value.into(),
        s.truncation.into(),
        s.tail_bound.into(),
        ok.into(),
    ]);
    Ok(r)
}

fn primitive(p: &Params) -> Result<Report> {
    let cases: Vec<(usize, usize, i64, f64)> = match (p.m, p.n) {
        (Some(m), Some(n)) => vec![(m, n, p.half_width.unwrap_or(100), p.tolerance.unwrap_or(0.02))],
        _ => vec![(1, 3, 100, 0.02), (1, 2, 100, 0.02), (2, 3, 20, 0.03)],
    };
    let mut r = Report::new("primitive-density", &["m", "n", "half_width", "empirical", "target", "relative_gap", "exhaustive", "trials", "pass"]);
    for (m, n, w, tol) in cases {
        let d = primitive_density(n, m, w, p.seed)?;
        let ok = d.relative_gap() <= tol;
        r.expect(ok, || format!("m={m} n={n} N={w}: relative gap {}", d.relative_gap()));
        r.row(vec![
            m.into(),
            n.into(),
            w.into(),
            d.empirical.into(),
            d.target.into(),
            d.relative_gap().into(),
            d.exhaustive.into(),
            d.trials.into(),
            ok.into(),
        ]);
    }
    Ok(r)
}

fn echelon(p: &Params) -> Result<Report> {
    let mut r = Report::new("echelon", GENERIC);
    let k = p.k.unwrap_or(2) as usize;
    let n = p.n.unwrap_or(3);
    let g = p.grid.unwrap_or(2);
    let f = FiniteFunction::grid_indicator(k, n, g);
    let c = echelon_decomposition_check(&f)?;
    generic_row(&mut r, "decomposition", format!("k={k} n={n} grid={g}"), c.rhs.to_string().into(), c.lhs.to_string().into(), c.equal());
    let den = p.denominators.unwrap_or(12);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for i in 0..p.cases.unwrap_or(50) {
        let m = rng.gen_range(1..=2);
        let d = EchelonForm::random(m, 3, den, &mut rng)?;
        match d.density_brute_force() {
            Some(b) => generic_row(&mut r, "density", format!("#{i} D=[{}]", fmt_matrix(&d.matrix)), b.to_string().into(), d.density.to_string().into(), b == d.density),
            None => r.notes.push(format!("#{i}: box too large for the brute-force count")),
        }
    }
    Ok(r)
}

fn fmt_matrix(m: &[Vec<num_rational::BigRational>]) -> String {
    let rows: Vec<String> = m.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).collect();
    rows.join("; ")
}

fn random_arch<R: Rng>(rng: &mut R) -> ArchMatrix {
    let m = rng.gen_range(1..=4);
    let n = rng.gen_range(m..=6);
    if rng.gen_bool(0.5) {
        ArchMatrix::real((0..m).map(|_| (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect())
    } else {
        ArchMatrix::complex(
            (0..m).map(|_| (0..n).map(|_| Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))).collect()).collect(),
        )
    }
}

fn random_element<R: Rng>(f: &NumberField, rng: &mut R, span: i64) -> FieldElement {
    let c: Vec<i64> = (0..f.degree()).map(|_| rng.gen_range(-span..=span)).collect();
    f.element(&c)
}

fn heights(p: &Params) -> Result<Report> {
    let mut r = Report::new("heights", GENERIC);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let cases = p.cases.unwrap_or(1000);
    let (mut had, mut del) = (0u64, 0u64);
    for _ in 0..cases {
        let x = random_arch(&mut rng);
        had += hadamard_holds(&x) as u64;
        del += column_deletion_holds(&x) as u64;
    }
    generic_row(&mut r, "hadamard", format!("{cases} random matrices"), had.into(), (cases as u64).into(), had == cases as u64);
    generic_row(&mut r, "column-deletion", format!("{cases} random matrices"), del.into(), (cases as u64).into(), del == cases as u64);
    let tol = p.tolerance.unwrap_or(1e-9);
    let max_norm = p.bound.unwrap_or(50.0) as i64;
    for f in fields(p, &["Q(i)", "Q(sqrt2)"])? {
        let mut worst = 0.0f64;
        for i in 0..100 {
            let x: Vec<FieldElement> = loop {
                let x: Vec<FieldElement> = (0..3).map(|_| random_element(&f, &mut rng, 9)).collect();
                if x.iter().any(|v| !v.is_zero()) {
                    break x;
                }
            };
            let c = if i % 2 == 0 && !f.fundamental_units().is_empty() {
                f.pow(&f.fundamental_units()[0], rng.gen_range(-3..=3))?
            } else {
                loop {
                    let c = random_element(&f, &mut rng, 7);
                    if !c.is_zero() {
                        break f.div(&c, &f.int(rng.gen_range(1..=5)))?;
                    }
                }
            };
            let cx: Vec<FieldElement> = x.iter().map(|v| f.mul(&c, v)).collect();
            let h = global_height(&f, &[x], None)?.value();
            let hc = global_height(&f, &[cx], None)?.value();
            worst = worst.max((hc / h - 1.0).abs());
        }
        generic_row(&mut r, "product-formula", format!("{} 100 elements", f.label()), worst.into(), tol.into(), worst <= tol);
        if f.degree() == 2 {
            let (mut ok, mut total) = (0u64, 0u64);
            for hnf in quadratic_ideals(&f, max_norm)? {
                let alpha = ideal_generator(&f, &hnf)?;
                for x in [[f.one(), f.zero()], [f.int(1), f.int(2)], [f.element(&[2, 1]), f.int(-3)]] {
                    total += 1;
                    ok += shortest_vector_bound(&f, &alpha, &x)?.holds() as u64;
                }
            }
            generic_row(&mut r, "shortest-vector", format!("{} ideals of norm ≤ {max_norm}", f.label()), ok.into(), total.into(), ok == total);
        }
    }
    Ok(r)
}

fn units(p: &Params) -> Result<Report> {
    let mut r = Report::new("units", &["field", "gamma", "k", "exact", "asymptotic", "difference", "tolerance", "pass"]);
    let k_max = p.k_max.unwrap_or(40);
    for f in fields(p, &["Q(sqrt2)", "Q(i)", "Q"])? {
        let tol = if f.unit_rank() == 0 { 0.0 } else { p.tolerance.unwrap_or(2.0) };
        let gammas = if f.degree() == 2 { vec![f.one(), f.element(&[3, 1])] } else { vec![f.one(), f.int(3)] };
        for g in gammas {
            for k in 0..=k_max {
                let q = UnitCountQuery::new(g.clone(), k as f64)?;
                let exact = unit_count(&q, &f)?;
                let asym = asymptotic_unit_count(&q, &f)?;
                let diff = (exact as f64 - asym).abs();
                let ok = diff <= tol + 1e-12;
                r.expect(ok, || format!("{} γ={g} k={k}: {exact} vs {asym}", f.label()));
                r.row(vec![f.label().into(), g.to_string().into(), k.into(), exact.into(), asym.into(), diff.into(), tol.into(), ok.into()]);
            }
        }
    }
    Ok(r)
}

fn overlap(p: &Params) -> Result<Report> {
    let mut r = Report::new("overlap", &["field", "case", "gamma", "inner", "outer", "estimate", "standard_error", "bound", "pass"]);
    let n = p.n.unwrap_or(2);
    let samples = p.samples.unwrap_or(1_000_000);
    let cases = p.cases.unwrap_or(100);
    r.set("n", n).set("samples", samples).set("cases", cases);
    let fs = fields(p, &["Q(sqrt2)", "Q(i)"])?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut nontrivial = 0;
    for case in 0..cases {
        let f = &fs[case % fs.len()];
        let g = overlap_gamma(f, &mut rng)?;
        let inner = rng.gen_range(0.0..1.0);
        let a = Annulus::new(inner, inner + rng.gen_range(0.1..2.0))?;
        let c = annulus_overlap_check(f, n, &a, &g, samples, p.seed.wrapping_add(case as u64))?;
        if let Some(w) = &c.warning {
            r.notes.push(w.clone());
        }
        nontrivial += (c.estimate > 0.0) as usize;
        r.expect(c.passed(), || format!("{} case {case}: estimate {} bound {}", f.label(), c.estimate, c.bound));
        r.row(vec![
            f.label().into(),
            case.into(),
            g.to_string().into(),
            a.inner.into(),
            a.outer.into(),
            c.estimate.into(),
            c.standard_error.into(),
            c.bound.into(),
            c.passed().into(),
        ]);
    }
    r.set("nonzero_overlaps", nontrivial);
    Ok(r)
}

/// γ = u·β with u a random unit and β small, so γ·A meets A often.
fn overlap_gamma<R: Rng>(f: &NumberField, rng: &mut R) -> Result<FieldElement> {
    let beta = loop {
        let b = random_element(f, rng, 2);
        if !b.is_zero() {
            break b;
        }
    };
    let mut u = f.one();
    for e in f.fundamental_units() {
        u = f.mul(&u, &f.pow(e, rng.gen_range(-3..=3))?);
    }
    Ok(f.mul(&u, &beta))
}

fn schanuel(p: &Params) -> Result<Report> {
    let f = field(p, "Q")?;
    let n = p.n.unwrap_or(2);
    let b = p.bound.unwrap_or(if n == 2 { 200.0 } else { 50.0 });
    let tol = p.tolerance.unwrap_or(0.03);
    let c = schanuel_constant(&f, n)?;
    let count = count_projective_points(&ProjectiveCountConfig::new(f.clone(), n, b)?)?;
    let pred = c * b.powi(n as i32);
    let rel = (count as f64 - pred).abs() / pred;
    let mut r = Report::new("schanuel", &["field", "n", "B", "count", "constant", "prediction", "relative_gap", "pass"]);
    r.set("tolerance", tol);
    r.expect(rel <= tol, || format!("{} n={n} B={b}: relative gap {rel}", f.label()));
    r.row(vec![f.label().into(), n.into(), b.into(), count.into(), c.into(), pred.into(), rel.into(), (rel <= tol).into()]);
    Ok(r)
}

/// Static suite table.
pub fn list() -> Vec<(&'static str, &'static str)> {
    vec![
        ("hecke", "Hecke degrees, coset representatives and small inversion cases"),
        ("zeta-identities", "Prop 4.7"),
        ("inversion", "primitive/full inversion on residue classes"),
        ("orders", "group and stabilizer orders over Z/q^l and the volume ratio"),
        ("crux", "equidistribution of Xa over F_p"),
        ("siegel", "Prop 3.2 Hecke-average convergence"),
        ("rogers", "pair averages against V^2 and the second moment"),
        ("second-moment", "second moment series with certified tail"),
        ("primitive-density", "densities of primitive integer matrices"),
        ("echelon", "echelon decomposition and the densities N(D)"),
        ("heights", "height inequalities, product formula, shortest vectors"),
        ("units", "unit counts in Log space against the leading term"),
        ("overlap", "annulus overlap bound by Monte Carlo"),
        ("schanuel", "Theorem 1.6 / Prop 5.4"),
    ]
}
