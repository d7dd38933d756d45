//! Acceptance gate. Each criterion runs under a pinned time limit and prints
//! one PASS/FAIL line; the test fails if any criterion fails.

use std::time::{Duration, Instant};

use num_traits::{One, Signed, ToPrimitive, Zero};
use rackext::abelian::snf;
use rackext::catalog::{self, CatalogModule};
use rackext::ext_group::{brute_force_ext_order, cocycle_group, ext_group};
use rackext::extension::{coboundary_of, cocycle_violation, is_cocycle, is_split, quandle_factor_violation, are_equivalent};
use rackext::rack::Letter;
use rackext::{caps, AbGroup, Element, ExtensionRack, FactorSet, FinRack, Flavor, Hom, Int, Matrix, RackModule, SignedWord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn entry(name: &str) -> RackModule {
    catalog::module(name).unwrap_or_else(|| panic!("catalog module {name}")).module
}

fn random_in(rng: &mut ChaCha8Rng, g: &AbGroup) -> Element {
    g.moduli()
        .iter()
        .map(|q| if q.is_zero() { Int::from(rng.gen_range(-50..=50)) } else { Int::from(rng.gen_range(0..q.to_u64().unwrap())) })
        .collect()
}

fn random_factor_set(rng: &mut ChaCha8Rng, m: &RackModule) -> FactorSet {
    let r = m.base();
    let n = r.size();
    let values = (0..n * n).map(|p| random_in(rng, m.group(r.op(p / n, p % n)))).collect();
    FactorSet::new(m, values).unwrap()
}

fn random_family(rng: &mut ChaCha8Rng, m: &RackModule) -> Vec<Element> {
    m.groups().iter().map(|g| random_in(rng, g)).collect()
}

/// Uniform-ish element of `Z` as a random combination of its generators.
fn random_cocycle(rng: &mut ChaCha8Rng, m: &RackModule, flavor: Flavor) -> FactorSet {
    let z = cocycle_group(m, flavor).unwrap();
    let amb = z.ambient();
    let mut acc = amb.zero();
    for g in z.generators() {
        let k = Int::from(rng.gen_range(0..97));
        acc = amb.add(&acc, &amb.scale(&k, g).unwrap()).unwrap();
    }
    FactorSet::from_flat(m, &acc).unwrap()
}

fn finite_catalog() -> Vec<CatalogModule> {
    catalog::modules().into_iter().filter(|c| c.module.is_finite()).collect()
}

fn space(m: &RackModule) -> Option<u64> {
    rackext::extension::factor_ambient(m).order()?.to_u64()
}

fn c1_axiom_biconditional() -> Check {
    let m = entry("c3_z5_andr_grana");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut samples: Vec<FactorSet> = (0..200).map(|_| random_factor_set(&mut rng, &m)).collect();
    samples.extend((0..50).map(|_| random_cocycle(&mut rng, &m, Flavor::Rack)));
    let mut racks = 0;
    for s in &samples {
        let table = ExtensionRack::pair_table(&m, s, caps::EXTENSION_SIZE).map_err(err)?;
        let is_rack = FinRack::from_table(&table).is_ok();
        let cocycle = is_cocycle(&m, s).map_err(err)?;
        ensure!(is_rack == cocycle, "mismatch: rack {is_rack}, cocycle {cocycle} for {:?}", s.flatten());
        racks += is_rack as usize;
    }
    Ok(format!("200 uniform + 50 cocycle samples, {racks} racks, 0 mismatches"))
}

fn c2_quandle_biconditional() -> Check {
    let m = entry("dihedral3_d3");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut samples: Vec<FactorSet> = (0..200).map(|_| random_factor_set(&mut rng, &m)).collect();
    samples.extend((0..50).map(|_| random_cocycle(&mut rng, &m, Flavor::Rack)));
    samples.extend((0..50).map(|_| random_cocycle(&mut rng, &m, Flavor::Quandle)));
    let mut quandles = 0;
    for s in &samples {
        let table = ExtensionRack::pair_table(&m, s, caps::EXTENSION_SIZE).map_err(err)?;
        let is_quandle = FinRack::from_table(&table).map(|r| r.is_quandle()).unwrap_or(false);
        let passes = quandle_factor_violation(&m, s).map_err(err)?.is_none();
        ensure!(is_quandle == passes, "mismatch: quandle {is_quandle}, check {passes} for {:?}", s.flatten());
        quandles += is_quandle as usize;
    }
    Ok(format!("200 uniform + 100 cocycle samples, {quandles} quandles, 0 mismatches"))
}

fn c3_exact_small_answers() -> Check {
    let ints = |v: &[i64]| v.iter().map(|&c| Int::from(c)).collect::<Vec<_>>();
    let point = ext_group(&entry("point_z5"), Flavor::Rack).map_err(err)?;
    ensure!(point.free_rank == 0 && point.torsion == ints(&[5]), "Ext(point, Z5) = {:?}", point.torsion);
    let q = ext_group(&entry("point_z5"), Flavor::Quandle).map_err(err)?;
    ensure!(q.free_rank == 0 && q.torsion.is_empty(), "Ext_Q(point, Z5) = {:?}", q.torsion);
    let t = ext_group(&entry("trivial2_z2"), Flavor::Rack).map_err(err)?;
    ensure!(t.free_rank == 0 && t.torsion == ints(&[2, 2, 2, 2]), "Ext(T2, Z2) = {:?}", t.torsion);
    Ok("Z5, 0, (Z2)^4".into())
}

fn c4_oracle_agreement() -> Check {
    let mut compared = 0;
    let mut skipped = Vec::new();
    for c in catalog::modules() {
        let fits = c.module.is_finite() && space(&c.module).is_some_and(|s| s <= caps::BRUTE_FORCE);
        if !fits {
            skipped.push(c.name);
            continue;
        }
        for flavor in c.flavors() {
            let e = ext_group(&c.module, flavor).map_err(err)?;
            let b = brute_force_ext_order(&c.module, flavor, caps::BRUTE_FORCE, 4).map_err(err)?;
            ensure!(b.z % b.b == 0, "{} {flavor}: |B| = {} does not divide |Z| = {}", c.name, b.b, b.z);
            let ext = e.ext_order.and_then(|o| o.to_u64());
            ensure!(ext == Some(b.ext), "{} {flavor}: SNF order {ext:?}, enumeration {}", c.name, b.ext);
            ensure!(e.z_order.and_then(|o| o.to_u64()) == Some(b.z), "{} {flavor}: |Z| differs", c.name);
            ensure!(e.b_order.and_then(|o| o.to_u64()) == Some(b.b), "{} {flavor}: |B| differs", c.name);
            compared += 1;
        }
    }
    Ok(format!("{compared} (module, flavor) cases agree; above cap or infinite: {}", skipped.join(", ")))
}

fn c5_round_trip_and_section_independence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pool: Vec<RackModule> = finite_catalog()
        .into_iter()
        .filter(|c| rackext::extension::fiber_sum(&c.module).order().is_some_and(|o| o <= Int::from(100)))
        .map(|c| c.module)
        .collect();
    for i in 0..100 {
        let m = &pool[i % pool.len()];
        let s = random_cocycle(&mut rng, m, Flavor::Rack);
        let e = ExtensionRack::from_factor_set(m, &s, caps::EXTENSION_SIZE).map_err(err)?;
        let back = e.extract_factor_set(&e.zero_section()).map_err(err)?;
        ensure!(back == s, "round trip changed {:?} into {:?}", s.flatten(), back.flatten());
    }
    let m = entry("dihedral3_z2");
    let reps = ext_group(&m, Flavor::Rack).map_err(err)?.representatives;
    let sigma = reps.last().cloned().unwrap_or_else(|| FactorSet::zero(&m));
    let e = ExtensionRack::from_factor_set(&m, &sigma, caps::EXTENSION_SIZE).map_err(err)?;
    for _ in 0..100 {
        let s1 = e.section_from(&random_family(&mut rng, &m)).map_err(err)?;
        let s2 = e.section_from(&random_family(&mut rng, &m)).map_err(err)?;
        let (f1, f2) = (e.extract_factor_set(&s1).map_err(err)?, e.extract_factor_set(&s2).map_err(err)?);
        ensure!(are_equivalent(&m, &f1, &f2).map_err(err)?.is_some(), "sections gave inequivalent factor sets");
    }
    Ok(format!("100 round trips over {} modules, 100 section pairs", pool.len()))
}

fn c6_split_detection() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pool = catalog::modules();
    for i in 0..100 {
        let m = &pool[i % pool.len()].module;
        let s = coboundary_of(m, &random_family(&mut rng, m)).map_err(err)?;
        let u = is_split(m, &s).map_err(err)?.ok_or("coboundary reported not split")?;
        ensure!(coboundary_of(m, &u).map_err(err)? == s, "witness does not reproduce the coboundary");
    }
    let m = entry("point_z2");
    let one = FactorSet::from_fn(&m, |_, _| vec![Int::one()]).map_err(err)?;
    ensure!(is_split(&m, &one).map_err(err)?.is_none(), "sigma = 1 on the point reported split");
    Ok("100 coboundaries split with verified witnesses; point sigma = 1 not split".into())
}

fn random_word(rng: &mut ChaCha8Rng, n: usize) -> Vec<Letter> {
    let len = rng.gen_range(0..8);
    (0..len)
        .map(|_| {
            let g = rng.gen_range(0..n);
            if rng.gen_bool(0.5) { Letter::pos(g) } else { Letter::inv(g) }
        })
        .collect()
}

fn c7_word_action() -> Check {
    let m = entry("c3_z5_andr_grana");
    let r = m.base();
    let n = r.size();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let a = m.word_action(x, &SignedWord::new(vec![Letter::pos(y), Letter::pos(z)])).map_err(err)?;
                let b = m.word_action(x, &SignedWord::new(vec![Letter::pos(z), Letter::pos(r.op(y, z))])).map_err(err)?;
                ensure!(a == b, "\"y z\" and \"z y^z\" differ at x={x} y={y} z={z}");
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let w = random_word(&mut rng, n);
        let at = rng.gen_range(0..=w.len());
        let y = rng.gen_range(0..n);
        let mut longer = w.clone();
        longer.splice(at..at, [Letter::pos(y), Letter::inv(y)]);
        let x = rng.gen_range(0..n);
        let a = m.word_action(x, &SignedWord::new(w.clone())).map_err(err)?;
        let b = m.word_action(x, &SignedWord::new(longer)).map_err(err)?;
        ensure!(a == b, "inserting {y} {y}^-1 into {} changed the action", SignedWord::new(w));
    }
    Ok("27 relation pairs, 200 insertions".into())
}

fn c8_semidirect_structure() -> Check {
    let mut checked = 0;
    for c in finite_catalog() {
        let m = &c.module;
        let e = ExtensionRack::semidirect(m, caps::EXTENSION_SIZE).map_err(|e| format!("{}: {e:?}", c.name))?;
        let r = e.rack();
        if m.flavor() == Flavor::Quandle && m.base().is_quandle() {
            ensure!(r.is_quandle(), "{}: semidirect product is not a quandle", c.name);
        }
        let n = m.base().size();
        for x in 0..n {
            for y in 0..n {
                for i1 in e.fiber(x) {
                    for i2 in e.fiber(x) {
                        let i = e.fiber_add(i1, i2).ok_or("fiber_add across fibers")?;
                        for j1 in e.fiber(y) {
                            for j2 in e.fiber(y) {
                                let j = e.fiber_add(j1, j2).ok_or("fiber_add across fibers")?;
                                let lhs = r.op(i, j);
                                let rhs = e.fiber_add(r.op(i1, j1), r.op(i2, j2)).ok_or("results in different fibers")?;
                                ensure!(lhs == rhs, "{}: addition is not a rack map at x={x} y={y}", c.name);
                            }
                        }
                    }
                }
                for i in e.fiber(x) {
                    for j in e.fiber(y) {
                        ensure!(
                            r.op(e.fiber_neg(i), e.fiber_neg(j)) == e.fiber_neg(r.op(i, j)),
                            "{}: negation is not a rack map",
                            c.name
                        );
                    }
                }
            }
        }
        let z = e.zero_section();
        ensure!(r.is_homomorphism(&(0..r.size()).map(|i| e.projection(i)).collect::<Vec<_>>(), m.base()).map_err(err)?,
            "{}: projection is not a rack map", c.name);
        for x in 0..n {
            for y in 0..n {
                ensure!(r.op(z[x], z[y]) == z[m.base().op(x, y)], "{}: zero section is not a rack map", c.name);
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} finite catalog modules"))
}

fn random_hom(rng: &mut ChaCha8Rng, src: &AbGroup, tgt: &AbGroup) -> Hom {
    let mut rows = Vec::new();
    for q in tgt.moduli() {
        let row: Vec<Int> = src
            .moduli()
            .iter()
            .map(|m| {
                let step = if q.is_zero() { Int::zero() } else { q / num_integer::Integer::gcd(q, m) };
                step * Int::from(rng.gen_range(0..12))
            })
            .collect();
        rows.push(row);
    }
    Hom::new(src.clone(), tgt.clone(), Matrix::from_rows(rows, src.rank()).unwrap()).unwrap()
}

fn random_finite_group(rng: &mut ChaCha8Rng) -> AbGroup {
    loop {
        let k = rng.gen_range(0..=3);
        let moduli: Vec<i64> = (0..k).map(|_| rng.gen_range(2..=8)).collect();
        if moduli.iter().product::<i64>() <= 64 {
            return AbGroup::from_i64(&moduli).unwrap();
        }
    }
}

fn c9_abelian_engine() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let rows: Vec<Vec<Int>> = (0..r).map(|_| (0..c).map(|_| Int::from(rng.gen_range(-20..=20))).collect()).collect();
        let m = Matrix::from_rows(rows, c).unwrap();
        let s = snf(&m).map_err(err)?;
        ensure!(s.u.mul(&m).unwrap().mul(&s.v).unwrap() == s.d, "u m v != d");
        for i in 0..r {
            for j in 0..c {
                ensure!(i == j || s.d[(i, j)].is_zero(), "d is not diagonal");
            }
        }
        let diag = s.diagonal();
        ensure!(diag.iter().all(|d| !d.is_negative()), "negative invariant factor");
        for w in diag.windows(2) {
            ensure!(
                (w[0].is_zero() && w[1].is_zero()) || (!w[0].is_zero() && (&w[1] % &w[0]).is_zero()),
                "divisibility chain broken: {:?}",
                diag
            );
        }
        ensure!(s.u.determinant().unwrap().abs().is_one() && s.v.determinant().unwrap().abs().is_one(), "not unimodular");
        ensure!(s.u.mul(&s.u_inv).unwrap() == Matrix::identity(r) && s.v.mul(&s.v_inv).unwrap() == Matrix::identity(c), "bad inverse");
    }
    let mut homs: Vec<Hom> = Vec::new();
    for _ in 0..200 {
        let (a, b) = (random_finite_group(&mut rng), random_finite_group(&mut rng));
        homs.push(random_hom(&mut rng, &a, &b));
    }
    for c in finite_catalog() {
        let d = rackext::extension::coboundary_map(&c.module).map_err(err)?;
        if d.source().order().is_some_and(|o| o <= Int::from(64)) {
            homs.push(d);
        }
    }
    for h in &homs {
        let k = h.kernel().map_err(err)?.order().map_err(err)?.ok_or("infinite kernel")?;
        let i = h.image().order().map_err(err)?.ok_or("infinite image")?;
        ensure!(k * i == h.source().order().unwrap(), "|ker| |im| != |source| for {:?}", h);
    }
    Ok(format!("50 SNFs, {} homomorphisms", homs.len()))
}

fn c10_module_validation_fidelity() -> Check {
    let m = entry("c3_z5_andr_grana");
    m.validate().map_err(err)?;
    let n = m.base().size();
    let mut failures = 0;
    for py in 0..n {
        for px in 0..n {
            let perturbed = RackModule::from_matrices(
                m.base().clone(),
                m.flavor(),
                m.groups().to_vec(),
                |x, y| m.phi(x, y).matrix().clone(),
                |y, x| {
                    let mut a = m.psi(y, x).matrix().clone();
                    if (y, x) == (py, px) {
                        a = a.add(&Matrix::from_i64_rows(&[&[1]])).unwrap();
                    }
                    a
                },
            );
            use rackext::rack_module::ModuleError::*;
            match perturbed {
                Err(Square1 { .. } | Square2 { .. } | Eq1 { .. }) => failures += 1,
                Err(e) => return Err(format!("psi({py},{px}) + 1 failed without a witness triple: {e:?}")),
                Ok(_) => return Err(format!("psi({py},{px}) + 1 still validates")),
            }
        }
    }
    Ok(format!("{failures} single-entry perturbations rejected with witness triples"))
}

type Criterion = (&'static str, u64, fn() -> Check);

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("axiom biconditional", 5, c1_axiom_biconditional),
        ("quandle biconditional", 5, c2_quandle_biconditional),
        ("exact small answers", 1, c3_exact_small_answers),
        ("oracle agreement", 60, c4_oracle_agreement),
        ("round trip and section independence", 10, c5_round_trip_and_section_independence),
        ("split detection", 5, c6_split_detection),
        ("word-action well-definedness", 5, c7_word_action),
        ("semidirect and Beck structure", 10, c8_semidirect_structure),
        ("abelian engine", 10, c9_abelian_engine),
        ("module validation fidelity", 10, c10_module_validation_fidelity),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let result = match result {
            Ok(detail) if took >= Duration::from_secs(*limit) => Err(format!("{detail}; over the time limit")),
            other => other,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        println!("{tag} {:>2} {name} ({:.2} s, limit {limit} s): {detail}", i + 1, took.as_secs_f64());
        if result.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn cocycle_violation_agrees_with_is_cocycle() {
    let m = entry("c3_z2");
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let s = random_factor_set(&mut rng, &m);
        assert_eq!(cocycle_violation(&m, &s).unwrap().is_none(), is_cocycle(&m, &s).unwrap());
    }
}
