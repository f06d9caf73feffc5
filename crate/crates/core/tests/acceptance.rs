//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use monodromy::braid::{halftwist_word, BraidWord};
use monodromy::canonical::sphere_key;
use monodromy::certify::{auroux_divergence, certify_infinite, transform_5cycle, Strategy as Cert};
use monodromy::coset::{
    abelianization, braid_presentation, cross_check_index, reidemeister_schreier, todd_coxeter,
};
use monodromy::hurwitz::{builtin, fiber_sum, Factorization};
use monodromy::orbit::{enumerate, pure_orbit_size, stabilizes, OrbitOptions};
use monodromy::sl2::{
    intersection, intersection_growth, recognize_twist, IntMatrix2, TorusCurve, TwistPower,
    TwistRecognition,
};
use monodromy::symplectic::{passing_conventions, verify_relation_with, Convention, Relation};

const K: usize = 50;
const RUNTIME_LIMIT: Duration = Duration::from_secs(1);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed<T>(label: &str, f: impl FnOnce() -> T) -> Result<T, String> {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    ensure(elapsed < RUNTIME_LIMIT, || {
        format!("{label} took {elapsed:?}")
    })?;
    Ok(out)
}

fn curve(p: i64, q: i64) -> TorusCurve {
    TorusCurve::new(p, q).unwrap()
}

fn words(text: &str, n: usize) -> Vec<BraidWord> {
    text.split(',')
        .map(|w| BraidWord::parse(n, w.trim()).unwrap())
        .collect()
}

fn orbit_sizes() -> Outcome {
    let mut sizes = Vec::new();
    for (n, expected) in [(2, 3), (3, 8), (4, 27)] {
        let f = builtin(&format!("q:{n}")).unwrap();
        let g = timed(&format!("q:{n}"), || {
            enumerate(&f, OrbitOptions::default()).unwrap()
        })?;
        ensure(g.size() == expected, || {
            format!("q:{n} has {} vertices", g.size())
        })?;
        ensure(g.is_complete(), || format!("q:{n} incomplete"))?;
        ensure(g.satisfies_degree_criterion(), || {
            format!("q:{n} degree criterion")
        })?;
        ensure(g.is_symmetric(), || format!("q:{n} edge symmetry"))?;
        for v in 0..g.size() {
            for i in 1..n {
                for d in [monodromy::Direction::Forward, monodromy::Direction::Inverse] {
                    ensure(g.edge(v, i, d).is_some(), || {
                        format!("q:{n} vertex {v} lacks s{i}")
                    })?;
                }
            }
        }
        sizes.push(g.size().to_string());
    }
    Ok(format!("sizes {}", sizes.join("/")))
}

fn coset_indices() -> Outcome {
    let cases = [
        (2, "s1^3", 3),
        (3, "s1^3, s2 s1 s2^-1", 8),
        (4, "s1^3, s2 s1 s2^-1, s3 s2 s3^-1", 27),
    ];
    let mut counts = Vec::new();
    for (n, sub, expected) in cases {
        let h: Vec<Vec<i32>> = words(sub, n).iter().map(|w| w.letters().to_vec()).collect();
        let p = braid_presentation(n);
        let t = timed(&format!("B{n}"), || todd_coxeter(&p, &h, 100_000).unwrap())?;
        ensure(t.is_complete() && t.len() == expected, || {
            format!("B{n}: {} cosets", t.len())
        })?;
        ensure(t.is_consistent(&p, &h), || format!("B{n} table not closed"))?;
        counts.push(t.len().to_string());
    }
    for (n, pairs) in [(3, vec![(1, 3)]), (4, vec![(1, 3), (2, 4)])] {
        let f = builtin(&format!("q:{n}")).unwrap();
        let mut sub = vec![BraidWord::generator_power(n, 1, 3).unwrap()];
        sub.extend(pairs.iter().map(|&(i, j)| halftwist_word(i, j, n).unwrap()));
        let r = timed(&format!("q:{n}"), || {
            cross_check_index(&f, &sub, OrbitOptions::default(), 100_000).unwrap()
        })?;
        ensure(r.verdict, || format!("q:{n} verdict false: {r:?}"))?;
    }
    Ok(format!(
        "indices {}; cross-check verdicts true",
        counts.join("/")
    ))
}

fn pure_orbits() -> Outcome {
    let mut out = Vec::new();
    for name in ["q:2", "q:3", "q:4"] {
        let f = builtin(name).unwrap();
        let full = enumerate(&f, OrbitOptions::default()).unwrap().size();
        let pure = pure_orbit_size(&f, 1_000_000).unwrap();
        ensure(pure.complete && pure.size == full, || {
            format!("{name}: pure {} vs {full}", pure.size)
        })?;
        out.push(format!("{name}={}", pure.size));
    }
    Ok(out.join(" "))
}

fn stabilization() -> Outcome {
    let mut checked = 0;
    for n in 2..=6 {
        let f = builtin(&format!("q:{n}")).unwrap();
        for i in 1..n {
            for j in i + 1..=n {
                let h = halftwist_word(i, j, n).unwrap();
                let w = if (j - i) % 2 == 0 { h } else { h.pow(3) };
                ensure(stabilizes(&f, &w).unwrap(), || {
                    format!("n={n} ({i},{j}) does not stabilize")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} half-twist words checked for n <= 6"))
}

fn five_entry_transform() -> Outcome {
    let out = transform_5cycle(builtin("q:5").unwrap().entries()).map_err(|e| e.to_string())?;
    let expected = [
        curve(0, 1),
        curve(0, 1),
        curve(1, -1),
        curve(1, 1),
        curve(0, 1),
    ];
    let got: Vec<&TorusCurve> = out.iter().map(TwistPower::curve).collect();
    ensure(got.iter().zip(&expected).all(|(a, b)| *a == b), || {
        format!("got {got:?}")
    })?;
    let i = intersection(out[2].curve(), out[3].curve());
    ensure(i == BigInt::from(2), || format!("i(T_a b, T_b a) = {i}"))?;
    Ok("((0,1),(0,1),(1,-1),(1,1),(0,1)), middle intersection 2".into())
}

fn certificate(f: &Factorization, label: &str) -> Result<Cert, String> {
    let cert = certify_infinite(f, K)
        .map_err(|e| format!("{label}: {e}"))?
        .ok_or_else(|| format!("{label}: no certificate"))?;
    let report = cert.replay().map_err(|e| format!("{label}: {e}"))?;
    ensure(report.distinct_keys == K + 1, || {
        format!("{label}: {} keys", report.distinct_keys)
    })?;
    let back =
        monodromy::InfinityCertificate::from_json(&cert.to_json()).map_err(|e| e.to_string())?;
    ensure(back == cert, || format!("{label}: JSON round trip"))?;
    Ok(cert.strategy)
}

fn infinite_index() -> Outcome {
    for n in 5..=12 {
        certificate(&builtin(&format!("q:{n}")).unwrap(), &format!("q:{n}"))?;
    }
    for d in 1..=3 {
        certificate(&builtin(&format!("E:{d}")).unwrap(), &format!("E:{d}"))?;
    }
    let e1 = builtin("E:1").unwrap();
    let cert = auroux_divergence(&e1, &e1, K)
        .map_err(|e| e.to_string())?
        .ok_or("fiber sum: no intersecting pair")?;
    ensure(cert.factorization == fiber_sum(&e1, &e1).unwrap(), || {
        "fiber sum input".into()
    })?;
    let growth = cert
        .replay()
        .map_err(|e| e.to_string())?
        .growth
        .unwrap_or_default();
    let expected: Vec<BigInt> = (0..=K).map(BigInt::from).collect();
    ensure(growth == expected, || format!("growth {growth:?}"))?;
    for g in 2..=4 {
        let s = certificate(
            &builtin(&format!("eta1:{g}")).unwrap(),
            &format!("eta1:{g}"),
        )?;
        ensure(s == Cert::S3, || format!("eta1:{g} used {s}"))?;
        for r in ["eta2", "eta3"] {
            certificate(&builtin(&format!("{r}:{g}")).unwrap(), &format!("{r}:{g}"))?;
        }
    }
    for n in 2..=4 {
        let found =
            certify_infinite(&builtin(&format!("q:{n}")).unwrap(), K).map_err(|e| e.to_string())?;
        ensure(found.is_none(), || {
            format!("q:{n} certified although its orbit is finite")
        })?;
    }
    Ok(
        "q:5..12, E:1..3, E:1#E:1, eta1/2/3 sub-spiders at g=2..4 certified; q:2..4 not found"
            .into(),
    )
}

fn relations() -> Outcome {
    let ab = &TwistPower::positive(TorusCurve::alpha()).matrix()
        * &TwistPower::positive(TorusCurve::beta()).matrix();
    ensure(ab.pow(3) == IntMatrix2::neg_identity(), || {
        "(TaTb)^3 != -I".into()
    })?;
    ensure(ab.pow(6).is_identity(), || "(TaTb)^6 != I".into())?;
    let genera = [2, 3, 4];
    let passing = timed("relations", || passing_conventions(&genera).unwrap())?;
    let standard = genera.iter().all(|&g| {
        Relation::ALL
            .iter()
            .all(|&r| verify_relation_with(r, g, Convention::Standard).unwrap())
    });
    ensure(standard, || {
        "relations fail under the twist convention".into()
    })?;
    ensure(passing.len() == 1, || {
        format!(
            "relations hold at g=2..4 under {} conventions {passing:?}, not exactly one",
            passing.len()
        )
    })?;
    Ok(format!("relations hold only under {:?}", passing[0]))
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn small_curve() -> impl proptest::strategy::Strategy<Value = TorusCurve> {
    (-40i64..=40, -40i64..=40).prop_filter_map("primitive", |(p, q)| TorusCurve::new(p, q).ok())
}

fn twist() -> impl proptest::strategy::Strategy<Value = TwistPower> {
    (small_curve(), prop_oneof![-3i64..=-1, 1i64..=3])
        .prop_map(|(c, k)| TwistPower::new(c, k).unwrap())
}

fn factorization() -> impl proptest::strategy::Strategy<Value = Factorization> {
    (proptest::collection::vec(twist(), 2..=8), any::<bool>()).prop_map(|(entries, disk)| {
        if disk {
            Factorization::disk(entries)
        } else {
            Factorization::sub_spider(entries)
        }
    })
}

fn factorization_and_word() -> impl proptest::strategy::Strategy<Value = (Factorization, BraidWord)>
{
    factorization().prop_flat_map(|f| {
        let n = f.len() as i32;
        let letter = prop_oneof![1..n, -(n - 1)..=-1];
        proptest::collection::vec(letter, 0..=24)
            .prop_map(move |l| (f.clone(), BraidWord::new(n as usize, l).unwrap()))
    })
}

fn unimodular(bound: i64) -> impl proptest::strategy::Strategy<Value = IntMatrix2> {
    (-bound..=bound, -bound..=bound, -3i64..=3).prop_filter_map("coprime", move |(a, c, t)| {
        let e = num_integer::Integer::extended_gcd(&BigInt::from(a), &BigInt::from(c));
        let unit = e.gcd.magnitude() == &num_bigint::BigUint::from(1u8);
        if !unit {
            return None;
        }
        // a·x + c·y = ±1, so (b, d) = ±(−y, x) is bounded by (|a|, |c|)
        let (b0, d0) = (-&e.y * &e.gcd, &e.x * &e.gcd);
        let (b1, d1) = (&b0 + t * a, &d0 + t * c);
        let limit = BigInt::from(bound);
        let fits = |v: &BigInt| v.magnitude() <= limit.magnitude();
        let (b, d) = if fits(&b1) && fits(&d1) {
            (b1, d1)
        } else {
            (b0, d0)
        };
        IntMatrix2::new(a, b, c, d).ok()
    })
}

fn check(
    r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>,
) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn property_suites() -> Outcome {
    check(runner(10_000).run(&factorization_and_word(), |(f, w)| {
        let g = f.apply_braid(&w).unwrap();
        let product = g
            .entries()
            .iter()
            .fold(IntMatrix2::identity(), |acc, t| &acc * &t.matrix());
        prop_assert_eq!(&product, f.total_product());
        Ok(())
    }))?;
    check(runner(10_000).run(
        &(
            factorization(),
            any::<proptest::sample::Index>(),
            any::<proptest::sample::Index>(),
        ),
        |(f, a, b)| {
            let n = f.len();
            let i = a.index(n - 1) + 1;
            let j = b.index(n - 1) + 1;
            let apply = |l: Vec<i32>| f.apply_braid(&BraidWord::new(n, l).unwrap()).unwrap();
            prop_assert_eq!(apply(vec![i as i32, -(i as i32)]), f.clone());
            if i + 1 < n {
                let (x, y) = (i as i32, i as i32 + 1);
                prop_assert_eq!(apply(vec![x, y, x]), apply(vec![y, x, y]));
            }
            if i.abs_diff(j) >= 2 {
                let (x, y) = (i as i32, j as i32);
                prop_assert_eq!(apply(vec![x, y]), apply(vec![y, x]));
            }
            Ok(())
        },
    ))?;
    let elliptic =
        proptest::collection::vec(prop_oneof![1i32..12, -11i32..=-1], 0..=24).prop_map(|l| {
            builtin("E:1")
                .unwrap()
                .apply_braid(&BraidWord::new(12, l).unwrap())
                .unwrap()
        });
    let partial = factorization().prop_map(|f| Factorization::sub_spider(f.entries().to_vec()));
    let sphere = prop_oneof![elliptic, partial];
    check(
        runner(1_000).run(&(sphere, unimodular(1_000_000)), |(f, a)| {
            prop_assert_eq!(
                sphere_key(&f.conjugate(&a)).unwrap(),
                sphere_key(&f).unwrap()
            );
            Ok(())
        }),
    )?;
    let big_curve = (-1_000_000i64..=1_000_000, -1_000_000i64..=1_000_000)
        .prop_filter_map("primitive", |(p, q)| TorusCurve::new(p, q).ok());
    let exponent = prop_oneof![-50i64..=-1, 1i64..=50];
    check(runner(1_000).run(&(big_curve, exponent.clone()), |(c, k)| {
        let t = TwistPower::new(c, k).unwrap();
        prop_assert_eq!(recognize_twist(&t.matrix()), TwistRecognition::Twist(t));
        Ok(())
    }))?;
    check(
        runner(1_000).run(&(small_curve(), small_curve(), exponent), |(c, d, k)| {
            let mut image = d.clone();
            for _ in 0..k.unsigned_abs() {
                image = image.twisted_by(&c, k.signum());
            }
            let i = intersection(&c, &d);
            let closed = BigInt::from(k.unsigned_abs()) * &i * &i;
            prop_assert_eq!(intersection(&d, &image), closed.clone());
            prop_assert_eq!(intersection_growth(&c, &d, k), closed);
            Ok(())
        }),
    )?;
    Ok("10^4 product/relation cases, 10^3 conjugations, round trips and growth checks".into())
}

fn abelianized() -> Outcome {
    // presentation of the liftable subgroup itself, via Reidemeister–Schreier
    // on the coset table of ⟨σ1³, σ13⟩ in B3
    let b3 = braid_presentation(3);
    let sub = ["s1^3", "s2 s1 s2^-1"].map(|w| BraidWord::parse(3, w).unwrap().letters().to_vec());
    let table = todd_coxeter(&b3, &sub, 1000).map_err(|e| e.to_string())?;
    ensure(table.is_complete() && table.len() == 8, || {
        format!("index {}", table.len())
    })?;
    let h = reidemeister_schreier(&b3, &table).map_err(|e| e.to_string())?;
    let ab = abelianization(&h);
    ensure(ab.free_rank == 2 && ab.torsion.is_empty(), || {
        format!("{ab:?}")
    })?;
    Ok(format!(
        "{} Schreier generators, {} relators; free rank 2, no torsion",
        h.generators(),
        h.relators().len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("orbit sizes of q:2, q:3, q:4", orbit_sizes),
        ("coset enumeration indices", coset_indices),
        ("pure braid orbits", pure_orbits),
        ("half-twist stabilization", stabilization),
        ("five-entry transform", five_entry_transform),
        ("infinite-index certificates", infinite_index),
        ("relation identities", relations),
        ("property suites", property_suites),
        ("abelianization", abelianized),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", k + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({reason})", k + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
