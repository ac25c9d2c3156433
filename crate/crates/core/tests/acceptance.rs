//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always show in
//! `cargo test` output. Set `DOODLE_EXTENDED=1` for the 9- and 10-crossing
//! planar census checks.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use doodle_core::codec::{parse_pd, PdDocument};
use doodle_core::confluence::{check_ldc, check_urp, doodle_subgraph, random_graph, roots, two_root_peak};
use doodle_core::enumeration::{
    census, census_resume, store_append, Budget, CensusError, CensusFilter, CensusOptions, CensusRecord,
};
use doodle_core::families::{borromean, fixture, fixture_map, gyro, hopf, ortho, trivial, FIXTURE_NAMES};
use doodle_core::map::Component;
use doodle_core::moves::{apply_minus_one, is_fundamental, minus_one_sites, plus_one, plus_one_sites, random_expansion, reduce, Strategy};
use doodle_core::virtualization::{planarize, virtual_area_number};
use doodle_core::{canonical_code, doodle_equal, genus_of_doodle, CanonicalCode, DoodleMap, Mode};

/// Wall-clock ceilings, measured on the optimized test profile.
const PLANAR_CENSUS_LIMIT: Duration = Duration::from_secs(30 * 60);
const SMALL_CENSUS_LIMIT: Duration = Duration::from_secs(5 * 60);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn code(m: &DoodleMap) -> CanonicalCode {
    canonical_code(m, Mode::UNORIENTED)
}

fn face_summary(r: &CensusRecord) -> String {
    let parts: Vec<String> = r.faces.iter().enumerate().filter(|(_, &c)| c > 0).map(|(d, c)| format!("F{d}={c}")).collect();
    parts.join(" ")
}

fn planar_census() -> Outcome {
    let opts = CensusOptions::default();
    let started = Instant::now();
    let six = census(CensusFilter::new(6).genus(0), opts).unwrap();
    let seven = census(CensusFilter::new(7).genus(0), opts).unwrap();
    let eight = census(CensusFilter::new(8).genus(0), opts).unwrap();
    let elapsed = started.elapsed();
    let b3 = code(&borromean(3).unwrap()).to_hex();
    let poppy = code(&borromean(4).unwrap()).to_hex();
    let six_ok = six.len() == 1 && six[0].face_count(3) == 8 && six[0].faces.iter().sum::<usize>() == 8 && six[0].code == b3;
    let eight_ok = eight.len() == 1
        && eight[0].face_count(3) == 8
        && eight[0].face_count(4) == 2
        && eight[0].faces.iter().sum::<usize>() == 10
        && eight[0].code == poppy;

    // Interrupt the 8-crossing run repeatedly and resume from serialized checkpoints.
    let tight = CensusOptions { budget: Budget { wall: None, nodes: Some(50_000) }, workers: Some(2), split_depth: 6 };
    let mut resumed = census(CensusFilter::new(8).genus(0), tight);
    let mut interruptions = 0;
    while let Err(CensusError::Budget { checkpoint, .. }) = resumed {
        interruptions += 1;
        let cp = doodle_core::enumeration::CensusCheckpoint::from_json(&checkpoint.to_json()).unwrap();
        let more = CensusOptions { budget: Budget { wall: None, nodes: Some(cp.nodes + 200_000) }, ..tight };
        resumed = census_resume(cp, more);
    }
    let resume_ok = interruptions > 0 && resumed.as_ref().map(|r| *r == eight).unwrap_or(false);
    outcome(
        six_ok && seven.is_empty() && eight_ok && resume_ok && elapsed < PLANAR_CENSUS_LIMIT,
        format!(
            "n=6: {} class [{}], n=7: {} classes, n=8: {} class [{}]; {:.2?}; resumed after {interruptions} interruptions: {}",
            six.len(),
            six.first().map(face_summary).unwrap_or_default(),
            seven.len(),
            eight.len(),
            eight.first().map(face_summary).unwrap_or_default(),
            elapsed,
            resume_ok
        ),
    )
}

fn small_census() -> Outcome {
    let started = Instant::now();
    let mut all = Vec::new();
    for n in 1..=5 {
        all.push(census(CensusFilter::new(n), CensusOptions::default()).unwrap());
    }
    let elapsed = started.elapsed();
    let one = &all[0];
    let hopf_ok = one.len() == 1 && one[0].genus == 1 && one[0].code == code(&hopf()).to_hex();
    let mut bad = 0;
    let mut total = 0;
    for r in all.iter().flatten() {
        total += 1;
        let m = r.map().unwrap();
        if !(m.check_identities().all_hold() && m.edge_count() == 2 * m.crossing_count()) {
            bad += 1;
        }
    }
    let counts: Vec<usize> = all.iter().map(Vec::len).collect();
    outcome(
        hopf_ok && bad == 0 && elapsed < SMALL_CENSUS_LIMIT,
        format!("census(1) = Hopf: {hopf_ok}; counts n=1..5 {counts:?}; {bad} of {total} records fail I1-I3 or E=2V; {elapsed:.2?}"),
    )
}

fn confluence() -> Outcome {
    let seeds: Vec<(&str, DoodleMap)> = vec![
        ("trivial", trivial(1)),
        ("hopf", hopf()),
        ("B3", borromean(3).unwrap()),
        ("B4", borromean(4).unwrap()),
        ("gyro3", gyro(3).unwrap()),
        ("ortho3", ortho(3).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = 0;
    let sequences = 1002;
    for k in 0..sequences {
        let (_, seed) = &seeds[k % seeds.len()];
        let target = code(seed);
        let steps = rng.gen_range(1..=8);
        let expanded = random_expansion(seed, steps, &mut rng);
        for strategy in [Strategy::First, Strategy::GreedyBigonFirst, Strategy::Random(rng.gen())] {
            if code(&reduce(&expanded, strategy)) != target {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("{sequences} expansion sequences x 3 strategies, {failures} failures"))
}

fn families() -> Outcome {
    let mut problems = Vec::new();
    for n in 3..=12 {
        let b = borromean(n).unwrap();
        let expected = if n % 3 == 0 { 3 } else { 1 };
        if b.component_count() != expected || !b.is_minimal() {
            problems.push(format!("B{n}"));
        }
    }
    for n in 3..=10 {
        let g = gyro(n).unwrap();
        if g.component_count() != if n % 3 == 0 { 4 } else { 2 } || !g.is_minimal() {
            problems.push(format!("gyro{n}"));
        }
        let o = ortho(n).unwrap();
        if o.component_count() != n + 1 || !o.is_minimal() {
            problems.push(format!("ortho{n}"));
        }
    }
    for n in 3..=8 {
        if !is_fundamental(&borromean(n).unwrap()) {
            problems.push(format!("B{n} not fundamental"));
        }
    }
    outcome(problems.is_empty(), format!("B3..B12, gyro/ortho 3..10, fundamental B3..B8; problems: {problems:?}"))
}

fn component_removal() -> Outcome {
    let g3 = gyro(3).unwrap();
    let b3 = borromean(3).unwrap();
    let gyro_ok: Vec<bool> =
        (0..g3.component_count()).map(|i| doodle_equal(&g3.remove_component(i).unwrap(), &b3, Mode::UNORIENTED)).collect();
    let o3 = ortho(3).unwrap();
    let central = o3.component_index_by_label(0).unwrap();
    let central_len = match &o3.components()[central] {
        Component::Strand { exits, .. } => exits.len(),
        Component::Circle { .. } => 0,
    };
    let rest = reduce(&o3.remove_component(central).unwrap(), Strategy::First);
    let ortho_ok = central_len == 6 && rest.crossing_count() == 0 && rest.circle_count() == 3;
    outcome(
        gyro_ok.len() == 4 && gyro_ok.iter().all(|&b| b) && ortho_ok,
        format!(
            "gyro3 minus each component = B3: {gyro_ok:?}; ortho3 minus central strand -> {} crossings, {} circles",
            rest.crossing_count(),
            rest.circle_count()
        ),
    )
}

fn plus_minus_one(extended: bool) -> Outcome {
    let poppy = borromean(4).unwrap();
    let poppy_code = code(&poppy);
    let square_faces: Vec<Vec<usize>> = poppy.faces().into_iter().filter(|f| f.degree() == 4).map(|f| f.darts).collect();
    let sites: Vec<_> =
        plus_one_sites(&poppy).into_iter().filter(|s| square_faces.iter().any(|f| f.contains(&s.a1) && f.contains(&s.a2))).collect();
    let mut children = BTreeSet::new();
    let mut all_good = !sites.is_empty();
    for s in &sites {
        let child = plus_one(&poppy, *s).unwrap();
        let planar_minimal = child.crossing_count() == 9 && child.genus().total == 0 && child.is_minimal();
        let back = minus_one_sites(&child).into_iter().any(|m| code(&apply_minus_one(&child, m).unwrap()) == poppy_code);
        all_good &= planar_minimal && back;
        children.insert(code(&child));
    }
    let mut detail = format!(
        "{} +1 sites on the square faces, all give minimal planar 9-crossing diagrams recovered by -1: {all_good}; {} distinct children",
        sites.len(),
        children.len()
    );
    let mut pass = all_good;
    if extended {
        let nine = census(CensusFilter::new(9).genus(0), CensusOptions::default()).unwrap();
        let ten = census(CensusFilter::new(10).genus(0).components(2), CensusOptions::default()).unwrap();
        let mirrors = ten.len() == 2 && code(&ten[0].map().unwrap().mirror()).to_hex() == ten[1].code;
        let nine_matches = nine.len() == 1 && children.iter().all(|c| c.to_hex() == nine[0].code);
        detail.push_str(&format!(
            "; extended: census(9, g=0) = {} (children match: {nine_matches}), census(10, g=0, 2 components) = {} (mirror pair: {mirrors})",
            nine.len(),
            ten.len()
        ));
        pass &= nine.len() == 1 && nine_matches && ten.len() == 1;
    } else {
        detail.push_str("; extended census checks skipped (DOODLE_EXTENDED=1)");
    }
    outcome(pass, detail)
}

fn virtualization() -> Outcome {
    let mut fixture_failures = Vec::new();
    let mut va_failures = Vec::new();
    for name in FIXTURE_NAMES {
        let m = fixture_map(name).unwrap();
        let doc = planarize(&m).document;
        if code(&parse_pd(&doc, Mode::UNORIENTED).unwrap()) != code(&m) {
            fixture_failures.push(*name);
        }
        if m.is_minimal() && virtual_area_number(&doc).unwrap() != m.genus().total {
            va_failures.push(*name);
        }
    }
    let mut pool: Vec<CensusRecord> = (1..=5).flat_map(|n| census(CensusFilter::new(n), CensusOptions::default()).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    pool.shuffle(&mut rng);
    let mut census_failures = 0;
    for r in pool.iter().take(500) {
        let m = r.map().unwrap();
        if code(&parse_pd(&planarize(&m).document, Mode::UNORIENTED).unwrap()) != code(&m) {
            census_failures += 1;
        }
    }
    let fig20: PdDocument = fixture("fig20").unwrap();
    let fig20_va = virtual_area_number(&fig20).unwrap();
    let fig20_ok = fig20_va == 1 && fig20.virtual_count() == 2;
    outcome(
        fixture_failures.is_empty() && va_failures.is_empty() && census_failures == 0 && fig20_ok,
        format!(
            "round trip failures: fixtures {fixture_failures:?}, census {census_failures}/500; va != genus on {va_failures:?}; fig20 va {fig20_va} with {} virtual crossings",
            fig20.virtual_count()
        ),
    )
}

fn fixture_cross_checks() -> Outcome {
    let three = census(CensusFilter::new(3), CensusOptions::default()).unwrap();
    let d31 = code(&fixture_map("d3.1").unwrap()).to_hex();
    let has_d31 = three.iter().any(|r| r.code == d31);
    let d4: Vec<DoodleMap> = (1..=19).map(|i| fixture_map(&format!("d4.{i}")).unwrap()).collect();
    let mut equal_pairs = Vec::new();
    for i in 0..d4.len() {
        for j in i + 1..d4.len() {
            if doodle_equal(&d4[i], &d4[j], Mode::UNORIENTED) {
                equal_pairs.push((i + 1, j + 1));
            }
        }
    }
    let four = census(CensusFilter::new(4), CensusOptions::default()).unwrap();
    let single = four.iter().filter(|r| r.components == 1).count();
    let flag = if four.len() == 19 || single == 19 { "" } else { " [FLAG: differs from 19]" };
    let kishino = fixture_map("kishino").unwrap();
    let k_reduced = reduce(&kishino, Strategy::First);
    let k_genus = genus_of_doodle(&kishino);
    let kishino_ok = k_reduced.crossing_count() >= 1 && k_genus <= 2;
    outcome(
        has_d31 && equal_pairs.is_empty() && kishino_ok,
        format!(
            "d3.1 in census(3): {has_d31}; equal d4 pairs {equal_pairs:?}; census(4) = {} connected, {single} one-component vs 19{flag}; kishino reduces to {} crossings, genus {k_genus}",
            four.len(),
            k_reduced.crossing_count()
        ),
    )
}

fn confluence_lab() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut violations = 0;
    let mut ldc_count = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..12);
        let g = random_graph(n, 4, 0.35, &mut rng);
        let ldc = check_ldc(&g, 10_000_000).unwrap();
        ldc_count += usize::from(ldc);
        if ldc && !check_urp(&g) {
            violations += 1;
        }
    }
    let control_roots = roots(&two_root_peak()).len();
    let bases = [trivial(1), trivial(2), hopf(), borromean(3).unwrap(), borromean(4).unwrap(), fixture_map("d3.1").unwrap()];
    let mut root_counts = Vec::new();
    for k in 0..20 {
        let base = &bases[k % bases.len()];
        let steps = rng.gen_range(1..=4);
        let m = random_expansion(base, steps, &mut rng);
        let g = doodle_subgraph(&m, 200_000).unwrap();
        root_counts.push(roots(&g).len());
    }
    outcome(
        violations == 0 && control_roots >= 2 && root_counts.iter().all(|&r| r == 1),
        format!("200 graphs: {ldc_count} with LDC, {violations} LDC without URP; control has {control_roots} roots; doodle subgraph roots {root_counts:?}"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (run, workers) in [1usize, 2, 4, 2].into_iter().enumerate() {
        let path = dir.path().join(format!("run{run}.jsonl"));
        let opts = CensusOptions { workers: Some(workers), ..CensusOptions::default() };
        for filter in [CensusFilter::new(5), CensusFilter::new(8).genus(0)] {
            store_append(&census(filter, opts).unwrap(), &path).unwrap();
        }
        files.push(std::fs::read(&path).unwrap());
    }
    let identical = files.windows(2).all(|w| w[0] == w[1]);
    outcome(identical && !files[0].is_empty(), format!("4 runs with 1, 2, 4, 2 workers; {} bytes each; identical: {identical}", files[0].len()))
}

fn main() {
    let extended = std::env::var("DOODLE_EXTENDED").is_ok_and(|v| v == "1");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 planar census", Box::new(planar_census)),
        ("2 small full census", Box::new(small_census)),
        ("3 confluence of random expansions", Box::new(confluence)),
        ("4 family component counts", Box::new(families)),
        ("5 component removal", Box::new(component_removal)),
        ("6 plus/minus one construction", Box::new(move || plus_minus_one(extended))),
        ("7 virtualization round trips", Box::new(virtualization)),
        ("8 fixture cross-checks", Box::new(fixture_cross_checks)),
        ("9 confluence lab", Box::new(confluence_lab)),
        ("10 census determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let o = check();
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
