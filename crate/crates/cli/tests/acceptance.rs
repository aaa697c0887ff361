//! One line per acceptance criterion. Runs without the libtest harness so the
//! lines always reach the test log.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use fano2_core::catalog::{Catalog, Status, TableId, TableRow};
use fano2_core::lattice::{make_host_model, DivisorClass, HostKind, HostModel};
use fano2_core::link::{enumerate_completions, flopped_triple, row_host_model, CompletionKind, SearchBounds};
use fano2_core::rational::{int, ratio, show, Rational};
use fano2_core::smallness::{contracted_class, contraction_coefficients, k3_gram, restriction_square};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;

/// Row id, then printed kx3, kyp3, alpha, beta, e.
type Anchor = (&'static str, &'static str, Option<&'static str>, &'static str, &'static str, &'static str);

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn fano2(args: &[&str]) -> Result<(i32, String, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_fano2"))
        .env_remove("FANO2_DATA_DIR")
        .args(args)
        .output()
        .map_err(|e| format!("spawn fano2: {e}"))?;
    Ok((
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    ))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn table_reproduction() -> Check {
    let start = Instant::now();
    let (code, out, err) = fano2(&["verify", "--all", "--format", "json"])?;
    let elapsed = start.elapsed();
    ensure(code == 0, || format!("exit {code}: {err}"))?;
    let report: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let rows = report["rows"].as_array().ok_or("no rows")?;
    ensure(rows.len() == 107, || format!("{} rows verified", rows.len()))?;
    ensure(report["counts"]["fail"] == 0, || format!("counts {}", report["counts"]))?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;

    let anchors: [Anchor; 7] = [
        ("e1e1:10", "2", Some("10"), "4", "-1", "56"),
        ("e1e1:63", "4", Some("14"), "5/2", "-1/2", "25"),
        ("e1e1:111", "22", Some("64"), "2", "-1", "1"),
        ("e1e2:2", "6", Some("14"), "3/2", "-1/2", "16"),
        ("e2e2:3", "2", None, "4", "-1", "90"),
        ("e1e5:4", "10", Some("21/2"), "1/2", "-1/2", "6"),
        ("e5e5:1", "2", None, "1", "-1", "15"),
    ];
    for (id, kx3, kyp3, alpha, beta, e) in anchors {
        let row = rows.iter().find(|r| r["id"] == id).ok_or_else(|| format!("{id} missing"))?;
        let computed = |col: &str| {
            row["columns"]
                .as_array()
                .and_then(|cs| cs.iter().find(|c| c["column"] == col))
                .and_then(|c| c["computed"].as_str().map(str::to_string))
        };
        let mut want = vec![("kx3", kx3), ("alpha", alpha), ("beta", beta), ("e", e)];
        if let Some(k) = kyp3 {
            want.push(("kyp3", k));
        }
        for (col, v) in want {
            ensure(computed(col).as_deref() == Some(v), || format!("{id} {col}: {:?} != {v}", computed(col)))?;
        }
    }
    Ok(format!("107 rows, 0 failures, 7 anchors, {:.2}s", elapsed.as_secs_f64()))
}

fn certified_cases() -> Check {
    // (case, c1, c2, a, b, square, curve reason)
    let cases: [(u32, i64, i64, i64, i64, i64, &str); 8] = [
        (2, 6, 4, 2, -3, -10, "nonminus2square"),
        (10, 6, 4, 2, -3, -8, "no_minus2_class"),
        (39, 6, 10, 5, -3, -10, "nonminus2square"),
        (47, 6, 16, 8, -3, -12, "nonminus2square"),
        (67, 8, 12, 3, -2, -8, "no_minus2_class"),
        (72, 8, 20, 5, -2, -10, "nonminus2square"),
        (78, 12, 6, 1, -2, -8, "primitivity"),
        (102, 10, 20, 2, -1, -4, "nonminus2square"),
    ];
    for (no, c1, c2, a, b, square, reason) in cases {
        let id = format!("e1e1:{no}");
        let (code, out, err) = fano2(&["certify", "--case", &id])?;
        ensure(code == 0, || format!("{id}: exit {code}: {err}"))?;
        let c: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        let got = (c["c1"].as_i64(), c["c2"].as_i64(), c["D"][0].as_i64(), c["D"][1].as_i64(), c["square"].as_i64());
        ensure(got == (Some(c1), Some(c2), Some(a), Some(b), Some(square)), || format!("{id}: {got:?}"))?;
        ensure(c["point_excluded"] == true, || format!("{id}: point case not excluded"))?;
        ensure(c["curve_reason"] == reason, || format!("{id}: curve_reason {}", c["curve_reason"]))?;
        ensure(c["verdict"] == "SmallCertified", || format!("{id}: {}", c["verdict"]))?;
    }
    let (_, out, _) = fano2(&["certify", "--case", "e1e1:67", "--format", "human"])?;
    ensure(out.contains("Modulus(4)"), || format!("case 67 obstruction: {out}"))?;
    Ok("8 cases SmallCertified with matching (c1, c2, D, square)".into())
}

fn printed_completion(row: &TableRow) -> Option<CompletionKind> {
    Some(CompletionKind::E1 { r: row.rp?, d: row.dp?, g: row.gp? })
}

fn solver_round_trip(catalog: &Catalog) -> Check {
    let start = Instant::now();
    let bounds = SearchBounds::default();
    let mut rows = 0;
    let mut with_alternatives = 0;
    for row in catalog.table(TableId::E1E1).unwrap().rows.iter().filter(|r| r.status == Status::Exists) {
        let model = row_host_model(row).map_err(|e| e.to_string())?;
        let kind = printed_completion(row).ok_or_else(|| format!("{}: no target", row.id()))?;
        let found = enumerate_completions(&model, &bounds);
        let hits = found
            .iter()
            .filter(|c| {
                c.completion == kind && c.alpha == row.alpha.value && c.beta == row.beta.value && c.e == row.e.value
            })
            .count();
        ensure(hits == 1, || format!("{}: printed completion found {hits} times", row.id()))?;
        if found.len() > 1 {
            with_alternatives += 1;
        }
        rows += 1;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("sweep took {elapsed:?}"))?;
    Ok(format!(
        "{rows} rows contain their printed completion ({with_alternatives} also admit others), {:.2}s",
        elapsed.as_secs_f64()
    ))
}

/// Hand-expanded trilinear form over the basis monomials `H^i E^j`.
#[allow(clippy::needless_range_loop)]
fn oracle_triple(
    kind: HostKind,
    minus_ky3: &Rational,
    x: &DivisorClass,
    y: &DivisorClass,
    z: &DivisorClass,
) -> Rational {
    let (h3, he2, e3) = match kind {
        HostKind::E1 { r, d, g } => {
            let (r, d, g) = (r as i64, d as i64, g as i64);
            (minus_ky3 / int(r * r * r), int(-d), int(2 - 2 * g - r * d))
        }
        HostKind::E2 => (minus_ky3.clone(), int(0), int(1)),
        HostKind::E3E4 => (minus_ky3.clone(), int(0), int(2)),
        HostKind::E5 => (minus_ky3.clone(), int(0), int(4)),
    };
    let monomial = |e_count: usize| match e_count {
        0 => h3.clone(),
        1 => Rational::zero(),
        2 => he2.clone(),
        _ => e3.clone(),
    };
    let (xs, ys, zs) = ([&x.a, &x.b], [&y.a, &y.b], [&z.a, &z.b]);
    let mut total = Rational::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                total += xs[i] * ys[j] * zs[k] * monomial(i + j + k);
            }
        }
    }
    total
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(-1000..=1000), rng.gen_range(1..=60))
}

fn random_class(rng: &mut ChaCha8Rng) -> DivisorClass {
    DivisorClass::new(random_rational(rng), random_rational(rng))
}

fn random_host(rng: &mut ChaCha8Rng, family: usize) -> HostModel {
    const DEGREES: [(u32, &[i64]); 4] =
        [(1, &[2, 4, 6, 8, 10, 12, 14, 16, 18, 22]), (2, &[8, 16, 24, 32, 40]), (3, &[54]), (4, &[64])];
    loop {
        let (kind, ky3) = match family {
            0 => {
                let (r, degrees) = DEGREES[rng.gen_range(0..4)];
                let ky3 = degrees[rng.gen_range(0..degrees.len())];
                (HostKind::E1 { r, d: rng.gen_range(1..=20), g: rng.gen_range(0..=20) }, int(ky3))
            }
            1 => (HostKind::E2, int(2 * rng.gen_range(1..=11))),
            2 => (HostKind::E3E4, int(2 * rng.gen_range(1..=11))),
            _ => (HostKind::E5, ratio(2 * rng.gen_range(1..=20) + 1, 2)),
        };
        if let Ok(model) = make_host_model(kind, &ky3) {
            return model;
        }
    }
}

fn oracle_equivalence() -> Check {
    const SAMPLES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f1a9);
    for (family, name) in ["E1", "E2", "E3/E4", "E5"].iter().enumerate() {
        for i in 0..SAMPLES {
            let model = random_host(&mut rng, family);
            let (x, y, z) = (random_class(&mut rng), random_class(&mut rng), random_class(&mut rng));
            let engine = model.triple_product(&x, &y, &z);
            let oracle = oracle_triple(model.kind(), &model.minus_ky3(), &x, &y, &z);
            ensure(engine == oracle, || {
                format!("{name} sample {i} {}: {} != {}", model.kind(), show(&engine), show(&oracle))
            })?;
            let k = model.anticanonical();
            let e = random_rational(&mut rng);
            let flopped = flopped_triple(&model, &k, &y, &z, &e);
            ensure(flopped == model.triple_product(&k, &y, &z), || {
                format!("{name} sample {i}: flop moved a product with -K")
            })?;
        }
    }
    Ok(format!("{SAMPLES} random triples per host kind agree; flop fixes every -K product"))
}

fn curve_models(row: &TableRow) -> Result<Vec<HostModel>, String> {
    let mut out = Vec::new();
    if let Ok(kind @ HostKind::E1 { .. }) = row.host_kind() {
        out.push(make_host_model(kind, &row.ky3.value).map_err(|e| e.to_string())?);
    }
    if let (Ok(kind @ HostKind::E1 { .. }), Some(k)) = (row.target_kind(), row.printed_target_degree()) {
        out.push(make_host_model(kind, &k.value).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn lattice_properties(catalog: &Catalog) -> Check {
    let mut lattices = 0;
    for row in catalog.rows() {
        for model in curve_models(row)? {
            let id = row.id();
            let gram = k3_gram(&model).map_err(|e| format!("{id}: {e}"))?;
            for a in -50..=50 {
                for b in -50..=50 {
                    let sq = restriction_square(&gram, &DivisorClass::from_ints(a, b)).map_err(|e| e.to_string())?;
                    ensure(sq % 2 == 0, || format!("{id}: ({a}, {b}) has odd square {sq}"))?;
                }
            }
            let (c1, c2) = contraction_coefficients(&model);
            let c1: i64 = c1.to_integer().try_into().map_err(|_| format!("{id}: c1 too large"))?;
            let c2: i64 = c2.to_integer().try_into().map_err(|_| format!("{id}: c2 too large"))?;
            let d = contracted_class(c1, c2).map_err(|e| format!("{id}: {e}"))?;
            let k = model.anticanonical();
            ensure(model.triple_product(&k, &k, &d).is_zero(), || format!("{id}: K^2.D != 0"))?;
            let gcd = num_integer::gcd(d.a.to_integer(), d.b.to_integer());
            ensure(gcd == 1.into(), || format!("{id}: D = {d} is not primitive"))?;
            lattices += 1;
        }
    }
    Ok(format!("{lattices} curve lattices: squares even on |a|,|b| <= 50, D primitive in ker K^2"))
}

fn degree_drops(catalog: &Catalog) -> Check {
    let mut rows = 0;
    for row in catalog.rows() {
        let id = row.id();
        let host = row.host_kind().map_err(|e| e.to_string())?;
        let target = row.target_kind().map_err(|e| e.to_string())?;
        let expected = match host {
            HostKind::E1 { r, d, g } => int(2 * r as i64 * d as i64 - 2 * g as i64 + 2),
            HostKind::E2 => int(8),
            HostKind::E3E4 => int(2),
            HostKind::E5 => ratio(1, 2),
        };
        ensure(&row.ky3.value - &row.kx3.value == expected, || format!("{id}: host drop"))?;
        let kyp3 = row.printed_target_degree().ok_or_else(|| format!("{id}: no target degree"))?;
        ensure(&kyp3.value - &row.kx3.value == target.degree_drop(), || format!("{id}: target drop"))?;
        let left = make_host_model(host, &row.ky3.value).map_err(|e| format!("{id}: {e}"))?;
        let right = make_host_model(target, &kyp3.value).map_err(|e| format!("{id}: {e}"))?;
        ensure(left.minus_k3() == right.minus_k3() && left.minus_k3() == row.kx3.value, || {
            format!("{id}: legs disagree on -K_X^3")
        })?;
        rows += 1;
    }
    Ok(format!("{rows} rows, both legs agree"))
}

fn status_ledger(catalog: &Catalog) -> Check {
    let open: Vec<_> = catalog.rows().filter(|r| r.status == Status::Open).map(TableRow::id).collect();
    ensure(open == ["e1e1:28", "e1e1:59", "e1e1:61", "e1e1:80"], || format!("open rows {open:?}"))?;
    let status = |id: &str| catalog.resolve(id).map(|r| r.status).map_err(|e| e.to_string());
    ensure(status("e1e2:1")? == Status::NotExists, || "e1e2:1 should not exist".into())?;
    ensure(status("e2e2:2")? == Status::Exists, || "e2e2:2 should exist".into())?;
    ensure(status("e5e5:1")? == Status::Exists, || "e5e5:1 should exist".into())?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (code, diff, err) = fano2(&["export", "--out", dir.path().to_str().unwrap()])?;
    ensure(code == 0, || format!("export exit {code}: {err}{diff}"))?;
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data");
    for id in TableId::ALL {
        let name = id.file_name();
        let a = fs::read(shipped.join(&name)).map_err(|e| e.to_string())?;
        let b = fs::read(dir.path().join(&name)).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{name} differs after export"))?;
    }
    Ok("4 open rows, corrected statuses, export byte-identical for 7 files".into())
}

fn main() -> ExitCode {
    let catalog = Catalog::builtin();
    let criteria: Vec<Criterion> = vec![
        ("table reproduction", Box::new(table_reproduction)),
        ("smallness fixtures", Box::new(certified_cases)),
        ("solver round trip", Box::new(|| solver_round_trip(&catalog))),
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("lattice properties", Box::new(|| lattice_properties(&catalog))),
        ("degree drops", Box::new(|| degree_drops(&catalog))),
        ("status ledger and export", Box::new(|| status_ledger(&catalog))),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", n + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
