use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};

use g2theta::algebra::MonicCubic;
use g2theta::binary_cubics::BinaryCubic;
use g2theta::cubic_rings::{self, CubicRing};
use g2theta::harness::{self, Budget};
use g2theta::metaplectic::{run_selftest, Place, SelfTest, SelfTestReport};
use g2theta::qp::QpResult;
use g2theta::rootsys::{RootSystemF4, WEYL_ORDER};
use g2theta::table::{self, field_factor_count, TableRow, TABLE};
use g2theta::whittaker::{self, HalfInt};
use g2theta::{Error, Result};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::cache::Cache;
use crate::output::{compact, write_csv, Output};
use crate::{CheckArgs, Cli, Command, CoverArgs, Format, QpArgs, RootsArgs, WhittakerArgs};

pub fn run(cli: &Cli, cache: &Cache) -> Result<u8> {
    let out = match &cli.command {
        Command::Qp(args) => qp(args, cache, cli.jobs)?,
        Command::Coeff { form } => coeff(form, cache, cli.jobs)?,
        Command::Table { row } => table(row.as_deref(), cache, cli.jobs)?,
        Command::Psd { form } => psd(form)?,
        Command::Roots(args) => roots(args),
        Command::Cover(args) => cover(args)?,
        Command::Whittaker(args) => whittaker(args)?,
        Command::Batch { file, output } => return batch(file, output.as_deref(), cli.format, cache, cli.jobs),
        Command::Check(args) => check(args)?,
    };
    out.emit(cli.format).map_err(io_error)?;
    Ok(out.code)
}

fn io_error(e: io::Error) -> Error {
    Error::InvalidInput(format!("I/O error: {e}"))
}

fn orbits_json(r: &QpResult) -> Value {
    json!({
        "polynomial": r.polynomial,
        "total": r.total,
        "orbits": r.orbits,
    })
}

fn qp(args: &QpArgs, cache: &Cache, jobs: Option<usize>) -> Result<Output> {
    let p: MonicCubic = args.poly.parse()?;
    let r = cache.compute(&p, jobs)?;
    if args.count {
        let out = Output::new(r.total.to_string(), json!({"polynomial": p, "total": r.total}));
        return Ok(out.csv(vec!["polynomial", "total"], vec![vec![p.to_string(), r.total.to_string()]]));
    }
    if args.list {
        let mut text = format!("{p}: {} matrices in {} orbits\n", r.total, r.orbits.len());
        let mut rows = Vec::new();
        let mut listed = Vec::new();
        for t in &r.matrices {
            let idx = r.orbit_index(t).expect("orbit decomposition covers Q_p");
            let _ = writeln!(text, "{t}  orbit {idx}");
            rows.push(vec![idx.to_string(), compact(t)]);
            listed.push(json!({"matrix": t, "orbit": idx}));
        }
        let mut js = orbits_json(&r);
        js["matrices"] = Value::Array(listed);
        return Ok(Output::new(text, js).csv(vec!["orbit", "matrix"], rows));
    }
    let mut text = format!("{p}: {} matrices in {} orbits\n", r.total, r.orbits.len());
    let mut rows = Vec::new();
    for (i, o) in r.orbits.iter().enumerate() {
        let _ = writeln!(text, "  {i}: {} size {} stabilizer {}", o.rep, o.size, o.stabilizer_order);
        rows.push(vec![i.to_string(), compact(&o.rep), o.size.to_string(), o.stabilizer_order.to_string()]);
    }
    Ok(Output::new(text, orbits_json(&r)).csv(vec!["orbit", "rep", "size", "stabilizer_order"], rows))
}

fn coeff(form: &str, cache: &Cache, jobs: Option<usize>) -> Result<Output> {
    let f: BinaryCubic = form.parse()?;
    let p = f.companion()?;
    let r = cache.compute(&p, jobs)?;
    let ring = CubicRing::new(p.clone());
    let irreducible = ring.is_etale() && field_factor_count(&p) == 1;
    let maximal = if ring.is_etale() { cubic_rings::is_maximal(&ring)? } else { false };
    let q_r = r.orbits.len();
    let delta = u8::from(r.total > 0);
    let cl2 = (irreducible && maximal && delta == 1).then_some(q_r);

    let mut text = format!("form {f}\ncompanion {p}\nmagnitude {} (sign not determined)\n|Q_R| {q_r}\ndelta {delta}\n", r.total);
    let _ = writeln!(text, "maximal {maximal}\nirreducible {irreducible}");
    if let Some(c) = cl2 {
        let _ = writeln!(text, "|Cl+[2]| {c}");
    }
    let js = json!({
        "form": f.to_string(),
        "polynomial": p,
        "magnitude": r.total,
        "q_r": q_r,
        "delta": delta,
        "maximal": maximal,
        "irreducible": irreducible,
        "class_group_two_torsion": cl2,
    });
    let row = vec![
        f.to_string(),
        p.to_string(),
        r.total.to_string(),
        q_r.to_string(),
        delta.to_string(),
        maximal.to_string(),
        irreducible.to_string(),
        cl2.map(|c| c.to_string()).unwrap_or_default(),
    ];
    let header = vec!["form", "polynomial", "magnitude", "q_r", "delta", "maximal", "irreducible", "class_group_two_torsion"];
    Ok(Output::new(text, js).csv(header, vec![row]))
}

fn table(only: Option<&str>, cache: &Cache, jobs: Option<usize>) -> Result<Output> {
    let rows: Vec<&TableRow> = match only {
        None => TABLE.iter().collect(),
        Some(s) => {
            let p: MonicCubic = s.parse()?;
            let hit = TABLE
                .iter()
                .find(|r| r.polynomial.parse::<MonicCubic>().is_ok_and(|q| q == p))
                .ok_or_else(|| Error::InvalidInput(format!("{p} is not a table row")))?;
            vec![hit]
        }
    };
    let mut reports = Vec::new();
    for row in rows {
        let p: MonicCubic = row.polynomial.parse()?;
        reports.push(table::reproduce_row_with(row, &cache.compute(&p, jobs)?)?);
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    let mut text = String::new();
    let mut csv_rows = Vec::new();
    for r in &reports {
        let _ = write!(
            text,
            "[{}] {}: {} (expected {}), {} orbits, Cl+ {}, |Cl+[2]| {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.polynomial,
            r.computed_count,
            r.expected_count,
            r.orbits,
            r.class_group,
            r.class_group_two_torsion,
        );
        for c in r.checks.iter().filter(|c| !c.passed) {
            let _ = write!(text, "\n       {}: {}", c.name, c.detail);
        }
        text.push('\n');
        csv_rows.push(vec![
            r.polynomial.clone(),
            compact(&r.structure).trim_matches('"').to_string(),
            r.expected_count.to_string(),
            r.computed_count.to_string(),
            r.orbits.to_string(),
            r.class_group.clone(),
            r.class_group_two_torsion.to_string(),
            r.is_maximal.to_string(),
            r.passed.to_string(),
        ]);
    }
    let _ = writeln!(text, "{passed}/{} rows pass", reports.len());
    let code = if passed == reports.len() { 0 } else { 4 };
    let header = vec![
        "polynomial",
        "structure",
        "expected",
        "computed",
        "orbits",
        "class_group",
        "class_group_two_torsion",
        "maximal",
        "passed",
    ];
    let js = json!({"passed": passed, "total": reports.len(), "rows": reports});
    Ok(Output::new(text, js).csv(header, csv_rows).code(code))
}

fn psd(form: &str) -> Result<Output> {
    let f: BinaryCubic = form.parse()?;
    let class = f.psd_classify()?;
    let js = json!({"form": f.to_string(), "class": class});
    Ok(Output::new(class.to_string(), js).csv(vec!["form", "class"], vec![vec![f.to_string(), class.to_string()]]))
}

fn roots(args: &RootsArgs) -> Output {
    let f4 = RootSystemF4::build();
    if args.check_lemmas {
        let checks = f4.check_closure_lemmas();
        let ok = checks.iter().all(|c| c.verified);
        let mut text = String::new();
        let mut rows = Vec::new();
        for c in &checks {
            let _ = writeln!(text, "({}) {}: {}", c.check_id, if c.verified { "verified" } else { "FAILED" }, c.statement);
            rows.push(vec![
                c.check_id.clone(),
                c.verified.to_string(),
                c.counterexamples.len().to_string(),
                c.statement.clone(),
            ]);
        }
        let out = Output::new(text, json!(checks)).csv(vec!["check_id", "verified", "counterexamples", "statement"], rows);
        return out.code(if ok { 0 } else { 3 });
    }
    if args.weyl_witness {
        let group = f4.weyl_group();
        let witnesses = f4.find_dot_witnesses(&group);
        let Some(w) = witnesses.first() else {
            return Output::new("no witness found".into(), json!({"witness": null})).code(3);
        };
        let m: Vec<Vec<String>> = w.0.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        let mut text = format!("|W(F4)| = {}; {} witness(es), first:\n", group.len(), witnesses.len());
        for r in &m {
            let _ = writeln!(text, "  [{}]", r.join(", "));
        }
        let js = json!({"weyl_order": group.len(), "witnesses": witnesses.len(), "witness": m});
        let rows = m.iter().enumerate().map(|(i, r)| std::iter::once(i.to_string()).chain(r.iter().cloned()).collect());
        let code = if group.len() == WEYL_ORDER { 0 } else { 3 };
        return Output::new(text, js).csv(vec!["row", "c1", "c2", "c3", "c4"], rows.collect()).code(code);
    }
    let nu = f4.nu_exc();
    let coords: Vec<String> = nu.0.iter().map(|x| x.to_string()).collect();
    let pairings: Vec<String> = f4.pairings(&nu.0).iter().map(|x| x.to_string()).collect();
    let text = format!("nu_exc = ({})\npairings with a1..a4 coroots: {}", coords.join(", "), pairings.join(", "));
    let js = json!({"nu_exc": coords, "pairings": pairings});
    let rows = (0..4).map(|i| vec![format!("a{}", i + 1), coords[i].clone(), pairings[i].clone()]).collect();
    Output::new(text, js).csv(vec!["simple_root", "coordinate", "pairing"], rows)
}

fn cover(args: &CoverArgs) -> Result<Output> {
    let tests: Vec<SelfTest> = match &args.test {
        Some(t) => vec![t.parse()?],
        None => SelfTest::ALL.to_vec(),
    };
    let places: Vec<Place> = match &args.place {
        Some(p) => vec![p.parse()?],
        None => harness::PLACES.to_vec(),
    };
    let mut reports: Vec<SelfTestReport> = Vec::new();
    for t in tests {
        if t.is_local() {
            for &v in &places {
                reports.push(run_selftest(t, v, args.samples, args.seed)?);
            }
        } else {
            reports.push(run_selftest(t, places[0], args.samples, args.seed)?);
        }
    }
    let failures: usize = reports.iter().map(|r| r.failures).sum();
    let place = |r: &SelfTestReport| r.place.map_or("-".to_string(), |p| p.to_string());
    let mut text = String::new();
    let mut rows = Vec::new();
    for r in &reports {
        let _ = writeln!(text, "{} at {}: {} samples, {} failures", r.test, place(r), r.samples, r.failures);
        for e in &r.examples {
            let _ = writeln!(text, "    {e}");
        }
        rows.push(vec![r.test.to_string(), place(r), r.samples.to_string(), r.failures.to_string()]);
    }
    let js: Vec<Value> = reports
        .iter()
        .map(|r| json!({"test": r.test, "place": r.place, "samples": r.samples, "seed": r.seed, "failures": r.failures}))
        .collect();
    let out = Output::new(text, json!(js)).csv(vec!["test", "place", "samples", "failures"], rows);
    Ok(out.code(if failures == 0 { 0 } else { 3 }))
}

fn parse_complex(s: &str, what: &str) -> Result<Complex64> {
    s.trim()
        .parse::<Complex64>()
        .map_err(|_| Error::Parse(format!("bad complex number for {what}: '{s}'")))
}

fn whittaker(args: &WhittakerArgs) -> Result<Output> {
    let n: HalfInt = args.n.parse()?;
    let mut js = json!({"n": n, "nu": args.nu});
    let alpha = match (&args.alpha, &args.form, &args.z) {
        (Some(a), _, _) => parse_complex(a, "--alpha")?,
        (None, Some(form), Some(z)) => {
            let f: BinaryCubic = form.parse()?;
            let z = parse_complex(z, "--z")?;
            let j = args.j.unwrap_or_else(|| whittaker::default_j(z));
            let a2 = whittaker::alpha_squared(&f, z, j)?;
            js["form"] = json!(f.to_string());
            js["z"] = json!([z.re, z.im]);
            js["j"] = json!(j);
            js["alpha_squared"] = json!([a2.re, a2.im]);
            a2.sqrt()
        }
        _ => return Err(Error::InvalidInput("give --alpha, or --form with --z".into())),
    };
    let w = whittaker::whittaker_value(n, args.nu, alpha)?;
    js["alpha"] = json!([alpha.re, alpha.im]);
    let mut coeffs = serde_json::Map::new();
    let mut text = format!("n = {n}, nu = {}, alpha = {alpha}\n", args.nu);
    let mut rows = Vec::new();
    for c in &w.coefficients {
        let key = format!("x^{} y^{}", c.x_exp, c.y_exp);
        let _ = writeln!(text, "  {key}: {:.17e} {:+.17e}i", c.value.re, c.value.im);
        coeffs.insert(key, json!([c.value.re, c.value.im]));
        rows.push(vec![
            c.x_exp.to_string(),
            c.y_exp.to_string(),
            format!("{:e}", c.value.re),
            format!("{:e}", c.value.im),
        ]);
    }
    js["coefficients"] = Value::Object(coeffs);
    Ok(Output::new(text, js).csv(vec!["x_exp", "y_exp", "re", "im"], rows))
}

const BATCH_HEADER: [&str; 5] = ["polynomial", "total", "orbits", "stabilizers", "error"];

fn batch_row(poly: &str, cache: &Cache, jobs: Option<usize>) -> (Vec<String>, Value) {
    let res = poly.parse::<MonicCubic>().and_then(|p| cache.compute(&p, jobs));
    match res {
        Ok(r) => {
            let stabs: Vec<usize> = r.orbits.iter().map(|o| o.stabilizer_order).collect();
            let row = vec![
                r.polynomial.to_string(),
                r.total.to_string(),
                r.orbits.len().to_string(),
                stabs.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "),
                String::new(),
            ];
            let js = json!({"polynomial": r.polynomial, "total": r.total, "orbits": r.orbits.len(), "stabilizers": stabs, "error": null});
            (row, js)
        }
        Err(e) => {
            let row = vec![poly.to_string(), String::new(), String::new(), String::new(), e.to_string()];
            (row, json!({"polynomial": poly, "error": e.to_string()}))
        }
    }
}

/// Rows are processed and written one at a time; with a cache, an
/// interrupted run resumes cheaply.
fn batch(file: &std::path::Path, output: Option<&std::path::Path>, format: Format, cache: &Cache, jobs: Option<usize>) -> Result<u8> {
    let text = fs::read_to_string(file).map_err(|e| Error::InvalidInput(format!("{}: {e}", file.display())))?;
    let mut sink: Box<dyn Write> = match output {
        Some(path) => Box::new(fs::File::create(path).map_err(io_error)?),
        None => Box::new(io::stdout().lock()),
    };
    if text.trim().is_empty() {
        return Ok(0);
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Parse(format!("CSV header: {e}")))?.clone();
    let col = headers
        .iter()
        .position(|h| h == "polynomial")
        .ok_or_else(|| Error::Parse("CSV header must contain a \"polynomial\" column".into()))?;
    if format != Format::Json {
        write_csv(&mut sink, &BATCH_HEADER, &[]).map_err(io_error)?;
    }
    for record in reader.records() {
        let (row, js) = match record {
            Ok(rec) => match rec.get(col) {
                Some(poly) if !poly.is_empty() => batch_row(poly, cache, jobs),
                _ => {
                    let err = "missing polynomial".to_string();
                    (vec![String::new(), String::new(), String::new(), String::new(), err.clone()], json!({"error": err}))
                }
            },
            Err(e) => {
                let err = format!("malformed row: {e}");
                (vec![String::new(), String::new(), String::new(), String::new(), err.clone()], json!({"error": err}))
            }
        };
        if format == Format::Json {
            writeln!(sink, "{}", compact(&js)).map_err(io_error)?;
        } else {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut sink);
            w.write_record(&row).map_err(|e| io_error(e.into()))?;
            w.flush().map_err(io_error)?;
        }
        sink.flush().map_err(io_error)?;
    }
    Ok(0)
}

fn check(args: &CheckArgs) -> Result<Output> {
    let budget = if args.quick { Budget::Quick } else { Budget::Full };
    let report = harness::run_suite(args.seed, budget, args.filter.as_deref())?;
    if let Some(path) = &args.json {
        fs::write(path, report.to_json()).map_err(io_error)?;
    }
    if let Some(path) = &args.junit {
        fs::write(path, report.to_junit()).map_err(io_error)?;
    }
    let mut text = String::new();
    let mut rows = Vec::new();
    for c in &report.checks {
        let _ = writeln!(
            text,
            "[{}] {} ({} samples){}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.samples,
            if c.passed { String::new() } else { format!(": {}", c.detail) }
        );
        rows.push(vec![c.id.to_string(), c.passed.to_string(), c.samples.to_string(), c.failures.to_string(), c.seed.to_string()]);
    }
    let _ = writeln!(text, "{}/{} checks pass (seed {})", report.total - report.failed, report.total, report.seed);
    let js: Value = serde_json::from_str(&report.to_json()).expect("report is valid JSON");
    let code = report.exit_code() as u8;
    Ok(Output::new(text, js).csv(vec!["id", "passed", "samples", "failures", "seed"], rows).code(code))
}
