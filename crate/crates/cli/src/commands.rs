use std::path::Path;

use contextlab::bounds::{dichotomic_bound, phase_bound, BoundCertificate};
use contextlab::catalog::{CatalogEntry, CatalogSpec};
use contextlab::linalg::{UnitaryOperator, C64};
use contextlab::pms::{build_square, row_col_products, scan_states, verify_compatibility, CompatibilityReport, ProductReport};
use contextlab::spectral::{
    complete_triple_with, construct_partner_with, infer_sign, verify_algebra, AlgebraReport, LambdaPrimes,
    PairingVerdict, PmsTriple, TripleJson,
};
use contextlab::tol::Tolerances;
use contextlab::Sign;
use serde::Serialize;

use crate::error::CliError;
use crate::output::{emit, ensure_dir, json_text, read_json, read_matrix, write_file, write_json};
use crate::{BoundKind, Format};

const APPROX_HINT: &str = "truncated displacements obey the algebra only on low-energy states; \
                           build them with `catalog fock:...` and read its truncation-quality block instead";

fn load_unitary(path: &Path, name: &str, tol: f64) -> Result<UnitaryOperator, CliError> {
    let m = read_matrix(path)?;
    if !m.is_square() {
        return Err(CliError::parse(format!("{name} is not square")));
    }
    UnitaryOperator::new(m, tol).map_err(|e| CliError::check(format!("{name}: {e}"), e.residual()))
}

#[derive(Serialize)]
struct VerifyReport {
    sign: Sign,
    algebra: AlgebraReport,
    compatibility: CompatibilityReport,
    products: ProductReport,
    pass: bool,
}

impl VerifyReport {
    /// Largest residual over every check, with a readable name.
    fn worst(&self) -> (String, f64) {
        let mut items: Vec<(String, f64)> = Vec::new();
        for c in &self.algebra.commutators {
            items.push((format!("commutator [u{}, u{}]", c.i, c.j), c.residual));
        }
        for a in &self.algebra.anticommutators {
            items.push((format!("anti-commutator {{u{}, u{}}}", a.i, a.j), a.residual));
        }
        for (k, r) in self.compatibility.rows.iter().enumerate() {
            items.push((format!("row {} compatibility", k + 1), *r));
        }
        for (k, r) in self.compatibility.columns.iter().enumerate() {
            items.push((format!("column {} compatibility", k + 1), *r));
        }
        for p in &self.products.contexts {
            items.push((format!("{} product", p.context), p.residual));
        }
        items
            .into_iter()
            .fold((String::new(), f64::NEG_INFINITY), |best, it| if it.1 > best.1 { it } else { best })
    }
}

pub fn verify(u1: &Path, u2: &Path, u3: &Path, tol: f64, sign: Option<Sign>, out: Option<&Path>) -> Result<(), CliError> {
    let m1 = read_matrix(u1)?;
    let m2 = read_matrix(u2)?;
    let m3 = read_matrix(u3)?;
    let dims = [m1.rows(), m2.rows(), m3.rows()];
    if dims.iter().any(|&d| d != dims[0]) || !(m1.is_square() && m2.is_square() && m3.is_square()) {
        return Err(CliError::parse(format!("operator dimensions differ: {dims:?}")));
    }
    let sign = sign.unwrap_or_else(|| infer_sign(&m1, &m2, &m3));
    let mut ops = Vec::with_capacity(3);
    for (name, m) in [("u1", m1), ("u2", m2), ("u3", m3)] {
        ops.push(UnitaryOperator::new(m, tol).map_err(|e| CliError::check(format!("{name}: {e}"), e.residual()))?);
    }
    let [o1, o2, o3]: [UnitaryOperator; 3] = ops.try_into().expect("three operators");
    let triple = PmsTriple::from_parts(o1, o2, o3, sign)?;
    let square = build_square(&triple);
    let algebra = verify_algebra(&triple, tol);
    let compatibility = verify_compatibility(&square, tol);
    let products = row_col_products(&square);
    let pass = algebra.pass && compatibility.pass && products.max_residual <= tol;
    let report = VerifyReport {
        sign,
        algebra,
        compatibility,
        products,
        pass,
    };
    emit(out, &json_text(&report))?;
    if pass {
        return Ok(());
    }
    let (name, residual) = report.worst();
    let mut message = format!("{name} residual {residual:e} exceeds tol {tol:e}");
    if report.algebra.max_anticommutator_residual > tol && triple.dim() % 2 == 0 {
        message.push_str("; ");
        message.push_str(APPROX_HINT);
    }
    Err(CliError::check(message, Some(residual)))
}

fn parse_lambda_primes(raw: &str) -> Result<Vec<C64>, CliError> {
    raw.split(';')
        .map(|pair| {
            let parts: Vec<&str> = pair.split(',').map(str::trim).collect();
            match parts.as_slice() {
                [re, im] => match (re.parse::<f64>(), im.parse::<f64>()) {
                    (Ok(re), Ok(im)) => Ok(C64::new(re, im)),
                    _ => Err(()),
                },
                _ => Err(()),
            }
            .map_err(|_| CliError::parse(format!("--lambda-primes expects re,im;re,im;... but got {pair:?}")))
        })
        .collect()
}

#[derive(Serialize)]
struct CompletionReport<'a> {
    verdict: &'a PairingVerdict,
    /// `[λ, K, λ']` per pair.
    blocks: Vec<(C64, usize, C64)>,
    anticommutator_residual: f64,
    triple: TripleJson,
}

pub fn complete(u1: &Path, lambda_primes: Option<&str>, sign: Sign, tol: f64, out: Option<&Path>) -> Result<(), CliError> {
    let u1 = load_unitary(u1, "u1", tol).map_err(|e| CliError { exit: crate::error::Exit::Input, ..e })?;
    let primes = match lambda_primes {
        Some(raw) => LambdaPrimes::Explicit(parse_lambda_primes(raw)?),
        None => LambdaPrimes::Default,
    };
    let tols = Tolerances {
        commutator: tol,
        ..Tolerances::default()
    };
    let construction = construct_partner_with(&u1, &primes, &tols).map_err(|e| match e {
        contextlab::spectral::SpectralError::LambdaPrimeCount { .. }
        | contextlab::spectral::SpectralError::LambdaPrimeModulus { .. } => CliError::parse(e.to_string()),
        other => other.into(),
    })?;
    let triple = complete_triple_with(&u1, &construction.partner, sign, tol)?;
    let report = CompletionReport {
        verdict: &construction.verdict,
        blocks: construction.blocks.clone(),
        anticommutator_residual: construction.anticommutator_residual,
        triple: TripleJson::from(&triple),
    };
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_json(&dir.join("u2.json"), triple.u2.matrix())?;
        write_json(&dir.join("u3.json"), triple.u3.matrix())?;
        write_json(&dir.join("triple.json"), &report.triple)?;
        write_json(&dir.join("verdict.json"), &construction.verdict)?;
    }
    emit(None, &json_text(&report))
}

fn load_triple_source(source: &str) -> Result<PmsTriple, CliError> {
    let path = Path::new(source);
    if path.is_file() {
        let j: TripleJson = read_json(path)?;
        return PmsTriple::try_from(j).map_err(|e| CliError::check(e.to_string(), e.residual()));
    }
    let spec: CatalogSpec = source.parse()?;
    match spec.build()? {
        CatalogEntry::Exact(t) => Ok(t),
        CatalogEntry::Approx(a) => Err(CliError::check(
            format!("{spec} is an approximate triple; {APPROX_HINT}"),
            Some(a.quality.anticommutator_residual),
        )),
    }
}

pub fn violate(
    source: &str,
    n_pure: usize,
    n_mixed: usize,
    seed: u64,
    tol: f64,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let triple = load_triple_source(source)?;
    if triple.dim() % 2 == 1 {
        return Err(CliError::check(format!("odd dimension {}", triple.dim()), None));
    }
    let worst = triple.residuals.max();
    if worst > tol {
        return Err(CliError::check(format!("triple residual {worst:e} exceeds tol {tol:e}"), Some(worst)));
    }
    let summary = scan_states(&build_square(&triple), n_pure, n_mixed, seed);
    match out {
        Some(dir) => {
            ensure_dir(dir)?;
            write_json(&dir.join("summary.json"), &summary)?;
            write_file(&dir.join("states.csv"), &summary.to_csv())
        }
        None => match format {
            Format::Json => emit(None, &json_text(&summary)),
            Format::Csv => emit(None, &summary.to_csv()),
        },
    }
}

fn bound_summary(cert: &BoundCertificate) -> String {
    let turns = cert.argmax.phases_over_pi();
    let mut s = format!(
        "bound {:.12}\ngap to 6: {:.12}\nargmax phases (turns of π):\n",
        cert.bound_value,
        cert.gap_to_quantum()
    );
    for row in turns.chunks(3) {
        s.push_str(&format!("  {:+.9} {:+.9} {:+.9}\n", row[0], row[1], row[2]));
    }
    s
}

pub fn bound(kind: BoundKind, starts: usize, seed: u64, tol: f64, out: Option<&Path>) -> Result<(), CliError> {
    let cert = match kind {
        BoundKind::Dichotomic => dichotomic_bound(),
        BoundKind::Phase => phase_bound(starts, tol, seed).map_err(|e| CliError::parse(e.to_string()))?,
    };
    let text = json_text(&cert);
    match out {
        Some(path) => {
            write_file(path, &text)?;
            emit(None, &bound_summary(&cert))
        }
        None => {
            eprint!("{}", bound_summary(&cert));
            emit(None, &text)
        }
    }
}

pub fn catalog(name: &str, out: Option<&Path>) -> Result<(), CliError> {
    let spec: CatalogSpec = name.parse()?;
    let entry = spec.build()?;
    if let CatalogEntry::Approx(a) = &entry {
        for w in &a.warnings {
            eprintln!("warning: {w}");
        }
    }
    let value = entry.to_json_value();
    match out {
        Some(dir) => {
            ensure_dir(dir)?;
            write_json(&dir.join("triple.json"), &value)?;
            let ops = match &entry {
                CatalogEntry::Exact(t) => [t.u1.matrix(), t.u2.matrix(), t.u3.matrix()],
                CatalogEntry::Approx(a) => [&a.u1, &a.u2, &a.u3],
            };
            for (k, m) in ops.into_iter().enumerate() {
                write_json(&dir.join(format!("u{}.json", k + 1)), m)?;
            }
            Ok(())
        }
        None => emit(None, &json_text(&value)),
    }
}
