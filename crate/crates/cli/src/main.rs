use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};
use spectra::effective::validate_reduction;
use spectra::file::FilteredComplexFile;
use spectra::render;
use spectra::scenario::{find_scenario, registry};
use spectra::{Error, FilteredComplex, PageGroup, SampleSpec};

#[derive(Parser)]
#[command(name = "spectra", version, about = "Spectral sequences of filtered chain complexes")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Compute pages even when r does not exceed the homotopy order.
    #[arg(long, global = true)]
    force: bool,
    /// Random generators checked per degree by `validate`.
    #[arg(long, default_value_t = 200, global = true)]
    samples: usize,
    #[arg(long, env = "SPECTRA_SEED", default_value_t = 0x5eed, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Components of E^r_{p,q}.
    Group { source: String, r: i32, p: i32, q: i32 },
    /// Numerator generators and divisors of E^r_{p,q}.
    Bd { source: String, r: i32, p: i32, q: i32 },
    /// d^r_{p,q} applied to coordinates over the live generators of E^r_{p,q}.
    Dffr {
        source: String,
        r: i32,
        p: i32,
        q: i32,
        #[arg(allow_negative_numbers = true)]
        coords: Vec<BigInt>,
    },
    /// Convergence level in degree n.
    Cnvg { source: String, n: i32 },
    /// Every E^r_{p,q} with p + q = n, over 0 ≤ p ≤ n and the filtration bounds.
    Sweep { source: String, n: i32, r: i32 },
    /// Checks d∘d = 0 and the reduction identities of the attached equivalence.
    Validate {
        source: String,
        /// Highest degree checked.
        #[arg(long, default_value_t = 4)]
        max_degree: i32,
    },
    /// Built-in scenarios.
    ListScenarios,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Unguaranteed(i32, i32, i32),
    Invalid,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::UnknownScenario(_)) => 2,
            Failure::Lib(Error::Malformed(_)) => 3,
            Failure::Unguaranteed(..) => 4,
            Failure::Lib(Error::Arity { .. }) => 5,
            Failure::Lib(Error::Unbounded { .. }) => 6,
            Failure::Lib(_) | Failure::Invalid => 1,
        }
    }
}

fn load(source: &str) -> Result<FilteredComplex, Error> {
    if let Ok(s) = find_scenario(source) {
        return (s.build)();
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(Error::UnknownScenario(source.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{source}: {e}")))?;
    FilteredComplexFile::from_json(&text)?.build(source)
}

fn page(fc: &FilteredComplex, r: i32, p: i32, q: i32, force: bool) -> Result<PageGroup, Failure> {
    if r < 1 {
        return Err(Error::InvalidArgument(format!("page index r = {r} must be at least 1")).into());
    }
    let g = fc.page_group(r, p, q)?;
    if !g.guaranteed && !force {
        return Err(Failure::Unguaranteed(r, p, q));
    }
    Ok(g)
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(cli: &Cli, text: String, value: Value) {
    let out = match cli.format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(&value).expect("serializable") + "\n",
    };
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Group { source, r, p, q } => {
            let g = page(&load(source)?, *r, *p, *q, cli.force)?;
            emit(cli, render::group_text(&g), render::group_json(&g));
        }
        Command::Bd { source, r, p, q } => {
            let g = page(&load(source)?, *r, *p, *q, cli.force)?;
            emit(cli, render::basis_divisors_text(&g), render::basis_divisors_json(&g));
        }
        Command::Dffr { source, r, p, q, coords } => {
            let fc = load(source)?;
            page(&fc, *r, *p, *q, cli.force)?;
            let v = fc.page_differential(*r, *p, *q, coords)?;
            emit(cli, format!("{}\n", render::list(&v)), render::coordinates_json(&v));
        }
        Command::Cnvg { source, n } => {
            let c = load(source)?.convergence_level(*n)?;
            emit(cli, format!("{}\n", c.level), json!({"degree": c.degree, "level": c.level}));
        }
        Command::Sweep { source, n, r } => {
            let fc = load(source)?;
            let mut text = String::new();
            let mut all = Vec::new();
            let (s, t) = match fc.bounds(*n)? {
                Some((s, t)) => (s.min(0), t.max(*n)),
                None => (0, *n),
            };
            for p in s..=t {
                let g = page(&fc, *r, p, n - p, cli.force)?;
                text.push_str(&render::group_text(&g));
                all.push(render::group_json(&g));
            }
            emit(cli, text, Value::Array(all));
        }
        Command::Validate { source, max_degree } => return validate(cli, source, *max_degree),
        Command::ListScenarios => {
            let text = registry().iter().map(|s| format!("{}\t{}\n", s.name, s.description)).collect();
            let value = registry()
                .iter()
                .map(|s| json!({"name": s.name, "description": s.description, "effective": s.effective}))
                .collect();
            emit(cli, text, Value::Array(value));
        }
    }
    Ok(())
}

fn validate(cli: &Cli, source: &str, max_degree: i32) -> Result<(), Failure> {
    let fc = load(source)?;
    let spec = SampleSpec::new(max_degree, cli.samples, cli.seed);
    let mut text = String::new();
    let mut checks = Vec::new();
    let mut ok = true;

    let mut rng = spec.rng();
    let c = fc.complex();
    let mut broken = None;
    for n in spec.degrees() {
        let gens = c.check_generators(n, spec.samples, &mut rng);
        if let Some(g) = spectra::chain::check_dd(c, n, &gens) {
            broken = Some((n, g));
            break;
        }
    }
    ok &= broken.is_none();
    match &broken {
        None => text.push_str(&format!("d∘d = 0 on degrees 0..={max_degree}: valid\n")),
        Some((n, g)) => text.push_str(&format!("d∘d fails in degree {n} on {g}\n")),
    }
    checks.push(json!({"check": "dd", "valid": broken.is_none()}));

    if let Some(fe) = fc.effective_homology() {
        for (name, r) in [("left", &fe.equivalence.left), ("right", &fe.equivalence.right)] {
            let report = validate_reduction(r, &spec);
            ok &= report.is_valid();
            text.push_str(&format!("{name} reduction: {report}"));
            checks.push(json!({
                "check": format!("{name} reduction"),
                "valid": report.is_valid(),
                "checked_top": report.checked_top,
                "checked_bottom": report.checked_bottom,
                "violations": report.violations.len(),
            }));
        }
        let order = fe.check(&spec)?;
        let within = order.measured <= order.declared;
        ok &= within;
        text.push_str(&format!("homotopy order: measured {}, declared {}\n", order.measured, order.declared));
        checks.push(
            json!({"check": "homotopy order", "valid": within, "measured": order.measured, "declared": order.declared}),
        );
    }
    emit(cli, text, Value::Array(checks));
    if ok {
        Ok(())
    } else {
        Err(Failure::Invalid)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Unguaranteed(r, p, q) => eprintln!(
                    "error: E^{r}_{{{p},{q}}} is not guaranteed: r does not exceed the homotopy order (use --force)"
                ),
                Failure::Invalid => eprintln!("error: validation failed"),
            }
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectra::{Equivalence, FilteredEquivalence};

    const SMALL: &str = r#"{
        "degrees": {"1": ["a"], "2": ["b", "e"]},
        "differential": {"2:b": [[2, "a"]], "2:e": [[1, "a"]]},
        "filtration": {"a": 0, "b": 1, "e": 2}
    }"#;

    fn with_order(t: i32) -> FilteredComplex {
        let fc = FilteredComplexFile::from_json(SMALL).unwrap().build("small").unwrap();
        let f = fc.flin_fn();
        let fe = FilteredEquivalence {
            equivalence: Equivalence::identity(fc.complex()),
            top_flin: f.clone(),
            left_flin: f.clone(),
            right_flin: f,
            declared_order: t,
        };
        fc.with_effective_homology(fe).unwrap()
    }

    #[test]
    fn unguaranteed_pages_need_force() {
        let fc = with_order(2);
        let err = page(&fc, 2, 0, 1, false).err().unwrap();
        assert_eq!(err.code(), 4);
        assert!(page(&fc, 2, 0, 1, true).is_ok());
        assert!(page(&fc, 3, 0, 1, false).unwrap().guaranteed);
    }

    #[test]
    fn exit_code_table() {
        let lib = |e| Failure::Lib(e).code();
        assert_eq!(lib(Error::UnknownScenario("x".into())), 2);
        assert_eq!(lib(Error::Malformed("x".into())), 3);
        assert_eq!(lib(Error::Arity { expected: 1, found: 2 }), 5);
        assert_eq!(lib(Error::Unbounded { origin: "x".into(), degree: 1 }), 6);
        assert_eq!(lib(Error::Internal("x".into())), 1);
        assert_eq!(Failure::Invalid.code(), 1);
    }

    #[test]
    fn page_index_must_be_positive() {
        assert_eq!(page(&with_order(0), 0, 0, 1, true).err().unwrap().code(), 1);
    }
}
