use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rackext::extension::{self, ExtensionError, QuandleFactorFailure};
use rackext::formats::{self, FormatError};
use rackext::rack::RackError;
use rackext::rack_module::ModuleError;
use rackext::{catalog, caps, ext_group, ExtensionRack, Flavor, SignedWord};
use serde_json::{json, Value};

/// Finite racks, quandles, their modules and abelian extensions.
///
/// Results go to standard output as JSON with sorted keys; diagnostics go to
/// standard error. Exit status: 0 success, 1 a check came out false, 2
/// malformed input, 3 a size cap was exceeded.
#[derive(Parser)]
#[command(name = "rackext", version)]
struct Cli {
    /// Worker threads for brute-force enumeration.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Size cap for enumerations and constructed tables (default depends on the verb).
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Check the rack axioms; report quandle status and orbits.
    CheckRack { file: PathBuf },
    /// Check the rack axioms and idempotency.
    CheckQuandle { file: PathBuf },
    Orbits { file: PathBuf },
    /// Operator group generated by the right translations.
    Opgroup { file: PathBuf },
    /// Presentation of the associated group.
    Asgroup { file: PathBuf },
    /// Conjugation quandle of a group.
    Conj { group: PathBuf },
    #[command(subcommand)]
    Module(ModuleVerb),
    /// Semidirect product of a module with its base.
    Semidirect { module: PathBuf },
    /// Extension rack defined by a factor set.
    Extend { module: PathBuf, sigma: PathBuf },
    /// Check the cocycle condition, and the diagonal condition with --quandle.
    CocycleCheck {
        module: PathBuf,
        sigma: PathBuf,
        #[arg(long)]
        quandle: bool,
    },
    /// Decide whether two cocycles differ by a coboundary.
    Equivalent { module: PathBuf, sigma1: PathBuf, sigma2: PathBuf },
    /// Decide whether a cocycle is a coboundary.
    Split { module: PathBuf, sigma: PathBuf },
    /// Factor set of a canonically labeled extension rack relative to a section.
    Extract { module: PathBuf, rack: PathBuf, section: PathBuf },
    /// Extension rack of a dynamical cocycle.
    Dynamical { rack: PathBuf, alpha: PathBuf },
    /// Ext(X, A), or Ext_Q(X, A) with --quandle.
    Ext {
        module: PathBuf,
        #[arg(long)]
        quandle: bool,
        /// Also count Z and B by enumeration.
        #[arg(long)]
        brute_force: bool,
    },
    /// Action of a signed word on the fiber over an element.
    WordAction {
        module: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// List bundled fixtures, or print one.
    Catalog {
        #[arg(long, conflicts_with = "module")]
        rack: Option<String>,
        #[arg(long)]
        module: Option<String>,
    },
}

#[derive(Subcommand)]
enum ModuleVerb {
    /// Validate a module file.
    Check { file: PathBuf },
    /// Build a module from a named construction.
    Make {
        #[arg(long, value_parser = ["trivial", "dihedral", "alexander", "asx"])]
        kind: String,
        /// Rack file or catalog:NAME.
        #[arg(long)]
        rack: String,
        /// Group moduli for trivial and asx, comma separated.
        #[arg(long)]
        group: Option<String>,
        /// Per-orbit moduli for dihedral, comma separated.
        #[arg(long)]
        moduli: Option<String>,
        /// Per-orbit data for alexander as N:h0,h1,..., one flag per orbit.
        #[arg(long, allow_hyphen_values = true)]
        orbit: Vec<String>,
        /// Action matrices for asx as a JSON list, one per element.
        #[arg(long)]
        action: Option<String>,
        #[arg(long)]
        quandle_variant: bool,
        #[arg(long, value_parser = ["rack", "quandle"])]
        flavor: Option<String>,
    },
}

enum Outcome {
    True(Value),
    False(Value),
}

struct Failure {
    code: u8,
    message: String,
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        let code = match &e {
            FormatError::Rack(RackError::CapExceeded { .. })
            | FormatError::Extension(ExtensionError::CapExceeded { .. }) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<ExtensionError> for Failure {
    fn from(e: ExtensionError) -> Self {
        FormatError::from(e).into()
    }
}

impl From<RackError> for Failure {
    fn from(e: RackError) -> Self {
        FormatError::from(e).into()
    }
}

impl From<ModuleError> for Failure {
    fn from(e: ModuleError) -> Self {
        FormatError::from(e).into()
    }
}

fn malformed(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn parent(p: &Path) -> Option<&Path> {
    p.parent()
}

fn read(p: &Path) -> Result<Value, Failure> {
    Ok(formats::read_json(p)?)
}

fn load_module(p: &Path) -> Result<rackext::RackModule, Failure> {
    Ok(formats::module_from_json(&read(p)?, parent(p))?)
}

fn load_sigma(m: &rackext::RackModule, p: &Path) -> Result<rackext::FactorSet, Failure> {
    Ok(formats::factor_set_from_json(m, &read(p)?, parent(p))?)
}

fn module_ref(p: &Path) -> Value {
    json!(p.display().to_string())
}

fn rack_violation(e: &RackError) -> Option<Value> {
    match e {
        RackError::AxiomR1 { column } => Some(json!({"axiom": "R1", "column": column})),
        RackError::AxiomR2 { a, b, c } => Some(json!({"axiom": "R2", "witness": [a, b, c]})),
        _ => None,
    }
}

/// Parsed rack, or the axiom failure as a validated-false report.
fn rack_or_violation(p: &Path) -> Result<Result<rackext::FinRack, Value>, Failure> {
    match formats::rack_from_json(&read(p)?) {
        Ok(r) => Ok(Ok(r)),
        Err(FormatError::Rack(e)) => match rack_violation(&e) {
            Some(v) => Ok(Err(v)),
            None => Err(FormatError::Rack(e).into()),
        },
        Err(e) => Err(e.into()),
    }
}

fn load_rack(p: &Path) -> Result<rackext::FinRack, Failure> {
    Ok(formats::rack_from_json(&read(p)?)?)
}

fn module_violation(e: &ModuleError) -> Option<Value> {
    let v = match e {
        ModuleError::PhiNotIso { x, y } => json!({"kind": "phi_not_iso", "witness": [x, y]}),
        ModuleError::Square1 { x, y, z } => json!({"kind": "square1", "witness": [x, y, z]}),
        ModuleError::Square2 { x, y, z } => json!({"kind": "square2", "witness": [x, y, z]}),
        ModuleError::Eq1 { x, y, z } => json!({"kind": "eq1", "witness": [x, y, z]}),
        ModuleError::Eq2 { x } => json!({"kind": "eq2", "witness": [x]}),
        ModuleError::ActionIncompatible { x, y } => json!({"kind": "action_incompatible", "witness": [x, y]}),
        ModuleError::NonInvertibleT(msg) => json!({"kind": "non_invertible_t", "message": msg}),
        _ => return None,
    };
    Some(v)
}

fn csv_ints(s: &str, what: &str) -> Result<Vec<Value>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map(|v| json!(v)).map_err(|_| malformed(format!("--{what}: bad integer {t:?}"))))
        .collect()
}

fn upsilon_json(u: &[rackext::Element]) -> Value {
    formats::section_to_json(u)["s"].clone()
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let ext_cap = cli.cap.map_or(caps::EXTENSION_SIZE, |c| c as usize);
    match cli.verb {
        Verb::CheckRack { file } => Ok(match rack_or_violation(&file)? {
            Ok(r) => Outcome::True(json!({"rack": true, "quandle": r.is_quandle(), "orbits": r.orbits()})),
            Err(v) => Outcome::False(json!({"rack": false, "violation": v})),
        }),
        Verb::CheckQuandle { file } => Ok(match rack_or_violation(&file)? {
            Ok(r) => match r.quandle_violation() {
                None => Outcome::True(json!({"rack": true, "quandle": true})),
                Some(a) => Outcome::False(json!({"rack": true, "quandle": false, "witness": a})),
            },
            Err(v) => Outcome::False(json!({"rack": false, "quandle": false, "violation": v})),
        }),
        Verb::Orbits { file } => Ok(Outcome::True(json!({"orbits": load_rack(&file)?.orbits()}))),
        Verb::Opgroup { file } => {
            let r = load_rack(&file)?;
            let cap = cli.cap.map_or(caps::OPERATOR_GROUP, |c| c as usize);
            let g = r.operator_group(cap)?;
            let generators: Vec<Vec<usize>> = (0..r.size()).map(|x| r.translation(x)).collect();
            Ok(Outcome::True(json!({"order": g.order(), "generators": generators, "elements": g.perms})))
        }
        Verb::Asgroup { file } => {
            let p = load_rack(&file)?.associated_group_presentation();
            let relations: Vec<String> = p.relations.iter().map(SignedWord::to_string).collect();
            Ok(Outcome::True(json!({"generators": p.generators, "relations": relations})))
        }
        Verb::Conj { group } => {
            let g = formats::group_from_json(&read(&group)?)?;
            Ok(Outcome::True(formats::rack_to_json(&rackext::FinRack::conj(&g))))
        }
        Verb::Module(ModuleVerb::Check { file }) => {
            let v = read(&file)?;
            match formats::module_from_json(&v, parent(&file)) {
                Ok(m) => {
                    let homogeneous = m.groups().iter().all(|g| g == m.group(0));
                    Ok(Outcome::True(json!({"valid": true, "flavor": m.flavor().to_string(), "homogeneous": homogeneous})))
                }
                Err(FormatError::Module(e)) => match module_violation(&e) {
                    Some(v) => Ok(Outcome::False(json!({"valid": false, "violation": v}))),
                    None => Err(FormatError::Module(e).into()),
                },
                Err(e) => Err(e.into()),
            }
        }
        Verb::Module(ModuleVerb::Make { kind, rack, group, moduli, orbit, action, quandle_variant, flavor }) => {
            let mut spec = serde_json::Map::new();
            spec.insert("kind".into(), json!(kind));
            spec.insert("rack".into(), json!(rack));
            let need = |v: Option<String>, flag: &str| v.ok_or_else(|| malformed(format!("--kind {kind} needs --{flag}")));
            match kind.as_str() {
                "trivial" => {
                    spec.insert("group".into(), Value::Array(csv_ints(&need(group, "group")?, "group")?));
                }
                "dihedral" => {
                    spec.insert("moduli".into(), Value::Array(csv_ints(&need(moduli, "moduli")?, "moduli")?));
                }
                "alexander" => {
                    if orbit.is_empty() {
                        return Err(malformed("--kind alexander needs --orbit N:h0,h1,..."));
                    }
                    let orbits = orbit
                        .iter()
                        .map(|o| {
                            let (n, h) = o.split_once(':').ok_or_else(|| malformed(format!("--orbit {o:?}: expected N:h0,h1,...")))?;
                            let n = csv_ints(n, "orbit")?;
                            Ok(json!({"n": n[0], "h": csv_ints(h, "orbit")?}))
                        })
                        .collect::<Result<Vec<_>, Failure>>()?;
                    spec.insert("orbits".into(), Value::Array(orbits));
                }
                _ => {
                    spec.insert("group".into(), Value::Array(csv_ints(&need(group, "group")?, "group")?));
                    let a: Value = serde_json::from_str(&need(action, "action")?)
                        .map_err(|e| malformed(format!("--action: {e}")))?;
                    spec.insert("action".into(), a);
                    spec.insert("quandle_variant".into(), json!(quandle_variant));
                }
            }
            if let Some(f) = flavor {
                spec.insert("flavor".into(), json!(f));
            }
            let m = formats::module_from_json(&Value::Object(spec), None)?;
            Ok(Outcome::True(formats::module_to_json(&m)))
        }
        Verb::Semidirect { module } => {
            let m = load_module(&module)?;
            Ok(Outcome::True(formats::rack_to_json(ExtensionRack::semidirect(&m, ext_cap)?.rack())))
        }
        Verb::Extend { module, sigma } => {
            let m = load_module(&module)?;
            let s = load_sigma(&m, &sigma)?;
            match ExtensionRack::from_factor_set(&m, &s, ext_cap) {
                Ok(e) => Ok(Outcome::True(formats::rack_to_json(e.rack()))),
                Err(ExtensionError::NotARack(e)) => match rack_violation(&e) {
                    Some(v) => Ok(Outcome::False(json!({"rack": false, "violation": v}))),
                    None => Err(e.into()),
                },
                Err(e) => Err(e.into()),
            }
        }
        Verb::CocycleCheck { module, sigma, quandle } => {
            let m = load_module(&module)?;
            let s = load_sigma(&m, &sigma)?;
            if quandle {
                Ok(match extension::quandle_factor_violation(&m, &s)? {
                    None => Outcome::True(json!({"cocycle": true, "diagonal_zero": true})),
                    Some(QuandleFactorFailure::Cocycle { x, y, z }) => {
                        Outcome::False(json!({"cocycle": false, "witness": [x, y, z]}))
                    }
                    Some(QuandleFactorFailure::Diagonal { x }) => {
                        Outcome::False(json!({"cocycle": true, "diagonal_zero": false, "witness": x}))
                    }
                })
            } else {
                Ok(match extension::cocycle_violation(&m, &s)? {
                    None => Outcome::True(json!({"cocycle": true})),
                    Some((x, y, z)) => Outcome::False(json!({"cocycle": false, "witness": [x, y, z]})),
                })
            }
        }
        Verb::Equivalent { module, sigma1, sigma2 } => {
            let m = load_module(&module)?;
            let (s, t) = (load_sigma(&m, &sigma1)?, load_sigma(&m, &sigma2)?);
            Ok(match extension::are_equivalent(&m, &s, &t)? {
                Some(u) => Outcome::True(json!({"equivalent": true, "upsilon": upsilon_json(&u)})),
                None => Outcome::False(json!({"equivalent": false})),
            })
        }
        Verb::Split { module, sigma } => {
            let m = load_module(&module)?;
            let s = load_sigma(&m, &sigma)?;
            Ok(match extension::is_split(&m, &s)? {
                Some(u) => Outcome::True(json!({"split": true, "upsilon": upsilon_json(&u)})),
                None => Outcome::False(json!({"split": false})),
            })
        }
        Verb::Extract { module, rack, section } => {
            let m = load_module(&module)?;
            let r = load_rack(&rack)?;
            let u = formats::section_from_json(&m, &read(&section)?)?;
            let e = match ExtensionRack::from_labeled_rack(&m, &r, ext_cap) {
                Ok(e) => e,
                Err(ExtensionError::NotAnExtension) => return Ok(Outcome::False(json!({"extension": false}))),
                Err(e) => return Err(e.into()),
            };
            let s = e.extract_factor_set(&e.section_from(&u)?)?;
            Ok(Outcome::True(formats::factor_set_to_json(&s, &module_ref(&module))))
        }
        Verb::Dynamical { rack, alpha } => {
            let r = load_rack(&rack)?;
            let v = read(&alpha)?;
            match formats::dynamical_from_json(&v, parent(&alpha)) {
                Ok(d) => {
                    if d.base() != &r {
                        return Err(malformed("the cocycle refers to a different rack"));
                    }
                    Ok(Outcome::True(formats::rack_to_json(&d.extension()?)))
                }
                Err(FormatError::Extension(ExtensionError::Condition1 { x, y, fixed })) => Ok(Outcome::False(
                    json!({"valid": false, "violation": {"condition": 1, "witness": {"x": x, "y": y, "t": fixed}}}),
                )),
                Err(FormatError::Extension(ExtensionError::Condition2 { x, y, z, s, t, u })) => Ok(Outcome::False(json!({
                    "valid": false,
                    "violation": {"condition": 2, "witness": {"x": x, "y": y, "z": z, "s": s, "t": t, "u": u}}
                }))),
                Err(e) => Err(e.into()),
            }
        }
        Verb::Ext { module, quandle, brute_force } => {
            let m = load_module(&module)?;
            let flavor = if quandle { Flavor::Quandle } else { Flavor::Rack };
            let e = ext_group::ext_group(&m, flavor)?;
            let mut out = formats::ext_result_to_json(&e, &module_ref(&module));
            if brute_force {
                let cap = cli.cap.unwrap_or(caps::BRUTE_FORCE);
                let b = ext_group::brute_force_ext_order(&m, flavor, cap, cli.jobs)?;
                out["brute_force"] = formats::brute_force_to_json(&b);
            }
            Ok(Outcome::True(out))
        }
        Verb::WordAction { module, from, word } => {
            let m = load_module(&module)?;
            if from >= m.base().size() {
                return Err(malformed(format!("--from {from} is not an element")));
            }
            let w: SignedWord = word.parse().map_err(|e: RackError| malformed(e.to_string()))?;
            let (h, t) = m.word_action(from, &w)?;
            let rows: Vec<Vec<Value>> =
                h.matrix().to_rows().iter().map(|r| r.iter().map(formats::int_json).collect()).collect();
            Ok(Outcome::True(json!({"from": from, "word": w.to_string(), "matrix": rows, "terminal": t})))
        }
        Verb::Catalog { rack, module } => {
            if let Some(name) = rack {
                let r = catalog::rack(&name).ok_or_else(|| malformed(format!("no catalog rack {name:?}")))?;
                return Ok(Outcome::True(formats::rack_to_json(&r)));
            }
            if let Some(name) = module {
                let c = catalog::module(&name).ok_or_else(|| malformed(format!("no catalog module {name:?}")))?;
                return Ok(Outcome::True(formats::module_to_json(&c.module)));
            }
            let racks: Vec<&str> = catalog::racks().iter().map(|(n, _)| *n).collect();
            let modules: Vec<Value> = catalog::modules()
                .iter()
                .map(|c| json!({"name": c.name, "rack": c.rack, "flavor": c.module.flavor().to_string()}))
                .collect();
            Ok(Outcome::True(json!({"racks": racks, "modules": modules})))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        let code = if e.use_stderr() { 2 } else { 0 };
        let _ = e.print();
        std::process::exit(code);
    });
    match run(cli) {
        Ok(Outcome::True(v)) => {
            print!("{}", formats::to_pretty(&v));
            ExitCode::SUCCESS
        }
        Ok(Outcome::False(v)) => {
            print!("{}", formats::to_pretty(&v));
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
