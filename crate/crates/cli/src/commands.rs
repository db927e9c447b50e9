//! Subcommand implementations. Each returns both a JSON document and a text
//! rendering; `main` picks one.

use std::fmt::Write as _;
use std::path::PathBuf;

use klyachko_core::arena::ArenaError;
use klyachko_core::cache::{self, CacheError, CacheStatus};
use klyachko_core::character::{self, CharacterError, TableOptions};
use klyachko_core::field::{FieldError, FiniteField};
use klyachko_core::gelfand::{self, GelfandOptions, GelfandReport};
use klyachko_core::gl::{GroupError, GroupTable, Limits};
use klyachko_core::klyachko::SubgroupError;
use klyachko_core::param::{format_parameter, format_product, parse_parameter, ParseError};
use klyachko_core::parallel::Execution;
use klyachko_core::period::{self, PeriodError};
use klyachko_core::segment::{self, TadicParameter};
use klyachko_core::weyl::{self, WeylError};
use serde_json::{json, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_GELFAND: u8 = 1;
pub const EXIT_RESOURCE: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;
pub const EXIT_INPUT: u8 = 4;

pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub code: u8,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl ToString) -> Self {
        CliError {
            code,
            message: message.to_string(),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        let code = match e {
            FieldError::FieldTooLarge { .. } => EXIT_RESOURCE,
            FieldError::NoIrreduciblePolynomial(_) => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        CliError::new(code, e)
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        let code = match e {
            GroupError::GroupTooLarge { .. } => EXIT_RESOURCE,
            GroupError::ZeroSize => EXIT_INPUT,
            GroupError::ClassesMissing => EXIT_INTERNAL,
        };
        CliError::new(code, e)
    }
}

impl From<CharacterError> for CliError {
    fn from(e: CharacterError) -> Self {
        match e {
            CharacterError::Field(f) => f.into(),
            CharacterError::Group(g) => g.into(),
            CharacterError::Arena(ArenaError::ArenaTooSmall { .. }) => CliError::new(EXIT_INPUT, e),
            CharacterError::Arena(ArenaError::NoPrime) => CliError::new(EXIT_RESOURCE, e),
            CharacterError::Subgroup(SubgroupError::BadPsiChoice(_)) => CliError::new(EXIT_INPUT, e),
            other => CliError::new(EXIT_INTERNAL, other),
        }
    }
}

impl From<CacheError> for CliError {
    fn from(e: CacheError) -> Self {
        match e {
            CacheError::Group(g) => g.into(),
            other => CliError::new(EXIT_RESOURCE, format!("cache: {other}")),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::new(EXIT_INPUT, e)
    }
}

impl From<PeriodError> for CliError {
    fn from(e: PeriodError) -> Self {
        CliError::new(EXIT_INPUT, e)
    }
}

impl From<WeylError> for CliError {
    fn from(e: WeylError) -> Self {
        CliError::new(EXIT_INPUT, e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct GroupConfig {
    pub n: usize,
    pub q: u32,
    pub ell: Option<u64>,
    pub max_elements: u64,
    pub max_q: u32,
    pub cache_dir: Option<PathBuf>,
    pub seed: u64,
    pub sequential: bool,
}

impl GroupConfig {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn limits(&self) -> Limits {
        Limits {
            max_elements: self.max_elements,
            max_field_order: self.max_q,
        }
    }

    fn load(&self) -> Result<(GroupTable, CacheStatus)> {
        let field = FiniteField::of_order(self.q, self.max_q)?;
        let (table, status) =
            cache::load_or_build(self.cache_dir.as_deref(), self.n, field, &self.limits(), self.exec())?;
        Ok((table, status))
    }
}

fn cache_word(s: CacheStatus) -> &'static str {
    match s {
        CacheStatus::Hit => "hit",
        CacheStatus::Miss => "miss",
        CacheStatus::Disabled => "disabled",
    }
}

pub fn verify_gelfand(cfg: &GroupConfig, psi: u32) -> Result<Outcome> {
    if cfg.n == 0 {
        return Err(GroupError::ZeroSize.into());
    }
    let (table, status) = cfg.load()?;
    let opts = GelfandOptions {
        limits: cfg.limits(),
        ell: cfg.ell,
        psi_choice: psi,
        table: TableOptions {
            seed: cfg.seed,
            ..TableOptions::default()
        },
        exec: cfg.exec(),
    };
    let report = gelfand::verify_gelfand_on(&table, &opts)?;
    let code = if report.flags.gelfand { EXIT_OK } else { EXIT_NOT_GELFAND };
    let mut json = serde_json::to_value(&report).expect("report serialises");
    json["cache"] = json!(cache_word(status));
    Ok(Outcome {
        text: gelfand_text(&report),
        json,
        code,
    })
}

fn gelfand_text(r: &GelfandReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "GL_{}(F_{}): |G| = {}, {} classes", r.n, r.q, r.group_order, r.class_count);
    let _ = writeln!(s, "arena ell = {}, psi = {}, eigen seed = {:#x}", r.ell, r.psi_seed, r.eigen_seed);
    let models: Vec<String> = r
        .model_dims
        .iter()
        .map(|(k, d)| format!("M_{{{},{}}}: {d}", r.n - 2 * k, 2 * k))
        .collect();
    let _ = writeln!(s, "model dimensions: {}", models.join(", "));
    let head: Vec<String> = r.model_dims.iter().map(|(k, _)| format!("k={k}")).collect();
    let _ = writeln!(s, "{:>4} {:>6}  {}  total", "pi", "dim", head.join(" "));
    for row in &r.rows {
        let ms: Vec<String> = row.mults.iter().map(|(_, m)| format!("{m:>3}")).collect();
        let _ = writeln!(s, "{:>4} {:>6}  {}  {:>5}", row.irreducible, row.dim, ms.join(" "), row.total);
    }
    let f = r.flags;
    let _ = writeln!(
        s,
        "existence {}, disjointness {}, uniqueness {}, gelfand {}",
        f.existence, f.disjointness, f.uniqueness, f.gelfand
    );
    let _ = writeln!(
        s,
        "sum of model dimensions {} vs sum of irreducible dimensions {}: {}",
        r.dim_check.model_total,
        r.dim_check.irreducible_total,
        if r.dim_check.equal { "equal" } else { "different" }
    );
    s
}

pub fn table(cfg: &GroupConfig) -> Result<Outcome> {
    if cfg.n == 0 {
        return Err(GroupError::ZeroSize.into());
    }
    let (table, status) = cfg.load()?;
    let arena = character::arena_for(&table, cfg.ell)?;
    let opts = TableOptions {
        seed: cfg.seed,
        ..TableOptions::default()
    };
    let ct = character::character_table(&table, &arena, opts, cfg.exec())?;
    let classes = cache::classes_json(&table);
    let json = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "n": table.n(),
        "q": table.field().q(),
        "ell": arena.ell(),
        "root_order": arena.root_order(),
        "zeta": arena.zeta_m(),
        "eigen_seed": ct.seed,
        "cache": cache_word(status),
        "group_order": table.order(),
        "classes": classes.classes,
        "degrees": ct.degrees,
        "characters": ct.characters.iter().map(|c| &c.values).collect::<Vec<_>>(),
    });
    let mut s = String::new();
    let _ = writeln!(
        s,
        "GL_{}(F_{}): |G| = {}, values in F_{} with zeta_{} = {}",
        table.n(),
        table.field().q(),
        table.order(),
        arena.ell(),
        arena.root_order(),
        arena.zeta_m()
    );
    for (i, c) in classes.classes.iter().enumerate() {
        let _ = writeln!(
            s,
            "class {i}: size {}, order {}, invariant factors [{}]",
            c.size,
            c.element_order,
            c.invariant_factors.join("; ")
        );
    }
    for (d, chi) in ct.degrees.iter().zip(&ct.characters) {
        let vals: Vec<String> = chi.values.iter().map(|v| format!("{v:>5}")).collect();
        let _ = writeln!(s, "dim {d:>4}: {}", vals.join(" "));
    }
    Ok(Outcome { json, text: s, code: EXIT_OK })
}

fn blocks_json(p: &TadicParameter) -> Value {
    Value::Array(
        p.blocks()
            .iter()
            .map(|b| {
                json!({
                    "label": b.block.rho.name,
                    "degree": b.block.rho.degree,
                    "dual": b.block.rho.dual,
                    "self_dual": b.block.rho.self_dual,
                    "d": b.block.d,
                    "t": b.block.t,
                    "alpha": b.block.alpha.to_string(),
                    "paired": b.paired,
                })
            })
            .collect(),
    )
}

pub fn kappa(input: &str, expected_n: Option<u64>) -> Result<Outcome> {
    let p = parse_parameter(input)?;
    let n = p.degree();
    if let Some(e) = expected_n {
        if e != n {
            return Err(CliError::new(
                EXIT_INPUT,
                format!("degree mismatch: parameter has n = {n}, expected {e}"),
            ));
        }
    }
    let ty = segment::kappa(&p);
    let dual = segment::dual_model_type(ty);
    let unitary = segment::validate_unitary(&p);
    let contra = segment::contragredient(&p);
    let json = json!({
        "parameter": format_parameter(&p),
        "n": n,
        "blocks": blocks_json(&p),
        "kappa": {"r": ty.r, "k": ty.k},
        "model": ty.model(),
        "dual_model": dual.model(),
        "contragredient": format_parameter(&contra),
        "unitary_valid": unitary,
    });
    let mut s = String::new();
    let _ = writeln!(s, "parameter: {}", format_parameter(&p));
    let _ = writeln!(s, "n = {n}, (r, k) = ({}, {})", ty.r, ty.k);
    let _ = writeln!(s, "model: {}", ty.model());
    let _ = writeln!(s, "contragredient: {}", format_parameter(&contra));
    let _ = writeln!(s, "dual model: {}", dual.model());
    let _ = writeln!(s, "unitary: {unitary}");
    Ok(Outcome { json, text: s, code: EXIT_OK })
}

pub fn derive(input: &str) -> Result<Outcome> {
    let p = parse_parameter(input)?;
    let mut blocks = p.speh_factors();
    let mut steps = Vec::new();
    let mut s = String::new();
    let _ = writeln!(s, "{}  (n = {})", format_product(&blocks), p.degree());
    while !blocks.is_empty() {
        let (order, next) = segment::product_highest_derivative(&blocks)
            .map_err(|e| CliError::new(EXIT_INTERNAL, e))?;
        let n: u64 = next.iter().map(|b| b.degree()).sum();
        let _ = writeln!(s, "  -> order {order}: {}  (n = {n})", format_product(&next));
        steps.push(json!({"order": order, "parameter": format_product(&next), "n": n}));
        blocks = next;
    }
    let total: u64 = steps.iter().map(|st| st["order"].as_u64().unwrap()).sum();
    let json = json!({
        "parameter": format_parameter(&p),
        "n": p.degree(),
        "steps": steps,
        "total_order": total,
    });
    Ok(Outcome { json, text: s, code: EXIT_OK })
}

const NORMALIZATION: &str = "up to measure normalization";

pub fn period(t: u32, zeta: bool, tol: f64) -> Result<Outcome> {
    let expr = period::period_formula(t)?;
    let mut json = json!({
        "t": t,
        "formula": expr.to_string(),
        "tree": expr.to_json(),
        "normalization": NORMALIZATION,
    });
    let mut s = format!("t = {t}: {expr}\n");
    if t >= 2 {
        let norm = period::norm_constant(t)?;
        json["norm_constant"] = json!(norm.to_string());
        let _ = writeln!(s, "norm constant: {norm}");
    }
    if t >= 3 && t % 2 == 1 {
        let eig = period::intertwining_eigenvalue(t)?;
        json["intertwining_eigenvalue"] = json!(eig.to_string());
        let _ = writeln!(s, "intertwining eigenvalue: {eig}");
    }
    if zeta {
        if !(tol > 0.0) {
            return Err(CliError::new(EXIT_INPUT, "--tol must be positive"));
        }
        let assignment = period::zeta_assignment(&expr, tol)?;
        let value = period::evaluate_period(&expr, &assignment)?.to_f64();
        let mut atoms: Vec<_> = assignment.iter().map(|(a, v)| (a.to_string(), v.to_f64())).collect();
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        json["value"] = json!(value);
        json["assignment"] = Value::Object(atoms.iter().map(|(k, v)| (k.clone(), json!(v))).collect());
        json["tolerance"] = json!(tol);
        let _ = writeln!(s, "value with L(j) = zeta(j), Res = Alpha = 1: {value:.10} ({NORMALIZATION})");
    }
    Ok(Outcome { json, text: s, code: EXIT_OK })
}

pub fn residue_survival(t: usize) -> Result<Outcome> {
    let report = weyl::residue_survival(t)?;
    let mu = weyl::mu_q(report.m)?;
    let mut json = serde_json::to_value(&report).expect("report serialises");
    json["mu_q"] = json!(mu.0.iter().map(|x| x.to_string()).collect::<Vec<_>>());
    let mut s = String::new();
    let _ = writeln!(s, "t = {t}, m = {}, required pole order {}", report.m, report.required_order);
    for r in &report.rows {
        let _ = writeln!(
            s,
            "i = {:>2} {:<12} set {:?} descents {:?} order {} {}",
            r.i,
            r.element,
            r.pole_set,
            r.descents,
            r.pole_order,
            if r.survives { "survives" } else { "vanishes" }
        );
    }
    let _ = writeln!(s, "mu_Q = {mu}");
    Ok(Outcome { json, text: s, code: EXIT_OK })
}
