//! Multiplicities of every irreducible of `GL_n(F_q)` in the Klyachko models
//! `M_{n−2k,2k}`, and the resulting Gelfand-model report.

use serde::{Deserialize, Serialize};

use crate::arena::ModularArena;
use crate::character::{
    self, character_table, CharacterError, CharacterTable, TableOptions,
};
use crate::field::FiniteField;
use crate::gl::{GroupTable, Limits};
use crate::klyachko::KlyachkoSubgroupSpec;
use crate::parallel::Execution;

#[derive(Debug, Clone)]
pub struct GelfandOptions {
    pub limits: Limits,
    pub ell: Option<u64>,
    pub psi_choice: u32,
    pub table: TableOptions,
    pub exec: Execution,
}

impl Default for GelfandOptions {
    fn default() -> Self {
        GelfandOptions {
            limits: Limits::default(),
            ell: None,
            psi_choice: 1,
            table: TableOptions::default(),
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GelfandRow {
    pub irreducible: usize,
    pub dim: u64,
    /// `(k, m_{n−2k,2k}(π))` for `k = 0..=⌊n/2⌋`.
    pub mults: Vec<(usize, u64)>,
    pub total: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GelfandFlags {
    /// Every irreducible occurs in some model.
    pub existence: bool,
    /// Every irreducible occurs in at most one model.
    pub disjointness: bool,
    /// No irreducible occurs twice in one model.
    pub uniqueness: bool,
    /// Every irreducible occurs exactly once in the sum of all models.
    pub gelfand: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionCheck {
    /// `Σ_k [G : H_{n−2k,2k}]`.
    pub model_total: u64,
    /// `Σ_π dim π`.
    pub irreducible_total: u64,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GelfandReport {
    pub version: String,
    pub n: usize,
    pub q: u32,
    pub ell: u64,
    pub psi_seed: u32,
    pub eigen_seed: u64,
    pub group_order: u64,
    pub class_count: usize,
    pub dims: Vec<u64>,
    /// `(k, [G : H_{n−2k,2k}])`.
    pub model_dims: Vec<(usize, u64)>,
    pub rows: Vec<GelfandRow>,
    pub flags: GelfandFlags,
    pub dim_check: DimensionCheck,
}

/// Report for an already built table and character table.
pub fn gelfand_report(
    table: &GroupTable,
    ct: &CharacterTable,
    psi_choice: u32,
    exec: Execution,
) -> Result<GelfandReport, CharacterError> {
    let arena: &ModularArena = &ct.arena;
    let n = table.n();
    let order = table.order();
    let mut models = Vec::new();
    for k in 0..=n / 2 {
        let spec = KlyachkoSubgroupSpec::for_n(n, k).with_psi(psi_choice);
        let (chi, h) = character::induced_klyachko_character(table, &spec, arena, exec)?;
        let index = order / h;
        if chi.values[0] != arena.from_u64(index) {
            return Err(CharacterError::Orthogonality(format!(
                "induced character for k = {k} has dimension residue {} instead of {index}",
                chi.values[0]
            )));
        }
        models.push((k, index, chi));
    }
    let rows = ct
        .characters
        .iter()
        .zip(&ct.degrees)
        .enumerate()
        .map(|(i, (irr, &dim))| {
            let mults = models
                .iter()
                .map(|(k, index, chi)| {
                    character::multiplicity(table, arena, irr, chi, *index).map(|m| (*k, m))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let total = mults.iter().map(|(_, m)| m).sum();
            Ok(GelfandRow {
                irreducible: i,
                dim,
                mults,
                total,
            })
        })
        .collect::<Result<Vec<_>, CharacterError>>()?;
    let flags = GelfandFlags {
        existence: rows.iter().all(|r| r.total >= 1),
        disjointness: rows
            .iter()
            .all(|r| r.mults.iter().filter(|(_, m)| *m > 0).count() <= 1),
        uniqueness: rows.iter().all(|r| r.mults.iter().all(|(_, m)| *m <= 1)),
        gelfand: rows.iter().all(|r| r.total == 1),
    };
    let model_total = models.iter().map(|(_, idx, _)| idx).sum();
    let irreducible_total = ct.degrees.iter().sum();
    Ok(GelfandReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        n,
        q: table.field().q(),
        ell: arena.ell(),
        psi_seed: psi_choice,
        eigen_seed: ct.seed,
        group_order: order,
        class_count: table.class_count(),
        dims: ct.degrees.clone(),
        model_dims: models.iter().map(|(k, idx, _)| (*k, *idx)).collect(),
        rows,
        flags,
        dim_check: DimensionCheck {
            model_total,
            irreducible_total,
            equal: model_total == irreducible_total,
        },
    })
}

/// Builds `GL_n(F_q)`, its character table and the full multiplicity matrix.
pub fn verify_gelfand(n: usize, q: u32, options: &GelfandOptions) -> Result<GelfandReport, CharacterError> {
    let field = FiniteField::of_order(q, options.limits.max_field_order)?;
    let table = GroupTable::build(n, field, &options.limits, options.exec)?;
    verify_gelfand_on(&table, options)
}

/// [`verify_gelfand`] on a prebuilt (possibly cached) table.
pub fn verify_gelfand_on(table: &GroupTable, options: &GelfandOptions) -> Result<GelfandReport, CharacterError> {
    let arena = character::arena_for(table, options.ell)?;
    let ct = character_table(table, &arena, options.table, options.exec)?;
    gelfand_report(table, &ct, options.psi_choice, options.exec)
}
