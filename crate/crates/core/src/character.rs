//! Character tables, induced characters and multiplicities, all computed
//! exactly inside a [`ModularArena`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::linalg::{self, Mat};
use crate::arena::{ArenaError, ModularArena};
use crate::field::FieldError;
use crate::gl::{GroupError, GroupTable};
use crate::klyachko::{self, KlyachkoSubgroupSpec, SubgroupError};
use crate::matrix::MatrixGF;
use crate::parallel::{self, Execution};

/// Seed of the generator drawing the eigenspace-splitting combinations.
pub const DEFAULT_EIGEN_SEED: u64 = 0x4b4c_5941;
pub const DEFAULT_SPLIT_ATTEMPTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharacterError {
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Subgroup(#[from] SubgroupError),
    #[error("class functions live in different arenas or have different lengths")]
    ArenaMismatch,
    #[error("common eigenspaces did not split after {attempts} attempts ({remaining} subspaces left)")]
    EigenSplitFailure { attempts: usize, remaining: usize },
    #[error("class-sum operator is not diagonalisable over F_{ell}")]
    NotDiagonalisable { ell: u64 },
    #[error("character degree does not lift to an integer (residue {residue})")]
    DegreeLift { residue: u64 },
    #[error("inner product residue {residue} does not lift into [0, {bound}]")]
    LiftOutOfRange { residue: u64, bound: u64 },
    #[error("orthogonality check failed: {0}")]
    Orthogonality(String),
}

/// One residue per conjugacy class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFunction {
    pub ell: u64,
    pub values: Vec<u64>,
}

impl ClassFunction {
    pub fn at(&self, class: usize) -> u64 {
        self.values[class]
    }

    /// Signed lift of each value; meaningful only for integer-valued functions.
    pub fn signed_values(&self, arena: &ModularArena) -> Vec<i64> {
        self.values.iter().map(|&v| arena.lift_signed(v)).collect()
    }
}

/// `|G|⁻¹ Σ_c |c| χ(c) ψ(c⁻¹)` as a residue.
pub fn inner_product(
    table: &GroupTable,
    arena: &ModularArena,
    chi: &ClassFunction,
    psi: &ClassFunction,
) -> Result<u64, CharacterError> {
    let classes = table.classes();
    if chi.ell != arena.ell()
        || psi.ell != arena.ell()
        || chi.values.len() != classes.len()
        || psi.values.len() != classes.len()
    {
        return Err(CharacterError::ArenaMismatch);
    }
    let sum = classes.iter().enumerate().fold(0, |acc, (c, class)| {
        let term = arena.mul(
            arena.from_u64(class.size),
            arena.mul(chi.values[c], psi.values[class.inverse_class]),
        );
        arena.add(acc, term)
    });
    Ok(arena.mul(sum, arena.inv(arena.from_u64(table.order()))))
}

/// Multiplicity of an irreducible in a model character, lifted to `[0, bound]`.
pub fn multiplicity(
    table: &GroupTable,
    arena: &ModularArena,
    irreducible: &ClassFunction,
    model: &ClassFunction,
    bound: u64,
) -> Result<u64, CharacterError> {
    let residue = inner_product(table, arena, model, irreducible)?;
    if residue > bound {
        return Err(CharacterError::LiftOutOfRange { residue, bound });
    }
    Ok(residue)
}

/// The arena sized for a class-computed table.
pub fn arena_for(table: &GroupTable, ell_override: Option<u64>) -> Result<ModularArena, CharacterError> {
    Ok(ModularArena::new(
        table.exponent(),
        table.field().p(),
        table.order(),
        ell_override,
    )?)
}

/// Class multiplication coefficients: `coeffs[j][i][k]` counts pairs
/// `(x, y) ∈ C_j × C_i` with `xy = g_k`.
pub fn class_structure_constants(table: &GroupTable, exec: Execution) -> Vec<Vec<Vec<u64>>> {
    let n = table.class_count();
    let columns = parallel::map_range(exec, n, |k| {
        let gk = &table.classes()[k].representative;
        let mut col = vec![vec![0u64; n]; n];
        for x in 0..table.elements().len() {
            let xinv = table.element(table.inverse_index(x));
            let y = xinv.mul(gk, table.field());
            let ci = table.class_of_matrix(&y).unwrap();
            col[table.class_of(x)][ci] += 1;
        }
        col
    });
    (0..n)
        .map(|j| (0..n).map(|i| (0..n).map(|k| columns[k][j][i]).collect()).collect())
        .collect()
}

/// Irreducible characters with their integer degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterTable {
    pub arena: ModularArena,
    pub degrees: Vec<u64>,
    pub characters: Vec<ClassFunction>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct TableOptions {
    pub seed: u64,
    pub max_attempts: usize,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            seed: DEFAULT_EIGEN_SEED,
            max_attempts: DEFAULT_SPLIT_ATTEMPTS,
        }
    }
}

/// Restriction of an invariant subspace's operator: `basis` rows are in
/// reduced echelon form with the given pivots.
fn restricted(arena: &ModularArena, op: &Mat, basis: &[Vec<u64>], pivots: &[usize]) -> Mat {
    let d = basis.len();
    let images: Vec<Vec<u64>> = basis.iter().map(|b| linalg::mat_vec(arena, op, b)).collect();
    (0..d)
        .map(|j| (0..d).map(|i| images[i][pivots[j]]).collect())
        .collect()
}

/// Splits an invariant subspace by the eigenspaces of `op`.
fn split(
    arena: &ModularArena,
    op: &Mat,
    basis: Vec<Vec<u64>>,
) -> Result<Vec<Vec<Vec<u64>>>, CharacterError> {
    let mut echelon = basis;
    let pivots = linalg::rref(arena, &mut echelon);
    let r = restricted(arena, op, &echelon, &pivots);
    let cp = linalg::charpoly(arena, &r);
    let eigenvalues = linalg::roots(arena, &cp);
    let mut parts = Vec::new();
    let mut total = 0;
    for lambda in eigenvalues {
        let shifted: Mat = r
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, &x)| if i == j { arena.sub(x, lambda) } else { x })
                    .collect()
            })
            .collect();
        let kernel = linalg::nullspace(arena, &shifted);
        total += kernel.len();
        let vectors = kernel
            .iter()
            .map(|y| {
                let mut v = vec![0; echelon[0].len()];
                for (coef, b) in y.iter().zip(&echelon) {
                    for (slot, &x) in v.iter_mut().zip(b) {
                        *slot = arena.add(*slot, arena.mul(*coef, x));
                    }
                }
                v
            })
            .collect();
        parts.push(vectors);
    }
    if total != echelon.len() {
        return Err(CharacterError::NotDiagonalisable { ell: arena.ell() });
    }
    Ok(parts)
}

/// Computes all irreducible characters from common eigenvectors of the class
/// multiplication operators.
pub fn character_table(
    table: &GroupTable,
    arena: &ModularArena,
    options: TableOptions,
    exec: Execution,
) -> Result<CharacterTable, CharacterError> {
    table.require_classes()?;
    if arena.ell() <= 2 * table.order() {
        return Err(ArenaError::ArenaTooSmall {
            ell: arena.ell(),
            m: arena.root_order(),
            bound: 2 * table.order(),
        }
        .into());
    }
    let n = table.class_count();
    let coeffs = class_structure_constants(table, exec);
    let ops: Vec<Mat> = coeffs
        .iter()
        .map(|m| m.iter().map(|row| row.iter().map(|&c| arena.from_u64(c)).collect()).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let identity: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as u64).collect())
        .collect();
    let mut pending = vec![identity];
    let mut done: Vec<Vec<u64>> = Vec::new();
    let mut attempts = 0;
    while let Some(space) = pending.pop() {
        if space.len() == 1 {
            done.push(space.into_iter().next().unwrap());
            continue;
        }
        if attempts >= options.max_attempts {
            return Err(CharacterError::EigenSplitFailure {
                attempts,
                remaining: pending.len() + 1,
            });
        }
        attempts += 1;
        let mut combo: Mat = vec![vec![0; n]; n];
        for op in &ops {
            let c = rng.gen_range(0..arena.ell());
            for (crow, orow) in combo.iter_mut().zip(op) {
                for (x, &y) in crow.iter_mut().zip(orow) {
                    *x = arena.add(*x, arena.mul(c, y));
                }
            }
        }
        pending.extend(split(arena, &combo, space)?);
    }

    let classes = table.classes();
    let order = table.order();
    let mut chars: Vec<(u64, ClassFunction)> = done
        .into_iter()
        .map(|v| {
            // central character ω with ω(identity class) = 1
            let scale = arena.inv(v[0]);
            let omega: Vec<u64> = v.iter().map(|&x| arena.mul(x, scale)).collect();
            let s = classes.iter().enumerate().fold(0, |acc, (k, c)| {
                let t = arena.mul(
                    arena.mul(omega[k], omega[c.inverse_class]),
                    arena.inv(arena.from_u64(c.size)),
                );
                arena.add(acc, t)
            });
            let deg_sq = arena.mul(arena.from_u64(order), arena.inv(s));
            let deg = integer_sqrt(deg_sq)
                .filter(|d| d * d == deg_sq && order % d == 0)
                .ok_or(CharacterError::DegreeLift { residue: deg_sq })?;
            let values = classes
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    arena.mul(
                        arena.mul(arena.from_u64(deg), omega[k]),
                        arena.inv(arena.from_u64(c.size)),
                    )
                })
                .collect();
            Ok((
                deg,
                ClassFunction {
                    ell: arena.ell(),
                    values,
                },
            ))
        })
        .collect::<Result<_, CharacterError>>()?;
    chars.sort_by(|(da, a), (db, b)| {
        let ta = a.values.iter().any(|&x| x != 1);
        let tb = b.values.iter().any(|&x| x != 1);
        (da, ta, &a.values).cmp(&(db, tb, &b.values))
    });
    let result = CharacterTable {
        arena: arena.clone(),
        degrees: chars.iter().map(|(d, _)| *d).collect(),
        characters: chars.into_iter().map(|(_, c)| c).collect(),
        seed: options.seed,
    };
    verify_table(table, &result)?;
    Ok(result)
}

fn integer_sqrt(v: u64) -> Option<u64> {
    let r = (v as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).find(|&x| x * x == v)
}

/// Row orthogonality, column orthogonality and `Σ χ(1)² = |G|`, exact in
/// the arena.
pub fn verify_table(table: &GroupTable, ct: &CharacterTable) -> Result<(), CharacterError> {
    let arena = &ct.arena;
    let classes = table.classes();
    let n = classes.len();
    if ct.characters.len() != n {
        return Err(CharacterError::Orthogonality(format!(
            "{} characters for {} classes",
            ct.characters.len(),
            n
        )));
    }
    for (i, a) in ct.characters.iter().enumerate() {
        if a.values[0] != arena.from_u64(ct.degrees[i]) {
            return Err(CharacterError::Orthogonality(format!(
                "character {i} has inconsistent degree"
            )));
        }
        for (j, b) in ct.characters.iter().enumerate() {
            let ip = inner_product(table, arena, a, b)?;
            if ip != (i == j) as u64 {
                return Err(CharacterError::Orthogonality(format!(
                    "<chi_{i}, chi_{j}> = {ip}"
                )));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let inv_b = classes[b].inverse_class;
            let s = ct.characters.iter().fold(0, |acc, chi| {
                arena.add(acc, arena.mul(chi.values[a], chi.values[inv_b]))
            });
            let want = if a == b {
                arena.from_u64(table.order() / classes[a].size)
            } else {
                0
            };
            if s != want {
                return Err(CharacterError::Orthogonality(format!(
                    "columns {a} and {b}"
                )));
            }
        }
    }
    let sum_sq: u64 = ct.degrees.iter().map(|d| d * d).sum();
    if sum_sq != table.order() {
        return Err(CharacterError::Orthogonality(format!(
            "sum of squared degrees {sum_sq} != |G| = {}",
            table.order()
        )));
    }
    Ok(())
}

/// Induced character from a subgroup given by a predicate returning the
/// `ψ`-exponent of members, by the conjugation formula
/// `χ(g) = |H|⁻¹ Σ_{x ∈ G, xgx⁻¹ ∈ H} ζ_p^{ψ(xgx⁻¹)}`.
pub fn induced_character<F>(
    table: &GroupTable,
    arena: &ModularArena,
    subgroup_order: u64,
    psi_choice: u32,
    member_exponent: F,
    exec: Execution,
) -> Result<ClassFunction, CharacterError>
where
    F: Fn(&MatrixGF) -> Option<u32> + Sync + Send,
{
    table.require_classes()?;
    let p = table.field().p() as usize;
    let f = table.field();
    let values = table
        .classes()
        .iter()
        .map(|class| {
            let g = &class.representative;
            let counts = parallel::fold_range(
                exec,
                table.elements().len(),
                || vec![0u64; p],
                |mut acc, x| {
                    let conj = table
                        .element(x)
                        .mul(g, f)
                        .mul(table.element(table.inverse_index(x)), f);
                    if let Some(e) = member_exponent(&conj) {
                        acc[e as usize] += 1;
                    }
                    acc
                },
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
            weighted_root_sum(arena, &counts, psi_choice, subgroup_order)
        })
        .collect();
    Ok(ClassFunction {
        ell: arena.ell(),
        values,
    })
}

/// `|H|⁻¹ Σ_e counts[e] ζ_p^{choice·e}`.
fn weighted_root_sum(arena: &ModularArena, counts: &[u64], choice: u32, subgroup_order: u64) -> u64 {
    let s = counts.iter().enumerate().fold(0, |acc, (e, &c)| {
        let root = arena.zeta_p_pow(e as u64 * choice as u64);
        arena.add(acc, arena.mul(arena.from_u64(c), root))
    });
    arena.mul(s, arena.inv(arena.from_u64(subgroup_order)))
}

/// Induced character computed from class sums instead of conjugation:
/// `χ(g) = |C_G(g)| |H|⁻¹ Σ_{y ∈ class(g) ∩ H} ζ_p^{ψ(y)}`.
pub fn induced_character_by_classes<F>(
    table: &GroupTable,
    arena: &ModularArena,
    subgroup_order: u64,
    psi_choice: u32,
    member_exponent: F,
) -> Result<ClassFunction, CharacterError>
where
    F: Fn(&MatrixGF) -> Option<u32>,
{
    table.require_classes()?;
    let p = table.field().p() as usize;
    let mut counts = vec![vec![0u64; p]; table.class_count()];
    for (i, g) in table.elements().iter().enumerate() {
        if let Some(e) = member_exponent(g) {
            counts[table.class_of(i)][e as usize] += 1;
        }
    }
    let values = table
        .classes()
        .iter()
        .zip(&counts)
        .map(|(class, cnt)| {
            let centralizer = arena.from_u64(table.order() / class.size);
            arena.mul(centralizer, weighted_root_sum(arena, cnt, psi_choice, subgroup_order))
        })
        .collect();
    Ok(ClassFunction {
        ell: arena.ell(),
        values,
    })
}

/// `Ind_{H_{r,2k}}^{G}(ψ_r)` together with `|H|`.
pub fn induced_klyachko_character(
    table: &GroupTable,
    spec: &KlyachkoSubgroupSpec,
    arena: &ModularArena,
    exec: Execution,
) -> Result<(ClassFunction, u64), CharacterError> {
    let p = table.field().p();
    if spec.psi_choice == 0 || spec.psi_choice >= p {
        return Err(SubgroupError::BadPsiChoice(spec.psi_choice).into());
    }
    let members = klyachko::enumerate_subgroup(table, spec, exec)?;
    let h_order = members.len() as u64;
    let f = table.field();
    let chi = induced_character(
        table,
        arena,
        h_order,
        spec.psi_choice,
        |g| {
            klyachko::h_membership(g, spec, f)
                .unwrap_or(false)
                .then(|| klyachko::psi_exponent_unchecked(g, spec, f))
        },
        exec,
    )?;
    Ok((chi, h_order))
}
