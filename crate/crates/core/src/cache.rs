//! On-disk cache of enumerated group tables and a JSON view of the classes.
//!
//! Binary layout, all integers little-endian:
//!
//! ```text
//! magic "KLYG" | version u32 | n u32 | p u32 | e u32 | count u64
//! count × element code u64
//! count × class label u32
//! ```

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::field::FiniteField;
use crate::gl::{gl_order, GroupError, GroupTable, Limits};
use crate::parallel::Execution;

pub const MAGIC: [u8; 4] = *b"KLYG";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 * 4 + 8;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported cache version {0}")]
    Version(u32),
    #[error("cache holds GL_{n}(F_{p}^{e}) but another group was requested")]
    WrongGroup { n: u32, p: u32, e: u32 },
    #[error("cache is corrupt: {0}")]
    Corrupt(&'static str),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Whether [`load_or_build`] reused a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    Disabled,
}

pub fn cache_path(dir: &Path, n: usize, field: &FiniteField) -> PathBuf {
    dir.join(format!("gl{}_p{}e{}.klyc", n, field.p(), field.e()))
}

pub fn write_cache(table: &GroupTable, path: &Path) -> Result<(), CacheError> {
    table.require_classes()?;
    let count = table.codes().len();
    let mut buf = Vec::with_capacity(HEADER_LEN + count * 12);
    buf.extend_from_slice(&MAGIC);
    for v in [VERSION, table.n() as u32, table.field().p(), table.field().e()] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&(count as u64).to_le_bytes());
    for c in table.codes() {
        buf.extend_from_slice(&c.to_le_bytes());
    }
    for l in table.class_labels() {
        buf.extend_from_slice(&l.to_le_bytes());
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    // write then rename so readers never see a partial file
    let tmp = path.with_extension("tmp");
    fs::File::create(&tmp)?.write_all(&buf)?;
    fs::rename(tmp, path)?;
    Ok(())
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn u64_at(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

/// Reads a cache file for `GL_n` over `field`, validating the header and the
/// payload shape.
pub fn read_cache(
    path: &Path,
    n: usize,
    field: FiniteField,
    exec: Execution,
) -> Result<GroupTable, CacheError> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < HEADER_LEN {
        return Err(CacheError::Corrupt("truncated header"));
    }
    if bytes[..4] != MAGIC {
        return Err(CacheError::BadMagic);
    }
    let version = u32_at(&bytes, 4);
    if version != VERSION {
        return Err(CacheError::Version(version));
    }
    let (cn, cp, ce) = (u32_at(&bytes, 8), u32_at(&bytes, 12), u32_at(&bytes, 16));
    if (cn as usize, cp, ce) != (n, field.p(), field.e()) {
        return Err(CacheError::WrongGroup { n: cn, p: cp, e: ce });
    }
    let count = u64_at(&bytes, 20) as usize;
    if count as u128 != gl_order(n, field.q()) {
        return Err(CacheError::Corrupt("element count does not match the group order"));
    }
    if bytes.len() != HEADER_LEN + count * 12 {
        return Err(CacheError::Corrupt("payload length"));
    }
    let codes: Vec<u64> = (0..count).map(|i| u64_at(&bytes, HEADER_LEN + 8 * i)).collect();
    if codes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CacheError::Corrupt("element codes are not strictly increasing"));
    }
    let max_code = (field.q() as u64).pow((n * n) as u32);
    if codes.last().is_some_and(|&c| c >= max_code) {
        return Err(CacheError::Corrupt("element code out of range"));
    }
    let base = HEADER_LEN + 8 * count;
    let labels: Vec<u32> = (0..count).map(|i| u32_at(&bytes, base + 4 * i)).collect();
    if labels.iter().any(|&l| l as usize >= count) {
        return Err(CacheError::Corrupt("class label out of range"));
    }
    Ok(GroupTable::from_parts(n, field, codes, labels, exec))
}

/// Loads the table from `dir` when a valid cache exists, otherwise builds it
/// and writes the cache. A stale or corrupt file is rebuilt and overwritten.
pub fn load_or_build(
    dir: Option<&Path>,
    n: usize,
    field: FiniteField,
    limits: &Limits,
    exec: Execution,
) -> Result<(GroupTable, CacheStatus), CacheError> {
    let Some(dir) = dir else {
        return Ok((GroupTable::build(n, field, limits, exec)?, CacheStatus::Disabled));
    };
    // refuse oversized groups before touching the disk
    let order = gl_order(n, field.q());
    if order > limits.max_elements as u128 {
        return Err(GroupError::GroupTooLarge {
            n,
            q: field.q(),
            order,
            cap: limits.max_elements,
        }
        .into());
    }
    let path = cache_path(dir, n, &field);
    if path.exists() {
        if let Ok(t) = read_cache(&path, n, field.clone(), exec) {
            return Ok((t, CacheStatus::Hit));
        }
    }
    let table = GroupTable::build(n, field, limits, exec)?;
    write_cache(&table, &path)?;
    Ok((table, CacheStatus::Miss))
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassJson {
    pub index: usize,
    pub representative: Vec<Vec<u16>>,
    pub size: u64,
    pub invariant_factors: Vec<String>,
    pub inverse_class: usize,
    pub element_order: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassesJson {
    pub n: usize,
    pub q: u32,
    pub modulus: Vec<u32>,
    pub order: u64,
    pub classes: Vec<ClassJson>,
}

pub fn classes_json(table: &GroupTable) -> ClassesJson {
    let n = table.n();
    ClassesJson {
        n,
        q: table.field().q(),
        modulus: table.field().modulus().to_vec(),
        order: table.order(),
        classes: table
            .classes()
            .iter()
            .enumerate()
            .map(|(index, c)| ClassJson {
                index,
                representative: (0..n)
                    .map(|i| (0..n).map(|j| c.representative.get(i, j)).collect())
                    .collect(),
                size: c.size,
                invariant_factors: c.invariant_factors.iter().map(|p| p.to_string()).collect(),
                inverse_class: c.inverse_class,
                element_order: c.element_order,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(q: u32) -> FiniteField {
        FiniteField::of_order(q, 16).unwrap()
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let f = field(4);
        let built = GroupTable::build(2, f.clone(), &Limits::default(), Execution::Sequential).unwrap();
        let path = cache_path(dir.path(), 2, &f);
        write_cache(&built, &path).unwrap();
        let loaded = read_cache(&path, 2, f, Execution::Parallel).unwrap();
        assert_eq!(loaded.codes(), built.codes());
        assert_eq!(loaded.class_labels(), built.class_labels());
        assert_eq!(loaded.classes(), built.classes());
        assert_eq!(loaded.exponent(), built.exponent());
    }

    #[test]
    fn load_or_build_hits_second_time() {
        let dir = tempfile::tempdir().unwrap();
        let lim = Limits::default();
        let (_, s1) = load_or_build(Some(dir.path()), 2, field(3), &lim, Execution::Parallel).unwrap();
        let (t, s2) = load_or_build(Some(dir.path()), 2, field(3), &lim, Execution::Parallel).unwrap();
        assert_eq!((s1, s2), (CacheStatus::Miss, CacheStatus::Hit));
        assert_eq!(t.class_count(), 8);
        let (_, s3) = load_or_build(None, 2, field(3), &lim, Execution::Parallel).unwrap();
        assert_eq!(s3, CacheStatus::Disabled);
    }

    #[test]
    fn corrupt_files_are_rejected_and_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let f = field(2);
        let t = GroupTable::build(2, f.clone(), &Limits::default(), Execution::Sequential).unwrap();
        let path = cache_path(dir.path(), 2, &f);
        write_cache(&t, &path).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[0] = b'X';
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            read_cache(&path, 2, f.clone(), Execution::Sequential),
            Err(CacheError::BadMagic)
        ));
        bytes[0] = b'K';
        bytes.truncate(bytes.len() - 1);
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            read_cache(&path, 2, f.clone(), Execution::Sequential),
            Err(CacheError::Corrupt(_))
        ));
        assert!(matches!(
            read_cache(&path, 2, field(3), Execution::Sequential),
            Err(CacheError::WrongGroup { .. })
        ));
        let (_, status) =
            load_or_build(Some(dir.path()), 2, f, &Limits::default(), Execution::Sequential).unwrap();
        assert_eq!(status, CacheStatus::Miss);
    }

    #[test]
    fn json_lists_classes() {
        let t = GroupTable::build(2, field(2), &Limits::default(), Execution::Sequential).unwrap();
        let j = classes_json(&t);
        assert_eq!(j.classes.len(), 3);
        assert_eq!(j.classes[0].representative, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(j.classes.iter().map(|c| c.size).sum::<u64>(), 6);
    }
}
