//! Content-addressed cache for θ tables and `B_μ` tables.
//!
//! Each entry is a text body followed by a `checksum <sha256>` line. An entry
//! whose checksum does not match is discarded and recomputed.

use std::fs;
use std::path::{Path, PathBuf};

use ahyper_core::dwork::{bmu_table_from_text, bmu_table_to_text, DworkOperator, ThetaTable};
use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use crate::config::ProblemConfig;

pub const CACHE_ENV: &str = "AHYPER_CACHE_DIR";

/// Hash of `(p, point rows, D_λ, D_x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheKey(pub String);

impl CacheKey {
    pub fn of(config: &ProblemConfig) -> Self {
        let rows: Vec<String> = config
            .points
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        let material = format!(
            "p={}|points={}|degree={}|weight={}",
            config.p,
            rows.join(";"),
            config.degree,
            config.weight
        );
        Self(hex::encode(Sha256::digest(material.as_bytes())))
    }
}

fn checksum(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

fn seal(body: &str) -> String {
    format!("{body}checksum {}\n", checksum(body))
}

/// The body of a sealed entry, or `None` if the checksum does not match.
fn unseal(text: &str) -> Option<&str> {
    let trimmed = text.strip_suffix('\n')?;
    let cut = trimmed.rfind('\n').map_or(0, |i| i + 1);
    let (body, last) = text.split_at(cut);
    let sum = last.trim_end().strip_prefix("checksum ")?;
    (checksum(body) == sum).then_some(body)
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `--cache-dir`, then the environment, then the config file.
    pub fn resolve(flag: Option<&Path>, config: &ProblemConfig) -> Option<Self> {
        flag.map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .or_else(|| config.cache_dir.clone())
            .map(Self::new)
    }

    fn path(&self, key: &CacheKey, name: &str) -> PathBuf {
        self.dir.join(&key.0).join(name)
    }

    /// A verified body, or `None` when absent or corrupted.
    pub fn load(&self, key: &CacheKey, name: &str) -> Option<String> {
        let text = fs::read_to_string(self.path(key, name)).ok()?;
        unseal(&text).map(str::to_string)
    }

    /// Writes an entry. A valid entry with different contents is an error:
    /// the same inputs must always produce the same tables.
    pub fn store(&self, key: &CacheKey, name: &str, body: &str) -> Result<()> {
        let path = self.path(key, name);
        if let Ok(existing) = fs::read_to_string(&path) {
            if let Some(old) = unseal(&existing) {
                if old == body {
                    return Ok(());
                }
                bail!(
                    "cache entry {} disagrees with a fresh computation",
                    path.display()
                );
            }
        }
        fs::create_dir_all(path.parent().unwrap())
            .with_context(|| format!("creating cache directory {}", self.dir.display()))?;
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, seal(body)).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

/// Builds the operator for `config`, reusing cached tables when present.
pub fn build_operator(config: &ProblemConfig, cache: Option<&Cache>) -> Result<DworkOperator> {
    let points = config.point_configuration()?;
    let p = config.p;
    let key = CacheKey::of(config);
    let cached_theta = cache
        .and_then(|c| c.load(&key, "theta.txt"))
        .and_then(|t| ThetaTable::from_text(&t).ok())
        .filter(|t| t.p() == p && t.max_index() >= DworkOperator::theta_len(p, config.weight));
    let cached_bmu = cache
        .and_then(|c| c.load(&key, "bmu.txt"))
        .and_then(|t| bmu_table_from_text(p, &t).ok());
    let had_theta = cached_theta.is_some();
    let had_bmu = cached_bmu.is_some();
    let theta = match cached_theta {
        Some(t) => t,
        None => ThetaTable::new(p, DworkOperator::theta_len(p, config.weight))?,
    };
    let op = DworkOperator::with_tables(
        &points,
        p,
        config.weight,
        config.degree,
        theta,
        cached_bmu.unwrap_or_default(),
    )?;
    if let Some(c) = cache {
        if !had_theta {
            c.store(&key, "theta.txt", &op.theta().to_text())?;
        }
        if !had_bmu {
            c.store(&key, "bmu.txt", &bmu_table_to_text(op.bmu_table()))?;
        }
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dwork2() -> ProblemConfig {
        ProblemConfig::parse(include_str!("../../../fixtures/dwork2.cfg")).unwrap()
    }

    #[test]
    fn key_changes_with_every_field() {
        let base = dwork2();
        let k = CacheKey::of(&base);
        assert_eq!(k, CacheKey::of(&base.clone()));
        let mut c = base.clone();
        c.p = 5;
        assert_ne!(CacheKey::of(&c), k);
        let mut c = base.clone();
        c.points[1][0] = 3;
        assert_ne!(CacheKey::of(&c), k);
        let mut c = base.clone();
        c.degree += 1;
        assert_ne!(CacheKey::of(&c), k);
        let mut c = base;
        c.weight += 1;
        assert_ne!(CacheKey::of(&c), k);
    }

    #[test]
    fn seal_and_detect_corruption() {
        let body = "theta p=3 max=2\n1\n";
        let sealed = seal(body);
        assert_eq!(unseal(&sealed), Some(body));
        let corrupted = sealed.replacen("max=2", "max=3", 1);
        assert_eq!(unseal(&corrupted), None);
        assert_eq!(unseal("no checksum\n"), None);
    }

    #[test]
    fn corrupted_entry_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let config = dwork2();
        let key = CacheKey::of(&config);
        let fresh = build_operator(&config, Some(&cache)).unwrap();
        let path = cache.path(&key, "theta.txt");
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, text.replacen("theta", "theta ", 1)).unwrap();
        assert!(cache.load(&key, "theta.txt").is_none());
        let again = build_operator(&config, Some(&cache)).unwrap();
        assert_eq!(again.theta(), fresh.theta());
        assert!(cache.load(&key, "theta.txt").is_some());
    }

    #[test]
    fn conflicting_write_is_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let key = CacheKey("k".into());
        cache.store(&key, "x", "one\n").unwrap();
        cache.store(&key, "x", "one\n").unwrap();
        assert!(cache.store(&key, "x", "two\n").is_err());
    }
}
