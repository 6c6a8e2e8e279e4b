//! On-disk cache of irreducible moduli, keyed by base field and degree.
//! Enabled by `GONAL_CACHE_DIR`; entries are re-checked on load.

use std::path::PathBuf;
use std::sync::Arc;

use gonal::algebra::{AlgebraError, FieldSpec, FiniteField, UniPoly};

pub const CACHE_ENV: &str = "GONAL_CACHE_DIR";

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn key(base: &FieldSpec, k: usize) -> String {
    let mut s = format!("irreducible-p{}-e{}", base.p, base.e);
    if let Some(m) = &base.modulus {
        let m: Vec<String> = m.iter().map(u64::to_string).collect();
        s.push_str(&format!("-m{}", m.join("_")));
    }
    format!("{s}-d{k}.json")
}

/// `F_{q^k}` over `base`, reusing a cached modulus when one is present.
pub fn extension(base: &Arc<FiniteField>, k: usize) -> Arc<FiniteField> {
    if k == 1 {
        return base.clone();
    }
    let Some(dir) = cache_dir() else {
        return base.extension(k);
    };
    let path = dir.join(key(&base.spec(), k));
    let cached = std::fs::read_to_string(&path)
        .ok()
        .and_then(|s| serde_json::from_str::<UniPoly>(&s).ok())
        .and_then(|m| FiniteField::with_modulus(base, m).ok())
        .filter(|f| f.relative_degree() == k);
    if let Some(f) = cached {
        return f;
    }
    let modulus = base.polys().find_irreducible(k);
    if std::fs::create_dir_all(&dir).is_ok() {
        let _ = std::fs::write(&path, serde_json::to_string(&modulus).expect("polynomial serializes"));
    }
    FiniteField::with_modulus(base, modulus).expect("find_irreducible returns an irreducible")
}

/// `F_{p^e}` from a spec, pulling the default modulus through the cache.
pub fn field(spec: &FieldSpec) -> Result<Arc<FiniteField>, AlgebraError> {
    if spec.e > 1 && spec.modulus.is_none() {
        let fp = FiniteField::prime(spec.p)?;
        return Ok(extension(&fp, spec.e as usize));
    }
    FiniteField::from_spec(spec)
}
