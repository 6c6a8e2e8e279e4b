//! Local densities `c_p` of the squarefree condition, the truncated Euler
//! product for the density of good tuples, and its Monte-Carlo estimate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FqElem, UniPoly};
use crate::construct::{sample_tuple, trial_rng, ConstructError, Family, GonalityProfile};
use crate::curve::{self, CurveError, CurvePoly};
use crate::verify::with_jobs;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DensityError {
    #[error("enumeration over {size} tuples exceeds the cap of {cap}")]
    CapExceeded { size: u64, cap: u64 },
    #[error("{0:?} is not a monic irreducible")]
    NotPrime(Vec<u64>),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("degree sequence must have gamma + 1 = {0} nonnegative entries")]
    BadDegrees(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

/// One Euler factor `1 − c_p / |p|^{2(γ+1)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LocalFactor {
    pub p: UniPoly,
    pub degree: usize,
    pub c_p: u64,
    /// `|p|^{2(γ+1)}`, the number of residue tuples.
    pub residues: u64,
    /// Exact value as `"num/den"` (or an integer).
    pub local_factor: String,
    pub approx: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Empirical {
    pub trials: u64,
    pub successes: u64,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DensityReport {
    pub q: u64,
    pub gamma: usize,
    pub profile: GonalityProfile,
    pub beta: UniPoly,
    pub truncation_degree: usize,
    pub per_prime: Vec<LocalFactor>,
    pub truncated_product: String,
    pub truncated_product_approx: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<Empirical>,
    /// `|empirical − truncated|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<f64>,
}

fn ratio_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn approx(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

fn check_prime(family: &Family, p: &UniPoly) -> Result<usize, DensityError> {
    let r = family.field.polys();
    let ok = p.degree().is_some_and(|d| d >= 1) && p.lead() == FqElem::ONE && r.is_irreducible(p)?;
    if !ok {
        return Err(DensityError::NotPrime(p.to_u64s()));
    }
    Ok(p.degree().unwrap())
}

/// Number of residue tuples `(g_0, …, g_γ) mod p²` with `F(g) ≡ 0 mod p²`.
///
/// With `v = v_p(α^{2L} β^{γ−1})`, `F ≡ 0 mod p²` iff `disc_y(f) ≡ 0 mod p^{2+v}`,
/// and the discriminant is a polynomial in the `f_i`, so everything is
/// reduced modulo `p^{2+v}` before the determinant is taken.
pub fn count_cp(family: &Family, p: &UniPoly, cap: u64) -> Result<u64, DensityError> {
    let dp = check_prime(family, p)?;
    let k = &family.field;
    let r = k.polys();
    let q = k.order();
    let gamma = family.gamma();
    let digits = 2 * dp;
    let exponent = (digits * (gamma + 1)) as u32;
    let size = q.checked_pow(exponent).filter(|&s| s <= cap).ok_or(DensityError::CapExceeded {
        size: q.saturating_pow(exponent),
        cap,
    })?;
    let va = r.valuation_at(&family.alpha, p)?.unwrap_or(0);
    let vb = r.valuation_at(&family.beta, p)?.unwrap_or(0);
    let v = va * 2 * family.profile.big_l as u32 + vb * (gamma as u32 - 1);
    let modulus = r.pow(p, 2 + v);
    let parts: Vec<(UniPoly, UniPoly)> = (0..=gamma)
        .map(|i| {
            let (a, b) = family.parts(i);
            Ok((r.rem(&a, &modulus)?, r.rem(&b, &modulus)?))
        })
        .collect::<Result<_, AlgebraError>>()?;
    let count = (0..size)
        .into_par_iter()
        .map(|mut idx| -> Result<u64, DensityError> {
            let mut f = Vec::with_capacity(gamma + 1);
            for (prefix, inner) in &parts {
                let g = UniPoly::new(
                    (0..digits)
                        .map(|_| {
                            let c = idx % q;
                            idx /= q;
                            FqElem(c)
                        })
                        .collect(),
                );
                let one_plus = r.add(&UniPoly::one(), &r.mulmod(inner, &g, &modulus)?);
                f.push(r.mulmod(prefix, &one_plus, &modulus)?);
            }
            if f[gamma].is_zero() {
                // any lift of the residue will do
                f[gamma] = modulus.clone();
            }
            let disc = curve::discriminant_y(k, &CurvePoly::new(f)?)?;
            Ok(u64::from(r.rem(&disc, &modulus)?.is_zero()))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(count)
}

/// Reference count: full `F` in `F_q[t]`, then reduced mod `p²`.
pub fn count_cp_exact(family: &Family, p: &UniPoly, cap: u64) -> Result<u64, DensityError> {
    let dp = check_prime(family, p)?;
    let r = family.field.polys();
    let q = family.q();
    let gamma = family.gamma();
    let exponent = (2 * dp * (gamma + 1)) as u32;
    let size = q.checked_pow(exponent).filter(|&s| s <= cap).ok_or(DensityError::CapExceeded {
        size: q.saturating_pow(exponent),
        cap,
    })?;
    let p2 = r.mul(p, p);
    let mut count = 0;
    for mut idx in 0..size {
        let g: Vec<UniPoly> = (0..=gamma)
            .map(|_| {
                UniPoly::new(
                    (0..2 * dp)
                        .map(|_| {
                            let c = idx % q;
                            idx /= q;
                            FqElem(c)
                        })
                        .collect(),
                )
            })
            .collect();
        let big_f = family.reduced_discriminant(&family.assemble(&g))?;
        count += u64::from(r.rem(&big_f, &p2)?.is_zero());
    }
    Ok(count)
}

/// Monic irreducibles of degree `d`, in the canonical enumeration order.
pub fn monic_irreducibles(family: &Family, d: usize) -> Result<Vec<UniPoly>, DensityError> {
    let q = family.q();
    let r = family.field.polys();
    let n = q.checked_pow(d as u32).ok_or(DensityError::CapExceeded { size: u64::MAX, cap: u64::MAX })?;
    let mut out = Vec::new();
    for mut idx in 0..n {
        let mut c: Vec<FqElem> = (0..d)
            .map(|_| {
                let x = idx % q;
                idx /= q;
                FqElem(x)
            })
            .collect();
        c.push(FqElem::ONE);
        let p = UniPoly::new(c);
        if r.is_irreducible(&p)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// Euler factors for every monic irreducible of degree `≤ max_degree`.
pub fn local_factors(family: &Family, max_degree: usize, cap: u64) -> Result<Vec<LocalFactor>, DensityError> {
    let q = family.q();
    let gamma = family.gamma();
    let mut out = Vec::new();
    for d in 1..=max_degree {
        for p in monic_irreducibles(family, d)? {
            let c_p = count_cp(family, &p, cap)?;
            let residues = q.pow((2 * d * (gamma + 1)) as u32);
            let factor = BigRational::one() - BigRational::new(BigInt::from(c_p), BigInt::from(residues));
            out.push(LocalFactor {
                p,
                degree: d,
                c_p,
                residues,
                local_factor: ratio_string(&factor),
                approx: approx(&factor),
            });
        }
    }
    Ok(out)
}

/// Exact product of the listed factors.
pub fn euler_product(factors: &[LocalFactor]) -> BigRational {
    factors.iter().fold(BigRational::one(), |acc, f| {
        acc * (BigRational::one() - BigRational::new(BigInt::from(f.c_p), BigInt::from(f.residues)))
    })
}

/// `∏_{deg p ≤ max_degree} (1 − c_p / |p|^{2(γ+1)})`.
pub fn truncated_density(family: &Family, max_degree: usize, cap: u64) -> Result<BigRational, DensityError> {
    Ok(euler_product(&local_factors(family, max_degree, cap)?))
}

/// Fraction of uniformly random exact-degree tuples whose `F` is squarefree.
/// Trial `i` uses the same random stream as trial `i` of the tuple search.
pub fn empirical_density(family: &Family, d: &[i64], trials: u64, seed: u64) -> Result<Empirical, DensityError> {
    if trials == 0 {
        return Err(DensityError::NoTrials);
    }
    if d.len() != family.gamma() + 1 || d.iter().any(|&x| x < 0) {
        return Err(DensityError::BadDegrees(family.gamma() + 1));
    }
    let q = family.q();
    let successes = (0..trials)
        .into_par_iter()
        .map(|i| {
            let g = sample_tuple(q, d, &mut trial_rng(seed, i));
            Ok(u64::from(family.evaluate(&g)?.is_ok()))
        })
        .try_reduce(|| 0, |a, b| Ok::<_, DensityError>(a + b))?;
    Ok(Empirical { trials, successes, frequency: successes as f64 / trials as f64 })
}

/// Settings for [`density_report`].
#[derive(Clone, Debug)]
pub struct DensityConfig {
    pub max_degree: usize,
    /// Degrees for the Monte-Carlo estimate; `None` skips it.
    pub degrees: Option<Vec<i64>>,
    pub trials: u64,
    pub seed: u64,
    pub cap: u64,
    pub jobs: Option<usize>,
}

pub fn density_report(family: &Family, cfg: &DensityConfig) -> Result<DensityReport, DensityError> {
    with_jobs(cfg.jobs, || {
        let per_prime = local_factors(family, cfg.max_degree, cfg.cap)?;
        let product = euler_product(&per_prime);
        let empirical = match &cfg.degrees {
            Some(d) => Some(empirical_density(family, d, cfg.trials, cfg.seed)?),
            None => None,
        };
        let product_approx = approx(&product);
        Ok(DensityReport {
            q: family.q(),
            gamma: family.gamma(),
            profile: family.profile.clone(),
            beta: family.beta.clone(),
            truncation_degree: cfg.max_degree,
            per_prime,
            truncated_product: ratio_string(&product),
            truncated_product_approx: product_approx,
            difference: empirical.map(|e| (e.frequency - product_approx).abs()),
            empirical,
        })
    })
}

impl DensityReport {
    /// Every listed factor lies in `(0, 1]`.
    pub fn all_factors_positive(&self) -> bool {
        self.per_prime.iter().all(|f| f.c_p < f.residues)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteField;
    use crate::construct::default_profile;

    fn family(q: u64, gamma: usize) -> Family {
        Family::new(FiniteField::prime(q).unwrap(), default_profile(gamma).unwrap())
    }

    #[test]
    fn degree_one_primes_have_no_solutions() {
        for (q, gamma) in [(3, 2), (3, 3), (5, 2), (5, 3)] {
            let fam = family(q, gamma);
            for p in monic_irreducibles(&fam, 1).unwrap() {
                assert_eq!(count_cp(&fam, &p, 1 << 24).unwrap(), 0, "q={q} gamma={gamma} p={p:?}");
            }
        }
        assert!(truncated_density(&family(3, 2), 1, 1 << 24).unwrap().is_one());
    }

    #[test]
    fn fast_count_matches_reference() {
        let fam = family(3, 2);
        for p in monic_irreducibles(&fam, 1).unwrap() {
            assert_eq!(count_cp(&fam, &p, 1 << 24).unwrap(), count_cp_exact(&fam, &p, 1 << 24).unwrap());
        }
        let fam = family(2, 3);
        for d in 1..=2 {
            for p in monic_irreducibles(&fam, d).unwrap() {
                assert_eq!(count_cp(&fam, &p, 1 << 24).unwrap(), count_cp_exact(&fam, &p, 1 << 24).unwrap());
            }
        }
    }

    #[test]
    fn residue_class_well_defined() {
        let fam = family(3, 2);
        let r = fam.field.polys();
        let p = UniPoly::from_u64s(&[2, 2, 1]);
        assert!(r.is_irreducible(&p).unwrap());
        let p2 = r.mul(&p, &p);
        for seed in 0..20 {
            let g = sample_tuple(3, &[3, 4, 2], &mut trial_rng(seed, 0));
            let h = sample_tuple(3, &[2, 1, 3], &mut trial_rng(seed, 1));
            let lifted: Vec<UniPoly> = g.iter().zip(&h).map(|(a, b)| r.add(a, &r.mul(&p2, b))).collect();
            let fa = fam.reduced_discriminant(&fam.assemble(&g)).unwrap();
            let fb = fam.reduced_discriminant(&fam.assemble(&lifted)).unwrap();
            assert_eq!(r.rem(&fa, &p2).unwrap(), r.rem(&fb, &p2).unwrap());
        }
    }

    #[test]
    fn irreducible_counts() {
        let fam = family(3, 2);
        assert_eq!(monic_irreducibles(&fam, 1).unwrap().len(), 3);
        assert_eq!(monic_irreducibles(&fam, 2).unwrap().len(), 3);
        assert_eq!(monic_irreducibles(&fam, 3).unwrap().len(), 8);
    }

    #[test]
    fn cap_and_bad_input() {
        let fam = family(3, 3);
        let p = UniPoly::from_u64s(&[1, 0, 1]);
        assert!(matches!(count_cp(&fam, &p, 1 << 20), Err(DensityError::CapExceeded { .. })));
        assert!(matches!(count_cp(&fam, &UniPoly::from_u64s(&[0, 0, 1]), 1 << 24), Err(DensityError::NotPrime(_))));
        assert_eq!(empirical_density(&fam, &[1, 1, 1, 1], 0, 0), Err(DensityError::NoTrials));
    }

    #[test]
    fn empirical_is_reproducible() {
        let fam = family(3, 2);
        let a = empirical_density(&fam, &[3, 5, 1], 200, 11).unwrap();
        let b = empirical_density(&fam, &[3, 5, 1], 200, 11).unwrap();
        assert_eq!(a, b);
    }
}
