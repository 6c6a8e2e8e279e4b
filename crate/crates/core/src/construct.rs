//! The curve family `f_i = α^{ℓ_i} β^{δ_i} (1 + α β^{δ′_i} g_i)`, the target
//! polygon `Δ_r`, the degree plan and the randomized search for a tuple
//! `(g_0, …, g_γ)` whose reduced discriminant `F` is squarefree.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteField, FqElem, UniPoly};
use crate::curve::{self, CurveError, CurvePoly};
use crate::lattice::LatticeError;
use crate::lattice::{self, LatticePoint, LatticePolygon};
use crate::verify::{self, Certificate, VerifyError};

pub const DEFAULT_BUDGET: u64 = 10_000;

/// Advisory attached to budget exhaustion in characteristic 2.
pub const CHAR2_ADVISORY: &str = "characteristic 2: the generic discriminant is a square modulo 4, so \
disc_y(f) is a perfect square in F_q[t] and F is a square times a power of beta (for gamma = 2, \
x1^2 - 4 x0 x2 collapses to x1^2); F is never squarefree and no tuple in this family can succeed";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("gonality must be at least 2, got {0}")]
    GammaTooSmall(usize),
    #[error("genus too small for this construction: {0}")]
    GenusTooSmall(String),
    #[error("infeasible genus: d_{index} = {value} < 0")]
    InfeasibleDegree { index: usize, value: i64 },
    #[error("g_{index} has degree {got:?}, expected {expected}")]
    DegreeMismatch { index: usize, expected: i64, got: Option<usize> },
    #[error("assembled f violates {0}")]
    Assembly(String),
    #[error("inexact division of the discriminant by {0}")]
    InexactDivision(&'static str),
    #[error("discriminant of f vanishes identically")]
    ZeroDiscriminant,
    #[error("search budget exhausted after {trials} trials (last failure: {last_failure}){}", advisory.as_ref().map(|a| format!("; advisory: {a}")).unwrap_or_default())]
    BudgetExhausted { trials: u64, last_failure: TrialFailure, advisory: Option<String> },
    #[error("verification failed: {0}")]
    Verification(#[from] Box<VerifyError>),
}

/// Why a sampled tuple was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrialFailure {
    NotSquarefree,
    ZeroDiscriminant,
}

impl std::fmt::Display for TrialFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrialFailure::NotSquarefree => "F not squarefree",
            TrialFailure::ZeroDiscriminant => "zero discriminant",
        })
    }
}

/// Left-hand slopes `0 = k_0 ≤ k_1 < … < k_γ` and their partial sums.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GonalityProfile {
    pub k: Vec<i64>,
    pub l: Vec<i64>,
    #[serde(rename = "L")]
    pub big_l: i64,
}

impl GonalityProfile {
    pub fn from_slopes(k: Vec<i64>) -> Result<Self, ConstructError> {
        let gamma = k.len().saturating_sub(1);
        if gamma < 2 {
            return Err(ConstructError::GammaTooSmall(gamma));
        }
        if k[0] != 0 || k[1] < 0 || k[1..].windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConstructError::Assembly("profile slopes 0 = k_0 <= k_1 < ... < k_gamma".into()));
        }
        let l: Vec<i64> = k
            .iter()
            .scan(0i64, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect();
        let big_l = l[1..gamma].iter().sum();
        Ok(GonalityProfile { k, l, big_l })
    }

    pub fn gamma(&self) -> usize {
        self.k.len() - 1
    }
}

/// `k_i = i − 1` for `i > 0`.
pub fn default_profile(gamma: usize) -> Result<GonalityProfile, ConstructError> {
    if gamma < 2 {
        return Err(ConstructError::GammaTooSmall(gamma));
    }
    GonalityProfile::from_slopes((0..=gamma as i64).map(|i| (i - 1).max(0)).collect())
}

/// Right-hand slopes `k′_1 > … > k′_γ`, their partial sums `ℓ′` and `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightProfile {
    pub kp: Vec<i64>,
    pub lp: Vec<i64>,
    pub r: i64,
}

/// Residue data for the right-hand profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RightSlopes {
    pub n: i64,
    pub m: i64,
    pub kp: Vec<i64>,
}

/// `n = g mod (γ−1)`, `m = n + qL`, and the slopes `k′` with `k′_2` the least
/// integer above `γ − 3` in the class of `Σ_{j=1}^{γ−3} j² − m`.
pub fn build_right_profile(gamma: usize, q: u64, genus: u64, profile: &GonalityProfile) -> RightSlopes {
    assert!(gamma >= 2);
    let g = gamma as i64;
    let modulus = g - 1;
    let n = (genus as i64).rem_euclid(modulus);
    let m = n + q as i64 * profile.big_l;
    let target = ((1..=g - 3).map(|j| j * j).sum::<i64>() - m).rem_euclid(modulus);
    let floor = g - 2; // smallest integer > γ − 3
    let k2 = floor + (target - floor).rem_euclid(modulus);
    let mut kp = vec![k2 + 1, k2];
    kp.extend((3..=g).map(|i| g - i));
    assert!(kp.windows(2).all(|w| w[0] > w[1]), "k' strictly decreasing");
    debug_assert!(kp.iter().sum::<i64>() >= 0);
    debug_assert_eq!(
        kp[..gamma - 1].iter().enumerate().map(|(j, &k)| (g - 1 - j as i64) * k).sum::<i64>().rem_euclid(modulus),
        m.rem_euclid(modulus)
    );
    RightSlopes { n, m, kp }
}

fn partial_sums(kp: &[i64]) -> Vec<i64> {
    std::iter::once(0)
        .chain(kp.iter().scan(0i64, |acc, &x| {
            *acc += x;
            Some(*acc)
        }))
        .collect()
}

/// The `r` with `interior(Δ_r) = g + qL`, from
/// `interior(Δ_r) = (γ−1)(r−1) + Σ_{i=1}^{γ−1} ℓ′_i`.
pub fn solve_r(gamma: usize, profile: &GonalityProfile, kp: &[i64], genus: u64, q: u64) -> Result<RightProfile, ConstructError> {
    let lp = partial_sums(kp);
    let target = genus as i64 + q as i64 * profile.big_l;
    let base: i64 = lp[1..gamma].iter().sum();
    let step = gamma as i64 - 1;
    let diff = target - base;
    if diff.rem_euclid(step) != 0 {
        return Err(ConstructError::GenusTooSmall(format!(
            "interior target {target} not congruent to {base} mod {step}"
        )));
    }
    let r = diff.div_euclid(step) + 1;
    if r < 1 {
        return Err(ConstructError::GenusTooSmall(format!(
            "interior target {target} needs r = {r} < 1"
        )));
    }
    debug_assert_eq!(
        lattice::lattice_counts(&lattice::delta_r(gamma, kp, r).unwrap()).unwrap().interior as i64,
        target
    );
    Ok(RightProfile { kp: kp.to_vec(), lp, r })
}

fn delta(i: usize, gamma: usize) -> i64 {
    i64::from(i < gamma)
}

fn delta_prime(i: usize, gamma: usize) -> i64 {
    i64::from(i == 0 || i == gamma)
}

/// `d_i = r + ℓ′_{γ−i} − q(ℓ_i + 1) − 2(δ_i + δ′_i)`, unchecked.
pub fn degree_formula(q: u64, profile: &GonalityProfile, right: &RightProfile) -> Vec<i64> {
    let gamma = profile.gamma();
    (0..=gamma)
        .map(|i| {
            right.r + right.lp[gamma - i]
                - q as i64 * (profile.l[i] + 1)
                - 2 * (delta(i, gamma) + delta_prime(i, gamma))
        })
        .collect()
}

/// The degree plan, failing on the first negative `d_i`.
pub fn degree_plan(q: u64, profile: &GonalityProfile, right: &RightProfile) -> Result<Vec<i64>, ConstructError> {
    let d = degree_formula(q, profile, right);
    match d.iter().position(|&x| x < 0) {
        Some(index) => Err(ConstructError::InfeasibleDegree { index, value: d[index] }),
        None => Ok(d),
    }
}

/// Data shared by every member of the family: the field, the left profile,
/// `α = t^q − t` and the Eisenstein prime `β`.
#[derive(Clone, Debug)]
pub struct Family {
    pub field: Arc<FiniteField>,
    pub profile: GonalityProfile,
    pub alpha: UniPoly,
    pub beta: UniPoly,
}

impl Family {
    pub fn new(field: Arc<FiniteField>, profile: GonalityProfile) -> Self {
        let q = field.order();
        let alpha = UniPoly::new({
            let mut c = vec![FqElem::ZERO; q as usize + 1];
            c[1] = field.neg(FqElem::ONE);
            c[q as usize] = FqElem::ONE;
            c
        });
        let beta = field.polys().find_irreducible(2);
        Family { field, profile, alpha, beta }
    }

    pub fn gamma(&self) -> usize {
        self.profile.gamma()
    }

    pub fn q(&self) -> u64 {
        self.field.order()
    }

    /// `(α^{ℓ_i} β^{δ_i}, α β^{δ′_i})`, so that `f_i = prefix · (1 + inner · g_i)`.
    pub fn parts(&self, i: usize) -> (UniPoly, UniPoly) {
        let gamma = self.gamma();
        let r = self.field.polys();
        let mut prefix = r.pow(&self.alpha, self.profile.l[i] as u32);
        let mut inner = self.alpha.clone();
        if delta(i, gamma) == 1 {
            prefix = r.mul(&prefix, &self.beta);
        }
        if delta_prime(i, gamma) == 1 {
            inner = r.mul(&inner, &self.beta);
        }
        (prefix, inner)
    }

    /// `f` from an arbitrary tuple, without degree checks.
    pub fn assemble(&self, g: &[UniPoly]) -> CurvePoly {
        let gamma = self.gamma();
        assert_eq!(g.len(), gamma + 1);
        let r = self.field.polys();
        let f = (0..=gamma)
            .map(|i| {
                let (prefix, inner) = self.parts(i);
                r.mul(&prefix, &r.add(&UniPoly::one(), &r.mul(&inner, &g[i])))
            })
            .collect();
        CurvePoly::new(f).expect("f_gamma has constant term 1 after removing alpha powers")
    }

    /// `α^{2L} β^{γ−1}`.
    pub fn disc_divisor(&self) -> UniPoly {
        let r = self.field.polys();
        r.mul(
            &r.pow(&self.alpha, 2 * self.profile.big_l as u32),
            &r.pow(&self.beta, self.gamma() as u32 - 1),
        )
    }

    /// `disc_y(f) / (α^{2L} β^{γ−1})`; the zero polynomial when the
    /// discriminant vanishes.
    pub fn reduced_discriminant(&self, f: &CurvePoly) -> Result<UniPoly, ConstructError> {
        let r = self.field.polys();
        let disc = curve::discriminant_y(&self.field, f)?;
        if disc.is_zero() {
            return Ok(disc);
        }
        let a = r
            .div_exact(&disc, &r.pow(&self.alpha, 2 * self.profile.big_l as u32))
            .map_err(|_| ConstructError::InexactDivision("alpha^(2L)"))?;
        r.div_exact(&a, &r.pow(&self.beta, self.gamma() as u32 - 1))
            .map_err(|_| ConstructError::InexactDivision("beta^(gamma-1)"))
    }

    /// Evaluates one trial tuple: `Ok(F)` when squarefree.
    pub fn evaluate(&self, g: &[UniPoly]) -> Result<Result<(CurvePoly, UniPoly), TrialFailure>, ConstructError> {
        let f = self.assemble(g);
        let big_f = self.reduced_discriminant(&f)?;
        if big_f.is_zero() {
            return Ok(Err(TrialFailure::ZeroDiscriminant));
        }
        if self.field.polys().is_squarefree(&big_f)? {
            Ok(Ok((f, big_f)))
        } else {
            Ok(Err(TrialFailure::NotSquarefree))
        }
    }
}

/// All parameters of one construction.
#[derive(Clone, Debug)]
pub struct ConstructionInstance {
    pub family: Family,
    pub genus: u64,
    pub right: RightProfile,
    pub n: i64,
    pub m: i64,
    pub d: Vec<i64>,
}

impl ConstructionInstance {
    /// Runs the profile, right-profile, `r` and degree-plan steps.
    pub fn new(field: Arc<FiniteField>, gamma: usize, genus: u64) -> Result<Self, ConstructError> {
        let profile = default_profile(gamma)?;
        if genus < 2 {
            return Err(ConstructError::GenusTooSmall(format!("genus {genus} < 2")));
        }
        let q = field.order();
        let rs = build_right_profile(gamma, q, genus, &profile);
        let right = solve_r(gamma, &profile, &rs.kp, genus, q)?;
        let d = degree_plan(q, &profile, &right)?;
        Ok(ConstructionInstance { family: Family::new(field, profile), genus, right, n: rs.n, m: rs.m, d })
    }

    pub fn gamma(&self) -> usize {
        self.family.gamma()
    }

    pub fn q(&self) -> u64 {
        self.family.q()
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.family.field
    }

    pub fn profile(&self) -> &GonalityProfile {
        &self.family.profile
    }

    pub fn delta_r(&self) -> Result<LatticePolygon, ConstructError> {
        Ok(lattice::delta_r(self.gamma(), &self.right.kp, self.right.r)?)
    }

    /// Assembles `f` after checking `deg g_i = d_i`, and checks the degree,
    /// `t`-adic valuation and polygon postconditions.
    pub fn assemble_f(&self, g: &[UniPoly]) -> Result<CurvePoly, ConstructError> {
        let gamma = self.gamma();
        if g.len() != gamma + 1 {
            return Err(ConstructError::Assembly(format!("expected {} coefficients g_i", gamma + 1)));
        }
        for (i, gi) in g.iter().enumerate() {
            if gi.degree().map(|x| x as i64) != Some(self.d[i]) {
                return Err(ConstructError::DegreeMismatch { index: i, expected: self.d[i], got: gi.degree() });
            }
            if !gi.coeffs_in_subfield(self.q()) {
                return Err(ConstructError::Assembly(format!("g_{i} has coefficients outside F_q")));
            }
        }
        let f = self.family.assemble(g);
        let ring = self.field().polys();
        let t = UniPoly::x();
        for (i, fi) in f.f.iter().enumerate() {
            let want = self.right.r + self.right.lp[gamma - i];
            if fi.degree().map(|x| x as i64) != Some(want) {
                return Err(ConstructError::Assembly(format!("deg f_{i} = {want}")));
            }
            if ring.valuation_at(fi, &t)?.map(i64::from) != Some(self.profile().l[i]) {
                return Err(ConstructError::Assembly(format!("v_t(f_{i}) = l_{i}")));
            }
        }
        let mut pts = f.support();
        pts.push(LatticePoint::new(0, 0));
        pts.push(LatticePoint::new(0, gamma as i64));
        if lattice::convex_hull(&pts)? != self.delta_r()? {
            return Err(ConstructError::Assembly("conv(Δ(f) ∪ {(0,0),(0,γ)}) = Δ_r".into()));
        }
        Ok(f)
    }

    /// `F = disc_y(f) / (α^{2L} β^{γ−1})`; zero discriminant is an error.
    pub fn capital_f(&self, f: &CurvePoly) -> Result<UniPoly, ConstructError> {
        let big_f = self.family.reduced_discriminant(f)?;
        if big_f.is_zero() {
            return Err(ConstructError::ZeroDiscriminant);
        }
        Ok(big_f)
    }
}

/// Trial `index` draws from its own ChaCha stream under `seed`, so results do
/// not depend on evaluation order.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform polynomials of exact degrees `d_i` over `F_q` (leading
/// coefficient nonzero); negative degrees give the zero polynomial.
pub fn sample_tuple<R: Rng>(q: u64, d: &[i64], rng: &mut R) -> Vec<UniPoly> {
    d.iter()
        .map(|&di| {
            if di < 0 {
                return UniPoly::zero();
            }
            let mut c: Vec<FqElem> = (0..di).map(|_| FqElem(rng.random_range(0..q))).collect();
            c.push(FqElem(rng.random_range(1..q)));
            UniPoly::new(c)
        })
        .collect()
}

/// Settings for [`search_tuple`].
#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub seed: u64,
    pub budget: u64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { seed: 0, budget: DEFAULT_BUDGET, jobs: None }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub g_tuple: Vec<UniPoly>,
    pub f: CurvePoly,
    pub capital_f: UniPoly,
    /// Trials consumed, including the successful one.
    pub trials: u64,
}

const BATCH: u64 = 64;

/// Random search for a tuple with squarefree `F`. The reported tuple is the
/// one with the lowest succeeding trial index.
pub fn search_tuple(inst: &ConstructionInstance, cfg: &SearchConfig) -> Result<SearchOutcome, ConstructError> {
    let run = || -> Result<SearchOutcome, ConstructError> {
        let q = inst.q();
        let mut last_failure = TrialFailure::NotSquarefree;
        let mut start = 0u64;
        while start < cfg.budget {
            let end = (start + BATCH).min(cfg.budget);
            let results: Vec<_> = (start..end)
                .into_par_iter()
                .map(|i| {
                    let g = sample_tuple(q, &inst.d, &mut trial_rng(cfg.seed, i));
                    inst.family.evaluate(&g).map(|r| (i, g, r))
                })
                .collect::<Result<_, _>>()?;
            for (i, g, r) in results {
                match r {
                    Ok((_, big_f)) => {
                        let f = inst.assemble_f(&g)?;
                        return Ok(SearchOutcome { g_tuple: g, f, capital_f: big_f, trials: i + 1 });
                    }
                    Err(e) => last_failure = e,
                }
            }
            start = end;
        }
        let advisory = q.is_multiple_of(2).then(|| CHAR2_ADVISORY.to_string());
        Err(ConstructError::BudgetExhausted { trials: cfg.budget, last_failure, advisory })
    };
    match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }
}

/// Full pipeline: instance, tuple search, then every verification check.
pub fn construct_curve(
    field: Arc<FiniteField>,
    gamma: usize,
    genus: u64,
    cfg: &SearchConfig,
) -> Result<Certificate, ConstructError> {
    let inst = ConstructionInstance::new(field, gamma, genus)?;
    let found = search_tuple(&inst, cfg)?;
    verify::certify(&inst, found.g_tuple, cfg.seed, found.trials).map_err(|e| ConstructError::Verification(Box::new(e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FieldSpec;

    fn f3() -> Arc<FiniteField> {
        FiniteField::prime(3).unwrap()
    }

    #[test]
    fn default_profile_examples() {
        let p = default_profile(2).unwrap();
        assert_eq!((p.k, p.l, p.big_l), (vec![0, 0, 1], vec![0, 0, 1], 0));
        let p = default_profile(3).unwrap();
        assert_eq!((p.k, p.l, p.big_l), (vec![0, 0, 1, 2], vec![0, 0, 1, 3], 1));
        let p = default_profile(4).unwrap();
        assert_eq!((p.k, p.l, p.big_l), (vec![0, 0, 1, 2, 3], vec![0, 0, 1, 3, 6], 4));
        assert_eq!(default_profile(1).unwrap_err(), ConstructError::GammaTooSmall(1));
    }

    #[test]
    fn right_profile_examples() {
        let p2 = default_profile(2).unwrap();
        let p3 = default_profile(3).unwrap();
        assert_eq!(build_right_profile(2, 3, 9, &p2), RightSlopes { n: 0, m: 0, kp: vec![1, 0] });
        assert_eq!(build_right_profile(3, 3, 28, &p3), RightSlopes { n: 0, m: 3, kp: vec![2, 1, 0] });
        assert_eq!(build_right_profile(3, 3, 27, &p3), RightSlopes { n: 1, m: 4, kp: vec![3, 2, 0] });
    }

    #[test]
    fn right_profile_congruence_holds_broadly() {
        for gamma in 2..=6usize {
            let p = default_profile(gamma).unwrap();
            for q in [2u64, 3, 4, 5, 7] {
                for genus in 2..40u64 {
                    let rs = build_right_profile(gamma, q, genus, &p);
                    let g = gamma as i64;
                    assert!(rs.kp[1] > g - 3);
                    assert_eq!(rs.n, genus as i64 % (g - 1));
                    if let Ok(right) = solve_r(gamma, &p, &rs.kp, genus, q) {
                        let poly = lattice::delta_r(gamma, &right.kp, right.r).unwrap();
                        let interior = lattice::lattice_counts(&poly).unwrap().interior as i64;
                        assert_eq!(interior, genus as i64 + q as i64 * p.big_l);
                    }
                }
            }
        }
    }

    #[test]
    fn solve_r_examples() {
        let p2 = default_profile(2).unwrap();
        let p3 = default_profile(3).unwrap();
        assert_eq!(solve_r(2, &p2, &[1, 0], 9, 3).unwrap().r, 9);
        let r = solve_r(3, &p3, &[2, 1, 0], 28, 3).unwrap();
        assert_eq!((r.r, r.lp.clone()), (14, vec![0, 2, 3, 3]));
        assert_eq!(solve_r(2, &p2, &[1, 0], 8, 3).unwrap().r, 8);
        assert!(matches!(solve_r(3, &p3, &[9, 8, 0], 2, 3), Err(ConstructError::GenusTooSmall(_))));
    }

    #[test]
    fn degree_plan_examples() {
        let inst = ConstructionInstance::new(f3(), 2, 9).unwrap();
        assert_eq!(inst.d, vec![3, 5, 1]);
        let inst = ConstructionInstance::new(f3(), 3, 28).unwrap();
        assert_eq!(inst.d, vec![10, 12, 8, 0]);
        assert_eq!(inst.right.r, 14);
        assert_eq!(
            ConstructionInstance::new(f3(), 3, 12).unwrap_err(),
            ConstructError::InfeasibleDegree { index: 3, value: -8 }
        );
    }

    #[test]
    fn alpha_and_beta() {
        let fam = Family::new(f3(), default_profile(2).unwrap());
        assert_eq!(fam.alpha, UniPoly::from_u64s(&[0, 2, 0, 1]));
        assert_eq!(fam.beta, UniPoly::from_u64s(&[1, 0, 1]));
        let roots = f3().polys().roots_in_field(&fam.alpha, 1 << 24).unwrap();
        assert_eq!(roots.len(), 3);
    }

    #[test]
    fn assemble_examples() {
        let k = f3();
        let inst = ConstructionInstance::new(k.clone(), 2, 9).unwrap();
        let mut rng = trial_rng(1, 0);
        let g = sample_tuple(3, &inst.d, &mut rng);
        let f = inst.assemble_f(&g).unwrap();
        let degs: Vec<_> = f.f.iter().map(|x| x.degree().unwrap()).collect();
        assert_eq!(degs, vec![10, 10, 9]);
        // explicit formula with δ = (1,1,0), δ′ = (1,0,1)
        let r = k.polys();
        let (a, b) = (&inst.family.alpha, &inst.family.beta);
        let one = UniPoly::one();
        let f0 = r.mul(b, &r.add(&one, &r.mul(&r.mul(a, b), &g[0])));
        let f1 = r.mul(b, &r.add(&one, &r.mul(a, &g[1])));
        let f2 = r.mul(a, &r.add(&one, &r.mul(&r.mul(a, b), &g[2])));
        assert_eq!(f.f, vec![f0, f1, f2]);

        let mut bad = g.clone();
        bad[1] = UniPoly::from_u64s(&[1, 1]);
        assert!(matches!(inst.assemble_f(&bad), Err(ConstructError::DegreeMismatch { index: 1, .. })));
    }

    #[test]
    fn eisenstein_and_valuation_pattern() {
        let k = f3();
        for (gamma, genus) in [(2usize, 9u64), (3, 28)] {
            let inst = ConstructionInstance::new(k.clone(), gamma, genus).unwrap();
            let r = k.polys();
            for s in 0..5 {
                let g = sample_tuple(3, &inst.d, &mut trial_rng(s, 0));
                let f = inst.assemble_f(&g).unwrap();
                let beta = &inst.family.beta;
                for (i, fi) in f.f.iter().enumerate() {
                    let vb = r.valuation_at(fi, beta).unwrap().unwrap();
                    if i < gamma {
                        assert!(vb >= 1);
                    } else {
                        assert_eq!(vb, 0);
                    }
                    for a in 0..3 {
                        let p = UniPoly::new(vec![k.neg(FqElem(a)), FqElem::ONE]);
                        assert_eq!(r.valuation_at(fi, &p).unwrap().unwrap() as i64, inst.profile().l[i]);
                    }
                }
                assert_eq!(r.valuation_at(&f.f[0], beta).unwrap(), Some(1));
                assert!(curve::is_delta_polynomial(&f, &inst.delta_r().unwrap()));
            }
        }
    }

    #[test]
    fn capital_f_quadratic_case() {
        let k = f3();
        let inst = ConstructionInstance::new(k.clone(), 2, 9).unwrap();
        let r = k.polys();
        let g = sample_tuple(3, &inst.d, &mut trial_rng(5, 3));
        let f = inst.assemble_f(&g).unwrap();
        let disc = r.sub(&r.mul(&f.f[1], &f.f[1]), &r.scale(&r.mul(&f.f[0], &f.f[2]), k.from_i64(4)));
        let expect = r.div_exact(&disc, &inst.family.beta).unwrap();
        assert_eq!(inst.capital_f(&f).unwrap(), expect);
    }

    #[test]
    fn capital_f_valuations() {
        let k = f3();
        for (gamma, genus) in [(2usize, 9u64), (3, 28)] {
            let inst = ConstructionInstance::new(k.clone(), gamma, genus).unwrap();
            let r = k.polys();
            for s in 0..5 {
                let g = sample_tuple(3, &inst.d, &mut trial_rng(s, 1));
                let f = inst.assemble_f(&g).unwrap();
                let disc = curve::discriminant_y(&k, &f).unwrap();
                for a in 0..3 {
                    let p = UniPoly::new(vec![k.neg(FqElem(a)), FqElem::ONE]);
                    assert_eq!(r.valuation_at(&disc, &p).unwrap(), Some(2 * inst.profile().big_l as u32));
                }
                let big_f = inst.capital_f(&f).unwrap();
                let vb = r.valuation_at(&big_f, &inst.family.beta).unwrap().unwrap();
                if gamma % 3 != 0 {
                    assert_eq!(vb, 0);
                } else {
                    assert!(vb >= 1);
                }
            }
        }
    }

    #[test]
    fn search_is_deterministic() {
        let inst = ConstructionInstance::new(f3(), 2, 9).unwrap();
        let cfg = SearchConfig { seed: 11, ..Default::default() };
        let a = search_tuple(&inst, &cfg).unwrap();
        let b = search_tuple(&inst, &SearchConfig { jobs: Some(2), ..cfg }).unwrap();
        assert_eq!(a.g_tuple, b.g_tuple);
        assert_eq!(a.trials, b.trials);
        assert!(k_is_squarefree(&a.capital_f));
        // the reported trial is the first success
        for i in 0..a.trials - 1 {
            let g = sample_tuple(3, &inst.d, &mut trial_rng(11, i));
            assert!(inst.family.evaluate(&g).unwrap().is_err());
        }
    }

    fn k_is_squarefree(p: &UniPoly) -> bool {
        f3().polys().is_squarefree(p).unwrap()
    }

    #[test]
    fn char2_exhausts_with_advisory() {
        let f2 = FiniteField::prime(2).unwrap();
        let inst = ConstructionInstance::new(f2, 2, 20).unwrap();
        let err = search_tuple(&inst, &SearchConfig { seed: 1, budget: 200, jobs: None }).unwrap_err();
        match err {
            ConstructError::BudgetExhausted { trials, advisory, .. } => {
                assert_eq!(trials, 200);
                assert_eq!(advisory.as_deref(), Some(CHAR2_ADVISORY));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn char2_discriminants_are_squares() {
        for spec in [FieldSpec::new(2, 1), FieldSpec::new(2, 2)] {
            let k = FiniteField::from_spec(&spec).unwrap();
            let r = k.polys();
            for gamma in 2..=4 {
                let fam = Family::new(k.clone(), default_profile(gamma).unwrap());
                for i in 0..20 {
                    let g = sample_tuple(k.order(), &vec![3; gamma + 1], &mut trial_rng(5, i));
                    let f = fam.assemble(&g);
                    let disc = curve::discriminant_y(&k, &f).unwrap();
                    // over a perfect field of characteristic 2, h' = 0 iff h is a square
                    assert!(r.derivative(&disc).is_zero());
                    let big_f = fam.reduced_discriminant(&f).unwrap();
                    assert!(big_f.is_zero() || !r.is_squarefree(&big_f).unwrap());
                }
            }
        }
    }
}
