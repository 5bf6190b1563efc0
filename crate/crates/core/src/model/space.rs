//! Membership in `M₀`, seeded sampling near a fixed center, and certified
//! straight-line paths between members.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::branch::{BranchPolynomial, REAL_DIMENSION};
use super::certify::{certify_sign, SignOutcome, TorusCertificate, ZeroWitness};
use super::singular::{singular_locus, SingularityReport};
use crate::poly::germ::GermType;
use crate::quadric::GaussRat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct M0Certificate {
    pub torus: TorusCertificate,
    pub corners_nonzero: bool,
    pub singularities: SingularityReport,
}

impl M0Certificate {
    pub fn is_valid(&self) -> bool {
        self.corners_nonzero
            && !self.singularities.non_reduced
            && self.singularities.points.iter().all(|p| p.germ.is_simple())
            && self.torus.sign.abs() == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rejection {
    /// The torus restriction vanishes somewhere.
    Sign(ZeroWitness),
    /// `a_{i,j} = 0` for a corner `(i, j)`.
    Corner(u8, u8),
    /// A singular point that is not simple, or a multiple component.
    Singularity(SingularityReport),
}

impl Rejection {
    pub fn clause(&self) -> &'static str {
        match self {
            Rejection::Sign(_) => "sign",
            Rejection::Corner(..) => "corner",
            Rejection::Singularity(_) => "singularity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inconclusive {
    BudgetExhausted { evaluated: usize, pending: usize },
    UnknownSingularity(SingularityReport),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum M0Verdict {
    Valid(M0Certificate),
    Rejected(Rejection),
    Inconclusive(Inconclusive),
}

impl M0Verdict {
    pub fn certificate(&self) -> Option<&M0Certificate> {
        match self {
            M0Verdict::Valid(c) => Some(c),
            _ => None,
        }
    }
}

/// Checks the three clauses in order: sign on the torus, corner
/// coefficients, simple singularities. The first failing clause is reported.
pub fn is_in_m0(p: &BranchPolynomial, budget: usize) -> M0Verdict {
    let torus = match certify_sign(p, budget) {
        SignOutcome::Certified(c) => c,
        SignOutcome::HasZero(w) => return M0Verdict::Rejected(Rejection::Sign(w)),
        SignOutcome::BudgetExhausted { evaluated, pending } => {
            return M0Verdict::Inconclusive(Inconclusive::BudgetExhausted { evaluated, pending })
        }
    };
    for (i, j) in [(0, 0), (0, 4), (4, 0), (4, 4)] {
        if p.coeff(i, j).is_zero() {
            return M0Verdict::Rejected(Rejection::Corner(i, j));
        }
    }
    let singularities = singular_locus(p);
    let types = singularities.types();
    if types.contains(&GermType::NotSimple) {
        return M0Verdict::Rejected(Rejection::Singularity(singularities));
    }
    if types.iter().any(|t| !t.is_simple()) {
        return M0Verdict::Inconclusive(Inconclusive::UnknownSingularity(singularities));
    }
    M0Verdict::Valid(M0Certificate {
        torus,
        corners_nonzero: true,
        singularities,
    })
}

fn real_coeff(n: i64, d: i64) -> GaussRat {
    GaussRat::new(BigRational::new(n.into(), d.into()), BigRational::zero())
}

/// `x²(1 + y⁴) + (1/10)(1 + y⁴ + x⁴ + x⁴y⁴) + (1/10)x²(1 − y⁴)`.
///
/// Without the last term the curve is a product of two quartics in `y`
/// and in `x`, with sixteen nodes. The torus restriction is
/// `(cos⁴φ + sin⁴φ)(1 + cos 2θ / 5) + cos 2φ / 10`, which is at least
/// `2/5 + 2c²/5 − |c|/10 > 0` with `c = cos 2φ`.
pub fn center_polynomial() -> BranchPolynomial {
    BranchPolynomial::validate([
        ((2, 0), real_coeff(11, 10)),
        ((2, 4), real_coeff(9, 10)),
        ((0, 0), real_coeff(1, 10)),
        ((0, 4), real_coeff(1, 10)),
        ((4, 0), real_coeff(1, 10)),
        ((4, 4), real_coeff(1, 10)),
    ])
    .expect("center polynomial is admissible")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Exposition {
    Plus,
    Minus,
}

impl std::fmt::Display for Exposition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Exposition::Plus => "PlusExposition",
            Exposition::Minus => "MinusExposition",
        })
    }
}

/// The exposition whose real part is empty, labelled by the sign of `f`.
pub fn exposition_sign(cert: &TorusCertificate) -> Exposition {
    if cert.sign > 0 {
        Exposition::Plus
    } else {
        Exposition::Minus
    }
}

/// Real coordinates `k/1000 · radius` with `k` uniform in `−1000..=1000`.
pub fn random_perturbation<R: Rng>(rng: &mut R, radius: &BigRational) -> Vec<BigRational> {
    (0..REAL_DIMENSION)
        .map(|_| BigRational::new(rng.gen_range(-1000i64..=1000).into(), 1000.into()) * radius)
        .collect()
}

pub const SAMPLE_ATTEMPTS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SampleError {
    #[error("no member of M0 found after {0} attempts")]
    RejectionLimitExceeded(usize),
}

/// `p* + q` for a seeded random perturbation `q` of size at most `radius`
/// in each real coordinate, resampled until it is certified in `M₀`.
pub fn sample_m0(seed: u64, radius: &BigRational, budget: usize) -> Result<BranchPolynomial, SampleError> {
    let center = center_polynomial();
    if radius.is_zero() {
        return Ok(center);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = center.real_coordinates();
    for _ in 0..SAMPLE_ATTEMPTS {
        let q = random_perturbation(&mut rng, radius);
        let x: Vec<BigRational> = base.iter().zip(&q).map(|(a, b)| a + b).collect();
        let Some(p) = BranchPolynomial::from_real_coordinates(&x) else {
            continue;
        };
        if matches!(is_in_m0(&p, budget), M0Verdict::Valid(_)) {
            return Ok(p);
        }
    }
    Err(SampleError::RejectionLimitExceeded(SAMPLE_ATTEMPTS))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSample {
    #[serde(with = "crate::json::rational")]
    pub t: BigRational,
    pub polynomial: BranchPolynomial,
    pub certificate: M0Certificate,
    pub repaired: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("endpoint {0} is not certified in M0")]
    EndpointNotCertified(usize),
    #[error("endpoints have opposite signs on the torus; negate one of them")]
    OppositeSigns,
    #[error("could not repair the sample at t = {0}")]
    PathRepairFailed(String),
    #[error("a path needs at least two samples")]
    TooFewSamples,
}

pub const REPAIR_ATTEMPTS: u64 = 8;

/// Certifies `(1 − t)p₀ + t·p₁` at `samples` equally spaced `t ∈ [0, 1]`.
/// A failing sample is replaced by `p_t + μ q` with `μ = (n+1)/100` and a
/// random perturbation `q` seeded by `(seed, index, n)`, for attempts
/// `n < REPAIR_ATTEMPTS`. A repaired sample must keep the endpoints' sign.
pub fn connect_path(
    p0: &BranchPolynomial,
    p1: &BranchPolynomial,
    samples: usize,
    seed: u64,
    budget: usize,
) -> Result<Vec<PathSample>, PathError> {
    if samples < 2 {
        return Err(PathError::TooFewSamples);
    }
    let mut signs = Vec::new();
    for (n, p) in [p0, p1].into_iter().enumerate() {
        match is_in_m0(p, budget) {
            M0Verdict::Valid(c) => signs.push(c.torus.sign),
            _ => return Err(PathError::EndpointNotCertified(n)),
        }
    }
    if signs[0] != signs[1] {
        return Err(PathError::OppositeSigns);
    }
    let sign = signs[0];
    let results: Vec<Result<PathSample, PathError>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let t = BigRational::new((k as i64).into(), ((samples - 1) as i64).into());
            let one_minus = BigRational::one() - &t;
            let pt = p0.combine(&one_minus, p1, &t);
            if let Some(p) = &pt {
                if let M0Verdict::Valid(c) = is_in_m0(p, budget) {
                    if c.torus.sign == sign {
                        return Ok(PathSample {
                            t,
                            polynomial: p.clone(),
                            certificate: c,
                            repaired: false,
                        });
                    }
                }
            }
            let base = pt.map(|p| p.real_coordinates()).unwrap_or_else(|| vec![BigRational::zero(); REAL_DIMENSION]);
            for attempt in 0..REPAIR_ATTEMPTS {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(((k as u64) << 8) | attempt);
                let mu = BigRational::new((attempt as i64 + 1).into(), 100.into());
                let q = random_perturbation(&mut rng, &mu);
                let x: Vec<BigRational> = base.iter().zip(&q).map(|(a, b)| a + b).collect();
                let Some(p) = BranchPolynomial::from_real_coordinates(&x) else {
                    continue;
                };
                if let M0Verdict::Valid(c) = is_in_m0(&p, budget) {
                    if c.torus.sign == sign {
                        return Ok(PathSample {
                            t,
                            polynomial: p,
                            certificate: c,
                            repaired: true,
                        });
                    }
                }
            }
            Err(PathError::PathRepairFailed(crate::json::format_rational(&t)))
        })
        .collect();
    results.into_iter().collect()
}
