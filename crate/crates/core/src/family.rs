//! Seeded random families of chart homomorphisms with known ground truth,
//! used by the property suites: free charts, U-monoid charts, and
//! semistable charts shaped like X_1...X_l = a t + B . Y.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::monoid::{MonoidError, MonoidHom, MonoidPresentation};
use crate::semistable::SemistableStructure;
use crate::word::Word;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("parameters out of the documented range: {0}")]
    ParamsOutOfRange(String),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyShape {
    Free,
    UMonoid,
    Semistable,
}

/// Ranges for the random draws. All ranges are inclusive.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FamilyParams {
    /// Number of Delta-supported generators (semistable), 2..=4.
    pub l_min: usize,
    pub l_max: usize,
    /// Number of extra Y generators (semistable), 0..=3.
    pub r_min: usize,
    pub r_max: usize,
    /// Maximal B entry, <= 3.
    pub b_max: u32,
    /// Free rank (free) or U-monoid size (u-monoid), <= 4.
    pub a_min: usize,
    pub a_max: usize,
    /// Congruence bound of the generated presentations.
    pub bound: u32,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams {
            l_min: 2,
            l_max: 4,
            r_min: 0,
            r_max: 3,
            b_max: 3,
            a_min: 0,
            a_max: 3,
            bound: 8,
        }
    }
}

impl FamilyParams {
    fn validate(&self) -> Result<(), FamilyError> {
        if self.l_max > 4 || self.r_max > 3 || self.b_max > 3 || self.a_max > 4 {
            return Err(FamilyError::ParamsOutOfRange(format!(
                "l <= 4, r <= 3, B <= 3, a <= 4 required, got {:?}",
                self
            )));
        }
        if self.l_min < 1 || self.l_min > self.l_max || self.r_min > self.r_max {
            return Err(FamilyError::ParamsOutOfRange(
                "empty or inverted ranges".into(),
            ));
        }
        Ok(())
    }
}

/// Ground truth carried by each generated instance.
#[derive(Debug, Clone)]
pub enum ExpectedCase {
    Free { rank: usize },
    UMonoid { size: usize },
    Semistable { structure: SemistableStructure },
}

#[derive(Debug, Clone)]
pub struct FamilyInstance {
    pub index: usize,
    pub hom: MonoidHom,
    pub expected: ExpectedCase,
}

/// Deterministic family generation: identical (shape, params, seed, count)
/// produce identical instances.
pub fn generate_family(
    shape: FamilyShape,
    params: &FamilyParams,
    seed: u64,
    count: usize,
) -> Result<Vec<FamilyInstance>, FamilyError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|index| {
            let inst = match shape {
                FamilyShape::Free => free_instance(&mut rng, params)?,
                FamilyShape::UMonoid => u_monoid_instance(&mut rng, params)?,
                FamilyShape::Semistable => semistable_instance(&mut rng, params)?,
            };
            Ok(FamilyInstance {
                index,
                hom: inst.0,
                expected: inst.1,
            })
        })
        .collect()
}

fn free_instance(
    rng: &mut ChaCha8Rng,
    params: &FamilyParams,
) -> Result<(MonoidHom, ExpectedCase), FamilyError> {
    let a = rng.gen_range(params.a_min..=params.a_max);
    let mut gens = vec!["t".to_string()];
    gens.extend((1..=a).map(|i| format!("n{i}")));
    let p = MonoidPresentation::free(gens, params.bound);
    let q = MonoidPresentation::free(vec!["t".into()], params.bound);
    let mut img = vec![0u32; p.gen_count()];
    img[0] = 1;
    let hom = MonoidHom::new(q, p, vec![img])?;
    Ok((hom, ExpectedCase::Free { rank: a }))
}

fn u_monoid_instance(
    rng: &mut ChaCha8Rng,
    params: &FamilyParams,
) -> Result<(MonoidHom, ExpectedCase), FamilyError> {
    let a = rng.gen_range(params.a_min.max(2)..=params.a_max.max(2));
    let with_base: bool = rng.gen();
    let u_gens: Vec<String> = (1..=a).map(|i| format!("u{i}")).collect();
    if with_base {
        let mut gens = vec!["t".to_string()];
        gens.extend(u_gens);
        let n = gens.len();
        let mut l = vec![0u32; n];
        let mut r = vec![0u32; n];
        l[1] = 2;
        r[2] = 2;
        let p = MonoidPresentation::new(gens, vec![(l, r)], params.bound)?;
        let q = MonoidPresentation::free(vec!["t".into()], params.bound);
        let mut img = vec![0u32; n];
        img[0] = 1;
        let hom = MonoidHom::new(q, p, vec![img])?;
        Ok((hom, ExpectedCase::UMonoid { size: a }))
    } else {
        let n = u_gens.len();
        let mut l = vec![0u32; n];
        let mut r = vec![0u32; n];
        l[0] = 2;
        r[1] = 2;
        let p = MonoidPresentation::new(u_gens, vec![(l, r)], params.bound)?;
        let q = MonoidPresentation::trivial(params.bound);
        let hom = MonoidHom::new(q, p, vec![])?;
        Ok((hom, ExpectedCase::UMonoid { size: a }))
    }
}

fn semistable_instance(
    rng: &mut ChaCha8Rng,
    params: &FamilyParams,
) -> Result<(MonoidHom, ExpectedCase), FamilyError> {
    let l = rng.gen_range(params.l_min.max(2)..=params.l_max);
    let r = rng.gen_range(params.r_min..=params.r_max);
    let a: u32 = rng.gen_range(1..=2);
    let b_entries: Vec<u32> = (0..r).map(|_| rng.gen_range(0..=params.b_max)).collect();

    let mut gens: Vec<String> = (1..=l).map(|i| format!("x{i}")).collect();
    gens.extend((1..=r).map(|j| format!("y{j}")));
    gens.push("t".into());
    let n = gens.len();
    // relation: x_1 + ... + x_l = a t + sum b_j y_j
    let mut lhs = vec![0u32; n];
    lhs[..l].fill(1);
    let mut rhs = vec![0u32; n];
    rhs[l..l + r].copy_from_slice(&b_entries);
    rhs[n - 1] = a;
    let p = MonoidPresentation::new(gens, vec![(lhs, rhs)], params.bound)?;
    let q = MonoidPresentation::free(vec!["t".into()], params.bound);
    let mut img = vec![0u32; n];
    img[n - 1] = 1;
    let hom = MonoidHom::new(q, p, vec![img])?;

    let sigma: Vec<Word> = (0..l + r).map(|i| crate::word::unit(n, i)).collect();
    let mut delta = vec![0u32; l + r];
    delta[..l].fill(1);
    let mut b = vec![0u32; l + r];
    b[l..].copy_from_slice(&b_entries);
    let structure = SemistableStructure {
        sigma,
        q0: vec![a],
        delta,
        b,
    };
    Ok((hom, ExpectedCase::Semistable { structure }))
}

/// The canonical single-generator U-monoid presentation of a given size,
/// used by torsion tests.
pub fn u_monoid_presentation(
    size: usize,
    bound: u32,
) -> Result<Arc<MonoidPresentation>, FamilyError> {
    let gens: Vec<String> = (1..=size).map(|i| format!("u{i}")).collect();
    let mut l = vec![0u32; size];
    let mut r = vec![0u32; size];
    l[0] = 2;
    r[1] = 2;
    Ok(MonoidPresentation::new(gens, vec![(l, r)], bound)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let params = FamilyParams::default();
        let a = generate_family(FamilyShape::Semistable, &params, 42, 10).unwrap();
        let b = generate_family(FamilyShape::Semistable, &params, 42, 10).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.hom.target().generators(), y.hom.target().generators());
            assert_eq!(x.hom.target().relations(), y.hom.target().relations());
        }
        let c = generate_family(FamilyShape::Semistable, &params, 43, 10).unwrap();
        let differs = a
            .iter()
            .zip(&c)
            .any(|(x, y)| x.hom.target().relations() != y.hom.target().relations());
        assert!(differs, "different seeds should vary the family");
    }

    #[test]
    fn generated_structures_validate() {
        let params = FamilyParams::default();
        for inst in generate_family(FamilyShape::Semistable, &params, 7, 5).unwrap() {
            let ExpectedCase::Semistable { structure } = &inst.expected else {
                panic!("semistable family carries structures")
            };
            let rep = crate::semistable::validate_semistable(&inst.hom, structure).unwrap();
            assert!(rep.state.is_true());
        }
    }

    #[test]
    fn params_validated() {
        let params = FamilyParams {
            b_max: 9,
            ..FamilyParams::default()
        };
        assert!(matches!(
            generate_family(FamilyShape::Semistable, &params, 1, 1),
            Err(FamilyError::ParamsOutOfRange(_))
        ));
    }

    #[test]
    fn free_zero_rank_is_identity_chart() {
        let params = FamilyParams {
            a_min: 0,
            a_max: 0,
            ..FamilyParams::default()
        };
        let inst = &generate_family(FamilyShape::Free, &params, 1, 1).unwrap()[0];
        assert_eq!(inst.hom.target().gen_count(), 1);
    }
}
