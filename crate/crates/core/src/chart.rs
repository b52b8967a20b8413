//! Chart-level classification of an integral homomorphism of fine sharp
//! monoids into the three local-structure cases:
//!
//!   I   split with free complement (smooth),
//!   II  split with complement the U-monoid of monomials of
//!       Z[U_1..U_a]/(U_1^2 - U_2^2), a >= 2,
//!   III non-split carrying the unique semistable structure with
//!       #Supp(Delta) >= 2,
//!
//! together with the boundary monomial content, the marking value, relative
//! log-triviality and regularity bookkeeping in the truncated monoid
//! algebra.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::monoid::{self, MonoidHom, MonoidPresentation};
use crate::semistable::{self, DetectOptions, SemistableError, SemistableStructure};
use crate::series::{self, SeriesRing};
use crate::snf;
use crate::word::{self, Word};

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("input is not of any local-structure shape: {0}")]
    NotClassifiable(String),
    #[error("undecided at bound {bound}")]
    UndecidedAtBound { bound: u32 },
    #[error("boundary monomial is undefined in case II (freeness hypothesis fails)")]
    CaseII,
    #[error("characteristic 2 coefficient rings cannot realize case II")]
    CharacteristicTwo,
    #[error("series realization needs a free rank-one base")]
    UnsupportedBase,
    #[error(transparent)]
    Semistable(#[from] SemistableError),
    #[error(transparent)]
    Monoid(#[from] crate::monoid::MonoidError),
    #[error(transparent)]
    Series(#[from] series::SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChartCase {
    I,
    II,
    III,
}

/// Classification result. Exactly one case holds; cases I/II carry the
/// complement, case III the validated semistable structure.
#[derive(Debug, Clone, Serialize)]
pub struct ChartClassification {
    pub case: ChartCase,
    /// Generators of the complement N (cases I and II).
    pub complement: Option<Vec<Word>>,
    /// Induced relations among the complement generators (case II).
    pub complement_relations: Vec<(Word, Word)>,
    pub structure: Option<SemistableStructure>,
    /// Elements whose regularity the local structure asserts: Irr(N) in
    /// cases I/II, sigma minus Supp(Delta) in case III.
    pub regular_elements: Vec<Word>,
}

/// Classifies an integral homomorphism of fine sharp monoids.
pub fn classify_chart(h: &MonoidHom) -> Result<ChartClassification, ChartError> {
    let p = h.target();
    if !p.is_sharp().state.is_true() || !h.source().is_sharp().state.is_true() {
        return Err(ChartError::NotClassifiable(
            "source and target must be sharp".into(),
        ));
    }
    let structures = semistable::all_structures(h, DetectOptions::default())?;
    if let Some(s) = structures.first() {
        if s.delta_support().len() >= 2 {
            let regular_elements: Vec<Word> = s
                .sigma
                .iter()
                .enumerate()
                .filter(|(i, _)| s.delta[*i] == 0)
                .map(|(_, w)| w.clone())
                .collect();
            return Ok(ChartClassification {
                case: ChartCase::III,
                complement: None,
                complement_relations: Vec::new(),
                structure: Some(s.clone()),
                regular_elements,
            });
        }
    }
    let split = semistable::splits(h)?;
    match split.state {
        crate::monoid::TriState::True => {}
        crate::monoid::TriState::False => {
            return Err(ChartError::NotClassifiable(
                "non-split but no semistable structure was found".into(),
            ))
        }
        crate::monoid::TriState::Undecided => {
            return Err(ChartError::UndecidedAtBound {
                bound: split.bound_used,
            })
        }
    }
    let n_gens = split.complement.expect("split answer carries a complement");
    let relations = induced_relations(p, &n_gens, 4)?;
    if relations.is_empty() {
        return Ok(ChartClassification {
            case: ChartCase::I,
            complement: Some(n_gens.clone()),
            complement_relations: Vec::new(),
            structure: None,
            regular_elements: n_gens,
        });
    }
    if let Some(pair) = u_monoid_shape(&n_gens, &relations) {
        let _ = pair;
        return Ok(ChartClassification {
            case: ChartCase::II,
            complement: Some(n_gens.clone()),
            complement_relations: relations,
            structure: None,
            regular_elements: n_gens,
        });
    }
    Err(ChartError::NotClassifiable(
        "split complement is neither free nor the U-monoid".into(),
    ))
}

/// Minimal relations among submonoid generators, found by scanning sums of
/// at most `degree` generators for collisions in P.
fn induced_relations(
    p: &Arc<MonoidPresentation>,
    n_gens: &[Word],
    degree: u32,
) -> Result<Vec<(Word, Word)>, ChartError> {
    let combo = |t: &[u32]| -> Word {
        let mut out = vec![0u32; p.gen_count()];
        for (g, &mult) in n_gens.iter().zip(t) {
            if mult > 0 {
                out = word::add(&out, &word::scale(g, mult));
            }
        }
        out
    };
    let mut seen: HashMap<Word, Word> = HashMap::new();
    let mut relations = Vec::new();
    for t in word::words_up_to(n_gens.len(), degree) {
        let nf = p.normal_form(&combo(&t))?;
        if let Some(first) = seen.get(&nf) {
            // keep only relations not implied by earlier ones
            let implied = relations.iter().any(|(l, r): &(Word, Word)| {
                (word::le(l, &t) && word::le(r, first)) || (word::le(r, &t) && word::le(l, first))
            });
            if !implied {
                relations.push((t.clone(), first.clone()));
            }
        } else {
            seen.insert(nf, t);
        }
    }
    Ok(relations)
}

/// Recognizes the U-monoid relation pattern: a single relation 2e_i = 2e_j
/// (up to renaming), at least two generators, and a Z/2 torsion factor in
/// the groupification.
fn u_monoid_shape(n_gens: &[Word], relations: &[(Word, Word)]) -> Option<(usize, usize)> {
    if n_gens.len() < 2 || relations.len() != 1 {
        return None;
    }
    let (l, r) = &relations[0];
    let li = word::support(l);
    let ri = word::support(r);
    if li.len() != 1 || ri.len() != 1 || li[0] == ri[0] {
        return None;
    }
    if l[li[0]] != 2 || r[ri[0]] != 2 {
        return None;
    }
    // groupification of <n_gens | 2e_i = 2e_j> has torsion exactly Z/2
    let cols = n_gens.len();
    let mut entries = vec![0i128; cols];
    entries[li[0]] = 2;
    entries[ri[0]] = -2;
    let g = snf::cokernel(1, cols, &entries);
    if g.torsion_divisors == vec![2] {
        Some((li[0], ri[0]))
    } else {
        None
    }
}

/// The monoid-level content of the boundary monomial t_x: Irr(N) in case I,
/// sigma minus Supp(Delta) in case III. Case II is excluded by the freeness
/// hypothesis of the dualizing-sheaf statement.
pub fn boundary_monomial(c: &ChartClassification) -> Result<Vec<Word>, ChartError> {
    match c.case {
        ChartCase::I => Ok(c.complement.clone().unwrap_or_default()),
        ChartCase::III => {
            let s = c.structure.as_ref().expect("case III carries a structure");
            Ok(s.sigma
                .iter()
                .enumerate()
                .filter(|(i, _)| s.delta[*i] == 0)
                .map(|(_, w)| w.clone())
                .collect())
        }
        ChartCase::II => Err(ChartError::CaseII),
    }
}

/// The marking value q0 for case III charts; `None` otherwise.
pub fn marking_value(c: &ChartClassification) -> Option<Word> {
    match c.case {
        ChartCase::III => c.structure.as_ref().map(|s| s.q0.clone()),
        _ => None,
    }
}

/// Relative log-triviality: no irreducible of P escapes the image of Q.
pub fn is_log_trivial(h: &MonoidHom) -> Result<bool, ChartError> {
    let bound = h.target().congruence_bound().min(8);
    Ok(semistable::canonical_sigma(h, bound)?.is_empty())
}

/// Regularity verdicts for the flagged elements, computed in a truncated
/// realization of the monoid algebra A (x)_{A[Q]} A[P].
#[derive(Debug, Clone, Serialize)]
pub struct RegularityVerdicts {
    pub all_regular: bool,
    pub per_element: Vec<(Word, bool)>,
}

/// Realizes the chart ring at truncation and runs the regularity check on
/// every flagged element.
///
/// Case I: A[N] is a truncated polynomial ring over F_p[t]/(t^N).
/// Case II: A[N] = A[U]/(U_i^2 - U_j^2) over F_p with p odd.
/// Case III: A[X, Y]/(X^Delta - t^a Y^B) where f(q0) = a t; requires the
/// base to be free of rank one.
pub fn verify_regular_elements(
    h: &MonoidHom,
    c: &ChartClassification,
    p: u8,
    precision: u8,
    degree: u32,
) -> Result<RegularityVerdicts, ChartError> {
    match c.case {
        ChartCase::I => {
            let gens = c.complement.as_ref().expect("case I complement");
            let coeff = crate::ring::FiniteRing::truncated_series(p, precision)
                .map_err(|e| ChartError::NotClassifiable(e.to_string()))?;
            let names = (0..gens.len()).map(|i| format!("N{i}")).collect();
            let ring = SeriesRing::new(coeff, names, None, degree)?;
            let mut per_element = Vec::new();
            for (i, g) in gens.iter().enumerate() {
                let reg = series::is_regular(&ring, &ring.var(i));
                per_element.push((g.clone(), reg.regular));
            }
            let all_regular = per_element.iter().all(|(_, r)| *r);
            Ok(RegularityVerdicts {
                all_regular,
                per_element,
            })
        }
        ChartCase::II => {
            if p == 2 {
                return Err(ChartError::CharacteristicTwo);
            }
            let gens = c.complement.as_ref().expect("case II complement");
            let (li, ri) = {
                let (l, r) = &c.complement_relations[0];
                (word::support(l)[0], word::support(r)[0])
            };
            // orient so the rewritten monomial sits below the relation
            // monomial in the term order: rewrite the later variable
            let (keep, rewrite) = if li < ri { (li, ri) } else { (ri, li) };
            let coeff = crate::ring::FiniteRing::prime_field(p)
                .map_err(|e| ChartError::NotClassifiable(e.to_string()))?;
            let names: Vec<String> = (0..gens.len()).map(|i| format!("U{i}")).collect();
            let mut t_exp = vec![0u32; gens.len()];
            t_exp[rewrite] = 2;
            let mut g_mono = vec![0u32; gens.len()];
            g_mono[keep] = 2;
            let ring = SeriesRing::new(
                coeff.clone(),
                names,
                Some((t_exp, vec![(g_mono, coeff.one())])),
                degree,
            )?;
            let mut per_element = Vec::new();
            for (i, g) in gens.iter().enumerate() {
                let reg = series::is_regular(&ring, &ring.var(i));
                per_element.push((g.clone(), reg.regular));
            }
            let all_regular = per_element.iter().all(|(_, r)| *r);
            Ok(RegularityVerdicts {
                all_regular,
                per_element,
            })
        }
        ChartCase::III => {
            let q = h.source();
            if q.gen_count() != 1 || !q.relations().is_empty() {
                return Err(ChartError::UnsupportedBase);
            }
            let s = c.structure.as_ref().expect("case III structure");
            let supp = s.delta_support();
            let rest: Vec<usize> = (0..s.sigma.len()).filter(|i| !supp.contains(i)).collect();
            let a = s.q0[0];
            let b: Vec<u32> = rest.iter().map(|&i| s.b[i]).collect();
            let ring =
                SeriesRing::model_ring(p, precision, supp.len(), rest.len(), a, &b, None, degree)?;
            let mut per_element = Vec::new();
            for (k, &i) in rest.iter().enumerate() {
                let reg = series::is_regular(&ring, &ring.var(supp.len() + k));
                per_element.push((s.sigma[i].clone(), reg.regular));
            }
            let all_regular = per_element.iter().all(|(_, r)| *r);
            Ok(RegularityVerdicts {
                all_regular,
                per_element,
            })
        }
    }
}

/// Convenience: integrality precheck used by the CLI before classification.
pub fn integrality_precheck(h: &MonoidHom, bound: u32) -> Result<bool, ChartError> {
    Ok(monoid::is_integral_hom(h, bound)?.state.is_true())
}
