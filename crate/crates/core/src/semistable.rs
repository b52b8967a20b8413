//! Semistable structures (sigma, q0, Delta, B) on an integral homomorphism
//! f : Q -> P of fine sharp monoids.
//!
//! The conditions are:
//!   (S1) q0 != 0, Supp(Delta) nonempty, Delta entries in {0, 1};
//!   (S2) P is generated by sigma and f(Q), and T |-> T.sigma is injective;
//!   (S3) Supp(Delta) and Supp(B) are disjoint and
//!        Delta.sigma = f(q0) + B.sigma in P;
//!   (S4) every relation T.sigma = f(q) + T'.sigma with q != 0 has
//!        T(x) > 0 on all of Supp(Delta).
//! (S2) generation, (S2) injectivity and the universal quantification in
//! (S4) are decided by enumerating relation instances with all degrees
//! bounded by the presentation's congruence bound.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::monoid::{MonoidError, MonoidHom, MonoidPresentation, TriState};
use crate::pushout::{self, CancellationCheck, PushoutError};
use crate::word::{self, Word};

#[derive(Debug, Error)]
pub enum SemistableError {
    #[error("structure indices do not match sigma (sigma has {sigma}, got {got})")]
    IllFormedStructure { sigma: usize, got: usize },
    #[error("undecided at bound {bound}")]
    UndecidedAtBound { bound: u32 },
    #[error("homomorphism does not admit a semistable structure")]
    NoSemistableStructure,
    #[error("homomorphism splits; the marking is defined only in the non-split case")]
    SplitHom,
    #[error("hypothesis ({which}) of the quotient proposition fails: {detail}")]
    HypothesisFailure { which: String, detail: String },
    #[error("pushout comparison failed: {0}")]
    IsoCheckFailed(String),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Pushout(#[from] PushoutError),
}

/// The quadruple (sigma, q0, Delta, B). `sigma` lists elements of P as
/// words; `delta` and `b` are indexed by `sigma`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemistableStructure {
    pub sigma: Vec<Word>,
    pub q0: Word,
    pub delta: Vec<u32>,
    pub b: Vec<u32>,
}

impl SemistableStructure {
    pub fn delta_support(&self) -> Vec<usize> {
        word::support(&self.delta)
    }

    pub fn b_support(&self) -> Vec<usize> {
        word::support(&self.b)
    }

    /// T.sigma as a P word.
    pub fn sigma_combination(&self, t: &[u32], p_gens: usize) -> Word {
        let mut out = vec![0u32; p_gens];
        for (x, &mult) in self.sigma.iter().zip(t) {
            if mult > 0 {
                for (o, &v) in out.iter_mut().zip(x) {
                    *o += mult * v;
                }
            }
        }
        out
    }
}

/// Table of normal forms for T.sigma and f(q) + T'.sigma instances, shared
/// by validation, detection and the property checks.
struct InstanceTable {
    /// all T in N^sigma with |T| <= bound
    ts: Vec<Word>,
    /// nf(T.sigma) for each T
    t_nf: Vec<Word>,
    /// source classes q (normal forms) of degree <= bound
    qs: Vec<Word>,
    /// nf(f(q) + T'.sigma) -> list of (q index, T' index)
    mixed: HashMap<Word, Vec<(usize, usize)>>,
}

fn build_table(
    h: &MonoidHom,
    s: &SemistableStructure,
    bound: u32,
) -> Result<InstanceTable, SemistableError> {
    let p = h.target();
    let ts = word::words_up_to(s.sigma.len(), bound);
    let mut t_nf = Vec::with_capacity(ts.len());
    for t in &ts {
        t_nf.push(p.normal_form(&s.sigma_combination(t, p.gen_count()))?);
    }
    let qs = h.source().classes_up_to(bound)?;
    let mut mixed: HashMap<Word, Vec<(usize, usize)>> = HashMap::new();
    for (qi, q) in qs.iter().enumerate() {
        let fq = h.apply(q);
        for (ti, t) in ts.iter().enumerate() {
            let w = word::add(&fq, &s.sigma_combination(t, p.gen_count()));
            let key = p.normal_form(&w)?;
            mixed.entry(key).or_default().push((qi, ti));
        }
    }
    Ok(InstanceTable {
        ts,
        t_nf,
        qs,
        mixed,
    })
}

/// Validation report for the conditions (S1)-(S4).
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub state: TriState,
    pub bound_used: u32,
    pub failed_condition: Option<String>,
}

/// Checks (S1)-(S4) for the structure `s` on `h`, with instance degrees
/// bounded by the target's congruence bound.
pub fn validate_semistable(
    h: &MonoidHom,
    s: &SemistableStructure,
) -> Result<ValidationReport, SemistableError> {
    let bound = h.target().congruence_bound().min(8);
    validate_semistable_at(h, s, bound)
}

pub fn validate_semistable_at(
    h: &MonoidHom,
    s: &SemistableStructure,
    bound: u32,
) -> Result<ValidationReport, SemistableError> {
    if s.delta.len() != s.sigma.len() || s.b.len() != s.sigma.len() {
        return Err(SemistableError::IllFormedStructure {
            sigma: s.sigma.len(),
            got: s.delta.len().max(s.b.len()),
        });
    }
    let p = h.target();
    let q_m = h.source();
    let fail = |cond: &str| ValidationReport {
        state: TriState::False,
        bound_used: bound,
        failed_condition: Some(cond.to_string()),
    };

    // (S1)
    if word::is_zero(&q_m.normal_form(&s.q0)?) {
        return Ok(fail("S1: q0 = 0"));
    }
    if s.delta_support().is_empty() {
        return Ok(fail("S1: Supp(Delta) empty"));
    }
    if s.delta.iter().any(|&d| d > 1) {
        return Ok(fail("S1: Delta entry outside {0, 1}"));
    }

    // (S3)
    if !word::supports_disjoint(&s.delta, &s.b) {
        return Ok(fail("S3: Supp(Delta) meets Supp(B)"));
    }
    let lhs = s.sigma_combination(&s.delta, p.gen_count());
    let rhs = word::add(&h.apply(&s.q0), &s.sigma_combination(&s.b, p.gen_count()));
    match p.words_equal(&lhs, &rhs) {
        TriState::True => {}
        TriState::False => return Ok(fail("S3: Delta.sigma != f(q0) + B.sigma")),
        TriState::Undecided => return Err(SemistableError::UndecidedAtBound { bound }),
    }

    let table = build_table(h, s, bound)?;

    // (S2) injectivity of N^sigma -> P on |T| <= bound
    {
        let mut seen: HashMap<&Word, &Word> = HashMap::new();
        for (t, nf) in table.ts.iter().zip(&table.t_nf) {
            if let Some(prev) = seen.insert(nf, t) {
                if prev != t {
                    return Ok(fail("S2: N^sigma -> P not injective"));
                }
            }
        }
    }
    // (S2) generation: every P generator is T.sigma + f(q) for bounded (T, q)
    for i in 0..p.gen_count() {
        let gi = p.normal_form(&word::unit(p.gen_count(), i))?;
        if !table.mixed.contains_key(&gi) {
            return Ok(fail("S2: P not generated by sigma and f(Q)"));
        }
    }

    // (S4): relations T.sigma = f(q) + T'.sigma with q != 0
    let delta_supp = s.delta_support();
    for (ti, nf) in table.t_nf.iter().enumerate() {
        if let Some(glist) = table.mixed.get(nf) {
            for &(qi, _tpi) in glist {
                if word::is_zero(&table.qs[qi]) {
                    continue;
                }
                let t = &table.ts[ti];
                if delta_supp.iter().any(|&x| t[x] == 0) {
                    return Ok(fail("S4: relation with q != 0 misses Supp(Delta)"));
                }
            }
        }
    }

    Ok(ValidationReport {
        state: TriState::True,
        bound_used: bound,
        failed_condition: None,
    })
}

/// Options for structure detection.
#[derive(Debug, Clone, Copy, Default)]
pub struct DetectOptions {
    /// Instance bound; defaults to the target's congruence bound capped at 8.
    pub bound: Option<u32>,
    /// Also search across subsets of the canonical sigma (only attempted for
    /// presentations with at most 6 generators). In the non-split case the
    /// canonical sigma is the only candidate.
    pub sigma_subset_search: bool,
}

/// The canonical sigma candidate: irreducibles of P not lying in f(Q).
pub fn canonical_sigma(h: &MonoidHom, bound: u32) -> Result<Vec<Word>, SemistableError> {
    let mut out = Vec::new();
    for e in h.target().irreducibles()? {
        if crate::monoid::in_image(h, e.word(), bound)?.is_none() {
            out.push(e.word().clone());
        }
    }
    Ok(out)
}

/// Searches for a semistable structure with sigma = irreducibles(P) \ f(Q).
/// Returns the first validated structure in deterministic order, or `None`
/// when the bounded search exhausts every candidate.
pub fn detect_semistable(
    h: &MonoidHom,
    opts: DetectOptions,
) -> Result<Option<SemistableStructure>, SemistableError> {
    let found = all_structures(h, opts)?;
    Ok(found.into_iter().next())
}

/// All validated structures on the canonical sigma (and, when requested, on
/// its subsets), in deterministic order.
pub fn all_structures(
    h: &MonoidHom,
    opts: DetectOptions,
) -> Result<Vec<SemistableStructure>, SemistableError> {
    let bound = opts
        .bound
        .unwrap_or_else(|| h.target().congruence_bound().min(8));
    let sigma = canonical_sigma(h, bound)?;
    let mut out = detect_on_sigma(h, &sigma, bound)?;
    if opts.sigma_subset_search && h.target().gen_count() <= 6 && !sigma.is_empty() {
        let full = sigma.len();
        for mask in 1u32..(1 << full) {
            if mask == (1 << full) - 1 {
                continue; // canonical sigma already done
            }
            let subset: Vec<Word> = (0..full)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| sigma[i].clone())
                .collect();
            out.extend(detect_on_sigma(h, &subset, bound)?);
        }
    }
    Ok(out)
}

fn detect_on_sigma(
    h: &MonoidHom,
    sigma: &[Word],
    bound: u32,
) -> Result<Vec<SemistableStructure>, SemistableError> {
    if sigma.is_empty() {
        return Ok(Vec::new());
    }
    if sigma.len() > 16 {
        // Delta subsets are enumerated by bitmask; this is far past desk scale
        return Err(SemistableError::UndecidedAtBound { bound });
    }
    let mut found = lattice_candidates(h, sigma, bound)?.unwrap_or_default();
    if found.is_empty() {
        found = table_candidates(h, sigma, bound)?;
    }
    let mut out = Vec::new();
    for s in found {
        if validate_semistable_at(h, &s, bound)?.state.is_true() && !out.contains(&s) {
            out.push(s);
        }
    }
    Ok(out)
}

/// Exact (q0, Delta, B) search when every sigma element is a distinct unit
/// vector: condition (S3) says B.sigma and Delta.sigma - f(q0) agree modulo
/// the relation lattice of P, so B is read off the integer vector
/// Delta.sigma - f(q0) + k . (L - R) for small multiples k. Every candidate
/// is confirmed by an exact normal-form comparison. Returns `None` when the
/// shape does not apply.
fn lattice_candidates(
    h: &MonoidHom,
    sigma: &[Word],
    bound: u32,
) -> Result<Option<Vec<SemistableStructure>>, SemistableError> {
    let p = h.target();
    let n = p.gen_count();
    let rels = p.relations();
    if rels.len() > 2 {
        return Ok(None);
    }
    let mut coords = Vec::with_capacity(sigma.len());
    for w in sigma {
        let supp = word::support(w);
        if supp.len() != 1 || w[supp[0]] != 1 || coords.contains(&supp[0]) {
            return Ok(None);
        }
        coords.push(supp[0]);
    }
    let diffs: Vec<Vec<i64>> = rels
        .iter()
        .map(|(l, r)| {
            l.iter()
                .zip(r)
                .map(|(&a, &b)| i64::from(a) - i64::from(b))
                .collect()
        })
        .collect();
    let k_cap = i64::from(2 * bound.max(4));
    let qs = h.source().classes_up_to(bound)?;
    let mut k_tuples: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..diffs.len() {
        k_tuples = k_tuples
            .into_iter()
            .flat_map(|prefix| {
                (-k_cap..=k_cap).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    let mut found = Vec::new();
    for mask in 1u32..(1 << sigma.len()) {
        let delta: Vec<u32> = (0..sigma.len())
            .map(|i| u32::from(mask & (1 << i) != 0))
            .collect();
        let mut delta_vec = vec![0i64; n];
        for (j, &c) in coords.iter().enumerate() {
            delta_vec[c] += i64::from(delta[j]);
        }
        for q0 in &qs {
            if word::is_zero(q0) {
                continue;
            }
            let fq = h.apply(q0);
            let base: Vec<i64> = delta_vec
                .iter()
                .zip(&fq)
                .map(|(&d, &f)| d - i64::from(f))
                .collect();
            for ks in &k_tuples {
                let mut w = base.clone();
                for (k, d) in ks.iter().zip(&diffs) {
                    for (x, &dd) in w.iter_mut().zip(d) {
                        *x += k * dd;
                    }
                }
                if w.iter().any(|&x| x < 0) {
                    continue;
                }
                // w must be supported on the sigma coordinates
                if w.iter()
                    .enumerate()
                    .any(|(c, &x)| x > 0 && !coords.contains(&c))
                {
                    continue;
                }
                let b: Vec<u32> = coords.iter().map(|&c| w[c] as u32).collect();
                if !word::supports_disjoint(&delta, &b) {
                    continue;
                }
                let s = SemistableStructure {
                    sigma: sigma.to_vec(),
                    q0: q0.clone(),
                    delta: delta.clone(),
                    b,
                };
                // confirm (S3) in the monoid, not just the groupification
                let lhs = s.sigma_combination(&s.delta, n);
                let rhs = word::add(&fq, &s.sigma_combination(&s.b, n));
                if p.words_equal(&lhs, &rhs).is_true() && !found.contains(&s) {
                    found.push(s);
                }
            }
        }
    }
    Ok(Some(found))
}

/// Fallback (q0, Delta, B) search over the bounded instance table, for
/// sigma elements that are not plain generators.
fn table_candidates(
    h: &MonoidHom,
    sigma: &[Word],
    bound: u32,
) -> Result<Vec<SemistableStructure>, SemistableError> {
    let skeleton = SemistableStructure {
        sigma: sigma.to_vec(),
        q0: vec![0; h.source().gen_count()],
        delta: vec![0; sigma.len()],
        b: vec![0; sigma.len()],
    };
    let table = build_table(h, &skeleton, bound)?;
    let p = h.target();
    let mut found = Vec::new();
    for mask in 1u32..(1 << sigma.len()) {
        let delta: Vec<u32> = (0..sigma.len())
            .map(|i| u32::from(mask & (1 << i) != 0))
            .collect();
        let lhs = p.normal_form(&skeleton.sigma_combination(&delta, p.gen_count()))?;
        let Some(candidates) = table.mixed.get(&lhs) else {
            continue;
        };
        for &(qi, ti) in candidates {
            let q0 = &table.qs[qi];
            let b = &table.ts[ti];
            if word::is_zero(q0) || !word::supports_disjoint(&delta, b) {
                continue;
            }
            let s = SemistableStructure {
                sigma: sigma.to_vec(),
                q0: q0.clone(),
                delta: delta.clone(),
                b: b.clone(),
            };
            if !found.contains(&s) {
                found.push(s);
            }
        }
    }
    Ok(found)
}

/// Answer of the split test, with a complement witness when split.
#[derive(Debug, Clone, Serialize)]
pub struct SplitAnswer {
    pub state: TriState,
    pub bound_used: u32,
    /// Generators of a complement N with P = f(Q) x N, when split.
    pub complement: Option<Vec<Word>>,
}

/// Decides whether the injective integral homomorphism splits.
///
/// When a validated semistable structure exists, the split criterion is
/// #Supp(Delta) = 1 and the complement is generated by sigma minus the
/// Delta-supported element. Otherwise the candidate complement generated by
/// the non-image irreducibles is verified directly: every class within the
/// bound must decompose uniquely as n + f(q).
pub fn splits(h: &MonoidHom) -> Result<SplitAnswer, SemistableError> {
    let bound = h.target().congruence_bound().min(8);
    let structures = all_structures(h, DetectOptions::default())?;
    if let Some(s) = structures.first() {
        let supp = s.delta_support();
        if supp.len() >= 2 {
            return Ok(SplitAnswer {
                state: TriState::False,
                bound_used: bound,
                complement: None,
            });
        }
        // split: the complement is generated by sigma minus the Delta element
        let n_gens: Vec<Word> = s
            .sigma
            .iter()
            .enumerate()
            .filter(|(i, _)| !supp.contains(i))
            .map(|(_, w)| w.clone())
            .collect();
        verify_direct_complement(h, &n_gens, bound)?;
        return Ok(SplitAnswer {
            state: TriState::True,
            bound_used: bound,
            complement: Some(n_gens),
        });
    }
    // no structure: try the candidate complement directly
    let n_gens = canonical_sigma(h, bound)?;
    match verify_direct_complement(h, &n_gens, bound) {
        Ok(()) => Ok(SplitAnswer {
            state: TriState::True,
            bound_used: bound,
            complement: Some(n_gens),
        }),
        Err(SemistableError::UndecidedAtBound { bound }) => Ok(SplitAnswer {
            state: TriState::Undecided,
            bound_used: bound,
            complement: None,
        }),
        Err(e) => Err(e),
    }
}

/// Checks P = f(Q) x <n_gens> within the bound: every class of degree <=
/// bound/2 must arise as n + f(q), and the pair (class of n in N, class of
/// q) must be unique for each element.
fn verify_direct_complement(
    h: &MonoidHom,
    n_gens: &[Word],
    bound: u32,
) -> Result<(), SemistableError> {
    let p = h.target();
    let s = SemistableStructure {
        sigma: n_gens.to_vec(),
        q0: vec![0; h.source().gen_count()],
        delta: vec![0; n_gens.len()],
        b: vec![0; n_gens.len()],
    };
    let qs = h.source().classes_up_to(bound)?;
    let ts = word::words_up_to(n_gens.len(), bound);
    // key class -> (q class, class of the N part)
    let mut seen: HashMap<Word, (Word, Word)> = HashMap::new();
    for q in &qs {
        let fq = h.apply(q);
        for t in &ts {
            let n_part = p.normal_form(&s.sigma_combination(t, p.gen_count()))?;
            let key = p.normal_form(&word::add(&fq, &n_part))?;
            if let Some((pq, pn)) = seen.get(&key) {
                if pq != q || *pn != n_part {
                    return Err(SemistableError::UndecidedAtBound { bound });
                }
            } else {
                seen.insert(key, (q.clone(), n_part));
            }
        }
    }
    // coverage of all classes within half the bound (sums stay in window)
    for cls in p.classes_up_to(bound / 2)? {
        if !seen.contains_key(&cls) {
            return Err(SemistableError::UndecidedAtBound { bound });
        }
    }
    Ok(())
}

/// The marking q0 of a non-split integral homomorphism carrying a validated
/// semistable structure.
pub fn marking(h: &MonoidHom) -> Result<Word, SemistableError> {
    let split = splits(h)?;
    if split.state.is_true() {
        return Err(SemistableError::SplitHom);
    }
    let s = detect_semistable(h, DetectOptions::default())?
        .ok_or(SemistableError::NoSemistableStructure)?;
    Ok(s.q0)
}

/// Result of transporting a structure through the quotient P -> P/N.
#[derive(Debug, Clone)]
pub struct QuotientResult {
    pub quotient: Arc<MonoidPresentation>,
    pub induced_hom: MonoidHom,
    pub structure: SemistableStructure,
}

/// Quotient of P by the submonoid generated by `n_gens` (words of P),
/// presented by adding the relations n = 0, with the semistable structure
/// carried along: sigma' keeps the sigma elements with nonzero image and
/// Delta, B are restricted through the induced bijection. The marking is
/// unchanged.
pub fn quotient_semistable(
    h: &MonoidHom,
    s: &SemistableStructure,
    n_gens: &[Word],
) -> Result<QuotientResult, SemistableError> {
    let p = h.target();
    let bound = p.congruence_bound();
    let mut relations = p.relations().to_vec();
    let zero = vec![0u32; p.gen_count()];
    for n in n_gens {
        relations.push((n.clone(), zero.clone()));
    }
    let quotient = MonoidPresentation::new(p.generators().to_vec(), relations, bound)?;

    // hypothesis (i): quotient fine and sharp
    let sharp = quotient.is_sharp();
    if !sharp.state.is_true() {
        return Err(SemistableError::HypothesisFailure {
            which: "i".into(),
            detail: "quotient is not sharp".into(),
        });
    }
    if !quotient.is_cancellative_up_to(bound.min(4))?.is_true() {
        return Err(SemistableError::HypothesisFailure {
            which: "i".into(),
            detail: "quotient is not cancellative within bound".into(),
        });
    }
    let induced_hom = MonoidHom::new(
        Arc::clone(h.source()),
        Arc::clone(&quotient),
        h.images().to_vec(),
    )
    .map_err(|e| SemistableError::HypothesisFailure {
        which: "ii".into(),
        detail: format!("induced map is ill-formed: {e}"),
    })?;
    // hypothesis (ii): f and f-bar integral
    let check_bound = bound.min(5);
    if !crate::monoid::is_integral_hom(h, check_bound)?
        .state
        .is_true()
    {
        return Err(SemistableError::HypothesisFailure {
            which: "ii".into(),
            detail: "f is not integral within bound".into(),
        });
    }
    if !crate::monoid::is_integral_hom(&induced_hom, check_bound)?
        .state
        .is_true()
    {
        return Err(SemistableError::HypothesisFailure {
            which: "ii".into(),
            detail: "induced map is not integral within bound".into(),
        });
    }
    // hypothesis (iii): s validated on P
    if !validate_semistable(h, s)?.state.is_true() {
        return Err(SemistableError::HypothesisFailure {
            which: "iii".into(),
            detail: "structure does not validate on P".into(),
        });
    }

    // sigma' = { x in sigma : pi(x) != 0 }, and alpha must be bijective
    let zero_nf = vec![0u32; quotient.gen_count()];
    let mut kept: Vec<usize> = Vec::new();
    let mut images: Vec<Word> = Vec::new();
    for (i, x) in s.sigma.iter().enumerate() {
        let img = quotient.normal_form(x)?;
        if img != zero_nf {
            if images.contains(&img) {
                return Err(SemistableError::HypothesisFailure {
                    which: "alpha".into(),
                    detail: "sigma' -> sigma-bar is not injective".into(),
                });
            }
            kept.push(i);
            images.push(img);
        }
    }
    let structure = SemistableStructure {
        sigma: images,
        q0: s.q0.clone(),
        delta: kept.iter().map(|&i| s.delta[i]).collect(),
        b: kept.iter().map(|&i| s.b[i]).collect(),
    };
    let report = validate_semistable(&induced_hom, &structure)?;
    if !report.state.is_true() {
        return Err(SemistableError::HypothesisFailure {
            which: "transport".into(),
            detail: format!("transported structure fails {:?}", report.failed_condition),
        });
    }
    Ok(QuotientResult {
        quotient,
        induced_hom,
        structure,
    })
}

/// Report of the property (A)/(B) enumeration.
#[derive(Debug, Clone, Serialize)]
pub struct RelationPropertyReport {
    pub bound_used: u32,
    pub instances_a: usize,
    pub instances_b: usize,
    pub counterexample: Option<String>,
}

/// Enumerates relation instances within the bound and checks:
///   (A) T.sigma = f(q) + T'.sigma with q != 0 and disjoint supports forces
///       q = n q0, T = n Delta, T' = n B;
///   (B) T.sigma + f(q) = T'.sigma + f(q') with Delta-support zeros on both
///       sides forces T = T' and q = q'.
pub fn check_relation_properties(
    h: &MonoidHom,
    s: &SemistableStructure,
) -> Result<RelationPropertyReport, SemistableError> {
    let bound = h.target().congruence_bound().min(8);
    let table = build_table(h, s, bound)?;
    let q_m = h.source();
    let delta_supp = s.delta_support();
    let mut instances_a = 0usize;
    let mut instances_b = 0usize;

    // (A): match T.sigma against f(q) + T'.sigma
    for (ti, nf) in table.t_nf.iter().enumerate() {
        let t = &table.ts[ti];
        if let Some(glist) = table.mixed.get(nf) {
            for &(qi, tpi) in glist {
                let q = &table.qs[qi];
                let tp = &table.ts[tpi];
                if word::is_zero(q) || !word::supports_disjoint(t, tp) {
                    continue;
                }
                instances_a += 1;
                let mut ok = false;
                for n in 0..=bound {
                    let qn = q_m.normal_form(&scale_word(&s.q0, n, q_m.gen_count()))?;
                    if &qn == q && t == &word::scale(&s.delta, n) && tp == &word::scale(&s.b, n) {
                        ok = true;
                        break;
                    }
                }
                if !ok {
                    return Ok(RelationPropertyReport {
                        bound_used: bound,
                        instances_a,
                        instances_b,
                        counterexample: Some(format!(
                            "(A): T={:?}, q={:?}, T'={:?} is not a multiple of (Delta, q0, B)",
                            t, q, tp
                        )),
                    });
                }
            }
        }
    }

    // (B): T.sigma + f(q) = T'.sigma + f(q') with vanishing Delta coordinates
    for (key, group) in &table.mixed {
        let _ = key;
        for (i, &(qi, ti)) in group.iter().enumerate() {
            for &(qj, tj) in &group[i + 1..] {
                let (t, tp) = (&table.ts[ti], &table.ts[tj]);
                let zero_on_delta = |w: &Word| delta_supp.iter().any(|&x| w[x] == 0);
                if !zero_on_delta(t) || !zero_on_delta(tp) {
                    continue;
                }
                instances_b += 1;
                if t != tp || table.qs[qi] != table.qs[qj] {
                    return Ok(RelationPropertyReport {
                        bound_used: bound,
                        instances_a,
                        instances_b,
                        counterexample: Some(format!(
                            "(B): ({:?}, {:?}) and ({:?}, {:?}) collide",
                            t, table.qs[qi], tp, table.qs[qj]
                        )),
                    });
                }
            }
        }
    }

    Ok(RelationPropertyReport {
        bound_used: bound,
        instances_a,
        instances_b,
        counterexample: None,
    })
}

fn scale_word(w: &[u32], n: u32, len: usize) -> Word {
    let mut out = vec![0u32; len];
    for (o, &v) in out.iter_mut().zip(w) {
        *o = v * n;
    }
    out
}

/// Witness of the property (C) isomorphism
/// P ~ (Q x N^{sigma \ Supp(Delta)}) ⊞_N N^{Supp(Delta)}.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyCWitness {
    pub degree_checked: u32,
    pub pushout_elements_checked: usize,
    pub p_classes_checked: usize,
}

/// Builds the two maps out of N, forms their pushout via the pushout module,
/// and verifies the generator-level isomorphism with P on all classes within
/// the given degree.
pub fn property_c_pushout(
    h: &MonoidHom,
    s: &SemistableStructure,
    degree: u32,
) -> Result<PropertyCWitness, SemistableError> {
    let p = h.target();
    let q = h.source();
    let supp = s.delta_support();
    let rest: Vec<usize> = (0..s.sigma.len()).filter(|i| !supp.contains(i)).collect();

    // left leg: Q x N^{sigma \ Supp(Delta)}
    let mut left_gens: Vec<String> = q.generators().to_vec();
    for &i in &rest {
        left_gens.push(format!("s{}", i));
    }
    let mut left_rels: Vec<(Word, Word)> = Vec::new();
    for (l, r) in q.relations() {
        let mut ll = l.clone();
        ll.resize(left_gens.len(), 0);
        let mut rr = r.clone();
        rr.resize(left_gens.len(), 0);
        left_rels.push((ll, rr));
    }
    let left = MonoidPresentation::new(left_gens, left_rels, p.congruence_bound())?;
    // right leg: N^{Supp(Delta)}
    let right = MonoidPresentation::free(
        supp.iter().map(|i| format!("d{}", i)).collect(),
        p.congruence_bound(),
    );
    let base = MonoidPresentation::free(vec!["n".into()], p.congruence_bound());

    // 1 |-> (q0, B restricted to the complement)
    let mut f_img = vec![0u32; left.gen_count()];
    f_img[..q.gen_count()].copy_from_slice(&s.q0);
    for (k, &i) in rest.iter().enumerate() {
        f_img[q.gen_count() + k] = s.b[i];
    }
    // 1 |-> Delta restricted to its support (all ones)
    let g_img = vec![1u32; supp.len()];

    let f = MonoidHom::new(Arc::clone(&base), Arc::clone(&left), vec![f_img])?;
    let g = MonoidHom::new(Arc::clone(&base), Arc::clone(&right), vec![g_img])?;
    let po = pushout::pushout(&f, &g)?;

    // cone into P: left gens are Q gens then complement sigma; right gens
    // are the Delta-supported sigma
    let mut alpha_images: Vec<Word> = h.images().to_vec();
    for &i in &rest {
        alpha_images.push(s.sigma[i].clone());
    }
    let alpha_prime = MonoidHom::new(Arc::clone(&left), Arc::clone(p), alpha_images)
        .map_err(|e| SemistableError::IsoCheckFailed(format!("alpha' ill-formed: {e}")))?;
    let beta_images: Vec<Word> = supp.iter().map(|&i| s.sigma[i].clone()).collect();
    let beta_prime = MonoidHom::new(Arc::clone(&right), Arc::clone(p), beta_images)
        .map_err(|e| SemistableError::IsoCheckFailed(format!("beta' ill-formed: {e}")))?;
    let gamma = pushout::factorize(
        &po,
        &alpha_prime,
        &beta_prime,
        CancellationCheck::AssumeIntegral,
    )
    .map_err(|e| SemistableError::IsoCheckFailed(e.to_string()))?;

    // inverse on P generators: from the S2 generation expressions
    let bound = p.congruence_bound().min(8);
    let table = build_table(h, s, bound)?;
    let mut inverse_gens: Vec<(Word, Word)> = Vec::new(); // pushout pairs
    for i in 0..p.gen_count() {
        let gi = p.normal_form(&word::unit(p.gen_count(), i))?;
        let Some(group) = table.mixed.get(&gi) else {
            return Err(SemistableError::IsoCheckFailed(format!(
                "generator {} not generated by sigma and f(Q)",
                p.generators()[i]
            )));
        };
        let &(qi, ti) = group.first().expect("nonempty bucket");
        let q_word = &table.qs[qi];
        let t = &table.ts[ti];
        let mut left_word = vec![0u32; left.gen_count()];
        left_word[..q.gen_count()].copy_from_slice(q_word);
        for (k, &ri) in rest.iter().enumerate() {
            left_word[q.gen_count() + k] = t[ri];
        }
        let right_word: Word = supp.iter().map(|&si| t[si]).collect();
        inverse_gens.push((left_word, right_word));
    }
    let inv = |w: &Word| -> (Word, Word) {
        let mut acc = (vec![0u32; left.gen_count()], vec![0u32; right.gen_count()]);
        for (i, &mult) in w.iter().enumerate() {
            if mult > 0 {
                acc.0 = word::add(&acc.0, &word::scale(&inverse_gens[i].0, mult));
                acc.1 = word::add(&acc.1, &word::scale(&inverse_gens[i].1, mult));
            }
        }
        acc
    };

    // inv . gamma = id on pushout classes within degree
    let mut pushout_elements_checked = 0usize;
    for e in pushout::elements_up_to(&po, degree) {
        let back = inv(&gamma.apply(&e));
        match po.pairs_equal(&back, &e) {
            TriState::True => pushout_elements_checked += 1,
            _ => {
                return Err(SemistableError::IsoCheckFailed(format!(
                    "inv(gamma({:?})) differs from the input",
                    e
                )))
            }
        }
    }
    // gamma . inv = id on P classes within degree
    let mut p_classes_checked = 0usize;
    for cls in p.classes_up_to(degree)? {
        let img = gamma.apply(&inv(&cls));
        if !p.words_equal(&img, &cls).is_true() {
            return Err(SemistableError::IsoCheckFailed(format!(
                "gamma(inv({:?})) = {:?} differs",
                cls, img
            )));
        }
        p_classes_checked += 1;
    }
    Ok(PropertyCWitness {
        degree_checked: degree,
        pushout_elements_checked,
        p_classes_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nt(bound: u32) -> Arc<MonoidPresentation> {
        MonoidPresentation::free(vec!["t".into()], bound)
    }

    fn p_basic(bound: u32) -> Arc<MonoidPresentation> {
        MonoidPresentation::new(
            vec!["x1".into(), "x2".into(), "t".into()],
            vec![(vec![1, 1, 0], vec![0, 0, 1])],
            bound,
        )
        .unwrap()
    }

    fn p_prime(bound: u32) -> Arc<MonoidPresentation> {
        MonoidPresentation::new(
            vec!["x1".into(), "x2".into(), "y".into(), "t".into()],
            vec![(vec![1, 1, 0, 0], vec![0, 0, 3, 1])],
            bound,
        )
        .unwrap()
    }

    fn hom_basic(bound: u32) -> MonoidHom {
        MonoidHom::new(nt(bound), p_basic(bound), vec![vec![0, 0, 1]]).unwrap()
    }

    fn hom_prime(bound: u32) -> MonoidHom {
        MonoidHom::new(nt(bound), p_prime(bound), vec![vec![0, 0, 0, 1]]).unwrap()
    }

    fn structure_basic() -> SemistableStructure {
        SemistableStructure {
            sigma: vec![vec![1, 0, 0], vec![0, 1, 0]],
            q0: vec![1],
            delta: vec![1, 1],
            b: vec![0, 0],
        }
    }

    fn structure_prime() -> SemistableStructure {
        SemistableStructure {
            sigma: vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0]],
            q0: vec![1],
            delta: vec![1, 1, 0],
            b: vec![0, 0, 3],
        }
    }

    #[test]
    fn validate_examples() {
        let h = hom_basic(8);
        assert!(validate_semistable(&h, &structure_basic())
            .unwrap()
            .state
            .is_true());

        let mut bad = structure_basic();
        bad.q0 = vec![0];
        let rep = validate_semistable(&h, &bad).unwrap();
        assert!(rep.state.is_false());
        assert_eq!(rep.failed_condition.as_deref(), Some("S1: q0 = 0"));

        let h = hom_prime(8);
        assert!(validate_semistable(&h, &structure_prime())
            .unwrap()
            .state
            .is_true());
    }

    #[test]
    fn validate_rejects_bad_shapes() {
        let h = hom_basic(8);
        let mut s = structure_basic();
        s.delta = vec![1];
        assert!(matches!(
            validate_semistable(&h, &s),
            Err(SemistableError::IllFormedStructure { .. })
        ));

        // S3 violation: overlapping supports
        let mut s = structure_basic();
        s.b = vec![1, 0];
        assert!(validate_semistable(&h, &s).unwrap().state.is_false());
    }

    #[test]
    fn detect_examples() {
        let h = hom_prime(8);
        let s = detect_semistable(&h, DetectOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!(s, structure_prime());

        // trivial Q -> N^a: no q0 != 0 exists
        let t = MonoidPresentation::trivial(8);
        let free = MonoidPresentation::free(vec!["a".into(), "b".into()], 8);
        let h = MonoidHom::new(t, free, vec![]).unwrap();
        assert!(detect_semistable(&h, DetectOptions::default())
            .unwrap()
            .is_none());

        // trivial Q -> U-monoid: none
        let t = MonoidPresentation::trivial(8);
        let u = MonoidPresentation::new(
            vec!["u1".into(), "u2".into()],
            vec![(vec![2, 0], vec![0, 2])],
            8,
        )
        .unwrap();
        let h = MonoidHom::new(t, u, vec![]).unwrap();
        assert!(detect_semistable(&h, DetectOptions::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn detect_uniqueness_on_basic() {
        let h = hom_basic(8);
        let all = all_structures(&h, DetectOptions::default()).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0], structure_basic());
    }

    #[test]
    fn splits_examples() {
        // Nt -> Nt x N^2: splits with N = N^2
        let q = nt(8);
        let p = MonoidPresentation::free(vec!["t".into(), "n1".into(), "n2".into()], 8);
        let h = MonoidHom::new(q, p, vec![vec![1, 0, 0]]).unwrap();
        let ans = splits(&h).unwrap();
        assert!(ans.state.is_true());
        assert_eq!(ans.complement.unwrap().len(), 2);

        // Nt -> P: non-split, #Supp(Delta) = 2
        let ans = splits(&hom_basic(8)).unwrap();
        assert!(ans.state.is_false());

        // identity: splits with N = {0}
        let p = MonoidPresentation::free(vec!["a".into()], 8);
        let h = MonoidHom::identity(&p);
        let ans = splits(&h).unwrap();
        assert!(ans.state.is_true());
        assert!(ans.complement.unwrap().is_empty());
    }

    #[test]
    fn marking_examples() {
        assert_eq!(marking(&hom_basic(8)).unwrap(), vec![1]);
        assert_eq!(marking(&hom_prime(8)).unwrap(), vec![1]);

        // split homs have no marking
        let q = nt(8);
        let p = MonoidPresentation::free(vec!["t".into(), "n".into()], 8);
        let h = MonoidHom::new(q, p, vec![vec![1, 0]]).unwrap();
        assert!(matches!(marking(&h), Err(SemistableError::SplitHom)));

        // Q = N q with f(q) = x1 + x2: marking is q
        let q = MonoidPresentation::free(vec!["q".into()], 8);
        let p = MonoidPresentation::free(vec!["x1".into(), "x2".into()], 8);
        let h = MonoidHom::new(q, p, vec![vec![1, 1]]).unwrap();
        assert_eq!(marking(&h).unwrap(), vec![1]);
    }

    #[test]
    fn quotient_examples() {
        // P' = <x1,x2,y,t | x1+x2 = t+3y>, N = <y>: quotient is P with the
        // basic structure, marking unchanged.
        let h = hom_prime(10);
        let s = structure_prime();
        let res = quotient_semistable(&h, &s, &[vec![0, 0, 1, 0]]).unwrap();
        assert_eq!(res.structure.q0, vec![1]);
        assert_eq!(res.structure.sigma.len(), 2);
        assert_eq!(res.structure.delta, vec![1, 1]);
        assert_eq!(res.structure.b, vec![0, 0]);

        // N = {} (no generators): identity quotient
        let res = quotient_semistable(&h, &s, &[]).unwrap();
        assert_eq!(res.structure, s);

        // P'' = <x1,x2,y,z,t | x1+x2 = t+y+z>, N = <z>
        let p2 = MonoidPresentation::new(
            vec!["x1".into(), "x2".into(), "y".into(), "z".into(), "t".into()],
            vec![(vec![1, 1, 0, 0, 0], vec![0, 0, 1, 1, 1])],
            10,
        )
        .unwrap();
        let h2 = MonoidHom::new(nt(10), p2, vec![vec![0, 0, 0, 0, 1]]).unwrap();
        let s2 = SemistableStructure {
            sigma: vec![
                vec![1, 0, 0, 0, 0],
                vec![0, 1, 0, 0, 0],
                vec![0, 0, 1, 0, 0],
                vec![0, 0, 0, 1, 0],
            ],
            q0: vec![1],
            delta: vec![1, 1, 0, 0],
            b: vec![0, 0, 1, 1],
        };
        assert!(validate_semistable(&h2, &s2).unwrap().state.is_true());
        let res = quotient_semistable(&h2, &s2, &[vec![0, 0, 0, 1, 0]]).unwrap();
        assert_eq!(res.structure.b, vec![0, 0, 1]);
        assert_eq!(res.structure.delta, vec![1, 1, 0]);
        assert_eq!(res.structure.q0, vec![1]);
    }

    #[test]
    fn relation_properties_hold() {
        let h = hom_basic(8);
        let rep = check_relation_properties(&h, &structure_basic()).unwrap();
        assert!(rep.counterexample.is_none());
        assert!(rep.instances_a > 0, "property (A) instances must occur");

        let h = hom_prime(8);
        let rep = check_relation_properties(&h, &structure_prime()).unwrap();
        assert!(rep.counterexample.is_none());
    }

    #[test]
    fn property_c_examples() {
        let h = hom_basic(8);
        property_c_pushout(&h, &structure_basic(), 6).unwrap();

        let h = hom_prime(8);
        property_c_pushout(&h, &structure_prime(), 6).unwrap();
    }

    #[test]
    fn torsion_freeness_accompanies_structures() {
        for h in [hom_basic(8), hom_prime(8)] {
            if detect_semistable(&h, DetectOptions::default())
                .unwrap()
                .is_some()
            {
                assert!(h.coker_torsion_free());
            }
        }
    }
}
