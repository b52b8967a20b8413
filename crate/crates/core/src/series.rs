//! Truncated multivariate power-series model ring R = A[[X_1..X_n]]/(X^T - G)
//! over a toy coefficient ring, with canonical normal forms supported on
//! Sigma = { I : T not<= I }.
//!
//! Truncation is twofold: total X-degree is capped at `trunc_degree`, and the
//! coefficient ring itself caps t-adic precision. Monomials lost to either
//! cap are flagged, so regularity and rigidity checks can separate
//! truncation artifacts from structural kernel.
//!
//! Rewriting X^{T+I} -> G X^I terminates because every step either raises
//! the t-adic filtration of the coefficient (terms of G inside the maximal
//! ideal) or strictly lowers the X-monomial in the term order (unit-coefficient
//! terms of G, which the constructor requires to lie below X^T).

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::FpMat;
use crate::ring::{FiniteRing, RingElem};
use crate::word::{self, Word};

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("relation monomial X^T must be nonzero")]
    ZeroRelation,
    #[error("G term {0:?} has a unit coefficient but is not below X^T in the term order")]
    NonTerminatingRelation(Word),
    #[error("exponent vector length {got} does not match variable count {expected}")]
    BadExponent { expected: usize, got: usize },
    #[error("coefficient ring cannot host this operation: {0}")]
    UnsupportedCoefficient(String),
    #[error("ideal generators must be unit multiples of monomials")]
    NotMonomialIdeal,
    #[error("J^2 != 0 at this precision (need 2k >= N for J = t^k R)")]
    SquareNotZero,
    #[error("element is not regular: {0}")]
    RegularityFailure(String),
    #[error("identity {identity} fails: {detail}")]
    CheckFailed { identity: String, detail: String },
}

/// Term order on series monomials: degree first, then at the first differing
/// variable the larger exponent is smaller (matching the monoid kernel).
fn mono_less(a: &[u32], b: &[u32]) -> bool {
    match word::degree(a).cmp(&word::degree(b)) {
        std::cmp::Ordering::Less => return true,
        std::cmp::Ordering::Greater => return false,
        std::cmp::Ordering::Equal => {}
    }
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x > y;
        }
    }
    false
}

/// The model ring. Immutable; all element operations are pure.
#[derive(Debug, Clone)]
pub struct SeriesRing {
    coeff: FiniteRing,
    n_vars: usize,
    names: Vec<String>,
    /// X^T -> G rewriting rule; `None` makes a plain truncated polynomial ring.
    relation: Option<(Word, Vec<(Word, RingElem)>)>,
    trunc_degree: u32,
}

/// Element in normal form: support in Sigma, coefficients nonzero, total
/// degree at most the truncation degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesElement {
    terms: BTreeMap<Word, RingElem>,
}

impl SeriesElement {
    pub fn zero() -> Self {
        SeriesElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &RingElem)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff_of(&self, mono: &[u32]) -> Option<&RingElem> {
        self.terms.get(mono)
    }
}

/// Result of an operation that may have lost terms to truncation.
#[derive(Debug, Clone)]
pub struct Truncated<T> {
    pub value: T,
    /// True when a nonzero term was dropped by the degree cap or the
    /// coefficient precision cap.
    pub truncated: bool,
}

impl SeriesRing {
    pub fn new(
        coeff: FiniteRing,
        names: Vec<String>,
        relation: Option<(Word, Vec<(Word, RingElem)>)>,
        trunc_degree: u32,
    ) -> Result<Self, SeriesError> {
        let n_vars = names.len();
        if let Some((t, g)) = &relation {
            if t.len() != n_vars {
                return Err(SeriesError::BadExponent {
                    expected: n_vars,
                    got: t.len(),
                });
            }
            if word::is_zero(t) {
                return Err(SeriesError::ZeroRelation);
            }
            for (mono, c) in g {
                if mono.len() != n_vars {
                    return Err(SeriesError::BadExponent {
                        expected: n_vars,
                        got: mono.len(),
                    });
                }
                if !coeff.in_max_ideal(c) && !mono_less(mono, t) {
                    return Err(SeriesError::NonTerminatingRelation(mono.clone()));
                }
            }
        }
        Ok(SeriesRing {
            coeff,
            n_vars,
            names,
            relation,
            trunc_degree,
        })
    }

    /// The shape A[[X_1..X_l, Y_1..Y_n]]/(X_1...X_l - u t^a Y^B) over
    /// A = F_p[t]/(t^N).
    #[allow(clippy::too_many_arguments)]
    pub fn model_ring(
        p: u8,
        precision: u8,
        l: usize,
        n: usize,
        a: u32,
        b: &[u32],
        unit: Option<RingElem>,
        trunc_degree: u32,
    ) -> Result<Self, SeriesError> {
        assert_eq!(b.len(), n);
        let coeff = FiniteRing::truncated_series(p, precision)
            .map_err(|e| SeriesError::UnsupportedCoefficient(e.to_string()))?;
        let mut names: Vec<String> = (1..=l).map(|i| format!("X{i}")).collect();
        names.extend((1..=n).map(|j| format!("Y{j}")));
        let mut t_exp = vec![0u32; l + n];
        t_exp[..l].fill(1);
        let mut g_mono = vec![0u32; l + n];
        g_mono[l..].copy_from_slice(b);
        let t = coeff.t_gen().expect("truncated series ring has t");
        let mut c = coeff.pow(&t, a);
        if let Some(u) = unit {
            c = coeff.mul(&c, &u);
        }
        let g = if coeff.is_zero(&c) {
            Vec::new()
        } else {
            vec![(g_mono, c)]
        };
        SeriesRing::new(coeff, names, Some((t_exp, g)), trunc_degree)
    }

    pub fn coeff_ring(&self) -> &FiniteRing {
        &self.coeff
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn var_names(&self) -> &[String] {
        &self.names
    }

    pub fn trunc_degree(&self) -> u32 {
        self.trunc_degree
    }

    pub fn relation(&self) -> Option<&(Word, Vec<(Word, RingElem)>)> {
        self.relation.as_ref()
    }

    /// Whether the monomial lies in the normal-form support Sigma.
    pub fn in_sigma(&self, mono: &[u32]) -> bool {
        match &self.relation {
            Some((t, _)) => !word::le(t, mono),
            None => true,
        }
    }

    /// Sigma-supported monomials of total degree <= trunc_degree, sorted so
    /// the vectorization can binary-search.
    pub fn sigma_monomials(&self) -> Vec<Word> {
        let mut out: Vec<Word> = word::words_up_to(self.n_vars, self.trunc_degree)
            .into_iter()
            .filter(|m| self.in_sigma(m))
            .collect();
        out.sort();
        out
    }

    pub fn monomial(&self, mono: Word, c: RingElem) -> Truncated<SeriesElement> {
        self.normalize(vec![(mono, c)])
    }

    pub fn var(&self, i: usize) -> SeriesElement {
        self.monomial(word::unit(self.n_vars, i), self.coeff.one())
            .value
    }

    pub fn scalar(&self, c: RingElem) -> SeriesElement {
        self.monomial(vec![0; self.n_vars], c).value
    }

    pub fn one(&self) -> SeriesElement {
        self.scalar(self.coeff.one())
    }

    /// Rewrites to the Sigma-supported normal form, truncating on the way.
    fn normalize(&self, raw: Vec<(Word, RingElem)>) -> Truncated<SeriesElement> {
        let mut truncated = false;
        let mut acc: BTreeMap<Word, RingElem> = BTreeMap::new();
        let mut pending: Vec<(Word, RingElem)> = Vec::new();
        for (mono, c) in raw {
            debug_assert_eq!(mono.len(), self.n_vars);
            if self.coeff.is_zero(&c) {
                continue;
            }
            if word::degree(&mono) > self.trunc_degree {
                truncated = true;
                continue;
            }
            pending.push((mono, c));
        }
        while let Some((mono, c)) = pending.pop() {
            if self.coeff.is_zero(&c) {
                continue;
            }
            match &self.relation {
                Some((t, g)) if word::le(t, &mono) => {
                    let rest = word::sub(&mono, t);
                    for (gm, gc) in g {
                        let new_mono = word::add(&rest, gm);
                        if word::degree(&new_mono) > self.trunc_degree {
                            truncated = true;
                            continue;
                        }
                        let (prod, lost) = self.coeff.mul_flagged(&c, gc);
                        truncated |= lost;
                        if !self.coeff.is_zero(&prod) {
                            pending.push((new_mono, prod));
                        }
                    }
                }
                _ => {
                    let entry = acc.entry(mono).or_insert_with(|| self.coeff.zero());
                    *entry = self.coeff.add(entry, &c);
                    if self.coeff.is_zero(entry) {
                        // re-borrow to remove: handled after the loop
                    }
                }
            }
        }
        acc.retain(|_, c| !self.coeff.is_zero(c));
        Truncated {
            value: SeriesElement { terms: acc },
            truncated,
        }
    }

    /// Normal form of an arbitrary term list (degree <= trunc assumed for
    /// inputs already in the window; larger terms are truncated and flagged).
    pub fn nf(&self, raw: Vec<(Word, RingElem)>) -> Truncated<SeriesElement> {
        self.normalize(raw)
    }

    pub fn add(&self, a: &SeriesElement, b: &SeriesElement) -> SeriesElement {
        let mut terms = a.terms.clone();
        for (m, c) in &b.terms {
            let entry = terms.entry(m.clone()).or_insert_with(|| self.coeff.zero());
            *entry = self.coeff.add(entry, c);
        }
        terms.retain(|_, c| !self.coeff.is_zero(c));
        SeriesElement { terms }
    }

    pub fn neg(&self, a: &SeriesElement) -> SeriesElement {
        SeriesElement {
            terms: a
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), self.coeff.neg(c)))
                .collect(),
        }
    }

    pub fn sub(&self, a: &SeriesElement, b: &SeriesElement) -> SeriesElement {
        self.add(a, &self.neg(b))
    }

    /// Product, truncated at the degree cap and the coefficient precision;
    /// the flag records whether anything was lost.
    pub fn mul(&self, a: &SeriesElement, b: &SeriesElement) -> Truncated<SeriesElement> {
        let mut raw: Vec<(Word, RingElem)> = Vec::new();
        let mut truncated = false;
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let mono = word::add(ma, mb);
                if word::degree(&mono) > self.trunc_degree {
                    truncated = true;
                    continue;
                }
                let (c, lost) = self.coeff.mul_flagged(ca, cb);
                truncated |= lost;
                if !self.coeff.is_zero(&c) {
                    raw.push((mono, c));
                }
            }
        }
        let mut out = self.normalize(raw);
        out.truncated |= truncated;
        out
    }

    pub fn pow(&self, a: &SeriesElement, e: u32) -> Truncated<SeriesElement> {
        let mut acc = Truncated {
            value: self.one(),
            truncated: false,
        };
        for _ in 0..e {
            let next = self.mul(&acc.value, a);
            acc = Truncated {
                value: next.value,
                truncated: acc.truncated | next.truncated,
            };
        }
        acc
    }

    /// Units at truncation: invertible iff the constant coefficient is a
    /// unit (all higher terms are nilpotent under the caps).
    pub fn is_unit(&self, a: &SeriesElement) -> bool {
        a.terms
            .get(&vec![0u32; self.n_vars])
            .map(|c| self.coeff.is_unit(c))
            .unwrap_or(false)
    }

    /// Inverse of a unit at truncation: write u = c (1 + n) with n nilpotent
    /// and sum the geometric series.
    pub fn invert(&self, a: &SeriesElement) -> Option<SeriesElement> {
        if !self.is_unit(a) {
            return None;
        }
        let zero_mono = vec![0u32; self.n_vars];
        let c = a.terms.get(&zero_mono).expect("unit has a constant term");
        let c_inv = self.coeff.inverse(c)?;
        let scaled = self.mul(a, &self.scalar(c_inv.clone())).value; // 1 + n
        let n = self.sub(&scaled, &self.one());
        let mut inv = self.one();
        let mut power = self.one();
        loop {
            power = self.mul(&power, &self.neg(&n)).value;
            if power.is_zero() {
                break;
            }
            inv = self.add(&inv, &power);
        }
        Some(self.mul(&inv, &self.scalar(c_inv)).value)
    }

    /// F_p-dimension of the truncated normal-form module.
    pub fn module_dim(&self) -> usize {
        self.sigma_monomials().len() * self.coeff.elem_len()
    }

    /// Flattens an element into F_p coordinates over the Sigma-monomial basis.
    pub fn vectorize(&self, basis: &[Word], a: &SeriesElement) -> Vec<u8> {
        let len = self.coeff.elem_len();
        let mut v = vec![0u8; basis.len() * len];
        for (m, c) in &a.terms {
            let idx = basis
                .binary_search(m)
                .expect("normal form supported on the Sigma basis");
            v[idx * len..(idx + 1) * len].copy_from_slice(&c.0);
        }
        v
    }

    /// The F_p basis elements of the module: t-power multiples of the
    /// Sigma monomials (for field coefficients, just the monomials).
    pub fn fp_basis_elements(&self) -> Vec<SeriesElement> {
        let len = self.coeff.elem_len();
        let mut out = Vec::new();
        for m in self.sigma_monomials() {
            for j in 0..len {
                let mut c = vec![0u8; len];
                c[j] = 1;
                out.push(SeriesElement {
                    terms: BTreeMap::from([(m.clone(), RingElem(c))]),
                });
            }
        }
        out
    }
}

/// Regularity report: multiplication by `f` restricted to the span of basis
/// elements whose product with `f` involves no truncation event must be
/// injective. Kernel vectors coming purely from the caps are counted as
/// artifacts.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub regular: bool,
    pub safe_dim: usize,
    pub artifact_dim: usize,
    pub kernel_dim: usize,
}

/// Truncation-aware regularity of multiplication by `f`.
pub fn is_regular(ring: &SeriesRing, f: &SeriesElement) -> RegularityReport {
    let basis = ring.sigma_monomials();
    let elems = ring.fp_basis_elements();
    let mut safe_products: Vec<Vec<u8>> = Vec::new();
    let mut artifact_dim = 0usize;
    for e in &elems {
        let prod = ring.mul(f, e);
        if prod.truncated {
            artifact_dim += 1;
        } else {
            safe_products.push(ring.vectorize(&basis, &prod.value));
        }
    }
    let dim = basis.len() * ring.coeff_ring().elem_len();
    // In the model shapes f and the relation are single terms, so every
    // image is a single coordinate; injectivity is then a collision check.
    if safe_products
        .iter()
        .all(|v| v.iter().filter(|&&x| x != 0).count() <= 1)
    {
        let mut seen = std::collections::HashSet::new();
        let mut kernel_dim = 0usize;
        for v in &safe_products {
            match v.iter().position(|&x| x != 0) {
                Some(idx) => {
                    if !seen.insert(idx) {
                        kernel_dim += 1;
                    }
                }
                None => kernel_dim += 1,
            }
        }
        return RegularityReport {
            regular: kernel_dim == 0 && !safe_products.is_empty(),
            safe_dim: safe_products.len(),
            artifact_dim,
            kernel_dim,
        };
    }
    // columns = safe basis elements, rows = module coordinates
    let p = ring.coeff_ring().characteristic();
    let mut mat = FpMat::new(p, safe_products.len());
    for coord in 0..dim {
        mat.push_row(safe_products.iter().map(|v| v[coord]).collect());
    }
    let kernel = mat.kernel();
    RegularityReport {
        regular: kernel.is_empty() && !safe_products.is_empty(),
        safe_dim: safe_products.len(),
        artifact_dim,
        kernel_dim: kernel.len(),
    }
}

/// A monomial ideal: generators are unit multiples of t^a X^I monomials.
/// Because normal forms of monomials stay monomial in the model shapes, the
/// truncated ideal splits per monomial into t-valuation conditions; that is
/// the representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialSubspace {
    /// Sigma monomial -> minimal t-valuation present in the ideal.
    vals: BTreeMap<Word, usize>,
}

impl MonomialSubspace {
    pub fn dim_over_fp(&self, precision: usize) -> usize {
        self.vals.values().map(|&v| precision - v).sum()
    }

    /// Pointwise intersection: keep common monomials at the larger valuation.
    pub fn intersect(&self, other: &MonomialSubspace) -> MonomialSubspace {
        let mut vals = BTreeMap::new();
        for (m, &v) in &self.vals {
            if let Some(&w) = other.vals.get(m) {
                vals.insert(m.clone(), v.max(w));
            }
        }
        MonomialSubspace { vals }
    }

    pub fn contains_elem(&self, ring: &SeriesRing, e: &SeriesElement) -> bool {
        e.terms().all(|(m, c)| {
            let val = ring.coeff_ring().t_valuation(c).unwrap_or(usize::MAX);
            self.vals.get(m).map(|&need| val >= need).unwrap_or(false)
        })
    }
}

/// Materializes the truncated ideal generated by unit-multiple-of-monomial
/// elements.
pub fn monomial_ideal(
    ring: &SeriesRing,
    gens: &[SeriesElement],
) -> Result<MonomialSubspace, SeriesError> {
    let precision = ring.coeff_ring().elem_len();
    for g in gens {
        if g.terms().count() != 1 {
            return Err(SeriesError::NotMonomialIdeal);
        }
    }
    let mut vals: BTreeMap<Word, usize> = BTreeMap::new();
    for g in gens {
        for basis_mono in word::words_up_to(ring.n_vars(), ring.trunc_degree()) {
            let m = ring.monomial(basis_mono, ring.coeff_ring().one()).value;
            if m.is_zero() {
                continue;
            }
            let prod = ring.mul(g, &m).value;
            for (mono, c) in prod.terms() {
                let val = ring
                    .coeff_ring()
                    .t_valuation(c)
                    .expect("nonzero coefficient");
                vals.entry(mono.clone())
                    .and_modify(|v| *v = (*v).min(val))
                    .or_insert(val);
            }
        }
    }
    let _ = precision;
    Ok(MonomialSubspace { vals })
}

/// Equality of two truncated monomial ideals.
pub fn ideal_equal(
    ring: &SeriesRing,
    gens1: &[SeriesElement],
    gens2: &[SeriesElement],
) -> Result<bool, SeriesError> {
    Ok(monomial_ideal(ring, gens1)? == monomial_ideal(ring, gens2)?)
}

/// Intersection of a list of truncated monomial ideals.
pub fn ideal_intersect(
    ring: &SeriesRing,
    ideals: &[Vec<SeriesElement>],
) -> Result<MonomialSubspace, SeriesError> {
    let mut iter = ideals.iter();
    let first = iter
        .next()
        .ok_or_else(|| SeriesError::UnsupportedCoefficient("empty intersection".into()))?;
    let mut acc = monomial_ideal(ring, first)?;
    for gens in iter {
        acc = acc.intersect(&monomial_ideal(ring, gens)?);
    }
    Ok(acc)
}

/// Configuration of the primary-decomposition check on
/// R = A[[X_1..X_l, Y_1..Y_n]]/(X^Delta - u t^a Y^B), A = F_p[t]/(t^N).
#[derive(Debug, Clone, Serialize)]
pub struct PrimaryDecompConfig {
    pub l: usize,
    pub n: usize,
    pub a: u32,
    pub b: Vec<u32>,
    pub i: Vec<u32>,
    pub p: u8,
    pub precision: u8,
    pub degree: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityOutcome {
    pub identity: String,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrimaryDecompReport {
    pub config: PrimaryDecompConfig,
    pub identities: Vec<IdentityOutcome>,
    pub all_hold: bool,
}

/// Verifies the primary-decomposition identities as truncated ideal
/// identities, and the prime-element proxy for the Y variables outside
/// Supp(B).
pub fn primary_decomp_check(cfg: &PrimaryDecompConfig) -> Result<PrimaryDecompReport, SeriesError> {
    assert!(cfg.i.iter().zip(&cfg.b).all(|(i, b)| i <= b), "need I <= B");
    let ring = SeriesRing::model_ring(
        cfg.p,
        cfg.precision,
        cfg.l,
        cfg.n,
        cfg.a,
        &cfg.b,
        None,
        cfg.degree,
    )?;
    let coeff = ring.coeff_ring().clone();
    let t = coeff.t_gen().expect("truncated coefficients");
    let nv = ring.n_vars();
    let x = |i: usize| word::unit(nv, i);
    let y = |j: usize| word::unit(nv, cfg.l + j);
    let mono = |m: Word| ring.monomial(m, coeff.one()).value;
    let t_pow_y_i = {
        let mut m = vec![0u32; nv];
        m[cfg.l..].copy_from_slice(&cfg.i);
        ring.monomial(m, coeff.pow(&t, cfg.a)).value
    };

    let mut identities = Vec::new();
    let mut record = |name: String, holds: bool| {
        identities.push(IdentityOutcome {
            identity: name,
            holds,
        });
    };

    // the localizing intersection over the x variables
    {
        let lhs = monomial_ideal(&ring, std::slice::from_ref(&t_pow_y_i))?;
        let parts: Vec<Vec<SeriesElement>> = (0..cfg.l)
            .map(|i| vec![mono(x(i)), t_pow_y_i.clone()])
            .collect();
        let rhs = ideal_intersect(&ring, &parts)?;
        record("(t^a y^I) = meet_i (x_i, t^a y^I)".into(), lhs == rhs);
    }

    // per i: split (x_i, t^a y^I) into (x_i, t^a) and the (x_i, y_j^{I(j)})
    for i in 0..cfg.l {
        let lhs = monomial_ideal(&ring, &[mono(x(i)), t_pow_y_i.clone()])?;
        let t_a = ring.monomial(vec![0; nv], coeff.pow(&t, cfg.a)).value;
        let mut parts: Vec<Vec<SeriesElement>> = vec![vec![mono(x(i)), t_a]];
        for (j, &ij) in cfg.i.iter().enumerate() {
            if ij > 0 {
                let mut m = vec![0u32; nv];
                m[cfg.l + j] = ij;
                parts.push(vec![mono(x(i)), mono(m)]);
            }
        }
        let rhs = ideal_intersect(&ring, &parts)?;
        record(
            format!("(x{0}, t^a y^I) primary components", i + 1),
            lhs == rhs,
        );
    }

    // products of distinct y variables intersect their factors
    for mask in 1u32..(1 << cfg.n) {
        let js: Vec<usize> = (0..cfg.n).filter(|j| mask & (1 << j) != 0).collect();
        if js.len() < 2 {
            continue;
        }
        let mut m = vec![0u32; nv];
        for &j in &js {
            m[cfg.l + j] = 1;
        }
        let lhs = monomial_ideal(&ring, &[mono(m)])?;
        let parts: Vec<Vec<SeriesElement>> = js.iter().map(|&j| vec![mono(y(j))]).collect();
        let rhs = ideal_intersect(&ring, &parts)?;
        record(format!("y-product intersection J={:?}", js), lhs == rhs);
    }

    // y_j prime proxy outside Supp(B); inside Supp(B) the x-decomposition
    for j in 0..cfg.n {
        if cfg.b[j] == 0 {
            let ideal = monomial_ideal(&ring, &[mono(y(j))])?;
            let mut ok = true;
            'pairs: for m1 in word::words_up_to(nv, cfg.degree / 2) {
                let e1 = mono(m1.clone());
                if e1.is_zero() || ideal.contains_elem(&ring, &e1) {
                    continue;
                }
                for m2 in word::words_up_to(nv, cfg.degree / 2) {
                    let e2 = mono(m2.clone());
                    if e2.is_zero() || ideal.contains_elem(&ring, &e2) {
                        continue;
                    }
                    let prod = ring.mul(&e1, &e2);
                    if prod.truncated || prod.value.is_zero() {
                        continue;
                    }
                    if ideal.contains_elem(&ring, &prod.value) {
                        ok = false;
                        break 'pairs;
                    }
                }
            }
            record(format!("y{} prime proxy", j + 1), ok);
        } else {
            let lhs = monomial_ideal(&ring, &[mono(y(j))])?;
            let parts: Vec<Vec<SeriesElement>> =
                (0..cfg.l).map(|i| vec![mono(x(i)), mono(y(j))]).collect();
            let rhs = ideal_intersect(&ring, &parts)?;
            record(
                format!("(y{}) = meet_i (x_i, y{})", j + 1, j + 1),
                lhs == rhs,
            );
        }
    }

    let all_hold = identities.iter().all(|o| o.holds);
    Ok(PrimaryDecompReport {
        config: cfg.clone(),
        identities,
        all_hold,
    })
}

/// Report of the unit-rigidity enumeration.
#[derive(Debug, Clone, Serialize)]
pub struct UnitRigidityReport {
    pub only_trivial: bool,
    pub tuples_checked: usize,
    /// Per-index dimension of the pruned annihilator spaces.
    pub pruned_dims: Vec<usize>,
    /// Per-index count of kernel dimensions attributable to truncation.
    pub artifact_dims: Vec<usize>,
    pub counterexample: Option<String>,
}

/// Exhaustive rigidity check in R = A[[X_1..X_n]]/(X_1...X_n - t^a): for
/// J = t^k R with J^2 = 0, every tuple (a_1..a_l) with a_i in J,
/// X^{I_i} a_i = 0 and sum a_i = 0 must be trivial. The annihilator
/// characterization (support inside Sigma_{I_i} = { I in Sigma : I + I_i >=
/// (1..1) }) prunes truncation artifacts; the pruned spaces are enumerated
/// exhaustively.
pub fn unit_rigidity_check(
    ring: &SeriesRing,
    j_power: usize,
    supports: &[Word],
) -> Result<UnitRigidityReport, SeriesError> {
    let coeff = ring.coeff_ring();
    let precision = coeff.elem_len();
    if 2 * j_power < precision {
        return Err(SeriesError::SquareNotZero);
    }
    for (i, s) in supports.iter().enumerate() {
        if s.len() != ring.n_vars() {
            return Err(SeriesError::BadExponent {
                expected: ring.n_vars(),
                got: s.len(),
            });
        }
        for s2 in &supports[i + 1..] {
            if !word::supports_disjoint(s, s2) {
                return Err(SeriesError::CheckFailed {
                    identity: "supports".into(),
                    detail: "I_i supports must be pairwise disjoint".into(),
                });
            }
        }
    }
    let delta = vec![1u32; ring.n_vars()];
    let basis = ring.sigma_monomials();
    let p = coeff.characteristic();

    // per index: pruned coordinate list ((monomial, t-power)) and its
    // annihilator kernel basis
    let mut pruned_kernels: Vec<Vec<SeriesElement>> = Vec::new();
    let mut pruned_dims = Vec::new();
    let mut artifact_dims = Vec::new();
    for s in supports {
        let xi = ring.monomial(s.clone(), coeff.one()).value;
        let mut pruned_coords: Vec<SeriesElement> = Vec::new();
        let mut raw_coords: Vec<SeriesElement> = Vec::new();
        for m in &basis {
            let in_sigma_t = word::le(&delta, &word::add(m, s));
            for c in j_power..precision {
                let mut cv = vec![0u8; precision];
                cv[c] = 1;
                let elem = SeriesElement {
                    terms: BTreeMap::from([(m.clone(), RingElem(cv))]),
                };
                raw_coords.push(elem.clone());
                if in_sigma_t {
                    pruned_coords.push(elem);
                }
            }
        }
        let kernel_of = |coords: &[SeriesElement]| -> Vec<Vec<u8>> {
            let images: Vec<Vec<u8>> = coords
                .iter()
                .map(|e| ring.vectorize(&basis, &ring.mul(&xi, e).value))
                .collect();
            let dim = basis.len() * precision;
            let mut mat = FpMat::new(p, coords.len());
            for coord in 0..dim {
                mat.push_row(images.iter().map(|v| v[coord]).collect());
            }
            mat.kernel()
        };
        let pruned_kernel = kernel_of(&pruned_coords);
        let raw_kernel = kernel_of(&raw_coords);
        artifact_dims.push(raw_kernel.len().saturating_sub(pruned_kernel.len()));
        pruned_dims.push(pruned_kernel.len());
        // materialize kernel vectors as elements
        let elems: Vec<SeriesElement> = pruned_kernel
            .iter()
            .map(|k| {
                let mut acc = SeriesElement::zero();
                for (x, e) in k.iter().zip(&pruned_coords) {
                    if *x != 0 {
                        let mut scaled = e.clone();
                        for c in scaled.terms.values_mut() {
                            *c = coeff.mul(c, &coeff.from_residue(*x));
                        }
                        acc = ring.add(&acc, &scaled);
                    }
                }
                acc
            })
            .collect();
        pruned_kernels.push(elems);
    }

    // solve sum a_i = 0 over the pruned annihilator tuple space by linear
    // algebra, then exhaustively enumerate the solution space (expected to
    // be trivial, so the zero tuple is the only candidate)
    let flat: Vec<(usize, &SeriesElement)> = pruned_kernels
        .iter()
        .enumerate()
        .flat_map(|(i, k)| k.iter().map(move |e| (i, e)))
        .collect();
    let dim_v = basis.len() * precision;
    let mut sum_mat = FpMat::new(p, flat.len());
    let flat_vecs: Vec<Vec<u8>> = flat
        .iter()
        .map(|(_, e)| ring.vectorize(&basis, e))
        .collect();
    for coord in 0..dim_v {
        sum_mat.push_row(flat_vecs.iter().map(|v| v[coord]).collect());
    }
    let solution_basis = sum_mat.kernel();
    if solution_basis.len() > 16 {
        return Err(SeriesError::CheckFailed {
            identity: "enumeration".into(),
            detail: format!(
                "solution space dimension {} too large to enumerate",
                solution_basis.len()
            ),
        });
    }
    let mut tuples_checked = 0usize;
    let mut counterexample = None;
    let total = (u64::from(p)).pow(solution_basis.len() as u32);
    'outer: for code in 0..total {
        // combination of solution basis vectors
        let mut coeffs = vec![0u8; flat.len()];
        let mut rest = code;
        for sol in &solution_basis {
            let digit = (rest % u64::from(p)) as u8;
            rest /= u64::from(p);
            if digit != 0 {
                for (c, &s) in coeffs.iter_mut().zip(sol) {
                    *c = (*c + digit * s) % p;
                }
            }
        }
        // reconstruct the tuple
        let mut parts = vec![SeriesElement::zero(); supports.len()];
        for ((i, e), &x) in flat.iter().zip(&coeffs) {
            if x != 0 {
                let mut scaled = (*e).clone();
                for c in scaled.terms.values_mut() {
                    *c = coeff.mul(c, &coeff.from_residue(x));
                }
                parts[*i] = ring.add(&parts[*i], &scaled);
            }
        }
        let sum = parts
            .iter()
            .fold(SeriesElement::zero(), |a, b| ring.add(&a, b));
        if !sum.is_zero() {
            continue;
        }
        tuples_checked += 1;
        if parts.iter().any(|a| !a.is_zero()) {
            counterexample = Some(format!("nonzero tuple at solution code {code}"));
            break 'outer;
        }
    }
    Ok(UnitRigidityReport {
        only_trivial: counterexample.is_none(),
        tuples_checked,
        pruned_dims,
        artifact_dims,
        counterexample,
    })
}

/// Outcome of the unit-product identity derivation.
#[derive(Debug, Clone, Serialize)]
pub struct UnitProductReport {
    /// Whether the primed relation constraints were satisfiable at all.
    pub constraints_hold: bool,
    /// Whether u_1...u_l = v_1^{B(1)}...v_r^{B(r)} followed.
    pub identity_holds: bool,
    /// True when a truncation event occurred while forming the products, in
    /// which case the implication constraints => identity is only reliable
    /// at a larger window.
    pub truncation_involved: bool,
}

/// In the model ring with relation X^Delta = u t^a Y^B, given units u_i and
/// v_j encoding a second chart (x'_i = u_i x_i, y'_j = v_j y_j), checks that
/// the primed relation forces the product identity, using regularity of
/// u t^a y^B.
pub fn unit_product_identity(
    ring: &SeriesRing,
    l: usize,
    b: &[u32],
    us: &[SeriesElement],
    vs: &[SeriesElement],
) -> Result<UnitProductReport, SeriesError> {
    assert_eq!(us.len(), l);
    assert_eq!(vs.len(), b.len());
    for u in us.iter().chain(vs) {
        if !ring.is_unit(u) {
            return Err(SeriesError::RegularityFailure(
                "inputs must be units".into(),
            ));
        }
    }
    let coeff = ring.coeff_ring();
    // x product and the relation right-hand side u t^a y^B = nf(x_1...x_l)
    let mut x_full = vec![0u32; ring.n_vars()];
    x_full[..l].fill(1);
    let x_prod = ring.monomial(x_full.clone(), coeff.one());
    let rel_rhs = x_prod.value.clone(); // already rewritten to u t^a y^B

    // regularity of the relation element
    let reg = is_regular(ring, &rel_rhs);
    if !reg.regular {
        return Err(SeriesError::RegularityFailure(format!(
            "t^a y^B fails regularity (kernel dim {})",
            reg.kernel_dim
        )));
    }

    // primed relation: prod u_i x_i = (prod v_j^{B_j}) u t^a y^B
    let mut truncation_involved = x_prod.truncated;
    let mut lhs = ring.one();
    for (i, u) in us.iter().enumerate() {
        let xi = ring
            .monomial(word::unit(ring.n_vars(), i), coeff.one())
            .value;
        let uxi = ring.mul(u, &xi);
        let next = ring.mul(&lhs, &uxi.value);
        truncation_involved |= uxi.truncated | next.truncated;
        lhs = next.value;
    }
    let mut v_pow = ring.one();
    for (v, &bj) in vs.iter().zip(b) {
        let vb = ring.pow(v, bj);
        let next = ring.mul(&v_pow, &vb.value);
        truncation_involved |= vb.truncated | next.truncated;
        v_pow = next.value;
    }
    let rhs_full = ring.mul(&v_pow, &rel_rhs);
    truncation_involved |= rhs_full.truncated;
    let constraints_hold = lhs == rhs_full.value;

    // identity: prod u_i = prod v_j^{B_j}
    let mut u_prod = ring.one();
    for u in us {
        let next = ring.mul(&u_prod, u);
        truncation_involved |= next.truncated;
        u_prod = next.value;
    }
    let identity_holds = u_prod == v_pow;
    Ok(UnitProductReport {
        constraints_hold,
        identity_holds,
        truncation_involved,
    })
}
