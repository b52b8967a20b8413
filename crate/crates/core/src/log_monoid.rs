//! Log monoids over toy coefficient rings.
//!
//! A pre-log monoid is a monoid M with a multiplicative map alpha into
//! (A, x). Its associated log monoid is M ⊞_{alpha^{-1}(A^x)} A^x with the
//! induced map; the preimage of the units is then exactly the unit factor.
//! Base change along a ring map f : A -> B replaces alpha by f . alpha, and
//! descent along a faithfully flat toy pair is checked by full enumeration
//! of classes.
//!
//! Elements are pairs (word over the base presentation, unit of the ring);
//! two pairs are identified when twisting by bounded base words with unit
//! image makes them equal, which is the pushout relation specialized here.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::monoid::{MonoidError, MonoidPresentation};
use crate::ring::{tensor_square, FiniteRing, RingElem, RingError, RingMap};
use crate::word::{self, Word};

#[derive(Debug, Error)]
pub enum LogMonoidError {
    #[error("structure map does not respect relation {index}")]
    NotMultiplicative { index: usize },
    #[error("map is not a unital ring homomorphism")]
    NotRingHom,
    #[error("homomorphism square does not commute over f on generator {index}")]
    NotOverF { index: usize },
    #[error("extension is not a supported faithfully flat toy pair: {0}")]
    NotFaithfullyFlat(String),
    #[error("log condition fails: {0}")]
    LogConditionFailed(String),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Element of a log monoid: a base word paired with a unit.
pub type LogElem = (Word, RingElem);

/// Log monoid over a toy ring: the associated log monoid of a pre-log
/// structure (base presentation, generator images in the ring).
#[derive(Debug, Clone)]
pub struct LogMonoid {
    base: Arc<MonoidPresentation>,
    ring: FiniteRing,
    gen_images: Vec<RingElem>,
    /// Base words of degree <= bound with unit image, with their images:
    /// the twisting data for class equality. Computed eagerly.
    unit_words: Vec<(Word, RingElem)>,
    bound: u32,
}

impl LogMonoid {
    /// Builds the associated log monoid of the pre-log structure. Checks
    /// multiplicativity on relations and the log condition by enumeration.
    pub fn associated(
        base: Arc<MonoidPresentation>,
        ring: FiniteRing,
        gen_images: Vec<RingElem>,
    ) -> Result<Self, LogMonoidError> {
        assert_eq!(gen_images.len(), base.gen_count());
        // multiplicative on relations
        for (index, (l, r)) in base.relations().iter().enumerate() {
            let il = image_of_word(&ring, &gen_images, l);
            let ir = image_of_word(&ring, &gen_images, r);
            if il != ir {
                return Err(LogMonoidError::NotMultiplicative { index });
            }
        }
        let bound = base.congruence_bound().min(6);
        let mut unit_words = Vec::new();
        for w in word::words_up_to(base.gen_count(), bound) {
            let img = image_of_word(&ring, &gen_images, &w);
            if ring.is_unit(&img) {
                unit_words.push((w, img));
            }
        }
        let lm = LogMonoid {
            base,
            ring,
            gen_images,
            unit_words,
            bound,
        };
        lm.check_log_condition()?;
        Ok(lm)
    }

    pub fn base(&self) -> &Arc<MonoidPresentation> {
        &self.base
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn gen_images(&self) -> &[RingElem] {
        &self.gen_images
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// The structure map alpha'(m, a) = alpha(m) a.
    pub fn structure_map(&self, e: &LogElem) -> RingElem {
        self.ring
            .mul(&image_of_word(&self.ring, &self.gen_images, &e.0), &e.1)
    }

    pub fn unit_class(&self, a: &RingElem) -> LogElem {
        (vec![0; self.base.gen_count()], a.clone())
    }

    pub fn add(&self, a: &LogElem, b: &LogElem) -> LogElem {
        (word::add(&a.0, &b.0), self.ring.mul(&a.1, &b.1))
    }

    /// Class equality: (m, a) ~ (m', a') iff there are bounded unit words
    /// u, u' with m + u = m' + u' in the base and a alpha(u') = a' alpha(u).
    pub fn elems_equal(&self, a: &LogElem, b: &LogElem) -> bool {
        for (u, alpha_u) in &self.unit_words {
            for (u2, alpha_u2) in &self.unit_words {
                if !self
                    .base
                    .words_equal(&word::add(&a.0, u), &word::add(&b.0, u2))
                    .is_true()
                {
                    continue;
                }
                if self.ring.mul(&a.1, alpha_u2) == self.ring.mul(&b.1, alpha_u) {
                    return true;
                }
            }
        }
        false
    }

    /// Distinct classes with base word of degree <= d, over all units.
    pub fn classes_up_to(&self, d: u32) -> Result<Vec<LogElem>, LogMonoidError> {
        let mut reps: Vec<LogElem> = Vec::new();
        for m in self.base.classes_up_to(d)? {
            for a in self.ring.units() {
                let e = (m.clone(), a);
                if !reps.iter().any(|r| self.elems_equal(r, &e)) {
                    reps.push(e);
                }
            }
        }
        Ok(reps)
    }

    /// Log condition: the preimage of the units is the unit factor and the
    /// structure map restricted to it is a bijection onto A^x.
    fn check_log_condition(&self) -> Result<(), LogMonoidError> {
        let units = self.ring.units();
        // (0, a) classes are pairwise distinct and realize every unit
        for a in &units {
            for b in &units {
                let ea = self.unit_class(a);
                let eb = self.unit_class(b);
                if (a == b) != self.elems_equal(&ea, &eb) {
                    return Err(LogMonoidError::LogConditionFailed(format!(
                        "unit classes {:?} and {:?} collapse",
                        a, b
                    )));
                }
            }
        }
        // every class with unit structure-map value is a unit class
        for e in self.classes_up_to(self.bound.min(3))? {
            let v = self.structure_map(&e);
            if self.ring.is_unit(&v) && !self.elems_equal(&e, &self.unit_class(&v)) {
                return Err(LogMonoidError::LogConditionFailed(format!(
                    "{:?} maps to a unit but is not a unit class",
                    e
                )));
            }
        }
        Ok(())
    }

    /// Base change M ⊠_A B along a ring map: the associated log monoid of
    /// f . alpha over the codomain.
    pub fn base_change(&self, f: &RingMap) -> Result<LogMonoid, LogMonoidError> {
        if f.dom() != &self.ring {
            return Err(LogMonoidError::NotRingHom);
        }
        f.validate().map_err(|_| LogMonoidError::NotRingHom)?;
        let images = self.gen_images.iter().map(|a| f.apply(a)).collect();
        LogMonoid::associated(Arc::clone(&self.base), f.cod().clone(), images)
    }

    /// The canonical map M -> M ⊠_A B, (m, a) -> (m, f(a)).
    pub fn base_change_map(&self, f: &RingMap, e: &LogElem) -> LogElem {
        (e.0.clone(), f.apply(&e.1))
    }
}

fn image_of_word(ring: &FiniteRing, images: &[RingElem], w: &[u32]) -> RingElem {
    let mut acc = ring.one();
    for (img, &mult) in images.iter().zip(w) {
        if mult > 0 {
            acc = ring.mul(&acc, &ring.pow(img, mult));
        }
    }
    acc
}

/// Homomorphism of log monoids over a ring map f: determined by images of
/// the base generators (the unit factor maps along f by the log condition).
#[derive(Debug, Clone)]
pub struct LogHom {
    pub gen_images: Vec<LogElem>,
}

impl LogHom {
    /// Identity-shaped hom: base generators map to themselves with trivial
    /// unit part.
    pub fn canonical(m: &LogMonoid) -> LogHom {
        LogHom {
            gen_images: (0..m.base().gen_count())
                .map(|i| (word::unit(m.base().gen_count(), i), m.ring().one()))
                .collect(),
        }
    }

    /// Applies to an element, landing in `target` (which hosts the images),
    /// over the ring map `f`. The unit part maps along f by the log
    /// condition.
    pub fn apply(&self, target: &LogMonoid, f: &RingMap, e: &LogElem) -> LogElem {
        let mut acc = target.unit_class(&f.apply(&e.1));
        for (img, &mult) in self.gen_images.iter().zip(&e.0) {
            for _ in 0..mult {
                acc = target.add(&acc, img);
            }
        }
        acc
    }

    /// Checks the square beta . phi = f . alpha on base generators.
    pub fn check_over(
        &self,
        source: &LogMonoid,
        target: &LogMonoid,
        f: &RingMap,
    ) -> Result<(), LogMonoidError> {
        for (index, img) in self.gen_images.iter().enumerate() {
            let via_phi = target.structure_map(img);
            let via_f = f.apply(&source.gen_images[index]);
            if via_phi != via_f {
                return Err(LogMonoidError::NotOverF { index });
            }
        }
        Ok(())
    }
}

/// The adjunction Hom_f(M, N) = Hom_B(M ⊠_A B, N): gamma(phi)(m, b) =
/// phi(m) b and delta(phi')(m) = phi'(m, 1). Both directions act on the
/// generator images, so the round trip is checked there.
pub struct Adjunction<'a> {
    pub source: &'a LogMonoid,
    pub target: &'a LogMonoid,
    pub f: &'a RingMap,
    pub base_changed: LogMonoid,
}

impl<'a> Adjunction<'a> {
    pub fn new(
        source: &'a LogMonoid,
        target: &'a LogMonoid,
        f: &'a RingMap,
    ) -> Result<Self, LogMonoidError> {
        if f.dom() != source.ring() || f.cod() != target.ring() {
            return Err(LogMonoidError::NotRingHom);
        }
        let base_changed = source.base_change(f)?;
        Ok(Adjunction {
            source,
            target,
            f,
            base_changed,
        })
    }

    /// gamma: a hom over f becomes a hom over B with the same generator
    /// images (units already live in B).
    pub fn gamma(&self, phi: &LogHom) -> Result<LogHom, LogMonoidError> {
        phi.check_over(self.source, self.target, self.f)?;
        Ok(LogHom {
            gen_images: phi.gen_images.clone(),
        })
    }

    /// delta: a hom over B restricts to a hom over f via m -> phi'(m, 1).
    pub fn delta(&self, phi_prime: &LogHom) -> Result<LogHom, LogMonoidError> {
        let out = LogHom {
            gen_images: phi_prime.gen_images.clone(),
        };
        // verify it is over f
        for (index, img) in out.gen_images.iter().enumerate() {
            let via_phi = self.target.structure_map(img);
            let via_f = self.f.apply(&self.source.gen_images[index]);
            if via_phi != via_f {
                return Err(LogMonoidError::NotOverF { index });
            }
        }
        Ok(out)
    }

    /// Round trip on every generator image, as classes of the target.
    pub fn round_trip_identity(&self, phi: &LogHom) -> Result<bool, LogMonoidError> {
        let g = self.gamma(phi)?;
        let d = self.delta(&g)?;
        Ok(phi
            .gen_images
            .iter()
            .zip(&d.gen_images)
            .all(|(a, b)| self.target.elems_equal(a, b)))
    }
}

/// Descent report for a faithfully flat toy extension.
#[derive(Debug, Clone, Serialize)]
pub struct DescentReport {
    pub injective: bool,
    pub equalizer_ok: bool,
    pub classes_checked: usize,
    pub degree: u32,
}

/// Checks exactness of 0 -> M -> M ⊠_A B => M ⊠_A (B (x)_A B) on all
/// classes with base degree <= `degree`: the first map is injective and its
/// image is exactly the equalizer of the two parallel maps.
pub fn descent_check(
    m: &LogMonoid,
    f: &RingMap,
    degree: u32,
) -> Result<DescentReport, LogMonoidError> {
    if f.dom() != m.ring() {
        return Err(LogMonoidError::NotRingHom);
    }
    let square = tensor_square(f).map_err(|e| LogMonoidError::NotFaithfullyFlat(e.to_string()))?;
    let mb = m.base_change(f)?;
    let p_map = &square.left;
    let q_map = &square.right;
    let m_bb = mb.base_change(p_map)?; // base words unchanged; ring is B (x) B

    // injectivity of id ⊠ f on classes of M
    let m_classes = m.classes_up_to(degree)?;
    let mut injective = true;
    for (i, a) in m_classes.iter().enumerate() {
        for b in &m_classes[i + 1..] {
            let fa = m.base_change_map(f, a);
            let fb = m.base_change_map(f, b);
            if mb.elems_equal(&fa, &fb) {
                injective = false;
            }
        }
    }

    // equalizer: classes of M ⊠ B with equal p/q images come from M
    let mb_classes = mb.classes_up_to(degree)?;
    let mut equalizer_ok = true;
    for e in &mb_classes {
        let pe = mb.base_change_map(p_map, e);
        let qe = mb.base_change_map(q_map, e);
        let equalized = m_bb.elems_equal(&pe, &qe);
        let from_m = m
            .ring()
            .units()
            .iter()
            .any(|a| mb.elems_equal(e, &(e.0.clone(), f.apply(a))));
        if equalized != from_m {
            equalizer_ok = false;
        }
    }
    Ok(DescentReport {
        injective,
        equalizer_ok,
        classes_checked: m_classes.len() + mb_classes.len(),
        degree,
    })
}
