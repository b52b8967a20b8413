//! Toy coefficient rings: prime fields F_p, Galois fields F_{p^k},
//! truncated series rings F_p[t]/(t^N), and the two tensor-square shapes
//! needed for descent checks (a product of Galois field copies, and the
//! bivariate truncation F_p[t1,t2]/(t1^N, t2^N)).
//!
//! Every carrier is finite and elements are coefficient strings, so unit
//! groups, inverses and tensor squares are all computed by enumeration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RingError {
    #[error("unsupported ring parameters: {0}")]
    BadParameters(String),
    #[error("map is not a unital ring homomorphism")]
    NotRingHom,
    #[error("elements belong to different rings")]
    RingMismatch,
}

/// Element of a [`FiniteRing`], a coefficient string whose meaning depends
/// on the ring kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingElem(pub Vec<u8>);

/// A finite commutative ring with unity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiniteRing {
    /// F_p; elements are single residues.
    PrimeField { p: u8 },
    /// F_{p^k} = F_p[x]/(modulus); elements are k coefficient strings,
    /// modulus is the monic irreducible of degree k (k+1 coefficients).
    GaloisField { p: u8, k: u8, modulus: Vec<u8> },
    /// F_p[t]/(t^N); elements are N coefficient strings.
    TruncatedSeries { p: u8, precision: u8 },
    /// A product of `copies` copies of `factor` (elements concatenate).
    Product { factor: Box<FiniteRing>, copies: u8 },
    /// F_p[t1, t2]/(t1^N, t2^N); elements are N*N coefficient strings in
    /// row-major (t1-degree, t2-degree) order.
    BiTruncated { p: u8, precision: u8 },
}

fn is_prime(p: u8) -> bool {
    p >= 2 && (2..p).all(|d| !p.is_multiple_of(d))
}

/// Searches the monic irreducible polynomials of degree k over F_p and
/// returns the first in lexicographic coefficient order.
fn find_irreducible(p: u8, k: u8) -> Vec<u8> {
    let p64 = u64::from(p);
    let total = p64.pow(u32::from(k));
    // candidate = coefficients c_0..c_{k-1}, leading coefficient 1
    'cand: for idx in 0..total {
        let mut c = Vec::with_capacity(usize::from(k) + 1);
        let mut rest = idx;
        for _ in 0..k {
            c.push((rest % p64) as u8);
            rest /= p64;
        }
        c.push(1);
        // irreducible iff no monic factor of degree 1..=k/2; test by root
        // search for k <= 3, which covers every toy parameter here
        if k <= 1 {
            return c;
        }
        for r in 0..p {
            let mut acc: u64 = 0;
            for &ci in c.iter().rev() {
                acc = (acc * u64::from(r) + u64::from(ci)) % u64::from(p);
            }
            if acc == 0 {
                continue 'cand;
            }
        }
        if k <= 3 {
            // degree 2 and 3 are irreducible iff they have no roots
            return c;
        }
        unreachable!("toy rings keep k <= 3");
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

impl FiniteRing {
    pub fn prime_field(p: u8) -> Result<Self, RingError> {
        if !is_prime(p) {
            return Err(RingError::BadParameters(format!("{p} is not prime")));
        }
        Ok(FiniteRing::PrimeField { p })
    }

    pub fn galois_field(p: u8, k: u8) -> Result<Self, RingError> {
        if !is_prime(p) || k == 0 || k > 3 {
            return Err(RingError::BadParameters(format!(
                "GF({p}^{k}) outside the supported toy range"
            )));
        }
        Ok(FiniteRing::GaloisField {
            p,
            k,
            modulus: find_irreducible(p, k),
        })
    }

    pub fn truncated_series(p: u8, precision: u8) -> Result<Self, RingError> {
        if !is_prime(p) || precision == 0 {
            return Err(RingError::BadParameters(format!(
                "F_{p}[t]/(t^{precision}) is not a valid toy ring"
            )));
        }
        Ok(FiniteRing::TruncatedSeries { p, precision })
    }

    pub fn characteristic(&self) -> u8 {
        match self {
            FiniteRing::PrimeField { p }
            | FiniteRing::GaloisField { p, .. }
            | FiniteRing::TruncatedSeries { p, .. }
            | FiniteRing::BiTruncated { p, .. } => *p,
            FiniteRing::Product { factor, .. } => factor.characteristic(),
        }
    }

    /// Length of the coefficient string of an element.
    pub fn elem_len(&self) -> usize {
        match self {
            FiniteRing::PrimeField { .. } => 1,
            FiniteRing::GaloisField { k, .. } => usize::from(*k),
            FiniteRing::TruncatedSeries { precision, .. } => usize::from(*precision),
            FiniteRing::Product { factor, copies } => factor.elem_len() * usize::from(*copies),
            FiniteRing::BiTruncated { precision, .. } => {
                usize::from(*precision) * usize::from(*precision)
            }
        }
    }

    pub fn size(&self) -> usize {
        usize::from(self.characteristic()).pow(self.elem_len() as u32)
    }

    pub fn zero(&self) -> RingElem {
        RingElem(vec![0; self.elem_len()])
    }

    pub fn one(&self) -> RingElem {
        match self {
            FiniteRing::Product { factor, copies } => {
                let inner = factor.one().0;
                RingElem(
                    std::iter::repeat_n(inner, usize::from(*copies))
                        .flatten()
                        .collect(),
                )
            }
            _ => {
                let mut v = vec![0; self.elem_len()];
                v[0] = 1;
                RingElem(v)
            }
        }
    }

    pub fn is_zero(&self, a: &RingElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        let p = self.characteristic();
        RingElem(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + y) % p).collect())
    }

    pub fn neg(&self, a: &RingElem) -> RingElem {
        let p = self.characteristic();
        RingElem(a.0.iter().map(|&x| (p - x) % p).collect())
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> RingElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        self.mul_flagged(a, b).0
    }

    /// Multiplication together with a flag marking precision loss: true when
    /// a nonzero coefficient was truncated away by t^N = 0 (or its bivariate
    /// analogue). Fields never flag.
    pub fn mul_flagged(&self, a: &RingElem, b: &RingElem) -> (RingElem, bool) {
        let p = u16::from(self.characteristic());
        match self {
            FiniteRing::PrimeField { .. } => (
                RingElem(vec![((u16::from(a.0[0]) * u16::from(b.0[0])) % p) as u8]),
                false,
            ),
            FiniteRing::GaloisField { k, modulus, .. } => {
                let k = usize::from(*k);
                let mut prod = vec![0u16; 2 * k - 1];
                for (i, &x) in a.0.iter().enumerate() {
                    for (j, &y) in b.0.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + u16::from(x) * u16::from(y)) % p;
                    }
                }
                // reduce by the monic modulus
                for d in (k..2 * k - 1).rev() {
                    let c = prod[d];
                    if c != 0 {
                        prod[d] = 0;
                        for (off, &m) in modulus.iter().enumerate().take(k) {
                            let idx = d - k + off;
                            prod[idx] = (prod[idx] + p - (c * u16::from(m)) % p) % p;
                        }
                    }
                }
                (
                    RingElem(prod[..k].iter().map(|&c| c as u8).collect()),
                    false,
                )
            }
            FiniteRing::TruncatedSeries { precision, .. } => {
                let n = usize::from(*precision);
                let mut prod = vec![0u16; 2 * n - 1];
                for (i, &x) in a.0.iter().enumerate() {
                    for (j, &y) in b.0.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + u16::from(x) * u16::from(y)) % p;
                    }
                }
                let lost = prod[n..].iter().any(|&c| c != 0);
                (RingElem(prod[..n].iter().map(|&c| c as u8).collect()), lost)
            }
            FiniteRing::Product { factor, copies } => {
                let len = factor.elem_len();
                let mut out = Vec::with_capacity(self.elem_len());
                let mut lost = false;
                for c in 0..usize::from(*copies) {
                    let ax = RingElem(a.0[c * len..(c + 1) * len].to_vec());
                    let bx = RingElem(b.0[c * len..(c + 1) * len].to_vec());
                    let (prod, l) = factor.mul_flagged(&ax, &bx);
                    lost |= l;
                    out.extend(prod.0);
                }
                (RingElem(out), lost)
            }
            FiniteRing::BiTruncated { precision, .. } => {
                let n = usize::from(*precision);
                let idx = |i: usize, j: usize| i * n + j;
                let mut out = vec![0u16; n * n];
                let mut lost = false;
                for i1 in 0..n {
                    for j1 in 0..n {
                        let x = u16::from(a.0[idx(i1, j1)]);
                        if x == 0 {
                            continue;
                        }
                        for i2 in 0..n {
                            for j2 in 0..n {
                                let y = u16::from(b.0[idx(i2, j2)]);
                                if y == 0 {
                                    continue;
                                }
                                if i1 + i2 >= n || j1 + j2 >= n {
                                    lost = true;
                                } else {
                                    let t = idx(i1 + i2, j1 + j2);
                                    out[t] = (out[t] + x * y) % p;
                                }
                            }
                        }
                    }
                }
                (RingElem(out.iter().map(|&c| c as u8).collect()), lost)
            }
        }
    }

    pub fn pow(&self, a: &RingElem, e: u32) -> RingElem {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// All elements, in lexicographic coefficient order.
    pub fn elements(&self) -> Vec<RingElem> {
        let p = self.characteristic();
        let len = self.elem_len();
        let mut out = Vec::with_capacity(self.size());
        let mut cur = vec![0u8; len];
        loop {
            out.push(RingElem(cur.clone()));
            let mut i = 0;
            loop {
                if i == len {
                    return out;
                }
                cur[i] += 1;
                if cur[i] < p {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    pub fn is_unit(&self, a: &RingElem) -> bool {
        match self {
            FiniteRing::PrimeField { .. } | FiniteRing::GaloisField { .. } => !self.is_zero(a),
            FiniteRing::TruncatedSeries { .. } => a.0[0] != 0,
            FiniteRing::Product { factor, copies } => {
                let len = factor.elem_len();
                (0..usize::from(*copies))
                    .all(|c| factor.is_unit(&RingElem(a.0[c * len..(c + 1) * len].to_vec())))
            }
            FiniteRing::BiTruncated { .. } => a.0[0] != 0,
        }
    }

    pub fn units(&self) -> Vec<RingElem> {
        self.elements()
            .into_iter()
            .filter(|e| self.is_unit(e))
            .collect()
    }

    pub fn inverse(&self, a: &RingElem) -> Option<RingElem> {
        if !self.is_unit(a) {
            return None;
        }
        let one = self.one();
        self.elements().into_iter().find(|b| self.mul(a, b) == one)
    }

    /// `t` in a truncated series ring.
    pub fn t_gen(&self) -> Option<RingElem> {
        match self {
            FiniteRing::TruncatedSeries { precision, .. } => {
                let mut v = vec![0u8; usize::from(*precision)];
                if v.len() > 1 {
                    v[1] = 1;
                } else {
                    return Some(RingElem(v)); // t = 0 at precision 1
                }
                Some(RingElem(v))
            }
            _ => None,
        }
    }

    /// t-adic valuation of an element of a truncated series ring; `None`
    /// for zero.
    pub fn t_valuation(&self, a: &RingElem) -> Option<usize> {
        match self {
            FiniteRing::TruncatedSeries { .. } => a.0.iter().position(|&c| c != 0),
            _ => {
                if self.is_zero(a) {
                    None
                } else {
                    Some(0)
                }
            }
        }
    }

    /// Whether the element lies in the maximal ideal (nonunits) of a local
    /// toy ring. Fields: zero only.
    pub fn in_max_ideal(&self, a: &RingElem) -> bool {
        !self.is_unit(a)
    }

    /// Embeds an F_p-scalar string into this ring (constant embedding).
    pub fn from_residue(&self, c: u8) -> RingElem {
        let mut v = vec![0u8; self.elem_len()];
        match self {
            FiniteRing::Product { factor, copies } => {
                let inner = factor.from_residue(c).0;
                let len = factor.elem_len();
                for i in 0..usize::from(*copies) {
                    v[i * len..(i + 1) * len].copy_from_slice(&inner);
                }
            }
            _ => v[0] = c % self.characteristic(),
        }
        RingElem(v)
    }

    /// Frobenius x -> x^p.
    pub fn frobenius(&self, a: &RingElem) -> RingElem {
        self.pow(a, u32::from(self.characteristic()))
    }
}

/// Unital ring homomorphisms between toy rings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RingMap {
    Identity(FiniteRing),
    /// F_p -> F_{p^k} or F_p -> F_p[t]/(t^N): constant embedding.
    ScalarEmbed {
        dom: FiniteRing,
        cod: FiniteRing,
    },
    /// F_p[t]/(t^N) -> F_p[t]/(t^M) with M <= N: truncation.
    Truncate {
        dom: FiniteRing,
        cod: FiniteRing,
    },
    /// b -> b (x) 1 into the Galois tensor square, realized as
    /// (b, F(b), ..., F^{k-1}(b)) in the product of k copies.
    GaloisTensorLeft {
        dom: FiniteRing,
        cod: FiniteRing,
    },
    /// b -> 1 (x) b into the Galois tensor square: the diagonal.
    GaloisTensorRight {
        dom: FiniteRing,
        cod: FiniteRing,
    },
    /// F_p[t]/(t^N) -> F_p[t1,t2]/(t1^N, t2^N), t -> t1.
    BiTensorLeft {
        dom: FiniteRing,
        cod: FiniteRing,
    },
    /// t -> t2.
    BiTensorRight {
        dom: FiniteRing,
        cod: FiniteRing,
    },
}

impl RingMap {
    pub fn dom(&self) -> &FiniteRing {
        match self {
            RingMap::Identity(r) => r,
            RingMap::ScalarEmbed { dom, .. }
            | RingMap::Truncate { dom, .. }
            | RingMap::GaloisTensorLeft { dom, .. }
            | RingMap::GaloisTensorRight { dom, .. }
            | RingMap::BiTensorLeft { dom, .. }
            | RingMap::BiTensorRight { dom, .. } => dom,
        }
    }

    pub fn cod(&self) -> &FiniteRing {
        match self {
            RingMap::Identity(r) => r,
            RingMap::ScalarEmbed { cod, .. }
            | RingMap::Truncate { cod, .. }
            | RingMap::GaloisTensorLeft { cod, .. }
            | RingMap::GaloisTensorRight { cod, .. }
            | RingMap::BiTensorLeft { cod, .. }
            | RingMap::BiTensorRight { cod, .. } => cod,
        }
    }

    pub fn apply(&self, a: &RingElem) -> RingElem {
        match self {
            RingMap::Identity(_) => a.clone(),
            RingMap::ScalarEmbed { cod, .. } => cod.from_residue(a.0[0]),
            RingMap::Truncate { cod, .. } => RingElem(a.0[..cod.elem_len()].to_vec()),
            RingMap::GaloisTensorLeft { dom, cod } => {
                let FiniteRing::Product { copies, .. } = cod else {
                    unreachable!("tensor square of a Galois field is a product")
                };
                let mut out = Vec::with_capacity(cod.elem_len());
                let mut cur = a.clone();
                for _ in 0..*copies {
                    out.extend(cur.0.clone());
                    cur = dom.frobenius(&cur);
                }
                RingElem(out)
            }
            RingMap::GaloisTensorRight { cod, .. } => {
                let FiniteRing::Product { factor, copies } = cod else {
                    unreachable!("tensor square of a Galois field is a product")
                };
                let len = factor.elem_len();
                let mut out = vec![0u8; len * usize::from(*copies)];
                for i in 0..usize::from(*copies) {
                    out[i * len..(i + 1) * len].copy_from_slice(&a.0);
                }
                RingElem(out)
            }
            RingMap::BiTensorLeft { cod, .. } => {
                let FiniteRing::BiTruncated { precision, .. } = cod else {
                    unreachable!()
                };
                let n = usize::from(*precision);
                let mut out = vec![0u8; n * n];
                for (i, &c) in a.0.iter().enumerate() {
                    out[i * n] = c; // t^i -> t1^i
                }
                RingElem(out)
            }
            RingMap::BiTensorRight { cod, .. } => {
                let FiniteRing::BiTruncated { precision, .. } = cod else {
                    unreachable!()
                };
                let n = usize::from(*precision);
                let mut out = vec![0u8; n * n];
                for (i, &c) in a.0.iter().enumerate() {
                    out[i] = c; // t^i -> t2^i
                }
                RingElem(out)
            }
        }
    }

    /// Validates multiplicativity, additivity and unitality by enumeration.
    pub fn validate(&self) -> Result<(), RingError> {
        let dom = self.dom();
        let cod = self.cod();
        if self.apply(&dom.one()) != cod.one() {
            return Err(RingError::NotRingHom);
        }
        let elems = dom.elements();
        for a in &elems {
            for b in &elems {
                if self.apply(&dom.add(a, b)) != cod.add(&self.apply(a), &self.apply(b)) {
                    return Err(RingError::NotRingHom);
                }
                if self.apply(&dom.mul(a, b)) != cod.mul(&self.apply(a), &self.apply(b)) {
                    return Err(RingError::NotRingHom);
                }
            }
        }
        Ok(())
    }

    /// Quasi-local: preimage of the unit group is exactly the unit group.
    pub fn is_quasi_local(&self) -> bool {
        self.dom()
            .elements()
            .iter()
            .all(|a| self.dom().is_unit(a) == self.cod().is_unit(&self.apply(a)))
    }
}

/// The tensor square B (x)_A B together with the two maps p, q : B -> B(x)B,
/// for the supported faithfully flat toy pairs.
pub struct TensorSquare {
    pub ring: FiniteRing,
    pub left: RingMap,
    pub right: RingMap,
}

/// Builds B (x)_A B for f : A -> B one of the supported extensions:
/// F_p -> F_{p^k} (the square splits into k Galois copies) or
/// F_p -> F_p[t]/(t^N) (the square is the bivariate truncation).
pub fn tensor_square(f: &RingMap) -> Result<TensorSquare, RingError> {
    match (f.dom(), f.cod()) {
        (FiniteRing::PrimeField { p }, FiniteRing::GaloisField { p: p2, k, .. }) if p == p2 => {
            let cod = FiniteRing::Product {
                factor: Box::new(f.cod().clone()),
                copies: *k,
            };
            Ok(TensorSquare {
                ring: cod.clone(),
                left: RingMap::GaloisTensorLeft {
                    dom: f.cod().clone(),
                    cod: cod.clone(),
                },
                right: RingMap::GaloisTensorRight {
                    dom: f.cod().clone(),
                    cod,
                },
            })
        }
        (FiniteRing::PrimeField { p }, FiniteRing::TruncatedSeries { p: p2, precision })
            if p == p2 =>
        {
            let cod = FiniteRing::BiTruncated {
                p: *p,
                precision: *precision,
            };
            Ok(TensorSquare {
                ring: cod.clone(),
                left: RingMap::BiTensorLeft {
                    dom: f.cod().clone(),
                    cod: cod.clone(),
                },
                right: RingMap::BiTensorRight {
                    dom: f.cod().clone(),
                    cod,
                },
            })
        }
        _ => Err(RingError::BadParameters(
            "tensor square supported for F_p -> F_{p^k} and F_p -> F_p[t]/(t^N)".into(),
        )),
    }
}
