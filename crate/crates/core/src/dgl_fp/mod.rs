//! Free (differential) graded Lie algebras over F_p, computed by brute force.
//!
//! Basis: super-Lyndon words, i.e. Lyndon words with their standard
//! bracketing plus `[w, w]` for every Lyndon `w` of odd degree. An element
//! of total degree `n` is odd iff `n` is odd.
//!
//! Brackets are evaluated in the tensor algebra, where the basis element of a
//! Lyndon word `w` has `w` as its smallest word with coefficient 1 (2 for a
//! square). Expressing a commutator back in the basis is then triangular
//! elimination on smallest words, and it fails loudly if a tensor is not in
//! the Lie span.

mod matrix;
pub mod words;

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::charpoly::GeneratorSet;
use crate::combinat::{binom_div_p, is_odd_prime};
use crate::error::{invalid, Error, Result};
use crate::lie_rank::babenko_ranks;

pub use matrix::{inv_mod, pow_mod, FpMatrix};
use words::{is_lyndon, standard_split, word_degree, words_up_to, Word};

/// Default cap on the degrees the brute-force engine will build.
pub const DEFAULT_MAX_DEGREE: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DglConfig {
    pub max_degree: u32,
}

impl Default for DglConfig {
    fn default() -> Self {
        DglConfig { max_degree: DEFAULT_MAX_DEGREE }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAlphabet {
    names: Vec<String>,
    degrees: Vec<u32>,
}

impl WeightedAlphabet {
    pub fn new(letters: Vec<(String, u32)>) -> Result<Self> {
        if letters.is_empty() || letters.len() > u8::MAX as usize {
            return Err(invalid("alphabet needs between 1 and 255 letters"));
        }
        if letters.iter().any(|(_, d)| *d == 0) {
            return Err(invalid("letter degrees must be positive"));
        }
        let (names, degrees) = letters.into_iter().unzip();
        Ok(WeightedAlphabet { names, degrees })
    }

    /// `x` in degree `q+1` and `y = dx` in degree `q`, ordered `x < y`.
    pub fn acyclic_pair(q: u32) -> Result<Self> {
        if q == 0 {
            return Err(invalid("q must be positive"));
        }
        Self::new(vec![("x".into(), q + 1), ("y".into(), q)])
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn name(&self, letter: usize) -> &str {
        &self.names[letter]
    }

    /// The generator set with the same degree multiset.
    pub fn generator_set(&self) -> GeneratorSet {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for &d in &self.degrees {
            *counts.entry(d).or_default() += 1;
        }
        GeneratorSet::new(counts.into_iter().collect()).expect("alphabet degrees are positive")
    }
}

/// How a basis element is bracketed from earlier ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Letter(u8),
    /// Standard factorization `[u, v]` of a Lyndon word.
    Bracket(usize, usize),
    /// `[w, w]` for a Lyndon `w` of odd degree.
    Square(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElement {
    pub word: Word,
    pub degree: u32,
    pub shape: Shape,
}

/// Homogeneous F_p combination of basis elements (indices into the engine's basis).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieElement {
    degree: u32,
    terms: BTreeMap<usize, u64>,
}

impl LieElement {
    pub fn zero(degree: u32) -> Self {
        LieElement { degree, terms: BTreeMap::new() }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn coefficient(&self, index: usize) -> u64 {
        self.terms.get(&index).copied().unwrap_or(0)
    }

    fn add_term(&mut self, index: usize, c: u64, p: u64) {
        let e = self.terms.entry(index).or_insert(0);
        *e = (*e + c) % p;
        if *e == 0 {
            self.terms.remove(&index);
        }
    }
}

type Tensor = BTreeMap<Word, u64>;

fn tensor_add(acc: &mut Tensor, w: Word, c: u64, p: u64) {
    let c = c % p;
    if c == 0 {
        return;
    }
    match acc.entry(w) {
        Entry::Vacant(slot) => {
            slot.insert(c);
        }
        Entry::Occupied(mut slot) => {
            let v = (*slot.get() + c) % p;
            if v == 0 {
                slot.remove();
            } else {
                *slot.get_mut() = v;
            }
        }
    }
}

fn tensor_mul_into(acc: &mut Tensor, a: &Tensor, b: &Tensor, scale: u64, p: u64) {
    for (wa, ca) in a {
        for (wb, cb) in b {
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            tensor_add(acc, w, ca * cb % p * scale % p, p);
        }
    }
}

/// Graded sign `(−1)^{ab}` as an F_p element.
fn koszul(a: u32, b: u32, p: u64) -> u64 {
    if (a % 2 == 1) && (b % 2 == 1) {
        p - 1
    } else {
        1
    }
}

/// `d` on generators: each letter maps to a multiple of another letter or to 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LetterDifferential {
    images: Vec<Option<(u8, u64)>>,
}

impl LetterDifferential {
    pub fn new(images: Vec<Option<(u8, u64)>>) -> Self {
        LetterDifferential { images }
    }

    /// `dx = y`, `dy = 0` on [`WeightedAlphabet::acyclic_pair`].
    pub fn acyclic_pair() -> Self {
        Self::new(vec![Some((1, 1)), None])
    }

    fn validate(&self, alphabet: &WeightedAlphabet) -> Result<()> {
        if self.images.len() != alphabet.len() {
            return Err(invalid("differential must assign every letter"));
        }
        for (a, img) in self.images.iter().enumerate() {
            if let Some((b, _)) = img {
                let b = *b as usize;
                if b >= alphabet.len() || alphabet.degrees[b] + 1 != alphabet.degrees[a] {
                    return Err(invalid(format!("d({}) must have degree one less", alphabet.name(a))));
                }
                if self.images[b].is_some() {
                    return Err(invalid("differential on letters must square to zero"));
                }
            }
        }
        Ok(())
    }
}

/// Free graded Lie algebra over F_p with its basis built up to a fixed degree.
#[derive(Debug, Clone)]
pub struct FreeLieFp {
    alphabet: WeightedAlphabet,
    p: u64,
    built_degree: u32,
    elements: Vec<BasisElement>,
    by_degree: Vec<Vec<usize>>,
    lead: HashMap<Word, usize>,
    expansions: Vec<Tensor>,
    lead_inverse: Vec<u64>,
}

impl FreeLieFp {
    /// Builds the super-Lyndon basis in degrees `1..=up_to`.
    pub fn new(alphabet: WeightedAlphabet, p: u64, up_to: u32, config: DglConfig) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(invalid(format!("p = {p} is not an odd prime")));
        }
        if up_to == 0 {
            return Err(invalid("up_to must be at least 1"));
        }
        if up_to > config.max_degree {
            return Err(Error::DegreeLimitExceeded { requested: up_to as u64, limit: config.max_degree });
        }
        let degrees = alphabet.degrees.clone();
        let mut engine = FreeLieFp {
            alphabet,
            p,
            built_degree: up_to,
            elements: Vec::new(),
            by_degree: vec![Vec::new(); up_to as usize + 1],
            lead: HashMap::new(),
            expansions: Vec::new(),
            lead_inverse: Vec::new(),
        };
        // words arrive sorted by length, so factors precede the words they build
        let lyndon: Vec<Word> = words_up_to(&degrees, up_to).into_iter().filter(|w| is_lyndon(w)).collect();
        let mut index_of: HashMap<Word, usize> = HashMap::new();
        let mut squares: Vec<(usize, u32)> = Vec::new();
        for w in lyndon {
            let degree = word_degree(&w, &degrees);
            let shape = match standard_split(&w) {
                None => Shape::Letter(w[0]),
                Some(i) => Shape::Bracket(index_of[&w[..i]], index_of[&w[i..]]),
            };
            let idx = engine.push(BasisElement { word: w.clone(), degree, shape });
            index_of.insert(w, idx);
            if degree % 2 == 1 && 2 * degree <= up_to {
                squares.push((idx, degree));
            }
        }
        for (root, degree) in squares {
            let mut word = engine.elements[root].word.clone();
            word.extend_from_within(..);
            engine.push(BasisElement { word, degree: 2 * degree, shape: Shape::Square(root) });
        }
        for list in &mut engine.by_degree {
            list.sort_by(|&a, &b| engine.elements[a].word.cmp(&engine.elements[b].word));
        }
        Ok(engine)
    }

    fn push(&mut self, el: BasisElement) -> usize {
        let p = self.p;
        let idx = self.elements.len();
        let expansion = match el.shape {
            Shape::Letter(a) => Tensor::from([(vec![a], 1)]),
            Shape::Bracket(u, v) => {
                let (du, dv) = (self.elements[u].degree, self.elements[v].degree);
                let mut t = Tensor::new();
                tensor_mul_into(&mut t, &self.expansions[u], &self.expansions[v], 1, p);
                tensor_mul_into(&mut t, &self.expansions[v], &self.expansions[u], p - koszul(du, dv, p), p);
                t
            }
            Shape::Square(w) => {
                let mut t = Tensor::new();
                tensor_mul_into(&mut t, &self.expansions[w], &self.expansions[w], 2, p);
                t
            }
        };
        let (lead_word, lead_coef) = expansion.iter().next().map(|(w, c)| (w.clone(), *c)).expect("nonzero expansion");
        debug_assert_eq!(lead_word, el.word, "smallest word of a basis element is its own word");
        self.lead.insert(lead_word, idx);
        self.lead_inverse.push(inv_mod(lead_coef, p));
        self.expansions.push(expansion);
        self.by_degree[el.degree as usize].push(idx);
        self.elements.push(el);
        idx
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn alphabet(&self) -> &WeightedAlphabet {
        &self.alphabet
    }

    pub fn built_degree(&self) -> u32 {
        self.built_degree
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    /// Basis indices in degree `n`, sorted by word.
    pub fn degree_basis(&self, n: u32) -> &[usize] {
        self.by_degree.get(n as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn dim(&self, n: u32) -> usize {
        self.degree_basis(n).len()
    }

    fn check_degree(&self, n: u64) -> Result<()> {
        if n > self.built_degree as u64 {
            Err(Error::DegreeLimitExceeded { requested: n, limit: self.built_degree })
        } else {
            Ok(())
        }
    }

    pub fn letter(&self, a: usize) -> Result<LieElement> {
        let word = vec![a as u8];
        let idx = *self.lead.get(&word).ok_or_else(|| invalid(format!("no letter {a} in the basis")))?;
        Ok(self.basis_element(idx))
    }

    pub fn basis_element(&self, idx: usize) -> LieElement {
        let mut e = LieElement::zero(self.elements[idx].degree);
        e.add_term(idx, 1, self.p);
        e
    }

    pub fn add(&self, a: &LieElement, b: &LieElement) -> LieElement {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        assert_eq!(a.degree, b.degree, "adding elements of different degrees");
        let mut out = a.clone();
        for (i, c) in b.terms() {
            out.add_term(i, c, self.p);
        }
        out
    }

    pub fn scale(&self, a: &LieElement, c: u64) -> LieElement {
        let mut out = LieElement::zero(a.degree);
        for (i, v) in a.terms() {
            out.add_term(i, v * (c % self.p), self.p);
        }
        out
    }

    pub fn neg(&self, a: &LieElement) -> LieElement {
        self.scale(a, self.p - 1)
    }

    fn expand(&self, a: &LieElement) -> Tensor {
        let mut t = Tensor::new();
        for (i, c) in a.terms() {
            for (w, v) in &self.expansions[i] {
                tensor_add(&mut t, w.clone(), v * c, self.p);
            }
        }
        t
    }

    /// Writes a Lie tensor in the basis; errors if it is not in the Lie span.
    fn reduce(&self, mut t: Tensor, degree: u32) -> Result<LieElement> {
        let p = self.p;
        let mut out = LieElement::zero(degree);
        while let Some((w, c)) = t.iter().next().map(|(w, c)| (w.clone(), *c)) {
            let Some(&idx) = self.lead.get(&w) else {
                return Err(Error::Internal(format!("tensor with smallest word {w:?} is not a Lie element")));
            };
            let a = c * self.lead_inverse[idx] % p;
            out.add_term(idx, a, p);
            for (v, cv) in &self.expansions[idx] {
                tensor_add(&mut t, v.clone(), p - cv * a % p, p);
            }
            debug_assert!(!t.contains_key(&w));
        }
        Ok(out)
    }

    /// Graded bracket `[a, b] = ab − (−1)^{|a||b|} ba`, expressed in the basis.
    pub fn bracket(&self, a: &LieElement, b: &LieElement) -> Result<LieElement> {
        let degree = a.degree + b.degree;
        self.check_degree(degree as u64)?;
        if a.is_zero() || b.is_zero() {
            return Ok(LieElement::zero(degree));
        }
        let (ta, tb) = (self.expand(a), self.expand(b));
        let mut t = Tensor::new();
        tensor_mul_into(&mut t, &ta, &tb, 1, self.p);
        tensor_mul_into(&mut t, &tb, &ta, self.p - koszul(a.degree, b.degree, self.p), self.p);
        self.reduce(t, degree)
    }

    /// Extends `d` from letters as a degree −1 derivation (Leibniz on the bracketing).
    pub fn differential(&self, e: &LieElement, d: &LetterDifferential) -> Result<LieElement> {
        d.validate(&self.alphabet)?;
        let mut memo: HashMap<usize, LieElement> = HashMap::new();
        let mut out = LieElement::zero(e.degree.saturating_sub(1));
        for (i, c) in e.terms() {
            let di = self.basis_differential(i, d, &mut memo)?;
            out = self.add(&out, &self.scale(&di, c));
        }
        Ok(out)
    }

    fn basis_differential(
        &self,
        idx: usize,
        d: &LetterDifferential,
        memo: &mut HashMap<usize, LieElement>,
    ) -> Result<LieElement> {
        if let Some(v) = memo.get(&idx) {
            return Ok(v.clone());
        }
        let el = &self.elements[idx];
        let out_degree = el.degree - 1;
        let value = match el.shape {
            Shape::Letter(a) => match d.images[a as usize] {
                Some((b, c)) => self.scale(&self.letter(b as usize)?, c),
                None => LieElement::zero(out_degree),
            },
            Shape::Bracket(..) | Shape::Square(_) => {
                let (u, v) = match el.shape {
                    Shape::Bracket(u, v) => (u, v),
                    Shape::Square(w) => (w, w),
                    Shape::Letter(_) => unreachable!(),
                };
                let (eu, ev) = (self.basis_element(u), self.basis_element(v));
                let du = self.basis_differential(u, d, memo)?;
                let dv = self.basis_differential(v, d, memo)?;
                let first = self.bracket(&du, &ev)?;
                let second = self.bracket(&eu, &dv)?;
                let sign = if self.elements[u].degree % 2 == 1 { self.p - 1 } else { 1 };
                let mut sum = self.add(&first, &self.scale(&second, sign));
                sum.degree = out_degree;
                sum
            }
        };
        memo.insert(idx, value.clone());
        Ok(value)
    }

    /// `d` as a derivation of the tensor algebra, then written in the basis.
    pub fn differential_via_tensor(&self, e: &LieElement, d: &LetterDifferential) -> Result<LieElement> {
        d.validate(&self.alphabet)?;
        let p = self.p;
        let degrees = &self.alphabet.degrees;
        let mut out = Tensor::new();
        for (w, c) in self.expand(e) {
            let mut prefix_degree = 0u32;
            for (pos, &a) in w.iter().enumerate() {
                if let Some((b, k)) = d.images[a as usize] {
                    let mut nw = w.clone();
                    nw[pos] = b;
                    let sign = if prefix_degree % 2 == 1 { p - 1 } else { 1 };
                    tensor_add(&mut out, nw, c * k % p * sign, p);
                }
                prefix_degree += degrees[a as usize];
            }
        }
        self.reduce(out, e.degree.saturating_sub(1))
    }

    /// `ad^n(u)(v) = [u, [u, … [u, v]]]`.
    pub fn ad_power(&self, u: &LieElement, n: u64, v: &LieElement) -> Result<LieElement> {
        let mut acc = v.clone();
        for _ in 0..n {
            acc = self.bracket(u, &acc)?;
        }
        Ok(acc)
    }

    fn cmn_prelude(&self, u: &LieElement, k: u32, p: u64, drop: u64) -> Result<u64> {
        if p != self.p {
            return Err(Error::ParameterMismatch(format!("engine works over F_{}, asked for p = {p}", self.p)));
        }
        if !u.degree.is_multiple_of(2) || u.degree == 0 {
            return Err(invalid(format!("u must have positive even degree, got {}", u.degree)));
        }
        if k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        let pk = p.checked_pow(k).ok_or_else(|| invalid("p^k overflows"))?;
        let degree = pk * u.degree as u64 - drop;
        self.check_degree(degree)?;
        Ok(pk)
    }

    /// `τ_k(u) = ad^{p^k − 1}(u)(du)`, of degree `p^k|u| − 1`.
    pub fn tau(&self, u: &LieElement, k: u32, p: u64, d: &LetterDifferential) -> Result<LieElement> {
        let pk = self.cmn_prelude(u, k, p, 1)?;
        let du = self.differential(u, d)?;
        let mut out = self.ad_power(u, pk - 1, &du)?;
        out.degree = (pk * u.degree as u64 - 1) as u32;
        Ok(out)
    }

    /// `σ_k(u) = ½ Σ_{j=1}^{p^k−1} (1/p)C(p^k, j) [ad^{j−1}(u)(du), ad^{p^k−1−j}(u)(du)]`.
    pub fn sigma(&self, u: &LieElement, k: u32, p: u64, d: &LetterDifferential) -> Result<LieElement> {
        let pk = self.cmn_prelude(u, k, p, 2)?;
        let du = self.differential(u, d)?;
        let mut powers = vec![du];
        for _ in 1..pk - 1 {
            let next = self.bracket(u, powers.last().expect("non-empty"))?;
            powers.push(next);
        }
        let degree = (pk * u.degree as u64 - 2) as u32;
        let mut sum = LieElement::zero(degree);
        for j in 1..pk {
            let coef = binom_div_p(p, k, j)? % BigInt::from(p);
            let coef = coef.to_u64().expect("reduced mod p");
            if coef == 0 {
                continue;
            }
            let term = self.bracket(&powers[(j - 1) as usize], &powers[(pk - 1 - j) as usize])?;
            sum = self.add(&sum, &self.scale(&term, coef));
        }
        let mut out = self.scale(&sum, inv_mod(2, p));
        out.degree = degree;
        Ok(out)
    }

    /// Matrix of `d: L_{n+1} → L_n`, columns indexed by `degree_basis(n + 1)`.
    pub fn differential_matrix(&self, n: u32, d: &LetterDifferential) -> Result<FpMatrix> {
        self.check_degree(n as u64 + 1)?;
        let rows = self.degree_basis(n);
        let cols = self.degree_basis(n + 1);
        let row_of: HashMap<usize, usize> = rows.iter().enumerate().map(|(r, &i)| (i, r)).collect();
        let mut m = FpMatrix::zeros(rows.len(), cols.len(), self.p);
        for (c, &j) in cols.iter().enumerate() {
            let img = self.differential(&self.basis_element(j), d)?;
            for (i, v) in img.terms() {
                m.set(row_of[&i], c, v);
            }
        }
        Ok(m)
    }

    pub fn format_element(&self, e: &LieElement) -> String {
        if e.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = e.terms().map(|(i, c)| format!("{c}·{}", self.format_basis(i))).collect();
        parts.join(" + ")
    }

    pub fn format_basis(&self, idx: usize) -> String {
        match self.elements[idx].shape {
            Shape::Letter(a) => self.alphabet.name(a as usize).to_string(),
            Shape::Bracket(u, v) => format!("[{},{}]", self.format_basis(u), self.format_basis(v)),
            Shape::Square(w) => format!("[{0},{0}]", self.format_basis(w)),
        }
    }
}

/// Per-degree basis sizes certified against Babenko's ranks.
pub fn basis(alphabet: &WeightedAlphabet, up_to: u32, p: u64, config: DglConfig) -> Result<FreeLieFp> {
    let engine = FreeLieFp::new(alphabet.clone(), p, up_to, config)?;
    let ranks = babenko_ranks(&alphabet.generator_set(), up_to as u64)?;
    for n in 1..=up_to {
        let found = engine.dim(n);
        if BigInt::from(found) != ranks[n as usize - 1] {
            return Err(Error::DimensionMismatch { degree: n, expected: ranks[n as usize - 1].to_string(), found });
        }
    }
    Ok(engine)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubspaceDims {
    pub degree: u32,
    pub dim: usize,
    pub cycles: usize,
    pub boundaries: usize,
    pub homology: usize,
}

impl fmt::Display for SubspaceDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} dim={} Z={} B={} H={}", self.degree, self.dim, self.cycles, self.boundaries, self.homology)
    }
}

/// Cycles, boundaries and homology of `(L, d)` in degrees `1..=up_to`.
pub fn subspace_dims(
    alphabet: &WeightedAlphabet,
    d: &LetterDifferential,
    p: u64,
    up_to: u32,
    config: DglConfig,
) -> Result<Vec<SubspaceDims>> {
    let engine = basis(alphabet, up_to + 1, p, config)?;
    subspace_dims_with(&engine, d, up_to)
}

pub fn subspace_dims_with(engine: &FreeLieFp, d: &LetterDifferential, up_to: u32) -> Result<Vec<SubspaceDims>> {
    // b[n] = rank(d: L_{n+1} → L_n), b[0] = 0
    let mut b = vec![0usize; up_to as usize + 1];
    for n in 1..=up_to {
        b[n as usize] = engine.differential_matrix(n, d)?.rank();
    }
    Ok((1..=up_to)
        .map(|n| {
            let dim = engine.dim(n);
            let cycles = dim - b[n as usize - 1];
            let boundaries = b[n as usize];
            SubspaceDims { degree: n, dim, cycles, boundaries, homology: cycles - boundaries }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_engine(q: u32, p: u64, up_to: u32) -> FreeLieFp {
        basis(&WeightedAlphabet::acyclic_pair(q).unwrap(), up_to, p, DglConfig { max_degree: 16 }).unwrap()
    }

    #[test]
    fn basis_size_examples() {
        let e = pair_engine(2, 3, 6);
        let sizes: Vec<usize> = (1..=6).map(|n| e.dim(n)).collect();
        assert_eq!(sizes, vec![0, 1, 1, 0, 1, 1]);

        let one = WeightedAlphabet::new(vec![("x".into(), 1)]).unwrap();
        let e = basis(&one, 3, 3, DglConfig::default()).unwrap();
        assert_eq!((1..=3).map(|n| e.dim(n)).collect::<Vec<_>>(), vec![1, 1, 0]);

        let two = WeightedAlphabet::new(vec![("x".into(), 1), ("y".into(), 1)]).unwrap();
        let e = basis(&two, 2, 5, DglConfig::default()).unwrap();
        assert_eq!((1..=2).map(|n| e.dim(n)).collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn degree_cap_is_enforced() {
        let a = WeightedAlphabet::acyclic_pair(2).unwrap();
        let err = FreeLieFp::new(a.clone(), 3, 15, DglConfig::default()).unwrap_err();
        assert!(matches!(err, Error::DegreeLimitExceeded { requested: 15, limit: 14 }));
        let e = FreeLieFp::new(a, 3, 6, DglConfig::default()).unwrap();
        let x = e.letter(0).unwrap();
        let xx = e.bracket(&x, &x).unwrap();
        assert!(matches!(e.bracket(&xx, &x), Err(Error::DegreeLimitExceeded { requested: 9, .. })));
    }

    #[test]
    fn rejects_even_or_composite_modulus() {
        let a = WeightedAlphabet::acyclic_pair(2).unwrap();
        assert!(FreeLieFp::new(a.clone(), 2, 4, DglConfig::default()).is_err());
        assert!(FreeLieFp::new(a, 9, 4, DglConfig::default()).is_err());
    }

    #[test]
    fn bracket_examples() {
        // q = 2: |x| = 3 odd, |y| = 2 even
        let e = pair_engine(2, 3, 8);
        let (x, y) = (e.letter(0).unwrap(), e.letter(1).unwrap());
        assert!(e.bracket(&y, &y).unwrap().is_zero());
        let xy = e.bracket(&x, &y).unwrap();
        assert_eq!(xy.terms().count(), 1);
        let yx = e.bracket(&y, &x).unwrap();
        assert_eq!(e.add(&xy, &yx), LieElement::zero(5), "[x,y] = -[y,x] when |y| is even");
        let xx = e.bracket(&x, &x).unwrap();
        assert_eq!(xx.terms().count(), 1);
        let (idx, c) = xx.terms().next().unwrap();
        assert_eq!(e.elements()[idx].shape, Shape::Square(0));
        assert_eq!(c, 1);
        // [x,[x,x]] = 0 for odd x
        let e9 = pair_engine(2, 3, 9);
        let x9 = e9.letter(0).unwrap();
        let xx9 = e9.bracket(&x9, &x9).unwrap();
        assert!(e9.bracket(&x9, &xx9).unwrap().is_zero());
    }

    #[test]
    fn differential_examples() {
        let e = pair_engine(2, 3, 8);
        let d = LetterDifferential::acyclic_pair();
        let (x, y) = (e.letter(0).unwrap(), e.letter(1).unwrap());
        assert_eq!(e.differential(&x, &d).unwrap(), y);
        assert!(e.differential(&y, &d).unwrap().is_zero());
        let xx = e.bracket(&x, &x).unwrap();
        let dxx = e.differential(&xx, &d).unwrap();
        let yx = e.bracket(&y, &x).unwrap();
        assert_eq!(dxx, e.scale(&yx, 2));
    }

    #[test]
    fn leibniz_and_tensor_differentials_agree() {
        let d = LetterDifferential::acyclic_pair();
        for (q, p) in [(2u32, 3u64), (3, 5), (1, 3)] {
            let e = pair_engine(q, p, 12);
            for idx in 0..e.elements().len() {
                let el = e.basis_element(idx);
                assert_eq!(e.differential(&el, &d).unwrap(), e.differential_via_tensor(&el, &d).unwrap());
            }
        }
    }

    #[test]
    fn boundary_examples_q2_p3() {
        let a = WeightedAlphabet::acyclic_pair(2).unwrap();
        let dims = subspace_dims(&a, &LetterDifferential::acyclic_pair(), 3, 6, DglConfig::default()).unwrap();
        let b = |n: u32| dims[n as usize - 1].boundaries;
        assert_eq!(b(2), 1);
        assert_eq!(b(4), 0);
        assert_eq!(b(5), 1);
        for s in &dims {
            assert_eq!(s.cycles + if s.degree > 1 { dims[s.degree as usize - 2].boundaries } else { 0 }, s.dim);
        }
    }

    #[test]
    fn tau_and_sigma_degrees_and_cycles() {
        let e = pair_engine(3, 3, 12);
        let d = LetterDifferential::acyclic_pair();
        let x = e.letter(0).unwrap();
        let tau = e.tau(&x, 1, 3, &d).unwrap();
        assert_eq!(tau.degree(), 11);
        let y = e.letter(1).unwrap();
        let expect = e.bracket(&x, &e.bracket(&x, &y).unwrap()).unwrap();
        assert_eq!(tau, expect);
        assert!(e.differential(&tau, &d).unwrap().is_zero());
        let sigma = e.sigma(&x, 1, 3, &d).unwrap();
        assert_eq!(sigma.degree(), 10);
        assert!(e.differential(&sigma, &d).unwrap().is_zero());
        // j = 1 and j = 2 terms coincide: σ_1(x) = [y, [x, y]]
        let expect = e.bracket(&y, &e.bracket(&x, &y).unwrap()).unwrap();
        assert_eq!(sigma, expect);
    }

    #[test]
    fn cmn_preconditions() {
        let e = pair_engine(3, 3, 12);
        let d = LetterDifferential::acyclic_pair();
        let y = e.letter(1).unwrap();
        assert!(matches!(e.tau(&y, 1, 3, &d), Err(Error::InvalidArgument(_))));
        let x = e.letter(0).unwrap();
        assert!(matches!(e.tau(&x, 2, 3, &d), Err(Error::DegreeLimitExceeded { requested: 35, .. })));
        assert!(matches!(e.sigma(&x, 1, 5, &d), Err(Error::ParameterMismatch(_))));
    }

    #[test]
    fn letter_differential_validation() {
        let e = pair_engine(2, 3, 4);
        let x = e.letter(0).unwrap();
        let bad = LetterDifferential::new(vec![Some((1, 1)), Some((0, 1))]);
        assert!(e.differential(&x, &bad).is_err());
        let short = LetterDifferential::new(vec![None]);
        assert!(e.differential(&x, &short).is_err());
    }
}
