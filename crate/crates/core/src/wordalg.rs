//! Compositions, words over `{e0, e+, e-}`, the shuffle product, the `tau`
//! involution, and the series/integral conversions `p` and `q`.
//!
//! Everything here is exact: coefficients are arbitrary-precision rationals
//! and all values are immutable once built.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Letter of the three-letter alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    E0,
    EPlus,
    EMinus,
}

impl Letter {
    /// Sign carried by the letter: 0 for `e0`, otherwise +-1.
    pub fn sign(self) -> i8 {
        match self {
            Letter::E0 => 0,
            Letter::EPlus => 1,
            Letter::EMinus => -1,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Letter::E0 => "0",
            Letter::EPlus => "+",
            Letter::EMinus => "-",
        })
    }
}

/// A word over `{e0, e+, e-}`, stored as a compact letter sequence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn empty() -> Self {
        Word::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Weight of the word, i.e. its length.
    pub fn weight(&self) -> usize {
        self.letters.len()
    }

    /// Depth: number of signed (non-`e0`) letters.
    pub fn depth(&self) -> usize {
        self.letters.iter().filter(|l| **l != Letter::E0).count()
    }

    /// Evaluable words must not end with `e0`.
    pub fn is_admissible(&self) -> bool {
        self.letters.last().map_or(true, |l| *l != Letter::E0)
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// The four families of finite sums handled by the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// Finite (alternating) Euler sums.
    Es,
    /// Finite multiple T-values (sign-free).
    T,
    /// Finite multiple S-values (sign-free).
    S,
    /// Finite alternating multiple T-values.
    At,
}

impl Family {
    pub fn prefix(self) -> &'static str {
        match self {
            Family::Es => "ES",
            Family::T => "T",
            Family::S => "S",
            Family::At => "AT",
        }
    }

    /// Whether compositions of this family may carry negative signs.
    pub fn signed(self) -> bool {
        matches!(self, Family::Es | Family::At)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.prefix())
    }
}

/// An index `(s_1, ..., s_d)` with signs `(sigma_1, ..., sigma_d)` and the
/// family it indexes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition {
    family: Family,
    parts: Vec<u32>,
    signs: Vec<i8>,
}

impl Composition {
    pub fn new(family: Family, parts: Vec<u32>, signs: Vec<i8>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Invalid("composition must be nonempty".into()));
        }
        if parts.iter().any(|&s| s == 0) {
            return Err(Error::Invalid("composition parts must be >= 1".into()));
        }
        if signs.len() != parts.len() {
            return Err(Error::Invalid(format!(
                "{} signs for {} parts",
                signs.len(),
                parts.len()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Invalid("signs must be +-1".into()));
        }
        if !family.signed() && signs.iter().any(|&s| s == -1) {
            return Err(Error::FamilyMismatch(format!(
                "family {family} is sign-free"
            )));
        }
        Ok(Composition {
            family,
            parts,
            signs,
        })
    }

    /// All-plus composition.
    pub fn unsigned(family: Family, parts: Vec<u32>) -> Result<Self> {
        let signs = vec![1; parts.len()];
        Composition::new(family, parts, signs)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn depth(&self) -> usize {
        self.parts.len()
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Same parts and signs under another family.
    pub fn with_family(&self, family: Family) -> Result<Self> {
        Composition::new(family, self.parts.clone(), self.signs.clone())
    }

    /// Canonical text encoding, e.g. `T:2,1` or `AT:2,-1`.
    pub fn symbol(&self) -> String {
        let body: Vec<String> = self
            .parts
            .iter()
            .zip(&self.signs)
            .map(|(&s, &sg)| (i64::from(s) * i64::from(sg)).to_string())
            .collect();
        format!("{}:{}", self.family.prefix(), body.join(","))
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol())
    }
}

impl FromStr for Composition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_symbol(s)
    }
}

/// Parse the canonical symbol encoding (`T:2,1`, `AT:2,-1`, `ES:-1,2,2`).
pub fn parse_symbol(s: &str) -> Result<Composition> {
    let colon = s.find(':').ok_or(Error::SymbolParse {
        position: s.len(),
        message: "missing `:` separator".into(),
    })?;
    let family = match &s[..colon] {
        "ES" => Family::Es,
        "T" => Family::T,
        "S" => Family::S,
        "AT" => Family::At,
        other => {
            return Err(Error::SymbolParse {
                position: 0,
                message: format!("unknown family `{other}`"),
            })
        }
    };
    let mut parts = Vec::new();
    let mut signs = Vec::new();
    let mut pos = colon + 1;
    for tok in s[colon + 1..].split(',') {
        let n: i64 = tok.parse().map_err(|_| Error::SymbolParse {
            position: pos,
            message: format!("bad part `{tok}`"),
        })?;
        if n == 0 {
            return Err(Error::SymbolParse {
                position: pos,
                message: "part must be nonzero".into(),
            });
        }
        parts.push(n.unsigned_abs() as u32);
        signs.push(if n < 0 { -1 } else { 1 });
        pos += tok.len() + 1;
    }
    Composition::new(family, parts, signs).map_err(|e| Error::SymbolParse {
        position: colon + 1,
        message: e.to_string(),
    })
}

/// An exact rational linear combination keyed by words, compositions, or any
/// other ordered symbol type. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinComb<K: Ord> {
    terms: BTreeMap<K, BigRational>,
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn new() -> Self {
        LinComb {
            terms: BTreeMap::new(),
        }
    }

    pub fn term(key: K, coeff: BigRational) -> Self {
        let mut lc = LinComb::new();
        lc.add_term(key, coeff);
        lc
    }

    pub fn unit(key: K) -> Self {
        LinComb::term(key, BigRational::one())
    }

    pub fn add_term(&mut self, key: K, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, other: &Self, scale: &BigRational) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c * scale);
        }
    }

    pub fn add(&mut self, other: &Self) {
        self.add_scaled(other, &BigRational::one());
    }

    pub fn scale(&mut self, by: &BigRational) {
        if by.is_zero() {
            self.terms.clear();
            return;
        }
        for c in self.terms.values_mut() {
            *c *= by;
        }
    }

    pub fn coeff(&self, key: &K) -> BigRational {
        self.terms.get(key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Push the combination through a key map, merging collisions.
    pub fn map_keys<L: Ord + Clone>(&self, f: impl Fn(&K) -> L) -> LinComb<L> {
        let mut out = LinComb::new();
        for (k, c) in &self.terms {
            out.add_term(f(k), c.clone());
        }
        out
    }

    /// Like [`map_keys`](Self::map_keys) but the map may fail.
    pub fn try_map_keys<L: Ord + Clone>(
        &self,
        f: impl Fn(&K) -> Result<L>,
    ) -> Result<LinComb<L>> {
        let mut out = LinComb::new();
        for (k, c) in &self.terms {
            out.add_term(f(k)?, c.clone());
        }
        Ok(out)
    }
}

impl<K: Ord + Clone> FromIterator<(K, BigRational)> for LinComb<K> {
    fn from_iter<I: IntoIterator<Item = (K, BigRational)>>(iter: I) -> Self {
        let mut lc = LinComb::new();
        for (k, c) in iter {
            lc.add_term(k, c);
        }
        lc
    }
}

/// The map `p`: series composition to integral word
/// `e0^{s_1-1} e_{eta_1} ... e0^{s_d-1} e_{eta_d}` with `eta_j = sigma_1...sigma_j`.
pub fn comp_to_word(c: &Composition) -> Word {
    let mut letters = Vec::with_capacity(c.weight() as usize);
    let mut eta: i8 = 1;
    for (&s, &sg) in c.parts().iter().zip(c.signs()) {
        eta *= sg;
        for _ in 1..s {
            letters.push(Letter::E0);
        }
        letters.push(if eta == 1 { Letter::EPlus } else { Letter::EMinus });
    }
    Word::new(letters)
}

/// The map `q`, inverse to [`comp_to_word`]: reads `(s_j, gamma_j)` off the
/// word and returns signs `sigma_1 = gamma_1`, `sigma_j = gamma_j gamma_{j-1}`.
/// The output carries the `AT` family (the signed series side).
pub fn word_to_comp(w: &Word) -> Result<Composition> {
    if !w.is_admissible() || w.is_empty() {
        return Err(Error::InadmissibleWord);
    }
    let mut parts = Vec::new();
    let mut signs = Vec::new();
    let mut run: u32 = 1;
    let mut prev_gamma: i8 = 1;
    for &l in w.letters() {
        match l.sign() {
            0 => run += 1,
            gamma => {
                parts.push(run);
                signs.push(gamma * prev_gamma);
                prev_gamma = gamma;
                run = 1;
            }
        }
    }
    Composition::new(Family::At, parts, signs)
}

/// Shuffle product of two words: the sum over all interleavings preserving
/// internal orders, with multiplicity. Computed by prefix dynamic programming
/// so identical interleavings collapse immediately.
pub fn shuffle(u: &Word, v: &Word) -> LinComb<Word> {
    let (a, b) = (u.letters(), v.letters());
    let mut row: Vec<BTreeMap<Vec<Letter>, BigInt>> = Vec::with_capacity(b.len() + 1);
    let mut base = BTreeMap::new();
    base.insert(Vec::new(), BigInt::one());
    row.push(base);
    for j in 1..=b.len() {
        let mut cell = BTreeMap::new();
        for (w, c) in &row[j - 1] {
            let mut w2 = w.clone();
            w2.push(b[j - 1]);
            cell.insert(w2, c.clone());
        }
        row.push(cell);
    }
    for i in 1..=a.len() {
        for j in 0..=b.len() {
            let mut cell: BTreeMap<Vec<Letter>, BigInt> = BTreeMap::new();
            for (w, c) in &row[j] {
                let mut w2 = w.clone();
                w2.push(a[i - 1]);
                *cell.entry(w2).or_insert_with(BigInt::zero) += c;
            }
            if j > 0 {
                // row[j - 1] already holds the (i, j-1) table at this point
                for (w, c) in &row[j - 1] {
                    let mut w2 = w.clone();
                    w2.push(b[j - 1]);
                    *cell.entry(w2).or_insert_with(BigInt::zero) += c;
                }
            }
            row[j] = cell;
        }
    }
    row.pop()
        .unwrap()
        .into_iter()
        .map(|(w, c)| (Word::new(w), BigRational::from_integer(c)))
        .collect()
}

/// The involution `tau` on the 2-letter sub-algebra: block-wise reversal with
/// sign `(-1)^{weight}`. Only defined for admissible words over `{e0, e+}`.
pub fn tau(w: &Word) -> Result<(i8, Word)> {
    if w.letters().iter().any(|&l| l == Letter::EMinus) {
        return Err(Error::TauOnSignedWord);
    }
    if w.is_empty() {
        return Ok((1, Word::empty()));
    }
    if !w.is_admissible() {
        return Err(Error::InadmissibleWord);
    }
    let mut blocks: Vec<u32> = Vec::new();
    let mut run: u32 = 1;
    for &l in w.letters() {
        if l == Letter::E0 {
            run += 1;
        } else {
            blocks.push(run);
            run = 1;
        }
    }
    let mut letters = Vec::with_capacity(w.weight());
    for &s in blocks.iter().rev() {
        for _ in 1..s {
            letters.push(Letter::E0);
        }
        letters.push(Letter::EPlus);
    }
    let sign = if w.weight() % 2 == 0 { 1 } else { -1 };
    Ok((sign, Word::new(letters)))
}

/// Sign relating the alternating-T convention used here to the prior one:
/// the product of `sigma_j` over indices `j` with `d - j = 0, 1 (mod 4)`.
pub fn convention_sign(c: &Composition) -> i8 {
    let d = c.depth();
    let mut sign: i8 = 1;
    for (j, &sg) in c.signs().iter().enumerate() {
        let r = (d - (j + 1)) % 4;
        if r == 0 || r == 1 {
            sign *= sg;
        }
    }
    sign
}

/// All compositions of `weight` for the given family, in the global symbol
/// order used everywhere downstream: depth ascending, parts in descending
/// lexicographic order within a depth, and (for signed families) sign masks
/// flipping `sigma_1` first.
pub fn enumerate_compositions(weight: u32, family: Family, alternating: bool) -> Vec<Composition> {
    assert!(weight >= 1, "weight must be >= 1");
    let signed = family == Family::At || (family == Family::Es && alternating);
    let mut out = Vec::new();
    for depth in 1..=weight as usize {
        let mut parts = Vec::with_capacity(depth);
        push_compositions(weight, depth, &mut parts, &mut |parts| {
            if signed {
                for mask in 0u32..(1 << depth) {
                    let signs: Vec<i8> = (0..depth)
                        .map(|j| if mask >> j & 1 == 1 { -1 } else { 1 })
                        .collect();
                    out.push(Composition::new(family, parts.to_vec(), signs).unwrap());
                }
            } else {
                out.push(Composition::unsigned(family, parts.to_vec()).unwrap());
            }
        });
    }
    out
}

fn push_compositions(rest: u32, slots: usize, parts: &mut Vec<u32>, emit: &mut impl FnMut(&[u32])) {
    if slots == 1 {
        parts.push(rest);
        emit(parts);
        parts.pop();
        return;
    }
    // largest first part first => descending lexicographic order
    for first in (1..=rest - slots as u32 + 1).rev() {
        parts.push(first);
        push_compositions(rest - first, slots - 1, parts, emit);
        parts.pop();
    }
}

/// `a` as an exact rational, convenience for relation builders.
pub fn rat(a: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(a))
}

/// `a/b` as an exact rational.
pub fn ratio(a: i64, b: i64) -> BigRational {
    assert!(b != 0);
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Signed integer representation of a rational known to be integral.
pub fn rational_is_negative(r: &BigRational) -> bool {
    r.is_negative()
}
