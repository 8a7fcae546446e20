//! Relation generators: reversal, linear shuffle, sum formula, homogeneous
//! and low-depth closed forms, plus the definitional parity expansion of
//! T/S-sums into signed Euler sums.
//!
//! A [`Relation`] asserts that its terms sum to zero in A. Coefficients are
//! exact rationals, optionally twisted by `t(p) = (-1)^{(p-1)/2}`; constants
//! (Fermat quotients, divided Bernoulli numbers, the finite Catalan
//! constant) appear as [`Monomial`] nodes so relations stay symbolic until
//! a prime is chosen.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::evaluator::{eval_comp_ctx, rational_mod};
use crate::modint::{add_mod, mul_mod, PrimeContext};
use crate::wordalg::{
    comp_to_word, rat, shuffle, tau, word_to_comp, Composition, Family, Letter, LinComb, Word,
};
use crate::{Error, Result};

/// Product of special constants: `q2^a * prod beta_w^{e_w} * G^g`, optionally
/// times the quadratic twist `t`. Weight bookkeeping: q2 -> 1, beta_w -> w,
/// G -> 2, t -> 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub q2: u32,
    /// (odd weight, power), sorted, no zero powers.
    pub betas: Vec<(u32, u32)>,
    pub g: u32,
    pub twist: bool,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn q2_pow(e: u32) -> Self {
        Monomial {
            q2: e,
            ..Default::default()
        }
    }

    pub fn beta(w: u32) -> Self {
        Monomial {
            betas: vec![(w, 1)],
            ..Default::default()
        }
    }

    pub fn catalan() -> Self {
        Monomial {
            g: 1,
            ..Default::default()
        }
    }

    pub fn twisted(mut self) -> Self {
        self.twist = !self.twist;
        self
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut betas: BTreeMap<u32, u32> = self.betas.iter().copied().collect();
        for &(w, e) in &other.betas {
            *betas.entry(w).or_insert(0) += e;
        }
        Monomial {
            q2: self.q2 + other.q2,
            betas: betas.into_iter().collect(),
            g: self.g + other.g,
            twist: self.twist ^ other.twist,
        }
    }

    pub fn weight(&self) -> u32 {
        self.q2 + self.betas.iter().map(|&(w, e)| w * e).sum::<u32>() + 2 * self.g
    }

    pub fn eval(&self, ctx: &PrimeContext) -> Result<u64> {
        let p = ctx.prime();
        let mut v = crate::modint::pow_mod(ctx.fermat_quotient().value, u64::from(self.q2), p);
        for &(w, e) in &self.betas {
            let b = ctx.beta(u64::from(w))?.value;
            v = mul_mod(v, crate::modint::pow_mod(b, u64::from(e), p), p);
        }
        if self.g > 0 {
            let g = ctx.finite_catalan()?.value;
            v = mul_mod(v, crate::modint::pow_mod(g, u64::from(self.g), p), p);
        }
        if self.twist {
            v = mul_mod(v, ctx.twist(), p);
        }
        Ok(v)
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        let pow = |name: &str, e: u32| {
            if e == 1 {
                name.to_string()
            } else {
                format!("{name}^{e}")
            }
        };
        if self.q2 > 0 {
            parts.push(pow("q2", self.q2));
        }
        for &(w, e) in &self.betas {
            parts.push(pow(&format!("b{w}"), e));
        }
        if self.g > 0 {
            parts.push(pow("G", self.g));
        }
        if self.twist {
            parts.push("t".to_string());
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Group-ring coefficient `a + b*t` with `t(p) = (-1)^{(p-1)/2}`, `t^2 = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TwistedCoeff {
    pub a: BigRational,
    pub b: BigRational,
}

impl TwistedCoeff {
    pub fn rational(a: BigRational) -> Self {
        TwistedCoeff {
            a,
            b: BigRational::zero(),
        }
    }

    pub fn twisted(b: BigRational) -> Self {
        TwistedCoeff {
            a: BigRational::zero(),
            b,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add_assign(&mut self, other: &TwistedCoeff) {
        self.a += &other.a;
        self.b += &other.b;
    }

    /// Specialize at the context's prime.
    pub fn eval(&self, ctx: &PrimeContext) -> Result<u64> {
        let p = ctx.prime();
        let a = rational_mod(&self.a, ctx)?;
        let b = rational_mod(&self.b, ctx)?;
        Ok(add_mod(a, mul_mod(b, ctx.twist(), p), p))
    }

    /// Specialization with `t` fixed symbolically to +-1 (class split).
    pub fn specialize(&self, t: i8) -> BigRational {
        if t >= 0 {
            &self.a + &self.b
        } else {
            &self.a - &self.b
        }
    }

    pub fn render(&self) -> String {
        let frac = |r: &BigRational| format!("{}/{}", r.numer(), r.denom());
        if self.b.is_zero() {
            frac(&self.a)
        } else {
            format!("{}+{}*t", frac(&self.a), frac(&self.b))
        }
    }
}

/// A node of a relation: either a family symbol or a constant monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Sym(Composition),
    Mono(Monomial),
}

impl Node {
    pub fn weight(&self) -> u32 {
        match self {
            Node::Sym(c) => c.weight(),
            Node::Mono(m) => m.weight(),
        }
    }

    pub fn render(&self) -> String {
        match self {
            Node::Sym(c) => c.symbol(),
            Node::Mono(m) => m.render(),
        }
    }
}

/// Parse a node back from its `render` form: either a family symbol
/// (`T:1,2`, `ES:-1,1`) or a constant monomial (`q2^3*b3*t`, `G`, `1`).
pub fn parse_node(s: &str) -> Result<Node> {
    if let Ok(c) = crate::wordalg::parse_symbol(s) {
        return Ok(Node::Sym(c));
    }
    if s == "1" {
        return Ok(Node::Mono(Monomial::one()));
    }
    let bad = |message: &str| Error::SymbolParse {
        position: 0,
        message: message.to_string(),
    };
    let mut m = Monomial::one();
    for part in s.split('*') {
        let (name, exp) = match part.split_once('^') {
            Some((n, e)) => (
                n,
                e.parse::<u32>()
                    .map_err(|_| bad(&format!("bad exponent in `{part}`")))?,
            ),
            None => (part, 1),
        };
        let piece = match name {
            "q2" => Monomial::q2_pow(exp),
            "G" => Monomial {
                g: exp,
                ..Monomial::one()
            },
            "t" if exp == 1 => Monomial::one().twisted(),
            _ => match name.strip_prefix('b').and_then(|w| w.parse::<u32>().ok()) {
                Some(w) if w >= 3 && w % 2 == 1 => Monomial {
                    betas: vec![(w, exp)],
                    ..Monomial::one()
                },
                _ => return Err(bad(&format!("unknown monomial factor `{name}`"))),
            },
        };
        m = m.mul(&piece);
    }
    Ok(Node::Mono(m))
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Where a relation came from, with its defining parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Reversal(Composition),
    AltReversal(Composition),
    LinShuffleEs { s: u32, u: Word, v: Word },
    LinShuffleT { s: u32, u: Word, v: Word },
    /// Thm-(i)-type tau shuffle, kept for consistency checks.
    TauShuffleEs { u: Word, v: Word },
    TauShuffleT { u: Word, v: Word },
    SumFormula(Composition),
    Homogeneous { s: u32, d: u32 },
    Depth1(Composition),
    Depth2(Composition),
    /// Definitional parity expansion of a T/S symbol into signed Euler sums.
    Expansion(Composition),
    /// Hand-entered identity under audit, labelled by its display id.
    Audit(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Reversal(c) => write!(f, "reversal({c})"),
            Provenance::AltReversal(c) => write!(f, "alt-reversal({c})"),
            Provenance::LinShuffleEs { s, u, v } => write!(f, "lin-shuffle-es(s={s};u={u};v={v})"),
            Provenance::LinShuffleT { s, u, v } => write!(f, "lin-shuffle-t(s={s};u={u};v={v})"),
            Provenance::TauShuffleEs { u, v } => write!(f, "tau-shuffle-es(u={u};v={v})"),
            Provenance::TauShuffleT { u, v } => write!(f, "tau-shuffle-t(u={u};v={v})"),
            Provenance::SumFormula(c) => write!(f, "sum-formula({c})"),
            Provenance::Homogeneous { s, d } => write!(f, "homogeneous(s={s},d={d})"),
            Provenance::Depth1(c) => write!(f, "depth1({c})"),
            Provenance::Depth2(c) => write!(f, "depth2({c})"),
            Provenance::Expansion(c) => write!(f, "expansion({c})"),
            Provenance::Audit(id) => write!(f, "audit({id})"),
        }
    }
}

/// An exact linear relation: the terms sum to zero in A.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub provenance: Provenance,
    pub terms: BTreeMap<Node, TwistedCoeff>,
}

impl Relation {
    pub fn new(provenance: Provenance) -> Self {
        Relation {
            provenance,
            terms: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, node: Node, coeff: TwistedCoeff) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(node).or_default();
        slot.add_assign(&coeff);
        let dead: Vec<Node> = self
            .terms
            .iter()
            .filter(|(_, c)| c.is_zero())
            .map(|(n, _)| n.clone())
            .collect();
        for n in dead {
            self.terms.remove(&n);
        }
    }

    pub fn add_sym(&mut self, c: Composition, coeff: BigRational) {
        self.add(Node::Sym(c), TwistedCoeff::rational(coeff));
    }

    pub fn add_mono(&mut self, m: Monomial, coeff: BigRational) {
        self.add(Node::Mono(m), TwistedCoeff::rational(coeff));
    }

    pub fn is_trivial(&self) -> bool {
        self.terms.is_empty()
    }

    /// Max node weight; the relation is checked at primes `p > weight + 2`.
    pub fn weight(&self) -> u32 {
        self.terms.keys().map(Node::weight).max().unwrap_or(0)
    }

    pub fn uses_twist(&self) -> bool {
        self.terms.values().any(|c| !c.b.is_zero())
            || self.terms.keys().any(|n| matches!(n, Node::Mono(m) if m.twist))
    }

    /// Evaluate the relation at a prime; a valid relation yields 0.
    pub fn eval_at(&self, ctx: &PrimeContext) -> Result<u64> {
        let p = ctx.prime();
        let mut acc = 0u64;
        for (node, coeff) in &self.terms {
            let value = match node {
                Node::Sym(c) => eval_comp_ctx(ctx, c).value,
                Node::Mono(m) => m.eval(ctx)?,
            };
            acc = add_mod(acc, mul_mod(coeff.eval(ctx)?, value, p), p);
        }
        Ok(acc)
    }

    /// Export line: `provenance<TAB>term;term;...`.
    pub fn export_line(&self) -> String {
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|(n, c)| format!("{}*{}", c.render(), n.render()))
            .collect();
        format!("{}\t{}", self.provenance, terms.join(";"))
    }

    fn canonical_terms(&self) -> String {
        self.terms
            .iter()
            .map(|(n, c)| format!("{}*{}", c.render(), n.render()))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// A batch of relations sharing a symbol universe.
#[derive(Clone, Debug, Default)]
pub struct RelationSystem {
    pub relations: Vec<Relation>,
}

impl RelationSystem {
    pub fn new(relations: Vec<Relation>) -> Self {
        RelationSystem { relations }
    }

    /// All nodes referenced by any relation, in canonical order.
    pub fn nodes(&self) -> Vec<Node> {
        let mut set = BTreeSet::new();
        for r in &self.relations {
            set.extend(r.terms.keys().cloned());
        }
        set.into_iter().collect()
    }

    pub fn push(&mut self, r: Relation) {
        if !r.is_trivial() {
            self.relations.push(r);
        }
    }

    /// Drop duplicates (by canonical term encoding) and trivial relations.
    pub fn dedup(&mut self) {
        let mut seen = BTreeSet::new();
        self.relations
            .retain(|r| !r.is_trivial() && seen.insert(r.canonical_terms()));
    }

    pub fn export(&self) -> String {
        let mut out = String::new();
        for r in &self.relations {
            out.push_str(&r.export_line());
            out.push('\n');
        }
        out
    }
}

/// All-plus alternating symbols are the plain T symbols; keep one name.
pub fn normalize_comp(c: &Composition) -> Composition {
    if c.family() == Family::At && c.signs().iter().all(|&s| s == 1) {
        c.with_family(Family::T).unwrap()
    } else {
        c.clone()
    }
}

fn word_comp(w: &Word, es: bool) -> Result<Composition> {
    let c = word_to_comp(w)?;
    if es {
        c.with_family(Family::Es)
    } else {
        Ok(normalize_comp(&c))
    }
}

fn add_word_terms(
    rel: &mut Relation,
    lc: &LinComb<Word>,
    scale: &BigRational,
    es: bool,
) -> Result<()> {
    for (w, coeff) in lc.iter() {
        rel.add_sym(word_comp(w, es)?, coeff * scale);
    }
    Ok(())
}

/// Reversal relations for sign-free T/S symbols: even depth stays in the
/// family, odd depth crosses to the mirror family, both with sign
/// `(-1)^{|s|}`.
pub fn gen_reversal(c: &Composition) -> Result<Relation> {
    if !matches!(c.family(), Family::T | Family::S) {
        return Err(Error::FamilyMismatch(format!(
            "reversal wants a sign-free T/S symbol, got {c}"
        )));
    }
    let rev: Vec<u32> = c.parts().iter().rev().copied().collect();
    let mirror = if c.depth() % 2 == 0 {
        c.family()
    } else if c.family() == Family::T {
        Family::S
    } else {
        Family::T
    };
    let sign = if c.weight() % 2 == 0 { 1 } else { -1 };
    let mut rel = Relation::new(Provenance::Reversal(c.clone()));
    rel.add_sym(Composition::unsigned(c.family(), rev)?, rat(1));
    rel.add_sym(c.with_family(mirror)?, rat(-sign));
    Ok(rel)
}

/// Euler-sum reversal: `zeta(rev s; rev sigma) = (-1)^{|s|} (prod sigma_j)
/// zeta(s; sigma)`, any depth.
pub fn gen_reversal_es(c: &Composition) -> Result<Relation> {
    if c.family() != Family::Es {
        return Err(Error::FamilyMismatch(format!(
            "es-reversal wants an ES symbol, got {c}"
        )));
    }
    let rev_parts: Vec<u32> = c.parts().iter().rev().copied().collect();
    let rev_signs: Vec<i8> = c.signs().iter().rev().copied().collect();
    let mut sign: i64 = if c.weight() % 2 == 0 { 1 } else { -1 };
    for &s in c.signs() {
        sign *= i64::from(s);
    }
    let mut rel = Relation::new(Provenance::Reversal(c.clone()));
    rel.add_sym(Composition::new(Family::Es, rev_parts, rev_signs)?, rat(1));
    rel.add_sym(c.clone(), rat(-sign));
    Ok(rel)
}

/// Alternating reversal for even depth: `T(rev s, rev sigma) =
/// (prod sigma)^{(p-1-d)/2} (-1)^{|s|} T(s, sigma)`; for `prod sigma = -1`
/// the coefficient is the pure twist `t * (-1)^{d/2}`.
pub fn gen_alt_reversal(c: &Composition) -> Result<Relation> {
    if c.family() != Family::At {
        return Err(Error::FamilyMismatch(format!(
            "alt-reversal wants an AT symbol, got {c}"
        )));
    }
    let d = c.depth();
    if d % 2 != 0 {
        return Err(Error::DepthParity(format!(
            "alt-reversal needs even depth, got {d}"
        )));
    }
    let rev_parts: Vec<u32> = c.parts().iter().rev().copied().collect();
    let rev_signs: Vec<i8> = c.signs().iter().rev().copied().collect();
    let prod: i64 = c.signs().iter().map(|&s| i64::from(s)).product();
    let weight_sign: i64 = if c.weight() % 2 == 0 { 1 } else { -1 };
    let coeff = if prod == 1 {
        TwistedCoeff::rational(rat(-weight_sign))
    } else {
        // (-1)^{(p-1-d)/2} = t * (-1)^{d/2}
        let half_d_sign: i64 = if (d / 2) % 2 == 0 { 1 } else { -1 };
        TwistedCoeff::twisted(rat(-weight_sign * half_d_sign))
    };
    let mut rel = Relation::new(Provenance::AltReversal(c.clone()));
    rel.add(
        Node::Sym(normalize_comp(&Composition::new(
            Family::At,
            rev_parts,
            rev_signs,
        )?)),
        TwistedCoeff::rational(rat(1)),
    );
    rel.add(Node::Sym(normalize_comp(c)), coeff);
    Ok(rel)
}

fn check_two_letter(u: &Word) -> Result<()> {
    if u.letters().contains(&Letter::EMinus) {
        return Err(Error::Invalid("u must be sign-free".into()));
    }
    Ok(())
}

fn prefix_word(s: u32, tail: &Word) -> Word {
    let mut letters = Vec::with_capacity(s as usize + tail.weight());
    for _ in 1..s {
        letters.push(Letter::E0);
    }
    letters.push(Letter::EPlus);
    letters.extend_from_slice(tail.letters());
    Word::new(letters)
}

fn lin_shuffle_terms(s: u32, u: &Word, v: &Word, es: bool, prov: Provenance) -> Result<Relation> {
    let lhs_word = prefix_word(s, u);
    let rhs_word = prefix_word(s, v);
    let lhs = shuffle(&lhs_word, v);
    let rhs = shuffle(u, &rhs_word);
    let sign = if s % 2 == 0 { 1 } else { -1 };
    let mut rel = Relation::new(prov);
    add_word_terms(&mut rel, &lhs, &rat(1), es)?;
    add_word_terms(&mut rel, &rhs, &rat(-sign), es)?;
    Ok(rel)
}

/// Thm-(iii) linear shuffle for T-sums:
/// `T((y0^{s-1} y1 u) sh v) = (-1)^s T(u sh (y0^{s-1} y1 v))`,
/// requiring `dep(u) + dep(v)` odd and `u` sign-free.
pub fn gen_linear_shuffle_t(s: u32, u: &Word, v: &Word) -> Result<Relation> {
    check_two_letter(u)?;
    if (u.depth() + v.depth()) % 2 != 1 {
        return Err(Error::DepthParity(format!(
            "dep(u)+dep(v) must be odd, got {}+{}",
            u.depth(),
            v.depth()
        )));
    }
    if !u.is_admissible() || !v.is_admissible() {
        return Err(Error::InadmissibleWord);
    }
    lin_shuffle_terms(
        s,
        u,
        v,
        false,
        Provenance::LinShuffleT {
            s,
            u: u.clone(),
            v: v.clone(),
        },
    )
}

/// Thm-(iii) linear shuffle for Euler sums, no depth-parity condition.
pub fn gen_linear_shuffle_es(s: u32, u: &Word, v: &Word) -> Result<Relation> {
    check_two_letter(u)?;
    if !u.is_admissible() || !v.is_admissible() {
        return Err(Error::InadmissibleWord);
    }
    lin_shuffle_terms(
        s,
        u,
        v,
        true,
        Provenance::LinShuffleEs {
            s,
            u: u.clone(),
            v: v.clone(),
        },
    )
}

fn tau_shuffle(u: &Word, v: &Word, es: bool, prov: Provenance) -> Result<Relation> {
    let (sign, tu) = tau(u)?;
    let mut tuv = tu.letters().to_vec();
    tuv.extend_from_slice(v.letters());
    let tuv = Word::new(tuv);
    let mut rel = Relation::new(prov);
    add_word_terms(&mut rel, &shuffle(u, v), &rat(1), es)?;
    rel.add_sym(word_comp(&tuv, es)?, rat(-i64::from(sign)));
    Ok(rel)
}

/// Thm-(i) tau shuffle for T-sums (`dep(u) + dep(v)` even); kept to check
/// that these are consequences of the (iii)-system.
pub fn gen_tau_shuffle_t(u: &Word, v: &Word) -> Result<Relation> {
    if (u.depth() + v.depth()) % 2 != 0 {
        return Err(Error::DepthParity("dep(u)+dep(v) must be even".into()));
    }
    if !v.is_admissible() || v.is_empty() || u.is_empty() {
        return Err(Error::InadmissibleWord);
    }
    tau_shuffle(
        u,
        v,
        false,
        Provenance::TauShuffleT {
            u: u.clone(),
            v: v.clone(),
        },
    )
}

/// Thm-(i) tau shuffle for Euler sums, no parity condition.
pub fn gen_tau_shuffle_es(u: &Word, v: &Word) -> Result<Relation> {
    if !v.is_admissible() || v.is_empty() || u.is_empty() {
        return Err(Error::InadmissibleWord);
    }
    tau_shuffle(
        u,
        v,
        true,
        Provenance::TauShuffleEs {
            u: u.clone(),
            v: v.clone(),
        },
    )
}

/// Sum formula for odd depth, generated as its proof's shuffle instance
/// (`s = 1`, `u` empty, `v = p(s)`).
pub fn gen_sum_formula(c: &Composition) -> Result<Relation> {
    if c.family() != Family::T || c.signs().iter().any(|&s| s != 1) {
        return Err(Error::FamilyMismatch(format!(
            "sum formula wants a sign-free T symbol, got {c}"
        )));
    }
    if c.depth() % 2 != 1 {
        return Err(Error::DepthParity(format!(
            "sum formula needs odd depth, got {}",
            c.depth()
        )));
    }
    let v = comp_to_word(c);
    let mut rel = gen_linear_shuffle_t(1, &Word::empty(), &v)?;
    rel.provenance = Provenance::SumFormula(c.clone());
    Ok(rel)
}

/// `(1/2) zeta_A(bar m)` as a monomial with its rational coefficient:
/// `-q2` for m = 1, `(2^{1-m}-1) beta_m` for m >= 2 (beta of even weight
/// vanishes, so even m yields None).
fn half_zeta_bar(m: u32) -> Option<(BigRational, Monomial)> {
    if m == 1 {
        Some((rat(-1), Monomial::q2_pow(1)))
    } else if m % 2 == 1 {
        let two_pow = BigInt::from(2).pow(m - 1);
        let coeff = BigRational::new(BigInt::one() - &two_pow, two_pow);
        Some((coeff, Monomial::beta(m)))
    } else {
        None
    }
}

fn partitions_into_odd(d: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        let mut part = max.min(rest);
        if part % 2 == 0 {
            part -= 1;
        }
        while part >= 1 {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
            part = if part >= 2 { part - 2 } else { 0 };
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

/// Homogeneous evaluation `zeta_A({bar s}^d)` via Newton's identity over
/// odd-part partitions: `sum_lambda (-1)^{d-l} (prod_i zeta_A(bar{s l_i}))
/// / z_lambda`, substituting the depth-1 closed forms.
pub fn gen_homogeneous(s: u32, d: u32) -> Relation {
    assert!(s >= 1 && d >= 1);
    let mut rel = Relation::new(Provenance::Homogeneous { s, d });
    rel.add_sym(
        Composition::new(Family::Es, vec![s; d as usize], vec![-1; d as usize]).unwrap(),
        rat(-1),
    );
    for lambda in partitions_into_odd(d) {
        let ell = lambda.len() as u32;
        // z_lambda = prod over distinct parts m^mult * mult!
        let mut mults: BTreeMap<u32, u64> = BTreeMap::new();
        for &m in &lambda {
            *mults.entry(m).or_insert(0) += 1;
        }
        let mut z = BigInt::one();
        for (&m, &e) in &mults {
            z *= BigInt::from(m).pow(e as u32);
            for i in 1..=e {
                z *= BigInt::from(i);
            }
        }
        let mut coeff = BigRational::new(BigInt::one(), z);
        if (d - ell) % 2 == 1 {
            coeff = -coeff;
        }
        let mut mono = Monomial::one();
        let mut dead = false;
        for &m in &lambda {
            match half_zeta_bar(s * m) {
                Some((c, part)) => {
                    coeff *= c * rat(2);
                    mono = mono.mul(&part);
                }
                None => {
                    dead = true;
                    break;
                }
            }
        }
        if !dead {
            rel.add_mono(mono, coeff);
        }
    }
    rel
}

/// Depth-1 and depth-2 closed forms for all weights up to `max_weight`.
pub fn gen_depth12(max_weight: u32) -> Vec<Relation> {
    let mut out = Vec::new();
    for s in 1..=max_weight {
        let comp = |fam| Composition::unsigned(fam, vec![s]).unwrap();
        // T(s) = -S(s) = -(1/2) zeta_A(bar s); zeta_A(s) = 0
        let mut t = Relation::new(Provenance::Depth1(comp(Family::T)));
        t.add_sym(comp(Family::T), rat(1));
        let mut sr = Relation::new(Provenance::Depth1(comp(Family::S)));
        sr.add_sym(comp(Family::S), rat(1));
        let mut es_bar = Relation::new(Provenance::Depth1(
            Composition::new(Family::Es, vec![s], vec![-1]).unwrap(),
        ));
        es_bar.add_sym(Composition::new(Family::Es, vec![s], vec![-1]).unwrap(), rat(1));
        if let Some((c, m)) = half_zeta_bar(s) {
            t.add_mono(m.clone(), c.clone());
            sr.add_mono(m.clone(), -c.clone());
            es_bar.add_mono(m, c * rat(-2));
        }
        out.push(t);
        out.push(sr);
        out.push(es_bar);
        let mut es = Relation::new(Provenance::Depth1(comp(Family::Es)));
        es.add_sym(comp(Family::Es), rat(1));
        out.push(es);
    }
    for w in (3..=max_weight).step_by(2) {
        for a in 1..w {
            let b = w - a;
            let binom: u64 =
                (0..u64::from(a)).map(|i| u64::from(w) - i).product::<u64>()
                    / (1..=u64::from(a)).product::<u64>();
            // T(a,b) = S(a,b) = ((-1)^a / 2)(1 - 2^{-w}) C(w,a) beta_w
            let two_w = BigInt::from(2).pow(w);
            let mut coeff = BigRational::new(
                (&two_w - BigInt::one()) * BigInt::from(binom),
                two_w * BigInt::from(2),
            );
            if a % 2 == 1 {
                coeff = -coeff;
            }
            for fam in [Family::T, Family::S] {
                let c = Composition::unsigned(fam, vec![a, b]).unwrap();
                let mut rel = Relation::new(Provenance::Depth2(c.clone()));
                rel.add_sym(c, rat(1));
                rel.add_mono(Monomial::beta(w), -coeff.clone());
                out.push(rel);
            }
        }
    }
    out
}

/// Definitional parity expansion of a sign-free T/S symbol into `2^d`
/// signed Euler sums: `F(s) = 2^{-d} sum_tau (prod_{tau_j=-1} eps_j)
/// zeta(s; tau)` with `eps_j = (-1)^{d-j+1}` for T and `(-1)^{d-j}` for S.
pub fn gen_expansion(c: &Composition) -> Result<Relation> {
    if !matches!(c.family(), Family::T | Family::S) {
        return Err(Error::FamilyMismatch(format!(
            "expansion wants a sign-free T/S symbol, got {c}"
        )));
    }
    let d = c.depth();
    let shift = if c.family() == Family::S { 0 } else { 1 };
    let mut rel = Relation::new(Provenance::Expansion(c.clone()));
    rel.add_sym(c.clone(), rat(-1));
    let scale = BigRational::new(BigInt::one(), BigInt::from(2).pow(d as u32));
    for mask in 0u32..(1 << d) {
        let mut signs = Vec::with_capacity(d);
        let mut eps: i64 = 1;
        for j in 0..d {
            if mask >> j & 1 == 1 {
                signs.push(-1);
                if (d - j - 1 + shift) % 2 == 1 {
                    eps = -eps;
                }
            } else {
                signs.push(1);
            }
        }
        rel.add_sym(
            Composition::new(Family::Es, c.parts().to_vec(), signs)?,
            &scale * rat(eps),
        );
    }
    Ok(rel)
}

/// Admissible words of exactly `len` letters (the empty word for `len` 0),
/// over `{e0, e+}` or the full signed alphabet.
pub fn admissible_words(len: usize, signed: bool) -> Vec<Word> {
    if len == 0 {
        return vec![Word::empty()];
    }
    let inner: &[Letter] = if signed {
        &[Letter::E0, Letter::EPlus, Letter::EMinus]
    } else {
        &[Letter::E0, Letter::EPlus]
    };
    let last: &[Letter] = if signed {
        &[Letter::EPlus, Letter::EMinus]
    } else {
        &[Letter::EPlus]
    };
    let mut words = vec![Vec::new()];
    for _ in 0..len - 1 {
        let mut next = Vec::with_capacity(words.len() * inner.len());
        for w in &words {
            for &l in inner {
                let mut w2 = w.clone();
                w2.push(l);
                next.push(w2);
            }
        }
        words = next;
    }
    let mut out = Vec::with_capacity(words.len() * last.len());
    for w in words {
        for &l in last {
            let mut w2 = w.clone();
            w2.push(l);
            out.push(Word::new(w2));
        }
    }
    out
}

/// All (iii)-instances of total weight `weight` for the T-side.
/// `signed_v` admits `e-` in v (the alternating system); `full_u` also
/// ranges over nonempty u (otherwise only `u` empty, which already spans
/// most of the rank and keeps high weights tractable).
pub fn shuffle_inventory_t(weight: u32, signed_v: bool, full_u: bool) -> Vec<Relation> {
    let mut out = Vec::new();
    for s in 1..=weight {
        let rest = (weight - s) as usize;
        for lu in 0..=rest {
            if lu > 0 && !full_u {
                break;
            }
            let lv = rest - lu;
            for u in admissible_words(lu, false) {
                for v in admissible_words(lv, signed_v) {
                    if (u.depth() + v.depth()) % 2 == 1 {
                        if let Ok(rel) = gen_linear_shuffle_t(s, &u, &v) {
                            if !rel.is_trivial() {
                                out.push(rel);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// All (iii)-instances of total weight `weight` for Euler sums.
pub fn shuffle_inventory_es(weight: u32, full_u: bool) -> Vec<Relation> {
    let mut out = Vec::new();
    for s in 1..=weight {
        let rest = (weight - s) as usize;
        for lu in 0..=rest {
            if lu > 0 && !full_u {
                break;
            }
            let lv = rest - lu;
            for u in admissible_words(lu, false) {
                for v in admissible_words(lv, true) {
                    if let Ok(rel) = gen_linear_shuffle_es(s, &u, &v) {
                        if !rel.is_trivial() {
                            out.push(rel);
                        }
                    }
                }
            }
        }
    }
    out
}
