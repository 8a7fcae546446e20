//! Audit suites for the closed-form identities, the rational-coefficient
//! fitter, the dimension pipeline, and conjecture monitors.
//!
//! Every audited identity is rendered as a [`Relation`] whose terms must
//! sum to zero at every admissible prime in the configured range. An
//! identity that fails at three or more primes and carries a correction
//! spec is re-fitted against its monomial/symbol basis and reported as a
//! suspected typo together with the fitted coefficients.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::evaluator::{eval_comp_ctx, sweep, SweepConfig};
use crate::exactla::{
    rank_value_matrix_plateau, rank_with_units, value_kernel, QMatrix, ValueMatrix,
};
use crate::modint::{odd_primes_in, PrimeContext};
use crate::recon::{fit_residues, verify_fit, FitOutcome};
use crate::relgen::{
    admissible_words, gen_alt_reversal, gen_depth12, gen_expansion, gen_homogeneous,
    gen_reversal, gen_reversal_es, shuffle_inventory_es, shuffle_inventory_t, Monomial, Node,
    Provenance, Relation, RelationSystem, TwistedCoeff,
};
use crate::wordalg::{
    enumerate_compositions, parse_symbol, rat, ratio, Composition, Family,
};
use crate::{Error, Result};

/// Known audit suites, in report order.
pub const SUITES: &[&str] = &[
    "trip-fmtv",
    "t-ones",
    "alt-wt1",
    "wt3-fes",
    "dbl",
    "wt2-alt",
    "fes-basis",
    "t121",
    "fmt-evals",
];

/// Published reference dimensions for the sign-free T family, weights 0..13.
pub const FMT_TABLE: [u64; 14] = [0, 1, 0, 1, 2, 3, 3, 6, 9, 15, 17, 32, 44, 76];
/// Published reference dimensions for the alternating T family, weights 0..7.
pub const FAMT_TABLE: [u64; 8] = [0, 2, 2, 6, 12, 20, 40, 76];

/// Fibonacci with F_0 = F_1 = 1.
pub fn fibonacci(k: u32) -> u64 {
    let (mut a, mut b) = (1u64, 1u64);
    for _ in 0..k {
        let c = a + b;
        a = b;
        b = c;
    }
    a
}

/// A fitted replacement for a failed identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FittedCorrection {
    pub target: String,
    pub coeffs: Vec<(String, BigRational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Verified,
    Failed { violations: Vec<u64> },
    SuspectedTypo {
        violations: Vec<u64>,
        correction: Option<FittedCorrection>,
    },
}

impl Status {
    /// Suspected typos with a successful fitted correction do not count
    /// as failures; everything else that violated does.
    pub fn is_ok(&self) -> bool {
        match self {
            Status::Verified => true,
            Status::Failed { .. } => false,
            Status::SuspectedTypo { correction, .. } => correction.is_some(),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::Failed { .. } => "failed",
            Status::SuspectedTypo { .. } => "suspected-typo",
        }
    }
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub id: String,
    pub status: Status,
    pub primes_checked: usize,
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub suite: String,
    pub prime_lo: u64,
    pub prime_hi: u64,
    pub identities: Vec<IdentityReport>,
}

impl AuditReport {
    pub fn all_ok(&self) -> bool {
        self.identities.iter().all(|i| i.status.is_ok())
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite {} (primes {}..{})",
            self.suite, self.prime_lo, self.prime_hi
        );
        for i in &self.identities {
            let _ = write!(out, "  {:<14} {}  [{} primes]", i.status.label(), i.id, i.primes_checked);
            match &i.status {
                Status::Failed { violations } => {
                    let _ = write!(out, "  first violations: {:?}", &violations[..violations.len().min(5)]);
                }
                Status::SuspectedTypo { correction, .. } => match correction {
                    Some(c) => {
                        let terms: Vec<String> = c
                            .coeffs
                            .iter()
                            .map(|(n, q)| format!("{}/{}*{}", q.numer(), q.denom(), n))
                            .collect();
                        let _ = write!(out, "  fitted: {} = {}", c.target, terms.join(" + "));
                    }
                    None => {
                        let _ = write!(out, "  no correction found");
                    }
                },
                Status::Verified => {}
            }
            out.push('\n');
        }
        out
    }

    /// One JSON object per identity.
    pub fn render_json(&self) -> String {
        let mut out = String::new();
        for i in &self.identities {
            let correction = match &i.status {
                Status::SuspectedTypo {
                    correction: Some(c),
                    ..
                } => serde_json::json!({
                    "target": c.target,
                    "coeffs": c
                        .coeffs
                        .iter()
                        .map(|(n, q)| serde_json::json!([n, format!("{}/{}", q.numer(), q.denom())]))
                        .collect::<Vec<_>>(),
                }),
                _ => serde_json::Value::Null,
            };
            let violations = match &i.status {
                Status::Failed { violations } | Status::SuspectedTypo { violations, .. } => {
                    violations.clone()
                }
                Status::Verified => Vec::new(),
            };
            let obj = serde_json::json!({
                "suite": self.suite,
                "identity": i.id,
                "status": i.status.label(),
                "primes_checked": i.primes_checked,
                "violations": violations,
                "fitted": correction,
            });
            let _ = writeln!(out, "{obj}");
        }
        out
    }
}

/// How to search for a correction when an identity fails.
#[derive(Clone, Debug)]
pub struct CorrectionSpec {
    pub target: Node,
    pub basis: Vec<Node>,
}

#[derive(Clone, Debug)]
pub struct Identity {
    pub id: String,
    pub relation: Relation,
    pub correction: Option<CorrectionSpec>,
}

fn sym(s: &str) -> Node {
    Node::Sym(parse_symbol(s).expect("audit symbol"))
}

fn q2p(e: u32) -> Node {
    Node::Mono(Monomial::q2_pow(e))
}

fn beta(w: u32) -> Node {
    Node::Mono(Monomial::beta(w))
}

fn mono_mul(a: Monomial, b: Monomial) -> Node {
    Node::Mono(a.mul(&b))
}

fn identity(id: &str, terms: Vec<(Node, BigRational)>) -> Identity {
    let mut rel = Relation::new(Provenance::Audit(id.to_string()));
    for (n, c) in terms {
        rel.add(n, TwistedCoeff::rational(c));
    }
    Identity {
        id: id.to_string(),
        relation: rel,
        correction: None,
    }
}

fn with_correction(mut i: Identity, target: Node, basis: Vec<Node>) -> Identity {
    i.correction = Some(CorrectionSpec { target, basis });
    i
}

/// Value of a node at a prime.
pub fn node_value(ctx: &PrimeContext, node: &Node) -> Result<u64> {
    match node {
        Node::Sym(c) => Ok(eval_comp_ctx(ctx, c).value),
        Node::Mono(m) => m.eval(ctx),
    }
}

fn admissible(lo: u64, hi: u64, weight: u32) -> Vec<u64> {
    odd_primes_in(lo.max(u64::from(weight) + 3), hi)
}

/// Exact rational fit of a target node against basis nodes over all
/// admissible primes in range. A fit must hold at every admissible prime.
pub fn fit_combination(target: &Node, basis: &[Node], lo: u64, hi: u64) -> Result<FitOutcome> {
    let weight = basis
        .iter()
        .chain(std::iter::once(target))
        .map(Node::weight)
        .max()
        .unwrap_or(0);
    let primes = admissible(lo, hi, weight);
    let rows: Vec<Vec<u64>> = primes
        .par_iter()
        .map(|&p| {
            let ctx = PrimeContext::new(p)?;
            let mut row = Vec::with_capacity(basis.len() + 1);
            row.push(node_value(&ctx, target)?);
            for b in basis {
                row.push(node_value(&ctx, b)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let target_vals: Vec<u64> = rows.iter().map(|r| r[0]).collect();
    let basis_vals: Vec<Vec<u64>> = (0..basis.len())
        .map(|j| rows.iter().map(|r| r[j + 1]).collect())
        .collect();
    fit_residues(&primes, &target_vals, &basis_vals)
}

/// Check a single identity over a prime range.
pub fn audit_one(ident: &Identity, lo: u64, hi: u64) -> IdentityReport {
    let primes = admissible(lo, hi, ident.relation.weight());
    let violations: Vec<u64> = primes
        .par_iter()
        .filter_map(|&p| {
            let ctx = PrimeContext::new(p).ok()?;
            match ident.relation.eval_at(&ctx) {
                Ok(0) => None,
                Ok(_) => Some(p),
                Err(_) => None, // constant undefined at this prime: skip
            }
        })
        .collect();
    let status = if violations.is_empty() {
        Status::Verified
    } else if violations.len() >= 3 {
        if let Some(spec) = &ident.correction {
            let correction = match fit_combination(&spec.target, &spec.basis, lo, hi) {
                Ok(FitOutcome::Fit(coeffs)) => Some(FittedCorrection {
                    target: spec.target.render(),
                    coeffs: spec
                        .basis
                        .iter()
                        .map(Node::render)
                        .zip(coeffs)
                        .filter(|(_, q)| !num_traits::Zero::is_zero(q))
                        .collect(),
                }),
                _ => None,
            };
            Status::SuspectedTypo {
                violations,
                correction,
            }
        } else {
            Status::Failed { violations }
        }
    } else {
        Status::Failed { violations }
    };
    IdentityReport {
        id: ident.id.clone(),
        status,
        primes_checked: primes.len(),
    }
}

fn suite_trip_fmtv() -> Vec<Identity> {
    vec![
        identity(
            "T(1,1,1) = 3/16*b3",
            vec![(sym("T:1,1,1"), rat(1)), (beta(3), ratio(-3, 16))],
        ),
        identity(
            "T(1,1,1) = -S(1,1,1)",
            vec![(sym("T:1,1,1"), rat(1)), (sym("S:1,1,1"), rat(1))],
        ),
    ]
}

fn suite_t_ones() -> Vec<Identity> {
    (1..=4)
        .map(|d| {
            let parts = vec![1u32; 2 * d];
            identity(
                &format!("T({{1}}^{}) = 0", 2 * d),
                vec![(
                    Node::Sym(Composition::unsigned(Family::T, parts).unwrap()),
                    rat(1),
                )],
            )
        })
        .collect()
}

fn suite_alt_wt1() -> Vec<Identity> {
    // The paper states S(bar 1) = -q2/2 and T(bar 1) = t*q2/2 with the
    // Fermat quotient divided by p; its inline definition divides by 2
    // instead, which makes the right-hand side vanish mod p. The S-form is
    // audited through its reversal-equivalent T-form (alternating S-sums
    // are outside the symbol families).
    let mut good = Relation::new(Provenance::Audit("T(-1) = t*q2/2".into()));
    good.add(sym("AT:-1"), TwistedCoeff::rational(rat(1)));
    good.add(
        Node::Mono(Monomial::q2_pow(1)),
        TwistedCoeff::twisted(ratio(-1, 2)),
    );
    let good = Identity {
        id: "T(-1) = t*q2/2".into(),
        relation: good,
        correction: None,
    };
    let literal = with_correction(
        identity(
            "T(-1) with literal /2 divisor (rhs vanishes mod p)",
            vec![(sym("AT:-1"), rat(1))],
        ),
        sym("AT:-1"),
        vec![Node::Mono(Monomial::q2_pow(1).twisted())],
    );
    vec![good, literal]
}

fn suite_wt3_fes() -> Vec<Identity> {
    let q3 = q2p(3);
    vec![
        identity("zeta(1,1,1) = 0", vec![(sym("ES:1,1,1"), rat(1))]),
        identity(
            "zeta(-1,-1,-1) = -4/3*q2^3 - 1/2*b3",
            vec![
                (sym("ES:-1,-1,-1"), rat(1)),
                (q3.clone(), ratio(4, 3)),
                (beta(3), ratio(1, 2)),
            ],
        ),
        identity(
            "zeta(1,1,-1) = -1/3*q2^3 - 7/8*b3",
            vec![
                (sym("ES:1,1,-1"), rat(1)),
                (q3.clone(), ratio(1, 3)),
                (beta(3), ratio(7, 8)),
            ],
        ),
        identity(
            "zeta(-1,1,1) = zeta(1,1,-1)",
            vec![(sym("ES:-1,1,1"), rat(1)), (sym("ES:1,1,-1"), rat(-1))],
        ),
        identity("zeta(-1,1,-1) = 0", vec![(sym("ES:-1,1,-1"), rat(1))]),
        identity(
            "zeta(1,-1,1) = 2/3*q2^3 + 1/4*b3",
            vec![
                (sym("ES:1,-1,1"), rat(1)),
                (q3.clone(), ratio(-2, 3)),
                (beta(3), ratio(-1, 4)),
            ],
        ),
        identity(
            "zeta(-1,-1,1) = -q2^3 - 21/8*b3",
            vec![
                (sym("ES:-1,-1,1"), rat(1)),
                (q3, rat(1)),
                (beta(3), ratio(21, 8)),
            ],
        ),
        identity(
            "zeta(-1,-1,1) = -zeta(1,-1,-1)",
            vec![(sym("ES:-1,-1,1"), rat(1)), (sym("ES:1,-1,-1"), rat(1))],
        ),
    ]
}

fn dbl_coeff(w: u32, a: u32) -> BigRational {
    let binom: u64 = (0..u64::from(a)).map(|i| u64::from(w) - i).product::<u64>()
        / (1..=u64::from(a)).product::<u64>();
    let two_w = BigInt::from(2).pow(w);
    let mut c = BigRational::new(
        (&two_w - BigInt::from(1)) * BigInt::from(binom),
        two_w * BigInt::from(2),
    );
    if a % 2 == 1 {
        c = -c;
    }
    c
}

fn suite_dbl() -> Vec<Identity> {
    let mut out = Vec::new();
    for w in (3..=9u32).step_by(2) {
        for a in 1..w {
            let b = w - a;
            for fam in [Family::T, Family::S] {
                let c = Composition::unsigned(fam, vec![a, b]).unwrap();
                out.push(identity(
                    &format!("{}({a},{b}) closed form", fam.prefix()),
                    vec![(Node::Sym(c), rat(1)), (beta(w), -dbl_coeff(w, a))],
                ));
            }
        }
    }
    out
}

fn suite_wt2_alt() -> Vec<Identity> {
    let mut rev = Relation::new(Provenance::Audit("T(-1,1) = -t*T(1,-1)".into()));
    rev.add(sym("AT:-1,1"), TwistedCoeff::rational(rat(1)));
    rev.add(sym("AT:1,-1"), TwistedCoeff::twisted(rat(1)));
    vec![
        identity(
            "T(-2) = G",
            vec![(sym("AT:-2"), rat(1)), (Node::Mono(Monomial::catalan()), rat(-1))],
        ),
        identity(
            "T(-2) = -2*T(1,-1)",
            vec![(sym("AT:-2"), rat(1)), (sym("AT:1,-1"), rat(2))],
        ),
        identity(
            "2*T(1,-1) + T(-1,-1) = 0",
            vec![(sym("AT:1,-1"), rat(2)), (sym("AT:-1,-1"), rat(1))],
        ),
        Identity {
            id: "T(-1,1) = -t*T(1,-1)".into(),
            relation: rev,
            correction: None,
        },
    ]
}

fn suite_fes_basis() -> Vec<Identity> {
    let b3b3 = mono_mul(Monomial::beta(3), Monomial::beta(3));
    let q3b3 = mono_mul(Monomial::q2_pow(3), Monomial::beta(3));
    let q1b5 = mono_mul(Monomial::q2_pow(1), Monomial::beta(5));
    let q2b3 = mono_mul(Monomial::q2_pow(2), Monomial::beta(3));
    let q1b3 = mono_mul(Monomial::q2_pow(1), Monomial::beta(3));
    let a6 = sym("ES:-1,1,2,2");
    let b6 = sym("ES:-1,2,1,2");
    let cfix = sym("ES:-1,1,1,1,2");
    let d6 = sym("ES:-1,2,2,1");
    let w6_basis = vec![
        a6.clone(),
        b6.clone(),
        cfix.clone(),
        d6.clone(),
        b3b3.clone(),
        q3b3.clone(),
        q1b5.clone(),
        q2p(6),
    ];
    let mut out = vec![
        // printed as zeta(-1,1) = -2 q2, a weight mismatch; the intended
        // depth-1 statement and the printed left side are both audited
        identity(
            "zeta(-1) = -2*q2",
            vec![(sym("ES:-1"), rat(1)), (q2p(1), rat(2))],
        ),
        with_correction(
            identity(
                "zeta(-1,1) = -2*q2 (as printed)",
                vec![(sym("ES:-1,1"), rat(1)), (q2p(1), rat(2))],
            ),
            sym("ES:-1,1"),
            vec![q2p(2)],
        ),
        identity(
            "zeta(-1,1) = q2^2",
            vec![(sym("ES:-1,1"), rat(1)), (q2p(2), rat(-1))],
        ),
        identity(
            "zeta(-1,2) = 3/4*b3",
            vec![(sym("ES:-1,2"), rat(1)), (beta(3), ratio(-3, 4))],
        ),
        with_correction(
            identity(
                "zeta(1,-1,1) = 2/4*q2^3 + 1/4*b3 (as printed)",
                vec![
                    (sym("ES:1,-1,1"), rat(1)),
                    (q2p(3), ratio(-1, 2)),
                    (beta(3), ratio(-1, 4)),
                ],
            ),
            sym("ES:1,-1,1"),
            vec![q2p(3), beta(3)],
        ),
        identity(
            "zeta(-1,1,2) = 9/4*q2*b3 - zeta(1,-3)",
            vec![
                (sym("ES:-1,1,2"), rat(1)),
                (q1b3.clone(), ratio(-9, 4)),
                (sym("ES:1,-3"), rat(1)),
            ],
        ),
        identity(
            "zeta(-1,{1}^3) = 1/12*q2^4 + 7/8*q2*b3 + 1/4*zeta(1,-3)",
            vec![
                (sym("ES:-1,1,1,1"), rat(1)),
                (q2p(4), ratio(-1, 12)),
                (q1b3.clone(), ratio(-7, 8)),
                (sym("ES:1,-3"), ratio(-1, 4)),
            ],
        ),
        with_correction(
            identity(
                "zeta(-1,2,1) = 1/2*zeta(1,-3) - 12/4*q2*b3 (as printed)",
                vec![
                    (sym("ES:-1,2,1"), rat(1)),
                    (sym("ES:1,-3"), ratio(-1, 2)),
                    (q1b3, rat(3)),
                ],
            ),
            sym("ES:-1,2,1"),
            vec![q2p(4), mono_mul(Monomial::q2_pow(1), Monomial::beta(3)), sym("ES:1,-3")],
        ),
        identity(
            "zeta(-1,2,1,1) reduction",
            vec![
                (sym("ES:-1,2,1,1"), rat(1)),
                (beta(5), ratio(-695, 128)),
                (sym("ES:-1,2,2"), ratio(5, 4)),
                (sym("ES:-1,1,1,2"), rat(2)),
                (q2b3.clone(), ratio(9, 4)),
            ],
        ),
        with_correction(
            identity(
                "zeta(-1,{1}^4) reduction (as printed)",
                vec![
                    (sym("ES:-1,1,1,1,1"), rat(1)),
                    (q2p(5), ratio(1, 60)),
                    (q2b3.clone(), ratio(23, 24)),
                    (sym("ES:-1,2,2"), ratio(1, 8)),
                    (sym("ES:-1,1,1,2"), ratio(1, 2)),
                    (beta(5), ratio(25, 256)),
                ],
            ),
            sym("ES:-1,1,1,1,1"),
            vec![
                q2p(5),
                q2b3.clone(),
                beta(5),
                sym("ES:-1,2,2"),
                sym("ES:-1,1,1,2"),
            ],
        ),
        identity(
            "zeta(-1,1,2,1) reduction",
            vec![
                (sym("ES:-1,1,2,1"), rat(1)),
                (q2b3, ratio(-33, 8)),
                (beta(5), ratio(555, 128)),
                (sym("ES:-1,2,2"), ratio(-5, 4)),
                (sym("ES:-1,1,1,2"), rat(-2)),
            ],
        ),
    ];
    // weight-6 lines; the published list assigns B and C the same expression, so
    // the printed combination uses C = B and the audit fits the repair
    let w6 = [
        (
            "zeta(-1,1,2,1,1) reduction (as printed, C=B)",
            "ES:-1,1,2,1,1",
            vec![
                (a6.clone(), ratio(-1, 2)),
                (b6.clone(), rat(3)),
                (d6.clone(), rat(1)),
                (b3b3.clone(), ratio(9, 4)),
                (q3b3.clone(), ratio(5, 8)),
                (q1b5.clone(), ratio(205, 64)),
            ],
        ),
        (
            "zeta(-1,{1}^3,2) reduction (as printed, C=B)",
            "ES:-1,1,1,1,2",
            vec![
                (a6.clone(), ratio(-3, 4)),
                (b6.clone(), ratio(19, 8) + ratio(1, 4)),
                (d6.clone(), rat(1)),
                (b3b3.clone(), ratio(201, 32)),
                (q3b3.clone(), rat(1)),
                (q1b5.clone(), ratio(-645, 256)),
            ],
        ),
        (
            "zeta(-1,2,{1}^3) reduction (as printed, C=B)",
            "ES:-1,2,1,1,1",
            vec![
                (a6.clone(), ratio(1, 2)),
                (b6.clone(), ratio(-19, 8) + ratio(-5, 4)),
                (d6.clone(), rat(-2)),
                (b3b3.clone(), ratio(-1113, 256)),
                (q3b3.clone(), ratio(-5, 4)),
                (q1b5.clone(), ratio(-1685, 256)),
            ],
        ),
        (
            "zeta(-1,{1}^5) reduction (as printed, C=B)",
            "ES:-1,1,1,1,1,1",
            vec![
                (a6.clone(), ratio(1, 4)),
                (b6.clone(), ratio(-13, 16) + ratio(-1, 8)),
                (d6.clone(), ratio(-1, 2)),
                (q3b3.clone(), ratio(-1, 6)),
                (q1b5.clone(), ratio(817, 512)),
                (b3b3.clone(), ratio(-811, 512)),
                (q2p(6), ratio(1, 360)),
            ],
        ),
    ];
    for (id, lhs, rhs) in w6 {
        let mut terms = vec![(sym(lhs), rat(1))];
        for (n, c) in rhs {
            terms.push((n, -c));
        }
        out.push(with_correction(
            identity(id, terms),
            sym(lhs),
            w6_basis.clone(),
        ));
    }
    out
}

fn binom(n: u32, k: u32) -> i64 {
    let mut v = 1i64;
    for i in 0..k as i64 {
        v = v * (i64::from(n) - i) / (i + 1);
    }
    v
}

fn suite_t121() -> Vec<Identity> {
    let mut out = Vec::new();
    for k in [1u32, 3, 5] {
        let base = {
            let mut parts = vec![2u32];
            parts.extend(vec![1; k as usize]);
            Composition::unsigned(Family::T, parts).unwrap()
        };
        for ell in 0..=k {
            let mut parts = vec![1u32; ell as usize];
            parts.push(2);
            parts.extend(vec![1; (k - ell) as usize]);
            let lhs = Composition::unsigned(Family::T, parts).unwrap();
            let mut c = BigRational::new(
                BigInt::from(binom(k + 1, ell)),
                BigInt::from(i64::from(ell) + 1),
            );
            if ell % 2 == 1 {
                c = -c;
            }
            out.push(identity(
                &format!("T({{1}}^{ell},2,{{1}}^{}) recurrence (k={k})", k - ell),
                vec![(Node::Sym(lhs), rat(1)), (Node::Sym(base.clone()), -c)],
            ));
        }
    }
    out
}

fn suite_fmt_evals() -> Vec<Identity> {
    vec![
        identity(
            "T(1,1,2) = -1/8*zeta(1,-3) - 21/16*q2*b3",
            vec![
                (sym("T:1,1,2"), rat(1)),
                (sym("ES:1,-3"), ratio(1, 8)),
                (mono_mul(Monomial::q2_pow(1), Monomial::beta(3)), ratio(21, 16)),
            ],
        ),
        with_correction(
            identity(
                "T(1,2,2) = -1605/256*b5 + 9/2*q2^2*b3 + 3*zeta(-1,1,1,2) (as printed)",
                vec![
                    (sym("T:1,2,2"), rat(1)),
                    (beta(5), ratio(1605, 256)),
                    (mono_mul(Monomial::q2_pow(2), Monomial::beta(3)), ratio(-9, 2)),
                    (sym("ES:-1,1,1,2"), rat(-3)),
                ],
            ),
            sym("T:1,2,2"),
            vec![
                beta(5),
                mono_mul(Monomial::q2_pow(2), Monomial::beta(3)),
                sym("ES:-1,1,1,2"),
                sym("ES:-1,2,2"),
                q2p(5),
            ],
        ),
    ]
}

pub fn suite_identities(suite: &str) -> Result<Vec<Identity>> {
    Ok(match suite {
        "trip-fmtv" => suite_trip_fmtv(),
        "t-ones" => suite_t_ones(),
        "alt-wt1" => suite_alt_wt1(),
        "wt3-fes" => suite_wt3_fes(),
        "dbl" => suite_dbl(),
        "wt2-alt" => suite_wt2_alt(),
        "fes-basis" => suite_fes_basis(),
        "t121" => suite_t121(),
        "fmt-evals" => suite_fmt_evals(),
        _ => return Err(Error::UnknownSuite(suite.to_string())),
    })
}

/// Run one audit suite over a prime range.
pub fn audit(suite: &str, lo: u64, hi: u64) -> Result<AuditReport> {
    let identities = suite_identities(suite)?;
    let reports = identities
        .iter()
        .map(|i| audit_one(i, lo, hi))
        .collect();
    Ok(AuditReport {
        suite: suite.to_string(),
        prime_lo: lo,
        prime_hi: hi,
        identities: reports,
    })
}

/// Dimension report for one (family, weight).
#[derive(Clone, Debug)]
pub struct DimReport {
    pub family: Family,
    pub weight: u32,
    pub symbols: usize,
    /// Symbols actually used for the value-matrix lower bound (capped when
    /// the prime range cannot support the full inventory).
    pub lower_symbols: usize,
    pub lower: usize,
    pub plateau: Option<bool>,
    pub upper: usize,
    pub paper: Option<u64>,
    pub notes: Vec<String>,
}

impl DimReport {
    pub fn render_text(&self) -> String {
        let mut s = format!(
            "dims {} w={}: lower={} upper={} paper={} (symbols={}, lower over {} symbols, plateau={})",
            self.family.prefix(),
            self.weight,
            self.lower,
            self.upper,
            self.paper.map_or("-".into(), |v| v.to_string()),
            self.symbols,
            self.lower_symbols,
            match self.plateau {
                Some(true) => "yes",
                Some(false) => "NO",
                None => "n/a",
            }
        );
        for n in &self.notes {
            s.push_str("\n  note: ");
            s.push_str(n);
        }
        s
    }

    pub fn render_json(&self) -> String {
        serde_json::json!({
            "family": self.family.prefix(),
            "weight": self.weight,
            "symbols": self.symbols,
            "lower_symbols": self.lower_symbols,
            "lower": self.lower,
            "plateau": self.plateau,
            "upper": self.upper,
            "paper": self.paper,
            "notes": self.notes,
        })
        .to_string()
    }
}

fn family_symbols(family: Family, weight: u32) -> Vec<Composition> {
    enumerate_compositions(weight, family, family == Family::Es)
}

fn value_matrix(
    family: Family,
    weight: u32,
    lo: u64,
    hi: u64,
    cache_dir: Option<&Path>,
    cap: usize,
) -> Result<(ValueMatrix, usize)> {
    let mut comps = family_symbols(family, weight);
    let total = comps.len();
    comps.truncate(cap);
    let primes = admissible(lo, hi, weight);
    let values: Vec<Vec<u64>> = if let Some(dir) = cache_dir {
        let cfg = SweepConfig {
            prime_lo: lo,
            prime_hi: hi,
            family,
            weight,
            alternating: family == Family::Es,
            symbols: Some(comps.clone()),
            cache_dir: dir.to_path_buf(),
        };
        let vectors = sweep(&cfg)?;
        vectors
            .iter()
            .map(|v| {
                v.aligned(&primes)
                    .into_iter()
                    .map(|o| o.expect("admissible prime missing from sweep"))
                    .collect()
            })
            .collect()
    } else {
        comps
            .par_iter()
            .map(|c| {
                primes
                    .iter()
                    .map(|&p| Ok(eval_comp_ctx(&PrimeContext::new(p)?, c).value))
                    .collect::<Result<Vec<u64>>>()
            })
            .collect::<Result<_>>()?
    };
    let labels = comps.iter().map(Composition::symbol).collect();
    Ok((ValueMatrix::new(labels, primes, values)?, total))
}

/// Joint T/S/ES relation system coupling the symbol universes, used for
/// the sign-free upper bounds at moderate weights.
fn t_joint_system(w: u32) -> RelationSystem {
    let mut sys = RelationSystem::default();
    for rel in shuffle_inventory_es(w, true) {
        sys.push(rel);
    }
    for rel in shuffle_inventory_t(w, false, true) {
        sys.push(rel);
    }
    for fam in [Family::T, Family::S] {
        for c in enumerate_compositions(w, fam, false) {
            sys.push(gen_reversal(&c).unwrap());
            sys.push(gen_expansion(&c).unwrap());
        }
    }
    for c in enumerate_compositions(w, Family::Es, true) {
        sys.push(gen_reversal_es(&c).unwrap());
    }
    for rel in gen_depth12(w) {
        if rel.weight() == w {
            sys.push(rel);
        }
    }
    for s in 1..=w {
        if w % s == 0 {
            sys.push(gen_homogeneous(s, w / s));
        }
    }
    sys.dedup();
    sys
}

/// Pure-T system (plus sign-free S via reversal is omitted): kept small
/// enough for the report-only weights.
fn t_capped_system(w: u32) -> RelationSystem {
    let mut sys = RelationSystem::default();
    for rel in shuffle_inventory_t(w, false, false) {
        sys.push(rel);
    }
    for c in enumerate_compositions(w, Family::T, false) {
        if c.depth() % 2 == 0 {
            sys.push(gen_reversal(&c).unwrap());
        }
    }
    for rel in gen_depth12(w) {
        if rel.weight() == w
            && rel
                .terms
                .keys()
                .all(|n| !matches!(n, Node::Sym(c) if c.family() != Family::T))
        {
            sys.push(rel);
        }
    }
    sys.dedup();
    sys
}

fn at_system(w: u32) -> RelationSystem {
    let full_u = w <= 6;
    let mut sys = RelationSystem::default();
    for rel in shuffle_inventory_t(w, true, full_u) {
        sys.push(rel);
    }
    for c in enumerate_compositions(w, Family::At, false) {
        if c.depth() % 2 == 0 {
            sys.push(gen_alt_reversal(&c).unwrap());
        }
    }
    for c in enumerate_compositions(w, Family::T, false) {
        if c.depth() % 2 == 0 {
            sys.push(gen_reversal(&c).unwrap());
        }
    }
    for rel in gen_depth12(w) {
        if rel.weight() == w
            && rel
                .terms
                .keys()
                .all(|n| !matches!(n, Node::Sym(c) if c.family() != Family::T))
        {
            sys.push(rel);
        }
    }
    sys.dedup();
    sys
}

fn es_system(w: u32) -> RelationSystem {
    let mut sys = RelationSystem::default();
    for rel in shuffle_inventory_es(w, true) {
        sys.push(rel);
    }
    for c in enumerate_compositions(w, Family::Es, true) {
        sys.push(gen_reversal_es(&c).unwrap());
    }
    for rel in gen_depth12(w) {
        if rel.weight() == w
            && rel
                .terms
                .keys()
                .all(|n| matches!(n, Node::Mono(_)) || matches!(n, Node::Sym(c) if c.family() == Family::Es))
        {
            sys.push(rel);
        }
    }
    for s in 1..=w {
        if w % s == 0 {
            sys.push(gen_homogeneous(s, w / s));
        }
    }
    sys.dedup();
    sys
}

/// Upper bound for the span of `unit_syms` given a relation system:
/// rank(R with unit rows) - rank(R), per twist class where needed.
fn upper_bound(sys: &RelationSystem, unit_syms: &[Node]) -> Result<usize> {
    let mut nodes = sys.nodes();
    for s in unit_syms {
        if !nodes.contains(s) {
            nodes.push(s.clone());
        }
    }
    nodes.sort();
    let index: BTreeMap<&Node, usize> = nodes.iter().zip(0..).collect();
    let units: Vec<usize> = unit_syms.iter().map(|s| index[s]).collect();
    let twisted = sys.relations.iter().any(Relation::uses_twist);
    if !twisted {
        let m = QMatrix::from_relations(sys, &nodes, 1)?;
        let (base, ext) = rank_with_units(&m, &units);
        Ok(ext - base)
    } else {
        // class-split: the A-span embeds into the product of the two
        // prime-class spans
        let mut total = 0;
        for t in [1i8, -1] {
            let m = QMatrix::from_relations(sys, &nodes, t)?;
            let (base, ext) = rank_with_units(&m, &units);
            total += ext - base;
        }
        Ok(total)
    }
}

/// Symbol universe for the upper bound: family symbols of the weight,
/// normalized (all-plus alternating symbols are T symbols).
fn unit_nodes(family: Family, weight: u32) -> Vec<Node> {
    family_symbols(family, weight)
        .iter()
        .map(|c| Node::Sym(crate::relgen::normalize_comp(c)))
        .collect()
}

/// Full dimension report: lower bound from the sampled value matrix,
/// upper bound from the generated relation system.
pub fn dims(
    family: Family,
    weight: u32,
    lo: u64,
    hi: u64,
    cache_dir: Option<&Path>,
) -> Result<DimReport> {
    let paper = match family {
        Family::T => FMT_TABLE.get(weight as usize).copied(),
        Family::At => FAMT_TABLE.get(weight as usize).copied(),
        _ => None,
    };
    if weight == 0 {
        return Ok(DimReport {
            family,
            weight,
            symbols: 0,
            lower_symbols: 0,
            lower: 0,
            plateau: Some(true),
            upper: 0,
            paper,
            notes: Vec::new(),
        });
    }
    let symbols = family_symbols(family, weight).len();
    let primes = admissible(lo, hi, weight);
    let mut notes = Vec::new();
    // cap the symbol inventory so the column precondition can hold
    let cap = if primes.len() >= 2 * symbols + 16 {
        symbols
    } else {
        let cap = primes.len().saturating_sub(16) / 2;
        notes.push(format!(
            "lower bound computed on the first {cap} of {symbols} symbols (prime range supports at most that many)"
        ));
        cap
    };
    let (vm, _) = value_matrix(family, weight, lo, hi, cache_dir, cap)?;
    let (lower, plateau) = rank_value_matrix_plateau(&vm)?;

    // Certified-numerical upper bound: every dependent row of the value
    // matrix is fitted on a prime prefix and the fitted relation re-verified
    // at held-out primes; each certified relation cuts one dimension. This
    // mirrors how the reference dimension table itself was produced.
    const HOLDOUT: usize = 10;
    let mut numeric_upper: Option<usize> = None;
    if cap == symbols && vm.primes.len() >= 2 * symbols + 16 + HOLDOUT {
        let fit_len = vm.primes.len() - HOLDOUT;
        let kern = value_kernel(&vm.prefix(fit_len))?;
        let hold: Vec<u64> = vm.primes[fit_len..].to_vec();
        let certified = kern
            .relations
            .iter()
            .filter(|rel| {
                let target: Vec<u64> = vm.values[rel.row][fit_len..].to_vec();
                let coeffs: Vec<BigRational> =
                    rel.coeffs.iter().map(|(_, q)| q.clone()).collect();
                let basis: Vec<Vec<u64>> = rel
                    .coeffs
                    .iter()
                    .map(|&(j, _)| vm.values[j][fit_len..].to_vec())
                    .collect();
                verify_fit(&coeffs, &hold, &target, &basis).is_none()
            })
            .count();
        numeric_upper = Some(symbols - certified);
        notes.push(format!(
            "upper bound certifies {certified} value-kernel relations re-verified at {HOLDOUT} held-out primes"
        ));
    }

    // Relation-system upper bound; skipped at the heaviest sign-free
    // weights when the numeric certificate is already available.
    let system_upper = if numeric_upper.is_none() || !(family == Family::T && weight >= 7) {
        let sys = match family {
            Family::T => {
                if weight <= 8 {
                    t_joint_system(weight)
                } else {
                    notes.push(
                        "relation system restricted to the pure-T subsystem (u = empty shuffle instances)".into(),
                    );
                    t_capped_system(weight)
                }
            }
            Family::At => at_system(weight),
            Family::Es => es_system(weight),
            Family::S => t_joint_system(weight),
        };
        let units = unit_nodes(family, weight);
        let bound = upper_bound(&sys, &units)?;
        notes.push(format!("relation-system upper bound {bound}"));
        Some(bound)
    } else {
        None
    };
    let upper = match (numeric_upper, system_upper) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => unreachable!("at least one upper-bound path always runs"),
    };
    if family == Family::At && weight == 1 {
        notes.push("paper text gives FAMT_1 = 2 while its table's infinite AMT row reads 1; both sources shown, the finite table value is 2".into());
    }
    Ok(DimReport {
        family,
        weight,
        symbols,
        lower_symbols: cap,
        lower,
        plateau,
        upper,
        paper,
        notes,
    })
}

/// Conjecture monitor output: informational only, never a hard failure.
#[derive(Clone, Debug)]
pub struct MonitorReport {
    pub name: String,
    pub lines: Vec<String>,
}

impl MonitorReport {
    pub fn render_text(&self) -> String {
        let mut out = format!("monitor {}\n", self.name);
        for l in &self.lines {
            let _ = writeln!(out, "  {l}");
        }
        out
    }
}

pub const MONITORS: &[&str] = &["conj-t21", "conj-t1-odd", "conj-s1-even", "conj-fes-fib", "conj-fmt-fib"];

fn holds_everywhere(rel: &Relation, lo: u64, hi: u64) -> (usize, usize) {
    let primes = admissible(lo, hi, rel.weight());
    let bad = primes
        .par_iter()
        .filter(|&&p| {
            PrimeContext::new(p)
                .ok()
                .and_then(|ctx| rel.eval_at(&ctx).ok())
                .map_or(false, |v| v != 0)
        })
        .count();
    (primes.len(), bad)
}

pub fn conjecture_monitor(name: &str, lo: u64, hi: u64) -> Result<MonitorReport> {
    let mut lines = Vec::new();
    match name {
        "conj-t21" => {
            // T(2,{1}^k) = (-1)^k/2^{k-1} T(1,k+1)
            for k in 0..=5u32 {
                let mut parts = vec![2u32];
                parts.extend(vec![1; k as usize]);
                let lhs = Composition::unsigned(Family::T, parts).unwrap();
                let rhs = Composition::unsigned(Family::T, vec![1, k + 1]).unwrap();
                let mut c = BigRational::new(BigInt::from(1), BigInt::from(2).pow(k.saturating_sub(1)));
                if k == 0 {
                    c = rat(2);
                }
                if k % 2 == 1 {
                    c = -c;
                }
                let mut rel = Relation::new(Provenance::Audit(format!("conj-t21 k={k}")));
                rel.add_sym(lhs, rat(1));
                rel.add_sym(rhs, -c);
                let (n, bad) = holds_everywhere(&rel, lo, hi);
                lines.push(format!(
                    "k={k}: {} over {n} primes",
                    if bad == 0 { "holds" } else { "FAILS" }
                ));
            }
        }
        "conj-t1-odd" => {
            for w in (3..=7u32).step_by(2) {
                let c = BigRational::new(
                    BigInt::from(2).pow(w - 1) - BigInt::from(1),
                    BigInt::from(2).pow(2 * w - 2),
                );
                for (fam, sign) in [(Family::T, 1i64), (Family::S, -1)] {
                    let comp = Composition::unsigned(fam, vec![1; w as usize]).unwrap();
                    let mut rel =
                        Relation::new(Provenance::Audit(format!("conj-t1-odd w={w} {}", fam.prefix())));
                    rel.add_sym(comp, rat(1));
                    rel.add_mono(Monomial::beta(w), -&c * rat(sign));
                    let (n, bad) = holds_everywhere(&rel, lo, hi);
                    lines.push(format!(
                        "w={w} {}: {} over {n} primes",
                        fam.prefix(),
                        if bad == 0 { "holds" } else { "FAILS" }
                    ));
                }
            }
        }
        "conj-s1-even" => {
            for w in [2u32, 4, 6] {
                let target = Node::Sym(Composition::unsigned(Family::S, vec![1; w as usize]).unwrap());
                let basis: Vec<Node> = (1..=w / 2)
                    .map(|j| Node::Sym(Composition::unsigned(Family::S, vec![j, w - j]).unwrap()))
                    .collect();
                match fit_combination(&target, &basis, lo, hi)? {
                    FitOutcome::Fit(coeffs) => {
                        let terms: Vec<String> = basis
                            .iter()
                            .zip(&coeffs)
                            .map(|(b, q)| format!("{}/{}*{}", q.numer(), q.denom(), b.render()))
                            .collect();
                        lines.push(format!("w={w}: fit S({{1}}^{w}) = {}", terms.join(" + ")));
                    }
                    FitOutcome::NoFit { first_violation } => lines.push(format!(
                        "w={w}: NO fit (first violation p={first_violation})"
                    )),
                }
            }
        }
        "conj-fes-fib" => {
            for w in 1..=4u32 {
                let report = dims(Family::Es, w, lo, hi.max(500), None)?;
                let expect = fibonacci(w - 1);
                lines.push(format!(
                    "w={w}: lower={} upper={} expected F_{}={expect}{}",
                    report.lower,
                    report.upper,
                    w - 1,
                    if (report.lower as u64) <= expect && expect <= report.upper as u64 {
                        " (consistent)"
                    } else {
                        " (INCONSISTENT)"
                    }
                ));
            }
        }
        "conj-fmt-fib" => {
            for k in 1..=6u32 {
                let w = 2 * k + 1;
                let lhs = FMT_TABLE[w as usize];
                let rhs = FMT_TABLE[(w - 1) as usize] + FMT_TABLE[(w - 2) as usize];
                lines.push(format!(
                    "w={w}: table {} vs {} + {} = {} ({})",
                    lhs,
                    FMT_TABLE[(w - 1) as usize],
                    FMT_TABLE[(w - 2) as usize],
                    rhs,
                    if lhs == rhs { "holds" } else { "FAILS" }
                ));
            }
        }
        _ => return Err(Error::UnknownSuite(name.to_string())),
    }
    Ok(MonitorReport {
        name: name.to_string(),
        lines,
    })
}

/// Relations export used by the CLI: every generator at a weight.
pub fn relations_at(family: Family, weight: u32) -> RelationSystem {
    match family {
        Family::T | Family::S => t_joint_system(weight),
        Family::At => at_system(weight),
        Family::Es => es_system(weight),
    }
}

/// Default prime ranges.
pub const AUDIT_RANGE: (u64, u64) = (5, 300);
pub const DIMS_RANGE: (u64, u64) = (5, 2000);

// keep the inventory helpers linked for the CLI surface
pub use crate::relgen::admissible_words as _relgen_words;
const _: fn(usize, bool) -> Vec<crate::wordalg::Word> = admissible_words;
