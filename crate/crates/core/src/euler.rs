//! Euler-class factors per coweight and the exactness verdicts built on them.
//!
//! For a cocharacter `λ` of `T̃_G` the weights with `<λ,ξ> < 0` give the left
//! factor `φ_ℓ` and those with `<λ,ξ> > 0` the right factor `φ_r`, each with
//! multiplicity `|<λ,ξ>|` times the weight multiplicity. A homological factor
//! is the linear form `ξ^m`, a K-theoretic one is `(1 - ξ^{-1})^m`.
//!
//! Two restricted factors share an irreducible factor exactly when their
//! characters are nonzero and proportional over `Q`. For linear forms this is
//! immediate. For binomials write `χ1 = χ0^a`, `χ2 = χ0^b` with `χ0` primitive;
//! `1 - χ^{-k}` factors into cyclotomic pieces in `χ0` and always contains
//! `1 - χ0^{-1}` up to a unit, while non-proportional primitive characters give
//! coprime binomials in the Laurent ring. The same predicate therefore serves
//! both kinds.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{check_len, Result};
use crate::gaugerep::WeightMultiset;
use crate::gluability::{is_gluable, GluabilityProblem};
use crate::lattice::{
    dominantize, is_dominant, pair, proportional_over_q, CharacterVector, CocharacterVector,
    TorusData, TorusMap,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    Homological,
    KTheoretic,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Factor {
    /// The weight of `N` this factor comes from.
    pub weight: CharacterVector,
    /// Its character on the current torus (after any restriction).
    pub character: CharacterVector,
    pub multiplicity: u64,
    /// The factor is the zero function.
    pub vanishes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorProduct {
    pub kind: FactorKind,
    pub factors: Vec<Factor>,
}

impl FactorProduct {
    pub fn is_zero(&self) -> bool {
        self.factors.iter().any(|f| f.vanishes)
    }

    pub fn degree(&self) -> u64 {
        self.factors.iter().map(|f| f.multiplicity).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

fn factors_of_kind(
    w: &WeightMultiset,
    lambda: &CocharacterVector,
    kind: FactorKind,
) -> Result<(FactorProduct, FactorProduct)> {
    check_len(w.rank(), lambda.len())?;
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for e in w.entries() {
        let p = pair(&e.weight, lambda)?;
        if p == 0 {
            continue;
        }
        let multiplicity = p.unsigned_abs().saturating_mul(e.multiplicity);
        let f = Factor {
            weight: e.weight.clone(),
            character: e.weight.clone(),
            multiplicity,
            vanishes: e.weight.is_zero(),
        };
        if p < 0 {
            left.push(f);
        } else {
            right.push(f);
        }
    }
    Ok((
        FactorProduct {
            kind,
            factors: left,
        },
        FactorProduct {
            kind,
            factors: right,
        },
    ))
}

/// Homological factors `(φ_ℓ, φ_r)` at `λ`.
pub fn euler_factors(
    w: &WeightMultiset,
    lambda: &CocharacterVector,
) -> Result<(FactorProduct, FactorProduct)> {
    factors_of_kind(w, lambda, FactorKind::Homological)
}

/// K-theoretic factors `(1 - ξ^{-1})^m` with the same selection rule.
pub fn k_theoretic_factors(
    w: &WeightMultiset,
    lambda: &CocharacterVector,
) -> Result<(FactorProduct, FactorProduct)> {
    factors_of_kind(w, lambda, FactorKind::KTheoretic)
}

/// Restrict every factor along `restriction`; zero characters (for the
/// K-theoretic kind, trivial characters) make the factor vanish.
pub fn restrict_factors(phi: &FactorProduct, restriction: &TorusMap) -> Result<FactorProduct> {
    let factors = phi
        .factors
        .iter()
        .map(|f| {
            let character = restriction.restrict_character(&f.character)?;
            Ok(Factor {
                vanishes: character.is_zero(),
                character,
                ..f.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FactorProduct {
        kind: phi.kind,
        factors,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaVerdict {
    pub lambda: CocharacterVector,
    pub kind: FactorKind,
    pub left_nonzero: bool,
    pub right_nonzero: bool,
    /// Contributing weights (left, right) with proportional nonzero restrictions.
    pub common_factor: Option<(CharacterVector, CharacterVector)>,
    pub exact: bool,
    pub left_degree: u64,
    pub right_degree: u64,
}

/// Exactness at `λ`: both restricted products nonzero and coprime.
pub fn lambda_verdict(
    w: &WeightMultiset,
    lambda: &CocharacterVector,
    restriction: &TorusMap,
    kind: FactorKind,
) -> Result<LambdaVerdict> {
    let (l, r) = factors_of_kind(w, lambda, kind)?;
    let (l, r) = (
        restrict_factors(&l, restriction)?,
        restrict_factors(&r, restriction)?,
    );
    let mut common_factor = None;
    'search: for a in l.factors.iter().filter(|f| !f.vanishes) {
        for b in r.factors.iter().filter(|f| !f.vanishes) {
            if proportional_over_q(&a.character, &b.character)?.rank_le_one {
                common_factor = Some((a.weight.clone(), b.weight.clone()));
                break 'search;
            }
        }
    }
    let (left_nonzero, right_nonzero) = (!l.is_zero(), !r.is_zero());
    Ok(LambdaVerdict {
        lambda: lambda.clone(),
        kind,
        left_nonzero,
        right_nonzero,
        exact: left_nonzero && right_nonzero && common_factor.is_none(),
        common_factor,
        left_degree: l.degree(),
        right_degree: r.degree(),
    })
}

/// Dominant cocharacters with entries in `[-bound, bound]`, ascending in
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct DominantIter {
    block_start: Vec<bool>,
    bound: i64,
    next: Option<Vec<i64>>,
}

impl Iterator for DominantIter {
    type Item = CocharacterVector;

    fn next(&mut self) -> Option<CocharacterVector> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut k = succ.len();
        while k > 0 {
            k -= 1;
            let cap = if self.block_start[k] {
                self.bound
            } else {
                succ[k - 1].min(self.bound)
            };
            if succ[k] < cap {
                succ[k] += 1;
                for x in &mut succ[k + 1..] {
                    *x = -self.bound;
                }
                self.next = Some(succ);
                break;
            }
        }
        Some(CocharacterVector(current))
    }
}

pub fn enumerate_dominant(torus: &TorusData, bound: u32) -> DominantIter {
    let mut block_start = vec![false; torus.rank()];
    for r in torus.block_ranges() {
        if let Some(first) = block_start.get_mut(r.start) {
            *first = true;
        }
    }
    let bound = i64::from(bound);
    DominantIter {
        block_start,
        bound,
        next: Some(vec![-bound; torus.rank()]),
    }
}

/// Number of dominant cocharacters in the box, saturating.
pub fn count_dominant(torus: &TorusData, bound: u32) -> u128 {
    let values = 2 * u128::from(bound) + 1;
    torus.blocks().iter().fold(1u128, |acc, &n| {
        // Multisets of size n from `values` values.
        let mut c = 1u128;
        for i in 0..n as u128 {
            c = c.saturating_mul(values + i) / (i + 1);
        }
        acc.saturating_mul(c)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossCheckOptions {
    pub bound: u32,
    /// Enumerate every dominant `λ` when there are at most this many.
    pub full_enumeration_cap: u128,
    /// Largest box a single localized search may scan.
    pub local_search_cap: u128,
    /// Keep every computed verdict in the report.
    pub record_verdicts: bool,
}

impl Default for CrossCheckOptions {
    fn default() -> Self {
        CrossCheckOptions {
            bound: 2,
            full_enumeration_cap: 100_000,
            local_search_cap: 2_000_000,
            record_verdicts: false,
        }
    }
}

/// Verdicts at a gluability witness and at its dominant representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessCheck {
    pub mu: CocharacterVector,
    pub dominant: CocharacterVector,
    pub exact_at_witness: bool,
    pub exact_at_dominant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub gluable: bool,
    pub bound: u32,
    pub consistent: bool,
    /// Every dominant `λ` in the box is covered, either enumerated or by the
    /// localized search.
    pub complete_up_to_bound: bool,
    pub full_enumeration: bool,
    pub lambdas_checked: usize,
    pub witness_checks: Vec<WitnessCheck>,
    pub discrepancies: Vec<String>,
    pub verdicts: Vec<LambdaVerdict>,
}

const KINDS: [FactorKind; 2] = [FactorKind::Homological, FactorKind::KTheoretic];

/// Compare the gluability decision with the per-coweight verdicts.
///
/// Not gluable: each witness `μ` must be non-exact; `μ` lies in the Weyl
/// orbit of its dominant representative, whose verdict is recorded too.
/// Gluable: every dominant `λ` with entries in `[-bound, bound]` must be exact.
/// Non-exactness at `λ` only depends on the coordinates a weight or a pair of
/// weights pairs with, so the box is covered by enumerating dominant partial
/// assignments on those coordinates and extending them.
pub fn cross_check(p: &GluabilityProblem, opts: CrossCheckOptions) -> Result<CrossCheckReport> {
    let report = is_gluable(p)?;
    let (w, gauge, restriction) = (p.weights(), p.gauge(), p.restriction());
    let mut out = CrossCheckReport {
        gluable: report.verdict,
        bound: opts.bound,
        consistent: true,
        complete_up_to_bound: true,
        full_enumeration: false,
        lambdas_checked: 0,
        witness_checks: Vec::new(),
        discrepancies: Vec::new(),
        verdicts: Vec::new(),
    };
    let check = |out: &mut CrossCheckReport, mu: &CocharacterVector| -> Result<bool> {
        let lambda = gauge.push_cocharacter(mu)?;
        let mut exact = true;
        for kind in KINDS {
            let v = lambda_verdict(w, &lambda, restriction, kind)?;
            exact &= v.exact;
            if opts.record_verdicts {
                out.verdicts.push(v);
            }
        }
        out.lambdas_checked += 1;
        Ok(exact)
    };

    if !report.verdict {
        for wit in &report.witnesses {
            let dominant = dominantize(&wit.mu, gauge.source())?;
            let exact_at_witness = check(&mut out, &wit.mu)?;
            let exact_at_dominant = check(&mut out, &dominant)?;
            if exact_at_witness {
                out.discrepancies.push(format!(
                    "witness {} for ({}, {}) gives an exact coweight",
                    wit.mu, wit.xi1, wit.xi2
                ));
            }
            out.witness_checks.push(WitnessCheck {
                mu: wit.mu.clone(),
                dominant,
                exact_at_witness,
                exact_at_dominant,
            });
        }
    } else {
        let torus = gauge.source();
        let mut candidates: BTreeSet<CocharacterVector> = BTreeSet::new();
        if count_dominant(torus, opts.bound) <= opts.full_enumeration_cap {
            out.full_enumeration = true;
            candidates.extend(enumerate_dominant(torus, opts.bound));
        } else {
            for form in critical_forms(p)? {
                match localized_candidates(torus, opts, &form)? {
                    Some(found) => candidates.extend(found),
                    None => out.complete_up_to_bound = false,
                }
            }
            candidates.insert(CocharacterVector::zero(torus.rank()));
        }
        for lambda in &candidates {
            if !check(&mut out, lambda)? {
                out.discrepancies.push(format!(
                    "gluable problem is not exact at dominant coweight {lambda}"
                ));
            }
        }
    }
    out.consistent = out.discrepancies.is_empty();
    Ok(out)
}

/// Gauge-side forms whose sign pattern can break exactness: a single weight
/// restricting to zero, or two weights with nonzero proportional
/// restrictions. The second form is absent for single weights.
fn critical_forms(
    p: &GluabilityProblem,
) -> Result<Vec<(CharacterVector, Option<CharacterVector>)>> {
    let (gauge, restriction) = (p.gauge(), p.restriction());
    let support: Vec<&CharacterVector> = p.weights().support().collect();
    let restricted = support
        .iter()
        .map(|x| restriction.restrict_character(x))
        .collect::<Result<Vec<_>>>()?;
    let mut forms = Vec::new();
    for (i, xi) in support.iter().enumerate() {
        if restricted[i].is_zero() {
            forms.push((gauge.restrict_character(xi)?, None));
            continue;
        }
        for j in i + 1..support.len() {
            if !restricted[j].is_zero()
                && proportional_over_q(&restricted[i], &restricted[j])?.rank_le_one
            {
                let g1 = gauge.restrict_character(xi)?;
                let g2 = gauge.restrict_character(support[j])?;
                forms.push((g1, Some(g2)));
            }
        }
    }
    Ok(forms)
}

/// Dominant `λ` in the box on which the form is active (a zero-restricting
/// weight pairs nonzero, or the two weights have opposite signs), one per
/// partial assignment on the form's coordinates. `None` if the local box is
/// larger than the cap.
fn localized_candidates(
    torus: &TorusData,
    opts: CrossCheckOptions,
    form: &(CharacterVector, Option<CharacterVector>),
) -> Result<Option<Vec<CocharacterVector>>> {
    let (g1, g2) = form;
    let coords: Vec<usize> = (0..torus.rank())
        .filter(|&k| g1.0[k] != 0 || g2.as_ref().is_some_and(|g| g.0[k] != 0))
        .collect();
    let side = 2 * u128::from(opts.bound) + 1;
    let size = side.checked_pow(coords.len() as u32).unwrap_or(u128::MAX);
    if size > opts.local_search_cap {
        return Ok(None);
    }
    let block_of: Vec<usize> = torus
        .block_ranges()
        .enumerate()
        .flat_map(|(b, r)| r.map(move |_| b))
        .collect();
    let b = i64::from(opts.bound);
    let mut values = vec![-b; coords.len()];
    let mut found = Vec::new();
    loop {
        let dominant_partial = coords
            .windows(2)
            .zip(values.windows(2))
            .all(|(k, v)| block_of[k[0]] != block_of[k[1]] || v[0] >= v[1]);
        if dominant_partial {
            let lambda = extend_partial(torus, b, &coords, &values);
            let s1 = pair(g1, &lambda)?;
            let active = match g2 {
                None => s1 != 0,
                Some(g2) => i128::from(s1) * i128::from(pair(g2, &lambda)?) < 0,
            };
            if active {
                debug_assert!(is_dominant(&lambda, torus));
                found.push(lambda);
            }
        }
        // Odometer over [-b, b]^coords.
        let mut k = values.len();
        loop {
            if k == 0 {
                return Ok(Some(found));
            }
            k -= 1;
            if values[k] < b {
                values[k] += 1;
                break;
            }
            values[k] = -b;
        }
    }
}

/// Fill the remaining coordinates so the result is dominant: before the first
/// assigned coordinate of a block use `b`, after it repeat the last assigned
/// value (or `-b` past the last one); untouched blocks are zero.
fn extend_partial(
    torus: &TorusData,
    b: i64,
    coords: &[usize],
    values: &[i64],
) -> CocharacterVector {
    let mut lambda = vec![0; torus.rank()];
    let assigned = |k: usize| coords.binary_search(&k).ok().map(|i| values[i]);
    for r in torus.block_ranges() {
        if !r.clone().any(|k| assigned(k).is_some()) {
            continue;
        }
        let last_assigned = r
            .clone()
            .rev()
            .find(|&k| assigned(k).is_some())
            .expect("nonempty");
        let mut prev: Option<i64> = None;
        for k in r {
            lambda[k] = match (assigned(k), prev) {
                (Some(v), _) => v,
                (None, None) => b,
                (None, Some(_)) if k > last_assigned => -b,
                (None, Some(p)) => p,
            };
            if assigned(k).is_some() {
                prev = assigned(k);
            }
        }
    }
    CocharacterVector(lambda)
}
