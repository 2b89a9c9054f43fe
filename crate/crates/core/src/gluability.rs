//! The gluability decision for maps of gauge pairs, with certificates.
//!
//! A problem consists of the weights of `N` on `T̃_G`, the restriction along
//! `T̃_H -> T̃_G` and the inclusion of the gauge torus `T_G -> T̃_G`. A bad
//! pair is two support weights whose restrictions have rational rank at most
//! one and whose signs some cocharacter of `T_G` separates.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_len, validation, Error, Result};
use crate::gaugerep::{
    add_scalar_flavor, descend_torus_map, descend_weights, diagonal_torus_map, quotient_by_scalar,
    weights_of_quiver_rep, WeightMultiset,
};
use crate::lattice::{
    pair, proportional_over_q, rational_string, sign_feasible, CharacterVector, CocharacterVector,
    IntMatrix, TorusData, TorusMap,
};
use crate::quiver::{
    is_dismemberment, parallel_lifting_check, DimensionVector, QuiverMorphism, QuiverSpec,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluabilityProblem {
    weights: WeightMultiset,
    restriction: TorusMap,
    gauge: TorusMap,
}

impl GluabilityProblem {
    /// `restriction: T̃_H -> T̃_G`, `gauge: T_G -> T̃_G`, weights on `T̃_G`.
    pub fn new(weights: WeightMultiset, restriction: TorusMap, gauge: TorusMap) -> Result<Self> {
        let r = restriction.target().rank();
        if weights.rank() != r || gauge.target().rank() != r {
            return Err(validation(format!(
                "torus mismatch: weights on rank {}, restriction into rank {r}, gauge into rank {}",
                weights.rank(),
                gauge.target().rank()
            )));
        }
        Ok(GluabilityProblem {
            weights,
            restriction,
            gauge,
        })
    }

    /// Gauge torus equal to all of `T̃_G`.
    pub fn with_full_gauge(weights: WeightMultiset, restriction: TorusMap) -> Result<Self> {
        let gauge = TorusMap::identity(restriction.target().clone());
        GluabilityProblem::new(weights, restriction, gauge)
    }

    /// Same problem on the split quotients by the diagonal `G_m` on both
    /// sides; the gauge torus becomes the whole quotient of `T̃_G`.
    pub fn quotient_by_scalars(weights: &WeightMultiset, restriction: &TorusMap) -> Result<Self> {
        let source = quotient_by_scalar(restriction.source())?;
        let target = quotient_by_scalar(restriction.target())?;
        let map = descend_torus_map(restriction, &source, &target)?;
        GluabilityProblem::with_full_gauge(descend_weights(weights, &target)?, map)
    }

    pub fn weights(&self) -> &WeightMultiset {
        &self.weights
    }

    pub fn restriction(&self) -> &TorusMap {
        &self.restriction
    }

    pub fn gauge(&self) -> &TorusMap {
        &self.gauge
    }

    /// The same problem with a different gauge inclusion.
    pub fn with_gauge(&self, gauge: TorusMap) -> Result<Self> {
        GluabilityProblem::new(self.weights.clone(), self.restriction.clone(), gauge)
    }
}

/// A bad pair with its certificate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Witness {
    pub xi1: CharacterVector,
    pub xi2: CharacterVector,
    /// `xi1|_H = alpha * xi2|_H`; `None` if `xi2|_H = 0 != xi1|_H`.
    pub alpha: Option<String>,
    pub restricted1: CharacterVector,
    pub restricted2: CharacterVector,
    /// Separating cocharacter of the gauge torus.
    pub mu: CocharacterVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GluabilityReport {
    pub verdict: bool,
    pub witnesses: Vec<Witness>,
    pub injectivity_ok: bool,
    pub injectivity_witnesses: Vec<Witness>,
    pub pairs_checked: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecideOptions {
    /// Worker threads for the pair scan; 0 or 1 runs serially.
    pub threads: usize,
}

fn check_pair(
    p: &GluabilityProblem,
    xi1: &CharacterVector,
    xi2: &CharacterVector,
) -> Result<Option<Witness>> {
    let r1 = p.restriction.restrict_character(xi1)?;
    let r2 = p.restriction.restrict_character(xi2)?;
    let prop = proportional_over_q(&r1, &r2)?;
    if !prop.rank_le_one {
        return Ok(None);
    }
    let g1 = p.gauge.restrict_character(xi1)?;
    let g2 = p.gauge.restrict_character(xi2)?;
    let Some(mu) = sign_feasible(&g1, &g2, p.gauge.source())? else {
        return Ok(None);
    };
    let w = Witness {
        xi1: xi1.clone(),
        xi2: xi2.clone(),
        alpha: prop.alpha.as_ref().map(rational_string),
        restricted1: r1,
        restricted2: r2,
        mu,
    };
    validate_witness(p, &w)?;
    Ok(Some(w))
}

/// Re-check a witness against the raw conditions: all `2 x 2` minors of the
/// restricted pair vanish and `<xi1, mu><xi2, mu> < 0` on the gauge torus.
pub fn validate_witness(p: &GluabilityProblem, w: &Witness) -> Result<()> {
    let (a, b) = (&w.restricted1.0, &w.restricted2.0);
    check_len(a.len(), b.len())?;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if i128::from(a[i]) * i128::from(b[j]) != i128::from(a[j]) * i128::from(b[i]) {
                return Err(Error::Consistency(format!(
                    "witness restrictions {} and {} are not proportional",
                    w.restricted1, w.restricted2
                )));
            }
        }
    }
    let image = p.gauge.push_cocharacter(&w.mu)?;
    let s = i128::from(pair(&w.xi1, &image)?) * i128::from(pair(&w.xi2, &image)?);
    if s >= 0 {
        return Err(Error::Consistency(format!(
            "witness cocharacter {} does not separate {} and {}",
            w.mu, w.xi1, w.xi2
        )));
    }
    Ok(())
}

/// Decide gluability; every bad pair of support weights is reported.
pub fn is_gluable(p: &GluabilityProblem) -> Result<GluabilityReport> {
    is_gluable_with(p, DecideOptions::default())
}

pub fn is_gluable_with(p: &GluabilityProblem, opts: DecideOptions) -> Result<GluabilityReport> {
    let support: Vec<&CharacterVector> = p.weights.support().collect();
    let pairs: Vec<(usize, usize)> = (0..support.len())
        .flat_map(|i| (i..support.len()).map(move |j| (i, j)))
        .collect();
    let scan = |&(i, j): &(usize, usize)| check_pair(p, support[i], support[j]);
    let found: Vec<Option<Witness>> = if opts.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
        pool.install(|| pairs.par_iter().map(scan).collect::<Result<Vec<_>>>())?
    } else {
        pairs.iter().map(scan).collect::<Result<Vec<_>>>()?
    };
    let mut witnesses: Vec<Witness> = found.into_iter().flatten().collect();
    witnesses.sort();
    let injectivity_witnesses: Vec<Witness> = witnesses
        .iter()
        .filter(|w| w.restricted1.is_zero() && w.restricted2.is_zero())
        .cloned()
        .collect();
    Ok(GluabilityReport {
        verdict: witnesses.is_empty(),
        injectivity_ok: injectivity_witnesses.is_empty(),
        witnesses,
        injectivity_witnesses,
        pairs_checked: pairs.len(),
    })
}

/// Extend every torus by the scalar flavor coordinate. The weights get a
/// trailing 1, the gauge torus is unchanged and maps with last coordinate 0.
fn flavored_parts(p: &GluabilityProblem) -> Result<(WeightMultiset, TorusData, TorusMap)> {
    if p.weights.scalar_flavor() {
        return Err(validation("problem already carries the scalar flavor"));
    }
    let weights = add_scalar_flavor(&p.weights)?;
    let target = p.restriction.target().extended(&[1]);
    let mut g = IntMatrix::zeros(target.rank(), p.gauge.source().rank());
    for i in 0..p.gauge.matrix().rows() {
        for j in 0..p.gauge.matrix().cols() {
            g.set(i, j, p.gauge.matrix().get(i, j));
        }
    }
    let gauge = TorusMap::new(p.gauge.source().clone(), target.clone(), g)?;
    Ok((weights, target, gauge))
}

/// Decide `(G̃ × G_m^sc, G)`, where the `H`-side is the flavored torus itself.
///
/// Restrictions are then injective and proportional flavored weights agree in
/// the last coordinate, hence coincide; the verdict is asserted to be true.
pub fn gluable_after_scalar(p: &GluabilityProblem) -> Result<GluabilityReport> {
    let report = is_gluable(&after_scalar_problem(p)?)?;
    if !report.verdict {
        return Err(Error::Consistency(format!(
            "adding the scalar flavor left {} bad pairs",
            report.witnesses.len()
        )));
    }
    Ok(report)
}

/// The problem decided by [`gluable_after_scalar`].
pub fn after_scalar_problem(p: &GluabilityProblem) -> Result<GluabilityProblem> {
    let (weights, target, gauge) = flavored_parts(p)?;
    GluabilityProblem::new(weights, TorusMap::identity(target), gauge)
}

/// Flavored problem keeping the original `H`: the restriction becomes
/// `R ⊕ id` on `T̃_H × G_m`. No verdict is asserted.
pub fn scalar_extension(p: &GluabilityProblem) -> Result<GluabilityProblem> {
    let (weights, target, gauge) = flavored_parts(p)?;
    let source = p.restriction.source().extended(&[1]);
    let matrix = p.restriction.matrix().direct_sum(&IntMatrix::identity(1));
    GluabilityProblem::new(weights, TorusMap::new(source, target, matrix)?, gauge)
}

/// Check that gluability for `p` implies gluability for the gauge torus
/// shrunk along `smaller: T_G' -> T_G`.
pub fn check_shrinking_monotonicity(p: &GluabilityProblem, smaller: &TorusMap) -> Result<bool> {
    check_len(p.gauge.source().rank(), smaller.target().rank())?;
    if smaller.matrix().rank() != smaller.source().rank() {
        return Err(validation(
            "smaller gauge torus does not include into the gauge torus",
        ));
    }
    let large = is_gluable(p)?;
    let small = is_gluable(&p.with_gauge(p.gauge.compose(smaller)?)?)?;
    Ok(!large.verdict || small.verdict)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DismembermentOptions {
    pub quotient_scalar: bool,
    pub normalize_orientation: bool,
    pub threads: usize,
}

/// Gluability problem of a quiver morphism `γ: Q̌ -> Q` along the diagonal
/// map `T_Q -> T_Q̌`, with the weights of `N_Q̌` and full gauge torus.
pub fn problem_for_morphism(
    gamma: &QuiverMorphism,
    dims: &DimensionVector,
    quotient_scalar: bool,
) -> Result<GluabilityProblem> {
    let dims_source = gamma.pull_back_dims(dims)?;
    let map = diagonal_torus_map(gamma, dims, &dims_source)?;
    let weights = weights_of_quiver_rep(gamma.source(), &dims_source)?;
    if quotient_scalar {
        GluabilityProblem::quotient_by_scalars(&weights, &map)
    } else {
        GluabilityProblem::with_full_gauge(weights, map)
    }
}

/// Decide gluability of a dismemberment. When `Q` is loop-free and parallel
/// edges share an orientation and lift to parallel edges, a negative verdict
/// is reported as a consistency failure.
pub fn gluable_for_quiver_dismemberment(
    q: &QuiverSpec,
    dims: &DimensionVector,
    gamma: &QuiverMorphism,
    opts: DismembermentOptions,
) -> Result<GluabilityReport> {
    if gamma.target() != q {
        return Err(validation("dismemberment does not target the given quiver"));
    }
    if !is_dismemberment(gamma) {
        return Err(validation("morphism is not a dismemberment"));
    }
    let gamma = if opts.normalize_orientation {
        gamma.normalize_orientation()?
    } else {
        gamma.clone()
    };
    let problem = problem_for_morphism(&gamma, dims, opts.quotient_scalar)?;
    let report = is_gluable_with(
        &problem,
        DecideOptions {
            threads: opts.threads,
        },
    )?;
    let lifting = parallel_lifting_check(&gamma)?;
    if lifting.lifting_hypotheses_hold() && !report.verdict {
        return Err(Error::Consistency(format!(
            "dismemberment satisfies the parallel lifting hypotheses but has {} bad pairs",
            report.witnesses.len()
        )));
    }
    Ok(report)
}

impl GluabilityReport {
    /// Witness count, zero when gluable.
    pub fn bad_pairs(&self) -> usize {
        self.witnesses.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TorusData;
    use crate::quiver::{finest_dismemberment, Edge};
    use std::collections::BTreeMap;

    fn quiver(vertices: &[&str], edges: &[(&str, &str, &str)]) -> QuiverSpec {
        QuiverSpec::new(
            vertices.iter().map(|s| s.to_string()).collect(),
            edges
                .iter()
                .map(|(i, s, d)| Edge::new(*i, *s, *d))
                .collect(),
        )
        .unwrap()
    }

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    fn cv(v: &[i64]) -> CharacterVector {
        CharacterVector(v.to_vec())
    }

    fn split_parallel() -> (QuiverSpec, DimensionVector, QuiverMorphism) {
        let q = quiver(&["i", "j"], &[("a", "i", "j"), ("b", "i", "j")]);
        let split = quiver(
            &["i1", "j1", "i2", "j2"],
            &[("a", "i1", "j1"), ("b", "i2", "j2")],
        );
        let m = QuiverMorphism::new(
            split,
            q.clone(),
            map(&[("i1", "i"), ("i2", "i"), ("j1", "j"), ("j2", "j")]),
            map(&[("a", "a"), ("b", "b")]),
        )
        .unwrap();
        let d = DimensionVector::from_ordered(&q, &[1, 1]).unwrap();
        (q, d, m)
    }

    #[test]
    fn single_weight_identity_is_gluable() {
        let w = WeightMultiset::from_weights(2, [(cv(&[-1, 1]), 1)]).unwrap();
        let p =
            GluabilityProblem::with_full_gauge(w, TorusMap::identity(TorusData::split(2))).unwrap();
        let r = is_gluable(&p).unwrap();
        assert!(r.verdict && r.injectivity_ok);
        assert_eq!(r.pairs_checked, 1);
    }

    #[test]
    fn parallel_finest_dismemberment_is_gluable() {
        let q = quiver(&["i", "j"], &[("a", "i", "j"), ("b", "i", "j")]);
        let d = DimensionVector::from_ordered(&q, &[1, 1]).unwrap();
        let fd = finest_dismemberment(&q, &d).unwrap();
        let r = gluable_for_quiver_dismemberment(&q, &d, &fd.morphism, Default::default()).unwrap();
        assert!(r.verdict);
    }

    #[test]
    fn split_parallel_is_not_gluable() {
        let (q, d, m) = split_parallel();
        let r = gluable_for_quiver_dismemberment(&q, &d, &m, Default::default()).unwrap();
        assert!(!r.verdict);
        assert!(r.injectivity_ok);
        assert_eq!(r.witnesses.len(), 1);
        let w = &r.witnesses[0];
        assert_eq!(
            (w.xi1.clone(), w.xi2.clone()),
            (cv(&[-1, 1, 0, 0]), cv(&[0, 0, -1, 1]))
        );
        assert_eq!(w.restricted1, cv(&[-1, 1]));
        assert_eq!(w.alpha.as_deref(), Some("1"));
    }

    #[test]
    fn chain_is_gluable_with_and_without_quotient() {
        let q = quiver(&["1", "2", "3"], &[("a", "1", "2"), ("b", "2", "3")]);
        let d = DimensionVector::from_ordered(&q, &[1, 2, 1]).unwrap();
        let fd = finest_dismemberment(&q, &d).unwrap();
        for quotient_scalar in [false, true] {
            let opts = DismembermentOptions {
                quotient_scalar,
                ..Default::default()
            };
            assert!(
                gluable_for_quiver_dismemberment(&q, &d, &fd.morphism, opts)
                    .unwrap()
                    .verdict
            );
        }
    }

    #[test]
    fn loop_identity_is_not_gluable() {
        let q = quiver(&["v"], &[("l", "v", "v")]);
        let d = DimensionVector::from_ordered(&q, &[2]).unwrap();
        let r = gluable_for_quiver_dismemberment(
            &q,
            &d,
            &QuiverMorphism::identity(&q),
            Default::default(),
        )
        .unwrap();
        assert!(!r.verdict);
        let w = &r.witnesses[0];
        assert_eq!((w.xi1.clone(), w.xi2.clone()), (cv(&[-1, 1]), cv(&[1, -1])));
        assert_eq!(w.mu, CocharacterVector(vec![1, 0]));
        assert_eq!(w.alpha.as_deref(), Some("-1"));
    }

    #[test]
    fn opposite_parallel_edges_need_normalization() {
        let q = quiver(&["i", "j"], &[("a", "i", "j"), ("b", "j", "i")]);
        let d = DimensionVector::from_ordered(&q, &[1, 1]).unwrap();
        let r = gluable_for_quiver_dismemberment(
            &q,
            &d,
            &QuiverMorphism::identity(&q),
            Default::default(),
        )
        .unwrap();
        assert!(!r.verdict);
        let opts = DismembermentOptions {
            normalize_orientation: true,
            ..Default::default()
        };
        let r =
            gluable_for_quiver_dismemberment(&q, &d, &QuiverMorphism::identity(&q), opts).unwrap();
        assert!(r.verdict);
    }

    #[test]
    fn zero_restrictions_break_injectivity() {
        // Restriction from a rank-0 torus kills everything.
        let w = WeightMultiset::from_weights(2, [(cv(&[-1, 1]), 1), (cv(&[1, -1]), 1)]).unwrap();
        let restriction = TorusMap::new(
            TorusData::split(0),
            TorusData::split(2),
            IntMatrix::zeros(2, 0),
        )
        .unwrap();
        let p = GluabilityProblem::with_full_gauge(w, restriction).unwrap();
        let r = is_gluable(&p).unwrap();
        assert!(!r.verdict && !r.injectivity_ok);
        assert_eq!(r.injectivity_witnesses.len(), 1);
    }

    #[test]
    fn scalar_flavor_restores_gluability() {
        let (q, d, m) = split_parallel();
        let p = problem_for_morphism(&m, &d, false).unwrap();
        assert!(!is_gluable(&p).unwrap().verdict);
        assert!(gluable_after_scalar(&p).unwrap().verdict);
        // Keeping the original H side does not help for this example.
        let ext = scalar_extension(&p).unwrap();
        assert!(!is_gluable(&ext).unwrap().verdict);
        let empty = GluabilityProblem::with_full_gauge(
            WeightMultiset::empty(2),
            TorusMap::identity(TorusData::split(2)),
        )
        .unwrap();
        assert!(gluable_after_scalar(&empty).unwrap().verdict);
        let _ = q;
    }

    #[test]
    fn shrinking_examples() {
        let (_, d, m) = split_parallel();
        let p = problem_for_morphism(&m, &d, false).unwrap();
        let full = TorusMap::identity(p.gauge().source().clone());
        assert!(check_shrinking_monotonicity(&p, &full).unwrap());
        let zero = TorusMap::new(
            TorusData::split(0),
            p.gauge().source().clone(),
            IntMatrix::zeros(4, 0),
        )
        .unwrap();
        assert!(check_shrinking_monotonicity(&p, &zero).unwrap());
        let small = p.with_gauge(p.gauge().compose(&zero).unwrap()).unwrap();
        assert!(is_gluable(&small).unwrap().verdict);
        let not_injective = TorusMap::new(
            TorusData::split(2),
            p.gauge().source().clone(),
            IntMatrix::zeros(4, 2),
        )
        .unwrap();
        assert!(matches!(
            check_shrinking_monotonicity(&p, &not_injective),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn threaded_scan_matches_serial() {
        let (_, d, m) = split_parallel();
        let p = problem_for_morphism(&m, &d, false).unwrap();
        let serial = is_gluable(&p).unwrap();
        let threaded = is_gluable_with(&p, DecideOptions { threads: 4 }).unwrap();
        assert_eq!(serial, threaded);
    }

    #[test]
    fn mismatched_tori_rejected() {
        let w = WeightMultiset::from_weights(3, [(cv(&[-1, 1, 0]), 1)]).unwrap();
        let r = GluabilityProblem::with_full_gauge(w, TorusMap::identity(TorusData::split(2)));
        assert!(matches!(r, Err(Error::Validation(_))));
    }
}
