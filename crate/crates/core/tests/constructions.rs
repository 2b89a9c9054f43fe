use std::collections::{BTreeMap, BTreeSet};

use coulomb_glue_core::constructions::{
    build_comet, build_q_partition, partition_gluing_map, partitions_of, Partition, PunctureData,
};
use coulomb_glue_core::gluability::is_gluable;
use coulomb_glue_core::quiver::{DimensionVector, QuiverSpec};

/// Partitions counted by the pentagonal recurrence.
fn partition_count(n: usize) -> usize {
    let mut p = vec![1i64; n + 1];
    for m in 1..=n {
        let mut acc = 0i64;
        for k in 1i64.. {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > m {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc += sign * p[m - g1];
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= m {
                acc += sign * p[m - g2];
            }
        }
        p[m] = acc;
    }
    p[n] as usize
}

/// Undirected union-find tree test, independent of the quiver methods.
fn is_tree(q: &QuiverSpec) -> bool {
    let index: BTreeMap<&str, usize> = q
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let mut parent: Vec<usize> = (0..index.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for e in q.edges() {
        let (a, b) = (
            find(&mut parent, index[e.src.as_str()]),
            find(&mut parent, index[e.dst.as_str()]),
        );
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    q.edges().len() + 1 == index.len()
}

#[test]
fn partitions_are_complete_and_distinct() {
    for n in 1..=8 {
        let all = partitions_of(n);
        let distinct: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), all.len());
        assert_eq!(all.len(), partition_count(n));
        for p in &all {
            assert_eq!(p.iter().sum::<usize>(), n);
            assert!(p.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}

#[test]
fn star_quivers_have_2n_minus_1_vertices_and_are_trees() {
    for n in 2..=8 {
        for parts in partitions_of(n) {
            let (q, d) = build_q_partition(&Partition::new(parts.clone()).unwrap()).unwrap();
            assert_eq!(q.vertices().len(), 2 * n - 1, "{parts:?}");
            assert!(is_tree(&q), "{parts:?}");
            assert_eq!(d.get(&format!("c{}", n - 1)), n - 1);
        }
    }
}

fn leg_sequence(d: &DimensionVector, center: usize, k: usize) -> Vec<usize> {
    let mut seq = vec![center];
    for m in 1.. {
        match d.as_map().get(&format!("L{k}v{m}")) {
            Some(&x) => seq.push(x),
            None => break,
        }
    }
    seq.push(0);
    seq
}

#[test]
fn comet_legs_are_concave() {
    for n in 1..=8 {
        let punctures: Vec<PunctureData> = partitions_of(n)
            .into_iter()
            .map(|p| PunctureData::new(p).unwrap())
            .collect();
        let (q, d) = build_comet(1, n, &punctures).unwrap();
        assert!(q.has_loops());
        for (k, h) in punctures.iter().enumerate() {
            let seq = leg_sequence(&d, n, k + 1);
            // A puncture with l parts gives l - 1 leg vertices.
            assert_eq!(seq.len(), h.parts().len() + 1);
            for m in 1..seq.len() - 1 {
                assert!(
                    2 * seq[m] <= seq[m - 1] + seq[m + 1],
                    "{:?}: {seq:?}",
                    h.parts()
                );
            }
        }
    }
}

#[test]
fn comet_rejects_wrong_puncture_sum() {
    let bad = PunctureData::new(vec![2, 1]).unwrap();
    assert!(build_comet(0, 4, &[bad]).is_err());
}

#[test]
fn partition_pipeline_is_gluable() {
    for parts in [vec![2, 2], vec![2, 1], vec![3, 1]] {
        let g = partition_gluing_map(&Partition::new(parts.clone()).unwrap()).unwrap();
        assert!(g.morphism.is_gluing(), "{parts:?}");
        assert_eq!(g.morphism.target(), &g.star);
        let r = is_gluable(&g.problem(true).unwrap()).unwrap();
        assert!(r.verdict, "{parts:?}");
    }
}
