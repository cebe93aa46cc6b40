//! Grouping bound levels across sectors into SO(3) multiplets.
//!
//! Levels are clustered by energy alone. For each cluster the per-sector
//! count `n(j_z)` is decomposed into irreps: the number of irreps with
//! `j = |j_z|` is `n(|j_z|) - n(|j_z| + 1)`. At the top of the covered range
//! the decomposition only gives a lower bound on `j`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::predict::{match_level, LevelMatch};
use super::solve::Spectrum;
use crate::{Error, InteractionSpec, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Member {
    pub two_jz: i32,
    pub level_index: usize,
    pub energy: f64,
    pub pair_two_k: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IrrepCount {
    pub two_j: i32,
    pub count: usize,
    /// The irrep reaches the edge of the covered sectors, so only `j ≥ two_j/2`
    /// is known.
    pub lower_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Multiplet {
    pub energy: f64,
    /// Largest `|E - mean| / |mean|` over members.
    pub spread: f64,
    pub members: Vec<Member>,
    /// `(two_jz, count)` over every covered sector.
    pub counts: Vec<(i32, usize)>,
    pub irreps: Vec<IrrepCount>,
    /// Smallest `2j` in the decomposition.
    pub inferred_two_j: Option<i32>,
    /// Whether `inferred_two_j` is only a lower bound.
    pub lower_bound: bool,
    /// False when the counts cannot come from a sum of `2j+1` ladders.
    pub consistent: bool,
    pub predicted: Option<LevelMatch>,
    /// Distinct `2|k|` of the channel pairs contributing members.
    pub pair_labels: Vec<i32>,
    /// More than one channel pair (or predicted `(j, k)`) fits the level.
    pub ambiguous: bool,
}

impl Multiplet {
    pub fn sectors(&self) -> Vec<i32> {
        let mut s: Vec<i32> = self.members.iter().map(|m| m.two_jz).collect();
        s.dedup();
        s
    }

    pub fn members_in(&self, two_jz: i32) -> impl Iterator<Item = &Member> {
        self.members.iter().filter(move |m| m.two_jz == two_jz)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracyReport {
    pub covered_two_jz: Vec<i32>,
    pub rel_tol: f64,
    pub multiplets: Vec<Multiplet>,
}

pub fn degeneracy_report(
    spectra: &[Spectrum],
    spec: &InteractionSpec,
    rel_tol: f64,
) -> Result<DegeneracyReport> {
    if let Some(first) = spectra.first() {
        for s in spectra {
            if s.grid != first.grid || s.sector.mass != first.sector.mass || s.sector.two_s != spec.two_s() {
                return Err(Error::InvalidParameter(
                    "spectra must share grid, mass and spin".into(),
                ));
            }
        }
    }
    let mut covered: Vec<i32> = spectra.iter().map(|s| s.two_jz()).collect();
    covered.sort_unstable();
    covered.dedup();
    let mass = spectra.first().map_or(1.0, |s| s.sector.mass);

    let mut all: Vec<Member> = spectra
        .iter()
        .flat_map(|s| {
            s.states.iter().enumerate().map(move |(i, st)| Member {
                two_jz: s.two_jz(),
                level_index: i,
                energy: st.energy,
                pair_two_k: st.pair_two_k,
            })
        })
        .collect();
    all.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.two_jz.cmp(&b.two_jz)));

    let mut clusters: Vec<Vec<Member>> = Vec::new();
    for m in all {
        match clusters.last_mut() {
            Some(c) if ((m.energy - c[0].energy) / c[0].energy).abs() <= rel_tol => c.push(m),
            _ => clusters.push(vec![m]),
        }
    }

    let multiplets = clusters
        .into_iter()
        .map(|mut members| {
            members.sort_by_key(|m| (m.two_jz, m.level_index));
            build_multiplet(members, &covered, spec, mass, rel_tol)
        })
        .collect();
    Ok(DegeneracyReport {
        covered_two_jz: covered,
        rel_tol,
        multiplets,
    })
}

fn build_multiplet(
    members: Vec<Member>,
    covered: &[i32],
    spec: &InteractionSpec,
    mass: f64,
    rel_tol: f64,
) -> Multiplet {
    let energy = members.iter().map(|m| m.energy).sum::<f64>() / members.len() as f64;
    let spread = members
        .iter()
        .map(|m| ((m.energy - energy) / energy).abs())
        .fold(0.0, f64::max);

    let mut count_map: BTreeMap<i32, usize> = covered.iter().map(|&t| (t, 0)).collect();
    for m in &members {
        *count_map.entry(m.two_jz).or_default() += 1;
    }
    let counts: Vec<(i32, usize)> = count_map.iter().map(|(k, v)| (*k, *v)).collect();

    let (irreps, consistent) = decompose(&count_map);
    let inferred = irreps.first().copied();

    let mut pair_labels: Vec<i32> = members.iter().map(|m| m.pair_two_k).collect();
    pair_labels.sort_unstable_by(|a, b| b.cmp(a));
    pair_labels.dedup();

    let floor = inferred.map_or(0, |i| i.two_j);
    let predicted = match_level(spec, mass, floor, energy, None);
    let mut consistent = consistent;
    if let (Some(ir), Some(p)) = (inferred, predicted) {
        if !ir.lower_bound && p.two_j != ir.two_j {
            consistent = false;
        }
    }
    let alternatives = pair_labels
        .iter()
        .filter_map(|&k| match_level(spec, mass, floor, energy, Some(k)))
        .filter(|m| m.rel_err <= rel_tol.max(10.0 * spread))
        .count();

    Multiplet {
        energy,
        spread,
        members,
        counts,
        inferred_two_j: inferred.map(|i| i.two_j),
        lower_bound: inferred.is_some_and(|i| i.lower_bound),
        irreps,
        consistent,
        predicted,
        ambiguous: pair_labels.len() > 1 || alternatives > 1,
        pair_labels,
    }
}

/// Split per-sector counts into irreps. Counts are read at `|j_z|`, from the
/// non-negative sector when covered and its mirror otherwise.
fn decompose(counts: &BTreeMap<i32, usize>) -> (Vec<IrrepCount>, bool) {
    let mut consistent = true;
    let mut by_abs: BTreeMap<i32, usize> = BTreeMap::new();
    for (&two_jz, &n) in counts {
        let key = two_jz.abs();
        match by_abs.get(&key) {
            Some(&prev) if prev != n => {
                consistent = false;
                by_abs.insert(key, prev.max(n));
            }
            _ => {
                by_abs.insert(key, n);
            }
        }
    }
    let keys: Vec<i32> = by_abs.keys().copied().collect();
    let mut irreps = Vec::new();
    for (idx, &key) in keys.iter().enumerate() {
        let n = by_abs[&key];
        let next = keys.get(idx + 1).filter(|&&nk| nk == key + 2).map(|nk| by_abs[nk]);
        match next {
            Some(above) => {
                if above > n {
                    consistent = false;
                } else if n > above {
                    irreps.push(IrrepCount {
                        two_j: key,
                        count: n - above,
                        lower_bound: false,
                    });
                }
            }
            None => {
                if n > 0 {
                    irreps.push(IrrepCount {
                        two_j: key,
                        count: n,
                        lower_bound: true,
                    });
                }
                // a gap in coverage ends what can be decomposed
                break;
            }
        }
    }
    (irreps, consistent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(pairs: &[(i32, usize)]) -> BTreeMap<i32, usize> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn spin_half_ground_irrep() {
        let (ir, ok) = decompose(&counts(&[(-3, 0), (-1, 1), (1, 1), (3, 0)]));
        assert!(ok);
        assert_eq!(
            ir,
            vec![IrrepCount {
                two_j: 1,
                count: 1,
                lower_bound: false
            }]
        );
    }

    #[test]
    fn edge_gives_lower_bound() {
        let (ir, ok) = decompose(&counts(&[(-3, 1), (-1, 1), (1, 1), (3, 1)]));
        assert!(ok);
        assert_eq!(
            ir,
            vec![IrrepCount {
                two_j: 3,
                count: 1,
                lower_bound: true
            }]
        );
    }

    #[test]
    fn merged_towers() {
        // j = 1/2 and j = 3/2 at one energy
        let (ir, ok) = decompose(&counts(&[(-3, 1), (-1, 2), (1, 2), (3, 1), (5, 0)]));
        assert!(ok);
        assert_eq!(ir.len(), 2);
        assert_eq!((ir[0].two_j, ir[0].count), (1, 1));
        assert_eq!((ir[1].two_j, ir[1].count, ir[1].lower_bound), (3, 1, false));
    }

    #[test]
    fn inconsistent_counts_flagged() {
        let (_, ok) = decompose(&counts(&[(-1, 0), (1, 1), (3, 1)]));
        assert!(!ok);
        let (_, ok) = decompose(&counts(&[(1, 0), (3, 1), (5, 0)]));
        assert!(!ok);
    }
}
