//! Redundancy lattices of antichains over up to four predictors, and
//! Möbius inversion over any finite poset.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;

pub const MAX_PREDICTORS: usize = 4;

/// A non-empty set of predictors, as a bitmask (bit `i` = predictor `i`).
pub type SourceSet = u8;

fn is_subset(a: SourceSet, b: SourceSet) -> bool {
    a & !b == 0
}

/// A collection of source sets none of which contains another.
///
/// Stored canonically: sources sorted by size, then by their sorted member
/// lists, so equal antichains compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Antichain(Vec<SourceSet>);

fn members(s: SourceSet) -> Vec<usize> {
    (0..8).filter(|i| s >> i & 1 == 1).collect()
}

impl Antichain {
    /// Canonicalize and validate.
    pub fn new(mut sources: Vec<SourceSet>) -> Result<Self> {
        if sources.is_empty() || sources.contains(&0) {
            return Err(Error::InvalidParameter("antichain needs non-empty sources".into()));
        }
        sources.sort_by_key(|&s| (s.count_ones(), members(s)));
        sources.dedup();
        for (i, &a) in sources.iter().enumerate() {
            for &b in &sources[i + 1..] {
                if is_subset(a, b) || is_subset(b, a) {
                    return Err(Error::InvalidParameter(format!(
                        "{} and {} are nested",
                        fmt_source(a),
                        fmt_source(b)
                    )));
                }
            }
        }
        Ok(Self(sources))
    }

    /// Build from 0-based predictor index lists, e.g. `[[0], [1]]`.
    pub fn from_indices(sources: &[&[usize]]) -> Result<Self> {
        let mut masks = Vec::with_capacity(sources.len());
        for s in sources {
            let mut m = 0u8;
            for &i in s.iter() {
                if i >= MAX_PREDICTORS {
                    return Err(Error::TooLarge(format!("predictor index {i}")));
                }
                m |= 1 << i;
            }
            masks.push(m);
        }
        Self::new(masks)
    }

    /// Parse the display form, e.g. `{1}{2}` or `{12}`; predictors are 1-based.
    pub fn parse(text: &str) -> Result<Self> {
        let mut masks = Vec::new();
        let mut current: Option<u8> = None;
        for c in text.chars().filter(|c| !c.is_whitespace()) {
            match (c, current) {
                ('{', None) => current = Some(0),
                ('}', Some(m)) => {
                    masks.push(m);
                    current = None;
                }
                (d, Some(m)) if d.is_ascii_digit() => {
                    let i = d.to_digit(10).unwrap() as usize;
                    if i == 0 || i > MAX_PREDICTORS {
                        return Err(Error::InvalidParameter(format!("bad predictor {d} in {text}")));
                    }
                    current = Some(m | 1 << (i - 1));
                }
                (',', Some(_)) => {}
                _ => return Err(Error::InvalidParameter(format!("cannot parse antichain {text}"))),
            }
        }
        if current.is_some() {
            return Err(Error::InvalidParameter(format!("unclosed brace in {text}")));
        }
        Self::new(masks)
    }

    pub fn sources(&self) -> &[SourceSet] {
        &self.0
    }

    /// Source sets as 0-based predictor index lists.
    pub fn source_indices(&self) -> Vec<Vec<usize>> {
        self.0.iter().map(|&s| members(s)).collect()
    }

    /// `self ≼ other`: every source of `other` contains some source of `self`.
    pub fn precedes(&self, other: &Antichain) -> bool {
        other
            .0
            .iter()
            .all(|&b| self.0.iter().any(|&a| is_subset(a, b)))
    }

    /// Union of all predictors mentioned.
    pub fn support(&self) -> SourceSet {
        self.0.iter().fold(0, |m, &s| m | s)
    }
}

fn fmt_source(s: SourceSet) -> String {
    let digits: String = members(s).iter().map(|i| char::from(b'1' + *i as u8)).collect();
    format!("{{{digits}}}")
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(&fmt_source(s))?;
        }
        Ok(())
    }
}

/// A finite poset given by strict down-sets, processed bottom-up.
pub trait Poset {
    fn len(&self) -> usize;
    /// Indices strictly below element `i`.
    fn strictly_below(&self, i: usize) -> &[usize];
}

/// Partial values `f∂(α) = f(α) - Σ_{β ≺ α} f∂(β)`.
///
/// Elements are visited in order of down-set size, which is a linear
/// extension of the order.
pub fn moebius<P: Poset + ?Sized>(poset: &P, values: &[f64]) -> Result<Vec<f64>> {
    if values.len() != poset.len() {
        return Err(Error::InvalidParameter(format!(
            "{} values for {} lattice elements",
            values.len(),
            poset.len()
        )));
    }
    let mut order: Vec<usize> = (0..poset.len()).collect();
    order.sort_by_key(|&i| poset.strictly_below(i).len());
    let mut partial = vec![0.0; values.len()];
    for i in order {
        partial[i] = values[i] - poset.strictly_below(i).iter().map(|&j| partial[j]).sum::<f64>();
    }
    Ok(partial)
}

/// Cumulative sums over down-sets; inverse of [`moebius`].
pub fn cumulate<P: Poset + ?Sized>(poset: &P, partial: &[f64]) -> Vec<f64> {
    (0..poset.len())
        .map(|i| partial[i] + poset.strictly_below(i).iter().map(|&j| partial[j]).sum::<f64>())
        .collect()
}

/// All antichains over `n` predictors with the redundancy order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundancyLattice {
    n: usize,
    atoms: Vec<Antichain>,
    below: Vec<Vec<usize>>,
}

impl Poset for RedundancyLattice {
    fn len(&self) -> usize {
        self.atoms.len()
    }

    fn strictly_below(&self, i: usize) -> &[usize] {
        &self.below[i]
    }
}

impl RedundancyLattice {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Antichain] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, atom: &Antichain) -> Option<usize> {
        self.atoms.iter().position(|a| a == atom)
    }

    /// Index of the atom where every predictor is a separate source.
    pub fn bottom(&self) -> usize {
        self.below.iter().position(Vec::is_empty).expect("lattice has a bottom")
    }

    /// Index of the atom with all predictors in one source.
    pub fn top(&self) -> usize {
        let full = Antichain(vec![((1u16 << self.n) - 1) as u8]);
        self.index_of(&full).expect("lattice has a top")
    }

    fn build(n: usize) -> Self {
        let sources: Vec<SourceSet> = (1..(1u16 << n)).map(|m| m as u8).collect();
        let mut atoms = Vec::new();
        for family in 1u32..(1 << sources.len()) {
            let chosen: Vec<SourceSet> = (0..sources.len())
                .filter(|i| family >> i & 1 == 1)
                .map(|i| sources[i])
                .collect();
            if let Ok(a) = Antichain::new(chosen) {
                atoms.push(a);
            }
        }
        atoms.sort_by(|a, b| {
            let key = |x: &Antichain| (std::cmp::Reverse(x.0.len()), x.0.iter().map(|s| s.count_ones()).sum::<u32>());
            key(a).cmp(&key(b)).then_with(|| a.cmp(b))
        });
        let below = atoms
            .iter()
            .map(|a| {
                (0..atoms.len())
                    .filter(|&j| atoms[j] != *a && atoms[j].precedes(a))
                    .collect()
            })
            .collect();
        Self { n, atoms, below }
    }
}

/// The lattice over `n` predictors, built once and cached.
pub fn build_lattice(n: usize) -> Result<&'static RedundancyLattice> {
    static CACHE: [OnceLock<RedundancyLattice>; MAX_PREDICTORS] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if n == 0 || n > MAX_PREDICTORS {
        return Err(Error::TooLarge(format!(
            "redundancy lattice supports 1 to {MAX_PREDICTORS} predictors, got {n}"
        )));
    }
    Ok(CACHE[n - 1].get_or_init(|| RedundancyLattice::build(n)))
}

/// Atom values of a decomposition, keyed by lattice position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub atoms: Vec<Antichain>,
    /// Redundancy (or redundant entropy) of each atom before inversion.
    pub redundancy: Vec<f64>,
    /// Partial values after inversion.
    pub partial: Vec<f64>,
    pub function: String,
    /// Variable indices of the target; empty for entropy decompositions.
    pub target: Vec<usize>,
}

impl DecompositionResult {
    pub fn from_lattice(
        lattice: &RedundancyLattice,
        redundancy: Vec<f64>,
        function: impl Into<String>,
        target: Vec<usize>,
    ) -> Result<Self> {
        let partial = moebius(lattice, &redundancy)?;
        Ok(Self {
            atoms: lattice.atoms().to_vec(),
            redundancy,
            partial,
            function: function.into(),
            target,
        })
    }

    pub fn get(&self, atom: &Antichain) -> Option<f64> {
        self.atoms.iter().position(|a| a == atom).map(|i| self.partial[i])
    }

    /// Partial value by display label, e.g. `"{1}{2}"`.
    pub fn atom(&self, label: &str) -> Option<f64> {
        Antichain::parse(label).ok().and_then(|a| self.get(&a))
    }

    pub fn total(&self) -> f64 {
        self.partial.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Antichain, f64)> {
        self.atoms.iter().zip(self.partial.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn atom_counts() {
        assert_eq!(build_lattice(1).unwrap().len(), 1);
        assert_eq!(build_lattice(2).unwrap().len(), 4);
        assert_eq!(build_lattice(3).unwrap().len(), 18);
        assert_eq!(build_lattice(4).unwrap().len(), 166);
        assert!(build_lattice(5).is_err());
        assert!(build_lattice(0).is_err());
    }

    #[test]
    fn two_predictor_atoms() {
        let l = build_lattice(2).unwrap();
        let labels: Vec<String> = l.atoms().iter().map(|a| a.to_string()).collect();
        assert_eq!(labels, ["{1}{2}", "{1}", "{2}", "{12}"]);
        assert_eq!(l.bottom(), 0);
        assert_eq!(l.top(), 3);
        assert_eq!(l.strictly_below(3).len(), 3);
        assert!(l.strictly_below(1) == [0]);
    }

    #[test]
    fn canonical_form_and_parsing() {
        let a = Antichain::from_indices(&[&[1, 2], &[0]]).unwrap();
        assert_eq!(a.to_string(), "{1}{23}");
        assert_eq!(Antichain::parse("{23}{1}").unwrap(), a);
        assert!(Antichain::parse("{1}{12}").is_err());
        assert!(Antichain::parse("{1").is_err());
    }

    fn check_order(n: usize, triples: impl Iterator<Item = (usize, usize, usize)>) {
        let l = build_lattice(n).unwrap();
        let at = l.atoms();
        for (i, j, k) in triples {
            let (a, b, c) = (&at[i], &at[j], &at[k]);
            assert!(a.precedes(a));
            if a.precedes(b) && b.precedes(a) {
                assert_eq!(a, b);
            }
            if a.precedes(b) && b.precedes(c) {
                assert!(a.precedes(c));
            }
        }
    }

    #[test]
    fn order_axioms_exhaustive() {
        for n in 1..=3 {
            let m = build_lattice(n).unwrap().len();
            check_order(n, (0..m).flat_map(move |i| (0..m).flat_map(move |j| (0..m).map(move |k| (i, j, k)))));
        }
    }

    proptest! {
        #[test]
        fn order_axioms_sampled(i in 0usize..166, j in 0usize..166, k in 0usize..166) {
            check_order(4, std::iter::once((i, j, k)));
        }

        #[test]
        fn moebius_round_trip(vals in prop::collection::vec(-3.0f64..3.0, 18)) {
            let l = build_lattice(3).unwrap();
            let p = moebius(l, &vals).unwrap();
            let back = cumulate(l, &p);
            for (a, b) in back.iter().zip(&vals) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn constant_redundancy() {
        for n in 2..=4 {
            let l = build_lattice(n).unwrap();
            let p = moebius(l, &vec![2.5; l.len()]).unwrap();
            assert!((p[l.bottom()] - 2.5).abs() < 1e-12);
            let rest: f64 = p.iter().enumerate().filter(|&(i, _)| i != l.bottom()).map(|(_, v)| v.abs()).sum();
            assert!(rest < 1e-9);
        }
    }

    #[test]
    fn missing_values_rejected() {
        let l = build_lattice(2).unwrap();
        assert!(moebius(l, &[1.0, 2.0]).is_err());
    }
}
