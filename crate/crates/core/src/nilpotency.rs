//! The cyclic-permutation word that kills `W` and checks of the vanishing
//! both as a relation composition and as a matrix product.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ZERO};
use crate::poset::{BasisIndex, Permutation, Poset, Relation, Resonance};
use crate::polyspace::{conj_matrix, permutation_unitary};
use crate::seed;

/// The letters `n_1, .., n_N` and the cycles `κ_{n_j}` they name.
#[derive(Debug, Clone, Serialize)]
pub struct PermWord {
    pub d: usize,
    pub letters: Vec<usize>,
    #[serde(skip)]
    pub perms: Vec<Permutation>,
}

impl PermWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The word with its last letter removed.
    pub fn truncated(&self) -> PermWord {
        let k = self.len().saturating_sub(1);
        PermWord { d: self.d, letters: self.letters[..k].to_vec(), perms: self.perms[..k].to_vec() }
    }
}

/// Letter sequence: `(2, .., d-1) ++ letters(d-1) ++ (d)`, empty for `d = 1`.
pub fn word_letters(d: usize) -> Vec<usize> {
    if d <= 1 {
        return Vec::new();
    }
    let mut out: Vec<usize> = (2..d).collect();
    out.extend(word_letters(d - 1));
    out.push(d);
    out
}

pub fn build_word(d: usize) -> Result<PermWord> {
    if d == 0 {
        return Err(Error::InvalidDimension { d, reason: "dimension must be at least 1" });
    }
    let letters = word_letters(d);
    let perms = letters.iter().map(|&h| Permutation::cycle(d, h)).collect();
    Ok(PermWord { d, letters, perms })
}

/// `W ∘ σ_N ∘ W ∘ ... ∘ σ_1 ∘ W` where `σ_j` is the graph of the action.
pub fn compose_word(poset: &Poset, res: &Resonance, perms: &[Permutation]) -> Relation {
    let mut acc = res.w.clone();
    for sigma in perms {
        acc = sigma.graph(poset.set()).compose(&acc);
        acc = res.w.compose(&acc);
    }
    acc
}

#[derive(Debug, Clone, Serialize)]
pub struct CombiOutcome {
    pub d: usize,
    pub word: Vec<usize>,
    pub holds: bool,
    pub remaining_pairs: usize,
    pub witness: Option<(BasisIndex, BasisIndex)>,
}

fn combi_outcome(d: usize, word: &PermWord) -> Result<CombiOutcome> {
    let poset = Poset::quadratic(d)?;
    let res = Resonance::new(&poset)?;
    let rel = compose_word(&poset, &res, &word.perms);
    let witness = rel
        .first_pair()
        .map(|(s, t)| (poset.set().get(s).clone(), poset.set().get(t).clone()));
    Ok(CombiOutcome {
        d,
        word: word.letters.clone(),
        holds: rel.is_empty(),
        remaining_pairs: rel.len(),
        witness,
    })
}

/// Whether the full word annihilates `W`.
pub fn verify_combi(d: usize) -> Result<CombiOutcome> {
    combi_outcome(d, &build_word(d)?)
}

/// Same check with the last letter dropped; expected to fail for `d >= 2`.
pub fn verify_combi_truncated(d: usize) -> Result<CombiOutcome> {
    combi_outcome(d, &build_word(d)?.truncated())
}

/// `M_0 A_{U_σ1} M_1 ... A_{U_σN} M_N`.
pub fn alternating_product(factors: &[CMatrix], perm_ops: &[CMatrix]) -> CMatrix {
    assert_eq!(factors.len(), perm_ops.len() + 1);
    let mut acc = factors[0].clone();
    for (op, m) in perm_ops.iter().zip(&factors[1..]) {
        acc = acc * op * m;
    }
    acc
}

/// Random matrix with support exactly `rel`, entries from the unit disk.
pub fn random_supported<R: rand::Rng + ?Sized>(rng: &mut R, rel: &Relation) -> CMatrix {
    let n = rel.universe();
    let mut m = CMatrix::zeros(n, n);
    for (s, t) in rel.pairs() {
        let mut z = linalg::unit_disk(rng);
        while z == ZERO {
            z = linalg::unit_disk(rng);
        }
        m[(s, t)] = z;
    }
    m
}

/// Matrix with ones on `rel`.
pub fn ones_supported(rel: &Relation) -> CMatrix {
    let n = rel.universe();
    let mut m = CMatrix::zeros(n, n);
    for (s, t) in rel.pairs() {
        m[(s, t)] = linalg::ONE;
    }
    m
}

#[derive(Debug, Clone, Serialize)]
pub struct NilpReport {
    pub d: usize,
    pub trials: usize,
    pub max_entry: f64,
    pub tolerance: f64,
    pub holds: bool,
    /// Same product with all-ones factors on `W`.
    pub ones_max_entry: f64,
}

pub const NILP_TOL: f64 = 1e-12;

pub fn verify_nilp_matrix(d: usize, trials: usize, master_seed: u64) -> Result<NilpReport> {
    if d < 2 {
        return Err(Error::InvalidDimension { d, reason: "matrix check needs d >= 2" });
    }
    let poset = Poset::quadratic(d)?;
    let res = Resonance::new(&poset)?;
    let word = build_word(d)?;
    let ops: Vec<CMatrix> = word
        .perms
        .iter()
        .map(|s| conj_matrix(&permutation_unitary(s)))
        .collect::<Result<_>>()?;
    let stream = seed::derive(master_seed, "nilpotency");
    let max_entry = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = seed::indexed_rng(stream, trial as u64);
            let factors: Vec<CMatrix> =
                (0..=ops.len()).map(|_| random_supported(&mut rng, &res.w)).collect();
            linalg::max_abs(&alternating_product(&factors, &ops))
        })
        .reduce(|| 0.0, f64::max);
    let ones = vec![ones_supported(&res.w); ops.len() + 1];
    let ones_max_entry = linalg::max_abs(&alternating_product(&ones, &ops));
    Ok(NilpReport {
        d,
        trials,
        max_entry,
        tolerance: NILP_TOL,
        holds: max_entry <= NILP_TOL && ones_max_entry <= NILP_TOL,
        ones_max_entry,
    })
}
