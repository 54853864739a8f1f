//! Embedding codecs for permutations.
//!
//! Two vector encodings of a permutation `ψ` of length `N`:
//!
//! - Lehmer: length `N`, entry `i` counts earlier positions holding larger
//!   values, `l_i = #{j : j < i, ψ(j) > ψ(i)}`. The entries sum to the
//!   inversion count.
//! - Hamming: length `N²`, the flattened permutation matrix. Block `i`
//!   (of `N` consecutive entries) is the one-hot vector of `ψ(i)`.
//!
//! For `ψ = (4,3,1,2)` these are `(0,1,2,2)` and
//! `(0,0,0,1, 0,0,1,0, 1,0,0,0, 0,1,0,0)`.

use super::{PermError, Permutation};

/// Lehmer code: integer vector of length `N` with `values[0] = 0` and
/// `values[i] ≤ i` (0-indexed).
pub type LehmerEmbedding = Vec<usize>;

/// Flattened `N×N` permutation matrix with 0/1 entries.
pub type HammingEmbedding = Vec<u8>;

/// Encodes `p` as its Lehmer code.
pub fn lehmer_encode(p: &Permutation) -> LehmerEmbedding {
    let mapping = p.mapping();
    mapping
        .iter()
        .enumerate()
        .map(|(i, &v)| mapping[..i].iter().filter(|&&earlier| earlier > v).count())
        .collect()
}

/// Rebuilds the permutation whose Lehmer code is `code`.
///
/// Walks positions right to left: entry `i` fixes the rank of `ψ(i)` among
/// the values occupying positions `1..=i`, so each step picks and removes
/// one value from the still-unassigned pool.
pub fn lehmer_decode(code: &[usize]) -> Result<Permutation, PermError> {
    let n = code.len();
    if n < 2 {
        return Err(PermError::TooShort(n));
    }
    for (i, &v) in code.iter().enumerate() {
        if v > i {
            return Err(PermError::InvalidLehmerCode {
                position: i + 1,
                value: v,
                max: i,
            });
        }
    }
    let mut available: Vec<usize> = (1..=n).collect();
    let mut mapping = vec![0usize; n];
    for i in (0..n).rev() {
        // rank of ψ(i) among the first i+1 values, 0-indexed
        let rank = i - code[i];
        mapping[i] = available.remove(rank);
    }
    Permutation::new(mapping)
}

/// Encodes `p` as a flattened permutation matrix: `h[N·i + j] = 1` iff
/// `ψ(i+1) = j+1` (0-indexed storage of the 1-indexed rule).
pub fn hamming_encode(p: &Permutation) -> HammingEmbedding {
    let n = p.len();
    let mut values = vec![0u8; n * n];
    for (i, &v) in p.mapping().iter().enumerate() {
        values[n * i + (v - 1)] = 1;
    }
    values
}

/// Rebuilds the permutation from a flattened permutation matrix.
///
/// Rejects vectors whose length is not a perfect square, entries outside
/// {0,1}, blocks without exactly one 1, or repeated one-hot columns.
pub fn hamming_decode(values: &[u8]) -> Result<Permutation, PermError> {
    let n = integer_sqrt(values.len()).ok_or_else(|| {
        PermError::InvalidHammingEmbedding(format!(
            "length {} is not a perfect square",
            values.len()
        ))
    })?;
    if n < 2 {
        return Err(PermError::TooShort(n));
    }
    if let Some(pos) = values.iter().position(|&v| v > 1) {
        return Err(PermError::InvalidHammingEmbedding(format!(
            "entry {} at index {pos} is not 0 or 1",
            values[pos]
        )));
    }
    let mut mapping = Vec::with_capacity(n);
    let mut column_taken = vec![false; n];
    for block in 0..n {
        let row = &values[n * block..n * (block + 1)];
        let ones = row.iter().filter(|&&v| v == 1).count();
        if ones != 1 {
            return Err(PermError::InvalidHammingEmbedding(format!(
                "block {} has {ones} ones, expected exactly 1",
                block + 1
            )));
        }
        let j = row.iter().position(|&v| v == 1).expect("one is present");
        if column_taken[j] {
            return Err(PermError::InvalidHammingEmbedding(format!(
                "value {} appears in more than one block",
                j + 1
            )));
        }
        column_taken[j] = true;
        mapping.push(j + 1);
    }
    Permutation::new(mapping)
}

fn integer_sqrt(len: usize) -> Option<usize> {
    let root = (len as f64).sqrt().round() as usize;
    (root * root == len).then_some(root)
}
