//! Exact hypothesis-space counts for tree families.

use crate::{Error, Result};
use num_bigint::BigUint;
use std::collections::HashMap;

/// Number of fully-grown (complete) trees of depth `d` over `m` binary
/// features with distinct features along each root-leaf path:
/// `2^(2^d) * prod_{k=1..d} (m-k+1)^(2^(k-1))`.
pub fn count_full_trees(d: usize, m: usize) -> Result<BigUint> {
    if d < 1 {
        return Err(Error::DepthCapTooSmall);
    }
    if d > m {
        return Err(Error::DepthExceedsFeatures { depth: d, m });
    }
    let mut acc = BigUint::from(2u32).pow(1u32 << d);
    for k in 1..=d {
        let options = BigUint::from((m - k + 1) as u64);
        acc *= options.pow(1u32 << (k - 1));
    }
    Ok(acc)
}

/// Number of internal-feature structures only (no leaf labelings):
/// `prod_{k=1..d} (m-k+1)^(2^(k-1))`.
pub fn count_structures(d: usize, m: usize) -> Result<BigUint> {
    let full = count_full_trees(d, m)?;
    Ok(full / BigUint::from(2u32).pow(1u32 << d))
}

/// Number of trees of depth at most `d` over `m` features via the recursion
/// `C(d, m) = 2 + m * C(d-1, m-1)^2` with `C(0, .) = 2`, memoized.
pub fn count_trees_up_to_depth(d: usize, m: usize) -> Result<BigUint> {
    if m < d {
        return Err(Error::DepthExceedsFeatures { depth: d, m });
    }
    let mut memo: HashMap<(usize, usize), BigUint> = HashMap::new();
    Ok(count_rec(d, m, &mut memo))
}

fn count_rec(d: usize, m: usize, memo: &mut HashMap<(usize, usize), BigUint>) -> BigUint {
    if d == 0 {
        return BigUint::from(2u32);
    }
    if let Some(v) = memo.get(&(d, m)) {
        return v.clone();
    }
    let sub = count_rec(d - 1, m - 1, memo);
    let v = BigUint::from(2u32) + BigUint::from(m as u64) * (&sub * &sub);
    memo.insert((d, m), v.clone());
    v
}

/// Brute-force oracle: enumerate every syntactic tree of depth <= `d`
/// (leaf 0, leaf 1, or a split on an unused-on-path feature with two
/// subtrees) as a serialized token string and count them one by one.
/// Independent of the closed recursion.
pub fn brute_force_trees_up_to_depth(d: usize, m: usize) -> BigUint {
    fn gen(d: usize, avail: &[u32]) -> Vec<Vec<u8>> {
        let mut out = vec![vec![b'0'], vec![b'1']];
        if d == 0 {
            return out;
        }
        for (pos, &f) in avail.iter().enumerate() {
            let rest: Vec<u32> = avail
                .iter()
                .enumerate()
                .filter(|(q, _)| *q != pos)
                .map(|(_, &g)| g)
                .collect();
            let subs = gen(d - 1, &rest);
            for left in &subs {
                for right in &subs {
                    let mut enc = vec![b'N', f as u8];
                    enc.extend_from_slice(left);
                    enc.extend_from_slice(right);
                    out.push(enc);
                }
            }
        }
        out
    }

    let avail: Vec<u32> = (0..m as u32).collect();
    if d == 0 {
        return BigUint::from(2u32);
    }
    if d <= 2 && m <= 4 {
        // small enough to also assert distinctness of the enumeration
        let all = gen(d, &avail);
        let set: std::collections::HashSet<&Vec<u8>> = all.iter().collect();
        assert_eq!(set.len(), all.len(), "oracle produced duplicate trees");
        return BigUint::from(all.len() as u64);
    }
    // at the top level iterate root choices and subtree pairs one by one so
    // the full list never has to be materialized
    let mut count = BigUint::from(2u32);
    for (pos, _) in avail.iter().enumerate() {
        let rest: Vec<u32> = avail
            .iter()
            .enumerate()
            .filter(|(q, _)| *q != pos)
            .map(|(_, &g)| g)
            .collect();
        let subs = gen(d - 1, &rest);
        for _left in &subs {
            for _right in &subs {
                count += 1u32;
            }
        }
    }
    count
}
