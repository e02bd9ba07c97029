//! Independent oracles for the integration suites.
//!
//! Everything here recomputes expected results by brute force, with no code
//! shared with the library: bounded loops instead of lazy merges, matrix
//! exponentiation instead of memo trees, generate-and-test instead of
//! shadow pruning. Slow and obvious on purpose.

#![allow(dead_code)]

use num_bigint::BigUint;

/// All 2^i * 3^j * 5^k up to `bound`, ascending. Bound 10^10 yields
/// comfortably more than 1000 values.
pub fn hamming_up_to(bound: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p2: u64 = 1;
    while p2 <= bound {
        let mut p23 = p2;
        while p23 <= bound {
            let mut p235 = p23;
            while p235 <= bound {
                out.push(p235);
                p235 = match p235.checked_mul(5) {
                    Some(v) => v,
                    None => break,
                };
            }
            p23 = match p23.checked_mul(3) {
                Some(v) => v,
                None => break,
            };
        }
        p2 = match p2.checked_mul(2) {
            Some(v) => v,
            None => break,
        };
    }
    out.sort_unstable();
    out
}

/// All products of powers of `factors` up to `bound`, ascending, starting
/// at the empty product 1. Depth-first over exponent tuples.
pub fn products_up_to(factors: &[u64], bound: u64) -> Vec<u64> {
    fn go(factors: &[u64], bound: u64, acc: u64, out: &mut Vec<u64>) {
        out.push(acc);
        for (i, &f) in factors.iter().enumerate() {
            let mut v = acc;
            while let Some(next) = v.checked_mul(f) {
                if next > bound {
                    break;
                }
                // Later factors only, so each tuple is reached once.
                go(&factors[i + 1..], bound, next, out);
                v = next;
            }
        }
    }
    let mut out = Vec::new();
    go(factors, bound, 1, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

/// fib via 2x2 matrix exponentiation: [[1,1],[1,0]]^n has fib(n) in its
/// off-diagonal. Shares no structure with any library path.
pub fn fib_matrix(n: u64) -> BigUint {
    type M = [[BigUint; 2]; 2];
    fn mul(a: &M, b: &M) -> M {
        let e = |r: usize, c: usize| &a[r][0] * &b[0][c] + &a[r][1] * &b[1][c];
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    }
    let zero = BigUint::from(0u32);
    let one = BigUint::from(1u32);
    let mut result: M = [[one.clone(), zero.clone()], [zero.clone(), one.clone()]];
    let mut base: M = [[one.clone(), one.clone()], [one, zero]];
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            result = mul(&result, &base);
        }
        base = mul(&base, &base);
        k >>= 1;
    }
    result[0][1].clone()
}

/// Extend-and-test permutation generator. Each candidate is compared
/// against the whole partial path one element at a time; the second return
/// is that comparison count, the cost shadow pruning avoids.
pub fn permutations_naive(n: u32) -> (Vec<Vec<u32>>, u64) {
    let mut comparisons = 0u64;
    let mut out = Vec::new();
    let mut path = Vec::new();
    fn extend(n: u32, path: &mut Vec<u32>, out: &mut Vec<Vec<u32>>, comparisons: &mut u64) {
        if path.len() == n as usize {
            out.push(path.clone());
            return;
        }
        for candidate in 1..=n {
            let mut seen = false;
            for &p in path.iter() {
                *comparisons += 1;
                if p == candidate {
                    seen = true;
                    break;
                }
            }
            if !seen {
                path.push(candidate);
                extend(n, path, out, comparisons);
                path.pop();
            }
        }
    }
    extend(n, &mut path, &mut out, &mut comparisons);
    (out, comparisons)
}

/// n-queens by filtering permutations: rows are a permutation of 1..n and
/// no two queens share a diagonal.
pub fn queens_naive(n: u32) -> Vec<Vec<u32>> {
    let (perms, _) = permutations_naive(n);
    perms
        .into_iter()
        .filter(|rows| {
            for i in 0..rows.len() {
                for j in i + 1..rows.len() {
                    let dr = i64::from(rows[i]) - i64::from(rows[j]);
                    let dc = (j - i) as i64;
                    if dr.abs() == dc {
                        return false;
                    }
                }
            }
            true
        })
        .collect()
}

/// Does `s` contain two identical adjacent blocks anywhere?
pub fn has_square(s: &[u32]) -> bool {
    for start in 0..s.len() {
        for half in 1..=(s.len() - start) / 2 {
            if s[start..start + half] == s[start + half..start + 2 * half] {
                return true;
            }
        }
    }
    false
}

/// All square-free length-k strings over 1..=n, in lexicographic order, by
/// checking every one of the n^k candidates.
pub fn squarefree_naive(n: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut s = vec![1u32; k];
    loop {
        if !has_square(&s) {
            out.push(s.clone());
        }
        // Odometer increment in base n over digits 1..=n.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if s[i] < n {
                s[i] += 1;
                break;
            }
            s[i] = 1;
        }
    }
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}
