//! Enumeration of prime powers up to the cutoff.

use rug::Rational;

/// One prime power `n = p^k` with its von Mangoldt weight `Λ(n) = log p`
/// carried symbolically through the exact prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimePower {
    pub n: u64,
    pub p: u64,
    pub k: u32,
}

/// All prime powers `n = p^k ≤ c`, ascending in `n`. A cutoff below 2
/// yields the empty list.
pub fn prime_powers_upto(c: &Rational) -> Vec<PrimePower> {
    let floor = c.clone().floor();
    let bound = floor.numer().to_u64().unwrap_or(0);
    if bound < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; (bound + 1) as usize];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2u64;
    while i * i <= bound {
        if sieve[i as usize] {
            let mut j = i * i;
            while j <= bound {
                sieve[j as usize] = false;
                j += i;
            }
        }
        i += 1;
    }
    let mut out = Vec::new();
    for p in 2..=bound {
        if !sieve[p as usize] {
            continue;
        }
        let mut n = p;
        let mut k = 1u32;
        loop {
            out.push(PrimePower { n, p, k });
            match n.checked_mul(p) {
                Some(next) if next <= bound => {
                    n = next;
                    k += 1;
                }
                _ => break,
            }
        }
    }
    out.sort_by_key(|pp| pp.n);
    out
}
