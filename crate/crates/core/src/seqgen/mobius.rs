use crate::error::{Error, Result};

/// Largest sieve accepted; beyond this the tables alone exceed 32 GiB.
const MAX_SIEVE: u64 = 1 << 34;

/// μ(0..=n_max) by a linear (Euler) sieve; entry 0 is unused and set to 0.
///
/// Every composite is crossed out exactly once, by its smallest prime factor,
/// so the work is O(n_max).
pub fn mobius_sieve(n_max: u64) -> Result<Vec<i8>> {
    if n_max == 0 {
        return Err(Error::invalid("sieve bound must be at least 1"));
    }
    if n_max > MAX_SIEVE {
        return Err(Error::Resource(format!(
            "sieve bound {} exceeds {}",
            n_max, MAX_SIEVE
        )));
    }
    let n = n_max as usize;
    let mut mu: Vec<i8> = Vec::new();
    let mut composite: Vec<bool> = Vec::new();
    mu.try_reserve_exact(n + 1)
        .and_then(|_| composite.try_reserve_exact(n + 1))
        .map_err(|e| Error::Resource(format!("cannot allocate sieve of {}: {}", n_max, e)))?;
    mu.resize(n + 1, 0);
    composite.resize(n + 1, false);
    mu[1] = 1;

    let mut primes: Vec<usize> = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let m = match i.checked_mul(p) {
                Some(m) if m <= n => m,
                _ => break,
            };
            composite[m] = true;
            if i % p == 0 {
                mu[m] = 0;
                break;
            }
            mu[m] = -mu[i];
        }
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Trial-division oracle.
    fn mobius_bruteforce(mut n: u64) -> i8 {
        let mut sign = 1i8;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                sign = -sign;
            }
            p += 1;
        }
        if n > 1 {
            sign = -sign;
        }
        sign
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn definition_examples() {
        let mu = mobius_sieve(30).unwrap();
        assert_eq!(mu[1], 1);
        assert_eq!(mu[4], 0);
        assert_eq!(mu[6], 1);
        assert_eq!(mu[30], -1);
    }

    #[test]
    fn matches_trial_division_to_ten_thousand() {
        let mu = mobius_sieve(10_000).unwrap();
        for n in 1..=10_000u64 {
            assert_eq!(mu[n as usize], mobius_bruteforce(n), "n = {n}");
        }
    }

    #[test]
    fn multiplicative_on_coprime_pairs() {
        let mu = mobius_sieve(10_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 500 {
            let m = rng.random_range(1..=10_000u64);
            let n = rng.random_range(1..=10_000u64);
            if gcd(m, n) != 1 {
                continue;
            }
            let lhs = mobius_bruteforce(m * n);
            assert_eq!(lhs, mu[m as usize] * mu[n as usize], "{m} * {n}");
            checked += 1;
        }
    }

    #[test]
    fn rejects_zero_and_absurd_bounds() {
        assert!(matches!(mobius_sieve(0), Err(Error::Invalid(_))));
        assert!(matches!(mobius_sieve(1 << 40), Err(Error::Resource(_))));
        assert_eq!(mobius_sieve(1).unwrap(), vec![0, 1]);
    }
}
