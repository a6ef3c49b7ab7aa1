//! Integer iterations: 3n+1 and its mod-m relatives, drift estimates, and
//! an integer criterion equivalent to the Riemann Hypothesis.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::enumeration::least_squares_slope;
use crate::error::{Error, Result};

/// Bit-length ceiling for residue runs unless one is given.
pub const DEFAULT_MAX_BITS: u64 = 1_000_000;

/// `n -> (a_i n + b_i) / m` on the residue class `n = i (mod m)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueRule {
    modulus: u32,
    maps: Vec<(i64, i64)>,
}

impl ResidueRule {
    pub fn new(modulus: u32, maps: Vec<(i64, i64)>) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidRule("modulus must be at least 2".into()));
        }
        if maps.len() != modulus as usize {
            return Err(Error::InvalidRule(format!("expected {} maps, got {}", modulus, maps.len())));
        }
        for (i, &(a, b)) in maps.iter().enumerate() {
            if a <= 0 {
                return Err(Error::InvalidRule(format!("multiplier {a} must be positive")));
            }
            if (a as i128 * i as i128 + b as i128).rem_euclid(modulus as i128) != 0 {
                return Err(Error::InvalidRule(format!("{a}n{b:+} is not divisible by {modulus} on residue {i}")));
            }
        }
        Ok(ResidueRule { modulus, maps })
    }

    /// `n -> n/2` or `(6n + 2)/2 = 3n + 1`.
    pub fn collatz() -> Self {
        ResidueRule::new(2, vec![(1, 0), (6, 2)]).unwrap()
    }

    /// `n -> n/2` or `5n + 1`.
    pub fn five_n_plus_one() -> Self {
        ResidueRule::new(2, vec![(1, 0), (10, 2)]).unwrap()
    }

    /// `n -> n/3, (4n + 2)/3, (7n + 1)/3`.
    pub fn mod3_example() -> Self {
        ResidueRule::new(3, vec![(1, 0), (4, 2), (7, 1)]).unwrap()
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn maps(&self) -> &[(i64, i64)] {
        &self.maps
    }

    pub fn multipliers(&self) -> Vec<i64> {
        self.maps.iter().map(|&(a, _)| a).collect()
    }

    pub fn apply(&self, n: &BigInt) -> BigInt {
        let m = BigInt::from(self.modulus);
        let i = n.mod_floor(&m).to_usize().unwrap();
        let (a, b) = self.maps[i];
        (n * a + b).div_floor(&m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationCycle {
    /// Index of the first value on the cycle.
    pub transient: u64,
    pub period: u64,
    #[serde(with = "decimal")]
    pub minimum: BigInt,
    /// Index of the first visit to `minimum`.
    pub steps_to_minimum: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationReport {
    /// `None` when the step cap or bit ceiling was hit first.
    pub cycle: Option<IterationCycle>,
    /// Steps simulated.
    pub steps: u64,
    /// Bit lengths of the simulated values, starting with the initial one.
    pub bit_lengths: Vec<u64>,
}

impl IterationReport {
    /// Least-squares slope of bit length against step.
    pub fn growth_rate(&self) -> Option<f64> {
        let xs: Vec<f64> = (0..self.bit_lengths.len()).map(|i| i as f64).collect();
        let ys: Vec<f64> = self.bit_lengths.iter().map(|&b| b as f64).collect();
        least_squares_slope(&xs, &ys)
    }
}

mod decimal {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(n)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

fn bits(n: &BigInt) -> u64 {
    n.magnitude().bits()
}

/// Runs `f` from `start` with Brent's method on exact values.
fn iterate(start: BigInt, cap: u64, max_bits: u64, f: impl Fn(&BigInt) -> BigInt) -> IterationReport {
    let mut bit_lengths = vec![bits(&start)];
    let mut power = 1u64;
    let mut lam = 0u64;
    let mut tortoise = start.clone();
    let mut hare = start.clone();
    let mut steps = 0u64;
    loop {
        if steps >= cap || bits(&hare) > max_bits {
            return IterationReport { cycle: None, steps, bit_lengths };
        }
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = f(&hare);
        steps += 1;
        lam += 1;
        bit_lengths.push(bits(&hare));
        if hare == tortoise {
            break;
        }
    }
    let period = lam;
    let mut a = start.clone();
    let mut b = start;
    for _ in 0..period {
        b = f(&b);
    }
    let mut transient = 0u64;
    while a != b {
        a = f(&a);
        b = f(&b);
        transient += 1;
    }
    let mut minimum = a.clone();
    let mut offset = 0;
    let mut s = a.clone();
    for k in 1..period {
        s = f(&s);
        if s < minimum {
            minimum = s.clone();
            offset = k;
        }
    }
    // The first visit to the minimum lies within one period after entry.
    let steps_to_minimum = transient + offset;
    bit_lengths.truncate((transient + period) as usize + 1);
    let steps = transient + period;
    IterationReport { cycle: Some(IterationCycle { transient, period, minimum, steps_to_minimum }), steps, bit_lengths }
}

/// `n -> n/2` for even `n`, `3n + 1` for odd `n`.
pub fn collatz_run(n: &BigUint, cap: u64) -> Result<IterationReport> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("collatz start must be at least 1".into()));
    }
    let start = BigInt::from_biguint(Sign::Plus, n.clone());
    Ok(iterate(start, cap, u64::MAX, |v| if v.is_even() { v >> 1 } else { v * 3 + 1 }))
}

pub fn residue_run(rule: &ResidueRule, n: &BigInt, cap: u64) -> IterationReport {
    residue_run_with_ceiling(rule, n, cap, DEFAULT_MAX_BITS)
}

pub fn residue_run_with_ceiling(rule: &ResidueRule, n: &BigInt, cap: u64, max_bits: u64) -> IterationReport {
    iterate(n.clone(), cap, max_bits, |v| rule.apply(v))
}

/// Mean change in bits per step, with residues following the Markov chain
/// obtained by treating `n` as uniform within its class modulo `m^2`.
pub fn bias(rule: &ResidueRule) -> f64 {
    let m = rule.modulus as usize;
    let mut p = vec![vec![0.0; m]; m];
    for (i, &(a, b)) in rule.maps.iter().enumerate() {
        for t in 0..m as i128 {
            let n = i as i128 + m as i128 * t;
            let out = (a as i128 * n + b as i128).div_euclid(m as i128);
            p[i][out.rem_euclid(m as i128) as usize] += 1.0 / m as f64;
        }
    }
    let mut pi = vec![1.0 / m as f64; m];
    for _ in 0..10_000 {
        let mut next = vec![0.0; m];
        for i in 0..m {
            for j in 0..m {
                next[j] += pi[i] * p[i][j];
            }
        }
        // Averaging with the previous vector damps periodic chains.
        for j in 0..m {
            next[j] = 0.5 * (next[j] + pi[j]);
        }
        pi = next;
    }
    rule.maps.iter().zip(&pi).map(|(&(a, _), w)| w * (a as f64 / m as f64).log2()).sum()
}

/// Searches nondecreasing multipliers `a >= 2` coprime to `m` for residues
/// `1..m` (residue 0 maps to `n/m`) with `|bias|` minimal; ties go to the
/// smaller largest multiplier. Offsets are the least non-negative ones.
pub fn minimal_bias_rule(m: u32) -> Result<ResidueRule> {
    if !(2..=6).contains(&m) {
        return Err(Error::InvalidArgument("minimal_bias_rule supports 2 <= m <= 6".into()));
    }
    let target = (m as u64).pow(m);
    let limit = 2 * target;
    let mut best: Option<(f64, u64, Vec<u64>)> = None;
    let mut tuple = Vec::new();
    search_tuples(m, (m - 1) as usize, 2, 1, limit, &mut tuple, &mut |t| {
        let product: u64 = t.iter().product();
        let score = (product as f64 / target as f64).log2().abs();
        let top = *t.last().unwrap();
        let better = match &best {
            None => true,
            Some((s, tp, _)) => score < s - 1e-12 || ((score - s).abs() <= 1e-12 && top < *tp),
        };
        if better {
            best = Some((score, top, t.to_vec()));
        }
    });
    let (_, _, mults) = best.expect("search space is non-empty");
    let mut maps = vec![(1, 0)];
    for (i, &a) in mults.iter().enumerate() {
        let r = i as i64 + 1;
        let b = (-(a as i64) * r).rem_euclid(m as i64);
        maps.push((a as i64, b));
    }
    ResidueRule::new(m, maps)
}

fn search_tuples(m: u32, len: usize, from: u64, product: u64, limit: u64, tuple: &mut Vec<u64>, visit: &mut impl FnMut(&[u64])) {
    if tuple.len() == len {
        visit(tuple);
        return;
    }
    let mut a = from;
    while product * a <= limit {
        if a.gcd(&(m as u64)) == 1 {
            tuple.push(a);
            search_tuples(m, len, a, product * a, limit, tuple, visit);
            tuple.pop();
        }
        a += 1;
    }
}

fn double_factorial(n: i64) -> BigUint {
    let mut r = BigUint::one();
    let mut k = n;
    while k > 1 {
        r *= k as u64;
        k -= 2;
    }
    r
}

fn prime_pi(n: u64) -> u64 {
    (2..=n).filter(|&k| (2..).take_while(|d| d * d <= k).all(|d| k % d != 0)).count() as u64
}

fn lcm_upto(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc.lcm(&BigUint::from(k)))
}

/// `(2n+3)!!/15 - (2n-2)!! pi(n)^2 ((bitlen(lcm(1..n)) - 1) A(n) - n)` with
/// `A(n) = sum_{k<n} (-1)^(k+1)/k`, evaluated exactly. The result is an
/// integer for every `n >= 1`.
pub fn riemann_quantity(n: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    // A(n) as num/den.
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for k in 1..n {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        num = num * k + &den * sign;
        den *= k;
    }
    let first = BigInt::from(double_factorial(2 * n as i64 + 3)) / 15;
    let coef = BigInt::from(double_factorial(2 * n as i64 - 2)) * BigInt::from(prime_pi(n).pow(2));
    let lb = BigInt::from(lcm_upto(n).bits() - 1);
    let inner_num = lb * num - &den * n;
    let second_num = coef * inner_num;
    let (q, r) = second_num.div_rem(&den);
    if !r.is_zero() {
        return Err(Error::InvalidArgument(format!("n={n} gives a non-integer value")));
    }
    Ok(first - q)
}

/// Ratio differences `q(n+1)/q(n) - q(n)/q(n-1)` for `n` in `2..=max_n - 1`.
pub fn riemann_ratio_differences(max_n: u64) -> Result<Vec<f64>> {
    let values: Vec<f64> = (1..=max_n).map(|n| riemann_quantity(n).map(|q| q.to_f64().unwrap_or(f64::INFINITY))).collect::<Result<_>>()?;
    Ok(values.windows(3).map(|w| w[2] / w[1] - w[1] / w[0]).collect())
}

/// State of the seven-component integer iteration.
pub type RiemannState = [BigInt; 7];

pub fn riemann_initial() -> RiemannState {
    [1, 1, 1, 0, 0, 1, 1].map(BigInt::from)
}

pub fn riemann_iteration_step(x: &RiemannState) -> RiemannState {
    let next: BigInt = &x[1] + 1;
    let g = next.gcd(&x[2]);
    let sign = if x[1].is_even() { 1 } else { -1 };
    [
        BigInt::from(2) * &x[1] * &x[0] - BigInt::from(4 * sign) * &x[4],
        next.clone(),
        &next * &x[2] / &g,
        if g.is_one() { &x[3] + 1 } else { x[3].clone() },
        x[5].clone(),
        (BigInt::from(2) * &x[1] + 2) * &x[5],
        (BigInt::from(2) * &x[1] + 5) * &x[6],
    ]
}

/// The loop continues while `x7 > x4^2 (x1 (bitlen(x3) - 1) - x6)`.
pub fn riemann_continues(x: &RiemannState) -> bool {
    let bl = BigInt::from(x[2].magnitude().bits()) - 1;
    let rhs = &x[3] * &x[3] * (&x[0] * bl - &x[5]);
    x[6] > rhs
}

/// Steps taken before the predicate fails, or `None` if it holds for all
/// `cap` steps.
pub fn riemann_iterate(cap: u64) -> (Option<u64>, RiemannState) {
    let mut x = riemann_initial();
    for t in 0..cap {
        if !riemann_continues(&x) {
            return (Some(t), x);
        }
        x = riemann_iteration_step(&x);
    }
    (None, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collatz_examples() {
        let r = collatz_run(&BigUint::from(27u32), 10_000).unwrap();
        let c = r.cycle.unwrap();
        assert_eq!((c.period, c.minimum.clone(), c.steps_to_minimum, c.transient), (3, BigInt::one(), 111, 109));
        let r = collatz_run(&BigUint::from(670617279u64), 10_000).unwrap().cycle.unwrap();
        assert_eq!(r.steps_to_minimum, 986);
        let r = collatz_run(&BigUint::one(), 10).unwrap().cycle.unwrap();
        assert_eq!((r.transient, r.period), (0, 3));
    }

    #[test]
    fn residue_examples() {
        let r = residue_run(&ResidueRule::mod3_example(), &BigInt::from(101), 100_000).cycle.unwrap();
        assert_eq!((r.transient, r.period), (2604, 20));
        assert!(ResidueRule::new(3, vec![(1, 0), (4, 1), (7, 1)]).is_err());
    }

    #[test]
    fn collatz_correspondence() {
        let rule = ResidueRule::collatz();
        let mut a = BigInt::from(27);
        for _ in 0..200 {
            let b = rule.apply(&a);
            let expect = if a.is_even() { &a / 2 } else { &a * 3 + 1 };
            assert_eq!(b, expect);
            a = b;
        }
    }

    #[test]
    fn bias_examples() {
        assert!((bias(&ResidueRule::collatz()) - -0.1383).abs() < 1e-4);
        assert!((bias(&ResidueRule::five_n_plus_one()) - 0.1073).abs() < 1e-3);
        assert!((3.0 * bias(&ResidueRule::mod3_example()) - (28f64 / 27.0).log2()).abs() < 1e-9);
        let id = ResidueRule::new(3, vec![(3, 0), (3, -3), (3, -6)]).unwrap();
        assert!(bias(&id).abs() < 1e-12);
    }

    #[test]
    fn minimal_bias_examples() {
        assert_eq!(minimal_bias_rule(3).unwrap().multipliers(), vec![1, 4, 7]);
        assert_eq!(minimal_bias_rule(4).unwrap().multipliers(), vec![1, 3, 5, 17]);
        assert_eq!(minimal_bias_rule(2).unwrap().multipliers(), vec![1, 5]);
    }

    #[test]
    fn riemann_values() {
        let expect: [u64; 10] = [1, 9, 127, 981, 16209, 207135, 3821007, 55666269, 1250264481, 26427261303];
        for (n, e) in (1..=10).zip(expect) {
            assert_eq!(riemann_quantity(n).unwrap(), BigInt::from(e), "n={n}");
        }
    }

    #[test]
    fn riemann_iteration_counter() {
        let mut x = riemann_initial();
        for t in 0..50u32 {
            assert_eq!(x[1], BigInt::from(t + 1));
            x = riemann_iteration_step(&x);
        }
    }
}
