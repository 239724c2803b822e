//! Closed-form counts, moments and probabilities in exact rational
//! arithmetic.
//!
//! Several formulas pass through negative powers at boundary parameters
//! (for instance `(n-m)^(k-m-1)` with `m = k`), so everything is assembled
//! as a reduced rational and counts are checked for integrality at the end.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};

/// Exact rational in canonical reduced form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactValue(BigRational);

impl ExactValue {
    pub fn new(r: BigRational) -> Self {
        ExactValue(r)
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        ExactValue(BigRational::from_integer(v.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        ExactValue(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        ExactValue(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactValue(BigRational::one())
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for ExactValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl std::ops::Add for ExactValue {
    type Output = ExactValue;
    fn add(self, rhs: Self) -> Self {
        ExactValue(self.0 + rhs.0)
    }
}

impl std::ops::Mul for ExactValue {
    type Output = ExactValue;
    fn mul(self, rhs: Self) -> Self {
        ExactValue(self.0 * rhs.0)
    }
}

impl std::iter::Sum for ExactValue {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        ExactValue(iter.fold(BigRational::zero(), |acc, v| acc + v.0))
    }
}

/// Binomial coefficient with `C(x, y) = 0` for `y < 0` or `y > x >= 0`, and
/// the usual extension `C(x, y) = (-1)^y C(y - x - 1, y)` for negative `x`.
pub fn binomial(x: i64, y: i64) -> BigInt {
    if y < 0 {
        return BigInt::zero();
    }
    if x < 0 {
        let c = binomial(y - x - 1, y);
        return if y % 2 == 0 { c } else { -c };
    }
    if y > x {
        return BigInt::zero();
    }
    let y = y.min(x - y);
    let mut acc = BigInt::one();
    for i in 0..y {
        acc *= BigInt::from(x - i);
        acc /= BigInt::from(i + 1);
    }
    acc
}

/// `base^exp` over the rationals. `0^0 = 1`; `0^negative` is an internal
/// error because no formula here should reach it.
fn rpow(base: i64, exp: i64) -> Result<BigRational> {
    if exp >= 0 {
        return Ok(BigRational::from_integer(num_traits::pow(BigInt::from(base), exp as usize)));
    }
    if base == 0 {
        return Err(Error::Internal(format!("0^{exp} in exact formula")));
    }
    Ok(BigRational::from_integer(num_traits::pow(BigInt::from(base), (-exp) as usize)).recip())
}

fn int(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn expect_integer(v: BigRational, what: &str) -> Result<ExactValue> {
    if v.is_integer() {
        Ok(ExactValue(v))
    } else {
        Err(Error::Internal(format!("{what} produced non-integral count {v}")))
    }
}

fn check_n(n: usize) -> Result<i64> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    i64::try_from(n).map_err(|_| Error::InvalidArgument(format!("n = {n} too large")))
}

/// `E K_j = j(j-1)/n`.
pub fn expected_edges(n: usize, j: usize) -> Result<ExactValue> {
    let nn = check_n(n)?;
    if j == 0 || j > n {
        return invalid(format!("j = {j} outside 1..={n}"));
    }
    let j = j as i64;
    Ok(ExactValue(rat(j * (j - 1), nn)))
}

/// `V K_k = k(k-1)(n-k)/n^2`.
pub fn variance_edges(n: usize, k: usize) -> Result<ExactValue> {
    let nn = check_n(n)?;
    if k == 0 || k > n {
        return invalid(format!("k = {k} outside 1..={n}"));
    }
    let k = k as i64;
    Ok(ExactValue(BigRational::new(
        BigInt::from(k) * (k - 1) * (nn - k),
        BigInt::from(nn) * nn,
    )))
}

/// Observation points `1 < j_1 < ... < j_r < n` and required edge counts
/// `a_1 <= ... <= a_r` with `a_i <= j_i - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceConstraint {
    n: usize,
    js: Vec<usize>,
    a: Vec<usize>,
}

impl SequenceConstraint {
    pub fn new(n: usize, js: Vec<usize>, a: Vec<usize>) -> Result<Self> {
        if js.is_empty() {
            return invalid("at least one observation point is required");
        }
        if js.len() != a.len() {
            return invalid("js and a must have the same length");
        }
        let mut prev_j = 1;
        let mut prev_a = 0;
        for (&j, &ai) in js.iter().zip(&a) {
            if j <= prev_j || j >= n {
                return invalid(format!("observation points must satisfy 1 < j_1 < ... < j_r < n = {n}"));
            }
            if ai < prev_a {
                return invalid("edge counts must be nondecreasing");
            }
            if ai + 1 > j {
                return invalid(format!("a = {ai} exceeds j - 1 = {}", j - 1));
            }
            prev_j = j;
            prev_a = ai;
        }
        Ok(SequenceConstraint { n, js, a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn js(&self) -> &[usize] {
        &self.js
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }
}

/// Number of labeled trees on `n` vertices with `k_{j_i}(T) = a_i` for all
/// observation points.
pub fn count_trees_partial_sequence(c: &SequenceConstraint) -> Result<ExactValue> {
    let n = c.n as i64;
    let jr = *c.js.last().expect("nonempty") as i64;
    let ar = *c.a.last().expect("nonempty") as i64;
    let mut acc = rpow(n - jr, jr - ar - 1)? * rpow(n, n - jr - 1)?;
    let (mut jp, mut ap) = (1i64, 0i64);
    for (&j, &a) in c.js.iter().zip(&c.a) {
        let (j, a) = (j as i64, a as i64);
        let gap = j - jp;
        let rise = a - ap;
        let mut factor = BigInt::zero();
        for h in 0..=rise {
            let term = binomial(jp - ap - 1, h)
                * binomial(gap, rise - h)
                * num_traits::pow(BigInt::from(gap), h as usize)
                * num_traits::pow(BigInt::from(j), (rise - h) as usize);
            factor += term;
        }
        acc *= int(factor);
        jp = j;
        ap = a;
    }
    expect_integer(acc, "partial uncover count")
}

/// Number of labeled trees with the fully specified uncover sequence
/// `a = (a_1, ..., a_n)`.
pub fn count_trees_full_sequence(a: &[usize]) -> Result<ExactValue> {
    let n = a.len();
    if n == 0 {
        return invalid("empty sequence");
    }
    if a[0] != 0 || a[n - 1] != n - 1 {
        return invalid("a full uncover sequence starts at 0 and ends at n-1");
    }
    for i in 1..=n {
        if a[i - 1] + 1 > i {
            return invalid(format!("a_{i} = {} exceeds {}", a[i - 1], i - 1));
        }
        if i >= 2 && a[i - 1] < a[i - 2] {
            return invalid(format!("sequence decreases at position {i}"));
        }
    }
    let mut acc = BigInt::one();
    for i in 1..n.saturating_sub(1) {
        let ai = a[i - 1] as i64;
        let next = a[i] as i64;
        let i = i as i64;
        let room = i - ai - 1;
        acc *= binomial(room, next - ai - 1) * (i + 1) + binomial(room, next - ai);
        if acc.is_zero() {
            break;
        }
    }
    Ok(ExactValue::from_int(acc))
}

/// Number of labeled trees on `n` vertices in which fixed disjoint label
/// sets `R_1, ..., R_l` of `[k]`, with sizes `rs`, are components of the
/// forest induced by `[k]`.
///
/// At `k = n` the forest is the whole tree: the count is `n^(n-2)` for a
/// single set of size `n` and 0 otherwise (the closed form is 0/0 there).
pub fn count_trees_with_clusters(n: usize, k: usize, rs: &[usize]) -> Result<ExactValue> {
    let nn = check_n(n)?;
    if k > n {
        return invalid(format!("k = {k} exceeds n = {n}"));
    }
    if rs.contains(&0) {
        return invalid("cluster sizes must be positive");
    }
    let r: usize = rs.iter().sum();
    if r > k {
        return invalid(format!("cluster sizes sum to {r} > k = {k}"));
    }
    if k == n {
        return Ok(if rs.len() == 1 && rs[0] == n {
            ExactValue(rpow(nn, nn - 2)?)
        } else if rs.is_empty() {
            ExactValue(rpow(nn, nn - 2)?)
        } else {
            ExactValue::zero()
        });
    }
    let (k, r, l) = (k as i64, r as i64, rs.len() as i64);
    let mut acc = rpow(nn, nn - k - 1)? * rpow(nn - r, k - r - 1)? * rpow(nn - k, l)?;
    for &ri in rs {
        acc *= rpow(ri as i64, ri as i64 - 1)?;
    }
    expect_integer(acc, "cluster count")
}

fn check_nkm(n: usize, k: usize, m: usize) -> Result<i64> {
    let nn = check_n(n)?;
    if k > n {
        return invalid(format!("k = {k} exceeds n = {n}"));
    }
    if m > k {
        return invalid(format!("m = {m} exceeds k = {k}"));
    }
    Ok(nn)
}

/// `P(R_n^(k) = m)` for the root cluster of a uniform rooted tree.
pub fn root_cluster_pmf(n: usize, k: usize, m: usize) -> Result<ExactValue> {
    let nn = check_nkm(n, k, m)?;
    let (k, m) = (k as i64, m as i64);
    if m == 0 {
        return Ok(ExactValue(rat(nn - k, nn)));
    }
    if k == nn {
        return Ok(if m == nn { ExactValue::one() } else { ExactValue::zero() });
    }
    let v = rpow(m, m)? * int(BigInt::from(nn - k)) * rpow(nn - m, k - m - 1)? * rpow(nn, -k)? * int(binomial(k, m));
    Ok(ExactValue(v))
}

/// `F_{n,k,m}`: rooted trees on `n` vertices whose root cluster after `k`
/// steps has `m` vertices.
pub fn count_rooted_trees_root_cluster(n: usize, k: usize, m: usize) -> Result<ExactValue> {
    let nn = check_nkm(n, k, m)?;
    let (k, m) = (k as i64, m as i64);
    let v = if m == 0 {
        int(binomial(nn - 1, k)) * rpow(nn, nn - 1)?
    } else {
        int(binomial(nn, m) * binomial(nn - m - 1, k - m))
            * rpow(nn, nn - k - 1)?
            * rpow(m, m)?
            * rpow(nn - m, k - m)?
    };
    expect_integer(v, "rooted root-cluster count")
}

/// `E R_n^(k) = sum_{j=1}^k j k^(j falling) / n^j`.
pub fn root_cluster_expectation(n: usize, k: usize) -> Result<ExactValue> {
    let nn = check_n(n)?;
    if k > n {
        return invalid(format!("k = {k} exceeds n = {n}"));
    }
    let mut total = BigRational::zero();
    let mut term = BigRational::one();
    for j in 1..=k as i64 {
        term *= rat(k as i64 - j + 1, nn);
        total += &term * BigInt::from(j);
    }
    Ok(ExactValue(total))
}

/// Cluster size of the `k`-th uncovered vertex: `(n/k) P(R = m)`, `m >= 1`.
pub fn uncovered_vertex_cluster_pmf(n: usize, k: usize, m: usize) -> Result<ExactValue> {
    check_nkm(n, k, m)?;
    if m == 0 {
        return invalid("the uncovered vertex's cluster has at least one vertex");
    }
    let p = root_cluster_pmf(n, k, m)?;
    Ok(ExactValue(p.0 * rat(n as i64, k as i64)))
}

/// `E X_{n,r}^(k) = C(k,r) (r/n)^(r-1) (1-k/n) (1-r/n)^(k-r-1)`.
///
/// At `k = n` the tree is a single component, so the value is 1 for `r = n`
/// and 0 otherwise; the closed form is 0/0 at `r = k = n`.
pub fn expected_components(n: usize, k: usize, r: usize) -> Result<ExactValue> {
    let nn = check_n(n)?;
    if r == 0 {
        return invalid("component size r must be positive");
    }
    if k > n || r > k {
        return invalid(format!("need 1 <= r <= k <= n, got r = {r}, k = {k}, n = {n}"));
    }
    if k == n {
        return Ok(if r == n { ExactValue::one() } else { ExactValue::zero() });
    }
    let (k, r) = (k as i64, r as i64);
    let v = int(binomial(k, r)) * rpow_rat(rat(r, nn), r - 1)? * rat(nn - k, nn) * rpow_rat(rat(nn - r, nn), k - r - 1)?;
    Ok(ExactValue(v))
}

fn rpow_rat(base: BigRational, exp: i64) -> Result<BigRational> {
    if exp >= 0 {
        return Ok(num_traits::pow(base, exp as usize));
    }
    if base.is_zero() {
        return Err(Error::Internal(format!("0^{exp} in exact formula")));
    }
    Ok(num_traits::pow(base.recip(), (-exp) as usize))
}

/// Checks `sum_{r=1}^k C(k,r) r^r n^(n-k-1) (n-r)^(k-r-1) (n-k) = k n^(n-2)`
/// exactly.
pub fn abel_identity_check(n: usize, k: usize) -> Result<bool> {
    let nn = check_n(n)?;
    if k == 0 || k >= n {
        return invalid(format!("identity needs 1 <= k < n, got k = {k}, n = {n}"));
    }
    let k = k as i64;
    let mut lhs = BigRational::zero();
    for r in 1..=k {
        lhs += int(binomial(k, r)) * rpow(r, r)? * rpow(nn, nn - k - 1)? * rpow(nn - r, k - r - 1)? * int(BigInt::from(nn - k));
    }
    let rhs = int(BigInt::from(k)) * rpow(nn, nn - 2)?;
    Ok(lhs == rhs)
}

/// Floating-point evaluations in log space, for parameters where exact
/// rationals would carry tens of thousands of digits.
pub mod float {
    use super::*;

    fn ln_binom(k: f64, m: f64) -> f64 {
        ln_gamma(k + 1.0) - ln_gamma(m + 1.0) - ln_gamma(k - m + 1.0)
    }

    fn xlny(x: f64, y: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            x * y.ln()
        }
    }

    pub fn root_cluster_pmf(n: usize, k: usize, m: usize) -> f64 {
        assert!(m <= k && k <= n && n >= 1);
        let (nf, kf, mf) = (n as f64, k as f64, m as f64);
        if m == 0 {
            return 1.0 - kf / nf;
        }
        if k == n {
            return if m == n { 1.0 } else { 0.0 };
        }
        let ln = xlny(mf, mf) + (nf - kf).ln() + (kf - mf - 1.0) * (nf - mf).ln() - kf * nf.ln() + ln_binom(kf, mf);
        ln.exp()
    }

    pub fn expected_components(n: usize, k: usize, r: usize) -> f64 {
        assert!(1 <= r && r <= k && k <= n);
        if k == n {
            return if r == n { 1.0 } else { 0.0 };
        }
        let (nf, kf, rf) = (n as f64, k as f64, r as f64);
        let ln = ln_binom(kf, rf) + (rf - 1.0) * (rf / nf).ln() + (1.0 - kf / nf).ln() + (kf - rf - 1.0) * (1.0 - rf / nf).ln();
        ln.exp()
    }

    /// `E R_n^(k)` via the falling-factorial sum.
    pub fn root_cluster_expectation(n: usize, k: usize) -> f64 {
        let nf = n as f64;
        let mut term = 1.0;
        let mut total = 0.0;
        for j in 1..=k {
            term *= (k - j + 1) as f64 / nf;
            if term == 0.0 {
                break;
            }
            total += j as f64 * term;
        }
        total
    }
}

/// Convenience for tests and reports: `|a - b|` as an exact value.
pub fn abs_diff(a: &ExactValue, b: &ExactValue) -> ExactValue {
    ExactValue((&a.0 - &b.0).abs())
}

/// Greatest common divisor helper exposed for reduced-form assertions.
pub fn is_reduced(v: &ExactValue) -> bool {
    v.0.numer().gcd(v.0.denom()).is_one() && v.0.denom().is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(num: i64, den: i64) -> ExactValue {
        ExactValue::ratio(num, den)
    }

    #[test]
    fn binomial_conventions() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(5, -1), BigInt::zero());
        assert_eq!(binomial(2, 3), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::one());
        assert_eq!(binomial(-1, 0), BigInt::one());
        assert_eq!(binomial(-1, 3), BigInt::from(-1));
        assert_eq!(binomial(60, 30), "118264581564861424".parse::<BigInt>().unwrap());
    }

    #[test]
    fn display_forms() {
        assert_eq!(ev(4, 9).to_string(), "4/9");
        assert_eq!(ev(6, 3).to_string(), "2");
        assert_eq!(ev(-1, 2).to_string(), "-1/2");
        assert!(is_reduced(&ev(6, 4)));
    }

    #[test]
    fn edge_moments() {
        assert_eq!(expected_edges(4, 3).unwrap(), ev(3, 2));
        assert_eq!(expected_edges(9, 1).unwrap(), ev(0, 1));
        assert_eq!(expected_edges(9, 9).unwrap(), ev(8, 1));
        assert!(expected_edges(4, 5).is_err());
        assert!(expected_edges(4, 0).is_err());
        assert_eq!(variance_edges(7, 1).unwrap(), ev(0, 1));
        assert_eq!(variance_edges(7, 7).unwrap(), ev(0, 1));
        assert_eq!(variance_edges(4, 2).unwrap(), ev(1, 4));
        assert!(variance_edges(4, 5).is_err());
    }

    #[test]
    fn variance_matches_recurrence_sum() {
        // V K_k = sum_{j=1}^{k-1} ((n-k)/(n-j-1))^2 (n-j-1)(2n-j-1) j / ((n-j) n^2)
        for n in 3..=25i64 {
            for k in 1..n {
                let mut s = BigRational::zero();
                for j in 1..k {
                    let f = rat(n - k, n - j - 1);
                    s += &f * &f * rat((n - j - 1) * (2 * n - j - 1) * j, (n - j) * n * n);
                }
                assert_eq!(variance_edges(n as usize, k as usize).unwrap().0, s, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn partial_sequence_examples() {
        let c = SequenceConstraint::new(3, vec![2], vec![1]).unwrap();
        assert_eq!(count_trees_partial_sequence(&c).unwrap(), ev(2, 1));
        let c = SequenceConstraint::new(3, vec![2], vec![0]).unwrap();
        assert_eq!(count_trees_partial_sequence(&c).unwrap(), ev(1, 1));
        for n in 3..=8usize {
            let total: ExactValue = (0..=1)
                .map(|a| count_trees_partial_sequence(&SequenceConstraint::new(n, vec![2], vec![a]).unwrap()).unwrap())
                .sum();
            assert_eq!(total, ExactValue::from_int(BigInt::from(n).pow(n as u32 - 2)));
        }
    }

    #[test]
    fn sequence_constraint_validation() {
        assert!(SequenceConstraint::new(5, vec![], vec![]).is_err());
        assert!(SequenceConstraint::new(5, vec![1], vec![0]).is_err());
        assert!(SequenceConstraint::new(5, vec![5], vec![0]).is_err());
        assert!(SequenceConstraint::new(5, vec![3, 2], vec![0, 0]).is_err());
        assert!(SequenceConstraint::new(5, vec![2, 3], vec![1, 0]).is_err());
        assert!(SequenceConstraint::new(5, vec![2], vec![2]).is_err());
        assert!(SequenceConstraint::new(5, vec![2, 3], vec![1]).is_err());
    }

    #[test]
    fn full_sequence_examples() {
        for n in 2..=9usize {
            let mut star = vec![0; n];
            star[n - 1] = n - 1;
            assert_eq!(count_trees_full_sequence(&star).unwrap(), ExactValue::one());
            let path: Vec<usize> = (0..n).collect();
            let fact: BigInt = (1..n).map(BigInt::from).product();
            assert_eq!(count_trees_full_sequence(&path).unwrap(), ExactValue::from_int(fact));
        }
        assert_eq!(count_trees_full_sequence(&[0, 0, 2]).unwrap(), ev(1, 1));
        assert_eq!(count_trees_full_sequence(&[0, 1, 2]).unwrap(), ev(2, 1));
        assert_eq!(count_trees_full_sequence(&[0]).unwrap(), ev(1, 1));
        assert!(count_trees_full_sequence(&[0, 2, 2]).is_err());
        assert!(count_trees_full_sequence(&[0, 1, 1]).is_err());
        assert!(count_trees_full_sequence(&[1, 1]).is_err());
        assert!(count_trees_full_sequence(&[]).is_err());
    }

    #[test]
    fn cluster_count_examples() {
        assert_eq!(count_trees_with_clusters(3, 2, &[2]).unwrap(), ev(2, 1));
        assert_eq!(count_trees_with_clusters(3, 2, &[1]).unwrap(), ev(1, 1));
        assert_eq!(count_trees_with_clusters(4, 2, &[2]).unwrap(), ev(8, 1));
        assert_eq!(count_trees_with_clusters(5, 5, &[5]).unwrap(), ev(125, 1));
        assert_eq!(count_trees_with_clusters(5, 5, &[2]).unwrap(), ev(0, 1));
        assert_eq!(count_trees_with_clusters(5, 3, &[]).unwrap(), ev(125, 1));
        assert!(count_trees_with_clusters(4, 2, &[2, 1]).is_err());
        assert!(count_trees_with_clusters(4, 2, &[0]).is_err());
        assert!(count_trees_with_clusters(4, 5, &[1]).is_err());
    }

    #[test]
    fn root_cluster_pmf_examples() {
        assert_eq!(root_cluster_pmf(2, 1, 0).unwrap(), ev(1, 2));
        assert_eq!(root_cluster_pmf(2, 1, 1).unwrap(), ev(1, 2));
        for n in 1..=6 {
            assert_eq!(root_cluster_pmf(n, n, n).unwrap(), ExactValue::one());
        }
        assert_eq!(root_cluster_pmf(3, 2, 2).unwrap(), ev(4, 9));
        assert!(root_cluster_pmf(3, 2, 3).is_err());
        assert!(root_cluster_pmf(3, 4, 1).is_err());
        assert!(root_cluster_pmf(0, 0, 0).is_err());
    }

    #[test]
    fn rooted_counts() {
        assert_eq!(count_rooted_trees_root_cluster(2, 1, 0).unwrap(), ev(2, 1));
        assert_eq!(count_rooted_trees_root_cluster(2, 1, 1).unwrap(), ev(2, 1));
        for n in 1..=7usize {
            let rooted = BigInt::from(n).pow(n as u32 - 1);
            for k in 0..=n {
                let total: ExactValue = (0..=k).map(|m| count_rooted_trees_root_cluster(n, k, m).unwrap()).sum();
                let expect = ExactValue::from_int(&rooted * binomial(n as i64, k as i64));
                assert_eq!(total, expect, "n={n} k={k}");
                for m in 0..=k {
                    let f = count_rooted_trees_root_cluster(n, k, m).unwrap().0;
                    let p = f / int(&rooted * binomial(n as i64, k as i64));
                    assert_eq!(p, root_cluster_pmf(n, k, m).unwrap().0);
                }
            }
        }
    }

    #[test]
    fn root_cluster_mean_examples() {
        assert_eq!(root_cluster_expectation(2, 1).unwrap(), ev(1, 2));
        assert_eq!(root_cluster_expectation(3, 2).unwrap(), ev(10, 9));
        assert_eq!(root_cluster_expectation(5, 0).unwrap(), ExactValue::zero());
        for n in 1..=8 {
            assert_eq!(root_cluster_expectation(n, n).unwrap(), ExactValue::from_int(n as i64));
        }
        assert!(root_cluster_expectation(3, 4).is_err());
    }

    #[test]
    fn vertex_cluster_pmf() {
        assert_eq!(uncovered_vertex_cluster_pmf(2, 1, 1).unwrap(), ev(1, 1));
        assert_eq!(uncovered_vertex_cluster_pmf(3, 2, 2).unwrap(), ev(2, 3));
        assert!(uncovered_vertex_cluster_pmf(3, 2, 0).is_err());
        for n in 1..=7 {
            for k in 1..=n {
                let s: ExactValue = (1..=k).map(|m| uncovered_vertex_cluster_pmf(n, k, m).unwrap()).sum();
                assert_eq!(s, ExactValue::one());
            }
        }
    }

    #[test]
    fn expected_component_examples() {
        assert_eq!(expected_components(3, 2, 2).unwrap(), ev(2, 3));
        assert_eq!(expected_components(6, 6, 6).unwrap(), ExactValue::one());
        assert_eq!(expected_components(6, 6, 2).unwrap(), ExactValue::zero());
        assert_eq!(expected_components(4, 2, 1).unwrap(), ev(1, 1));
        assert!(expected_components(4, 2, 0).is_err());
        assert!(expected_components(4, 2, 3).is_err());
    }

    #[test]
    fn abel_examples() {
        assert!(abel_identity_check(3, 2).unwrap());
        assert!(abel_identity_check(2, 1).unwrap());
        assert!(abel_identity_check(3, 3).is_err());
        assert!(abel_identity_check(3, 0).is_err());
    }

    #[test]
    fn float_helpers_track_exact() {
        for (n, k) in [(50, 25), (12, 11), (30, 3), (9, 9)] {
            for m in 0..=k {
                let e = root_cluster_pmf(n, k, m).unwrap().to_f64();
                let f = float::root_cluster_pmf(n, k, m);
                assert!((e - f).abs() <= 1e-12 * e.max(1e-300) + 1e-300, "n={n} k={k} m={m}: {e} vs {f}");
            }
            for r in 1..=k {
                let e = expected_components(n, k, r).unwrap().to_f64();
                let f = float::expected_components(n, k, r);
                assert!((e - f).abs() <= 1e-11 * e.abs() + 1e-300, "n={n} k={k} r={r}");
            }
            let e = root_cluster_expectation(n, k).unwrap().to_f64();
            assert!((e - float::root_cluster_expectation(n, k)).abs() < 1e-12 * e.max(1.0));
        }
    }
}
