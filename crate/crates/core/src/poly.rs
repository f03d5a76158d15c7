//! Integer and real polynomials, the W-trick and the V-trick.

use crate::error::{arg, Error, Result};
use crate::grid::dist_z;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;
use std::fmt;

/// Integer polynomial; `coeffs[j]` is the coefficient of z^j, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    /// The monomial z.
    pub fn z() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> BigInt {
        self.coeffs.get(j).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, z: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Exact evaluation, failing if the value does not fit in an i64.
    pub fn eval_i64(&self, z: i64) -> Result<i64> {
        self.eval(&BigInt::from(z)).to_i64().ok_or(Error::Overflow)
    }

    /// Values at z = 0, 1, ..., k-1.
    pub fn values_on(&self, k: usize) -> Result<Vec<i64>> {
        (0..k as i64).map(|z| self.eval_i64(z)).collect()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * BigInt::from(j))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|j| self.coeff(j) + other.coeff(j)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|a| -a).collect())
    }

    /// Q(a z + b).
    pub fn compose_affine(&self, a: &BigInt, b: &BigInt) -> Self {
        let lin = Self::new(vec![b.clone(), a.clone()]);
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Self::new(vec![c.clone()]));
        }
        acc
    }

    /// Division by `d`, or `None` if some coefficient is not divisible.
    pub fn div_exact(&self, d: &BigInt) -> Option<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(Self::new(out))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut coeffs: Vec<BigInt> = Vec::new();
        for (c, p) in parse_terms(text)? {
            let v = parse_int_coeff(&c)?;
            if coeffs.len() <= p {
                coeffs.resize(p + 1, BigInt::zero());
            }
            coeffs[p] += v;
        }
        Ok(Self::new(coeffs))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cs: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|c| match c.to_i64() {
                Some(v) => json!(v),
                None => json!(c.to_string()),
            })
            .collect();
        json!({ "coeffs": cs })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let arr = v
            .get("coeffs")
            .and_then(|c| c.as_array())
            .ok_or_else(|| Error::Parse("expected {\"coeffs\": [...]}".into()))?;
        let mut coeffs = Vec::with_capacity(arr.len());
        for c in arr {
            let s = match c {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            coeffs.push(parse_int_coeff(&s)?);
        }
        Ok(Self::new(coeffs))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                write!(f, "{}", if c.is_negative() { "" } else { "+" })?;
            }
            match j {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z")?,
                _ => write!(f, "{c}*z^{j}")?,
            }
        }
        Ok(())
    }
}

fn parse_int_coeff(s: &str) -> Result<BigInt> {
    if let Ok(v) = s.parse::<BigInt>() {
        return Ok(v);
    }
    let x: f64 = s.parse().map_err(|_| Error::Parse(format!("bad coefficient '{s}'")))?;
    if x.fract() != 0.0 || !x.is_finite() {
        return Err(Error::Parse(format!("coefficient '{s}' is not an integer")));
    }
    Ok(BigInt::from(x as i128))
}

/// Splits "c0+c1*z+c2*z^2" into (coefficient text, power) pairs.
fn parse_terms(text: &str) -> Result<Vec<(String, usize)>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let bytes = s.as_bytes();
    let mut terms = Vec::new();
    let mut start = 0;
    for i in 1..bytes.len() {
        let c = bytes[i];
        let prev = bytes[i - 1];
        if (c == b'+' || c == b'-') && !matches!(prev, b'e' | b'E' | b'^' | b'*' | b'+' | b'-') {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    let mut out = Vec::new();
    for t in terms {
        let (sign, body) = match t.as_bytes()[0] {
            b'+' => ("", &t[1..]),
            b'-' => ("-", &t[1..]),
            _ => ("", t),
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("dangling sign in '{text}'")));
        }
        let (coef, power) = match body.find('z') {
            None => (body.to_string(), 0usize),
            Some(pos) => {
                let head = body[..pos].trim_end_matches('*');
                let tail = &body[pos + 1..];
                let power = if tail.is_empty() {
                    1
                } else {
                    tail.strip_prefix('^')
                        .and_then(|p| p.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse(format!("bad power in term '{t}'")))?
                };
                (if head.is_empty() { "1".to_string() } else { head.to_string() }, power)
            }
        };
        out.push((format!("{sign}{coef}"), power));
    }
    Ok(out)
}

/// Real polynomial; `coeffs[j]` is alpha_j.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return arg("coefficients must be finite");
        }
        Ok(RealPolynomial { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut coeffs: Vec<f64> = Vec::new();
        for (c, p) in parse_terms(text)? {
            let v: f64 = c.parse().map_err(|_| Error::Parse(format!("bad coefficient '{c}'")))?;
            if coeffs.len() <= p {
                coeffs.resize(p + 1, 0.0);
            }
            coeffs[p] += v;
        }
        Self::new(coeffs)
    }

    /// R(Q(z)) for an integer polynomial Q, in floating point.
    pub fn compose_int(&self, q: &IntPolynomial) -> RealPolynomial {
        let qf: Vec<f64> = q.coeffs().iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY)).collect();
        let mut acc: Vec<f64> = Vec::new();
        for &c in self.coeffs.iter().rev() {
            let mut next = vec![0.0; (acc.len() + qf.len()).max(1)];
            for (i, a) in acc.iter().enumerate() {
                for (j, b) in qf.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            next[0] += c;
            acc = next;
        }
        RealPolynomial { coeffs: acc }
    }
}

/// max_{1 <= j <= D} T^j * ||alpha_j||_{R/Z}.
pub fn smoothness_norm(p: &RealPolynomial, t: f64) -> Result<f64> {
    let d = p.degree();
    if d == 0 {
        return Err(Error::Degree("degree-zero".into()));
    }
    Ok((1..=d)
        .map(|j| t.powi(j as i32) * dist_z(p.coeffs[j]))
        .fold(0.0, f64::max))
}

/// Q_{[r,V]}(z) = (Q(Vz + r) - Q(r)) / V.
pub fn v_trick_poly(q: &IntPolynomial, r: i64, v: i64) -> Result<IntPolynomial> {
    if v <= 0 {
        return arg("V must be positive");
    }
    if !(0..v).contains(&r) {
        return arg("residue must lie in [0, V)");
    }
    let (vb, rb) = (BigInt::from(v), BigInt::from(r));
    let shifted = q.compose_affine(&vb, &rb);
    let qr = q.eval(&rb);
    let num = shifted.add(&IntPolynomial::new(vec![-qr]));
    Ok(num.div_exact(&vb).expect("binomial theorem guarantees divisibility"))
}

pub fn primes_below(w: f64) -> Vec<u64> {
    if w <= 2.0 {
        return Vec::new();
    }
    let limit = w.ceil() as usize;
    let mut sieve = vec![true; limit];
    let mut out = Vec::new();
    for p in 2..limit {
        if sieve[p] {
            if (p as f64) < w {
                out.push(p as u64);
            }
            let mut m = p * p;
            while m < limit {
                sieve[m] = false;
                m += p;
            }
        }
    }
    out
}

/// Product of the primes p < w.
pub fn primorial(w: f64) -> BigInt {
    primes_below(w).into_iter().fold(BigInt::one(), |acc, p| acc * p)
}

/// Sieving state for the W-trick.
#[derive(Debug, Clone, PartialEq)]
pub struct WTrickContext {
    pub w: f64,
    pub big_w: BigInt,
    pub rho: BigInt,
    /// The polynomial actually used, after the sign normalisation.
    pub p: IntPolynomial,
    /// True when P was replaced by -P to make beta_d positive.
    pub negated: bool,
    /// beta_1, ..., beta_d from P(z - rho) = beta_d z^d + ... + beta_1 z.
    pub beta: Vec<BigInt>,
    pub p_tilde: IntPolynomial,
    pub w_d: BigInt,
}

impl WTrickContext {
    pub fn degree(&self) -> usize {
        self.p.degree()
    }

    pub fn beta1(&self) -> &BigInt {
        &self.beta[0]
    }

    pub fn beta_d(&self) -> &BigInt {
        self.beta.last().expect("degree >= 2")
    }

    /// K = floor((N / W_d)^{1/d}), the largest K with W_d K^d <= N.
    pub fn k_for(&self, n: u64) -> usize {
        int_root_floor(&(BigInt::from(n) / &self.w_d), self.degree() as u32)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "w": self.w,
            "W": self.big_w.to_string(),
            "rho": self.rho.to_string(),
            "negated": self.negated,
            "beta": self.beta.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "p_tilde": self.p_tilde.to_json(),
            "W_d": self.w_d.to_string(),
        })
    }
}

/// Largest k with k^d <= m (m >= 0).
pub fn int_root_floor(m: &BigInt, d: u32) -> usize {
    if m.is_negative() || m.is_zero() {
        return 0;
    }
    let guess = m.to_f64().unwrap_or(f64::MAX).powf(1.0 / d as f64).floor() as u64;
    let mut k = BigInt::from(guess);
    while k.pow(d) > *m {
        k -= 1;
    }
    while (&k + 1u32).pow(d) <= *m {
        k += 1;
    }
    k.to_usize().unwrap_or(usize::MAX)
}

/// Builds P~(z) = P(beta_1 W z - rho) / (beta_1^2 W).
///
/// The root convention follows the expansion P(z - rho) = beta_d z^d + ... + beta_1 z,
/// so `rho` must satisfy P(-rho) = 0.
pub fn build_w_trick(p: &IntPolynomial, rho: i64, w: f64) -> Result<WTrickContext> {
    if p.degree() < 2 || p.is_zero() {
        return Err(Error::Degree("deg P >= 2 required".into()));
    }
    if !w.is_finite() {
        return arg("w must be finite");
    }
    let rho_b = BigInt::from(rho);
    let at_root = -&rho_b;
    if !p.eval(&at_root).is_zero() {
        return Err(Error::NotARoot);
    }
    if p.derivative().eval(&at_root).is_zero() {
        return Err(Error::RootMultiplicity);
    }
    let shifted = p.compose_affine(&BigInt::one(), &at_root);
    let (p_used, shifted, negated) = if shifted.leading().is_negative() {
        (p.neg(), shifted.neg(), true)
    } else {
        (p.clone(), shifted, false)
    };
    let beta: Vec<BigInt> = (1..=shifted.degree()).map(|j| shifted.coeff(j)).collect();
    let big_w = primorial(w);
    let b1 = beta[0].clone();
    let numer = p_used.compose_affine(&(&b1 * &big_w), &at_root);
    let denom = &b1 * &b1 * &big_w;
    let p_tilde = numer
        .div_exact(&denom)
        .expect("P(beta_1 W z - rho) is divisible by beta_1^2 W");
    let d = shifted.degree() as u32;
    let w_d = beta.last().unwrap() * b1.pow(d - 2) * big_w.pow(d - 1);
    assert!(p_tilde.coeff(0).is_zero());
    assert!(p_tilde.coeff(1).is_one());
    assert_eq!(p_tilde.leading(), w_d);
    Ok(WTrickContext { w, big_w, rho: rho_b, p: p_used, negated, beta, p_tilde, w_d })
}

/// Leading coefficient V_d of P~_{[r,V]}; equals W_d V^{d-1}.
pub fn leading_coeff_vd(ctx: &WTrickContext, v: i64, r: i64) -> Result<BigInt> {
    let q = v_trick_poly(&ctx.p_tilde, r.rem_euclid(v.max(1)), v)?;
    let lead = q.leading();
    debug_assert_eq!(lead, &ctx.w_d * BigInt::from(v).pow(ctx.degree() as u32 - 1));
    Ok(lead)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coprimality {
    pub coprime: bool,
    pub reason: Option<String>,
}

/// Whether gcd(V_d, V_1) = 1 for P~_{[r,V]}, under the hypothesis that every
/// prime factor of beta_1 beta_d divides W.
pub fn gcd_coprimality_check(ctx: &WTrickContext, v: i64, r: i64) -> Result<Coprimality> {
    let mut rest = (ctx.beta1() * ctx.beta_d()).abs();
    loop {
        let g = rest.gcd(&ctx.big_w);
        if g.is_one() {
            break;
        }
        rest /= g;
    }
    if !rest.is_one() {
        return Ok(Coprimality { coprime: false, reason: Some("beta-prime-not-in-W".into()) });
    }
    let q = v_trick_poly(&ctx.p_tilde, r, v)?;
    let g = q.leading().gcd(&q.coeff(1));
    Ok(Coprimality { coprime: g.is_one(), reason: None })
}
