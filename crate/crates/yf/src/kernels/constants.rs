//! Exact evaluators for the Γ-ratio constants attached to the differential operators.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exact_core::nf::NfElem;
use crate::exact_core::rational::{binomial, factorial, ri, rising, rpow, rq, Rational};
use crate::exact_core::symbolic::SymbolicConstant;
use crate::Error;

/// C_n(s) = s(s + 1/2)···(s + (n−1)/2).
pub fn c_n(n: u32, s: &Rational) -> Rational {
    (0..n).map(|j| s + rq(j as i64, 2)).product()
}

/// Γ_n(s + m)/Γ_n(s) for an integer shift m, with Γ_n(s) = π^{n(n−1)/4} ∏_{j<n} Γ(s − j/2).
pub fn gamma_n_shift(n: u32, s: &Rational, m: i64) -> Result<Rational, Error> {
    let mut out = Rational::one();
    for j in 0..n {
        let x = s - rq(j as i64, 2);
        if m >= 0 {
            out *= rising(&x, m as u32);
        } else {
            let d = rising(&(&x + ri(m)), (-m) as u32);
            if d.is_zero() {
                return Err(Error::Domain(format!("Gamma_n({}) has a pole", s)));
            }
            out /= d;
        }
    }
    Ok(out)
}

/// C_α(μ,ν) = 1/((α+μ)^{[ν]} ν!) · ∏_{j<μ} C_n(α − n + (μ + ν/n + j)/2).
pub fn c_alpha(n: u32, alpha: &Rational, mu: u32, nu: u32) -> Result<Rational, Error> {
    let den = rising(&(alpha + ri(mu as i64)), nu) * Rational::from_integer(factorial(nu));
    if den.is_zero() {
        return Err(Error::ExcludedWeight(format!("(alpha+mu)^[nu] vanishes at alpha = {}", alpha)));
    }
    let nup = rq(nu as i64, n as i64);
    let mut p = Rational::one();
    for j in 0..mu {
        let s = alpha - ri(n as i64) + (ri(mu as i64) + &nup + ri(j as i64)) / ri(2);
        p *= c_n(n, &s);
    }
    Ok(p / den)
}

/// A_{α,μ} = Γ_n(α+μ)/Γ_n(α) · Γ_n(α+μ−n/2)/Γ_n(α−n/2).
pub fn a_const(n: u32, alpha: &Rational, mu: u32) -> Result<Rational, Error> {
    Ok(gamma_n_shift(n, alpha, mu as i64)? * gamma_n_shift(n, &(alpha - rq(n as i64, 2)), mu as i64)?)
}

/// B_{α,ν} = 1/((−2πi)^ν ν!) · Γ(2α−2+ν)/Γ(2α−2) · Γ(α−1)/Γ(α+ν−1).
pub fn b_const(alpha: &Rational, nu: u32) -> Result<SymbolicConstant, Error> {
    let den = rising(&(alpha - ri(1)), nu);
    if den.is_zero() {
        return Err(Error::Domain(format!("Gamma(alpha+nu-1) pole in B at alpha = {}", alpha)));
    }
    let r = rising(&(ri(2) * alpha - ri(2)), nu) / den / Rational::from_integer(factorial(nu));
    // (−2πi)^{−ν} = (−2)^{−ν} π^{−ν} i^{−ν}
    let unit = SymbolicConstant::new(NfElem::rational(rpow(&ri(-2), -(nu as i64))), -(nu as i32), -(nu as i64), BigInt::one())?;
    Ok(unit.scale(&r))
}

/// Γ(x) for x a positive integer, or a positive half-integer as rational·√π (second value true).
fn gamma_half(x: &Rational) -> Result<(Rational, bool), Error> {
    let two_x = x * ri(2);
    if !two_x.is_integer() || x <= &Rational::zero() {
        return Err(Error::Domain(format!("Gamma({}) is not a positive integer or half-integer value", x)));
    }
    if x.is_integer() {
        let m: u32 = num_traits::ToPrimitive::to_u32(&x.to_integer()).unwrap();
        Ok((Rational::from_integer(factorial(m - 1)), false))
    } else {
        // Γ(h + 1/2) = Γ(1/2)·(1/2)^{[h]}
        let h = x - rq(1, 2);
        let hu: u32 = num_traits::ToPrimitive::to_u32(&h.to_integer()).unwrap();
        Ok((rising(&rq(1, 2), hu), true))
    }
}

/// The Hua-type integral I(α,ν) = π^{n(n+1)/2}/(α+n+ν) · ∏_{j=1}^{n−1} (2α+2j+1)(n+j+2α)^{[ν]} / ((α+j) Γ(ν+n+j+2α+1)).
pub fn hua_integral(n: u32, alpha: &Rational, nu: u32) -> Result<SymbolicConstant, Error> {
    let top = alpha + ri((n + nu) as i64);
    if top.is_zero() {
        return Err(Error::Domain("alpha + n + nu = 0".into()));
    }
    let mut r = top.recip();
    let mut half_count = 0u32;
    for j in 1..n {
        let jr = ri(j as i64);
        let aj = alpha + &jr;
        if aj.is_zero() {
            return Err(Error::Domain(format!("alpha + {} = 0", j)));
        }
        let (g, half) = gamma_half(&(ri((nu + n + j + 1) as i64) + ri(2) * alpha))?;
        if half {
            half_count += 1;
        }
        r *= (ri(2) * alpha + ri(2) * &jr + ri(1)) * rising(&(ri((n + j) as i64) + ri(2) * alpha), nu) / (aj * g);
    }
    if half_count % 2 == 1 {
        return Err(Error::Domain("I(alpha, nu) carries an odd power of sqrt(pi)".into()));
    }
    let pi_pow = (n * (n + 1) / 2) as i32 - (half_count / 2) as i32;
    Ok(SymbolicConstant::pi_power(r, pi_pow))
}

/// Both readings of γ_n(k,μ,ν,s) = i^{nk+nμ+ν} 2^E A_{k+s,μ} B_{k+μ+s,ν} I(s+k+μ−n−1, ν):
/// E = n(n−k−μ−2s−ν+1) and E = n(n−k−μ−2s−ν)+1.
pub fn gamma_n_const(n: u32, k: i64, mu: u32, nu: u32, s: &Rational) -> Result<(SymbolicConstant, SymbolicConstant), Error> {
    let nr = ri(n as i64);
    let base = &nr - ri(k) - ri(mu as i64) - ri(2) * s - ri(nu as i64);
    let e1 = &nr * (&base + ri(1));
    let e2 = &nr * &base + ri(1);
    if !e1.is_integer() || !e2.is_integer() {
        return Err(Error::Domain("power of 2 in gamma_n is not integral".into()));
    }
    let ks = ri(k) + s;
    let a = a_const(n, &ks, mu)?;
    let b = b_const(&(&ks + ri(mu as i64)), nu)?;
    let i = hua_integral(n, &(&ks + ri(mu as i64) - ri(n as i64 + 1)), nu)?;
    let ipow = n as i64 * k + (n * mu + nu) as i64;
    let unit = SymbolicConstant::new(NfElem::rational(ri(1)), 0, ipow, BigInt::one())?;
    let core = unit.mul(&b).mul(&i).scale(&a);
    let to_i = |e: &Rational| num_traits::ToPrimitive::to_i64(&e.to_integer()).unwrap();
    Ok((core.scale(&rpow(&ri(2), to_i(&e1))), core.scale(&rpow(&ri(2), to_i(&e2)))))
}

/// c₆ = C₂(ν₁−ν₂, 2ν₂) at α = 2, n = 2.
pub fn c6(nu1: u32, nu2: u32) -> Result<Rational, Error> {
    if nu1 < nu2 {
        return Err(Error::Domain("c6 needs nu1 >= nu2".into()));
    }
    c_alpha(2, &ri(2), nu1 - nu2, 2 * nu2)
}

/// c₇ = c₆ · ν₁!/ν₂! · binom(2ν₁, ν₁) binom(2ν₂, ν₂).
pub fn c7(nu1: u32, nu2: u32) -> Result<Rational, Error> {
    Ok(c6(nu1, nu2)? * Rational::new(factorial(nu1), factorial(nu2)) * Rational::from_integer(binomial(2 * nu1, nu1) * binomial(2 * nu2, nu2)))
}

/// c₈⁻¹ = 2⁶ (ν₂+1)² π^{2+2ν₁+2ν₂}.
pub fn c8_inv(nu1: u32, nu2: u32) -> SymbolicConstant {
    let r = ri(64) * ri((nu2 + 1) as i64).pow(2);
    SymbolicConstant::pi_power(r, (2 + 2 * nu1 + 2 * nu2) as i32)
}

pub fn c8(nu1: u32, nu2: u32) -> SymbolicConstant {
    c8_inv(nu1, nu2).inv().expect("nonzero")
}

/// c = (−1)^{ν₂} 2π/(2ν₂+2).
pub fn c_wald(nu2: u32) -> SymbolicConstant {
    let sign = if nu2.is_multiple_of(2) { ri(1) } else { ri(-1) };
    SymbolicConstant::pi_power(sign * ri(2) / ri(2 * nu2 as i64 + 2), 1)
}

/// c₃ = (2πi)^{k′−k}.
pub fn c3(k: i64, kp: i64) -> Result<SymbolicConstant, Error> {
    let e = kp - k;
    SymbolicConstant::new(NfElem::rational(rpow(&ri(2), e)), e as i32, e, BigInt::one())
}

/// One ledger row: the symbol, the parameter tuple and the value.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry {
    pub symbol: String,
    pub params: Vec<String>,
    pub value: SymbolicConstant,
}

/// Append-only record of evaluated constants.
#[derive(Clone, Debug, Default)]
pub struct ConstantsLedger {
    entries: Vec<LedgerEntry>,
}

impl ConstantsLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    /// Evaluates and appends; returns the value.
    pub fn record(&mut self, symbol: &str, params: &[&str]) -> Result<SymbolicConstant, Error> {
        let v = constants(symbol, params)?;
        self.entries.push(LedgerEntry {
            symbol: symbol.to_string(),
            params: params.iter().map(|s| s.to_string()).collect(),
            value: v.clone(),
        });
        Ok(v)
    }

    /// Re-evaluates every entry from its formula.
    pub fn verify(&self) -> Result<bool, Error> {
        for e in &self.entries {
            let p: Vec<&str> = e.params.iter().map(|s| s.as_str()).collect();
            if constants(&e.symbol, &p)? != e.value {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn parse_rat(s: &str) -> Result<Rational, Error> {
    let bad = || Error::Domain(format!("cannot parse rational '{}'", s));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(a, b))
        }
        None => Ok(Rational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

fn parse_u32(s: &str) -> Result<u32, Error> {
    s.trim()
        .parse()
        .map_err(|_| Error::Domain(format!("expected a nonnegative integer, got '{}'", s)))
}

/// Symbol names and parameter order:
/// `C_n n s`, `C_alpha n alpha mu nu`, `A n alpha mu`, `B alpha nu`, `I n alpha nu`,
/// `gamma_n_a|gamma_n_b n k mu nu s`, `c3 k k'`, `c6|c7|c8|c8_inv nu1 nu2`, `c nu2`.
pub fn constants(symbol: &str, params: &[&str]) -> Result<SymbolicConstant, Error> {
    let need = |k: usize| -> Result<(), Error> {
        if params.len() != k {
            Err(Error::Domain(format!("{} takes {} parameters, got {}", symbol, k, params.len())))
        } else {
            Ok(())
        }
    };
    let rat = SymbolicConstant::rational;
    match symbol {
        "C_n" => {
            need(2)?;
            Ok(rat(c_n(parse_u32(params[0])?, &parse_rat(params[1])?)))
        }
        "C_alpha" => {
            need(4)?;
            Ok(rat(c_alpha(
                parse_u32(params[0])?,
                &parse_rat(params[1])?,
                parse_u32(params[2])?,
                parse_u32(params[3])?,
            )?))
        }
        "A" => {
            need(3)?;
            Ok(rat(a_const(parse_u32(params[0])?, &parse_rat(params[1])?, parse_u32(params[2])?)?))
        }
        "B" => {
            need(2)?;
            b_const(&parse_rat(params[0])?, parse_u32(params[1])?)
        }
        "I" => {
            need(3)?;
            hua_integral(parse_u32(params[0])?, &parse_rat(params[1])?, parse_u32(params[2])?)
        }
        "gamma_n_a" | "gamma_n_b" => {
            need(5)?;
            let k: i64 = parse_rat(params[1])?.to_integer().try_into().map_err(|_| Error::Domain("k too large".into()))?;
            let (a, b) = gamma_n_const(parse_u32(params[0])?, k, parse_u32(params[2])?, parse_u32(params[3])?, &parse_rat(params[4])?)?;
            Ok(if symbol == "gamma_n_a" { a } else { b })
        }
        "c3" => {
            need(2)?;
            let k: i64 = parse_rat(params[0])?.to_integer().try_into().map_err(|_| Error::Domain("k too large".into()))?;
            let kp: i64 = parse_rat(params[1])?
                .to_integer()
                .try_into()
                .map_err(|_| Error::Domain("k' too large".into()))?;
            c3(k, kp)
        }
        "c6" | "c7" | "c8" | "c8_inv" => {
            need(2)?;
            let (a, b) = (parse_u32(params[0])?, parse_u32(params[1])?);
            match symbol {
                "c6" => Ok(rat(c6(a, b)?)),
                "c7" => Ok(rat(c7(a, b)?)),
                "c8" => Ok(c8(a, b)),
                _ => Ok(c8_inv(a, b)),
            }
        }
        "c" => {
            need(1)?;
            Ok(c_wald(parse_u32(params[0])?))
        }
        _ => Err(Error::Domain(format!("unknown constant '{}'", symbol))),
    }
}
