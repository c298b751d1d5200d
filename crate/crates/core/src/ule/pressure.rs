use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::{irreducibility_test, Config, Criterion, Decision, Irreducibility, PressureReport, UleVerdict};
use crate::error::{contract, Error, Result};
use crate::exec::{self, Executor, Sequential};
use crate::graph;
use crate::matrix::{kron_power, Mat, MatTuple};
use crate::spectral;

fn check_even(q: u32) -> Result<()> {
    if q == 0 || q % 2 == 1 {
        return Err(contract("pressure through tensor powers needs a positive even q"));
    }
    Ok(())
}

fn nilpotency_index(s: &Mat) -> usize {
    let mut p = s.clone();
    for n in 1..=s.dim() + 1 {
        if p.is_zero() {
            return n;
        }
        p = p.mul(s);
    }
    s.dim() + 1
}

fn log_rho_or_degenerate(s: &Mat, tol: f64) -> Result<f64> {
    spectral::log_spectral_radius(s, tol)?.ok_or_else(|| Error::Degenerate(nilpotency_index(s)))
}

/// `P(M, q) = log ρ(Σ_i M_i^{⊗q})` for even `q`.
///
/// `Σ M_i^{⊗q}` leaves the symmetric tensors invariant, and for even `q` its
/// spectral radius is attained there: the restriction acts on homogeneous
/// polynomials of degree `q` as `p ↦ Σ_i p(M_iᵀ x)`, whose powers dominate
/// `Σ_{|J|=n} ‖M_J‖^q` up to constants. The reduced matrix has dimension
/// `C(d + q - 1, q)`, which must not exceed `cap`.
pub fn pressure_even(m: &MatTuple, q: u32, cap: usize, tol: f64) -> Result<f64> {
    check_even(q)?;
    let d = m.dim();
    let needed = spectral::sym_dim(d, q);
    if needed > cap as u128 {
        return Err(Error::Resource {
            what: "symmetric power dimension",
            needed,
            cap: cap as u128,
        });
    }
    let basis = spectral::monomials(d, q);
    let index: BTreeMap<Vec<u8>, usize> = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let mut s = Mat::zeros(basis.len());
    for a in m.mats() {
        s.add_assign(&spectral::sym_power(a, q, &basis, &index));
    }
    log_rho_or_degenerate(&s, tol)
}

/// `P(M, q)` from the full Kronecker powers (dimension `d^q ≤ cap`).
pub fn pressure_even_kron(m: &MatTuple, q: u32, cap: usize, tol: f64) -> Result<f64> {
    check_even(q)?;
    let mut s: Option<Mat> = None;
    for a in m.mats() {
        let kp = kron_power(a, q, cap)?;
        match &mut s {
            None => s = Some(kp),
            Some(acc) => acc.add_assign(&kp),
        }
    }
    log_rho_or_degenerate(&s.expect("nonempty tuple"), tol)
}

/// `(1/n) log Σ_{|J|=n} ‖M_J‖^q`, the `n`-th partition-sum estimate of the
/// pressure. Submultiplicativity makes it an upper bound for `P(M, q)`.
pub fn pressure_estimate(m: &MatTuple, q: f64, n: usize, cap: u64) -> Result<f64> {
    pressure_estimate_with(&Sequential, m, q, n, cap)
}

pub fn pressure_estimate_with<E: Executor>(exec: &E, m: &MatTuple, q: f64, n: usize, cap: u64) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) || n == 0 {
        return Err(contract("pressure estimates need q > 0 and n ≥ 1"));
    }
    // Work with norms at most 1 to keep q-th powers of long products finite.
    let c = m.mats().iter().map(Mat::norm).fold(0.0, f64::max);
    let scaled = m.scaled(1.0 / c);
    let k = m.k();
    let step = |p: &Mat, s: usize| {
        let r = p.mul(scaled.get(s));
        (!r.is_zero()).then_some(r)
    };
    let parts = exec.map(k, |first| {
        let mut sum = 0.0;
        if scaled.get(first).is_zero() {
            return Ok((0, sum));
        }
        let visited = exec::walk_words(
            k,
            first,
            n,
            scaled.get(first).clone(),
            &step,
            &mut |w: &[usize], p: &Mat| {
                if w.len() == n {
                    sum += libm::pow(p.norm(), q);
                }
            },
            cap,
        )?;
        Ok((visited, sum))
    });
    let total: f64 = exec::merge_counts(parts, cap)?.into_iter().sum();
    if total == 0.0 {
        return Err(Error::Degenerate(n));
    }
    Ok(libm::log(total) / n as f64 + q * libm::log(c))
}

/// Pressures at `q = 2, 4, 6`.
pub fn pressure_report(m: &MatTuple, cfg: &Config) -> Result<PressureReport> {
    let tol = cfg.tol * 1e-3;
    let p2 = pressure_even(m, 2, cfg.kron_cap, tol)?;
    let p4 = pressure_even(m, 4, cfg.kron_cap, tol)?;
    let p6 = pressure_even(m, 6, cfg.kron_cap, tol)?;
    Ok(PressureReport {
        p2,
        p4,
        p6,
        defect: p2 + p6 - 2.0 * p4,
    })
}

/// Criterion B: the property holds iff `P(2) + P(6) = 2 P(4)`.
///
/// Requires an irreducible or positively irreducible tuple. Positively
/// irreducible nonnegative tuples are accepted as they are; any other tuple
/// must pass [`irreducibility_test`], otherwise the verdict is downgraded to
/// `Inconclusive`.
pub fn criterion_b(m: &MatTuple, cfg: &Config) -> Result<UleVerdict> {
    let mut notes = Vec::new();
    let hypothesis = if m.is_nonnegative() && graph::is_positively_irreducible(m)? {
        notes.push("positively irreducible".to_string());
        true
    } else {
        match irreducibility_test(m, cfg.tol) {
            Irreducibility::Irreducible => {
                notes.push("irreducible".to_string());
                true
            }
            Irreducibility::Reducible { .. } => {
                notes.push("tuple is reducible; the pressure criterion does not apply".to_string());
                false
            }
            Irreducibility::Inconclusive { reason } => {
                notes.push(format!("irreducibility could not be confirmed: {reason}"));
                false
            }
        }
    };
    let report = pressure_report(m, cfg)?;
    let defect = report.defect;
    let mut decision = if defect.abs() <= cfg.tol {
        Decision::Yes
    } else if defect > 10.0 * cfg.tol {
        Decision::No
    } else {
        Decision::Inconclusive
    };
    if !hypothesis && decision != Decision::Inconclusive {
        notes.push(format!("decision {decision} withheld"));
        decision = Decision::Inconclusive;
    }
    let mut v = UleVerdict::new(Criterion::B, decision);
    if decision == Decision::Yes {
        v.lambda = Some((report.p4 - report.p2) / 2.0);
    }
    v.pressure = Some(report);
    v.notes = notes;
    Ok(v)
}

/// Extreme norms of the nonzero products of one length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub n: usize,
    /// `(min, max)` of `‖M_J‖` over nonzero `M_J`; `None` if all vanish.
    pub range: Option<(f64, f64)>,
    pub nonzero: u128,
}

/// Exact per-length minimum and maximum of `‖M_J‖` over nonzero products,
/// for `1 ≤ |J| ≤ n_max`.
pub fn norm_profile(m: &MatTuple, n_max: usize, cap: u64) -> Result<Vec<ProfileRow>> {
    norm_profile_with(&Sequential, m, n_max, cap)
}

pub fn norm_profile_with<E: Executor>(exec: &E, m: &MatTuple, n_max: usize, cap: u64) -> Result<Vec<ProfileRow>> {
    let k = m.k();
    let step = |p: &Mat, s: usize| {
        let r = p.mul(m.get(s));
        (!r.is_zero()).then_some(r)
    };
    let empty = || {
        (1..=n_max)
            .map(|n| ProfileRow {
                n,
                range: None,
                nonzero: 0,
            })
            .collect::<Vec<_>>()
    };
    let parts = exec.map(k, |first| {
        let mut rows = empty();
        if m.get(first).is_zero() {
            return Ok((0, rows));
        }
        let visited = exec::walk_words(
            k,
            first,
            n_max,
            m.get(first).clone(),
            &step,
            &mut |w: &[usize], p: &Mat| {
                let row = &mut rows[w.len() - 1];
                let x = p.norm();
                row.nonzero += 1;
                row.range = Some(match row.range {
                    None => (x, x),
                    Some((lo, hi)) => (lo.min(x), hi.max(x)),
                });
            },
            cap,
        )?;
        Ok((visited, rows))
    });
    let mut out = empty();
    for rows in exec::merge_counts(parts, cap)? {
        for (acc, r) in out.iter_mut().zip(rows) {
            acc.nonzero += r.nonzero;
            acc.range = match (acc.range, r.range) {
                (None, x) | (x, None) => x,
                (Some((a, b)), Some((c, d))) => Some((a.min(c), b.max(d))),
            };
        }
    }
    Ok(out)
}

/// `max_n (max ‖M_J‖ e^{-λn}) / min_n (min ‖M_J‖ e^{-λn})` over the rows of a
/// profile: the smallest `C²` consistent with the observed norms.
pub fn empirical_constant(profile: &[ProfileRow], lambda: f64) -> f64 {
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for row in profile {
        if let Some((a, b)) = row.range {
            let s = libm::exp(-lambda * row.n as f64);
            lo = lo.min(a * s);
            hi = hi.max(b * s);
        }
    }
    hi / lo
}
