//! Exact evaluation of every closed-form rate and bound, lower convex
//! envelopes, and machine checks of the computable steps in the gap analysis.
//!
//! Everything is exact rational arithmetic; floats appear only when rows are
//! rendered for CSV output.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::combinatorics::{binomial, ratio, ratio_big};
use crate::yma::yma_rate;
use crate::{Error, Result};

/// Achievable private rate on the memory grid `M = t/K`:
/// `(C(NK, t+1) - C(NK-N, t+1)) / C(NK, t)`.
pub fn rate_private(n_files: usize, n_users: usize, t: usize) -> Result<BigRational> {
    let nk = n_files * n_users;
    if t > nk {
        return Err(Error::InvalidParams(format!("t = {t} exceeds NK = {nk}")));
    }
    let served = binomial(nk as u64, t as i64 + 1) - binomial((nk - n_files) as u64, t as i64 + 1);
    Ok(ratio_big(served, binomial(nk as u64, t as i64)))
}

/// Non-private rate of the per-subset XOR scheme on its grid `KM/N` integer:
/// `K (1 - M/N) min(1 / (1 + KM/N), N/K)`.
pub fn rate_mn(n_files: usize, k_users: usize, m: &BigRational) -> Result<BigRational> {
    let n = BigRational::from_integer(BigInt::from(n_files));
    let k = BigRational::from_integer(BigInt::from(k_users));
    if m < &BigRational::zero() || m > &n {
        return Err(Error::OutOfRange(format!("M = {m} not in [0, {n_files}]")));
    }
    let r2 = &k * m / &n;
    if !r2.is_integer() {
        return Err(Error::OutOfRange(format!(
            "M = {m} off the grid (KM/N = {r2} not an integer)"
        )));
    }
    let a = BigRational::one() / (BigRational::one() + &r2);
    let b = &n / &k;
    Ok(&k * (BigRational::one() - m / &n) * a.min(b))
}

fn mn_grid(n_files: usize, k_users: usize) -> Vec<(BigRational, BigRational)> {
    (0..=k_users)
        .map(|j| {
            let m = ratio((j * n_files) as i64, k_users as i64);
            let r = rate_mn(n_files, k_users, &m).expect("on grid");
            (m, r)
        })
        .collect()
}

/// Piecewise-linear interpolation of the [`rate_mn`] grid over `[0, N]`.
pub fn rate_mn_lin(n_files: usize, k_users: usize, m: &BigRational) -> Result<BigRational> {
    let curve = RateCurve::new("R_mn_lin", mn_grid(n_files, k_users))?;
    curve
        .eval(m)
        .ok_or_else(|| Error::OutOfRange(format!("M = {m} not in [0, {n_files}]")))
}

/// Cut-set lower bound on the non-private optimum: `max(0, 1 - M/N)`.
pub fn cutset_bound(n_files: usize, m: &BigRational) -> BigRational {
    let v = BigRational::one() - m / BigRational::from_integer(BigInt::from(n_files));
    v.max(BigRational::zero())
}

/// Converse reference line `f1(M) = N/M - 1/2`, defined for `M > 0`.
pub fn f1_bound(n_files: usize, m: &BigRational) -> Result<BigRational> {
    if m <= &BigRational::zero() {
        return Err(Error::OutOfRange("f1 requires M > 0".into()));
    }
    Ok(BigRational::from_integer(BigInt::from(n_files)) / m - ratio(1, 2))
}

/// Converse reference line `f2(M) = 2 (1 - M/N)`.
pub fn f2_bound(n_files: usize, m: &BigRational) -> BigRational {
    ratio(2, 1) * (BigRational::one() - m / BigRational::from_integer(BigInt::from(n_files)))
}

/// A labeled piecewise-linear curve: grid points with strictly increasing `M`.
#[derive(Debug, Clone)]
pub struct RateCurve {
    pub label: String,
    pub points: Vec<(BigRational, BigRational)>,
}

impl RateCurve {
    pub fn new(label: &str, points: Vec<(BigRational, BigRational)>) -> Result<Self> {
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidParams(format!(
                "{label}: grid abscissas must be strictly increasing"
            )));
        }
        Ok(RateCurve {
            label: label.to_string(),
            points,
        })
    }

    /// Linear interpolation; `None` outside the grid span.
    pub fn eval(&self, m: &BigRational) -> Option<BigRational> {
        let first = self.points.first()?;
        let last = self.points.last()?;
        if m < &first.0 || m > &last.0 {
            return None;
        }
        let idx = self.points.partition_point(|(x, _)| x <= m);
        if idx > 0 && &self.points[idx - 1].0 == m {
            return Some(self.points[idx - 1].1.clone());
        }
        let (x0, y0) = &self.points[idx - 1];
        let (x1, y1) = &self.points[idx];
        Some(y0 + (y1 - y0) * (m - x0) / (x1 - x0))
    }

    pub fn non_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[0].1 >= w[1].1)
    }
}

fn cross(
    a: &(BigRational, BigRational),
    b: &(BigRational, BigRational),
    c: &(BigRational, BigRational),
) -> BigRational {
    (&b.0 - &a.0) * (&c.1 - &a.1) - (&b.1 - &a.1) * (&c.0 - &a.0)
}

/// Lower convex envelope of a point set, as a piecewise-linear curve over the
/// abscissa span. Exact rational hull construction.
pub fn envelope(points: &[(BigRational, BigRational)]) -> Result<RateCurve> {
    if points.len() < 2 {
        return Err(Error::InvalidParams(
            "envelope needs at least 2 points".into(),
        ));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidParams(
            "envelope abscissas must be distinct".into(),
        ));
    }
    let mut hull: Vec<(BigRational, BigRational)> = Vec::new();
    for p in sorted {
        while hull.len() >= 2
            && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p) <= BigRational::zero()
        {
            hull.pop();
        }
        hull.push(p);
    }
    RateCurve::new("envelope", hull)
}

/// The private-rate grid `(t/K, R(t))` for `t = 0..NK`.
pub fn private_grid(n_files: usize, n_users: usize) -> Vec<(BigRational, BigRational)> {
    (0..=n_files * n_users)
        .map(|t| {
            (
                ratio(t as i64, n_users as i64),
                rate_private(n_files, n_users, t).expect("t on grid"),
            )
        })
        .collect()
}

/// One named exact check inside a [`GapReport`].
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Per-grid-point ratio with its case/region tag.
#[derive(Debug, Clone)]
pub struct RatioSample {
    pub m: BigRational,
    pub ratio: BigRational,
    pub tag: String,
}

/// Every internally computable inequality of the gap analysis, evaluated with
/// exact rationals over the union of both schemes' memory grids.
#[derive(Debug, Clone)]
pub struct GapReport {
    pub n_files: usize,
    pub n_users: usize,
    pub checks: Vec<CheckResult>,
    pub ratios: Vec<RatioSample>,
}

impl GapReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("gap report for N={} K={}\n", self.n_files, self.n_users);
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {} — {}\n",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        if !self.ratios.is_empty() {
            let max = self.ratios.iter().map(|r| &r.ratio).max().unwrap();
            out.push_str(&format!("  max grid ratio: {max}\n"));
        }
        out.push_str(if self.pass() {
            "  overall: PASS\n"
        } else {
            "  overall: FAIL\n"
        });
        out
    }
}

fn case_tag(n_files: usize, k_users: usize, m: &BigRational) -> &'static str {
    // boundaries overlap; tag by first matching interval
    let c1_hi = BigRational::one() - ratio(n_files as i64, k_users as i64);
    let c2_hi = BigRational::one() - ratio(1, k_users as i64);
    if m <= &c1_hi {
        "case-1"
    } else if m <= &c2_hi {
        "case-2"
    } else {
        "case-3"
    }
}

/// Evaluates the machine-checkable steps of the optimality-gap proof for one
/// `(N, K)` pair.
pub fn theorem2_report(n_files: usize, n_users: usize) -> GapReport {
    let nk = n_files * n_users;
    let mut checks = Vec::new();
    let mut ratios = Vec::new();
    let two = ratio(2, 1);

    let grid = private_grid(n_files, n_users);
    let env = envelope(&grid).expect("NK + 1 >= 2 points");

    // (i) envelope of the private grid equals its interpolation, and both
    // equal the NK-user building-block rate pointwise
    let mut ok = true;
    for (t, (m, r)) in grid.iter().enumerate() {
        let env_val = env.eval(m).expect("inside span");
        let yma = yma_rate(n_files, nk, t).expect("t on grid");
        if &env_val != r || r != &yma {
            ok = false;
        }
    }
    checks.push(CheckResult {
        name: "envelope = interpolation = building-block rate".into(),
        pass: ok,
        detail: format!("{} grid points", grid.len()),
    });

    // (ii) chain step: building block never beats the per-subset XOR scheme
    // at NK users, on the common grid
    let mut ok = true;
    for (m, r) in &grid {
        let mn = rate_mn(n_files, nk, m).expect("t-grid is the NK-user MN grid");
        if r > &mn {
            ok = false;
        }
    }
    checks.push(CheckResult {
        name: "R(N,NK) <= R_mn(N,NK) on grid".into(),
        pass: ok,
        detail: format!("{} grid points", grid.len()),
    });

    // (iii) N <= K: R_mn(N,NK,M) / R_mn(N,K,M) <= 2 at shared grid points
    if n_files <= n_users {
        let mut ok = true;
        for j in 0..=n_users {
            let m = ratio((j * n_files) as i64, n_users as i64);
            let denom = rate_mn(n_files, n_users, &m).expect("on K-user grid");
            if denom.is_zero() {
                continue; // M = N endpoint, both rates are 0
            }
            let numer = rate_mn(n_files, nk, &m).expect("also on NK-user grid");
            let r = numer / denom;
            if r > two {
                ok = false;
            }
            ratios.push(RatioSample {
                tag: case_tag(n_files, n_users, &m).into(),
                ratio: r,
                m,
            });
        }
        checks.push(CheckResult {
            name: "R_mn(N,NK)/R_mn(N,K) <= 2 (cases 1-3)".into(),
            pass: ok,
            detail: format!("{} shared grid points", n_users + 1),
        });
    }

    // (iv) N > K, M >= N/K: private rate within 2x of the K-user building block
    if n_files > n_users {
        let mut ok = true;
        let mut count = 0;
        for j in 1..=n_users {
            let t = j * n_files; // M = jN/K on both grids
            let m = ratio(t as i64, n_users as i64);
            let denom = yma_rate(n_files, n_users, j).expect("r2 on grid");
            if denom.is_zero() {
                continue;
            }
            let numer = rate_private(n_files, n_users, t).expect("t on grid");
            let r = numer / denom;
            if r > two {
                ok = false;
            }
            ratios.push(RatioSample {
                tag: "part-2".into(),
                ratio: r,
                m,
            });
            count += 1;
        }
        checks.push(CheckResult {
            name: "R_private/R_yma(N,K) <= 2 for M >= N/K".into(),
            pass: ok,
            detail: format!("{count} grid points"),
        });
    }

    // (v) exactness at the top of the memory range
    let t_star = nk - 1;
    let m_star = ratio(t_star as i64, n_users as i64);
    let r_star = rate_private(n_files, n_users, t_star).expect("on grid");
    let expect = ratio(1, nk as i64);
    let cutset = cutset_bound(n_files, &m_star);
    let top = rate_private(n_files, n_users, nk).expect("on grid");
    checks.push(CheckResult {
        name: "exact optimality for M >= (NK-1)/K".into(),
        pass: r_star == expect && r_star == cutset && top.is_zero(),
        detail: format!("R((NK-1)/K) = {r_star}, cutset = {cutset}, R(N) = {top}"),
    });

    // (vi) interpolated per-subset XOR curve: monotone on [0, N], convex from
    // max(0, 1 - N/K) on, checked on a 1000-point dense rational grid
    let dense = 1000usize;
    let convex_from =
        (BigRational::one() - ratio(n_files as i64, n_users as i64)).max(BigRational::zero());
    let vals: Vec<(BigRational, BigRational)> = (0..=dense)
        .map(|i| {
            let m = ratio((i * n_files) as i64, dense as i64);
            let v = rate_mn_lin(n_files, n_users, &m).expect("in range");
            (m, v)
        })
        .collect();
    let monotone = vals.windows(2).all(|w| w[0].1 >= w[1].1);
    let convex = vals
        .windows(3)
        .filter(|w| w[0].0 >= convex_from)
        .all(|w| &w[2].1 - &w[1].1 >= &w[1].1 - &w[0].1);
    checks.push(CheckResult {
        name: "R_mn_lin monotone non-increasing".into(),
        pass: monotone,
        detail: format!("{} dense points", dense + 1),
    });
    checks.push(CheckResult {
        name: "R_mn_lin convex on [max(0, 1-N/K), N]".into(),
        pass: convex,
        detail: format!("second differences from M = {convex_from}"),
    });

    // supporting sanity bounds on the private grid
    let trivially_bounded = grid.iter().all(|(m, r)| {
        r <= &(BigRational::from_integer(BigInt::from(n_files)) - m)
            && &cutset_bound(n_files, m) <= r
    });
    checks.push(CheckResult {
        name: "cutset <= R_private <= N - M on grid".into(),
        pass: trivially_bounded,
        detail: format!("{} grid points", grid.len()),
    });
    let monotone_private = grid.windows(2).all(|w| w[0].1 >= w[1].1);
    checks.push(CheckResult {
        name: "R_private monotone non-increasing on grid".into(),
        pass: monotone_private,
        detail: format!("{} grid points", grid.len()),
    });

    GapReport {
        n_files,
        n_users,
        checks,
        ratios,
    }
}

/// A table of curve values on a shared `M` grid, ready for CSV emission.
/// `None` cells mark abscissas where a curve is undefined.
#[derive(Debug, Clone)]
pub struct CurveTable {
    pub columns: Vec<String>,
    pub rows: Vec<(BigRational, Vec<Option<BigRational>>)>,
}

/// Evaluates all curves on the union of the `t/K` grid and an optional
/// uniform refinement with `extra_points` additional abscissas.
pub fn emit_curves(n_files: usize, n_users: usize, extra_points: usize) -> Result<CurveTable> {
    let nk = n_files * n_users;
    let grid = private_grid(n_files, n_users);
    let env = envelope(&grid)?;
    let mn_lin = RateCurve::new("R_mn_lin", mn_grid(n_files, n_users))?;

    let mut abscissas: Vec<BigRational> =
        (0..=nk).map(|t| ratio(t as i64, n_users as i64)).collect();
    for i in 1..extra_points {
        abscissas.push(ratio((i * n_files) as i64, extra_points as i64));
    }
    abscissas.sort();
    abscissas.dedup();

    let columns = [
        "M",
        "R_private",
        "R_private_env",
        "R_yma_K",
        "R_yma_NK",
        "R_mn_K",
        "R_mn_lin_K",
        "cutset",
        "f1",
        "f2",
        "trivial",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();

    let n_big = BigRational::from_integer(BigInt::from(n_files));
    let rows = abscissas
        .into_iter()
        .map(|m| {
            let km = &m * BigRational::from_integer(BigInt::from(n_users));
            let r_private = if km.is_integer() {
                Some(rate_private(
                    n_files,
                    n_users,
                    km.to_integer().to_usize().unwrap(),
                )?)
            } else {
                None
            };
            let r2 = &km / &n_big; // KM/N, the K-user building-block grid index
            let r_yma_k = if r2.is_integer() {
                Some(yma_rate(
                    n_files,
                    n_users,
                    r2.to_integer().to_usize().unwrap(),
                )?)
            } else {
                None
            };
            let r_yma_nk = r_private.clone(); // same formula at NK users
            let r_mn_k = if r2.is_integer() {
                Some(rate_mn(n_files, n_users, &m)?)
            } else {
                None
            };
            let cells = vec![
                r_private,
                env.eval(&m),
                r_yma_k,
                r_yma_nk,
                r_mn_k,
                mn_lin.eval(&m),
                Some(cutset_bound(n_files, &m)),
                f1_bound(n_files, &m).ok(),
                Some(f2_bound(n_files, &m)),
                Some(&n_big - &m),
            ];
            Ok((m, cells))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CurveTable { columns, rows })
}

/// Decimal rendering with `sig` significant digits, round-half-up. Exact
/// values live in the sibling `.exact` file; this is for plotting.
pub fn decimal_sig(value: &BigRational, sig: u32) -> String {
    if value.is_zero() {
        return "0".into();
    }
    let neg = value.is_negative();
    let num = value.numer().abs();
    let den = value.denom().abs();
    // decimal exponent of the leading digit
    let mut exp: i64 = 0;
    let ten = BigInt::from(10);
    let mut scaled_num = num.clone();
    let mut scaled_den = den.clone();
    while scaled_num >= scaled_den {
        scaled_den *= &ten;
        exp += 1;
    }
    while &scaled_num * &ten < scaled_den {
        scaled_num *= &ten;
        exp -= 1;
    }
    // value = 0.d1 d2 ... x 10^exp with d1 != 0; keep `sig` digits
    let shift = sig as i64 - exp;
    let mut n = num.clone();
    let mut d = den.clone();
    if shift >= 0 {
        n *= ten.pow(shift as u32);
    } else {
        d *= ten.pow((-shift) as u32);
    }
    let mut digits = (&n + &d / BigInt::from(2)) / &d; // round half up
    let cap = ten.pow(sig);
    if digits >= cap {
        digits /= &ten; // rounding carried into a new leading digit
        exp += 1;
    }
    let s = digits.to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp <= 0 {
        out.push_str("0.");
        for _ in 0..(-exp) {
            out.push('0');
        }
        out.push_str(&s);
    } else if (exp as usize) >= s.len() {
        out.push_str(&s);
        for _ in 0..(exp as usize - s.len()) {
            out.push('0');
        }
    } else {
        out.push_str(&s[..exp as usize]);
        out.push('.');
        out.push_str(&s[exp as usize..]);
    }
    out
}

impl CurveTable {
    /// CSV with 12-significant-digit decimals; empty cell where undefined.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for (m, cells) in &self.rows {
            out.push_str(&decimal_sig(m, 12));
            for c in cells {
                out.push(',');
                if let Some(v) = c {
                    out.push_str(&decimal_sig(v, 12));
                }
            }
            out.push('\n');
        }
        out
    }

    /// Sibling exact table with fraction strings.
    pub fn to_exact(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for (m, cells) in &self.rows {
            out.push_str(&m.to_string());
            for c in cells {
                out.push(',');
                if let Some(v) = c {
                    out.push_str(&v.to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn private_rate_values() {
        assert_eq!(rate_private(2, 2, 2).unwrap(), ratio(2, 3));
        assert_eq!(rate_private(2, 2, 3).unwrap(), ratio(1, 4));
        for (n, k) in [(2usize, 2usize), (3, 2), (4, 3)] {
            assert_eq!(rate_private(n, k, 0).unwrap(), ratio(n as i64, 1));
            assert_eq!(rate_private(n, k, n * k).unwrap(), ratio(0, 1));
        }
        assert!(rate_private(2, 2, 5).is_err());
    }

    #[test]
    fn private_rate_equals_nk_building_block() {
        for (n, k) in [(2usize, 2usize), (2, 3), (3, 3), (5, 2)] {
            for t in 0..=n * k {
                assert_eq!(
                    rate_private(n, k, t).unwrap(),
                    yma_rate(n, n * k, t).unwrap()
                );
            }
        }
    }

    #[test]
    fn mn_rate_values() {
        assert_eq!(rate_mn(2, 4, &ratio(1, 1)).unwrap(), ratio(2, 3));
        assert_eq!(rate_mn(3, 2, &ratio(3, 1)).unwrap(), ratio(0, 1));
        assert_eq!(rate_mn(2, 2, &ratio(0, 1)).unwrap(), ratio(2, 1));
        assert!(rate_mn(2, 2, &ratio(1, 2)).is_err()); // off grid
        assert!(rate_mn(2, 2, &ratio(5, 2)).is_err()); // out of range
    }

    #[test]
    fn mn_lin_interpolation() {
        // grid point
        assert_eq!(
            rate_mn_lin(2, 2, &ratio(1, 1)).unwrap(),
            rate_mn(2, 2, &ratio(1, 1)).unwrap()
        );
        // midpoint of (0, 2) and (1, 1/2)
        assert_eq!(rate_mn_lin(2, 2, &ratio(1, 2)).unwrap(), ratio(5, 4));
        assert!(rate_mn_lin(2, 2, &ratio(5, 2)).is_err());
    }

    #[test]
    fn bound_values() {
        assert_eq!(cutset_bound(2, &ratio(1, 1)), ratio(1, 2));
        assert_eq!(cutset_bound(3, &ratio(0, 1)), ratio(1, 1));
        assert_eq!(cutset_bound(3, &ratio(3, 1)), ratio(0, 1));
        assert_eq!(f1_bound(4, &ratio(2, 1)).unwrap(), ratio(3, 2));
        assert!(f1_bound(4, &ratio(0, 1)).is_err());
        assert_eq!(f2_bound(4, &ratio(2, 1)), ratio(1, 1));
        assert_eq!(f2_bound(4, &ratio(4, 1)), ratio(0, 1));
    }

    /// 2-point hull oracle: brute-force check that every input point lies on
    /// or above the returned envelope.
    #[test]
    fn envelope_drops_interior_points() {
        let pts = vec![
            (ratio(0, 1), ratio(2, 1)),
            (ratio(1, 1), ratio(2, 1)),
            (ratio(2, 1), ratio(0, 1)),
        ];
        let env = envelope(&pts).unwrap();
        assert_eq!(env.points.len(), 2);
        assert_eq!(env.eval(&ratio(1, 1)).unwrap(), ratio(1, 1));
        for (m, r) in &pts {
            assert!(env.eval(m).unwrap() <= *r);
        }
    }

    #[test]
    fn envelope_keeps_convex_input() {
        let pts = vec![
            (ratio(0, 1), ratio(4, 1)),
            (ratio(1, 1), ratio(2, 1)),
            (ratio(2, 1), ratio(1, 1)),
            (ratio(3, 1), ratio(1, 2)),
        ];
        let env = envelope(&pts).unwrap();
        for (m, r) in &pts {
            assert_eq!(env.eval(m).unwrap(), *r);
        }
    }

    #[test]
    fn envelope_rejects_degenerate_input() {
        assert!(envelope(&[(ratio(0, 1), ratio(1, 1))]).is_err());
        assert!(envelope(&[(ratio(0, 1), ratio(1, 1)), (ratio(0, 1), ratio(2, 1))]).is_err());
    }

    #[test]
    fn private_envelope_equals_interpolation() {
        for (n, k) in [(2usize, 2usize), (2, 3), (3, 3), (5, 10)] {
            let grid = private_grid(n, k);
            let env = envelope(&grid).unwrap();
            for (m, r) in &grid {
                assert_eq!(env.eval(m).unwrap(), *r, "N={n} K={k} M={m}");
            }
        }
    }

    #[test]
    fn theorem2_small_pairs_pass() {
        for (n, k) in [(2usize, 2usize), (2, 4), (5, 10), (3, 2), (20, 10)] {
            let rep = theorem2_report(n, k);
            assert!(rep.pass(), "N={n} K={k}\n{}", rep.render_text());
        }
    }

    #[test]
    fn theorem2_part3_exactness() {
        let rep = theorem2_report(2, 2);
        let part3 = rep
            .checks
            .iter()
            .find(|c| c.name.contains("exact optimality"))
            .unwrap();
        assert!(part3.pass);
        assert_eq!(
            rate_private(2, 2, 3).unwrap(),
            cutset_bound(2, &ratio(3, 2))
        );
    }

    #[test]
    fn curve_table_shape() {
        let t = emit_curves(5, 10, 0).unwrap();
        assert_eq!(t.rows.len(), 51);
        assert_eq!(t.columns.len(), 11);
        // all curves end at (N, 0)
        let (m, cells) = t.rows.last().unwrap();
        assert_eq!(*m, ratio(5, 1));
        assert_eq!(cells[0], Some(ratio(0, 1)));
        assert_eq!(cells[6], Some(ratio(0, 1)));
        // f1 undefined at M = 0
        assert_eq!(t.rows[0].1[7], None);

        let t = emit_curves(2, 2, 0).unwrap();
        let row = t.rows.iter().find(|(m, _)| *m == ratio(1, 1)).unwrap();
        assert_eq!(row.1[0], Some(ratio(2, 3)));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_sig(&ratio(2, 3), 12), "0.666666666667");
        assert_eq!(decimal_sig(&ratio(0, 1), 12), "0");
        assert_eq!(decimal_sig(&ratio(5, 4), 3), "1.25");
        assert_eq!(decimal_sig(&ratio(2, 1), 3), "2.00");
        assert_eq!(decimal_sig(&ratio(-1, 8), 4), "-0.1250");
        assert_eq!(decimal_sig(&ratio(999, 1), 2), "1000");
        assert_eq!(decimal_sig(&ratio(1, 400), 3), "0.00250");
    }
}
