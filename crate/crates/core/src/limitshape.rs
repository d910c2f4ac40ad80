//! Asymptotic analytics: density of the limit counting measure, its
//! moments, the limit height function, and frozen-boundary curves with
//! tangency diagnostics.
//!
//! Interval-type boundary measures go through the root system of
//! z = ∏ H(z;x,a_i)/H(z;x,b_i); staircase boundaries with general periodic
//! x-weights go through the rational family F_{κ,M}(z) = χ/(1−κ). Densities
//! come from the argument of the root continuing exp(St); in frozen spots
//! the continuation is identified by the sign of dz/dx.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::PeriodicWeights;
use crate::poly::Poly;

/// Limit profile of the boundary row: either density-1 on disjoint
/// intervals with unit total length, or the uniform measure on [0, M] from
/// a staircase boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryMeasureSpec {
    Intervals(Vec<(f64, f64)>),
    StaircaseUniform { m: u32 },
}

impl BoundaryMeasureSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            BoundaryMeasureSpec::Intervals(iv) => {
                if iv.is_empty() {
                    return Err(Error::invalid("need at least one interval"));
                }
                let mut prev = f64::NEG_INFINITY;
                let mut total = 0.0;
                for &(a, b) in iv {
                    if !(a > prev && b > a) {
                        return Err(Error::invalid("intervals must satisfy a_1<b_1<…<a_s<b_s"));
                    }
                    prev = b;
                    total += b - a;
                }
                if (total - 1.0).abs() > 1e-8 {
                    return Err(Error::invalid(format!(
                        "interval lengths must sum to 1 (got {total})"
                    )));
                }
                Ok(())
            }
            BoundaryMeasureSpec::StaircaseUniform { m } => {
                if *m < 1 {
                    return Err(Error::invalid("staircase needs M ≥ 1"));
                }
                Ok(())
            }
        }
    }

    /// j-th moment of the boundary measure m_ω.
    pub fn moment(&self, j: u32) -> f64 {
        match self {
            BoundaryMeasureSpec::Intervals(iv) => iv
                .iter()
                .map(|&(a, b)| (b.powi(j as i32 + 1) - a.powi(j as i32 + 1)) / (j as f64 + 1.0))
                .sum(),
            BoundaryMeasureSpec::StaircaseUniform { m } => {
                (*m as f64).powi(j as i32) / (j as f64 + 1.0)
            }
        }
    }
}

/// St_m(t) = ∫ m(ds)/(t−s), closed forms for both boundary families.
pub fn stieltjes_boundary(t: Complex64, spec: &BoundaryMeasureSpec) -> Result<Complex64> {
    spec.validate()?;
    let on_support = |lo: f64, hi: f64| t.im == 0.0 && t.re >= lo - 1e-12 && t.re <= hi + 1e-12;
    match spec {
        BoundaryMeasureSpec::Intervals(iv) => {
            if iv.iter().any(|&(a, b)| on_support(a, b)) {
                return Err(Error::invalid("t lies on the support"));
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for &(a, b) in iv {
                acc += ((t - a) / (t - b)).ln();
            }
            Ok(acc)
        }
        BoundaryMeasureSpec::StaircaseUniform { m } => {
            let mf = *m as f64;
            if on_support(0.0, mf) {
                return Err(Error::invalid("t lies on the support"));
            }
            Ok((t / (t - mf)).ln() / mf)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityQuery {
    pub kappa: f64,
    /// x = χ/(1−κ)
    pub x: f64,
}

impl DensityQuery {
    pub fn new(kappa: f64, x: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::invalid("κ must lie strictly inside (0,1)"));
        }
        Ok(DensityQuery { kappa, x })
    }
}

/// H(z;x,y) = K + κ(1/(z−1) + (1/n) Σ n_j γ_j/(z+γ_j)), K = x(1−κ)−y+κr/n.
pub fn h_field(z: Complex64, x: f64, y: f64, kappa: f64, w: &PeriodicWeights) -> Complex64 {
    let n = w.n as f64;
    let r = w.r() as f64;
    let k = x * (1.0 - kappa) - y + kappa * r / n;
    let mut acc = Complex64::new(k, 0.0) + kappa / (z - 1.0);
    for (g, mult) in w.gammas() {
        acc += kappa * (mult as f64) * g / (n * (z + g));
    }
    acc
}

/// Numerator polynomial of H(·;x,y) over D(z) = (z−1)∏(z+γ_j).
fn h_numer_poly(x: f64, y: f64, kappa: f64, w: &PeriodicWeights) -> Poly {
    let n = w.n as f64;
    let r = w.r() as f64;
    let k = x * (1.0 - kappa) - y + kappa * r / n;
    let gammas = w.gammas();
    let d_rest: Vec<Poly> = gammas.iter().map(|&(g, _)| Poly::linear(-g)).collect();
    let mut d = Poly::linear(1.0);
    for p in &d_rest {
        d = d.mul(p);
    }
    let mut num = d.scale(k);
    // κ·∏(z+γ)
    let mut prod = Poly::one();
    for p in &d_rest {
        prod = prod.mul(p);
    }
    num = num.add(&prod.scale(kappa));
    // (κ/n) Σ n_j γ_j (z−1) ∏_{j'≠j}(z+γ_{j'})
    for (j, &(g, mult)) in gammas.iter().enumerate() {
        let mut term = Poly::linear(1.0);
        for (j2, p) in d_rest.iter().enumerate() {
            if j2 != j {
                term = term.mul(p);
            }
        }
        num = num.add(&term.scale(kappa * mult as f64 * g / n));
    }
    num
}

/// Polynomial form of z = ∏ H(z;x,a_i)/H(z;x,b_i).
fn interval_system_poly(
    x: f64,
    kappa: f64,
    iv: &[(f64, f64)],
    w: &PeriodicWeights,
) -> Poly {
    let mut num = Poly::one();
    let mut den = Poly::one();
    for &(a, b) in iv {
        num = num.mul(&h_numer_poly(x, a, kappa, w));
        den = den.mul(&h_numer_poly(x, b, kappa, w));
    }
    Poly::new(std::iter::once(0.0).chain(den.c.iter().copied()).collect()).sub(&num)
}

fn conjugate_pairs(roots: &[Complex64]) -> Vec<Complex64> {
    roots
        .iter()
        .filter(|z| z.im > 1e-8 * (1.0 + z.norm()))
        .copied()
        .collect()
}

/// Density of m^κ at x for an interval-type boundary measure.
///
/// Liquid points have one conjugate root pair and density Arg(z₊)/π. At
/// frozen points the root continuing exp(St) is the unique one moving left
/// as x grows; its sign decides between the packed (z < 0, density 1) and
/// empty (z > 0, density 0) phases.
pub fn density_at(q: DensityQuery, spec: &BoundaryMeasureSpec, w: &PeriodicWeights) -> Result<f64> {
    let BoundaryMeasureSpec::Intervals(iv) = spec else {
        return Err(Error::invalid("staircase boundaries go through density_at_general"));
    };
    spec.validate()?;
    let p = interval_system_poly(q.x, q.kappa, iv, w);
    let roots = p.roots()?;
    let pairs = conjugate_pairs(&roots);
    match pairs.len() {
        1 => Ok(pairs[0].arg() / std::f64::consts::PI),
        0 => {
            let dp = p.derivative();
            let delta = 1e-6 * (1.0 + q.x.abs());
            let p_hi = interval_system_poly(q.x + delta, q.kappa, iv, w);
            let p_lo = interval_system_poly(q.x - delta, q.kappa, iv, w);
            let mut best: Option<(f64, f64)> = None; // (z', z)
            for z in roots.iter().filter(|z| z.im.abs() <= 1e-8 * (1.0 + z.norm())) {
                let zr = z.re;
                let px = (p_hi.eval_real(zr) - p_lo.eval_real(zr)) / (2.0 * delta);
                let pz = dp.eval_real(zr);
                if pz.abs() < 1e-300 {
                    continue;
                }
                let slope = -px / pz;
                if best.map_or(true, |(s, _)| slope < s) {
                    best = Some((slope, zr));
                }
            }
            let (_, z) = best.ok_or_else(|| Error::numeric("no classifiable real root"))?;
            Ok(if z < 0.0 { 1.0 } else { 0.0 })
        }
        k => Err(Error::numeric(format!(
            "{k} conjugate pairs for an interval boundary measure"
        ))),
    }
}

/// Diagnostics for tests: number of roots and how many are real.
pub fn interval_root_profile(
    q: DensityQuery,
    spec: &BoundaryMeasureSpec,
    w: &PeriodicWeights,
) -> Result<(usize, usize)> {
    let BoundaryMeasureSpec::Intervals(iv) = spec else {
        return Err(Error::invalid("interval spec required"));
    };
    let roots = interval_system_poly(q.x, q.kappa, iv, w).roots()?;
    let real = roots.iter().filter(|z| z.im.abs() <= 1e-7 * (1.0 + z.norm())).count();
    Ok((roots.len(), real))
}

/// Staircase boundary with general periodic x-weights.
#[derive(Debug, Clone)]
pub struct GeneralStaircase {
    /// distinct x values with multiplicities within one period
    xs: Vec<(f64, usize)>,
    /// distinct y values with multiplicities within one period
    ys: Vec<(f64, usize)>,
    n: usize,
    pub m_exp: u32,
}

impl GeneralStaircase {
    pub fn new(w: &PeriodicWeights, m_exp: u32) -> Result<Self> {
        if m_exp < 1 {
            return Err(Error::invalid("M ≥ 1 required"));
        }
        let mut xs: Vec<f64> = w.x.clone();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut xg: Vec<(f64, usize)> = Vec::new();
        for v in xs {
            match xg.last_mut() {
                Some((g, m)) if (v - *g).abs() <= 1e-12 * g.abs().max(1.0) => *m += 1,
                _ => xg.push((v, 1)),
            }
        }
        let mut ys: Vec<f64> = w.y.values().copied().collect();
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut yg: Vec<(f64, usize)> = Vec::new();
        for v in ys {
            match yg.last_mut() {
                Some((g, m)) if (v - *g).abs() <= 1e-12 * g.abs().max(1.0) => *m += 1,
                _ => yg.push((v, 1)),
            }
        }
        Ok(GeneralStaircase { xs: xg, ys: yg, n: w.n, m_exp })
    }

    /// F_{κ,M}(z) = zQ'_κ(z) + Σ_j z/(n(z−x_j)).
    pub fn f(&self, z: Complex64, kappa: f64) -> Complex64 {
        let n = self.n as f64;
        let m = self.m_exp as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(v, mult) in &self.xs {
            let vm = Complex64::new(v, 0.0).powu(self.m_exp);
            let zm = z.powu(self.m_exp);
            let t = (m * zm / (zm - vm) - z / (z - v)) / (1.0 - kappa) + z / (z - v);
            acc += mult as f64 / n * t;
        }
        for &(y, mult) in &self.ys {
            acc += kappa / (n * (1.0 - kappa)) * mult as f64 * y * z / (1.0 + y * z);
        }
        acc
    }

    fn f_prime(&self, z: Complex64, kappa: f64) -> Complex64 {
        let n = self.n as f64;
        let m = self.m_exp as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(v, mult) in &self.xs {
            let vm = Complex64::new(v, 0.0).powu(self.m_exp);
            let zm1 = z.powu(self.m_exp - 1);
            let zm = zm1 * z;
            let d2 = (zm - vm) * (zm - vm);
            let t = (-m * m * vm * zm1 / d2 + v / ((z - v) * (z - v))) / (1.0 - kappa)
                - v / ((z - v) * (z - v));
            acc += mult as f64 / n * t;
        }
        for &(y, mult) in &self.ys {
            let d = 1.0 + y * z;
            acc += kappa / (n * (1.0 - kappa)) * mult as f64 * y / (d * d);
        }
        acc
    }

    /// Clear denominators of F_{κ,M}(z) = x to a polynomial.
    fn system_poly(&self, x: f64, kappa: f64) -> Poly {
        let n = self.n as f64;
        let m = self.m_exp;
        let x_factors: Vec<Poly> =
            self.xs.iter().map(|&(v, _)| Poly::power_minus_const(m, v)).collect();
        let y_factors: Vec<Poly> =
            self.ys.iter().map(|&(y, _)| Poly::new(vec![1.0, y])).collect();
        let mut den = Poly::one();
        for p in x_factors.iter().chain(&y_factors) {
            den = den.mul(p);
        }
        let mut num = Poly::zero();
        let zpow_m = {
            let mut c = vec![0.0; m as usize + 1];
            c[m as usize] = 1.0;
            Poly::new(c)
        };
        for (i, &(v, mult)) in self.xs.iter().enumerate() {
            let mut rest = Poly::one();
            for (i2, p) in x_factors.iter().enumerate() {
                if i2 != i {
                    rest = rest.mul(p);
                }
            }
            for p in &y_factors {
                rest = rest.mul(p);
            }
            let q_v = Poly::cyclotomic_like(m, v); // (z^M − v^M)/(z − v)
            let z_qv = Poly::new(std::iter::once(0.0).chain(q_v.c.iter().copied()).collect());
            let coef = mult as f64 / n;
            // (M z^M/(z^M−v^M) − z/(z−v))/(1−κ) + z/(z−v), cleared with D
            let term = zpow_m
                .scale(m as f64 / (1.0 - kappa))
                .mul(&rest)
                .add(&z_qv.mul(&rest).scale(1.0 - 1.0 / (1.0 - kappa)));
            num = num.add(&term.scale(coef));
        }
        for (i, &(y, mult)) in self.ys.iter().enumerate() {
            let mut rest = Poly::one();
            for p in &x_factors {
                rest = rest.mul(p);
            }
            for (i2, p) in y_factors.iter().enumerate() {
                if i2 != i {
                    rest = rest.mul(p);
                }
            }
            let z_only = Poly::new(vec![0.0, 1.0]);
            num = num.add(
                &z_only.mul(&rest).scale(kappa / (self.n as f64 * (1.0 - kappa)) * mult as f64 * y),
            );
        }
        num.sub(&den.scale(x))
    }
}

/// Density and root diagnostics from the general staircase system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralDensity {
    pub density: f64,
    pub conjugate_pairs: usize,
}

/// Density of m^κ for a staircase boundary with periodic x-weights.
/// More than one conjugate pair is an error for M ≤ 2 and a reported,
/// legitimate outcome for M ≥ 3.
pub fn density_at_general(
    q: DensityQuery,
    stair: &GeneralStaircase,
    ) -> Result<GeneralDensity> {
    let p = stair.system_poly(q.x, q.kappa);
    let roots = p.roots()?;
    let pairs = conjugate_pairs(&roots);
    if pairs.len() > 1 && stair.m_exp <= 2 {
        return Err(Error::numeric(format!(
            "{} conjugate pairs with M = {}",
            pairs.len(),
            stair.m_exp
        )));
    }
    let mut density: f64 = pairs.iter().map(|z| z.arg() / std::f64::consts::PI).sum();
    for z in roots.iter().filter(|z| z.im.abs() <= 1e-8 * (1.0 + z.norm())) {
        if z.re >= 0.0 {
            continue;
        }
        // dz/dx = 1/F'(z) < 0 marks the branch continuing exp(St)
        let fp = stair.f_prime(Complex64::new(z.re, 0.0), q.kappa).re;
        if fp.is_finite() && fp < 0.0 {
            density += 1.0;
        }
    }
    Ok(GeneralDensity { density: density.clamp(0.0, 1.0), conjugate_pairs: pairs.len() })
}

/// Root profile of the general system at a query point (total, real).
pub fn general_root_profile(
    q: DensityQuery,
    stair: &GeneralStaircase,
) -> Result<(usize, usize)> {
    let roots = stair.system_poly(q.x, q.kappa).roots()?;
    let real = roots.iter().filter(|z| z.im.abs() <= 1e-7 * (1.0 + z.norm())).count();
    Ok((roots.len(), real))
}

/// Unified density evaluation for either boundary family.
pub fn density_model<'a>(
    spec: &'a BoundaryMeasureSpec,
    w: &'a PeriodicWeights,
) -> Result<Box<dyn Fn(f64, f64) -> Result<f64> + 'a>> {
    spec.validate()?;
    match spec {
        BoundaryMeasureSpec::Intervals(_) => Ok(Box::new(move |kappa, x| {
            density_at(DensityQuery::new(kappa, x)?, spec, w)
        })),
        BoundaryMeasureSpec::StaircaseUniform { m } => {
            let stair = GeneralStaircase::new(w, *m)?;
            Ok(Box::new(move |kappa, x| {
                Ok(density_at_general(DensityQuery::new(kappa, x)?, &stair)?.density)
            }))
        }
    }
}

/// Sampled density along one horizontal slice κ = const, cached for
/// moments, CDF queries and the limit height function.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    pub kappa: f64,
    pub lo: f64,
    pub hi: f64,
    xs: Vec<f64>,
    density: Vec<f64>,
    cdf: Vec<f64>,
}

impl DensityProfile {
    pub fn build(
        kappa: f64,
        hi_hint: f64,
        points: usize,
        eval: impl Fn(f64, f64) -> Result<f64>,
    ) -> Result<Self> {
        let lo = -0.25;
        let mut hi = hi_hint.max(lo + 1.0);
        for _ in 0..6 {
            if eval(kappa, hi).unwrap_or(0.0) < 1e-9 {
                break;
            }
            hi *= 1.2;
        }
        let n = points.max(64);
        let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let density: Vec<f64> = xs.iter().map(|&x| eval(kappa, x)).collect::<Result<_>>()?;
        let mut cdf = vec![0.0; xs.len()];
        for i in 1..xs.len() {
            cdf[i] = cdf[i - 1]
                + 0.5 * (density[i] + density[i - 1]) * (xs[i] - xs[i - 1]);
        }
        Ok(DensityProfile { kappa, lo, hi, xs, density, cdf })
    }

    pub fn density_at(&self, x: f64) -> f64 {
        self.interp(&self.density, x)
    }

    pub fn cdf_at(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return self.cdf[self.cdf.len() - 1];
        }
        self.interp(&self.cdf, x)
    }

    fn interp(&self, ys: &[f64], x: f64) -> f64 {
        let n = self.xs.len() - 1;
        let t = (x - self.lo) / (self.hi - self.lo) * n as f64;
        let i = (t.floor() as usize).min(n - 1);
        let f = t - i as f64;
        ys[i] * (1.0 - f) + ys[i + 1] * f
    }

    pub fn moment(&self, j: u32) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.xs.len() {
            let xm = 0.5 * (self.xs[i] + self.xs[i - 1]);
            let dm = 0.5 * (self.density[i] + self.density[i - 1]);
            acc += xm.powi(j as i32) * dm * (self.xs[i] - self.xs[i - 1]);
        }
        acc
    }

    pub fn total_mass(&self) -> f64 {
        self.cdf[self.cdf.len() - 1]
    }
}

fn support_hint(spec: &BoundaryMeasureSpec, kappa: f64) -> f64 {
    let top = match spec {
        BoundaryMeasureSpec::Intervals(iv) => iv.last().map(|&(_, b)| b).unwrap_or(1.0),
        BoundaryMeasureSpec::StaircaseUniform { m } => *m as f64,
    };
    (top + 1.0 + kappa) / (1.0 - kappa) + 2.0
}

/// ∫ x^j dm^κ by quadrature of x^j against the density.
pub fn moments(
    kappa: f64,
    j: u32,
    spec: &BoundaryMeasureSpec,
    w: &PeriodicWeights,
) -> Result<f64> {
    let eval = density_model(spec, w)?;
    let profile = DensityProfile::build(kappa, support_hint(spec, kappa), 4000, &eval)?;
    Ok(profile.moment(j))
}

/// 𝐡(χ,κ) = 2κ − 2χ + 4(1−κ) ∫_0^{χ/(1−κ)} dm^κ.
pub fn limit_height(
    chi: f64,
    kappa: f64,
    spec: &BoundaryMeasureSpec,
    w: &PeriodicWeights,
) -> Result<f64> {
    let eval = density_model(spec, w)?;
    let profile = DensityProfile::build(kappa, support_hint(spec, kappa), 4000, &eval)?;
    Ok(limit_height_from_profile(chi, kappa, &profile))
}

pub fn limit_height_from_profile(chi: f64, kappa: f64, profile: &DensityProfile) -> f64 {
    let xhat = chi / (1.0 - kappa);
    2.0 * kappa - 2.0 * chi + 4.0 * (1.0 - kappa) * profile.cdf_at(xhat)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub t: f64,
    pub chi: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TangentLine {
    /// χ = a_i
    ChiEqualsA(usize),
    /// χ + (r/n) κ = b_i
    BSlope(usize),
    KappaZero,
    KappaOne,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangency {
    pub chi: f64,
    pub kappa: f64,
    pub line: TangentLine,
}

#[derive(Debug, Clone)]
pub struct FrozenBoundaryCurve {
    pub samples: Vec<CurveSample>,
    pub tangencies: Vec<Tangency>,
    /// class of the cloud curve
    pub rank: usize,
}

impl FrozenBoundaryCurve {
    pub fn bottom_tangency_count(&self) -> usize {
        self.tangencies.iter().filter(|t| t.line == TangentLine::KappaZero).count()
    }
}

struct IntervalCurve<'a> {
    iv: &'a [(f64, f64)],
    w: &'a PeriodicWeights,
}

impl IntervalCurve<'_> {
    fn phi(&self, t: f64) -> f64 {
        self.iv.iter().map(|&(a, b)| (t - a) / (t - b)).product()
    }

    fn phi_prime(&self, t: f64) -> f64 {
        let phi = self.phi(t);
        phi * self.iv.iter().map(|&(a, b)| 1.0 / (t - a) - 1.0 / (t - b)).sum::<f64>()
    }

    fn j(&self, t: f64) -> f64 {
        let n = self.w.n as f64;
        let phi = self.phi(t);
        let mut v = self.w.r() as f64 / n + 1.0 / (phi - 1.0);
        for (g, mult) in self.w.gammas() {
            v += mult as f64 * g / (n * (phi + g));
        }
        v
    }

    fn j_prime(&self, t: f64) -> f64 {
        let n = self.w.n as f64;
        let phi = self.phi(t);
        let mut dj = -1.0 / ((phi - 1.0) * (phi - 1.0));
        for (g, mult) in self.w.gammas() {
            dj -= mult as f64 * g / (n * (phi + g) * (phi + g));
        }
        dj * self.phi_prime(t)
    }

    fn point(&self, t: f64) -> (f64, f64) {
        let j = self.j(t);
        let jp = self.j_prime(t);
        (t - j / jp, 1.0 / jp)
    }
}

/// Real roots of the pole conditions Φ_s = 1 and Φ_s = −γ_j; these are the
/// bottom (κ = 0) tangency parameters, (m+1)s − 1 of them in general.
fn bottom_tangency_parameters(iv: &[(f64, f64)], w: &PeriodicWeights) -> Result<Vec<f64>> {
    let mut pa = Poly::one();
    let mut qb = Poly::one();
    for &(a, b) in iv {
        pa = pa.mul(&Poly::linear(a));
        qb = qb.mul(&Poly::linear(b));
    }
    let mut params = Vec::new();
    let push_real = |p: Poly, params: &mut Vec<f64>| -> Result<()> {
        for z in p.roots()? {
            if z.im.abs() < 1e-7 * (1.0 + z.norm()) {
                params.push(z.re);
            }
        }
        Ok(())
    };
    push_real(pa.sub(&qb), &mut params)?;
    for (g, _) in w.gammas() {
        push_real(pa.add(&qb.scale(g)), &mut params)?;
    }
    params.sort_by(|a, b| a.partial_cmp(b).unwrap());
    params.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(params)
}

/// Frozen boundary for an interval-type boundary measure: parametric curve
/// χ(t) = t − J/J′, κ(t) = 1/J′ with tangency bookkeeping.
pub fn frozen_boundary(
    spec: &BoundaryMeasureSpec,
    w: &PeriodicWeights,
    grid_per_segment: usize,
) -> Result<FrozenBoundaryCurve> {
    spec.validate()?;
    let BoundaryMeasureSpec::Intervals(iv) = spec else {
        return Err(Error::invalid("use frozen_boundary_general for staircase boundaries"));
    };
    let curve = IntervalCurve { iv, w };
    let poles = bottom_tangency_parameters(iv, w)?;

    let mut special: Vec<f64> = poles.clone();
    for &(a, b) in iv.iter() {
        special.push(a);
        special.push(b);
    }
    special.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut ts: Vec<f64> = Vec::new();
    let g = grid_per_segment.max(8);
    for pair in special.windows(2) {
        let (u, v) = (pair[0], pair[1]);
        if v - u < 1e-12 {
            continue;
        }
        for k in 0..g {
            ts.push(u + (v - u) * (k as f64 + 0.5) / g as f64);
        }
        for e in 2..=9 {
            let off = (v - u) * 10f64.powi(-(e as i32));
            ts.push(u + off);
            ts.push(v - off);
        }
    }
    let lo = special[0];
    let hi = special[special.len() - 1];
    let span = (hi - lo).max(1.0);
    for e in 0..40 {
        let off = span * 1.3f64.powi(e) * 0.05;
        ts.push(lo - off);
        ts.push(hi + off);
    }
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut samples = Vec::new();
    for &t in &ts {
        let (chi, kappa) = curve.point(t);
        if !chi.is_finite() || !kappa.is_finite() {
            continue;
        }
        if (-1e-9..=1.0 + 1e-9).contains(&kappa) {
            samples.push(CurveSample { t, chi, kappa: kappa.clamp(0.0, 1.0) });
        }
    }

    let mut tangencies = Vec::new();
    for &t0 in &poles {
        tangencies.push(Tangency { chi: t0, kappa: 0.0, line: TangentLine::KappaZero });
    }
    for (i, &(a, b)) in iv.iter().enumerate() {
        let ka = 1.0 / curve.j_prime(a);
        if (0.0..=1.0).contains(&ka) {
            tangencies.push(Tangency { chi: a, kappa: ka, line: TangentLine::ChiEqualsA(i) });
        }
        let tau = 1e-7 * (1.0 + b.abs());
        let jp = 0.5 * (curve.j_prime(b - tau) + curve.j_prime(b + tau));
        let kb = 1.0 / jp;
        if (0.0..=1.0).contains(&kb) {
            let chib = b - (w.r() as f64 / w.n as f64) * kb;
            tangencies.push(Tangency { chi: chib, kappa: kb, line: TangentLine::BSlope(i) });
        }
    }
    let t_inf = 1e9;
    let (chi_inf, _) = curve.point(t_inf);
    tangencies.push(Tangency { chi: chi_inf, kappa: 1.0, line: TangentLine::KappaOne });

    let s = iv.len();
    let m = w.gammas().len();
    Ok(FrozenBoundaryCurve { samples, tangencies, rank: (m + 1) * s })
}

struct GeneralCurve<'a> {
    w: &'a PeriodicWeights,
    m_exp: u32,
}

impl GeneralCurve<'_> {
    fn uvw(&self, z: f64) -> (f64, f64, f64, f64, f64, f64) {
        let n = self.w.n as f64;
        let mut u = 0.0;
        let mut up = 0.0;
        for &y in self.w.y.values() {
            u += z / n * y / (1.0 + y * z);
            up += y / (n * (1.0 + y * z) * (1.0 + y * z));
        }
        let mut v = 0.0;
        let mut vp = 0.0;
        let mut wv = 0.0;
        let mut wp = 0.0;
        for &x in &self.w.x {
            v += z / (n * (z - x));
            vp += -x / (n * (z - x) * (z - x));
            if self.m_exp == 2 {
                wv += z / (n * (z + x));
                wp += x / (n * (z + x) * (z + x));
            }
        }
        (u, up, v, vp, wv, wp)
    }

    fn point(&self, z: f64) -> (f64, f64) {
        let (u, up, v, vp, wv, wp) = self.uvw(z);
        let kappa = (vp + wp) / (vp - up);
        let chi = kappa * (u - v) + v + wv;
        (chi, kappa)
    }
}

/// Frozen boundary for the staircase boundary with general periodic
/// x-weights; the paper's parametrizations exist for M ∈ {1, 2}.
pub fn frozen_boundary_general(
    w: &PeriodicWeights,
    m_exp: u32,
    grid: usize,
) -> Result<FrozenBoundaryCurve> {
    if !(m_exp == 1 || m_exp == 2) {
        return Err(Error::invalid("parametrized frozen boundary needs M ∈ {1,2}"));
    }
    let curve = GeneralCurve { w, m_exp };
    let mut special: Vec<f64> = Vec::new();
    for &x in &w.x {
        special.push(x);
        if m_exp == 2 {
            special.push(-x);
        }
    }
    for &y in w.y.values() {
        special.push(-1.0 / y);
    }
    special.push(0.0);
    special.sort_by(|a, b| a.partial_cmp(b).unwrap());
    special.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut zs = Vec::new();
    let g = grid.max(16);
    for pair in special.windows(2) {
        let (u, v) = (pair[0], pair[1]);
        if v - u < 1e-12 {
            continue;
        }
        for k in 0..g {
            zs.push(u + (v - u) * (k as f64 + 0.5) / g as f64);
        }
        for e in 2..=9 {
            let off = (v - u) * 10f64.powi(-(e as i32));
            zs.push(u + off);
            zs.push(v - off);
        }
    }
    let lo = special[0];
    let hi = special[special.len() - 1];
    let span = (hi - lo).max(1.0);
    for e in 0..60 {
        let off = span * 1.25f64.powi(e) * 0.02;
        zs.push(lo - off);
        zs.push(hi + off);
    }
    zs.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut samples = Vec::new();
    for &z in &zs {
        let (chi, kappa) = curve.point(z);
        if chi.is_finite() && kappa.is_finite() && (-1e-9..=1.0 + 1e-9).contains(&kappa) {
            samples.push(CurveSample { t: z, chi, kappa: kappa.clamp(0.0, 1.0) });
        }
    }

    let mut tangencies = Vec::new();
    let gammas = w.gammas();
    for (g, _) in &gammas {
        let z = -*g;
        let n = w.n as f64;
        let mut v = 0.0;
        let mut wv = 0.0;
        for &x in &w.x {
            v += z / (n * (z - x));
            if m_exp == 2 {
                wv += z / (n * (z + x));
            }
        }
        tangencies.push(Tangency { chi: v + wv, kappa: 0.0, line: TangentLine::KappaZero });
    }
    let mut xs = w.x.clone();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    for (i, &x) in xs.iter().enumerate() {
        let n = w.n as f64;
        let mut u = 0.0;
        let mut wv = 0.0;
        for &y in w.y.values() {
            u += x / n * y / (1.0 + y * x);
        }
        if m_exp == 2 {
            for &x2 in &w.x {
                wv += x / (n * (x + x2));
            }
        }
        tangencies.push(Tangency { chi: u + wv, kappa: 1.0, line: TangentLine::ChiEqualsA(i) });
    }
    let m = gammas.len();
    let m_prime = xs.len();
    Ok(FrozenBoundaryCurve {
        samples,
        tangencies,
        rank: m + m_prime * m_exp as usize,
    })
}

/// Dual curve C∨ = {(−1/t, −J(t)/t)} of an interval-type frozen boundary.
pub fn dual_curve(
    spec: &BoundaryMeasureSpec,
    w: &PeriodicWeights,
    ts: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let BoundaryMeasureSpec::Intervals(iv) = spec else {
        return Err(Error::invalid("dual curve is defined for interval boundaries"));
    };
    let curve = IntervalCurve { iv, w };
    Ok(ts
        .iter()
        .filter(|&&t| t.abs() > 1e-12)
        .map(|&t| (-1.0 / t, -curve.j(t) / t))
        .collect())
}

/// Number of real intersection parameters of the dual curve with the line
/// y = c x + d, i.e. real roots of (c − d t) = J(t).
pub fn dual_line_intersections(
    spec: &BoundaryMeasureSpec,
    w: &PeriodicWeights,
    c: f64,
    d: f64,
) -> Result<usize> {
    let BoundaryMeasureSpec::Intervals(iv) = spec else {
        return Err(Error::invalid("interval spec required"));
    };
    let mut pa = Poly::one();
    let mut qb = Poly::one();
    for &(a, b) in iv {
        pa = pa.mul(&Poly::linear(a));
        qb = qb.mul(&Poly::linear(b));
    }
    let n = w.n as f64;
    let r = w.r() as f64;
    let gammas = w.gammas();
    // D_J = (P−Q) ∏_j (P + γ_j Q); N_J per the partial fractions of J
    let pq = pa.sub(&qb);
    let mut dj = pq.clone();
    let mut factors = Vec::new();
    for (g, _) in &gammas {
        let f = pa.add(&qb.scale(*g));
        dj = dj.mul(&f);
        factors.push(f);
    }
    let mut nj = dj.scale(r / n);
    let mut term = qb.clone();
    for f in &factors {
        term = term.mul(f);
    }
    nj = nj.add(&term);
    for (j, (g, mult)) in gammas.iter().enumerate() {
        let mut term = qb.mul(&pq).scale(*g * *mult as f64 / n);
        for (j2, f) in factors.iter().enumerate() {
            if j2 != j {
                term = term.mul(f);
            }
        }
        nj = nj.add(&term);
    }
    let line = Poly::new(vec![c, -d]);
    let eq = line.mul(&dj).sub(&nj);
    let roots = eq.roots()?;
    Ok(roots.iter().filter(|z| z.im.abs() < 1e-7 * (1.0 + z.norm())).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn uniform02_weights() -> PeriodicWeights {
        // §7.1.2-type fundamental domain: n=2, I2={1}, y_1 = 1, x = (1,1)
        let mut y = BTreeMap::new();
        y.insert(1, 1.0);
        PeriodicWeights { n: 2, x: vec![1.0, 1.0], y }
    }

    fn aztec_weights() -> PeriodicWeights {
        let mut y = BTreeMap::new();
        y.insert(1, 4.0);
        y.insert(2, 0.25);
        PeriodicWeights { n: 2, x: vec![1.0, 1.0], y }
    }

    #[test]
    fn stieltjes_examples() {
        let iv = BoundaryMeasureSpec::Intervals(vec![(0.0, 1.0)]);
        let t = Complex64::new(100.0, 0.0);
        let st = stieltjes_boundary(t, &iv).unwrap();
        assert!((st.re - 0.01).abs() < 1e-3);

        let st2 = stieltjes_boundary(
            Complex64::new(4.0, 0.0),
            &BoundaryMeasureSpec::StaircaseUniform { m: 2 },
        )
        .unwrap();
        assert!((st2.re - 0.5 * (2.0f64).ln()).abs() < 1e-12);

        let two = BoundaryMeasureSpec::Intervals(vec![(0.0, 0.5), (1.0, 1.5)]);
        let st3 = stieltjes_boundary(Complex64::new(3.0, 0.0), &two).unwrap();
        assert!((st3.re - (1.6f64).ln()).abs() < 1e-12);

        assert!(stieltjes_boundary(Complex64::new(0.5, 0.0), &iv).is_err());
    }

    #[test]
    fn h_field_structure() {
        let w = aztec_weights();
        // κ = 0 is the constant x − y
        let h = h_field(Complex64::new(0.3, 0.7), 1.2, 0.4, 0.0, &w);
        assert!((h.re - 0.8).abs() < 1e-14 && h.im.abs() < 1e-14);

        // m+1 real simple roots
        let p = h_numer_poly(0.9, 0.3, 0.55, &w);
        let roots = p.roots().unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().all(|z| z.im.abs() < 1e-9));
        // strictly decreasing between consecutive poles −γ_2 < −γ_1 < 1
        for (lo, hi) in [(-3.9f64, -0.26f64), (-0.24f64, 0.99f64)] {
            let mut prev = f64::INFINITY;
            for k in 0..50 {
                let z = lo + (hi - lo) * k as f64 / 49.0;
                let v = h_field(Complex64::new(z, 0.0), 0.9, 0.3, 0.55, &w).re;
                assert!(v < prev + 1e-9);
                prev = v;
            }
        }
    }

    #[test]
    fn density_spot_values() {
        // Eq. seex at κ → 0, χ = 1: z² = −1, density 1/2
        let stair = GeneralStaircase::new(&uniform02_weights(), 2).unwrap();
        let q = DensityQuery::new(0.001, 1.0 / (1.0 - 0.001)).unwrap();
        let d = density_at_general(q, &stair).unwrap();
        assert_eq!(d.conjugate_pairs, 1);
        assert!((d.density - 0.5).abs() < 0.01, "density = {}", d.density);

        // far outside the support the density vanishes
        let q = DensityQuery::new(0.5, 9.0).unwrap();
        let d = density_at_general(q, &stair).unwrap();
        assert_eq!(d.conjugate_pairs, 0);
        assert_eq!(d.density, 0.0);
    }

    #[test]
    fn interval_density_phases() {
        // two segments; deep inside a segment at small κ the phase is packed
        let spec = BoundaryMeasureSpec::Intervals(vec![(0.0, 0.5), (1.0, 1.5)]);
        let w = aztec_weights();
        let q = DensityQuery::new(0.02, 0.25).unwrap();
        let d = density_at(q, &spec, &w).unwrap();
        assert_eq!(d, 1.0);
        let q = DensityQuery::new(0.02, 6.0).unwrap();
        assert_eq!(density_at(q, &spec, &w).unwrap(), 0.0);
        // in the gap between segments at small κ nothing is frozen yet
        let q = DensityQuery::new(0.3, 0.75).unwrap();
        let d = density_at(q, &spec, &w).unwrap();
        assert!(d > 0.0 && d < 1.0, "gap density {d}");
    }

    #[test]
    fn interval_root_count_contract() {
        let spec = BoundaryMeasureSpec::Intervals(vec![(0.0, 0.5), (1.0, 1.5)]);
        let w = aztec_weights();
        let s = 2;
        let m = 2;
        for &(kappa, x) in
            [(0.2, 0.3), (0.35, 0.8), (0.5, 1.4), (0.7, 2.2), (0.45, -0.7)].iter()
        {
            let q = DensityQuery::new(kappa, x).unwrap();
            let (total, real) = interval_root_profile(q, &spec, &w).unwrap();
            assert_eq!(total, s * (m + 1) + 1, "at κ={kappa}, x={x}");
            assert!(real >= s * (m + 1) - 1, "real={real} at κ={kappa}, x={x}");
            assert!(total - real <= 2);
        }
    }

    #[test]
    fn general_m3_root_counts() {
        // M=3, I2=∅, x=(1,2): 2 real and 4 non-real roots at χ=1, κ=0.5
        let w = PeriodicWeights { n: 2, x: vec![1.0, 2.0], y: BTreeMap::new() };
        let stair = GeneralStaircase::new(&w, 3).unwrap();
        let q = DensityQuery::new(0.5, 1.0 / 0.5).unwrap();
        let (total, real) = general_root_profile(q, &stair).unwrap();
        assert_eq!(total, 6);
        assert_eq!(real, 2);
        let d = density_at_general(q, &stair).unwrap();
        assert_eq!(d.conjugate_pairs, 2);
        assert!(d.density >= 0.0 && d.density <= 1.0);
    }

    #[test]
    fn quartic_frozen_boundary() {
        let curve = frozen_boundary_general(&uniform02_weights(), 2, 256).unwrap();
        assert!(curve.samples.len() >= 200);
        let mut checked = 0;
        for s in &curve.samples {
            let (chi, k) = (s.chi, s.kappa);
            let res = 16.0 * chi * chi + 9.0 * k * k + 8.0 * chi * k - 32.0 * chi;
            assert!(res.abs() < 1e-8, "residual {res} at ({chi}, {k})");
            checked += 1;
        }
        assert!(checked >= 200);
        // top tangency of this configuration sits at (3/4, 1)
        let top = curve
            .tangencies
            .iter()
            .find(|t| t.kappa == 1.0)
            .expect("has a κ=1 tangency");
        assert!((top.chi - 0.75).abs() < 1e-12);
    }

    #[test]
    fn aztec_tangency_count() {
        let spec = BoundaryMeasureSpec::Intervals(vec![
            (0.0, 0.25),
            (0.35, 0.6),
            (0.7, 0.95),
            (1.05, 1.3),
        ]);
        let curve = frozen_boundary(&spec, &aztec_weights(), 48).unwrap();
        assert_eq!(curve.bottom_tangency_count(), 11);
        assert_eq!(curve.rank, 12);
        // every retained sample satisfies the double-root condition by
        // construction; check the parametrization stays in range
        assert!(curve.samples.iter().all(|s| (0.0..=1.0).contains(&s.kappa)));
    }

    #[test]
    fn hexagon_two_segments() {
        // I2 = ∅ (r = n): ellipse-like boundary with one bottom tangency
        let spec = BoundaryMeasureSpec::Intervals(vec![(0.0, 0.5), (1.3, 1.8)]);
        let w = PeriodicWeights { n: 1, x: vec![1.0], y: BTreeMap::new() };
        let curve = frozen_boundary(&spec, &w, 48).unwrap();
        assert_eq!(curve.bottom_tangency_count(), 1);
        assert_eq!(curve.rank, 2);
        assert!(curve.tangencies.iter().any(|t| t.line == TangentLine::KappaOne));
    }

    #[test]
    fn dual_curve_marked_points() {
        let spec = BoundaryMeasureSpec::Intervals(vec![(0.25, 0.75), (1.25, 1.75)]);
        let w = aztec_weights();
        let pts = dual_curve(&spec, &w, &[0.25, 0.75, 1.25, 1.75]).unwrap();
        // t = a_i ↦ (−1/a_i, 0)
        assert!((pts[0].0 + 4.0).abs() < 1e-12 && pts[0].1.abs() < 1e-12);
        assert!((pts[2].0 + 0.8).abs() < 1e-12 && pts[2].1.abs() < 1e-12);
        // t = b_i ↦ (−1/b_i, −r/(n b_i)); r = 0 for the aztec weights
        assert!(pts[1].1.abs() < 1e-12);

        // with r ≠ 0 the second family moves off the axis
        let mut y = BTreeMap::new();
        y.insert(1, 1.0);
        let w2 = PeriodicWeights { n: 2, x: vec![1.0, 1.0], y };
        let pts = dual_curve(&spec, &w2, &[0.75]).unwrap();
        let want = -(1.0 / 2.0) / 0.75;
        assert!((pts[0].1 - want).abs() < 1e-12);
    }

    #[test]
    fn dual_degree_check() {
        let spec = BoundaryMeasureSpec::Intervals(vec![(0.0, 0.5), (1.0, 1.5)]);
        let w = aztec_weights();
        // lines through the region left of all J-zeros hit the dual curve
        // in (m+1)s real parameter values
        let count = dual_line_intersections(&spec, &w, 3.5, -1.2).unwrap();
        assert_eq!(count, 6);
    }

    #[test]
    fn moments_and_height_basics() {
        let spec = BoundaryMeasureSpec::StaircaseUniform { m: 2 };
        let w = uniform02_weights();
        // mass 1 at interior κ
        let mass = moments(0.5, 0, &spec, &w).unwrap();
        assert!((mass - 1.0).abs() < 0.01, "mass {mass}");
        // κ → 0 recovers the boundary measure's first moment (uniform[0,2])
        let m1 = moments(0.02, 1, &spec, &w).unwrap();
        assert!((m1 - 1.0).abs() < 0.03, "m1 {m1}");
        // χ = 0 column: 𝐡 = 2κ
        let h = limit_height(0.0, 0.37, &spec, &w).unwrap();
        assert!((h - 0.74).abs() < 1e-9);
        // the right edge of this domain is χ = 2 − κ/2 where 𝐡 = −κ
        // (the density CDF saturates at mass 1 there)
        let h = limit_height(2.0 - 0.37 / 2.0, 0.37, &spec, &w).unwrap();
        assert!((h + 0.37).abs() < 0.02, "h = {h}");
    }

    #[test]
    fn density_matches_frozen_region_classification() {
        let w = uniform02_weights();
        let stair = GeneralStaircase::new(&w, 2).unwrap();
        let kappa = 0.5;
        // liquid window at κ = 1/2 from the quartic: χ ∈ (0.0845, 1.666)
        for (chi, liquid) in [(0.03, false), (0.5, true), (1.2, true), (1.8, false)] {
            let q = DensityQuery::new(kappa, chi / (1.0 - kappa)).unwrap();
            let d = density_at_general(q, &stair).unwrap();
            assert_eq!(d.conjugate_pairs == 1, liquid, "χ = {chi}");
        }
    }
}
