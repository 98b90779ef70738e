//! Expectation-normalized functions on a finite abelian group.
//!
//! Conventions: `E_G f = |G|^-1 sum f`, `<f, g> = E_G f conj(g)`,
//! `f * g(x) = E_y f(y) g(x - y)`, `f^(gamma) = E_G f conj(gamma)` and
//! `f = sum_gamma f^(gamma) gamma`. With these, `(f * g)^ = f^ g^` and
//! Parseval reads `<f, g> = sum f^ conj(g^)`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::group::{GroupSet, GroupSpec};

/// Values below this magnitude count as zero when reading off supports.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// A complex function on `G`, indexed by element enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseFunction {
    spec: GroupSpec,
    values: Vec<Complex64>,
}

/// Fourier coefficients, indexed by character index.
#[derive(Clone, Debug, PartialEq)]
pub struct DualFunction {
    spec: GroupSpec,
    values: Vec<Complex64>,
}

/// A nonnegative function with `E_G mu = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure(DenseFunction);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvolutionMode {
    Naive,
    Fast,
}

fn same_spec(a: &GroupSpec, b: &GroupSpec) -> Result<()> {
    if a != b {
        return Err(Error::SpecMismatch(a.to_string(), b.to_string()));
    }
    Ok(())
}

impl DenseFunction {
    pub fn new(spec: &GroupSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.order() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a group of order {}",
                values.len(),
                spec.order()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite function value".into()));
        }
        Ok(Self {
            spec: spec.clone(),
            values,
        })
    }

    pub fn from_real(spec: &GroupSpec, values: &[f64]) -> Result<Self> {
        Self::new(spec, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn(spec: &GroupSpec, f: impl Fn(usize) -> Complex64) -> Self {
        Self {
            spec: spec.clone(),
            values: (0..spec.order()).map(f).collect(),
        }
    }

    pub fn zeros(spec: &GroupSpec) -> Self {
        Self::constant(spec, 0.0)
    }

    pub fn constant(spec: &GroupSpec, c: f64) -> Self {
        Self {
            spec: spec.clone(),
            values: vec![Complex64::new(c, 0.0); spec.order()],
        }
    }

    /// `1_A`.
    pub fn indicator(set: &GroupSet) -> Self {
        Self::scaled_indicator(set, 1.0)
    }

    fn scaled_indicator(set: &GroupSet, c: f64) -> Self {
        let mut f = Self::zeros(set.spec());
        for i in set.iter() {
            f.values[i] = Complex64::new(c, 0.0);
        }
        f
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, x: usize) -> Complex64 {
        self.values[x]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            spec: self.spec.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        same_spec(&self.spec, &other.spec)?;
        Ok(Self {
            spec: self.spec.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// `E_G f`.
    pub fn expectation(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.spec.order() as f64
    }

    /// `(E_G |f|^p)^(1/p)`; `p = f64::INFINITY` gives the sup norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidArgument(format!("L^p norm needs p >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.sup_norm());
        }
        let n = self.spec.order() as f64;
        let s: f64 = if p == 1.0 {
            self.values.iter().map(|v| v.norm()).sum()
        } else if p == 2.0 {
            self.values.iter().map(|v| v.norm_sqr()).sum()
        } else {
            self.values.iter().map(|v| v.norm().powf(p)).sum()
        };
        Ok((s / n).powf(1.0 / p))
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() / self.spec.order() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `<f, g> = E_G f conj(g)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        same_spec(&self.spec, &other.spec)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s / self.spec.order() as f64)
    }

    /// `tau_x f(u) = f(x + u)`.
    pub fn translate(&self, x: usize) -> Self {
        let table = self.spec.translation(x);
        Self {
            spec: self.spec.clone(),
            values: table.iter().map(|&v| self.values[v]).collect(),
        }
    }

    /// `u -> f(-u)`.
    pub fn reflect(&self) -> Self {
        Self::from_fn(&self.spec, |u| self.values[self.spec.neg(u)])
    }

    /// `Supp(f)`, up to [`ZERO_THRESHOLD`].
    pub fn support(&self) -> GroupSet {
        GroupSet::from_indices(
            &self.spec,
            (0..self.values.len()).filter(|&i| self.values[i].norm() > ZERO_THRESHOLD),
        )
    }

    pub fn fourier(&self) -> DualFunction {
        let mut values = self.values.clone();
        transform(&self.spec, &mut values, FftDirection::Forward);
        let n = self.spec.order() as f64;
        for v in values.iter_mut() {
            *v /= n;
        }
        DualFunction {
            spec: self.spec.clone(),
            values,
        }
    }

    /// Direct `O(|G|^2)` evaluation of the transform.
    pub fn fourier_naive(&self) -> DualFunction {
        let n = self.spec.order();
        let values = (0..n)
            .map(|g| {
                let s: Complex64 = (0..n)
                    .map(|x| self.values[x] * self.spec.char_value(g, x).conj())
                    .sum();
                s / n as f64
            })
            .collect();
        DualFunction {
            spec: self.spec.clone(),
            values,
        }
    }

    pub fn convolve(&self, other: &Self, mode: ConvolutionMode) -> Result<Self> {
        same_spec(&self.spec, &other.spec)?;
        Ok(match mode {
            ConvolutionMode::Naive => {
                let n = self.spec.order();
                Self::from_fn(&self.spec, |x| {
                    let s: Complex64 = (0..n)
                        .map(|y| self.values[y] * other.values[self.spec.sub(x, y)])
                        .sum();
                    s / n as f64
                })
            }
            ConvolutionMode::Fast => {
                let (a, b) = (self.fourier(), other.fourier());
                a.mul(&b)?.inverse()
            }
        })
    }

    /// Fast convolution.
    pub fn conv(&self, other: &Self) -> Result<Self> {
        self.convolve(other, ConvolutionMode::Fast)
    }

    /// `f^(l) = f * ... * f` with `l` factors.
    pub fn iterate(&self, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidArgument("iterated convolution needs l >= 1".into()));
        }
        let hat = self.fourier();
        Ok(hat.map(|v| v.powu(l as u32)).inverse())
    }

    /// `Spec_eta(f) = { gamma : |f^(gamma)| >= eta ||f||_1 }`.
    pub fn large_spectrum(&self, eta: f64) -> Result<Vec<usize>> {
        self.fourier().large_spectrum(eta, self.l1_norm())
    }

    /// JSON array of `[re, im]` pairs.
    pub fn to_json(&self) -> String {
        let pairs: Vec<[f64; 2]> = self.values.iter().map(|v| [v.re, v.im]).collect();
        serde_json::to_string(&pairs).expect("finite floats serialize")
    }

    pub fn from_json(spec: &GroupSpec, s: &str) -> Result<Self> {
        let pairs: Vec<[f64; 2]> = serde_json::from_str(s)?;
        Self::new(spec, pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

/// `(||f||_p, <f, g>)`.
pub fn lp_structure(f: &DenseFunction, g: &DenseFunction, p: f64) -> Result<(f64, Complex64)> {
    Ok((f.lp_norm(p)?, f.inner(g)?))
}

impl DualFunction {
    pub fn new(spec: &GroupSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.order() {
            return Err(Error::InvalidArgument("dual function length mismatch".into()));
        }
        Ok(Self {
            spec: spec.clone(),
            values,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, gamma: usize) -> Complex64 {
        self.values[gamma]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            spec: self.spec.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_spec(&self.spec, &other.spec)?;
        Ok(Self {
            spec: self.spec.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// `<f^, g^>` in `l^2(G^)` (plain sum).
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        same_spec(&self.spec, &other.spec)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    /// `f = sum_gamma f^(gamma) gamma`.
    pub fn inverse(&self) -> DenseFunction {
        let mut values = self.values.clone();
        transform(&self.spec, &mut values, FftDirection::Inverse);
        DenseFunction {
            spec: self.spec.clone(),
            values,
        }
    }

    /// Characters with `|f^| >= eta * l1`, threshold inclusive up to rounding.
    pub fn large_spectrum(&self, eta: f64, l1: f64) -> Result<Vec<usize>> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidArgument(format!("eta must lie in (0,1], got {eta}")));
        }
        if l1 <= ZERO_THRESHOLD {
            return Err(Error::InvalidArgument("large spectrum of the zero function".into()));
        }
        let thr = eta * l1 - 1e-12 * l1;
        Ok((0..self.values.len())
            .filter(|&g| self.values[g].norm() >= thr)
            .collect())
    }
}

impl Measure {
    pub fn new(f: DenseFunction) -> Result<Self> {
        if f.values.iter().any(|v| v.im.abs() > ZERO_THRESHOLD || v.re < -ZERO_THRESHOLD) {
            return Err(Error::InvalidArgument("measure values must be nonnegative reals".into()));
        }
        let mass = f.expectation().re;
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("measure has total mass {mass}")));
        }
        Ok(Self(f))
    }

    /// `mu_A = (|G| / |A|) 1_A`.
    pub fn uniform(set: &GroupSet) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::InvalidArgument("uniform measure on the empty set".into()));
        }
        let c = set.spec().order() as f64 / set.len() as f64;
        Ok(Self(DenseFunction::scaled_indicator(set, c)))
    }

    pub fn point_mass(spec: &GroupSpec, x: usize) -> Self {
        Self::uniform(&GroupSet::singleton(spec, x)).expect("nonempty")
    }

    pub fn function(&self) -> &DenseFunction {
        &self.0
    }

    pub fn into_function(self) -> DenseFunction {
        self.0
    }
}

impl AsRef<DenseFunction> for Measure {
    fn as_ref(&self) -> &DenseFunction {
        &self.0
    }
}

/// Multi-dimensional DFT in place, one axis at a time. Unnormalized:
/// forward uses `e(-jk/n)`, inverse `e(+jk/n)`.
fn transform(spec: &GroupSpec, data: &mut [Complex64], dir: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let n = data.len();
    let mut stride = 1usize;
    for &m in spec.moduli() {
        if m > 1 {
            let fft: Arc<dyn Fft<f64>> = planner.plan_fft(m, dir);
            if stride == 1 {
                fft.process(data);
            } else {
                // Gather every line along this axis into one contiguous buffer.
                let block = stride * m;
                let mut buf = vec![Complex64::default(); n];
                let mut pos = 0;
                for base in (0..n).step_by(block) {
                    for o in 0..stride {
                        for k in 0..m {
                            buf[pos] = data[base + o + k * stride];
                            pos += 1;
                        }
                    }
                }
                fft.process(&mut buf);
                pos = 0;
                for base in (0..n).step_by(block) {
                    for o in 0..stride {
                        for k in 0..m {
                            data[base + o + k * stride] = buf[pos];
                            pos += 1;
                        }
                    }
                }
            }
        }
        stride *= m;
    }
}

/// Exact representation counts `r(x) = #{(a, b) in A x B : a + b = x}`.
pub fn sum_counts(a: &GroupSet, b: &GroupSet) -> Result<Vec<u64>> {
    same_spec(a.spec(), b.spec())?;
    let spec = a.spec();
    let mut out = vec![0u64; spec.order()];
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let n = spec.order();
    let log_n = usize::BITS - n.leading_zeros();
    if small.len() * big.len() > 16 * n * log_n as usize {
        let u: Vec<u64> = (0..n).map(|x| a.contains(x) as u64).collect();
        let v: Vec<u64> = (0..n).map(|x| b.contains(x) as u64).collect();
        if let Some(out) = fft_counts(spec, &u, &v) {
            return Ok(out);
        }
    }
    let bs = big.indices();
    for x in small.iter() {
        if spec.is_cyclic() || bs.len() * 8 < spec.order() {
            for &y in &bs {
                out[spec.add(x, y)] += 1;
            }
        } else {
            let table = spec.translation(x);
            for &y in &bs {
                out[table[y]] += 1;
            }
        }
    }
    Ok(out)
}

/// Integer convolution through the transform, rounded. Returns `None` when any
/// value is not within 1/4 of an integer, so the caller can fall back.
fn fft_counts(spec: &GroupSpec, u: &[u64], v: &[u64]) -> Option<Vec<u64>> {
    let mut fu: Vec<Complex64> = u.iter().map(|&w| Complex64::new(w as f64, 0.0)).collect();
    let mut fv: Vec<Complex64> = v.iter().map(|&w| Complex64::new(w as f64, 0.0)).collect();
    transform(spec, &mut fu, FftDirection::Forward);
    transform(spec, &mut fv, FftDirection::Forward);
    for (x, y) in fu.iter_mut().zip(&fv) {
        *x *= y;
    }
    transform(spec, &mut fu, FftDirection::Inverse);
    let n = spec.order() as f64;
    fu.iter()
        .map(|z| {
            let r = z.re / n;
            let k = r.round();
            ((r - k).abs() < 0.25 && k >= 0.0).then_some(k as u64)
        })
        .collect()
}

/// Exact convolution of nonnegative integer weight vectors over the group:
/// `(u # v)(x) = sum_{y + z = x} u(y) v(z)`.
pub fn count_convolve(spec: &GroupSpec, u: &[u64], v: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; spec.order()];
    let vs: Vec<(usize, u64)> = v.iter().copied().enumerate().filter(|&(_, w)| w != 0).collect();
    let n = spec.order();
    let support = u.iter().filter(|&&w| w != 0).count();
    let log_n = (usize::BITS - n.leading_zeros()) as usize;
    let total: f64 = u.iter().sum::<u64>() as f64 * v.iter().sum::<u64>() as f64;
    // Keep the rounded transform well inside double precision.
    if support * vs.len() > 16 * n * log_n && total < 1e12 {
        if let Some(out) = fft_counts(spec, u, v) {
            return out;
        }
    }
    let tabled = !spec.is_cyclic() && vs.len() * 8 >= n;
    for (y, &wy) in u.iter().enumerate() {
        if wy == 0 {
            continue;
        }
        if tabled {
            let table = spec.translation(y);
            for &(z, wz) in &vs {
                out[table[z]] += wy * wz;
            }
        } else {
            for &(z, wz) in &vs {
                out[spec.add(y, z)] += wy * wz;
            }
        }
    }
    out
}
