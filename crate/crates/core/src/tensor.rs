//! Dense row-major tensors and the numeric kernels every block is built on.
//!
//! Kernels use one fixed summation order and run single-threaded, so any
//! operation called twice on identical inputs is bitwise reproducible. This
//! matters because the reconstruction-error analyses downstream study exactly
//! those rounding effects.
//!
//! Operations that can amplify bad inputs (`softmax_rows`, the reversible
//! reconstructions, losses) either prevent non-finite values by construction
//! or turn them into [`Error::NonFinite`]; nothing propagates NaN silently.

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::scalar::Scalar;

/// Dense numeric array with shape; the single value carrier for activations,
/// parameters and gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<S> {
    shape: Vec<usize>,
    data: Vec<S>,
}

impl<S: Scalar> Tensor<S> {
    pub fn new(shape: Vec<usize>, data: Vec<S>) -> Result<Self> {
        let numel: usize = shape.iter().product();
        if shape.iter().any(|&d| d == 0) {
            return Err(Error::InvalidDimension {
                op: "Tensor::new",
                detail: format!("zero-sized dimension in {shape:?}"),
            });
        }
        if numel != data.len() {
            return Err(Error::shape(
                "Tensor::new",
                format!("shape {shape:?} implies {numel} elements, got {}", data.len()),
            ));
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let numel = shape.iter().product();
        Tensor { shape: shape.to_vec(), data: vec![S::zero(); numel] }
    }

    pub fn filled(shape: &[usize], value: S) -> Self {
        let numel = shape.iter().product();
        Tensor { shape: shape.to_vec(), data: vec![value; numel] }
    }

    /// Square identity matrix.
    pub fn eye(n: usize) -> Self {
        let mut t = Tensor::zeros(&[n, n]);
        for i in 0..n {
            t.data[i * n + i] = S::one();
        }
        t
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::shape("Tensor::from_rows", "ragged rows".to_string()));
        }
        Tensor::new(vec![m, n], rows.into_iter().flatten().collect())
    }

    /// i.i.d. normal samples, deterministic for a given generator state.
    pub fn gaussian(shape: &[usize], mean: f64, std: f64, rng: &mut Rng) -> Result<Self> {
        if std < 0.0 {
            return Err(Error::InvalidConfig(format!("negative std {std} in gaussian fill")));
        }
        let numel: usize = shape.iter().product();
        let data = (0..numel).map(|_| S::from_f(rng.normal() * std + mean)).collect();
        Ok(Tensor { shape: shape.to_vec(), data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    /// Size of the element buffer in bytes.
    pub fn byte_size(&self) -> usize {
        self.data.len() * std::mem::size_of::<S>()
    }

    /// Last-axis length; the feature dimension of `[..., d]` tensors.
    pub fn last_dim(&self) -> usize {
        *self.shape.last().unwrap_or(&0)
    }

    /// Number of rows when the tensor is viewed as `[rows, last_dim]`.
    pub fn leading(&self) -> usize {
        if self.shape.is_empty() {
            0
        } else {
            self.data.len() / self.last_dim()
        }
    }

    /// Same buffer viewed under a different shape of equal element count.
    pub fn reshaped(&self, shape: &[usize]) -> Result<Self> {
        let numel: usize = shape.iter().product();
        if numel != self.data.len() {
            return Err(Error::shape(
                "reshape",
                format!("{:?} -> {shape:?}", self.shape),
            ));
        }
        Ok(Tensor { shape: shape.to_vec(), data: self.data.clone() })
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Tensor { shape: self.shape.clone(), data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn scale(&self, s: S) -> Self {
        self.map(|x| x * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn mul_elem(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "mul_elem", |a, b| a * b)
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: S) -> Result<Self> {
        self.zip_with(other, "add_scaled", |a, b| a + s * b)
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::shape(
                "add_assign",
                format!("{:?} vs {:?}", self.shape, other.shape),
            ));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, op: &'static str, f: impl Fn(S, S) -> S) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::shape(op, format!("{:?} vs {:?}", self.shape, other.shape)));
        }
        Ok(Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn sum(&self) -> S {
        let mut acc = S::zero();
        for &x in &self.data {
            acc += x;
        }
        acc
    }

    pub fn max_abs(&self) -> S {
        let mut m = S::zero();
        for &x in &self.data {
            let a = x.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn frob_norm(&self) -> S {
        let mut acc = S::zero();
        for &x in &self.data {
            acc += x * x;
        }
        acc.sqrt()
    }

    pub fn check_finite(&self, op: &'static str) -> Result<()> {
        if self.data.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite { op })
        }
    }

    /// Matrix product `self · rhs` with `self` viewed as `[rows, k]` and
    /// `rhs` as `[k, n]`; leading dimensions of `self` are preserved.
    /// Accumulation runs in ascending-k order, fixed.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if rhs.shape.len() != 2 {
            return Err(Error::shape("matmul", format!("rhs must be 2-d, got {:?}", rhs.shape)));
        }
        let k = self.last_dim();
        let (rk, n) = (rhs.shape[0], rhs.shape[1]);
        if k != rk {
            return Err(Error::shape(
                "matmul",
                format!("inner dims disagree: {:?} · {:?}", self.shape, rhs.shape),
            ));
        }
        let m = self.leading();
        let mut out = vec![S::zero(); m * n];
        for i in 0..m {
            let a_row = &self.data[i * k..(i + 1) * k];
            let o_row = &mut out[i * n..(i + 1) * n];
            for (kk, &a_ik) in a_row.iter().enumerate() {
                let b_row = &rhs.data[kk * n..(kk + 1) * n];
                for (o, &b) in o_row.iter_mut().zip(b_row) {
                    *o += a_ik * b;
                }
            }
        }
        let mut shape = self.shape.clone();
        *shape.last_mut().unwrap() = n;
        Ok(Tensor { shape, data: out })
    }

    /// `self · rhsᵀ` with `self` viewed as `[rows, k]` and `rhs` as `[n, k]`.
    pub fn matmul_bt(&self, rhs: &Self) -> Result<Self> {
        if rhs.shape.len() != 2 {
            return Err(Error::shape("matmul_bt", format!("rhs must be 2-d, got {:?}", rhs.shape)));
        }
        let k = self.last_dim();
        let (n, rk) = (rhs.shape[0], rhs.shape[1]);
        if k != rk {
            return Err(Error::shape(
                "matmul_bt",
                format!("inner dims disagree: {:?} · {:?}ᵀ", self.shape, rhs.shape),
            ));
        }
        let m = self.leading();
        let mut out = vec![S::zero(); m * n];
        for i in 0..m {
            let a_row = &self.data[i * k..(i + 1) * k];
            for j in 0..n {
                let b_row = &rhs.data[j * k..(j + 1) * k];
                let mut acc = S::zero();
                for (&a, &b) in a_row.iter().zip(b_row) {
                    acc += a * b;
                }
                out[i * n + j] = acc;
            }
        }
        let mut shape = self.shape.clone();
        *shape.last_mut().unwrap() = n;
        Ok(Tensor { shape, data: out })
    }

    /// `selfᵀ · rhs` with both viewed as `[rows, *]`; the usual weight-gradient
    /// contraction `xᵀ · dy`.
    pub fn t_matmul(&self, rhs: &Self) -> Result<Self> {
        let m = self.last_dim();
        let n = rhs.last_dim();
        let rows = self.leading();
        if rows != rhs.leading() {
            return Err(Error::shape(
                "t_matmul",
                format!("row counts disagree: {:?} vs {:?}", self.shape, rhs.shape),
            ));
        }
        let mut out = vec![S::zero(); m * n];
        for r in 0..rows {
            let a_row = &self.data[r * m..(r + 1) * m];
            let b_row = &rhs.data[r * n..(r + 1) * n];
            for (i, &a) in a_row.iter().enumerate() {
                let o_row = &mut out[i * n..(i + 1) * n];
                for (o, &b) in o_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Tensor { shape: vec![m, n], data: out })
    }

    /// Row-wise softmax over the last axis, computed with max subtraction.
    pub fn softmax_rows(&self) -> Result<Self> {
        let n = self.last_dim();
        if n == 0 {
            return Err(Error::InvalidDimension { op: "softmax_rows", detail: "empty rows".into() });
        }
        let mut out = self.data.clone();
        for row in out.chunks_mut(n) {
            let mut max = row[0];
            for &x in row.iter() {
                if x > max {
                    max = x;
                }
            }
            let mut denom = S::zero();
            for x in row.iter_mut() {
                *x = (*x - max).exp();
                denom += *x;
            }
            for x in row.iter_mut() {
                *x = *x / denom;
            }
        }
        Ok(Tensor { shape: self.shape.clone(), data: out })
    }

    /// GELU with the exact Gaussian CDF: `x · Φ(x)`.
    pub fn gelu(&self) -> Self {
        self.map(gelu_scalar)
    }

    /// Derivative of exact-Φ GELU at the forward input, times `dy`.
    pub fn gelu_vjp(&self, dy: &Self) -> Result<Self> {
        self.zip_with(dy, "gelu_vjp", |x, g| gelu_prime(x) * g)
    }

    pub fn relu(&self) -> Self {
        self.map(|x| if x > S::zero() { x } else { S::zero() })
    }

    /// ReLU input gradient: passes `dy` where the forward input was positive.
    pub fn relu_vjp(&self, dy: &Self) -> Result<Self> {
        self.zip_with(dy, "relu_vjp", |x, g| if x > S::zero() { g } else { S::zero() })
    }
}

fn gelu_scalar<S: Scalar>(x: S) -> S {
    x * phi(x)
}

/// Standard normal CDF via the error function.
fn phi<S: Scalar>(x: S) -> S {
    let half = S::from_f(0.5);
    let inv_sqrt2 = S::from_f(std::f64::consts::FRAC_1_SQRT_2);
    half * (S::one() + (x * inv_sqrt2).erf())
}

fn gelu_prime<S: Scalar>(x: S) -> S {
    // d/dx [x·Φ(x)] = Φ(x) + x·φ(x)
    let inv_sqrt_2pi = S::from_f(1.0 / (2.0 * std::f64::consts::PI).sqrt());
    let density = inv_sqrt_2pi * (-x * x * S::from_f(0.5)).exp();
    phi(x) + x * density
}

/// Per-last-axis normalization to zero mean and unit population variance,
/// followed by the affine `gamma ⊙ x̂ + bias`.
///
/// Returns `(y, x̂, inv_std)`; the two extras are exactly what the backward
/// pass needs.
pub fn layer_norm_cached<S: Scalar>(
    x: &Tensor<S>,
    gamma: &Tensor<S>,
    bias: &Tensor<S>,
    eps: f64,
) -> Result<(Tensor<S>, Tensor<S>, Tensor<S>)> {
    let d = x.last_dim();
    if d == 0 {
        return Err(Error::InvalidDimension { op: "layer_norm", detail: "d = 0".into() });
    }
    if eps <= 0.0 {
        return Err(Error::InvalidConfig(format!("layer_norm eps must be > 0, got {eps}")));
    }
    if gamma.shape() != [d] || bias.shape() != [d] {
        return Err(Error::shape(
            "layer_norm",
            format!("gamma {:?} / bias {:?} vs d = {d}", gamma.shape(), bias.shape()),
        ));
    }
    let rows = x.leading();
    let eps = S::from_f(eps);
    let inv_d = S::from_f(1.0 / d as f64);
    let mut y = vec![S::zero(); rows * d];
    let mut xhat = vec![S::zero(); rows * d];
    let mut inv_std = vec![S::zero(); rows];
    for r in 0..rows {
        let row = &x.data()[r * d..(r + 1) * d];
        let mut mean = S::zero();
        for &v in row {
            mean += v;
        }
        mean = mean * inv_d;
        let mut var = S::zero();
        for &v in row {
            let c = v - mean;
            var += c * c;
        }
        var = var * inv_d;
        let istd = (var + eps).sqrt().recip();
        inv_std[r] = istd;
        for i in 0..d {
            let h = (row[i] - mean) * istd;
            xhat[r * d + i] = h;
            y[r * d + i] = gamma.data()[i] * h + bias.data()[i];
        }
    }
    Ok((
        Tensor::new(x.shape().to_vec(), y)?,
        Tensor::new(x.shape().to_vec(), xhat)?,
        Tensor::new(vec![rows], inv_std)?,
    ))
}

pub fn layer_norm<S: Scalar>(
    x: &Tensor<S>,
    gamma: &Tensor<S>,
    bias: &Tensor<S>,
    eps: f64,
) -> Result<Tensor<S>> {
    layer_norm_cached(x, gamma, bias, eps).map(|(y, _, _)| y)
}

/// Analytic layer-norm gradients. Returns `(dx, dgamma, dbias)`.
pub fn layer_norm_backward<S: Scalar>(
    dy: &Tensor<S>,
    xhat: &Tensor<S>,
    inv_std: &Tensor<S>,
    gamma: &Tensor<S>,
) -> Result<(Tensor<S>, Tensor<S>, Tensor<S>)> {
    let d = dy.last_dim();
    let rows = dy.leading();
    if xhat.shape() != dy.shape() || inv_std.numel() != rows {
        return Err(Error::shape("layer_norm_backward", "cache does not match dy".to_string()));
    }
    let inv_d = S::from_f(1.0 / d as f64);
    let mut dx = vec![S::zero(); rows * d];
    let mut dgamma = vec![S::zero(); d];
    let mut dbias = vec![S::zero(); d];
    for r in 0..rows {
        let dy_row = &dy.data()[r * d..(r + 1) * d];
        let xh_row = &xhat.data()[r * d..(r + 1) * d];
        let istd = inv_std.data()[r];
        let mut sum_dxhat = S::zero();
        let mut sum_dxhat_xhat = S::zero();
        for i in 0..d {
            let dxhat = dy_row[i] * gamma.data()[i];
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xh_row[i];
            dgamma[i] += dy_row[i] * xh_row[i];
            dbias[i] += dy_row[i];
        }
        let mean_dxhat = sum_dxhat * inv_d;
        let mean_dxhat_xhat = sum_dxhat_xhat * inv_d;
        for i in 0..d {
            let dxhat = dy_row[i] * gamma.data()[i];
            dx[r * d + i] = istd * (dxhat - mean_dxhat - xh_row[i] * mean_dxhat_xhat);
        }
    }
    Ok((
        Tensor::new(dy.shape().to_vec(), dx)?,
        Tensor::new(vec![d], dgamma)?,
        Tensor::new(vec![d], dbias)?,
    ))
}

/// Gradient of row-wise softmax: `p ⊙ (dy − rowsum(dy ⊙ p))`.
pub fn softmax_rows_backward<S: Scalar>(probs: &Tensor<S>, dy: &Tensor<S>) -> Result<Tensor<S>> {
    if probs.shape() != dy.shape() {
        return Err(Error::shape("softmax_rows_backward", "probs vs dy".to_string()));
    }
    let n = probs.last_dim();
    let mut out = vec![S::zero(); probs.numel()];
    for r in 0..probs.leading() {
        let p = &probs.data()[r * n..(r + 1) * n];
        let g = &dy.data()[r * n..(r + 1) * n];
        let mut dot = S::zero();
        for i in 0..n {
            dot += p[i] * g[i];
        }
        for i in 0..n {
            out[r * n + i] = p[i] * (g[i] - dot);
        }
    }
    Tensor::new(probs.shape().to_vec(), out)
}

/// Largest elementwise absolute difference between two same-shape tensors.
pub fn max_abs_diff<S: Scalar>(a: &Tensor<S>, b: &Tensor<S>) -> Result<S> {
    a.sub(b).map(|d| d.max_abs())
}
