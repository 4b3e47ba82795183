//! Dense K-way tensors, index arithmetic, and the multilinear contraction
//! primitives everything else is built on.
//!
//! Entries are stored flat in last-index-fastest (row-major) order: the flat
//! offset of `(i_1, ..., i_K)` in a tensor with dimensions `(n_1, ..., n_K)`
//! is `((i_1 * n_2 + i_2) * n_3 + i_3) * ... + i_K`. Tensors are immutable
//! once constructed and every operation here is a pure function, so values
//! can be shared freely across threads.

pub mod io;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// Ordered mode dimensions `(n_1, ..., n_K)` of a dense tensor.
///
/// The empty shape (order 0) describes a scalar; it only arises as the result
/// of collapsing every mode of a tensor. Entry points that need an ambient
/// space (samplers, estimators, bounds) require order >= 1 and say so.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    /// Builds a shape, rejecting zero dimensions and products that overflow
    /// the addressable range (with room for 8-byte entries).
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "shape dimensions must be positive, got {dims:?}"
            )));
        }
        let mut total: usize = 1;
        for &n in dims {
            total = total.checked_mul(n).ok_or_else(|| {
                Error::InvalidParameter(format!("shape {dims:?} overflows the addressable range"))
            })?;
        }
        total.checked_mul(std::mem::size_of::<f64>()).ok_or_else(|| {
            Error::InvalidParameter(format!("shape {dims:?} overflows the addressable range"))
        })?;
        Ok(Shape { dims: dims.to_vec() })
    }

    /// The 0-way shape of a scalar.
    pub fn scalar() -> Self {
        Shape { dims: Vec::new() }
    }

    /// Number of modes K.
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, mode: usize) -> usize {
        self.dims[mode]
    }

    /// Product of all dimensions; 1 for the scalar shape.
    pub fn total_size(&self) -> usize {
        self.dims.iter().product()
    }

    /// Sum of all dimensions, the `sum_k n_k` showing up in the bounds.
    pub fn sum_dims(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Flat offset of a multi-index in last-index-fastest order.
    pub fn flat_index(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.order() {
            return Err(Error::ShapeMismatch(format!(
                "index of length {} for order-{} tensor",
                idx.len(),
                self.order()
            )));
        }
        let mut flat = 0usize;
        for (k, (&i, &n)) in idx.iter().zip(&self.dims).enumerate() {
            if i >= n {
                return Err(Error::ShapeMismatch(format!(
                    "index {i} out of range for mode {k} of size {n}"
                )));
            }
            flat = flat * n + i;
        }
        Ok(flat)
    }

    /// Inverse of [`Shape::flat_index`].
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        debug_assert!(flat < self.total_size());
        let mut idx = vec![0usize; self.order()];
        for (k, &n) in self.dims.iter().enumerate().rev() {
            idx[k] = flat % n;
            flat /= n;
        }
        idx
    }

    /// Shape with mode `mode` removed.
    fn without_mode(&self, mode: usize) -> Shape {
        let mut dims = self.dims.clone();
        dims.remove(mode);
        Shape { dims }
    }
}

impl<'de> Deserialize<'de> for Shape {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let dims = Vec::<usize>::deserialize(deserializer)?;
        Shape::new(&dims).map_err(D::Error::custom)
    }
}

impl std::fmt::Display for Shape {
    /// Renders as `n1xn2x...xnK`, e.g. `5x5x5`; the scalar shape as `scalar`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.dims.is_empty() {
            return write!(f, "scalar");
        }
        let mut first = true;
        for n in &self.dims {
            if !first {
                write!(f, "x")?;
            }
            write!(f, "{n}")?;
            first = false;
        }
        Ok(())
    }
}

/// Dense real tensor with finite entries in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Shape,
    entries: Vec<f64>,
}

impl DenseTensor {
    /// Takes ownership of a flat entry array. Fails if the length does not
    /// match `shape.total_size()` or any entry is NaN/infinite.
    pub fn new(shape: Shape, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != shape.total_size() {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for shape {} of total size {}",
                entries.len(),
                shape,
                shape.total_size()
            )));
        }
        if let Some(pos) = entries.iter().position(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite entry {} at flat index {pos}",
                entries[pos]
            )));
        }
        Ok(DenseTensor { shape, entries })
    }

    pub fn zeros(shape: Shape) -> Self {
        let n = shape.total_size();
        DenseTensor { shape, entries: vec![0.0; n] }
    }

    /// The 0-way tensor holding a single value.
    pub fn from_scalar(value: f64) -> Result<Self> {
        DenseTensor::new(Shape::scalar(), vec![value])
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, idx: &[usize]) -> Result<f64> {
        Ok(self.entries[self.shape.flat_index(idx)?])
    }

    pub fn set(&mut self, idx: &[usize], value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite entry {value}")));
        }
        let flat = self.shape.flat_index(idx)?;
        self.entries[flat] = value;
        Ok(())
    }

    /// The single entry of a 0-way tensor.
    pub fn scalar_value(&self) -> Option<f64> {
        if self.order() == 0 {
            Some(self.entries[0])
        } else {
            None
        }
    }

    /// `sqrt(sum of squared entries)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e * e).sum::<f64>().sqrt()
    }

    /// Flat index and value of the entry with the largest magnitude; the
    /// lowest flat index wins ties.
    pub fn max_abs_entry(&self) -> (usize, f64) {
        let mut best = (0usize, self.entries[0]);
        for (i, &e) in self.entries.iter().enumerate() {
            if e.abs() > best.1.abs() {
                best = (i, e);
            }
        }
        best
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        DenseTensor::new(self.shape.clone(), self.entries.iter().map(|e| c * e).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {} and {} tensors",
                self.shape, other.shape
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        DenseTensor::new(self.shape.clone(), entries)
    }

    /// Reorders modes: entry `(i_1, ..., i_K)` of the result equals entry
    /// `(i_{perm[1]}, ..., i_{perm[K]})` of `self`.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<Self> {
        let k = self.order();
        let mut seen = vec![false; k];
        if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter(format!(
                "{perm:?} is not a permutation of 0..{k}"
            )));
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.shape.dim(p)).collect();
        let new_shape = Shape::new(&new_dims)?;
        let mut entries = vec![0.0; self.entries.len()];
        let mut src_idx = vec![0usize; k];
        for (flat, slot) in entries.iter_mut().enumerate() {
            let dst_idx = new_shape.multi_index(flat);
            for (d, &p) in perm.iter().enumerate() {
                src_idx[p] = dst_idx[d];
            }
            *slot = self.entries[self.shape.flat_index(&src_idx)?];
        }
        DenseTensor::new(new_shape, entries)
    }
}

/// One unit vector per mode; the argument point of the multilinear form.
///
/// Vectors are normalized at construction, so each has Euclidean norm within
/// `1 ± 1e-12`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitTuple {
    vectors: Vec<Vec<f64>>,
}

impl UnitTuple {
    /// Normalizes each vector; fails on empty, zero, or non-finite vectors.
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let mut out = Vec::with_capacity(vectors.len());
        for (k, v) in vectors.into_iter().enumerate() {
            if v.is_empty() {
                return Err(Error::InvalidParameter(format!("mode-{k} vector is empty")));
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "mode-{k} vector has norm {norm}, cannot normalize"
                )));
            }
            out.push(v.into_iter().map(|x| x / norm).collect());
        }
        Ok(UnitTuple { vectors: out })
    }

    /// The tuple of standard basis vectors `(e_{idx[1]}, ..., e_{idx[K]})`.
    pub fn basis(shape: &Shape, idx: &[usize]) -> Result<Self> {
        if idx.len() != shape.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} basis indices for order-{} shape",
                idx.len(),
                shape.order()
            )));
        }
        let mut vectors = Vec::with_capacity(shape.order());
        for (k, (&i, &n)) in idx.iter().zip(shape.dims()).enumerate() {
            if i >= n {
                return Err(Error::ShapeMismatch(format!(
                    "basis index {i} out of range for mode {k} of size {n}"
                )));
            }
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            vectors.push(v);
        }
        Ok(UnitTuple { vectors })
    }

    /// Draws each vector uniformly on its sphere (normalized Gaussian).
    pub fn random<R: rand::Rng>(shape: &Shape, rng: &mut R) -> Self {
        let vectors = shape
            .dims()
            .iter()
            .map(|&n| random_unit_vector(n, rng))
            .collect();
        UnitTuple { vectors }
    }

    pub fn order(&self) -> usize {
        self.vectors.len()
    }

    pub fn vector(&self, mode: usize) -> &[f64] {
        &self.vectors[mode]
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Replaces the mode-`k` vector with an already-normalized one.
    pub(crate) fn set_vector(&mut self, mode: usize, v: Vec<f64>) {
        debug_assert_eq!(v.len(), self.vectors[mode].len());
        self.vectors[mode] = v;
    }

    pub fn matches(&self, shape: &Shape) -> bool {
        self.order() == shape.order()
            && self
                .vectors
                .iter()
                .zip(shape.dims())
                .all(|(v, &n)| v.len() == n)
    }
}

/// Uniform point on the unit sphere in dimension `n` via a normalized
/// Gaussian draw.
pub fn random_unit_vector<R: rand::Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn check_tuple(x: &DenseTensor, u: &UnitTuple) -> Result<()> {
    if !u.matches(x.shape()) {
        return Err(Error::ShapeMismatch(format!(
            "unit tuple of orders {:?} does not match tensor shape {}",
            u.vectors().iter().map(Vec::len).collect::<Vec<_>>(),
            x.shape()
        )));
    }
    Ok(())
}

/// Contracts mode `mode` of `x` against `v`, producing a (K-1)-way tensor.
///
/// With `outer = n_1 ... n_{mode-1}` and `inner = n_{mode+1} ... n_K`, entry
/// `(o, i)` of the result is `sum_j x[o, j, i] * v[j]` in flat coordinates.
/// Collapsing all modes in any order reproduces the full multilinear form.
pub fn mode_collapse(x: &DenseTensor, mode: usize, v: &[f64]) -> Result<DenseTensor> {
    let k = x.order();
    if mode >= k {
        return Err(Error::InvalidParameter(format!(
            "mode {mode} out of range for order-{k} tensor"
        )));
    }
    let n = x.shape().dim(mode);
    if v.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "vector of length {} against mode {mode} of size {n}",
            v.len()
        )));
    }
    if let Some(bad) = v.iter().find(|c| !c.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite coefficient {bad}")));
    }
    let inner: usize = x.shape().dims()[mode + 1..].iter().product();
    let outer: usize = x.shape().dims()[..mode].iter().product();
    let mut out = vec![0.0; outer * inner];
    let src = x.entries();
    for o in 0..outer {
        let out_base = o * inner;
        let src_base = o * n * inner;
        for (j, &c) in v.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let row = &src[src_base + j * inner..src_base + (j + 1) * inner];
            for (slot, &e) in out[out_base..out_base + inner].iter_mut().zip(row) {
                *slot += c * e;
            }
        }
    }
    DenseTensor::new(x.shape().without_mode(mode), out)
}

/// Evaluates the multilinear form `X(u_1, ..., u_K) = sum X_{i_1...i_K}
/// u_{1 i_1} ... u_{K i_K}` by successive mode collapses, largest mode first
/// so intermediates stay as small as possible.
pub fn multilinear_eval(x: &DenseTensor, u: &UnitTuple) -> Result<f64> {
    check_tuple(x, u)?;
    if x.order() == 0 {
        return Ok(x.entries()[0]);
    }
    // `remaining[p]` is the original mode stored at position p of `cur`.
    let mut remaining: Vec<usize> = (0..x.order()).collect();
    let mut cur: Option<DenseTensor> = None;
    while !remaining.is_empty() {
        let t = cur.as_ref().unwrap_or(x);
        let mut pick = 0;
        for (p, &orig) in remaining.iter().enumerate() {
            if t.shape().dim(p) > t.shape().dim(pick) {
                pick = p;
            }
            let _ = orig;
        }
        let orig = remaining.remove(pick);
        cur = Some(mode_collapse(t, pick, u.vector(orig))?);
    }
    Ok(cur.expect("at least one collapse ran").entries()[0])
}

/// Free-function form of [`DenseTensor::frobenius_norm`].
pub fn frobenius_norm(x: &DenseTensor) -> f64 {
    x.frobenius_norm()
}

/// Rank-one tensor with entries `prod_k v_k[i_k]`; its Frobenius norm is the
/// product of the vector norms.
pub fn outer_product(vectors: &[Vec<f64>]) -> Result<DenseTensor> {
    if vectors.is_empty() {
        return Err(Error::InvalidParameter("outer product of no vectors".into()));
    }
    let dims: Vec<usize> = vectors.iter().map(Vec::len).collect();
    let shape = Shape::new(&dims)?;
    let mut entries = vec![1.0; shape.total_size()];
    let mut inner = shape.total_size();
    for v in vectors {
        inner /= v.len();
        let mut pos = 0;
        while pos < entries.len() {
            for &c in v {
                for slot in &mut entries[pos..pos + inner] {
                    *slot *= c;
                }
                pos += inner;
            }
        }
    }
    DenseTensor::new(shape, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use approx::assert_relative_eq;

    /// Brute-force nested-loop multilinear form, the independent oracle for
    /// the contraction path.
    fn naive_multilinear(x: &DenseTensor, u: &UnitTuple) -> f64 {
        let mut acc = 0.0;
        for flat in 0..x.shape().total_size() {
            let idx = x.shape().multi_index(flat);
            let mut term = x.entries()[flat];
            for (k, &i) in idx.iter().enumerate() {
                term *= u.vector(k)[i];
            }
            acc += term;
        }
        acc
    }

    fn random_tensor(dims: &[usize], seed: u64) -> DenseTensor {
        use rand_distr::{Distribution, StandardNormal};
        let shape = Shape::new(dims).unwrap();
        let mut rng = stream_rng(seed, &[0xfeed]);
        let entries = (0..shape.total_size())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        DenseTensor::new(shape, entries).unwrap()
    }

    #[test]
    fn shape_rejects_zero_dims_and_overflow() {
        assert!(Shape::new(&[2, 0, 3]).is_err());
        assert!(Shape::new(&[usize::MAX, 2]).is_err());
        assert!(Shape::new(&[1]).is_ok());
    }

    #[test]
    fn flat_index_is_last_index_fastest() {
        let s = Shape::new(&[2, 3, 4]).unwrap();
        // offset = (i1*3 + i2)*4 + i3
        assert_eq!(s.flat_index(&[0, 0, 0]).unwrap(), 0);
        assert_eq!(s.flat_index(&[0, 0, 1]).unwrap(), 1);
        assert_eq!(s.flat_index(&[0, 1, 0]).unwrap(), 4);
        assert_eq!(s.flat_index(&[1, 0, 0]).unwrap(), 12);
        assert_eq!(s.flat_index(&[1, 2, 3]).unwrap(), 23);
        for flat in 0..s.total_size() {
            assert_eq!(s.flat_index(&s.multi_index(flat)).unwrap(), flat);
        }
        assert!(s.flat_index(&[2, 0, 0]).is_err());
        assert!(s.flat_index(&[0, 0]).is_err());
    }

    #[test]
    fn tensor_rejects_non_finite_and_bad_length() {
        let s = Shape::new(&[2, 2]).unwrap();
        assert!(DenseTensor::new(s.clone(), vec![1.0, 2.0, 3.0]).is_err());
        assert!(DenseTensor::new(s.clone(), vec![1.0, f64::NAN, 0.0, 0.0]).is_err());
        assert!(DenseTensor::new(s, vec![1.0, f64::INFINITY, 0.0, 0.0]).is_err());
    }

    #[test]
    fn basis_tuple_selects_single_entry() {
        let shape = Shape::new(&[3, 4, 2]).unwrap();
        let mut x = DenseTensor::zeros(shape.clone());
        x.set(&[1, 2, 0], 5.0).unwrap();
        let u = UnitTuple::basis(&shape, &[1, 2, 0]).unwrap();
        assert_eq!(multilinear_eval(&x, &u).unwrap(), 5.0);
    }

    #[test]
    fn rank_one_eval_at_its_factors_is_one() {
        let mut rng = stream_rng(1, &[0xabc]);
        let a = random_unit_vector(3, &mut rng);
        let b = random_unit_vector(5, &mut rng);
        let c = random_unit_vector(2, &mut rng);
        let x = outer_product(&[a.clone(), b.clone(), c.clone()]).unwrap();
        let u = UnitTuple::new(vec![a, b, c]).unwrap();
        assert_relative_eq!(multilinear_eval(&x, &u).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn eval_matches_naive_triple_loop() {
        let x = random_tensor(&[3, 4, 2], 7);
        let mut rng = stream_rng(8, &[0xdef]);
        let u = UnitTuple::random(x.shape(), &mut rng);
        let fast = multilinear_eval(&x, &u).unwrap();
        let slow = naive_multilinear(&x, &u);
        assert_relative_eq!(fast, slow, max_relative = 1e-12);
    }

    #[test]
    fn eval_rejects_shape_mismatch() {
        let x = random_tensor(&[3, 4], 1);
        let u = UnitTuple::basis(&Shape::new(&[3, 5]).unwrap(), &[0, 0]).unwrap();
        assert!(matches!(multilinear_eval(&x, &u), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn collapse_of_vector_is_dot_product() {
        let x = DenseTensor::new(Shape::new(&[3]).unwrap(), vec![1.0, 2.0, 3.0]).unwrap();
        let y = mode_collapse(&x, 0, &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(y.order(), 0);
        assert_eq!(y.scalar_value(), Some(32.0));
    }

    #[test]
    fn collapse_of_identity_selects_row() {
        let x = DenseTensor::new(Shape::new(&[2, 2]).unwrap(), vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let y = mode_collapse(&x, 0, &[1.0, 0.0]).unwrap();
        assert_eq!(y.entries(), &[1.0, 0.0]);
    }

    #[test]
    fn collapse_order_does_not_matter() {
        let x = random_tensor(&[3, 4, 2], 11);
        let mut rng = stream_rng(12, &[0x123]);
        let u = UnitTuple::random(x.shape(), &mut rng);
        // modes 3 then 1 then 2 (0-based: 2, 0, 1)
        let a = mode_collapse(&x, 2, u.vector(2)).unwrap();
        let a = mode_collapse(&a, 0, u.vector(0)).unwrap();
        let a = mode_collapse(&a, 0, u.vector(1)).unwrap();
        // modes 1 then 2 then 3
        let b = mode_collapse(&x, 0, u.vector(0)).unwrap();
        let b = mode_collapse(&b, 0, u.vector(1)).unwrap();
        let b = mode_collapse(&b, 0, u.vector(2)).unwrap();
        assert_relative_eq!(
            a.scalar_value().unwrap(),
            b.scalar_value().unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn collapse_rejects_bad_mode_and_length() {
        let x = random_tensor(&[3, 4], 2);
        assert!(mode_collapse(&x, 2, &[1.0]).is_err());
        assert!(mode_collapse(&x, 0, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn frobenius_norm_values() {
        let s = Shape::new(&[2, 2]).unwrap();
        assert_eq!(DenseTensor::zeros(s.clone()).frobenius_norm(), 0.0);
        let single = DenseTensor::new(Shape::new(&[1]).unwrap(), vec![3.0]).unwrap();
        assert_eq!(single.frobenius_norm(), 3.0);
        let ones = DenseTensor::new(s, vec![1.0; 4]).unwrap();
        // sqrt(4) worked out by hand
        assert_eq!(ones.frobenius_norm(), 2.0);
    }

    #[test]
    fn outer_product_values() {
        let x = outer_product(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(x.entries(), &[0.0, 1.0, 0.0, 0.0]);

        let y = outer_product(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(y.entries(), &[3.0, 4.0, 6.0, 8.0]);

        let mut rng = stream_rng(3, &[0x456]);
        let unit = outer_product(&[
            random_unit_vector(3, &mut rng),
            random_unit_vector(4, &mut rng),
            random_unit_vector(2, &mut rng),
        ])
        .unwrap();
        assert_relative_eq!(unit.frobenius_norm(), 1.0, max_relative = 1e-12);

        assert!(outer_product(&[]).is_err());
    }

    #[test]
    fn eval_bounded_by_frobenius_norm() {
        for seed in 0..20 {
            let x = random_tensor(&[4, 3, 5], seed);
            let mut rng = stream_rng(seed, &[0x789]);
            let u = UnitTuple::random(x.shape(), &mut rng);
            let v = multilinear_eval(&x, &u).unwrap();
            assert!(v.abs() <= x.frobenius_norm() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn eval_is_linear_in_the_tensor() {
        let x = random_tensor(&[3, 3, 3], 21);
        let y = random_tensor(&[3, 3, 3], 22);
        let mut rng = stream_rng(23, &[0x9ab]);
        let u = UnitTuple::random(x.shape(), &mut rng);
        let (a, b) = (0.7, -2.5);
        let combo = x.scale(a).unwrap().add(&y.scale(b).unwrap()).unwrap();
        let lhs = multilinear_eval(&combo, &u).unwrap();
        let rhs = a * multilinear_eval(&x, &u).unwrap() + b * multilinear_eval(&y, &u).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }

    #[test]
    fn mode_permutation_leaves_eval_unchanged() {
        let x = random_tensor(&[3, 4, 2], 31);
        let mut rng = stream_rng(32, &[0xcde]);
        let u = UnitTuple::random(x.shape(), &mut rng);
        for perm in [[1, 2, 0], [2, 0, 1], [0, 2, 1]] {
            let px = x.permute_modes(&perm).unwrap();
            let pu = UnitTuple::new(perm.iter().map(|&p| u.vector(p).to_vec()).collect()).unwrap();
            assert_relative_eq!(
                multilinear_eval(&px, &pu).unwrap(),
                multilinear_eval(&x, &u).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn full_collapse_matches_brute_force_on_small_tensors() {
        // arbitrary full collapse orders vs the nested sum, <= 10^4 entries
        for (dims, seed) in [(vec![10, 10, 10], 41u64), (vec![7, 3, 9, 4], 42), (vec![16], 43)] {
            let x = random_tensor(&dims, seed);
            let mut rng = stream_rng(seed, &[0xf00]);
            let u = UnitTuple::random(x.shape(), &mut rng);
            assert_relative_eq!(
                multilinear_eval(&x, &u).unwrap(),
                naive_multilinear(&x, &u),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn unit_tuple_normalizes_and_rejects_zero() {
        let u = UnitTuple::new(vec![vec![3.0, 4.0]]).unwrap();
        assert_relative_eq!(u.vector(0)[0], 0.6, max_relative = 1e-15);
        let norm: f64 = u.vector(0).iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() <= 1e-12);
        assert!(UnitTuple::new(vec![vec![0.0, 0.0]]).is_err());
        assert!(UnitTuple::new(vec![vec![]]).is_err());
    }

    #[test]
    fn permute_modes_rejects_non_permutations() {
        let x = random_tensor(&[2, 3], 5);
        assert!(x.permute_modes(&[0, 0]).is_err());
        assert!(x.permute_modes(&[0]).is_err());
        assert!(x.permute_modes(&[0, 2]).is_err());
    }
}
