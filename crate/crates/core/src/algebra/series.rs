use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::key::{add_i64, add_u32, add_xexp, trim_i64, trim_u32, ExponentKey, XMonomial};
use super::rational::{format_rational, Rational};
use super::ring::{AmbientRing, Monomial};
use crate::error::{Error, Result};

/// Ring and truncation data shared by every series that may be combined.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeriesContext {
    ring: AmbientRing,
    /// Degree of each curve-class basis vector, i.e. the anticanonical coefficients.
    degree_weights: Vec<u32>,
    /// Largest retained total degree `sum_k w_k beta_k`.
    beta_cap: u32,
    /// Lowest retained power of `z`; `None` keeps everything.
    z_floor: Option<i32>,
}

impl SeriesContext {
    pub fn new(ring: AmbientRing, degree_weights: Vec<u32>, beta_cap: u32, z_floor: Option<i32>) -> Arc<Self> {
        assert_eq!(ring.rank(), degree_weights.len());
        Arc::new(SeriesContext {
            ring,
            degree_weights,
            beta_cap,
            z_floor,
        })
    }

    pub fn ring(&self) -> &AmbientRing {
        &self.ring
    }

    pub fn degree_weights(&self) -> &[u32] {
        &self.degree_weights
    }

    pub fn beta_cap(&self) -> u32 {
        self.beta_cap
    }

    pub fn z_floor(&self) -> Option<i32> {
        self.z_floor
    }

    pub fn beta_degree(&self, beta: &[u32]) -> u32 {
        beta.iter().zip(&self.degree_weights).map(|(b, w)| b * w).sum()
    }

    pub fn unit_key(&self) -> ExponentKey {
        ExponentKey::unit(self.ring.rank(), self.degree_weights.len())
    }

    /// The same context with no `z` truncation, for intermediate products whose low-`z`
    /// terms are later raised by positive-`z` factors.
    pub fn without_z_floor(self: &Arc<Self>) -> Arc<Self> {
        if self.z_floor.is_none() {
            return self.clone();
        }
        Arc::new(SeriesContext {
            z_floor: None,
            ..(**self).clone()
        })
    }

    /// Whether a key survives truncation and nilpotency.
    pub fn admits(&self, key: &ExponentKey) -> bool {
        key.beta.len() == self.degree_weights.len()
            && self.beta_degree(&key.beta) <= self.beta_cap
            && self.z_floor.is_none_or(|f| key.zpow >= f)
            && self.ring.within_caps(&key.coh)
    }
}

/// Sparse exact series over a nilpotent cohomology ring, graded by curve class, `z`,
/// extended variables, sectors and equivariant parameters.
///
/// Zero coefficients are never stored, so structural equality is mathematical
/// equality within the truncation.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedSeries {
    ctx: Arc<SeriesContext>,
    terms: BTreeMap<ExponentKey, Rational>,
}

impl GradedSeries {
    pub fn zero(ctx: &Arc<SeriesContext>) -> Self {
        GradedSeries {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Arc<SeriesContext>, c: Rational) -> Self {
        Self::monomial(ctx, ctx.unit_key(), c)
    }

    pub fn one(ctx: &Arc<SeriesContext>) -> Self {
        Self::constant(ctx, Rational::one())
    }

    pub fn monomial(ctx: &Arc<SeriesContext>, key: ExponentKey, c: Rational) -> Self {
        Self::from_terms(ctx, [(key, c)])
    }

    /// `c z^k`.
    pub fn z_power(ctx: &Arc<SeriesContext>, k: i32, c: Rational) -> Self {
        Self::monomial(ctx, ctx.unit_key().with_zpow(k), c)
    }

    /// The hyperplane generator of factor `k`.
    pub fn generator(ctx: &Arc<SeriesContext>, k: usize) -> Self {
        Self::monomial(ctx, ctx.unit_key().with_coh(ctx.ring.generator(k)), Rational::one())
    }

    /// The equivariant parameter `lambda_i`.
    pub fn lambda(ctx: &Arc<SeriesContext>, i: usize) -> Self {
        let mut l = vec![0; i + 1];
        l[i] = 1;
        Self::monomial(ctx, ctx.unit_key().with_lambda(l), Rational::one())
    }

    /// The divisor class `sum_k c_k P_k`.
    pub fn linear_class(ctx: &Arc<SeriesContext>, coeffs: &[Rational]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (ctx.unit_key().with_coh(ctx.ring.generator(k)), c.clone()));
        Self::from_terms(ctx, terms)
    }

    /// Collects terms, summing repeated keys, dropping zeros and anything outside the
    /// truncation or killed by nilpotency.
    pub fn from_terms<I>(ctx: &Arc<SeriesContext>, terms: I) -> Self
    where
        I: IntoIterator<Item = (ExponentKey, Rational)>,
    {
        let mut map: BTreeMap<ExponentKey, Rational> = BTreeMap::new();
        for (mut k, c) in terms {
            k.sector = trim_i64(k.sector);
            k.lambda = trim_u32(k.lambda);
            k.xexp.retain(|_, e| *e > 0);
            if c.is_zero() || !ctx.admits(&k) {
                continue;
            }
            *map.entry(k).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        GradedSeries {
            ctx: ctx.clone(),
            terms: map,
        }
    }

    /// Moves the terms into another context over the same ring, applying its truncation.
    pub fn rehome(&self, ctx: &Arc<SeriesContext>) -> GradedSeries {
        Self::from_terms(ctx, self.terms.iter().map(|(k, c)| (k.clone(), c.clone())))
    }

    pub fn context(&self) -> &Arc<SeriesContext> {
        &self.ctx
    }

    pub fn ring(&self) -> &AmbientRing {
        &self.ctx.ring
    }

    pub fn terms(&self) -> &BTreeMap<ExponentKey, Rational> {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ExponentKey, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<ExponentKey, Rational> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a single key (zero when absent).
    pub fn get(&self, key: &ExponentKey) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    fn check_context(&self, other: &GradedSeries) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch(format!("{:?} vs {:?}", self.ctx, other.ctx)))
        }
    }

    pub fn checked_add(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.check_context(other)?;
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            match terms.get_mut(k) {
                Some(v) => {
                    *v += c;
                    if v.is_zero() {
                        terms.remove(k);
                    }
                }
                None => {
                    terms.insert(k.clone(), c.clone());
                }
            }
        }
        Ok(GradedSeries {
            ctx: self.ctx.clone(),
            terms,
        })
    }

    pub fn checked_sub(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.checked_add(&other.neg())
    }

    /// Product of two keys, or `None` when the result is truncated away.
    fn combine(&self, a: &ExponentKey, b: &ExponentKey) -> Option<ExponentKey> {
        let coh = self.ctx.ring.multiply(&a.coh, &b.coh)?;
        let beta: Vec<u32> = a.beta.iter().zip(&b.beta).map(|(x, y)| x + y).collect();
        if self.ctx.beta_degree(&beta) > self.ctx.beta_cap {
            return None;
        }
        let zpow = a.zpow + b.zpow;
        if self.ctx.z_floor.is_some_and(|f| zpow < f) {
            return None;
        }
        Some(ExponentKey {
            beta,
            zpow,
            xexp: add_xexp(&a.xexp, &b.xexp),
            sector: add_i64(&a.sector, &b.sector),
            coh,
            lambda: add_u32(&a.lambda, &b.lambda),
        })
    }

    /// Convolution product. Sector labels combine additively, which is only ever used to
    /// place an untwisted product into a sector.
    pub fn checked_mul(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.check_context(other)?;
        let mut terms: BTreeMap<ExponentKey, Rational> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                if let Some(k) = self.combine(ka, kb) {
                    *terms.entry(k).or_insert_with(Rational::zero) += ca * cb;
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(GradedSeries {
            ctx: self.ctx.clone(),
            terms,
        })
    }

    pub fn pow(&self, n: u32) -> Result<GradedSeries> {
        let mut acc = GradedSeries::one(&self.ctx);
        for _ in 0..n {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Rational) -> GradedSeries {
        if c.is_zero() {
            return GradedSeries::zero(&self.ctx);
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        GradedSeries {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    pub fn neg(&self) -> GradedSeries {
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect();
        GradedSeries {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    /// Sum of many series sharing `ctx`.
    pub fn sum<I>(ctx: &Arc<SeriesContext>, parts: I) -> Result<GradedSeries>
    where
        I: IntoIterator<Item = GradedSeries>,
    {
        let mut acc = GradedSeries::zero(ctx);
        for s in parts {
            acc.check_context(&s)?;
            for (k, c) in s.terms {
                match acc.terms.entry(k) {
                    Entry::Vacant(e) => {
                        e.insert(c);
                    }
                    Entry::Occupied(mut e) => {
                        *e.get_mut() += c;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Relabels every key; colliding images are summed.
    pub fn map_keys<F>(&self, f: F) -> GradedSeries
    where
        F: Fn(&ExponentKey) -> ExponentKey,
    {
        Self::from_terms(&self.ctx, self.terms.iter().map(|(k, c)| (f(k), c.clone())))
    }

    pub fn filter<F>(&self, pred: F) -> GradedSeries
    where
        F: Fn(&ExponentKey) -> bool,
    {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| pred(k))
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        GradedSeries {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    /// Multiplies by the monomial `Q^beta x^xexp` and tags the result with `sector`.
    pub fn shift(&self, beta: &[u32], xexp: &XMonomial, sector: &[i64]) -> GradedSeries {
        self.map_keys(|k| {
            let mut k = k.clone();
            k.beta = k.beta.iter().zip(beta).map(|(a, b)| a + b).collect();
            k.xexp = add_xexp(&k.xexp, xexp);
            k.sector = add_i64(&k.sector, sector);
            k
        })
    }

    /// Keys with curve class exactly `beta`.
    pub fn beta_slice(&self, beta: &[u32]) -> GradedSeries {
        self.filter(|k| k.beta == beta)
    }

    /// Splits by curve class, in lexicographic order of `beta`.
    pub fn beta_slices(&self) -> BTreeMap<Vec<u32>, GradedSeries> {
        let mut out: BTreeMap<Vec<u32>, BTreeMap<ExponentKey, Rational>> = BTreeMap::new();
        for (k, c) in &self.terms {
            out.entry(k.beta.clone()).or_default().insert(k.clone(), c.clone());
        }
        out.into_iter()
            .map(|(b, terms)| {
                (
                    b,
                    GradedSeries {
                        ctx: self.ctx.clone(),
                        terms,
                    },
                )
            })
            .collect()
    }

    /// Whether every key is a plain cohomology class: no `Q`, `z`, `x`, sector or `lambda`.
    pub fn is_ring_class(&self) -> bool {
        self.terms.keys().all(|k| {
            k.beta.iter().all(|b| *b == 0) && k.zpow == 0 && k.xexp.is_empty() && k.is_untwisted() && k.lambda_free()
        })
    }

    /// `(c z + cls)^{-1} = (c z)^{-1} sum_k (-cls / (c z))^k`, a finite sum because `cls`
    /// is nilpotent. `cls` must be a class of cohomological degree 2 (linear in the
    /// generators, rational multipliers allowed).
    pub fn invert_z_linear(c: &Rational, cls: &GradedSeries) -> Result<GradedSeries> {
        if c.is_zero() {
            return Err(Error::NotInvertible(format!(
                "0*z + {cls}; inverting would require localizing at lambda"
            )));
        }
        if !cls.is_ring_class() || cls.terms.keys().any(|k| AmbientRing::degree(&k.coh) != 1) {
            return Err(Error::InvalidLinearFactor(format!(
                "expected a degree-2 cohomology class, got {cls}"
            )));
        }
        let ctx = cls.context();
        let inv_cz = GradedSeries::z_power(ctx, -1, c.recip());
        let step = cls.checked_mul(&inv_cz)?.neg();
        let mut term = inv_cz;
        let mut acc = GradedSeries::zero(ctx);
        while !term.is_zero() {
            acc = acc.checked_add(&term)?;
            term = term.checked_mul(&step)?;
        }
        Ok(acc)
    }

    /// Splits `self` as a polynomial in `lambda_i`: entry `k` is the coefficient of `lambda_i^k`.
    fn lambda_coefficients(&self, i: usize) -> Vec<GradedSeries> {
        let top = self.terms.keys().map(|k| k.lambda_at(i)).max().unwrap_or(0) as usize;
        let mut parts = vec![BTreeMap::new(); top + 1];
        for (k, c) in &self.terms {
            let e = k.lambda_at(i) as usize;
            let mut k = k.clone();
            let mut l = k.lambda.clone();
            if i < l.len() {
                l[i] = 0;
            }
            k.lambda = trim_u32(l);
            parts[e].insert(k, c.clone());
        }
        parts
            .into_iter()
            .map(|terms| GradedSeries {
                ctx: self.ctx.clone(),
                terms,
            })
            .collect()
    }

    /// Exact quotient by `factor.class + lambda_i`, by long division in `lambda_i`.
    /// Fails with [`Error::NotDivisible`] when a remainder is left.
    pub fn exact_divide_linear(&self, factor: &LinearFactor) -> Result<GradedSeries> {
        self.check_context(&factor.class)?;
        let i = factor.lambda_index;
        if factor.class.terms.keys().any(|k| k.lambda_at(i) != 0) {
            return Err(Error::InvalidLinearFactor(format!(
                "class part of {factor} depends on lambda_{}",
                i + 1
            )));
        }
        let num = self.lambda_coefficients(i);
        let lam = GradedSeries::lambda(&self.ctx, i);
        let n = num.len() - 1;
        // quotient coefficients q_{n-1}, ..., q_0 from the top down
        let mut q = vec![GradedSeries::zero(&self.ctx); n.max(1)];
        let mut carry = GradedSeries::zero(&self.ctx);
        for k in (1..=n).rev() {
            let qk = num[k].checked_sub(&carry)?;
            carry = factor.class.checked_mul(&qk)?;
            q[k - 1] = qk;
        }
        let remainder = num[0].checked_sub(&carry)?;
        if let Some((key, _)) = remainder.terms.iter().next() {
            return Err(Error::NotDivisible {
                factor: factor.to_string(),
                key: key.describe(self.ring()),
            });
        }
        let mut quotient = GradedSeries::zero(&self.ctx);
        let mut lam_pow = GradedSeries::one(&self.ctx);
        for qk in q.iter().take(n) {
            quotient = quotient.checked_add(&qk.checked_mul(&lam_pow)?)?;
            lam_pow = lam_pow.checked_mul(&lam)?;
        }
        Ok(quotient)
    }

    /// Sub-series of keys matching every fixed component of `selector`, with those
    /// components reset to their neutral value.
    pub fn coefficient(&self, selector: &Selector) -> GradedSeries {
        let sel_sector = selector.sector.clone().map(trim_i64);
        let sel_lambda = selector.lambda.clone().map(trim_u32);
        let unit = self.ctx.unit_key();
        let matched = self.terms.iter().filter_map(|(k, c)| {
            let hit = selector.beta.as_ref().is_none_or(|b| *b == k.beta)
                && selector.zpow.is_none_or(|z| z == k.zpow)
                && selector.xexp.as_ref().is_none_or(|x| *x == k.xexp)
                && sel_sector.as_ref().is_none_or(|s| *s == k.sector)
                && selector.coh.as_ref().is_none_or(|m| *m == k.coh)
                && sel_lambda.as_ref().is_none_or(|l| *l == k.lambda);
            if !hit {
                return None;
            }
            let mut k = k.clone();
            if selector.beta.is_some() {
                k.beta = unit.beta.clone();
            }
            if selector.zpow.is_some() {
                k.zpow = 0;
            }
            if selector.xexp.is_some() {
                k.xexp.clear();
            }
            if selector.sector.is_some() {
                k.sector.clear();
            }
            if selector.coh.is_some() {
                k.coh = unit.coh.clone();
            }
            if selector.lambda.is_some() {
                k.lambda.clear();
            }
            Some((k, c.clone()))
        });
        Self::from_terms(&self.ctx, matched)
    }

    /// Scalar coefficient of a fully specified key.
    pub fn scalar(&self, selector: &Selector) -> Rational {
        self.coefficient(selector).get(&self.ctx.unit_key())
    }

    /// Restriction to `lambda = 0`.
    pub fn set_lambda_zero(&self) -> GradedSeries {
        self.filter(|k| k.lambda_free())
    }

    /// Coefficient of the point class, with the cohomology component removed.
    pub fn integrate(&self) -> GradedSeries {
        self.coefficient(&Selector::new().coh(self.ring().top_monomial()))
    }

    pub fn max_zpow(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.zpow).max()
    }

    /// The first key (in storage order) where two series disagree.
    pub fn first_difference(&self, other: &GradedSeries) -> Option<ExponentKey> {
        let mut keys: Vec<&ExponentKey> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().find(|k| self.get(k) != other.get(k)).cloned()
    }

    /// Terms in print order: `beta` lexicographic, `z` power descending, then the
    /// remaining key components.
    pub fn sorted_terms(&self) -> Vec<(&ExponentKey, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| print_order(a, b));
        v
    }
}

pub fn print_order(a: &ExponentKey, b: &ExponentKey) -> Ordering {
    a.beta
        .cmp(&b.beta)
        .then(b.zpow.cmp(&a.zpow))
        .then_with(|| a.xexp.cmp(&b.xexp))
        .then_with(|| a.sector.cmp(&b.sector))
        .then_with(|| a.coh.cmp(&b.coh))
        .then_with(|| a.lambda.cmp(&b.lambda))
}

impl fmt::Debug for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedSeries({self})")
    }
}

impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let ring = self.ring();
        for (n, (k, c)) in self.sorted_terms().into_iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if n > 0 || c.is_negative() {
                write!(f, "{}{} ", if n > 0 { " " } else { "" }, sign)?;
            }
            write!(f, "({})", format_rational(&c.abs()))?;
            if k.beta.iter().any(|b| *b > 0) {
                write!(f, "*Q^{:?}", k.beta)?;
            }
            if k.zpow != 0 {
                write!(f, "*z^{}", k.zpow)?;
            }
            if !k.xexp.is_empty() {
                write!(f, "*{}", super::key::format_xexp(&k.xexp))?;
            }
            for (i, l) in k.lambda.iter().enumerate().filter(|(_, l)| **l > 0) {
                write!(f, "*l{}^{}", i + 1, l)?;
            }
            let coh = ring.format_monomial(&k.coh);
            if coh != "1" {
                write!(f, "*{coh}")?;
            }
            if !k.is_untwisted() {
                write!(f, "*[1]{:?}", k.sector)?;
            }
        }
        Ok(())
    }
}

/// The factor `class + lambda_i` used by [`GradedSeries::exact_divide_linear`].
#[derive(Clone, Debug)]
pub struct LinearFactor {
    pub class: GradedSeries,
    pub lambda_index: usize,
}

impl LinearFactor {
    pub fn new(class: GradedSeries, lambda_index: usize) -> Self {
        LinearFactor { class, lambda_index }
    }
}

impl fmt::Display for LinearFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + l{})", self.class, self.lambda_index + 1)
    }
}

/// A partial key: each `Some` component must match exactly.
#[derive(Clone, Debug, Default)]
pub struct Selector {
    pub beta: Option<Vec<u32>>,
    pub zpow: Option<i32>,
    pub xexp: Option<XMonomial>,
    pub sector: Option<Vec<i64>>,
    pub coh: Option<Monomial>,
    pub lambda: Option<Vec<u32>>,
}

impl Selector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn beta(mut self, b: Vec<u32>) -> Self {
        self.beta = Some(b);
        self
    }

    pub fn zpow(mut self, z: i32) -> Self {
        self.zpow = Some(z);
        self
    }

    pub fn xexp(mut self, x: XMonomial) -> Self {
        self.xexp = Some(x);
        self
    }

    pub fn sector(mut self, s: Vec<i64>) -> Self {
        self.sector = Some(s);
        self
    }

    pub fn coh(mut self, m: Monomial) -> Self {
        self.coh = Some(m);
        self
    }

    pub fn lambda(mut self, l: Vec<u32>) -> Self {
        self.lambda = Some(l);
        self
    }

    /// Fixes every component, so the coefficient is a scalar.
    pub fn exact(key: &ExponentKey) -> Self {
        Selector {
            beta: Some(key.beta.clone()),
            zpow: Some(key.zpow),
            xexp: Some(key.xexp.clone()),
            sector: Some(key.sector.clone()),
            coh: Some(key.coh.clone()),
            lambda: Some(key.lambda.clone()),
        }
    }
}
