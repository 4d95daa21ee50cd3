//! Finite-dimensional Grassmann algebra over ℂ with Berezin integration.
//!
//! Monomials are stored as bitmasks in ascending generator order, so every
//! product reduces to canonical form with the sign of the sorting
//! permutation. Integration follows `∫dx_1 dx_2 f = ∫dx_1 (∫dx_2 f)`; a single
//! integration over `x` moves `x` to the leftmost position and strips it.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU32, Ordering};

use num_complex::Complex64;

use crate::error::{argument, Error, Result};
use crate::linalg::{self, ComplexMatrix};

/// Largest algebra accepted; `2^24` potential monomials.
pub const MAX_GENERATORS: usize = 24;

/// Coefficient tolerance used when comparing elements.
pub const COEFF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorId(pub u32);

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// Product of distinct generators in ascending order; bit `i` marks generator `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(u32);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn single(g: GeneratorId) -> Self {
        Monomial(1 << g.0)
    }

    /// Canonical form of the ordered product `g_1 g_2 … g_k` with its sign, or
    /// `None` when a generator repeats.
    pub fn from_product(gens: &[GeneratorId]) -> Option<(f64, Monomial)> {
        let mut sign = 1.0;
        let mut acc = Monomial::ONE;
        for &g in gens {
            let (s, m) = acc.times(Monomial::single(g))?;
            sign *= s;
            acc = m;
        }
        Some((sign, acc))
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, g: GeneratorId) -> bool {
        self.0 & (1 << g.0) != 0
    }

    pub fn overlaps(self, mask: u32) -> bool {
        self.0 & mask != 0
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn generators(self) -> impl Iterator<Item = GeneratorId> {
        let bits = self.0;
        (0..32).filter(move |i| bits & (1 << i) != 0).map(GeneratorId)
    }

    /// `self · other` in canonical order. The sign counts pairs `(x, y)` with
    /// `x` in `self`, `y` in `other` and `x > y`.
    pub fn times(self, other: Monomial) -> Option<(f64, Monomial)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut inversions = 0;
        let mut rest = other.0;
        while rest != 0 {
            let y = rest.trailing_zeros();
            rest &= rest - 1;
            inversions += (self.0 >> y).count_ones();
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        Some((sign, Monomial(self.0 | other.0)))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        for g in self.generators() {
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

static NEXT_ALGEBRA: AtomicU32 = AtomicU32::new(1);

/// Algebra context: a fixed number of generators under one identity.
/// Elements from different contexts never mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Algebra {
    id: u32,
    generators: usize,
}

impl Algebra {
    pub fn new(generators: usize) -> Result<Self> {
        if generators > MAX_GENERATORS {
            return Err(Error::Capacity { requested: generators, limit: MAX_GENERATORS });
        }
        Ok(Algebra { id: NEXT_ALGEBRA.fetch_add(1, Ordering::Relaxed), generators })
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn zero(&self) -> GrassmannElement {
        GrassmannElement { algebra: *self, terms: BTreeMap::new() }
    }

    pub fn scalar(&self, c: Complex64) -> GrassmannElement {
        self.zero().with_term(Monomial::ONE, c)
    }

    pub fn one(&self) -> GrassmannElement {
        self.scalar(Complex64::new(1.0, 0.0))
    }

    pub fn generator(&self, g: GeneratorId) -> GrassmannElement {
        self.check_generator(g);
        self.zero().with_term(Monomial::single(g), Complex64::new(1.0, 0.0))
    }

    /// The ordered product `g_1 g_2 … g_k` (zero if a generator repeats).
    pub fn product(&self, gens: &[GeneratorId]) -> GrassmannElement {
        gens.iter().for_each(|&g| self.check_generator(g));
        match Monomial::from_product(gens) {
            Some((s, m)) => self.zero().with_term(m, Complex64::new(s, 0.0)),
            None => self.zero(),
        }
    }

    fn check_generator(&self, g: GeneratorId) {
        assert!(
            (g.0 as usize) < self.generators,
            "generator {g} outside algebra of {} generators",
            self.generators
        );
    }
}

/// Hands out generator ids; `build` fixes the algebra size.
#[derive(Debug, Default)]
pub struct AlgebraBuilder {
    next: u32,
}

impl AlgebraBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn generator(&mut self) -> GeneratorId {
        let g = GeneratorId(self.next);
        self.next += 1;
        g
    }

    pub fn vector(&mut self, n: usize, role: Role) -> GeneratorVector {
        GeneratorVector { ids: (0..n).map(|_| self.generator()).collect(), role }
    }

    pub fn field_pair(&mut self, n: usize) -> FieldPair {
        let psi = self.vector(n, Role::Psi);
        let psibar = self.vector(n, Role::PsiBar);
        FieldPair { psi, psibar }
    }

    pub fn allocated(&self) -> usize {
        self.next as usize
    }

    pub fn build(self) -> Result<Algebra> {
        Algebra::new(self.allocated())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Psi,
    PsiBar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorVector {
    ids: Vec<GeneratorId>,
    role: Role,
}

impl GeneratorVector {
    pub fn new(ids: Vec<GeneratorId>, role: Role) -> Result<Self> {
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != ids.len() {
            return Err(argument("generator vector has repeated components"));
        }
        if let Some(g) = sorted.last().filter(|g| g.0 as usize >= MAX_GENERATORS) {
            return Err(Error::Capacity { requested: g.0 as usize + 1, limit: MAX_GENERATORS });
        }
        Ok(GeneratorVector { ids, role })
    }

    pub fn ids(&self) -> &[GeneratorId] {
        &self.ids
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn mask(&self) -> u32 {
        self.ids.iter().fold(0, |m, g| m | (1 << g.0))
    }

    pub fn elements(&self, alg: &Algebra) -> Vec<GrassmannElement> {
        self.ids.iter().map(|&g| alg.generator(g)).collect()
    }
}

/// A vector `ψ` together with its partner `ψ̄`. The integration measure
/// `dψ dψ̄` expands to `da_1 db_1 … da_n db_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldPair {
    psi: GeneratorVector,
    psibar: GeneratorVector,
}

impl FieldPair {
    pub fn new(psi: GeneratorVector, psibar: GeneratorVector) -> Result<Self> {
        if psi.role != Role::Psi || psibar.role != Role::PsiBar {
            return Err(argument("field pair needs one ψ and one ψ̄ vector"));
        }
        if psi.len() != psibar.len() {
            return Err(Error::Dimension {
                expected: format!("{} components", psi.len()),
                got: format!("{} components", psibar.len()),
            });
        }
        if psi.mask() & psibar.mask() != 0 {
            return Err(argument("ψ and ψ̄ share a generator"));
        }
        Ok(FieldPair { psi, psibar })
    }

    pub fn psi(&self) -> &GeneratorVector {
        &self.psi
    }

    pub fn psibar(&self) -> &GeneratorVector {
        &self.psibar
    }

    pub fn dim(&self) -> usize {
        self.psi.len()
    }

    pub fn measure(&self) -> Vec<GeneratorId> {
        self.psi.ids.iter().zip(&self.psibar.ids).flat_map(|(&a, &b)| [a, b]).collect()
    }

    pub fn mask(&self) -> u32 {
        self.psi.mask() | self.psibar.mask()
    }

    /// `ψ̄ψ = Σ b_i a_i`.
    pub fn pairing(&self, alg: &Algebra) -> GrassmannElement {
        let id = ComplexMatrix::identity(self.dim(), self.dim());
        bilinear(alg, &self.psibar.elements(alg), &id, &self.psi.elements(alg))
    }
}

/// How a single Berezin integration extracts its generator. Only
/// `Leftmost` is correct; `Rightmost` exists so verification suites can
/// confirm they detect a broken sign convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntegrationConvention {
    #[default]
    Leftmost,
    Rightmost,
}

#[derive(Clone, PartialEq)]
pub struct GrassmannElement {
    algebra: Algebra,
    terms: BTreeMap<Monomial, Complex64>,
}

impl GrassmannElement {
    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    fn with_term(mut self, m: Monomial, c: Complex64) -> Self {
        self.add_term(m, c);
        self
    }

    fn add_term(&mut self, m: Monomial, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&m);
        }
    }

    fn same_context(&self, other: &Self) -> Result<()> {
        if self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::Context(self.algebra.id, other.algebra.id))
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, Complex64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
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

    pub fn coefficient(&self, m: Monomial) -> Complex64 {
        self.terms.get(&m).copied().unwrap_or_default()
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coefficient(Monomial::ONE)
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.degree() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|m| m.degree() % 2 == 1)
    }

    /// Union of all generators appearing in any term.
    pub fn support(&self) -> u32 {
        self.terms.keys().fold(0, |acc, m| acc | m.bits())
    }

    pub fn depends_on(&self, g: GeneratorId) -> bool {
        self.support() & (1 << g.0) != 0
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.algebra.zero();
        for (m, v) in self.terms() {
            out.add_term(m, v * c);
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Associative product with canonical reordering signs.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let mut out = self.algebra.zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                if let Some((s, m)) = m1.times(m2) {
                    out.add_term(m, c1 * c2 * s);
                }
            }
        }
        Ok(out)
    }

    /// Largest coefficient difference over the union of monomials.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_context(other)?;
        let mut worst: f64 = 0.0;
        for (m, c) in self.terms() {
            worst = worst.max((c - other.coefficient(m)).norm());
        }
        for (m, c) in other.terms() {
            if !self.terms.contains_key(&m) {
                worst = worst.max(c.norm());
            }
        }
        Ok(worst)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other).map(|d| d <= tol).unwrap_or(false)
    }

    /// `∫dx f`.
    pub fn integrate(&self, x: GeneratorId) -> Self {
        self.integrate_with(x, IntegrationConvention::Leftmost)
    }

    pub fn integrate_with(&self, x: GeneratorId, convention: IntegrationConvention) -> Self {
        let bit = 1u32 << x.0;
        let mut out = self.algebra.zero();
        for (m, c) in self.terms() {
            if m.bits() & bit == 0 {
                continue;
            }
            let passed = match convention {
                IntegrationConvention::Leftmost => (m.bits() & (bit - 1)).count_ones(),
                IntegrationConvention::Rightmost => (m.bits() >> (x.0 + 1)).count_ones(),
            };
            let sign = if passed % 2 == 0 { 1.0 } else { -1.0 };
            out.add_term(Monomial(m.bits() & !bit), c * sign);
        }
        out
    }

    /// `∫dx_1 … dx_k f`, innermost integration over the last listed generator.
    pub fn berezin(&self, order: &[GeneratorId]) -> Result<Self> {
        self.berezin_with(order, IntegrationConvention::Leftmost)
    }

    pub fn berezin_with(&self, order: &[GeneratorId], convention: IntegrationConvention) -> Result<Self> {
        let mut seen = 0u32;
        for g in order {
            if g.0 as usize >= self.algebra.generators {
                return Err(argument(format!("generator {g} outside the algebra")));
            }
            if seen & (1 << g.0) != 0 {
                return Err(argument(format!("generator {g} repeated in integration order")));
            }
            seen |= 1 << g.0;
        }
        Ok(order
            .iter()
            .rev()
            .fold(self.clone(), |acc, &g| acc.integrate_with(g, convention)))
    }

    /// Replaces every occurrence of `x` by `replacement`. The replacement
    /// must be odd; `x` itself may only appear in it as the bare monomial `x`,
    /// which allows translations `x ↦ x + c`.
    pub fn substitute(&self, x: GeneratorId, replacement: &Self) -> Result<Self> {
        self.same_context(replacement)?;
        if !replacement.is_odd() {
            return Err(argument("replacement must have odd degree"));
        }
        let bit = 1u32 << x.0;
        if replacement.terms.keys().any(|m| m.bits() & bit != 0 && m.bits() != bit) {
            return Err(argument(format!("replacement contains {x} beyond a bare translation")));
        }
        let mut out = self.algebra.zero();
        for (m, c) in self.terms() {
            if m.bits() & bit == 0 {
                out.add_term(m, c);
                continue;
            }
            // m = L·x·R exactly, with L below x and R above x
            let below = Monomial(m.bits() & (bit - 1));
            let above = Monomial(m.bits() & !(bit | (bit - 1)));
            for (r, rc) in replacement.terms() {
                let Some((s1, lr)) = below.times(r) else { continue };
                let Some((s2, full)) = lr.times(above) else { continue };
                out.add_term(full, c * rc * (s1 * s2));
            }
        }
        Ok(out)
    }

    /// `Σ f^k / k!` for even `f` without scalar part; the series terminates.
    pub fn exp_even(&self) -> Result<Self> {
        if self.scalar_part() != Complex64::new(0.0, 0.0) {
            return Err(argument("exp_even needs zero scalar part"));
        }
        if !self.is_even() {
            return Err(argument("exp_even needs an even element"));
        }
        let mut result = self.algebra.one();
        let mut power = self.algebra.one();
        let mut k = 1.0;
        loop {
            power = power.try_mul(self)?.scale(Complex64::new(1.0 / k, 0.0));
            if power.is_zero() {
                break;
            }
            result = result.try_add(&power)?;
            k += 1.0;
        }
        Ok(result)
    }
}

impl fmt::Debug for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Sorted by degree, then generator list: `+(1,0)·1 -(0.5,0)·a3a7`.
impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by_key(|(m, _)| (m.degree(), m.generators().map(|g| g.0).collect::<Vec<_>>()));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let (sign, c) = if c.re < 0.0 || (c.re == 0.0 && c.im < 0.0) { ('-', -c) } else { ('+', c) };
            // + 0.0 folds negative zero
            write!(f, "{sign}({},{})·{m}", c.re + 0.0, c.im + 0.0)?;
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl $tr<&GrassmannElement> for &GrassmannElement {
            type Output = GrassmannElement;
            fn $method(self, rhs: &GrassmannElement) -> GrassmannElement {
                self.$try(rhs).expect("Grassmann elements from different algebras")
            }
        }
        impl $tr<GrassmannElement> for GrassmannElement {
            type Output = GrassmannElement;
            fn $method(self, rhs: GrassmannElement) -> GrassmannElement {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Neg for GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        -&self
    }
}

/// `Σ_ij left_i m_ij right_j`.
pub fn bilinear(
    alg: &Algebra,
    left: &[GrassmannElement],
    m: &ComplexMatrix,
    right: &[GrassmannElement],
) -> GrassmannElement {
    assert_eq!(m.shape(), (left.len(), right.len()), "bilinear form shape mismatch");
    let mut acc = alg.zero();
    for (i, l) in left.iter().enumerate() {
        for (j, r) in right.iter().enumerate() {
            let c = m[(i, j)];
            if c != Complex64::new(0.0, 0.0) {
                acc = &acc + &(l * r).scale(c);
            }
        }
    }
    acc
}

fn check_sources(fields: &FieldPair, name: &str, src: &[GrassmannElement]) -> Result<()> {
    if src.len() != fields.dim() {
        return Err(Error::Dimension {
            expected: format!("{} components in {name}", fields.dim()),
            got: src.len().to_string(),
        });
    }
    for s in src {
        if !s.is_odd() {
            return Err(argument(format!("source {name} must be odd")));
        }
        if s.support() & fields.mask() != 0 {
            return Err(argument(format!("source {name} involves the integrated fields")));
        }
    }
    Ok(())
}

/// `∫dψ dψ̄ exp(ψ̄Mψ + c̄ψ + ψ̄d)`, evaluated by expanding the exponential and
/// integrating term by term.
pub fn gaussian_berezin(
    alg: &Algebra,
    fields: &FieldPair,
    m: &ComplexMatrix,
    sources: Option<(&[GrassmannElement], &[GrassmannElement])>,
) -> Result<GrassmannElement> {
    gaussian_berezin_with(alg, fields, m, sources, IntegrationConvention::Leftmost)
}

pub fn gaussian_berezin_with(
    alg: &Algebra,
    fields: &FieldPair,
    m: &ComplexMatrix,
    sources: Option<(&[GrassmannElement], &[GrassmannElement])>,
    convention: IntegrationConvention,
) -> Result<GrassmannElement> {
    let n = fields.dim();
    if m.shape() != (n, n) {
        return Err(Error::Dimension { expected: format!("{n}x{n}"), got: format!("{}x{}", m.nrows(), m.ncols()) });
    }
    let psi = fields.psi().elements(alg);
    let psibar = fields.psibar().elements(alg);
    let mut exponent = bilinear(alg, &psibar, m, &psi);
    if let Some((cbar, d)) = sources {
        check_sources(fields, "c̄", cbar)?;
        check_sources(fields, "d", d)?;
        ensure_invertible(m)?;
        for i in 0..n {
            exponent = &exponent + &(&cbar[i] * &psi[i]);
            exponent = &exponent + &(&psibar[i] * &d[i]);
        }
    }
    exponent.exp_even()?.berezin_with(&fields.measure(), convention)
}

fn ensure_invertible(m: &ComplexMatrix) -> Result<()> {
    let d = linalg::det(m)?;
    let scale: f64 = m.row_iter().map(|r| r.norm().max(f64::MIN_POSITIVE)).product();
    if d.norm() <= 1e-12 * scale {
        return Err(Error::Singular(d.norm()));
    }
    Ok(())
}

/// Completed-square form `det M · exp(−c̄ M⁻¹ d)` of the sourced gaussian.
pub fn gaussian_closed_form(
    alg: &Algebra,
    m: &ComplexMatrix,
    cbar: &[GrassmannElement],
    d: &[GrassmannElement],
) -> Result<GrassmannElement> {
    ensure_invertible(m)?;
    let inv = linalg::inverse(m)?;
    let det = linalg::det(m)?;
    let exponent = -bilinear(alg, cbar, &inv, d);
    Ok(exponent.exp_even()?.scale(det))
}

/// Gluing pairing `(f, g) = ∫dψ dψ̄ f e^{ψ̄ψ} g`, where `f` carries the `ψ`
/// side and `g` the `ψ̄` side of `fields`.
pub fn bilinear_pair(f: &GrassmannElement, g: &GrassmannElement, fields: &FieldPair) -> Result<GrassmannElement> {
    f.same_context(g)?;
    if f.support() & fields.psibar().mask() != 0 {
        return Err(argument("left factor of the pairing depends on ψ̄"));
    }
    if g.support() & fields.psi().mask() != 0 {
        return Err(argument("right factor of the pairing depends on ψ"));
    }
    let alg = f.algebra();
    let kernel = fields.pairing(&alg).exp_even()?;
    f.try_mul(&kernel)?.try_mul(g)?.berezin(&fields.measure())
}
