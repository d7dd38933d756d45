use std::fmt;

use super::scalar::{self, Scalar};
use super::AbelianError;

/// Finitely generated abelian group `ℤ_{m₀} ⊕ ℤ_{m₁} ⊕ …`, where a modulus
/// of `0` stands for an infinite cyclic factor.
///
/// Moduli of `1` are rejected: a trivial factor is simply omitted. The factors
/// need not be in invariant-factor order; [`FgAbGroup::is_canonical`] reports
/// whether they are.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FgAbGroup<T> {
    moduli: Vec<T>,
}

/// Coordinates of an element, one entry per cyclic factor.
pub type AbElement<T> = Vec<T>;

impl<T: Scalar> FgAbGroup<T> {
    pub fn new(moduli: Vec<T>) -> Result<Self, AbelianError> {
        for m in &moduli {
            if m.is_negative() || m.is_one() {
                return Err(AbelianError::InvalidModulus(m.to_string()));
            }
        }
        Ok(FgAbGroup { moduli })
    }

    pub fn from_i64(moduli: &[i64]) -> Result<Self, AbelianError> {
        Self::new(moduli.iter().map(|&m| scalar::from_i64(m)).collect())
    }

    pub fn trivial() -> Self {
        FgAbGroup { moduli: Vec::new() }
    }

    /// `ℤ^rank`.
    pub fn free(rank: usize) -> Self {
        FgAbGroup { moduli: vec![T::zero(); rank] }
    }

    /// `ℤ_m` (or `ℤ` for `m = 0`, trivial for `m = 1`).
    pub fn cyclic(m: T) -> Result<Self, AbelianError> {
        if m.is_one() {
            return Ok(Self::trivial());
        }
        Self::new(vec![m])
    }

    pub fn moduli(&self) -> &[T] {
        &self.moduli
    }

    /// Number of cyclic factors (length of a coordinate vector).
    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn free_rank(&self) -> usize {
        self.moduli.iter().filter(|m| m.is_zero()).count()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank() == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.moduli.is_empty()
    }

    /// Invariant-factor form: torsion `d₁ | d₂ | …` (all ≥ 2) followed by zeros.
    pub fn is_canonical(&self) -> bool {
        let torsion: Vec<&T> = self.moduli.iter().take_while(|m| !m.is_zero()).collect();
        self.moduli[torsion.len()..].iter().all(|m| m.is_zero())
            && torsion.windows(2).all(|w| w[1].is_multiple_of(w[0]))
    }

    pub fn torsion(&self) -> Vec<T> {
        self.moduli.iter().filter(|m| !m.is_zero()).cloned().collect()
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<T> {
        self.is_finite().then(|| self.moduli.iter().fold(T::one(), |acc, m| acc * m.clone()))
    }

    pub fn zero(&self) -> AbElement<T> {
        vec![T::zero(); self.rank()]
    }

    /// `i`-th standard generator.
    pub fn generator(&self, i: usize) -> AbElement<T> {
        let mut e = self.zero();
        e[i] = T::one();
        self.reduce(e)
    }

    /// Reduces coordinates to canonical residues.
    pub fn reduce(&self, mut coords: AbElement<T>) -> AbElement<T> {
        debug_assert_eq!(coords.len(), self.rank());
        for (c, m) in coords.iter_mut().zip(&self.moduli) {
            *c = scalar::reduce_mod(c, m);
        }
        coords
    }

    /// Checks length, then reduces.
    pub fn element(&self, coords: AbElement<T>) -> Result<AbElement<T>, AbelianError> {
        if coords.len() != self.rank() {
            return Err(AbelianError::Shape(format!(
                "element has {} coordinates, group {} has {}",
                coords.len(),
                self,
                self.rank()
            )));
        }
        Ok(self.reduce(coords))
    }

    pub fn contains_coords(&self, coords: &[T]) -> bool {
        coords.len() == self.rank()
            && coords
                .iter()
                .zip(&self.moduli)
                .all(|(c, m)| m.is_zero() || (!c.is_negative() && c < m))
    }

    pub fn add(&self, a: &[T], b: &[T]) -> Result<AbElement<T>, AbelianError> {
        let sum = a.iter().zip(b).map(|(x, y)| scalar::add(x, y)).collect::<Result<_, _>>()?;
        Ok(self.reduce(sum))
    }

    pub fn sub(&self, a: &[T], b: &[T]) -> Result<AbElement<T>, AbelianError> {
        let diff = a.iter().zip(b).map(|(x, y)| scalar::sub(x, y)).collect::<Result<_, _>>()?;
        Ok(self.reduce(diff))
    }

    pub fn neg(&self, a: &[T]) -> Result<AbElement<T>, AbelianError> {
        let n = a.iter().map(scalar::neg).collect::<Result<_, _>>()?;
        Ok(self.reduce(n))
    }

    pub fn scale(&self, k: &T, a: &[T]) -> Result<AbElement<T>, AbelianError> {
        let s = a.iter().map(|x| scalar::mul(k, x)).collect::<Result<_, _>>()?;
        Ok(self.reduce(s))
    }

    pub fn is_zero(&self, a: &[T]) -> bool {
        self.reduce(a.to_vec()).iter().all(|c| c.is_zero())
    }

    /// Direct sum, factors concatenated in order.
    pub fn direct_sum<'a>(parts: impl IntoIterator<Item = &'a Self>) -> Self {
        FgAbGroup { moduli: parts.into_iter().flat_map(|g| g.moduli.iter().cloned()).collect() }
    }

    /// All elements of a finite group in lexicographic coordinate order
    /// (first coordinate most significant). `None` for infinite groups.
    pub fn elements(&self) -> Option<Elements<T>> {
        self.is_finite().then(|| Elements { moduli: self.moduli.clone(), next: Some(self.zero()) })
    }

    /// Position of `a` in [`FgAbGroup::elements`] order; `a` must be reduced.
    pub fn index_of(&self, a: &[T]) -> Option<usize> {
        let mut idx = 0usize;
        for (c, m) in a.iter().zip(&self.moduli) {
            idx = idx.checked_mul(m.to_usize()?)?.checked_add(c.to_usize()?)?;
        }
        Some(idx)
    }

    /// Inverse of [`FgAbGroup::index_of`].
    pub fn element_at(&self, mut idx: usize) -> Option<AbElement<T>> {
        let mut coords = self.zero();
        for (c, m) in coords.iter_mut().zip(&self.moduli).rev() {
            let m = m.to_usize().filter(|&m| m > 0)?;
            *c = T::from_usize(idx % m)?;
            idx /= m;
        }
        (idx == 0).then_some(coords)
    }
}

impl<T: Scalar> fmt::Display for FgAbGroup<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.moduli.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.is_zero() {
                write!(f, "Z")?;
            } else {
                write!(f, "Z/{m}")?;
            }
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for FgAbGroup<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FgAbGroup{:?}", self.moduli)
    }
}

/// Odometer over the elements of a finite group.
pub struct Elements<T> {
    moduli: Vec<T>,
    next: Option<Vec<T>>,
}

impl<T: Scalar> Iterator for Elements<T> {
    type Item = AbElement<T>;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carried_out = true;
        for (c, m) in succ.iter_mut().zip(&self.moduli).rev() {
            *c = c.clone() + T::one();
            if *c < *m {
                carried_out = false;
                break;
            }
            *c = T::zero();
        }
        if !carried_out {
            self.next = Some(succ);
        }
        Some(current)
    }
}
