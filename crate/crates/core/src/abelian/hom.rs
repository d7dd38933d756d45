use std::fmt;

use super::group::{AbElement, FgAbGroup};
use super::matrix::IntMatrix;
use super::quotient::{quotient_group, Subgroup};
use super::scalar::{self, Scalar};
use super::snf::{snf, SnfResult};
use super::AbelianError;

/// Homomorphism between finitely generated abelian groups, given by an
/// integer matrix of shape `rank(target) × rank(source)` acting on
/// coordinate columns.
///
/// Entries are stored reduced modulo the target moduli, so two homs are equal
/// as maps exactly when they compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AbHom<T> {
    source: FgAbGroup<T>,
    target: FgAbGroup<T>,
    matrix: IntMatrix<T>,
}

impl<T: Scalar> AbHom<T> {
    /// Checks shape and well-definedness: `mᵢ · (column i)` must vanish in
    /// the target for every source factor of finite order `mᵢ`.
    pub fn new(source: FgAbGroup<T>, target: FgAbGroup<T>, matrix: IntMatrix<T>) -> Result<Self, AbelianError> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(AbelianError::Shape(format!(
                "matrix is {}x{}, map {} -> {} needs {}x{}",
                matrix.rows(),
                matrix.cols(),
                source,
                target,
                target.rank(),
                source.rank()
            )));
        }
        for (i, m) in source.moduli().iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let image = matrix.col(i).iter().map(|c| scalar::mul(c, m)).collect::<Result<Vec<_>, _>>()?;
            if !target.is_zero(&image) {
                return Err(AbelianError::IllDefined { column: i });
            }
        }
        let mut matrix = matrix;
        for (k, n) in target.moduli().iter().enumerate() {
            for j in 0..matrix.cols() {
                matrix[(k, j)] = scalar::reduce_mod(&matrix[(k, j)], n);
            }
        }
        Ok(AbHom { source, target, matrix })
    }

    pub fn identity(g: &FgAbGroup<T>) -> Self {
        AbHom::new(g.clone(), g.clone(), IntMatrix::identity(g.rank())).expect("identity is well defined")
    }

    pub fn zero(source: &FgAbGroup<T>, target: &FgAbGroup<T>) -> Self {
        AbHom {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zeros(target.rank(), source.rank()),
        }
    }

    /// Multiplication by `k` on `g`.
    pub fn scalar(g: &FgAbGroup<T>, k: T) -> Self {
        Self::scalar_between(g, g, k).expect("scalar endomorphism is well defined")
    }

    /// The map with matrix `k · I` between groups of equal rank, if well defined.
    pub fn scalar_between(source: &FgAbGroup<T>, target: &FgAbGroup<T>, k: T) -> Result<Self, AbelianError> {
        if source.rank() != target.rank() {
            return Err(AbelianError::Shape(format!("{source} and {target} differ in rank")));
        }
        let m = IntMatrix::identity(source.rank()).scale(&k)?;
        AbHom::new(source.clone(), target.clone(), m)
    }

    pub fn source(&self) -> &FgAbGroup<T> {
        &self.source
    }

    pub fn target(&self) -> &FgAbGroup<T> {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix<T> {
        &self.matrix
    }

    pub fn apply(&self, a: &[T]) -> Result<AbElement<T>, AbelianError> {
        Ok(self.target.reduce(self.matrix.mul_vec(a)?))
    }

    /// `self ∘ first`: apply `first`, then `self`. Matrix `self · first`.
    pub fn compose(&self, first: &AbHom<T>) -> Result<Self, AbelianError> {
        if first.target != self.source {
            return Err(AbelianError::Shape(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.source, self.target, first.source, first.target
            )));
        }
        AbHom::new(first.source.clone(), self.target.clone(), self.matrix.mul(&first.matrix)?)
    }

    pub fn add(&self, other: &AbHom<T>) -> Result<Self, AbelianError> {
        self.check_parallel(other)?;
        AbHom::new(self.source.clone(), self.target.clone(), self.matrix.add(&other.matrix)?)
    }

    pub fn sub(&self, other: &AbHom<T>) -> Result<Self, AbelianError> {
        self.check_parallel(other)?;
        AbHom::new(self.source.clone(), self.target.clone(), self.matrix.sub(&other.matrix)?)
    }

    fn check_parallel(&self, other: &AbHom<T>) -> Result<(), AbelianError> {
        if self.source != other.source || self.target != other.target {
            return Err(AbelianError::Shape(format!(
                "maps {} -> {} and {} -> {} are not parallel",
                self.source, self.target, other.source, other.target
            )));
        }
        Ok(())
    }

    /// Generators of `{a : f(a) = 0}` in the source.
    pub fn kernel(&self) -> Result<Subgroup<T>, AbelianError> {
        let r = self.source.rank();
        let relations = IntMatrix::diagonal(self.target.rank(), self.target.rank(), self.target.moduli());
        let stacked = self.matrix.hcat(&relations)?;
        let s = snf(&stacked)?;
        let mut generators = Vec::new();
        for j in s.rank..stacked.cols() {
            let g = self.source.reduce(s.v.col(j)[..r].to_vec());
            if !self.source.is_zero(&g) {
                generators.push(g);
            }
        }
        Ok(Subgroup::new(self.source.clone(), generators))
    }

    /// Subgroup of the target generated by the images of the source generators.
    pub fn image(&self) -> Subgroup<T> {
        let gens = (0..self.source.rank())
            .map(|j| self.target.reduce(self.matrix.col(j)))
            .filter(|g| !self.target.is_zero(g))
            .collect();
        Subgroup::new(self.target.clone(), gens)
    }

    pub fn is_injective(&self) -> Result<bool, AbelianError> {
        Ok(self.kernel()?.generators().is_empty())
    }

    pub fn is_surjective(&self) -> Result<bool, AbelianError> {
        let q = quotient_group(&self.target, self.image().generators())?;
        Ok(q.group().is_trivial())
    }

    /// Bijective: trivial kernel and trivial cokernel.
    pub fn is_iso(&self) -> Result<bool, AbelianError> {
        Ok(self.is_injective()? && self.is_surjective()?)
    }

    /// Some preimage of `b`, or `None` if `b` is not in the image.
    pub fn solve(&self, b: &[T]) -> Result<Option<AbElement<T>>, AbelianError> {
        LinearSolver::new(self)?.solve(b)
    }

    /// Inverse of an isomorphism; `Err(NotInvertible)` otherwise.
    pub fn inverse(&self) -> Result<Self, AbelianError> {
        if !self.is_injective()? {
            return Err(AbelianError::NotInvertible);
        }
        let solver = LinearSolver::new(self)?;
        let mut m = IntMatrix::zeros(self.source.rank(), self.target.rank());
        for j in 0..self.target.rank() {
            let col = solver.solve(&self.target.generator(j))?.ok_or(AbelianError::NotInvertible)?;
            for (i, c) in col.into_iter().enumerate() {
                m[(i, j)] = c;
            }
        }
        AbHom::new(self.target.clone(), self.source.clone(), m)
    }

    /// Block-diagonal sum `⊕ fᵢ : ⊕ sourceᵢ → ⊕ targetᵢ`.
    pub fn direct_sum(parts: &[AbHom<T>]) -> Self {
        let source = FgAbGroup::direct_sum(parts.iter().map(|p| &p.source));
        let target = FgAbGroup::direct_sum(parts.iter().map(|p| &p.target));
        let mut m = IntMatrix::zeros(target.rank(), source.rank());
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            m.set_block(r0, c0, &p.matrix);
            r0 += p.target.rank();
            c0 += p.source.rank();
        }
        AbHom { source, target, matrix: m }
    }
}

impl<T: fmt::Debug> fmt::Debug for AbHom<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbHom({:?} -> {:?}, {:?})", self.source, self.target, self.matrix)
    }
}

/// Solves `f(a) = b` for many right-hand sides against one factorization.
///
/// With `K = [M | diag(target moduli)]` and `U K V = D`, a solution of
/// `K z = b` exists iff `dᵢ | (U b)ᵢ` for `i < rank` and `(U b)ᵢ = 0` beyond.
pub struct LinearSolver<T> {
    source: FgAbGroup<T>,
    target: FgAbGroup<T>,
    hom: AbHom<T>,
    snf: SnfResult<T>,
}

impl<T: Scalar> LinearSolver<T> {
    pub fn new(f: &AbHom<T>) -> Result<Self, AbelianError> {
        let n = f.target.rank();
        let stacked = f.matrix.hcat(&IntMatrix::diagonal(n, n, f.target.moduli()))?;
        Ok(LinearSolver { source: f.source.clone(), target: f.target.clone(), hom: f.clone(), snf: snf(&stacked)? })
    }

    pub fn solve(&self, b: &[T]) -> Result<Option<AbElement<T>>, AbelianError> {
        let b = self.target.element(b.to_vec())?;
        let c = self.snf.u.mul_vec(&b)?;
        let width = self.snf.v.rows();
        let mut w = vec![T::zero(); width];
        for (i, ci) in c.iter().enumerate() {
            if i < self.snf.rank {
                let d = &self.snf.d[(i, i)];
                if !ci.is_multiple_of(d) {
                    return Ok(None);
                }
                w[i] = scalar::div(ci, d)?;
            } else if !ci.is_zero() {
                return Ok(None);
            }
        }
        let z = self.snf.v.mul_vec(&w)?;
        let a = self.source.reduce(z[..self.source.rank()].to_vec());
        debug_assert_eq!(self.hom.apply(&a)?, b);
        Ok(Some(a))
    }
}
