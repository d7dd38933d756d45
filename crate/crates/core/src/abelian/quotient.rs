use super::group::{AbElement, FgAbGroup};
use super::hom::AbHom;
use super::matrix::IntMatrix;
use super::snf::snf;
use super::AbelianError;
use super::Scalar;

/// Subgroup of `ambient` given by a generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup<T> {
    ambient: FgAbGroup<T>,
    generators: Vec<AbElement<T>>,
}

impl<T: Scalar> Subgroup<T> {
    pub fn new(ambient: FgAbGroup<T>, generators: Vec<AbElement<T>>) -> Self {
        let generators = generators.into_iter().map(|g| ambient.reduce(g)).collect();
        Subgroup { ambient, generators }
    }

    pub fn ambient(&self) -> &FgAbGroup<T> {
        &self.ambient
    }

    pub fn generators(&self) -> &[AbElement<T>] {
        &self.generators
    }

    /// The map `ℤ^k → ambient` sending the standard basis to the generators.
    pub fn inclusion(&self) -> AbHom<T> {
        let k = self.generators.len();
        let mut m = IntMatrix::zeros(self.ambient.rank(), k);
        for (j, g) in self.generators.iter().enumerate() {
            for (i, c) in g.iter().enumerate() {
                m[(i, j)] = c.clone();
            }
        }
        AbHom::new(FgAbGroup::free(k), self.ambient.clone(), m).expect("free source")
    }

    /// Coefficients expressing `a` in the generators, if `a` lies in the subgroup.
    pub fn coefficients(&self, a: &[T]) -> Result<Option<Vec<T>>, AbelianError> {
        self.inclusion().solve(a)
    }

    pub fn contains(&self, a: &[T]) -> Result<bool, AbelianError> {
        Ok(self.coefficients(a)?.is_some())
    }

    /// Isomorphism type of the subgroup, in invariant-factor form.
    pub fn structure(&self) -> Result<FgAbGroup<T>, AbelianError> {
        let incl = self.inclusion();
        let q = quotient_group(incl.source(), incl.kernel()?.generators())?;
        Ok(q.group)
    }

    /// Order of the subgroup: `Ok(None)` when infinite.
    pub fn order(&self) -> Result<Option<T>, AbelianError> {
        Ok(self.structure()?.order())
    }
}

/// `g / ⟨relations⟩` in invariant-factor form with coordinate maps both ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient<T> {
    ambient: FgAbGroup<T>,
    group: FgAbGroup<T>,
    /// `rank(group) × rank(ambient)`: ambient coordinates to quotient coordinates.
    projection: IntMatrix<T>,
    /// For each quotient generator, an ambient element mapping to it.
    lifts: Vec<AbElement<T>>,
}

impl<T: Scalar> Quotient<T> {
    pub fn group(&self) -> &FgAbGroup<T> {
        &self.group
    }

    pub fn ambient(&self) -> &FgAbGroup<T> {
        &self.ambient
    }

    pub fn projection(&self) -> AbHom<T> {
        AbHom::new(self.ambient.clone(), self.group.clone(), self.projection.clone())
            .expect("projection is well defined")
    }

    pub fn project(&self, a: &[T]) -> Result<AbElement<T>, AbelianError> {
        Ok(self.group.reduce(self.projection.mul_vec(a)?))
    }

    pub fn lifts(&self) -> &[AbElement<T>] {
        &self.lifts
    }
}

/// Quotient of `g` by the subgroup generated by `relations`.
///
/// Writes `g = ℤ^r / diag(moduli)` and reduces the relation matrix
/// `[diag(moduli) | relations]` to Smith form `U N V = D`; new coordinates are
/// `U x`, the factors are the diagonal entries other than 1.
pub fn quotient_group<T: Scalar>(g: &FgAbGroup<T>, relations: &[AbElement<T>]) -> Result<Quotient<T>, AbelianError> {
    let r = g.rank();
    let mut rel = IntMatrix::zeros(r, relations.len());
    for (j, a) in relations.iter().enumerate() {
        if a.len() != r {
            return Err(AbelianError::Shape(format!("relation {j} has {} coordinates, expected {r}", a.len())));
        }
        for (i, c) in a.iter().enumerate() {
            rel[(i, j)] = c.clone();
        }
    }
    let n = IntMatrix::diagonal(r, r, g.moduli()).hcat(&rel)?;
    let s = snf(&n)?;
    let diag = s.diagonal();
    let kept: Vec<usize> = (0..r).filter(|&i| !diag[i].is_one()).collect();
    let group = FgAbGroup::new(kept.iter().map(|&i| diag[i].clone()).collect())?;
    let mut projection = IntMatrix::zeros(kept.len(), r);
    for (row, &i) in kept.iter().enumerate() {
        for j in 0..r {
            projection[(row, j)] = super::scalar::reduce_mod(&s.u[(i, j)], &diag[i]);
        }
    }
    let lifts = kept.iter().map(|&i| g.reduce(s.u_inv.col(i))).collect();
    Ok(Quotient { ambient: g.clone(), group, projection, lifts })
}
