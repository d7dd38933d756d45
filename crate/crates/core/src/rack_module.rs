//! Rack and quandle modules `(A, φ, ψ)` over a finite rack.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::abelian::{scalar, AbelianError};
use crate::rack::{FinRack, RackError, SignedWord};
use crate::{AbGroup, Hom, Int, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    Rack,
    Quandle,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Rack => "rack",
            Flavor::Quandle => "quandle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("{0} is not a well-defined homomorphism")]
    IllDefined(String),
    #[error("phi({x},{y}) is not an isomorphism")]
    PhiNotIso { x: usize, y: usize },
    #[error("first square fails at (x, y, z) = ({x}, {y}, {z})")]
    Square1 { x: usize, y: usize, z: usize },
    #[error("second square fails at (x, y, z) = ({x}, {y}, {z})")]
    Square2 { x: usize, y: usize, z: usize },
    #[error("psi compatibility fails at (x, y, z) = ({x}, {y}, {z})")]
    Eq1 { x: usize, y: usize, z: usize },
    #[error("quandle condition psi(x,x) + phi(x,x) = id fails at x = {x}")]
    Eq2 { x: usize },
    #[error("action is incompatible with the rack at (x, y) = ({x}, {y})")]
    ActionIncompatible { x: usize, y: usize },
    #[error("multiplication by t is not invertible: {0}")]
    NonInvertibleT(String),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Rack(#[from] RackError),
}

/// A validated module over `base`.
///
/// `phi(x, y): A_x → A_{x^y}` and `psi(y, x): A_y → A_{x^y}`. Rack flavor
/// requires the two squares, invertible `φ`, and the `ψ` compatibility law;
/// quandle flavor adds `ψ_{x,x} + φ_{x,x} = id`.
#[derive(Clone, PartialEq, Eq)]
pub struct RackModule {
    base: FinRack,
    flavor: Flavor,
    groups: Vec<AbGroup>,
    phi: Vec<Hom>,
    psi: Vec<Hom>,
}

impl RackModule {
    /// `phi[x * n + y] = φ_{x,y}`, `psi[y * n + x] = ψ_{y,x}`.
    pub fn new(
        base: FinRack,
        flavor: Flavor,
        groups: Vec<AbGroup>,
        phi: Vec<Hom>,
        psi: Vec<Hom>,
    ) -> Result<RackModule, ModuleError> {
        let m = RackModule { base, flavor, groups, phi, psi };
        m.validate()?;
        Ok(m)
    }

    /// Builds every `φ`, `ψ` from matrix-valued functions, then validates.
    pub fn from_matrices(
        base: FinRack,
        flavor: Flavor,
        groups: Vec<AbGroup>,
        phi: impl Fn(usize, usize) -> Matrix,
        psi: impl Fn(usize, usize) -> Matrix,
    ) -> Result<RackModule, ModuleError> {
        let n = base.size();
        if groups.len() != n {
            return Err(ModuleError::Shape(format!("{} groups for {n} elements", groups.len())));
        }
        let mut phis = Vec::with_capacity(n * n);
        let mut psis = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                // phi(a, b) : A_a -> A_{a^b}; psi(a, b) : A_a -> A_{b^a}
                phis.push(make_hom(&groups[a], &groups[base.op(a, b)], phi(a, b), || format!("phi({a},{b})"))?);
                psis.push(make_hom(&groups[a], &groups[base.op(b, a)], psi(a, b), || format!("psi({a},{b})"))?);
            }
        }
        Self::new(base, flavor, groups, phis, psis)
    }

    /// `A_x = a`, `φ = id`, `ψ = 0`. Quandle flavor when the base is a quandle.
    pub fn trivial(base: &FinRack, a: &AbGroup) -> RackModule {
        let flavor = default_flavor(base);
        let k = a.rank();
        Self::from_matrices(base.clone(), flavor, vec![a.clone(); base.size()], |_, _| Matrix::identity(k), |_, _| {
            Matrix::zeros(k, k)
        })
        .expect("trivial module is valid")
    }

    /// Homogeneous module from a right action of `As X` on `a`: generator `x`
    /// acts by `rho[x]`, and `φ_{x,y} = rho[y]`. The quandle variant sets
    /// `ψ_{y,x} = id − φ_{x,y}`; otherwise `ψ = 0`.
    pub fn asx(base: &FinRack, a: &AbGroup, rho: &[Hom], quandle_variant: bool) -> Result<RackModule, ModuleError> {
        let n = base.size();
        if rho.len() != n {
            return Err(ModuleError::Shape(format!("{} action maps for {n} elements", rho.len())));
        }
        for (x, r) in rho.iter().enumerate() {
            if r.source() != a || r.target() != a {
                return Err(ModuleError::Shape(format!("rho({x}) is not an endomorphism of {a}")));
            }
            if !r.is_iso()? {
                return Err(ModuleError::PhiNotIso { x, y: x });
            }
        }
        for x in 0..n {
            for y in 0..n {
                if rho[base.op(x, y)].compose(&rho[y])? != rho[y].compose(&rho[x])? {
                    return Err(ModuleError::ActionIncompatible { x, y });
                }
            }
        }
        let k = a.rank();
        let id = Matrix::identity(k);
        let (flavor, psi): (Flavor, Box<dyn Fn(usize, usize) -> Matrix>) = if quandle_variant {
            (Flavor::Quandle, Box::new(|y, _| id.sub(rho[y].matrix()).expect("same shape")))
        } else {
            (Flavor::Rack, Box::new(|_, _| Matrix::zeros(k, k)))
        };
        Self::from_matrices(base.clone(), flavor, vec![a.clone(); n], |_, y| rho[y].matrix().clone(), psi)
    }

    /// Alexander module: on orbit `i`, `A_x = ℤ_{n_i}[t, t⁻¹] / h_i(t)` with basis
    /// `1, t, …, t^{d−1}`; `φ` is multiplication by `t` and `ψ` by `1 − t`.
    ///
    /// `orbit_data[i] = (n_i, coefficients of h_i from the constant term up)`, in
    /// the order of [`FinRack::orbits`]. The constant and leading coefficients
    /// must be units mod `n_i` (`±1` when `n_i = 0`).
    pub fn alexander(base: &FinRack, orbit_data: &[(Int, Vec<Int>)]) -> Result<RackModule, ModuleError> {
        let orbit_of = base.orbit_of();
        let orbits = base.orbits().len();
        if orbit_data.len() != orbits {
            return Err(ModuleError::Shape(format!("{} orbit entries for {orbits} orbits", orbit_data.len())));
        }
        let companions = orbit_data.iter().map(|(n, h)| companion(n, h)).collect::<Result<Vec<_>, _>>()?;
        let groups: Vec<AbGroup> = orbit_of
            .iter()
            .map(|&o| AbGroup::new(vec![orbit_data[o].0.clone(); companions[o].rows()]))
            .collect::<Result<_, _>>()?;
        for y in 0..base.size() {
            for x in 0..base.size() {
                let (dy, dx) = (companions[orbit_of[y]].rows(), companions[orbit_of[x]].rows());
                if dy != dx {
                    return Err(ModuleError::Shape(format!(
                        "psi({y},{x}) joins orbits of degree {dy} and {dx}; the degrees must agree"
                    )));
                }
            }
        }
        let c = |x: usize| &companions[orbit_of[x]];
        Self::from_matrices(
            base.clone(),
            default_flavor(base),
            groups,
            |x, _| c(x).clone(),
            |_, x| {
                let t = c(x);
                Matrix::identity(t.rows()).sub(t).expect("square")
            },
        )
    }

    /// Dihedral module: `A_x = ℤ_{n_[x]}`, `φ = −1`, `ψ = 2`. Same as the
    /// Alexander module with `h = 1 + t`.
    pub fn dihedral(base: &FinRack, orbit_moduli: &[Int]) -> Result<RackModule, ModuleError> {
        let data: Vec<(Int, Vec<Int>)> =
            orbit_moduli.iter().map(|n| (n.clone(), vec![Int::one(), Int::one()])).collect();
        Self::alexander(base, &data)
    }

    /// Same data under another flavor, revalidated.
    pub fn with_flavor(&self, flavor: Flavor) -> Result<RackModule, ModuleError> {
        let mut m = self.clone();
        m.flavor = flavor;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ModuleError> {
        let r = &self.base;
        let n = r.size();
        if self.groups.len() != n || self.phi.len() != n * n || self.psi.len() != n * n {
            return Err(ModuleError::Shape("module data does not match the rack size".into()));
        }
        for x in 0..n {
            for y in 0..n {
                let f = self.phi(x, y);
                if f.source() != &self.groups[x] || f.target() != &self.groups[r.op(x, y)] {
                    return Err(ModuleError::Shape(format!("phi({x},{y}) must map A_{x} to A_{}", r.op(x, y))));
                }
                let g = self.psi(y, x);
                if g.source() != &self.groups[y] || g.target() != &self.groups[r.op(x, y)] {
                    return Err(ModuleError::Shape(format!("psi({y},{x}) must map A_{y} to A_{}", r.op(x, y))));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if !self.phi(x, y).is_iso()? {
                    return Err(ModuleError::PhiNotIso { x, y });
                }
            }
        }
        self.check_triples(|x, y, z| {
            let (xy, xz, yz) = (r.op(x, y), r.op(x, z), r.op(y, z));
            let lhs = self.phi(xy, z).compose(self.phi(x, y))?;
            let rhs = self.phi(xz, yz).compose(self.phi(x, z))?;
            Ok((lhs == rhs).then_some(()).ok_or(ModuleError::Square1 { x, y, z }))
        })?;
        self.check_triples(|x, y, z| {
            let (xy, xz, yz) = (r.op(x, y), r.op(x, z), r.op(y, z));
            let lhs = self.phi(xy, z).compose(self.psi(y, x))?;
            let rhs = self.psi(yz, xz).compose(self.phi(y, z))?;
            Ok((lhs == rhs).then_some(()).ok_or(ModuleError::Square2 { x, y, z }))
        })?;
        self.check_triples(|x, y, z| {
            let (xy, xz, yz) = (r.op(x, y), r.op(x, z), r.op(y, z));
            let lhs = self.psi(z, xy);
            let rhs = self
                .phi(xz, yz)
                .compose(self.psi(z, x))?
                .add(&self.psi(yz, xz).compose(self.psi(z, y))?)?;
            Ok((lhs == &rhs).then_some(()).ok_or(ModuleError::Eq1 { x, y, z }))
        })?;
        if self.flavor == Flavor::Quandle {
            for x in 0..n {
                if r.op(x, x) != x && self.groups[r.op(x, x)] != self.groups[x] {
                    return Err(ModuleError::Shape(format!(
                        "the quandle condition at {x} needs A_{x} and A_{} to coincide",
                        r.op(x, x)
                    )));
                }
                let sum = self.psi(x, x).matrix().add(self.phi(x, x).matrix())?;
                let g = &self.groups[x];
                if Hom::new(g.clone(), g.clone(), sum)? != Hom::identity(g) {
                    return Err(ModuleError::Eq2 { x });
                }
            }
        }
        Ok(())
    }

    fn check_triples(
        &self,
        check: impl Fn(usize, usize, usize) -> Result<Result<(), ModuleError>, ModuleError>,
    ) -> Result<(), ModuleError> {
        let n = self.base.size();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    check(x, y, z)??;
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &FinRack {
        &self.base
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn groups(&self) -> &[AbGroup] {
        &self.groups
    }

    pub fn group(&self, x: usize) -> &AbGroup {
        &self.groups[x]
    }

    /// `φ_{x,y}: A_x → A_{x^y}`.
    pub fn phi(&self, x: usize, y: usize) -> &Hom {
        &self.phi[x * self.base.size() + y]
    }

    /// `ψ_{y,x}: A_y → A_{x^y}`.
    pub fn psi(&self, y: usize, x: usize) -> &Hom {
        &self.psi[y * self.base.size() + x]
    }

    /// Every fiber finite.
    pub fn is_finite(&self) -> bool {
        self.groups.iter().all(AbGroup::is_finite)
    }

    /// `φ_{x,w}` and `x^w`, folding the word left to right. An inverse letter
    /// `y⁻¹` at state `s` moves to `s' = s^{ȳ}` through `φ_{s',y}⁻¹`.
    pub fn word_action(&self, x: usize, w: &SignedWord) -> Result<(Hom, usize), ModuleError> {
        w.check_bounds(self.base.size())?;
        let mut acc = Hom::identity(&self.groups[x]);
        let mut s = x;
        for l in w.letters() {
            let y = l.generator;
            if l.positive {
                acc = self.phi(s, y).compose(&acc)?;
                s = self.base.op(s, y);
            } else {
                let prev = self.base.inv_op(s, y);
                acc = self.phi(prev, y).inverse()?.compose(&acc)?;
                s = prev;
            }
        }
        Ok((acc, s))
    }
}

fn default_flavor(base: &FinRack) -> Flavor {
    if base.is_quandle() {
        Flavor::Quandle
    } else {
        Flavor::Rack
    }
}

fn make_hom(source: &AbGroup, target: &AbGroup, m: Matrix, name: impl Fn() -> String) -> Result<Hom, ModuleError> {
    Hom::new(source.clone(), target.clone(), m).map_err(|e| match e {
        AbelianError::IllDefined { .. } => ModuleError::IllDefined(name()),
        AbelianError::Shape(s) => ModuleError::Shape(format!("{}: {s}", name())),
        other => other.into(),
    })
}

/// Companion matrix of `h` made monic mod `n`: the action of `t` on `1, t, …, t^{d−1}`.
fn companion(n: &Int, h: &[Int]) -> Result<Matrix, ModuleError> {
    if n.is_negative() || n.is_one() {
        return Err(ModuleError::NonInvertibleT(format!("modulus {n} must be 0 or at least 2")));
    }
    let mut h: Vec<Int> = h.iter().map(|c| scalar::reduce_mod(c, n)).collect();
    while h.last().is_some_and(Zero::is_zero) {
        h.pop();
    }
    if h.len() < 2 {
        return Err(ModuleError::NonInvertibleT("h must have degree at least 1".into()));
    }
    let d = h.len() - 1;
    let unit = |c: &Int| if n.is_zero() { c.abs().is_one() } else { scalar::is_unit_mod(c, n) };
    if !unit(&h[0]) || !unit(&h[d]) {
        return Err(ModuleError::NonInvertibleT(format!(
            "constant and leading coefficients of h must be units mod {n}"
        )));
    }
    let lead_inv = if n.is_zero() { h[d].clone() } else { scalar::inverse_mod(&h[d], n).expect("unit") };
    let mut c = Matrix::zeros(d, d);
    for i in 0..d {
        if i + 1 < d {
            c[(i + 1, i)] = Int::one();
        }
        c[(i, d - 1)] = scalar::reduce_mod(&-(&h[i] * &lead_inv), n);
    }
    Ok(c)
}

impl fmt::Debug for RackModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RackModule")
            .field("base", &self.base)
            .field("flavor", &self.flavor)
            .field("groups", &self.groups)
            .finish_non_exhaustive()
    }
}

/// Which naturality square of an X-map fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapViolation {
    Phi { x: usize, y: usize },
    Psi { y: usize, x: usize },
}

/// Checks that `f_x: A_x → B_x` commutes with both structure families.
/// Returns the first failing square, if any.
pub fn check_module_map(
    source: &RackModule,
    target: &RackModule,
    components: &[Hom],
) -> Result<Option<MapViolation>, ModuleError> {
    let r = source.base();
    let n = r.size();
    if target.base() != r || components.len() != n {
        return Err(ModuleError::Shape("modules and components must share one base rack".into()));
    }
    for (x, f) in components.iter().enumerate() {
        if f.source() != source.group(x) || f.target() != target.group(x) {
            return Err(ModuleError::Shape(format!("component {x} has the wrong domain or codomain")));
        }
    }
    for x in 0..n {
        for y in 0..n {
            let xy = r.op(x, y);
            if target.phi(x, y).compose(&components[x])? != components[xy].compose(source.phi(x, y))? {
                return Ok(Some(MapViolation::Phi { x, y }));
            }
            if target.psi(y, x).compose(&components[y])? != components[xy].compose(source.psi(y, x))? {
                return Ok(Some(MapViolation::Psi { y, x }));
            }
        }
    }
    Ok(None)
}
