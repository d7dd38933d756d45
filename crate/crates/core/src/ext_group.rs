//! `Z`, `B` and `Ext = Z / B` for rack and quandle extensions, by Smith
//! normal form, with an enumeration oracle for finite cases.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::abelian::{quotient_group, Subgroup};
use crate::extension::{coboundary_map, coboundary_of, factor_ambient, ExtensionError, FactorSet};
use crate::rack_module::{Flavor, RackModule};
use crate::{AbGroup, Element, Hom, Int, Matrix};

/// `Ext(X, A)` or `Ext_Q(X, A)` in invariant-factor form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtResult {
    pub flavor: Flavor,
    pub free_rank: usize,
    /// `d₁ | d₂ | …`, each at least 2.
    pub torsion: Vec<Int>,
    /// One cocycle per invariant factor, in the same order (torsion first).
    pub representatives: Vec<FactorSet>,
    /// `|Z|`, `|B|`, `|Ext|`; `None` where infinite.
    pub z_order: Option<Int>,
    pub b_order: Option<Int>,
    pub ext_order: Option<Int>,
}

impl ExtResult {
    pub fn group(&self) -> AbGroup {
        let mut moduli = self.torsion.clone();
        moduli.extend(std::iter::repeat_n(Int::zero(), self.free_rank));
        AbGroup::new(moduli).expect("invariant factors")
    }
}

fn check_flavor(m: &RackModule, flavor: Flavor) -> Result<(), ExtensionError> {
    if flavor == Flavor::Quandle && (m.flavor() != Flavor::Quandle || !m.base().is_quandle()) {
        return Err(ExtensionError::FlavorMismatch("quandle extensions need a quandle module over a quandle".into()));
    }
    Ok(())
}

/// Linear map sending `σ` to the cocycle defect `LHS − RHS` at every triple,
/// followed (quandle flavor) by the diagonal values `σ_{x,x}`. Duplicate and
/// zero constraint rows are dropped; the kernel is unchanged.
pub fn cocycle_map(m: &RackModule, flavor: Flavor) -> Result<Hom, ExtensionError> {
    let r = m.base();
    let n = r.size();
    let source = factor_ambient(m);
    let mut col_off = Vec::with_capacity(n * n);
    let mut at = 0;
    for k in 0..n * n {
        col_off.push(at);
        at += m.group(r.op(k / n, k % n)).rank();
    }
    let pair = |x: usize, y: usize| col_off[x * n + y];
    let mut rows: Vec<(Vec<Int>, Int)> = Vec::new();
    let mut seen = HashSet::new();
    let mut push_block = |block: Matrix, moduli: &[Int]| {
        for (i, q) in moduli.iter().enumerate() {
            let row: Vec<Int> = block.row(i).iter().map(|c| crate::abelian::scalar::reduce_mod(c, q)).collect();
            if row.iter().all(Zero::is_zero) {
                continue;
            }
            if seen.insert((row.clone(), q.clone())) {
                rows.push((row, q.clone()));
            }
        }
    };
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let (xy, xz, yz) = (r.op(x, y), r.op(x, z), r.op(y, z));
                let target = m.group(r.op(xy, z));
                let k = target.rank();
                let mut block = Matrix::zeros(k, source.rank());
                let minus = |h: &Matrix| h.scale(&Int::from(-1));
                block.add_block(0, pair(xy, z), &Matrix::identity(k))?;
                block.add_block(0, pair(x, y), m.phi(xy, z).matrix())?;
                block.add_block(0, pair(x, z), &minus(m.phi(xz, yz).matrix())?)?;
                block.add_block(0, pair(xz, yz), &minus(&Matrix::identity(k))?)?;
                block.add_block(0, pair(y, z), &minus(m.psi(yz, xz).matrix())?)?;
                push_block(block, target.moduli());
            }
        }
    }
    if flavor == Flavor::Quandle {
        for x in 0..n {
            let g = m.group(r.op(x, x));
            let mut block = Matrix::zeros(g.rank(), source.rank());
            block.add_block(0, pair(x, x), &Matrix::identity(g.rank()))?;
            push_block(block, g.moduli());
        }
    }
    let target = AbGroup::new(rows.iter().map(|(_, q)| q.clone()).collect())?;
    let data: Vec<Vec<Int>> = rows.into_iter().map(|(row, _)| row).collect();
    let mat = Matrix::from_rows(data, source.rank())?;
    Ok(Hom::new(source, target, mat)?)
}

/// `Z(X, A)` (or `Z_Q`) as a subgroup of `⊕_{(x,y)} A_{x^y}`.
pub fn cocycle_group(m: &RackModule, flavor: Flavor) -> Result<Subgroup<Int>, ExtensionError> {
    check_flavor(m, flavor)?;
    Ok(cocycle_map(m, flavor)?.kernel()?)
}

/// `B(X, A)`, the image of `υ ↦ δυ`; the same for both flavors.
pub fn coboundary_group(m: &RackModule) -> Result<Subgroup<Int>, ExtensionError> {
    Ok(coboundary_map(m)?.image())
}

/// `Z / B` with representative cocycles lifted from the quotient generators.
pub fn ext_group(m: &RackModule, flavor: Flavor) -> Result<ExtResult, ExtensionError> {
    let z = cocycle_group(m, flavor)?;
    let b = coboundary_group(m)?;
    let incl = z.inclusion();
    let s = incl.source().rank();
    let mut relations: Vec<Element> = incl.kernel()?.generators().to_vec();
    for g in b.generators() {
        let c = z.coefficients(g)?.ok_or_else(|| {
            ExtensionError::Shape("a coboundary is not a cocycle; the module is inconsistent".into())
        })?;
        relations.push(c);
    }
    let q = quotient_group(&AbGroup::free(s), &relations)?;
    let ambient = incl.target();
    let representatives = q
        .lifts()
        .iter()
        .map(|l| FactorSet::from_flat(m, &ambient.reduce(incl.matrix().mul_vec(l)?)))
        .collect::<Result<_, _>>()?;
    let ext = q.group();
    Ok(ExtResult {
        flavor,
        free_rank: ext.free_rank(),
        torsion: ext.torsion(),
        representatives,
        z_order: z.order()?,
        b_order: b.order()?,
        ext_order: ext.order(),
    })
}

/// Counts from exhaustive enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForceOrders {
    pub z: u64,
    pub b: u64,
    /// `z / b`; `b` always divides `z` for a valid module.
    pub ext: u64,
}

/// Enumerates every factor set and every family `υ`, counting cocycles
/// (with vanishing diagonal for quandle flavor) and distinct coboundaries.
///
/// Each cocycle defect is evaluated from the pointwise formula on unit factor
/// sets and accumulated as the enumeration odometer turns. `jobs` threads
/// share disjoint ranges; the counts do not depend on `jobs`.
pub fn brute_force_ext_order(
    m: &RackModule,
    flavor: Flavor,
    cap: u64,
    jobs: usize,
) -> Result<BruteForceOrders, ExtensionError> {
    check_flavor(m, flavor)?;
    for (x, g) in m.groups().iter().enumerate() {
        if !g.is_finite() {
            return Err(ExtensionError::InfiniteFiber { x });
        }
    }
    let ambient = factor_ambient(m);
    let space = ambient.order().expect("finite fibers");
    let family_space = AbGroup::direct_sum(m.groups()).order().expect("finite fibers");
    let too_big = |s: &BigInt| s > &BigInt::from(cap);
    if too_big(&space) || too_big(&family_space) {
        let size = space.clone().max(family_space);
        return Err(ExtensionError::CapExceeded { size: size.to_string(), cap: cap.to_usize().unwrap_or(usize::MAX) });
    }
    let space = space.to_u64().expect("below cap");
    let digits: Vec<u64> = ambient.moduli().iter().map(|q| q.to_u64().expect("below cap")).collect();

    let r = m.base();
    let n = r.size();
    let mut row_moduli: Vec<u64> = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let g = m.group(r.op(r.op(x, y), z));
                row_moduli.extend(g.moduli().iter().map(|q| q.to_u64().expect("finite")));
            }
        }
    }
    let diag: Vec<usize> = if flavor == Flavor::Quandle { diagonal_coordinates(m) } else { Vec::new() };
    let columns: Vec<Vec<u64>> = (0..digits.len())
        .map(|i| {
            let mut e = vec![Int::zero(); digits.len()];
            e[i] = Int::from(1);
            let unit = FactorSet::from_flat(m, &e)?;
            defect(m, &unit, &row_moduli)
        })
        .collect::<Result<_, ExtensionError>>()?;

    let jobs = jobs.max(1).min(space as usize);
    let chunk = space.div_ceil(jobs as u64);
    let z = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs as u64)
            .map(|j| {
                let (digits, columns, row_moduli, diag) = (&digits, &columns, &row_moduli, &diag);
                let start = j * chunk;
                let end = ((j + 1) * chunk).min(space);
                scope.spawn(move || count_cocycles(digits, columns, row_moduli, diag, start, end))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker")).sum::<u64>()
    });

    let mut boundaries = HashSet::new();
    let fam = AbGroup::direct_sum(m.groups());
    for flat in fam.elements().expect("finite") {
        let mut at = 0;
        let upsilon: Vec<Element> = m
            .groups()
            .iter()
            .map(|g| {
                let v = flat[at..at + g.rank()].to_vec();
                at += g.rank();
                v
            })
            .collect();
        boundaries.insert(coboundary_of(m, &upsilon)?);
    }
    let b = boundaries.len() as u64;
    Ok(BruteForceOrders { z, b, ext: z / b })
}

/// Coordinates of the `σ_{x,x}` entries in the flattened factor set.
fn diagonal_coordinates(m: &RackModule) -> Vec<usize> {
    let r = m.base();
    let n = r.size();
    let mut out = Vec::new();
    let mut at = 0;
    for x in 0..n {
        for y in 0..n {
            let k = m.group(r.op(x, y)).rank();
            if x == y {
                out.extend(at..at + k);
            }
            at += k;
        }
    }
    out
}

/// Per-triple `LHS − RHS` of the cocycle condition, reduced to `u64` residues.
fn defect(m: &RackModule, s: &FactorSet, row_moduli: &[u64]) -> Result<Vec<u64>, ExtensionError> {
    let r = m.base();
    let n = r.size();
    let mut out = Vec::with_capacity(row_moduli.len());
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let (xy, xz, yz) = (r.op(x, y), r.op(x, z), r.op(y, z));
                let g = m.group(r.op(xy, z));
                let lhs = g.add(s.get(xy, z), &m.phi(xy, z).apply(s.get(x, y))?)?;
                let rhs = g.add(
                    &g.add(&m.phi(xz, yz).apply(s.get(x, z))?, s.get(xz, yz))?,
                    &m.psi(yz, xz).apply(s.get(y, z))?,
                )?;
                out.extend(g.sub(&lhs, &rhs)?.iter().map(|c| c.to_u64().expect("reduced")));
            }
        }
    }
    debug_assert_eq!(out.len(), row_moduli.len());
    Ok(out)
}

fn count_cocycles(digits: &[u64], columns: &[Vec<u64>], row_moduli: &[u64], diag: &[usize], start: u64, end: u64) -> u64 {
    if start >= end {
        return 0;
    }
    let k = digits.len();
    let mut value = vec![0u64; k];
    let mut rest = start;
    for i in (0..k).rev() {
        value[i] = rest % digits[i];
        rest /= digits[i];
    }
    let mut residual = vec![0u64; row_moduli.len()];
    for (i, &v) in value.iter().enumerate() {
        for (res, (&c, &q)) in residual.iter_mut().zip(columns[i].iter().zip(row_moduli)) {
            *res = (*res + v % q * c) % q;
        }
    }
    let mut nonzero = residual.iter().filter(|&&v| v != 0).count();
    let mut diag_nonzero = diag.iter().filter(|&&i| value[i] != 0).count();
    let mut count = 0;
    for step in start..end {
        if nonzero == 0 && diag_nonzero == 0 {
            count += 1;
        }
        if step + 1 == end {
            break;
        }
        // advance the odometer, last coordinate fastest
        let mut i = k;
        loop {
            i -= 1;
            let was_zero_digit = value[i] == 0;
            value[i] += 1;
            let wrapped = value[i] == digits[i];
            if wrapped {
                value[i] = 0;
            }
            // q · column ≡ 0, so a wrap adds the column once more to return to zero
            for (res, (&c, &q)) in residual.iter_mut().zip(columns[i].iter().zip(row_moduli)) {
                let before = *res != 0;
                *res = (*res + c) % q;
                let after = *res != 0;
                if before != after {
                    if after {
                        nonzero += 1;
                    } else {
                        nonzero -= 1;
                    }
                }
            }
            if diag.contains(&i) {
                match (was_zero_digit, value[i] == 0) {
                    (true, false) => diag_nonzero += 1,
                    (false, true) => diag_nonzero -= 1,
                    _ => {}
                }
            }
            if !wrapped {
                break;
            }
        }
    }
    count
}
