//! Named fixtures: small racks and modules over them.

use crate::rack::{FinGroup, FinRack};
use crate::rack_module::{Flavor, RackModule};
use crate::{AbGroup, Int, Matrix};

pub struct CatalogModule {
    pub name: &'static str,
    pub rack: &'static str,
    pub module: RackModule,
}

impl CatalogModule {
    /// Flavors for which `Ext` is defined on this entry.
    pub fn flavors(&self) -> Vec<Flavor> {
        if self.module.flavor() == Flavor::Quandle && self.module.base().is_quandle() {
            vec![Flavor::Rack, Flavor::Quandle]
        } else {
            vec![Flavor::Rack]
        }
    }
}

/// Quandle on `{0, 1, 2}` where `2` swaps `0` and `1` and everything else acts
/// trivially. Orbits `{0, 1}` and `{2}`.
pub fn two_orbit_quandle() -> FinRack {
    FinRack::from_table(&[vec![0, 0, 1], vec![1, 1, 0], vec![2, 2, 2]]).expect("valid quandle")
}

pub fn racks() -> Vec<(&'static str, FinRack)> {
    vec![
        ("point", FinRack::trivial(1)),
        ("trivial2", FinRack::trivial(2)),
        ("trivial3", FinRack::trivial(3)),
        ("c3", FinRack::cyclic(3)),
        ("dihedral3", FinRack::dihedral(3)),
        ("conj_z2", FinRack::conj(&FinGroup::cyclic(2))),
        ("conj_s3", FinRack::conj(&FinGroup::symmetric(3))),
        ("two_orbit", two_orbit_quandle()),
    ]
}

pub fn rack(name: &str) -> Option<FinRack> {
    racks().into_iter().find(|(n, _)| *n == name).map(|(_, r)| r)
}

fn z(n: i64) -> AbGroup {
    AbGroup::from_i64(&[n]).expect("cyclic")
}

fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&c| Int::from(c)).collect()
}

fn scalar(c: i64) -> Matrix {
    Matrix::from_i64_rows(&[&[c]])
}

pub fn modules() -> Vec<CatalogModule> {
    let r = |name: &str| rack(name).expect("catalog rack");
    let entry = |name, rack, module| CatalogModule { name, rack, module };
    let c3 = r("c3");
    let d3 = r("dihedral3");
    vec![
        entry("point_z2", "point", RackModule::trivial(&r("point"), &z(2))),
        entry("point_z5", "point", RackModule::trivial(&r("point"), &z(5))),
        entry("trivial2_z2", "trivial2", RackModule::trivial(&r("trivial2"), &z(2))),
        entry("trivial2_z5", "trivial2", RackModule::trivial(&r("trivial2"), &z(5))),
        entry("trivial3_z2", "trivial3", RackModule::trivial(&r("trivial3"), &z(2))),
        entry("c3_z2", "c3", RackModule::trivial(&c3, &z(2))),
        entry(
            "c3_z5_andr_grana",
            "c3",
            RackModule::from_matrices(c3.clone(), Flavor::Rack, vec![z(5); 3], |_, _| scalar(2), |_, _| scalar(4))
                .expect("valid module"),
        ),
        entry(
            "c3_z5_asx",
            "c3",
            RackModule::asx(&c3, &z(5), &vec![crate::Hom::scalar(&z(5), Int::from(2)); 3], false)
                .expect("valid module"),
        ),
        entry("c3_alex_t_minus_1_n5", "c3", RackModule::alexander(&c3, &[(Int::from(5), ints(&[-1, 1]))]).expect("valid")),
        entry(
            "c3_alex_1_t_t2_n2",
            "c3",
            RackModule::alexander(&c3, &[(Int::from(2), ints(&[1, 1, 1]))]).expect("valid"),
        ),
        entry("dihedral3_z2", "dihedral3", RackModule::trivial(&d3, &z(2))),
        entry("dihedral3_z3", "dihedral3", RackModule::trivial(&d3, &z(3))),
        entry("dihedral3_d2", "dihedral3", RackModule::dihedral(&d3, &ints(&[2])).expect("valid")),
        entry("dihedral3_d3", "dihedral3", RackModule::dihedral(&d3, &ints(&[3])).expect("valid")),
        entry("dihedral3_dinf", "dihedral3", RackModule::dihedral(&d3, &ints(&[0])).expect("valid")),
        entry(
            "dihedral3_alex_1_plus_t_n3",
            "dihedral3",
            RackModule::alexander(&d3, &[(Int::from(3), ints(&[1, 1]))]).expect("valid"),
        ),
        entry("conj_z2_z2", "conj_z2", RackModule::trivial(&r("conj_z2"), &z(2))),
        entry("conj_s3_z2", "conj_s3", RackModule::trivial(&r("conj_s3"), &z(2))),
        entry(
            "two_orbit_dihedral_3_6",
            "two_orbit",
            RackModule::dihedral(&r("two_orbit"), &ints(&[3, 6])).expect("valid"),
        ),
    ]
}

pub fn module(name: &str) -> Option<CatalogModule> {
    modules().into_iter().find(|m| m.name == name)
}
