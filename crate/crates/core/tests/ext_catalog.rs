//! Frozen `Ext` groups for the bundled catalog. Finite entries under the
//! enumeration cap are re-derived here by brute force; the rest are pinned.

use num_traits::ToPrimitive;
use rackext::catalog;
use rackext::ext_group::{brute_force_ext_order, ext_group};
use rackext::extension::{is_cocycle, quandle_factor_violation};
use rackext::{caps, ExtensionRack, Flavor, Int};

const R: Flavor = Flavor::Rack;
const Q: Flavor = Flavor::Quandle;

/// `(module, flavor, free rank, torsion)`.
const EXPECTED: &[(&str, Flavor, usize, &[i64])] = &[
    ("point_z2", R, 0, &[2]),
    ("point_z2", Q, 0, &[]),
    ("point_z5", R, 0, &[5]),
    ("point_z5", Q, 0, &[]),
    ("trivial2_z2", R, 0, &[2, 2, 2, 2]),
    ("trivial2_z2", Q, 0, &[2, 2]),
    ("trivial2_z5", R, 0, &[5, 5, 5, 5]),
    ("trivial2_z5", Q, 0, &[5, 5]),
    ("trivial3_z2", R, 0, &[2; 9]),
    ("trivial3_z2", Q, 0, &[2; 6]),
    ("c3_z2", R, 0, &[2]),
    ("c3_z5_andr_grana", R, 0, &[]),
    ("c3_z5_asx", R, 0, &[]),
    ("c3_alex_t_minus_1_n5", R, 0, &[5]),
    ("c3_alex_1_t_t2_n2", R, 0, &[]),
    ("dihedral3_z2", R, 0, &[2]),
    ("dihedral3_z2", Q, 0, &[]),
    ("dihedral3_z3", R, 0, &[3]),
    ("dihedral3_z3", Q, 0, &[]),
    ("dihedral3_d2", R, 0, &[2]),
    ("dihedral3_d2", Q, 0, &[]),
    ("dihedral3_d3", R, 0, &[3, 3]),
    ("dihedral3_d3", Q, 0, &[3, 3]),
    ("dihedral3_dinf", R, 0, &[3]),
    ("dihedral3_dinf", Q, 0, &[3]),
    ("dihedral3_alex_1_plus_t_n3", R, 0, &[3, 3]),
    ("dihedral3_alex_1_plus_t_n3", Q, 0, &[3, 3]),
    ("conj_z2_z2", R, 0, &[2, 2, 2, 2]),
    ("conj_z2_z2", Q, 0, &[2, 2]),
    ("conj_s3_z2", R, 0, &[2; 9]),
    ("conj_s3_z2", Q, 0, &[2; 6]),
    ("two_orbit_dihedral_3_6", R, 0, &[2, 2]),
    ("two_orbit_dihedral_3_6", Q, 0, &[2]),
];

#[test]
fn every_catalog_case_is_pinned() {
    let mut cases = 0;
    for c in catalog::modules() {
        for f in c.flavors() {
            assert!(EXPECTED.iter().any(|(n, g, _, _)| *n == c.name && *g == f), "{} {f} is not pinned", c.name);
            cases += 1;
        }
    }
    assert_eq!(cases, EXPECTED.len());
}

#[test]
fn invariant_factors_match() {
    for &(name, flavor, free, torsion) in EXPECTED {
        let m = catalog::module(name).unwrap().module;
        let e = ext_group(&m, flavor).unwrap();
        let want: Vec<Int> = torsion.iter().map(|&d| Int::from(d)).collect();
        assert_eq!((e.free_rank, &e.torsion), (free, &want), "{name} {flavor}");
        if let Ok(b) = brute_force_ext_order(&m, flavor, caps::BRUTE_FORCE, 2) {
            assert_eq!(e.ext_order.and_then(|o| o.to_u64()), Some(b.ext), "{name} {flavor}");
        }
    }
}

#[test]
fn representatives_define_extensions() {
    for &(name, flavor, _, _) in EXPECTED {
        let m = catalog::module(name).unwrap().module;
        for s in ext_group(&m, flavor).unwrap().representatives {
            assert!(is_cocycle(&m, &s).unwrap(), "{name}");
            if flavor == Flavor::Quandle {
                assert_eq!(quandle_factor_violation(&m, &s).unwrap(), None, "{name}");
            }
            if m.is_finite() {
                let e = ExtensionRack::from_factor_set(&m, &s, caps::EXTENSION_SIZE).unwrap();
                if flavor == Flavor::Quandle {
                    assert!(e.rack().is_quandle(), "{name}");
                }
            }
        }
    }
}
