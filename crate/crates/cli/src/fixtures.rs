//! Example inputs compiled into the binary.

use std::collections::HashMap;
use std::io;
use std::path::{Path, PathBuf};

use qgca::builtins;
use qgca::eca::{f7_example_matrix, MatrixFp};
use qgca::format::{print_group, print_matrix, print_table};
use qgca::measure::example11_group;
use qgca::GroupTable;

fn group(q: qgca::Quasigroup) -> GroupTable {
    GroupTable::new(q).expect("built-in group")
}

/// `(file name, contents)` in a fixed order.
pub fn fixtures() -> Vec<(&'static str, String)> {
    let z2 = group(builtins::cyclic(2).expect("Z/2"));
    let z3 = group(builtins::cyclic(3).expect("Z/3"));
    let mut z3_difference = String::from("3 0 1\n");
    for a in 0..3 {
        for b in 0..3 {
            z3_difference.push_str(&format!("{a} {b} -> {}\n", (b + 3 - a) % 3));
        }
    }
    vec![
        ("d7.table", print_table(&builtins::d7())),
        ("d7.rule", "7 0 1\nquasigroup d7.table\n".into()),
        ("quaternion.table", print_table(&builtins::quaternion())),
        ("quaternion.rule", "8 0 1\nquasigroup quaternion.table\n".into()),
        ("z2.group", print_group(&z2)),
        ("z3.group", print_group(&z3)),
        ("z3_difference.rule", z3_difference),
        ("example11.group", print_group(&example11_group(&z2))),
        ("example11.rule", "16 0 1\nquasigroup example11.group\n".into()),
        ("c_uniform.measure", "kind=uniform\nalphabet=z2.group\n".into()),
        ("q_orbit.measure", "kind=orbit\nalphabet=quaternion.table\nperiod_word=i j k\n".into()),
        ("example11.measure", "kind=product\nleft=c_uniform.measure\nright=q_orbit.measure\n".into()),
        ("f7.matrix", print_matrix(&f7_example_matrix())),
        ("f7.rule", "2401 0 1\nlinear f7.matrix\n".into()),
        ("id2.matrix", print_matrix(&MatrixFp::identity(2, 2).expect("2 is prime"))),
    ]
}

pub fn fixture_map() -> HashMap<PathBuf, String> {
    fixtures().into_iter().map(|(k, v)| (PathBuf::from(k), v)).collect()
}

pub fn export(dir: &Path) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    fixtures()
        .into_iter()
        .map(|(name, text)| {
            let path = dir.join(name);
            std::fs::write(&path, text)?;
            Ok(path)
        })
        .collect()
}
