use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qgca::format::{parse_group, parse_matrix, parse_table, print_group, print_matrix, print_table, MeasureSpec, RuleFile};

fn qgca(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgca")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixtures() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_path_buf();
    let o = qgca(&path, &["export-fixtures", "."]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    (dir, path)
}

#[test]
fn validate_d7() {
    let (_d, dir) = fixtures();
    let o = qgca(&dir, &["qg", "validate", "d7.table"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "LATIN OK N=7\n");
}

#[test]
fn quaternion_orbit() {
    let (_d, dir) = fixtures();
    let o = qgca(&dir, &["ca", "orbit", "quaternion.rule", "i j k"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "preperiod=0 period=3\n");
}

#[test]
fn example11_is_ca_invariant() {
    let (_d, dir) = fixtures();
    let o = qgca(&dir, &["mu", "invariance", "example11.measure", "--ca", "example11.rule", "--depth", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("max_dev=0/1"), "{}", stdout(&o));
}

#[test]
fn subquasigroups_of_d7() {
    let (_d, dir) = fixtures();
    let o = qgca(&dir, &["qg", "sub", "d7.table"]);
    assert_eq!(stdout(&o), "size\tmembers\n2\t{a1,a2}\n2\t{b1,b2}\n");
}

#[test]
fn fixtures_round_trip() {
    let (_d, dir) = fixtures();
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let reprinted = match path.extension().and_then(|e| e.to_str()).unwrap() {
            "table" => print_table(&parse_table(&text).unwrap()),
            "group" => print_group(&parse_group(&text).unwrap()),
            "matrix" => print_matrix(&parse_matrix(&text).unwrap()),
            "rule" => RuleFile::parse(&text).unwrap().print(),
            "measure" => MeasureSpec::parse(&text).unwrap().print(),
            other => panic!("unexpected fixture type {other}"),
        };
        assert_eq!(reprinted, text, "{}", path.display());
    }
}

#[test]
fn suite_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = qgca(dir.path(), &["paper-suite", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let text = stdout(&a);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    for c in 1..=9 {
        assert!(rows.iter().any(|r| r.starts_with(&format!("{c}\t")) && r.contains("\tPASS\t")), "criterion {c}");
    }
    assert!(!text.contains("\tFAIL\t"));
    let b = qgca(dir.path(), &["paper-suite", "--seed", "7", "--out", "suite.tsv"]);
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(dir.path().join("suite.tsv")).unwrap(), text);
}

#[test]
fn suite_passes_at_depth_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = qgca(dir.path(), &["paper-suite", "--depth", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("depths=1..3"));
}

#[test]
fn corrupted_d7_fails_row_one() {
    let (_d, dir) = fixtures();
    let table = std::fs::read_to_string(dir.join("d7.table")).unwrap();
    let mut lines: Vec<String> = table.lines().map(String::from).collect();
    lines[1] = lines[1].replacen("a2", "a1", 1);
    std::fs::write(dir.join("d7.table"), lines.join("\n") + "\n").unwrap();
    let o = qgca(&dir, &["paper-suite", "--fixtures", "."]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let row1 = text.lines().find(|l| l.starts_with("1\t")).unwrap();
    assert!(row1.contains("\tFAIL\t"), "{row1}");
    for c in ["2", "4", "6", "7", "8", "9"] {
        let row = text.lines().find(|l| l.starts_with(&format!("{c}\t"))).unwrap();
        assert!(row.contains("\tPASS\t"), "{row}");
    }

    let v = qgca(&dir, &["qg", "validate", "d7.table"]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).starts_with("NOT LATIN N=7"));
}

#[test]
fn exit_codes() {
    let (_d, dir) = fixtures();
    std::fs::write(dir.join("bad.table"), "2 a b\na b\n").unwrap();
    assert_eq!(qgca(&dir, &["qg", "validate", "bad.table"]).status.code(), Some(2));
    assert_eq!(qgca(&dir, &["qg", "validate", "missing.table"]).status.code(), Some(2));
    assert_eq!(qgca(&dir, &["ca", "orbit", "quaternion.rule", "i x"]).status.code(), Some(2));
    assert_eq!(qgca(&dir, &["no-such-verb"]).status.code(), Some(2));
    let deep = qgca(&dir, &["mu", "entropy", "example11.measure", "--depth", "9"]);
    assert_eq!(deep.status.code(), Some(3));
    let big = qgca(&dir, &["eca", "invsubgroups", "@vector:7:4", "f7.rule"]);
    assert_eq!(big.status.code(), Some(3));
    let audit = qgca(&dir, &["eca", "audit", "z3.group", "z3_difference.rule"]);
    assert_eq!(audit.status.code(), Some(1));
    assert!(stdout(&audit).contains("orbit_vs_invariant_subgroups\tDISAGREE"));
}

#[test]
fn eca_reports() {
    let (_d, dir) = fixtures();
    let o = qgca(&dir, &["eca", "charpoly", "f7.matrix"]);
    assert!(stdout(&o).contains("char_poly\tx^4 + 6*x^3 + 6*x^2 + 6*x + 6\n"));
    assert!(stdout(&o).contains("roots\t{5}\n"));
    let r = qgca(&dir, &["eca", "rcf", "id2.matrix"]);
    assert_eq!(stdout(&r), "# blocks=2 simple=false\nblock\tinvariant_factor\n0\tx + 1\n1\tx + 1\n");
    let s = qgca(&dir, &["eca", "invsubspaces", "id2.matrix"]);
    assert_eq!(s.status.code(), Some(0));
    assert_eq!(stdout(&s).lines().count(), 4);
    let h = qgca(&dir, &["eca", "hmax", "@nonabelian21"]);
    assert_eq!(stdout(&h), "h_max=2.80735492206\n");
    let k = qgca(&dir, &["eca", "kernel", "z3.group", "z3_difference.rule"]);
    assert_eq!(stdout(&k), "symbol\trho\tperiod\tzeta\n0\t0\t1\t0\n1\t1\t1\t1\n2\t2\t1\t2\n");
}

#[test]
fn automaton_verbs() {
    let (_d, dir) = fixtures();
    let step = qgca(&dir, &["ca", "step", "quaternion.rule", "i", "j", "k", "i"]);
    assert_eq!(stdout(&step), "t\tword\n0\ti j k i\n1\tk i j\n");
    let fiber = qgca(&dir, &["ca", "fiber", "quaternion.rule", "k"]);
    assert_eq!(fiber.status.code(), Some(0));
    assert_eq!(stdout(&fiber).lines().count(), 9);
    let xi = stdout(&qgca(&dir, &["ca", "xi", "d7.rule", "a1 b2 c3 c1"]));
    let back = qgca(&dir, &["ca", "xi", "--inverse", "d7.rule", xi.trim()]);
    assert_eq!(stdout(&back), "a1 b2 c3 c1\n");
    let dual = stdout(&qgca(&dir, &["ca", "dual", "quaternion.rule"]));
    std::fs::write(dir.join("dual.rule"), &dual).unwrap();
    let dual2 = stdout(&qgca(&dir, &["ca", "dual", "dual.rule"]));
    let original = qgca::format::Loader::filesystem().rule("quaternion.rule", &dir).unwrap();
    assert_eq!(dual2, qgca::format::print_rule(&original).trim_end().to_string() + "\n");
}
