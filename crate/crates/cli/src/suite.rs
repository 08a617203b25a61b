//! Acceptance battery over the example fixtures.

use std::path::Path;
use std::sync::Arc;

use num_traits::Zero;
use qgca::eca::{
    affine_rho, decompose_affine, kernel, lemma_audit, linear_structure, permutation_matrix, rcf_audit,
    MatrixFp, Poly, Verdict,
};
use qgca::format::Loader;
use qgca::measure::{fiber_spectrum, invariance_report, Transform};
use qgca::{validate_latin, Alphabet, CylinderMeasure, GroupTable, Prob, Qgca, Quasigroup, Symbol};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::eca::audit_rows;
use crate::commands::mu::example11_checks;
use crate::error::CliError;
use crate::report::{rat, set, sig12, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        }
    }
}

pub struct Row {
    pub criterion: String,
    pub name: String,
    pub status: Status,
    pub detail: String,
}

pub struct SuiteConfig<'a> {
    pub loader: &'a Loader,
    pub base: &'a Path,
    pub depth: Option<usize>,
    pub seed: u64,
    pub mass_floor: Prob,
}

type Checked = Result<(bool, String), CliError>;

fn verdict_row(criterion: &str, name: &str, result: Checked) -> Row {
    let (status, detail) = match result {
        Ok((true, d)) => (Status::Pass, d),
        Ok((false, d)) => (Status::Fail, d),
        Err(e) => (Status::Fail, e.to_string()),
    };
    Row { criterion: criterion.to_string(), name: name.to_string(), status, detail }
}

/// A uniformly shuffled backtracking fill of an `n × n` Latin square.
pub fn random_latin(n: usize, rng: &mut impl Rng) -> Quasigroup {
    fn fill(rows: &mut [Vec<Symbol>], cell: usize, n: usize, rng: &mut impl Rng) -> bool {
        if cell == n * n {
            return true;
        }
        let (r, c) = (cell / n, cell % n);
        let mut candidates: Vec<Symbol> = (0..n as Symbol)
            .filter(|&s| !rows[r][..c].contains(&s) && (0..r).all(|i| rows[i][c] != s))
            .collect();
        candidates.shuffle(rng);
        for s in candidates {
            rows[r][c] = s;
            if fill(rows, cell + 1, n, rng) {
                return true;
            }
        }
        false
    }
    let mut rows = vec![vec![0; n]; n];
    assert!(fill(&mut rows, 0, n, rng), "Latin squares exist for every order");
    validate_latin(&rows, Alphabet::numeric(n)).expect("filled square is Latin")
}

fn random_word(n: usize, len: usize, rng: &mut impl Rng) -> Vec<Symbol> {
    (0..len).map(|_| rng.gen_range(0..n as Symbol)).collect()
}

fn criterion1(cfg: &SuiteConfig) -> Checked {
    let text = cfg.loader.table("d7.table", cfg.base)?;
    let q = text.validate().map_err(|e| CliError::Analysis(format!("d7.table is not Latin: {e}")))?;
    let found = q.subquasigroups(false)?;
    let oracle = q.subquasigroups_exhaustive(false)?;
    let sets: Vec<String> = found.iter().map(|s| set(q.alphabet(), &s.members)).collect();
    let want = ["{a1,a2}", "{b1,b2}"];
    let ok = q.order() == 7 && found == oracle && want.iter().all(|w| sets.iter().any(|s| s == w));
    Ok((ok, format!("N={} subquasigroups={} oracle_agrees={}", q.order(), sets.join(""), found == oracle)))
}

fn criterion2(cfg: &SuiteConfig) -> Checked {
    let rule = cfg.loader.rule("quaternion.rule", cfg.base)?;
    let a = rule.alphabet().clone();
    let p = a.parse_word("i j k").map_err(|e| CliError::Input(e.to_string()))?;
    let mut cur = p.clone();
    let mut trace = Vec::new();
    for _ in 0..3 {
        let mut wrapped = cur.clone();
        wrapped.push(cur[0]);
        cur = rule.step(&wrapped)?;
        trace.push(a.format_word(&cur));
    }
    let (pre, period) = rule.orbit_period(&p)?;
    let ok = trace[0] == "k i j" && cur == p && (pre, period) == (0, 3);
    Ok((ok, format!("trajectory={} preperiod={pre} period={period}", trace.join(" | "))))
}

fn uniform_deviation(ca: Qgca, depths: usize) -> Result<Prob, CliError> {
    let m = Arc::new(CylinderMeasure::uniform(ca.rule().alphabet().clone()));
    let t = Transform::Ca(Arc::new(ca));
    let mut worst = Prob::zero();
    for d in 1..=depths {
        worst = worst.max(invariance_report(&m, &t, d)?.max_abs_deviation);
    }
    Ok(worst)
}

fn criterion3(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Checked {
    let depth = cfg.depth.unwrap_or(5);
    let mut worst = Prob::zero();
    for r in ["d7.rule", "quaternion.rule"] {
        worst = worst.max(uniform_deviation(cfg.loader.qgca(r, cfg.base)?, depth)?);
    }
    for _ in 0..25 {
        let n = rng.gen_range(2..=5);
        worst = worst.max(uniform_deviation(Qgca::from_quasigroup(&random_latin(n, rng)), depth)?);
    }
    Ok((worst.is_zero(), format!("rules=27 depths=1..{depth} max_dev={}", rat(&worst))))
}

fn criterion4(cfg: &SuiteConfig) -> Checked {
    let c = cfg.loader.group("z2.group", cfg.base)?;
    let depth = cfg.depth.unwrap_or(4);
    let checks = example11_checks(&c, depth, &cfg.mass_floor)?;
    let failed: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    let detail = if failed.is_empty() {
        let names: Vec<&str> = checks.iter().map(|c| c.name.as_str()).collect();
        format!("depth={depth} checks={}", names.join(","))
    } else {
        failed.join("; ")
    };
    Ok((failed.is_empty(), detail))
}

fn conjugacy_holds(ca: &Qgca, dual: &Qgca, w: &[Symbol]) -> Result<bool, CliError> {
    let x = ca.xi(w)?;
    let stepped = ca.xi(&ca.step(w)?)?;
    let shifted = ca.xi(&w[1..])?;
    Ok(stepped == x[1..]
        && ca.xi_inverse(&x)? == w
        && shifted == dual.step(&x)?
        && dual.xi(&x)? == w)
}

fn criterion5(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Checked {
    let mut checked = 0;
    for r in ["d7.rule", "quaternion.rule"] {
        let ca = cfg.loader.qgca(r, cfg.base)?;
        let dual = ca.dual();
        let n = ca.alphabet_size();
        for _ in 0..200 {
            let len = rng.gen_range(2..=12);
            let w = random_word(n, len, rng);
            if !conjugacy_holds(&ca, &dual, &w)? {
                return Ok((false, format!("{r}: fails on {}", ca.rule().alphabet().format_word(&w))));
            }
            checked += 1;
        }
    }
    Ok((true, format!("words={checked} identities=step,inverse,shift-to-dual,dual-inverse")))
}

struct EcaFixture {
    group: GroupTable,
    ca: Qgca,
    m: MatrixFp,
}

fn f7_fixture(cfg: &SuiteConfig) -> Result<EcaFixture, CliError> {
    let m = cfg.loader.matrix("f7.matrix", cfg.base)?;
    let group = cfg.loader.group(&format!("@vector:{}:{}", m.modulus(), m.dim()), cfg.base)?;
    let ca = cfg.loader.qgca("f7.rule", cfg.base)?;
    Ok(EcaFixture { group, ca, m })
}

fn criterion6(f: &EcaFixture) -> Checked {
    let (p, dim) = linear_structure(&f.group).ok_or_else(|| CliError::Input("group is not F_p^n".into()))?;
    let d = decompose_affine(f.ca.rule(), &f.group)?;
    let m0 = permutation_matrix(p, dim, &d.phi0)?;
    let m1 = permutation_matrix(p, dim, &d.phi1)?;
    let decomposed = m0 == f.m && m1 == MatrixFp::identity(p, dim)?;
    let k = kernel(&f.ca, &f.group)?;
    let minus_phi0 = affine_rho(&d, &f.group);
    let rho_matrix = permutation_matrix(p, dim, &k.rho)?;
    let rho_ok = minus_phi0.as_ref() == Some(&k.rho) && rho_matrix == f.m.neg();
    let rcf = rho_matrix.rcf();
    let ok = decomposed && rho_ok && rcf.simple;
    let blocks: Vec<String> = rcf.blocks.iter().map(|b| format!("[{b}]")).collect();
    Ok((
        ok,
        format!(
            "decompose=(M,I):{decomposed} rho=-phi0:{rho_ok} rcf(-M)={} simple={}",
            blocks.join(""),
            rcf.simple
        ),
    ))
}

fn f7_info(f: &EcaFixture) -> Result<Vec<(String, String)>, CliError> {
    let audit = lemma_audit(&f.group, &f.ca)?;
    let mut out = Vec::new();
    let minus = rcf_audit(f.m.neg())?;
    let roots: Vec<String> = minus.eigenvalues.iter().map(u64::to_string).collect();
    out.push((
        "root_scan".to_string(),
        format!("char(-M)={} roots={{{}}} invariant_subspaces={}", minus.char_poly, roots.join(","), minus.invariant_subspace_count),
    ));
    for (lemma, v, detail) in audit_rows(f.group.alphabet(), &audit) {
        out.push((format!("audit:{lemma}"), format!("{v} {detail}")));
    }
    Ok(out)
}

fn criterion7(cfg: &SuiteConfig) -> Checked {
    let g21 = cfg.loader.group("@nonabelian21", cfg.base)?;
    let h21 = g21.h_max()?;
    let target = 7f64.log2();
    let mut ok = (h21 - target).abs() < 1e-12;
    let mut primes = Vec::new();
    for p in [2, 3, 5, 7, 11, 13] {
        let h = cfg.loader.group(&format!("@cyclic:{p}"), cfg.base)?.h_max()?;
        ok &= h == 0.0;
        primes.push(format!("Z/{p}:{}", sig12(h)));
    }
    Ok((ok, format!("nonabelian21={} log2(7)={} {}", sig12(h21), sig12(target), primes.join(" "))))
}

fn criterion8(rng: &mut ChaCha8Rng) -> Checked {
    for rule_no in 0..50 {
        let n = rng.gen_range(2..=6);
        let ca = Qgca::from_quasigroup(&random_latin(n, rng));
        for _ in 0..100 {
            let len = rng.gen_range(1..=10);
            let w = random_word(n, len, rng);
            let fiber = ca.fiber_preimages(&w)?;
            let mut sorted = fiber.clone();
            sorted.sort();
            sorted.dedup();
            let distinct = sorted.len() == n;
            let mapped = fiber.iter().map(|x| ca.step(x)).collect::<Result<Vec<_>, _>>()?.iter().all(|y| *y == w);
            let mut x = fiber[0].clone();
            let mut cycle = Vec::with_capacity(n);
            for _ in 0..n {
                x = ca.tau(&x)?;
                cycle.push(x.clone());
            }
            let tau_ok = x == fiber[0] && cycle.iter().all(|y| fiber.contains(y));
            if !(distinct && mapped && tau_ok) {
                return Ok((false, format!("rule {rule_no} (N={n}) fails on {w:?}")));
            }
        }
        let m = Arc::new(CylinderMeasure::uniform(Alphabet::numeric(n)));
        let spectrum = fiber_spectrum(&m, &Arc::new(ca), 2, &Prob::zero())?;
        let weight = Prob::new(1.into(), (n as i64).into());
        if !spectrum.rows.iter().all(|r| r.support_count == n && r.weights.iter().all(|w| *w == weight)) {
            return Ok((false, format!("rule {rule_no} (N={n}) has a non-uniform fiber row")));
        }
    }
    Ok((true, "rules=50 words_per_rule=100 fiber_depth=2".into()))
}

fn criterion9(cfg: &SuiteConfig) -> Result<(bool, String, Vec<(String, String)>), CliError> {
    let g = cfg.loader.group("z3.group", cfg.base)?;
    let ca = cfg.loader.qgca("z3_difference.rule", cfg.base)?;
    let audit = lemma_audit(&g, &ca)?;
    let orbit = &audit.orbit;
    let disagree = orbit.verdict == Verdict::Disagree && orbit.orbits.orbits.len() == 2;
    let info: Vec<(String, String)> = audit_rows(g.alphabet(), &audit)
        .into_iter()
        .map(|(lemma, v, d)| (format!("audit:z3:{lemma}"), format!("{v} {d}")))
        .collect();

    let id = cfg.loader.matrix("id2.matrix", cfg.base)?;
    let rcf = id.rcf();
    let x1 = Poly::linear(2, 1);
    let subspaces = id.invariant_subspaces()?;
    let exhaustive = id.invariant_subspaces_exhaustive()?;
    let identity_ok = rcf.blocks == [x1.clone(), x1] && !rcf.simple && subspaces.len() == 3 && subspaces == exhaustive;
    let blocks: Vec<String> = rcf.blocks.iter().map(|b| format!("[{b}]")).collect();
    let detail = format!(
        "z3 orbit lemma={} orbits={}; id(F_2^2) blocks={} simple={} lines={} exhaustive_agrees={}",
        orbit.verdict,
        orbit.orbits.orbits.len(),
        blocks.join(""),
        rcf.simple,
        subspaces.len(),
        subspaces == exhaustive
    );
    Ok((disagree && identity_ok, detail, info))
}

/// Runs every criterion; information rows follow the criterion they belong to.
pub fn run(cfg: &SuiteConfig) -> Vec<Row> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = vec![
        verdict_row("1", "subquasigroups_of_d7", criterion1(cfg)),
        verdict_row("2", "quaternion_orbit", criterion2(cfg)),
        verdict_row("3", "uniform_invariance", criterion3(cfg, &mut rng)),
        verdict_row("4", "example11_suite", criterion4(cfg)),
        verdict_row("5", "xi_conjugacy", criterion5(cfg, &mut rng)),
    ];
    match f7_fixture(cfg) {
        Ok(f) => {
            rows.push(verdict_row("6", "f7_eca_audit", criterion6(&f)));
            match f7_info(&f) {
                Ok(info) => rows.extend(info.into_iter().map(|(name, detail)| Row {
                    criterion: "6".into(),
                    name,
                    status: Status::Info,
                    detail,
                })),
                Err(e) => rows.push(verdict_row("6", "f7_audit_report", Err(e))),
            }
        }
        Err(e) => rows.push(verdict_row("6", "f7_eca_audit", Err(e))),
    }
    rows.push(verdict_row("7", "h_max", criterion7(cfg)));
    rows.push(verdict_row("8", "fiber_sweep", criterion8(&mut rng)));
    match criterion9(cfg) {
        Ok((ok, detail, info)) => {
            rows.push(verdict_row("9", "lemma_audits", Ok((ok, detail))));
            rows.extend(info.into_iter().map(|(name, detail)| Row {
                criterion: "9".into(),
                name,
                status: Status::Info,
                detail,
            }));
        }
        Err(e) => rows.push(verdict_row("9", "lemma_audits", Err(e))),
    }
    rows
}

pub fn write(rows: &[Row], report: &mut Report) {
    report.row(&["criterion", "name", "status", "detail"]);
    for r in rows {
        report.row(&[r.criterion.as_str(), &r.name, r.status.label(), &r.detail]);
    }
}
