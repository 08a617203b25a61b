use qgca::eca::{
    check_endomorphic, decompose_affine, kernel, lemma_audit, linear_structure, permutation_matrix,
    rho_orbits, AuditReport, MatrixFp, Subspace, Verdict, MAX_EXHAUSTIVE_SPACE,
};
use qgca::{Alphabet, GroupTable, Qgca};

use super::{here, Ctx, Outcome};
use crate::error::CliError;
use crate::report::{set, sig12, word};

fn load(ctx: &Ctx, group: &str, rule: &str) -> Result<(GroupTable, Qgca), CliError> {
    Ok((ctx.loader.group(group, here())?, ctx.loader.qgca(rule, here())?))
}

fn matrix(ctx: &Ctx, m: &str) -> Result<MatrixFp, CliError> {
    Ok(ctx.loader.matrix(m, here())?)
}

fn matrix_lines(m: &MatrixFp) -> Vec<String> {
    m.to_string().lines().map(String::from).collect()
}

pub fn decompose(ctx: &mut Ctx, group: &str, rule: &str) -> Outcome {
    let (g, ca) = load(ctx, group, rule)?;
    let d = decompose_affine(ca.rule(), &g)?;
    check_endomorphic(ca.rule(), &g)?;
    let a = g.alphabet();
    ctx.report.line(format!(
        "# phi0_automorphism={} phi1_automorphism={} bipermutative={}",
        d.phi0_automorphism, d.phi1_automorphism, d.bipermutative
    ));
    if let Some((p, dim)) = linear_structure(&g) {
        for (name, map) in [("phi0", &d.phi0), ("phi1", &d.phi1)] {
            ctx.report.line(format!("# {name} matrix over F_{p}^{dim}"));
            for line in matrix_lines(&permutation_matrix(p, dim, map)?) {
                ctx.report.line(format!("# {line}"));
            }
        }
    }
    ctx.report.row(&["symbol", "phi0", "phi1"]);
    for s in 0..g.order() {
        ctx.report.row(&[a.name(s as u32), a.name(d.phi0[s]), a.name(d.phi1[s])]);
    }
    Ok(true)
}

pub fn kernel_table(ctx: &mut Ctx, group: &str, rule: &str) -> Outcome {
    let (g, ca) = load(ctx, group, rule)?;
    let k = kernel(&ca, &g)?;
    let a = g.alphabet();
    ctx.report.row(&["symbol", "rho", "period", "zeta"]);
    for s in 0..g.order() {
        ctx.report.row(&[
            a.name(s as u32).to_string(),
            a.name(k.rho[s]).to_string(),
            k.periods[s].to_string(),
            word(a, &k.zeta[s]),
        ]);
    }
    Ok(true)
}

pub fn orbits(ctx: &mut Ctx, group: &str, rule: &str) -> Outcome {
    let (g, ca) = load(ctx, group, rule)?;
    let k = kernel(&ca, &g)?;
    let r = rho_orbits(&k.rho, &g)?;
    ctx.report.line(format!("# orbits={} single_orbit={}", r.orbits.len(), r.single_orbit));
    ctx.report.row(&["orbit", "length", "members"]);
    for (i, o) in r.orbits.iter().enumerate() {
        ctx.report.row(&[i.to_string(), o.len().to_string(), set(g.alphabet(), o)]);
    }
    Ok(true)
}

pub fn invsubgroups(ctx: &mut Ctx, group: &str, rule: &str) -> Outcome {
    let (g, ca) = load(ctx, group, rule)?;
    let k = kernel(&ca, &g)?;
    let subgroups = g.invariant_subgroups(&k.rho)?;
    ctx.report.row(&["size", "members"]);
    for s in subgroups {
        ctx.report.row(&[s.len().to_string(), set(g.alphabet(), &s)]);
    }
    Ok(true)
}

pub fn hmax(ctx: &mut Ctx, group: &str) -> Outcome {
    let g = ctx.loader.group(group, here())?;
    ctx.report.line(format!("h_max={}", sig12(g.h_max()?)));
    Ok(true)
}

pub fn charpoly(ctx: &mut Ctx, m: &str) -> Outcome {
    let m = matrix(ctx, m)?;
    let (c, min) = m.char_min_poly();
    let roots: Vec<String> = c.roots().iter().map(u64::to_string).collect();
    ctx.report.row(&["field", "value"]);
    ctx.report.row(&["char_poly".to_string(), c.to_string()]);
    ctx.report.row(&["min_poly".to_string(), min.to_string()]);
    ctx.report.row(&["roots".to_string(), format!("{{{}}}", roots.join(","))]);
    Ok(true)
}

pub fn rcf(ctx: &mut Ctx, m: &str) -> Outcome {
    let m = matrix(ctx, m)?;
    let r = m.rcf();
    ctx.report.line(format!("# blocks={} simple={}", r.blocks.len(), r.simple));
    ctx.report.row(&["block", "invariant_factor"]);
    for (i, b) in r.blocks.iter().enumerate() {
        ctx.report.row(&[i.to_string(), b.to_string()]);
    }
    Ok(true)
}

fn span(basis: &Subspace) -> String {
    let vecs: Vec<String> =
        basis.iter().map(|v| format!("({})", v.iter().map(u64::to_string).collect::<Vec<_>>().join(","))).collect();
    format!("span{{{}}}", vecs.join(","))
}

/// Lists invariant subspaces; small spaces are cross-checked against the
/// exhaustive enumeration.
pub fn invsubspaces(ctx: &mut Ctx, m: &str) -> Outcome {
    let m = matrix(ctx, m)?;
    let found = m.invariant_subspaces()?;
    ctx.report.row(&["dim", "basis"]);
    for s in &found {
        ctx.report.row(&[s.len().to_string(), span(s)]);
    }
    let space = (m.modulus() as u128).checked_pow(m.dim() as u32);
    if space.is_some_and(|s| s <= MAX_EXHAUSTIVE_SPACE as u128) && m.invariant_subspaces_exhaustive()? != found {
        eprintln!("exhaustive subspace enumeration disagrees");
        return Ok(false);
    }
    Ok(true)
}

/// `(lemma, verdict, detail)` rows of an audit.
pub fn audit_rows(a: &Alphabet, r: &AuditReport) -> Vec<(String, Verdict, String)> {
    let o = &r.orbit;
    let lengths: Vec<String> = o.orbits.orbits.iter().map(|x| x.len().to_string()).collect();
    let mut detail = format!(
        "orbits={} lengths=[{}] single_orbit={} no_invariant_subgroup={}",
        o.orbits.orbits.len(),
        lengths.join(","),
        o.orbits.single_orbit,
        o.no_invariant_subgroup
    );
    if !o.orbits.single_orbit && o.orbits.orbits.len() <= 8 {
        let sets: Vec<String> = o.orbits.orbits.iter().map(|x| set(a, x)).collect();
        detail.push_str(&format!(" orbit_witness={}", sets.join("")));
    }
    if let Some(w) = &o.witness_subgroup {
        detail.push_str(&format!(" subgroup_witness_size={}", w.len()));
        if w.len() <= 16 {
            detail.push_str(&format!(" subgroup_witness={}", set(a, w)));
        }
    }
    let mut rows = vec![("orbit_vs_invariant_subgroups".to_string(), o.verdict, detail)];
    if let Some(c) = &r.rcf {
        let blocks: Vec<String> = c.rcf.blocks.iter().map(|b| format!("[{b}]")).collect();
        let roots: Vec<String> = c.eigenvalues.iter().map(u64::to_string).collect();
        let mut detail = format!(
            "char_poly={} blocks={} simple={} eigenvalues={{{}}} invariant_subspaces={}",
            c.char_poly,
            blocks.join(""),
            c.rcf.simple,
            roots.join(","),
            c.invariant_subspace_count
        );
        if let Some(w) = &c.witness_subspace {
            detail.push_str(&format!(" subspace_witness={}", span(w)));
        }
        rows.push(("simple_rcf_vs_invariant_subspaces".to_string(), c.verdict, detail));
    }
    rows
}

pub fn audit(ctx: &mut Ctx, group: &str, rule: &str) -> Outcome {
    let (g, ca) = load(ctx, group, rule)?;
    let r = lemma_audit(&g, &ca)?;
    ctx.report.row(&["lemma", "verdict", "detail"]);
    let rows = audit_rows(g.alphabet(), &r);
    for (lemma, v, detail) in &rows {
        ctx.report.row(&[lemma.clone(), v.to_string(), detail.clone()]);
    }
    Ok(rows.iter().all(|(_, v, _)| *v == Verdict::Agree))
}

