use std::sync::Arc;

use num_traits::Zero;
use qgca::measure::{
    block_entropy_exact, conditional_dist, coset_measure_check, example11, example11_group, example11_rule,
    fiber_spectrum, invariance_report, support_alphabet, Log2Form, Transform,
};
use qgca::{CylinderMeasure, GroupTable, Prob, Symbol};

use super::{here, parse_word, Ctx, Outcome};
use crate::error::CliError;
use crate::report::{rat, set, sig12, word};

fn load(ctx: &Ctx, measure: &str) -> Result<Arc<CylinderMeasure>, CliError> {
    Ok(Arc::new(ctx.loader.measure(measure, here())?))
}

pub fn eval(ctx: &mut Ctx, measure: &str, w: &[String]) -> Outcome {
    let m = load(ctx, measure)?;
    let w = parse_word(m.alphabet(), w)?;
    let mass = m.eval(&w)?;
    ctx.report.row(&["word", "mass"]);
    ctx.report.row(&[word(m.alphabet(), &w), rat(&mass)]);
    Ok(true)
}

/// Exact invariance under the shift, or under a CA when `ca` is given.
pub fn invariance(ctx: &mut Ctx, measure: &str, ca: Option<&str>) -> Outcome {
    let m = load(ctx, measure)?;
    let (name, transform) = match ca {
        Some(r) => ("ca", Transform::Ca(Arc::new(ctx.loader.qgca(r, here())?))),
        None => ("shift", Transform::Shift),
    };
    let depth = ctx.depth_or(4);
    let r = invariance_report(&m, &transform, depth)?;
    ctx.report.line(format!(
        "transform={name} depth={depth} max_dev={} worst_word=[{}]",
        rat(&r.max_abs_deviation),
        m.alphabet().format_word(&r.worst_word)
    ));
    Ok(r.max_abs_deviation.is_zero())
}

pub fn entropy(ctx: &mut Ctx, measure: &str) -> Outcome {
    let m = load(ctx, measure)?;
    ctx.report.row(&["n", "H_n", "increment", "H_n_exact", "increment_exact"]);
    let mut prev = Log2Form::zero();
    for n in 1..=ctx.depth_or(4) {
        let h = block_entropy_exact(&m, n)?;
        let inc = &h - &prev;
        ctx.report.row(&[n.to_string(), sig12(h.to_f64()), sig12(inc.to_f64()), h.to_string(), inc.to_string()]);
        prev = h;
    }
    Ok(true)
}

pub fn conditional(ctx: &mut Ctx, measure: &str, w: &[String]) -> Outcome {
    let m = load(ctx, measure)?;
    let w = parse_word(m.alphabet(), w)?;
    let dist = conditional_dist(&m, &w)?;
    ctx.report.row(&["symbol", "probability"]);
    for (s, p) in dist.iter().enumerate() {
        ctx.report.row(&[m.alphabet().name(s as Symbol).to_string(), rat(p)]);
    }
    Ok(true)
}

pub fn cmeasure(ctx: &mut Ctx, measure: &str, group: &str, subgroup: &[String]) -> Outcome {
    let m = load(ctx, measure)?;
    let g = ctx.loader.group(group, here())?;
    let c = parse_word(g.alphabet(), subgroup)?;
    let r = coset_measure_check(&m, &g, &c, ctx.depth_or(4), &ctx.mass_floor)?;
    ctx.report.row(&["field", "value"]);
    ctx.report.row(&["pass", &r.pass.to_string()]);
    ctx.report.row(&["subgroup".to_string(), set(g.alphabet(), &r.subgroup)]);
    ctx.report.row(&["depth".to_string(), r.depth.to_string()]);
    ctx.report.row(&["words_checked".to_string(), r.words_checked.to_string()]);
    ctx.report.row(&["shift_deviation".to_string(), rat(&r.shift_deviation)]);
    if let Some(f) = &r.first_failure {
        ctx.report.row(&["failure_word".to_string(), word(g.alphabet(), &f.word)]);
        ctx.report.row(&["failure_dist".to_string(), f.dist.iter().map(rat).collect::<Vec<_>>().join(" ")]);
        ctx.report.row(&["failure_reason", &f.reason]);
    }
    Ok(r.pass)
}

pub fn fibers(ctx: &mut Ctx, measure: &str, rule: &str) -> Outcome {
    let m = load(ctx, measure)?;
    let ca = Arc::new(ctx.loader.qgca(rule, here())?);
    let r = fiber_spectrum(&m, &ca, ctx.depth_or(3), &ctx.mass_floor)?;
    let eta = r.eta_constant.as_ref().map_or("none".to_string(), rat);
    ctx.report.line(format!(
        "# K={} eta={eta} entropy_check={} invariance_deviation={}",
        r.k_estimate,
        sig12(r.entropy_check),
        rat(&r.invariance_deviation)
    ));
    ctx.report.row(&["word", "total_mass", "support", "weights"]);
    for row in &r.rows {
        let weights: Vec<String> = row.weights.iter().map(rat).collect();
        ctx.report.row(&[
            word(m.alphabet(), &row.word),
            rat(&row.total_mass),
            row.support_count.to_string(),
            weights.join(" "),
        ]);
    }
    Ok(true)
}

pub fn support(ctx: &mut Ctx, measure: &str) -> Outcome {
    let m = load(ctx, measure)?;
    let r = support_alphabet(&m, ctx.depth_or(4))?;
    ctx.report.row(&["field", "value"]);
    ctx.report.row(&["symbols".to_string(), set(m.alphabet(), &r.symbols)]);
    ctx.report.row(&["full_shift_over_support", &r.full_shift_over_support.to_string()]);
    let zero = r.zero_mass_word.as_ref().map_or("none".to_string(), |w| word(m.alphabet(), w));
    ctx.report.row(&["zero_mass_word".to_string(), zero]);
    Ok(true)
}

/// One named check with its outcome.
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check { name: name.to_string(), pass, detail }
}

/// The full battery for `μ = Uniform(C) ⊗ Orbit(i j k)` on `C × Q`.
pub fn example11_checks(c: &GroupTable, depth: usize, mass_floor: &Prob) -> Result<Vec<Check>, CliError> {
    let m = Arc::new(example11(c));
    let g = example11_group(c);
    let ca = Arc::new(example11_rule(c));
    let mut out = Vec::new();

    let shift = invariance_report(&m, &Transform::Shift, depth)?.max_abs_deviation;
    out.push(check("shift_invariance", shift.is_zero(), format!("depth={depth} max_dev={}", rat(&shift))));
    let phi = invariance_report(&m, &Transform::Ca(ca.clone()), depth)?.max_abs_deviation;
    out.push(check("ca_invariance", phi.is_zero(), format!("depth={depth} max_dev={}", rat(&phi))));

    let target = Log2Form::log2_int(&c.order().into());
    let mut prev = block_entropy_exact(&m, 1)?;
    let mut increments = Vec::new();
    let mut exact = true;
    for k in 1..=depth {
        let next = block_entropy_exact(&m, k + 1)?;
        let inc = &next - &prev;
        exact &= inc == target;
        increments.push(inc.to_string());
        prev = next;
    }
    out.push(check(
        "entropy_increments",
        exact,
        format!("H(k+1)-H(k) for k=1..{depth}: {} target={target}", increments.join(",")),
    ));

    let identity_q = 0;
    let coset_c: Vec<Symbol> = (0..c.order() as Symbol).map(|x| x * 8 + identity_q).collect();
    let cr = coset_measure_check(&m, &g, &coset_c, depth, mass_floor)?;
    out.push(check(
        "coset_measure",
        cr.pass,
        format!("subgroup={} words_checked={}", set(g.alphabet(), &coset_c), cr.words_checked),
    ));

    let fr = fiber_spectrum(&m, &ca, depth, mass_floor)?;
    let half = Prob::new(1.into(), (c.order() as i64).into());
    let fiber_ok = fr.k_estimate == c.order()
        && fr.eta_constant.as_ref() == Some(&half)
        && fr.entropy_gap.is_zero()
        && fr.rows.iter().all(|r| r.weights.iter().all(|w| w.is_zero() || *w == half));
    out.push(check(
        "fiber_spectrum",
        fiber_ok,
        format!(
            "K={} eta={} entropy_check={} rows={}",
            fr.k_estimate,
            fr.eta_constant.as_ref().map_or("none".into(), rat),
            sig12(fr.entropy_check),
            fr.rows.len()
        ),
    ));

    let sr = support_alphabet(&m, depth)?;
    let mask = sr.symbols.iter().fold(0u64, |acc, &s| acc | 1 << s);
    let support_closed = g.quasigroup().is_closed(mask);
    out.push(check(
        "support",
        !sr.full_shift_over_support && !support_closed,
        format!(
            "symbols={} full_shift_over_support={} support_is_subquasigroup={support_closed}",
            set(g.alphabet(), &sr.symbols),
            sr.full_shift_over_support
        ),
    ));
    Ok(out)
}

pub fn example11_report(ctx: &mut Ctx, group: &str) -> Outcome {
    let c = ctx.loader.group(group, here())?;
    let checks = example11_checks(&c, ctx.depth_or(4), &ctx.mass_floor)?;
    ctx.report.row(&["check", "status", "detail"]);
    for ch in &checks {
        ctx.report.row(&[ch.name.as_str(), if ch.pass { "PASS" } else { "FAIL" }, &ch.detail]);
    }
    Ok(checks.iter().all(|c| c.pass))
}
