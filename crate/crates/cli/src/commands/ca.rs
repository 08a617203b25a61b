use qgca::format::print_rule;
use qgca::Qgca;

use super::{here, parse_word, Ctx, Outcome};
use crate::error::CliError;
use crate::report::word;

pub fn step(ctx: &mut Ctx, rule: &str, w: &[String], steps: usize) -> Outcome {
    let rule = ctx.loader.rule(rule, here())?;
    let a = rule.alphabet().clone();
    let mut current = parse_word(&a, w)?;
    ctx.report.row(&["t", "word"]);
    ctx.report.row(&["0".to_string(), word(&a, &current)]);
    for t in 1..=steps {
        current = rule.step(&current)?;
        ctx.report.row(&[t.to_string(), word(&a, &current)]);
    }
    Ok(true)
}

/// Orbit of the periodic configuration `w^∞`.
pub fn orbit(ctx: &mut Ctx, rule: &str, w: &[String]) -> Outcome {
    let rule = ctx.loader.rule(rule, here())?;
    let period = parse_word(rule.alphabet(), w)?;
    let (preperiod, length) = rule.orbit_period(&period)?;
    ctx.report.line(format!("preperiod={preperiod} period={length}"));
    Ok(true)
}

fn qgca(ctx: &Ctx, rule: &str) -> Result<Qgca, CliError> {
    Ok(ctx.loader.qgca(rule, here())?)
}

pub fn fiber(ctx: &mut Ctx, rule: &str, w: &[String]) -> Outcome {
    let ca = qgca(ctx, rule)?;
    let a = ca.rule().alphabet().clone();
    let image = parse_word(&a, w)?;
    ctx.report.row(&["first", "preimage"]);
    let mut ok = true;
    for pre in ca.fiber_preimages(&image)? {
        ok &= ca.step(&pre)? == image;
        ctx.report.row(&[a.name(pre[0]).to_string(), word(&a, &pre)]);
    }
    Ok(ok)
}

pub fn xi(ctx: &mut Ctx, rule: &str, w: &[String], inverse: bool) -> Outcome {
    let ca = qgca(ctx, rule)?;
    let a = ca.rule().alphabet().clone();
    let input = parse_word(&a, w)?;
    let out = if inverse { ca.xi_inverse(&input)? } else { ca.xi(&input)? };
    ctx.report.line(word(&a, &out));
    Ok(true)
}

pub fn dual(ctx: &mut Ctx, rule: &str) -> Outcome {
    let ca = qgca(ctx, rule)?;
    ctx.report.line(print_rule(ca.dual().rule()).trim_end());
    Ok(true)
}

/// Prints the nearest-neighbour block recoding, optionally encoding a word.
pub fn recode(ctx: &mut Ctx, rule: &str, w: &[String]) -> Outcome {
    let rule = ctx.loader.rule(rule, here())?;
    let recoding = rule.recode_block()?;
    if w.is_empty() {
        ctx.report.line(format!("# block_len={}", recoding.block_len));
        ctx.report.line(print_rule(&recoding.gamma).trim_end());
    } else {
        let input = parse_word(rule.alphabet(), w)?;
        let blocks = recoding.encode(&input);
        ctx.report.line(word(recoding.gamma.alphabet(), &blocks));
    }
    Ok(true)
}
