use qgca::format::print_table;
use qgca::quasigroup::MAX_EXHAUSTIVE_ORDER;

use super::{here, Ctx, Outcome};
use crate::report::set;

pub fn validate(ctx: &mut Ctx, table: &str) -> Outcome {
    let text = ctx.loader.table(table, here())?;
    let n = text.rows.len();
    match text.validate() {
        Ok(_) => {
            ctx.report.line(format!("LATIN OK N={n}"));
            Ok(true)
        }
        Err(e) => {
            ctx.report.line(format!("NOT LATIN N={n}: {e}"));
            Ok(false)
        }
    }
}

pub fn dual(ctx: &mut Ctx, table: &str) -> Outcome {
    let q = ctx.loader.quasigroup(table, here())?;
    ctx.report.line(print_table(&q.dual()).trim_end());
    Ok(true)
}

/// Lists subquasigroups; for small orders the subset oracle must agree.
pub fn sub(ctx: &mut Ctx, table: &str, include_trivial: bool) -> Outcome {
    let q = ctx.loader.quasigroup(table, here())?;
    let found = q.subquasigroups(include_trivial)?;
    ctx.report.row(&["size", "members"]);
    for s in &found {
        ctx.report.row(&[s.len().to_string(), set(q.alphabet(), &s.members)]);
    }
    if q.order() <= MAX_EXHAUSTIVE_ORDER && q.subquasigroups_exhaustive(include_trivial)? != found {
        eprintln!("subset oracle disagrees with the closure sweep");
        return Ok(false);
    }
    Ok(true)
}
