//! Type checking for the underlying and refinement layers.

pub mod check;
pub mod judgement;

pub use check::{
    check_signature, collected, render_env, Check, CheckError, Checker, Layer, Signature, SubtypeRecord, E_INTERP,
    E_MU, E_SUBTYPE, E_TYPE, E_WF,
};
pub use judgement::{Derivation, Judgement};

use reftc_interp::ModelEnv;
use reftc_lang::{Erase, Item, Pos, Program};

/// The result of checking one `def` or `check` item.
#[derive(Clone, Debug)]
pub struct ItemResult {
    pub name: String,
    pub pos: Pos,
    pub outcome: Result<Derivation, CheckError>,
    /// For the refinement layer, the derivation of the erased item.
    pub erased: Option<Derivation>,
}

#[derive(Clone, Debug, Default)]
pub struct ProgramReport {
    pub items: Vec<ItemResult>,
    pub subtypes: Vec<SubtypeRecord>,
}

impl ProgramReport {
    pub fn ok(&self) -> bool {
        self.items.iter().all(|i| i.outcome.is_ok())
    }

    pub fn first_error(&self) -> Option<&CheckError> {
        self.items.iter().find_map(|i| i.outcome.as_ref().err())
    }
}

/// Checks every `def` and `check` item of `prog`. In the refinement layer the
/// erasure of each item is checked in the underlying layer first.
pub fn check_program(prog: &Program, sig: &Signature, model: &ModelEnv, layer: Layer) -> ProgramReport {
    let mut report = ProgramReport::default();
    for d in &prog.decls {
        let (name, run): (&str, Box<dyn Fn(&mut Checker, bool) -> Check<Derivation>>) = match &d.item {
            Item::Def { name, ctx, ty, term } => (
                name,
                Box::new(move |ck, erase| {
                    if erase {
                        ck.check_def(&ctx.erase(), &ty.erase(), &term.erase(), d.pos)
                    } else {
                        ck.check_def(ctx, ty, term, d.pos)
                    }
                }),
            ),
            Item::Check { name, ctx, lhs, rhs } => (
                name,
                Box::new(move |ck, erase| {
                    if erase {
                        ck.check_assertion(&ctx.erase(), &lhs.erase(), &rhs.erase(), d.pos)
                    } else {
                        ck.check_assertion(ctx, lhs, rhs, d.pos)
                    }
                }),
            ),
            _ => continue,
        };
        let mut erased = None;
        let outcome = match layer {
            Layer::Underlying => run(&mut Checker::new(sig, model, Layer::Underlying), true),
            Layer::Refinement => match run(&mut Checker::new(sig, model, Layer::Underlying), true) {
                Err(e) => Err(e),
                Ok(u) => {
                    erased = Some(u);
                    let mut ck = Checker::new(sig, model, Layer::Refinement);
                    let out = run(&mut ck, false);
                    report.subtypes.extend(ck.take_log());
                    out
                }
            },
        };
        report.items.push(ItemResult { name: name.to_string(), pos: d.pos, outcome, erased });
    }
    report
}
