//! The model environment: denotations of base types, constants and
//! predicates, plus the chosen monad and predicate lifting.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use reftc_core::effect::{LiftedMonad, LiftingKind, MonadKind, PredLifting};
use reftc_core::kernel::comprehend;
use reftc_core::{Atom, Carrier, Family, Pred};
use reftc_lang::ops::is_underlying;
use reftc_lang::{CarrierSpec, Den, Erase, Item, Pos, Program, Type, VType};

use crate::error::{InterpError, ModelError, Result};

#[derive(Clone, Debug)]
pub struct BaseDen {
    pub arg: VType,
    /// `⟦⋄; A⟧`, a family over the one-point carrier.
    pub arg_family: Family,
    /// `⟦b⟧`, a family over `{⟦⋄; A⟧}`.
    pub family: Family,
}

#[derive(Clone, Debug)]
pub struct ConstDen {
    pub pos: Pos,
    pub ty: VType,
    pub atom: Atom,
}

#[derive(Clone, Debug)]
pub struct PredDen {
    pub arg: VType,
    pub arg_family: Family,
    /// `⟦a⟧`, a predicate over `{⟦⋄; A⟧}`.
    pub pred: Pred,
}

pub struct ModelEnv {
    pub lifting: PredLifting,
    pub lifted: LiftedMonad,
    pub(crate) bases: BTreeMap<String, BaseDen>,
    pub(crate) consts: BTreeMap<String, ConstDen>,
    pub(crate) preds: BTreeMap<String, PredDen>,
    pub(crate) families: Mutex<HashMap<(Carrier, Type), Family>>,
}

/// Registering a lifting runs its soundness gate once per process.
fn lifted_monad(lifting: PredLifting) -> Result<LiftedMonad> {
    static REGISTERED: OnceLock<Mutex<HashMap<PredLifting, LiftedMonad>>> = OnceLock::new();
    let table = REGISTERED.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(l) = table.lock().expect("lifting table").get(&lifting) {
        return Ok(*l);
    }
    let l = LiftedMonad::new(lifting)?;
    table.lock().expect("lifting table").insert(lifting, l);
    Ok(l)
}

impl ModelEnv {
    /// An environment with no signature.
    pub fn empty(monad: MonadKind, lifting: LiftingKind) -> Result<ModelEnv> {
        let lifting = PredLifting::new(monad, lifting)?;
        Ok(ModelEnv {
            lifting,
            lifted: lifted_monad(lifting)?,
            bases: BTreeMap::new(),
            consts: BTreeMap::new(),
            preds: BTreeMap::new(),
            families: Mutex::new(HashMap::new()),
        })
    }

    pub fn monad(&self) -> MonadKind {
        self.lifting.monad
    }

    /// Reads the base types, constants and predicates of `prog`. Constant
    /// denotations are resolved but not yet checked against their types; see
    /// [`ModelEnv::validate_constants`].
    pub fn load(prog: &Program, monad: MonadKind, lifting: LiftingKind) -> Result<ModelEnv, ModelError> {
        let mut env = ModelEnv::empty(monad, lifting).map_err(|e| ModelError::new(Pos::default(), e.to_string()))?;
        for d in &prog.decls {
            let fail = |msg: String| ModelError::new(d.pos, msg);
            match &d.item {
                Item::BaseType { name, arg, carrier } => {
                    if !is_underlying(arg) {
                        return Err(fail(format!("the argument type of `{name}` must not be refined")));
                    }
                    let arg_family = env.vfamily(&Carrier::unit(), arg).map_err(|e| fail(e.to_string()))?;
                    let total = comprehend(&arg_family).total;
                    let mut fibres: BTreeMap<Atom, Carrier> = BTreeMap::new();
                    match carrier {
                        CarrierSpec::Flat(atoms) => {
                            let set = env.resolve_all(atoms).map_err(fail)?;
                            fibres.insert(Atom::pair(Atom::Unit, Atom::Unit), Carrier::named(name, set));
                        }
                        CarrierSpec::Indexed(entries) => {
                            for (k, atoms) in entries {
                                let key = Atom::pair(Atom::Unit, env.resolve(k).map_err(fail)?);
                                if !total.contains(&key) {
                                    return Err(fail(format!("`{name}` is indexed by {} which is not an argument", key.snd().unwrap())));
                                }
                                let set = env.resolve_all(atoms).map_err(fail)?;
                                if fibres.insert(key.clone(), Carrier::new(set)).is_some() {
                                    return Err(fail(format!("`{name}` lists the argument {} twice", key.snd().unwrap())));
                                }
                            }
                        }
                    }
                    let mut list = Vec::new();
                    for i in total.iter() {
                        match fibres.remove(i) {
                            Some(c) => list.push(c),
                            None => return Err(fail(format!("`{name}` has no carrier at argument {}", i.snd().unwrap()))),
                        }
                    }
                    if let Some(extra) = fibres.keys().next() {
                        return Err(fail(format!("`{name}` has a carrier at {extra} which is not an argument")));
                    }
                    let family = Family::new(&total, list).map_err(|e| fail(e.to_string()))?;
                    env.bases.insert(name.clone(), BaseDen { arg: arg.clone(), arg_family, family });
                }
                Item::Const { name, ty, den } => {
                    let atom = env.resolve(den).map_err(fail)?;
                    env.consts.insert(name.clone(), ConstDen { pos: d.pos, ty: ty.clone(), atom });
                }
                Item::Pred { name, arg, den } => {
                    if !is_underlying(arg) {
                        return Err(fail(format!("the argument type of `{name}` must not be refined")));
                    }
                    let arg_family = env.vfamily(&Carrier::unit(), arg).map_err(|e| fail(e.to_string()))?;
                    let total = comprehend(&arg_family).total;
                    let mut members = Vec::new();
                    for a in env.resolve_all(den).map_err(fail)? {
                        let key = Atom::pair(Atom::Unit, a);
                        if !total.contains(&key) {
                            return Err(fail(format!("`{name}` holds of {} which is outside its argument type", key.snd().unwrap())));
                        }
                        members.push(key);
                    }
                    let pred = Pred::new(&total, members).map_err(|e| fail(e.to_string()))?;
                    env.preds.insert(name.clone(), PredDen { arg: arg.clone(), arg_family, pred });
                }
                Item::Def { .. } | Item::Check { .. } | Item::Monad { .. } => {}
            }
        }
        Ok(env)
    }

    /// Checks `⟦c⟧ ∈ ⟦⋄; ty(c)⟧` in the refined sense for every constant. The
    /// types must already be well formed.
    pub fn validate_constants(&self) -> Result<(), ModelError> {
        for (name, c) in &self.consts {
            let fail = |msg: String| ModelError::new(c.pos, msg);
            let unit = Carrier::unit();
            let under = self.vfamily(&unit, &c.ty.erase()).map_err(|e| fail(e.to_string()))?;
            if !under.fibre(&Atom::Unit).expect("one-point base").contains(&c.atom) {
                return Err(fail(format!("constant `{name}` denotes {} which is not an element of its type", c.atom)));
            }
            let obj = self.vrefined(&unit, &Pred::top(&unit), &c.ty).map_err(|e| fail(e.to_string()))?;
            if !obj.q().contains(&Atom::pair(Atom::Unit, c.atom.clone())) {
                return Err(fail(format!("constant `{name}` denotes {} which violates its refinement", c.atom)));
            }
        }
        Ok(())
    }

    pub fn base(&self, name: &str) -> Result<&BaseDen> {
        self.bases.get(name).ok_or_else(|| InterpError::ModelIncomplete(format!("base type `{name}`")))
    }

    pub fn constant(&self, name: &str) -> Result<&ConstDen> {
        self.consts.get(name).ok_or_else(|| InterpError::ModelIncomplete(format!("constant `{name}`")))
    }

    pub fn predicate(&self, name: &str) -> Result<&PredDen> {
        self.preds.get(name).ok_or_else(|| InterpError::ModelIncomplete(format!("predicate `{name}`")))
    }

    pub fn base_types(&self) -> impl Iterator<Item = (&String, &BaseDen)> {
        self.bases.iter()
    }

    pub fn constants(&self) -> impl Iterator<Item = (&String, &ConstDen)> {
        self.consts.iter()
    }

    fn resolve_all(&self, ds: &[Den]) -> Result<Vec<Atom>, String> {
        ds.iter().map(|d| self.resolve(d)).collect()
    }

    /// Resolves a model atom; `ret` and `bot` use the active monad.
    pub fn resolve(&self, d: &Den) -> Result<Atom, String> {
        let m = self.monad();
        Ok(match d {
            Den::Int(n) => Atom::int(*n),
            Den::Sym(s) => Atom::sym(s),
            Den::Unit => Atom::Unit,
            Den::Star => Atom::Star,
            Den::Pair(a, b) => Atom::pair(self.resolve(a)?, self.resolve(b)?),
            Den::Inl(a) => Atom::inl(self.resolve(a)?),
            Den::Inr(a) => Atom::inr(self.resolve(a)?),
            Den::Just(a) => Atom::just(self.resolve(a)?),
            Den::Set(xs) => Atom::set(self.resolve_all(xs)?),
            Den::Fun(g) => Atom::fun(
                g.iter().map(|(a, b)| Ok((self.resolve(a)?, self.resolve(b)?))).collect::<Result<Vec<_>, String>>()?,
            ),
            Den::Ret(a) => m.unit_atom(self.resolve(a)?),
            Den::Bot => m.bottom().ok_or_else(|| format!("`(bot)` has no meaning under the {m} monad"))?,
        })
    }
}
