//! Atoms: the elements of every finite carrier.
//!
//! Carriers built by the kernel are never raw sets of integers: comprehension
//! produces pairs, coproducts produce tagged values, dependent products produce
//! function graphs and monads produce their own shapes. All of them are
//! represented by one totally ordered [`Atom`] type so that every carrier has
//! a canonical (sorted) enumeration and equality is structural.

use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// The unique element of the terminal set.
    Unit,
    Int(i64),
    Sym(Arc<str>),
    Pair(Arc<(Atom, Atom)>),
    Inl(Arc<Atom>),
    Inr(Arc<Atom>),
    /// The non-divergent case of the maybe monad.
    Just(Arc<Atom>),
    /// The distinguished element added by the maybe monad.
    Star,
    /// A finite subset, sorted and without duplicates.
    Set(Arc<[Atom]>),
    /// A finite function graph, sorted by argument.
    Fun(Arc<[(Atom, Atom)]>),
}

impl Atom {
    pub fn int(n: i64) -> Atom {
        Atom::Int(n)
    }

    pub fn sym(s: &str) -> Atom {
        Atom::Sym(Arc::from(s))
    }

    pub fn pair(a: Atom, b: Atom) -> Atom {
        Atom::Pair(Arc::new((a, b)))
    }

    pub fn inl(a: Atom) -> Atom {
        Atom::Inl(Arc::new(a))
    }

    pub fn inr(a: Atom) -> Atom {
        Atom::Inr(Arc::new(a))
    }

    pub fn just(a: Atom) -> Atom {
        Atom::Just(Arc::new(a))
    }

    pub fn set(elems: impl IntoIterator<Item = Atom>) -> Atom {
        let mut v: Vec<Atom> = elems.into_iter().collect();
        v.sort();
        v.dedup();
        Atom::Set(v.into())
    }

    /// Builds a function graph; later entries for the same argument are ignored.
    pub fn fun(graph: impl IntoIterator<Item = (Atom, Atom)>) -> Atom {
        let mut v: Vec<(Atom, Atom)> = graph.into_iter().collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v.dedup_by(|a, b| a.0 == b.0);
        Atom::Fun(v.into())
    }

    pub fn as_pair(&self) -> Option<(&Atom, &Atom)> {
        match self {
            Atom::Pair(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }

    pub fn fst(&self) -> Option<&Atom> {
        self.as_pair().map(|p| p.0)
    }

    pub fn snd(&self) -> Option<&Atom> {
        self.as_pair().map(|p| p.1)
    }

    /// Applies a function graph.
    pub fn apply(&self, arg: &Atom) -> Option<&Atom> {
        match self {
            Atom::Fun(g) => g
                .binary_search_by(|(k, _)| k.cmp(arg))
                .ok()
                .map(|i| &g[i].1),
            _ => None,
        }
    }

    pub fn set_elems(&self) -> Option<&[Atom]> {
        match self {
            Atom::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn graph(&self) -> Option<&[(Atom, Atom)]> {
        match self {
            Atom::Fun(g) => Some(g),
            _ => None,
        }
    }
}

impl From<i64> for Atom {
    fn from(n: i64) -> Atom {
        Atom::Int(n)
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Atom {
        Atom::sym(s)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Unit => write!(f, "()"),
            Atom::Int(n) => write!(f, "{n}"),
            Atom::Sym(s) => write!(f, "{s}"),
            Atom::Pair(p) => write!(f, "({}, {})", p.0, p.1),
            Atom::Inl(a) => write!(f, "inl({a})"),
            Atom::Inr(a) => write!(f, "inr({a})"),
            Atom::Just(a) => write!(f, "just({a})"),
            Atom::Star => write!(f, "*"),
            Atom::Set(s) => {
                write!(f, "{{")?;
                for (i, a) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "}}")
            }
            Atom::Fun(g) => {
                write!(f, "[")?;
                for (i, (a, b)) in g.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a} -> {b}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_order_lexicographically() {
        let a = Atom::pair(Atom::int(0), Atom::int(5));
        let b = Atom::pair(Atom::int(1), Atom::int(0));
        assert!(a < b);
    }

    #[test]
    fn fun_graph_is_canonical() {
        let f = Atom::fun([(Atom::int(1), Atom::int(0)), (Atom::int(0), Atom::int(1))]);
        let g = Atom::fun([(Atom::int(0), Atom::int(1)), (Atom::int(1), Atom::int(0))]);
        assert_eq!(f, g);
        assert_eq!(f.apply(&Atom::int(1)), Some(&Atom::int(0)));
        assert_eq!(f.apply(&Atom::int(7)), None);
    }

    #[test]
    fn display_is_readable() {
        let a = Atom::pair(Atom::Unit, Atom::set([Atom::int(2), Atom::int(1)]));
        assert_eq!(a.to_string(), "((), {1, 2})");
        assert_eq!(Atom::fun([]).to_string(), "[]");
    }
}
