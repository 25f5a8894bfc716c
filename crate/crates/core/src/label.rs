use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::linalg::{FieldSpec, Scalar};

/// Linear combination of basis labels, sorted by label, without zero terms.
pub type Combination = Vec<(Label, Scalar)>;

/// Sums like terms of a label combination.
pub fn collect_terms<I>(terms: I, field: FieldSpec) -> Combination
where
    I: IntoIterator<Item = (Label, Scalar)>,
{
    let mut acc: BTreeMap<Label, Scalar> = BTreeMap::new();
    for (l, x) in terms {
        let slot = acc.entry(l).or_insert_with(Scalar::zero);
        *slot = field.add(slot, &x);
    }
    acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
}

/// Structured basis-vector label.
///
/// Component labels of graded structures are `Atom`, `Word` or `Dual`; tensor
/// monomials are flat `Tensor`s of those, with unit factors dropped.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    /// The idempotent `e_s`, basis of the block `(s, s)` of the base ring.
    Idem(u32),
    Atom(Arc<str>),
    /// Normal-form monomial of a quotient of a tensor ring.
    Word(Arc<[Label]>),
    Tensor(Arc<[Label]>),
    Dual(Arc<Label>),
}

impl Label {
    pub fn atom(s: impl AsRef<str>) -> Label {
        Label::Atom(Arc::from(s.as_ref()))
    }

    pub fn dual(&self) -> Label {
        Label::Dual(Arc::new(self.clone()))
    }

    /// Inner label of a dual, if any.
    pub fn undual(&self) -> Option<&Label> {
        match self {
            Label::Dual(x) => Some(x),
            _ => None,
        }
    }

    /// Tensor monomial of the given factors, flattened, with units dropped.
    pub fn tensor(parts: &[&Label]) -> Label {
        let mut flat: Vec<Label> = Vec::new();
        let mut unit = None;
        for p in parts {
            match p {
                Label::Idem(_) => unit = Some((*p).clone()),
                Label::Tensor(xs) => flat.extend(xs.iter().cloned()),
                other => flat.push((*other).clone()),
            }
        }
        match flat.len() {
            0 => unit.expect("tensor of no factors"),
            1 => flat.pop().expect("one factor"),
            _ => Label::Tensor(flat.into()),
        }
    }

    /// Factors of a tensor monomial; a unit has none.
    pub fn factors(&self) -> &[Label] {
        match self {
            Label::Tensor(xs) => xs,
            Label::Idem(_) => &[],
            other => std::slice::from_ref(other),
        }
    }

    /// Word letters, or the label itself for a generator.
    pub fn letters(&self) -> &[Label] {
        match self {
            Label::Word(xs) => xs,
            Label::Idem(_) => &[],
            other => std::slice::from_ref(other),
        }
    }

    /// Label with every dual-of-dual collapsed.
    pub fn strip_double_duals(&self) -> Label {
        match self {
            Label::Dual(x) => match x.as_ref() {
                Label::Dual(y) => y.strip_double_duals(),
                other => other.strip_double_duals().dual(),
            },
            Label::Tensor(xs) => Label::Tensor(xs.iter().map(Label::strip_double_duals).collect()),
            Label::Word(xs) => Label::Word(xs.iter().map(Label::strip_double_duals).collect()),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Idem(s) => write!(f, "1_{s}"),
            Label::Atom(a) => write!(f, "{a}"),
            Label::Word(xs) => join(f, xs, "·"),
            Label::Tensor(xs) => join(f, xs, "⊗"),
            Label::Dual(x) => match x.as_ref() {
                Label::Atom(a) if a.starts_with("e[") => write!(f, "f{}", &a[1..]),
                other => write!(f, "f_({other})"),
            },
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn join(f: &mut fmt::Formatter<'_>, xs: &[Label], sep: &str) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}
