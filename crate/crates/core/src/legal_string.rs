//! Pointers, legal strings and the string-level operations on them.
//!
//! Text format: tokens separated by any mix of whitespace and commas, each
//! token an optional `-` (barred) followed by a decimal label `>= 2`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Unbarred pointer label. Always `>= 2`.
pub type Label = u32;

/// Smallest admissible label.
pub const MIN_LABEL: Label = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LegalStringError {
    #[error("malformed token {0:?}: expected an optional '-' followed by an integer >= 2")]
    MalformedToken(String),
    #[error("not a legal string: label {label} occurs {count} time(s)")]
    NotLegal { label: Label, count: usize },
    #[error("label {0} does not occur in the string")]
    LabelAbsent(Label),
    #[error("labels must be distinct, got {0} twice")]
    SameLabel(Label),
    #[error("invalid label {0}: labels start at 2")]
    InvalidLabel(u32),
}

/// A pointer: a label together with its polarity.
///
/// Ordering is by label first, unbarred before barred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pointer {
    label: Label,
    barred: bool,
}

impl Pointer {
    pub fn new(label: Label, barred: bool) -> Result<Self, LegalStringError> {
        if label < MIN_LABEL {
            return Err(LegalStringError::InvalidLabel(label));
        }
        Ok(Pointer { label, barred })
    }

    /// Unbarred pointer. Panics on labels below 2.
    pub fn plain(label: Label) -> Self {
        Self::new(label, false).expect("pointer label must be >= 2")
    }

    /// Barred pointer. Panics on labels below 2.
    pub fn inverted(label: Label) -> Self {
        Self::new(label, true).expect("pointer label must be >= 2")
    }

    pub fn label(self) -> Label {
        self.label
    }

    pub fn is_barred(self) -> bool {
        self.barred
    }

    /// Flips polarity.
    pub fn bar(self) -> Self {
        Pointer {
            label: self.label,
            barred: !self.barred,
        }
    }

    /// The unbarred variant.
    pub fn unbarred(self) -> Self {
        Pointer {
            label: self.label,
            barred: false,
        }
    }
}

impl fmt::Display for Pointer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.barred {
            write!(f, "-{}", self.label)
        } else {
            write!(f, "{}", self.label)
        }
    }
}

impl FromStr for Pointer {
    type Err = LegalStringError;

    fn from_str(token: &str) -> Result<Self, Self::Err> {
        let malformed = || LegalStringError::MalformedToken(token.to_string());
        let (barred, digits) = match token.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, token),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let label: Label = digits.parse().map_err(|_| malformed())?;
        Pointer::new(label, barred).map_err(|_| malformed())
    }
}

/// Bar operator as a free function.
pub fn bar(p: Pointer) -> Pointer {
    p.bar()
}

fn write_pointers(f: &mut fmt::Formatter<'_>, items: &[Pointer]) -> fmt::Result {
    for (i, p) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{p}")?;
    }
    Ok(())
}

fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
}

/// An arbitrary (not necessarily legal) string of pointers.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PointerString(Vec<Pointer>);

impl PointerString {
    pub fn new(items: Vec<Pointer>) -> Self {
        PointerString(items)
    }

    pub fn as_slice(&self) -> &[Pointer] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Pointer> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `x̄ₙ ⋯ x̄₁` for `x₁ ⋯ xₙ`.
    pub fn inverse(&self) -> PointerString {
        PointerString(inverse_of(&self.0))
    }

    pub fn domain(&self) -> BTreeSet<Label> {
        domain_of(&self.0)
    }
}

impl From<Vec<Pointer>> for PointerString {
    fn from(items: Vec<Pointer>) -> Self {
        PointerString(items)
    }
}

impl fmt::Display for PointerString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pointers(f, &self.0)
    }
}

impl FromStr for PointerString {
    type Err = LegalStringError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        tokens(text)
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()
            .map(PointerString)
    }
}

pub(crate) fn inverse_of(items: &[Pointer]) -> Vec<Pointer> {
    items.iter().rev().map(|p| p.bar()).collect()
}

fn domain_of(items: &[Pointer]) -> BTreeSet<Label> {
    items.iter().map(|p| p.label()).collect()
}

/// A string in which every occurring label appears exactly twice, counting
/// both polarities.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Pointer>", into = "Vec<Pointer>")]
pub struct LegalString(Vec<Pointer>);

impl LegalString {
    pub fn new(items: Vec<Pointer>) -> Result<Self, LegalStringError> {
        let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
        for p in &items {
            *counts.entry(p.label()).or_default() += 1;
        }
        if let Some((&label, &count)) = counts.iter().find(|(_, &c)| c != 2) {
            return Err(LegalStringError::NotLegal { label, count });
        }
        Ok(LegalString(items))
    }

    /// The empty legal string λ.
    pub fn empty() -> Self {
        LegalString(Vec::new())
    }

    /// Callers guarantee legality (rule templates and erasure preserve it).
    pub(crate) fn from_vec_unchecked(items: Vec<Pointer>) -> Self {
        debug_assert!(LegalString::new(items.clone()).is_ok());
        LegalString(items)
    }

    pub fn as_slice(&self) -> &[Pointer] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_pointer_string(&self) -> PointerString {
        PointerString(self.0.clone())
    }

    pub fn domain(&self) -> BTreeSet<Label> {
        domain_of(&self.0)
    }

    pub fn contains_label(&self, label: Label) -> bool {
        self.0.iter().any(|p| p.label() == label)
    }

    /// Positions (0-based, ascending) of the two occurrences of `label`.
    pub fn occurrences(&self, label: Label) -> Option<(usize, usize)> {
        let mut it = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, p)| p.label() == label)
            .map(|(i, _)| i);
        match (it.next(), it.next()) {
            (Some(i), Some(j)) => Some((i, j)),
            _ => None,
        }
    }

    fn occurrences_or_absent(&self, label: Label) -> Result<(usize, usize), LegalStringError> {
        self.occurrences(label)
            .ok_or(LegalStringError::LabelAbsent(label))
    }

    /// Substring from the first to the second occurrence of `label`, inclusive.
    pub fn p_interval(&self, label: Label) -> Result<PointerString, LegalStringError> {
        let (i, j) = self.occurrences_or_absent(label)?;
        Ok(PointerString(self.0[i..=j].to_vec()))
    }

    /// Whether each label occurs inside the other's interval.
    pub fn overlap(&self, p: Label, q: Label) -> Result<bool, LegalStringError> {
        if p == q {
            return Err(LegalStringError::SameLabel(p));
        }
        let (pi, pj) = self.occurrences_or_absent(p)?;
        let (qi, qj) = self.occurrences_or_absent(q)?;
        let inside = |lo: usize, hi: usize, x: usize| lo <= x && x <= hi;
        let q_in_p = inside(pi, pj, qi) || inside(pi, pj, qj);
        let p_in_q = inside(qi, qj, pi) || inside(qi, qj, pj);
        Ok(q_in_p && p_in_q)
    }

    /// True iff both polarities of `label` occur.
    pub fn is_positive(&self, label: Label) -> Result<bool, LegalStringError> {
        let (i, j) = self.occurrences_or_absent(label)?;
        Ok(self.0[i].is_barred() != self.0[j].is_barred())
    }

    /// Erases every occurrence of the labels in `labels`; absent labels are
    /// ignored.
    pub fn remove_pointers(&self, labels: &BTreeSet<Label>) -> LegalString {
        LegalString(
            self.0
                .iter()
                .copied()
                .filter(|p| !labels.contains(&p.label()))
                .collect(),
        )
    }

    /// True iff `p p` occurs as a substring.
    pub fn has_adjacent_pair(&self, p: Pointer) -> bool {
        self.0.windows(2).any(|w| w[0] == p && w[1] == p)
    }
}

impl TryFrom<Vec<Pointer>> for LegalString {
    type Error = LegalStringError;

    fn try_from(items: Vec<Pointer>) -> Result<Self, Self::Error> {
        LegalString::new(items)
    }
}

impl From<LegalString> for Vec<Pointer> {
    fn from(u: LegalString) -> Self {
        u.0
    }
}

impl fmt::Display for LegalString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pointers(f, &self.0)
    }
}

impl FromStr for LegalString {
    type Err = LegalStringError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse_legal_string(text)
    }
}

pub fn parse_legal_string(text: &str) -> Result<LegalString, LegalStringError> {
    let items: PointerString = text.parse()?;
    LegalString::new(items.0)
}

/// Space-separated rendering; barred pointers carry a leading minus.
pub fn render(u: &PointerString) -> String {
    u.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(s: &str) -> LegalString {
        s.parse().unwrap()
    }

    fn set(xs: &[Label]) -> BTreeSet<Label> {
        xs.iter().copied().collect()
    }

    const RUNNING: &str = "5 4 3 7 2 5 6 2 -7 3 4 6";
    const SMALL: &str = "-4 3 7 -7 -4 3";

    #[test]
    fn parses_running_example() {
        let u = ls(RUNNING);
        assert_eq!(u.len(), 12);
        assert_eq!(u.as_slice()[8], Pointer::inverted(7));
        assert_eq!(u.to_string(), RUNNING);
    }

    #[test]
    fn parse_accepts_commas_and_blank() {
        assert_eq!(ls(""), LegalString::empty());
        assert_eq!(ls("  \n "), LegalString::empty());
        assert_eq!(ls("2,-2"), ls("2 -2"));
        assert_eq!(ls(" 3 ,\t3 "), ls("3 3"));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            "4 2 4".parse::<LegalString>(),
            Err(LegalStringError::NotLegal { label: 2, count: 1 })
        );
        assert!(matches!(
            "1 1".parse::<LegalString>(),
            Err(LegalStringError::MalformedToken(_))
        ));
        assert!(matches!(
            "x y".parse::<LegalString>(),
            Err(LegalStringError::MalformedToken(_))
        ));
        assert!(matches!(
            "--2 2".parse::<LegalString>(),
            Err(LegalStringError::MalformedToken(_))
        ));
        assert!(matches!(
            "2 2 2".parse::<LegalString>(),
            Err(LegalStringError::NotLegal { label: 2, count: 3 })
        ));
    }

    #[test]
    fn render_formats() {
        assert_eq!(render(&PointerString::default()), "");
        let s = PointerString::new(vec![Pointer::inverted(4), Pointer::plain(3)]);
        assert_eq!(render(&s), "-4 3");
        assert_eq!(ls(SMALL).to_string(), SMALL);
    }

    #[test]
    fn bar_flips() {
        assert_eq!(bar(Pointer::plain(7)), Pointer::inverted(7));
        assert_eq!(bar(Pointer::inverted(7)), Pointer::plain(7));
        assert_eq!(bar(bar(Pointer::plain(2))), Pointer::plain(2));
        assert!(Pointer::new(1, false).is_err());
    }

    #[test]
    fn inverse_examples() {
        let u: PointerString = SMALL.parse().unwrap();
        assert_eq!(u.inverse().to_string(), "-3 4 7 -7 -3 4");
        assert_eq!(PointerString::default().inverse(), PointerString::default());
        let one: PointerString = "2".parse().unwrap();
        assert_eq!(one.inverse().to_string(), "-2");
    }

    #[test]
    fn domain_examples() {
        assert_eq!(ls(SMALL).domain(), set(&[3, 4, 7]));
        assert!(LegalString::empty().domain().is_empty());
        assert_eq!(ls(RUNNING).domain(), set(&[2, 3, 4, 5, 6, 7]));
    }

    #[test]
    fn intervals() {
        let u = ls(SMALL);
        assert_eq!(u.p_interval(3).unwrap().to_string(), "3 7 -7 -4 3");
        assert_eq!(u.p_interval(7).unwrap().to_string(), "7 -7");
        assert_eq!(u.p_interval(5), Err(LegalStringError::LabelAbsent(5)));
    }

    #[test]
    fn overlaps() {
        let u = ls(SMALL);
        assert_eq!(u.overlap(3, 4), Ok(true));
        assert_eq!(u.overlap(4, 3), Ok(true));
        // the 7-interval "7 -7" holds no 3
        assert_eq!(u.overlap(3, 7), Ok(false));
        assert_eq!(u.overlap(3, 3), Err(LegalStringError::SameLabel(3)));
        assert_eq!(u.overlap(3, 9), Err(LegalStringError::LabelAbsent(9)));
    }

    #[test]
    fn positivity() {
        let u = ls(SMALL);
        assert_eq!(u.is_positive(7), Ok(true));
        assert_eq!(u.is_positive(3), Ok(false));
        assert_eq!(u.is_positive(4), Ok(false));
        assert_eq!(
            LegalString::empty().is_positive(2),
            Err(LegalStringError::LabelAbsent(2))
        );
    }

    #[test]
    fn pointer_removal() {
        let u = ls(RUNNING);
        assert_eq!(
            u.remove_pointers(&set(&[4, 6, 7, 9])).to_string(),
            "5 3 2 5 2 3"
        );
        assert_eq!(u.remove_pointers(&BTreeSet::new()), u);
        assert_eq!(
            u.remove_pointers(&set(&[2, 7])).to_string(),
            "5 4 3 5 6 3 4 6"
        );
    }

    #[test]
    fn serde_rejects_illegal() {
        let u = ls(SMALL);
        let json = serde_json::to_string(&u).unwrap();
        assert_eq!(serde_json::from_str::<LegalString>(&json).unwrap(), u);
        assert!(serde_json::from_str::<LegalString>(r#"[{"label":2,"barred":false}]"#).is_err());
    }
}
