use core::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderKind {
    GradedLex,
    GradedReverseLex,
    Lex,
}

/// A monomial order on `N^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub dim: usize,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, dim: usize) -> Self {
        Self { kind, dim }
    }

    pub fn compare(&self, a: &[i64], b: &[i64]) -> Ordering {
        debug_assert!(a.len() == self.dim && b.len() == self.dim);
        let lex = || a.iter().cmp(b.iter());
        let total = |x: &[i64]| x.iter().sum::<i64>();
        match self.kind {
            OrderKind::Lex => lex(),
            OrderKind::GradedLex => total(a).cmp(&total(b)).then_with(lex),
            // Equal degrees: a < b when the last nonzero entry of a - b is positive.
            OrderKind::GradedReverseLex => total(a).cmp(&total(b)).then_with(|| {
                match a.iter().zip(b).rev().find(|(x, y)| x != y) {
                    Some((x, y)) if x > y => Ordering::Less,
                    Some(_) => Ordering::Greater,
                    None => Ordering::Equal,
                }
            }),
        }
    }

    /// Sorts exponents ascending.
    pub fn sort(&self, v: &mut [alloc::vec::Vec<i64>]) {
        v.sort_by(|a, b| self.compare(a, b));
    }
}
