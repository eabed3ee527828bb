use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::okounkov::{echelon_by_order, MonomialOrder, SemigroupSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variety {
    P1,
    P2,
}

impl Variety {
    /// Complex dimension.
    pub fn dim(self) -> usize {
        match self {
            Variety::P1 => 1,
            Variety::P2 => 2,
        }
    }

    /// Number of homogeneous coordinates.
    pub fn coords(self) -> usize {
        self.dim() + 1
    }

    /// `dim H^0(O(n))`.
    pub fn rank(self, n: usize) -> usize {
        match self {
            Variety::P1 => n + 1,
            Variety::P2 => (n + 1) * (n + 2) / 2,
        }
    }
}

/// `H^0(X, O(n))` with its monomial basis.
///
/// The affine exponent `α ∈ N^d` with `|α| ≤ n` stands for the homogeneous
/// monomial `X_0^{n-|α|} X_1^{α_1} ... X_d^{α_d}`, so `α` is also the order of
/// vanishing at `(1 : 0 : ... : 0)` in the local parameters `X_i / X_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Backend {
    pub variety: Variety,
    pub n: usize,
    basis: Vec<Vec<i64>>,
}

impl Backend {
    pub fn new(variety: Variety, n: usize) -> Self {
        let sample = SemigroupSample::full(variety.dim(), n).expect("dimension at most 3");
        let d = variety.dim();
        let basis = sample.level(n).iter().map(|a| a[..d].to_vec()).collect();
        Self { variety, n, basis }
    }

    /// Exponents in lexicographic order.
    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, alpha: &[i64]) -> Option<usize> {
        self.basis.binary_search_by(|b| b.as_slice().cmp(alpha)).ok()
    }

    /// Values of every basis monomial at a homogeneous point.
    pub fn eval_monomials(&self, x: &[C64]) -> Vec<C64> {
        let n = self.n;
        let powers: Vec<Vec<C64>> = x
            .iter()
            .map(|&xi| {
                let mut p = Vec::with_capacity(n + 1);
                let mut acc = C64::new(1.0, 0.0);
                for _ in 0..=n {
                    p.push(acc);
                    acc *= xi;
                }
                p
            })
            .collect();
        self.basis
            .iter()
            .map(|a| {
                let head = n - a.iter().sum::<i64>() as usize;
                a.iter().enumerate().fold(powers[0][head], |acc, (j, &e)| acc * powers[j + 1][e as usize])
            })
            .collect()
    }

    /// The complete series as a graded piece.
    pub fn full_piece(&self, order: &MonomialOrder) -> GradedPiece {
        let mut idx: Vec<usize> = (0..self.rank()).collect();
        idx.sort_by(|&i, &j| order.compare(&self.basis[i], &self.basis[j]));
        let sections = CMat::from_fn(self.rank(), idx.len(), |i, k| {
            if i == idx[k] {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        GradedPiece { n: self.n, exponents: idx.iter().map(|&i| self.basis[i].clone()).collect(), sections }
    }
}

/// A subspace of `H^0(O(n))` with one section per leading exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedPiece {
    pub n: usize,
    /// Leading exponents in increasing monomial order.
    pub exponents: Vec<Vec<i64>>,
    /// Column `k` holds the monomial coordinates of a section whose leading
    /// exponent is `exponents[k]`.
    pub sections: CMat,
}

impl GradedPiece {
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }
}

/// A homogeneous polynomial with rational coefficients, keyed by affine
/// exponents as in [`Backend`].
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub degree: usize,
    pub terms: BTreeMap<Vec<i64>, BigRational>,
}

impl Section {
    pub fn new(dim: usize, degree: usize, terms: &[(Vec<i64>, i64)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (a, c) in terms {
            if a.len() != dim || a.iter().any(|&x| x < 0) || a.iter().sum::<i64>() as usize > degree {
                return Err(Error::Invalid(alloc::format!("exponent {a:?} not in degree {degree}")));
            }
            if *c != 0 {
                *map.entry(a.clone()).or_insert_with(BigRational::zero) += BigRational::from_integer(BigInt::from(*c));
            }
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Self { degree, terms: map })
    }

    pub fn one(dim: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; dim], BigRational::one());
        Self { degree: 0, terms }
    }

    pub fn monomial(degree: usize, alpha: Vec<i64>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(alpha, BigRational::one());
        Self { degree, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<Vec<i64>, BigRational> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let e: Vec<i64> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                *terms.entry(e).or_insert_with(BigRational::zero) += x * y;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Self { degree: self.degree + other.degree, terms }
    }

    pub fn pow(&self, k: usize) -> Self {
        let dim = self.terms.keys().next().map_or(0, |a| a.len());
        (0..k).fold(Self::one(dim), |acc, _| acc.mul(self))
    }

    /// Coefficients on the basis of `backend`, whose level must be the degree.
    pub fn coefficients(&self, backend: &Backend) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); backend.rank()];
        for (a, c) in &self.terms {
            out[backend.index_of(a).expect("degree matches the backend")] = c.clone();
        }
        out
    }
}

/// The graded series `V_{kp} = s^k · H^0(O(k (p - deg s)))` inside `H^0(O(kp))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubSeries {
    pub variety: Variety,
    pub p: usize,
    /// `pieces[k - 1]` lives at level `k p`.
    pub pieces: Vec<GradedPiece>,
}

impl SubSeries {
    /// Semigroup sample on the levels `k p`; other levels are empty.
    pub fn sample(&self) -> Result<SemigroupSample> {
        let top = self.pieces.len() * self.p;
        let mut levels = vec![Vec::new(); top + 1];
        levels[0] = vec![vec![0; self.variety.dim()]];
        for piece in &self.pieces {
            levels[piece.n] = piece.exponents.clone();
        }
        SemigroupSample::new(self.variety.dim(), levels)
    }
}

pub fn sub_series(variety: Variety, generator: &Section, p: usize, levels: usize, order: &MonomialOrder) -> Result<SubSeries> {
    if generator.is_zero() {
        return Err(Error::Invalid("zero generator".into()));
    }
    if p == 0 || generator.degree > p {
        return Err(Error::Invalid(alloc::format!("generator of degree {} does not fit level {p}", generator.degree)));
    }
    if generator.terms.keys().any(|a| a.len() != variety.dim()) {
        return Err(Error::Dimension { expected: variety.dim(), found: generator.terms.keys().next().map_or(0, |a| a.len()) });
    }
    let free = p - generator.degree;
    let mut pieces = Vec::with_capacity(levels);
    for k in 1..=levels {
        let target = Backend::new(variety, k * p);
        let sk = generator.pow(k);
        let source = Backend::new(variety, k * free);
        let rows: Vec<Vec<BigRational>> = source
            .basis()
            .iter()
            .map(|a| Section::monomial(k * free, a.clone()).mul(&sk).coefficients(&target))
            .collect();
        let echelon = echelon_by_order(&rows, target.basis(), order);
        let mut sections = CMat::zeros(target.rank(), echelon.len());
        for (col, (_, combo)) in echelon.iter().enumerate() {
            for (row, c) in rows.iter().zip(combo) {
                if c.is_zero() {
                    continue;
                }
                for (i, x) in row.iter().enumerate() {
                    if !x.is_zero() {
                        sections[(i, col)] += C64::new((c * x).to_f64().unwrap_or(f64::NAN), 0.0);
                    }
                }
            }
        }
        let exponents = echelon.into_iter().map(|(e, _)| e).collect();
        pieces.push(GradedPiece { n: k * p, exponents, sections });
    }
    Ok(SubSeries { variety, p, pieces })
}
