//! Exact arithmetic on character and cocharacter lattices of split tori.
//!
//! Characters and cocharacters are integer vectors paired by the dot product.
//! Everything here is exact: coordinates are `i64`, intermediate products are
//! carried in `i128` or big integers, and any value that would not fit is
//! reported as [`Error::Overflow`] rather than wrapped.

pub mod snf;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, validation, Error, Result};
use snf::{smith_normal_form, BigMatrix};

macro_rules! int_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub Vec<i64>);

        impl $name {
            pub fn new(coords: Vec<i64>) -> Self {
                $name(coords)
            }

            pub fn zero(rank: usize) -> Self {
                $name(vec![0; rank])
            }

            pub fn unit(rank: usize, k: usize) -> Self {
                let mut v = vec![0; rank];
                v[k] = 1;
                $name(v)
            }

            pub fn coords(&self) -> &[i64] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|&x| x == 0)
            }

            pub fn checked_add(&self, other: &Self) -> Result<Self> {
                check_len(self.len(), other.len())?;
                self.0
                    .iter()
                    .zip(&other.0)
                    .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow("vector sum")))
                    .collect::<Result<Vec<_>>>()
                    .map($name)
            }

            pub fn checked_scale(&self, c: i64) -> Result<Self> {
                self.0
                    .iter()
                    .map(|a| a.checked_mul(c).ok_or(Error::Overflow("vector scale")))
                    .collect::<Result<Vec<_>>>()
                    .map($name)
            }

            pub fn neg(&self) -> Self {
                $name(self.0.iter().map(|a| -a).collect())
            }

            /// gcd of the entries; 0 for the zero vector.
            pub fn content(&self) -> i64 {
                self.0.iter().fold(0i64, |g, &x| g.gcd(&x))
            }

            pub fn is_primitive(&self) -> bool {
                self.content() == 1
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "(")?;
                for (i, x) in self.0.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }

        impl From<Vec<i64>> for $name {
            fn from(v: Vec<i64>) -> Self {
                $name(v)
            }
        }
    };
}

int_vector!(
    /// A character of a split torus, written in the dual of the standard basis.
    CharacterVector
);
int_vector!(
    /// A cocharacter (one-parameter subgroup) of a split torus.
    CocharacterVector
);

/// Rank, Weyl block structure and recorded central quotients of a torus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusData {
    rank: usize,
    blocks: Vec<usize>,
    central_quotients: Vec<CocharacterVector>,
}

impl TorusData {
    /// A torus with the given block sizes. Each block is one `GL` factor.
    pub fn with_blocks(blocks: Vec<usize>) -> Self {
        let rank = blocks.iter().sum();
        TorusData {
            rank,
            blocks,
            central_quotients: Vec::new(),
        }
    }

    /// A torus with no Weyl action (every block has size one).
    pub fn split(rank: usize) -> Self {
        TorusData {
            rank,
            blocks: vec![1; rank],
            central_quotients: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn central_quotients(&self) -> &[CocharacterVector] {
        &self.central_quotients
    }

    /// Record a primitive central cocharacter as quotiented out.
    pub fn with_central_quotient(mut self, v: CocharacterVector) -> Result<Self> {
        check_len(self.rank, v.len())?;
        if !v.is_primitive() {
            return Err(Error::InvalidQuotient(format!("{v} is not primitive")));
        }
        self.central_quotients.push(v);
        Ok(self)
    }

    /// Half-open coordinate ranges of the blocks, in order.
    pub fn block_ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.blocks.iter().scan(0usize, |start, &len| {
            let r = *start..*start + len;
            *start += len;
            Some(r)
        })
    }

    /// Append further blocks after the existing ones.
    pub fn extended(&self, extra_blocks: &[usize]) -> TorusData {
        let mut blocks = self.blocks.clone();
        blocks.extend_from_slice(extra_blocks);
        let rank = blocks.iter().sum();
        let central_quotients = self
            .central_quotients
            .iter()
            .map(|v| {
                let mut c = v.0.clone();
                c.resize(rank, 0);
                CocharacterVector(c)
            })
            .collect();
        TorusData {
            rank,
            blocks,
            central_quotients,
        }
    }
}

/// Dense integer matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            check_len(c, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data,
        })
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, cols: &[CocharacterVector]) -> Result<Self> {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            check_len(rows, c.len())?;
            for (i, x) in c.0.iter().enumerate() {
                m.set(i, j, *x);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        check_len(self.cols, v.len())?;
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn apply_transpose(&self, v: &[i64]) -> Result<Vec<i64>> {
        check_len(self.rows, v.len())?;
        (0..self.cols)
            .map(|j| {
                let mut acc: i128 = 0;
                for (i, x) in v.iter().enumerate() {
                    acc += i128::from(self.get(i, j)) * i128::from(*x);
                }
                i64::try_from(acc).map_err(|_| Error::Overflow("transpose action"))
            })
            .collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        check_len(self.cols, other.rows)?;
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let col = other.column(j);
            let img = self.apply(&col)?;
            for (i, x) in img.into_iter().enumerate() {
                out.set(i, j, x);
            }
        }
        Ok(out)
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &IntMatrix) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        m
    }

    pub fn to_big(&self) -> BigMatrix {
        BigMatrix::from_rows(&self.to_rows())
    }

    pub fn try_from_big(m: &BigMatrix) -> Result<IntMatrix> {
        let mut out = IntMatrix::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(
                    i,
                    j,
                    m[(i, j)].to_i64().ok_or(Error::Overflow("matrix entry"))?,
                );
            }
        }
        Ok(out)
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        smith_normal_form(&self.to_big()).rank()
    }
}

fn dot(a: &[i64], b: &[i64]) -> Result<i64> {
    let mut acc: i128 = 0;
    for (x, y) in a.iter().zip(b) {
        acc = acc
            .checked_add(i128::from(*x) * i128::from(*y))
            .ok_or(Error::Overflow("pairing"))?;
    }
    i64::try_from(acc).map_err(|_| Error::Overflow("pairing"))
}

/// The natural pairing between characters and cocharacters.
pub fn pair(xi: &CharacterVector, mu: &CocharacterVector) -> Result<i64> {
    check_len(xi.len(), mu.len())?;
    dot(&xi.0, &mu.0)
}

/// Outcome of a rational proportionality test `v1 = alpha * v2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proportionality {
    /// `Some(alpha)` when `v1 = alpha * v2` exactly.
    pub alpha: Option<BigRational>,
    /// Both vectors vanish, so any `alpha` works; `alpha` is reported as 0.
    pub unconstrained: bool,
    /// The `2 x r` matrix `[v1; v2]` has rational rank at most one.
    pub rank_le_one: bool,
}

pub fn proportional_over_q(v1: &CharacterVector, v2: &CharacterVector) -> Result<Proportionality> {
    check_len(v1.len(), v2.len())?;
    let Some(k) = v2.0.iter().position(|&x| x != 0) else {
        let both_zero = v1.is_zero();
        return Ok(Proportionality {
            alpha: both_zero.then(BigRational::zero),
            unconstrained: both_zero,
            rank_le_one: true,
        });
    };
    let (num, den) = (i128::from(v1.0[k]), i128::from(v2.0[k]));
    let multiple =
        v1.0.iter()
            .zip(&v2.0)
            .all(|(a, b)| i128::from(*a) * den == num * i128::from(*b));
    let alpha = multiple.then(|| BigRational::new(BigInt::from(num), BigInt::from(den)));
    Ok(Proportionality {
        alpha,
        unconstrained: false,
        rank_le_one: multiple,
    })
}

/// Find an integral cocharacter separating the signs of two characters.
///
/// For linear forms `f`, `g` on `Q^r` some `mu` has `f(mu) g(mu) < 0` exactly when
/// the forms are independent, or `f = c g` with `c < 0` and `g != 0`. Rational
/// and integral feasibility coincide since the condition is invariant under
/// positive scaling. The returned `mu` is primitive.
pub fn sign_feasible(
    xi1: &CharacterVector,
    xi2: &CharacterVector,
    torus: &TorusData,
) -> Result<Option<CocharacterVector>> {
    check_len(torus.rank(), xi1.len())?;
    check_len(torus.rank(), xi2.len())?;
    let prop = proportional_over_q(xi1, xi2)?;
    if prop.rank_le_one {
        // f = c g: feasible iff g != 0 and c < 0.
        return Ok(match prop.alpha {
            Some(alpha) if alpha.is_negative() => {
                let k = xi2
                    .0
                    .iter()
                    .position(|&x| x != 0)
                    .expect("nonzero when alpha < 0");
                Some(CocharacterVector::unit(xi2.len(), k))
            }
            _ => None,
        });
    }
    // Independent: solve <f,mu> = det, <g,mu> = -det inside span(f, g) via the
    // Gram matrix, which is positive definite here.
    let big = |v: &CharacterVector| v.0.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    let (f, g) = (big(xi1), big(xi2));
    let ip = |a: &[BigInt], b: &[BigInt]| a.iter().zip(b).map(|(x, y)| x * y).sum::<BigInt>();
    let (ff, fg, gg) = (ip(&f, &f), ip(&f, &g), ip(&g, &g));
    let a = &gg + &fg;
    let b = &fg + &ff;
    let raw: Vec<BigInt> = f.iter().zip(&g).map(|(x, y)| &a * x - &b * y).collect();
    let content = raw.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let mu = raw
        .iter()
        .map(|x| {
            (x / &content)
                .to_i64()
                .ok_or(Error::Overflow("sign witness"))
        })
        .collect::<Result<Vec<_>>>()?;
    let mu = CocharacterVector(mu);
    let (p1, p2) = (pair(xi1, &mu)?, pair(xi2, &mu)?);
    if i128::from(p1) * i128::from(p2) >= 0 {
        return Err(Error::Consistency(format!(
            "sign witness {mu} fails for {xi1}, {xi2}"
        )));
    }
    Ok(Some(mu))
}

/// A splitting `Z^r = Z v ⊕ C` adapted to a primitive central cocharacter.
///
/// `basis` is unimodular with first column `v`; its remaining columns span the
/// complement `C`, which is identified with the quotient lattice `Z^r / Z v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientSplit {
    ambient: TorusData,
    quotient: TorusData,
    direction: CocharacterVector,
    basis: IntMatrix,
    basis_inv: IntMatrix,
}

pub fn quotient_split(torus: &TorusData, v: &CocharacterVector) -> Result<QuotientSplit> {
    check_len(torus.rank(), v.len())?;
    if v.is_zero() {
        return Err(Error::InvalidQuotient(
            "cannot quotient by the zero cocharacter".into(),
        ));
    }
    if !v.is_primitive() {
        return Err(Error::InvalidQuotient(format!("{v} is not primitive")));
    }
    let r = torus.rank();
    let column: Vec<Vec<i64>> = v.0.iter().map(|&x| vec![x]).collect();
    let smith = smith_normal_form(&BigMatrix::from_rows(&column));
    // U v V = e_1 with V = (±1), so v = ±U^{-1} e_1.
    let mut basis = IntMatrix::try_from_big(&smith.u_inv)?;
    let mut basis_inv = IntMatrix::try_from_big(&smith.u)?;
    let sign = smith.v[(0, 0)]
        .to_i64()
        .ok_or(Error::Overflow("quotient split"))?;
    if sign < 0 {
        for i in 0..r {
            basis.set(i, 0, -basis.get(i, 0));
            basis_inv.set(0, i, -basis_inv.get(0, i));
        }
    }
    if basis.column(0) != v.0 {
        return Err(Error::Consistency(format!(
            "adapted basis does not start with {v}"
        )));
    }
    let ambient = torus.clone().with_central_quotient(v.clone())?;
    Ok(QuotientSplit {
        ambient,
        quotient: TorusData::split(r - 1),
        direction: v.clone(),
        basis,
        basis_inv,
    })
}

impl QuotientSplit {
    pub fn ambient(&self) -> &TorusData {
        &self.ambient
    }

    /// The rank `r - 1` free model of the quotient lattice.
    pub fn quotient(&self) -> &TorusData {
        &self.quotient
    }

    pub fn direction(&self) -> &CocharacterVector {
        &self.direction
    }

    /// Unimodular matrix whose first column is the quotient direction.
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Split coordinates of a character vanishing on the quotient direction.
    pub fn character_to_split(&self, xi: &CharacterVector) -> Result<CharacterVector> {
        if pair(xi, &self.direction)? != 0 {
            return Err(validation(format!(
                "character {xi} does not vanish on {} and does not descend",
                self.direction
            )));
        }
        let full = self.basis.apply_transpose(&xi.0)?;
        Ok(CharacterVector(full[1..].to_vec()))
    }

    /// Inverse of [`Self::character_to_split`].
    pub fn character_from_split(&self, eta: &CharacterVector) -> Result<CharacterVector> {
        check_len(self.quotient.rank(), eta.len())?;
        let mut padded = vec![0];
        padded.extend_from_slice(&eta.0);
        Ok(CharacterVector(self.basis_inv.apply_transpose(&padded)?))
    }

    /// Image of a cocharacter in the quotient lattice.
    pub fn cocharacter_to_split(&self, mu: &CocharacterVector) -> Result<CocharacterVector> {
        let full = self.basis_inv.apply(&mu.0)?;
        Ok(CocharacterVector(full[1..].to_vec()))
    }

    /// A representative of a coset, chosen inside the complement `C`.
    pub fn cocharacter_from_split(&self, mu: &CocharacterVector) -> Result<CocharacterVector> {
        check_len(self.quotient.rank(), mu.len())?;
        let mut padded = vec![0];
        padded.extend_from_slice(&mu.0);
        Ok(CocharacterVector(self.basis.apply(&padded)?))
    }
}

/// A homomorphism of tori, given by its action on cocharacters.
///
/// The matrix has shape `target.rank() x source.rank()`; characters of the
/// target restrict to the source through the transpose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusMap {
    source: TorusData,
    target: TorusData,
    matrix: IntMatrix,
}

impl TorusMap {
    pub fn new(source: TorusData, target: TorusData, matrix: IntMatrix) -> Result<Self> {
        check_len(target.rank(), matrix.rows())?;
        check_len(source.rank(), matrix.cols())?;
        if !source.central_quotients().is_empty() {
            let targets = target.central_quotients();
            for v in source.central_quotients() {
                let image = CocharacterVector(matrix.apply(&v.0)?);
                let mut cols = targets.to_vec();
                let base = IntMatrix::from_columns(target.rank(), &cols)?.rank();
                cols.push(image.clone());
                let with = IntMatrix::from_columns(target.rank(), &cols)?.rank();
                if base != with {
                    return Err(validation(format!(
                        "central cocharacter {v} maps to {image}, outside the quotiented span"
                    )));
                }
            }
        }
        Ok(TorusMap {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(torus: TorusData) -> Self {
        let matrix = IntMatrix::identity(torus.rank());
        TorusMap {
            source: torus.clone(),
            target: torus,
            matrix,
        }
    }

    pub fn source(&self) -> &TorusData {
        &self.source
    }

    pub fn target(&self) -> &TorusData {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn push_cocharacter(&self, mu: &CocharacterVector) -> Result<CocharacterVector> {
        Ok(CocharacterVector(self.matrix.apply(&mu.0)?))
    }

    pub fn restrict_character(&self, xi: &CharacterVector) -> Result<CharacterVector> {
        Ok(CharacterVector(self.matrix.apply_transpose(&xi.0)?))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &TorusMap) -> Result<TorusMap> {
        check_len(self.source.rank(), inner.target.rank())?;
        TorusMap::new(
            inner.source.clone(),
            self.target.clone(),
            self.matrix.mul(&inner.matrix)?,
        )
    }
}

/// The dominant Weyl translate: coordinates sorted weakly decreasing per block.
pub fn dominantize(lambda: &CocharacterVector, torus: &TorusData) -> Result<CocharacterVector> {
    check_len(torus.rank(), lambda.len())?;
    let mut out = lambda.0.clone();
    for range in torus.block_ranges() {
        out[range].sort_unstable_by(|a, b| b.cmp(a));
    }
    Ok(CocharacterVector(out))
}

pub fn is_dominant(lambda: &CocharacterVector, torus: &TorusData) -> bool {
    lambda.len() == torus.rank()
        && torus
            .block_ranges()
            .all(|r| lambda.0[r].windows(2).all(|w| w[0] >= w[1]))
}

/// Reduce a rational to `i64` numerator and denominator for display.
pub fn rational_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
