//! Dense square matrices over GF(2), rows packed into `u64` words.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

const W: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(W)
}

/// Square bit matrix. Row `i` occupies `words` consecutive `u64`s; bit `j`
/// of a row lives at word `j / 64`, bit `j % 64`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2Matrix {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl GF2Matrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        let words = words_for(n);
        GF2Matrix { n, words, data: vec![0; n * words] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from row-major 0/1 values. Panics on ragged input.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), n, "row {i} has length {} (expected {n})", r.len());
            for (j, &b) in r.iter().enumerate() {
                m.set(i, j, b & 1 == 1);
            }
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.data[i * self.words + j / W] >> (j % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.data[i * self.words + j / W];
        if v {
            *w |= 1 << (j % W);
        } else {
            *w &= !(1 << (j % W));
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.words..(i + 1) * self.words]
    }

    pub fn column(&self, j: usize) -> Vec<bool> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    /// Row `j` becomes row `j` XOR row `i`.
    pub fn row_add(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(Error::SameRow(i));
        }
        self.row_add_unchecked(i, j);
        Ok(())
    }

    #[inline]
    pub(crate) fn row_add_unchecked(&mut self, i: usize, j: usize) {
        debug_assert!(i != j && i < self.n && j < self.n);
        let w = self.words;
        let (src, dst) = if i < j {
            let (a, b) = self.data.split_at_mut(j * w);
            (&a[i * w..(i + 1) * w], &mut b[..w])
        } else {
            let (a, b) = self.data.split_at_mut(i * w);
            (&b[..w], &mut a[j * w..(j + 1) * w])
        };
        for (d, s) in dst.iter_mut().zip(src) {
            *d ^= *s;
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            Err(Error::IndexOutOfRange { index: i, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = (0..self.n).map(|i| self.row(i).to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.n {
            let (wi, bit) = (col / W, 1u64 << (col % W));
            let Some(p) = (rank..self.n).find(|&r| rows[r][wi] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            for r in rank + 1..self.n {
                if rows[r][wi] & bit != 0 {
                    let (a, b) = rows.split_at_mut(r);
                    xor_into(&mut b[0], &a[rank]);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    /// Gauss-Jordan on `[M | I]`, lowest row index as pivot.
    pub fn inverse(&self) -> Result<GF2Matrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| a.get(r, col)) else {
                return Err(Error::SingularMatrix);
            };
            if p != col {
                a.swap_rows(p, col);
                inv.swap_rows(p, col);
            }
            for r in 0..n {
                if r != col && a.get(r, col) {
                    a.row_add_unchecked(col, r);
                    inv.row_add_unchecked(col, r);
                }
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let w = self.words;
        for k in 0..w {
            self.data.swap(i * w + k, j * w + k);
        }
    }

    pub fn transpose(&self) -> GF2Matrix {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    pub fn mul(&self, other: &GF2Matrix) -> Result<GF2Matrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                if self.get(i, k) {
                    let src = other.row(k).to_vec();
                    xor_into(out.row_mut(i), &src);
                }
            }
        }
        Ok(out)
    }

    /// `M · x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[bool]) -> Result<Vec<bool>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        let packed = pack(x);
        Ok((0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(&packed)
                    .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                    & 1
                    == 1
            })
            .collect())
    }

    /// Rows `j != i` whose XOR equals row `i` XOR `e_i`. Read off row `i` of `M⁻¹`.
    ///
    /// Such a set exists iff `(M⁻¹)ᵢᵢ = 1`, which always holds once column `i`
    /// is `e_i`; otherwise this is an `Invariant` error.
    pub fn solve_row_combination(&self, i: usize) -> Result<RowIndexSet> {
        self.check_index(i)?;
        let inv = self.inverse()?;
        if !inv.get(i, i) {
            return Err(Error::Invariant(format!("row {i} is not needed to form e_{i}")));
        }
        Ok(RowIndexSet::from_iter_checked(
            self.n,
            (0..self.n).filter(|&j| j != i && inv.get(i, j)),
        ))
    }

    /// Uniform over GL(n, 2) by rejection.
    pub fn random_invertible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GF2Matrix {
        loop {
            let m = Self::random(n, rng);
            if m.is_invertible() {
                return m;
            }
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GF2Matrix {
        let mut m = Self::zeros(n);
        let tail = n % W;
        for i in 0..n {
            let words = m.words;
            for (k, w) in m.row_mut(i).iter_mut().enumerate() {
                *w = rng.random::<u64>();
                if k + 1 == words && tail != 0 {
                    *w &= (1u64 << tail) - 1;
                }
            }
        }
        m
    }

    /// Packs the matrix into an integer key, bit `i*n + j` = `M[i][j]`. Needs n² ≤ 64.
    pub fn encode(&self) -> u64 {
        assert!(self.n * self.n <= 64);
        let mut key = 0u64;
        for i in 0..self.n {
            key |= (self.row(i)[0]) << (i * self.n);
        }
        key
    }

    pub fn decode(n: usize, key: u64) -> GF2Matrix {
        assert!(n * n <= 64);
        let mut m = Self::zeros(n);
        let mask = (1u64 << n) - 1;
        for i in 0..n {
            m.row_mut(i)[0] = (key >> (i * n)) & mask;
        }
        m
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for i in 0..self.n {
            let line: String = (0..self.n).map(|j| if self.get(i, j) { '1' } else { '0' }).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF2Matrix(")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, " ")?;
            }
            for j in 0..self.n {
                write!(f, "{}", self.get(i, j) as u8)?;
            }
        }
        write!(f, ")")
    }
}

impl FromStr for GF2Matrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, head) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let n: usize = head
            .parse()
            .map_err(|_| Error::Parse { line: ln, msg: format!("expected dimension, got '{head}'") })?;
        if n == 0 {
            return Err(Error::Parse { line: ln, msg: "dimension must be positive".into() });
        }
        let mut m = GF2Matrix::zeros(n);
        let mut count = 0;
        for (ln, line) in lines {
            if count == n {
                return Err(Error::Parse { line: ln, msg: "more rows than declared".into() });
            }
            if line.chars().count() != n {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("row has {} entries, expected {n}", line.chars().count()),
                });
            }
            for (j, c) in line.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => m.set(count, j, true),
                    _ => return Err(Error::Parse { line: ln, msg: format!("bad character '{c}'") }),
                }
            }
            count += 1;
        }
        if count != n {
            return Err(Error::Parse { line: 0, msg: format!("expected {n} rows, found {count}") });
        }
        Ok(m)
    }
}

/// Sorted set of row indices below a fixed bound.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RowIndexSet {
    indices: BTreeSet<usize>,
}

impl RowIndexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn from_iter_checked(n: usize, it: impl IntoIterator<Item = usize>) -> Self {
        let indices: BTreeSet<usize> = it.into_iter().collect();
        debug_assert!(indices.iter().all(|&i| i < n));
        RowIndexSet { indices }
    }

    pub fn insert(&mut self, i: usize) -> bool {
        self.indices.insert(i)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for RowIndexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        RowIndexSet { indices: iter.into_iter().collect() }
    }
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

pub(crate) fn pack(bits: &[bool]) -> Vec<u64> {
    let mut out = vec![0u64; words_for(bits.len().max(1))];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / W] |= 1 << (i % W);
        }
    }
    out
}

/// |GL(n, 2)| = ∏_{i<n} (2ⁿ − 2ⁱ).
pub fn gl_order(n: u32) -> u128 {
    (0..n).map(|i| (1u128 << n) - (1u128 << i)).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fig2() -> GF2Matrix {
        GF2Matrix::from_rows(&[[1, 0, 1], [1, 1, 0], [0, 0, 1]])
    }

    #[test]
    fn row_add_elementary() {
        let mut m = GF2Matrix::identity(2);
        m.row_add(0, 1).unwrap();
        assert_eq!(m, GF2Matrix::from_rows(&[[1, 0], [1, 1]]));
    }

    #[test]
    fn fig2_matrix_from_row_adds() {
        let mut m = GF2Matrix::identity(3);
        m.row_add(0, 1).unwrap();
        m.row_add(2, 0).unwrap();
        assert_eq!(m, fig2());
        assert!(m.is_invertible());
    }

    #[test]
    fn row_add_errors() {
        let mut m = GF2Matrix::identity(3);
        assert_eq!(m.row_add(1, 1), Err(Error::SameRow(1)));
        assert_eq!(m.row_add(0, 3), Err(Error::IndexOutOfRange { index: 3, n: 3 }));
    }

    #[test]
    fn equal_rows_singular() {
        let m = GF2Matrix::from_rows(&[[1, 1, 0], [1, 1, 0], [0, 0, 1]]);
        assert!(!m.is_invertible());
        assert_eq!(m.inverse(), Err(Error::SingularMatrix));
        assert_eq!(m.solve_row_combination(0), Err(Error::SingularMatrix));
    }

    #[test]
    fn elementary_self_inverse() {
        let m = GF2Matrix::from_rows(&[[1, 0], [1, 1]]);
        assert_eq!(m.inverse().unwrap(), m);
        assert_eq!(GF2Matrix::identity(7).inverse().unwrap(), GF2Matrix::identity(7));
    }

    #[test]
    fn solve_row_combination_small() {
        let m = GF2Matrix::from_rows(&[[1, 0], [1, 1]]);
        assert_eq!(m.solve_row_combination(1).unwrap().to_vec(), vec![0]);
        let id = GF2Matrix::identity(5);
        for i in 0..5 {
            assert!(id.solve_row_combination(i).unwrap().is_empty());
        }
    }

    #[test]
    fn random_1x1_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            assert_eq!(GF2Matrix::random_invertible(1, &mut rng), GF2Matrix::identity(1));
        }
    }

    #[test]
    fn random_is_deterministic() {
        let a = GF2Matrix::random_invertible(3, &mut ChaCha8Rng::seed_from_u64(11));
        let b = GF2Matrix::random_invertible(3, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
    }

    #[test]
    fn random_covers_gl3() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..100_000 {
            seen.insert(GF2Matrix::random_invertible(3, &mut rng).encode());
        }
        assert_eq!(seen.len() as u128, gl_order(3));
        assert_eq!(gl_order(3), 168);
    }

    #[test]
    fn wide_matrices_cross_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = GF2Matrix::random_invertible(130, &mut rng);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&m).unwrap().is_identity());
    }

    #[test]
    fn text_roundtrip_and_ragged() {
        let m = fig2();
        let parsed: GF2Matrix = m.to_text().parse().unwrap();
        assert_eq!(parsed, m);
        assert!("3\n101\n11\n001\n".parse::<GF2Matrix>().is_err());
        assert!("2\n10\n".parse::<GF2Matrix>().is_err());
        assert!("2\n10\n0x\n".parse::<GF2Matrix>().is_err());
    }

    #[test]
    fn encode_roundtrip() {
        let m = fig2();
        assert_eq!(GF2Matrix::decode(3, m.encode()), m);
    }
}
