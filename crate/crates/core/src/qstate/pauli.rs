//! Pauli letters and *N*-qubit Pauli strings.
//!
//! A string acts on a computational basis state as `P|j⟩ = φ(j)|j ⊕ x⟩`, where
//! `x` flags the qubits carrying `X` or `Y` and the phase `φ(j)` collects a
//! factor `-1` for every `Z`/`Y` acting on a `|V⟩` and a factor `i` per `Y`.
//! With this convention `σ_y|H⟩ = i|V⟩` and `Z|H⟩ = +|H⟩`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::QStateError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Dense 2×2 matrix in the `{|H⟩, |V⟩}` basis.
    pub fn matrix(self) -> nalgebra::Matrix2<C64> {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::I => nalgebra::Matrix2::new(l, o, o, l),
            Pauli::X => nalgebra::Matrix2::new(o, l, l, o),
            Pauli::Y => nalgebra::Matrix2::new(o, -i, i, o),
            Pauli::Z => nalgebra::Matrix2::new(l, o, o, -l),
        }
    }
}

impl TryFrom<char> for Pauli {
    type Error = QStateError;

    fn try_from(c: char) -> Result<Self, Self::Error> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(QStateError::Parse(format!("not a Pauli letter: {other:?}"))),
        }
    }
}

/// Tensor product of single-qubit Pauli operators; letter `k` acts on qubit `k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { letters }
    }

    pub fn identity(n: usize) -> Self {
        Self { letters: vec![Pauli::I; n] }
    }

    /// The same letter on every qubit.
    pub fn uniform(letter: Pauli, n: usize) -> Self {
        Self { letters: vec![letter; n] }
    }

    /// `letter` on the listed qubits, identity elsewhere.
    pub fn on_qubits(n: usize, letter: Pauli, qubits: &[usize]) -> Self {
        let mut letters = vec![Pauli::I; n];
        for &q in qubits {
            letters[q] = letter;
        }
        Self { letters }
    }

    /// Decodes the base-4 index used by exhaustive enumerations
    /// (qubit 0 is the most significant digit; digits I=0, X=1, Y=2, Z=3).
    pub fn from_index(n: usize, mut index: usize) -> Self {
        let mut letters = vec![Pauli::I; n];
        for q in (0..n).rev() {
            letters[q] = Pauli::ALL[index & 3];
            index >>= 2;
        }
        Self { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    /// Bit mask (qubit 0 = most significant bit) of qubits flipped by the string.
    pub(crate) fn flip_mask(&self) -> usize {
        self.mask(|p| matches!(p, Pauli::X | Pauli::Y))
    }

    /// Bit mask of qubits whose letter picks up a sign on `|V⟩`.
    pub(crate) fn sign_mask(&self) -> usize {
        self.mask(|p| matches!(p, Pauli::Z | Pauli::Y))
    }

    fn mask(&self, pred: impl Fn(Pauli) -> bool) -> usize {
        let n = self.letters.len();
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| pred(p))
            .fold(0, |m, (q, _)| m | (1 << (n - 1 - q)))
    }

    /// `i^{#Y}` as a complex number.
    pub(crate) fn y_phase(&self) -> C64 {
        let ny = self.letters.iter().filter(|&&p| p == Pauli::Y).count();
        match ny % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }

    /// Phase `φ(j)` in `P|j⟩ = φ(j)|j ⊕ flip_mask⟩`.
    pub(crate) fn phase_on(&self, basis: usize, sign_mask: usize, y_phase: C64) -> C64 {
        if (basis & sign_mask).count_ones() % 2 == 1 {
            -y_phase
        } else {
            y_phase
        }
    }

    /// Dense `2^N × 2^N` matrix. Only meant for small registers and test oracles.
    pub fn to_matrix(&self) -> nalgebra::DMatrix<C64> {
        let n = self.letters.len();
        let dim = 1usize << n;
        let flip = self.flip_mask();
        let sign = self.sign_mask();
        let yp = self.y_phase();
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        for j in 0..dim {
            m[(j ^ flip, j)] = self.phase_on(j, sign, yp);
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QStateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s.chars().map(Pauli::try_from).collect::<Result<Vec<_>, _>>()?;
        if letters.is_empty() {
            return Err(QStateError::Parse("empty Pauli string".into()));
        }
        Ok(Self { letters })
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let p: PauliString = "XIzY".parse().unwrap();
        assert_eq!(p.to_string(), "XIZY");
        assert_eq!(p.weight(), 3);
        assert_eq!(p.support(), vec![0, 2, 3]);
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
    }

    #[test]
    fn index_round_trip() {
        for idx in 0..256 {
            let p = PauliString::from_index(4, idx);
            let back = p.letters().iter().fold(0usize, |acc, &l| {
                acc * 4 + Pauli::ALL.iter().position(|&x| x == l).unwrap()
            });
            assert_eq!(back, idx);
        }
    }

    #[test]
    fn dense_matrix_matches_kronecker_product() {
        let p: PauliString = "YZX".parse().unwrap();
        let kron = p
            .letters()
            .iter()
            .map(|l| nalgebra::DMatrix::from_iterator(2, 2, l.matrix().iter().cloned()))
            .reduce(|a, b| a.kronecker(&b))
            .unwrap();
        assert!((p.to_matrix() - kron).norm() < 1e-14);
    }

    #[test]
    fn sigma_y_convention() {
        // σ_y|H⟩ = i|V⟩
        let y = Pauli::Y.matrix();
        assert_eq!(y[(1, 0)], C64::new(0.0, 1.0));
        assert_eq!(y[(0, 1)], C64::new(0.0, -1.0));
    }
}
