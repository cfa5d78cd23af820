//! X-programs: diagonal phase circuits in the computational basis.
//!
//! A program over n qubits is a list of rows, each a nonempty support mask
//! together with a dyadic phase exponent. Row (mask m, numerator k) applies
//! the phase exp(i*pi*k/den) to every basis state x with m a subset of x,
//! so the program's diagonal entry at x is
//!
//! ```text
//! f(x) = exp(i*pi/den * sum over rows { k_j : m_j subset of x })
//! ```
//!
//! and the circuit of interest is H^n . diag(f) . H^n. All exponent
//! arithmetic is exact integers modulo 2*den; floats appear only when a
//! phase is converted to a complex value through the program's
//! root-of-unity table.
//!
//! The sparse random family draws, for every qubit pair {i,j}, a gate
//! diag(1,1,1,omega^k) with k uniform in 0..4 (omega = i, numerator 4k)
//! with probability gamma*ln(n)/n, and for every qubit a gate
//! diag(1,zeta^k) with k uniform in 0..8 (zeta = e^{i*pi/4}, numerator 2k),
//! all with denominator 8.

use crate::error::{Error, Result};
use crate::mask::Mask;
use crate::rng::Rng;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest legal denominator; phases live in the 32nd roots of unity.
pub const MAX_DEN: u32 = 16;

/// A phase exp(i*pi*num/den) with den a power of two in 1..=16 and
/// num reduced modulo 2*den.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseExponent {
    num: u32,
    den: u32,
}

impl PhaseExponent {
    /// omega = i.
    pub const OMEGA: PhaseExponent = PhaseExponent { num: 4, den: 8 };
    /// zeta = e^{i*pi/4}.
    pub const ZETA: PhaseExponent = PhaseExponent { num: 2, den: 8 };

    pub fn new(num: i64, den: u32) -> Result<Self> {
        if !den.is_power_of_two() || den > MAX_DEN {
            return Err(Error::InvalidParam(format!(
                "denominator {den} not a power of two in 1..={MAX_DEN}"
            )));
        }
        let m = 2 * den as i64;
        Ok(PhaseExponent {
            num: num.rem_euclid(m) as u32,
            den,
        })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    /// Same phase over a coarser-to-finer denominator.
    pub fn to_den(&self, den: u32) -> Result<Self> {
        if !den.is_power_of_two() || den > MAX_DEN || den < self.den {
            return Err(Error::InvalidParam(format!(
                "cannot rescale denominator {} to {den}",
                self.den
            )));
        }
        Ok(PhaseExponent {
            num: self.num * (den / self.den),
            den,
        })
    }

    /// Exact integer composition: the phase of the product.
    pub fn compose(&self, other: &PhaseExponent) -> PhaseExponent {
        let den = self.den.max(other.den);
        let a = self.num * (den / self.den);
        let b = other.num * (den / other.den);
        PhaseExponent {
            num: (a + b) % (2 * den),
            den,
        }
    }

    /// k-th power (k may be negative).
    pub fn pow(&self, k: i64) -> PhaseExponent {
        let m = 2 * self.den as i64;
        PhaseExponent {
            num: (self.num as i64 * k).rem_euclid(m) as u32,
            den: self.den,
        }
    }

    pub fn value(&self) -> Complex64 {
        root_of_unity(self.num, self.den)
    }
}

impl fmt::Display for PhaseExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp(i*pi*{}/{})", self.num, self.den)
    }
}

/// exp(i*pi*e/den). Multiples of pi/2 are returned exactly so that the
/// cardinal phases 1, i, -1, -i carry no rounding at all.
pub fn root_of_unity(e: u32, den: u32) -> Complex64 {
    let e = e % (2 * den);
    if (2 * e) % den == 0 {
        match 2 * e / den {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        let (s, c) = (std::f64::consts::PI * e as f64 / den as f64).sin_cos();
        Complex64::new(c, s)
    }
}

/// One diagonal gate: phase numerator `num` (over the program denominator)
/// applied when all bits of `mask` are set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub mask: Mask,
    pub num: u32,
}

/// Structural defects reported by [`XProgram::violations`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BadQubitCount,
    BadDenominator(u32),
    EmptySupport { row: usize },
    SupportOutOfRange { row: usize, bit: usize },
    NumeratorOutOfRange { row: usize, num: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadQubitCount => write!(f, "qubit count must be at least 1"),
            Violation::BadDenominator(d) => {
                write!(f, "denominator {d} not a power of two in 1..={MAX_DEN}")
            }
            Violation::EmptySupport { row } => write!(f, "row {row}: empty support"),
            Violation::SupportOutOfRange { row, bit } => {
                write!(f, "row {row}: support bit {bit} out of range")
            }
            Violation::NumeratorOutOfRange { row, num } => {
                write!(f, "row {row}: numerator {num} not in [0, 2*den)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XProgram {
    n: usize,
    den: u32,
    rows: Vec<Row>,
}

impl XProgram {
    pub fn new(n: usize, den: u32, rows: Vec<Row>) -> Result<Self> {
        let prog = XProgram { n, den, rows };
        prog.validate()?;
        Ok(prog)
    }

    pub fn empty(n: usize, den: u32) -> Result<Self> {
        XProgram::new(n, den, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    /// Exponent modulus: exponents live in 0..modulus().
    pub fn modulus(&self) -> u32 {
        2 * self.den
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Append a gate, rescaling its exponent to the program denominator.
    pub fn push_gate(&mut self, support: Mask, exp: PhaseExponent) -> Result<()> {
        let exp = exp.to_den(self.den)?;
        let row = Row {
            mask: support,
            num: exp.num(),
        };
        self.check_row(self.rows.len(), &row)
            .map_err(|v| Error::Validation(v.to_string()))?;
        self.rows.push(row);
        Ok(())
    }

    fn check_row(&self, idx: usize, row: &Row) -> std::result::Result<(), Violation> {
        if row.mask.is_zero() {
            return Err(Violation::EmptySupport { row: idx });
        }
        if let Some(b) = row.mask.highest_bit() {
            if b >= self.n {
                return Err(Violation::SupportOutOfRange { row: idx, bit: b });
            }
        }
        if row.num >= 2 * self.den {
            return Err(Violation::NumeratorOutOfRange {
                row: idx,
                num: row.num,
            });
        }
        Ok(())
    }

    /// All structural defects, in row order.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n == 0 {
            out.push(Violation::BadQubitCount);
        }
        if !self.den.is_power_of_two() || self.den > MAX_DEN {
            out.push(Violation::BadDenominator(self.den));
            return out;
        }
        for (i, row) in self.rows.iter().enumerate() {
            if let Err(v) = self.check_row(i, row) {
                out.push(v);
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let vs = self.violations();
        if vs.is_empty() {
            Ok(())
        } else {
            let text = vs
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            Err(Error::Validation(text))
        }
    }

    /// Exact phase exponent of f(x), an integer in 0..2*den. x must fit in
    /// one word (n <= 64); wider programs use [`XProgram::eval_exponent_mask`].
    pub fn eval_exponent(&self, x: u64) -> u32 {
        debug_assert!(self.n <= 64);
        let mut acc: u64 = 0;
        for row in &self.rows {
            if row.mask.subset_of_u64(x) {
                acc += row.num as u64;
            }
        }
        (acc % (2 * self.den as u64)) as u32
    }

    pub fn eval_exponent_mask(&self, x: &Mask) -> u32 {
        let mut acc: u64 = 0;
        for row in &self.rows {
            if row.mask.subset_of(x) {
                acc += row.num as u64;
            }
        }
        (acc % (2 * self.den as u64)) as u32
    }

    /// f(x) as a unit-modulus complex together with its exact exponent.
    pub fn eval_phase(&self, x: u64) -> (Complex64, u32) {
        let e = self.eval_exponent(x);
        (root_of_unity(e, self.den), e)
    }

    /// The root-of-unity table for this program's denominator:
    /// entry e is exp(i*pi*e/den), e in 0..2*den.
    pub fn root_table(&self) -> Vec<Complex64> {
        (0..2 * self.den).map(|e| root_of_unity(e, self.den)).collect()
    }

    /// Dense table of phase exponents for every x in 0..2^n.
    ///
    /// Cost is sum over rows of 2^(n - |support|): each row walks only its
    /// supersets, cheaper than 2^n subset tests per row.
    pub fn exponent_table(&self) -> Result<Vec<u8>> {
        crate::simulate::guard_dense(self.n)?;
        let size = 1usize << self.n;
        let modulus = 2 * self.den;
        let mut acc = vec![0u8; size];
        for row in &self.rows {
            if row.num == 0 {
                continue;
            }
            let m = row.mask.as_u64().expect("n <= 64") as usize;
            let num = row.num as u8;
            let mut x = m;
            loop {
                let e = acc[x] + num;
                acc[x] = if e as u32 >= modulus { e - modulus as u8 } else { e };
                if x == size - 1 {
                    break;
                }
                x = (x + 1) | m;
            }
        }
        Ok(acc)
    }

    /// Concatenation: applies both programs' gates. Denominators are
    /// harmonized to the finer of the two.
    pub fn concat(&self, other: &XProgram) -> Result<XProgram> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "concat of programs on {} and {} qubits",
                self.n, other.n
            )));
        }
        let den = self.den.max(other.den);
        let mut rows: Vec<Row> = Vec::with_capacity(self.rows.len() + other.rows.len());
        for (prog, scale) in [(self, den / self.den), (other, den / other.den)] {
            rows.extend(prog.rows.iter().map(|r| Row {
                mask: r.mask.clone(),
                num: r.num * scale,
            }));
        }
        XProgram::new(self.n, den, rows)
    }

    /// The documented normalization pass: merge rows with equal support
    /// (exponents summed mod 2*den), drop rows whose merged exponent is 0,
    /// sort rows by mask. f(x) is unchanged for every x.
    pub fn normalized(&self) -> XProgram {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| a.mask.cmp(&b.mask));
        let mut merged: Vec<Row> = Vec::with_capacity(rows.len());
        for row in rows {
            match merged.last_mut() {
                Some(last) if last.mask == row.mask => {
                    last.num = (last.num + row.num) % (2 * self.den);
                }
                _ => merged.push(row),
            }
        }
        merged.retain(|r| r.num != 0);
        XProgram {
            n: self.n,
            den: self.den,
            rows: merged,
        }
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<RowJson> = self
            .rows
            .iter()
            .map(|r| RowJson {
                mask: r.mask.to_hex(),
                num: r.num,
            })
            .collect();
        let doc = ProgramJson {
            n: self.n,
            den: self.den,
            rows,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<XProgram> {
        let doc: ProgramJson = serde_json::from_str(text)?;
        let rows = doc
            .rows
            .into_iter()
            .map(|r| {
                Ok(Row {
                    mask: Mask::from_hex(&r.mask)?,
                    num: r.num,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        XProgram::new(doc.n, doc.den, rows)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProgramJson {
    n: usize,
    den: u32,
    rows: Vec<RowJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowJson {
    mask: String,
    num: u32,
}

/// Parameters of the sparse random family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparseParams {
    pub n: usize,
    pub gamma: f64,
}

impl SparseParams {
    pub fn new(n: usize, gamma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParam("n must be at least 1".into()));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParam(format!("gamma {gamma} must be positive")));
        }
        Ok(SparseParams { n, gamma })
    }

    /// Pair-gate probability gamma*ln(n)/n, clamped to 1 (0 when n = 1).
    pub fn p_edge(&self) -> f64 {
        (self.gamma * (self.n as f64).ln() / self.n as f64).min(1.0)
    }
}

/// Draw one program from the sparse family. Pairs are visited in
/// lexicographic (i, j) order, then one single-qubit gate per qubit, so a
/// given rng stream always yields the same program.
pub fn random_sparse_circuit(params: &SparseParams, rng: &mut Rng) -> XProgram {
    let p = params.p_edge();
    let mut rows = Vec::new();
    for i in 0..params.n {
        for j in (i + 1)..params.n {
            if rng.bernoulli(p) {
                rows.push(Row {
                    mask: Mask::pair(i, j),
                    num: 4 * rng.below(4) as u32,
                });
            }
        }
    }
    for q in 0..params.n {
        rows.push(Row {
            mask: Mask::single(q),
            num: 2 * rng.below(8) as u32,
        });
    }
    XProgram {
        n: params.n,
        den: 8,
        rows,
    }
}
