use std::sync::OnceLock;

use nalgebra::DVector;
use num_rational::Ratio;

use crate::algebra_core::{CarnotStructure, StructureTable};
use crate::error::{invalid, CarnotError, Result};

/// Highest BCH order implemented.
pub const MAX_ORDER: usize = 6;

/// A right-nested word `[w_1, [w_2, … w_L]]` in the letters `X = 0`, `Y = 1`,
/// encoded with `w_1` as the most significant bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynkinTerm {
    pub len: usize,
    pub code: usize,
    pub coeff: f64,
    pub exact: Ratio<i64>,
}

fn factorial(n: i64) -> i64 {
    (1..=n).product::<i64>().max(1)
}

fn letter(code: usize, len: usize, pos: usize) -> usize {
    (code >> (len - 1 - pos)) & 1
}

/// Dynkin coefficient of a word: the sum over splittings into blocks
/// `X^r Y^s` of `(−1)^{n−1} / (n · L · Π r! s!)`.
fn dynkin_coefficient(code: usize, len: usize) -> Ratio<i64> {
    fn rec(code: usize, len: usize, pos: usize, n: i64, weight: Ratio<i64>, acc: &mut Ratio<i64>) {
        if pos == len {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            *acc += weight * Ratio::new(sign, n * len as i64);
            return;
        }
        let (mut r, mut s) = (0i64, 0i64);
        for e in pos..len {
            match letter(code, len, e) {
                0 if s == 0 => r += 1,
                0 => break,
                _ => s += 1,
            }
            rec(code, len, e + 1, n + 1, weight / (factorial(r) * factorial(s)), acc);
        }
    }
    let mut acc = Ratio::from_integer(0);
    rec(code, len, 0, 0, Ratio::from_integer(1), &mut acc);
    acc
}

/// Non-zero right-nested Dynkin terms through `MAX_ORDER`.
pub fn dynkin_terms() -> &'static [DynkinTerm] {
    static TERMS: OnceLock<Vec<DynkinTerm>> = OnceLock::new();
    TERMS.get_or_init(|| {
        let mut out = Vec::new();
        for len in 1..=MAX_ORDER {
            for code in 0..(1usize << len) {
                // [.., [a, a]] vanishes.
                if len >= 2 && letter(code, len, len - 1) == letter(code, len, len - 2) {
                    continue;
                }
                let c = dynkin_coefficient(code, len);
                if c != Ratio::from_integer(0) {
                    out.push(DynkinTerm { len, code, coeff: *c.numer() as f64 / *c.denom() as f64, exact: c });
                }
            }
        }
        out
    })
}

/// Group law `x · y = log(exp x exp y)` for a bracket, through a fixed BCH order.
///
/// Exact when the bracket is nilpotent of step at most `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupLaw {
    table: StructureTable,
    order: usize,
}

impl GroupLaw {
    pub fn new(table: StructureTable, order: usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(CarnotError::UnsupportedStep { step: order });
        }
        if order == 0 {
            return invalid("BCH order must be at least 1");
        }
        Ok(Self { table, order })
    }

    /// Nilpotent group law of a Carnot structure.
    pub fn carnot(carnot: &CarnotStructure) -> Result<Self> {
        Self::new(carnot.nilpotent().clone(), carnot.step().max(1))
    }

    /// Group law of the input bracket in adapted coordinates, truncated at `order`.
    pub fn original(carnot: &CarnotStructure, order: usize) -> Result<Self> {
        Self::new(carnot.original().clone(), order)
    }

    pub fn dim(&self) -> usize {
        self.table.dim()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn table(&self) -> &StructureTable {
        &self.table
    }

    pub fn mul(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        self.mul_into(x.as_slice(), y.as_slice(), out.as_mut_slice());
        out
    }

    /// Writes `x · y` into `out`.
    pub fn mul_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let dim = self.dim();
        for k in 0..dim {
            out[k] = x[k] + y[k];
        }
        if self.order < 2 || self.table.is_abelian() {
            return;
        }
        // values[len][code] = right-nested bracket of the word, built from suffixes.
        let mut values: Vec<Vec<Option<Vec<f64>>>> = vec![Vec::new(); self.order + 1];
        values[1] = vec![Some(x.to_vec()), Some(y.to_vec())];
        for len in 2..=self.order {
            let mut level = vec![None; 1 << len];
            let mut any = false;
            for code in 0..(1usize << len) {
                let suffix = code & ((1 << (len - 1)) - 1);
                let first = code >> (len - 1);
                if let Some(s) = &values[len - 1][suffix] {
                    let a = if first == 0 { x } else { y };
                    let mut v = vec![0.0; dim];
                    self.table.bracket_into(a, s, &mut v);
                    if v.iter().any(|c| *c != 0.0) {
                        level[code] = Some(v);
                        any = true;
                    }
                }
            }
            values[len] = level;
            if !any {
                break;
            }
        }
        for t in dynkin_terms() {
            if t.len < 2 || t.len > self.order {
                continue;
            }
            if let Some(Some(v)) = values[t.len].get(t.code) {
                for k in 0..dim {
                    out[k] += t.coeff * v[k];
                }
            }
        }
    }

    pub fn inv(&self, x: &DVector<f64>) -> DVector<f64> {
        group_inverse(x)
    }

    /// Ordered product of a sequence of elements.
    pub fn product<'a>(&self, items: impl IntoIterator<Item = &'a DVector<f64>>) -> DVector<f64> {
        let mut acc = DVector::zeros(self.dim());
        let mut tmp = DVector::zeros(self.dim());
        for it in items {
            self.mul_into(acc.as_slice(), it.as_slice(), tmp.as_mut_slice());
            std::mem::swap(&mut acc, &mut tmp);
        }
        acc
    }
}

/// `x · y` under the nilpotent bracket of `carnot`.
pub fn bch_multiply(carnot: &CarnotStructure, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    if x.len() != carnot.dim() || y.len() != carnot.dim() {
        return invalid(format!("expected vectors of length {}", carnot.dim()));
    }
    Ok(GroupLaw::carnot(carnot)?.mul(x, y))
}

/// Inverse in exponential coordinates.
pub fn group_inverse(x: &DVector<f64>) -> DVector<f64> {
    -x
}
