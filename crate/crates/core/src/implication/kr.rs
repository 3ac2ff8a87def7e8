use crate::error::{Error, Result};
use crate::expr::LinExpr;
use crate::rational::Rational;
use crate::relation::{Distribution, Value, DEFAULT_ENTROPY_BITS};
use crate::setfn::SetFunction;

/// The four-row distribution over `(A, B, X, Y)`: `0000` and `1001` with
/// probability `1/2 - ε`, `0110` and `1100` with probability `ε`.
pub fn kr_distribution(eps: &Rational) -> Result<Distribution> {
    let half = Rational::new(1, 2);
    if !eps.is_positive() || *eps >= half {
        return Err(Error::Invalid(format!("ε = {eps} must lie in (0, 1/2)")));
    }
    let big = &half - eps;
    let row = |bits: [i64; 4]| bits.iter().map(|b| Value::Int(*b)).collect::<Vec<_>>();
    Distribution::new(
        ["A", "B", "X", "Y"].iter().map(|s| s.to_string()).collect(),
        vec![
            (row([0, 0, 0, 0]), big.clone()),
            (row([1, 0, 0, 1]), big),
            (row([0, 1, 1, 0]), eps.clone()),
            (row([1, 1, 0, 0]), eps.clone()),
        ],
    )
}

pub const KR_MEASURES: [&str; 6] = ["I(X;Y)", "I(X;Y|A)", "I(X;Y|B)", "I(A;B)", "I(A;X|Y)", "I(A;Y|X)"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KrReport {
    pub eps: Rational,
    /// The measures of [`KR_MEASURES`], in order.
    pub measures: Vec<(String, Rational)>,
    /// `I(X;Y) / (I(X;Y|A) + I(X;Y|B) + I(A;B) + I(A;X|Y))`.
    pub ratio: Option<Rational>,
    /// For `k = 1..=10`: the right side of
    /// `I(X;Y) ≤ (k+3)/2 I(X;Y|A) + I(X;Y|B) + I(A;B) + (k+1)/2 I(A;X|Y) + 1/k I(A;Y|X)`.
    pub matus: Vec<(u32, Rational)>,
}

impl KrReport {
    pub fn measure(&self, name: &str) -> &Rational {
        &self.measures.iter().find(|(n, _)| n == name).expect("known measure").1
    }

    pub fn premises_vanish(&self) -> bool {
        ["I(X;Y|A)", "I(X;Y|B)", "I(A;B)"].iter().all(|m| self.measure(m).is_zero())
    }

    pub fn matus_holds(&self) -> bool {
        let lhs = self.measure("I(X;Y)");
        self.matus.iter().all(|(_, rhs)| lhs <= rhs)
    }
}

/// Evaluates the six measures on [`kr_distribution`] with logarithms exact
/// to 66 fractional bits. The three premise zeros come out exactly zero.
pub fn kr_exhibit(eps: &Rational) -> Result<KrReport> {
    let d = kr_distribution(eps)?;
    let h: SetFunction = d.entropy_vector(DEFAULT_ENTROPY_BITS)?;
    let u = h.universe().clone();
    let mut measures = Vec::new();
    for m in KR_MEASURES {
        measures.push((m.to_string(), h.eval(&LinExpr::parse(m, &u)?)?));
    }
    let get = |n: &str| measures.iter().find(|(m, _)| m == n).unwrap().1.clone();
    let denom = get("I(X;Y|A)") + get("I(X;Y|B)") + get("I(A;B)") + get("I(A;X|Y)");
    let ratio = if denom.is_zero() { None } else { Some(get("I(X;Y)") / denom) };
    let matus = (1..=10u32)
        .map(|k| {
            let kr = Rational::from_int(k as i64);
            let rhs = Rational::new(k as i64 + 3, 2) * get("I(X;Y|A)")
                + get("I(X;Y|B)")
                + get("I(A;B)")
                + Rational::new(k as i64 + 1, 2) * get("I(A;X|Y)")
                + get("I(A;Y|X)") / kr;
            (k, rhs)
        })
        .collect();
    Ok(KrReport { eps: eps.clone(), measures, ratio, matus })
}
