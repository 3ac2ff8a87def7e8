use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::setfn::SetFunction;
use crate::vars::{VarSet, VarUniverse};

/// Coefficients `a_V` (for non-empty `V`) of `h = Σ a_V h^V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalDecomposition {
    universe: VarUniverse,
    coeffs: Vec<Rational>,
}

impl NormalDecomposition {
    pub fn new(universe: &VarUniverse, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != universe.size() {
            return Err(Error::UniverseMismatch("coefficient vector has the wrong length".into()));
        }
        if !coeffs[0].is_zero() {
            return Err(Error::Invalid("the empty set carries no step function".into()));
        }
        Ok(NormalDecomposition { universe: universe.clone(), coeffs })
    }

    pub fn from_terms(universe: &VarUniverse, terms: &[(VarSet, Rational)]) -> Result<Self> {
        let mut c = vec![Rational::zero(); universe.size()];
        for (v, a) in terms {
            universe.check(*v)?;
            c[v.index()] += a;
        }
        Self::new(universe, c)
    }

    pub fn universe(&self) -> &VarUniverse {
        &self.universe
    }

    pub fn coeff(&self, v: VarSet) -> &Rational {
        &self.coeffs[v.index()]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Non-zero coefficients in mask order.
    pub fn support(&self) -> impl Iterator<Item = (VarSet, &Rational)> {
        self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(i, a)| (VarSet(i as u32), a))
    }

    pub fn is_nonneg(&self) -> bool {
        self.coeffs.iter().all(|a| !a.is_negative())
    }

    /// `h(U) = Σ_{V ∩ U ≠ ∅} a_V`.
    pub fn reconstruct(&self) -> SetFunction {
        let n = self.universe.len();
        // z(S) = Σ_{V ⊆ S} a_V
        let mut z = self.coeffs.clone();
        for i in 0..n {
            let bit = 1usize << i;
            for m in 0..z.len() {
                if m & bit != 0 {
                    let lo = z[m ^ bit].clone();
                    z[m] += lo;
                }
            }
        }
        let full = self.universe.full();
        let total = z[full.index()].clone();
        SetFunction::from_fn(&self.universe, |u| &total - &z[full.difference(u).index()])
    }
}

/// The unique `a` with `h = Σ a_V h^V` (for `h(∅) = 0`):
/// `a_U = -Σ_{V ⊆ U} (-1)^{|V|} h(V | X - U)`.
pub fn mobius_decompose(h: &SetFunction) -> Result<NormalDecomposition> {
    if !h.get(VarSet::EMPTY).is_zero() {
        return Err(Error::Invalid("h(∅) must be zero".into()));
    }
    let u = h.universe();
    let full = u.full();
    // g = Möbius inverse of f(T) = h(X - T); then a_U = -g(U).
    let mut g: Vec<Rational> = u.all_sets().map(|t| h.get(full.difference(t)).clone()).collect();
    for i in 0..u.len() {
        let bit = 1usize << i;
        for m in 0..g.len() {
            if m & bit != 0 {
                let lo = g[m ^ bit].clone();
                g[m] -= lo;
            }
        }
    }
    let mut coeffs: Vec<Rational> = g.into_iter().map(|v| -v).collect();
    coeffs[0] = Rational::zero();
    NormalDecomposition::new(u, coeffs)
}

/// Non-negative combination of step functions.
pub fn is_normal(h: &SetFunction) -> bool {
    mobius_decompose(h).map(|d| d.is_nonneg()).unwrap_or(false)
}

/// `h ≥ 0` and `h(S) = Σ_{i ∈ S} h(X_i)`.
pub fn is_modular(h: &SetFunction) -> bool {
    let u = h.universe();
    (0..u.len()).all(|i| !h.get(VarSet::singleton(i)).is_negative())
        && u.all_sets().all(|s| *h.get(s) == s.iter().map(|i| h.get(VarSet::singleton(i)).clone()).sum())
}

/// `h'(U) = Σ_{X_i ∈ U} h(X_i | predecessors of X_i in order)`.
pub fn modularize(h: &SetFunction, order: &[usize]) -> Result<SetFunction> {
    let u = h.universe();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..u.len()).collect::<Vec<_>>() {
        return Err(Error::Invalid("order must be a permutation of the universe".into()));
    }
    let mut weight = vec![Rational::zero(); u.len()];
    let mut prefix = VarSet::EMPTY;
    for &i in order {
        weight[i] = h.cond(VarSet::singleton(i), prefix);
        prefix = prefix.insert(i);
    }
    Ok(SetFunction::from_fn(u, |s| s.iter().map(|i| weight[i].clone()).sum()))
}

/// A normal polymatroid `h' ≤ h` agreeing with `h` on `X` and on every
/// singleton. Eliminates the last variable `X_n` recursively:
/// `h' = Σ b_V h^V + Σ c_V h^{V ∪ X_n} + a h^{X_n}`, where `b` normalizes
/// `U ↦ h(U | X_n)`, `c` decomposes `U ↦ max_{X_i ∈ U} I(X_i; X_n)`, and
/// `a = h(X_n) - max_i I(X_i; X_n)`.
pub fn normalize(h: &SetFunction) -> Result<NormalDecomposition> {
    if let Some(v) = super::check_polymatroid(h) {
        return Err(Error::Invalid(format!("not a polymatroid: {v:?}")));
    }
    let terms = normal_terms(&|s| h.get(s).clone(), h.universe().full());
    NormalDecomposition::from_terms(h.universe(), &terms)
}

fn normal_terms(h: &dyn Fn(VarSet) -> Rational, vars: VarSet) -> Vec<(VarSet, Rational)> {
    let Some(last) = vars.last() else {
        return Vec::new();
    };
    let xn = VarSet::singleton(last);
    let rest = vars.remove(last);
    let hn = h(xn);
    if rest.is_empty() {
        return vec![(xn, hn)];
    }
    let h1 = |s: VarSet| h(s.union(xn)) - &hn;
    let mut out = normal_terms(&h1, rest);
    let mut alpha: Vec<(Rational, usize)> = rest
        .iter()
        .map(|i| {
            let xi = VarSet::singleton(i);
            (h(xi) + &hn - h(xi.union(xn)), i)
        })
        .collect();
    alpha.sort();
    // max_{i ∈ U} α_i = Σ_k δ_k [U meets {i_k, ..., i_m}]
    let mut prev = Rational::zero();
    for k in 0..alpha.len() {
        let delta = &alpha[k].0 - &prev;
        prev = alpha[k].0.clone();
        let tail = VarSet::from_indices(alpha[k..].iter().map(|(_, i)| *i));
        out.push((tail.union(xn), delta));
    }
    out.push((xn, hn - prev));
    out
}
