use super::expr::{Compiled, Expr};
use super::{check_variables, mismatch, VectorField};
use crate::error::{Error, Result};
use crate::manifolds::ManifoldId;

/// Increasing multi-indices of length `k` from `0..dim`, in lexicographic order.
pub fn multi_indices(dim: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, dim: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(i + 1, dim, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= dim {
        rec(0, dim, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Sign of the permutation sorting the concatenation `a ++ b`, or `None` if they overlap.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(f64, Vec<usize>)> {
    let mut inversions = 0usize;
    for &i in a {
        for &j in b {
            if i == j {
                return None;
            }
            if i > j {
                inversions += 1;
            }
        }
    }
    let mut merged: Vec<usize> = a.iter().chain(b).copied().collect();
    merged.sort_unstable();
    Some((if inversions.is_multiple_of(2) { 1.0 } else { -1.0 }, merged))
}

/// Differential form `Σ_I c_I dx^I` over increasing multi-indices.
#[derive(Debug, Clone, PartialEq)]
pub struct KForm {
    pub manifold: ManifoldId,
    pub degree: usize,
    pub coeffs: Vec<Expr>,
}

impl KForm {
    pub fn zero(manifold: ManifoldId, degree: usize) -> Result<Self> {
        let dim = manifold.dim();
        if degree > dim {
            return Err(Error::DegreeOverflow { degree, dim });
        }
        Ok(KForm {
            manifold,
            degree,
            coeffs: vec![Expr::zero(); multi_indices(dim, degree).len()],
        })
    }

    pub fn new(manifold: ManifoldId, degree: usize, coeffs: Vec<Expr>) -> Result<Self> {
        let dim = manifold.dim();
        if degree > dim {
            return Err(Error::DegreeOverflow { degree, dim });
        }
        let want = multi_indices(dim, degree).len();
        if coeffs.len() != want {
            return Err(Error::InvalidInput(format!(
                "degree {degree} form on {manifold} needs {want} coefficients, got {}",
                coeffs.len()
            )));
        }
        for c in &coeffs {
            check_variables(manifold, c, true)?;
        }
        Ok(KForm {
            manifold,
            degree,
            coeffs,
        })
    }

    pub fn function(manifold: ManifoldId, f: Expr) -> Result<Self> {
        Self::new(manifold, 0, vec![f])
    }

    /// `f dx^i`.
    pub fn one_form(manifold: ManifoldId, coeffs: Vec<Expr>) -> Result<Self> {
        Self::new(manifold, 1, coeffs)
    }

    /// `f dx^0 ∧ … ∧ dx^{n-1}`.
    pub fn top(manifold: ManifoldId, f: Expr) -> Self {
        KForm {
            manifold,
            degree: manifold.dim(),
            coeffs: vec![f],
        }
    }

    pub fn indices(&self) -> Vec<Vec<usize>> {
        multi_indices(self.manifold.dim(), self.degree)
    }

    /// Coefficient on `dx^I` for an increasing `I`.
    pub fn coefficient(&self, index: &[usize]) -> Option<&Expr> {
        self.indices()
            .iter()
            .position(|i| i == index)
            .map(|p| &self.coeffs[p])
    }

    fn check_same(&self, other: &KForm) -> Result<()> {
        if self.manifold != other.manifold {
            return Err(mismatch(self.manifold, other.manifold));
        }
        Ok(())
    }

    pub fn add(&self, other: &KForm) -> Result<KForm> {
        self.check_same(other)?;
        if self.degree != other.degree {
            return Err(Error::InvalidInput(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(KForm {
            manifold: self.manifold,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn sub(&self, other: &KForm) -> Result<KForm> {
        self.add(&other.scale(Expr::num(-1.0)))
    }

    pub fn scale(&self, s: Expr) -> KForm {
        KForm {
            manifold: self.manifold,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| s.clone() * c.clone()).collect(),
        }
    }

    pub fn exterior_derivative(&self) -> Result<KForm> {
        let dim = self.manifold.dim();
        if self.degree >= dim {
            return Err(Error::DegreeOverflow {
                degree: self.degree,
                dim,
            });
        }
        let vars = self.manifold.variables();
        let target = multi_indices(dim, self.degree + 1);
        let mut out = vec![Expr::zero(); target.len()];
        for (index, coeff) in self.indices().iter().zip(&self.coeffs) {
            if coeff.is_zero() {
                continue;
            }
            for (j, var) in vars.iter().enumerate() {
                if let Some((sign, merged)) = merge_sign(&[j], index) {
                    let slot = target.iter().position(|t| *t == merged).unwrap();
                    let term = coeff.differentiate(var);
                    if term.is_zero() {
                        continue;
                    }
                    let prev = std::mem::replace(&mut out[slot], Expr::zero());
                    out[slot] = if sign > 0.0 { prev + term } else { prev - term };
                }
            }
        }
        Ok(KForm {
            manifold: self.manifold,
            degree: self.degree + 1,
            coeffs: out,
        })
    }

    pub fn wedge(&self, other: &KForm) -> Result<KForm> {
        self.check_same(other)?;
        let dim = self.manifold.dim();
        let degree = self.degree + other.degree;
        if degree > dim {
            return Err(Error::DegreeOverflow { degree, dim });
        }
        let target = multi_indices(dim, degree);
        let mut out = vec![Expr::zero(); target.len()];
        for (ia, ca) in self.indices().iter().zip(&self.coeffs) {
            if ca.is_zero() {
                continue;
            }
            for (ib, cb) in other.indices().iter().zip(&other.coeffs) {
                if cb.is_zero() {
                    continue;
                }
                if let Some((sign, merged)) = merge_sign(ia, ib) {
                    let slot = target.iter().position(|t| *t == merged).unwrap();
                    let term = ca.clone() * cb.clone();
                    let prev = std::mem::replace(&mut out[slot], Expr::zero());
                    out[slot] = if sign > 0.0 { prev + term } else { prev - term };
                }
            }
        }
        Ok(KForm {
            manifold: self.manifold,
            degree,
            coeffs: out,
        })
    }

    /// Interior product `ι_X ω`.
    pub fn contract(&self, x: &VectorField) -> Result<KForm> {
        if self.manifold != x.manifold {
            return Err(mismatch(self.manifold, x.manifold));
        }
        if self.degree == 0 {
            return Err(Error::InvalidInput("cannot contract a function".into()));
        }
        let dim = self.manifold.dim();
        let target = multi_indices(dim, self.degree - 1);
        let mut out = vec![Expr::zero(); target.len()];
        for (index, coeff) in self.indices().iter().zip(&self.coeffs) {
            if coeff.is_zero() {
                continue;
            }
            for (a, &i) in index.iter().enumerate() {
                let comp = &x.components[i];
                if comp.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = index.iter().copied().filter(|&j| j != i).collect();
                let slot = target.iter().position(|t| *t == rest).unwrap();
                let term = comp.clone() * coeff.clone();
                let prev = std::mem::replace(&mut out[slot], Expr::zero());
                out[slot] = if a % 2 == 0 { prev + term } else { prev - term };
            }
        }
        Ok(KForm {
            manifold: self.manifold,
            degree: self.degree - 1,
            coeffs: out,
        })
    }

    /// Pull back along `map`, which gives each coordinate of `self.manifold`
    /// as an expression in the coordinates of `source`.
    pub fn pullback(&self, source: ManifoldId, map: &[Expr]) -> Result<KForm> {
        let target_vars = self.manifold.variables();
        if map.len() != target_vars.len() {
            return Err(Error::InvalidInput(format!(
                "map into {} needs {} components",
                self.manifold,
                target_vars.len()
            )));
        }
        let src_dim = source.dim();
        if self.degree > src_dim {
            return Err(Error::DegreeOverflow {
                degree: self.degree,
                dim: src_dim,
            });
        }
        let src_vars = source.variables();
        let bindings: Vec<(&str, Expr)> = target_vars
            .iter()
            .copied()
            .zip(map.iter().cloned())
            .collect();
        // jac[j][i] = ∂ map_j / ∂ src_i
        let jac: Vec<Vec<Expr>> = map
            .iter()
            .map(|m| src_vars.iter().map(|v| m.differentiate(v)).collect())
            .collect();
        let src_indices = multi_indices(src_dim, self.degree);
        let mut out = vec![Expr::zero(); src_indices.len()];
        for (tj, coeff) in self.indices().iter().zip(&self.coeffs) {
            if coeff.is_zero() {
                continue;
            }
            let pulled = coeff.substitute_all(&bindings);
            for (slot, si) in src_indices.iter().enumerate() {
                let minor: Vec<Vec<Expr>> = tj
                    .iter()
                    .map(|&j| si.iter().map(|&i| jac[j][i].clone()).collect())
                    .collect();
                let det = determinant(&minor);
                if det.is_zero() {
                    continue;
                }
                let prev = std::mem::replace(&mut out[slot], Expr::zero());
                out[slot] = prev + pulled.clone() * det;
            }
        }
        Ok(KForm {
            manifold: source,
            degree: self.degree,
            coeffs: out,
        })
    }

    pub fn compile(&self) -> Result<CompiledForm> {
        let mut slots = self.manifold.variables();
        slots.push("t");
        Ok(CompiledForm {
            dim: self.manifold.dim(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.compile(&slots))
                .collect::<Result<Vec<_>>>()?,
        })
    }
}

fn determinant(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = Expr::zero();
            for col in 0..n {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Expr>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != col)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][col].clone() * determinant(&minor);
                acc = if col % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

/// Form coefficients compiled against chart coordinates then `t`.
#[derive(Debug, Clone)]
pub struct CompiledForm {
    dim: usize,
    coeffs: Vec<Compiled>,
}

impl CompiledForm {
    pub fn eval(&self, p: &[f64; 3], t: f64) -> Vec<f64> {
        let mut slots = [0.0; 4];
        slots[..self.dim].copy_from_slice(&p[..self.dim]);
        slots[self.dim] = t;
        self.coeffs.iter().map(|c| c.eval(&slots)).collect()
    }

    pub fn eval_coeff(&self, k: usize, p: &[f64; 3], t: f64) -> f64 {
        let mut slots = [0.0; 4];
        slots[..self.dim].copy_from_slice(&p[..self.dim]);
        slots[self.dim] = t;
        self.coeffs[k].eval(&slots)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}
