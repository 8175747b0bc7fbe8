//! Dense symmetric tensor values of small order and dimension.

/// Visit every multi-index of length `m` with entries in `0..n`.
pub fn for_each_index(n: usize, m: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; m];
    loop {
        f(&idx);
        let mut k = 0;
        loop {
            if k == m {
                return;
            }
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// A (not necessarily symmetric) tensor of order `m` over dimension `n ≤ 3`,
/// stored as the full `n^m` component array. Orders up to 4 are supported.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor {
    pub n: usize,
    pub order: usize,
    a: Vec<f64>,
}

fn perms(m: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            cur.push(v);
            rec(cur, rest, out);
            cur.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..m).collect(), &mut out);
    out
}

impl SymTensor {
    pub fn zeros(n: usize, order: usize) -> Self {
        assert!(n <= 3 && order <= 4);
        SymTensor { n, order, a: vec![0.0; n.pow(order as u32)] }
    }

    pub fn scalar(v: f64) -> Self {
        SymTensor { n: 1, order: 0, a: vec![v] }
    }

    #[inline]
    fn flat(&self, idx: &[usize]) -> usize {
        let mut f = 0;
        for &i in idx {
            f = f * self.n + i;
        }
        f
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.a[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let f = self.flat(idx);
        self.a[f] = v;
    }

    /// Set a component together with all index permutations.
    pub fn set_sym(&mut self, idx: &[usize], v: f64) {
        for p in perms(self.order) {
            let permuted: Vec<usize> = p.iter().map(|&k| idx[k]).collect();
            let f = self.flat(&permuted);
            self.a[f] = v;
        }
    }

    pub fn add_assign(&mut self, other: &SymTensor, scale: f64) {
        assert_eq!(self.a.len(), other.a.len());
        for (x, y) in self.a.iter_mut().zip(&other.a) {
            *x += scale * y;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for x in self.a.iter_mut() {
            *x *= s;
        }
    }

    /// Full symmetrization: averages over all index permutations.
    pub fn symmetrized(&self) -> SymTensor {
        let mut out = SymTensor::zeros(self.n, self.order);
        let ps = perms(self.order);
        let inv = 1.0 / ps.len() as f64;
        let mut idx = vec![0usize; self.order];
        loop {
            let mut s = 0.0;
            for p in &ps {
                let permuted: Vec<usize> = p.iter().map(|&k| idx[k]).collect();
                s += self.get(&permuted);
            }
            let f = out.flat(&idx);
            out.a[f] = s * inv;
            // advance multi-index
            let mut k = 0;
            loop {
                if k == self.order {
                    return out;
                }
                idx[k] += 1;
                if idx[k] < self.n {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    /// Evaluate on `m` copies of one vector: `T(u, u, ..., u)`.
    pub fn eval_power(&self, u: &[f64]) -> f64 {
        match self.order {
            0 => self.a[0],
            _ => {
                let mut idx = vec![0usize; self.order];
                let mut total = 0.0;
                loop {
                    let mut prod = self.a[self.flat(&idx)];
                    if prod != 0.0 {
                        for &i in &idx {
                            prod *= u[i];
                        }
                        total += prod;
                    }
                    let mut k = 0;
                    loop {
                        if k == self.order {
                            return total;
                        }
                        idx[k] += 1;
                        if idx[k] < self.n {
                            break;
                        }
                        idx[k] = 0;
                        k += 1;
                    }
                }
            }
        }
    }

    /// Evaluate on one vector per slot: `T(v₁, ..., v_m)`.
    pub fn eval_mixed(&self, vecs: &[&[f64; 3]]) -> f64 {
        assert_eq!(vecs.len(), self.order);
        if self.order == 0 {
            return self.a[0];
        }
        let mut total = 0.0;
        let n = self.n;
        let order = self.order;
        let mut idx = vec![0usize; order];
        loop {
            let mut prod = self.a[self.flat(&idx)];
            if prod != 0.0 {
                for (s, &i) in idx.iter().enumerate() {
                    prod *= vecs[s][i];
                }
                total += prod;
            }
            let mut k = 0;
            loop {
                if k == order {
                    return total;
                }
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    /// Contract the first slot with a vector, returning an order−1 tensor.
    pub fn contract_first(&self, u: &[f64]) -> SymTensor {
        assert!(self.order >= 1);
        let mut out = SymTensor::zeros(self.n, self.order - 1);
        let stride = self.n.pow((self.order - 1) as u32);
        for j in 0..stride {
            let mut s = 0.0;
            for (i, ui) in u.iter().enumerate().take(self.n) {
                s += ui * self.a[i * stride + j];
            }
            out.a[j] = s;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn symmetrization_is_projection() {
        let mut t = SymTensor::zeros(3, 3);
        // arbitrary asymmetric fill
        let mut v = 1.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    t.set(&[i, j, k], v);
                    v += 0.37;
                }
            }
        }
        let s = t.symmetrized();
        let ss = s.symmetrized();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_relative_eq!(s.get(&[i, j, k]), ss.get(&[i, j, k]), epsilon = 1e-12);
                    assert_relative_eq!(s.get(&[i, j, k]), s.get(&[k, i, j]), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn eval_power_quadratic() {
        let mut t = SymTensor::zeros(2, 2);
        t.set_sym(&[0, 0], 2.0);
        t.set_sym(&[0, 1], 0.5);
        t.set_sym(&[1, 1], -1.0);
        let u = [1.0, 3.0];
        // 2·1 + 2·0.5·3 + (−1)·9 = −4
        assert_relative_eq!(t.eval_power(&u), -4.0, epsilon = 1e-14);
    }
}
