//! Exact two-phase simplex over any ordered field, with Bland's rule so it
//! always terminates.

use crate::linalg::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpResult<F> {
    Optimal { value: F, x: Vec<F> },
    Infeasible,
    Unbounded,
}

impl<F> LpResult<F> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpResult::Infeasible)
    }
}

/// Maximize `objective . x` subject to linear rows. Variables are
/// nonnegative unless marked free.
#[derive(Clone, Debug)]
pub struct Lp<F> {
    nvars: usize,
    free: Vec<bool>,
    rows: Vec<(Vec<F>, Sense, F)>,
    objective: Vec<F>,
    minimizing: bool,
}

impl<F: Field> Lp<F> {
    pub fn new(nvars: usize) -> Self {
        Lp {
            nvars,
            free: vec![false; nvars],
            rows: Vec::new(),
            objective: vec![F::zero(); nvars],
            minimizing: false,
        }
    }

    /// All variables free.
    pub fn new_free(nvars: usize) -> Self {
        let mut lp = Lp::new(nvars);
        lp.free = vec![true; nvars];
        lp
    }

    pub fn set_free(&mut self, var: usize, free: bool) -> &mut Self {
        self.free[var] = free;
        self
    }

    pub fn constraint(&mut self, coeffs: Vec<F>, sense: Sense, rhs: F) -> &mut Self {
        assert_eq!(coeffs.len(), self.nvars);
        self.rows.push((coeffs, sense, rhs));
        self
    }

    pub fn maximize(&mut self, objective: Vec<F>) -> &mut Self {
        assert_eq!(objective.len(), self.nvars);
        self.objective = objective;
        self.minimizing = false;
        self
    }

    pub fn minimize(&mut self, objective: Vec<F>) -> &mut Self {
        self.maximize(objective.iter().map(|c| c.neg()).collect());
        self.minimizing = true;
        self
    }

    pub fn feasible(&self) -> bool {
        let mut lp = self.clone();
        lp.objective = vec![F::zero(); self.nvars];
        lp.solve().is_feasible()
    }

    pub fn solve(&self) -> LpResult<F> {
        // column layout: split variables, then slacks/surplus, then artificials
        let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(self.nvars);
        let mut ncols = 0;
        for v in 0..self.nvars {
            if self.free[v] {
                col_of.push((ncols, Some(ncols + 1)));
                ncols += 2;
            } else {
                col_of.push((ncols, None));
                ncols += 1;
            }
        }
        let structural = ncols;
        let m = self.rows.len();
        let mut rows: Vec<Vec<F>> = Vec::with_capacity(m);
        let mut senses = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (coeffs, sense, b) in &self.rows {
            let mut r = vec![F::zero(); structural];
            for (v, c) in coeffs.iter().enumerate() {
                let (p, n) = col_of[v];
                r[p] = c.clone();
                if let Some(n) = n {
                    r[n] = c.neg();
                }
            }
            let (mut r, mut s, mut b) = (r, *sense, b.clone());
            if b.signum() < 0 {
                r = r.iter().map(|x| x.neg()).collect();
                b = b.neg();
                s = match s {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
            }
            rows.push(r);
            senses.push(s);
            rhs.push(b);
        }
        let nslack = senses.iter().filter(|s| **s != Sense::Eq).count();
        let nart = senses.iter().filter(|s| **s != Sense::Le).count();
        let total = structural + nslack + nart;
        let mut t: Vec<Vec<F>> = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut si, mut ai) = (structural, structural + nslack);
        for i in 0..m {
            let mut r = rows[i].clone();
            r.resize(total + 1, F::zero());
            match senses[i] {
                Sense::Le => {
                    r[si] = F::one();
                    basis.push(si);
                    si += 1;
                }
                Sense::Ge => {
                    r[si] = F::one().neg();
                    si += 1;
                    r[ai] = F::one();
                    basis.push(ai);
                    ai += 1;
                }
                Sense::Eq => {
                    r[ai] = F::one();
                    basis.push(ai);
                    ai += 1;
                }
            }
            r[total] = rhs[i].clone();
            t.push(r);
        }
        let art_start = structural + nslack;
        let mut tab = Tableau {
            t,
            basis,
            ncols: total,
            allowed: vec![true; total],
        };

        if nart > 0 {
            let mut c1 = vec![F::zero(); total];
            for c in c1.iter_mut().skip(art_start) {
                *c = F::one().neg();
            }
            if tab.run(&c1) == Run::Unbounded {
                unreachable!("phase one is bounded");
            }
            if tab.value(&c1).signum() < 0 {
                return LpResult::Infeasible;
            }
            // drive artificials out of the basis, dropping redundant rows
            let mut i = 0;
            while i < tab.t.len() {
                if tab.basis[i] >= art_start {
                    match (0..art_start).find(|&j| !tab.t[i][j].is_zero()) {
                        Some(j) => {
                            tab.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            tab.t.remove(i);
                            tab.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
            for a in tab.allowed.iter_mut().skip(art_start) {
                *a = false;
            }
        }

        let mut c2 = vec![F::zero(); total];
        for (v, c) in self.objective.iter().enumerate() {
            let (p, n) = col_of[v];
            c2[p] = c.clone();
            if let Some(n) = n {
                c2[n] = c.neg();
            }
        }
        if tab.run(&c2) == Run::Unbounded {
            return LpResult::Unbounded;
        }
        let mut full = vec![F::zero(); total];
        for (i, &b) in tab.basis.iter().enumerate() {
            full[b] = tab.t[i][total].clone();
        }
        let x: Vec<F> = col_of
            .iter()
            .map(|&(p, n)| match n {
                Some(n) => full[p].sub(&full[n]),
                None => full[p].clone(),
            })
            .collect();
        let value = self
            .objective
            .iter()
            .zip(&x)
            .fold(F::zero(), |acc, (c, v)| acc.add(&c.mul(v)));
        let value = if self.minimizing { value.neg() } else { value };
        LpResult::Optimal { value, x }
    }
}

#[derive(PartialEq, Eq)]
enum Run {
    Optimal,
    Unbounded,
}

struct Tableau<F> {
    t: Vec<Vec<F>>,
    basis: Vec<usize>,
    ncols: usize,
    allowed: Vec<bool>,
}

impl<F: Field> Tableau<F> {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = F::one().div(&self.t[r][c]);
        for x in self.t[r].iter_mut() {
            *x = x.mul(&inv);
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *x = x.sub(&p.mul(&f));
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    fn value(&self, c: &[F]) -> F {
        self.basis
            .iter()
            .enumerate()
            .fold(F::zero(), |acc, (i, &b)| acc.add(&c[b].mul(&self.t[i][self.ncols])))
    }

    fn run(&mut self, c: &[F]) -> Run {
        loop {
            // Bland: lowest-index column with positive reduced cost
            let mut entering = None;
            for j in 0..self.ncols {
                if !self.allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut z = F::zero();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !c[b].is_zero() && !self.t[i][j].is_zero() {
                        z = z.add(&c[b].mul(&self.t[i][j]));
                    }
                }
                if c[j].sub(&z).signum() > 0 {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                return Run::Optimal;
            };
            let mut leave: Option<(usize, F)> = None;
            for i in 0..self.t.len() {
                if self.t[i][j].signum() > 0 {
                    let ratio = self.t[i][self.ncols].div(&self.t[i][j]);
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                None => return Run::Unbounded,
                Some((i, _)) => self.pivot(i, j),
            }
        }
    }
}
