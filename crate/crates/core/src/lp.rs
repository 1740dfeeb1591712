//! Dense two-phase simplex for the small linear programs of contour planning.
//!
//! Problems here have at most a few dozen rows and columns, so a textbook
//! tableau with Bland's anti-cycling rule is adequate.

const EPS: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations over columns `< allowed`. Returns false if unbounded.
    fn run(&mut self, allowed: usize) -> bool {
        let rhs = self.width;
        for _ in 0..10_000 {
            let entering = (0..allowed).find(|&j| self.obj[j] < -EPS);
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > EPS {
                    let ratio = row[rhs] / row[c];
                    match best {
                        None => best = Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - EPS
                                || ((ratio - br).abs() <= EPS && self.basis[i] < self.basis[bi])
                            {
                                best = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
        true
    }
}

/// Maximizes `c·x` subject to `A x <= b`, `x >= 0`.
pub(crate) fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    let n = c.len();
    let m = b.len();
    let n_art = b.iter().filter(|&&v| v < 0.0).count();
    let width = n + m + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = n + m;
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; width + 1];
        for j in 0..n {
            row[j] = sign * a[i][j];
        }
        row[n + i] = sign;
        row[width] = sign * b[i];
        if b[i] < 0.0 {
            row[art] = 1.0;
            basis.push(art);
            art += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        obj: vec![0.0; width + 1],
        basis,
        width,
    };

    if n_art > 0 {
        for j in n + m..width {
            t.obj[j] = 1.0;
        }
        for i in 0..m {
            if t.basis[i] >= n + m {
                let row = t.rows[i].clone();
                for (v, rv) in t.obj.iter_mut().zip(&row) {
                    *v -= rv;
                }
            }
        }
        t.run(width);
        if t.obj[width] < -1e-9 {
            return LpOutcome::Infeasible;
        }
        for i in 0..m {
            if t.basis[i] >= n + m {
                if let Some(c) = (0..n + m).find(|&j| t.rows[i][j].abs() > EPS) {
                    t.pivot(i, c);
                }
            }
        }
    }

    t.obj = vec![0.0; width + 1];
    for j in 0..n {
        t.obj[j] = -c[j];
    }
    for i in 0..m {
        let bj = t.basis[i];
        if bj < n && c[bj] != 0.0 {
            let f = t.obj[bj];
            let row = t.rows[i].clone();
            for (v, rv) in t.obj.iter_mut().zip(&row) {
                *v -= f * rv;
            }
        }
    }
    if !t.run(n + m) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![0.0; n];
    for (i, &bj) in t.basis.iter().enumerate() {
        if bj < n {
            x[bj] = t.rows[i][width];
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y; x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let out = maximize(
            &[3.0, 5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
        );
        match out {
            LpOutcome::Optimal { x, value } => {
                assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
                assert!((value - 36.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // max -x - y; x + y >= 2 (i.e. -x - y <= -2), x <= 3
        let out = maximize(
            &[-1.0, -1.0],
            &[vec![-1.0, -1.0], vec![1.0, 0.0]],
            &[-2.0, 3.0],
        );
        match out {
            LpOutcome::Optimal { value, .. } => assert!((value + 2.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        assert_eq!(
            maximize(&[1.0], &[vec![1.0], vec![-1.0]], &[1.0, -2.0]),
            LpOutcome::Infeasible
        );
        assert_eq!(
            maximize(&[1.0], &[vec![-1.0]], &[1.0]),
            LpOutcome::Unbounded
        );
    }
}
