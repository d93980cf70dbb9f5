//! Compact Nelder-Mead simplex minimizer. Derivative-free on purpose: the
//! objectives it serves have kinks from max(0, .) terms and min/max
//! reductions over representation entries.

pub(crate) struct NelderMead {
    pub init_step: f64,
    pub max_iters: usize,
    /// Stop when the simplex value spread falls below this.
    pub ftol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            init_step: 0.3,
            max_iters: 300,
            ftol: 1e-13,
        }
    }
}

const ALPHA: f64 = 1.0; // reflection
const GAMMA: f64 = 2.0; // expansion
const RHO: f64 = 0.5; // contraction
const SIGMA: f64 = 0.5; // shrink

impl NelderMead {
    pub(crate) fn minimize<F: FnMut(&[f64]) -> f64>(
        &self,
        f: &mut F,
        x0: &[f64],
    ) -> (Vec<f64>, f64) {
        let n = x0.len();
        assert!(n > 0, "cannot optimize over zero parameters");
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.init_step;
            simplex.push(x);
        }
        let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();

        for _ in 0..self.max_iters {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let best = order[0];
            let second_worst = order[n - 1];
            let worst = order[n];
            if values[worst] - values[best] < self.ftol {
                break;
            }

            let mut centroid = vec![0.0; n];
            for &idx in &order[..n] {
                for (c, xi) in centroid.iter_mut().zip(&simplex[idx]) {
                    *c += xi;
                }
            }
            for c in &mut centroid {
                *c /= n as f64;
            }

            let reflected: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + ALPHA * (c - w))
                .collect();
            let f_reflected = f(&reflected);

            if f_reflected < values[best] {
                let expanded: Vec<f64> = centroid
                    .iter()
                    .zip(&reflected)
                    .map(|(c, r)| c + GAMMA * (r - c))
                    .collect();
                let f_expanded = f(&expanded);
                if f_expanded < f_reflected {
                    simplex[worst] = expanded;
                    values[worst] = f_expanded;
                } else {
                    simplex[worst] = reflected;
                    values[worst] = f_reflected;
                }
            } else if f_reflected < values[second_worst] {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            } else {
                let (toward, f_toward) = if f_reflected < values[worst] {
                    (reflected.clone(), f_reflected)
                } else {
                    (simplex[worst].clone(), values[worst])
                };
                let contracted: Vec<f64> = centroid
                    .iter()
                    .zip(&toward)
                    .map(|(c, t)| c + RHO * (t - c))
                    .collect();
                let f_contracted = f(&contracted);
                if f_contracted < f_toward {
                    simplex[worst] = contracted;
                    values[worst] = f_contracted;
                } else {
                    let best_point = simplex[best].clone();
                    for idx in 0..=n {
                        if idx == best {
                            continue;
                        }
                        for (x, b) in simplex[idx].iter_mut().zip(&best_point) {
                            *x = b + SIGMA * (*x - b);
                        }
                        values[idx] = f(&simplex[idx]);
                    }
                }
            }
        }

        let mut best = 0;
        for i in 1..values.len() {
            if values[i] < values[best] {
                best = i;
            }
        }
        (simplex[best].clone(), values[best])
    }
}
