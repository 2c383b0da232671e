//! Derivative-free local minimization (Nelder–Mead simplex).

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_iterations: usize,
    /// Stop when the spread of simplex values falls below this.
    pub tolerance: f64,
    /// Edge length of the initial simplex along each axis.
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            tolerance: 1e-9,
            initial_step: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

impl NelderMead {
    pub fn minimize(&self, f: impl Fn(&[f64]) -> f64, x0: &[f64]) -> Minimum {
        let n = x0.len();
        if n == 0 {
            return Minimum {
                x: Vec::new(),
                value: f(x0),
                iterations: 0,
            };
        }
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for i in 0..n {
            let mut v = x0.to_vec();
            v[i] += self.initial_step;
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

        let mut iterations = 0;
        while iterations < self.max_iterations {
            iterations += 1;
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            if (values[n] - values[0]).abs() <= self.tolerance {
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
                .collect();
            let towards = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let reflected = towards(REFLECT);
            let fr = f(&reflected);
            if fr < values[0] {
                let expanded = towards(EXPAND);
                let fe = f(&expanded);
                if fe < fr {
                    simplex[n] = expanded;
                    values[n] = fe;
                } else {
                    simplex[n] = reflected;
                    values[n] = fr;
                }
            } else if fr < values[n - 1] {
                simplex[n] = reflected;
                values[n] = fr;
            } else {
                let (candidate, fc) = if fr < values[n] {
                    let c = towards(CONTRACT * REFLECT);
                    let fc = f(&c);
                    (c, fc)
                } else {
                    let c = towards(-CONTRACT);
                    let fc = f(&c);
                    (c, fc)
                };
                if fc < values[n].min(fr) {
                    simplex[n] = candidate;
                    values[n] = fc;
                } else {
                    let best = simplex[0].clone();
                    for i in 1..=n {
                        for (x, b) in simplex[i].iter_mut().zip(&best) {
                            *x = b + SHRINK * (*x - b);
                        }
                        values[i] = f(&simplex[i]);
                    }
                }
            }
        }
        let best = (0..=n)
            .min_by(|&a, &b| values[a].total_cmp(&values[b]))
            .expect("non-empty simplex");
        Minimum {
            x: simplex[best].clone(),
            value: values[best],
            iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let nm = NelderMead {
            max_iterations: 500,
            tolerance: 1e-14,
            initial_step: 0.5,
        };
        let m = nm.minimize(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2),
            &[0.0, 0.0],
        );
        assert!((m.x[0] - 1.0).abs() < 1e-5);
        assert!((m.x[1] + 0.5).abs() < 1e-5);
        assert!(m.value < 1e-10);
    }

    #[test]
    fn rosenbrock() {
        let nm = NelderMead {
            max_iterations: 5000,
            tolerance: 1e-16,
            initial_step: 0.5,
        };
        let m = nm.minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
        );
        assert!((m.x[0] - 1.0).abs() < 1e-3 && (m.x[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| x[0].sin() + x[1].cos();
        let x0 = [0.3, 0.2];
        let m = NelderMead::default().minimize(f, &x0);
        assert!(m.value <= f(&x0));
        assert!(m.iterations <= 200);
    }
}
