//! Shared oracle machinery for integration tests.
//!
//! A self-contained adaptive Dormand–Prince RK5(4) integrator. It shares
//! no code with the library's solvers — no modal recurrences, no Newmark
//! algebra — so agreement between the two is evidence, not tautology.

// Not every test binary uses every helper.
#![allow(dead_code)]

/// One adaptive step attempt: returns (5th-order state, error estimate).
fn dp_step(
    rhs: &dyn Fn(f64, &[f64]) -> Vec<f64>,
    t: f64,
    y: &[f64],
    h: f64,
) -> (Vec<f64>, f64) {
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    // 5th-order weights equal the last A row; 4th-order weights below.
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let dim = y.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    for s in 0..7 {
        let mut ys = y.to_vec();
        for (j, kj) in k.iter().enumerate() {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..dim {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k.push(rhs(t + C[s] * h, &ys));
    }

    // 5th-order combination (stage 7 has zero weight) and the embedded
    // 4th-order one for the error estimate.
    let mut y5 = y.to_vec();
    let mut y4 = y.to_vec();
    for j in 0..6 {
        for i in 0..dim {
            y5[i] += h * A[6][j] * k[j][i];
        }
    }
    for j in 0..7 {
        for i in 0..dim {
            y4[i] += h * B4[j] * k[j][i];
        }
    }

    let mut err = 0.0_f64;
    for i in 0..dim {
        let scale = 1e-12 + 1e-10 * y[i].abs().max(y5[i].abs());
        let e = (y5[i] - y4[i]) / scale;
        err += e * e;
    }
    (y5, (err / dim as f64).sqrt())
}

/// Integrate `y' = rhs(t, y)` from `t0` to `t1` adaptively.
pub fn rk45(
    rhs: &dyn Fn(f64, &[f64]) -> Vec<f64>,
    t0: f64,
    y0: &[f64],
    t1: f64,
) -> Vec<f64> {
    let mut t = t0;
    let mut y = y0.to_vec();
    if t1 <= t0 {
        return y;
    }
    let mut h = (t1 - t0) * 1e-3;
    let h_min = (t1 - t0) * 1e-14;
    while t < t1 {
        h = h.min(t1 - t);
        let (y_new, err) = dp_step(rhs, t, &y, h);
        if err <= 1.0 || h <= h_min {
            t += h;
            y = y_new;
        }
        let factor = if err > 0.0 {
            0.9 * err.powf(-0.2)
        } else {
            5.0
        };
        h *= factor.clamp(0.2, 5.0);
        h = h.max(h_min);
    }
    y
}

/// Sample the solution of `y' = rhs(t, y)` on the uniform grid
/// `t_k = k·dt`, `k = 0..=n_steps`, integrating each segment adaptively.
/// Returns one state row per grid point.
pub fn rk45_on_grid(
    rhs: &dyn Fn(f64, &[f64]) -> Vec<f64>,
    y0: &[f64],
    dt: f64,
    n_steps: usize,
) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(n_steps + 1);
    rows.push(y0.to_vec());
    let mut y = y0.to_vec();
    for k in 0..n_steps {
        let t0 = dt * k as f64;
        y = rk45(rhs, t0, &y, t0 + dt);
        rows.push(y.clone());
    }
    rows
}

/// Relative L2 distance between two sampled series (second as reference).
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let scale: f64 = b.iter().map(|y| y * y).sum();
    if scale == 0.0 {
        diff.sqrt()
    } else {
        (diff / scale).sqrt()
    }
}
