//! Two-parameter downhill simplex with a finite-difference Newton polish.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub x: [f64; 2],
    pub fx: f64,
    pub evaluations: usize,
    pub converged: bool,
}

fn dist(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Minimizes `f` from `x0` with initial edge `step`.
///
/// Stops once the simplex diameter is below `tol`, or once the vertex values agree to
/// roundoff on a simplex already smaller than 1e-4.
pub fn nelder_mead<F: Fn([f64; 2]) -> f64>(f: F, x0: [f64; 2], step: f64, tol: f64, max_evals: usize) -> Outcome {
    let mut pts = [x0, [x0[0] + step, x0[1]], [x0[0], x0[1] + step]];
    let mut vals = [f(pts[0]), f(pts[1]), f(pts[2])];
    let mut evals = 3;
    loop {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        pts = [pts[idx[0]], pts[idx[1]], pts[idx[2]]];
        vals = [vals[idx[0]], vals[idx[1]], vals[idx[2]]];

        let diam = dist(&pts[0], &pts[1]).max(dist(&pts[0], &pts[2])).max(dist(&pts[1], &pts[2]));
        let spread = vals[2] - vals[0];
        let flat = spread <= 4.0 * f64::EPSILON * vals[0].abs() + f64::MIN_POSITIVE;
        if diam < tol || (flat && diam < 1e-4) {
            return Outcome { x: pts[0], fx: vals[0], evaluations: evals, converged: true };
        }
        if evals >= max_evals || !vals[0].is_finite() {
            return Outcome { x: pts[0], fx: vals[0], evaluations: evals, converged: false };
        }

        let c = [0.5 * (pts[0][0] + pts[1][0]), 0.5 * (pts[0][1] + pts[1][1])];
        let along = |t: f64| [c[0] + t * (pts[2][0] - c[0]), c[1] + t * (pts[2][1] - c[1])];
        let xr = along(-1.0);
        let fr = f(xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(xe);
            evals += 1;
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
            continue;
        }
        if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[2] {
            let x = along(-0.5);
            (x, f(x))
        } else {
            let x = along(0.5);
            (x, f(x))
        };
        evals += 1;
        if fc < vals[2].min(fr) {
            pts[2] = xc;
            vals[2] = fc;
            continue;
        }
        for i in 1..3 {
            pts[i] = [0.5 * (pts[0][0] + pts[i][0]), 0.5 * (pts[0][1] + pts[i][1])];
            vals[i] = f(pts[i]);
            evals += 1;
        }
    }
}

/// Central-difference gradient and Hessian with step h.
pub fn fd_derivatives<F: Fn([f64; 2]) -> f64>(f: &F, x: [f64; 2], h: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let at = |a: f64, b: f64| f([x[0] + a * h, x[1] + b * h]);
    let f0 = at(0.0, 0.0);
    let (fp0, fm0, f0p, f0m) = (at(1.0, 0.0), at(-1.0, 0.0), at(0.0, 1.0), at(0.0, -1.0));
    let g = [(fp0 - fm0) / (2.0 * h), (f0p - f0m) / (2.0 * h)];
    let hxx = (fp0 - 2.0 * f0 + fm0) / (h * h);
    let hyy = (f0p - 2.0 * f0 + f0m) / (h * h);
    let hxy = (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * h * h);
    (g, [[hxx, hxy], [hxy, hyy]])
}

/// A few Newton steps from `x` using difference derivatives; only accepted when they lower f.
pub fn newton_polish<F: Fn([f64; 2]) -> f64>(f: &F, mut x: [f64; 2], mut fx: f64, h: f64, steps: usize) -> ([f64; 2], f64) {
    for _ in 0..steps {
        let (g, hs) = fd_derivatives(f, x, h);
        let det = hs[0][0] * hs[1][1] - hs[0][1] * hs[1][0];
        if !(hs[0][0] > 0.0 && det > 0.0) {
            break;
        }
        let dx = [
            -(hs[1][1] * g[0] - hs[0][1] * g[1]) / det,
            -(-hs[1][0] * g[0] + hs[0][0] * g[1]) / det,
        ];
        let xn = [x[0] + dx[0], x[1] + dx[1]];
        let fnew = f(xn);
        if !(fnew <= fx) {
            break;
        }
        x = xn;
        fx = fnew;
        if dx[0].abs().max(dx[1].abs()) < 1e-12 {
            break;
        }
    }
    (x, fx)
}
