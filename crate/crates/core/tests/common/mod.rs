#![allow(dead_code)]
//! Reference evaluations written independently of the library: each condition
//! is typed out literally in plain f64 from the published inequality lists.

pub mod oracle {
    fn pos(x: f64) -> f64 {
        x.max(0.0)
    }

    /// (label, holds) pairs for the dimension's family.
    pub fn labels(n: u32, p: f64, m: f64, a: f64) -> Vec<&'static str> {
        let nf = n as f64;
        let mut out = Vec::new();
        let mut push = |name: &'static str, ok: bool| {
            if ok {
                out.push(name)
            }
        };
        match n {
            3 => {
                push("A1", 1.0 - 1.0 / p < a && a < 1.0 + 3.0 / (2.0 * p) && 0.0 < m && m < 1.0 / p);
                push(
                    "A2",
                    1.0 + 3.0 / (2.0 * p) <= a
                        && a < 1.0 + 2.0 / p
                        && 0.0 < m
                        && m < 2.0 / p
                        && 2.0 * a - m > 2.0 + 2.0 / p,
                );
                push(
                    "A3_1",
                    1.0 - 1.0 / p < a
                        && a < 1.0 + 2.0 / p
                        && 1.0 / p <= m
                        && m < 2.0 / p
                        && 2.0 * a - m <= 2.0 + 2.0 / p,
                );
                push(
                    "A3_2",
                    1.0 - 1.0 / p < a && a < 1.0 && 2.0 / p <= m && m < 3.0 / p && m + a < 1.0 + 2.0 / p,
                );
                push(
                    "A4",
                    1.0 - 1.0 / p < a
                        && a < 1.0 + 2.0 / p
                        && 2.0 / p <= m
                        && m < 1.0 + 1.0 / p
                        && m + a >= 1.0 + 2.0 / p
                        && m - a < 1.0 / p,
                );
            }
            4 => {
                let b1 = 1.0 - 2.0 / p < a && a < 1.0 + 2.0 / p && 0.0 < m && m < 2.0 / p;
                push("B1_1", b1 && a < 1.0);
                push("B1_2", b1 && a >= 1.0);
                push(
                    "B2",
                    1.0 - 2.0 / p < a && a < 1.0 && 2.0 / p <= m && m < 4.0 / p && m + a < 1.0 + 2.0 / p,
                );
                push(
                    "B3",
                    1.0 - 2.0 / p < a
                        && a < 1.0 + 2.0 / p
                        && 2.0 / p <= m
                        && m < 1.0 + 2.0 / p
                        && m + a >= 1.0 + 2.0 / p
                        && m - a < 2.0 / p,
                );
            }
            5 => {
                push("C1_1", 1.0 - 2.0 / p < a && a <= 1.0 - 1.0 / p && 0.0 < m && m < 3.0 / p);
                push(
                    "C1_2",
                    1.0 - 1.0 / p < a
                        && a < 1.0 + 2.0 / p
                        && 0.0 < m
                        && m < 1.0 + 1.0 / (2.0 * p)
                        && 2.0 * m - a < 1.0 + 1.0 / p,
                );
                push(
                    "C2",
                    1.0 - 2.0 / p < a
                        && a < 1.0 - 1.0 / p
                        && 3.0 / p <= m
                        && m < 4.0 / p
                        && m + a < 1.0 + 2.0 / p,
                );
                push(
                    "C3_1",
                    1.0 - 2.0 / p < a
                        && a <= 1.0 - 1.0 / p
                        && 3.0 / p <= m
                        && m < 1.0
                        && m + a >= 1.0 + 2.0 / p,
                );
                push(
                    "C3_2",
                    1.0 - 2.0 / p < a
                        && a < 1.0
                        && 1.0 <= m
                        && m < 1.0 + 1.0 / (2.0 * p)
                        && 2.0 * m - a >= 1.0 + 1.0 / p,
                );
                push(
                    "C3_3",
                    1.0 - 2.0 / p < a
                        && a < 1.0 + 2.0 / p
                        && 1.0 + 1.0 / (2.0 * p) <= m
                        && m < 1.0 + 3.0 / p
                        && m - a < 3.0 / p,
                );
            }
            _ => {
                let band = 1.0 - 2.0 / p < a && a < 1.0 + 2.0 / p;
                push(
                    "D1",
                    band && 0.0 < m && m < 1.0 + (nf - 4.0) / (2.0 * p) && 2.0 * m - a < 1.0 + (nf - 4.0) / p,
                );
                push(
                    "D2_1",
                    band && 1.0 + (nf - 6.0) / (2.0 * p) <= m
                        && m < 1.0 + (nf - 4.0) / (2.0 * p)
                        && 2.0 * m - a >= 1.0 + (nf - 4.0) / p,
                );
                push(
                    "D2_2",
                    band && 1.0 + (nf - 4.0) / (2.0 * p) <= m
                        && m < 1.0 + (nf - 2.0) / p
                        && m - a < (nf - 2.0) / p,
                );
            }
        }
        out
    }

    /// Right-hand side of the kappa condition attached to a label.
    pub fn kappa_bound(label: &str, n: u32, p: f64, q: f64, m: f64, a: f64) -> f64 {
        let nf = n as f64;
        match &label[..2] {
            "A2" => 1.0 + 3.0 / p + q / p - (a - 1.0),
            "A1" | "B1" | "C1" | "D1" => 1.0 + nf / (2.0 * p) + q / p - pos(1.0 - a) / 2.0,
            "A3" | "B2" | "C2" => 1.0 + (nf - 1.0) / p + q / p - m / 2.0 - pos(1.0 - a) / 2.0,
            _ => 1.0 + (nf - 2.0) / p + q / p - pos(m - 1.0) - pos(1.0 - a),
        }
    }

    pub fn uses_first_window(label: &str) -> bool {
        matches!(
            label,
            "A4" | "B1_2" | "B3" | "C1_2" | "C3_1" | "C3_2" | "C3_3" | "D1" | "D2_1" | "D2_2"
        )
    }

    /// Every inequality of the window lemma, checked for one gamma.
    #[allow(clippy::too_many_arguments)]
    pub fn window_accepts(first: bool, n: u32, p: f64, q: f64, m: f64, a: f64, kappa: f64, g: f64) -> bool {
        let nf = n as f64;
        let pn = p / nf;
        let kappa_term = pn * (2.0 * (kappa - 1.0) + pos(1.0 - a)) - 2.0 * q / nf;
        let common = pn * pos(1.0 - a) < g && kappa_term < g && g < 1.0;
        if first {
            common
                && 1.0 - 2.0 / nf - pn * pos(m - 1.0) < g
                && g < 2.0 - 4.0 / nf - pn * (2.0 * pos(m - 1.0) + pos(1.0 - a))
        } else {
            common && g < 2.0 - 2.0 / nf - p * m / nf && g < 2.0 - 2.0 * pn * pos(a - 1.0)
        }
    }

    /// Closed-form threshold on the alpha = 1 line.
    pub fn alpha_one_kappa(n: u32, p: f64, q: f64, m: f64) -> Option<f64> {
        let nf = n as f64;
        if 2.0 / p <= m && m < 1.0 + (nf - 2.0) / p {
            Some(1.0 + q / p + (nf / (2.0 * p)).min((nf - 2.0) / p - pos(m - 1.0)))
        } else if 0.0 < m && m < 2.0 / p {
            Some(1.0 + q / p + (nf / (2.0 * p)).min((nf - 1.0) / p - m / 2.0))
        } else {
            None
        }
    }

    /// Closed-form power-bound threshold on the alpha = 1 line.
    pub fn alpha_one_kappa_thm2(n: u32, q: f64, m: f64) -> Option<f64> {
        let nf = n as f64;
        if !(1.0 <= m && m < (2.0 * nf - 2.0) / nf) {
            return None;
        }
        let d = (m - 1.0) * nf + 1.0;
        Some(1.0 + q * d / (nf * (nf - 1.0)) + (d / (2.0 * (nf - 1.0))).min((nf - 2.0 - (m - 1.0) * nf) / (nf * (nf - 1.0))))
    }

    /// m = 1, q = 0, alpha < 1.
    pub fn m_one_kappa_thm2(n: u32, a: f64) -> Option<f64> {
        let nf = n as f64;
        let low = 1.0 + ((nf - 2.0) - (1.0 - a) * nf) / (nf * (nf - 1.0));
        let high = 1.0 + (2.0 - a) / (2.0 * (nf - 1.0));
        match n {
            3 | 4 if 2.0 / nf < a && a < 1.0 => Some(low),
            5 if 0.8 < a && a <= 14.0 / 15.0 => Some(low),
            5 if 14.0 / 15.0 < a && a < 1.0 => Some(high),
            _ if n >= 6 && 1.0 - 2.0 / (nf * (nf - 3.0)) < a && a < 1.0 => Some(high),
            _ => None,
        }
    }
}

pub mod tally {
    use std::io::Write;

    /// One line per acceptance criterion, written past the test harness's
    /// output capture so it shows in every run.
    pub fn report(id: u32, name: &str, pass: bool, detail: &str) {
        let line = format!("[{}] criterion {id}: {name} ({detail})\n", if pass { "PASS" } else { "FAIL" });
        let _ = std::io::stdout().lock().write_all(line.as_bytes());
    }
}

pub mod demo {
    use std::sync::Arc;

    use ksblow::dynamics::{init_profile, MassState, ModelParams};
    use ksblow::mesh::MassGrid;

    /// n = 3, A4 with κ inside its threshold.
    pub fn supercritical(chi: f64) -> ModelParams {
        ModelParams {
            n: 3,
            radius: 1.0,
            m: 1.0,
            alpha: 1.0,
            chi,
            kappa: 1.1,
            lambda1: 0.0,
            mu1: 0.1,
            q: 0.0,
            p: 3.0,
            k: 1.0,
            m0: 1.0,
            m1: 0.5,
            lambda_profile: None,
            mu_profile: None,
        }
    }

    /// m - α = 1/2 > (n-2)/n
    pub fn subcritical() -> ModelParams {
        ModelParams { m: 1.5, chi: 5.0, ..supercritical(5.0) }
    }

    pub const R1: f64 = 0.3;
    pub const CAP: f64 = 1e-4;
    pub const CAP_EXPONENT: f64 = 6.0;
    pub const GRADING: f64 = 3.0;
    pub const SAMPLE_EVERY: f64 = 2e-5;

    pub fn initial(params: &ModelParams, cells: usize) -> MassState {
        let grid = Arc::new(MassGrid::graded(params.n, params.radius, cells, GRADING).unwrap());
        init_profile(params, grid, R1, CAP, CAP_EXPONENT).unwrap()
    }
}

pub mod bvp {
    use ksblow::elliptic::{solve_chemo_bvp, DEFAULT_TOL};
    use ksblow::mesh::MassGrid;

    /// Both profiles have z*(0) = 0 and z*''(1) = 0, so the induced w has
    /// w(1) = z*(1) and the boundary data are consistent.
    #[derive(Clone, Copy, Debug)]
    pub enum Profile {
        /// c s + 3 s² - s³; centred differences are exact for it on uniform grids
        Cubic,
        /// c s + sin(π s) / π
        Sine,
    }

    pub fn manufactured(n: u32, s: f64, c: f64, profile: Profile) -> (f64, f64) {
        let nf = n as f64;
        let pi = std::f64::consts::PI;
        let (z, zss) = match profile {
            Profile::Cubic => (c * s + 3.0 * s * s - s * s * s, 6.0 * (1.0 - s)),
            Profile::Sine => (c * s + (pi * s).sin() / pi, -pi * (pi * s).sin()),
        };
        let w = z - nf * nf * s.powf(2.0 - 2.0 / nf) * zss;
        (z, w)
    }

    pub fn max_error(n: u32, cells: usize, grading: f64, profile: Profile) -> f64 {
        let g = MassGrid::graded(n, 1.0, cells, grading).unwrap();
        let (zs, ws): (Vec<f64>, Vec<f64>) = g.s.iter().map(|&s| manufactured(n, s, 40.0, profile)).unzip();
        let f = solve_chemo_bvp(&ws, &g, DEFAULT_TOL).unwrap();
        f.z.iter().zip(&zs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

pub mod figures {
    use ksblow::regions::GridAxis;

    /// `a m + b α = c`
    pub type Line = (f64, f64, f64);

    pub fn region_lines(n: u32, p: f64) -> Vec<Line> {
        let nf = n as f64;
        let m = |c: f64| (1.0, 0.0, c);
        let a = |c: f64| (0.0, 1.0, c);
        match n {
            3 => vec![
                a(1.0 - 1.0 / p),
                a(1.0),
                a(1.0 + 3.0 / (2.0 * p)),
                a(1.0 + 2.0 / p),
                m(1.0 / p),
                m(2.0 / p),
                m(3.0 / p),
                m(1.0 + 1.0 / p),
                (-1.0, 2.0, 2.0 + 2.0 / p),
                (1.0, 1.0, 1.0 + 2.0 / p),
                (1.0, -1.0, 1.0 / p),
            ],
            4 => vec![
                a(1.0 - 2.0 / p),
                a(1.0),
                a(1.0 + 2.0 / p),
                m(2.0 / p),
                m(4.0 / p),
                m(1.0 + 2.0 / p),
                (1.0, 1.0, 1.0 + 2.0 / p),
                (1.0, -1.0, 2.0 / p),
            ],
            5 => vec![
                a(1.0 - 2.0 / p),
                a(1.0 - 1.0 / p),
                a(1.0),
                a(1.0 + 2.0 / p),
                m(3.0 / p),
                m(4.0 / p),
                m(1.0),
                m(1.0 + 1.0 / (2.0 * p)),
                m(1.0 + 3.0 / p),
                (2.0, -1.0, 1.0 + 1.0 / p),
                (1.0, 1.0, 1.0 + 2.0 / p),
                (1.0, -1.0, 3.0 / p),
            ],
            _ => vec![
                a(1.0 - 2.0 / p),
                a(1.0 + 2.0 / p),
                m(1.0 + (nf - 6.0) / (2.0 * p)),
                m(1.0 + (nf - 4.0) / (2.0 * p)),
                m(1.0 + (nf - 2.0) / p),
                (2.0, -1.0, 1.0 + (nf - 4.0) / p),
                (1.0, -1.0, (nf - 2.0) / p),
            ],
        }
    }

    pub fn thm2_lines(n: u32) -> Vec<Line> {
        let nf = n as f64;
        let mut out = vec![
            (1.0, 0.0, 1.0),
            (1.0, -1.0, (nf - 2.0) / nf),
            (-2.0 / (nf + 1.0), 1.0, (nf * nf - nf + 2.0) / (nf * (nf + 1.0))),
            (1.0 / (nf - 2.0), 1.0, (nf * nf - 2.0) / (nf * (nf - 2.0))),
        ];
        if n >= 5 {
            out.push((2.0 / (nf - 3.0), 1.0, (nf * nf - nf - 2.0) / (nf * (nf - 3.0))));
            out.push(((nf + 2.0) / (nf - 4.0), 1.0, (2.0 * nf * nf - nf - 4.0) / (nf * (nf - 4.0))));
            out.push((-(nf + 2.0) / 3.0, 1.0, -(nf * nf - 4.0) / (3.0 * nf)));
        }
        out
    }

    fn crosses(lines: &[Line], x: (f64, f64), y: (f64, f64)) -> bool {
        lines.iter().any(|&(a, b, c)| {
            let f = |p: (f64, f64)| a * p.0 + b * p.1 - c;
            f(x) * f(y) <= 0.0
        })
    }

    /// Label changes between neighbouring cells, and those that straddle
    /// none of `lines`.
    pub fn check_boundaries(
        labels: &[String],
        m: &GridAxis,
        al: &GridAxis,
        lines: &[Line],
    ) -> (usize, Vec<String>) {
        let at = |i: usize, j: usize| &labels[i * al.res + j];
        let pt = |i: usize, j: usize| (m.sample(i), al.sample(j));
        let mut changes = 0;
        let mut misses = Vec::new();
        for i in 0..m.res {
            for j in 0..al.res {
                for (di, dj) in [(1, 0), (0, 1)] {
                    let (k, l) = (i + di, j + dj);
                    if k >= m.res || l >= al.res || at(i, j) == at(k, l) {
                        continue;
                    }
                    changes += 1;
                    if !crosses(lines, pt(i, j), pt(k, l)) {
                        misses.push(format!("{} -> {} at {:?}/{:?}", at(i, j), at(k, l), pt(i, j), pt(k, l)));
                    }
                }
            }
        }
        (changes, misses)
    }
}
