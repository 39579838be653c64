//! The inequality lists behind each label, written once over a generic scalar.

use super::exact::{frac, max_of, min_of, Judge, Scalar, Vars};
use super::{KappaCondition, RegionLabel, Thm2Label, WindowLemma};

pub(crate) fn holds<T: Scalar, J: Judge<T>>(label: RegionLabel, j: &J, v: &Vars<T>) -> bool {
    use RegionLabel::*;
    let one = T::one();
    let zero = T::zero();
    let u = v.u();
    // k/p and 1 + k/p with rational k
    let k = |num: i64, den: i64| u.clone() * frac::<T>(num, den);
    let up = |num: i64, den: i64| T::one() + k(num, den);
    let dn = |num: i64, den: i64| T::one() - k(num, den);
    let m = &v.m;
    let a = &v.alpha;
    let sum = m.clone() + a.clone();
    let diff = m.clone() - a.clone();
    let two_m_a = T::int(2) * m.clone() - a.clone();
    let two_a_m = T::int(2) * a.clone() - m.clone();
    let n = v.n as i64;
    match label {
        A1 => j.lt(&dn(1, 1), a) && j.lt(a, &up(3, 2)) && j.lt(&zero, m) && j.lt(m, &k(1, 1)),
        A2 => {
            j.le(&up(3, 2), a)
                && j.lt(a, &up(2, 1))
                && j.lt(&zero, m)
                && j.lt(m, &k(2, 1))
                && j.lt(&(T::int(2) + k(2, 1)), &two_a_m)
        }
        A3_1 => {
            j.lt(&dn(1, 1), a)
                && j.lt(a, &up(2, 1))
                && j.le(&k(1, 1), m)
                && j.lt(m, &k(2, 1))
                && j.le(&two_a_m, &(T::int(2) + k(2, 1)))
        }
        A3_2 => {
            j.lt(&dn(1, 1), a)
                && j.lt(a, &one)
                && j.le(&k(2, 1), m)
                && j.lt(m, &k(3, 1))
                && j.lt(&sum, &up(2, 1))
        }
        A4 => {
            j.lt(&dn(1, 1), a)
                && j.lt(a, &up(2, 1))
                && j.le(&k(2, 1), m)
                && j.lt(m, &up(1, 1))
                && j.le(&up(2, 1), &sum)
                && j.lt(&diff, &k(1, 1))
        }
        B1_1 => j.lt(&dn(2, 1), a) && j.lt(a, &one) && j.lt(&zero, m) && j.lt(m, &k(2, 1)),
        B1_2 => j.le(&one, a) && j.lt(a, &up(2, 1)) && j.lt(&zero, m) && j.lt(m, &k(2, 1)),
        B2 => {
            j.lt(&dn(2, 1), a)
                && j.lt(a, &one)
                && j.le(&k(2, 1), m)
                && j.lt(m, &k(4, 1))
                && j.lt(&sum, &up(2, 1))
        }
        B3 => {
            j.lt(&dn(2, 1), a)
                && j.lt(a, &up(2, 1))
                && j.le(&k(2, 1), m)
                && j.lt(m, &up(2, 1))
                && j.le(&up(2, 1), &sum)
                && j.lt(&diff, &k(2, 1))
        }
        C1_1 => j.lt(&dn(2, 1), a) && j.le(a, &dn(1, 1)) && j.lt(&zero, m) && j.lt(m, &k(3, 1)),
        C1_2 => {
            j.lt(&dn(1, 1), a)
                && j.lt(a, &up(2, 1))
                && j.lt(&zero, m)
                && j.lt(m, &up(1, 2))
                && j.lt(&two_m_a, &up(1, 1))
        }
        C2 => {
            j.lt(&dn(2, 1), a)
                && j.lt(a, &dn(1, 1))
                && j.le(&k(3, 1), m)
                && j.lt(m, &k(4, 1))
                && j.lt(&sum, &up(2, 1))
        }
        C3_1 => {
            j.lt(&dn(2, 1), a)
                && j.le(a, &dn(1, 1))
                && j.le(&k(3, 1), m)
                && j.lt(m, &one)
                && j.le(&up(2, 1), &sum)
        }
        C3_2 => {
            j.lt(&dn(2, 1), a)
                && j.lt(a, &one)
                && j.le(&one, m)
                && j.lt(m, &up(1, 2))
                && j.le(&up(1, 1), &two_m_a)
        }
        C3_3 => {
            j.lt(&dn(2, 1), a)
                && j.lt(a, &up(2, 1))
                && j.le(&up(1, 2), m)
                && j.lt(m, &up(3, 1))
                && j.lt(&diff, &k(3, 1))
        }
        D1 => {
            j.lt(&dn(2, 1), a)
                && j.lt(a, &up(2, 1))
                && j.lt(&zero, m)
                && j.lt(m, &up(n - 4, 2))
                && j.lt(&two_m_a, &up(n - 4, 1))
        }
        D2_1 => {
            j.lt(&dn(2, 1), a)
                && j.lt(a, &up(2, 1))
                && j.le(&up(n - 6, 2), m)
                && j.lt(m, &up(n - 4, 2))
                && j.le(&up(n - 4, 1), &two_m_a)
        }
        D2_2 => {
            j.lt(&dn(2, 1), a)
                && j.lt(a, &up(2, 1))
                && j.le(&up(n - 4, 2), m)
                && j.lt(m, &up(n - 2, 1))
                && j.lt(&diff, &k(n - 2, 1))
        }
    }
}

pub(crate) fn matching<T: Scalar, J: Judge<T>>(j: &J, v: &Vars<T>) -> Vec<RegionLabel> {
    RegionLabel::family(v.n)
        .iter()
        .copied()
        .filter(|&l| holds(l, j, v))
        .collect()
}

/// Strict upper bound on kappa from one of the four conditions.
pub(crate) fn kappa_bound<T: Scalar>(cond: KappaCondition, v: &Vars<T>) -> T {
    let one = T::one();
    let u = v.u();
    let nn = v.nn();
    let qp = v.q.clone() * u.clone();
    let half = frac::<T>(1, 2);
    match cond {
        KappaCondition::I => one.clone() + T::int(3) * u + qp - (v.alpha.clone() - one),
        KappaCondition::II => one + nn * u * half.clone() + qp - v.lo_a() * half,
        KappaCondition::III => {
            one.clone() + (nn - one) * u + qp - v.m.clone() * half.clone() - v.lo_a() * half
        }
        KappaCondition::IV => one + (nn - T::int(2)) * u + qp - v.hi_m() - v.lo_a(),
    }
}

/// (lower, upper) of the gamma window, both exclusive.
pub(crate) fn window<T: Scalar>(lemma: WindowLemma, v: &Vars<T>) -> (T, T) {
    let one = T::one();
    let two = T::int(2);
    let nn = v.nn();
    let pn = v.pn();
    let lo_a = v.lo_a();
    let kappa_term = pn.clone() * (two.clone() * (v.kappa.clone() - one.clone()) + lo_a.clone())
        - two.clone() * v.q.clone() / nn.clone();
    match lemma {
        WindowLemma::L4_1 => {
            let lower = max_of([
                pn.clone() * lo_a.clone(),
                kappa_term,
                one.clone() - two.clone() / nn.clone() - pn.clone() * v.hi_m(),
            ]);
            let upper = min_of([
                one,
                two.clone() - T::int(4) / nn - pn * (two * v.hi_m() + lo_a),
            ]);
            (lower, upper)
        }
        WindowLemma::L4_2 => {
            let lower = max_of([pn.clone() * lo_a, kappa_term]);
            let upper = min_of([
                one,
                two.clone() - two.clone() / nn - pn.clone() * v.m.clone(),
                two.clone() - two * pn * v.hi_a(),
            ]);
            (lower, upper)
        }
    }
}

pub(crate) fn theta<T: Scalar>(lemma: WindowLemma, v: &Vars<T>) -> T {
    let one = T::one();
    let two = T::int(2);
    let four = T::int(4);
    let nn = v.nn();
    let pn = v.pn();
    let lo_a = v.lo_a();
    let first = match lemma {
        WindowLemma::L4_1 => {
            four.clone() / nn.clone() + pn.clone() * (two.clone() * v.hi_m() + lo_a.clone())
        }
        WindowLemma::L4_2 => two.clone() / nn.clone() + pn.clone() * v.m.clone(),
    };
    max_of([
        first,
        two.clone() / nn.clone(),
        two.clone() - four / nn.clone()
            + pn.clone() * (lo_a.clone() + two.clone() * v.hi_a()),
        -(two.clone() * v.q.clone() / nn) + pn * (two * (v.kappa.clone() - one) + lo_a),
    ])
}

/// 2 - (p/n)(1 - alpha)_+, the exclusive upper end for theta.
pub(crate) fn theta_ceiling<T: Scalar>(v: &Vars<T>) -> T {
    T::int(2) - v.pn() * v.lo_a()
}

/// The lines that bound the power-bound regions, as functions of m.
pub(crate) struct Thm2Lines<T> {
    pub chain_lo: T,
    pub chain_hi: T,
    pub steep: T,
    pub rising: T,
    pub shallow: T,
}

pub(crate) fn thm2_lines<T: Scalar>(n: u32, m: &T) -> Thm2Lines<T> {
    let n = n as i64;
    let m = m.clone();
    // chain_lo and steep are only meaningful for n >= 5
    let (chain_lo, steep) = if n >= 5 {
        (
            -(m.clone() * frac(2, n - 3)) + frac(n * n - n - 2, n * (n - 3)),
            -(m.clone() * frac(n + 2, n - 4)) + frac(2 * n * n - n - 4, n * (n - 4)),
        )
    } else {
        (T::zero(), T::zero())
    };
    Thm2Lines {
        chain_lo,
        chain_hi: m.clone() * frac(2, n + 1) + frac(n * n - n + 2, n * (n + 1)),
        steep,
        rising: m.clone() * frac(n + 2, 3) - frac(n * n - 4, 3 * n),
        shallow: -(m * frac(1, n - 2)) + frac(n * n - 2, n * (n - 2)),
    }
}

pub(crate) fn thm2_label<T: Scalar, J: Judge<T>>(j: &J, v: &Vars<T>) -> Thm2Label {
    let n = v.n;
    let m = &v.m;
    let a = &v.alpha;
    let l = thm2_lines(n, m);
    let gap = frac::<T>(n as i64 - 2, n as i64);
    let diff = m.clone() - a.clone();
    if !j.le(&T::one(), m) {
        return Thm2Label::None;
    }
    if n <= 4 {
        let e1 = j.lt(a, &l.chain_hi) && j.lt(a, &l.shallow) && j.lt(&diff, &gap);
        return if e1 { Thm2Label::E1 } else { Thm2Label::None };
    }
    if !(j.lt(&l.chain_lo, a) && j.lt(a, &l.chain_hi)) {
        return Thm2Label::None;
    }
    let below_steep = j.lt(a, &l.steep);
    if below_steep {
        if j.le(a, &l.rising) {
            Thm2Label::F1
        } else {
            Thm2Label::F2
        }
    } else if j.lt(a, &l.shallow) && j.lt(&diff, &gap) {
        Thm2Label::F1
    } else {
        Thm2Label::None
    }
}

/// Upper bound on kappa for the power-bound regions: (i)/(ii) share a formula, (iii) differs.
pub(crate) fn thm2_bound<T: Scalar>(label: Thm2Label, v: &Vars<T>) -> Option<T> {
    let one = T::one();
    let n = v.n as i64;
    let nn = v.nn();
    let d = (v.m.clone() - v.alpha.clone()) * nn.clone() + one.clone();
    let q_term = v.q.clone() * d.clone() / T::int(n * (n - 1));
    match label {
        Thm2Label::E1 | Thm2Label::F1 => Some(
            one.clone() + T::int(n - 2) * d / T::int(n * (n - 1)) + q_term
                - (v.m.clone() - one)
                - v.lo_a(),
        ),
        Thm2Label::F2 => Some(
            one + d / T::int(2 * (n - 1)) + q_term - v.lo_a() * frac(1, 2),
        ),
        Thm2Label::None => None,
    }
}
