//! Even, mean-zero periodic functions supported on four residue classes, the
//! torus-knot characters `chi_{2st}^{(n,m)}`, their tilde transforms, the
//! index sets `D(s,t)` and the finite S-matrix.

use rug::{Float, Rational};

use crate::num::{Cx, PrecisionContext};
use crate::{Error, Result};

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        0
    } else {
        (a / gcd(a, b) * b).abs()
    }
}

/// Canonical representative of the class `{k, -k} mod M` in `0..=M/2`.
fn fold_residue(k: i64, modulus: i64) -> i64 {
    let r = k.rem_euclid(modulus);
    r.min(modulus - r)
}

/// `f(n) = +c` for `n = +-k1`, `-c` for `n = +-k2` (mod M), zero elsewhere.
///
/// `k1` and `k2` are stored folded into `0..=M/2`; the tilde transform only
/// depends on the classes, so nothing is lost.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicFunction {
    c: Rational,
    modulus: u32,
    k1: i64,
    k2: i64,
    signs: Vec<i8>,
}

impl PeriodicFunction {
    pub fn c(&self) -> &Rational {
        &self.c
    }

    /// The period `M`.
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn k1(&self) -> i64 {
        self.k1
    }

    pub fn k2(&self) -> i64 {
        self.k2
    }

    /// Residue table of signs (+1, -1, 0) over `0..M`; `f = c * sign`.
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign(&self, n: i64) -> i8 {
        self.signs[n.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn value(&self, n: i64) -> Rational {
        match self.sign(n) {
            0 => Rational::new(),
            s => Rational::from(&self.c * s as i32),
        }
    }

    pub fn value_float(&self, n: i64, prec: u32) -> Float {
        Float::with_val(prec, &self.value(n))
    }

    /// Same residue pattern with a different scale.
    pub fn with_scale(&self, c: Rational) -> Result<Self> {
        if c == 0 {
            return Err(Error::InvalidConfig("scale c must be nonzero".into()));
        }
        Ok(Self { c, ..self.clone() })
    }

    pub fn tilde(&self) -> TildeFunction {
        tilde_transform(self)
    }

    /// Evenness, zero mean and the four-class support pattern.
    pub fn check_invariants(&self) -> Result<()> {
        let m = self.modulus as i64;
        let sum: i64 = self.signs.iter().map(|&s| s as i64).sum();
        if sum != 0 {
            return Err(Error::Consistency(format!("mean of f is {sum}*c, not zero")));
        }
        for n in 0..m {
            if self.sign(n) != self.sign(m - n) {
                return Err(Error::Consistency(format!("f is not even at residue {n}")));
            }
            let expect = if fold_residue(n, m) == self.k1 {
                1
            } else if fold_residue(n, m) == self.k2 {
                -1
            } else {
                0
            };
            if self.sign(n) != expect {
                return Err(Error::Consistency(format!("wrong sign at residue {n}")));
            }
        }
        Ok(())
    }
}

/// Build `f` from `(c, M, k1, k2)`; `k1`, `k2` may lie outside `0..M` and are
/// reduced modulo `M`.
pub fn make_periodic(c: Rational, modulus: i64, k1: i64, k2: i64) -> Result<PeriodicFunction> {
    if modulus < 2 {
        return Err(Error::InvalidConfig(format!("period M = {modulus} must be at least 2")));
    }
    if modulus > u32::MAX as i64 {
        return Err(Error::InvalidConfig(format!("period M = {modulus} is too large")));
    }
    if k1 >= k2 {
        return Err(Error::InvalidConfig(format!("need k1 < k2, got k1 = {k1}, k2 = {k2}")));
    }
    if c == 0 {
        return Err(Error::InvalidConfig("scale c must be nonzero".into()));
    }
    let a = fold_residue(k1, modulus);
    let b = fold_residue(k2, modulus);
    if a == b {
        return Err(Error::InvalidConfig(format!(
            "residue classes +-{k1} and +-{k2} coincide mod {modulus}"
        )));
    }
    let class_size = |r: i64| if r == 0 || 2 * r == modulus { 1 } else { 2 };
    if class_size(a) != class_size(b) {
        return Err(Error::InvalidConfig(format!(
            "classes +-{k1} and +-{k2} mod {modulus} have different sizes; f would not have mean zero"
        )));
    }
    let signs = (0..modulus)
        .map(|n| {
            let r = fold_residue(n, modulus);
            if r == a {
                1
            } else if r == b {
                -1
            } else {
                0
            }
        })
        .collect();
    Ok(PeriodicFunction {
        c,
        modulus: modulus as u32,
        k1: a,
        k2: b,
        signs,
    })
}

/// Indices `(s, t, n, m)` of `chi_{2st}^{(n,m)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChiParams {
    pub s: i64,
    pub t: i64,
    pub n: i64,
    pub m: i64,
}

impl ChiParams {
    pub fn new(s: i64, t: i64, n: i64, m: i64) -> Result<Self> {
        check_coprime(s, t)?;
        if !(1..s).contains(&n) {
            return Err(Error::InvalidConfig(format!("n = {n} must lie in 1..={}", s - 1)));
        }
        if !(1..t).contains(&m) {
            return Err(Error::InvalidConfig(format!("m = {m} must lie in 1..={}", t - 1)));
        }
        Ok(Self { s, t, n, m })
    }

    /// The partner `(s - n, t - m)`, which defines the same character.
    pub fn partner(&self) -> Self {
        Self {
            n: self.s - self.n,
            m: self.t - self.m,
            ..*self
        }
    }
}

fn check_coprime(s: i64, t: i64) -> Result<()> {
    if s < 2 || t < 2 {
        return Err(Error::InvalidConfig(format!("s = {s} and t = {t} must both be at least 2")));
    }
    if gcd(s, t) != 1 {
        return Err(Error::InvalidConfig(format!(
            "s = {s} and t = {t} must be coprime (gcd = {})",
            gcd(s, t)
        )));
    }
    Ok(())
}

/// `chi_{2st}^{(n,m)}`: `c = 1`, `M = 2st`, `k1 = nt - ms`, `k2 = nt + ms`.
pub fn chi_function(p: ChiParams) -> Result<PeriodicFunction> {
    let ChiParams { s, t, n, m } = ChiParams::new(p.s, p.t, p.n, p.m)?;
    make_periodic(Rational::from(1), 2 * s * t, n * t - m * s, n * t + m * s)
}

/// `f~(l) = (-1)^l sin((k2-k1) l pi / M) sin((M-k1-k2) l pi / M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TildeFunction {
    base: PeriodicFunction,
    period: u32,
}

impl TildeFunction {
    pub fn base(&self) -> &PeriodicFunction {
        &self.base
    }

    /// Minimal period; always divides `2M`.
    pub fn period(&self) -> u32 {
        self.period
    }

    fn widths(&self) -> (i64, i64) {
        let m = self.base.modulus as i64;
        (self.base.k2 - self.base.k1, m - self.base.k1 - self.base.k2)
    }

    /// Exact zero test: one of the two sine factors vanishes.
    pub fn is_zero(&self, l: i64) -> bool {
        let m = self.base.modulus as i128;
        let (a, b) = self.widths();
        (a as i128 * l as i128) % m == 0 || (b as i128 * l as i128) % m == 0
    }

    pub fn value(&self, l: i64, prec: u32) -> Float {
        if self.is_zero(l) {
            return Float::new(prec);
        }
        let two_m = 2 * self.base.modulus as u64;
        let (a, b) = self.widths();
        // sin(x pi / M) = Im e^{2 pi i x / 2M}, with x reduced exactly.
        let sa = Cx::root_of_unity(
            ((a as i128 * l as i128).rem_euclid(two_m as i128)) as i64,
            two_m,
            prec,
        )
        .im;
        let sb = Cx::root_of_unity(
            ((b as i128 * l as i128).rem_euclid(two_m as i128)) as i64,
            two_m,
            prec,
        )
        .im;
        let v = Float::with_val(prec, &sa * &sb);
        if l.rem_euclid(2) == 1 {
            -v
        } else {
            v
        }
    }

    pub fn value_f64(&self, l: i64) -> f64 {
        self.value(l, 64).to_f64()
    }

    /// Values over one period, indexed `l = 1..=period`.
    pub fn period_values(&self, prec: u32) -> Vec<Float> {
        (1..=self.period as i64).map(|l| self.value(l, prec)).collect()
    }

    /// Smallest `l >= 1` with `f~(l) != 0`.
    pub fn first_support(&self) -> i64 {
        (1..=2 * self.base.modulus as i64)
            .find(|&l| !self.is_zero(l))
            .expect("f~ vanishes identically, impossible for distinct classes")
    }
}

pub fn tilde_transform(f: &PeriodicFunction) -> TildeFunction {
    let two_m = 2 * f.modulus;
    let mut draft = TildeFunction {
        base: f.clone(),
        period: two_m,
    };
    let vals: Vec<f64> = (0..2 * two_m as i64).map(|l| draft.value_f64(l)).collect();
    let period = (1..=two_m)
        .filter(|p| two_m.is_multiple_of(*p))
        .find(|&p| (0..two_m as usize).all(|l| (vals[l] - vals[l + p as usize]).abs() < 1e-12))
        .unwrap_or(two_m);
    draft.period = period;
    draft
}

/// The index set `D(s, t)`; for odd `s, t` the first variant `D1` is returned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    pub s: i64,
    pub t: i64,
    pub pairs: Vec<(i64, i64)>,
}

impl PairSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, nm: (i64, i64)) -> bool {
        self.pairs.contains(&nm)
    }

    pub fn index_of(&self, nm: (i64, i64)) -> Option<usize> {
        self.pairs.iter().position(|&p| p == nm)
    }
}

fn half_n_pairs(s: i64, t: i64) -> Vec<(i64, i64)> {
    (1..=(s - 1) / 2)
        .flat_map(|n| (1..t).map(move |m| (n, m)))
        .collect()
}

fn half_m_pairs(s: i64, t: i64) -> Vec<(i64, i64)> {
    (1..s)
        .flat_map(|n| (1..=(t - 1) / 2).map(move |m| (n, m)))
        .collect()
}

pub fn pair_set(s: i64, t: i64) -> Result<PairSet> {
    check_coprime(s, t)?;
    let pairs = if s % 2 == 1 {
        half_n_pairs(s, t)
    } else {
        half_m_pairs(s, t)
    };
    Ok(PairSet { s, t, pairs })
}

/// `D2(s, t)` for odd `s, t`: the variant not chosen by [`pair_set`].
pub fn alternative_pair_set(s: i64, t: i64) -> Result<PairSet> {
    check_coprime(s, t)?;
    if s % 2 == 0 || t % 2 == 0 {
        return Err(Error::InvalidConfig(format!(
            "the alternative index set only exists for odd s, t (got {s}, {t})"
        )));
    }
    Ok(PairSet {
        s,
        t,
        pairs: half_m_pairs(s, t),
    })
}

/// The map `D1 -> D2`: keep `(n, m)` when both lie in the lower halves,
/// otherwise send it to `(s - n, t - m)`.
pub fn pair_bijection(s: i64, t: i64, (n, m): (i64, i64)) -> (i64, i64) {
    if n <= (s - 1) / 2 && m <= (t - 1) / 2 {
        (n, m)
    } else {
        (s - n, t - m)
    }
}

/// `S_{n,m}^{n',m'} = sqrt(8/st) (-1)^{nm'+mn'+1} sin(nn't pi/s) sin(mm's pi/t)`.
pub fn s_matrix_entry(
    s: i64,
    t: i64,
    (n, m): (i64, i64),
    (n2, m2): (i64, i64),
    prec: u32,
) -> Float {
    let sin_pi_frac = |num: i64, den: i64| {
        Cx::root_of_unity(num.rem_euclid(2 * den), 2 * den as u64, prec).im
    };
    let a = sin_pi_frac(n * n2 * t, s);
    let b = sin_pi_frac(m * m2 * s, t);
    let norm = Float::with_val(prec, 8) / Float::with_val(prec, s * t);
    let mut v = Float::with_val(prec, norm.sqrt() * &a) * &b;
    if (n * m2 + m * n2 + 1).rem_euclid(2) == 1 {
        v = -v;
    }
    v
}

/// Full S-matrix in the order of [`pair_set`].
pub fn s_matrix(s: i64, t: i64, prec: u32) -> Result<Vec<Vec<Float>>> {
    let d = pair_set(s, t)?;
    Ok(d.pairs
        .iter()
        .map(|&a| d.pairs.iter().map(|&b| s_matrix_entry(s, t, a, b, prec)).collect())
        .collect())
}

#[derive(Debug, Clone)]
pub struct ResidueCheck {
    pub k: i64,
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
}

/// Outcome of checking `chi~^{(n,m)}(k) = -sqrt(st/8) sum S chi^{(n',m')}(k)` on
/// every residue.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub s: i64,
    pub t: i64,
    pub pair: (i64, i64),
    pub max_residual: f64,
    /// Residues where `s | k` or `t | k` had a nonzero side.
    pub support_violations: Vec<i64>,
    pub failures: Vec<ResidueCheck>,
    pub tol: f64,
}

impl DecompositionReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.support_violations.is_empty()
    }
}

pub fn verify_decomposition(
    s: i64,
    t: i64,
    pair: (i64, i64),
    ctx: &PrecisionContext,
) -> Result<DecompositionReport> {
    let d = pair_set(s, t)?;
    if !d.contains(pair) {
        return Err(Error::InvalidConfig(format!("{pair:?} is not in D({s}, {t})")));
    }
    let prec = ctx.prec;
    let tilde = chi_function(ChiParams::new(s, t, pair.0, pair.1)?)?.tilde();
    let chis = d
        .pairs
        .iter()
        .map(|&(n, m)| chi_function(ChiParams::new(s, t, n, m)?))
        .collect::<Result<Vec<_>>>()?;
    let row: Vec<Float> = d
        .pairs
        .iter()
        .map(|&q| s_matrix_entry(s, t, pair, q, prec))
        .collect();
    let scale = -(Float::with_val(prec, s * t) / 8u32).sqrt();
    let mut report = DecompositionReport {
        s,
        t,
        pair,
        max_residual: 0.0,
        support_violations: Vec::new(),
        failures: Vec::new(),
        tol: ctx.tol,
    };
    for k in 0..2 * s * t {
        let lhs = tilde.value(k, prec);
        let mut sum = Float::new(prec);
        for (chi, entry) in chis.iter().zip(&row) {
            match chi.sign(k) {
                0 => {}
                1 => sum += entry,
                _ => sum -= entry,
            }
        }
        let rhs = Float::with_val(prec, &scale * &sum);
        let diff = Float::with_val(prec, &lhs - &rhs).abs().to_f64();
        report.max_residual = report.max_residual.max(diff);
        if (k % s == 0 || k % t == 0) && (!lhs.is_zero() || chis.iter().any(|c| c.sign(k) != 0)) {
            report.support_violations.push(k);
        }
        if diff > ctx.tol {
            report.failures.push(ResidueCheck {
                k,
                lhs: lhs.to_f64(),
                rhs: rhs.to_f64(),
                diff,
            });
        }
    }
    Ok(report)
}

/// `S = {+-(nt +- ms) : (n,m) in D(s,t)}`, checked to consist of distinct integers.
pub fn support_set(s: i64, t: i64) -> Result<Vec<i64>> {
    let d = pair_set(s, t)?;
    let mut out = Vec::with_capacity(4 * d.len());
    for &(n, m) in &d.pairs {
        for v in [n * t - m * s, n * t + m * s] {
            out.push(v);
            out.push(-v);
        }
    }
    let mut sorted = out.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Consistency(format!(
            "integer {} occurs twice in S({s}, {t})",
            w[0]
        )));
    }
    Ok(out)
}
