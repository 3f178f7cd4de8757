//! Evaluation of Habiro-ring elements at roots of unity: q-Pochhammer symbols,
//! Gaussian binomials, the Kontsevich-Zagier series, the colored Jones
//! polynomial of the trefoil, Hikami's sums `X_u^(l)` and the strange identities
//! tying them to radial limits of partial theta series.

use rayon::prelude::*;
use rug::{Integer, Rational};

use crate::num::{Cx, PrecisionContext};
use crate::periodic::{chi_function, ChiParams};
use crate::qseries::{theta_radial_limit, ThetaSpec};
use crate::{Error, Result};

/// Orders up to which [`ExactRing`] is used by default.
pub const EXACT_ORDER_MAX: u64 = 8;

/// Term budget of the nested Hikami sum, in units of `u N^u`.
pub const HIKAMI_BUDGET: f64 = 5e7;

/// `e^{2 pi i j/N}` with `gcd(j, N) = 1`, `0 <= j < N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    j: u64,
    n: u64,
}

impl RootOfUnity {
    pub fn new(j: i64, n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidConfig(format!("root of unity order {n} must be positive")));
        }
        let r = Rational::from((j, n));
        Self::from_rational(&r)
    }

    /// `e^{2 pi i alpha}` for rational `alpha`, reduced.
    pub fn from_rational(alpha: &Rational) -> Result<Self> {
        let n = alpha.denom().to_u64().ok_or_else(|| Error::InvalidConfig("order too large".into()))?;
        let j = <(Integer, Integer)>::from(alpha.numer().div_rem_euc_ref(alpha.denom()))
            .1
            .to_u64()
            .expect("reduced numerator fits");
        Ok(Self { j, n })
    }

    pub fn primitive(n: u64) -> Self {
        Self { j: 1 % n.max(1), n }
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn exponent(&self) -> u64 {
        self.j
    }

    /// `j/N` as a rational in `[0, 1)`.
    pub fn angle(&self) -> Rational {
        Rational::from((self.j, self.n))
    }

    /// Exponent of `q^k` in units of `1/N`, reduced mod `N`.
    pub fn power_index(&self, k: i64) -> u64 {
        let n = self.n as i128;
        ((self.j as i128 * k as i128).rem_euclid(n)) as u64
    }

    pub fn value(&self, prec: u32) -> Cx {
        Cx::root_of_unity(self.j as i64, self.n, prec)
    }

    pub fn pow(&self, k: i64, prec: u32) -> Cx {
        Cx::root_of_unity(self.power_index(k) as i64, self.n, prec)
    }
}

/// Arithmetic in which `q` is a fixed root of unity.
pub trait QRing: Sync {
    type Elem: Clone + Send + Sync;
    fn root(&self) -> RootOfUnity;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn q_pow(&self, k: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn to_complex(&self, a: &Self::Elem, prec: u32) -> Cx;
}

/// `Z[X]/(X^N - 1)` with `q = X^j`: exact, evaluated at `X = e^{2 pi i/N}` on output.
#[derive(Debug, Clone)]
pub struct ExactRing {
    root: RootOfUnity,
}

impl ExactRing {
    pub fn new(root: RootOfUnity) -> Self {
        Self { root }
    }
}

impl QRing for ExactRing {
    type Elem = Vec<Integer>;

    fn root(&self) -> RootOfUnity {
        self.root
    }

    fn zero(&self) -> Vec<Integer> {
        vec![Integer::new(); self.root.n as usize]
    }

    fn one(&self) -> Vec<Integer> {
        self.q_pow(0)
    }

    fn q_pow(&self, k: i64) -> Vec<Integer> {
        let mut v = self.zero();
        v[self.root.power_index(k) as usize] = Integer::from(1);
        v
    }

    fn add(&self, a: &Vec<Integer>, b: &Vec<Integer>) -> Vec<Integer> {
        a.iter().zip(b).map(|(x, y)| Integer::from(x + y)).collect()
    }

    fn sub(&self, a: &Vec<Integer>, b: &Vec<Integer>) -> Vec<Integer> {
        a.iter().zip(b).map(|(x, y)| Integer::from(x - y)).collect()
    }

    fn mul(&self, a: &Vec<Integer>, b: &Vec<Integer>) -> Vec<Integer> {
        let n = self.root.n as usize;
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if x.cmp0().is_eq() {
                continue;
            }
            for (k, y) in b.iter().enumerate() {
                if y.cmp0().is_ne() {
                    out[(i + k) % n] += Integer::from(x * y);
                }
            }
        }
        out
    }

    fn is_zero(&self, a: &Vec<Integer>) -> bool {
        a.iter().all(|x| x.cmp0().is_eq())
    }

    fn to_complex(&self, a: &Vec<Integer>, prec: u32) -> Cx {
        let mut acc = Cx::zero(prec);
        for (i, c) in a.iter().enumerate() {
            if c.cmp0().is_ne() {
                let z = Cx::root_of_unity(i as i64, self.root.n, prec);
                acc = acc + z.scale(&rug::Float::with_val(prec, c));
            }
        }
        acc
    }
}

/// Floating complex arithmetic with exactly reduced powers of `q`.
#[derive(Debug, Clone)]
pub struct NumericRing {
    root: RootOfUnity,
    prec: u32,
}

impl NumericRing {
    pub fn new(root: RootOfUnity, prec: u32) -> Self {
        Self { root, prec }
    }
}

impl QRing for NumericRing {
    type Elem = Cx;

    fn root(&self) -> RootOfUnity {
        self.root
    }

    fn zero(&self) -> Cx {
        Cx::zero(self.prec)
    }

    fn one(&self) -> Cx {
        Cx::one(self.prec)
    }

    fn q_pow(&self, k: i64) -> Cx {
        self.root.pow(k, self.prec)
    }

    fn add(&self, a: &Cx, b: &Cx) -> Cx {
        a + b
    }

    fn sub(&self, a: &Cx, b: &Cx) -> Cx {
        a - b
    }

    fn mul(&self, a: &Cx, b: &Cx) -> Cx {
        a * b
    }

    fn is_zero(&self, a: &Cx) -> bool {
        a.is_zero()
    }

    fn to_complex(&self, a: &Cx, prec: u32) -> Cx {
        a.with_prec(prec)
    }
}

/// `(q^a; q)_n = prod_{k=1}^n (1 - q^{a+k-1})`.
pub fn q_pochhammer<R: QRing>(ring: &R, a: i64, n: u64) -> R::Elem {
    let one = ring.one();
    let mut acc = ring.one();
    for k in 1..=n as i64 {
        let f = ring.sub(&one, &ring.q_pow(a + k - 1));
        if ring.is_zero(&f) {
            return ring.zero();
        }
        acc = ring.mul(&acc, &f);
    }
    acc
}

/// `(a; q)_n` for arbitrary complex `a`, `q`.
pub fn q_pochhammer_complex(a: &Cx, q: &Cx, n: u64) -> Cx {
    let prec = q.prec();
    let one = Cx::one(prec);
    let mut acc = Cx::one(prec);
    let mut aq = a.clone();
    for _ in 0..n {
        acc = &acc * &(&one - &aq);
        aq = &aq * q;
    }
    acc
}

/// Gaussian binomials `[n k]_q` for `n <= max`, by the Pascal rule
/// `[n k] = [n-1 k-1] + q^k [n-1 k]` (no division, so no 0/0 at roots of unity).
pub struct BinomialTable<R: QRing> {
    rows: Vec<Vec<R::Elem>>,
    zero: R::Elem,
}

impl<R: QRing> BinomialTable<R> {
    pub fn new(ring: &R, max: usize) -> Self {
        let mut rows: Vec<Vec<R::Elem>> = Vec::with_capacity(max + 1);
        rows.push(vec![ring.one()]);
        for n in 1..=max {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            for k in 0..=n {
                let left = if k > 0 { prev[k - 1].clone() } else { ring.zero() };
                let right = if k < n {
                    ring.mul(&ring.q_pow(k as i64), &prev[k])
                } else {
                    ring.zero()
                };
                row.push(ring.add(&left, &right));
            }
            rows.push(row);
        }
        Self { rows, zero: ring.zero() }
    }

    pub fn get(&self, top: i64, bottom: i64) -> &R::Elem {
        if bottom < 0 || top < 0 || bottom > top || top as usize >= self.rows.len() {
            return &self.zero;
        }
        &self.rows[top as usize][bottom as usize]
    }
}

/// `[top bottom]_q`, zero outside `0 <= bottom <= top`.
pub fn q_binomial<R: QRing>(ring: &R, top: i64, bottom: i64) -> R::Elem {
    if bottom < 0 || top < 0 || bottom > top {
        return ring.zero();
    }
    BinomialTable::new(ring, top as usize).get(top, bottom).clone()
}

/// `sum_{n=0}^{N'} (q;q)_n`, `N' = N - 1` by default.
pub fn kontsevich_zagier_partial<R: QRing>(ring: &R, last: u64) -> R::Elem {
    let one = ring.one();
    let mut term = ring.one();
    let mut acc = ring.one();
    for n in 1..=last as i64 {
        term = ring.mul(&term, &ring.sub(&one, &ring.q_pow(n)));
        acc = ring.add(&acc, &term);
    }
    acc
}

/// `Phi(q) = sum_n (q;q)_n` at a root of unity, where the sum terminates.
pub fn kontsevich_zagier_eval<R: QRing>(ring: &R) -> R::Elem {
    kontsevich_zagier_partial(ring, ring.root().order() - 1)
}

/// `J_N(3_1; q) = q^{1-N} sum_n q^{-nN} (q^{1-N}; q)_n` at `q = e^{2 pi i/N}`,
/// evaluated term by term with the literal exponents.
pub fn colored_jones_trefoil(n: u64, prec: u32) -> Result<Cx> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("colored Jones needs N >= 2, got {n}")));
    }
    let ring = NumericRing::new(RootOfUnity::primitive(n), prec + 16);
    let ni = n as i64;
    let mut acc = ring.zero();
    for k in 0..n {
        let term = ring.mul(&ring.q_pow(-(k as i64) * ni), &q_pochhammer(&ring, 1 - ni, k));
        acc = ring.add(&acc, &term);
    }
    Ok(ring.mul(&ring.q_pow(1 - ni), &acc).with_prec(prec))
}

/// Order of the nested loops in [`hikami_x`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopOrder {
    /// `k_u` outermost, then `k_{u-1}`, ..., `k_1`.
    TopDown,
    /// `k_1` outermost, then `k_2`, ..., `k_u`.
    BottomUp,
}

fn delta(i: usize, l: usize) -> i64 {
    i64::from(i == l)
}

struct Hikami<'a, R: QRing> {
    ring: &'a R,
    u: usize,
    l: usize,
    binom: BinomialTable<R>,
    poch: Vec<R::Elem>,
    kmax: i64,
}

impl<R: QRing> Hikami<'_, R> {
    /// Term for a full tuple `k[1..=u]` (index 0 unused).
    fn term(&self, k: &[i64]) -> R::Elem {
        let u = self.u;
        let mut e = 0i64;
        for (i, &ki) in k.iter().enumerate().take(u).skip(1) {
            e += ki * ki;
            if i > self.l {
                e += ki;
            }
        }
        let mut acc = self.ring.mul(&self.poch[k[u] as usize], &self.ring.q_pow(e));
        for i in 1..u {
            let b = self.binom.get(k[i + 1] + delta(i, self.l), k[i]);
            if self.ring.is_zero(b) {
                return self.ring.zero();
            }
            acc = self.ring.mul(&acc, b);
        }
        acc
    }

    fn top_down(&self, k: &mut Vec<i64>, i: usize, acc: &mut R::Elem) {
        if i == 0 {
            *acc = self.ring.add(acc, &self.term(k));
            return;
        }
        for ki in 0..=k[i + 1] + delta(i, self.l) {
            k[i] = ki;
            self.top_down(k, i - 1, acc);
        }
    }

    fn bottom_up(&self, k: &mut Vec<i64>, i: usize, acc: &mut R::Elem) {
        if i > self.u {
            *acc = self.ring.add(acc, &self.term(k));
            return;
        }
        let lo = if i == 1 { 0 } else { (k[i - 1] - delta(i - 1, self.l)).max(0) };
        let hi = if i == self.u { self.kmax - 1 } else { self.kmax };
        for ki in lo..=hi {
            k[i] = ki;
            self.bottom_up(k, i + 1, acc);
        }
    }
}

/// `X_u^(l)(q) = sum (q)_{k_u} q^{k_1^2+...+k_{u-1}^2 + k_{l+1}+...+k_{u-1}}
/// prod_{i<u} [k_{i+1} + delta_{i,l}  k_i]` at a root of unity of order `N`.
///
/// `(q)_{k_u}` vanishes for `k_u >= N` and the binomials vanish for
/// `k_i > k_{i+1} + delta_{i,l}`, so the sum is finite.
pub fn hikami_x<R: QRing>(ring: &R, u: usize, l: usize, order: LoopOrder) -> Result<R::Elem> {
    if u < 1 || l >= u {
        return Err(Error::InvalidConfig(format!("need u >= 1 and 0 <= l < u, got u = {u}, l = {l}")));
    }
    let n = ring.root().order();
    let cost = u as f64 * (n as f64).powi(u as i32);
    if cost > HIKAMI_BUDGET {
        return Err(Error::Budget(format!(
            "Hikami sum with u = {u} at order {n} needs ~{cost:e} terms (budget {HIKAMI_BUDGET:e})"
        )));
    }
    let kmax = n as i64;
    let poch: Vec<R::Elem> = {
        let one = ring.one();
        let mut v = vec![ring.one()];
        for k in 1..n as i64 {
            let next = ring.mul(v.last().expect("nonempty"), &ring.sub(&one, &ring.q_pow(k)));
            v.push(next);
        }
        v
    };
    let h = Hikami {
        ring,
        u,
        l,
        binom: BinomialTable::new(ring, kmax as usize + 1),
        poch,
        kmax,
    };
    // the outermost index is split across threads; partial sums are added in index order
    let partials: Vec<R::Elem> = (0..=kmax)
        .into_par_iter()
        .map(|outer| {
            let mut k = vec![0i64; u + 2];
            let mut acc = ring.zero();
            match order {
                LoopOrder::TopDown => {
                    if outer < kmax {
                        k[u] = outer;
                        h.top_down(&mut k, u - 1, &mut acc);
                    }
                }
                LoopOrder::BottomUp => {
                    k[1] = outer;
                    if u == 1 {
                        if outer < kmax {
                            acc = h.term(&k);
                        }
                    } else {
                        h.bottom_up(&mut k, 2, &mut acc);
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = ring.zero();
    for p in &partials {
        total = ring.add(&total, p);
    }
    Ok(total)
}

/// Habiro-side family of a strange identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrangeFamily {
    /// `Phi_{3_1}(q) = sum (q)_n` against `theta^{(1)}_{1,24,-chi_12/2}`.
    Trefoil,
    /// `X_u^(l)(q)` against `theta^{(1)}_{(2u-2l-1)^2, 8(2u+1), -chi/2}`.
    Hikami { u: usize, l: usize },
}

impl StrangeFamily {
    /// The partial theta series on the other side of the identity.
    pub fn theta_spec(&self) -> Result<ThetaSpec> {
        let (u, l) = match *self {
            StrangeFamily::Trefoil => (1, 0),
            StrangeFamily::Hikami { u, l } => (u, l),
        };
        hikami_theta_spec(u, l)
    }
}

/// `a = (2u-2l-1)^2`, `b = 8(2u+1)`, `f = -chi_{4(2u+1)}^{(1,l+1)}/2`.
pub fn hikami_theta_spec(u: usize, l: usize) -> Result<ThetaSpec> {
    if u < 1 || l >= u {
        return Err(Error::InvalidConfig(format!("need u >= 1 and 0 <= l < u, got u = {u}, l = {l}")));
    }
    let (u, l) = (u as i64, l as i64);
    let chi = chi_function(ChiParams::new(2, 2 * u + 1, 1, l + 1)?)?;
    let f = chi.with_scale(Rational::from((-1, 2)))?;
    let a = (2 * u - 2 * l - 1).pow(2);
    ThetaSpec::periodic(a, 8 * (2 * u + 1), 1, f)
}

#[derive(Debug, Clone)]
pub struct StrangeReport {
    pub family: StrangeFamily,
    pub alpha: Rational,
    pub lhs: Cx,
    pub rhs: Cx,
    pub residual: f64,
    pub exact_ring: bool,
}

/// Habiro-side value at `q = e^{2 pi i alpha}`, exact ring for small orders.
pub fn habiro_value(family: StrangeFamily, root: RootOfUnity, prec: u32) -> Result<(Cx, bool)> {
    let (u, l) = match family {
        StrangeFamily::Trefoil => (1, 0),
        StrangeFamily::Hikami { u, l } => (u, l),
    };
    if root.order() <= EXACT_ORDER_MAX {
        let ring = ExactRing::new(root);
        let v = hikami_x(&ring, u, l, LoopOrder::TopDown)?;
        Ok((ring.to_complex(&v, prec), true))
    } else {
        let ring = NumericRing::new(root, prec + 32);
        let v = hikami_x(&ring, u, l, LoopOrder::TopDown)?;
        Ok((v.with_prec(prec), false))
    }
}

/// Compares the Habiro-side value at `e^{2 pi i alpha}` with the radial limit
/// of the matching partial theta series.
pub fn verify_strange(family: StrangeFamily, alpha: &Rational, ctx: &PrecisionContext) -> Result<StrangeReport> {
    let root = RootOfUnity::from_rational(alpha)?;
    let (lhs, exact_ring) = habiro_value(family, root, ctx.prec)?;
    let rhs = theta_radial_limit(&family.theta_spec()?, alpha, ctx)?;
    let residual = lhs.dist(&rhs);
    Ok(StrangeReport {
        family,
        alpha: alpha.clone(),
        lhs,
        rhs,
        residual,
        exact_ring,
    })
}
