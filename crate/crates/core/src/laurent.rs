//! Exact arithmetic in `K(y)` for a finite field `K`, the `y`-adic valuation,
//! and `d x d` matrices over it standing for elements of `PGL_d(K((y)))`.
//!
//! Nothing here is truncated: entries are reduced rational functions, so
//! valuations and elementary divisors are exact.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Fe, Field, Poly};

/// A reduced rational function `num/den` with monic denominator; zero is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn zero() -> RatFun {
        RatFun { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> RatFun {
        RatFun { num: Poly::one(), den: Poly::one() }
    }

    pub fn constant(c: Fe) -> RatFun {
        RatFun { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> RatFun {
        RatFun { num: p, den: Poly::one() }
    }

    pub fn new(num: Poly, den: Poly, f: &Field) -> Result<RatFun> {
        if den.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Self::reduced(num, den, f))
    }

    fn reduced(num: Poly, den: Poly, f: &Field) -> RatFun {
        if num.is_zero() {
            return RatFun::zero();
        }
        let g = Poly::gcd(&num, &den, f);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.divrem(&g, f).0, den.divrem(&g, f).0)
        };
        if !den.is_monic() {
            let c = f.inv(den.leading());
            num = num.scale(c, f);
            den = den.scale(c, f);
        }
        RatFun { num, den }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// `y`-adic valuation; `None` stands for `+infinity` (the zero function).
    pub fn valuation(&self) -> Option<i64> {
        let n = self.num.trailing_zeros()? as i64;
        let d = self.den.trailing_zeros().unwrap_or(0) as i64;
        Some(n - d)
    }

    pub fn add(&self, o: &RatFun, f: &Field) -> RatFun {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return Self::reduced(self.num.add(&o.num, f), self.den.clone(), f);
        }
        let num = self.num.mul(&o.den, f).add(&o.num.mul(&self.den, f), f);
        Self::reduced(num, self.den.mul(&o.den, f), f)
    }

    pub fn neg(&self, f: &Field) -> RatFun {
        RatFun { num: self.num.neg(f), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFun, f: &Field) -> RatFun {
        self.add(&o.neg(f), f)
    }

    pub fn mul(&self, o: &RatFun, f: &Field) -> RatFun {
        if self.is_zero() || o.is_zero() {
            return RatFun::zero();
        }
        if o.den.is_one() && self.den.is_one() {
            return RatFun { num: self.num.mul(&o.num, f), den: Poly::one() };
        }
        Self::reduced(self.num.mul(&o.num, f), self.den.mul(&o.den, f), f)
    }

    pub fn inv(&self, f: &Field) -> Result<RatFun> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of the zero function".into()));
        }
        Ok(Self::reduced(self.den.clone(), self.num.clone(), f))
    }

    pub fn div(&self, o: &RatFun, f: &Field) -> Result<RatFun> {
        Ok(self.mul(&o.inv(f)?, f))
    }

    /// Value at `y = x`; fails when the denominator vanishes there.
    pub fn eval(&self, x: Fe, f: &Field) -> Result<Fe> {
        let d = self.den.eval(x, f);
        if d.is_zero() {
            return Err(Error::Domain("denominator vanishes at the evaluation point".into()));
        }
        Ok(f.div(self.num.eval(x, f), d))
    }

    /// `num/den` with the comma-separated polynomial syntax.
    pub fn format(&self, f: &Field) -> String {
        format!("{}/{}", self.num.format(f), self.den.format(f))
    }

    pub fn parse(s: &str, f: &Field) -> Result<RatFun> {
        match s.split_once('/') {
            Some((n, d)) => RatFun::new(Poly::parse(n, f)?, Poly::parse(d, f)?, f),
            None => Ok(RatFun::from_poly(Poly::parse(s, f)?)),
        }
    }
}

/// Normalized relative position `(0 = a_1 <= a_2 <= .. <= a_d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelPosition(Vec<i64>);

impl RelPosition {
    /// Sorts and shifts a raw valuation vector so that its first entry is 0.
    pub fn from_raw(raw: &[i64]) -> RelPosition {
        let mut v = raw.to_vec();
        v.sort_unstable();
        let m = v.first().copied().unwrap_or(0);
        RelPosition(v.into_iter().map(|a| a - m).collect())
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn origin(d: usize) -> RelPosition {
        RelPosition(vec![0; d])
    }

    /// `(0,..,0,1,..,1)` with `i` ones: the type-`i` neighbour position.
    pub fn neighbor(d: usize, i: usize) -> RelPosition {
        RelPosition((0..d).map(|j| i64::from(j >= d - i)).collect())
    }

    /// `(0,1,..,1,2)`: vertices sharing a wall but distinct.
    pub fn wall_partner(d: usize) -> RelPosition {
        RelPosition((0..d).map(|j| if j == 0 { 0 } else if j == d - 1 { 2 } else { 1 }).collect())
    }

    pub fn distance(&self) -> i64 {
        self.0.last().copied().unwrap_or(0) - self.0.first().copied().unwrap_or(0)
    }

    /// `sum a_i mod d`, which equals `type(y) - type(x)` when `y` sits at this
    /// position relative to `x`.
    pub fn type_offset(&self) -> u32 {
        let d = self.0.len() as i64;
        self.0.iter().sum::<i64>().rem_euclid(d) as u32
    }

    /// Position of `x` relative to `y`, given this is the position of `y` relative to `x`.
    pub fn reversed(&self) -> RelPosition {
        let top = self.0.last().copied().unwrap_or(0);
        RelPosition(self.0.iter().rev().map(|a| top - a).collect())
    }

    pub fn classify(&self) -> Relation {
        let d = self.0.len();
        let distance = self.distance();
        Relation {
            neighbor: distance == 1,
            same_type: self.type_offset() == 0,
            shares_wall: distance == 0 || *self == RelPosition::wall_partner(d),
            distance,
            type_offset: self.type_offset(),
        }
    }
}

impl fmt::Display for RelPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Combinatorial relation between two building vertices read off their relative position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Relation {
    pub neighbor: bool,
    pub same_type: bool,
    pub shares_wall: bool,
    pub distance: i64,
    pub type_offset: u32,
}

pub fn classify_relation(a: &RelPosition) -> Relation {
    a.classify()
}

/// A `d x d` matrix over `K(y)`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValMatrix {
    d: usize,
    entries: Vec<RatFun>,
}

impl ValMatrix {
    pub fn zero(d: usize) -> ValMatrix {
        ValMatrix { d, entries: vec![RatFun::zero(); d * d] }
    }

    pub fn identity(d: usize) -> ValMatrix {
        let mut m = Self::zero(d);
        for i in 0..d {
            m.entries[i * d + i] = RatFun::one();
        }
        m
    }

    pub fn from_entries(d: usize, entries: Vec<RatFun>) -> ValMatrix {
        assert_eq!(entries.len(), d * d);
        ValMatrix { d, entries }
    }

    pub fn diagonal(diag: Vec<RatFun>) -> ValMatrix {
        let d = diag.len();
        let mut m = Self::zero(d);
        for (i, e) in diag.into_iter().enumerate() {
            m.entries[i * d + i] = e;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFun {
        &self.entries[i * self.d + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFun) {
        self.entries[i * self.d + j] = v;
    }

    pub fn entries(&self) -> &[RatFun] {
        &self.entries
    }

    pub fn mul(&self, o: &ValMatrix, f: &Field) -> ValMatrix {
        let d = self.d;
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = RatFun::zero();
                for k in 0..d {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b, f), f);
                }
                out.push(acc);
            }
        }
        ValMatrix { d, entries: out }
    }

    pub fn scale(&self, s: &RatFun, f: &Field) -> ValMatrix {
        ValMatrix { d: self.d, entries: self.entries.iter().map(|e| e.mul(s, f)).collect() }
    }

    pub fn sub(&self, o: &ValMatrix, f: &Field) -> ValMatrix {
        ValMatrix {
            d: self.d,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.sub(b, f)).collect(),
        }
    }

    pub fn is_scalar(&self) -> bool {
        let d0 = self.get(0, 0);
        (0..self.d).all(|i| {
            (0..self.d).all(|j| if i == j { self.get(i, j) == d0 } else { self.get(i, j).is_zero() })
        })
    }

    pub fn determinant(&self, f: &Field) -> RatFun {
        let d = self.d;
        let mut m = self.entries.clone();
        let mut det = RatFun::one();
        for col in 0..d {
            let Some(piv) = (col..d).find(|&r| !m[r * d + col].is_zero()) else {
                return RatFun::zero();
            };
            if piv != col {
                for c in 0..d {
                    m.swap(piv * d + c, col * d + c);
                }
                det = det.neg(f);
            }
            let pv = m[col * d + col].clone();
            det = det.mul(&pv, f);
            let pinv = pv.inv(f).expect("nonzero pivot");
            for r in col + 1..d {
                if m[r * d + col].is_zero() {
                    continue;
                }
                let factor = m[r * d + col].mul(&pinv, f);
                for c in col..d {
                    let t = factor.mul(&m[col * d + c], f);
                    m[r * d + c] = m[r * d + c].sub(&t, f);
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn inverse(&self, f: &Field) -> Result<ValMatrix> {
        let d = self.d;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(d).entries;
        for col in 0..d {
            let piv = (col..d)
                .find(|&r| !a[r * d + col].is_zero())
                .ok_or_else(|| Error::Domain("singular matrix".into()))?;
            if piv != col {
                for c in 0..d {
                    a.swap(piv * d + c, col * d + c);
                    inv.swap(piv * d + c, col * d + c);
                }
            }
            let pinv = a[col * d + col].inv(f)?;
            for c in 0..d {
                a[col * d + c] = a[col * d + c].mul(&pinv, f);
                inv[col * d + c] = inv[col * d + c].mul(&pinv, f);
            }
            for r in 0..d {
                if r == col || a[r * d + col].is_zero() {
                    continue;
                }
                let factor = a[r * d + col].clone();
                for c in 0..d {
                    let t = factor.mul(&a[col * d + c], f);
                    a[r * d + c] = a[r * d + c].sub(&t, f);
                    let t = factor.mul(&inv[col * d + c], f);
                    inv[r * d + c] = inv[r * d + c].sub(&t, f);
                }
            }
        }
        Ok(ValMatrix { d, entries: inv })
    }

    /// Valuations of the elementary divisors over the valuation ring, sorted
    /// nondecreasing (not normalized).
    ///
    /// Pivoting on an entry of minimal valuation keeps every elimination step
    /// inside `GL_d` of the valuation ring, and the Schur complement left over
    /// never has smaller valuation than the pivot.
    pub fn invariant_valuations(&self, f: &Field) -> Result<Vec<i64>> {
        let mut n = self.d;
        let mut m = self.entries.clone();
        let mut out = Vec::with_capacity(n);
        while n > 0 {
            let mut best: Option<(usize, i64)> = None;
            for (idx, e) in m.iter().enumerate() {
                if let Some(v) = e.valuation() {
                    if best.is_none_or(|(_, bv)| v < bv) {
                        best = Some((idx, v));
                    }
                }
            }
            let (idx, v) = best.ok_or_else(|| Error::Domain("singular matrix".into()))?;
            out.push(v);
            let (pr, pc) = (idx / n, idx % n);
            let pinv = m[idx].inv(f)?;
            let mut next = Vec::with_capacity((n - 1) * (n - 1));
            for r in (0..n).filter(|&r| r != pr) {
                let factor = m[r * n + pc].mul(&pinv, f);
                for c in (0..n).filter(|&c| c != pc) {
                    let e = &m[r * n + c];
                    if factor.is_zero() {
                        next.push(e.clone());
                    } else {
                        next.push(e.sub(&factor.mul(&m[pr * n + c], f), f));
                    }
                }
            }
            m = next;
            n -= 1;
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Normalized elementary-divisor valuations (relative position of `m x_0` w.r.t. `x_0`).
    pub fn rel_position(&self, f: &Field) -> Result<RelPosition> {
        Ok(RelPosition::from_raw(&self.invariant_valuations(f)?))
    }

    /// Canonical representative of the projective class: the matrix divided
    /// by its first (row-major) entry of minimal valuation.
    pub fn projective_canonical(&self, f: &Field) -> Result<ValMatrix> {
        let mut best: Option<(usize, i64)> = None;
        for (idx, e) in self.entries.iter().enumerate() {
            if let Some(v) = e.valuation() {
                if best.is_none_or(|(_, bv)| v < bv) {
                    best = Some((idx, v));
                }
            }
        }
        let (idx, _) = best.ok_or_else(|| Error::Domain("zero matrix".into()))?;
        let s = self.entries[idx].inv(f)?;
        let out = self.scale(&s, f);
        if self.d > 1 && out.determinant(f).is_zero() {
            return Err(Error::Domain("singular matrix".into()));
        }
        Ok(out)
    }

    /// Entries as `num/den`, separated by ';' in row-major order.
    pub fn format(&self, f: &Field) -> String {
        self.entries.iter().map(|e| e.format(f)).collect::<Vec<_>>().join(";")
    }

    pub fn parse(s: &str, d: usize, f: &Field) -> Result<ValMatrix> {
        let entries = s.split(';').map(|e| RatFun::parse(e, f)).collect::<Result<Vec<_>>>()?;
        if entries.len() != d * d {
            return Err(Error::Parameter(format!("expected {} entries, got {}", d * d, entries.len())));
        }
        Ok(ValMatrix { d, entries })
    }
}

/// Relative position of `h x_0` with respect to `g x_0`.
pub fn relative_position(g: &ValMatrix, h: &ValMatrix, f: &Field) -> Result<RelPosition> {
    g.inverse(f)?.mul(h, f).rel_position(f)
}
