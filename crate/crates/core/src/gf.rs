//! Finite fields `F_{p^k}` for odd primes `p`, and dense polynomials over them.
//!
//! A field element is stored as its integer code `sum c_i p^i`, where
//! `(c_0, .., c_{k-1})` is the coefficient vector in the power basis of the
//! modulus. Multiplication goes through discrete log / antilog tables built
//! once at construction, so fields are limited to desk sizes
//! (`MAX_FIELD_SIZE`).
//!
//! Every subfield `F_{p^s}` (`s | k`) is the fixed field of `x -> x^{p^s}`.
//! Towers such as `F_q ⊂ F_{q^d}` with `q = p^m` are handled by working in a
//! single field that contains all of them.
//!
//! "Lexicographic order" on elements and polynomials always compares the
//! coefficient vector low degree first: `c_0` is the most significant entry.

use std::fmt;

use crate::error::{param, Error, Result};

/// Largest field order for which log tables are built.
pub const MAX_FIELD_SIZE: u64 = 1 << 22;

/// A field element, encoded as `sum c_i p^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// `F_{p^k}` with a fixed monic irreducible modulus.
pub struct Field {
    p: u32,
    k: u32,
    size: u32,
    modulus: Vec<u32>,
    generator: Fe,
    // exp has length 2(size-1) so that log a + log b never needs a reduction
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add_table: Option<Vec<u32>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} (modulus {})", self.p, self.k, fmt_modp(&self.modulus))
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Writes `q` as `p^m`; `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    let fs = prime_factors(q);
    if fs.len() != 1 {
        return None;
    }
    let p = fs[0];
    let mut m = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        m += 1;
    }
    Some((p as u32, m))
}

// ---- polynomials over F_p as plain residue vectors (used before the field exists)

fn mp_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn mp_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let mut out: Vec<u32> = out.into_iter().map(|v| v as u32).collect();
    mp_trim(&mut out);
    out
}

fn mp_inv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn mp_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    mp_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mp_inv(m[dm], p) as u64;
    while r.len() > dm {
        let top = r.len() - 1;
        let c = r[top] as u64 * lead_inv % p as u64;
        for (i, &mi) in m.iter().enumerate() {
            let idx = top - dm + i;
            r[idx] = ((r[idx] as u64 + (p as u64 - c) * mi as u64) % p as u64) as u32;
        }
        mp_trim(&mut r);
    }
    r
}

fn mp_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    mp_trim(&mut a);
    mp_trim(&mut b);
    while !b.is_empty() {
        let r = mp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or irreducibility test over `F_p`.
fn mp_is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let y = vec![0, 1];
    let mut power = y.clone();
    for _ in 1..=n / 2 {
        // power <- power^p mod f
        let mut acc = vec![1u32];
        for _ in 0..p {
            acc = mp_rem(&mp_mul(&acc, &power, p), f, p);
        }
        power = acc;
        let mut diff = power.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        mp_trim(&mut diff);
        let g = mp_gcd(f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn fmt_modp(c: &[u32]) -> String {
    c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

impl Field {
    /// Builds `F_{p^k}` with the lexicographically smallest monic irreducible
    /// modulus of degree `k`.
    pub fn new(p: u32, k: u32) -> Result<Field> {
        if !is_prime(p as u64) {
            return param(format!("p = {p} is not prime"));
        }
        if p == 2 {
            return param("characteristic 2 is not supported");
        }
        if k < 1 {
            return param("extension degree must be at least 1");
        }
        let size = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
        if size > MAX_FIELD_SIZE {
            return param(format!("field of order {p}^{k} exceeds the table limit {MAX_FIELD_SIZE}"));
        }
        let size = size as u32;
        let mut modulus = None;
        for n in 0..size {
            let mut c = lex_digits(n, p, k);
            c.push(1);
            if mp_is_irreducible(&c, p) {
                modulus = Some(c);
                break;
            }
        }
        let modulus = modulus.expect("irreducible polynomials exist in every degree");
        Self::with_modulus(p, modulus)
    }

    /// Builds the field from an explicit monic modulus (low degree first).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Field> {
        if !is_prime(p as u64) || p == 2 {
            return param(format!("p = {p} must be an odd prime"));
        }
        let k = modulus.len() as u32 - 1;
        if k < 1 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return param("modulus must be monic of degree >= 1 with residues below p");
        }
        if !mp_is_irreducible(&modulus, p) {
            return param(format!("modulus {} is reducible", fmt_modp(&modulus)));
        }
        let size = (p as u64).pow(k);
        if size > MAX_FIELD_SIZE {
            return param("field too large");
        }
        let size = size as u32;
        let slow_mul = |a: u32, b: u32| -> u32 {
            let prod = mp_mul(&code_digits(a, p, k), &code_digits(b, p, k), p);
            digits_code(&mp_rem(&prod, &modulus, p), p)
        };
        let group = (size - 1) as u64;
        let factors = prime_factors(group);
        let slow_pow = |a: u32, mut e: u64| -> u32 {
            let mut r = 1u32;
            let mut b = a;
            while e > 0 {
                if e & 1 == 1 {
                    r = slow_mul(r, b);
                }
                b = slow_mul(b, b);
                e >>= 1;
            }
            r
        };
        let mut generator = 0;
        for n in 1..size {
            let cand = digits_code(&lex_digits(n, p, k), p);
            if cand == 0 {
                continue;
            }
            if factors.iter().all(|&l| slow_pow(cand, group / l) != 1) {
                generator = cand;
                break;
            }
        }
        debug_assert!(generator != 0 || size == 2);
        let mut exp = vec![0u32; 2 * (size as usize - 1)];
        let mut log = vec![0u32; size as usize];
        let mut cur = 1u32;
        for i in 0..size as usize - 1 {
            exp[i] = cur;
            exp[i + size as usize - 1] = cur;
            log[cur as usize] = i as u32;
            cur = slow_mul(cur, generator);
        }
        let neg = (0..size)
            .map(|c| {
                let d: Vec<u32> = code_digits(c, p, k).iter().map(|&x| (p - x) % p).collect();
                digits_code(&d, p)
            })
            .collect();
        let mut field = Field {
            p,
            k,
            size,
            modulus,
            generator: Fe(generator),
            exp,
            log,
            neg,
            add_table: None,
        };
        if size <= 1024 {
            let mut t = vec![0u32; (size * size) as usize];
            for a in 0..size {
                for b in 0..size {
                    t[(a * size + b) as usize] = field.add_digits(a, b);
                }
            }
            field.add_table = Some(t);
        }
        Ok(field)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    /// Modulus coefficients, low degree first (monic).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// A generator of the multiplicative group (smallest in lex order).
    pub fn generator(&self) -> Fe {
        self.generator
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }

    pub fn one(&self) -> Fe {
        Fe::ONE
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> Fe {
        Fe(v.rem_euclid(self.p as i64) as u32)
    }

    pub fn digits(&self, x: Fe) -> Vec<u32> {
        code_digits(x.0, self.p, self.k)
    }

    pub fn from_digits(&self, d: &[u32]) -> Result<Fe> {
        if d.len() > self.k as usize || d.iter().any(|&c| c >= self.p) {
            return param("coefficient vector does not describe an element of this field");
        }
        Ok(Fe(digits_code(d, self.p)))
    }

    /// Position of `x` in the lexicographic order (low coefficient most significant).
    pub fn lex_key(&self, x: Fe) -> u32 {
        let d = self.digits(x);
        d.iter().fold(0u32, |acc, &c| acc * self.p + c)
    }

    pub fn from_lex_key(&self, n: u32) -> Fe {
        Fe(digits_code(&lex_digits(n, self.p, self.k), self.p))
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let p = self.p;
        let mut r = 0;
        let mut m = 1;
        for _ in 0..self.k {
            r += ((a % p + b % p) % p) * m;
            m *= p;
            a /= p;
            b /= p;
        }
        r
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.k == 1 {
            let s = a.0 + b.0;
            return Fe(if s >= self.p { s - self.p } else { s });
        }
        match &self.add_table {
            Some(t) => Fe(t[(a.0 * self.size + b.0) as usize]),
            None => Fe(self.add_digits(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        Fe(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: Fe) -> Fe {
        assert!(!a.is_zero(), "inverse of zero");
        let l = self.log[a.0 as usize];
        Fe(self.exp[((self.size - 1 - l) % (self.size - 1)) as usize])
    }

    pub fn try_inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(self.inv(a))
    }

    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        let n = (self.size - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Fe(self.exp[((l * (e % n)) % n) as usize])
    }

    /// Discrete log of a nonzero element w.r.t. `generator()`.
    pub fn log(&self, a: Fe) -> u32 {
        assert!(!a.is_zero());
        self.log[a.0 as usize]
    }

    pub fn exp(&self, i: u64) -> Fe {
        Fe(self.exp[(i % (self.size as u64 - 1)) as usize])
    }

    /// `x^p`.
    pub fn frobenius(&self, x: Fe) -> Fe {
        self.pow(x, self.p as u64)
    }

    /// `x^{p^j}`.
    pub fn frobenius_pow(&self, x: Fe, j: u32) -> Fe {
        if x.is_zero() {
            return x;
        }
        let n = (self.size - 1) as u64;
        let mut e = 1u64;
        for _ in 0..j % self.k {
            e = e * self.p as u64 % n;
        }
        self.pow(x, e)
    }

    /// Least `n >= 1` with `x^n = 1`.
    pub fn element_order(&self, x: Fe) -> Result<u64> {
        if x.is_zero() {
            return Err(Error::Domain("zero has no multiplicative order".into()));
        }
        let n = (self.size - 1) as u64;
        Ok(n / num_integer::gcd(self.log(x) as u64, n))
    }

    pub fn has_subfield(&self, s: u32) -> bool {
        s >= 1 && self.k % s == 0
    }

    /// Whether `x` lies in the subfield `F_{p^s}`.
    pub fn in_subfield(&self, x: Fe, s: u32) -> bool {
        self.frobenius_pow(x, s) == x
    }

    /// All elements of `F_{p^s}`, sorted lexicographically.
    pub fn subfield_elements(&self, s: u32) -> Result<Vec<Fe>> {
        if !self.has_subfield(s) {
            return param(format!("F_{}^{} has no subfield of degree {s}", self.p, self.k));
        }
        let sub = (self.p as u64).pow(s);
        let step = (self.size as u64 - 1) / (sub - 1);
        let mut out: Vec<Fe> = std::iter::once(Fe::ZERO)
            .chain((0..sub - 1).map(|j| self.exp(j * step)))
            .collect();
        out.sort_by_key(|&x| self.lex_key(x));
        Ok(out)
    }

    /// Minimal polynomial of `x` over the subfield `F_{p^s}`: the product of
    /// `(y - c)` over the distinct conjugates `c = x^{p^{s j}}`.
    pub fn minimal_polynomial(&self, x: Fe, s: u32) -> Result<Poly> {
        if !self.has_subfield(s) {
            return param(format!("no subfield of degree {s}"));
        }
        let mut conj = vec![x];
        let mut c = self.frobenius_pow(x, s);
        while c != x {
            conj.push(c);
            c = self.frobenius_pow(c, s);
        }
        let mut f = Poly::one();
        for c in conj {
            f = f.mul(&Poly::from_coeffs(vec![self.neg(c), Fe::ONE]), self);
        }
        Ok(f)
    }

    /// Whether `xs` are linearly independent over `F_{p^s}` (Moore determinant).
    pub fn independent_over(&self, xs: &[Fe], s: u32) -> bool {
        let n = xs.len();
        let mut m: Vec<Vec<Fe>> = xs
            .iter()
            .map(|&x| (0..n as u32).map(|j| self.frobenius_pow(x, s * j)).collect())
            .collect();
        !determinant(&mut m, self).is_zero()
    }

    /// Smallest `xi` (lex order) in `F_{p^{s n}}` whose conjugates
    /// `xi, phi(xi), .., phi^{n-1}(xi)` under `phi(x) = x^{p^s}` form a basis
    /// over `F_{p^s}`.
    pub fn find_normal_element(&self, s: u32, n: u32) -> Result<Fe> {
        let ext = self.subfield_elements(s * n)?;
        for x in ext.into_iter().filter(|x| !x.is_zero()) {
            let conj: Vec<Fe> = (0..n).map(|j| self.frobenius_pow(x, s * j)).collect();
            if self.independent_over(&conj, s) {
                return Ok(x);
            }
        }
        Err(Error::Consistency("no normal element found".into()))
    }

    /// Element text form: an integer for prime-field elements, otherwise the
    /// coefficient vector joined by ':' (low degree first).
    pub fn format(&self, x: Fe) -> String {
        let mut d = self.digits(x);
        while d.len() > 1 && d.last() == Some(&0) {
            d.pop();
        }
        d.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":")
    }

    pub fn parse(&self, s: &str) -> Result<Fe> {
        let s = s.trim();
        let mut d = Vec::new();
        for part in s.split(':') {
            let v: i64 = part
                .trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("bad field element '{s}'")))?;
            d.push(v.rem_euclid(self.p as i64) as u32);
        }
        self.from_digits(&d)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.size).map(Fe)
    }
}

fn code_digits(mut c: u32, p: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = c % p;
            c /= p;
            d
        })
        .collect()
}

fn digits_code(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Coefficient vector of the `n`-th element in lex order (c_0 most significant).
fn lex_digits(mut n: u32, p: u32, k: u32) -> Vec<u32> {
    let mut d = vec![0; k as usize];
    for i in (0..k as usize).rev() {
        d[i] = n % p;
        n /= p;
    }
    d
}

/// Determinant by Gaussian elimination (destroys `m`).
pub fn determinant(m: &mut [Vec<Fe>], f: &Field) -> Fe {
    let n = m.len();
    let mut det = Fe::ONE;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Fe::ZERO;
        };
        if piv != col {
            m.swap(piv, col);
            det = f.neg(det);
        }
        let pv = m[col][col];
        det = f.mul(det, pv);
        let inv = f.inv(pv);
        for r in col + 1..n {
            let factor = f.mul(m[r][col], inv);
            if factor.is_zero() {
                continue;
            }
            for c in col..n {
                let t = f.mul(factor, m[col][c]);
                m[r][c] = f.sub(m[r][c], t);
            }
        }
    }
    det
}

/// Dense polynomial over a `Field`, low degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    coeffs: Vec<Fe>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { coeffs: vec![Fe::ONE] }
    }

    pub fn constant(c: Fe) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// The indeterminate `y`.
    pub fn y() -> Poly {
        Poly { coeffs: vec![Fe::ZERO, Fe::ONE] }
    }

    pub fn from_coeffs(mut coeffs: Vec<Fe>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Polynomial with prime-field integer coefficients, low degree first.
    pub fn from_ints(c: &[i64], f: &Field) -> Poly {
        Poly::from_coeffs(c.iter().map(|&v| f.from_int(v)).collect())
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Fe::ONE
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Fe::ONE
    }

    /// Multiplicity of the root `y = 0`; `None` for zero.
    pub fn trailing_zeros(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, o: &Poly, f: &Field) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Poly, f: &Field) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn neg(&self, f: &Field) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn scale(&self, c: Fe, f: &Field) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, o: &Poly, f: &Field) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fe::ZERO; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    /// Divides by `y^k`, assuming the low `k` coefficients vanish.
    pub fn shift_down(&self, k: usize) -> Poly {
        debug_assert!(self.coeffs.iter().take(k).all(|c| c.is_zero()));
        Poly::from_coeffs(self.coeffs.iter().skip(k).copied().collect())
    }

    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Fe::ZERO; k];
        c.extend_from_slice(&self.coeffs);
        Poly { coeffs: c }
    }

    /// Quotient and remainder; panics when dividing by zero.
    pub fn divrem(&self, d: &Poly, f: &Field) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![Fe::ZERO; r.len() - dd];
        let inv = f.inv(d.leading());
        for top in (dd..r.len()).rev() {
            let c = f.mul(r[top], inv);
            if c.is_zero() {
                continue;
            }
            q[top - dd] = c;
            for (i, &di) in d.coeffs.iter().enumerate() {
                let idx = top - dd + i;
                r[idx] = f.sub(r[idx], f.mul(c, di));
            }
        }
        r.truncate(dd);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    pub fn monic(&self, f: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f.inv(self.leading()), f)
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly, f: &Field) -> Poly {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn eval(&self, x: Fe, f: &Field) -> Fe {
        self.coeffs.iter().rev().fold(Fe::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn pow(&self, mut e: u32, f: &Field) -> Poly {
        let mut r = Poly::one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b, f);
            }
            b = b.mul(&b, f);
            e >>= 1;
        }
        r
    }

    /// Lexicographic comparison key (low degree first, each coefficient by lex key).
    pub fn lex_key(&self, f: &Field) -> Vec<u32> {
        self.coeffs.iter().map(|&c| f.lex_key(c)).collect()
    }

    /// Comma-separated coefficients, low degree first; "0" for zero.
    pub fn format(&self, f: &Field) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.coeffs.iter().map(|&c| f.format(c)).collect::<Vec<_>>().join(",")
    }

    pub fn parse(s: &str, f: &Field) -> Result<Poly> {
        let s = s.trim();
        if s.is_empty() {
            return param("empty polynomial");
        }
        let coeffs = s.split(',').map(|c| f.parse(c)).collect::<Result<Vec<_>>>()?;
        Ok(Poly::from_coeffs(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Irreducibility by trial division with every monic polynomial of degree
    /// at most half (independent of the Ben-Or test above).
    fn irreducible_by_scan(f: &[u32], p: u32) -> bool {
        let n = f.len() - 1;
        for deg in 1..=n / 2 {
            for code in 0..p.pow(deg as u32) {
                let mut g = lex_digits(code, p, deg as u32);
                g.push(1);
                if mp_rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn build_field_examples() {
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.modulus(), &[0, 1]);
        let f9 = Field::new(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        assert!(matches!(Field::new(2, 1), Err(Error::Parameter(_))));
        assert!(Field::new(9, 1).is_err());
        assert!(Field::new(3, 0).is_err());
    }

    #[test]
    fn smallest_modulus_matches_exhaustive_scan() {
        for (p, k) in [(3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2)] {
            let field = Field::new(p, k).unwrap();
            let first = (0..p.pow(k))
                .map(|n| {
                    let mut c = lex_digits(n, p, k);
                    c.push(1);
                    c
                })
                .find(|c| irreducible_by_scan(c, p))
                .unwrap();
            assert_eq!(field.modulus(), &first[..], "p={p} k={k}");
        }
    }

    #[test]
    fn frobenius_examples() {
        let f3 = Field::new(3, 1).unwrap();
        for x in f3.elements() {
            assert_eq!(f3.frobenius(x), x);
        }
        let f9 = Field::new(3, 2).unwrap();
        let g = f9.generator();
        assert_eq!(f9.frobenius(g), f9.pow(g, 3));
        assert_eq!(f9.frobenius(f9.frobenius(g)), g);
        assert_eq!(f9.frobenius(Fe::ZERO), Fe::ZERO);
    }

    #[test]
    fn element_order_examples() {
        let f9 = Field::new(3, 2).unwrap();
        assert_eq!(f9.element_order(Fe::ONE).unwrap(), 1);
        assert_eq!(f9.element_order(f9.from_int(-1)).unwrap(), 2);
        let brute = |x: Fe| (1..).find(|&n| f9.pow(x, n) == Fe::ONE).unwrap();
        let g = f9.generator();
        assert_eq!(brute(g), 8);
        assert_eq!(f9.element_order(g).unwrap(), 8);
        for x in f9.elements().skip(1) {
            assert_eq!(f9.element_order(x).unwrap(), brute(x));
        }
        assert!(f9.element_order(Fe::ZERO).is_err());
    }

    #[test]
    fn minimal_polynomial_examples() {
        let f81 = Field::new(3, 4).unwrap();
        assert_eq!(f81.minimal_polynomial(Fe::ONE, 1).unwrap(), Poly::from_ints(&[-1, 1], &f81));
        let g = f81.generator();
        let m = f81.minimal_polynomial(g, 1).unwrap();
        assert_eq!(m.degree(), Some(4));
        assert!(m.eval(g, &f81).is_zero());
        let f9 = Field::new(3, 2).unwrap();
        for x in f9.elements() {
            let m = f9.minimal_polynomial(x, 1).unwrap();
            assert!(m.eval(x, &f9).is_zero());
            assert!(m.coeffs().iter().all(|&c| c.0 < 3));
            let in_base = x.0 < 3;
            assert_eq!(m.degree(), Some(if in_base { 1 } else { 2 }));
            if !in_base {
                // compare against the scan over all 9 monic quadratics
                let hits: Vec<_> = (0..9)
                    .map(|n| Poly::from_ints(&[(n / 3) as i64, (n % 3) as i64, 1], &f9))
                    .filter(|q| q.eval(x, &f9).is_zero())
                    .collect();
                assert_eq!(hits, vec![m]);
            }
        }
    }

    #[test]
    fn normal_elements() {
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.find_normal_element(1, 1).unwrap(), Fe::ONE);
        for k in [2, 3] {
            let f = Field::new(3, k).unwrap();
            let xi = f.find_normal_element(1, k).unwrap();
            // rank of the coefficient vectors over F_3
            let mut m: Vec<Vec<Fe>> = (0..k)
                .map(|j| f.digits(f.frobenius_pow(xi, j)).into_iter().map(Fe).collect())
                .collect();
            let f3 = Field::new(3, 1).unwrap();
            assert!(!determinant(&mut m, &f3).is_zero());
            // smallest: every lex-smaller element fails the same test
            for x in (1..f.lex_key(xi)).map(|n| f.from_lex_key(n)) {
                let mut m: Vec<Vec<Fe>> = (0..k)
                    .map(|j| f.digits(f.frobenius_pow(x, j)).into_iter().map(Fe).collect())
                    .collect();
                assert!(determinant(&mut m, &f3).is_zero());
            }
        }
    }

    #[test]
    fn subfields() {
        let f = Field::new(3, 4).unwrap();
        let sub = f.subfield_elements(2).unwrap();
        assert_eq!(sub.len(), 9);
        assert!(sub.iter().all(|&x| f.in_subfield(x, 2)));
        assert_eq!(f.subfield_elements(1).unwrap(), vec![Fe(0), Fe(1), Fe(2)]);
        assert!(f.subfield_elements(3).is_err());
    }

    #[test]
    fn poly_text_round_trip() {
        let f3 = Field::new(3, 1).unwrap();
        let p = Poly::parse("1,0,1", &f3).unwrap();
        assert_eq!(p, Poly::from_ints(&[1, 0, 1], &f3));
        assert_eq!(p.format(&f3), "1,0,1");
        let f9 = Field::new(3, 2).unwrap();
        let q = Poly::from_coeffs(vec![f9.generator(), Fe::ZERO, Fe::ONE]);
        assert_eq!(Poly::parse(&q.format(&f9), &f9).unwrap(), q);
        assert_eq!(Poly::zero().format(&f9), "0");
    }

    #[test]
    fn poly_division_and_gcd() {
        let f = Field::new(5, 1).unwrap();
        let a = Poly::from_ints(&[1, 1], &f).mul(&Poly::from_ints(&[2, 0, 1], &f), &f);
        let b = Poly::from_ints(&[1, 1], &f).mul(&Poly::from_ints(&[3, 1], &f), &f);
        assert_eq!(Poly::gcd(&a, &b, &f), Poly::from_ints(&[1, 1], &f));
        let (q, r) = a.divrem(&b, &f);
        assert_eq!(q.mul(&b, &f).add(&r, &f), a);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use std::sync::OnceLock;

        fn f81() -> &'static Field {
            static F: OnceLock<Field> = OnceLock::new();
            F.get_or_init(|| Field::new(3, 4).unwrap())
        }

        fn f125() -> &'static Field {
            static F: OnceLock<Field> = OnceLock::new();
            F.get_or_init(|| Field::new(5, 3).unwrap())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]
            #[test]
            fn field_axioms(a in 0u32..81, b in 0u32..81, c in 0u32..81) {
                let f = f81();
                let (a, b, c) = (Fe(a), Fe(b), Fe(c));
                prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                prop_assert_eq!(f.sub(f.add(a, b), b), a);
                if !a.is_zero() {
                    prop_assert_eq!(f.mul(a, f.inv(a)), Fe::ONE);
                    let ord = f.element_order(a).unwrap();
                    prop_assert_eq!(80 % ord, 0);
                }
                prop_assert_eq!(f.pow(a, 81), a);
            }

            #[test]
            fn field_axioms_125(a in 0u32..125, b in 0u32..125) {
                let f = f125();
                let (a, b) = (Fe(a), Fe(b));
                prop_assert_eq!(f.mul(a, b), f.mul(b, a));
                prop_assert_eq!(f.pow(a, 125), a);
                if !b.is_zero() {
                    prop_assert_eq!(f.mul(f.div(a, b), b), a);
                }
            }

            #[test]
            fn minimal_polynomial_vanishes(a in 0u32..81) {
                let f = f81();
                let m = f.minimal_polynomial(Fe(a), 1).unwrap();
                prop_assert!(m.eval(Fe(a), f).is_zero());
                let digits: Vec<u32> = m.coeffs().iter().map(|c| c.0).collect();
                prop_assert!(digits.iter().all(|&c| c < 3));
                prop_assert!(irreducible_by_scan(&digits, 3));
                prop_assert_eq!(4 % m.degree().unwrap(), 0);
            }
        }
    }
}
