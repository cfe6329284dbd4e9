// Exact rationals, small vectors and the signed-permutation rotation group.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `p/q` or a plain decimal (`-1.25`, `3e-2`) exactly.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = parse_int(p)?;
        let q: BigInt = parse_int(q)?;
        if q.is_zero() {
            return None;
        }
        return Some(Rat::new(p, q));
    }
    parse_decimal(s)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let t = s.strip_prefix('+').unwrap_or(s);
    let digits = t.strip_prefix('-').unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    t.parse().ok()
}

fn parse_decimal(s: &str) -> Option<Rat> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mant.as_bytes().first()? {
        b'-' => (true, &mant[1..]),
        b'+' => (false, &mant[1..]),
        _ => (false, mant),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.bytes().chain(fp.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{ip}{fp}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut r = Rat::from_integer(n);
    if scale >= 0 {
        r *= Rat::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= Rat::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Decimal text for a rational: exact when the expansion terminates,
/// otherwise rounded to 12 significant digits.
pub fn decimal(r: &Rat) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut d = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut k2 = 0usize;
    let mut k5 = 0usize;
    while d.is_multiple_of(&two) {
        d /= &two;
        k2 += 1;
    }
    while d.is_multiple_of(&five) {
        d /= &five;
        k5 += 1;
    }
    if d.is_one() {
        let k = k2.max(k5);
        let scaled = r * Rat::from_integer(num_traits::pow(BigInt::from(10), k));
        return place_point(&scaled.to_integer(), k);
    }
    // 12 significant digits
    let neg = r.is_negative();
    let a = r.abs();
    let mut e: i64 = 0;
    let ten = rat(10);
    let mut m = a.clone();
    while m >= ten {
        m /= &ten;
        e += 1;
    }
    while m < Rat::one() {
        m *= &ten;
        e -= 1;
    }
    let k = 11 - e;
    let scaled = if k >= 0 {
        &a * Rat::from_integer(num_traits::pow(BigInt::from(10), k as usize))
    } else {
        &a / Rat::from_integer(num_traits::pow(BigInt::from(10), (-k) as usize))
    };
    let n = scaled.round().to_integer();
    let s = if k >= 0 {
        place_point(&n, k as usize)
    } else {
        (n * num_traits::pow(BigInt::from(10), (-k) as usize)).to_string()
    };
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if neg {
        format!("-{s}")
    } else {
        s
    }
}

fn place_point(n: &BigInt, k: usize) -> String {
    if k == 0 {
        return n.to_string();
    }
    let neg = n.is_negative();
    let mut digits = n.abs().to_string();
    if digits.len() <= k {
        digits = "0".repeat(k + 1 - digits.len()) + &digits;
    }
    let (i, f) = digits.split_at(digits.len() - k);
    let f = f.trim_end_matches('0');
    let body = if f.is_empty() { i.to_string() } else { format!("{i}.{f}") };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec2(pub [Rat; 2]);

impl Vec2 {
    pub fn new(x: Rat, y: Rat) -> Self {
        Vec2([x, y])
    }
    pub fn ints(x: i64, y: i64) -> Self {
        Vec2([rat(x), rat(y)])
    }
    pub fn x(&self) -> &Rat {
        &self.0[0]
    }
    pub fn y(&self) -> &Rat {
        &self.0[1]
    }
    pub fn sub(&self, o: &Vec2) -> Vec2 {
        Vec2([&self.0[0] - &o.0[0], &self.0[1] - &o.0[1]])
    }
    pub fn dot(&self, o: &Vec2) -> Rat {
        &self.0[0] * &o.0[0] + &self.0[1] * &o.0[1]
    }
    pub fn cross(&self, o: &Vec2) -> Rat {
        &self.0[0] * &o.0[1] - &self.0[1] * &o.0[0]
    }
    pub fn norm2(&self) -> Rat {
        &self.0[0] * &self.0[0] + &self.0[1] * &self.0[1]
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0[0], self.0[1])
    }
}

/// Twice the signed area of a polygon.
pub fn area2(pts: &[&Vec2]) -> Rat {
    let n = pts.len();
    let mut s = Rat::zero();
    for i in 0..n {
        s += pts[i].cross(pts[(i + 1) % n]);
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec3(pub [Rat; 3]);

impl Vec3 {
    pub fn new(x: Rat, y: Rat, z: Rat) -> Self {
        Vec3([x, y, z])
    }
    pub fn ints(x: i64, y: i64, z: i64) -> Self {
        Vec3([rat(x), rat(y), rat(z)])
    }
    pub fn zero() -> Self {
        Vec3::ints(0, 0, 0)
    }
    pub fn unit(d: Dir) -> Self {
        let mut v = Vec3::zero();
        v.0[d.axis] = rat(d.sign as i64);
        v
    }
    pub fn dot(&self, o: &Vec3) -> Rat {
        (0..3).map(|i| &self.0[i] * &o.0[i]).fold(Rat::zero(), |a, b| a + b)
    }
    pub fn cross(&self, o: &Vec3) -> Vec3 {
        let a = &self.0;
        let b = &o.0;
        Vec3([&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0]])
    }
    pub fn scale(&self, k: &Rat) -> Vec3 {
        Vec3([&self.0[0] * k, &self.0[1] * k, &self.0[2] * k])
    }
    pub fn norm2(&self) -> Rat {
        self.dot(self)
    }
    /// Drops coordinate `k`, keeping the other two in cyclic order, so that
    /// a positive `k` normal projects counterclockwise.
    pub fn project(&self, k: usize) -> Vec2 {
        Vec2::new(self.0[(k + 1) % 3].clone(), self.0[(k + 2) % 3].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
    /// The signed axis direction of a nonzero axis-parallel vector.
    pub fn dir(&self) -> Option<Dir> {
        let nz: Vec<usize> = (0..3).filter(|&i| !self.0[i].is_zero()).collect();
        if nz.len() != 1 {
            return None;
        }
        let axis = nz[0];
        Some(Dir { axis, sign: if self.0[axis].is_positive() { 1 } else { -1 } })
    }
}

/// Serialized as three exact rationals in `p/q` form.
impl serde::Serialize for Vec3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeTuple;
        let mut t = s.serialize_tuple(3)?;
        for c in &self.0 {
            t.serialize_element(&c.to_string())?;
        }
        t.end()
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl Add for &Vec3 {
    type Output = Vec3;
    fn add(self, o: &Vec3) -> Vec3 {
        Vec3([&self.0[0] + &o.0[0], &self.0[1] + &o.0[1], &self.0[2] + &o.0[2]])
    }
}

impl Sub for &Vec3 {
    type Output = Vec3;
    fn sub(self, o: &Vec3) -> Vec3 {
        Vec3([&self.0[0] - &o.0[0], &self.0[1] - &o.0[1], &self.0[2] - &o.0[2]])
    }
}

impl Neg for &Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3([-&self.0[0], -&self.0[1], -&self.0[2]])
    }
}

/// A signed coordinate axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dir {
    pub axis: usize,
    pub sign: i8,
}

impl std::ops::Neg for Dir {
    type Output = Dir;
    fn neg(self) -> Dir {
        Dir { axis: self.axis, sign: -self.sign }
    }
}

impl Dir {
    pub fn new(axis: usize, sign: i8) -> Self {
        Dir { axis, sign }
    }
    pub fn cross(self, o: Dir) -> Option<Dir> {
        Vec3::unit(self).cross(&Vec3::unit(o)).dir()
    }
    pub fn all() -> [Dir; 6] {
        [Dir::new(0, 1), Dir::new(0, -1), Dir::new(1, 1), Dir::new(1, -1), Dir::new(2, 1), Dir::new(2, -1)]
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.sign > 0 { '+' } else { '-' }, ['x', 'y', 'z'][self.axis])
    }
}

/// Signed permutation matrix: `(R v)[i] = sign[i] * v[perm[i]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rotation {
    perm: [usize; 3],
    sign: [i8; 3],
}

impl Rotation {
    pub fn identity() -> Self {
        Rotation { perm: [0, 1, 2], sign: [1, 1, 1] }
    }

    /// The cyclic coordinate map (x,y,z) -> (y,z,x).
    pub fn sigma() -> Self {
        Rotation { perm: [1, 2, 0], sign: [1, 1, 1] }
    }

    pub fn new(perm: [usize; 3], sign: [i8; 3]) -> Option<Self> {
        let r = Rotation { perm, sign };
        let mut seen = [false; 3];
        for &p in &perm {
            if p > 2 || seen[p] {
                return None;
            }
            seen[p] = true;
        }
        (sign.iter().all(|s| *s == 1 || *s == -1) && r.det() == 1).then_some(r)
    }

    pub fn det(&self) -> i8 {
        let p = &self.perm;
        let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let parity = if inversions % 2 == 0 { 1 } else { -1 };
        parity * self.sign.iter().product::<i8>()
    }

    /// The 24 orientation-preserving signed permutations, in a fixed order.
    pub fn all() -> Vec<Rotation> {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = Vec::with_capacity(24);
        for perm in perms {
            for bits in 0..8 {
                let sign = [0, 1, 2].map(|i| if bits >> i & 1 == 1 { -1 } else { 1 });
                if let Some(r) = Rotation::new(perm, sign) {
                    out.push(r);
                }
            }
        }
        out
    }

    /// The rotation sending each `from[i]` to `to[i]`, if one exists.
    pub fn mapping(from: [Dir; 3], to: [Dir; 3]) -> Option<Self> {
        let mut perm = [usize::MAX; 3];
        let mut sign = [0i8; 3];
        for (f, t) in from.iter().zip(to.iter()) {
            // R e_{f.axis} * f.sign = e_{t.axis} * t.sign
            if perm[t.axis] != usize::MAX {
                return None;
            }
            perm[t.axis] = f.axis;
            sign[t.axis] = f.sign * t.sign;
        }
        Rotation::new(perm, sign)
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        Vec3([0, 1, 2].map(|i| {
            let c = &v.0[self.perm[i]];
            if self.sign[i] < 0 {
                -c
            } else {
                c.clone()
            }
        }))
    }

    pub fn apply_dir(&self, d: Dir) -> Dir {
        let i = (0..3).find(|&i| self.perm[i] == d.axis).unwrap();
        Dir { axis: i, sign: self.sign[i] * d.sign }
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Rotation) -> Rotation {
        let perm = [0, 1, 2].map(|i| other.perm[self.perm[i]]);
        let sign = [0, 1, 2].map(|i| self.sign[i] * other.sign[self.perm[i]]);
        Rotation { perm, sign }
    }

    pub fn inverse(&self) -> Rotation {
        let mut perm = [0; 3];
        let mut sign = [1; 3];
        for i in 0..3 {
            perm[self.perm[i]] = i;
            sign[self.perm[i]] = self.sign[i];
        }
        Rotation { perm, sign }
    }

    pub fn matrix(&self) -> [[i8; 3]; 3] {
        let mut m = [[0; 3]; 3];
        for i in 0..3 {
            m[i][self.perm[i]] = self.sign[i];
        }
        m
    }
}

impl Mul for Rotation {
    type Output = Rotation;
    fn mul(self, o: Rotation) -> Rotation {
        self.compose(&o)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RigidMotion {
    pub rotation: Rotation,
    pub translation: Vec3,
}

impl RigidMotion {
    pub fn identity() -> Self {
        RigidMotion { rotation: Rotation::identity(), translation: Vec3::zero() }
    }
    pub fn translation(t: Vec3) -> Self {
        RigidMotion { rotation: Rotation::identity(), translation: t }
    }
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        &self.rotation.apply(v) + &self.translation
    }
    /// `self ∘ other`
    pub fn compose(&self, other: &RigidMotion) -> RigidMotion {
        RigidMotion { rotation: self.rotation.compose(&other.rotation), translation: self.apply(&other.translation) }
    }
    pub fn inverse(&self) -> RigidMotion {
        let inv = self.rotation.inverse();
        RigidMotion { rotation: inv, translation: -&inv.apply(&self.translation) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_four_rotations() {
        let all = Rotation::all();
        assert_eq!(all.len(), 24);
        for r in &all {
            assert_eq!(r.det(), 1);
            assert_eq!(r.compose(&r.inverse()), Rotation::identity());
        }
    }

    #[test]
    fn sigma_cycles_axes() {
        let s = Rotation::sigma();
        assert_eq!(s.apply(&Vec3::ints(1, 2, 3)), Vec3::ints(2, 3, 1));
        assert_eq!(s * s * s, Rotation::identity());
    }

    #[test]
    fn compose_matches_application() {
        let v = Vec3::ints(1, -2, 5);
        for a in Rotation::all() {
            for b in Rotation::all() {
                assert_eq!(a.compose(&b).apply(&v), a.apply(&b.apply(&v)));
            }
        }
    }

    #[test]
    fn mapping_finds_quarter_turn() {
        let r = Rotation::mapping(
            [Dir::new(0, 1), Dir::new(1, 1), Dir::new(2, 1)],
            [Dir::new(1, 1), Dir::new(0, -1), Dir::new(2, 1)],
        )
        .unwrap();
        assert_eq!(r.apply(&Vec3::ints(1, 0, 0)), Vec3::ints(0, 1, 0));
        assert_eq!(r.apply_dir(Dir::new(1, 1)), Dir::new(0, -1));
    }

    #[test]
    fn rationals_parse_and_print() {
        assert_eq!(parse_rat("6/4"), Some(ratio(3, 2)));
        assert_eq!(parse_rat("-1.25"), Some(ratio(-5, 4)));
        assert_eq!(parse_rat("2e-1"), Some(ratio(1, 5)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("x"), None);
        assert_eq!(decimal(&ratio(-5, 4)), "-1.25");
        assert_eq!(decimal(&rat(7)), "7");
        assert_eq!(decimal(&ratio(1, 3)), "0.333333333333");
        assert_eq!(decimal(&ratio(-200, 3)), "-66.6666666667");
    }
}
