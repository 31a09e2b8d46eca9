//! Arithmetic in GF(p) for primes below 2^16 and GF(2^m) for m ≤ 16, plus the
//! length-2 kernel vectors used as global encoding kernels.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// Irreducible reduction polynomials for GF(2^m), indexed by `m`, bit `i` is
/// the coefficient of `x^i`.
const REDUCTION_POLYNOMIALS: [u32; 17] = [
    0, 0b11, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11d, 0x211, 0x409, 0x805, 0x1053, 0x201b, 0x4443, 0x8003, 0x1100b,
];

/// A field element, represented by an integer in `[0, q)`.
///
/// For GF(2^m) the bits are polynomial coefficients over GF(2).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub u32);

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Repr {
    Prime,
    Binary { degree: u32, poly: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Field {
    order: u32,
    repr: Repr,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn is_supported_order(q: u64) -> bool {
    q >= 2 && q <= MAX_ORDER as u64 && (is_prime(q) || q.is_power_of_two())
}

/// Smallest supported order that is at least `min`.
pub fn smallest_supported_order(min: u64) -> Option<u32> {
    (min.max(2)..=MAX_ORDER as u64)
        .find(|&q| is_supported_order(q))
        .map(|q| q as u32)
}

impl Field {
    pub fn new(q: u64) -> Result<Field> {
        if !is_supported_order(q) {
            return Err(Error::UnsupportedOrder(q));
        }
        let repr = if is_prime(q) {
            Repr::Prime
        } else {
            let degree = q.trailing_zeros();
            Repr::Binary {
                degree,
                poly: REDUCTION_POLYNOMIALS[degree as usize],
            }
        };
        Ok(Field { order: q as u32, repr })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn characteristic(&self) -> u32 {
        match self.repr {
            Repr::Prime => self.order,
            Repr::Binary { .. } => 2,
        }
    }

    /// Reduction polynomial of an extension field, `None` for prime fields.
    pub fn reduction_polynomial(&self) -> Option<u32> {
        match self.repr {
            Repr::Prime => None,
            Repr::Binary { poly, .. } => Some(poly),
        }
    }

    pub fn zero(&self) -> Elem {
        Elem(0)
    }

    pub fn one(&self) -> Elem {
        Elem(1)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order).map(Elem)
    }

    /// Nonzero elements in the order `c_1 = 1, c_2, ..., c_{q-1}`.
    pub fn nonzero(&self) -> impl Iterator<Item = Elem> {
        (1..self.order).map(Elem)
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.0 < self.order
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match self.repr {
            Repr::Prime => Elem(((a.0 as u64 + b.0 as u64) % self.order as u64) as u32),
            Repr::Binary { .. } => Elem(a.0 ^ b.0),
        }
    }

    pub fn neg(&self, a: Elem) -> Elem {
        match self.repr {
            Repr::Prime if a.0 != 0 => Elem(self.order - a.0),
            _ => a,
        }
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match self.repr {
            Repr::Prime => Elem(((a.0 as u64 * b.0 as u64) % self.order as u64) as u32),
            Repr::Binary { degree, poly } => {
                let mut product: u64 = 0;
                let (x, mut y) = (a.0 as u64, b.0 as u64);
                let mut shift = 0;
                while y != 0 {
                    if y & 1 == 1 {
                        product ^= x << shift;
                    }
                    y >>= 1;
                    shift += 1;
                }
                for bit in (degree..2 * degree).rev() {
                    if product >> bit & 1 == 1 {
                        product ^= (poly as u64) << (bit - degree);
                    }
                }
                Elem(product as u32)
            }
        }
    }

    pub fn pow(&self, a: Elem, mut exp: u64) -> Elem {
        let mut base = a;
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.0 == 0 {
            None
        } else {
            Some(self.pow(a, self.order as u64 - 2))
        }
    }

    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    pub fn scale(&self, c: Elem, k: Kernel) -> Kernel {
        Kernel::new(self.mul(c, k.c1), self.mul(c, k.c2))
    }

    pub fn add_kernels(&self, a: Kernel, b: Kernel) -> Kernel {
        Kernel::new(self.add(a.c1, b.c1), self.add(a.c2, b.c2))
    }

    /// Determinant of the 2x2 matrix with rows `a` and `b`.
    pub fn det(&self, a: Kernel, b: Kernel) -> Elem {
        self.sub(self.mul(a.c1, b.c2), self.mul(a.c2, b.c1))
    }

    pub fn independent(&self, a: Kernel, b: Kernel) -> bool {
        self.det(a, b) != Elem(0)
    }

    /// `sum coefficients[i] * generators[i]`.
    pub fn combine(&self, coefficients: &[Elem], generators: &[Kernel]) -> Kernel {
        coefficients
            .iter()
            .zip(generators)
            .fold(Kernel::ZERO, |acc, (&c, &g)| self.add_kernels(acc, self.scale(c, g)))
    }

    /// Evaluates the linear function `c1*x1 + c2*x2`.
    pub fn evaluate(&self, k: Kernel, x1: Elem, x2: Elem) -> Elem {
        self.add(self.mul(k.c1, x1), self.mul(k.c2, x2))
    }

    /// The representative of `k`'s projective point: first nonzero coordinate
    /// scaled to one. Zero maps to zero.
    pub fn normalize(&self, k: Kernel) -> Kernel {
        let lead = if k.c1.0 != 0 { k.c1 } else { k.c2 };
        match self.inv(lead) {
            Some(i) => self.scale(i, k),
            None => k,
        }
    }
}

/// A global encoding kernel `(c1, c2)`, the function `c1*X1 + c2*X2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Kernel {
    pub c1: Elem,
    pub c2: Elem,
}

impl Kernel {
    pub const ZERO: Kernel = Kernel {
        c1: Elem(0),
        c2: Elem(0),
    };
    /// `α1 = (1, 0)`, the message X1.
    pub const ALPHA1: Kernel = Kernel {
        c1: Elem(1),
        c2: Elem(0),
    };
    /// `α2 = (0, 1)`, the message X2.
    pub const ALPHA2: Kernel = Kernel {
        c1: Elem(0),
        c2: Elem(1),
    };

    pub fn new(c1: Elem, c2: Elem) -> Self {
        Kernel { c1, c2 }
    }

    pub fn from_ints(c1: u32, c2: u32) -> Self {
        Kernel::new(Elem(c1), Elem(c2))
    }

    pub fn alpha(session: crate::network::Session) -> Kernel {
        match session {
            crate::network::Session::X1 => Kernel::ALPHA1,
            crate::network::Session::X2 => Kernel::ALPHA2,
        }
    }

    /// `β = (1, c)`.
    pub fn beta(c: Elem) -> Self {
        Kernel::new(Elem(1), c)
    }

    pub fn is_zero(&self) -> bool {
        *self == Kernel::ZERO
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.c1, self.c2)
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedInput(format!("kernel {s:?} is not of the form (a,b)"));
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let a = a.trim().parse::<u32>().map_err(|_| bad())?;
        let b = b.trim().parse::<u32>().map_err(|_| bad())?;
        Ok(Kernel::from_ints(a, b))
    }
}

/// The `q + 1` pairwise independent kernels `(0,1)` and `(1,c)` for all `c`.
pub fn projective_points(field: &Field) -> Vec<Kernel> {
    std::iter::once(Kernel::ALPHA2)
        .chain(field.elements().map(Kernel::beta))
        .collect()
}

/// Expresses `target` as a combination of `generators`.
///
/// Tries scaling a single generator first, then the first independent pair.
/// The returned vector has one coefficient per generator.
pub fn in_span(field: &Field, target: Kernel, generators: &[Kernel]) -> Option<Vec<Elem>> {
    let mut coefficients = vec![Elem(0); generators.len()];
    if target.is_zero() {
        return Some(coefficients);
    }
    for (i, &g) in generators.iter().enumerate() {
        if g.is_zero() || field.independent(g, target) {
            continue;
        }
        let c = if g.c1.0 != 0 {
            field.div(target.c1, g.c1)
        } else {
            field.div(target.c2, g.c2)
        }?;
        coefficients[i] = c;
        return Some(coefficients);
    }
    for i in 0..generators.len() {
        for j in i + 1..generators.len() {
            let (a, b) = (generators[i], generators[j]);
            let det = field.det(a, b);
            let Some(inv) = field.inv(det) else { continue };
            // target = x*a + y*b, Cramer's rule
            let x = field.mul(field.det(target, b), inv);
            let y = field.mul(field.det(a, target), inv);
            coefficients[i] = x;
            coefficients[j] = y;
            return Some(coefficients);
        }
    }
    None
}

/// `max{2, floor(sqrt(2N - 7/4) + 1/2)}`, computed in exact integer arithmetic
/// as `floor((isqrt(8N - 7) + 1) / 2)`.
pub fn field_size_bound(sinks: usize) -> Result<u32> {
    if sinks < 2 {
        return Err(Error::InvalidN(sinks));
    }
    let y = 8 * sinks as u64 - 7;
    let s = isqrt(y);
    Ok((s.div_ceil(2) as u32).max(2))
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL_ORDERS: [u64; 9] = [2, 3, 4, 5, 7, 8, 11, 13, 16];

    #[test]
    fn make_field_examples() {
        let f2 = Field::new(2).unwrap();
        assert_eq!(f2.add(Elem(1), Elem(1)), Elem(0));
        let f5 = Field::new(5).unwrap();
        assert_eq!(f5.mul(Elem(3), Elem(4)), Elem(2));
        assert_eq!(Field::new(6), Err(Error::UnsupportedOrder(6)));
        assert_eq!(Field::new(9), Err(Error::UnsupportedOrder(9)));
        assert_eq!(Field::new(1 << 17), Err(Error::UnsupportedOrder(1 << 17)));
        assert!(Field::new(65521).is_ok());
        assert!(Field::new(65536).is_ok());
    }

    #[test]
    fn field_axioms_hold_exhaustively() {
        for q in SMALL_ORDERS {
            let f = Field::new(q).unwrap();
            let all: Vec<Elem> = f.elements().collect();
            for &a in &all {
                assert_eq!(f.add(a, f.zero()), a);
                assert_eq!(f.mul(a, f.one()), a);
                assert_eq!(f.add(a, f.neg(a)), f.zero());
                if a != f.zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one(), "q={q} a={a}");
                }
                for &b in &all {
                    assert!(f.contains(f.add(a, b)) && f.contains(f.mul(a, b)));
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &all {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    fn poly_mod(mut a: u64, m: u64) -> u64 {
        let dm = 63 - m.leading_zeros();
        while a != 0 && 63 - a.leading_zeros() >= dm {
            a ^= m << (63 - a.leading_zeros() - dm);
        }
        a
    }

    #[test]
    fn reduction_polynomials_are_irreducible() {
        for m in 2..=16u32 {
            let p = REDUCTION_POLYNOMIALS[m as usize] as u64;
            assert_eq!(63 - p.leading_zeros(), m);
            // no factor of degree 1..=m/2
            for d in 2u64..(1 << (m / 2 + 1)) {
                assert_ne!(poly_mod(p, d), 0, "m={m} divisible by {d:#b}");
            }
        }
    }

    #[test]
    fn large_binary_field_inverses() {
        let f = Field::new(1 << 16).unwrap();
        for a in [1u32, 2, 3, 0x1234, 0xffff] {
            assert_eq!(f.mul(Elem(a), f.inv(Elem(a)).unwrap()), f.one());
        }
    }

    #[test]
    fn projective_points_are_maximal() {
        let f2 = Field::new(2).unwrap();
        assert_eq!(
            projective_points(&f2),
            vec![
                Kernel::from_ints(0, 1),
                Kernel::from_ints(1, 0),
                Kernel::from_ints(1, 1)
            ]
        );
        for q in SMALL_ORDERS {
            let f = Field::new(q).unwrap();
            let pts = projective_points(&f);
            assert_eq!(pts.len() as u64, q + 1);
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    assert!(f.independent(pts[i], pts[j]));
                }
            }
            // any further vector is dependent on some point
            for a in f.elements() {
                for b in f.elements() {
                    let v = Kernel::new(a, b);
                    assert!(pts.iter().any(|&p| !f.independent(p, v)), "q={q} v={v}");
                }
            }
        }
    }

    #[test]
    fn in_span_examples() {
        let f2 = Field::new(2).unwrap();
        let got = in_span(&f2, Kernel::ALPHA1, &[Kernel::ALPHA2, Kernel::from_ints(1, 1)]);
        assert_eq!(got, Some(vec![Elem(1), Elem(1)]));
        let one_one = Kernel::from_ints(1, 1);
        assert_eq!(in_span(&f2, one_one, &[one_one]), Some(vec![Elem(1)]));
        assert_eq!(in_span(&f2, Kernel::ALPHA1, &[Kernel::ALPHA2]), None);
    }

    #[test]
    fn field_size_bound_values() {
        assert_eq!(field_size_bound(2), Ok(2));
        assert_eq!(field_size_bound(3), Ok(2));
        assert_eq!(field_size_bound(11), Ok(5));
        assert_eq!(field_size_bound(1), Err(Error::InvalidN(1)));
        // floating-point evaluation of the closed form as an oracle
        let mut previous = 0;
        for n in 2..5000usize {
            let float = ((2.0 * n as f64 - 1.75).sqrt() + 0.5).floor() as u32;
            let b = field_size_bound(n).unwrap();
            assert_eq!(b, float.max(2), "N={n}");
            assert!(b >= previous);
            previous = b;
        }
    }

    #[test]
    fn kernel_text_round_trip() {
        let k: Kernel = "(3, 4)".parse().unwrap();
        assert_eq!(k, Kernel::from_ints(3, 4));
        assert_eq!(k.to_string(), "(3,4)");
        assert!("3,4".parse::<Kernel>().is_err());
    }

    #[test]
    fn supported_orders() {
        assert_eq!(smallest_supported_order(9), Some(11));
        assert_eq!(smallest_supported_order(5), Some(5));
        assert_eq!(smallest_supported_order(0), Some(2));
        assert_eq!(smallest_supported_order(1 << 17), None);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn in_span_recombines(q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 16, 251, 256]),
                                  raw in prop::collection::vec((0u32..300, 0u32..300), 1..5),
                                  t in (0u32..300, 0u32..300)) {
                let f = Field::new(q).unwrap();
                let m = f.order();
                let gens: Vec<Kernel> = raw.iter().map(|&(a, b)| Kernel::from_ints(a % m, b % m)).collect();
                let target = Kernel::from_ints(t.0 % m, t.1 % m);
                if let Some(c) = in_span(&f, target, &gens) {
                    prop_assert_eq!(f.combine(&c, &gens), target);
                } else {
                    // outside the span: every generator is parallel to a line missing target
                    for i in 0..gens.len() {
                        for j in i + 1..gens.len() {
                            prop_assert!(!f.independent(gens[i], gens[j]));
                        }
                    }
                }
            }
        }
    }
}
