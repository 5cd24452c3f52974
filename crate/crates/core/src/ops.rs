use std::fmt::Debug;
use std::hash::Hash;

/// Group arithmetic shared by the collector and the multiplication-table oracle,
/// so identity checkers can run unchanged on either backend.
pub trait GroupOps: Sync {
    type Elem: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    fn prime(&self) -> u64;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    fn pow(&self, a: &Self::Elem, m: i64) -> Self::Elem {
        let mut base = if m < 0 { self.inv(a) } else { a.clone() };
        let mut e = m.unsigned_abs();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `a^(p^i)`.
    fn ppow(&self, a: &Self::Elem, i: u32) -> Self::Elem {
        let mut x = a.clone();
        for _ in 0..i {
            x = self.pow(&x, self.prime() as i64);
        }
        x
    }

    /// `[a,b] = a^-1 b^-1 a b`.
    fn comm(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let ba = self.mul(b, a);
        let ab = self.mul(a, b);
        self.mul(&self.inv(&ba), &ab)
    }

    /// Left-normed `[x1, ..., xk]`; a single entry is returned as is.
    fn comm_n(&self, xs: &[&Self::Elem]) -> Self::Elem {
        let mut acc = xs[0].clone();
        for x in &xs[1..] {
            acc = self.comm(&acc, x);
        }
        acc
    }

    /// `a^b = b^-1 a b`.
    fn conj(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(&self.inv(b), &self.mul(a, b))
    }

    fn order_of(&self, a: &Self::Elem) -> u64 {
        let mut x = a.clone();
        let mut o = 1;
        while !self.is_identity(&x) {
            x = self.pow(&x, self.prime() as i64);
            o *= self.prime();
        }
        o
    }
}

/// A group whose elements are numbered `0..size` by pc index.
pub trait Indexed: GroupOps {
    fn size(&self) -> u64;
    fn at(&self, index: u64) -> Self::Elem;
    /// Exponent vector over the pc generators.
    fn vector(&self, a: &Self::Elem) -> Vec<u64>;
}
