//! 2×2 matrices over an arbitrary coefficient ring.

use crate::scalar::{Arith, Ring};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn entries(&self) -> [&T; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Mat2<U> {
        Mat2 { a: f(&self.a), b: f(&self.b), c: f(&self.c), d: f(&self.d) }
    }
}

impl<T: Ring> Mat2<T> {
    pub fn zero() -> Self {
        Mat2::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn identity() -> Self {
        Mat2::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn diag(x: T, y: T) -> Self {
        Mat2::new(x, T::zero(), T::zero(), y)
    }
}

impl<T: Arith> Mat2<T> {
    pub fn trace(&self) -> T {
        self.a.add(&self.d)
    }

    pub fn det(&self) -> T {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    /// [self, other] = self·other − other·self.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.mul(s))
    }
}

impl<T: Arith> Arith for Mat2<T> {
    fn add(&self, o: &Self) -> Self {
        Mat2::new(self.a.add(&o.a), self.b.add(&o.b), self.c.add(&o.c), self.d.add(&o.d))
    }

    fn sub(&self, o: &Self) -> Self {
        Mat2::new(self.a.sub(&o.a), self.b.sub(&o.b), self.c.sub(&o.c), self.d.sub(&o.d))
    }

    fn mul(&self, o: &Self) -> Self {
        Mat2::new(
            self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            self.c.mul(&o.b).add(&self.d.mul(&o.d)),
        )
    }

    fn neg(&self) -> Self {
        self.map(|x| x.neg())
    }
}
