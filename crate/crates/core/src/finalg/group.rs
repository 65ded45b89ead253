//! Finite abelian groups as products of cyclic groups.

use super::AxiomError;
use num_integer::Integer;

/// A finite abelian group `Z/d_1 x ... x Z/d_k`, every `d_t >= 2`.
///
/// Elements are flat indices in `0..size`, encoding coordinate vectors in
/// mixed radix with the first factor least significant: index
/// `x_1 + d_1*(x_2 + d_2*(...))` stands for `(x_1, ..., x_k)`. The empty
/// product (`k = 0`) is the zero group, whose only element is index `0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    orders: Vec<u64>,
    size: u64,
}

impl AbelianGroup {
    /// Builds the product of the given cyclic orders.
    pub fn new(orders: Vec<u64>) -> Result<Self, AxiomError> {
        if let Some(&order) = orders.iter().find(|&&d| d < 2) {
            return Err(AxiomError::InvalidOrder { order });
        }
        let size = orders
            .iter()
            .try_fold(1u64, |p, &d| p.checked_mul(d))
            .filter(|&p| p <= (1 << 40))
            .ok_or(AxiomError::TooLarge {
                context: "abelian group",
                size: u64::MAX,
            })?;
        Ok(AbelianGroup { orders, size })
    }

    /// The zero group.
    pub fn trivial() -> Self {
        AbelianGroup {
            orders: Vec::new(),
            size: 1,
        }
    }

    /// The cyclic group of order `m`.
    pub fn zmod(m: u64) -> Result<Self, AxiomError> {
        if m < 2 {
            return Err(AxiomError::InvalidOrder { order: m });
        }
        AbelianGroup::new(vec![m])
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    /// Number of cyclic factors.
    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn is_trivial(&self) -> bool {
        self.size == 1
    }

    /// Decodes a flat index into its coordinate vector.
    pub fn coords(&self, a: usize) -> Vec<u64> {
        debug_assert!((a as u64) < self.size);
        let mut t = a as u64;
        let mut out = Vec::with_capacity(self.orders.len());
        for &d in &self.orders {
            out.push(t % d);
            t /= d;
        }
        out
    }

    /// Encodes a coordinate vector; coordinates are reduced mod the orders.
    pub fn index(&self, coords: &[u64]) -> usize {
        debug_assert_eq!(coords.len(), self.orders.len());
        let mut idx = 0u64;
        for t in (0..self.orders.len()).rev() {
            idx = idx * self.orders[t] + coords[t] % self.orders[t];
        }
        idx as usize
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (mut x, mut y) = (a as u64, b as u64);
        let mut idx = 0u64;
        let mut weight = 1u64;
        for &d in &self.orders {
            let s = (x % d + y % d) % d;
            idx += s * weight;
            weight *= d;
            x /= d;
            y /= d;
        }
        idx as usize
    }

    pub fn neg(&self, a: usize) -> usize {
        let mut x = a as u64;
        let mut idx = 0u64;
        let mut weight = 1u64;
        for &d in &self.orders {
            let c = x % d;
            idx += if c == 0 { 0 } else { d - c } * weight;
            weight *= d;
            x /= d;
        }
        idx as usize
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// Integer scalar multiple `k * a`, with `k` possibly negative.
    pub fn smul(&self, k: i64, a: usize) -> usize {
        let mut x = a as u64;
        let mut idx = 0u64;
        let mut weight = 1u64;
        for &d in &self.orders {
            let kk = k.rem_euclid(d as i64) as u64;
            idx += (x % d * kk) % d * weight;
            weight *= d;
            x /= d;
        }
        idx as usize
    }

    /// The `t`-th coordinate generator, as a flat index.
    pub fn generator(&self, t: usize) -> usize {
        let weight: u64 = self.orders[..t].iter().product();
        weight as usize
    }

    /// Additive order of an element.
    pub fn elem_order(&self, a: usize) -> u64 {
        let mut x = a as u64;
        let mut ord = 1u64;
        for &d in &self.orders {
            let c = x % d;
            ord = ord.lcm(&(d / d.gcd(&c)));
            x /= d;
        }
        ord
    }

    /// True if some element has additive order 2.
    pub fn has_two_torsion(&self) -> bool {
        self.orders.iter().any(|&d| d % 2 == 0)
    }

    /// All elements, in index order.
    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.size as usize
    }
}
