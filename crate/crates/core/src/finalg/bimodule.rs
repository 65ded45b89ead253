//! Finite bimodules over pairs of finite rings.

use super::group::AbelianGroup;
use super::ring::{scan_law, FiniteRing};
use super::{AxiomError, ValidationConfig, ValidationSummary};
use std::sync::Arc;

/// A finite `(R, S)`-bimodule: an abelian carrier with a left `R`-action
/// and a right `S`-action that commute and are unital and biadditive.
///
/// Actions are materialized as lookup tables over carrier indices, so
/// arithmetic never re-derives them from closures after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bimodule {
    left_ring: Arc<FiniteRing>,
    right_ring: Arc<FiniteRing>,
    carrier: AbelianGroup,
    /// `left[r * |M| + m]` = index of `r . m`.
    left: Vec<usize>,
    /// `right[m * |S| + s]` = index of `m . s`.
    right: Vec<usize>,
    validation: ValidationSummary,
}

impl Bimodule {
    pub fn left_ring(&self) -> &Arc<FiniteRing> {
        &self.left_ring
    }

    pub fn right_ring(&self) -> &Arc<FiniteRing> {
        &self.right_ring
    }

    pub fn carrier(&self) -> &AbelianGroup {
        &self.carrier
    }

    pub fn size(&self) -> u64 {
        self.carrier.size()
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.carrier.add(a, b)
    }

    pub fn neg(&self, a: usize) -> usize {
        self.carrier.neg(a)
    }

    /// Left action `r . m`.
    pub fn act_left(&self, r: usize, m: usize) -> usize {
        self.left[r * self.carrier.size() as usize + m]
    }

    /// Right action `m . s`.
    pub fn act_right(&self, m: usize, s: usize) -> usize {
        self.right[m * self.right_ring.size() as usize + s]
    }

    pub fn validation(&self) -> ValidationSummary {
        self.validation
    }

    /// Ring elements `r` with `r . m = 0` for every `m`, in index order.
    pub fn annihilator_left(&self) -> Vec<usize> {
        let msize = self.carrier.size() as usize;
        self.left_ring
            .carrier()
            .elements()
            .filter(|&r| (0..msize).all(|m| self.act_left(r, m) == 0))
            .collect()
    }

    /// Ring elements `s` with `m . s = 0` for every `m`, in index order.
    pub fn annihilator_right(&self) -> Vec<usize> {
        let msize = self.carrier.size() as usize;
        self.right_ring
            .carrier()
            .elements()
            .filter(|&s| (0..msize).all(|m| self.act_right(m, s) == 0))
            .collect()
    }

    /// True when only `0` annihilates the module from the left.
    pub fn is_faithful_left(&self) -> bool {
        self.annihilator_left() == [0]
    }

    /// True when only `0` annihilates the module from the right.
    pub fn is_faithful_right(&self) -> bool {
        self.annihilator_right() == [0]
    }

    fn validate(&self, cfg: &ValidationConfig) -> Result<ValidationSummary, AxiomError> {
        let r = self.left_ring.size();
        let s = self.right_ring.size();
        let m = self.carrier.size();
        let mut summary = ValidationSummary::default();

        summary.absorb(scan_law(&[r, r, m], cfg, |t| {
            let (a, b, x) = (t[0] as usize, t[1] as usize, t[2] as usize);
            let sum = self.left_ring.add(a, b);
            if self.act_left(sum, x) != self.add(self.act_left(a, x), self.act_left(b, x)) {
                return Some(AxiomError::law(
                    "bimodule",
                    "left action additive in the ring",
                    t.to_vec(),
                ));
            }
            if self.act_left(self.left_ring.mul(a, b), x) != self.act_left(a, self.act_left(b, x)) {
                return Some(AxiomError::law(
                    "bimodule",
                    "left action associativity",
                    t.to_vec(),
                ));
            }
            None
        })?);
        summary.absorb(scan_law(&[r, m, m], cfg, |t| {
            let (a, x, y) = (t[0] as usize, t[1] as usize, t[2] as usize);
            (self.act_left(a, self.add(x, y)) != self.add(self.act_left(a, x), self.act_left(a, y)))
                .then(|| {
                    AxiomError::law("bimodule", "left action additive in the module", t.to_vec())
                })
        })?);
        summary.absorb(scan_law(&[m, s, s], cfg, |t| {
            let (x, a, b) = (t[0] as usize, t[1] as usize, t[2] as usize);
            let sum = self.right_ring.add(a, b);
            if self.act_right(x, sum) != self.add(self.act_right(x, a), self.act_right(x, b)) {
                return Some(AxiomError::law(
                    "bimodule",
                    "right action additive in the ring",
                    t.to_vec(),
                ));
            }
            if self.act_right(x, self.right_ring.mul(a, b))
                != self.act_right(self.act_right(x, a), b)
            {
                return Some(AxiomError::law(
                    "bimodule",
                    "right action associativity",
                    t.to_vec(),
                ));
            }
            None
        })?);
        summary.absorb(scan_law(&[m, m, s], cfg, |t| {
            let (x, y, a) = (t[0] as usize, t[1] as usize, t[2] as usize);
            (self.act_right(self.add(x, y), a)
                != self.add(self.act_right(x, a), self.act_right(y, a)))
            .then(|| {
                AxiomError::law(
                    "bimodule",
                    "right action additive in the module",
                    t.to_vec(),
                )
            })
        })?);
        summary.absorb(scan_law(&[m], cfg, |t| {
            let x = t[0] as usize;
            if self.act_left(self.left_ring.one(), x) != x {
                return Some(AxiomError::law(
                    "bimodule",
                    "left action unital",
                    t.to_vec(),
                ));
            }
            if self.act_right(x, self.right_ring.one()) != x {
                return Some(AxiomError::law(
                    "bimodule",
                    "right action unital",
                    t.to_vec(),
                ));
            }
            None
        })?);
        summary.absorb(scan_law(&[r, m, s], cfg, |t| {
            let (a, x, b) = (t[0] as usize, t[1] as usize, t[2] as usize);
            (self.act_right(self.act_left(a, x), b) != self.act_left(a, self.act_right(x, b)))
                .then(|| AxiomError::law("bimodule", "action compatibility", t.to_vec()))
        })?);
        Ok(summary)
    }
}

/// Builds and validates a bimodule from action functions over carrier
/// indices. `left_action(r, m)` and `right_action(m, s)` must return
/// carrier indices; they are tabulated once and then checked.
pub fn bimodule_new(
    left_ring: Arc<FiniteRing>,
    right_ring: Arc<FiniteRing>,
    carrier: AbelianGroup,
    left_action: impl Fn(usize, usize) -> usize,
    right_action: impl Fn(usize, usize) -> usize,
) -> Result<Bimodule, AxiomError> {
    bimodule_with_config(
        left_ring,
        right_ring,
        carrier,
        left_action,
        right_action,
        &ValidationConfig::default(),
    )
}

/// As [`bimodule_new`] with an explicit validation budget.
pub fn bimodule_with_config(
    left_ring: Arc<FiniteRing>,
    right_ring: Arc<FiniteRing>,
    carrier: AbelianGroup,
    left_action: impl Fn(usize, usize) -> usize,
    right_action: impl Fn(usize, usize) -> usize,
    cfg: &ValidationConfig,
) -> Result<Bimodule, AxiomError> {
    let msize = carrier.size() as usize;
    let rsize = left_ring.size() as usize;
    let ssize = right_ring.size() as usize;
    let mut left = vec![0usize; rsize * msize];
    for r in 0..rsize {
        for m in 0..msize {
            let v = left_action(r, m);
            if v >= msize {
                return Err(AxiomError::Shape {
                    context: "bimodule left action",
                    detail: format!("value {v} for ({r}, {m}) out of range 0..{msize}"),
                });
            }
            left[r * msize + m] = v;
        }
    }
    let mut right = vec![0usize; msize * ssize];
    for m in 0..msize {
        for s in 0..ssize {
            let v = right_action(m, s);
            if v >= msize {
                return Err(AxiomError::Shape {
                    context: "bimodule right action",
                    detail: format!("value {v} for ({m}, {s}) out of range 0..{msize}"),
                });
            }
            right[m * ssize + s] = v;
        }
    }
    let module = Bimodule {
        left_ring,
        right_ring,
        carrier,
        left,
        right,
        validation: ValidationSummary::default(),
    };
    let summary = module.validate(cfg)?;
    Ok(Bimodule {
        validation: summary,
        ..module
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finalg::ring::ring_zmod;

    fn zmod_bimodule(m: u64) -> Bimodule {
        let r = Arc::new(ring_zmod(m).unwrap());
        bimodule_new(
            r.clone(),
            r.clone(),
            AbelianGroup::zmod(m).unwrap(),
            |a, x| ((a as u64 * x as u64) % m) as usize,
            |x, a| ((x as u64 * a as u64) % m) as usize,
        )
        .unwrap()
    }

    #[test]
    fn multiplication_bimodule_is_faithful() {
        let m = zmod_bimodule(3);
        assert!(m.is_faithful_left());
        assert!(m.is_faithful_right());
        assert_eq!(m.annihilator_left(), vec![0]);
    }

    #[test]
    fn z3_module_over_z6_has_annihilator() {
        // Z/6 acting on Z/3 through reduction mod 3.
        let r = Arc::new(ring_zmod(6).unwrap());
        let m = bimodule_new(
            r.clone(),
            r.clone(),
            AbelianGroup::zmod(3).unwrap(),
            |a, x| ((a as u64 % 3) * (x as u64) % 3) as usize,
            |x, a| ((x as u64) * (a as u64 % 3) % 3) as usize,
        )
        .unwrap();
        assert_eq!(m.annihilator_left(), vec![0, 3]);
        assert!(!m.is_faithful_left());
    }

    #[test]
    fn zero_module_annihilated_by_everything() {
        let r = Arc::new(ring_zmod(3).unwrap());
        let m = bimodule_new(
            r.clone(),
            r.clone(),
            AbelianGroup::trivial(),
            |_, _| 0,
            |_, _| 0,
        )
        .unwrap();
        assert_eq!(m.annihilator_left(), vec![0, 1, 2]);
        assert!(!m.is_faithful_left());
        assert!(!m.is_faithful_right());
    }

    #[test]
    fn incompatible_action_rejected() {
        // Left action that ignores the ring except for doubling by 1: not
        // additive in the ring.
        let r = Arc::new(ring_zmod(3).unwrap());
        let err = bimodule_new(
            r.clone(),
            r.clone(),
            AbelianGroup::zmod(3).unwrap(),
            |a, x| if a == 0 { 0 } else { x },
            |x, a| ((x as u64 * a as u64) % 3) as usize,
        )
        .unwrap_err();
        assert!(
            matches!(
                err,
                AxiomError::Law {
                    structure: "bimodule",
                    ..
                }
            ),
            "got {err:?}"
        );
    }
}
