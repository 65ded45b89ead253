//! Balanced biadditive pairings between bimodules.

use super::bimodule::Bimodule;
use super::ring::scan_law;
use super::{AxiomError, ValidationConfig, ValidationSummary};
use std::sync::Arc;

/// A balanced biadditive map `M x N -> P`, where `M` is an `(R, S)`-bimodule,
/// `N` an `(S, U)`-bimodule, and `P` an `(R, U)`-bimodule over matching
/// rings: the pairing satisfies `(m.s, n) = (m, s.n)` and is equivariant for
/// the outer actions.
///
/// Values are determined by the pairing on coordinate-generator pairs; the
/// biadditive extension is recomputed from those values and the supplied
/// table is required to agree with it everywhere, so a table that is not
/// biadditive is rejected rather than silently reinterpreted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedMap {
    src_left: Arc<Bimodule>,
    src_right: Arc<Bimodule>,
    target: Arc<Bimodule>,
    /// `table[x * |N| + y]` = index of the pairing of `x` and `y`.
    table: Vec<usize>,
    validation: ValidationSummary,
}

impl BalancedMap {
    pub fn src_left(&self) -> &Arc<Bimodule> {
        &self.src_left
    }

    pub fn src_right(&self) -> &Arc<Bimodule> {
        &self.src_right
    }

    pub fn target(&self) -> &Arc<Bimodule> {
        &self.target
    }

    /// Applies the pairing to carrier indices.
    pub fn apply(&self, x: usize, y: usize) -> usize {
        self.table[x * self.src_right.size() as usize + y]
    }

    pub fn validation(&self) -> ValidationSummary {
        self.validation
    }
}

/// Builds and validates a balanced map from a pairing function over carrier
/// indices of the two source modules.
pub fn balanced_map_new(
    src_left: Arc<Bimodule>,
    src_right: Arc<Bimodule>,
    target: Arc<Bimodule>,
    pairing: impl Fn(usize, usize) -> usize + Sync,
) -> Result<BalancedMap, AxiomError> {
    balanced_map_with_config(
        src_left,
        src_right,
        target,
        pairing,
        &ValidationConfig::default(),
    )
}

/// As [`balanced_map_new`] with an explicit validation budget.
pub fn balanced_map_with_config(
    src_left: Arc<Bimodule>,
    src_right: Arc<Bimodule>,
    target: Arc<Bimodule>,
    pairing: impl Fn(usize, usize) -> usize + Sync,
    cfg: &ValidationConfig,
) -> Result<BalancedMap, AxiomError> {
    let rings_match =
        |a: &Arc<super::FiniteRing>, b: &Arc<super::FiniteRing>| Arc::ptr_eq(a, b) || a == b;
    if !rings_match(src_left.right_ring(), src_right.left_ring()) {
        return Err(AxiomError::Shape {
            context: "balanced map",
            detail: "middle rings of the source modules differ".into(),
        });
    }
    if !rings_match(src_left.left_ring(), target.left_ring()) {
        return Err(AxiomError::Shape {
            context: "balanced map",
            detail: "left rings of source and target differ".into(),
        });
    }
    if !rings_match(src_right.right_ring(), target.right_ring()) {
        return Err(AxiomError::Shape {
            context: "balanced map",
            detail: "right rings of source and target differ".into(),
        });
    }

    let xsize = src_left.size() as usize;
    let ysize = src_right.size() as usize;
    let xg = src_left.carrier();
    let yg = src_right.carrier();
    let tg = target.carrier();

    // Read the pairing on coordinate-generator pairs only.
    let mut gen_vals = vec![0usize; xg.rank() * yg.rank()];
    for s in 0..xg.rank() {
        for t in 0..yg.rank() {
            let v = pairing(xg.generator(s), yg.generator(t));
            if v as u64 >= tg.size() {
                return Err(AxiomError::Shape {
                    context: "balanced map",
                    detail: format!("value {v} out of range for the target carrier"),
                });
            }
            gen_vals[s * yg.rank() + t] = v;
        }
    }

    // Biadditive extension from the generator values.
    let mut table = vec![0usize; xsize * ysize];
    for x in 0..xsize {
        let a = xg.coords(x);
        for y in 0..ysize {
            let b = yg.coords(y);
            let mut acc = 0usize;
            for (s, &av) in a.iter().enumerate() {
                for (t, &bv) in b.iter().enumerate() {
                    let scaled =
                        tg.smul(bv as i64, tg.smul(av as i64, gen_vals[s * yg.rank() + t]));
                    acc = tg.add(acc, scaled);
                }
            }
            table[x * ysize + y] = acc;
        }
    }

    let map = BalancedMap {
        src_left,
        src_right,
        target,
        table,
        validation: ValidationSummary::default(),
    };
    let summary = validate_map(&map, &pairing, cfg)?;
    Ok(BalancedMap {
        validation: summary,
        ..map
    })
}

fn validate_map(
    map: &BalancedMap,
    pairing: &(impl Fn(usize, usize) -> usize + Sync),
    cfg: &ValidationConfig,
) -> Result<ValidationSummary, AxiomError> {
    let x = map.src_left.size();
    let y = map.src_right.size();
    let mid = map.src_left.right_ring().size();
    let rl = map.src_left.left_ring().size();
    let rr = map.src_right.right_ring().size();
    let mut summary = ValidationSummary::default();

    summary.absorb(scan_law(&[x, y], cfg, |t| {
        let (a, b) = (t[0] as usize, t[1] as usize);
        (pairing(a, b) != map.apply(a, b)).then(|| {
            AxiomError::law(
                "balanced map",
                "agreement with its biadditive extension",
                t.to_vec(),
            )
        })
    })?);
    summary.absorb(scan_law(&[x, x, y], cfg, |t| {
        let (a, b, c) = (t[0] as usize, t[1] as usize, t[2] as usize);
        let lhs = map.apply(map.src_left.add(a, b), c);
        let rhs = map.target.add(map.apply(a, c), map.apply(b, c));
        (lhs != rhs).then(|| {
            AxiomError::law(
                "balanced map",
                "additivity in the first argument",
                t.to_vec(),
            )
        })
    })?);
    summary.absorb(scan_law(&[x, y, y], cfg, |t| {
        let (a, b, c) = (t[0] as usize, t[1] as usize, t[2] as usize);
        let lhs = map.apply(a, map.src_right.add(b, c));
        let rhs = map.target.add(map.apply(a, b), map.apply(a, c));
        (lhs != rhs).then(|| {
            AxiomError::law(
                "balanced map",
                "additivity in the second argument",
                t.to_vec(),
            )
        })
    })?);
    summary.absorb(scan_law(&[x, mid, y], cfg, |t| {
        let (a, r, b) = (t[0] as usize, t[1] as usize, t[2] as usize);
        let lhs = map.apply(map.src_left.act_right(a, r), b);
        let rhs = map.apply(a, map.src_right.act_left(r, b));
        (lhs != rhs)
            .then(|| AxiomError::law("balanced map", "balance over the middle ring", t.to_vec()))
    })?);
    summary.absorb(scan_law(&[rl, x, y], cfg, |t| {
        let (r, a, b) = (t[0] as usize, t[1] as usize, t[2] as usize);
        let lhs = map.apply(map.src_left.act_left(r, a), b);
        let rhs = map.target.act_left(r, map.apply(a, b));
        (lhs != rhs).then(|| AxiomError::law("balanced map", "left equivariance", t.to_vec()))
    })?);
    summary.absorb(scan_law(&[x, y, rr], cfg, |t| {
        let (a, b, s) = (t[0] as usize, t[1] as usize, t[2] as usize);
        let lhs = map.apply(a, map.src_right.act_right(b, s));
        let rhs = map.target.act_right(map.apply(a, b), s);
        (lhs != rhs).then(|| AxiomError::law("balanced map", "right equivariance", t.to_vec()))
    })?);
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finalg::bimodule::bimodule_new;
    use crate::finalg::group::AbelianGroup;
    use crate::finalg::ring::ring_zmod;

    fn mult_module(m: u64) -> Arc<Bimodule> {
        let r = Arc::new(ring_zmod(m).unwrap());
        Arc::new(
            bimodule_new(
                r.clone(),
                r.clone(),
                AbelianGroup::zmod(m).unwrap(),
                move |a, x| ((a as u64 * x as u64) % m) as usize,
                move |x, a| ((x as u64 * a as u64) % m) as usize,
            )
            .unwrap(),
        )
    }

    #[test]
    fn multiplication_pairing_is_balanced() {
        let m = mult_module(5);
        let bm = balanced_map_new(m.clone(), m.clone(), m.clone(), |x, y| {
            ((x as u64 * y as u64) % 5) as usize
        })
        .unwrap();
        assert_eq!(bm.apply(2, 3), 1);
        assert_eq!(bm.apply(0, 4), 0);
    }

    #[test]
    fn non_biadditive_table_rejected() {
        let m = mult_module(3);
        // Squaring the product breaks additivity while fixing generator
        // values to the honest ones would disagree with the given table.
        let err = balanced_map_new(m.clone(), m.clone(), m.clone(), |x, y| {
            let p = (x as u64 * y as u64) % 3;
            ((p * p) % 3) as usize
        })
        .unwrap_err();
        assert!(matches!(err, AxiomError::Law { .. }), "got {err:?}");
    }

    #[test]
    fn unbalanced_pairing_rejected() {
        // Pair through only the first argument: f(x, y) = x. Additive in x,
        // not additive in y (f(x, y + y') = x != 2x in general), and not
        // balanced.
        let m = mult_module(3);
        let err = balanced_map_new(m.clone(), m.clone(), m.clone(), |x, _| x).unwrap_err();
        assert!(matches!(err, AxiomError::Law { .. }), "got {err:?}");
    }
}
