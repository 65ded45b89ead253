//! Canonical row reduction over `Z/L` and kernels of linear systems.
//!
//! The workhorse is a Howell-style echelon form: rows are kept sorted by
//! pivot column, every pivot is a divisor of the modulus, entries above a
//! pivot are reduced modulo it, and the row set is closed under multiplying
//! rows by the cofactor of their pivot (so that the span property holds
//! column-prefix-wise). The resulting form is a canonical invariant of the
//! row span, which is what makes solver output order-independent.

use num_integer::Integer;

/// Extended gcd over the integers: returns `(g, x, y)` with `a x + b y = g`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// A unit `u` modulo `L` with `u * v = gcd(v, L) (mod L)`.
fn lifting_unit(v: u64, l: u64) -> u64 {
    let g = v.gcd(&l);
    let w = v / g;
    let lg = l / g;
    // `w` is invertible mod `l/g`; lift the inverse to a unit mod `l`.
    let (_, x, _) = ext_gcd(w as i128, lg as i128);
    let base = x.rem_euclid(lg as i128) as u64;
    let mut u = if base == 0 { lg % l } else { base };
    for _ in 0..=g {
        if u.gcd(&l) == 1 {
            return u % l;
        }
        u = (u + lg) % l;
    }
    unreachable!("no lift of an invertible residue is a unit");
}

fn scaled(row: &[u64], k: u64, l: u64) -> Vec<u64> {
    row.iter()
        .map(|&x| ((x as u128 * k as u128) % l as u128) as u64)
        .collect()
}

fn add_scaled(row: &mut [u64], other: &[u64], k: u64, l: u64) {
    let l = l as u128;
    for (x, &y) in row.iter_mut().zip(other) {
        *x = ((*x as u128 + y as u128 * k as u128) % l) as u64;
    }
}

fn sub_scaled(row: &mut [u64], other: &[u64], k: u64, l: u64) {
    let l = l as u128;
    let k = k as u128 % l;
    for (x, &y) in row.iter_mut().zip(other) {
        let sub = (y as u128 * k) % l;
        *x = ((*x as u128 + l - sub) % l) as u64;
    }
}

/// Incremental canonical Howell form over `Z/modulus`.
#[derive(Debug, Clone)]
pub struct HowellForm {
    modulus: u64,
    cols: usize,
    /// Rows sorted by strictly increasing pivot column.
    rows: Vec<Vec<u64>>,
    /// Pivot column of each row.
    pivots: Vec<usize>,
}

impl HowellForm {
    pub fn new(modulus: u64, cols: usize) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        HowellForm {
            modulus,
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Adds a row to the span, restoring the canonical invariants.
    pub fn absorb(&mut self, row: Vec<u64>) {
        assert_eq!(row.len(), self.cols, "row width mismatch");
        let l = self.modulus;
        let mut queue = vec![row.iter().map(|&x| x % l).collect::<Vec<u64>>()];
        while let Some(mut row) = queue.pop() {
            let mut at = 0usize;
            while let Some(c) = row[at..].iter().position(|&x| x != 0).map(|p| p + at) {
                at = c;
                // Rows are sorted by pivot; find one pivoting at `c`.
                match self.pivots.binary_search(&c) {
                    Ok(idx) => {
                        let v = self.rows[idx][c];
                        let e = row[c];
                        if e % v == 0 {
                            let q = e / v;
                            let pivot_row = self.rows[idx].clone();
                            sub_scaled(&mut row, &pivot_row, q, l);
                        } else {
                            // Merge: replace the pivot row by the gcd
                            // combination and keep eliminating with the
                            // complementary residual.
                            let (g, a, b) = ext_gcd(v as i128, e as i128);
                            let g = g as u64;
                            let a = a.rem_euclid(l as i128) as u64;
                            let b = b.rem_euclid(l as i128) as u64;
                            let mut merged = scaled(&self.rows[idx], a, l);
                            add_scaled(&mut merged, &scaled(&row, b, l), 1, l);
                            debug_assert_eq!(merged[c], g % l);
                            let mut residual = scaled(&row, v / g, l);
                            sub_scaled(&mut residual, &self.rows[idx], e / g, l);
                            debug_assert_eq!(residual[c], 0);
                            self.rows[idx] = merged;
                            let cof = l / g.gcd(&l);
                            if cof > 1 {
                                queue.push(scaled(&self.rows[idx], cof, l));
                            }
                            row = residual;
                        }
                    }
                    Err(insert_at) => {
                        let v = row[c];
                        let u = lifting_unit(v, l);
                        let normalized = scaled(&row, u, l);
                        debug_assert_eq!(normalized[c], v.gcd(&l));
                        let g = normalized[c];
                        self.rows.insert(insert_at, normalized);
                        self.pivots.insert(insert_at, c);
                        let cof = l / g;
                        if cof > 1 {
                            queue.push(scaled(&self.rows[insert_at], cof, l));
                        }
                        break;
                    }
                }
            }
        }
    }

    /// Finishes reduction and returns the canonical rows: pivots are
    /// divisors of the modulus in strictly increasing column order, and
    /// every entry above a pivot is reduced modulo that pivot.
    pub fn into_rows(mut self) -> Vec<Vec<u64>> {
        // Pivot values can have shrunk after merges; renormalize so each
        // pivot is again the gcd with the modulus.
        for idx in 0..self.rows.len() {
            let c = self.pivots[idx];
            let v = self.rows[idx][c];
            let g = v.gcd(&self.modulus);
            if v != g {
                let u = lifting_unit(v, self.modulus);
                self.rows[idx] = scaled(&self.rows[idx], u, self.modulus);
            }
        }
        for idx in 0..self.rows.len() {
            let c = self.pivots[idx];
            let v = self.rows[idx][c];
            for above in 0..idx {
                let e = self.rows[above][c];
                if e >= v {
                    let q = e / v;
                    let pivot_row = self.rows[idx].clone();
                    sub_scaled(&mut self.rows[above], &pivot_row, q, self.modulus);
                }
            }
        }
        self.rows
    }

    /// Canonical rows without consuming the form.
    pub fn rows_snapshot(&self) -> Vec<Vec<u64>> {
        self.clone().into_rows()
    }
}

/// Canonical Howell form of a set of rows over `Z/modulus`.
pub fn howell_form(rows: &[Vec<u64>], cols: usize, modulus: u64) -> Vec<Vec<u64>> {
    let mut form = HowellForm::new(modulus, cols);
    for r in rows {
        form.absorb(r.clone());
    }
    form.into_rows()
}

/// Generators of `{ y : A y = 0 }` over `Z/modulus`, where the rows of `A`
/// are given. Returns pairs `(generator, step)`: every kernel element is a
/// unique combination `sum c_i g_i` with `0 <= c_i < step_i`, so the kernel
/// has exactly `prod step_i` elements.
pub fn kernel_generators(rows: &[Vec<u64>], cols: usize, modulus: u64) -> Vec<(Vec<u64>, u64)> {
    // Stage 1: canonical form of the constraint span keeps stage 2 small.
    let reduced = howell_form(rows, cols, modulus);
    let r = reduced.len();

    // Stage 2: reduce [A^T | I]; combinations track y alongside A y, so
    // rows whose left half vanished are exactly the kernel elements, and
    // the Howell span property makes their tails a canonical generating
    // set with unique-combination steps.
    let mut aug = HowellForm::new(modulus, r + cols);
    for j in 0..cols {
        let mut row = vec![0u64; r + cols];
        for (t, red) in reduced.iter().enumerate() {
            row[t] = red[j];
        }
        row[r + j] = 1;
        aug.absorb(row);
    }
    let mut out = Vec::new();
    for row in aug.into_rows() {
        if row[..r].iter().all(|&x| x == 0) {
            let tail = row[r..].to_vec();
            let pivot = *tail
                .iter()
                .find(|&&x| x != 0)
                .expect("nonzero canonical row");
            debug_assert_eq!(modulus % pivot, 0);
            out.push((tail, modulus / pivot));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    /// Brute-force span of rows over Z/l (small cases only).
    fn span_elements(
        rows: &[Vec<u64>],
        cols: usize,
        l: u64,
    ) -> std::collections::BTreeSet<Vec<u64>> {
        let mut set = std::collections::BTreeSet::new();
        set.insert(vec![0u64; cols]);
        loop {
            let mut grew = false;
            let snapshot: Vec<Vec<u64>> = set.iter().cloned().collect();
            for s in &snapshot {
                for r in rows {
                    let sum: Vec<u64> = s.iter().zip(r).map(|(&a, &b)| (a + b) % l).collect();
                    if set.insert(sum) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        set
    }

    #[test]
    fn canonical_form_is_order_independent() {
        let l = 12u64;
        let rows = vec![
            vec![4, 6, 0, 2],
            vec![3, 3, 3, 3],
            vec![0, 8, 4, 0],
            vec![6, 0, 6, 6],
            vec![2, 2, 0, 10],
        ];
        let base = howell_form(&rows, 4, l);
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..30 {
            let mut shuffled = rows.clone();
            shuffled.shuffle(&mut rng);
            assert_eq!(howell_form(&shuffled, 4, l), base);
        }
    }

    #[test]
    fn canonical_form_preserves_span() {
        let l = 8u64;
        let rows = vec![vec![2, 3, 1], vec![4, 0, 6], vec![0, 5, 5]];
        let form = howell_form(&rows, 3, l);
        assert_eq!(span_elements(&rows, 3, l), span_elements(&form, 3, l));
    }

    #[test]
    fn kernel_of_two_mod_four() {
        let gens = kernel_generators(&[vec![2]], 1, 4);
        assert_eq!(gens, vec![(vec![2], 2)]);
    }

    #[test]
    fn kernel_of_one_two_mod_three() {
        let gens = kernel_generators(&[vec![1, 2]], 2, 3);
        assert_eq!(gens, vec![(vec![1, 1], 3)]);
    }

    #[test]
    fn kernel_combinations_are_exact_and_unique() {
        // Exhaustive cross-check on a mixed system over Z/12.
        let l = 12u64;
        let rows = vec![vec![4, 6, 3], vec![0, 2, 8]];
        let gens = kernel_generators(&rows, 3, l);
        let mut seen = std::collections::BTreeSet::new();
        let steps: Vec<u64> = gens.iter().map(|g| g.1).collect();
        let total: u64 = steps.iter().product();
        for mut t in 0..total {
            let mut v = vec![0u64; 3];
            for (g, &s) in gens.iter().zip(&steps) {
                let c = t % s;
                t /= s;
                for (x, &gv) in v.iter_mut().zip(&g.0) {
                    *x = (*x + c * gv) % l;
                }
            }
            assert!(seen.insert(v.clone()), "combination collides at {v:?}");
        }
        // Brute force the kernel directly.
        let mut brute = std::collections::BTreeSet::new();
        for a in 0..l {
            for b in 0..l {
                for c in 0..l {
                    let ok = rows
                        .iter()
                        .all(|r| (r[0] * a + r[1] * b + r[2] * c) % l == 0);
                    if ok {
                        brute.insert(vec![a, b, c]);
                    }
                }
            }
        }
        assert_eq!(seen, brute);
    }

    #[test]
    fn kernel_of_empty_system_is_everything() {
        let gens = kernel_generators(&[], 2, 3);
        let total: u64 = gens.iter().map(|g| g.1).product();
        assert_eq!(total, 9);
    }
}
