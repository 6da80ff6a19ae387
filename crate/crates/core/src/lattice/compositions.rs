//! Bounded search for nonnegative integer combinations.
//!
//! Finds every `c` in `Z_{>=0}^m` with `sum c_i = count` and
//! `sum c_i * v_i = target` for a fixed list of integer vectors `v_i`.
//! The search prunes with per-coordinate interval bounds of the
//! remaining suffix, which is exact enough at desk scale that the
//! enumeration cost tracks the size of the answer.

pub struct CompositionSolver {
    vectors: Vec<Vec<i64>>,
    dim: usize,
    // suffix_min[i][k] = min over j >= i of vectors[j][k]; likewise max.
    suffix_min: Vec<Vec<i64>>,
    suffix_max: Vec<Vec<i64>>,
}

impl CompositionSolver {
    pub fn new(vectors: Vec<Vec<i64>>) -> Self {
        let dim = vectors.first().map_or(0, Vec::len);
        let m = vectors.len();
        let mut suffix_min = vec![vec![i64::MAX; dim]; m + 1];
        let mut suffix_max = vec![vec![i64::MIN; dim]; m + 1];
        for i in (0..m).rev() {
            for k in 0..dim {
                suffix_min[i][k] = suffix_min[i + 1][k].min(vectors[i][k]);
                suffix_max[i][k] = suffix_max[i + 1][k].max(vectors[i][k]);
            }
        }
        Self {
            vectors,
            dim,
            suffix_min,
            suffix_max,
        }
    }

    /// All solutions, in lexicographic order.
    pub fn solve(&self, count: u32, target: &[i64]) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        if self.vectors.is_empty() {
            if count == 0 && target.iter().all(|&x| x == 0) {
                out.push(Vec::new());
            }
            return out;
        }
        assert_eq!(target.len(), self.dim, "target dimension mismatch");
        let mut partial = vec![0u32; self.vectors.len()];
        let mut rest = target.to_vec();
        self.search(0, count, &mut rest, &mut partial, &mut out);
        out
    }

    fn feasible(&self, i: usize, remaining: u32, rest: &[i64]) -> bool {
        let r = remaining as i64;
        (0..self.dim).all(|k| {
            let lo = r * self.suffix_min[i][k];
            let hi = r * self.suffix_max[i][k];
            lo <= rest[k] && rest[k] <= hi
        })
    }

    fn search(
        &self,
        i: usize,
        remaining: u32,
        rest: &mut Vec<i64>,
        partial: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        let last = self.vectors.len() - 1;
        if i == last {
            let r = remaining as i64;
            if self.vectors[i]
                .iter()
                .zip(rest.iter())
                .all(|(&v, &t)| r * v == t)
            {
                partial[i] = remaining;
                out.push(partial.clone());
                partial[i] = 0;
            }
            return;
        }
        if !self.feasible(i, remaining, rest) {
            return;
        }
        let v = &self.vectors[i];
        for c in 0..=remaining {
            if c > 0 {
                for (t, x) in rest.iter_mut().zip(v) {
                    *t -= x;
                }
            }
            partial[i] = c;
            if self.feasible(i + 1, remaining - c, rest) {
                self.search(i + 1, remaining - c, rest, partial, out);
            }
        }
        for (t, x) in rest.iter_mut().zip(v) {
            *t += x * remaining as i64;
        }
        partial[i] = 0;
    }
}
