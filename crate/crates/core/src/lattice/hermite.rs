//! Integer row reduction: Hermite normal form, rank and integer kernels.
//!
//! Everything here works on small dense matrices given as rows of `i64`.
//! Intermediate values are kept in `i128`; desk-scale inputs never come
//! close to overflowing that.

type Row = Vec<i128>;

fn widen(rows: &[Vec<i64>]) -> Vec<Row> {
    rows.iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect()
}

fn narrow(row: &[i128]) -> Vec<i64> {
    row.iter()
        .map(|&x| i64::try_from(x).expect("lattice entry exceeds i64"))
        .collect()
}

fn sub_scaled(target: &mut Row, src: &Row, q: i128) {
    if q == 0 {
        return;
    }
    for (t, s) in target.iter_mut().zip(src) {
        *t -= q * s;
    }
}

/// Row-style Hermite reduction of `rows`, tracking the unimodular transform.
///
/// Returns `(h, u, rank)` with `u * rows = h`; the first `rank` rows of `h`
/// are in echelon form with positive pivots and entries above each pivot
/// reduced into `[0, pivot)`, the remaining rows are zero.
fn reduce(rows: &[Vec<i64>]) -> (Vec<Row>, Vec<Row>, usize) {
    let m = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut h = widen(rows);
    let mut u: Vec<Row> = (0..m)
        .map(|i| (0..m).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        loop {
            let pick = (r..m)
                .filter(|&k| h[k][c] != 0)
                .min_by_key(|&k| h[k][c].abs());
            let Some(k) = pick else { break };
            h.swap(r, k);
            u.swap(r, k);
            let mut done = true;
            for i in r + 1..m {
                if h[i][c] != 0 {
                    let q = h[i][c].div_euclid(h[r][c]);
                    let (hr, ur) = (h[r].clone(), u[r].clone());
                    sub_scaled(&mut h[i], &hr, q);
                    sub_scaled(&mut u[i], &ur, q);
                    if h[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[r][c] == 0 {
            continue;
        }
        if h[r][c] < 0 {
            h[r].iter_mut().for_each(|x| *x = -*x);
            u[r].iter_mut().for_each(|x| *x = -*x);
        }
        let (hr, ur) = (h[r].clone(), u[r].clone());
        for i in 0..r {
            let q = h[i][c].div_euclid(hr[c]);
            sub_scaled(&mut h[i], &hr, q);
            sub_scaled(&mut u[i], &ur, q);
        }
        r += 1;
    }
    (h, u, r)
}

/// Hermite normal form basis of the row lattice (zero rows dropped).
pub fn hermite_basis(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let (h, _, rank) = reduce(rows);
    h[..rank].iter().map(|r| narrow(r)).collect()
}

pub fn rank(rows: &[Vec<i64>]) -> usize {
    reduce(rows).2
}

/// Basis of `{ l : sum_j l_j * rows[j] = 0 }`, put in Hermite form with
/// pivots taken from the last coordinate backwards, so the output is
/// independent of how the kernel happened to be found.
pub fn integer_kernel(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let m = rows.len();
    if m == 0 {
        return Vec::new();
    }
    let (_, u, rank) = reduce(rows);
    let raw: Vec<Vec<i64>> = u[rank..].iter().map(|r| narrow(r)).collect();
    if raw.is_empty() {
        return raw;
    }
    let reversed: Vec<Vec<i64>> = raw
        .iter()
        .map(|r| r.iter().rev().copied().collect())
        .collect();
    hermite_basis(&reversed)
        .into_iter()
        .map(|r| r.into_iter().rev().collect())
        .collect()
}

/// Coordinates of `v` with respect to a Hermite basis, if `v` lies in the
/// lattice it spans.
pub fn lattice_coordinates(basis: &[Vec<i64>], v: &[i64]) -> Option<Vec<i64>> {
    let mut rest: Row = v.iter().map(|&x| x as i128).collect();
    let mut coords = Vec::with_capacity(basis.len());
    for row in basis {
        let c = row.iter().position(|&x| x != 0)?;
        let pivot = row[c] as i128;
        if rest[c] % pivot != 0 {
            return None;
        }
        let q = rest[c] / pivot;
        for (t, &s) in rest.iter_mut().zip(row) {
            *t -= q * s as i128;
        }
        coords.push(i64::try_from(q).ok()?);
    }
    rest.iter().all(|&x| x == 0).then_some(coords)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Divides out the content of a nonzero vector.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    if g <= 1 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn combine(coeffs: &[i64], rows: &[Vec<i64>]) -> Vec<i64> {
        let mut out = vec![0; rows[0].len()];
        for (c, r) in coeffs.iter().zip(rows) {
            for (o, x) in out.iter_mut().zip(r) {
                *o += c * x;
            }
        }
        out
    }

    #[test]
    fn hermite_of_dwork_lifts() {
        let lifts = vec![vec![1, 1, 1], vec![1, 2, 0], vec![1, 0, 2]];
        let h = hermite_basis(&lifts);
        assert_eq!(h.len(), 2);
        for l in &lifts {
            let c = lattice_coordinates(&h, l).expect("lift in its own lattice");
            assert_eq!(&combine(&c, &h), l);
        }
        assert!(lattice_coordinates(&h, &[1, 0, 0]).is_none());
        assert!(lattice_coordinates(&h, &[0, 1, -1]).is_some());
    }

    #[test]
    fn kernel_dwork_sign_convention() {
        let lifts = vec![vec![1, 1, 1], vec![1, 2, 0], vec![1, 0, 2]];
        assert_eq!(integer_kernel(&lifts), vec![vec![-2, 1, 1]]);
    }

    #[test]
    fn kernel_of_independent_rows_is_empty() {
        let rows = vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 0, 1]];
        assert!(integer_kernel(&rows).is_empty());
        assert_eq!(rank(&rows), 3);
    }

    #[test]
    fn kernel_annihilates() {
        let rows = vec![
            vec![1, 0, 0],
            vec![1, 1, 0],
            vec![1, 0, 1],
            vec![1, -1, 1],
            vec![1, -1, 0],
            vec![1, 0, -1],
            vec![1, 1, -1],
        ];
        let k = integer_kernel(&rows);
        assert_eq!(k.len(), 4);
        for l in &k {
            assert!(combine(l, &rows).iter().all(|&x| x == 0));
        }
        // kernel basis must generate every relation found by brute force
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                let l = vec![-(2 * a), a, b, 0, a, b, 0];
                if combine(&l, &rows).iter().all(|&x| x == 0) {
                    assert!(lattice_coordinates(&hermite_basis(&k), &l).is_some());
                }
            }
        }
    }
}
