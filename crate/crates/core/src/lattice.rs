//! Integer lattice utilities: Hermite-style row reduction of generator sets.

/// Row-reduced basis of the subgroup of Z^d generated by `gens`.
///
/// Rows are in echelon form with positive pivots; zero rows are dropped.
pub fn echelon_basis(gens: &[Vec<i64>], d: usize) -> Vec<Vec<i64>> {
    let mut rows: Vec<Vec<i128>> = gens
        .iter()
        .map(|g| g.iter().map(|&v| v as i128).collect())
        .filter(|r: &Vec<i128>| r.iter().any(|&v| v != 0))
        .collect();
    let mut pivot_row = 0;
    for col in 0..d {
        loop {
            // smallest nonzero entry in this column at or below pivot_row
            let best = (pivot_row..rows.len())
                .filter(|&r| rows[r][col] != 0)
                .min_by_key(|&r| rows[r][col].abs());
            let Some(best) = best else { break };
            rows.swap(pivot_row, best);
            let p = rows[pivot_row][col];
            let mut reduced_all = true;
            for r in (pivot_row + 1)..rows.len() {
                let q = rows[r][col] / p;
                if q != 0 {
                    for c in 0..d {
                        rows[r][c] -= q * rows[pivot_row][c];
                    }
                }
                if rows[r][col] != 0 {
                    reduced_all = false;
                }
            }
            if reduced_all {
                if p < 0 {
                    rows[pivot_row].iter_mut().for_each(|v| *v = -*v);
                }
                pivot_row += 1;
                break;
            }
        }
        rows.retain(|r| r.iter().any(|&v| v != 0));
        if pivot_row >= rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    rows.into_iter()
        .map(|r| r.into_iter().map(|v| v as i64).collect())
        .collect()
}

/// Index of the generated subgroup in Z^d, or `None` when it has rank < d.
pub fn index_in_zd(gens: &[Vec<i64>], d: usize) -> Option<u64> {
    let basis = echelon_basis(gens, d);
    if basis.len() < d {
        return None;
    }
    let mut index: u64 = 1;
    let mut col = 0;
    for row in &basis {
        while row[col] == 0 {
            col += 1;
        }
        index = index.saturating_mul(row[col].unsigned_abs());
        col += 1;
    }
    Some(index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vectors_generate() {
        let gens = vec![vec![1, 0], vec![0, 1], vec![-1, 0]];
        assert_eq!(index_in_zd(&gens, 2), Some(1));
    }

    #[test]
    fn checkerboard_has_index_two() {
        let gens = vec![vec![2, 0], vec![1, 1], vec![1, -1], vec![0, 2]];
        assert_eq!(index_in_zd(&gens, 2), Some(2));
    }

    #[test]
    fn rank_deficient() {
        let gens = vec![vec![1, 1], vec![2, 2]];
        assert_eq!(index_in_zd(&gens, 2), None);
        assert_eq!(echelon_basis(&gens, 2).len(), 1);
    }

    #[test]
    fn one_dimensional_gcd() {
        assert_eq!(index_in_zd(&[vec![6], vec![-4], vec![9]], 1), Some(1));
        assert_eq!(index_in_zd(&[vec![3]], 1), Some(3));
    }
}
