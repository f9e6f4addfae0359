use super::{AlgebraError, BiPoly, UniPoly, Var};

/// Resultant of `p` and `q` with respect to `z2`, as a polynomial in `z1`.
///
/// The Sylvester matrix has polynomial entries (the `z2`-coefficients of the
/// inputs, each a polynomial in `z1`). Its determinant is expanded with
/// fraction-free (Bareiss) elimination, where every division by the previous
/// pivot is exact in exact arithmetic. Row pivoting picks the entry with the
/// largest coefficient magnitude.
///
/// The result also vanishes at `z1` values where both leading
/// `z2`-coefficients vanish, so roots must be screened by back-substitution.
pub fn resultant_z2(p: &BiPoly, q: &BiPoly) -> Result<UniPoly, AlgebraError> {
    let m = p.degree_in(Var::Z2).unwrap_or(0);
    let n = q.degree_in(Var::Z2).unwrap_or(0);
    if m == 0 || n == 0 {
        return Err(AlgebraError::DegenerateElimination);
    }
    let a = p.coeffs_in_z2();
    let b = q.coeffs_in_z2();
    let size = m + n;

    // Row r < n holds p's coefficients (descending in z2) shifted right by r;
    // row n + r holds q's shifted by r.
    let mut mat = vec![vec![UniPoly::zero(); size]; size];
    for r in 0..n {
        for (k, coef) in a.iter().rev().enumerate() {
            mat[r][r + k] = coef.clone();
        }
    }
    for r in 0..m {
        for (k, coef) in b.iter().rev().enumerate() {
            mat[n + r][r + k] = coef.clone();
        }
    }

    let det = bareiss_det(mat);
    let bound = match (p.total_degree(), q.total_degree()) {
        (Some(dp), Some(dq)) => dp * dq,
        _ => 0,
    };
    Ok(det.truncate_degree(bound))
}

fn bareiss_det(mut mat: Vec<Vec<UniPoly>>) -> UniPoly {
    let size = mat.len();
    let mut negate = false;
    let mut prev = UniPoly::one();
    for k in 0..size {
        let scale = mat[k..]
            .iter()
            .flat_map(|r| r[k..].iter())
            .map(UniPoly::max_abs_coeff)
            .fold(0.0, f64::max);
        let (pivot_row, pivot_mag) =
            (k..size)
                .map(|r| (r, mat[r][k].max_abs_coeff()))
                .fold(
                    (k, 0.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot_mag <= super::ZERO_THRESHOLD * scale || pivot_mag == 0.0 {
            return UniPoly::zero();
        }
        if pivot_row != k {
            mat.swap(pivot_row, k);
            negate = !negate;
        }
        if k + 1 == size {
            break;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = UniPoly::cross_diff(&mat[k][k], &mat[i][j], &mat[i][k], &mat[k][j]);
                mat[i][j] = num.div_exact(&prev);
            }
            mat[i][k] = UniPoly::zero();
        }
        prev = mat[k][k].clone();
    }
    let det = mat[size - 1][size - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}
