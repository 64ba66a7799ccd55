//! Minimal fixed-size linear algebra over generic scalars.
//!
//! The whole crate works with 3×3, 4×4 and 6×6 matrices stored as plain
//! nested arrays. Keeping the scalar bound down to ring operations plus a
//! pivot magnitude lets the same routines run on floats and on jets
//! (forward-mode derivatives), which is how metric inverses get
//! differentiated.

use crate::real::{Real, Scalarlike};

pub fn zeros<T: Scalarlike, const N: usize>() -> [[T; N]; N] {
    [[T::zero(); N]; N]
}

pub fn identity<T: Scalarlike, const N: usize>() -> [[T; N]; N] {
    let mut m = zeros();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

pub fn mat_mul<T: Scalarlike, const N: usize>(a: &[[T; N]; N], b: &[[T; N]; N]) -> [[T; N]; N] {
    let mut out = zeros();
    for i in 0..N {
        for j in 0..N {
            let mut acc = T::zero();
            for (k, bk) in b.iter().enumerate() {
                acc = acc + a[i][k] * bk[j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn mat_vec<T: Scalarlike, const N: usize>(a: &[[T; N]; N], v: &[T; N]) -> [T; N] {
    let mut out = [T::zero(); N];
    for i in 0..N {
        let mut acc = T::zero();
        for (k, x) in v.iter().enumerate() {
            acc = acc + a[i][k] * *x;
        }
        out[i] = acc;
    }
    out
}

pub fn transpose<T: Scalarlike, const N: usize>(a: &[[T; N]; N]) -> [[T; N]; N] {
    let mut out = zeros();
    for i in 0..N {
        for j in 0..N {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn mat_sub<T: Scalarlike, const N: usize>(a: &[[T; N]; N], b: &[[T; N]; N]) -> [[T; N]; N] {
    let mut out = *a;
    for i in 0..N {
        for j in 0..N {
            out[i][j] = a[i][j] - b[i][j];
        }
    }
    out
}

pub fn mat_scale<T: Scalarlike, const N: usize>(s: T, a: &[[T; N]; N]) -> [[T; N]; N] {
    let mut out = *a;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x = s * *x;
        }
    }
    out
}

pub fn trace<T: Scalarlike, const N: usize>(a: &[[T; N]; N]) -> T {
    let mut acc = T::zero();
    for (i, row) in a.iter().enumerate() {
        acc = acc + row[i];
    }
    acc
}

pub fn dot<T: Scalarlike, const N: usize>(a: &[T; N], b: &[T; N]) -> T {
    let mut acc = T::zero();
    for i in 0..N {
        acc = acc + a[i] * b[i];
    }
    acc
}

/// Squared Frobenius norm.
pub fn frobenius2<T: Scalarlike, const N: usize>(a: &[[T; N]; N]) -> T {
    let mut acc = T::zero();
    for row in a {
        for x in row {
            acc = acc + *x * *x;
        }
    }
    acc
}

/// a^T m a (congruence transform), used for frame changes of operators.
pub fn congruence<T: Scalarlike, const N: usize>(
    a: &[[T; N]; N],
    m: &[[T; N]; N],
) -> [[T; N]; N] {
    let at = transpose(a);
    mat_mul(&mat_mul(&at, m), a)
}

/// Matrix inverse by Gauss–Jordan elimination with partial pivoting.
///
/// Returns `None` when a pivot magnitude underflows to zero.
pub fn inverse<T: Scalarlike, const N: usize>(a: &[[T; N]; N]) -> Option<[[T; N]; N]> {
    let mut m = *a;
    let mut inv = identity::<T, N>();
    for col in 0..N {
        let mut pivot = col;
        let mut best = m[col][col].mag();
        for (r, row) in m.iter().enumerate().skip(col + 1) {
            if row[col].mag() > best {
                best = row[col].mag();
                pivot = r;
            }
        }
        if best == 0.0 {
            return None;
        }
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let d = m[col][col];
        for j in 0..N {
            m[col][j] = m[col][j] / d;
            inv[col][j] = inv[col][j] / d;
        }
        for r in 0..N {
            if r == col {
                continue;
            }
            let f = m[r][col];
            // No zero-multiplier shortcut here: scalar types carrying
            // derivative slots can be zero-valued with nonzero gradient,
            // and skipping the update would drop their contribution to
            // the derivative of the inverse.
            for j in 0..N {
                m[r][j] = m[r][j] - f * m[col][j];
                inv[r][j] = inv[r][j] - f * inv[col][j];
            }
        }
    }
    Some(inv)
}

/// Determinant by LU elimination with partial pivoting.
pub fn determinant<T: Scalarlike, const N: usize>(a: &[[T; N]; N]) -> T {
    let mut m = *a;
    let mut det = T::one();
    for col in 0..N {
        let mut pivot = col;
        let mut best = m[col][col].mag();
        for (r, row) in m.iter().enumerate().skip(col + 1) {
            if row[col].mag() > best {
                best = row[col].mag();
                pivot = r;
            }
        }
        if best == 0.0 {
            return T::zero();
        }
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det = det * m[col][col];
        for r in (col + 1)..N {
            let f = m[r][col] / m[col][col];
            // unconditional update, for the same derivative-slot reason
            // as in `inverse`
            for j in col..N {
                m[r][j] = m[r][j] - f * m[col][j];
            }
        }
    }
    det
}

/// Cholesky test for symmetric positive definiteness.
pub fn is_spd<R: Real, const N: usize>(a: &[[R; N]; N]) -> bool {
    let mut l = zeros::<R, N>();
    for i in 0..N {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s = s - l[i][k] * l[j][k];
            }
            if i == j {
                if s <= R::zero() {
                    return false;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}

/// Gram–Schmidt orthonormalisation of the coordinate basis with respect to
/// the metric `g`, in fixed column order. Columns of the result are the
/// frame vectors expressed in coordinates; the matrix is lower triangular
/// with positive diagonal, so it preserves the coordinate orientation.
pub fn gram_schmidt_frame<R: Real>(g: &[[R; 4]; 4]) -> [[R; 4]; 4] {
    let mut cols = [[R::zero(); 4]; 4];
    for j in 0..4 {
        let mut v = [R::zero(); 4];
        v[j] = R::one();
        for prev in cols.iter().take(j) {
            let proj = inner(g, &v, prev);
            for (a, p) in v.iter_mut().zip(prev.iter()) {
                *a = *a - proj * *p;
            }
        }
        let n2 = inner(g, &v, &v);
        let inv_len = n2.sqrt().recip();
        for a in v.iter_mut() {
            *a = *a * inv_len;
        }
        cols[j] = v;
    }
    // column-major storage: frame[a][j] = a-th coordinate of frame vector j
    let mut f = [[R::zero(); 4]; 4];
    for (j, col) in cols.iter().enumerate() {
        for (a, x) in col.iter().enumerate() {
            f[a][j] = *x;
        }
    }
    f
}

fn inner<R: Real>(g: &[[R; 4]; 4], u: &[R; 4], v: &[R; 4]) -> R {
    let mut acc = R::zero();
    for a in 0..4 {
        for b in 0..4 {
            acc = acc + g[a][b] * u[a] * v[b];
        }
    }
    acc
}

/// Eigenvalues of a symmetric 3×3 matrix, descending, by the trigonometric
/// closed form.
pub fn sym3_eigenvalues<R: Real>(a: &[[R; 3]; 3]) -> [R; 3] {
    let half = R::of(0.5);
    let third = R::one() / R::of(3.0);
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let q = trace(a) * third;
    if p1 == R::zero() {
        // already diagonal
        let mut ev = [a[0][0], a[1][1], a[2][2]];
        ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
        return ev;
    }
    let mut p2 = R::zero();
    for i in 0..3 {
        let d = a[i][i] - q;
        p2 = p2 + d * d;
    }
    p2 = p2 + R::of(2.0) * p1;
    let p = (p2 / R::of(6.0)).sqrt();
    let mut b = *a;
    for i in 0..3 {
        b[i][i] = b[i][i] - q;
    }
    let detb = determinant(&b);
    let r = detb / (p * p * p) * half;
    let r = r.max(-R::one()).min(R::one());
    let phi = r.acos() * third;
    let two = R::of(2.0);
    let e1 = q + two * p * phi.cos();
    let e3 = q + two * p * (phi + two * R::PI() * third).cos();
    let e2 = R::of(3.0) * q - e1 - e3;
    let mut ev = [e1, e2, e3];
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev
}
