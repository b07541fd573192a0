//! Named algebras used throughout the tests and the CLI.

use super::carnot::constants;
use super::structure::LieAlgebraSpec;

/// Heisenberg algebra `h(n)`: basis `x_1..x_n, y_1..y_n, z`, `[x_i, y_i] = z`.
///
/// With this ordering the bracket of horizontal vectors is `ω(x, y) z` for the
/// standard form `ω(x, y) = xᵀ J y`, `J = [[0, I], [-I, 0]]`.
pub fn heisenberg(n: usize) -> LieAlgebraSpec {
    let z = 2 * n;
    let list: Vec<_> = (0..n).map(|i| (i, n + i, z, 1.0)).collect();
    LieAlgebraSpec::new(2 * n + 1, constants(&list), (0..2 * n).collect()).with_name(&format!("h{n}"))
}

/// Four-dimensional solvable algebra with `X3 = [X1, X2]`, `X4 = [X1, X3]`
/// and `[X2, X3] = αX1 + βX2 + γX3`, generated by `X1, X2`.
///
/// The remaining brackets are the unique ones making the Jacobi identity hold
/// (requires `α ≠ 0`).
pub fn sussmann(alpha: f64, beta: f64, gamma: f64) -> LieAlgebraSpec {
    let (a, b, g) = (alpha, beta, gamma);
    let list = [
        (0, 1, 2, 1.0),
        (0, 2, 3, 1.0),
        (1, 2, 0, a),
        (1, 2, 1, b),
        (1, 2, 2, g),
        (1, 3, 2, b),
        (1, 3, 3, g),
        (0, 3, 0, -b * b * g / a),
        (0, 3, 1, -b * b * b * g / (a * a)),
        (0, 3, 2, -b * b * (a + g * g) / (a * a)),
        (0, 3, 3, -2.0 * b * g / a),
        (2, 3, 0, b * b),
        (2, 3, 1, b * b * b / a),
        (2, 3, 2, b * b * g / a),
        (2, 3, 3, b),
    ];
    let list: Vec<_> = list.into_iter().filter(|e| e.3 != 0.0).collect();
    LieAlgebraSpec::new(4, constants(&list), vec![0, 1]).with_name("sussmann")
}

/// The member used by default: `α = 1`, `β = γ = 1/2`.
pub fn sussmann_default() -> LieAlgebraSpec {
    sussmann(1.0, 0.5, 0.5)
}

/// Free step-2 nilpotent algebra on `r` generators; brackets `[e_a, e_b]` for
/// `a < b` in lexicographic order.
pub fn free_step2(r: usize) -> LieAlgebraSpec {
    let mut list = Vec::new();
    let mut k = r;
    for a in 0..r {
        for b in a + 1..r {
            list.push((a, b, k, 1.0));
            k += 1;
        }
    }
    LieAlgebraSpec::new(k, constants(&list), (0..r).collect()).with_name(&format!("free-step2-{r}gen"))
}

/// Abelian `R^d` with every basis vector a generator.
pub fn abelian(d: usize) -> LieAlgebraSpec {
    LieAlgebraSpec::new(d, Vec::new(), (0..d).collect()).with_name(&format!("abelian{d}"))
}

/// Engel-type filiform algebra of step 3: `[X1,X2]=X3`, `[X1,X3]=X4`.
pub fn engel() -> LieAlgebraSpec {
    LieAlgebraSpec::new(4, constants(&[(0, 1, 2, 1.0), (0, 2, 3, 1.0)]), vec![0, 1]).with_name("engel")
}
