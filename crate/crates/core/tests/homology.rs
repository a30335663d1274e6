use num_bigint::BigInt;
use proptest::prelude::*;

use uassoc::chain_operad::SignConvention;
use uassoc::homology::{
    betti_mod_p, build_complex, cells_by_degree, euler_characteristic, f_vector, homology_summary,
    smith_normal_form, Matrix,
};
use uassoc::trees::binomial;

fn conv() -> SignConvention {
    SignConvention::validated().unwrap()
}

#[test]
fn f_vectors() {
    assert_eq!(f_vector(1, 1), vec![3, 2]);
    assert_eq!(f_vector(0, 2), vec![2, 2, 1]);
    assert_eq!(f_vector(1, 2), vec![9, 17, 12, 3]);
    assert_eq!(f_vector(4, 0), vec![5, 5, 1]);
    assert_eq!(f_vector(3, 0), vec![2, 1]);
    assert_eq!(f_vector(0, 1), vec![1]);
}

#[test]
fn k11_cells() {
    let c = build_complex(1, 1, &conv()).unwrap();
    let names = |k: usize| -> Vec<String> { c.basis[k].iter().map(ToString::to_string).collect() };
    assert_eq!(names(0), ["(l w)", "(w l)", "l"]);
    assert_eq!(names(1), ["(b l)", "(l b)"]);
}

#[test]
fn contractible_truncations() {
    for (n, m) in [(0, 2), (1, 2), (2, 2), (3, 1), (2, 0), (5, 0), (0, 3)] {
        let c = build_complex(n, m, &conv()).unwrap();
        for k in 2..c.boundaries.len() {
            assert!(c.boundaries[k - 1].mul(&c.boundaries[k]).is_zero());
        }
        assert_eq!(euler_characteristic(&c), 1, "({n},{m})");
        assert!(homology_summary(&c).is_point(), "({n},{m})");
        let mut point = vec![0; c.basis.len()];
        point[0] = 1;
        assert_eq!(betti_mod_p(&c, 2).unwrap(), point);
        assert_eq!(betti_mod_p(&c, 3).unwrap(), point);
    }
}

#[test]
fn associahedra_have_euler_characteristic_one() {
    for n in 2..=7 {
        let f = f_vector(n, 0);
        let chi: i64 = f
            .iter()
            .enumerate()
            .map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) })
            .sum();
        assert_eq!(chi, 1, "K_{n}");
        assert_eq!(f[n - 2], 1);
    }
}

#[test]
fn top_cells_are_counted_by_cork_sets() {
    for n in 0usize..=3 {
        for m in 0..=3 {
            if matches!((n, m), (0, 0) | (1, 0)) {
                continue;
            }
            let top = (n + 2 * m).saturating_sub(2);
            let with_m = cells_by_degree(n, m)
                .get(top)
                .map_or(0, |cells| cells.iter().filter(|t| t.tree().n_corks() == m).count());
            assert_eq!(BigInt::from(with_m), BigInt::from(binomial(n + m, m)), "({n},{m})");
        }
    }
}

#[test]
fn smith_examples() {
    let s = smith_normal_form(&Matrix::from_rows(&[vec![2, 0], vec![0, 3]]));
    assert_eq!(s.invariants, vec![BigInt::from(1), BigInt::from(6)]);
    assert_eq!(smith_normal_form(&Matrix::zeros(2, 4)).rank(), 0);
    let c = build_complex(0, 2, &conv()).unwrap();
    assert_eq!(smith_normal_form(&c.boundaries[1]).rank(), 1);
}

// determinant by fraction-free elimination, as an independent oracle for the
// product of invariant factors of a square matrix
fn det(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| x.into()).collect()).collect();
    let mut sign = BigInt::from(1);
    let mut prev = BigInt::from(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| a[r][k] != BigInt::from(0)) else {
            return 0.into();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

proptest! {
    #[test]
    fn smith_invariants_divide_and_multiply_to_det(
        rows in (1usize..5).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-6i64..7, n), n))
    ) {
        let s = smith_normal_form(&Matrix::from_rows(&rows));
        for w in s.invariants.windows(2) {
            prop_assert!((&w[1] % &w[0]) == BigInt::from(0));
        }
        let d = det(&rows);
        if d == BigInt::from(0) {
            prop_assert!(s.rank() < rows.len());
        } else {
            let prod: BigInt = s.invariants.iter().product();
            prop_assert_eq!(prod, if d < BigInt::from(0) { -d } else { d });
        }
    }
}
