use proptest::prelude::*;
use rand::Rng;

use uassoc::cube_maps::{self, CubePoint, Label, Sign};
use uassoc::points::{
    char_map_boundary, char_map_top, compose_point, degeneracy_map, equivalent, normal_form,
    LabeledPoint, NormalPoint,
};
use uassoc::sample;
use uassoc::trees::Tree;

fn t(s: &str) -> Tree {
    Tree::parse(s).unwrap()
}

fn lp(tree: &str, labels: &[&str]) -> LabeledPoint {
    LabeledPoint::new(t(tree), CubePoint::parse(labels).unwrap()).unwrap()
}

fn np(tree: &str, labels: &[&str]) -> NormalPoint {
    NormalPoint::new(t(tree), CubePoint::parse(labels).unwrap()).unwrap()
}

fn q(s: &str) -> Label {
    cube_maps::parse_label(s).unwrap()
}

#[test]
fn normal_form_examples() {
    assert_eq!(normal_form(&lp("((l l) l)", &["0"])), np("(l l l)", &[]));
    assert_eq!(
        normal_form(&lp("((b (l l)) l)", &["1/2", "0", "1/3"])),
        np("((l l) l)", &["1/2"])
    );
    assert_eq!(normal_form(&lp("(b l)", &["0"])), np("l", &[]));
    assert_eq!(normal_form(&lp("(b l)", &["1/4"])), np("(b l)", &["1/4"]));
}

#[test]
fn equivalence_examples() {
    assert!(equivalent(&lp("((l l) l)", &["0"]), &lp("(l (l l))", &["0"])));
    assert!(!equivalent(&lp("((l l) l)", &["1/7"]), &lp("((l l) l)", &["0"])));
    // a cork between two labeled edges collapses to their maximum
    assert!(equivalent(
        &lp("((b (l l)) l)", &["1/2", "0", "1/3"]),
        &lp("((l l) l)", &["1/2"])
    ));
    assert!(equivalent(
        &lp("((b (l l)) l)", &["1/3", "0", "1/2"]),
        &lp("((l l) l)", &["1/2"])
    ));
}

#[test]
fn composition_examples() {
    let p = lp("((b l) (l b))", &["1/2", "1/3", "1/5", "1/7"]);
    let r = lp("(l ((l b) l))", &["2/3", "3/4", "4/5"]);
    let c = compose_point(&p, 1, &r).unwrap();
    assert_eq!(c.tree(), &t("((b (l ((l b) l))) (l b))"));
    let want = CubePoint::parse(&["1/2", "1/3", "1", "2/3", "3/4", "4/5", "1/5", "1/7"]).unwrap();
    assert_eq!(c.labels(), &want);
    assert_eq!(compose_point(&p, 2, &LabeledPoint::unit()).unwrap(), p);
    assert_eq!(compose_point(&LabeledPoint::unit(), 1, &p).unwrap(), p);
    assert_eq!(
        compose_point(&lp("(l l)", &[]), 2, &lp("(l l)", &[])).unwrap(),
        lp("(l (l l))", &["1"])
    );
    assert!(compose_point(&lp("(l l)", &[]), 3, &lp("(l l)", &[])).is_err());
}

#[test]
fn degeneracy_examples() {
    let x = lp("((l l) l)", &["2/5"]);
    assert_eq!(degeneracy_map(1, &x).unwrap(), lp("(l l)", &[]));
    assert_eq!(degeneracy_map(3, &x).unwrap(), lp("(l l)", &[]));
    let y = lp("(((l l) l) l)", &["1/3", "1/2"]);
    assert_eq!(degeneracy_map(3, &y).unwrap(), lp("((l l) l)", &["1/2"]));
    assert_eq!(degeneracy_map(2, &y).unwrap(), lp("((l l) l)", &["1/3"]));
    assert!(degeneracy_map(1, &lp("(l l)", &[])).is_err());
}

#[test]
fn characteristic_map_examples() {
    let x = lp("(l l)", &[]);
    assert_eq!(
        char_map_top(&[1], &x, &CubePoint::parse(&["1/2"]).unwrap()).unwrap(),
        lp("(b l)", &["1/2"])
    );
    assert_eq!(char_map_top(&[], &x, &CubePoint::empty()).unwrap(), x);
    assert_eq!(
        char_map_top(&[1, 2], &x, &CubePoint::parse(&["1/3", "2/3"]).unwrap()).unwrap(),
        lp("(b b)", &["1/3", "2/3"])
    );
    assert_eq!(char_map_boundary(&[1], 1, &x, &CubePoint::empty()).unwrap(), np("l", &[]));
    let y = lp("((l l) l)", &["3/4"]);
    assert_eq!(
        char_map_boundary(&[1], 1, &y, &CubePoint::empty()).unwrap(),
        normal_form(&lp("((b l) l)", &["3/4", "0"]))
    );
    assert!(char_map_top(&[1], &x, &CubePoint::empty()).is_err());
}

#[test]
fn json_round_trip() {
    let p = lp("((b l) l)", &["1/2", "1"]);
    let text = serde_json::to_string(&p).unwrap();
    assert_eq!(text, r#"{"tree":"((b l) l)","labels":["1/2","1"]}"#);
    assert_eq!(serde_json::from_str::<LabeledPoint>(&text).unwrap(), p);
    assert!(serde_json::from_str::<NormalPoint>(r#"{"tree":"((l l) l)","labels":["0"]}"#).is_err());
}

fn random_point<R: Rng>(rng: &mut R, max_leaves: usize, max_corks: usize) -> LabeledPoint {
    loop {
        let n = rng.gen_range(0..=max_leaves);
        let m = rng.gen_range(0..=max_corks);
        if n + m == 0 || (n == 0 && m == 1) {
            continue;
        }
        let tree = sample::corked_tree(rng, n, m);
        return sample::labeled_point(rng, tree, 0.3);
    }
}

fn random_nonempty<R: Rng>(rng: &mut R) -> LabeledPoint {
    loop {
        let p = random_point(rng, 4, 2);
        if p.tree().n_leaves() > 0 {
            return p;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn boundary_matches_rewriting(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let n = rng.gen_range(1..4);
        let m = rng.gen_range(1..4);
        let base = sample::binary_tree(&mut rng, n + m);
        let x = sample::labeled_point(&mut rng, base, 0.2);
        let set = sample::subset(&mut rng, n + m, m);
        let i = rng.gen_range(1..=m);
        let tc = sample::cube_point(&mut rng, m - 1, 0.2);
        let direct = char_map_boundary(&set, i, &x, &tc).unwrap();
        let face = cube_maps::face(Sign::Minus, i, &tc).unwrap();
        let oracle = normal_form(&char_map_top(&set, &x, &face).unwrap());
        prop_assert_eq!(direct, oracle);
    }

    #[test]
    fn normal_form_idempotent_and_positive(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let p = random_point(&mut rng, 5, 3);
        let nf = normal_form(&p);
        prop_assert!(nf.labels().coords().iter().all(|l| *l > q("0")));
        prop_assert!(!nf.tree().has_degree_two() || nf.tree().is_unit());
        let again = LabeledPoint::new(nf.tree().clone(), nf.labels().clone());
        if let Ok(again) = again {
            prop_assert_eq!(normal_form(&again), nf.clone());
        }
        prop_assert_eq!(nf.tree().n_black_corks() <= p.tree().n_black_corks(), true);
        prop_assert_eq!(nf.tree().n_leaves(), p.tree().n_leaves());
    }

    #[test]
    fn corks_add_under_composition(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let p = random_nonempty(&mut rng);
        let r = random_point(&mut rng, 4, 2);
        let i = rng.gen_range(1..=p.tree().n_leaves());
        let c = compose_point(&p, i, &r).unwrap();
        prop_assert_eq!(c.tree().n_black_corks(), p.tree().n_black_corks() + r.tree().n_black_corks());
        prop_assert_eq!(c.tree().n_leaves() + 1, p.tree().n_leaves() + r.tree().n_leaves());
    }

    #[test]
    fn sequential_axiom(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let a = random_nonempty(&mut rng);
        let b = random_nonempty(&mut rng);
        let c = random_point(&mut rng, 3, 2);
        let i = rng.gen_range(1..=a.tree().n_leaves());
        let j = rng.gen_range(1..=b.tree().n_leaves());
        let lhs = compose_point(&compose_point(&a, i, &b).unwrap(), i + j - 1, &c).unwrap();
        let rhs = compose_point(&a, i, &compose_point(&b, j, &c).unwrap()).unwrap();
        prop_assert_eq!(normal_form(&lhs), normal_form(&rhs));
    }

    #[test]
    fn parallel_axiom(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let a = loop {
            let a = random_nonempty(&mut rng);
            if a.tree().n_leaves() >= 2 { break a; }
        };
        let b = random_point(&mut rng, 3, 2);
        let c = random_point(&mut rng, 3, 2);
        let i = rng.gen_range(1..a.tree().n_leaves());
        let j = rng.gen_range(i + 1..=a.tree().n_leaves());
        let nb = b.tree().n_leaves();
        let lhs = compose_point(&compose_point(&a, i, &b).unwrap(), j + nb - 1, &c).unwrap();
        let rhs = compose_point(&compose_point(&a, j, &c).unwrap(), i, &b).unwrap();
        prop_assert_eq!(normal_form(&lhs), normal_form(&rhs));
    }

    #[test]
    fn unit_axiom(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let a = random_nonempty(&mut rng);
        let i = rng.gen_range(1..=a.tree().n_leaves());
        let u = LabeledPoint::unit();
        prop_assert_eq!(normal_form(&compose_point(&a, i, &u).unwrap()), normal_form(&a));
        prop_assert_eq!(normal_form(&compose_point(&u, 1, &a).unwrap()), normal_form(&a));
    }
}
