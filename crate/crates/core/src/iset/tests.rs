use super::*;
use proptest::prelude::*;

fn line(lo_num: (i64, i64), hi: (i64, i64)) -> ISet {
    // lo_num = (a, c): a*i + c >= 0 ; hi = (a, c) likewise
    ISet::from_cell(
        Cell::universe(1)
            .ge(&[lo_num.0], lo_num.1)
            .ge(&[hi.0], hi.1),
    )
}

/// `{ i : lo < 2i < hi }`
fn strict_double(lo: i64, hi: i64) -> ISet {
    line((2, -lo - 1), (-2, hi - 1))
}

fn closed(lo: i64, hi: i64) -> ISet {
    line((1, -lo), (-1, hi))
}

fn pts(s: &ISet, lo: i64, hi: i64) -> Vec<i64> {
    s.enumerate(&vec![(lo, hi); s.dim()])
        .into_iter()
        .map(|p| p[0])
        .collect()
}

#[test]
fn intersect_examples() {
    let a = strict_double(-4, 4);
    let b = strict_double(0, 8);
    let ab = a.intersect(&b).unwrap();
    assert!(ab.equal(&strict_double(0, 4)).unwrap());
    assert_eq!(pts(&ab, -10, 10), vec![1]);

    assert!(a.intersect(&ISet::empty(1)).unwrap().is_empty().unwrap());

    let c = closed(0, 4).intersect(&closed(2, 6)).unwrap();
    assert_eq!(pts(&c, -10, 10), vec![2, 3, 4]);
}

#[test]
fn subtract_examples() {
    let d = closed(0, 4).subtract(&closed(2, 6)).unwrap();
    assert_eq!(pts(&d, -10, 10), vec![0, 1]);

    let a = strict_double(-4, 4);
    assert!(a.subtract(&a).unwrap().is_empty().unwrap());

    // {-4 < 2i < 4} minus ({0 < 2i} u {2i < 0}) is {2i = 0}
    let pos = ISet::from_cell(Cell::universe(1).ge(&[2], -1));
    let neg = ISet::from_cell(Cell::universe(1).ge(&[-2], -1));
    let rest = a.subtract(&pos.union(&neg).unwrap()).unwrap();
    let zero = ISet::from_cell(Cell::universe(1).eq(&[2], 0));
    assert!(rest.equal(&zero).unwrap());
}

#[test]
fn image_of_rotated_tile() {
    // T(0,0) = { 0 <= i + j < 4, 0 <= j - i < 4 } under (i, j) -> (i)
    let tile = ISet::from_cell(
        Cell::universe(2)
            .ge(&[1, 1], 0)
            .ge(&[-1, -1], 3)
            .ge(&[-1, 1], 0)
            .ge(&[1, -1], 3),
    );
    let img = tile.image(&[vec![1, 0]], &[0]).unwrap();
    assert!(img.equal(&strict_double(-4, 4)).unwrap());
    assert_eq!(pts(&img, -10, 10), vec![-1, 0, 1]);
}

#[test]
fn image_identity_and_stride() {
    let s = closed(0, 3);
    assert!(s.image(&[vec![1]], &[0]).unwrap().equal(&s).unwrap());

    let doubled = s.image(&[vec![2]], &[0]).unwrap();
    let expected = ISet::from_cell(Cell::universe(1).ge(&[1], 0).ge(&[-1], 6).divisible(
        &[1],
        0,
        2,
    ));
    assert!(doubled.equal(&expected).unwrap());
    assert_eq!(pts(&doubled, -10, 10), vec![0, 2, 4, 6]);
}

#[test]
fn translate_examples() {
    let s = line((1, 0), (-1, 3)); // 0 <= i < 4
    let t = s.translate(&[4]).unwrap();
    assert_eq!(pts(&t, -10, 10), vec![4, 5, 6, 7]);
    assert_eq!(s.translate(&[0]).unwrap(), s);
    let shifted = strict_double(-4, 4).translate(&[2]).unwrap();
    assert!(shifted.equal(&strict_double(0, 8)).unwrap());
}

#[test]
fn emptiness_examples() {
    assert!(strict_double(0, 2).is_empty().unwrap());
    let origin = ISet::from_cell(Cell::universe(1).eq(&[1], 0));
    assert!(!origin.is_empty().unwrap());
    let tile = ISet::from_cell(
        Cell::universe(2)
            .ge(&[1, 1], 0)
            .ge(&[-1, -1], 3)
            .ge(&[-1, 1], 0)
            .ge(&[1, -1], 3),
    );
    assert!(!tile.is_empty().unwrap());
}

#[test]
fn emptiness_needs_integer_reasoning() {
    // rationally feasible, integrally empty: 1 <= 3i - 3j <= 2
    let s = ISet::from_cell(Cell::universe(2).ge(&[3, -3], -1).ge(&[-3, 3], 2));
    assert!(s.is_empty().unwrap());
    // unbounded but empty via parity: 2i = 2j + 1
    let p = ISet::from_cell(Cell::universe(2).eq(&[2, -2], -1));
    assert!(p.is_empty().unwrap());
    // unbounded and non-empty
    let q = ISet::from_cell(Cell::universe(2).ge(&[2, 3], -7).divisible(&[1, 1], 1, 3));
    assert!(!q.is_empty().unwrap());
    // dark-shadow style: 2 <= 3i - 2j... thin strip with no lattice point
    let r = ISet::from_cell(
        Cell::universe(2)
            .ge(&[3, -2], -1) // 3i - 2j >= 1
            .ge(&[-3, 2], 1) // 3i - 2j <= 1
            .ge(&[0, 1], 0)
            .ge(&[0, -1], 0),
    );
    // 3i = 1 at j = 0: no integer solution
    assert!(r.is_empty().unwrap());
}

#[test]
fn equality_examples() {
    let a = strict_double(-4, 4);
    assert!(a.equal(&a).unwrap());
    assert!(line((1, 0), (-1, 3)).equal(&closed(0, 3)).unwrap());
    assert!(!closed(0, 3).equal(&closed(0, 4)).unwrap());
}

#[test]
fn enumerate_examples() {
    assert_eq!(pts(&strict_double(-4, 4), -10, 10), vec![-1, 0, 1]);
    assert!(pts(&ISet::empty(1), -10, 10).is_empty());
    let evens = ISet::from_cell(
        Cell::universe(1)
            .ge(&[1], 0)
            .ge(&[-1], 6)
            .divisible(&[1], 0, 2),
    );
    assert_eq!(pts(&evens, -10, 10), vec![0, 2, 4, 6]);
}

#[test]
fn bounding_box_and_lexmin() {
    let tile = ISet::from_cell(
        Cell::universe(2)
            .ge(&[1, 1], 0)
            .ge(&[-1, -1], 3)
            .ge(&[-1, 1], 0)
            .ge(&[1, -1], 3),
    );
    assert_eq!(tile.bounding_box().unwrap(), Some(vec![(-1, 1), (0, 3)]));
    assert_eq!(tile.lexmin().unwrap(), Some(vec![-1, 1]));
    assert_eq!(ISet::empty(2).bounding_box().unwrap(), None);
    let half = ISet::from_cell(Cell::universe(1).ge(&[1], 0));
    assert_eq!(half.bounding_box(), Err(SetError::Unbounded(0)));
}

#[test]
fn dimension_mismatch_is_reported() {
    assert_eq!(
        ISet::universe(1).intersect(&ISet::universe(2)),
        Err(SetError::DimensionMismatch(1, 2))
    );
    assert!(ISet::universe(1).subtract(&ISet::universe(3)).is_err());
}

#[test]
fn serde_round_trip() {
    let s = ISet::from_cell(Cell::universe(2).ge(&[1, -2], 3).eq(&[0, 1], -1).divisible(
        &[1, 1],
        1,
        3,
    ));
    let json = serde_json::to_string(&s).unwrap();
    let back: ISet = serde_json::from_str(&json).unwrap();
    assert!(back.equal(&s).unwrap());
    assert_eq!(back, s);
}

#[test]
fn display_is_readable() {
    let s = strict_double(-4, 4);
    assert_eq!(s.to_string(), "{ [i] : -i + 1 >= 0 and i + 1 >= 0 }");
}

// ---- randomized oracle equivalence ----

const BOX: i64 = 7;

fn arb_cell(dim: usize) -> impl Strategy<Value = Cell> {
    let ineq = (proptest::collection::vec(-4i64..=4, dim), -8i64..=8, 0u8..6);
    let div = (
        proptest::collection::vec(-4i64..=4, dim),
        -4i64..=4,
        2i64..=3,
    );
    (
        proptest::collection::vec(ineq, 0..4),
        proptest::collection::vec(div, 0..2),
    )
        .prop_map(move |(ineqs, divs)| {
            let mut c = Cell::universe(dim);
            for (coeffs, k, kind) in ineqs {
                c = if kind == 0 {
                    c.eq(&coeffs, k)
                } else {
                    c.ge(&coeffs, k)
                };
            }
            for (coeffs, k, m) in divs {
                c = c.divisible(&coeffs, k, m);
            }
            c
        })
}

fn arb_set(dim: usize) -> impl Strategy<Value = ISet> {
    proptest::collection::vec(arb_cell(dim), 0..3)
        .prop_map(move |cells| ISet::from_cells(dim, cells))
}

fn arb_pair() -> impl Strategy<Value = (ISet, ISet)> {
    (1usize..=3).prop_flat_map(|d| (arb_set(d), arb_set(d)))
}

fn boxed(dim: usize) -> Vec<(i64, i64)> {
    vec![(-BOX, BOX); dim]
}

fn bounded(s: &ISet) -> ISet {
    let d = s.dim();
    let mut c = Cell::universe(d);
    for k in 0..d {
        let mut e = vec![0; d];
        e[k] = 1;
        c = c.ge(&e, 4);
        e[k] = -1;
        c = c.ge(&e, 4);
    }
    s.intersect(&ISet::from_cell(c)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn algebra_matches_enumeration((a, b) in arb_pair()) {
        let d = a.dim();
        let bx = boxed(d);
        let ea: std::collections::BTreeSet<_> = a.enumerate(&bx).into_iter().collect();
        let eb: std::collections::BTreeSet<_> = b.enumerate(&bx).into_iter().collect();

        let inter: std::collections::BTreeSet<_> = a.intersect(&b).unwrap().enumerate(&bx).into_iter().collect();
        prop_assert_eq!(&inter, &ea.intersection(&eb).cloned().collect());

        let diff: std::collections::BTreeSet<_> = a.subtract(&b).unwrap().enumerate(&bx).into_iter().collect();
        prop_assert_eq!(&diff, &ea.difference(&eb).cloned().collect());

        let uni: std::collections::BTreeSet<_> = a.union(&b).unwrap().enumerate(&bx).into_iter().collect();
        prop_assert_eq!(&uni, &ea.union(&eb).cloned().collect());

        // a = (a \ b) disjoint-union (a n b)
        prop_assert!(diff.is_disjoint(&inter));
    }

    #[test]
    fn emptiness_matches_enumeration(a in (1usize..=3).prop_flat_map(arb_set)) {
        let a = bounded(&a);
        let has_points = !a.enumerate(&boxed(a.dim())).is_empty();
        prop_assert_eq!(a.is_empty().unwrap(), !has_points);
    }

    #[test]
    fn image_matches_pointwise_map(
        a in (1usize..=3).prop_flat_map(arb_set),
        rows in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 3), 1..=3),
        offset in proptest::collection::vec(-2i64..=2, 3),
    ) {
        let a = bounded(&a);
        let d = a.dim();
        let matrix: Vec<Vec<i64>> = rows.iter().map(|r| r[..d].to_vec()).collect();
        let m = matrix.len();
        let offset = &offset[..m];
        let img = a.image(&matrix, offset).unwrap();
        let expected: std::collections::BTreeSet<Vec<i64>> = a
            .enumerate(&boxed(d))
            .iter()
            .map(|x| (0..m).map(|r| matrix[r].iter().zip(x).map(|(p, q)| p * q).sum::<i64>() + offset[r]).collect())
            .collect();
        // every image point lies within |y| <= 2*3*4 + 2
        let got: std::collections::BTreeSet<Vec<i64>> = img.enumerate(&vec![(-26, 26); m]).into_iter().collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn translate_round_trip(a in (1usize..=3).prop_flat_map(arb_set), v in proptest::collection::vec(-5i64..=5, 3)) {
        let v = &v[..a.dim()];
        let neg: Vec<i64> = v.iter().map(|x| -x).collect();
        let back = a.translate(v).unwrap().translate(&neg).unwrap();
        prop_assert!(back.equal(&a).unwrap());
    }

    #[test]
    fn de_morgan_on_cells((a, b) in arb_pair()) {
        // U \ (a u b) == (U \ a) n (U \ b)
        let u = ISet::universe(a.dim());
        let lhs = u.subtract(&a.union(&b).unwrap()).unwrap();
        let rhs = u.subtract(&a).unwrap().intersect(&u.subtract(&b).unwrap()).unwrap();
        let bx = boxed(a.dim());
        prop_assert_eq!(lhs.enumerate(&bx), rhs.enumerate(&bx));
    }
}
