use super::*;
use crate::iset::Cell;
use crate::linalg::rat;
use crate::oracle;

fn diamond(s: i64) -> TilingSpec {
    TilingSpec::new("S", vec![vec![1, 1], vec![-1, 1]], vec![s, s])
}

fn single() -> Vec<AffineFn> {
    vec![AffineFn::new("S", "A", vec![vec![1, 0]], vec![0])]
}

fn jacobi() -> Vec<AffineFn> {
    let id = vec![vec![1, 0], vec![0, 1]];
    vec![
        AffineFn::new("S", "S", id.clone(), vec![-1, -1]),
        AffineFn::new("S", "S", id.clone(), vec![0, -1]),
        AffineFn::new("S", "S", id, vec![1, -1]),
    ]
}

fn counterexample() -> Vec<AffineFn> {
    vec![
        AffineFn::new("S", "A", vec![vec![1, -1]], vec![0]),
        AffineFn::new("S", "A", vec![vec![1, 1]], vec![0]),
    ]
}

fn matmul() -> Vec<AffineFn> {
    vec![AffineFn::new(
        "S",
        "A",
        vec![vec![1, 0, 0], vec![0, 0, 1]],
        vec![0, 0],
    )]
}

fn line(lo: i64, hi: i64) -> ISet {
    ISet::from_cell(Cell::universe(1).ge(&[1], -lo).ge(&[-1], hi))
}

#[test]
fn classify_examples() {
    assert_eq!(classify(&jacobi()).unwrap().verdict, Verdict::Uniform);
    let c = classify(&counterexample()).unwrap();
    assert_eq!(c.verdict, Verdict::MultipleNullSpaces);
    assert_eq!(c.kernels.len(), 2);
    let same = vec![
        AffineFn::new("S", "A", vec![vec![1, 0]], vec![0]),
        AffineFn::new("S", "A", vec![vec![1, 0]], vec![1]),
    ];
    assert_eq!(
        classify(&same).unwrap().verdict,
        Verdict::UniformlyIntersecting
    );
    let shared = vec![
        AffineFn::new("S", "A", vec![vec![1, 1]], vec![0]),
        AffineFn::new("S", "A", vec![vec![2, 2]], vec![1]),
    ];
    assert_eq!(classify(&shared).unwrap().verdict, Verdict::SharedNullSpace);
    assert_eq!(classify(&[]), Err(MarsError::NoDependences));
    let mixed = vec![
        AffineFn::new("S", "A", vec![vec![1, 0]], vec![0]),
        AffineFn::new("S", "B", vec![vec![1, 0]], vec![0]),
    ];
    assert!(matches!(classify(&mixed), Err(MarsError::MixedSpaces(_))));
}

#[test]
fn footprint_examples() {
    let f = combined_footprint(&single(), &diamond(4), &[0, 0]).unwrap();
    assert!(f.equal(&line(-1, 1)).unwrap());

    let id = vec![AffineFn::new(
        "S",
        "S",
        vec![vec![1, 0], vec![0, 1]],
        vec![0, 0],
    )];
    let tiling = TilingSpec::canonical("S", vec![4, 4]);
    let f = combined_footprint(&id, &tiling, &[1, 2]).unwrap();
    assert!(f.equal(&tiling.tile_set(&[1, 2])).unwrap());

    // three shifted diamonds
    let f = combined_footprint(&jacobi(), &diamond(4), &[0, 0]).unwrap();
    let pts = f.points().unwrap();
    assert_eq!(pts.len(), oracle_points(&jacobi(), &diamond(4)));
}

fn oracle_points(deps: &[AffineFn], tiling: &TilingSpec) -> usize {
    let mut all = std::collections::BTreeSet::new();
    for d in deps {
        all.extend(oracle::oracle_footprint(d, tiling, &vec![0; tiling.count()], None).unwrap());
    }
    all.len()
}

#[test]
fn unbounded_footprints_are_rejected() {
    let slab = TilingSpec::new("S", vec![vec![1, 0]], vec![4]);
    let column = vec![AffineFn::new("S", "A", vec![vec![0, 1]], vec![0])];
    assert_eq!(
        combined_footprint(&column, &slab, &[0]).unwrap_err(),
        MarsError::UnboundedFootprint(0)
    );
    // the free direction e_j is collapsed by (i, j) -> (i)
    let f = combined_footprint(&single(), &slab, &[1]).unwrap();
    assert!(f.equal(&line(4, 7)).unwrap());
}

#[test]
fn single_dependence_families() {
    let fams = offset_families(&single(), &diamond(4)).unwrap();
    let ws: Vec<_> = fams.iter().map(|f| f.w.clone()).collect();
    assert_eq!(fams.len(), 3);
    assert_eq!(ws[0], RatVector::from_ints(&[0, 0]));
    let mut rest: Vec<_> = ws[1..].to_vec();
    rest.sort();
    assert_eq!(
        rest,
        vec![
            RatVector::from_ints(&[-2, 0]),
            RatVector::from_ints(&[2, 0])
        ]
    );
}

#[test]
fn jacobi_families_match_reference_list() {
    let fams = offset_families(&jacobi(), &diamond(4)).unwrap();
    let mut got: Vec<Vec<i64>> = fams.iter().map(|f| f.delta.clone()).collect();
    got.sort();
    let mut want = vec![
        vec![0, 0],
        vec![-1, 0],
        vec![0, 1],
        vec![-1, 1],
        vec![1, 0],
        vec![0, -1],
        vec![1, -1],
    ];
    want.sort();
    assert_eq!(got, want);
}

#[test]
fn matmul_has_one_family() {
    let tiling = TilingSpec::canonical("S", vec![4, 4, 4]);
    let fams = offset_families(&matmul(), &tiling).unwrap();
    assert_eq!(fams.len(), 1);
    assert_eq!(fams[0].delta, vec![0, 0, 0]);
    let index = FamilyIndex::new(&matmul(), &tiling, &fams).unwrap();
    assert_eq!(index.family_of(&[0, 7, 0]), Some(0));
    assert_eq!(index.family_of(&[1, 0, 0]), None);
}

#[test]
fn families_refuse_multiple_null_spaces() {
    let tiling = TilingSpec::canonical("S", vec![4, 4]);
    assert_eq!(
        offset_families(&counterexample(), &tiling),
        Err(MarsError::MultipleNullSpaces)
    );
    assert_eq!(
        build_mars(&counterexample(), &tiling, &BuildOptions::default()),
        Err(MarsError::MultipleNullSpaces)
    );
}

#[test]
fn single_dependence_mars() {
    let p = build_mars(&single(), &diamond(4), &BuildOptions::default()).unwrap();
    assert_eq!(p.mars.len(), 3);
    let sets: Vec<Vec<Vec<i64>>> = p.mars.iter().map(|m| m.set.points().unwrap()).collect();
    assert_eq!(sets[0], vec![vec![0]]);
    let mut rest = sets[1..].to_vec();
    rest.sort();
    assert_eq!(rest, vec![vec![vec![-1]], vec![vec![1]]]);
    assert!(check_partition(&p).unwrap().ok());
    assert!(p.invariance.passed());
}

#[test]
fn matmul_single_block() {
    let tiling = TilingSpec::canonical("S", vec![4, 4, 4]);
    let p = build_mars(&matmul(), &tiling, &BuildOptions::default()).unwrap();
    assert_eq!(p.mars.len(), 1);
    let block = ISet::from_cell(
        Cell::universe(2)
            .ge(&[1, 0], 0)
            .ge(&[-1, 0], 3)
            .ge(&[0, 1], 0)
            .ge(&[0, -1], 3),
    );
    assert!(p.mars[0].set.equal(&block).unwrap());
}

#[test]
fn family_guard_refuses() {
    let opts = BuildOptions {
        tile: None,
        max_families: 5,
    };
    assert_eq!(
        build_mars(&jacobi(), &diamond(4), &opts),
        Err(MarsError::TooManyFamilies { found: 7, max: 5 })
    );
}

#[test]
fn invariance_verdicts() {
    let samples = vec![vec![0, 0], vec![3, -2], vec![5, 5]];
    let deltas = vec![vec![1, 0], vec![0, 1], vec![-1, 0]];
    assert!(verify_invariance(&single(), &diamond(4), &samples, &deltas)
        .unwrap()
        .passed());
    assert!(verify_invariance(&jacobi(), &diamond(4), &samples, &deltas)
        .unwrap()
        .passed());
    let v = verify_invariance(
        &counterexample(),
        &TilingSpec::canonical("S", vec![4, 4]),
        &samples,
        &deltas,
    )
    .unwrap();
    assert!(matches!(v, Invariance::Fail { .. }));
}

#[test]
fn fd_partition_of_counterexample() {
    let r = fd_partition(
        &counterexample(),
        &TilingSpec::canonical("S", vec![4, 4]),
        3,
    )
    .unwrap();
    let ds: Vec<Vec<usize>> = r.families.iter().map(|f| f.deps.clone()).collect();
    assert!(ds.contains(&vec![0]));
    assert!(ds.contains(&vec![1]));
    assert!(ds.contains(&vec![0, 1]));
    let tiles: usize = r.families.iter().map(|f| f.tiles.len()).sum();
    let distinct: std::collections::BTreeSet<_> =
        r.families.iter().flat_map(|f| f.tiles.iter()).collect();
    assert_eq!(tiles, distinct.len());
}

#[test]
fn fd_partition_of_single_dependence() {
    let r = fd_partition(&single(), &diamond(4), 2).unwrap();
    assert_eq!(r.families.len(), 1);
    assert_eq!(r.families[0].deps, vec![0]);
}

#[test]
fn tiled_destination_examples() {
    let id = vec![AffineFn::new(
        "S",
        "D",
        vec![vec![1, 0], vec![0, 1]],
        vec![0, 0],
    )];
    let r = tiled_destination_condition(
        &id,
        &TilingSpec::canonical("S", vec![4, 4]),
        &TilingSpec::canonical("D", vec![4, 4]),
    )
    .unwrap();
    assert!(r.overall);
    for t in &r.triples {
        if t.source_hyperplane == t.dest_hyperplane {
            assert_eq!(t.status, TripleStatus::Pass { m: rat(1) });
        } else {
            assert_eq!(t.status, TripleStatus::OrthogonalSkipped);
        }
    }

    let pass =
        tiled_destination_condition(&single(), &diamond(4), &TilingSpec::canonical("A", vec![2]))
            .unwrap();
    assert!(pass.overall);
    assert_eq!(pass.triples[0].dot, rat(2));
    assert_eq!(pass.triples[0].status, TripleStatus::Pass { m: rat(1) });

    let fail =
        tiled_destination_condition(&single(), &diamond(4), &TilingSpec::canonical("A", vec![3]))
            .unwrap();
    assert!(!fail.overall);
    assert_eq!(fail.triples[0].status, TripleStatus::Fail);
}
