//! Page-level oracles: `E^{r+1} ≅ H(E^r, d^r)`, `d^r∘d^r = 0`, `E^1` as the
//! homology of the graded pieces, `E^∞` against graded homology, and the
//! `E^2` term of a fibration over `S²`.

use std::sync::Arc;

use common::{graded_piece, page_homology, page_matrix};
use num_traits::Zero;
use spectra::chain::homology;
use spectra::file::FilteredComplexFile;
use spectra::scenario::{build_scenario, twisted_circle_bundle_equivalence};
use spectra::{make_filtered, ChainComplex, Combination, Component, FilteredComplex, FiltrationFn, Key};

mod common;

const MAX_R: i32 = 5;
const MAX_N: i32 = 5;

fn z() -> Component {
    Component::Free
}

fn zm(m: i64) -> Component {
    Component::Torsion(m.into())
}

fn effective_scenarios() -> Vec<(&'static str, FilteredComplex)> {
    let hopf = build_scenario("hopf").unwrap();
    vec![("s2-kz2", build_scenario("s2-kz2").unwrap()), ("hopf (effective)", hopf.engine().unwrap().clone())]
}

#[test]
fn page_recurrence() {
    for (name, fc) in effective_scenarios() {
        for r in 1..=MAX_R {
            for n in 0..=MAX_N {
                for p in 0..=n {
                    let next = fc.page_group(r + 1, p, n - p).unwrap().components();
                    assert_eq!(next, page_homology(&fc, r, p, n - p), "{name}: E^{}_{{{p},{}}}", r + 1, n - p);
                }
            }
        }
    }
}

#[test]
fn page_differentials_square_to_zero() {
    for (name, fc) in effective_scenarios() {
        for r in 1..=MAX_R {
            for n in 0..=MAX_N {
                for p in 0..=n {
                    let q = n - p;
                    let (_, first) = page_matrix(&fc, r, p, q);
                    for (i, v) in first.iter().enumerate() {
                        let dd = fc.page_differential(r, p - r, q + r - 1, v).unwrap();
                        assert!(
                            dd.iter().all(Zero::is_zero),
                            "{name}: d^{r} d^{r} on generator {i} of E^{r}_{{{p},{q}}}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn first_page_is_homology_of_graded_pieces() {
    for (name, fc) in effective_scenarios() {
        for n in 0..=MAX_N {
            for p in 0..=n {
                let gr = graded_piece(fc.complex(), fc.flin_fn(), p);
                let h = homology(&gr, n).unwrap().invariant_factors();
                assert_eq!(fc.page_group(1, p, n - p).unwrap().components(), h, "{name}: E^1_{{{p},{}}}", n - p);
            }
        }
    }
}

#[test]
fn infinity_page_is_graded_homology() {
    for (name, fc) in effective_scenarios() {
        for n in 0..=4 {
            let report = fc.e_infinity_check(n).unwrap();
            assert!(report.agrees, "{name} degree {n}: {:?}", report.pieces);
        }
    }
}

type Fibre<'a> = &'a dyn Fn(i32) -> Vec<Component>;

/// `E²_{p,q} = H_p(S²) ⊗ H_q(F)` for a fibration over the simply connected `S²`.
fn serre_e2(fibre: impl Fn(i32) -> Vec<Component>, p: i32, q: i32) -> Vec<Component> {
    if p == 0 || p == 2 {
        fibre(q)
    } else {
        Vec::new()
    }
}

#[test]
fn second_page_matches_fibre_homology() {
    let circle = |q: i32| if q <= 1 { vec![z()] } else { Vec::new() };
    let rp_infinity = |q: i32| match q {
        0 => vec![z()],
        q if q % 2 == 1 => vec![zm(2)],
        _ => Vec::new(),
    };
    let cases: [(&str, Fibre); 3] = [("hopf", &circle), ("p3r", &circle), ("s2-kz2", &rp_infinity)];
    for (name, fibre) in cases {
        let fc = build_scenario(name).unwrap();
        for n in 0..=MAX_N {
            for p in 0..=n {
                assert_eq!(
                    fc.page_group(2, p, n - p).unwrap().components(),
                    serre_e2(fibre, p, n - p),
                    "{name}: E^2_{{{p},{}}}",
                    n - p
                );
            }
        }
    }
}

/// Sum of the `E^∞` pieces in degree `n`, as an unordered multiset.
fn infinity_total(fc: &FilteredComplex, n: i32) -> Vec<Component> {
    let r = fc.stable_page(n).unwrap();
    let mut all: Vec<Component> = (0..=n).flat_map(|p| fc.page_group(r, p, n - p).unwrap().components()).collect();
    all.sort();
    all
}

#[test]
fn total_spaces() {
    let s3 = [vec![z()], vec![], vec![], vec![z()], vec![]];
    let p3 = [vec![z()], vec![zm(2)], vec![], vec![z()], vec![]];
    for (name, expected) in [("hopf", s3), ("p3r", p3)] {
        let fc = build_scenario(name).unwrap();
        let (_, e) = twisted_circle_bundle_equivalence(if name == "hopf" { 1 } else { 2 }).unwrap();
        for (n, h) in expected.iter().enumerate() {
            let n = n as i32;
            assert_eq!(&infinity_total(&fc, n), h, "{name}: E^∞ in degree {n}");
            assert_eq!(&homology(e.rbcc(), n).unwrap().invariant_factors(), h, "{name}: H_{n}");
        }
    }
}

#[test]
fn truncated_hopf_complex() {
    // Below degree 3 the Hopf total space is acyclic: every E^3 entry with
    // 0 < p + q ≤ 2 vanishes and E^3_{0,0} = Z.
    let fc = build_scenario("hopf").unwrap();
    for n in 0..=2 {
        for p in 0..=n {
            let expected = if n == 0 { vec![z()] } else { Vec::new() };
            assert_eq!(fc.page_group(3, p, n - p).unwrap().components(), expected, "E^3_{{{p},{}}}", n - p);
        }
    }
}

const SMALL: &str = r#"{
    "degrees": {"0": ["v", "w"], "1": ["a", "b", "c"], "2": ["t"]},
    "differential": {"1:a": [[1, "w"], [-1, "v"]], "1:b": [[1, "w"], [-1, "v"]], "1:c": [[2, "w"], [-2, "v"]],
                     "2:t": [[2, "a"], [-2, "b"]]},
    "filtration": {"v": 0, "w": 1, "a": 1, "b": 2, "c": 2, "t": 3}
}"#;

#[test]
fn file_and_programmatic_complexes_agree() {
    let from_file = FilteredComplexFile::from_json(SMALL).unwrap().build("file").unwrap();
    let names = |xs: &[&str]| xs.iter().map(|s| Key::atom(s)).collect::<Vec<_>>();
    let c = ChainComplex::builder("code", |n, g| {
        let k = |s: &str| Key::atom(s);
        match (n, g.to_string().as_str()) {
            (1, "a") | (1, "b") => Combination::from_terms(0, [(1, k("w")), (-1, k("v"))]),
            (1, "c") => Combination::from_terms(0, [(2, k("w")), (-2, k("v"))]),
            (2, "t") => Combination::from_terms(1, [(2, k("a")), (-2, k("b"))]),
            _ => Combination::zero(n - 1),
        }
    })
    .basis(move |n| match n {
        0 => names(&["v", "w"]),
        1 => names(&["a", "b", "c"]),
        2 => names(&["t"]),
        _ => Vec::new(),
    })
    .build();
    let flin: FiltrationFn = Arc::new(|_, g| match g.to_string().as_str() {
        "v" => 0,
        "w" | "a" => 1,
        "b" | "c" => 2,
        _ => 3,
    });
    let from_code = make_filtered(&c, flin, "code").unwrap();
    for r in 1..=4 {
        for n in 0..=2 {
            for p in 0..=3 {
                let a = from_file.page_group(r, p, n - p).unwrap();
                let b = from_code.page_group(r, p, n - p).unwrap();
                assert_eq!(a.presentation, b.presentation, "E^{r}_{{{p},{}}}", n - p);
            }
        }
        assert_eq!(from_file.convergence_level(1).unwrap(), from_code.convergence_level(1).unwrap());
    }
    assert_eq!(homology(from_file.complex(), 1).unwrap().invariant_factors(), vec![zm(2), z()]);
}
