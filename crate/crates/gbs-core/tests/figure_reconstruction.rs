//! The triangle with integral modulus and finite labeled graph space:
//! one slide move is available, its only continuation is its reverse, and
//! no edge is mobile.

use gbs_core::gen::valid_single_slides;
use gbs_core::graph::{GeometricEdgeSpec, LabeledGraph};
use gbs_core::mobility::{enumerate_lg_no_mobile, has_finite_lg};

fn triangle() -> LabeledGraph {
    let spec = |id: &str, from: &str, to: &str, lf: i64, lt: i64| GeometricEdgeSpec {
        id: id.into(),
        from: from.into(),
        to: to.into(),
        label_from: lf.into(),
        label_to: lt.into(),
    };
    LabeledGraph::new(
        vec!["u".into(), "v".into(), "w".into()],
        vec![
            spec("uw", "u", "w", 2, 18),
            spec("uv", "u", "v", 4, 18),
            spec("wv", "w", "v", 24, 24),
        ],
    )
    .unwrap()
}

#[test]
fn one_slide_then_only_its_reverse() {
    let g = triangle();
    let slides = valid_single_slides(&g);
    assert_eq!(slides.len(), 1, "exactly one slide move: {:?}", slides);
    let (e, over) = slides[0];
    assert_eq!(g.edge_name(e), "uv");
    assert_eq!(g.edge_name(over), "uw");
    let h = gbs_core::moves::slide(&g, e, &gbs_core::graph::EdgePath(vec![over])).unwrap();
    let back = valid_single_slides(&h);
    assert_eq!(back.len(), 1, "only the reverse slide remains: {:?}", back);
    assert_eq!(h.edge_name(back[0].0), "uv");
}

#[test]
fn finite_space_with_integral_modulus() {
    let g = triangle();
    match gbs_core::modular::modulus_generator(&g).unwrap() {
        gbs_core::modular::ModulusGenerator::Cycle { q, .. } => {
            assert_eq!(q, gbs_core::num::BigRational::from(gbs_core::num::BigInt::from(2)));
        }
        _ => panic!("triangle has Betti number one"),
    }
    assert!(has_finite_lg(&g).unwrap());
    assert_eq!(enumerate_lg_no_mobile(&g).unwrap().len(), 2);
}
