//! Regenerates the committed fixture documents; run explicitly with
//! `cargo test -p strata-core --test regen_fixtures -- --ignored`.

use strata_core::doc::{serialize_expr, serialize_morphism, serialize_space, MorphDocument, SpaceDocument};
use strata_core::fixtures;
use strata_core::id::StratumId;
use strata_core::morphism::cocycle_morphism;
use strata_core::space::StratSpaceExpr;
use strata_core::tube::TMStructure;
use strata_core::unbend::space_with_tubes;

fn presented_doc(space: &strata_core::space::PresentedSpace) -> SpaceDocument {
    let tm = fixtures::tm(space);
    SpaceDocument::Presented {
        space: space_with_tubes(space, &tm),
        nesting: tm.nesting,
        families: tm.families,
    }
}

#[test]
#[ignore]
fn regenerate_fixture_files() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");
    std::fs::create_dir_all(dir).unwrap();
    let write = |name: &str, text: String| {
        std::fs::write(format!("{dir}/{name}"), text).unwrap();
    };

    // expression documents for the constructive fixtures
    write(
        "smooth.space",
        serialize_expr(&StratSpaceExpr::smooth("M", 2, true)),
    );
    write(
        "cone_s1.space",
        serialize_expr(&StratSpaceExpr::cone(StratSpaceExpr::smooth("S1", 1, true))),
    );

    // presented documents for the suspension shapes
    let sigma = fixtures::sigma_s1();
    let tm = fixtures::tm(&sigma);
    write("sigma_s1.space", serialize_space(&sigma, &tm));
    let cone_sigma = fixtures::cone_sigma();
    write(
        "cone_sigma.space",
        serialize_space(&cone_sigma, &fixtures::tm(&cone_sigma)),
    );

    // injected faults
    let broken = fixtures::fault_noncompact_link();
    write(
        "broken_link.space",
        serialize_space(&broken, &TMStructure::canonical(&broken)),
    );
    let (mather_space, mather_tm) = fixtures::fault_mather();
    write(
        "mather.space",
        serialize_space(&mather_space, &mather_tm),
    );

    // morphism documents: a cocycle twist and a radium-doubling fault
    let cone = fixtures::cone_s1();
    let g = strata_core::group::sample_shift_group(fixtures::circle().poset.ids(), 4).elements
        [1]
    .clone();
    let phi = cocycle_morphism(&cone, &StratumId::vertex(), "g", &g).unwrap();
    write(
        "cocycle.morph",
        serialize_morphism(&MorphDocument {
            domain: presented_doc(&cone),
            codomain: presented_doc(&cone),
            morphism: phi,
        }),
    );
    let embed = fixtures::embedding_cone_to_cone_sigma();
    write(
        "embed.morph",
        serialize_morphism(&MorphDocument {
            domain: presented_doc(&cone),
            codomain: presented_doc(&fixtures::cone_sigma()),
            morphism: embed,
        }),
    );
    let bad = fixtures::fault_non_tm_morphism(&cone);
    write(
        "double_radium.morph",
        serialize_morphism(&MorphDocument {
            domain: presented_doc(&cone),
            codomain: presented_doc(&cone),
            morphism: bad,
        }),
    );
}
