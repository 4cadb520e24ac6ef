//! Shipped fixtures: the three reference spaces, model spaces with twisted
//! cocycle atlases, injected-fault builders, and the morphism corpus for
//! the functor harness.

use std::collections::BTreeMap;

use crate::expr::Expr;
use crate::group::{sample_shift_group, LinkIso};
use crate::id::{ChartId, Sign, StratumId};
use crate::morphism::{
    cocycle_morphism, BasicModel, BasicModelMorphism, MorphismKinds, StratMorphism,
};
use crate::space::{cone_over, smooth_space, suspend, PresentedSpace, SmoothFactor};
use crate::tube::{separate_tubes, TMStructure};
use crate::unbend::{ProvTag, UnbendResult};
use crate::unfold::{HarnessCorpus, HarnessMorphism, HarnessSpace};

pub fn circle() -> PresentedSpace {
    smooth_space(&SmoothFactor::new("S1", 1, true))
}

/// The 0-length fixture: a compact surface.
pub fn smooth_m() -> PresentedSpace {
    smooth_space(&SmoothFactor::new("M", 2, true))
}

/// The suspension of the circle: two poles under one swept stratum,
/// compact, length 1.
pub fn sigma_s1() -> PresentedSpace {
    suspend(&circle()).expect("circle is compact")
}

/// The length-1 fixture: the open cone over the circle.
pub fn cone_s1() -> PresentedSpace {
    cone_over(&circle()).expect("circle is compact")
}

/// The length-2 fixture: the open cone over the suspended circle.
pub fn cone_sigma() -> PresentedSpace {
    cone_over(&sigma_s1()).expect("suspension is compact")
}

/// The three shipped reference spaces.
pub fn shipped() -> Vec<(&'static str, PresentedSpace)> {
    vec![
        ("smooth", smooth_m()),
        ("cone-s1", cone_s1()),
        ("cone-sigma", cone_sigma()),
    ]
}

/// Canonical separated structure of a space.
pub fn tm(space: &PresentedSpace) -> TMStructure {
    separate_tubes(space, &TMStructure::canonical(space))
}

/// The cone over the circle with a two-chart vertex tube twisted by the
/// order-two sample shift.
pub fn twisted_cone_z2() -> PresentedSpace {
    let mut space = cone_s1();
    let tube = space.tubes.get_mut(&StratumId::vertex()).unwrap();
    *tube = tube
        .clone()
        .with_twisted_atlas(sample_shift_group(circle().poset.ids(), 4));
    space
}

/// Same with the order-four shift group.
pub fn twisted_cone_z4() -> PresentedSpace {
    let mut space = cone_s1();
    let tube = space.tubes.get_mut(&StratumId::vertex()).unwrap();
    *tube = tube
        .clone()
        .with_twisted_atlas(sample_shift_group(circle().poset.ids(), 2));
    space
}

// ---------------------------------------------------------------------------
// injected faults
// ---------------------------------------------------------------------------

/// Fault: the vertex link is flagged non-compact.
pub fn fault_noncompact_link() -> PresentedSpace {
    let mut space = cone_s1();
    space.links.get_mut(&StratumId::vertex()).unwrap().compact = false;
    space
        .tubes
        .get_mut(&StratumId::vertex())
        .unwrap()
        .link
        .compact = false;
    space
}

/// Fault: non-comparable pole tubes share a footprint stratum and declare
/// no disjointness family.
pub fn fault_mather() -> (PresentedSpace, TMStructure) {
    let space = sigma_s1();
    let tm = TMStructure::canonical(&space);
    (space, tm)
}

/// Fault: a morphism that doubles the radium but claims to be a
/// tube-morphism.
pub fn fault_non_tm_morphism(space: &PresentedSpace) -> StratMorphism {
    let mut f = StratMorphism::identity(space);
    for local in f.locals.values_mut() {
        local.a3 = Expr::mul(Expr::constant(2.0), Expr::T);
    }
    f
}

/// Fault: remaps one positive copy tag of an unbending to a wrong target.
pub fn corrupt_provenance(result: &mut UnbendResult) {
    let desing = &mut result.desing;
    let targets: Vec<StratumId> = desing.target.poset.ids().cloned().collect();
    let keys: Vec<StratumId> = desing.provenance.keys().cloned().collect();
    for class in keys {
        let pieces = desing.provenance.get_mut(&class).unwrap();
        let copy = pieces
            .iter()
            .find(|(_, tag)| *tag == ProvTag::Copy(Sign::Plus))
            .cloned();
        if let Some((w, tag)) = copy {
            if let Some(other) = targets.iter().find(|t| **t != w) {
                pieces.remove(&(w, tag));
                pieces.insert(((*other).clone(), ProvTag::Copy(Sign::Plus)));
                return;
            }
        }
    }
}

/// Fault: the unbendable chart forgets the absolute value, so the signed
/// radium no longer projects to the radium.
pub fn corrupt_radium(result: &mut UnbendResult) {
    if let Some(square) = result.desing.chart_squares.first_mut() {
        square.c_hat.a3 = Expr::T;
    }
}

// ---------------------------------------------------------------------------
// morphism corpus
// ---------------------------------------------------------------------------

/// The embedding of the cone over the circle into the cone over the
/// suspension, through the swept stratum.
pub fn embedding_cone_to_cone_sigma() -> StratMorphism {
    let dom = cone_s1();
    let cod = cone_sigma();
    let swept = StratumId::swept(&StratumId::atom("S1"));
    let mut stratum_map = BTreeMap::new();
    stratum_map.insert(StratumId::vertex(), StratumId::vertex());
    stratum_map.insert(
        StratumId::body(&StratumId::atom("S1")),
        StratumId::body(&swept),
    );
    let link_map = LinkIso {
        stratum_map: BTreeMap::from([(StratumId::atom("S1"), swept)]),
        sample_perms: BTreeMap::new(),
        link_actions: BTreeMap::new(),
    };
    let mut actions = BTreeMap::new();
    actions.insert("embed".to_string(), link_map.clone());
    let local = BasicModelMorphism {
        domain: BasicModel::cone(0, dom.links[&StratumId::vertex()].clone()),
        codomain: BasicModel::cone(0, cod.links[&StratumId::vertex()].clone()),
        a1: vec![],
        a2: Expr::apply("embed", Expr::L),
        a3: Expr::T,
        actions,
    };
    let mut locals = BTreeMap::new();
    locals.insert(
        (StratumId::vertex(), ChartId::new("c0"), ChartId::new("c0")),
        local,
    );
    let mut link_isos = BTreeMap::new();
    link_isos.insert(StratumId::vertex(), link_map);
    StratMorphism {
        stratum_map,
        locals,
        kinds: MorphismKinds::thom_mather(),
        link_isos,
    }
}

/// The pole swap of the suspension, extended over the cone: a stratified
/// isomorphism exchanging the two length-1 singular strata.
pub fn pole_swap_on_cone_sigma() -> StratMorphism {
    let space = cone_sigma();
    let sigma = sigma_s1();
    let mut f = StratMorphism::identity(&space);
    let p = StratumId::body(&StratumId::pole(true));
    let m = StratumId::body(&StratumId::pole(false));
    f.stratum_map.insert(p.clone(), m.clone());
    f.stratum_map.insert(m, p);
    // the vertex link action swaps the poles of the suspension
    let swap = LinkIso {
        stratum_map: BTreeMap::from([
            (StratumId::pole(true), StratumId::pole(false)),
            (StratumId::pole(false), StratumId::pole(true)),
            (
                StratumId::swept(&StratumId::atom("S1")),
                StratumId::swept(&StratumId::atom("S1")),
            ),
        ]),
        sample_perms: BTreeMap::new(),
        link_actions: BTreeMap::new(),
    };
    let mut actions = BTreeMap::new();
    actions.insert("swap".to_string(), swap.clone());
    let model = BasicModel::cone(0, sigma);
    f.locals.insert(
        (StratumId::vertex(), ChartId::new("c0"), ChartId::new("c0")),
        BasicModelMorphism {
            domain: model.clone(),
            codomain: model,
            a1: vec![],
            a2: Expr::apply("swap", Expr::L),
            a3: Expr::T,
            actions,
        },
    );
    f.link_isos.insert(StratumId::vertex(), swap);
    f
}

/// The morphism corpus of the functor harness: the cyclic cocycle
/// morphisms of the twisted models, identities, the pole swap, and the
/// cross-space embedding, with well over twenty composable Thom-Mather
/// pairs plus one excluded non-Thom-Mather morphism.
pub fn harness_corpus() -> HarnessCorpus {
    let cone = cone_s1();
    let cone4 = twisted_cone_z4();
    let sigma_cone = cone_sigma();
    let spaces = vec![
        HarnessSpace {
            name: "cone-s1".into(),
            space: cone.clone(),
            tm: tm(&cone),
        },
        HarnessSpace {
            name: "cone-s1-z4".into(),
            space: cone4.clone(),
            tm: tm(&cone4),
        },
        HarnessSpace {
            name: "cone-sigma".into(),
            space: sigma_cone.clone(),
            tm: tm(&sigma_cone),
        },
    ];

    let mut morphisms = Vec::new();
    // the order-two twist on the plain cone
    let z2 = sample_shift_group(circle().poset.ids(), 4);
    for (i, g) in z2.elements.iter().enumerate() {
        morphisms.push(HarnessMorphism {
            name: format!("z2-{i}"),
            dom: 0,
            cod: 0,
            morphism: cocycle_morphism(&cone, &StratumId::vertex(), "g", g).unwrap(),
        });
    }
    // the order-four twists on the twisted model
    let z4 = sample_shift_group(circle().poset.ids(), 2);
    for (i, g) in z4.elements.iter().enumerate() {
        morphisms.push(HarnessMorphism {
            name: format!("z4-{i}"),
            dom: 1,
            cod: 1,
            morphism: cocycle_morphism(&cone4, &StratumId::vertex(), "g", g).unwrap(),
        });
    }
    let embed_index = morphisms.len();
    morphisms.push(HarnessMorphism {
        name: "embed".into(),
        dom: 0,
        cod: 2,
        morphism: embedding_cone_to_cone_sigma(),
    });
    let swap_index = morphisms.len();
    morphisms.push(HarnessMorphism {
        name: "pole-swap".into(),
        dom: 2,
        cod: 2,
        morphism: pole_swap_on_cone_sigma(),
    });
    let bad_index = morphisms.len();
    morphisms.push(HarnessMorphism {
        name: "double-r".into(),
        dom: 0,
        cod: 0,
        morphism: {
            let mut m = fault_non_tm_morphism(&cone);
            m.kinds.thom_mather = false;
            m.kinds.tube_morphism = false;
            m
        },
    });

    let mut pairs = Vec::new();
    for g in 0..2 {
        for f in 0..2 {
            pairs.push((g, f)); // Z/2 x Z/2 on the plain cone
        }
    }
    for g in 2..6 {
        for f in 2..6 {
            pairs.push((g, f)); // Z/4 x Z/4 on the twisted cone
        }
    }
    pairs.push((embed_index, 0));
    pairs.push((embed_index, 1));
    pairs.push((swap_index, embed_index));
    pairs.push((swap_index, swap_index));
    pairs.push((bad_index, 0)); // excluded: not Thom-Mather
    HarnessCorpus {
        spaces,
        morphisms,
        pairs,
    }
}
