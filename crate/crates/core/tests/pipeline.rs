use std::collections::HashMap;

use proptest::prelude::*;

use media_core::arrangements::{
    arrangement_medium, enumerate_regions, region_adjacency, Arrangement,
};
use media_core::lin_orders::linear_medium;
use media_core::pcube::{
    graph_to_medium, is_partial_cube, media_isomorphic, medium_graph, LabeledGraph, PartialCube,
};
use media_core::representation::{decide_medium, verify_embedding};
use media_core::wg_sets::{family_to_medium, SetFamily};
use media_core::{BitSet, TokenSystem};

fn names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect()
}

fn family(n: usize, masks: &[u32]) -> SetFamily {
    let sets = masks
        .iter()
        .map(|&m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect();
    SetFamily::new(names(n), sets).unwrap()
}

/// Well-graded families on `n` elements grown by unit steps.
fn well_graded(n: usize) -> impl Strategy<Value = SetFamily> {
    (
        0u32..1 << n,
        prop::collection::vec((any::<prop::sample::Index>(), 0..n), 1..24),
    )
        .prop_map(move |(start, steps)| {
            let mut masks = vec![start];
            for (pick, bit) in steps {
                let next = masks[pick.index(masks.len())] ^ (1 << bit);
                if masks.contains(&next) {
                    continue;
                }
                masks.push(next);
                if !family(n, &masks).is_well_graded() {
                    masks.pop();
                }
            }
            family(n, &masks)
        })
}

#[test]
fn reducing_the_four_cube_to_a_chain() {
    let cube = family_to_medium(&SetFamily::power_set(names(4)).unwrap()).unwrap();
    let chain = ["{}", "{a}", "{a,b}", "{a,b,c}", "{a,b,c,d}"];
    let subset: Vec<usize> = chain.iter().map(|s| cube.state_id(s).unwrap()).collect();
    let red = cube.reduce_with_map(&subset).unwrap();
    assert_eq!(red.system.n_states(), 5);
    assert_eq!(red.system.n_tokens(), 8);
    assert!(decide_medium(&red.system).is_medium());
    let direct = family_to_medium(&family(4, &[0, 1, 3, 7, 15])).unwrap();
    assert!(media_isomorphic(&red.system, &direct).unwrap().is_some());
}

fn embed(sub: &TokenSystem, big: &TokenSystem) -> (Vec<usize>, Vec<usize>) {
    let alpha = (0..sub.n_states())
        .map(|s| big.state_id(sub.state_name(s)).unwrap())
        .collect();
    let beta = (0..sub.n_tokens())
        .map(|t| big.token_id(sub.token_name(t)).unwrap())
        .collect();
    (alpha, beta)
}

#[test]
fn subcube_embeds_but_chain_does_not() {
    let cube = family_to_medium(&SetFamily::power_set(names(3)).unwrap()).unwrap();
    let square = family_to_medium(&family(3, &[0, 1, 2, 3])).unwrap();
    let (alpha, beta) = embed(&square, &cube);
    let check = verify_embedding(&square, &cube, &alpha, &beta).unwrap();
    assert!(check.embedding && check.reduction_isomorphic);

    // `+b` fixes `{}` in the chain but not in the cube.
    let chain = family_to_medium(&family(3, &[0, 1, 3, 7])).unwrap();
    let (alpha, beta) = embed(&chain, &cube);
    assert!(
        !verify_embedding(&chain, &cube, &alpha, &beta)
            .unwrap()
            .embedding
    );
}

#[test]
fn theta_classes_carry_one_token_pair() {
    let arr = Arrangement::from_ints(&[(1, 0, 0), (0, 1, 0), (1, 1, -1), (1, -1, 2)]).unwrap();
    let regions = enumerate_regions(&arr).unwrap();
    let ts = arrangement_medium(&arr, &regions).unwrap();
    for g in [
        medium_graph(&ts),
        medium_graph(&linear_medium(4).unwrap().system),
    ] {
        let PartialCube::Accept(lab) = is_partial_cube(&g).unwrap() else {
            panic!("medium graph rejected");
        };
        let labels = g.edge_labels.as_ref().unwrap();
        for class in &lab.classes {
            let key = |e: usize| {
                let mut pair = [labels[e].0.clone(), labels[e].1.clone()];
                pair.sort();
                pair
            };
            assert!(class.iter().all(|&e| key(e) == key(class[0])));
        }
    }
}

#[test]
fn region_graph_matches_medium_graph() {
    let arr = Arrangement::from_ints(&[(1, 0, 0), (0, 1, 0), (1, 1, 0), (1, 2, -3)]).unwrap();
    let regions = enumerate_regions(&arr).unwrap();
    let g = region_adjacency(&arr, &regions).unwrap();
    let ts = arrangement_medium(&arr, &regions).unwrap();
    assert_eq!(g.edges(), medium_graph(&ts).edges());
    let back = graph_to_medium(&g).unwrap();
    assert!(media_isomorphic(&ts, &back).unwrap().is_some());
}

#[test]
fn hexagon_antipodes_are_three_apart() {
    let g = LabeledGraph::parse_edge_list("1 2\n2 3\n3 4\n4 5\n5 6\n6 1\n").unwrap();
    let PartialCube::Accept(lab) = is_partial_cube(&g).unwrap() else {
        panic!("C6 rejected");
    };
    assert_eq!(lab.classes.len(), 3);
    let f = SetFamily::new(lab.labels.ground.clone(), lab.labels.sets.clone()).unwrap();
    assert!(f.is_well_graded());
    for u in 0..6 {
        let d = g.bfs(u);
        for v in 0..6 {
            assert_eq!(
                d[v] as usize,
                lab.labels.sets[u].distance(&lab.labels.sets[v])
            );
        }
    }
}

#[test]
fn json_round_trips() {
    let ts = linear_medium(3).unwrap().system;
    let text = serde_json::to_string(&ts.to_json()).unwrap();
    assert!(TokenSystem::from_json_str(&text).unwrap().same_as(&ts));

    let f = family(3, &[0, 1, 3, 5]);
    let text = serde_json::to_string(&f.to_json()).unwrap();
    assert_eq!(SetFamily::from_json_str(&text).unwrap(), f);

    let g = medium_graph(&ts);
    let text = serde_json::to_string(&g.to_json()).unwrap();
    let back = LabeledGraph::from_json_str(&text).unwrap();
    assert_eq!(back.vertices(), g.vertices());
    assert_eq!(back.edges(), g.edges());

    let arr = Arrangement::from_ints(&[(2, 4, 1), (0, 3, -6)]).unwrap();
    let text = serde_json::to_string(&arr.to_json()).unwrap();
    assert_eq!(Arrangement::from_json_str(&text).unwrap(), arr);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn straight_messages_are_geodesics(f in well_graded(5)) {
        prop_assume!(f.len() >= 2);
        let ts = family_to_medium(&f).unwrap();
        let g = medium_graph(&ts);
        let sets: HashMap<&str, &BitSet> = f.sets().iter().map(|s| (ts.state_name(f.index_of(s).unwrap()), s)).collect();
        for s in 0..ts.n_states() {
            let d = g.bfs(s);
            for v in 0..ts.n_states() {
                if s == v {
                    continue;
                }
                let m = ts.straight_message(s, v).unwrap().expect("media have straight messages");
                prop_assert_eq!(ts.apply(s, &m).unwrap(), v);
                prop_assert_eq!(m.content().len(), m.len());
                prop_assert_eq!(m.len(), d[v] as usize);
                prop_assert_eq!(m.len(), sets[ts.state_name(s)].distance(sets[ts.state_name(v)]));
            }
        }
    }

    #[test]
    fn media_survive_the_graph_round_trip(f in well_graded(5)) {
        prop_assume!(f.len() >= 2);
        let ts = family_to_medium(&f).unwrap();
        let m = decide_medium(&ts).medium().expect("well-graded families give media");
        let back = graph_to_medium(m.graph()).unwrap();
        prop_assert!(media_isomorphic(&ts, &back).unwrap().is_some());
    }
}
