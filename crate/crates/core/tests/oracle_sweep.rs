use itertools::Itertools;
use stickkit::feasibility::{check_order, Model, VertexOrder};
use stickkit::geometry::{realize, verify_geometry};
use stickkit::graph::{families, Graph};
use stickkit::recognizer::{brute_force_oracle, enumerate_representations, oracle_reaches, recognize, GraphClass, SearchOptions, Verdict};

fn feasible_orders_by_kernel(g: &Graph, model: Model) -> Vec<Vec<usize>> {
    (0..g.len())
        .permutations(g.len())
        .filter(|p| check_order(g, &VertexOrder::from_sequence(p.clone()).unwrap(), model).unwrap().feasible)
        .collect()
}

fn sweep(graphs: &[Graph], class: GraphClass) {
    let model = class.model();
    for g in graphs {
        let mut orders = Vec::new();
        for p in (0..g.len()).permutations(g.len()) {
            let order = VertexOrder::from_sequence(p.clone()).unwrap();
            let kernel = check_order(g, &order, model).unwrap();
            let mut nodes = 0;
            let oracle = oracle_reaches(g, &order, model, &mut nodes);
            assert_eq!(kernel.feasible, oracle.is_some(), "order {p:?} of\n{}", g.to_text());
            if let Some(r) = kernel.reaches {
                let geom = realize(g, &order, &r, model).unwrap();
                let check = verify_geometry(&geom, g).unwrap();
                assert!(check.matches && check.touchings.is_empty());
                orders.push(p);
            }
        }
        let rep = enumerate_representations(g, class, &SearchOptions::default(), None).unwrap();
        assert!(rep.complete);
        assert_eq!(rep.orders, orders, "enumeration of\n{}", g.to_text());
        let fast = recognize(g, class, &SearchOptions::default()).unwrap();
        let slow = brute_force_oracle(g, class).unwrap();
        assert_eq!(fast.verdict, slow.verdict);
        assert_ne!(fast.verdict, Verdict::Exhausted);
    }
}

#[test]
fn stick_orders_match_oracle_up_to_five() {
    for n in 1..=5 {
        sweep(&families::labeled_connected_bipartite(n), GraphClass::Stick);
    }
}

#[test]
fn hook_orders_match_oracle_up_to_four() {
    for n in 1..=4 {
        sweep(&families::all_graphs(n), GraphClass::Mpt);
    }
}

#[test]
fn kernel_orders_are_sorted_permutations() {
    let g = families::even_cycle(2);
    let orders = feasible_orders_by_kernel(&g, Model::Stick);
    let rep = enumerate_representations(&g, GraphClass::Stick, &SearchOptions::default(), None).unwrap();
    assert_eq!(rep.orders, orders);
}
