use stickkit::feasibility::{check_order, Model};
use stickkit::reduce_sat::*;

mod common;
use common::sat_fixtures as fixtures;

#[test]
fn soundness_on_fixtures() {
    for inst in fixtures() {
        let art = build_reduction(&inst).unwrap();
        assert_eq!(art.counts.vertices, vertex_count_formula(inst.n, inst.m()));
        let mut valid = 0;
        for mask in 0u32..1 << inst.n {
            let asg = Assignment((0..inst.n).map(|i| mask >> i & 1 == 1).collect());
            let ok = inst.check_assignment(&asg).is_ok();
            for alt in [false, true] {
                match witness_order_with(&art, &asg, alt) {
                    Ok(o) => {
                        assert!(ok);
                        let rep = check_order(&art.graph, &o, Model::Stick).unwrap();
                        let names: Vec<String> = rep.violations.iter().take(6).map(|v| format!("{}-{} {:?}", art.graph.label(v.first), art.graph.label(v.second), v.kind)).collect();
                        assert!(rep.feasible, "{:?} {asg}: {names:?}", inst.clauses);
                        assert_eq!(decode_assignment(&art, &o).unwrap(), asg);
                    }
                    Err(e) => {
                        assert!(!ok, "{e}");
                        assert!(matches!(e, ReduceError::NotOneInThree { .. }));
                    }
                }
            }
            valid += ok as usize;
        }
        eprintln!("{:?}: |V|={} |E|={} incidental={} valid={valid}", inst.clauses, art.counts.vertices, art.counts.edges, art.counts.incidental_edges);
    }
}
