mod common;

use common::{circuit_strategy, fanout_free_bench, rewrite};
use ftmea_core::faultsim::simulate;
use ftmea_core::scoap::compute_scoap;
use ftmea_core::{NetId, NetSet, Netlist, SimVector};
use proptest::prelude::*;

proptest! {
    #[test]
    fn relabelling_and_reordering_preserve_scores(c in circuit_strategy(6, 3, 25)) {
        let n = c.netlist();
        let m = Netlist::parse_bench(&rewrite(&n, |s| format!("n_{s}"), None)).unwrap();
        let (a, b) = (compute_scoap(&n).unwrap(), compute_scoap(&m).unwrap());
        for id in n.nets() {
            let other = m.net_id(&format!("n_{}", n.net_name(id))).unwrap();
            prop_assert_eq!((a.cc0(id), a.cc1(id), a.co(id)), (b.cc0(other), b.cc1(other), b.co(other)));
        }
    }

    #[test]
    fn buffer_insertion_adds_one(c in circuit_strategy(6, 2, 25), pick in any::<usize>()) {
        let n = c.netlist();
        // Reconvergent fanout from x would feed x's own score back into side inputs.
        let reconverges = |x: NetId| {
            let reach = n.fanout_cone(&[x].into_iter().collect()).unwrap();
            n.gates().iter().any(|g| g.inputs.iter().filter(|i| reach.contains(**i)).count() > 1)
        };
        let candidates: Vec<NetId> = n
            .nets()
            .filter(|&x| !n.is_pseudo_output(x) && !n.fanout_gates(x).is_empty() && !reconverges(x))
            .collect();
        prop_assume!(!candidates.is_empty());
        let x = candidates[pick % candidates.len()];
        let m = Netlist::parse_bench(&rewrite(&n, |s| s.to_string(), Some(x))).unwrap();
        let (a, b) = (compute_scoap(&n).unwrap(), compute_scoap(&m).unwrap());
        let buf = m.net_id(&format!("{}__b", n.net_name(x))).unwrap();
        let x2 = m.net_id(n.net_name(x)).unwrap();
        prop_assert_eq!(b.cc0(buf), a.cc0(x) + 1);
        prop_assert_eq!(b.cc1(buf), a.cc1(x) + 1);
        prop_assert_eq!(b.co(buf), a.co(x));
        prop_assert_eq!(b.co(x2), a.co(x).map(|c| c + 1));
        for id in n.nets() {
            let id2 = m.net_id(n.net_name(id)).unwrap();
            prop_assert!(b.cc0(id2) >= a.cc0(id) && b.cc1(id2) >= a.cc1(id));
        }
    }

    #[test]
    fn observability_follows_structure(c in circuit_strategy(6, 3, 25)) {
        let n = c.netlist();
        let r = compute_scoap(&n).unwrap();
        let roots: NetSet = n.pseudo_outputs().iter().copied().collect();
        let observable = n.fanin_cone(&roots).unwrap();
        for id in n.nets() {
            prop_assert!(r.cc0(id) >= 1 && r.cc1(id) >= 1);
            prop_assert_eq!(r.co(id).is_some(), observable.contains(id));
            if n.is_pseudo_output(id) {
                prop_assert_eq!(r.co(id), Some(0));
            }
        }
    }

    #[test]
    fn fanout_free_nets_reach_both_values(
        kinds in prop::collection::vec(0usize..8, 1..10),
        arities in prop::collection::vec(2usize..=3, 10),
    ) {
        let n = Netlist::parse_bench(&fanout_free_bench(&kinds, &arities)).unwrap();
        prop_assume!(n.pseudo_inputs().len() <= 12);
        let r = compute_scoap(&n).unwrap();
        let mut seen = vec![[false; 2]; n.net_count()];
        for index in 0..(1u64 << n.pseudo_inputs().len()) {
            for (i, v) in simulate(&n, &SimVector::from_index(&n, index)).unwrap().into_iter().enumerate() {
                seen[i][usize::from(v)] = true;
            }
        }
        for id in n.nets() {
            prop_assert_eq!(seen[id.index()], [true, true], "{}", n.net_name(id));
            prop_assert!(r.co(id).is_some());
        }
        // Tree depth bounds every score from above.
        let bound = 3 * n.net_count() as u64;
        prop_assert!(n.nets().all(|id| r.cc0(id) <= bound && r.cc1(id) <= bound));
    }
}
