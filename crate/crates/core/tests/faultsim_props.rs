mod common;

use common::circuit_strategy;
use ftmea_core::faultsim::{all_stuck_at_sites, attack_toggle_campaign, fault_campaign};
use ftmea_core::{NetId, NetSet, VectorSource};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn campaigns_are_structurally_sound(
        c in circuit_strategy(6, 3, 20),
        monitored in prop::collection::vec(any::<usize>(), 1..3),
        attack in prop::collection::vec(any::<usize>(), 0..3),
    ) {
        let n = c.netlist();
        let monitored: NetSet = monitored.iter().map(|r| NetId((r % n.net_count()) as u32)).collect();
        let coi = n.fanin_cone(&monitored).unwrap();
        let r = fault_campaign(&n, &monitored, &all_stuck_at_sites(&n), VectorSource::Exhaustive).unwrap();
        prop_assert!(r.affecting_sites.iter().all(|s| coi.contains(s.net)));
        // Every monitored net has at least one observable stuck-at polarity.
        for &m in &monitored {
            let caught = [ftmea_core::Polarity::StuckAt0, ftmea_core::Polarity::StuckAt1]
                .iter()
                .filter(|&&polarity| r.affecting_sites.contains(&ftmea_core::FaultSite { net: m, polarity }))
                .count();
            prop_assert!(caught >= 1);
        }

        let pis = n.pseudo_inputs();
        let attack: NetSet = attack.iter().map(|r| pis[r % pis.len()]).collect();
        let t = attack_toggle_campaign(&n, &attack, VectorSource::Exhaustive).unwrap();
        prop_assert!(t.toggleable_nets.is_subset(&n.fanout_cone(&attack).unwrap()));
        prop_assert!(attack.is_subset(&t.toggleable_nets));
    }

    #[test]
    fn sampled_campaigns_reproduce_and_under_approximate(
        c in circuit_strategy(6, 3, 20),
        seed in any::<u64>(),
        count in 1u64..200,
    ) {
        let n = c.netlist();
        let monitored: NetSet = n.primary_outputs().iter().copied().collect();
        let sites = all_stuck_at_sites(&n);
        let src = VectorSource::Sampled { seed, count };
        let a = fault_campaign(&n, &monitored, &sites, src).unwrap();
        prop_assert_eq!(&a, &fault_campaign(&n, &monitored, &sites, src).unwrap());
        prop_assert_eq!(a.vectors_evaluated, count);
        let full = fault_campaign(&n, &monitored, &sites, VectorSource::Exhaustive).unwrap();
        prop_assert!(a.affecting_sites.is_subset(&full.affecting_sites));
    }
}
