use bsr_core::ground::{instantiate_base_var, unbound_base_var};
use bsr_core::testgen::{random_problem, GenConfig};
use bsr_core::{ap_classes, inst_points, is_normal_form, normalize, parse, purify};
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn single_variable_steps_keep_classes_and_points() {
    let mut rng = StdRng::seed_from_u64(310);
    let mut steps_taken = 0;
    let mut sets = 0;
    while sets < 60 {
        let text = random_problem(&mut rng, &GenConfig::default());
        let set = normalize(&purify(&parse(&text).unwrap())).unwrap();
        assert!(is_normal_form(&set).0);
        let classes = ap_classes(&set);
        let points = inst_points(&set, &classes);
        if unbound_base_var(&set, &classes).is_none() {
            continue;
        }
        sets += 1;
        let mut cur = set.clone();
        while let Some((i, v)) = unbound_base_var(&cur, &ap_classes(&cur)) {
            let cls = ap_classes(&cur);
            let pts = inst_points(&cur, &cls);
            cur = instantiate_base_var(&cur, &cls, &pts, i, &v);
            steps_taken += 1;
            assert_eq!(ap_classes(&cur), classes, "{}", text);
            assert_eq!(cur.bconsts(), set.bconsts(), "{}", text);
            assert_eq!(cur.fconsts(), set.fconsts(), "{}", text);
            assert_eq!(inst_points(&cur, &ap_classes(&cur)), points, "{}", text);
        }
    }
    assert!(steps_taken >= 60);
}
