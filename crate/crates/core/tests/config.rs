use absprox::experiments::named::NAMED;
use absprox::experiments::{run_config, ExperimentConfig, FunctionSpec, ReferenceSpec};
use absprox::{Algorithm, SetDescriptor};

#[test]
fn every_named_config_parses_for_every_gamma() {
    for e in NAMED {
        assert_eq!(e.configs().len(), e.gammas.len(), "{}", e.name);
        for (cfg, g) in e.configs().iter().zip(e.gammas) {
            assert_eq!(cfg.gamma0, *g, "{}", e.name);
        }
    }
}

#[test]
fn fb_with_set_uses_indicator_and_sign_matched_reference() {
    let cfg = ExperimentConfig::parse(
        "algorithm = fb\nfunction = hessian_example\nepsilon = 0.1\nset = ball(0,1)\nx0 = [-5,-1]\n\
         gamma0 = 0.1\na0 = 200\nschedule = psg_constant\nN = 30\nreference = sign_matched([0,1])\n",
    )
    .unwrap();
    assert_eq!(cfg.algorithm, Algorithm::Fb);
    assert_eq!(cfg.function, FunctionSpec::HessianExample);
    assert!(matches!(cfg.set, Some(SetDescriptor::Ball { radius, .. }) if radius == 1.0));
    assert!(matches!(cfg.reference, Some(ReferenceSpec::SignMatched(_))));
    let run = run_config(&cfg, false).unwrap();
    let x_star = run.reference.expect("reference resolved");
    assert!((x_star.norm() - 1.0).abs() <= 1e-12);
    assert!(run.result.records.iter().all(|r| r.x.norm() <= 1.0 + 1e-9 || r.n == 0));
}

#[test]
fn box_and_halfspace_sets() {
    let base = "algorithm = psg\nQ = [[1,0];[0,-1]]\nx0 = [3,3]\ngamma0 = 0.5\na0 = 20\na_f = 1\n\
                schedule = psg_constant\nN = 10\n";
    let boxed = ExperimentConfig::parse(&format!("{base}set = box([-1,-1],[1,2])\n")).unwrap();
    assert!(matches!(boxed.set, Some(SetDescriptor::Box { .. })));
    let half = ExperimentConfig::parse(&format!("{base}set = halfspace([1,1],0.5)\n")).unwrap();
    assert!(matches!(half.set, Some(SetDescriptor::Halfspace { .. })));
    for cfg in [boxed, half] {
        let run = run_config(&cfg, false).unwrap();
        let set = cfg.set.as_ref().unwrap();
        assert!(run.result.records.iter().skip(1).all(|r| set.contains(&r.x)));
    }
}

#[test]
fn rule_violations_are_all_collected() {
    let errs = ExperimentConfig::parse(
        "algorithm = ppa\nfunction = hessian_example\nset = ball(0,1)\nx0 = [1,2]\ngamma0 = 1\na0 = 1\n\
         schedule = psg_adaptive_v1\nN = many\n",
    )
    .unwrap_err();
    let text: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
    let joined = text.join("\n");
    assert!(joined.contains("epsilon"), "{joined}");
    assert!(joined.contains("a_const"), "{joined}");
    assert!(joined.contains("line 8"), "{joined}");
    assert!(errs.len() >= 4, "{joined}");
}

#[test]
fn psg_requires_a_set() {
    let errs = ExperimentConfig::parse(
        "algorithm = psg\nQ = [[1]]\nx0 = [1]\ngamma0 = 1\na0 = 5\nschedule = psg_constant\nN = 3\n",
    )
    .unwrap_err();
    assert!(errs.iter().any(|e| e.message.contains("set")));
}
