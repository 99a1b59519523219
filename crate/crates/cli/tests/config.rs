use deadcore_cli::ExperimentConfig;
use proptest::prelude::*;

const FULL: &str = "
[run]
seed = 7
out = results/a

[problem]
n = 2
p = 3
gamma = 1
m = 0.5
lambda0 = 1.5
boundary = cos_theta
value = 0.1
core_radius = 0.3

[grid]
shape = ball
radius = 2
cells_per_radius = 40
pad = 3

[solver]
scheme = dpp_iter
eps_g = 1e-6
tol = 1e-10
eps_dpp = 0.1

[radial]
n = 1, 2
p = 2
gamma = -0.5, 0
m =
m_fraction = 0.25, 0.5

[analyze]
source = profile
anchor = 0.3, 0
radii = 0.05, 0.1

[game]
max_steps = 1000
x0 = 0.1, 0.2

[liouville]
mode = growth
s = 1

[sweep]
cells = 16, 32
";

#[test]
fn full_config_round_trips() {
    let a = ExperimentConfig::parse(FULL).unwrap();
    let text = a.to_ini_string();
    let b = ExperimentConfig::parse(&text).unwrap();
    assert_eq!(a, b);
    assert_eq!(text, b.to_ini_string());
    assert_eq!(b.solver.eps_g, Some(1e-6));
    assert!(b.radial.unwrap().m.is_empty());
}

#[test]
fn defaults_are_written_out() {
    let a = ExperimentConfig::parse("[sweep]\n").unwrap();
    let text = a.to_ini_string();
    assert!(text.contains("cells=32, 64, 128") || text.contains("cells = 32, 64, 128"), "{text}");
    assert!(text.contains("[solver]"));
}

proptest! {
    #[test]
    fn numeric_fields_round_trip(
        seed in any::<u64>(),
        p in 1.0f64..1e6,
        gamma in -0.999f64..50.0,
        lambda0 in 1e-300f64..1e300,
        radii in prop::collection::vec(1e-12f64..1e3, 0..6),
        cells in prop::collection::vec(1usize..10_000, 0..4),
        tol in prop::option::of(1e-300f64..1.0),
    ) {
        let mut cfg = ExperimentConfig::parse("[problem]\nn = 2\np = 2\ngamma = 0\nm = 0\n[liouville]\n[sweep]\n").unwrap();
        cfg.run.seed = seed;
        let prob = cfg.problem.as_mut().unwrap();
        prob.p = p;
        prob.gamma = gamma;
        prob.lambda0 = lambda0;
        cfg.liouville.as_mut().unwrap().radii = radii;
        cfg.sweep.as_mut().unwrap().cells = cells;
        cfg.solver.eps_g = tol;
        let back = ExperimentConfig::parse(&cfg.to_ini_string()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
