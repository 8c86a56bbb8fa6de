use gaugetn::config::{Ansatz, ExperimentConfig};
use gaugetn::record::RunStatus;
use gaugetn::run_ground_state;

fn susskind(ansatz: Ansatz, chi: usize) -> f64 {
    let mut cfg = ExperimentConfig::from_toml(
        "model = \"susskind\"\nlattice = [8]\nm = 0.0\nansatz = \"exact\"\nseed = 11\n",
    )
    .unwrap();
    cfg.ansatz = ansatz;
    cfg.chi = chi;
    cfg.validate().unwrap();
    let rec = run_ground_state(&cfg);
    assert_eq!(rec.status, RunStatus::Ok, "{:?}", rec.errors);
    rec.ground.unwrap().energy
}

#[test]
fn dmrg_agrees_with_exact_and_improves_with_chi() {
    let exact = susskind(Ansatz::Exact, 32);
    let mps = susskind(Ansatz::Mps, 32);
    assert!((exact - mps).abs() < 1e-8, "{exact} vs {mps}");
    let product = susskind(Ansatz::Mps, 1);
    let chi16 = susskind(Ansatz::Mps, 16);
    assert!(product >= chi16 - 1e-12);
    assert!(chi16 >= exact - 1e-10);
}
