use p2d2_core::envs::{MountainCar, Pendulum};
use p2d2_core::harness::report::{pipeline_summary, write_eval_csv, write_summary_csv};
use p2d2_core::harness::{end_to_end, PipelineConfig};
use p2d2_core::imitation::{read_policy, write_policy};
use p2d2_core::store::{read_demos, write_demos};

fn report_bytes(cfg: &PipelineConfig) -> (Vec<u8>, Vec<u8>) {
    let out = end_to_end(&MountainCar::new(), cfg, None).unwrap();
    let mut summary = Vec::new();
    write_summary_csv(&pipeline_summary(&out.report), &mut summary).unwrap();
    let mut episodes = Vec::new();
    write_eval_csv(&out.eval, &mut episodes).unwrap();
    (summary, episodes)
}

#[test]
fn mountaincar_report_accounting() {
    let cfg = PipelineConfig { demos: 10, eval_episodes: 10, seed: 4, ..Default::default() };
    let out = end_to_end(&MountainCar::new(), &cfg, None).unwrap();
    let r = &out.report;
    assert_eq!(r.demos_collected, 10);
    assert!(!r.shortfall && !r.timed_out);
    assert_eq!(r.eval_episodes, 10);
    assert_eq!(r.trained_pairs, r.demo_steps);
    assert!(r.total_env_steps as usize >= r.demo_steps);
    assert!(r.demo_mean_undisc_return < 0.0 && r.demo_mean_undisc_return >= -200.0);
    assert!((0.0..=1.0).contains(&r.imitation_success_rate));
    out.demos.validate(&MountainCar::new()).unwrap();
}

#[test]
fn same_master_seed_same_bytes() {
    let cfg = PipelineConfig { demos: 4, eval_episodes: 12, seed: 21, ..Default::default() };
    assert_eq!(report_bytes(&cfg), report_bytes(&cfg));
    let other = PipelineConfig { seed: 22, ..cfg };
    assert_ne!(report_bytes(&other).0, report_bytes(&PipelineConfig { seed: 21, ..other.clone() }).0);
}

#[test]
fn artefacts_round_trip() {
    let cfg = PipelineConfig { demos: 3, eval_episodes: 5, seed: 2, ..Default::default() };
    let out = end_to_end(&Pendulum::new(), &cfg, None).unwrap();
    let mut demos = Vec::new();
    write_demos(&out.demos, &mut demos).unwrap();
    assert_eq!(read_demos(&demos[..], None).unwrap(), out.demos);
    let mut policy = Vec::new();
    write_policy(&out.policy, &mut policy).unwrap();
    let back = read_policy(&policy[..]).unwrap();
    for t in &out.demos.trajectories {
        for s in &t.states {
            assert!(back.predict(s).bit_eq(&out.policy.predict(s)));
        }
    }
}
