//! Criterion benchmarks for the planner, nearest-node queries, environment
//! steps and the imitation learner. Run with `cargo bench -p p2d2-bench`.
