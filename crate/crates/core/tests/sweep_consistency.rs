use siet_core::bounds::{
    achievable_dep_equal_radii, achievable_rate_geometric, dep_lower_bound_real, rate_upper_exact,
    rate_upper_stirling,
};
use siet_core::codebook::type_from_layer_counts;
use siet_core::constellation::{build_constellation, Layer, PackingMode};
use siet_core::energy::{constant_composition_energy, layered_energy, EnergyModel};
use siet_core::sweep::{
    frontier, sweep_region, LayerCountsMode, ProbabilityGrid, SweepConfig, SweepPoint,
};

fn config(layer_counts: LayerCountsMode) -> SweepConfig {
    SweepConfig {
        n: 80,
        layers: 3,
        peak_amplitude: 30.0,
        layer_counts,
        epsilon_grid: vec![1e-3, 1e-2, 1e-1],
        p_grid: ProbabilityGrid::Lattice { total: 10 },
        sigma2: 1.0,
        model: EnergyModel::default(),
        energy_requirement: None,
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn recompute(cfg: &SweepConfig, p: &SweepPoint) {
    let cst = build_constellation(
        (0..cfg.layers)
            .map(|c| Layer::new(p.amplitudes[c], p.layer_counts[c], 0.0, p.radii[c]).unwrap())
            .collect(),
    )
    .unwrap();
    let t = type_from_layer_counts(cfg.n, &p.probs, &p.layer_counts).unwrap();
    let rate = rate_upper_exact(&t);
    assert!(close(p.rate_nats, rate.nats) && close(p.rate_bits, rate.bits));
    let stirling = rate_upper_stirling(cfg.n, &t.probabilities()).unwrap();
    assert!(close(p.rate_stirling, stirling.nats));
    assert!(close(
        p.rate_achievable_bits,
        achievable_rate_geometric(&cst).unwrap()
    ));

    let e = constant_composition_energy(&t, &cst, &cfg.model).unwrap();
    assert!(close(p.energy_total, e));
    assert!(close(p.energy_per_cu, p.energy_total / cfg.n as f64));
    let linear: f64 = p
        .probs
        .as_slice()
        .iter()
        .zip(&p.amplitudes)
        .map(|(pc, a)| pc * cfg.model.symbol_energy(*a))
        .sum();
    assert!(close(p.energy_per_cu, linear));
    let layered = layered_energy(cfg.n, &p.probs, &cst, &cfg.model).unwrap();
    assert!(close(p.energy_total, layered));
    assert_eq!(p.eop, 0.0);

    let dep = achievable_dep_equal_radii(cfg.n, p.radii[0], cfg.sigma2);
    assert!(close(p.dep_achievable, dep));
    assert!(p.dep_achievable <= p.epsilon);
    let m = (rate.nats * cfg.n as f64).exp();
    if m >= 2.0 {
        let lower = dep_lower_bound_real(m, cfg.n, &t.probabilities(), &cst, cfg.sigma2).unwrap();
        assert!(close(p.dep_lower, lower));
    }
}

#[test]
fn points_match_direct_module_calls() {
    for mode in [
        LayerCountsMode::Fixed(vec![8, 4, 4]),
        LayerCountsMode::Packing(PackingMode::Strict),
        LayerCountsMode::Packing(PackingMode::Paper),
    ] {
        let fixed = matches!(mode, LayerCountsMode::Fixed(_));
        let cfg = config(mode);
        let out = sweep_region(&cfg).unwrap();
        // 66 lattice points per epsilon; packed counts rarely divide n·p.
        assert_eq!(out.points.len() + out.skipped.len(), 3 * 66);
        assert!(out.skipped.iter().all(|s| s.probs.is_some()));
        if fixed {
            assert!(!out.points.is_empty());
        }
        for p in &out.points {
            recompute(&cfg, p);
            assert!(
                p.rate_nats.is_finite() && p.energy_total.is_finite() && p.dep_lower.is_finite()
            );
        }
    }
}

#[test]
fn frontier_rate_falls_with_energy() {
    let out = sweep_region(&config(LayerCountsMode::Fixed(vec![8, 4, 4]))).unwrap();
    let f = frontier(&out.points).unwrap();
    assert!(f.len() >= 2);
    for w in f.windows(2) {
        assert!(w[0].energy_total < w[1].energy_total);
        assert!(w[0].rate_nats > w[1].rate_nats);
    }
    // Nothing in the sweep beats a frontier point on both axes.
    for q in &out.points {
        for p in &f {
            assert!(!(q.rate_nats > p.rate_nats && q.energy_total > p.energy_total));
        }
    }
}

#[test]
fn parallel_sweep_is_deterministic() {
    let cfg = config(LayerCountsMode::Fixed(vec![8, 4, 4]));
    let a = sweep_region(&cfg).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let b = pool.install(|| sweep_region(&cfg)).unwrap();
    assert_eq!(a, b);
}
